"""Ergodic averages along the translation orbit of nu.

Functionals are looked up by name so experiments can be described in config
files.  Every functional acts on a (lazy) measure and returns an exact
rational.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Sequence, Tuple

from .errors import ConsistencyError
from .extension import ExtendedState
from .padic import GridMeasure, MeasureView, ppow, translated_view, view
from .translation import MeasureLike, return_times, tau

Measure = MeasureView


@dataclass(frozen=True)
class Functional:
    """A named function of a measure with the unit range ``[lo, hi)`` it reads."""

    name: str
    fn: Callable[[Measure], Fraction]
    lo: int = 0
    hi: int = 1
    min_resolution: int = 0

    def __call__(self, m: Measure) -> Fraction:
        return self.fn(m)


def _occupied(ks: Tuple[int, ...]) -> Callable[[Measure], Fraction]:
    def fn(m: Measure) -> Fraction:
        return Fraction(int(all(m.mass_between(k, k + 1) > 0 for k in ks)))

    return fn


def _parse_ints(text: str) -> Tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise ValueError(f"expected comma separated integers, got {text!r}") from None


def functional(name: str) -> Functional:
    """Registry lookup.

    ``one``; ``occupied:k`` (indicator of ``m[k, k+1) > 0``);
    ``pattern:k1,k2,...`` (all of them occupied); ``unit_mass:k``;
    ``cell_mass:l:c`` (mass of ``[c p^-l, (c+1) p^-l)``); and products
    ``a*b`` of any of these.
    """
    name = name.strip()
    if "*" in name:
        parts = [functional(x) for x in name.split("*")]

        def prod(m: Measure) -> Fraction:
            out = Fraction(1)
            for f in parts:
                out *= f(m)
            return out

        return Functional(
            name,
            prod,
            min(f.lo for f in parts),
            max(f.hi for f in parts),
            max(f.min_resolution for f in parts),
        )
    head, _, arg = name.partition(":")
    if head == "one" and not arg:
        return Functional(name, lambda m: Fraction(1), 0, 0)
    if head in ("occupied", "pattern") and arg:
        ks = _parse_ints(arg)
        if head == "occupied" and len(ks) != 1:
            raise ValueError("occupied takes a single offset")
        return Functional(name, _occupied(ks), min(ks), max(ks) + 1)
    if head == "unit_mass" and arg:
        (k,) = _parse_ints(arg)
        return Functional(name, lambda m: m.mass_between(k, k + 1), k, k + 1)
    if head == "cell_mass" and arg:
        level, _, c = arg.partition(":")
        level, c = int(level), int(c)
        if level < 0:
            raise ValueError("cell level must be >= 0")

        def cell(m: Measure) -> Fraction:
            w = ppow(m.p, -level)
            return m.mass_between(c * w, (c + 1) * w)

        return Functional(name, cell, min(0, c), max(1, c + 1), level)
    raise ValueError(f"unknown functional {name!r}")


def _nu(e: MeasureLike) -> GridMeasure:
    return e.nu if isinstance(e, ExtendedState) else e


def _eval_at(f: Functional, nu: GridMeasure, x) -> Fraction:
    return f(translated_view(nu, x))


# ---------------------------------------------------------------------------
# Hurewicz operator and discrete averages
# ---------------------------------------------------------------------------


def u_t_power(f: Functional, e: MeasureLike, n: int) -> Fraction:
    """``U_T^n f = f(T^n e) * nu[tau_n, tau_n + 1)``.

    The mass factor is computed twice: as the product of the derivatives of T
    along the orbit, and in closed form.  They must agree exactly.
    """
    nu = _nu(e)
    v = view(nu)
    product = Fraction(1)
    for _ in range(n):
        t = tau(v)
        product *= v.mass_between(t, t + 1)
        v = v.translate_normalize(t)
    t_n = return_times(nu, n)[-1] if n else 0
    closed = nu.mass_between(t_n, t_n + 1)
    if product != closed:
        raise ConsistencyError(f"U_T^{n}: orbit product {product} != closed form {closed}")
    return f(v) * closed


@dataclass(frozen=True)
class AverageSeries:
    """``A_m = numerator_m / normalizer_m`` at each checkpoint m."""

    checkpoints: Tuple[int, ...]
    numerators: Tuple[Fraction, ...]
    normalizers: Tuple[Fraction, ...]

    @property
    def exact(self) -> Tuple[Fraction, ...]:
        return tuple(a / b for a, b in zip(self.numerators, self.normalizers))

    @property
    def values(self) -> Tuple[float, ...]:
        return tuple(float(x) for x in self.exact)

    def at(self, m: int) -> Fraction:
        i = self.checkpoints.index(m)
        return self.numerators[i] / self.normalizers[i]

    def cauchy_sup(self, start: int) -> float:
        """``sup |A_m - A_start|`` over checkpoints ``start <= m <= 2 start``."""
        ref = self.at(start)
        return max(
            float(abs(a - ref)) for m, a in zip(self.checkpoints, self.exact) if start <= m <= 2 * start
        )


def discrete_series(f: Functional, e: MeasureLike, checkpoints: Sequence[int]) -> AverageSeries:
    """``A_m = sum_{j<=m} f(T_j e) nu[j, j+1) / nu[0, m+1)`` at every checkpoint.

    Unoccupied units contribute nothing and f is not evaluated there.
    """
    nu = _nu(e)
    marks = sorted(set(int(m) for m in checkpoints))
    if not marks or marks[0] < 0:
        raise ValueError("checkpoints must be nonnegative")
    nums, norms = [], []
    num = Fraction(0)
    norm = Fraction(0)
    nu.mass_between(0, marks[-1] + 1)  # raises WindowExhausted when [0, m+1) is not known
    occupied = set(nu.occupied_units(0, marks[-1] + 1))
    k = 0
    for j in range(marks[-1] + 1):
        if j in occupied:
            w = nu.unit_mass(j)
            num += _eval_at(f, nu, j) * w
            norm += w
        if j == marks[k]:
            if not norm:
                raise ValueError(f"nu[0, {j + 1}) = 0: the average is undefined")
            nums.append(num)
            norms.append(norm)
            k += 1
    return AverageSeries(tuple(marks), tuple(nums), tuple(norms))


def discrete_average(f: Functional, e: MeasureLike, m: int) -> Fraction:
    return discrete_series(f, e, [m]).exact[0]


def hurewicz_average(f: Functional, e: MeasureLike, n: int) -> Fraction:
    """``sum_{k<n} f(T^k e) nu[tau_k, tau_k+1) / nu[0, tau_{n-1}+1)`` with ``tau_0 = 0``.

    Iterates T lazily and obtains the weights as cocycle products.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    nu = _nu(e)
    v = view(nu)
    weight = nu.mass_between(0, 1)
    total = f(v) * weight
    t = 0
    for _ in range(n - 1):
        step = tau(v)
        weight *= v.mass_between(step, step + 1)
        v = v.translate_normalize(step)
        t += step
        total += f(v) * weight
    return total / nu.mass_between(0, t + 1)


# ---------------------------------------------------------------------------
# continuous averages
# ---------------------------------------------------------------------------


def _cells(nu: GridMeasure, a, b, level: int) -> List[Tuple[Fraction, Fraction]]:
    """(left endpoint, mass) of the positive level-``level`` cells in ``[a, b)``."""
    nu.mass_between(a, b)  # window check
    coarse = nu.coarsen(level)
    w = ppow(nu.p, -level)
    ia, ib = coarse._span(a, b)
    return [(c * w, m) for c, m in coarse.cells() if ia <= c < ib]


def continuous_between(f: Functional, e: MeasureLike, a, b, quad_level: int) -> Tuple[Fraction, Fraction]:
    """Left-endpoint quadrature of ``int_a^b f(t_x^* nu) dnu(x)`` and ``nu[a, b)``."""
    nu = _nu(e)
    if quad_level > nu.resolution:
        raise ValueError(f"quad_level {quad_level} exceeds resolution {nu.resolution}")
    total = Fraction(0)
    for x, m in _cells(nu, a, b, quad_level):
        total += m * _eval_at(f, nu, x)
    return total, nu.mass_between(a, b)


def continuous_average(f: Functional, e: MeasureLike, t_end: int, quad_level: int) -> Fraction:
    """``1/nu[0, T) int_0^T f(t_x^* nu) dnu(x)`` by left-endpoint quadrature."""
    if t_end < 1:
        raise ValueError("T must be a positive integer")
    num, den = continuous_between(f, e, 0, t_end, quad_level)
    return num / den


def splice_identity(f: Functional, e: MeasureLike, x, t_end: int, quad_level: int) -> Tuple[Fraction, Fraction]:
    """Both sides of ``A_0^N = nu[0,x)/nu[0,N) A_0^x + nu[x,N)/nu[0,N) A_x^N``."""
    whole, n_all = continuous_between(f, e, 0, t_end, quad_level)
    left, n_left = continuous_between(f, e, 0, x, quad_level)
    right, n_right = continuous_between(f, e, x, t_end, quad_level)
    parts = Fraction(0)
    if n_left:
        parts += n_left / n_all * (left / n_left)
    if n_right:
        parts += n_right / n_all * (right / n_right)
    return whole / n_all, parts


def unit_integral_functional(f: Functional, quad_level: int) -> Functional:
    """``F^f(m) = int_0^1 f(t_x^* m) dm(x)`` by the same left-endpoint quadrature."""
    def F(m: Measure) -> Fraction:
        w = ppow(m.p, -quad_level)
        total = Fraction(0)
        for c in range(m.p**quad_level):
            x = c * w
            mass = m.mass_between(x, x + w)
            if mass:
                total += mass * f(m.translate_normalize(x))
        return total

    return Functional(f"F[{f.name}]", F, f.lo, f.hi + 1, max(quad_level, f.min_resolution))


def reduction_sides(f: Functional, e: MeasureLike, t_end: int, quad_level: int) -> Tuple[Fraction, Fraction]:
    """``A_0^N(f)`` and ``A_{N-1}`` of ``F^f``, computed independently."""
    cont = continuous_average(f, e, t_end, quad_level)
    disc = discrete_average(unit_integral_functional(f, quad_level), e, t_end - 1)
    return cont, disc


def chacon_ornstein_ratio(e: MeasureLike, n: int) -> Fraction:
    """``nu[tau_n, tau_n+1) / nu[0, tau_n+1)``.

    The normalizer is also summed over the return times; the two must agree.
    """
    nu = _nu(e)
    times = [0] + (return_times(nu, n) if n else [])
    t = times[-1]
    direct = nu.mass_between(0, t + 1)
    summed = sum((nu.unit_mass(k) for k in times), Fraction(0))
    if direct != summed:
        raise ConsistencyError(f"nu[0, tau_{n}+1) = {direct} but the return-time sum is {summed}")
    return nu.unit_mass(t) / direct
