"""Exact measures on p-adic grids.

A :class:`GridMeasure` stores a nonnegative measure on R as exact rational
masses on the cells ``[c p^-r, (c+1) p^-r)`` lying inside an integer window
``[lo, hi)``.  Outside the window the measure is *unknown* unless the measure
is flagged ``closed`` (known to vanish there).  Operations that would need the
unknown part raise :class:`~cpshift.errors.WindowExhausted` instead of
guessing zero.
"""
from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import accumulate
from typing import Iterator, Mapping, Optional, Sequence, Tuple, Union

from .errors import (
    AlignmentError,
    InvalidWordError,
    ResolutionExhausted,
    UndefinedPsi,
    WindowExhausted,
)

Rational = Union[int, Fraction]

ZERO = Fraction(0)
ONE = Fraction(1)


def ppow(p: int, k: int) -> Fraction:
    return Fraction(p) ** k


def is_power_of(n: int, p: int) -> bool:
    if n < 1:
        return False
    while n % p == 0:
        n //= p
    return n == 1


def _as_fraction(x: Rational) -> Fraction:
    return x if type(x) is Fraction else Fraction(x)


def _grid_index(x: Rational, p: int, r: int) -> int:
    q = p**r
    if type(x) is int:
        return x * q
    num, den = x.numerator, x.denominator
    if q % den:
        raise AlignmentError(f"{x} is not a multiple of {p}^-{r}")
    return num * (q // den)


def _reduce(x: Rational) -> Rational:
    """Integral rationals as plain ints, which keeps index arithmetic cheap."""
    return x.numerator if type(x) is Fraction and x.denominator == 1 else x


# ---------------------------------------------------------------------------
# intervals and homotheties
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Interval:
    """Half-open interval ``[left, right)`` with rational endpoints."""

    left: Fraction
    right: Fraction

    def __post_init__(self):
        object.__setattr__(self, "left", _as_fraction(self.left))
        object.__setattr__(self, "right", _as_fraction(self.right))
        if not self.right > self.left:
            raise ValueError(f"empty interval [{self.left}, {self.right})")

    @property
    def length(self) -> Fraction:
        return self.right - self.left

    def child(self, j: int, p: int) -> "Interval":
        """The j-th of the p equal subintervals (``I^j``)."""
        if not 0 <= j < p:
            raise InvalidWordError(f"digit {j} not in 0..{p - 1}")
        w = self.length / p
        return Interval(self.left + j * w, self.left + (j + 1) * w)

    def contains(self, other: "Interval") -> bool:
        return self.left <= other.left and other.right <= self.right

    def shifted(self, x: Rational) -> "Interval":
        return Interval(self.left + x, self.right + x)

    @property
    def is_integral(self) -> bool:
        return self.left.denominator == 1 and self.right.denominator == 1

    def __repr__(self):
        return f"[{self.left}, {self.right})"


@dataclass(frozen=True)
class PAdicInterval:
    """The grid cell ``[index p^-level, (index+1) p^-level)``."""

    p: int
    level: int
    index: int

    def __post_init__(self):
        if self.p < 2:
            raise ValueError("base p must be >= 2")

    @property
    def length(self) -> Fraction:
        return ppow(self.p, -self.level)

    @property
    def left(self) -> Fraction:
        return self.index * self.length

    @property
    def right(self) -> Fraction:
        return (self.index + 1) * self.length

    def child(self, j: int) -> "PAdicInterval":
        if not 0 <= j < self.p:
            raise InvalidWordError(f"digit {j} not in 0..{self.p - 1}")
        return PAdicInterval(self.p, self.level + 1, self.index * self.p + j)

    def parent(self) -> "PAdicInterval":
        return PAdicInterval(self.p, self.level - 1, self.index // self.p)

    def as_interval(self) -> Interval:
        return Interval(self.left, self.right)


def interval_of_word(word: Sequence[int], p: int) -> PAdicInterval:
    """``[i_1, ..., i_n]_{p^n}`` as a level-n grid cell."""
    index = 0
    for d in word:
        if not 0 <= d < p:
            raise InvalidWordError(f"digit {d} not in 0..{p - 1}")
        index = index * p + d
    return PAdicInterval(p, len(word), index)


IntervalLike = Union[Interval, PAdicInterval]


def _endpoints(I: IntervalLike) -> Tuple[Fraction, Fraction]:
    return I.left, I.right


@dataclass(frozen=True)
class Homothety:
    """Orientation preserving map ``x -> p^exponent * x + offset``."""

    p: int
    exponent: int
    offset: Fraction = ZERO

    def __post_init__(self):
        object.__setattr__(self, "offset", _as_fraction(self.offset))

    @property
    def scale(self) -> Fraction:
        return ppow(self.p, self.exponent)

    def __call__(self, x: Rational) -> Fraction:
        return self.scale * x + self.offset

    def compose(self, inner: "Homothety") -> "Homothety":
        """``self o inner``."""
        if inner.p != self.p:
            raise ValueError("mismatched bases")
        return Homothety(self.p, self.exponent + inner.exponent, self.scale * inner.offset + self.offset)

    def inverse(self) -> "Homothety":
        return Homothety(self.p, -self.exponent, -self.offset / self.scale)

    def image(self, I: Interval) -> Interval:
        return Interval(self(I.left), self(I.right))

    @classmethod
    def identity(cls, p: int) -> "Homothety":
        return cls(p, 0, ZERO)

    @classmethod
    def digit(cls, p: int, i: int) -> "Homothety":
        """rho_i(x) = p x - i, taking ``[i]_p`` onto [0, 1)."""
        if not 0 <= i < p:
            raise InvalidWordError(f"digit {i} not in 0..{p - 1}")
        return cls(p, 1, Fraction(-i))

    @classmethod
    def translation(cls, p: int, x: Rational) -> "Homothety":
        """t_x(y) = y - x."""
        return cls(p, 0, -_as_fraction(x))

    @classmethod
    def between(cls, I: Interval, J: Interval, p: int) -> "Homothety":
        """The unique homothety taking I onto J (their length ratio must be a power of p)."""
        ratio = J.length / I.length
        e = 0
        while ratio > 1 and ratio.denominator == 1 and ratio.numerator % p == 0:
            ratio /= p
            e += 1
        while ratio < 1 and ratio.numerator == 1 and ratio.denominator % p == 0:
            ratio *= p
            e -= 1
        if ratio != 1:
            raise AlignmentError(f"length ratio of {J} to {I} is not a power of {p}")
        scale = ppow(p, e)
        return cls(p, e, J.left - scale * I.left)


UNIT = Interval(ZERO, ONE)


# ---------------------------------------------------------------------------
# grid measures
# ---------------------------------------------------------------------------


def _primitive(masses: Mapping[int, Rational]) -> Tuple[dict, Fraction]:
    """Split rational cell masses into coprime positive integer weights and one unit."""
    items = [(c, _as_fraction(m)) for c, m in masses.items() if m]
    if not items:
        return {}, ONE
    den = math.lcm(*(m.denominator for _, m in items))
    ints = {c: m.numerator * (den // m.denominator) for c, m in items}
    g = math.gcd(*ints.values())
    if g != 1:
        ints = {c: w // g for c, w in ints.items()}
    return ints, Fraction(g, den)


class GridMeasure:
    """Exact measure on the level-``resolution`` cells of the window ``[lo, hi)``.

    Cell c carries mass ``weights[c] * unit`` where the weights are coprime
    positive integers, so rescaling only touches ``unit`` and equality is a
    comparison of integer maps.  Zero cells are not stored; the zero measure
    has no weights.
    """

    __slots__ = ("p", "resolution", "lo", "hi", "weights", "unit", "closed", "_keys_cache", "_prefix_cache")

    def __init__(
        self,
        p: int,
        resolution: int,
        lo: int,
        hi: int,
        masses: Optional[Mapping[int, Rational]] = None,
        closed: bool = False,
    ):
        if p < 2:
            raise ValueError("base p must be >= 2")
        if resolution < 0:
            raise ValueError("resolution must be >= 0")
        if not is_power_of(hi - lo, p):
            raise ValueError(f"window [{lo}, {hi}) length is not a power of {p}")
        masses = masses or {}
        q = p**resolution
        first, last = lo * q, hi * q
        for c, m in masses.items():
            if m < 0:
                raise ValueError(f"negative mass {m} at cell {c}")
            if m and not first <= c < last:
                raise ValueError(f"cell {c} lies outside the window")
        weights, unit = _primitive(masses)
        self._set(p, resolution, lo, hi, weights, unit, closed)

    def _set(self, p, resolution, lo, hi, weights, unit, closed, keys=None):
        self.p, self.resolution, self.lo, self.hi = p, resolution, lo, hi
        self.weights, self.unit, self.closed = weights, unit, closed
        self._keys_cache = keys
        self._prefix_cache = None

    @classmethod
    def _make(cls, p, resolution, lo, hi, weights, unit, closed, keys=None) -> "GridMeasure":
        # internal constructor: weights are already primitive and inside the window
        m = object.__new__(cls)
        m._set(p, resolution, lo, hi, weights, unit, closed, keys)
        return m

    def _sub(self, weights: dict, unit: Fraction, **kw) -> "GridMeasure":
        """Same grid, new weights (not necessarily primitive)."""
        if weights:
            g = math.gcd(*weights.values())
            if g != 1:
                weights = {c: w // g for c, w in weights.items()}
                unit = unit * g
        else:
            unit = ONE
        args = dict(p=self.p, resolution=self.resolution, lo=self.lo, hi=self.hi, closed=self.closed)
        args.update(kw)
        return GridMeasure._make(weights=weights, unit=unit, **args)

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, p: int, resolution: int = 0, lo: int = 0, hi: int = 1) -> "GridMeasure":
        return cls(p, resolution, lo, hi, {}, closed=True)

    @classmethod
    def uniform(cls, p: int, resolution: int, lo: int = 0, hi: int = 1, total_per_unit: Rational = 1):
        q = p**resolution
        weights = {c: 1 for c in range(lo * q, hi * q)}
        unit = Fraction(total_per_unit) / q
        if not unit:
            return cls.zero(p, resolution, lo, hi)
        return cls._make(p, resolution, lo, hi, weights, unit, True)

    def with_closed(self, closed: bool) -> "GridMeasure":
        return GridMeasure._make(self.p, self.resolution, self.lo, self.hi, self.weights, self.unit, closed, self._keys_cache)

    # -- basic structure ---------------------------------------------------

    @property
    def masses(self) -> dict:
        """Cell index -> exact mass."""
        u = self.unit
        return {c: w * u for c, w in self.weights.items()}

    @property
    def cells_per_unit(self) -> int:
        return self.p**self.resolution

    @property
    def cell_width(self) -> Fraction:
        return ppow(self.p, -self.resolution)

    @property
    def window(self) -> Interval:
        return Interval(self.lo, self.hi)

    @property
    def is_zero(self) -> bool:
        return not self.weights

    @property
    def _keys(self) -> list:
        if self._keys_cache is None:
            self._keys_cache = sorted(self.weights)
        return self._keys_cache

    @property
    def _prefix(self) -> list:
        if self._prefix_cache is None:
            self._prefix_cache = [0, *accumulate(self.weights[c] for c in self._keys)]
        return self._prefix_cache

    @property
    def total_mass(self) -> Fraction:
        return self._prefix[-1] * self.unit if self.weights else ZERO

    def cells(self) -> Iterator[Tuple[int, Fraction]]:
        """(index, mass) pairs in increasing index order."""
        u = self.unit
        for c in self._keys:
            yield c, self.weights[c] * u

    def cell(self, c: int) -> PAdicInterval:
        return PAdicInterval(self.p, self.resolution, c)

    def __eq__(self, other):
        if not isinstance(other, GridMeasure):
            return NotImplemented
        return (
            self.p == other.p
            and self.resolution == other.resolution
            and self.lo == other.lo
            and self.hi == other.hi
            and self.closed == other.closed
            and (self.is_zero or self.unit == other.unit)
            and self.weights == other.weights
        )

    __hash__ = None

    def __repr__(self):
        return (
            f"GridMeasure(p={self.p}, r={self.resolution}, window=[{self.lo}, {self.hi}), "
            f"cells={len(self.weights)}, total={self.total_mass}, closed={self.closed})"
        )

    # -- mass queries ------------------------------------------------------

    def _span(self, a: Rational, b: Rational) -> Tuple[int, int]:
        return _grid_index(a, self.p, self.resolution), _grid_index(b, self.p, self.resolution)

    def _weight_between(self, ia: int, ib: int) -> int:
        if ib <= ia:
            return 0
        keys = self._keys
        a, b = bisect_left(keys, ia), bisect_left(keys, ib)
        if b - a <= 32 and self._prefix_cache is None:
            w = self.weights
            return sum(w[keys[j]] for j in range(a, b))
        return self._prefix[b] - self._prefix[a]

    def _sum_cells(self, ia: int, ib: int) -> Fraction:
        w = self._weight_between(ia, ib)
        return w * self.unit if w else ZERO

    def covers(self, a: Rational, b: Rational) -> bool:
        return self.closed or (self.lo <= a and b <= self.hi)

    def known_mass(self, a: Rational, b: Rational) -> Fraction:
        """Mass of ``[a, b)`` counting only cells inside the window."""
        ia, ib = self._span(a, b)
        return self._sum_cells(ia, ib)

    def mass_between(self, a: Rational, b: Rational) -> Fraction:
        """Mass of ``[a, b)``; raises WindowExhausted if part of it is unknown."""
        if not self.covers(a, b):
            raise WindowExhausted(f"[{a}, {b}) leaves the window [{self.lo}, {self.hi})")
        return self.known_mass(a, b)

    def unit_mass(self, j: int) -> Fraction:
        return self.mass_between(j, j + 1)

    def first_cell_from(self, index: int) -> Optional[int]:
        keys = self._keys
        k = bisect_left(keys, index)
        return keys[k] if k < len(keys) else None

    def last_cell_before(self, index: int) -> Optional[int]:
        keys = self._keys
        k = bisect_left(keys, index)
        return keys[k - 1] if k > 0 else None

    def occupied_units(self, a: int, b: int) -> list:
        """Integers j in [a, b) with positive mass on [j, j+1), ascending."""
        q = self.cells_per_unit
        keys = self._keys
        out = []
        k = bisect_left(keys, a * q)
        end = b * q
        while k < len(keys) and keys[k] < end:
            j = keys[k] // q
            out.append(j)
            k = bisect_left(keys, (j + 1) * q, k)
        return out

    # -- derived measures --------------------------------------------------

    def scaled(self, lam: Rational) -> "GridMeasure":
        lam = _as_fraction(lam)
        if lam < 0:
            raise ValueError("scale factor must be nonnegative")
        if lam == 1 or self.is_zero:
            return self
        if lam == 0:
            return self._sub({}, ONE)
        return GridMeasure._make(
            self.p, self.resolution, self.lo, self.hi, self.weights, self.unit * lam, self.closed, self._keys_cache
        )

    def coarsen(self, r: int) -> "GridMeasure":
        if r > self.resolution:
            raise ResolutionExhausted(f"cannot refine resolution {self.resolution} to {r}")
        if r == self.resolution:
            return self
        d = self.p ** (self.resolution - r)
        out: dict = {}
        for c, w in self.weights.items():
            k = c // d
            out[k] = out.get(k, 0) + w
        return self._sub(out, self.unit, resolution=r)

    def with_window(self, lo: int, hi: int) -> "GridMeasure":
        """The same measure seen through another window.

        Widening needs a closed measure; shrinking forgets what lies outside.
        """
        if (lo < self.lo or hi > self.hi) and not self.closed:
            raise WindowExhausted("cannot widen the window of a measure that is unknown outside it")
        if not is_power_of(hi - lo, self.p):
            raise ValueError(f"window [{lo}, {hi}) length is not a power of {self.p}")
        q = self.cells_per_unit
        weights = {c: w for c, w in self.weights.items() if lo * q <= c < hi * q}
        closed = self.closed and len(weights) == len(self.weights)
        return self._sub(weights, self.unit, lo=lo, hi=hi, closed=closed)

    def agrees_with(self, other: "GridMeasure", window: Optional[Interval] = None) -> bool:
        """Exact agreement on ``window`` (default: common window) at the coarser resolution."""
        if self.p != other.p:
            return False
        if window is None:
            lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
            if lo >= hi:
                return True
            window = Interval(lo, hi)
        if not (self.covers(window.left, window.right) and other.covers(window.left, window.right)):
            raise WindowExhausted("comparison window not known for both measures")
        r = min(self.resolution, other.resolution)
        return _cells_in(self.coarsen(r), window) == _cells_in(other.coarsen(r), window)

    # -- unit-interval measure interface -----------------------------------

    def word_mass(self, word: Sequence[int]) -> Fraction:
        if len(word) > self.resolution:
            raise ResolutionExhausted(f"word of length {len(word)} exceeds resolution {self.resolution}")
        return mass(self, interval_of_word(word, self.p))

    def to_grid(self, r: int) -> "GridMeasure":
        return self.coarsen(r)

    def zoom(self, i: int) -> "GridMeasure":
        return zoom(self, i)


def _cells_in(m: GridMeasure, window: Interval) -> dict:
    ia, ib = m._span(window.left, window.right)
    u = m.unit
    return {c: w * u for c, w in m.weights.items() if ia <= c < ib}


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def mass(m: GridMeasure, I: IntervalLike) -> Fraction:
    """Exact mass of I; cells outside the window contribute 0."""
    a, b = _endpoints(I)
    return m.known_mass(a, b)


def restrict(m: GridMeasure, A: IntervalLike) -> GridMeasure:
    """``1_A m``.  The window shrinks to A when A is an integer window."""
    a, b = _endpoints(A)
    if not m.covers(a, b):
        raise WindowExhausted(f"restriction to [{a}, {b}) leaves the window")
    ia, ib = m._span(a, b)
    keys = m._keys
    inside = keys[bisect_left(keys, ia) : bisect_left(keys, ib)]
    weights = {c: m.weights[c] for c in inside}
    if a.denominator == 1 and b.denominator == 1 and is_power_of(int(b - a), m.p):
        lo, hi = int(a), int(b)
    else:
        lo, hi = m.lo, m.hi
    out = m._sub(weights, m.unit, lo=lo, hi=hi, closed=True)
    if out.weights is weights:
        out._keys_cache = inside
    return out


def push(m: GridMeasure, rho: Homothety) -> GridMeasure:
    """Pushforward of m by an orientation preserving homothety."""
    if rho.p != m.p:
        raise ValueError("mismatched bases")
    r = m.resolution - rho.exponent
    if r < 0:
        raise ResolutionExhausted(f"pushing by p^{rho.exponent} needs resolution >= {rho.exponent}")
    shift = rho.offset * m.p**r
    if shift.denominator != 1:
        raise AlignmentError(f"offset {rho.offset} is not on the level-{r} grid")
    lo, hi = rho(m.lo), rho(m.hi)
    if lo.denominator != 1 or hi.denominator != 1:
        raise AlignmentError(f"window [{m.lo}, {m.hi}) maps to non-integer [{lo}, {hi}); restrict first")
    s = shift.numerator
    if not s:
        return GridMeasure._make(m.p, r, int(lo), int(hi), m.weights, m.unit, m.closed, m._keys_cache)
    weights = {c + s: w for c, w in m.weights.items()}
    # translation preserves the order of cell indices
    keys = [c + s for c in m._keys_cache] if m._keys_cache is not None else None
    return GridMeasure._make(m.p, r, int(lo), int(hi), weights, m.unit, m.closed, keys)


def translate(m: GridMeasure, k: int) -> GridMeasure:
    """``t_k m`` for an integer k."""
    return push(m, Homothety.translation(m.p, k))


def _psi_at(m: GridMeasure, x: Rational) -> Tuple[int, Fraction]:
    """psi of ``t_x m`` and the mass of its normalizing interval."""
    if m.is_zero:
        raise UndefinedPsi("psi is undefined for the zero measure")
    q = m.cells_per_unit
    ix = _grid_index(x, m.p, m.resolution)
    best = None
    right = m.first_cell_from(ix)
    if right is not None:
        # cell [y, y+w) with y >= 0 in translated coordinates needs n > y
        best = (right - ix) // q + 1
    left = m.last_cell_before(ix)
    if left is not None:
        # cell ending at z <= 0 needs n > 1 - z
        z_cells = left + 1 - ix
        n = (q - z_cells) // q + 1
        best = n if best is None else min(best, n)
    if best is None:
        raise WindowExhausted("no mass inside the window")
    lo_n, hi_n = x - (best - 1), x + best
    if not m.covers(lo_n, hi_n):
        # the search itself is fine, but smaller intervals or the normalizer may see unknown mass
        raise WindowExhausted(f"normalizing interval [{lo_n}, {hi_n}) leaves the window")
    return best, m.known_mass(lo_n, hi_n)


def psi(m: GridMeasure) -> int:
    """Smallest n >= 1 with ``m[-(n-1), n) > 0``."""
    return _psi_at(m, 0)[0]


def normalize(m: GridMeasure) -> GridMeasure:
    """N m: scale so that ``[-(psi-1), psi)`` has mass one; N 0 = 0."""
    if m.is_zero:
        return m
    _, denom = _psi_at(m, 0)
    return m.scaled(1 / denom)


def translate_normalize(m: GridMeasure, k: int) -> GridMeasure:
    """``t_k^* m = N t_k m``."""
    return normalize(translate(m, k))


def zoom(mu: GridMeasure, i: int) -> GridMeasure:
    """``mu^i = R N rho_i mu`` for a measure on [0, 1)."""
    if (mu.lo, mu.hi) != (0, 1):
        raise ValueError("zoom expects a measure on [0, 1)")
    if mu.resolution < 1:
        raise ResolutionExhausted("zoom needs resolution >= 1")
    pushed = push(mu, Homothety.digit(mu.p, i))
    unit = pushed.known_mass(0, 1)
    if unit == 0:
        # R kills everything N could rescale
        return GridMeasure.zero(mu.p, mu.resolution - 1)
    return restrict(pushed, UNIT).scaled(1 / unit)


def proxy_distance(a, b, window: Interval, resolution: int) -> Fraction:
    """Total variation over level-``resolution`` cells of ``window``.

    Works for anything exposing ``mass_between`` (grid measures, views).
    Only an upper-bound proxy for weak-topology closeness.
    """
    p = a.p
    w = ppow(p, -resolution)
    n = int((window.right - window.left) / w)
    total = ZERO
    x = window.left
    for _ in range(n):
        total += abs(a.mass_between(x, x + w) - b.mass_between(x, x + w))
        x += w
    return total


# ---------------------------------------------------------------------------
# lazy translated views
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MeasureView:
    """``A -> base(A + shift) / scale``: a translated, rescaled grid measure.

    Used to evaluate functionals on ``t_x^* nu`` without copying nu.
    """

    base: GridMeasure
    shift: Rational = 0
    scale: Fraction = ONE

    @property
    def p(self) -> int:
        return self.base.p

    @property
    def resolution(self) -> int:
        return self.base.resolution

    @property
    def is_zero(self) -> bool:
        return self.base.is_zero

    def covers(self, a: Rational, b: Rational) -> bool:
        return self.base.covers(a + self.shift, b + self.shift)

    def mass_between(self, a: Rational, b: Rational) -> Fraction:
        return self.base.mass_between(a + self.shift, b + self.shift) / self.scale

    def translate_normalize(self, x: Rational) -> "MeasureView":
        """``t_x^*`` of this view (another view on the same base)."""
        s = _reduce(self.shift + x)
        _, denom = _psi_at(self.base, s)
        return MeasureView(self.base, s, denom)

    def materialize(self) -> GridMeasure:
        """The view as a stand-alone grid measure (integer shifts only)."""
        if self.shift.denominator != 1:
            raise AlignmentError("only integer shifts can be materialized onto an integer window")
        return translate(self.base, int(self.shift)).scaled(1 / self.scale)


def view(m: GridMeasure) -> MeasureView:
    return MeasureView(m)


def translated_view(m: GridMeasure, x: Rational) -> MeasureView:
    """Lazy ``t_x^* m``."""
    return MeasureView(m).translate_normalize(x)


# ---------------------------------------------------------------------------
# self-similar measures on [0, 1)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SelfSimilarMeasure:
    """Bernoulli measure on [0, 1): ``mu[i_1..i_n] = w_{i_1} ... w_{i_n}``.

    Stored symbolically, so every resolution is available.  All-zero weights
    encode the zero measure.
    """

    p: int
    weights: Tuple[Fraction, ...]

    def __post_init__(self):
        w = tuple(_as_fraction(x) for x in self.weights)
        if len(w) != self.p:
            raise ValueError(f"need {self.p} weights, got {len(w)}")
        if any(x < 0 for x in w):
            raise ValueError("weights must be nonnegative")
        if sum(w) not in (0, 1):
            raise ValueError("weights must sum to 1 (or all vanish for the zero measure)")
        object.__setattr__(self, "weights", w)

    resolution = None

    @classmethod
    def zero(cls, p: int) -> "SelfSimilarMeasure":
        return cls(p, (ZERO,) * p)

    @property
    def is_zero(self) -> bool:
        return not any(self.weights)

    @cached_property
    def _num_den(self) -> Tuple[Tuple[int, ...], int]:
        d = math.lcm(*(w.denominator for w in self.weights))
        return tuple(int(w * d) for w in self.weights), d

    def word_mass(self, word: Sequence[int]) -> Fraction:
        if self.is_zero:
            return ZERO
        word = tuple(word)
        counts = [word.count(j) for j in range(self.p)]
        if sum(counts) != len(word):
            raise InvalidWordError(f"word {word} has digits outside 0..{self.p - 1}")
        nums, d = self._num_den
        num = 1
        for w, c in zip(nums, counts):
            if c:
                num *= w**c
        return Fraction(num, d ** len(word))

    def _cell_numerators(self, r: int) -> dict:
        cells = {0: 1} if not self.is_zero else {}
        nums, _ = self._num_den
        support = [(j, w) for j, w in enumerate(nums) if w]
        for _ in range(r):
            cells = {c * self.p + j: m * w for c, m in cells.items() for j, w in support}
        return cells

    def cell_masses(self, r: int) -> dict:
        """Nonzero level-r cell masses."""
        d = self._num_den[1] ** r
        return {c: Fraction(m, d) for c, m in self._cell_numerators(r).items()}

    def to_grid(self, r: int) -> GridMeasure:
        if self.is_zero:
            return GridMeasure.zero(self.p, r)
        base = GridMeasure.zero(self.p, r)
        return base._sub(self._cell_numerators(r), Fraction(1, self._num_den[1] ** r))

    def zoom(self, i: int) -> "SelfSimilarMeasure":
        # mu[i w] / mu[i] = mu[w] whenever w_i > 0
        if not 0 <= i < self.p:
            raise InvalidWordError(f"digit {i} not in 0..{self.p - 1}")
        return self if self.weights[i] else SelfSimilarMeasure.zero(self.p)


def same_unit_measure(a, b) -> bool:
    """Exact equality of two measures on [0, 1) at their common resolution."""
    if a.p != b.p:
        return False
    if isinstance(a, SelfSimilarMeasure) and isinstance(b, SelfSimilarMeasure):
        return a.weights == b.weights
    if a.is_zero or b.is_zero:
        return a.is_zero and b.is_zero
    ra = a.resolution if a.resolution is not None else b.resolution
    rb = b.resolution if b.resolution is not None else a.resolution
    r = min(ra, rb)
    return a.to_grid(r).with_closed(True) == b.to_grid(r).with_closed(True)
