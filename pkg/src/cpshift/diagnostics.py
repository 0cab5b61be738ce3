"""Radon-Nikodym derivatives ``phi_n``, the entropy-rate witness for
conservativity, group-sum identities, and the derivative of ``T``."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .chain import ChainState, ChainSystem, sample_state
from .errors import CombinatorialBudgetError, ConsistencyError, DepthExhausted
from .extension import ExtendedState
from .padic import Interval, proxy_distance, translated_view
from .translation import GroupWord, MeasureLike, S_a, T_map, return_times, tau

ChainFunctional = Callable[[ChainState], Fraction]


def log_rational(q: Fraction) -> float:
    """``log q`` without converting q to a float first (q may underflow)."""
    if q <= 0:
        raise ValueError("log of a nonpositive number")
    return math.log(q.numerator) - math.log(q.denominator)


def phi0(s: ChainState) -> Fraction:
    """``mu_{-1}[i_0]_p``."""
    if s.depth < 2:
        raise DepthExhausted("phi_0 needs mu_{-1}")
    return s.mu(-1).word_mass((s.digit(0),))


def phi_closed(s: ChainState, n: int) -> Fraction:
    """``mu_{n-1}[i_n, ..., i_0]``."""
    if n > 0:
        raise ValueError("n must be <= 0")
    if s.depth < -n + 2:
        raise DepthExhausted(f"phi_{n} needs depth {-n + 2}, state has {s.depth}")
    return s.mu(n - 1).word_mass(s.word(n))


def phi_product(s: ChainState, n: int) -> Fraction:
    """``prod_{j=n}^{0} mu_{j-1}[i_j]``, i.e. phi_0 along the truncated past."""
    if s.depth < -n + 2:
        raise DepthExhausted(f"phi_{n} needs depth {-n + 2}, state has {s.depth}")
    out = Fraction(1)
    for j in range(n, 1):
        out *= s.mu(j - 1).word_mass((s.digit(j),))
        if not out:
            break
    return out


def phi_n(s: ChainState, n: int) -> Fraction:
    """``phi_n``, computed in closed form and as a product; both must agree."""
    a, b = phi_closed(s, n), phi_product(s, n)
    if a != b:
        raise ConsistencyError(f"phi_{n}: closed form {a} != product {b}")
    return a


@dataclass(frozen=True)
class PhiRecord:
    n: int
    phi: Fraction

    @property
    def rate(self) -> float:
        """``-log(phi_n) / (|n| + 1)``."""
        if not self.phi:
            return math.inf
        return -log_rational(self.phi) / (-self.n + 1)


@dataclass
class PhiTrace:
    trajectory: int
    records: List[PhiRecord] = field(default_factory=list)

    def is_nonincreasing(self) -> bool:
        return all(b.phi <= a.phi for a, b in zip(self.records, self.records[1:]))


def phi_trace(s: ChainState, depth: int, trajectory: int = 0) -> PhiTrace:
    """``phi_0, phi_{-1}, ..., phi_{-depth}``.

    The product is accumulated once; the closed form is evaluated afresh at
    every n and compared.
    """
    trace = PhiTrace(trajectory)
    running = Fraction(1)
    for k in range(depth + 1):
        n = -k
        running *= s.mu(n - 1).word_mass((s.digit(n),))
        closed = phi_closed(s, n)
        if closed != running:
            raise ConsistencyError(f"phi_{n}: closed form {closed} != product {running}")
        trace.records.append(PhiRecord(n, closed))
    return trace


# ---------------------------------------------------------------------------
# entropy rate
# ---------------------------------------------------------------------------


@dataclass
class RunningStats:
    """Mean and variance with an associative merge (Chan et al.)."""

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0

    def add(self, x: float, count: int = 1) -> None:
        self.merge(RunningStats(count, float(x), 0.0))

    def merge(self, other: "RunningStats") -> "RunningStats":
        if other.count == 0:
            return self
        n = self.count + other.count
        delta = other.mean - self.mean
        self.mean = self.mean + delta * other.count / n if self.count else other.mean
        self.m2 = self.m2 + other.m2 + delta * delta * self.count * other.count / n
        self.count = n
        return self

    @property
    def variance(self) -> float:
        return self.m2 / (self.count - 1) if self.count > 1 else 0.0

    @property
    def stderr(self) -> float:
        return math.sqrt(self.variance / self.count) if self.count else math.nan


@dataclass(frozen=True)
class EntropyEstimate:
    mean: float
    stderr: float
    samples: int
    trajectory_rates: Tuple[float, ...]

    @property
    def interval(self) -> Tuple[float, float]:
        return self.mean - 3 * self.stderr, self.mean + 3 * self.stderr

    @property
    def certified(self) -> bool:
        """Mean of ``-log phi_0`` separated from 0 by at least 3 standard errors."""
        return self.mean > 0 and self.mean - 3 * self.stderr > 0


def phi0_sample_stats(system: ChainSystem, samples: int, rng: np.random.Generator) -> RunningStats:
    """Monte Carlo of ``-log phi_0`` under the stationary law.

    phi_0 of a stationary state depends only on ``i_0``, so ``phi0`` is
    evaluated once per digit value and weighted by how often it was drawn.
    """
    digits = np.asarray(system.draw_digits(rng, samples))
    counts = np.bincount(digits, minlength=system.p)
    mu = system.base_measure
    stats = RunningStats()
    for j, c in enumerate(counts.tolist()):
        if c:
            s = ChainState(system.p, (mu, mu.zoom(j)), (j,), system)
            stats.add(-log_rational(phi0(s)), c)
    return stats


def entropy_rate(
    system: ChainSystem,
    trajectories: int,
    depth: int,
    rng: np.random.Generator,
    samples: int = 100_000,
) -> EntropyEstimate:
    """Per-trajectory ``-log(phi_{-depth}) / (depth + 1)`` and the Monte Carlo
    mean of ``-log phi_0``."""
    if depth < 2 or trajectories < 1:
        raise ValueError("need depth >= 2 and trajectories >= 1")
    rates = []
    for _ in range(trajectories):
        s = sample_state(system, depth + 2, rng)
        rates.append(PhiRecord(-depth, phi_n(s, -depth)).rate)
    stats = phi0_sample_stats(system, samples, rng)
    return EntropyEstimate(stats.mean, stats.stderr, stats.count, tuple(rates))


def shannon_entropy(weights: Sequence[Fraction]) -> float:
    return -sum(float(w) * log_rational(w) for w in weights if w)


# ---------------------------------------------------------------------------
# group sums
# ---------------------------------------------------------------------------


def _group(p: int, n: int, cap: int):
    size = p ** (-n + 1)
    if size > cap:
        raise CombinatorialBudgetError(f"G_{n} has {size} elements, cap is {cap}")
    return GroupWord.enumerate(p, n)


def group_sum_check(s: ChainState, n: int, cap: int = 729) -> Fraction:
    """``sum over a in G_n of phi_n(S_a s)``; equals 1 on legal states."""
    return sum((phi_n(S_a(s, a), n) for a in _group(s.p, n, cap)), Fraction(0))


def conditional_expectation_Gn(f: ChainFunctional, s: ChainState, n: int, cap: int = 729) -> Fraction:
    """``sum over a in G_n of f(S_a s) phi_n(S_a s)``."""
    total = Fraction(0)
    for a in _group(s.p, n, cap):
        y = S_a(s, a)
        w = phi_n(y, n)
        if w:
            total += Fraction(f(y)) * w
    return total


def digit_word_indicator(word: Sequence[int]) -> ChainFunctional:
    """``1`` when the newest ``len(word)`` digits equal word."""
    word = tuple(word)

    def f(s: ChainState) -> Fraction:
        return Fraction(int(s.digits[len(s.digits) - len(word) :] == word))

    return f


# ---------------------------------------------------------------------------
# the nonsingular map T
# ---------------------------------------------------------------------------


def rn_derivative_T(m: MeasureLike) -> Fraction:
    """``nu[tau, tau + 1)``."""
    t = tau(m)
    if isinstance(m, ExtendedState):
        return m.nu.mass_between(t, t + 1)
    return m.mass_between(t, t + 1)


def rn_cocycle(e: ExtendedState, n: int) -> Tuple[Fraction, Fraction]:
    """``prod_{j<n} phi(T^j e)`` along eager iterates of T, and ``nu[tau_n, tau_n+1)``.

    Raises ConsistencyError when they differ.
    """
    product = Fraction(1)
    x = e
    for _ in range(n):
        product *= rn_derivative_T(x)
        x = T_map(x)
    t = return_times(e, n)[-1] if n else 0
    direct = e.nu.mass_between(t, t + 1)
    if product != direct:
        raise ConsistencyError(f"cocycle product {product} != nu[tau_{n}, tau_{n}+1) = {direct}")
    return product, direct


# ---------------------------------------------------------------------------
# recurrence
# ---------------------------------------------------------------------------


def shift_order(max_shift: int) -> List[int]:
    """``1, -1, 2, -2, ..., max_shift, -max_shift``."""
    return [k for j in range(1, max_shift + 1) for k in (j, -j)]


def recurrence_scan(
    e: ExtendedState, max_shift: int, radius: int = 1, resolution: Optional[int] = None
) -> List[Tuple[int, Fraction]]:
    """Proxy distance between ``t_k^* nu`` and nu on ``[-radius, radius)`` for ``0 < |k| <= max_shift``."""
    r = e.resolution if resolution is None else resolution
    window = Interval(-radius, radius)
    ref = translated_view(e.nu, 0)
    return [(k, proxy_distance(translated_view(e.nu, k), ref, window, r)) for k in shift_order(max_shift)]


def record_minima(scan: Sequence[Tuple[int, Fraction]]) -> List[Tuple[int, Fraction]]:
    """Running minimum of the distance as ``|k|`` grows."""
    out = []
    best = None
    for k, d in scan:
        if best is None or d < best:
            best = d
        out.append((k, best))
    return out
