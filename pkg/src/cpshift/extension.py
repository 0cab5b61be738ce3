"""From chain states to measures on R: ``theta``, its inverse, and ``M_p``."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .chain import ChainState, advance, draw_from_weights, extend_past
from .errors import CannotAdvance, ConsistencyError, DepthExhausted
from .padic import (
    UNIT,
    GridMeasure,
    Homothety,
    Interval,
    normalize,
    push,
    restrict,
)


def compatible_intervals(p: int, digits: Sequence[int], depth: Optional[int] = None) -> List[Interval]:
    """Well-based intervals ``[I_0, I_{-1}, ..., I_{-depth}]`` for oldest-first digits.

    ``I_n`` is the ``i_n``-th p-subinterval of ``I_{n-1}``.
    """
    if depth is None:
        depth = len(digits)
    if depth > len(digits):
        raise DepthExhausted(f"{depth} levels requested, {len(digits)} digits stored")
    out = [UNIT]
    left, length = 0, 1
    for k in range(depth):
        d = digits[len(digits) - 1 - k]
        left -= d * length
        length *= p
        out.append(Interval(left, left + length))
    return out


def window_of(p: int, digits: Sequence[int]) -> Tuple[int, int]:
    """Integer endpoints of the deepest compatible interval."""
    left, length = 0, 1
    for d in reversed(digits):
        left -= d * length
        length *= p
    return left, left + length


def _unnormalized_tilde(s: ChainState, n: int, resolution: int, I: Interval) -> GridMeasure:
    k = -n
    mu = s.mu(n).to_grid(resolution + k)
    return push(mu, Homothety.between(UNIT, I, s.p))


def mu_tilde(s: ChainState, n: int, resolution: int = 1) -> GridMeasure:
    """``N rho_{I_0}^{I_n} mu_n`` at the given resolution (closed, supported in ``I_n``)."""
    if not -s.depth < n <= 0:
        raise DepthExhausted(f"mu_{n} not stored (depth {s.depth})")
    I = compatible_intervals(s.p, s.digits, -n)[-n]
    return normalize(_unnormalized_tilde(s, n, resolution, I))


@dataclass(frozen=True)
class ExtendedState:
    """A point ``(nu, i_-)`` of the extended system, truncated to a window.

    ``nu`` is exact on its window, which is the deepest interval compatible with
    ``past``.  ``forward`` holds ``i_1, i_2, ...`` for iterating ``M_p``.
    ``source`` (when known) is a chain state with ``theta(source) == self``,
    used to deepen the window on demand.
    """

    nu: GridMeasure
    past: Tuple[int, ...]
    forward: Tuple[int, ...] = ()
    source: Optional[ChainState] = field(default=None, compare=False, repr=False)
    stable_from: Optional[int] = field(default=None, compare=False)

    def __post_init__(self):
        lo, hi = window_of(self.nu.p, self.past)
        if (self.nu.lo, self.nu.hi) != (lo, hi):
            raise ConsistencyError(
                f"window [{self.nu.lo}, {self.nu.hi}) is not the compatible interval [{lo}, {hi})"
            )

    @property
    def p(self) -> int:
        return self.nu.p

    @property
    def depth(self) -> int:
        return len(self.past) + 1

    @property
    def resolution(self) -> int:
        return self.nu.resolution

    @cached_property
    def intervals(self) -> List[Interval]:
        return compatible_intervals(self.p, self.past)

    def agrees_with(self, other: "ExtendedState") -> bool:
        """Exact agreement of digits and of nu on the common window."""
        k = min(len(self.past), len(other.past))
        if self.past[len(self.past) - k :] != other.past[len(other.past) - k :]:
            return False
        return self.nu.agrees_with(other.nu)


def theta(s: ChainState, resolution: int = 1, forward: Tuple[int, ...] = ()) -> ExtendedState:
    """``theta(mu_-, i_-) = (nu, i_-)`` with nu exact on ``I_{-depth+1}``.

    Every consecutive pair is checked: ``mu~_{n-1}|I_n = lambda(n) mu~_n|I_n``
    must hold exactly for some rational ``lambda(n) > 0``.  The returned
    ``stable_from`` is the shallowest stored n with ``lambda(n') = 1`` for all
    stored ``n' <= n``.
    """
    m = s.depth
    intervals = compatible_intervals(s.p, s.digits)
    prev = normalize(_unnormalized_tilde(s, 0, resolution, intervals[0]))
    lambdas = []
    for k in range(1, m):
        cur = normalize(_unnormalized_tilde(s, -k, resolution, intervals[k]))
        on_prev = restrict(cur, intervals[k - 1])
        if prev.is_zero:
            if not on_prev.is_zero:
                raise ConsistencyError(f"lambda({-k + 1}) does not exist: mu~_{-k + 1} = 0 but mu~_{-k} is not")
            lam = Fraction(1)
        else:
            lam = on_prev.total_mass / prev.total_mass
            if lam <= 0 or on_prev != prev.scaled(lam):
                raise ConsistencyError(f"mu~_{-k} and mu~_{-k + 1} are not proportional on I_{-k + 1}")
        lambdas.append(lam)
        prev = cur
    stable = 0
    for k in range(len(lambdas), 0, -1):
        if lambdas[k - 1] != 1:
            stable = -k
            break
    nu = prev.with_closed(False)
    return ExtendedState(nu, tuple(s.digits), tuple(forward), s, stable)


def theta_inverse(e: ExtendedState, n: int) -> GridMeasure:
    """Recover ``mu_n = N R rho_{I_n}^{I_0} (nu|I_n)`` at resolution ``r + |n|``."""
    if not -e.depth < n <= 0:
        raise DepthExhausted(f"I_{n} lies outside the stored window")
    I = e.intervals[-n]
    part = restrict(e.nu, I)
    return normalize(push(part, Homothety.between(I, UNIT, e.p)))


def magnify(e: ExtendedState, rng: Optional[np.random.Generator] = None) -> ExtendedState:
    """``M_p(nu, i) = (N rho_{i_1} nu, sigma(i))``.

    Uses the stored forward digit, or draws ``i_1 = j`` with probability
    ``nu[j]_p`` when ``rng`` is given.
    """
    if e.forward:
        i1, rest = e.forward[0], e.forward[1:]
    elif rng is not None:
        probs = [e.nu.mass_between(Fraction(j, e.p), Fraction(j + 1, e.p)) for j in range(e.p)]
        if sum(probs) != 1:
            raise CannotAdvance("nu[0, 1) must be 1 to draw an adapted digit")
        (i1,) = draw_from_weights(probs, rng, 1)
        rest = ()
    else:
        raise CannotAdvance("no forward digit stored and no sampler given")
    nu = normalize(push(e.nu, Homothety.digit(e.p, i1)))
    source = advance(e.source, i1) if e.source is not None else None
    return ExtendedState(nu, e.past + (i1,), rest, source)


def deepen(e: ExtendedState, extra: int, rng: np.random.Generator) -> ExtendedState:
    """Rebuild e from a source state with ``extra`` more past digits."""
    if e.source is None:
        raise DepthExhausted("state has no source chain state to extend")
    return theta(extend_past(e.source, extra, rng), e.resolution, e.forward)
