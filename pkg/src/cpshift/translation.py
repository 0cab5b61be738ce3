"""Integer translations: ``s_k`` on digit pasts, ``S_a`` on chain states,
``T_k`` on extended states, and the induced map ``T`` with its return times."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Callable, Iterator, Optional, Sequence, Tuple, TypeVar, Union

import numpy as np

from .chain import ChainState, extend_past, prepend_digits
from .errors import BudgetExceeded, DepthExhausted, WindowExhausted
from .extension import ExtendedState, theta, window_of
from .padic import GridMeasure, MeasureView, normalize, translate

Digits = Tuple[int, ...]
MeasureLike = Union[ExtendedState, GridMeasure, MeasureView]
R = TypeVar("R")


# ---------------------------------------------------------------------------
# the group G
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GroupWord:
    """Finitely supported digit word ``(a_n, ..., a_0)``; zero before index n.

    Stored oldest-first and without leading zeros, so equal elements compare
    equal.  The identity is the empty word.
    """

    p: int
    digits: Digits = ()

    def __post_init__(self):
        d = tuple(int(x) for x in self.digits)
        if any(not 0 <= x < self.p for x in d):
            raise ValueError(f"digits must lie in 0..{self.p - 1}")
        k = 0
        while k < len(d) and d[k] == 0:
            k += 1
        object.__setattr__(self, "digits", d[k:])

    @property
    def start(self) -> int:
        """Index of the oldest nonzero digit (1 for the identity)."""
        return 1 - len(self.digits)

    @property
    def is_identity(self) -> bool:
        return not self.digits

    def _aligned(self, other: "GroupWord") -> Tuple[Digits, Digits]:
        if other.p != self.p:
            raise ValueError("mismatched bases")
        n = max(len(self.digits), len(other.digits))
        pad = lambda d: (0,) * (n - len(d)) + d
        return pad(self.digits), pad(other.digits)

    def __add__(self, other: "GroupWord") -> "GroupWord":
        a, b = self._aligned(other)
        return GroupWord(self.p, tuple((x + y) % self.p for x, y in zip(a, b)))

    def __neg__(self) -> "GroupWord":
        return GroupWord(self.p, tuple(-x % self.p for x in self.digits))

    def __sub__(self, other: "GroupWord") -> "GroupWord":
        return self + (-other)

    @classmethod
    def identity(cls, p: int) -> "GroupWord":
        return cls(p, ())

    @classmethod
    def at(cls, p: int, index: int, digit: int) -> "GroupWord":
        """The word with a single digit at ``index <= 0``."""
        return cls(p, (digit,) + (0,) * (-index))

    @classmethod
    def enumerate(cls, p: int, n: int) -> Iterator["GroupWord"]:
        """All ``p**(|n|+1)`` elements of ``G_n``."""
        for d in product(range(p), repeat=-n + 1):
            yield cls(p, d)


def difference(p: int, new: Sequence[int], old: Sequence[int]) -> GroupWord:
    """The a with ``new = old + a`` for two equally long pasts."""
    if len(new) != len(old):
        raise ValueError("pasts of different length")
    return GroupWord(p, tuple((x - y) % p for x, y in zip(new, old)))


# ---------------------------------------------------------------------------
# s_k, S_a and the a <-> k correspondence
# ---------------------------------------------------------------------------


def s_k(p: int, digits: Sequence[int], k: int) -> Digits:
    """Digits of the well-based sequence ``J`` with ``J_n = I_n - k`` deep down.

    Let ``I_{n0}`` be the shallowest stored interval holding ``[k, k+1)``.
    Digits up to ``n0`` are kept; the newer ``|n0|`` digits are the base-p
    expansion of the offset of ``[k, k+1)`` inside ``I_{n0}``.
    """
    digits = tuple(digits)
    if k == 0:
        return digits
    left, length = 0, 1
    for level in range(1, len(digits) + 1):
        left -= digits[-level] * length
        length *= p
        if left <= k < left + length:
            off = k - left
            tail = []
            for _ in range(level):
                off, d = divmod(off, p)
                tail.append(d)
            return digits[:-level] + tuple(reversed(tail))
    raise DepthExhausted(f"[{k}, {k + 1}) is outside every stored compatible interval")


def S_a(s: ChainState, a: GroupWord) -> ChainState:
    """Add a to the digits and redo the zooms from a's start upward."""
    if a.is_identity:
        return s
    if a.p != s.p:
        raise ValueError("mismatched bases")
    width = len(a.digits)
    if width > len(s.digits):
        raise DepthExhausted(f"word reaches i_{a.start}, state stores {len(s.digits)} digits")
    head = len(s.digits) - width
    new_tail = tuple((x + y) % s.p for x, y in zip(s.digits[head:], a.digits))
    measures = list(s.measures[: head + 1])
    for d in new_tail:
        measures.append(measures[-1].zoom(d))
    return ChainState(s.p, tuple(measures), s.digits[:head] + new_tail, s.system)


def a_for_k(p: int, digits: Sequence[int], k: int) -> GroupWord:
    """``a = s_k(i) - i``."""
    return difference(p, s_k(p, digits, k), digits)


def k_for_a(p: int, digits: Sequence[int], a: GroupWord) -> int:
    """The k with ``t_k J_0 = I_0``, where J is compatible with ``i + a``."""
    digits = tuple(digits)
    if len(a.digits) > len(digits):
        raise DepthExhausted("word is longer than the stored past")
    pad = (0,) * (len(digits) - len(a.digits)) + a.digits
    moved = tuple((x + y) % p for x, y in zip(digits, pad))
    # both pasts share I_n for n below a's start; compare positions there
    level = len(a.digits)
    i_left = window_of(p, digits[len(digits) - level :])[0]
    j_left = window_of(p, moved[len(moved) - level :])[0]
    return i_left - j_left


# ---------------------------------------------------------------------------
# T_k on extended states
# ---------------------------------------------------------------------------


def T_k(e: ExtendedState, k: int) -> ExtendedState:
    """``(t_k^* nu, s_k(i))``.  Forward digits are dropped."""
    digits = s_k(e.p, e.past, k)
    if k == 0:
        return ExtendedState(e.nu, e.past, (), e.source)
    nu = normalize(translate(e.nu, k))
    source = S_a(e.source, difference(e.p, digits, e.past)) if e.source is not None else None
    return ExtendedState(nu, digits, (), source)


def _base_and_shift(m: MeasureLike) -> Tuple[GridMeasure, int]:
    if isinstance(m, ExtendedState):
        return m.nu, 0
    if isinstance(m, GridMeasure):
        return m, 0
    if m.shift.denominator != 1:
        raise ValueError("return times need an integer translate")
    return m.base, int(m.shift)


def tau(m: MeasureLike) -> int:
    """Smallest ``n >= 1`` with ``m[n, n+1) > 0``."""
    base, s = _base_and_shift(m)
    q = base.cells_per_unit
    c = base.first_cell_from((s + 1) * q)
    if c is None:
        raise WindowExhausted("no occupied unit to the right of 0 inside the window")
    return c // q - s


def tau_minus(m: MeasureLike) -> int:
    """Smallest ``n >= 1`` with ``m[-n, -n+1) > 0``."""
    base, s = _base_and_shift(m)
    q = base.cells_per_unit
    c = base.last_cell_before(s * q)
    if c is None:
        raise WindowExhausted("no occupied unit to the left of 0 inside the window")
    return s - c // q


def T_map(e: ExtendedState) -> ExtendedState:
    return T_k(e, tau(e))


def T_map_inverse(e: ExtendedState) -> ExtendedState:
    return T_k(e, -tau_minus(e))


def return_times(m: MeasureLike, n: int) -> list:
    """``[tau_1, ..., tau_n]`` by the recursion ``tau_j = tau_{j-1} + tau(t^*_{tau_{j-1}} nu)``."""
    base, s = _base_and_shift(m)
    out = []
    t = 0
    for _ in range(n):
        v = MeasureView(base, Fraction(s + t))
        t += tau(v)
        out.append(t)
    return out


def tau_n(m: MeasureLike, n: int) -> int:
    """``tau_n``, with ``tau_0 = 0``."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return return_times(m, n)[-1] if n else 0


# ---------------------------------------------------------------------------
# automatic past extension
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RetryPolicy:
    """How far to extend the past when a window runs out, and how often."""

    extend_by: int = 8
    max_retries: int = 6

    def __post_init__(self):
        if self.extend_by < 1 or self.max_retries < 0:
            raise ValueError("extend_by must be >= 1 and max_retries >= 0")


def ensure_window(
    e: ExtendedState,
    lo: int,
    hi: int,
    rng: Optional[np.random.Generator],
    policy: RetryPolicy = RetryPolicy(),
) -> ExtendedState:
    """Deepen e until its window contains ``[lo, hi)``.

    Each retry draws ``extend_by`` past digits but keeps only as many as the
    window needs; theta is rebuilt once at the end.
    """
    if e.nu.lo <= lo and hi <= e.nu.hi:
        return e
    s = e.source
    if s is None or s.system is None or rng is None:
        raise DepthExhausted("state cannot be extended: no source state, generator or rng")
    for _ in range(policy.max_retries):
        new = s.system.draw_digits(rng, policy.extend_by)
        for j in range(1, len(new) + 1):
            a, b = window_of(s.p, tuple(new[-j:]) + s.digits)
            if a <= lo and hi <= b:
                return theta(prepend_digits(s, new[-j:]), e.resolution, e.forward)
        s = prepend_digits(s, new)
    raise BudgetExceeded(
        f"window [{lo}, {hi}) not reached after {policy.max_retries} extensions by {policy.extend_by}"
    )


def with_retries(
    fn: Callable[[ExtendedState], R],
    e: ExtendedState,
    rng: Optional[np.random.Generator],
    policy: RetryPolicy = RetryPolicy(),
) -> Tuple[R, ExtendedState]:
    """Run ``fn(e)``, deepening e whenever the window or depth runs out.

    Returns the result and the (possibly deeper) state it was computed on.
    """
    s = e.source
    for attempt in range(policy.max_retries + 1):
        try:
            return fn(e), e
        except (WindowExhausted, DepthExhausted) as exc:
            if attempt == policy.max_retries or s is None:
                raise BudgetExceeded(f"gave up after {attempt} extensions: {exc}") from exc
        s = extend_past(s, policy.extend_by, rng)
        e = theta(s, e.resolution, e.forward)
    raise AssertionError("unreachable")
