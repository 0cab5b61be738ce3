"""CP chain systems: legal sequences ``(mu_n, i_n)_{n <= 0}`` and their sampler.

States are stored oldest-first: ``measures[0]`` is ``mu_{-m+1}`` and
``measures[-1]`` is ``mu_0``; ``digits[k]`` is the digit that produced
``measures[k + 1]`` from ``measures[k]``, so ``digits[-1]`` is ``i_0``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .errors import CannotAdvance, ConfigError, ConsistencyError, DepthExhausted
from .padic import GridMeasure, SelfSimilarMeasure, same_unit_measure

UnitMeasure = Union[GridMeasure, SelfSimilarMeasure]


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Independent, reproducible generator for ``(seed, stream)``."""
    ss = np.random.SeedSequence(entropy=int(seed) % 2**64, spawn_key=(int(stream),))
    return np.random.Generator(np.random.PCG64(ss))


def parse_rational(x) -> Fraction:
    if isinstance(x, bool):
        raise ValueError(f"not a rational: {x!r}")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise ValueError(f"rationals are given as 'num/den' strings or integers, got {x!r}")


def draw_from_weights(weights: Sequence[Fraction], rng: np.random.Generator, size: int) -> list:
    """Exact draws: digit j has probability exactly ``weights[j]``."""
    d = math.lcm(*(w.denominator for w in weights))
    nums = [int(w * d) for w in weights]
    cum = np.cumsum(np.array(nums, dtype=object))
    if d < 2**62:
        u = rng.integers(0, d, size=size, dtype=np.int64)
        return np.searchsorted(np.array(cum, dtype=np.int64), u, side="right").tolist()
    nbytes = (d.bit_length() + 7) // 8
    bound = 256**nbytes - (256**nbytes % d)
    out = []
    while len(out) < size:
        v = int.from_bytes(rng.bytes(nbytes), "little")
        if v < bound:
            out.append(int(np.searchsorted(cum, v % d, side="right")))
    return out


@dataclass(frozen=True)
class ChainSystem:
    """Self-similar chain system: every ``mu_n`` is the Bernoulli measure of ``weights``."""

    p: int
    weights: Tuple[Fraction, ...]
    kind: str = "bernoulli"

    def __post_init__(self):
        if self.p < 2:
            raise ValueError("p must be >= 2")
        w = tuple(Fraction(x) for x in self.weights)
        if len(w) != self.p:
            raise ValueError(f"expected {self.p} weights, got {len(w)}")
        if any(x < 0 for x in w) or sum(w) != 1:
            raise ValueError("weights must be nonnegative and sum to 1")
        object.__setattr__(self, "weights", w)

    @classmethod
    def cantor(cls) -> "ChainSystem":
        return cls(3, (Fraction(1, 2), Fraction(0), Fraction(1, 2)), kind="cantor")

    @classmethod
    def bernoulli(cls, p: int, weights: Sequence) -> "ChainSystem":
        return cls(p, tuple(parse_rational(w) for w in weights))

    @classmethod
    def lebesgue(cls, p: int = 2) -> "ChainSystem":
        return cls(p, (Fraction(1, p),) * p)

    @classmethod
    def from_spec(cls, spec: dict) -> "ChainSystem":
        """``{"type": "cantor"}`` or ``{"type": "bernoulli", "p": 2, "weights": ["2/3", "1/3"]}``."""
        if not isinstance(spec, dict):
            raise ConfigError("system", "must be an object")
        kind = spec.get("type")
        if kind == "cantor":
            extra = set(spec) - {"type"}
            if extra:
                raise ConfigError(sorted(extra)[0], "unknown key for a cantor system")
            return cls.cantor()
        if kind != "bernoulli":
            raise ConfigError("type", f"unknown system type {kind!r}")
        extra = set(spec) - {"type", "p", "weights"}
        if extra:
            raise ConfigError(sorted(extra)[0], "unknown key for a bernoulli system")
        p = spec.get("p")
        if not isinstance(p, int) or isinstance(p, bool) or p < 2:
            raise ConfigError("p", "must be an integer >= 2")
        raw = spec.get("weights")
        if not isinstance(raw, list):
            raise ConfigError("weights", "must be a list of rationals")
        try:
            w = [parse_rational(x) for x in raw]
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError("weights", str(exc)) from None
        if len(w) != p:
            raise ConfigError("weights", f"expected {p} entries, got {len(w)}")
        if any(x < 0 for x in w):
            raise ConfigError("weights", "must be nonnegative")
        if sum(w) != 1:
            raise ConfigError("weights", f"must sum to 1, got {sum(w)}")
        return cls(p, tuple(w))

    @classmethod
    def load(cls, path) -> "ChainSystem":
        return cls.from_spec(json.loads(Path(path).read_text()))

    def to_spec(self) -> dict:
        if self.kind == "cantor":
            return {"type": "cantor"}
        return {"type": "bernoulli", "p": self.p, "weights": [str(w) for w in self.weights]}

    @property
    def base_measure(self) -> SelfSimilarMeasure:
        return SelfSimilarMeasure(self.p, self.weights)

    @property
    def is_deterministic(self) -> bool:
        return any(w == 1 for w in self.weights)

    def draw_digits(self, rng: np.random.Generator, size: int) -> list:
        return draw_from_weights(self.weights, rng, size)


@dataclass(frozen=True)
class ChainState:
    """Truncated legal sequence ``(mu_n, i_n)_{-m < n <= 0}``."""

    p: int
    measures: Tuple[UnitMeasure, ...]
    digits: Tuple[int, ...]
    system: Optional[ChainSystem] = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.measures) < 1:
            raise ValueError("a state holds at least mu_0")
        if len(self.digits) != len(self.measures) - 1:
            raise ValueError("need exactly one digit between consecutive measures")
        if any(not 0 <= d < self.p for d in self.digits):
            raise ValueError(f"digits must lie in 0..{self.p - 1}")

    @property
    def depth(self) -> int:
        return len(self.measures)

    def mu(self, n: int) -> UnitMeasure:
        """``mu_n`` for ``-depth < n <= 0``."""
        if not -self.depth < n <= 0:
            raise DepthExhausted(f"mu_{n} not stored (depth {self.depth})")
        return self.measures[self.depth - 1 + n]

    def digit(self, n: int) -> int:
        """``i_n`` for ``-depth + 1 < n <= 0``."""
        if not -self.depth + 1 < n <= 0:
            raise DepthExhausted(f"i_{n} not stored (depth {self.depth})")
        return self.digits[len(self.digits) - 1 + n]

    def word(self, n: int) -> Tuple[int, ...]:
        """``(i_n, ..., i_0)``."""
        if n > 0:
            raise ValueError("n must be <= 0")
        if -n + 1 > len(self.digits):
            raise DepthExhausted(f"i_{n} not stored (depth {self.depth})")
        return self.digits[len(self.digits) - 1 + n :]

    def is_legal(self) -> bool:
        return all(
            same_unit_measure(self.measures[k + 1], self.measures[k].zoom(d)) for k, d in enumerate(self.digits)
        )

    def check_legal(self) -> None:
        for k, d in enumerate(self.digits):
            if not same_unit_measure(self.measures[k + 1], self.measures[k].zoom(d)):
                raise ConsistencyError(f"illegal pair at position {k - len(self.digits)}: mu_(k+1) != mu_k^{d}")


def initial_state(system: ChainSystem) -> ChainState:
    return ChainState(system.p, (system.base_measure,), (), system)


def advance(s: ChainState, j: int) -> ChainState:
    """Append digit j and ``mu_1 = mu_0^j`` (the left shift with a chosen next digit)."""
    if not 0 <= j < s.p:
        raise ValueError(f"digit {j} not in 0..{s.p - 1}")
    return ChainState(s.p, s.measures + (s.measures[-1].zoom(j),), s.digits + (j,), s.system)


def sample_forward(s: ChainState, rng: np.random.Generator) -> ChainState:
    """Draw ``i_1 = j`` with probability ``mu_0[j]_p`` and append it."""
    mu0 = s.measures[-1]
    if mu0.is_zero:
        raise CannotAdvance("mu_0 = 0 has no adapted successor")
    probs = [mu0.word_mass((j,)) for j in range(s.p)]
    (j,) = draw_from_weights(probs, rng, 1)
    return advance(s, j)


def extend_past(s: ChainState, extra: int, rng: Optional[np.random.Generator]) -> ChainState:
    """Prepend ``extra`` i.i.d. past digits (self-similar systems only)."""
    if extra < 0:
        raise ValueError("extra must be >= 0")
    if extra == 0:
        return s
    if s.system is None:
        raise DepthExhausted("no generator attached: the stored past cannot be extended")
    if rng is None:
        raise DepthExhausted("extending the past needs a random generator")
    return prepend_digits(s, s.system.draw_digits(rng, extra))


def prepend_digits(s: ChainState, digits: Sequence[int]) -> ChainState:
    """Prepend given past digits, oldest first, to a self-similar state."""
    if s.system is None:
        raise DepthExhausted("no generator attached: the stored past cannot be extended")
    mu = s.system.base_measure
    if not same_unit_measure(s.measures[0], mu):
        raise ConsistencyError("oldest stored measure is not the system's base measure")
    digits = tuple(int(d) for d in digits)
    if any(not mu.weights[d] for d in digits):
        raise ConsistencyError("a prepended digit has zero weight")
    return ChainState(s.p, (mu,) * len(digits) + s.measures, digits + s.digits, s.system)


def sample_state(system: ChainSystem, depth: int, rng: np.random.Generator) -> ChainState:
    """Stationary random state of the given depth."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    return extend_past(initial_state(system), depth - 1, rng)


def truncate(s: ChainState, k: int) -> ChainState:
    """``sigma_-^k``: forget the k newest coordinates."""
    if k == 0:
        return s
    if k >= s.depth:
        raise DepthExhausted(f"cannot drop {k} coordinates from depth {s.depth}")
    return ChainState(s.p, s.measures[:-k], s.digits[:-k], s.system)


def word_probability(s: ChainState, word: Sequence[int]):
    """Conditional probability ``mu_0[j_1..j_l]`` of the next l digits."""
    return s.measures[-1].word_mass(tuple(word))


def determinism_estimate(system: ChainSystem, samples: int, rng: np.random.Generator) -> float:
    """Empirical ``P(phi_0 < 1)``; zero flags a deterministic system."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    mu = system.base_measure
    digits = system.draw_digits(rng, samples)
    hits = sum(1 for d in digits if mu.word_mass((d,)) < 1)
    return hits / samples


def load_history(path) -> ChainState:
    """Externally supplied legal history.

    JSON: ``{"p": 3, "digits": [...], "measures": [[...], ...]}`` with each
    measure (oldest first) given as its ``p**r`` cell masses on [0, 1) as
    "num/den" strings.  Legality is validated; stationarity is not claimed.
    """
    data = json.loads(Path(path).read_text())
    p = data["p"]
    measures = []
    for cells in data["measures"]:
        r = 0
        while p**r < len(cells):
            r += 1
        if p**r != len(cells):
            raise ConfigError("measures", f"each measure must list a power of {p} cell masses")
        masses = {c: parse_rational(v) for c, v in enumerate(cells)}
        measures.append(GridMeasure(p, r, 0, 1, masses, closed=True))
    s = ChainState(p, tuple(measures), tuple(data["digits"]))
    s.check_legal()
    return s
