from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cpshift.chain import ChainState, advance, make_rng, sample_forward, sample_state
from cpshift.errors import CannotAdvance, ConsistencyError
from cpshift.extension import (
    ExtendedState,
    compatible_intervals,
    deepen,
    magnify,
    mu_tilde,
    theta,
    theta_inverse,
    window_of,
)
from cpshift.padic import UNIT, GridMeasure, Interval, restrict, same_unit_measure
from conftest import BERNOULLI, CANTOR, LEBESGUE, SYSTEMS
from oracles import cantor_cells, intervals_brute, shift_cells


def cantor_state(*digits):
    """Cantor chain state with the given digits, oldest first."""
    return ChainState(3, (CANTOR.base_measure,) * (len(digits) + 1), tuple(digits), CANTOR)


def as_pairs(intervals):
    return [(I.left, I.right) for I in intervals]


# -- compatible intervals --------------------------------------------------


def test_first_interval_after_zero_digit():
    assert compatible_intervals(3, (0,))[1] == Interval(0, 3)


def test_second_interval():
    assert compatible_intervals(3, (2, 0))[2] == Interval(-6, 3)


def test_depth_zero():
    assert compatible_intervals(3, (2, 0), 0) == [UNIT]


@given(st.integers(2, 4).flatmap(lambda p: st.tuples(st.just(p), st.lists(st.integers(0, p - 1), max_size=7))))
def test_intervals_match_brute_force(args):
    p, digits = args
    got = compatible_intervals(p, digits)
    assert as_pairs(got) == intervals_brute(p, digits)
    for n, I in enumerate(got[1:], start=1):
        assert I.length == p**n and I.is_integral
        assert I.child(digits[len(digits) - n], p) == got[n - 1]
    assert window_of(p, digits) == (got[-1].left, got[-1].right)


# -- mu tilde --------------------------------------------------------------


def test_mu_tilde_zero_is_cantor():
    assert mu_tilde(cantor_state(2, 0), 0).masses == cantor_cells(1)


def test_mu_tilde_minus_one():
    base = cantor_cells(1)
    expected = {**base, **shift_cells(base, 2, 1, 3)}
    assert mu_tilde(cantor_state(2, 0), -1).masses == expected


def test_mu_tilde_minus_two():
    base = cantor_cells(1)
    first = {**base, **shift_cells(base, 2, 1, 3)}
    expected = {**first, **shift_cells(first, -6, 1, 3)}
    m = mu_tilde(cantor_state(2, 0), -2)
    assert m.masses == expected
    assert (m.lo, m.hi) == (-6, 3)


# -- theta -----------------------------------------------------------------


def test_theta_cantor_four_translates():
    e = theta(cantor_state(2, 0))
    assert e.nu.masses == mu_tilde(cantor_state(2, 0), -2).masses
    assert (e.nu.lo, e.nu.hi) == (-6, 3)
    assert not e.nu.closed
    assert e.stable_from == 0


@pytest.mark.parametrize("seed", range(5))
def test_theta_lebesgue_is_uniform(seed):
    s = sample_state(LEBESGUE, 6, make_rng(seed))
    e = theta(s, resolution=2)
    lo, hi = e.nu.lo, e.nu.hi
    assert e.nu.masses == {c: F(1, 4) for c in range(4 * lo, 4 * hi)}


def test_theta_depth_one():
    e = theta(sample_state(BERNOULLI, 1, make_rng(0)), resolution=3)
    assert (e.nu.lo, e.nu.hi) == (0, 1)
    assert e.nu.with_closed(True) == BERNOULLI.base_measure.to_grid(3)


def test_theta_rejects_illegal_history():
    mu = CANTOR.base_measure
    with pytest.raises(ConsistencyError):
        theta(ChainState(3, (mu, mu), (1,), CANTOR))


def test_extended_state_checks_window():
    with pytest.raises(ConsistencyError):
        ExtendedState(GridMeasure.uniform(2, 0, 0, 2), (1,))


# -- theta inverse -----------------------------------------------------------


def test_inverse_cantor_minus_one():
    e = theta(cantor_state(2, 0))
    assert same_unit_measure(theta_inverse(e, -1), CANTOR.base_measure)


@pytest.mark.parametrize("n", [0, -1, -3, -5])
def test_inverse_lebesgue(n):
    e = theta(sample_state(LEBESGUE, 6, make_rng(2)), resolution=1)
    got = theta_inverse(e, n)
    assert got == GridMeasure.uniform(2, 1 + (-n), 0, 1)


# -- magnify ---------------------------------------------------------------


def test_magnify_lebesgue():
    s = sample_state(LEBESGUE, 5, make_rng(3))
    for j in (0, 1):
        m = magnify(theta(s, resolution=3, forward=(j,)))
        lo, hi = m.nu.lo, m.nu.hi
        assert m.nu.masses == {c: F(1, 4) for c in range(4 * lo, 4 * hi)}


def test_magnify_relabels_inverse():
    rng = make_rng(4)
    s = sample_state(CANTOR, 6, rng)
    e = theta(s, resolution=2, forward=(2,))
    m = magnify(e)
    for n in range(-1, -5, -1):
        assert same_unit_measure(theta_inverse(m, n), theta_inverse(e, n + 1))


def test_magnify_needs_digit():
    e = theta(sample_state(CANTOR, 3, make_rng(0)))
    with pytest.raises(CannotAdvance):
        magnify(e)


def test_magnify_draws_adapted_digit():
    e = theta(sample_state(CANTOR, 3, make_rng(0)))
    digits = {magnify(e, make_rng(1, k)).past[-1] for k in range(40)}
    assert digits == {0, 2}


def test_deepen_keeps_agreement():
    rng = make_rng(8)
    e = theta(sample_state(BERNOULLI, 4, rng), resolution=2)
    d = deepen(e, 3, rng)
    assert d.depth == e.depth + 3
    assert d.agrees_with(e)


# -- properties ----------------------------------------------------------


states = st.tuples(st.sampled_from(sorted(SYSTEMS)), st.integers(0, 2**32), st.integers(2, 10))


@given(states)
def test_equivariance(args):
    name, seed, depth = args
    rng = make_rng(seed)
    s = sample_state(SYSTEMS[name], depth, rng)
    j = sample_forward(s, rng).digits[-1]
    left = theta(advance(s, j))
    right = magnify(theta(s, forward=(j,)))
    assert left.past == right.past
    assert left.nu.agrees_with(right.nu)


@given(states)
def test_round_trip(args):
    name, seed, depth = args
    s = sample_state(SYSTEMS[name], depth, make_rng(seed))
    e = theta(s)
    for n in range(0, -depth, -1):
        assert same_unit_measure(theta_inverse(e, n), s.mu(n))


@given(states)
def test_unit_interval_mass_is_one(args):
    name, seed, depth = args
    e = theta(sample_state(SYSTEMS[name], depth, make_rng(seed)))
    assert e.nu.mass_between(0, 1) == 1


@given(states)
def test_mu_tilde_cells_eventually_constant(args):
    # the mass mu~_n gives each cell of [0, 1) stops changing once lambda = 1
    name, seed, depth = args
    s = sample_state(SYSTEMS[name], depth, make_rng(seed))
    e = theta(s)
    ref = restrict(mu_tilde(s, e.stable_from), UNIT)
    for n in range(e.stable_from, -depth, -1):
        assert restrict(mu_tilde(s, n), UNIT) == ref


def test_stabilization_index_on_non_adapted_history():
    # legal but not self-similar: nu[0, 1) = 0, and lambda(-1) = 1/2 before settling at 1
    masses = {1: 1, 5: 1, 8: 1, 9: 1, 11: 2, 12: 3, 13: 1}
    mu = GridMeasure(2, 4, 0, 1, masses, closed=True)
    measures = [mu.scaled(1 / mu.total_mass)]
    digits = (0, 0, 1)
    for d in digits:
        measures.append(measures[-1].zoom(d))
    s = ChainState(2, tuple(measures), digits)
    assert s.is_legal()
    intervals = compatible_intervals(2, digits)
    ratios = {}
    for n in (-1, -2):
        cur, deeper = mu_tilde(s, n), restrict(mu_tilde(s, n - 1), intervals[-n])
        ratios[n] = deeper.total_mass / cur.total_mass
        assert deeper == cur.scaled(ratios[n])
    assert ratios == {-1: F(1, 2), -2: 1}
    assert theta(s).stable_from == -2
