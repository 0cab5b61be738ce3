from fractions import Fraction as F

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from cpshift.errors import AlignmentError, InvalidWordError, ResolutionExhausted, UndefinedPsi, WindowExhausted
from cpshift.padic import (
    UNIT,
    GridMeasure,
    Homothety,
    Interval,
    PAdicInterval,
    SelfSimilarMeasure,
    interval_of_word,
    mass,
    normalize,
    proxy_distance,
    psi,
    push,
    restrict,
    translate,
    translated_view,
    zoom,
)
from oracles import CANTOR_W, bernoulli_cells, cantor_cells


def cantor_grid(r):
    return GridMeasure(3, r, 0, 1, cantor_cells(r), closed=True)


def lebesgue_grid(p, r, lo=0, hi=1, per_unit=1):
    return GridMeasure.uniform(p, r, lo, hi, per_unit)


# -- interval_of_word ----------------------------------------------------


def test_single_digit_word():
    I = interval_of_word((0,), 3)
    assert (I.left, I.right) == (0, F(1, 3))


def test_two_digit_word():
    I = interval_of_word((1, 2), 3)
    assert (I.left, I.right) == (F(5, 9), F(6, 9))


def test_binary_word():
    I = interval_of_word((1, 1, 1), 2)
    assert (I.left, I.right) == (F(7, 8), 1)


def test_out_of_range_digit():
    with pytest.raises(InvalidWordError):
        interval_of_word((3,), 3)


@given(st.integers(2, 5).flatmap(lambda p: st.tuples(st.just(p), st.lists(st.integers(0, p - 1), max_size=6), st.integers(0, p - 1))))
def test_word_nesting(args):
    p, word, j = args
    parent = interval_of_word(word, p)
    child = interval_of_word(tuple(word) + (j,), p)
    assert child == parent.child(j)
    assert child.as_interval() == parent.as_interval().child(j, p)
    assert child.length == parent.length / p


def test_padic_interval_length():
    assert PAdicInterval(2, -3, 1).length == 8
    assert PAdicInterval(3, 2, 4).left == F(4, 9)


# -- mass and restrict ---------------------------------------------------


def test_cantor_first_third():
    assert mass(cantor_grid(2), Interval(0, F(1, 3))) == F(1, 2)


def test_cantor_middle_third():
    assert mass(cantor_grid(2), Interval(F(1, 3), F(2, 3))) == 0


def test_mass_outside_window():
    assert mass(cantor_grid(2), Interval(5, 6)) == 0


def test_mass_misaligned():
    with pytest.raises(AlignmentError):
        mass(cantor_grid(1), Interval(0, F(1, 9)))


def test_mass_between_outside_window_is_unknown():
    m = GridMeasure(3, 1, 0, 1, cantor_cells(1))
    with pytest.raises(WindowExhausted):
        m.mass_between(0, 2)


def test_restrict_full_support():
    m = cantor_grid(2)
    assert restrict(m, UNIT) == m


def test_restrict_middle_third():
    assert restrict(cantor_grid(2), Interval(F(1, 3), F(2, 3))).is_zero


def test_restrict_lebesgue_half():
    out = restrict(lebesgue_grid(2, 1), Interval(0, F(1, 2)))
    assert out.masses == {0: F(1, 2)}


# -- push ----------------------------------------------------------------


def test_push_digit_zero_cantor():
    m = cantor_grid(2)
    pushed = push(m, Homothety.digit(3, 0))
    # oracle: level-2 cells with left endpoint in [0, 1/3) land in [0, 1)
    expected = sum(v for c, v in cantor_cells(2).items() if F(c, 9) < F(1, 3))
    assert restrict(pushed, UNIT).total_mass == expected == F(1, 2)


def test_push_identity():
    m = cantor_grid(2)
    assert push(m, Homothety.identity(3)) == m


def test_push_translation_unit_mass():
    m = GridMeasure(2, 0, 2, 3, {2: 1}, closed=True)
    out = push(m, Homothety.translation(2, 2))
    assert (out.lo, out.hi) == (0, 1) and out.masses == {0: 1}


def test_push_misaligned_offset():
    with pytest.raises(AlignmentError):
        push(cantor_grid(1), Homothety(3, 0, F(1, 9)))


def test_push_needs_resolution():
    with pytest.raises(ResolutionExhausted):
        push(cantor_grid(0), Homothety.digit(3, 0))


# -- psi and normalize ---------------------------------------------------


def test_psi_cantor():
    assert psi(cantor_grid(1)) == 1


def test_psi_mass_at_one():
    assert psi(GridMeasure(2, 0, 0, 4, {1: 1}, closed=True)) == 2


def test_psi_mass_at_minus_three():
    assert psi(GridMeasure(2, 0, -4, 0, {-3: 1}, closed=True)) == 4


def test_psi_zero_measure():
    with pytest.raises(UndefinedPsi):
        psi(GridMeasure.zero(2))


def test_psi_needs_window():
    m = GridMeasure(2, 0, 0, 4, {3: 1})
    with pytest.raises(WindowExhausted):
        psi(m)


def test_normalize_zero():
    z = GridMeasure.zero(3, 2)
    assert normalize(z) == z


def test_normalize_cantor():
    m = cantor_grid(2)
    assert normalize(m) == m


def test_normalize_scaled_lebesgue():
    three = lebesgue_grid(2, 2, 1, 2, per_unit=3)
    assert normalize(three) == lebesgue_grid(2, 2, 1, 2)


# -- zoom ----------------------------------------------------------------


@pytest.mark.parametrize("i", [0, 2])
def test_cantor_zoom_outer_digits(i):
    assert zoom(cantor_grid(3), i) == cantor_grid(2)


def test_cantor_zoom_middle():
    m = cantor_grid(3)
    assert mass(m, Interval(F(1, 3), F(2, 3))) == 0
    assert zoom(m, 1).is_zero


@pytest.mark.parametrize("i", [0, 1])
def test_lebesgue_zoom(i):
    assert zoom(lebesgue_grid(2, 3), i) == lebesgue_grid(2, 2)


def test_zoom_resolution_exhausted():
    with pytest.raises(ResolutionExhausted):
        zoom(cantor_grid(0), 0)


# -- self-similar measures -------------------------------------------------


@pytest.mark.parametrize(
    "p,w", [(3, CANTOR_W), (2, (F(2, 3), F(1, 3))), (3, (F(1, 5), F(3, 5), F(1, 5)))]
)
def test_self_similar_cells_match_enumeration(p, w):
    mu = SelfSimilarMeasure(p, w)
    for r in range(4):
        assert mu.to_grid(r).masses == bernoulli_cells(p, w, r)
        assert mu.to_grid(r) == GridMeasure(p, r, 0, 1, bernoulli_cells(p, w, r), closed=True)


def test_self_similar_zoom_agrees_with_grid_zoom():
    mu = SelfSimilarMeasure(2, (F(2, 3), F(1, 3)))
    for i in (0, 1):
        assert zoom(mu.to_grid(4), i) == mu.zoom(i).to_grid(3)


def test_self_similar_word_mass_rejects_bad_digit():
    with pytest.raises(InvalidWordError):
        SelfSimilarMeasure(3, CANTOR_W).word_mass((0, 3))


# -- proxy distance and views --------------------------------------------


def test_proxy_distance_of_translates():
    m = lebesgue_grid(2, 1, -4, 4)
    assert proxy_distance(translated_view(m, 1), translated_view(m, 0), Interval(-1, 1), 1) == 0
    c = GridMeasure(3, 1, -3, 6, {0: 1, 2: 1, 6: 1, 8: 1}, closed=True)
    # t_1^* c has no mass on [0, 1); c itself carries 1/2 + 1/2 there once normalized
    assert proxy_distance(translated_view(c, 1), translated_view(c, 0), Interval(0, 1), 1) == 1


def test_view_materialize():
    m = GridMeasure(3, 1, -3, 6, {0: 1, 2: 1, 6: 1, 8: 1}, closed=True)
    v = translated_view(m, 2)
    assert v.materialize() == normalize(translate(m, 2))


# -- properties ----------------------------------------------------------


@st.composite
def grid_measures(draw, closed=True):
    p = draw(st.sampled_from([2, 3]))
    r = draw(st.integers(0, 2))
    lo = draw(st.integers(-4, 4))
    hi = lo + p ** draw(st.integers(0, 2))
    cells = range(lo * p**r, hi * p**r)
    masses = draw(
        st.dictionaries(
            st.sampled_from(list(cells)),
            st.fractions(min_value=0, max_value=5, max_denominator=7),
            max_size=8,
        )
    )
    return GridMeasure(p, r, lo, hi, masses, closed=closed)


@st.composite
def compatible_homotheties(draw, m):
    e = draw(st.integers(0, min(1, m.resolution)))
    b = draw(st.integers(-5, 5))
    return Homothety(m.p, e, b)


@given(st.data())
def test_push_preserves_mass(data):
    m = data.draw(grid_measures())
    rho = data.draw(compatible_homotheties(m))
    assert push(m, rho).total_mass == m.total_mass


@given(st.data())
def test_restrict_never_increases(data):
    m = data.draw(grid_measures())
    length = m.hi - m.lo
    a = data.draw(st.integers(m.lo, m.hi - 1))
    b = data.draw(st.integers(a + 1, m.hi))
    out = restrict(m, Interval(a, b))
    masses = m.masses
    assert all(v <= masses.get(c, 0) for c, v in out.masses.items())
    assert out.total_mass == mass(m, Interval(a, b))
    assert length >= 1


@given(grid_measures())
def test_normalize_idempotent(m):
    assume(not m.is_zero)
    assert normalize(normalize(m)) == normalize(m)


@given(grid_measures(), st.fractions(min_value=F(1, 10), max_value=10))
def test_normalize_scale_invariant(m, lam):
    assume(not m.is_zero and lam > 0)
    assert normalize(m.scaled(lam)) == normalize(m)


@given(st.data())
def test_normalize_before_push_is_irrelevant(data):
    m = data.draw(grid_measures())
    assume(not m.is_zero)
    rho = data.draw(compatible_homotheties(m))
    assert normalize(push(normalize(m), rho)) == normalize(push(m, rho))


@given(st.data())
def test_push_composition(data):
    m = data.draw(grid_measures())
    r1 = data.draw(compatible_homotheties(m))
    mid = push(m, r1)
    r2 = data.draw(compatible_homotheties(mid))
    assert push(mid, r2) == push(m, r2.compose(r1))


@given(
    st.integers(2, 4),
    st.lists(st.tuples(st.integers(-3, 3), st.integers(0, 3)), min_size=3, max_size=3),
)
def test_between_composition(p, specs):
    I, J, K = (Interval(a, a + p**e) for a, e in specs)
    composed = Homothety.between(J, K, p).compose(Homothety.between(I, J, p))
    assert composed == Homothety.between(I, K, p)
    assert composed.image(I) == K


@given(grid_measures())
def test_mass_additive(m):
    a, b = m.lo, m.hi
    mid = F(a + b, 2) if (b - a) % 2 == 0 else a
    assert m.mass_between(a, mid) + m.mass_between(mid, b) == m.total_mass


@given(grid_measures())
def test_coarsen_preserves_unit_masses(m):
    for r in range(m.resolution + 1):
        c = m.coarsen(r)
        for j in range(m.lo, m.hi):
            assert c.unit_mass(j) == m.unit_mass(j)
