"""Independent reference computations used as test oracles.

Nothing here calls into cpshift: word masses are enumerated digit by digit,
interval trees are walked by brute force.
"""
from fractions import Fraction
from itertools import product


def bernoulli_cells(p, weights, r):
    """Level-r cell masses of the Bernoulli measure, by enumerating all words."""
    weights = [Fraction(w) for w in weights]
    out = {}
    for word in product(range(p), repeat=r):
        m = Fraction(1)
        for d in word:
            m *= weights[d]
        if m:
            index = 0
            for d in word:
                index = index * p + d
            out[index] = m
    return out


CANTOR_W = (Fraction(1, 2), Fraction(0), Fraction(1, 2))


def cantor_cells(r):
    return bernoulli_cells(3, CANTOR_W, r)


def shift_cells(cells, units, r, p):
    """Translate a cell map by an integer number of units (x -> x + units)."""
    return {c + units * p**r: m for c, m in cells.items()}


def intervals_brute(p, digits):
    """``[I_0, I_{-1}, ...]`` as (left, right) pairs, by repeated subdivision search.

    I_{n-1} is the unique length-p^{|n|+1} interval of the form [a, a + p L)
    whose i_n-th child is I_n.
    """
    out = [(0, 1)]
    for d in reversed(digits):
        left, right = out[-1]
        length = right - left
        for a in range(left - (p - 1) * length, left + 1):
            if a + d * length == left:
                out.append((a, a + p * length))
                break
    return out


def s_k_brute(p, digits, k):
    """s_k by search: the digit past J with J_n = I_n - k at the deepest level."""
    digits = tuple(digits)
    I = intervals_brute(p, digits)
    target = (I[-1][0] - k, I[-1][1] - k)
    hits = [
        cand
        for cand in product(range(p), repeat=len(digits))
        if intervals_brute(p, cand)[-1] == target
    ]
    assert len(hits) == 1, hits
    return hits[0]


def occupied_units_brute(masses, p, r, a, b):
    """Integers j in [a, b) with positive mass on [j, j+1)."""
    q = p**r
    return sorted({c // q for c, m in masses.items() if m and a * q <= c < b * q})
