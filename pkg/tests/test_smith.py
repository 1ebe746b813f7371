from __future__ import annotations

import itertools
from math import gcd

import sympy
from hypothesis import given
from hypothesis import strategies as st

from finitop.smith import certificate_problems, determinant, rank_mod_p, rank_q, smith_normal_form

matrices = st.integers(0, 5).flatmap(
    lambda m: st.integers(0 if m == 0 else 1, 5).flatmap(
        lambda n: st.lists(st.lists(st.integers(-6, 6), min_size=n, max_size=n), min_size=m, max_size=m).map(
            lambda rows: (rows, n)
        )
    )
)


def determinantal_divisors(A, n):
    """Oracle: d_k = gcd of all k x k minors, by sympy determinants."""
    m = len(A)
    out = []
    for k in range(1, min(m, n) + 1):
        g = 0
        for rows in itertools.combinations(range(m), k):
            for cols in itertools.combinations(range(n), k):
                g = gcd(g, int(sympy.Matrix([[A[i][j] for j in cols] for i in rows]).det()))
        out.append(g)
    return out


@given(matrices)
def test_certificates(case):
    A, n = case
    sf = smith_normal_form(A, cols=n)
    assert certificate_problems(sf) == []


@given(matrices)
def test_diagonal_matches_determinantal_divisors(case):
    A, n = case
    diag = smith_normal_form(A, cols=n).diagonal
    divisors = determinantal_divisors(A, n)
    prod = 1
    for k, d in enumerate(divisors):
        prod *= diag[k]
        assert prod == d


@given(matrices)
def test_ranks_agree(case):
    A, n = case
    sf = smith_normal_form(A, cols=n)
    assert sf.rank == rank_q(A)
    if A:
        assert sf.rank == sympy.Matrix(A).rank()
    for p in (2, 3, 5):
        assert rank_mod_p(A, p) == sum(1 for d in sf.diagonal if d % p)


@given(st.integers(1, 5).flatmap(lambda n: st.lists(st.lists(st.integers(-5, 5), min_size=n, max_size=n), min_size=n, max_size=n)))
def test_determinant_matches_sympy(A):
    assert determinant(A) == int(sympy.Matrix(A).det())


def test_known_forms():
    assert smith_normal_form([[2, 4, 4], [-6, 6, 12], [10, -4, -16]]).diagonal == [2, 6, 12]
    assert smith_normal_form([[0, 0], [0, 0]]).diagonal == [0, 0]
    assert smith_normal_form([], cols=3).V == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
