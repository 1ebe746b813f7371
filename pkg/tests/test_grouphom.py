from __future__ import annotations

import itertools
import random

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from finitop.errors import ImageError, ShapeError
from finitop.grouphom import (
    HomSquare,
    IntMatrix,
    SubInstance,
    audit_lemma31,
    audit_theorem32,
    cd_trivial,
    exhaustive_squares,
    exhaustive_sub_instances,
    exterior_power,
    hd_trivial,
    induced_cohomology_map,
    projection_square,
    random_square,
    random_squares,
    random_sub_instances,
    random_unimodular,
    restrict_hom,
)

int_matrices = st.integers(1, 4).flatmap(
    lambda m: st.integers(1, 4).flatmap(
        lambda n: st.lists(st.lists(st.integers(-4, 4), min_size=n, max_size=n), min_size=m, max_size=m)
    )
)


def top_nonzero_minor(rows):
    """Oracle: largest k with a nonzero k x k minor, via sympy."""
    M = sympy.Matrix(rows)
    best = 0
    for k in range(1, min(M.shape) + 1):
        if any(
            M.extract(list(r), list(c)).det() != 0
            for r in itertools.combinations(range(M.shape[0]), k)
            for c in itertools.combinations(range(M.shape[1]), k)
        ):
            best = k
    return best


def test_cd_examples():
    assert cd_trivial(IntMatrix.zeros(3, 2)) == 0
    for n in range(1, 6):
        assert cd_trivial(IntMatrix.identity(n)) == n
        assert hd_trivial(IntMatrix.identity(n)) == n
    assert cd_trivial(IntMatrix.from_rows([[2, 0], [0, 0]])) == 1


@given(int_matrices)
def test_cd_matches_exterior_power_oracle(rows):
    A = IntMatrix.from_rows(rows)
    assert cd_trivial(A) == top_nonzero_minor(rows) == hd_trivial(A)
    for k in range(0, min(A.rows, A.cols) + 2):
        nonzero = any(x for r in exterior_power(A, k).entries for x in r)
        assert nonzero == (k <= cd_trivial(A))


@given(int_matrices, st.integers(1, 3))
def test_exterior_power_entries_are_minors(rows, k):
    A = IntMatrix.from_rows(rows)
    E = exterior_power(A, k)
    M = sympy.Matrix(rows)
    rsets = list(itertools.combinations(range(A.rows), k))
    csets = list(itertools.combinations(range(A.cols), k))
    for i, rs in enumerate(rsets):
        for j, cs in enumerate(csets):
            assert E.entries[i][j] == M.extract(list(rs), list(cs)).det()


@given(int_matrices, int_matrices, st.integers(1, 3))
def test_exterior_power_is_functorial(r1, r2, k):
    A, B = IntMatrix.from_rows(r1), IntMatrix.from_rows(r2)
    if A.cols != B.rows:
        return
    assert exterior_power(A @ B, k) == exterior_power(A, k) @ exterior_power(B, k)


def test_induced_map_identity():
    for n in range(1, 5):
        for k in range(n + 1):
            E = induced_cohomology_map(IntMatrix.identity(n), k)
            assert E == IntMatrix.identity(E.rows)


def test_restrict_hom_examples():
    A = IntMatrix.from_rows([[1, 2], [3, 4]])
    assert restrict_hom(A, IntMatrix.identity(2), IntMatrix.identity(2)) == A
    sq = projection_square()
    assert restrict_hom(sq.A, sq.I_gamma, sq.I_lambda) == IntMatrix.identity(1)


def test_restrict_hom_diagonal_subgroup_both_branches():
    I_gamma = IntMatrix.from_rows([[1], [1], [0]])
    I_lambda = IntMatrix.from_rows([[1], [1], [0]])
    good = IntMatrix.from_rows([[1, 2, 5], [2, 1, 7], [4, -4, 1]])  # A(e1 + e2) = 3(e1 + e2)
    assert restrict_hom(good, I_gamma, I_lambda) == IntMatrix.from_rows([[3]])
    bad = IntMatrix.from_rows([[1, 2, 5], [2, 2, 7], [4, -4, 1]])
    with pytest.raises(ImageError):
        restrict_hom(bad, I_gamma, I_lambda)
    rng = random.Random(11)
    seen = set()
    for _ in range(200):
        A = IntMatrix.from_rows([[rng.randint(-2, 2) for _ in range(3)] for _ in range(3)])
        image = [A.entries[i][0] + A.entries[i][1] for i in range(3)]
        lands = image[0] == image[1] and image[2] == 0
        try:
            restrict_hom(A, I_gamma, I_lambda)
            assert lands
            seen.add(True)
        except ImageError:
            assert not lands
            seen.add(False)
    assert seen == {True, False}


def test_restrict_hom_shape_error():
    with pytest.raises(ShapeError):
        restrict_hom(IntMatrix.identity(2), IntMatrix.identity(3), IntMatrix.identity(2))


def test_random_unimodular_inverse():
    rng = random.Random(3)
    for n in range(1, 6):
        P, Pinv = random_unimodular(n, rng)
        assert P @ Pinv == IntMatrix.identity(n)
        assert abs(sympy.Matrix(P.tolist()).det()) == 1


def test_random_squares_are_valid():
    rng = random.Random(5)
    for _ in range(100):
        assert random_square(rng).is_valid()


def test_square_problems_detected():
    sq = projection_square()
    assert sq.is_valid()
    broken = HomSquare(sq.A, IntMatrix.from_rows([[2]]), sq.R_gamma, sq.R_lambda, sq.I_gamma, sq.I_lambda)
    assert "square does not commute" in broken.problems()


def test_projection_square_is_strict_less():
    sq = projection_square()
    assert cd_trivial(sq.A) == 2 and cd_trivial(sq.A_prime) == 1
    rep = audit_theorem32([sq])
    assert rep["counts"]["strict-less"] == 1
    f = rep["findings"][0]
    assert f["class"] == "strict-less" and f["label"] == "projection" and f["identities_verified"]


def test_trivial_square_is_equal():
    I = IntMatrix.identity(2)
    rep = audit_theorem32([HomSquare(I, I, I, I, I, I)])
    assert rep["counts"]["equal"] == 1


def test_full_rank_restriction_is_equal():
    matched = [sq for sq in exhaustive_squares() if sq.A_prime.rank() == sq.A.rank()]
    assert matched
    assert audit_theorem32(matched)["counts"]["equal"] == len(matched)


def test_lemma31_examples():
    I = IntMatrix.identity(2)
    rep = audit_lemma31([SubInstance(I, I, I), SubInstance(IntMatrix.zeros(2, 2), I, I)])
    assert rep["violations"] == 0 and rep["equal"] == 2


def test_lemma31_corpora():
    assert audit_lemma31(exhaustive_sub_instances())["violations"] == 0
    assert audit_lemma31(random_sub_instances(300, seed=1))["violations"] == 0


def test_random_corpora_are_seeded():
    a = [s.to_json() for s in random_squares(20, seed=4)]
    b = [s.to_json() for s in random_squares(20, seed=4)]
    c = [s.to_json() for s in random_squares(20, seed=5)]
    assert a == b and a != c
