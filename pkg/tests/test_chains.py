from __future__ import annotations

import pytest
from conftest import posets
from hypothesis import given
from sympy import primefactors

from finitop.chains import (
    SimplicialComplex,
    boundary_smith_forms,
    cd_space,
    circle,
    cohomology,
    hd_space,
    homology,
    order_complex,
    parse_ring,
    projective_plane,
    torus,
)
from finitop.errors import NonPrimeModulus
from finitop.finspace import chain, discrete, point_space, pseudocircle
from finitop.homotopy import is_contractible
from finitop.smith import certificate_problems


def test_order_complex_examples():
    K = order_complex(chain(2))
    assert K.dim == 1 and K.count(1) == 1
    S = order_complex(pseudocircle())
    assert (S.count(0), S.count(1), S.dim) == (4, 4, 1)
    D = order_complex(discrete(3))
    assert D.dim == 0 and D.count(0) == 3


@given(posets(max_points=5))
def test_order_complex_simplices_are_chains(X):
    K = order_complex(X)
    idx = {lab: X.index[lab] for lab in X.labels}
    n_chains = 0
    for d in range(K.dim + 1):
        for s in K.simplices(d):
            pts = [idx[K.vertices[v]] for v in s]
            assert all(X.comparable(a, b) for a in pts for b in pts)
            n_chains += 1
    brute = sum(1 for m in range(1, 1 << X.n) if all(X.comparable(a, b) for a in range(X.n) for b in range(X.n) if (m >> a) & 1 and (m >> b) & 1))
    assert n_chains == brute


def test_point_homology():
    K = SimplicialComplex(["p"], [["p"]])
    assert homology(K).betti == [1]
    assert cd_space(K).value == 0 and hd_space(K).value == 0


def test_pseudocircle_homology():
    K = order_complex(pseudocircle())
    h = homology(K, "Z")
    assert h.betti == [1, 1] and h.torsion == [[], []]
    assert cd_space(K).value == 1 and hd_space(K).value == 1


def test_torus_homology():
    K = torus()
    assert (K.count(0), K.count(1), K.count(2)) == (7, 21, 14)
    assert homology(K).betti == [1, 2, 1]
    assert cohomology(K).betti == [1, 2, 1]


def test_projective_plane():
    K = projective_plane()
    h = homology(K, "Z")
    assert h.betti == [1, 0, 0] and h.torsion == [[], [2], []]
    c = cohomology(K, "Z")
    assert c.betti == [1, 0, 0] and c.torsion == [[], [], [2]]
    assert homology(K, "Zp:2").betti == [1, 1, 1]
    assert homology(K, "Q").betti == [1, 0, 0]
    probe = cd_space(K)
    assert probe.value == 2 and probe.per_probe["Zp:2"] == 2 and probe.per_probe["Q"] == 0
    assert probe.torsion_primes == [2] and probe.upper_bound == 2
    hd = hd_space(K)
    assert hd.value == 2 and hd.per_probe["Z"] == 1 and hd.per_probe["Zp:2"] == 2


def test_no_homology_above_dimension():
    K = torus()
    assert len(homology(K).betti) == K.dim + 1
    assert K.simplices(3) == [] and K.count(5) == 0


def test_ring_parsing():
    assert str(parse_ring("Z/3")) == "Zp:3" and str(parse_ring("GF5")) == "Zp:5"
    with pytest.raises(NonPrimeModulus):
        parse_ring("Zp:4")
    with pytest.raises(ValueError):
        parse_ring("R")


def test_smith_certificates_on_complexes():
    for K in (torus(), projective_plane(), circle(5), order_complex(pseudocircle())):
        for sf in boundary_smith_forms(K).values():
            assert certificate_problems(sf) == []


def _uct_check(K):
    hz = homology(K, "Z")
    cz = cohomology(K, "Z")
    top = K.dim
    for n in range(top + 1):
        assert cz.betti[n] == hz.betti[n]
        assert sorted(cz.torsion[n]) == sorted(hz.torsion[n - 1] if n >= 1 else [])
    primes = {2, 3} | {p for ts in hz.torsion for t in ts for p in primefactors(t)}
    for p in primes:
        hp = homology(K, f"Zp:{p}")
        for n in range(top + 1):
            tn = sum(1 for t in hz.torsion[n] if t % p == 0)
            tprev = sum(1 for t in hz.torsion[n - 1] if t % p == 0) if n >= 1 else 0
            assert hp.betti[n] == hz.betti[n] + tn + tprev
        assert cohomology(K, f"Zp:{p}").betti == hp.betti


def test_universal_coefficients_standard():
    for K in (torus(), projective_plane(), circle(4)):
        _uct_check(K)


@given(posets(max_points=5))
def test_universal_coefficients_and_euler(X):
    K = order_complex(X)
    _uct_check(K)
    for ring in ("Z", "Q", "Zp:2"):
        assert homology(K, ring).euler_characteristic() == K.euler_characteristic()


@given(posets(max_points=5))
def test_contractible_spaces_are_acyclic(X):
    if is_contractible(X):
        assert homology(order_complex(X)).betti[0] == 1
        assert sum(homology(order_complex(X)).betti) == 1
