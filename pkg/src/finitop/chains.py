"""Simplicial (co)homology over Z, Q and Z/p, and the order complex of a finite space."""

from __future__ import annotations

import itertools
from collections.abc import Hashable, Sequence
from dataclasses import dataclass, field

from sympy import isprime, primefactors

from .errors import NonPrimeModulus, ShapeError
from .finspace import FiniteSpace, bits, popcount
from .smith import SmithForm, rank_mod_p, rank_q, smith_normal_form, transpose


class SimplicialComplex:
    """Complex given by facets; vertex order is fixed at construction.

    Simplices are tuples of vertex positions in increasing order.
    """

    def __init__(self, vertices: Sequence[Hashable], facets: Sequence[Sequence[Hashable]]):
        self.vertices = tuple(vertices)
        self.index = {v: i for i, v in enumerate(self.vertices)}
        if len(self.index) != len(self.vertices):
            raise ShapeError("duplicate vertex labels")
        raw = set()
        for f in facets:
            try:
                s = tuple(sorted({self.index[v] for v in f}))
            except KeyError as exc:
                raise ShapeError(f"facet uses unknown vertex {exc.args[0]!r}") from None
            if s:
                raw.add(s)
        for v in range(len(self.vertices)):
            raw.add((v,))
        sets = sorted(raw, key=lambda s: (-len(s), s))
        kept: list[tuple[int, ...]] = []
        for s in sets:
            if not any(set(s) <= set(k) for k in kept):
                kept.append(s)
        self.facets = tuple(sorted(kept, key=lambda s: (len(s), s)))
        by_dim: dict[int, set] = {}
        for f in self.facets:
            for k in range(1, len(f) + 1):
                by_dim.setdefault(k - 1, set()).update(itertools.combinations(f, k))
        self.dim = max(by_dim) if by_dim else -1
        self._simplices = [sorted(by_dim.get(d, ())) for d in range(self.dim + 1)]
        self._pos = [{s: i for i, s in enumerate(level)} for level in self._simplices]

    @classmethod
    def from_facets(cls, facets: Sequence[Sequence[Hashable]]) -> SimplicialComplex:
        verts = sorted({v for f in facets for v in f}, key=lambda v: (str(type(v)), v))
        return cls(verts, facets)

    def simplices(self, d: int) -> list[tuple[int, ...]]:
        return self._simplices[d] if 0 <= d <= self.dim else []

    def position(self, simplex: tuple[int, ...]) -> int:
        return self._pos[len(simplex) - 1][simplex]

    def count(self, d: int) -> int:
        return len(self.simplices(d))

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * self.count(d) for d in range(self.dim + 1))

    def boundary_matrix(self, d: int) -> list[list[int]]:
        """Matrix of the boundary C_d -> C_{d-1}; rows index (d-1)-simplices."""
        rows = self.simplices(d - 1) if d >= 1 else []
        cols = self.simplices(d)
        M = [[0] * len(cols) for _ in rows]
        if d < 1:
            return M
        pos = self._pos[d - 1]
        for j, s in enumerate(cols):
            for i in range(len(s)):
                M[pos[s[:i] + s[i + 1 :]]][j] = (-1) ** i
        return M

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices), "facets": [[self.vertices[v] for v in f] for f in self.facets]}

    def __repr__(self) -> str:
        return f"SimplicialComplex(dim={self.dim}, f-vector={[self.count(d) for d in range(self.dim + 1)]})"


def linear_extension(space: FiniteSpace) -> list[int]:
    return sorted(range(space.n), key=lambda x: (popcount(space.down[x]), x))


def order_complex(space: FiniteSpace) -> SimplicialComplex:
    """Simplices are the nonempty chains; vertices are listed bottom-up."""
    order = linear_extension(space)
    up_covers: dict[int, list[int]] = {x: [] for x in range(space.n)}
    for a, b in space.hasse():
        up_covers[a].append(b)
    facets = []

    def extend(chain_):
        top = chain_[-1]
        if not up_covers[top]:
            facets.append([space.labels[x] for x in chain_])
        for y in up_covers[top]:
            extend(chain_ + [y])

    for x in space.minimal_points():
        extend([x])
    return SimplicialComplex([space.labels[x] for x in order], facets)


# -- rings ------------------------------------------------------------------


@dataclass(frozen=True)
class Ring:
    name: str
    p: int = 0  # characteristic; 0 for Z and Q

    @property
    def is_field(self) -> bool:
        return self.name != "Z"

    def __str__(self) -> str:
        return f"Zp:{self.p}" if self.name == "Zp" else self.name


def parse_ring(spec) -> Ring:
    if isinstance(spec, Ring):
        return spec
    s = str(spec).strip()
    if s in ("Z", "Q"):
        return Ring(s)
    for prefix in ("Zp:", "Z/", "GF"):
        if s.startswith(prefix):
            try:
                p = int(s[len(prefix) :])
            except ValueError:
                break
            if not isprime(p):
                raise NonPrimeModulus(f"{p} is not prime")
            return Ring("Zp", p)
    raise ValueError(f"unknown coefficient ring {spec!r}; use Z, Q or Zp:<p>")


def _rank(M: list[list[int]], ring: Ring) -> int:
    if not M or not M[0]:
        return 0
    if ring.name == "Zp":
        return rank_mod_p(M, ring.p)
    if ring.name == "Q":
        return rank_q(M)
    return smith_normal_form(M).rank


@dataclass
class HomologySummary:
    ring: str
    betti: list[int]
    torsion: list[list[int]] = field(default_factory=list)
    cohomological: bool = False

    def nonzero_degrees(self) -> list[int]:
        return [d for d in range(len(self.betti)) if self.betti[d] or (self.torsion and self.torsion[d])]

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * b for d, b in enumerate(self.betti))

    def to_json(self) -> dict:
        out = {"ring": self.ring, "betti": self.betti}
        if self.ring == "Z":
            out["torsion"] = self.torsion
        return out


def boundary_smith_forms(K: SimplicialComplex) -> dict[int, SmithForm]:
    return {d: smith_normal_form(K.boundary_matrix(d), cols=K.count(d)) for d in range(1, K.dim + 1)}


def homology(K: SimplicialComplex, ring="Z") -> HomologySummary:
    ring = parse_ring(ring)
    top = K.dim
    if ring.name == "Z":
        forms = boundary_smith_forms(K)
        rank = {d: forms[d].rank for d in forms}
        torsion = [forms[d + 1].torsion if d + 1 in forms else [] for d in range(top + 1)]
    else:
        rank = {d: _rank(K.boundary_matrix(d), ring) for d in range(1, top + 1)}
        torsion = [[] for _ in range(top + 1)]
    betti = [K.count(d) - rank.get(d, 0) - rank.get(d + 1, 0) for d in range(top + 1)]
    return HomologySummary(str(ring), betti, torsion)


def cohomology(K: SimplicialComplex, ring="Z") -> HomologySummary:
    """Cohomology from the transposed boundaries: delta_{d-1} = boundary_d^T."""
    ring = parse_ring(ring)
    top = K.dim
    cob = {d - 1: transpose(K.boundary_matrix(d)) for d in range(1, top + 1)}  # C^{d-1} -> C^d
    if ring.name == "Z":
        forms = {d: smith_normal_form(M, cols=K.count(d)) for d, M in cob.items()}
        rank = {d: forms[d].rank for d in forms}
        torsion = [forms[d - 1].torsion if d - 1 in forms else [] for d in range(top + 1)]
    else:
        rank = {d: _rank(M, ring) for d, M in cob.items()}
        torsion = [[] for _ in range(top + 1)]
    betti = [K.count(d) - rank.get(d, 0) - rank.get(d - 1, 0) for d in range(top + 1)]
    return HomologySummary(str(ring), betti, torsion, cohomological=True)


@dataclass
class DimensionProbe:
    value: int
    per_probe: dict[str, int]
    upper_bound: int
    torsion_primes: list[int]
    lower_bound: bool = True

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "kind": "lower bound over the probed coefficient modules",
            "per_probe": self.per_probe,
            "upper_bound": self.upper_bound,
            "torsion_primes": self.torsion_primes,
        }


def _probe_rings(K: SimplicialComplex, probes) -> tuple[list[Ring], list[int]]:
    primes = sorted({p for ts in homology(K, "Z").torsion for t in ts for p in primefactors(t)})
    if probes is None:
        rings = [Ring("Z"), Ring("Q")] + [Ring("Zp", p) for p in primes]
    else:
        rings = [parse_ring(p) for p in probes]
        if not rings:
            raise ValueError("probe list must be nonempty")
    return rings, primes


def _dimension(K, probes, compute) -> DimensionProbe:
    rings, primes = _probe_rings(K, probes)
    per = {}
    for ring in rings:
        degs = compute(K, ring).nonzero_degrees()
        per[str(ring)] = max(degs) if degs else -1
    return DimensionProbe(max(per.values()), per, K.dim, primes)


def cd_space(K: SimplicialComplex, probes=None) -> DimensionProbe:
    """Top degree of nonzero cohomology over the probes (default Z, Q and Z/p for torsion primes)."""
    return _dimension(K, probes, cohomology)


def hd_space(K: SimplicialComplex, probes=None) -> DimensionProbe:
    return _dimension(K, probes, homology)


# -- standard triangulations ------------------------------------------------


def torus() -> SimplicialComplex:
    """Seven-vertex torus: triangles {i, i+1, i+3} and {i, i+2, i+3} mod 7."""
    facets = []
    for i in range(7):
        facets.append([i, (i + 1) % 7, (i + 3) % 7])
        facets.append([i, (i + 2) % 7, (i + 3) % 7])
    return SimplicialComplex(range(7), facets)


def projective_plane() -> SimplicialComplex:
    """Six-vertex real projective plane."""
    facets = [
        (0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 5, 1),
        (1, 2, 4), (2, 3, 5), (3, 4, 1), (4, 5, 2), (5, 1, 3),
    ]  # fmt: skip
    return SimplicialComplex(range(6), facets)


def circle(n: int = 4) -> SimplicialComplex:
    return SimplicialComplex(range(n), [(i, (i + 1) % n) for i in range(n)])
