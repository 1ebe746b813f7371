"""Cup products on simplicial cochains over a field, cup-length and zero-divisor cup-length.

Cochains are dense lists indexed by the complex's simplices of one degree.
The product uses the front-face/back-face formula on simplices written in
the complex's fixed vertex order:

    (a u b)(v_0 .. v_{p+q}) = a(v_0 .. v_p) * b(v_p .. v_{p+q})
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .chains import Ring, SimplicialComplex, parse_ring
from .errors import OrderMissing


class Field:
    """Arithmetic in Q (Fractions) or Z/p (ints mod p)."""

    def __init__(self, ring: Ring):
        if not ring.is_field:
            raise ValueError("cup products here need field coefficients (Q or Zp:<p>)")
        self.ring = ring
        self.p = ring.p

    def __call__(self, x):
        return x % self.p if self.p else Fraction(x)

    def inv(self, x):
        return pow(x, -1, self.p) if self.p else 1 / x

    def is_zero(self, x) -> bool:
        return x % self.p == 0 if self.p else x == 0

    def rref(self, rows: list[list]) -> tuple[list[list], list[int]]:
        """Reduced row echelon form and pivot columns."""
        M = [[self(x) for x in row] for row in rows]
        pivots = []
        r = 0
        cols = len(M[0]) if M else 0
        for c in range(cols):
            piv = next((i for i in range(r, len(M)) if not self.is_zero(M[i][c])), None)
            if piv is None:
                continue
            M[r], M[piv] = M[piv], M[r]
            s = self.inv(M[r][c])
            M[r] = [self(x * s) for x in M[r]]
            for i in range(len(M)):
                if i != r and not self.is_zero(M[i][c]):
                    q = M[i][c]
                    M[i] = [self(a - q * b) for a, b in zip(M[i], M[r])]
            pivots.append(c)
            r += 1
            if r == len(M):
                break
        return M[:r], pivots

    def rank(self, rows: list[list]) -> int:
        return len(self.rref(rows)[1]) if rows else 0

    def nullspace(self, rows: list[list], ncols: int) -> list[list]:
        """Basis of {x : M x = 0}."""
        if not rows:
            return [[self(int(i == j)) for j in range(ncols)] for i in range(ncols)]
        R, pivots = self.rref(rows)
        free = [c for c in range(ncols) if c not in pivots]
        basis = []
        for fc in free:
            v = [self(0)] * ncols
            v[fc] = self(1)
            for row, pc in zip(R, pivots):
                v[pc] = self(-row[fc])
            basis.append(v)
        return basis

    def span_basis(self, vectors: list[list]) -> list[list]:
        """Row-reduced basis of the span."""
        if not vectors:
            return []
        return self.rref(vectors)[0]


def coboundary(K: SimplicialComplex, field: Field, a: list, p: int) -> list:
    out = [field(0)] * K.count(p + 1)
    for j, s in enumerate(K.simplices(p + 1)):
        total = field(0)
        for i in range(len(s)):
            face = s[:i] + s[i + 1 :]
            total += (-1) ** i * a[K.position(face)]
        out[j] = field(total)
    return out


def cup_product(K: SimplicialComplex, field, a: list, b: list, p: int, q: int) -> list:
    """Front p-face times back q-face on every (p+q)-simplex."""
    if K is None or not hasattr(K, "vertices"):
        raise OrderMissing("cup products need a complex with a fixed vertex order")
    field = field if isinstance(field, Field) else Field(parse_ring(field))
    if len(a) != K.count(p) or len(b) != K.count(q):
        raise ValueError("cochain lengths do not match the stated degrees")
    out = []
    for s in K.simplices(p + q):
        out.append(field(a[K.position(s[: p + 1])] * b[K.position(s[p:])]))
    return out


@dataclass
class CohomologyRing:
    """Cohomology over a field with a chosen cocycle basis and its multiplication table.

    ``basis`` lists ``(degree, cocycle)``; ``table[i][j]`` holds the
    coordinates of ``basis[i] u basis[j]`` in that basis.
    """

    complex: SimplicialComplex
    field: Field
    basis: list[tuple[int, list]]
    table: list[list[list]]
    _coords: dict

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def degree(self, i: int) -> int:
        return self.basis[i][0]

    def coordinates(self, degree: int, cocycle: list) -> list:
        """Coordinates of a cocycle's class in the full basis."""
        solve, reps = self._coords[degree]
        local = solve(cocycle)
        full = [self.field(0)] * self.dimension
        for k, i in enumerate(reps):
            full[i] = local[k]
        return full

    def multiply(self, x: list, y: list) -> list:
        out = [self.field(0)] * self.dimension
        for i, xi in enumerate(x):
            if self.field.is_zero(xi):
                continue
            for j, yj in enumerate(y):
                if self.field.is_zero(yj):
                    continue
                c = xi * yj
                for k, t in enumerate(self.table[i][j]):
                    if not self.field.is_zero(t):
                        out[k] = self.field(out[k] + c * t)
        return out

    def unit(self) -> list:
        x = [self.field(0)] * self.dimension
        ones = [self.field(1)] * self.complex.count(0)
        return self.coordinates(0, ones) if self.complex.count(0) else x


def cohomology_ring(K: SimplicialComplex, field="Q") -> CohomologyRing:
    F = field if isinstance(field, Field) else Field(parse_ring(field))
    top = K.dim
    # delta_d as a matrix with rows = (d+1)-simplices
    delta = {}
    for d in range(top + 1):
        rows = []
        for s in K.simplices(d + 1):
            row = [F(0)] * K.count(d)
            for i in range(len(s)):
                row[K.position(s[:i] + s[i + 1 :])] = F((-1) ** i)
            rows.append(row)
        delta[d] = rows
    basis: list[tuple[int, list]] = []
    coords = {}
    for d in range(top + 1):
        n = K.count(d)
        cocycles = F.nullspace(delta[d], n)
        # image of delta_{d-1}: columns of delta[d-1] as vectors in C^d
        if d > 0 and delta[d - 1]:
            cobound = F.span_basis([list(col) for col in zip(*delta[d - 1])])
        else:
            cobound = []
        span = list(cobound)
        reps = []
        for z in cocycles:
            if F.rank(span + [z]) > len(span):
                span = F.span_basis(span + [z])
                reps.append(z)
        start = len(basis)
        basis.extend((d, z) for z in reps)
        coords[d] = (_solver(F, cobound, reps, n), list(range(start, start + len(reps))))
    ring = CohomologyRing(K, F, basis, [], coords)
    table = []
    for i, (p, a) in enumerate(basis):
        row = []
        for j, (q, b) in enumerate(basis):
            if p + q > top:
                row.append([F(0)] * len(basis))
            else:
                row.append(ring.coordinates(p + q, cup_product(K, F, a, b, p, q)))
        table.append(row)
    ring.table = table
    return ring


def _solver(F: Field, cobound: list[list], reps: list[list], n: int):
    """Map a cocycle to its coordinates on ``reps`` modulo coboundaries."""
    gens = cobound + reps
    k = len(gens)

    def solve(z: list) -> list:
        if not reps:
            return []
        # columns are generators, last column is z
        rows = [[gens[g][i] for g in range(k)] + [z[i]] for i in range(n)]
        R, pivots = F.rref(rows)
        if k in pivots:
            raise ValueError("not a cocycle")
        sol = [F(0)] * k
        for row, pc in zip(R, pivots):
            sol[pc] = row[k]
        return sol[len(cobound) :]

    return solve


def _power_dimensions(F: Field, multiply, generators: list[list]) -> int:
    """Largest m with a nonzero m-fold product of elements of span(generators)."""
    level = F.span_basis(generators)
    m = 0
    while level:
        m += 1
        products = [multiply(x, g) for x in level for g in generators]
        level = F.span_basis([v for v in products if any(not F.is_zero(c) for c in v)])
    return m


def cup_length(K: SimplicialComplex, field="Q") -> int:
    ring = cohomology_ring(K, field)
    F = ring.field
    positive = []
    for i in range(ring.dimension):
        if ring.degree(i) > 0:
            e = [F(0)] * ring.dimension
            e[i] = F(1)
            positive.append(e)
    if not positive:
        return 0
    return _power_dimensions(F, ring.multiply, positive)


class TensorPower:
    """H^{(x)r} with the Koszul-signed product."""

    def __init__(self, ring: CohomologyRing, r: int):
        self.ring = ring
        self.r = r
        self.F = ring.field
        self.index = list(itertools.product(range(ring.dimension), repeat=r))
        self.pos = {t: i for i, t in enumerate(self.index)}
        self._basic: dict = {}

    @property
    def dimension(self) -> int:
        return len(self.index)

    def _basis_product(self, s: tuple, t: tuple) -> dict:
        key = (s, t)
        if key not in self._basic:
            R, F = self.ring, self.F
            deg = R.degree
            sign = 0
            for k in range(self.r):
                for l in range(k + 1, self.r):
                    sign += deg(t[k]) * deg(s[l])
            factors = [R.table[s[k]][t[k]] for k in range(self.r)]
            out: dict = {}
            supports = [[(i, c) for i, c in enumerate(fac) if not F.is_zero(c)] for fac in factors]
            for combo in itertools.product(*supports):
                c = F((-1) ** sign)
                for _, v in combo:
                    c = c * v
                idx = self.pos[tuple(i for i, _ in combo)]
                out[idx] = F(out.get(idx, 0) + c)
            self._basic[key] = out
        return self._basic[key]

    def multiply(self, x: list, y: list) -> list:
        F = self.F
        out = [F(0)] * self.dimension
        xs = [(i, c) for i, c in enumerate(x) if not F.is_zero(c)]
        ys = [(j, c) for j, c in enumerate(y) if not F.is_zero(c)]
        for i, a in xs:
            for j, b in ys:
                for k, v in self._basic_product_idx(i, j).items():
                    out[k] = F(out[k] + a * b * v)
        return out

    def _basic_product_idx(self, i: int, j: int) -> dict:
        return self._basis_product(self.index[i], self.index[j])

    def multiplication_map(self) -> list[list]:
        """Matrix of a_1 (x) ... (x) a_r -> a_1 ... a_r, rows indexed by the basis of H."""
        R, F = self.ring, self.F
        cols = []
        for t in self.index:
            v = [F(0)] * R.dimension
            v[t[0]] = F(1)
            for k in t[1:]:
                e = [F(0)] * R.dimension
                e[k] = F(1)
                v = R.multiply(v, e)
            cols.append(v)
        return [list(row) for row in zip(*cols)]


def zero_divisor_cup_length(K: SimplicialComplex, field="Q", r: int = 2) -> int:
    """Longest nonzero product in the kernel of H^{(x)r} -> H (the r-fold cup product)."""
    if r < 2:
        raise ValueError("r must be at least 2")
    ring = cohomology_ring(K, field)
    T = TensorPower(ring, r)
    kernel = T.F.nullspace(T.multiplication_map(), T.dimension)
    if not kernel:
        return 0
    return _power_dimensions(T.F, T.multiply, kernel)


def audit_cup_length_bound(spaces) -> list[dict]:
    """Finite spaces whose order complex has cup-length above cat(Id); reported, not asserted."""
    from .chains import order_complex
    from .covers import cat_space

    findings = []
    for i, X in enumerate(spaces):
        cl = cup_length(order_complex(X), "Q")
        cat = cat_space(X).value
        if cl > cat:
            findings.append({"space": i, "cup_length": cl, "cat": cat})
    return findings
