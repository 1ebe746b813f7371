"""Cohomological dimension of homomorphisms between free abelian groups.

A homomorphism ``Z^n -> Z^m`` is an m x n integer matrix acting on columns.
With trivial integer coefficients ``H^k(Z^n; Z)`` is the k-th exterior
power of the dual lattice, and the induced map in degree k is the k-th
exterior power of the transpose.  That map is nonzero exactly when some
k x k minor is nonzero, i.e. for ``k <= rank``; so the trivial-coefficient
value of cd (and of hd) is the rank.  It is a lower bound for the supremum
over all coefficient modules.
"""

from __future__ import annotations

import itertools
import random
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from .errors import ImageError, ShapeError
from .smith import determinant, identity, matmul, smith_normal_form, transpose


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ShapeError("entries do not match the stated shape")
        if any(not isinstance(x, int) or isinstance(x, bool) for r in self.entries for x in r):
            raise ShapeError("entries must be integers")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> IntMatrix:
        rows = [tuple(int(x) for x in r) for r in rows]
        if cols is None:
            if not rows:
                raise ShapeError("give cols for a matrix with no rows")
            cols = len(rows[0])
        return cls(len(rows), cols, tuple(rows))

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls.from_rows(identity(n), n)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntMatrix:
        return cls.from_rows([[0] * cols for _ in range(rows)], cols)

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise ShapeError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        if self.rows == 0 or other.cols == 0:
            return IntMatrix.zeros(self.rows, other.cols)
        if self.cols == 0:
            return IntMatrix.zeros(self.rows, other.cols)
        return IntMatrix.from_rows(matmul(self.tolist(), other.tolist()), other.cols)

    @property
    def T(self) -> IntMatrix:
        return IntMatrix.from_rows(transpose(self.tolist()) if self.rows else [[] for _ in range(self.cols)], self.rows)

    def rank(self) -> int:
        if self.rows == 0 or self.cols == 0:
            return 0
        return smith_normal_form(self.tolist()).rank

    def columns(self, idx: Iterable[int]) -> IntMatrix:
        idx = list(idx)
        return IntMatrix.from_rows([[r[j] for j in idx] for r in self.entries], len(idx))

    def rows_of(self, idx: Iterable[int]) -> IntMatrix:
        return IntMatrix.from_rows([self.entries[i] for i in idx], self.cols)


def exterior_power(A: IntMatrix, k: int) -> IntMatrix:
    """Matrix of k x k minors; rows and columns indexed by k-subsets in lexicographic order."""
    if k == 0:
        return IntMatrix.identity(1)
    rsets = list(itertools.combinations(range(A.rows), k))
    csets = list(itertools.combinations(range(A.cols), k))
    M = A.tolist()
    out = [[determinant([[M[i][j] for j in cs] for i in rs]) for cs in csets] for rs in rsets]
    return IntMatrix.from_rows(out, len(csets))


def induced_cohomology_map(A: IntMatrix, k: int) -> IntMatrix:
    """``H^k(Z^m; Z) -> H^k(Z^n; Z)`` for ``A: Z^n -> Z^m`` with trivial coefficients."""
    return exterior_power(A.T, k)


def cd_trivial(A: IntMatrix) -> int:
    return A.rank()


def hd_trivial(A: IntMatrix) -> int:
    return A.rank()


def solve_integral(B: IntMatrix, C: IntMatrix) -> IntMatrix:
    """Some integer X with ``B X == C``; ImageError if none exists."""
    if B.rows != C.rows:
        raise ShapeError("row counts differ")
    if B.cols == 0:
        if any(x for r in C.entries for x in r):
            raise ImageError("no integral solution")
        return IntMatrix.zeros(0, C.cols)
    sf = smith_normal_form(B.tolist(), cols=B.cols)
    U, V, diag = sf.U, sf.V, sf.diagonal
    rank = sf.rank
    X = [[0] * C.cols for _ in range(B.cols)]
    for c in range(C.cols):
        b = [C.entries[i][c] for i in range(C.rows)]
        ub = [sum(U[i][k] * b[k] for k in range(len(b))) for i in range(len(U))]
        y = [0] * B.cols
        for i, v in enumerate(ub):
            if i < rank:
                if v % diag[i]:
                    raise ImageError("no integral solution")
                y[i] = v // diag[i]
            elif v:
                raise ImageError("no integral solution")
        for i in range(B.cols):
            X[i][c] = sum(V[i][k] * y[k] for k in range(B.cols))
    return IntMatrix.from_rows(X, C.cols)


def restrict_hom(A: IntMatrix, I_gamma: IntMatrix, I_lambda: IntMatrix) -> IntMatrix:
    """The A' with ``A @ I_gamma == I_lambda @ A'``; ImageError if A(G') is not in L'."""
    if A.cols != I_gamma.rows or A.rows != I_lambda.rows:
        raise ShapeError("inclusions do not match the homomorphism")
    A_prime = solve_integral(I_lambda, A @ I_gamma)
    if I_lambda @ A_prime != A @ I_gamma:
        raise ImageError("no integral factorization")
    return A_prime


@dataclass(frozen=True)
class HomSquare:
    A: IntMatrix
    A_prime: IntMatrix
    R_gamma: IntMatrix
    R_lambda: IntMatrix
    I_gamma: IntMatrix
    I_lambda: IntMatrix
    label: str = ""

    def problems(self) -> list[str]:
        out = []
        try:
            if self.R_gamma @ self.I_gamma != IntMatrix.identity(self.I_gamma.cols):
                out.append("R_gamma * I_gamma != 1")
            if self.R_lambda @ self.I_lambda != IntMatrix.identity(self.I_lambda.cols):
                out.append("R_lambda * I_lambda != 1")
            if self.A_prime @ self.R_gamma != self.R_lambda @ self.A:
                out.append("square does not commute")
            if self.A @ self.I_gamma != self.I_lambda @ self.A_prime:
                out.append("A' is not the restriction of A")
        except ShapeError as exc:
            out.append(str(exc))
        return out

    def is_valid(self) -> bool:
        return not self.problems()

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "A": self.A.tolist(),
            "A_prime": self.A_prime.tolist(),
            "R_gamma": self.R_gamma.tolist(),
            "R_lambda": self.R_lambda.tolist(),
            "I_gamma": self.I_gamma.tolist(),
            "I_lambda": self.I_lambda.tolist(),
        }


@dataclass(frozen=True)
class SubInstance:
    A: IntMatrix
    I_gamma: IntMatrix
    I_lambda: IntMatrix
    label: str = ""


def projection_square() -> HomSquare:
    """Identity of Z^2 over the identity of its first factor, with coordinate projections."""
    incl = IntMatrix.from_rows([[1], [0]])
    proj = IntMatrix.from_rows([[1, 0]])
    return HomSquare(IntMatrix.identity(2), IntMatrix.identity(1), proj, proj, incl, incl, "projection")


# -- corpora ----------------------------------------------------------------


def _coordinate_inclusion(n: int, keep: Sequence[int]) -> IntMatrix:
    return IntMatrix.from_rows([[int(i == j) for j in keep] for i in range(n)], len(keep))


def _coordinate_projection(n: int, keep: Sequence[int]) -> IntMatrix:
    return IntMatrix.from_rows([[int(i == j) for i in range(n)] for j in keep], n)


def _subsets(n: int):
    for k in range(1, n + 1):
        yield from itertools.combinations(range(n), k)


def exhaustive_sub_instances() -> list[SubInstance]:
    """All coordinate-subgroup restrictions: dims <= 2 with entries in [-2, 2],
    plus 3 x 3 with entries in [-1, 1] and leading-coordinate subgroups."""
    out = []
    for n, m in itertools.product((1, 2), repeat=2):
        for flat in itertools.product(range(-2, 3), repeat=n * m):
            A = IntMatrix.from_rows([flat[i * n : (i + 1) * n] for i in range(m)], n)
            for gs in _subsets(n):
                for ls in _subsets(m):
                    inst = SubInstance(A, _coordinate_inclusion(n, gs), _coordinate_inclusion(m, ls))
                    if _restricts(inst):
                        out.append(inst)
    for flat in itertools.product(range(-1, 2), repeat=9):
        A = IntMatrix.from_rows([flat[0:3], flat[3:6], flat[6:9]])
        for k, l in itertools.product((1, 2), repeat=2):
            inst = SubInstance(A, _coordinate_inclusion(3, range(k)), _coordinate_inclusion(3, range(l)))
            if _restricts(inst):
                out.append(inst)
    return out


def _restricts(inst: SubInstance) -> bool:
    # coordinate inclusions: A maps the kept domain coordinates into the kept target ones
    cols = [j for j in range(inst.I_gamma.rows) if any(inst.I_gamma.entries[j])]
    rows_kept = {i for i in range(inst.I_lambda.rows) if any(inst.I_lambda.entries[i])}
    return all(inst.A.entries[i][j] == 0 for j in cols for i in range(inst.A.rows) if i not in rows_kept)


def random_unimodular(n: int, rng: random.Random, steps: int = 8) -> tuple[IntMatrix, IntMatrix]:
    """A random unimodular matrix and its inverse, as products of elementary moves."""
    P = identity(n)
    Pinv = identity(n)
    for _ in range(steps if n > 1 else 0):
        i, j = rng.sample(range(n), 2)
        q = rng.choice((-2, -1, 1, 2))
        # P <- P * E where E adds q * column i to column j; inverse adds -q * row j to row i
        for row in P:
            row[j] += q * row[i]
        Pinv[i] = [a - q * b for a, b in zip(Pinv[i], Pinv[j])]
    if n and rng.random() < 0.5:
        k = rng.randrange(n)
        for row in P:
            row[k] = -row[k]
        Pinv[k] = [-a for a in Pinv[k]]
    return IntMatrix.from_rows(P, n), IntMatrix.from_rows(Pinv, n)


def _random_block(rng, m, n, k, l, block_diagonal):
    rows = []
    for i in range(m):
        row = []
        for j in range(n):
            if i >= l and j < k:
                row.append(0)  # G' lands in L'
            elif block_diagonal and i < l and j >= k:
                row.append(0)  # commutes with the projections
            else:
                row.append(rng.randint(-3, 3))
        rows.append(row)
    return IntMatrix.from_rows(rows, n)


def random_square(rng: random.Random, max_dim: int = 5, block_diagonal: bool = True) -> HomSquare:
    n = rng.randint(1, max_dim)
    m = rng.randint(1, max_dim)
    k = rng.randint(1, n)
    l = rng.randint(1, m)
    P, Pinv = random_unimodular(n, rng)
    Q, Qinv = random_unimodular(m, rng)
    B = _random_block(rng, m, n, k, l, block_diagonal)
    A = Q @ B @ Pinv
    I_gamma, I_lambda = P.columns(range(k)), Q.columns(range(l))
    R_gamma, R_lambda = Pinv.rows_of(range(k)), Qinv.rows_of(range(l))
    A_prime = B.rows_of(range(l)).columns(range(k))
    return HomSquare(A, A_prime, R_gamma, R_lambda, I_gamma, I_lambda, f"random n={n} m={m} k={k} l={l}")


def random_sub_instances(count: int, seed: int, max_dim: int = 5) -> list[SubInstance]:
    rng = random.Random(seed)
    out = []
    for i in range(count):
        sq = random_square(rng, max_dim, block_diagonal=rng.random() < 0.5)
        out.append(SubInstance(sq.A, sq.I_gamma, sq.I_lambda, f"seed={seed}#{i}"))
    return out


def exhaustive_squares() -> list[HomSquare]:
    """Coordinate retraction squares for dims <= 2, entries in [-2, 2]."""
    out = []
    for n, m in itertools.product((1, 2), repeat=2):
        for flat in itertools.product(range(-2, 3), repeat=n * m):
            A = IntMatrix.from_rows([flat[i * n : (i + 1) * n] for i in range(m)], n)
            for gs in _subsets(n):
                for ls in _subsets(m):
                    Ig, Il = _coordinate_inclusion(n, gs), _coordinate_inclusion(m, ls)
                    Rg, Rl = _coordinate_projection(n, gs), _coordinate_projection(m, ls)
                    try:
                        Ap = restrict_hom(A, Ig, Il)
                    except ImageError:
                        continue
                    sq = HomSquare(A, Ap, Rg, Rl, Ig, Il)
                    if sq.is_valid():
                        out.append(sq)
    return out


def random_squares(count: int, seed: int, max_dim: int = 5) -> list[HomSquare]:
    rng = random.Random(seed)
    return [random_square(rng, max_dim, block_diagonal=True) for _ in range(count)]


# -- audits -----------------------------------------------------------------


def audit_lemma31(instances: Iterable[SubInstance]) -> dict:
    """cd of a restriction never exceeds cd of the homomorphism (trivial coefficients)."""
    records = []
    violations = []
    for idx, inst in enumerate(instances):
        A_prime = restrict_hom(inst.A, inst.I_gamma, inst.I_lambda)
        big, small = cd_trivial(inst.A), cd_trivial(A_prime)
        rec = {"index": idx, "label": inst.label, "cd": big, "cd_restricted": small, "ok": small <= big}
        records.append(rec)
        if small > big:
            violations.append(dict(rec, A=inst.A.tolist(), A_prime=A_prime.tolist()))
    return {
        "instances": len(records),
        "equal": sum(r["cd"] == r["cd_restricted"] for r in records),
        "violations": len(violations),
        "counterexamples": violations,
    }


def audit_theorem32(squares: Iterable[HomSquare]) -> dict:
    """Compare cd(A) with cd(A') on retraction squares; descriptive, never raises on inequality."""
    counts = {"equal": 0, "strict-less": 0, "greater": 0, "invalid": 0}
    findings = []
    n = 0
    for sq in squares:
        n += 1
        problems = sq.problems()
        if problems:
            counts["invalid"] += 1
            findings.append({"class": "invalid", "problems": problems, **sq.to_json()})
            continue
        big, small = cd_trivial(sq.A), cd_trivial(sq.A_prime)
        cls = "equal" if big == small else ("strict-less" if small < big else "greater")
        counts[cls] += 1
        if cls != "equal":
            findings.append({"class": cls, "cd": big, "cd_restricted": small, "identities_verified": True, **sq.to_json()})
    return {"instances": n, "counts": counts, "findings": findings}
