"""Smith normal form over Z with unimodular certificates, plus small exact rank helpers.

Matrices are lists of rows of Python ints, so there is no overflow to guard.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

Matrix = list[list[int]]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A: Matrix, B: Matrix) -> Matrix:
    if not A:
        return []
    inner = len(B)
    cols = len(B[0]) if B else 0
    if any(len(row) != inner for row in A):
        raise ValueError("shape mismatch in matmul")
    return [[sum(row[k] * B[k][j] for k in range(inner)) for j in range(cols)] for row in A]


def transpose(A: Matrix) -> Matrix:
    return [list(col) for col in zip(*A)]


@dataclass(frozen=True)
class SmithForm:
    """``U @ A @ V == D`` with U, V unimodular and D diagonal, d1 | d2 | ..."""

    A: Matrix
    U: Matrix
    D: Matrix
    V: Matrix

    @property
    def diagonal(self) -> list[int]:
        return [self.D[i][i] for i in range(min(len(self.D), len(self.D[0]) if self.D else 0))]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d)

    @property
    def torsion(self) -> list[int]:
        return [d for d in self.diagonal if d > 1]


def smith_normal_form(A: Matrix, cols: int | None = None) -> SmithForm:
    """Diagonalise an integer matrix by unimodular row and column operations.

    The pivot at each stage is an entry of least nonzero absolute value in the
    remaining block.  ``cols`` gives the width when ``A`` has no rows.
    """
    m = len(A)
    n = len(A[0]) if m else (cols or 0)
    D = [list(map(int, row)) for row in A]
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst += q * row_src
        if q:
            D[dst] = [a + q * b for a, b in zip(D[dst], D[src])]
            U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        if q:
            for row in D:
                row[dst] += q * row[src]
            for row in V:
                row[dst] += q * row[src]

    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if D[i][j] and (best is None or abs(D[i][j]) < abs(D[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            p = D[t][t]
            dirty = False
            for i in range(t + 1, m):
                add_row(i, t, -(D[i][t] // p))
                dirty |= D[i][t] != 0
            for j in range(t + 1, n):
                add_col(j, t, -(D[t][j] // p))
                dirty |= D[t][j] != 0
            if dirty:
                # a remainder smaller than the pivot survived; bring it to the pivot
                best = None
                for i in range(t + 1, m):
                    if D[i][t] and (best is None or abs(D[i][t]) < best[0]):
                        best = (abs(D[i][t]), "r", i)
                for j in range(t + 1, n):
                    if D[t][j] and (best is None or abs(D[t][j]) < best[0]):
                        best = (abs(D[t][j]), "c", j)
                if best[1] == "r":
                    swap_rows(t, best[2])
                else:
                    swap_cols(t, best[2])
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if D[t][t] < 0:
            D[t] = [-a for a in D[t]]
            U[t] = [-a for a in U[t]]
    return SmithForm([list(r) for r in A], U, D, V)


def determinant(A: Matrix) -> int:
    """Bareiss fraction-free elimination."""
    n = len(A)
    if n == 0:
        return 1
    M = [list(row) for row in A]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k]), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def certificate_problems(sf: SmithForm) -> list[str]:
    out = []
    m = len(sf.A)
    n = len(sf.V)
    if m and matmul(matmul(sf.U, sf.A), sf.V) != sf.D:
        out.append("U*A*V != D")
    if abs(determinant(sf.U)) != 1:
        out.append("U is not unimodular")
    if abs(determinant(sf.V)) != 1:
        out.append("V is not unimodular")
    for i in range(m):
        for j in range(n):
            if i != j and sf.D[i][j]:
                out.append("D is not diagonal")
                return out
    diag = sf.diagonal
    nz = [d for d in diag if d]
    if any(d < 0 for d in diag):
        out.append("negative diagonal entry")
    if any(b % a for a, b in zip(nz, nz[1:])):
        out.append("divisibility chain broken")
    if any(diag[i] == 0 and diag[i + 1] != 0 for i in range(len(diag) - 1)):
        out.append("zero before nonzero on the diagonal")
    return out


def rank_q(A: Matrix) -> int:
    """Rank over the rationals by plain Gaussian elimination."""
    M = [[Fraction(x) for x in row] for row in A]
    return _eliminate(M, lambda x: x != 0, lambda a, b: a / b)


def rank_mod_p(A: Matrix, p: int) -> int:
    M = [[x % p for x in row] for row in A]
    return _eliminate(M, lambda x: x % p != 0, lambda a, b: (a * pow(b, -1, p)) % p, p)


def _eliminate(M, nonzero, div, p: int | None = None) -> int:
    rows = len(M)
    cols = len(M[0]) if rows else 0
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if nonzero(M[i][c])), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        for i in range(r + 1, rows):
            if nonzero(M[i][c]):
                q = div(M[i][c], M[r][c])
                M[i] = [a - q * b for a, b in zip(M[i], M[r])]
                if p is not None:
                    M[i] = [a % p for a in M[i]]
        r += 1
        if r == rows:
            break
    return r
