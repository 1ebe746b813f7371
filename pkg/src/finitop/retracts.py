"""Retractions, commuting retraction squares, and the monotonicity audit.

A square is ``f: X -> Y`` over ``f': X' -> Y'`` with retractions
``r_X: X -> X'`` and ``r_Y: Y -> Y'`` such that ``f' . r_X == r_Y . f``.
X' and Y' are induced subspaces and ``f'`` is the restriction of ``f``.
"""

from __future__ import annotations

import os
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .errors import ComponentInvalid, ImageError, SearchBudgetExceeded, SubspaceError
from .finspace import FiniteSpace, SpaceMap, all_maps, bits, is_continuous, is_subspace, restrict_map
from .homotopy import is_contractible


@dataclass(frozen=True)
class RetractionSquare:
    f: SpaceMap
    f_prime: SpaceMap
    r_X: SpaceMap
    r_Y: SpaceMap

    @property
    def X(self) -> FiniteSpace:
        return self.f.domain

    @property
    def Y(self) -> FiniteSpace:
        return self.f.codomain

    @property
    def X_prime(self) -> FiniteSpace:
        return self.f_prime.domain

    @property
    def Y_prime(self) -> FiniteSpace:
        return self.f_prime.codomain

    def to_json(self) -> dict:
        return {
            "X_prime": list(self.X_prime.labels),
            "Y_prime": list(self.Y_prime.labels),
            "f": self.f.as_dict(),
            "r_X": self.r_X.as_dict(),
            "r_Y": self.r_Y.as_dict(),
        }


def is_retraction(r: SpaceMap, X: FiniteSpace, X_prime: FiniteSpace) -> bool:
    """Continuous map ``X -> X'`` fixing every point of X'."""
    if not is_subspace(X_prime, X):
        raise SubspaceError("X' is not an induced subspace of X")
    if r.domain != X or r.codomain != X_prime:
        return False
    if not is_continuous(X, X_prime, r.assignment):
        return False
    return all(r.assignment[X.index[lab]] == i for i, lab in enumerate(X_prime.labels))


def enumerate_retractions(X: FiniteSpace, X_prime: FiniteSpace) -> list[SpaceMap]:
    if not is_subspace(X_prime, X):
        raise SubspaceError("X' is not an induced subspace of X")
    pins = {X.index[lab]: i for i, lab in enumerate(X_prime.labels)}
    return [SpaceMap(X, X_prime, a, check=False) for a in all_maps(X, X_prime, pins)]


@dataclass(frozen=True)
class SquareCheck:
    holds: bool
    point: object = None

    def __bool__(self) -> bool:
        return self.holds


def component_problems(square: RetractionSquare) -> list[str]:
    out = []
    X, Y, Xp, Yp = square.X, square.Y, square.X_prime, square.Y_prime
    if not is_subspace(Xp, X):
        out.append("X' is not an induced subspace of X")
    if not is_subspace(Yp, Y):
        out.append("Y' is not an induced subspace of Y")
    if out:
        return out
    for name, m in (("f", square.f), ("f'", square.f_prime), ("r_X", square.r_X), ("r_Y", square.r_Y)):
        if not is_continuous(m.domain, m.codomain, m.assignment):
            out.append(f"{name} is not continuous")
    if not is_retraction(square.r_X, X, Xp):
        out.append("r_X is not a retraction onto X'")
    if not is_retraction(square.r_Y, Y, Yp):
        out.append("r_Y is not a retraction onto Y'")
    try:
        if restrict_map(square.f, Xp, Yp) != square.f_prime:
            out.append("f' is not the restriction of f")
    except ImageError:
        out.append("f(X') is not contained in Y'")
    return out


def verify_square(square: RetractionSquare) -> SquareCheck:
    """Check ``r_Y . f == f' . r_X`` pointwise; report the first failing point of X."""
    problems = component_problems(square)
    if problems:
        raise ComponentInvalid("; ".join(problems))
    left = square.r_Y.compose(square.f).assignment
    right = square.f_prime.compose(square.r_X).assignment
    for i, (a, b) in enumerate(zip(left, right)):
        if a != b:
            return SquareCheck(False, square.X.labels[i])
    return SquareCheck(True)


def enumerate_squares(f: SpaceMap, X_prime: FiniteSpace, Y_prime: FiniteSpace) -> list[RetractionSquare]:
    f_prime = restrict_map(f, X_prime, Y_prime)  # raises ImageError
    rys = enumerate_retractions(f.codomain, Y_prime)
    out = []
    for rx in enumerate_retractions(f.domain, X_prime):
        need = f_prime.compose(rx).assignment
        for ry in rys:
            if all(ry.assignment[v] == w for v, w in zip(f.assignment, need)):
                out.append(RetractionSquare(f, f_prime, rx, ry))
    return out


# -- audit ------------------------------------------------------------------


@dataclass
class AuditReport:
    corpus: dict
    invariants: list[str]
    records: list[dict] = field(default_factory=list)
    counterexamples: list[dict] = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def tally(self) -> None:
        status = {}
        for rec in self.records:
            status[rec["status"]] = status.get(rec["status"], 0) + 1
        self.summary = {
            "instances": len(self.records),
            "squares": sum(rec["squares"] for rec in self.records),
            "status": dict(sorted(status.items())),
            "violations": status.get("violation", 0),
            "restricted_covers_checked": sum(rec["restricted_checked"] for rec in self.records),
            "restricted_covers_invalid": sum(rec["restricted_invalid"] for rec in self.records),
        }

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def to_json(self) -> dict:
        return {
            "corpus": self.corpus,
            "invariants": self.invariants,
            "summary": self.summary,
            "counterexamples": self.counterexamples,
            "records": self.records,
        }


def _subspace_retracts(X: FiniteSpace) -> list[tuple[int, FiniteSpace, list[SpaceMap]]]:
    out = []
    for mask in range(1, 1 << X.n):
        sub = X.subspace(mask)
        rets = enumerate_retractions(X, sub)
        if rets:
            out.append((mask, sub, rets))
    return out


def _instance_invariants(invariants: Sequence[str]) -> list[tuple[str, int | None]]:
    out = []
    for inv in invariants:
        if inv == "cat":
            out.append(("cat", None))
        elif inv.startswith("tc"):
            out.append((inv, int(inv[2:])))
        else:
            raise ValueError(f"unknown invariant {inv!r}")
    return out


def _audit_domain(args) -> list[dict]:
    xi, corpus, invariants, budget = args
    from .covers import admits_planner, cat_map, restrict_cover, tc_map

    X = corpus[xi]
    cache: dict = {}

    def value(inv, r, f):
        key = (inv, f.key())
        if key not in cache:
            try:
                cache[key] = cat_map(f, budget=budget) if r is None else tc_map(f, r, budget=budget)
            except SearchBudgetExceeded as exc:
                cache[key] = exc
        return cache[key]

    invs = _instance_invariants(invariants)
    x_subs = _subspace_retracts(X)
    records = []
    for yi, Y in enumerate(corpus):
        y_subs = _subspace_retracts(Y)
        for assignment in all_maps(X, Y):
            f = SpaceMap(X, Y, assignment, check=False)
            for xmask, Xp, rxs in x_subs:
                img = f.image_mask(xmask)
                for ymask, Yp, rys in y_subs:
                    if img & ~ymask:
                        continue
                    fp = restrict_map(f, Xp, Yp)
                    squares = []
                    for rx in rxs:
                        need = fp.compose(rx).assignment
                        for ry in rys:
                            if all(ry.assignment[v] == w for v, w in zip(assignment, need)):
                                squares.append(RetractionSquare(f, fp, rx, ry))
                    if not squares:
                        continue
                    rec = {
                        "X": xi,
                        "Y": yi,
                        "f": list(assignment),
                        "X_prime": list(Xp.labels),
                        "Y_prime": list(Yp.labels),
                        "squares": len(squares),
                        "values": {},
                        "restricted_checked": 0,
                        "restricted_invalid": 0,
                    }
                    status = "ok"
                    for name, r in invs:
                        big, small = value(name, r, f), value(name, r, fp)
                        if isinstance(big, Exception) or isinstance(small, Exception):
                            rec["values"][name] = None
                            status = "budget" if status == "ok" else status
                            continue
                        rec["values"][name] = [big.value, small.value]
                        if small.value > big.value:
                            status = "violation"
                        for sq in squares:
                            restricted = restrict_cover(big.cover, sq)
                            good = restricted.validate() and len(restricted) <= len(big.cover)
                            if good and r is not None:
                                good = all(admits_planner(p, fp, r).holds for p in restricted.parts)
                            rec["restricted_checked"] += 1
                            if not good:
                                rec["restricted_invalid"] += 1
                                status = "violation"
                    rec["status"] = status
                    records.append(rec)
    return records


def audit_monotonicity(
    corpus: Sequence[FiniteSpace],
    invariants: Sequence[str] = ("cat",),
    descriptor: dict | None = None,
    jobs: int = 1,
    budget=None,
) -> AuditReport:
    """Check ``inv(f') <= inv(f)`` over every commuting square on the corpus.

    X and Y range over ``corpus``; f over all continuous maps; X', Y' over
    all retracts.  Invariants are ``"cat"`` or ``"tc<r>"``.  Restricted
    witness covers are re-validated for every square.  Violations and
    budget overruns are recorded, never raised.
    """
    from .covers import DEFAULT_BUDGET

    budget = budget or DEFAULT_BUDGET
    _instance_invariants(invariants)
    corpus = list(corpus)
    tasks = [(i, corpus, list(invariants), budget) for i in range(len(corpus))]
    if jobs <= 1 or len(tasks) <= 1:
        chunks = [_audit_domain(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_audit_domain, tasks))
    records = [rec for chunk in chunks for rec in chunk]
    records.sort(key=lambda r: (r["X"], r["Y"], r["f"], r["X_prime"], r["Y_prime"]))
    report = AuditReport(descriptor or {"spaces": len(corpus)}, list(invariants), records)
    report.counterexamples = [r for r in records if r["status"] == "violation"]
    report.tally()
    return report


def audit_contractible_retracts(corpus: Sequence[FiniteSpace]) -> list[dict]:
    """Retracts of contractible spaces that fail to be contractible (expected: none)."""
    bad = []
    for xi, X in enumerate(corpus):
        if not is_contractible(X):
            continue
        for mask, sub, rets in _subspace_retracts(X):
            if not is_contractible(sub):
                bad.append({"X": xi, "X_prime": list(sub.labels), "retractions": len(rets)})
    return bad


def default_jobs() -> int:
    return os.cpu_count() or 1


