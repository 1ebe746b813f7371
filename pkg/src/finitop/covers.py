"""LS-category and sequential topological complexity of maps by exact cover search.

Admissible open sets (those on which ``f`` is null-homotopic, or on which the
r coordinate maps ``x -> f(x_j)`` are pairwise homotopic) are closed under
taking open subsets, so every admissible down-set is reached from the empty
set by adding one point at a time through admissible down-sets.  The search
collects the maximal ones and solves exact set cover over them.
"""

from __future__ import annotations

import time
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import NamedTuple

from .errors import MissingWitness, SearchBudgetExceeded, ShapeError, SquareInvalid
from .finspace import FiniteSpace, OpenSet, ProductSpace, SpaceMap, bits, popcount, power
from .homotopy import FenceWitness, HomotopyEngine, default_engine


class NotConnected(ShapeError):
    pass


@dataclass(frozen=True)
class Budget:
    max_product_points: int = 16
    max_open_sets: int = 200_000
    time_limit: float | None = None

    def __post_init__(self):
        if self.max_product_points <= 0 or self.max_open_sets <= 0:
            raise ValueError("budgets must be positive")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time limit must be positive")


DEFAULT_BUDGET = Budget()


@dataclass
class Cover:
    """Open cover with one admissibility certificate per part.

    For ``kind == "cat"`` each witness is a fence from ``f|U`` to a constant.
    For ``kind == "tc"`` each witness is a tuple of ``r - 1`` fences, the j-th
    joining the coordinate maps ``x -> f(x_j)`` and ``x -> f(x_{j+1})`` on U.
    """

    space: FiniteSpace
    parts: list[OpenSet]
    witnesses: list
    kind: str
    f: SpaceMap
    r: int | None = None

    def __len__(self) -> int:
        return len(self.parts)

    def covers_space(self) -> bool:
        union = 0
        for p in self.parts:
            union |= p.mask
        return union == self.space.full_mask

    def validate(self) -> bool:
        if len(self.witnesses) != len(self.parts) or not self.covers_space():
            return False
        for part, wit in zip(self.parts, self.witnesses):
            if part.space != self.space or not self.space.is_open(part.mask):
                return False
            sub = part.as_space()
            if self.kind == "cat":
                start = _restrict_values(self.f, part.mask, sub)
                if not (wit.is_valid() and wit.start == start and wit.end.is_constant()):
                    return False
            else:
                coord = coordinate_maps(part, self.f, self.r, sub)
                if len(wit) != self.r - 1:
                    return False
                for j, fence in enumerate(wit):
                    if not (fence.is_valid() and fence.start == coord[j] and fence.end == coord[j + 1]):
                        return False
        return True

    def to_json(self) -> dict:
        def label(p):
            return list(p) if isinstance(p, tuple) else p

        out = {"kind": self.kind, "size": len(self.parts), "parts": []}
        if self.r is not None:
            out["r"] = self.r
        for part, wit in zip(self.parts, self.witnesses):
            members = [label(self.space.labels[i]) for i in bits(part.mask)]
            fences = [wit.to_json()] if self.kind == "cat" else [w.to_json() for w in wit]
            out["parts"].append({"members": members, "witnesses": fences})
        return out


class Invariant(NamedTuple):
    value: int
    cover: Cover


def _restrict_values(f: SpaceMap, mask: int, sub: FiniteSpace) -> SpaceMap:
    return SpaceMap(sub, f.codomain, tuple(f.assignment[i] for i in bits(mask)), check=False)


def coordinate_maps(U: OpenSet, f: SpaceMap, r: int, sub: FiniteSpace | None = None) -> list[SpaceMap]:
    """The maps ``x -> f(x_j)`` on a subset of the r-fold power of f's domain."""
    space = U.space
    if not isinstance(space, ProductSpace) or len(space.factors) != r or any(fac != f.domain for fac in space.factors):
        raise ShapeError(f"subset must live in the {r}-fold power of the map's domain")
    sub = sub if sub is not None else U.as_space()
    pts = list(bits(U.mask))
    return [
        SpaceMap(sub, f.codomain, tuple(f.assignment[space.coords[p][j]] for p in pts), check=False) for j in range(r)
    ]


# -- admissibility ----------------------------------------------------------


def cat_admissible(f: SpaceMap, mask: int, engine: HomotopyEngine | None = None) -> FenceWitness | None:
    """Fence from ``f|U`` to a constant, or None if ``f|U`` is essential."""
    engine = engine or default_engine()
    sub = f.domain.subspace(mask)
    res = engine.is_nullhomotopic(_restrict_values(f, mask, sub))
    return res.witness if res.holds else None


@dataclass(frozen=True)
class PlannerDecision:
    holds: bool
    witnesses: tuple[FenceWitness, ...] | None = None

    def __bool__(self) -> bool:
        return self.holds


def admits_planner(U: OpenSet, f: SpaceMap, r: int, engine: HomotopyEngine | None = None) -> PlannerDecision:
    """Decide whether the coordinate maps on U are homotopic, consecutive pairs only."""
    engine = engine or default_engine()
    if U.mask == 0:
        return PlannerDecision(True, ())
    coord = coordinate_maps(U, f, r)
    fences = []
    for j in range(r - 1):
        res = engine.are_homotopic(coord[j], coord[j + 1])
        if not res.holds:
            return PlannerDecision(False)
        fences.append(res.witness)
    return PlannerDecision(True, tuple(fences))


# -- exact cover search -----------------------------------------------------


class _Clock:
    def __init__(self, budget: Budget):
        self.deadline = None if budget.time_limit is None else time.monotonic() + budget.time_limit

    def expired(self) -> bool:
        return self.deadline is not None and time.monotonic() > self.deadline


def maximal_admissible(
    space: FiniteSpace,
    test: Callable[[int], object | None],
    budget: Budget = DEFAULT_BUDGET,
    bounds: tuple[int, int | None] = (0, None),
) -> tuple[list[int], dict[int, object]]:
    """Maximal admissible down-sets (sorted canonically) and all witnesses found.

    ``test(mask)`` returns a witness or None.  Growth goes one point at a
    time from the empty set, only through admissible down-sets.
    """
    clock = _Clock(budget)
    witness: dict[int, object] = {}
    rejected: set[int] = set()
    maximal = []
    stack = [0]
    seen = {0}
    evaluated = 0
    while stack:
        d = stack.pop()
        extended = False
        for x in range(space.n):
            if (d >> x) & 1 or space.down[x] & ~d != 1 << x:
                continue
            e = d | 1 << x
            if e in rejected:
                continue
            if e not in witness:
                evaluated += 1
                if evaluated > budget.max_open_sets or clock.expired():
                    raise SearchBudgetExceeded("admissible open-set enumeration over budget", *bounds)
                w = test(e)
                if w is None:
                    rejected.add(e)
                    continue
                witness[e] = w
            extended = True
            if e not in seen:
                seen.add(e)
                stack.append(e)
        if not extended and d:
            maximal.append(d)
    maximal.sort(key=lambda m: tuple(bits(m)))
    return maximal, witness


def exact_set_cover(universe: int, sets: Sequence[int], lower: int = 0) -> list[int] | None:
    """Indices of a minimum-size cover, lexicographically least among minima.

    Iterative deepening on the size; within a size, combinations are tried in
    lexicographic order with a capacity bound and memoized dead states.
    """
    if universe == 0:
        return []
    sets = [s & universe for s in sets]
    m = len(sets)
    suffix = [0] * (m + 1)
    for i in range(m - 1, -1, -1):
        suffix[i] = suffix[i + 1] | sets[i]
    if suffix[0] != universe:
        return None
    biggest = max(popcount(s) for s in sets)
    need = -(-popcount(universe) // biggest)
    for k in range(max(need, lower, 1), m + 1):
        dead: set[tuple[int, int, int]] = set()

        def dfs(start: int, uncovered: int, slots: int) -> list[int] | None:
            if uncovered == 0:
                return []
            if slots == 0 or suffix[start] & uncovered != uncovered:
                return None
            if -(-popcount(uncovered) // biggest) > slots:
                return None
            key = (start, uncovered, slots)
            if key in dead:
                return None
            for i in range(start, m):
                if not sets[i] & uncovered:
                    continue
                rest = dfs(i + 1, uncovered & ~sets[i], slots - 1)
                if rest is not None:
                    return [i] + rest
            dead.add(key)
            return None

        found = dfs(0, universe, k)
        if found is not None:
            return found
    return None


def _min_cover(space, test, budget, bounds):
    maximal, witness = maximal_admissible(space, test, budget, bounds)
    chosen = exact_set_cover(space.full_mask, maximal)
    if chosen is None:
        raise RuntimeError("admissible sets do not cover the space")  # singletons' neighbourhoods always do
    parts = [maximal[i] for i in chosen]
    return parts, [witness[p] for p in parts]


def cat_map(f: SpaceMap, engine: HomotopyEngine | None = None, budget: Budget = DEFAULT_BUDGET) -> Invariant:
    """Least n such that n + 1 open sets cover the domain with f null-homotopic on each."""
    X = f.domain
    if X.n == 0:
        raise ShapeError("cat of a map with empty domain")
    engine = engine or default_engine()
    upper = len(X.maximal_points()) - 1
    lower = _cat_lower_bound(f)
    parts, wits = _min_cover(X, lambda m: cat_admissible(f, m, engine), budget, (lower, upper))
    cover = Cover(X, [OpenSet(X, p, check=False) for p in parts], wits, "cat", f)
    return Invariant(len(parts) - 1, cover)


def cat_space(X: FiniteSpace, **kw) -> Invariant:
    return cat_map(X.identity(), **kw)


def tc_map(f: SpaceMap, r: int = 2, engine: HomotopyEngine | None = None, budget: Budget = DEFAULT_BUDGET) -> Invariant:
    """Least k such that k + 1 open sets of X^r each carry a sequential f-motion planner."""
    if r < 2:
        raise ValueError("r must be at least 2")
    X, Y = f.domain, f.codomain
    if X.n == 0 or not X.is_connected() or not Y.is_connected():
        raise NotConnected("sequential complexity needs connected domain and codomain")
    engine = engine or default_engine()
    upper = len(X.maximal_points()) ** r - 1
    lower = _tc_lower_bound(f, r)
    if X.n**r > budget.max_product_points:
        raise SearchBudgetExceeded(f"{X.n}^{r} product points exceed the budget", lower, upper)
    P = power(X, r)

    def test(mask):
        d = admits_planner(OpenSet(P, mask, check=False), f, r, engine)
        return d.witnesses if d.holds else None

    parts, wits = _min_cover(P, test, budget, (lower, upper))
    cover = Cover(P, [OpenSet(P, p, check=False) for p in parts], wits, "tc", f, r)
    return Invariant(len(parts) - 1, cover)


def tc_space(X: FiniteSpace, r: int = 2, **kw) -> Invariant:
    return tc_map(X.identity(), r, **kw)


def _cat_lower_bound(f: SpaceMap) -> int:
    if f.assignment != tuple(range(f.domain.n)) or f.domain != f.codomain:
        return 0
    from .chains import order_complex
    from .products import cup_length

    return cup_length(order_complex(f.domain), "Q")


def _tc_lower_bound(f: SpaceMap, r: int) -> int:
    if f.assignment != tuple(range(f.domain.n)) or f.domain != f.codomain:
        return 0
    from .chains import order_complex
    from .products import zero_divisor_cup_length

    return zero_divisor_cup_length(order_complex(f.domain), "Q", r)


# -- planners ---------------------------------------------------------------


@dataclass
class PlannerTable:
    """Discrete sequential f-motion planner on a subset U of X^r.

    ``entries[p]`` is a fence of codomain indices for product point ``p``;
    ``waypoints[j]`` is the position where every entry must read ``f(x_j)``.
    Entries share one length and one pattern, so the table is a map
    ``U x J -> Y`` for a zigzag interval model J.
    """

    subset: OpenSet
    f: SpaceMap
    r: int
    waypoints: tuple[int, ...]
    entries: dict[int, tuple[int, ...]] = field(default_factory=dict)

    def entry(self, point) -> list:
        """Fence of codomain labels for a product point given by label."""
        Y = self.f.codomain
        return [Y.labels[v] for v in self.entries[self.subset.space.index[point]]]

    def violations(self) -> list[str]:
        P: ProductSpace = self.subset.space
        Y = self.f.codomain
        out = []
        if set(self.entries) != set(bits(self.subset.mask)):
            out.append("entries do not match the subset")
            return out
        lengths = {len(e) for e in self.entries.values()}
        for p, e in self.entries.items():
            for j, w in enumerate(self.waypoints):
                if w >= len(e) or e[w] != self.f.assignment[P.coords[p][j]]:
                    out.append(f"waypoint {j} missed at {P.labels[p]!r}")
            for a, b in zip(e, e[1:]):
                if not Y.comparable(a, b):
                    out.append(f"incomparable consecutive points at {P.labels[p]!r}")
        if len(lengths) == 1:
            for a, b in P.hasse():
                if (self.subset.mask >> b) & 1:
                    ea, eb = self.entries[a], self.entries[b]
                    if not all(Y.leq(u, v) for u, v in zip(ea, eb)):
                        out.append(f"not continuous across {P.labels[a]!r} < {P.labels[b]!r}")
        elif self.entries:
            out.append("entries differ in length")
        return out

    def is_valid(self) -> bool:
        return not self.violations()


def extract_planner(U: OpenSet, f: SpaceMap, r: int, witnesses: Sequence[FenceWitness] | None) -> PlannerTable:
    """Evaluate the consecutive-coordinate fences pointwise and concatenate them."""
    if U.mask == 0:
        return PlannerTable(U, f, r, tuple(range(r)), {})
    if witnesses is None or len(witnesses) != r - 1:
        raise MissingWitness(f"need {r - 1} fences, one per consecutive coordinate pair")
    pts = list(bits(U.mask))
    waypoints = [0]
    for fence in witnesses:
        waypoints.append(waypoints[-1] + len(fence) - 1)
    entries = {}
    for k, p in enumerate(pts):
        path = [witnesses[0].steps[0].assignment[k]] if witnesses else [f.assignment[U.space.coords[p][0]]]
        for fence in witnesses:
            path.extend(h.assignment[k] for h in fence.steps[1:])
        entries[p] = tuple(path)
    return PlannerTable(U, f, r, tuple(waypoints), entries)


def search_planner(U: OpenSet, f: SpaceMap, r: int, max_length: int = 8) -> PlannerTable | None:
    """Look for a continuous planner ``U x J -> Y`` directly, with no homotopy engine.

    J ranges over zigzag intervals of length up to ``max_length`` (both
    starting directions) with waypoints evenly spaced.  The search treats
    every pair (point of U, time in J) as a variable with values in Y and
    solves the order constraints of the product poset U x J by arc
    consistency plus branching.  A planner on a shorter zigzag pads to a
    longer one, so a None answer means no planner of length
    ``<= max_length`` exists.
    """
    P: ProductSpace = U.space
    Y = f.codomain
    pts = list(bits(U.mask))
    if not pts:
        return PlannerTable(U, f, r, tuple(range(r)), {})
    local = {p: k for k, p in enumerate(pts)}
    covers = [(local[a], local[b]) for a, b in P.hasse() if a in local and b in local]
    ends = [[f.assignment[P.coords[p][j]] for j in range(r)] for p in pts]
    for L in range(r - 1, max_length + 1, r - 1):
        wp = [j * L // (r - 1) for j in range(r)]
        for first_up in (True, False):
            ups = [(t % 2 == 0) == first_up for t in range(L)]
            table = _planner_csp(Y, len(pts), covers, ends, wp, ups)
            if table is not None:
                entries = {pts[k]: table[k] for k in range(len(pts))}
                return PlannerTable(U, f, r, tuple(wp), entries)
    return None


def _planner_csp(Y, npts, covers, ends, wp, ups):
    """Order-preserving map from (points x zigzag) to Y with pinned waypoints, or None."""
    L = len(ups)
    T = L + 1
    nvar = npts * T
    full = Y.full_mask
    # edges (lo, hi): value(lo) <= value(hi)
    edges = []
    for a, b in covers:
        for t in range(T):
            edges.append((a * T + t, b * T + t))
    for k in range(npts):
        for t, up in enumerate(ups):
            u, v = k * T + t, k * T + t + 1
            edges.append((u, v) if up else (v, u))
    above = [[] for _ in range(nvar)]
    below = [[] for _ in range(nvar)]
    for lo, hi in edges:
        above[lo].append(hi)
        below[hi].append(lo)
    dom = [full] * nvar
    for k in range(npts):
        for j, t in enumerate(wp):
            dom[k * T + t] &= 1 << ends[k][j]
    up_of = Y.up
    down_of = Y.down

    def ups_of(mask):
        out = 0
        for y in bits(mask):
            out |= up_of[y]
        return out

    def downs_of(mask):
        out = 0
        for y in bits(mask):
            out |= down_of[y]
        return out

    def propagate(dom, queue):
        while queue:
            v = queue.pop()
            if not dom[v]:
                return False
            reach_up = ups_of(dom[v])
            for w in above[v]:
                nd = dom[w] & reach_up
                if nd != dom[w]:
                    if not nd:
                        return False
                    dom[w] = nd
                    queue.append(w)
            reach_down = downs_of(dom[v])
            for w in below[v]:
                nd = dom[w] & reach_down
                if nd != dom[w]:
                    if not nd:
                        return False
                    dom[w] = nd
                    queue.append(w)
        return True

    def solve(dom):
        if not propagate(dom, list(range(nvar))):
            return None
        return branch(dom)

    def branch(dom):
        best, size = None, 0
        for v in range(nvar):
            c = popcount(dom[v])
            if c > 1 and (best is None or c < size):
                best, size = v, c
        if best is None:
            return dom
        for y in bits(dom[best]):
            trial = list(dom)
            trial[best] = 1 << y
            if propagate(trial, [best]):
                got = branch(trial)
                if got is not None:
                    return got
        return None

    sol = solve(dom)
    if sol is None:
        return None
    return [tuple(sol[k * T + t].bit_length() - 1 for t in range(T)) for k in range(npts)]


# -- transport along retraction squares -------------------------------------


def restrict_cover(cover: Cover, square) -> Cover:
    """Intersect every part with X' (or X'^r) and push every fence step through r_Y.

    ``square`` needs attributes ``f, f_prime, r_X, r_Y``; it is checked to
    commute first.
    """
    from .retracts import verify_square

    check = verify_square(square)
    if not check.holds:
        raise SquareInvalid(f"square does not commute at {check.point!r}")
    if cover.f != square.f:
        raise SquareInvalid("cover was computed for a different map")
    fp, rY = square.f_prime, square.r_Y
    Xp = fp.domain
    if cover.kind == "cat":
        new_space = Xp
        keep = [cover.space.index[lab] for lab in Xp.labels]
    else:
        new_space = power(Xp, cover.r)
        keep = [cover.space.index[lab] for lab in new_space.labels]
    parts, wits = [], []
    for part, wit in zip(cover.parts, cover.witnesses):
        new_mask = 0
        local = []  # positions inside the old part's subspace
        old_pos = {p: k for k, p in enumerate(bits(part.mask))}
        for i, old in enumerate(keep):
            if (part.mask >> old) & 1:
                new_mask |= 1 << i
                local.append(old_pos[old])
        if not new_mask:
            continue
        sub = new_space.subspace(new_mask)

        def transport(fence: FenceWitness) -> FenceWitness:
            return FenceWitness(
                tuple(SpaceMap(sub, rY.codomain, tuple(rY.assignment[h.assignment[k]] for k in local), check=False) for h in fence.steps)
            )

        parts.append(OpenSet(new_space, new_mask, check=False))
        wits.append(transport(wit) if cover.kind == "cat" else tuple(transport(w) for w in wit))
    return Cover(new_space, parts, wits, cover.kind, fp, cover.r)
