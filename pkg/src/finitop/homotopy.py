"""Homotopy of maps between finite spaces, with fence certificates.

Two maps ``f, g: X -> Y`` of finite spaces are homotopic exactly when they
are joined by a fence ``f = h_0, h_1, ..., h_k = g`` of continuous maps with
each consecutive pair comparable in the pointwise order.  If ``f <= g`` one
can always walk from ``f`` to ``g`` changing a single point at a time (move a
maximal point where they differ), so breadth-first search over one-point
moves decides homotopy; the full comparability graph is kept as a
cross-check.

Queries are first pushed down to the cores of domain and codomain: with
``i, r`` the core inclusion/retraction pairs, ``f ~ g`` iff
``r_Y f i_X ~ r_Y g i_X``, and fences found there lift back by ``i_Y . - . r_X``.
"""

from __future__ import annotations

import threading
from collections import OrderedDict, deque
from collections.abc import Callable, Sequence
from dataclasses import dataclass

from .errors import ContinuityError, DomainMismatch, EmptyDomain, ShapeError
from .finspace import FiniteSpace, SpaceMap, all_maps, bits, is_continuous

Assignment = tuple[int, ...]


@dataclass(frozen=True)
class FenceWitness:
    """A sequence of pairwise-comparable continuous maps, all with the same domain and codomain."""

    steps: tuple[SpaceMap, ...]

    def __post_init__(self):
        if not self.steps:
            raise ShapeError("a fence needs at least one step")

    @property
    def start(self) -> SpaceMap:
        return self.steps[0]

    @property
    def end(self) -> SpaceMap:
        return self.steps[-1]

    def __len__(self) -> int:
        return len(self.steps)

    def reversed(self) -> FenceWitness:
        return FenceWitness(tuple(reversed(self.steps)))

    def then(self, other: FenceWitness) -> FenceWitness:
        if self.end != other.start:
            raise ShapeError("fences do not meet")
        return FenceWitness(self.steps + other.steps[1:])

    def post_compose(self, outer: SpaceMap) -> FenceWitness:
        return FenceWitness(tuple(outer.compose(h) for h in self.steps))

    def pre_compose(self, inner: SpaceMap) -> FenceWitness:
        return FenceWitness(tuple(h.compose(inner) for h in self.steps))

    def directions(self) -> list[str]:
        out = []
        for a, b in zip(self.steps, self.steps[1:]):
            out.append("<=" if a.leq(b) else ">=")
        return out

    def is_valid(self) -> bool:
        first = self.steps[0]
        for h in self.steps:
            if h.domain != first.domain or h.codomain != first.codomain:
                return False
            if not is_continuous(h.domain, h.codomain, h.assignment):
                return False
        return all(a.comparable(b) for a, b in zip(self.steps, self.steps[1:]))

    def validate(self) -> None:
        if not self.is_valid():
            raise ContinuityError("fence has a discontinuous step or an incomparable consecutive pair")

    def to_json(self) -> dict:
        dom = self.start.domain
        cod = self.start.codomain
        return {
            "points": [_jsonable(p) for p in dom.labels],
            "steps": [[_jsonable(cod.labels[v]) for v in h.assignment] for h in self.steps],
        }


def _jsonable(label):
    if isinstance(label, tuple):
        return [_jsonable(x) for x in label]
    return label


def _dedupe(steps: Sequence[SpaceMap]) -> tuple[SpaceMap, ...]:
    out: list[SpaceMap] = []
    for h in steps:
        if not out or out[-1].assignment != h.assignment:
            out.append(h)
    return tuple(out)


# -- cores ------------------------------------------------------------------


@dataclass(frozen=True)
class CoreResult:
    """A core of ``space`` with the maps exhibiting it as a strong deformation retract.

    ``fence`` runs from the identity of ``space`` to ``inclusion . retraction``.
    """

    core: FiniteSpace
    retraction: SpaceMap
    inclusion: SpaceMap
    fence: FenceWitness
    removed: tuple


def beat_point(space: FiniteSpace, alive: int, x: int) -> int | None:
    """If ``x`` is a beat point of the subspace ``alive``, the point it collapses onto."""
    below = space.down[x] & alive & ~(1 << x)
    if below:
        # strict down-set has a maximum m iff below == down(m) & alive for some m in below
        for m in bits(below):
            if space.down[m] & alive == below:
                return m
    above = space.up[x] & alive & ~(1 << x)
    if above:
        for m in bits(above):
            if space.up[m] & alive == above:
                return m
    return None


def compute_core(space: FiniteSpace) -> CoreResult:
    """Remove beat points one at a time, least index first, until none remain."""
    alive = space.full_mask
    current = list(range(space.n))  # current retraction as a self-map
    steps = [tuple(current)]
    removed = []
    changed = True
    while changed:
        changed = False
        for x in bits(alive):
            target = beat_point(space, alive, x)
            if target is None:
                continue
            alive &= ~(1 << x)
            current = [target if v == x else v for v in current]
            steps.append(tuple(current))
            removed.append(space.labels[x])
            changed = True
            break
    core = space.subspace(alive)
    pos = {old: new for new, old in enumerate(bits(alive))}
    retraction = SpaceMap(space, core, tuple(pos[v] for v in current), check=False)
    incl = SpaceMap(core, space, tuple(bits(alive)), check=False)
    fence = FenceWitness(tuple(SpaceMap(space, space, s, check=False) for s in steps))
    return CoreResult(core, retraction, incl, fence, tuple(removed))


# -- search -----------------------------------------------------------------


def _one_point_moves(dom: FiniteSpace, cod: FiniteSpace) -> Callable[[Assignment], list[Assignment]]:
    strict_down = [list(bits(dom.down[x] & ~(1 << x))) for x in range(dom.n)]
    strict_up = [list(bits(dom.up[x] & ~(1 << x))) for x in range(dom.n)]
    cdown, cup, full = cod.down, cod.up, cod.full_mask

    def neighbours(h: Assignment) -> list[Assignment]:
        out = []
        for x in range(dom.n):
            hx = h[x]
            allowed = (cup[hx] | cdown[hx]) & ~(1 << hx)
            if not allowed:
                continue
            lo = full
            for z in strict_down[x]:
                lo &= cup[h[z]]
            hi = full
            for z in strict_up[x]:
                hi &= cdown[h[z]]
            allowed &= lo & hi
            for v in bits(allowed):
                out.append(h[:x] + (v,) + h[x + 1 :])
        return out

    return neighbours


def _full_adjacency(dom: FiniteSpace, cod: FiniteSpace) -> Callable[[Assignment], list[Assignment]]:
    maps = list(all_maps(dom, cod))

    def leq(a: Assignment, b: Assignment) -> bool:
        return all(cod.leq(x, y) for x, y in zip(a, b))

    adj = {m: [] for m in maps}
    for i, a in enumerate(maps):
        for b in maps[i + 1 :]:
            if leq(a, b) or leq(b, a):
                adj[a].append(b)
                adj[b].append(a)
    return lambda h: adj[h]


def _bfs(start: Assignment, is_target: Callable[[Assignment], bool], neighbours) -> list[Assignment] | None:
    if is_target(start):
        return [start]
    parent: dict[Assignment, Assignment | None] = {start: None}
    queue = deque([start])
    while queue:
        h = queue.popleft()
        for k in neighbours(h):
            if k in parent:
                continue
            parent[k] = h
            if is_target(k):
                path = [k]
                while parent[path[-1]] is not None:
                    path.append(parent[path[-1]])
                return path[::-1]
            queue.append(k)
    return None


def _point_path(space: FiniteSpace, a: int, b: int) -> list[int] | None:
    """Shortest comparability path between two points."""
    parent = {a: None}
    queue = deque([a])
    while queue:
        x = queue.popleft()
        if x == b:
            path = [x]
            while parent[path[-1]] is not None:
                path.append(parent[path[-1]])
            return path[::-1]
        for y in bits((space.down[x] | space.up[x]) & ~(1 << x)):
            if y not in parent:
                parent[y] = x
                queue.append(y)
    return None


@dataclass(frozen=True)
class HomotopyResult:
    holds: bool
    witness: FenceWitness | None = None

    def __bool__(self) -> bool:
        return self.holds


class _LRU:
    def __init__(self, maxsize: int):
        self.maxsize = maxsize
        self.data: OrderedDict = OrderedDict()
        self.lock = threading.Lock()

    def get(self, key):
        with self.lock:
            try:
                self.data.move_to_end(key)
                return self.data[key]
            except KeyError:
                return None

    def put(self, key, value):
        with self.lock:
            self.data[key] = value
            self.data.move_to_end(key)
            while len(self.data) > self.maxsize:
                self.data.popitem(last=False)


class HomotopyEngine:
    """Homotopy decisions with a bounded LRU memo.

    ``mode`` is ``"fast"`` (one-point moves) or ``"full"`` (all comparable
    pairs); ``reduce`` toggles the core reduction.  Both settings give the
    same decisions; the non-default ones exist for cross-validation.
    """

    def __init__(self, mode: str = "fast", reduce: bool = True, cache_size: int = 200_000):
        if mode not in ("fast", "full"):
            raise ValueError(f"unknown mode {mode!r}")
        self.mode = mode
        self.reduce = reduce
        self._memo = _LRU(cache_size)
        self._cores = _LRU(max(1024, cache_size // 10))

    def core(self, space: FiniteSpace) -> CoreResult:
        hit = self._cores.get(space.key)
        if hit is None:
            hit = compute_core(space)
            self._cores.put(space.key, hit)
        return hit

    def _neighbours(self, dom: FiniteSpace, cod: FiniteSpace):
        if self.mode == "fast":
            return _one_point_moves(dom, cod)
        return _full_adjacency(dom, cod)

    def _reduction(self, dom: FiniteSpace, cod: FiniteSpace):
        if not self.reduce:
            ident_d, ident_c = dom.identity(), cod.identity()
            trivial_d = CoreResult(dom, ident_d, ident_d, FenceWitness((ident_d,)), ())
            trivial_c = CoreResult(cod, ident_c, ident_c, FenceWitness((ident_c,)), ())
            return trivial_d, trivial_c
        return self.core(dom), self.core(cod)

    def _to_core(self, f: SpaceMap, cd: CoreResult, cc: CoreResult) -> SpaceMap:
        return cc.retraction.compose(f).compose(cd.inclusion)

    def _lift_in(self, f: SpaceMap, cd: CoreResult, cc: CoreResult) -> list[SpaceMap]:
        """Fence from ``f`` to ``i_Y r_Y f i_X r_X``."""
        left = [f.compose(h) for h in cd.fence.steps]
        g = left[-1]
        right = [h.compose(g) for h in cc.fence.steps]
        return left + right[1:]

    def are_homotopic(self, f: SpaceMap, g: SpaceMap) -> HomotopyResult:
        if f.domain != g.domain or f.codomain != g.codomain:
            raise DomainMismatch("maps must share domain and codomain")
        key = ("h", f.domain.key, f.codomain.key, f.assignment, g.assignment)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        result = self._are_homotopic(f, g)
        self._memo.put(key, result)
        return result

    def _are_homotopic(self, f: SpaceMap, g: SpaceMap) -> HomotopyResult:
        if f.assignment == g.assignment:
            return HomotopyResult(True, FenceWitness((f,)))
        if f.leq(g) or g.leq(f):
            return HomotopyResult(True, FenceWitness((f, g)))
        dom, cod = f.domain, f.codomain
        cd, cc = self._reduction(dom, cod)
        fr, gr = self._to_core(f, cd, cc), self._to_core(g, cd, cc)
        target = gr.assignment
        path = _bfs(fr.assignment, lambda h: h == target, self._neighbours(cd.core, cc.core))
        if path is None:
            return HomotopyResult(False)
        middle = [cc.inclusion.compose(SpaceMap(cd.core, cc.core, h, check=False)).compose(cd.retraction) for h in path]
        steps = self._lift_in(f, cd, cc) + middle + self._lift_in(g, cd, cc)[::-1]
        return HomotopyResult(True, FenceWitness(_dedupe(steps)))

    def is_nullhomotopic(self, f: SpaceMap) -> HomotopyResult:
        """Homotopic to a constant map; the witness ends at the constant on the
        least-indexed point of the relevant codomain component."""
        if f.domain.n == 0:
            raise EmptyDomain("null-homotopy needs a nonempty domain")
        key = ("n", f.domain.key, f.codomain.key, f.assignment)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        result = self._is_nullhomotopic(f)
        self._memo.put(key, result)
        return result

    def _is_nullhomotopic(self, f: SpaceMap) -> HomotopyResult:
        dom, cod = f.domain, f.codomain
        image = f.image_mask()
        comps = [c for c in cod.component_masks() if c & image]
        if len(comps) > 1:
            # a fence keeps each domain component's image inside one codomain component
            return HomotopyResult(False)
        rep = next(bits(comps[0]))
        steps: list[SpaceMap] | None = None
        for y in range(cod.n):
            if image & ~cod.down[y] == 0 or image & ~cod.up[y] == 0:
                steps = [f, dom.constant(cod, y)]
                break
        if steps is None:
            cd, cc = self._reduction(dom, cod)
            fr = self._to_core(f, cd, cc)
            path = _bfs(fr.assignment, lambda h: len(set(h)) == 1, self._neighbours(cd.core, cc.core))
            if path is None:
                return HomotopyResult(False)
            middle = [
                cc.inclusion.compose(SpaceMap(cd.core, cc.core, h, check=False)).compose(cd.retraction) for h in path
            ]
            steps = self._lift_in(f, cd, cc) + middle
        reached = steps[-1].assignment[0]
        walk = _point_path(cod, reached, rep)
        steps += [dom.constant(cod, y) for y in walk[1:]]
        return HomotopyResult(True, FenceWitness(_dedupe(steps)))

    def is_contractible(self, space: FiniteSpace) -> bool:
        return self.core(space).core.n == 1


_default = HomotopyEngine()


def default_engine() -> HomotopyEngine:
    return _default


def are_homotopic(f: SpaceMap, g: SpaceMap, engine: HomotopyEngine | None = None) -> HomotopyResult:
    return (engine or _default).are_homotopic(f, g)


def is_nullhomotopic(f: SpaceMap, engine: HomotopyEngine | None = None) -> HomotopyResult:
    return (engine or _default).is_nullhomotopic(f)


def core(space: FiniteSpace) -> CoreResult:
    return _default.core(space)


def is_contractible(space: FiniteSpace) -> bool:
    """A finite space is contractible iff its core is a single point."""
    if space.n == 0:
        return False
    return _default.is_contractible(space)


def homotopy_classes(dom: FiniteSpace, cod: FiniteSpace) -> list[list[Assignment]]:
    """Partition of all continuous maps into fence classes (full adjacency; small spaces only)."""
    maps = list(all_maps(dom, cod))
    neigh = _full_adjacency(dom, cod)
    seen: set[Assignment] = set()
    classes = []
    for m in maps:
        if m in seen:
            continue
        comp = [m]
        seen.add(m)
        queue = deque([m])
        while queue:
            h = queue.popleft()
            for k in neigh(h):
                if k not in seen:
                    seen.add(k)
                    comp.append(k)
                    queue.append(k)
        classes.append(sorted(comp))
    return classes
