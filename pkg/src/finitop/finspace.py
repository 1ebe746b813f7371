"""Finite posets viewed as finite (Alexandrov) topological spaces.

Open sets are the down-sets of the order, so the minimal open neighbourhood
of ``x`` is ``down(x) = {y : y <= x}`` and continuous maps are exactly the
order-preserving ones.  Points are addressed by index internally; subsets of
points are int bitmasks.  Labels are arbitrary hashable values and are what
relates a subspace to its ambient space.
"""

from __future__ import annotations

import itertools
from collections.abc import Hashable, Iterable, Iterator, Mapping, Sequence
from functools import lru_cache
from typing import Any

from .errors import ContinuityError, CycleError, ImageError, ShapeError, SubspaceError


def bits(mask: int) -> Iterator[int]:
    """Indices of the set bits of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask: int) -> int:
    return bin(mask).count("1")


class FiniteSpace:
    """A finite T0 space, stored as its specialization order.

    Build one with :func:`validate_space` or :meth:`from_covers`; the bare
    constructor trusts its ``down`` masks.
    """

    __slots__ = ("labels", "n", "down", "up", "index", "key", "_hasse", "_components", "__weakref__")

    def __init__(self, labels: Sequence[Hashable], down: Sequence[int]):
        self.labels = tuple(labels)
        self.n = len(self.labels)
        self.down = tuple(down)
        up = [0] * self.n
        for b in range(self.n):
            for a in bits(self.down[b]):
                up[a] |= 1 << b
        self.up = tuple(up)
        self.index = {lab: i for i, lab in enumerate(self.labels)}
        if len(self.index) != self.n:
            raise ShapeError("point labels must be distinct")
        self.key = (self.labels, self.down)
        self._hasse: tuple[tuple[int, int], ...] | None = None
        self._components: tuple[int, ...] | None = None

    # -- construction -----------------------------------------------------

    @classmethod
    def from_covers(cls, labels: Sequence[Hashable], covers: Iterable[tuple[Hashable, Hashable]]) -> FiniteSpace:
        """Space generated by covering pairs ``(a, b)`` meaning ``a < b``."""
        labels = list(labels)
        idx = {lab: i for i, lab in enumerate(labels)}
        n = len(labels)
        matrix = [[i == j for j in range(n)] for i in range(n)]
        for a, b in covers:
            if a not in idx or b not in idx:
                raise ShapeError(f"cover ({a!r}, {b!r}) names an unknown point")
            matrix[idx[a]][idx[b]] = True
        return validate_space(labels, matrix)

    # -- order queries ----------------------------------------------------

    def leq(self, a: int, b: int) -> bool:
        return bool((self.down[b] >> a) & 1)

    def comparable(self, a: int, b: int) -> bool:
        return bool(((self.down[b] | self.up[b]) >> a) & 1)

    @property
    def leq_matrix(self) -> tuple[tuple[bool, ...], ...]:
        return tuple(tuple(self.leq(a, b) for b in range(self.n)) for a in range(self.n))

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def hasse(self) -> tuple[tuple[int, int], ...]:
        """Covering pairs ``(a, b)`` with ``a < b`` and nothing strictly between."""
        if self._hasse is None:
            edges = []
            for b in range(self.n):
                below = self.down[b] & ~(1 << b)
                for a in bits(below):
                    between = below & self.up[a] & ~(1 << a)
                    if not between:
                        edges.append((a, b))
            self._hasse = tuple(edges)
        return self._hasse

    def maximal_points(self) -> list[int]:
        return [x for x in range(self.n) if self.up[x] == 1 << x]

    def minimal_points(self) -> list[int]:
        return [x for x in range(self.n) if self.down[x] == 1 << x]

    def is_open(self, mask: int) -> bool:
        return all(self.down[x] & ~mask == 0 for x in bits(mask))

    def down_closure(self, mask: int) -> int:
        out = 0
        for x in bits(mask):
            out |= self.down[x]
        return out

    def labels_of(self, mask: int) -> frozenset:
        return frozenset(self.labels[i] for i in bits(mask))

    def mask_of(self, labels: Iterable[Hashable]) -> int:
        mask = 0
        for lab in labels:
            try:
                mask |= 1 << self.index[lab]
            except KeyError:
                raise SubspaceError(f"{lab!r} is not a point of this space") from None
        return mask

    # -- derived spaces ---------------------------------------------------

    def subspace(self, points: int | Iterable[Hashable]) -> FiniteSpace:
        """Induced subspace on a bitmask or an iterable of labels (input order kept)."""
        mask = points if isinstance(points, int) else self.mask_of(points)
        if mask < 0 or mask >> self.n:
            raise SubspaceError("mask has bits outside the space")
        return _subspace(self.key, mask)

    def component_masks(self) -> tuple[int, ...]:
        """Connected components as bitmasks, ordered by least member."""
        if self._components is None:
            seen = 0
            comps = []
            for start in range(self.n):
                if (seen >> start) & 1:
                    continue
                comp = 1 << start
                frontier = comp
                while frontier:
                    grow = 0
                    for x in bits(frontier):
                        grow |= self.down[x] | self.up[x]
                    frontier = grow & ~comp
                    comp |= grow
                seen |= comp
                comps.append(comp)
            self._components = tuple(comps)
        return self._components

    def is_connected(self) -> bool:
        return len(self.component_masks()) == 1

    def identity(self) -> SpaceMap:
        return SpaceMap(self, self, tuple(range(self.n)), check=False)

    def constant(self, codomain: FiniteSpace, point: int) -> SpaceMap:
        return SpaceMap(self, codomain, (point,) * self.n, check=False)

    # -- dunder -----------------------------------------------------------

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FiniteSpace) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        rel = ", ".join(f"{self.labels[a]!r}<{self.labels[b]!r}" for a, b in self.hasse())
        return f"FiniteSpace({list(self.labels)!r}; {rel})"


class ProductSpace(FiniteSpace):
    """Cartesian product with the componentwise order; points are label tuples.

    Points are listed in lexicographic order of factor indices, so the point
    with factor indices ``(i_0, ..., i_{r-1})`` sits at the mixed-radix index.
    """

    __slots__ = ("factors", "coords")

    def __init__(self, factors: Sequence[FiniteSpace]):
        if not factors:
            raise ShapeError("product of an empty list of spaces")
        self.factors = tuple(factors)
        self.coords = tuple(itertools.product(*(range(f.n) for f in self.factors)))
        position = {c: i for i, c in enumerate(self.coords)}
        down = []
        for c in self.coords:
            m = 0
            for below in itertools.product(*(list(bits(f.down[ci])) for f, ci in zip(self.factors, c))):
                m |= 1 << position[below]
            down.append(m)
        labels = [tuple(f.labels[ci] for f, ci in zip(self.factors, c)) for c in self.coords]
        super().__init__(labels, down)

    def point_index(self, coords: Sequence[int]) -> int:
        i = 0
        for f, c in zip(self.factors, coords):
            i = i * f.n + c
        return i

    def projection(self, k: int) -> SpaceMap:
        return SpaceMap(self, self.factors[k], tuple(c[k] for c in self.coords), check=False)

    def diagonal(self) -> SpaceMap:
        """The diagonal embedding of the common factor; all factors must be equal."""
        base = self.factors[0]
        if any(f != base for f in self.factors):
            raise ShapeError("diagonal needs identical factors")
        r = len(self.factors)
        return SpaceMap(base, self, tuple(self.point_index((x,) * r) for x in range(base.n)), check=False)


def validate_space(labels: Sequence[Hashable], matrix: Sequence[Sequence[Any]]) -> FiniteSpace:
    """Check a raw relation and return the space it generates.

    The reflexive-transitive closure is taken first; antisymmetry is checked
    on the closure.
    """
    n = len(labels)
    if len(matrix) != n or any(len(row) != n for row in matrix):
        raise ShapeError(f"relation matrix must be {n}x{n} to match the label list")
    down = [1 << b for b in range(n)]
    for a in range(n):
        for b in range(n):
            if matrix[a][b]:
                down[b] |= 1 << a
    # Warshall on bitmasks: if k <= b then everything below k is below b.
    for k in range(n):
        for b in range(n):
            if (down[b] >> k) & 1:
                down[b] |= down[k]
    for a in range(n):
        for b in range(a + 1, n):
            if (down[b] >> a) & 1 and (down[a] >> b) & 1:
                raise CycleError(f"{labels[a]!r} and {labels[b]!r} lie on a cycle")
    return FiniteSpace(labels, down)


def product(spaces: Sequence[FiniteSpace]) -> ProductSpace:
    return ProductSpace(spaces)


@lru_cache(maxsize=65536)
def _subspace(key, mask: int) -> FiniteSpace:
    labels, full_down = key
    keep = list(bits(mask))
    pos = {old: new for new, old in enumerate(keep)}
    down = []
    for old in keep:
        m = 0
        for a in bits(full_down[old] & mask):
            m |= 1 << pos[a]
        down.append(m)
    return FiniteSpace([labels[i] for i in keep], down)


def power(space: FiniteSpace, r: int) -> ProductSpace:
    return ProductSpace([space] * r)


def is_subspace(sub: FiniteSpace, space: FiniteSpace) -> bool:
    """True iff ``sub``'s labels lie in ``space`` and carry the induced order."""
    return _is_subspace(sub.key, space.key)


@lru_cache(maxsize=65536)
def _is_subspace(sub_key, space_key) -> bool:
    sub_labels, sub_down = sub_key
    labels, down = space_key
    index = {lab: i for i, lab in enumerate(labels)}
    if any(lab not in index for lab in sub_labels):
        return False
    emb = [index[lab] for lab in sub_labels]
    for a, ea in enumerate(emb):
        induced = 0
        for b, eb in enumerate(emb):
            if (down[ea] >> eb) & 1:
                induced |= 1 << b
        if induced != sub_down[a]:
            return False
    return True


def inclusion(sub: FiniteSpace, space: FiniteSpace) -> SpaceMap:
    if not is_subspace(sub, space):
        raise SubspaceError("not an induced subspace")
    return SpaceMap(sub, space, tuple(space.index[lab] for lab in sub.labels), check=False)


class SpaceMap:
    """An order-preserving (hence continuous) map between finite spaces.

    ``assignment[i]`` is the codomain index of domain point ``i``.
    """

    __slots__ = ("domain", "codomain", "assignment")

    def __init__(self, domain: FiniteSpace, codomain: FiniteSpace, assignment: Sequence[int], check: bool = True):
        self.domain = domain
        self.codomain = codomain
        self.assignment = tuple(assignment)
        if check:
            if len(self.assignment) != domain.n:
                raise ShapeError("assignment must be total on the domain")
            if any(not 0 <= v < codomain.n for v in self.assignment):
                raise ShapeError("assignment leaves the codomain")
            bad = first_discontinuity(domain, codomain, self.assignment)
            if bad is not None:
                a, b = bad
                raise ContinuityError(
                    f"{domain.labels[a]!r} <= {domain.labels[b]!r} but their images are not ordered"
                )

    @classmethod
    def from_labels(cls, domain: FiniteSpace, codomain: FiniteSpace, mapping: Mapping[Hashable, Hashable]) -> SpaceMap:
        try:
            assignment = [codomain.index[mapping[lab]] for lab in domain.labels]
        except KeyError as exc:
            raise ShapeError(f"assignment missing or unknown point {exc.args[0]!r}") from None
        return cls(domain, codomain, assignment)

    def __call__(self, label: Hashable) -> Hashable:
        return self.codomain.labels[self.assignment[self.domain.index[label]]]

    def as_dict(self) -> dict:
        return {self.domain.labels[i]: self.codomain.labels[v] for i, v in enumerate(self.assignment)}

    def image_mask(self, mask: int | None = None) -> int:
        out = 0
        src = range(self.domain.n) if mask is None else bits(mask)
        for i in src:
            out |= 1 << self.assignment[i]
        return out

    def compose(self, inner: SpaceMap) -> SpaceMap:
        """``self`` after ``inner``."""
        if inner.codomain != self.domain:
            raise ShapeError("composition needs inner.codomain == outer.domain")
        a = self.assignment
        return SpaceMap(inner.domain, self.codomain, tuple(a[v] for v in inner.assignment), check=False)

    def is_constant(self) -> bool:
        return len(set(self.assignment)) <= 1

    def leq(self, other: SpaceMap) -> bool:
        cod = self.codomain
        return all(cod.leq(a, b) for a, b in zip(self.assignment, other.assignment))

    def comparable(self, other: SpaceMap) -> bool:
        return self.leq(other) or other.leq(self)

    def key(self) -> tuple:
        return (self.domain.key, self.codomain.key, self.assignment)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, SpaceMap)
            and self.assignment == other.assignment
            and self.domain == other.domain
            and self.codomain == other.codomain
        )

    def __hash__(self) -> int:
        return hash((self.assignment, self.domain.key, self.codomain.key))

    def __repr__(self) -> str:
        return f"SpaceMap({self.as_dict()!r})"


def first_discontinuity(domain: FiniteSpace, codomain: FiniteSpace, assignment: Sequence[int]) -> tuple[int, int] | None:
    for a, b in domain.hasse():
        if not codomain.leq(assignment[a], assignment[b]):
            return a, b
    return None


def is_continuous(domain: FiniteSpace, codomain: FiniteSpace, assignment: Sequence[int]) -> bool:
    return first_discontinuity(domain, codomain, assignment) is None


def restrict_map(f: SpaceMap, sub: FiniteSpace, codomain: FiniteSpace | None = None) -> SpaceMap:
    """``f`` restricted to the induced subspace ``sub``, optionally corestricted."""
    if not is_subspace(sub, f.domain):
        raise SubspaceError("restriction target is not an induced subspace of the domain")
    values = [f.assignment[f.domain.index[lab]] for lab in sub.labels]
    if codomain is None:
        return SpaceMap(sub, f.codomain, values, check=False)
    if not is_subspace(codomain, f.codomain):
        raise SubspaceError("corestriction target is not an induced subspace of the codomain")
    try:
        moved = [codomain.index[f.codomain.labels[v]] for v in values]
    except KeyError as exc:
        raise ImageError(f"image point {exc.args[0]!r} is outside the supplied codomain") from None
    return SpaceMap(sub, codomain, moved, check=False)


class OpenSet:
    """A down-set of a finite space, stored as a bitmask."""

    __slots__ = ("space", "mask")

    def __init__(self, space: FiniteSpace, mask: int, check: bool = True):
        if check and not space.is_open(mask):
            raise SubspaceError("not a down-set")
        self.space = space
        self.mask = mask

    @classmethod
    def from_labels(cls, space: FiniteSpace, labels: Iterable[Hashable]) -> OpenSet:
        return cls(space, space.mask_of(labels))

    @property
    def members(self) -> frozenset:
        return self.space.labels_of(self.mask)

    def indices(self) -> list[int]:
        return list(bits(self.mask))

    def as_space(self) -> FiniteSpace:
        return self.space.subspace(self.mask)

    def __len__(self) -> int:
        return popcount(self.mask)

    def __contains__(self, label: Hashable) -> bool:
        i = self.space.index.get(label)
        return i is not None and bool((self.mask >> i) & 1)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, OpenSet) and self.mask == other.mask and self.space == other.space

    def __hash__(self) -> int:
        return hash((self.mask, self.space.key))

    def __repr__(self) -> str:
        return f"OpenSet({sorted(map(repr, self.members))})"


class OpenSetStream:
    """Down-sets in antichain order; ``truncated`` is set if ``max_count`` cut it short."""

    def __init__(self, space: FiniteSpace, max_count: int | None = None):
        self.space = space
        self.max_count = max_count
        self.truncated = False

    def __iter__(self) -> Iterator[OpenSet]:
        space = self.space
        n = space.n
        emitted = 0
        # DFS over antichains; a down-set is generated once, by its set of maximal points.
        stack: list[tuple[int, int, int]] = [(0, 0, 0)]  # (next index, antichain blocked mask, downset)
        while stack:
            start, blocked, downset = stack.pop()
            if self.max_count is not None and emitted >= self.max_count:
                self.truncated = True
                return
            yield OpenSet(space, downset, check=False)
            emitted += 1
            children = []
            for j in range(start, n):
                if (blocked >> j) & 1:
                    continue
                children.append((j + 1, blocked | space.down[j] | space.up[j], downset | space.down[j]))
            stack.extend(reversed(children))


def open_sets(space: FiniteSpace, max_count: int | None = None) -> OpenSetStream:
    return OpenSetStream(space, max_count)


def connected_components(space: FiniteSpace) -> list[list[Hashable]]:
    return [[space.labels[i] for i in bits(m)] for m in space.component_masks()]


def down_set_count_bruteforce(space: FiniteSpace) -> int:
    return sum(1 for m in range(1 << space.n) if space.is_open(m))


# -- standard small spaces --------------------------------------------------


def point_space(label: Hashable = "*") -> FiniteSpace:
    return FiniteSpace([label], [1])


def chain(n: int, prefix: str = "c") -> FiniteSpace:
    labels = [f"{prefix}{i}" for i in range(n)]
    return FiniteSpace(labels, [(1 << (i + 1)) - 1 for i in range(n)])


def discrete(n: int, prefix: str = "d") -> FiniteSpace:
    return FiniteSpace([f"{prefix}{i}" for i in range(n)], [1 << i for i in range(n)])


def pseudocircle() -> FiniteSpace:
    """Minimal finite model of the circle: a, b below both c and d."""
    return FiniteSpace.from_covers("abcd", [("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")])


def cone(space: FiniteSpace, apex: Hashable = "top") -> FiniteSpace:
    """Non-Hausdorff cone: one new point above everything."""
    if apex in space.index:
        raise ShapeError(f"apex label {apex!r} already used")
    return FiniteSpace(list(space.labels) + [apex], list(space.down) + [(1 << (space.n + 1)) - 1])


def suspension(space: FiniteSpace, tops: tuple[Hashable, Hashable] = ("n", "s")) -> FiniteSpace:
    """Non-Hausdorff suspension: two incomparable new points above everything."""
    n = space.n
    base = (1 << n) - 1
    return FiniteSpace(list(space.labels) + list(tops), list(space.down) + [base | 1 << n, base | 1 << (n + 1)])


def map_count(domain: FiniteSpace, codomain: FiniteSpace) -> int:
    """Number of continuous maps, by enumeration (small spaces only)."""
    return sum(1 for _ in all_maps(domain, codomain))


def all_maps(domain: FiniteSpace, codomain: FiniteSpace, fixed: Mapping[int, int] | None = None) -> Iterator[tuple[int, ...]]:
    """All order-preserving assignments, by backtracking along a linear extension.

    ``fixed`` pins some domain indices to given codomain indices.  Output
    order is lexicographic in the assignment tuple.
    """
    n = domain.n
    fixed = dict(fixed or {})
    order = list(range(n))
    values = [0] * n
    cod_all = codomain.full_mask

    def allowed(i: int) -> int:
        # candidates compatible with already-assigned neighbours (indices < i)
        m = cod_all
        for j in bits(domain.down[i] & ((1 << i) - 1) & ~(1 << i)):
            m &= codomain.up[values[j]]
        for j in bits(domain.up[i] & ((1 << i) - 1) & ~(1 << i)):
            m &= codomain.down[values[j]]
        if i in fixed:
            m &= 1 << fixed[i]
        return m

    def rec(k: int) -> Iterator[tuple[int, ...]]:
        if k == n:
            yield tuple(values)
            return
        i = order[k]
        for v in bits(allowed(i)):
            values[i] = v
            yield from rec(k + 1)

    yield from rec(0)

