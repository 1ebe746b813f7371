"""All finite posets on a few points, one per isomorphism class."""

from __future__ import annotations

import itertools
from functools import lru_cache

from .finspace import FiniteSpace, bits, open_sets, popcount

MAX_POINTS = 5


def _refined_classes(n: int, down: tuple[int, ...], up: tuple[int, ...]) -> list[int]:
    """Isomorphism-invariant colour per point, by iterated neighbourhood refinement."""
    colour = [(popcount(down[x]), popcount(up[x])) for x in range(n)]
    for _ in range(n):
        sig = [
            (colour[x], tuple(sorted(colour[y] for y in bits(down[x]))), tuple(sorted(colour[y] for y in bits(up[x]))))
            for x in range(n)
        ]
        ranks = {s: i for i, s in enumerate(sorted(set(sig)))}
        new = [(ranks[s], 0) for s in sig]
        if len(set(new)) == len(set(colour)):
            colour = new
            break
        colour = new
    return [c[0] for c in colour]


def canonical_form(space: FiniteSpace) -> tuple[int, ...]:
    """Least down-mask code over all relabelings that respect the refined colouring."""
    n = space.n
    colour = _refined_classes(n, space.down, space.up)
    groups: dict[int, list[int]] = {}
    for x in range(n):
        groups.setdefault(colour[x], []).append(x)
    blocks = [groups[c] for c in sorted(groups)]
    best = None
    for choice in itertools.product(*(itertools.permutations(b) for b in blocks)):
        order = [x for block in choice for x in block]
        pos = {x: i for i, x in enumerate(order)}
        code = []
        for x in order:
            m = 0
            for y in bits(space.down[x]):
                m |= 1 << pos[y]
            code.append(m)
        code = tuple(code)
        if best is None or code < best:
            best = code
    return best if best is not None else ()


def _from_code(code: tuple[int, ...]) -> FiniteSpace:
    return FiniteSpace([f"p{i}" for i in range(len(code))], code)


@lru_cache(maxsize=None)
def posets(n: int) -> tuple[FiniteSpace, ...]:
    """Posets on exactly n points up to isomorphism, sorted by canonical code."""
    if n < 0 or n > MAX_POINTS:
        raise ValueError(f"n must be in 0..{MAX_POINTS}")
    if n == 0:
        return (FiniteSpace([], []),)
    codes = set()
    for smaller in posets(n - 1):
        for d in open_sets(smaller):
            # new maximal point sitting above the down-set d
            down = list(smaller.down) + [d.mask | 1 << (n - 1)]
            codes.add(canonical_form(FiniteSpace([f"p{i}" for i in range(n)], down)))
    return tuple(_from_code(c) for c in sorted(codes))


def generate_corpus(max_points: int, connected: bool = False, min_points: int = 1) -> list[FiniteSpace]:
    if not 1 <= max_points <= MAX_POINTS:
        raise ValueError(f"max_points must be in 1..{MAX_POINTS}")
    out = []
    for n in range(min_points, max_points + 1):
        out.extend(p for p in posets(n) if not connected or p.is_connected())
    return out


def corpus_counts(max_points: int, connected: bool = False) -> dict[int, int]:
    counts: dict[int, int] = {}
    for p in generate_corpus(max_points, connected):
        counts[p.n] = counts.get(p.n, 0) + 1
    return counts
