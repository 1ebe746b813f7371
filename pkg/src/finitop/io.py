"""JSON file formats for spaces, maps, squares, complexes and matrices.

Space:   {"points": ["a", "b", ...], "covers": [["a", "c"], ...]}   (a < c)
Map:     {"domain": <space file or object>, "codomain": ..., "assignment": {"a": "x", ...}}
Square:  {"f": <map>, "X_prime": [...], "Y_prime": [...], "r_X": {...}, "r_Y": {...}}
Complex: {"vertices": [...], "facets": [[...], ...]}   (vertices optional)
Matrix:  [[row], ...]  or  {"rows": [[...]], "cols": n}
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path
from typing import Any

from .chains import SimplicialComplex, order_complex
from .errors import ParseError, ShapeError
from .finspace import FiniteSpace, SpaceMap, restrict_map
from .grouphom import IntMatrix
from .retracts import RetractionSquare


def file_hash(path: str | os.PathLike) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def load_json(path: str | os.PathLike) -> Any:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc.msg}", exc.lineno, exc.colno) from None


def _resolve(obj, base: Path):
    if isinstance(obj, str):
        return load_json(base / obj), (base / obj).parent
    return obj, base


def _require(obj, key, where):
    if not isinstance(obj, dict) or key not in obj:
        raise ParseError(f"{where}: missing key {key!r}")
    return obj[key]


def space_from_json(obj) -> FiniteSpace:
    points = _require(obj, "points", "space")
    covers = obj.get("covers", [])
    try:
        return FiniteSpace.from_covers(points, [tuple(c) for c in covers])
    except (TypeError, ValueError) as exc:
        raise ParseError(f"space: {exc}") from None


def space_to_json(space: FiniteSpace) -> dict:
    return {"points": list(space.labels), "covers": [[space.labels[a], space.labels[b]] for a, b in space.hasse()]}


def map_from_json(obj, base: Path = Path(".")) -> SpaceMap:
    dom_obj, dbase = _resolve(_require(obj, "domain", "map"), base)
    cod_obj, cbase = _resolve(_require(obj, "codomain", "map"), base)
    X, Y = space_from_json(dom_obj), space_from_json(cod_obj)
    return SpaceMap.from_labels(X, Y, _require(obj, "assignment", "map"))


def map_to_json(f: SpaceMap) -> dict:
    return {"domain": space_to_json(f.domain), "codomain": space_to_json(f.codomain), "assignment": f.as_dict()}


def load_space_or_map(path: str | os.PathLike) -> SpaceMap:
    """A map file as is, or the identity of a space file."""
    obj = load_json(path)
    if isinstance(obj, dict) and "assignment" in obj:
        return map_from_json(obj, Path(path).parent)
    return space_from_json(obj).identity()


def square_from_json(obj, base: Path = Path(".")) -> RetractionSquare:
    f_obj, fbase = _resolve(_require(obj, "f", "square"), base)
    f = map_from_json(f_obj, fbase)
    Xp = f.domain.subspace(_require(obj, "X_prime", "square"))
    Yp = f.codomain.subspace(_require(obj, "Y_prime", "square"))
    fp = restrict_map(f, Xp, Yp)
    rx = SpaceMap.from_labels(f.domain, Xp, _require(obj, "r_X", "square"))
    ry = SpaceMap.from_labels(f.codomain, Yp, _require(obj, "r_Y", "square"))
    return RetractionSquare(f, fp, rx, ry)


def complex_from_json(obj) -> SimplicialComplex:
    """A facet list, or a finite space (converted to its order complex)."""
    if isinstance(obj, dict) and "points" in obj:
        return order_complex(space_from_json(obj))
    facets = obj if isinstance(obj, list) else _require(obj, "facets", "complex")
    if isinstance(obj, dict) and "vertices" in obj:
        return SimplicialComplex(obj["vertices"], facets)
    return SimplicialComplex.from_facets(facets)


def matrix_from_json(obj) -> IntMatrix:
    try:
        if isinstance(obj, dict):
            return IntMatrix.from_rows(obj["rows"], obj.get("cols"))
        return IntMatrix.from_rows(obj)
    except (KeyError, TypeError, ValueError, ShapeError) as exc:
        raise ParseError(f"matrix: {exc}") from None


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_default) + "\n"


def _default(o):
    if isinstance(o, (tuple, set, frozenset)):
        return sorted(o) if isinstance(o, (set, frozenset)) else list(o)
    raise TypeError(f"cannot serialise {type(o).__name__}")


def write_atomic(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
