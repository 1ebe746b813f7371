"""Command-line entry point: ``finitop <subcommand> ...``.

Exit codes: 0 success, 1 crash or malformed input, 2 audit found
counterexamples, 3 search budget exceeded (partial report still written).
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import io
from .errors import FinitopError, ParseError, SearchBudgetExceeded

EXIT_OK, EXIT_ERROR, EXIT_COUNTEREXAMPLE, EXIT_BUDGET = 0, 1, 2, 3
CACHE_ENV = "FINITOP_CACHE_DIR"


@dataclass
class RunConfig:
    subcommand: str
    inputs: list[str] = field(default_factory=list)
    max_product_points: int = 16
    max_open_sets: int = 200_000
    time_limit: float | None = None
    jobs: int = 1
    output: str | None = None
    format: str = "json"
    timing: bool = False
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.max_product_points <= 0 or self.max_open_sets <= 0 or self.jobs <= 0:
            raise ValueError("budgets and job counts must be positive")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time limit must be positive")
        for path in self.inputs:
            if not Path(path).exists():
                raise FileNotFoundError(path)

    def budget(self):
        from .covers import Budget

        return Budget(self.max_product_points, self.max_open_sets, self.time_limit)


@dataclass
class Outcome:
    report: dict
    status: int = EXIT_OK
    text: list[str] = field(default_factory=list)


# -- subcommand bodies ------------------------------------------------------


def _invariant(cfg: RunConfig, kind: str) -> Outcome:
    from .covers import cat_map, tc_map

    f = io.load_space_or_map(cfg.inputs[0])
    r = cfg.options.get("r", 2)
    report = {"invariant": "cat" if kind == "cat" else f"tc{r}"}
    try:
        inv = cat_map(f, budget=cfg.budget()) if kind == "cat" else tc_map(f, r, budget=cfg.budget())
    except SearchBudgetExceeded as exc:
        report.update(budget="exceeded", value=None, lower=exc.lower, upper=exc.upper, message=str(exc))
        return Outcome(report, EXIT_BUDGET, [f"budget exceeded: {exc.lower} <= value <= {exc.upper}"])
    report.update(budget="ok", value=inv.value, cover=inv.cover.to_json(), cover_valid=inv.cover.validate())
    return Outcome(report, text=[f"{report['invariant']} = {inv.value}", f"cover parts: {len(inv.cover)}"])


def cmd_cat(cfg):
    return _invariant(cfg, "cat")


def cmd_tc(cfg):
    return _invariant(cfg, "tc")


def _table_json(table) -> dict:
    P, Y = table.subset.space, table.f.codomain
    return {
        "waypoints": list(table.waypoints),
        "entries": [
            {"point": list(P.labels[p]), "path": [Y.labels[v] for v in table.entries[p]]} for p in sorted(table.entries)
        ],
        "violations": table.violations(),
    }


def cmd_planner(cfg):
    from .covers import admits_planner, extract_planner, tc_map

    f = io.load_space_or_map(cfg.inputs[0])
    r = cfg.options.get("r", 2)
    try:
        inv = tc_map(f, r, budget=cfg.budget())
    except SearchBudgetExceeded as exc:
        return Outcome({"budget": "exceeded", "lower": exc.lower, "upper": exc.upper}, EXIT_BUDGET)
    parts = []
    for part, wit in zip(inv.cover.parts, inv.cover.witnesses):
        entry = {"members": [list(inv.cover.space.labels[i]) for i in _bits(part.mask)]}
        entry["admits_planner"] = admits_planner(part, f, r).holds
        if cfg.options.get("extract"):
            entry["planner"] = _table_json(extract_planner(part, f, r, wit))
        parts.append(entry)
    report = {"invariant": f"tc{r}", "value": inv.value, "budget": "ok", "parts": parts}
    ok = all(p["admits_planner"] and not p.get("planner", {}).get("violations") for p in parts)
    return Outcome(report, EXIT_OK if ok else EXIT_COUNTEREXAMPLE, [f"tc{r} = {inv.value}, {len(parts)} planners"])


def _bits(mask):
    from .finspace import bits

    return bits(mask)


def cmd_restrict_cover(cfg):
    from .covers import cat_map, restrict_cover, tc_map, admits_planner

    square = io.square_from_json(io.load_json(cfg.inputs[0]), Path(cfg.inputs[0]).parent)
    inv_name = cfg.options.get("invariant", "cat")
    r = cfg.options.get("r", 2)
    try:
        if inv_name == "cat":
            inv = cat_map(square.f, budget=cfg.budget())
        else:
            inv = tc_map(square.f, r, budget=cfg.budget())
    except SearchBudgetExceeded as exc:
        return Outcome({"budget": "exceeded", "lower": exc.lower, "upper": exc.upper}, EXIT_BUDGET)
    restricted = restrict_cover(inv.cover, square)
    valid = restricted.validate()
    if valid and inv_name == "tc":
        valid = all(admits_planner(p, square.f_prime, r).holds for p in restricted.parts)
    report = {
        "invariant": "cat" if inv_name == "cat" else f"tc{r}",
        "value": inv.value,
        "cover": inv.cover.to_json(),
        "restricted_cover": restricted.to_json(),
        "restricted_valid": valid,
        "budget": "ok",
    }
    return Outcome(report, EXIT_OK if valid else EXIT_COUNTEREXAMPLE, [f"restricted cover: {len(restricted)} parts, valid={valid}"])


def cmd_retractions(cfg):
    from .retracts import enumerate_retractions

    X = io.space_from_json(io.load_json(cfg.inputs[0]))
    by_text = {str(lab): lab for lab in X.labels}
    try:
        sub = X.subspace([by_text[t] for t in cfg.options["subspace"]])
    except KeyError as exc:
        raise ValueError(f"unknown point {exc.args[0]!r}") from None
    rets = enumerate_retractions(X, sub)
    report = {"X_prime": list(sub.labels), "count": len(rets), "retractions": [r.as_dict() for r in rets]}
    return Outcome(report, text=[f"{len(rets)} retractions onto {list(sub.labels)}"])


def cmd_square_check(cfg):
    from .retracts import verify_square

    square = io.square_from_json(io.load_json(cfg.inputs[0]), Path(cfg.inputs[0]).parent)
    check = verify_square(square)
    report = {"commutes": check.holds, "failing_point": check.point}
    line = "square commutes" if check.holds else f"square fails at {check.point!r}"
    return Outcome(report, text=[line])


def _corpus(max_points: int, connected: bool):
    from .corpus import generate_corpus

    cache = os.environ.get(CACHE_ENV)
    if cache:
        path = Path(cache) / f"corpus-{max_points}-{'c' if connected else 'a'}.json"
        if path.exists():
            return [io.space_from_json(s) for s in io.load_json(path)["spaces"]]
        spaces = generate_corpus(max_points, connected)
        path.parent.mkdir(parents=True, exist_ok=True)
        io.write_atomic(path, io.dumps({"spaces": [io.space_to_json(s) for s in spaces]}))
        return spaces
    return generate_corpus(max_points, connected)


def cmd_audit(cfg):
    from .retracts import audit_monotonicity

    inv = cfg.options.get("invariant", "cat")
    r = cfg.options.get("r", 2)
    n = cfg.options.get("max_points", 3)
    connected = cfg.options.get("connected", False) or inv == "tc"
    name = "cat" if inv == "cat" else f"tc{r}"
    corpus = _corpus(n, connected)
    descriptor = {"max_points": n, "connected": connected, "spaces": len(corpus)}
    report = audit_monotonicity(corpus, [name], descriptor, jobs=cfg.jobs, budget=cfg.budget())
    out = report.to_json()
    if not cfg.options.get("records", True):
        out.pop("records")
    s = report.summary
    text = [
        f"audit {name} over {len(corpus)} spaces (max {n} points{', connected' if connected else ''})",
        f"{'instances':<28}{s['instances']:>10}",
        f"{'squares':<28}{s['squares']:>10}",
        f"{'violations':<28}{s['violations']:>10}",
        f"{'restricted covers checked':<28}{s['restricted_covers_checked']:>10}",
        f"{'restricted covers invalid':<28}{s['restricted_covers_invalid']:>10}",
        f"{'budget overruns':<28}{s['status'].get('budget', 0):>10}",
    ]
    if not report.ok:
        status = EXIT_COUNTEREXAMPLE
    elif s["status"].get("budget"):
        status = EXIT_BUDGET
    else:
        status = EXIT_OK
    return Outcome(out, status, text)


def _complex(cfg):
    return io.complex_from_json(io.load_json(cfg.inputs[0]))


def cmd_homology(cfg, co=False):
    from .chains import cohomology, homology

    K = _complex(cfg)
    res = (cohomology if co else homology)(K, cfg.options.get("ring", "Z"))
    out = res.to_json()
    text = [f"betti: {res.betti}"] + ([f"torsion: {res.torsion}"] if res.ring == "Z" else [])
    return Outcome(out, text=text)


def cmd_cohomology(cfg):
    return cmd_homology(cfg, co=True)


def _dimension(cfg, which):
    from .chains import cd_space, hd_space

    K = _complex(cfg)
    probes = cfg.options.get("probes") or None
    res = (cd_space if which == "cd" else hd_space)(K, probes)
    return Outcome(res.to_json(), text=[f"{which} >= {res.value} (upper bound {res.upper_bound})", f"per probe: {res.per_probe}"])


def cmd_cd(cfg):
    return _dimension(cfg, "cd")


def cmd_hd(cfg):
    return _dimension(cfg, "hd")


def cmd_cup_length(cfg):
    from .products import cup_length

    value = cup_length(_complex(cfg), cfg.options.get("field", "Q"))
    return Outcome({"field": cfg.options.get("field", "Q"), "cup_length": value}, text=[f"cup-length = {value}"])


def cmd_zdcl(cfg):
    from .products import zero_divisor_cup_length

    r = cfg.options.get("r", 2)
    value = zero_divisor_cup_length(_complex(cfg), cfg.options.get("field", "Q"), r)
    report = {"field": cfg.options.get("field", "Q"), "r": r, "zero_divisor_cup_length": value}
    return Outcome(report, text=[f"zero-divisor cup-length (r={r}) = {value}"])


def cmd_cd_hom(cfg):
    from .grouphom import cd_trivial, hd_trivial

    A = io.matrix_from_json(io.load_json(cfg.inputs[0]))
    report = {"rows": A.rows, "cols": A.cols, "cd_trivial": cd_trivial(A), "hd_trivial": hd_trivial(A)}
    return Outcome(report, text=[f"cd = {report['cd_trivial']}", f"hd = {report['hd_trivial']}"])


def _seeded(cfg) -> tuple[int, int | None]:
    count = cfg.options.get("random", 0)
    seed = cfg.options.get("seed")
    if count and seed is None:
        raise ValueError("--random needs an explicit --seed")
    return count, seed


def cmd_audit_lemma31(cfg):
    from .grouphom import audit_lemma31, exhaustive_sub_instances, random_sub_instances

    count, seed = _seeded(cfg)
    instances = exhaustive_sub_instances()
    if count:
        instances += random_sub_instances(count, seed)
    report = audit_lemma31(instances)
    report["corpus"] = {"exhaustive": True, "random": count, "seed": seed}
    status = EXIT_COUNTEREXAMPLE if report["violations"] else EXIT_OK
    return Outcome(report, status, [f"instances {report['instances']}, violations {report['violations']}"])


def cmd_audit_theorem32(cfg):
    from .grouphom import audit_theorem32, exhaustive_squares, projection_square, random_squares

    count, seed = _seeded(cfg)
    squares = [projection_square()] + exhaustive_squares()
    if count:
        squares += random_squares(count, seed)
    report = audit_theorem32(squares)
    report["corpus"] = {"projection": True, "exhaustive": True, "random": count, "seed": seed}
    c = report["counts"]
    status = EXIT_COUNTEREXAMPLE if c["strict-less"] or c["greater"] or c["invalid"] else EXIT_OK
    text = [f"{k:<14}{v:>8}" for k, v in c.items()]
    return Outcome(report, status, text)


def cmd_gen_corpus(cfg):
    from .corpus import corpus_counts

    n = cfg.options.get("max_points", 3)
    if not 1 <= n <= 5:
        raise ValueError("max points must be between 1 and 5")
    connected = cfg.options.get("connected", False)
    spaces = _corpus(n, connected)
    counts = corpus_counts(n, connected)
    report = {"max_points": n, "connected": connected, "counts": {str(k): v for k, v in counts.items()}}
    report["spaces"] = [io.space_to_json(s) for s in spaces]
    return Outcome(report, text=[f"{len(spaces)} posets", f"per size: {counts}"])


def cmd_homotopic(cfg):
    from .homotopy import are_homotopic

    f = io.load_space_or_map(cfg.inputs[0])
    g = io.load_space_or_map(cfg.inputs[1])
    res = are_homotopic(f, g)
    report = {"homotopic": res.holds, "fence": res.witness.to_json() if res.witness else None}
    return Outcome(report, text=[f"homotopic: {res.holds}"])


def cmd_nullhomotopic(cfg):
    from .homotopy import is_nullhomotopic

    res = is_nullhomotopic(io.load_space_or_map(cfg.inputs[0]))
    report = {"nullhomotopic": res.holds, "fence": res.witness.to_json() if res.witness else None}
    return Outcome(report, text=[f"null-homotopic: {res.holds}"])


def cmd_core(cfg):
    from .homotopy import core

    X = io.space_from_json(io.load_json(cfg.inputs[0]))
    res = core(X)
    report = {"core": io.space_to_json(res.core), "removed": list(res.removed), "retraction": res.retraction.as_dict()}
    return Outcome(report, text=[f"core has {res.core.n} of {X.n} points"])


COMMANDS = {
    "cat": cmd_cat,
    "tc": cmd_tc,
    "planner": cmd_planner,
    "restrict-cover": cmd_restrict_cover,
    "retractions": cmd_retractions,
    "square-check": cmd_square_check,
    "audit": cmd_audit,
    "homology": cmd_homology,
    "cohomology": cmd_cohomology,
    "cd": cmd_cd,
    "hd": cmd_hd,
    "cup-length": cmd_cup_length,
    "zdcl": cmd_zdcl,
    "cd-hom": cmd_cd_hom,
    "audit-lemma31": cmd_audit_lemma31,
    "audit-theorem32": cmd_audit_theorem32,
    "gen-corpus": cmd_gen_corpus,
    "homotopic": cmd_homotopic,
    "nullhomotopic": cmd_nullhomotopic,
    "core": cmd_core,
}


# -- driver -----------------------------------------------------------------


def run(cfg: RunConfig) -> int:
    """Run one subcommand, write its report, and return the exit status."""
    started = time.perf_counter()
    try:
        outcome = COMMANDS[cfg.subcommand](cfg)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (FinitopError, ValueError, OSError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    report = {
        "command": cfg.subcommand,
        "inputs": {p: io.file_hash(p) for p in cfg.inputs},
        "options": {k: v for k, v in sorted(cfg.options.items())},
        "exit_status": outcome.status,
        "result": outcome.report,
    }
    if cfg.timing:
        report["timing_seconds"] = round(time.perf_counter() - started, 3)
    if cfg.format == "json":
        text = io.dumps(report)
    else:
        lines = [f"{cfg.subcommand}: exit {outcome.status}"] + outcome.text
        lines += [f"input {p} sha256 {h}" for p, h in report["inputs"].items()]
        if cfg.timing:
            lines.append(f"time {report['timing_seconds']} s")
        text = "\n".join(lines) + "\n"
    if cfg.output:
        io.write_atomic(cfg.output, text)
    else:
        sys.stdout.write(text)
    return outcome.status


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", help="write the report here (atomically) instead of stdout")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--timing", action="store_true", help="include wall time (breaks byte-identical reports)")
    common.add_argument("--max-product-points", type=int, default=16)
    common.add_argument("--max-open-sets", type=int, default=200_000)
    common.add_argument("--time-limit", type=float, default=None, help="seconds per cover search")
    common.add_argument("--jobs", type=int, default=None, help="worker processes (default: all cores)")

    parser = argparse.ArgumentParser(prog="finitop", description="Invariants and retraction audits on finite spaces.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add(name, helptext, inputs=1):
        p = sub.add_parser(name, parents=[common], help=helptext)
        if inputs:
            p.add_argument("inputs", nargs=inputs, metavar="FILE")
        return p

    add("cat", "LS-category of a map (or of a space's identity)")
    add("tc", "sequential topological complexity").add_argument("--r", type=int, default=2)
    p = add("planner", "motion planners on a minimal TC cover")
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--extract", action="store_true", help="include the discrete planner tables")
    p = add("restrict-cover", "transport a witness cover along a retraction square")
    p.add_argument("--invariant", choices=("cat", "tc"), default="cat")
    p.add_argument("--r", type=int, default=2)
    add("retractions", "all retractions onto a subspace").add_argument(
        "--subspace", required=True, help="comma-separated point labels"
    )
    add("square-check", "check that a retraction square commutes")
    p = add("audit", "retraction-monotonicity audit over the poset corpus", inputs=0)
    p.add_argument("--invariant", choices=("cat", "tc"), default="cat")
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--max-points", type=int, default=3)
    p.add_argument("--connected", action="store_true")
    p.add_argument("--no-records", dest="records", action="store_false", help="omit per-instance records")
    for name in ("homology", "cohomology"):
        add(name, f"{name} of a complex or space").add_argument("--ring", default="Z")
    for name in ("cd", "hd"):
        add(name, f"{name} lower bound over coefficient probes").add_argument(
            "--ring", dest="probes", action="append", help="probe ring (repeatable; default Z, Q, torsion primes)"
        )
    add("cup-length", "cup-length over a field").add_argument("--field", default="Q")
    p = add("zdcl", "zero-divisor cup-length")
    p.add_argument("--field", default="Q")
    p.add_argument("--r", type=int, default=2)
    add("cd-hom", "cohomological dimension of a free abelian homomorphism")
    for name, desc in (
        ("audit-lemma31", "cd of a restricted homomorphism never exceeds the original"),
        ("audit-theorem32", "compare cd across retraction-homomorphism squares"),
    ):
        p = add(name, desc, inputs=0)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--random", type=int, default=0, help="number of seeded random instances")
    p = add("gen-corpus", "all posets up to isomorphism", inputs=0)
    p.add_argument("--max-points", type=int, default=3)
    p.add_argument("--connected", action="store_true")
    add("homotopic", "decide f ~ g and print a fence", inputs=2)
    add("nullhomotopic", "decide whether f is null-homotopic")
    add("core", "core of a finite space by beat-point removal")
    return parser


_GLOBAL = {"inputs", "output", "format", "timing", "max_product_points", "max_open_sets", "time_limit", "jobs", "subcommand"}


def config_from_args(argv=None) -> RunConfig:
    from .retracts import default_jobs

    ns = _parser().parse_args(argv)
    options = {k: v for k, v in vars(ns).items() if k not in _GLOBAL}
    if "subspace" in options:
        options["subspace"] = [s for s in options["subspace"].split(",") if s]
    return RunConfig(
        subcommand=ns.subcommand,
        inputs=list(getattr(ns, "inputs", None) or []),
        max_product_points=ns.max_product_points,
        max_open_sets=ns.max_open_sets,
        time_limit=ns.time_limit,
        jobs=ns.jobs if ns.jobs is not None else default_jobs(),
        output=ns.output,
        format=ns.format,
        timing=ns.timing,
        options=options,
    )


def main(argv=None) -> int:
    try:
        cfg = config_from_args(argv)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
