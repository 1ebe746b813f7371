"""Acceptance suite: one test per criterion, one PASS/FAIL line per criterion.

Run under pytest (the lines appear in the terminal summary) or directly with
``python3 tests/test_acceptance.py``.  All checked quantities are exact
integers or booleans; the only tolerances are the wall-clock budgets below.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import random
import sys
import tempfile
import time
from functools import lru_cache
from pathlib import Path

import pytest

from finitop.chains import boundary_smith_forms, cd_space, homology, order_complex, projective_plane, torus
from finitop.cli import EXIT_COUNTEREXAMPLE, main as cli_main
from finitop.corpus import generate_corpus
from finitop.covers import admits_planner, cat_map, extract_planner, search_planner
from finitop.finspace import OpenSet, SpaceMap, all_maps, bits, cone, power, pseudocircle
from finitop.grouphom import (
    IntMatrix,
    audit_lemma31,
    audit_theorem32,
    cd_trivial,
    exhaustive_squares,
    exhaustive_sub_instances,
    projection_square,
    random_squares,
    random_sub_instances,
)
from finitop.homotopy import HomotopyEngine
from finitop.products import cup_length, zero_divisor_cup_length
from finitop.retracts import audit_monotonicity, enumerate_retractions
from finitop.smith import certificate_problems

# pinned budgets (seconds) and sizes
CRIT1_SECONDS = 1.0
AUDIT_SECONDS = 600.0
PLANNER_SAMPLES = 200
PLANNER_SEED = 20240531
LEMMA31_RANDOM = 1000
LEMMA31_SEED = 31
THEOREM32_RANDOM = 200
THEOREM32_SEED = 32
PARALLEL_JOBS = 2

RESULTS: dict[int, tuple[bool, str]] = {}


def record(n: int, ok: bool, detail: str) -> None:
    RESULTS[n] = (ok, detail)
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")


def canonical(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()


def digest(obj) -> str:
    return hashlib.sha256(canonical(obj)).hexdigest()


# -- report builders (each returns a JSON-able report) ------------------------


def report_1() -> tuple[dict, float]:
    start = time.perf_counter()
    engine = HomotopyEngine()
    S = pseudocircle()
    K = cone(S)
    cat_s = cat_map(S.identity(), engine=engine)
    cat_k = cat_map(K.identity(), engine=engine)
    rets = enumerate_retractions(K, S)
    elapsed = time.perf_counter() - start
    rep = {
        "cat_pseudocircle": cat_s.value,
        "cat_cone": cat_k.value,
        "covers_valid": cat_s.cover.validate() and cat_k.cover.validate(),
        "retractions_cone_to_pseudocircle": len(rets),
    }
    return rep, elapsed


def _audit(invariant: str, max_points: int, connected: bool, jobs: int) -> tuple[dict, float]:
    corpus = generate_corpus(max_points, connected=connected)
    start = time.perf_counter()
    rep = audit_monotonicity(corpus, [invariant], {"max_points": max_points, "connected": connected}, jobs=jobs)
    return rep.to_json(), time.perf_counter() - start


@lru_cache(maxsize=None)
def report_2(jobs: int = 1) -> tuple[str, dict, float]:
    rep, elapsed = _audit("cat", 4, False, jobs)
    return digest(rep), rep["summary"], elapsed


@lru_cache(maxsize=None)
def report_3(jobs: int = 1) -> tuple[str, dict, float]:
    rep, elapsed = _audit("tc2", 3, True, jobs)
    return digest(rep), rep["summary"], elapsed


def _sample_planner_instances(count: int, seed: int):
    rng = random.Random(seed)
    corpus = generate_corpus(4)
    out = []
    while len(out) < count:
        X = rng.choice(corpus)
        Y = rng.choice(corpus)
        maps = list(all_maps(X, Y))
        f = SpaceMap(X, Y, rng.choice(maps), check=False)
        P = power(X, 2)
        picks = rng.sample(range(P.n), rng.randint(1, min(4, P.n)))
        mask = 0
        for p in picks:
            mask |= P.down[p]
        out.append((f, OpenSet(P, mask, check=False)))
    return out


def report_4() -> dict:
    rows = []
    for f, U in _sample_planner_instances(PLANNER_SAMPLES, PLANNER_SEED):
        decision = admits_planner(U, f, 2)
        direct = search_planner(U, f, 2)
        extracted_ok = None
        if decision.holds:
            extracted_ok = extract_planner(U, f, 2, decision.witnesses).is_valid()
        rows.append(
            {
                "X": [list(f.domain.labels), list(f.domain.down)],
                "Y": [list(f.codomain.labels), list(f.codomain.down)],
                "f": list(f.assignment),
                "U": U.mask,
                "criterion2": decision.holds,
                "criterion1": direct is not None,
                "direct_valid": None if direct is None else direct.is_valid(),
                "extracted_valid": extracted_ok,
            }
        )
    return {
        "instances": len(rows),
        "agree": sum(r["criterion1"] == r["criterion2"] for r in rows),
        "admissible": sum(r["criterion2"] for r in rows),
        "extracted_valid": sum(bool(r["extracted_valid"]) for r in rows),
        "direct_valid": sum(bool(r["direct_valid"]) for r in rows),
        "rows": rows,
    }


def report_5() -> dict:
    S = order_complex(pseudocircle())
    T = torus()
    RP = projective_plane()
    certs = []
    for K in (S, T, RP):
        for d, sf in sorted(boundary_smith_forms(K).items()):
            certs.append(certificate_problems(sf))
    rp_z = homology(RP, "Z")
    return {
        "pseudocircle_betti_Z": homology(S, "Z").betti,
        "torus_betti_Z": homology(T, "Z").betti,
        "torus_cup_length_Q": cup_length(T, "Q"),
        "torus_zdcl_r2_Q": zero_divisor_cup_length(T, "Q", 2),
        "rp2_torsion_Z": rp_z.torsion,
        "rp2_cd_probe_Z2": cd_space(RP, ["Zp:2"]).value,
        "snf_factorizations": len(certs),
        "snf_certificate_failures": sum(1 for c in certs if c),
    }


def report_6() -> tuple[dict, int, dict]:
    identities = {n: cd_trivial(IntMatrix.identity(n)) for n in range(1, 6)}
    lemma = audit_lemma31(exhaustive_sub_instances() + random_sub_instances(LEMMA31_RANDOM, LEMMA31_SEED))
    squares = [projection_square()] + exhaustive_squares() + random_squares(THEOREM32_RANDOM, THEOREM32_SEED)
    thm = audit_theorem32(squares)
    proj = [f for f in thm["findings"] if f["label"] == "projection"]
    with tempfile.TemporaryDirectory() as tmp:
        out = Path(tmp) / "theorem32.json"
        code = cli_main(
            ["audit-theorem32", "--seed", str(THEOREM32_SEED), "--random", str(THEOREM32_RANDOM), "-o", str(out)]
        )
        cli_report = json.loads(out.read_text())
    rep = {
        "cd_identity": identities,
        "lemma31_instances": lemma["instances"],
        "lemma31_violations": lemma["violations"],
        "theorem32_counts": thm["counts"],
        "projection_findings": proj,
    }
    return rep, code, cli_report


def report_7() -> dict:
    corpus = generate_corpus(3)
    fast, full = HomotopyEngine("fast"), HomotopyEngine("full")
    pairs = disagreements = 0
    reflexive = symmetric = transitive = True
    witnesses_ok = True
    for X, Y in itertools.product(corpus, repeat=2):
        maps = [SpaceMap(X, Y, a, check=False) for a in all_maps(X, Y)]
        n = len(maps)
        rel = [[False] * n for _ in range(n)]
        for i, j in itertools.product(range(n), repeat=2):
            a = fast.are_homotopic(maps[i], maps[j])
            b = full.are_homotopic(maps[i], maps[j])
            pairs += 1
            if a.holds != b.holds:
                disagreements += 1
            for res in (a, b):
                if res.holds and not (res.witness.is_valid() and res.witness.start == maps[i] and res.witness.end == maps[j]):
                    witnesses_ok = False
            rel[i][j] = a.holds
        for i in range(n):
            reflexive &= rel[i][i]
            for j in range(n):
                symmetric &= rel[i][j] == rel[j][i]
                if rel[i][j]:
                    for k in range(n):
                        if rel[j][k] and not rel[i][k]:
                            transitive = False
    return {
        "map_pairs": pairs,
        "disagreements": disagreements,
        "reflexive": reflexive,
        "symmetric": symmetric,
        "transitive": transitive,
        "witnesses_valid": witnesses_ok,
    }


# -- criteria -----------------------------------------------------------------


def test_criterion_1_counterexample_model():
    rep, elapsed = report_1()
    ok = (
        rep["cat_pseudocircle"] == 1
        and rep["cat_cone"] == 0
        and rep["covers_valid"]
        and rep["retractions_cone_to_pseudocircle"] == 0
        and elapsed < CRIT1_SECONDS
    )
    record(1, ok, f"cat(S)={rep['cat_pseudocircle']} cat(CS)={rep['cat_cone']} "
                  f"retractions={rep['retractions_cone_to_pseudocircle']} time={elapsed:.3f}s (<{CRIT1_SECONDS}s)")
    assert ok


def test_criterion_2_cat_audit():
    _, s, elapsed = report_2(1)
    ok = (
        s["violations"] == 0
        and s["restricted_covers_invalid"] == 0
        and s["restricted_covers_checked"] == s["squares"] > 0
        and s["status"] == {"ok": s["instances"]}
        and elapsed <= AUDIT_SECONDS
    )
    record(2, ok, f"instances={s['instances']} squares={s['squares']} violations={s['violations']} "
                  f"invalid_restricted={s['restricted_covers_invalid']} time={elapsed:.1f}s (<={AUDIT_SECONDS:.0f}s)")
    assert ok


def test_criterion_3_tc_audit():
    _, s, elapsed = report_3(1)
    ok = (
        s["violations"] == 0
        and s["restricted_covers_invalid"] == 0
        and s["restricted_covers_checked"] == s["squares"] > 0
        and s["status"] == {"ok": s["instances"]}
        and elapsed <= AUDIT_SECONDS
    )
    record(3, ok, f"instances={s['instances']} squares={s['squares']} violations={s['violations']} "
                  f"invalid_restricted={s['restricted_covers_invalid']} time={elapsed:.1f}s (<={AUDIT_SECONDS:.0f}s)")
    assert ok


def test_criterion_4_planner_criteria_agree():
    rep = report_4()
    n = rep["instances"]
    ok = (
        n == PLANNER_SAMPLES
        and rep["agree"] == n
        and rep["extracted_valid"] == rep["admissible"]
        and rep["direct_valid"] == rep["admissible"]
        and 0 < rep["admissible"] < n
    )
    record(4, ok, f"agree={rep['agree']}/{n} admissible={rep['admissible']} "
                  f"extracted_valid={rep['extracted_valid']}/{rep['admissible']}")
    assert ok


def test_criterion_5_homology_regression():
    rep = report_5()
    ok = (
        rep["pseudocircle_betti_Z"] == [1, 1]
        and rep["torus_betti_Z"] == [1, 2, 1]
        and rep["torus_cup_length_Q"] == 2
        and rep["torus_zdcl_r2_Q"] == 2
        and [2] in rep["rp2_torsion_Z"]
        and rep["rp2_cd_probe_Z2"] == 2
        and rep["snf_certificate_failures"] == 0
    )
    record(5, ok, f"S={rep['pseudocircle_betti_Z']} T={rep['torus_betti_Z']} cl(T)={rep['torus_cup_length_Q']} "
                  f"zcl(T)={rep['torus_zdcl_r2_Q']} RP2 torsion={rep['rp2_torsion_Z']} cd_Z2={rep['rp2_cd_probe_Z2']} "
                  f"SNF certs {rep['snf_factorizations'] - rep['snf_certificate_failures']}/{rep['snf_factorizations']}")
    assert ok


def test_criterion_6_grouphom():
    rep, code, cli_report = report_6()
    proj = rep["projection_findings"]
    cli_proj = [f for f in cli_report["result"]["findings"] if f["label"] == "projection"]
    ok = (
        rep["cd_identity"] == {n: n for n in range(1, 6)}
        and rep["lemma31_violations"] == 0
        and len(proj) == 1
        and proj[0]["class"] == "strict-less"
        and proj[0]["cd"] == 2
        and proj[0]["cd_restricted"] == 1
        and proj[0]["identities_verified"]
        and projection_square().problems() == []
        and code == EXIT_COUNTEREXAMPLE
        and cli_report["exit_status"] == EXIT_COUNTEREXAMPLE
        and cli_proj == proj
    )
    record(6, ok, f"cd(I_n)=n for n<=5; lemma31 violations={rep['lemma31_violations']}/{rep['lemma31_instances']}; "
                  f"theorem32 {rep['theorem32_counts']}; projection strict-less; cli exit={code}")
    assert ok


def test_criterion_7_homotopy_engine():
    rep = report_7()
    ok = rep["disagreements"] == 0 and rep["reflexive"] and rep["symmetric"] and rep["transitive"] and rep["witnesses_valid"]
    record(7, ok, f"pairs={rep['map_pairs']} disagreements={rep['disagreements']} reflexive={rep['reflexive']} "
                  f"symmetric={rep['symmetric']} transitive={rep['transitive']}")
    assert ok


def test_criterion_8_determinism():
    checks = {}
    first, _ = report_1()
    second, _ = report_1()
    checks["1"] = digest(first) == digest(second)
    checks["2 jobs 1 vs %d" % PARALLEL_JOBS] = report_2(1)[0] == report_2(PARALLEL_JOBS)[0]
    d3 = report_3(1)[0]
    checks["3 rerun"] = d3 == _rerun_digest_3()
    checks["3 jobs 1 vs %d" % PARALLEL_JOBS] = d3 == report_3(PARALLEL_JOBS)[0]
    checks["4"] = digest(report_4()) == digest(report_4())
    checks["5"] = digest(report_5()) == digest(report_5())
    r6a, r6b = report_6(), report_6()
    checks["6"] = digest([r6a[0], r6a[2]]) == digest([r6b[0], r6b[2]])
    checks["7"] = digest(report_7()) == digest(report_7())
    ok = all(checks.values())
    bad = [k for k, v in checks.items() if not v]
    record(8, ok, f"{sum(checks.values())}/{len(checks)} byte-identical" + (f"; differs: {bad}" if bad else ""))
    assert ok


def _rerun_digest_3() -> str:
    rep, _ = _audit("tc2", 3, True, 1)
    return digest(rep)


def main() -> int:
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_criterion_")]
    for t in tests:
        try:
            t()
        except AssertionError:
            pass
    return 0 if all(ok for ok, _ in RESULTS.values()) and len(RESULTS) == 8 else 1


if __name__ == "__main__":
    sys.exit(main())
