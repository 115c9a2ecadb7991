"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line."""

import itertools
import subprocess
import sys
import time

import pytest

from oracles import brute_reduced_product, closure_partition, exhaustive_condition_b
from redprod.connectivity import components_bfs, components_criterion, condition_b
from redprod.fuzz import (
    conn_sentences,
    direct_product_trial,
    neg_dist_formulas,
    random_instance,
    random_structure,
    restriction_trial,
    run_preserve,
    run_verify,
    trial_rng,
    truncation_trial,
)
from redprod.products import build_reduced_product
from redprod.structure import BinaryStructure, diameter, linear_path
from redprod.symbolic import (
    Frechet,
    distance_set,
    frechet_disconnection_witness,
    homogeneous_profile,
    linear_graph_profile,
    remark_b_prime_check,
    symbolic_connected,
)

pytestmark = pytest.mark.acceptance

SEED = 20240601
N_INSTANCES = 1000
ORACLE_TUPLE_LIMIT = 64


def report(capsys, k: int, ok: bool, detail: str) -> None:
    with capsys.disabled():
        print(f"\nCRITERION {k}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def corpus():
    start = time.perf_counter()
    tally, failures = run_verify(SEED, N_INSTANCES, max_index=4, max_size=4, pairs=10)
    return tally, failures, time.perf_counter() - start


def test_criterion_1_condition_b_equivalence(capsys, corpus):
    tally, _, elapsed = corpus
    # independent re-check with brute-force quotients and an exhaustive K search
    checked = mismatched = 0
    for t in range(N_INSTANCES):
        factors, phi = random_instance(trial_rng(SEED, t), 4, 4)
        if exhaustive_condition_b(factors, phi.kernel) != (condition_b(factors, phi) is not None):
            mismatched += 1
        n = 1
        for X in factors:
            n *= X.size
        if n <= ORACLE_TUPLE_LIMIT:
            classes, rel = brute_reduced_product(factors, set(phi.members()))
            brute_conn = len(closure_partition(BinaryStructure(len(classes), frozenset(rel)))) == 1
            mismatched += brute_conn != (condition_b(factors, phi) is not None)
            checked += 1
    ok = (
        tally.trials >= 1000
        and tally.condition_b_agree == tally.trials
        and mismatched == 0
        and elapsed < 60
    )
    report(
        capsys, 1, ok,
        f"{tally.condition_b_agree}/{tally.trials} agree, {tally.connected} connected, "
        f"{checked} brute-force re-checks, {mismatched} oracle mismatches, {elapsed:.1f}s (< 60s)",
    )


def test_criterion_2_components_criterion(capsys, corpus):
    tally, _, _ = corpus
    brute = ok_brute = 0
    for t in range(0, N_INSTANCES, 4):
        factors, phi = random_instance(trial_rng(SEED, t), 4, 4)
        rp = build_reduced_product(factors, phi)
        if rp.n_tuples <= ORACLE_TUPLE_LIMIT:
            brute += 1
            ok_brute += closure_partition(rp.quotient) == components_criterion(rp) == components_bfs(rp)
    ok = tally.components_agree == tally.trials and ok_brute == brute
    report(capsys, 2, ok, f"{tally.components_agree}/{tally.trials} partitions equal; closure oracle {ok_brute}/{brute}")


def test_criterion_3_witnesses(capsys, corpus):
    tally, _, _ = corpus
    ok = (
        tally.pairs >= 10000
        and tally.witness_agree == tally.pairs
        and tally.witnesses_valid == tally.witnesses_returned
    )
    report(
        capsys, 3, ok,
        f"{tally.witness_agree}/{tally.pairs} pairs agree; {tally.witnesses_valid}/{tally.witnesses_returned} witnesses validate",
    )


def test_criterion_4_restriction_isomorphism(capsys):
    n = 200
    good = sum(restriction_trial(trial_rng(SEED + 4, t)) for t in range(n))
    report(capsys, 4, good == n, f"{good}/{n} restrictions are isomorphisms")


def test_criterion_5_preservation(capsys):
    horn = run_preserve(neg_dist_formulas(3), SEED + 5, 500)["horn"]
    pos = run_preserve(conn_sentences(2), SEED + 5, 500)["positive"]
    ok = horn.trials >= 500 and pos.trials >= 500 and horn.violations == 0 and pos.violations == 0
    report(
        capsys, 5, ok,
        f"Horn {horn.violations} violations in {horn.trials} trials ({horn.hypothesis_held} with hypothesis); "
        f"positive {pos.violations} violations in {pos.trials} trials ({pos.hypothesis_held} with hypothesis)",
    )


def test_criterion_6_direct_products(capsys):
    n = 300
    runs = [direct_product_trial(trial_rng(SEED + 6, t), max_index=4, max_size=4) for t in range(n)]
    good = sum(a == b for a, b in runs)
    connected = sum(a for a, _ in runs)
    report(capsys, 6, good == n, f"{good}/{n} agree ({connected} connected products)")


def test_criterion_7_symbolic_disconnection(capsys):
    x, y, trace = frechet_disconnection_witness()
    finite = all(distance_set(x, y, n + 1).is_finite for n in range(200))
    frechet = symbolic_connected(x, y, Frechet()).connected
    runs = [truncation_trial(trial_rng(SEED + 7, t)) for t in range(50)]
    agree = sum(r["agree"] for r in runs)
    ok = finite and not frechet and agree == 50
    report(
        capsys, 7, ok,
        f"distance sets finite for n<200: {finite}; Frechet connected: {frechet}; truncations {agree}/50 agree",
    )


def test_criterion_8_b_prime(capsys):
    rng = trial_rng(SEED + 8, 0)
    finite_ok = finite_total = 0
    for _ in range(100):
        X = random_structure(rng, rng.randint(1, 5))
        finite_total += 1
        finite_ok += remark_b_prime_check(homogeneous_profile(X), Frechet()) == (diameter(X) < float("inf"))
    paths = all(remark_b_prime_check(homogeneous_profile(linear_path(k, symmetric=True)), Frechet()) for k in range(1, 8))
    g_omega = remark_b_prime_check(linear_graph_profile(), Frechet())
    ok = finite_ok == finite_total and paths and not g_omega
    report(
        capsys, 8, ok,
        f"finite profiles {finite_ok}/{finite_total} match finite diameter; paths connected: {paths}; G_omega connected: {g_omega}",
    )


def _cli(*argv):
    return subprocess.run([sys.executable, "-m", "redprod.cli", *argv], capture_output=True, check=False).stdout


def test_criterion_9_determinism(capsys, instance_dir):
    commands = [
        ["verify", "--seeds", "60", "--seed", "11", "--json"],
        ["preserve", "--trials", "40", "--seed", "11", "--json"],
        ["check", str(instance_dir / "mixed.rp"), "--json"],
        ["witness", str(instance_dir / "frechet_line.rp"), "--x", "x", "--y", "y", "--json"],
        ["components", str(instance_dir / "direct_disconnected.rp"), "--json"],
    ]
    same = 0
    for argv in commands:
        a, b = _cli(*argv), _cli(*argv)
        same += bool(a) and a == b
    report(capsys, 9, same == len(commands), f"{same}/{len(commands)} commands byte-identical across separate runs")
