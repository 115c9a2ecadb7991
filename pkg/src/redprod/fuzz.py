"""Seeded random instances and the fuzz harnesses built on them.

Each trial draws from its own ``random.Random`` seeded by ``"<seed>:<trial>"``,
so results do not depend on trial order or on how many trials ran before.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .connectivity import (
    build_path_witness,
    components_bfs,
    components_criterion,
    condition_b,
    connected_bfs,
    connected_criterion,
    criterion_level,
)
from .filters import Filter, make_filter, principal_filter, trivial_filter
from .formulas import (
    Formula,
    build_conn_sentence,
    build_dist_formula,
    check_horn_preservation,
    check_positive_factor_preservation,
    free_vars,
    is_horn,
    is_positive,
    is_sentence,
    negate,
)
from .products import build_reduced_product, restrict_iso, is_isomorphism
from .structure import BinaryStructure, is_connected, linear_path, reflexivize
from .symbolic import (
    Affine,
    Constant,
    EventuallyAffine,
    PrincipalFinite,
    SymbolicSequence,
    symbolic_connected,
)

EDGE_PROBS = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6)


def trial_rng(seed: int, trial: int) -> random.Random:
    return random.Random(f"{seed}:{trial}")


def random_structure(rng: random.Random, size: int, p: Optional[float] = None) -> BinaryStructure:
    p = rng.choice(EDGE_PROBS) if p is None else p
    return BinaryStructure(size, frozenset((u, v) for u in range(size) for v in range(size) if rng.random() < p))


def random_filter(rng: random.Random, index_size: int) -> Filter:
    """A random generator family with nonempty intersection."""
    while True:
        gens = [
            frozenset(i for i in range(index_size) if rng.random() < 0.7)
            for _ in range(rng.randint(1, 3))
        ]
        if frozenset.intersection(*gens):
            return make_filter(index_size, gens)


def random_instance(
    rng: random.Random, max_index: int = 4, max_size: int = 4
) -> tuple[list[BinaryStructure], Filter]:
    m = rng.randint(1, max_index)
    factors = [random_structure(rng, rng.randint(1, max_size)) for _ in range(m)]
    return factors, random_filter(rng, m)


def random_point(rng: random.Random, factors: Sequence[BinaryStructure]) -> tuple[int, ...]:
    return tuple(rng.randrange(X.size) for X in factors)


@dataclass
class VerifyTally:
    trials: int = 0
    condition_b_agree: int = 0
    components_agree: int = 0
    pairs: int = 0
    witness_agree: int = 0
    witnesses_valid: int = 0
    witnesses_returned: int = 0
    connected: int = 0

    @property
    def all_agree(self) -> bool:
        return (
            self.condition_b_agree == self.trials
            and self.components_agree == self.trials
            and self.witness_agree == self.pairs
            and self.witnesses_valid == self.witnesses_returned
        )


def verify_trial(rng: random.Random, max_index: int, max_size: int, pairs: int) -> dict:
    factors, phi = random_instance(rng, max_index, max_size)
    rp = build_reduced_product(factors, phi)
    bfs = connected_bfs(rp)
    cb = condition_b(factors, phi)
    parts_bfs = components_bfs(rp)
    parts_crit = components_criterion(rp)
    out = {
        "connected_bfs": bfs,
        "condition_b": None if cb is None else {"K": sorted(cb.K), "n": cb.n},
        "condition_b_agree": bfs == (cb is not None),
        "components": len(parts_bfs),
        "components_agree": parts_bfs == parts_crit,
        "pairs": 0,
        "witness_agree": 0,
        "witnesses_returned": 0,
        "witnesses_valid": 0,
    }
    cls_of = {k: idx for idx, part in enumerate(parts_bfs) for k in part}
    for _ in range(pairs):
        x, y = random_point(rng, factors), random_point(rng, factors)
        same = cls_of[rp.class_of(x)] == cls_of[rp.class_of(y)]
        crit = connected_criterion(factors, phi, x, y)
        w = build_path_witness(factors, phi, x, y)
        out["pairs"] += 1
        out["witness_agree"] += int(same == crit == (w is not None))
        if w is not None:
            out["witnesses_returned"] += 1
            out["witnesses_valid"] += int(w.validate(factors, phi))
    return out


def run_verify(
    seed: int, trials: int, max_index: int = 4, max_size: int = 4, pairs: int = 10
) -> tuple[VerifyTally, list[dict]]:
    tally = VerifyTally()
    failures = []
    for t in range(trials):
        r = verify_trial(trial_rng(seed, t), max_index, max_size, pairs)
        tally.trials += 1
        tally.condition_b_agree += r["condition_b_agree"]
        tally.components_agree += r["components_agree"]
        tally.connected += r["connected_bfs"]
        for key in ("pairs", "witness_agree", "witnesses_returned", "witnesses_valid"):
            setattr(tally, key, getattr(tally, key) + r[key])
        if not (r["condition_b_agree"] and r["components_agree"] and r["witness_agree"] == r["pairs"]):
            failures.append({"trial": t, **r})
    return tally, failures


def restriction_trial(rng: random.Random, max_index: int = 4, max_size: int = 3) -> bool:
    """Restriction to a random filter set is an isomorphism of reduced products."""
    factors, phi = random_instance(rng, max_index, max_size)
    J = phi.kernel | {i for i in range(phi.index_size) if rng.random() < 0.5}
    iso = restrict_iso(build_reduced_product(factors, phi), J)
    return is_isomorphism(iso.source.quotient, iso.target.quotient, iso.mapping)


def direct_product_trial(rng: random.Random, max_index: int = 4, max_size: int = 3) -> tuple[bool, bool]:
    """(product connected, all factors connected) for a direct product."""
    m = rng.randint(1, max_index)
    factors = [random_structure(rng, rng.randint(1, max_size)) for _ in range(m)]
    rp = build_reduced_product(factors, trivial_filter(m))
    return connected_bfs(rp), all(is_connected(X) for X in factors)


# --- preservation fuzzing -------------------------------------------------

@dataclass
class PreserveTally:
    trials: int = 0
    hypothesis_held: int = 0
    violations: int = 0


def horn_trial(rng: random.Random, f: Formula, max_index: int = 3, max_size: int = 3) -> tuple[bool, bool]:
    factors, phi = random_instance(rng, max_index, max_size)
    points = [random_point(rng, factors) for _ in free_vars(f)]
    v = check_horn_preservation(factors, phi, f, points)
    return v.hypothesis, v.violated


def positive_trial(rng: random.Random, f: Formula, max_index: int = 3, max_size: int = 3) -> tuple[bool, bool]:
    factors, phi = random_instance(rng, max_index, max_size)
    if rng.random() < 0.5:
        factors = [reflexivize(X) for X in factors]
    v = check_positive_factor_preservation(factors, phi, f)
    return v.hypothesis, v.violated


def run_preserve(
    formulas: Sequence[Formula], seed: int, trials: int, max_index: int = 3, max_size: int = 3
) -> dict[str, PreserveTally]:
    """Cycle through ``formulas``; each trial runs every harness the formula qualifies for."""
    tallies = {"horn": PreserveTally(), "positive": PreserveTally()}
    for t in range(trials):
        f = formulas[t % len(formulas)]
        rng = trial_rng(seed, t)
        runs: list[tuple[str, Callable]] = []
        if is_horn(f):
            runs.append(("horn", horn_trial))
        if is_positive(f) and is_sentence(f):
            runs.append(("positive", positive_trial))
        for name, trial in runs:
            held, bad = trial(rng, f, max_index, max_size)
            tally = tallies[name]
            tally.trials += 1
            tally.hypothesis_held += held
            tally.violations += bad
    return {k: v for k, v in tallies.items() if v.trials}


def neg_dist_formulas(max_n: int = 3) -> list[Formula]:
    return [negate(build_dist_formula(n)) for n in range(max_n + 1)]


def conn_sentences(max_n: int = 2) -> list[Formula]:
    return [build_conn_sentence(n) for n in range(max_n + 1)]


# --- symbolic truncation --------------------------------------------------

def random_sequence(rng: random.Random) -> SymbolicSequence:
    kind = rng.choice(("constant", "affine", "eventually"))
    if kind == "constant":
        return Constant(rng.randint(0, 6))
    if kind == "affine":
        return Affine(rng.randint(0, 2), rng.randint(0, 4))
    return EventuallyAffine([rng.randint(0, 6) for _ in range(rng.randint(1, 3))], rng.randint(0, 2), rng.randint(0, 4))


def truncation_trial(rng: random.Random) -> dict:
    """Compare the symbolic answer under a finite principal filter with finite computations.

    The truncated instance has one finite path graph per index ``0..N`` (large
    enough to hold every value used); the filter is principal with the same
    kernel. Connectivity is decided by the finite criterion, and, on the
    product restricted to the kernel, by BFS.
    """
    x, y = random_sequence(rng), random_sequence(rng)
    N = rng.randint(1, 6)
    K = frozenset(rng.sample(range(N + 1), rng.randint(1, min(2, N + 1))))
    cert = symbolic_connected(x, y, PrincipalFinite(K))
    M = 1 + max(max(x(i), y(i)) for i in range(N + 1))
    G = linear_path(M, symmetric=True)
    factors = [G] * (N + 1)
    phi = principal_filter(N + 1, K)
    xs = tuple(x(i) for i in range(N + 1))
    ys = tuple(y(i) for i in range(N + 1))
    level = criterion_level(factors, phi, xs, ys)
    kpos = sorted(K)
    sub = build_reduced_product([G] * len(kpos), trivial_filter(len(kpos)))
    a = sub.class_of(tuple(xs[i] for i in kpos))
    b = sub.class_of(tuple(ys[i] for i in kpos))
    parts = components_bfs(sub)
    bfs_same = any(a in p and b in p for p in parts)
    return {
        "symbolic": cert.connected,
        "symbolic_n": cert.n,
        "finite": level is not None,
        "finite_n": level,
        "bfs": bfs_same,
        "agree": cert.connected == (level is not None) == bfs_same and cert.n == level,
    }
