"""Command-line interface: ``redprod <command> [instance] [options]``.

Exit codes: 0 success/agreement, 1 usage error, 2 parse error, 3 size cap,
4 oracle disagreement.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import dataclass
from typing import Optional, Sequence

from . import __version__
from .connectivity import (
    build_path_witness,
    components_bfs,
    components_criterion,
    condition_b,
    connected_bfs,
    criterion_level,
    stratify,
)
from .dsl import InstanceError, InstanceSpec, parse_instance, render_instance
from .formulas import (
    FormulaError,
    build_conn_sentence,
    build_dist_formula,
    is_horn,
    is_positive,
    is_sentence,
    negate,
    parse_formula,
)
from .fuzz import conn_sentences, neg_dist_formulas, run_preserve, run_verify
from .products import DEFAULT_CAP, ProductError, SizeCapError, build_reduced_product
from .symbolic import (
    frechet_disconnection_witness,
    linear_graph_profile,
    remark_b_prime_check,
    symbolic_connected,
)

SCHEMA_VERSION = 1
CAP_ENV = "REDPROD_CAP"

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_CAP, EXIT_DISAGREE = 0, 1, 2, 3, 4


class UsageError(Exception):
    code = "E_USAGE"


@dataclass
class Report:
    data: dict
    exit_code: int = EXIT_OK

    def to_json(self) -> str:
        return json.dumps(self.data, sort_keys=True, indent=2) + "\n"

    def to_lines(self) -> str:
        return "".join(f"{k}\t{v}\n" for k, v in _flatten(self.data))


def _flatten(d: dict, prefix: str = ""):
    for k in sorted(d):
        v = d[k]
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            yield from _flatten(v, key + ".")
        elif isinstance(v, (list, tuple)):
            yield key, json.dumps(v, sort_keys=True)
        else:
            yield key, json.dumps(v) if not isinstance(v, str) else v


def _sets(parts) -> list[list[int]]:
    return [sorted(p) for p in parts]


def _digest(spec: Optional[InstanceSpec]) -> Optional[str]:
    if spec is None:
        return None
    return hashlib.sha256(render_instance(spec).encode()).hexdigest()[:16]


def _point(spec: InstanceSpec, token: Optional[str], flag: str) -> tuple[int, ...]:
    if token is None:
        raise UsageError(f"{flag} is required")
    if token in spec.points:
        return spec.points[token]
    try:
        pt = tuple(int(t) for t in token.strip("()").split(","))
    except ValueError:
        raise UsageError(f"{flag}: {token!r} is neither a declared point nor a coordinate list") from None
    factors = spec.factors
    if len(pt) != len(factors) or any(not 0 <= v < X.size for v, X in zip(pt, factors)):
        raise UsageError(f"{flag}: {token!r} does not fit the instance")
    return pt


def _formulas(texts: Optional[Sequence[str]]):
    if not texts:
        return [*neg_dist_formulas(3), *conn_sentences(2)]
    out = []
    for t in texts:
        if t.startswith("notdist:"):
            out.append(negate(build_dist_formula(int(t.split(":")[1]))))
        elif t.startswith("dist:"):
            out.append(build_dist_formula(int(t.split(":")[1])))
        elif t.startswith("conn:"):
            out.append(build_conn_sentence(int(t.split(":")[1])))
        else:
            f, _ = parse_formula(t)
            out.append(f)
    for f in out:
        if not (is_horn(f) or (is_positive(f) and is_sentence(f))):
            raise UsageError(f"formula {f} is neither Horn nor a positive sentence")
    return out


def _require_finite(spec: Optional[InstanceSpec], command: str) -> InstanceSpec:
    if spec is None:
        raise UsageError(f"{command} needs an instance file")
    if spec.is_symbolic:
        raise UsageError(f"{command} is only available for finite instances")
    return spec


def run_command(command: str, spec: Optional[InstanceSpec], flags: argparse.Namespace) -> Report:
    cap = flags.cap
    data: dict = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "seed": flags.seed,
        "instance": None if spec is None else {
            "digest": _digest(spec),
            "kind": "symbolic" if spec.is_symbolic else "finite",
        },
    }
    exit_code = EXIT_OK
    rp = parts = None

    if command == "check":
        if spec is None:
            raise UsageError("check needs an instance file")
        if spec.is_symbolic:
            data["results"] = _symbolic_check(spec)
        else:
            factors, phi = spec.factors, spec.finite_filter()
            rp = build_reduced_product(factors, phi, cap=cap)
            parts = components_bfs(rp)
            cb = condition_b(factors, phi)
            crit = components_criterion(rp)
            bfs = len(parts) == 1
            agree = bfs == (cb is not None) == (len(crit) == 1)
            data["results"] = {
                "classes": len(rp.classes),
                "connected_bfs": bfs,
                "connected_criterion": len(crit) == 1,
                "condition_b": None if cb is None else {"K": sorted(cb.K), "n": cb.n},
                "agreement": agree,
            }
            exit_code = EXIT_OK if agree else EXIT_DISAGREE

    elif command == "components":
        spec = _require_finite(spec, command)
        rp = build_reduced_product(spec.factors, spec.finite_filter(), cap=cap)
        parts = components_bfs(rp)
        crit = components_criterion(rp)
        data["results"] = {
            "classes": len(rp.classes),
            "components_bfs": [[list(rp.reps[k]) for k in sorted(p)] for p in parts],
            "components_criterion": [[list(rp.reps[k]) for k in sorted(p)] for p in crit],
            "count": len(parts),
            "agreement": parts == crit,
        }
        exit_code = EXIT_OK if parts == crit else EXIT_DISAGREE

    elif command == "witness":
        if spec is None:
            raise UsageError("witness needs an instance file")
        if spec.is_symbolic:
            for flag, name in (("--x", flags.x), ("--y", flags.y)):
                if name not in spec.sequences:
                    raise UsageError(f"{flag}: unknown sequence {name!r}")
            cert = symbolic_connected(spec.sequences[flags.x], spec.sequences[flags.y], spec.symbolic_filter())
            data["results"] = {"criterion": cert.connected, "certificate": cert.as_dict()}
        else:
            factors, phi = spec.factors, spec.finite_filter()
            x, y = _point(spec, flags.x, "--x"), _point(spec, flags.y, "--y")
            level = criterion_level(factors, phi, x, y)
            w = build_path_witness(factors, phi, x, y)
            valid = w is not None and w.validate(factors, phi)
            res: dict = {"x": list(x), "y": list(y), "criterion": level is not None, "n": level}
            if w is not None:
                res["witness"] = {
                    "valid": valid,
                    "length": w.length,
                    "segments": [
                        {
                            "over": sorted(s.over),
                            "pattern": list(s.pattern),
                            "chain": [list(p) for p in s.chain],
                        }
                        for s in w.segments
                    ],
                }
            data["results"] = res
            if (w is not None) != (level is not None) or (w is not None and not valid):
                exit_code = EXIT_DISAGREE

    elif command == "condition-b":
        spec = _require_finite(spec, command)
        factors, phi = spec.factors, spec.finite_filter()
        st = stratify(factors, phi)
        cb = condition_b(factors, phi)
        data["results"] = {
            "kernel": sorted(phi.kernel),
            "A": {str(n): sorted(a) for n, a in st.A.items()},
            "layers": {str(n): sorted(a) for n, a in st.layers.items()},
            "I_inf": sorted(st.inf),
            "witness": None if cb is None else {"K": sorted(cb.K), "n": cb.n},
        }

    elif command == "verify":
        tally, failures = run_verify(flags.seed, flags.seeds, flags.max_index, flags.max_size, flags.pairs)
        data["results"] = {
            "trials": tally.trials,
            "condition_b_agree": tally.condition_b_agree,
            "components_agree": tally.components_agree,
            "pairs": tally.pairs,
            "witness_agree": tally.witness_agree,
            "witnesses_returned": tally.witnesses_returned,
            "witnesses_valid": tally.witnesses_valid,
            "connected_instances": tally.connected,
            "agreement": f"{tally.condition_b_agree}/{tally.trials}",
            "failures": failures[:20],
        }
        exit_code = EXIT_OK if tally.all_agree else EXIT_DISAGREE
        if flags.figure:
            from .plotting import plot_verify_summary

            plot_verify_summary(
                {
                    "condition (b)": (tally.condition_b_agree, tally.trials),
                    "components": (tally.components_agree, tally.trials),
                    "witness": (tally.witness_agree, tally.pairs),
                },
                flags.figure,
                f"seed {flags.seed}",
            )

    elif command == "preserve":
        try:
            fs = _formulas(flags.formula)
        except FormulaError as exc:
            raise UsageError(str(exc)) from None
        tallies = run_preserve(fs, flags.seed, flags.trials)
        data["results"] = {
            "formulas": [str(f) for f in fs],
            **{
                name: {"trials": t.trials, "hypothesis_held": t.hypothesis_held, "violations": t.violations}
                for name, t in tallies.items()
            },
        }
        if any(t.violations for t in tallies.values()):
            exit_code = EXIT_DISAGREE

    elif command == "export":
        spec = _require_finite(spec, command)
        rp = build_reduced_product(spec.factors, spec.finite_filter(), cap=cap)
        parts = components_bfs(rp)
        data["results"] = {
            "classes": [list(r) for r in rp.reps],
            "relation": sorted([a, b] for a, b in rp.quotient.relation),
            "components": _sets(parts),
        }
    else:
        raise UsageError(f"unknown command {command!r}")

    if getattr(flags, "dot", None):
        if rp is None:
            raise UsageError("--dot needs a finite instance")
        with open(flags.dot, "w") as fh:
            fh.write(to_dot(rp, parts))
    if getattr(flags, "figure", None) and command != "verify":
        if rp is None:
            raise UsageError("--figure needs a finite instance")
        from .plotting import plot_quotient

        plot_quotient(rp, parts, flags.figure)
    return Report(data, exit_code)


def _symbolic_check(spec: InstanceSpec) -> dict:
    phi = spec.symbolic_filter()
    if phi.kind == "principal":
        # Restricting to the finite kernel leaves a finite direct power of a connected graph.
        return {"connected": True, "reason": "principal filter with finite kernel; every factor is connected"}
    x, y, trace = frechet_disconnection_witness()
    cert = symbolic_connected(x, y, phi)
    res = {
        "connected": cert.connected,
        "witness_pair": {"x": x.describe(), "y": y.describe()},
        "certificate": cert.as_dict(),
        "trace": list(trace.steps),
    }
    if phi.contains_all_cofinite:
        res["b_prime"] = remark_b_prime_check(linear_graph_profile(), phi)
    return res


_PALETTE = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"]


def to_dot(rp, parts=None) -> str:
    parts = parts if parts is not None else components_bfs(rp)
    comp = {k: c for c, p in enumerate(parts) for k in p}
    lines = ["digraph quotient {"]
    for k, rep in enumerate(rp.reps):
        color = _PALETTE[comp[k] % len(_PALETTE)]
        label = ",".join(map(str, rep))
        lines.append(f'  c{k} [label="({label})", style=filled, fillcolor="{color}"];')
    for a, b in sorted(rp.quotient.relation):
        if a != b:
            lines.append(f"  c{a} -> c{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _default_cap() -> int:
    raw = os.environ.get(CAP_ENV)
    return int(raw) if raw else DEFAULT_CAP


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit the JSON report instead of tab-delimited lines")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--cap", type=int, default=None, help=f"tuple enumeration cap (env {CAP_ENV})")
    common.add_argument("--figure", metavar="PNG", help="render a matplotlib figure to this file")
    common.add_argument("--timing", action="store_true", help="include wall time (breaks byte-identical reports)")
    common.add_argument("--allow-improper", action="store_true", help="permit filters with empty kernel")

    p = argparse.ArgumentParser(prog="redprod", description="Connectivity of reduced products of binary structures.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def inst(sp, required=True):
        sp.add_argument("instance", nargs=None if required else "?", help="instance file ('-' for stdin)")

    sp = sub.add_parser("check", parents=[common], help="connectivity by BFS and by condition (b)")
    inst(sp)
    sp.add_argument("--dot", metavar="FILE")
    sp = sub.add_parser("components", parents=[common], help="components by BFS and by the distance-set criterion")
    inst(sp)
    sp.add_argument("--dot", metavar="FILE")
    sp = sub.add_parser("witness", parents=[common], help="path witness or symbolic certificate for two points")
    inst(sp)
    sp.add_argument("--x", required=True)
    sp.add_argument("--y", required=True)
    sp = sub.add_parser("condition-b", parents=[common], help="diameter stratification and condition (b) witness")
    inst(sp)
    sp = sub.add_parser("verify", parents=[common], help="dual-oracle fuzz run over random instances")
    inst(sp, required=False)
    sp.add_argument("--seeds", type=int, default=1000, help="number of random instances")
    sp.add_argument("--max-index", type=int, default=4)
    sp.add_argument("--max-size", type=int, default=4)
    sp.add_argument("--pairs", type=int, default=10, help="point pairs sampled per instance")
    sp = sub.add_parser("preserve", parents=[common], help="Horn / positive preservation falsification run")
    inst(sp, required=False)
    sp.add_argument("--formula", action="append", help="formula text, or notdist:N / dist:N / conn:N")
    sp.add_argument("--trials", type=int, default=500)
    sp = sub.add_parser("export", parents=[common], help="export the quotient structure")
    inst(sp)
    sp.add_argument("--dot", metavar="FILE")
    return p


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _error(code: str, message: str, exit_code: int, as_json: bool, extra: Optional[dict] = None) -> int:
    err = {"code": code, "message": message, **(extra or {})}
    if as_json:
        sys.stdout.write(json.dumps({"schema_version": SCHEMA_VERSION, "error": err}, sort_keys=True, indent=2) + "\n")
    print(f"error [{code}]: {message}", file=sys.stderr)
    return exit_code


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.cap is None:
        args.cap = _default_cap()
    start = time.perf_counter()
    try:
        spec = None
        path = getattr(args, "instance", None)
        if path is not None:
            try:
                text = _read(path)
            except OSError as exc:
                raise UsageError(str(exc)) from None
            spec = parse_instance(text, allow_improper=args.allow_improper)
        report = run_command(args.command, spec, args)
    except InstanceError as exc:
        return _error(exc.code, exc.message, EXIT_PARSE, args.json, {"line": exc.line, "column": exc.column})
    except SizeCapError as exc:
        return _error("E_SIZE_CAP", str(exc), EXIT_CAP, args.json)
    except (UsageError, ProductError) as exc:
        return _error(UsageError.code, str(exc), EXIT_USAGE, args.json)
    if args.timing:
        report.data["timing_seconds"] = round(time.perf_counter() - start, 6)
    sys.stdout.write(report.to_json() if args.json else report.to_lines())
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
