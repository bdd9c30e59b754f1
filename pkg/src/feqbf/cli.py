"""Command-line interface.

Exit codes follow the SAT-solver convention: 10 for TRUE, 20 for FALSE,
0 for successful auxiliary commands, 2 for a verification mismatch, and 1
for any error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .formulas import DnfFormula, QbfInstance
from .generate import random_dnf, random_forall_exists
from .oracle import DEFAULT_VARIABLE_BOUND, OracleLimitError, check_equivalence, eval_qbf
from .qdimacs import emit_dnf, emit_qdimacs, parse_dnf, parse_qdimacs
from .reductions import (
    ReductionOutput,
    provenance_text,
    reduce_dnf_to_4qbf,
    reduce_dnf_to_fe_dqbf,
)
from .solver import SolverConfig, ae_blocks, solve, stats_csv_header, stats_csv_row

EXIT_TRUE = 10
EXIT_FALSE = 20
EXIT_ERROR = 1
EXIT_MISMATCH = 2


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to reproduce a run bit for bit."""

    command: str
    seed: int | None
    inputs: tuple[str, ...]
    config: dict = field(default_factory=dict)
    version: str = __version__

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"


def _write_manifest(path: str | None, manifest: RunManifest) -> None:
    if path:
        Path(path).write_text(manifest.to_json())


def _load_qbf(path: str) -> QbfInstance:
    return parse_qdimacs(Path(path).read_text())


def _load_dnf(path: str) -> DnfFormula:
    formula, dropped = parse_dnf(Path(path).read_text())
    if dropped:
        print(f"warning: dropped {dropped} contradictory term(s)", file=sys.stderr)
    return formula


def _result_line(value: bool) -> int:
    print("TRUE" if value else "FALSE")
    return EXIT_TRUE if value else EXIT_FALSE


def cmd_solve(args) -> int:
    instance = _load_qbf(args.path)
    config = SolverConfig(
        threshold_override=args.threshold_override,
        parallel_branching=args.parallel,
    )
    start = time.perf_counter()
    result, stats = solve(instance, config)
    elapsed_ms = (time.perf_counter() - start) * 1000.0
    if args.stats_csv:
        _, existential = ae_blocks(instance)
        d = instance.matrix.max_arity()
        row = stats_csv_row(Path(args.path).stem, len(existential), d, result, stats, elapsed_ms)
        Path(args.stats_csv).write_text(stats_csv_header() + "\n" + row + "\n")
    return _result_line(result)


def cmd_oracle(args) -> int:
    instance = _load_qbf(args.path)
    return _result_line(eval_qbf(instance, var_bound=args.bound))


def _negate_cnf(instance: QbfInstance) -> DnfFormula:
    # The complement of a CNF is the DNF of its negated clauses; validity of
    # the result is unsatisfiability of the input.
    terms = tuple(frozenset(-lit for lit in clause) for clause in instance.matrix.clauses)
    return DnfFormula(terms, instance.matrix.num_vars)


def cmd_reduce(args) -> int:
    if args.negate_cnf:
        psi = _negate_cnf(parse_qdimacs(Path(args.path).read_text()))
    else:
        psi = _load_dnf(args.path)
    if args.theorem == 1:
        output: ReductionOutput = reduce_dnf_to_4qbf(psi, args.base_threshold)
    else:
        output = reduce_dnf_to_fe_dqbf(psi, args.d)
    text = emit_qdimacs(output.instance)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.provenance:
        Path(args.provenance).write_text(provenance_text(output))
    print(f"existential_count={output.existential_count} alternations={output.alternations}")
    _write_manifest(
        args.manifest,
        RunManifest(
            command="reduce",
            seed=None,
            inputs=(args.path,),
            config={
                "theorem": args.theorem,
                "d": args.d,
                "base_threshold": args.base_threshold,
                "negate_cnf": args.negate_cnf,
            },
        ),
    )
    return 0


def _read_var_map(path: str, num_sources: int) -> tuple[int, ...]:
    """Map file: one 'source_var target_var' pair per line."""
    table: dict[int, int] = {}
    for line_no, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        fields = line.split()
        if len(fields) != 2 or not all(f.lstrip("-").isdigit() for f in fields):
            raise ValueError(f"map line {line_no}: expected 'source target'")
        source, target = int(fields[0]), int(fields[1])
        if source in table:
            raise ValueError(f"map line {line_no}: source variable {source} mapped twice")
        table[source] = target
    if set(table) != set(range(1, num_sources + 1)):
        raise ValueError(f"map must cover source variables 1..{num_sources} exactly")
    return tuple(table[i] for i in range(1, num_sources + 1))


def cmd_verify(args) -> int:
    psi = _load_dnf(args.dnf)
    phi = _load_qbf(args.qbf)
    x_map = _read_var_map(args.map, psi.num_vars) if args.map else None
    report = check_equivalence(psi, phi, mode=args.mode, x_map=x_map, var_bound=args.bound)
    print(report.summary())
    if args.csv:
        Path(args.csv).write_text(report.to_csv())
    return 0 if report.passed else EXIT_MISMATCH


def cmd_gen(args) -> int:
    if args.kind == "dnf":
        formula = random_dnf(args.n, args.m, arity=args.d, seed=args.seed, distinct=args.distinct)
        text = emit_dnf(formula)
        config = {"kind": "dnf", "n": args.n, "m": args.m, "d": args.d, "distinct": args.distinct}
    else:
        instance = random_forall_exists(
            args.n, args.k, args.m, arity=args.d, seed=args.seed, distinct=args.distinct
        )
        text = emit_qdimacs(instance)
        config = {
            "kind": "feqbf",
            "n": args.n,
            "k": args.k,
            "m": args.m,
            "d": args.d,
            "distinct": args.distinct,
        }
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    _write_manifest(
        args.manifest,
        RunManifest(command="gen", seed=args.seed, inputs=(), config=config),
    )
    return 0


def cmd_bench(args) -> int:
    corpus = Path(args.corpus)
    if not corpus.is_dir():
        raise ValueError(f"corpus directory {args.corpus} is not readable")
    header = stats_csv_header() + ",agreement,leaf_bound_log2"
    rows = [header]
    for path in sorted(corpus.glob("*.qdimacs")):
        instance = parse_qdimacs(path.read_text())
        start = time.perf_counter()
        result, stats = solve(instance)
        elapsed_ms = (time.perf_counter() - start) * 1000.0
        _, existential = ae_blocks(instance)
        k = len(existential)
        d = instance.matrix.max_arity()
        try:
            agreement = int(result == eval_qbf(instance, var_bound=args.oracle_bound))
        except OracleLimitError:
            agreement = ""
        bound_log2 = (
            d * d * ((2**d) * d * math.log(k)) * k ** (d - 1) if k >= 2 and d >= 1 else 0.0
        )
        row = stats_csv_row(path.stem, k, d, result, stats, elapsed_ms)
        rows.append(f"{row},{agreement},{bound_log2:.3f}")
    Path(args.out).write_text("\n".join(rows) + "\n")
    _write_manifest(
        args.manifest,
        RunManifest(
            command="bench",
            seed=None,
            inputs=(args.corpus,),
            config={"oracle_bound": args.oracle_bound},
        ),
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="feqbf",
        description="Forall-exists QBF toolkit: solver, reductions, brute-force oracle",
    )
    parser.add_argument("--version", action="version", version=f"feqbf {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="decide a forall-exists QDIMACS instance")
    p_solve.add_argument("path")
    p_solve.add_argument("--threshold-override", type=float, default=None)
    p_solve.add_argument("--parallel", action="store_true")
    p_solve.add_argument("--stats-csv", default=None)
    p_solve.set_defaults(func=cmd_solve)

    p_oracle = sub.add_parser("oracle", help="decide any QDIMACS instance by brute force")
    p_oracle.add_argument("path")
    p_oracle.add_argument("--bound", type=int, default=DEFAULT_VARIABLE_BOUND)
    p_oracle.set_defaults(func=cmd_oracle)

    p_reduce = sub.add_parser("reduce", help="reduce a DNF file to a QDIMACS instance")
    p_reduce.add_argument("path")
    p_reduce.add_argument("--theorem", type=int, choices=(1, 2), required=True)
    p_reduce.add_argument("--d", type=int, default=3, help="target arity (theorem 2)")
    p_reduce.add_argument("--base-threshold", type=int, default=20, help="theorem 1 base case size")
    p_reduce.add_argument("--out", default=None)
    p_reduce.add_argument("--provenance", default=None)
    p_reduce.add_argument("--negate-cnf", action="store_true",
                          help="read a DIMACS CNF and reduce its complement DNF")
    p_reduce.add_argument("--manifest", default=None)
    p_reduce.set_defaults(func=cmd_reduce)

    p_verify = sub.add_parser("verify", help="check a DNF against a reduction output")
    p_verify.add_argument("dnf")
    p_verify.add_argument("qbf")
    p_verify.add_argument("--mode", choices=("general", "forall_exists"), default="general")
    p_verify.add_argument("--map", default=None,
                          help="explicit variable map file (default: positional)")
    p_verify.add_argument("--bound", type=int, default=DEFAULT_VARIABLE_BOUND)
    p_verify.add_argument("--csv", default=None)
    p_verify.set_defaults(func=cmd_verify)

    p_gen = sub.add_parser("gen", help="generate a seeded random instance")
    p_gen.add_argument("--kind", choices=("dnf", "feqbf"), required=True)
    p_gen.add_argument("--n", type=int, required=True, help="variables (dnf) or universals (feqbf)")
    p_gen.add_argument("--m", type=int, required=True, help="terms or clauses")
    p_gen.add_argument("--k", type=int, default=0, help="existential variables (feqbf)")
    p_gen.add_argument("--d", type=int, default=3, help="arity")
    p_gen.add_argument("--seed", type=int, required=True)
    p_gen.add_argument("--distinct", action="store_true")
    p_gen.add_argument("--out", default=None)
    p_gen.add_argument("--manifest", default=None)
    p_gen.set_defaults(func=cmd_gen)

    p_bench = sub.add_parser("bench", help="run the solver over a directory of instances")
    p_bench.add_argument("--corpus", required=True)
    p_bench.add_argument("--out", required=True)
    p_bench.add_argument("--oracle-bound", type=int, default=DEFAULT_VARIABLE_BOUND)
    p_bench.add_argument("--manifest", default=None)
    p_bench.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
