"""Command line: ``symfix fix``, ``symfix check``, ``symfix bench``, ``symfix gen``.

Exit codes: 0 success / proof verified, 1 proof rejected, 2 usage, parse or
configuration error, 20 the fixed formula is unsatisfiable by propagation.
"""

import argparse
import logging
import os
import sys
import time

from . import bench
from .checker import check_proof
from .cnf import DEFAULT_MAX_INPUT_BYTES, ParseError, parse_dimacs, simplify, write_dimacs
from .fixing import FixConfig, FixingResult, run_pipeline
from .group import SSLimits
from .proof import ProofParseError, compose_with_refutation, emit_proof, format_proof, parse_proof
from .structure import parse_orbitope_hints
from .symmetry import GeneratorError, find_symmetries, parse_generators

EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_ERROR = 2
EXIT_UNSAT = 20


def _read(path):
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def _write(path, data):
    if path is None or path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, "wb") as fh:
            fh.write(data)


def _stat_lines(stats):
    return "".join(f"c {k} {v}\n" for k, v in stats.items()).encode()


def main_fix(args):
    t0 = time.perf_counter()
    try:
        data = _read(args.cnf)
        formula = parse_dimacs(data, max_bytes=args.max_input_bytes)
    except (OSError, ParseError) as exc:
        print(f"c error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    rules = {"orbitopal": args.orbitopal, "negation": args.negation, "clausal": args.clausal}
    if args.all:
        rules = dict.fromkeys(rules, True)
    hints = None
    if args.orbitopes:
        try:
            hints = parse_orbitope_hints(_read(args.orbitopes))
        except (OSError, ValueError) as exc:
            print(f"c error: orbitope hints: {exc}", file=sys.stderr)
            return EXIT_ERROR
    config = FixConfig(
        **rules,
        stabilizer=args.stabilizer,
        ss_limits=SSLimits(max_base=args.ss_limit, max_transversal=args.ss_storage),
        orbitope_hints=hints,
    )

    simplified, slog = simplify(formula)
    stats = {"vars": formula.num_vars, "clauses": len(formula)}
    stats.update(slog.counts())
    if slog.unsat:
        result = FixingResult(unsat=True)
    else:
        if args.symmetries:
            try:
                # validated against the input; simplification preserves every symmetry
                gens = parse_generators(_read(args.symmetries), formula)
            except (GeneratorError, OSError) as exc:
                print(f"c error: {exc}", file=sys.stderr)
                return EXIT_ERROR
            stats["symmetry_source"] = "file"
        else:
            search = find_symmetries(simplified, max_nodes=args.search_nodes)
            gens = search.generators
            stats["symmetry_source"] = "search" if search.complete else "search-incomplete"
        result = run_pipeline(simplified, gens, config)
        stats.update(result.stats)
    stats["unsat"] = int(result.unsat)
    stats["total_ms"] = round(1000 * (time.perf_counter() - t0), 3)

    # residual formula plus every derived unit; a single empty clause when unsat by simplification
    out = write_dimacs(simplified, [] if slog.unsat else list(slog.units) + result.literals)
    if args.stats:
        out = _stat_lines(stats) + out
    _write(args.out, out)
    if args.proof:
        _write(args.proof, format_proof(emit_proof(result, delete_binaries=args.delete_binaries)))
    return EXIT_UNSAT if result.unsat else EXIT_OK


def main_check(args):
    try:
        formula = parse_dimacs(_read(args.cnf), max_bytes=None)
        proof = _read(args.proof)
        if args.compose:
            steps = [s for _, s in parse_proof(proof)]
            proof = compose_with_refutation(steps, _read(args.compose))
        else:
            parse_proof(proof)
    except (OSError, ParseError, ProofParseError) as exc:
        print(f"c error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    verdict = check_proof(formula, proof, strict=args.strict)
    if not verdict.accepted:
        print(f"c {verdict.reason}")
    elif verdict.refuted:
        print("c proof derives the empty clause")
    print(verdict.summary())
    return EXIT_OK if verdict.accepted else EXIT_REJECTED


def _parse_family(text):
    name, _, params = text.partition(":")
    gen = {"php": bench.gen_php, "parity": bench.gen_parity}.get(name)
    if gen is None:
        raise argparse.ArgumentTypeError(f"unknown family {name!r} (php:M,N or parity:N,C)")
    try:
        return gen(*[int(x) for x in params.split(",") if x])
    except (TypeError, ValueError) as exc:
        raise argparse.ArgumentTypeError(f"bad parameters for {name}: {exc}") from None


def main_bench(args):
    families = args.family or None
    settings = args.setting or ["all-units"]
    rows = bench.run_suite(families, settings, search=args.search)
    sys.stdout.write(bench.report_table(rows))
    for setting, agg in bench.aggregate(rows).items():
        print(f"c {setting} " + " ".join(f"{k}={v:.3f}" if isinstance(v, float) else f"{k}={v}"
                                         for k, v in agg.items()))
    if args.csv:
        _write(args.csv, bench.report_csv(rows).encode())
    if args.figures is not None:
        from .plotting import render_suite_figures

        # bare --figures: next to the CSV, else the working directory
        outdir = args.figures or (os.path.dirname(args.csv) if args.csv else "") or "."
        for path in render_suite_figures(rows, outdir):
            print(f"c figure {path}")
    failed = [r for r in rows if not r["proof_ok"] or r["equisat_ok"] is False]
    return EXIT_REJECTED if failed else EXIT_OK


def main_gen(args):
    gen = bench.gen_php if args.family == "php" else bench.gen_parity
    try:
        inst = gen(*args.params)
    except ValueError as exc:
        print(f"c error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    _write(args.out, write_dimacs(inst.formula))
    if args.symmetries:
        from .symmetry import format_generators

        _write(args.symmetries, format_generators(inst.generators).encode())
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="symfix", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fix", help="add symmetry-breaking units and emit a proof")
    p.add_argument("cnf")
    p.add_argument("--orbitopal", action="store_true")
    p.add_argument("--negation", action="store_true")
    p.add_argument("--clausal", action="store_true")
    p.add_argument("--all", action="store_true", help="all rules (all-units)")
    p.add_argument("--symmetries", help="generator file; default is the built-in search")
    p.add_argument("--orbitopes", help="orbitope hint file")
    p.add_argument("--proof", help="write the proof here")
    p.add_argument("--out", help="write the fixed formula here (default stdout)")
    p.add_argument("--stats", action="store_true", help="prefix the formula with 'c key value' lines")
    p.add_argument("--max-input-bytes", type=int, default=DEFAULT_MAX_INPUT_BYTES)
    p.add_argument("--ss-limit", type=int, default=SSLimits.max_base, help="Schreier-Sims base length budget")
    p.add_argument("--ss-storage", type=int, default=SSLimits.max_transversal)
    p.add_argument("--stabilizer", choices=("exact", "filter"), default="exact")
    p.add_argument("--search-nodes", type=int, default=10**6)
    p.add_argument("--delete-binaries", action="store_true")
    p.set_defaults(func=main_fix)

    p = sub.add_parser("check", help="verify a proof against a formula")
    p.add_argument("--strict", action="store_true", help="disable syntactic shortcuts")
    p.add_argument("--compose", metavar="REFUTATION", help="append a witness-free proof first")
    p.add_argument("cnf")
    p.add_argument("proof")
    p.set_defaults(func=main_check)

    p = sub.add_parser("bench", help="run the synthetic suite")
    p.add_argument("--family", action="append", type=_parse_family, help="php:M,N or parity:N,C (repeatable)")
    p.add_argument("--setting", action="append", choices=sorted(bench.SETTINGS))
    p.add_argument("--search", action="store_true", help="use the built-in symmetry search")
    p.add_argument("--csv")
    p.add_argument("--figures", metavar="DIR", nargs="?", const="",
                   help="write PNG figures to DIR (default: next to the CSV)")
    p.set_defaults(func=main_bench)

    p = sub.add_parser("gen", help="write a family instance as DIMACS")
    p.add_argument("family", choices=("php", "parity"))
    p.add_argument("params", type=int, nargs=2)
    p.add_argument("--out")
    p.add_argument("--symmetries", help="also write the attached generators")
    p.set_defaults(func=main_gen)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="c %(name)s: %(message)s", stream=sys.stderr)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
