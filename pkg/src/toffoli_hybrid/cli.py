"""Command-line entry point (``toffoli-hybrid`` or ``python -m toffoli_hybrid``).

Code operands: ``builtin15``, a matrix file holding a triorthogonal ``G``,
``css:C1FILE,C2FILE`` (generator files of C1 and C2) or ``mirror:OPERAND``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import circuits, cost, distill
from .codes import (
    ClassicalCode,
    CssCode,
    TriorthogonalCode,
    as_css,
    build_css,
    build_triorthogonal,
    builtin_15_1_3,
    check_triorthogonal,
    code_distance,
    mirror,
)
from .gf2 import BinaryMatrix, EnumerationLimitError
from .transversality import (
    HybridSystem,
    check_cnot_condition,
    check_cz_condition,
    verify_cnot_coset,
    verify_cz_phase,
    verify_t_transversality,
    verify_toffoli_transversality,
    verify_tx_transversality,
)


def load_code(token: str) -> CssCode | TriorthogonalCode:
    if token == "builtin15":
        return builtin_15_1_3()
    if token.startswith("mirror:"):
        return mirror(load_code(token[len("mirror:") :]))
    if token.startswith("css:"):
        c1, c2 = token[len("css:") :].split(",")
        return build_css(
            ClassicalCode.spanned_by(BinaryMatrix.load(c1)), ClassicalCode.spanned_by(BinaryMatrix.load(c2))
        )
    return build_triorthogonal(BinaryMatrix.load(token))


def _print(obj) -> None:
    print(json.dumps(obj, indent=2))


def cmd_build_css(args) -> int:
    c1 = ClassicalCode.spanned_by(BinaryMatrix.load(args.c1))
    c2 = ClassicalCode.spanned_by(BinaryMatrix.load(args.c2))
    q = build_css(c1, c2)
    _print(q.describe(_distance(q, args.distance)))
    return 0


def _distance(q, wanted: bool) -> int | None:
    if not wanted:
        return None
    try:
        return code_distance(q)
    except EnumerationLimitError:
        return None


def cmd_check_tri(args) -> int:
    g = BinaryMatrix.load(args.matrix)
    report = check_triorthogonal(g)
    out = report.as_dict()
    if report.is_triorthogonal and args.build:
        out["code"] = build_triorthogonal(g).base.describe(_distance(build_triorthogonal(g), args.distance))
    _print(out)
    return 0 if report.is_triorthogonal else 1


_DEFAULT_OPERANDS = {
    "cnot": ["builtin15", "mirror:builtin15"],
    "cz": ["builtin15", "mirror:builtin15"],
    "t": ["builtin15"],
    "tx": ["mirror:builtin15"],
    "toffoli": ["builtin15", "builtin15", "mirror:builtin15"],
}


def cmd_verify(args) -> int:
    tokens = args.codes or _DEFAULT_OPERANDS[args.gate]
    need = len(_DEFAULT_OPERANDS[args.gate])
    if len(tokens) != need:
        raise SystemExit(f"--gate {args.gate} takes {need} code operand(s)")
    codes = [load_code(t) for t in tokens]
    css = [as_css(c) for c in codes]
    if args.gate == "cnot":
        verdict = verify_cnot_coset(*css)
        extra = {"condition": check_cnot_condition(*css).as_dict()}
    elif args.gate == "cz":
        verdict = verify_cz_phase(*css)
        extra = {"condition": check_cz_condition(*css).as_dict()}
    elif args.gate == "t":
        verdict, extra = verify_t_transversality(codes[0]), {}
    elif args.gate == "tx":
        verdict, extra = verify_tx_transversality(css[0], mirror(css[0])), {}
    else:
        verdict, extra = verify_toffoli_transversality(HybridSystem(*css)), {}
    out = verdict.as_dict()
    out.update(extra)
    _print(out)
    return 0 if verdict.holds else 1


def cmd_circuit(args) -> int:
    if args.check:
        devs = circuits.check_identities()
        ok = all(v < 1e-10 for v in devs.values())
        _print({"max_deviation": devs, "all_below_1e-10": ok})
        return 0 if ok else 1
    make = {
        "fig2": circuits.toffoli_decomposition_standard,
        "fig3": circuits.toffoli_decomposition_hybrid,
        "gadget": circuits.toffoli_gadget,
    }[args.which]
    sys.stdout.write(make().dumps())
    return 0


def _system(token: str) -> HybridSystem:
    return HybridSystem.from_triorthogonal(load_code(token))


def cmd_distill(args) -> int:
    system = _system(args.code)
    if args.mode == "exact":
        report = distill.exact_report(system, args.p)
    else:
        report = distill.monte_carlo(system, args.p, args.trials, args.seed, args.workers)
    _print(report.as_dict())
    return 0


def cmd_threshold(args) -> int:
    block = distill.analyze_block(load_code(args.code))
    p_star = distill.find_threshold(block)
    _print({"p_star": p_star, "toffoli_threshold": distill.toffoli_threshold(p_star)})
    return 0


def _level_model(token: str, truncated: bool):
    if token.startswith("3k8:"):
        return distill.Family3k8(int(token[4:]))
    if truncated:
        return distill.TruncatedModel()
    return distill.HybridAnalysis.from_system(_system(token))


def cmd_levels(args) -> int:
    model = _level_model(args.code, args.truncated)
    trace = distill.iterate_levels(args.p0, args.target, model, args.tolerance)
    _print([t.__dict__ for t in trace])
    return 0


def _plans(args) -> tuple[cost.CostCurve, list[str], list[cost.CostPlan | None]]:
    names = cost.PROTOCOLS if args.protocol == "all" else [{"3k8": "family3k8"}.get(args.protocol, args.protocol)]
    targets = cost.DEFAULT_GRID if args.grid else [args.target]
    curve = cost.cost_curves(args.p0, targets, args.tolerance)
    out = []
    for i, _ in enumerate(curve.targets):
        out += [curve.plans[n][i] for n in names]
    return curve, names, out


def cmd_cost(args) -> int:
    if args.target is None and not args.grid:
        raise SystemExit("cost needs --target F or --grid")
    curve, names, plans = _plans(args)
    if args.format == "json":
        _print([p.as_dict() if p else None for p in plans])
    else:
        rows = [r for r in cost.fig5_rows(curve) if r["protocol"] in names]
        cost.write_csv(rows, cost.FIG5_HEADER, sys.stdout)
    return 0


def cmd_plot_data(args) -> int:
    f5, f6 = cost.write_plot_data(args.out, args.p0, decade_tolerance=args.tolerance)
    _print({"fig5": str(f5), "fig6": str(f6)})
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="toffoli-hybrid", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-css", help="CSS code from C1 and C2 generator files")
    p.add_argument("c1")
    p.add_argument("c2")
    p.add_argument("--distance", action="store_true", help="brute-force the distance")
    p.set_defaults(func=cmd_build_css)

    p = sub.add_parser("check-tri", help="triorthogonality report for a matrix file")
    p.add_argument("matrix")
    p.add_argument("--build", action="store_true", help="also emit the code description")
    p.add_argument("--distance", action="store_true")
    p.set_defaults(func=cmd_check_tri)

    p = sub.add_parser("verify", help="transversal gate checks")
    p.add_argument("--gate", required=True, choices=sorted(_DEFAULT_OPERANDS))
    p.add_argument("codes", nargs="*", help="code operands (defaults to the built-in hybrid setup)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("circuit", help="emit or check the Toffoli circuits")
    p.add_argument("--which", choices=["fig2", "fig3", "gadget"], default="fig2")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--emit", action="store_true", help="print the circuit text (default)")
    mode.add_argument("--check", action="store_true", help="run the identity suite")
    p.set_defaults(func=cmd_circuit)

    p = sub.add_parser("distill", help="one distillation round, exact or sampled")
    p.add_argument("--mode", choices=["exact", "mc"], default="exact")
    p.add_argument("--code", default="builtin15")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_distill)

    p = sub.add_parser("threshold", help="fixed point of the output-error map")
    p.add_argument("--code", default="builtin15")
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("levels", help="multi-level error iteration")
    p.add_argument("--p0", type=float, required=True)
    p.add_argument("--target", type=float, required=True)
    p.add_argument("--code", default="builtin15", help="builtin15, a matrix file or 3k8:K")
    p.add_argument("--truncated", action="store_true", help="use the leading 35 p^3 map")
    p.add_argument("--tolerance", type=float, default=0.5, help="decades of slack on the target")
    p.set_defaults(func=cmd_levels)

    p = sub.add_parser("cost", help="expected qubit cost")
    p.add_argument("--p0", type=float, default=cost.DEFAULT_P0)
    p.add_argument("--protocol", choices=["direct15", "magic15", "3k8", "all"], default="all")
    tgt = p.add_mutually_exclusive_group()
    tgt.add_argument("--target", type=float)
    tgt.add_argument("--grid", action="store_true", help="default grid 1e-3 .. 1e-14")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--tolerance", type=float, default=0.5)
    p.set_defaults(func=cmd_cost)

    p = sub.add_parser("plot-data", help="write fig5.csv and fig6.csv")
    p.add_argument("--out", type=Path, default=Path("."))
    p.add_argument("--p0", type=float, default=cost.DEFAULT_P0)
    p.add_argument("--tolerance", type=float, default=0.5)
    p.set_defaults(func=cmd_plot_data)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
