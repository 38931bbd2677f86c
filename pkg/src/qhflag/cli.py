"""Command-line front end for the exact quantum cohomology pipeline.

Subcommands mirror the pipeline stages: relations, grobner, connection,
lplus, qprod, gw, schubert, verify.  All output is exact (integers and
rational strings); formats are text, json or latex.  Check levels: `none`
computes only, `structural` (default) runs the structural law suite once the
connection exists, `full` adds the product-table checks and the reference
comparisons for n = 2, 3, 4.  Each stage owns a distinct nonzero exit code,
and failures emit a machine-readable JSON report on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .connection import Report
from .golden import verify_golden
from .matrix import PolyMatrix
from .pipeline import DEFAULT_MAX_N, Pipeline
from .poly import Poly

STAGE_CODES = {
    "relations": 2,
    "grobner": 3,
    "connection": 4,
    "lplus": 5,
    "qprod": 6,
    "gw": 7,
    "schubert": 8,
    "verify": 9,
}

_LATEX_SLAB = 12


def poly_latex(p: Poly) -> str:
    if p.is_zero():
        return "0"
    pieces = []
    for m in p.sorted_monomials():
        c = p.terms[m]
        body = "".join(
            (v[0] if v[0] != "h" else "h")
            + (f"_{{{v[1]}}}" if v[0] != "h" else "")
            + (f"^{{{e}}}" if e > 1 else "")
            for v, e in m
        )
        mag = abs(c)
        if not body:
            text = str(mag)
        elif mag == 1:
            text = body
        else:
            text = f"{mag}{body}"
        if not pieces:
            pieces.append(text if c > 0 else f"-{text}")
        else:
            pieces.append(("+" if c > 0 else "-") + text)
    return " ".join(pieces)


def matrix_latex(mat: PolyMatrix) -> str:
    slabs = []
    for start in range(0, mat.ncols, _LATEX_SLAB):
        cols = range(start, min(start + _LATEX_SLAB, mat.ncols))
        rows = [
            " & ".join(poly_latex(mat[i, j]) for j in cols)
            for i in range(mat.nrows)
        ]
        slabs.append("\\begin{pmatrix}\n" + " \\\\\n".join(rows) + "\n\\end{pmatrix}")
    return "\n".join(slabs)


def matrix_json_dense(mat: PolyMatrix) -> dict:
    return {
        "nrows": mat.nrows,
        "ncols": mat.ncols,
        "rows": [
            [mat[i, j].to_json() for j in range(mat.ncols)] for i in range(mat.nrows)
        ],
    }


def render_matrix(mat: PolyMatrix, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(matrix_json_dense(mat))
    if fmt == "latex":
        return matrix_latex(mat)
    return str(mat)


def render_poly(p: Poly, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(p.to_json())
    if fmt == "latex":
        return poly_latex(p)
    return str(p)


def _fail(stage: str, errors: list[str]) -> int:
    sys.stderr.write(json.dumps({"stage": stage, "errors": errors}) + "\n")
    return STAGE_CODES[stage]


def _run_checks(pipe: Pipeline, level: str, stage: str) -> list[str]:
    """Reports for the requested check level; returns failure strings."""
    errors: list[str] = []
    reports: list[Report] = []
    deep = stage not in ("relations", "grobner")
    if level in ("structural", "full") and deep:
        reports.extend(pipe.structural_reports())
    if level == "full":
        if not deep:
            reports.extend(pipe.structural_reports())
        reports.extend(pipe.quantum_reports())
        if pipe.n in (2, 3, 4):
            reports.append(verify_golden(pipe))
    for rep in reports:
        if not rep.ok:
            errors.extend(f"{rep.title}: {f}" for f in rep.failures)
    return errors


def cmd_relations(pipe: Pipeline, args) -> None:
    for i, rel in enumerate(pipe.relations, 1):
        print(f"relation {i}: {render_poly(rel, args.format)}")


def cmd_grobner(pipe: Pipeline, args) -> None:
    print(f"reduced left basis ({len(pipe.basis)} generators):")
    for g in pipe.basis.generators:
        print("  " + render_poly(g.to_dform(), args.format))
    print(f"standard monomials ({pipe.context.size}):")
    ops = [op.to_dform() for op in pipe.context.basis_ops]
    shadows = pipe.context.basis_shadows
    for op, sh in zip(ops, shadows):
        print(f"  {render_poly(op, args.format)}  (class {render_poly(sh, args.format)})")


def cmd_connection(pipe: Pipeline, args) -> None:
    cd = pipe.connection
    for i in range(1, pipe.r + 1):
        print(f"omega, direction {i}:")
        print(render_matrix(cd.omega[i - 1], args.format))
    for j, level in enumerate(cd.thetas):
        for i in range(1, pipe.r + 1):
            print(f"theta^({j}), direction {i}:")
            print(render_matrix(level[i - 1], args.format))
    if not cd.thetas:
        print("all theta levels vanish")


def cmd_lplus(pipe: Pipeline, args) -> None:
    lp = pipe.lplus
    nonzero = [i + 1 for i, q in enumerate(lp.qs) if q]
    print(f"factor coefficients: Q0 unipotent, nonzero higher terms {nonzero or 'none'}")
    print("Q0:")
    print(render_matrix(lp.q0, args.format))
    if args.dump_lplus:
        print("Q0 inverse:")
        print(render_matrix(lp.q0_inverse(), args.format))
        for i, q in enumerate(lp.qs, 1):
            print(f"Q{i}:")
            print(render_matrix(q, args.format))


def _basis_label(pipe: Pipeline, k: int) -> str:
    return str(pipe.context.basis_shadows[k])


def _print_product(pipe: Pipeline, i: int, j: int, fmt: str) -> None:
    vec = pipe.table.product(i, j)
    pieces = []
    for k, coeff in enumerate(vec):
        if coeff:
            pieces.append(f"({coeff}) * [{_basis_label(pipe, k)}]")
    rhs = " + ".join(pieces) if pieces else "0"
    if fmt == "json":
        print(
            json.dumps(
                {
                    "i": i,
                    "j": j,
                    "expansion": [
                        {"index": k, "coefficient": c.to_json()}
                        for k, c in enumerate(vec)
                        if c
                    ],
                }
            )
        )
    else:
        print(f"[{_basis_label(pipe, i)}] o [{_basis_label(pipe, j)}] = {rhs}")


def cmd_qprod(pipe: Pipeline, args) -> None:
    size = pipe.context.size
    if (args.i is None) != (args.j is None):
        raise ValueError("--i and --j go together")
    if args.i is not None:
        _print_product(pipe, args.i, args.j, args.format)
        return
    for i in range(size):
        for j in range(i, size):
            _print_product(pipe, i, j, args.format)


def cmd_gw(pipe: Pipeline, args) -> None:
    wanted = None
    if args.degree:
        wanted = tuple(int(x) for x in args.degree.split(","))
        if len(wanted) != pipe.r:
            raise ValueError(f"--degree needs {pipe.r} comma-separated integers")
    for rec in pipe.gw_records:
        if wanted is not None and rec.degree != wanted:
            continue
        print(
            json.dumps(
                {
                    "i": rec.i,
                    "j": rec.j,
                    "k": rec.k,
                    "d": list(rec.degree),
                    "value": rec.value,
                }
            )
        )


def cmd_schubert(pipe: Pipeline, args) -> None:
    if args.quantum:
        _, hatted = pipe.quantum_schubert
        for w, p in zip(pipe.schubert_family.perms, hatted):
            print(f"{''.join(map(str, w))}: {render_poly(p, args.format)}")
    else:
        for w, p in zip(pipe.schubert_family.perms, pipe.reduced_schubert_classes):
            print(f"{''.join(map(str, w))}: {render_poly(p, args.format)}")


def cmd_verify(pipe: Pipeline, args) -> list[str]:
    reports = pipe.structural_reports() + pipe.quantum_reports()
    if pipe.n in (2, 3, 4):
        reports.append(verify_golden(pipe))
    errors = []
    for rep in reports:
        status = "ok" if rep.ok else "FAIL"
        print(f"{rep.title}: {status}")
        for f in rep.failures:
            print(f"  {f}")
            errors.append(f"{rep.title}: {f}")
    return errors


COMMANDS = {
    "relations": cmd_relations,
    "grobner": cmd_grobner,
    "connection": cmd_connection,
    "lplus": cmd_lplus,
    "qprod": cmd_qprod,
    "gw": cmd_gw,
    "schubert": cmd_schubert,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qhflag",
        description="Exact small quantum cohomology of full flag manifolds GL_n/B.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--n", type=int, required=True, help="rank of GL_n (n >= 2)")
        p.add_argument(
            "--format", choices=("text", "json", "latex"), default="text"
        )
        p.add_argument(
            "--check",
            choices=("none", "structural", "full"),
            default=None,
            help="verification level (default: structural; n=5 never defaults to full)",
        )
        p.add_argument(
            "--max-n", type=int, default=DEFAULT_MAX_N, help="safety cap for n"
        )

    for name in COMMANDS:
        p = sub.add_parser(name)
        common(p)
        if name == "lplus":
            p.add_argument("--dump-lplus", action="store_true")
        if name == "qprod":
            p.add_argument("--i", type=int)
            p.add_argument("--j", type=int)
        if name == "gw":
            p.add_argument("--degree", type=str, default=None)
    p = sub.add_parser("verify")
    common(p)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    stage = args.command
    try:
        pipe = Pipeline(args.n, max_n=args.max_n)
        if stage == "verify":
            errors = cmd_verify(pipe, args)
            return _fail(stage, errors) if errors else 0
        COMMANDS[stage](pipe, args)
        level = args.check if args.check is not None else "structural"
        errors = _run_checks(pipe, level, stage)
        if errors:
            return _fail(stage, errors)
        return 0
    except Exception as exc:  # exact-arithmetic failures surface as stage errors
        return _fail(stage, [f"{type(exc).__name__}: {exc}"])


if __name__ == "__main__":
    sys.exit(main())
