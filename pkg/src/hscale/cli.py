"""Command-line front end: ``hscale {validate,verify,pair,op,gen}``."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import generators as gen
from . import io, jtl, opalg
from .errors import HScaleError, SchemaError
from .report import FAIL, PASS, Report
from .suite import run_suite
from .system import validate_system

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 2, 3


def fmt_complex(z) -> str:
    z = complex(z)
    re, im = z.real + 0.0, z.imag + 0.0  # drop negative zeros
    return f"{re:.15f}{im:+.15g}i"


def parse_vector_arg(text: str) -> np.ndarray:
    """Comma-separated numbers in Python syntax, e.g. ``1,0.5-2j``."""
    try:
        return np.array([complex(t.strip().replace("i", "j")) for t in text.split(",")])
    except ValueError:
        raise SchemaError(f"cannot parse vector {text!r}", "argument") from None


def parse_matrix_arg(text: str) -> np.ndarray:
    """Rows separated by ``;``, entries by ``,``."""
    rows = [parse_vector_arg(r) for r in text.split(";")]
    if len({len(r) for r in rows}) != 1:
        raise SchemaError(f"ragged matrix {text!r}", "argument")
    return np.array(rows)


def _load(args):
    return io.load(args.file, args.tol)


def _emit(report: Report, args):
    print(report.to_json() if args.json else report.to_text())
    return report.exit_code()


def cmd_validate(args) -> int:
    loaded = _load(args)
    s = loaded.system
    rep = validate_system(s)
    report = Report()
    for name, res in rep.axioms().items():
        report.add(f"axiom.{name}", "contractive system axioms",
                   verdict=PASS if res.passed else FAIL, margin=res.margin, witness=res.witness)
    if loaded.family is not None:
        from .ofamily import validate_ofamily
        fam = validate_ofamily(loaded.family)
        report.add("ofamily.directed", "operator family is directed",
                   verdict=PASS if fam.directed else FAIL,
                   margin=float(len(fam.unbounded_pairs)),
                   witness={"unbounded_pairs": fam.unbounded_pairs, "ties": fam.ties})
    report = report.sorted()
    code = _emit(report, args)
    if not args.json:
        for a, b in rep.marginal:
            print(f"note: U_{b}{a} exceeds norm 1 within tolerance", file=sys.stderr)
    return code


def cmd_verify(args) -> int:
    return _emit(run_suite(_load(args), seed=args.seed, samples=args.samples), args)


def _parse_dx(s, text: str) -> jtl.DxElement:
    base, sep, vec = text.partition(":")
    if not sep:
        raise SchemaError("expected base:vector", "--dx")
    if base not in s.labels:
        raise SchemaError(f"unknown label {base!r}", "--dx")
    return jtl.theta(s, base, parse_vector_arg(vec))


def cmd_pair(args) -> int:
    s = _load(args).system
    x = _parse_dx(s, args.dx)
    d = jtl.d_element(s, parse_vector_arg(args.d))
    print(fmt_complex(jtl.pair(s, x, d)))
    return EXIT_OK


def _resolve_op(loaded, spec: str) -> opalg.LimOperator:
    """A file operator by name, ``I@label``, or ``label:matrix``."""
    s = loaded.system
    if spec in loaded.operators:
        return loaded.operators[spec]
    if spec.startswith("I@"):
        a = spec[2:]
        if a not in s.labels:
            raise SchemaError(f"unknown label {a!r}", "--op")
        return opalg.lift(s, a, np.eye(s.dim(a)))
    base, sep, mat = spec.partition(":")
    if sep and base in s.labels:
        return opalg.lift(s, base, parse_matrix_arg(mat))
    raise SchemaError(f"unknown operator {spec!r}", "--op")


def _print_matrix(m):
    for row in np.asarray(m):
        print("  ".join(fmt_complex(z) for z in row))


def cmd_op(args) -> int:
    loaded = _load(args)
    s = loaded.system
    ops = [_resolve_op(loaded, o) for o in args.op]
    if args.action == "apply":
        if len(ops) != 1 or args.d is None:
            raise SchemaError("apply needs one --op and --d", "arguments")
        res = opalg.apply(s, ops[0], jtl.d_element(s, parse_vector_arg(args.d)))
        print(f"base {res.base}")
        print("  ".join(fmt_complex(z) for z in res.vec))
        return EXIT_OK
    if args.action == "adjoint":
        if len(ops) != 1:
            raise SchemaError("adjoint needs one --op", "arguments")
        res = opalg.involution(s, ops[0])
        print(f"base {res.base}")
        _print_matrix(res.mat)
        return EXIT_OK
    if len(ops) != 2:
        raise SchemaError("product needs two --op", "arguments")
    res = opalg.partial_product(s, ops[0], ops[1])
    if isinstance(res, opalg.Undefined):
        a, b = res.witness
        print(f"UNDEFINED residual={res.residual:.15g} at ({a},{b})")
        return EXIT_OK
    print(f"base {res.base}")
    _print_matrix(res.mat)
    return EXIT_OK


def cmd_gen(args) -> int:
    kind = args.kind
    if kind == "ofamily-seed":
        data = io.ofamily_to_dict(gen.e1_ofamily())
    else:
        if kind == "shift-chain":
            s = gen.gen_shift_chain(args.dim, args.levels)
        elif kind == "weighted-grid":
            alphas = [float(a) for a in args.alphas.split(",")]
            s = gen.gen_weighted_grid(args.xmin, args.xmax, args.points, alphas, args.weight_form)
        elif kind == "diamond":
            s = gen.gen_diamond()
        else:
            poset = gen.gen_random_poset(args.seed, args.nodes)
            s = gen.gen_random_system(args.seed, gen.random_dims(args.seed, poset, args.max_dim), poset)
        data = io.system_to_dict(s)
    text = json.dumps(data, indent=1)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=42, help="RNG seed (default 42)")
    common.add_argument("--samples", type=int, default=200, help="sample count (default 200)")
    common.add_argument("--json", action="store_true", help="print the report as JSON")
    common.add_argument("--tol", type=float, default=None,
                        help="override the default tolerance (also HSCALE_TOL)")

    p = argparse.ArgumentParser(prog="hscale", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", parents=[common], help="check the system axioms")
    v.add_argument("file")
    v.set_defaults(func=cmd_validate)

    v = sub.add_parser("verify", parents=[common], help="run the full verification suite")
    v.add_argument("file")
    v.set_defaults(func=cmd_verify)

    v = sub.add_parser("pair", parents=[common], help="evaluate the pairing B(x, d)")
    v.add_argument("file")
    v.add_argument("--dx", required=True, help="element of D^x as base:v1,v2,...")
    v.add_argument("--d", required=True, help="element of D as top-index coordinates")
    v.set_defaults(func=cmd_pair)

    v = sub.add_parser("op", parents=[common], help="operator computations")
    v.add_argument("file")
    v.add_argument("action", choices=["apply", "adjoint", "product"])
    v.add_argument("--op", action="append", default=[],
                   help="operator: a name from the file, I@label, or label:row;row")
    v.add_argument("--d", help="element of D for apply")
    v.set_defaults(func=cmd_op)

    v = sub.add_parser("gen", parents=[common], help="write a generated system file")
    v.add_argument("kind", choices=list(io.GENERATORS))
    v.add_argument("-o", "--output")
    v.add_argument("--dim", type=int, default=3)
    v.add_argument("--levels", type=int, default=4)
    v.add_argument("--xmin", type=float, default=-1.0)
    v.add_argument("--xmax", type=float, default=1.0)
    v.add_argument("--points", type=int, default=21)
    v.add_argument("--alphas", default="0,1,2,3,4")
    v.add_argument("--weight-form", default="one-plus-abs-pow", choices=list(gen.WEIGHT_FORMS))
    v.add_argument("--nodes", type=int, default=4)
    v.add_argument("--max-dim", type=int, default=6)
    v.set_defaults(func=cmd_gen)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (HScaleError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
