"""Command-line front end.

    genjac genus CURVE
    genjac period-matrix CURVE [--mode closed|numeric|verify]
    genjac classify CURVE_OR_MATRIX
    genjac equiv MATRIX_A MATRIX_B [--bound N] [--witness FILE]
    genjac nodal-equiv CURVE1 CURVE2
    genjac abel-check CURVE --function EXPR [--force]
    genjac rr CURVE --divisor "2*A - B"
    genjac eval CURVE --function EXPR [--at Z] [--expand ORDER] [--divisor]

CURVE is a descriptor path, ``-`` for stdin, or inline JSON.  Exit codes:
0 success, 1 negative verdict under --strict, 2 input or numerical errors.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import abel, albanese, curve, divisor, equivalence
from .errors import GenJacError
from .mero import evaluate, is_constant, parse

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT = 0, 1, 2


def fmt_complex(z, digits=12):
    z = complex(z)
    re_ = z.real + 0.0 if z.real != 0 else 0.0
    im = z.imag + 0.0 if z.imag != 0 else 0.0
    sign = "-" if im < 0 else "+"
    return f"{re_:.{digits}g}{sign}{abs(im):.{digits}g}i"


def _jc(z):
    z = complex(z)
    return [float(z.real), float(z.imag)]


def _to_jsonable(obj):
    if isinstance(obj, complex):
        return _jc(obj)
    if isinstance(obj, np.ndarray):
        return _to_jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, dict):
        return {str(k): _to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_jsonable(v) for v in obj]
    if hasattr(obj, "to_dict"):
        return _to_jsonable(obj.to_dict())
    return obj


def _read_text(src):
    if src == "-":
        return sys.stdin.read()
    if src.lstrip().startswith(("{", "[")):
        return src
    with open(src) as fh:
        return fh.read()


def _load_doc(src):
    return json.loads(_read_text(src))


def _clean(z, eps=1e-13):
    z = complex(z)
    cut = eps * max(1.0, abs(z))
    return complex(z.real if abs(z.real) > cut else 0.0, z.imag if abs(z.imag) > cut else 0.0)


def _matrix_str(m):
    rows = ["  [" + ", ".join(fmt_complex(_clean(z)) for z in row) + "]" for row in np.atleast_2d(m)]
    return "\n".join(rows)


def _pm_str(pm):
    return f"labels: {' '.join(pm.labels)}\nprovenance: {pm.provenance}\n" + _matrix_str(pm.entries)


class _Out:
    def __init__(self, as_json):
        self.as_json = as_json
        self.lines = []
        self.doc = None

    def line(self, text=""):
        self.lines.append(text)

    def emit(self):
        if self.as_json:
            sys.stdout.write(json.dumps(_to_jsonable(self.doc), indent=2, sort_keys=True) + "\n")
        else:
            sys.stdout.write("\n".join(self.lines) + "\n")


# ===========
# subcommands
# ===========

def cmd_genus(args, out):
    spec = curve.load_spec(args.curve)
    gd = curve.genus(spec)
    out.doc = gd.as_dict()
    out.line("class            delta_Q")
    for cls, d in gd.delta_per_class.items():
        out.line(f"{'{' + ','.join(cls) + '}':<16} {d}")
    out.line(f"delta = {gd.delta}")
    out.line(f"pi = {gd.pi}")
    out.line(f"k = {gd.k}")
    out.line(f"p = {gd.p}")
    return EXIT_OK


def cmd_period_matrix(args, out):
    spec = curve.load_spec(args.curve)
    if args.mode == "closed":
        pm = albanese.build_period_matrix(spec)
    elif args.mode == "numeric":
        pm = albanese.build_period_matrix_numeric(spec)
    else:
        rep = albanese.verify(spec, tol=args.tol or 1e-8)
        out.doc = {k: v for k, v in rep.items()}
        out.line("closed form:")
        out.line(_pm_str(rep["closed"]))
        out.line("numeric:")
        out.line(_pm_str(rep["numeric"]))
        out.line(f"max entry deviation: {rep['max_deviation']:.3e}")
        out.line(f"residue rows agree: {'yes' if rep['residue_rows_agree'] else 'no'}")
        for sk in rep["second_kind"]:
            out.line(f"second kind at {sk['point']} (order {sk['order']}): beta numeric "
                     f"{fmt_complex(sk['beta_numeric'])}, Legendre oracle {fmt_complex(sk['beta_oracle'])}"
                     f" ({'agrees' if sk['oracle_agrees'] else 'differs'}); closed form 0 "
                     f"({'agrees' if sk['closed_form_agrees'] else 'disagrees'})")
        out.line(f"verdict: {'agreement' if rep['agree'] else 'disagreement'}")
        return EXIT_NEGATIVE if args.strict and not rep["agree"] else EXIT_OK
    out.doc = pm.to_dict()
    out.line(_pm_str(pm))
    return EXIT_OK


def _matrix_or_spec(src, mode="closed"):
    doc = _load_doc(src)
    if isinstance(doc, dict) and "entries" in doc:
        return albanese.PeriodMatrix.from_dict(doc), None
    if isinstance(doc, list):
        return albanese.PeriodMatrix(np.array([[complex(*x) if isinstance(x, list) else complex(x)
                                                for x in row] for row in doc])), None
    spec = curve.spec_from_dict(doc)
    pm = (albanese.build_period_matrix_numeric(spec) if mode == "numeric"
          else albanese.build_period_matrix(spec))
    return pm, spec


def cmd_classify(args, out):
    pm, spec = _matrix_or_spec(args.input, args.mode)
    base_tau = complex(spec.tau) if spec is not None and spec.base_genus == 1 else None
    kw = {"tol": args.tol} if args.tol else {}
    if args.bound:
        kw["bound"] = args.bound
    cf = albanese.canonical_form(pm, base_tau=base_tau, **kw)
    out.doc = cf.to_dict()
    out.line(cf.description)
    out.line(f"p = {cf.p}, q = {cf.q}, toroidal block dim = {cf.block_dim}, "
             f"compact = {'yes' if cf.compact else 'no'}, kind 0 = {'yes' if cf.kind0 else 'no'}")
    if cf.toroidal_block is not None:
        out.line("toroidal block:")
        out.line(_matrix_str(cf.toroidal_block.entries))
    return EXIT_OK


def cmd_equiv(args, out):
    pa, _ = _matrix_or_spec(args.a)
    pb, _ = _matrix_or_spec(args.b)
    tol = args.tol or equivalence.DEFAULT_TOL
    if args.witness:
        w = equivalence.EquivalenceWitness.from_dict(_load_doc(args.witness))
        ok = equivalence.check_witness(pa, pb, w.M, w.A, tol)
        out.doc = {"equivalent": ok, "witness": w.to_dict(), "checked": True}
        out.line("witness holds" if ok else "witness fails")
        return EXIT_NEGATIVE if args.strict and not ok else EXIT_OK
    bound = args.bound or 2
    w = equivalence.equivalent_nodal(pa.compact() if pa.cols > 3 else pa,
                                     pb.compact() if pb.cols > 3 else pb, bound, tol)
    out.doc = {"equivalent": w is not None, "bound": bound,
               "witness": None if w is None else w.to_dict()}
    if w is None:
        out.line(f"no witness at bound {bound}")
        return EXIT_NEGATIVE if args.strict else EXIT_OK
    out.line("witness found: P = M P' A")
    out.line("M =")
    out.line(_matrix_str(w.M))
    out.line("A =")
    out.line("\n".join("  " + str(row) for row in w.A.tolist()))
    return EXIT_OK


def _nodal_curve(src):
    spec = curve.load_spec(src)
    if spec.base_genus != 1 or len(spec.classes) != 1 or len(spec.points) != 2 \
            or any(spec.modulus[p] != 1 for p in spec.points):
        raise GenJacError("nodal-equiv needs a single node (two points, multiplicity 1) on a torus")
    a, b = spec.points
    return equivalence.NodalGenus2Curve(spec.tau, spec.positions[a], spec.positions[b])


def cmd_nodal_equiv(args, out):
    c1, c2 = _nodal_curve(args.curve1), _nodal_curve(args.curve2)
    tol = args.tol or equivalence.DEFAULT_TOL
    bh = equivalence.nodal_biholomorphic(c1, c2, tol)
    bound = args.bound or 2
    w = equivalence.equivalent_nodal(c1.period_matrix(), c2.period_matrix(), bound, tol)
    out.doc = {"biholomorphic": bh.biholomorphic, "gamma": bh.gamma,
               "albanese_isomorphic": w is not None, "bound": bound,
               "witness": None if w is None else w.to_dict()}
    verdict = (f"biholomorphic (gamma = {fmt_complex(bh.gamma)})" if bh.biholomorphic
               else "not biholomorphic")
    verdict += "; Albanese isomorphic" if w is not None else f"; no Albanese witness at bound {bound}"
    out.line(verdict)
    if w is not None:
        out.line(f"A = {w.A.tolist()}")
    negative = not bh.biholomorphic or w is None
    return EXIT_NEGATIVE if args.strict and negative else EXIT_OK


def cmd_abel_check(args, out):
    spec = curve.load_spec(args.curve)
    rep = abel.abel_verify(spec, parse(args.function), tol=args.tol or 1e-7, force=args.force,
                           bound=args.bound or 20)
    out.doc = rep.to_dict()
    pts = ", ".join(f"{n:+d}*[{fmt_complex(z)}]" for z, n in rep.divisor) or "0"
    out.line(f"divisor: {pts}")
    if rep.multiconstant is None:
        out.line("multiconstant: none (f is not congruent to a multiconstant mod m)")
    else:
        for cls, c in rep.multiconstant.values.items():
            out.line(f"c{{{','.join(cls)}}} = {fmt_complex(c)}")
    out.line("phi((f)) = (" + ", ".join(fmt_complex(z) for z in rep.period_map_value) + ")")
    out.line(f"distance to Gamma: {rep.residual:.3e}")
    out.line("passes" if rep.passes else "fails")
    return EXIT_NEGATIVE if args.strict and not rep.passes else EXIT_OK


def cmd_rr(args, out):
    spec = curve.load_spec(args.curve)
    d = divisor.parse_divisor(args.divisor)
    res = divisor.rr_chi(d, curve.genus(spec), spec)
    out.doc = dict(res.as_dict(), degree=divisor.degree(d), pi=curve.genus(spec).pi)
    out.line(f"D = {divisor.format_divisor(d)}, deg D = {divisor.degree(d)}, pi = {curve.genus(spec).pi}")
    parts = [f"chi = {res.chi}"]
    parts.append(f"h0 = {res.h0}" if res.h0 is not None else "h0 = unknown")
    parts.append(f"h1 = {res.h1}" if res.h1 is not None else "h1 = unknown")
    out.line(", ".join(parts))
    return EXIT_OK


def _parse_point(text):
    e = parse(text)
    if not is_constant(e):
        raise GenJacError(f"point {text!r} must be a constant")
    return complex(evaluate(e, None, 0))


def cmd_eval(args, out):
    spec = curve.load_spec(args.curve)
    ctx = abel._ctx_for(spec)
    expr = parse(args.function)
    out.doc = {"expression": expr.text()}
    if args.at is not None:
        z = _parse_point(args.at)
        v = evaluate(expr, ctx, z)
        out.doc.update(point=z, value=v)
        out.line(f"f({fmt_complex(z)}) = {fmt_complex(v)}")
        if args.expand is not None:
            c = abel.local_expansion(expr, ctx, z, args.expand)
            out.doc["laurent"] = {str(k): v for k, v in zip(range(-args.expand, args.expand + 1), c)}
            for k, ck in zip(range(-args.expand, args.expand + 1), c):
                out.line(f"  c[{k}] = {fmt_complex(ck)}")
    if args.divisor:
        d = abel.divisor_of(expr, ctx)
        out.doc["divisor"] = [{"point": z, "order": n} for z, n in d]
        out.line("divisor: " + (", ".join(f"{n:+d}*[{fmt_complex(z)}]" for z, n in d) or "0"))
    if args.at is None and not args.divisor:
        out.line(expr.text())
    return EXIT_OK


# ======
# parser
# ======

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--bound", type=int, default=None)
    common.add_argument("--strict", action="store_true", help="exit 1 on negative verdicts")
    p = argparse.ArgumentParser(prog="genjac", description="generalized Jacobians of singular curves")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("genus", parents=[common], help="delta, pi, k, p")
    s.add_argument("curve")
    s.set_defaults(func=cmd_genus)

    s = sub.add_parser("period-matrix", parents=[common], help="period matrix of the Albanese variety")
    s.add_argument("curve")
    s.add_argument("--mode", choices=("closed", "numeric", "verify"), default="closed")
    s.set_defaults(func=cmd_period_matrix)

    s = sub.add_parser("classify", parents=[common], help="Remmert-Morimoto decomposition")
    s.add_argument("input", help="curve descriptor or period-matrix JSON")
    s.add_argument("--mode", choices=("closed", "numeric"), default="closed")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("equiv", parents=[common], help="search P = M P' A")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--witness", help="check this witness instead of searching")
    s.set_defaults(func=cmd_equiv)

    s = sub.add_parser("nodal-equiv", parents=[common], help="compare two nodal genus-2 curves")
    s.add_argument("curve1")
    s.add_argument("curve2")
    s.set_defaults(func=cmd_nodal_equiv)

    s = sub.add_parser("abel-check", parents=[common], help="forward Abel check for f")
    s.add_argument("curve")
    s.add_argument("--function", required=True)
    s.add_argument("--force", action="store_true", help="skip the f = c mod m precondition")
    s.set_defaults(func=cmd_abel_check)

    s = sub.add_parser("rr", parents=[common], help="Riemann-Roch Euler characteristic")
    s.add_argument("curve")
    s.add_argument("--divisor", default="0")
    s.set_defaults(func=cmd_rr)

    s = sub.add_parser("eval", parents=[common], help="evaluate an expression on the base torus")
    s.add_argument("curve")
    s.add_argument("--function", required=True)
    s.add_argument("--at")
    s.add_argument("--expand", type=int)
    s.add_argument("--divisor", action="store_true", help="locate zeros and poles")
    s.set_defaults(func=cmd_eval)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    out = _Out(args.json)
    try:
        code = args.func(args, out)
    except (GenJacError, ValueError, OSError, KeyError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    out.emit()
    return code


if __name__ == "__main__":
    sys.exit(main())
