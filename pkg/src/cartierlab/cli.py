"""Command-line front end.

Exit codes: 0 success, 1 mathematical failure (a check failed, quantization
obstructed, gauge not invertible), 2 input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Callable

from . import cartier_ring as cr
from . import families as fam
from . import precartier as pc
from . import quasibialgebra as qb
from .serialization import (
    BundleFormatError,
    bundle_from_json,
    bundle_to_json,
    dumps,
    gaussrat_matrix,
    module_from_json,
    operator_to_json,
    report_to_json,
    tensor_from_json,
)
from .tensor_algebra import NotInvertibleError, TensorElement, tensor_invert

ORDER_ENV = "CARTIERLAB_ORDER"
EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

CHECK_NAMES = ("quasibialgebra", "quasitriangular", "precartier", "cartier", "chi13",
               "theta-upsilon", "qybe", "qqybe", "preconditions")
# `cartier` is a property some pre-Cartier bundles lack, so `all` leaves it out
ALL_CHECKS = tuple(c for c in CHECK_NAMES if c != "cartier")
NEEDS_R = {"quasitriangular", "qybe"}
NEEDS_CHI = {"precartier", "cartier", "chi13", "theta-upsilon", "qqybe", "preconditions"}


class InputError(Exception):
    """Bad command-line input; maps to exit code 2."""


# ------------------------------------------------------------------ inputs
def _load_json(arg: str):
    """Inline JSON, '-' for stdin, or a file path."""
    try:
        if arg == "-":
            return json.load(sys.stdin)
        if arg.lstrip().startswith(("{", "[")):
            return json.loads(arg)
        with open(arg, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}") from exc
    except OSError as exc:
        raise InputError(f"cannot read {arg!r}: {exc}") from exc


def _load_bundle(arg: str):
    try:
        return bundle_from_json(_load_json(arg))
    except (BundleFormatError, ValueError, KeyError, TypeError) as exc:
        raise InputError(f"malformed bundle: {exc}") from exc


def _matrix(arg: str | None, n: int, what: str):
    if arg is None:
        return [[0] * n for _ in range(n)]
    try:
        m = gaussrat_matrix(json.loads(arg))
    except (json.JSONDecodeError, BundleFormatError, ValueError) as exc:
        raise InputError(f"malformed {what} matrix: {exc}") from exc
    if len(m) != n or any(len(r) != n for r in m):
        raise InputError(f"{what} must be a {n}x{n} matrix")
    return m


def _parts(bundle):
    """(quasi-bialgebra, quasitriangular or None, pre-Cartier or None)."""
    if isinstance(bundle, pc.PreCartierData):
        return bundle.base, bundle.qt, bundle
    if isinstance(bundle, qb.QuasiTriangularData):
        return bundle.base, bundle, None
    return bundle, None, None


# ----------------------------------------------------------------- outputs
def _emit(args, payload: dict, table: str) -> None:
    if getattr(args, "json", False):
        print(dumps(payload))
    else:
        print(table)


def _emit_bundle(args, bundle, summary: str) -> None:
    data = bundle_to_json(bundle)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(dumps(data) + "\n")
        _emit(args, {"written": args.out, "kind": data["kind"]}, summary + f"\nwritten to {args.out}")
    else:
        print(dumps(data))


def _bundle_summary(bundle) -> str:
    B, Q, P = _parts(bundle)
    lines = [f"algebra        {B.algebra.name or 'anonymous'} (dim {B.algebra.dim}, ħ-order {B.order})",
             f"reassociator   {'trivial' if B.has_trivial_reassociator() else f'{len(B.reassociator.terms)} terms'}"]
    if Q is not None:
        lines.append(f"R-matrix       {len(Q.rmatrix.terms)} terms")
    if P is not None:
        lines.append(f"chi            {len(P.chi.terms)} terms")
    return "\n".join(lines)


def _report_table(rep: qb.CheckReport) -> str:
    if not rep.entries:
        return "(no checks)"
    width = max(len(e.name) for e in rep.entries)
    rows = []
    for e in rep.entries:
        mark = "ok  " if e.passed else "FAIL"
        extra = f"  {e.detail}" if e.detail else ""
        rows.append(f"{mark}  {e.name.ljust(width)}  {e.tag}{extra}")
    rows.append(f"{sum(e.passed for e in rep.entries)}/{len(rep.entries)} passed")
    return "\n".join(rows)


# ---------------------------------------------------------------- commands
def cmd_construct(args) -> int:
    if args.family == "h2":
        if args.sign not in ("+", "-"):
            raise InputError("h2 needs --sign + or --sign -")
        bundle = fam.build_h2(args.sign)
    else:
        if args.n is None or args.n < 1:
            raise InputError("--n must be a positive integer")
        spec = fam.EnSpec(args.n, _matrix(args.a, args.n, "a"), _matrix(args.b, args.n, "b"))
        bundle = fam.build_en(spec) if args.family == "en" else fam.build_en_twisted(spec)
    _emit_bundle(args, bundle, _bundle_summary(bundle))
    return EXIT_OK


def run_checks(bundle, names: list[str]) -> qb.CheckReport:
    B, Q, P = _parts(bundle)
    explicit = "all" not in names
    selected = list(ALL_CHECKS) if not explicit else names
    for name in selected:
        if name not in CHECK_NAMES:
            raise InputError(f"unknown check {name!r}; choose from {', '.join(CHECK_NAMES + ('all',))}")
    rep = qb.CheckReport()
    trivial = B.has_trivial_reassociator()
    for name in selected:
        if (name in NEEDS_R and Q is None) or (name in NEEDS_CHI and P is None):
            if explicit:
                raise InputError(f"check {name!r} needs {'χ' if name in NEEDS_CHI else 'an R-matrix'}")
            continue
        if name == "quasibialgebra":
            rep.extend(qb.verify_quasibialgebra(B))
        elif name == "quasitriangular":
            rep.extend(qb.verify_quasitriangular(Q))
        elif name == "precartier":
            rep.extend(pc.verify_precartier(P))
        elif name == "cartier":
            rep.extend(pc.cartier_report(P))
        elif name == "chi13":
            rep.extend(pc.chi13_bialgebra_report(P) if trivial else pc.chi13_quasi_report(P))
        elif name == "theta-upsilon":
            for label, S in (("theta", pc.theta_set(P)), ("upsilon", pc.upsilon_set(P))):
                sub = pc.check_infinitesimal_braid(S)
                for e in sub.entries:
                    e.name = f"{label} {e.name}"
                rep.extend(sub)
            if trivial:
                sub = pc.check_infinitesimal_braid(pc.bialgebra_braid_set(P))
                for e in sub.entries:
                    e.name = f"chi-bar {e.name}"
                rep.extend(sub)
        elif name == "qybe":
            rep.extend(pc.qybe_report(Q))
        elif name == "qqybe":
            rep.extend(pc.qqybe_report(P))
        elif name == "preconditions":
            if trivial:
                rep.extend(pc.check_quantization_preconditions(P))
            else:
                rep.add("[chi12, Phi^-1 chi23 Phi]", pc.associator_commutator(P),
                        TensorElement.zero(P.algebra, 3), tag="associator-commuting")
    return rep


def _split_checks(values: list[str] | None) -> list[str]:
    names: list[str] = []
    for v in values or []:
        names.extend(x for x in v.replace(",", " ").split() if x)
    return names


def cmd_verify(args) -> int:
    bundle = _load_bundle(args.bundle)
    rep = run_checks(bundle, _split_checks(args.checks) if args.checks is not None else ["all"])
    _emit(args, report_to_json(rep, witnesses=not args.no_witness), _report_table(rep))
    return EXIT_OK if rep.passed else EXIT_FAIL


def _gauge(args, alg) -> TensorElement:
    if args.preset == "1g":
        if "g" not in alg.basis_labels:
            raise InputError("preset 1g needs a basis element labelled g")
        return TensorElement.outer(alg.one(), alg.element("g"))
    if args.gauge is None:
        raise InputError("give --gauge TENSOR_JSON or --preset 1g")
    try:
        F = tensor_from_json(_load_json(args.gauge), alg)
    except (BundleFormatError, ValueError, KeyError, TypeError) as exc:
        raise InputError(f"malformed gauge tensor: {exc}") from exc
    if F.arity != 2:
        raise InputError("gauge tensor must have arity 2")
    return F


def cmd_twist(args) -> int:
    bundle = _load_bundle(args.bundle)
    B, Q, P = _parts(bundle)
    F = _gauge(args, B.algebra)
    if P is not None:
        out = pc.twist_chi(P, F)
        if args.keep_chi:
            out = out.with_chi(P.chi)
    elif Q is not None:
        out = qb.gauge_twist(Q, F)
    else:
        out = qb.gauge_twist_base(B, F)
    if args.verify:
        rep = run_checks(out, ["all"])
        if not rep.passed:
            print(_report_table(rep), file=sys.stderr)
            return EXIT_FAIL
    _emit_bundle(args, out, _bundle_summary(out))
    return EXIT_OK


def _default_order() -> int | None:
    raw = os.environ.get(ORDER_ENV)
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError as exc:
        raise InputError(f"{ORDER_ENV} must be an integer") from exc


def cmd_quantize(args) -> int:
    bundle = _load_bundle(args.bundle)
    if not isinstance(bundle, pc.PreCartierData):
        raise InputError("quantize needs a pre-Cartier bundle (with chi)")
    order = args.order if args.order is not None else _default_order()
    if order is None:
        raise InputError(f"give --order N or set {ORDER_ENV}")
    if order < 1:
        raise InputError("--order must be at least 1")
    scale = Fraction(1) if args.scale == "1" else Fraction(1, 2)
    try:
        out = pc.quantize(bundle, scale, order)
    except pc.QuantizationObstructionError as exc:
        payload = {"error": "quantization-obstruction", "failing": exc.failing,
                   "report": report_to_json(exc.report) if exc.report else None}
        _emit(args, payload, str(exc))
        return EXIT_FAIL
    except pc.AssociatorOutOfScopeError as exc:
        _emit(args, {"error": "associator-out-of-scope", "message": str(exc)}, str(exc))
        return EXIT_FAIL
    rep = qb.verify_quasitriangular(out)
    if not rep.passed:
        _emit(args, {"error": "verification-failed", "report": report_to_json(rep)}, _report_table(rep))
        return EXIT_FAIL
    _emit_bundle(args, out, _bundle_summary(out) + "\n" + _report_table(rep))
    return EXIT_OK


def cmd_cartier_rep(args) -> int:
    bundle = _load_bundle(args.bundle)
    if not isinstance(bundle, pc.PreCartierData):
        raise InputError("cartier-rep needs a pre-Cartier bundle (with chi)")
    if not bundle.base.has_trivial_reassociator():
        raise InputError("cartier-rep needs a trivial re-associator")
    if args.strands < 2:
        raise InputError("--strands must be at least 2")
    if args.module == "regular":
        V = cr.regular_module(bundle.algebra)
    else:
        try:
            V = module_from_json(_load_json(args.module), bundle.algebra)
        except (BundleFormatError, ValueError, KeyError, TypeError) as exc:
            raise InputError(f"malformed module: {exc}") from exc
    rep = cr.check_cartier_ring_relations(bundle, V, args.strands)
    if args.presentations:
        rep.extend(cr.check_t13_presentations(bundle, V))
        if args.strands >= 4:
            rep.extend(cr.check_t14_presentations(bundle, V))
        rep.extend(cr.check_tij_braid_relations(bundle, V))
    payload = report_to_json(rep, witnesses=False)
    payload.update({"strands": args.strands, "operator_dim": V.dim_v ** args.strands})
    table = _report_table(rep)
    if args.word is not None:
        try:
            w = cr.CartierWord.parse(args.word)
            op = cr.evaluate_word(w, bundle, V, args.strands)
        except (ValueError, cr.OutOfRangeError) as exc:
            raise InputError(str(exc)) from exc
        payload["word"] = {"word": str(w), "operator": operator_to_json(op)}
        table += f"\nword {w}: {op.nnz()} nonzero entries"
    if args.dump:
        rho = cr.representation(bundle, V, args.strands)
        payload["generators"] = {f"{k}{i}": operator_to_json(rho.generator(k, i))
                                 for k in ("b", "B", "g") for i in range(1, args.strands)}
    _emit(args, payload, table)
    return EXIT_OK if rep.passed else EXIT_FAIL


# ----------------------------------------------------------------- oracles
def _oracle_power(args) -> tuple[bool, dict]:
    n = args.n or 2
    a = _matrix(args.a, n, "a")
    alg = fam.en_algebra(n)
    X = fam.gx_x_sum(alg, a)
    ks = [args.k] if args.k is not None else list(range(n + 2))
    results = {str(k): fam.rmatrix_power_closed_form(a, k, n) == X ** k for k in ks}
    return all(results.values()), {"powers": results}


def _oracle_normal_form(args) -> tuple[bool, dict]:
    n = args.n or 2
    basis = fam.en_basis(n)
    bad = [f"{p.label()}*{q.label()}" for p in basis for q in basis
           if fam.en_monomial_product(p, q) != fam.en_normal_form(fam.en_word(p) + fam.en_word(q))]
    alg = fam.en_algebra(n)
    nonassoc = alg.check_associativity() if n <= 2 else []
    return not bad and not nonassoc, {"mismatches": bad, "non_associative_triples": len(nonassoc)}


def _oracle_h2(args) -> tuple[bool, dict]:
    out = {}
    for s in ("+", "-"):
        Q = fam.build_h2(s)
        sign = 1 if s == "+" else -1
        out[s] = tensor_invert(Q.rmatrix) == fam.h2_rmatrix(Q.algebra, sign, inverse=True)
    return all(out.values()), {"inverse_closed_form": out}


def _oracle_twist(args) -> tuple[bool, dict]:
    n = args.n or 2
    spec = fam.EnSpec(n, _matrix(args.a, n, "a"), _matrix(args.b, n, "b"))
    P = fam.build_en(spec)
    Pt = fam.build_en_twisted(spec)
    alg = P.algebra
    g, one = alg.element("g"), alg.one()
    res = {
        "delta": all(Pt.base.delta(alg.element(f"x{i}")) ==
                     TensorElement.outer(alg.element(f"x{i}"), one) - TensorElement.outer(g, alg.element(f"x{i}"))
                     for i in range(1, n + 1)),
        "rmatrix": Pt.qt.rmatrix == fam.twisted_rmatrix_closed_form(alg, spec.a_matrix),
        "chi": pc.twist_chi(P, fam.en_twist(alg)).chi == fam.en_chi(alg, fam._negate(spec.b_matrix)),
        "reassociator": Pt.base.reassociator == TensorElement.outer(one, one, g),
        "ell_r": Pt.base.ell == g and Pt.base.r_elt == one,
    }
    return all(res.values()), res


ORACLES: dict[str, Callable] = {
    "rmatrix-power": _oracle_power,
    "en-normal-form": _oracle_normal_form,
    "h2-inverse": _oracle_h2,
    "twist-closed-forms": _oracle_twist,
}


def cmd_oracle(args) -> int:
    ok, detail = ORACLES[args.name](args)
    payload = {"oracle": args.name, "agree": ok, "detail": detail}
    table = f"{args.name}: {'agree' if ok else 'DISAGREE'}\n" + "\n".join(f"  {k}: {v}" for k, v in detail.items())
    _emit(args, payload, table)
    return EXIT_OK if ok else EXIT_FAIL


# ------------------------------------------------------------------ parser
def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cartierlab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, bundle_out: bool = False):
        sp.add_argument("--json", action="store_true", help="machine-readable output on stdout")
        if bundle_out:
            sp.add_argument("--out", help="write the bundle here instead of stdout")

    c = sub.add_parser("construct", help="build a family bundle")
    c.add_argument("family", choices=["en", "en-twisted", "h2"])
    c.add_argument("--n", type=int)
    c.add_argument("--a", help="JSON n×n matrix for the R-matrix exponent")
    c.add_argument("--b", help="JSON n×n matrix for chi")
    c.add_argument("--sign", help="+ or - (h2 only)")
    common(c, True)
    c.set_defaults(func=cmd_construct)

    v = sub.add_parser("verify", help="run identity checks on a bundle")
    v.add_argument("bundle", help="bundle file, '-' for stdin, or inline JSON")
    v.add_argument("--checks", action="append",
                   help="comma-separated subset of " + ", ".join(CHECK_NAMES + ("all",)) + " (default all)")
    v.add_argument("--no-witness", action="store_true", help="omit witness tensors from JSON")
    common(v)
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("twist", help="gauge-twist a bundle")
    t.add_argument("bundle")
    t.add_argument("--gauge", help="arity-2 tensor JSON (file or inline)")
    t.add_argument("--preset", choices=["1g"], help="1g: F = 1⊗g")
    t.add_argument("--keep-chi", action="store_true", help="keep chi instead of F chi F^-1")
    t.add_argument("--verify", action="store_true", help="re-run all checks on the output")
    common(t, True)
    t.set_defaults(func=cmd_twist)

    q = sub.add_parser("quantize", help="R -> R exp(scale ħ chi) mod ħ^{N+1}")
    q.add_argument("bundle")
    q.add_argument("--scale", choices=["1", "half"], required=True)
    q.add_argument("--order", type=int, help=f"truncation order N (default ${ORDER_ENV})")
    common(q, True)
    q.set_defaults(func=cmd_quantize)

    r = sub.add_parser("cartier-rep", help="check the Cartier ring representation on V^{⊗n}")
    r.add_argument("bundle")
    r.add_argument("--strands", type=int, required=True)
    r.add_argument("--module", default="regular", help="'regular' or a ModuleRep JSON")
    r.add_argument("--word", help='evaluate a word such as "b1 b2 g1 B1"')
    r.add_argument("--presentations", action="store_true",
                   help="also check the t13/t14 presentations and t^{ij} braid relations")
    r.add_argument("--dump", action="store_true", help="include generator matrices in JSON")
    common(r)
    r.set_defaults(func=cmd_cartier_rep)

    o = sub.add_parser("oracle", help="compare a closed form against direct computation")
    o.add_argument("name", choices=sorted(ORACLES))
    o.add_argument("--n", type=int)
    o.add_argument("--a")
    o.add_argument("--b")
    o.add_argument("--k", type=int)
    common(o)
    o.set_defaults(func=cmd_oracle)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except pc.TrivialAssociatorRequired as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NotInvertibleError as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except BrokenPipeError:
        # downstream closed early (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
