"""
Command line entry point: expand, verify, demo, rdm.

Exit codes: 0 pass, 1 verification or domain failure, 2 usage error.
"""
import argparse
import json
import os
import sys
from fractions import Fraction

import numpy as np

from . import transforms as tf
from .errors import EnumerationLimitError, InadmissibleTermError, ParseError, ValidationError
from .expr import Expression, cumulant, moment, render
from .fermi import (
    FockVector,
    compute_rdm,
    expected_trace,
    load_state,
    rdm_cumulants,
    reconstruct_rdm,
)
from .models import build_random_model, build_split_model, load_model
from .numeric import (
    DEFAULT_TOL,
    evaluate,
    verify_cluster_property,
    verify_identity,
    verify_unconnected_factorization,
)
from .ordering import OrderingMapKind, parse_map

MAPS = [k.value for k in OrderingMapKind]
DOMAIN_ERRORS = (ValidationError, EnumerationLimitError, InadmissibleTermError, ParseError)


class UsageError(Exception):
    pass


def _threads():
    raw = os.environ.get("OPCUMULANT_THREADS")
    if raw is None:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"OPCUMULANT_THREADS must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise UsageError(f"OPCUMULANT_THREADS must be a positive integer, got {raw!r}")
    return value


def _index_list(text):
    try:
        out = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated index list: {text!r}") from None
    if not out or min(out) < 1:
        raise argparse.ArgumentTypeError(f"indices must be >= 1: {text!r}")
    return out


def _fraction(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _fmt(x):
    return f"{x:.3e}"


def _emit(args, lines, payload):
    if args.format == "json":
        print(json.dumps(payload, sort_keys=True))
    else:
        print("\n".join(lines))


# ------------------------------------------------------------------ expand

FORMULAS = {
    "recursive": None,
    "pto-direct": lambda n, m: tf.cumulants_from_moments_pto_direct(n),
    "tto-direct": lambda n, m: tf.cumulants_from_moments_tto_direct(n),
    "roerdnik": lambda n, m: tf.cumulants_from_moments_roerdnik(n),
}


def cmd_expand(args):
    map_kind = parse_map(args.map)
    if args.direction == "moments":
        expr = tf.moments_from_cumulants(args.n, map_kind)
    elif args.formula == "recursive":
        expr = tf.cumulants_from_moments_recursive(args.n, map_kind)
    else:
        expr = FORMULAS[args.formula](args.n, map_kind)
    print(render(expr, args.format))
    return 0


# ------------------------------------------------------------------ verify

def _model(args, n_atoms, commuting=False):
    if args.model:
        return load_model(args.model)
    return build_random_model(args.dim, n_atoms, args.samples, args.seed, commuting=commuting)


def _full(n, kind):
    return Expression.from_bracket((moment if kind == "m" else cumulant)(*range(1, n + 1)))


def _verify_identity(args):
    map_kind = parse_map(args.map)
    if map_kind is OrderingMapKind.GRASSMANN:
        raise ValidationError("Grassmann identities are checked on tensors: use 'rdm check'")
    n = args.n
    model = _model(args, n, commuting=map_kind is OrderingMapKind.CLASSICAL)
    checks = [
        ("moments_from_cumulants", tf.moments_from_cumulants(n, map_kind), _full(n, "m"), "symbolic"),
        ("cumulants_from_moments_recursive", tf.cumulants_from_moments_recursive(n, map_kind), _full(n, "c"), "recursive"),
    ]
    if map_kind is OrderingMapKind.PTO:
        checks.append(("cumulants_from_moments_pto_direct", tf.cumulants_from_moments_pto_direct(n), _full(n, "c"), "recursive"))
    if map_kind is OrderingMapKind.TTO:
        checks.append(("cumulants_from_moments_tto_direct", tf.cumulants_from_moments_tto_direct(n), _full(n, "c"), "recursive"))
    results = []
    for name, lhs, rhs, mode in checks:
        results.append((name, verify_identity(lhs, rhs, model, map_kind, args.tol, cumulants=mode)))
    return f"identity n={n} map={map_kind.value}", results


def _verify_cluster(args):
    map_kind = parse_map(args.map)
    n = args.n
    split = args.split if args.split is not None else max(1, n // 2)
    if not 1 <= split < n:
        raise ValidationError(f"split must satisfy 1 <= split < n, got split={split}, n={n}")
    model = build_split_model(args.dim, split, seeds=(args.seed, args.seed + 1), n_atoms=n,
                              n_samples=args.samples, correlated=args.correlated, group_a=args.group_a)
    rep = verify_cluster_property(n, split, map_kind, model, args.tol)
    label = f"cluster n={n} split={split} map={map_kind.value}" + (" correlated" if args.correlated else "")
    return label, [("mixed_cumulants", rep)]


def _verify_factorization(args):
    split = args.split if args.split is not None else 2
    atoms = args.atoms if args.atoms is not None else 2 * split
    model = build_split_model(args.dim, split, seeds=(args.seed, args.seed + 1), n_atoms=atoms,
                              n_samples=args.samples, correlated=args.correlated)
    rep = verify_unconnected_factorization(args.n, model, args.tol, parse_map(args.map))
    label = f"factorization order={args.n} split={split} atoms={atoms}" + (" correlated" if args.correlated else "")
    return label, [("per_order", rep)]


def _verify_roerdnik(args):
    n = args.n
    model = _model(args, n)
    rhs = evaluate(cumulant(*range(1, n + 1)), model, OrderingMapKind.PTO, cumulants="recursive")
    lhs = evaluate(tf.cumulants_from_moments_roerdnik(n), model, OrderingMapKind.TTO, cumulants="recursive")
    dev = float(np.max(np.abs(lhs - rhs)))
    scale = float(max(np.max(np.abs(lhs)), np.max(np.abs(rhs))))
    rel = dev / scale if scale else 0.0
    from .numeric import VerificationReport

    return f"roerdnik-equivalence n={n}", [("roerdnik_vs_pto", VerificationReport(dev, rel, rel <= args.tol))]


VERIFIERS = {
    "identity": _verify_identity,
    "cluster": _verify_cluster,
    "factorization": _verify_factorization,
    "roerdnik-equivalence": _verify_roerdnik,
}


def cmd_verify(args):
    label, results = VERIFIERS[args.kind](args)
    ok = all(r.passed for _, r in results)
    header = f"verify {label} seed={args.seed} dim={args.dim} samples={args.samples} tol={args.tol:g}"
    lines = [header]
    for name, r in results:
        lines.append(f"  {name}: max_abs={_fmt(r.max_abs_deviation)} max_rel={_fmt(r.max_rel_deviation)} "
                     f"{'PASS' if r.passed else 'FAIL'}")
    lines.append("result: " + ("PASS" if ok else "FAIL"))
    payload = {
        "check": label, "seed": args.seed, "dim": args.dim, "samples": args.samples, "tol": args.tol,
        "results": [{"name": name, "max_abs": r.max_abs_deviation, "max_rel": r.max_rel_deviation,
                     "pass": r.passed} for name, r in results],
        "pass": ok,
    }
    _emit(args, lines, payload)
    return 0 if ok else 1


# -------------------------------------------------------------------- demo

def _coeff_line(coeffs):
    return " + ".join(f"({v})*{k}" for k, v in coeffs.items())


def cmd_demo(args):
    from .appendix_a import appendix_a_demo, operator_coefficients, operator_matrices

    if args.continuous:
        rep = appendix_a_demo(args.degree, 1, 0, commuting=args.commuting, t=args.t)
        cont = rep.continuous
        c, d = operator_matrices(args.degree)
        lines = [
            f"demo appendix-a continuous degree={args.degree} t={cont['t']}",
            f"  naive (square after integrating):   {_coeff_line(operator_coefficients(cont['naive'], c, d))}",
            f"  ordered (integrate after ordering): {_coeff_line(operator_coefficients(cont['ordered'], c, d))}",
            f"  mixed term naive:   {cont['naive_mixed'][0] / cont['t'] ** 3}*(CD + DC) t^3",
            f"  mixed term ordered: {cont['ordered_mixed'][1] / cont['t'] ** 3}*(2*CD + DC) t^3",
            f"  residual ordered vs closed form: {cont['residual_ordered']}",
            f"  residual naive vs closed form:   {cont['residual_naive']}",
            f"  quadrature error: {_fmt(cont['quadrature_error'])}",
        ]
        ok = cont["residual_ordered"] == 0 and cont["residual_naive"] == 0
        payload = {
            "t": str(cont["t"]),
            "residual_ordered": str(cont["residual_ordered"]),
            "residual_naive": str(cont["residual_naive"]),
            "mixed_naive": str(cont["naive_mixed"][0] / cont["t"] ** 3),
            "mixed_ordered": str(cont["ordered_mixed"][1] / cont["t"] ** 3),
            "pass": ok,
        }
    else:
        rep = appendix_a_demo(args.degree, args.t1, args.t2, commuting=args.commuting)
        lines = [f"demo appendix-a degree={args.degree} t1={rep.t1} t2={rep.t2}" + (" commuting" if args.commuting else "")]
        if not args.commuting:
            c, d = operator_matrices(args.degree)
            lines += [
                f"  naive (sum then order):   {_coeff_line(operator_coefficients(rep.naive, c, d))}",
                f"  ordered (order then sum): {_coeff_line(operator_coefficients(rep.ordered, c, d))}",
                f"  discrepancy:              {_coeff_line(operator_coefficients(rep.discrepancy, c, d))}",
            ]
        else:
            lines.append(f"  naive equals ordered: {not any(x != 0 for x in rep.discrepancy.ravel())}")
        lines += [
            f"  residual vs (t1+t2)(DC-CD): {rep.residual_sum}",
            f"  residual vs (t1-t2)(DC-CD): {rep.residual_difference}",
        ]
        ok = rep.residual_sum == 0
        payload = {
            "t1": str(rep.t1), "t2": str(rep.t2),
            "residual_sum": str(rep.residual_sum),
            "residual_difference": str(rep.residual_difference),
            "pass": ok,
        }
    lines.append("result: " + ("PASS" if ok else "FAIL"))
    _emit(args, lines, payload)
    return 0 if ok else 1


# --------------------------------------------------------------------- rdm

def _fmt_complex(z):
    if abs(z.imag) < 1e-15:
        return f"{z.real:.12g}"
    return f"{z.real:.12g}{z.imag:+.12g}j"


def _state(args):
    if args.state:
        return load_state(args.state)
    m = args.orbitals
    if args.case == "determinant":
        occ = [int(x) for x in args.occupied.split(",")] if args.occupied else list(range(1, args.electrons + 1))
        return FockVector.slater_determinant(m, occ)
    if args.case == "random":
        return FockVector.random_state(m, args.electrons, args.seed)
    if args.case in ("product", "additivity"):
        split = args.split if args.split is not None else m // 2
        na = args.electrons_a if args.electrons_a is not None else max(1, split // 2)
        nb = args.electrons_b if args.electrons_b is not None else max(1, (m - split) // 2)
        a = FockVector.random_state(split, na, args.seed)
        b = FockVector.random_state(m - split, nb, args.seed + 1)
        return FockVector.product_state(a, b)
    raise ValidationError(f"case {args.case!r} needs --state or a generator case")


def _tensor_lines(name, tensor, show_all):
    lines = []
    for up, lo, val in tensor.nonzero_entries(1e-14):
        if not show_all and not (list(up) == sorted(set(up)) and list(lo) == sorted(set(lo))):
            continue
        lines.append(f"{name} ({','.join(map(str, up))}|{','.join(map(str, lo))}) {_fmt_complex(val)}")
    return lines


def _rdm_check(args):
    m, tol = args.orbitals, args.tol
    rows = []
    if args.case == "determinant":
        from itertools import combinations

        worst, worst_trace = 0.0, 0.0
        for occ in combinations(range(1, m + 1), args.electrons):
            st = FockVector.slater_determinant(m, occ)
            deltas = rdm_cumulants(st, min(2, args.electrons))
            if args.electrons >= 2:
                worst = max(worst, deltas[2].max_abs())
            worst_trace = max(worst_trace, abs(deltas[1].trace() - args.electrons))
        rows.append(("delta2_max_entry", worst, worst <= tol))
        rows.append(("trace_d1_error", worst_trace, worst_trace <= tol))
    elif args.case == "additivity":
        split = args.split if args.split is not None else m // 2
        st = _state(args)
        deltas = rdm_cumulants(st, 2)
        group_a = list(range(1, split + 1))
        cross_delta = deltas[2].cross_block_max(group_a)
        cross_d = compute_rdm(st, 2).cross_block_max(group_a)
        rows.append(("delta2_cross_block", cross_delta, cross_delta <= tol))
        rows.append(("d2_cross_block_nonzero", cross_d, cross_d > 1e3 * tol))
    elif args.case == "random":
        st = _state(args)
        deltas = rdm_cumulants(st, args.max_p)
        n = st.particle_number()
        for p in range(2, args.max_p + 1):
            err = (reconstruct_rdm(deltas, p) - compute_rdm(st, p)).max_abs()
            rows.append((f"reconstruct_d{p}", err, err <= tol))
        for p in range(1, args.max_p + 1):
            err = abs(compute_rdm(st, p).trace() - expected_trace(n, p))
            rows.append((f"trace_d{p}_error", err, err <= tol))
    else:
        raise ValidationError(f"unknown check case {args.case!r}")
    return rows


def cmd_rdm(args):
    if args.action == "check":
        if args.tol is None:
            args.tol = 1e-10 if args.case == "random" else 1e-12
        rows = _rdm_check(args)
        ok = all(r[2] for r in rows)
        lines = [f"rdm check case={args.case} orbitals={args.orbitals} tol={args.tol:g}"]
        lines += [f"  {name}: {_fmt(val)} {'PASS' if good else 'FAIL'}" for name, val, good in rows]
        lines.append("result: " + ("PASS" if ok else "FAIL"))
        payload = {"case": args.case, "rows": [{"name": r[0], "value": r[1], "pass": r[2]} for r in rows], "pass": ok}
        _emit(args, lines, payload)
        return 0 if ok else 1
    st = _state(args)
    if args.action == "compute":
        tensors = [(f"D{args.p}", compute_rdm(st, args.p))]
    else:
        deltas = rdm_cumulants(st, args.max_p)
        tensors = [(f"Delta{p}", deltas[p]) for p in sorted(deltas)]
    lines, payload = [], {}
    for name, t in tensors:
        lines += _tensor_lines(name, t, args.all)
        payload[name] = [{"upper": list(u), "lower": list(lo), "re": v.real, "im": v.imag}
                         for u, lo, v in t.nonzero_entries(1e-14)]
    _emit(args, lines, payload)
    return 0


# ------------------------------------------------------------------ parser

def _positive(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def build_parser():
    p = argparse.ArgumentParser(prog="opcumulant", description="Generalized moment/cumulant expansions and checks")
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["text", "json"], default="text")

    e = sub.add_parser("expand", parents=[common], help="print a moment/cumulant expansion")
    e.add_argument("--direction", choices=["moments", "cumulants"], required=True)
    e.add_argument("--n", type=_positive, required=True)
    e.add_argument("--map", choices=MAPS, default="pto")
    e.add_argument("--formula", choices=sorted(FORMULAS), default="recursive",
                   help="closed form used for the cumulant direction")
    e.set_defaults(func=cmd_expand)

    v = sub.add_parser("verify", parents=[common], help="numeric verification on finite models")
    v.add_argument("kind", choices=sorted(VERIFIERS))
    v.add_argument("--n", type=_positive, default=3)
    v.add_argument("--map", choices=MAPS, default="pto")
    v.add_argument("--dim", type=_positive, default=4)
    v.add_argument("--samples", type=_positive, default=3)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tol", type=float, default=DEFAULT_TOL)
    v.add_argument("--split", type=_positive)
    v.add_argument("--atoms", type=_positive, help="atom count for the factorization model")
    v.add_argument("--group-a", type=_index_list, help="comma-separated atoms of group A (default 1..split)")
    v.add_argument("--correlated", action="store_true", help="use a dependent (non-product) control model")
    v.add_argument("--model", help="JSON model file")
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("demo", parents=[common], help="worked demonstrations")
    d.add_argument("name", choices=["appendix-a"])
    d.add_argument("--degree", type=int, default=6)
    d.add_argument("--t1", type=_fraction, default=Fraction(1))
    d.add_argument("--t2", type=_fraction, default=Fraction(0))
    d.add_argument("--t", type=_fraction, default=Fraction(1))
    d.add_argument("--continuous", action="store_true")
    d.add_argument("--commuting", action="store_true", help="replace C and D by the identity")
    d.set_defaults(func=cmd_demo)

    r = sub.add_parser("rdm", parents=[common], help="fermionic reduced density matrices")
    r.add_argument("action", choices=["compute", "cumulants", "check"])
    r.add_argument("--state", help="state file with 'bitstring re im' lines")
    r.add_argument("--case", choices=["determinant", "random", "product", "additivity"], default="determinant")
    r.add_argument("--orbitals", type=_positive, default=4)
    r.add_argument("--electrons", type=_positive, default=2)
    r.add_argument("--occupied", help="comma-separated occupied orbitals for a determinant")
    r.add_argument("--split", type=_positive)
    r.add_argument("--electrons-a", type=_positive)
    r.add_argument("--electrons-b", type=_positive)
    r.add_argument("--p", type=_positive, default=2)
    r.add_argument("--max-p", type=_positive, default=2)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--tol", type=float)
    r.add_argument("--all", action="store_true", help="print every nonzero entry, not only sorted index tuples")
    r.set_defaults(func=cmd_rdm)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _threads()
    except UsageError as exc:
        parser.error(str(exc))
    try:
        return args.func(args)
    except DOMAIN_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
