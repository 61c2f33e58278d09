"""Command-line surface: every pipeline stage, the shipped presets, and the
verification suites.  Identical invocations produce byte-identical output."""
from __future__ import annotations

import argparse
import sys

from gmpy2 import mpq

from . import data, modeq, numerics
from .hecke import (CaseValidationError, HeckePipeline, PipelineError, dimension,
                    delta_t2_eigenvalue, verify_tables, _frac)
from .ratfun import (RatFun, SchwarzFamily, parse_poly, print_ratfun,
                     q_from_signature, q_from_theta_form, solve_covering_constants,
                     INF, double_pole_coefficient, residue_at_double_pole)
from .scalars import Scalar, print_cpoly, print_rat, print_scalar


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="shimhecke",
        description="exact Hecke-operator matrices on genus-zero Shimura curves")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, case_required=True):
        p.add_argument("--case", required=case_required,
                       help="preset name (%s) or a config path" % ", ".join(data.PRESETS))
        p.add_argument("--order", type=int, default=None, help="series truncation override")
        p.add_argument("--output", choices=("human", "machine"), default="human")
        p.add_argument("--precision", type=int, default=53,
                       help="floating significand bits (only 53 is built)")
        p.add_argument("--margin", type=int, default=2,
                       help="extra over-determination grades")

    p = sub.add_parser("schwarzian", help="derive/verify the normal-form Q(t)")
    common(p, case_required=False)
    p.add_argument("--fixture", default=None,
                   help="verify a shipped Q(t) fixture (e.g. x39star_q) instead")

    p = sub.add_parser("modular-equation", help="derive Phi(s,t) from the parametrization")
    common(p)
    p.add_argument("--fixture", default=None, help="fixture name to diff against")

    p = sub.add_parser("puiseux", help="list Puiseux branches of the case's equation")
    common(p)

    p = sub.add_parser("hecke", help="print the Hecke matrix for a weight")
    common(p)
    p.add_argument("--weight", type=int, required=True)

    p = sub.add_parser("verify", help="run the fixture suites for a case")
    common(p)

    p = sub.add_parser("evaluate", help="numeric special-value report")
    common(p, case_required=False)

    p = sub.add_parser("demo-sl2z", help="classical eigenvalue computation trace")
    common(p, case_required=False)
    return ap


def _check_precision(args):
    if args.precision != 53:
        raise PipelineError("only the 53-bit significand build is available")


def cmd_schwarzian(args) -> int:
    _check_precision(args)
    out = []
    if args.fixture:
        q = data.load_ratfun_fixture(args.fixture)
        report = verify_schwarzian_fixture(q)
        out.extend(report)
        print("\n".join(out))
        return 0 if all(not l.startswith("FAIL") for l in report) else 1
    case = data.load_case(args.case)
    if case.name == "x6star-T5":
        q1 = q_from_signature([(0, 6), (1, 2), (INF, 4)])
        out.append("signature route (values 0, 1, inf): Q = " + print_ratfun(q1))
        q2 = q_from_signature([(0, 6), (-540, 2), (INF, 4)])
        r1 = RatFun(parse_poly("-1/6") * parse_poly("t + 540") + parse_poly("t/1620") * parse_poly("t"),
                    parse_poly("t + 540")) if False else None
        out.append("rescaled route (values 0, -540, inf): Q = " + print_ratfun(q2))
        print("\n".join(out))
        return 0
    if case.name == "x10star-T3":
        r1 = RatFun(parse_poly("4t^2 - 29t - 108"), parse_poly("6").__mul__(parse_poly("t^2 - 29t + 54")))
        r0 = RatFun(parse_poly("7t^2 - 56t"), parse_poly("144") * parse_poly("t^2 - 29t + 54"))
        q_theta = q_from_theta_form(r1, r0)
        fam_t = SchwarzFamily(rat_points=[(0, 3, "B1"), (2, 2, "B2"), (27, 2, "B3")],
                              inf_order=2, free=["B3"])
        w3 = RatFun.from_pair([mpq(10, 9), -1], [1])
        fam_u = SchwarzFamily(quad_points=[([5, -10, 9], 2, ("C1", "C2")),
                                           ([17, -10, 9], 2, ("C3", "C4"))],
                              inf_order=3, symmetry=w3, free=["C1"])
        rmap = RatFun(parse_poly("216u^3 - 648u^2 + 648u - 216", "u"),
                      parse_poly("9u^4 + 8u^3 + 6u^2 + 24u + 17", "u"))
        vals = solve_covering_constants(rmap, fam_t.family(), fam_u.family())
        q_cov = fam_t.at({"B3": vals["B3"]})
        agree = q_theta == q_cov
        out.append("theta-form route:  Q = " + print_ratfun(q_theta))
        out.append("covering route:    Q = " + print_ratfun(q_cov))
        out.append(f"covering constants: B3 = {print_rat(vals['B3'])}, C1 = {print_rat(vals['C1'])}")
        out.append("routes agree exactly" if agree else "FAIL routes differ")
        print("\n".join(out))
        return 0 if agree else 1
    raise PipelineError(f"no Schwarzian routes wired for case {case.name}")


def verify_schwarzian_fixture(q: RatFun) -> list[str]:
    """Verify-mode on a shipped Q(t): each double pole has coefficient
    (1 - 1/e^2)/4 for an integer order e, and the residues satisfy the
    vanishing-at-infinity relations."""
    from .scalars import Cyclo, imag_unit, sqrt3
    n = 24
    report = []
    i = imag_unit(n)
    r3 = sqrt3(n)
    half = mpq(1, 2)
    s = lambda c: Scalar(c)
    two_i = s(i.scale(2))
    m3 = s(r3 * i)  # sqrt(-3)
    poles = [two_i, -two_i,
             (s(Cyclo.from_rat(n, -1)) + m3).scale(half),
             (s(Cyclo.from_rat(n, -1)) - m3).scale(half),
             (s(Cyclo.from_rat(n, -23)) + m3).scale(mpq(1, 14)),
             (s(Cyclo.from_rat(n, -23)) - m3).scale(mpq(1, 14))]
    orders = []
    ok_all = True
    for a in poles:
        coef = double_pole_coefficient(q, a)
        # (1 - 1/e^2)/4 = coef -> e^2 = 1/(1 - 4 coef)
        if not coef.is_rational():
            ok_all = False
            report.append("FAIL non-rational double-pole coefficient")
            continue
        c = coef.to_rat()
        e2 = 1 / (1 - 4 * c)
        e_ok = e2.denominator == 1 and int(e2) > 1
        from gmpy2 import isqrt
        e = int(isqrt(int(e2))) if e_ok else 0
        e_ok = e_ok and e * e == int(e2)
        ok_all = ok_all and e_ok
        orders.append(e)
        report.append(f"{'pass' if e_ok else 'FAIL'} double pole coefficient "
                      f"{print_rat(c)} -> elliptic order {e}")
    zero = Scalar.zero(n)
    s0 = zero
    s1 = zero
    s2 = zero
    for a, e in zip(poles, orders):
        b = residue_at_double_pole(q, a)
        coef = Scalar.from_rat(n, mpq(1 - mpq(1, e * e), 4))
        s0 = s0 + b
        s1 = s1 + a * b + coef
        s2 = s2 + a * a * b + a * coef.scale(2)
    rel_ok = s0.is_zero() and s1.is_zero() and s2.is_zero()
    ok_all = ok_all and rel_ok
    report.append(("pass" if rel_ok else "FAIL") + " residue relations at infinity")
    return report


def cmd_modular_equation(args) -> int:
    _check_precision(args)
    case = data.load_case(args.case)
    cfg = case.modular_equation
    r = RatFun(parse_poly(cfg["R_num"], "u"), parse_poly(cfg["R_den"], "u"))
    w = RatFun(parse_poly(cfg["w_num"], "u"), parse_poly(cfg["w_den"], "u"))
    me = modeq.derive_modular_equation(r, w)
    code = 0
    lines = []
    if args.fixture:
        fix = data.load_modular_equation(args.fixture)
        lam = me.scale_to(fix.phi)
        if lam is None:
            lines.append("FAIL fixture is not a rational multiple")
            code = 1
        else:
            lines.append(f"fixture match with global scale {print_rat(lam)}")
    if args.output == "machine":
        lines.append(me.serialize().rstrip())
    else:
        lines.append(f"degrees: s^{me.deg_s()}, t^{me.deg_t()}; "
                     f"{len(me.phi.coeffs)} monomials")
        for disc, g in me.discarded:
            from .ratfun import print_poly
            lines.append(f"discarded {disc}: {print_poly(g, 'x')}")
    print("\n".join(lines))
    return code


def cmd_puiseux(args) -> int:
    _check_precision(args)
    case = data.load_case(args.case)
    cfg = case.modular_equation
    r = RatFun(parse_poly(cfg["R_num"], "u"), parse_poly(cfg["R_den"], "u"))
    w = RatFun(parse_poly(cfg["w_num"], "u"), parse_poly(cfg["w_den"], "u"))
    me = modeq.derive_modular_equation(r, w)
    order = args.order or 10
    lines = []
    for center, slope, initial, length in modeq.rational_branch_data(me.phi):
        d = int(mpq(slope).denominator)
        root = modeq.hensel_lift(me.phi, center, slope, initial, order * d, d)
        coeffs = []
        for g in range(root.series.val, min(root.series.order, root.series.val + order)):
            c = root.series.coeff(g)
            if not c.is_zero():
                coeffs.append(f"{print_rat(c.constant().to_rat())} t^{{{g}/{d}}}"
                              if d > 1 else f"{print_rat(c.constant().to_rat())} t^{g}")
        lines.append(f"branch at s = {print_rat(center)}, slope {print_rat(slope)}, "
                     f"conjugates {length}: " + " + ".join(coeffs[:order]))
    print("\n".join(lines))
    return 0


_DEFAULT_ORDERS = {"x6star-T5": 26, "x10star-T3": 19}


def _pipeline_for(case, args, weights):
    order = args.order
    if order is None:
        d = case.ram
        need = 0
        for k in weights:
            dk, _ = dimension(k, case.signature)
            e1 = case.signature[0][0]
            frac = _frac(mpq(k) * (1 - mpq(1, e1)) / 2)
            need = max(need, int(frac * d) + (dk - 1 + args.margin) * d + 1)
        order = need + d
    pipe = HeckePipeline(case, order=order, margin=args.margin)
    pipe.match_branch_seed()
    pipe.transformed_form_series()
    return pipe


def cmd_hecke(args) -> int:
    _check_precision(args)
    case = data.load_case(args.case)
    if case.kind == "classical":
        res = delta_t2_eigenvalue(case)
        print(print_rat(res.eigenvalue))
        return 0
    pipe = _pipeline_for(case, args, [args.weight])
    m = pipe.hecke_matrix(args.weight)
    print(m.machine() if args.output == "machine" else m.pretty())
    return 0


def cmd_verify(args) -> int:
    _check_precision(args)
    case = data.load_case(args.case)
    results = verify_tables(case, order=args.order, margin=args.margin)
    ok = True
    lines = []
    for k, matched, got, want in results:
        ok = ok and matched
        if args.output == "machine":
            lines.append(f"weight {k} {'pass' if matched else 'FAIL'}")
        else:
            lines.append(f"weight {k:2d}: {'match' if matched else 'MISMATCH'}")
            if not matched:
                lines.append("  computed: " + got.machine())
                lines.append("  expected: " + want.machine())
    lines.append(("all tables match" if ok else "TABLE MISMATCH")
                 + f" ({case.name})")
    print("\n".join(lines))
    return 0 if ok else 1


def cmd_evaluate(args) -> int:
    _check_precision(args)
    checks = numerics.verify_special_values()
    if args.output == "machine":
        print("\n".join(c.line() for c in checks))
    else:
        print(numerics.format_report(checks))
    return 0 if all(c.passed for c in checks) else 1


def cmd_demo(args) -> int:
    _check_precision(args)
    case = data.load_case("sl2z-T2")
    res = delta_t2_eigenvalue(case)
    swapped = delta_t2_eigenvalue(case, swap_half_branches=True)
    lines = list(res.trace[:-1])
    lines.append("half-branch swap leaves the result unchanged: "
                 + ("yes" if swapped.eigenvalue == res.eigenvalue else "NO"))
    lines.append(res.trace[-1])
    print("\n".join(lines))
    return 0 if res.eigenvalue == mpq(-24) else 1


def main(argv=None) -> int:
    ap = _build_parser()
    args = ap.parse_args(argv)
    handlers = {
        "schwarzian": cmd_schwarzian,
        "modular-equation": cmd_modular_equation,
        "puiseux": cmd_puiseux,
        "hecke": cmd_hecke,
        "verify": cmd_verify,
        "evaluate": cmd_evaluate,
        "demo-sl2z": cmd_demo,
    }
    try:
        return handlers[args.command](args)
    except (PipelineError, CaseValidationError, ValueError, ArithmeticError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
