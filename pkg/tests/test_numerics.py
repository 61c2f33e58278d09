import cmath
import math
import random

import mpmath
import pytest
from gmpy2 import mpq

from shimhecke.numerics import (ConvergenceFailure, CutViolation, InsufficientMargin,
                                eval_2f1, eval_2f1_at_one, format_report, gamma,
                                ode_continue, pin_root_of_unity, singular_points,
                                verify_special_values)
from shimhecke.ratfun import Poly, RatFun, parse_poly
from shimhecke.series import frobenius_solutions

EQ9 = RatFun(parse_poly("3t^4 - 119t^3 + 3157t^2 - 7296t + 10368"),
             Poly([mpq(16)]) * parse_poly("t^2")
             * parse_poly("t-2").pow(2) * parse_poly("t-27").pow(2))


def test_gamma_values():
    assert abs(gamma(mpq(1, 2)) - math.sqrt(math.pi)) < 1e-13
    assert abs(gamma(mpq(7, 6)) / gamma(mpq(1, 6)) - mpq(1, 6)) < 1e-13
    with pytest.raises(ValueError):
        gamma(0)


def test_gamma_reflection_property():
    rng = random.Random(20)
    for _ in range(20):
        x = mpq(rng.randrange(1, 99), 100)
        lhs = gamma(x) * gamma(1 - x)
        rhs = math.pi / math.sin(math.pi * float(x))
        assert abs(lhs - rhs) <= 1e-11 * abs(rhs)


def test_gamma_against_mpmath():
    for x in (mpq(13, 24), mpq(19, 24), mpq(5, 6), mpq(7, 6), mpq(23, 24)):
        assert abs(gamma(x) - float(mpmath.gamma(mpmath.mpf(x.numerator) / int(x.denominator)))) < 1e-13


def test_2f1_trivial_and_cut():
    assert eval_2f1(mpq(1, 3), mpq(1, 7), mpq(5, 6), 0) == 1
    with pytest.raises(CutViolation):
        eval_2f1(1, 1, 2, 1.5)


def test_2f1_two_routes_agree():
    a, b, c = 1 / 24, 7 / 24, 5 / 6
    from shimhecke.numerics import _series_2f1
    for k in range(20):
        z = 0.1 * cmath.exp(2j * cmath.pi * k / 20)
        direct = _series_2f1(a, b, c, z)
        pfaff = (1 - z) ** (-a) * _series_2f1(a, c - b, c, z / (z - 1))
        assert abs(direct - pfaff) < 1e-13


def test_2f1_against_mpmath():
    args = [(-1) * (2 ** 10 * 3 ** 3 * 5) / 11 ** 4,
            (2 ** 10 * 3 ** 3 * 5 ** 6 * 7) / (11 ** 4 * 23 ** 4),
            -0.93, 0.4 + 0.3j]
    for z in args:
        mine = eval_2f1(mpq(1, 24), mpq(7, 24), mpq(5, 6), z)
        ref = complex(mpmath.hyp2f1(mpmath.mpf(1) / 24, mpmath.mpf(7) / 24,
                                    mpmath.mpf(5) / 6, z))
        assert abs(mine - ref) <= 1e-12 * max(1.0, abs(ref))


def test_gauss_value_by_extrapolation():
    v = eval_2f1_at_one(mpq(1, 24), mpq(7, 24), mpq(5, 6))
    g = gamma(mpq(5, 6)) * gamma(mpq(1, 2)) / (gamma(mpq(19, 24)) * gamma(mpq(13, 24)))
    assert abs(v - g) < 1e-9


def test_pin_root_of_unity():
    idx, margin = pin_root_of_unity(cmath.exp(2j * cmath.pi * 2 / 6), 6)
    assert idx == 2 and margin > 1e6
    with pytest.raises(InsufficientMargin):
        pin_root_of_unity(cmath.exp(1j * math.pi / 6), 6)  # half-way between roots
    with pytest.raises(ValueError):
        pin_root_of_unity(0j, 6)


def test_ode_continue_zero_path_and_wronskian():
    assert ode_continue(EQ9, 1 + 2j, 3 + 0j, [-1.0, -1.0]) == (1 + 2j, 3 + 0j)
    f1 = frobenius_solutions(EQ9, mpq(1, 3), 150, ram=3)
    f2 = frobenius_solutions(EQ9, mpq(2, 3), 150, ram=3)

    def start(F):
        cube = -abs(-0.5) ** (1 / 3)
        y = dy = 0.0
        for k in range((F.order - F.val) // 3 + 1):
            g = F.val + 3 * k
            if g >= F.order:
                break
            cv = float(F.coeff(g).constant().to_rat())
            y += cv * cube ** g
            dy += cv * (g / 3) * cube ** (g - 3)
        return y, dy

    y1, dy1 = start(f1)
    y2, dy2 = start(f2)
    Y1 = ode_continue(EQ9, y1, dy1, [-0.5, -192 / 25])
    Y2 = ode_continue(EQ9, y2, dy2, [-0.5, -192 / 25])
    wr = Y1[0] * Y2[1] - Y2[0] * Y1[1]
    assert abs(wr - 1 / 3) < 1e-8
    with pytest.raises(ValueError):
        ode_continue(EQ9, 1, 0, [-0.5, 1.0])  # path hits the singularity at 0


def test_ode_continue_cross_checks_pfaff():
    # normal-form equation of the (0; 6@0, 2@-540, 4@inf) curve: continue a
    # solution along the positive axis and compare with the transformed series
    from shimhecke.ratfun import q_from_signature, INF
    q = q_from_signature([(0, 6), (-540, 2), (INF, 4)])
    a0 = 74649600 / 14641
    # G = t^(5/12) (1 + t/540)^(1/4) 2F1(1/24, 7/24; 5/6; -t/540) solves G'' + qG = 0
    def g_and_deriv(t, h=1e-6):
        def g(x):
            return (x ** (5 / 12) * (1 + x / 540) ** 0.25
                    * eval_2f1(mpq(1, 24), mpq(7, 24), mpq(5, 6), -x / 540).real)
        return g(t), (g(t + h) - g(t - h)) / (2 * h)

    y0, dy0 = g_and_deriv(1.0)
    got = ode_continue(q, y0, dy0, [1.0, a0])
    want, _ = g_and_deriv(a0)
    assert abs(got[0] - want) < 1e-6 * abs(want)


def test_special_value_report():
    checks = verify_special_values()
    by_id = {c.ident: c for c in checks}
    assert by_id["cm-value-1"].delta <= 1e-10
    assert by_id["cm-value-2"].delta <= 1e-9
    assert by_id["cm-value-3"].delta <= 1e-9
    info = by_id["cm-value-4-informational"]
    assert info.informational and info.passed
    report = format_report(checks)
    assert "pass" in report and "info" in report
    # the closed form evaluates to 0.9553578...
    assert abs(by_id["cm-value-1"].lhs - 0.9553578) < 1e-6


def test_connection_constant_consistency():
    # C F2/F1 at the transformed value equals the Moebius ratio of the image
    # point, equivalently 1 - (z + z^5 - z^7)/sqrt(6)
    from shimhecke.data import load_case
    from shimhecke.hecke import HeckePipeline
    from shimhecke.scalars import Cyclo, Scalar, sqrt6
    case = load_case("x6star-T5")
    pipe = HeckePipeline(case, order=8)
    cval = pipe.numeric_connection_constant()
    a0 = 74649600 / 14641
    f1, f2 = pipe.numeric_f_values(a0)
    lhs = cval * f2 / f1
    n = 24
    z = Cyclo.zeta(n)
    unit = z + z.pow(5) - z.pow(7)
    exact = Scalar.one(n) - Scalar(unit * sqrt6(n).inv())
    assert abs(lhs - exact.numeric()) < 1e-9
    # and the geometric form (image - P)/(image - Pbar)
    img = case.classes[0].image_point.numeric()
    P = case.base_point.numeric()
    Pb = case.base_point_bar.numeric()
    assert abs(lhs - (img - P) / (img - Pb)) < 1e-9


def test_singular_points():
    sings = sorted(s.real for s in singular_points(EQ9))
    assert [round(s, 6) for s in sings] == [0.0, 0.0, 2.0, 2.0, 27.0, 27.0]
