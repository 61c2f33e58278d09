"""Independent oracles used by the Hecke tests.

Both deliberately avoid the pipeline's own route: the branch-sum matrix works
entirely in C-free rational arithmetic from the modular-equation branches, and
the ordinary-point series rebuilds the transformed F from Taylor solutions of
the differential equation at the transformed value.
"""
from gmpy2 import mpq

from shimhecke.hecke import HeckePipeline, _floor, dimension
from shimhecke.ratfun import RatFun, parse_poly
from shimhecke.scalars import CPoly, Scalar
from shimhecke.series import PuiseuxSeries, ratfun_laurent


def branch_sum_matrix(pipe: HeckePipeline, k: int):
    """Matrix rows from p^(k/2-1) sum_j (s_j')^(k/2) s_j^l Theta(s_j)
    = sum_m M[l][m] t^m Theta(t), Theta the integer-exponent quotient of the
    weight-k and squared weight-2 basis prefactors."""
    case = pipe.case
    n, d, p = pipe.n, pipe.d, pipe.p
    dk, _ = dimension(k, case.signature)
    sig = case.signature
    e1 = sig[0][0]
    fl1 = _floor(mpq(k) * (1 - mpq(1, e1)) / 2)
    fls = [(a, _floor(mpq(k) * (1 - mpq(1, e)) / 2)) for e, a in sig[1:] if a != "inf"]
    N = pipe.order
    rows = []
    for l in range(dk):
        total = None
        for j in range(len(case.cosets)):
            s = pipe.roots[j].series
            term = s.derive().pow_int(k // 2)
            term = term * s.pow_int(l - fl1)
            for a, fl in fls:
                base = pipe.one.truncate(s.order) - s.scale(1 / mpq(a)).truncate(s.order)
                term = term * base.pow_int(-fl)
            total = term if total is None else total + term
        total = total.scale(mpq(p) ** (k // 2 - 1))
        # clear Theta(t): multiply by t^fl1 prod (1 - t/a)^fl
        clear = PuiseuxSeries.t_power(n, d, fl1 * d, total.order + max(fl1 * d, 0) + d)
        for a, fl in fls:
            tord = clear.order // d + 2
            lin = PuiseuxSeries.from_rationals(
                n, 1, 0, [1, -1 / mpq(a)] + [0] * (tord - 2), tord).with_ram(d)
            clear = clear * lin.pow_int(fl)
        row_ser = total * clear.truncate(min(clear.order, total.order + abs(fl1) * d + d))
        row = []
        for m in range(dk):
            c = row_ser.coeff(m * d)
            s0 = c.constant()
            assert s0.is_rational() or s0.is_zero()
            row.append(s0.to_rat() * row_ser.pref_q if not s0.is_zero() else mpq(0))
        rows.append(row)
    return rows


def ordinary_point_b_series(pipe: HeckePipeline, count: int):
    """Coefficients of the transformed F series from the two Taylor solutions
    of y'' + Q y = 0 at the transformed value (an ordinary point), composed
    with the branch; the combination is pinned by the first two coefficients."""
    case = pipe.case
    n, d = pipe.n, pipe.d
    moving = next(b for b in case.classes if b.kind == "moving")
    center = moving.center
    q = _case_q(pipe)
    qs = RatFun(q.num.shift(center), q.den.shift(center))
    val, lc = ratfun_laurent(qs, 0, count + 4)
    assert val >= 0
    qcoef = [mpq(0)] * (count + 4)
    for i, c in enumerate(lc):
        g = val + i
        if g < len(qcoef):
            qcoef[g] = c

    def taylor(c0, c1, order):
        ys = [mpq(c0), mpq(c1)]
        for m in range(order - 2):
            acc = mpq(0)
            for i in range(min(m + 1, len(qcoef))):
                acc += qcoef[i] * ys[m - i]
            ys.append(-acc / ((m + 1) * (m + 2)))
        return PuiseuxSeries.from_rationals(n, 1, 0, ys, order)

    tord = count // d + 3
    w1 = taylor(1, 0, tord)
    w2 = taylor(0, 1, tord)
    root = pipe.class_base_root[moving.ident].series
    sig = root - PuiseuxSeries.constant(n, d, Scalar.from_rat(n, center), root.order)
    w1c = w1.compose(sig)
    w2c = w2.compose(sig)
    bser = pipe.transformed_form_series()
    x = CPoly.const(bser.coeff(0).constant_cyc())
    y = bser.coeff(1).div_scalar(sig.leading().constant_cyc())
    out = []
    for g in range(count):
        c1 = w1c.coeff(g) if w1c.val <= g < w1c.order else CPoly.zero(n)
        c2 = w2c.coeff(g) if w2c.val <= g < w2c.order else CPoly.zero(n)
        out.append(x * c1 + y * c2)
    return out


def _case_q(pipe: HeckePipeline) -> RatFun:
    loc = pipe.case.local
    if loc["type"] == "frobenius":
        return RatFun(parse_poly(loc["q_num"]), parse_poly(loc["q_den"]))
    # hypergeometric case: build the normal-form coefficient from the signature
    from shimhecke.ratfun import INF, q_from_signature
    pts = [(a if a != "inf" else INF, e) for e, a in pipe.case.signature]
    return q_from_signature([(a, e) for a, e in pts])
