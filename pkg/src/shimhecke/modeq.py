"""Modular equations Phi(s,t) = 0 between a Hauptmodul and its transforms:
derivation by resultant elimination from a parametrization (R, w), and
Puiseux-series roots by Newton polygon plus Hensel lifting.
"""
from __future__ import annotations

from gmpy2 import mpq

from .ratfun import BivarPoly, Poly, RatFun, sylvester_resultant
from .scalars import CPoly, Cyclo, Scalar
from .series import PuiseuxSeries


class DegenerateElimination(ValueError):
    pass


class NonsimpleInitial(ValueError):
    pass


class ModularEquation:
    """Primitive bivariate polynomial Phi(s, t) with provenance record.

    Sign normalization: the lowest-t coefficient of the highest s-power is
    positive."""

    def __init__(self, phi: BivarPoly, provenance: str, discarded: list | None = None):
        c, prim = phi.content_primitive()
        if c == 0:
            raise DegenerateElimination("zero polynomial")
        top = prim.deg_s()
        row = prim.s_coefficient(top)
        lead = next(v for v in row.coeffs if v)
        if lead < 0:
            prim = -prim
        self.phi = prim
        self.provenance = provenance
        self.discarded = discarded or []

    def deg_s(self) -> int:
        return self.phi.deg_s()

    def deg_t(self) -> int:
        return self.phi.deg_t()

    def s_coefficient(self, i: int) -> Poly:
        return self.phi.s_coefficient(i)

    def __eq__(self, other) -> bool:
        return isinstance(other, ModularEquation) and self.phi == other.phi

    def scale_to(self, other: BivarPoly):
        """Rational lambda with self.phi * lambda == other, or None."""
        for key, v in self.phi.coeffs.items():
            ov = other.coeffs.get(key)
            if ov is None:
                return None
            lam = ov / v
            break
        cand = self.phi.scale(lam)
        return lam if cand == other else None

    def serialize(self) -> str:
        lines = ["# modular equation: monomial triples (s-degree, t-degree, coefficient)"]
        for (i, j) in sorted(self.phi.coeffs):
            lines.append(f"{i} {j} {self.phi.coeffs[(i, j)]}")
        return "\n".join(lines) + "\n"

    @staticmethod
    def deserialize(text: str, provenance: str = "explicit fixture") -> ModularEquation:
        coeffs = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            i, j, c = line.split()
            coeffs[(int(i), int(j))] = mpq(c)
        return ModularEquation(BivarPoly(coeffs), provenance)


def derive_modular_equation(r: RatFun, w: RatFun) -> ModularEquation:
    """Eliminate u between t*den_R(u) - num_R(u) and s*den_RW(u) - num_RW(u),
    where RW = R o w.  Spurious factors independent of s or of t (base-point
    artifacts) are removed and reported on the result."""
    if r.num.degree() <= 0 and r.den.degree() <= 0:
        raise ValueError("parametrization must be non-constant")
    rw = r.compose(w)
    if rw == r:
        raise DegenerateElimination("R o w = R: the correspondence is trivial")
    du = max(r.num.degree(), r.den.degree())
    dw = max(rw.num.degree(), rw.den.degree())
    a_coeffs = []
    for i in range(du + 1):
        dn = r.num.coeffs[i] if i <= r.num.degree() else mpq(0)
        dd = r.den.coeffs[i] if i <= r.den.degree() else mpq(0)
        a_coeffs.append(BivarPoly({(0, 1): dd, (0, 0): -dn}))
    b_coeffs = []
    for i in range(dw + 1):
        dn = rw.num.coeffs[i] if i <= rw.num.degree() else mpq(0)
        dd = rw.den.coeffs[i] if i <= rw.den.degree() else mpq(0)
        b_coeffs.append(BivarPoly({(1, 0): dd, (0, 0): -dn}))
    res = sylvester_resultant(a_coeffs, b_coeffs)
    if res.is_zero():
        raise DegenerateElimination("resultant vanishes identically; R o w = R?")
    discarded = []
    res, disc_t = _strip_univariate_content(res, in_t=True)
    if disc_t is not None:
        discarded.append(("t-only factor", disc_t))
    res, disc_s = _strip_univariate_content(res, in_t=False)
    if disc_s is not None:
        discarded.append(("s-only factor", disc_s))
    me = ModularEquation(res, provenance=f"resultant of R={r!r}, w={w!r}", discarded=discarded)
    # sanity: the parametrization pair is a zero of phi
    sub = me.phi.subs_ratfun(rw, r)
    if not sub.is_zero():
        raise DegenerateElimination("derived equation fails the parametrization check")
    return me


def _strip_univariate_content(p: BivarPoly, in_t: bool):
    """Divide out the gcd of the s-rows (a factor in Q[t]) or the transpose."""
    if in_t:
        rows = [p.s_coefficient(i) for i in range(p.deg_s() + 1)]
    else:
        flip = BivarPoly({(j, i): v for (i, j), v in p.coeffs.items()})
        rows = [flip.s_coefficient(i) for i in range(flip.deg_s() + 1)]
    g = Poly()
    for r in rows:
        if not r.is_zero():
            g = r if g.is_zero() else g.gcd(r)
        if g.degree() == 0:
            return p, None
    if g.degree() <= 0:
        return p, None
    new_rows = [r.exact_div(g) if not r.is_zero() else r for r in rows]
    if in_t:
        out = BivarPoly.from_s_coefficients(new_rows)
    else:
        out = BivarPoly({(j, i): v for (i, j), v in
                         BivarPoly.from_s_coefficients(new_rows).coeffs.items()})
    return out, g


# ---------------------------------------------------------------------------
# Newton polygon


class PolygonSegment:
    def __init__(self, slope: mpq, length: int, i0: int, v0: int, initial: Poly):
        self.slope = slope      # branch valuation in t
        self.length = length    # number of branches (with multiplicity)
        self.i0 = i0            # s-power at the segment's left end
        self.v0 = v0            # t-order there
        self.initial = initial  # polynomial in c: sum a_(i,v) c^(i - i0)

    def initial_roots_rational(self) -> list[mpq]:
        """Rational roots of the initial equation (degree <= 2 after
        square-free reduction; larger irreducible factors are out of scope)."""
        return rational_roots(self.initial)

    def __repr__(self):
        return f"PolygonSegment(slope={self.slope}, length={self.length})"


def newton_polygon_initials(phi: BivarPoly) -> list[PolygonSegment]:
    """Lower-hull segments of the support {(i, ord_t a_i)} with their initial
    equations, describing the Puiseux branches of phi(s, t) = 0 above t = 0
    (phi must already be centered: phi(s, 0) not identically zero)."""
    pts = []
    for i in range(phi.deg_s() + 1):
        a = phi.s_coefficient(i)
        if a.is_zero():
            continue
        v = next(j for j, c in enumerate(a.coeffs) if c)
        pts.append((i, v))
    if not pts:
        raise ValueError("empty support")
    if all(v > 0 for _, v in pts):
        raise ValueError("phi(s, 0) is identically zero; recenter first")
    segments = []
    # lower convex hull from the smallest i upward
    pts.sort()
    hull = [pts[0]]
    for p in pts[1:]:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # keep only lower-convex turns
            if (y2 - y1) * (p[0] - x2) >= (p[1] - y2) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(p)
    for (i0, v0), (i1, v1) in zip(hull, hull[1:]):
        slope = mpq(v0 - v1, i1 - i0)
        if slope <= 0:
            continue
        coeffs = [mpq(0)] * (i1 - i0 + 1)
        for i in range(i0, i1 + 1):
            a = phi.s_coefficient(i)
            # coefficient of t^(v0 - slope*(i - i0)) if integral and on the hull
            texp = mpq(v0) - slope * (i - i0)
            if texp.denominator == 1 and 0 <= int(texp) <= a.degree():
                coeffs[i - i0] = a.coeffs[int(texp)]
        segments.append(PolygonSegment(slope, i1 - i0, i0, v0, Poly(coeffs)))
    return segments


def _rational_mth_root(q: mpq, m: int) -> list[mpq]:
    """Exact rational solutions of c^m = q."""
    from gmpy2 import iroot, mpz
    if q == 0:
        return [mpq(0)]
    sign = 1
    if q < 0:
        if m % 2 == 0:
            return []
        sign, q = -1, -q
    rn, okn = iroot(mpz(q.numerator), m)
    rd, okd = iroot(mpz(q.denominator), m)
    if not (okn and okd):
        return []
    r = mpq(rn, rd) * sign
    return [r, -r] if (m % 2 == 0) else [r]


def rational_roots(p: Poly) -> list[mpq]:
    """Rational roots of p: binomials exactly, otherwise the square-free part
    must have degree <= 2."""
    support = [i for i, c in enumerate(p.coeffs) if c]
    if len(support) == 2 and support[0] == 0:
        m = support[1]
        roots = _rational_mth_root(-p.coeffs[0] / p.coeffs[m], m)
        return sorted(roots)
    g = p.gcd(p.derivative()) if p.degree() > 1 else Poly.const(1)
    sf = p.exact_div(g) if g.degree() > 0 else p
    roots = []
    if sf.coeffs[0] == 0:
        roots.append(mpq(0))
        sf = Poly(sf.coeffs[1:])
    d = sf.degree()
    if d == 0:
        pass
    elif d == 1:
        roots.append(-sf.coeffs[0] / sf.coeffs[1])
    elif d == 2:
        a, b, c = sf.coeffs[2], sf.coeffs[1], sf.coeffs[0]
        disc = b * b - 4 * a * c
        if disc >= 0:
            from gmpy2 import isqrt, mpz
            num, den = mpz(disc.numerator), mpz(disc.denominator)
            rn, rd = isqrt(num * den), den
            if rn * rn == num * den:
                roots.append((-b + mpq(rn, rd)) / (2 * a))
                if disc != 0:
                    roots.append((-b - mpq(rn, rd)) / (2 * a))
    else:
        raise ValueError("irrational branch initials of degree > 2 are unsupported")
    return sorted(set(roots))


# ---------------------------------------------------------------------------
# Hensel lifting


class PuiseuxRoot:
    """A Puiseux-series solution of phi(series(t), t) = 0 to truncation."""

    def __init__(self, series: PuiseuxSeries, branch_label: int, center, slope: mpq):
        self.series = series
        self.branch_label = branch_label
        self.center = center
        self.slope = slope

    def __repr__(self):
        return f"PuiseuxRoot(label={self.branch_label}, center={self.center}, slope={self.slope})"


def hensel_lift(phi: BivarPoly, center, slope, initial_coeff, order: int,
                ram: int, n: int = 24) -> PuiseuxRoot:
    """Lift the branch s = center + initial_coeff * t^slope + ... of
    phi(s, t) = 0 to a series exact below grade ``order`` (in 1/ram units).

    Newton iteration with precision doubling on y, where s = center + x^m y,
    t = x^ram; requires the initial coefficient to be a simple root of the
    segment equation."""
    center = mpq(center)
    slope = mpq(slope)
    c0 = mpq(initial_coeff)
    m_q = slope * ram
    if m_q.denominator != 1:
        raise ValueError("ram does not accommodate the branch slope")
    m = int(m_q)
    prec = order - m  # y is needed to x^prec (exclusive)
    if prec <= 0:
        raise ValueError("order too small for this branch")

    # G_r(x): coefficient of y^r in phi(center + x^m y, x^ram)
    ds = phi.deg_s()
    binom = [[0] * (ds + 1) for _ in range(ds + 1)]
    for i in range(ds + 1):
        binom[i][0] = 1
        for r in range(1, i + 1):
            binom[i][r] = binom[i - 1][r - 1] + binom[i - 1][r]
    cpow = [mpq(1)]
    for _ in range(ds):
        cpow.append(cpow[-1] * center)
    g_coeffs: list[dict[int, mpq]] = [dict() for _ in range(ds + 1)]
    for i in range(ds + 1):
        a = phi.s_coefficient(i)
        if a.is_zero():
            continue
        for j, cj in enumerate(a.coeffs):
            if not cj:
                continue
            for r in range(i + 1):
                val = cj * binom[i][r] * cpow[i - r]
                if val:
                    e = j * ram + m * r
                    g_coeffs[r][e] = g_coeffs[r].get(e, mpq(0)) + val
    g_coeffs = [{e: v for e, v in d.items() if v} for d in g_coeffs]
    e0 = min((min(d) for d in g_coeffs if d), default=0)
    gx: list[PuiseuxSeries] = []
    span = prec
    for r in range(ds + 1):
        entries = {e - e0: v for e, v in g_coeffs[r].items() if v}
        entries = {e: v for e, v in entries.items() if e < span}
        if not entries:
            gx.append(PuiseuxSeries.zero(n, 1, span))
            continue
        vmin = 0
        rats = [entries.get(g, mpq(0)) for g in range(vmin, span)]
        gx.append(PuiseuxSeries.from_rationals(n, 1, vmin, rats, span))

    def geval(y: PuiseuxSeries, klim: int, derivative: bool = False) -> PuiseuxSeries:
        acc = PuiseuxSeries.zero(n, 1, klim)
        lo = 1 if derivative else 0
        for r in range(ds, lo - 1, -1):
            if not acc.is_zero():
                acc = (acc * y).truncate(klim)
            g = gx[r].scale(r) if derivative else gx[r]
            acc = acc + g.truncate(klim)
        return acc

    # simple-root hypothesis at x = 0
    seg0 = sum(gx[r].coeff(0).constant().to_rat() * c0 ** r for r in range(ds + 1)
               if gx[r].val <= 0 < gx[r].order)
    segp = sum(r * gx[r].coeff(0).constant().to_rat() * c0 ** (r - 1) for r in range(1, ds + 1)
               if gx[r].val <= 0 < gx[r].order)
    if seg0 != 0:
        raise NonsimpleInitial("initial coefficient is not a root of the segment equation")
    if segp == 0:
        raise NonsimpleInitial("multiple root: Hensel hypothesis fails")

    k = 1
    y = PuiseuxSeries.from_rationals(n, 1, 0, [c0], 1)
    while k < prec:
        k = min(2 * k, prec)
        # zero-padding is a Newton guess: the step below restores exactness < k
        y = _newton_pad(y, k, n)
        fy = geval(y, k)
        if fy.is_zero():
            continue
        fpy = geval(y, k, derivative=True)
        y = (y - (fy * fpy.inv()).truncate(k)).truncate(k)
    y = _newton_pad(y, prec, n)
    # reinterpret the x-series (x = t^(1/ram)) on the 1/ram grade grid
    series = PuiseuxSeries(n, ram, y.val + m, list(y.coeffs), y.order + m,
                           y.pref_q, y.pref_rad, _normalized=True)
    if center:
        c = CPoly.const(Scalar.from_rat(n, center))
        cs = PuiseuxSeries(n, ram, 0, [c] + [CPoly.zero(n)] * (series.order - 1),
                           series.order)
        series = series + cs
    return PuiseuxRoot(series.truncate(min(series.order, order)), 0, center, slope)


def _newton_pad(y: PuiseuxSeries, k: int, n: int) -> PuiseuxSeries:
    if y.order >= k:
        return y.truncate(k)
    extra = [CPoly.zero(n)] * (k - y.order)
    return PuiseuxSeries(y.n, y.ram, y.val, list(y.coeffs) + extra, k,
                         y.pref_q, y.pref_rad, _normalized=True)


def phi_eval_series(phi: BivarPoly, s: PuiseuxSeries) -> PuiseuxSeries:
    """phi(s(t), t) as a truncated series (Horner in s); s must have val >= 0."""
    if not s.is_zero() and s.val < 0:
        raise ValueError("series with negative valuation")
    n, ram = s.n, s.ram
    klim = s.order
    acc = PuiseuxSeries.zero(n, ram, klim)
    for i in range(phi.deg_s(), -1, -1):
        if not acc.is_zero():
            acc = (acc * s).truncate(klim)
        a = phi.s_coefficient(i)
        entries = {j * ram: c for j, c in enumerate(a.coeffs) if c and j * ram < klim}
        if entries:
            vmin = min(entries)
            span = [entries.get(g, mpq(0)) for g in range(vmin, klim)]
            acc = acc + PuiseuxSeries.from_rationals(n, ram, vmin, span, klim)
    return acc


def residual_valuation_ok(phi: BivarPoly, root: PuiseuxRoot, order: int) -> bool:
    """Check phi(root(t), t) vanishes to the stated truncation."""
    res = phi_eval_series(phi, root.series.truncate(min(root.series.order, order)))
    return res.is_zero()


def twist_root(root: PuiseuxRoot, omega: Cyclo, label: int) -> PuiseuxRoot:
    """Conjugate branch: coefficients twisted by omega^grade."""
    return PuiseuxRoot(root.series.zeta_twist(omega), label, root.center, root.slope)


def recenter(phi: BivarPoly, center) -> BivarPoly:
    """phi(s + center, t)."""
    center = mpq(center)
    if center == 0:
        return phi
    ds = phi.deg_s()
    rows = [phi.s_coefficient(i) for i in range(ds + 1)]
    binom = [[0] * (ds + 1) for _ in range(ds + 1)]
    for i in range(ds + 1):
        binom[i][0] = 1
        for r in range(1, i + 1):
            binom[i][r] = binom[i - 1][r - 1] + binom[i - 1][r]
    cpow = [mpq(1)]
    for _ in range(ds):
        cpow.append(cpow[-1] * center)
    out_rows = [Poly() for _ in range(ds + 1)]
    for i in range(ds + 1):
        if rows[i].is_zero():
            continue
        for r in range(i + 1):
            out_rows[r] = out_rows[r] + rows[i].scale(binom[i][r] * cpow[i - r])
    return BivarPoly.from_s_coefficients(out_rows)


def rational_branch_data(phi: BivarPoly) -> list[tuple]:
    """All (center, slope, initial coefficient, multiplicity-per-conjugacy)
    tuples for branches above t = 0 with rational data."""
    out = []
    p0 = phi.s_coefficient(0)
    centers = rational_roots(Poly([phi.coeffs.get((i, 0), mpq(0))
                                   for i in range(phi.deg_s() + 1)]))
    for c in centers:
        shifted = recenter(phi, c)
        for seg in newton_polygon_initials(shifted):
            for r in seg.initial_roots_rational():
                out.append((c, seg.slope, r, seg.length))
    return out
