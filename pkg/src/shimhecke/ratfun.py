"""Exact univariate polynomials and rational functions over Q, bivariate
polynomials, Schwarzian/automorphic derivatives, resultants, and the small
linear solvers used to pin differential-equation coefficients.
"""
from __future__ import annotations

import re

from gmpy2 import mpq, mpz

from .scalars import Cyclo, Scalar, print_rat


class Poly:
    """Univariate polynomial over Q, ascending coefficients, no trailing zeros."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        coeffs = [mpq(c) for c in coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        self.coeffs = tuple(coeffs)

    @staticmethod
    def const(c) -> Poly:
        return Poly([mpq(c)])

    @staticmethod
    def x() -> Poly:
        return Poly([0, 1])

    def is_zero(self) -> bool:
        return not self.coeffs

    def degree(self) -> int:
        # degree(0) = -1 sentinel
        return len(self.coeffs) - 1

    def __add__(self, other: Poly) -> Poly:
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Poly(out)

    def __sub__(self, other: Poly) -> Poly:
        return self + (-other)

    def __neg__(self) -> Poly:
        return Poly([-c for c in self.coeffs])

    def __mul__(self, other: Poly) -> Poly:
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly()
        out = [mpq(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return Poly(out)

    def scale(self, q) -> Poly:
        q = mpq(q)
        return Poly([c * q for c in self.coeffs])

    def pow(self, k: int) -> Poly:
        out = Poly.const(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    def divmod(self, other: Poly) -> tuple[Poly, Poly]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        a = list(self.coeffs)
        b = other.coeffs
        db = len(b) - 1
        if len(a) <= db:
            return Poly(), self
        q = [mpq(0)] * (len(a) - db)
        for i in range(len(a) - db - 1, -1, -1):
            c = a[i + db] / b[db]
            q[i] = c
            if c:
                for j in range(db + 1):
                    a[i + j] -= c * b[j]
        return Poly(q), Poly(a)

    def __mod__(self, other: Poly) -> Poly:
        return self.divmod(other)[1]

    def exact_div(self, other: Poly) -> Poly:
        q, r = self.divmod(other)
        if not r.is_zero():
            raise ValueError("non-exact polynomial division")
        return q

    def gcd(self, other: Poly) -> Poly:
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        if a.is_zero():
            return a
        return a.scale(1 / a.coeffs[-1])  # monic

    def derivative(self) -> Poly:
        return Poly([c * i for i, c in enumerate(self.coeffs)][1:])

    def eval(self, x):
        x = mpq(x)
        acc = mpq(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_scalar(self, x: Scalar) -> Scalar:
        n = x.cyc.n
        acc = Scalar.zero(n)
        for c in reversed(self.coeffs):
            acc = acc * x + Scalar.from_rat(n, c)
        return acc

    def compose(self, other: Poly) -> Poly:
        acc = Poly()
        for c in reversed(self.coeffs):
            acc = acc * other + Poly.const(c)
        return acc

    def shift(self, a) -> Poly:
        """p(t + a)."""
        return self.compose(Poly([mpq(a), 1]))

    def content_primitive(self) -> tuple[mpq, Poly]:
        """Write p = content * primitive with integer primitive, positive lead."""
        if self.is_zero():
            return mpq(0), self
        den = mpz(1)
        for c in self.coeffs:
            den = den * c.denominator // mpz(__import__("math").gcd(int(den), int(c.denominator)))
        ints = [mpz(c.numerator) * (den // c.denominator) for c in self.coeffs]
        g = mpz(0)
        for v in ints:
            g = mpz(__import__("math").gcd(int(g), int(v)))
        if ints[-1] < 0:
            g = -g
        return mpq(g, den), Poly([mpq(v, g) for v in ints])

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Poly({print_poly(self)!r})"


def print_poly(p: Poly, var: str = "t") -> str:
    if p.is_zero():
        return "0"
    parts = []
    for i in range(p.degree(), -1, -1):
        c = p.coeffs[i]
        if c == 0:
            continue
        mag = print_rat(abs(c))
        if i == 0:
            term = mag
        else:
            tv = var if i == 1 else f"{var}^{i}"
            term = tv if abs(c) == 1 else f"{mag}*{tv}"
        if not parts:
            parts.append(term if c > 0 else f"-{term}")
        else:
            parts.append(f"+ {term}" if c > 0 else f"- {term}")
    return " ".join(parts)


_TERM_RE = re.compile(r"^\s*(?P<coef>[+-]?\s*(?:\d+(?:/\d+)?)?)\s*(?:\*?\s*(?P<var>[a-zA-Z]\w*)(?:\^(?P<exp>\d+))?)?\s*$")


def parse_poly(s: str, var: str = "t") -> Poly:
    s = s.strip()
    if s in ("0", ""):
        return Poly()
    s = s.replace("-", "+-")
    coeffs: dict[int, mpq] = {}
    for raw in s.split("+"):
        raw = raw.strip()
        if not raw:
            continue
        m = _TERM_RE.match(raw)
        if not m or (m.group("var") not in (None, var)):
            raise ValueError(f"cannot parse polynomial term {raw!r}")
        coef = m.group("coef")
        if coef is None or coef.strip() in ("", "-", "+"):
            c = mpq(-1) if (coef or "").strip() == "-" else mpq(1)
        else:
            c = mpq(coef.replace(" ", ""))
        if m.group("var") is None:
            e = 0
        else:
            e = int(m.group("exp") or 1)
        coeffs[e] = coeffs.get(e, mpq(0)) + c
    out = [mpq(0)] * (max(coeffs) + 1)
    for e, c in coeffs.items():
        out[e] = c
    return Poly(out)


class RatFun:
    """Rational function num/den over Q, stored coprime and content-normalized
    (integer primitive denominator with positive leading coefficient)."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly = Poly([1])):
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            self.num, self.den = Poly(), Poly([1])
            return
        g = num.gcd(den)
        if g.degree() > 0:
            num = num.exact_div(g)
            den = den.exact_div(g)
        c, den = den.content_primitive()
        self.num = num.scale(1 / c)
        self.den = den

    @staticmethod
    def const(q) -> RatFun:
        return RatFun(Poly.const(q))

    @staticmethod
    def t() -> RatFun:
        return RatFun(Poly.x())

    @staticmethod
    def from_pair(num, den) -> RatFun:
        return RatFun(Poly(num), Poly(den))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.degree() <= 0 and self.den.degree() <= 0

    def __add__(self, other: RatFun) -> RatFun:
        return RatFun(self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other: RatFun) -> RatFun:
        return RatFun(self.num * other.den - other.num * self.den, self.den * other.den)

    def __neg__(self) -> RatFun:
        return RatFun(-self.num, self.den)

    def __mul__(self, other: RatFun) -> RatFun:
        return RatFun(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: RatFun) -> RatFun:
        if other.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RatFun(self.num * other.den, self.den * other.num)

    def scale(self, q) -> RatFun:
        return RatFun(self.num.scale(q), self.den)

    def pow(self, k: int) -> RatFun:
        if k < 0:
            return RatFun(self.den.pow(-k), self.num.pow(-k))
        return RatFun(self.num.pow(k), self.den.pow(k))

    def derivative(self) -> RatFun:
        return RatFun(self.num.derivative() * self.den - self.num * self.den.derivative(),
                      self.den * self.den)

    def eval(self, x):
        x = mpq(x)
        d = self.den.eval(x)
        if d == 0:
            raise ZeroDivisionError(f"pole at {print_rat(x)}")
        return self.num.eval(x) / d

    def eval_scalar(self, x: Scalar) -> Scalar:
        return self.num.eval_scalar(x) / self.den.eval_scalar(x)

    def compose(self, other: RatFun) -> RatFun:
        """self(other(t)), exact."""
        n = self.num.degree()
        d = self.den.degree()
        m = max(n, d)
        num = Poly()
        den = Poly()
        on_pow = [Poly.const(1)]
        for _ in range(m):
            on_pow.append(on_pow[-1] * other.num)
        od_pow = [Poly.const(1)]
        for _ in range(m):
            od_pow.append(od_pow[-1] * other.den)
        for i, c in enumerate(self.num.coeffs):
            if c:
                num = num + (on_pow[i] * od_pow[m - i]).scale(c)
        for i, c in enumerate(self.den.coeffs):
            if c:
                den = den + (on_pow[i] * od_pow[m - i]).scale(c)
        return RatFun(num, den)

    def __eq__(self, other) -> bool:
        return (isinstance(other, RatFun) and self.num == other.num and self.den == other.den)

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"RatFun({print_ratfun(self)!r})"


def print_ratfun(f: RatFun, var: str = "t") -> str:
    if f.num.is_zero():
        return "0"
    cn, pn = f.num.content_primitive()
    num = pn.scale(cn.numerator)
    den = f.den.scale(cn.denominator)
    return f"({print_poly(num, var)}) / ({print_poly(den, var)})"


def parse_ratfun(s: str, var: str = "t") -> RatFun:
    s = s.strip()
    if "/" in s:
        # split on the top-level slash between the two parenthesized parts
        depth = 0
        for i, ch in enumerate(s):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif ch == "/" and depth == 0:
                num, den = s[:i], s[i + 1:]
                break
        else:
            raise ValueError(f"cannot parse rational function {s!r}")
    else:
        num, den = s, "1"
    num = num.strip()
    den = den.strip()
    if num.startswith("(") and num.endswith(")"):
        num = num[1:-1]
    if den.startswith("(") and den.endswith(")"):
        den = den[1:-1]
    return RatFun(parse_poly(num, var), parse_poly(den, var))


# ---------------------------------------------------------------------------
# automorphic derivative


def schwarzian(f: RatFun) -> RatFun:
    """{f, z} = f'''/f' - (3/2)(f''/f')^2."""
    f1 = f.derivative()
    if f1.is_zero():
        raise ValueError("Schwarzian of a constant function")
    f2 = f1.derivative()
    f3 = f2.derivative()
    r = f2 / f1
    return f3 / f1 - (r * r).scale(mpq(3, 2))


def automorphic_derivative(f: RatFun) -> RatFun:
    """D(f, z) = -{f, z} / (2 f'(z)^2)."""
    f1 = f.derivative()
    if f1.is_zero():
        raise ValueError("automorphic derivative of a constant function")
    return -schwarzian(f) / (f1 * f1).scale(2)


def q_from_theta_form(r1: RatFun, r0: RatFun) -> RatFun:
    """Normal-form coefficient Q(t) from theta-form coefficients r1, r0 of
    theta^2 F + r1(t) theta F + r0(t) F = 0, theta = t d/dt:

        Q = (1 + 4 r0 - 2 t dr1/dt - r1^2) / (4 t^2).
    """
    t = RatFun.t()
    one = RatFun.const(1)
    return (one + r0.scale(4) - (t * r1.derivative()).scale(2) - r1 * r1) / (t * t).scale(4)


# ---------------------------------------------------------------------------
# Q(t) from a genus-zero signature (double poles at elliptic values)


INF = None  # marker for the point at infinity in signature lists


class SignatureError(ValueError):
    pass


def q_from_signature(points, residues=None):
    """Build Q(t) = sum (1-1/e^2)/4/(t-a)^2 + sum B/(t-a) for elliptic data
    ``points`` = [(a, e), ...] with ``a`` rational or INF.

    With r = 3 points the residues are forced and the unique Q is returned.
    With r > 3 the family is underdetermined; pass ``residues`` as a dict
    {index: value} fixing enough B_j, or receive (Q_const, basis) describing
    the affine family.
    """
    finite = [(mpq(a), int(e)) for a, e in points if a is not INF]
    infs = [e for a, e in points if a is INF]
    if len(points) < 3:
        raise SignatureError("need at least 3 elliptic points")
    if len(infs) > 1:
        raise SignatureError("at most one elliptic point at infinity")
    vals = [a for a, _ in finite]
    if len(set(vals)) != len(vals):
        raise SignatureError("duplicate elliptic point values")

    m = len(finite)
    # double-pole part
    qdbl = RatFun.const(0)
    for a, e in finite:
        lin = RatFun.from_pair([-a, 1], [1])
        qdbl = qdbl + RatFun.const(mpq(e * e - 1, 4 * e * e)) / (lin * lin)

    # linear constraints on the residues B_j from the behaviour at infinity
    rows: list[list[mpq]] = []
    rhs: list[mpq] = []
    if not infs:
        rows.append([mpq(1)] * m)
        rhs.append(mpq(0))
        rows.append([a for a, _ in finite])
        rhs.append(-sum(mpq(1 - mpq(1, e * e), 4) for _, e in finite))
        rows.append([a * a for a, _ in finite])
        rhs.append(-sum(a * mpq(1 - mpq(1, e * e), 2) for a, e in finite))
    else:
        e_inf = infs[0]
        rows.append([mpq(1)] * m)
        rhs.append(mpq(0))
        rows.append([a for a, _ in finite])
        rhs.append(mpq(1 - mpq(1, e_inf * e_inf), 4)
                   - sum(mpq(1 - mpq(1, e * e), 4) for _, e in finite))
    if residues:
        for idx, val in residues.items():
            row = [mpq(0)] * m
            row[idx] = mpq(1)
            rows.append(row)
            rhs.append(mpq(val))

    sol, kernel = solve_affine(rows, rhs)
    if sol is None:
        raise SignatureError("inconsistent residue constraints")

    def q_with(bvals) -> RatFun:
        q = qdbl
        for (a, _), b in zip(finite, bvals):
            if b:
                q = q + RatFun.from_pair([b], [-a, 1])
        return q

    if not kernel:
        return q_with(sol)
    family = [q_with(sol)] + [q_with(k) - RatFun.const(0) for k in kernel]
    # affine family: family[0] + span of homogeneous members (no double parts)
    hom = []
    for k in kernel:
        q = RatFun.const(0)
        for (a, _), b in zip(finite, k):
            if b:
                q = q + RatFun.from_pair([b], [-a, 1])
        hom.append(q)
    return family[0], hom


def solve_affine(rows, rhs):
    """Exact Gaussian elimination.  Returns (particular solution, kernel basis)
    or (None, None) when inconsistent."""
    m = len(rows[0]) if rows else 0
    aug = [list(map(mpq, r)) + [mpq(b)] for r, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for c in range(m):
        pr = next((i for i in range(r, len(aug)) if aug[i][c] != 0), None)
        if pr is None:
            continue
        aug[r], aug[pr] = aug[pr], aug[r]
        pv = aug[r][c]
        aug[r] = [x / pv for x in aug[r]]
        for i in range(len(aug)):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
        if r == len(aug):
            break
    for i in range(r, len(aug)):
        if aug[i][m] != 0:
            return None, None
    sol = [mpq(0)] * m
    for i, c in enumerate(pivots):
        sol[c] = aug[i][m]
    free = [c for c in range(m) if c not in pivots]
    kernel = []
    for fc in free:
        vec = [mpq(0)] * m
        vec[fc] = mpq(1)
        for i, c in enumerate(pivots):
            vec[c] = -aug[i][fc]
        kernel.append(vec)
    return sol, kernel


def double_pole_coefficient(q: RatFun, a: Scalar) -> Scalar:
    """Value of (t-a)^2 Q(t) at t = a, for a double pole at the scalar a."""
    n = a.cyc.n
    den = [Scalar.from_rat(n, c) for c in q.den.coeffs]
    dt1 = _scalar_deflate(den, a)
    dt2 = _scalar_deflate(dt1, a)
    return _scalar_eval(q.num.coeffs, a, n) / _scalar_eval_list(dt2, a, n)


def residue_at_double_pole(q: RatFun, a: Scalar) -> Scalar:
    """Residue of Q at a double pole t = a (coefficient of 1/(t-a))."""
    n = a.cyc.n
    den = [Scalar.from_rat(n, c) for c in q.den.coeffs]
    dt = _scalar_deflate(_scalar_deflate(den, a), a)  # den / (t-a)^2
    num = [Scalar.from_rat(n, c) for c in q.num.coeffs]
    np_ = _scalar_poly_derivative(num)
    dp_ = _scalar_poly_derivative(dt)
    na = _scalar_eval_list(num, a, n)
    da = _scalar_eval_list(dt, a, n)
    npa = _scalar_eval_list(np_, a, n)
    dpa = _scalar_eval_list(dp_, a, n)
    return (npa * da - na * dpa) / (da * da)


def _scalar_deflate(coeffs: list[Scalar], a: Scalar) -> list[Scalar]:
    # synthetic division by (t - a); remainder must vanish
    out = [None] * (len(coeffs) - 1)
    acc = coeffs[-1]
    for i in range(len(coeffs) - 2, -1, -1):
        out[i] = acc
        acc = coeffs[i] + acc * a
    if not acc.is_zero():
        raise ValueError("point is not a root of the denominator")
    return out


def _scalar_poly_derivative(coeffs: list[Scalar]) -> list[Scalar]:
    return [c.scale(i) for i, c in enumerate(coeffs)][1:]


def _scalar_eval(coeffs, a: Scalar, n: int) -> Scalar:
    acc = Scalar.zero(n)
    for c in reversed(coeffs):
        acc = acc * a + Scalar.from_rat(n, c)
    return acc


def _scalar_eval_list(coeffs: list[Scalar], a: Scalar, n: int) -> Scalar:
    acc = Scalar.zero(n)
    for c in reversed(coeffs):
        acc = acc * a + c
    return acc


def inf_expansion(f: RatFun, order: int) -> list:
    """Coefficients of u^-1, ..., u^-order in the expansion of f at infinity.

    Requires deg num < deg den (f vanishing at infinity)."""
    dn, dd = f.num.degree(), f.den.degree()
    if not f.num.is_zero() and dn >= dd:
        raise ValueError("function does not vanish at infinity")
    # substitute u = 1/v: f = v^(dd-dn) * rev(num)/rev(den)
    rn = list(reversed(f.num.coeffs)) or [mpq(0)]
    rd = list(reversed(f.den.coeffs))
    shift = dd - dn if not f.num.is_zero() else order + 1
    # series of rev(num)/rev(den) around v = 0
    inv = [mpq(0)] * (order + 1)
    if not f.num.is_zero():
        lead = rd[0]
        ser = [mpq(0)] * (order + 1)
        for k in range(order + 1):
            acc = rn[k] if k < len(rn) else mpq(0)
            for m in range(1, k + 1):
                if m < len(rd):
                    acc -= rd[m] * ser[k - m]
            ser[k] = acc / lead
        for k in range(order + 1):
            if 0 <= k - shift <= order:
                pass
        for k in range(order + 1 - shift):
            inv[k + shift] = ser[k]
    return inv[1:order + 1]


class SchwarzFamily:
    """Affine family of candidate Q(u) built from elliptic data with rational
    points, conjugate quadratic point pairs, and an optional point at infinity.

    Residue unknowns are eliminated against the behaviour at infinity (and an
    optional Moebius involution symmetry), leaving the designated free names.
    """

    def __init__(self, rat_points=(), quad_points=(), inf_order: int | None = None,
                 symmetry: RatFun | None = None, free: list[str] | None = None):
        self.rat_points = [(mpq(a), int(e), name) for a, e, name in rat_points]
        self.quad_points = [(Poly(q), int(e), names) for q, e, names in quad_points]
        self.inf_order = inf_order

        dbl = RatFun.const(0)
        for a, e, _ in self.rat_points:
            lin = RatFun.from_pair([-a, 1], [1])
            dbl = dbl + RatFun.const(mpq(e * e - 1, 4 * e * e)) / (lin * lin)
        for q, e, _ in self.quad_points:
            qf = RatFun(q)
            qp = q.derivative()
            num = RatFun(qp * qp - q * q.derivative().derivative())
            dbl = dbl + RatFun.const(mpq(e * e - 1, 4 * e * e)) * num / (qf * qf)
        self.double_part = dbl

        names: list[str] = [name for _, _, name in self.rat_points]
        gens: list[RatFun] = [RatFun.from_pair([1], [-a, 1]) for a, _, _ in self.rat_points]
        for q, _, (na, nb) in self.quad_points:
            names += [na, nb]
            gens.append(RatFun(Poly([1]), q))
            gens.append(RatFun(Poly([0, 1]), q))
        self.names = names
        self.gens = gens

        rows: list[list[mpq]] = []
        rhs: list[mpq] = []
        gen_inf = [inf_expansion(g, 2) for g in gens]
        dbl_inf = inf_expansion(dbl, 2)
        if inf_order is None:
            # Q = O(u^-4): u^-1, u^-2, u^-3 coefficients all vanish
            gen_inf = [inf_expansion(g, 3) for g in gens]
            dbl_inf = inf_expansion(dbl, 3)
            for k in range(3):
                rows.append([gi[k] for gi in gen_inf])
                rhs.append(-dbl_inf[k])
        else:
            e = inf_order
            rows.append([gi[0] for gi in gen_inf])
            rhs.append(-dbl_inf[0])
            rows.append([gi[1] for gi in gen_inf])
            rhs.append(mpq(e * e - 1, 4 * e * e) - dbl_inf[1])

        if symmetry is not None:
            # weight-4 invariance Q(w(u)) w'(u)^2 = Q(u); the double part maps
            # to itself when the involution permutes the elliptic points
            wp = symmetry.derivative()
            wp2 = wp * wp
            sym_rows = []
            for g in gens:
                diff = g.compose(symmetry) * wp2 - g
                sym_rows.append(diff)
            d_diff = self.double_part.compose(symmetry) * wp2 - self.double_part
            if not d_diff.is_zero():
                raise SignatureError("symmetry does not preserve the elliptic data")
            sample = mpq(1, 13)
            got = 0
            while got < len(names) + 2:
                try:
                    rows.append([d.eval(sample) for d in sym_rows])
                    rhs.append(mpq(0))
                except ZeroDivisionError:
                    pass
                else:
                    got += 1
                sample += mpq(2, 7)

        free = free or []
        self.free = free
        idx = {n: i for i, n in enumerate(names)}
        # solve for the non-free unknowns at frees = 0 and frees = e_i
        def solved_at(assign: dict[str, mpq]):
            rr = list(rows)
            bb = list(rhs)
            for n, v in assign.items():
                row = [mpq(0)] * len(names)
                row[idx[n]] = mpq(1)
                rr.append(row)
                bb.append(mpq(v))
            sol, kernel = solve_affine(rr, bb)
            if sol is None:
                raise SignatureError("inconsistent residue constraints")
            if kernel:
                raise SignatureError("underdetermined residue constraints; add free names")
            return sol

        base_vals = solved_at({n: mpq(0) for n in free})
        self.base = self._assemble(base_vals)
        self.directions: list[RatFun] = []
        for n in free:
            vals = solved_at({m: mpq(1 if m == n else 0) for m in free})
            self.directions.append(self._assemble(vals) - self.base)

    def _assemble(self, vals) -> RatFun:
        q = self.double_part
        for g, v in zip(self.gens, vals):
            if v:
                q = q + g.scale(v)
        return q

    def residue_values(self, assign: dict[str, mpq]) -> dict[str, mpq]:
        """All residue unknowns for a given assignment of the free names."""
        q = self.at(assign)
        out = {}
        for a, _, name in self.rat_points:
            # residue at the simple part: coefficient of 1/(u-a)
            out[name] = _residue_of(q - self.double_part, a)
        return out

    def at(self, assign: dict[str, mpq]) -> RatFun:
        q = self.base
        for n, d in zip(self.free, self.directions):
            v = mpq(assign.get(n, 0))
            if v:
                q = q + d.scale(v)
        return q

    def family(self) -> AffineRatFam:
        return AffineRatFam(self.base, list(zip(self.free, self.directions)))


def _residue_of(f: RatFun, a) -> mpq:
    """Residue of f at a simple pole t = a (rational a)."""
    a = mpq(a)
    num = f.num
    den = f.den
    # den = (t-a) * den1
    den1, rem = den.divmod(Poly([-a, 1]))
    if not rem.is_zero():
        return mpq(0)
    d1 = den1.eval(a)
    if d1 == 0:
        raise ValueError("pole is not simple")
    return num.eval(a) / d1


# ---------------------------------------------------------------------------
# covering-constant solver: D(t,tau) = D(R(u),u) + D(u,tau)/(dR/du)^2


class AffineRatFam:
    """Affine family base + sum x_i * gens[i] of rational functions."""

    def __init__(self, base: RatFun, gens: list[tuple[str, RatFun]]):
        self.base = base
        self.gens = gens

    def names(self) -> list[str]:
        return [name for name, _ in self.gens]

    def at(self, values: dict[str, mpq]) -> RatFun:
        out = self.base
        for name, gen in self.gens:
            v = mpq(values.get(name, 0))
            if v:
                out = out + gen.scale(v)
        return out


def solve_covering_constants(R: RatFun, fam_t: AffineRatFam, fam_u: AffineRatFam):
    """Solve D(R(u), u) + Q_u(u)/(R'(u))^2 = Q_t(R(u)) for the unknown
    residue constants, where Q_t and Q_u range over affine families.

    Returns the assignment dict; raises if the system is inconsistent or
    underdetermined.
    """
    names = fam_t.names() + fam_u.names()
    dR = R.derivative()
    dr2 = dR * dR
    d_base = automorphic_derivative(R)

    def mismatch(values: dict[str, mpq]) -> RatFun:
        qt = fam_t.at(values)
        qu = fam_u.at(values)
        return d_base + qu / dr2 - qt.compose(R)

    base_mis = mismatch({})
    gens_mis = []
    for name in names:
        gens_mis.append(mismatch({name: mpq(1)}) - base_mis)

    # The mismatch is affine-linear in the unknowns: sample at rational points
    # clear of all poles to build the linear system, then verify identically.
    rows, rhs = [], []
    sample = mpq(1, 7)
    found = 0
    while found < len(names) + 4:
        try:
            row = [g.eval(sample) for g in gens_mis]
            b = -base_mis.eval(sample)
        except ZeroDivisionError:
            sample += mpq(1, 11)
            continue
        rows.append(row)
        rhs.append(b)
        found += 1
        sample += mpq(3, 5)
    sol, kernel = solve_affine(rows, rhs)
    if sol is None:
        raise ValueError("inconsistent covering-constant system")
    if kernel:
        raise ValueError("covering-constant system has a nontrivial solution space")
    values = {name: v for name, v in zip(names, sol)}
    if not mismatch(values).is_zero():
        raise ValueError("covering-constant solution fails identity check")
    return values


# ---------------------------------------------------------------------------
# bivariate polynomials and Sylvester resultants


class BivarPoly:
    """Finitely supported polynomial in (s, t) over Q, as {(i, j): coeff}."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict | None = None):
        clean = {}
        for k, v in (coeffs or {}).items():
            v = mpq(v)
            if v:
                clean[(int(k[0]), int(k[1]))] = v
        self.coeffs = clean

    @staticmethod
    def const(q) -> BivarPoly:
        return BivarPoly({(0, 0): mpq(q)})

    @staticmethod
    def var_s() -> BivarPoly:
        return BivarPoly({(1, 0): mpq(1)})

    @staticmethod
    def var_t() -> BivarPoly:
        return BivarPoly({(0, 1): mpq(1)})

    def is_zero(self) -> bool:
        return not self.coeffs

    def deg_s(self) -> int:
        return max((i for i, _ in self.coeffs), default=-1)

    def deg_t(self) -> int:
        return max((j for _, j in self.coeffs), default=-1)

    def __add__(self, other: BivarPoly) -> BivarPoly:
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, mpq(0)) + v
        return BivarPoly(out)

    def __sub__(self, other: BivarPoly) -> BivarPoly:
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, mpq(0)) - v
        return BivarPoly(out)

    def __neg__(self) -> BivarPoly:
        return BivarPoly({k: -v for k, v in self.coeffs.items()})

    def __mul__(self, other: BivarPoly) -> BivarPoly:
        out: dict = {}
        for (i1, j1), v1 in self.coeffs.items():
            for (i2, j2), v2 in other.coeffs.items():
                k = (i1 + i2, j1 + j2)
                out[k] = out.get(k, mpq(0)) + v1 * v2
        return BivarPoly(out)

    def scale(self, q) -> BivarPoly:
        q = mpq(q)
        return BivarPoly({k: v * q for k, v in self.coeffs.items()})

    def s_coefficient(self, i: int) -> Poly:
        """Coefficient of s^i as a Poly in t."""
        out = [mpq(0)] * (self.deg_t() + 1)
        for (a, b), v in self.coeffs.items():
            if a == i:
                out[b] = v
        return Poly(out)

    @staticmethod
    def from_s_coefficients(polys: list[Poly]) -> BivarPoly:
        out = {}
        for i, p in enumerate(polys):
            for j, c in enumerate(p.coeffs):
                if c:
                    out[(i, j)] = c
        return BivarPoly(out)

    def eval(self, s, t):
        s, t = mpq(s), mpq(t)
        return sum(v * s ** i * t ** j for (i, j), v in self.coeffs.items())

    def subs_ratfun(self, fs: RatFun, ft: RatFun) -> RatFun:
        """Exact substitution s -> fs(u), t -> ft(u)."""
        ds, dt = self.deg_s(), self.deg_t()
        fsn = [Poly.const(1)]
        for _ in range(ds):
            fsn.append(fsn[-1] * fs.num)
        fsd = [Poly.const(1)]
        for _ in range(ds):
            fsd.append(fsd[-1] * fs.den)
        ftn = [Poly.const(1)]
        for _ in range(dt):
            ftn.append(ftn[-1] * ft.num)
        ftd = [Poly.const(1)]
        for _ in range(dt):
            ftd.append(ftd[-1] * ft.den)
        num = Poly()
        for (i, j), v in self.coeffs.items():
            num = num + (fsn[i] * fsd[ds - i] * ftn[j] * ftd[dt - j]).scale(v)
        den = fsd[ds] * ftd[dt]
        return RatFun(num, den)

    def content_primitive(self) -> tuple[mpq, BivarPoly]:
        if self.is_zero():
            return mpq(0), self
        import math as _m
        den = mpz(1)
        for v in self.coeffs.values():
            den = den * v.denominator // mpz(_m.gcd(int(den), int(v.denominator)))
        g = mpz(0)
        for v in self.coeffs.values():
            g = mpz(_m.gcd(int(g), int(v.numerator * (den // v.denominator))))
        return mpq(g, den), BivarPoly({k: v * den / g for k, v in self.coeffs.items()})

    def exact_div(self, other: BivarPoly) -> BivarPoly:
        """Exact multivariate division (raises if not divisible)."""
        if other.is_zero():
            raise ZeroDivisionError
        rem = dict(self.coeffs)
        lead = max(other.coeffs)  # lex on (i, j)
        lv = other.coeffs[lead]
        out: dict = {}
        while rem:
            mono = max(rem)
            i, j = mono[0] - lead[0], mono[1] - lead[1]
            if i < 0 or j < 0:
                raise ValueError("non-exact bivariate division")
            c = rem[mono] / lv
            out[(i, j)] = c
            for (a, b), v in other.coeffs.items():
                k = (a + i, b + j)
                nv = rem.get(k, mpq(0)) - c * v
                if nv:
                    rem[k] = nv
                else:
                    rem.pop(k, None)
        return BivarPoly(out)

    def __eq__(self, other) -> bool:
        return isinstance(other, BivarPoly) and self.coeffs == other.coeffs

    def __repr__(self):
        n = len(self.coeffs)
        return f"BivarPoly(<{n} terms, deg_s={self.deg_s()}, deg_t={self.deg_t()}>)"


def sylvester_resultant(a_coeffs: list[BivarPoly], b_coeffs: list[BivarPoly]) -> BivarPoly:
    """Resultant in the eliminated variable u of A = sum a_i u^i and
    B = sum b_i u^i, with BivarPoly(s, t) coefficients.  Fraction-free
    Bareiss elimination."""
    while a_coeffs and a_coeffs[-1].is_zero():
        a_coeffs = a_coeffs[:-1]
    while b_coeffs and b_coeffs[-1].is_zero():
        b_coeffs = b_coeffs[:-1]
    da, db = len(a_coeffs) - 1, len(b_coeffs) - 1
    if da < 1 or db < 1:
        raise ValueError("both inputs must have positive degree in u")
    n = da + db
    zero = BivarPoly()
    mat = []
    for r in range(db):
        row = [zero] * n
        for i, c in enumerate(reversed(a_coeffs)):
            row[r + i] = c
        mat.append(row)
    for r in range(da):
        row = [zero] * n
        for i, c in enumerate(reversed(b_coeffs)):
            row[r + i] = c
        mat.append(row)
    sign = 1
    prev = BivarPoly.const(1)
    for k in range(n - 1):
        if mat[k][k].is_zero():
            pr = next((i for i in range(k + 1, n) if not mat[i][k].is_zero()), None)
            if pr is None:
                return BivarPoly()
            mat[k], mat[pr] = mat[pr], mat[k]
            sign = -sign
        piv = mat[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = mat[i][j] * piv - mat[i][k] * mat[k][j]
                mat[i][j] = num.exact_div(prev)
            mat[i][k] = zero
        prev = piv
    det = mat[n - 1][n - 1]
    return det if sign > 0 else -det


def resultant(a: BivarPoly, b: BivarPoly) -> Poly:
    """Sylvester resultant of two bivariate polynomials with respect to the
    first variable; result is a Poly in the second variable, content-reduced."""
    if a.is_zero() or b.is_zero():
        raise ValueError("resultant of zero polynomial")
    a_coeffs = [BivarPoly({(0, j): c for j, c in enumerate(a.s_coefficient(i).coeffs)})
                for i in range(a.deg_s() + 1)]
    b_coeffs = [BivarPoly({(0, j): c for j, c in enumerate(b.s_coefficient(i).coeffs)})
                for i in range(b.deg_s() + 1)]
    res = sylvester_resultant(a_coeffs, b_coeffs)
    out = [mpq(0)] * (res.deg_t() + 1)
    for (i, j), v in res.coeffs.items():
        assert i == 0
        out[j] = v
    p = Poly(out)
    c, prim = p.content_primitive()
    # reduce content but keep the determinant's sign
    return prim if c > 0 else -prim
