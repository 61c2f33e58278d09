"""Truncated Puiseux series over exact coefficient rings, with hypergeometric
and Frobenius local-solution generators.

A series value is  pref_q * pref_rad * sum coeffs[i] * t^((val+i)/ram)  with
CPoly coefficients (polynomials in the formal constant C over cyclotomic
scalars).  The radical prefactor is the only radical content; coefficients are
radical-free.  Every operation records the weakest truncation bound of its
inputs; reading past the bound is an error, never a silent zero.
"""
from __future__ import annotations

from gmpy2 import mpq

from .ratfun import Poly, RatFun
from .scalars import (CPoly, Cyclo, EMPTY_RADICAL, RadicalMonomial, RootUnavailable,
                      Scalar, print_cpoly, print_rat, radical_canonicalize,
                      rational_radical_root)


class TruncationError(ValueError):
    pass


class NonUnitLeadingCoefficient(ValueError):
    pass


class CompositionValuation(ValueError):
    pass


class ResonantIndicialRoots(ValueError):
    pass


class PuiseuxSeries:
    __slots__ = ("n", "ram", "val", "coeffs", "order", "pref_q", "pref_rad")

    def __init__(self, n: int, ram: int, val: int, coeffs, order: int,
                 pref_q=mpq(1), pref_rad: RadicalMonomial = EMPTY_RADICAL,
                 _normalized=False):
        self.n = n
        self.ram = ram
        if not _normalized:
            coeffs = list(coeffs)
            if len(coeffs) != order - val:
                raise ValueError("coefficient span must equal order - val")
            while coeffs and coeffs[0].is_zero():
                coeffs.pop(0)
                val += 1
            if not coeffs:
                val = order
            if not pref_rad.is_canonical():
                cof, pref_rad = radical_canonicalize(pref_rad)
                pref_q = pref_q * cof
        self.val = val
        self.coeffs = coeffs
        self.order = order
        self.pref_q = mpq(pref_q)
        self.pref_rad = pref_rad

    # -- constructors --------------------------------------------------
    @staticmethod
    def zero(n: int, ram: int, order: int) -> PuiseuxSeries:
        return PuiseuxSeries(n, ram, order, [], order)

    @staticmethod
    def from_rationals(n: int, ram: int, val: int, rats, order: int,
                       pref_q=mpq(1), pref_rad=EMPTY_RADICAL) -> PuiseuxSeries:
        coeffs = [CPoly.const(Cyclo.from_rat(n, q)) for q in rats]
        return PuiseuxSeries(n, ram, val, coeffs, order, pref_q, pref_rad)

    @staticmethod
    def t_power(n: int, ram: int, grade: int, order: int) -> PuiseuxSeries:
        """The monomial t^(grade/ram), exact to the given order."""
        coeffs = [CPoly.const(Scalar.one(n))] + [CPoly.zero(n)] * (order - grade - 1)
        return PuiseuxSeries(n, ram, grade, coeffs, order)

    @staticmethod
    def constant(n: int, ram: int, s: Scalar, order: int) -> PuiseuxSeries:
        out = PuiseuxSeries.t_power(n, ram, 0, order)
        return out.mul_scalar(s)

    # -- basic structure -----------------------------------------------
    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, grade: int) -> CPoly:
        """Coefficient of t^(grade/ram), with the prefactor NOT applied."""
        if grade >= self.order:
            raise TruncationError(f"grade {grade}/{self.ram} beyond truncation {self.order}/{self.ram}")
        if grade < self.val:
            return CPoly.zero(self.n)
        return self.coeffs[grade - self.val]

    def leading(self) -> CPoly:
        if self.is_zero():
            raise ValueError("zero series has no leading coefficient")
        return self.coeffs[0]

    def truncate(self, order: int) -> PuiseuxSeries:
        if order > self.order:
            raise TruncationError("cannot extend truncation")
        if order == self.order:
            return self
        keep = max(order - self.val, 0)
        return PuiseuxSeries(self.n, self.ram, min(self.val, order), self.coeffs[:keep],
                             order, self.pref_q, self.pref_rad)

    def with_ram(self, new_ram: int) -> PuiseuxSeries:
        if new_ram == self.ram:
            return self
        if new_ram % self.ram != 0:
            raise ValueError("new ramification must be a multiple")
        k = new_ram // self.ram
        coeffs = []
        for c in self.coeffs:
            coeffs.append(c)
            coeffs.extend([CPoly.zero(self.n)] * (k - 1))
        if coeffs:
            coeffs = coeffs[:len(self.coeffs) * k - (k - 1)]
        pad = (self.order * k - self.val * k) - len(coeffs)
        coeffs.extend([CPoly.zero(self.n)] * pad)
        return PuiseuxSeries(self.n, new_ram, self.val * k, coeffs, self.order * k,
                             self.pref_q, self.pref_rad)

    def map_coeffs(self, fn) -> PuiseuxSeries:
        return PuiseuxSeries(self.n, self.ram, self.val, [fn(c) for c in self.coeffs],
                             self.order, self.pref_q, self.pref_rad)

    # -- ring operations -------------------------------------------------
    def _align(self, other: PuiseuxSeries):
        if self.n != other.n:
            raise ValueError("conductor mismatch")
        if self.ram != other.ram:
            raise ValueError("ramification mismatch; lift with with_ram first")

    def __add__(self, other: PuiseuxSeries) -> PuiseuxSeries:
        self._align(other)
        order = min(self.order, other.order)
        if self.is_zero():
            return other.truncate(order)
        if other.is_zero():
            return self.truncate(order)
        if self.pref_rad != other.pref_rad:
            from .scalars import RadicalGradeMismatch
            raise RadicalGradeMismatch("series radical grades differ")
        val = min(self.val, other.val)
        coeffs = [CPoly.zero(self.n) for _ in range(order - val)]
        qa, qb = self.pref_q, other.pref_q
        for i, c in enumerate(self.coeffs):
            g = self.val + i
            if g >= order:
                break
            coeffs[g - val] = c if qa == 1 else c.mul_scalar(Scalar.from_rat(self.n, qa))
        for i, c in enumerate(other.coeffs):
            g = other.val + i
            if g >= order:
                break
            d = c if qb == 1 else c.mul_scalar(Scalar.from_rat(self.n, qb))
            coeffs[g - val] = coeffs[g - val] + d
        return PuiseuxSeries(self.n, self.ram, val, coeffs, order, mpq(1), self.pref_rad)

    def __sub__(self, other: PuiseuxSeries) -> PuiseuxSeries:
        return self + (-other)

    def __neg__(self) -> PuiseuxSeries:
        return PuiseuxSeries(self.n, self.ram, self.val, [(-c) for c in self.coeffs],
                             self.order, self.pref_q, self.pref_rad, _normalized=True)

    def __mul__(self, other: PuiseuxSeries) -> PuiseuxSeries:
        self._align(other)
        order = min(self.order + other.val, other.order + self.val)
        if self.is_zero() or other.is_zero():
            return PuiseuxSeries.zero(self.n, self.ram, order)
        val = self.val + other.val
        ncoef = order - val
        out = [CPoly.zero(self.n) for _ in range(ncoef)]
        bmax = len(other.coeffs)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            jmax = min(ncoef - i, bmax)
            if jmax <= 0:
                break
            for j in range(jmax):
                b = other.coeffs[j]
                if not b.is_zero():
                    out[i + j] = out[i + j] + a * b
        pq = self.pref_q * other.pref_q
        rad = self.pref_rad * other.pref_rad
        return PuiseuxSeries(self.n, self.ram, val, out, order, pq, rad)

    def mul_scalar(self, s: Scalar) -> PuiseuxSeries:
        if s.is_zero():
            return PuiseuxSeries.zero(self.n, self.ram, self.order)
        rad = self.pref_rad * s.rad
        coeffs = [c.mul_scalar(s.cyc) for c in self.coeffs]
        return PuiseuxSeries(self.n, self.ram, self.val, coeffs, self.order, self.pref_q, rad)

    def mul_cpoly(self, p: CPoly) -> PuiseuxSeries:
        if p.is_zero():
            return PuiseuxSeries.zero(self.n, self.ram, self.order)
        return PuiseuxSeries(self.n, self.ram, self.val, [c * p for c in self.coeffs],
                             self.order, self.pref_q, self.pref_rad)

    def scale(self, q) -> PuiseuxSeries:
        return PuiseuxSeries(self.n, self.ram, self.val, self.coeffs, self.order,
                             self.pref_q * mpq(q), self.pref_rad, _normalized=True) \
            if mpq(q) != 0 else PuiseuxSeries.zero(self.n, self.ram, self.order)

    def shift(self, grades: int) -> PuiseuxSeries:
        """Multiply by t^(grades/ram)."""
        return PuiseuxSeries(self.n, self.ram, self.val + grades, self.coeffs,
                             self.order + grades, self.pref_q, self.pref_rad,
                             _normalized=True)

    # -- powers, inverse, roots -----------------------------------------
    def pow_alpha(self, alpha) -> PuiseuxSeries:
        """f^alpha for rational alpha, via the first-order recurrence
        n w_n = sum (alpha(n-m) - m) u_(n-m) w_m on the unit part."""
        alpha = mpq(alpha)
        if self.is_zero():
            if alpha <= 0:
                raise NonUnitLeadingCoefficient("zero series is not invertible")
            return PuiseuxSeries.zero(self.n, self.ram, self.order)
        lead = self.leading()
        if not lead.is_c_free():
            raise NonUnitLeadingCoefficient("leading coefficient involves C")
        ls = lead.constant()
        if ls.is_zero():
            raise NonUnitLeadingCoefficient("zero leading coefficient")
        new_val_q = self.val * alpha
        if new_val_q.denominator != 1:
            raise RootUnavailable("valuation not divisible by the root order")
        new_val = int(new_val_q)
        # leading scalar (with prefactor) raised to alpha
        if alpha.denominator == 1:
            k = int(alpha)
            lead_all = (Scalar.from_rat(self.n, self.pref_q) * ls).pow(k)
            raw_rad = self.pref_rad.pow(k) * lead_all.rad
            cof, rad_new = radical_canonicalize(raw_rad)
            cyc_mult = lead_all.cyc.scale(cof)
            pref_q_new = mpq(1)
        else:
            if not ls.is_rational():
                raise RootUnavailable("leading coefficient is not rational; pick the branch explicitly")
            base = self.pref_q * ls.to_rat()
            if base <= 0:
                raise RootUnavailable("leading coefficient not positive; fractional powers take the positive real branch")
            cof, mono = rational_radical_root(base, alpha)
            raw_rad = mono * self.pref_rad.pow(alpha)
            cof2, rad_new = radical_canonicalize(raw_rad)
            cyc_mult = None
            pref_q_new = cof * cof2
        # unit-part recurrence
        m = self.order - self.val  # relative truncation
        inv_ls = ls.cyc.inv()
        u = [None] * m  # u_k = coeffs[k]/ls for k >= 1
        for k in range(1, m):
            u[k] = self.coeffs[k].mul_scalar(inv_ls)
        w = [CPoly.zero(self.n) for _ in range(m)]
        w[0] = CPoly.const(Scalar.one(self.n))
        for k in range(1, m):
            acc = CPoly.zero(self.n)
            for j in range(k):
                uk = u[k - j]
                if uk is None or uk.is_zero():
                    continue
                factor = alpha * (k - j) - j
                if factor:
                    wj = w[j]
                    if not wj.is_zero():
                        acc = acc + (uk * wj).mul_scalar(Scalar.from_rat(self.n, factor))
            w[k] = acc.mul_scalar(Scalar.from_rat(self.n, mpq(1, k)))
        if cyc_mult is not None and not (cyc_mult == Cyclo.one(self.n)):
            coeffs = [c.mul_scalar(cyc_mult) for c in w]
        else:
            coeffs = w
        return PuiseuxSeries(self.n, self.ram, new_val, coeffs, new_val + m,
                             pref_q_new, rad_new)

    def inv(self) -> PuiseuxSeries:
        return self.pow_alpha(-1)

    def __truediv__(self, other: PuiseuxSeries) -> PuiseuxSeries:
        return self * other.inv()

    def pow_int(self, k: int) -> PuiseuxSeries:
        return self.pow_alpha(mpq(k))

    def pow_rational(self, p, q=None) -> PuiseuxSeries:
        alpha = mpq(p) if q is None else mpq(p, q)
        return self.pow_alpha(alpha)

    # -- calculus and twists ----------------------------------------------
    def derive(self) -> PuiseuxSeries:
        """d/dt."""
        coeffs = []
        for i, c in enumerate(self.coeffs):
            g = self.val + i
            coeffs.append(c.mul_scalar(Scalar.from_rat(self.n, mpq(g, self.ram))))
        return PuiseuxSeries(self.n, self.ram, self.val - self.ram, coeffs,
                             self.order - self.ram, self.pref_q, self.pref_rad)

    def zeta_twist(self, omega: Cyclo) -> PuiseuxSeries:
        """Multiply the coefficient at grade g by omega^g."""
        if omega.n != self.n:
            raise ValueError("conductor mismatch")
        # find the multiplicative order of omega (must be a root of unity)
        powers = [Cyclo.one(self.n)]
        cur = omega
        for _ in range(2 * self.n):
            if cur == powers[0]:
                break
            powers.append(cur)
            cur = cur * omega
        else:
            raise ValueError("twist element is not a root of unity")
        ordw = len(powers)
        coeffs = []
        for i, c in enumerate(self.coeffs):
            g = (self.val + i) % ordw
            if g == 0 or c.is_zero():
                coeffs.append(c)
            else:
                coeffs.append(c.mul_scalar(powers[g]))
        return PuiseuxSeries(self.n, self.ram, self.val, coeffs, self.order,
                             self.pref_q, self.pref_rad, _normalized=True)

    def conj(self) -> PuiseuxSeries:
        return self.map_coeffs(lambda c: c.conj())

    def compose(self, g: PuiseuxSeries) -> PuiseuxSeries:
        """self(g(t)) for an integer-grade self (ram 1) and val(g) >= 1."""
        if self.ram != 1:
            raise CompositionValuation("outer series must have integer grades")
        if self.val < 0:
            raise CompositionValuation("outer series must be a power series")
        if g.is_zero():
            pass
        elif g.val < 1:
            raise CompositionValuation("inner series needs positive valuation")
        if not self.pref_rad.is_trivial():
            raise CompositionValuation("outer series cannot carry a radical prefactor")
        order = min(g.order, self.order * (g.val if not g.is_zero() else 1))
        out = PuiseuxSeries.zero(self.n, g.ram, order)
        gt = g.truncate(min(g.order, order)) if not g.is_zero() else g
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if self.pref_q != 1:
                c = c.mul_scalar(Scalar.from_rat(self.n, self.pref_q))
            if not out.is_zero():
                out = (out * gt).truncate(min(out.order + gt.val, order) if not gt.is_zero() else order)
            if not c.is_zero():
                const = PuiseuxSeries(self.n, g.ram, 0,
                                      [c] + [CPoly.zero(self.n)] * (order - 1), order)
                out = out + const
        for _ in range(self.val):
            if out.is_zero() or gt.is_zero():
                out = PuiseuxSeries.zero(self.n, g.ram, order)
                break
            out = (out * gt).truncate(min(out.order + gt.val, order))
        return out.truncate(min(out.order, order))

    # -- misc -----------------------------------------------------------
    def numeric(self, t_value: complex, c_value: complex = 0j) -> complex:
        acc = 0j
        tv = t_value ** (1.0 / self.ram) if self.ram > 1 else t_value
        for i, c in enumerate(self.coeffs):
            acc += c.numeric(c_value) * tv ** (self.val + i)
        return acc * float(self.pref_q) * self.pref_rad.numeric()

    def value_eq(self, other: PuiseuxSeries) -> bool:
        """Equality as truncated values (up to the weaker truncation)."""
        d = self - other
        return d.is_zero()

    def __repr__(self):
        return f"PuiseuxSeries({print_series(self)!r})"


def series_arith(op: str, f: PuiseuxSeries, arg=None) -> PuiseuxSeries:
    """Dispatch front-end over the series operations."""
    if op == "add":
        return f + arg
    if op == "mul":
        return f * arg
    if op == "inv":
        return f.inv()
    if op == "div":
        return f / arg
    if op == "pow_int":
        return f.pow_int(arg)
    if op == "pow_rational":
        return f.pow_rational(arg)
    if op == "compose":
        return f.compose(arg)
    if op == "derive":
        return f.derive()
    if op == "zeta_twist":
        return f.zeta_twist(arg)
    if op == "conj":
        return f.conj()
    raise ValueError(f"unknown op {op!r}")


# ---------------------------------------------------------------------------
# local solution generators


def hypergeometric_series(a, b, c, scale, order: int, n: int = 24) -> PuiseuxSeries:
    """2F1(a, b; c; scale*t) as an integer-grade series to the given order."""
    a, b, c, scale = mpq(a), mpq(b), mpq(c), mpq(scale)
    coeffs = [mpq(1)]
    for k in range(order - 1):
        ck = c + k
        if ck == 0:
            raise ValueError(f"lower parameter hits non-positive integer at term {k + 1}")
        coeffs.append(coeffs[-1] * (a + k) * (b + k) * scale / ((k + 1) * ck))
    if c <= 0 and c.denominator == 1 and -int(c) < order - 1:
        raise ValueError("lower parameter is a non-positive integer")
    return PuiseuxSeries.from_rationals(n, 1, 0, coeffs, order)


def ratfun_laurent(f: RatFun, val_hint: int, count: int) -> tuple[int, list]:
    """Laurent expansion of f at t = 0: returns (val, coefficients)."""
    num, den = f.num, f.den
    if num.is_zero():
        return 0, [mpq(0)] * count
    nv = next(i for i, c in enumerate(num.coeffs) if c)
    dv = next(i for i, c in enumerate(den.coeffs) if c)
    val = nv - dv
    nc = list(num.coeffs[nv:])
    dc = list(den.coeffs[dv:])
    lead = dc[0]
    out = []
    acc = list(nc) + [mpq(0)] * max(0, count - len(nc))
    for k in range(count):
        v = acc[k] / lead if k < len(acc) else mpq(0)
        out.append(v)
        if v:
            for m in range(1, len(dc)):
                if k + m < len(acc):
                    acc[k + m] -= v * dc[m]
    return val, out


def frobenius_solutions(q: RatFun, rho, order: int, n: int = 24,
                        ram: int | None = None) -> PuiseuxSeries:
    """Local solution t^rho (1 + sum c_k t^k) of y'' + q(t) y = 0 at t = 0.

    rho must be an indicial root; resonant cases (the recursion denominator
    vanishing) raise ResonantIndicialRoots rather than producing logarithms.
    """
    rho = mpq(rho)
    count = order + 2
    val, lc = ratfun_laurent(q, -2, count)
    # q = sum_{j} q_j t^(j-2); pad so q_0 multiplies t^-2
    qj = [mpq(0)] * count
    for i, c in enumerate(lc):
        j = val + i + 2
        if j < 0 and c != 0:
            raise ValueError("Q has a pole worse than second order at 0")
        if 0 <= j < count:
            qj[j] = c
    q0 = qj[0]
    if rho * (rho - 1) + q0 != 0:
        raise ValueError("rho is not an indicial root at 0")
    cs = [mpq(1)]
    for k in range(1, order):
        phi = (rho + k) * (rho + k - 1) + q0
        acc = mpq(0)
        for m in range(1, k + 1):
            if qj[m] and k - m < len(cs):
                acc += qj[m] * cs[k - m]
        if phi == 0:
            if acc != 0:
                raise ResonantIndicialRoots(
                    f"resonance at step {k}: a logarithmic solution would be needed")
            cs.append(mpq(0))  # obstruction vanishes; take the pure power branch
        else:
            cs.append(-acc / phi)
    e = ram if ram is not None else int(rho.denominator)
    if (rho * e).denominator != 1:
        raise ValueError("ramification does not accommodate rho")
    base = PuiseuxSeries.from_rationals(n, 1, 0, cs, order)
    lifted = base.with_ram(e) if e != 1 else base
    return lifted.shift(int(rho * e))


def wronskian(f: PuiseuxSeries, g: PuiseuxSeries) -> PuiseuxSeries:
    """f g' - g f'."""
    f._align(g)
    return f * g.derive() - g * f.derive()


# ---------------------------------------------------------------------------
# textual encoding


def print_series(f: PuiseuxSeries) -> str:
    from .scalars import print_radical
    pref = print_rat(f.pref_q)
    if not f.pref_rad.is_trivial():
        pref += f"*{print_radical(f.pref_rad)}"
    terms = []
    for i, c in enumerate(f.coeffs):
        if c.is_zero():
            continue
        g = f.val + i
        if g == 0:
            tpow = ""
        elif f.ram == 1:
            tpow = f" t^{g}"
        else:
            tpow = f" t^{{{g}/{f.ram}}}"
        terms.append(f"({print_cpoly(c)}){tpow}")
    body = " + ".join(terms) if terms else "0"
    tail = f"O(t^{{{f.order}/{f.ram}}})" if f.ram != 1 else f"O(t^{f.order})"
    return f"{pref} * ( {body} + {tail} )"


def parse_series(s: str, n: int = 24) -> PuiseuxSeries:
    from .scalars import parse_cpoly, parse_radical, parse_rat
    s = s.strip()
    pref, body = s.split("*", 1)
    body = body.strip()
    prefs = pref.strip()
    if "*" in prefs:
        q, rad = prefs.split("*", 1)
        pref_q, pref_rad = parse_rat(q), parse_radical(rad)
    else:
        pref_q, pref_rad = parse_rat(prefs), EMPTY_RADICAL
    if not (body.startswith("(") and body.endswith(")")):
        raise ValueError("malformed series literal")
    body = body[1:-1].strip()
    parts = [p.strip() for p in _split_top(body, "+")]
    tail = parts[-1]
    if not tail.startswith("O(t^"):
        raise ValueError("missing truncation tail")
    inner = tail[4:-1]
    if inner.startswith("{"):
        o, r = inner[1:-1].split("/")
        order, ram = int(o), int(r)
    else:
        order, ram = int(inner), 1
    entries = {}
    for p in parts[:-1]:
        if p == "0":
            continue
        if p.endswith("}") and " t^{" in p:
            cp, gp = p.rsplit(" t^{", 1)
            g_, r_ = gp[:-1].split("/")
            g = int(g_)
        elif " t^" in p:
            cp, gp = p.rsplit(" t^", 1)
            g = int(gp)
        else:
            cp, g = p, 0
        cp = cp.strip()
        if cp.startswith("(") and cp.endswith(")"):
            cp = cp[1:-1]
        entries[g] = parse_cpoly(cp, n)
    if not entries:
        return PuiseuxSeries.zero(n, ram, order)
    val = min(entries)
    coeffs = [entries.get(g, CPoly.zero(n)) for g in range(val, order)]
    return PuiseuxSeries(n, ram, val, coeffs, order, pref_q, pref_rad)


def _split_top(s: str, sep: str) -> list[str]:
    out, depth, cur = [], 0, []
    for ch in s:
        if ch in "({[":
            depth += 1
        elif ch in ")}]":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return out
