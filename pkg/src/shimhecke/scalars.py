"""Exact scalar arithmetic: rationals, cyclotomic fields, radical monomials,
composite scalars and polynomials in the formal constant C.

Every value in the exact pipeline is built from these types.  All arithmetic
is exact; floating point only enters through the explicit ``numeric``
embeddings.
"""
from __future__ import annotations

import cmath
import math

from gmpy2 import gcd as _gcd, mpq, mpz

Rat = mpq  # arbitrary-precision rational, always in lowest terms


class ConductorMismatch(ValueError):
    pass


class RadicalGradeMismatch(ValueError):
    """Raised when Scalars of different radical grade are added."""


class RootUnavailable(ValueError):
    """Raised when an exact rational/radical root does not exist."""


def _int_poly_div(num: list[int], den: list[int]) -> list[int]:
    # exact division of integer polynomials, used only to build cyclotomics
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1] // den[-1]
        out[i] = c
        for j, d in enumerate(den):
            num[i + j] -= c * d
    assert all(x == 0 for x in num), "non-exact polynomial division"
    return out


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


_CYCLO_POLY_CACHE: dict[int, list[int]] = {}


def cyclotomic_polynomial(n: int) -> list[int]:
    """Coefficients (ascending) of the n-th cyclotomic polynomial."""
    if n in _CYCLO_POLY_CACHE:
        return _CYCLO_POLY_CACHE[n]
    poly = [-1] + [0] * (n - 1) + [1]  # x^n - 1
    for d in _divisors(n):
        if d < n:
            poly = _int_poly_div(poly, cyclotomic_polynomial(d))
    _CYCLO_POLY_CACHE[n] = poly
    return poly


class _Ctx:
    """Per-conductor tables: zeta-power vectors and tail reduction rows."""

    def __init__(self, n: int):
        phi_poly = cyclotomic_polynomial(n)
        deg = len(phi_poly) - 1
        self.n = n
        self.deg = deg
        # zeta^m in the power basis, for 0 <= m < n  (zeta^n = 1)
        zpow: list[tuple] = []
        cur = [mpz(0)] * deg
        cur[0] = mpz(1)
        for _ in range(n):
            zpow.append(tuple(cur))
            nxt = [mpz(0)] * (deg + 1)
            for i, c in enumerate(cur):
                nxt[i + 1] = c
            top = nxt[deg]
            if top:
                for i in range(deg):
                    nxt[i] -= top * phi_poly[i]
            cur = nxt[:deg]
        self.zpow = zpow
        # reduction rows for x^k, deg <= k <= 2*deg-2 (products before folding)
        rows = []
        for k in range(deg, 2 * deg - 1):
            rows.append(zpow[k % n])
        self.tail_rows = rows


_CTX_CACHE: dict[int, _Ctx] = {}


def _ctx(n: int) -> _Ctx:
    ctx = _CTX_CACHE.get(n)
    if ctx is None:
        ctx = _CTX_CACHE[n] = _Ctx(n)
    return ctx


class Cyclo:
    """Element of Q(zeta_N) in the power basis 1, zeta, ..., zeta^(phi(N)-1).

    Stored as integer coordinates over a single positive denominator, always
    normalized (content coprime to the denominator).
    """

    __slots__ = ("n", "num", "den")

    def __init__(self, n: int, num: tuple, den=mpz(1), _normalized=False):
        self.n = n
        if _normalized:
            self.num = num
            self.den = den
            return
        if den < 0:
            num = tuple(-x for x in num)
            den = -den
        g = den
        for x in num:
            if x:
                g = _gcd(g, x)
            if g == 1:
                break
        if g > 1:
            num = tuple(x // g for x in num)
            den = den // g
        self.num = num
        self.den = den

    # -- constructors -------------------------------------------------
    @staticmethod
    def from_rat(n: int, q) -> Cyclo:
        q = mpq(q)
        deg = _ctx(n).deg
        num = [mpz(0)] * deg
        num[0] = mpz(q.numerator)
        return Cyclo(n, tuple(num), mpz(q.denominator), _normalized=(q.denominator == 1 or _gcd(q.numerator, q.denominator) == 1))

    @staticmethod
    def zero(n: int) -> Cyclo:
        return Cyclo(n, tuple([mpz(0)] * _ctx(n).deg), mpz(1), _normalized=True)

    @staticmethod
    def one(n: int) -> Cyclo:
        return Cyclo.from_rat(n, 1)

    @staticmethod
    def zeta(n: int, power: int = 1) -> Cyclo:
        return Cyclo(n, _ctx(n).zpow[power % n], mpz(1), _normalized=True)

    # -- predicates ----------------------------------------------------
    def is_zero(self) -> bool:
        return not any(self.num)

    def is_rational(self) -> bool:
        return not any(self.num[1:])

    def to_rat(self):
        if not self.is_rational():
            raise ValueError("not a rational cyclotomic element")
        return mpq(self.num[0], self.den)

    # -- ring operations ------------------------------------------------
    def _check(self, other: Cyclo):
        if self.n != other.n:
            raise ConductorMismatch(f"conductors {self.n} and {other.n}")

    def __add__(self, other: Cyclo) -> Cyclo:
        self._check(other)
        da, db = self.den, other.den
        if da == db:
            # content may creep in; multiplications renormalize and equality
            # compares cross-multiplied, so skipping the gcd here is safe
            return Cyclo(self.n, tuple(x + y for x, y in zip(self.num, other.num)),
                         da, _normalized=True)
        return Cyclo(self.n, tuple(x * db + y * da for x, y in zip(self.num, other.num)), da * db)

    def __sub__(self, other: Cyclo) -> Cyclo:
        self._check(other)
        da, db = self.den, other.den
        if da == db:
            return Cyclo(self.n, tuple(x - y for x, y in zip(self.num, other.num)),
                         da, _normalized=True)
        return Cyclo(self.n, tuple(x * db - y * da for x, y in zip(self.num, other.num)), da * db)

    def __neg__(self) -> Cyclo:
        return Cyclo(self.n, tuple(-x for x in self.num), self.den, _normalized=True)

    def __mul__(self, other: Cyclo) -> Cyclo:
        self._check(other)
        a, b = self.num, other.num
        deg = len(a)
        # rational fast paths
        if not any(a[1:]):
            c = a[0]
            if not c:
                return Cyclo.zero(self.n)
            return Cyclo(self.n, tuple(c * y for y in b), self.den * other.den)
        if not any(b[1:]):
            c = b[0]
            if not c:
                return Cyclo.zero(self.n)
            return Cyclo(self.n, tuple(c * x for x in a), self.den * other.den)
        prod = [mpz(0)] * (2 * deg - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        rows = _ctx(self.n).tail_rows
        out = prod[:deg]
        for k in range(2 * deg - 2, deg - 1, -1):
            c = prod[k]
            if c:
                row = rows[k - deg]
                for i in range(deg):
                    if row[i]:
                        out[i] += c * row[i]
        return Cyclo(self.n, tuple(out), self.den * other.den)

    def scale(self, q) -> Cyclo:
        q = mpq(q)
        return Cyclo(self.n, tuple(mpz(q.numerator) * x for x in self.num), self.den * q.denominator)

    def inv(self) -> Cyclo:
        """Field inverse via the extended Euclidean algorithm mod Phi_N."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero cyclotomic element")
        if self.is_rational():
            return Cyclo.from_rat(self.n, 1 / mpq(self.num[0], self.den))
        n = self.n
        phi = [mpq(c) for c in cyclotomic_polynomial(n)]
        a = [mpq(x, self.den) for x in self.num]
        # extended gcd of a and phi over Q[x]
        r0, r1 = phi, a
        t0, t1 = [mpq(0)], [mpq(1)]
        while True:
            while r1 and r1[-1] == 0:
                r1.pop()
            if len(r1) == 1:
                break
            q, rem = _poly_divmod_q(r0, r1)
            r0, r1 = r1, rem
            t0, t1 = t1, _poly_sub_q(t0, _poly_mul_q(q, t1))
        c = r1[0]  # nonzero constant gcd
        inv_coeffs = [t / c for t in _poly_mod_q(t1, phi)]
        deg = _ctx(n).deg
        inv_coeffs += [mpq(0)] * (deg - len(inv_coeffs))
        den = mpz(1)
        for q_ in inv_coeffs:
            den = den * q_.denominator // _gcd(den, q_.denominator)
        num = tuple(mpz(q_.numerator) * (den // q_.denominator) for q_ in inv_coeffs[:deg])
        out = Cyclo(n, num, den)
        return out

    def __truediv__(self, other: Cyclo) -> Cyclo:
        return self * other.inv()

    def pow(self, k: int) -> Cyclo:
        if k < 0:
            return self.inv().pow(-k)
        result = Cyclo.one(self.n)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    def conj(self) -> Cyclo:
        """Complex conjugation, the automorphism zeta -> zeta^(N-1)."""
        ctx = _ctx(self.n)
        out = [mpz(0)] * ctx.deg
        for k, c in enumerate(self.num):
            if c:
                row = ctx.zpow[(-k) % self.n]
                for i in range(ctx.deg):
                    if row[i]:
                        out[i] += c * row[i]
        return Cyclo(self.n, tuple(out), self.den)

    def galois(self, m: int) -> Cyclo:
        """The automorphism zeta -> zeta^m (m coprime to N)."""
        if math.gcd(m, self.n) != 1:
            raise ValueError("not a Galois automorphism")
        ctx = _ctx(self.n)
        out = [mpz(0)] * ctx.deg
        for k, c in enumerate(self.num):
            if c:
                row = ctx.zpow[(m * k) % self.n]
                for i in range(ctx.deg):
                    if row[i]:
                        out[i] += c * row[i]
        return Cyclo(self.n, tuple(out), self.den)

    def mul_zeta(self, power: int) -> Cyclo:
        """Multiply by zeta^power (cheap monomial product)."""
        ctx = _ctx(self.n)
        power %= self.n
        if power == 0:
            return self
        out = [mpz(0)] * ctx.deg
        for k, c in enumerate(self.num):
            if c:
                row = ctx.zpow[(k + power) % self.n]
                for i in range(ctx.deg):
                    if row[i]:
                        out[i] += c * row[i]
        return Cyclo(self.n, tuple(out), self.den, _normalized=True)

    def numeric(self) -> complex:
        """Principal embedding zeta_N = exp(2*pi*i/N)."""
        z = cmath.exp(2j * cmath.pi / self.n)
        acc = 0j
        p = 1 + 0j
        for c in self.num:
            if c:
                acc += float(mpq(c, self.den)) * p
            p *= z
        return acc

    def __eq__(self, other) -> bool:
        if not isinstance(other, Cyclo) or self.n != other.n:
            return NotImplemented if not isinstance(other, Cyclo) else False
        if self.den == other.den:
            return self.num == other.num
        da, db = self.den, other.den
        return all(x * db == y * da for x, y in zip(self.num, other.num))

    def reduced(self) -> Cyclo:
        return Cyclo(self.n, self.num, self.den)

    def __hash__(self):
        r = self.reduced()
        return hash((r.n, r.den, r.num))

    def __repr__(self):
        return f"Cyclo({print_cyclo(self)!r})"


def _poly_divmod_q(a: list, b: list):
    a = list(a)
    db = len(b) - 1
    q = [mpq(0)] * max(len(a) - db, 1)
    for i in range(len(a) - db - 1, -1, -1):
        c = a[i + db] / b[db]
        q[i] = c
        if c:
            for j in range(db + 1):
                a[i + j] -= c * b[j]
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return q, a


def _poly_mul_q(a: list, b: list) -> list:
    out = [mpq(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_sub_q(a: list, b: list) -> list:
    out = [mpq(0)] * max(len(a), len(b))
    for i, x in enumerate(a):
        out[i] += x
    for i, x in enumerate(b):
        out[i] -= x
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def _poly_mod_q(a: list, b: list) -> list:
    _, r = _poly_divmod_q(a, b)
    return r


# ---------------------------------------------------------------------------
# radical monomials


MAX_EXP_DEN = 12  # all radical exponents have denominator dividing this


def _factorize(n) -> dict[int, int]:
    """Prime factorization by trial division (values here are smooth)."""
    n = int(n)
    if n <= 0:
        raise ValueError("factorize expects a positive integer")
    out: dict[int, int] = {}
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    d = 29
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


class RadicalMonomial:
    """Formal product prod p^(e_p) over primes p with rational exponents.

    Canonical form keeps every exponent in [0, 1); integer parts are returned
    as a rational cofactor by :func:`radical_canonicalize`.  Denotes the
    positive real value of the product.
    """

    __slots__ = ("exps",)

    def __init__(self, exps: dict | None = None):
        clean = {}
        for p, e in (exps or {}).items():
            e = mpq(e)
            if e != 0:
                if MAX_EXP_DEN % e.denominator != 0:
                    raise ValueError(f"exponent denominator {e.denominator} exceeds cap {MAX_EXP_DEN}")
                clean[int(p)] = e
        self.exps = clean

    def is_trivial(self) -> bool:
        return not self.exps

    def is_canonical(self) -> bool:
        return all(0 <= e < 1 for e in self.exps.values())

    def __mul__(self, other: RadicalMonomial) -> RadicalMonomial:
        exps = dict(self.exps)
        for p, e in other.exps.items():
            exps[p] = exps.get(p, mpq(0)) + e
        return RadicalMonomial(exps)

    def pow(self, e) -> RadicalMonomial:
        e = mpq(e)
        return RadicalMonomial({p: x * e for p, x in self.exps.items()})

    def numeric(self) -> float:
        return math.prod(p ** float(e) for p, e in self.exps.items())

    def __eq__(self, other) -> bool:
        return isinstance(other, RadicalMonomial) and self.exps == other.exps

    def __hash__(self):
        return hash(tuple(sorted(self.exps.items())))

    def __repr__(self):
        return f"RadicalMonomial({print_radical(self)!r})"


EMPTY_RADICAL = RadicalMonomial()


def radical_canonicalize(m: RadicalMonomial) -> tuple:
    """Split m into (rational cofactor, monomial with exponents in [0,1))."""
    cof = mpq(1)
    exps = {}
    for p, e in m.exps.items():
        k = e.numerator // e.denominator  # floor
        frac = e - k
        if k:
            cof *= mpq(p) ** int(k)
        if frac:
            exps[p] = frac
    return cof, RadicalMonomial(exps)


def rational_radical_root(q, exp) -> tuple:
    """Exact (q)^exp as (rational cofactor, RadicalMonomial); q must be > 0.

    Requires full prime factorization of q, which is cheap for the smooth
    values this pipeline produces.
    """
    q = mpq(q)
    exp = mpq(exp)
    if q <= 0:
        raise RootUnavailable("base must be a positive rational")
    fac = _factorize(q.numerator)
    for p, e in _factorize(q.denominator).items():
        fac[p] = fac.get(p, 0) - e
    mono = RadicalMonomial({p: mpq(e) * exp for p, e in fac.items() if e})
    return radical_canonicalize(mono)


# ---------------------------------------------------------------------------
# Scalar = cyclotomic element times radical monomial


class Scalar:
    """Exact scalar: CyclotomicElement times a canonical RadicalMonomial.

    Addition is defined only between scalars of identical radical grade; a
    cross-grade addition raises RadicalGradeMismatch (it signals a modeling
    bug upstream, never something to coerce through).
    """

    __slots__ = ("cyc", "rad")

    def __init__(self, cyc: Cyclo, rad: RadicalMonomial = EMPTY_RADICAL):
        if not rad.is_canonical():
            cof, rad = radical_canonicalize(rad)
            cyc = cyc.scale(cof)
        if cyc.is_zero():
            rad = EMPTY_RADICAL
        self.cyc = cyc
        self.rad = rad

    @staticmethod
    def from_rat(n: int, q) -> Scalar:
        return Scalar(Cyclo.from_rat(n, q))

    @staticmethod
    def zero(n: int) -> Scalar:
        return Scalar(Cyclo.zero(n))

    @staticmethod
    def one(n: int) -> Scalar:
        return Scalar(Cyclo.one(n))

    def is_zero(self) -> bool:
        return self.cyc.is_zero()

    def is_rational(self) -> bool:
        return self.cyc.is_rational() and self.rad.is_trivial()

    def to_rat(self):
        if not self.rad.is_trivial():
            raise ValueError("scalar carries a radical part")
        return self.cyc.to_rat()

    def _grade_check(self, other: Scalar):
        if self.rad != other.rad:
            if self.is_zero() or other.is_zero():
                return
            raise RadicalGradeMismatch(
                f"grades {print_radical(self.rad)} vs {print_radical(other.rad)}")

    def __add__(self, other: Scalar) -> Scalar:
        self._grade_check(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        return Scalar(self.cyc + other.cyc, self.rad)

    def __sub__(self, other: Scalar) -> Scalar:
        self._grade_check(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return -other
        return Scalar(self.cyc - other.cyc, self.rad)

    def __neg__(self) -> Scalar:
        return Scalar(-self.cyc, self.rad)

    def __mul__(self, other: Scalar) -> Scalar:
        if self.rad.is_trivial() and other.rad.is_trivial():
            return Scalar(self.cyc * other.cyc)
        mono = self.rad * other.rad
        cof, mono = radical_canonicalize(mono)
        cyc = self.cyc * other.cyc
        if cof != 1:
            cyc = cyc.scale(cof)
        return Scalar(cyc, mono)

    def scale(self, q) -> Scalar:
        return Scalar(self.cyc.scale(q), self.rad)

    def inv(self) -> Scalar:
        cof, mono = radical_canonicalize(self.rad.pow(-1))
        return Scalar(self.cyc.inv().scale(cof), mono)

    def __truediv__(self, other: Scalar) -> Scalar:
        return self * other.inv()

    def pow(self, k: int) -> Scalar:
        if k < 0:
            return self.inv().pow(-k)
        out = Scalar.one(self.cyc.n)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    def conj(self) -> Scalar:
        # the radical part is positive real, fixed by conjugation
        return Scalar(self.cyc.conj(), self.rad)

    def numeric(self) -> complex:
        return self.cyc.numeric() * self.rad.numeric()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Scalar):
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return True
        return self.rad == other.rad and self.cyc == other.cyc

    def __hash__(self):
        return hash((self.cyc, self.rad))

    def __repr__(self):
        return f"Scalar({print_scalar(self)!r})"


# ---------------------------------------------------------------------------
# polynomials in the formal constant C


class NonCFreeDivisor(ValueError):
    pass


class CPoly:
    """Polynomial in the formal symbol C over the cyclotomic field.

    Coefficients are radical-free (the series layer keeps radical content in
    prefactors); degree-0 polynomials embed scalars, and division is permitted
    only by a C-free invertible scalar.
    """

    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, coeffs, _normalized=False):
        if not _normalized:
            coeffs = list(coeffs)
            while coeffs and coeffs[-1].is_zero():
                coeffs.pop()
            coeffs = tuple(coeffs)
        self.n = n
        self.coeffs = coeffs

    @staticmethod
    def zero(n: int) -> CPoly:
        return CPoly(n, (), _normalized=True)

    @staticmethod
    def const(s) -> CPoly:
        if isinstance(s, Scalar):
            if not s.rad.is_trivial():
                raise ValueError("CPoly coefficients must be radical-free")
            s = s.cyc
        if s.is_zero():
            return CPoly(s.n, (), _normalized=True)
        return CPoly(s.n, (s,), _normalized=True)

    @staticmethod
    def c_symbol(n: int) -> CPoly:
        return CPoly(n, (Cyclo.zero(n), Cyclo.one(n)), _normalized=True)

    def is_zero(self) -> bool:
        return not self.coeffs

    def degree(self) -> int:
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    def is_c_free(self) -> bool:
        return len(self.coeffs) <= 1

    def constant(self) -> Scalar:
        return Scalar(self.coeffs[0]) if self.coeffs else Scalar.zero(self.n)

    def constant_cyc(self) -> Cyclo:
        return self.coeffs[0] if self.coeffs else Cyclo.zero(self.n)

    def coeff(self, k: int) -> Scalar:
        return Scalar(self.coeffs[k]) if k < len(self.coeffs) else Scalar.zero(self.n)

    def __add__(self, other: CPoly) -> CPoly:
        if not self.coeffs:
            return other
        if not other.coeffs:
            return self
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, x in enumerate(b):
            out[i] = out[i] + x
        return CPoly(self.n, out)

    def __sub__(self, other: CPoly) -> CPoly:
        return self + (-other)

    def __neg__(self) -> CPoly:
        return CPoly(self.n, tuple(-x for x in self.coeffs), _normalized=True)

    def __mul__(self, other: CPoly) -> CPoly:
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return CPoly.zero(self.n)
        if len(a) == 1:
            s = a[0]
            return CPoly(self.n, tuple(s * y for y in b))
        if len(b) == 1:
            s = b[0]
            return CPoly(self.n, tuple(x * s for x in a))
        out = [Cyclo.zero(self.n)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if not x.is_zero():
                for j, y in enumerate(b):
                    if not y.is_zero():
                        out[i + j] = out[i + j] + x * y
        return CPoly(self.n, out)

    def mul_scalar(self, s) -> CPoly:
        if isinstance(s, Scalar):
            if not s.rad.is_trivial():
                raise ValueError("CPoly coefficients must stay radical-free")
            s = s.cyc
        if s.is_zero():
            return CPoly.zero(self.n)
        return CPoly(self.n, tuple(x * s for x in self.coeffs), _normalized=True)

    def div_scalar(self, s) -> CPoly:
        if isinstance(s, Scalar):
            if not s.rad.is_trivial():
                raise NonCFreeDivisor("division only by radical-free scalars here")
            s = s.cyc
        if s.is_zero():
            raise ZeroDivisionError("division by zero scalar")
        return self.mul_scalar(s.inv())

    def __truediv__(self, other: CPoly) -> CPoly:
        if not other.is_c_free():
            raise NonCFreeDivisor("division only by C-free scalars")
        return self.div_scalar(other.constant_cyc())

    def conj(self) -> CPoly:
        return CPoly(self.n, tuple(x.conj() for x in self.coeffs), _normalized=True)

    def mul_zeta(self, power: int) -> CPoly:
        return CPoly(self.n, tuple(x.mul_zeta(power) for x in self.coeffs),
                     _normalized=True)

    def eval_scalar(self, c: Scalar) -> Scalar:
        acc = Scalar.zero(self.n)
        for x in reversed(self.coeffs):
            acc = acc * c + Scalar(x)
        return acc

    def numeric(self, c_value: complex) -> complex:
        acc = 0j
        for x in reversed(self.coeffs):
            acc = acc * c_value + x.numeric()
        return acc

    def __eq__(self, other) -> bool:
        return (isinstance(other, CPoly) and len(self.coeffs) == len(other.coeffs)
                and all(x == y for x, y in zip(self.coeffs, other.coeffs)))

    def __hash__(self):
        return hash(tuple(x.reduced() for x in self.coeffs))

    def __repr__(self):
        return f"CPoly({print_cpoly(self)!r})"


# ---------------------------------------------------------------------------
# spec'd operation front-ends


def cyc_arith(op: str, x: Cyclo, y: Cyclo | None = None):
    """Dispatch table over the cyclotomic field operations."""
    if op == "add":
        return x + y
    if op == "mul":
        return x * y
    if op == "inv":
        return x.inv()
    if op == "conj":
        return x.conj()
    if op == "embed_numeric":
        return x.numeric()
    raise ValueError(f"unknown op {op!r}")


def scalar_ops(op: str, a: Scalar, b: Scalar | None = None):
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "conj":
        return a.conj()
    if op == "is_rational":
        return a.is_rational()
    if op == "numeric":
        return a.numeric()
    raise ValueError(f"unknown op {op!r}")


# ---------------------------------------------------------------------------
# textual encoding (exact round-trip)


def print_rat(q) -> str:
    q = mpq(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_rat(s: str):
    return mpq(s.strip())


def print_cyclo(x: Cyclo) -> str:
    coords = ", ".join(print_rat(mpq(c, x.den)) for c in x.num)
    return f"[{coords}]@zeta{x.n}"


def parse_cyclo(s: str) -> Cyclo:
    s = s.strip()
    body, tag = s.rsplit("@", 1)
    if not tag.startswith("zeta"):
        raise ValueError(f"bad cyclotomic literal {s!r}")
    n = int(tag[4:])
    body = body.strip()
    if not (body.startswith("[") and body.endswith("]")):
        raise ValueError(f"bad cyclotomic literal {s!r}")
    parts = [p for p in body[1:-1].split(",") if p.strip()]
    coords = [parse_rat(p) for p in parts]
    deg = _ctx(n).deg
    if len(coords) != deg:
        raise ValueError(f"expected {deg} coordinates for conductor {n}")
    den = mpz(1)
    for q in coords:
        den = den * q.denominator // _gcd(den, q.denominator)
    num = tuple(mpz(q.numerator) * (den // q.denominator) for q in coords)
    return Cyclo(n, num, den)


def print_radical(m: RadicalMonomial) -> str:
    if m.is_trivial():
        return "1"
    parts = []
    for p in sorted(m.exps):
        e = m.exps[p]
        parts.append(f"{p}^({print_rat(e)})")
    return "*".join(parts)


def parse_radical(s: str) -> RadicalMonomial:
    s = s.strip()
    if s == "1":
        return EMPTY_RADICAL
    exps = {}
    for part in s.split("*"):
        base, e = part.split("^")
        e = e.strip()
        if e.startswith("(") and e.endswith(")"):
            e = e[1:-1]
        exps[int(base)] = parse_rat(e)
    return RadicalMonomial(exps)


def print_scalar(s: Scalar) -> str:
    if s.rad.is_trivial():
        return print_cyclo(s.cyc)
    return f"{print_cyclo(s.cyc)} | {print_radical(s.rad)}"


def parse_scalar(s: str, n: int = 24) -> Scalar:
    s = s.strip()
    if "|" in s:
        cy, rd = s.split("|")
        return Scalar(parse_cyclo(cy), parse_radical(rd))
    if "@" in s:
        return Scalar(parse_cyclo(s))
    return Scalar.from_rat(n, parse_rat(s))


def print_cpoly(p: CPoly) -> str:
    if p.is_zero():
        return "0"
    return " ; ".join(print_cyclo(c.reduced()) for c in p.coeffs)


def parse_cpoly(s: str, n: int = 24) -> CPoly:
    s = s.strip()
    if s == "0":
        return CPoly.zero(n)
    return CPoly(n, [parse_cyclo(part) for part in s.split(";")])


# convenient constants for the working conductor
def sqrt2(n: int = 24) -> Cyclo:
    z = Cyclo.zeta(n, n // 8)
    return z + z.conj()  # 2*cos(pi/4)


def sqrt3(n: int = 24) -> Cyclo:
    z = Cyclo.zeta(n, n // 12)
    return z + z.conj()  # 2*cos(pi/6)


def sqrt6(n: int = 24) -> Cyclo:
    return sqrt2(n) * sqrt3(n)


def imag_unit(n: int = 24) -> Cyclo:
    return Cyclo.zeta(n, n // 4)
