import random

import pytest
from gmpy2 import mpq

from shimhecke.scalars import (CPoly, Cyclo, EMPTY_RADICAL, NonCFreeDivisor,
                               RadicalGradeMismatch, RadicalMonomial, Scalar,
                               cyc_arith, parse_cpoly, parse_cyclo, parse_radical,
                               parse_rat, parse_scalar, print_cpoly, print_cyclo,
                               print_radical, print_rat, print_scalar,
                               radical_canonicalize, rational_radical_root,
                               scalar_ops, sqrt2, sqrt3)


def rand_cyclo(rng, n=24, height=50):
    from shimhecke.scalars import _ctx
    deg = _ctx(n).deg
    num = tuple(rng.randrange(-height, height + 1) for _ in range(deg))
    den = rng.randrange(1, height)
    return Cyclo(n, num, den)


def test_unit_inverse_and_embedding():
    z = Cyclo.zeta(24)
    x = z + z.pow(5) - z.pow(7)
    assert x * x.inv() == Cyclo.one(24)
    v = x.numeric()
    assert abs(v - (1.48356 + 0.25882j)) < 1e-4


def test_two_cos_squared():
    # z^3 + z^21 = 2 cos(pi/4), its square is 2
    z = Cyclo.zeta(24)
    s = z.pow(3) + z.pow(21)
    assert cyc_arith("mul", s, s) == Cyclo.from_rat(24, 2)


@pytest.mark.parametrize("n", [5, 12, 24])
def test_field_axioms_random(n):
    rng = random.Random(7 + n)
    for _ in range(25):
        a, b, c = (rand_cyclo(rng, n) for _ in range(3))
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        if not a.is_zero():
            assert a * a.inv() == Cyclo.one(n)
        assert a.conj().conj() == a
        assert (a * b).conj() == a.conj() * b.conj()


def test_numeric_homomorphism():
    rng = random.Random(11)
    for _ in range(20):
        a, b = rand_cyclo(rng), rand_cyclo(rng)
        for op in ("add", "mul"):
            exact = cyc_arith(op, a, b).numeric()
            approx = a.numeric() + b.numeric() if op == "add" else a.numeric() * b.numeric()
            assert abs(exact - approx) <= 1e-12 * max(1.0, abs(exact))


def test_conductor_mismatch_and_zero_inverse():
    with pytest.raises(Exception):
        cyc_arith("add", Cyclo.one(24), Cyclo.one(12))
    with pytest.raises(ZeroDivisionError):
        Cyclo.zero(24).inv()


def test_radical_canonicalize_examples():
    # integer-part extraction
    cof, mono = radical_canonicalize(RadicalMonomial({5: mpq(7, 6)}))
    assert cof == 5 and mono == RadicalMonomial({5: mpq(1, 6)})
    # sixth root of 2^12 3^6 5^2 / 11^4
    cof, mono = rational_radical_root(mpq(2 ** 12 * 3 ** 6 * 5 ** 2, 11 ** 4), mpq(1, 6))
    assert cof == mpq(12, 11)
    assert mono == RadicalMonomial({5: mpq(1, 3), 11: mpq(1, 3)})
    # full collapse to a rational
    c1, m1 = rational_radical_root(mpq(2 ** 12 * 3 ** 6 * 5 ** 2, 11 ** 4), mpq(1, 3))
    c2, m2 = rational_radical_root(mpq(11, 5 ** 5), mpq(8, 6))
    prod = Scalar(Cyclo.from_rat(24, c1), m1) * Scalar(Cyclo.from_rat(24, c2), m2)
    assert prod.to_rat() == mpq(144, 15625)


def test_radical_canonicalize_idempotent_and_value():
    rng = random.Random(3)
    primes = [2, 3, 5, 11, 17]
    for _ in range(20):
        mono = RadicalMonomial({p: mpq(rng.randrange(-20, 21), rng.choice([1, 2, 3, 6, 12]))
                                for p in rng.sample(primes, 3)})
        cof, canon = radical_canonicalize(mono)
        assert canon.is_canonical()
        cof2, again = radical_canonicalize(canon)
        assert cof2 == 1 and again == canon
        assert abs(float(cof) * canon.numeric() - mono.numeric()) <= 1e-12 * abs(mono.numeric())


def test_exponent_denominator_cap():
    with pytest.raises(ValueError):
        RadicalMonomial({2: mpq(1, 24)})


def test_scalar_conjugation_fixes_radical():
    # (-1+i)/(1+sqrt3) conjugates to (-1-i)/(1+sqrt3)
    n = 24
    i = Cyclo.zeta(n, 6)
    r3 = sqrt3(n)
    denom = (Cyclo.one(n) + r3).inv()
    p = Scalar((Cyclo.from_rat(n, -1) + i) * denom)
    pc = scalar_ops("conj", p)
    assert pc == Scalar((Cyclo.from_rat(n, -1) - i) * denom)
    rad = RadicalMonomial({11: mpq(1, 6)})
    s = Scalar(i, rad)
    assert s.conj() == Scalar(-i, rad)


def test_scalar_grade_addition():
    n = 24
    z = Cyclo.zeta(n)
    r6 = rational_radical_root(mpq(11, 5 ** 5), mpq(1, 6))
    grade = Scalar(Cyclo.one(n), r6[1]).scale(r6[0])
    a = grade * Scalar(z)
    b = grade * Scalar(z.pow(5))
    assert scalar_ops("add", a, b) == grade * Scalar(z + z.pow(5))
    other = Scalar(Cyclo.one(n), rational_radical_root(mpq(5), mpq(1, 2))[1])
    with pytest.raises(RadicalGradeMismatch):
        scalar_ops("add", a, other)


def test_scalar_is_rational_and_numeric():
    s = Scalar.from_rat(24, mpq(-7, 3))
    assert scalar_ops("is_rational", s)
    assert abs(scalar_ops("numeric", s) - (-7 / 3)) < 1e-15
    t = Scalar(sqrt2(24))
    assert not t.is_rational()


def test_cpoly_ring_axioms():
    rng = random.Random(5)
    def rand_cpoly():
        return CPoly(24, [rand_cyclo(rng, 24, 9) for _ in range(rng.randrange(5))])
    for _ in range(25):
        a, b, c = rand_cpoly(), rand_cpoly(), rand_cpoly()
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a + b == b + a


def test_cpoly_division_rules():
    n = 24
    csym = CPoly.c_symbol(n)
    one = CPoly.const(Cyclo.one(n))
    poly = csym * csym + one
    assert poly / CPoly.const(Cyclo.from_rat(n, 2)) == poly.mul_scalar(Cyclo.from_rat(n, mpq(1, 2)))
    with pytest.raises(NonCFreeDivisor):
        poly / csym


def test_textual_round_trips():
    assert parse_rat(print_rat(mpq(-22, 7))) == mpq(-22, 7)
    z = Cyclo.zeta(24)
    x = (z + z.pow(5) - z.pow(7)).scale(mpq(3, 11))
    assert parse_cyclo(print_cyclo(x)) == x
    mono = RadicalMonomial({5: mpq(1, 3), 11: mpq(5, 6)})
    assert parse_radical(print_radical(mono)) == mono
    s = Scalar(x, mono)
    assert parse_scalar(print_scalar(s)) == s
    cp = CPoly(24, [x, Cyclo.from_rat(24, mpq(1, 3))])
    assert parse_cpoly(print_cpoly(cp)) == cp
