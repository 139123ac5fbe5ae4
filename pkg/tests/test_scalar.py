"""Exact scalar arithmetic: surds, series fields, twisted multiplications."""
from fractions import Fraction

import pytest

from valgon.scalar import (
    ALL_PRIMES,
    FROBENIUS_SHIFT,
    GaloisField,
    INF,
    PrimeField,
    QuadraticNumber,
    QuasifieldSpec,
    Rationals,
    RationalExponentSeries,
    SIGN,
    SQRT2,
    SQRT3,
    SeriesField,
    andre_multiply,
    apply_automorphism,
    arith,
    base_field_from_name,
    check_valued_quasifield,
    default_sigma,
    format_series,
    format_value,
    norm_map,
    parse_quadratic,
    parse_series,
    series_from_json,
    valuation_of,
)


# ---------------------------------------------------------------------------
# QuadraticNumber


class TestQuadraticNumber:
    def test_sqrt2_squared_is_two(self):
        assert SQRT2 * SQRT2 == QuadraticNumber(2)

    def test_sqrt3_squared_is_three(self):
        assert SQRT3 * SQRT3 == QuadraticNumber(3)

    def test_rational_folding(self):
        x = QuadraticNumber(1, 2, 1)
        assert x.a == 3 and x.b == 0 and x.d == 1

    def test_zero_surd_canonical(self):
        assert QuadraticNumber(5, 0, 2) == QuadraticNumber(5, 0, 3) == 5

    def test_addition_with_int(self):
        assert 1 + SQRT2 == QuadraticNumber(1, 1, 2)

    def test_division_via_conjugate(self):
        x = QuadraticNumber(1, 1, 2)  # 1 + sqrt2
        y = 1 / x
        assert x * y == QuadraticNumber(1)
        assert y == QuadraticNumber(-1, 1, 2)

    def test_exact_comparison_opposite_signs(self):
        # 3 - 2*sqrt2 > 0 since 9 > 8
        assert QuadraticNumber(3, -2, 2) > 0
        # 1 - sqrt2 < 0
        assert QuadraticNumber(1, -1, 2) < 0
        # 2 - sqrt3 vs 3 - 2*sqrt3: difference is -1 + sqrt3 > 0
        assert QuadraticNumber(2, -1, 3) > QuadraticNumber(3, -2, 3)

    def test_ordering_against_infinity(self):
        assert QuadraticNumber(1000) < INF
        assert INF > QuadraticNumber(1000)
        assert not (INF < QuadraticNumber(1000))

    def test_mixed_discriminant_with_rational_is_fine(self):
        assert SQRT2 + QuadraticNumber(1) == QuadraticNumber(1, 1, 2)

    def test_mixed_discriminant_rejected(self):
        with pytest.raises(ValueError):
            SQRT2 + SQRT3

    def test_float_bridge(self):
        import math
        import random

        rng = random.Random(13)
        for _ in range(10000):
            d = rng.choice((1, 2, 3))
            a = QuadraticNumber(Fraction(rng.randint(-9, 9), rng.randint(1, 5)),
                                Fraction(rng.randint(-9, 9), rng.randint(1, 5)), d)
            b = QuadraticNumber(Fraction(rng.randint(-9, 9), rng.randint(1, 5)),
                                Fraction(rng.randint(-9, 9), rng.randint(1, 5)), d)
            assert abs(float(a + b) - (float(a) + float(b))) < 1e-12
            assert abs(float(a * b) - float(a) * float(b)) < 1e-9
            if (a < b) != (float(a) < float(b)):
                assert abs(float(a) - float(b)) < 1e-9

    def test_parse_and_format(self):
        assert parse_quadratic("3/2") == QuadraticNumber(Fraction(3, 2))
        assert parse_quadratic("1+1/2*sqrt2") == QuadraticNumber(1, Fraction(1, 2), 2)
        assert parse_quadratic("sqrt3") == SQRT3
        assert parse_quadratic("-2") == QuadraticNumber(-2)
        assert parse_quadratic("inf") is INF
        for text in ("3/2", "1+1/2*sqrt2", "inf", "-sqrt3", "2-3*sqrt2"):
            v = parse_quadratic(text)
            assert parse_quadratic(format_value(v)) == v

    def test_hash_consistent_with_rational(self):
        assert hash(QuadraticNumber(Fraction(3, 2))) == hash(Fraction(3, 2))


# ---------------------------------------------------------------------------
# base fields


class TestBaseFields:
    def test_prime_field_ops(self):
        f = PrimeField(7)
        assert f.mul(3, 5) == 1
        assert f.inv(3) == 5
        assert f.add(6, 4) == 3

    def test_prime_field_rejects_composite(self):
        with pytest.raises(ValueError):
            PrimeField(6)

    def test_galois_field_gf4(self):
        f = GaloisField(2, 2)
        # every nonzero element has order dividing 3
        for x in range(1, 4):
            y = f.mul(f.mul(x, x), x)
            assert y == 1
        for x in range(1, 4):
            assert f.mul(x, f.inv(x)) == 1

    def test_galois_field_gf8_frobenius(self):
        f = GaloisField(2, 3)
        for x in range(8):
            assert f.power(x, 8) == x if x else True
        # additive structure: char 2
        for x in range(8):
            assert f.add(x, x) == 0

    def test_galois_field_gf9(self):
        f = GaloisField(3, 2)
        assert f.order == 9
        for x in range(1, 9):
            assert f.mul(x, f.inv(x)) == 1
        # distributivity spot check
        for x, y, z in ((2, 5, 7), (8, 3, 4)):
            assert f.mul(x, f.add(y, z)) == f.add(f.mul(x, y), f.mul(x, z))

    def test_field_from_name(self):
        assert isinstance(base_field_from_name("q"), Rationals)
        assert base_field_from_name("gf2") == PrimeField(2)
        assert base_field_from_name("gf4") == GaloisField(2, 2)
        assert base_field_from_name("gf2^3") == GaloisField(2, 3)
        with pytest.raises(ValueError):
            base_field_from_name("gf6")


# ---------------------------------------------------------------------------
# rational-exponent series


@pytest.fixture
def qfield():
    return SeriesField(Rationals())


@pytest.fixture
def f2field():
    return SeriesField(PrimeField(2))


class TestSeries:
    def test_valuation_min_exponent(self, qfield):
        x = qfield.series({Fraction(1, 2): 1, Fraction(1): 1})
        assert valuation_of(x) == Fraction(1, 2)

    def test_valuation_of_quotient(self, qfield):
        x = qfield.series({1: 1, 2: 1}) / qfield.t(3)
        assert valuation_of(x) == -2

    def test_valuation_of_zero(self, qfield):
        assert valuation_of(qfield.zero) is INF

    def test_add_cancels(self, qfield):
        assert arith("add", qfield.t(), -qfield.t()).is_zero

    def test_half_powers_multiply(self, qfield):
        h = qfield.t(Fraction(1, 2))
        assert arith("mul", h, h) == qfield.t(1)

    def test_invert(self, qfield):
        x = qfield.one + qfield.t()
        y = arith("invert", x)
        assert valuation_of(y) == 0
        assert x * y == qfield.one

    def test_invert_zero_raises(self, qfield):
        with pytest.raises(ZeroDivisionError):
            qfield.zero.inverse()

    def test_canonical_equality_of_quotients(self, qfield):
        t = qfield.t()
        one = qfield.one
        # t / t == 1, (t + t^2)/(t(1+t)) == 1
        assert t / t == one
        assert (t + t * t) / (t * (one + t)) == one
        assert hash(t / t) == hash(one)

    def test_valuation_multiplicative(self, qfield):
        import random

        rng = random.Random(5)
        for _ in range(300):
            x = qfield.random_element(rng, allow_zero=False, allow_fraction=True)
            y = qfield.random_element(rng, allow_zero=False, allow_fraction=True)
            assert valuation_of(x * y) == valuation_of(x) + valuation_of(y)

    def test_valuation_ultrametric(self, qfield):
        import random

        rng = random.Random(6)
        for _ in range(300):
            x = qfield.random_element(rng, allow_fraction=True)
            y = qfield.random_element(rng, allow_fraction=True)
            vx, vy = valuation_of(x), valuation_of(y)
            vs = valuation_of(x + y)
            assert vs >= min(vx, vy)
            if vx != vy:
                assert vs == min(vx, vy)

    def test_exponent_prime_gate(self):
        field = SeriesField(Rationals(), exponent_primes={3})
        field.series({Fraction(1, 3): 1})  # fine
        with pytest.raises(ValueError):
            field.series({Fraction(1, 2): 1})

    def test_parse_literal(self, qfield):
        x = parse_series(qfield, "1*t^(1/2) + -1*t^(2)")
        assert x == qfield.t(Fraction(1, 2)) - qfield.t(2)
        assert parse_series(qfield, "t + 2") == qfield.t() + qfield.constant(2)
        assert parse_series(qfield, "0").is_zero

    def test_format_roundtrip(self, qfield):
        import random

        rng = random.Random(7)
        for _ in range(50):
            x = qfield.random_element(rng)
            assert parse_series(qfield, format_series(x)) == x

    def test_json_roundtrip(self, qfield):
        import random

        rng = random.Random(8)
        for _ in range(50):
            x = qfield.random_element(rng, allow_fraction=True)
            assert series_from_json(qfield, x.to_json()) == x

    def test_gf2_coefficients(self, f2field):
        t = f2field.t()
        assert t + t == f2field.zero
        assert (f2field.one + t) * (f2field.one + t) == f2field.one + t * t


# ---------------------------------------------------------------------------
# quasifields


class TestQuasifield:
    def setup_method(self):
        self.odd = SeriesField(Rationals(), exponent_primes="odd")
        self.sign_spec = QuasifieldSpec(self.odd, SIGN)

    def test_sign_map_on_t(self):
        t = self.odd.t()
        assert apply_automorphism(self.sign_spec, t) == -t

    def test_sign_map_even_numerator_fixed(self):
        x = self.odd.t(Fraction(2, 3))
        assert apply_automorphism(self.sign_spec, x) == x

    def test_identity_automorphism(self):
        spec = QuasifieldSpec(SeriesField(Rationals()), "identity")
        x = spec.field.t(Fraction(1, 2)) + spec.field.one
        assert apply_automorphism(spec, x) == x

    def test_sign_map_is_automorphism(self):
        import random

        rng = random.Random(9)
        for _ in range(100):
            x = self.odd.random_element(rng, allow_fraction=True)
            y = self.odd.random_element(rng, allow_fraction=True)
            ax = apply_automorphism(self.sign_spec, x)
            ay = apply_automorphism(self.sign_spec, y)
            assert apply_automorphism(self.sign_spec, x + y) == ax + ay
            assert apply_automorphism(self.sign_spec, x * y) == ax * ay
            assert valuation_of(ax) == valuation_of(x)
            # order 2
            assert apply_automorphism(self.sign_spec, ax) == x

    def test_norm_of_t_is_minus_t_squared(self):
        t = self.odd.t()
        assert norm_map(self.sign_spec, t) == -(t * t)

    def test_norm_of_one(self):
        assert norm_map(self.sign_spec, self.odd.one) == self.odd.one

    def test_norm_valuation_scales_by_group_order(self):
        a = self.odd.t(Fraction(1, 3))
        assert valuation_of(norm_map(self.sign_spec, a)) == Fraction(2, 3)

    def test_andre_zero(self):
        assert andre_multiply(self.sign_spec, self.odd.zero, self.odd.t()).is_zero

    def test_andre_identity_sigma_is_field_product(self):
        spec = QuasifieldSpec(self.odd, SIGN, sigma=lambda q: 0)
        x = self.odd.t() + self.odd.one
        y = self.odd.t(Fraction(1, 3))
        assert andre_multiply(spec, x, y) == x * y

    def test_andre_twisted_example(self):
        # v(n(t)) = 2, and 2/|G| = 1 is odd, so the twist applies:
        # t . (-t^(1/3)) = -t^(4/3)
        t = self.odd.t()
        cube = self.odd.t(Fraction(1, 3))
        assert andre_multiply(self.sign_spec, t, cube) == -self.odd.t(Fraction(4, 3))

    def test_andre_valuation_additive(self):
        import random

        rng = random.Random(10)
        for _ in range(200):
            a = self.odd.random_element(rng, allow_zero=False, allow_fraction=True)
            b = self.odd.random_element(rng, allow_zero=False, allow_fraction=True)
            prod = andre_multiply(self.sign_spec, a, b)
            assert valuation_of(prod) == valuation_of(a) + valuation_of(b)

    def test_frobenius_shift_char2(self):
        field = SeriesField(PrimeField(2), exponent_primes={2})
        spec = QuasifieldSpec(field, FROBENIUS_SHIFT)
        assert spec.group_order == 2
        u = field.t(Fraction(1, 2))
        # alpha: t^(1/2) -> t^(1/2)/(1 + t^(1/2))
        expected = u / (field.one + u)
        assert apply_automorphism(spec, u) == expected
        # order 2: applying twice is the identity
        x = field.t() + u
        assert apply_automorphism(spec, apply_automorphism(spec, x)) == x

    def test_frobenius_shift_char3(self):
        field = SeriesField(PrimeField(3), exponent_primes={3})
        spec = QuasifieldSpec(field, FROBENIUS_SHIFT)
        assert spec.group_order == 3
        x = field.t(Fraction(2, 3)) + field.one
        y = apply_automorphism(spec, x)
        assert valuation_of(y) == valuation_of(x)
        z = apply_automorphism(spec, y)
        w = apply_automorphism(spec, z)
        assert w == x

    def test_frobenius_shift_is_automorphism(self):
        import random

        field = SeriesField(PrimeField(2), exponent_primes={2})
        spec = QuasifieldSpec(field, FROBENIUS_SHIFT)
        rng = random.Random(11)
        for _ in range(60):
            x = field.random_element(rng, allow_fraction=True)
            y = field.random_element(rng, allow_fraction=True)
            ax = apply_automorphism(spec, x)
            ay = apply_automorphism(spec, y)
            assert apply_automorphism(spec, x + y) == ax + ay
            assert apply_automorphism(spec, x * y) == ax * ay
            assert valuation_of(ax) == valuation_of(x)

    def test_sigma_must_fix_zero(self):
        with pytest.raises(ValueError):
            QuasifieldSpec(self.odd, SIGN, sigma=lambda q: 1)

    def test_default_sigma(self):
        sigma = default_sigma(2)
        assert sigma(Fraction(2)) == 1  # 2/2 = 1 odd
        assert sigma(Fraction(4)) == 0  # 4/2 = 2 even
        assert sigma(Fraction(2, 3)) == 0  # not an integer
        assert sigma(Fraction(0)) == 0

    def test_check_field_spec_passes(self):
        spec = QuasifieldSpec(SeriesField(Rationals()), "identity")
        report = check_valued_quasifield(spec, samples=500, seed=1)
        assert report.passed, str(report)

    def test_check_sign_andre_passes(self):
        report = check_valued_quasifield(self.sign_spec, samples=500, seed=2)
        assert report.passed, str(report)

    def test_check_frobenius_andre_passes(self):
        field = SeriesField(PrimeField(2), exponent_primes={2})
        spec = QuasifieldSpec(field, FROBENIUS_SHIFT)
        report = check_valued_quasifield(spec, samples=200, seed=3)
        assert report.passed, str(report)

    def test_sigma_not_identity_at_unit_fails_with_witness(self):
        spec = QuasifieldSpec(self.odd, SIGN, sigma_on_norm=lambda x: 1)
        report = check_valued_quasifield(spec, samples=100, seed=4)
        assert report.failed
        assert any(it.name == "sigma at unit" and it.status == "fail"
                   for it in report.items)

    def test_sigma_ignoring_valuation_fails_with_witness(self):
        # selector keyed to the support size of the norm rather than its
        # valuation: elements of equal valuation get different twists
        spec = QuasifieldSpec(
            self.odd, SIGN,
            sigma_on_norm=lambda x: 1 if len(x.num) > 1 else 0,
        )
        report = check_valued_quasifield(spec, samples=500, seed=4)
        assert report.failed
        failing = {it.name for it in report.items if it.status == "fail"}
        assert failing & {"V3", "sigma factors through valuation"}
        # a failing item names its witness
        assert any(it.witness is not None for it in report.items
                   if it.status == "fail")
