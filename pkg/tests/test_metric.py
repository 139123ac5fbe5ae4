"""Ultrametric planes: symbolic powers, round trips, axiom checks."""
import random
from fractions import Fraction

import pytest

from valgon.geometry import PG2Model, POINT, fano_model, grid_model
from valgon.metric import (
    MetricPlane,
    PowerValue,
    _exponent_from_distance,
    check_M_axioms,
    from_metric,
    to_metric,
)
from valgon.scalar import INF, PrimeField, SeriesField
from valgon.valuation import plane_valuation, trivial_valuation


@pytest.fixture(scope="module")
def plane():
    return PG2Model(SeriesField(PrimeField(2)))


@pytest.fixture(scope="module")
def pv(plane):
    return plane_valuation(plane)


class TestPowerValue:
    def test_numeric(self):
        assert PowerValue(2, Fraction(1)).numeric() == 0.5
        assert PowerValue(2, Fraction(0)).numeric() == 1.0
        assert PowerValue(2, INF).numeric() == 0.0

    def test_ordering_reverses_exponent(self):
        small = PowerValue(2, Fraction(3))
        large = PowerValue(2, Fraction(1))
        assert small < large
        assert PowerValue(2, INF) <= small

    def test_base_must_exceed_one(self):
        with pytest.raises(ValueError):
            PowerValue(1, Fraction(1))


class TestExponentRecovery:
    def test_integer_powers(self):
        assert _exponent_from_distance(2, Fraction(1, 8)) == 3
        assert _exponent_from_distance(2, Fraction(1)) == 0
        assert _exponent_from_distance(2, 0) is INF

    def test_fractional_exponent(self):
        assert _exponent_from_distance(4, Fraction(1, 2)) == Fraction(1, 2)

    def test_non_power_rejected(self):
        with pytest.raises(ValueError):
            _exponent_from_distance(2, Fraction(1, 3))

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            _exponent_from_distance(2, Fraction(3, 2))


class TestToMetric:
    def test_distances(self, plane, pv):
        m = to_metric(pv, 2)
        p = plane.point((1, 0, 0))
        q = plane.point((0, 1, 0))
        deep = plane.point(("1", "1*t^(1)", "0"))
        assert m.point_distance(p, q) == PowerValue(2, Fraction(0))
        assert m.point_distance(p, deep).numeric() == 0.5
        assert m.point_distance(p, p).numeric() == 0.0

    def test_angles(self, plane, pv):
        m = to_metric(pv, 2)
        l1 = plane.line((0, 0, 1))
        l2 = plane.line((0, 1, 0))
        assert m.angle_sine(l1, l2).numeric() == 1.0
        import math
        assert abs(m.angle(l1, l2) - math.pi / 2) < 1e-12

    def test_wrong_gonality_rejected(self):
        grid = grid_model(3, 3)
        with pytest.raises(ValueError):
            to_metric(trivial_valuation(grid), 2)

    def test_base_must_exceed_one(self, pv):
        with pytest.raises(ValueError):
            to_metric(pv, 1)


class TestRoundTrip:
    def test_exponents_survive(self, plane, pv):
        m = to_metric(pv, 2)
        back = from_metric(m)
        rng = random.Random(3)
        for _ in range(40):
            p = plane.random_element(rng, POINT)
            q = plane.random_element(rng, POINT)
            if p == q:
                continue
            assert back.u_of(p, q) == pv.u_of(p, q)
        again = to_metric(back, 2)
        for _ in range(20):
            l = plane.random_element(rng)
            k = plane.random_element(rng)
            if l == k or l.kind != k.kind:
                continue
            if l.kind == POINT:
                assert again.point_distance(l, k) == m.point_distance(l, k)
            else:
                assert again.angle_sine(l, k) == m.angle_sine(l, k)

    def test_raw_distance_rejected_on_readback(self, plane, pv):
        m = to_metric(pv, 2)
        p = plane.point((1, 0, 0))
        q = plane.point((0, 1, 0))
        m.override_distance(p, q, Fraction(1, 3))
        back = from_metric(m)
        with pytest.raises(ValueError):
            back.u_of(p, q)

    def test_power_distance_recovered(self, plane, pv):
        m = to_metric(pv, 2)
        p = plane.point((1, 0, 0))
        q = plane.point((0, 1, 0))
        m.override_distance(p, q, Fraction(1, 8))
        assert from_metric(m).u_of(p, q) == 3


class TestAxioms:
    def test_plane_valuation_passes(self, plane, pv):
        m = to_metric(pv, 2)
        report = check_M_axioms(m, samples=120, seed=1)
        assert report.passed, report.render()

    def test_trivial_fano_passes(self):
        v = trivial_valuation(fano_model())
        m = to_metric(v, 2)
        report = check_M_axioms(m, samples=120, seed=2)
        assert report.passed, report.render()

    def test_corrupted_distance_witnessed(self, plane, pv):
        m = to_metric(pv, 2)
        p = plane.point((1, 0, 0))
        q = plane.point(("1", "1*t^(1)", "0"))
        assert pv.u_of(p, q) == 1
        m.override_exponent(p, q, Fraction(5))
        report = check_M_axioms(m, samples=120, seed=3)
        assert report.failed, report.render()
        bad = [item for item in report.items if item.status == "fail"]
        assert any(item.witness is not None for item in bad)
