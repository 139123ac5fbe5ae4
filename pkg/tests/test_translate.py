"""Translation operator: schedules, pair evaluation, algebra, stepping,
word reduction and the building distance."""
import random
from fractions import Fraction

import pytest

from valgon.geometry import (
    LINE, PG2Model, POINT, fano_model, grid_model, hexagon_model,
)
from valgon.scalar import INF, PrimeField, QuadraticNumber, SQRT2, SQRT3, \
    SeriesField
from valgon.translate import (
    Schedule,
    TranslationWord,
    apply_word,
    building_distance,
    building_distance_squared,
    check_C_conditions,
    hexagon_step,
    nonfolded_membership,
    reduce_word,
    residual_distances_from,
    schedule,
    translate,
    translate_pair,
)
from valgon.valuation import (
    check_u_axioms,
    plane_valuation,
    sample_polygon,
    symmetric_table,
    table_valuation,
    tau,
    trivial_valuation,
)

from test_valuation import element_named, grid_valuation


@pytest.fixture(scope="module")
def plane():
    return PG2Model(SeriesField(PrimeField(2)))


@pytest.fixture(scope="module")
def pv(plane):
    return plane_valuation(plane)


@pytest.fixture(scope="module")
def deep_config(plane):
    """A point x and two points x1, x2 with u(x,x1)=2, u(x,x2)=1,
    u(x1,x2)=1 and tau(x, join(x1,x2)) = 3."""
    x = plane.point((1, 0, 0))
    x1 = plane.point(("1", "1*t^(2)", "0"))
    x2 = plane.point(("1", "1*t^(1)", "1*t^(2)"))
    return x, x1, x2


@pytest.fixture(scope="module")
def grid():
    return grid_model(3, 3)


@pytest.fixture(scope="module")
def hexagon():
    return hexagon_model()


class TestSchedule:
    def test_value_at(self):
        s = Schedule([(Fraction(0), 0), (Fraction(2), 2)])
        assert s.value_at(Fraction(0)) == 0
        assert s.value_at(Fraction(3, 2)) == 0
        assert s.value_at(Fraction(2)) == 2
        assert s.value_at(Fraction(100)) == 2

    def test_degenerate_segment_dropped(self):
        s = Schedule([(Fraction(0), 0), (Fraction(0), 2), (Fraction(1), 4)])
        assert s.plateaus == (2, 4)
        assert s.breakpoints == (Fraction(1),)

    def test_descending_rejected(self):
        with pytest.raises(ValueError):
            Schedule([(Fraction(0), 0), (Fraction(2), 2), (Fraction(1), 4)])

    def test_must_start_at_zero(self):
        with pytest.raises(ValueError):
            Schedule([(Fraction(1), 0)])


class TestPlaneSchedules:
    def test_distance_zero_and_one(self, plane, pv):
        p = plane.point((1, 0, 0))
        l = plane.line((0, 0, 1))
        assert schedule(pv, p, p).plateaus == (0,)
        assert schedule(pv, p, l).plateaus == (1,)

    def test_collinear_points(self, plane, pv, deep_config):
        x, x1, _ = deep_config
        s = schedule(pv, x, x1)
        assert s.plateaus == (0, 2)
        assert s.breakpoints == (2,)

    def test_opposite_line(self, plane, pv, deep_config):
        x, x1, x2 = deep_config
        l = plane.join(x1, x2)
        s = schedule(pv, x, l)
        assert s.plateaus == (1, 3)
        assert s.breakpoints == (3,)

    def test_zero_gap_collapses(self, plane, pv):
        p = plane.point((1, 0, 0))
        q = plane.point((0, 1, 0))
        assert schedule(pv, p, q).plateaus == (2,)


class TestGridSchedules:
    def test_unbalanced_opposite(self, grid):
        v = grid_valuation(grid, Fraction(2), Fraction(1))
        x = element_named(grid, POINT, "p11")
        y = element_named(grid, POINT, "p22")
        s = schedule(v, x, y)
        assert s.plateaus == (0, 2, 4)
        assert s.breakpoints == (1, 2)

    def test_equidistant_opposite(self, grid):
        v = grid_valuation(grid, Fraction(2), Fraction(2))
        x = element_named(grid, POINT, "p11")
        y = element_named(grid, POINT, "p22")
        s = schedule(v, x, y)
        assert s.plateaus == (0, 4)
        assert s.breakpoints == (2,)

    def test_point_line_gap(self, grid):
        v = grid_valuation(grid, Fraction(2), Fraction(1))
        x = element_named(grid, POINT, "p11")
        l = element_named(grid, LINE, "r2")
        path = grid.path_between(x, l)
        gap = v.u_of(x, path[2]) + v.u_of(path[1], l) / SQRT2
        s = schedule(v, x, l)
        assert s.plateaus == (1, 3)
        assert s.breakpoints == (gap,)


class TestTranslatePair:
    def test_four_branch_values(self, plane, pv, deep_config):
        x, x1, x2 = deep_config
        assert translate_pair(pv, x, Fraction(1, 2), x1, x2) == Fraction(1, 2)
        assert translate_pair(pv, x, Fraction(3, 2), x1, x2) == 0
        assert translate_pair(pv, x, Fraction(5, 2), x1, x2) == Fraction(1, 2)
        assert translate_pair(pv, x, Fraction(4), x1, x2) == 1

    def test_zero_length_is_identity(self, plane, pv, deep_config):
        x, x1, x2 = deep_config
        assert translate_pair(pv, x, Fraction(0), x1, x2) == pv.u_of(x1, x2)

    def test_equal_pair_infinite(self, plane, pv, deep_config):
        x, x1, _ = deep_config
        assert translate_pair(pv, x, Fraction(1), x1, x1) is INF

    def test_negative_length_rejected(self, plane, pv, deep_config):
        x, x1, x2 = deep_config
        with pytest.raises(ValueError):
            translate_pair(pv, x, Fraction(-1), x1, x2)


class TestTranslationAlgebra:
    def test_additivity_sampled(self, plane, pv):
        rng = random.Random(5)
        x = plane.point((1, 0, 0))
        half = Fraction(1, 2)
        v_half = translate(pv, x, half)
        v_half_half = translate(v_half, x, half)
        v_one = translate(pv, x, Fraction(1))
        for _ in range(30):
            a = plane.random_element(rng, POINT)
            b = plane.random_element(rng, POINT)
            if a == b:
                continue
            assert v_half_half.u_of(a, b) == v_one.u_of(a, b)

    def test_commutativity_incident(self, plane, pv):
        rng = random.Random(7)
        x = plane.point((1, 0, 0))
        l = plane.line((0, 0, 1))
        assert plane.incident(x, l)
        v_xl = translate(translate(pv, x, Fraction(1)), l, Fraction(1, 2))
        v_lx = translate(translate(pv, l, Fraction(1, 2)), x, Fraction(1))
        for _ in range(20):
            a = plane.random_element(rng, POINT)
            b = plane.random_element(rng, POINT)
            if a == b:
                continue
            assert v_xl.u_of(a, b) == v_lx.u_of(a, b)

    def test_translated_valuation_keeps_axioms(self, plane, pv):
        x = plane.point((1, 0, 0))
        moved = translate(pv, x, Fraction(1))
        report = check_u_axioms(moved, samples=40, seed=3)
        assert report.passed, report.render()

    def test_word_records_steps(self, plane, pv):
        x = plane.point((1, 0, 0))
        moved = translate(pv, x, Fraction(1))
        assert moved.word == ((x, Fraction(1)),)


class TestCConditions:
    def test_plane_conditions(self, plane, pv):
        x = plane.point((1, 0, 0))
        report = check_C_conditions(pv, x, samples=25, seed=1)
        assert report.passed, report.render()

    def test_grid_conditions(self, grid):
        v = grid_valuation(grid, Fraction(2), Fraction(1))
        x = element_named(grid, POINT, "p11")
        report = check_C_conditions(v, x, samples=25, seed=2)
        assert report.passed, report.render()


class TestNonfoldedMembership:
    def test_sampled_polygon(self, plane, pv):
        rng = random.Random(11)
        omega = sample_polygon(plane, rng)
        assert nonfolded_membership(pv, omega) in (True, False)

    def test_bad_cycle_rejected(self, plane, pv):
        rng = random.Random(12)
        omega = sample_polygon(plane, rng)
        with pytest.raises(ValueError):
            nonfolded_membership(pv, omega[:-1])


class TestHexagonStep:
    def test_displacement_table(self, hexagon):
        v = trivial_valuation(hexagon)
        rng = random.Random(0)
        x = hexagon.random_element(rng, POINT)
        k = SQRT3 * Fraction(1, 2)
        stepped = hexagon_step(v, x, k)
        coeffs = {0: QuadraticNumber(0), 1: QuadraticNumber(1), 2: SQRT3,
                  3: QuadraticNumber(2), 4: SQRT3, 5: QuadraticNumber(1),
                  6: QuadraticNumber(0)}
        dist, _, _ = hexagon._bfs(x)
        checked = 0
        for y in hexagon.elements():
            d = dist[y]
            nbrs = hexagon.neighbors(y)
            gate = next((a for a in nbrs if dist[a] == d - 1), None)
            others = [a for a in nbrs if a != gate]
            if len(others) < 2:
                continue
            a, b = others[0], others[1]
            assert stepped.u_of(a, b) == coeffs[d] * k
            if gate is not None:
                assert stepped.u_of(gate, a) == 0
            checked += 1
        assert checked > 50

    def test_step_keeps_axioms(self, hexagon):
        v = trivial_valuation(hexagon)
        rng = random.Random(1)
        x = hexagon.random_element(rng, POINT)
        stepped = hexagon_step(v, x, Fraction(1, 4))
        report = check_u_axioms(stepped, samples=60, seed=4)
        assert report.passed, report.render()

    def test_same_direction_accumulates(self, hexagon):
        v = trivial_valuation(hexagon)
        rng = random.Random(2)
        x = hexagon.random_element(rng, POINT)
        one = hexagon_step(v, x, Fraction(1, 4))
        two = hexagon_step(one, x, Fraction(1, 4))
        dist, _, _ = hexagon._bfs(x)
        y = next(e for e in hexagon.elements() if dist[e] == 1)
        gate = next(a for a in hexagon.neighbors(y) if dist[a] == 0)
        others = [a for a in hexagon.neighbors(y) if a != gate]
        assert two.u_of(others[0], others[1]) == Fraction(1, 2)

    def test_wall_crossing_rejected(self, hexagon):
        v = trivial_valuation(hexagon)
        rng = random.Random(3)
        x = hexagon.random_element(rng, POINT)
        stepped = hexagon_step(v, x, Fraction(1, 4))
        line = next(l for l in hexagon.neighbors(x))
        x2 = next(p for p in hexagon.neighbors(line) if p != x)
        with pytest.raises(ValueError):
            hexagon_step(stepped, x2, Fraction(3, 8))

    def test_small_redirect_allowed(self, hexagon):
        v = trivial_valuation(hexagon)
        rng = random.Random(3)
        x = hexagon.random_element(rng, POINT)
        stepped = hexagon_step(v, x, Fraction(1, 4))
        line = next(l for l in hexagon.neighbors(x))
        x2 = next(p for p in hexagon.neighbors(line) if p != x)
        redirected = hexagon_step(stepped, x2, Fraction(1, 8))
        assert redirected.word == ((x, Fraction(1, 4)), (x2, Fraction(1, 8)))

    def test_scaling_guard(self, hexagon):
        from valgon.valuation import Valuation
        bad = Valuation(hexagon, lambda a, b: Fraction(1), name="bad")
        rng = random.Random(4)
        x = hexagon.random_element(rng, POINT)
        with pytest.raises(ValueError):
            hexagon_step(bad, x, Fraction(1, 4))

    def test_length_bounds(self, hexagon):
        v = trivial_valuation(hexagon)
        rng = random.Random(5)
        x = hexagon.random_element(rng, POINT)
        l = hexagon.random_element(rng, LINE)
        with pytest.raises(ValueError):
            hexagon_step(v, x, SQRT3)  # > sqrt3/2 for a point
        with pytest.raises(ValueError):
            hexagon_step(v, l, Fraction(3, 2))  # > 1 for a line
        assert hexagon_step(v, l, Fraction(1)).word


class TestReduceWord:
    def test_empty_word(self, plane, pv):
        p, k, l, m = reduce_word(pv, [])
        assert plane.incident(p, l)
        assert k == 0 and m == 0

    def test_single_step(self, plane, pv):
        x = plane.point((1, 0, 0))
        p, k, l, m = reduce_word(pv, [(x, Fraction(2))])
        assert plane.incident(p, l)
        assert {p, l} >= {x}
        assert k + m == 2

    def test_random_words_match(self, plane, pv):
        rng = random.Random(21)
        pool = [plane.random_element(rng) for _ in range(8)]
        probes = []
        while len(probes) < 6:
            a = plane.random_element(rng, POINT)
            b = plane.random_element(rng, POINT)
            if a != b:
                probes.append((a, b))
        for trial in range(4):
            steps = [(rng.choice(pool), Fraction(rng.randrange(1, 4), 2))
                     for _ in range(3)]
            p, k, l, m = reduce_word(pv, steps)
            assert plane.incident(p, l)
            total = sum(length for _, length in steps)
            assert k + m <= total
            original = apply_word(pv, steps)
            reduced = apply_word(pv, [(p, k), (l, m)])
            for a, b in probes:
                assert original.u_of(a, b) == reduced.u_of(a, b), (
                    trial, steps, (p, k, l, m), (a, b))

    def test_grid_word(self, grid):
        v = grid_valuation(grid, Fraction(2), Fraction(1))
        x = element_named(grid, POINT, "p11")
        y = element_named(grid, POINT, "p22")
        steps = [(x, Fraction(1, 2)), (y, Fraction(1, 2))]
        p, k, l, m = reduce_word(v, steps)
        assert grid.incident(p, l)
        assert k + m <= 1
        original = apply_word(v, steps)
        reduced = apply_word(v, [(p, k), (l, m)])
        rng = random.Random(9)
        for _ in range(8):
            a = grid.random_element(rng, POINT)
            b = grid.random_element(rng, POINT)
            if a == b or grid.distance(a, b) != 2:
                continue
            assert original.u_of(a, b) == reduced.u_of(a, b)

    def test_word_type(self, plane, pv):
        x = plane.point((1, 0, 0))
        word = TranslationWord([(x, Fraction(1))])
        assert word.total_length() == 1
        with pytest.raises(ValueError):
            TranslationWord([(x, Fraction(-1))])


class TestBuildingDistance:
    def test_degenerate(self):
        assert building_distance(Fraction(3), Fraction(0), 3) == 3
        assert building_distance(Fraction(0), Fraction(5), 4) == 5

    def test_equilateral(self):
        assert building_distance(Fraction(1), Fraction(1), 3) == 1

    def test_square_angle(self):
        d = building_distance(Fraction(1), Fraction(1), 4)
        assert isinstance(d, float)
        assert abs(d * d - float(building_distance_squared(
            Fraction(1), Fraction(1), 4))) < 1e-12

    def test_quasi_triangle_factor_two(self):
        rng = random.Random(13)
        for n in (3, 4, 6):
            for _ in range(50):
                k = Fraction(rng.randrange(0, 9), 2)
                l = Fraction(rng.randrange(0, 9), 2)
                j = Fraction(rng.randrange(0, 9), 2)
                duv = building_distance(k, l, n)
                duw = building_distance(k, j, n)
                dwv = building_distance(j, l, n)
                assert float(duv) <= 2 * (float(duw) + float(dwv)) + 1e-12
