"""Pencil trees: realization, axioms, export, base-point displacement."""
import random
from fractions import Fraction

import pytest

from valgon.geometry import LINE, PG2Model, POINT, hexagon_model
from valgon.scalar import INF, PrimeField, SeriesField, SQRT3
from valgon.translate import hexagon_step, translate_pair
from valgon.tree import (
    TreeSample,
    basepoint_displacement,
    check_tree_axioms,
    displaced_value,
    pencil_tree,
    tree_json_text,
)
from valgon.valuation import plane_valuation, trivial_valuation
from valgon.weights import canonical_weights


@pytest.fixture(scope="module")
def plane():
    return PG2Model(SeriesField(PrimeField(2)))


@pytest.fixture(scope="module")
def pv(plane):
    return plane_valuation(plane)


def simple_tree():
    table = {
        ("e", "f"): Fraction(1), ("f", "e"): Fraction(1),
        ("e", "g"): Fraction(0), ("g", "e"): Fraction(0),
        ("f", "g"): Fraction(0), ("g", "f"): Fraction(0),
    }
    return TreeSample(["e", "f", "g"], table)


class TestTreeSample:
    def test_w_lookup(self):
        tree = simple_tree()
        assert tree.w("e", "f") == 1
        assert tree.w("e", "g") == 0
        assert tree.w("e", "e") is INF

    def test_cap_default(self):
        assert simple_tree().cap == 2

    def test_one_branch_point(self):
        tree = simple_tree()
        vertices, edges, base = tree.realize()
        branch = [d for d, cluster in vertices
                  if len(cluster) == 2 and d < tree.cap]
        assert branch == [Fraction(1)]
        assert vertices[base][0] == 0

    def test_star_when_all_zero(self):
        table = {(a, b): Fraction(0)
                 for a in "efg" for b in "efg" if a != b}
        tree = TreeSample(list("efg"), table)
        vertices, edges, base = tree.realize()
        # base plus three leaves, nothing else
        assert len(vertices) == 4
        assert all(a == base for a, _, _ in edges)

    def test_two_ends_single_segment(self):
        table = {("e", "f"): Fraction(0), ("f", "e"): Fraction(0)}
        tree = TreeSample(["e", "f"], table)
        vertices, edges, base = tree.realize()
        assert len(edges) == 2

    def test_infinite_off_diagonal_rejected(self):
        table = {("e", "f"): INF, ("f", "e"): INF}
        with pytest.raises(ValueError):
            TreeSample(["e", "f"], table)

    def test_asymmetric_rejected(self):
        table = {("e", "f"): Fraction(1), ("f", "e"): Fraction(2)}
        with pytest.raises(ValueError):
            TreeSample(["e", "f"], table)


class TestAxioms:
    def test_simple_tree_passes(self):
        report = check_tree_axioms(simple_tree())
        assert report.passed, report.render()

    def test_bad_triple_fails(self):
        table = {
            ("e", "f"): Fraction(1), ("f", "e"): Fraction(1),
            ("f", "g"): Fraction(2), ("g", "f"): Fraction(2),
            ("e", "g"): Fraction(0), ("g", "e"): Fraction(0),
        }
        tree = TreeSample(["e", "f", "g"], table)
        report = check_tree_axioms(tree)
        assert not report.passed
        assert any(item.status == "fail" and "tree property" in item.name
                   for item in report.items)

    def test_pencil_tree_passes(self, plane, pv):
        z = plane.line((0, 0, 1))
        coords = ["0", "1*t^(1)", "1*t^(2)", "1", "1+1*t^(1)",
                  "1*t^(1)+1*t^(2)"]
        ends = [plane.point(("1", a, "0")) for a in coords]
        tree = pencil_tree(pv, z, ends)
        report = check_tree_axioms(tree)
        assert report.passed, report.render()

    def test_non_incident_end_rejected(self, plane, pv):
        z = plane.line((0, 0, 1))
        with pytest.raises(ValueError):
            pencil_tree(pv, z, [plane.point((1, 0, 0)),
                                plane.point((0, 0, 1))])


class TestExport:
    def test_json_round_trip(self, plane, pv):
        z = plane.line((0, 0, 1))
        ends = [plane.point(("1", a, "0"))
                for a in ("0", "1", "1*t^(1)", "1*t^(2)")]
        tree = pencil_tree(pv, z, ends)
        import json
        loaded = TreeSample.from_json(json.loads(tree_json_text(tree)))
        assert loaded.cap == tree.cap
        for i in range(4):
            for j in range(4):
                if i != j:
                    assert loaded.pairwise_w[(i, j)] == tree.pairwise_w[(i, j)]

    def test_dot_export(self):
        dot = simple_tree().to_dot()
        assert dot.startswith("graph pencil_tree {")
        assert "base" in dot and "--" in dot


class TestDisplacement:
    def test_opposite_target_no_move(self, plane, pv):
        x = plane.point((1, 0, 0))
        z = plane.line((1, 0, 0))  # x not on z
        assert plane.distance(x, z) == 3
        direction, length = basepoint_displacement(pv, z, x, Fraction(2))
        assert direction is None and length == 0

    def test_incident_full_rate(self, plane, pv):
        x = plane.point((1, 0, 0))
        z = plane.line((0, 0, 1))
        direction, length = basepoint_displacement(pv, z, x, Fraction(2))
        assert direction == x
        assert length == 2

    def test_hexagon_table_row(self):
        model = hexagon_model()
        v = trivial_valuation(model)
        rng = random.Random(0)
        x = model.random_element(rng, POINT)
        dist, _, _ = model._bfs(x)
        z = next(e for e in model.elements() if dist[e] == 3)
        k = Fraction(1, 4)
        direction, length = basepoint_displacement(v, z, x, k)
        assert length == 2 * k
        assert model.incident(direction, z)

    def test_plane_consistency_incident(self, plane, pv):
        x = plane.point((1, 0, 0))
        z = plane.line((0, 0, 1))
        coords = ["1*t^(1)", "1*t^(2)", "1", "1+1*t^(1)"]
        ends = [x] + [plane.point(("1", a, "0")) for a in coords]
        tree = pencil_tree(pv, z, ends)
        for t in (Fraction(1, 4), Fraction(1, 2), Fraction(3, 2), Fraction(3)):
            direction, length = basepoint_displacement(pv, z, x, t)
            for e in ends:
                for f in ends:
                    if e == f:
                        continue
                    expected = translate_pair(pv, x, t, e, f)
                    assert displaced_value(tree, direction, length, e, f) \
                        == expected, (t, e, f)

    def test_plane_consistency_distance_two(self, plane, pv):
        x = plane.point((1, 0, 0))
        z = plane.point((0, 1, 0))
        assert pv.u_of(x, z) == 0
        ends = [plane.line((0, 0, 1)), plane.line((1, 0, 1)),
                plane.line(("1*t^(1)", "0", "1")),
                plane.line(("1", "0", "1*t^(2)"))]
        tree = pencil_tree(pv, z, ends)
        for t in (Fraction(1, 2), Fraction(2), Fraction(4)):
            direction, length = basepoint_displacement(pv, z, x, t)
            assert direction == plane.join(x, z)
            for e in ends:
                for f in ends:
                    if e == f:
                        continue
                    expected = translate_pair(pv, x, t, e, f)
                    assert displaced_value(tree, direction, length, e, f) \
                        == expected, (t, e, f)

    def test_hexagon_consistency(self):
        model = hexagon_model()
        v = trivial_valuation(model)
        rng = random.Random(1)
        x = model.random_element(rng, POINT)
        k = Fraction(1, 4)
        stepped = hexagon_step(v, x, k)
        dist, _, _ = model._bfs(x)
        checked = 0
        for d in (1, 2, 3, 4, 5):
            z = next(e for e in model.elements() if dist[e] == d)
            ends = model.neighbors(z)
            tree = pencil_tree(v, z, ends)
            direction, length = basepoint_displacement(v, z, x, k)
            for e in ends:
                for f in ends:
                    if e == f:
                        continue
                    assert displaced_value(tree, direction, length, e, f) \
                        == stepped.u_of(e, f), (d, e, f)
                    checked += 1
        assert checked > 20

    def test_displaced_tree_is_still_a_tree(self, plane, pv):
        x = plane.point((1, 0, 0))
        z = plane.line((0, 0, 1))
        coords = ["1*t^(1)", "1*t^(2)", "1"]
        ends = [x] + [plane.point(("1", a, "0")) for a in coords]
        tree = pencil_tree(pv, z, ends)
        direction, length = basepoint_displacement(pv, z, x, Fraction(1))
        table = {}
        for e in ends:
            for f in ends:
                if e != f:
                    table[(e, f)] = displaced_value(tree, direction, length,
                                                    e, f)
        moved = TreeSample(ends, table, pencil=z)
        report = check_tree_axioms(moved)
        assert report.passed, report.render()
