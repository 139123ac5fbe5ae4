"""Real trees carried by pencils.

Every pencil of a valuation carries a tree: each end is a half-line
through the base point and two ends share an initial segment of length
equal to their pair value.  Only finite samples of ends are stored; the
tree is realized explicitly (vertices and weighted edges) for export and
round-trip checks.  Translating the valuation displaces the base point
toward the projection of the translation target.
"""
from __future__ import annotations

import itertools
import json
from fractions import Fraction

from .geometry import Element
from .report import CheckReport
from .scalar import INF, QuadraticNumber, format_value, is_infinite, \
    parse_quadratic
from .valuation import Valuation
from .weights import canonical_weights

ZERO = Fraction(0)


class TreeSample:
    """A finite sample of a pencil tree: ends, their exact pairwise
    values, and the base point at depth zero.  Segments are truncated at
    ``cap`` (strictly larger than every finite pair value)."""

    __slots__ = ("pencil", "ends", "pairwise_w", "cap")

    def __init__(self, ends, pairwise_w, cap=None, pencil=None):
        ends = list(ends)
        if len(set(ends)) != len(ends):
            raise ValueError("ends must be distinct")
        if len(ends) < 2:
            raise ValueError("a tree sample needs at least two ends")
        table = {}
        finite = []
        for i, e in enumerate(ends):
            for j, f in enumerate(ends):
                if i == j:
                    continue
                key = (i, j) if (i, j) in pairwise_w else None
                value = pairwise_w[(i, j)] if key else pairwise_w[(e, f)]
                if is_infinite(value):
                    raise ValueError("distinct ends cannot share all depths")
                if value < 0:
                    raise ValueError("pair values must be non-negative")
                table[(i, j)] = value
                finite.append(value)
        for i in range(len(ends)):
            for j in range(i + 1, len(ends)):
                if table[(i, j)] != table[(j, i)]:
                    raise ValueError("pair values must be symmetric")
        object.__setattr__(self, "pencil", pencil)
        object.__setattr__(self, "ends", tuple(ends))
        object.__setattr__(self, "pairwise_w", table)
        if cap is None:
            cap = max(finite) + 1
        if any(value >= cap for value in finite):
            raise ValueError("cap must exceed every pair value")
        object.__setattr__(self, "cap", cap)

    def __setattr__(self, name, value):
        raise AttributeError("TreeSample is immutable")

    def w(self, e, f):
        if e == f:
            return INF
        i = self.ends.index(e)
        j = self.ends.index(f)
        return self.pairwise_w[(i, j)]

    # -- explicit realization

    def realize(self):
        """The quotient as vertices and weighted edges.

        Vertices are (depth, frozenset of end indices still glued at that
        depth); the base point is the depth-0 vertex of all ends and every
        end gets a leaf at depth ``cap``.
        """
        vertices = []
        edges = []

        def add_vertex(depth, cluster):
            vertices.append((depth, cluster))
            return len(vertices) - 1

        def grow(parent, depth, cluster):
            if len(cluster) == 1:
                leaf = add_vertex(self.cap, cluster)
                edges.append((parent, leaf, self.cap - depth))
                return
            split = min(self.pairwise_w[(i, j)]
                        for i in cluster for j in cluster if i < j)
            # partition: i ~ j when they stay glued strictly past the split
            remaining = sorted(cluster)
            groups = []
            while remaining:
                head = remaining.pop(0)
                group = {head}
                rest = []
                for other in remaining:
                    if self.pairwise_w[(head, other)] > split:
                        group.add(other)
                    else:
                        rest.append(other)
                remaining = rest
                groups.append(frozenset(group))
            if split > depth or parent is None:
                node = add_vertex(split, cluster)
                if parent is not None:
                    edges.append((parent, node, split - depth))
            else:
                node = parent
            for group in groups:
                grow(node, split, group)

        everyone = frozenset(range(len(self.ends)))
        base = add_vertex(ZERO, everyone)
        first_split = min(self.pairwise_w.values()) if len(everyone) > 1 \
            else self.cap
        if first_split == 0:
            # base point is itself the first branch point
            grow_from = base
            remaining = sorted(everyone)
            groups = []
            while remaining:
                head = remaining.pop(0)
                group = {head}
                rest = []
                for other in remaining:
                    if self.pairwise_w[(head, other)] > 0:
                        group.add(other)
                    else:
                        rest.append(other)
                remaining = rest
                groups.append(frozenset(group))
            for group in groups:
                grow(grow_from, ZERO, group)
        else:
            grow(base, ZERO, everyone)
        return vertices, edges, base

    def read_back(self):
        """Pair values recovered from the realization: the depth of the
        deepest vertex still containing both ends."""
        vertices, _, _ = self.realize()
        table = {}
        count = len(self.ends)
        for i in range(count):
            for j in range(count):
                if i == j:
                    continue
                depth = max(d for d, cluster in vertices
                            if i in cluster and j in cluster and d < self.cap)
                table[(i, j)] = depth
        return table

    def leaf_distance(self, e, f):
        """Realized metric between the two leaves."""
        if e == f:
            return ZERO
        return 2 * (self.cap - self.w(e, f))

    # -- export

    def to_json(self) -> dict:
        names = [f"{e.kind}:{e.payload}" if isinstance(e, Element) else str(e)
                 for e in self.ends]
        return {
            "pencil": (f"{self.pencil.kind}:{self.pencil.payload}"
                       if isinstance(self.pencil, Element) else self.pencil),
            "ends": names,
            "cap": format_value(self.cap),
            "w": {f"{i},{j}": format_value(value)
                  for (i, j), value in self.pairwise_w.items() if i < j},
        }

    @classmethod
    def from_json(cls, data) -> "TreeSample":
        ends = list(data["ends"])
        table = {}
        for key, text in data["w"].items():
            i, j = (int(part) for part in key.split(","))
            value = parse_quadratic(text)
            table[(i, j)] = value
            table[(j, i)] = value
        return cls(ends, table, cap=parse_quadratic(data["cap"]),
                   pencil=data.get("pencil"))

    def to_dot(self) -> str:
        vertices, edges, base = self.realize()
        lines = ["graph pencil_tree {"]
        for idx, (depth, cluster) in enumerate(vertices):
            if idx == base:
                label = "base"
                shape = "box"
            elif depth == self.cap:
                (only,) = cluster
                end = self.ends[only]
                label = (f"{end.kind}:{end.payload}"
                         if isinstance(end, Element) else str(end))
                shape = "ellipse"
            else:
                label = f"depth {format_value(depth)}"
                shape = "point"
            lines.append(f'  v{idx} [label="{label}", shape={shape}];')
        for a, b, length in edges:
            lines.append(f'  v{a} -- v{b} [label="{format_value(length)}"];')
        lines.append("}")
        return "\n".join(lines)

    def __repr__(self):
        return (f"TreeSample({len(self.ends)} ends, "
                f"cap={format_value(self.cap)})")


def pencil_tree(v: Valuation, z: Element, ends) -> TreeSample:
    """The tree of the pencil of z, sampled at the given ends."""
    ends = list(ends)
    for e in ends:
        if not v.model.incident(e, z):
            raise ValueError(f"{e!r} is not in the pencil of {z!r}")
    table = {}
    for e in ends:
        for f in ends:
            if e != f:
                table[(e, f)] = v.u_of(e, f)
    return TreeSample(ends, table, pencil=z)


def basepoint_displacement(v: Valuation, z: Element, x: Element, t):
    """Direction end and length of the base-point move of the pencil
    tree of z when v is translated toward x over length t: the base moves
    toward the projection of x by t * sin(d(x,z) pi/n) / sin(pi/n)."""
    model = v.model
    if x == z:
        return None, ZERO
    d = model.distance(x, z)
    length = t * canonical_weights(model.n).entry(d)
    if d == model.n or length == 0:
        return None, ZERO
    return model.projection(x, z), length


def displaced_value(tree: TreeSample, direction, length, e, f):
    """Pair value of e, f read from the tree after moving the base point
    toward the given end by the given length."""
    if e == f:
        return INF
    old = tree.w(e, f)
    if direction is None or length == 0:
        return old
    if e == direction:
        return max(ZERO, tree.w(f, direction) - length)
    if f == direction:
        return max(ZERO, tree.w(e, direction) - length)
    return (old + length - min(length, tree.w(e, direction))
            - min(length, tree.w(f, direction)))


def check_tree_axioms(tree: TreeSample) -> CheckReport:
    """Exhaustive triple property, realization round trip, and the
    four-point condition on the realized metric."""
    report = CheckReport(f"tree on {len(tree.ends)} ends")
    count = len(tree.ends)

    witness = None
    triples = 0
    for i in range(count):
        for j in range(count):
            for k in range(count):
                if len({i, j, k}) != 3:
                    continue
                triples += 1
                wij = tree.pairwise_w[(i, j)]
                wjk = tree.pairwise_w[(j, k)]
                wik = tree.pairwise_w[(i, k)]
                if wij < wjk and wik != wij:
                    witness = (tree.ends[i], tree.ends[j], tree.ends[k])
                    break
            if witness:
                break
        if witness:
            break
    report.check("branch depths satisfy the tree property", witness is None,
                 witness=witness, count=triples)

    recovered = tree.read_back()
    mismatch = next((pair for pair, value in recovered.items()
                     if tree.pairwise_w[pair] != value), None)
    report.check("realization round trip is exact", mismatch is None,
                 witness=mismatch, count=len(recovered))

    four_witness = None
    quadruples = 0
    if witness is None:
        for quad in itertools.combinations(range(count), 4):
            quadruples += 1
            i, j, k, l = (tree.ends[q] for q in quad)
            sums = sorted([
                tree.leaf_distance(i, j) + tree.leaf_distance(k, l),
                tree.leaf_distance(i, k) + tree.leaf_distance(j, l),
                tree.leaf_distance(i, l) + tree.leaf_distance(j, k),
            ])
            if sums[1] != sums[2]:
                four_witness = quad
                break
    report.check("four-point condition on the realized metric",
                 four_witness is None, witness=four_witness,
                 count=quadruples)
    return report


def tree_json_text(tree: TreeSample) -> str:
    return json.dumps(tree.to_json(), indent=2, sort_keys=True)
