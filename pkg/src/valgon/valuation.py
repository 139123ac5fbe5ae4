"""Valuations on generalized polygons.

A valuation assigns an exact non-negative value (or infinity on the
diagonal) to every pair of elements at distance two.  This module houses
the axioms the function must satisfy, the weighted path sum between
opposite elements, zero-partner search, completion of zero-valuation
paths to non-folded polygons, residual equivalence and the quotient
geometry it induces, and the equidistance analysis used for gonality 4.
"""
from __future__ import annotations

import itertools
import random
from fractions import Fraction

from .geometry import Element, FiniteModel, PG2Model, POINT, LINE
from .report import CheckReport
from .scalar import (
    INF,
    QuadraticNumber,
    SQRT2,
    format_value,
    is_infinite,
    parse_quadratic,
)
from .weights import canonical_weights

ZERO = Fraction(0)


# ---------------------------------------------------------------------------
# the valuation object


class Valuation:
    """A valuation on a polygon model.

    ``rule(x, y)`` supplies the value for distinct elements of the same
    kind at distance two; everything else (diagonal, adjacency errors,
    memoization) is handled here.  ``word`` records the translation steps
    a derived valuation is built from (empty for base valuations).
    """

    def __init__(self, model, rule, name="base", weights=None, word=()):
        self.model = model
        self.n = model.n
        self.rule = rule
        self.name = name
        self.weights = weights if weights is not None else canonical_weights(model.n)
        self.word = tuple(word)
        self._memo = {}

    def u_of(self, x: Element, y: Element):
        if x.kind != y.kind:
            raise ValueError("u is defined on pairs of the same kind")
        if x == y:
            return INF
        key = (x, y)
        if key in self._memo:
            return self._memo[key]
        if self.model.distance(x, y) != 2:
            raise ValueError(f"{x!r} and {y!r} are not at distance two")
        value = self.rule(x, y)
        self._memo[key] = value
        return value

    def __repr__(self):
        tail = f", word={len(self.word)} steps" if self.word else ""
        return f"Valuation({self.name} on {self.model!r}{tail})"


def trivial_valuation(model, name="trivial") -> Valuation:
    return Valuation(model, lambda x, y: ZERO, name=name)


def plane_valuation(model: PG2Model, name="plane") -> Valuation:
    """Valuation on PG(2, K): minimum valuation over the cross product
    of the two normalized coordinate triples."""

    def rule(x, y):
        cross = model.cross(x, y)
        return min(c.valuation() for c in cross if not c.is_zero)

    return Valuation(model, rule, name=name)


# -- table-backed valuations (finite models) --------------------------------


def pair_key(x: Element, y: Element) -> str:
    return f"{x.kind}:{x.payload}|{y.kind}:{y.payload}"


def table_valuation(model, table, name="table") -> Valuation:
    """Valuation given by an explicit directed table.

    ``table`` maps either ``(Element, Element)`` pairs or ``pair_key``
    strings to exact values (or their string forms).  Both directions of
    a pair must be present (builders below write them symmetrically); an
    asymmetric table is representable so that the axiom checker can name
    the broken pair.
    """
    resolved = {}
    for key, value in table.items():
        if isinstance(key, tuple):
            key = pair_key(*key)
        if isinstance(value, str):
            value = parse_quadratic(value)
        resolved[key] = value

    def rule(x, y):
        key = pair_key(x, y)
        if key not in resolved:
            raise KeyError(f"valuation table has no entry for {key}")
        return resolved[key]

    v = Valuation(model, rule, name=name)
    v.table = resolved
    return v


def symmetric_table(entries) -> dict:
    """Expand {(x, y): value} to a directed table with both orders."""
    out = {}
    for (x, y), value in entries.items():
        out[pair_key(x, y)] = value
        out[pair_key(y, x)] = value
    return out


def adjacent_pairs(model: FiniteModel):
    """All ordered same-kind pairs at distance two of a finite model."""
    seen = set()
    for z in model.elements():
        pencil = model.neighbors(z)
        for a, b in itertools.combinations(pencil, 2):
            for x, y in ((a, b), (b, a)):
                if (x, y) not in seen:
                    seen.add((x, y))
                    yield x, y


def valuation_table_json(v: Valuation) -> dict:
    """Serialize a finite-model valuation as {pair key: exact string}."""
    if not isinstance(v.model, FiniteModel):
        raise ValueError("only finite models have enumerable tables")
    return {pair_key(x, y): format_value(v.u_of(x, y))
            for x, y in adjacent_pairs(v.model)}


def valuation_from_json(model: FiniteModel, data, name="table") -> Valuation:
    return table_valuation(model, data, name=name)


# ---------------------------------------------------------------------------
# weighted path sums


def path_weight_sum(v: Valuation, path):
    """Sum of a_i * u(x_{i-1}, x_{i+1}) along a path starting at x_0."""
    total = QuadraticNumber(0)
    for i in range(1, len(path) - 1):
        value = v.u_of(path[i - 1], path[i + 1])
        if is_infinite(value):
            raise ValueError("stammering path: repeated element")
        total = total + v.weights.entry(i) * value
    return total


def tau(v: Valuation, x: Element, y: Element):
    """Weighted valuation sum between opposite elements, computed along
    two independent shortest paths; equality of the two sums is asserted."""
    model = v.model
    if model.distance(x, y) != v.n:
        raise ValueError("tau needs an opposite pair")
    sums = []
    for z in model.pencil_sample(x, 2, seed=17):
        path = [x] + model.path_between(z, y)
        sums.append(path_weight_sum(v, path))
    if len(sums) == 2 and sums[0] != sums[1]:
        raise ArithmeticError(
            f"path-dependent weighted sum: {sums[0]!r} != {sums[1]!r}")
    return sums[0]


def zero_partner(v: Valuation, p: Element, L: Element,
                 samples: int = 24, seed: int = 0) -> Element:
    """An element q incident with L with u(p, q) = 0 (p incident L)."""
    model = v.model
    if not model.incident(p, L):
        raise ValueError("zero_partner needs an incident pair")
    for q in model.pencil_sample(L, samples, seed=seed):
        if q != p and v.u_of(p, q) == 0:
            return q
    raise LookupError(
        f"no zero partner for {p!r} on {L!r} within {samples} samples")


def cycle_side_values(v: Valuation, cycle):
    """u(x_{i-1}, x_{i+1}) around a closed path given as 2n elements."""
    m = len(cycle)
    return [v.u_of(cycle[i - 1], cycle[(i + 1) % m]) for i in range(m)]


def is_nonfolded(v: Valuation, cycle) -> bool:
    return all(value == 0 for value in cycle_side_values(v, cycle))


def _validate_cycle(model, cycle):
    m = len(cycle)
    if m != 2 * model.n or len(set(cycle)) != m:
        raise ValueError("a closed polygon needs 2n distinct elements")
    for i in range(m):
        if not model.incident(cycle[i - 1], cycle[i]):
            raise ValueError("consecutive cycle elements must be incident")


def complete_nonfolded(v: Valuation, path, samples: int = 24, seed: int = 0):
    """Extend a zero-valuation path (length <= n+1) to a non-folded polygon.

    Returns the polygon as an ordered list of 2n elements (closed
    implicitly).  The input may also be a full cycle, which is validated
    and returned as-is.
    """
    model, n = v.model, v.n
    path = list(path)
    if len(path) == 2 * n and model.incident(path[-1], path[0]):
        _validate_cycle(model, path)
        if not is_nonfolded(v, path):
            raise ValueError("cycle has a positive valuation")
        return path
    if len(path) < 2 or len(path) > n + 2:
        raise ValueError("path must have between 2 and n+2 elements")
    for a, b in zip(path, path[1:]):
        if not model.incident(a, b):
            raise ValueError("consecutive path elements must be incident")
    for i in range(1, len(path) - 1):
        if v.u_of(path[i - 1], path[i + 1]) != 0:
            raise ValueError("path has a positive valuation")

    rng = random.Random(seed)

    def extend(cur):
        if len(cur) == n + 2:
            back = model.path_between(cur[-1], cur[0])
            if len(back) != n:
                return None
            cycle = cur + back[1:-1]
            if len(set(cycle)) == 2 * n and is_nonfolded(v, cycle):
                return cycle
            return None
        prev, last = cur[-2], cur[-1]
        edges = len(cur)  # adding one element makes a path of this many edges
        want = edges if edges <= n else 2 * n - edges
        for q in model.pencil_sample(last, samples, seed=rng.randrange(1 << 30)):
            if q == prev or v.u_of(prev, q) != 0:
                continue
            if model.distance(cur[0], q) != want:
                continue
            result = extend(cur + [q])
            if result is not None:
                return result
        return None

    result = extend(path)
    if result is None:
        raise LookupError("could not complete the path within the budget")
    return result


# ---------------------------------------------------------------------------
# sampling ordinary polygons


def sample_polygon(model, rng, tries: int = 120):
    """A random ordinary n-gon as an ordered list of 2n elements."""
    n = model.n
    for _ in range(tries):
        x = model.random_element(rng)
        y = model.random_element(rng)
        if x == y or (x.kind == y.kind) != (n % 2 == 0):
            continue
        if model.distance(x, y) != n:
            continue
        pencil = model.pencil_sample(x, 4, seed=rng.randrange(1 << 30))
        if len(pencil) < 2:
            continue
        z1, z2 = rng.sample(pencil, 2)
        p1 = model.path_between(z1, y)
        p2 = model.path_between(z2, y)
        if set(p1[:-1]) & set(p2[:-1]):
            continue
        cycle = [x] + p1 + p2[-2::-1]
        if len(set(cycle)) == 2 * n:
            return cycle
    raise LookupError("could not sample an ordinary polygon")


def _enumerate_polygons(model: FiniteModel, cap: int | None = None):
    """All ordinary n-gons of a finite model (deduplicated)."""
    n = model.n
    seen = set()
    out = []
    for x in model.elements():
        dist, _, _ = model._bfs(x)
        for y in model.elements():
            if dist.get(y) != n:
                continue
            for z1, z2 in itertools.combinations(model.neighbors(x), 2):
                p1 = model.path_between(z1, y)
                p2 = model.path_between(z2, y)
                if set(p1[:-1]) & set(p2[:-1]):
                    continue
                cycle = [x] + p1 + p2[-2::-1]
                key = frozenset(cycle)
                if len(cycle) != 2 * n or key in seen:
                    continue
                seen.add(key)
                out.append(cycle)
                if cap is not None and len(out) >= cap:
                    return out
    return out


# ---------------------------------------------------------------------------
# axiom checks


def _balanced_closed_path(v: Valuation, cycle):
    """The two weighted half sums of the closed-path identity."""
    n = v.n
    lhs = QuadraticNumber(0)
    rhs = QuadraticNumber(0)
    m = 2 * n
    for i in range(1, n):
        lhs = lhs + v.weights.entry(i) * v.u_of(cycle[i - 1], cycle[i + 1])
    for i in range(n + 1, m):
        rhs = rhs + v.weights.entry(i) * v.u_of(cycle[i - 1], cycle[(i + 1) % m])
    return lhs, rhs


def check_u_axioms(v: Valuation, samples: int = 200, seed: int = 0) -> CheckReport:
    """Verify the four valuation axioms (exhaustively on finite models,
    by seeded sampling otherwise), plus symmetry, non-negativity and the
    minimum-attained-twice property of closed paths."""
    model, n = v.model, v.n
    report = CheckReport(f"valuation axioms ({v.name})")
    rng = random.Random(seed)
    finite = isinstance(model, FiniteModel)

    # -- gather adjacent same-kind pairs
    if finite:
        pairs = list(adjacent_pairs(model))
    else:
        pairs = []
        for _ in range(samples):
            z = model.random_element(rng)
            pencil = model.pencil_sample(z, 3, seed=rng.randrange(1 << 30))
            if len(pencil) >= 2:
                a, b = rng.sample(pencil, 2)
                pairs.append((a, b))

    witness = None
    for x, y in pairs:
        if is_infinite(v.u_of(x, y)):
            witness = (x, y)
            break
    report.check("infinite only on the diagonal", witness is None,
                 witness=witness, count=len(pairs))
    diag = all(is_infinite(v.u_of(x, x)) for x, _ in pairs[:16])
    report.check("infinite on the diagonal", diag)

    witness = None
    for x, y in pairs:
        if v.u_of(x, y) != v.u_of(y, x):
            witness = (x, y, v.u_of(x, y), v.u_of(y, x))
            break
    report.check("symmetry", witness is None, witness=witness, count=len(pairs))

    witness = None
    for x, y in pairs:
        if not v.u_of(x, y) >= 0:
            witness = (x, y, v.u_of(x, y))
            break
    report.check("non-negative values", witness is None, witness=witness,
                 count=len(pairs))

    # -- zero pair in every pencil
    if finite:
        pencils = [(z, model.neighbors(z)) for z in model.elements()]
    else:
        pencils = []
        for _ in range(max(8, samples // 4)):
            z = model.random_element(rng)
            pencils.append(
                (z, model.pencil_sample(z, 6, seed=rng.randrange(1 << 30))))
    missing = None
    misses = 0
    for z, pencil in pencils:
        found = any(v.u_of(a, b) == 0
                    for a, b in itertools.combinations(pencil, 2))
        if not found and not finite:
            # existential check: give the pencil a larger budget before
            # reporting the sample as inconclusive
            wider = model.pencil_sample(z, 18, seed=rng.randrange(1 << 30))
            found = any(v.u_of(a, b) == 0
                        for a, b in itertools.combinations(wider, 2))
        if not found:
            misses += 1
            missing = z
    if misses == 0:
        report.check("zero pair in every pencil", True, count=len(pencils))
    elif finite:
        report.check("zero pair in every pencil", False, witness=missing,
                     count=len(pencils))
    else:
        report.inconclusive("zero pair in every pencil",
                            note=f"no witness in budget for {misses} pencils")

    # -- ultrametric triple law on pencils
    if finite:
        triples = []
        for z, pencil in pencils:
            triples.extend(itertools.combinations(pencil, 3))
    else:
        triples = []
        for _ in range(samples):
            z = model.random_element(rng)
            pencil = model.pencil_sample(z, 3, seed=rng.randrange(1 << 30))
            if len(pencil) >= 3:
                triples.append(tuple(pencil[:3]))
    witness = None
    for triple in triples:
        for a, b, c in itertools.permutations(triple):
            if v.u_of(a, b) < v.u_of(b, c) and v.u_of(a, c) != v.u_of(a, b):
                witness = (a, b, c)
                break
        if witness:
            break
    report.check("ultrametric triple law on pencils", witness is None,
                 witness=witness, count=len(triples))

    # -- closed-path identity and minimum-attained-twice
    if finite:
        polygons = _enumerate_polygons(model, cap=max(samples, 400))
    else:
        polygons = []
        for _ in range(samples):
            try:
                polygons.append(sample_polygon(model, rng))
            except LookupError:
                break
    witness = None
    for cycle in polygons:
        lhs, rhs = _balanced_closed_path(v, cycle)
        if lhs != rhs:
            witness = (cycle, lhs, rhs)
            break
    report.check("closed-path identity", witness is None, witness=witness,
                 count=len(polygons))

    witness = None
    for cycle in polygons:
        values = cycle_side_values(v, cycle)
        low = min(values)
        if sum(1 for value in values if value == low) < 2:
            witness = (cycle, values)
            break
    report.check("minimal side valuation attained twice", witness is None,
                 witness=witness, count=len(polygons))
    return report


# ---------------------------------------------------------------------------
# residues


def _finite_class_map(v: Valuation) -> dict:
    """Representative map of residual equivalence on a finite model
    (union-find over distance-two pairs with positive valuation)."""
    model = v.model
    parent = {e: e for e in model.elements()}

    def find(e):
        while parent[e] != e:
            parent[e] = parent[parent[e]]
            e = parent[e]
        return e

    for z in model.elements():
        pencil = model.neighbors(z)
        for a, b in itertools.combinations(pencil, 2):
            if v.u_of(a, b) > 0:
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[max(ra, rb, key=repr)] = min(ra, rb, key=repr)
    return {e: find(e) for e in model.elements()}


def residue_coordinates(model: PG2Model, x: Element):
    """Coordinates of the class of x over the coefficient field, obtained
    by dropping every entry of positive valuation and normalizing the
    first non-zero entry to one."""
    bf = model.field.base_field
    reduced = []
    for c in x.payload:
        if c.is_zero or c.valuation() > 0:
            reduced.append(bf.zero)
        else:
            reduced.append(c.leading_coefficient())
    pivot = next(c for c in reduced if c != bf.zero)
    inv = bf.inv(pivot)
    return tuple(bf.mul(c, inv) for c in reduced)


def residually_equivalent(v: Valuation, x: Element, y: Element) -> bool:
    if x.kind != y.kind:
        raise ValueError("residual equivalence needs elements of one kind")
    if x == y:
        return True
    model = v.model
    if model.distance(x, y) == 2:
        return v.u_of(x, y) > 0
    if isinstance(model, FiniteModel):
        classes = _finite_class_map(v)
        return classes[x] == classes[y]
    raise ValueError("no equivalence chain search available for this backend")


def residue_model(v: Valuation):
    """The quotient geometry of a finite-model valuation, together with
    the map from elements to class names."""
    model = v.model
    if not isinstance(model, FiniteModel):
        raise ValueError("only finite models materialize their residue")
    classes = _finite_class_map(v)
    name_of = {}
    for e in model.elements():
        rep = classes[e]
        name_of[e] = f"[{rep.payload}]"
    points = sorted({name_of[p] for p in model.points})
    lines = sorted({name_of[l] for l in model.lines})
    incidence = sorted({(name_of[p], name_of[l])
                        for p in model.points for l in model._adj[p]})
    quotient = FiniteModel(model.n, points, lines,
                           [list(pair) for pair in incidence])
    return quotient, name_of


def residue_plane_model(model: PG2Model) -> FiniteModel:
    """The projective plane over the (finite) coefficient field, with
    elements named by normalized coordinate strings."""
    bf = model.field.base_field
    order = getattr(bf, "order", None)
    if order is None:
        raise ValueError("coefficient field is not finite")
    elements = list(range(order))
    triples = [(bf.one, a, b) for a in elements for b in elements]
    triples += [(bf.zero, bf.one, a) for a in elements]
    triples += [(bf.zero, bf.zero, bf.one)]
    name = {t: ":".join(bf.coeff_str(c) for c in t) for t in triples}
    incidence = []
    for p in triples:
        for l in triples:
            s = bf.add(bf.add(bf.mul(p[0], l[0]), bf.mul(p[1], l[1])),
                       bf.mul(p[2], l[2]))
            if s == bf.zero:
                incidence.append([name[p], name[l]])
    names = [name[t] for t in triples]
    return FiniteModel(3, names, names, incidence)


def residue_distance(v: Valuation, x: Element, y: Element) -> int:
    """Graph distance between the classes of x and y in the residue."""
    model = v.model
    if isinstance(model, FiniteModel):
        quotient, name_of = residue_model(v)
        kind_x = POINT if x.kind == POINT else LINE
        ex = next(e for e in quotient.elements()
                  if e.payload == name_of[x] and e.kind == x.kind)
        ey = next(e for e in quotient.elements()
                  if e.payload == name_of[y] and e.kind == y.kind)
        return quotient.distance(ex, ey)
    if isinstance(model, PG2Model) and not v.word:
        rx = residue_coordinates(model, x)
        ry = residue_coordinates(model, y)
        bf = model.field.base_field
        if x.kind == y.kind:
            return 0 if rx == ry else 2
        s = bf.add(bf.add(bf.mul(rx[0], ry[0]), bf.mul(rx[1], ry[1])),
                   bf.mul(rx[2], ry[2]))
        return 1 if s == bf.zero else 3
    raise ValueError("residue distance unavailable for this backend")


class ResidueView:
    """Lazy access to the residue of a valuation: equivalence queries,
    class grouping on sampled pencils, and materialization when the
    underlying model allows it."""

    def __init__(self, valuation: Valuation):
        self.valuation = valuation
        self.model = valuation.model

    def same_class(self, x: Element, y: Element) -> bool:
        return residually_equivalent(self.valuation, x, y)

    def classes_on_pencil(self, z: Element, samples: int = 12, seed: int = 0):
        """Group a sampled pencil of z into residue classes.

        Random pencil members can cluster in few classes, so once two
        classes are visible their constant-coefficient combinations (which
        stay incident with z) are probed to surface the remaining ones.
        """
        pencil = list(self.model.pencil_sample(z, samples, seed=seed))
        if isinstance(self.model, PG2Model):
            field = self.model.field
            order = getattr(field.base_field, "order", 2)
            consts = [field.constant(c) for c in range(1, order)]
            for p, q in itertools.combinations(pencil[:6], 2):
                for c in consts:
                    coords = tuple(a + c * b
                                   for a, b in zip(p.payload, q.payload))
                    if all(cc.is_zero for cc in coords):
                        continue
                    e = self.model._element(p.kind, coords)
                    if e not in pencil:
                        pencil.append(e)
        groups = []
        for e in pencil:
            for group in groups:
                if self.same_class(group[0], e):
                    group.append(e)
                    break
            else:
                groups.append([e])
        return groups

    def finite_model(self):
        quotient, _ = residue_model(self.valuation)
        return quotient

    def reduced_model(self):
        if not isinstance(self.model, PG2Model):
            raise ValueError("coordinate reduction needs the plane backend")
        return residue_plane_model(self.model)


# ---------------------------------------------------------------------------
# residual distance (case rules used by the translation schedules)


def residual_distance(v: Valuation, x: Element, y: Element) -> int:
    """Distance between the classes of x and y, from the valuations along
    the shortest path (gonality 3 and 4), or from the materialized residue
    for finite models of higher gonality."""
    model, n = v.model, v.n
    d = model.distance(x, y)
    if d == 0:
        return 0
    if d == 1:
        return 1
    if d == 2:
        return 0 if v.u_of(x, y) > 0 else 2
    if n == 3 and d == 3:
        return 3 if tau(v, x, y) == 0 else 1
    if n == 4 and d == 3:
        path = model.path_between(x, y)
        gap = v.u_of(x, path[2]) + v.u_of(path[1], y) / SQRT2
        return 3 if gap == 0 else 1
    if n == 4 and d == 4:
        _, k = equidistant_and_k(v, x, y)
        if k > 0:
            return 0
        return 2 if tau(v, x, y) > 0 else 4
    if isinstance(model, FiniteModel):
        return residue_distance(v, x, y)
    raise ValueError(f"no residual distance rule for n={n}, d={d}")


# ---------------------------------------------------------------------------
# equidistance (gonality 4)


def equidistant_and_k(v: Valuation, x: Element, y: Element,
                      samples: int = 12, seed: int = 0):
    """Decide whether two opposite elements are equidistant and compute
    the translation breakpoint k(x, y).

    Not equidistant: some path (x, a, b, c, y) has u(x, b) != u(b, y) and
    k is the minimum of the two.  Equidistant: witnessed by two balanced
    paths whose first elements are valuation-zero apart; k = tau / 2.
    """
    model = v.model
    if v.n != 4:
        raise ValueError("equidistance analysis is specific to gonality 4")
    if model.distance(x, y) != 4:
        raise ValueError("equidistance needs an opposite pair")
    first_elements = []
    balanced = []
    for a in model.pencil_sample(x, samples, seed=seed):
        path = [x] + model.path_between(a, y)
        left = v.u_of(x, path[2])
        right = v.u_of(path[2], y)
        if left != right:
            return False, min(left, right)
        first_elements.append(a)
        balanced.append(path)
    for a1, a2 in itertools.combinations(first_elements, 2):
        if v.u_of(a1, a2) == 0:
            return True, tau(v, x, y) / QuadraticNumber(2)
    raise LookupError("no pair of independent balanced paths in budget")
