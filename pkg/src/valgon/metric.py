"""Ultrametric planes with the sine rule.

A valuation on a projective plane and an ultrametric plane satisfying
the sine rule determine each other: point distances are d(p,q) =
t^{-u(p,q)} and angles between lines satisfy sin = t^{-u(L,M)} for a
fixed rational base t > 1.  Distances and sines are kept as symbolic
(base, exponent) pairs; every check runs in exponent space and floats
appear only for display.
"""
from __future__ import annotations

import random
from fractions import Fraction

from .geometry import Element, LINE, POINT
from .report import CheckReport
from .scalar import INF, is_infinite
from .valuation import Valuation, sample_polygon

ZERO = Fraction(0)


class PowerValue:
    """The exact value base**(-exponent); an infinite exponent means 0."""

    __slots__ = ("base", "exponent")

    def __init__(self, base, exponent):
        base = Fraction(base)
        if base <= 1:
            raise ValueError("the base must exceed 1")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "exponent", exponent)

    def __setattr__(self, name, value):
        raise AttributeError("PowerValue is immutable")

    def numeric(self) -> float:
        if is_infinite(self.exponent):
            return 0.0
        return float(self.base) ** (-float(self.exponent))

    def __eq__(self, other):
        if not isinstance(other, PowerValue):
            return NotImplemented
        if is_infinite(self.exponent) or is_infinite(other.exponent):
            return (is_infinite(self.exponent)
                    and is_infinite(other.exponent)
                    and self.base == other.base)
        return self.base == other.base and self.exponent == other.exponent

    def __le__(self, other):
        # larger exponent = smaller value
        if self.base != other.base:
            raise ValueError("mixed bases")
        if is_infinite(self.exponent):
            return True
        if is_infinite(other.exponent):
            return False
        return self.exponent >= other.exponent

    def __lt__(self, other):
        return self <= other and not self == other

    def __hash__(self):
        return hash((self.base, repr(self.exponent)))

    def __repr__(self):
        if is_infinite(self.exponent):
            return "0"
        return f"{self.base}^(-{self.exponent})"


def _exponent_from_distance(t: Fraction, distance) -> Fraction:
    """The rational e with distance = t**(-e), if one exists (denominators
    up to 12 are tried); otherwise a ValueError."""
    t = Fraction(t)
    distance = Fraction(distance)
    if distance == 0:
        return INF
    if not 0 < distance <= 1:
        raise ValueError("distances must lie in (0, 1] or be 0")
    if distance == 1:
        return ZERO
    inverse = 1 / distance
    for q in range(1, 13):
        # an exact q-th root of t, when t is a perfect q-th power
        num = round(t.numerator ** (1 / q))
        den = round(t.denominator ** (1 / q))
        if num ** q != t.numerator or den ** q != t.denominator:
            continue
        root = Fraction(num, den)
        power = Fraction(1)
        for p in range(1, 64 * q + 1):
            power *= root
            if power == inverse:
                return Fraction(p, q)
            if power > inverse:
                break
    raise ValueError(f"{distance} is not a rational power of 1/{t}")


class MetricPlane:
    """A projective plane with an ultrametric on points and angles
    between lines, both powers of a fixed base."""

    def __init__(self, model, t, point_exponent_rule, angle_exponent_rule,
                 name="metric"):
        if model.n != 3:
            raise ValueError("metric planes exist for gonality 3 only")
        t = Fraction(t)
        if t <= 1:
            raise ValueError("the base must exceed 1")
        self.model = model
        self.t = t
        self.name = name
        self._point_rule = point_exponent_rule
        self._angle_rule = angle_exponent_rule
        self.overrides = {}

    def point_exponent(self, p: Element, q: Element):
        if p.kind != POINT or q.kind != POINT:
            raise ValueError("point distance needs two points")
        if p == q:
            return INF
        if (p, q) in self.overrides:
            return self.overrides[(p, q)]
        if (q, p) in self.overrides:
            return self.overrides[(q, p)]
        return self._point_rule(p, q)

    def angle_exponent(self, l: Element, m: Element):
        if l.kind != LINE or m.kind != LINE:
            raise ValueError("angles are between lines")
        if l == m:
            return INF
        if (l, m) in self.overrides:
            return self.overrides[(l, m)]
        if (m, l) in self.overrides:
            return self.overrides[(m, l)]
        return self._angle_rule(l, m)

    def point_distance(self, p: Element, q: Element) -> PowerValue:
        return PowerValue(self.t, self.point_exponent(p, q))

    def angle_sine(self, l: Element, m: Element) -> PowerValue:
        return PowerValue(self.t, self.angle_exponent(l, m))

    def angle(self, l: Element, m: Element) -> float:
        """Numeric angle in radians, for display only."""
        import math
        return math.asin(self.angle_sine(l, m).numeric())

    def override_exponent(self, x: Element, y: Element, exponent):
        """Patch a single stored pair (used to model corrupted data)."""
        if x.kind != y.kind:
            raise ValueError("pairs mix kinds")
        self.overrides[(x, y)] = exponent

    def override_distance(self, x: Element, y: Element, distance):
        """Patch a pair with a raw distance; it must be a power of 1/t to
        stay inside the correspondence, otherwise the exponent is marked
        unrecoverable and reading the valuation back fails."""
        try:
            exponent = _exponent_from_distance(self.t, distance)
        except ValueError:
            exponent = ("raw", Fraction(distance))
        self.overrides[(x, y)] = exponent

    def __repr__(self):
        return f"MetricPlane(t={self.t}, {self.model!r})"


def to_metric(v: Valuation, t) -> MetricPlane:
    """The ultrametric plane of a gonality-3 valuation for base t."""
    if v.n != 3:
        raise ValueError("only plane valuations define a metric plane")
    return MetricPlane(v.model, t, v.u_of, v.u_of, name=f"{v.name}@t={t}")


def _checked_exponent(exponent):
    if isinstance(exponent, tuple) and exponent and exponent[0] == "raw":
        raise ValueError(
            f"stored distance {exponent[1]} is not a power of the base")
    return exponent


def from_metric(m: MetricPlane) -> Valuation:
    """The valuation read back from the stored exponents."""
    def rule(x, y):
        if x.kind == POINT:
            return _checked_exponent(m.point_exponent(x, y))
        return _checked_exponent(m.angle_exponent(x, y))

    return Valuation(m.model, rule, name=f"{m.name}-readback")


def _sample_points(m: MetricPlane, rng, count):
    pool = [p for p, _ in m.overrides if p.kind == POINT]
    pool += [q for _, q in m.overrides if q.kind == POINT]
    # probe points deep around every overridden pair: q + t^j p exposes a
    # patched value that no longer agrees with its neighbourhood
    for p, q in list(m.overrides):
        if p.kind != POINT:
            continue
        try:
            t_series = m.model.field.t()
            shift = t_series
            for _ in range(3):
                pool.append(m.model.point(tuple(
                    qc + shift * pc for pc, qc in zip(p.payload, q.payload))))
                pool.append(m.model.point(tuple(
                    pc + shift * qc for pc, qc in zip(p.payload, q.payload))))
                shift = shift * t_series
        except (AttributeError, TypeError, ValueError):
            break
    while len(pool) < count:
        pool.append(m.model.random_element(rng, POINT))
    out = []
    for p in pool:
        if p not in out:
            out.append(p)
    return out


def check_M_axioms(m: MetricPlane, samples: int = 120,
                   seed: int = 0) -> CheckReport:
    """Sampled verification of the metric-plane axioms, exactly in
    exponent space: the point ultrametric, angle separation, unit-distance
    and perpendicularity witnesses, and the sine rule on triangles."""
    report = CheckReport(f"metric plane axioms (t={m.t})")
    model = m.model
    rng = random.Random(seed)

    # (ultrametric) d(p,q) <= max(d(p,r), d(r,q)) on point triples
    points = _sample_points(m, rng, max(12, samples // 8))
    witness = None
    triples = 0
    budget = samples * 4
    for i, p in enumerate(points):
        for j, q in enumerate(points):
            if j <= i:
                continue
            for r in points:
                if r in (p, q):
                    continue
                triples += 1
                upq = m.point_exponent(p, q)
                low = min(m.point_exponent(p, r), m.point_exponent(r, q))
                if not (is_infinite(upq) or upq >= low):
                    witness = (p, q, r)
                    break
            if witness or triples >= budget:
                break
        if witness or triples >= budget:
            break
    report.check("point distances form an ultrametric", witness is None,
                 witness=witness, count=triples)

    # (range) every distance lies in [0, 1]
    witness = None
    for i, p in enumerate(points):
        for q in points[i + 1:]:
            exponent = m.point_exponent(p, q)
            if isinstance(exponent, tuple) or not (
                    is_infinite(exponent) or exponent >= 0):
                witness = (p, q)
                break
        if witness:
            break
    report.check("distances lie in [0, 1]", witness is None, witness=witness)

    # (angles separate lines) zero angle only between equal lines
    witness = None
    checked = 0
    for _ in range(samples):
        l = model.random_element(rng, LINE)
        k = model.random_element(rng, LINE)
        checked += 1
        if l == k:
            if not is_infinite(m.angle_exponent(l, l)):
                witness = (l, l)
                break
        elif is_infinite(m.angle_exponent(l, k)):
            witness = (l, k)
            break
    report.check("zero angle only between equal lines", witness is None,
                 witness=witness, count=checked)

    # (unit pairs) two points at distance 1 on each sampled line
    missing = None
    found_all = True
    lines_checked = 0
    for _ in range(max(6, samples // 20)):
        l = model.random_element(rng, LINE)
        lines_checked += 1
        on_line = model.pencil_sample(l, 8, seed=rng.randrange(1 << 30))
        hit = any(m.point_exponent(p, q) == 0
                  for i, p in enumerate(on_line) for q in on_line[i + 1:])
        if not hit:
            found_all = False
            missing = l
            break
    if found_all:
        report.check("a unit-distance pair on every sampled line", True,
                     count=lines_checked)
    else:
        report.inconclusive("a unit-distance pair on every sampled line",
                            note=f"no witness found on {missing!r}")

    # (perpendicular pairs) two perpendicular lines through each point
    missing = None
    found_all = True
    points_checked = 0
    for _ in range(max(6, samples // 20)):
        p = model.random_element(rng, POINT)
        points_checked += 1
        through = model.pencil_sample(p, 8, seed=rng.randrange(1 << 30))
        hit = any(m.angle_exponent(l, k) == 0
                  for i, l in enumerate(through) for k in through[i + 1:])
        if not hit:
            found_all = False
            missing = p
            break
    if found_all:
        report.check("a perpendicular pair through every sampled point",
                     True, count=points_checked)
    else:
        report.inconclusive("a perpendicular pair through every sampled "
                            "point", note=f"no witness found at {missing!r}")

    # (sine rule) A / sin(alpha) equal for all three corners, checked as
    # equality of exponent differences side-minus-opposite-angle
    witness = None
    triangles = 0
    override_points = [e for pair in m.overrides for e in pair
                       if e.kind == POINT]
    for trial in range(samples):
        cycle = None
        if override_points and trial < len(override_points) * 8:
            p = override_points[trial % len(override_points)]
            cycle = _triangle_through(model, p, rng)
        if cycle is None:
            cycle = sample_polygon(model, rng)
        if cycle is None:
            continue
        if cycle[0].kind != POINT:
            cycle = cycle[1:] + cycle[:1]
        a, ab, b, bc, c, ca = cycle
        triangles += 1
        ratios = [
            _exponent_diff(m.point_exponent(b, c), m.angle_exponent(ab, ca)),
            _exponent_diff(m.point_exponent(a, c), m.angle_exponent(ab, bc)),
            _exponent_diff(m.point_exponent(a, b), m.angle_exponent(bc, ca)),
        ]
        finite = [r for r in ratios if r is not None]
        if finite and any(r != finite[0] for r in finite):
            witness = (a, b, c, ratios)
            break
    report.check("sine rule on sampled triangles", witness is None,
                 witness=witness, count=triangles)
    return report


def _exponent_diff(side_exponent, angle_exponent):
    """Exponent of side / sin(angle); None when the ratio is 0/0."""
    if is_infinite(side_exponent) and is_infinite(angle_exponent):
        return None
    if is_infinite(side_exponent):
        return "zero ratio"
    if is_infinite(angle_exponent):
        return "unbounded ratio"
    return side_exponent - angle_exponent


def _triangle_through(model, p, rng):
    """An ordinary triangle (6-cycle) with p as a corner."""
    for _ in range(40):
        b = model.random_element(rng, POINT)
        c = model.random_element(rng, POINT)
        try:
            if b == p or c == p or b == c:
                continue
            lb = model.join(p, b)
            lc = model.join(p, c)
            if lb == lc:
                continue
            base = model.join(b, c)
            if base in (lb, lc):
                continue
            if model.incident(p, base):
                continue
            return [p, lb, b, base, c, lc]
        except (ValueError, ZeroDivisionError):
            continue
    return None
