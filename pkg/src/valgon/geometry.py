"""Incidence-geometry backends.

Three families of models share one duck-typed interface:

* ``FiniteModel`` -- explicit point/line/incidence lists (loaded from JSON),
  queried by breadth-first search.  Used for desk-scale exhaustive checks.
* ``PG2Model`` -- the projective plane over a valued series field, with
  homogeneous coordinate triples, cross-product joins and meets.
* the coordinatized generalized quadrangle (see the quadrangle module).

Every model answers ``incident``, ``path_between``, ``pencil_sample``,
``distance`` and random-element sampling; ``check_gp_axioms`` verifies the
defining polygon axioms exhaustively (finite) or on sampled pairs.
"""
from __future__ import annotations

import json
import random
from collections import deque
from fractions import Fraction

from .report import CheckReport
from .scalar import (
    RationalExponentSeries,
    SeriesField,
    base_field_from_name,
)

POINT = "point"
LINE = "line"


class Element:
    """A typed point or line with model-specific payload.

    ``key`` is a canonical hashable form; equality and hashing go through
    it, so normalization must happen before construction.
    """

    __slots__ = ("kind", "payload", "key")

    def __init__(self, kind: str, payload, key=None):
        if kind not in (POINT, LINE):
            raise ValueError(f"kind must be point or line, got {kind!r}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "payload", payload)
        object.__setattr__(self, "key", (kind, key if key is not None else payload))

    def __setattr__(self, name, value):
        raise AttributeError("Element is immutable")

    def __eq__(self, other):
        return isinstance(other, Element) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"{self.kind}:{self.payload}"


def dual_kind(kind: str) -> str:
    return LINE if kind == POINT else POINT


# ---------------------------------------------------------------------------
# finite backend


class FiniteModel:
    """A polygon given by explicit incidence lists.

    Construction does not validate the polygon axioms; run
    :func:`check_gp_axioms` for that.
    """

    backend = "finite"
    is_finite = True

    def __init__(self, n: int, points, lines, incidence):
        if n < 3:
            raise ValueError("gonality must be at least 3")
        self.n = n
        self.point_names = list(points)
        self.line_names = list(lines)
        if len(set(self.point_names)) != len(self.point_names):
            raise ValueError("duplicate point names")
        if len(set(self.line_names)) != len(self.line_names):
            raise ValueError("duplicate line names")
        self._adj = {}
        self.points = [Element(POINT, p) for p in self.point_names]
        self.lines = [Element(LINE, l) for l in self.line_names]
        by_name = {e.key: e for e in self.points + self.lines}
        for e in self.points + self.lines:
            self._adj[e] = set()
        for p_name, l_name in incidence:
            p = by_name.get((POINT, p_name))
            l = by_name.get((LINE, l_name))
            if p is None or l is None:
                raise ValueError(f"incidence names unknown element: {p_name!r}, {l_name!r}")
            self._adj[p].add(l)
            self._adj[l].add(p)
        self._bfs_cache = {}

    @classmethod
    def from_json(cls, data) -> "FiniteModel":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(int(data["n"]), data["points"], data["lines"], data["incidence"])

    def to_json(self) -> dict:
        incidence = []
        for p in self.points:
            for l in sorted(self._adj[p], key=lambda e: self.line_names.index(e.payload)):
                incidence.append([p.payload, l.payload])
        return {
            "n": self.n,
            "points": list(self.point_names),
            "lines": list(self.line_names),
            "incidence": incidence,
        }

    def elements(self):
        return self.points + self.lines

    def incident(self, x: Element, y: Element) -> bool:
        if x.kind == y.kind:
            raise ValueError("incidence is defined between opposite kinds")
        return y in self._adj[x]

    def neighbors(self, x: Element):
        return sorted(self._adj[x], key=repr)

    def pencil_sample(self, z: Element, count: int, seed: int = 0):
        if count < 1:
            raise ValueError("count must be at least 1")
        return self.neighbors(z)[:count] if count < len(self._adj[z]) else self.neighbors(z)

    def _bfs(self, x: Element):
        """Distances and shortest-path counts from x (cached per source)."""
        if x in self._bfs_cache:
            return self._bfs_cache[x]
        dist = {x: 0}
        count = {x: 1}
        parent = {x: []}
        queue = deque([x])
        while queue:
            cur = queue.popleft()
            for nxt in self._adj[cur]:
                if nxt not in dist:
                    dist[nxt] = dist[cur] + 1
                    count[nxt] = count[cur]
                    parent[nxt] = [cur]
                    queue.append(nxt)
                elif dist[nxt] == dist[cur] + 1:
                    count[nxt] += count[cur]
                    parent[nxt].append(cur)
        self._bfs_cache[x] = (dist, count, parent)
        return dist, count, parent

    def distance(self, x: Element, y: Element) -> int:
        dist, _, _ = self._bfs(x)
        if y not in dist:
            raise ValueError(f"no path between {x!r} and {y!r}")
        return dist[y]

    def path_between(self, x: Element, y: Element, via: Element | None = None):
        """A shortest path x .. y; unique (and asserted so) below length n."""
        if via is not None:
            if via == x or via == y:
                raise ValueError("via must be a proper intermediate element")
            head = self.path_between(x, via)
            tail = self.path_between(via, y)
            full = head + tail[1:]
            if len(full) - 1 != self.distance(x, y):
                raise ValueError("via does not lie on a shortest path")
            return full
        dist, count, parent = self._bfs(x)
        if y not in dist:
            raise ValueError(f"no path between {x!r} and {y!r}")
        d = dist[y]
        if d > self.n:
            raise ValueError(f"distance {d} exceeds gonality {self.n}: broken model")
        if d < self.n and count[y] != 1:
            raise ValueError(
                f"{count[y]} shortest paths of length {d} < n between "
                f"{x!r} and {y!r}: not a generalized polygon"
            )
        path = [y]
        while path[-1] != x:
            path.append(sorted(parent[path[-1]], key=repr)[0])
        path.reverse()
        return path

    def projection(self, x: Element, y: Element) -> Element:
        """The unique element incident with y closest to x (x not opposite y)."""
        d = self.distance(x, y)
        if d == self.n:
            raise ValueError("projection undefined for opposite elements")
        if d == 0:
            raise ValueError("projection of an element on itself")
        return self.path_between(x, y)[-2]

    def random_element(self, rng, kind=None) -> Element:
        pool = self.points if kind == POINT else (
            self.lines if kind == LINE else self.points + self.lines)
        return rng.choice(pool)

    def __repr__(self):
        return (f"FiniteModel(n={self.n}, {len(self.points)} points, "
                f"{len(self.lines)} lines)")


# ---------------------------------------------------------------------------
# PG(2, K) backend


class PG2Model:
    """The projective plane over a series field K.

    Elements carry homogeneous triples, stored normalized: the entries are
    divided by an entry of minimum valuation (ties broken by first index),
    so every entry has non-negative valuation and one entry is 1.
    """

    backend = "plane"
    is_finite = False
    n = 3

    def __init__(self, field: SeriesField):
        self.field = field

    # -- construction

    def _normalize(self, coords):
        coords = tuple(coords)
        if len(coords) != 3:
            raise ValueError("homogeneous triples have three entries")
        if all(c.is_zero for c in coords):
            raise ValueError("the zero triple is not projective")
        best = None
        for c in coords:
            if not c.is_zero:
                v = c.valuation()
                if best is None or v < best[0]:
                    best = (v, c)
        pivot = best[1]
        return tuple(c / pivot for c in coords)

    def _element(self, kind, coords) -> Element:
        coords = self._normalize(coords)
        key = tuple((c.num, c.den) for c in coords)
        return Element(kind, coords, key=key)

    def point(self, coords) -> Element:
        return self._element(POINT, self._coerce(coords))

    def line(self, coords) -> Element:
        return self._element(LINE, self._coerce(coords))

    def _coerce(self, coords):
        out = []
        for c in coords:
            if isinstance(c, RationalExponentSeries):
                out.append(c)
            elif isinstance(c, str):
                out.append(self.field.parse(c))
            else:
                out.append(self.field.series({Fraction(0): c} if c else {}))
        return out

    # -- incidence and constructions

    def incident(self, x: Element, y: Element) -> bool:
        if x.kind == y.kind:
            raise ValueError("incidence is defined between opposite kinds")
        a, b = x.payload, y.payload
        s = a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
        return s.is_zero

    def cross(self, x: Element, y: Element):
        a, b = x.payload, y.payload
        return (
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        )

    def join(self, p: Element, q: Element) -> Element:
        """The unique line through two distinct points."""
        if p.kind != POINT or q.kind != POINT or p == q:
            raise ValueError("join needs two distinct points")
        return self._element(LINE, self.cross(p, q))

    def meet(self, l: Element, m: Element) -> Element:
        """The unique point on two distinct lines."""
        if l.kind != LINE or m.kind != LINE or l == m:
            raise ValueError("meet needs two distinct lines")
        return self._element(POINT, self.cross(l, m))

    def basis_elements(self, kind):
        one, zero = self.field.one, self.field.zero
        triples = [(one, zero, zero), (zero, one, zero), (zero, zero, one)]
        return [self._element(kind, t) for t in triples]

    def distance(self, x: Element, y: Element) -> int:
        if x == y:
            return 0
        if x.kind != y.kind:
            return 1 if self.incident(x, y) else 3
        return 2

    def path_between(self, x: Element, y: Element, via: Element | None = None):
        d = self.distance(x, y)
        if via is not None:
            head = self.path_between(x, via)
            tail = self.path_between(via, y)
            full = head + tail[1:]
            if len(full) - 1 != d:
                raise ValueError("via does not lie on a shortest path")
            return full
        if d == 0:
            return [x]
        if d == 1:
            return [x, y]
        if d == 2:
            mid = self.join(x, y) if x.kind == POINT else self.meet(x, y)
            return [x, mid, y]
        # point vs non-incident line (or dually): go through the first
        # canonical point of the line's pencil; length-3 paths are not
        # unique, any one will do
        p, l = (x, y) if x.kind == POINT else (y, x)
        for e in self.basis_elements(LINE):
            c = self.cross(l, e)
            if not all(s.is_zero for s in c):
                q = self._element(POINT, c)
                m = self.join(p, q)
                path = [p, m, q, l]
                return path if x.kind == POINT else path[::-1]
        raise ValueError("no canonical route found: degenerate configuration")

    def projection(self, x: Element, y: Element) -> Element:
        d = self.distance(x, y)
        if d == self.n:
            raise ValueError("projection undefined for opposite elements")
        if d == 0:
            raise ValueError("projection of an element on itself")
        return self.path_between(x, y)[-2]

    # -- sampling

    def random_scalar(self, rng):
        return self.field.random_element(rng, allow_fraction=True)

    def random_element(self, rng, kind=None) -> Element:
        if kind is None:
            kind = rng.choice((POINT, LINE))
        while True:
            coords = [self.random_scalar(rng) for _ in range(3)]
            if not all(c.is_zero for c in coords):
                return self._element(kind, coords)

    def pencil_sample(self, z: Element, count: int, seed: int = 0):
        """Distinct elements incident with z, deterministic in the seed."""
        if count < 1:
            raise ValueError("count must be at least 1")
        rng = random.Random(seed)
        kind = dual_kind(z.kind)
        # two independent elements incident with z: cross with basis vectors
        base = []
        for e in self.basis_elements(z.kind):
            c = self.cross(z, e)
            if all(s.is_zero for s in c):
                continue
            cand = self._element(kind, c)
            if cand not in base:
                base.append(cand)
            if len(base) == 2:
                break
        if len(base) < 2:
            raise ValueError(f"degenerate pencil base for {z!r}")
        a, b = base[0], base[1]
        out = [a, b]
        seen = {a.key, b.key}
        attempts = 0
        while len(out) < count and attempts < 40 * count:
            attempts += 1
            s = self.random_scalar(rng)
            coords = tuple(ca + s * cb for ca, cb in zip(a.payload, b.payload))
            if all(c.is_zero for c in coords):
                continue
            e = self._element(kind, coords)
            if e.key not in seen:
                seen.add(e.key)
                out.append(e)
        return out[:count]

    def __repr__(self):
        return f"PG2Model({self.field!r})"


# ---------------------------------------------------------------------------
# axiom checks (backend-generic)


def check_gp_axioms(model, samples: int = 200, seed: int = 0,
                    weak_allowed: bool = False) -> CheckReport:
    """Verify (GP1) thickness, (GP2) diameter, (GP3) path uniqueness.

    Finite models are checked exhaustively; coordinatized models on
    deterministic sampled pairs.
    """
    report = CheckReport(f"polygon axioms n={model.n}")
    if getattr(model, "is_finite", False):
        _check_gp_finite(model, report, weak_allowed)
    else:
        _check_gp_sampled(model, report, samples, seed, weak_allowed)
    return report


def _check_gp_finite(model: FiniteModel, report: CheckReport, weak_allowed: bool):
    thin = [e for e in model.elements() if len(model._adj[e]) < 3]
    too_thin = [e for e in model.elements() if len(model._adj[e]) < 2]
    if weak_allowed:
        report.check("GP1 (weak: two per element)", not too_thin,
                     witness=too_thin[:3], count=len(model.elements()))
        report.check("GP1 thickness", True, note="weak variant requested",
                     count=len(model.elements()))
    else:
        report.check("GP1 thickness", not thin, witness=thin[:3],
                     count=len(model.elements()))
    diam_bad = None
    unique_bad = None
    n = model.n
    for x in model.elements():
        dist, count, _ = model._bfs(x)
        if len(dist) != len(model.elements()) or max(dist.values()) > n:
            diam_bad = x
        for y, d in dist.items():
            if 0 < d < n and count[y] != 1:
                unique_bad = (x, y, count[y])
    report.check("GP2 diameter <= n", diam_bad is None, witness=diam_bad,
                 count=len(model.elements()))
    report.check("GP3 unique short paths", unique_bad is None,
                 witness=unique_bad, count=len(model.elements()) ** 2)


def _check_gp_sampled(model, report: CheckReport, samples: int, seed: int,
                      weak_allowed: bool):
    rng = random.Random(seed)
    pencil_floor = 2 if weak_allowed else 3
    thin_bad = None
    n_pencils = max(8, samples // 20)
    for i in range(n_pencils):
        z = model.random_element(rng)
        pencil = model.pencil_sample(z, pencil_floor, seed=rng.randrange(1 << 30))
        if len(set(pencil)) < pencil_floor:
            thin_bad = z
    report.check(f"GP1 ({pencil_floor} per element)", thin_bad is None,
                 witness=thin_bad, count=n_pencils)

    diam_bad = None
    for _ in range(samples):
        x = model.random_element(rng)
        y = model.random_element(rng)
        try:
            path = model.path_between(x, y)
        except ValueError as exc:
            diam_bad = (x, y, str(exc))
            break
        if len(path) - 1 > model.n:
            diam_bad = (x, y, len(path) - 1)
            break
        for a, b in zip(path, path[1:]):
            if not model.incident(a, b):
                diam_bad = (x, y, "returned path not incident")
    report.check("GP2 diameter <= n", diam_bad is None, witness=diam_bad,
                 count=samples)

    # GP3 at distance 2: exactly one common neighbor among sampled pencils
    gp3_bad = None
    checked = 0
    for _ in range(samples):
        x = model.random_element(rng)
        y = model.random_element(rng, kind=x.kind)
        if x == y or model.distance(x, y) != 2:
            continue
        checked += 1
        mid = model.path_between(x, y)[1]
        if not (model.incident(x, mid) and model.incident(mid, y)):
            gp3_bad = (x, y, "returned middle element not incident")
            continue
        px = set(model.pencil_sample(x, 12, seed=rng.randrange(1 << 30)))
        py = set(model.pencil_sample(y, 12, seed=rng.randrange(1 << 30)))
        extra = (px & py) - {mid}
        if extra:
            gp3_bad = (x, y, sorted(extra, key=repr)[:2])
    if checked == 0:
        report.inconclusive("GP3 unique short paths", "no distance-2 pair sampled")
    else:
        report.check("GP3 unique short paths", gp3_bad is None,
                     witness=gp3_bad, count=checked)


# ---------------------------------------------------------------------------
# model construction and stock examples


def instantiate_model(descriptor):
    """Build a backend from a descriptor dict (or JSON string).

    Shapes::

        {"backend": "finite", "data": {"n": .., "points": .., ...}}
        {"backend": "plane", "base": "gf2", "exponent_primes": "all"}
        {"backend": "quadrangle", "h": 3, "h1": 1, "h2": 0}
    """
    if isinstance(descriptor, str):
        descriptor = json.loads(descriptor)
    backend = descriptor.get("backend")
    if backend == "finite":
        return FiniteModel.from_json(descriptor["data"])
    if backend == "plane":
        base = base_field_from_name(descriptor.get("base", "gf2"))
        primes = descriptor.get("exponent_primes", "all")
        if isinstance(primes, list):
            primes = frozenset(primes)
        return PG2Model(SeriesField(base, primes))
    if backend == "quadrangle":
        from .quadrangle import QuadrangleModel

        return QuadrangleModel(
            int(descriptor.get("h", 3)),
            int(descriptor.get("h1", 1)),
            int(descriptor.get("h2", 0)),
        )
    raise ValueError(f"unknown backend {backend!r}")


def fano_model() -> FiniteModel:
    """The projective plane of order 2 (points = nonzero F_2^3 vectors)."""
    vecs = [(x, y, z) for x in (0, 1) for y in (0, 1) for z in (0, 1)
            if (x, y, z) != (0, 0, 0)]
    names = ["".join(map(str, v)) for v in vecs]
    incidence = []
    for lv, ln in zip(vecs, names):
        for pv, pn in zip(vecs, names):
            if sum(a * b for a, b in zip(lv, pv)) % 2 == 0:
                incidence.append([pn, "L" + ln])
    return FiniteModel(3, names, ["L" + n for n in names], incidence)


def grid_model(rows: int = 3, cols: int = 3) -> FiniteModel:
    """The rows x cols grid: a weak generalized quadrangle (thin)."""
    points = [f"p{r}{c}" for r in range(rows) for c in range(cols)]
    lines = [f"r{r}" for r in range(rows)] + [f"c{c}" for c in range(cols)]
    incidence = []
    for r in range(rows):
        for c in range(cols):
            incidence.append([f"p{r}{c}", f"r{r}"])
            incidence.append([f"p{r}{c}", f"c{c}"])
    return FiniteModel(4, points, lines, incidence)


def hexagon_model() -> FiniteModel:
    """The smallest thick generalized hexagon (63 points, 63 lines).

    Points are the points of the quadric X0*X4 + X1*X5 + X2*X6 = X3^2 in
    PG(6, 2); lines are the quadric lines whose dual coordinates satisfy
    six linear relations.
    """
    pts = []
    for code in range(1, 128):
        v = tuple((code >> i) & 1 for i in range(7))
        if (v[0] * v[4] + v[1] * v[5] + v[2] * v[6] + v[3]) % 2 == 0:
            pts.append(v)
    assert len(pts) == 63

    def pluecker(p, q):
        g = {}
        for i in range(7):
            for j in range(7):
                if i != j:
                    g[(i, j)] = (p[i] * q[j] + p[j] * q[i]) % 2
        return g

    def on_quadric_line(p, q):
        # all three points of the F2-line must lie on the quadric
        r = tuple((a + b) % 2 for a, b in zip(p, q))
        return (r[0] * r[4] + r[1] * r[5] + r[2] * r[6] + r[3]) % 2 == 0

    def hexagon_line(p, q):
        g = pluecker(p, q)
        return (
            g[(1, 2)] == g[(3, 4)]
            and g[(2, 0)] == g[(3, 5)]
            and g[(0, 1)] == g[(3, 6)]
            and g[(0, 3)] == g[(5, 6)]
            and g[(1, 3)] == g[(6, 4)]
            and g[(2, 3)] == g[(4, 5)]
        )

    lines = set()
    for i, p in enumerate(pts):
        for q in pts[i + 1:]:
            if on_quadric_line(p, q) and hexagon_line(p, q):
                r = tuple((a + b) % 2 for a, b in zip(p, q))
                lines.add(frozenset((p, q, r)))
    lines = sorted(lines, key=lambda s: sorted(s))
    name = lambda v: "".join(map(str, v))
    incidence = []
    line_names = []
    for idx, line in enumerate(lines):
        ln = f"L{idx}"
        line_names.append(ln)
        for p in sorted(line):
            incidence.append([name(p), ln])
    return FiniteModel(6, [name(p) for p in pts], line_names, incidence)


# ---------------------------------------------------------------------------
# export


def incidence_dot(model, title: str = "incidence") -> str:
    """DOT rendering of the incidence graph (finite models only)."""
    if not getattr(model, "is_finite", False):
        raise ValueError("DOT export needs a finite model")
    out = [f'graph "{title}" {{']
    for p in model.points:
        out.append(f'  "P:{p.payload}" [shape=circle];')
    for l in model.lines:
        out.append(f'  "L:{l.payload}" [shape=box];')
    for p in model.points:
        for l in sorted(model._adj[p], key=repr):
            out.append(f'  "P:{p.payload}" -- "L:{l.payload}";')
    out.append("}")
    return "\n".join(out) + "\n"
