"""The translation operator on valuations.

Translating a valuation toward an element x over a length t produces a
new valuation.  The residual distance from x to any element follows an
exact piecewise-constant schedule; pair values follow by integrating a
piecewise-linear slope determined by the three schedules of a pair and
their common element.  Gonality 6 with a discrete valuation uses a
recursive stepper that displaces the base points of the pencil trees.
"""
from __future__ import annotations

import itertools
import random
from fractions import Fraction

from .geometry import Element, FiniteModel, POINT, LINE
from .report import CheckReport
from .scalar import INF, QuadraticNumber, SQRT2, SQRT3, is_infinite
from .valuation import (
    Valuation,
    adjacent_pairs,
    complete_nonfolded,
    cycle_side_values,
    equidistant_and_k,
    is_nonfolded,
    pair_key,
    tau,
    zero_partner,
)
from .weights import canonical_weights

ZERO = Fraction(0)
HALF = Fraction(1, 2)


class TranslationWord:
    """An ordered sequence of (element, length) translation steps."""

    __slots__ = ("steps",)

    def __init__(self, steps):
        steps = tuple((e, length) for e, length in steps)
        for e, length in steps:
            if not isinstance(e, Element):
                raise TypeError("steps must name model elements")
            if not length >= 0:
                raise ValueError("translation lengths must be non-negative")
        object.__setattr__(self, "steps", steps)

    def __setattr__(self, name, value):
        raise AttributeError("TranslationWord is immutable")

    def total_length(self):
        total = QuadraticNumber(0)
        for _, length in self.steps:
            total = total + length
        return total

    def __iter__(self):
        return iter(self.steps)

    def __len__(self):
        return len(self.steps)

    def __repr__(self):
        inner = ", ".join(f"({e!r}, {length!r})" for e, length in self.steps)
        return f"TranslationWord([{inner}])"


def _steps_of(word):
    if isinstance(word, TranslationWord):
        return list(word.steps)
    return [(e, length) for e, length in word]


# ---------------------------------------------------------------------------
# schedules


class Schedule:
    """Right-continuous piecewise-constant residual distance.

    Stored as (start, value) segments; the first start is 0 and the last
    value persists to infinity.  Degenerate (empty) segments are dropped.
    """

    __slots__ = ("segments",)

    def __init__(self, segments):
        cleaned = []
        for start, value in segments:
            if cleaned and cleaned[-1][0] == start:
                cleaned[-1] = (start, value)
            else:
                cleaned.append((start, value))
        if not cleaned or cleaned[0][0] != 0:
            raise ValueError("a schedule must start at 0")
        for (s1, _), (s2, _) in zip(cleaned, cleaned[1:]):
            if not s2 > s1:
                raise ValueError("schedule breakpoints must ascend")
        object.__setattr__(self, "segments", tuple(cleaned))

    def __setattr__(self, name, value):
        raise AttributeError("Schedule is immutable")

    @property
    def breakpoints(self):
        return tuple(start for start, _ in self.segments[1:])

    @property
    def plateaus(self):
        return tuple(value for _, value in self.segments)

    def value_at(self, t):
        if not t >= 0:
            raise ValueError("schedules are defined on t >= 0")
        current = self.segments[0][1]
        for start, value in self.segments:
            if start <= t:
                current = value
            else:
                break
        return current

    def final_plateau_start(self):
        return self.segments[-1][0]

    def __repr__(self):
        parts = ", ".join(f"[{s!r}..) -> {v}" for s, v in self.segments)
        return f"Schedule({parts})"


def schedule(v: Valuation, x: Element, y: Element) -> Schedule:
    """The translated residual distance from x to y as a function of the
    translation length (step (C1) of the construction)."""
    n = v.n
    if n not in (3, 4):
        raise ValueError("schedules are implemented for gonality 3 and 4")
    model = v.model
    d = model.distance(x, y)
    if d == 0:
        return Schedule([(ZERO, 0)])
    if d == 1:
        return Schedule([(ZERO, 1)])
    if d == 2:
        return Schedule([(ZERO, 0), (v.u_of(x, y), 2)])
    if d == 3 and n == 3:
        return Schedule([(ZERO, 1), (tau(v, x, y), 3)])
    if d == 3 and n == 4:
        path = model.path_between(x, y)
        gap = v.u_of(x, path[2]) + v.u_of(path[1], y) / SQRT2
        return Schedule([(ZERO, 1), (gap, 3)])
    # d == 4, n == 4
    _, k = equidistant_and_k(v, x, y)
    total = tau(v, x, y)
    return Schedule([(ZERO, 0), (k, 2), (total - k, 4)])


# ---------------------------------------------------------------------------
# pair evaluation


def translate_pair(v: Valuation, x: Element, t, a: Element, b: Element):
    """The value of the t-translation of v toward x on the pair (a, b),
    by exact piecewise-linear integration of the schedule slopes."""
    if not t >= 0:
        raise ValueError("translation length must be non-negative")
    if a == b:
        return INF
    value = v.u_of(a, b)
    if t == 0:
        return value
    y = v.model.path_between(a, b)[1]
    sched_a = schedule(v, x, a)
    sched_b = schedule(v, x, b)
    sched_y = schedule(v, x, y)
    weights = canonical_weights(v.n)

    points = [ZERO]
    for sched in (sched_a, sched_b, sched_y):
        for start, _ in sched.segments:
            if 0 < start < t:
                points.append(start)
    points.append(t)
    points.sort()

    for left, right in zip(points, points[1:]):
        if not right > left:
            continue
        da = sched_a.value_at(left)
        db = sched_b.value_at(left)
        dy = sched_y.value_at(left)
        if da == db:
            eps = -1 if da == dy - 1 else (1 if da == dy + 1 else 0)
        else:
            eps = 0
        if eps:
            value = value + eps * weights.entry(dy) * (right - left)
            if value < 0:
                raise ArithmeticError(
                    f"pair value went negative at t={right!r}: "
                    f"inconsistent model for ({a!r}, {b!r})")
    return value


def translate(v: Valuation, x: Element, t) -> Valuation:
    """The t-translation of v toward x, as a lazy valuation."""
    if not t >= 0:
        raise ValueError("translation length must be non-negative")
    return Valuation(
        v.model,
        lambda a, b: translate_pair(v, x, t, a, b),
        name=f"{v.name}+V({x.kind},{t})",
        weights=v.weights,
        word=v.word + ((x, t),),
    )


def apply_word(v: Valuation, word) -> Valuation:
    out = v
    for e, length in _steps_of(word):
        out = translate(out, e, length)
    return out


def nonfolded_membership(v_target: Valuation, omega) -> bool:
    """Whether the 2n-cycle omega is non-folded for the valuation."""
    omega = list(omega)
    model = v_target.model
    if len(omega) != 2 * model.n or len(set(omega)) != len(omega):
        raise ValueError("omega must list the 2n distinct cycle elements")
    for i in range(len(omega)):
        if not model.incident(omega[i - 1], omega[i]):
            raise ValueError("omega is not a closed path")
    return is_nonfolded(v_target, omega)


# ---------------------------------------------------------------------------
# condition checks


def _probe_times(*schedules):
    starts = sorted({ZERO} | {s for sched in schedules
                              for s, _ in sched.segments})
    times = []
    for left, right in zip(starts, starts[1:]):
        times.append(left)
        times.append(left + (right - left) * HALF)
    times.append(starts[-1])
    times.append(starts[-1] + 1)
    return times


def check_C_conditions(v: Valuation, x: Element, samples: int = 60,
                       seed: int = 0) -> CheckReport:
    """Sampled verification of the schedule conditions: incident schedules
    differ by one, decreasing pair values stay positive inside their
    interval, and values that stop decreasing vanish at the transition."""
    report = CheckReport(f"translation conditions toward {x!r}")
    model = v.model
    rng = random.Random(seed)

    witness = None
    checked = 0
    for _ in range(samples):
        y = model.random_element(rng)
        pencil = model.pencil_sample(y, 2, seed=rng.randrange(1 << 30))
        if not pencil:
            continue
        z = rng.choice(pencil)
        sy = schedule(v, x, y)
        sz = schedule(v, x, z)
        for t in _probe_times(sy, sz):
            checked += 1
            if abs(sy.value_at(t) - sz.value_at(t)) != 1:
                witness = (y, z, t)
                break
        if witness:
            break
    report.check("incident schedules differ by one", witness is None,
                 witness=witness, count=checked)

    decrease_witness = None
    transition_witness = None
    decreases = 0
    transitions = 0
    for _ in range(samples):
        y = model.random_element(rng)
        pencil = model.pencil_sample(y, 3, seed=rng.randrange(1 << 30))
        if len(pencil) < 2:
            continue
        a, b = rng.sample(pencil, 2)
        sa, sb, sy = schedule(v, x, a), schedule(v, x, b), schedule(v, x, y)
        starts = sorted({ZERO} | {s for sched in (sa, sb, sy)
                                  for s, _ in sched.segments})
        intervals = list(zip(starts, starts[1:])) + [(starts[-1],
                                                      starts[-1] + 1)]
        for left, right in intervals:
            if not right > left:
                continue
            da, db, dy = (sa.value_at(left), sb.value_at(left),
                          sy.value_at(left))
            if da == db == dy - 1 and dy != v.n:
                mid = left + (right - left) * HALF
                decreases += 1
                if not translate_pair(v, x, mid, a, b) > 0:
                    decrease_witness = (a, b, mid)
                    break
        # transition points where one schedule has just climbed past y
        for start, value in sb.segments[1:]:
            da, dy = sa.value_at(start), sy.value_at(start)
            if value == dy + 1 and da == dy - 1:
                transitions += 1
                if translate_pair(v, x, start, a, b) != 0:
                    transition_witness = (a, b, start)
                    break
        if decrease_witness or transition_witness:
            break
    report.check("decreasing values stay positive", decrease_witness is None,
                 witness=decrease_witness, count=decreases)
    report.check("values vanish at their transition",
                 transition_witness is None, witness=transition_witness,
                 count=transitions)
    return report


# ---------------------------------------------------------------------------
# discrete stepping for gonality six


_HEX_COEFFS = {0: QuadraticNumber(0), 1: QuadraticNumber(1), 2: SQRT3,
               3: QuadraticNumber(2), 4: SQRT3, 5: QuadraticNumber(1),
               6: QuadraticNumber(0)}


def _is_integer_multiple(value, unit) -> bool:
    ratio = value / unit if unit != 1 else value
    if isinstance(ratio, Fraction):
        return ratio.denominator == 1
    if isinstance(ratio, QuadraticNumber):
        return ratio.is_rational and ratio.as_fraction().denominator == 1
    return False


def _check_hexagon_scaling(v: Valuation):
    """The starting valuation must use the discrete scaling: one kind of
    pair takes values in 3Z, the other in sqrt(3)Z (points get sqrt(3)
    under the convention used here)."""
    units = {POINT: SQRT3, LINE: QuadraticNumber(3)}
    for xx, yy in adjacent_pairs(v.model):
        value = v.u_of(xx, yy)
        if not _is_integer_multiple(value, units[xx.kind]):
            raise ValueError(
                f"valuation is not discretely scaled at ({xx!r}, {yy!r}): "
                f"{value!r}")


def residual_distances_from(v: Valuation, x: Element) -> dict:
    """Residual distance from x to every element of a finite model."""
    from .valuation import residue_model

    quotient, name_of = residue_model(v)
    lookup = {}
    for e in quotient.elements():
        lookup[(e.kind, e.payload)] = e
    source = lookup[(x.kind, name_of[x])]
    dist, _, _ = quotient._bfs(source)
    return {e: dist[lookup[(e.kind, name_of[e])]]
            for e in v.model.elements()}


def hexagon_step(v: Valuation, x: Element, k) -> Valuation:
    """One recursion step of the discrete gonality-6 translation: displace
    the base point of every pencil tree toward the residue-closest end by
    the table amount (none, k, sqrt3 k, 2k, sqrt3 k, k, none)."""
    model = v.model
    if not isinstance(model, FiniteModel) or model.n != 6:
        raise ValueError("the stepper needs a finite gonality-6 model")
    bound = SQRT3 / QuadraticNumber(2) if x.kind == POINT else QuadraticNumber(1)
    if not (k >= 0 and k <= bound):
        raise ValueError(f"step length must lie in [0, {bound}]")
    if not v.word:
        _check_hexagon_scaling(v)
    if k == 0:
        return v

    dr = residual_distances_from(v, x)

    # direction and displacement per element
    moves = {}
    for y in model.elements():
        d = dr[y]
        m = _HEX_COEFFS[d] * k
        if m == 0:
            continue
        g = next((a for a in model.neighbors(y) if dr[a] == d - 1), None)
        if g is None:
            raise ArithmeticError(f"no residue-closer neighbor of {y!r}")
        for b in model.neighbors(y):
            if b != g:
                wall = v.u_of(b, g)
                if 0 < wall < m:
                    raise ValueError(
                        f"step {k!r} would cross a branch point of the "
                        f"tree of {y!r} (at {wall!r})")
        moves[y] = (g, m)

    table = {}
    for a, b in adjacent_pairs(model):
        y = model.path_between(a, b)[1]
        old = v.u_of(a, b)
        if y not in moves:
            table[pair_key(a, b)] = old
            continue
        g, m = moves[y]
        shift_a = m if a == g else min(m, v.u_of(a, g))
        shift_b = m if b == g else min(m, v.u_of(b, g))
        table[pair_key(a, b)] = old + m - shift_a - shift_b

    def rule(xx, yy):
        return table[pair_key(xx, yy)]

    stepped = Valuation(model, rule, name=f"{v.name}+step({x.kind},{k})",
                        weights=v.weights, word=v.word + ((x, k),))
    stepped.table = table
    return stepped


# ---------------------------------------------------------------------------
# word reduction


def _unit_vectors(n: int):
    if n == 3:
        h = QuadraticNumber(Fraction(1, 2))
        s = SQRT3 * Fraction(1, 2)
        cos = [QuadraticNumber(1), h, -h, QuadraticNumber(-1), -h, h]
        sin = [QuadraticNumber(0), s, s, QuadraticNumber(0), -s, -s]
    elif n == 4:
        r = SQRT2 * Fraction(1, 2)
        one, zero = QuadraticNumber(1), QuadraticNumber(0)
        cos = [one, r, zero, -r, -one, -r, zero, r]
        sin = [zero, r, one, r, zero, -r, -one, -r]
    elif n == 6:
        h = QuadraticNumber(Fraction(1, 2))
        s = SQRT3 * Fraction(1, 2)
        one, zero = QuadraticNumber(1), QuadraticNumber(0)
        cos = [one, s, h, zero, -h, -s, -one, -s, -h, zero, h, s]
        sin = [zero, h, s, one, s, h, zero, -h, -s, -one, -s, -h]
    else:
        raise ValueError(f"no exact direction table for gonality {n}")
    return list(zip(cos, sin))


def _reduce_in_apartment(omega, steps):
    """Rewrite translation steps toward elements of one non-folded polygon
    as two steps toward consecutive polygon elements (exact sector split
    of the total displacement vector)."""
    n = len(omega) // 2
    dirs = _unit_vectors(n)
    index = {e: i for i, e in enumerate(omega)}
    wx = QuadraticNumber(0)
    wy = QuadraticNumber(0)
    for e, length in steps:
        cx, cy = dirs[index[e]]
        wx = wx + cx * length
        wy = wy + cy * length
    for i in range(2 * n):
        j = (i + 1) % (2 * n)
        eix, eiy = dirs[i]
        ejx, ejy = dirs[j]
        det = eix * ejy - eiy * ejx  # = sin(pi/n) > 0
        alpha = (wx * ejy - wy * ejx) / det
        beta = (eix * wy - eiy * wx) / det
        if alpha >= 0 and beta >= 0:
            return [(omega[i], alpha), (omega[j], beta)]
    raise ArithmeticError("displacement vector escaped every sector")


def _substitute(v: Valuation, x: Element, z: Element) -> Element:
    """An element closer to z that stays residually equivalent to x for
    the initial stretch of the translation toward x."""
    model, n = v.model, v.n
    d = model.distance(x, z)
    if d == 2:
        return z
    if n == 3 and d == 3:
        for cand in model.pencil_sample(z, 16, seed=29):
            mid = model.path_between(x, cand)[1]
            if v.u_of(mid, z) == 0:
                return cand
        raise LookupError("no substitute found on the pencil of z")
    if n == 4 and d == 3:
        path = model.path_between(x, z)
        a, b = path[1], path[2]
        if v.u_of(a, z) == 0:
            return b
        c = zero_partner(v, a, x)
        dd = zero_partner(v, x, c)
        return model.projection(dd, z)
    if n == 4 and d == 4:
        equal, _ = equidistant_and_k(v, x, z)
        if equal:
            return z
        for a in model.pencil_sample(x, 16, seed=31):
            path = [x] + model.path_between(a, z)
            b, c = path[2], path[3]
            if v.u_of(x, b) >= v.u_of(b, z) and v.u_of(a, c) == 0:
                return b
        raise LookupError("no substitute path found toward z")
    raise ValueError(f"no substitute rule for gonality {n}, distance {d}")


def _orient_flag(pair):
    (a, alpha), (b, beta) = pair
    if a.kind == POINT:
        return a, alpha, b, beta
    return b, beta, a, alpha


def _polygon_through(v: Valuation, x: Element, y: Element, z: Element):
    """A polygon non-folded for v containing x and the flag {y, z}."""
    model, n = v.model, v.n
    candidates = []
    d = model.distance(x, z)
    if x == z or x == y:
        base = [y, z] if y.kind == POINT else [z, y]
        candidates.append(base)
    elif d == n:
        try:
            candidates.append(model.path_between(x, z, via=y))
        except ValueError:
            candidates.append(model.path_between(x, z))
    else:
        path = model.path_between(x, z)
        if y in path:
            candidates.append(path)
        else:
            candidates.append(path + [y])
        dy = model.distance(x, y)
        if dy < n:
            path_y = model.path_between(x, y)
            if z in path_y:
                candidates.append(path_y)
            else:
                candidates.append(path_y + [z])
    last_error = None
    for base in candidates:
        try:
            return complete_nonfolded(v, base)
        except (ValueError, LookupError) as exc:
            last_error = exc
    raise LookupError(f"no common non-folded polygon: {last_error}")


def _reduce3(v: Valuation, first, pair, depth: int = 0):
    """Reduce V(x,k) V(y,l) V(z,m) (y incident z) over v to a two-step
    word on an incident flag."""
    if depth > 60:
        raise LookupError("word reduction did not terminate")
    (x, k) = first
    (y, l), (z, m) = pair
    model = v.model
    if k == 0:
        return pair
    if x == y:
        return [(y, k + l), (z, m)]
    if x == z:
        return [(y, l), (z, k + m)]
    if model.distance(x, y) > model.distance(x, z):
        y, l, z, m = z, m, y, l
        pair = [(y, l), (z, m)]
    d = model.distance(x, z)
    if d <= 1:
        # x incident with z but distinct: fold x into the flag via the
        # apartment of a polygon through the three elements
        sched = Schedule([(ZERO, d)])
        t_star = ZERO
    else:
        sched = schedule(v, x, z)
        if sched.plateaus[-1] != d:
            raise ArithmeticError("schedule does not reach the distance")
        t_star = sched.final_plateau_start()
    if k <= t_star:
        x2 = _substitute(v, x, z)
        return _reduce3(v, (x2, k), pair, depth + 1)
    v2 = translate(v, x, t_star) if t_star > 0 else v
    omega = _polygon_through(v2, x, y, z)
    new_pair = _reduce_in_apartment(
        omega, [(x, k - t_star), (y, l), (z, m)])
    if t_star == 0:
        return new_pair
    if z in (new_pair[0][0], new_pair[1][0]):
        x2 = _substitute(v, x, z)
        return _reduce3(v, (x2, t_star), new_pair, depth + 1)
    return _reduce3(v, (x, t_star), new_pair, depth + 1)


def reduce_word(v: Valuation, word):
    """Rewrite a translation word over v as (p, k, L, l) with p incident
    L and the same effect on the valuation; the total length does not
    increase."""
    if v.n not in (3, 4):
        raise ValueError("word reduction is implemented for gonality 3 and 4")
    steps = [(e, length) for e, length in _steps_of(word) if length > 0]
    model = v.model
    if not steps:
        p = model.random_element(random.Random(0), POINT)
        L = model.pencil_sample(p, 1, seed=0)[0]
        return p, ZERO, L, ZERO

    def reduce_steps(base, remaining):
        (x, k) = remaining[0]
        if len(remaining) == 1:
            partner = model.pencil_sample(x, 1, seed=0)[0]
            return [(x, k), (partner, ZERO)]
        v1 = translate(base, x, k)
        pair = reduce_steps(v1, remaining[1:])
        return _reduce3(base, (x, k), pair)

    pair = reduce_steps(v, steps)
    return _orient_flag(pair)


# ---------------------------------------------------------------------------
# the building distance


def building_distance_squared(k, l, n: int):
    if n == 3:
        cos = QuadraticNumber(Fraction(1, 2))
    elif n == 4:
        cos = SQRT2 * Fraction(1, 2)
    elif n == 6:
        cos = SQRT3 * Fraction(1, 2)
    else:
        raise ValueError(f"no exact cosine for gonality {n}")
    return k * k + l * l - 2 * cos * k * l


def _exact_sqrt(value):
    if isinstance(value, QuadraticNumber):
        if not value.is_rational:
            return None
        value = value.as_fraction()
    if isinstance(value, int):
        value = Fraction(value)
    if not isinstance(value, Fraction):
        return None
    if value < 0:
        raise ValueError("negative squared distance")
    num = int(value.numerator ** 0.5)
    den = int(value.denominator ** 0.5)
    for dn in (num - 1, num, num + 1):
        for dd in (den - 1, den, den + 1):
            if dn >= 0 and dd > 0 and Fraction(dn * dn, dd * dd) == value:
                return Fraction(dn, dd)
    return None


def building_distance(k, l, n: int):
    """Length of the third triangle side when two sides of lengths k and
    l meet at angle pi/n: exact when the square root is rational, a float
    otherwise."""
    if not (k >= 0 and l >= 0):
        raise ValueError("lengths must be non-negative")
    if l == 0:
        return k
    if k == 0:
        return l
    squared = building_distance_squared(k, l, n)
    root = _exact_sqrt(squared)
    if root is not None:
        return root
    return float(squared) ** 0.5
