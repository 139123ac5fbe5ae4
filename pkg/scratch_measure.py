"""Measure the true quadrangle valuation by transport from anchor pencils.

Opposite sides of an ordinary quadrangle have equal valuation (rotating
the closed-path identity).  Anchoring u on the pencil of [0,0,0] (points)
and of (0,0,0) (lines) to plain parameter depth, any pair's value can be
measured by bridging to the anchor via projections.
"""
import random
from fractions import Fraction

import valgon.quadrangle as Q
from valgon.geometry import POINT, LINE
from valgon.scalar import INF

Q.DEFAULT_PRECISION = Fraction(16)

M = Q.QuadrangleModel(3, 1, 0)
T1, T2, T3, APEX = Q.T1, Q.T2, Q.T3, Q.APEX

Z0_LINE = M.line3(M.zero, M.zero, M.zero)
Z0_POINT = M.point3(M.zero, M.zero, M.zero)


def v(x):
    return x.valuation()


def mmin(x):
    return min(Fraction(0), v(x)) if not x.is_zero else Fraction(0)


def anchor_depth(e1, e2):
    """Plain parameter depth on the anchor pencils (param = payload[1];
    T2 member is the special end)."""
    s1 = e1.payload[0] == T2
    s2 = e2.payload[0] == T2
    if s1 and s2:
        return INF
    if s1 or s2:
        t = e2 if s1 else e1
        return -mmin(t.payload[1])
    d = e1.payload[1] + e2.payload[1]
    if d.is_zero:
        return INF
    return v(d) - mmin(e1.payload[1]) - mmin(e2.payload[1])


def measure(x, y):
    """True u(x, y) for a same-kind pair at distance two, transported from
    the anchor pencil.  Returns None when the bridge degenerates."""
    if x.kind == POINT:
        z0 = Z0_LINE
    else:
        z0 = Z0_POINT
    mid = M.join(x, y) if x.kind == POINT else M.meet(x, y)
    if mid is None:
        raise ValueError("pair shares no pencil")
    if mid == z0:
        return anchor_depth(x, y)
    # bridge x -> anchor, y -> anchor
    if M.distance(x, z0) != 3 or M.distance(y, z0) != 3:
        return None
    if x.kind == POINT:
        bx, jx = M._flag_toward(x, z0)
        by, jy = M._flag_toward(y, z0)
    else:
        bx, jx = M._flag_toward(z0, x)
        by, jy = M._flag_toward(z0, y)
        bx, jx = jx, bx
        by, jy = jy, by
    # cycle: [bx, z0, by, jy, y, mid, x, jx]
    cyc = [bx, z0, by, jy, y, mid, x, jx]
    if len({repr(e) for e in cyc}) != 8:
        return None
    if bx == by:
        return None
    for i in range(8):
        if not M.incident(cyc[i - 1], cyc[i]):
            return None
    return anchor_depth(bx, by)


def fmt(x):
    if not x.terms:
        return "0"
    return "+".join(f"{c}t^{e}" for e, c in sorted(x.terms.items()))


def tp(e, c=1):
    return M.t_power(e, c)


def show(label, x, y):
    try:
        val = measure(x, y)
    except Exception as ex:
        val = f"ERR {ex}"
    print(f"{label}: {val}")
    return val

# ---------------------------------------------------------------------------
# two-step transport for centers not opposite the anchor

def _rand_scalar(rng):
    terms = {}
    for _ in range(rng.randrange(1, 3)):
        terms[Fraction(rng.randrange(-2, 4))] = rng.randrange(1, 8)
    return Q.QSeries(M.base, terms)


def _bridge_once(x, y, mid, target):
    """u(x,y)-transport one quadrangle toward `target` (same kind as mid,
    opposite to mid).  Returns the opposite pair (bx, by) or None."""
    if x.kind == POINT:
        bx, jx = M._flag_toward(x, target)
        by, jy = M._flag_toward(y, target)
    else:
        qx, jx0 = M._flag_toward(target, x)
        qy, jy0 = M._flag_toward(target, y)
        bx, jx = jx0, qx
        by, jy = jy0, qy
    cyc = [bx, target, by, jy, y, mid, x, jx]
    if len({repr(e) for e in cyc}) != 8:
        return None
    for i in range(8):
        if not M.incident(cyc[i - 1], cyc[i]):
            return None
    return bx, by


def measure2(x, y, rng, tries=60):
    """Robust transported value: direct bridge if the center is opposite the
    anchor, else via a random intermediate pencil opposite to both."""
    z0 = Z0_LINE if x.kind == POINT else Z0_POINT
    mid = M.join(x, y) if x.kind == POINT else M.meet(x, y)
    if mid is None:
        raise ValueError("no common pencil")
    if mid == z0:
        return anchor_depth(x, y)
    if M.distance(mid, z0) == 4:
        got = _bridge_once(x, y, mid, z0)
        if got is not None:
            return anchor_depth(*got)
    for _ in range(tries):
        if x.kind == POINT:
            m2 = M.line3(_rand_scalar(rng), _rand_scalar(rng), _rand_scalar(rng))
        else:
            m2 = M.point3(_rand_scalar(rng), _rand_scalar(rng), _rand_scalar(rng))
        if M.distance(m2, mid) != 4 or M.distance(m2, z0) != 4:
            continue
        got = _bridge_once(x, y, mid, m2)
        if got is None:
            continue
        bx, by = got
        got2 = _bridge_once(bx, by, m2, z0)
        if got2 is None:
            continue
        return anchor_depth(*got2)
    return None
