"""Candidate u0: plain parameter depth in each pencil's canonical chart
(hat-rack basepoint), tested against the coupled closed-path law
(point scale 1, line scale sqrt(2))."""
import random
from fractions import Fraction

import valgon.quadrangle as Q
from valgon.geometry import POINT, LINE
from valgon.scalar import INF

Q.DEFAULT_PRECISION = Fraction(8)

M = Q.QuadrangleModel(3, 1, 0)
T1, T2, T3, APEX = Q.T1, Q.T2, Q.T3, Q.APEX


def v(x):
    return x.valuation()


def depth(x, y):
    """Plain depth; None marks the special end of the pencil."""
    if x is None and y is None:
        return INF
    if x is None or y is None:
        t = y if x is None else x
        if t.is_zero:
            return Fraction(0)
        return max(Fraction(0), -v(t))
    d = x + y
    if d.is_zero:
        return INF
    lo = Fraction(0)
    for s in (x, y):
        if not s.is_zero and v(s) < lo:
            pass
    m1 = min(Fraction(0), v(x)) if not x.is_zero else Fraction(0)
    m2 = min(Fraction(0), v(y)) if not y.is_zero else Fraction(0)
    return v(d) - m1 - m2


def param_in(z, x):
    """Chart parameter of pencil member x in the pencil of z (None=special)."""
    tz = z.payload[0]
    tx = x.payload[0]
    if tz == T3:
        # members: T2 special + T3 with param = coord 1 (a or k)
        return None if tx == T2 else x.payload[1]
    if tz == T2:
        # members: 1-tuple special + T3 with param = coord 3 (a' or k')
        return None if tx == T1 else x.payload[3]
    if tz == T1:
        # members: apex special + T2 with param = coord 2 (b or l)
        return None if tx == APEX else x.payload[2]
    # apex: members: apex of other kind special + 1-tuples, param = coord 1
    return None if tx == APEX else x.payload[1]


def u0(x, y):
    if x.kind == POINT:
        z = M.join(x, y)
    else:
        z = M.meet(x, y)
    if z is None:
        raise ValueError("no common pencil")
    return depth(param_in(z, x), param_in(z, y))


def side_values(cyc):
    return [u0(cyc[i - 1], cyc[(i + 1) % 8]) for i in range(8)]


def coupled_ok(s, point_odd):
    """point_odd: True if odd-index sides are point sides."""
    if point_odd:
        P1, P3 = s[1] - s[5], s[3] - s[7]
        L0, L2 = s[0] - s[4], s[2] - s[6]
    else:
        P1, P3 = s[0] - s[4], s[2] - s[6]
        L0, L2 = s[1] - s[5], s[3] - s[7]
    # rotations of: p_{r+1}+sqrt2*l_{r+2}+p_{r+3} = ... with l in sqrt2-units
    return P1 == -(L0 + L2) and P3 == L0 - L2
