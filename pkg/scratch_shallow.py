"""Validate: on fully shallow cycles (all elements with integral coords),
plain chart depth satisfies (U4) -- and determine the kind scale."""
import random
from fractions import Fraction

import valgon.quadrangle as Q
from valgon.geometry import POINT, LINE
from valgon.scalar import INF

Q.DEFAULT_PRECISION = Fraction(10)
M = Q.QuadrangleModel(3, 1, 0)
T1, T2, T3, APEX = Q.T1, Q.T2, Q.T3, Q.APEX


def v(x):
    return x.valuation()


def integral(e):
    return all(x.is_zero or v(x) >= 0 for x in e.payload[1:])


def depth(x, y):
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
    m1 = min(Fraction(0), v(x)) if not x.is_zero else Fraction(0)
    m2 = min(Fraction(0), v(y)) if not y.is_zero else Fraction(0)
    return v(d) - m1 - m2


def param_in(z, x):
    tz, tx = z.payload[0], x.payload[0]
    if tz == T3:
        return None if tx == T2 else x.payload[1]
    if tz == T2:
        return None if tx == T1 else x.payload[3]
    if tz == T1:
        return None if tx == APEX else x.payload[2]
    return None if tx == APEX else x.payload[1]


def u0(x, y):
    z = M.join(x, y) if x.kind == POINT else M.meet(x, y)
    if z is None:
        raise ValueError("no common pencil")
    return depth(param_in(z, x), param_in(z, y))


def shallow_scalar(rng):
    terms = {}
    for _ in range(rng.randrange(1, 3)):
        terms[Fraction(rng.randrange(0, 5))] = rng.randrange(1, 8)
    return Q.QSeries(M.base, terms)


def sample_shallow_cycle(rng, tries=500):
    for _ in range(tries):
        x0 = M.point3(shallow_scalar(rng), shallow_scalar(rng), shallow_scalar(rng))
        pen = [e for e in M.pencil_sample(x0, 5, seed=rng.randrange(1 << 30))
               if e.payload[0] == T3 and integral(e)]
        if len(pen) < 2:
            continue
        x1, x7 = rng.sample(pen, 2)
        p1 = [e for e in M.pencil_sample(x1, 5, seed=rng.randrange(1 << 30))
              if e.payload[0] == T3 and e != x0 and integral(e)]
        p7 = [e for e in M.pencil_sample(x7, 5, seed=rng.randrange(1 << 30))
              if e.payload[0] == T3 and e != x0 and integral(e)]
        if not p1 or not p7:
            continue
        x2, x6 = rng.choice(p1), rng.choice(p7)
        if x2 == x6 or M.distance(x2, x6) != 4:
            continue
        l2 = [e for e in M.pencil_sample(x2, 4, seed=rng.randrange(1 << 30))
              if e.payload[0] == T3 and e != x1 and integral(e)]
        if not l2:
            continue
        x3 = rng.choice(l2)
        if M.distance(x3, x6) != 3:
            continue
        try:
            mid = M.path_between(x3, x6)
        except (ValueError, ArithmeticError, ZeroDivisionError):
            continue
        if len(mid) != 4:
            continue
        cyc = [x0, x1, x2] + mid + [x7]
        if len(set(cyc)) != 8:
            continue
        if not all(e.payload[0] == T3 and integral(e) for e in cyc):
            continue
        return cyc
    return None


def main():
    import itertools
    rng = random.Random(23)
    cycles = []
    for _ in range(60):
        c = sample_shallow_cycle(rng)
        if c is not None:
            cycles.append(c)
    print("cycles:", len(cycles), flush=True)
    sides = []
    for cyc in cycles:
        try:
            s = [u0(cyc[i - 1], cyc[(i + 1) % 8]) for i in range(8)]
        except Exception as e:
            print("err", e)
            continue
        sides.append(s)
    # test scale hypotheses: line sides multiplied by mu (in sqrt2 units
    # handled symbolically).  (U4) rotation r: s_{r+1} + w2*s_{r+2} + s_{r+3}
    # = opposite, w2 = sqrt2.  Try: (A) all values rational as computed;
    # (B) point sides *sqrt2; (C) line sides *sqrt2.
    for name, pmul, lmul in (("plain", 1, 1), ("pts*rt2", "r", 1), ("lin*rt2", 1, "r")):
        badcyc = 0
        for s in sides:
            ok = True
            for r in range(8):
                # value of side i with symbolic sqrt2: (rat, irr) parts
                def val(i, w_irr):
                    x = s[i % 8]
                    mul = pmul if i % 2 == 1 else lmul  # odd sides: points here
                    rat = irr = Fraction(0)
                    if mul == "r":
                        irr = x
                    else:
                        rat = x
                    if w_irr:  # multiply by sqrt2
                        rat, irr = 2 * irr, rat
                    return (rat, irr)
                def add(a, b):
                    return (a[0] + b[0], a[1] + b[1])
                lhs = add(add(val(r + 1, False), val(r + 2, True)), val(r + 3, False))
                rhs = add(add(val(r + 5, False), val(r + 6, True)), val(r + 7, False))
                if lhs != rhs:
                    ok = False
                    break
            if not ok:
                badcyc += 1
        print(f"scale {name}: {badcyc}/{len(sides)} cycles violate (U4)")
    # also print a few side vectors
    for s in sides[:5]:
        print("  sides", [str(x) for x in s])


if __name__ == "__main__":
    main()
