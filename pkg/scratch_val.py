"""Experiment: wedge/gauge valuation candidate for the quadrangle."""
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


def vmin(*vals):
    out = Fraction(0)
    for x in vals:
        if isinstance(x, Q.QSeries):
            if x.is_zero:
                continue
            x = x.valuation()
        if x < out:
            out = x
    return out


def N_point(p):
    tag = p.payload[0]
    if tag == T3:
        a, l, a2 = p.payload[1:]
        return vmin(a, l, a2)
    if tag == T2:
        k = p.payload[1]
        if k.is_zero:
            return Fraction(0)
        return vmin(v(k), 2 * v(k))
    return Fraction(0)


def N_line(L):
    tag = L.payload[0]
    if tag == T3:
        k, b, k2 = L.payload[1:]
        vals = []
        if not k.is_zero:
            vals.append(2 * v(k))
        if not b.is_zero:
            vals.append(v(b))
        if not k2.is_zero:
            vals.append(2 * v(k2))
        return vmin(*vals)
    if tag == T2:
        a = L.payload[1]
        if a.is_zero:
            return Fraction(0)
        return vmin(v(a), 2 * v(a))
    return Fraction(0)


def G_line3(z):
    """Gauge of a full line [k,b,k'] (pencil of points)."""
    k, b, k2 = z.payload[1:]
    cross = k * M.B(b) + M.B(M.A(k)) * k2
    vals = []
    if not k.is_zero:
        vals.append(v(k))
        vals.append(2 * v(k))
    if not b.is_zero:
        vals.append(v(b))
    if not k2.is_zero:
        vals.append(v(k2))
    if not cross.is_zero:
        vals.append(v(cross))
    return vmin(*vals)


def G_point3(z):
    """Gauge of a full point (a,l,a') (pencil of lines), dual twists."""
    a, l, a2 = z.payload[1:]
    cross = a * M.A(l) + M.A(M.B(a)) * a2
    vals = []
    if not a.is_zero:
        vals.append(v(a))
        vals.append(2 * v(a))
    if not l.is_zero:
        vals.append(2 * v(l))
    if not a2.is_zero:
        vals.append(v(a2))
    if not cross.is_zero:
        vals.append(v(cross))
    return vmin(*vals)


def depth_std(x, y):
    """Plain parameter depth with unit-ball basepoint; None = special end."""
    if x is None and y is None:
        return INF
    if x is None or y is None:
        t = y if x is None else x
        return -vmin(t)
    d = x + y
    if d.is_zero:
        return INF
    return v(d) - vmin(x) - vmin(y)


def u_points(x, y):
    z = M.join(x, y)
    if z is None:
        raise ValueError("not collinear")
    tag = z.payload[0]
    tx, ty = x.payload[0], y.payload[0]
    if tag == T3:
        G = G_line3(z)
        if tx == T2 or ty == T2:
            p = y if tx == T2 else x
            s = x if tx == T2 else y
            return G - N_point(s) - N_point(p)
        return v(x.payload[1] + y.payload[1]) + G - N_point(x) - N_point(y)
    if tag == T2:
        a, l = z.payload[1], z.payload[2]
        G = vmin(a, l)
        if tx == T1 or ty == T1:
            p = y if tx == T1 else x
            return G - N_point(p)
        return (v(x.payload[3] + y.payload[3]) + G
                - N_point(x) - N_point(y))
    if tag == T1:
        # points (k,b) and apex; parameter b, displacement TBD
        px = None if tx == APEX else x.payload[2]
        py = None if ty == APEX else y.payload[2]
        return depth_std(px, py)
    # apex line: members (x) and apex point; parameter x
    px = None if tx == APEX else x.payload[1]
    py = None if ty == APEX else y.payload[1]
    return depth_std(px, py)


def u_lines(x, y):
    z = M.meet(x, y)
    if z is None:
        raise ValueError("not concurrent")
    tag = z.payload[0]
    tx, ty = x.payload[0], y.payload[0]
    if tag == T3:
        G = G_point3(z)
        if tx == T2 or ty == T2:
            L = y if tx == T2 else x
            s = x if tx == T2 else y
            return G - N_line(s) - N_line(L)
        return v(x.payload[1] + y.payload[1]) + G - N_line(x) - N_line(y)
    if tag == T2:
        k, b = z.payload[1], z.payload[2]
        vals = []
        if not k.is_zero:
            vals.append(2 * v(k))
        if not b.is_zero:
            vals.append(v(b))
        G = vmin(*vals)
        if tx == T1 or ty == T1:
            L = y if tx == T1 else x
            return G - N_line(L)
        return (v(x.payload[3] + y.payload[3]) + G
                - N_line(x) - N_line(y))
    if tag == T1:
        px = None if tx == APEX else x.payload[2]
        py = None if ty == APEX else y.payload[2]
        return depth_std(px, py)
    px = None if tx == APEX else x.payload[1]
    py = None if ty == APEX else y.payload[1]
    return depth_std(px, py)


def u(x, y):
    return u_points(x, y) if x.kind == POINT else u_lines(x, y)


# ---------------------------------------------------------------------------
# E1: all-T3 cycles, check balance s1+s3 = s5+s7 (point sides), s2 = s6


def t3_scalar(rng):
    terms = {}
    for _ in range(rng.randrange(1, 3)):
        terms[Fraction(rng.randrange(-2, 5))] = rng.randrange(1, 8)
    return Q.QSeries(M.base, terms)


def sample_t3_cycle(rng, tries=400):
    for _ in range(tries):
        x0 = M.point3(t3_scalar(rng), t3_scalar(rng), t3_scalar(rng))
        pencil = [e for e in M.pencil_sample(x0, 5, seed=rng.randrange(1 << 30))
                  if e.payload[0] == T3]
        if len(pencil) < 2:
            continue
        x1, x7 = rng.sample(pencil, 2)
        pts1 = [e for e in M.pencil_sample(x1, 5, seed=rng.randrange(1 << 30))
                if e.payload[0] == T3 and e != x0]
        pts7 = [e for e in M.pencil_sample(x7, 5, seed=rng.randrange(1 << 30))
                if e.payload[0] == T3 and e != x0]
        if not pts1 or not pts7:
            continue
        x2, x6 = rng.choice(pts1), rng.choice(pts7)
        if x2 == x6 or M.distance(x2, x6) != 4:
            continue
        lines2 = [e for e in M.pencil_sample(x2, 4, seed=rng.randrange(1 << 30))
                  if e.payload[0] == T3 and e != x1]
        if not lines2:
            continue
        x3 = rng.choice(lines2)
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
        if not all(e.payload[0] == T3 for e in cyc):
            continue
        return cyc
    return None


def side_values(cyc):
    return [u(cyc[i - 1], cyc[(i + 1) % 8]) for i in range(8)]


def main():
    rng = random.Random(11)
    bad = 0
    total = 0
    imbalances = {}
    for trial in range(120):
        cyc = sample_t3_cycle(rng)
        if cyc is None:
            continue
        try:
            s = side_values(cyc)
        except (ValueError, ArithmeticError, ZeroDivisionError) as e:
            print("side error:", e)
            continue
        total += 1
        if total % 10 == 0:
            print("...", total, flush=True)
        d_pt = s[1] + s[3] - s[5] - s[7]
        d_ln = s[2] - s[6]
        if any(x < 0 for x in s):
            print("NEGATIVE side:", [str(x) for x in s])
            bad += 1
            continue
        if d_pt != 0 or d_ln != 0:
            bad += 1
            key = (d_pt, d_ln)
            imbalances[key] = imbalances.get(key, 0) + 1
            if imbalances[key] == 1 and len(imbalances) <= 3:
                print("imbalance", key, "sides", s)
    print(f"E1: {total} cycles, {bad} bad")
    for key, cnt in sorted(imbalances.items()):
        print("  imbalance", key, "x", cnt)


if __name__ == "__main__":
    main()
