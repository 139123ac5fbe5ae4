"""Self-contained recursive valuation for the quadrangle (prototype).

u on a pencil = distance from a basepoint ball(c, r) in the chart tree.
Shallow centers: plain depth (ball(0,0)).  Deep centers: find an integral
anchor pencil residually opposite the center (certified by a zero-valuation
path, checked recursively), pull the anchor's basepoint back through the
projection, reconstruct (c, r) greedily, memoize.
"""
import itertools
import random
from fractions import Fraction

import valgon.quadrangle as Q
from valgon.geometry import POINT, LINE
from valgon.scalar import INF

Q.DEFAULT_PRECISION = Fraction(26)
M = Q.QuadrangleModel(3, 1, 0)
T1, T2, T3, APEX = Q.T1, Q.T2, Q.T3, Q.APEX

from scratch_rec import (v, tp, shallow, key_of, members_any, param_in,
                         tree_u, proj_onto)

FDEEP = Fraction(-9)

MEMO = {}
IN_PROGRESS = set()
STATS = {"resolve": 0, "fail": 0, "rand": 0}


def integral(e):
    return all(x.is_zero or v(x) >= 0 for x in e.payload[1:])


def pencil_cr(z, depth=0):
    if shallow(z):
        return (M.zero, Fraction(0))
    k = key_of(z)
    got = MEMO.get(k)
    if got == "FAIL":
        return None
    if got is not None:
        return got
    if k in IN_PROGRESS or depth >= 1:
        return None
    return _resolve(z, depth)


def u_int(x, y, depth=0):
    """Internal (chart-rational) value; None if unresolvable."""
    z = M.join(x, y) if x.kind == POINT else M.meet(x, y)
    if z is None:
        raise ValueError("no common pencil")
    got = pencil_cr(z, depth)
    if got is None:
        return None
    c, r = got
    return tree_u(param_in(z, x), param_in(z, y), c, r)


def _balance_root(z):
    """Root of a*A(l(a)) = A(B(a))*a'(a) for a T3 center, if computable."""
    if z.payload[0] != T3:
        return None
    p1, p2, p3 = z.payload[1:]
    # line [k,b,k']: l(a) = B(a)k + k', a'(a) = b + A(k)a
    # point (a,l,a'): members [κ,...]: b(κ) = A(κ)a + a', k'(κ) = l + B(a)κ
    try:
        if z.kind == LINE:
            k, b, k2 = p1, p2, p3
            if k.is_zero and not b.is_zero and not k2.is_zero:
                # a * A(k') = A(B(a)) * b ; with A ~ twisted square
                return M.twisted_balance(k2, b, LINE)
            if not k.is_zero:
                return b * M.A(k).inverse()
        else:
            a, l, a2 = p1, p2, p3
            if a.is_zero and not l.is_zero and not a2.is_zero:
                return M.twisted_balance(l, a2, POINT)
            if not a.is_zero:
                return l * M.B(a).inverse()
    except (ValueError, ArithmeticError, ZeroDivisionError, AttributeError):
        return None
    return None


def cert_params(z):
    params = [M.zero] + [tp(j) for j in range(-4, 5)]
    t = z.payload[0]
    if t == T3:
        p1, p2, p3 = z.payload[1:]
        extras = []
        if z.kind == LINE and not p1.is_zero:
            extras.append(p2 * M.A(p1).inverse())
            extras.append(M.B_inverse(p3 * p1.inverse()))
        if z.kind == POINT and not p1.is_zero:
            extras.append(p2 * M.B(p1).inverse())
        br = _balance_root(z)
        if br is not None:
            extras.append(br)
        for e in list(extras):
            params.append(e)
            for j in range(-2, 4):
                params.append(e + tp(j))
    seen, out = set(), []
    for p in params:
        kk = tuple(sorted(p.terms.items()))
        if kk in seen:
            continue
        seen.add(kk)
        out.append(p)
    return out


def _ckey(c):
    return tuple(sorted(c.terms.items()))


def _anchor_list(kind, rng):
    """Integral anchors with shallow pencils, unit patterns first."""
    out = []
    mk3 = M.line3 if kind == LINE else M.point3
    mk1 = M.line1 if kind == LINE else M.point1
    mk2 = M.line2 if kind == LINE else M.point2
    for co in ((0, 0, 0), (1, 0, 0), (0, 0, 1), (0, 1, 0), (1, 1, 0),
               (1, 0, 1), (0, 1, 1), (1, 1, 1)):
        out.append(mk3(*[M.one if c else M.zero for c in co]))
    return out


def _rand_integral(kind, rng):
    def s():
        terms = {}
        for _ in range(rng.randrange(1, 3)):
            terms[Fraction(rng.randrange(0, 4))] = rng.randrange(1, M.base.order)
        return Q.QSeries(M.base, terms)
    if kind == LINE:
        return M.line3(s(), s(), s())
    return M.point3(s(), s(), s())


def _resolve(z, depth=0):
    """Basepoint ball by anchored pullback.

    Every structured anchor is tried; probe-surviving pullbacks vote and
    the shallowest ball (minimal radius) with two agreeing anchors wins.
    A distorting anchor can only deepen the apparent basepoint, never
    flatten it, so the minimal radius is the honest one.
    """
    STATS["resolve"] += 1
    k = key_of(z)
    IN_PROGRESS.add(k)
    try:
        rng = random.Random(hash(k) & 0xffffffff)
        votes = {}
        def tally(h):
            if M.distance(z, h) != 4:
                return
            got = _pullback(z, h)
            if got is None:
                return
            kk = (_ckey(got[0]), got[1])
            votes[kk] = votes.get(kk, 0) + 1
            return votes[kk]
        for h in _anchor_list(z.kind, rng):
            if tally(h) == 3:
                # three independent anchors agree; distorting anchors have
                # never been seen to agree more than pairwise
                best = max(votes, key=votes.get)
                got = (Q.QSeries(M.base, dict(best[0])), best[1])
                MEMO[k] = got
                return got
        def pick():
            # only corroborated balls compete; the shallowest wins
            strong = {kk: n for kk, n in votes.items() if n >= 2}
            if not strong:
                return None
            rmin = min(r for _, r in strong)
            best = sorted(((n, kk) for kk, n in strong.items()
                           if kk[1] == rmin), reverse=True)
            if len(best) == 1 or best[0][0] > best[1][0]:
                return best[0][1]
            return None
        best = pick()
        extra = 0
        while best is None and extra < 30:
            STATS["rand"] += 1
            tally(_rand_integral(z.kind, rng))
            extra += 1
            best = pick()
        if best is None:
            MEMO[k] = "FAIL"
            STATS["fail"] += 1
            return None
        got = (Q.QSeries(M.base, dict(best[0])), best[1])
        MEMO[k] = got
        return got
    finally:
        IN_PROGRESS.discard(k)


def _pullback(z, h, max_digits=24):
    """Pull h's basepoint ball back through the projection onto h.

    r comes from the transported special-end/deep-probe value; c is found
    digit by digit against the transported metric; probe members validate
    the ball, with near-center probes rejecting distorting anchors.
    """
    hc, hr = pencil_cr(h)
    cache = {}

    def push(e):
        kk = None if e is None else tuple(sorted(e.terms.items()))
        if kk in cache:
            return cache[kk]
        x = members_any(z, [e] if e is not None else [])[0 if e is not None else -1][1]
        y = proj_onto(x, h)
        got = "bad" if y is None else param_in(h, y)
        cache[kk] = got
        return got

    def tu(e, f):
        pe, pf = push(e), push(f)
        if pe == "bad" or pf == "bad":
            return None
        return tree_u(pe, pf, hc, hr)

    E = tp(FDEEP)
    uSP = tu(None, E)
    if uSP is None or uSP == INF:
        return None
    r = uSP + FDEEP
    c = M.zero
    for _ in range(max_digits):
        g = tu(c, E)
        if g is None:
            return None
        if g == INF or g == 0:
            break
        j = r - g
        if j <= FDEEP:
            return None
        for gamma in range(1, M.base.order):
            c1 = c + tp(j, gamma)
            g1 = tu(c1, E)
            if g1 is not None and (g1 == INF or g1 < g):
                c = c1
                break
        else:
            return None
    else:
        return None
    # validation probes: shallow, near-center, and a second deep one;
    # near-center probes reject anchors whose transport distorts the ball
    probes = ([tp(jj) for jj in (-5, -2, 0, 1)]
              + [tp(-5) + tp(-1), M.zero,
                 c + tp(r - 1), c + tp(r + 1), c + tp(r + 1, 3),
                 tp(FDEEP, 3), None, E])
    for i in range(len(probes)):
        for j in range(i + 1, len(probes)):
            e, f = probes[i], probes[j]
            mv = tu(e, f)
            if mv is None:
                continue
            if tree_u(e, f, c, r) != mv:
                return None
    return (c, r)


# --- (U4) arbiter on random deep cycles ----------------------------------

def _deep_scalar(rng):
    terms = {}
    for _ in range(rng.randrange(1, 3)):
        terms[Fraction(rng.randrange(-3, 5))] = rng.randrange(1, M.base.order)
    return Q.QSeries(M.base, terms)


def sample_cycle(rng, tries=300):
    for _ in range(tries):
        x0 = M.point3(_deep_scalar(rng), _deep_scalar(rng), _deep_scalar(rng))
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
        return cyc
    return None


def check_u4(cyc):
    """Return list of violated rotation offsets, or None if unresolved."""
    vals = []
    for i in range(8):
        a, b = cyc[i - 1], cyc[(i + 1) % 8]
        s = u_int(a, b)
        if s is None:
            return None
        if s == INF:
            return "degenerate"
        vals.append((Fraction(s), Fraction(0)) if a.kind == POINT
                    else (Fraction(0), Fraction(s)))
    bad = []
    for o in range(8):
        def S(i):
            return vals[(o + i) % 8]
        def rt2(p):
            return (2 * p[1], p[0])
        def add(p, q):
            return (p[0] + q[0], p[1] + q[1])
        lhs = add(add(S(1), rt2(S(2))), S(3))
        rhs = add(add(S(5), rt2(S(6))), S(7))
        if lhs != rhs:
            bad.append(o)
    return bad


def main_u4(n=60, seed=3):
    rng = random.Random(seed)
    tot = ok = unres = deg = 0
    neg = 0
    for trial in range(n * 4):
        if tot >= n:
            break
        cyc = sample_cycle(rng)
        if cyc is None:
            continue
        try:
            got = check_u4(cyc)
        except Exception as ex:
            print("ERR", type(ex).__name__, ex)
            continue
        if got is None:
            unres += 1
            continue
        if got == "degenerate":
            deg += 1
            continue
        tot += 1
        if not got:
            ok += 1
        else:
            print("VIOLATION offsets", got)
            sides = []
            for i in range(8):
                sides.append(u_int(cyc[i - 1], cyc[(i + 1) % 8]))
            print("  sides:", sides)
        if tot % 10 == 0:
            print(f"... {tot} cycles, {ok} ok", flush=True)
    print(f"U4: {ok}/{tot} ok, {unres} unresolved, {deg} degenerate")
    print("stats:", STATS, "memo:", len(MEMO))


if __name__ == "__main__":
    main_u4()
