"""Automatic basepoint reconstruction for deep pencils.

For each pencil center z, find a certified residually-opposite target h whose
pencil basepoint is already known, transport pair values through projections,
and reconstruct the ball-tree basepoint (c, r) in z's chart:
  r from u(SP, x_E) with an ultra-deep probe E,
  c digit-by-digit from g(e) = u(x_e, x_E) = r - min(r, v(e - c)).
Bootstraps: reconstructed pencils become transport targets for later ones.
"""
import itertools
from fractions import Fraction

import valgon.quadrangle as Q
from valgon.geometry import POINT, LINE
from valgon.scalar import INF

Q.DEFAULT_PRECISION = Fraction(26)
M = Q.QuadrangleModel(3, 1, 0)
T1, T2, T3, APEX = Q.T1, Q.T2, Q.T3, Q.APEX


def v(x):
    return x.valuation()


def tp(e, c=1):
    return M.t_power(Fraction(e), c)


def shallow(e):
    return all(x.is_zero or v(x) >= 0 for x in e.payload[1:])


def key_of(z):
    return (z.kind, z.payload[0]) + tuple(
        tuple(sorted(x.terms.items())) for x in z.payload[1:])


# --- pencil structure: members and chart --------------------------------

def members_any(z, params):
    """(param, element) pairs for z's pencil; param None = special member."""
    t = z.payload[0]
    out = []
    if z.kind == LINE:
        if t == T3:
            k, b, k2 = z.payload[1:]
            for a in params:
                out.append((a, M.point3(a, M.B(a) * k + k2, b + M.A(k) * a)))
            out.append((None, M.point2(k, b)))
        elif t == T2:   # line2 (a, l): points (a,l,a') + (a)
            a, l = z.payload[1:]
            for a2 in params:
                out.append((a2, M.point3(a, l, a2)))
            out.append((None, M.point1(a)))
        elif t == T1:   # line1 [k]: points (k,b) + (inf)
            k = z.payload[1]
            for b in params:
                out.append((b, M.point2(k, b)))
            out.append((None, M.apex_point()))
        else:           # apex line: points (a) + (inf)
            for a in params:
                out.append((a, M.point1(a)))
            out.append((None, M.apex_point()))
    else:
        if t == T3:
            a, l, a2 = z.payload[1:]
            for k in params:
                out.append((k, M.line3(k, M.A(k) * a + a2, l + M.B(a) * k)))
            out.append((None, M.line2(a, l)))
        elif t == T2:   # point2 (k,b): lines [k,b,k'] + [k]
            k, b = z.payload[1:]
            for k2 in params:
                out.append((k2, M.line3(k, b, k2)))
            out.append((None, M.line1(k)))
        elif t == T1:   # point1 (a): lines (a,l)... line2 (a,l) + [inf]
            a = z.payload[1]
            for l in params:
                out.append((l, M.line2(a, l)))
            out.append((None, M.apex_line()))
        else:           # apex point: lines [k] + [inf]
            for k in params:
                out.append((k, M.line1(k)))
            out.append((None, M.apex_line()))
    return out


def param_in(z, x):
    """Chart parameter of member x in pencil(z); None for the special one."""
    tz, tx = z.payload[0], x.payload[0]
    if tz == T3:
        return None if tx == T2 else x.payload[1]
    if tz == T2:
        return None if tx == T1 else x.payload[3]
    if tz == T1:
        return None if tx == APEX else x.payload[2]
    return None if tx == APEX else x.payload[1]


def tree_u(e, f, c, r):
    if e is None and f is None:
        return INF
    if e is None or f is None:
        t_ = f if e is None else e
        d = t_ + c
        m = r if d.is_zero else min(r, v(d))
        return r - m
    d = e + f
    if d.is_zero:
        return INF
    m1 = r if (e + c).is_zero else min(r, v(e + c))
    m2 = r if (f + c).is_zero else min(r, v(f + c))
    return v(d) + r - m1 - m2


# --- rule table ----------------------------------------------------------

MEMO = {}   # key_of(z) -> (c, r)


def pencil_cr(z):
    if shallow(z):
        return (M.zero, Fraction(0))
    return MEMO.get(key_of(z))


def u_eval(x, y):
    z = M.join(x, y) if x.kind == POINT else M.meet(x, y)
    if z is None:
        raise ValueError("no pencil")
    got = pencil_cr(z)
    if got is None:
        return None
    c, r = got
    return tree_u(param_in(z, x), param_in(z, y), c, r)


# --- certification -------------------------------------------------------

def cert_candidates(z):
    """Members of z's pencil used as certificate seeds."""
    params = [M.zero] + [tp(j) for j in range(-6, 7)] + [tp(Fraction(j, 2)) for j in (-5, -3, -1, 1)]
    t = z.payload[0]
    if t == T3:
        if z.kind == LINE:
            k, b, k2 = z.payload[1:]
            if not k.is_zero:
                a0 = b * M.A(k).inverse()
                a1 = M.B_inverse(k2 * k.inverse())
                params += [a0, a1]
                params += [a0 + tp(j) for j in range(-4, 5)]
                params += [a1 + tp(j) for j in range(-4, 5)]
        else:
            a, l, a2 = z.payload[1:]
            if not a.is_zero:
                k0 = l * M.B(a).inverse()
                params += [k0]
                params += [k0 + tp(j) for j in range(-4, 5)]
    seen, uniq = set(), []
    for p in params:
        kk = tuple(sorted(p.terms.items()))
        if kk in seen:
            continue
        seen.add(kk)
        uniq.append(p)
    return [e for _, e in members_any(z, uniq)]


def certify(z, h):
    for p in cert_candidates(z):
        if M.distance(p, h) != 3:
            continue
        try:
            pth = M.path_between(p, h)
        except (ValueError, ArithmeticError, ZeroDivisionError):
            continue
        L, q = pth[1], pth[2]
        try:
            if u_eval(z, L) != 0:
                continue
            if u_eval(p, q) != 0:
                continue
            if u_eval(L, h) != 0:
                continue
        except (ValueError, ArithmeticError, ZeroDivisionError):
            continue
        return p
    return None


def proj_onto(x, h):
    if M.distance(x, h) != 3:
        return None
    try:
        return M.path_between(x, h)[2]
    except (ValueError, ArithmeticError, ZeroDivisionError):
        return None


# --- reconstruction ------------------------------------------------------

FDEEP = Fraction(-9)
GEN = None  # GF(8) nonzero elements as coefficient codes


def field_units():
    global GEN
    if GEN is None:
        # coefficients are ints 1..7 indexing GF(8) elements
        GEN = list(range(1, M.base.order))
    return GEN


class Transporter:
    """Measure true u on pencil(z) by projection onto certified target h."""

    def __init__(self, z, h):
        self.z, self.h = z, h
        self.hc, self.hr = pencil_cr(h)
        self.cache = {}

    def u(self, e, f):
        """e, f chart params of z (None = special member)."""
        ke = None if e is None else tuple(sorted(e.terms.items()))
        kf = None if f is None else tuple(sorted(f.terms.items()))
        kk = (ke, kf) if (ke or ()) <= (kf or ()) else (kf, ke)
        if kk in self.cache:
            return self.cache[kk]
        mx = dict(members_any(self.z, []))  # special only
        x = members_any(self.z, [] if e is None else [e])[0 if e is not None else -1][1]
        y = members_any(self.z, [] if f is None else [f])[0 if f is not None else -1][1]
        px, py = proj_onto(x, self.h), proj_onto(y, self.h)
        if px is None or py is None:
            val = None
        else:
            val = tree_u(param_in(self.h, px), param_in(self.h, py),
                         self.hc, self.hr)
        self.cache[kk] = val
        return val


def reconstruct(z, targets, max_digits=30):
    """Return (c, r, hname) or a failure string."""
    fails = []
    for h, hname in targets:
        if h.kind != z.kind or M.distance(z, h) != 4:
            continue
        if pencil_cr(h) is None:
            continue
        p = certify(z, h)
        if p is None:
            continue
        tr = Transporter(z, h)
        E = tp(FDEEP)
        uSP = tr.u(None, E)
        if uSP is None or uSP == INF:
            fails.append(f"degenerate via {hname}")
            continue
        r = uSP + FDEEP          # u(SP,E) = r - v(E) when v(c) > FDEEP
        # reconstruct c to precision r: g(e) = r - min(r, v(e - c))
        c = M.zero
        ok = True
        for _ in range(max_digits):
            g = tr.u(c if not c.is_zero else M.zero, E)
            if g is None or g == INF:
                ok = False
                break
            if g == 0:
                break            # v(c_true - c) >= r: precise enough
            j = r - g            # v(c_true - c) = r - g
            if j <= FDEEP:
                ok = False
                break
            found = False
            for gamma in field_units():
                c1 = c + tp(j, gamma)
                g1 = tr.u(c1, E)
                if g1 is not None and (g1 == INF or g1 < g):
                    c = c1
                    found = True
                    break
            if not found:
                ok = False
                break
        else:
            ok = False
        if not ok:
            fails.append(f"RECON-FAIL via {hname}")
            continue
        # validate on a grid
        probes = [tp(j) for j in (-6, -4, -3, -1, 0, 2)] + [M.zero, None]
        bad = 0
        for e, f in itertools.combinations(probes, 2):
            mv = tr.u(e if e is not None else None, f if f is not None else None)
            if mv is None:
                continue
            tv = tree_u(e, f, c, r)
            if tv != mv:
                bad += 1
        if bad:
            fails.append(f"VALIDATE-FAIL via {hname} ({bad} bad)")
            continue
        MEMO[key_of(z)] = (c, r)
        return (c, r, hname)
    return "; ".join(fails) if fails else "NO-TARGET"


def fmt_c(c):
    if c.is_zero:
        return "0"
    return "+".join(f"{g}t^{e}" for e, g in sorted(c.terms.items()))


def run_grid(grid, targets):
    for z, label in grid:
        if key_of(z) in MEMO or shallow(z):
            continue
        try:
            got = reconstruct(z, targets)
        except Exception as ex:
            print(f"{label}: ERROR {type(ex).__name__} {ex}")
            continue
        if isinstance(got, str):
            print(f"{label}: {got}")
        else:
            c, r, hname = got
            print(f"{label}: (c={fmt_c(c)}, r={r}) via {hname}")


def base_targets():
    tg = [(M.apex_line(), "[inf]"), (M.line1(M.zero), "[0]"),
          (M.line2(M.zero, M.zero), "[0,0]"),
          (M.line3(M.zero, M.zero, M.zero), "[0,0,0]"),
          (M.apex_point(), "(inf)"), (M.point1(M.zero), "(0)"),
          (M.point2(M.zero, M.zero), "(0,0)"),
          (M.point3(M.zero, M.zero, M.zero), "(0,0,0)")]
    # extra integral anchors for residue coverage
    for gma in (1,):
        for co in ((1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 0), (1, 0, 1),
                   (0, 1, 1), (1, 1, 1)):
            s = [M.one if c else M.zero for c in co]
            tg.append((M.line3(*s), f"[{co[0]},{co[1]},{co[2]}]"))
            tg.append((M.point3(*s), f"({co[0]},{co[1]},{co[2]})"))
    return tg


def wave1():
    grid = []
    # single-deep monomial T3 centers, both kinds
    for j in (1, 2, 3):
        for pos in range(3):
            co = [M.zero, M.zero, M.zero]
            co[pos] = tp(-j)
            grid.append((M.line3(*co), f"L[{pos}:t^-{j}]"))
            grid.append((M.point3(*co), f"P[{pos}:t^-{j}]"))
    # deep 2-,1-tuple centers
    for j in (1, 2):
        grid.append((M.point2(tp(-j), M.zero), f"P2(t^-{j},0)"))
        grid.append((M.point2(M.zero, tp(-j)), f"P2(0,t^-{j})"))
        grid.append((M.line2(tp(-j), M.zero), f"L2(t^-{j},0)"))
        grid.append((M.line2(M.zero, tp(-j)), f"L2(0,t^-{j})"))
        grid.append((M.point1(tp(-j)), f"P1(t^-{j})"))
        grid.append((M.line1(tp(-j)), f"L1[t^-{j}]"))
    return grid


def wave2():
    grid = []
    es = [None, -2, -1, 1]
    for e1 in es:
        for e2 in es:
            for e3 in es:
                nneg = sum(1 for e in (e1, e2, e3) if e is not None and e < 0)
                if nneg < 1:
                    continue
                co = [M.zero if e is None else tp(e) for e in (e1, e2, e3)]
                grid.append((M.line3(*co), f"L[{e1},{e2},{e3}]"))
                grid.append((M.point3(*co), f"P({e1},{e2},{e3})"))
    return grid


def main():
    targets = base_targets()
    grid = wave1() + wave2()
    for it in range(3):
        print(f"=== pass {it} ===", flush=True)
        before = len(MEMO)
        run_grid(grid, targets + [(z, lb) for z, lb in grid if key_of(z) in MEMO])
        print(f"  memo {before} -> {len(MEMO)}", flush=True)
        if len(MEMO) == before and it > 0:
            break


if __name__ == "__main__":
    main()
