"""Fit the pencil basepoint map: for monomial line3 centers, certify a
residually-opposite hat-rack element via zero-valuation paths (checked with
plain-depth charts on shallow pencils), transport pair values, and solve the
tree-form basepoint (c, r)."""
import itertools
import random
from fractions import Fraction

import valgon.quadrangle as Q
from valgon.geometry import POINT, LINE
from valgon.scalar import INF

Q.DEFAULT_PRECISION = Fraction(24)
M = Q.QuadrangleModel(3, 1, 0)
T1, T2, T3, APEX = Q.T1, Q.T2, Q.T3, Q.APEX


def v(x):
    return x.valuation()


def shallow(e):
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


def u_known(x, y):
    """Plain chart depth; only valid when the center is shallow."""
    z = M.join(x, y) if x.kind == POINT else M.meet(x, y)
    if z is None:
        raise ValueError("no pencil")
    if not shallow(z):
        return None
    return depth(param_in(z, x), param_in(z, y))


HR_LINES = [M.apex_line(), M.line1(M.zero), M.line2(M.zero, M.zero),
            M.line3(M.zero, M.zero, M.zero)]
HR_NAMES = ["[inf]", "[0]", "[0,0]", "[0,0,0]"]


def certify(z, h, cands):
    """Is z residually opposite h?  Try candidate points p incident z."""
    for p in cands:
        if M.distance(p, h) != 3:
            continue
        try:
            pth = M.path_between(p, h)
        except (ValueError, ArithmeticError, ZeroDivisionError):
            continue
        L, q = pth[1], pth[2]
        c1 = u_known(z, L)
        if c1 != 0:
            continue
        c2 = u_known(p, q)
        if c2 != 0:
            continue
        c3 = u_known(L, h)
        if c3 != 0:
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


def members(z, params):
    """Pencil members of line3 z for given chart params + special."""
    k, b, k2 = z.payload[1:]
    out = []
    for a in params:
        out.append((a, M.point3(a, M.B(a) * k + k2, b + M.A(k) * a)))
    out.append(("SP", M.point2(k, b)))
    return out


def cand_points(z):
    k, b, k2 = z.payload[1:]
    params = set()
    raw = [M.zero]
    for j in range(-6, 8):
        raw.append(M.t_power(j))
    if not k.is_zero:
        a0 = b * M.A(k).inverse()          # makes a' = 0
        a1 = M.B_inverse(k2 * k.inverse()) # makes l = 0
        raw += [a0, a1]
        for j in range(-4, 6):
            raw.append(a0 + M.t_power(j))
            raw.append(a1 + M.t_power(j))
    out = [M.point2(k, b)]
    seen = set()
    for a in raw:
        key = repr(a.terms) if hasattr(a, 'terms') else repr(a)
        if key in seen:
            continue
        seen.add(key)
        out.append(M.point3(a, M.B(a) * k + k2, b + M.A(k) * a))
    return out


def tree_u(e, f, c, r):
    """Tree-form value for chart params (None = SP end)."""
    if e is None and f is None:
        return INF
    if e is None or f is None:
        t = f if e is None else e
        d = t + c
        m = r if d.is_zero else min(r, v(d))
        return r - m
    d = e + f
    if d.is_zero:
        return INF
    m1 = r if (e + c).is_zero else min(r, v(e + c))
    m2 = r if (f + c).is_zero else min(r, v(f + c))
    return v(d) + r - m1 - m2


def fit_center(z, label):
    cands = cand_points(z)
    h_ok = None
    for h, name in zip(HR_LINES, HR_NAMES):
        if M.distance(z, h) != 4:
            continue
        p = certify(z, h, cands)
        if p is not None:
            h_ok = (h, name)
            break
    if h_ok is None:
        print(f"{label}: NO certified hat-rack transport")
        return
    h, name = h_ok
    params = [M.t_power(j) for j in (-10, -3, -1, 0, 1, 3, 10)] + [M.zero]
    mem = members(z, params)
    meas = {}
    for (pa, x), (pb, y) in itertools.combinations(mem, 2):
        if x == y:
            continue
        px, py = proj_onto(x, h), proj_onto(y, h)
        if px is None or py is None:
            continue
        val = u_known(px, py)
        if val is None:
            continue
        meas[(str(pa) if pa == "SP" else None or repr(pa), repr(pb))] = (pa, pb, val)
    # fit (c, r): candidates for c
    k, b, k2 = z.payload[1:]
    c_cands = [M.zero]
    if not k.is_zero:
        c_cands.append(b * M.A(k).inverse())
        c_cands.append(M.B_inverse(k2 * k.inverse()))
    best = None
    for c in c_cands:
        # recover r from a deep pair
        for r_num in [Fraction(n, 2) for n in range(-16, 17)]:
            ok = True
            for pa, pb, val in meas.values():
                e = None if isinstance(pa, str) else pa
                f = None if isinstance(pb, str) else pb
                tv = tree_u(e, f, c, r_num)
                if tv != val:
                    ok = False
                    break
            if ok and meas:
                best = (c, r_num)
                break
        if best:
            break
    if best:
        c, r = best
        cs = "0" if c.is_zero else f"v={v(c)}:{sorted(c.terms.items())[:2]}"
        print(f"{label}: via {name}, n={len(meas)} fits (c={cs}, r={r})")
    else:
        print(f"{label}: via {name}, n={len(meas)} NO tree-form fit; sample:")
        for key, (pa, pb, val) in list(meas.items())[:8]:
            print("   ", pa if isinstance(pa, str) else f"t^{v(pa) if not pa.is_zero else 'z'}",
                  pb if isinstance(pb, str) else f"t^{v(pb) if not pb.is_zero else 'z'}", "->", val)


def tp(e, c=1):
    return M.t_power(e, c)


def main():
    grid = []
    for ek in [None, -2, -1, 1, 2]:
        for eb in [None, -2, -1, 1]:
            for ew in [None, -2, -1, 1]:
                k = M.zero if ek is None else tp(ek)
                b = M.zero if eb is None else tp(eb)
                k2 = M.zero if ew is None else tp(ew)
                grid.append((M.line3(k, b, k2), f"[{ek},{eb},{ew}]"))
    for z, label in grid:
        try:
            fit_center(z, label)
        except Exception as e:
            print(label, "ERROR", type(e).__name__, e)


if __name__ == "__main__":
    main()


# ---------------------------------------------------------------------------
# dual fit: point3 centers, chart param k, hat-rack point targets

HR_POINTS = [M.apex_point(), M.point1(M.zero), M.point2(M.zero, M.zero),
             M.point3(M.zero, M.zero, M.zero)]
HR_PNAMES = ["(inf)", "(0)", "(0,0)", "(0,0,0)"]


def members_dual(z, params):
    a, l, a2 = z.payload[1:]
    out = []
    for k in params:
        out.append((k, M.line3(k, M.A(k) * a + a2, l + M.B(a) * k)))
    out.append(("SP", M.line2(a, l)))
    return out


def cand_lines(z):
    a, l, a2 = z.payload[1:]
    raw = [M.zero]
    for j in range(-6, 8):
        raw.append(M.t_power(j))
    if not a.is_zero:
        k0 = M.B_inverse(l * M.B(a).inverse() * M.B(a).inverse())  # unused guard
    extra = []
    if not a.is_zero:
        # k making b-coord zero: A(k)a = a2 -> k = A_inv(a2/a)... A(k) = a2/a
        q = a2 * a.inverse()
        try:
            k1 = M.A_inverse(q) if hasattr(M, 'A_inverse') else None
        except Exception:
            k1 = None
        if k1 is not None:
            extra.append(k1)
        # k making l-coord zero: B(a)k = l... wait member line l-coord = l + B(a)k
        extra.append(l * M.B(a).inverse() if not a.is_zero else None)
    raw += [e for e in extra if e is not None]
    for e in list(extra):
        if e is None:
            continue
        for j in range(-4, 6):
            raw.append(e + M.t_power(j))
    out = [M.line2(a, l)]
    seen = set()
    for k in raw:
        key = repr(k.terms)
        if key in seen:
            continue
        seen.add(key)
        out.append(M.line3(k, M.A(k) * a + a2, l + M.B(a) * k))
    return out


def fit_center_dual(z, label):
    cands = cand_lines(z)
    h_ok = None
    for h, name in zip(HR_POINTS, HR_PNAMES):
        if M.distance(z, h) != 4:
            continue
        p = certify(z, h, cands)
        if p is not None:
            h_ok = (h, name)
            break
    if h_ok is None:
        print(f"{label}: NO certified hat-rack transport")
        return
    h, name = h_ok
    params = [M.t_power(j) for j in (-10, -3, -1, 0, 1, 3, 10)] + [M.zero]
    mem = members_dual(z, params)
    meas = {}
    for (pa, x), (pb, y) in itertools.combinations(mem, 2):
        if x == y:
            continue
        px, py = proj_onto(x, h), proj_onto(y, h)
        if px is None or py is None:
            continue
        val = u_known(px, py)
        if val is None:
            continue
        meas[(repr(pa), repr(pb))] = (pa, pb, val)
    a, l, a2 = z.payload[1:]
    c_cands = [M.zero]
    if not a.is_zero:
        c_cands.append(l * M.B(a).inverse())
    best = None
    for c in c_cands:
        for r_num in [Fraction(n, 2) for n in range(-16, 17)]:
            ok = True
            for pa, pb, val in meas.values():
                e = None if isinstance(pa, str) else pa
                f = None if isinstance(pb, str) else pb
                if tree_u(e, f, c, r_num) != val:
                    ok = False
                    break
            if ok and meas:
                best = (c, r_num)
                break
        if best:
            break
    if best:
        c, r = best
        cs = "0" if c.is_zero else f"v={v(c)}"
        print(f"{label}: via {name}, n={len(meas)} fits (c={cs}, r={r})")
    else:
        print(f"{label}: via {name}, n={len(meas)} NO fit; sample:")
        for key, (pa, pb, val) in list(meas.items())[:8]:
            print("   ", pa if isinstance(pa, str) else f"t^{v(pa) if not pa.is_zero else 'z'}",
                  pb if isinstance(pb, str) else f"t^{v(pb) if not pb.is_zero else 'z'}", "->", val)


def main_dual():
    grid = []
    for ea in [None, -2, -1, 1, 2]:
        for el in [None, -2, -1, 1]:
            for ew in [None, -2, -1, 1]:
                a = M.zero if ea is None else tp(ea)
                l = M.zero if el is None else tp(el)
                a2 = M.zero if ew is None else tp(ew)
                grid.append((M.point3(a, l, a2), f"({ea},{el},{ew})"))
    for z, label in grid:
        try:
            fit_center_dual(z, label)
        except Exception as e:
            print(label, "ERROR", type(e).__name__, e)


# ---------------------------------------------------------------------------
# phase 2: rule-based evaluation + multi-step certification

def vz(x):
    """valuation with None for zero."""
    return None if x.is_zero else x.valuation()


def rule_line3(k, b, k2):
    """Return (c, r) for the pencil of [k,b,k2] in the a-chart, or None."""
    kv, bv, wv = vz(k), vz(b), vz(k2)
    sh = lambda x: x is None or x >= 0
    if sh(kv) and sh(bv) and sh(wv):
        return (M.zero, Fraction(0))
    if kv is not None and kv < 0:
        # k dominant: certified when v(b) >= 2v(k), v(k2) >= v(k) (observed)
        if (bv is None or bv >= 2 * kv) and (wv is None or wv >= kv):
            return (b * M.A(k).inverse(), Fraction(-2 * kv))
        return None
    if wv is not None and wv < 0 and sh(kv) and sh(bv):
        return (M.zero, Fraction(2 * wv))
    return None


def rule_point3(a, l, a2):
    av, lv, wv = vz(a), vz(l), vz(a2)
    sh = lambda x: x is None or x >= 0
    if sh(av) and sh(lv) and sh(wv):
        return (M.zero, Fraction(0))
    if av is not None and av < 0:
        if (lv is None or lv >= 2 * av) and (wv is None or wv >= av):
            return (l * M.B(a).inverse(), Fraction(-av))
        return None
    if wv is not None and wv < 0 and sh(av) and sh(lv):
        return (M.zero, Fraction(wv))
    return None


EXTRA_RULES = {}  # (kind, key) -> callable(coords)->(c,r) -- filled as fitted


def pencil_cr(z):
    """(c, r, chartfn) for center z, or None if not covered by rules."""
    t = z.payload[0]
    if t == T3:
        if z.kind == LINE:
            got = rule_line3(*z.payload[1:])
        else:
            got = rule_point3(*z.payload[1:])
        return got
    # 2-, 1-, 0-tuple centers: shallow -> plain; else not covered
    if all(x.is_zero or v(x) >= 0 for x in z.payload[1:]):
        return (M.zero, Fraction(0))
    return None


def u_eval(x, y):
    z = M.join(x, y) if x.kind == POINT else M.meet(x, y)
    if z is None:
        raise ValueError("no pencil")
    got = pencil_cr(z)
    if got is None:
        return None
    c, r = got
    return tree_u(param_in(z, x), param_in(z, y), c, r)


def certify2(z, h, cands):
    for p in cands:
        if M.distance(p, h) != 3:
            continue
        try:
            pth = M.path_between(p, h)
        except (ValueError, ArithmeticError, ZeroDivisionError):
            continue
        L, q = pth[1], pth[2]
        try:
            c1 = u_eval(z, L)
            if c1 != 0:
                continue
            c2 = u_eval(p, q)
            if c2 != 0:
                continue
            c3 = u_eval(L, h)
            if c3 != 0:
                continue
        except (ValueError, ArithmeticError, ZeroDivisionError):
            continue
        return p
    return None


def fit2_line3(z, label, targets):
    cands = cand_points(z)
    for h, hname in targets:
        if M.distance(z, h) != 4:
            continue
        p = certify2(z, h, cands)
        if p is None:
            continue
        hcr = pencil_cr(h)
        if hcr is None:
            continue
        hc, hr = hcr
        params = [M.t_power(j) for j in (-10, -3, -1, 0, 1, 3, 10)] + [M.zero]
        mem = members(z, params)
        meas = []
        for (pa, x), (pb, y) in itertools.combinations(mem, 2):
            if x == y:
                continue
            px, py = proj_onto(x, h), proj_onto(y, h)
            if px is None or py is None:
                continue
            val = tree_u(param_in(h, px), param_in(h, py), hc, hr)
            meas.append((pa, pb, val))
        k, b, k2 = z.payload[1:]
        c_cands = [M.zero]
        if not k.is_zero:
            c_cands += [b * M.A(k).inverse(), M.B_inverse(k2 * k.inverse())]
        best = None
        for c in c_cands:
            for r_num in [Fraction(n, 2) for n in range(-24, 25)]:
                ok = all(tree_u(None if isinstance(pa, str) else pa,
                                None if isinstance(pb, str) else pb, c, r_num) == val
                         for pa, pb, val in meas)
                if ok and meas:
                    best = (c, r_num)
                    break
            if best:
                break
        if best:
            c, r = best
            cs = "0" if c.is_zero else f"v={v(c)}"
            print(f"{label}: via {hname}, n={len(meas)} fits (c={cs}, r={r})")
        else:
            print(f"{label}: via {hname}, n={len(meas)} NO fit; sample:")
            for pa, pb, val in meas[:10]:
                print("   ",
                      pa if isinstance(pa, str) else (f"t^{v(pa)}" if not pa.is_zero else "0"),
                      pb if isinstance(pb, str) else (f"t^{v(pb)}" if not pb.is_zero else "0"),
                      "->", val)
        return
    print(f"{label}: no certified target")


def main2():
    targets = []
    for j in (1, 2, 3, 4):
        targets.append((M.line3(tp(-j), M.zero, M.zero), f"[t^-{j},0,0]"))
        targets.append((M.line3(M.zero, M.zero, tp(-j)), f"[0,0,t^-{j}]"))
    targets.append((M.apex_line(), "[inf]"))
    targets.append((M.line1(M.zero), "[0]"))
    targets.append((M.line2(M.zero, M.zero), "[0,0]"))
    targets.append((M.line3(M.zero, M.zero, M.zero), "[0,0,0]"))
    grid = [
        (M.line3(M.zero, tp(-1), M.zero), "[0,t^-1,0]"),
        (M.line3(M.zero, tp(-2), M.zero), "[0,t^-2,0]"),
        (M.line3(M.zero, tp(-3), M.zero), "[0,t^-3,0]"),
        (M.line3(tp(1), tp(-1), M.zero), "[t,t^-1,0]"),
        (M.line3(tp(1), tp(-2), tp(1)), "[t,t^-2,t]"),
        (M.line3(tp(-1), tp(-2), M.zero), "[t^-1,t^-2,0]"),
        (M.line3(tp(-1), tp(-3), M.zero), "[t^-1,t^-3,0]"),
        (M.line3(tp(-1), M.zero, tp(-1)), "[t^-1,0,t^-1]"),
        (M.line3(tp(-1), M.zero, tp(-2)), "[t^-1,0,t^-2]"),
        (M.line3(tp(-2), M.zero, tp(-1)), "[t^-2,0,t^-1]"),
        (M.line3(M.zero, tp(-1), tp(-1)), "[0,t^-1,t^-1]"),
        (M.line3(tp(-1), tp(-1), tp(-1)), "[t^-1,t^-1,t^-1]"),
    ]
    for z, label in grid:
        try:
            fit2_line3(z, label, targets)
        except Exception as e:
            print(label, "ERROR", type(e).__name__, e)


def debug_center(z, label, targets):
    """Try ALL targets; print every certified transport's fitted (c,r)."""
    cands = cand_points(z)
    params = [M.t_power(j) for j in (-10, -3, -1, 0, 1, 3, 10)] + [M.zero]
    mem = members(z, params)
    k, b, k2 = z.payload[1:]
    c_cands = [M.zero]
    if not k.is_zero:
        c_cands += [b * M.A(k).inverse(), M.B_inverse(k2 * k.inverse())]
    if not k2.is_zero:
        c_cands += [k2, b + k2]
    if not b.is_zero:
        c_cands += [b]
    print("==", label)
    for h, hname in targets:
        if M.distance(z, h) != 4:
            continue
        p = certify2(z, h, cands)
        if p is None:
            continue
        hcr = pencil_cr(h)
        if hcr is None:
            continue
        hc, hr = hcr
        meas = []
        for (pa, x), (pb, y) in itertools.combinations(mem, 2):
            if x == y:
                continue
            px, py = proj_onto(x, h), proj_onto(y, h)
            if px is None or py is None:
                continue
            val = tree_u(param_in(h, px), param_in(h, py), hc, hr)
            meas.append((pa, pb, val))
        best = None
        for c in c_cands:
            for r_num in [Fraction(n, 2) for n in range(-24, 25)]:
                ok = all(tree_u(None if isinstance(pa, str) else pa,
                                None if isinstance(pb, str) else pb, c, r_num) == val
                         for pa, pb, val in meas)
                if ok and meas:
                    best = (c, r_num)
                    break
            if best:
                break
        if best:
            c, r = best
            cs = "0" if c.is_zero else f"v={v(c)}"
            print(f"   via {hname}: (c={cs}, r={r})  [cert p param: "
                  f"{'SP' if p.payload[0]==T2 else ('0' if p.payload[1].is_zero else 'v='+str(v(p.payload[1])))}]")
        else:
            print(f"   via {hname}: NO tree fit, n={len(meas)}")
            for pa, pb, val in meas[:6]:
                print("      ",
                      pa if isinstance(pa, str) else (f"t^{v(pa)}" if not pa.is_zero else "0"),
                      pb if isinstance(pb, str) else (f"t^{v(pb)}" if not pb.is_zero else "0"),
                      "->", val)


def cert_detail(z, h, cands):
    """Show the first certificate path's conditions in detail."""
    for p in cands:
        if M.distance(p, h) != 3:
            continue
        try:
            pth = M.path_between(p, h)
        except (ValueError, ArithmeticError, ZeroDivisionError):
            continue
        L, q = pth[1], pth[2]
        try:
            c1 = u_eval(z, L)
            c2 = u_eval(p, q)
            c3 = u_eval(L, h)
        except (ValueError, ArithmeticError, ZeroDivisionError):
            continue
        if c1 == 0 and c2 == 0 and c3 == 0:
            def desc(e):
                return (e.kind, e.payload[0], [("0" if x.is_zero else v(x)) for x in e.payload[1:]])
            print("  cert path p,L,q:", desc(p), desc(L), desc(q))
            print("    pencil rules: p->", pencil_cr(p), " L->", pencil_cr(L), " q->", pencil_cr(q))
            return
    print("  no certificate")


def main3():
    targets = []
    for j in (1, 2, 3, 4):
        targets.append((M.line3(tp(-j), M.zero, M.zero), f"[t^-{j},0,0]"))
        targets.append((M.line3(M.zero, M.zero, tp(-j)), f"[0,0,t^-{j}]"))
    targets += [(M.apex_line(), "[inf]"), (M.line1(M.zero), "[0]"),
                (M.line2(M.zero, M.zero), "[0,0]"),
                (M.line3(M.zero, M.zero, M.zero), "[0,0,0]")]
    z = M.line3(tp(-2), M.zero, tp(-1))
    debug_center(z, "[t^-2,0,t^-1]", targets)
    print("--- cert detail via [0,0,0]:")
    cert_detail(z, M.line3(M.zero, M.zero, M.zero), cand_points(z))
    print("--- cert detail via [0]:")
    cert_detail(z, M.line1(M.zero), cand_points(z))
    z2 = M.line3(tp(-1), tp(-2), M.zero)
    debug_center(z2, "[t^-1,t^-2,0]", targets)
    z3 = M.line3(M.zero, tp(-1), M.zero)
    debug_center(z3, "[0,t^-1,0]", targets)


def fit_dual_all(z, label):
    """One-step dual fit reporting ALL fitting (c,r) pairs and all targets."""
    cands = cand_lines(z)
    a, l, a2 = z.payload[1:]
    c_cands = [("0", M.zero)]
    if not a.is_zero:
        c_cands.append(("l/B(a)", l * M.B(a).inverse()))
        if not a2.is_zero:
            q = a2 * a.inverse()
            try:
                c_cands.append(("Ainv(a2/a)", M.A_inverse(q)))
            except Exception:
                pass
    print("==", label)
    for h, name in zip(HR_POINTS, HR_PNAMES):
        if M.distance(z, h) != 4:
            continue
        p = certify(z, h, cands)
        if p is None:
            continue
        params = [M.t_power(j) for j in (-10, -3, -1, 0, 1, 3, 10)] + [M.zero]
        mem = members_dual(z, params)
        meas = []
        for (pa, x), (pb, y) in itertools.combinations(mem, 2):
            if x == y:
                continue
            px, py = proj_onto(x, h), proj_onto(y, h)
            if px is None or py is None:
                continue
            val = u_known(px, py)
            if val is None:
                continue
            meas.append((pa, pb, val))
        fits = []
        for cname, c in c_cands:
            for r_num in [Fraction(n, 2) for n in range(-24, 25)]:
                ok = all(tree_u(None if isinstance(pa, str) else pa,
                                None if isinstance(pb, str) else pb, c, r_num) == val
                         for pa, pb, val in meas)
                if ok and meas:
                    fits.append((cname, r_num))
        if fits:
            print(f"   via {name}: n={len(meas)} fits {fits}")
        else:
            print(f"   via {name}: n={len(meas)} NO fit; sample:")
            for pa, pb, val in meas[:8]:
                print("      ",
                      pa if isinstance(pa, str) else (f"t^{v(pa)}" if not pa.is_zero else "0"),
                      pb if isinstance(pb, str) else (f"t^{v(pb)}" if not pb.is_zero else "0"),
                      "->", val)


def main4():
    cases = [
        (M.point3(M.zero, M.zero, tp(-1)), "(0,0,t^-1)"),
        (M.point3(M.zero, M.zero, tp(-2)), "(0,0,t^-2)"),
        (M.point3(M.one, M.zero, tp(-2)), "(1,0,t^-2)"),
        (M.point3(tp(1), M.zero, tp(-3)), "(t,0,t^-3)"),
        (M.point3(tp(1), M.zero, tp(-2)), "(t,0,t^-2)"),
        (M.point3(M.one, tp(1), tp(-2)), "(1,t,t^-2)"),
        (M.point3(tp(2), M.zero, tp(-1)), "(t^2,0,t^-1)"),
    ]
    for z, label in cases:
        try:
            fit_dual_all(z, label)
        except Exception as e:
            print(label, "ERROR", type(e).__name__, e)
