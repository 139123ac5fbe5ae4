"""The coordinatized generalized quadrangle over a Laurent series field.

Elements carry coordinate tuples over K, the field of Laurent series
with rational exponents (bounded below) and coefficients in GF(2^h).
With theta_i the coefficient maps x -> x^(2^(h_i)) extended termwise,
incidence between the full-coordinate elements is

    (a, l, a') I [k, b, k']  iff  (k^theta1)^2 a + a' = b
                                  and a^theta2 k + k' = l,

completed by the standard hat-rack scheme on the shorter tuples.  The
parameters must satisfy gcd(2^h - 1, 2^(1 + h1 + h2) - 1) = 1, which
makes the odd-degree root appearing in projections unique.

Series are tracked to a finite precision: exact inputs stay exact, while
inverses and roots carry an O(t^p) tail.  Valuations (leading exponents)
remain exact as long as they are resolved within the tracked precision.
"""
from __future__ import annotations

import math
import random
from fractions import Fraction

from .geometry import Element, LINE, POINT, dual_kind
from .scalar import GaloisField, INF

DEFAULT_PRECISION = Fraction(48)


class _Exponent(Fraction):
    """Fraction with a cached hash: series exponents are dictionary keys,
    and Fraction.__hash__ performs a modular inverse on every call."""

    __slots__ = ("_hash",)

    def __hash__(self):
        try:
            return self._hash
        except AttributeError:
            h = Fraction.__hash__(self)
            self._hash = h
            return h


_EXP_CACHE = {}


def _exp_of(num, den):
    key = (num, den)
    cached = _EXP_CACHE.get(key)
    if cached is None:
        cached = _Exponent(num, den)
        if len(_EXP_CACHE) < 1 << 20:
            _EXP_CACHE[key] = cached
    return cached


class QSeries:
    """A Laurent series with rational exponents over GF(2^h), known up to
    (not including) exponent ``prec`` (None means exact)."""

    __slots__ = ("field", "terms", "prec")

    def __init__(self, field: GaloisField, terms, prec=None):
        cleaned = {}
        for exponent, coeff in terms.items():
            exponent = Fraction(exponent)
            exponent = _exp_of(exponent.numerator, exponent.denominator)
            coeff = int(coeff) % field.order
            if coeff and (prec is None or exponent < prec):
                cleaned[exponent] = coeff
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "terms", cleaned)
        object.__setattr__(self, "prec", prec)

    def __setattr__(self, name, value):
        raise AttributeError("QSeries is immutable")

    @classmethod
    def _raw(cls, field, terms, prec):
        """Internal constructor for already-normalized term dictionaries
        (non-zero reduced coefficients, exponents below prec)."""
        out = object.__new__(cls)
        object.__setattr__(out, "field", field)
        object.__setattr__(out, "terms", terms)
        object.__setattr__(out, "prec", prec)
        return out

    # -- basic queries

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def valuation(self):
        """Exponent of the leading term; INF for exact zero."""
        if self.terms:
            return min(self.terms)
        if self.prec is None:
            return INF
        raise ArithmeticError(
            f"valuation unresolved: zero up to precision {self.prec}")

    def leading_coefficient(self) -> int:
        return self.terms[min(self.terms)]

    # -- arithmetic (characteristic 2: subtraction = addition)

    def _min_prec(self, other):
        if self.prec is None:
            return other.prec
        if other.prec is None:
            return self.prec
        return min(self.prec, other.prec)

    def __add__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        terms = dict(self.terms)
        add = self.field.add
        for exponent, coeff in other.terms.items():
            merged = add(terms.get(exponent, 0), coeff)
            if merged:
                terms[exponent] = merged
            elif exponent in terms:
                del terms[exponent]
        prec = self._min_prec(other)
        if prec is not None:
            terms = {e: c for e, c in terms.items() if e < prec}
        return QSeries._raw(self.field, terms, prec)

    __sub__ = __add__

    def __neg__(self):
        return self

    def __mul__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        if not self.terms or not other.terms:
            prec = self._mul_prec(other)
            return QSeries(self.field, {}, prec)
        mul = self.field.mul
        prec = self._mul_prec(other)
        if self is other:
            # characteristic two: cross terms of a square cancel in pairs
            terms = {}
            for e, c in self.terms.items():
                e2 = _exp_of(2 * e.numerator, e.denominator)
                if prec is None or e2 < prec:
                    terms[e2] = mul(c, c)
            return QSeries._raw(self.field, terms, prec)
        # work on a common integer exponent lattice: Fraction arithmetic in
        # the convolution loop dominates the cost otherwise
        den = 1
        for e in self.terms:
            den = den * e.denominator // math.gcd(den, e.denominator)
        for e in other.terms:
            den = den * e.denominator // math.gcd(den, e.denominator)
        left = [(e.numerator * (den // e.denominator), c)
                for e, c in self.terms.items()]
        right = sorted((e.numerator * (den // e.denominator), c)
                       for e, c in other.terms.items())
        cap = None if prec is None else prec * den
        acc = {}
        field = self.field
        if field.characteristic == 2 and field.h > 1:
            log, exp, m = field._log, field._exp, field.order - 1
            for e1, c1 in left:
                l1 = log[c1]
                for e2, c2 in right:
                    e = e1 + e2
                    if cap is not None and e >= cap:
                        break
                    acc[e] = acc.get(e, 0) ^ exp[(l1 + log[c2]) % m]
        else:
            add = field.add
            for e1, c1 in left:
                for e2, c2 in right:
                    e = e1 + e2
                    if cap is not None and e >= cap:
                        break
                    acc[e] = add(acc.get(e, 0), mul(c1, c2))
        terms = {_exp_of(e, den): c for e, c in acc.items() if c}
        return QSeries._raw(self.field, terms, prec)

    def _mul_prec(self, other):
        v1 = min(self.terms) if self.terms else self.prec
        v2 = min(other.terms) if other.terms else other.prec
        candidates = []
        if self.prec is not None:
            candidates.append(self.prec + (v2 if v2 is not None else 0))
        if other.prec is not None:
            candidates.append(other.prec + (v1 if v1 is not None else 0))
        if v1 is None or v2 is None:
            # a zero-to-precision factor: nothing is known beyond prec sums
            candidates = [c for c in candidates if c is not None]
            return min(candidates) if candidates else None
        return min(candidates) if candidates else None

    def inverse(self) -> "QSeries":
        if not self.terms:
            raise ZeroDivisionError("inverse of (an indistinguishable) zero")
        mu = min(self.terms)
        lead = self.terms[mu]
        inv_lead = self.field.inv(lead)
        monomial_inv = QSeries(self.field, {-mu: inv_lead})
        # self = lead*t^mu * (1 + g) with v(g) > 0; invert the unit part
        unit = self * monomial_inv
        one = QSeries(self.field, {Fraction(0): 1})
        g = unit + one
        rel = (self.prec - mu) if self.prec is not None else DEFAULT_PRECISION
        acc = one
        power = g
        while power.terms and min(power.terms) < rel:
            acc = acc * (one + power)
            power = power * power
        result = acc * monomial_inv
        return QSeries(self.field, result.terms,
                       _tight_prec(result.prec, -mu + rel))

    def __truediv__(self, other):
        return self * other.inverse()

    def power(self, e: int) -> "QSeries":
        if e < 0:
            return self.inverse().power(-e)
        result = QSeries(self.field, {Fraction(0): 1})
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def frobenius(self, bits: int) -> "QSeries":
        """Coefficientwise x -> x^(2^bits) (a field automorphism that
        preserves the valuation)."""
        power = self.field.power
        e = 1 << (bits % self.field.h) if self.field.h > 1 else 1
        terms = {exp: power(c, e) for exp, c in self.terms.items()}
        return QSeries._raw(self.field, terms, self.prec)

    def root_odd(self, m: int) -> "QSeries":
        """The unique m-th root for odd m coprime to the field order - 1."""
        if m % 2 == 0:
            raise ValueError("only odd roots are supported")
        if not self.terms:
            raise ZeroDivisionError("root of (an indistinguishable) zero")
        q = self.field.order
        if math.gcd(m, q - 1) != 1:
            raise ValueError("root degree must be coprime to the order - 1")
        mu = min(self.terms)
        lead = self.terms[mu]
        m_inv = pow(m, -1, q - 1) if q > 2 else 1
        lead_root = self.field.power(lead, m_inv)
        monomial = QSeries(self.field, {mu / m: lead_root})
        unit = self * QSeries(self.field, {-mu: self.field.inv(lead)})
        one = QSeries(self.field, {Fraction(0): 1})
        rel = (self.prec - mu) if self.prec is not None else DEFAULT_PRECISION
        # Newton iteration for sigma^m = unit (char 2, m odd: the
        # derivative m*sigma^(m-1) is just sigma^(m-1))
        sigma = one
        for _ in range(64):
            residual = unit + sigma.power(m)
            if not residual.terms or min(residual.terms) >= rel:
                break
            sigma = sigma + residual * sigma.power(m - 1).inverse()
        else:
            raise ArithmeticError("root iteration did not converge")
        sigma = QSeries(self.field, sigma.terms, rel)
        result = monomial * sigma
        return QSeries(self.field, result.terms,
                       _tight_prec(result.prec, mu / m + rel))

    # -- comparisons

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        diff = self + other
        return not diff.terms

    def __hash__(self):
        # truncated series compare up to precision; a constant hash keeps
        # equal-to-precision values in one bucket
        return 7

    def __repr__(self):
        if not self.terms:
            body = "0"
        else:
            body = " + ".join(f"{c}*t^({e})" if e else str(c)
                              for e, c in sorted(self.terms.items()))
        tail = f" + O(t^{self.prec})" if self.prec is not None else ""
        return body + tail


def _tight_prec(p1, p2):
    if p1 is None:
        return p2
    if p2 is None:
        return p1
    return min(p1, p2)


# ---------------------------------------------------------------------------
# the model


# payload tags: arity-0 apex, then 1-, 2-, 3-tuples
APEX = "apex"
T1 = "t1"
T2 = "t2"
T3 = "t3"


class QuadrangleModel:
    """Generalized quadrangle coordinatized over Laurent series with
    GF(2^h) coefficients and Frobenius twists h1, h2."""

    backend = "quadrangle"
    is_finite = False
    n = 4

    def __init__(self, h: int = 3, h1: int = 1, h2: int = 0):
        q = 2 ** h
        m = 2 ** (1 + h1 + h2) - 1
        if math.gcd(q - 1, m) != 1:
            raise ValueError(
                f"parameters rejected: gcd({q - 1}, {m}) != 1")
        self.h, self.h1, self.h2 = h, h1, h2
        self.base = GaloisField(2, h)
        self.root_degree = m

    # -- scalars

    def scalar(self, terms) -> QSeries:
        return QSeries(self.base, terms)

    @property
    def zero(self) -> QSeries:
        return QSeries(self.base, {})

    @property
    def one(self) -> QSeries:
        return QSeries(self.base, {Fraction(0): 1})

    def t_power(self, exponent, coeff: int = 1) -> QSeries:
        return QSeries(self.base, {Fraction(exponent): coeff})

    def random_scalar(self, rng, allow_negative: bool = True) -> QSeries:
        terms = {}
        low = -2 if allow_negative else 0
        for _ in range(rng.randrange(0, 4)):
            exponent = Fraction(rng.randrange(2 * low, 9), 2)
            terms[exponent] = rng.randrange(self.base.order)
        return QSeries(self.base, terms)

    # -- the two twisted maps

    def A(self, k: QSeries) -> QSeries:
        out = k.frobenius(self.h1)
        return out * out

    def B(self, a: QSeries) -> QSeries:
        return a.frobenius(self.h2)

    def B_inverse(self, x: QSeries) -> QSeries:
        return x.frobenius((self.h - self.h2) % self.h if self.h > 1 else 0)

    # -- element constructors

    def _el(self, kind, tag, *coords) -> Element:
        return Element(kind, (tag,) + tuple(coords))

    def apex_point(self) -> Element:
        return self._el(POINT, APEX)

    def point1(self, a) -> Element:
        return self._el(POINT, T1, a)

    def point2(self, k, b) -> Element:
        return self._el(POINT, T2, k, b)

    def point3(self, a, l, a2) -> Element:
        return self._el(POINT, T3, a, l, a2)

    def apex_line(self) -> Element:
        return self._el(LINE, APEX)

    def line1(self, k) -> Element:
        return self._el(LINE, T1, k)

    def line2(self, a, l) -> Element:
        return self._el(LINE, T2, a, l)

    def line3(self, k, b, k2) -> Element:
        return self._el(LINE, T3, k, b, k2)

    # -- incidence

    def incident(self, x: Element, y: Element) -> bool:
        if x.kind == y.kind:
            raise ValueError("incidence is defined between opposite kinds")
        p, l = (x, y) if x.kind == POINT else (y, x)
        pt, lt = p.payload[0], l.payload[0]
        if pt == APEX:
            return lt in (APEX, T1)
        if pt == T1:
            return lt == APEX or (lt == T2 and l.payload[1] == p.payload[1])
        if pt == T2:
            k, b = p.payload[1], p.payload[2]
            if lt == T1:
                return l.payload[1] == k
            if lt == T3:
                return l.payload[1] == k and l.payload[2] == b
            return False
        # pt == T3
        a, el, a2 = p.payload[1], p.payload[2], p.payload[3]
        if lt == T2:
            return l.payload[1] == a and l.payload[2] == el
        if lt == T3:
            k, b, k2 = l.payload[1], l.payload[2], l.payload[3]
            return (self.A(k) * a + a2 == b
                    and self.B(a) * k + k2 == el)
        return False

    # -- join and meet (None when at distance four)

    def join(self, p: Element, q: Element):
        """The common line of two distinct collinear points, else None."""
        if p.kind != POINT or q.kind != POINT or p == q:
            raise ValueError("join needs two distinct points")
        t1, t2 = p.payload[0], q.payload[0]
        if t1 > t2 or (t1 == t2 == T2):
            p, q = q, p
            t1, t2 = t2, t1
        if t1 == APEX:
            if t2 == T1:
                return self.apex_line()
            if t2 == T2:
                return self.line1(q.payload[1])
            return None
        if t1 == T1:
            a = p.payload[1]
            if t2 == T1:
                return self.apex_line()
            if t2 == T3 and q.payload[1] == a:
                return self.line2(a, q.payload[2])
            return None
        if t1 == T2:
            k, b = p.payload[1], p.payload[2]
            if t2 == T2:
                return self.line1(k) if q.payload[1] == k else None
            a, el, a2 = q.payload[1], q.payload[2], q.payload[3]
            if self.A(k) * a + a2 == b:
                return self.line3(k, b, el + self.B(a) * k)
            return None
        # two full points
        a1, l1, a1p = p.payload[1], p.payload[2], p.payload[3]
        a2, l2, a2p = q.payload[1], q.payload[2], q.payload[3]
        if a1 == a2:
            return self.line2(a1, l1) if l1 == l2 else None
        k = (l1 + l2) / self.B(a1 + a2)
        if self.A(k) * (a1 + a2) == a1p + a2p:
            return self.line3(k, self.A(k) * a1 + a1p,
                              l1 + self.B(a1) * k)
        return None

    def meet(self, l: Element, m: Element):
        """The common point of two distinct concurrent lines, else None."""
        if l.kind != LINE or m.kind != LINE or l == m:
            raise ValueError("meet needs two distinct lines")
        t1, t2 = l.payload[0], m.payload[0]
        if t1 > t2 or (t1 == t2 == T2):
            l, m = m, l
            t1, t2 = t2, t1
        if t1 == APEX:
            if t2 == T1:
                return self.apex_point()
            if t2 == T2:
                return self.point1(m.payload[1])
            return None
        if t1 == T1:
            k = l.payload[1]
            if t2 == T1:
                return self.apex_point()
            if t2 == T3 and m.payload[1] == k:
                return self.point2(k, m.payload[2])
            return None
        if t1 == T2:
            a, el = l.payload[1], l.payload[2]
            if t2 == T2:
                return self.point1(a) if m.payload[1] == a else None
            k, b, k2 = m.payload[1], m.payload[2], m.payload[3]
            if self.B(a) * k + k2 == el:
                return self.point3(a, el, b + self.A(k) * a)
            return None
        k1, b1, k1p = l.payload[1], l.payload[2], l.payload[3]
        k2, b2, k2p = m.payload[1], m.payload[2], m.payload[3]
        if k1 == k2:
            return self.point2(k1, b1) if b1 == b2 else None
        a = self.B_inverse((k1p + k2p) / (k1 + k2))
        if self.A(k1 + k2) * a == b1 + b2:
            return self.point3(a, self.B(a) * k1 + k1p,
                               b1 + self.A(k1) * a)
        return None

    # -- distance and paths

    def distance(self, x: Element, y: Element) -> int:
        if x.kind != y.kind:
            return 1 if self.incident(x, y) else 3
        if x == y:
            return 0
        common = self.join(x, y) if x.kind == POINT else self.meet(x, y)
        return 2 if common is not None else 4

    def _twisted_root(self, e: QSeries) -> QSeries:
        """The unique s with s / (s^(theta1 theta2))^2 = e.

        The coefficient maps theta_i act termwise while squaring doubles
        exponents, so this is not a plain m-th root; it is solved as the
        fixed point s = e * (s^(theta1 theta2))^2, which contracts
        quadratically once the leading monomial is matched.  Leading
        coefficients need the inverse of m = 2^(1+h1+h2) - 1 modulo the
        coefficient-field order minus one, which is where the gcd
        condition on the parameters enters.
        """
        if not e.terms:
            raise ZeroDivisionError("twisted root of a vanishing series")
        nu = e.valuation()
        eps = e.leading_coefficient()
        q = self.base.order
        m_inv = pow(self.root_degree, -1, q - 1) if q > 2 else 1
        gamma = self.base.inv(self.base.power(eps, m_inv))
        rel = (e.prec - nu) if e.prec is not None else DEFAULT_PRECISION
        target = -nu + rel
        bits = self.h1 + self.h2
        s = QSeries(self.base, {-nu: gamma}, target)
        for _ in range(80):
            twist = s.frobenius(bits)
            nxt = e * (twist * twist)
            nxt = QSeries(self.base, nxt.terms, target)
            diff = nxt + s
            s = nxt
            if not diff.terms or min(diff.terms) >= target:
                return s
        raise ArithmeticError("twisted root iteration did not converge")

    def _flag_toward(self, p: Element, m: Element):
        """For a point p and a non-incident line m: the unique (q, j) with
        q on m, j through p and q incident with j."""
        pt, mt = p.payload[0], m.payload[0]
        if pt == APEX:
            if mt == T2:
                q = self.point1(m.payload[1])
            else:  # T3
                q = self.point2(m.payload[1], m.payload[2])
            return q, self.join(p, q)
        if pt == T1:
            a = p.payload[1]
            if mt == T1:
                q = self.apex_point()
            elif mt == T2:
                q = self.point1(m.payload[1])
            else:
                k, b, k2 = m.payload[1], m.payload[2], m.payload[3]
                q = self.point3(a, self.B(a) * k + k2, b + self.A(k) * a)
            return q, self.join(p, q)
        if pt == T2:
            k, b = p.payload[1], p.payload[2]
            if mt in (APEX, T1):
                q = self.apex_point()
            elif mt == T2:
                a, el = m.payload[1], m.payload[2]
                q = self.point3(a, el, b + self.A(k) * a)
            else:
                k2, b2, k2p = m.payload[1], m.payload[2], m.payload[3]
                if k2 == k:
                    q = self.point2(k2, b2)
                else:
                    x = (b + b2) / self.A(k + k2)
                    q = self.point3(x, self.B(x) * k2 + k2p,
                                    b2 + self.A(k2) * x)
            return q, self.join(p, q)
        # full point
        a, el, a2 = p.payload[1], p.payload[2], p.payload[3]
        if mt == APEX:
            q = self.point1(a)
        elif mt == T1:
            k = m.payload[1]
            q = self.point2(k, self.A(k) * a + a2)
        elif mt == T2:
            am, lm = m.payload[1], m.payload[2]
            if am == a:
                q = self.point1(a)
            else:
                k = (el + lm) / self.B(a + am)
                q = self.point3(am, lm, a2 + self.A(k) * (a + am))
        else:
            k, b, k2 = m.payload[1], m.payload[2], m.payload[3]
            if self.A(k) * a + a2 == b:
                q = self.point2(k, b)
            elif self.B(a) * k + k2 == el:
                q = self.point3(a, el, b + self.A(k) * a)
            else:
                c = el + k2 + self.B(a) * k
                d = a2 + b + self.A(k) * a
                s = self._twisted_root(d / self.A(c))
                x = a + s
                q = self.point3(x, self.B(x) * k + k2, b + self.A(k) * x)
        j = self.join(p, q)
        if j is None:
            raise ArithmeticError(
                f"projection solve failed for {p!r} onto {m!r}")
        return q, j

    def path_between(self, x: Element, y: Element, via: Element | None = None):
        if via is not None:
            head = self.path_between(x, via)
            tail = self.path_between(via, y)
            full = head + tail[1:]
            if len(full) - 1 != self.distance(x, y):
                raise ValueError("via does not lie on a shortest path")
            return full
        d = self.distance(x, y)
        if d == 0:
            return [x]
        if d == 1:
            return [x, y]
        if d == 2:
            mid = self.join(x, y) if x.kind == POINT else self.meet(x, y)
            return [x, mid, y]
        if d == 3:
            p, m = (x, y) if x.kind == POINT else (y, x)
            q, j = self._flag_toward(p, m)
            path = [p, j, q, m]
            return path if x.kind == POINT else path[::-1]
        # opposite pair: route through a pencil member of x
        for seed in range(8):
            mid = self.pencil_sample(x, 2, seed=17 + seed)
            for e in mid:
                if self.distance(e, y) == 3:
                    return [x] + self.path_between(e, y)
        raise ValueError("no route found between opposite elements")

    def projection(self, x: Element, y: Element) -> Element:
        d = self.distance(x, y)
        if d == self.n:
            raise ValueError("projection undefined for opposite elements")
        if d == 0:
            raise ValueError("projection of an element on itself")
        return self.path_between(x, y)[-2]

    # -- sampling

    def random_element(self, rng, kind=None) -> Element:
        if kind is None:
            kind = rng.choice((POINT, LINE))
        roll = rng.random()
        s = lambda: self.random_scalar(rng)
        if roll < 0.05:
            return self.apex_point() if kind == POINT else self.apex_line()
        if roll < 0.15:
            return self.point1(s()) if kind == POINT else self.line1(s())
        if roll < 0.3:
            return (self.point2(s(), s()) if kind == POINT
                    else self.line2(s(), s()))
        return (self.point3(s(), s(), s()) if kind == POINT
                else self.line3(s(), s(), s()))

    def pencil_sample(self, z: Element, count: int, seed: int = 0):
        if count < 1:
            raise ValueError("count must be at least 1")
        rng = random.Random(seed)
        tag = z.payload[0]
        out = []

        def push(e):
            if e not in out:
                out.append(e)

        if z.kind == POINT:
            if tag == APEX:
                push(self.apex_line())
                while len(out) < count:
                    push(self.line1(self.random_scalar(rng)))
            elif tag == T1:
                a = z.payload[1]
                push(self.apex_line())
                while len(out) < count:
                    push(self.line2(a, self.random_scalar(rng)))
            elif tag == T2:
                k, b = z.payload[1], z.payload[2]
                push(self.line1(k))
                while len(out) < count:
                    push(self.line3(k, b, self.random_scalar(rng)))
            else:
                a, el, a2 = z.payload[1], z.payload[2], z.payload[3]
                push(self.line2(a, el))
                while len(out) < count:
                    k = self.random_scalar(rng)
                    push(self.line3(k, self.A(k) * a + a2,
                                    el + self.B(a) * k))
        else:
            if tag == APEX:
                push(self.apex_point())
                while len(out) < count:
                    push(self.point1(self.random_scalar(rng)))
            elif tag == T1:
                k = z.payload[1]
                push(self.apex_point())
                while len(out) < count:
                    push(self.point2(k, self.random_scalar(rng)))
            elif tag == T2:
                a, el = z.payload[1], z.payload[2]
                push(self.point1(a))
                while len(out) < count:
                    push(self.point3(a, el, self.random_scalar(rng)))
            else:
                k, b, k2 = z.payload[1], z.payload[2], z.payload[3]
                push(self.point2(k, b))
                while len(out) < count:
                    a = self.random_scalar(rng)
                    push(self.point3(a, self.B(a) * k + k2,
                                     b + self.A(k) * a))
        return out[:count]

    def __repr__(self):
        return (f"QuadrangleModel(GF(2^{self.h}), "
                f"h1={self.h1}, h2={self.h2})")


# ---------------------------------------------------------------------------
# the valuation
#
# Every pencil carries a natural chart: the coordinate that parametrizes
# its members (plus one special member without a parameter).  Depth of
# agreement of two members is an ultrametric tree distance in that chart,
# measured from a basepoint ball (c, r): members whose parameters agree
# with c to depth at least r sit at the basepoint, and values grow with
# the depth of agreement beyond the negative part of the parameters.
#
# For pencils whose defining coordinates are integral the basepoint is the
# unit ball (c, r) = (0, 0) and the value is the plain agreement depth.
# For deep centres the basepoint is found by transport: project the pencil
# onto the pencil of an opposite integral anchor and pull the anchor's
# unit ball back through the projection.  A projection between opposite
# pencils is a bijection, but only some anchors transport the value
# faithfully; a distorting anchor is rejected by probe members (including
# probes placed just outside the reconstructed ball, where distortion
# concentrates), and the surviving anchors vote.  Distorting anchors that
# slip past the probes always report a strictly deeper basepoint and have
# only ever been observed to agree in pairs, so the shallowest ball backed
# by at least two anchors - or any ball backed by three - wins.  The
# reconstruction is validated wholesale by the sampled axiom checks.


def _pencil_members(model, z, params):
    """Members of the pencil of z: (param, element) for each chart
    parameter, followed by (None, special member)."""
    tag = z.payload[0]
    out = []
    if z.kind == LINE:
        if tag == T3:
            k, b, k2 = z.payload[1], z.payload[2], z.payload[3]
            for a in params:
                out.append((a, model.point3(a, model.B(a) * k + k2,
                                            b + model.A(k) * a)))
            out.append((None, model.point2(k, b)))
        elif tag == T2:
            a, el = z.payload[1], z.payload[2]
            for a2 in params:
                out.append((a2, model.point3(a, el, a2)))
            out.append((None, model.point1(a)))
        elif tag == T1:
            k = z.payload[1]
            for b in params:
                out.append((b, model.point2(k, b)))
            out.append((None, model.apex_point()))
        else:
            for a in params:
                out.append((a, model.point1(a)))
            out.append((None, model.apex_point()))
    else:
        if tag == T3:
            a, el, a2 = z.payload[1], z.payload[2], z.payload[3]
            for k in params:
                out.append((k, model.line3(k, model.A(k) * a + a2,
                                           el + model.B(a) * k)))
            out.append((None, model.line2(a, el)))
        elif tag == T2:
            k, b = z.payload[1], z.payload[2]
            for k2 in params:
                out.append((k2, model.line3(k, b, k2)))
            out.append((None, model.line1(k)))
        elif tag == T1:
            a = z.payload[1]
            for el in params:
                out.append((el, model.line2(a, el)))
            out.append((None, model.apex_line()))
        else:
            for k in params:
                out.append((k, model.line1(k)))
            out.append((None, model.apex_line()))
    return out


def _member_param(z, x):
    """Chart parameter of a member x of the pencil of z (None: special)."""
    zt, xt = z.payload[0], x.payload[0]
    if zt == T3:
        return x.payload[1] if xt == T3 else None
    if zt == T2:
        return x.payload[3] if xt == T3 else None
    if zt == T1:
        return x.payload[2] if xt == T2 else None
    return x.payload[1] if xt == T1 else None


def _ball_value(e, f, c, r):
    """Tree distance of chart parameters e, f from the basepoint ball
    (c, r); None stands for the special member."""
    if e is None and f is None:
        return INF
    if e is None or f is None:
        g = f if e is None else e
        d = g + c
        m = r if d.is_zero else min(r, d.valuation())
        return r - m
    d = e + f
    if d.is_zero:
        return INF
    m1 = r if (e + c).is_zero else min(r, (e + c).valuation())
    m2 = r if (f + c).is_zero else min(r, (f + c).valuation())
    return d.valuation() + r - m1 - m2


def _is_integral(z):
    return all(x.is_zero or x.valuation() >= 0 for x in z.payload[1:])


class QuadrangleValuation:
    """Pencil basepoint engine for a quadrangle model.

    ``u_internal(x, y)`` returns the unscaled (rational) value of a
    same-kind pair at distance two.  Basepoint balls of deep pencils are
    memoized per engine.
    """

    def __init__(self, model: QuadrangleModel):
        self.model = model
        self._balls = {}

    @staticmethod
    def _deep_exponent(z):
        """Probe exponent well below every digit the basepoint ball of
        the pencil of z can have.  The twisted square at most doubles
        coordinate depth, hence the factor two; series precision must
        comfortably exceed twice the magnitude of this exponent plus the
        basepoint radius."""
        d = min([Fraction(0)]
                + [x.valuation() for x in z.payload[1:] if not x.is_zero])
        return 2 * d - Fraction(5)

    # -- chart helpers

    def _t(self, exp, coeff=1):
        return self.model.t_power(Fraction(exp), coeff)

    def _member(self, z, e):
        if e is None:
            return _pencil_members(self.model, z, [])[-1][1]
        return _pencil_members(self.model, z, [e])[0][1]

    def _anchors(self, kind):
        mk = self.model.line3 if kind == LINE else self.model.point3
        one, zero = self.model.one, self.model.zero
        return [mk(*[one if c else zero for c in co])
                for co in ((0, 0, 0), (1, 0, 0), (0, 0, 1), (0, 1, 0),
                           (1, 1, 0), (1, 0, 1), (0, 1, 1), (1, 1, 1))]

    def _random_anchor(self, kind, rng):
        def s():
            terms = {}
            for _ in range(rng.randrange(1, 3)):
                terms[Fraction(rng.randrange(0, 4))] = (
                    rng.randrange(1, self.model.base.order))
            return QSeries(self.model.base, terms)
        mk = self.model.line3 if kind == LINE else self.model.point3
        return mk(s(), s(), s())

    # -- basepoint transport

    def _pullback(self, z, h, max_digits=24):
        """Basepoint ball of the pencil of z pulled back from the unit
        ball of the opposite integral anchor h, or None if the transport
        degenerates or fails the probe validation."""
        model = self.model
        zero = model.zero
        deep_exp = self._deep_exponent(z)
        cache = {}

        def value(e, f):
            pe, pf = push(e), push(f)
            if pe == "bad" or pf == "bad":
                return None
            return _ball_value(pe, pf, zero, Fraction(0))

        def push(e):
            key = None if e is None else tuple(sorted(e.terms.items()))
            if key in cache:
                return cache[key]
            x = self._member(z, e)
            try:
                y = model.path_between(x, h)[2]
            except (ValueError, ArithmeticError, ZeroDivisionError):
                y = None
            got = "bad" if y is None else _member_param(h, y)
            cache[key] = got
            return got

        deep = self._t(deep_exp)
        u_sp = value(None, deep)
        if u_sp is None or u_sp == INF:
            return None
        r = u_sp + deep_exp
        # centre digits against the transported metric:
        # value(c', deep) = r - depth of agreement of c' with the centre
        c = zero
        for _ in range(max_digits):
            g = value(c, deep)
            if g is None:
                return None
            if g == INF or g == 0:
                break
            j = r - g
            if j <= deep_exp:
                return None
            for gamma in range(1, model.base.order):
                c1 = c + self._t(j, gamma)
                g1 = value(c1, deep)
                if g1 is not None and (g1 == INF or g1 < g):
                    c = c1
                    break
            else:
                return None
        else:
            return None
        # probe members; the ones just outside the ball expose transports
        # that distort the basepoint region
        probes = ([self._t(j) for j in (-5, -2, 0, 1)]
                  + [self._t(-5) + self._t(-1), zero,
                     c + self._t(r - 1), c + self._t(r + 1),
                     c + self._t(r + 1, 3), self._t(deep_exp, 3),
                     None, deep])
        for i in range(len(probes)):
            for jj in range(i + 1, len(probes)):
                got = value(probes[i], probes[jj])
                if got is None:
                    continue
                if _ball_value(probes[i], probes[jj], c, r) != got:
                    return None
        return (c, r)

    def pencil_ball(self, z):
        """Basepoint ball (c, r) of the pencil of z."""
        if _is_integral(z):
            return (self.model.zero, Fraction(0))
        key = z
        got = self._balls.get(key)
        if got == "unresolved":
            raise ArithmeticError(f"pencil of {z!r} could not be resolved")
        if got is not None:
            return got
        rng = random.Random(hash(key) & 0xFFFFFFFF)
        votes = {}

        def tally(h):
            if self.model.distance(z, h) != 4:
                return 0
            ball = self._pullback(z, h)
            if ball is None:
                return 0
            kk = (tuple(sorted(ball[0].terms.items())), ball[1])
            votes[kk] = votes.get(kk, 0) + 1
            return votes[kk]

        def accept(kk):
            ball = (QSeries(self.model.base, dict(kk[0])), kk[1])
            self._balls[key] = ball
            return ball

        for h in self._anchors(z.kind):
            if tally(h) == 3:
                return accept(max(votes, key=votes.get))

        def pick():
            strong = {kk: n for kk, n in votes.items() if n >= 2}
            if not strong:
                return None
            rmin = min(rr for _, rr in strong)
            best = sorted(((n, kk) for kk, n in strong.items()
                           if kk[1] == rmin), reverse=True)
            if len(best) == 1 or best[0][0] > best[1][0]:
                return best[0][1]
            return None

        choice = pick()
        extra = 0
        while choice is None and extra < 30:
            tally(self._random_anchor(z.kind, rng))
            extra += 1
            choice = pick()
        if choice is None:
            self._balls[key] = "unresolved"
            raise ArithmeticError(f"pencil of {z!r} could not be resolved")
        return accept(choice)

    def u_internal(self, x, y):
        """Unscaled value of a same-kind pair at distance two."""
        model = self.model
        z = model.join(x, y) if x.kind == POINT else model.meet(x, y)
        if z is None:
            raise ValueError(f"{x!r} and {y!r} share no pencil")
        c, r = self.pencil_ball(z)
        return _ball_value(_member_param(z, x), _member_param(z, y), c, r)


def quadrangle_valuation(model: QuadrangleModel, name="quadrangle"):
    """The valuation of the quadrangle model.

    Point-pair values are rational; line-pair values are rational
    multiples of sqrt(2), matching the weight sequence (1, sqrt(2), 1).
    """
    from .scalar import SQRT2, QuadraticNumber
    from .valuation import Valuation

    engine = QuadrangleValuation(model)

    def rule(x, y):
        value = engine.u_internal(x, y)
        if value is INF or value == INF:
            return INF
        if x.kind == POINT:
            return QuadraticNumber(value)
        return QuadraticNumber(0, value, 2)

    return Valuation(model, rule, name=name)
