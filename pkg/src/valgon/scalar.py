"""Exact scalar arithmetic.

Three layers live here:

* ``QuadraticNumber`` -- numbers a + b*sqrt(d) with exact rational a, b and
  d in {1, 2, 3}.  These carry weight-sequence entries, translation lengths
  and valuation values, so every comparison downstream stays exact.
* coefficient fields -- the rationals, prime fields GF(p) and table-based
  GF(p^h) for small orders.
* ``RationalExponentSeries`` -- exact elements of a field of rational
  functions in t that allows rational powers t^(r/s), together with the
  valuation "lowest exponent of the numerator minus lowest exponent of the
  denominator", and Andre-style twisted multiplications on top of it.

Everything is immutable after construction and safe to share between
threads.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Callable, Iterable, Optional


# ---------------------------------------------------------------------------
# infinity sentinel


class _Infinity:
    """Largest element of every ordered value set we use (u(x,x) = inf)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __eq__(self, other):
        return other is self

    def __ne__(self, other):
        return other is not self

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __mul__(self, other):
        return self

    __rmul__ = __mul__

    def __hash__(self):
        return hash(float("inf"))

    def __repr__(self):
        return "inf"

    def __float__(self):
        return float("inf")


INF = _Infinity()


def is_infinite(value) -> bool:
    return value is INF


# ---------------------------------------------------------------------------
# quadratic surds


def _sign_fraction(q: Fraction) -> int:
    return (q > 0) - (q < 0)


class QuadraticNumber:
    """Exact a + b*sqrt(d) with rational a, b and d in {1, 2, 3}.

    d = 1 is canonical for purely rational values (the surd part is folded
    into the rational part).  Mixed-discriminant arithmetic is allowed only
    when one operand is rational.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, a=0, b=0, d=1):
        a = Fraction(a)
        b = Fraction(b)
        if d not in (1, 2, 3):
            raise ValueError(f"discriminant must be 1, 2 or 3, got {d!r}")
        if d == 1:
            a, b = a + b, Fraction(0)
        if b == 0:
            d = 1
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "d", d)

    def __setattr__(self, name, value):
        raise AttributeError("QuadraticNumber is immutable")

    # -- helpers

    @staticmethod
    def _coerce(value) -> "QuadraticNumber":
        if isinstance(value, QuadraticNumber):
            return value
        if isinstance(value, (int, Fraction)):
            return QuadraticNumber(value)
        raise TypeError(f"cannot interpret {value!r} as a QuadraticNumber")

    def _common_d(self, other: "QuadraticNumber") -> int:
        if self.d == other.d:
            return self.d
        if self.b == 0:
            return other.d
        if other.b == 0:
            return self.d
        raise ValueError(f"incompatible discriminants {self.d} and {other.d}")

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def as_fraction(self) -> Fraction:
        if self.b != 0:
            raise ValueError(f"{self} is irrational")
        return self.a

    # -- arithmetic

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        d = self._common_d(other)
        return QuadraticNumber(self.a + other.a, self.b + other.b, d)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticNumber(-self.a, -self.b, self.d)

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        d = self._common_d(other)
        a = self.a * other.a + self.b * other.b * d
        b = self.a * other.b + self.b * other.a
        return QuadraticNumber(a, b, d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        if other.a == 0 and other.b == 0:
            raise ZeroDivisionError("division by zero QuadraticNumber")
        d = self._common_d(other)
        norm = other.a * other.a - other.b * other.b * d
        conj = QuadraticNumber(other.a, -other.b, other.d)
        prod = self * conj
        return QuadraticNumber(prod.a / norm, prod.b / norm, d)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    # -- ordering

    def _sign(self) -> int:
        if self.b == 0:
            return _sign_fraction(self.a)
        if self.a == 0:
            return _sign_fraction(self.b)
        sa, sb = _sign_fraction(self.a), _sign_fraction(self.b)
        if sa == sb:
            return sa
        # opposite signs: compare a^2 against b^2 d
        diff = self.a * self.a - self.b * self.b * self.d
        return sa * _sign_fraction(diff)

    def __eq__(self, other):
        if other is INF:
            return False
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        if self.a != other.a or self.b != other.b:
            return False
        return self.b == 0 or self.d == other.d

    def __lt__(self, other):
        if other is INF:
            return True
        other = self._coerce(other)
        return (self - other)._sign() < 0

    def __le__(self, other):
        if other is INF:
            return True
        other = self._coerce(other)
        return (self - other)._sign() <= 0

    def __gt__(self, other):
        if other is INF:
            return False
        other = self._coerce(other)
        return (self - other)._sign() > 0

    def __ge__(self, other):
        if other is INF:
            return False
        other = self._coerce(other)
        return (self - other)._sign() >= 0

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def __repr__(self):
        return f"QuadraticNumber({self})"

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        surd = f"sqrt{self.d}" if self.b == 1 else (
            f"-sqrt{self.d}" if self.b == -1 else f"{self.b}*sqrt{self.d}")
        if self.a == 0:
            return surd
        sep = "+" if self.b > 0 else ""
        return f"{self.a}{sep}{surd}"


SQRT2 = QuadraticNumber(0, 1, 2)
SQRT3 = QuadraticNumber(0, 1, 3)

_QN_RE = re.compile(
    r"^\s*(?P<a>[+-]?\d+(?:/\d+)?)?\s*"
    r"(?:(?P<sign>[+-])?\s*(?:(?P<b>\d+(?:/\d+)?)\*)?sqrt(?P<d>[123]))?\s*$"
)


def parse_quadratic(text: str):
    """Parse values like "3/2", "1+1/2*sqrt2", "sqrt3", "inf"."""
    text = text.strip()
    if text in ("inf", "infinity", "oo"):
        return INF
    m = _QN_RE.match(text)
    if not m or (m.group("a") is None and m.group("d") is None):
        raise ValueError(f"cannot parse quadratic value {text!r}")
    a = Fraction(m.group("a")) if m.group("a") else Fraction(0)
    if m.group("d") is None:
        return QuadraticNumber(a)
    b = Fraction(m.group("b")) if m.group("b") else Fraction(1)
    if m.group("sign") == "-":
        b = -b
    return QuadraticNumber(a, b, int(m.group("d")))


def format_value(value) -> str:
    """Inverse of :func:`parse_quadratic`, also accepts plain fractions."""
    if value is INF:
        return "inf"
    if isinstance(value, (int, Fraction)):
        return str(Fraction(value))
    return str(value)


# ---------------------------------------------------------------------------
# coefficient fields


class Rationals:
    """The field of exact rationals, element type ``Fraction``."""

    characteristic = 0

    def __init__(self):
        self.zero = Fraction(0)
        self.one = Fraction(1)

    order = None

    def element(self, value) -> Fraction:
        return Fraction(value)

    def add(self, x, y):
        return x + y

    def sub(self, x, y):
        return x - y

    def mul(self, x, y):
        return x * y

    def neg(self, x):
        return -x

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / x

    def random(self, rng) -> Fraction:
        return Fraction(rng.randint(-4, 4), rng.choice((1, 2, 3)))

    def coeff_str(self, x) -> str:
        return str(x)

    def parse_coeff(self, s: str) -> Fraction:
        return Fraction(s)

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("Q")

    def __repr__(self):
        return "Q"


class PrimeField:
    """GF(p), elements are ints in [0, p)."""

    def __init__(self, p: int):
        if p < 2 or any(p % k == 0 for k in range(2, int(p**0.5) + 1)):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.characteristic = p
        self.order = p
        self.zero = 0
        self.one = 1

    def element(self, value) -> int:
        return int(value) % self.p

    def add(self, x, y):
        return (x + y) % self.p

    def sub(self, x, y):
        return (x - y) % self.p

    def mul(self, x, y):
        return (x * y) % self.p

    def neg(self, x):
        return (-x) % self.p

    def inv(self, x):
        if x % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(x, self.p - 2, self.p)

    def random(self, rng) -> int:
        return rng.randrange(self.p)

    def coeff_str(self, x) -> str:
        return str(x)

    def parse_coeff(self, s: str) -> int:
        return self.element(int(s))

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))

    def __repr__(self):
        return f"GF({self.p})"


def _poly_mul_mod(a: list, b: list, mod_poly: list, p: int) -> list:
    """Multiply coefficient vectors mod (mod_poly, p); mod_poly is monic."""
    h = len(mod_poly) - 1
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    for i in range(len(out) - 1, h - 1, -1):
        c = out[i]
        if c:
            out[i] = 0
            for j in range(h):
                out[i - h + j] = (out[i - h + j] - c * mod_poly[j]) % p
    out = out[:h]
    out += [0] * (h - len(out))
    return out


def _poly_pow_mod(base: list, e: int, mod_poly: list, p: int) -> list:
    h = len(mod_poly) - 1
    result = [1] + [0] * (h - 1)
    base = list(base)
    while e:
        if e & 1:
            result = _poly_mul_mod(result, base, mod_poly, p)
        base = _poly_mul_mod(base, base, mod_poly, p)
        e >>= 1
    return result


class GaloisField:
    """Table-based GF(p^h) for p^h <= 2^16; elements are ints < p^h.

    The integer encodes the coefficient vector of the element in base p
    with respect to a fixed irreducible polynomial.
    """

    def __init__(self, p: int, h: int):
        PrimeField(p)  # primality check
        if h < 1 or p**h > 1 << 16:
            raise ValueError("GaloisField supports orders up to 2^16")
        self.p = p
        self.h = h
        self.characteristic = p
        self.order = p**h
        self.zero = 0
        self.one = 1
        self._mod_poly = self._find_irreducible()
        self._build_tables()

    def _find_irreducible(self) -> list:
        p, h = self.p, self.h
        if h == 1:
            return [0, 1]
        x = [0, 1] + [0] * (h - 2)
        for code in range(p**h):
            poly = self._decode(code) + [1]  # monic of degree h
            # f irreducible iff x^(p^h) == x mod f and x^(p^(h/r)) != x
            # for each prime divisor r of h
            xq = _poly_pow_mod(x, p**h, poly, p)
            if xq != x:
                continue
            ok = True
            for r in _prime_divisors(h):
                xr = _poly_pow_mod(x, p ** (h // r), poly, p)
                if xr == x:
                    ok = False
                    break
            if ok:
                return poly
        raise RuntimeError("no irreducible polynomial found")  # unreachable

    def _decode(self, code: int) -> list:
        out = []
        for _ in range(self.h):
            out.append(code % self.p)
            code //= self.p
        return out

    def _encode(self, vec: list) -> int:
        code = 0
        for c in reversed(vec[: self.h]):
            code = code * self.p + (c % self.p)
        return code

    def _build_tables(self):
        q = self.order
        # find a multiplicative generator, then exp/log tables
        divisors = _prime_divisors(q - 1)
        for cand in range(2, q):
            vec = self._decode(cand)
            if all(
                self._encode(_poly_pow_mod(vec, (q - 1) // r, self._mod_poly, self.p)) != 1
                for r in divisors
            ):
                g = cand
                break
        else:
            g = 1
        exp = [1] * (q - 1)
        cur = [1] + [0] * (self.h - 1)
        gvec = self._decode(g)
        log = [0] * q
        for i in range(q - 1):
            code = self._encode(cur)
            exp[i] = code
            log[code] = i
            cur = _poly_mul_mod(cur, gvec, self._mod_poly, self.p)
        self._exp = exp
        self._log = log

    def element(self, value) -> int:
        return int(value) % self.order

    def add(self, x, y):
        p = self.p
        if p == 2:
            return x ^ y
        return self._encode([a + b for a, b in zip(self._decode(x), self._decode(y))])

    def sub(self, x, y):
        if self.p == 2:
            return x ^ y
        return self._encode([a - b for a, b in zip(self._decode(x), self._decode(y))])

    def neg(self, x):
        if self.p == 2:
            return x
        return self._encode([-a for a in self._decode(x)])

    def mul(self, x, y):
        if x == 0 or y == 0:
            return 0
        n = self._log[x] + self._log[y]
        return self._exp[n % (self.order - 1)]

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return self._exp[(-self._log[x]) % (self.order - 1)]

    def power(self, x, e: int):
        if x == 0:
            if e <= 0:
                raise ZeroDivisionError("0 to a non-positive power")
            return 0
        return self._exp[(self._log[x] * e) % (self.order - 1)]

    def random(self, rng) -> int:
        return rng.randrange(self.order)

    def coeff_str(self, x) -> str:
        return str(x)

    def parse_coeff(self, s: str) -> int:
        return self.element(int(s))

    def __eq__(self, other):
        return (
            isinstance(other, GaloisField)
            and other.p == self.p
            and other.h == self.h
        )

    def __hash__(self):
        return hash(("GF", self.p, self.h))

    def __repr__(self):
        return f"GF({self.p}^{self.h})" if self.h > 1 else f"GF({self.p})"


def _prime_divisors(n: int) -> list:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def base_field_from_name(name: str):
    """Parse descriptors like "q", "gf2", "gf4" (=GF(2^2)), "gf2^3"."""
    name = name.strip().lower()
    if name in ("q", "qq", "rationals"):
        return Rationals()
    m = re.match(r"^gf\(?(\d+)(?:\^(\d+))?\)?$", name)
    if not m:
        raise ValueError(f"unknown base field {name!r}")
    q = int(m.group(1))
    if m.group(2):
        return GaloisField(q, int(m.group(2)))
    # plain gfN: factor N as p^h
    for p in _prime_divisors(q):
        h = 0
        n = q
        while n % p == 0 and n > 1:
            n //= p
            h += 1
        if n == 1:
            return PrimeField(p) if h == 1 else GaloisField(p, h)
    raise ValueError(f"{q} is not a prime power")


# ---------------------------------------------------------------------------
# rational-exponent series


ALL_PRIMES = "all"


class SeriesField:
    """Field of rational functions in t allowing exponents r/s with every
    prime factor of s in the generating set M (``exponent_primes``).

    ``exponent_primes`` may be a set of primes, the string "all" (every
    denominator allowed), or "odd" (all odd primes).
    """

    def __init__(self, base_field, exponent_primes=ALL_PRIMES):
        self.base_field = base_field
        if exponent_primes in (ALL_PRIMES, "odd"):
            self.exponent_primes = exponent_primes
        else:
            self.exponent_primes = frozenset(int(p) for p in exponent_primes)
            for p in self.exponent_primes:
                PrimeField(p)  # primality check
        self.zero = RationalExponentSeries(self, ())
        self.one = RationalExponentSeries(self, ((Fraction(0), base_field.one),))

    def allows_exponent(self, q: Fraction) -> bool:
        den = Fraction(q).denominator
        if self.exponent_primes == ALL_PRIMES:
            return True
        if self.exponent_primes == "odd":
            return den % 2 == 1
        for p in _prime_divisors(den):
            if p not in self.exponent_primes:
                return False
        return True

    def series(self, terms) -> "RationalExponentSeries":
        """Build an element from {exponent: coefficient} or [(exp, coeff)]."""
        if isinstance(terms, dict):
            terms = terms.items()
        items = []
        for exp, coeff in terms:
            exp = Fraction(exp)
            if not self.allows_exponent(exp):
                raise ValueError(
                    f"exponent denominator {exp.denominator} not generated "
                    f"by the prime set {self.exponent_primes!r}"
                )
            items.append((exp, self.base_field.element(coeff)))
        return RationalExponentSeries(self, tuple(items))

    def t(self, exponent=1, coeff=1) -> "RationalExponentSeries":
        return self.series([(Fraction(exponent), coeff)])

    def constant(self, coeff) -> "RationalExponentSeries":
        return self.series([(Fraction(0), coeff)])

    def random_element(self, rng, max_terms=3, allow_zero=True,
                       allow_fraction=False) -> "RationalExponentSeries":
        """Deterministic pseudo-random element (polynomial-shaped by default)."""
        x = self._random_poly(rng, max_terms, allow_zero)
        if allow_fraction and rng.random() < 0.3:
            den = self._random_poly(rng, 2, allow_zero=False)
            x = x / den
        return x

    def _random_poly(self, rng, max_terms, allow_zero):
        if self.exponent_primes == ALL_PRIMES:
            dens = (1, 1, 2, 3)
        elif self.exponent_primes == "odd":
            dens = (1, 1, 3, 5)
        else:
            smallest = min(self.exponent_primes)
            dens = (1, 1, smallest, smallest * smallest)
        n_terms = rng.randint(0 if allow_zero else 1, max_terms)
        terms = {}
        while True:
            for _ in range(n_terms):
                exp = Fraction(rng.randint(0, 6), rng.choice(dens))
                coeff = self.base_field.random(rng)
                if coeff != self.base_field.zero:
                    terms[exp] = coeff
            if terms or allow_zero:
                return self.series(terms)

    def parse(self, text: str) -> "RationalExponentSeries":
        return parse_series(self, text)

    def __eq__(self, other):
        return (
            isinstance(other, SeriesField)
            and other.base_field == self.base_field
            and other.exponent_primes == self.exponent_primes
        )

    def __hash__(self):
        return hash((self.base_field, self.exponent_primes))

    def __repr__(self):
        return f"SeriesField({self.base_field!r}, M={self.exponent_primes!r})"


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


class RationalExponentSeries:
    """Exact quotient of two finitely supported sums of c * t^q.

    Stored as sorted tuples of (exponent, coefficient) pairs for numerator
    and denominator.  The representation is canonical: the denominator's
    lowest exponent is 0 with coefficient 1 and common polynomial factors
    are removed, so equality and hashing are structural.
    """

    __slots__ = ("field", "num", "den")

    def __init__(self, field: SeriesField, num, den=None):
        bf = field.base_field
        num = _strip(dict(num), bf)
        den = _strip(dict(den), bf) if den is not None else {Fraction(0): bf.one}
        if not den:
            raise ZeroDivisionError("series denominator is zero")
        num, den = _normalize_fraction(num, den, bf)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "num", tuple(sorted(num.items())))
        object.__setattr__(self, "den", tuple(sorted(den.items())))

    def __setattr__(self, name, value):
        raise AttributeError("RationalExponentSeries is immutable")

    # -- basic queries

    @property
    def is_zero(self) -> bool:
        return not self.num

    def valuation(self):
        """Lowest exponent of the numerator minus that of the denominator;
        INF for the zero element."""
        if not self.num:
            return INF
        return self.num[0][0] - self.den[0][0]

    def leading_coefficient(self):
        if not self.num:
            raise ValueError("zero series has no leading coefficient")
        bf = self.field.base_field
        return bf.mul(self.num[0][1], bf.inv(self.den[0][1]))

    @property
    def is_polynomial(self) -> bool:
        return self.den == ((Fraction(0), self.field.base_field.one),)

    # -- arithmetic

    def _check_field(self, other):
        if not isinstance(other, RationalExponentSeries):
            raise TypeError(f"cannot combine series with {other!r}")
        if other.field != self.field:
            raise ValueError("series from different fields")

    def __add__(self, other):
        self._check_field(other)
        bf = self.field.base_field
        num = _poly_add(
            _poly_mul(dict(self.num), dict(other.den), bf),
            _poly_mul(dict(other.num), dict(self.den), bf),
            bf,
        )
        den = _poly_mul(dict(self.den), dict(other.den), bf)
        return RationalExponentSeries(self.field, num, den)

    def __neg__(self):
        bf = self.field.base_field
        return RationalExponentSeries(
            self.field, {e: bf.neg(c) for e, c in self.num}, dict(self.den)
        )

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check_field(other)
        bf = self.field.base_field
        num = _poly_mul(dict(self.num), dict(other.num), bf)
        den = _poly_mul(dict(self.den), dict(other.den), bf)
        return RationalExponentSeries(self.field, num, den)

    def __truediv__(self, other):
        return self * other.inverse()

    def inverse(self) -> "RationalExponentSeries":
        if self.is_zero:
            raise ZeroDivisionError("inverse of the zero series")
        return RationalExponentSeries(self.field, dict(self.den), dict(self.num))

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out = self.field.one
        base = self
        while e:
            if e & 1:
                out = out * base
            if e > 1:
                base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, RationalExponentSeries):
            return NotImplemented
        return (
            self.field == other.field
            and self.num == other.num
            and self.den == other.den
        )

    def __hash__(self):
        return hash((self.num, self.den))

    def __bool__(self):
        return not self.is_zero

    def __repr__(self):
        return f"<series {self}>"

    def __str__(self):
        return format_series(self)

    def to_json(self):
        num = [[str(e), self.field.base_field.coeff_str(c)] for e, c in self.num]
        if self.is_polynomial:
            return num
        den = [[str(e), self.field.base_field.coeff_str(c)] for e, c in self.den]
        return {"num": num, "den": den}


def _strip(terms: dict, bf) -> dict:
    zero = bf.zero
    return {
        (e if type(e) is Fraction else Fraction(e)): c
        for e, c in terms.items()
        if c != zero
    }


def _poly_add(a: dict, b: dict, bf) -> dict:
    out = dict(a)
    for e, c in b.items():
        s = bf.add(out.get(e, bf.zero), c)
        if s == bf.zero:
            out.pop(e, None)
        else:
            out[e] = s
    return out


def _poly_mul(a: dict, b: dict, bf) -> dict:
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = ea + eb
            s = bf.add(out.get(e, bf.zero), bf.mul(ca, cb))
            if s == bf.zero:
                out.pop(e, None)
            else:
                out[e] = s
    return out


def _normalize_fraction(num: dict, den: dict, bf):
    """Shift exponents, cancel common polynomial factors, scale the
    denominator so its lowest term is exactly 1 * t^0."""
    if not num:
        return {}, {Fraction(0): bf.one}
    if len(den) == 1:
        # monomial denominator: shift and rescale only
        (ds, dc), = den.items()
        if ds == 0 and dc == bf.one:
            return num, den
        inv = bf.inv(dc)
        return (
            {e - ds: bf.mul(c, inv) for e, c in num.items()},
            {Fraction(0): bf.one},
        )
    # pull the monomial content out of both sides so gcd cancellation runs
    # on genuine polynomials (nonzero constant terms)
    ns, ds = min(num), min(den)
    num = {e - ns: c for e, c in num.items()}
    den = {e - ds: c for e, c in den.items()}
    if len(den) > 1 and len(num) > 0:
        num, den = _cancel_gcd(num, den, bf)
    shift = ns - ds
    if shift != 0:
        num = {e + shift: c for e, c in num.items()}
    # scale so den's lowest coefficient is one
    c0 = den[min(den)]
    if c0 != bf.one:
        inv = bf.inv(c0)
        num = {e: bf.mul(c, inv) for e, c in num.items()}
        den = {e: bf.mul(c, inv) for e, c in den.items()}
    return num, den


def _cancel_gcd(num: dict, den: dict, bf):
    scale = 1
    for e in list(num) + list(den):
        scale = _lcm(scale, e.denominator)
    a = {int(e * scale): c for e, c in num.items()}
    b = {int(e * scale): c for e, c in den.items()}
    g = _int_poly_gcd(a, b, bf)
    if len(g) > 1 or (g and min(g) > 0):
        a, _ = _int_poly_divmod(a, g, bf)
        b, _ = _int_poly_divmod(b, g, bf)
    num = {Fraction(e, scale): c for e, c in a.items()}
    den = {Fraction(e, scale): c for e, c in b.items()}
    return num, den


def _int_poly_divmod(a: dict, b: dict, bf):
    if not b:
        raise ZeroDivisionError
    db = max(b)
    lb_inv = bf.inv(b[db])
    q = {}
    r = dict(a)
    while r and max(r) >= db:
        dr = max(r)
        coeff = bf.mul(r[dr], lb_inv)
        q[dr - db] = coeff
        for e, c in b.items():
            ee = dr - db + e
            s = bf.sub(r.get(ee, bf.zero), bf.mul(coeff, c))
            if s == bf.zero:
                r.pop(ee, None)
            else:
                r[ee] = s
    return q, r


def _int_poly_gcd(a: dict, b: dict, bf) -> dict:
    a, b = dict(a), dict(b)
    while b:
        _, r = _int_poly_divmod(a, b, bf)
        a, b = b, r
    if a:
        inv = bf.inv(a[max(a)])
        a = {e: bf.mul(c, inv) for e, c in a.items()}
    return a


# -- text format: sum of `c*t^(r/s)` terms ----------------------------------

_TERM_RE = re.compile(
    r"^(?:(?P<coeff>[+-]?[0-9][0-9/]*)\*?)?"
    r"(?:t(?:\^\(?(?P<exp>-?\d+(?:/\d+)?)\)?)?)?$"
)


def parse_series(field: SeriesField, text: str) -> RationalExponentSeries:
    """Parse literals like ``1*t^(1/2) + -1*t^(2)`` or ``t + 2``."""
    text = text.replace(" ", "")
    if not text or text == "0":
        return field.zero
    # split on '+' that are not part of a leading sign
    parts = re.split(r"\+(?=[^+])", text.replace("+-", "+-"))
    bf = field.base_field
    terms = {}
    for part in parts:
        if not part:
            continue
        neg = part.startswith("-")
        if neg:
            part = part[1:]
        m = _TERM_RE.match(part)
        if not m or (m.group("coeff") is None and "t" not in part):
            raise ValueError(f"cannot parse series term {part!r}")
        coeff_text = m.group("coeff")
        if coeff_text is None:
            coeff = bf.one
        elif isinstance(bf, Rationals):
            coeff = Fraction(coeff_text)
        else:
            coeff = bf.parse_coeff(coeff_text)
        if neg:
            coeff = bf.neg(coeff)
        if "t" in part:
            exp = Fraction(m.group("exp")) if m.group("exp") else Fraction(1)
        else:
            exp = Fraction(0)
        prev = terms.get(exp, bf.zero)
        coeff = bf.add(prev, coeff)
        if coeff == bf.zero:
            terms.pop(exp, None)
        else:
            terms[exp] = coeff
    return field.series(terms)


def format_series(x: RationalExponentSeries) -> str:
    def fmt_poly(terms):
        if not terms:
            return "0"
        bits = []
        bf = x.field.base_field
        for e, c in terms:
            cs = bf.coeff_str(c)
            if e == 0:
                bits.append(cs)
            elif e == 1:
                bits.append(f"{cs}*t")
            else:
                bits.append(f"{cs}*t^({e})")
        return " + ".join(bits)

    if x.is_polynomial:
        return fmt_poly(x.num)
    return f"({fmt_poly(x.num)}) / ({fmt_poly(x.den)})"


def series_from_json(field: SeriesField, data) -> RationalExponentSeries:
    if isinstance(data, dict):
        num = [(Fraction(e), field.base_field.parse_coeff(c)) for e, c in data["num"]]
        den = [(Fraction(e), field.base_field.parse_coeff(c)) for e, c in data["den"]]
        return RationalExponentSeries(field, num, den)
    num = [(Fraction(e), field.base_field.parse_coeff(c)) for e, c in data]
    return field.series(num)


# ---------------------------------------------------------------------------
# module-level operation names mirroring the library surface


def valuation_of(x: RationalExponentSeries):
    return x.valuation()


def arith(op: str, x: RationalExponentSeries, y: Optional[RationalExponentSeries] = None):
    if op == "add":
        return x + y
    if op == "mul":
        return x * y
    if op == "negate":
        return -x
    if op == "invert":
        return x.inverse()
    raise ValueError(f"unknown operation {op!r}")


# ---------------------------------------------------------------------------
# valued quasifields (Andre twists of series fields)


IDENTITY = "identity"
SIGN = "sign"
FROBENIUS_SHIFT = "frobenius_shift"


def default_sigma(group_order: int) -> Callable[[Fraction], int]:
    """Selector sending a norm valuation to alpha when the underlying
    element valuation is an odd integer, else to the identity."""

    def sigma(norm_valuation: Fraction) -> int:
        if group_order == 1:
            return 0
        r = Fraction(norm_valuation) / group_order
        if r.denominator == 1 and r.numerator % 2 == 1:
            return 1
        return 0

    return sigma


class QuasifieldSpec:
    """A series field twisted by a finite-order valuation-preserving
    automorphism and a selector sigma.

    ``sigma`` maps the valuation of a norm value (an exact rational) to an
    exponent of the automorphism; it must send 0 to 0 so that sigma(n(1))
    is the identity.  Because it is a function of the valuation alone,
    v(a) = v(b) automatically implies equal selector values.

    ``sigma_on_norm``, if given instead, is an unvalidated selector applied
    to the norm value itself.  Such selectors can violate the quasifield
    laws; ``check_valued_quasifield`` hunts for witnesses.
    """

    def __init__(self, field: SeriesField, automorphism=IDENTITY, sigma=None,
                 sigma_on_norm=None):
        self.field = field
        self.automorphism = automorphism
        bf = field.base_field
        if automorphism == IDENTITY:
            self.group_order = 1
        elif automorphism == SIGN:
            if field.exponent_primes == ALL_PRIMES or (
                field.exponent_primes != "odd" and 2 in field.exponent_primes
            ):
                raise ValueError("sign automorphism needs odd exponent denominators")
            if bf.characteristic == 2:
                raise ValueError("sign automorphism is trivial in characteristic 2")
            self.group_order = 2
        elif automorphism == FROBENIUS_SHIFT:
            p = bf.characteristic
            if p == 0:
                raise ValueError("frobenius_shift needs positive characteristic")
            if field.exponent_primes in (ALL_PRIMES, "odd") or set(
                field.exponent_primes
            ) != {p}:
                raise ValueError(
                    "frobenius_shift needs exponent denominators that are "
                    "powers of the characteristic"
                )
            self.group_order = p
        else:
            raise ValueError(f"unknown automorphism {automorphism!r}")
        self.sigma_on_norm = sigma_on_norm
        if sigma_on_norm is not None:
            self._sigma = None
        else:
            self._sigma = sigma if sigma is not None else default_sigma(self.group_order)
            if self._sigma(Fraction(0)) % self.group_order != 0:
                raise ValueError("sigma must map norm valuation 0 to the identity")

    def sigma(self, norm_valuation) -> int:
        if self._sigma is None:
            raise ValueError("this spec selects on norm values, not valuations")
        return self._sigma(Fraction(norm_valuation)) % self.group_order

    def selector_exponent(self, a: "RationalExponentSeries") -> int:
        """The automorphism exponent sigma(n(a)) applied when a multiplies."""
        if self.sigma_on_norm is not None:
            return self.sigma_on_norm(norm_map(self, a)) % self.group_order
        return self.sigma(self.group_order * a.valuation())

    def __repr__(self):
        return f"QuasifieldSpec({self.field!r}, {self.automorphism})"


def apply_automorphism(spec: QuasifieldSpec, x: RationalExponentSeries,
                       power: int = 1) -> RationalExponentSeries:
    """Apply the spec's automorphism (or a power of it) to x."""
    e = power % spec.group_order
    if e == 0 or spec.automorphism == IDENTITY:
        return x
    if spec.automorphism == SIGN:
        return _apply_sign(spec.field, x)
    return _apply_frobenius_shift(spec.field, x, e)


def _apply_sign(field: SeriesField, x: RationalExponentSeries):
    bf = field.base_field

    def transform(terms):
        out = {}
        for exp, c in terms:
            if exp.numerator % 2 == 1:
                c = bf.neg(c)
            out[exp] = c
        return out

    return RationalExponentSeries(field, transform(x.num), transform(x.den))


def _apply_frobenius_shift(field: SeriesField, x: RationalExponentSeries, e: int):
    # alpha^e maps t^(1/s) to t^(1/s) / (1 + e*t^(1/s)); per-term application
    # keeps everything an exact rational function.
    bf = field.base_field
    e_coeff = bf.element(e)

    def transform(terms):
        total = field.zero
        for exp, c in terms:
            r, s = exp.numerator, exp.denominator
            base_den = field.series({Fraction(0): bf.one, Fraction(1, s): e_coeff})
            total = total + field.series({exp: c}) * base_den ** (-r)
        return total

    num = transform(x.num)
    den = transform(x.den)
    return num / den


def norm_map(spec: QuasifieldSpec, a: RationalExponentSeries) -> RationalExponentSeries:
    """Product of a over the cyclic group generated by the automorphism."""
    out = spec.field.one
    for e in range(spec.group_order):
        out = out * apply_automorphism(spec, a, e)
    return out


def andre_multiply(spec: QuasifieldSpec, a: RationalExponentSeries,
                   b: RationalExponentSeries) -> RationalExponentSeries:
    """Twisted product a . b^(sigma(n(a)))."""
    if a.is_zero:
        return spec.field.zero
    e = spec.selector_exponent(a)
    return a * apply_automorphism(spec, b, e)


def check_valued_quasifield(spec: QuasifieldSpec, samples: int, seed: int):
    """Exact verification of (V1), (V2), (V3) on pseudo-random triples."""
    import random as _random

    from .report import CheckReport

    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = _random.Random(seed)
    report = CheckReport(f"valued quasifield {spec.automorphism}")
    field = spec.field

    report.check("sigma at unit", spec.selector_exponent(field.one) == 0,
                 witness=field.one)

    v1_bad = v2_bad = v3_bad = sig_bad = None
    n_v2 = n_v3 = n_sig = 0
    for _ in range(samples):
        a1 = field.random_element(rng, allow_fraction=True)
        a2 = field.random_element(rng, allow_fraction=True)
        b = field.random_element(rng, allow_fraction=True)
        # (V1): v(a) = inf iff a = 0
        for x in (a1, a2, b):
            val = x.valuation()
            if (val is INF) != x.is_zero:
                v1_bad = x
        # (V2): v(a) < v(b) implies v(a + b) = v(a)
        va, vb = a1.valuation(), a2.valuation()
        if va is not INF and va < vb:
            n_v2 += 1
            if (a1 + a2).valuation() != va:
                v2_bad = (a1, a2)
        # (V3): v(a1 . b - a2 . b) = v(a1 - a2) + v(b)
        if not b.is_zero and a1 != a2:
            n_v3 += 1
            lhs = (andre_multiply(spec, a1, b) - andre_multiply(spec, a2, b)).valuation()
            rhs = (a1 - a2).valuation() + b.valuation()
            if lhs != rhs:
                v3_bad = (a1, a2, b)
        # selector consistency: equal valuations must select equal twists
        if va is not INF and va == vb:
            n_sig += 1
            if spec.selector_exponent(a1) != spec.selector_exponent(a2):
                sig_bad = (a1, a2)

    report.check("V1", v1_bad is None, witness=v1_bad, count=3 * samples)
    if n_v2 == 0:
        report.inconclusive("V2", "no sampled pair with distinct valuations")
    else:
        report.check("V2", v2_bad is None, witness=v2_bad, count=n_v2)
    if n_v3 == 0:
        report.inconclusive("V3", "no usable sampled triple")
    else:
        report.check("V3", v3_bad is None, witness=v3_bad, count=n_v3)
    if n_sig:
        report.check("sigma factors through valuation", sig_bad is None,
                     witness=sig_bad, count=n_sig)
    return report
