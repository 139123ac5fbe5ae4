"""Weight sequences for closed-path valuation identities.

The canonical sequence for gonality n is a_i = sin(i*pi/n) / sin(pi/n),
i = 1..n-1, extended periodically by the symmetry a_{n+i} = a_{n-i}.  For
n in {3, 4, 6} the entries live in Q, Q(sqrt2), Q(sqrt3) respectively and
are stored exactly; other gonalities fall back to floats with a stated
tolerance.  The sequence satisfies the three-term recurrence

    k * a_i = a_{i-1} + a_{i+1},   a_0 = a_n = 0,   k = 2 cos(pi/n),

and k is the largest eigenvalue of the path graph P_{n-1}.
"""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .report import CheckReport
from .scalar import QuadraticNumber, SQRT2, SQRT3

_EXACT_ENTRIES = {
    3: (QuadraticNumber(1), QuadraticNumber(1)),
    4: (QuadraticNumber(1), SQRT2, QuadraticNumber(1)),
    6: (QuadraticNumber(1), SQRT3, QuadraticNumber(2), SQRT3, QuadraticNumber(1)),
}

_EXACT_K = {3: QuadraticNumber(1), 4: SQRT2, 6: SQRT3}


class WeightSequence:
    """Entries a_1..a_{n-1} of a weight sequence for gonality n.

    ``entry(i)`` extends the sequence to all integer indices by the
    symmetries a_{n+i} = a_{n-i} and a_0 = a_n = 0.
    """

    def __init__(self, n: int, entries):
        if n < 3:
            raise ValueError("gonality must be at least 3")
        entries = tuple(entries)
        if len(entries) != n - 1:
            raise ValueError(f"need {n - 1} entries for gonality {n}")
        self.n = n
        self.entries = entries
        self.exact = all(isinstance(e, QuadraticNumber) for e in entries)

    def entry(self, i: int):
        """a_i for any integer i, with a_0 = a_n = 0 and period-2n symmetry."""
        i = i % (2 * self.n)
        if i > self.n:
            i = 2 * self.n - i
        if i == 0 or i == self.n:
            return QuadraticNumber(0) if self.exact else 0.0
        return self.entries[i - 1]

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def scaled(self, c) -> "WeightSequence":
        return WeightSequence(self.n, tuple(e * c for e in self.entries))

    def __repr__(self):
        return f"WeightSequence(n={self.n}, {', '.join(map(str, self.entries))})"


def canonical_weights(n: int) -> WeightSequence:
    """The weight sequence normalized so that a_1 = 1."""
    if n < 3:
        raise ValueError("gonality must be at least 3")
    if n in _EXACT_ENTRIES:
        return WeightSequence(n, _EXACT_ENTRIES[n])
    s1 = math.sin(math.pi / n)
    return WeightSequence(n, tuple(math.sin(i * math.pi / n) / s1
                                   for i in range(1, n)))


def recurrence_constant(n: int):
    """k = 2 cos(pi/n), exact for n in {3, 4, 6}."""
    if n in _EXACT_K:
        return _EXACT_K[n]
    return 2.0 * math.cos(math.pi / n)


def _largest_path_eigenvalue(m: int, tol: float = 1e-12) -> float:
    """Largest eigenvalue of the path graph P_m by power iteration."""
    a = np.zeros((m, m))
    for i in range(m - 1):
        a[i, i + 1] = a[i + 1, i] = 1.0
    vec = np.ones(m) / math.sqrt(m)
    lam = 0.0
    # shift to keep the iteration matrix positive definite
    shifted = a + 2.0 * np.eye(m)
    for _ in range(100000):
        nxt = shifted @ vec
        nrm = float(np.linalg.norm(nxt))
        nxt /= nrm
        new_lam = float(nxt @ (a @ nxt))
        if abs(new_lam - lam) < tol and float(np.linalg.norm(nxt - vec)) < tol:
            vec = nxt
            lam = new_lam
            break
        vec, lam = nxt, new_lam
    return lam, vec


def verify_weight_recurrence(seq: WeightSequence) -> CheckReport:
    """Check the three-term recurrence, the closed form of k, and the
    path-graph eigenvalue characterization."""
    report = CheckReport(f"weight recurrence n={seq.n}")
    n = seq.n
    entries = seq.entries
    if any((e <= 0) if seq.exact else (e <= 0) for e in entries):
        report.check("positivity", False, witness=entries)
        return report
    report.check("positivity", True, count=len(entries))

    # solve k from the first relation: k*a_1 = a_0 + a_2 = a_2
    k = entries[1] / entries[0]
    bad = None
    for i in range(1, n):
        left = k * seq.entry(i)
        right = seq.entry(i - 1) + seq.entry(i + 1)
        if seq.exact:
            ok = left == right
        else:
            ok = abs(left - right) <= 1e-12 * max(1.0, abs(right))
        if not ok:
            bad = (i, left, right)
            break
    report.check("three-term recurrence", bad is None, witness=bad, count=n - 1)
    if bad is not None:
        return report

    report.check("1 <= k < 2", QuadraticNumber(1) <= k < QuadraticNumber(2)
                 if seq.exact else 1.0 <= k < 2.0, witness=k)
    k_float = float(k)
    closed = 2.0 * math.cos(math.pi / n)
    report.check("k = 2cos(pi/n)", abs(k_float - closed) <= 1e-12,
                 witness=(k_float, closed))
    lam, vec = _largest_path_eigenvalue(n - 1)
    report.check("k = max eigenvalue of path graph", abs(k_float - lam) <= 1e-9,
                 witness=(k_float, lam))
    signs = set(1 if x > 0 else (-1 if x < 0 else 0) for x in vec)
    report.check("positive eigenvector", signs <= {1} or signs <= {-1},
                 witness=tuple(vec))
    return report
