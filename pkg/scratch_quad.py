import random
from fractions import Fraction

from valgon.quadrangle import QuadrangleModel, QSeries
from valgon.geometry import POINT, LINE, check_gp_axioms

m = QuadrangleModel(3, 1, 0)
rng = random.Random(0)

# QSeries smoke tests
t = m.t_power(1)
one = m.one
x = one + t
inv = x.inverse()
print("inv check:", (x * inv + one).terms, (x * inv + one).prec)
r = x.root_odd(3)
print("root check:", (r.power(3) + x).terms and min((r.power(3) + x).terms),
      "prec", r.prec)
y = m.t_power(Fraction(-3, 2)) + m.t_power(2, 3)
print("val:", y.valuation())
ry = y.root_odd(3)
print("cube of root minus y terms below prec:",
      sorted((ry.power(3) + y).terms.items())[:3])

# incidence coherence: random flags
bad = 0
for i in range(200):
    p = m.random_element(rng, POINT)
    pencil = m.pencil_sample(p, 4, seed=i)
    for L in pencil:
        if not m.incident(p, L):
            bad += 1
            print("pencil not incident", p, L)
print("pencil incidence bad:", bad)

# join/meet coherence
bad = 0
for i in range(200):
    L = m.random_element(rng, LINE)
    pts = m.pencil_sample(L, 3, seed=1000 + i)
    for a in pts:
        for b in pts:
            if a == b:
                continue
            j = m.join(a, b)
            if j != L:
                bad += 1
                print("join mismatch", a.payload[0], b.payload[0], L.payload[0])
print("join bad:", bad)

bad = 0
for i in range(200):
    p = m.random_element(rng, POINT)
    ls = m.pencil_sample(p, 3, seed=2000 + i)
    for a in ls:
        for b in ls:
            if a == b:
                continue
            mt = m.meet(a, b)
            if mt != p:
                bad += 1
                print("meet mismatch", a.payload[0], b.payload[0], p.payload[0])
print("meet bad:", bad)

# projection / path coherence
bad = 0
for i in range(300):
    p = m.random_element(rng, POINT)
    L = m.random_element(rng, LINE)
    d = m.distance(p, L)
    if d != 3:
        continue
    try:
        path = m.path_between(p, L)
    except ArithmeticError as e:
        bad += 1
        print("path fail", e)
        continue
    q, j = path[2], path[1]
    if not (m.incident(p, j) and m.incident(q, j) and m.incident(q, L)):
        bad += 1
        print("flag broken", p.payload[0], L.payload[0])
print("projection bad:", bad)

rep = check_gp_axioms(m, samples=60, seed=5)
print(rep.render())
