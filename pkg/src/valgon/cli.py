"""Command-line front door: build models, run check suites, translate
valuations, and export artifacts.

Commands are chainable with ``--then`` so one invocation can build a model
and run several suites against it::

    valgon build plane --base gf2 --then check u --samples 1000 --seed 7

Exit status: 0 every check passed, 1 a check failed (the witness is in the
report), 2 a check was inconclusive within its sampling budget, 3 usage
error.  All sampling is seeded, so identical invocations produce identical
reports.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from .geometry import (
    POINT,
    LINE,
    PG2Model,
    check_gp_axioms,
    fano_model,
    grid_model,
    hexagon_model,
    incidence_dot,
)
from .metric import check_M_axioms, from_metric, to_metric
from .report import CheckReport, FAIL, INCONCLUSIVE, PASS
from .scalar import (
    FROBENIUS_SHIFT,
    IDENTITY,
    PrimeField,
    QuasifieldSpec,
    Rationals,
    SIGN,
    SeriesField,
    base_field_from_name,
    check_valued_quasifield,
    format_value,
)
from .translate import check_C_conditions, reduce_word, translate
from .tree import check_tree_axioms, pencil_tree, tree_json_text
from .valuation import (
    ResidueView,
    check_u_axioms,
    plane_valuation,
    residue_model,
    trivial_valuation,
)
from .weights import (
    canonical_weights,
    recurrence_constant,
    verify_weight_recurrence,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


class Session:
    """Model and valuation shared along a chained command line."""

    def __init__(self):
        self.model = None
        self.valuation = None
        self.statuses = []

    def require_valuation(self):
        if self.valuation is None:
            # sensible default so single commands work out of the box
            self.model = PG2Model(SeriesField(PrimeField(2)))
            self.valuation = plane_valuation(self.model)
        return self.valuation

    def note(self, report: CheckReport, as_json: bool, out=sys.stdout):
        self.statuses.append(report.status)
        print(report.json_str() if as_json else report.render(), file=out)

    @property
    def exit_code(self) -> int:
        if FAIL in self.statuses:
            return 1
        if INCONCLUSIVE in self.statuses:
            return 2
        return 0


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"--t expects an exact rational, got {text!r}: {exc}")


def parse_element(session: Session, spec: str):
    """Parse ``point:1,0,0`` / ``line:0,0,1`` (plane) or ``point:p00``
    (finite models) into an element of the session's model."""
    if ":" not in spec:
        raise UsageError(f"--element expects kind:coordinates, got {spec!r}")
    kind, _, body = spec.partition(":")
    kind = kind.strip().lower()
    if kind not in (POINT, LINE):
        raise UsageError(f"--element kind must be point or line, got {kind!r}")
    model = session.model
    if isinstance(model, PG2Model):
        coords = tuple(c.strip() for c in body.split(","))
        if len(coords) != 3:
            raise UsageError("plane elements need three coordinates")
        try:
            return model.point(coords) if kind == POINT else model.line(coords)
        except (ValueError, ArithmeticError) as exc:
            raise UsageError(f"bad coordinates {body!r}: {exc}")
    pool = model.points if kind == POINT else model.lines
    for e in pool:
        if str(e.payload) == body.strip():
            return e
    raise UsageError(f"no {kind} named {body!r} in the current model")


# ---------------------------------------------------------------------------
# subcommand implementations


def cmd_build(session: Session, args) -> None:
    if args.backend == "plane":
        try:
            base = base_field_from_name(args.base)
        except ValueError as exc:
            raise UsageError(str(exc))
        session.model = PG2Model(SeriesField(base))
        session.valuation = plane_valuation(session.model)
    elif args.backend == "quadrangle":
        from .quadrangle import QuadrangleModel, quadrangle_valuation

        try:
            session.model = QuadrangleModel(args.h, args.h1, args.h2)
        except ValueError as exc:
            raise UsageError(str(exc))
        session.valuation = quadrangle_valuation(session.model)
    elif args.backend == "finite":
        builders = {"fano": fano_model, "grid": grid_model,
                    "hexagon": hexagon_model}
        if args.name not in builders:
            raise UsageError(f"unknown finite model {args.name!r}")
        session.model = builders[args.name]()
        session.valuation = trivial_valuation(session.model)
    print(f"built {session.model!r} with valuation {session.valuation.name}")


def _positive_samples(args):
    if args.samples < 1:
        raise UsageError("--samples must be a positive integer")


def cmd_check(session: Session, args) -> None:
    suite = args.suite
    if suite == "quasifield":
        _positive_samples(args)
        spec = _quasifield_spec(args.kind)
        session.note(check_valued_quasifield(spec, samples=args.samples,
                                             seed=args.seed), args.json)
        return
    v = session.require_valuation()
    if suite == "gp":
        _positive_samples(args)
        session.note(check_gp_axioms(session.model, samples=args.samples,
                                     seed=args.seed, weak_allowed=args.weak),
                     args.json)
    elif suite == "u":
        _positive_samples(args)
        session.note(check_u_axioms(v, samples=args.samples, seed=args.seed),
                     args.json)
    elif suite == "c":
        _positive_samples(args)
        x = parse_element(session, args.element or "point:1,0,0")
        session.note(check_C_conditions(v, x, samples=args.samples,
                                        seed=args.seed), args.json)
    elif suite == "m":
        _positive_samples(args)
        if v.n != 3:
            raise UsageError("the metric correspondence needs gonality 3")
        plane = to_metric(v, _fraction(args.t))
        session.note(check_M_axioms(plane, samples=args.samples,
                                    seed=args.seed), args.json)
    elif suite == "tree":
        center = parse_element(session, args.element or "line:0,0,1")
        ends = session.model.pencil_sample(center, max(args.samples, 3),
                                           seed=args.seed)
        tree = pencil_tree(v, center, ends)
        session.note(check_tree_axioms(tree), args.json)
    else:
        raise UsageError(f"unknown check suite {suite!r}")


def _quasifield_spec(kind: str) -> QuasifieldSpec:
    kind = kind.lower()
    if kind == "identity":
        return QuasifieldSpec(SeriesField(Rationals()), IDENTITY)
    if kind == "sign":
        return QuasifieldSpec(SeriesField(Rationals(), exponent_primes="odd"),
                              SIGN)
    if kind == "frobenius":
        return QuasifieldSpec(SeriesField(PrimeField(2), exponent_primes={2}),
                              FROBENIUS_SHIFT)
    raise UsageError(f"unknown quasifield kind {kind!r}")


def cmd_weights(session: Session, args) -> None:
    if args.n < 3:
        raise UsageError("--n must be at least 3")
    weights = canonical_weights(args.n)
    if weights.exact:
        entries = ", ".join(format_value(a) for a in weights.entries)
        k = format_value(recurrence_constant(args.n))
    else:
        entries = ", ".join(f"{float(a):.12f}" for a in weights.entries)
        k = f"{float(recurrence_constant(args.n)):.12f}"
    print(f"weights(n={args.n}): {entries}")
    print(f"k = {k}")
    session.note(verify_weight_recurrence(weights), args.json)


def cmd_translate(session: Session, args) -> None:
    v = session.require_valuation()
    x = parse_element(session, args.element or "point:1,0,0")
    t = _fraction(args.t)
    if t < 0:
        raise UsageError("--t must be non-negative")
    session.valuation = translate(v, x, t)
    print(f"translated by {t} toward {x!r}; "
          f"word now has {len(session.valuation.word)} step(s)")
    session.statuses.append(PASS)


def cmd_reduce(session: Session, args) -> None:
    import random

    v = session.require_valuation()
    if args.length < 1:
        raise UsageError("--length must be a positive integer")
    rng = random.Random(args.seed)
    word = []
    for _ in range(args.length):
        e = session.model.random_element(rng)
        word.append((e, Fraction(rng.randrange(1, 5), 2)))
    p, k, L, l = reduce_word(v, word)
    before = sum(step[1] for step in word)
    after = k + l
    print(f"word of length {args.length} (total {before}) reduced to flag:")
    print(f"  point {p!r} with length {k}")
    print(f"  line  {L!r} with length {l}")
    report = CheckReport("word reduction")
    report.check("flag is incident", session.model.incident(p, L))
    report.check("total length non-increasing", after <= before,
                 witness=(before, after))
    session.note(report, args.json)


def cmd_residue(session: Session, args) -> None:
    v = session.require_valuation()
    report = CheckReport(f"residue of {v.name}")
    if isinstance(session.model, PG2Model):
        view = ResidueView(v)
        import random

        rng = random.Random(args.seed)
        witness = None
        count = 0
        for _ in range(max(args.samples, 4)):
            line = session.model.random_element(rng, LINE)
            groups = view.classes_on_pencil(line, samples=24,
                                            seed=rng.randrange(1 << 20))
            count += 1
            order = session.model.field.base_field.order
            if len(groups) != order + 1:
                witness = (line, len(groups))
        report.check("residue lines carry q+1 point classes",
                     witness is None, witness=witness, count=count)
        session.note(report, args.json)
        return
    quotient, _ = residue_model(v)
    report.check("residue is a polygon",
                 check_gp_axioms(quotient, weak_allowed=True).passed)
    report.check("class counts",
                 len(quotient.points) <= len(session.model.points),
                 count=len(quotient.points))
    if args.dot:
        with open(args.dot, "w") as fh:
            fh.write(incidence_dot(quotient, title="residue"))
        print(f"wrote {args.dot}")
    session.note(report, args.json)


def cmd_tree(session: Session, args) -> None:
    if args.action != "export":
        raise UsageError("tree supports the single action 'export'")
    v = session.require_valuation()
    center = parse_element(session, args.element or "line:0,0,1")
    ends = session.model.pencil_sample(center, max(args.samples, 3),
                                       seed=args.seed)
    tree = pencil_tree(v, center, ends)
    text = tree_json_text(tree)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"wrote {args.out}")
    else:
        print(text)
    session.statuses.append(PASS)


def cmd_metric(session: Session, args) -> None:
    if args.action != "check":
        raise UsageError("metric supports the single action 'check'")
    _positive_samples(args)
    v = session.require_valuation()
    if v.n != 3:
        raise UsageError("the metric correspondence needs gonality 3")
    t = _fraction(args.t)
    plane = to_metric(v, t)
    report = check_M_axioms(plane, samples=args.samples, seed=args.seed)
    recovered = from_metric(plane)
    import random

    rng = random.Random(args.seed)
    witness = None
    for _ in range(24):
        a = session.model.random_element(rng, POINT)
        b = session.model.random_element(rng, POINT)
        if a == b:
            continue
        if recovered.u_of(a, b) != v.u_of(a, b):
            witness = (a, b)
            break
    report.check("round trip recovers the valuation", witness is None,
                 witness=witness, count=24)
    session.note(report, args.json)


# ---------------------------------------------------------------------------
# argument wiring


def build_parser() -> _Parser:
    parser = _Parser(prog="valgon", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, samples=200):
        p.add_argument("--samples", type=int, default=samples)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--json", action="store_true",
                       help="emit the report as JSON")

    p = sub.add_parser("build", help="select a model backend")
    p.add_argument("backend", choices=["plane", "quadrangle", "finite"])
    p.add_argument("--base", default="gf2")
    p.add_argument("--h", type=int, default=3)
    p.add_argument("--h1", type=int, default=1)
    p.add_argument("--h2", type=int, default=0)
    p.add_argument("--name", default="fano")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("check", help="run an axiom suite")
    p.add_argument("suite", type=str.lower,
                   choices=["gp", "u", "c", "m", "tree", "quasifield"])
    common(p)
    p.add_argument("--weak", action="store_true")
    p.add_argument("--element")
    p.add_argument("--t", default="2")
    p.add_argument("--kind", default="sign",
                   help="quasifield kind: identity, sign, frobenius")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("weights", help="canonical closed-path weights")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_weights)

    p = sub.add_parser("translate", help="move the valuation toward an element")
    p.add_argument("--element")
    p.add_argument("--t", required=True)
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("reduce", help="reduce a random translation word")
    p.add_argument("--length", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("residue", help="inspect the residue geometry")
    common(p, samples=8)
    p.add_argument("--dot", help="write the residue incidence graph here")
    p.set_defaults(func=cmd_residue)

    p = sub.add_parser("tree", help="export a pencil tree")
    p.add_argument("action", choices=["export"])
    common(p, samples=6)
    p.add_argument("--element")
    p.add_argument("--out")
    p.set_defaults(func=cmd_tree)

    p = sub.add_parser("metric", help="the sine-rule metric correspondence")
    p.add_argument("action", choices=["check"])
    common(p, samples=120)
    p.add_argument("--t", default="2")
    p.set_defaults(func=cmd_metric)

    return parser


def split_chain(argv):
    segments = [[]]
    for token in argv:
        if token == "--then":
            segments.append([])
        else:
            segments[-1].append(token)
    return [s for s in segments if s]


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    session = Session()
    try:
        segments = split_chain(argv)
        if not segments:
            raise UsageError("no command given")
        for segment in segments:
            args = parser.parse_args(segment)
            args.func(session, args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 3
    return session.exit_code


if __name__ == "__main__":
    sys.exit(main())
