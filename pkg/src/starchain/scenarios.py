"""Configuration-driven verification scenarios and JSON reports.

The runner executes named property suites against a single structured
configuration and produces deterministic reports.  Report JSON schema
(version 1): top-level keys sorted alphabetically,

    {"checks": [record, ...],
     "config_digest": "<12 hex>",
     "schema": 1,
     "seed": <int>,
     "suite": "<name>"}

where each record is {"actual": str, "expected": str, "inputs": "<12
hex>", "law": str, "name": str, "passed": bool}.  A report created with
no suite context serializes to exactly {"checks":[...]}.  Wall-clock
runtimes are kept on the in-memory objects only; serialized reports
contain nothing time- or machine-dependent, so a re-run with the same
configuration and seed is byte-identical.

Golden fixture layout (emit_fixtures): one JSON file per table in the
target directory: character_blocks.json (idempotent-word coefficients by
degree), genus_series.json (Pontryagin coefficients), and
normalization_chain.json (term counts of the order-normalization chains).
"""

import hashlib
import json
import random
import time
from fractions import Fraction

from .cyclic import (ChainContext, CyclicChain, chern_character,
                     chern_coefficients, chern_word_chain,
                     coinvariants_to_homogeneous, d_map,
                     homogeneous_to_coinvariants, q_map)
from .forms import hkr, mu_normalization_chain
from .group_coh import (GroupCochain, equivariant_ahat, equivariant_theta,
                        phi_pair, tr_xi, trace_pair)
from .groups import CyclicGroup
from .lie_gf import (InvariantConnection, LieCochain, a_hat_series,
                     gf_form, lie_differential, theta_hat_cochain)
from .scalars import FieldElement, HbarLaurent, ULaurent
from .torus import CrossedElement, TorusElement, TranslationAction, \
    symplectic_form
from .weyl import Derivation, WeylElement

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Invalid scenario configuration; carries (field, message) pairs."""

    def __init__(self, problems):
        self.problems = list(problems)
        lines = "; ".join(f"{f}: {m}" for f, m in self.problems)
        super().__init__(f"invalid configuration: {lines}")


class ScenarioConfig:
    __slots__ = ("dim", "h_trunc", "u_trunc", "weyl_order", "level",
                 "group_order", "shifts", "twist", "cochain", "idempotent",
                 "suites", "seed")

    def __init__(self, dim=1, h_trunc=6, u_trunc=3, weyl_order=6, level=60,
                 group_order=None, shifts=None, twist=None,
                 cochain="linear", idempotent="conjugated",
                 suites=None, seed=20260822):
        self.dim = dim
        self.h_trunc = h_trunc
        self.u_trunc = u_trunc
        self.weyl_order = weyl_order
        self.level = level
        self.group_order = group_order
        if shifts is None:
            shifts = [Fraction(1, 3), Fraction(1, 5)] + \
                [Fraction(0)] * (2 * dim - 2)
        self.shifts = [Fraction(s) for s in shifts]
        self.twist = None if twist is None else [int(w) for w in twist]
        self.cochain = cochain
        self.idempotent = idempotent
        self.suites = list(suites) if suites is not None else ["all"]
        self.seed = seed
        self._validate()

    def _validate(self):
        problems = []
        if not isinstance(self.dim, int) or self.dim < 1:
            problems.append(("dim", "must be a positive integer"))
        for name in ("h_trunc", "u_trunc", "weyl_order"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 0:
                problems.append((name, "must be a nonnegative integer"))
        if not isinstance(self.level, int) or self.level < 1:
            problems.append(("level", "must be a positive integer"))
        if self.group_order is not None and (
                not isinstance(self.group_order, int) or self.group_order < 1):
            problems.append(("group_order", "must be null or positive"))
        if isinstance(self.dim, int) and len(self.shifts) != 2 * self.dim:
            problems.append(("shifts", "need exactly 2*dim entries"))
        if isinstance(self.level, int) and self.level >= 1:
            for s in self.shifts:
                if self.level % s.denominator:
                    problems.append(
                        ("shifts", f"denominator of {s} does not divide "
                                   f"level {self.level}"))
        if self.twist is not None:
            if len(self.twist) != 2 * self.dim:
                problems.append(("twist", "need exactly 2*dim entries"))
            if self.group_order is not None:
                problems.append(
                    ("twist", "twists need the infinite cyclic group"))
        if self.cochain not in ("trivial", "linear", "quadratic-product"):
            problems.append(("cochain", f"unknown kind {self.cochain!r}"))
        elif self.cochain != "trivial" and self.group_order is not None:
            problems.append(
                ("cochain", "polynomial cochains need the infinite group"))
        if self.idempotent not in ("unit", "diagonal", "conjugated",
                                   "crossed-conjugated"):
            problems.append(("idempotent", f"unknown kind {self.idempotent!r}"))
        for s in self.suites:
            if s != "all" and s not in _SUITES:
                problems.append(("suites", f"unknown suite {s!r}"))
        if not isinstance(self.seed, int) or self.seed < 0:
            problems.append(("seed", "must be a nonnegative integer"))
        if problems:
            raise ConfigError(problems)

    @classmethod
    def from_dict(cls, data) -> "ScenarioConfig":
        if not isinstance(data, dict):
            raise ConfigError([("<root>", "configuration must be an object")])
        known = {"dim", "h_trunc", "u_trunc", "weyl_order", "level",
                 "group_order", "shifts", "twist", "cochain", "idempotent",
                 "suites", "seed"}
        problems = [(k, "unknown field") for k in sorted(set(data) - known)]
        if problems:
            raise ConfigError(problems)
        kwargs = dict(data)
        if "shifts" in kwargs and kwargs["shifts"] is not None:
            try:
                kwargs["shifts"] = [Fraction(str(s)) for s in kwargs["shifts"]]
            except (ValueError, ZeroDivisionError) as exc:
                raise ConfigError([("shifts", str(exc))]) from None
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path) -> "ScenarioConfig":
        with open(path, "r", encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError([("<file>", f"not valid JSON: {exc}")]) \
                    from None
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return {
            "dim": self.dim, "h_trunc": self.h_trunc,
            "u_trunc": self.u_trunc, "weyl_order": self.weyl_order,
            "level": self.level, "group_order": self.group_order,
            "shifts": [str(s) for s in self.shifts],
            "twist": self.twist, "cochain": self.cochain,
            "idempotent": self.idempotent, "suites": self.suites,
            "seed": self.seed,
        }

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True,
                          separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:12]

    # -- derived objects ---------------------------------------------------

    def group(self) -> CyclicGroup:
        return CyclicGroup(self.group_order)

    def action(self) -> TranslationAction:
        return TranslationAction(self.dim, self.group(), self.shifts,
                                 None if self.twist is None
                                 else tuple(self.twist))

    def group_cochain(self, degree_hint=None) -> GroupCochain:
        g = self.group()
        if self.cochain == "trivial":
            return GroupCochain.constant(g, 1)
        if self.cochain == "linear":
            return GroupCochain.polynomial(g, 1, {(1,): 1})
        return GroupCochain.polynomial(g, 2, {(1, 1): 1})

    def idempotent_matrix(self):
        h = self.h_trunc
        if self.idempotent in ("unit", "diagonal", "conjugated"):
            one = TorusElement.one(self.dim, h)
            zero = TorusElement.zero(self.dim)
            if self.idempotent == "unit":
                return [[one]]
            if self.idempotent == "diagonal":
                return [[one, zero], [zero, zero]]
            m = (1,) + (0,) * (2 * self.dim - 1)
            n = (0,) * (2 * self.dim - 1) + (1,)
            a = TorusElement.plane_wave(self.dim, m, h)
            b = TorusElement.plane_wave(self.dim, n, h)
        else:
            act = self.action()
            one = CrossedElement.one(act, h)
            m = (1,) + (0,) * (2 * self.dim - 1)
            n = (0,) * (2 * self.dim - 1) + (1,)
            a = CrossedElement(act, {1: TorusElement.plane_wave(
                self.dim, m, h)})
            b = CrossedElement(act, {-1: TorusElement.plane_wave(
                self.dim, n, h)})
        ab = a.star(b)
        return [[one + ab, -a - ab.star(a)], [b, -b.star(a)]]


class CheckRecord:
    __slots__ = ("name", "law", "inputs", "expected", "actual", "passed",
                 "runtime")

    def __init__(self, name, law, inputs, expected, actual, passed,
                 runtime=0.0):
        self.name = name
        self.law = law
        self.inputs = inputs
        self.expected = expected
        self.actual = actual
        self.passed = passed
        self.runtime = runtime

    def to_dict(self) -> dict:
        return {"actual": self.actual, "expected": self.expected,
                "inputs": self.inputs, "law": self.law, "name": self.name,
                "passed": self.passed}


class Report:
    __slots__ = ("checks", "suite", "seed", "config_digest", "runtime")

    def __init__(self, checks=None, suite=None, seed=None,
                 config_digest=None, runtime=0.0):
        self.checks = list(checks) if checks else []
        self.suite = suite
        self.seed = seed
        self.config_digest = config_digest
        self.runtime = runtime

    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> str:
        body: dict = {"checks": [c.to_dict() for c in self.checks]}
        if self.suite is not None:
            body["suite"] = self.suite
            body["schema"] = SCHEMA_VERSION
        if self.seed is not None:
            body["seed"] = self.seed
        if self.config_digest is not None:
            body["config_digest"] = self.config_digest
        return json.dumps(body, sort_keys=True, separators=(",", ":"))


def emit_report(report: Report, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(report.to_json())
        fh.write("\n")


def _digest(*parts) -> str:
    blob = "|".join(str(p) for p in parts)
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def _record(name, law, inputs, expected, actual, passed, t0):
    return CheckRecord(name, law, _digest(*inputs), str(expected),
                       str(actual), bool(passed), time.monotonic() - t0)


def _count_record(name, law, inputs, failures, total, t0):
    return CheckRecord(name, law, _digest(*inputs),
                       f"0 failures in {total}",
                       f"{failures} failures in {total}",
                       failures == 0, time.monotonic() - t0)


# -- random generators shared by suites ------------------------------------

def _rand_torus(rng, cfg, terms=3, span=3):
    out = TorusElement.zero(cfg.dim)
    for _ in range(terms):
        mode = tuple(rng.randint(-span, span) for _ in range(2 * cfg.dim))
        num = rng.randint(-6, 6) or 1
        c = HbarLaurent.from_rational(
            Fraction(num, rng.choice([1, 2, 3])), cfg.h_trunc,
            rng.randint(0, min(1, cfg.h_trunc)))
        out = out + TorusElement.plane_wave(cfg.dim, mode, cfg.h_trunc) * c
    return out


def _rand_weyl(rng, cfg, terms=3):
    w = WeylElement.zero(cfg.dim, cfg.weyl_order)
    for _ in range(terms):
        a = tuple(rng.randint(0, 2) for _ in range(cfg.dim))
        b = tuple(rng.randint(0, 2) for _ in range(cfg.dim))
        num = rng.randint(-6, 6) or 1
        w = w + WeylElement.monomial(
            cfg.dim, a, b, rng.randint(0, 1),
            Fraction(num, rng.choice([1, 2])), cfg.weyl_order)
    return w


def _rand_crossed_chain(rng, ctx, deg, terms=2, span=2):
    coeffs = {}
    for _ in range(terms):
        key = tuple((tuple(rng.randint(-span, span)
                           for _ in range(2 * ctx.dim)),
                     rng.randint(-span, span)) for _ in range(deg + 1))
        num = rng.randint(-4, 4) or 1
        coeffs[key] = ULaurent.from_hbar(
            HbarLaurent.from_rational(Fraction(num, 2), ctx.h_trunc),
            ctx.u_trunc, rng.randint(-1, 1))
    return CyclicChain(ctx, coeffs)


def _rand_chain(rng, ctx, deg, terms=2):
    if ctx.kind == "crossed":
        return _rand_crossed_chain(rng, ctx, deg, terms)
    coeffs = {}
    for _ in range(terms):
        if ctx.kind == "torus":
            key = tuple(tuple(rng.randint(-2, 2)
                              for _ in range(2 * ctx.dim))
                        for _ in range(deg + 1))
        else:
            key = tuple(rng.randint(-2, 2) for _ in range(deg + 1))
        num = rng.randint(-4, 4) or 1
        coeffs[key] = ULaurent.from_hbar(
            HbarLaurent.from_rational(Fraction(num, 2), ctx.h_trunc),
            ctx.u_trunc, rng.randint(-1, 1))
    return CyclicChain(ctx, coeffs)


# -- suites ----------------------------------------------------------------

def _suite_moyal(cfg: ScenarioConfig, rng) -> list:
    out = []
    t0 = time.monotonic()
    trials = 40
    fails = 0
    for _ in range(trials):
        a, b, c = (_rand_torus(rng, cfg) for _ in range(3))
        if a.star(b).star(c) != a.star(b.star(c)):
            fails += 1
    out.append(_count_record(
        "torus-star-associativity", "star-product-associativity",
        ("torus", cfg.dim, cfg.h_trunc, cfg.seed), fails, trials, t0))
    t0 = time.monotonic()
    fails = 0
    for _ in range(trials):
        a, b, c = (_rand_weyl(rng, cfg) for _ in range(3))
        if a.star(b).star(c) != a.star(b.star(c)):
            fails += 1
    out.append(_count_record(
        "weyl-star-associativity", "star-product-associativity",
        ("weyl", cfg.dim, cfg.weyl_order, cfg.seed), fails, trials, t0))
    if cfg.h_trunc == 0:
        t0 = time.monotonic()
        fails = 0
        for _ in range(trials):
            a, b = _rand_torus(rng, cfg), _rand_torus(rng, cfg)
            if a.star(b) != a.symbol_mul(b):
                fails += 1
        out.append(_count_record(
            "classical-limit-degeneration", "classical-limit",
            ("torus", cfg.dim, 0, cfg.seed), fails, trials, t0))
    return out


def _suite_normalization(cfg: ScenarioConfig, rng) -> list:
    out = []
    t0 = time.monotonic()
    d, order = cfg.dim, max(cfg.weyl_order, 2)
    i_h = WeylElement.hbar(d, 1, order) * FieldElement.i_unit()
    fails = 0
    for j in range(d):
        x = WeylElement.x_hat(d, j, order)
        xi = WeylElement.xi_hat(d, j, order)
        if xi.star(x) - x.star(xi) != i_h:
            fails += 1
    out.append(_count_record(
        "generator-commutator", "canonical-commutation",
        ("weyl", d, order), fails, d, t0))
    t0 = time.monotonic()
    one = TorusElement.one(d, cfg.h_trunc)
    got = one.trace()
    want = HbarLaurent.from_field(
        (FieldElement.i_unit() * (-1)) ** d, cfg.h_trunc - d, -d)
    out.append(_record("unit-trace", "trace-normalization",
                       ("torus", d, cfg.h_trunc), want, got,
                       got == want, t0))
    t0 = time.monotonic()
    trials = 25
    fails = 0
    for _ in range(trials):
        a, b = _rand_torus(rng, cfg), _rand_torus(rng, cfg)
        if not (a.star(b) - b.star(a)).trace().is_zero():
            fails += 1
    out.append(_count_record(
        "trace-kills-commutators", "trace-property",
        ("torus", d, cfg.h_trunc, cfg.seed), fails, trials, t0))
    return out


def _complex_contexts(cfg: ScenarioConfig):
    act = cfg.action()
    return [
        ChainContext.torus(cfg.dim, h_trunc=cfg.h_trunc,
                           u_trunc=cfg.u_trunc),
        ChainContext.crossed(act, h_trunc=cfg.h_trunc, u_trunc=cfg.u_trunc),
        ChainContext.group_labels(cfg.group(), u_trunc=cfg.u_trunc),
    ]


def _suite_complexes(cfg: ScenarioConfig, rng) -> list:
    out = []
    for ctx in _complex_contexts(cfg):
        t0 = time.monotonic()
        trials = 6
        fails = 0
        for _ in range(trials):
            x = _rand_chain(rng, ctx, rng.choice([1, 2, 3]))
            if not x.boundary().boundary().is_zero():
                fails += 1
            if not x.connes_boundary().connes_boundary().is_zero():
                fails += 1
            anti = x.boundary().connes_boundary() + \
                x.connes_boundary().boundary()
            if not anti.is_zero():
                fails += 1
        out.append(_count_record(
            f"{ctx.kind}-differential-identities", "cyclic-complex-axioms",
            (ctx.kind, cfg.dim, cfg.seed), fails, trials, t0))
    return out


def _rand_identity_chain(rng, ctx, deg, terms=2, span=2):
    g = ctx.group
    coeffs = {}
    for _ in range(terms):
        labels = [rng.randint(-span, span) for _ in range(deg)]
        labels.append(g.inverse(g.compose_all(labels)))
        key = tuple((tuple(rng.randint(-span, span)
                           for _ in range(2 * ctx.dim)), lab)
                    for lab in labels)
        num = rng.randint(-4, 4) or 1
        coeffs[key] = ULaurent.from_hbar(
            HbarLaurent.from_rational(Fraction(num, 2), ctx.h_trunc),
            ctx.u_trunc, rng.randint(-1, 1))
    return CyclicChain(ctx, coeffs)


def _suite_splittings(cfg: ScenarioConfig, rng) -> list:
    out = []
    act = cfg.action()
    ctx = ChainContext.crossed(act, h_trunc=cfg.h_trunc, u_trunc=cfg.u_trunc)
    t0 = time.monotonic()
    trials = 6
    fails = 0
    for _ in range(trials):
        x = _rand_identity_chain(rng, ctx, rng.choice([0, 1, 2]))
        f = homogeneous_to_coinvariants(x)
        if coinvariants_to_homogeneous(f) != x:
            fails += 1
        if homogeneous_to_coinvariants(coinvariants_to_homogeneous(f)) != f:
            fails += 1
    out.append(_count_record(
        "coinvariant-roundtrip", "coinvariant-isomorphism",
        ("crossed", cfg.dim, cfg.seed), fails, trials, t0))
    t0 = time.monotonic()
    fails = 0
    for _ in range(4):
        x = _rand_identity_chain(rng, ctx, rng.choice([0, 1]))
        f = homogeneous_to_coinvariants(x)
        if q_map(f.mixed_boundary()) != q_map(f).total_boundary():
            fails += 1
    out.append(_count_record(
        "splitting-chain-map", "equivariant-splitting",
        ("crossed", cfg.dim, cfg.seed), fails, 4, t0))
    t0 = time.monotonic()
    fails = 0
    for _ in range(trials):
        x = _rand_chain(rng, ctx, rng.choice([0, 1, 2]))
        if d_map(x.mixed_boundary()) != d_map(x).total_boundary():
            fails += 1
    out.append(_count_record(
        "decomposition-chain-map", "chain-decomposition",
        ("crossed", cfg.dim, cfg.seed), fails, trials, t0))
    return out


def _suite_characters(cfg: ScenarioConfig, rng) -> list:
    out = []
    t0 = time.monotonic()
    ch = chern_word_chain(min(cfg.u_trunc, 2))
    got = ch.mixed_boundary()
    out.append(_record(
        "abstract-character-cycle", "character-cycle",
        ("idem", cfg.u_trunc), "zero chain",
        "zero chain" if got.is_zero() else repr(got), got.is_zero(), t0))
    t0 = time.monotonic()
    matrix = cfg.idempotent_matrix()
    ch_e = chern_character(matrix, cfg.u_trunc)
    got = ch_e.mixed_boundary()
    out.append(_record(
        f"{cfg.idempotent}-character-cycle", "character-cycle",
        (cfg.idempotent, cfg.dim, cfg.h_trunc, cfg.u_trunc), "zero chain",
        "zero chain" if got.is_zero() else repr(got), got.is_zero(), t0))
    return out


def _suite_trace_cocycles(cfg: ScenarioConfig, rng) -> list:
    out = []
    act = cfg.action()
    ctx = ChainContext.crossed(act, h_trunc=cfg.h_trunc, u_trunc=cfg.u_trunc)
    xi = cfg.group_cochain()
    T = tr_xi(xi, act)
    t0 = time.monotonic()
    trials = 20
    fails = 0
    for _ in range(trials):
        x = _rand_crossed_chain(rng, ctx, rng.choice([0, 1, 2]))
        if not T.pair(x.mixed_boundary()).is_zero():
            fails += 1
    out.append(_count_record(
        "twisted-trace-cocycle", "twisted-trace-cocycle",
        (cfg.cochain, cfg.dim, cfg.seed), fails, trials, t0))
    return out


def _suite_forms(cfg: ScenarioConfig, rng) -> list:
    out = []
    sym = ChainContext.sym(cfg.dim, h_trunc=cfg.h_trunc,
                           u_trunc=cfg.u_trunc)
    t0 = time.monotonic()
    trials = 10
    fails = 0
    for _ in range(trials):
        coeffs = {}
        for _ in range(2):
            key = tuple((tuple(rng.randint(0, 2) for _ in range(cfg.dim)),
                         tuple(rng.randint(0, 2) for _ in range(cfg.dim)))
                        for _ in range(rng.choice([2, 3])))
            num = rng.randint(-4, 4) or 1
            coeffs[key] = ULaurent.from_hbar(
                HbarLaurent.from_rational(Fraction(num, 2), cfg.h_trunc),
                cfg.u_trunc, rng.randint(-1, 1))
        x = CyclicChain(sym, coeffs)
        lhs = hkr(x.mixed_boundary())
        rhs = hkr(x).d_hat().shift_u(1).truncate_u(cfg.u_trunc)
        if lhs != rhs:
            fails += 1
        if not hkr(x.boundary()).is_zero():
            fails += 1
    out.append(_count_record(
        "chains-to-forms-chain-map", "derivative-bridge",
        ("sym", cfg.dim, cfg.seed), fails, trials, t0))
    t0 = time.monotonic()
    mu = mu_normalization_chain(cfg.dim, h_trunc=cfg.h_trunc,
                                u_trunc=cfg.u_trunc)
    terms = len(mu.coeffs)
    expected = 1
    for t in range(1, 2 * cfg.dim + 1):
        expected *= t
    out.append(_record(
        "normalization-chain-size", "order-normalization",
        ("weyl", cfg.dim), expected, terms, expected == terms, t0))
    return out


def _suite_lie(cfg: ScenarioConfig, rng) -> list:
    out = []
    order = max(cfg.weyl_order, 10)
    t0 = time.monotonic()
    trials = 6
    fails = 0
    for _ in range(trials):
        keys = [((rng.randint(0, 2),) * cfg.dim,
                 (rng.randint(0, 2),) * cfg.dim, rng.randint(0, 1))]
        lam = LieCochain.coefficient_product(keys)
        dd = lie_differential(lie_differential(lam))
        xs = []
        for _ in range(3):
            w = WeylElement.zero(cfg.dim, order)
            for _ in range(3):
                a = tuple(rng.randint(0, 2) for _ in range(cfg.dim))
                b = tuple(rng.randint(0, 2) for _ in range(cfg.dim))
                num = rng.randint(-6, 6) or 1
                w = w + WeylElement.monomial(cfg.dim, a, b, 0,
                                             Fraction(num, 2), order)
            xs.append(Derivation(w))
        if not dd.evaluate(tuple(xs)).is_zero():
            fails += 1
    out.append(_count_record(
        "lie-differential-squares", "chevalley-eilenberg",
        ("weyl", cfg.dim, cfg.seed), fails, trials, t0))
    t0 = time.monotonic()
    conn = InvariantConnection(cfg.dim, order)
    got = gf_form(theta_hat_cochain(), conn, cfg.h_trunc)
    want = symplectic_form(cfg.dim, cfg.h_trunc) * HbarLaurent.from_field(
        FieldElement.i_unit() * (-1), cfg.h_trunc, power=-1)
    out.append(_record(
        "defect-class-datum", "curvature-class",
        ("weyl", cfg.dim, order), "scaled area form",
        "scaled area form" if got == want else repr(got),
        got == want, t0))
    t0 = time.monotonic()
    series = a_hat_series(1)
    got_c = series.get((1,))
    out.append(_record(
        "genus-leading-coefficient", "genus-series",
        ("series", 1), Fraction(-1, 24), got_c,
        got_c == Fraction(-1, 24), t0))
    return out


def _suite_index(cfg: ScenarioConfig, rng) -> list:
    report = index_check(cfg)
    return report.checks


_SUITES = {
    "moyal-associativity": _suite_moyal,
    "normalization": _suite_normalization,
    "complex-identities": _suite_complexes,
    "splitting-roundtrips": _suite_splittings,
    "character-cycles": _suite_characters,
    "trace-cocycles": _suite_trace_cocycles,
    "forms-bridge": _suite_forms,
    "lie-cochain-calculus": _suite_lie,
    "index-identity": _suite_index,
}


def available_suites() -> list:
    return sorted(_SUITES)


def run_suite(name: str, cfg: ScenarioConfig) -> Report:
    t0 = time.monotonic()
    if name == "all":
        if "all" in cfg.suites:
            selected = available_suites()
        else:
            selected = [s for s in available_suites() if s in cfg.suites]
        checks = []
        for n in selected:
            checks.extend(_SUITES[n](cfg, random.Random(cfg.seed)))
    elif name in _SUITES:
        checks = _SUITES[name](cfg, random.Random(cfg.seed))
    else:
        raise KeyError(
            f"unknown suite {name!r}; available: "
            + ", ".join(available_suites() + ["all"]))
    return Report(checks, suite=name, seed=cfg.seed,
                  config_digest=cfg.digest(),
                  runtime=time.monotonic() - t0)


def index_check(cfg: ScenarioConfig) -> Report:
    """Both sides of the pairing identity on the configured idempotent:
    the trace side against the character, and the integral side through
    the class data with the degree-halving weights."""
    t_start = t0 = time.monotonic()
    matrix = cfg.idempotent_matrix()
    act = cfg.action()
    crossed = isinstance(matrix[0][0], CrossedElement)
    try:
        ch = chern_character(matrix, cfg.u_trunc)
    except ValueError as exc:
        rec = CheckRecord(
            "idempotency", "character-cycle",
            _digest(cfg.idempotent, cfg.dim), "idempotent matrix",
            str(exc), False, time.monotonic() - t0)
        return Report([rec], suite="index-check", seed=cfg.seed,
                      config_digest=cfg.digest(),
                      runtime=time.monotonic() - t_start)
    classes = equivariant_ahat(act, cfg.h_trunc).cup(
        equivariant_theta(act, cfg.h_trunc).exponential())
    checks = []
    if crossed:
        xi = cfg.group_cochain()
        lhs = tr_xi(xi, act).pair(ch)
        rhs = phi_pair(classes, xi, ch)
        law = "equivariant-index-pairing"
    else:
        xi = GroupCochain.constant(cfg.group(), 1)
        lhs = trace_pair(ch)
        rhs = phi_pair(classes, xi, ch)
        law = "index-pairing"
    checks.append(_record(
        "trace-side-equals-integral-side", law,
        (cfg.idempotent, cfg.cochain, cfg.dim, cfg.h_trunc, cfg.u_trunc),
        lhs, rhs, lhs == rhs, t0))
    if not crossed:
        t0 = time.monotonic()
        want = ULaurent.from_hbar(
            HbarLaurent.from_field(
                (FieldElement.i_unit() * (-1)) ** cfg.dim,
                cfg.h_trunc - cfg.dim, -cfg.dim),
            cfg.u_trunc)
        checks.append(_record(
            "value-is-reciprocal-volume", "trace-normalization",
            (cfg.idempotent, cfg.dim), want, lhs, lhs == want, t0))
    return Report(checks, suite="index-check", seed=cfg.seed,
                  config_digest=cfg.digest(),
                  runtime=time.monotonic() - t_start)


def emit_fixtures(cfg: ScenarioConfig, directory) -> list:
    """Write the golden tables; returns the list of files written."""
    import os
    os.makedirs(directory, exist_ok=True)
    written = []

    def dump(name, payload):
        path = os.path.join(directory, name)
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, sort_keys=True, separators=(",", ":"))
            fh.write("\n")
        written.append(path)

    blocks = {}
    for n in range(min(cfg.u_trunc, 2) + 1):
        blocks[str(n)] = {
            "".join(map(str, w)): str(q)
            for w, q in sorted(chern_coefficients(n).items())}
    dump("character_blocks.json", blocks)
    dump("genus_series.json",
         {"-".join(map(str, mono)) or "const": str(c)
          for mono, c in sorted(a_hat_series(2).items())})
    dump("normalization_chain.json",
         {"terms": {str(d): len(mu_normalization_chain(
             d, h_trunc=2, u_trunc=1).coeffs) for d in (1, 2)}})
    return written
