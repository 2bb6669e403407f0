"""Lie algebra cochains on formal vector fields, evaluated through their
Weyl-algebra lifts, and the bridges from them to differential forms.

A cochain here is an alternating functional on tuples of inner
derivations.  The module provides the Chevalley-Eilenberg differential
with trivial coefficients, the flat invariant connection whose
horizontal lifts turn such cochains into constant-coefficient forms on
the torus, the curvature construction producing invariant polynomials
from quadratic parts, the genus series in the Pontryagin basis, the
equivariant class data recomputed from jet-level twist waves, and the
trace-side pairings that evaluate chains against these functionals.
"""

from fractions import Fraction
from itertools import combinations, permutations

from .cyclic import CyclicChain, d_map
from .group_coh import (EquivariantClassCocycle, GroupCochain, phi_pair,
                        word_to_form)
from .scalars import FieldElement, HbarLaurent, ULaurent
from .torus import TorusElement, TorusForm, TranslationAction, WeylSection
from .weyl import Derivation, WeylElement, commutator, extension_defect


def _fact(n: int) -> int:
    out = 1
    for t in range(2, n + 1):
        out *= t
    return out


def _perm_sign(perm) -> int:
    inv = 0
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                inv += 1
    return -1 if inv % 2 else 1


class LieCochain:
    """Alternating p-functional on derivations; values are field scalars
    or hbar-series, whichever the evaluator produces."""

    __slots__ = ("arity", "fn")

    def __init__(self, arity: int, fn):
        self.arity = arity
        self.fn = fn

    @classmethod
    def from_function(cls, arity: int, fn) -> "LieCochain":
        return cls(arity, fn)

    @classmethod
    def coefficient_product(cls, keys) -> "LieCochain":
        """Antisymmetrized product of representative-coefficient
        extractions; the workhorse for randomized cochains in tests."""
        keys = [tuple(k) for k in keys]
        p = len(keys)

        def fn(xs):
            total = FieldElement.zero()
            for perm in permutations(range(p)):
                prod = FieldElement.rational(_perm_sign(perm))
                for t, (a, b, k) in enumerate(keys):
                    prod = prod * xs[perm[t]].rep.coefficient(a, b, k)
                total = total + prod
            return total

        return cls(p, fn)

    def evaluate(self, xs):
        xs = tuple(xs)
        assert len(xs) == self.arity
        return self.fn(xs)

    def __call__(self, *xs):
        return self.evaluate(xs)

    def __repr__(self):
        return f"LieCochain(arity={self.arity})"


def lie_differential(lam: LieCochain) -> LieCochain:
    """Chevalley-Eilenberg differential with trivial coefficients:
    sum over pairs of (-1)^(i+j) lam([X_i, X_j], ...rest...)."""
    p = lam.arity

    def fn(xs):
        total = None
        for i, j in combinations(range(p + 1), 2):
            rest = tuple(xs[t] for t in range(p + 1) if t != i and t != j)
            v = lam.evaluate((xs[i].bracket(xs[j]),) + rest)
            if (i + j) % 2 == 0:
                v = v * (-1)
            total = v if total is None else total + v
        return total if total is not None else FieldElement.zero()

    return LieCochain(p + 1, fn)


def theta_hat_cochain() -> LieCochain:
    """The central lifting defect as an alternating 2-cochain."""
    return LieCochain(2, lambda xs: extension_defect(xs[0], xs[1]))


class InvariantConnection:
    """Horizontal lifts of the coordinate fields on the torus into inner
    derivations of the fiber Weyl algebra: the x-direction lifts act
    through the conjugate momentum generators and the xi-directions
    through the position generators, with the factors of i that make the
    commutation defect central."""

    __slots__ = ("dim", "order", "coeffs")

    def __init__(self, dim: int, order: int = 16):
        self.dim = dim
        self.order = order
        i = FieldElement.i_unit()
        coeffs = []
        for j in range(dim):
            coeffs.append(Derivation(WeylElement.xi_hat(dim, j, order) * i))
        for j in range(dim):
            coeffs.append(
                Derivation(WeylElement.x_hat(dim, j, order) * (i * (-1))))
        self.coeffs = coeffs

    def component(self, j: int) -> Derivation:
        return self.coeffs[j]

    def is_flat(self) -> bool:
        n = 2 * self.dim
        for a in range(n):
            for b in range(a + 1, n):
                if not self.coeffs[a].bracket(self.coeffs[b]).rep.is_zero():
                    return False
        return True

    def __repr__(self):
        return f"InvariantConnection(dim={self.dim})"


def _as_series(v, trunc: int) -> HbarLaurent:
    if isinstance(v, HbarLaurent):
        return v
    return HbarLaurent.from_field(v, trunc)


def gf_form(lam: LieCochain, conn: InvariantConnection,
            h_trunc: int) -> TorusForm:
    """Evaluate a cochain on the horizontal lifts, direction by
    direction; over the invariant connection the output form has
    constant coefficients."""
    dim = conn.dim
    one = TorusElement.one(dim, h_trunc)
    parts: dict = {}
    for legs in combinations(range(2 * dim), lam.arity):
        val = lam.evaluate(tuple(conn.component(j) for j in legs))
        series = _as_series(val, h_trunc)
        if series.is_zero():
            continue
        parts[legs] = one * series
    return TorusForm(dim, parts)


def curvature(x: Derivation, y: Derivation) -> Derivation:
    """Quadratic-truncation curvature: bracket of the quadratic parts
    minus the quadratic part of the bracket."""
    px = Derivation(x.rep.quadratic_part())
    py = Derivation(y.rep.quadratic_part())
    direct = px.bracket(py).rep
    through = x.bracket(y).rep.quadratic_part()
    return Derivation(direct - through)


def sp_matrix(d: Derivation, dim: int, order: int = 16):
    """Matrix of a quadratic derivation on the span of the generators,
    basis ordered x_0..x_{d-1}, xi_0..xi_{d-1}; entries are exact field
    scalars."""
    basis = [WeylElement.x_hat(dim, j, order) for j in range(dim)] + \
        [WeylElement.xi_hat(dim, j, order) for j in range(dim)]
    n = 2 * dim
    cols = []
    for b in basis:
        img = d.apply(b)
        col = []
        for i in range(dim):
            e = tuple(1 if t == i else 0 for t in range(dim))
            z = (0,) * dim
            col.append(img.coefficient(e, z, 0))
        for i in range(dim):
            e = tuple(1 if t == i else 0 for t in range(dim))
            z = (0,) * dim
            col.append(img.coefficient(z, e, 0))
        cols.append(col)
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def trace_functional(n: int, dim: int, order: int = 16):
    """Symmetrized trace of n-fold matrix products in the generator
    representation; an invariant polynomial on the quadratic algebra."""

    def mat_mul(a, b):
        size = len(a)
        return [[sum((a[i][k] * b[k][j] for k in range(size)),
                     FieldElement.zero())
                 for j in range(size)] for i in range(size)]

    def p(args):
        assert len(args) == n
        mats = [sp_matrix(a, dim, order) for a in args]
        total = FieldElement.zero()
        for perm in permutations(range(n)):
            acc = mats[perm[0]]
            for t in range(1, n):
                acc = mat_mul(acc, mats[perm[t]])
            tr = FieldElement.zero()
            for i in range(len(acc)):
                tr = tr + acc[i][i]
            total = total + tr
        return total * Fraction(1, _fact(n))

    return p


def chern_weil(p, n: int) -> LieCochain:
    """Curvature 2n-cochain of an invariant n-linear polynomial: full
    antisymmetrization of p applied to pairwise curvatures, averaged by
    1/(2n)!."""

    def fn(xs):
        total = FieldElement.zero()
        for perm in permutations(range(2 * n)):
            args = [curvature(xs[perm[2 * t]], xs[perm[2 * t + 1]])
                    for t in range(n)]
            v = p(args)
            if _perm_sign(perm) < 0:
                v = v * (-1)
            total = total + v
        return total * Fraction(1, _fact(2 * n))

    return LieCochain(2 * n, fn)


# -- the genus series ------------------------------------------------------

def _series_log_factor(max_weight: int) -> dict:
    """Coefficients c_m of log((x/2)/sinh(x/2)) = sum c_m x^(2m)."""
    # sinh(y)/y = sum y^(2k)/(2k+1)!; work in t = y^2
    g = {k: Fraction(1, _fact(2 * k + 1)) for k in range(max_weight + 1)}
    # log(1 + u) with u = g - 1, truncated in t-weight
    u = {k: v for k, v in g.items() if k > 0}
    log_g: dict = {}
    power = dict(u)
    sign = 1
    for m in range(1, max_weight + 1):
        for k, v in power.items():
            if k <= max_weight:
                log_g[k] = log_g.get(k, Fraction(0)) + sign * v / m
        nxt: dict = {}
        for k1, v1 in power.items():
            for k2, v2 in u.items():
                if k1 + k2 <= max_weight:
                    nxt[k1 + k2] = nxt.get(k1 + k2, Fraction(0)) + v1 * v2
        power = nxt
        sign = -sign
    # substitute t = x^2/4 and negate: weight m picks up 4^(-m)
    return {m: -v / 4 ** m for m, v in log_g.items() if m > 0}


def _power_to_elementary(m: int, max_weight: int) -> dict:
    """Power sum s_m as a polynomial in elementary symmetrics, Newton's
    recursion; keys are sorted index tuples."""
    table = {0: {(): Fraction(1)}}
    for k in range(1, max_weight + 1):
        out: dict = {}

        def acc(mono, q):
            if q:
                out[mono] = out.get(mono, Fraction(0)) + q

        for i in range(1, k):
            for mono, q in table[k - i].items():
                acc(tuple(sorted(mono + (i,))), q * (-1) ** (i - 1))
        acc((k,), Fraction(k) * (-1) ** (k - 1))
        table[k] = out
    return table[m]


def _poly_mul(a: dict, b: dict, max_weight: int) -> dict:
    out: dict = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            mono = tuple(sorted(ka + kb))
            if sum(mono) > max_weight:
                continue
            out[mono] = out.get(mono, Fraction(0)) + va * vb
    return {k: v for k, v in out.items() if v}


def a_hat_series(max_weight: int) -> dict:
    """Multiplicative genus of (x/2)/sinh(x/2) expanded in the
    elementary symmetric functions of the squared roots; keys are sorted
    index tuples, so () is the constant 1, (1,) the first class, (1, 1)
    its square, and so on, graded by the index sum."""
    logs = _series_log_factor(max_weight)
    # exponent written in power sums, then pushed to elementary basis
    log_poly: dict = {}
    for m, c in logs.items():
        for mono, q in _power_to_elementary(m, max_weight).items():
            log_poly[mono] = log_poly.get(mono, Fraction(0)) + c * q
    out = {(): Fraction(1)}
    term = {(): Fraction(1)}
    for k in range(1, max_weight + 1):
        term = _poly_mul(term, log_poly, max_weight)
        term = {mo: v / k for mo, v in term.items()}
        if not term:
            break
        for mo, v in term.items():
            out[mo] = out.get(mo, Fraction(0)) + v
    return {mo: v for mo, v in out.items() if v}


# -- equivariant class data from the jet model -----------------------------

def gelfand_fuks_equivariant(action: TranslationAction, h_trunc: int = 8,
                             order: int | None = None) -> EquivariantClassCocycle:
    """Class data of a translation action recomputed at the jet level:
    the (0, 2) part evaluates the lifting-defect cochain on horizontal
    lifts, and for twisted actions the (1, 1) part reads the logarithmic
    derivative of the twist wave under the flat connection, fiber
    computations all the way."""
    dim = action.dim
    if order is None:
        order = 2 * h_trunc + 2
    conn = InvariantConnection(dim, order)
    comps: dict = {(0, 2): {(): gf_form(theta_hat_cochain(), conn, h_trunc)}}
    if action.twist is not None:
        w = action.twist
        wave = WeylSection.fiber_wave(dim, w, order)
        inverse = WeylSection.fiber_wave(dim, tuple(-c for c in w), order)
        grads = wave.nabla()
        parts: dict = {}
        one = TorusElement.one(dim, h_trunc)
        for j in range(2 * dim):
            log_d = inverse.star(grads[j])
            central = log_d.component((0,) * (2 * dim))
            rest = log_d - WeylSection.from_base(central, log_d.order)
            if not rest.is_zero():
                raise ArithmeticError(
                    "twist-wave logarithmic derivative is not central")
            series = central.coefficient((0,) * (2 * dim))
            if series.is_zero():
                continue
            parts[(j,)] = one * series
        if parts:
            comps[(1, 1)] = {(1,): TorusForm(dim, parts)}
    return EquivariantClassCocycle(action, comps)


# -- trace-side pairings ---------------------------------------------------

TRACE = "trace"


def tau_t_pair(chain: CyclicChain) -> ULaurent:
    """Evaluate the symbol-and-integrate functional on a torus chain:
    each word contributes its normalized derivative form integrated over
    the surface, weighted by u^(-dim); only words whose form reaches the
    top degree survive the integral."""
    assert chain.ctx.kind == "torus"
    dim = chain.ctx.dim
    res = None
    for key, v in chain.coeffs.items():
        total = word_to_form(dim, key, chain.ctx.h_trunc).integrate()
        if total.is_zero():
            continue
        term = (v * total).shift_u(-dim)
        res = term if res is None else res + term
    if res is None:
        res = ULaurent.zero(chain.ctx.u_trunc)
    return res


def i_xi(lam, xi: GroupCochain, chain: CyclicChain,
         mismatches=None) -> ULaurent:
    """Pair a group cochain and an inner functional against a crossed
    chain through the decomposition into group-decorated inner words.

    With lam = TRACE the inner functional is the plain trace evaluated
    on single-letter words; class data delegates to the transposed
    integral pairing.
    """
    if isinstance(lam, EquivariantClassCocycle):
        return phi_pair(lam, xi, chain, mismatches)
    if lam != TRACE:
        raise TypeError("lam must be TRACE or class data")
    assert chain.ctx.kind == "crossed"
    k = xi.degree
    dim = chain.ctx.dim
    h = chain.ctx.h_trunc
    dec = d_map(chain)
    res = None
    for (ik, gw), v in dec.coeffs.items():
        if len(gw) != k or len(ik) != 1:
            continue
        val = xi.evaluate(gw)
        if val.is_zero():
            continue
        tr = TorusElement.plane_wave(dim, ik[0], h).trace()
        term = v * (tr * val)
        res = term if res is None else res + term
    if res is None:
        res = ULaurent.zero(chain.ctx.u_trunc)
    return res
