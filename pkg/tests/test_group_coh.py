import random
from fractions import Fraction

import pytest

from starchain.cyclic import ChainContext, CyclicChain, chern_character
from starchain.group_coh import (EquivariantClassCocycle, GroupCochain, cap,
                                 equivariant_ahat, equivariant_theta,
                                 form_pullback, phi_pair, tr_xi, trace_pair,
                                 word_to_form)
from starchain.cyclic import d_map
from starchain.groups import CyclicGroup
from starchain.scalars import FieldElement, HbarLaurent, ULaurent
from starchain.torus import (CrossedElement, TorusElement, TorusForm,
                             TranslationAction, symplectic_form)

H = 5
U = 2
Z = CyclicGroup()
Z4 = CyclicGroup(4)
ACT = TranslationAction(1, Z, (Fraction(1, 3), Fraction(1, 5)))
TW_ACT = TranslationAction(1, Z, (Fraction(1, 3), Fraction(1, 5)), (1, 2))
FIN_ACT = TranslationAction(1, Z4, (Fraction(1, 4), Fraction(1, 2)))


def inv_i_hbar(trunc=H):
    return HbarLaurent.from_field(FieldElement.i_unit() * (-1), trunc,
                                  power=-1)


def u_scalar(h, u_trunc=U, power=0):
    return ULaurent.from_hbar(h, u_trunc, power)


def rand_scalar(rng, u_trunc=U):
    num = rng.randint(-4, 4) or 1
    h = HbarLaurent.from_rational(Fraction(num, rng.choice([1, 2, 3])), H)
    return ULaurent.from_hbar(h, u_trunc, rng.randint(-1, 1))


def rand_crossed_key(rng, n, span=2):
    out = []
    for _ in range(n + 1):
        m = (rng.randint(-span, span), rng.randint(-span, span))
        out.append((m, rng.randint(-span, span)))
    return tuple(out)


def rand_crossed_chain(rng, ctx, deg, terms=3):
    coeffs = {}
    for _ in range(terms):
        coeffs[rand_crossed_key(rng, deg)] = rand_scalar(rng, ctx.u_trunc)
    return CyclicChain(ctx, coeffs)


def crossed_wave(act, m, g=0, trunc=H):
    return CrossedElement(act, {g: TorusElement.plane_wave(act.dim, m, trunc)})


def conjugated_idempotent(one, a, b):
    """V diag(1,0) V^(-1) for V = [[1,a],[0,1]] [[1,0],[b,1]]."""
    ab = a.star(b)
    return [[one + ab, -a - ab.star(a)], [b, -b.star(a)]]


# -- cochain basics --------------------------------------------------------

def test_polynomial_evaluation():
    xi = GroupCochain.polynomial(Z, 1, {(1,): 1})
    assert xi(5) == FieldElement.rational(5)
    assert xi(-2) == FieldElement.rational(-2)
    xi2 = GroupCochain.polynomial(Z, 2, {(1, 1): 1})
    assert xi2(3, -4) == FieldElement.rational(-12)
    c = GroupCochain.constant(Z, Fraction(2, 7))
    assert c() == FieldElement.rational(Fraction(2, 7))


def test_coboundary_values():
    eta = GroupCochain.polynomial(Z, 1, {(2,): 1})
    d_eta = eta.coboundary()
    # n^2 - (m+n)^2 + m^2 = -2mn
    for m, n in [(2, 3), (-1, 4), (0, 5)]:
        assert d_eta(m, n) == FieldElement.rational(-2 * m * n)
    c = GroupCochain.constant(Z, 3)
    assert c.coboundary()(7).is_zero()


def test_cocycle_detection():
    assert GroupCochain.polynomial(Z, 1, {(1,): 1}).is_cocycle()
    assert GroupCochain.polynomial(Z, 2, {(1, 1): 1}).is_cocycle()
    eta = GroupCochain.polynomial(Z, 1, {(2,): Fraction(1, 2)})
    wit = eta.cocycle_witness()
    assert wit is not None
    args, val = wit
    assert eta.coboundary().evaluate(args) == val
    assert not val.is_zero()


def test_coboundary_squares_to_zero():
    rng = random.Random(11)
    for _ in range(5):
        xi = GroupCochain.polynomial(
            Z, 1, {(e,): rng.randint(-3, 3) for e in (1, 2)})
        assert xi.coboundary().is_cocycle(span=4)


def test_finite_tables():
    # the carrying cocycle generating the degree-2 cohomology over Z
    carry = GroupCochain.table(
        Z4, 2, {(a, b): (a + b) // 4 for a in range(4) for b in range(4)})
    assert carry.is_cocycle()
    vals = {(a,): Fraction(a * (a - 2), 3) for a in range(4)}
    eta = GroupCochain.table(Z4, 1, vals)
    assert eta.coboundary().is_cocycle()
    assert eta.evaluate((5,)) == eta.evaluate((1,))


def test_kind_restrictions():
    with pytest.raises(ValueError):
        GroupCochain.polynomial(Z4, 1, {(1,): 1})
    with pytest.raises(ValueError):
        GroupCochain.table(Z, 1, {(0,): 1})


def test_normalized_flag():
    assert GroupCochain.polynomial(Z, 1, {(1,): 1}).normalized
    assert not GroupCochain.polynomial(Z, 1, {(0,): 1}).normalized
    xi = GroupCochain.polynomial(Z, 2, {(1, 1): 1})
    assert xi.normalized and xi.coboundary().normalized


# -- form-valued cochains and class data -----------------------------------

def test_form_pullback_phases():
    f = TorusForm.from_function(TorusElement.plane_wave(1, (1, 1), H))
    g = form_pullback(ACT, 2, f)
    phase = ACT.translation_phase(2, (1, 1))
    assert g.component(()).coefficient((1, 1)) == \
        HbarLaurent.from_field(phase, H)
    # translations are rigid, so pullback commutes with d
    assert form_pullback(ACT, 3, f.d()) == form_pullback(ACT, 3, f).d()


def test_theta_is_total_cocycle():
    assert equivariant_theta(ACT, H).total_cocycle_witness() is None
    assert equivariant_theta(TW_ACT, H).total_cocycle_witness() is None
    assert equivariant_theta(FIN_ACT, H).total_cocycle_witness() is None


def test_theta_components():
    th = equivariant_theta(ACT, H)
    assert th.bidegrees() == [(0, 2)]
    assert th.evaluate(0, 2, ()) == symplectic_form(1, H) * inv_i_hbar()
    tw = equivariant_theta(TW_ACT, H)
    assert tw.bidegrees() == [(0, 2), (1, 1)]
    lin = tw.evaluate(1, 1, (1,))
    # one leg per nonzero twist slot, coefficient -2 pi i w_j
    for j, wj in enumerate(TW_ACT.twist):
        c = lin.component((j,)).coefficient((0, 0))
        want = FieldElement.pi_power(1, -2 * wj) * FieldElement.i_unit()
        assert c == HbarLaurent.from_field(want, H)
    assert tw.evaluate(1, 1, (3,)) == lin * 3


def test_class_exponential():
    e1 = equivariant_theta(ACT, H).exponential()
    assert e1.bidegrees() == [(0, 0), (0, 2)]
    assert e1.evaluate(0, 2, ()) == symplectic_form(1, H) * inv_i_hbar()
    act2 = TranslationAction(2, Z, (0, 0, 0, 0))
    th2 = equivariant_theta(act2, H)
    e2 = th2.exponential()
    w = symplectic_form(2, H) * inv_i_hbar(H)
    assert e2.evaluate(0, 4, ()) == w.wedge(w) * Fraction(1, 2)
    assert e2.evaluate(0, 4, ()).integrate() == \
        HbarLaurent.from_field(FieldElement.rational(-1), H).shift(-2)


def test_cup_associative():
    th = equivariant_theta(TW_ACT, H)
    ah = equivariant_ahat(TW_ACT, H)
    left = th.cup(ah).cup(th)
    right = th.cup(ah.cup(th))
    for pq in set(left.bidegrees()) | set(right.bidegrees()):
        for args in [(1,) * pq[0], (2,) * pq[0]]:
            assert left.evaluate(*pq, args) == right.evaluate(*pq, args)


# -- cap and the twisted traces --------------------------------------------

def test_cap_drops_leading_legs():
    from starchain.cyclic import EquivariantChain
    inner = ChainContext.torus(1, h_trunc=H, u_trunc=U)
    one = u_scalar(HbarLaurent.one(H))
    chain = EquivariantChain(inner, ACT, False, {
        (((0, 0), (1, 0)), (2, 3, -1)): one,
        (((0, 0),), (5,)): one,
    })
    xi2 = GroupCochain.polynomial(Z, 2, {(1, 1): 1})
    misses = []
    capped = cap(chain, xi2, mismatches=misses)
    assert capped.coeffs == {
        (((0, 0), (1, 0)), (-1,)): one * FieldElement.rational(6)}
    assert misses == [(((((0, 0),), (5,))), "group degree below cochain")]


def test_trace_functional_rejects_noncocycles():
    eta = GroupCochain.polynomial(Z, 1, {(2,): 1})
    with pytest.raises(ValueError, match="not closed"):
        tr_xi(eta, ACT)


def test_trace_of_unit():
    ctx = ChainContext.crossed(ACT, h_trunc=H, u_trunc=U)
    c = CyclicChain.word(ctx, (((0, 0), 0),))
    want = u_scalar(inv_i_hbar())
    assert tr_xi(GroupCochain.constant(Z, 1), ACT).pair(c) == want
    assert trace_pair(c) == want
    tctx = ChainContext.torus(1, h_trunc=H, u_trunc=U)
    assert trace_pair(CyclicChain.word(tctx, ((0, 0),))) == want


def test_trace_word_fixture():
    """A two-letter word with labels g, -g pairs to xi(-g) times the
    trace of a0 * (g acting on a1)."""
    ctx = ChainContext.crossed(ACT, h_trunc=H, u_trunc=U)
    key = (((1, 1), 1), ((-1, -1), -1))
    c = CyclicChain.word(ctx, key)
    xi = GroupCochain.polynomial(Z, 1, {(1,): 1})
    t = TorusElement.plane_wave(1, (1, 1), H).star(
        ACT.apply(1, TorusElement.plane_wave(1, (-1, -1), H)))
    want = u_scalar(t.trace() * FieldElement.rational(-1))
    assert tr_xi(xi, ACT).pair(c) == want


def test_trace_skips_offdegree_and_nonidentity():
    ctx = ChainContext.crossed(ACT, h_trunc=H, u_trunc=U)
    T = tr_xi(GroupCochain.polynomial(Z, 1, {(1,): 1}), ACT)
    assert T.pair(CyclicChain.word(ctx, (((0, 0), 0),))).is_zero()
    assert T.pair(CyclicChain.word(
        ctx, (((0, 0), 1), ((0, 0), 2)))).is_zero()


def test_traces_kill_mixed_boundaries():
    rng = random.Random(501)
    ctx = ChainContext.crossed(ACT, h_trunc=H, u_trunc=U)
    fin_ctx = ChainContext.crossed(FIN_ACT, h_trunc=H, u_trunc=U)
    carry = GroupCochain.table(
        Z4, 2, {(a, b): (a + b) // 4 for a in range(4) for b in range(4)})
    pairs = [
        (tr_xi(GroupCochain.polynomial(Z, 1, {(1,): 1}), ACT), ctx),
        (tr_xi(GroupCochain.polynomial(Z, 2, {(1, 1): 1}), ACT), ctx),
        (tr_xi(carry, FIN_ACT), fin_ctx),
    ]
    for T, cx in pairs:
        for _ in range(12):
            x = rand_crossed_chain(rng, cx, rng.choice([0, 1, 2]))
            assert T.pair(x.mixed_boundary()).is_zero()


def test_trace_pairing_conjugation_invariant():
    one = CrossedElement.one(ACT, H)
    E = conjugated_idempotent(one, crossed_wave(ACT, (1, 0), 1),
                              crossed_wave(ACT, (0, 1), -1))
    ch = chern_character(E, 1)
    c = crossed_wave(ACT, (1, 1), 2)
    E2 = [[E[0][0] + c.star(E[1][0]),
           E[0][1] - E[0][0].star(c) + c.star(E[1][1])
           - c.star(E[1][0]).star(c)],
          [E[1][0], E[1][1] - E[1][0].star(c)]]
    ch2 = chern_character(E2, 1)
    xi2 = GroupCochain.polynomial(Z, 2, {(1, 1): 1})
    T = tr_xi(xi2, ACT)
    assert T.pair(ch) == T.pair(ch2)
    T0 = tr_xi(GroupCochain.constant(Z, 1), ACT)
    assert T0.pair(ch) == T0.pair(ch2)
    assert T0.pair(ch) == u_scalar(inv_i_hbar(), 1)


# -- the transposed index pairing ------------------------------------------

def test_word_to_form_basics():
    f = word_to_form(1, ((0, 0), (1, 0), (0, 1)), H)
    dx_dxi = f.component((0, 1))
    assert not dx_dxi.is_zero()
    assert word_to_form(1, ((2, 1),), H).component(()) == \
        TorusElement.plane_wave(1, (2, 1), H)
    # three exterior derivatives exceed the surface dimension
    assert word_to_form(1, ((0, 0), (1, 0), (0, 1), (1, 1)), H).is_zero()


def test_phi_pair_unit():
    cls = equivariant_ahat(ACT, H).cup(equivariant_theta(ACT, H).exponential())
    xi0 = GroupCochain.constant(Z, 1)
    ctx = ChainContext.crossed(ACT, h_trunc=H, u_trunc=U)
    c = CyclicChain.word(ctx, (((0, 0), 0),))
    want = u_scalar(inv_i_hbar())
    assert phi_pair(cls, xi0, c) == want
    tctx = ChainContext.torus(1, h_trunc=H, u_trunc=U)
    assert phi_pair(cls, xi0, CyclicChain.word(tctx, ((0, 0),))) == want


def test_phi_pair_unit_surface_dim_two():
    act2 = TranslationAction(2, Z, (0,) * 4)
    cls = equivariant_ahat(act2, H).cup(
        equivariant_theta(act2, H).exponential())
    tctx = ChainContext.torus(2, h_trunc=H, u_trunc=U)
    c = CyclicChain.word(tctx, ((0, 0, 0, 0),))
    want = u_scalar(HbarLaurent.from_field(
        FieldElement.rational(-1), H).shift(-2))
    assert phi_pair(cls, GroupCochain.constant(Z, 1), c) == want
    assert trace_pair(c) == want


def test_phi_pair_flags_torus_mismatch():
    cls = equivariant_ahat(ACT, H)
    tctx = ChainContext.torus(1, h_trunc=H, u_trunc=U)
    c = CyclicChain.word(tctx, ((0, 0),))
    misses = []
    out = phi_pair(cls, GroupCochain.polynomial(Z, 1, {(1,): 1}), c,
                   mismatches=misses)
    assert out.is_zero() and misses


def test_index_pairing_torus_idempotent():
    """Both trace and integral pairings of the character of a conjugated
    plane-wave idempotent give the symplectic volume of the leaf."""
    one = TorusElement.one(1, H)
    em = TorusElement.plane_wave(1, (1, 0), H)
    en = TorusElement.plane_wave(1, (0, 1), H)
    ab = em.star(en)
    E = [[one + ab, -em - ab.star(em)], [en, -en.star(em)]]
    ch = chern_character(E, U)
    want = u_scalar(inv_i_hbar())
    assert trace_pair(ch) == want
    cls = equivariant_ahat(ACT, H).cup(equivariant_theta(ACT, H).exponential())
    assert phi_pair(cls, GroupCochain.constant(Z, 1), ch) == want


def test_index_pairing_crossed_degenerates():
    one = CrossedElement.one(ACT, H)
    E = conjugated_idempotent(one, crossed_wave(ACT, (1, 0), 1),
                              crossed_wave(ACT, (0, 1), -1))
    ch = chern_character(E, U)
    assert ch.mixed_boundary().is_zero()
    cls = equivariant_ahat(ACT, H).cup(equivariant_theta(ACT, H).exponential())
    xi0 = GroupCochain.constant(Z, 1)
    lhs = tr_xi(xi0, ACT).pair(ch)
    rhs = phi_pair(cls, xi0, ch)
    assert lhs == u_scalar(inv_i_hbar())
    assert rhs == lhs
    xi2 = GroupCochain.polynomial(Z, 2, {(1, 1): 1})
    assert phi_pair(cls, xi2, ch) == tr_xi(xi2, ACT).pair(ch)


def test_equivariant_pairing_constant_idempotent():
    one = CrossedElement.one(ACT, H)
    zero = CrossedElement(ACT, {})
    ch = chern_character([[one, zero], [zero, zero]], U)
    xi = GroupCochain.polynomial(Z, 1, {(1,): 1})
    cls = equivariant_ahat(ACT, H).cup(equivariant_theta(ACT, H).exponential())
    assert tr_xi(xi, ACT).pair(ch).is_zero()
    assert phi_pair(cls, xi, ch).is_zero()
