import random
from fractions import Fraction

import pytest

from starchain.groups import CyclicGroup
from starchain.scalars import FieldElement, HbarLaurent
from starchain.torus import (
    CrossedElement,
    TorusElement,
    TorusForm,
    TranslationAction,
    WeylSection,
    jet,
    omega_pairing,
    symplectic_form,
)


I = FieldElement.i_unit()


def rand_torus(rng, dim=1, trunc=5, terms=3, span=2):
    out = TorusElement.zero(dim)
    for _ in range(terms):
        m = tuple(rng.randint(-span, span) for _ in range(2 * dim))
        c = HbarLaurent.from_rational(
            Fraction(rng.randint(-4, 4), rng.randint(1, 3)), trunc,
            rng.randint(0, 1))
        out = out + TorusElement.plane_wave(dim, m, trunc, c)
    return out


def test_pairing_orientation():
    # first d slots are x-modes, last d are xi-modes
    assert omega_pairing((1, 0), (0, 1)) == -1
    assert omega_pairing((0, 1), (1, 0)) == 1
    assert omega_pairing((1, 0, 0, 0), (0, 0, 1, 0)) == -1
    assert omega_pairing((2, 3), (2, 3)) == 0


def test_wave_product_phase_frozen():
    em = TorusElement.plane_wave(1, (1, 0), 4)
    en = TorusElement.plane_wave(1, (0, 1), 4)
    c = em.star(en).coefficient((1, 1))
    # exp(2 pi^2 i hbar): linear coefficient is 2 pi^2 i
    assert c.coefficient(0) == FieldElement.rational(1)
    assert c.coefficient(1) == FieldElement.pi_power(2, 2) * I
    assert c.coefficient(2) == FieldElement.pi_power(4, -2)
    d = en.star(em).coefficient((1, 1))
    assert d.coefficient(1) == FieldElement.pi_power(2, -2) * I


def test_star_agrees_with_fiber_quantization():
    # jets multiply through the fiberwise Weyl-Moyal product, an independent
    # code path; the plane-wave phase formula must match it
    rng = random.Random(1234)
    for _ in range(8):
        a = rand_torus(rng, 1, trunc=2, terms=2)
        b = rand_torus(rng, 1, trunc=2, terms=2)
        assert jet(a, 5).star(jet(b, 5)) == jet(a.star(b), 5)


def test_star_associative_and_unital():
    rng = random.Random(911)
    one = TorusElement.one(1, 5)
    for _ in range(12):
        a, b, c = (rand_torus(rng) for _ in range(3))
        assert a.star(b).star(c) == a.star(b.star(c))
        assert one.star(a) == a and a.star(one) == a
    for _ in range(4):
        a, b, c = (rand_torus(rng, dim=2, trunc=3, terms=2, span=1)
                   for _ in range(3))
        assert a.star(b).star(c) == a.star(b.star(c))


def test_symbol_mul_is_commutative_shadow():
    rng = random.Random(13)
    for _ in range(10):
        a, b = rand_torus(rng), rand_torus(rng)
        s = a.symbol_mul(b)
        assert s == b.symbol_mul(a)
        diff = a.star(b) - s
        assert all(c.low >= 1 for c in diff.coeffs.values())


def test_trace_normalization_and_axioms():
    for d in (1, 2):
        one = TorusElement.one(d, 6)
        t = one.trace()
        # 1/(i hbar)^d
        assert t == HbarLaurent.from_field((I * (-1)) ** d, 6 - d, -d)
    rng = random.Random(515)
    for _ in range(15):
        a, b = rand_torus(rng), rand_torus(rng)
        assert a.star(b).trace() == b.star(a).trace()
    wave = TorusElement.plane_wave(1, (2, -1), 5)
    assert wave.trace().is_zero()


def test_trace_matches_symplectic_volume_integral():
    rng = random.Random(88)
    for _ in range(8):
        a = rand_torus(rng, 1, trunc=5)
        vol = symplectic_form(1, 5)
        lhs = a.trace()
        rhs = (TorusForm.from_function(a).wedge(vol)).integrate() \
            * HbarLaurent.from_field(I * (-1), 5, -1)
        assert lhs == rhs


def test_star_inverse_roundtrip():
    rng = random.Random(2718)
    for _ in range(10):
        m = tuple(rng.randint(-2, 2) for _ in range(2))
        lead = TorusElement.plane_wave(
            1, m, 6, HbarLaurent.from_field(
                FieldElement.zeta(4, rng.randrange(4)) * rng.randint(1, 3),
                6, rng.randint(0, 1)))
        u = lead
        for _ in range(rng.randint(0, 2)):
            n = tuple(rng.randint(-2, 2) for _ in range(2))
            u = u + TorusElement.plane_wave(
                1, n, 6, HbarLaurent.from_rational(rng.randint(-2, 2), 6,
                                                   rng.randint(2, 3)))
        ui = u.star_inverse()
        w = ui.global_window()
        one = TorusElement.one(1, w)
        assert u.star(ui) == one
        assert ui.star(u) == one


def test_star_inverse_rejects_non_monomial_lead():
    u = TorusElement.plane_wave(1, (1, 0), 4) + TorusElement.plane_wave(1, (0, 1), 4)
    with pytest.raises(ValueError):
        u.star_inverse()
    with pytest.raises(ValueError):
        TorusElement.zero(1).star_inverse()


# ---------------------------------------------------------------------------
# group action


def test_translation_phases():
    act = TranslationAction(1, CyclicGroup(None), (Fraction(1, 4), 0))
    em = TorusElement.plane_wave(1, (1, 0), 4)
    for g in range(-4, 5):
        ph = act.apply(g, em).coefficient((1, 0)).coefficient(0)
        assert ph == I ** g
    # mode orthogonal to the translation is fixed
    en = TorusElement.plane_wave(1, (0, 3), 4)
    assert act.apply(1, en) == en


def test_action_is_group_homomorphism():
    rng = random.Random(31)
    act = TranslationAction(1, CyclicGroup(None), (Fraction(1, 3), Fraction(1, 2)))
    for _ in range(10):
        a = rand_torus(rng)
        g, h = rng.randint(-3, 3), rng.randint(-3, 3)
        assert act.apply(g, act.apply(h, a)) == act.apply(g + h, a)
        b = rand_torus(rng)
        assert act.apply(g, a.star(b)) == act.apply(g, a).star(act.apply(g, b))
        assert act.apply(g, a).trace() == a.trace()


def test_finite_action_torsion():
    grp = CyclicGroup(4)
    act = TranslationAction(1, grp, (Fraction(3, 4), Fraction(1, 2)))
    rng = random.Random(7)
    a = rand_torus(rng)
    assert act.apply(4, a) == a
    assert act.apply(5, a) == act.apply(1, a)
    with pytest.raises(ValueError):
        TranslationAction(1, grp, (Fraction(1, 8), 0))


def test_twist_phase_frozen():
    act = TranslationAction(1, CyclicGroup(None), (0, 0), twist=(1, 0))
    en = TorusElement.plane_wave(1, (0, 1), 4)
    c = act.apply(1, en).coefficient((0, 1))
    # <w, n> = w_xi n_x - w_x n_xi = -1; phase exp(-4 pi^2 i hbar <w,n>)
    assert c.coefficient(0) == FieldElement.rational(1)
    assert c.coefficient(1) == FieldElement.pi_power(2, 4) * I
    ex = TorusElement.plane_wave(1, (1, 0), 4)
    assert act.apply(1, ex) == ex  # <(1,0),(1,0)> = 0


def test_twisted_action_properties():
    rng = random.Random(414)
    act = TranslationAction(1, CyclicGroup(None), (Fraction(1, 2), 0),
                            twist=(1, 1))
    for _ in range(8):
        a, b = rand_torus(rng), rand_torus(rng)
        g = rng.randint(-2, 2)
        assert act.apply(g, a.star(b)) == act.apply(g, a).star(act.apply(g, b))
        assert act.apply(-g, act.apply(g, a)) == a
        assert act.apply(g, a).trace() == a.trace()
    with pytest.raises(ValueError):
        TranslationAction(1, CyclicGroup(4), (0, 0), twist=(1, 0))


def test_crossed_product_algebra():
    rng = random.Random(101)
    act = TranslationAction(1, CyclicGroup(None), (Fraction(1, 3), 0),
                            twist=(0, 1))

    def rand_crossed():
        out = CrossedElement(act, {})
        for _ in range(2):
            out = out + CrossedElement.pure(act, rng.randint(-1, 1),
                                            rand_torus(rng))
        return out

    for _ in range(8):
        A, B, C = rand_crossed(), rand_crossed(), rand_crossed()
        assert A.star(B).star(C) == A.star(B.star(C))
        one = CrossedElement.one(act, 5)
        assert one.star(A) == A and A.star(one) == A
        assert A.star(B).trace() == B.star(A).trace()
    # covariance relation
    b = rand_torus(rng)
    ug = CrossedElement.pure(act, 1, TorusElement.one(1, 5))
    ugi = CrossedElement.pure(act, -1, TorusElement.one(1, 5))
    lhs = ug.star(CrossedElement.pure(act, 0, b)).star(ugi)
    assert lhs == CrossedElement.pure(act, 0, act.apply(1, b))


# ---------------------------------------------------------------------------
# forms


def test_de_rham_complex():
    rng = random.Random(21)
    for _ in range(8):
        f = rand_torus(rng)
        F = TorusForm.from_function(f)
        assert F.d().d().is_zero()
        g = rand_torus(rng)
        G = TorusForm.basis_form(1, (0,), g)
        assert G.d().d().is_zero()
        # graded Leibniz in degree (0,1)
        assert (F.wedge(G)).d() == F.d().wedge(G) + F.wedge(G.d())


def test_wedge_antisymmetry():
    rng = random.Random(66)
    a = TorusForm.basis_form(1, (0,), rand_torus(rng))
    b = TorusForm.basis_form(1, (1,), rand_torus(rng))
    assert a.wedge(b) == -(b.wedge(a))
    assert a.wedge(a).is_zero()


def test_volume_normalization():
    for d in (1, 2):
        om = symplectic_form(d, 4)
        vol = TorusForm.from_function(TorusElement.one(d, 4))
        for _ in range(d):
            vol = vol.wedge(om)
        fact = 1
        for t in range(2, d + 1):
            fact *= t
        assert (vol * Fraction(1, fact)).integrate() == HbarLaurent.one(4)


def test_integral_kills_nonzero_modes_and_exact_forms():
    f = TorusElement.plane_wave(1, (1, 2), 4)
    top = TorusForm.basis_form(1, (0, 1), f)
    assert top.integrate().is_zero()
    g = TorusForm.basis_form(1, (1,), TorusElement.plane_wave(1, (3, 1), 4))
    assert g.d().integrate().is_zero()


# ---------------------------------------------------------------------------
# jets


def test_jet_is_star_homomorphism():
    rng = random.Random(2020)
    for _ in range(6):
        a = rand_torus(rng, trunc=2, terms=2)
        b = rand_torus(rng, trunc=2, terms=2)
        assert jet(a, 5).star(jet(b, 5)) == jet(a, 5).star(jet(b, 5))
        assert jet(a.star(b), 5) == jet(a, 5).star(jet(b, 5))
        assert jet(a, 5) + jet(b, 5) == jet(a + b, 5)


def test_jet_is_flat():
    rng = random.Random(4)
    for _ in range(5):
        a = rand_torus(rng, trunc=2, terms=2)
        for comp in jet(a, 5).nabla():
            assert comp.is_zero()


def test_fiber_wave_connection_defect():
    # the base-constant fiber wave of w has u^-1 nabla u = -2 pi i w_j in
    # direction j, the constant curvature source for twisted classes
    w = (2, -1)
    order = 5
    u = WeylSection.fiber_wave(1, w, order)
    uinv = WeylSection.fiber_wave(1, tuple(-c for c in w), order)
    assert u.star(uinv) == WeylSection.from_base(TorusElement.one(1, order // 2), order)
    for j, comp in enumerate(u.nabla()):
        val = uinv.star(comp)
        expected = WeylSection.from_base(
            TorusElement.one(1, (order - 1) // 2)
            * (FieldElement.pi_power(1, -2 * w[j]) * I), order - 1)
        assert val == expected


def test_fiber_wave_conjugation_matches_twist_phase():
    # conjugating a jet by the fiber wave reproduces exactly the twist phase
    # used by TranslationAction
    order = 6
    wvec = (1, 0)
    u = WeylSection.fiber_wave(1, wvec, order)
    uinv = WeylSection.fiber_wave(1, (-1, 0), order)
    act = TranslationAction(1, CyclicGroup(None), (0, 0), twist=wvec)
    rng = random.Random(3030)
    for _ in range(5):
        a = rand_torus(rng, trunc=2, terms=2)
        conj = u.star(jet(a, order)).star(uinv)
        assert conj == jet(act.apply(1, a), order)
