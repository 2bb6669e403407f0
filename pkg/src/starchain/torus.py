"""Quantized torus algebra, its differential forms, jets, and crossed products.

An element of the quantized 2d-torus is a finite sum of plane waves e_m,
m in Z^(2d), with hbar-Laurent coefficients; the first d slots of a mode are
the x-directions, the last d are the xi-directions.  The star product of
plane waves picks up the phase

    e_m * e_n = exp(c hbar <m, n>) e_(m+n),
    c = -2 pi^2 i,   <m, n> = m_xi . n_x - m_x . n_xi,

which is the plane-wave shadow of the Weyl-Moyal product for the symplectic
pairing fixed in weyl.py.  The phase is exact: pi stays formal, so exp(...)
is a polynomial in pi and hbar over the cyclotomic field within the window.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .groups import CyclicGroup
from .scalars import FieldElement, HbarLaurent, _as_field, hbar_exp
from .weyl import WeylElement


@lru_cache(maxsize=None)
def _unit_phase(num: int, den: int) -> FieldElement:
    """exp(2 pi i num/den) as an exact root of unity."""
    f = Fraction(num, den)
    return FieldElement.zeta(4 * f.denominator, 4 * f.numerator)


@lru_cache(maxsize=None)
def _star_phase(pairing: int, trunc: int) -> HbarLaurent:
    """exp(-2 pi^2 i hbar pairing), reliable through hbar^trunc."""
    if pairing == 0:
        return HbarLaurent.one(trunc)
    arg = HbarLaurent.from_field(
        FieldElement.pi_power(2, -2 * pairing) * FieldElement.i_unit(),
        trunc, power=1)
    return hbar_exp(arg)


def omega_pairing(m, n) -> int:
    """<m, n> = m_xi . n_x - m_x . n_xi for modes of equal even length."""
    d = len(m) // 2
    return sum(m[d + i] * n[i] - m[i] * n[d + i] for i in range(d))


class TorusElement:
    """Sparse combination of plane waves with hbar-Laurent coefficients."""

    __slots__ = ("dim", "coeffs")

    def __init__(self, dim: int, coeffs: dict[tuple[int, ...], HbarLaurent]):
        self.dim = dim
        self.coeffs = {m: c for m, c in coeffs.items() if not c.is_zero()}

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, dim: int) -> "TorusElement":
        return cls(dim, {})

    @classmethod
    def plane_wave(cls, dim: int, mode, trunc: int, coeff=1) -> "TorusElement":
        mode = tuple(mode)
        assert len(mode) == 2 * dim
        if isinstance(coeff, HbarLaurent):
            c = coeff.truncate(trunc)
        else:
            fe = coeff if isinstance(coeff, FieldElement) else _as_field(coeff, 4)
            c = HbarLaurent.from_field(fe, trunc)
        return cls(dim, {mode: c})

    @classmethod
    def one(cls, dim: int, trunc: int) -> "TorusElement":
        return cls.plane_wave(dim, (0,) * (2 * dim), trunc)

    # -- queries -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, mode) -> HbarLaurent:
        c = self.coeffs.get(tuple(mode))
        if c is not None:
            return c
        return HbarLaurent.zero(self.min_trunc())

    def min_trunc(self) -> int:
        if not self.coeffs:
            return 0
        return min(c.trunc for c in self.coeffs.values())

    def modes(self):
        return sorted(self.coeffs)

    # -- linear structure --------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, TorusElement):
            return NotImplemented
        assert other.dim == self.dim
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            cur = out.get(m)
            out[m] = c if cur is None else cur + c
        return TorusElement(self.dim, out)

    def __neg__(self):
        return TorusElement(self.dim, {m: -c for m, c in self.coeffs.items()})

    def __sub__(self, other):
        if not isinstance(other, TorusElement):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, FieldElement, HbarLaurent)):
            return TorusElement(self.dim,
                                {m: c * other for m, c in self.coeffs.items()})
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, FieldElement)):
            return TorusElement(self.dim,
                                {m: c / other for m, c in self.coeffs.items()})
        return NotImplemented

    # -- products ----------------------------------------------------------

    def star(self, other: "TorusElement") -> "TorusElement":
        assert isinstance(other, TorusElement) and other.dim == self.dim
        out: dict = {}
        for m, cm in self.coeffs.items():
            for n, cn in other.coeffs.items():
                c = cm * cn
                p = omega_pairing(m, n)
                if p:
                    c = c * _star_phase(p, c.trunc)
                key = tuple(a + b for a, b in zip(m, n))
                cur = out.get(key)
                out[key] = c if cur is None else cur + c
        return TorusElement(self.dim, out)

    def symbol_mul(self, other: "TorusElement") -> "TorusElement":
        """Commutative product of the underlying functions (no star phase)."""
        assert isinstance(other, TorusElement) and other.dim == self.dim
        out: dict = {}
        for m, cm in self.coeffs.items():
            for n, cn in other.coeffs.items():
                key = tuple(a + b for a, b in zip(m, n))
                c = cm * cn
                cur = out.get(key)
                out[key] = c if cur is None else cur + c
        return TorusElement(self.dim, out)

    def partial(self, j: int) -> "TorusElement":
        """Derivative along coordinate j (0..2d-1); e_m goes to 2 pi i m_j e_m."""
        out = {}
        for m, c in self.coeffs.items():
            if m[j]:
                out[m] = c * (FieldElement.pi_power(1, 2 * m[j])
                              * FieldElement.i_unit())
        return TorusElement(self.dim, out)

    def cap(self, trunc: int) -> "TorusElement":
        """Truncate every coefficient window to at most trunc."""
        return TorusElement(self.dim, {m: c.truncate(trunc)
                                       for m, c in self.coeffs.items()})

    def star_inverse(self) -> "TorusElement":
        """Inverse for elements whose lowest hbar order sits on a single
        plane wave with an invertible monomial coefficient; the rest is
        summed as a geometric series inside one fixed window.
        """
        if self.is_zero():
            raise ValueError("cannot invert zero")
        low = min(c.low for c in self.coeffs.values())
        leads = [m for m, c in self.coeffs.items() if c.low == low]
        if len(leads) != 1:
            raise ValueError("leading part is not a single plane wave")
        m = leads[0]
        c = self.coeffs[m]
        c0 = c.coeffs[low]
        window = c.trunc - low
        neg = tuple(-a for a in m)
        guess = TorusElement.plane_wave(
            self.dim, neg, window,
            HbarLaurent.from_field(c0.inv_monomial(), window, -low))
        rem = (guess.star(self) - TorusElement.one(self.dim, window)).cap(window)
        # every mode of rem has positive hbar valuation, so the series stops
        acc = TorusElement.one(self.dim, window)
        term = acc
        rounds = 0
        while not term.is_zero():
            term = term.star(-rem).cap(window)
            acc = acc + term
            rounds += 1
            assert rounds <= window + 2
        return acc.star(guess).cap(window)

    def trace(self) -> HbarLaurent:
        """Normalized trace: (1/(i hbar))^d times the zero-mode coefficient.

        Sends 1 to 1/(i hbar)^d, kills every nonzero mode, and is exact on
        the window shifted down by d.
        """
        z = (0,) * (2 * self.dim)
        c = self.coeffs.get(z)
        if c is None:
            c = HbarLaurent.zero(self.min_trunc())
        scale = (FieldElement.i_unit() * (-1)) ** self.dim
        return (c * scale).shift(-self.dim)

    def global_window(self):
        """Smallest coefficient window, or None when there are no terms;
        a mode absent from the element counts as zero through this window."""
        return min((c.trunc for c in self.coeffs.values()), default=None)

    def __eq__(self, other):
        if not isinstance(other, TorusElement):
            return NotImplemented
        wa, wb = self.global_window(), other.global_window()
        keys = set(self.coeffs) | set(other.coeffs)
        for k in keys:
            a = self.coeffs.get(k)
            b = other.coeffs.get(k)
            if a is None:
                if not (b if wa is None else b.truncate(wa)).is_zero():
                    return False
            elif b is None:
                if not (a if wb is None else a.truncate(wb)).is_zero():
                    return False
            elif a != b:
                return False
        return True

    def __hash__(self):
        raise TypeError("TorusElement is unhashable (window-relative equality)")

    def __repr__(self):
        return f"TorusElement<{len(self.coeffs)} waves, dim={self.dim}>"


class TranslationAction:
    """Action of a cyclic group on the quantized torus by a rational
    translation, optionally twisted by conjugation with a fiber plane wave.

    The generator translates by `vector` (2d rationals); mode m picks up the
    phase exp(2 pi i g (m . vector)) under the g-th power.  A twist vector
    w in Z^(2d) composes this with conjugation by the fiber wave attached to
    w, which multiplies mode m by exp(-4 pi^2 i hbar g <w, m>).
    """

    __slots__ = ("dim", "group", "vector", "twist")

    def __init__(self, dim: int, group: CyclicGroup, vector,
                 twist=None):
        vector = tuple(Fraction(v) for v in vector)
        assert len(vector) == 2 * dim
        if group.order is not None:
            for v in vector:
                if (v * group.order).denominator != 1:
                    raise ValueError(
                        "translation vector is not %d-torsion" % group.order)
        if twist is not None:
            if group.order is not None:
                raise ValueError("twists are only supported over the infinite "
                                 "cyclic group")
            twist = tuple(int(w) for w in twist)
            assert len(twist) == 2 * dim
        self.dim = dim
        self.group = group
        self.vector = vector
        self.twist = twist

    def translation_phase(self, g: int, mode) -> FieldElement:
        r = sum(Fraction(mj) * vj for mj, vj in zip(mode, self.vector)) * g
        return _unit_phase(r.numerator, r.denominator)

    def twist_phase(self, g: int, mode, trunc: int) -> HbarLaurent:
        if self.twist is None or g == 0:
            return HbarLaurent.one(trunc)
        return _star_phase(2 * g * omega_pairing(self.twist, mode), trunc)

    def apply(self, g: int, elt: TorusElement) -> TorusElement:
        g = self.group.normalize(g)
        out = {}
        for m, c in elt.coeffs.items():
            c = c * self.translation_phase(g, m)
            if self.twist is not None:
                c = c * self.twist_phase(g, m, c.trunc)
            out[m] = c
        return TorusElement(elt.dim, out)

    def mode_phase(self, g: int, mode, trunc: int) -> HbarLaurent:
        """Scalar the g-th power multiplies the plane wave of `mode` by.

        Plane waves are joint eigenvectors of every translation action, so
        acting on a single mode never mixes modes; this returns the full
        eigenvalue (translation phase times twist phase) in one series.
        """
        g = self.group.normalize(g)
        c = HbarLaurent.from_field(self.translation_phase(g, mode), trunc)
        if self.twist is not None:
            c = c * self.twist_phase(g, mode, trunc)
        return c

    def untwisted(self) -> "TranslationAction":
        return TranslationAction(self.dim, self.group, self.vector, None)

    def __repr__(self):
        return (f"TranslationAction(dim={self.dim}, group={self.group}, "
                f"vector={self.vector}, twist={self.twist})")


class CrossedElement:
    """Finite sum a_g u_g in the crossed product of the quantized torus by a
    translation action; u_g a u_g^(-1) = (action of g on a)."""

    __slots__ = ("action", "coeffs")

    def __init__(self, action: TranslationAction,
                 coeffs: dict[int, TorusElement]):
        self.action = action
        self.coeffs = {action.group.normalize(g): a
                       for g, a in coeffs.items() if not a.is_zero()}

    @classmethod
    def pure(cls, action: TranslationAction, g: int,
             a: TorusElement) -> "CrossedElement":
        return cls(action, {g: a})

    @classmethod
    def one(cls, action: TranslationAction, trunc: int) -> "CrossedElement":
        return cls(action, {0: TorusElement.one(action.dim, trunc)})

    def is_zero(self) -> bool:
        return not self.coeffs

    def component(self, g: int) -> TorusElement:
        return self.coeffs.get(self.action.group.normalize(g),
                               TorusElement.zero(self.action.dim))

    def __add__(self, other):
        if not isinstance(other, CrossedElement):
            return NotImplemented
        out = dict(self.coeffs)
        for g, a in other.coeffs.items():
            cur = out.get(g)
            out[g] = a if cur is None else cur + a
        return CrossedElement(self.action, out)

    def __neg__(self):
        return CrossedElement(self.action,
                              {g: -a for g, a in self.coeffs.items()})

    def __sub__(self, other):
        if not isinstance(other, CrossedElement):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, FieldElement, HbarLaurent)):
            return CrossedElement(self.action,
                                  {g: a * other for g, a in self.coeffs.items()})
        return NotImplemented

    __rmul__ = __mul__

    def star(self, other: "CrossedElement") -> "CrossedElement":
        assert isinstance(other, CrossedElement)
        grp = self.action.group
        out: dict[int, TorusElement] = {}
        for g, a in self.coeffs.items():
            for h, b in other.coeffs.items():
                prod = a.star(self.action.apply(g, b))
                key = grp.compose(g, h)
                cur = out.get(key)
                out[key] = prod if cur is None else cur + prod
        return CrossedElement(self.action, out)

    def trace(self) -> HbarLaurent:
        """Trace of the identity-group-component; the other components are
        killed, which is what makes the trace invariant under the action."""
        return self.component(0).trace()

    def global_window(self):
        wins = [w for a in self.coeffs.values()
                if (w := a.global_window()) is not None]
        return min(wins) if wins else None

    def __eq__(self, other):
        if not isinstance(other, CrossedElement):
            return NotImplemented
        wa, wb = self.global_window(), other.global_window()
        keys = set(self.coeffs) | set(other.coeffs)
        for k in keys:
            a = self.coeffs.get(k)
            b = other.coeffs.get(k)
            if a is None:
                if not (b if wa is None else b.cap(wa)).is_zero():
                    return False
            elif b is None:
                if not (a if wb is None else a.cap(wb)).is_zero():
                    return False
            elif a != b:
                return False
        return True

    def __hash__(self):
        raise TypeError("CrossedElement is unhashable")

    def __repr__(self):
        return f"CrossedElement<components={sorted(self.coeffs)}>"


# ---------------------------------------------------------------------------
# differential forms on the torus


def _merge_directions(p: tuple[int, ...], q: tuple[int, ...]):
    """Merge two strictly increasing direction tuples; Koszul sign or None."""
    if set(p) & set(q):
        return None, 0
    merged = []
    sign = 1
    i = j = 0
    while i < len(p) and j < len(q):
        if p[i] < q[j]:
            merged.append(p[i])
            i += 1
        else:
            merged.append(q[j])
            j += 1
            if (len(p) - i) % 2:
                sign = -sign
    merged.extend(p[i:])
    merged.extend(q[j:])
    return tuple(merged), sign


class TorusForm:
    """Differential form on the 2d-torus with TorusElement coefficients.

    Keys are strictly increasing tuples of directions 0..2d-1; direction j<d
    is dx^(j+1), direction d+j is dxi^(j+1).
    """

    __slots__ = ("dim", "parts")

    def __init__(self, dim: int, parts: dict[tuple[int, ...], TorusElement]):
        self.dim = dim
        self.parts = {k: v for k, v in parts.items() if not v.is_zero()}
        for k in self.parts:
            assert all(x < y for x, y in zip(k, k[1:]))

    @classmethod
    def zero(cls, dim: int) -> "TorusForm":
        return cls(dim, {})

    @classmethod
    def from_function(cls, f: TorusElement) -> "TorusForm":
        return cls(f.dim, {(): f})

    @classmethod
    def basis_form(cls, dim: int, directions, coeff: TorusElement) -> "TorusForm":
        return cls(dim, {tuple(directions): coeff})

    def is_zero(self) -> bool:
        return not self.parts

    def component(self, directions) -> TorusElement:
        return self.parts.get(tuple(directions), TorusElement.zero(self.dim))

    def degree_part(self, r: int) -> "TorusForm":
        return TorusForm(self.dim,
                         {k: v for k, v in self.parts.items() if len(k) == r})

    def __add__(self, other):
        if not isinstance(other, TorusForm):
            return NotImplemented
        out = dict(self.parts)
        for k, v in other.parts.items():
            cur = out.get(k)
            out[k] = v if cur is None else cur + v
        return TorusForm(self.dim, out)

    def __neg__(self):
        return TorusForm(self.dim, {k: -v for k, v in self.parts.items()})

    def __sub__(self, other):
        if not isinstance(other, TorusForm):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, FieldElement, HbarLaurent)):
            return TorusForm(self.dim,
                             {k: v * other for k, v in self.parts.items()})
        return NotImplemented

    __rmul__ = __mul__

    def wedge(self, other: "TorusForm") -> "TorusForm":
        assert isinstance(other, TorusForm) and other.dim == self.dim
        out: dict = {}
        for p, a in self.parts.items():
            for q, b in other.parts.items():
                key, sign = _merge_directions(p, q)
                if key is None:
                    continue
                term = a.symbol_mul(b) * sign
                cur = out.get(key)
                out[key] = term if cur is None else cur + term
        return TorusForm(self.dim, out)

    def d(self) -> "TorusForm":
        """Exterior derivative."""
        out: dict = {}
        for k, v in self.parts.items():
            for j in range(2 * self.dim):
                dv = v.partial(j)
                if dv.is_zero():
                    continue
                key, sign = _merge_directions((j,), k)
                if key is None:
                    continue
                term = dv * sign
                cur = out.get(key)
                out[key] = term if cur is None else cur + term
        return TorusForm(self.dim, out)

    def integrate(self) -> HbarLaurent:
        """Integral over the torus, normalized so the symplectic volume
        omega^d / d! integrates to 1; only the top component contributes and
        only through its zero mode."""
        d = self.dim
        top = self.parts.get(tuple(range(2 * d)))
        if top is None:
            return HbarLaurent.zero(self.min_trunc())
        z = (0,) * (2 * d)
        c = top.coeffs.get(z)
        if c is None:
            c = HbarLaurent.zero(top.min_trunc())
        sign = (-1) ** d * (-1) ** (d * (d - 1) // 2)
        return c * sign

    def min_trunc(self) -> int:
        truncs = [v.min_trunc() for v in self.parts.values()]
        return min(truncs) if truncs else 0

    def global_window(self):
        wins = [w for v in self.parts.values()
                if (w := v.global_window()) is not None]
        return min(wins) if wins else None

    def __eq__(self, other):
        if not isinstance(other, TorusForm):
            return NotImplemented
        wa, wb = self.global_window(), other.global_window()
        keys = set(self.parts) | set(other.parts)
        for k in keys:
            a = self.parts.get(k)
            b = other.parts.get(k)
            if a is None:
                if not (b if wa is None else b.cap(wa)).is_zero():
                    return False
            elif b is None:
                if not (a if wb is None else a.cap(wb)).is_zero():
                    return False
            elif a != b:
                return False
        return True

    def __hash__(self):
        raise TypeError("TorusForm is unhashable")

    def __repr__(self):
        degs = sorted({len(k) for k in self.parts})
        return f"TorusForm<degrees={degs}, dim={self.dim}>"


def symplectic_form(dim: int, trunc: int) -> TorusForm:
    """omega = sum_i dxi_i ^ dx_i as a constant-coefficient 2-form."""
    out = TorusForm.zero(dim)
    for i in range(dim):
        # directions: x_i is i, xi_i is dim + i; (i, dim+i) sorted carries
        # dx^i ^ dxi^i = -dxi^i ^ dx^i
        out = out + TorusForm.basis_form(
            dim, (i, dim + i), TorusElement.one(dim, trunc) * (-1))
    return out


# ---------------------------------------------------------------------------
# jets: sections of the fiberwise Weyl algebra


class WeylSection:
    """Jet-bundle section: polynomial in 2d fiber generators with
    TorusElement coefficients, filtered by fiber degree + 2 (hbar degree).

    Multiplication is fiberwise Weyl-Moyal while base coefficients multiply
    commutatively; the full deformation sits in the fiber, which is what
    makes the flat connection below a derivation of the product.
    """

    __slots__ = ("dim", "order", "coeffs")

    def __init__(self, dim: int, order: int,
                 coeffs: dict[tuple[int, ...], TorusElement]):
        self.dim = dim
        self.order = order
        cleaned = {}
        for alpha, c in coeffs.items():
            w = sum(alpha)
            if w > order:
                continue
            cap = (order - w) // 2
            c = TorusElement(dim, {m: cc.truncate(min(cc.trunc, cap))
                                   for m, cc in c.coeffs.items()})
            if not c.is_zero():
                cleaned[alpha] = c
        self.coeffs = cleaned

    @classmethod
    def zero(cls, dim: int, order: int) -> "WeylSection":
        return cls(dim, order, {})

    @classmethod
    def from_base(cls, f: TorusElement, order: int) -> "WeylSection":
        return cls(f.dim, order, {(0,) * (2 * f.dim): f})

    @classmethod
    def fiber_wave(cls, dim: int, w, order: int) -> "WeylSection":
        """exp(2 pi i w . yhat): the base-constant fiber plane wave of an
        integer vector w, expanded through the fiber filtration."""
        w = tuple(w)
        out: dict = {}
        for alpha in _fiber_indices(2 * dim, order):
            c = Fraction(1)
            fe = FieldElement.rational(1)
            tot = sum(alpha)
            for wj, aj in zip(w, alpha):
                c *= Fraction(wj ** aj, _fact(aj))
            if c == 0 and tot > 0:
                continue
            fe = FieldElement.pi_power(tot, c * 2 ** tot) * \
                FieldElement.i_unit() ** tot
            cap = (order - tot) // 2
            out[alpha] = TorusElement.one(dim, cap) * fe
        return cls(dim, order, out)

    def component(self, alpha) -> TorusElement:
        return self.coeffs.get(tuple(alpha), TorusElement.zero(self.dim))

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other):
        if not isinstance(other, WeylSection):
            return NotImplemented
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            cur = out.get(k)
            out[k] = v if cur is None else cur + v
        return WeylSection(self.dim, min(self.order, other.order), out)

    def __neg__(self):
        return WeylSection(self.dim, self.order,
                           {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        if not isinstance(other, WeylSection):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, FieldElement, HbarLaurent)):
            return WeylSection(self.dim, self.order,
                               {k: v * other for k, v in self.coeffs.items()})
        return NotImplemented

    __rmul__ = __mul__

    def star(self, other: "WeylSection") -> "WeylSection":
        assert isinstance(other, WeylSection) and other.dim == self.dim
        d = self.dim
        order = min(self.order, other.order)
        out: dict = {}
        for alpha, ca in self.coeffs.items():
            wa = WeylElement.monomial(d, alpha[:d], alpha[d:], 0, 1,
                                      order=order)
            for beta, cb in other.coeffs.items():
                wb = WeylElement.monomial(d, beta[:d], beta[d:], 0, 1,
                                          order=order)
                base = ca.symbol_mul(cb)
                for (a, b, k), scal in wa.star(wb).coeffs.items():
                    gamma = a + b
                    term = base * scal
                    if k:
                        term = TorusElement(
                            d, {m: c.shift(k) for m, c in term.coeffs.items()})
                    cur = out.get(gamma)
                    out[gamma] = term if cur is None else cur + term
        return WeylSection(d, order, out)

    def nabla(self) -> list["WeylSection"]:
        """Flat connection: component j is (base d/dz_j - fiber d/dy_j).

        Jets of torus elements are flat; the result loses the top fiber
        filtration degree.
        """
        out = []
        for j in range(2 * self.dim):
            comp: dict = {}
            for alpha, c in self.coeffs.items():
                dc = c.partial(j)
                if not dc.is_zero():
                    cur = comp.get(alpha)
                    comp[alpha] = dc if cur is None else cur + dc
                if alpha[j]:
                    down = tuple(a - 1 if t == j else a
                                 for t, a in enumerate(alpha))
                    term = c * (-alpha[j])
                    cur = comp.get(down)
                    comp[down] = term if cur is None else cur + term
            out.append(WeylSection(self.dim, self.order - 1, comp))
        return out

    def __eq__(self, other):
        if not isinstance(other, WeylSection):
            return NotImplemented
        common = min(self.order, other.order)
        keys = {k for k in self.coeffs if sum(k) <= common} | \
               {k for k in other.coeffs if sum(k) <= common}
        for k in keys:
            a = self.coeffs.get(k)
            b = other.coeffs.get(k)
            if a is None:
                if not b.is_zero():
                    return False
            elif b is None:
                if not a.is_zero():
                    return False
            elif a != b:
                return False
        return True

    def __hash__(self):
        raise TypeError("WeylSection is unhashable")

    def __repr__(self):
        return f"WeylSection<{len(self.coeffs)} fiber terms, order={self.order}>"


def _fact(n: int) -> int:
    out = 1
    for t in range(2, n + 1):
        out *= t
    return out


def _fiber_indices(slots: int, max_total: int):
    if slots == 0:
        yield ()
        return
    for head in range(max_total + 1):
        for tail in _fiber_indices(slots - 1, max_total - head):
            yield (head,) + tail


def jet(f: TorusElement, order: int) -> WeylSection:
    """Taylor expansion along the fiber: e_m goes to
    e_m * prod_j exp(2 pi i m_j yhat_j), expanded through the filtration."""
    d = f.dim
    out: dict = {}
    for m, c in f.coeffs.items():
        for alpha in _fiber_indices(2 * d, order):
            tot = sum(alpha)
            q = Fraction(1)
            for mj, aj in zip(m, alpha):
                q *= Fraction(mj ** aj, _fact(aj))
            if q == 0 and tot > 0:
                continue
            fe = FieldElement.pi_power(tot, q * 2 ** tot) * \
                FieldElement.i_unit() ** tot
            term = TorusElement(d, {m: c * fe})
            cur = out.get(alpha)
            out[alpha] = term if cur is None else cur + term
    return WeylSection(d, order, out)
