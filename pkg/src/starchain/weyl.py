"""Formal Weyl algebra on 2d generators with its star product.

Elements are polynomials in xhat_1..xhat_d, xihat_1..xihat_d and hbar with
FieldElement coefficients, stored normal-ordered (all xhat before all xihat);
hbar counts as degree 2, so the filtration degree of a monomial
xhat^a xihat^b hbar^k is |a| + |b| + 2k.  Every element carries `order`, the
highest filtration degree that is reliable; the star product is filtered, so
windows combine exactly like the Laurent windows in scalars.

Conventions implemented here and relied on everywhere else:
    xihat_k * xhat_j - xhat_j * xihat_k = i hbar delta_kj   (star commutator)
which is the quantization of the symplectic pairing with
omega(xihat_k, xhat_j) = delta_kj, i.e. omega = dxi ^ dx in each plane.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .scalars import FieldElement, HbarLaurent, _as_field, _min_trunc


def _falling(n: int, j: int) -> int:
    out = 1
    for t in range(j):
        out *= n - t
    return out


def _factorial(j: int) -> int:
    out = 1
    for t in range(2, j + 1):
        out *= t
    return out


_I4 = None


def _i_pow(m: int) -> FieldElement:
    global _I4
    if _I4 is None:
        _I4 = tuple(FieldElement.i_unit(4) ** r for r in range(4))
    return _I4[m % 4]


def _deg(key) -> int:
    a, b, k = key
    return sum(a) + sum(b) + 2 * k


class WeylElement:
    """Sparse normal-ordered element of the formal Weyl algebra."""

    __slots__ = ("dim", "order", "coeffs")

    def __init__(self, dim: int, order: int,
                 coeffs: dict[tuple[tuple[int, ...], tuple[int, ...], int], FieldElement]):
        self.dim = dim
        self.order = order
        self.coeffs = {k: v for k, v in coeffs.items()
                       if _deg(k) <= order and not v.is_zero()}

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, dim: int, order: int) -> "WeylElement":
        return cls(dim, order, {})

    @classmethod
    def monomial(cls, dim: int, a, b, hbar_pow: int = 0, coeff=1,
                 order: int = 16) -> "WeylElement":
        a, b = tuple(a), tuple(b)
        assert len(a) == dim and len(b) == dim
        return cls(dim, order, {(a, b, hbar_pow): _as_field(coeff, 4)
                                if not isinstance(coeff, FieldElement) else coeff})

    @classmethod
    def one(cls, dim: int, order: int = 16) -> "WeylElement":
        z = (0,) * dim
        return cls.monomial(dim, z, z, 0, 1, order)

    @classmethod
    def x_hat(cls, dim: int, i: int, order: int = 16) -> "WeylElement":
        a = tuple(1 if j == i else 0 for j in range(dim))
        return cls.monomial(dim, a, (0,) * dim, 0, 1, order)

    @classmethod
    def xi_hat(cls, dim: int, i: int, order: int = 16) -> "WeylElement":
        b = tuple(1 if j == i else 0 for j in range(dim))
        return cls.monomial(dim, (0,) * dim, b, 0, 1, order)

    @classmethod
    def hbar(cls, dim: int, power: int = 1, order: int = 16) -> "WeylElement":
        z = (0,) * dim
        return cls.monomial(dim, z, z, power, 1, order)

    @classmethod
    def central(cls, dim: int, series: HbarLaurent, order: int) -> "WeylElement":
        """Embed an hbar-series with nonnegative valuation as a central element."""
        z = (0,) * dim
        out = {}
        for k, fe in series.coeffs.items():
            if k < 0:
                raise ValueError("central embedding needs nonnegative hbar powers")
            out[(z, z, k)] = fe
        return cls(dim, min(order, 2 * series.trunc + 1), out)

    # -- queries -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def low(self):
        return min(_deg(k) for k in self.coeffs) if self.coeffs else None

    def coefficient(self, a, b, hbar_pow: int = 0) -> FieldElement:
        return self.coeffs.get((tuple(a), tuple(b), hbar_pow), FieldElement.zero())

    def central_part(self, h_trunc: int | None = None) -> HbarLaurent:
        """The pure-hbar component, as an hbar-series."""
        z = (0,) * self.dim
        tr = self.order // 2 if h_trunc is None else h_trunc
        return HbarLaurent(tr, {k: v for (a, b, k), v in self.coeffs.items()
                                if a == z and b == z})

    def without_central(self) -> "WeylElement":
        z = (0,) * self.dim
        return WeylElement(self.dim, self.order,
                           {key: v for key, v in self.coeffs.items()
                            if not (key[0] == z and key[1] == z)})

    def quadratic_part(self) -> "WeylElement":
        """Terms of polynomial degree exactly 2 with no hbar."""
        return WeylElement(self.dim, self.order,
                           {key: v for key, v in self.coeffs.items()
                            if key[2] == 0 and sum(key[0]) + sum(key[1]) == 2})

    # -- linear structure --------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, WeylElement):
            return NotImplemented
        assert other.dim == self.dim
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            cur = out.get(k)
            out[k] = v if cur is None else cur + v
        return WeylElement(self.dim, min(self.order, other.order), out)

    def __neg__(self):
        return WeylElement(self.dim, self.order,
                           {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        if not isinstance(other, WeylElement):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        """Scalar action; use star() or poly_mul() for algebra products."""
        if isinstance(other, (int, Fraction, FieldElement)):
            fe = other if isinstance(other, FieldElement) else _as_field(other, 4)
            return WeylElement(self.dim, self.order,
                               {k: v * fe for k, v in self.coeffs.items()})
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            return WeylElement(self.dim, self.order,
                               {k: v / q for k, v in self.coeffs.items()})
        if isinstance(other, FieldElement):
            return self * other.inv_monomial()
        return NotImplemented

    def divide_hbar(self, m: int = 1) -> "WeylElement":
        """Exact division by hbar^m; every term must carry at least hbar^m."""
        out = {}
        for (a, b, k), v in self.coeffs.items():
            if k < m:
                raise ValueError("element is not divisible by hbar^%d" % m)
            out[(a, b, k - m)] = v
        return WeylElement(self.dim, self.order - 2 * m, out)

    def shift_hbar(self, m: int) -> "WeylElement":
        if m < 0:
            return self.divide_hbar(-m)
        out = {(a, b, k + m): v for (a, b, k), v in self.coeffs.items()}
        return WeylElement(self.dim, self.order + 2 * m, out)

    # -- products ----------------------------------------------------------

    def _window(self, other) -> int:
        return _min_trunc(self.order, self.low, other.order, other.low)

    def star(self, other: "WeylElement") -> "WeylElement":
        """Weyl-Moyal product, expanded monomial against monomial.

        For monomials u, v the product is the finite sum over multi-indices
        s, t of
            (i hbar / 2)^(|s|+|t|) (-1)^|t| / (s! t!)
                * (d_xi^s d_x^t u) (d_x^s d_xi^t v)
        and the filtration degree of every term matches deg(u) + deg(v).
        """
        assert isinstance(other, WeylElement) and other.dim == self.dim
        dim = self.dim
        order = self._window(other)
        out: dict = {}
        for (a1, b1, k1), c1 in self.coeffs.items():
            for (a2, b2, k2), c2 in other.coeffs.items():
                if _deg((a1, b1, k1)) + _deg((a2, b2, k2)) > order:
                    continue
                cc = c1 * c2
                s_bounds = [min(b1[i], a2[i]) for i in range(dim)]
                t_bounds = [min(a1[i], b2[i]) for i in range(dim)]
                for s in itertools.product(*(range(m + 1) for m in s_bounds)):
                    num_s = Fraction(1)
                    for i in range(dim):
                        num_s *= Fraction(
                            _falling(b1[i], s[i]) * _falling(a2[i], s[i]),
                            _factorial(s[i]))
                    for t in itertools.product(*(range(m + 1) for m in t_bounds)):
                        num = num_s
                        for i in range(dim):
                            num *= Fraction(
                                _falling(a1[i], t[i]) * _falling(b2[i], t[i]),
                                _factorial(t[i]))
                        st = sum(s) + sum(t)
                        coeff = cc * num * Fraction((-1) ** sum(t), 2 ** st) \
                            * _i_pow(st)
                        a = tuple(a1[i] + a2[i] - s[i] - t[i] for i in range(dim))
                        b = tuple(b1[i] + b2[i] - s[i] - t[i] for i in range(dim))
                        key = (a, b, k1 + k2 + st)
                        cur = out.get(key)
                        out[key] = coeff if cur is None else cur + coeff
        return WeylElement(dim, order, out)

    def poly_mul(self, other: "WeylElement") -> "WeylElement":
        """Commutative product of the underlying symbols (no hbar corrections)."""
        assert isinstance(other, WeylElement) and other.dim == self.dim
        order = self._window(other)
        out: dict = {}
        for (a1, b1, k1), c1 in self.coeffs.items():
            for (a2, b2, k2), c2 in other.coeffs.items():
                a = tuple(x + y for x, y in zip(a1, a2))
                b = tuple(x + y for x, y in zip(b1, b2))
                key = (a, b, k1 + k2)
                if _deg(key) > order:
                    continue
                p = c1 * c2
                cur = out.get(key)
                out[key] = p if cur is None else cur + p
        return WeylElement(self.dim, order, out)

    def partial_x(self, i: int) -> "WeylElement":
        out = {}
        for (a, b, k), v in self.coeffs.items():
            if a[i]:
                a2 = tuple(e - 1 if j == i else e for j, e in enumerate(a))
                out[(a2, b, k)] = v * a[i]
        return WeylElement(self.dim, self.order - 1, out)

    def partial_xi(self, i: int) -> "WeylElement":
        out = {}
        for (a, b, k), v in self.coeffs.items():
            if b[i]:
                b2 = tuple(e - 1 if j == i else e for j, e in enumerate(b))
                out[(a, b2, k)] = v * b[i]
        return WeylElement(self.dim, self.order - 1, out)

    def truncate(self, order: int) -> "WeylElement":
        return WeylElement(self.dim, min(order, self.order), self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, WeylElement):
            return NotImplemented
        common = min(self.order, other.order)
        a = {k: v for k, v in self.coeffs.items() if _deg(k) <= common}
        b = {k: v for k, v in other.coeffs.items() if _deg(k) <= common}
        if set(a) != set(b):
            return False
        return all(a[k] == b[k] for k in a)

    def __hash__(self):
        raise TypeError("WeylElement is unhashable (window-relative equality)")

    def __repr__(self):
        parts = []
        for key in sorted(self.coeffs, key=lambda k: (_deg(k), k)):
            a, b, h = key
            parts.append(f"x^{a}xi^{b}h^{h}")
        return f"WeylElement<{' + '.join(parts) or '0'}; order={self.order}>"


def commutator(f: WeylElement, g: WeylElement) -> WeylElement:
    return f.star(g) - g.star(f)


class Derivation:
    """Inner derivation g -> (1/hbar)(rep*g - g*rep) of the Weyl algebra.

    The representative is stored with its central (pure-hbar) part removed,
    which makes it the canonical lift of the derivation.
    """

    __slots__ = ("rep",)

    def __init__(self, rep: WeylElement):
        self.rep = rep.without_central()

    def apply(self, g: WeylElement) -> WeylElement:
        return commutator(self.rep, g).divide_hbar(1)

    def bracket(self, other: "Derivation") -> "Derivation":
        return Derivation(commutator(self.rep, other.rep).divide_hbar(1))

    def __eq__(self, other):
        if not isinstance(other, Derivation):
            return NotImplemented
        return self.rep == other.rep

    def __hash__(self):
        raise TypeError("Derivation is unhashable")

    def __repr__(self):
        return f"Derivation({self.rep!r})"


def extension_defect(d1: Derivation, d2: Derivation) -> HbarLaurent:
    """Central discrepancy of the canonical lifts of two derivations.

    Lifting a derivation to hbar^-1 times its representative, the bracket of
    lifts minus the lift of the bracket is a central hbar-series; the result
    can carry an hbar^-1 term, which is the source of the 1/hbar singularity
    in the curvature-type classes built downstream.
    """
    w = commutator(d1.rep, d2.rep).divide_hbar(1)
    return w.central_part().shift(-1)


def sp_quadratic_basis(dim: int, order: int = 16) -> list[WeylElement]:
    """Representatives of a basis of the quadratic symbols: these close under
    (1/hbar)[.,.] with no central defect and act as the symplectic Lie algebra."""
    out = []
    for k in range(dim):
        for j in range(k, dim):
            xk = WeylElement.x_hat(dim, k, order)
            xj = WeylElement.x_hat(dim, j, order)
            out.append(xk.star(xj) if k != j else xk.poly_mul(xj))
            pk = WeylElement.xi_hat(dim, k, order)
            pj = WeylElement.xi_hat(dim, j, order)
            out.append(-(pk.star(pj) if k != j else pk.poly_mul(pj)))
    for k in range(dim):
        for j in range(dim):
            xk = WeylElement.x_hat(dim, k, order)
            pj = WeylElement.xi_hat(dim, j, order)
            sym = (xk.star(pj) + pj.star(xk)) / 2
            out.append(sym)
    return out
