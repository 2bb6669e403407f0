"""Polynomial differential forms on the 2d formal fiber disk.

A term pairs a commutative monomial in the fiber coordinates with a
strictly increasing tuple of one-form legs; leg j < d is dx_j, leg d+j
is dxi_j, matching the direction numbering used for the torus forms.
Coefficients are ULaurent scalars, so the hbar and u windows of the
chain machinery ride along unchanged.  Antisymmetry is normalized away:
legs are always stored sorted, with the reordering sign absorbed into
the coefficient.

The operations here are the chain-to-form rule (1/n!) w0 dw1 ^...^ dwn,
the exterior derivative, the degree-dependent u-power reindexing that
turns the u-scaled derivative into the plain one, and the Euler-ray
contraction that splits a closed form into its constant part plus an
explicit exact remainder.
"""

from fractions import Fraction
from itertools import permutations

from .cyclic import ChainContext, CyclicChain
from .scalars import ULaurent
from .torus import _merge_directions


def _fact(n: int) -> int:
    out = 1
    for t in range(2, n + 1):
        out *= t
    return out


def _coordinate_name(dim: int, j: int) -> str:
    return f"x{j}" if j < dim else f"xi{j - dim}"


class FormalForm:
    """Sparse form with ULaurent coefficients, capped at a polynomial
    filtration order the same way Weyl elements are."""

    __slots__ = ("dim", "order", "terms", "shifted")

    def __init__(self, dim: int, terms, order: int = 16, shifted: bool = False):
        self.dim = dim
        self.order = order
        self.shifted = shifted
        clean = {}
        for (mono, legs), c in terms.items():
            a, b = mono
            assert len(a) == dim and len(b) == dim
            assert all(x < y for x, y in zip(legs, legs[1:]))
            if sum(a) + sum(b) > order or c.is_zero():
                continue
            clean[(mono, legs)] = c
        self.terms = clean

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, dim: int, order: int = 16) -> "FormalForm":
        return cls(dim, {}, order)

    @classmethod
    def scalar(cls, dim: int, coeff: ULaurent, order: int = 16) -> "FormalForm":
        z = (0,) * dim
        return cls(dim, {((z, z), ()): coeff}, order)

    @classmethod
    def monomial(cls, dim: int, a, b, legs, coeff: ULaurent,
                 order: int = 16) -> "FormalForm":
        return cls(dim, {((tuple(a), tuple(b)), tuple(legs)): coeff}, order)

    # -- queries -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def form_degrees(self):
        return sorted({len(legs) for _, legs in self.terms})

    def degree_part(self, r: int) -> "FormalForm":
        return FormalForm(self.dim,
                          {k: v for k, v in self.terms.items()
                           if len(k[1]) == r},
                          self.order, self.shifted)

    def scalar_part(self) -> ULaurent:
        """Coefficient of the constant 0-form term."""
        z = (0,) * self.dim
        c = self.terms.get(((z, z), ()))
        return c if c is not None else ULaurent.zero(self.u_window() or 0)

    def u_window(self):
        wins = [c.trunc for c in self.terms.values()]
        return min(wins) if wins else None

    # -- linear structure --------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, FormalForm):
            return NotImplemented
        assert other.dim == self.dim and other.shifted == self.shifted
        out = dict(self.terms)
        for k, v in other.terms.items():
            cur = out.get(k)
            out[k] = v if cur is None else cur + v
        return FormalForm(self.dim, out, min(self.order, other.order),
                          self.shifted)

    def __neg__(self):
        return FormalForm(self.dim, {k: -v for k, v in self.terms.items()},
                          self.order, self.shifted)

    def __sub__(self, other):
        if not isinstance(other, FormalForm):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, FormalForm):
            return self.wedge(other)
        return FormalForm(self.dim,
                          {k: v * other for k, v in self.terms.items()},
                          self.order, self.shifted)

    def __rmul__(self, other):
        return FormalForm(self.dim,
                          {k: v * other for k, v in self.terms.items()},
                          self.order, self.shifted)

    def shift_u(self, k: int) -> "FormalForm":
        return FormalForm(self.dim,
                          {key: v.shift_u(k) for key, v in self.terms.items()},
                          self.order, self.shifted)

    def truncate_u(self, trunc: int) -> "FormalForm":
        return FormalForm(self.dim,
                          {key: v.truncate_u(trunc)
                           for key, v in self.terms.items()},
                          self.order, self.shifted)

    # -- products and derivatives ------------------------------------------

    def wedge(self, other: "FormalForm") -> "FormalForm":
        assert isinstance(other, FormalForm) and other.dim == self.dim
        out: dict = {}
        for ((a1, b1), p), c1 in self.terms.items():
            for ((a2, b2), q), c2 in other.terms.items():
                legs, sign = _merge_directions(p, q)
                if legs is None:
                    continue
                mono = (tuple(x + y for x, y in zip(a1, a2)),
                        tuple(x + y for x, y in zip(b1, b2)))
                c = c1 * c2
                if sign < 0:
                    c = -c
                key = (mono, legs)
                cur = out.get(key)
                out[key] = c if cur is None else cur + c
        return FormalForm(self.dim, out, min(self.order, other.order),
                          self.shifted)

    def d_hat(self) -> "FormalForm":
        """Exterior derivative in the fiber coordinates."""
        d = self.dim
        out: dict = {}
        for ((a, b), legs), c in self.terms.items():
            for j in range(2 * d):
                e = a[j] if j < d else b[j - d]
                if not e:
                    continue
                if j < d:
                    mono = (tuple(v - 1 if t == j else v
                                  for t, v in enumerate(a)), b)
                else:
                    mono = (a, tuple(v - 1 if t == j - d else v
                                     for t, v in enumerate(b)))
                newlegs, sign = _merge_directions((j,), legs)
                if newlegs is None:
                    continue
                term = c * (e * sign)
                key = (mono, newlegs)
                cur = out.get(key)
                out[key] = term if cur is None else cur + term
        return FormalForm(d, out, self.order, self.shifted)

    # -- comparison --------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, FormalForm):
            return NotImplemented
        if self.shifted != other.shifted:
            return False
        wa, wb = self.u_window(), other.u_window()
        keys = set(self.terms) | set(other.terms)
        for k in keys:
            a = self.terms.get(k)
            b = other.terms.get(k)
            if a is None:
                if not (b if wa is None else b.truncate_u(wa)).is_zero():
                    return False
            elif b is None:
                if not (a if wb is None else a.truncate_u(wb)).is_zero():
                    return False
            elif a != b:
                return False
        return True

    def __hash__(self):
        raise TypeError("FormalForm is unhashable (window-relative equality)")

    def __repr__(self):
        bits = []
        for (mono, legs) in sorted(self.terms):
            a, b = mono
            factors = [f"{_coordinate_name(self.dim, j)}^{e}"
                       for j, e in enumerate(a + b) if e]
            factors += [f"d{_coordinate_name(self.dim, j)}" for j in legs]
            bits.append("*".join(factors) or "1")
        tag = "[shifted]" if self.shifted else ""
        return f"FormalForm<{' + '.join(bits) or '0'}{tag}>"


class LValued:
    """Finite table of linear rules on chains, one rule per degree.

    Applying the table splits a chain by word degree, feeds each piece
    to the matching rule, and sums the resulting forms; degrees missing
    from the table contribute nothing.
    """

    __slots__ = ("dim", "table")

    def __init__(self, dim: int, table):
        self.dim = dim
        self.table = dict(table)

    @classmethod
    def from_rule(cls, dim, degrees, rule) -> "LValued":
        return cls(dim, {n: rule for n in degrees})

    def degrees(self):
        return sorted(self.table)

    def apply(self, chain: CyclicChain) -> "FormalForm":
        out = FormalForm.zero(self.dim)
        for n, rule in sorted(self.table.items()):
            part = CyclicChain(chain.ctx,
                               {k: v for k, v in chain.coeffs.items()
                                if len(k) - 1 == n})
            if not part.is_zero():
                out = out + rule(part)
        return out


def hkr(chain: CyclicChain, order: int = 16) -> FormalForm:
    """Words to forms: (1/n!) w0 dw1 ^ ... ^ dwn, extended u-linearly.

    The rule reads the slots as commutative monomials, so it accepts both
    the commutative vocabulary and the Weyl one (on the latter it is the
    symbol-level rule).  A unit in any positive slot dies through d(1)=0.
    """
    if chain.ctx.kind not in ("weyl", "sym"):
        raise ValueError("the chains-to-forms rule wants monomial slots, "
                         f"not kind {chain.ctx.kind!r}")
    d = chain.ctx.dim
    out = FormalForm.zero(d, order)
    unit = chain.ctx.one()
    for word, coeff in chain.coeffs.items():
        n = len(word) - 1
        a0, b0 = word[0]
        acc = FormalForm.monomial(d, a0, b0, (),
                                  coeff * Fraction(1, _fact(n)), order)
        for a, b in word[1:]:
            acc = acc.wedge(
                FormalForm.monomial(d, a, b, (), unit, order).d_hat())
            if acc.is_zero():
                break
        out = out + acc
    return out


def j_shift(phi: FormalForm) -> FormalForm:
    """Reindex a form by u^(-d-n) in each form degree n.

    This intertwines the u-scaled exterior derivative with the plain one
    exactly, windows included, and tags the result as shifted.
    """
    out: dict = {}
    for key, c in phi.terms.items():
        out[key] = c.shift_u(-phi.dim - len(key[1]))
    return FormalForm(phi.dim, out, phi.order, shifted=True)


def poincare_contract(phi: FormalForm):
    """Split a closed form as (constant part, certificate) with
    phi = constant + d(certificate).

    The certificate comes from contracting along the Euler rays: each
    term of weight w = polynomial degree + form degree with w > 0 is
    divided by w and contracted with the radial field.  A form that is
    not closed is rejected, quoting its nonzero derivative.
    """
    exact = phi.d_hat()
    if not exact.is_zero():
        raise ValueError(f"form is not closed; derivative is {exact!r}")
    d = phi.dim
    cert: dict = {}
    for ((a, b), legs), c in phi.terms.items():
        w = sum(a) + sum(b) + len(legs)
        if w == 0:
            continue
        for pos, j in enumerate(legs):
            if j < d:
                mono = (tuple(v + 1 if t == j else v
                              for t, v in enumerate(a)), b)
            else:
                mono = (a, tuple(v + 1 if t == j - d else v
                                 for t, v in enumerate(b)))
            rest = legs[:pos] + legs[pos + 1:]
            term = c * Fraction((-1) ** pos, w)
            key = (mono, rest)
            cur = cert.get(key)
            cert[key] = term if cur is None else cur + term
    certificate = FormalForm(d, cert, phi.order + 1, phi.shifted)
    return phi.scalar_part(), certificate


def _perm_sign(perm) -> int:
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def mu_normalization_chain(dim: int, h_trunc: int = 8,
                           u_trunc: int = 6) -> CyclicChain:
    """The degree-2d antisymmetrized word 1 (x) alt(xi_1 (x) x_1 (x) ...),
    with one signed term per permutation of the 2d generator slots."""
    ctx = ChainContext.weyl(dim, h_trunc, u_trunc)
    zeros = (0,) * dim
    letters = []
    for i in range(dim):
        e = tuple(1 if j == i else 0 for j in range(dim))
        letters.append((zeros, e))
        letters.append((e, zeros))
    unit = (zeros, zeros)
    coeffs = {}
    for perm in permutations(range(2 * dim)):
        word = (unit,) + tuple(letters[p] for p in perm)
        coeffs[word] = ctx.scalar(_perm_sign(perm))
    return CyclicChain(ctx, coeffs)
