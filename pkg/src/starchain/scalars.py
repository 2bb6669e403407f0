"""Exact scalar tower: cyclotomic rationals with a formal pi, and truncated
Laurent layers in hbar and u.

The tower is Q(zeta_L)[pi] -> hbar-Laurent series mod hbar^(N+1) -> u-Laurent
series mod u^(Nu+1).  pi is transcendental, so it is carried as a formal
power; zeta_L is a primitive L-th root of unity with L divisible by 4 (so the
imaginary unit i = zeta_L^(L/4) is always available).  All arithmetic is
exact over fractions.Fraction.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Union


MAX_CYCLOTOMIC_LEVEL = 1_000_000

Rat = Union[int, Fraction]


class LevelOverflow(ValueError):
    """Raised when a least-common-multiple of cyclotomic levels would exceed
    MAX_CYCLOTOMIC_LEVEL."""


def _poly_divide(num: list[int], den: list[int]) -> list[int]:
    """Exact division of integer polynomials (coefficient lists, index = degree)."""
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for k in range(len(out) - 1, -1, -1):
        c = num[k + len(den) - 1]
        assert c % den[-1] == 0
        q = c // den[-1]
        out[k] = q
        for j, d in enumerate(den):
            num[k + j] -= q * d
    assert all(c == 0 for c in num)
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients of the n-th cyclotomic polynomial, ascending degree."""
    if n == 1:
        return (-1, 1)
    poly = [0] * (n + 1)
    poly[0], poly[n] = -1, 1
    for d in range(1, n):
        if n % d == 0:
            poly = _poly_divide(poly, list(cyclotomic_polynomial(d)))
    return tuple(poly)


@lru_cache(maxsize=None)
def _zeta_rows(level: int) -> tuple[tuple[int, ...], ...]:
    """Row k expresses zeta^k over the power basis zeta^0..zeta^(m-1), m = phi(level)."""
    phi = cyclotomic_polynomial(level)
    m = len(phi) - 1
    rows: list[tuple[int, ...]] = []
    for k in range(level):
        if k < m:
            row = [0] * m
            row[k] = 1
        else:
            prev = rows[k - 1]
            row = [0] * (m + 1)
            for j, c in enumerate(prev):
                row[j + 1] = c
            top = row[m]
            if top:
                for j in range(m):
                    row[j] -= top * phi[j]
            row = row[:m]
        rows.append(tuple(row))
    return tuple(rows)


def _basis_size(level: int) -> int:
    return len(cyclotomic_polynomial(level)) - 1


class FieldElement:
    """Element of Q(zeta_L)[pi]: finite sum of (rational) * zeta^a * pi^b.

    coeffs maps (a, b) -> Fraction with 0 <= a < phi(L) and b >= 0; zero
    coefficients are never stored.  Values are immutable by convention.
    """

    __slots__ = ("level", "coeffs")

    def __init__(self, level: int, coeffs: dict[tuple[int, int], Fraction]):
        if level < 4 or level % 4 != 0:
            raise ValueError("cyclotomic level must be a multiple of 4")
        if level > MAX_CYCLOTOMIC_LEVEL:
            raise LevelOverflow(f"level {level} exceeds bound {MAX_CYCLOTOMIC_LEVEL}")
        self.level = level
        self.coeffs = {k: v for k, v in coeffs.items() if v != 0}

    # -- constructors ------------------------------------------------------

    @classmethod
    def rational(cls, q: Rat, level: int = 4) -> "FieldElement":
        return cls(level, {(0, 0): Fraction(q)})

    @classmethod
    def zero(cls, level: int = 4) -> "FieldElement":
        return cls(level, {})

    @classmethod
    def zeta(cls, level: int, k: int = 1) -> "FieldElement":
        """zeta_level^k, reduced to the power basis."""
        rows = _zeta_rows(level)
        row = rows[k % level]
        return cls(level, {(a, 0): Fraction(c) for a, c in enumerate(row) if c})

    @classmethod
    def i_unit(cls, level: int = 4) -> "FieldElement":
        return cls.zeta(level, level // 4)

    @classmethod
    def pi_power(cls, b: int, coeff: Rat = 1, level: int = 4) -> "FieldElement":
        if b < 0:
            raise ValueError("pi powers are nonnegative")
        return cls(level, {(0, b): Fraction(coeff)})

    # -- level handling ----------------------------------------------------

    def embed(self, level: int) -> "FieldElement":
        """Reinterpret at a larger level (self.level must divide level)."""
        if level == self.level:
            return self
        if level % self.level != 0:
            raise ValueError("can only embed into a multiple of the current level")
        if level > MAX_CYCLOTOMIC_LEVEL:
            raise LevelOverflow(f"level {level} exceeds bound {MAX_CYCLOTOMIC_LEVEL}")
        step = level // self.level
        rows = _zeta_rows(level)
        out: dict[tuple[int, int], Fraction] = {}
        for (a, b), c in self.coeffs.items():
            for a2, rc in enumerate(rows[(a * step) % level]):
                if rc:
                    key = (a2, b)
                    out[key] = out.get(key, Fraction(0)) + c * rc
        return FieldElement(level, out)

    @staticmethod
    def common_level(x: "FieldElement", y: "FieldElement") -> int:
        lev = math.lcm(x.level, y.level)
        if lev > MAX_CYCLOTOMIC_LEVEL:
            raise LevelOverflow(
                f"lcm level {lev} exceeds bound {MAX_CYCLOTOMIC_LEVEL}")
        return lev

    # -- queries -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_rational(self) -> bool:
        return all(k == (0, 0) for k in self.coeffs)

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("element is not rational")
        return self.coeffs.get((0, 0), Fraction(0))

    def is_monomial(self) -> bool:
        """Single zeta-power term with no pi (hence invertible by inspection)."""
        return len(self.coeffs) == 1 and next(iter(self.coeffs))[1] == 0

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        other = _as_field(other, self.level)
        if other is NotImplemented:
            return NotImplemented
        lev = self.common_level(self, other)
        a, b = self.embed(lev), other.embed(lev)
        out = dict(a.coeffs)
        for k, v in b.coeffs.items():
            out[k] = out.get(k, Fraction(0)) + v
        return FieldElement(lev, out)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.level, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        o = _as_field(other, self.level)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = _as_field(other, self.level)
        if o is NotImplemented:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        other = _as_field(other, self.level)
        if other is NotImplemented:
            return NotImplemented
        lev = self.common_level(self, other)
        a, b = self.embed(lev), other.embed(lev)
        rows = _zeta_rows(lev)
        out: dict[tuple[int, int], Fraction] = {}
        for (a1, b1), c1 in a.coeffs.items():
            for (a2, b2), c2 in b.coeffs.items():
                c = c1 * c2
                bb = b1 + b2
                for a3, rc in enumerate(rows[(a1 + a2) % lev]):
                    if rc:
                        key = (a3, bb)
                        out[key] = out.get(key, Fraction(0)) + c * rc
        return FieldElement(lev, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            return FieldElement(self.level, {k: v / q for k, v in self.coeffs.items()})
        if isinstance(other, FieldElement):
            return self * other.inv_monomial()
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            return self.inv_monomial() ** (-n)
        out = FieldElement.rational(1, self.level)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def inv_monomial(self) -> "FieldElement":
        """Inverse, available when the element is q * zeta^a with q rational.

        General field inversion is deliberately not provided; every inverse the
        library needs is of this shape.
        """
        if not self.is_monomial():
            raise ValueError("only monomial scalars (q * zeta^a) are invertible here")
        (a, _b), q = next(iter(self.coeffs.items()))
        # zeta^a appears through the reduced basis, so a is already a plain
        # power; its inverse power is level - a.
        inv = FieldElement.zeta(self.level, (self.level - a) % self.level)
        return inv / q

    def __eq__(self, other):
        other = _as_field(other, self.level)
        if other is NotImplemented:
            return NotImplemented
        try:
            lev = self.common_level(self, other)
        except LevelOverflow:
            return False
        return self.embed(lev).coeffs == other.embed(lev).coeffs

    def __hash__(self):
        # canonical: embed nothing; hash by sorted items plus level class is
        # unreliable across levels, so hash only the rational part selector.
        return hash(frozenset(self.coeffs.items())) ^ self.level

    def __repr__(self):
        return f"FieldElement({to_text(self)!r})"


def _as_field(x, level: int):
    if isinstance(x, FieldElement):
        return x
    if isinstance(x, (int, Fraction)):
        return FieldElement.rational(x, level)
    return NotImplemented


_INF = None  # sentinel for "no lowest term" (zero series)


def _min_trunc(a_trunc, a_low, b_trunc, b_low):
    """Reliability window of a product, given windows and lowest exponents."""
    cands = []
    if b_low is not _INF:
        cands.append(a_trunc + b_low)
    if a_low is not _INF:
        cands.append(b_trunc + a_low)
    if not cands:
        return min(a_trunc, b_trunc)
    return min(cands)


class HbarLaurent:
    """Truncated Laurent series in hbar with FieldElement coefficients.

    trunc is the highest exponent whose coefficient is reliable; terms above
    it are discarded by every operation.  The principal (negative) part is
    always finite.  Equality compares the two series over the common reliable
    range, so callers that need a guaranteed range assert on .trunc as well.
    """

    __slots__ = ("trunc", "coeffs")

    def __init__(self, trunc: int, coeffs: dict[int, FieldElement]):
        self.trunc = trunc
        self.coeffs = {k: v for k, v in coeffs.items()
                       if k <= trunc and not v.is_zero()}

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, trunc: int) -> "HbarLaurent":
        return cls(trunc, {})

    @classmethod
    def from_field(cls, fe: FieldElement, trunc: int, power: int = 0) -> "HbarLaurent":
        return cls(trunc, {power: fe})

    @classmethod
    def one(cls, trunc: int, level: int = 4) -> "HbarLaurent":
        return cls.from_field(FieldElement.rational(1, level), trunc)

    @classmethod
    def from_rational(cls, q: Rat, trunc: int, power: int = 0,
                      level: int = 4) -> "HbarLaurent":
        return cls.from_field(FieldElement.rational(q, level), trunc, power)

    # -- queries -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def low(self):
        return min(self.coeffs) if self.coeffs else _INF

    def coefficient(self, k: int) -> FieldElement:
        if k > self.trunc:
            raise ValueError(f"hbar^{k} is beyond the reliable window {self.trunc}")
        return self.coeffs.get(k, FieldElement.zero())

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, HbarLaurent):
            return other
        if isinstance(other, (int, Fraction, FieldElement)):
            fe = _as_field(other, 4)
            return HbarLaurent.from_field(fe, self.trunc)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        trunc = min(self.trunc, o.trunc)
        out = dict(self.coeffs)
        for k, v in o.coeffs.items():
            cur = out.get(k)
            out[k] = v if cur is None else cur + v
        return HbarLaurent(trunc, out)

    __radd__ = __add__

    def __neg__(self):
        return HbarLaurent(self.trunc, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, FieldElement)):
            fe = _as_field(other, 4)
            if fe.is_zero():
                return HbarLaurent.zero(self.trunc)
            return HbarLaurent(self.trunc,
                               {k: v * fe for k, v in self.coeffs.items()})
        if not isinstance(other, HbarLaurent):
            return NotImplemented
        trunc = _min_trunc(self.trunc, self.low, other.trunc, other.low)
        out: dict[int, FieldElement] = {}
        for i, a in self.coeffs.items():
            for j, b in other.coeffs.items():
                k = i + j
                if k > trunc:
                    continue
                cur = out.get(k)
                p = a * b
                out[k] = p if cur is None else cur + p
        return HbarLaurent(trunc, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            return HbarLaurent(self.trunc,
                               {k: v / q for k, v in self.coeffs.items()})
        if isinstance(other, FieldElement):
            return self * other.inv_monomial()
        return NotImplemented

    def shift(self, k: int) -> "HbarLaurent":
        """Multiply by hbar^k; the reliability window moves with the terms."""
        return HbarLaurent(self.trunc + k,
                           {e + k: v for e, v in self.coeffs.items()})

    def truncate(self, trunc: int) -> "HbarLaurent":
        trunc = min(trunc, self.trunc)
        return HbarLaurent(trunc, {k: v for k, v in self.coeffs.items()
                                   if k <= trunc})

    def invert(self) -> "HbarLaurent":
        """Inverse when the lowest coefficient is a monomial scalar."""
        if self.is_zero():
            raise ZeroDivisionError("cannot invert the zero series")
        l = self.low
        c0 = self.coeffs[l]
        lead_inv = c0.inv_monomial()
        # self = c0 h^l (1 + n) with n of positive valuation
        n = (self.shift(-l) * lead_inv) - 1
        acc = HbarLaurent.one(n.trunc)
        term = HbarLaurent.one(n.trunc)
        j = 0
        while not term.is_zero() and j <= n.trunc + 1:
            term = term * (-n)
            acc = acc + term
            j += 1
        return (acc * lead_inv).shift(-l)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        common = min(self.trunc, o.trunc)
        a = {k: v for k, v in self.coeffs.items() if k <= common}
        b = {k: v for k, v in o.coeffs.items() if k <= common}
        if set(a) != set(b):
            return False
        return all(a[k] == b[k] for k in a)

    def __hash__(self):
        raise TypeError("HbarLaurent is unhashable (window-relative equality)")

    def __repr__(self):
        return f"HbarLaurent({to_text(self)!r}, trunc={self.trunc})"


def hbar_exp(x: HbarLaurent) -> HbarLaurent:
    """exp of a series with strictly positive hbar valuation (exact, finite).

    The sum is computed through the window of x; term j has valuation >= j,
    so it stops after at most trunc+1 rounds.
    """
    if not x.is_zero() and x.low <= 0:
        raise ValueError("exp needs positive hbar valuation")
    acc = HbarLaurent.one(x.trunc)
    term = acc
    j = 1
    while True:
        term = (term * x / j).truncate(x.trunc)
        if term.is_zero():
            break
        acc = acc + term
        j += 1
    return acc


class ULaurent:
    """Truncated Laurent series in u (degree -2) over HbarLaurent."""

    __slots__ = ("trunc", "coeffs")

    def __init__(self, trunc: int, coeffs: dict[int, HbarLaurent]):
        self.trunc = trunc
        self.coeffs = {k: v for k, v in coeffs.items()
                       if k <= trunc and not v.is_zero()}

    @classmethod
    def zero(cls, trunc: int) -> "ULaurent":
        return cls(trunc, {})

    @classmethod
    def from_hbar(cls, h: HbarLaurent, trunc: int, power: int = 0) -> "ULaurent":
        return cls(trunc, {power: h})

    @classmethod
    def one(cls, u_trunc: int, h_trunc: int, level: int = 4) -> "ULaurent":
        return cls.from_hbar(HbarLaurent.one(h_trunc, level), u_trunc)

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def low(self):
        return min(self.coeffs) if self.coeffs else _INF

    def coefficient(self, k: int) -> HbarLaurent:
        if k > self.trunc:
            raise ValueError(f"u^{k} is beyond the reliable window {self.trunc}")
        for v in self.coeffs.values():
            htr = v.trunc
            break
        else:
            htr = 0
        return self.coeffs.get(k, HbarLaurent.zero(htr))

    def _coerce(self, other):
        if isinstance(other, ULaurent):
            return other
        if isinstance(other, (int, Fraction, FieldElement, HbarLaurent)):
            if isinstance(other, HbarLaurent):
                return ULaurent.from_hbar(other, self.trunc)
            h = None
            for v in self.coeffs.values():
                h = HbarLaurent.from_field(_as_field(other, 4), v.trunc)
                break
            if h is None:
                h = HbarLaurent.from_field(_as_field(other, 4), 0)
            return ULaurent.from_hbar(h, self.trunc)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        trunc = min(self.trunc, o.trunc)
        out = dict(self.coeffs)
        for k, v in o.coeffs.items():
            cur = out.get(k)
            out[k] = v if cur is None else cur + v
        return ULaurent(trunc, out)

    __radd__ = __add__

    def __neg__(self):
        return ULaurent(self.trunc, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, FieldElement, HbarLaurent)):
            return ULaurent(self.trunc,
                            {k: v * other for k, v in self.coeffs.items()})
        if not isinstance(other, ULaurent):
            return NotImplemented
        trunc = _min_trunc(self.trunc, self.low, other.trunc, other.low)
        out: dict[int, HbarLaurent] = {}
        for i, a in self.coeffs.items():
            for j, b in other.coeffs.items():
                k = i + j
                if k > trunc:
                    continue
                cur = out.get(k)
                p = a * b
                out[k] = p if cur is None else cur + p
        return ULaurent(trunc, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return ULaurent(self.trunc,
                            {k: v / other for k, v in self.coeffs.items()})
        if isinstance(other, FieldElement):
            return self * other.inv_monomial()
        return NotImplemented

    def shift_u(self, k: int) -> "ULaurent":
        return ULaurent(self.trunc + k, {e + k: v for e, v in self.coeffs.items()})

    def shift_hbar(self, k: int) -> "ULaurent":
        return ULaurent(self.trunc, {e: v.shift(k) for e, v in self.coeffs.items()})

    def truncate_u(self, trunc: int) -> "ULaurent":
        return ULaurent(min(trunc, self.trunc),
                        {k: v for k, v in self.coeffs.items() if k <= trunc})

    def window(self, lo: int, hi: int) -> "ULaurent":
        """Restrict to u-powers in [lo, hi] (used by the cyclic/negative
        complex selectors)."""
        return ULaurent(min(hi, self.trunc),
                        {k: v for k, v in self.coeffs.items() if lo <= k <= hi})

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        common = min(self.trunc, o.trunc)
        keys = {k for k in self.coeffs if k <= common} | \
               {k for k in o.coeffs if k <= common}
        for k in keys:
            a = self.coeffs.get(k)
            b = o.coeffs.get(k)
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
        raise TypeError("ULaurent is unhashable (window-relative equality)")

    def __repr__(self):
        return f"ULaurent({to_text(self)!r}, u_trunc={self.trunc})"


# -- canonical serialization ----------------------------------------------
#
# One format for the whole tower: a sum of terms
#     (num/den)*zeta^a*pi^b*hbar^c*u^e
# written with middle dots, sorted by (e, c, b, a).  Exponents are always
# present so the form is canonical.


def canonical_terms(x) -> list[tuple[int, int, int, int, Fraction]]:
    """Flatten any tower element into sorted (e, c, b, a, coefficient) terms."""
    terms: list[tuple[int, int, int, int, Fraction]] = []
    if isinstance(x, (int, Fraction)):
        x = FieldElement.rational(x)
    if isinstance(x, FieldElement):
        for (a, b), q in x.coeffs.items():
            terms.append((0, 0, b, a, q))
    elif isinstance(x, HbarLaurent):
        for c, fe in x.coeffs.items():
            for (a, b), q in fe.coeffs.items():
                terms.append((0, c, b, a, q))
    elif isinstance(x, ULaurent):
        for e, h in x.coeffs.items():
            for c, fe in h.coeffs.items():
                for (a, b), q in fe.coeffs.items():
                    terms.append((e, c, b, a, q))
    else:
        raise TypeError(f"cannot serialize {type(x).__name__}")
    terms.sort(key=lambda t: t[:4])
    return terms


def to_text(x) -> str:
    """Canonical textual form; '0' for zero."""
    terms = canonical_terms(x)
    if not terms:
        return "0"
    parts = []
    for e, c, b, a, q in terms:
        parts.append(
            f"({q.numerator}/{q.denominator})·ζ^{a}·π^{b}·ħ^{c}·u^{e}")
    return " + ".join(parts)
