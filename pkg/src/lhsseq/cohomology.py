"""The mod-p cohomology ring of a finite abelian p-group.

H*(C_{p^m1} + ... + C_{p^mr}) is generated by y_1..y_r in degree one and
x_1..x_r in degree two, with y_i^2 = 0 for p^{m_i} > 2 and y_i^2 = x_i
when p^{m_i} = 2.  Classes are stored as reduced monomial sums.  Massey
triple products are computed on the minimal resolution, where cochain
differentials vanish: the defining-system terms can be taken to be zero
and the product is the value of the associativity-homotopy pairing h.
For one cyclic factor h is supported on triples of odd-degree classes
and counts the strictly increasing index triples (i < j < k < n) of the
homotopy; for direct products it is combined by the Koszul-signed
two-factor recursion, left-associated over the factors.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .groups import AbelianPGroupSpec, GroupError

__all__ = [
    "CohoClass",
    "MasseyResult",
    "MasseyUndefinedError",
    "cup",
    "bockstein",
    "massey_triple",
    "dims",
    "monomial_basis",
    "RingContext",
]

# monomial key: (eps, powers) with eps in {0,1}^r, powers in N^r
Monomial = tuple[tuple[int, ...], tuple[int, ...]]


class MasseyUndefinedError(ValueError):
    """Raised when a Massey triple product is requested for ab != 0 or bc != 0."""


def _monomial_degree(mon: Monomial) -> int:
    eps, pows = mon
    return sum(eps) + 2 * sum(pows)


@dataclass(frozen=True)
class CohoClass:
    """Homogeneous element of H*(G; F_p) for G finite abelian, as a
    reduced sum of monomials y^eps * x^pows."""

    group: AbelianPGroupSpec
    terms: dict[Monomial, int] = field(default_factory=dict)
    degree: int = 0

    def __post_init__(self):
        p = self.group.p
        clean = {}
        deg = None
        for mon, c in self.terms.items():
            c %= p
            if not c:
                continue
            eps, pows = mon
            if len(eps) != self.group.rank or len(pows) != self.group.rank:
                raise GroupError("monomial rank does not match the group")
            d = _monomial_degree(mon)
            if deg is None:
                deg = d
            elif d != deg:
                raise GroupError("class is not homogeneous")
            clean[(tuple(eps), tuple(pows))] = c
        object.__setattr__(self, "terms", clean)
        if clean:
            object.__setattr__(self, "degree", deg)

    # -- constructors ------------------------------------------------

    @classmethod
    def zero(cls, group: AbelianPGroupSpec, degree: int = 0) -> "CohoClass":
        return cls(group, {}, degree)

    @classmethod
    def one(cls, group: AbelianPGroupSpec) -> "CohoClass":
        r = group.rank
        return cls(group, {((0,) * r, (0,) * r): 1})

    @classmethod
    def monomial(cls, group, eps, pows, coeff: int = 1) -> "CohoClass":
        mon, sign = _reduce_monomial(group, tuple(eps), tuple(pows))
        if mon is None:
            return cls.zero(group)
        return cls(group, {mon: coeff * sign})

    @classmethod
    def y(cls, group, i: int) -> "CohoClass":
        eps = [0] * group.rank
        eps[i] = 1
        return cls.monomial(group, eps, (0,) * group.rank)

    @classmethod
    def x(cls, group, i: int) -> "CohoClass":
        pows = [0] * group.rank
        pows[i] = 1
        return cls.monomial(group, (0,) * group.rank, pows)

    # -- basic algebra -----------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "CohoClass") -> "CohoClass":
        self._check(other)
        terms = dict(self.terms)
        for mon, c in other.terms.items():
            terms[mon] = terms.get(mon, 0) + c
        deg = self.degree if self.terms else other.degree
        return CohoClass(self.group, terms, deg)

    def __sub__(self, other: "CohoClass") -> "CohoClass":
        return self + other.scale(-1)

    def __neg__(self) -> "CohoClass":
        return self.scale(-1)

    def scale(self, c: int) -> "CohoClass":
        return CohoClass(self.group, {m: v * c for m, v in self.terms.items()}, self.degree)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        return cup(self, other)

    def __eq__(self, other):
        return (
            isinstance(other, CohoClass)
            and self.group == other.group
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.group, tuple(sorted(self.terms.items()))))

    def _check(self, other: "CohoClass"):
        if self.group != other.group:
            raise GroupError("classes live over different groups")
        if self.terms and other.terms and self.degree != other.degree:
            raise GroupError("classes are not of equal degree")

    # -- display -----------------------------------------------------

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        p = self.group.p
        parts = []
        for mon in sorted(self.terms):
            c = self.terms[mon] % p
            if c > p - c:  # symmetric coefficient range for readability
                c, sign = p - c, "-"
            else:
                sign = "+"
            body = _monomial_str(mon)
            if body == "1":
                term = str(c)
            elif c == 1:
                term = body
            else:
                term = f"{c}*{body}"
            parts.append((sign, term))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, term in parts[1:]:
            out += f" {sign} {term}"
        return out

    __repr__ = __str__


def _monomial_str(mon: Monomial) -> str:
    eps, pows = mon
    bits = []
    for i, a in enumerate(pows):
        if a == 1:
            bits.append(f"x{i + 1}")
        elif a > 1:
            bits.append(f"x{i + 1}^{a}")
    bits.extend(f"y{i + 1}" for i, e in enumerate(eps) if e)
    return "*".join(bits) if bits else "1"


def _reduce_monomial(group, eps, pows):
    """Apply y_i^2 = x_i (p^{m_i}=2) or y_i^2 = 0 reductions.

    eps entries may exceed 1 transiently during multiplication.  Returns
    (monomial, sign) or (None, 0) when the monomial dies.
    """
    eps = list(eps)
    pows = list(pows)
    for i, e in enumerate(eps):
        if e >= 2:
            if group.factor_orders[i] == 2:
                pows[i] += e // 2
                eps[i] = e % 2
            else:
                return None, 0
    return (tuple(eps), tuple(pows)), 1


def _koszul_sign(eps1, eps2) -> int:
    """Sign of interleaving y^eps2 into y^eps1 keeping index order:
    each y_j in eps2 moves past the y_i of eps1 with i > j."""
    inv = 0
    total1 = sum(eps1)
    seen = 0
    for j in range(len(eps2)):
        seen += eps1[j]
        if eps2[j]:
            inv += total1 - seen
    return -1 if inv % 2 else 1


def cup(a: CohoClass, b: CohoClass) -> CohoClass:
    """Graded-commutative product, Koszul signs on the exterior parts."""
    if a.group != b.group:
        raise GroupError("classes live over different groups")
    group = a.group
    p = group.p
    terms: dict[Monomial, int] = {}
    for (e1, a1), c1 in a.terms.items():
        for (e2, a2), c2 in b.terms.items():
            sign = _koszul_sign(e1, e2)
            eps = tuple(u + v for u, v in zip(e1, e2))
            pows = tuple(u + v for u, v in zip(a1, a2))
            mon, s2 = _reduce_monomial(group, eps, pows)
            if mon is None:
                continue
            terms[mon] = terms.get(mon, 0) + sign * s2 * c1 * c2
    deg = a.degree + b.degree
    return CohoClass(group, terms, deg)


def bockstein(a: CohoClass) -> CohoClass:
    """The mod-p Bockstein: beta(y_i) = x_i iff the i-th factor has
    exponent one, beta(x_i) = 0, extended as a graded derivation."""
    group = a.group
    out = CohoClass.zero(group, a.degree + 1)
    for (eps, pows), c in a.terms.items():
        passed = 0  # odd generators the derivation has moved past
        for i, e in enumerate(eps):
            if not e:
                continue
            if group.exponents[i] == 1:
                new_eps = list(eps)
                new_eps[i] = 0
                new_pows = list(pows)
                new_pows[i] += 1
                sign = -1 if passed % 2 else 1
                out = out + CohoClass.monomial(
                    group, new_eps, new_pows, coeff=sign * c
                )
            passed += 1
    return out


def monomial_basis(group: AbelianPGroupSpec, degree: int) -> list[Monomial]:
    """Deterministically ordered monomial basis of H^degree(G)."""
    r = group.rank
    basis = []
    for eps in itertools.product(range(2), repeat=r):
        rem = degree - sum(eps)
        if rem < 0 or rem % 2:
            continue
        for pows in _compositions(rem // 2, r):
            basis.append((eps, pows))
    return sorted(basis)


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def dims(group: AbelianPGroupSpec, max_degree: int) -> list[int]:
    """dim H^n(G) for n = 0..max_degree."""
    return [len(monomial_basis(group, n)) for n in range(max_degree + 1)]


# -- Massey triple products ------------------------------------------


def _h_cyclic(order: int, p: int, d1: int, d2: int, d3: int) -> int:
    """Coefficient of the homotopy pairing on one cyclic factor.

    Nonzero only when all three input degrees are odd; the value counts
    the strictly increasing triples 0 <= i < j < k < order, i.e. C(order, 3).
    The output class sits in degree d1+d2+d3-1 (even).
    """
    if d1 % 2 and d2 % 2 and d3 % 2:
        return comb(order, 3) % p
    return 0


def _factor_split(mon: Monomial) -> list[tuple[int, int]]:
    """Per-factor (eps_i, pow_i) of a monomial, i.e. its tensor components."""
    eps, pows = mon
    return list(zip(eps, pows))


def _h_monomials(group: AbelianPGroupSpec, m1: Monomial, m2: Monomial, m3: Monomial) -> CohoClass:
    """h on a triple of monomials over the left-associated factorization
    G = (factors 1..r-1) x (factor r)."""
    r = group.rank
    p = group.p
    if r == 0:
        return CohoClass.zero(group)
    if r == 1:
        d = [_monomial_degree(m) for m in (m1, m2, m3)]
        c = _h_cyclic(group.factor_orders[0], p, *d)
        if not c:
            return CohoClass.zero(group)
        total = d[0] + d[1] + d[2] - 1
        return CohoClass.monomial(group, (total % 2,), (total // 2,), coeff=c)

    head = AbelianPGroupSpec(p, group.exponents[:-1])
    tail = AbelianPGroupSpec(p, group.exponents[-1:])

    def split(mon: Monomial):
        eps, pows = mon
        phi = (eps[:-1], pows[:-1])
        theta = (eps[-1:], pows[-1:])
        return phi, theta

    (phi1, th1), (phi2, th2), (phi3, th3) = split(m1), split(m2), split(m3)
    dphi = [_monomial_degree(m) for m in (phi1, phi2, phi3)]
    dth = [_monomial_degree(m) for m in (th1, th2, th3)]

    sign = -1 if (dphi[1] * dth[0] + dphi[2] * dth[0] + dphi[2] * dth[1]) % 2 else 1

    out = CohoClass.zero(group, _monomial_degree(m1) + _monomial_degree(m2) + _monomial_degree(m3) - 1)

    # h'(phi) (x) (theta1 theta2) theta3
    h_head = _h_monomials(head, phi1, phi2, phi3)
    th_prod = cup(
        cup(CohoClass(tail, {th1: 1}), CohoClass(tail, {th2: 1})),
        CohoClass(tail, {th3: 1}),
    )
    out = out + _tensor_join(group, h_head, th_prod).scale(sign)

    # (-1)^{|phi1|+|phi2|+|phi3|} phi1 (phi2 phi3) (x) h''(theta)
    h_tail = _h_monomials(tail, th1, th2, th3)
    phi_prod = cup(
        CohoClass(head, {phi1: 1}),
        cup(CohoClass(head, {phi2: 1}), CohoClass(head, {phi3: 1})),
    )
    s2 = -1 if sum(dphi) % 2 else 1
    out = out + _tensor_join(group, phi_prod, h_tail).scale(sign * s2)
    return out


def _tensor_join(group: AbelianPGroupSpec, head_cls: CohoClass, tail_cls: CohoClass) -> CohoClass:
    """Juxtapose classes over the leading factors and the last factor.

    Monomials are tensor products of per-factor duals in factor order,
    so joining introduces no sign.
    """
    out = CohoClass.zero(group)
    for (e1, a1), c1 in head_cls.terms.items():
        for (e2, a2), c2 in tail_cls.terms.items():
            out = out + CohoClass.monomial(group, e1 + e2, a1 + a2, coeff=c1 * c2)
    return out


def triple_h(a: CohoClass, b: CohoClass, c: CohoClass) -> CohoClass:
    """Trilinear extension of the homotopy pairing h to class sums."""
    group = a.group
    out = CohoClass.zero(group, a.degree + b.degree + c.degree - 1)
    for m1, c1 in a.terms.items():
        for m2, c2 in b.terms.items():
            for m3, c3 in c.terms.items():
                out = out + _h_monomials(group, m1, m2, m3).scale(c1 * c2 * c3)
    return out


@dataclass
class MasseyResult:
    representative: CohoClass
    indeterminacy_basis: list[CohoClass]
    defined: bool = True

    def contains_zero(self) -> bool:
        """True when the representative lies in the indeterminacy span."""
        if self.representative.is_zero():
            return True
        group = self.representative.group
        deg = self.representative.degree
        basis = monomial_basis(group, deg)
        index = {m: i for i, m in enumerate(basis)}

        def vec(cls):
            v = np.zeros(len(basis), dtype=np.int64)
            for m, c in cls.terms.items():
                v[index[m]] = c
            return v

        from .fplinalg import rank as fp_rank

        span = [vec(c) for c in self.indeterminacy_basis]
        if not span:
            return False
        m = np.array(span)
        return fp_rank(m, group.p) == fp_rank(
            np.concatenate([m, vec(self.representative).reshape(1, -1)]), group.p
        )


def massey_triple(a: CohoClass, b: CohoClass, c: CohoClass) -> MasseyResult:
    """The Massey triple product <a, b, c>.

    Defined exactly when ab = 0 and bc = 0 (cochains on the minimal
    resolution are cohomology, so vanishing is exact).  The returned
    representative is h(a, b, c); the indeterminacy basis spans
    a*H^{|b|+|c|-1} + H^{|a|+|b|-1}*c.
    """
    if a.group != b.group or b.group != c.group:
        raise GroupError("classes live over different groups")
    if not cup(a, b).is_zero() or not cup(b, c).is_zero():
        raise MasseyUndefinedError(
            "Massey product undefined: one of the adjacent products is nonzero"
        )
    rep = triple_h(a, b, c)
    indet = indeterminacy_basis(a, b, c)
    return MasseyResult(representative=rep, indeterminacy_basis=indet, defined=True)


def indeterminacy_basis(a: CohoClass, b: CohoClass, c: CohoClass) -> list[CohoClass]:
    group = a.group
    out = []
    d_right = b.degree + c.degree - 1
    d_left = a.degree + b.degree - 1
    if d_right >= 0:
        for mon in monomial_basis(group, d_right):
            prod = cup(a, CohoClass(group, {mon: 1}))
            if not prod.is_zero():
                out.append(prod)
    if d_left >= 0:
        for mon in monomial_basis(group, d_left):
            prod = cup(CohoClass(group, {mon: 1}), c)
            if not prod.is_zero():
                out.append(prod)
    return out


# -- vector-space views (used by the spectral sequence engine) --------


class RingContext:
    """Cached basis/matrix views of H*(G) as F_p vector spaces."""

    def __init__(self, group: AbelianPGroupSpec):
        self.group = group
        self.p = group.p
        self._bases: dict[int, list[Monomial]] = {}
        self._index: dict[int, dict[Monomial, int]] = {}

    def basis(self, degree: int) -> list[Monomial]:
        if degree not in self._bases:
            b = monomial_basis(self.group, degree) if degree >= 0 else []
            self._bases[degree] = b
            self._index[degree] = {m: i for i, m in enumerate(b)}
        return self._bases[degree]

    def dim(self, degree: int) -> int:
        return len(self.basis(degree))

    def to_vector(self, cls: CohoClass, degree: int | None = None) -> np.ndarray:
        degree = cls.degree if degree is None else degree
        self.basis(degree)
        v = np.zeros(self.dim(degree), dtype=np.int64)
        for m, c in cls.terms.items():
            v[self._index[degree][m]] = c
        return v

    def from_vector(self, v, degree: int) -> CohoClass:
        basis = self.basis(degree)
        terms = {m: int(c) for m, c in zip(basis, np.asarray(v)) if c % self.p}
        return CohoClass(self.group, terms, degree)

    def multiplication_matrix(self, cls: CohoClass, degree: int) -> np.ndarray:
        """Matrix of (left) multiplication by cls: H^degree -> H^{degree+|cls|};
        rows index the target basis, columns the source basis."""
        rows = self.dim(degree + cls.degree)
        cols = self.dim(degree)
        m = np.zeros((rows, cols), dtype=np.int64)
        for j, mon in enumerate(self.basis(degree)):
            prod = cup(cls, CohoClass(self.group, {mon: 1}))
            m[:, j] = self.to_vector(prod, degree + cls.degree)
        return m
