"""Finite groups as multiplication tables, and group-algebra arithmetic.

Elements are integer indices into a fixed table.  Abelian p-groups carry
a mixed-radix encoding (first factor most significant) that every other
module relies on, so the same element index means the same group element
in the resolutions, the cocycle construction and the oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np

__all__ = [
    "GroupError",
    "FiniteGroupTable",
    "AbelianPGroupSpec",
    "GroupAlgebraElement",
    "ga_multiply",
    "cyclic_group",
    "direct_product",
]


class GroupError(ValueError):
    pass


AXIOM_CHECK_MAX_ORDER = 64


@dataclass
class FiniteGroupTable:
    """A finite group given by its full multiplication table.

    mul[a, b] is the index of the product ab; identity is index of 1.
    Associativity is checked exhaustively for orders <= 64 and on random
    triples above that (the cocycle constructions guarantee it anyway).
    """

    mul: np.ndarray
    name: str = ""
    identity: int = field(init=False, default=0)
    inv: np.ndarray = field(init=False, default=None)

    def __post_init__(self):
        self.mul = np.asarray(self.mul, dtype=np.int64)
        n = self.order
        if self.mul.shape != (n, n):
            raise GroupError("multiplication table must be square")
        ident = [e for e in range(n) if (self.mul[e] == np.arange(n)).all()]
        if not ident or not (self.mul[:, ident[0]] == np.arange(n)).all():
            raise GroupError("no two-sided identity element")
        self.identity = ident[0]
        inv = np.full(n, -1, dtype=np.int64)
        for a in range(n):
            hits = np.nonzero(self.mul[a] == self.identity)[0]
            if hits.size != 1 or self.mul[hits[0], a] != self.identity:
                raise GroupError(f"element {a} has no unique two-sided inverse")
            inv[a] = hits[0]
        self.inv = inv
        self._check_associativity()

    @property
    def order(self) -> int:
        return self.mul.shape[0]

    def _check_associativity(self):
        n = self.order
        if n <= AXIOM_CHECK_MAX_ORDER:
            lhs = self.mul[self.mul[:, :, None], np.arange(n)[None, None, :]]
            rhs = self.mul[np.arange(n)[:, None, None], self.mul[None, :, :]]
            if not (lhs == rhs).all():
                raise GroupError("multiplication table is not associative")
        else:
            rng = np.random.RandomState(0)
            for _ in range(200):
                a, b, c = rng.randint(0, n, size=3)
                if self.mul[self.mul[a, b], c] != self.mul[a, self.mul[b, c]]:
                    raise GroupError("multiplication table is not associative")

    def multiply(self, a: int, b: int) -> int:
        return int(self.mul[a, b])

    def inverse(self, a: int) -> int:
        return int(self.inv[a])

    def is_abelian(self) -> bool:
        return (self.mul == self.mul.T).all()

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.multiply(x, a)
            k += 1
        return k

    def centralizes(self, a: int) -> bool:
        return (self.mul[a] == self.mul[:, a]).all()

    def commutator_subgroup(self) -> set[int]:
        n = self.order
        comms = {
            self.multiply(self.multiply(a, b), self.inv[self.multiply(b, a)])
            for a in range(n)
            for b in range(n)
        }
        # close under multiplication
        frontier = set(comms)
        while frontier:
            new = {
                self.multiply(x, y) for x in frontier for y in comms
            } - comms
            comms |= new
            frontier = new
        return comms


def cyclic_group(n: int) -> FiniteGroupTable:
    """Z/n with element i = g^i for the generator g = 1."""
    idx = np.arange(n)
    return FiniteGroupTable((idx[:, None] + idx[None, :]) % n, name=f"C{n}")


def direct_product(a: FiniteGroupTable, b: FiniteGroupTable) -> FiniteGroupTable:
    """A x B with index (i, j) -> i*|B| + j (first factor most significant)."""
    na, nb = a.order, b.order
    ia, ja = np.divmod(np.arange(na * nb), nb)
    mul = (a.mul[ia[:, None], ia[None, :]] * nb) + b.mul[ja[:, None], ja[None, :]]
    return FiniteGroupTable(mul, name=f"{a.name}x{b.name}")


@dataclass(frozen=True)
class AbelianPGroupSpec:
    """C_{p^m1} + ... + C_{p^mr}, the quotient of the extensions we study."""

    p: int
    exponents: tuple[int, ...]

    def __post_init__(self):
        if self.p < 2:
            raise GroupError(f"p must be a prime, got {self.p}")
        object.__setattr__(self, "exponents", tuple(int(m) for m in self.exponents))
        if any(m < 1 for m in self.exponents):
            raise GroupError("all exponents must be >= 1")

    @property
    def rank(self) -> int:
        return len(self.exponents)

    @property
    def factor_orders(self) -> tuple[int, ...]:
        return tuple(self.p**m for m in self.exponents)

    @property
    def order(self) -> int:
        return int(np.prod([1] + list(self.factor_orders)))

    def encode(self, coords) -> int:
        """Mixed-radix index of (a_1, ..., a_r), first factor most significant."""
        idx = 0
        for a, n in zip(coords, self.factor_orders):
            idx = idx * n + (int(a) % n)
        return idx

    def decode(self, idx: int) -> tuple[int, ...]:
        coords = []
        for n in reversed(self.factor_orders):
            coords.append(idx % n)
            idx //= n
        return tuple(reversed(coords))

    def group_table(self) -> FiniteGroupTable:
        if self.rank == 0:
            return FiniteGroupTable(np.zeros((1, 1), dtype=np.int64), name="1")
        tables = [cyclic_group(n) for n in self.factor_orders]
        g = reduce(direct_product, tables)
        g.name = "+".join(f"C{n}" for n in self.factor_orders)
        return g


@dataclass
class GroupAlgebraElement:
    """Element of F_p[G], stored as a dense coefficient vector over G."""

    group: FiniteGroupTable
    p: int
    vec: np.ndarray = None

    def __post_init__(self):
        if self.vec is None:
            self.vec = np.zeros(self.group.order, dtype=np.int64)
        self.vec = np.asarray(self.vec, dtype=np.int64) % self.p
        if self.vec.shape != (self.group.order,):
            raise GroupError("coefficient vector length must equal the group order")

    @classmethod
    def from_coeffs(cls, group, p, coeffs: dict[int, int]) -> "GroupAlgebraElement":
        vec = np.zeros(group.order, dtype=np.int64)
        for g, c in coeffs.items():
            vec[g] = c % p
        return cls(group, p, vec)

    @classmethod
    def basis_element(cls, group, p, g: int, coeff: int = 1) -> "GroupAlgebraElement":
        return cls.from_coeffs(group, p, {g: coeff})

    @classmethod
    def one(cls, group, p) -> "GroupAlgebraElement":
        return cls.basis_element(group, p, group.identity)

    @classmethod
    def norm(cls, group, p) -> "GroupAlgebraElement":
        return cls(group, p, np.ones(group.order, dtype=np.int64))

    @property
    def coeffs(self) -> dict[int, int]:
        return {int(g): int(c) for g, c in enumerate(self.vec) if c}

    def is_zero(self) -> bool:
        return not self.vec.any()

    def augmentation(self) -> int:
        return int(self.vec.sum() % self.p)

    def __add__(self, other):
        self._check(other)
        return GroupAlgebraElement(self.group, self.p, (self.vec + other.vec) % self.p)

    def __sub__(self, other):
        self._check(other)
        return GroupAlgebraElement(self.group, self.p, (self.vec - other.vec) % self.p)

    def __neg__(self):
        return GroupAlgebraElement(self.group, self.p, (-self.vec) % self.p)

    def scale(self, c: int) -> "GroupAlgebraElement":
        return GroupAlgebraElement(self.group, self.p, (self.vec * (c % self.p)) % self.p)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        return ga_multiply(self, other)

    def __eq__(self, other):
        return (
            isinstance(other, GroupAlgebraElement)
            and self.group is other.group
            and self.p == other.p
            and (self.vec == other.vec).all()
        )

    def _check(self, other):
        if self.group is not other.group or self.p != other.p:
            raise GroupError("group algebra elements live over different groups")

    def __repr__(self):
        terms = [f"{c}*g{g}" for g, c in sorted(self.coeffs.items())]
        return " + ".join(terms) if terms else "0"


def ga_multiply(a: GroupAlgebraElement, b: GroupAlgebraElement) -> GroupAlgebraElement:
    """Convolution product in F_p[G]."""
    a._check(b)
    out = np.zeros(a.group.order, dtype=np.int64)
    for g, c in enumerate(a.vec):
        if c:
            np.add.at(out, a.group.mul[g], c * b.vec)
    return GroupAlgebraElement(a.group, a.p, out % a.p)
