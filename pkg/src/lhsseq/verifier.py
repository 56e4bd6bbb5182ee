"""The honest double complex of a central extension, from bar resolutions.

E_0^{i,j} = Hom_E(P_i (x) Q_j, F_p) with P the bar resolution of the
quotient G and Q the bar resolution of the extension group E, the group
acting diagonally through the projection.  A cochain is a dense vector
over the free E-basis {g (1,s_1..s_i) (x) (1,e_1..e_j)}, indexed by
(g, P-tuple, Q-tuple) in mixed radix.  All products and differentials
evaluate by index arithmetic on those tuples, so the coboundary
formulas of the two cup-1 products and the t^n ladder recursion can be
machine-checked exactly against random cochains.

Convention notes (the self-test suite pins these):
  * d_1 is the adjoint of d^P (x) 1; d_0 of (-1)^i (1 (x) d^Q);
  * cochain pairs evaluate with no Koszul sign: (phi (x) theta)(x (x) y)
    = phi(x) theta(y) (the sign variant breaks the derivation property
    of d_0/d_1 over the cup product, which the ladder identities need);
  * the middle-swap tau carries (-1)^{(degree swapped P piece)(degree Q piece)}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .extensions import (
    ExtensionSpec,
    build_extension_group,
    extension_projection,
    kernel_injection,
)
from .fplinalg import solve_linear, subquotient_of
from .groups import GroupError
from .resolutions import BudgetExceeded, DEFAULT_BASIS_BUDGET

__all__ = [
    "BarDoubleComplex",
    "E0Cochain",
    "LadderData",
    "build_double_complex",
    "check_lemma1",
    "build_eta_family",
    "PRODUCT_KINDS",
]

PRODUCT_KINDS = ("cup", "wedge", "cup10", "cup01", "twist")


@dataclass
class E0Cochain:
    complex: "BarDoubleComplex"
    i: int
    j: int
    values: np.ndarray

    def is_zero(self) -> bool:
        return not self.values.any()

    def max_residual(self) -> int:
        p = self.complex.p
        if self.is_zero():
            return 0
        r = self.values % p
        return int(np.minimum(r, p - r).max())

    def __add__(self, other):
        self._check(other)
        return E0Cochain(self.complex, self.i, self.j,
                         (self.values + other.values) % self.complex.p)

    def __sub__(self, other):
        self._check(other)
        return E0Cochain(self.complex, self.i, self.j,
                         (self.values - other.values) % self.complex.p)

    def scale(self, c: int):
        return E0Cochain(self.complex, self.i, self.j,
                         (self.values * c) % self.complex.p)

    def _check(self, other):
        if (self.i, self.j) != (other.i, other.j):
            raise GroupError("cochain bidegrees differ")

    @property
    def total_degree(self) -> int:
        return self.i + self.j


class BarDoubleComplex:
    """Cochain arithmetic on Hom_E(P_i (x) Q_j, F_p)."""

    def __init__(self, spec: ExtensionSpec, bound: int,
                 budget: int = DEFAULT_BASIS_BUDGET):
        self.spec = spec
        self.p = spec.p
        self.bound = bound
        self.G = spec.quotient.group_table()
        self.E = build_extension_group(spec)
        self.pi = extension_projection(spec, self.E.order)
        self.iota = kernel_injection(spec)
        self.ng = self.G.order
        self.ne = self.E.order
        total = sum(
            self.dim(i, j) for i in range(bound + 1) for j in range(bound + 1 - i)
        )
        if total > budget:
            raise BudgetExceeded(
                f"double complex through degree {bound} needs {total} basis "
                f"elements, budget is {budget}"
            )
        self._digits: dict = {}
        self._dmat: dict = {}

    # -- bases ---------------------------------------------------------

    def dim(self, i: int, j: int) -> int:
        if i < 0 or j < 0:
            return 0
        return self.ng ** (i + 1) * self.ne**j

    def zero(self, i: int, j: int) -> E0Cochain:
        return E0Cochain(self, i, j, np.zeros(self.dim(i, j), dtype=np.int64))

    def random_cochain(self, rng, i: int, j: int) -> E0Cochain:
        return E0Cochain(self, i, j, rng.randint(0, self.p, size=self.dim(i, j)))

    def unit(self) -> E0Cochain:
        return E0Cochain(self, 0, 0, np.ones(self.ng, dtype=np.int64))

    def _split_index(self, i: int, j: int):
        """(g, p_tuple, q_tuple) arrays for all indices at (i, j)."""
        key = ("split", i, j)
        if key not in self._digits:
            n = self.dim(i, j)
            qsize = self.ne**j
            psize = self.ng**i
            idx = np.arange(n)
            q = idx % qsize
            rest = idx // qsize
            s = rest % psize
            g = rest // psize
            self._digits[key] = (g, s, q)
        return self._digits[key]

    def _tuple_digits(self, base: int, length: int) -> np.ndarray:
        key = ("dig", base, length)
        if key not in self._digits:
            n = base**length
            out = np.empty((n, length), dtype=np.int64)
            idx = np.arange(n)
            for k in range(length - 1, -1, -1):
                out[:, k] = idx % base
                idx = idx // base
            self._digits[key] = out
        return self._digits[key]

    def index(self, g: int, s: tuple, e: tuple) -> int:
        i, j = len(s), len(e)
        sidx = 0
        for v in s:
            sidx = sidx * self.ng + v
        eidx = 0
        for v in e:
            eidx = eidx * self.ne + v
        return (g * self.ng**i + sidx) * self.ne**j + eidx

    # -- differentials ----------------------------------------------------

    def _d0_terms(self, i: int, j: int):
        """Gather terms for d_0 : (i, j) -> (i, j+1), evaluated on the
        target basis: list of (coeff, source index array)."""
        jt = j + 1
        g, s, q = self._split_index(i, jt)
        qd = self._tuple_digits(self.ne, jt)
        digits = qd[q]
        epow = self.ne ** np.arange(jt - 1)[::-1] if jt > 1 else np.ones(0, dtype=np.int64)
        sign0 = -1 if i % 2 else 1
        terms = []
        psize = self.ng**i
        qsize = self.ne ** (jt - 1)

        def pack(gg, ss, qq):
            return (gg * psize + ss) * qsize + qq

        # face 0: translate by e_1
        e1 = digits[:, 0]
        g0 = self.G.mul[self.G.inv[self.pi[e1]], g]
        rel = self.E.mul[self.E.inv[e1][:, None], digits[:, 1:]]
        q0 = rel @ epow if jt > 1 else np.zeros(len(q), dtype=np.int64)
        terms.append((sign0, pack(g0, s, q0)))
        # inner and last faces: drop entry k
        for k in range(1, jt + 1):
            keep = [c for c in range(jt) if c != k - 1]
            qk = digits[:, keep] @ epow if keep else np.zeros(len(q), dtype=np.int64)
            coeff = sign0 * (-1) ** k
            terms.append((coeff, pack(g, s, qk)))
        return terms

    def _d1_terms(self, i: int, j: int):
        """Gather terms for d_1 : (i, j) -> (i+1, j)."""
        it = i + 1
        g, s, q = self._split_index(it, j)
        sd = self._tuple_digits(self.ng, it)
        digits = sd[s]
        ppow = self.ng ** np.arange(it - 1)[::-1] if it > 1 else np.ones(0, dtype=np.int64)
        terms = []
        psize = self.ng ** (it - 1)
        qsize = self.ne**j

        def pack(gg, ss, qq):
            return (gg * psize + ss) * qsize + qq

        s1 = digits[:, 0]
        g0 = self.G.mul[g, s1]
        rel = self.G.mul[self.G.inv[s1][:, None], digits[:, 1:]]
        s0 = rel @ ppow if it > 1 else np.zeros(len(s), dtype=np.int64)
        terms.append((1, pack(g0, s0, q)))
        for k in range(1, it + 1):
            keep = [c for c in range(it) if c != k - 1]
            sk = digits[:, keep] @ ppow if keep else np.zeros(len(s), dtype=np.int64)
            terms.append(((-1) ** k, pack(g, sk, q)))
        return terms

    def d0(self, c: E0Cochain) -> E0Cochain:
        out = np.zeros(self.dim(c.i, c.j + 1), dtype=np.int64)
        for coeff, src in self._d0_terms(c.i, c.j):
            out += coeff * c.values[src]
        return E0Cochain(self, c.i, c.j + 1, out % self.p)

    def d1(self, c: E0Cochain) -> E0Cochain:
        out = np.zeros(self.dim(c.i + 1, c.j), dtype=np.int64)
        for coeff, src in self._d1_terms(c.i, c.j):
            out += coeff * c.values[src]
        return E0Cochain(self, c.i + 1, c.j, out % self.p)

    def d0_matrix(self, i: int, j: int) -> sp.csr_matrix:
        key = ("d0", i, j)
        if key not in self._dmat:
            self._dmat[key] = self._terms_to_matrix(
                self._d0_terms(i, j), self.dim(i, j + 1), self.dim(i, j)
            )
        return self._dmat[key]

    def d1_matrix(self, i: int, j: int) -> sp.csr_matrix:
        key = ("d1", i, j)
        if key not in self._dmat:
            self._dmat[key] = self._terms_to_matrix(
                self._d1_terms(i, j), self.dim(i + 1, j), self.dim(i, j)
            )
        return self._dmat[key]

    def _terms_to_matrix(self, terms, rows, cols) -> sp.csr_matrix:
        row_idx = np.concatenate([np.arange(rows)] * len(terms))
        col_idx = np.concatenate([src for _, src in terms])
        data = np.concatenate(
            [np.full(rows, coeff % self.p, dtype=np.int64) for coeff, _ in terms]
        )
        m = sp.coo_matrix((data, (row_idx, col_idx)), shape=(rows, cols))
        m = m.tocsr()
        m.data %= self.p
        m.eliminate_zeros()
        return m

    def complex_identity_residual(self, max_total: int | None = None) -> int:
        """Exhaustive check of d0^2 = d1^2 = d0 d1 + d1 d0 = 0 on every
        stored bidegree, via sparse matrix products."""
        top = self.bound if max_total is None else max_total
        worst = 0
        for i in range(top + 1):
            for j in range(top + 1 - i):
                prods = [
                    self.d0_matrix(i, j + 1) @ self.d0_matrix(i, j),
                    self.d1_matrix(i + 1, j) @ self.d1_matrix(i, j),
                    self.d0_matrix(i + 1, j) @ self.d1_matrix(i, j)
                    + self.d1_matrix(i, j + 1) @ self.d0_matrix(i, j),
                ]
                for m in prods:
                    m = m.tocsr()
                    m.data %= self.p
                    if m.nnz and m.data.any():
                        r = m.data % self.p
                        if r.any():
                            worst = max(worst, int(np.minimum(r[r > 0], self.p - r[r > 0]).max()))
        return worst

    # -- products ----------------------------------------------------------

    def _prefix(self, tuples: np.ndarray, base: int, length: int, keep: int):
        return tuples // base ** (length - keep)

    def _anchor(self, digits: np.ndarray, a: int, identity: int):
        if a == 0:
            return np.full(digits.shape[0], identity, dtype=np.int64)
        return digits[:, a - 1]

    def _rel_suffix(self, digits, anchor, start, stop, base_pows, mul, inv):
        """Mixed-radix index of (anchor^{-1} d_start, ..., anchor^{-1} d_{stop-1})."""
        if start >= stop:
            return np.zeros(digits.shape[0], dtype=np.int64)
        rel = mul[inv[anchor][:, None], digits[:, start:stop]]
        return rel @ base_pows[: stop - start][::-1]

    def product(self, a: E0Cochain, b: E0Cochain, kind: str) -> E0Cochain:
        """One of the five chain-level products; see the module docstring.

        Bidegree shifts: cup/wedge/twist (0,0), cup10 (-1,0), cup01 (0,-1).
        """
        if kind not in PRODUCT_KINDS:
            raise GroupError(f"unknown product kind {kind!r}")
        i1, j1, i2, j2 = a.i, a.j, b.i, b.j
        if kind == "cup10":
            ti, tj = i1 + i2 - 1, j1 + j2
        elif kind == "cup01":
            ti, tj = i1 + i2, j1 + j2 - 1
        else:
            ti, tj = i1 + i2, j1 + j2
        if ti < 0 or tj < 0:
            raise GroupError("product lands in a negative bidegree")
        if ti + tj > self.bound + 2:
            raise GroupError("product exceeds the stored bidegree bound")
        p = self.p
        ng, ne = self.ng, self.ne
        g, s, q = self._split_index(ti, tj)
        sdig = self._tuple_digits(ng, ti)[s] if ti else np.zeros((len(g), 0), dtype=np.int64)
        qdig = self._tuple_digits(ne, tj)[q] if tj else np.zeros((len(g), 0), dtype=np.int64)
        gpow = ng ** np.arange(max(ti, 1))
        epow = ne ** np.arange(max(tj, 1))
        out = np.zeros(len(g), dtype=np.int64)
        Gm, Gi = self.G.mul, self.G.inv
        Em, Ei = self.E.mul, self.E.inv
        eg, ee = self.G.identity, self.E.identity

        def pvalue(c: E0Cochain, gg, ss, qq):
            return c.values[(gg * ng**c.i + ss) * ne**c.j + qq]

        if kind in ("cup", "wedge", "twist"):
            a_split, b_split = i1, j1
            if kind == "wedge":
                a_split, b_split = i2, j1
            if kind == "twist":
                a_split, b_split = i2, j2
            asp, bsp = a_split, b_split
            s_anchor = self._anchor(sdig, asp, eg)
            e_anchor = self._anchor(qdig, bsp, ee)
            s_pre = self._prefix(s, ng, ti, asp)
            e_pre = self._prefix(q, ne, tj, bsp)
            s_rel = self._rel_suffix(sdig, s_anchor, asp, ti, gpow, Gm, Gi)
            e_rel = self._rel_suffix(qdig, e_anchor, bsp, tj, epow, Em, Ei)
            pi_anchor = self.pi[e_anchor]
            if kind == "cup":
                sign = -1 if (i2 * j1) % 2 else 1
                va = pvalue(a, g, s_pre, e_pre)
                gb = Gm[Gi[pi_anchor], Gm[g, s_anchor]]
                vb = pvalue(b, gb, s_rel, e_rel)
            elif kind == "wedge":
                sign = -1 if (i2 * i1 + i2 * j1) % 2 else 1
                va = pvalue(a, Gm[g, s_anchor], s_rel, e_pre)
                vb = pvalue(b, Gm[Gi[pi_anchor], g], s_pre, e_rel)
            else:  # twist: (-1)^{|P1||P2| + |Q1||Q2| + |P1||Q2|}
                sign = -1 if (i1 * i2 + j1 * j2 + i2 * j1) % 2 else 1
                va = pvalue(a, Gm[Gi[pi_anchor], Gm[g, s_anchor]], s_rel, e_rel)
                vb = pvalue(b, g, s_pre, e_pre)
            out = (out + sign * va * vb) % p
            return E0Cochain(self, ti, tj, out)

        if kind == "cup10":
            # Steenrod split on the P side at (aa < cc), plain split on Q
            bsp = j1
            e_anchor = self._anchor(qdig, bsp, ee)
            e_pre = self._prefix(q, ne, tj, bsp)
            e_rel = self._rel_suffix(qdig, e_anchor, bsp, tj, epow, Em, Ei)
            pi_anchor = self.pi[e_anchor]
            for aa in range(0, i1):
                cc = aa + i2
                if cc > ti or cc <= aa:
                    continue
                # outer piece: digits 0..aa-1 then cc..ti-1 (i1 digits)
                outer = np.zeros(len(g), dtype=np.int64)
                # label digits s_1..s_aa then s_cc..s_ti (digit index m-1 for s_m)
                for k in list(range(aa)) + list(range(cc - 1, ti)):
                    outer = outer * ng + sdig[:, k]
                s_anchor = self._anchor(sdig, aa, eg)
                inner = self._rel_suffix(sdig, s_anchor, aa, cc, gpow, Gm, Gi)
                fexp = ti + (ti - aa - 1) * (cc - aa - 1)
                sign = (-1) ** (fexp + (cc - aa) * bsp)
                va = pvalue(a, g, outer, e_pre)
                gb = Gm[Gi[pi_anchor], Gm[g, s_anchor]]
                vb = pvalue(b, gb, inner, e_rel)
                out = (out + sign * va * vb) % p
            return E0Cochain(self, ti, tj, out)

        # cup01: plain split on P at i2, Steenrod split on Q at (bb < dd)
        asp = i2
        s_anchor = self._anchor(sdig, asp, eg)
        s_pre = self._prefix(s, ng, ti, asp)
        s_rel = self._rel_suffix(sdig, s_anchor, asp, ti, gpow, Gm, Gi)
        for bb in range(0, j1):
            dd = bb + j2
            if dd > tj or dd <= bb:
                continue
            outer = np.zeros(len(g), dtype=np.int64)
            for k in list(range(bb)) + list(range(dd - 1, tj)):
                outer = outer * ne + qdig[:, k]
            e_anchor = self._anchor(qdig, bb, ee)
            inner = self._rel_suffix(qdig, e_anchor, bb, dd, epow, Em, Ei)
            pi_anchor = self.pi[e_anchor]
            fexp = tj + (tj - bb - 1) * (dd - bb - 1)
            sign = (-1) ** (ti + fexp + asp * (ti - asp) + asp * j1)
            va = pvalue(a, Gm[g, s_anchor], s_rel, outer)
            vb = pvalue(b, Gm[Gi[pi_anchor], g], s_pre, inner)
            out = (out + sign * va * vb) % p
        return E0Cochain(self, ti, tj, out)


def build_double_complex(spec: ExtensionSpec, bound: int,
                         budget: int = DEFAULT_BASIS_BUDGET) -> BarDoubleComplex:
    return BarDoubleComplex(spec, bound, budget=budget)


# -- the coboundary formulas of the cup-1 products -----------------------


def check_lemma1(cx: BarDoubleComplex, phi: E0Cochain, theta: E0Cochain):
    """Residuals of the four coboundary formulas; all must vanish.

    Returns a list of (name, residual cochain or None when the formula
    has no valid bidegree instance for this pair).
    """
    p = cx.p
    sphi = -1 if (phi.total_degree % 2) else 1
    stw = -1 if (phi.total_degree * theta.total_degree) % 2 else 1
    out = []
    if phi.i + theta.i >= 1:
        c10 = cx.product(phi, theta, "cup10")
        r = cx.d0(c10) + cx.product(cx.d0(phi), theta, "cup10") + cx.product(
            phi, cx.d0(theta), "cup10"
        ).scale(sphi)
        out.append(("d0-cup10", r))
        r = (
            cx.d1(c10)
            + cx.product(cx.d1(phi), theta, "cup10")
            + cx.product(phi, cx.d1(theta), "cup10").scale(sphi)
            - cx.product(phi, theta, "cup")
            + cx.product(phi, theta, "wedge")
        )
        out.append(("d1-cup10", r))
    else:
        out.extend([("d0-cup10", None), ("d1-cup10", None)])
    if phi.j + theta.j >= 1:
        c01 = cx.product(phi, theta, "cup01")
        r = (
            cx.d0(c01)
            + cx.product(cx.d0(phi), theta, "cup01")
            + cx.product(phi, cx.d0(theta), "cup01").scale(sphi)
            - cx.product(phi, theta, "wedge")
            + cx.product(theta, phi, "cup").scale(stw)
        )
        out.append(("d0-cup01", r))
        r = cx.d1(c01) + cx.product(cx.d1(phi), theta, "cup01") + cx.product(
            phi, cx.d1(theta), "cup01"
        ).scale(sphi)
        out.append(("d1-cup01", r))
    else:
        out.extend([("d0-cup01", None), ("d1-cup01", None)])
    return out


def derivation_residual(cx: BarDoubleComplex, phi: E0Cochain, theta: E0Cochain):
    """d(phi cup theta) - (d phi) cup theta - (-1)^{|phi|} phi cup (d theta)
    for both differentials: the convention self-test."""
    sphi = -1 if phi.total_degree % 2 else 1
    c = cx.product(phi, theta, "cup")
    r0 = cx.d0(c) - cx.product(cx.d0(phi), theta, "cup") - cx.product(
        phi, cx.d0(theta), "cup"
    ).scale(sphi)
    r1 = cx.d1(c) - cx.product(cx.d1(phi), theta, "cup") - cx.product(
        phi, cx.d1(theta), "cup"
    ).scale(sphi)
    return max(r0.max_residual(), r1.max_residual())


def twist_residual(cx: BarDoubleComplex, phi: E0Cochain, theta: E0Cochain):
    """The third diagonal's product equals (-1)^{|phi||theta|} theta cup phi."""
    s = -1 if (phi.total_degree * theta.total_degree) % 2 else 1
    r = cx.product(phi, theta, "twist") - cx.product(theta, phi, "cup").scale(s)
    return r.max_residual()


# -- the ladder and the t^n recursion -------------------------------------


@dataclass
class LadderData:
    complex: BarDoubleComplex
    u: E0Cochain
    t: E0Cochain
    theta: E0Cochain
    xi_cochain: E0Cochain
    eta1: E0Cochain
    eta2: E0Cochain
    xi_prime_cochain: E0Cochain

    def residuals(self) -> dict[str, int]:
        cx = self.complex
        return {
            "d0(u)": cx.d0(self.u).max_residual(),
            "d1(u)-d0(theta)": (cx.d1(self.u) - cx.d0(self.theta)).max_residual(),
            "d0(xi)": cx.d0(self.xi_cochain).max_residual(),
            "d1(xi)": cx.d1(self.xi_cochain).max_residual(),
            "d0(t)": cx.d0(self.t).max_residual(),
            "d1(t)-d0(eta1)": (cx.d1(self.t) - cx.d0(self.eta1)).max_residual(),
            "d1(eta1)-d0(eta2)": (cx.d1(self.eta1) - cx.d0(self.eta2)).max_residual(),
            "d0(xi')": cx.d0(self.xi_prime_cochain).max_residual(),
            "d1(xi')": cx.d1(self.xi_prime_cochain).max_residual(),
        }


def _standard_kernel_cochain(cx: BarDoubleComplex, degree: int) -> dict[int, int]:
    """Values of the standard generator cochain on kernel bar tuples.

    Degree 1: c -> c mod p.  Degree 2: the carry cocycle of the kernel.
    Returns {flat index at (0, degree): value} over kernel-only tuples.
    """
    spec = cx.spec
    pk = spec.kernel_order
    p = spec.p
    out = {}
    if degree == 1:
        for c in range(pk):
            idx = cx.index(cx.G.identity, (), (int(cx.iota[c]),))
            out[idx] = c % p
    elif degree == 2:
        # label (iota(a), iota(a+b)) is the homogeneous form of the
        # inhomogeneous pair (a, b), where the carry cocycle lives
        for a in range(pk):
            for b in range(pk):
                idx = cx.index(
                    cx.G.identity, (), (int(cx.iota[a]), int(cx.iota[(a + b) % pk]))
                )
                out[idx] = 1 if a + b >= pk else 0
    else:
        raise GroupError("only degrees one and two have standard generators")
    return out


DENSE_SOLVE_CAP = 50_000_000


def _solve_with_constraints(cx, mat: sp.csr_matrix, extra_rows: dict[int, int]):
    """Solve [mat; delta rows] x = [0; values] deterministically."""
    if mat.shape[0] * mat.shape[1] > DENSE_SOLVE_CAP:
        raise BudgetExceeded(
            "ladder solve needs a dense elimination beyond the size cap; "
            "use a smaller extension for ladder-based suites"
        )
    dense = mat.toarray() % cx.p
    rows = [dense]
    tgt = [np.zeros(dense.shape[0], dtype=np.int64)]
    cols = dense.shape[1]
    e_rows = np.zeros((len(extra_rows), cols), dtype=np.int64)
    e_tgt = np.zeros(len(extra_rows), dtype=np.int64)
    for k, (idx, val) in enumerate(sorted(extra_rows.items())):
        e_rows[k, idx] = 1
        e_tgt[k] = val
    rows.append(e_rows)
    tgt.append(e_tgt)
    sol = solve_linear(np.concatenate(rows), np.concatenate(tgt), cx.p)
    if sol is None:
        raise GroupError("ladder solve failed: convention error upstream")
    return sol


def build_ladder(cx: BarDoubleComplex) -> LadderData:
    """Select u, t by their restriction to kernel-only tuples and solve
    the ladder equations with free variables zeroed."""
    if cx.bound < 3:
        raise GroupError("the ladder needs bidegrees through total degree 3")
    p = cx.p
    u_vals = _solve_with_constraints(cx, cx.d0_matrix(0, 1), _standard_kernel_cochain(cx, 1))
    u = E0Cochain(cx, 0, 1, u_vals)
    t_vals = _solve_with_constraints(cx, cx.d0_matrix(0, 2), _standard_kernel_cochain(cx, 2))
    t = E0Cochain(cx, 0, 2, t_vals)
    # theta: d0(theta) = d1(u)
    theta_vals = solve_linear(cx.d0_matrix(1, 0).toarray(), cx.d1(u).values, p)
    if theta_vals is None:
        raise GroupError("no theta with d0(theta) = d1(u)")
    theta = E0Cochain(cx, 1, 0, theta_vals)
    xi_cochain = cx.d1(theta)
    # (eta1, eta2): d0(eta1) = d1(t), d1(eta1) = d0(eta2), jointly
    d0_11 = cx.d0_matrix(1, 1).toarray()
    d1_11 = cx.d1_matrix(1, 1).toarray()
    d0_20 = cx.d0_matrix(2, 0).toarray()
    n1, n2 = cx.dim(1, 1), cx.dim(2, 0)
    top = np.concatenate([d0_11, np.zeros((d0_11.shape[0], n2), dtype=np.int64)], axis=1)
    bot = np.concatenate([d1_11, (-d0_20) % p], axis=1)
    rhs = np.concatenate([cx.d1(t).values, np.zeros(bot.shape[0], dtype=np.int64)])
    sol = solve_linear(np.concatenate([top, bot], axis=0), rhs, p)
    if sol is None:
        raise GroupError("no (eta1, eta2) solving the ladder")
    eta1 = E0Cochain(cx, 1, 1, sol[:n1])
    eta2 = E0Cochain(cx, 2, 0, sol[n1:])
    xi_prime = cx.d1(eta2)
    return LadderData(
        complex=cx,
        u=u,
        t=t,
        theta=theta,
        xi_cochain=xi_cochain,
        eta1=eta1,
        eta2=eta2,
        xi_prime_cochain=xi_prime,
    )


def build_eta_family(ladder: LadderData, n: int):
    """The cochains eta_1(n)..eta_4(n) of the t^n recursion, plus the
    residuals of the four equations they must satisfy:

        d1(t^n)      = d0(eta1(n))
        d1(eta1(n))  = d0(eta2(n))
        d1(eta2(n))  = n t^{n-1} xi' + d0(eta3(n))
        d1(eta3(n))  = n eta1(n-1) xi' + d0(eta4(n))
    """
    cx = ladder.complex
    cup = lambda a, b: cx.product(a, b, "cup")
    cup10 = lambda a, b: cx.product(a, b, "cup10")
    cup01 = lambda a, b: cx.product(a, b, "cup01")

    # eta_i(m) for m <= n by the recursion; tpow[m] = t^m
    tpow = {0: cx.unit(), 1: ladder.t}
    for m in range(2, n + 1):
        tpow[m] = cup(tpow[m - 1], ladder.t)
    # eta_i(0) and eta_3(1), eta_4(1) are zero; None stands for zero here
    eta: dict[tuple[int, int], E0Cochain | None] = {
        (1, 1): ladder.eta1,
        (2, 1): ladder.eta2,
        (3, 1): None,
        (4, 1): None,
    }
    xi_p = ladder.xi_prime_cochain
    for m in range(2, n + 1):
        e1p, e2p = eta[(1, m - 1)], eta[(2, m - 1)]
        e3p, e4p = eta.get((3, m - 1)), eta.get((4, m - 1))
        e1pp = eta.get((1, m - 2))
        e2pp = eta.get((2, m - 2))
        c = (m - 1) % cx.p
        eta[(1, m)] = cup(e1p, ladder.t) + cup(tpow[m - 1], ladder.eta1)
        eta[(2, m)] = (
            cup(e2p, ladder.t)
            + cup(e1p, ladder.eta1)
            + cup(tpow[m - 1], ladder.eta2)
            - cup(tpow[m - 2], cup10(xi_p, ladder.t)).scale(c)
        )
        e3 = cup(e2p, ladder.eta1) + cup(e1p, ladder.eta2)
        if e3p is not None:
            e3 = e3 + cup(e3p, ladder.t)
        if c:
            if e1pp is not None:
                e3 = e3 - cup(e1pp, cup10(xi_p, ladder.t)).scale(c)
            e3 = e3 - cup(tpow[m - 2], cup10(xi_p, ladder.eta1)).scale(c)
            e3 = e3 + cup(tpow[m - 2], cup01(xi_p, ladder.t)).scale(c)
        eta[(3, m)] = e3
        e4 = cup(e2p, ladder.eta2)
        if e4p is not None:
            e4 = e4 + cup(e4p, ladder.t)
        if e3p is not None:
            e4 = e4 + cup(e3p, ladder.eta1)
        if c:
            if e2pp is not None:
                e4 = e4 - cup(e2pp, cup10(xi_p, ladder.t)).scale(c)
            if e1pp is not None:
                e4 = e4 - cup(e1pp, cup10(xi_p, ladder.eta1)).scale(c)
                e4 = e4 + cup(e1pp, cup01(xi_p, ladder.t)).scale(c)
            e4 = e4 - cup(tpow[m - 2], cup10(xi_p, ladder.eta2)).scale(c)
            e4 = e4 + cup(tpow[m - 2], cup01(xi_p, ladder.eta1)).scale(c)
        eta[(4, m)] = e4

    coeff = n % cx.p
    res1 = cx.d1(tpow[n]) - cx.d0(eta[(1, n)])
    res2 = cx.d1(eta[(1, n)]) - cx.d0(eta[(2, n)])
    res3 = cx.d1(eta[(2, n)]) - cup(tpow[n - 1], xi_p).scale(coeff)
    if eta.get((3, n)) is not None:
        res3 = res3 - cx.d0(eta[(3, n)])
    if eta.get((3, n)) is not None:
        res4 = cx.d1(eta[(3, n)])
        if n >= 2 and eta[(1, n - 1)] is not None:
            res4 = res4 - cup(eta[(1, n - 1)], xi_p).scale(coeff)
        if eta.get((4, n)) is not None:
            res4 = res4 - cx.d0(eta[(4, n)])
    else:
        res4 = None
    etas = {k: v for k, v in eta.items() if k[1] == n}
    residuals = {
        "ladder-eq1": res1.max_residual(),
        "ladder-eq2": res2.max_residual(),
        "ladder-eq3": res3.max_residual(),
        "ladder-eq4": res4.max_residual() if res4 is not None else 0,
    }
    return etas, residuals


# -- identification of row-zero classes ------------------------------------


def invariant_row_values(cx: BarDoubleComplex, c: E0Cochain) -> np.ndarray:
    """The inhomogeneous cochain w(s) = c[g, s] of a vertical cocycle in
    row zero (such cocycles are constant in the g slot; checked)."""
    if c.j != 0:
        raise GroupError("expected a row-zero cochain")
    vals = c.values.reshape(cx.ng, cx.ng**c.i)
    if not (vals == vals[0]).all():
        raise GroupError("cochain is not a vertical cocycle in row zero")
    return vals[0].copy()


def bar_differential_matrix(cx: BarDoubleComplex, degree: int) -> np.ndarray:
    """Bar differential on inhomogeneous cochains of the quotient group,
    matching the差 induced by d_1 on row-zero vertical cocycles."""
    ng = cx.ng
    rows, cols = ng ** (degree + 1), ng**degree
    m = np.zeros((rows, cols), dtype=np.int64)
    digits = cx._tuple_digits(ng, degree + 1)
    ppow = ng ** np.arange(degree)[::-1] if degree else np.ones(0, dtype=np.int64)
    idx = np.arange(rows)
    s1 = digits[:, 0]
    rel = cx.G.mul[cx.G.inv[s1][:, None], digits[:, 1:]]
    src = rel @ ppow if degree else np.zeros(rows, dtype=np.int64)
    np.add.at(m, (idx, src), 1)
    for k in range(1, degree + 2):
        keep = [c for c in range(degree + 1) if c != k - 1]
        src = digits[:, keep] @ ppow if keep else np.zeros(rows, dtype=np.int64)
        np.add.at(m, (idx, src), (-1) ** k)
    return m % cx.p


def monomial_bar_cochain(cx: BarDoubleComplex, cls, degree: int | None = None) -> np.ndarray:
    """Inhomogeneous bar cochain representing a monomial class: the
    iterated cup of the standard one- and two-cochains
    y_i(a) = a_i mod p and x_i(a, a') = carry_i(a, a'),
    factors in the monomial's canonical order."""
    q = cx.spec.quotient
    p = cx.p
    degree = cls.degree if degree is None else degree
    out = np.zeros(cx.ng**degree, dtype=np.int64)
    digits = cx._tuple_digits(cx.ng, degree)
    for (eps, pows), coeff in cls.terms.items():
        factors: list[tuple[str, int]] = []
        for i, e in enumerate(eps):
            if e:
                factors.append(("y", i))
        for i, a in enumerate(pows):
            factors.extend([("x", i)] * a)
        vals = np.full(cx.ng**degree, coeff % p, dtype=np.int64)
        pos = 0
        prev = np.full(cx.ng**degree, cx.G.identity, dtype=np.int64)  # anchor s_pos
        for kind, i in factors:
            if kind == "y":
                a1 = cx.G.mul[cx.G.inv[prev], digits[:, pos]]
                coords = np.array([q.decode(v)[i] for v in range(cx.ng)])
                vals = (vals * (coords[a1] % p)) % p
                prev = digits[:, pos]
                pos += 1
            else:
                a1 = cx.G.mul[cx.G.inv[prev], digits[:, pos]]
                a2 = cx.G.mul[cx.G.inv[digits[:, pos]], digits[:, pos + 1]]
                ni = q.factor_orders[i]
                c1 = np.array([q.decode(v)[i] for v in range(cx.ng)])
                carry = ((c1[a1] + c1[a2]) >= ni).astype(np.int64)
                vals = (vals * carry) % p
                prev = digits[:, pos + 1]
                pos += 2
        out = (out + vals) % p
    return out


def row_zero_class_report(cx: BarDoubleComplex, ladder: LadderData) -> dict:
    """Compare the ladder's xi and xi' against the extension data.

    The class of xi must equal the mod-p reduction of the extension
    class; the class of xi' must be a unit multiple of the Bockstein
    class (the sign is a convention artifact and is reported)."""
    from .cohomology import bockstein
    from .fplinalg import kernel_basis

    p = cx.p
    report = {}
    sq2 = _row_cohomology_subquotient(cx, 2)
    w_xi = invariant_row_values(cx, ladder.xi_cochain)
    got = sq2.reduce(w_xi)
    want = sq2.reduce(monomial_bar_cochain(cx, cx.spec.xi, 2))
    report["xi_class_matches"] = bool((got == want).all())
    sq3 = _row_cohomology_subquotient(cx, 3)
    w_xip = invariant_row_values(cx, ladder.xi_prime_cochain)
    got3 = sq3.reduce(w_xip)
    beta = bockstein(cx.spec.xi)
    want3 = sq3.reduce(monomial_bar_cochain(cx, beta, 3))
    unit = None
    for c in range(1, p):
        if ((c * want3) % p == got3).all():
            unit = c
            break
    if not want3.any() and not got3.any():
        unit = 1
    report["xi_prime_is_unit_multiple_of_bockstein"] = unit is not None
    report["xi_prime_unit"] = unit
    report["xi_prime_nonzero"] = bool(got3.any())
    return report


def _row_cohomology_subquotient(cx: BarDoubleComplex, degree: int):
    from .fplinalg import kernel_basis

    z = kernel_basis(bar_differential_matrix(cx, degree), cx.p)
    if degree == 0:
        b = np.zeros((0, cx.ng**degree), dtype=np.int64)
    else:
        b = bar_differential_matrix(cx, degree - 1).T % cx.p
    return subquotient_of(z, b, cx.ng**degree, cx.p)
