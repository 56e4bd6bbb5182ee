"""Brute-force verification, independent of every closed formula.

Two oracles:

* minimal free resolutions over the group algebra of the actual
  extension group, built degree by degree (new generators = kernel of
  the previous differential modulo the radical times the kernel), whose
  ranks are the cohomology dimensions of the group;

* the honest first-quadrant double complex Hom_E(P_i (x) Q_j, F_p) with
  P a minimal resolution over the quotient and Q one over the extension
  group, whose page dimensions are extracted from the column filtration
  with plain rank computations (no differential formulas at all):

      dim E_r^{p,q} = z(p, r, n) - z(p+1, r-1, n)
                      - z(p-r+1, r-1, n-1) + z(p-r+1, r, n-1)

  where n = p + q and z(p, r, n) = dim (F^p T^n meet D^{-1} F^{p+r}).
  The z-dimensions come from rank profiles of the total differential:
  one streaming elimination per total degree yields every (p, r) pair.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .extensions import ExtensionSpec, build_extension_group, extension_projection
from .fplinalg import kernel_basis, rank, subquotient_of
from .groups import FiniteGroupTable, GroupError
from .resolutions import Resolution, abelian_minimal_resolution

__all__ = [
    "MinimalResolutionData",
    "minimal_resolution",
    "cohomology_dims",
    "double_complex_ss",
    "DoubleComplexDims",
]

DEFAULT_BIDEGREE_BUDGET = 100_000


@dataclass
class MinimalResolutionData:
    group: FiniteGroupTable
    p: int
    max_degree: int
    ranks: list[int]
    differentials: list[np.ndarray]  # F_p matrices, index n >= 1

    def algebra_entries(self, n: int) -> list[list[np.ndarray]]:
        """Differential n as a matrix of group-algebra coefficient vectors."""
        order = self.group.order
        e = self.group.identity
        m = self.differentials[n - 1]
        rows, cols = self.ranks[n - 1], self.ranks[n]
        out = []
        for a in range(rows):
            row = []
            for b in range(cols):
                row.append(m[a * order : (a + 1) * order, b * order + e].copy())
            out.append(row)
        return out


def _generating_set(group: FiniteGroupTable) -> list[int]:
    """A small generating set, found greedily."""
    gens: list[int] = []
    closure = {group.identity}
    for a in range(group.order):
        if a in closure:
            continue
        gens.append(a)
        frontier = set(closure)
        closure = set(closure)
        new = {a}
        while new:
            nxt = set()
            for x in new:
                for y in list(closure) + [x]:
                    for z in (group.multiply(x, y), group.multiply(y, x)):
                        if z not in closure and z not in new and z not in nxt:
                            nxt.add(z)
            closure |= new
            new = nxt
        if len(closure) == group.order:
            break
    return gens


def _act_matrix(group: FiniteGroupTable, g: int, n_blocks: int) -> np.ndarray:
    """Gather indices for left multiplication: (g v) = v[perm].

    Coordinate (b, h) of the module holds the coefficient of h * gen_b, so
    (g v)[b, g h] = v[b, h], i.e. perm[b, g h] = (b, h).
    """
    order = group.order
    perm = np.empty(n_blocks * order, dtype=np.int64)
    block = np.arange(n_blocks)[:, None] * order
    perm[(block + group.mul[g, np.arange(order)][None, :]).ravel()] = (
        block + np.arange(order)[None, :]
    ).ravel()
    return perm


def _is_p_group(group: FiniteGroupTable, p: int) -> bool:
    n = group.order
    while n % p == 0:
        n //= p
    return n == 1


def minimal_resolution(group: FiniteGroupTable, max_degree: int, p: int | None = None) -> MinimalResolutionData:
    """Minimal free resolution of F_p over F_p[group], group a p-group.

    At each step the kernel of the current differential is computed as an
    F_p subspace; new free generators map onto representatives of the
    kernel modulo (augmentation ideal) * kernel, chosen by echelon pivots.
    """
    if p is None:
        for q in (2, 3, 5, 7, 11, 13):
            if group.order % q == 0:
                p = q
                break
    if p is None or not _is_p_group(group, p):
        raise GroupError("minimal resolutions require a p-group (local algebra)")
    order = group.order
    gens = _generating_set(group)
    ranks = [1]
    diffs: list[np.ndarray] = []
    current = np.ones((1, order), dtype=np.int64)  # the augmentation
    for n in range(1, max_degree + 1):
        k = kernel_basis(current, p)
        rad = []
        n_blocks = ranks[-1]
        for g in gens:
            perm = _act_matrix(group, g, n_blocks)
            rad.append((k[:, perm] - k) % p)
        radk = np.concatenate(rad, axis=0) if rad else np.zeros((0, k.shape[1]), dtype=np.int64)
        sq = subquotient_of(k, radk, k.shape[1], p)
        reps = sq.quotient_reps
        new_rank = reps.shape[0]
        d = np.zeros((n_blocks * order, new_rank * order), dtype=np.int64)
        perms = np.stack([_act_matrix(group, g, n_blocks) for g in range(order)])
        for b in range(new_rank):
            # column (b, g) is g * rep_b
            d[:, b * order : (b + 1) * order] = reps[b][perms].T
        ranks.append(new_rank)
        diffs.append(d)
        current = d
    return MinimalResolutionData(
        group=group, p=p, max_degree=max_degree, ranks=ranks, differentials=diffs
    )


def minimality_check(data: MinimalResolutionData) -> bool:
    """Every differential entry must lie in the augmentation ideal."""
    for n in range(1, data.max_degree + 1):
        for row in data.algebra_entries(n):
            for vec in row:
                if vec.sum() % data.p:
                    return False
    return True


def cohomology_dims(group: FiniteGroupTable, max_degree: int, p: int | None = None) -> list[int]:
    """dim H^n(group; F_p) for n <= max_degree, from the minimal resolution."""
    return minimal_resolution(group, max_degree, p).ranks


# -- the double complex oracle -------------------------------------------


@dataclass
class DoubleComplexDims:
    """Page dimension tables of the honest double complex."""

    spec: ExtensionSpec
    max_total_degree: int
    r_max: int
    tables: dict[int, dict[tuple[int, int], int]]

    def dim(self, r: int, i: int, j: int) -> int:
        return self.tables.get(r, {}).get((i, j), 0)

    def total_dims(self, r: int, through: int) -> list[int]:
        out = [0] * (through + 1)
        for (i, j), d in self.tables.get(r, {}).items():
            if i + j <= through:
                out[i + j] += d
        return out


class _HomDoubleComplex:
    """Bases and differentials of Hom_E(P_i (x) Q_j, F_p).

    A cochain is a vector over the free E-basis {g p_alpha (x) q_beta};
    the horizontal differential is the adjoint of d^P (x) 1 and the
    vertical one the adjoint of (-1)^i (1 (x) d^Q).
    """

    def __init__(self, spec: ExtensionSpec, max_total: int,
                 budget: int = DEFAULT_BIDEGREE_BUDGET):
        self.spec = spec
        self.p = spec.p
        self.P: Resolution = abelian_minimal_resolution(spec.quotient, max_total)
        self.E = build_extension_group(spec)
        self.Q = minimal_resolution(self.E, max_total, spec.p)
        self.G = self.P.group
        self.pi = extension_projection(spec, self.E.order)
        self.max_total = max_total
        self.ng = self.G.order
        for i in range(max_total + 1):
            for j in range(max_total + 1 - i):
                if self.dim(i, j) > budget:
                    raise GroupError(
                        f"double complex bidegree ({i},{j}) exceeds the budget"
                    )

    def a(self, i: int) -> int:
        return self.P.rank(i)

    def b(self, j: int) -> int:
        return self.Q.ranks[j] if 0 <= j <= self.Q.max_degree else 0

    def dim(self, i: int, j: int) -> int:
        if i < 0 or j < 0:
            return 0
        return self.ng * self.a(i) * self.b(j)

    # cochain index at (i, j): (g * a_i + alpha) * b_j + beta

    def d1_block(self, i: int, j: int) -> np.ndarray:
        """(i, j) -> (i+1, j), adjoint of the P differential."""
        rows, cols = self.dim(i + 1, j), self.dim(i, j)
        m = np.zeros((rows, cols), dtype=np.int64)
        if rows == 0 or cols == 0:
            return m
        d = self.P.differential(i + 1)
        bj = self.b(j)
        gmul = self.G.mul
        betas = np.arange(bj)
        for ap in range(self.a(i + 1)):
            for al in range(self.a(i)):
                entry = d[al][ap]
                if entry.is_zero():
                    continue
                for gpp, c in entry.coeffs.items():
                    for g in range(self.ng):
                        row0 = (g * self.a(i + 1) + ap) * bj
                        col0 = (int(gmul[g, gpp]) * self.a(i) + al) * bj
                        m[row0 + betas, col0 + betas] = (
                            m[row0 + betas, col0 + betas] + c
                        ) % self.p
        return m

    def d0_block(self, i: int, j: int) -> np.ndarray:
        """(i, j) -> (i, j+1), adjoint of (-1)^i times the Q differential."""
        rows, cols = self.dim(i, j + 1), self.dim(i, j)
        m = np.zeros((rows, cols), dtype=np.int64)
        if rows == 0 or cols == 0:
            return m
        sign = -1 if i % 2 else 1
        entries = self.Q.algebra_entries(j + 1)
        ai = self.a(i)
        ginv = self.G.inv
        gmul = self.G.mul
        bj, bj1 = self.b(j), self.b(j + 1)
        g_arr = np.repeat(np.arange(self.ng), ai)
        al_arr = np.tile(np.arange(ai), self.ng)
        for bp in range(bj1):
            for bl in range(bj):
                vec = entries[bl][bp]
                for e_elt in np.nonzero(vec)[0]:
                    c = int(vec[e_elt]) * sign
                    src_g = gmul[ginv[int(self.pi[e_elt])], g_arr]
                    rows_idx = (g_arr * ai + al_arr) * bj1 + bp
                    cols_idx = (src_g * ai + al_arr) * bj + bl
                    m[rows_idx, cols_idx] = (m[rows_idx, cols_idx] + c) % self.p
        return m


def _stream_corner_profile(dmat: np.ndarray, col_blocks: np.ndarray,
                           row_blocks: np.ndarray, p: int):
    """Pivot records (column block, row block) of a streaming column
    echelon pass; columns must be pre-sorted by descending block.

    Every pivot column is kept fully reduced (zero at every other pivot
    row, zero above its own pivot), so for any column prefix and row
    prefix the corner rank is the number of matching pivot records.
    """
    rows, cols = dmat.shape
    if rows == 0 or cols == 0:
        return []
    pivot_store = np.zeros((rows, min(rows, cols)), dtype=np.float32)
    piv_rows: list[int] = []
    records: list[tuple[int, int]] = []
    npiv = 0
    chunk = 128
    inv_table = [0] + [pow(a, p - 2, p) for a in range(1, p)]
    for start in range(0, cols, chunk):
        v = dmat[:, start : start + chunk].astype(np.float32)
        if npiv:
            coeff = v[piv_rows, :]
            v = (v - pivot_store[:, :npiv] @ coeff) % p
        new_cols = []
        new_rows = []
        for k in range(v.shape[1]):
            col = v[:, k]
            if new_rows:
                cc = col[new_rows]
                if np.any(cc):
                    col = (col - np.stack(new_cols, axis=1) @ cc) % p
            nz = np.flatnonzero(col)
            if nz.size == 0:
                continue
            r0 = int(nz[0])
            col = (col * inv_table[int(col[r0])]) % p
            # keep the chunk's pivots mutually reduced: the batch
            # reduction of later chunks relies on it
            for prev in new_cols:
                if prev[r0]:
                    prev -= prev[r0] * col
                    prev %= p
            new_cols.append(col)
            new_rows.append(r0)
            records.append((int(col_blocks[start + k]), int(row_blocks[r0])))
        if new_rows:
            vnew = np.stack(new_cols, axis=1)
            if npiv:
                pivot_store[:, :npiv] = (
                    pivot_store[:, :npiv] - vnew @ pivot_store[new_rows, :npiv]
                ) % p
            m = len(new_rows)
            pivot_store[:, npiv : npiv + m] = vnew
            piv_rows.extend(new_rows)
            npiv += m
    return records


def double_complex_ss(
    spec: ExtensionSpec,
    max_total_degree: int,
    r_max: int = 7,
    budget: int = DEFAULT_BIDEGREE_BUDGET,
) -> DoubleComplexDims:
    """Page dimensions E_r^{p,q} (1 <= r <= r_max, p+q <= max_total_degree)
    of the honest double complex, by rank profiles of the filtration."""
    deg = max_total_degree
    cx = _HomDoubleComplex(spec, deg + 1, budget=budget)
    p = spec.p

    dims = {(i, j): cx.dim(i, j) for i in range(deg + 2) for j in range(deg + 2 - i)}

    # cumulative pivot counts per total degree
    profiles = {}
    for n in range(deg + 1):
        blocks = [i for i in range(n + 1) if dims.get((i, n - i), 0)]
        col_order = sorted(blocks, reverse=True)
        col_offsets = {}
        pos = 0
        col_blocks = []
        for i in col_order:
            col_offsets[i] = pos
            sz = dims[(i, n - i)]
            col_blocks.extend([i] * sz)
            pos += sz
        ncols = pos
        row_pos = 0
        row_offsets = {}
        row_blocks = []
        for i in range(n + 2):
            sz = dims.get((i, n + 1 - i), 0)
            row_offsets[i] = row_pos
            row_blocks.extend([i] * sz)
            row_pos += sz
        nrows = row_pos
        dmat = np.zeros((nrows, ncols), dtype=np.int64)
        for i in col_order:
            j = n - i
            c0 = col_offsets[i]
            csz = dims[(i, j)]
            b0 = cx.d0_block(i, j)
            if b0.size:
                dmat[row_offsets[i] : row_offsets[i] + b0.shape[0], c0 : c0 + csz] = b0
            b1 = cx.d1_block(i, j)
            if b1.size:
                dmat[
                    row_offsets[i + 1] : row_offsets[i + 1] + b1.shape[0],
                    c0 : c0 + csz,
                ] = b1
        records = _stream_corner_profile(
            dmat, np.array(col_blocks), np.array(row_blocks), p
        )
        cnt = np.zeros((n + 2, n + 3), dtype=np.int64)
        for cb, rb in records:
            cnt[cb, rb] += 1
        profiles[n] = cnt

    fdim = {}
    for n in range(deg + 2):
        for q in range(n + 2):
            fdim[(q, n)] = sum(dims.get((i, n - i), 0) for i in range(q, n + 1))

    def corner_rank(pp: int, s: int, n: int) -> int:
        if n not in profiles:
            return 0
        cnt = profiles[n]
        total = 0
        for cb in range(max(pp, 0), cnt.shape[0]):
            total += int(cnt[cb, : max(min(s, cnt.shape[1]), 0)].sum())
        return total

    def zdim(pp: int, r: int, n: int) -> int:
        if n < 0:
            return 0
        p_eff = max(pp, 0)
        base = fdim.get((p_eff, n), 0)
        s = pp + r
        if s <= 0:
            return base
        return base - corner_rank(p_eff, s, n)

    tables: dict[int, dict[tuple[int, int], int]] = {}
    for r in range(1, r_max + 1):
        table = {}
        for n in range(deg + 1):
            for i in range(n + 1):
                q = n - i
                d = (
                    zdim(i, r, n)
                    - zdim(i + 1, r - 1, n)
                    - zdim(i - r + 1, r - 1, n - 1)
                    + zdim(i - r + 1, r, n - 1)
                )
                if d:
                    table[(i, q)] = d
        tables[r] = table
    return DoubleComplexDims(
        spec=spec, max_total_degree=deg, r_max=r_max, tables=tables
    )


def euler_telescope(oracle: DoubleComplexDims, through: int) -> list[list[int]]:
    """Per-page kill counts out of each total degree, solved from the
    dimension drops; every entry must be a nonnegative integer for the
    pages to be consistent with a spectral sequence of a filtered complex."""
    out = []
    for r in range(1, oracle.r_max):
        a = oracle.total_dims(r, through)
        b = oracle.total_dims(r + 1, through)
        kills = []
        incoming = 0
        for d in range(through + 1):
            drop = a[d] - b[d]
            out_kills = drop - incoming
            kills.append(out_kills)
            incoming = out_kills
        out.append(kills)
    return out
