"""Diagonal approximations and the chain homotopies between them.

Maps into tensor powers are stored as equivariant term lists: the value
on a free generator is a list of (coeff, pieces) where each piece is a
(group element, free generator label) pair, one per tensor factor.  The
diagonal group action lets every computation stay on free generators.

Sign conventions, pinned by the coboundary-formula self-test in the
verifier module:
  * tau(a (x) b) = (-1)^{|a||b|} b (x) a;
  * tensor differential d(a (x) b) = da (x) b + (-1)^{|a|} a (x) db;
  * cochain pairing (phi (x) theta)(x (x) y) = phi(x) theta(y), no sign;
  * Steenrod's explicit cup-1 map satisfies
        d D1 + D1 d = D0 - tau D0
    (it mediates from tau D0 to D0 with this exponent convention).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .groups import GroupError
from .resolutions import Resolution

__all__ = [
    "ChainMapToTensor",
    "aw_diagonal",
    "steenrod_cup1",
    "ce_diagonal",
    "ce_homotopy",
    "cyclic_diagonal",
    "cyclic_triple_homotopy",
    "tensor_diagonal",
    "tensor_homotopy",
    "homotopy_identity_residual",
    "coassociativity_residual",
    "STEENROD_MEDIATES_TO_PLAIN",
]

# d D1 + D1 d equals (plain - twisted) diagonal with Steenrod's f(i,j,n).
STEENROD_MEDIATES_TO_PLAIN = True

Piece = tuple[int, tuple]
Term = tuple[int, tuple[Piece, ...]]


@dataclass
class ChainMapToTensor:
    """Equivariant chain map (or homotopy) from a resolution into a
    tensor power of itself, stored componentwise."""

    source: Resolution
    factors: int
    degree_shift: int
    components: dict[tuple, dict] = field(default_factory=dict)

    def component(self, n: int, multidegree: tuple[int, ...]) -> dict:
        """{source label: term list} for the given output multidegree."""
        if sum(multidegree) != n + self.degree_shift or len(multidegree) != self.factors:
            return {}
        key = (n, multidegree)
        if key not in self.components:
            self.components[key] = self._build(n, multidegree)
        return self.components[key]

    _builder = None

    def _build(self, n, multidegree):
        if self._builder is None:
            return {}
        return self._builder(n, multidegree)


# -- bar resolution: Alexander-Whitney and Steenrod ---------------------


def _require_bar(res: Resolution):
    if res.kind != "bar":
        raise GroupError("this diagonal is defined on bar resolutions only")


def aw_diagonal(bar: Resolution, n: int) -> ChainMapToTensor:
    """Alexander-Whitney diagonal component in every bidegree (a, n-a).

    On homogeneous tuples: (g_0..g_n) -> sum_a (g_0..g_a) (x) (g_a..g_n).
    """
    _require_bar(bar)
    g = bar.group
    e = g.identity
    cm = ChainMapToTensor(source=bar, factors=2, degree_shift=0)
    for a in range(n + 1):
        b = n - a
        comp = {}
        for lab in bar.labels(n):
            prefix = lab[:a]
            anchor = lab[a - 1] if a >= 1 else e
            inv = g.inverse(anchor)
            suffix = tuple(g.multiply(inv, x) for x in lab[a - 1:][1:]) if a >= 1 else lab
            comp[lab] = [(1, ((e, prefix), (anchor, suffix)))]
        cm.components[(n, (a, b))] = comp
    return cm


def steenrod_cup1(bar: Resolution, n: int) -> ChainMapToTensor:
    """Steenrod's cup-1 map, a degree +1 homotopy between the plain and
    twisted Alexander-Whitney diagonals.

    (g_0..g_n) -> sum_{i<j} (-1)^{n+(n-i-1)(j-i-1)}
                  (g_0..g_i, g_j..g_n) (x) (g_i..g_j).
    """
    _require_bar(bar)
    g = bar.group
    e = g.identity
    cm = ChainMapToTensor(source=bar, factors=2, degree_shift=1)
    for d2 in range(n + 2):
        d1 = n + 1 - d2
        cm.components[(n, (d1, d2))] = {lab: [] for lab in bar.labels(n)}
    for lab in bar.labels(n):
        homog = (e,) + lab  # g_0..g_n with g_k = lab[k-1]
        for i in range(n + 1):
            for j in range(i + 1, n + 1):
                outer = lab[:i] + lab[j - 1:]
                anchor = homog[i]
                inv = g.inverse(anchor)
                inner = tuple(g.multiply(inv, homog[k]) for k in range(i + 1, j + 1))
                sign = -1 if (n + (n - i - 1) * (j - i - 1)) % 2 else 1
                d1, d2 = n - (j - i) + 1, j - i
                cm.components[(n, (d1, d2))][lab].append(
                    (sign, ((e, outer), (anchor, inner)))
                )
    return cm


# -- cyclic resolutions: the periodic diagonal and its homotopy ---------


def ce_diagonal(n_order: int, a: int, b: int) -> list[Term]:
    """Component in bidegree (a, b) of the diagonal on the rank-one
    resolution of a cyclic group of order n_order.

    e_{a+b} -> e_a (x) e_b          (a even)
               e_a (x) g e_b        (a odd, b even)
               sum_{0<=i<j<n} g^i e_a (x) g^j e_b   (a, b odd)
    """
    la, lb = (a,), (b,)
    if a % 2 == 0:
        return [(1, ((0, la), (0, lb)))]
    if b % 2 == 0:
        return [(1, ((0, la), (1 % n_order, lb)))]
    return [
        (1, ((i, la), (j, lb)))
        for i in range(n_order)
        for j in range(i + 1, n_order)
    ]


def ce_homotopy(n_order: int, a: int, b: int, c: int) -> list[Term]:
    """Component (a, b, c) of the coassociativity homotopy: supported on
    all-odd multidegrees, where it is the sum over 0 <= i < j < k < n of
    g^i e_a (x) g^j e_b (x) g^k e_c; the empty sum (n = 2) is zero."""
    if a < 0 or b < 0 or c < 0:
        return []
    if not (a % 2 and b % 2 and c % 2):
        return []
    return [
        (1, ((i, (a,)), (j, (b,)), (k, (c,))))
        for i, j, k in itertools.combinations(range(n_order), 3)
    ]


def cyclic_diagonal(res: Resolution) -> ChainMapToTensor:
    if res.kind != "cyclic":
        raise GroupError("expected a cyclic resolution")
    n_order = res.group.order
    cm = ChainMapToTensor(source=res, factors=2, degree_shift=0)
    for n in range(res.max_degree + 1):
        for a in range(n + 1):
            cm.components[(n, (a, n - a))] = {(n,): ce_diagonal(n_order, a, n - a)}
    return cm


def cyclic_triple_homotopy(res: Resolution) -> ChainMapToTensor:
    if res.kind != "cyclic":
        raise GroupError("expected a cyclic resolution")
    n_order = res.group.order
    cm = ChainMapToTensor(source=res, factors=3, degree_shift=1)
    for n in range(res.max_degree + 1):
        for a in range(n + 2):
            for b in range(n + 2 - a):
                c = n + 1 - a - b
                cm.components[(n, (a, b, c))] = {
                    (n,): ce_homotopy(n_order, a, b, c)
                }
    return cm


# -- tensor combinators -------------------------------------------------


def tensor_diagonal(
    da: ChainMapToTensor, db: ChainMapToTensor, product: Resolution
) -> ChainMapToTensor:
    """(1 (x) tau (x) 1)(Delta_A (x) Delta_B) on the tensor resolution.

    The middle swap contributes (-1)^{deg(second A piece) * deg(first B piece)}.
    """
    if da.source.p != db.source.p:
        raise GroupError("incompatible coefficient primes")
    nb_order = db.source.group.order

    cm = ChainMapToTensor(source=product, factors=2, degree_shift=0)

    def build(n, multidegree):
        (m1, m2) = multidegree
        comp: dict = {}
        for lab in product.labels(n):
            la, lb, i, j = lab
            out = []
            for a1 in range(i + 1):
                a2 = i - a1
                for b1 in range(j + 1):
                    b2 = j - b1
                    if a1 + b1 != m1 or a2 + b2 != m2:
                        continue
                    ca = da.component(i, (a1, a2)).get(la, [])
                    cb = db.component(j, (b1, b2)).get(lb, [])
                    swap = -1 if (a2 * b1) % 2 else 1
                    for sa, ((g1, l1), (g2, l2)) in ca:
                        for sb, ((h1, n1), (h2, n2)) in cb:
                            out.append(
                                (
                                    sa * sb * swap,
                                    (
                                        (g1 * nb_order + h1, (l1, n1, a1, b1)),
                                        (g2 * nb_order + h2, (l2, n2, a2, b2)),
                                    ),
                                )
                            )
            comp[lab] = out
        return comp

    cm._builder = build
    return cm


def tensor_homotopy(
    ha: ChainMapToTensor,
    da: ChainMapToTensor,
    hb: ChainMapToTensor,
    db: ChainMapToTensor,
    product: Resolution,
) -> ChainMapToTensor:
    """Coassociativity homotopy for the tensor diagonal.

    On A_i (x) B_j it is H_A (x) (D_B (x) 1)D_B + (-1)^i (1 (x) D_A)D_A (x) H_B,
    followed by interlacing (a1 a2 a3 b1 b2 b3) -> (a1 b1 a2 b2 a3 b3) with
    sign (-1)^{|b1|(|a2|+|a3|) + |b2||a3|}.
    """
    nb_order = db.source.group.order
    cm = ChainMapToTensor(source=product, factors=3, degree_shift=1)

    def iterated(dmap, n, trip, first: bool):
        """(D (x) 1)D (first) or (1 (x) D)D components as triple term lists."""
        out = {}
        for lab in dmap.source.labels(n):
            terms = []
            if first:
                # split n -> (a1+a2, a3), then a1+a2 -> (a1, a2)
                m = trip[0] + trip[1]
                for s0, ((g0, l0), (g3, l3)) in dmap.component(n, (m, trip[2])).get(lab, []):
                    for s1, ((g1, l1), (g2, l2)) in dmap.component(m, (trip[0], trip[1])).get(
                        l0, []
                    ):
                        gm = dmap.source.group.mul
                        terms.append(
                            (
                                s0 * s1,
                                (
                                    (int(gm[g0, g1]), l1),
                                    (int(gm[g0, g2]), l2),
                                    (g3, l3),
                                ),
                            )
                        )
            else:
                m = trip[1] + trip[2]
                for s0, ((g1, l1), (g0, l0)) in dmap.component(n, (trip[0], m)).get(lab, []):
                    for s1, ((g2, l2), (g3, l3)) in dmap.component(m, (trip[1], trip[2])).get(
                        l0, []
                    ):
                        gm = dmap.source.group.mul
                        terms.append(
                            (
                                s0 * s1,
                                (
                                    (g1, l1),
                                    (int(gm[g0, g2]), l2),
                                    (int(gm[g0, g3]), l3),
                                ),
                            )
                        )
            out[lab] = terms
        return out

    def build(n, multidegree):
        comp: dict = {}
        for lab in product.labels(n):
            la, lb, i, j = lab
            out = []
            # all splittings of the A-side and B-side triples
            for atrip in _triples(i + 1):
                for btrip in _triples(j):
                    if tuple(a + b for a, b in zip(atrip, btrip)) != multidegree:
                        continue
                    left = ha.component(i, atrip).get(la, [])
                    right = iterated(db, j, btrip, first=True).get(lb, [])
                    _emit(out, left, right, atrip, btrip, nb_order, 1)
            sign_i = -1 if i % 2 else 1
            for atrip in _triples(i):
                for btrip in _triples(j + 1):
                    if tuple(a + b for a, b in zip(atrip, btrip)) != multidegree:
                        continue
                    left = iterated(da, i, atrip, first=False).get(la, [])
                    right = hb.component(j, btrip).get(lb, [])
                    _emit(out, left, right, atrip, btrip, nb_order, sign_i)
            comp[lab] = out
        return comp

    cm._builder = build
    return cm


def _triples(total: int):
    for a in range(total + 1):
        for b in range(total + 1 - a):
            yield (a, b, total - a - b)


def _emit(out, left, right, atrip, btrip, nb_order, extra_sign):
    interlace = (btrip[0] * (atrip[1] + atrip[2]) + btrip[1] * atrip[2]) % 2
    sign0 = -extra_sign if interlace else extra_sign
    for sa, apieces in left:
        for sb, bpieces in right:
            pieces = tuple(
                (ga * nb_order + gb, (la, lb, da_, db_))
                for (ga, la), (gb, lb), da_, db_ in zip(
                    apieces, bpieces, atrip, btrip
                )
            )
            out.append((sa * sb * sign0, pieces))


# -- identity checking ---------------------------------------------------


def _dense_index_sizes(res: Resolution, multidegree):
    sizes = []
    for d in multidegree:
        sizes.append(res.group.order * len(res.labels(d)))
    return sizes


def _terms_to_dense(res: Resolution, multidegree, terms, p) -> np.ndarray:
    sizes = _dense_index_sizes(res, multidegree)
    total = int(np.prod(sizes))
    v = np.zeros(total, dtype=np.int64)
    label_index = [
        {lab: k for k, lab in enumerate(res.labels(d))} for d in multidegree
    ]
    for coeff, pieces in terms:
        idx = 0
        for k, (g, lab) in enumerate(pieces):
            nlab = len(label_index[k])
            idx = idx * sizes[k] + (g * nlab + label_index[k][lab])
        v[idx] = (v[idx] + coeff) % p
    return v


def _apply_tensor_differential(res: Resolution, multidegree, terms):
    """Total differential of the tensor power applied to a term list.

    Returns {lower multidegree: term list}; d acts factorwise with the
    Koszul sign (-1)^{sum of earlier degrees}.
    """
    g = res.group
    out: dict[tuple, list] = {}
    for coeff, pieces in terms:
        for k, (gk, lab) in enumerate(pieces):
            dk = multidegree[k]
            if dk == 0:
                continue
            sign = -1 if sum(multidegree[:k]) % 2 else 1
            d = res.differential(dk)
            col = res.labels(dk).index(lab)
            for row, tgt in enumerate(res.labels(dk - 1)):
                entry = d[row][col]
                for h, c in entry.coeffs.items():
                    new_pieces = list(pieces)
                    new_pieces[k] = (int(g.mul[gk, h]), tgt)
                    nd = tuple(
                        m - 1 if t == k else m for t, m in enumerate(multidegree)
                    )
                    out.setdefault(nd, []).append(
                        (coeff * sign * c, tuple(new_pieces))
                    )
    return out


def _translate(res: Resolution, terms, h: int):
    """Diagonal action of the group element h on a term list."""
    g = res.group
    return [
        (c, tuple((int(g.mul[h, gk]), lab) for gk, lab in pieces))
        for c, pieces in terms
    ]


def homotopy_identity_residual(
    res: Resolution,
    diag: ChainMapToTensor,
    hmap: ChainMapToTensor,
    max_total_degree: int,
) -> int:
    """Max residual of dH + Hd = (D (x) 1)D - (1 (x) D)D over all source
    generators and output components with total degree <= max_total_degree."""
    p = res.p
    worst = 0
    for n in range(min(max_total_degree, res.max_degree - 1) + 1):
        for lab_i, lab in enumerate(res.labels(n)):
            sides: dict[tuple, np.ndarray] = {}

            def add(md, terms, sign):
                v = _terms_to_dense(res, md, terms, p) * sign
                if md in sides:
                    sides[md] = (sides[md] + v) % p
                else:
                    sides[md] = v % p

            # d H(gen)
            for md in _triples(n + 1):
                terms = hmap.component(n, md).get(lab, [])
                for nd, dterms in _apply_tensor_differential(res, md, terms).items():
                    add(nd, dterms, 1)
            # H d(gen)
            if n >= 1:
                d = res.differential(n)
                for row, tgt in enumerate(res.labels(n - 1)):
                    entry = d[row][lab_i]
                    for h, c in entry.coeffs.items():
                        for md in _triples(n):
                            terms = hmap.component(n - 1, md).get(tgt, [])
                            scaled = [(c * tc, pc) for tc, pc in terms]
                            add(md, _translate(res, scaled, h), 1)
            # -(D (x) 1)D + (1 (x) D)D
            for md in _triples(n):
                add(md, _iterate_diagonal(res, diag, n, md, lab, first=True), -1)
                add(md, _iterate_diagonal(res, diag, n, md, lab, first=False), 1)

            for v in sides.values():
                r = v % p
                if r.any():
                    worst = max(worst, int(np.minimum(r, p - r).max()))
    return worst


def _iterate_diagonal(res, diag, n, trip, lab, first: bool):
    gm = res.group.mul
    terms = []
    if first:
        m = trip[0] + trip[1]
        for s0, ((g0, l0), (g3, l3)) in diag.component(n, (m, trip[2])).get(lab, []):
            for s1, ((g1, l1), (g2, l2)) in diag.component(m, (trip[0], trip[1])).get(l0, []):
                terms.append(
                    (
                        s0 * s1,
                        ((int(gm[g0, g1]), l1), (int(gm[g0, g2]), l2), (g3, l3)),
                    )
                )
    else:
        m = trip[1] + trip[2]
        for s0, ((g1, l1), (g0, l0)) in diag.component(n, (trip[0], m)).get(lab, []):
            for s1, ((g2, l2), (g3, l3)) in diag.component(m, (trip[1], trip[2])).get(l0, []):
                terms.append(
                    (
                        s0 * s1,
                        ((g1, l1), (int(gm[g0, g2]), l2), (int(gm[g0, g3]), l3)),
                    )
                )
    return terms


def tau_terms(terms, multidegree):
    """tau on a two-factor term list: swap with sign (-1)^{ab}."""
    a, b = multidegree
    sign = -1 if (a * b) % 2 else 1
    return [(sign * c, (p2, p1)) for c, (p1, p2) in terms]


def cup1_identity_residual(bar: Resolution, max_total_degree: int) -> int:
    """Max residual of d D1 + D1 d = D0 - tau D0 on a bar resolution.

    The orientation matches STEENROD_MEDIATES_TO_PLAIN: with Steenrod's
    exponent f(i,j,n) = n + (n-i-1)(j-i-1) the homotopy boundary is the
    plain diagonal minus the twisted one.
    """
    p = bar.p
    worst = 0
    top = min(max_total_degree, bar.max_degree - 1)
    for n in range(top + 1):
        d1n = steenrod_cup1(bar, n)
        d1prev = steenrod_cup1(bar, n - 1) if n >= 1 else None
        d0n = aw_diagonal(bar, n)
        labels = bar.labels(n)
        diff = bar.differential(n) if n >= 1 else None
        prev_labels = bar.labels(n - 1) if n >= 1 else []
        for lab_i, lab in enumerate(labels):
            sides: dict[tuple, np.ndarray] = {}

            def add(md, terms, sign):
                v = _terms_to_dense(bar, md, terms, p) * sign
                sides[md] = (sides.get(md, 0) + v) % p

            for md in ((a, n + 1 - a) for a in range(n + 2)):
                terms = d1n.component(n, md).get(lab, [])
                for nd, dterms in _apply_tensor_differential(bar, md, terms).items():
                    add(nd, dterms, 1)
            if n >= 1:
                for row, tgt in enumerate(prev_labels):
                    entry = diff[row][lab_i]
                    for h, c in entry.coeffs.items():
                        for md in ((a, n - a) for a in range(n + 1)):
                            terms = d1prev.component(n - 1, md).get(tgt, [])
                            scaled = [(c * tc, pc) for tc, pc in terms]
                            add(md, _translate(bar, scaled, h), 1)
            for md in ((a, n - a) for a in range(n + 1)):
                terms = d0n.component(n, md).get(lab, [])
                add(md, terms, -1)
                # + tau D0: swapped terms land in the mirrored component
                swapped_md = (md[1], md[0])
                add(swapped_md, tau_terms(terms, md), 1)

            for v in sides.values():
                r = np.asarray(v) % p
                if r.any():
                    worst = max(worst, int(np.minimum(r, p - r).max()))
    return worst


def aw_coassociativity_residual(bar: Resolution, max_total_degree: int) -> int:
    """Coassociativity of Alexander-Whitney, checked densely."""
    diag = ChainMapToTensor(source=bar, factors=2, degree_shift=0)
    per_degree: dict[int, ChainMapToTensor] = {}

    def build(n, md):
        if n not in per_degree:
            per_degree[n] = aw_diagonal(bar, n)
        return per_degree[n].component(n, md)

    diag._builder = build
    return coassociativity_residual(bar, diag, max_total_degree)


def coassociativity_residual(
    res: Resolution, diag: ChainMapToTensor, max_total_degree: int
) -> int:
    """Max residual of (D (x) 1)D = (1 (x) D)D up to the given degree."""
    p = res.p
    worst = 0
    for n in range(min(max_total_degree, res.max_degree) + 1):
        for lab in res.labels(n):
            for md in _triples(n):
                lhs = _terms_to_dense(
                    res, md, _iterate_diagonal(res, diag, n, md, lab, first=True), p
                )
                rhs = _terms_to_dense(
                    res, md, _iterate_diagonal(res, diag, n, md, lab, first=False), p
                )
                if ((lhs - rhs) % p).any():
                    worst = max(worst, 1)
    return worst
