"""The non-reductive symmetry groups G_L, G_R and their action on W.

G_L consists of lower-triangular block matrices with diagonal g_i in
GL(M_i) and strictly-lower entries u_ij in Hom(A*_ij (x) M_j, M_i) for
j < i; the product of two strictly-lower entries is the three-step
*-composition routed through the A-compositions.  G_R is the same shape
on the target side with B-compositions.  Both are handled by one engine
parameterized by the slot dimensions and the composition tensors.

Group law (g' g) for the strictly-lower part:

    u''_ij = u'_ij o (I (x) g_j) + sum_{j < k < i} u'_ik * u_kj + g'_i o u_ij

The source states the last term with indices "ji"; the reading above is
the unique one under which the law is a matrix-style convolution, hence
associative.  Associativity is asserted by tests rather than trusted.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .matrix import BudgetExceeded, Field, Mat, inverse, rand_invertible, rand_mat
from .rs_spec import DimVector, PointW, RsSpec, check_point_shapes, point_from_blocks


@dataclass(frozen=True)
class TriSide:
    """Structure constants for one triangular group.

    sizes[i-1] is dim of the i-th diagonal space; slotdim[(i, j)] for j < i
    is the dimension of the connecting space (A_ij resp. B_ij); comp[(k, j, i)]
    is the composition tensor used by the *-product.
    """

    field: Field
    sizes: tuple
    slotdim: dict   # (i, j): i >= j -> int
    comp: dict      # (k, j, i): i <= j <= k -> Mat

    @property
    def n(self) -> int:
        return len(self.sizes)

    def slots(self):
        return [(i, j) for i in range(2, self.n + 1) for j in range(1, i)]


def side_L(spec: RsSpec, dims: DimVector) -> TriSide:
    return TriSide(spec.field, tuple(dims.m), dict(spec.dimA), dict(spec.compAA))


def side_R(spec: RsSpec, dims: DimVector) -> TriSide:
    return TriSide(spec.field, tuple(dims.n), dict(spec.dimB), dict(spec.compBB))


@dataclass(frozen=True)
class TriElem:
    """Element of a triangular group: invertible diagonal + lower slots."""

    side: TriSide
    diag: tuple     # diag[i-1]: sizes[i-1] x sizes[i-1] Mat
    low: tuple      # ((i, j), Mat) sorted; Mat is sizes[i-1] x (slotdim * sizes[j-1])

    def u(self, i: int, j: int) -> Mat:
        return dict(self.low)[(i, j)]

    def key(self):
        return tuple(m.entries for m in self.diag) + tuple(m.entries for _, m in self.low)


def tri_identity(side: TriSide) -> TriElem:
    f = side.field
    diag = tuple(Mat.identity(f, s) for s in side.sizes)
    low = tuple(((i, j), Mat.zeros(f, side.sizes[i - 1],
                                   side.slotdim[(i, j)] * side.sizes[j - 1]))
                for (i, j) in side.slots())
    return TriElem(side, diag, low)


def tri_make(side: TriSide, diag, low_map) -> TriElem:
    low = []
    for (i, j) in side.slots():
        m = low_map.get((i, j))
        if m is None:
            m = Mat.zeros(side.field, side.sizes[i - 1],
                          side.slotdim[(i, j)] * side.sizes[j - 1])
        low.append(((i, j), m))
    return TriElem(side, tuple(diag), tuple(low))


def star(u_kj: Mat, u_ji: Mat, side: TriSide, k: int, j: int, i: int) -> Mat:
    """Three-step composite A*_ki (x) M_i -> A*_ki (x) A_ji (x) M_j -> A*_kj (x) M_j -> M_k."""
    f = side.field
    m_i, m_j, m_k = side.sizes[i - 1], side.sizes[j - 1], side.sizes[k - 1]
    da_ki, da_kj, da_ji = side.slotdim[(k, i)], side.slotdim[(k, j)], side.slotdim[(j, i)]
    comp = side.comp[(k, j, i)]  # A_kj (x) A_ji -> A_ki
    out = [[f.zero()] * (da_ki * m_i) for _ in range(m_k)]
    for e in range(da_ki):
        for d in range(da_kj):
            for c in range(da_ji):
                coeff = comp.get(e, d * da_ji + c)
                if coeff == 0:
                    continue
                for mu in range(m_i):
                    col = e * m_i + mu
                    for nu in range(m_j):
                        a = u_ji.get(nu, c * m_i + mu)
                        if a == 0:
                            continue
                        w = f.mul(coeff, a)
                        for kap in range(m_k):
                            b = u_kj.get(kap, d * m_j + nu)
                            if b == 0:
                                continue
                            out[kap][col] = f.add(out[kap][col], f.mul(w, b))
    if m_k == 0:
        return Mat.zeros(f, 0, da_ki * m_i)
    return Mat.from_rows(f, out)


def tri_mul(gp: TriElem, g: TriElem) -> TriElem:
    """Product g' g (g' is the left factor)."""
    side = gp.side
    if side != g.side:
        raise ValueError("side mismatch")
    f = side.field
    diag = tuple(a.mul(b) for a, b in zip(gp.diag, g.diag))
    low = {}
    glow, gplow = dict(g.low), dict(gp.low)
    for (i, j) in side.slots():
        da = side.slotdim[(i, j)]
        term = gplow[(i, j)].mul(Mat.identity(f, da).kron(g.diag[j - 1]))
        term = term.add(gp.diag[i - 1].mul(glow[(i, j)]))
        for k in range(j + 1, i):
            term = term.add(star(gplow[(i, k)], glow[(k, j)], side, i, k, j))
        low[(i, j)] = term
    return tri_make(side, diag, low)


def tri_inv(g: TriElem) -> TriElem:
    """Inverse by diagonal inversion plus back-substitution on the lower part."""
    side = g.side
    f = side.field
    diag_inv = tuple(inverse(d) for d in g.diag)
    glow = dict(g.low)
    low = {}
    for delta in range(1, side.n):
        for j in range(1, side.n + 1 - delta):
            i = j + delta
            acc = diag_inv[i - 1].mul(glow[(i, j)])
            for k in range(j + 1, i):
                acc = acc.add(star(low[(i, k)], glow[(k, j)], side, i, k, j))
            da = side.slotdim[(i, j)]
            low[(i, j)] = acc.neg().mul(Mat.identity(f, da).kron(diag_inv[j - 1]))
    return tri_make(side, diag_inv, low)


def tri_decompose(g: TriElem):
    """g = h . g_red with h unipotent (identity diagonal) and g_red diagonal."""
    side = g.side
    f = side.field
    gred = tri_make(side, g.diag, {})
    diag_inv = [inverse(d) for d in g.diag]
    low = {}
    for (i, j) in side.slots():
        da = side.slotdim[(i, j)]
        low[(i, j)] = dict(g.low)[(i, j)].mul(Mat.identity(f, da).kron(diag_inv[j - 1]))
    h = tri_make(side, tuple(Mat.identity(f, s) for s in side.sizes), low)
    return h, gred


def is_unipotent(g: TriElem) -> bool:
    return all(d == Mat.identity(g.side.field, d.rows) for d in g.diag)


def is_diagonal(g: TriElem) -> bool:
    return all(m.is_zero() for _, m in g.low)


def tri_rand(side: TriSide, rng) -> TriElem:
    diag = tuple(rand_invertible(side.field, s, rng) for s in side.sizes)
    low = {(i, j): rand_mat(side.field, side.sizes[i - 1],
                            side.slotdim[(i, j)] * side.sizes[j - 1], rng)
           for (i, j) in side.slots()}
    return tri_make(side, diag, low)


# ---------------------------------------------------------------------------
# Enumeration over finite fields


def _gl_order(n: int, p: int) -> int:
    out = 1
    for i in range(n):
        out *= p ** n - p ** i
    return out


def tri_group_order(side: TriSide, which: str = "full") -> int:
    """Order of the group (or of its unipotent / reductive part)."""
    p = side.field.p
    if p is None:
        raise BudgetExceeded("infinite group")
    diag_part = 1
    for s in side.sizes:
        diag_part *= _gl_order(s, p)
    uni_part = 1
    for (i, j) in side.slots():
        uni_part *= p ** (side.slotdim[(i, j)] * side.sizes[i - 1] * side.sizes[j - 1])
    if which == "full":
        return diag_part * uni_part
    if which == "unipotent":
        return uni_part
    if which == "reductive":
        return diag_part
    raise ValueError(which)


def _all_invertible(field: Field, n: int):
    """All invertible n x n matrices, lexicographic in the entry tuple."""
    from .matrix import rank
    if n == 0:
        yield Mat.zeros(field, 0, 0)
        return
    for ent in itertools.product(field.elements(), repeat=n * n):
        m = Mat(field, n, n, ent)
        if rank(m) == n:
            yield m


def _all_mats(field: Field, rows: int, cols: int):
    for ent in itertools.product(field.elements(), repeat=rows * cols):
        yield Mat(field, rows, cols, ent)


def tri_enumerate(side: TriSide, which: str = "full", budget: int = 1 << 20):
    """Every element exactly once: diagonal factors in lex order of matrix
    entries, then the lower slots (slot order (i, j) sorted, entries odometer)."""
    if tri_group_order(side, "full" if which == "full" else which) > budget:
        raise BudgetExceeded("group enumeration over budget")
    f = side.field
    slots = side.slots()
    if which in ("full", "reductive"):
        diag_iter = itertools.product(*[list(_all_invertible(f, s)) for s in side.sizes])
    else:
        diag_iter = [tuple(Mat.identity(f, s) for s in side.sizes)]
    uni_dims = [(sl, side.sizes[sl[0] - 1], side.slotdim[sl] * side.sizes[sl[1] - 1])
                for sl in slots]
    for diag in diag_iter:
        if which == "reductive":
            yield tri_make(side, diag, {})
            continue
        for lows in itertools.product(*[list(_all_mats(f, r, c)) for _, r, c in uni_dims]):
            yield tri_make(side, diag, {sl: m for (sl, _, _), m in zip(uni_dims, lows)})


def tri_generators(side: TriSide):
    """A finite generating set: GL transvections/diagonal units per diagonal
    block plus one-entry unipotent shifts per lower slot."""
    if not side.field.is_finite:
        raise BudgetExceeded("generators only defined over finite fields")
    f = side.field
    gens = []
    for idx, sz in enumerate(side.sizes):
        if sz == 0:
            continue
        ident = Mat.identity(f, sz)
        for c in f.elements():
            if c in (0, 1):
                continue
            d = ident.to_lists()
            d[0][0] = c
            diag = list(Mat.identity(f, s) for s in side.sizes)
            diag[idx] = Mat.from_rows(f, d)
            gens.append(tri_make(side, diag, {}))
        for a in range(sz):
            for b in range(sz):
                if a == b:
                    continue
                d = ident.to_lists()
                d[a][b] = f.one()
                diag = list(Mat.identity(f, s) for s in side.sizes)
                diag[idx] = Mat.from_rows(f, d)
                gens.append(tri_make(side, diag, {}))
    for (i, j) in side.slots():
        rows_, cols_ = side.sizes[i - 1], side.slotdim[(i, j)] * side.sizes[j - 1]
        for rr in range(rows_):
            for cc in range(cols_):
                m = Mat.zeros(f, rows_, cols_).to_lists()
                m[rr][cc] = f.one()
                gens.append(tri_make(side, tuple(Mat.identity(f, s) for s in side.sizes),
                                     {(i, j): Mat.from_rows(f, m)}))
    return gens


# ---------------------------------------------------------------------------
# G-element pairs and the action on W


@dataclass(frozen=True)
class GElem:
    left: TriElem   # element of G_L
    right: TriElem  # element of G_R


def act_right(spec: RsSpec, dims: DimVector, w: PointW, g: TriElem) -> PointW:
    """Right action w.g of G_L: phi'_li = sum_{j >= i} psi_ijl."""
    f = spec.field
    r, s = spec.r, spec.s
    glow = dict(g.low)
    blocks = []
    for l in range(1, s + 1):
        row = []
        for i in range(1, r + 1):
            h_li, m_i, n_l = spec.hdim(l, i), dims.m[i - 1], dims.n[l - 1]
            acc = w.block(l, i).mul(Mat.identity(f, h_li).kron(g.diag[i - 1]))
            for j in range(i + 1, r + 1):
                m_j, h_lj, da = dims.m[j - 1], spec.hdim(l, j), spec.adim(j, i)
                u_ji = glow[(j, i)]
                comp = spec.compHA[(l, j, i)]  # H_lj (x) A_ji -> H_li
                mid = [[f.zero()] * (h_li * m_i) for _ in range(h_lj * m_j)]
                for aa in range(h_li):
                    for bb in range(h_lj):
                        for cc in range(da):
                            coeff = comp.get(aa, bb * da + cc)
                            if coeff == 0:
                                continue
                            for mu in range(m_i):
                                for kap in range(m_j):
                                    uval = u_ji.get(kap, cc * m_i + mu)
                                    if uval == 0:
                                        continue
                                    mid[bb * m_j + kap][aa * m_i + mu] = f.add(
                                        mid[bb * m_j + kap][aa * m_i + mu],
                                        f.mul(coeff, uval))
                if h_lj * m_j:
                    midm = Mat.from_rows(f, mid)
                else:
                    midm = Mat.zeros(f, 0, h_li * m_i)
                acc = acc.add(w.block(l, j).mul(midm))
            row.append(acc)
        blocks.append(row)
    return point_from_blocks(dims, blocks)


def act_left(spec: RsSpec, dims: DimVector, w: PointW, h: TriElem) -> PointW:
    """Left action h.w of G_R: phi'_li = sum_{m <= l} chi_lmi."""
    f = spec.field
    r, s = spec.r, spec.s
    hlow = dict(h.low)
    blocks = []
    for l in range(1, s + 1):
        row = []
        for i in range(1, r + 1):
            h_li, m_i = spec.hdim(l, i), dims.m[i - 1]
            acc = h.diag[l - 1].mul(w.block(l, i))
            for m in range(1, l):
                n_m, h_mi, db = dims.n[m - 1], spec.hdim(m, i), spec.bdim(l, m)
                v_lm = hlow[(l, m)]
                comp = spec.compBH[(l, m, i)]  # B_lm (x) H_mi -> H_li
                chi = [[f.zero()] * (h_li * m_i) for _ in range(dims.n[l - 1])]
                for aa in range(h_li):
                    for cc in range(db):
                        for dd in range(h_mi):
                            coeff = comp.get(aa, cc * h_mi + dd)
                            if coeff == 0:
                                continue
                            for mu in range(m_i):
                                for nup in range(n_m):
                                    pv = w.block(m, i).get(nup, dd * m_i + mu)
                                    if pv == 0:
                                        continue
                                    wgt = f.mul(coeff, pv)
                                    for nu in range(dims.n[l - 1]):
                                        vval = v_lm.get(nu, cc * n_m + nup)
                                        if vval == 0:
                                            continue
                                        chi[nu][aa * m_i + mu] = f.add(
                                            chi[nu][aa * m_i + mu], f.mul(wgt, vval))
                if dims.n[l - 1]:
                    acc = acc.add(Mat.from_rows(f, chi))
            row.append(acc)
        blocks.append(row)
    return point_from_blocks(dims, blocks)


def act(spec: RsSpec, dims: DimVector, w: PointW, g: GElem) -> PointW:
    """(g, h).w = h . w . g^{-1}."""
    check_point_shapes(spec, w)
    return act_left(spec, dims, act_right(spec, dims, w, tri_inv(g.left)), g.right)


def enumerate_group(spec: RsSpec, dims: DimVector, which: str,
                    budget: int = 1 << 20):
    """Enumerate G_L, G_R, H = H_L x H_R, or G_red = G_L,red x G_R,red.

    Yields TriElem for the one-sided groups and GElem pairs for H / G_red.
    """
    L, R = side_L(spec, dims), side_R(spec, dims)
    if which == "G_L":
        yield from tri_enumerate(L, "full", budget)
    elif which == "G_R":
        yield from tri_enumerate(R, "full", budget)
    elif which == "H":
        total = tri_group_order(L, "unipotent") * tri_group_order(R, "unipotent")
        if total > budget:
            raise BudgetExceeded("|H| over budget")
        for hl in tri_enumerate(L, "unipotent", budget):
            for hr in tri_enumerate(R, "unipotent", budget):
                yield GElem(hl, hr)
    elif which == "G_red":
        total = tri_group_order(L, "reductive") * tri_group_order(R, "reductive")
        if total > budget:
            raise BudgetExceeded("|G_red| over budget")
        for gl in tri_enumerate(L, "reductive", budget):
            for gr in tri_enumerate(R, "reductive", budget):
                yield GElem(gl, gr)
    else:
        raise ValueError(which)
