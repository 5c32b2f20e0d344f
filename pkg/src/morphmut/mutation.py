"""Mutations of type-(r,s) morphism spaces.

For a mutation index p (0 <= p <= r-1) the spec and a dimension vector give
an abstract morphism space Theta_p with

    X1 = (+)_{i<=p} H_1i (x) M_i*          X2 = (+)_{j>p} H_1j (x) M_j*
    X3 = (+)_{i<=p, l>=2} H_li (x) M_i* (x) N_l
    X4 = (+)_{j>p, l>=2} H_lj (x) M_j* (x) N_l
    H_L = (+)_{i<=p<j} A_ji (x) M_i* (x) M_j
    H_R = (+)_{l>=2} B_l1 (x) N_l          M = N_1

whose pairings are assembled from the composition tensors.  The mutated
problem is again a type-(p+1, r+s-p-1) spec; its connecting spaces are
quotients (H_1i (x) H*_1L)/A_Li and kernels ker(B (x) H -> H), and the
induced compositions are built by representative lifting with descent and
closure checked numerically (a failure is a hard error).

Block bookkeeping: within every direct sum the blocks are ordered by their
printed key (i, j, (l,i), ...) ascending, and inside a block the factors
are flattened left-slow exactly as in matrix.kron.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .matrix import Layout, Mat, Subspace, kernel_basis, quotient_map, quotient_section, rank, solve_particular
from .rs_spec import DimVector, PointW, RsSpec, check_point_shapes, point_from_blocks
from .stability import Polarization
from .theta import (Theta, ThetaPoint, ThetaError, mutate_point, phi2_bar,
                    in_W0 as theta_in_W0, validate_theta, x4_projection)


class MutationError(ValueError):
    pass


# ---------------------------------------------------------------------------
# tau and tau* for type (2,1)


def tau_star_map(spec: RsSpec) -> Mat:
    """tau* : H_12 (x) A_21 -> H_11, the composition itself."""
    if (spec.r, spec.s) != (2, 1):
        raise ValueError("tau* is defined for type (2,1)")
    return spec.compHA[(1, 2, 1)]


def tau_map(spec: RsSpec) -> Mat:
    """tau : H*_11 (x) A_21 -> H*_12 deduced from the composition."""
    if (spec.r, spec.s) != (2, 1):
        raise ValueError("tau is defined for type (2,1)")
    c = spec.compHA[(1, 2, 1)]
    h11, h12, da = spec.hdim(1, 1), spec.hdim(1, 2), spec.adim(2, 1)
    rows = [[c.get(a, b * da + cc) for a in range(h11) for cc in range(da)]
            for b in range(h12)]
    if not rows:
        return Mat.zeros(spec.field, 0, h11 * da)
    return Mat.from_rows(spec.field, rows)


# ---------------------------------------------------------------------------
# Theta_p from (r,s) data


@dataclass(frozen=True)
class ThetaRs:
    theta: Theta
    spec: RsSpec
    dims: DimVector
    p: int
    x1lay: Layout
    x2lay: Layout
    x3lay: Layout
    x4lay: Layout
    hllay: Layout
    hrlay: Layout
    proj4: Mat  # quotient map X2* (x) X1 -> X4', cached for point mutation


def theta_from_rs(spec: RsSpec, dims: DimVector, p: int) -> ThetaRs:
    r, s = spec.r, spec.s
    if not 0 <= p <= r - 1:
        raise MutationError(f"mutation index p must be in [0, {r - 1}]")
    if len(dims.m) != r or len(dims.n) != s:
        raise MutationError("dimension vector does not match spec")
    f = spec.field
    m, n = dims.m, dims.n
    x1lay = Layout([(i, (spec.hdim(1, i), m[i - 1])) for i in range(1, p + 1)])
    x2lay = Layout([(j, (spec.hdim(1, j), m[j - 1])) for j in range(p + 1, r + 1)])
    x3lay = Layout([((l, i), (spec.hdim(l, i), m[i - 1], n[l - 1]))
                    for l in range(2, s + 1) for i in range(1, p + 1)])
    x4lay = Layout([((l, j), (spec.hdim(l, j), m[j - 1], n[l - 1]))
                    for l in range(2, s + 1) for j in range(p + 1, r + 1)])
    hllay = Layout([((i, j), (spec.adim(j, i), m[i - 1], m[j - 1]))
                    for i in range(1, p + 1) for j in range(p + 1, r + 1)])
    hrlay = Layout([(l, (spec.bdim(l, 1), n[l - 1])) for l in range(2, s + 1)])
    d1, d2, d3, d4 = x1lay.dim, x2lay.dim, x3lay.dim, x4lay.dim
    dHL, dHR, dM = hllay.dim, hrlay.dim, n[0]
    z = f.zero()

    g1 = [[z] * (d2 * dHL) for _ in range(d1)]
    for i in range(1, p + 1):
        for j in range(p + 1, r + 1):
            comp = spec.compHA[(1, j, i)]
            da = spec.adim(j, i)
            for a in range(spec.hdim(1, j)):
                for beta in range(m[j - 1]):
                    x2pos = x2lay.pos(j, a, beta)
                    for c in range(da):
                        for mu in range(m[i - 1]):
                            col = x2pos * dHL + hllay.pos((i, j), c, mu, beta)
                            for d in range(spec.hdim(1, i)):
                                v = comp.get(d, a * da + c)
                                if v != 0:
                                    row = x1lay.pos(i, d, mu)
                                    g1[row][col] = f.add(g1[row][col], v)

    g2 = [[z] * (d4 * dHL) for _ in range(d3)]
    for l in range(2, s + 1):
        for i in range(1, p + 1):
            for j in range(p + 1, r + 1):
                comp = spec.compHA[(l, j, i)]
                da = spec.adim(j, i)
                for b in range(spec.hdim(l, j)):
                    for beta in range(m[j - 1]):
                        for nu in range(n[l - 1]):
                            x4pos = x4lay.pos((l, j), b, beta, nu)
                            for c in range(da):
                                for mu in range(m[i - 1]):
                                    col = x4pos * dHL + hllay.pos((i, j), c, mu, beta)
                                    for d in range(spec.hdim(l, i)):
                                        v = comp.get(d, b * da + c)
                                        if v != 0:
                                            row = x3lay.pos((l, i), d, mu, nu)
                                            g2[row][col] = f.add(g2[row][col], v)

    g3 = [[z] * (dHR * d1) for _ in range(d3)]
    for l in range(2, s + 1):
        comp_by_i = {i: spec.compBH[(l, 1, i)] for i in range(1, p + 1)}
        for e in range(spec.bdim(l, 1)):
            for nu in range(n[l - 1]):
                hrpos = hrlay.pos(l, e, nu)
                for i in range(1, p + 1):
                    comp = comp_by_i[i]
                    h1i = spec.hdim(1, i)
                    for a in range(h1i):
                        for mu in range(m[i - 1]):
                            col = hrpos * d1 + x1lay.pos(i, a, mu)
                            for d in range(spec.hdim(l, i)):
                                v = comp.get(d, e * h1i + a)
                                if v != 0:
                                    row = x3lay.pos((l, i), d, mu, nu)
                                    g3[row][col] = f.add(g3[row][col], v)

    g4 = [[z] * (dHR * d2) for _ in range(d4)]
    for l in range(2, s + 1):
        for e in range(spec.bdim(l, 1)):
            for nu in range(n[l - 1]):
                hrpos = hrlay.pos(l, e, nu)
                for j in range(p + 1, r + 1):
                    comp = spec.compBH[(l, 1, j)]
                    h1j = spec.hdim(1, j)
                    for a in range(h1j):
                        for beta in range(m[j - 1]):
                            col = hrpos * d2 + x2lay.pos(j, a, beta)
                            for b in range(spec.hdim(l, j)):
                                v = comp.get(b, e * h1j + a)
                                if v != 0:
                                    row = x4lay.pos((l, j), b, beta, nu)
                                    g4[row][col] = f.add(g4[row][col], v)

    def mk(rows, nr, nc):
        if nr == 0:
            return Mat.zeros(f, 0, nc)
        return Mat.from_rows(f, rows)

    th = Theta(f, d1, d2, d3, d4, dHL, dHR, dM,
               mk(g1, d1, d2 * dHL), mk(g2, d3, d4 * dHL),
               mk(g3, d3, dHR * d1), mk(g4, d4, dHR * d2),
               ("rs", p))
    validate_theta(th)
    return ThetaRs(th, spec, dims, p, x1lay, x2lay, x3lay, x4lay, hllay, hrlay,
                   x4_projection(th))


def point_to_theta(trs: ThetaRs, w: PointW) -> ThetaPoint:
    spec, dims, p = trs.spec, trs.dims, trs.p
    check_point_shapes(spec, w)
    f = spec.field
    th = trs.theta
    m, n = dims.m, dims.n
    phi1 = [[f.zero()] * th.dM for _ in range(th.d1)]
    for i in range(1, p + 1):
        blk = w.block(1, i)
        for a in range(spec.hdim(1, i)):
            for mu in range(m[i - 1]):
                for nu in range(th.dM):
                    phi1[trs.x1lay.pos(i, a, mu)][nu] = blk.get(nu, a * m[i - 1] + mu)
    phi2 = [[f.zero()] * th.dM for _ in range(th.d2)]
    for j in range(p + 1, spec.r + 1):
        blk = w.block(1, j)
        for a in range(spec.hdim(1, j)):
            for mu in range(m[j - 1]):
                for nu in range(th.dM):
                    phi2[trs.x2lay.pos(j, a, mu)][nu] = blk.get(nu, a * m[j - 1] + mu)
    x3 = [f.zero()] * th.d3
    for l in range(2, spec.s + 1):
        for i in range(1, p + 1):
            blk = w.block(l, i)
            for a in range(spec.hdim(l, i)):
                for mu in range(m[i - 1]):
                    for nu in range(n[l - 1]):
                        x3[trs.x3lay.pos((l, i), a, mu, nu)] = blk.get(nu, a * m[i - 1] + mu)
    x4 = [f.zero()] * th.d4
    for l in range(2, spec.s + 1):
        for j in range(p + 1, spec.r + 1):
            blk = w.block(l, j)
            for a in range(spec.hdim(l, j)):
                for mu in range(m[j - 1]):
                    for nu in range(n[l - 1]):
                        x4[trs.x4lay.pos((l, j), a, mu, nu)] = blk.get(nu, a * m[j - 1] + mu)
    mkcol = lambda v: Mat(f, len(v), 1, tuple(v))
    mk = lambda rows, nr, nc: Mat.from_rows(f, rows) if nr else Mat.zeros(f, 0, nc)
    return ThetaPoint(mk(phi1, th.d1, th.dM), mk(phi2, th.d2, th.dM),
                      mkcol(x3), mkcol(x4))


def in_W0_p(spec: RsSpec, dims: DimVector, w: PointW, p: int) -> bool:
    """Membership in W^0_p: the joint map (+)_{j>p} H*_1j (x) M_j -> N_1
    built from the first-row blocks is surjective."""
    trs = theta_from_rs(spec, dims, p)
    return theta_in_W0(trs.theta, point_to_theta(trs, w))


# ---------------------------------------------------------------------------
# The mutated (p+1, r+s-p-1) spec


@dataclass(frozen=True)
class MutatedRs:
    spec: RsSpec          # the mutated spec
    dims: DimVector       # its dimension vector
    p: int
    src_spec: RsSpec
    src_dims: DimVector
    quot: dict            # (l, i) -> (P, S, emb) for the quotient H-spaces
    kerBH: dict           # (l, m) -> Subspace (kernel B (x) H -> H)

    @property
    def r_new(self):
        return self.p + 1

    @property
    def s_new(self):
        return self.src_spec.r + self.src_spec.s - self.p - 1


def _embedding_A_in_HH(spec: RsSpec, L: int, i: int) -> Mat:
    """A_Li -> H_1i (x) H*_1L, a |-> (h |-> comp(h (x) a)); rows (d, b)."""
    comp = spec.compHA[(1, L, i)]
    h1i, h1L, da = spec.hdim(1, i), spec.hdim(1, L), spec.adim(L, i)
    rows = []
    for d in range(h1i):
        for b in range(h1L):
            rows.append([comp.get(d, b * da + c) for c in range(da)])
    if not rows:
        return Mat.zeros(spec.field, 0, da)
    return Mat.from_rows(spec.field, rows)


def _induced_dual_H(spec: RsSpec, M: int, L: int) -> Mat:
    """H*_1L (x) A_ML -> H*_1M induced by compHA[(1, M, L)]; used for the
    A-range B-action on the quotient H-spaces."""
    comp = spec.compHA[(1, M, L)]
    h1L, h1M, da = spec.hdim(1, L), spec.hdim(1, M), spec.adim(M, L)
    rows = [[comp.get(bL, bM * da + c) for bL in range(h1L) for c in range(da)]
            for bM in range(h1M)]
    if not rows:
        return Mat.zeros(spec.field, 0, h1L * da)
    return Mat.from_rows(spec.field, rows)


def _kernel_coords(K: Subspace, cols: Mat, what: str) -> Mat:
    sol = solve_particular(K.basis.transpose(), cols)
    if sol is None:
        raise MutationError(f"closure failure: {what} leaves the kernel")
    return sol


def mutate_rs_spec(spec: RsSpec, dims: DimVector, p: int) -> MutatedRs:
    """The type-(p+1, r+s-p-1) spec of the mutated problem.

    Dimension table:
      M'_i = M_i (i <= p),  dim M'_{p+1} = sum_{j>p} m_j h_1j - n_1
      N'_l = M_{l+p} (l <= r-p),  N'_l = N_{l-r+p+1} (l > r-p)
      A'_{ji} = A_ji (j <= p),  A'_{p+1,i} = H_1i
      B'_{lm} = A_{l+p,m+p} | ker(B_{.,1} (x) H_1. -> H) | B_{..}
      H'_{li} = (H_1i (x) H*_1L)/A_Li | H_{.,i} | H*_1L | B_{.,1}
    Induced compositions by lifting; descent and closure are checked.
    """
    r, s = spec.r, spec.s
    if not 0 <= p <= r - 1:
        raise MutationError("bad mutation index")
    f = spec.field
    m, n = dims.m, dims.n
    rp, sp = p + 1, r + s - p - 1
    na = r - p  # size of the A-range of new target indices
    d2 = sum(spec.hdim(1, j) * m[j - 1] for j in range(p + 1, r + 1))
    m_new_last = d2 - n[0]
    if m_new_last <= 0:
        raise MutationError("need n_1 < sum_{j>p} m_j dim H_1j")

    def Lof(lp):
        return lp + p          # A-range original source index

    def Gof(lp):
        return lp - r + p + 1  # B-range original target index

    # quotient data for H'_{li}, i <= p, l in the A-range
    quot = {}
    for lp in range(1, na + 1):
        L = Lof(lp)
        for i in range(1, p + 1):
            emb = _embedding_A_in_HH(spec, L, i)
            if rank(emb) != spec.adim(L, i):
                raise MutationError(f"A_{L}{i} does not embed into H (x) H*")
            sub = Subspace.from_matrix_rows(emb.transpose())
            amb = spec.hdim(1, i) * spec.hdim(1, L)
            quot[(lp, i)] = (quotient_map(amb, sub), quotient_section(amb, sub), emb)

    # kernels for B'_{lm}, l in the B-range, m in the A-range
    kerBH = {}
    for lp in range(na + 1, sp + 1):
        G = Gof(lp)
        for mp in range(1, na + 1):
            M = Lof(mp)
            kerBH[(lp, mp)] = kernel_basis(spec.compBH[(G, 1, M)])

    dimH = []
    for lp in range(1, sp + 1):
        row = []
        for ip in range(1, p + 1):
            if lp <= na:
                row.append(quot[(lp, ip)][0].rows)
            else:
                row.append(spec.hdim(Gof(lp), ip))
        if lp <= na:
            row.append(spec.hdim(1, Lof(lp)))
        else:
            row.append(spec.bdim(Gof(lp), 1))
        dimH.append(tuple(row))
    dimH = tuple(dimH)

    dimA = {}
    for ip in range(1, rp + 1):
        for jp in range(ip, rp + 1):
            if jp <= p:
                dimA[(jp, ip)] = spec.adim(jp, ip)
            elif ip <= p:
                dimA[(jp, ip)] = spec.hdim(1, ip)
            else:
                dimA[(jp, ip)] = 1
    dimB = {}
    for lp in range(1, sp + 1):
        for mp in range(lp, sp + 1):
            if mp <= na:
                dimB[(mp, lp)] = spec.adim(Lof(mp), Lof(lp))
            elif lp > na:
                dimB[(mp, lp)] = spec.bdim(Gof(mp), Gof(lp))
            else:
                dimB[(mp, lp)] = kerBH[(mp, lp)].dim

    I = lambda k: Mat.identity(f, k)

    def hdim_new(lp, ip):
        return dimH[lp - 1][ip - 1]

    # --- compHA': H'_{lj} (x) A'_{ji} -> H'_{li} -------------------------
    compHA = {}
    for lp in range(1, sp + 1):
        for ip in range(1, rp + 1):
            for jp in range(ip, rp + 1):
                key = (lp, jp, ip)
                if lp > na:
                    G = Gof(lp)
                    if jp <= p:
                        compHA[key] = spec.compHA[(G, jp, ip)]
                    elif ip <= p:
                        compHA[key] = spec.compBH[(G, 1, ip)]
                    else:
                        compHA[key] = I(spec.bdim(G, 1))
                    continue
                L = Lof(lp)
                h1L = spec.hdim(1, L)
                if jp == rp and ip == rp:
                    compHA[key] = I(h1L)
                    continue
                P_li, _, emb_li = quot[(lp, ip)]
                if jp == rp:
                    # projection H*_1L (x) H_1i -> quotient (swap the pair)
                    h1i = spec.hdim(1, ip)
                    cols = []
                    for b in range(h1L):
                        for d in range(h1i):
                            cols.append(P_li.submatrix(range(P_li.rows), [d * h1L + b]))
                    mat = cols[0]
                    for c in cols[1:]:
                        mat = mat.hstack(c)
                    compHA[key] = mat
                    continue
                # i <= j <= p: lift from the (l, j) quotient, compose, project
                P_lj, S_lj, emb_lj = quot[(lp, jp)]
                comp = spec.compHA[(1, jp, ip)]
                da = spec.adim(jp, ip)
                h1j, h1i = spec.hdim(1, jp), spec.hdim(1, ip)

                def push(vec_col):
                    out = [f.zero()] * (h1i * h1L)
                    for dj in range(h1j):
                        for b in range(h1L):
                            v = vec_col.get(dj * h1L + b, 0)
                            if v == 0:
                                continue
                            for di in range(h1i):
                                cv = comp.get(di, dj * da + push.c)
                                if cv != 0:
                                    out[di * h1L + b] = f.add(out[di * h1L + b],
                                                              f.mul(cv, v))
                    return Mat(f, h1i * h1L, 1, tuple(out))

                cols = []
                for q in range(P_lj.rows):
                    lift = S_lj.submatrix(range(S_lj.rows), [q])
                    for c in range(da):
                        push.c = c
                        cols.append(P_li.mul(push(lift)))
                if cols:
                    mat = cols[0]
                    for c in cols[1:]:
                        mat = mat.hstack(c)
                else:
                    mat = Mat.zeros(f, P_li.rows, P_lj.rows * da)
                compHA[key] = mat
                # descent: embedded A_Lj (x) A_ji must land in embedded A_Li
                for ecol in range(emb_lj.cols):
                    lift = emb_lj.submatrix(range(emb_lj.rows), [ecol])
                    for c in range(da):
                        push.c = c
                        if not P_li.mul(push(lift)).is_zero():
                            raise MutationError(
                                f"descent failure in compHA'{key}")

    # --- compAA': A'_{kj} (x) A'_{ji} -> A'_{ki} -------------------------
    compAA = {}
    for ip in range(1, rp + 1):
        for jp in range(ip, rp + 1):
            for kp in range(jp, rp + 1):
                key = (kp, jp, ip)
                if kp <= p:
                    compAA[key] = spec.compAA[(kp, jp, ip)]
                elif jp <= p:
                    compAA[key] = spec.compHA[(1, jp, ip)]
                elif ip <= p:
                    compAA[key] = I(spec.hdim(1, ip))
                else:
                    compAA[key] = I(1)

    # --- compBH': B'_{ml} (x) H'_{li} -> H'_{mi} -------------------------
    compBH = {}
    for ip in range(1, rp + 1):
        for lp in range(1, sp + 1):
            for mp in range(lp, sp + 1):
                key = (mp, lp, ip)
                if lp > na:
                    # both targets in the B-range
                    Gm, Gl = Gof(mp), Gof(lp)
                    if ip <= p:
                        compBH[key] = spec.compBH[(Gm, Gl, ip)]
                    else:
                        compBH[key] = spec.compBB[(Gm, Gl, 1)]
                    continue
                L = Lof(lp)
                h1L = spec.hdim(1, L)
                if mp <= na:
                    M = Lof(mp)
                    ind = _induced_dual_H(spec, M, L)  # H*_1L (x) A_ML -> H*_1M
                    daML = spec.adim(M, L)
                    h1M = spec.hdim(1, M)
                    if ip == rp:
                        # A_ML (x) H*_1L -> H*_1M (factors of ind swapped)
                        rows = [[ind.get(bM, bL * daML + c)
                                 for c in range(daML) for bL in range(h1L)]
                                for bM in range(h1M)]
                        compBH[key] = (Mat.from_rows(f, rows) if h1M
                                       else Mat.zeros(f, 0, daML * h1L))
                        continue
                    P_li, S_li, emb_li = quot[(lp, ip)]
                    P_mi, _, _ = quot[(mp, ip)]
                    h1i = spec.hdim(1, ip)

                    def act_on_dual(vec_col, c):
                        out = [f.zero()] * (h1i * h1M)
                        for d in range(h1i):
                            for bL in range(h1L):
                                v = vec_col.get(d * h1L + bL, 0)
                                if v == 0:
                                    continue
                                for bM in range(h1M):
                                    iv = ind.get(bM, bL * daML + c)
                                    if iv != 0:
                                        out[d * h1M + bM] = f.add(
                                            out[d * h1M + bM], f.mul(iv, v))
                        return Mat(f, h1i * h1M, 1, tuple(out))

                    cols = []
                    for c in range(daML):
                        for q in range(P_li.rows):
                            lift = S_li.submatrix(range(S_li.rows), [q])
                            cols.append(P_mi.mul(act_on_dual(lift, c)))
                    if cols:
                        mat = cols[0]
                        for cc in cols[1:]:
                            mat = mat.hstack(cc)
                    else:
                        mat = Mat.zeros(f, P_mi.rows, daML * P_li.rows)
                    compBH[key] = mat
                    for c in range(daML):
                        for ecol in range(emb_li.cols):
                            lift = emb_li.submatrix(range(emb_li.rows), [ecol])
                            if not P_mi.mul(act_on_dual(lift, c)).is_zero():
                                raise MutationError(f"descent failure in compBH'{key}")
                    continue
                # m in the B-range, l in the A-range
                G = Gof(mp)
                K = kerBH[(mp, lp)]
                dB = spec.bdim(G, 1)
                if ip == rp:
                    # ker (x) H*_1L -> B_G1 by contraction
                    rows = [[K.basis.get(t, cB * h1L + bL)
                             for t in range(K.dim) for bL in range(h1L)]
                            for cB in range(dB)]
                    compBH[key] = (Mat.from_rows(f, rows) if dB
                                   else Mat.zeros(f, 0, K.dim * h1L))
                    continue
                P_li, S_li, emb_li = quot[(lp, ip)]
                h1i = spec.hdim(1, ip)
                compBH_G1i = spec.compBH[(G, 1, ip)]

                def contract_and_push(t, vec_col):
                    mid = [f.zero()] * (dB * h1i)
                    for cB in range(dB):
                        for d in range(h1i):
                            acc = f.zero()
                            for e in range(h1L):
                                kv = K.basis.get(t, cB * h1L + e)
                                if kv == 0:
                                    continue
                                vv = vec_col.get(d * h1L + e, 0)
                                if vv != 0:
                                    acc = f.add(acc, f.mul(kv, vv))
                            mid[cB * h1i + d] = acc
                    return compBH_G1i.mul(Mat(f, dB * h1i, 1, tuple(mid)))

                cols = []
                for t in range(K.dim):
                    for q in range(P_li.rows):
                        lift = S_li.submatrix(range(S_li.rows), [q])
                        cols.append(contract_and_push(t, lift))
                if cols:
                    mat = cols[0]
                    for cc in cols[1:]:
                        mat = mat.hstack(cc)
                else:
                    mat = Mat.zeros(f, spec.hdim(G, ip), K.dim * P_li.rows)
                compBH[key] = mat
                for t in range(K.dim):
                    for ecol in range(emb_li.cols):
                        lift = emb_li.submatrix(range(emb_li.rows), [ecol])
                        if not contract_and_push(t, lift).is_zero():
                            raise MutationError(f"descent failure in compBH'{key}")

    # --- compBB': B'_{nm} (x) B'_{ml} -> B'_{nl} -------------------------
    compBB = {}
    for lp in range(1, sp + 1):
        for mp in range(lp, sp + 1):
            for np_ in range(mp, sp + 1):
                key = (np_, mp, lp)
                if np_ <= na:
                    compBB[key] = spec.compAA[(Lof(np_), Lof(mp), Lof(lp))]
                    continue
                if lp > na:
                    compBB[key] = spec.compBB[(Gof(np_), Gof(mp), Gof(lp))]
                    continue
                Gn = Gof(np_)
                L = Lof(lp)
                h1L = spec.hdim(1, L)
                dBn = spec.bdim(Gn, 1)
                K_nl = kerBH[(np_, lp)]
                if mp <= na:
                    # ker_{n,m} (x) A_ML -> ker_{n,l}
                    M = Lof(mp)
                    h1M = spec.hdim(1, M)
                    comp = spec.compHA[(1, M, L)]
                    daML = spec.adim(M, L)
                    K_nm = kerBH[(np_, mp)]
                    cols = []
                    for t in range(K_nm.dim):
                        for c in range(daML):
                            out = [f.zero()] * (dBn * h1L)
                            for cB in range(dBn):
                                for eM in range(h1M):
                                    kv = K_nm.basis.get(t, cB * h1M + eM)
                                    if kv == 0:
                                        continue
                                    for eL in range(h1L):
                                        cv = comp.get(eL, eM * daML + c)
                                        if cv != 0:
                                            out[cB * h1L + eL] = f.add(
                                                out[cB * h1L + eL], f.mul(kv, cv))
                            cols.append(Mat(f, dBn * h1L, 1, tuple(out)))
                    if cols:
                        raw = cols[0]
                        for cc in cols[1:]:
                            raw = raw.hstack(cc)
                        compBB[key] = _kernel_coords(K_nl, raw, f"compBB'{key}")
                    else:
                        compBB[key] = Mat.zeros(f, K_nl.dim, 0)
                    continue
                # n, m in the B-range, l in the A-range
                Gm = Gof(mp)
                dBnm = spec.bdim(Gn, Gm)
                dBm1 = spec.bdim(Gm, 1)
                compbb = spec.compBB[(Gn, Gm, 1)]
                K_ml = kerBH[(mp, lp)]
                cols = []
                for cc_ in range(dBnm):
                    for t in range(K_ml.dim):
                        out = [f.zero()] * (dBn * h1L)
                        for cin in range(dBm1):
                            for e in range(h1L):
                                kv = K_ml.basis.get(t, cin * h1L + e)
                                if kv == 0:
                                    continue
                                for cout in range(dBn):
                                    bv = compbb.get(cout, cc_ * dBm1 + cin)
                                    if bv != 0:
                                        out[cout * h1L + e] = f.add(
                                            out[cout * h1L + e], f.mul(kv, bv))
                        cols.append(Mat(f, dBn * h1L, 1, tuple(out)))
                if cols:
                    raw = cols[0]
                    for cc2 in cols[1:]:
                        raw = raw.hstack(cc2)
                    compBB[key] = _kernel_coords(K_nl, raw, f"compBB'{key}")
                else:
                    compBB[key] = Mat.zeros(f, K_nl.dim, 0)

    new_m = tuple(m[i - 1] for i in range(1, p + 1)) + (m_new_last,)
    new_n = tuple(m[j - 1] for j in range(p + 1, r + 1)) + tuple(n[l - 1] for l in range(2, s + 1))
    new_dims = DimVector(new_m, new_n)
    new_spec = RsSpec(f, rp, sp, dimH, dimA, dimB, compHA, compAA, compBH, compBB)
    return MutatedRs(new_spec, new_dims, p, spec, dims, quot, kerBH)


# ---------------------------------------------------------------------------
# Point-level mutation in (r,s) terms


def mutate_rs_point(spec: RsSpec, dims: DimVector, p: int, w: PointW,
                    u: Mat | None = None, alpha: Mat | None = None,
                    trs: ThetaRs | None = None, mut: MutatedRs | None = None):
    """z(w) as a point of the mutated spec.  Returns (mut, w', u, alpha).

    trs and mut may be passed in to amortize the spec-level constructions
    over many points; they must come from the same (spec, dims, p)."""
    if trs is None:
        trs = theta_from_rs(spec, dims, p)
    pt = point_to_theta(trs, w)
    if not theta_in_W0(trs.theta, pt):
        raise MutationError("point is not in W^0_p")
    if mut is None:
        mut = mutate_rs_spec(spec, dims, p)
    z, u, alpha = mutate_point(trs.theta, pt, u, alpha, proj4=trs.proj4)
    f = spec.field
    r, s = spec.r, spec.s
    na = r - p
    m, n = dims.m, dims.n
    Kphi = z.phi2.transpose()       # m' x d2, rows = kernel basis of phi2_bar
    mprime = Kphi.rows
    d1 = trs.theta.d1
    new_dims = mut.dims
    if new_dims.m[p] != mprime:
        raise MutationError("kernel dimension does not match the table")

    blocks = []
    for lp in range(1, mut.s_new + 1):
        row = []
        for ip in range(1, mut.r_new + 1):
            n_l = new_dims.n[lp - 1]
            h_li = mut.spec.hdim(lp, ip)
            m_i = new_dims.m[ip - 1]
            ent = [[f.zero()] * (h_li * m_i) for _ in range(n_l)]
            if ip <= p and lp <= na:
                L = lp + p
                P_li, _, _ = mut.quot[(lp, ip)]
                h1L, h1i = spec.hdim(1, L), spec.hdim(1, ip)
                for q in range(h_li):
                    for mu in range(m_i):
                        for nu in range(n_l):
                            acc = f.zero()
                            for d in range(h1i):
                                for b in range(h1L):
                                    pv = P_li.get(q, d * h1L + b)
                                    if pv == 0:
                                        continue
                                    av = alpha.get(
                                        trs.x2lay.pos(L, b, nu) * d1
                                        + trs.x1lay.pos(ip, d, mu), 0)
                                    if av != 0:
                                        acc = f.add(acc, f.mul(pv, av))
                            ent[nu][q * m_i + mu] = acc
            elif ip <= p:
                G = lp - r + p + 1
                for a in range(h_li):
                    for mu in range(m_i):
                        for nu in range(n_l):
                            ent[nu][a * m_i + mu] = z.x3.get(
                                trs.x3lay.pos((G, ip), a, mu, nu), 0)
            elif lp <= na:
                L = lp + p
                for a in range(h_li):
                    for t in range(mprime):
                        for nu in range(n_l):
                            ent[nu][a * m_i + t] = Kphi.get(
                                t, trs.x2lay.pos(L, a, nu))
            else:
                G = lp - r + p + 1
                for b in range(h_li):
                    for t in range(mprime):
                        for nu in range(n_l):
                            ent[nu][b * m_i + t] = z.phi1.get(
                                trs.hrlay.pos(G, b, nu), t)
            row.append(Mat.from_rows(f, ent) if n_l else Mat.zeros(f, 0, h_li * m_i))
        blocks.append(row)
    wprime = point_from_blocks(new_dims, blocks)
    check_point_shapes(mut.spec, wprime)
    return mut, wprime, u, alpha


def in_W0_mutated(mut: MutatedRs, wprime: PointW) -> bool:
    """Membership in W'_0(p): the mutated point's column-space condition,
    i.e. the map (+)_{l<=r-p} H_1L (x) M_L* -> (M'_{p+1})* assembled from
    the (l, p+1) blocks is surjective."""
    spec, p = mut.src_spec, mut.p
    f = spec.field
    na = spec.r - p
    mprime = mut.dims.m[p]
    rows = [[] for _ in range(mprime)]
    for lp in range(1, na + 1):
        L = lp + p
        blk = wprime.block(lp, mut.r_new)
        h1L = spec.hdim(1, L)
        mL = mut.dims.n[lp - 1]
        for t in range(mprime):
            for a in range(h1L):
                for nu in range(mL):
                    rows[t].append(blk.get(nu, a * mprime + t))
    if not rows or not rows[0]:
        return mprime == 0
    return rank(Mat.from_rows(f, rows)) == mprime


# ---------------------------------------------------------------------------
# Polarization transport (the associated polarization)


@dataclass(frozen=True)
class TransportedPolarization:
    alpha: tuple
    beta: tuple
    c: Fraction

    def as_polarization(self) -> Polarization:
        return Polarization(self.alpha, self.beta)

    def to_json(self):
        return {"alpha": [str(x) for x in self.alpha],
                "beta": [str(x) for x in self.beta],
                "c": str(self.c)}


def transport_from_dims(lam, mu, m, n, h1row, p) -> TransportedPolarization:
    """Transport (lambda; mu) along the index-p mutation, given only the
    dimension data: m, n and the first row h1row[i] = dim H_1i."""
    r, s = len(m), len(n)
    lam = [Fraction(x) for x in lam]
    mu = [Fraction(x) for x in mu]
    c = sum(lam[i - 1] * m[i - 1] for i in range(1, p + 1)) \
        + mu[0] * (sum(m[j - 1] * h1row[j - 1] for j in range(p + 1, r + 1)) - n[0])
    if c <= 0:
        raise MutationError(f"normalization constant c = {c} must be positive")
    alpha = tuple(lam[i - 1] / c for i in range(1, p + 1)) + (mu[0] / c,)
    beta = []
    for lp in range(1, r - p + 1):
        beta.append((mu[0] * h1row[lp + p - 1] - lam[lp + p - 1]) / c)
    for lp in range(r - p + 1, r + s - p):
        beta.append(mu[lp - r + p] / c)
    beta = tuple(beta)
    if any(x <= 0 for x in alpha) or any(x <= 0 for x in beta):
        raise MutationError("transported polarization has a nonpositive entry")
    return TransportedPolarization(alpha, beta, c)


def transport_polarization(pol: Polarization, spec: RsSpec, dims: DimVector,
                           p: int) -> TransportedPolarization:
    pol.check(dims)
    h1row = [spec.hdim(1, i) for i in range(1, spec.r + 1)]
    return transport_from_dims(pol.lam, pol.mu, dims.m, dims.n, h1row, p)


def window_predicates(pol: Polarization, dims: DimVector, spec: RsSpec, p: int) -> dict:
    """Exact evaluation of the transfer-window inequalities.

    thm75 is the two-sided window Max(1/(n1+1), 1 - T) <= mu_1 < T/(n1 - 1)
    with T = sum_{j>p} lambda_j m_j; for n1 = 1 the upper bound is +infinity
    and the condition is the left half alone.
    """
    lam, mu = pol.lam, pol.mu
    n1 = dims.n[0]
    T = sum(lam[j - 1] * dims.m[j - 1] for j in range(p + 1, spec.r + 1))
    head = sum(lam[i - 1] * dims.m[i - 1] for i in range(1, p + 1))
    prop71 = head <= mu[0]
    cor72 = mu[0] >= Fraction(1, n1 + 1)
    prop73 = True if n1 == 1 else mu[0] < T / (n1 - 1)
    cor74 = mu[0] > T / (n1 + 1)
    lower = max(Fraction(1, n1 + 1), 1 - T)
    thm75 = lower <= mu[0] and prop73
    return {"prop71": prop71, "cor72": cor72, "prop73": prop73,
            "cor74": cor74, "thm75": thm75}
