"""Abstract morphism spaces Theta and their mutation.

A Theta is the linear-algebra core of a morphism problem: spaces
X1, X2, X3, X4, H_L, H_R, M with pairings

    gamma1 : X2 (x) H_L -> X1        gamma3 : H_R (x) X1 -> X3
    gamma2 : X4 (x) H_L -> X3        gamma4 : H_R (x) X2 -> X4

subject to the commuting square gamma3 o (I (x) gamma1) = gamma2 o
(gamma4 (x) I), with gamma4 surjective and the induced map
gamma1_bar : H_L -> X2* (x) X1 injective, and dim M < dim X2.

The total space is W = (X1 (x) M) (+) (X2 (x) M) (+) X3 (+) X4; points
store phi1, phi2 as dX x dimM matrices and x3, x4 as column vectors.

The mutation D(Theta) swaps the roles:
    X1' = H_R, X2' = X2*, X3' = X3, X4' = (X2* (x) X1)/H_L,
    H_R' = X1, H_L' = ker(gamma4),
with gamma2' obtained by lifting a class of X4', contracting against
ker(gamma4) and applying gamma3; the lift ambiguity lies in the image of
gamma1_bar and is killed by the commuting square (asserted numerically).

Canonical bases: ker(gamma4) and ker(phi2_bar) carry their RREF bases,
quotients carry the pivot-complement coordinates of matrix.quotient_map.
All identifications in D(D(Theta)) = Theta are explicit matrices in these
bases, and point mutation z(w, u, alpha) is a function of (w, u, alpha),
with the deterministic echelon solution chosen when u, alpha are omitted.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .matrix import Mat, Field, Subspace, kernel_basis, quotient_map, quotient_section, rank, solve_particular
from .rs_spec import DimVector, PointW, RsSpec, swap_factors


class ThetaError(ValueError):
    pass


@dataclass(frozen=True)
class Theta:
    field: Field
    d1: int
    d2: int
    d3: int
    d4: int
    dHL: int
    dHR: int
    dM: int
    gamma1: Mat  # d1 x (d2 * dHL)
    gamma2: Mat  # d3 x (d4 * dHL)
    gamma3: Mat  # d3 x (dHR * d1)
    gamma4: Mat  # d4 x (dHR * d2)
    group_desc: tuple = ("signs",)

    def dims(self):
        return (self.d1, self.d2, self.d3, self.d4, self.dHL, self.dHR, self.dM)


@dataclass(frozen=True)
class ThetaPoint:
    phi1: Mat  # d1 x dM
    phi2: Mat  # d2 x dM
    x3: Mat    # d3 x 1
    x4: Mat    # d4 x 1

    def key(self):
        return (self.phi1.entries, self.phi2.entries, self.x3.entries, self.x4.entries)


def gamma1_bar(th: Theta) -> Mat:
    """H_L -> X2* (x) X1 (rows indexed xi2 * d1 + x1)."""
    rows = []
    for xi2 in range(th.d2):
        for x1 in range(th.d1):
            rows.append([th.gamma1.get(x1, xi2 * th.dHL + h) for h in range(th.dHL)])
    if not rows:
        return Mat.zeros(th.field, 0, th.dHL)
    return Mat.from_rows(th.field, rows)


def validate_theta(th: Theta):
    """Raise ThetaError unless all structural invariants hold."""
    f = th.field
    exp = {
        "gamma1": (th.d1, th.d2 * th.dHL),
        "gamma2": (th.d3, th.d4 * th.dHL),
        "gamma3": (th.d3, th.dHR * th.d1),
        "gamma4": (th.d4, th.dHR * th.d2),
    }
    for name, shape in exp.items():
        if getattr(th, name).shape != shape:
            raise ThetaError(f"{name} has shape {getattr(th, name).shape}, want {shape}")
    if not th.dM < th.d2:
        raise ThetaError(f"need dim M < dim X2, got {th.dM} >= {th.d2}")
    # commuting square: gamma3 (I (x) gamma1) = gamma2 (gamma4 (x) I)
    lhs = th.gamma3.mul(Mat.identity(f, th.dHR).kron(th.gamma1))
    rhs = th.gamma2.mul(th.gamma4.kron(Mat.identity(f, th.dHL)))
    if lhs != rhs:
        raise ThetaError("square (D) does not commute")
    if rank(th.gamma4) != th.d4:
        raise ThetaError("gamma4 is not surjective")
    if rank(gamma1_bar(th)) != th.dHL:
        raise ThetaError("gamma1_bar is not injective")


def phi2_bar(pt: ThetaPoint) -> Mat:
    """The induced map X2* -> M (dM x d2 matrix)."""
    return pt.phi2.transpose()


def in_W0(th: Theta, pt: ThetaPoint) -> bool:
    return rank(phi2_bar(pt)) == th.dM


def zero_theta_point(th: Theta) -> ThetaPoint:
    f = th.field
    return ThetaPoint(Mat.zeros(f, th.d1, th.dM), Mat.zeros(f, th.d2, th.dM),
                      Mat.zeros(f, th.d3, 1), Mat.zeros(f, th.d4, 1))


def _vec(m: Mat) -> Mat:
    """Flatten a dA x dB element matrix to a column, index a * dB + b."""
    ent = tuple(m.get(i, j) for i in range(m.rows) for j in range(m.cols))
    return Mat(m.field, m.rows * m.cols, 1, ent)


def _unvec(v: Mat, rows: int, cols: int) -> Mat:
    ent = tuple(v.get(i * cols + j, 0) for i in range(rows) for j in range(cols))
    return Mat(v.field, rows, cols, ent)


def swap_tensor_vec(v: Mat, dim_u: int, dim_v: int) -> Mat:
    """Reindex a column vector from U (x) V coordinates to V (x) U."""
    ent = tuple(v.get(u * dim_v + vv, 0) for vv in range(dim_v) for u in range(dim_u))
    return Mat(v.field, dim_u * dim_v, 1, ent)


# ---------------------------------------------------------------------------
# H-part actions on points (the unipotent shifts of G_L and G_R)


def act_hL(th: Theta, pt: ThetaPoint, hvec: Mat) -> ThetaPoint:
    """Right action of (1 0; h_L 1): phi1 += (gamma1 (x) I)(phi2 (x) h),
    x3 += gamma2(x4 (x) h)."""
    if hvec.shape != (th.dHL, 1):
        raise ThetaError("h_L must be a dHL column")
    phi1 = pt.phi1.add(th.gamma1.mul(pt.phi2.kron(hvec)))
    x3 = pt.x3.add(th.gamma2.mul(pt.x4.kron(hvec)))
    return ThetaPoint(phi1, pt.phi2, x3, pt.x4)


def act_lambda(th: Theta, pt: ThetaPoint, lam: Mat) -> ThetaPoint:
    """Left action of (1 0; lambda 1) with lambda in M* (x) H_R given as a
    dHR x dM matrix: x3 += gamma3(<lambda, phi1>), x4 += gamma4(<lambda, phi2>)."""
    if lam.shape != (th.dHR, th.dM):
        raise ThetaError("lambda must be dHR x dM")
    x3 = pt.x3.add(th.gamma3.mul(_vec(lam.mul(pt.phi1.transpose()))))
    x4 = pt.x4.add(th.gamma4.mul(_vec(lam.mul(pt.phi2.transpose()))))
    return ThetaPoint(pt.phi1, pt.phi2, x3, x4)


def act_signs(th: Theta, pt: ThetaPoint, eps_left: int, eps_right: int) -> ThetaPoint:
    """Action of the sign pair diag(eps_right, 1) on the left and
    diag(1, eps_left) on the right (eps in {1, -1})."""
    f = th.field
    sL = f.canon(eps_left)
    sR = f.canon(eps_right)
    return ThetaPoint(pt.phi1.scale(f.mul(sR, f.one())), pt.phi2.scale(f.mul(sR, sL)),
                      pt.x3, pt.x4.scale(sL))


# ---------------------------------------------------------------------------
# The mutation D(Theta)


@dataclass(frozen=True)
class ThetaMutation:
    """D(Theta) together with the canonical bases used to build it."""

    theta: Theta          # the source
    dual: Theta           # D(Theta)
    ker_g4: Subspace      # H_L' = ker(gamma4) as subspace of H_R (x) X2
    im_g1bar: Subspace    # image of gamma1_bar in X2* (x) X1
    proj4: Mat            # X2* (x) X1 -> X4' (quotient map)
    sect4: Mat            # section of proj4


def dual_theta(th: Theta) -> ThetaMutation:
    f = th.field
    g1b = gamma1_bar(th)
    im = Subspace.from_matrix_rows(g1b.transpose())
    if im.dim != th.dHL:
        raise ThetaError("gamma1_bar is not injective")
    P4 = quotient_map(th.d2 * th.d1, im)
    S4 = quotient_section(th.d2 * th.d1, im)
    K = kernel_basis(th.gamma4)  # subspace of H_R (x) X2
    d1p, d2p, d3p = th.dHR, th.d2, th.d3
    d4p = P4.rows
    dHLp, dHRp = K.dim, th.d1
    dMp = th.d2 - th.dM

    # gamma1': X2' (x) H_L' -> X1' = H_R, contraction against ker(gamma4)
    rows = []
    for hR in range(th.dHR):
        row = []
        for xi2 in range(th.d2):
            for t in range(K.dim):
                row.append(K.basis.get(t, hR * th.d2 + xi2))
        rows.append(row)
    g1p = (Mat.from_rows(f, rows) if th.dHR and th.d2 * K.dim
           else Mat.zeros(f, th.dHR, th.d2 * K.dim))

    # gamma3': X1 (x) H_R -> X3 is gamma3 with swapped tensor factors
    g3p = swap_factors(th.gamma3, th.dHR, th.d1)

    # gamma4': X1 (x) X2* -> X4' is the projection, factors swapped
    g4p = swap_factors(P4, th.d2, th.d1)

    # gamma2': X4' (x) H_L' -> X3 by lift, contract, gamma3
    cols = []
    for q in range(d4p):
        beta = _unvec(S4.submatrix(range(S4.rows), [q]), th.d2, th.d1)
        for t in range(K.dim):
            kap = _unvec(Mat.from_rows(f, [K.basis.row_list(t)]).transpose(),
                         th.dHR, th.d2)
            inner = kap.mul(beta)  # dHR x d1
            cols.append(th.gamma3.mul(_vec(inner)))
    if cols:
        g2p = cols[0]
        for c in cols[1:]:
            g2p = g2p.hstack(c)
    else:
        g2p = Mat.zeros(f, th.d3, d4p * K.dim)

    # well-definedness: the lift ambiguity dies against ker(gamma4)
    for t in range(K.dim):
        kap = _unvec(Mat.from_rows(f, [K.basis.row_list(t)]).transpose(),
                     th.dHR, th.d2)
        for h in range(th.dHL):
            beta = _unvec(g1b.submatrix(range(g1b.rows), [h]), th.d2, th.d1)
            if not th.gamma3.mul(_vec(kap.mul(beta))).is_zero():
                raise ThetaError("gamma2' is not well defined (invalid Theta?)")

    dual = Theta(f, d1p, d2p, d3p, d4p, dHLp, dHRp, dMp,
                 g1p, g2p, g3p, g4p, ("mutated",) + th.group_desc)
    validate_theta(dual)
    return ThetaMutation(th, dual, K, im, P4, S4)


def ddtheta_identifications(th: Theta):
    """Canonical maps from the spaces of D(D(Theta)) back to Theta.

    Returns (mut1, mut2, maps) where maps contains invertible matrices
    id_X1 .. id_X4, id_HL, id_HR with id_* : space of Theta'' -> space of
    Theta, under which all four gamma tensors agree.
    """
    f = th.field
    mut1 = dual_theta(th)
    mut2 = dual_theta(mut1.dual)
    th2 = mut2.dual
    if (th2.d1, th2.d2, th2.d3, th2.d4, th2.dHL, th2.dHR, th2.dM) != th.dims():
        raise ThetaError("D(D(Theta)) dimension mismatch")

    id_X1 = Mat.identity(f, th.d1)
    id_X2 = Mat.identity(f, th.d2)
    id_X3 = Mat.identity(f, th.d3)
    id_HR = Mat.identity(f, th.dHR)

    # X4'' = (X2 (x) H_R)/ker(gamma4), identified with X4 via gamma4
    swap_to_hr_x2 = swap_factors(Mat.identity(f, th.dHR * th.d2), th.dHR, th.d2)
    id_X4 = th.gamma4.mul(swap_to_hr_x2).mul(mut2.sect4)
    if rank(id_X4) != th.d4:
        raise ThetaError("X4'' identification is not invertible")

    # H_L'' = ker(gamma4') inside X1 (x) X2*; gamma1_bar identifies it with H_L
    g1b = gamma1_bar(th)
    K2 = mut2.ker_g4  # subspace of X1 (x) X2*
    swap_to_x2_x1 = swap_factors(Mat.identity(f, th.d1 * th.d2), th.d2, th.d1)
    targets = swap_to_x2_x1.mul(K2.basis.transpose())  # columns in X2* (x) X1
    id_HL = solve_particular(g1b, targets)
    if id_HL is None:
        raise ThetaError("H_L'' does not come from gamma1_bar(H_L)")
    if th.dHL and rank(id_HL) != th.dHL:
        raise ThetaError("H_L'' identification is not invertible")

    maps = {"X1": id_X1, "X2": id_X2, "X3": id_X3, "X4": id_X4,
            "HL": id_HL, "HR": id_HR}
    return mut1, mut2, maps


def point_m_identification(th: Theta, pt: ThetaPoint) -> Mat:
    """The canonical map M'' = ker(phi2_bar')* -> M attached to a W^0 point.

    The transpose of phi2_bar embeds M* onto ker(phi2_bar') inside X2; its
    transpose is the identification, expressed here in the RREF bases."""
    pb = phi2_bar(pt)              # dM x d2
    K = kernel_basis(pb)           # basis of ker(phi2_bar)
    K2 = kernel_basis(K.basis)     # ker(phi2_bar') = ann(ker) in X2
    C = solve_particular(K2.basis.transpose(), pb.transpose())
    if C is None:
        raise ThetaError("no canonical M'' identification (point not in W^0?)")
    return C.transpose()


def check_ddtheta(th: Theta) -> bool:
    """D(D(Theta)) = Theta: dimensions and all four gamma tensors match
    after the canonical identifications."""
    mut1, mut2, maps = ddtheta_identifications(th)
    th2 = mut2.dual
    ok = (th.gamma1.mul(maps["X2"].kron(maps["HL"])) == maps["X1"].mul(th2.gamma1)
          and th.gamma2.mul(maps["X4"].kron(maps["HL"])) == maps["X3"].mul(th2.gamma2)
          and th.gamma3.mul(maps["HR"].kron(maps["X1"])) == maps["X3"].mul(th2.gamma3)
          and th.gamma4.mul(maps["HR"].kron(maps["X2"])) == maps["X4"].mul(th2.gamma4))
    return ok


# ---------------------------------------------------------------------------
# Point mutation z(w, u, alpha)


def q_phi2(th: Theta, pt: ThetaPoint) -> Mat:
    """q(phi2) = phi2_bar (x) I_X1 : X2* (x) X1 -> M (x) X1."""
    return phi2_bar(pt).kron(Mat.identity(th.field, th.d1))


def x4_projection(th: Theta) -> Mat:
    """The canonical quotient map X2* (x) X1 -> X4' = (X2* (x) X1)/H_L."""
    im = Subspace.from_matrix_rows(gamma1_bar(th).transpose())
    if im.dim != th.dHL:
        raise ThetaError("gamma1_bar is not injective")
    return quotient_map(th.d2 * th.d1, im)


def mutate_point(th: Theta, pt: ThetaPoint, u: Mat | None = None,
                 alpha: Mat | None = None, proj4: Mat | None = None):
    """z(w, u, alpha) in the total space of D(Theta).

    u is a column in H_R (x) X2 with gamma4(u) = -x4; alpha a column in
    X2* (x) X1 with q(phi2)(alpha) = phi1.  When omitted they are chosen
    deterministically (echelon particular solutions), making the output a
    function of w alone.  Returns (point', u, alpha).  proj4 may be passed
    in (x4_projection(th)) to amortize over many points.
    """
    f = th.field
    if not in_W0(th, pt):
        raise ThetaError("point is not in W^0 (phi2_bar not surjective)")
    pb = phi2_bar(pt)            # dM x d2
    K = kernel_basis(pb)         # ker(phi2_bar) in X2*, dim d2 - dM
    mprime = K.dim

    if u is None:
        u = solve_particular(th.gamma4, pt.x4.neg())
        if u is None:
            raise ThetaError("gamma4 not surjective")  # excluded by validation
    else:
        if th.gamma4.mul(u) != pt.x4.neg():
            raise ThetaError("supplied u does not satisfy gamma4(u) = -x4")
    qp = q_phi2(th, pt)
    rhs_rows = [[pt.phi1.get(x1, mu)] for mu in range(th.dM) for x1 in range(th.d1)]
    rhs = (Mat.from_rows(f, rhs_rows) if rhs_rows
           else Mat.zeros(f, 0, 1))
    if alpha is None:
        alpha = solve_particular(qp, rhs)
        if alpha is None:
            raise ThetaError("phi1 not in the image of q(phi2)")
    else:
        if qp.mul(alpha) != rhs:
            raise ThetaError("supplied alpha does not satisfy q(phi2)(alpha) = phi1")

    # phi2' : transpose of the inclusion ker(phi2_bar) -> X2*
    phi2p = K.basis.transpose()  # d2 x m'

    # phi1' = <phi2', u> : contract u against the kernel basis
    U = _unvec(u, th.dHR, th.d2)
    phi1p = U.mul(K.basis.transpose())  # dHR x m'

    if proj4 is None:
        proj4 = x4_projection(th)
    x4p = proj4.mul(alpha)
    A = _unvec(alpha, th.d2, th.d1)
    x3p = pt.x3.add(th.gamma3.mul(_vec(U.mul(A))))
    return ThetaPoint(phi1p, phi2p, x3p, x4p), u, alpha


def choice_set(th: Theta, pt: ThetaPoint):
    """All z(w, u, alpha) over every admissible (u, alpha).  Finite fields."""
    f = th.field
    if not f.is_finite:
        raise ThetaError("choice-set enumeration needs a finite field")
    proj4 = x4_projection(th)
    base, u0, a0 = mutate_point(th, pt, proj4=proj4)
    Ku = kernel_basis(th.gamma4)
    Ka = kernel_basis(q_phi2(th, pt))
    out = {}
    for cu in itertools.product(f.elements(), repeat=Ku.dim):
        du = Mat.zeros(f, th.dHR * th.d2, 1)
        for c, t in zip(cu, range(Ku.dim)):
            if c:
                du = du.add(Mat.from_rows(f, [Ku.basis.row_list(t)]).transpose().scale(c))
        uu = u0.add(du)
        for ca in itertools.product(f.elements(), repeat=Ka.dim):
            da = Mat.zeros(f, th.d2 * th.d1, 1)
            for c, t in zip(ca, range(Ka.dim)):
                if c:
                    da = da.add(Mat.from_rows(f, [Ka.basis.row_list(t)]).transpose().scale(c))
            z, _, _ = mutate_point(th, pt, uu, a0.add(da), proj4=proj4)
            out[z.key()] = z
    return out


def h_prime_orbit(th_dual: Theta, z: ThetaPoint):
    """Orbit of z under H' (both unipotent shift families).  Finite fields."""
    f = th_dual.field
    if not f.is_finite:
        raise ThetaError("orbit enumeration needs a finite field")
    out = {}
    for hv in itertools.product(f.elements(), repeat=th_dual.dHL):
        zh = act_hL(th_dual, z, Mat.column(f, hv))
        for lv in itertools.product(f.elements(), repeat=th_dual.dHR * th_dual.dM):
            lam = Mat(f, th_dual.dHR, th_dual.dM, tuple(f.canon(x) for x in lv))
            zz = act_lambda(th_dual, zh, lam)
            out[zz.key()] = zz
    return out
