"""Polarizations and (semi-)stability of points of W.

Two notions, both decided exhaustively over finite fields:

  * reductive-part semistability: quantifies over all tuples of subspaces
    (M'_i <= M_i, N'_l <= N_l) with at least one N'_l proper such that
    phi_li(H*_li (x) M'_i) <= N'_l for all (l, i), and requires
    sum lambda_i dim M'_i <= sum mu_l dim N'_l (strict for stability);

  * full-group semistability: every point of the H-orbit is reductive-part
    semistable.

The stable-mode quantifier skips the single all-zero tuple (M', N') = (0, 0);
with it nothing could ever be stable (0 < 0 fails), and the Kronecker form
of the criterion, which requires M' != 0, confirms the reading.

Over the rationals only a sampled mode is offered: it can certify
"not semistable" (a witness is exhibited) but never "semistable".
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .matrix import (BudgetExceeded, Field, Mat, Subspace, all_subspaces,
                     enumerate_subspaces, rank, rand_mat)
from .groups import GElem, act, enumerate_group, side_L, side_R, tri_make, tri_identity
from .rs_spec import DimVector, PointW, RsSpec, check_point_shapes


@dataclass(frozen=True)
class Polarization:
    lam: tuple  # r positive rationals
    mu: tuple   # s positive rationals

    def __post_init__(self):
        object.__setattr__(self, "lam", tuple(Fraction(x) for x in self.lam))
        object.__setattr__(self, "mu", tuple(Fraction(x) for x in self.mu))

    def check(self, dims: DimVector):
        if len(self.lam) != len(dims.m) or len(self.mu) != len(dims.n):
            raise ValueError("polarization length does not match dimension vector")
        if any(x <= 0 for x in self.lam) or any(x <= 0 for x in self.mu):
            raise ValueError("polarization entries must be positive")
        sl = sum(l * m for l, m in zip(self.lam, dims.m))
        sn = sum(u * n for u, n in zip(self.mu, dims.n))
        if sl != 1 or sn != 1:
            raise ValueError(
                f"polarization not normalized: sum lambda_i m_i = {sl}, sum mu_l n_l = {sn}")

    def to_json(self):
        return {"lambda": [str(x) for x in self.lam], "mu": [str(x) for x in self.mu]}


@dataclass
class StabilityVerdict:
    semistable: bool
    stable: bool
    certified: bool = True
    witness: object = None     # (tuple of M'-subspaces, tuple of N'-subspaces)
    witness_h: object = None   # H-element exhibiting a full-group failure
    mode: str = "semi"

    def __post_init__(self):
        if self.stable and not self.semistable:
            raise ValueError("stable implies semistable")

    def exit_code(self) -> int:
        if self.stable:
            return 0
        return 1 if self.semistable else 2

    def to_json(self):
        out = {"semistable": self.semistable, "stable": self.stable,
               "certified": self.certified, "mode": self.mode}
        if self.witness is not None:
            msubs, nsubs = self.witness
            out["witness"] = {
                "M_sub_dims": [s.dim for s in msubs],
                "N_sub_dims": [s.dim for s in nsubs],
                "M_sub_bases": [s.basis.to_lists() for s in msubs],
                "N_sub_bases": [s.basis.to_lists() for s in nsubs],
            }
        if self.witness_h is not None:
            out["witness_h"] = "nontrivial-H-element"
        return out


_SUBSPACE_CACHE: dict = {}


def _cached_all_subspaces(field: Field, n: int, budget: int):
    key = (field.p, n, budget)
    if key not in _SUBSPACE_CACHE:
        _SUBSPACE_CACHE[key] = tuple(all_subspaces(field, n, budget))
    return _SUBSPACE_CACHE[key]


def _block_image(spec: RsSpec, w: PointW, l: int, i: int, msub: Subspace) -> Subspace:
    """phi_li(H*_li (x) M'_i) as a subspace of N_l."""
    f = spec.field
    h = spec.hdim(l, i)
    blk = w.block(l, i)
    nl = blk.rows
    if msub.dim == 0 or h == 0 or nl == 0:
        return Subspace.zero(f, nl)
    m_i = blk.cols // h if h else 0
    rows = []
    for a in range(h):
        for t in range(msub.dim):
            vec = [f.zero()] * nl
            for mu in range(m_i):
                c = msub.basis.get(t, mu)
                if c == 0:
                    continue
                col = a * m_i + mu
                for nu in range(nl):
                    bv = blk.get(nu, col)
                    if bv != 0:
                        vec[nu] = f.add(vec[nu], f.mul(c, bv))
            rows.append(vec)
    return Subspace.from_span(f, nl, rows)


def _msub_lists(spec: RsSpec, dims: DimVector, budget: int):
    return [_cached_all_subspaces(spec.field, dims.m[i - 1], budget)
            for i in range(1, spec.r + 1)]


def _nsub_lists(spec: RsSpec, dims: DimVector, budget: int):
    return [_cached_all_subspaces(spec.field, dims.n[l - 1], budget)
            for l in range(1, spec.s + 1)]


def gred_flags(spec: RsSpec, dims: DimVector, w: PointW, pol: Polarization,
               subspace_budget: int = 8):
    """Fast (witness-free) computation of the (semistable, stable) pair.

    For a fixed tuple of M'-subspaces the binding N'-tuple is the tuple of
    images J_l (any admissible N' contains J and only increases the right
    side), so only the J-tuple is inspected.
    """
    if not spec.field.is_finite:
        raise BudgetExceeded("exhaustive semistability needs a finite field")
    msubs = _msub_lists(spec, dims, subspace_budget)
    imgs = []
    for i in range(1, spec.r + 1):
        per_sub = []
        for sub in msubs[i - 1]:
            per_sub.append([_block_image(spec, w, l, i, sub)
                            for l in range(1, spec.s + 1)])
        imgs.append(per_sub)
    semistable = stable = True
    zero_n = [Subspace.zero(spec.field, dims.n[l - 1]) for l in range(1, spec.s + 1)]
    for choice in itertools.product(*[range(len(ms)) for ms in msubs]):
        sm = sum(pol.lam[i] * msubs[i][choice[i]].dim for i in range(spec.r))
        all_zero = all(msubs[i][choice[i]].dim == 0 for i in range(spec.r))
        J = list(zero_n)
        for i in range(spec.r):
            for l in range(spec.s):
                J[l] = J[l].add(imgs[i][choice[i]][l])
        if all(J[l].is_full() for l in range(spec.s)):
            continue
        sn = sum(pol.mu[l] * J[l].dim for l in range(spec.s))
        if sm > sn:
            semistable = stable = False
            break
        if not all_zero and sm >= sn:
            stable = False
    return semistable, stable


def _gred_witness(spec: RsSpec, dims: DimVector, w: PointW, pol: Polarization,
                  mode: str, subspace_budget: int = 8):
    """First violating tuple in canonical enumeration order, or None."""
    msubs = _msub_lists(spec, dims, subspace_budget)
    nsubs = _nsub_lists(spec, dims, subspace_budget)
    for mchoice in itertools.product(*msubs):
        images = [[_block_image(spec, w, l, i, mchoice[i - 1])
                   for l in range(1, spec.s + 1)] for i in range(1, spec.r + 1)]
        sm = sum(pol.lam[i] * mchoice[i].dim for i in range(spec.r))
        for nchoice in itertools.product(*nsubs):
            if all(nchoice[l].is_full() for l in range(spec.s)):
                continue
            if not all(nchoice[l].contains(images[i][l])
                       for i in range(spec.r) for l in range(spec.s)):
                continue
            sn = sum(pol.mu[l] * nchoice[l].dim for l in range(spec.s))
            if mode == "semi":
                if sm > sn:
                    return mchoice, nchoice
            else:
                all_zero = (all(s.dim == 0 for s in mchoice)
                            and all(s.dim == 0 for s in nchoice))
                if not all_zero and sm >= sn:
                    return mchoice, nchoice
    return None


def is_gred_semistable(spec: RsSpec, dims: DimVector, w: PointW, pol: Polarization,
                       mode: str = "semi", subspace_budget: int = 8) -> StabilityVerdict:
    check_point_shapes(spec, w)
    pol.check(dims)
    semi, stab = gred_flags(spec, dims, w, pol, subspace_budget)
    witness = None
    if (mode == "semi" and not semi) or (mode == "stable" and not stab):
        witness = _gred_witness(spec, dims, w, pol, mode, subspace_budget)
    return StabilityVerdict(semi, stab, True, witness, None, mode)


def is_g_semistable(spec: RsSpec, dims: DimVector, w: PointW, pol: Polarization,
                    mode: str = "semi", subspace_budget: int = 8,
                    group_budget: int = 1 << 20) -> StabilityVerdict:
    """Full-group semistability: reductive-part semistability at every point
    of the H-orbit."""
    check_point_shapes(spec, w)
    pol.check(dims)
    semi = stab = True
    first_fail = None
    for h in enumerate_group(spec, dims, "H", group_budget):
        pt = act(spec, dims, w, h)
        s1, s2 = gred_flags(spec, dims, pt, pol, subspace_budget)
        semi = semi and s1
        stab = stab and s2
        if first_fail is None and ((mode == "semi" and not s1) or
                                   (mode == "stable" and not s2)):
            first_fail = (h, pt)
        if not semi and not stab and first_fail is not None:
            break
    witness = None
    wh = None
    if first_fail is not None:
        wh = first_fail[0]
        witness = _gred_witness(spec, dims, first_fail[1], pol, mode, subspace_budget)
    return StabilityVerdict(semi, stab, True, witness, wh, mode)


# ---------------------------------------------------------------------------
# Sampled mode (infinite fields): witnesses only, never a certificate


def _rand_subspace(field: Field, n: int, rng) -> Subspace:
    d = rng.randint(0, n)
    if d == 0:
        return Subspace.zero(field, n)
    return Subspace.from_matrix_rows(rand_mat(field, d, n, rng))


def sampled_gred_check(spec: RsSpec, dims: DimVector, w: PointW, pol: Polarization,
                       mode: str = "semi", rng=None, samples: int = 200) -> StabilityVerdict:
    check_point_shapes(spec, w)
    pol.check(dims)
    for _ in range(samples):
        mchoice = [_rand_subspace(spec.field, dims.m[i - 1], rng)
                   for i in range(1, spec.r + 1)]
        J = [Subspace.zero(spec.field, dims.n[l - 1]) for l in range(1, spec.s + 1)]
        for i in range(1, spec.r + 1):
            for l in range(1, spec.s + 1):
                J[l - 1] = J[l - 1].add(_block_image(spec, w, l, i, mchoice[i - 1]))
        if all(j.is_full() for j in J):
            continue
        sm = sum(pol.lam[i] * mchoice[i].dim for i in range(spec.r))
        sn = sum(pol.mu[l] * J[l].dim for l in range(spec.s))
        all_zero = all(s.dim == 0 for s in mchoice)
        if sm > sn:
            return StabilityVerdict(False, False, True, (tuple(mchoice), tuple(J)),
                                    None, mode)
        if mode == "stable" and not all_zero and sm >= sn:
            return StabilityVerdict(True, False, True, (tuple(mchoice), tuple(J)),
                                    None, mode)
    return StabilityVerdict(True, True, False, None, None, mode)


def sampled_g_check(spec: RsSpec, dims: DimVector, w: PointW, pol: Polarization,
                    mode: str = "semi", rng=None, samples: int = 60,
                    subspace_samples: int = 60) -> StabilityVerdict:
    L, R = side_L(spec, dims), side_R(spec, dims)
    f = spec.field
    for t in range(samples):
        if t == 0:
            hl, hr = tri_identity(L), tri_identity(R)
        else:
            hl = tri_make(L, tuple(Mat.identity(f, s) for s in L.sizes),
                          {sl: rand_mat(f, L.sizes[sl[0] - 1],
                                        L.slotdim[sl] * L.sizes[sl[1] - 1], rng)
                           for sl in L.slots()})
            hr = tri_make(R, tuple(Mat.identity(f, s) for s in R.sizes),
                          {sl: rand_mat(f, R.sizes[sl[0] - 1],
                                        R.slotdim[sl] * R.sizes[sl[1] - 1], rng)
                           for sl in R.slots()})
        pt = act(spec, dims, w, GElem(hl, hr))
        v = sampled_gred_check(spec, dims, pt, pol, mode, rng, subspace_samples)
        if v.witness is not None:
            return StabilityVerdict(v.semistable, v.stable, True, v.witness,
                                    GElem(hl, hr), mode)
    return StabilityVerdict(True, True, False, None, None, mode)


# ---------------------------------------------------------------------------
# Kronecker modules (the (1,1) special case)


def kronecker_flags(f_mat: Mat, q: int, subspace_budget: int = 8):
    """(semistable, stable) for a Kronecker module f: L (x) M -> N, dim L = q."""
    if q < 3:
        raise ValueError("Kronecker modules require dim L >= 3")
    if f_mat.cols % q:
        raise ValueError("column count must be divisible by q")
    m = f_mat.cols // q
    n = f_mat.rows
    field = f_mat.field
    if not field.is_finite:
        raise BudgetExceeded("exhaustive Kronecker semistability needs a finite field")
    semistable = stable = True
    for msub in all_subspaces(field, m, subspace_budget):
        if msub.dim == 0:
            continue  # the criterion quantifies over M' != 0
        cols = f_mat.mul(Mat.identity(field, q).kron(msub.basis.transpose()))
        J = Subspace.from_matrix_rows(cols.transpose())
        if J.is_full():
            continue
        # dim(N')/dim(M') >= n/m with N' = J minimal
        if J.dim * m < n * msub.dim:
            semistable = stable = False
            break
        if J.dim * m <= n * msub.dim:
            stable = False
    return semistable, stable


def kronecker_witness(f_mat: Mat, q: int, mode: str, subspace_budget: int = 8):
    m = f_mat.cols // q
    n = f_mat.rows
    field = f_mat.field
    for msub in all_subspaces(field, m, subspace_budget):
        if msub.dim == 0:
            continue
        cols = f_mat.mul(Mat.identity(field, q).kron(msub.basis.transpose()))
        J = Subspace.from_matrix_rows(cols.transpose())
        for nsub in all_subspaces(field, n, subspace_budget):
            if nsub.is_full() or not nsub.contains(J):
                continue
            bad = (nsub.dim * m < n * msub.dim if mode == "semi"
                   else nsub.dim * m <= n * msub.dim)
            if bad:
                return msub, nsub
    return None


def kronecker_semistable(f_mat: Mat, q: int, mode: str = "semi",
                         subspace_budget: int = 8) -> StabilityVerdict:
    semi, stab = kronecker_flags(f_mat, q, subspace_budget)
    witness = None
    if (mode == "semi" and not semi) or (mode == "stable" and not stab):
        witness = kronecker_witness(f_mat, q, mode, subspace_budget)
    return StabilityVerdict(semi, stab, True, witness, None, mode)


# ---------------------------------------------------------------------------
# The constant c(tau, k) and the existence predicates


def c_of_pairing(sigma: Mat, dim_p: int, dim_a: int, k: int,
                 ambient_budget: int = 8) -> Fraction:
    """sup over K in the class KK of codim(sigma_k(P (x) K)) / codim(K).

    sigma: P (x) A -> Q; K runs over proper subspaces of A (x) F^k not
    contained in any A (x) F with F a proper subspace of F^k.  Over a finite
    field this is an exact finite supremum (an estimator of the
    characteristic-zero constant).  Returns 0 when the class is empty.
    """
    field = sigma.field
    dim_q = sigma.rows
    if k <= 0:
        return Fraction(0)
    best = None
    ambient = dim_a * k
    for dim_k in range(0, ambient):  # proper subspaces only
        for K in enumerate_subspaces(field, ambient, dim_k, ambient_budget):
            # smallest F with K <= A (x) F is the span of the F-components
            rows = []
            for t in range(K.dim):
                vec = K.basis.row_list(t)
                for a in range(dim_a):
                    rows.append(vec[a * k:(a + 1) * k])
            if rows:
                support = rank(Mat.from_rows(field, rows))
            else:
                support = 0
            if support != k:
                continue
            # image sigma_k(P (x) K): vectors indexed (q, f)
            img_rows = []
            for b in range(dim_p):
                for t in range(K.dim):
                    vec = K.basis.row_list(t)
                    out = [field.zero()] * (dim_q * k)
                    for qq in range(dim_q):
                        for c in range(dim_a):
                            coeff = sigma.get(qq, b * dim_a + c)
                            if coeff == 0:
                                continue
                            for ff in range(k):
                                out[qq * k + ff] = field.add(
                                    out[qq * k + ff], field.mul(coeff, vec[c * k + ff]))
                    img_rows.append(out)
            img_rank = rank(Mat.from_rows(field, img_rows)) if img_rows else 0
            ratio = Fraction(dim_q * k - img_rank, dim_a * k - dim_k)
            if best is None or ratio > best:
                best = ratio
    return best if best is not None else Fraction(0)


def _pairing_over_field(spec: RsSpec, mat: Mat, field: Field | None) -> Mat:
    if field is None or field == spec.field:
        return mat
    if not spec.field.is_finite:
        # reduce integer rational entries mod p
        ent = []
        for x in mat.entries:
            fr = Fraction(x)
            if fr.denominator != 1:
                raise ValueError("cannot reduce non-integer spec mod p")
            ent.append(field.canon(fr.numerator))
        return Mat(field, mat.rows, mat.cols, tuple(ent))
    raise ValueError("field change only supported from Q to GF(p)")


def c_tau(spec: RsSpec, k: int, field: Field | None = None,
          ambient_budget: int = 8) -> Fraction:
    """Finite-field estimator of c(tau, k) for a type-(2,1) spec."""
    if (spec.r, spec.s) != (2, 1):
        raise ValueError("c(tau, k) is defined for type (2,1) data")
    from .mutation import tau_map
    sigma = _pairing_over_field(spec, tau_map(spec), field)
    return c_of_pairing(sigma, spec.hdim(1, 1), spec.adim(2, 1), k, ambient_budget)


def c_tau_star(spec: RsSpec, k: int, field: Field | None = None,
               ambient_budget: int = 8) -> Fraction:
    if (spec.r, spec.s) != (2, 1):
        raise ValueError("c(tau*, k) is defined for type (2,1) data")
    from .mutation import tau_star_map
    sigma = _pairing_over_field(spec, tau_star_map(spec), field)
    return c_of_pairing(sigma, spec.hdim(1, 2), spec.adim(2, 1), k, ambient_budget)


def thm31_condition(pol: Polarization, spec: RsSpec, dims: DimVector,
                    c_val: Fraction) -> bool:
    """Sufficient condition for a projective quotient in type (2,1)."""
    if (spec.r, spec.s) != (2, 1):
        raise ValueError("condition is for type (2,1)")
    l1, l2 = pol.lam
    da = spec.adim(2, 1)
    n1 = dims.n[0]
    return l2 / l1 > da and l2 >= Fraction(da, n1) * c_val


def thm76_condition(pol: Polarization, spec: RsSpec, dims: DimVector,
                    c_tau_val: Fraction, c_taustar_val: Fraction) -> str:
    """Extended condition; returns 'case1', 'case2' or 'none'."""
    if (spec.r, spec.s) != (2, 1):
        raise ValueError("condition is for type (2,1)")
    l1, l2 = pol.lam
    da = spec.adim(2, 1)
    h11, h12 = spec.hdim(1, 1), spec.hdim(1, 2)
    n1 = dims.n[0]
    if thm31_condition(pol, spec, dims, c_tau_val):
        return "case1"
    case2 = (l1 < Fraction(h11, n1)
             and l2 < Fraction(h12, n1)
             and l2 * da - l1 > Fraction(da * h12 - h11, n1)
             and h11 - l1 * n1 >= c_taustar_val * da)
    return "case2" if case2 else "none"
