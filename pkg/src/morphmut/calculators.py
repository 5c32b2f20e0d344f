"""Closed-form arithmetic: Kronecker duality, the extremal projective-plane
families and the projective-space example.

The two vector bundles entering the plane families contribute only through
their dimension coefficients (3, 6 and a 3-dimensional connecting space);
no Hom-tensors are built here.  For the Kronecker dual, H_0 is read as M:
that is the only reading under which the trace-contraction construction
typechecks, and it makes the dimension bookkeeping involutive.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .matrix import BudgetExceeded, Mat, kernel_basis, rank
from .rs_spec import line_bundle_hom_dim  # re-export site for the binomial count

__all__ = [
    "KroneckerData", "P2Family", "kronecker_dual_dims", "kronecker_dual_point",
    "kronecker_orbit_census", "line_bundle_hom_dim", "pn_quotient_dims",
    "pn_singular_rhos", "rho_prime", "rho_prime_family",
]


@dataclass(frozen=True)
class KroneckerData:
    q: int  # dim L
    m: int  # dim M
    n: int  # dim N

    def __post_init__(self):
        if self.q < 3:
            raise ValueError("Kronecker modules require dim L >= 3")
        if self.m < 1 or self.n < 1:
            raise ValueError("positive multiplicities required")


def kronecker_dual_dims(k: KroneckerData) -> KroneckerData:
    """Dual problem data (L*, H_0* = M*, M' with m' = qm - n); involutive."""
    mprime = k.q * k.m - k.n
    if mprime <= 0:
        raise ValueError(f"m' = qm - n = {mprime} must be positive")
    return KroneckerData(k.q, k.m, mprime)


def kronecker_dual_point(f: Mat, q: int) -> Mat:
    """A(f) for a surjective Kronecker module f: L (x) M -> N.

    The restriction of tr (x) I to L* (x) ker(f) induces
    A(f): L* (x) M* -> ker(f)*; in the canonical RREF basis of ker(f) its
    matrix is exactly the kernel basis, reread as an m' x (q m) map."""
    if f.cols % q:
        raise ValueError("column count must be divisible by q")
    n, m = f.rows, f.cols // q
    if rank(f) != n:
        raise ValueError("Kronecker dual needs a surjective module")
    K = kernel_basis(f)
    if K.dim != q * m - n:
        raise ValueError("rank-nullity violation")  # unreachable
    return K.basis


def kronecker_orbit_census(field, q: int, m: int, n: int,
                           point_budget: int = 1 << 18):
    """Orbit count of the surjective locus W_0 of Hom(L (x) M, N) under
    GL(M) x GL(N), by union-find over generator actions."""
    from .matrix import rank as mrank
    p = field.p
    if p is None:
        raise BudgetExceeded("census needs a finite field")
    dim = n * q * m
    total = p ** dim
    if total > point_budget:
        raise BudgetExceeded("|W| over budget")

    def decode(code):
        ent = []
        for _ in range(dim):
            code, d = divmod(code, p)
            ent.append(d)
        return Mat(field, n, q * m, tuple(ent))

    def encode(mat):
        code = 0
        for d in reversed(mat.entries):
            code = code * p + d
        return code

    gens = []
    # GL(M): f |-> f o (I_q (x) g); GL(N): f |-> h o f
    for sz, side in ((m, "M"), (n, "N")):
        for c in field.elements():
            if c in (0, 1):
                continue
            d = Mat.identity(field, sz).to_lists()
            d[0][0] = c
            gens.append((side, Mat.from_rows(field, d)))
        for a in range(sz):
            for b in range(sz):
                if a != b:
                    d = Mat.identity(field, sz).to_lists()
                    d[a][b] = field.one()
                    gens.append((side, Mat.from_rows(field, d)))

    surj = [code for code in range(total) if mrank(decode(code)) == n]
    surj_set = set(surj)
    index = {c: i for i, c in enumerate(surj)}
    parent = list(range(len(surj)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            parent[rb] = ra

    Iq = Mat.identity(field, q)
    for side, g in gens:
        for code in surj:
            f_mat = decode(code)
            img = f_mat.mul(Iq.kron(g)) if side == "M" else g.mul(f_mat)
            ic = encode(img)
            assert ic in surj_set
            union(index[code], index[ic])
    orbits = {}
    for c in surj:
        orbits.setdefault(surj[find(index[c])], []).append(c)
    return {"total": total, "surjective": len(surj), "orbits": len(orbits),
            "orbit_sizes": sorted(len(v) for v in orbits.values())}


# ---------------------------------------------------------------------------
# Extremal families on the projective plane


@dataclass(frozen=True)
class P2Family:
    m1: int
    m2: int
    n: int
    rho: Fraction

    def __post_init__(self):
        if not (self.m1 > 0 and self.m2 > 0 and self.n > 0):
            raise ValueError("positive multiplicities required")
        if not self.n < 3 * self.m1 + 6 * self.m2:
            raise ValueError("need n < 3 m1 + 6 m2")
        object.__setattr__(self, "rho", Fraction(self.rho))
        if self.rho <= 0:
            raise ValueError("rho must be positive")


def rho_prime(fam: P2Family) -> Fraction:
    """rho' = (3 m2 rho + 3 m1 - n) / ((6 m2 - n) rho + 6 m1)."""
    num = 3 * fam.m2 * fam.rho + 3 * fam.m1 - fam.n
    den = (6 * fam.m2 - fam.n) * fam.rho + 6 * fam.m1
    if den == 0:
        raise ZeroDivisionError("rho' denominator vanishes")
    return Fraction(num, den) if isinstance(num, int) else num / den


def rho_prime_family(family_id: str, m: int, eps: Fraction) -> dict:
    """The two extremal families: multiplicities, rho, rho' and the
    mutated source multiplicity 3 m1 + 6 m2 - n."""
    eps = Fraction(eps)
    if family_id == "8.1.1":
        m1, m2, n = 1, 5 * m + 2, 29 * m + 14
        rho = Fraction(29, 12) + eps
    elif family_id == "8.1.2":
        m1, m2, n = 1, 17 * m + 8, 99 * m + 49
        rho = Fraction(99, 41) + eps
    else:
        raise ValueError(f"unknown family {family_id!r}")
    fam = P2Family(m1, m2, n, rho)
    rp = rho_prime(fam)
    return {"m1": m1, "m2": m2, "n": n, "rho": rho, "rho_prime": rp,
            "mutated_source": 3 * m1 + 6 * m2 - n,
            "quotient_exists": rp > 3}


# ---------------------------------------------------------------------------
# The projective-space example O(-2) (+) O(-1) -> O (x) C^{n+2}


def pn_singular_rhos(n: int):
    """Singular values rho_k = k/(n+2-k), 1 <= k <= n+1."""
    if n < 2:
        raise ValueError("need n >= 2")
    return [Fraction(k, n + 2 - k) for k in range(1, n + 2)]


def pn_quotient_dims(n: int):
    """(generic dimension, special dimension, count of distinct quotients)."""
    if n < 2:
        raise ValueError("need n >= 2")
    generic = Fraction((n + 2) * (n * n + 3 * n - 2), 2)
    special = Fraction(n * (n + 3), 2)
    count = 2 * (n // 2) + 2
    return generic, special, count
