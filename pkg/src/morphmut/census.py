"""Exhaustive finite-field censuses: orbits, open loci, semistable loci.

Points of W are encoded as base-p integers over a fixed coordinate scan
(blocks (l, i) in order, entries row-major).  The action of a fixed group
element is linear in the point, so each generator is precomputed as a list
of coordinate columns and applied as a table lookup; orbits come from
union-find over the integer codes.  Everything is deterministic: scan
orders are fixed, representatives are minimal codes, reports hash stably.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field as dc_field

from .matrix import BudgetExceeded, Mat, rank
from .rs_spec import DimVector, PointW, RsSpec, point_from_blocks
from .groups import side_L, side_R, tri_generators, act_left, act_right
from .stability import Polarization, is_g_semistable
from .mutation import (MutatedRs, in_W0_mutated, mutate_rs_point, mutate_rs_spec,
                       theta_from_rs, point_to_theta, transport_polarization,
                       window_predicates)
from .theta import in_W0 as theta_in_W0


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        p = self.parent
        root = x
        while p[root] != root:
            root = p[root]
        while p[x] != root:
            p[x], x = root, p[x]
        return root

    def union(self, a: int, b: int):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra  # smaller code wins: deterministic reps


# ---------------------------------------------------------------------------
# Point <-> code


def w_dim(spec: RsSpec, dims: DimVector) -> int:
    return sum(dims.n[l - 1] * spec.hdim(l, i) * dims.m[i - 1]
               for l in range(1, spec.s + 1) for i in range(1, spec.r + 1))


def w_to_vec(spec: RsSpec, dims: DimVector, w: PointW):
    out = []
    for l in range(1, spec.s + 1):
        for i in range(1, spec.r + 1):
            out.extend(w.block(l, i).entries)
    return out


def vec_to_w(spec: RsSpec, dims: DimVector, vec) -> PointW:
    f = spec.field
    blocks = []
    pos = 0
    for l in range(1, spec.s + 1):
        row = []
        for i in range(1, spec.r + 1):
            nr = dims.n[l - 1]
            nc = spec.hdim(l, i) * dims.m[i - 1]
            row.append(Mat(f, nr, nc, tuple(vec[pos:pos + nr * nc])))
            pos += nr * nc
        blocks.append(row)
    return point_from_blocks(dims, blocks)


def code_to_vec(code: int, dim: int, p: int):
    out = []
    for _ in range(dim):
        code, d = divmod(code, p)
        out.append(d)
    return out


def vec_to_code(vec, p: int) -> int:
    code = 0
    for d in reversed(vec):
        code = code * p + d
    return code


def _generator_tables(spec: RsSpec, dims: DimVector):
    """Per generator, the list of image vectors of the coordinate points."""
    f = spec.field
    p = f.p
    dim = w_dim(spec, dims)
    tables = []
    gens_L = tri_generators(side_L(spec, dims))
    gens_R = tri_generators(side_R(spec, dims))
    basis_points = []
    for k in range(dim):
        vec = [0] * dim
        vec[k] = 1
        basis_points.append(vec_to_w(spec, dims, vec))
    for g in gens_L:
        cols = [w_to_vec(spec, dims, act_right(spec, dims, bp, g))
                for bp in basis_points]
        tables.append(cols)
    for h in gens_R:
        cols = [w_to_vec(spec, dims, act_left(spec, dims, bp, h))
                for bp in basis_points]
        tables.append(cols)
    return dim, tables


def _apply_table(vec, cols, p: int):
    dim = len(vec)
    out = [0] * dim
    for k, d in enumerate(vec):
        if d:
            col = cols[k]
            for j in range(dim):
                c = col[j]
                if c:
                    out[j] = (out[j] + d * c) % p
    return out


def orbit_partition(spec: RsSpec, dims: DimVector, codes):
    """Union-find partition of the given codes under the G_L x G_R generators.

    The code set must be action-invariant (this is asserted)."""
    p = spec.field.p
    dim, tables = _generator_tables(spec, dims)
    code_set = set(codes)
    uf_index = {c: i for i, c in enumerate(sorted(code_set))}
    uf = UnionFind(len(uf_index))
    order = sorted(code_set)
    for cols in tables:
        for c in order:
            img = vec_to_code(_apply_table(code_to_vec(c, dim, p), cols, p), p)
            if img not in code_set:
                raise BudgetExceeded("generator leaves the point set; "
                                     "set is not action-invariant")
            uf.union(uf_index[c], uf_index[img])
    orbits = {}
    for c in order:
        root = order[uf.find(uf_index[c])]
        orbits.setdefault(root, []).append(c)
    return orbits


# ---------------------------------------------------------------------------
# Reports


@dataclass
class CensusReport:
    description: dict
    total_points: int
    open_points: int
    orbit_count: int
    orbit_sizes: list
    semistable_count: int | None = None
    stable_count: int | None = None
    violations: list = dc_field(default_factory=list)
    extra: dict = dc_field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "description": self.description,
            "total_points": self.total_points,
            "open_points": self.open_points,
            "orbit_count": self.orbit_count,
            "orbit_sizes": self.orbit_sizes,
            "semistable_count": self.semistable_count,
            "stable_count": self.stable_count,
            "violations": self.violations,
            "extra": self.extra,
        }

    def canonical_bytes(self) -> bytes:
        return json.dumps(self.to_json(), sort_keys=True,
                          separators=(",", ":")).encode()

    def sha256(self) -> str:
        return hashlib.sha256(self.canonical_bytes()).hexdigest()


def _open_codes_source(spec: RsSpec, dims: DimVector, p_index: int, dim: int):
    """Codes of W^0_p, computed via the rank of the assembled joint map
    (+)_{j > p} H*_1j (x) M_j -> N_1 (no Theta invariants are required)."""
    f = spec.field
    pchar = f.p
    colbase = {}
    d2 = 0
    for j in range(p_index + 1, spec.r + 1):
        colbase[j] = d2
        d2 += spec.hdim(1, j) * dims.m[j - 1]
    # coordinate positions of the phi2 part: block (1, j), j > p_index
    col_of = {}
    offset = 0
    for l in range(1, spec.s + 1):
        for i in range(1, spec.r + 1):
            nr = dims.n[l - 1]
            nc = spec.hdim(l, i) * dims.m[i - 1]
            if l == 1 and i > p_index:
                for nu in range(nr):
                    for cc in range(nc):
                        col_of[offset + nu * nc + cc] = (colbase[i] + cc, nu)
            offset += nr * nc
    n1 = dims.n[0]
    out = []
    total = pchar ** dim
    for code in range(total):
        vec = code_to_vec(code, dim, pchar)
        rows = [[0] * d2 for _ in range(n1)]
        for pos, (colidx, nu) in col_of.items():
            rows[nu][colidx] = vec[pos]
        if rank(Mat.from_rows(f, rows)) == n1:
            out.append(code)
    return out


def orbit_census(spec: RsSpec, dims: DimVector, p_index: int,
                 point_budget: int = 1 << 18) -> CensusReport:
    """Exact orbit partition of W^0_p under G_L x G_R."""
    f = spec.field
    if not f.is_finite:
        raise BudgetExceeded("census needs a finite field")
    dim = w_dim(spec, dims)
    total = f.p ** dim
    if total > point_budget:
        raise BudgetExceeded(f"|W| = {total} exceeds budget {point_budget}")
    open_codes = _open_codes_source(spec, dims, p_index, dim)
    orbits = orbit_partition(spec, dims, open_codes)
    sizes = sorted(len(v) for v in orbits.values())
    return CensusReport(
        description={"kind": "orbit_census", "r": spec.r, "s": spec.s,
                     "p": p_index, "field": spec.field.to_json(),
                     "m": list(dims.m), "n": list(dims.n)},
        total_points=total, open_points=len(open_codes),
        orbit_count=len(orbits), orbit_sizes=sizes)


def mutated_open_codes(mut: MutatedRs, dim: int):
    spec, dims = mut.spec, mut.dims
    f = spec.field
    out = []
    for code in range(f.p ** dim):
        w = vec_to_w(spec, dims, code_to_vec(code, dim, f.p))
        if in_W0_mutated(mut, w):
            out.append(code)
    return out


def mutated_orbit_census(mut: MutatedRs, point_budget: int = 1 << 18) -> CensusReport:
    """Orbit partition of W'_0(p) under the mutated spec's own G."""
    spec, dims = mut.spec, mut.dims
    f = spec.field
    dim = w_dim(spec, dims)
    total = f.p ** dim
    if total > point_budget:
        raise BudgetExceeded(f"|W'| = {total} exceeds budget {point_budget}")
    open_codes = mutated_open_codes(mut, dim)
    orbits = orbit_partition(spec, dims, open_codes)
    sizes = sorted(len(v) for v in orbits.values())
    return CensusReport(
        description={"kind": "mutated_orbit_census", "p": mut.p,
                     "r": spec.r, "s": spec.s, "field": f.to_json(),
                     "m": list(dims.m), "n": list(dims.n)},
        total_points=total, open_points=len(open_codes),
        orbit_count=len(orbits), orbit_sizes=sizes)


def transfer_check(spec: RsSpec, dims: DimVector, p_index: int, pol: Polarization,
                   point_budget: int = 1 << 18, group_budget: int = 1 << 20,
                   check_cor74: bool = True) -> CensusReport:
    """Semistability transfer along the mutation, checked on all of W^0_p.

    Requires the standing hypothesis sum_{i<=p} lambda_i m_i <= mu_1 (the
    run is refused otherwise, to avoid vacuous claims).  Records:
      * every w in W^0_p with not-SS(w) but SS(z(w)), and, when the full
        transfer window holds, every w where SS(w) != SS(z(w)) (same for
        stability);
      * when the reverse-inclusion inequality holds, every semistable
        point of W' outside W'_0(p).
    """
    f = spec.field
    if not f.is_finite:
        raise BudgetExceeded("transfer check needs a finite field")
    pol.check(dims)
    windows = window_predicates(pol, dims, spec, p_index)
    if not windows["prop71"]:
        raise BudgetExceeded("transfer hypothesis sum_{i<=p} lambda_i m_i <= mu_1 fails")
    dim = w_dim(spec, dims)
    total = f.p ** dim
    if total > point_budget:
        raise BudgetExceeded("|W| over budget")
    mut = mutate_rs_spec(spec, dims, p_index)
    tpol = transport_polarization(pol, spec, dims, p_index).as_polarization()
    trs = theta_from_rs(spec, dims, p_index)

    open_codes = _open_codes_source(spec, dims, p_index, dim)
    ss_cache = {}
    ssp_cache = {}
    violations = []
    ss_count = st_count = 0
    for code in open_codes:
        w = vec_to_w(spec, dims, code_to_vec(code, dim, f.p))
        key = w.key()
        if key not in ss_cache:
            ss_cache[key] = is_g_semistable(spec, dims, w, pol,
                                            group_budget=group_budget)
        v = ss_cache[key]
        _, wp, _, _ = mutate_rs_point(spec, dims, p_index, w, trs=trs, mut=mut)
        kp = wp.key()
        if kp not in ssp_cache:
            ssp_cache[kp] = is_g_semistable(mut.spec, mut.dims, wp, tpol,
                                            group_budget=group_budget)
        vp = ssp_cache[kp]
        ss_count += v.semistable
        st_count += v.stable
        if not v.semistable and vp.semistable:
            violations.append({"kind": "prop71_semi", "code": code})
        if not v.stable and vp.stable:
            violations.append({"kind": "prop71_stable", "code": code})
        if windows["thm75"]:
            if v.semistable != vp.semistable:
                violations.append({"kind": "thm75_semi", "code": code})
            if v.stable != vp.stable:
                violations.append({"kind": "thm75_stable", "code": code})

    extra = {"windows": {k: bool(v) for k, v in windows.items()},
             "transported": transport_polarization(pol, spec, dims, p_index).to_json()}

    if check_cor74 and windows["cor74"]:
        # W'(p)^{ss} inside W'_0(p): SS' is constant on orbits, membership is
        # checked on every point of each semistable orbit.
        dimp = w_dim(mut.spec, mut.dims)
        if f.p ** dimp > point_budget:
            raise BudgetExceeded("|W'| over budget")
        all_codes = range(f.p ** dimp)
        orbits = orbit_partition(mut.spec, mut.dims, all_codes)
        n_ss_orbits = 0
        for rep, members in sorted(orbits.items()):
            wrep = vec_to_w(mut.spec, mut.dims, code_to_vec(rep, dimp, f.p))
            vrep = is_g_semistable(mut.spec, mut.dims, wrep, tpol,
                                   group_budget=group_budget)
            if not vrep.semistable:
                continue
            n_ss_orbits += 1
            for c in members:
                wc = vec_to_w(mut.spec, mut.dims, code_to_vec(c, dimp, f.p))
                if not in_W0_mutated(mut, wc):
                    violations.append({"kind": "cor74", "code": c})
        extra["cor74_ss_orbits"] = n_ss_orbits

    return CensusReport(
        description={"kind": "transfer_check", "r": spec.r, "s": spec.s,
                     "p": p_index, "field": f.to_json(),
                     "m": list(dims.m), "n": list(dims.n),
                     "polarization": pol.to_json()},
        total_points=total, open_points=len(open_codes),
        orbit_count=-1, orbit_sizes=[],
        semistable_count=ss_count, stable_count=st_count,
        violations=violations, extra=extra)
