"""Acceptance gate: every criterion runs at its stated tolerance
(exact arithmetic throughout, wall-clock budgets asserted) and prints
one PASS line.  Run with `pytest -s tests/test_acceptance.py` to see them.
"""

import itertools
import json
import random
import subprocess
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

from morphmut.matrix import GF, Mat, QQ, rank
from morphmut.rs_spec import DimVector, rand_point, sym_spec, validate
from morphmut.groups import (act_left, act_right, enumerate_group, side_L,
                             side_R, tri_enumerate, tri_group_order,
                             tri_identity, tri_inv, tri_mul, tri_rand)
from morphmut.stability import (Polarization, is_g_semistable,
                                is_gred_semistable, kronecker_semistable)
from morphmut.theta import (act_hL, act_lambda, check_ddtheta, choice_set,
                            ddtheta_identifications, dual_theta, gamma1_bar,
                            h_prime_orbit, in_W0, mutate_point,
                            point_m_identification, swap_tensor_vec, _vec)
from morphmut.mutation import (mutate_rs_point, mutate_rs_spec, point_to_theta,
                               theta_from_rs, transport_from_dims,
                               transport_polarization)
from morphmut.census import (code_to_vec, mutated_orbit_census, orbit_census,
                             transfer_check, vec_to_w, w_dim)
from morphmut.calculators import (kronecker_orbit_census, pn_quotient_dims,
                                  pn_singular_rhos, rho_prime_family)

F2 = GF(2)
F3 = GF(3)
ROOT = Path(__file__).resolve().parents[1]
FIX = ROOT / "fixtures"


class Budget:
    def __init__(self, name, seconds):
        self.name = name
        self.seconds = seconds

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.t0
        if exc_type is None:
            print(f"ACCEPTANCE {self.name}: PASS ({elapsed:.2f}s / budget {self.seconds}s)")
            assert elapsed < self.seconds, f"{self.name} exceeded {self.seconds}s"
        else:
            print(f"ACCEPTANCE {self.name}: FAIL after {elapsed:.2f}s")
        return False


def test_criterion_01_group_laws():
    with Budget("1 group laws", 10):
        rng = random.Random(101)
        # 1000 random triples split over Q and GF(3), r = 3 and s = 3 sides
        for field in (F3, QQ):
            specL = sym_spec(field, 1, (-2, -1, 0), (1,))
            dimsL = DimVector((1, 2, 1), (2,))
            sideL = side_L(specL, dimsL)
            specR = sym_spec(field, 1, (-1,), (0, 1, 2))
            dimsR = DimVector((1,), (1, 2, 1))
            sideR = side_R(specR, dimsR)
            for side in (sideL, sideR):
                e = tri_identity(side)
                for _ in range(250):
                    a, b, c = (tri_rand(side, rng) for _ in range(3))
                    assert tri_mul(tri_mul(a, b), c) == tri_mul(a, tri_mul(b, c))
                    assert tri_mul(a, e) == a == tri_mul(e, a)
                    ai = tri_inv(a)
                    assert tri_mul(ai, a) == e == tri_mul(a, ai)
        # exhaustive: full G_L over GF(2), r=2, m=(1,1), dimA_21 = 1 (order 2)
        spec2 = sym_spec(F2, 1, (-1, -1), (0,))
        assert spec2.adim(2, 1) == 1
        dims2 = DimVector((1, 1), (2,))
        side2 = side_L(spec2, dims2)
        els = list(tri_enumerate(side2))
        assert len(els) == 2 == tri_group_order(side2)
        e2 = tri_identity(side2)
        keys = {g.key() for g in els}
        for a in els:
            assert tri_mul(tri_inv(a), a) == e2
            for b in els:
                assert tri_mul(a, b).key() in keys
                for c in els:
                    assert tri_mul(tri_mul(a, b), c) == tri_mul(a, tri_mul(b, c))


def test_criterion_02_action_compatibility():
    with Budget("2 action compatibility", 10):
        rng = random.Random(102)
        for field in (F2, QQ):
            spec = sym_spec(field, 1, (-2, -1), (0, 1))
            dims = DimVector((1, 2), (2, 1))
            L, R = side_L(spec, dims), side_R(spec, dims)
            for _ in range(250):
                w = rand_point(spec, dims, rng)
                g, gp = tri_rand(L, rng), tri_rand(L, rng)
                h, hp = tri_rand(R, rng), tri_rand(R, rng)
                assert act_right(spec, dims, act_right(spec, dims, w, g), gp) \
                    == act_right(spec, dims, w, tri_mul(g, gp))
                assert act_left(spec, dims, act_left(spec, dims, w, hp), h) \
                    == act_left(spec, dims, w, tri_mul(h, hp))
                assert act_left(spec, dims, act_right(spec, dims, w, g), h) \
                    == act_right(spec, dims, act_left(spec, dims, w, h), g)


def test_criterion_03_prop62_double_mutation():
    with Budget("3 Prop 6.2 D(D(Theta)) = Theta", 60):
        shapes = [
            (1, (-2, -1), (0, 1), (1, 1), (1, 1), 1),
            (1, (-2, -1), (0, 1), (1, 1), (1, 1), 0),
            (1, (-1, 0), (1,), (1, 1), (2,), 0),
            (1, (-1, 0), (1,), (2, 1), (3,), 0),
            (1, (-2, -1), (0,), (1, 2), (2,), 1),
            (2, (-2, -1), (0,), (1, 1), (2,), 1),
            (2, (-2, -1), (0,), (1, 1), (4,), 0),
            (1, (-2, -1, 0), (1, 2), (1, 1, 1), (1, 1), 1),
            (1, (-2, -1, 0), (1, 2), (1, 1, 1), (1, 1), 2),
            (1, (-1,), (0, 1), (2,), (1, 1), 0),
            (1, (-2, -1), (0, 1), (1, 2), (2, 1), 1),
            (1, (-2, -1), (0, 2), (1, 1), (1, 1), 1),
            (1, (-3, -1), (0, 1), (1, 1), (1, 1), 1),
            (1, (-2, 0), (1, 2), (1, 1), (1, 1), 1),
            (1, (-1, -1), (0,), (2, 2), (3,), 1),
            (2, (-1,), (0, 1), (1,), (2, 1), 0),
            (1, (-2, -1, -1), (0,), (1, 1, 1), (2,), 1),
        ]
        count = 0
        for nvars, a, b, m, n, p in shapes:
            for field in (F2, F3, QQ):
                spec = sym_spec(field, nvars, a, b)
                trs = theta_from_rs(spec, DimVector(m, n), p)
                total = sum(trs.theta.dims())
                assert total <= 60
                assert check_ddtheta(trs.theta), (nvars, a, b, m, n, p, field)
                count += 1
        assert count >= 50
        print(f"  checked {count} generated Theta instances")


def _fixture_22():
    spec = sym_spec(F2, 1, (-2, -1), (0, 1))
    dims = DimVector((1, 1), (1, 1))
    return spec, dims


def _w0_points_22(count, seed):
    spec, dims = _fixture_22()
    trs = theta_from_rs(spec, dims, 1)
    rng = random.Random(seed)
    out = []
    seen = set()
    while len(out) < count:
        w = rand_point(spec, dims, rng)
        pt = point_to_theta(trs, w)
        if in_W0(trs.theta, pt) and pt.key() not in seen:
            seen.add(pt.key())
            out.append(pt)
    return trs, out


def test_criterion_04_prop63_choice_set_orbit():
    with Budget("4 Prop 6.3 choice set = H'-orbit", 120):
        trs, points = _w0_points_22(20, 104)
        mut = dual_theta(trs.theta)
        for pt in points:
            zs = choice_set(trs.theta, pt)
            z0 = next(iter(zs.values()))
            orb = h_prime_orbit(mut.dual, z0)
            assert set(zs.keys()) == set(orb.keys())


def test_criterion_05_prop64_involution():
    with Budget("5 Prop 6.4 z(z(w)) = sign translate", 60):
        # GF(2) fixture with |W| = 2^10: every point of W^0
        spec = sym_spec(F2, 1, (-1, 0), (1,))
        dims = DimVector((1, 1), (2,))
        trs = theta_from_rs(spec, dims, 0)
        th = trs.theta
        mut1 = dual_theta(th)
        _, _, maps = ddtheta_identifications(th)
        dim = w_dim(spec, dims)
        assert 2 ** dim == 2 ** 10
        proj4_dual = None
        checked = 0
        for code in range(2 ** dim):
            w = vec_to_w(spec, dims, code_to_vec(code, dim, 2))
            pt = point_to_theta(trs, w)
            if not in_W0(th, pt):
                continue
            z, u, alpha = mutate_point(th, pt, proj4=trs.proj4)
            u2 = swap_tensor_vec(alpha.neg(), th.d2, th.d1)
            a2 = swap_tensor_vec(u, th.dHR, th.d2)
            if proj4_dual is None:
                from morphmut.theta import x4_projection
                proj4_dual = x4_projection(mut1.dual)
            zz, _, _ = mutate_point(mut1.dual, z, u=u2, alpha=a2, proj4=proj4_dual)
            id_M = point_m_identification(th, pt)
            assert maps["X1"].mul(zz.phi1).mul(id_M.transpose()) == pt.phi1.neg()
            assert maps["X2"].mul(zz.phi2).mul(id_M.transpose()) == pt.phi2
            assert maps["X3"].mul(zz.x3) == pt.x3
            assert maps["X4"].mul(zz.x4) == pt.x4.neg()
            checked += 1
        assert checked == 930
        print(f"  verified z(z(w)) on all {checked} points of W^0")


def test_criterion_06_prop65_translation():
    with Budget("6 Prop 6.5 shifts land in the orbit", 120):
        trs, points = _w0_points_22(4, 106)
        th = trs.theta
        mut = dual_theta(th)
        g1b = gamma1_bar(th)
        f = th.field
        for pt in points:
            z1, u1, a1 = mutate_point(th, pt, proj4=trs.proj4)
            orb = h_prime_orbit(mut.dual, z1)
            for hv in itertools.product(f.elements(), repeat=th.dHL):
                hcol = Mat.column(f, hv)
                shifted = act_hL(th, pt, hcol)
                # the proof's explicit witness: u2 = u1, alpha2 = alpha1 + g1b(h)
                z2, _, _ = mutate_point(th, shifted, u=u1,
                                        alpha=a1.add(g1b.mul(hcol)),
                                        proj4=trs.proj4)
                assert z2 == z1
                zd, _, _ = mutate_point(th, shifted, proj4=trs.proj4)
                assert zd.key() in orb
            for lv in itertools.product(f.elements(), repeat=th.dHR * th.dM):
                lam = Mat(f, th.dHR, th.dM, tuple(f.canon(x) for x in lv))
                shifted = act_lambda(th, pt, lam)
                corr = _vec(lam.mul(pt.phi2.transpose()))
                z2, _, _ = mutate_point(th, shifted, u=u1.sub(corr), alpha=a1,
                                        proj4=trs.proj4)
                assert z2 == z1
                zd, _, _ = mutate_point(th, shifted, proj4=trs.proj4)
                assert zd.key() in orb


def test_criterion_07_thm66_census():
    with Budget("7 Thm 6.6 orbit-count bijection", 300):
        expected = json.load(open(FIX / "expected_hashes.json"))
        from morphmut.jsonio import parse_spec
        # (2,1) fixture, |W| = 2^10
        spec1 = parse_spec(json.load(open(FIX / "f1_spec_21.json")))
        d1 = DimVector((1, 1), (2,))
        rep1 = orbit_census(spec1, d1, 0)
        rep1m = mutated_orbit_census(mutate_rs_spec(spec1, d1, 0))
        assert rep1.orbit_count == rep1m.orbit_count == expected["f1_orbit_count"]
        assert rep1.sha256() == expected["f1_orbit_census"]
        assert rep1m.sha256() == expected["f1_mutated_orbit_census"]
        # (1,2) fixture, |W| = 2^5
        spec2 = parse_spec(json.load(open(FIX / "f2_spec_12.json")))
        d2 = DimVector((1,), (1, 1))
        rep2 = orbit_census(spec2, d2, 0)
        rep2m = mutated_orbit_census(mutate_rs_spec(spec2, d2, 0))
        assert rep2.orbit_count == rep2m.orbit_count == expected["f2_orbit_count"]
        assert rep2.sha256() == expected["f2_orbit_census"]
        assert rep2m.sha256() == expected["f2_mutated_orbit_census"]
        print(f"  orbit counts: {rep1.orbit_count} = {rep1m.orbit_count}, "
              f"{rep2.orbit_count} = {rep2m.orbit_count}")


def test_criterion_08_transfer():
    with Budget("8 Prop 7.1 / Thm 7.5 transfer", 300):
        from morphmut.jsonio import parse_spec
        spec = parse_spec(json.load(open(FIX / "f1_spec_21.json")))
        dims = DimVector((1, 1), (2,))
        pol = Polarization((Fraction(1, 2), Fraction(1, 2)), (Fraction(1, 2),))
        rep = transfer_check(spec, dims, 0, pol)
        assert rep.violations == []
        assert rep.extra["windows"]["prop71"]
        assert rep.extra["windows"]["thm75"]
        assert rep.extra["windows"]["cor74"]
        assert rep.open_points == 930
        print(f"  {rep.open_points} open points, SS = {rep.semistable_count}, "
              f"stable = {rep.stable_count}, cor74 SS orbits = "
              f"{rep.extra['cor74_ss_orbits']}, zero violations")


def test_criterion_09_table_and_polarization_arithmetic():
    with Budget("9 mutated dims + transported polarization", 10):
        # dim M'_{p+1} = sum_{j>p} m_j h_1j - n_1 and the full table
        from tests.test_mutation import expected_table_dims
        cases = [
            (1, (-2, -1), (0, 1), (1, 1), (1, 1), 1),
            (1, (-1, 0), (1,), (1, 1), (2,), 0),
            (1, (-1,), (0, 1), (1,), (1, 1), 0),
            (2, (-2, -1), (0,), (1, 1), (2,), 1),
            (1, (-2, -1, 0), (1, 2), (1, 1, 1), (1, 1), 1),
        ]
        for nvars, a, b, m, n, p in cases:
            spec = sym_spec(F2, nvars, a, b)
            dims = DimVector(m, n)
            mut = mutate_rs_spec(spec, dims, p)
            mp, np_, dimH, dimB = expected_table_dims(spec, dims, p)
            assert mut.dims.m == mp and mut.dims.n == np_
            assert mut.dims.m[p] == sum(
                m[j - 1] * spec.hdim(1, j) for j in range(p + 1, spec.r + 1)) - n[0]
            for key, d in dimH.items():
                assert mut.spec.hdim(*key) == d
            for key, d in dimB.items():
                assert mut.spec.bdim(*key) == d
            assert validate(mut.spec).ok
        # transported polarization: normalization + defining relation,
        # exhaustive over all subspace-dimension tuples of small instances
        rng = random.Random(109)
        done = 0
        while done < 12:
            r, s = rng.randint(1, 3), rng.randint(1, 2)
            p = rng.randint(0, r - 1)
            m = tuple(rng.randint(1, 2) for _ in range(r))
            n = tuple(rng.randint(1, 2) for _ in range(s))
            h1 = tuple(rng.randint(1, 3) for _ in range(r))
            lam_raw = [Fraction(rng.randint(1, 4)) for _ in range(r)]
            lam = [x / sum(l * mm for l, mm in zip(lam_raw, m)) for x in lam_raw]
            mu_raw = [Fraction(rng.randint(1, 4)) for _ in range(s)]
            mu = [x / sum(u * nn for u, nn in zip(mu_raw, n)) for x in mu_raw]
            try:
                tp = transport_from_dims(lam, mu, m, n, h1, p)
            except Exception:
                continue
            done += 1
            mp = tuple(m[:p]) + (sum(m[j] * h1[j] for j in range(p, r)) - n[0],)
            np_ = tuple(m[p:]) + tuple(n[1:])
            assert sum(a * d for a, d in zip(tp.alpha, mp)) == 1
            assert sum(b * d for b, d in zip(tp.beta, np_)) == 1
            for msub in itertools.product(*[range(mm + 1) for mm in m]):
                for nsub in itertools.product(*[range(nn + 1) for nn in n]):
                    lhs = sum(l * d for l, d in zip(lam, msub)) \
                        - sum(u * d for u, d in zip(mu, nsub))
                    mps = list(msub[:p]) + [
                        sum(msub[j] * h1[j] for j in range(p, r)) - nsub[0]]
                    nps = list(msub[p:]) + list(nsub[1:])
                    rhs = sum(a * tp.c * d for a, d in zip(tp.alpha, mps)) \
                        - sum(b * tp.c * d for b, d in zip(tp.beta, nps))
                    assert lhs == rhs


def test_criterion_10_kronecker():
    with Budget("10 Kronecker criterion + Prop 2.1 census", 60):
        from morphmut.matrix import rand_mat
        from morphmut.rs_spec import point_from_blocks
        from morphmut.calculators import kronecker_dual_point
        spec = sym_spec(F2, 2, (-1,), (0,))  # (1,1) with dim H = 3
        dims = DimVector((2,), (2,))
        pol = Polarization((Fraction(1, 2),), (Fraction(1, 2),))
        rng = random.Random(110)
        for _ in range(500):
            fmat = rand_mat(F2, 2, 6, rng)
            w = point_from_blocks(dims, [[fmat]])
            v1 = is_gred_semistable(spec, dims, w, pol)
            v2 = kronecker_semistable(fmat, 3)
            assert (v1.semistable, v1.stable) == (v2.semistable, v2.stable)
        # Prop 2.1 orbit-set bijection at q=3, m=1, n=2 over GF(2)
        rep = kronecker_orbit_census(F2, 3, 1, 2)
        rep_dual = kronecker_orbit_census(F2, 3, 1, 1)
        assert rep["orbits"] == rep_dual["orbits"]
        # and semistability matches across the duality, pointwise
        for code in range(2 ** 6):
            ent, c = [], code
            for _ in range(6):
                c, d = divmod(c, 2)
                ent.append(d)
            fmat = Mat(F2, 2, 3, tuple(ent))
            if rank(fmat) != 2:
                continue
            a = kronecker_dual_point(fmat, 3)
            va, vf = kronecker_semistable(a, 3), kronecker_semistable(fmat, 3)
            assert (va.semistable, va.stable) == (vf.semistable, vf.stable)
        print(f"  orbit counts {rep['orbits']} = {rep_dual['orbits']}")


def test_criterion_11_section8_numbers():
    with Budget("11 closed-form numbers", 10):
        # rho' of family 8.1.1 matches the displayed expression; both sides
        # are degree-(1,1) rational functions of eps, so four sample points
        # force the identity
        for m in (0, 1, 2):
            for eps in (Fraction(1, 100), Fraction(1, 1000), Fraction(1, 7),
                        Fraction(1, 3)):
                got = rho_prime_family("8.1.1", m, eps)["rho_prime"]
                want = 3 + Fraction(144 * eps * (m + 1),
                                    29 * m + 14 + eps * (12 * m - 24))
                assert got == want
        # singular values, quotient count and dimensions for n = 2..6
        for n in range(2, 7):
            rhos = pn_singular_rhos(n)
            assert rhos == [Fraction(k, n + 2 - k) for k in range(1, n + 2)]
            g, s, c = pn_quotient_dims(n)
            assert c == 2 * (n // 2) + 2
            assert g == Fraction((n + 2) * (n * n + 3 * n - 2), 2)
            assert s == Fraction(n * (n + 3), 2)
        # mutated multiplicities via mutate_rs_spec:
        # n(n+3)/2 on the projective-space fixtures
        for n in (2, 3):
            spec = sym_spec(F2, n, (-2, -1), (0,))
            mut = mutate_rs_spec(spec, DimVector((1, 1), (n + 2,)), 0)
            assert mut.dims.m == (n * (n + 3) // 2,)
        # 3 m1 + 6 m2 - n on the plane fixture: the line-bundle model carries
        # the same dimension pattern with the two source slots swapped
        spec = sym_spec(F2, 2, (-2, -1), (0,))
        assert (spec.hdim(1, 1), spec.hdim(1, 2)) == (6, 3)
        for m1, m2, n in [(1, 2, 10), (2, 1, 11), (1, 1, 8)]:
            mut = mutate_rs_spec(spec, DimVector((m2, m1), (n,)), 0)
            assert mut.dims.m == (3 * m1 + 6 * m2 - n,)


def test_criterion_12_cli_determinism():
    with Budget("12 CLI determinism", 60):
        invocations = [
            ("validate", str(FIX / "sym_p2.json")),
            ("mutate", "--p", "0", str(FIX / "sym_p2.json"), str(FIX / "point0.json")),
            ("--seed", "7", "stability", "--pol", "1/2,1/2;1/2",
             str(FIX / "f1_spec_21.json"), str(FIX / "f1_point.json")),
            ("census", "--mode", "orbits", "--p", "0", "--dims", "1;1,1",
             "--with-mutated", str(FIX / "f2_spec_12.json")),
            ("--seed", "3", "examples", "family", "--id", "8.1.2", "--m", "2",
             "--eps", "1/500"),
        ]
        for argv in invocations:
            outs = []
            for _ in range(2):
                r = subprocess.run([sys.executable, "-m", "morphmut.cli", *argv],
                                   capture_output=True, cwd=ROOT)
                outs.append((r.returncode, r.stdout))
            assert outs[0] == outs[1], argv
            assert outs[0][1] == outs[1][1]
