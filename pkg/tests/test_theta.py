import itertools
import random

import pytest

from morphmut.matrix import GF, Mat, QQ, rank, kernel_basis
from morphmut.rs_spec import DimVector, rand_point, sym_spec, zero_point
from morphmut.mutation import theta_from_rs, point_to_theta, in_W0_p
from morphmut.theta import (
    ThetaError, ThetaPoint, act_hL, act_lambda, check_ddtheta, choice_set,
    dual_theta, gamma1_bar, h_prime_orbit, in_W0, mutate_point, phi2_bar,
    q_phi2, swap_tensor_vec, validate_theta, zero_theta_point, x4_projection,
    _vec, _unvec,
)

F2 = GF(2)


def fixture_22(field=F2):
    """Type (2,2) instance with nontrivial H_L, H_R, used at p = 1."""
    spec = sym_spec(field, 1, (-2, -1), (0, 1))
    dims = DimVector((1, 1), (1, 1))
    return spec, dims


def fixture_21(field=F2):
    spec = sym_spec(field, 1, (-1, 0), (1,))
    dims = DimVector((1, 1), (2,))
    return spec, dims


def rand_w0_point(spec, dims, p, rng, trs=None):
    if trs is None:
        trs = theta_from_rs(spec, dims, p)
    while True:
        w = rand_point(spec, dims, rng)
        pt = point_to_theta(trs, w)
        if in_W0(trs.theta, pt):
            return w, pt, trs


def test_theta_from_rs_p2_dims():
    spec = sym_spec(QQ, 2, (-2, -1), (0,))
    dims = DimVector((1, 1), (4,))
    trs = theta_from_rs(spec, dims, 0)
    th = trs.theta
    assert th.d2 == 6 + 3 == 9
    assert th.dM == 4
    assert th.d1 == th.d3 == th.d4 == th.dHL == th.dHR == 0


def test_theta_r1_degenerate():
    spec = sym_spec(F2, 1, (-1,), (0,))
    dims = DimVector((2,), (1,))
    trs = theta_from_rs(spec, dims, 0)
    th = trs.theta
    assert th.d1 == 0 and th.d3 == 0 and th.dHL == 0
    assert th.d2 == 2 * 2 and th.dM == 1


def test_theta_diagram_property():
    rng = random.Random(0)
    cases = [
        (1, (-2, -1), (0, 1), (1, 1), (1, 1), 1),
        (1, (-2, -1), (0, 1), (1, 1), (1, 1), 0),
        (1, (-1, 0), (1,), (1, 1), (2,), 0),
        (2, (-2, -1), (0,), (1, 1), (2,), 1),
        (1, (-2, -1, 0), (1, 2), (1, 1, 1), (1, 1), 1),
        (1, (-2, -1, 0), (1, 2), (1, 1, 1), (1, 1), 2),
    ]
    for nvars, a, b, m, n, p in cases:
        for field in (F2, GF(3)):
            spec = sym_spec(field, nvars, a, b)
            trs = theta_from_rs(spec, DimVector(m, n), p)
            validate_theta(trs.theta)  # includes square (D)


def test_theta_rejects_small_x2():
    spec = sym_spec(F2, 1, (-1, 0), (1,))
    # p = 1: X2 = H_12 (x) M_2* has dim 2, so n_1 = 2 is not allowed
    with pytest.raises(ThetaError):
        theta_from_rs(spec, DimVector((1, 1), (2,)), 1)


def test_in_W0_cases():
    spec, dims = fixture_21()
    trs = theta_from_rs(spec, dims, 0)
    z = zero_point(spec, dims)
    assert not in_W0(trs.theta, point_to_theta(trs, z))
    # chain: W0_p subset of W0_{p-1}, exhaustively on a (2,2) instance
    spec2, dims2 = fixture_22()
    trs0 = theta_from_rs(spec2, dims2, 0)
    trs1 = theta_from_rs(spec2, dims2, 1)
    rng = random.Random(1)
    for _ in range(200):
        w = rand_point(spec2, dims2, rng)
        if in_W0(trs1.theta, point_to_theta(trs1, w)):
            assert in_W0(trs0.theta, point_to_theta(trs0, w))


def test_dual_theta_dimensions():
    spec, dims = fixture_22()
    trs = theta_from_rs(spec, dims, 1)
    th = trs.theta
    mut = dual_theta(th)
    d = mut.dual
    # rank-nullity consequences of the definitions
    assert d.d4 == th.d2 * th.d1 - th.dHL
    assert d.dHL == th.dHR * th.d2 - th.d4
    assert d.d1 == th.dHR and d.d2 == th.d2 and d.d3 == th.d3
    assert d.dHR == th.d1 and d.dM == th.d2 - th.dM


def test_dual_theta_gamma4_bijective_degenerate():
    # s = 1 gives H_R = 0, X4 = 0: gamma4 bijective, H_L' = 0
    spec, dims = fixture_21()
    trs = theta_from_rs(spec, dims, 0)
    mut = dual_theta(trs.theta)
    assert mut.dual.dHL == 0
    assert mut.dual.gamma2.cols == 0


@pytest.mark.parametrize("field", [F2, GF(3), QQ])
def test_ddtheta_small(field):
    spec = sym_spec(field, 1, (-2, -1), (0, 1))
    trs = theta_from_rs(spec, DimVector((1, 1), (1, 1)), 1)
    assert check_ddtheta(trs.theta)


def test_ddtheta_batch():
    cases = [
        (1, (-2, -1), (0, 1), (1, 1), (1, 1), 1),
        (1, (-1, 0), (1,), (1, 1), (2,), 0),
        (1, (-2, -1), (0,), (1, 2), (2,), 1),
        (2, (-2, -1), (0,), (1, 1), (2,), 1),
        (1, (-2, -1, 0), (1, 2), (1, 1, 1), (1, 1), 1),
    ]
    for nvars, a, b, m, n, p in cases:
        for field in (F2, GF(3)):
            spec = sym_spec(field, nvars, a, b)
            trs = theta_from_rs(spec, DimVector(m, n), p)
            assert check_ddtheta(trs.theta), (nvars, a, b, m, n, p, field)


def test_mutate_point_basics():
    spec, dims = fixture_22()
    rng = random.Random(2)
    w, pt, trs = rand_w0_point(spec, dims, 1, rng)
    th = trs.theta
    z, u, alpha = mutate_point(th, pt)
    # the defining equations of the choices
    assert th.gamma4.mul(u) == pt.x4.neg()
    qp = q_phi2(th, pt)
    rhs = _vec(pt.phi1.transpose())
    assert qp.mul(alpha) == rhs
    # z lands in W'^0 of the dual theta
    mut = dual_theta(th)
    assert in_W0(mut.dual, z)
    # supplied-choice validation
    with pytest.raises(ThetaError):
        mutate_point(th, pt, u=u.add(_unit(th.field, th.dHR * th.d2)))


def _unit(field, n):
    ent = [field.zero()] * n
    # pick a vector outside ker(gamma4) with overwhelming probability: e_0
    ent[0] = field.one()
    return Mat(field, n, 1, tuple(ent))


def test_mutate_point_zero_choices():
    # x4 = 0 and phi1 = 0 admit u = 0, alpha = 0, giving z = (0, phi2'; x3, 0)
    spec, dims = fixture_22()
    trs = theta_from_rs(spec, dims, 1)
    th = trs.theta
    rng = random.Random(3)
    while True:
        w = rand_point(spec, dims, rng)
        pt = point_to_theta(trs, w)
        if in_W0(th, pt):
            break
    f = th.field
    pt0 = ThetaPoint(Mat.zeros(f, th.d1, th.dM), pt.phi2,
                     pt.x3, Mat.zeros(f, th.d4, 1))
    u0 = Mat.zeros(f, th.dHR * th.d2, 1)
    a0 = Mat.zeros(f, th.d2 * th.d1, 1)
    z, _, _ = mutate_point(th, pt0, u0, a0)
    assert z.phi1.is_zero() and z.x4.is_zero()
    assert z.x3 == pt.x3


def test_prop63_choice_set_is_one_orbit():
    spec, dims = fixture_22()
    rng = random.Random(4)
    trs = theta_from_rs(spec, dims, 1)
    mut = dual_theta(trs.theta)
    for _ in range(5):
        w, pt, _ = rand_w0_point(spec, dims, 1, rng, trs)
        zs = choice_set(trs.theta, pt)
        z0 = next(iter(zs.values()))
        orb = h_prime_orbit(mut.dual, z0)
        assert set(zs.keys()) == set(orb.keys())


def test_prop64_zz_is_sign_translate():
    # GF(3) so that the signs actually matter
    for field in (GF(3), F2):
        spec = sym_spec(field, 1, (-2, -1), (0, 1))
        dims = DimVector((1, 1), (1, 1))
        trs = theta_from_rs(spec, dims, 1)
        th = trs.theta
        mut1 = dual_theta(th)
        rng = random.Random(5)
        from morphmut.theta import ddtheta_identifications
        _, mut2, maps = ddtheta_identifications(th)
        for _ in range(8):
            w, pt, _ = rand_w0_point(spec, dims, 1, rng, trs)
            z, u, alpha = mutate_point(th, pt, proj4=trs.proj4)
            # the proof's choices: u' = -alpha, alpha' = u (with the factor
            # swaps identifying X2* (x) X1 with H_R' (x) X2' and so on)
            u_second = swap_tensor_vec(alpha.neg(), th.d2, th.d1)
            a_second = swap_tensor_vec(u, th.dHR, th.d2)
            zz, u2, a2 = mutate_point(mut1.dual, z, u=u_second, alpha=a_second)
            # map back through the canonical identifications
            id_M = _point_m_identification(th, pt, mut1, zz)
            phi1b = maps["X1"].mul(zz.phi1).mul(id_M.transpose())
            phi2b = maps["X2"].mul(zz.phi2).mul(id_M.transpose())
            x3b = maps["X3"].mul(zz.x3)
            x4b = maps["X4"].mul(zz.x4)
            assert phi1b == pt.phi1.neg()
            assert phi2b == pt.phi2
            assert x3b == pt.x3
            assert x4b == pt.x4.neg()


def _point_m_identification(th, pt, mut1, zz):
    from morphmut.theta import point_m_identification
    return point_m_identification(th, pt)


def test_prop65_shift_recipes_exact():
    """Both unipotent shifts admit explicit witnesses with z unchanged:
    for w . h_L take u2 = u1, alpha2 = alpha1 + gamma1_bar(h_L);
    for lambda . w take u2 = u1 - <lambda, phi2>, alpha2 = alpha1."""
    spec, dims = fixture_22()
    trs = theta_from_rs(spec, dims, 1)
    th = trs.theta
    g1b = gamma1_bar(th)
    rng = random.Random(6)
    f = th.field
    w, pt, _ = rand_w0_point(spec, dims, 1, rng, trs)
    z1, u1, a1 = mutate_point(th, pt)
    for hv in itertools.product(f.elements(), repeat=th.dHL):
        hcol = Mat.column(f, hv)
        shifted = act_hL(th, pt, hcol)
        a2 = a1.add(g1b.mul(hcol))
        z2, _, _ = mutate_point(th, shifted, u=u1, alpha=a2)
        assert z2 == z1
    for lv in itertools.product(f.elements(), repeat=th.dHR * th.dM):
        lam = Mat(f, th.dHR, th.dM, tuple(f.canon(x) for x in lv))
        shifted = act_lambda(th, pt, lam)
        corr = lam.mul(pt.phi2.transpose())   # <lambda, phi2> in H_R (x) X2
        u2 = u1.sub(_vec(corr))
        z2, _, _ = mutate_point(th, shifted, u=u2, alpha=a1)
        assert z2 == z1


def test_prop65_default_choices_land_in_h_orbit():
    spec, dims = fixture_22()
    trs = theta_from_rs(spec, dims, 1)
    th = trs.theta
    mut = dual_theta(th)
    rng = random.Random(7)
    f = th.field
    w, pt, _ = rand_w0_point(spec, dims, 1, rng, trs)
    z1, _, _ = mutate_point(th, pt)
    orb = h_prime_orbit(mut.dual, z1)
    for hv in itertools.product(f.elements(), repeat=th.dHL):
        z2, _, _ = mutate_point(th, act_hL(th, pt, Mat.column(f, hv)))
        assert z2.key() in orb
    for lv in itertools.product(f.elements(), repeat=th.dHR * th.dM):
        lam = Mat(f, th.dHR, th.dM, tuple(f.canon(x) for x in lv))
        z2, _, _ = mutate_point(th, act_lambda(th, pt, lam))
        assert z2.key() in orb
