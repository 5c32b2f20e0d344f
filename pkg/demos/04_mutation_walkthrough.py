"""A complete mutation walkthrough at index p.

Starting from a type-(2,2) problem we build the abstract space Theta_1,
mutate a point, land in the type-(2,2) mutated problem, transport the
polarization, and confirm the involution on the abstract side.
"""

import random
from fractions import Fraction

from morphmut.matrix import GF
from morphmut.rs_spec import DimVector, rand_point, sym_spec, validate
from morphmut.stability import Polarization
from morphmut.theta import check_ddtheta, in_W0
from morphmut.mutation import (in_W0_mutated, mutate_rs_point, mutate_rs_spec,
                               point_to_theta, theta_from_rs,
                               transport_polarization, window_predicates)


def main():
    field = GF(2)
    spec = sym_spec(field, 1, (-2, -1), (0, 1))
    dims = DimVector((1, 1), (1, 1))
    p = 1

    trs = theta_from_rs(spec, dims, p)
    th = trs.theta
    print(f"Theta_{p}: dim X1..X4 = {th.d1},{th.d2},{th.d3},{th.d4}, "
          f"dim H_L = {th.dHL}, dim H_R = {th.dHR}, dim M = {th.dM}")
    print("double mutation returns Theta (canonical identifications):",
          check_ddtheta(th))

    mut = mutate_rs_spec(spec, dims, p)
    print(f"\nmutated spec: type ({mut.spec.r},{mut.spec.s}), "
          f"dims m = {mut.dims.m}, n = {mut.dims.n}")
    print("mutated spec passes validation:", validate(mut.spec).ok)

    rng = random.Random(2)
    while True:
        w = rand_point(spec, dims, rng)
        if in_W0(th, point_to_theta(trs, w)):
            break
    _, wprime, u, alpha = mutate_rs_point(spec, dims, p, w, trs=trs, mut=mut)
    print("\nmutated point lands in the open locus W'_0(p):",
          in_W0_mutated(mut, wprime))
    print("choice vectors: |u| =", u.rows, "entries, |alpha| =", alpha.rows)

    pol = Polarization((Fraction(1, 4), Fraction(3, 4)),
                       (Fraction(1, 2), Fraction(1, 2)))
    print("\ntransfer windows:", window_predicates(pol, dims, spec, p))
    tp = transport_polarization(pol, spec, dims, p)
    print("transported polarization: alpha =", [str(x) for x in tp.alpha],
          ", beta =", [str(x) for x in tp.beta])


if __name__ == "__main__":
    main()
