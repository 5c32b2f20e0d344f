"""Type-(r,s) morphism data and its triangular symmetry groups.

A spec packages the connecting spaces H_li, A_ji, B_ml and their composition
tensors; the canonical generator models line-bundle morphisms, where the
compositions are polynomial multiplication.  The symmetry group is block
lower-triangular on each side, with the three-step *-composition on the
strictly-lower entries.
"""

import random

from morphmut.matrix import GF
from morphmut.rs_spec import DimVector, dual_spec, rand_point, sym_spec, validate
from morphmut.groups import (act_left, act_right, enumerate_group, side_L,
                             tri_decompose, tri_group_order, tri_inv, tri_mul,
                             tri_rand)


def main():
    field = GF(2)
    spec = sym_spec(field, 1, (-2, -1), (0, 1))
    print(f"type ({spec.r},{spec.s}) spec, dimH = {spec.dimH}, "
          f"dimA_21 = {spec.adim(2, 1)}, dimB_21 = {spec.bdim(2, 1)}")
    rep = validate(spec)
    print(f"validation: {rep.summary()}")

    d = dual_spec(spec)
    print(f"dual is a ({d.r},{d.s}) spec; dual of dual == original:",
          dual_spec(d) == spec)

    dims = DimVector((1, 2), (2, 1))
    side = side_L(spec, dims)
    print(f"\n|G_L| over GF(2) with m = {dims.m}: {tri_group_order(side)}")

    rng = random.Random(0)
    g, h = tri_rand(side, rng), tri_rand(side, rng)
    print("group law associates:",
          tri_mul(tri_mul(g, h), g) == tri_mul(g, tri_mul(h, g)))
    u, gred = tri_decompose(g)
    print("unipotent * reductive recomposition:", tri_mul(u, gred) == g)
    print("inverse law:", tri_mul(tri_inv(g), g).key() ==
          tri_mul(g, tri_inv(g)).key())

    w = rand_point(spec, dims, rng)
    moved = act_right(spec, dims, w, g)
    print("\nright action changes the point:", moved != w)
    print("identity acts trivially:",
          act_right(spec, dims, w, tri_mul(tri_inv(g), g)) == w)

    small = sym_spec(field, 1, (-1, -1), (0,))
    tiny = DimVector((1, 1), (2,))
    print("\nexhaustive enumeration of the order-2 group:",
          len(list(enumerate_group(small, tiny, 'G_L'))), "elements")


if __name__ == "__main__":
    main()
