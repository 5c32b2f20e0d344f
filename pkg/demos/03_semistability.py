"""Deciding (semi-)stability by exhaustive finite-field quantification.

The reductive-part notion quantifies over all invariant subspace tuples with
at least one proper target; the full-group notion additionally walks the
unipotent orbit.  Over GF(p) both are decided exactly; over Q only a sampled
witness search is offered (it never certifies semistability).
"""

import random
from fractions import Fraction

from morphmut.matrix import GF, Mat, QQ
from morphmut.rs_spec import DimVector, point_from_blocks, sym_spec, zero_point
from morphmut.stability import (Polarization, c_tau, is_g_semistable,
                                is_gred_semistable, kronecker_semistable,
                                sampled_gred_check, thm31_condition)


def main():
    field = GF(2)
    spec = sym_spec(field, 1, (-1, 0), (1,))
    dims = DimVector((1, 1), (2,))
    pol = Polarization((Fraction(1, 2), Fraction(1, 2)), (Fraction(1, 2),))

    z = zero_point(spec, dims)
    v = is_g_semistable(spec, dims, z, pol)
    print("zero point semistable?", v.semistable)
    msubs, nsubs = v.witness
    print("destabilizing tuple dims:", [s.dim for s in msubs], "->",
          [s.dim for s in nsubs])

    blocks = [[Mat.from_rows(field, [[1, 0, 0, 1], [0, 1, 1, 0]]),
               Mat.from_rows(field, [[1, 0], [0, 1]])]]
    w = point_from_blocks(dims, blocks)
    v = is_g_semistable(spec, dims, w, pol)
    print("a generic point: semistable =", v.semistable, ", stable =", v.stable)

    print("\n== Kronecker modules (the (1,1) case) ==")
    f = Mat.from_rows(field, [[1, 0, 0], [0, 1, 0]])
    vk = kronecker_semistable(f, 3)
    print("full-rank 2x3 module over GF(2): stable =", vk.stable)

    print("\n== the constant c(tau, k) and the existence condition ==")
    cval = c_tau(spec, dims.m[1])
    print(f"c(tau, m_2) on this (2,1) instance = {cval}")
    print("existence condition for lambda = (1/4, 3/4):",
          thm31_condition(Polarization((Fraction(1, 4), Fraction(3, 4)),
                                       (Fraction(1, 2),)), spec, dims, cval))

    print("\n== sampled mode over Q ==")
    specq = sym_spec(QQ, 1, (-1, 0), (1,))
    rng = random.Random(1)
    vq = sampled_gred_check(specq, dims, zero_point(specq, dims), pol, rng=rng)
    print("zero point over Q: witness found =", vq.witness is not None,
          "(certified =", vq.certified, ")")


if __name__ == "__main__":
    main()
