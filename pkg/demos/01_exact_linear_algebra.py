"""Tour of the exact linear-algebra substrate.

Everything is computed over Q (fractions) or GF(p) (residues); there is no
floating point anywhere, so ranks, kernels and subspace identities are exact.
"""

from morphmut.matrix import (GF, Mat, QQ, Subspace, enumerate_subspaces,
                             gaussian_binomial, kernel_basis,
                             quotient_map, rref, solve_particular)


def main():
    print("== reduced row echelon over GF(2) ==")
    m = Mat.from_rows(GF(2), [[1, 0, 1], [0, 1, 1]])
    red, rk, piv = rref(m)
    print(f"matrix {m}, rank {rk}, pivots {piv}")

    print("\n== kernels and quotients ==")
    k = kernel_basis(m)
    print(f"kernel of {m} is spanned by {k.basis}")
    sub = Subspace.from_span(QQ, 3, [[1, 0, 0]])
    P = quotient_map(3, sub)
    print(f"quotient of Q^3 by span(e1): projection {P}")
    print("projection kills the subspace:", P.mul(Mat.column(QQ, [1, 0, 0])).is_zero())

    print("\n== deterministic solving ==")
    a = Mat.from_rows(GF(2), [[1, 1]])
    b = Mat.column(GF(2), [1])
    x = solve_particular(a, b)
    print(f"solve {a} x = {b}: pivot solution x = {x} (free variables zeroed)")

    print("\n== counting subspaces ==")
    for p in (2, 3):
        for n in range(4):
            for kk in range(n + 1):
                count = sum(1 for _ in enumerate_subspaces(GF(p), n, kk))
                assert count == gaussian_binomial(n, kk, p)
        print(f"GF({p}): all Gaussian-binomial counts confirmed for n <= 3")


if __name__ == "__main__":
    main()
