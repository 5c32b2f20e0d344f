"""morphmut: exact-arithmetic morphism spaces of type (r,s) and their mutations."""

from .matrix import (
    BudgetExceeded,
    Field,
    GF,
    Mat,
    QQ,
    Subspace,
    all_subspaces,
    enumerate_subspaces,
    gaussian_binomial,
    kernel_basis,
    quotient_map,
    rank,
    rref,
    solve_particular,
)

__all__ = [
    "BudgetExceeded", "Field", "GF", "Mat", "QQ", "Subspace",
    "all_subspaces", "enumerate_subspaces", "gaussian_binomial",
    "kernel_basis", "quotient_map", "rank", "rref", "solve_particular",
]
