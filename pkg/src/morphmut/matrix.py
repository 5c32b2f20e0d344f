"""Exact dense linear algebra over Q and GF(p).

Everything downstream (specs, groups, stability, mutations) is built on the
two types defined here:

  * Mat       -- immutable dense matrix with entries in an exact field,
  * Subspace  -- subspace of a coordinate space, stored as a canonical
                 reduced row-echelon basis, so equal subspaces compare equal.

No floating point anywhere.  Tensor (Kronecker) indices are always "left
factor slow": the pair (i, j) with i in the left factor and j in the right
factor is flattened to i * dim_right + j.  `kron` is the single owner of
this convention; all higher modules flatten indices the same way.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

PRIMES = (2, 3, 5, 7, 11, 13)

# default guard for exhaustive subspace enumeration (ambient dimension)
SUBSPACE_AMBIENT_BUDGET = 8


class BudgetExceeded(Exception):
    """Raised when an exhaustive enumeration would exceed its budget."""


@dataclass(frozen=True)
class Field:
    """Q (p is None) or the prime field GF(p) with p in 2..13."""

    p: int | None = None

    def __post_init__(self):
        if self.p is not None and self.p not in PRIMES:
            raise ValueError(f"p must be one of {PRIMES}, got {self.p}")

    @property
    def is_finite(self) -> bool:
        return self.p is not None

    def zero(self):
        return 0 if self.p is not None else Fraction(0)

    def one(self):
        return 1 if self.p is not None else Fraction(1)

    def canon(self, x):
        """Canonical form: residue in [0, p) or a reduced Fraction."""
        if self.p is not None:
            return int(x) % self.p
        return Fraction(x)

    def add(self, a, b):
        return (a + b) % self.p if self.p is not None else a + b

    def sub(self, a, b):
        return (a - b) % self.p if self.p is not None else a - b

    def mul(self, a, b):
        return (a * b) % self.p if self.p is not None else a * b

    def neg(self, a):
        return (-a) % self.p if self.p is not None else -a

    def inv(self, a):
        if self.p is not None:
            a %= self.p
            if a == 0:
                raise ZeroDivisionError("inverse of 0")
            return pow(a, self.p - 2, self.p)
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return 1 / Fraction(a)

    def elements(self):
        """All field elements, canonical order.  Finite fields only."""
        if self.p is None:
            raise BudgetExceeded("cannot enumerate the rationals")
        return range(self.p)

    def parse_scalar(self, s):
        if self.p is not None:
            v = int(s)
            if not 0 <= v < self.p:
                raise ValueError(f"non-canonical GF({self.p}) element {s!r}")
            return v
        if isinstance(s, str):
            return Fraction(s)
        if isinstance(s, int):
            return Fraction(s)
        raise ValueError(f"bad rational literal {s!r}")

    def show_scalar(self, x):
        if self.p is not None:
            return int(x)
        f = Fraction(x)
        return f"{f.numerator}/{f.denominator}"

    def to_json(self):
        return {"type": "Q"} if self.p is None else {"type": "GF", "p": self.p}

    @staticmethod
    def from_json(obj) -> "Field":
        if obj.get("type") == "Q":
            return QQ
        if obj.get("type") == "GF":
            return Field(int(obj["p"]))
        raise ValueError(f"bad field descriptor {obj!r}")

    def __repr__(self):
        return "Q" if self.p is None else f"GF({self.p})"


QQ = Field(None)


def GF(p: int) -> Field:
    return Field(p)


@dataclass(frozen=True)
class Mat:
    """Immutable dense matrix, row-major entries, canonical field elements."""

    field: Field
    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entry count does not match shape")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_rows(field: Field, rows) -> "Mat":
        rows = [list(r) for r in rows]
        nr = len(rows)
        nc = len(rows[0]) if rows else 0
        if any(len(r) != nc for r in rows):
            raise ValueError("ragged rows")
        ent = tuple(field.canon(x) for r in rows for x in r)
        return Mat(field, nr, nc, ent)

    @staticmethod
    def zeros(field: Field, rows: int, cols: int) -> "Mat":
        return Mat(field, rows, cols, (field.zero(),) * (rows * cols))

    @staticmethod
    def identity(field: Field, n: int) -> "Mat":
        z, o = field.zero(), field.one()
        ent = tuple(o if i == j else z for i in range(n) for j in range(n))
        return Mat(field, n, n, ent)

    @staticmethod
    def column(field: Field, values) -> "Mat":
        vals = [field.canon(v) for v in values]
        return Mat(field, len(vals), 1, tuple(vals))

    # -- access ------------------------------------------------------------

    def get(self, i: int, j: int):
        return self.entries[i * self.cols + j]

    def row_list(self, i: int):
        return list(self.entries[i * self.cols:(i + 1) * self.cols])

    def to_lists(self):
        return [self.row_list(i) for i in range(self.rows)]

    def is_zero(self) -> bool:
        z = self.field.zero()
        return all(x == z for x in self.entries)

    @property
    def shape(self):
        return (self.rows, self.cols)

    # -- arithmetic --------------------------------------------------------

    def _check(self, other: "Mat"):
        if self.field != other.field:
            raise ValueError("field mismatch")

    def add(self, other: "Mat") -> "Mat":
        self._check(other)
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        f = self.field
        ent = tuple(f.add(a, b) for a, b in zip(self.entries, other.entries))
        return Mat(f, self.rows, self.cols, ent)

    def sub(self, other: "Mat") -> "Mat":
        self._check(other)
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        f = self.field
        ent = tuple(f.sub(a, b) for a, b in zip(self.entries, other.entries))
        return Mat(f, self.rows, self.cols, ent)

    def neg(self) -> "Mat":
        f = self.field
        return Mat(f, self.rows, self.cols, tuple(f.neg(x) for x in self.entries))

    def scale(self, c) -> "Mat":
        f = self.field
        c = f.canon(c)
        return Mat(f, self.rows, self.cols, tuple(f.mul(c, x) for x in self.entries))

    def mul(self, other: "Mat") -> "Mat":
        self._check(other)
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        f = self.field
        p = f.p
        n, k, m = self.rows, self.cols, other.cols
        a, b = self.entries, other.entries
        z = f.zero()
        out = [z] * (n * m)
        for i in range(n):
            arow = a[i * k:(i + 1) * k]
            orow = i * m
            for j, aij in enumerate(arow):
                if aij == 0:
                    continue
                brow = b[j * m:(j + 1) * m]
                for c in range(m):
                    out[orow + c] += aij * brow[c]
        if p is not None:
            out = [x % p for x in out]
        return Mat(f, n, m, tuple(out))

    def transpose(self) -> "Mat":
        e = self.entries
        nc = self.cols
        ent = tuple(e[i * nc + j] for j in range(nc) for i in range(self.rows))
        return Mat(self.field, nc, self.rows, ent)

    def kron(self, other: "Mat") -> "Mat":
        """Tensor product; composite index (i, j) -> i * inner + j, left slow."""
        self._check(other)
        f = self.field
        r1, c1, r2, c2 = self.rows, self.cols, other.rows, other.cols
        ent = []
        for i1 in range(r1):
            for i2 in range(r2):
                for j1 in range(c1):
                    aij = self.get(i1, j1)
                    if aij == 0:
                        ent.extend([f.zero()] * c2)
                    else:
                        ent.extend(f.mul(aij, other.get(i2, j2)) for j2 in range(c2))
        return Mat(f, r1 * r2, c1 * c2, tuple(ent))

    def hstack(self, other: "Mat") -> "Mat":
        self._check(other)
        if self.rows != other.rows:
            raise ValueError("row mismatch in hstack")
        ent = []
        for i in range(self.rows):
            ent.extend(self.row_list(i))
            ent.extend(other.row_list(i))
        return Mat(self.field, self.rows, self.cols + other.cols, tuple(ent))

    def vstack(self, other: "Mat") -> "Mat":
        self._check(other)
        if self.cols != other.cols:
            raise ValueError("col mismatch in vstack")
        return Mat(self.field, self.rows + other.rows, self.cols,
                   self.entries + other.entries)

    def submatrix(self, row_idx, col_idx) -> "Mat":
        ent = tuple(self.get(i, j) for i in row_idx for j in col_idx)
        return Mat(self.field, len(row_idx), len(col_idx), ent)

    def __str__(self):
        return "[" + "; ".join(
            " ".join(str(x) for x in self.row_list(i)) for i in range(self.rows)
        ) + "]"


# ---------------------------------------------------------------------------
# Echelon forms, kernels, solving


def rref(m: Mat):
    """Reduced row-echelon form.  Returns (R, rank, pivot_cols)."""
    f = m.field
    rows = [m.row_list(i) for i in range(m.rows)]
    nr, nc = m.rows, m.cols
    pivots = []
    r = 0
    for c in range(nc):
        piv = None
        for i in range(r, nr):
            if rows[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = f.inv(rows[r][c])
        if inv != f.one():
            rows[r] = [f.mul(inv, x) for x in rows[r]]
        for i in range(nr):
            if i != r and rows[i][c] != 0:
                factor = rows[i][c]
                rows[i] = [f.sub(x, f.mul(factor, y)) for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return Mat.from_rows(f, rows) if nr else m, r, tuple(pivots)


def rank(m: Mat) -> int:
    return rref(m)[1]


def inverse(m: Mat) -> Mat:
    """Matrix inverse; raises ValueError on a singular input."""
    if m.rows != m.cols:
        raise ValueError("not square")
    n = m.rows
    aug = m.hstack(Mat.identity(m.field, n))
    red, _, pivots = rref(aug)
    if tuple(pivots[:n]) != tuple(range(n)):
        raise ValueError("singular matrix")
    return red.submatrix(range(n), range(n, 2 * n))


@dataclass(frozen=True)
class Subspace:
    """Subspace of field^ambient_dim; basis rows form a canonical RREF."""

    ambient_dim: int
    basis: Mat  # dim x ambient_dim, reduced row-echelon form

    @staticmethod
    def from_span(field: Field, ambient_dim: int, row_vectors) -> "Subspace":
        """Span of the given row vectors (lists or 1 x n / n x 1 Mats)."""
        rows = []
        for v in row_vectors:
            if isinstance(v, Mat):
                if v.rows == 1:
                    rows.append(v.row_list(0))
                elif v.cols == 1:
                    rows.append([v.get(i, 0) for i in range(v.rows)])
                else:
                    raise ValueError("span vectors must be vectors")
            else:
                rows.append(list(v))
        if not rows:
            return Subspace.zero(field, ambient_dim)
        m = Mat.from_rows(field, rows)
        if m.cols != ambient_dim:
            raise ValueError("ambient dimension mismatch")
        red, rk, _ = rref(m)
        return Subspace(ambient_dim, red.submatrix(range(rk), range(ambient_dim)))

    @staticmethod
    def from_matrix_rows(m: Mat) -> "Subspace":
        red, rk, _ = rref(m)
        return Subspace(m.cols, red.submatrix(range(rk), range(m.cols)))

    @staticmethod
    def zero(field: Field, ambient_dim: int) -> "Subspace":
        return Subspace(ambient_dim, Mat.zeros(field, 0, ambient_dim))

    @staticmethod
    def full(field: Field, ambient_dim: int) -> "Subspace":
        return Subspace(ambient_dim, Mat.identity(field, ambient_dim))

    @property
    def dim(self) -> int:
        return self.basis.rows

    @property
    def field(self) -> Field:
        return self.basis.field

    def is_full(self) -> bool:
        return self.dim == self.ambient_dim

    def contains_vector(self, v) -> bool:
        if isinstance(v, Mat):
            v = [v.get(i, 0) for i in range(v.rows)] if v.cols == 1 else v.row_list(0)
        stacked = self.basis.vstack(Mat.from_rows(self.field, [v]))
        return rank(stacked) == self.dim

    def contains(self, other: "Subspace") -> bool:
        if other.dim == 0:
            return True
        stacked = self.basis.vstack(other.basis)
        return rank(stacked) == self.dim

    def add(self, other: "Subspace") -> "Subspace":
        if self.ambient_dim != other.ambient_dim:
            raise ValueError("ambient mismatch")
        return Subspace.from_matrix_rows(self.basis.vstack(other.basis))

    def coordinates_of(self, v) -> Mat | None:
        """Coefficients of v in the basis rows, or None if v is outside."""
        if isinstance(v, Mat):
            col = v if v.cols == 1 else v.transpose()
        else:
            col = Mat.column(self.field, v)
        return solve_particular(self.basis.transpose(), col)


def kernel_basis(m: Mat) -> Subspace:
    """Kernel of m acting on column vectors, canonical RREF basis."""
    f = m.field
    red, rk, pivots = rref(m)
    free = [c for c in range(m.cols) if c not in pivots]
    rows = []
    for fc in free:
        v = [f.zero()] * m.cols
        v[fc] = f.one()
        for r, pc in enumerate(pivots):
            v[pc] = f.neg(red.get(r, fc))
        rows.append(v)
    if not rows:
        return Subspace.zero(f, m.cols)
    return Subspace.from_span(f, m.cols, rows)


def solve_particular(m: Mat, b: Mat) -> Mat | None:
    """A particular solution x of m x = b (free variables set to 0).

    b may have several columns; every column is solved against the same
    echelon form, so the output is deterministic in (m, b).  Returns None
    when some column of b is outside the image (a legal outcome).
    """
    if b.rows != m.rows:
        raise ValueError("incompatible right-hand side")
    f = m.field
    aug = m.hstack(b) if m.cols else b
    red, _, pivots = rref(aug)
    pivots_m = [c for c in pivots if c < m.cols]
    # any pivot in the b-part means inconsistency
    if any(c >= m.cols for c in pivots):
        return None
    out = []
    for j in range(b.cols):
        x = [f.zero()] * m.cols
        for r, pc in enumerate(pivots_m):
            x[pc] = red.get(r, m.cols + j)
        out.append(x)
    cols = Mat.from_rows(f, out)  # each row is a solution vector
    return cols.transpose()


def quotient_map(ambient_dim: int, sub: Subspace) -> Mat:
    """Canonical surjection P with kernel exactly `sub`.

    Coordinates of the quotient are the non-pivot coordinates of the
    complement: P v = (v - s)[non-pivots] where v = s + c, s in sub and c
    supported away from the pivot columns of the RREF basis.
    """
    if sub.ambient_dim != ambient_dim:
        raise ValueError("ambient dimension mismatch")
    f = sub.field
    B = sub.basis
    _, _, pivots = rref(B)
    piv = list(pivots)
    nonpiv = [c for c in range(ambient_dim) if c not in pivots]
    rows = []
    for qi, c in enumerate(nonpiv):
        row = [f.zero()] * ambient_dim
        row[c] = f.one()
        for r, pc in enumerate(piv):
            row[pc] = f.neg(B.get(r, c))
        rows.append(row)
    if not rows:
        return Mat.zeros(f, 0, ambient_dim)
    return Mat.from_rows(f, rows)


def quotient_section(ambient_dim: int, sub: Subspace) -> Mat:
    """Canonical section S of quotient_map: P S = I, im S a complement."""
    f = sub.field
    _, _, pivots = rref(sub.basis)
    nonpiv = [c for c in range(ambient_dim) if c not in pivots]
    S = Mat.zeros(f, ambient_dim, len(nonpiv)).to_lists()
    for qi, c in enumerate(nonpiv):
        S[c][qi] = f.one()
    return Mat.from_rows(f, S) if nonpiv else Mat.zeros(f, ambient_dim, 0)


# ---------------------------------------------------------------------------
# Subspace enumeration over finite fields


def gaussian_binomial(n: int, k: int, p: int) -> int:
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= p ** (n - i) - 1
        den *= p ** (i + 1) - 1
    return num // den


def enumerate_subspaces(field: Field, ambient_dim: int, dim: int,
                        ambient_budget: int = SUBSPACE_AMBIENT_BUDGET):
    """Every dim-dimensional subspace of field^ambient_dim exactly once.

    Canonical order: pivot-column sets in lexicographic order, then the free
    entries of the RREF matrix as an odometer (row-major positions, last
    position fastest, field elements in canonical order).
    """
    if not field.is_finite:
        raise BudgetExceeded("subspace enumeration needs a finite field")
    if ambient_dim > ambient_budget:
        raise BudgetExceeded(
            f"ambient dimension {ambient_dim} exceeds budget {ambient_budget}")
    if dim < 0 or dim > ambient_dim:
        return
    if dim == 0:
        yield Subspace.zero(field, ambient_dim)
        return
    elems = list(field.elements())
    for pivots in itertools.combinations(range(ambient_dim), dim):
        free_pos = [(r, c) for r in range(dim) for c in range(ambient_dim)
                    if c not in pivots and c > pivots[r]]
        base = [[field.zero()] * ambient_dim for _ in range(dim)]
        for r, pc in enumerate(pivots):
            base[r][pc] = field.one()
        for assignment in itertools.product(elems, repeat=len(free_pos)):
            rows = [row[:] for row in base]
            for (r, c), v in zip(free_pos, assignment):
                rows[r][c] = v
            yield Subspace(ambient_dim, Mat.from_rows(field, rows))


def all_subspaces(field: Field, ambient_dim: int,
                  ambient_budget: int = SUBSPACE_AMBIENT_BUDGET):
    """All subspaces, dimension ascending, canonical order inside each."""
    for k in range(ambient_dim + 1):
        yield from enumerate_subspaces(field, ambient_dim, k, ambient_budget)


# ---------------------------------------------------------------------------
# Randomness helpers (seeded by callers; used by property tests and the
# sampled stability modes)


def rand_scalar(field: Field, rng):
    if field.is_finite:
        return rng.randrange(field.p)
    return Fraction(rng.randint(-4, 4), rng.randint(1, 3))


def rand_mat(field: Field, rows: int, cols: int, rng) -> Mat:
    return Mat(field, rows, cols,
               tuple(field.canon(rand_scalar(field, rng)) for _ in range(rows * cols)))


def rand_invertible(field: Field, n: int, rng) -> Mat:
    if n == 0:
        return Mat.zeros(field, 0, 0)
    while True:
        m = rand_mat(field, n, n, rng)
        if rank(m) == n:
            return m


def rand_vector(field: Field, n: int, rng) -> Mat:
    return rand_mat(field, n, 1, rng)


# ---------------------------------------------------------------------------
# Layout bookkeeping for direct sums of tensor-product blocks


class Layout:
    """Index map for a direct sum of tensor blocks.

    blocks: ordered list of (key, dims) where dims is a tuple of factor
    dimensions; the flat index inside a block is mixed-radix with the last
    factor fastest, matching `kron`.
    """

    def __init__(self, blocks):
        self.keys = [k for k, _ in blocks]
        self.shapes = dict(blocks)
        if len(self.shapes) != len(self.keys):
            raise ValueError("duplicate block keys")
        self.offsets = {}
        off = 0
        for k, dims in blocks:
            self.offsets[k] = off
            sz = 1
            for d in dims:
                sz *= d
            off += sz
        self.dim = off

    def block_dim(self, key) -> int:
        sz = 1
        for d in self.shapes[key]:
            sz *= d
        return sz

    def pos(self, key, *idx) -> int:
        dims = self.shapes[key]
        if len(idx) != len(dims):
            raise ValueError("index arity mismatch")
        flat = 0
        for d, i in zip(dims, idx):
            if not 0 <= i < d:
                raise IndexError("index out of range")
            flat = flat * d + i
        return self.offsets[key] + flat

    def block_range(self, key):
        off = self.offsets[key]
        return range(off, off + self.block_dim(key))
