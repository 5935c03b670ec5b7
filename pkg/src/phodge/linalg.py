"""Exact linear algebra: matrices, subspaces, kernels, images, quotients.

Every entry is a Fraction (or an extension scalar with the same operator
surface); there is no floating point anywhere.  Row reduction keeps rows in
content-reduced integer form between elimination steps to control coefficient
growth, and pivoting is deterministic (first nonzero), so all derived bases
are reproducible byte for byte.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import List, Optional, Sequence, Tuple

from .errors import ValidationError

ZERO = Fraction(0)
ONE = Fraction(1)


def _normalize_row(row):
    """Scale a rational row to primitive integer form with positive lead."""
    if not row:
        return row
    if not all(isinstance(x, Fraction) for x in row):
        return row
    den = 1
    for x in row:
        den = den * x.denominator // gcd(den, x.denominator)
    num = 0
    for x in row:
        num = gcd(num, x.numerator * (den // x.denominator))
    if num == 0:
        return [ZERO] * len(row)
    scale = Fraction(den, num)
    out = [x * scale for x in row]
    for x in out:
        if x != 0:
            if x < 0:
                out = [-y for y in out]
            break
    return out


class Matrix:
    """Immutable dense matrix with exact entries."""

    __slots__ = ("rows", "cols", "entries", "_rref")

    def __init__(self, rows: int, cols: int, entries):
        entries = tuple(
            tuple(Fraction(x) if isinstance(x, int) else x for x in r) for r in entries
        )
        if len(entries) != rows or any(len(r) != cols for r in entries):
            raise ValidationError(f"matrix shape mismatch: {rows}x{cols}")
        for r in entries:
            for x in r:
                if isinstance(x, float):
                    raise ValidationError("floating point entry rejected; arithmetic is exact")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "_rref", None)

    def __setattr__(self, *a):
        raise AttributeError("Matrix is immutable")

    @staticmethod
    def from_rows(rows: Sequence[Sequence], cols: Optional[int] = None) -> "Matrix":
        rows = [[Fraction(x) if isinstance(x, (int, str)) else x for x in r] for r in rows]
        if rows:
            cols = len(rows[0])
        elif cols is None:
            cols = 0
        return Matrix(len(rows), cols, rows)

    @staticmethod
    def zeros(rows: int, cols: int) -> "Matrix":
        return Matrix(rows, cols, [[ZERO] * cols for _ in range(rows)])

    @staticmethod
    def identity(n: int) -> "Matrix":
        return Matrix(n, n, [[ONE if i == j else ZERO for j in range(n)] for i in range(n)])

    @staticmethod
    def diagonal(values) -> "Matrix":
        values = list(values)
        n = len(values)
        return Matrix(n, n, [[values[i] if i == j else ZERO for j in range(n)] for i in range(n)])

    @staticmethod
    def column(vec) -> "Matrix":
        vec = list(vec)
        return Matrix(len(vec), 1, [[v] for v in vec])

    def row_tuple(self, i: int):
        return self.entries[i]

    def col_tuple(self, j: int):
        return tuple(self.entries[i][j] for i in range(self.rows))

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __add__(self, other: "Matrix") -> "Matrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValidationError("matrix addition shape mismatch")
        return Matrix(
            self.rows,
            self.cols,
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)],
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def __neg__(self) -> "Matrix":
        return Matrix(self.rows, self.cols, [[-a for a in r] for r in self.entries])

    def scale(self, s) -> "Matrix":
        return Matrix(self.rows, self.cols, [[a * s for a in r] for r in self.entries])

    def __mul__(self, other: "Matrix") -> "Matrix":
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ValidationError(f"matrix product shape mismatch {self.rows}x{self.cols} * {other.rows}x{other.cols}")
        cols = other.cols
        out = [[ZERO] * cols for _ in range(self.rows)]
        oent = other.entries
        for i in range(self.rows):
            row = self.entries[i]
            acc = out[i]
            for k in range(self.cols):
                x = row[k]
                if x == 0:
                    continue
                orow = oent[k]
                for j in range(cols):
                    y = orow[j]
                    if y != 0:
                        acc[j] = acc[j] + x * y
        return Matrix(self.rows, cols, out)

    def apply(self, vec: Sequence) -> Tuple:
        vec = list(vec)
        if len(vec) != self.cols:
            raise ValidationError("vector length mismatch")
        return tuple(sum((r[k] * vec[k] for k in range(self.cols)), ZERO) for r in self.entries)

    def transpose(self) -> "Matrix":
        return Matrix(self.cols, self.rows, [self.col_tuple(j) for j in range(self.cols)])

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.entries for x in r)

    def rref(self):
        """Reduced row echelon form with the pivot column list."""
        if self._rref is not None:
            return self._rref
        work = [list(r) for r in self.entries]
        m, n = self.rows, self.cols
        pivots: List[int] = []
        r = 0
        for c in range(n):
            pr = None
            for i in range(r, m):
                if work[i][c] != 0:
                    pr = i
                    break
            if pr is None:
                continue
            work[r], work[pr] = work[pr], work[r]
            pv = work[r][c]
            work[r] = _normalize_row([x / pv for x in work[r]])
            pv = work[r][c]
            for i in range(m):
                if i != r and work[i][c] != 0:
                    f = work[i][c] / pv
                    work[i] = _normalize_row([a - f * b for a, b in zip(work[i], work[r])])
            pivots.append(c)
            r += 1
            if r == m:
                break
        # canonical form: unit pivots
        for k, c in enumerate(pivots):
            pv = work[k][c]
            if pv != 1:
                work[k] = [x / pv for x in work[k]]
        result = (Matrix(m, n, work), tuple(pivots))
        object.__setattr__(self, "_rref", result)
        return result

    @property
    def rank(self) -> int:
        return len(self.rref()[1])

    def kernel_basis(self) -> "Matrix":
        """Columns form a canonical basis of the kernel."""
        red, pivots = self.rref()
        free = [c for c in range(self.cols) if c not in pivots]
        cols = []
        for f in free:
            v = [ZERO] * self.cols
            v[f] = ONE
            for k, c in enumerate(pivots):
                v[c] = -red.entries[k][f]
            cols.append(v)
        return Matrix(self.cols, len(cols), list(map(list, zip(*cols))) if cols else [[] for _ in range(self.cols)])

    def image_basis(self) -> "Matrix":
        """Columns form a canonical basis of the column space."""
        return Subspace.from_matrix(self).basis

    def solve(self, vec: Sequence) -> Optional[Tuple]:
        """One exact solution of self * x = vec, or None if vec is not in the image."""
        vec = list(vec)
        if len(vec) != self.rows:
            raise ValidationError("solve: right-hand side length mismatch")
        aug = Matrix(self.rows, self.cols + 1, [list(r) + [v] for r, v in zip(self.entries, vec)])
        red, pivots = aug.rref()
        if self.cols in pivots:
            return None
        x = [ZERO] * self.cols
        for k, c in enumerate(pivots):
            x[c] = red.entries[k][self.cols]
        return tuple(x)

    def solve_matrix(self, other: "Matrix") -> Optional["Matrix"]:
        """X with self * X = other, or None; one elimination for all columns."""
        if other.rows != self.rows:
            raise ValidationError("solve_matrix: row mismatch")
        if other.cols == 0:
            return Matrix(self.cols, 0, [[] for _ in range(self.cols)])
        aug = hstack([self, other])
        red, pivots = aug.rref()
        if any(p >= self.cols for p in pivots):
            return None
        out = [[ZERO] * other.cols for _ in range(self.cols)]
        for k, c in enumerate(pivots):
            row = red.entries[k]
            for j in range(other.cols):
                out[c][j] = row[self.cols + j]
        return Matrix(self.cols, other.cols, out)

    def inverse(self) -> "Matrix":
        if self.rows != self.cols:
            raise ValidationError("inverse of a non-square matrix")
        inv = self.solve_matrix(Matrix.identity(self.rows))
        if inv is None or self.rank != self.rows:
            raise ValidationError("matrix is singular")
        return inv

    def char_poly(self) -> Tuple:
        """Characteristic polynomial coefficients, low degree first, monic."""
        if self.rows != self.cols:
            raise ValidationError("char_poly of a non-square matrix")
        n = self.rows
        power = Matrix.identity(n)
        traces = []
        for _ in range(n):
            power = power * self
            traces.append(sum((power.entries[i][i] for i in range(n)), ZERO))
        # Newton's identities
        e = [ONE]
        for k in range(1, n + 1):
            acc = ZERO
            for i in range(1, k + 1):
                acc += (-1) ** (i - 1) * e[k - i] * traces[i - 1]
            e.append(acc / k)
        return tuple((-1) ** (n - k) * e[n - k] for k in range(n + 1))

    def rational_eigenvalues(self) -> Tuple:
        """Exact rational roots of the characteristic polynomial with multiplicity."""
        coeffs = list(self.char_poly())
        roots: List[Fraction] = []
        while len(coeffs) > 1:
            if coeffs[0] == 0:
                roots.append(Fraction(0))
                coeffs = _poly_deflate(coeffs, ZERO)
                continue
            den = 1
            for c in coeffs:
                den = den * c.denominator // gcd(den, c.denominator)
            ints = [int(c * den) for c in coeffs]
            found = None
            for pnum in _divisors(abs(ints[0])):
                for pden in _divisors(abs(ints[-1])):
                    for sign in (1, -1):
                        cand = Fraction(sign * pnum, pden)
                        if _poly_eval(coeffs, cand) == 0:
                            found = cand
                            break
                    if found is not None:
                        break
                if found is not None:
                    break
            if found is None:
                break
            roots.append(found)
            coeffs = _poly_deflate(coeffs, found)
        return tuple(sorted(roots))

    def __repr__(self):
        body = "; ".join(" ".join(str(x) for x in r) for r in self.entries)
        return f"Matrix({self.rows}x{self.cols}: {body})"


def _divisors(n: int):
    if n == 0:
        return [1]
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            out.append(n // d)
        d += 1
    return sorted(set(out))


def _poly_eval(coeffs, x):
    acc = ZERO
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _poly_deflate(coeffs, root):
    # synthetic division by (t - root), low-first coefficients
    out = [ZERO] * (len(coeffs) - 1)
    carry = ZERO
    for i in range(len(coeffs) - 1, 0, -1):
        carry = coeffs[i] + carry * root
        out[i - 1] = carry
    return out


def hstack(mats: Sequence[Matrix]) -> Matrix:
    mats = list(mats)
    rows = mats[0].rows
    if any(m.rows != rows for m in mats):
        raise ValidationError("hstack row mismatch")
    return Matrix(rows, sum(m.cols for m in mats), [sum((list(m.entries[i]) for m in mats), []) for i in range(rows)])


def vstack(mats: Sequence[Matrix]) -> Matrix:
    mats = list(mats)
    cols = mats[0].cols
    if any(m.cols != cols for m in mats):
        raise ValidationError("vstack column mismatch")
    return Matrix(sum(m.rows for m in mats), cols, [list(r) for m in mats for r in m.entries])


def block_matrix(blocks: Sequence[Sequence[Matrix]]) -> Matrix:
    return vstack([hstack(row) for row in blocks])


def kron(a: Matrix, b: Matrix) -> Matrix:
    """Kronecker product; consistent with row-major flattening of maps."""
    rows = a.rows * b.rows
    cols = a.cols * b.cols
    out = [[ZERO] * cols for _ in range(rows)]
    for i in range(a.rows):
        for j in range(a.cols):
            x = a.entries[i][j]
            if x == 0:
                continue
            for k in range(b.rows):
                for l in range(b.cols):
                    out[i * b.rows + k][j * b.cols + l] = x * b.entries[k][l]
    return Matrix(rows, cols, out)


def kron_vec(u: Sequence, v: Sequence) -> Tuple:
    u, v = list(u), list(v)
    return tuple(x * y for x in u for y in v)


class Subspace:
    """A subspace of K^n given by a canonical (column-reduced) basis matrix."""

    __slots__ = ("ambient_dim", "basis")

    def __init__(self, ambient_dim: int, basis: Matrix, *, canonical: bool = False):
        if basis.rows != ambient_dim:
            raise ValidationError("subspace basis has wrong ambient dimension")
        if not canonical:
            red, pivots = basis.transpose().rref()
            rows = [red.entries[k] for k in range(len(pivots))]
            basis = Matrix(len(pivots), ambient_dim, rows).transpose()
        object.__setattr__(self, "ambient_dim", ambient_dim)
        object.__setattr__(self, "basis", basis)

    def __setattr__(self, *a):
        raise AttributeError("Subspace is immutable")

    @staticmethod
    def from_matrix(columns: Matrix) -> "Subspace":
        return Subspace(columns.rows, columns)

    @staticmethod
    def from_vectors(vectors: Sequence[Sequence], ambient_dim: int) -> "Subspace":
        cols = [list(v) for v in vectors]
        m = Matrix(ambient_dim, len(cols), list(map(list, zip(*cols))) if cols else [[] for _ in range(ambient_dim)])
        return Subspace(ambient_dim, m)

    @staticmethod
    def zero(ambient_dim: int) -> "Subspace":
        return Subspace(ambient_dim, Matrix.zeros(ambient_dim, 0), canonical=True)

    @staticmethod
    def full(ambient_dim: int) -> "Subspace":
        return Subspace(ambient_dim, Matrix.identity(ambient_dim), canonical=True)

    @property
    def dim(self) -> int:
        return self.basis.cols

    def __eq__(self, other):
        return (
            isinstance(other, Subspace)
            and self.ambient_dim == other.ambient_dim
            and self.dim == other.dim
            and self.contains_subspace(other)
        )

    def __hash__(self):
        return hash((self.ambient_dim, self.dim))

    def coords_of(self, vec: Sequence) -> Optional[Tuple]:
        return self.basis.solve(vec)

    def contains(self, vec: Sequence) -> bool:
        return self.basis.solve(vec) is not None

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(other.basis.col_tuple(j)) for j in range(other.dim))

    def sum(self, other: "Subspace") -> "Subspace":
        if self.ambient_dim != other.ambient_dim:
            raise ValidationError("subspace sum: ambient dimension mismatch")
        return Subspace(self.ambient_dim, hstack([self.basis, other.basis]))

    def intersect(self, other: "Subspace") -> "Subspace":
        if self.ambient_dim != other.ambient_dim:
            raise ValidationError("subspace intersection: ambient dimension mismatch")
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.ambient_dim)
        stacked = hstack([self.basis, -other.basis])
        ker = stacked.kernel_basis()
        cols = []
        for j in range(ker.cols):
            x = [ker.entries[i][j] for i in range(self.dim)]
            cols.append(self.basis.apply(x))
        return Subspace.from_vectors(cols, self.ambient_dim)

    def quotient(self) -> Tuple[Matrix, Matrix]:
        """(projection, section) for K^n -> K^n / self.

        projection is (n-k) x n with kernel exactly self; section is a right
        inverse picking complementary standard basis vectors.
        """
        red, pivots = self.basis.transpose().rref()
        pivot_rows = set(pivots)
        complement = [i for i in range(self.ambient_dim) if i not in pivot_rows]
        ext = hstack([self.basis] + [Matrix.column([ONE if i == e else ZERO for i in range(self.ambient_dim)]) for e in complement]) if complement else self.basis
        if ext.cols != self.ambient_dim:
            raise ValidationError("quotient: basis does not extend to the ambient space")
        inv = ext.inverse()
        proj = Matrix(len(complement), self.ambient_dim, [inv.entries[self.dim + t] for t in range(len(complement))])
        sect = Matrix(
            self.ambient_dim,
            len(complement),
            [[ONE if i == complement[t] else ZERO for t in range(len(complement))] for i in range(self.ambient_dim)],
        )
        return proj, sect

    def quotient_by(self, sub: "Subspace") -> Tuple[Matrix, Matrix, Matrix]:
        """Quotient self / sub for sub <= self.

        Returns (proj, sect, lift): proj maps self-coordinates onto quotient
        coordinates, sect is a right inverse, lift = basis * sect gives
        ambient representatives of the quotient basis.
        """
        coords = []
        for j in range(sub.dim):
            x = self.coords_of(sub.basis.col_tuple(j))
            if x is None:
                raise ValidationError("quotient_by: not a subspace")
            coords.append(x)
        inner = Subspace.from_vectors(coords, self.dim)
        proj, sect = inner.quotient()
        return proj, sect, self.basis * sect

    def __repr__(self):
        return f"Subspace(dim {self.dim} of K^{self.ambient_dim})"


def rank_decomposition(m: Matrix) -> Tuple[Subspace, Subspace, Tuple[int, ...]]:
    """Kernel and image of a matrix, with the pivot columns."""
    _, pivots = m.rref()
    kernel = Subspace(m.cols, m.kernel_basis())
    image = Subspace.from_vectors([m.col_tuple(c) for c in pivots], m.rows)
    return kernel, image, pivots


def solve(m: Matrix, vec: Sequence) -> Optional[Tuple]:
    return m.solve(vec)


def restrict_map(f: Matrix, source_basis: Matrix, target_basis: Matrix) -> Matrix:
    """Matrix of f between subspaces in the given basis coordinates.

    Requires f(source) <= target; raises otherwise.
    """
    img = f * source_basis
    sol = target_basis.solve_matrix(img)
    if sol is None:
        raise ValidationError("restrict_map: image leaves the target subspace")
    return sol
