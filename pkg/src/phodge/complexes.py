"""Bounded cochain complexes of finite-dimensional vector spaces.

Complexes store per-degree dimensions and differentials; d∘d = 0 is checked
at construction.  Sign conventions are fixed once here:

* shift(c, k) has degree-n term c^{n+k} and differential (-1)^k d;
* cone(f: A -> B) has degree-n term B^n (+) A^{n+1} and differential
  [[d_B, f], [0, -d_A]], making B -> cone and cone -> A[1] sign-free;
* tensor uses the Koszul sign (-1)^i on the second factor's differential;
* the Hom complex differential is d(f) = d_target o f - (-1)^n f o d_source.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import ValidationError
from .linalg import Matrix, Subspace, hstack, kron, vstack

ZERO = Fraction(0)
ONE = Fraction(1)


class Complex:
    """A bounded complex; dims maps degree to a positive dimension."""

    __slots__ = ("dims", "d", "_cohomology")

    def __init__(self, dims: Dict[int, int], differentials: Dict[int, Matrix], *, check: bool = True):
        dims = {int(n): int(k) for n, k in dims.items() if k > 0}
        d = {}
        for n, m in differentials.items():
            n = int(n)
            if m.rows != dims.get(n + 1, 0) or m.cols != dims.get(n, 0):
                raise ValidationError(f"differential at degree {n} has shape {m.rows}x{m.cols}")
            if not m.is_zero():
                d[n] = m
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "_cohomology", {})
        if check:
            for n in list(d):
                if dims.get(n + 2, 0) and dims.get(n, 0):
                    if not (self.diff(n + 1) * self.diff(n)).is_zero():
                        raise ValidationError(f"d∘d != 0 between degrees {n} and {n + 2}")

    def __setattr__(self, *a):
        raise AttributeError("Complex is immutable")

    @staticmethod
    def zero() -> "Complex":
        return Complex({}, {})

    @staticmethod
    def single(degree: int, dim: int = 1) -> "Complex":
        return Complex({degree: dim}, {})

    @property
    def lo(self) -> int:
        return min(self.dims) if self.dims else 0

    @property
    def hi(self) -> int:
        return max(self.dims) if self.dims else 0

    def degrees(self):
        return sorted(self.dims)

    def dim(self, n: int) -> int:
        return self.dims.get(n, 0)

    def total_dim(self) -> int:
        return sum(self.dims.values())

    def diff(self, n: int) -> Matrix:
        m = self.d.get(n)
        if m is None:
            return Matrix.zeros(self.dim(n + 1), self.dim(n))
        return m

    def __eq__(self, other):
        return isinstance(other, Complex) and self.dims == other.dims and self.d == other.d

    def __hash__(self):
        return hash((tuple(sorted(self.dims.items())), tuple(sorted(self.d.items()))))

    def euler_characteristic(self) -> int:
        return sum((-1) ** n * k for n, k in self.dims.items())

    def cohomology(self, n: int) -> "Cohomology":
        if n not in self._cohomology:
            self._cohomology[n] = Cohomology(self, n)
        return self._cohomology[n]

    def cohomology_dims(self) -> Dict[int, int]:
        out = {}
        for n in range(self.lo, self.hi + 1) if self.dims else []:
            h = self.cohomology(n).dim
            if h:
                out[n] = h
        return out

    def is_acyclic(self) -> bool:
        return not self.cohomology_dims()

    def __repr__(self):
        return f"Complex({ {n: self.dims[n] for n in self.degrees()} })"


class Cohomology:
    """H^n of a complex: dimension, cocycle representatives, class projection."""

    __slots__ = ("complex", "degree", "dim", "representatives", "_cocycles", "_class_proj")

    def __init__(self, c: Complex, n: int):
        z = Subspace(c.dim(n), c.diff(n).kernel_basis())
        b_cols = c.diff(n - 1)
        b_in_z = []
        for j in range(b_cols.cols):
            col = b_cols.col_tuple(j)
            coords = z.coords_of(col)
            if coords is None:
                raise ValidationError("image of d is not contained in the kernel")
            b_in_z.append(coords)
        inner = Subspace.from_vectors(b_in_z, z.dim)
        proj, sect = inner.quotient()
        object.__setattr__(self, "complex", c)
        object.__setattr__(self, "degree", n)
        object.__setattr__(self, "dim", proj.rows)
        object.__setattr__(self, "representatives", z.basis * sect)
        object.__setattr__(self, "_cocycles", z)
        object.__setattr__(self, "_class_proj", proj)

    def __setattr__(self, *a):
        raise AttributeError("Cohomology is immutable")

    @property
    def cocycles(self) -> Subspace:
        return self._cocycles

    def project(self, vec: Sequence) -> Tuple:
        """Class coordinates of a cocycle; kills exactly the coboundaries."""
        coords = self._cocycles.coords_of(vec)
        if coords is None:
            raise ValidationError("vector is not a cocycle")
        return self._class_proj.apply(coords)

    def class_matrix(self, vectors: Matrix) -> Matrix:
        coords = self._cocycles.basis.solve_matrix(vectors)
        if coords is None:
            raise ValidationError("some column is not a cocycle")
        return self._class_proj * coords


class ChainMap:
    """A degreewise map commuting with the differentials."""

    __slots__ = ("source", "target", "components")

    def __init__(self, source: Complex, target: Complex, components: Dict[int, Matrix], *, check: bool = True):
        comps = {}
        for n, m in components.items():
            n = int(n)
            if m.rows != target.dim(n) or m.cols != source.dim(n):
                raise ValidationError(f"chain map component at degree {n} has wrong shape")
            if not m.is_zero():
                comps[n] = m
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "components", comps)
        if check:
            for n in set(source.dims) | set(comps):
                lhs = target.diff(n) * self.component(n)
                rhs = self.component(n + 1) * source.diff(n)
                if lhs != rhs:
                    raise ValidationError(f"chain map does not commute with d at degree {n}")

    def __setattr__(self, *a):
        raise AttributeError("ChainMap is immutable")

    @staticmethod
    def identity(c: Complex) -> "ChainMap":
        return ChainMap(c, c, {n: Matrix.identity(c.dim(n)) for n in c.dims}, check=False)

    @staticmethod
    def zero(source: Complex, target: Complex) -> "ChainMap":
        return ChainMap(source, target, {}, check=False)

    def component(self, n: int) -> Matrix:
        m = self.components.get(n)
        if m is None:
            return Matrix.zeros(self.target.dim(n), self.source.dim(n))
        return m

    def compose(self, first: "ChainMap") -> "ChainMap":
        """self ∘ first."""
        if first.target.dims != self.source.dims:
            raise ValidationError("chain map composition shape mismatch")
        comps = {n: self.component(n) * first.component(n) for n in first.source.dims}
        return ChainMap(first.source, self.target, comps, check=False)

    def __add__(self, other: "ChainMap") -> "ChainMap":
        comps = {n: self.component(n) + other.component(n) for n in set(self.source.dims)}
        return ChainMap(self.source, self.target, comps, check=False)

    def __sub__(self, other: "ChainMap") -> "ChainMap":
        comps = {n: self.component(n) - other.component(n) for n in set(self.source.dims)}
        return ChainMap(self.source, self.target, comps, check=False)

    def scale(self, s) -> "ChainMap":
        return ChainMap(self.source, self.target, {n: m.scale(s) for n, m in self.components.items()}, check=False)

    def induced_on_cohomology(self, n: int) -> Matrix:
        src = self.source.cohomology(n)
        tgt = self.target.cohomology(n)
        return tgt.class_matrix(self.component(n) * src.representatives)

    def is_quasi_iso(self, *, via: str = "both") -> bool:
        """Quasi-isomorphism test; 'cone', 'degreewise', or 'both' (cross-check)."""
        by_cone = None
        by_deg = None
        if via in ("cone", "both"):
            by_cone = cone(self)[0].is_acyclic()
        if via in ("degreewise", "both"):
            by_deg = True
            degs = set(self.source.dims) | set(self.target.dims)
            for n in degs:
                hs = self.source.cohomology(n)
                ht = self.target.cohomology(n)
                if hs.dim != ht.dim:
                    by_deg = False
                    break
                if hs.dim and self.induced_on_cohomology(n).rank != hs.dim:
                    by_deg = False
                    break
        if via == "cone":
            return bool(by_cone)
        if via == "degreewise":
            return bool(by_deg)
        if by_cone != by_deg:
            raise ValidationError("quasi-isomorphism routes disagree")
        return bool(by_cone)


def shift(c: Complex, k: int) -> Complex:
    dims = {n - k: dim for n, dim in c.dims.items()}
    sign = ONE if k % 2 == 0 else -ONE
    d = {n - k: m.scale(sign) for n, m in c.d.items()}
    return Complex(dims, d, check=False)


def shift_map(f: ChainMap, k: int) -> ChainMap:
    return ChainMap(
        shift(f.source, k), shift(f.target, k), {n - k: m for n, m in f.components.items()}, check=False
    )


def cone(f: ChainMap) -> Tuple[Complex, ChainMap, ChainMap]:
    """Mapping cone with its triangle maps target -> cone -> source[1]."""
    a, b = f.source, f.target
    dims = {}
    for n in set(b.dims) | {n - 1 for n in a.dims}:
        k = b.dim(n) + a.dim(n + 1)
        if k:
            dims[n] = k
    d = {}
    for n in dims:
        if dims.get(n + 1, 0):
            top = hstack([b.diff(n), f.component(n + 1)])
            bot = hstack([Matrix.zeros(a.dim(n + 2), b.dim(n)), -a.diff(n + 1)])
            d[n] = vstack([top, bot])
    c = Complex(dims, d, check=False)
    incl = ChainMap(
        b,
        c,
        {n: vstack([Matrix.identity(b.dim(n)), Matrix.zeros(a.dim(n + 1), b.dim(n))]) for n in b.dims},
        check=False,
    )
    sa = shift(a, 1)
    proj = ChainMap(
        c,
        sa,
        {n: hstack([Matrix.zeros(a.dim(n + 1), b.dim(n)), Matrix.identity(a.dim(n + 1))]) for n in dims if a.dim(n + 1)},
        check=False,
    )
    return c, incl, proj


@dataclass(frozen=True)
class SumLayout:
    """Offsets of the summands inside a direct sum, per degree."""

    offsets: Tuple[Dict[int, int], ...]

    def offset(self, index: int, degree: int) -> int:
        return self.offsets[index].get(degree, 0)


def direct_sum(parts: Sequence[Complex]) -> Tuple[Complex, SumLayout]:
    dims: Dict[int, int] = {}
    offsets = []
    for p in parts:
        off = {}
        for n, k in p.dims.items():
            off[n] = dims.get(n, 0)
            dims[n] = dims.get(n, 0) + k
        offsets.append(off)
    d = {}
    for n in dims:
        if dims.get(n + 1, 0):
            blocks = []
            for p in parts:
                blocks.append(p.diff(n))
            d[n] = _block_diag(blocks, dims.get(n + 1, 0), dims.get(n, 0), parts, n)
    total = Complex(dims, d, check=False)
    return total, SumLayout(tuple(offsets))


def _block_diag(blocks, rows, cols, parts, n):
    out = [[ZERO] * cols for _ in range(rows)]
    r0 = 0
    c0 = 0
    for p, b in zip(parts, blocks):
        for i in range(b.rows):
            for j in range(b.cols):
                out[r0 + i][c0 + j] = b.entries[i][j]
        r0 += p.dim(n + 1)
        c0 += p.dim(n)
    return Matrix(rows, cols, out)


def sum_inclusion(parts: Sequence[Complex], total: Complex, layout: SumLayout, index: int) -> ChainMap:
    p = parts[index]
    comps = {}
    for n, k in p.dims.items():
        off = layout.offset(index, n)
        m = [[ONE if (i - off) == j and 0 <= i - off < k else ZERO for j in range(k)] for i in range(total.dim(n))]
        comps[n] = Matrix(total.dim(n), k, m)
    return ChainMap(p, total, comps, check=False)


def sum_projection(parts: Sequence[Complex], total: Complex, layout: SumLayout, index: int) -> ChainMap:
    p = parts[index]
    comps = {}
    for n, k in p.dims.items():
        off = layout.offset(index, n)
        m = [[ONE if (j - off) == i and 0 <= j - off < k else ZERO for j in range(total.dim(n))] for i in range(k)]
        comps[n] = Matrix(k, total.dim(n), m)
    return ChainMap(total, p, comps, check=False)


class TensorComplex:
    """Tensor product with block bookkeeping: degree n = (+)_{i+j=n} a^i (x) b^j."""

    __slots__ = ("a", "b", "complex", "blocks")

    def __init__(self, a: Complex, b: Complex):
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        blocks: Dict[int, List[Tuple[int, int, int]]] = {}
        dims: Dict[int, int] = {}
        for n in range(a.lo + b.lo, a.hi + b.hi + 1) if a.dims and b.dims else []:
            off = 0
            entry = []
            for i in sorted(a.dims):
                j = n - i
                if b.dim(j):
                    entry.append((i, j, off))
                    off += a.dim(i) * b.dim(j)
            if entry:
                blocks[n] = entry
                dims[n] = off
        d = {}
        for n in dims:
            if dims.get(n + 1, 0):
                rows = dims[n + 1]
                out = [[ZERO] * dims[n] for _ in range(rows)]
                tgt_off = {(i, j): o for i, j, o in blocks[n + 1]}
                for i, j, off in blocks[n]:
                    # d_a (x) 1 into block (i+1, j)
                    if (i + 1, j) in tgt_off and a.dim(i + 1):
                        m = kron(a.diff(i), Matrix.identity(b.dim(j)))
                        _paste(out, m, tgt_off[(i + 1, j)], off)
                    # (-1)^i  1 (x) d_b into block (i, j+1)
                    if (i, j + 1) in tgt_off and b.dim(j + 1):
                        sign = ONE if i % 2 == 0 else -ONE
                        m = kron(Matrix.identity(a.dim(i)), b.diff(j)).scale(sign)
                        _paste(out, m, tgt_off[(i, j + 1)], off)
                d[n] = Matrix(rows, dims[n], out)
        object.__setattr__(self, "complex", Complex(dims, d, check=False))
        object.__setattr__(self, "blocks", blocks)

    def __setattr__(self, *a):
        raise AttributeError("TensorComplex is immutable")

    def block_offset(self, n: int, i: int) -> Optional[Tuple[int, int]]:
        for bi, bj, off in self.blocks.get(n, []):
            if bi == i:
                return off, self.a.dim(bi) * self.b.dim(bj)
        return None

    def pure_tensor(self, i: int, x: Sequence, j: int, y: Sequence) -> Tuple:
        """Coordinates of x (x) y placed in degree i + j."""
        n = i + j
        vec = [ZERO] * self.complex.dim(n)
        found = self.block_offset(n, i)
        if found is None:
            raise ValidationError("tensor block absent")
        off, size = found
        kv = [xx * yy for xx in x for yy in y]
        if len(kv) != size:
            raise ValidationError("pure tensor size mismatch")
        for t, v in enumerate(kv):
            vec[off + t] = v
        return tuple(vec)


def _paste(out, m: Matrix, r0: int, c0: int):
    for i in range(m.rows):
        row = m.entries[i]
        for j in range(m.cols):
            if row[j] != 0:
                out[r0 + i][c0 + j] = row[j]


def tensor(a: Complex, b: Complex) -> TensorComplex:
    return TensorComplex(a, b)


def tensor_map(f: ChainMap, g: ChainMap) -> ChainMap:
    """f (x) g for degree-0 chain maps, blockwise Kronecker."""
    src = TensorComplex(f.source, g.source)
    tgt = TensorComplex(f.target, g.target)
    comps = {}
    for n, blks in src.blocks.items():
        rows = tgt.complex.dim(n)
        out = [[ZERO] * src.complex.dim(n) for _ in range(rows)]
        tgt_off = {(i, j): o for i, j, o in tgt.blocks.get(n, [])}
        for i, j, off in blks:
            if (i, j) in tgt_off:
                m = kron(f.component(i), g.component(j))
                _paste(out, m, tgt_off[(i, j)], off)
        comps[n] = Matrix(rows, src.complex.dim(n), out)
    return ChainMap(src.complex, tgt.complex, comps, check=False)


class HomComplex:
    """Hom^n = (+)_q Hom(a^q, b^{q+n}) with d(f) = d_b∘f - (-1)^n f∘d_a.

    Elements are stored row-major per slot; slots(n) lists (q, rows, cols,
    offset) in ascending q.
    """

    __slots__ = ("source", "target", "complex", "_slots")

    def __init__(self, a: Complex, b: Complex):
        object.__setattr__(self, "source", a)
        object.__setattr__(self, "target", b)
        slots: Dict[int, List[Tuple[int, int, int, int]]] = {}
        dims: Dict[int, int] = {}
        if a.dims and b.dims:
            for n in range(b.lo - a.hi, b.hi - a.lo + 1):
                off = 0
                entry = []
                for q in sorted(a.dims):
                    if b.dim(q + n):
                        entry.append((q, b.dim(q + n), a.dim(q), off))
                        off += b.dim(q + n) * a.dim(q)
                if entry:
                    slots[n] = entry
                    dims[n] = off
        d = {}
        for n in dims:
            if dims.get(n + 1, 0):
                rows = dims[n + 1]
                out = [[ZERO] * dims[n] for _ in range(rows)]
                tgt_off = {q: (r, c, o) for q, r, c, o in slots[n + 1]}
                sign = ONE if n % 2 == 0 else -ONE
                for q, r, c, off in slots[n]:
                    # d_b ∘ f : slot q -> slot q
                    if q in tgt_off and b.dim(q + n + 1):
                        m = kron(b.diff(q + n), Matrix.identity(a.dim(q)))
                        _paste(out, m, tgt_off[q][2], off)
                    # -(-1)^n f ∘ d_a : slot q -> slot q-1
                    if (q - 1) in tgt_off and a.dim(q - 1):
                        m = kron(Matrix.identity(b.dim(q + n)), a.diff(q - 1).transpose()).scale(-sign)
                        _paste(out, m, tgt_off[q - 1][2], off)
                d[n] = Matrix(rows, dims[n], out)
        object.__setattr__(self, "complex", Complex(dims, d, check=False))
        object.__setattr__(self, "_slots", slots)

    def __setattr__(self, *a):
        raise AttributeError("HomComplex is immutable")

    def slots(self, n: int):
        return self._slots.get(n, [])

    def pack(self, n: int, components: Dict[int, Matrix]) -> Tuple:
        vec = [ZERO] * self.complex.dim(n)
        for q, r, c, off in self.slots(n):
            m = components.get(q)
            if m is None:
                continue
            if m.rows != r or m.cols != c:
                raise ValidationError("hom element component shape mismatch")
            t = 0
            for i in range(r):
                for j in range(c):
                    vec[off + t] = m.entries[i][j]
                    t += 1
        return tuple(vec)

    def unpack(self, n: int, vec: Sequence) -> Dict[int, Matrix]:
        out = {}
        for q, r, c, off in self.slots(n):
            rows = [[vec[off + i * c + j] for j in range(c)] for i in range(r)]
            out[q] = Matrix(r, c, rows)
        return out

    def post_compose(self, g: ChainMap, other: "HomComplex") -> ChainMap:
        """Hom(a, b) -> Hom(a, b') induced by g: b -> b' (other = Hom(a, b'))."""
        if g.source != self.target:
            raise ValidationError("post_compose: map does not start at the target")
        comps = {}
        for n in self._slots:
            rows = other.complex.dim(n)
            out = [[ZERO] * self.complex.dim(n) for _ in range(rows)]
            tgt_off = {q: (r, c, o) for q, r, c, o in other.slots(n)}
            for q, r, c, off in self.slots(n):
                if q in tgt_off:
                    m = kron(g.component(q + n), Matrix.identity(c))
                    _paste(out, m, tgt_off[q][2], off)
            comps[n] = Matrix(rows, self.complex.dim(n), out)
        return ChainMap(self.complex, other.complex, comps, check=False)

    def pre_compose(self, h: ChainMap, other: "HomComplex") -> ChainMap:
        """Hom(a, b) -> Hom(a', b) induced by h: a' -> a (other = Hom(a', b))."""
        comps = {}
        for n in set(self._slots) | set(other._slots):
            rows = other.complex.dim(n)
            out = [[ZERO] * self.complex.dim(n) for _ in range(rows)]
            src_off = {q: (r, c, o) for q, r, c, o in self.slots(n)}
            for q, r, c, off in other.slots(n):
                if q in src_off:
                    m = kron(Matrix.identity(r), h.component(q).transpose())
                    _paste(out, m, off, src_off[q][2])
            comps[n] = Matrix(rows, self.complex.dim(n), out)
        return ChainMap(self.complex, other.complex, comps, check=False)


def hom_complex(a: Complex, b: Complex) -> HomComplex:
    return HomComplex(a, b)


def is_quasi_iso(f: ChainMap) -> bool:
    return f.is_quasi_iso(via="both")
