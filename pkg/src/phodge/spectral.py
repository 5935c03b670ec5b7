"""Double complexes, total complexes, and filtration spectral sequences.

Pages are computed from the standard subspace formulas: with Z_r the part of
the filtration level whose differential falls r levels deeper, the page entry
is Z_r modulo (the next level's Z_{r-1} plus d of Z_{r-1} from above), and the
page differential is lift-transfer-project.  Everything is exact arithmetic,
so E_{r+1} is recomputed from the formulas and checked against the homology
of (E_r, d_r) rather than assumed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .complexes import ChainMap, Complex
from .errors import ValidationError
from .filtered import FilteredComplex
from .linalg import Matrix, Subspace

ZERO = Fraction(0)
ONE = Fraction(1)


class DoubleComplex:
    """Bigraded spaces with anticommuting horizontal and vertical differentials."""

    __slots__ = ("spaces", "dh", "dv")

    def __init__(self, spaces: Dict[Tuple[int, int], int], dh: Dict[Tuple[int, int], Matrix], dv: Dict[Tuple[int, int], Matrix], *, check: bool = True):
        spaces = {(int(p), int(q)): int(k) for (p, q), k in spaces.items() if k > 0}
        dh = {k: m for k, m in dh.items() if not m.is_zero()}
        dv = {k: m for k, m in dv.items() if not m.is_zero()}
        object.__setattr__(self, "spaces", spaces)
        object.__setattr__(self, "dh", dh)
        object.__setattr__(self, "dv", dv)
        if check:
            for (p, q), m in dh.items():
                if m.rows != self.dim(p + 1, q) or m.cols != self.dim(p, q):
                    raise ValidationError(f"horizontal differential at {(p, q)} has the wrong shape")
            for (p, q), m in dv.items():
                if m.rows != self.dim(p, q + 1) or m.cols != self.dim(p, q):
                    raise ValidationError(f"vertical differential at {(p, q)} has the wrong shape")
            for (p, q) in spaces:
                if not (self.dh_at(p + 1, q) * self.dh_at(p, q)).is_zero():
                    raise ValidationError(f"dh∘dh != 0 at {(p, q)}")
                if not (self.dv_at(p, q + 1) * self.dv_at(p, q)).is_zero():
                    raise ValidationError(f"dv∘dv != 0 at {(p, q)}")
                anti = self.dh_at(p, q + 1) * self.dv_at(p, q) + self.dv_at(p + 1, q) * self.dh_at(p, q)
                if not anti.is_zero():
                    raise ValidationError(f"differentials do not anticommute at {(p, q)}")

    def __setattr__(self, *a):
        raise AttributeError("DoubleComplex is immutable")

    def dim(self, p: int, q: int) -> int:
        return self.spaces.get((p, q), 0)

    def dh_at(self, p: int, q: int) -> Matrix:
        m = self.dh.get((p, q))
        return m if m is not None else Matrix.zeros(self.dim(p + 1, q), self.dim(p, q))

    def dv_at(self, p: int, q: int) -> Matrix:
        m = self.dv.get((p, q))
        return m if m is not None else Matrix.zeros(self.dim(p, q + 1), self.dim(p, q))

    def transpose(self) -> "DoubleComplex":
        spaces = {(q, p): k for (p, q), k in self.spaces.items()}
        dh = {(q, p): m for (p, q), m in self.dv.items()}
        dv = {(q, p): m for (p, q), m in self.dh.items()}
        return DoubleComplex(spaces, dh, dv, check=False)

    def p_range(self) -> Tuple[int, int]:
        ps = [p for p, _ in self.spaces]
        return (min(ps), max(ps)) if ps else (0, 0)

    def q_range(self) -> Tuple[int, int]:
        qs = [q for _, q in self.spaces]
        return (min(qs), max(qs)) if qs else (0, 0)


@dataclass(frozen=True)
class TotalLayout:
    blocks: Dict[int, Tuple[Tuple[int, int, int, int], ...]]  # n -> ((p, q, offset, dim), ...)

    def offset(self, n: int, p: int) -> Optional[Tuple[int, int]]:
        for bp, bq, off, k in self.blocks.get(n, ()):
            if bp == p:
                return off, k
        return None


def total_complex(dc: DoubleComplex) -> Tuple[Complex, TotalLayout]:
    """Degree n part (+)_{p+q=n} A^{p,q} (blocks by ascending p), d = dh + dv."""
    blocks: Dict[int, List[Tuple[int, int, int, int]]] = {}
    dims: Dict[int, int] = {}
    for n in sorted({p + q for p, q in dc.spaces}):
        off = 0
        entry = []
        for p in sorted({p for p, q in dc.spaces if p + q == n}):
            k = dc.dim(p, n - p)
            entry.append((p, n - p, off, k))
            off += k
        blocks[n] = entry
        dims[n] = off
    d = {}
    for n in dims:
        if not dims.get(n + 1, 0):
            continue
        rows = dims[n + 1]
        out = [[ZERO] * dims[n] for _ in range(rows)]
        tgt = {p: (off, k) for p, q, off, k in blocks[n + 1]}
        for p, q, off, k in blocks[n]:
            if (p + 1) in tgt:
                m = dc.dh_at(p, q)
                _paste(out, m, tgt[p + 1][0], off)
            if p in tgt:
                m = dc.dv_at(p, q)
                _paste(out, m, tgt[p][0], off)
        d[n] = Matrix(rows, dims[n], out)
    total = Complex(dims, d)
    return total, TotalLayout({n: tuple(v) for n, v in blocks.items()})


def _paste(out, m: Matrix, r0: int, c0: int):
    for i in range(m.rows):
        row = m.entries[i]
        for j in range(m.cols):
            if row[j] != 0:
                out[r0 + i][c0 + j] = row[j]


@dataclass
class PageEntry:
    dim: int
    representatives: Matrix  # columns inside the total complex degree p+q


@dataclass
class SpectralPage:
    r: int
    entries: Dict[Tuple[int, int], PageEntry]
    differentials: Dict[Tuple[int, int], Matrix]

    def dim(self, p: int, q: int) -> int:
        e = self.entries.get((p, q))
        return e.dim if e else 0

    def dims_table(self) -> Dict[Tuple[int, int], int]:
        return {k: e.dim for k, e in self.entries.items() if e.dim}


class _FiltrationData:
    """Level subspaces of a filtered (by subcomplexes) bounded complex."""

    def __init__(self, total: Complex, level_at, p_min: int, p_max: int):
        self.total = total
        self.level_at = level_at  # (n, p) -> Subspace
        self.p_min = p_min
        self.p_max = p_max

    def level(self, n: int, p: int) -> Subspace:
        if p <= self.p_min:
            return Subspace.full(self.total.dim(n))
        if p > self.p_max:
            return Subspace.zero(self.total.dim(n))
        return self.level_at(n, p)


def _column_filtration(dc: DoubleComplex, total: Complex, layout: TotalLayout) -> _FiltrationData:
    p_min, p_max = dc.p_range()

    def level_at(n: int, p: int) -> Subspace:
        dim = total.dim(n)
        vectors = []
        for bp, bq, off, k in layout.blocks.get(n, ()):
            if bp >= p:
                for t in range(k):
                    v = [ZERO] * dim
                    v[off + t] = ONE
                    vectors.append(tuple(v))
        return Subspace.from_vectors(vectors, dim)

    return _FiltrationData(total, level_at, p_min, p_max)


def _filtered_complex_filtration(fc: FilteredComplex) -> _FiltrationData:
    levels = fc.filtration.all_levels()
    p_min = min(levels) if levels else 0
    p_max = max(levels) if levels else 0

    def level_at(n: int, p: int) -> Subspace:
        return fc.level(n, p)

    return _FiltrationData(fc.carrier, level_at, p_min, p_max)


def _preimage(d: Matrix, target: Subspace) -> Subspace:
    """d^{-1}(target) as a subspace of the source."""
    proj, _ = target.quotient()
    comp = proj * d
    return Subspace(d.cols, comp.kernel_basis())


def _z_space(f: _FiltrationData, n: int, p: int, r: int) -> Subspace:
    d = f.total.diff(n)
    return f.level(n, p).intersect(_preimage(d, f.level(n + 1, p + r)))


def _pages_generic(f: _FiltrationData, r_max: Optional[int] = None) -> List[SpectralPage]:
    total = f.total
    degrees = sorted(total.dims) if total.dims else []
    p_lo, p_hi = f.p_min, f.p_max
    width = (p_hi - p_lo) + 1
    if r_max is None:
        r_max = width + 1
    pages: List[SpectralPage] = []
    for r in range(1, r_max + 1):
        entries: Dict[Tuple[int, int], PageEntry] = {}
        diffs: Dict[Tuple[int, int], Matrix] = {}
        quotients: Dict[Tuple[int, int], Tuple[Subspace, Matrix, Matrix]] = {}
        for n in degrees:
            for p in range(p_lo, p_hi + 1):
                q = n - p
                z = _z_space(f, n, p, r)
                inner_z = _z_space(f, n, p + 1, r - 1)
                prev = _z_space(f, n - 1, p - r + 1, r - 1)
                dprev_vectors = [
                    total.diff(n - 1).apply(prev.basis.col_tuple(j)) for j in range(prev.dim)
                ]
                boundary = inner_z.sum(Subspace.from_vectors(dprev_vectors, total.dim(n)))
                denom = z.intersect(boundary)
                proj, sect, lift = z.quotient_by(denom)
                if proj.rows:
                    entries[(p, q)] = PageEntry(dim=proj.rows, representatives=lift)
                    quotients[(p, q)] = (z, proj, lift)
        for (p, q), (z, proj, lift) in quotients.items():
            n = p + q
            tgt = quotients.get((p + r, q - r + 1))
            src_dim = entries[(p, q)].dim
            if tgt is None:
                tgt_dim = 0
                diffs[(p, q)] = Matrix.zeros(0, src_dim)
                continue
            zt, projt, _ = tgt
            cols = []
            for j in range(lift.cols):
                v = total.diff(n).apply(lift.col_tuple(j))
                coords = zt.coords_of(v)
                if coords is None:
                    raise ValidationError("page differential leaves its window")
                cols.append(projt.apply(coords))
            rows = entries[(p + r, q - r + 1)].dim
            diffs[(p, q)] = Matrix(
                rows, len(cols), list(map(list, zip(*cols))) if cols and rows else [[] for _ in range(rows)]
            )
        pages.append(SpectralPage(r=r, entries=entries, differentials=diffs))
    # internal consistency: d_r ∘ d_r = 0 and E_{r+1} = H(E_r, d_r)
    for page, nxt in zip(pages, pages[1:]):
        for (p, q), d1 in page.differentials.items():
            d2 = page.differentials.get((p + page.r, q - page.r + 1))
            if d2 is not None and d2.cols == d1.rows and not (d2 * d1).is_zero():
                raise ValidationError("page differential does not square to zero")
            incoming = page.differentials.get((p - page.r, q + page.r - 1))
            rank_in = incoming.rank if incoming is not None else 0
            homology = d1.cols - d1.rank - rank_in
            if homology != nxt.dim(p, q):
                raise ValidationError(
                    f"page {page.r + 1} entry at {(p, q)} is not the homology of page {page.r}"
                )
    return pages


def pages(dc: DoubleComplex, direction: str = "col", r_max: Optional[int] = None) -> List[SpectralPage]:
    """Spectral pages for the column ('col') or row ('row') filtration, through
    stabilization by default."""
    if direction == "row":
        dc = dc.transpose()
    elif direction != "col":
        raise ValidationError("direction must be 'col' or 'row'")
    total, layout = total_complex(dc)
    f = _column_filtration(dc, total, layout)
    return _pages_generic(f, r_max)


def filtration_pages(fc: FilteredComplex, r_max: Optional[int] = None) -> List[SpectralPage]:
    """The filtration spectral sequence of a filtered complex."""
    return _pages_generic(_filtered_complex_filtration(fc), r_max)


def convergence_check(dc: DoubleComplex, direction: str = "col") -> bool:
    """Sum of stable page dimensions along each antidiagonal equals the total
    cohomology dimension."""
    if direction == "row":
        dc = dc.transpose()
        direction = "col"
    total, _ = total_complex(dc)
    pgs = pages(dc, direction)
    if not pgs:
        return True
    last = pgs[-1]
    if any(not m.is_zero() for m in last.differentials.values()):
        return False
    degrees = sorted(total.dims) if total.dims else []
    lo, hi = dc.p_range()
    for n in degrees:
        s = sum(last.dim(p, n - p) for p in range(lo - 1, hi + 2))
        if s != total.cohomology(n).dim:
            return False
    return True


def degenerates_at_e1(fc: FilteredComplex) -> bool:
    pgs = filtration_pages(fc)
    return all(m.is_zero() for page in pgs for m in page.differentials.values())


@dataclass
class CollapseReport:
    levels: int
    e1_matches_column: bool
    d1_pattern: bool
    total_matches: bool

    @property
    def passed(self) -> bool:
        return self.e1_matches_column and self.d1_pattern and self.total_matches


def simplicial_collapse(c: Complex, n_levels: int) -> CollapseReport:
    """The truncated constant-levels double complex built from alternating
    face sums: columns -N..0 all equal to the input with identity faces.

    The first page must alternate between zero maps and isomorphisms along the
    rows, and the total complex must reproduce the input cohomology.
    """
    if n_levels % 2 != 0 or n_levels < 0:
        raise ValidationError("the truncation depth must be even and nonnegative")
    spaces = {}
    dh = {}
    dv = {}
    for col in range(-n_levels, 1):
        for m in c.dims:
            spaces[(col, m)] = c.dim(m)
            sign = ONE if col % 2 == 0 else -ONE
            if c.dim(m + 1):
                dv[(col, m)] = c.diff(m).scale(sign)
        if col < 0:
            # faces of the constant simplicial level are all the identity
            face_count = (-col) + 1
            coef = sum(((-1) ** i for i in range(face_count)), 0)
            if coef:
                for m in c.dims:
                    dh[(col, m)] = Matrix.identity(c.dim(m)).scale(Fraction(coef))
    dc = DoubleComplex(spaces, dh, dv)
    total, _ = total_complex(dc)
    pgs = pages(dc, "col")
    e1 = pgs[0]
    e1_ok = True
    for col in range(-n_levels, 1):
        for m in range(c.lo, c.hi + 1) if c.dims else []:
            if e1.dim(col, m) != c.cohomology(m).dim:
                e1_ok = False
    d1_ok = True
    for col in range(-n_levels, 0):
        expected_iso = col % 2 == 0
        for m in range(c.lo, c.hi + 1) if c.dims else []:
            d1 = e1.differentials.get((col, m))
            if d1 is None or d1.rows == 0 or d1.cols == 0:
                if expected_iso and c.cohomology(m).dim:
                    d1_ok = False
                continue
            if expected_iso:
                if d1.rank != d1.cols or d1.rows != d1.cols:
                    d1_ok = False
            else:
                if not d1.is_zero():
                    d1_ok = False
    total_ok = True
    for m in range(min(c.lo, 0), c.hi + 1) if c.dims else []:
        if total.cohomology(m).dim != c.cohomology(m).dim:
            total_ok = False
    # the column-zero inclusion realizes the comparison
    incl_comps = {}
    _, layout = total_complex(dc)
    for m in c.dims:
        found = layout.offset(m, 0)
        if found is None:
            total_ok = False
            continue
        off, k = found
        rows = total.dim(m)
        incl_comps[m] = Matrix(
            rows, k, [[ONE if i == off + j else ZERO for j in range(k)] for i in range(rows)]
        )
    incl = ChainMap(c, total, incl_comps)
    if not incl.is_quasi_iso(via="degreewise"):
        total_ok = False
    return CollapseReport(
        levels=n_levels, e1_matches_column=e1_ok, d1_pattern=d1_ok, total_matches=total_ok
    )
