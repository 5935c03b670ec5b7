"""p-adic Hodge complexes: glued diagrams rig -> k <- dR.

An object bundles a Frobenius complex (the rigid side), a filtered complex
(the de Rham side), a plain complex in the middle, and the two comparison
chain maps, which are not required to be quasi-isomorphisms.  Morphisms are
componentwise maps compatible with all structure.  Longer zigzag diagrams
collapse to this three-node shape through quasi-pushouts.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .complexes import (
    ChainMap,
    Complex,
    TensorComplex,
    cone,
    direct_sum,
    shift,
    shift_map,
    sum_inclusion,
    sum_projection,
    tensor,
    tensor_map,
)
from .errors import PreconditionError, ValidationError
from .filtered import FilteredComplex, FilteredMap, Filtration, is_filtered_quasi_iso, filtered_truncate
from .frames import CoefficientFrame
from .frobenius import FrobeniusComplex, sigma_matrix, twist_frobenius
from .linalg import Matrix, Subspace, hstack, kron, restrict_map, vstack

ONE = Fraction(1)


class PHodgeComplex:
    __slots__ = ("frame", "rig", "dr", "k", "c", "s")

    def __init__(
        self,
        frame: CoefficientFrame,
        rig: FrobeniusComplex,
        dr: FilteredComplex,
        k: Complex,
        c: ChainMap,
        s: ChainMap,
        *,
        check: bool = True,
    ):
        if check:
            if rig.frame != frame:
                raise ValidationError("rigid component frame mismatch")
            if c.source != rig.complex or c.target != k:
                raise ValidationError("comparison map c must run rig -> k")
            if s.source != dr.carrier or s.target != k:
                raise ValidationError("comparison map s must run dR -> k")
        object.__setattr__(self, "frame", frame)
        object.__setattr__(self, "rig", rig)
        object.__setattr__(self, "dr", dr)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "s", s)

    def __setattr__(self, *a):
        raise AttributeError("PHodgeComplex is immutable")

    def component_cohomology(self) -> Dict[str, Dict[int, int]]:
        return {
            "rig": self.rig.complex.cohomology_dims(),
            "k": self.k.cohomology_dims(),
            "dr": self.dr.carrier.cohomology_dims(),
        }

    def is_acyclic(self) -> bool:
        return (
            self.rig.complex.is_acyclic() and self.k.is_acyclic() and self.dr.carrier.is_acyclic()
        )


@dataclass(frozen=True)
class PHodgeMap:
    source: PHodgeComplex
    target: PHodgeComplex
    f_rig: ChainMap
    f_k: ChainMap
    f_dr: ChainMap

    def __post_init__(self):
        m, n = self.source, self.target
        if self.f_rig.source != m.rig.complex or self.f_rig.target != n.rig.complex:
            raise ValidationError("rig component endpoints mismatch")
        if self.f_k.source != m.k or self.f_k.target != n.k:
            raise ValidationError("k component endpoints mismatch")
        if self.f_dr.source != m.dr.carrier or self.f_dr.target != n.dr.carrier:
            raise ValidationError("dR component endpoints mismatch")
        # Frobenius equivariance: f∘phi = phi'∘sigma(f)
        for q in set(m.rig.complex.dims) | set(n.rig.complex.dims):
            lhs = self.f_rig.component(q) * m.rig.phi_at(q)
            rhs = n.rig.phi_at(q) * sigma_matrix(m.frame, self.f_rig.component(q))
            if lhs != rhs:
                raise ValidationError(f"map is not Frobenius-equivariant at degree {q}")
        # filtration preservation
        FilteredMap(m.dr, n.dr, self.f_dr)
        # comparison squares
        for q in set(m.rig.complex.dims) | set(m.k.dims):
            if self.f_k.component(q) * m.c.component(q) != n.c.component(q) * self.f_rig.component(q):
                raise ValidationError(f"c-square does not commute at degree {q}")
        for q in set(m.dr.carrier.dims) | set(m.k.dims):
            if self.f_k.component(q) * m.s.component(q) != n.s.component(q) * self.f_dr.component(q):
                raise ValidationError(f"s-square does not commute at degree {q}")

    @staticmethod
    def identity(m: PHodgeComplex) -> "PHodgeMap":
        return PHodgeMap(
            m, m, ChainMap.identity(m.rig.complex), ChainMap.identity(m.k), ChainMap.identity(m.dr.carrier)
        )

    def compose(self, first: "PHodgeMap") -> "PHodgeMap":
        return PHodgeMap(
            first.source,
            self.target,
            self.f_rig.compose(first.f_rig),
            self.f_k.compose(first.f_k),
            self.f_dr.compose(first.f_dr),
        )


def is_quasi_iso_phc(f: PHodgeMap) -> bool:
    return (
        f.f_rig.is_quasi_iso(via="degreewise")
        and f.f_k.is_quasi_iso(via="degreewise")
        and is_filtered_quasi_iso(FilteredMap(f.source.dr, f.target.dr, f.f_dr))
    )


def tate_object(frame: CoefficientFrame, n: int) -> PHodgeComplex:
    """The twist K(n): one-dimensional in degree 0, Frobenius p^{-n} sigma,
    filtration jump at -n."""
    single = Complex.single(0)
    phi = Matrix.identity(1).scale(Fraction(frame.p) ** (-n))
    rig = FrobeniusComplex(frame, single, {0: phi}, check=False)
    dr = FilteredComplex(single, Filtration({0: 1}, {0: [(-n, Subspace.full(1))]}), check=False)
    ident = ChainMap.identity(single)
    return PHodgeComplex(frame, rig, dr, single, ident, ident, check=False)


def unit_object(frame: CoefficientFrame) -> PHodgeComplex:
    return tate_object(frame, 0)


def is_unit_like(m: PHodgeComplex) -> bool:
    """One-dimensional in degree 0 with identity comparisons, phi = 1 and
    filtration jump at 0."""
    single = {0: 1}
    return (
        m.rig.complex.dims == single
        and m.k.dims == single
        and m.dr.carrier.dims == single
        and m.c.component(0) == Matrix.identity(1)
        and m.s.component(0) == Matrix.identity(1)
        and m.rig.phi_at(0) == Matrix.identity(1)
        and m.dr.filtration.jump_levels(0) == (0,)
    )


def _tensor_filtration(a: FilteredComplex, b: FilteredComplex, t: TensorComplex) -> Filtration:
    dims = dict(t.complex.dims)
    records: Dict[int, List[Tuple[int, Subspace]]] = {}
    for n, blocks in t.blocks.items():
        total = t.complex.dim(n)
        candidates = set()
        for i, j, _ in blocks:
            for la in a.filtration.jump_levels(i):
                for lb in b.filtration.jump_levels(j):
                    candidates.add(la + lb)
        entry = []
        for level in sorted(candidates):
            vectors: List[Tuple] = []
            for i, j, off in blocks:
                da, db = a.carrier.dim(i), b.carrier.dim(j)
                levels_a = sorted(set(a.filtration.jump_levels(i)))
                for la in levels_a:
                    lb = level - la
                    sa = a.filtration.at(i, la)
                    sb = b.filtration.at(j, lb)
                    if sa.dim == 0 or sb.dim == 0:
                        continue
                    for x in range(sa.dim):
                        u = sa.basis.col_tuple(x)
                        for y in range(sb.dim):
                            v = sb.basis.col_tuple(y)
                            vec = [Fraction(0)] * total
                            kv = [xx * yy for xx in u for yy in v]
                            for tpos, val in enumerate(kv):
                                vec[off + tpos] = val
                            vectors.append(tuple(vec))
            space = Subspace.from_vectors(vectors, total)
            if space.dim:
                entry.append((level, space))
        cleaned: List[Tuple[int, Subspace]] = []
        for level, space in entry:
            if cleaned and cleaned[-1][1].dim == space.dim:
                cleaned[-1] = (level, cleaned[-1][1])
            else:
                cleaned.append((level, space))
        records[n] = cleaned
    return Filtration(dims, records)


def tensor_phc(m: PHodgeComplex, m2: PHodgeComplex) -> PHodgeComplex:
    if m.frame != m2.frame:
        raise ValidationError("tensor of p-adic Hodge complexes needs one frame")
    frame = m.frame
    t_rig = tensor(m.rig.complex, m2.rig.complex)
    t_k = tensor(m.k, m2.k)
    t_dr = tensor(m.dr.carrier, m2.dr.carrier)
    phi = {}
    for n, blocks in t_rig.blocks.items():
        size = t_rig.complex.dim(n)
        out = [[Fraction(0)] * size for _ in range(size)]
        for i, j, off in blocks:
            blk = kron(m.rig.phi_at(i), m2.rig.phi_at(j))
            for r in range(blk.rows):
                row = blk.entries[r]
                for cc in range(blk.cols):
                    if row[cc] != 0:
                        out[off + r][off + cc] = row[cc]
        phi[n] = Matrix(size, size, out)
    rig = FrobeniusComplex(frame, t_rig.complex, phi, check=False)
    dr = FilteredComplex(t_dr.complex, _tensor_filtration(m.dr, m2.dr, t_dr), check=False)
    c = tensor_map(m.c, m2.c)
    s = tensor_map(m.s, m2.s)
    # re-target onto the canonical tensor complexes
    c = ChainMap(t_rig.complex, t_k.complex, c.components, check=False)
    s = ChainMap(t_dr.complex, t_k.complex, s.components, check=False)
    return PHodgeComplex(frame, rig, dr, t_k.complex, c, s, check=False)


def twist(m: PHodgeComplex, n: int) -> PHodgeComplex:
    """m (x) K(n): Frobenius scaled by p^{-n}, filtration jumps shifted by -n."""
    rig = twist_frobenius(m.rig, -n)
    dr = m.dr.shift_levels(-n)
    return PHodgeComplex(m.frame, rig, dr, m.k, m.c, m.s, check=False)


def shift_phc(m: PHodgeComplex, k: int) -> PHodgeComplex:
    rig_c = shift(m.rig.complex, k)
    rig = FrobeniusComplex(m.frame, rig_c, {n - k: mat for n, mat in m.rig.phi.items()}, check=False)
    dr_c = shift(m.dr.carrier, k)
    recs = {n - k: list(m.dr.filtration.records.get(n, ())) for n in m.dr.carrier.dims}
    dr = FilteredComplex(dr_c, Filtration(dr_c.dims, recs), check=False)
    return PHodgeComplex(
        m.frame, rig, dr, shift(m.k, k), shift_map(m.c, k), shift_map(m.s, k), check=False
    )


def direct_sum_phc(parts: Sequence[PHodgeComplex]) -> PHodgeComplex:
    frame = parts[0].frame
    rig_total, rig_layout = direct_sum([p.rig.complex for p in parts])
    k_total, k_layout = direct_sum([p.k for p in parts])
    dr_total, dr_layout = direct_sum([p.dr.carrier for p in parts])
    phi = {}
    for n in rig_total.dims:
        size = rig_total.dim(n)
        out = [[Fraction(0)] * size for _ in range(size)]
        for idx, p in enumerate(parts):
            off = rig_layout.offset(idx, n)
            blk = p.rig.phi_at(n)
            for r in range(blk.rows):
                for cc in range(blk.cols):
                    if blk.entries[r][cc] != 0:
                        out[off + r][off + cc] = blk.entries[r][cc]
        phi[n] = Matrix(size, size, out)
    rig = FrobeniusComplex(frame, rig_total, phi, check=False)
    records: Dict[int, List[Tuple[int, Subspace]]] = {}
    for n in dr_total.dims:
        levels = set()
        for p in parts:
            levels.update(p.dr.filtration.jump_levels(n))
        entry = []
        for level in sorted(levels):
            vectors = []
            for idx, p in enumerate(parts):
                off = dr_layout.offset(idx, n)
                sp = p.dr.level(n, level)
                for j in range(sp.dim):
                    v = [Fraction(0)] * dr_total.dim(n)
                    col = sp.basis.col_tuple(j)
                    for t, val in enumerate(col):
                        v[off + t] = val
                    vectors.append(tuple(v))
            space = Subspace.from_vectors(vectors, dr_total.dim(n))
            if space.dim:
                entry.append((level, space))
        cleaned: List[Tuple[int, Subspace]] = []
        for level, space in entry:
            if cleaned and cleaned[-1][1].dim == space.dim:
                cleaned[-1] = (level, cleaned[-1][1])
            else:
                cleaned.append((level, space))
        records[n] = cleaned
    dr = FilteredComplex(dr_total, Filtration(dict(dr_total.dims), records), check=False)
    c_comps = {}
    s_comps = {}
    for n in k_total.dims:
        c_blocks = []
        s_blocks = []
        for idx, p in enumerate(parts):
            c_blocks.append(p.c.component(n))
            s_blocks.append(p.s.component(n))
        c_comps[n] = _offset_block_diag(c_blocks, k_total.dim(n), rig_total.dim(n))
        s_comps[n] = _offset_block_diag(s_blocks, k_total.dim(n), dr_total.dim(n))
    c = ChainMap(rig_total, k_total, c_comps, check=False)
    s = ChainMap(dr_total, k_total, s_comps, check=False)
    return PHodgeComplex(frame, rig, dr, k_total, c, s, check=False)


def _offset_block_diag(blocks: Sequence[Matrix], rows: int, cols: int) -> Matrix:
    out = [[Fraction(0)] * cols for _ in range(rows)]
    r0 = c0 = 0
    for b in blocks:
        for i in range(b.rows):
            for j in range(b.cols):
                if b.entries[i][j] != 0:
                    out[r0 + i][c0 + j] = b.entries[i][j]
        r0 += b.rows
        c0 += b.cols
    return Matrix(rows, cols, out)


def cone_phc(f: PHodgeMap) -> PHodgeComplex:
    """Componentwise mapping cone with the inherited structure."""
    m, n = f.source, f.target
    rig_cone, _, _ = cone(f.f_rig)
    k_cone, _, _ = cone(f.f_k)
    dr_cone, _, _ = cone(f.f_dr)
    phi = {}
    for q in rig_cone.dims:
        bt = n.rig.phi_at(q)
        bs = m.rig.phi_at(q + 1)
        size = rig_cone.dim(q)
        out = [[Fraction(0)] * size for _ in range(size)]
        for i in range(bt.rows):
            for j in range(bt.cols):
                out[i][j] = bt.entries[i][j]
        off = bt.rows
        for i in range(bs.rows):
            for j in range(bs.cols):
                out[off + i][off + j] = bs.entries[i][j]
        phi[q] = Matrix(size, size, out)
    rig = FrobeniusComplex(m.frame, rig_cone, phi, check=False)
    records: Dict[int, List[Tuple[int, Subspace]]] = {}
    for q in dr_cone.dims:
        levels = set(n.dr.filtration.jump_levels(q)) | set(m.dr.filtration.jump_levels(q + 1))
        entry = []
        for level in sorted(levels):
            vectors = []
            st = n.dr.level(q, level)
            ss = m.dr.level(q + 1, level)
            dim_t = n.dr.carrier.dim(q)
            total = dr_cone.dim(q)
            for j in range(st.dim):
                v = [Fraction(0)] * total
                for t, val in enumerate(st.basis.col_tuple(j)):
                    v[t] = val
                vectors.append(tuple(v))
            for j in range(ss.dim):
                v = [Fraction(0)] * total
                for t, val in enumerate(ss.basis.col_tuple(j)):
                    v[dim_t + t] = val
                vectors.append(tuple(v))
            space = Subspace.from_vectors(vectors, total)
            if space.dim:
                entry.append((level, space))
        cleaned: List[Tuple[int, Subspace]] = []
        for level, space in entry:
            if cleaned and cleaned[-1][1].dim == space.dim:
                cleaned[-1] = (level, cleaned[-1][1])
            else:
                cleaned.append((level, space))
        records[q] = cleaned
    dr = FilteredComplex(dr_cone, Filtration(dict(dr_cone.dims), records), check=False)
    c_comps = {}
    s_comps = {}
    for q in k_cone.dims:
        c_comps[q] = _two_block_diag(n.c.component(q), m.c.component(q + 1), k_cone.dim(q), rig_cone.dim(q))
        s_comps[q] = _two_block_diag(n.s.component(q), m.s.component(q + 1), k_cone.dim(q), dr_cone.dim(q))
    c = ChainMap(rig_cone, k_cone, c_comps, check=False)
    s = ChainMap(dr_cone, k_cone, s_comps, check=False)
    return PHodgeComplex(m.frame, rig, dr, k_cone, c, s, check=False)


def _two_block_diag(b1: Matrix, b2: Matrix, rows: int, cols: int) -> Matrix:
    out = [[Fraction(0)] * cols for _ in range(rows)]
    for i in range(b1.rows):
        for j in range(b1.cols):
            if b1.entries[i][j] != 0:
                out[i][j] = b1.entries[i][j]
    for i in range(b2.rows):
        for j in range(b2.cols):
            if b2.entries[i][j] != 0:
                out[b1.rows + i][b1.cols + j] = b2.entries[i][j]
    return Matrix(rows, cols, out)


def quasi_pushout(f: ChainMap, g: ChainMap) -> Tuple[Complex, ChainMap, ChainMap, Dict[int, Matrix]]:
    """Cone((f,-g): M2 -> M1 x M3) with the maps M1 -> Q <- M3 and the
    homotopy witnessing commutativity of the square up to homotopy."""
    if f.source != g.source:
        raise ValidationError("quasi-pushout needs a shared source")
    m2 = f.source
    m1, m3 = f.target, g.target
    prod, layout = direct_sum([m1, m3])
    comps = {}
    for n in m2.dims:
        top = f.component(n)
        bot = g.component(n).scale(-ONE)
        comps[n] = vstack([top, bot])
    fg = ChainMap(m2, prod, comps, check=False)
    q, incl, _ = cone(fg)
    i1 = sum_inclusion([m1, m3], prod, layout, 0)
    i3 = sum_inclusion([m1, m3], prod, layout, 1)
    map1 = incl.compose(i1)
    map3 = incl.compose(i3)
    homotopy = {}
    for n in m2.dims:
        # h: M2^n -> Q^{n-1} = (M1+M3)^{n-1} (+) M2^n, inclusion into the shifted slot
        rows = q.dim(n - 1)
        cols = m2.dim(n)
        out = [[Fraction(0)] * cols for _ in range(rows)]
        off = prod.dim(n - 1)
        for i in range(cols):
            out[off + i][i] = ONE
        homotopy[n] = Matrix(rows, cols, out)
    return q, map1, map3, homotopy


def quasi_pullback(f: ChainMap, g: ChainMap) -> Tuple[Complex, ChainMap, ChainMap]:
    """Cone(f - g: M1 x M3 -> M2)[-1] with the projections to M1 and M3."""
    if f.target != g.target:
        raise ValidationError("quasi-pullback needs a shared target")
    m1, m3 = f.source, g.source
    m2 = f.target
    prod, layout = direct_sum([m1, m3])
    comps = {}
    for n in prod.dims:
        comps[n] = hstack([f.component(n), g.component(n).scale(-ONE)])
    fg = ChainMap(prod, m2, comps, check=False)
    c, _, proj_shift = cone(fg)
    p = shift(c, -1)
    p1 = sum_projection([m1, m3], prod, layout, 0)
    p3 = sum_projection([m1, m3], prod, layout, 1)
    # P^n = M2^{n-1} (+) (M1+M3)^n ; project onto the product part
    comps1 = {}
    comps3 = {}
    for n in p.dims:
        off = m2.dim(n - 1)
        total = p.dim(n)
        sel = Matrix(
            prod.dim(n), total, [[ONE if j == off + i else Fraction(0) for j in range(total)] for i in range(prod.dim(n))]
        )
        comps1[n] = p1.component(n) * sel
        comps3[n] = p3.component(n) * sel
    return p, ChainMap(p, m1, comps1, check=False), ChainMap(p, m3, comps3, check=False)


@dataclass(frozen=True)
class Zigzag:
    """Alternating diagram rig -> T1 <- B1 -> T2 <- ... <- dR.

    nodes[0] is a FrobeniusComplex, nodes[-1] a FilteredComplex, the interior
    nodes plain complexes.  arrows[i] joins nodes[i] and nodes[i+1]; even
    positions point forward, odd positions backward.  Backward arrows other
    than the last one must be flagged (and verified) quasi-isomorphisms for
    the collapse to preserve the middle homotopy type.
    """

    frame: CoefficientFrame
    nodes: Tuple
    arrows: Tuple[Tuple[str, ChainMap, bool], ...]

    def __post_init__(self):
        if len(self.nodes) < 3 or len(self.nodes) % 2 == 0:
            raise ValidationError("zigzag needs an odd number of nodes, at least 3")
        if len(self.arrows) != len(self.nodes) - 1:
            raise ValidationError("zigzag arrow count mismatch")
        if not isinstance(self.nodes[0], FrobeniusComplex) or not isinstance(self.nodes[-1], FilteredComplex):
            raise ValidationError("zigzag ends must carry the rigid and de Rham structures")
        for idx, (direction, arrow, flagged) in enumerate(self.arrows):
            expected = "fwd" if idx % 2 == 0 else "bwd"
            if direction != expected:
                raise ValidationError(f"zigzag arrow {idx} must point {expected}")
            left = self._carrier(idx)
            right = self._carrier(idx + 1)
            if direction == "fwd":
                if arrow.source != left or arrow.target != right:
                    raise ValidationError(f"zigzag arrow {idx} endpoints mismatch")
            else:
                if arrow.source != right or arrow.target != left:
                    raise ValidationError(f"zigzag arrow {idx} endpoints mismatch")
            if flagged and not arrow.is_quasi_iso(via="degreewise"):
                raise ValidationError(f"zigzag arrow {idx} is flagged but is not a quasi-isomorphism")

    def _carrier(self, idx: int) -> Complex:
        node = self.nodes[idx]
        if isinstance(node, FrobeniusComplex):
            return node.complex
        if isinstance(node, FilteredComplex):
            return node.carrier
        return node


def collapse_zigzag(z: Zigzag) -> PHodgeComplex:
    """Repeated quasi-pushout of the interior until three nodes remain."""
    nodes: List[Complex] = [z._carrier(i) for i in range(len(z.nodes))]
    arrows: List[Tuple[str, ChainMap, bool]] = list(z.arrows)
    for idx in range(1, len(arrows), 2):
        direction, arrow, flagged = arrows[idx]
        if idx != len(arrows) - 1 and not flagged and not arrow.is_quasi_iso(via="degreewise"):
            raise PreconditionError(f"interior backward arrow {idx} is not a quasi-isomorphism")
    while len(nodes) > 3:
        # collapse T <-f B -g-> T' at positions 1,2,3 into Q
        f = arrows[1][1]
        g = arrows[2][1]
        q, map1, map3, _ = quasi_pushout(f, g)
        new_c = map1.compose(arrows[0][1])
        if len(arrows) > 3:
            new_back = map3.compose(arrows[3][1])
            nodes = [nodes[0], q] + nodes[4:]
            arrows = [("fwd", new_c, arrows[0][2]), ("bwd", new_back, arrows[3][2])] + arrows[4:]
        else:
            nodes = [nodes[0], q, nodes[3]]
            arrows = [("fwd", new_c, arrows[0][2]), ("bwd", map3, True)]
    c = arrows[0][1]
    s = arrows[1][1]
    return PHodgeComplex(z.frame, z.nodes[0], z.nodes[-1], nodes[1], c, s, check=False)


def truncate_phc(m: PHodgeComplex, n: int, side: str) -> PHodgeComplex:
    """Componentwise canonical truncation (filtered truncation on the dR side)."""
    if side not in ("le", "ge"):
        raise ValidationError("side must be 'le' or 'ge'")
    dr = filtered_truncate(m.dr, n, side)
    if side == "le":
        rig_c, rig_basis = _truncate_le_model(m.rig.complex, n)
        k_c, k_basis = _truncate_le_model(m.k, n)
    else:
        rig_c, rig_basis = _truncate_ge_model(m.rig.complex, n)
        k_c, k_basis = _truncate_ge_model(m.k, n)
    phi = {
        q: _induced_on_model(m.rig.phi_at(q), rig_basis.get(q), rig_basis.get(q), m.rig.complex.dim(q))
        for q in rig_c.dims
    }
    rig = FrobeniusComplex(m.frame, rig_c, phi, check=False)
    c_comps = {}
    for q in rig_c.dims:
        c_comps[q] = _induced_between_models(
            m.c.component(q), rig_basis.get(q), k_basis.get(q), k_c.dim(q)
        )
    s_comps = {}
    dr_basis = _model_basis_of_truncated(m.dr, dr, side, n)
    for q in dr.carrier.dims:
        s_comps[q] = _induced_between_models(
            m.s.component(q), dr_basis.get(q), k_basis.get(q), k_c.dim(q)
        )
    c = ChainMap(rig_c, k_c, c_comps, check=False)
    s = ChainMap(dr.carrier, k_c, s_comps, check=False)
    return PHodgeComplex(m.frame, rig, dr, k_c, c, s, check=False)


def _truncate_le_model(c: Complex, n: int) -> Tuple[Complex, Dict[int, Matrix]]:
    """tau_{<=n}: identity below n, kernel of d^n at n.  Returns the model
    and per-degree basis matrices into the original spaces."""
    dims = {}
    basis = {}
    d = {}
    for q in c.dims:
        if q < n:
            dims[q] = c.dim(q)
            basis[q] = Matrix.identity(c.dim(q))
    ker = Subspace(c.dim(n), c.diff(n).kernel_basis())
    if ker.dim:
        dims[n] = ker.dim
        basis[n] = ker.basis
    for q in list(dims):
        if dims.get(q + 1, 0):
            d[q] = restrict_map(c.diff(q), basis[q], basis[q + 1])
    return Complex(dims, d, check=False), basis


def _truncate_ge_model(c: Complex, n: int) -> Tuple[Complex, Dict[int, Matrix]]:
    """tau_{>=n}: image of d^{n-1} at degree n-1 (the coimage model), identity
    from n on."""
    dims = {}
    basis = {}
    d = {}
    for q in c.dims:
        if q >= n:
            dims[q] = c.dim(q)
            basis[q] = Matrix.identity(c.dim(q))
            if c.dim(q + 1):
                d[q] = c.diff(q)
    img = Subspace.from_matrix(c.diff(n - 1))
    if img.dim:
        dims[n - 1] = img.dim
        basis[n - 1] = img.basis
        d[n - 1] = img.basis
    return Complex(dims, d, check=False), basis


def _induced_on_model(f: Matrix, src_basis: Optional[Matrix], tgt_basis: Optional[Matrix], ambient: int) -> Matrix:
    if src_basis is None or tgt_basis is None:
        return Matrix.zeros(0 if tgt_basis is None else tgt_basis.cols, 0 if src_basis is None else src_basis.cols)
    sol = tgt_basis.solve_matrix(f * src_basis)
    if sol is None:
        raise ValidationError("truncation: structure map leaves the truncated model")
    return sol


def _induced_between_models(f: Matrix, src_basis: Optional[Matrix], tgt_basis: Optional[Matrix], tgt_dim: int) -> Matrix:
    if src_basis is None:
        return Matrix.zeros(tgt_dim, 0)
    if tgt_basis is None:
        return Matrix.zeros(0, src_basis.cols)
    sol = tgt_basis.solve_matrix(f * src_basis)
    if sol is None:
        raise ValidationError("truncation: comparison map leaves the truncated model")
    return sol


def _model_basis_of_truncated(orig: FilteredComplex, trunc: FilteredComplex, side: str, n: int) -> Dict[int, Matrix]:
    basis = {}
    c = orig.carrier
    for q in trunc.carrier.dims:
        if side == "le":
            if q < n:
                basis[q] = Matrix.identity(c.dim(q))
            else:
                basis[q] = Subspace(c.dim(n), c.diff(n).kernel_basis()).basis
        else:
            if q >= n:
                basis[q] = Matrix.identity(c.dim(q))
            else:
                basis[q] = Subspace.from_matrix(c.diff(n - 1)).basis
    return basis
