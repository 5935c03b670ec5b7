"""Ext groups of p-adic Hodge complexes through the Hom-diagram mapping cone.

For a pair (M, M') six Hom complexes are formed: three "structure" nodes
(maps of the rigid parts, of the middle parts, and filtration-compatible maps
of the de Rham parts) and three "comparison" nodes.  The glue map between
their direct sums is a difference of two multiplicative maps; the shifted
cone of the glue computes Hom groups in the localized homotopy category, so
its cohomology gives the Ext groups.  The same difference structure drives
the interpolated cup products.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from .complexes import (
    ChainMap,
    Complex,
    HomComplex,
    SumLayout,
    cone,
    direct_sum,
    hom_complex,
    shift,
    tensor,
)
from .errors import PreconditionError, ValidationError
from .linalg import Matrix, kron, restrict_map
from .phc import PHodgeComplex, PHodgeMap, is_quasi_iso_phc, is_unit_like

ZERO = Fraction(0)
ONE = Fraction(1)


class FilteredHom:
    """The subcomplex of Hom(M_dR, M'_dR) of maps preserving every level."""

    __slots__ = ("full", "complex", "bases")

    def __init__(self, src, tgt):
        full = hom_complex(src.carrier, tgt.carrier)
        bases: Dict[int, Matrix] = {}
        dims: Dict[int, int] = {}
        for n in full.complex.dims:
            conditions: List[Matrix] = []
            for q, r, c, off in full.slots(n):
                levels = set(src.filtration.jump_levels(q)) | set(tgt.filtration.jump_levels(q + n))
                slot_conditions = []
                for level in sorted(levels):
                    b = src.level(q, level).basis
                    t = tgt.level(q + n, level)
                    proj, _ = t.quotient()
                    if b.cols == 0 or proj.rows == 0:
                        continue
                    slot_conditions.append(kron(proj, b.transpose()))
                size = r * c
                if slot_conditions:
                    stacked = _vstack_list(slot_conditions)
                    kernel = stacked.kernel_basis()
                else:
                    kernel = Matrix.identity(size)
                conditions.append(kernel)
            total = full.complex.dim(n)
            cols = sum(k.cols for k in conditions)
            out = [[ZERO] * cols for _ in range(total)]
            roff = 0
            coff = 0
            for (q, r, c, off), k in zip(full.slots(n), conditions):
                for i in range(k.rows):
                    for j in range(k.cols):
                        if k.entries[i][j] != 0:
                            out[off + i][coff + j] = k.entries[i][j]
                coff += k.cols
            if cols:
                bases[n] = Matrix(total, cols, out)
                dims[n] = cols
        d = {}
        for n in dims:
            if dims.get(n + 1, 0):
                d[n] = restrict_map(full.complex.diff(n), bases[n], bases[n + 1])
        object.__setattr__(self, "full", full)
        object.__setattr__(self, "complex", Complex(dims, d, check=False))
        object.__setattr__(self, "bases", bases)

    def __setattr__(self, *a):
        raise AttributeError("FilteredHom is immutable")

    def inclusion(self) -> ChainMap:
        return ChainMap(self.complex, self.full.complex, dict(self.bases), check=False)


def _vstack_list(mats: List[Matrix]) -> Matrix:
    cols = mats[0].cols
    rows = sum(m.rows for m in mats)
    out = []
    for m in mats:
        out.extend(list(r) for r in m.entries)
    return Matrix(rows, cols, out)


class ExtComplex:
    """The Hom-diagram cone for a pair of p-adic Hodge complexes."""

    __slots__ = (
        "first",
        "second",
        "h_rr",
        "h_kk",
        "h_dd",
        "h_ff",
        "h_rk",
        "h_dk",
        "gamma0",
        "layout0",
        "gamma1",
        "layout1",
        "f_map",
        "g_map",
        "glue",
        "total",
    )

    def __init__(self, m: PHodgeComplex, m2: PHodgeComplex):
        if m.frame != m2.frame:
            raise ValidationError("Ext needs both objects over one frame")
        if not m.frame.sigma_is_identity:
            raise PreconditionError("Ext computation requires the identity automorphism")
        object.__setattr__(self, "first", m)
        object.__setattr__(self, "second", m2)
        h_rr = hom_complex(m.rig.complex, m2.rig.complex)
        h_kk = hom_complex(m.k, m2.k)
        ff = FilteredHom(m.dr, m2.dr)
        h_dd = ff.full
        h_rk = hom_complex(m.rig.complex, m2.k)
        h_dk = hom_complex(m.dr.carrier, m2.k)
        gamma0, layout0 = direct_sum([h_rr.complex, h_kk.complex, ff.complex])
        gamma1, layout1 = direct_sum([h_rr.complex, h_rk.complex, h_dk.complex])
        phi_src = ChainMap(m.rig.complex, m.rig.complex, dict(m.rig.phi), check=False)
        phi_tgt = ChainMap(m2.rig.complex, m2.rig.complex, dict(m2.rig.phi), check=False)
        # f: multiplicative on the comparison side
        f_blocks = {
            (0, 0): h_rr.post_compose(phi_tgt, h_rr),
            (1, 0): h_rr.post_compose(m2.c, h_rk),
            (2, 1): h_kk.pre_compose(m.s, h_dk),
        }
        # g: multiplicative on the structure side
        g_blocks = {
            (0, 0): h_rr.pre_compose(phi_src, h_rr),
            (1, 1): h_kk.pre_compose(m.c, h_rk),
            (2, 2): h_dd.post_compose(m2.s, h_dk).compose(ff.inclusion()),
        }
        parts0 = [h_rr.complex, h_kk.complex, ff.complex]
        parts1 = [h_rr.complex, h_rk.complex, h_dk.complex]
        f_map = _assemble(parts0, gamma0, layout0, parts1, gamma1, layout1, f_blocks)
        g_map = _assemble(parts0, gamma0, layout0, parts1, gamma1, layout1, g_blocks)
        glue = ChainMap(
            gamma0, gamma1, {n: f_map.component(n) - g_map.component(n) for n in gamma0.dims}
        )
        total = shift(cone(glue)[0], -1)
        object.__setattr__(self, "h_rr", h_rr)
        object.__setattr__(self, "h_kk", h_kk)
        object.__setattr__(self, "h_dd", h_dd)
        object.__setattr__(self, "h_ff", ff)
        object.__setattr__(self, "h_rk", h_rk)
        object.__setattr__(self, "h_dk", h_dk)
        object.__setattr__(self, "gamma0", gamma0)
        object.__setattr__(self, "layout0", layout0)
        object.__setattr__(self, "gamma1", gamma1)
        object.__setattr__(self, "layout1", layout1)
        object.__setattr__(self, "f_map", f_map)
        object.__setattr__(self, "g_map", g_map)
        object.__setattr__(self, "glue", glue)
        object.__setattr__(self, "total", total)

    def __setattr__(self, *a):
        raise AttributeError("ExtComplex is immutable")

    # degree-n elements are (gamma1 part of degree n-1, gamma0 part of degree n)
    def split(self, n: int, vec: Sequence) -> Tuple[Tuple, Tuple]:
        k1 = self.gamma1.dim(n - 1)
        return tuple(vec[:k1]), tuple(vec[k1:])

    def join(self, n: int, g1: Sequence, g0: Sequence) -> Tuple:
        if len(g1) != self.gamma1.dim(n - 1) or len(g0) != self.gamma0.dim(n):
            raise ValidationError("element parts have wrong sizes")
        return tuple(g1) + tuple(g0)

    def ext_dim(self, n: int) -> int:
        return self.total.cohomology(n).dim

    def ext_dims(self) -> Dict[int, int]:
        return self.total.cohomology_dims()

    def classes(self, n: int):
        return self.total.cohomology(n)

    def differential(self, n: int) -> Matrix:
        return self.total.diff(n)

    def slot0_offsets(self, n: int) -> Tuple[int, int, int]:
        return (
            self.layout0.offset(0, n),
            self.layout0.offset(1, n),
            self.layout0.offset(2, n),
        )

    def slot1_offsets(self, n: int) -> Tuple[int, int, int]:
        return (
            self.layout1.offset(0, n),
            self.layout1.offset(1, n),
            self.layout1.offset(2, n),
        )


def _assemble(parts0, gamma0, layout0, parts1, gamma1, layout1, blocks) -> ChainMap:
    comps = {}
    for n in gamma0.dims:
        rows = gamma1.dim(n)
        cols = gamma0.dim(n)
        out = [[ZERO] * cols for _ in range(rows)]
        for (ti, si), cm in blocks.items():
            block = cm.component(n)
            r0 = layout1.offset(ti, n)
            c0 = layout0.offset(si, n)
            for i in range(block.rows):
                row = block.entries[i]
                for j in range(block.cols):
                    if row[j] != 0:
                        out[r0 + i][c0 + j] = row[j]
        comps[n] = Matrix(rows, cols, out)
    return ChainMap(gamma0, gamma1, comps, check=False)


def ext_complex(m: PHodgeComplex, m2: PHodgeComplex) -> ExtComplex:
    return ExtComplex(m, m2)


def ext(m: PHodgeComplex, m2: PHodgeComplex, n: int):
    """Dimension and representatives of the degree-n Ext group."""
    e = ExtComplex(m, m2)
    h = e.classes(n)
    return h.dim, h.representatives


def induced_map(e_src: ExtComplex, g: PHodgeMap, e_tgt: ExtComplex) -> ChainMap:
    """Post-composition by g: m2 -> m3 on every Hom node; the induced map of
    the cones for a fixed first argument."""
    maps0 = [
        e_src.h_rr.post_compose(g.f_rig, e_tgt.h_rr),
        e_src.h_kk.post_compose(g.f_k, e_tgt.h_kk),
        None,  # filtered piece handled through bases below
    ]
    full_dd = e_src.h_dd.post_compose(g.f_dr, e_tgt.h_dd)
    ff_comps = {}
    for n in e_src.h_ff.complex.dims:
        src_b = e_src.h_ff.bases[n]
        img = full_dd.component(n) * src_b
        tgt_b = e_tgt.h_ff.bases.get(n)
        if tgt_b is None:
            if not img.is_zero():
                raise ValidationError("filtration-compatible maps are not preserved")
            ff_comps[n] = Matrix.zeros(0, src_b.cols)
            continue
        sol = tgt_b.solve_matrix(img)
        if sol is None:
            raise ValidationError("post-composition leaves the filtration-compatible subcomplex")
        ff_comps[n] = sol
    maps0[2] = ChainMap(e_src.h_ff.complex, e_tgt.h_ff.complex, ff_comps, check=False)
    maps1 = [
        e_src.h_rr.post_compose(g.f_rig, e_tgt.h_rr),
        e_src.h_rk.post_compose(g.f_k, e_tgt.h_rk),
        e_src.h_dk.post_compose(g.f_k, e_tgt.h_dk),
    ]
    t0 = _sum_map(
        [e_src.h_rr.complex, e_src.h_kk.complex, e_src.h_ff.complex],
        e_src.gamma0,
        e_src.layout0,
        [e_tgt.h_rr.complex, e_tgt.h_kk.complex, e_tgt.h_ff.complex],
        e_tgt.gamma0,
        e_tgt.layout0,
        maps0,
    )
    t1 = _sum_map(
        [e_src.h_rr.complex, e_src.h_rk.complex, e_src.h_dk.complex],
        e_src.gamma1,
        e_src.layout1,
        [e_tgt.h_rr.complex, e_tgt.h_rk.complex, e_tgt.h_dk.complex],
        e_tgt.gamma1,
        e_tgt.layout1,
        maps1,
    )
    # square against the glue maps
    for n in e_src.gamma0.dims:
        if t1.component(n) * e_src.glue.component(n) != e_tgt.glue.component(n) * t0.component(n):
            raise ValidationError("induced map does not commute with the glue")
    comps = {}
    for n in e_src.total.dims:
        rows = e_tgt.total.dim(n)
        cols = e_src.total.dim(n)
        out = [[ZERO] * cols for _ in range(rows)]
        b1 = t1.component(n - 1)
        b0 = t0.component(n)
        for i in range(b1.rows):
            for j in range(b1.cols):
                if b1.entries[i][j] != 0:
                    out[i][j] = b1.entries[i][j]
        r_off = e_tgt.gamma1.dim(n - 1)
        c_off = e_src.gamma1.dim(n - 1)
        for i in range(b0.rows):
            for j in range(b0.cols):
                if b0.entries[i][j] != 0:
                    out[r_off + i][c_off + j] = b0.entries[i][j]
        comps[n] = Matrix(rows, cols, out)
    return ChainMap(e_src.total, e_tgt.total, comps, check=False)


def _sum_map(parts_src, total_src, layout_src, parts_tgt, total_tgt, layout_tgt, maps) -> ChainMap:
    comps = {}
    for n in set(total_src.dims) | set(total_tgt.dims):
        rows = total_tgt.dim(n)
        cols = total_src.dim(n)
        out = [[ZERO] * cols for _ in range(rows)]
        for idx, cm in enumerate(maps):
            block = cm.component(n)
            r0 = layout_tgt.offset(idx, n)
            c0 = layout_src.offset(idx, n)
            for i in range(block.rows):
                for j in range(block.cols):
                    if block.entries[i][j] != 0:
                        out[r0 + i][c0 + j] = block.entries[i][j]
        comps[n] = Matrix(rows, cols, out)
    return ChainMap(total_src, total_tgt, comps, check=False)


@dataclass
class InvarianceReport:
    is_quasi_iso: bool
    degrees: Dict[int, Tuple[int, int, bool]]

    @property
    def all_isomorphisms(self) -> bool:
        return self.is_quasi_iso and all(ok for _, _, ok in self.degrees.values())


def quasi_iso_invariance(m: PHodgeComplex, g: PHodgeMap, *, require: bool = True) -> InvarianceReport:
    """Check that a quasi-isomorphism of second arguments induces
    isomorphisms on every Ext group."""
    qi = is_quasi_iso_phc(g)
    if require and not qi:
        raise PreconditionError("the supplied morphism is not a quasi-isomorphism")
    e_src = ExtComplex(m, g.source)
    e_tgt = ExtComplex(m, g.target)
    t = induced_map(e_src, g, e_tgt)
    degrees = {}
    for n in sorted(set(e_src.total.dims) | set(e_tgt.total.dims)):
        d_src = e_src.ext_dim(n)
        d_tgt = e_tgt.ext_dim(n)
        ok = d_src == d_tgt
        if ok and d_src:
            ok = t.induced_on_cohomology(n).rank == d_src
        degrees[n] = (d_src, d_tgt, ok)
    return InvarianceReport(is_quasi_iso=qi, degrees=degrees)


def _require_unit_first(e: ExtComplex):
    if not is_unit_like(e.first):
        raise PreconditionError("cup products are implemented for the unit first argument")


def cup_product(
    e_m: ExtComplex,
    e_m2: ExtComplex,
    e_t: ExtComplex,
    a: int,
    u: Sequence,
    b: int,
    v: Sequence,
    alpha,
) -> Tuple:
    """The интерполated product of a degree-a and a degree-b element, landing
    in the cone for the componentwise tensor target.

    With theta = (1-alpha) f + alpha g acting on the left and the mirrored
    combination on the right, the chain-map law d(u.v) = du.v + (-1)^a u.dv
    holds identically; a property test pins it.
    """
    _require_unit_first(e_m)
    _require_unit_first(e_m2)
    _require_unit_first(e_t)
    alpha = Fraction(alpha)
    m, m2 = e_m.second, e_m2.second
    t_rig = tensor(m.rig.complex, m2.rig.complex)
    t_k = tensor(m.k, m2.k)
    t_dr = tensor(m.dr.carrier, m2.dr.carrier)
    if e_t.second.rig.complex.dims != t_rig.complex.dims:
        raise ValidationError("target cone is not the tensor of the factors")
    u1, u0 = e_m.split(a, u)
    v1, v0 = e_m2.split(b, v)
    fu = e_m.f_map.component(a).apply(u0)
    gu = e_m.g_map.component(a).apply(u0)
    fv = e_m2.f_map.component(b).apply(v0)
    gv = e_m2.g_map.component(b).apply(v0)
    theta_u = tuple(x * (1 - alpha) + y * alpha for x, y in zip(fu, gu))
    theta_v = tuple(x * alpha + y * (1 - alpha) for x, y in zip(fv, gv))
    w0 = _bullet(e_m, a, u0, e_m2, b, v0, e_t, t_rig, t_k, t_dr)
    sign = ONE if a % 2 == 0 else -ONE
    part1 = _boxtimes(e_m, a, theta_u, e_m2, b - 1, v1, e_t, t_rig, t_k)
    part2 = _boxtimes(e_m, a - 1, u1, e_m2, b, theta_v, e_t, t_rig, t_k)
    w1 = tuple(sign * x + y for x, y in zip(part1, part2))
    return e_t.join(a + b, w1, w0)


def _slice0(e: ExtComplex, n: int, vec: Sequence):
    """(rig part, k part, filtered part in ambient dR coordinates)."""
    o_a, o_b, o_c = e.slot0_offsets(n)
    x0 = tuple(vec[o_a : o_a + e.second.rig.complex.dim(n)])
    xk = tuple(vec[o_b : o_b + e.second.k.dim(n)])
    csize = e.h_ff.complex.dim(n)
    xc = tuple(vec[o_c : o_c + csize])
    if csize:
        xdr = e.h_ff.bases[n].apply(xc)
    else:
        xdr = tuple([ZERO] * e.second.dr.carrier.dim(n))
    return x0, xk, xdr


def _slice1(e: ExtComplex, n: int, vec: Sequence):
    o_d, o_e, o_f = e.slot1_offsets(n)
    z0 = tuple(vec[o_d : o_d + e.second.rig.complex.dim(n)])
    zk = tuple(vec[o_e : o_e + e.second.k.dim(n)])
    zf = tuple(vec[o_f : o_f + e.second.k.dim(n)])
    return z0, zk, zf


def _bullet(e_m, a, u0, e_m2, b, v0, e_t, t_rig, t_k, t_dr) -> Tuple:
    x0, xk, xdr = _slice0(e_m, a, u0)
    y0, yk, ydr = _slice0(e_m2, b, v0)
    n = a + b
    out = [ZERO] * e_t.gamma0.dim(n)
    o_a, o_b, o_c = e_t.slot0_offsets(n)
    if x0 and y0 and t_rig.complex.dim(n):
        for pos, val in enumerate(t_rig.pure_tensor(a, x0, b, y0)):
            out[o_a + pos] += val
    if xk and yk and t_k.complex.dim(n):
        for pos, val in enumerate(t_k.pure_tensor(a, xk, b, yk)):
            out[o_b + pos] += val
    if any(x != 0 for x in xdr) and any(y != 0 for y in ydr) and t_dr.complex.dim(n):
        amb = t_dr.pure_tensor(a, xdr, b, ydr)
        basis = e_t.h_ff.bases.get(n)
        if basis is None:
            raise ValidationError("tensor of filtered elements escapes the compatible subcomplex")
        coords = basis.solve(amb)
        if coords is None:
            raise ValidationError("tensor of filtered elements escapes the compatible subcomplex")
        for pos, val in enumerate(coords):
            out[o_c + pos] += val
    return tuple(out)


def _boxtimes(e_m, a, z, e_m2, b, w, e_t, t_rig, t_k) -> Tuple:
    n = a + b
    out = [ZERO] * e_t.gamma1.dim(n)
    if not z or not w or e_t.gamma1.dim(n) == 0:
        return tuple(out)
    z0, zk, zf = _slice1(e_m, a, z)
    w0, wk, wf = _slice1(e_m2, b, w)
    o_d, o_e, o_f = e_t.slot1_offsets(n)
    if z0 and w0 and t_rig.complex.dim(n):
        for pos, val in enumerate(t_rig.pure_tensor(a, z0, b, w0)):
            out[o_d + pos] += val
    if zk and wk and t_k.complex.dim(n):
        for pos, val in enumerate(t_k.pure_tensor(a, zk, b, wk)):
            out[o_e + pos] += val
    if zf and wf and t_k.complex.dim(n):
        for pos, val in enumerate(t_k.pure_tensor(a, zf, b, wf)):
            out[o_f + pos] += val
    return tuple(out)


def unit_class(e: ExtComplex) -> Tuple:
    """The identity element of H^0 for the unit pair."""
    _require_unit_first(e)
    if not is_unit_like(e.second):
        raise PreconditionError("unit class lives in the cone of the unit pair")
    vec = [ZERO] * e.total.dim(0)
    o_a, o_b, o_c = e.slot0_offsets(0)
    k1 = e.gamma1.dim(-1)
    vec[k1 + o_a] = ONE
    vec[k1 + o_b] = ONE
    vec[k1 + o_c] = ONE
    return tuple(vec)
