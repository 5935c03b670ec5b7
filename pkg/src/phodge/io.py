"""File formats and the corpus workspace.

Everything is JSON with a "kind" discriminator.  Matrices are arrays of rows
of exact scalar strings ("num/den"); extension scalars are coefficient arrays
in the power basis.  Every loaded object passes through the constructors, so
all structural invariants are revalidated on load and failures name the
violated invariant.
"""

from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional

from .absolute import DatumFlags, GeometricDatum, PairingData, ProperMapDatum, TraceData
from .complexes import ChainMap, Complex
from .errors import ValidationError
from .filtered import FilteredComplex, Filtration
from .frames import CoefficientFrame, NumberField
from .frobenius import FrobeniusComplex
from .linalg import Matrix, Subspace
from .godement import FiniteSite, Sheaf, constant_sheaf, indicator_sheaf
from .phc import PHodgeComplex, PHodgeMap, Zigzag
from .spectral import DoubleComplex


def parse_matrix(frame: Optional[CoefficientFrame], data, rows: int, cols: int) -> Matrix:
    if data is None:
        return Matrix.zeros(rows, cols)
    if len(data) != rows or any(len(r) != cols for r in data):
        raise ValidationError(f"matrix data has shape {len(data)}x?, expected {rows}x{cols}")
    if frame is None:
        return Matrix(rows, cols, [[Fraction(x) for x in r] for r in data])
    return Matrix(rows, cols, [[frame.parse_scalar(x) for x in r] for r in data])


def format_matrix(frame: Optional[CoefficientFrame], m: Matrix):
    if frame is None:
        return [[str(x) for x in r] for r in m.entries]
    return [[frame.format_scalar(x) for x in r] for r in m.entries]


def parse_frame(data) -> CoefficientFrame:
    ext = data.get("extension")
    if ext is None:
        return CoefficientFrame(p=int(data["p"]))
    nf = NumberField([Fraction(c) for c in ext["modulus"]])
    sigma = ext.get("sigma")
    return CoefficientFrame(
        p=int(data["p"]),
        extension=nf,
        sigma_generator_image=tuple(Fraction(c) for c in sigma) if sigma else None,
    )


def format_frame(frame: CoefficientFrame):
    if frame.extension is None:
        return {"p": frame.p}
    out = {"p": frame.p, "extension": {"modulus": [str(c) for c in frame.extension.modulus]}}
    if frame.sigma_generator_image is not None:
        out["extension"]["sigma"] = [str(c) for c in frame.sigma_generator_image]
    return out


def parse_complex(frame, data) -> Complex:
    dims = {int(k): int(v) for k, v in data.get("dims", {}).items()}
    d = {}
    for k, mat in data.get("d", {}).items():
        n = int(k)
        d[n] = parse_matrix(frame, mat, dims.get(n + 1, 0), dims.get(n, 0))
    return Complex(dims, d)


def format_complex(frame, c: Complex):
    return {
        "lo": c.lo,
        "hi": c.hi,
        "dims": {str(n): c.dims[n] for n in c.degrees()},
        "d": {str(n): format_matrix(frame, m) for n, m in sorted(c.d.items())},
    }


def parse_chain_map(frame, data, source: Complex, target: Complex) -> ChainMap:
    comps = {}
    for k, mat in data.get("components", {}).items():
        n = int(k)
        comps[n] = parse_matrix(frame, mat, target.dim(n), source.dim(n))
    return ChainMap(source, target, comps)


def format_chain_map(frame, f: ChainMap):
    return {"components": {str(n): format_matrix(frame, m) for n, m in sorted(f.components.items())}}


def parse_filtered(frame, data) -> FilteredComplex:
    carrier = parse_complex(frame, data["complex"])
    records = {}
    for deg, levels in data.get("filtration", {}).items():
        n = int(deg)
        entry = []
        for level, basis in levels.items():
            cols = len(basis[0]) if basis else 0
            m = parse_matrix(frame, basis, carrier.dim(n), cols)
            entry.append((int(level), Subspace(carrier.dim(n), m)))
        records[n] = entry
    return FilteredComplex(carrier, Filtration(dict(carrier.dims), records))


def format_filtered(frame, fc: FilteredComplex):
    filtration = {}
    for n in sorted(fc.carrier.dims):
        entry = {}
        for level, space in fc.filtration.records.get(n, ()):
            entry[str(level)] = format_matrix(frame, space.basis)
        filtration[str(n)] = entry
    return {"complex": format_complex(frame, fc.carrier), "filtration": filtration}


def parse_frobenius(frame, data) -> FrobeniusComplex:
    c = parse_complex(frame, data["complex"])
    phi = {}
    for k, mat in data.get("phi", {}).items():
        n = int(k)
        phi[n] = parse_matrix(frame, mat, c.dim(n), c.dim(n))
    return FrobeniusComplex(frame, c, phi)


def format_frobenius(frame, fc: FrobeniusComplex):
    return {
        "complex": format_complex(frame, fc.complex),
        "phi": {str(n): format_matrix(frame, m) for n, m in sorted(fc.phi.items()) if not m.is_zero()},
    }


def parse_phc(data, frame: Optional[CoefficientFrame] = None) -> PHodgeComplex:
    if frame is None:
        frame = parse_frame(data["frame"])
    rig = parse_frobenius(frame, data["rig"])
    dr = parse_filtered(frame, data["dr"])
    k = parse_complex(frame, data["k"])
    c = parse_chain_map(frame, data["c"], rig.complex, k)
    s = parse_chain_map(frame, data["s"], dr.carrier, k)
    return PHodgeComplex(frame, rig, dr, k, c, s)


def format_phc(m: PHodgeComplex, *, with_frame: bool = True):
    out = {
        "rig": format_frobenius(m.frame, m.rig),
        "dr": format_filtered(m.frame, m.dr),
        "k": format_complex(m.frame, m.k),
        "c": format_chain_map(m.frame, m.c),
        "s": format_chain_map(m.frame, m.s),
    }
    if with_frame:
        out["frame"] = format_frame(m.frame)
    return out


def _parse_degree_matrices(frame, data, shape_of) -> Dict[int, Matrix]:
    out = {}
    for k, mat in data.items():
        n = int(k)
        rows, cols = shape_of(n)
        out[n] = parse_matrix(frame, mat, rows, cols)
    return out


def parse_datum(data) -> GeometricDatum:
    frame = parse_frame(data["frame"])
    rgamma = parse_phc(data["rgamma"], frame)
    rgamma_c = parse_phc(data["rgamma_c"], frame)
    d = int(data["d"])
    from .complexes import tensor

    t_rig = tensor(rgamma.rig.complex, rgamma_c.rig.complex).complex
    t_k = tensor(rgamma.k, rgamma_c.k).complex
    t_dr = tensor(rgamma.dr.carrier, rgamma_c.dr.carrier).complex
    pairing = PairingData(
        rig=_parse_degree_matrices(frame, data["pairing"].get("rig", {}), lambda n: (rgamma_c.rig.complex.dim(n), t_rig.dim(n))),
        k=_parse_degree_matrices(frame, data["pairing"].get("k", {}), lambda n: (rgamma_c.k.dim(n), t_k.dim(n))),
        dr=_parse_degree_matrices(frame, data["pairing"].get("dr", {}), lambda n: (rgamma_c.dr.carrier.dim(n), t_dr.dim(n))),
    )
    top = 2 * d
    trace = TraceData(
        rig=parse_matrix(frame, data["trace"]["rig"], 1, rgamma_c.rig.complex.dim(top)),
        k=parse_matrix(frame, data["trace"]["k"], 1, rgamma_c.k.dim(top)),
        dr=parse_matrix(frame, data["trace"]["dr"], 1, rgamma_c.dr.carrier.dim(top)),
    )
    flags = DatumFlags(
        c_quasi_iso=bool(data["flags"]["c_quasi_iso"]),
        s_quasi_iso=bool(data["flags"]["s_quasi_iso"]),
        phi_invertible=bool(data["flags"]["phi_invertible"]),
    )
    return GeometricDatum(data["name"], d, frame, rgamma, rgamma_c, pairing, trace, flags)


def format_datum(x: GeometricDatum):
    frame = x.frame
    return {
        "kind": "datum",
        "name": x.name,
        "d": x.d,
        "frame": format_frame(frame),
        "rgamma": format_phc(x.rgamma, with_frame=False),
        "rgamma_c": format_phc(x.rgamma_c, with_frame=False),
        "pairing": {
            "rig": {str(n): format_matrix(frame, m) for n, m in sorted(x.pairing.rig.items())},
            "k": {str(n): format_matrix(frame, m) for n, m in sorted(x.pairing.k.items())},
            "dr": {str(n): format_matrix(frame, m) for n, m in sorted(x.pairing.dr.items())},
        },
        "trace": {
            "rig": format_matrix(frame, x.trace.rig),
            "k": format_matrix(frame, x.trace.k),
            "dr": format_matrix(frame, x.trace.dr),
        },
        "flags": {
            "c_quasi_iso": x.flags.c_quasi_iso,
            "s_quasi_iso": x.flags.s_quasi_iso,
            "phi_invertible": x.flags.phi_invertible,
        },
    }


def parse_proper_map(data) -> ProperMapDatum:
    source = parse_datum(data["source"])
    target = parse_datum(data["target"])
    frame = source.frame
    nc_y, nc_x = target.rgamma_c, source.rgamma_c
    pb = data["pullback"]
    f_rig = parse_chain_map(frame, {"components": pb.get("rig", {})}, nc_y.rig.complex, nc_x.rig.complex)
    f_k = parse_chain_map(frame, {"components": pb.get("k", {})}, nc_y.k, nc_x.k)
    f_dr = parse_chain_map(frame, {"components": pb.get("dr", {})}, nc_y.dr.carrier, nc_x.dr.carrier)
    pullback = PHodgeMap(nc_y, nc_x, f_rig, f_k, f_dr)
    return ProperMapDatum(data["name"], source, target, pullback)


def parse_site(data) -> FiniteSite:
    return FiniteSite(data["elements"], [tuple(r) for r in data.get("leq", [])], data.get("points", []))


def format_site(site: FiniteSite):
    return {
        "kind": "site",
        "elements": list(site.elements),
        "leq": [[a, b] for a, b in sorted(site.hasse)],
        "points": list(site.points),
    }


def parse_sheaf(data, site: FiniteSite) -> Sheaf:
    if "constant" in data:
        return constant_sheaf(site, int(data["constant"]))
    if "indicator" in data:
        return indicator_sheaf(site, data["indicator"], int(data.get("dim", 1)))
    values = {k: int(v) for k, v in data.get("values", {}).items()}
    maps = {}
    for entry in data.get("maps", []):
        a, b = entry["from"], entry["to"]
        maps[(a, b)] = parse_matrix(None, entry["matrix"], values.get(b, 0), values.get(a, 0))
    return Sheaf(site, values, maps)


def format_sheaf(f: Sheaf):
    maps = []
    for (a, b) in sorted(f.site.hasse):
        if f.dim(a) and f.dim(b):
            maps.append({"from": a, "to": b, "matrix": format_matrix(None, f.map(a, b))})
    return {"kind": "sheaf", "values": {x: f.dim(x) for x in f.site.elements}, "maps": maps}


def parse_double_complex(data) -> DoubleComplex:
    spaces = {}
    for key, v in data.get("spaces", {}).items():
        p, q = key.split(",")
        spaces[(int(p), int(q))] = int(v)

    def get(d, p, q):
        return d.get(f"{p},{q}")

    dh = {}
    dv = {}
    for key, mat in data.get("d_h", {}).items():
        p, q = (int(t) for t in key.split(","))
        dh[(p, q)] = parse_matrix(None, mat, spaces.get((p + 1, q), 0), spaces.get((p, q), 0))
    for key, mat in data.get("d_v", {}).items():
        p, q = (int(t) for t in key.split(","))
        dv[(p, q)] = parse_matrix(None, mat, spaces.get((p, q + 1), 0), spaces.get((p, q), 0))
    return DoubleComplex(spaces, dh, dv)


def format_double_complex(dc: DoubleComplex):
    return {
        "kind": "double_complex",
        "spaces": {f"{p},{q}": k for (p, q), k in sorted(dc.spaces.items())},
        "d_h": {f"{p},{q}": format_matrix(None, m) for (p, q), m in sorted(dc.dh.items())},
        "d_v": {f"{p},{q}": format_matrix(None, m) for (p, q), m in sorted(dc.dv.items())},
    }


def parse_zigzag(data) -> Zigzag:
    frame = parse_frame(data["frame"])
    rig_end = parse_frobenius(frame, data["rig_end"])
    dr_end = parse_filtered(frame, data["dr_end"])
    middles = [parse_complex(frame, c) for c in data.get("middle", [])]
    nodes = [rig_end] + middles + [dr_end]
    carriers = [rig_end.complex] + middles + [dr_end.carrier]
    arrows = []
    for idx, arr in enumerate(data["arrows"]):
        direction = arr["dir"]
        if direction == "fwd":
            src, tgt = carriers[idx], carriers[idx + 1]
        else:
            src, tgt = carriers[idx + 1], carriers[idx]
        cm = parse_chain_map(frame, arr, src, tgt)
        arrows.append((direction, cm, bool(arr.get("quasi_iso", False))))
    return Zigzag(frame, tuple(nodes), tuple(arrows))


KNOWN_KINDS = ("complex", "filtered", "frobenius", "phc", "datum", "proper_map", "site", "sheaf", "double_complex", "zigzag")


def load_object(path, site: Optional[FiniteSite] = None):
    """Load and validate one corpus object; the kind field dispatches."""
    data = json.loads(Path(path).read_text())
    kind = data.get("kind")
    if kind == "phc":
        return parse_phc(data)
    if kind == "datum":
        return parse_datum(data)
    if kind == "proper_map":
        return parse_proper_map(data)
    if kind == "site":
        return parse_site(data)
    if kind == "sheaf":
        if site is None:
            raise ValidationError("a sheaf file needs a site to live on")
        return parse_sheaf(data, site)
    if kind == "double_complex":
        return parse_double_complex(data)
    if kind == "zigzag":
        return parse_zigzag(data)
    if kind == "complex":
        frame = parse_frame(data["frame"]) if "frame" in data else None
        return parse_complex(frame, data)
    if kind == "filtered":
        frame = parse_frame(data["frame"]) if "frame" in data else None
        return parse_filtered(frame, data)
    raise ValidationError(f"unknown file kind {kind!r}")


def corpus_path(name: str) -> Path:
    base = resources.files("phodge") / "corpus"
    return Path(str(base / name))


def resolve(name: str) -> Path:
    p = Path(name)
    if p.exists():
        return p
    candidate = corpus_path(name)
    if candidate.exists():
        return candidate
    raise ValidationError(f"no such file or corpus entry: {name}")


def corpus_manifest() -> List[str]:
    mpath = corpus_path("manifest.json")
    return json.loads(mpath.read_text())["files"]
