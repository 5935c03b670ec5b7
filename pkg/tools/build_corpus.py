"""Regenerate the bundled corpus files.

Run from the repository root:  python tools/build_corpus.py
"""

from __future__ import annotations

import json
import sys
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from phodge import io as pio
from phodge.absolute import DatumFlags, GeometricDatum, PairingData, TraceData
from phodge.complexes import ChainMap, Complex
from phodge.filtered import FilteredComplex, Filtration
from phodge.frames import CoefficientFrame
from phodge.frobenius import FrobeniusComplex
from phodge.linalg import Matrix, Subspace
from phodge.phc import PHodgeComplex, tate_object

OUT = Path(__file__).resolve().parent.parent / "src" / "phodge" / "corpus"
FRAME = CoefficientFrame(p=5)


def write(name: str, payload) -> None:
    (OUT / name).write_text(json.dumps(payload, sort_keys=True, indent=1) + "\n")
    print("wrote", name)


def simple_phc(dims, phi_scalars, jumps):
    c = Complex(dims, {})
    phi = {n: Matrix.diagonal([Fraction(v)] * dims[n]) for n, v in phi_scalars.items()}
    rig = FrobeniusComplex(FRAME, c, phi)
    recs = {n: [(lvl, Subspace.full(dims[n]))] for n, lvl in jumps.items()}
    dr = FilteredComplex(c, Filtration(dims, recs))
    ident = ChainMap.identity(c)
    return PHodgeComplex(FRAME, rig, dr, c, ident, ident)


def line_trace(dim):
    return Matrix(1, dim, [[Fraction(1)] * dim])


def point_datum() -> GeometricDatum:
    m = simple_phc({0: 1}, {0: 1}, {0: 0})
    pairing = PairingData(rig={0: Matrix.identity(1)}, k={0: Matrix.identity(1)}, dr={0: Matrix.identity(1)})
    trace = TraceData(Matrix.identity(1), Matrix.identity(1), Matrix.identity(1))
    return GeometricDatum("point", 0, FRAME, m, m, pairing, trace, DatumFlags(True, True, True))


def p1_datum() -> GeometricDatum:
    m = simple_phc({0: 1, 2: 1}, {0: 1, 2: 5}, {0: 0, 2: 1})
    deg2 = Matrix.from_rows([[1, 1]])
    pairing = PairingData(
        rig={0: Matrix.identity(1), 2: deg2},
        k={0: Matrix.identity(1), 2: deg2},
        dr={0: Matrix.identity(1), 2: deg2},
    )
    trace = TraceData(Matrix.identity(1), Matrix.identity(1), Matrix.identity(1))
    return GeometricDatum("p1", 1, FRAME, m, m, pairing, trace, DatumFlags(True, True, True))


def gm_datum() -> GeometricDatum:
    m = simple_phc({0: 1, 1: 1}, {0: 1, 1: 5}, {0: 0, 1: 1})
    mc = simple_phc({1: 1, 2: 1}, {1: 1, 2: 5}, {1: 0, 2: 1})
    deg1 = Matrix.from_rows([[1]])
    deg2 = Matrix.from_rows([[1, 1]])
    pairing = PairingData(
        rig={1: deg1, 2: deg2}, k={1: deg1, 2: deg2}, dr={1: deg1, 2: deg2}
    )
    trace = TraceData(Matrix.identity(1), Matrix.identity(1), Matrix.identity(1))
    return GeometricDatum("gm", 1, FRAME, m, mc, pairing, trace, DatumFlags(True, True, True))


def elliptic_datum() -> GeometricDatum:
    dims = {0: 1, 1: 2, 2: 1}
    c = Complex(dims, {})
    phi1 = Matrix.from_rows([[0, -5], [1, 1]])  # characteristic polynomial T^2 - T + 5
    rig = FrobeniusComplex(FRAME, c, {0: Matrix.identity(1), 1: phi1, 2: Matrix.identity(1).scale(5)})
    recs = {
        0: [(0, Subspace.full(1))],
        1: [(0, Subspace.full(2)), (1, Subspace.from_vectors([(1, 0)], 2))],
        2: [(1, Subspace.full(1))],
    }
    dr = FilteredComplex(c, Filtration(dims, recs))
    ident = ChainMap.identity(c)
    m = PHodgeComplex(FRAME, rig, dr, c, ident, ident)
    deg1 = Matrix.from_rows([[1, 0, 1, 0], [0, 1, 0, 1]])
    deg2 = Matrix.from_rows([[1, 0, 1, -1, 0, 1]])  # alternating on the middle block
    pairing = PairingData(
        rig={0: Matrix.identity(1), 1: deg1, 2: deg2},
        k={0: Matrix.identity(1), 1: deg1, 2: deg2},
        dr={0: Matrix.identity(1), 1: deg1, 2: deg2},
    )
    trace = TraceData(Matrix.identity(1), Matrix.identity(1), Matrix.identity(1))
    return GeometricDatum("elliptic", 1, FRAME, m, m, pairing, trace, DatumFlags(True, True, True))


def degenerate_datum_payload():
    """A valid datum whose pairing misses the top classes: rejected at the
    duality precondition, not at load."""
    x = p1_datum()
    payload = pio.format_datum(x)
    payload["name"] = "degenerate"
    payload["pairing"]["rig"]["2"] = [["0", "0"]]
    payload["pairing"]["k"]["2"] = [["0", "0"]]
    payload["pairing"]["dr"]["2"] = [["0", "0"]]
    return payload


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    files = []

    for datum in (point_datum(), p1_datum(), gm_datum(), elliptic_datum()):
        name = f"{datum.name}.datum"
        write(name, pio.format_datum(datum))
        files.append(name)

    write("degenerate.datum", degenerate_datum_payload())
    files.append("degenerate.datum")

    for n in (0, 1):
        t = tate_object(FRAME, n)
        payload = pio.format_phc(t)
        payload["kind"] = "phc"
        write(f"tate{n}.phc", payload)
        files.append(f"tate{n}.phc")

    # strict and non-strict filtered exemplars
    strict = FilteredComplex(
        Complex({0: 2}, {}),
        Filtration({0: 2}, {0: [(0, Subspace.full(2)), (1, Subspace.from_vectors([(1, 0)], 2))]}),
    )
    payload = pio.format_filtered(None, strict)
    payload["kind"] = "filtered"
    write("strict.filtered", payload)
    files.append("strict.filtered")

    nonstrict = FilteredComplex(
        Complex({0: 1, 1: 1}, {0: Matrix.identity(1)}),
        Filtration({0: 1, 1: 1}, {0: [(0, Subspace.full(1))], 1: [(1, Subspace.full(1))]}),
    )
    payload = pio.format_filtered(None, nonstrict)
    payload["kind"] = "filtered"
    write("nonstrict.filtered", payload)
    files.append("nonstrict.filtered")

    # double complex with a nonzero second-page differential
    d2 = {
        "kind": "double_complex",
        "spaces": {"0,1": 1, "1,1": 1, "1,0": 1, "2,0": 1},
        "d_h": {"0,1": [["1"]], "1,0": [["1"]]},
        "d_v": {"1,0": [["-1"]]},
    }
    write("d2page.dcomplex", d2)
    files.append("d2page.dcomplex")

    # sites
    write("sierpinski.site", {"kind": "site", "elements": ["c", "o"], "leq": [["c", "o"]], "points": ["c", "o"]})
    files.append("sierpinski.site")
    write(
        "pseudocircle.site",
        {
            "kind": "site",
            "elements": ["a", "b", "c", "d"],
            "leq": [["c", "a"], ["c", "b"], ["d", "a"], ["d", "b"]],
            "points": ["a", "b", "c", "d"],
        },
    )
    files.append("pseudocircle.site")
    sphere_rel = [[c, b] for c in ("c1", "c2") for b in ("b1", "b2")] + [
        [b, a] for b in ("b1", "b2") for a in ("a1", "a2")
    ]
    write(
        "sphere.site",
        {
            "kind": "site",
            "elements": ["a1", "a2", "b1", "b2", "c1", "c2"],
            "leq": sphere_rel,
            "points": ["a1", "a2", "b1", "b2", "c1", "c2"],
        },
    )
    files.append("sphere.site")
    write(
        "sierpinski_nopoints.site",
        {"kind": "site", "elements": ["c", "o"], "leq": [["c", "o"]], "points": ["o"]},
    )
    files.append("sierpinski_nopoints.site")

    write("constK.sheaf", {"kind": "sheaf", "constant": 1})
    files.append("constK.sheaf")
    write("skyscraperC.sheaf", {"kind": "sheaf", "indicator": "c"})
    files.append("skyscraperC.sheaf")

    # proper-map data for the wrong-way maps
    pt = point_datum()
    p1 = p1_datum()
    ell = elliptic_datum()
    ident = {
        "kind": "proper_map",
        "name": "p1_identity",
        "source": pio.format_datum(p1),
        "target": pio.format_datum(p1),
        "pullback": {
            "rig": {"0": [["1"]], "2": [["1"]]},
            "k": {"0": [["1"]], "2": [["1"]]},
            "dr": {"0": [["1"]], "2": [["1"]]},
        },
    }
    write("p1_identity.map", ident)
    files.append("p1_identity.map")
    collapse = {
        "kind": "proper_map",
        "name": "p1_to_point",
        "source": pio.format_datum(p1),
        "target": pio.format_datum(pt),
        "pullback": {"rig": {"0": [["1"]]}, "k": {"0": [["1"]]}, "dr": {"0": [["1"]]}},
    }
    write("p1_to_point.map", collapse)
    files.append("p1_to_point.map")
    doubling = {
        "kind": "proper_map",
        "name": "elliptic_doubling",
        "source": pio.format_datum(ell),
        "target": pio.format_datum(ell),
        "pullback": {
            "rig": {"0": [["1"]], "1": [["2", "0"], ["0", "2"]], "2": [["2"]]},
            "k": {"0": [["1"]], "1": [["2", "0"], ["0", "2"]], "2": [["2"]]},
            "dr": {"0": [["1"]], "1": [["2", "0"], ["0", "2"]], "2": [["2"]]},
        },
    }
    write("elliptic_doubling.map", doubling)
    files.append("elliptic_doubling.map")

    # negative controls for the loader
    bad_dd = {
        "kind": "complex",
        "dims": {"0": 1, "1": 1, "2": 1},
        "d": {"0": [["1"]], "1": [["1"]]},
    }
    write("bad_ddnonzero.complex", bad_dd)
    files.append("bad_ddnonzero.complex")

    bad_square = pio.format_datum(p1)
    bad_square["name"] = "bad_csquare"
    bad_square["pairing"]["k"]["2"] = [["1", "2"]]  # breaks the comparison square
    write("bad_csquare.datum", bad_square)
    files.append("bad_csquare.datum")

    # a nine-node zigzag shaped like the geometric construction
    single = pio.format_complex(FRAME, Complex.single(0))
    ident_map = {"components": {"0": [["1"]]}}
    zig = {
        "kind": "zigzag",
        "frame": pio.format_frame(FRAME),
        "rig_end": {"complex": single, "phi": {"0": [["1"]]}},
        "dr_end": {"complex": single, "filtration": {"0": {"0": [["1"]]}}},
        "middle": [single] * 7,
        "arrows": [
            {"dir": "fwd" if i % 2 == 0 else "bwd", "quasi_iso": i % 2 == 1, **ident_map}
            for i in range(8)
        ],
    }
    write("nine_node.zigzag", zig)
    files.append("nine_node.zigzag")

    write("manifest.json", {"files": sorted(files)})


if __name__ == "__main__":
    main()
