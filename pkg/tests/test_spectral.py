import random

import pytest

from phodge.complexes import Complex
from phodge.errors import ValidationError
from phodge.filtered import is_strict_complex, graded
from phodge.linalg import Matrix
from phodge.spectral import (
    DoubleComplex,
    convergence_check,
    degenerates_at_e1,
    filtration_pages,
    pages,
    simplicial_collapse,
    total_complex,
)

from helpers import rand_complex, rand_double_complex, rand_filtered_complex

I1 = Matrix.identity(1)


def test_double_complex_validation():
    with pytest.raises(ValidationError):
        DoubleComplex(
            {(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): 1},
            {(0, 0): I1, (0, 1): I1},
            {(0, 0): I1, (1, 0): I1},  # commutes instead of anticommuting
        )


def test_total_single_row():
    dc = DoubleComplex({(0, 0): 1, (1, 0): 1}, {(0, 0): I1}, {})
    t, _ = total_complex(dc)
    assert t.dims == {0: 1, 1: 1} and t.cohomology_dims() == {}


def test_total_square_acyclic():
    dc = DoubleComplex(
        {(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): 1},
        {(0, 0): I1, (0, 1): I1},
        {(0, 0): I1, (1, 0): -I1},
    )
    t, _ = total_complex(dc)
    assert t.is_acyclic()


def test_total_one_edge_square():
    dc = DoubleComplex({(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): 1}, {(0, 0): I1}, {})
    t, _ = total_complex(dc)
    assert list(t.cohomology_dims().values()) == [1, 1]


def test_first_page_is_row_cohomology_single_row():
    dc = DoubleComplex({(0, 0): 1, (1, 0): 1}, {(0, 0): I1}, {})
    pgs = pages(dc, "row")
    # row filtration: E_1 entries are horizontal cohomology
    assert pgs[0].dims_table() == {}


def test_nonzero_d2_exemplar(corpus):
    dc = corpus("d2page.dcomplex")
    pgs = pages(dc, "col")
    e2, e3 = pgs[1], pgs[2]
    assert e2.dims_table() == {(0, 1): 1, (2, 0): 1}
    assert not e2.differentials[(0, 1)].is_zero()
    assert e3.dims_table() == {}
    t, _ = total_complex(dc)
    assert t.cohomology_dims() == {}


def test_convergence_random_both_directions():
    rng = random.Random(81)
    for _ in range(25):
        dc = rand_double_complex(rng, p_count=3, q_lo=0, q_hi=2, max_dim=3)
        assert convergence_check(dc, "col")
        assert convergence_check(dc, "row")


def test_filtration_pages_match_graded_and_strictness():
    rng = random.Random(82)
    for _ in range(25):
        fc = rand_filtered_complex(rng)
        pgs = filtration_pages(fc)
        g = graded(fc)
        for (p, q), entry in pgs[0].entries.items():
            expect = g[p].complex.cohomology(p + q).dim if p in g else 0
            assert entry.dim == expect
        assert degenerates_at_e1(fc) == is_strict_complex(fc)


def test_simplicial_collapse_levels():
    c2 = Complex({0: 2, 1: 2}, {0: Matrix.from_rows([[0, 1], [0, 0]])})
    for n in (0, 2, 4):
        assert simplicial_collapse(Complex.single(0), n).passed
        assert simplicial_collapse(c2, n).passed
    with pytest.raises(ValidationError):
        simplicial_collapse(c2, 3)


def test_simplicial_collapse_random():
    rng = random.Random(83)
    for _ in range(6):
        c = rand_complex(rng, lo=0, hi=2, max_dim=2)
        for n in (0, 2, 4):
            assert simplicial_collapse(c, n).passed
