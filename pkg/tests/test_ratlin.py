"""Exactness and canonicity of the rational linear algebra layer."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multifree.ratlin import (
    EchelonFrame,
    kernel_basis,
    matrix_rank,
    normalize_primitive,
    rref,
    _kernel_basis_exact,
    _kernel_basis_modular,
    _as_fraction_rows,
)


def F(x):
    return Fraction(x)


def test_kernel_identity_is_trivial():
    m = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    assert kernel_basis(m) == []


def test_kernel_zero_matrix_is_standard_basis():
    m = [[0, 0, 0], [0, 0, 0]]
    assert kernel_basis(m) == [
        (F(1), F(0), F(0)),
        (F(0), F(1), F(0)),
        (F(0), F(0), F(1)),
    ]


def test_kernel_single_relation():
    assert kernel_basis([[1, 1]]) == [(F(1), F(-1))]


def test_kernel_annihilation_exact():
    m = [[2, 4, 6], [1, 2, 3], [0, 1, 1]]
    for v in kernel_basis(m):
        for row in m:
            assert sum(a * b for a, b in zip(row, v)) == 0


def test_rref_canonical():
    rows, pivots = rref([[0, 2, 4], [1, 1, 1]])
    assert pivots == [0, 1]
    assert rows == [(F(1), F(0), F(-1)), (F(0), F(1), F(2))]


def test_rank():
    assert matrix_rank([[1, 2], [2, 4]]) == 1
    assert matrix_rank([[1, 2], [0, 1]]) == 2
    assert matrix_rank([[0, 0]], 2) == 0


@st.composite
def small_matrices(draw):
    nrows = draw(st.integers(1, 5))
    ncols = draw(st.integers(1, 5))
    entries = st.fractions(
        min_value=-5, max_value=5, max_denominator=4)
    return [
        [draw(entries) for _ in range(ncols)] for _ in range(nrows)
    ], ncols


@given(small_matrices())
@settings(max_examples=200, deadline=None)
def test_kernel_basis_properties(mn):
    m, ncols = mn
    basis = kernel_basis(m, ncols)
    # annihilated exactly
    for v in basis:
        for row in m:
            assert sum(Fraction(a) * b for a, b in zip(row, v)) == 0
    # correct dimension
    assert len(basis) == ncols - matrix_rank(m, ncols)
    # reduced echelon structure
    leads = []
    for v in basis:
        lead = next(j for j, x in enumerate(v) if x != 0)
        assert v[lead] == 1
        leads.append(lead)
    assert leads == sorted(leads)
    for i, v in enumerate(basis):
        for j, lead in enumerate(leads):
            if i != j:
                assert v[lead] == 0


def test_modular_path_matches_exact_path():
    rng = random.Random(7)
    rows = [[rng.randint(-30, 30) for _ in range(40)] for _ in range(25)]
    exact = _kernel_basis_exact(_as_fraction_rows(rows), 40)
    modular = _kernel_basis_modular(_as_fraction_rows(rows), 40)
    assert modular is not None
    assert modular == exact


def test_modular_path_large_rational_entries():
    rng = random.Random(3)
    base = [[Fraction(rng.randint(-9, 9), rng.randint(1, 7)) for _ in range(12)]
            for _ in range(6)]
    # duplicate rows to force rank deficiency
    rows = base + [[2 * x for x in row] for row in base]
    exact = _kernel_basis_exact(_as_fraction_rows(rows), 12)
    modular = _kernel_basis_modular(_as_fraction_rows(rows), 12)
    assert modular == exact


def test_echelon_frame():
    frame = EchelonFrame(3)
    assert frame.insert([1, 1, 0])
    assert frame.insert([0, 1, 1])
    assert not frame.insert([1, 2, 1])
    assert frame.dim == 2
    assert frame.contains([2, 3, 1])
    assert not frame.contains([0, 0, 1])


def test_normalize_primitive():
    assert normalize_primitive([Fraction(-1), Fraction(1)]) == (1, -1)
    assert normalize_primitive([Fraction(2, 3), Fraction(4, 3)]) == (1, 2)
    with pytest.raises(ValueError):
        normalize_primitive([0, 0])
