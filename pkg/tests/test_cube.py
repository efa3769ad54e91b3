from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ddl.cube import (
    EXACT,
    FLOAT,
    FOURIER,
    PRIMAL,
    CubeMatrix,
    CubePoint,
    DenseCapError,
    TableMismatchError,
    ValueTable,
    convolve,
    fourier,
    inner,
    inverse_fourier,
    row_combination,
    tensor,
    weight,
)
from ddl.krawtchouk import build_table

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)


@st.composite
def exact_tables(draw, max_dim=6, dim=None):
    dim = draw(st.integers(0, max_dim)) if dim is None else dim
    vals = draw(st.lists(fractions, min_size=1 << dim, max_size=1 << dim))
    return ValueTable.from_values(vals)


@st.composite
def table_pairs(draw, max_dim=6):
    dim = draw(st.integers(0, max_dim))
    return draw(exact_tables(dim=dim)), draw(exact_tables(dim=dim))


def test_weight_examples():
    assert weight(CubePoint(0, 4)) == 0
    assert weight(CubePoint.from_str("1011")) == 3
    assert weight(CubePoint((1 << 7) - 1, 7)) == 7


def test_point_string_roundtrip_and_bounds():
    p = CubePoint.from_str("0110")
    assert str(p) == "0110" and p[1] == 1 and p[0] == 0
    with pytest.raises(ValueError):
        CubePoint(16, 4)


def test_row_combination_examples():
    X = CubeMatrix.from_rows(["1100", "0110"])
    assert row_combination(X, 0) == CubePoint(0, 4)
    assert str(row_combination(X, CubePoint.from_str("11"))) == "1010"
    assert row_combination(X, CubePoint.from_str("10")) == X.row(0)
    with pytest.raises(ValueError):
        row_combination(X, CubePoint.from_str("101"))


def test_matrix_flattening_is_row_major():
    X = CubeMatrix.from_rows(["100", "001"])
    assert X.index == 0b100_001
    assert CubeMatrix.from_index(X.index, 2, 3) == X
    assert X.column_type(0) == 0b01 and X.column_type(2) == 0b10


def test_character_identity_under_flattening():
    # <X, u y^T> = <u^T X, y> for the row-major layout
    ell, n = 2, 3
    for xi in range(1 << (ell * n)):
        X = CubeMatrix.from_index(xi, ell, n)
        for u in range(1, 1 << ell):
            for y in range(1 << n):
                uy = CubeMatrix(tuple(y if (u >> i) & 1 else 0 for i in range(ell)), n)
                lhs = (xi & uy.index).bit_count() & 1
                rhs = (row_combination(X, u).bits & y).bit_count() & 1
                assert lhs == rhs


def test_fourier_examples():
    d0 = ValueTable.delta(2)
    assert fourier(d0).to_fractions() == [Fraction(1, 4)] * 4
    y = 0b101
    chi = ValueTable.from_function(lambda x: (-1) ** ((x & y).bit_count()), 3)
    assert fourier(chi).equals(ValueTable.delta(3, y, side=FOURIER))
    L1 = ValueTable.from_values([0, 1, 1, 0])
    assert fourier(L1).to_fractions() == [Fraction(1, 2), 0, 0, Fraction(-1, 2)]


def test_fourier_sides_flip():
    f = ValueTable.constant(1, 3)
    assert fourier(f).side == FOURIER
    assert fourier(fourier(f)).side == PRIMAL


@settings(max_examples=60, deadline=None)
@given(exact_tables())
def test_involution_exact(f):
    assert (fourier(fourier(f)) * (1 << f.dim)).equals(f)
    assert inverse_fourier(fourier(f)).equals(f)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 10), st.integers(0, 2**31))
def test_involution_float(dim, seed):
    rng = np.random.default_rng(seed)
    f = ValueTable(dim, rng.normal(size=1 << dim), FLOAT)
    back = fourier(fourier(f)).to_float() * (1 << dim)
    assert np.max(np.abs(back - f.data)) <= 1e-12 * max(1.0, np.max(np.abs(f.data)))


@settings(max_examples=60, deadline=None)
@given(table_pairs())
def test_parseval(pair):
    f, g = pair
    assert inner(f, g) == inner(fourier(f), fourier(g))


@settings(max_examples=60, deadline=None)
@given(table_pairs())
def test_convolution_theorem(pair):
    f, g = pair
    assert fourier(f * g).equals(convolve(fourier(f), fourier(g)))
    assert fourier(convolve(f, g)).equals(fourier(f) * fourier(g))


@settings(max_examples=30, deadline=None)
@given(table_pairs(max_dim=5))
def test_direct_convolution_matches_fast(pair):
    f, g = pair
    assert convolve(f, g, "direct").equals(convolve(f, g, "fast"))
    fh, gh = f.with_side(FOURIER), g.with_side(FOURIER)
    assert convolve(fh, gh, "direct").equals(convolve(fh, gh))


def test_convolution_theorem_dim16():
    rng = np.random.default_rng(7)
    f = ValueTable.from_values(rng.integers(-5, 6, 1 << 16).tolist(), dense_cap=16)
    g = ValueTable.from_values(rng.integers(-5, 6, 1 << 16).tolist(), dense_cap=16)
    assert fourier(f * g).equals(convolve(fourier(f), fourier(g)))


def test_convolution_units():
    f = ValueTable.from_values([3, -1, Fraction(1, 2), 7])
    fh = fourier(f)
    assert convolve(fh, ValueTable.delta(2, side=FOURIER)).equals(fh)
    assert convolve(f, ValueTable.delta(2, scale=4)).equals(f)


def test_convolution_mismatch():
    f = ValueTable.constant(1, 2)
    with pytest.raises(TableMismatchError):
        convolve(f, fourier(f))
    with pytest.raises(TableMismatchError):
        convolve(f, f.astype(FLOAT))


def test_tensor_examples():
    f = ValueTable.from_values([1, 2, 3, 4])
    assert tensor(f, ValueTable.constant(1, 0)).equals(f)
    assert tensor(ValueTable.delta(2), ValueTable.delta(3)).equals(ValueTable.delta(5))
    g = ValueTable.from_values([5, 6])
    t = tensor(f, g)
    # x takes the low bits
    assert t[0b1_10] == f[0b10] * g[1]


@settings(max_examples=30, deadline=None)
@given(table_pairs(max_dim=3), exact_tables(max_dim=3))
def test_fourier_of_tensor(pair, h):
    f, _ = pair
    assert fourier(tensor(f, h)).equals(tensor(fourier(f), fourier(h)))


@pytest.mark.parametrize("n", range(1, 13))
def test_level_sets_transform_to_krawtchouk(n):
    K = build_table(n)
    for i in range(n + 1):
        L = ValueTable.from_weights([int(j == i) for j in range(n + 1)], n)
        expect = ValueTable.from_weights([Fraction(K.K[i][j], 1 << n) for j in range(n + 1)], n, side=FOURIER)
        assert fourier(L).equals(expect)


def test_dense_cap(monkeypatch):
    with pytest.raises(DenseCapError):
        ValueTable.zeros(21)
    monkeypatch.setenv("DDL_DENSE_CAP", "3")
    with pytest.raises(DenseCapError):
        ValueTable.zeros(4, FLOAT)
    assert len(ValueTable.zeros(4, FLOAT, dense_cap=4)) == 16


def test_exact_tables_stay_reduced():
    t = ValueTable.from_values([Fraction(1, 2), Fraction(3, 2)])
    assert t.den == 2
    assert (t * 2).den == 1
    assert t.mode == EXACT and isinstance(t.data[0], int)
