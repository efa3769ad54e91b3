import json
from fractions import Fraction

import numpy as np
import pytest

from ddl.constructions import build_g1, build_g_ell, build_lambda, lift_linear_valued
from ddl.cube import EXACT, FLOAT, FOURIER, CubeMatrix, ValueTable, fourier
from ddl.krawtchouk import ProfileSpace, ProfileTable
from ddl.lp import (
    GENERAL,
    LINEAR,
    LINEAR_VALUED,
    Config,
    Instance,
    classify_general,
    classify_linear,
    dense_au_matrix_action,
    valid_mask,
    verify_dual,
    verify_dual_linear_valued,
    verify_eigen_condition,
)
from ddl.oracle import max_code_size, max_linear_code_size


def M(*rows):
    return CubeMatrix.from_rows(list(rows))


def test_instance_validation():
    with pytest.raises(ValueError):
        Instance(4, 5)
    with pytest.raises(ValueError):
        Instance(4, 2, 0)
    with pytest.raises(ValueError):
        Instance(4, 2, 1, "other")


def test_classify_general_examples():
    assert classify_general(CubeMatrix.zeros(2, 4), 2) is Config.VALID
    assert classify_general(M("1000", "0000"), 2) is Config.FORBIDDEN
    assert classify_general(M("1100", "0011"), 2) is Config.VALID


def test_classify_linear_examples():
    assert classify_linear(M("1110", "0000"), 3) is Config.VALID
    assert classify_linear(M("1100", "0110"), 3) is Config.FORBIDDEN
    X = M("11100", "01110")
    assert classify_general(X, 3) is Config.VALID
    assert classify_linear(X, 3) is Config.FORBIDDEN


@pytest.mark.parametrize("ell,n,d", [(1, 5, 2), (2, 3, 2), (2, 4, 3), (3, 2, 2)])
def test_masks_match_classifiers(ell, n, d):
    gen = valid_mask(Instance(n, d, ell, GENERAL))
    lin = valid_mask(Instance(n, d, ell, LINEAR))
    for idx in range(1 << (ell * n)):
        X = CubeMatrix.from_index(idx, ell, n)
        assert gen[idx] == (classify_general(X, d) is Config.VALID)
        assert lin[idx] == (classify_linear(X, d) is Config.VALID)
        # linear-forbidden is a superset of general-forbidden
        if not gen[idx]:
            assert not lin[idx]
        rank_one = all(r in (0, X.rows[0]) for r in X.rows)
        if rank_one:
            assert gen[idx] == lin[idx]


def test_au_examples():
    n = 4
    f = ValueTable.from_values(list(range(16)), side=FOURIER)
    A = dense_au_matrix_action(f, 1, 1, n)
    for x in range(16):
        assert A[x] == sum(f[x ^ (1 << j)] for j in range(n))
    ell, n = 2, 3
    delta = ValueTable.delta(ell * n, side=FOURIER)
    for u in (1, 2, 3):
        out = dense_au_matrix_action(delta, u, ell, n)
        ones = {sum(1 << (i * n + j) for i in range(ell) if (u >> i) & 1) for j in range(n)}
        assert {k for k in range(len(out)) if out[k] != 0} == ones
        assert all(out[k] == 1 for k in ones)
    rng = np.random.default_rng(1)
    g = ValueTable.from_values(rng.integers(-9, 10, 64).tolist(), side=FOURIER)
    assert sum(dense_au_matrix_action(g, 3, 2, 3).to_fractions()) == n * sum(g.to_fractions())
    with pytest.raises(ValueError):
        dense_au_matrix_action(g, 0, 2, 3)


@pytest.mark.parametrize("ell,n", [(1, 4), (2, 3)])
def test_au_is_convolution_with_linear_krawtchouk(ell, n):
    # A^u f = F[n - 2|u^T X|] *_F f
    from ddl.cube import convolve, span_weight_array

    rng = np.random.default_rng(n)
    f = ValueTable.from_values(rng.integers(-5, 6, 1 << (ell * n)).tolist(), side=FOURIER)
    for u in range(1, 1 << ell):
        kern = ValueTable.from_values((n - 2 * span_weight_array(ell, n, u)).tolist())
        assert dense_au_matrix_action(f, u, ell, n).equals(convolve(fourier(kern), f))


def test_verify_dual_examples():
    inst = Instance(3, 2, 2)
    rep = verify_dual(ValueTable.delta(6), inst)
    assert rep.feasible and rep.value == 64 and rep.violations == []
    rep = verify_dual(ValueTable.constant(1, 6), inst)
    assert not rep.feasible and rep.value is None
    assert {v.constraint for v in rep.violations} == {"nonpositive_on_valid"}
    c = build_g1(6, 3)
    rep = verify_dual(c.g, Instance(6, 3))
    assert rep.feasible and rep.value == c.claimed_value
    assert rep.value >= max_code_size(6, 3).size


def test_verify_dual_reports_worst_witness():
    c = build_g1(6, 3)
    data = c.g.data.copy()
    data[0b000111] = abs(data[0b000111]) + 5 * c.g.den
    data[0b011111] = abs(data[0b011111]) + c.g.den
    bad = ValueTable(6, data, EXACT, c.g.side, c.g.den)
    rep = verify_dual(bad, Instance(6, 3))
    v = [v for v in rep.violations if v.constraint == "nonpositive_on_valid"][0]
    assert v.witness == str(CubeMatrix.from_index(0b000111, 1, 6))


def test_verify_dual_float_mode():
    c = build_g1(8, 3)
    rep = verify_dual(c.g.astype(FLOAT), Instance(8, 3))
    assert rep.feasible and rep.mode == FLOAT
    assert abs(rep.value - float(c.claimed_value)) < 1e-9 * float(c.claimed_value)
    assert "residual_fourier_nonnegative" in rep.extra


def test_verify_dual_profile_agrees_with_dense():
    for n, d in [(4, 2), (5, 2), (6, 3), (8, 3)]:
        c = build_g_ell(n, d, 2)
        a, b = verify_dual(c.g, c.inst), verify_dual(c.dense(), c.inst)
        assert a.feasible == b.feasible and a.value == b.value
        assert a.checked_domain == "profile" and b.checked_domain == "dense"


def test_report_json_roundtrip():
    rep = verify_dual(ValueTable.constant(1, 4), Instance(2, 2, 2))
    doc = json.loads(json.dumps(rep.to_json()))
    assert doc["feasible"] is False
    assert doc["violations"][0]["magnitude"] == {"num": "1", "den": "1"}


def test_linear_valued_examples():
    inst = Instance(4, 2, 2, LINEAR_VALUED)
    rep = verify_dual_linear_valued(ValueTable.constant(1, 8), inst)
    assert not rep.feasible and "rank_one_bound" in {v.constraint for v in rep.violations}
    g = ValueTable.constant(1, 8) + ValueTable.delta(8)
    rep = verify_dual_linear_valued(g, inst)
    assert "fourier_origin_one" in {v.constraint for v in rep.violations}
    g1 = build_g1(4, 2).g
    c = lift_linear_valued(g1, 2, 2)
    rep = verify_dual_linear_valued(c.g, inst)
    assert rep.feasible and rep.value == c.claimed_value == g1[0] / fourier(g1)[0]


def test_eigen_condition_examples():
    lam = build_lambda(6, 3, 1)
    sp = ProfileSpace(1, 6)
    rep = verify_eigen_condition(lam.hat_profile(sp), Instance(6, 3), shift=3, power=2, threshold=25)
    assert rep.feasible and rep.value >= 25
    delta = ProfileTable.from_function(sp, lambda a: int(a == (6, 0)), side=FOURIER)
    rep = verify_eigen_condition(delta, Instance(6, 3), threshold=1)
    assert not rep.feasible
    lam8 = build_lambda(8, 3, 1)
    sp2 = ProfileSpace(2, 8)
    inst = Instance(8, 3, 2)
    hat2 = lam8.hat_profile(sp2)
    rep = verify_eigen_condition(hat2, inst, threshold=8 - 2 * 2, us=[3])
    assert not rep.feasible
    assert rep.violations[0].witness == "profile" + str((8, 0, 0, 0))
    assert verify_eigen_condition(hat2, inst, threshold=4, us=[1, 2]).feasible


@pytest.mark.parametrize("n", range(2, 9))
def test_weak_duality_grid(n):
    for d in range(2, min(4, n - 1) + 1):
        a = max_code_size(n, d).size
        c = build_g1(n, d)
        rep = verify_dual(c.g, Instance(n, d))
        assert rep.feasible and rep.value >= a
        c2 = build_g_ell(n, d, 2)
        rep2 = verify_dual(c2.dense(), c2.inst)
        assert rep2.feasible
        assert float(rep2.value) ** 0.5 >= a
        lv = lift_linear_valued(c.g, 2, d)
        rep3 = verify_dual_linear_valued(lv.g, Instance(n, d, 2, LINEAR_VALUED))
        assert rep3.feasible and rep3.value >= max_linear_code_size(n, d).size
