from fractions import Fraction

import numpy as np
import pytest

from ddl.constructions import (
    FIRST_LP,
    ConstructionError,
    build_g1,
    build_g_ell,
    build_lambda,
    build_phi_general,
    build_phi_linear,
    choose_epsilon,
    choose_m,
    counterexample_au,
    fourier_slack,
    ghat_closed_form,
    ghat_closed_form_table,
    lift_linear_valued,
    search_problem1,
    slack_constant,
)
from ddl.cube import FLOAT, FOURIER, CubeMatrix, ValueTable, fourier, tensor
from ddl.krawtchouk import ProfileSpace
from ddl.lp import LINEAR, Instance, dense_au_matrix_action, valid_mask, verify_dual, verify_problem1


def test_choose_epsilon_examples():
    eps = choose_epsilon(8, 4, 2, 8)
    assert eps == Fraction(1, 16)
    assert (4 + 2 * eps) ** 2 - 16 >= 1
    with pytest.raises(ValueError):
        choose_epsilon(4, 4, 2)
    with pytest.raises(ValueError):
        choose_epsilon(8, 4, 3)


@pytest.mark.parametrize("a,m,D", [(3, 2, 64), (5, 4, 200), (2, 6, 50)])
def test_choose_epsilon_is_minimal(a, m, D):
    eps = choose_epsilon(a + 1, 1, m, D)
    assert (a + 2 * eps) ** m - a**m >= 1
    assert (2 * eps).denominator <= D
    for q in range(1, D + 1):
        for p in range(1, 2 * q):
            t = Fraction(p, q)
            if t < 2 * eps:
                assert (a + t) ** m - a**m < 1


def test_choose_m_examples():
    assert choose_m(2, Fraction(1, 3)) == 2
    assert choose_m(3, Fraction(1, 3), LINEAR) == 2
    assert choose_m(1, Fraction(1, 10)) == 2
    assert choose_m(5, Fraction(1, 10)) == 10
    m = choose_m(5, Fraction(1, 10))
    assert Fraction(11, 9) ** m >= 5 > Fraction(11, 9) ** (m - 2)


def test_lambda_examples():
    lam = build_lambda(6, 3, 1)
    assert lam.r == 1
    assert lam.hat[:3] == (1, Fraction(1, 3), 0)
    assert lam.support_size == 7
    for n, d in [(9, 4), (12, 3), (14, 7)]:
        lam = build_lambda(n, d, 1)
        assert lam.hat[0] == 1
        assert all(h == 0 for h in lam.hat[lam.r + 1 :])
        assert all(h > 0 for h in lam.hat[: lam.r + 1])


@pytest.mark.parametrize("n,d,eps", [(6, 3, 1), (9, 4, Fraction(1, 3)), (10, 2, Fraction(3, 2))])
def test_lambda_is_transform_of_primal(n, d, eps):
    lam = build_lambda(n, d, eps)
    assert fourier(lam.primal_table()).equals(lam.hat_table())


def test_lambda_rejects_bad_eps():
    with pytest.raises(ValueError):
        build_lambda(6, 3, 3)
    with pytest.raises(ValueError):
        build_lambda(6, 3, 0)


def test_g1_examples():
    c = build_g1(6, 3)
    assert c.construction == FIRST_LP
    lam = c.extra["lambda"]
    assert c.g[0] == 2 * 3 * lam.primal(0) ** 2
    for x in range(64):
        if x.bit_count() >= 3:
            assert c.g[x] <= 0
    assert c.claimed_value <= c.extra["norm_bound"] <= 3 * lam.support_size
    rep = verify_dual(c.g, c.inst)
    assert rep.feasible and rep.value == c.claimed_value


def test_phi_general_examples():
    phi = build_phi_general(4, 2, 1, 2)
    assert phi(CubeMatrix.zeros(1, 4)) == 32
    assert phi(CubeMatrix.from_rows(["1100"])) == 0
    phi2 = build_phi_general(4, 2, 2, 2)
    table = phi2.dense_table()
    ok = valid_mask(Instance(4, 2, 2))
    ok[0] = False
    assert table[0] > 0 and all(table[k] <= 0 for k in np.flatnonzero(ok))


def test_phi_linear_examples():
    phi = build_phi_linear(5, 2, 2, 2)
    assert phi(CubeMatrix.zeros(2, 5)) > 0
    table = phi.dense_table()
    ok = valid_mask(Instance(5, 2, 2, LINEAR))
    ok[0] = False
    assert all(table[k] <= 0 for k in np.flatnonzero(ok))
    X = CubeMatrix.from_rows(["11100", "00000"])
    factors = phi.factors(phi.weights_of(X))
    assert sum(1 for _, v in factors if v <= 0) == 1


@pytest.mark.parametrize("ell,n", [(2, 4), (3, 3)])
def test_phi_profile_matches_matrix_evaluation(ell, n):
    sp = ProfileSpace(ell, n)
    for kind in ("general", "linear"):
        phi = build_phi_general(n, 2, ell, 2) if kind == "general" else build_phi_linear(n, 2, ell, 2)
        dense = phi.dense_table()
        for idx in range(0, 1 << (ell * n), 7):
            assert dense[idx] == phi(CubeMatrix.from_index(idx, ell, n))


def test_g_ell_examples():
    c = build_g_ell(6, 3, 2)
    rep = verify_dual(c.dense(), c.inst)
    assert rep.feasible
    assert float(rep.value) ** 0.5 >= 8
    s = fourier_slack(c)
    assert s.holds and s.constant == 2


def test_g_ell_single_level_sign_structure():
    c = build_g_ell(6, 3, 1)
    g = c.dense()
    assert g[0] > 0
    assert all(g[x] <= 0 for x in range(64) if x.bit_count() >= 3)
    assert verify_dual(g, c.inst).feasible


def test_slack_constants():
    assert [slack_constant(l) for l in (1, 2, 3, 4)] == [1, 2, 2**3 * 3, 2**6 * 3**4 * 4]


def test_slack_dense_matches_profile():
    c = build_g_ell(5, 2, 2)
    a, b = fourier_slack(c, "profile"), fourier_slack(c, "dense")
    assert a.holds and b.holds and a.min_slack == b.min_slack


def test_slack_survives_larger_eps():
    base = choose_epsilon(6, 3, 2)
    for k in (2, 3, 4):
        c = build_g_ell(6, 3, 2, eps=base * k)
        assert verify_dual(c.g, c.inst).feasible
        assert fourier_slack(c).holds


def _permute_columns(idx, ell, n, perm):
    X = CubeMatrix.from_index(idx, ell, n)
    rows = tuple(sum(((r >> perm[j]) & 1) << j for j in range(n)) for r in X.rows)
    return CubeMatrix(rows, n).index


def test_column_symmetry_sampled():
    rng = np.random.default_rng(3)
    for ell, n, d in [(2, 5, 2), (2, 6, 3), (3, 4, 2)]:
        g = build_g_ell(n, d, ell).dense()
        for _ in range(10):
            perm = rng.permutation(n)
            for idx in rng.integers(0, 1 << (ell * n), 50):
                assert g[int(idx)] == g[_permute_columns(int(idx), ell, n, perm)]


def test_hierarchy_three_levels_float():
    c = build_g_ell(5, 2, 3, mode=FLOAT)
    rep = verify_dual(c.dense(), c.inst)
    assert rep.feasible and rep.mode == FLOAT


def test_lift_examples():
    g1 = build_g1(4, 2).g
    c = lift_linear_valued(g1, 2, 2)
    g1n = g1 * (1 / fourier(g1)[0])
    assert c.g[0] == g1n[0]
    for idx in range(256):
        X = CubeMatrix.from_index(idx, 2, 4)
        a, b = X.rows
        if a and b and a != b:
            assert c.g[idx] == 1


def test_rank_one_factorisation_is_unique():
    ell, n = 2, 4
    seen = {}
    for u in range(1, 1 << ell):
        for x in range(1, 1 << n):
            idx = sum(x << (i * n) for i in range(ell) if (u >> i) & 1)
            assert idx not in seen
            seen[idx] = (u, x)


def test_lift_requires_feasible_g1():
    with pytest.raises(ConstructionError):
        lift_linear_valued(ValueTable.constant(1, 4), 2, 2)


def test_ghat_closed_form_examples():
    g1 = build_g1(4, 2).g
    g1h = fourier(g1)
    g1h = g1h * (1 / g1h[0])
    assert ghat_closed_form(g1h, CubeMatrix.zeros(2, 4)) == 1
    X = CubeMatrix.from_rows(["1000", "0100"])
    coef = Fraction(1, (1 << 4) * 3)
    expect = coef * sum(g1h[y] for y in (0b0001, 0b0010, 0b0011))
    assert ghat_closed_form(g1h, X) == expect >= 0
    table = ghat_closed_form_table(g1h, 2)
    lifted = lift_linear_valued(g1, 2, 2)
    assert table.equals(fourier(lifted.g))
    for idx in range(0, 256, 5):
        assert table[idx] == ghat_closed_form(g1h, CubeMatrix.from_index(idx, 2, 4))


def test_counterexample_examples():
    r = counterexample_au(8, 3, 2, 0b11)
    assert r.lam_e1 == Fraction(1, 2)
    assert r.lhs == 2 and r.rhs == 4 and r.stated_bound == 2
    assert r.violated and r.bound_holds
    with pytest.raises(ValueError):
        counterexample_au(8, 3, 2, 0b01)
    with pytest.raises(ValueError):
        counterexample_au(6, 3, 2, 0b11)


def test_counterexample_matches_dense_action():
    n, d = 5, 2
    lam = build_lambda(n, d, 1)
    hat = lam.hat_table()
    t = tensor(hat, hat)
    r = counterexample_au(n, d, 2, 0b11)
    assert dense_au_matrix_action(t, 0b11, 2, n)[0] == r.lhs


def test_problem1_lambda_feasible_at_one_level():
    n, d = 6, 3
    m = choose_m(1, Fraction(d, n), LINEAR)
    eps = choose_epsilon(n, d, m)
    lam = build_lambda(n, d, eps)
    sp = ProfileSpace(1, n)
    phi = build_phi_linear(n, d, 1, m).profile_table(sp)
    rep = verify_problem1(lam.hat_profile(sp), phi, Instance(n, d, 1, LINEAR))
    assert rep.feasible and rep.value == lam.support_size
    dense = verify_problem1(lam.hat_table(), phi.to_dense(), Instance(n, d, 1, LINEAR))
    assert dense.feasible and dense.value == rep.value


def test_problem1_search_is_flagged_uncertified():
    res = search_problem1(4, 2, 2, iterations=30, max_shells=2)
    assert res.certified is False
    assert res.gamma_hat.side == FOURIER
