import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crosspos import stiefel
from crosspos.poly import Poly
from crosspos.polyalg import BilinearForm, sphere_product
from crosspos.stiefel import (I1, I2, I3, I4, I5, J1, J2, J3, J4, J5, J6, J7, MomentKey, holder_check,
                              integrate_exact, l2_norm, l2_norm_sq, l4_norm, mc_integrate, moment2, moment4,
                              probability_bound, sample, sample_batch)


def key_poly(n, text):
    # independent polynomial for a moment key in the 2n variables (x, y)
    p = Poly.constant(2 * n, Fraction(1))
    for kind, i, j in MomentKey.parse(text).factors:
        zij = Poly.variable(2 * n, i) * Poly.variable(2 * n, n + j)
        zji = Poly.variable(2 * n, j) * Poly.variable(2 * n, n + i)
        p = p * (zij if kind == "z" else zij + zji if kind == "v" else zij - zji)
    return p


TABLE = [
    ("z1^2", I1), ("z1*z2", I2), ("z12^2", I3), ("v12^2", I4), ("w12^2", I5),
    ("z1^4", J1), ("z1^3*z2", J2), ("z1^2*z2^2", J3), ("z1^2*z2*z3", J4), ("w12^4", J6),
]


@pytest.mark.parametrize("n", [3, 4, 5, 7])
@pytest.mark.parametrize("text,fn", TABLE)
def test_tables_match_exact_integration(n, text, fn):
    assert integrate_exact(key_poly(n, text), n) == fn(n)


@pytest.mark.parametrize("n", [4, 5, 6])
def test_four_index_tables(n):
    assert integrate_exact(key_poly(n, "z1*z2*z3*z4"), n) == J5(n)
    assert integrate_exact(key_poly(n, "w12^2*w34^2"), n) == J7(n)


def test_tabulated_values():
    assert I1(3) == Fraction(1, 15)
    assert I2(3) == Fraction(-1, 30)
    assert I3(3) == Fraction(2, 15)
    assert J1(3) == Fraction(1, 105)
    assert J6(3) == Fraction(1, 5)
    assert J5(4) == Fraction(1, 9600)
    assert J7(4) == Fraction(1, 90)


def test_moment_lookup():
    assert moment2(3, "z1^2") == Fraction(1, 15)
    assert moment2(3, "z12^2") == Fraction(2, 15)
    assert moment2(3, "z12*z13") == 0
    assert moment4(3, "z1^4") == Fraction(1, 105)
    assert moment4(3, "w12^4") == Fraction(1, 5)
    assert moment4(4, "z1*z2*z3*z4") == Fraction(1, 9600)
    assert moment4(3, "z12^2*z13^2") is None


@pytest.mark.parametrize("text", ["z12*z21", "v12*w12", "z1*z12", "w12*w21", "v13^2", "z23*z32"])
def test_moment2_general_keys(text):
    assert moment2(4, text) == integrate_exact(key_poly(4, text), 4)


@pytest.mark.parametrize("text", ["z1^2*z12*z21", "w12^3*w21", "z1*z2*z12*z21", "w12^2*w13^2", "z1^3*z12"])
def test_moment4_general_keys(text):
    got = moment4(5, text)
    if got is not None:
        assert got == integrate_exact(key_poly(5, text), 5)


def test_moment_key_errors():
    with pytest.raises(ValueError):
        moment2(3, "z14^2")
    with pytest.raises(ValueError):
        MomentKey.parse("q12")
    with pytest.raises(ValueError):
        J5(3)


@pytest.mark.parametrize("n", range(3, 21))
def test_exact_identities(n):
    assert n * I1(n) + n * (n - 1) * I3(n) == 1
    assert I2(n) == -I1(n) / (n - 1)
    assert I4(n) == 2 * (I3(n) + I2(n))
    assert I5(n) == 2 * (I3(n) - I2(n))
    assert J2(n) == -J1(n) / (n - 1)
    if n >= 4:
        assert J7(n) == J6(n) / 6


def test_n4_sum_rule():
    n = 4
    assert 4 * J1(n) + 48 * J2(n) + 36 * J3(n) + 144 * J4(n) + 24 * J5(n) == 0


def test_helper_ratios():
    # int_0^pi sin^k over consecutive powers: A(i, 2) = (i+1)/(i+2)
    for i in range(1, 8):
        assert stiefel.ratio_A(i, 2) == Fraction(i + 1, i + 2)
        assert stiefel.ratio_B(i, 0) == Fraction(1, i + 2)
        assert stiefel.ratio_C(i, 0) == Fraction(3, (i + 2) * (i + 4))


def test_sample_invariants():
    for n in (3, 5, 8):
        for seed in range(5):
            s = sample(n, seed)
            assert abs(np.linalg.norm(s.x) - 1) < 1e-14
            assert abs(np.linalg.norm(s.y) - 1) < 1e-14
            assert abs(s.x @ s.y) < 1e-14


@pytest.mark.parametrize("method", ["gaussian", "givens"])
def test_batch_invariants(method):
    x, y = sample_batch(5, 2000, np.random.default_rng(1), method)
    assert np.abs(np.linalg.norm(x, axis=1) - 1).max() < 1e-13
    assert np.abs(np.linalg.norm(y, axis=1) - 1).max() < 1e-13
    assert np.abs(np.sum(x * y, axis=1)).max() < 1e-13


def test_mc_sphere_product_is_one():
    est, se = mc_integrate(sphere_product(3), 3, 1000, seed=0)
    assert abs(est - 1) < 1e-12 and se < 1e-12


@pytest.mark.parametrize("method", ["gaussian", "givens"])
@pytest.mark.parametrize("text,fn", [("z1^2", I1), ("z1*z2", I2), ("z1^4", J1), ("w12^4", J6)])
def test_mc_agrees_with_tables(method, text, fn):
    est, se = mc_integrate(stiefel.moment_key_fn(text), 3, 200_000, seed=3, method=method)
    assert abs(est - float(fn(3))) < 4 * se


def test_mc_deterministic():
    a = mc_integrate(stiefel.moment_key_fn("z1^2"), 4, 5000, seed=9)
    b = mc_integrate(stiefel.moment_key_fn("z1^2"), 4, 5000, seed=9)
    assert a == b


def test_mc_rejects_few_trials():
    with pytest.raises(ValueError):
        mc_integrate(sphere_product(3), 3, 10, seed=0)


def test_norm_examples():
    E11 = np.zeros((3, 3))
    E11[0, 0] = 1
    assert l2_norm_sq(np.array([[Fraction(int(i == j == 0)) for j in range(3)] for i in range(3)], dtype=object)) \
        == Fraction(1, 15)
    assert abs(l4_norm(E11) ** 4 - 1 / 105) < 1e-15
    W = np.zeros((3, 3))
    W[0, 1], W[1, 0] = 1, -1
    assert abs(l2_norm(W) ** 2 - 1 / 3) < 1e-15
    assert abs(l4_norm(W) ** 4 - 1 / 5) < 1e-15


def test_l4_routes_agree(rng):
    n = 4
    for _ in range(5):
        B = rng.standard_normal((n, n))
        S, K = B + B.T, B - B.T
        for M in (S, K):
            closed = l4_norm(M)
            assert abs(closed ** 4 - float(stiefel.l4_norm4_exact_batch(M))) < 1e-12 * closed ** 4
        poly = Poly(2 * n, {})
        for i in range(n):
            for j in range(n):
                poly = poly + Poly.variable(2 * n, i) * Poly.variable(2 * n, n + j) * float(B[i, j])
        exact = integrate_exact(Poly(2 * n, {e: Fraction(c) for e, c in (poly ** 4).terms.items()}), n)
        assert abs(l4_norm(B) ** 4 - float(exact)) < 1e-10 * float(exact)


def test_l2_orthogonal_decomposition(rng):
    B = rng.standard_normal((5, 5))
    g = BilinearForm(5, B)
    total = float(l2_norm_sq(g))
    parts = float(l2_norm_sq(g.sym())) + float(l2_norm_sq(g.skew()))
    assert abs(total - parts) < 1e-12


def test_l2_batch_matches_table(rng):
    B = rng.standard_normal((10, 4, 4))
    ref = np.array([float(l2_norm_sq(b)) for b in B])
    assert np.abs(stiefel.l2_norm_sq_batch(B) - ref).max() < 1e-12


def test_holder_witnesses():
    for n in range(3, 9):
        E11 = np.zeros((n, n))
        E11[0, 0] = 1
        r, bound, ok = holder_check(E11)
        assert abs(r - stiefel.sym_witness_ratio(n)) < 1e-12 and ok and bound == math.sqrt(3)
        W = np.zeros((n, n))
        W[0, 1], W[1, 0] = 1, -1
        r, bound, ok = holder_check(W)
        assert abs(r - stiefel.skew_witness_ratio(n)) < 1e-12 and ok and bound == 6 ** 0.25
    assert abs(stiefel.sym_witness_ratio(3) - (15 / 7) ** 0.25) < 1e-15
    assert abs(stiefel.skew_witness_ratio(3) - (9 / 5) ** 0.25) < 1e-15


def test_holder_zero_form_rejected():
    with pytest.raises(ValueError):
        holder_check(np.eye(3))


@pytest.mark.parametrize("cls", ["sym", "skew", "general"])
def test_holder_batch_bound(cls, rng):
    for n in (3, 4, 5):
        B = rng.standard_normal((500, n, n))
        if cls == "sym":
            B = B + np.swapaxes(B, 1, 2)
        elif cls == "skew":
            B = B - np.swapaxes(B, 1, 2)
        r = stiefel.holder_batch(B, cls)
        assert np.all(np.isfinite(r))
        assert r.max() <= stiefel.HOLDER_BOUNDS[cls] + 1e-9


def test_skew_pairs_odd_n(rng):
    B = rng.standard_normal((5, 5))
    K = B - B.T
    a = stiefel.skew_canonical_pairs(K)
    assert len(a) == 2
    assert abs(2 * np.sum(a ** 2) - np.sum(K ** 2)) < 1e-10


def test_dimensions_and_bound():
    assert (stiefel.dim_D_M(3), stiefel.dim_D_U(3)) == (26, 8)
    assert stiefel.dim_D_M(4) == 83
    pb = [probability_bound(n) for n in range(3, 51)]
    assert all(a.base > b.base for a, b in zip(pb, pb[1:]))
    # base drops below 1 only for very large n, after which the bound tends to 0
    big = [probability_bound(n) for n in (200_000, 400_000, 800_000)]
    assert all(b.base < 1 for b in big)
    assert big[0].log10_bound > big[1].log10_bound > big[2].log10_bound


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=9, max_size=9))
def test_property_holder_general(vals):
    B = np.array(vals).reshape(3, 3)
    if float(l2_norm_sq(B)) < 1e-8:
        return
    r, bound, ok = holder_check(B)
    assert ok


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 31), st.integers(3, 7))
def test_property_sample_on_T(seed, n):
    s = sample(n, seed)
    assert abs(s.x @ s.y) < 1e-14 and abs(np.linalg.norm(s.y) - 1) < 1e-14
