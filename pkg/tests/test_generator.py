import math
from fractions import Fraction

import numpy as np
import pytest

from crosspos import certify
from crosspos.fixtures import example_seed_pairs
from crosspos.generator import (SPAN_TOL, DegenerateDataError, SegreData, build_f, build_h_forms, excluded_span,
                                generate, h_squares_biform, is_minimal_degree, quadratic_to_biform,
                                sample_orthogonal_pairs, segre_codim, segre_degree, segre_dim, tangent_kernels,
                                z_points)


@pytest.fixture(scope="module")
def generated():
    out = generate(3, seed=7)
    assert out.success
    return out


def test_constants():
    assert (segre_degree(3), segre_dim(3), segre_codim(3)) == (6, 3, 4)
    assert (segre_degree(4), segre_dim(4), segre_codim(4)) == (20, 5, 9)
    for n in range(3, 11):
        assert not is_minimal_degree(n)
        assert segre_degree(n) > 1 + segre_codim(n)
    assert is_minimal_degree(2)


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_jacobian_rank_at_e1e2(n):
    segre = SegreData.from_n(n)
    z = np.zeros(n * n)
    z[segre.zindex(0, 1)] = 1.0
    assert np.linalg.matrix_rank(segre.jacobian(z)) == (n - 1) ** 2 + 1
    assert np.abs(segre.evaluate(z)).max() == 0


def test_exact_pairs_orthogonal():
    for x, y in sample_orthogonal_pairs(4, 10, seed=1, exact=True):
        assert sum(a * b for a, b in zip(x, y)) == 0
        assert any(v != 0 for v in y)


def test_z_points_on_variety():
    segre = SegreData.from_n(3)
    Z = z_points(sample_orthogonal_pairs(3, 6, seed=2))
    for z in Z:
        assert np.abs(segre.evaluate(z)).max() < 1e-14


@pytest.mark.parametrize("n", [3, 4])
def test_h_forms(n):
    segre = SegreData.from_n(n)
    Z = z_points(sample_orthogonal_pairs(n, segre.e + 1, seed=3))
    H = build_h_forms(Z, 4)
    assert H.shape == (segre.d + 1, n * n)
    assert np.abs(H @ H.T - np.eye(segre.d + 1)).max() < 1e-12
    assert np.abs(H[1:] @ Z.T).max() < 1e-12
    assert np.abs(H[0] @ Z[: segre.e].T).max() < 1e-12
    assert abs(H[0] @ Z[-1]) > 1e-6


@pytest.mark.parametrize("n", [3, 4])
def test_tangent_kernels(n):
    segre = SegreData.from_n(n)
    Z = z_points(sample_orthogonal_pairs(n, segre.e, seed=5))
    Ws = tangent_kernels(Z, segre)
    for z, W in zip(Z, Ws):
        assert W.shape == (2 * n - 2, n * n)
        # moving along a tangent vector leaves the generators at second order
        for w in W:
            t = 1e-4
            assert np.abs(segre.evaluate(z + t * w)).max() < 10 * t * t


def test_wrong_point_count():
    with pytest.raises(ValueError):
        build_h_forms(np.zeros((3, 9)))


def test_f_vanishes_to_second_order(generated):
    e = SegreData.from_n(3).e
    V = generated.v.reshape(9, 9)
    for z, W in zip(generated.z_points[:e], generated.tangent_bases):
        assert abs(z @ V @ z) < 1e-12
        assert np.abs(W @ V @ z).max() < 1e-12
    for x, y in generated.seeds[:e]:
        assert abs(generated.f(x, y)) < 1e-12


def test_f_outside_excluded_span(generated):
    U = excluded_span(SegreData.from_n(3), generated.h_forms)
    v = generated.v
    assert abs(np.linalg.norm(v) - 1) < 1e-12
    assert np.linalg.norm(v - U @ (U.T @ v)) >= SPAN_TOL


def test_biform_matches_quadratic(generated):
    rng = np.random.default_rng(0)
    V = generated.v.reshape(9, 9)
    for _ in range(10):
        x, y = rng.standard_normal(3), rng.standard_normal(3)
        z = np.kron(x, y)
        assert abs(generated.f(x, y) - z @ V @ z) < 1e-12
        assert abs(generated.h_sq(x, y) - np.sum((generated.h_forms @ z) ** 2)) < 1e-12


def test_h_squares_vanish_on_seeds(generated):
    e = SegreData.from_n(3).e
    for x, y in generated.seeds[:e]:
        assert abs(generated.h_sq(x, y)) < 1e-12
    assert certify.certify_sos_mod_I(generated.h_sq).status == "sos"


def test_not_sos_at_delta_and_smaller(generated):
    for delta in (generated.delta, generated.delta / 10):
        F = generated.f * delta + generated.h_sq
        assert certify.certify_sos_mod_I(F).status == "not_sos"


def test_psatz_certificate_valid(generated):
    err, e1, e2, anc = certify.verify_psatz_certificate(generated.F, generated.psatz)
    assert err < 1e-7 and e1 >= -1e-8 and e2 >= -1e-8 and abs(anc - 1) < 1e-6
    assert generated.psatz.delta == generated.delta


def test_attempt_log(generated):
    assert generated.attempts and all(set(a) == {"d", "delta", "status"} for a in generated.attempts)
    assert {"d": 1, "delta": generated.delta, "status": "nonneg"} in generated.attempts


def test_example_seeds_exact():
    pairs = example_seed_pairs(exact=True)
    assert len(pairs) == 5
    for x, y in pairs:
        assert all(isinstance(v, Fraction) for v in list(x) + list(y))
        assert sum(a * b for a, b in zip(x, y)) == 0


def test_generate_from_example_seeds():
    out = generate(3, seed=0, seeds=example_seed_pairs())
    assert out.success
    assert out.delta >= 1e-6
    assert np.abs(out.h_forms[1:] @ out.z_points.T).max() < 1e-12


def test_seed_validation():
    pairs = example_seed_pairs()
    with pytest.raises(ValueError):
        generate(3, seeds=pairs[:4])
    bad = [(x, x) for x, _ in pairs]
    with pytest.raises(ValueError):
        generate(3, seeds=bad)
    with pytest.raises(ValueError):
        generate(2)


def test_verifier_rejection():
    with pytest.raises(DegenerateDataError):
        generate(3, seed=1, verifier=lambda Z, H: False, max_retries=3)
    with pytest.raises(DegenerateDataError):
        generate(3, seeds=example_seed_pairs(), verifier=lambda Z, H: False)


def test_deterministic():
    a, b = generate(3, seed=11), generate(3, seed=11)
    assert a.status == b.status and a.delta == b.delta
    assert a.F == b.F


def test_n4_dimensions():
    segre = SegreData.from_n(4)
    assert len(segre.minors) == math.comb(4, 2) ** 2
    Z = z_points(sample_orthogonal_pairs(4, segre.e + 1, seed=8))
    H = build_h_forms(Z, 8)
    W = tangent_kernels(Z[: segre.e], segre)
    v, V = build_f(Z, W, H, 8)
    assert V.shape == (16, 16) and np.abs(V - V.T).max() == 0
    f = quadratic_to_biform(V, 4)
    for (x, y), Wi, z in zip(sample_orthogonal_pairs(4, segre.e + 1, seed=8), W, Z):
        assert abs(f(x, y)) < 1e-12
        assert np.abs(Wi @ V @ z).max() < 1e-12
    assert h_squares_biform(H, 4).n == 4
