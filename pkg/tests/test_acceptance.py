"""Acceptance criteria 1-7.  Each test records one PASS/FAIL line, shown in the terminal summary."""

import math
import time
from fractions import Fraction

import numpy as np

from crosspos import certify, generator, nsatz3, stiefel
from crosspos.fixtures import block_embedded_map, example_map, example_seed_pairs, reduction_map
from crosspos.poly import Poly
from crosspos.polyalg import (BiformQuad, BilinearForm, SymMapTensor, biform_to_map, build_QA, lie_map,
                              map_to_biform, psi, reduce_mod_ideal, substitute_psi)

from conftest import random_biform, rational_matrix

MOMENTS = {
    "I1": "z1^2", "I2": "z1*z2", "I3": "z12^2", "I4": "v12^2", "I5": "w12^2",
    "J1": "z1^4", "J2": "z1^3*z2", "J3": "z1^2*z2^2", "J4": "z1^2*z2*z3", "J5": "z1*z2*z3*z4",
    "J6": "w12^4", "J7": "w12^2*w34^2",
}


def test_criterion_1_moment_oracle(criterion):
    t0 = time.perf_counter()
    worst, bad = 0.0, []
    for n in (3, 4, 5, 6):
        for k, (name, text) in enumerate(MOMENTS.items()):
            if name in ("J5", "J7") and n < 4:
                continue
            exact = float(getattr(stiefel, name)(n))
            est, se = stiefel.mc_integrate(stiefel.moment_key_fn(text), n, 10 ** 6, seed=1000 * n + k)
            z = abs(est - exact) / se
            worst = max(worst, z)
            if z > 4:
                bad.append(f"{name}(n={n}) off by {z:.2f} stderr")
    for n in range(3, 21):
        if n * stiefel.I1(n) + n * (n - 1) * stiefel.I3(n) != 1:
            bad.append(f"n I1 + n(n-1) I3 != 1 at n={n}")
        if stiefel.I2(n) != -stiefel.I1(n) / (n - 1):
            bad.append(f"I2 != -I1/(n-1) at n={n}")
        if n >= 4 and stiefel.J7(n) != stiefel.J6(n) / 6:
            bad.append(f"J7 != J6/6 at n={n}")
    dt = time.perf_counter() - t0
    ok = not bad and dt < 120
    criterion(1, ok, f"worst MC deviation {worst:.2f} stderr, exact identities n=3..20, {dt:.0f} s"
              + (f"; {bad}" if bad else ""))
    assert ok


def test_criterion_2_reverse_holder(criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    worst = {}
    bad = []
    for cls in ("sym", "skew", "general"):
        for n in range(3, 9):
            B = rng.standard_normal((10 ** 4, n, n))
            if cls == "sym":
                B = B + np.swapaxes(B, 1, 2)
            elif cls == "skew":
                B = B - np.swapaxes(B, 1, 2)
            r = stiefel.holder_batch(B, cls).max()
            worst[cls] = max(worst.get(cls, 0.0), r)
            if not r <= stiefel.HOLDER_BOUNDS[cls] + 1e-9:
                bad.append(f"{cls} n={n} ratio {r:.6f}")
    for n in range(3, 9):
        E11 = np.zeros((n, n))
        E11[0, 0] = 1
        W = np.zeros((n, n))
        W[0, 1], W[1, 0] = 1, -1
        sym = (9 * n * (n + 2) / ((n + 4) * (n + 6))) ** 0.25
        skew = (6 * (n - 1) * n / ((n + 1) * (n + 2))) ** 0.25
        if abs(stiefel.holder_check(E11)[0] - sym) > 1e-12:
            bad.append(f"sym witness n={n}")
        if abs(stiefel.holder_check(W)[0] - skew) > 1e-12:
            bad.append(f"skew witness n={n}")
    dt = time.perf_counter() - t0
    ok = not bad and dt < 300
    criterion(2, ok, "max ratios " + ", ".join(f"{k} {v:.4f}" for k, v in worst.items())
              + f", witnesses to 1e-12, {dt:.0f} s" + (f"; {bad}" if bad else ""))
    assert ok


def test_criterion_3_example_map(criterion):
    t0 = time.perf_counter()
    phi = map_to_biform(example_map())
    v = certify.certify_sos_mod_I(phi)
    notsos_ok = False
    if v.status == "not_sos":
        value, eig, ideal_res, norm_res = certify.verify_not_sos_witness(phi, v.certificate.functional)
        notsos_ok = value <= -1e-7 and eig >= -1e-8 and ideal_res <= 1e-8 and norm_res <= 1e-8
    psatz_d = None
    anchor = certify.random_anchor(3, 0)
    for d in (1, 2):
        pv = certify.certify_psatz(phi, d, anchor)
        if pv.status == "nonneg" and certify.verify_psatz_certificate(phi, pv.certificate)[0] <= 1e-7:
            psatz_d = d
            break
    w = certify.falsify_cross_positivity(phi, restarts=1000, seed=0)
    dt = time.perf_counter() - t0
    margin = v.certificate.margin if v.status == "sos" else None
    ok = notsos_ok and psatz_d is not None and w is None and dt < 180
    criterion(3, ok, f"sos_mod_I={v.status}" + (f" (margin {margin:.6f})" if margin is not None else "")
              + f", psatz nonneg at d={psatz_d}, falsify {'none' if w is None else w.value}, {dt:.0f} s")
    assert ok


def _generator_ok(out):
    if not out.success or out.delta is None or out.delta < 1e-6:
        return False
    err, e1, e2, anc = certify.verify_psatz_certificate(out.F, out.psatz)
    if err > 1e-7 or min(e1, e2) < -1e-8 or abs(anc - 1) > 1e-6:
        return False
    value, eig, ideal_res, norm_res = certify.verify_not_sos_witness(out.F, out.not_sos.functional)
    return value <= -1e-7 and eig >= -1e-8 and ideal_res <= 1e-8 and norm_res <= 1e-8


def test_criterion_4_generator(criterion):
    t0 = time.perf_counter()
    good = [s for s in range(20) if _generator_ok(generator.generate(3, seed=s))]
    from_seeds = _generator_ok(generator.generate(3, seed=0, seeds=example_seed_pairs()))
    dt = time.perf_counter() - t0
    ok = len(good) >= 18 and from_seeds and dt < 600
    criterion(4, ok, f"{len(good)}/20 seeds succeed (failed: {sorted(set(range(20)) - set(good))}), "
              f"example seeds {'succeed' if from_seeds else 'fail'}, {dt:.0f} s")
    assert ok


def test_criterion_5_structural_constants(criterion):
    bad = []
    for n in range(3, 11):
        if (generator.segre_degree(n), generator.segre_dim(n), generator.segre_codim(n)) != \
                (math.comb(2 * n - 2, n - 1), 2 * n - 3, (n - 1) ** 2):
            bad.append(f"constants n={n}")
        if not generator.segre_degree(n) > generator.segre_codim(n) + 1:
            bad.append(f"minimal degree n={n}")
    checked = 0
    for n, seed in ((3, 0), (3, 1), (4, 0)):
        segre = generator.SegreData.from_n(n)
        Z = generator.z_points(generator.sample_orthogonal_pairs(n, segre.e, seed=seed))
        for W in generator.tangent_kernels(Z, segre):
            checked += 1
            if W.shape[0] != segre.d + 1:
                bad.append(f"kernel dim {W.shape[0]} at n={n}")
    if (stiefel.dim_D_M(3), stiefel.dim_D_U(3)) != (26, 8):
        bad.append("D_M/D_U at n=3")
    ok = not bad
    criterion(5, ok, f"n=3..10 constants and inequality, {checked} kernels of dim d+1, "
              f"(D_M, D_U)(3) = ({stiefel.dim_D_M(3)}, {stiefel.dim_D_U(3)})" + (f"; {bad}" if bad else ""))
    assert ok


def test_criterion_6_ideal_algebra(criterion):
    rng = np.random.default_rng(6)
    bad = []
    for _ in range(100):
        C = rational_matrix(rng, 3)
        if not reduce_mod_ideal(map_to_biform(lie_map(C)))[0].is_zero():
            bad.append("lie_map not in ideal")
    for n in (2, 3, 4):
        p = random_biform(rng, n, exact=True)
        A = biform_to_map(p)
        if map_to_biform(A) != p or biform_to_map(map_to_biform(A)) != A:
            bad.append(f"round trip n={n}")
    p = random_biform(rng, 4)
    x = rng.standard_normal((1000, 4))
    al = rng.standard_normal((1000, 3))
    err = float(np.abs(substitute_psi(p)(x, al) - p(x, psi(x, al))).max())
    if err > 1e-10:
        bad.append(f"psi substitution error {err:.2e}")
    p2 = random_biform(rng, 2, exact=True)
    q = substitute_psi(p2)
    x1, x2 = Poly.variable(2, 0), Poly.variable(2, 1)
    target = p2.to_poly().substitute_linear([x1, x2, x2, -x1])
    if {e: c for (e, a, b), c in q.coeffs.items()} != target.terms or any(a or b for (_, a, b) in q.coeffs):
        bad.append("n=2 identity")
    ok = not bad
    criterion(6, ok, f"100 Lie maps reduce to 0, exact round trips, psi error {err:.1e}, n=2 identity"
              + (f"; {bad}" if bad else ""))
    assert ok


def test_criterion_7_nsatz3(criterion):
    bad = []
    tr = SymMapTensor.from_function(3, lambda X: np.trace(X) * np.eye(3))
    found = nsatz3.denominator_power_search(build_QA(substitute_psi(map_to_biform(tr))), N_max=2)
    if found is None:
        bad.append("no N <= 2 for the trace map")
    worst = [0.0, 0.0]
    rng = np.random.default_rng(7)
    inner = [SymMapTensor.from_function(2, lambda X: np.trace(X) * np.eye(2)), reduction_map(2)]
    for _ in range(3):
        p = BiformQuad(2, {})
        for _ in range(3):
            p = p + BilinearForm(2, rng.standard_normal((2, 2))).square()
        inner.append(biform_to_map(p))
    for A2 in inner:
        r = nsatz3.construct_drift_C(block_embedded_map(A2), np.array([1.0, 0, 0]), certify=False).residuals
        worst[0] = max(worst[0], r["B_E11"], r["B_E1i_e1"])
        worst[1] = max(worst[1], r["B_E1i_ej"])
    if worst[0] > 1e-10 or worst[1] > 1e-8:
        bad.append(f"drift residuals {worst}")
    maps = [tr, reduction_map(3), example_map()]
    for _ in range(3):
        p = BiformQuad(3, {})
        for _ in range(3):
            p = p + BilinearForm(3, rng.standard_normal((3, 3))).square()
        maps.append(biform_to_map(p))
    tested = implied = 0
    for A in maps:
        Q = build_QA(substitute_psi(map_to_biform(A)))
        tested += 1
        if nsatz3.denominator_power_search(Q, N_max=2) is not None:
            implied += 1
            if nsatz3.certify_det_nonneg(Q).status != "certified":
                bad.append("denominator certificate without det_nonneg")
    ok = not bad
    criterion(7, ok, f"trace map N = {found[0] if found else None}, drift residuals "
              f"{worst[0]:.1e} / {worst[1]:.1e}, {implied} of {tested} Q have a denominator certificate, each with det_nonneg certified"
              + (f"; {bad}" if bad else ""))
    assert ok
