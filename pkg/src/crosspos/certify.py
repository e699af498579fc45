"""Certificates for biforms on V(I), the orthogonal pairs (x, y).

* :func:`certify_sos_mod_I` decides complete cross-positivity: is p a sum of
  squares of bilinear forms plus a multiple of x^T y?  A negative answer comes
  with a verified separating functional (a moment functional L with PSD moment
  matrix, L vanishing on the ideal, L(p) < 0).
* :func:`certify_psatz` searches for sigma_1 f - sigma_2 - lambda x^T y = 0
  with sigma_1, sigma_2 sums of squares and sigma_1(anchor) = 1, which proves
  f >= 0 on V(I).
* :func:`falsify_cross_positivity` looks for a point of T with p < 0.

Every certificate returned is re-checked by an independent coefficientwise
reconstruction; solver output is never trusted on its own.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Optional, Tuple

import numpy as np
import scipy.sparse as sp

from . import sdp
from .poly import Poly, bimonomials
from .polyalg import BiformQuad, BilinearForm, canonical_quads, quad_index, sphere_product
from .stiefel import moment2, MomentKey, sample_batch

RESIDUAL_TOL = 1e-8
EIG_FLOOR = -1e-8
RECON_TOL = 1e-7
NOTSOS_MARGIN = 1e-7
ANCHOR_TOL = 1e-6
MARGIN_SLACK = 1e-6


@dataclass
class Verdict:
    """Outcome of a certification call.

    ``status`` is one of ``sos``, ``not_sos``, ``nonneg``, ``infeasible``,
    ``inconclusive``.
    """

    status: str
    certificate: object = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.status in ("sos", "nonneg", "certified")


@dataclass
class SosCertificateModI:
    """p = b^T gram b + multiplier(x, y) * (x^T y) with b = (x_i y_j) lexicographic."""

    gram: np.ndarray
    multiplier: BilinearForm
    min_eig: float
    residual: float
    margin: float = 0.0

    def to_json(self) -> dict:
        return {"gram": self.gram.tolist(), "multiplier": self.multiplier.to_json(),
                "min_eig": self.min_eig, "residual": self.residual, "margin": self.margin}


@dataclass
class NotSosWitness:
    """Linear functional on biforms: value ``functional[t]`` on the t-th canonical monomial."""

    n: int
    functional: np.ndarray
    value: float
    moment_min_eig: float
    ideal_residual: float

    def __call__(self, p: BiformQuad) -> float:
        return float(self.functional @ p.vector())

    def moment_matrix(self) -> np.ndarray:
        return moment_matrix(self.n, self.functional)

    def to_json(self) -> dict:
        return {"n": self.n, "functional": self.functional.tolist(), "value": self.value,
                "moment_min_eig": self.moment_min_eig, "ideal_residual": self.ideal_residual}


@dataclass
class PsatzCertificate:
    """sigma1 * f - sigma2 - lam * (x^T y) = 0 with Gram matrices over bihomogeneous monomials."""

    n: int
    d: int
    sigma1_gram: np.ndarray
    sigma2_gram: np.ndarray
    lam: np.ndarray
    anchor: Tuple[np.ndarray, np.ndarray]
    delta: Optional[float] = None
    residual: float = 0.0
    min_eigs: Tuple[float, float] = (0.0, 0.0)

    def basis(self, which: int):
        d = self.d
        return {1: bimonomials(self.n, d, d), 2: bimonomials(self.n, d + 1, d + 1),
                3: bimonomials(self.n, 2 * d + 1, 2 * d + 1)}[which]

    def sigma(self, which: int) -> Poly:
        G = self.sigma1_gram if which == 1 else self.sigma2_gram
        return gram_poly(self.basis(which), G, 2 * self.n)

    def to_json(self) -> dict:
        return {"n": self.n, "d": self.d, "sigma1_gram": self.sigma1_gram.tolist(),
                "sigma2_gram": self.sigma2_gram.tolist(), "lambda": self.lam.tolist(),
                "anchor": {"x": self.anchor[0].tolist(), "y": self.anchor[1].tolist()},
                "delta": self.delta, "residual": self.residual, "min_eigs": list(self.min_eigs)}


def gram_poly(basis, G: np.ndarray, nvars: int) -> Poly:
    """The form m^T G m for the monomial vector m given by exponent tuples."""
    terms: Dict[tuple, float] = {}
    for a, ea in enumerate(basis):
        for b, eb in enumerate(basis):
            v = G[a, b]
            if v != 0.0:
                k = tuple(i + j for i, j in zip(ea, eb))
                terms[k] = terms.get(k, 0.0) + float(v)
    return Poly(nvars, terms)


def _xty_poly(n: int) -> Poly:
    return Poly(2 * n, {tuple(1 if t in (i, n + i) else 0 for t in range(2 * n)): 1.0 for i in range(n)})


# --- SOS modulo I --------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _bilinear_gram_rows(n: int) -> np.ndarray:
    """Row (canonical quad) hit by Gram entry (u, v), u = (a, b), v = (c, d): x_a x_c y_b y_d."""
    idx = quad_index(n)
    rows = np.empty((n * n, n * n), dtype=int)
    for a in range(n):
        for b in range(n):
            for c in range(n):
                for d in range(n):
                    rows[a * n + b, c * n + d] = idx[(min(a, c), max(a, c), min(b, d), max(b, d))]
    return rows


@lru_cache(maxsize=None)
def _ideal_rows(n: int) -> np.ndarray:
    """rows[a*n+b, i]: canonical quad of x_a x_i y_b y_i."""
    idx = quad_index(n)
    return np.array([[idx[(min(a, i), max(a, i), min(b, i), max(b, i))] for i in range(n)]
                     for a in range(n) for b in range(n)])


def moment_matrix(n: int, L: np.ndarray) -> np.ndarray:
    return np.asarray(L)[_bilinear_gram_rows(n)]


@lru_cache(maxsize=None)
def sigma_functional(n: int) -> np.ndarray:
    """Integration over T as a functional on canonical monomials."""
    out = np.zeros(len(canonical_quads(n)))
    for t, (i, j, k, l) in enumerate(canonical_quads(n)):
        out[t] = float(moment2(n, MomentKey((("z", i, k), ("z", j, l)))))
    return out


def _sos_primal(p: BiformQuad, ideal: bool, solver: str) -> Tuple[sdp.SdpProblem, int]:
    n = p.n
    N = len(canonical_quads(n))
    m = n * n
    free = (m if ideal else 0) + 1
    bld = sdp.SdpBuilder([("G", m)], free)
    rows = bld.new_rows(p.vector())
    R = _bilinear_gram_rows(n)
    u, v = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
    bld.add_block_terms(rows[R[u, v]], "G", u, v, 1.0)
    if ideal:
        IR = _ideal_rows(n)
        bld.add_free_terms(rows[IR], np.repeat(np.arange(m)[:, None], n, axis=1), 1.0)
    t_index = free - 1
    Q = sphere_product(n).vector()
    nz = np.nonzero(Q)[0]
    bld.add_free_terms(rows[nz], t_index, Q[nz])
    assert len(rows) == N
    return bld.build(maximize=t_index), t_index


def _sos_dual(p: BiformQuad) -> sdp.SdpProblem:
    n = p.n
    N = len(canonical_quads(n))
    m = n * n
    bld = sdp.SdpBuilder([("M", m)], N + 1)
    R = _bilinear_gram_rows(n)
    iu, ju = np.triu_indices(m)
    rows = bld.new_rows(np.zeros(len(iu)))
    bld.add_block_terms(rows, "M", iu, ju, 1.0)
    bld.add_free_terms(rows, R[iu, ju], -1.0)
    IR = _ideal_rows(n)
    rows = bld.new_rows(np.zeros(m))
    bld.add_free_terms(np.repeat(rows[:, None], n, axis=1), IR, 1.0)
    Q = sphere_product(n).vector()
    row = bld.new_rows([1.0])
    nz = np.nonzero(Q)[0]
    bld.add_free_terms(np.repeat(row, len(nz)), nz, Q[nz])
    pv = p.vector()
    row = bld.new_rows([0.0])
    nz = np.nonzero(pv)[0]
    bld.add_free_terms(np.repeat(row, len(nz)), nz, pv[nz])
    bld.add_free_terms(row, N, 1.0)
    return bld.build(maximize=N)


def _functional_constraints(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """K L = rhs encodes L(ideal part) = 0 and L((sum x^2)(sum y^2)) = 1."""
    N = len(canonical_quads(n))
    IR = _ideal_rows(n)
    K = np.zeros((n * n + 1, N))
    for r in range(n * n):
        for c in IR[r]:
            K[r, c] += 1.0
    K[-1] = sphere_product(n).vector()
    rhs = np.zeros(n * n + 1)
    rhs[-1] = 1.0
    return K, rhs


def _complement_basis(n: int) -> np.ndarray:
    """Orthonormal basis of the complement of vec(I_n) in R^{n^2}."""
    v = np.eye(n).ravel() / math.sqrt(n)
    Q, _ = np.linalg.qr(np.column_stack([v, np.eye(n * n)]))
    return Q[:, 1:n * n]


def verify_sos_certificate(p: BiformQuad, gram: np.ndarray, multiplier: BilinearForm) -> Tuple[float, float]:
    """Independent reconstruction: (max coefficient error, min eigenvalue)."""
    n = p.n
    b = [tuple(1 if t in (i, n + j) else 0 for t in range(2 * n)) for i in range(n) for j in range(n)]
    r = BilinearForm(n, np.asarray(multiplier.B, dtype=float))
    recon = gram_poly(b, gram, 2 * n) + r.times_xty().to_poly()
    err = (p.to_float().to_poly() - recon).max_abs()
    return err, sdp.psd_floor(gram)


def verify_not_sos_witness(p: BiformQuad, L: np.ndarray) -> Tuple[float, float, float, float]:
    """(L(p), min eigenvalue of the moment matrix, ideal residual, |L(Q) - 1|)."""
    n = p.n
    K, rhs = _functional_constraints(n)
    res = K @ L - rhs
    return float(L @ p.vector()), sdp.psd_floor(moment_matrix(n, L)), float(np.abs(res[:-1]).max()), abs(float(res[-1]))


def certify_sos_mod_I(p: BiformQuad, tol: float = NOTSOS_MARGIN, ideal: bool = True,
                      solver: str = "CLARABEL") -> Verdict:
    """Decide whether p is a sum of squares of bilinear forms modulo x^T y.

    With ``ideal=False`` the multiplier is forced to zero (global bilinear SOS).
    """
    n = p.n
    if n < 2:
        raise ValueError("n >= 2 required")
    pf = p.to_float()
    prob, t_index = _sos_primal(pf, ideal, solver)
    sol = sdp.solve(prob, solver)
    if sol.status == "optimal":
        t = float(sol.free[t_index])
        gram = sol.blocks["G"] + t * np.eye(n * n)
        r = sol.free[: n * n].reshape(n, n) if ideal else np.zeros((n, n))
        gram, r = _polish_sos(pf, gram, r, ideal)
        err, eig = verify_sos_certificate(pf, gram, BilinearForm(n, r))
        if eig >= EIG_FLOOR and err <= RECON_TOL:
            return Verdict("sos", SosCertificateModI(gram, BilinearForm(n, r), eig, err, t))
    if not ideal:
        return Verdict("inconclusive", detail=f"global bilinear SOS not certified (solver {sol.status})")
    wit = _dual_witness(pf, solver)
    if wit is not None and wit.value <= -tol:
        return Verdict("not_sos", wit)
    detail = f"primal status {sol.status}"
    if wit is not None:
        detail += f", best dual value {wit.value:.3e} above -{tol:g}"
    return Verdict("inconclusive", detail=detail)


def _polish_sos(p: BiformQuad, gram: np.ndarray, r: np.ndarray, ideal: bool,
                rounds: int = 30) -> Tuple[np.ndarray, np.ndarray]:
    """Remove the coefficient residual with a least-norm correction of (gram, r)."""
    n = p.n
    m = n * n
    R = _bilinear_gram_rows(n)
    N = len(canonical_quads(n))
    u, v = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
    A = sp.coo_matrix((np.ones(m * m), (R[u, v].ravel(), (u * m + v).ravel())), shape=(N, m * m))
    parts = [A]
    if ideal:
        IR = _ideal_rows(n)
        parts.append(sp.coo_matrix((np.ones(m * n), (IR.ravel(), np.repeat(np.arange(m), n))), shape=(N, m)))
    A = sp.hstack(parts).tocsr()
    gram = 0.5 * (gram + gram.T)
    # alternate affine correction and PSD clipping; rank-deficient Grams sit on the cone boundary
    floor = 1e-3 * abs(EIG_FLOOR)
    for _ in range(rounds):
        z = np.concatenate([gram.ravel()] + ([r.ravel()] if ideal else []))
        z = z + sdp.min_norm_correction(A, p.vector() - A @ z)
        gram = z[: m * m].reshape(m, m)
        gram = 0.5 * (gram + gram.T)
        if ideal:
            r = z[m * m:].reshape(n, n)
        if sdp.psd_floor(gram) >= 0.5 * EIG_FLOOR:
            break
        gram = sdp.clip_psd(gram - floor * np.eye(m)) + floor * np.eye(m)
    return gram, r


def _dual_witness(p: BiformQuad, solver: str) -> Optional[NotSosWitness]:
    n = p.n
    N = len(canonical_quads(n))
    sol = sdp.solve(_sos_dual(p), solver)
    if sol.status != "optimal":
        return None
    L = np.asarray(sol.free[:N], dtype=float)
    K, rhs = _functional_constraints(n)
    L = L - K.T @ np.linalg.solve(K @ K.T, K @ L - rhs)
    U = _complement_basis(n)
    lam = np.linalg.eigvalsh(U.T @ moment_matrix(n, L) @ U)[0]
    if lam < 0:
        L0 = sigma_functional(n)
        mu = np.linalg.eigvalsh(U.T @ moment_matrix(n, L0) @ U)[0]
        eps = -lam / mu * (1 + 1e-6) + 1e-14
        L = (L + eps * L0) / (1 + eps)
    value, eig, ideal_res, norm_res = verify_not_sos_witness(p, L)
    if eig < EIG_FLOOR or ideal_res > RESIDUAL_TOL or norm_res > RESIDUAL_TOL:
        return None
    return NotSosWitness(n, L, value, eig, ideal_res)


# --- Positivstellensatz ---------------------------------------------------------------------


def _codes(E: np.ndarray, base: int) -> np.ndarray:
    return E @ (base ** np.arange(E.shape[1], dtype=np.int64))


def _is_standard(e, n: int) -> bool:
    """Monomials not divisible by x_n y_n, the leading monomial of x^T y."""
    return e[n - 1] == 0 or e[2 * n - 1] == 0


def _divide_by_xty(n: int, memo: dict, e) -> Tuple[Dict, Dict]:
    """Quotient and remainder of the monomial x^a y^b on division by x^T y (integer coefficients)."""
    if e in memo:
        return memo[e]
    if _is_standard(e, n):
        out = ({}, {e: 1})
    else:
        ep = list(e)
        ep[n - 1] -= 1
        ep[2 * n - 1] -= 1
        q, r = {tuple(ep): 1}, {}
        for i in range(n - 1):
            f = list(ep)
            f[i] += 1
            f[n + i] += 1
            qi, ri = _divide_by_xty(n, memo, tuple(f))
            for k, v in qi.items():
                q[k] = q.get(k, 0) - v
            for k, v in ri.items():
                r[k] = r.get(k, 0) - v
        out = (q, r)
    memo[e] = out
    return out


@dataclass
class _PsatzLayout:
    n: int
    d: int
    E1: np.ndarray
    E2: np.ndarray
    E3: np.ndarray
    ET: np.ndarray
    base: int
    codesT: np.ndarray
    std1: np.ndarray  # positions of standard monomials inside E1
    std2: np.ndarray
    R: sp.csr_matrix  # target coefficients -> remainder on standard target monomials
    Q: sp.csr_matrix  # target coefficients -> quotient over E3
    Gq: np.ndarray  # Gram over standard (d+1, d+1) monomials of (|x|^2 |y|^2)^(d+1) modulo I

    def rows(self, codes: np.ndarray) -> np.ndarray:
        pos = np.searchsorted(self.codesT, codes)
        if np.any(pos >= len(self.codesT)) or np.any(self.codesT[np.minimum(pos, len(self.codesT) - 1)] != codes):
            raise ValueError("monomial outside the target space")
        return pos


def _triplets(trip, shape) -> sp.csr_matrix:
    r, c, v = zip(*trip)
    return sp.csr_matrix((np.array(v, dtype=float), (r, c)), shape=shape)


def _standard_positions(E: np.ndarray, n: int) -> np.ndarray:
    return np.array([t for t, e in enumerate(E) if _is_standard(e, n)], dtype=np.int64)


@lru_cache(maxsize=None)
def _psatz_layout(n: int, d: int) -> _PsatzLayout:
    E1 = np.array(bimonomials(n, d, d), dtype=np.int64)
    E2 = np.array(bimonomials(n, d + 1, d + 1), dtype=np.int64)
    e3 = bimonomials(n, 2 * d + 1, 2 * d + 1)
    E3 = np.array(e3, dtype=np.int64)
    base = 2 * d + 3
    ET = np.array(bimonomials(n, 2 * d + 2, 2 * d + 2), dtype=np.int64)
    ET = ET[np.argsort(_codes(ET, base))]
    std_t = {tuple(e): k for k, e in enumerate(e for e in map(tuple, ET) if _is_standard(e, n))}
    pos3 = {e: k for k, e in enumerate(e3)}
    memo: dict = {}
    rtrip, qtrip = [], []
    for col, e in enumerate(map(tuple, ET)):
        q, r = _divide_by_xty(n, memo, tuple(int(v) for v in e))
        rtrip.extend((std_t[k], col, v) for k, v in r.items() if v)
        qtrip.extend((pos3[k], col, v) for k, v in q.items() if v)
    NT = len(ET)
    R = _triplets(rtrip, (len(std_t), NT))
    Q = _triplets(qtrip, (len(e3), NT))
    std2 = _standard_positions(E2, n)
    return _PsatzLayout(n, d, E1, E2, E3, ET, base, _codes(ET, base),
                        _standard_positions(E1, n), std2, R, Q, _sphere_power_gram(n, E2, std2, memo))


def _multinomial(a) -> int:
    return math.factorial(sum(a)) // math.prod(math.factorial(int(k)) for k in a)


def _sphere_power_gram(n: int, E2: np.ndarray, std2: np.ndarray, memo: dict) -> np.ndarray:
    """(|x|^2 |y|^2)^m = sum_e c_e (x^a y^b)^2; replacing each monomial by its remainder keeps the class mod I."""
    pos = {tuple(E2[k]): t for t, k in enumerate(std2)}
    N = np.zeros((len(E2), len(std2)))
    c = np.zeros(len(E2))
    for r, e in enumerate(map(tuple, E2)):
        c[r] = _multinomial(e[:n]) * _multinomial(e[n:])
        for k, v in _divide_by_xty(n, memo, tuple(int(t) for t in e))[1].items():
            N[r, pos[k]] += v
    return N.T @ (c[:, None] * N)


def _monomial_values(E: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    pt = np.concatenate([x, y])
    return np.prod(pt[None, :] ** E, axis=1)


def _gram_products(c: np.ndarray, lay: _PsatzLayout) -> sp.csr_matrix:
    N = len(c)
    rows = lay.rows((c[:, None] + c[None, :]).ravel())
    return sp.coo_matrix((np.ones(N * N), (rows, np.arange(N * N))), shape=(len(lay.codesT), N * N)).tocsr()


def _psatz_matrices(f: BiformQuad, lay: _PsatzLayout):
    """Sparse maps vec(G1) -> coeff(sigma1 f) and vec(G2) -> coeff(sigma2), Grams over standard monomials."""
    n = lay.n
    NT = len(lay.codesT)
    c1 = _codes(lay.E1[lay.std1], lay.base)
    N1 = len(c1)
    pair1 = (c1[:, None] + c1[None, :]).ravel()
    fexp, fval = [], []
    for (i, j, k, l), c in f.coeffs.items():
        e = np.zeros(2 * n, dtype=np.int64)
        for t in (i, j):
            e[t] += 1
        for t in (k, l):
            e[n + t] += 1
        fexp.append(e)
        fval.append(float(c))
    if fexp:
        fcodes = _codes(np.array(fexp), lay.base)
        rows = lay.rows((pair1[:, None] + fcodes[None, :]).ravel())
        cols = np.repeat(np.arange(N1 * N1), len(fcodes))
        vals = np.tile(np.array(fval), N1 * N1)
        A1 = sp.coo_matrix((vals, (rows, cols)), shape=(NT, N1 * N1)).tocsr()
    else:
        A1 = sp.csr_matrix((NT, N1 * N1))
    A2 = _gram_products(_codes(lay.E2[lay.std2], lay.base), lay)
    return A1, A2


def _check_anchor(anchor, n: int) -> Tuple[np.ndarray, np.ndarray]:
    x0, y0 = (np.asarray(a, dtype=float) for a in anchor)
    if x0.shape != (n,) or y0.shape != (n,):
        raise ValueError("anchor has wrong dimension")
    if abs(np.linalg.norm(x0) - 1) > 1e-12 or abs(np.linalg.norm(y0) - 1) > 1e-12 or abs(x0 @ y0) > 1e-12:
        raise ValueError("anchor must be an orthonormal pair (x0, y0) in V(I)")
    return x0, y0


def random_anchor(n: int, seed: int = 0) -> Tuple[np.ndarray, np.ndarray]:
    x, y = sample_batch(n, 1, np.random.default_rng(seed))
    return x[0], y[0]


def certify_psatz(f: BiformQuad, d: int = 1, anchor=None, tol: float = RECON_TOL,
                  solver: str = "CLARABEL", delta: Optional[float] = None) -> Verdict:
    """Search for a Positivstellensatz certificate of f >= 0 on V(I).

    sigma1 is a Gram form over bidegree (d, d) monomials, sigma2 over
    bidegree (d+1, d+1), lam is a form of bidegree (2d+1, 2d+1).

    Squares only matter modulo I, so both Gram bases are restricted to
    monomials not divisible by x_n y_n and the identity is imposed on
    remainders after division by x^T y.  The solver maximizes a margin t in
    sigma1 f - sigma2 - t (|x|^2 |y|^2)^(d+1) in I, which keeps the SDP
    strictly feasible; t is folded back into sigma2 and the result polished
    when t is not clearly negative (forms with zeros on V(I) have t = 0).  lam is recovered as the
    exact quotient and the full identity is re-verified.
    """
    n = f.n
    if d < 1:
        raise ValueError("d >= 1 required")
    if anchor is None:
        anchor = random_anchor(n)
    x0, y0 = _check_anchor(anchor, n)
    f = f.to_float()
    lay = _psatz_layout(n, d)
    A1, A2 = _psatz_matrices(f, lay)
    N1, N2 = len(lay.std1), len(lay.std2)
    m1 = _monomial_values(lay.E1[lay.std1], x0, y0)
    RA2 = lay.R @ A2
    q = RA2 @ lay.Gq.ravel()
    top = sp.hstack([lay.R @ A1, -RA2, sp.csr_matrix(-q[:, None])])
    bottom = sp.hstack([sp.csr_matrix(np.outer(m1, m1).ravel()[None, :]), sp.csr_matrix((1, N2 * N2 + 1))])
    A = sp.vstack([top, bottom]).tocsr()
    b = np.zeros(A.shape[0])
    b[-1] = 1.0
    prob = sdp.SdpProblem([("sigma1", N1), ("sigma2", N2)], 1, A, b, maximize=0)
    sol = sdp.solve(prob, solver)
    if sol.status != "optimal":
        return Verdict("inconclusive", detail=f"solver {sol.solver}: {sol.detail}")
    t = float(sol.free[0])
    if t < -MARGIN_SLACK:
        return Verdict("infeasible", detail=f"best margin {t:.3e} < 0 at d={d}")
    G1, G2 = sol.blocks["sigma1"], sol.blocks["sigma2"] + t * lay.Gq
    if t < MARGIN_SLACK:
        # margin at the boundary: re-solve the plain feasibility problem for an interior point
        feas = sdp.SdpProblem(prob.blocks, 0, A[:, :-1], b)
        inner = sdp.solve(feas, solver, fallback=False)
        if inner.status == "optimal":
            G1, G2 = inner.blocks["sigma1"], inner.blocks["sigma2"]
    cert = _polish_psatz(lay, A1, A2, G1, G2, (x0, y0))
    if cert is None:
        return Verdict("inconclusive", detail="certificate polishing failed")
    cert.delta = delta
    err, e1, e2, anc = verify_psatz_certificate(f, cert)
    cert.residual, cert.min_eigs = err, (e1, e2)
    if err <= tol and e1 >= EIG_FLOOR and e2 >= EIG_FLOOR and abs(anc - 1) <= ANCHOR_TOL:
        return Verdict("nonneg", cert)
    return Verdict("inconclusive", cert, detail=f"verification failed: residual {err:.2e}, eigs ({e1:.2e}, {e2:.2e})")


def _embed(G: np.ndarray, pos: np.ndarray, size: int) -> np.ndarray:
    out = np.zeros((size, size))
    out[np.ix_(pos, pos)] = G
    return out


def _polish_psatz(lay, A1, A2, G1, G2, anchor, rounds: int = 30) -> Optional[PsatzCertificate]:
    N2 = len(lay.std2)
    G1 = sdp.clip_psd(G1)
    m1 = _monomial_values(lay.E1[lay.std1], *anchor)
    s = float(m1 @ G1 @ m1)
    if not s > 0:
        return None
    G1 = G1 / s
    full1 = A1 @ G1.ravel()
    target = lay.R @ full1
    B = (lay.R @ A2).tocsr()
    z = (0.5 * (G2 + G2.T) / s).ravel()
    floor = 1e-3 * abs(EIG_FLOOR)
    for _ in range(rounds):
        z = z + sdp.min_norm_correction(B, target - B @ z)
        G2 = z.reshape(N2, N2)
        G2 = 0.5 * (G2 + G2.T)
        if sdp.psd_floor(G2) >= 0.5 * EIG_FLOOR:
            break
        z = (sdp.clip_psd(G2 - floor * np.eye(N2)) + floor * np.eye(N2)).ravel()
    lam = lay.Q @ (full1 - A2 @ G2.ravel())
    return PsatzCertificate(lay.n, lay.d, _embed(G1, lay.std1, len(lay.E1)), _embed(G2, lay.std2, len(lay.E2)),
                            np.asarray(lam), anchor)


def verify_psatz_certificate(f: BiformQuad, cert: PsatzCertificate) -> Tuple[float, float, float, float]:
    """(max coefficient of sigma1 f - sigma2 - lam x^T y, min eig sigma1, min eig sigma2, sigma1(anchor))."""
    n = f.n
    s1 = cert.sigma(1)
    s2 = cert.sigma(2)
    lam = Poly(2 * n, {e: float(c) for e, c in zip(cert.basis(3), cert.lam)})
    resid = s1 * f.to_float().to_poly() - s2 - lam * _xty_poly(n)
    anc = float(s1(np.concatenate(cert.anchor)))
    return resid.max_abs(), sdp.psd_floor(cert.sigma1_gram), sdp.psd_floor(cert.sigma2_gram), anc


def bisect_delta(f: BiformQuad, h_sq: BiformQuad, delta_start: float = 1.0, delta_min: float = 1e-6,
                 d_max: int = 3, anchor=None, solver: str = "CLARABEL",
                 log: Optional[list] = None) -> Optional[Tuple[float, PsatzCertificate]]:
    """Largest delta = delta_start * 2^-k >= delta_min with delta f + h_sq certified, trying d = 1, 2, ...

    h_sq must be a sum of squares.  Then a certificate at delta gives one at
    every smaller delta (mix sigma2 with sigma1 h_sq), so the certified
    exponents at fixed d form a tail k >= k*.  k* is located by bisection
    instead of stepping k = 0, 1, 2, ... one at a time.
    """
    if anchor is None:
        anchor = random_anchor(f.n)
    kmax = int(math.floor(math.log2(delta_start / delta_min) + 1e-12)) if delta_start >= delta_min else -1
    if kmax < 0:
        return None
    fl, hl = f.to_float(), h_sq.to_float()
    for d in range(1, d_max + 1):
        found: Dict[int, PsatzCertificate] = {}

        def certified(k: int) -> bool:
            delta = delta_start * 2.0 ** -k
            v = certify_psatz(fl * delta + hl, d, anchor, solver=solver, delta=delta)
            if log is not None:
                log.append({"d": d, "delta": delta, "status": v.status})
            if v.status == "nonneg":
                found[k] = v.certificate
            return v.status == "nonneg"

        if certified(0):
            return delta_start, found[0]
        if kmax == 0 or not certified(kmax):
            continue
        lo, hi = 0, kmax
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if certified(mid):
                hi = mid
            else:
                lo = mid
        return delta_start * 2.0 ** -hi, found[hi]
    return None


# --- falsification ---------------------------------------------------------------------------


@dataclass
class FalsificationWitness:
    x: np.ndarray
    y: np.ndarray
    value: float


def _frame_retract(X: np.ndarray, Y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    X = X / np.linalg.norm(X, axis=1, keepdims=True)
    Y = Y - np.sum(X * Y, axis=1, keepdims=True) * X
    Y = Y / np.linalg.norm(Y, axis=1, keepdims=True)
    return X, Y


def _descend(p: BiformQuad, restarts: int, seed: int, iters: int, stop_below: Optional[float] = None):
    """Batched Riemannian gradient descent of p over T with per-start step control."""
    n = p.n
    T = p.tensor()
    rng = np.random.default_rng(seed)
    X, Y = sample_batch(n, restarts, rng)

    def value_grad(X, Y):
        Tyy = np.einsum("ijkl,sk,sl->sij", T, Y, Y)
        Txx = np.einsum("ijkl,si,sj->skl", T, X, X)
        val = np.einsum("sij,si,sj->s", Tyy, X, X)
        return val, 2 * np.einsum("sij,sj->si", Tyy, X), 2 * np.einsum("skl,sl->sk", Txx, Y)

    eta = np.full(restarts, 1.0 / max(np.abs(T).sum(), 1e-300))
    val, gx, gy = value_grad(X, Y)
    for _ in range(iters):
        xx, xy, yx, yy = (np.sum(a * b, axis=1, keepdims=True) for a, b in ((X, gx), (X, gy), (Y, gx), (Y, gy)))
        sym = 0.5 * (xy + yx)
        rx = gx - X * xx - Y * sym
        ry = gy - X * sym - Y * yy
        Xn, Yn = _frame_retract(X - eta[:, None] * rx, Y - eta[:, None] * ry)
        vn, gxn, gyn = value_grad(Xn, Yn)
        ok = vn <= val
        X[ok], Y[ok], val[ok], gx[ok], gy[ok] = Xn[ok], Yn[ok], vn[ok], gxn[ok], gyn[ok]
        eta = np.where(ok, eta * 1.5, eta * 0.3)
        if stop_below is not None and np.any(val < stop_below):
            break
    return val, X, Y


def minimize_on_T(p: BiformQuad, restarts: int = 200, seed: int = 0, iters: int = 400) -> FalsificationWitness:
    """Best local minimum of p over T found from random starts (an upper bound on the true minimum)."""
    val, X, Y = _descend(p, restarts, seed, iters)
    best = int(np.argmin(val))
    x, y = _frame_retract(X[best:best + 1], Y[best:best + 1])
    return FalsificationWitness(x[0], y[0], float(p.to_float()(x[0], y[0])))


def falsify_cross_positivity(p: BiformQuad, restarts: int = 1000, seed: int = 0, iters: int = 400,
                             value_tol: float = 1e-10) -> Optional[FalsificationWitness]:
    """Search for (x, y) in T with p(x, y) <= -value_tol.

    Returns None when no counterexample is found, which proves nothing.
    """
    if p.n < 2:
        raise ValueError("n >= 2 required")
    val, X, Y = _descend(p, restarts, seed, iters, stop_below=-100 * value_tol)
    best = int(np.argmin(val))
    x, y = _frame_retract(X[best:best + 1], Y[best:best + 1])
    x, y = x[0], y[0]
    v = float(p.to_float()(x, y))
    if v <= -value_tol and abs(x @ y) <= 1e-12:
        return FalsificationWitness(x, y, v)
    return None
