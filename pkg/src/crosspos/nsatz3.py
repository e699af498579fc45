"""Certificates for 3x3 maps through the 2x2 quartic matrix Q_A(x).

* :func:`check_trace_det` certifies (or refutes) Tr Q > 0 and det Q >= 0 on
  R^3 \\ {0} with scalar SOS programs.
* :func:`denominator_power_search` looks for the smallest N with
  (x1^2 + x2^2 + x3^2)^N Q a sum of matrix squares.
* :func:`construct_drift_C` builds C with A - (CX + XC^T) positive when the
  compression of A(x0 x0^T) to x0^perp vanishes; :func:`singular_decompose`
  turns that into p = (SOS of bilinear forms) + multiplier * (x^T y).
* :func:`unit_sphere_representation` is an experimental, degree-capped
  search for Q = SOS + (1 - |x|^2) H.  It carries no completeness claim.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.optimize import minimize

from . import sdp
from .certify import (EIG_FLOOR, RECON_TOL, SosCertificateModI, Verdict, certify_sos_mod_I,
                      verify_sos_certificate)
from .poly import Exponent, Poly, add_exp, monomials
from .polyalg import (BiformQuad, BilinearForm, MatrixQuarticPoly, SymMapTensor, biform_to_map, lie_map,
                      map_to_biform)

TRACE_EPS_FLOOR = 1e-8
N_MAX = 4
HYPOTHESIS_TOL = 1e-10
ZERO_TOL = 1e-10
MARGIN_SLACK = 1e-6


@dataclass
class TernaryForm:
    """Homogeneous form in (x1, x2, x3); ``coeffs[t]`` belongs to ``monomials(3, degree)[t]``."""

    degree: int
    coeffs: np.ndarray

    @classmethod
    def from_poly(cls, p: Poly) -> "TernaryForm":
        if p.nvars != 3:
            raise ValueError("ternary forms have three variables")
        degs = p.degrees()
        if len(degs) > 1:
            raise ValueError(f"not homogeneous: degrees {sorted(degs)}")
        deg = degs.pop() if degs else 0
        return cls(deg, np.array([float(p.terms.get(e, 0)) for e in monomials(3, deg)]))

    def to_poly(self) -> Poly:
        return Poly(3, dict(zip(monomials(3, self.degree), self.coeffs.tolist())))

    def __call__(self, x) -> np.ndarray:
        return self.to_poly()(np.moveaxis(np.asarray(x, dtype=float), -1, 0))


def sphere_power(nvars: int, k: int) -> Poly:
    """(x_1^2 + ... + x_nvars^2)^k."""
    s = Poly(nvars, {tuple(2 * (i == j) for j in range(nvars)): 1 for i in range(nvars)})
    return s ** k


def _multinomial(a: Sequence[int]) -> int:
    return math.factorial(sum(a)) // math.prod(math.factorial(k) for k in a)


def sphere_power_gram(nvars: int, k: int) -> np.ndarray:
    """Diagonal Gram matrix of (sum x_i^2)^k over ``monomials(nvars, k)``."""
    return np.diag([float(_multinomial(a)) for a in monomials(nvars, k)])


# --- matrix Gram programs -----------------------------------------------------------------


@dataclass
class MatrixSosCertificate:
    """F(x) = (I_k (x) b(x))^T gram (I_k (x) b(x)) with b = ``monomials(nvars, half_degree)``."""

    nvars: int
    half_degree: int
    size: int
    gram: np.ndarray
    residual: float
    min_eig: float

    def basis(self) -> Tuple[Exponent, ...]:
        return monomials(self.nvars, self.half_degree)

    def entry(self, r: int, s: int) -> Poly:
        b = self.basis()
        m = len(b)
        G = self.gram[r * m:(r + 1) * m, s * m:(s + 1) * m]
        out: Dict[Exponent, float] = {}
        for a in range(m):
            for c in range(m):
                if G[a, c] != 0:
                    e = add_exp(b[a], b[c])
                    out[e] = out.get(e, 0.0) + float(G[a, c])
        return Poly(self.nvars, out)

    def to_json(self) -> dict:
        return {"nvars": self.nvars, "half_degree": self.half_degree, "size": self.size,
                "gram": self.gram.tolist(), "residual": self.residual, "min_eig": self.min_eig}


def _gram_rows(nvars: int, half: int, k: int):
    """Equality layout: one row per (r <= s, monomial of degree 2*half); returns (rows, cols, ntargets, index)."""
    b = monomials(nvars, half)
    m = len(b)
    targets = monomials(nvars, 2 * half)
    tidx = {e: t for t, e in enumerate(targets)}
    pairs = [(r, s) for r in range(k) for s in range(r, k)]
    rows, cols = [], []
    for p_i, (r, s) in enumerate(pairs):
        for a in range(m):
            for c in range(m):
                rows.append(p_i * len(targets) + tidx[add_exp(b[a], b[c])])
                cols.append((r * m + a) * (k * m) + s * m + c)
    return np.array(rows), np.array(cols), pairs, targets


def _coeff_vector(F: List[List[Poly]], pairs, targets) -> np.ndarray:
    return np.array([float(F[r][s].terms.get(e, 0)) for r, s in pairs for e in targets])


def matrix_sos(F: List[List[Poly]], half: int, margin: bool = False,
               solver: str = "CLARABEL") -> Tuple[Optional[MatrixSosCertificate], float]:
    """Gram certificate of F - t |x|^(2 half) I_k over ``monomials(nvars, half)``.

    With ``margin`` the solver maximizes t first; a clear positive margin is
    halved to keep the Gram matrix interior, a margin at zero (F with real
    zeros) triggers a plain feasibility re-solve.  Without ``margin``, t = 0.
    Returns (verified certificate or None, t).
    """
    k = len(F)
    nvars = next(p.nvars for row in F for p in row)
    rows, cols, pairs, targets = _gram_rows(nvars, half, k)
    m = len(monomials(nvars, half))
    size = k * m
    A = sp.coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(pairs) * len(targets), size * size)).tocsr()
    rhs = _coeff_vector(F, pairs, targets)
    sphere = sphere_power(nvars, half)
    M = [[sphere if r == s else Poly(nvars) for s in range(k)] for r in range(k)]
    t, start = 0.0, None
    if margin:
        mvec = _coeff_vector(M, pairs, targets)
        prob = sdp.SdpProblem([("G", size)], 1, sp.hstack([A, sp.csr_matrix(mvec[:, None])]), rhs, maximize=0)
        sol = sdp.solve(prob, solver)
        if sol.status != "optimal":
            return None, float("nan")
        t_star = float(sol.free[0])
        if t_star < -MARGIN_SLACK:
            return None, t_star
        if t_star > MARGIN_SLACK:
            t = 0.5 * t_star
            start = sol.blocks["G"] + (t_star - t) * np.kron(np.eye(k), sphere_power_gram(nvars, half))
    if start is None:
        sol = sdp.solve(sdp.SdpProblem([("G", size)], 0, A, rhs), solver, fallback=not margin)
        if sol.status != "optimal":
            return None, t
        start = sol.blocks["G"]
    target = [[F[r][s] - M[r][s] * t for s in range(k)] for r in range(k)]
    return _polish_matrix_sos(target, A, _coeff_vector(target, pairs, targets), start, nvars, half, k), t


def _polish_matrix_sos(target, A, rhs, G, nvars, half, k, rounds: int = 30) -> Optional[MatrixSosCertificate]:
    size = G.shape[0]
    z = (0.5 * (G + G.T)).ravel()
    floor = 1e-3 * abs(EIG_FLOOR)
    for _ in range(rounds):
        z = z + sdp.min_norm_correction(A, rhs - A @ z)
        G = z.reshape(size, size)
        G = 0.5 * (G + G.T)
        if sdp.psd_floor(G) >= 0.5 * EIG_FLOOR:
            break
        z = (sdp.clip_psd(G - floor * np.eye(size)) + floor * np.eye(size)).ravel()
    cert = MatrixSosCertificate(nvars, half, k, G, 0.0, sdp.psd_floor(G))
    cert.residual = max((cert.entry(r, s) - target[r][s]).max_abs() for r in range(k) for s in range(k))
    if cert.residual <= RECON_TOL and cert.min_eig >= EIG_FLOOR:
        return cert
    return None


# --- trace / determinant ------------------------------------------------------------------


def _sphere_points(count: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((count, 3))
    return X / np.linalg.norm(X, axis=1, keepdims=True)


def _min_on_sphere(p: Poly, seed: int = 0, samples: int = 2000, refine: int = 10) -> Tuple[float, np.ndarray]:
    """Approximate minimum of a form on the unit sphere: sampling then local refinement."""
    X = _sphere_points(samples, seed)
    pf = p.to_float()
    vals = pf.evaluate_batch(X)
    best_v, best_x = np.inf, X[0]
    for i in np.argsort(vals)[:refine]:
        res = minimize(lambda u: pf.evaluate_batch((u / np.linalg.norm(u))[None, :])[0], X[i], method="BFGS",
                       options={"gtol": 1e-12})
        u = res.x / np.linalg.norm(res.x)
        v = float(pf.evaluate_batch(u[None, :])[0])
        if v < best_v:
            best_v, best_x = v, u
    return best_v, best_x


@dataclass
class TraceCertificate:
    """Tr Q - eps |x|^4 is the Gram form of ``certificate``."""

    eps: float
    certificate: MatrixSosCertificate

    def to_json(self) -> dict:
        return {"eps": self.eps, "gram": self.certificate.to_json()}


@dataclass
class DetCertificate:
    """|x|^(2N) det Q - eps |x|^(deg + 2N) is the Gram form of ``certificate`` (eps >= 0)."""

    N: int
    eps: float
    certificate: MatrixSosCertificate

    def to_json(self) -> dict:
        return {"N": self.N, "eps": self.eps, "gram": self.certificate.to_json()}


@dataclass
class PointWitness:
    x: np.ndarray
    value: float

    def to_json(self) -> dict:
        return {"x": self.x.tolist(), "value": self.value}


def _check_2x2(Q: MatrixQuarticPoly) -> None:
    if Q.size != 2 or Q.n != 3:
        raise ValueError("Q must be a 2x2 matrix of ternary forms")


def certify_trace_positive(Q: MatrixQuarticPoly, solver: str = "CLARABEL", seed: int = 0) -> Verdict:
    """Tr Q - eps |x|^4 SOS with eps >= TRACE_EPS_FLOOR, or a (near) zero of Tr Q on the sphere."""
    _check_2x2(Q)
    tr = Q.trace().to_float()
    degs = tr.degrees()
    if not tr.terms:
        return Verdict("falsified", PointWitness(np.array([1.0, 0.0, 0.0]), 0.0), "trace is identically zero")
    deg = degs.pop()
    if degs or deg % 2:
        raise ValueError("trace must be a form of even degree")
    cert, eps = matrix_sos([[tr]], deg // 2, True, solver)
    if cert is not None and eps >= TRACE_EPS_FLOOR:
        return Verdict("certified", TraceCertificate(eps, cert))
    v, x = _min_on_sphere(tr, seed)
    if v <= ZERO_TOL:
        return Verdict("falsified", PointWitness(x, v), f"trace {v:.3e} at a point of the sphere")
    return Verdict("inconclusive", detail=f"margin {eps:.3e}, sampled minimum {v:.3e}")


def certify_det_nonneg(Q: MatrixQuarticPoly, N_max: int = N_MAX, solver: str = "CLARABEL",
                       seed: int = 0) -> Verdict:
    """Smallest N <= N_max with |x|^(2N) det Q SOS, or a point with det Q < 0."""
    _check_2x2(Q)
    det = Q.det().to_float()
    if not det.terms:
        return Verdict("certified", DetCertificate(0, 0.0, MatrixSosCertificate(3, 0, 1, np.zeros((1, 1)), 0.0, 0.0)))
    v, x = _min_on_sphere(det, seed)
    scale = max(det.max_abs(), 1.0)
    if v < -ZERO_TOL * scale:
        return Verdict("falsified", PointWitness(x, v), f"det {v:.3e} < 0")
    deg = det.degrees().pop()
    for N in range(N_max + 1):
        F = sphere_power(3, N) * det
        cert, t = matrix_sos([[F]], deg // 2 + N, True, solver)
        if cert is not None:
            return Verdict("certified", DetCertificate(N, t, cert))
    return Verdict("inconclusive", detail=f"no SOS multiplier |x|^(2N) with N <= {N_max}; sampled minimum {v:.3e}")


def check_trace_det(Q: MatrixQuarticPoly, N_max: int = N_MAX, solver: str = "CLARABEL") -> Dict[str, Verdict]:
    """Both conditions of the trace/determinant criterion for a 2x2 quartic Q."""
    return {"trace_positive": certify_trace_positive(Q, solver),
            "det_nonneg": certify_det_nonneg(Q, N_max, solver)}


def denominator_power_search(Q: MatrixQuarticPoly, N_max: int = N_MAX,
                             solver: str = "CLARABEL") -> Optional[Tuple[int, MatrixSosCertificate]]:
    """Smallest N <= N_max with (x1^2 + x2^2 + x3^2)^N Q a sum of matrix squares."""
    _check_2x2(Q)
    degs = set().union(*(q.degrees() for row in Q.entries for q in row))
    if len(degs) != 1:
        raise ValueError("entries of Q must be forms of one common even degree")
    deg = degs.pop()
    if deg % 2:
        raise ValueError("entries of Q must have even degree")
    for N in range(N_max + 1):
        s = sphere_power(3, N)
        F = [[(s * q).to_float() for q in row] for row in Q.entries]
        cert, _ = matrix_sos(F, deg // 2 + N, False, solver)
        if cert is not None:
            return N, cert
    return None


def unit_sphere_representation(Q: MatrixQuarticPoly, deg_cap: int = 3,
                               solver: str = "CLARABEL") -> Verdict:
    """Experimental: Q = S + (1 - |x|^2) H with S a matrix SOS of degree <= 2 deg_cap.

    Inhomogeneous search over monomials of degree <= deg_cap.  Failure says
    nothing about existence at higher degree.
    """
    _check_2x2(Q)
    if deg_cap < 2:
        raise ValueError("deg_cap >= 2 required")
    # homogenize with a fourth variable t: S(x, t) and H(x, t) of matching degrees, evaluated at t = 1
    F = [[q.to_float() for q in row] for row in Q.entries]
    deg = 2 * deg_cap
    lift = [[_homogenize(q, deg) for q in row] for row in F]
    t2 = Poly(4, {(0, 0, 0, 2): 1.0})
    s = Poly(4, {(2, 0, 0, 0): 1.0, (0, 2, 0, 0): 1.0, (0, 0, 2, 0): 1.0})
    rows, cols, pairs, targets = _gram_rows(4, deg_cap, 2)
    m = len(monomials(4, deg_cap))
    size = 2 * m
    A_g = sp.coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(pairs) * len(targets), size * size))
    hmon = monomials(4, deg - 2)
    tidx = {e: t for t, e in enumerate(targets)}
    r2, c2, v2 = [], [], []
    base = t2 - s
    for p_i in range(len(pairs)):
        for h_i, he in enumerate(hmon):
            for e, c in base.terms.items():
                r2.append(p_i * len(targets) + tidx[add_exp(he, e)])
                c2.append(p_i * len(hmon) + h_i)
                v2.append(-c)
    A_h = sp.coo_matrix((v2, (r2, c2)), shape=(len(pairs) * len(targets), len(pairs) * len(hmon)))
    A = sp.hstack([A_g, A_h]).tocsr()
    rhs = _coeff_vector(lift, pairs, targets)
    sol = sdp.solve(sdp.SdpProblem([("G", size)], len(pairs) * len(hmon), A, rhs), solver)
    if sol.status != "optimal":
        return Verdict("inconclusive", detail=f"solver status {sol.status} at deg_cap {deg_cap}")
    z = np.concatenate([sol.blocks["G"].ravel(), sol.free])
    z = z + sdp.min_norm_correction(A, rhs - A @ z)
    G = z[: size * size].reshape(size, size)
    eig = sdp.psd_floor(G)
    res = float(np.abs(A @ z - rhs).max())
    if eig >= EIG_FLOOR and res <= RECON_TOL:
        return Verdict("certified", MatrixSosCertificate(4, deg_cap, 2, 0.5 * (G + G.T), res, eig),
                       detail="representation in homogenized variables (x, t) at t = 1")
    return Verdict("inconclusive", detail=f"residual {res:.2e}, min eigenvalue {eig:.2e} at deg_cap {deg_cap}")


def _homogenize(q: Poly, deg: int) -> Poly:
    """Lift a form in x to degree ``deg`` in (x, t): multiply by t^(deg - deg q)."""
    out = {}
    for e, c in q.terms.items():
        k = deg - sum(e)
        if k < 0 or k % 2:
            raise ValueError("degree cap too small for Q")
        out[tuple(e) + (k,)] = c
    return Poly(4, out)


# --- drift matrix -------------------------------------------------------------------------


@dataclass
class DriftDecomposition:
    """A = B + (X -> CX + XC^T) with B positive when the compression of A(x0 x0^T) to x0-perp vanishes.

    ``g`` is the orthogonal conjugation sending x0 to a multiple of e1 and
    ``B_normalized`` = g . B; the residuals are measured on it.
    """

    C: np.ndarray
    B: SymMapTensor
    g: np.ndarray
    B_normalized: SymMapTensor
    residuals: Dict[str, float]
    positivity_cert: Optional[SosCertificateModI] = None
    positivity_verdict: str = "not_run"

    def to_json(self) -> dict:
        return {"C": self.C.tolist(), "B": self.B.to_json(), "g": self.g.tolist(),
                "residuals": self.residuals, "positivity_verdict": self.positivity_verdict,
                "positivity_cert": self.positivity_cert.to_json() if self.positivity_cert else None}


def householder_to_e1(x0: np.ndarray) -> np.ndarray:
    """Symmetric orthogonal H with H x0 = |x0| e1."""
    x0 = np.asarray(x0, dtype=float)
    n = len(x0)
    u = x0 / np.linalg.norm(x0)
    v = u - np.eye(n)[0]
    if np.linalg.norm(v) < 1e-15:
        return np.eye(n)
    v /= np.linalg.norm(v)
    return np.eye(n) - 2 * np.outer(v, v)


def drift_hypothesis_residual(A: SymMapTensor, x0: np.ndarray) -> float:
    """max |(I - P) A(u u^T) (I - P)| with u = x0/|x0| and P = u u^T."""
    x0 = np.asarray(x0, dtype=float)
    u = x0 / np.linalg.norm(x0)
    P = np.eye(len(u)) - np.outer(u, u)
    return float(np.abs(P @ A.to_float()(np.outer(u, u)) @ P).max())


def _drift_in_e1_frame(A: SymMapTensor) -> np.ndarray:
    n = A.n
    e = np.eye(n)
    M11 = np.asarray(A.image(0, 0), dtype=float)
    a11 = float(M11[0, 0])
    C = np.zeros((n, n))
    C[:, 0] = M11[:, 0] - 0.5 * a11 * e[0]
    for i in range(1, n):
        M = np.asarray(A.image(0, i), dtype=float)
        C[:, i] = M[:, 0] - 0.5 * M[0, 0] * e[0] - 0.5 * a11 * e[i]
    return C


def drift_residuals(Bn: SymMapTensor) -> Dict[str, float]:
    """Zero conditions in the e1 frame: B(E11), B(E1i+Ei1) e1 and B(E1i+Ei1) e_j for i, j >= 2."""
    n = Bn.n
    r1 = float(np.abs(np.asarray(Bn.image(0, 0), dtype=float)).max())
    r2 = max(float(np.abs(np.asarray(Bn.image(0, i), dtype=float)[:, 0]).max()) for i in range(1, n))
    r3 = max(float(np.abs(np.asarray(Bn.image(0, i), dtype=float)[:, 1:]).max()) for i in range(1, n))
    return {"B_E11": r1, "B_E1i_e1": r2, "B_E1i_ej": r3}


def construct_drift_C(A: SymMapTensor, x0, certify: bool = True, solver: str = "CLARABEL") -> DriftDecomposition:
    """C with B = A - (CX + XC^T) satisfying B(E11) = 0 and B(E1i+Ei1) e1 = 0 after moving x0 to e1.

    p_B is then checked to be a sum of squares of bilinear forms (no ideal
    multiplier) when ``certify`` is set.
    """
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (A.n,) or not np.linalg.norm(x0) > 0:
        raise ValueError("x0 must be a nonzero vector of the map's dimension")
    res = drift_hypothesis_residual(A, x0)
    if res > HYPOTHESIS_TOL:
        raise ValueError(f"hypothesis fails: compression of A(x0 x0^T) to x0-perp has entry {res:.3e}")
    H = householder_to_e1(x0)
    An = A.to_float().act(H)  # H is its own inverse
    Cn = _drift_in_e1_frame(An)
    Bn = An - lie_map(Cn)
    C = H @ Cn @ H
    B = A.to_float() - lie_map(C)
    out = DriftDecomposition(C, B, H, Bn, drift_residuals(Bn))
    if certify:
        v = certify_sos_mod_I(map_to_biform(B), ideal=False, solver=solver)
        out.positivity_verdict = v.status
        if v.status == "sos":
            out.positivity_cert = v.certificate
    return out


def _check_zero_configuration(p: BiformQuad, v0, w1, w2, tol: float) -> None:
    v0, w1, w2 = (np.asarray(a, dtype=float) for a in (v0, w1, w2))
    if not np.linalg.norm(v0) > 0:
        raise ValueError("hypothesis fails: v0 is zero")
    scale = np.linalg.norm(v0)
    for name, w in (("w1", w1), ("w2", w2)):
        if abs(v0 @ w) > tol * scale * np.linalg.norm(w):
            raise ValueError(f"hypothesis fails: {name} is not orthogonal to v0")
    if np.linalg.matrix_rank(np.vstack([w1, w2]), tol=1e-10) < 2:
        raise ValueError("hypothesis fails: w1, w2 are linearly dependent")
    pf = p.to_float()
    for name, w in (("w1", w1), ("w2", w2)):
        val = float(pf(v0 / scale, w / np.linalg.norm(w)))
        if abs(val) > tol * max(pf.max_abs(), 1.0):
            raise ValueError(f"hypothesis fails: p(v0, {name}) = {val:.3e} is not zero")


@dataclass
class SingularDecomposition:
    """p = b^T gram b + multiplier * (x^T y), gram PSD over bilinear monomials."""

    sos: SosCertificateModI
    multiplier: BilinearForm
    drift: DriftDecomposition
    residual: float

    def to_json(self) -> dict:
        return {"sos": self.sos.to_json(), "multiplier": self.multiplier.to_json(),
                "drift": self.drift.to_json(), "residual": self.residual}


def singular_decompose(p: BiformQuad, zeros, configuration: str = "x", tol: float = 1e-8,
                       solver: str = "CLARABEL") -> Optional[SingularDecomposition]:
    """Write p >= 0 on V(I) with a one-parameter family of zeros as SOS + multiple of x^T y.

    ``zeros`` = (v0, w1, w2).  With ``configuration="x"`` p(v0, w_j) = 0 and
    w_j ⊥ v0; with ``"y"`` the roles of x and y are swapped, p(w_j, v0) = 0.
    Returns None when the SOS step is numerically inconclusive.
    """
    if p.n != 3:
        raise ValueError("n = 3 required")
    if configuration not in ("x", "y"):
        raise ValueError("configuration must be 'x' or 'y'")
    q = p.to_float() if configuration == "x" else p.to_float().swap()
    v0, w1, w2 = zeros
    _check_zero_configuration(q, v0, w1, w2, tol)
    drift = construct_drift_C(biform_to_map(q), v0, certify=False)
    pB = map_to_biform(drift.B)
    v = certify_sos_mod_I(pB, ideal=False, solver=solver)
    drift.positivity_verdict = v.status
    if v.status != "sos":
        return None
    drift.positivity_cert = v.certificate
    gram = v.certificate.gram
    # p_{L_C}(x, y) = 2 (y^T C x)(x^T y), so the multiplier is x^T (2 C^T) y
    mult = 2 * drift.C.T
    if configuration == "y":
        gram = _swap_gram(gram, 3)
        mult = mult.T
    multiplier = BilinearForm(3, mult)
    err, eig = verify_sos_certificate(p.to_float(), gram, multiplier)
    if err > RECON_TOL or eig < EIG_FLOOR:
        return None
    sos = SosCertificateModI(gram, multiplier, eig, err)
    return SingularDecomposition(sos, multiplier, drift, err)


def _swap_gram(G: np.ndarray, n: int) -> np.ndarray:
    """Reindex a Gram matrix over x_i y_j to the basis with x and y exchanged."""
    perm = np.array([j * n + i for i in range(n) for j in range(n)])
    return G[np.ix_(perm, perm)]
