"""Randomized construction of proper cross-positive maps.

Points z = x (x) y with x ^T y = 0 are exactly the rank-one traceless n x n
matrices, i.e. the real points of V(J_n) where J_n is generated by the 2x2
minors of (z_ij) and the trace sum z_ii.  The construction:

1. pick e + 1 orthogonal pairs (e = (n-1)^2) and linear forms h_0..h_d
   (d = 2n - 3) vanishing on them (h_0 only on the first e points);
2. pick a quadratic form f vanishing to second order on V(J_n) at the first
   e points but outside the square of the ideal generated by the h_j;
3. find delta > 0 with F = delta f + sum h_j^2 >= 0 on V(J_n) by halving,
   certified by :func:`crosspos.certify.bisect_delta`.

F is then nonnegative but not a sum of squares modulo the ideal, so
:func:`crosspos.polyalg.biform_to_map` turns it into a proper cross-positive
map.  The intersection-count verification of the h_j is not performed; a
``verifier`` callback can be supplied to reject point sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from . import certify
from .polyalg import BiformQuad, biform_from_tensor

MAX_RETRIES = 16
SPAN_TOL = 1e-8
RANK_TOL = 1e-9


class DegenerateDataError(RuntimeError):
    """Random data hit a probability-zero degeneracy; re-seed and retry."""


def segre_degree(n: int) -> int:
    """Degree of V_C(J_n): binom(2n-2, n-1)."""
    return math.comb(2 * n - 2, n - 1)


def segre_dim(n: int) -> int:
    """Projective dimension of V_C(J_n): 2n - 3."""
    return 2 * n - 3


def segre_codim(n: int) -> int:
    """Codimension of V_C(J_n) in P^{n^2 - 1}: (n-1)^2."""
    return (n - 1) ** 2


def is_minimal_degree(n: int) -> bool:
    """Whether deg = 1 + codim, which fails for every n >= 3."""
    return segre_degree(n) == 1 + segre_codim(n)


@dataclass(frozen=True)
class SegreData:
    """Generators of J_n.  ``minors`` holds (i, j, k, l) for z_ij z_kl - z_il z_kj, i<k, j<l."""

    n: int
    d: int
    e: int
    minors: Tuple[Tuple[int, int, int, int], ...]

    @classmethod
    def from_n(cls, n: int) -> "SegreData":
        if n < 3:
            raise ValueError("n >= 3 required")
        minors = tuple((i, j, k, l) for i, k in combinations(range(n), 2) for j, l in combinations(range(n), 2))
        return cls(n, segre_dim(n), segre_codim(n), minors)

    def zindex(self, i: int, j: int) -> int:
        return i * self.n + j

    def jacobian(self, z: np.ndarray) -> np.ndarray:
        """Rows: gradient of g_0 = sum z_ii, then of each minor, at z (flattened row-major)."""
        n = self.n
        J = np.zeros((1 + len(self.minors), n * n))
        J[0, [self.zindex(i, i) for i in range(n)]] = 1.0
        for r, (i, j, k, l) in enumerate(self.minors, start=1):
            a, b, c, dd = self.zindex(i, j), self.zindex(k, l), self.zindex(i, l), self.zindex(k, j)
            J[r, a] += z[b]
            J[r, b] += z[a]
            J[r, c] -= z[dd]
            J[r, dd] -= z[c]
        return J

    def evaluate(self, z: np.ndarray) -> np.ndarray:
        """Values of g_0 and all minors at z."""
        n = self.n
        vals = [sum(z[self.zindex(i, i)] for i in range(n))]
        for i, j, k, l in self.minors:
            vals.append(z[self.zindex(i, j)] * z[self.zindex(k, l)] - z[self.zindex(i, l)] * z[self.zindex(k, j)])
        return np.array(vals)


def sample_orthogonal_pairs(n: int, count: int, seed=None,
                            exact: bool = False) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Random pairs with x^T y = 0.

    Float mode: x standard Gaussian, y a Gaussian projected onto x^perp, both
    normalized.  Exact mode: integer entries in [-9, 9] and an exact rational
    projection, so x^T y = 0 holds identically.
    """
    if n < 2:
        raise ValueError("n >= 2 required")
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        if exact:
            x = [Fraction(int(v)) for v in rng.integers(-9, 10, size=n)]
            y = [Fraction(int(v)) for v in rng.integers(-9, 10, size=n)]
            xx = sum(a * a for a in x)
            if xx == 0:
                continue
            c = sum(a * b for a, b in zip(x, y)) / xx
            y = [b - c * a for a, b in zip(x, y)]
            if all(v == 0 for v in y):
                continue
            out.append((np.array(x, dtype=object), np.array(y, dtype=object)))
        else:
            x = rng.standard_normal(n)
            x /= np.linalg.norm(x)
            y = rng.standard_normal(n)
            for _ in range(2):
                y -= (x @ y) * x
            y /= np.linalg.norm(y)
            out.append((x, y))
    return out


def z_points(pairs: Sequence[Tuple[np.ndarray, np.ndarray]]) -> np.ndarray:
    """Rows z = x (x) y, entry i*n + j equal to x_i y_j."""
    return np.array([np.kron(np.asarray(x, dtype=float), np.asarray(y, dtype=float)) for x, y in pairs])


def _null_space(M: np.ndarray, expected_rank: int) -> np.ndarray:
    """Orthonormal kernel basis (columns); raises if the rank is not ``expected_rank``."""
    _, s, Vt = np.linalg.svd(M)
    scale = s[0] if len(s) else 1.0
    rank = int(np.sum(s > RANK_TOL * scale))
    if rank != expected_rank:
        raise DegenerateDataError(f"matrix has rank {rank}, expected {expected_rank}")
    return Vt[rank:].T


def build_h_forms(Z: np.ndarray, rng=None) -> np.ndarray:
    """Rows h_0, h_1..h_d of linear forms on R^{n^2}.

    h_1..h_d annihilate all e+1 points, h_0 only the first e.  Each is a
    Gaussian combination of an orthonormal kernel basis; the family is then
    orthonormalized in the order h_1..h_d, h_0.
    """
    rng = np.random.default_rng(rng)
    m, nn = Z.shape
    n = math.isqrt(nn)
    d, e = segre_dim(n), segre_codim(n)
    if m != e + 1:
        raise ValueError(f"expected {e + 1} points, got {m}")
    K1 = _null_space(Z, e + 1)
    K0 = _null_space(Z[:e], e)
    V = np.column_stack([K1 @ rng.standard_normal(K1.shape[1]) for _ in range(d)]
                        + [K0 @ rng.standard_normal(K0.shape[1])])
    Q, R = np.linalg.qr(V)
    if np.min(np.abs(np.diag(R))) < RANK_TOL * np.max(np.abs(np.diag(R))):
        raise DegenerateDataError("h-forms are linearly dependent")
    Q = Q * np.sign(np.diag(R))
    return np.vstack([Q[:, d], Q[:, :d].T])


def tangent_kernels(Z: np.ndarray, segre: SegreData) -> List[np.ndarray]:
    """For each point, an orthonormal basis (rows) of the kernel of the Jacobian of J_n."""
    nn = segre.n ** 2
    out = []
    for z in Z:
        K = _null_space(segre.jacobian(z), nn - segre.d - 1)
        out.append(K.T)
    return out


def _sym_pairs(nn: int) -> Tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(nn)


def _sym_to_full(s: np.ndarray, nn: int) -> np.ndarray:
    """Symmetric nn x nn matrix from its upper-triangular parameter vector."""
    iu = _sym_pairs(nn)
    V = np.zeros((nn, nn))
    V[iu] = s
    return V + np.triu(V, 1).T


def _sym_functional(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row r with r @ s = a^T V b for V = _sym_to_full(s)."""
    nn = len(a)
    M = np.outer(a, b)
    M = M + M.T - np.diag(np.diag(M))
    return M[_sym_pairs(nn)]


def excluded_span(segre: SegreData, H: np.ndarray) -> np.ndarray:
    """Orthonormal basis (columns) of the tensors f must avoid, as vectors in R^{n^4}.

    Spanned by h_i (x) h_j + h_j (x) h_i, the symmetrized minor tensors
    E_ijkl - E_ilkj and the trace-pattern tensors.
    """
    n = segre.n
    nn = n * n
    cols = []
    for i in range(len(H)):
        for j in range(i, len(H)):
            cols.append((np.outer(H[i], H[j]) + np.outer(H[j], H[i])).ravel())

    def E(a, b):
        M = np.zeros((nn, nn))
        M[a, b] += 1
        M[b, a] += 1
        return M

    for i, j, k, l in segre.minors:
        cols.append((E(segre.zindex(i, j), segre.zindex(k, l)) - E(segre.zindex(i, l), segre.zindex(k, j))).ravel())
    for j in range(n):
        for k in range(n):
            cols.append(sum(E(segre.zindex(i, i), segre.zindex(j, k)) for i in range(n)).ravel())
    S = np.column_stack(cols)
    U, s, _ = np.linalg.svd(S, full_matrices=False)
    return U[:, s > RANK_TOL * s[0]]


def build_f(Z: np.ndarray, tangent_bases: Sequence[np.ndarray], H: np.ndarray, rng=None,
            max_retries: int = MAX_RETRIES) -> Tuple[np.ndarray, np.ndarray]:
    """Symmetric V (as v in R^{n^4}) with z_i^T V w = 0 for all tangent w at the first e points.

    Returns (v, V) where f(z) = z^T V z.  v is redrawn while its relative
    distance to the excluded span is below the span tolerance.
    """
    rng = np.random.default_rng(rng)
    nn = Z.shape[1]
    n = math.isqrt(nn)
    segre = SegreData.from_n(n)
    rows = [_sym_functional(z, w) for z, W in zip(Z[: segre.e], tangent_bases) for w in W]
    A = np.array(rows)
    _, s, Vt = np.linalg.svd(A)
    rank = int(np.sum(s > RANK_TOL * s[0]))
    K = Vt[rank:].T
    if K.shape[1] == 0:
        raise DegenerateDataError("no symmetric tensor satisfies the tangency conditions")
    U = excluded_span(segre, H)
    for _ in range(max_retries):
        V = _sym_to_full(K @ rng.standard_normal(K.shape[1]), nn)
        v = V.ravel()
        v = v / np.linalg.norm(v)
        if np.linalg.norm(v - U @ (U.T @ v)) >= SPAN_TOL:
            return v, v.reshape(nn, nn)
    raise DegenerateDataError(f"f stayed in the excluded span after {max_retries} draws")


def quadratic_to_biform(V: np.ndarray, n: int) -> BiformQuad:
    """Biform (x, y) -> z^T V z at z = x (x) y."""
    T = V.reshape(n, n, n, n).transpose(0, 2, 1, 3)  # T[i,k,j,l] = V[(i,j),(k,l)]
    return biform_from_tensor(T)


def h_squares_biform(H: np.ndarray, n: int) -> BiformQuad:
    return quadratic_to_biform(H.T @ H, n)


@dataclass
class GeneratorOutput:
    n: int
    seeds: List[Tuple[np.ndarray, np.ndarray]]
    z_points: np.ndarray
    h_forms: np.ndarray
    tangent_bases: List[np.ndarray]
    v: np.ndarray
    f: BiformQuad
    h_sq: BiformQuad
    delta: Optional[float] = None
    F: Optional[BiformQuad] = None
    psatz: Optional[certify.PsatzCertificate] = None
    not_sos: Optional[certify.NotSosWitness] = None
    status: str = "failed"
    attempts: list = field(default_factory=list)
    detail: str = ""

    @property
    def success(self) -> bool:
        return self.status == "success"

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "status": self.status,
            "detail": self.detail,
            "seeds": [{"x": np.asarray(x, dtype=float).tolist(), "y": np.asarray(y, dtype=float).tolist()}
                      for x, y in self.seeds],
            "z_points": self.z_points.tolist(),
            "h_forms": self.h_forms.tolist(),
            "tangent_bases": [W.tolist() for W in self.tangent_bases],
            "v": self.v.tolist(),
            "f": self.f.to_json(),
            "h_sq": self.h_sq.to_json(),
            "delta": self.delta,
            "F": self.F.to_json() if self.F is not None else None,
            "psatz_certificate": self.psatz.to_json() if self.psatz is not None else None,
            "not_sos_witness": self.not_sos.to_json() if self.not_sos is not None else None,
            "attempts": self.attempts,
        }


def generate(n: int, seed=None, delta_min: float = 1e-6, d_max: int = 3,
             seeds: Optional[Sequence[Tuple[np.ndarray, np.ndarray]]] = None,
             verifier: Optional[Callable[[np.ndarray, np.ndarray], bool]] = None,
             solver: str = "CLARABEL", max_retries: int = MAX_RETRIES) -> GeneratorOutput:
    """Run the full construction.

    ``seeds`` replaces the random orthogonal pairs.  ``verifier(Z, H)`` may
    reject a choice of points and h-forms; rejected random data is redrawn,
    rejected user-supplied seeds fail.
    """
    if n < 3:
        raise ValueError("n >= 3 required")
    segre = SegreData.from_n(n)
    rng = np.random.default_rng(seed)
    last_err: Optional[Exception] = None
    for _ in range(max_retries):
        try:
            if seeds is not None:
                pairs = [(np.asarray(x, dtype=float), np.asarray(y, dtype=float)) for x, y in seeds]
                _check_seeds(pairs, segre)
            else:
                pairs = sample_orthogonal_pairs(n, segre.e + 1, rng)
            Z = z_points(pairs)
            H = build_h_forms(Z, rng)
            if verifier is not None and not verifier(Z, H):
                raise DegenerateDataError("external verifier rejected the h-forms")
            W = tangent_kernels(Z[: segre.e], segre)
            v, V = build_f(Z, W, H, rng, max_retries)
            break
        except DegenerateDataError as exc:
            last_err = exc
            if seeds is not None:
                raise
    else:
        raise DegenerateDataError(f"gave up after {max_retries} draws: {last_err}")
    f = quadratic_to_biform(V, n)
    h_sq = h_squares_biform(H, n)
    out = GeneratorOutput(n, pairs, Z, H, W, v, f, h_sq)
    anchor = certify.random_anchor(n, int(rng.integers(2**31)))
    found = certify.bisect_delta(f, h_sq, 1.0, delta_min, d_max, anchor, solver, out.attempts)
    if found is None:
        out.status, out.detail = "no_delta", f"no delta >= {delta_min:g} certified with d <= {d_max}"
        return out
    out.delta, out.psatz = found
    out.F = f * out.delta + h_sq
    verdict = certify.certify_sos_mod_I(out.F, solver=solver)
    if verdict.status == "not_sos":
        out.not_sos = verdict.certificate
        out.status = "success"
    else:
        out.status = "sos_not_refuted"
        out.detail = f"sum-of-squares test on F returned {verdict.status}: {verdict.detail}"
    return out


def _check_seeds(pairs, segre: SegreData) -> None:
    if len(pairs) != segre.e + 1:
        raise ValueError(f"need e + 1 = {segre.e + 1} seed pairs for n = {segre.n}, got {len(pairs)}")
    for x, y in pairs:
        if x.shape != (segre.n,) or y.shape != (segre.n,):
            raise ValueError("seed pair has wrong dimension")
        if abs(x @ y) > 1e-12 * np.linalg.norm(x) * np.linalg.norm(y):
            raise ValueError("seed pairs must satisfy x^T y = 0")
