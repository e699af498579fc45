"""Integration over T = {(x, y) : |x| = |y| = 1, x^T y = 0}.

T is the Stiefel manifold of orthonormal 2-frames with its unique rotation
invariant probability measure.  This module provides

* samplers (Gaussian projection, and a Givens-angle cross-check),
* the closed-form degree 2 and degree 4 moment tables in the variables
  z_ij = x_i y_j, z_i = z_ii, v_ij = z_ij + z_ji, w_ij = z_ij - z_ji,
* an exact integrator for arbitrary polynomials (Wick pairings in y, sphere
  moments in x), used as an oracle and for mixed-symmetry L4 norms,
* L2 / L4 norms of bilinear forms and the reverse Hoelder check.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .poly import Poly
from .polyalg import BiformQuad, BilinearForm

# --- closed-form moments ------------------------------------------------------


def I1(n: int) -> Fraction:
    return Fraction(1, n * (n + 2))


def I2(n: int) -> Fraction:
    return -I1(n) / (n - 1)


def I3(n: int) -> Fraction:
    return Fraction(n + 1, (n - 1) * n * (n + 2))


def I4(n: int) -> Fraction:
    return Fraction(2, (n - 1) * (n + 2))


def I5(n: int) -> Fraction:
    return Fraction(2, (n - 1) * n)


def _den6(n: int) -> int:
    return (n - 1) * n * (n + 1) * (n + 2) * (n + 4) * (n + 6)


def J1(n: int) -> Fraction:
    return Fraction(9, n * (n + 2) * (n + 4) * (n + 6))


def J2(n: int) -> Fraction:
    return -J1(n) / (n - 1)


def J3(n: int) -> Fraction:
    return Fraction(n * n + 4 * n + 15, _den6(n))


def J4(n: int) -> Fraction:
    return Fraction(-(n - 3), _den6(n))


def J5(n: int) -> Fraction:
    if n < 4:
        raise ValueError("four distinct indices need n >= 4")
    return Fraction(3, _den6(n))


def J6(n: int) -> Fraction:
    return Fraction(24, (n - 1) * n * (n + 1) * (n + 2))


def J7(n: int) -> Fraction:
    if n < 4:
        raise ValueError("four distinct indices need n >= 4")
    return J6(n) / 6


def double_factorial(k: int) -> int:
    return 1 if k <= 0 else math.prod(range(k, 0, -2))


def ratio_A(i: int, j2: int) -> Fraction:
    """int_0^pi sin^(i+2j) / int_0^pi sin^i, with j2 = 2j."""
    df = double_factorial
    return Fraction(df(i + j2 - 1) * df(i), df(i - 1) * df(i + j2))


def ratio_B(i: int, j2: int) -> Fraction:
    """int_0^pi cos^2 sin^(i+2j) / int_0^pi sin^i."""
    df = double_factorial
    return Fraction(df(i + j2 - 1) * df(i), df(i - 1) * df(i + j2 + 2))


def ratio_C(i: int, j2: int) -> Fraction:
    """int_0^pi cos^4 sin^(i+2j) / int_0^pi sin^i."""
    df = double_factorial
    return Fraction(3 * df(i + j2 - 1) * df(i), df(i - 1) * df(i + j2 + 4))


# --- moment keys ----------------------------------------------------------------

Factor = Tuple[str, int, int]  # ("z" | "v" | "w", i, j), 0-based


@dataclass(frozen=True)
class MomentKey:
    """A product of variables z_ij, v_ij or w_ij (0-based indices)."""

    factors: Tuple[Factor, ...]

    @property
    def degree(self) -> int:
        return len(self.factors)

    @classmethod
    def parse(cls, text: str) -> "MomentKey":
        """Parse e.g. ``"z12*z13"``, ``"z1^4"``, ``"w12^2*w34^2"``, ``"z1_10"``.

        A single index means the diagonal variable z_i.  Indices are 1-based;
        use ``_`` to separate multi-digit indices.
        """
        out: List[Factor] = []
        for tok in text.replace(" ", "").split("*"):
            m = re.fullmatch(r"([zvw])(\d+)(?:_(\d+))?(?:\^(\d+))?", tok)
            if not m:
                raise ValueError(f"cannot parse factor {tok!r}")
            kind, a, b, power = m.groups()
            if b is not None:
                i, j = int(a), int(b)
            elif len(a) == 1:
                i = j = int(a)
            elif len(a) == 2:
                i, j = int(a[0]), int(a[1])
            else:
                raise ValueError(f"ambiguous indices in {tok!r}; use z<i>_<j>")
            if i < 1 or j < 1:
                raise ValueError("indices are 1-based")
            out.extend([(kind, i - 1, j - 1)] * int(power or 1))
        return cls(tuple(out))

    def __str__(self) -> str:
        return "*".join(f"{k}{i + 1}" if i == j and k == "z" else f"{k}{i + 1}_{j + 1}" for k, i, j in self.factors)


def _z_expansion(key: MomentKey) -> Dict[Tuple[Tuple[int, int], ...], int]:
    """Expand into a signed sum of z-monomials (sorted tuples of (i, j))."""
    terms: Dict[Tuple[Tuple[int, int], ...], int] = {(): 1}
    for kind, i, j in key.factors:
        if kind == "z":
            opts = [((i, j), 1)]
        elif kind == "v":
            opts = [((i, j), 1), ((j, i), 1)]
        else:
            opts = [((i, j), 1), ((j, i), -1)]
        new: Dict[Tuple[Tuple[int, int], ...], int] = {}
        for mono, c in terms.items():
            for pair, s in opts:
                m = tuple(sorted(mono + (pair,)))
                new[m] = new.get(m, 0) + c * s
        terms = {k: v for k, v in new.items() if v}
    return terms


def _has_odd_index(pairs: Sequence[Tuple[int, int]]) -> bool:
    counts: Dict[int, int] = {}
    for i, j in pairs:
        counts[i] = counts.get(i, 0) + 1
        counts[j] = counts.get(j, 0) + 1
    return any(c % 2 for c in counts.values())


def _z2(n: int, pairs) -> Fraction:
    (i, j), (k, l) = pairs
    if _has_odd_index(pairs):
        return Fraction(0)
    if i == j == k == l:
        return I1(n)
    if i != j and i == k and j == l:
        return I3(n)
    return I2(n)  # z_a z_b or z_ab z_ba


def moment2(n: int, key: Union[MomentKey, str]) -> Fraction:
    """Exact integral over T of any degree-2 monomial in z, v, w."""
    if isinstance(key, str):
        key = MomentKey.parse(key)
    if key.degree != 2:
        raise ValueError("moment2 needs a degree-2 key")
    _check_range(n, key)
    return sum((c * _z2(n, m) for m, c in _z_expansion(key).items()), Fraction(0))


def _check_range(n: int, key: MomentKey):
    if n < 3:
        raise ValueError("n >= 3 required")
    for _, i, j in key.factors:
        if not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"index out of range for n={n}")


def _z4_table(n: int, pairs) -> Optional[Fraction]:
    if _has_odd_index(pairs):
        return Fraction(0)
    if any(i != j for i, j in pairs):
        return None
    counts = sorted((sum(1 for p in pairs if p[0] == i) for i in {p[0] for p in pairs}), reverse=True)
    return {
        (4,): J1, (3, 1): J2, (2, 2): J3, (2, 1, 1): J4, (1, 1, 1, 1): J5,
    }[tuple(counts)](n)


def _w4_table(n: int, key: MomentKey) -> Optional[Fraction]:
    pairs = [(i, j) for _, i, j in key.factors]
    if _has_odd_index(pairs):
        return Fraction(0)
    sign = 1
    canon = []
    for i, j in pairs:
        if i == j:
            return Fraction(0)
        if i > j:
            sign = -sign
        canon.append((min(i, j), max(i, j)))
    kinds = sorted(set(canon))
    if len(kinds) == 1:
        return sign * J6(n)
    if len(kinds) == 2 and canon.count(kinds[0]) == 2 and not set(kinds[0]) & set(kinds[1]):
        return sign * J7(n)
    return None


def moment4(n: int, key: Union[MomentKey, str]) -> Optional[Fraction]:
    """Exact integral of a tabulated degree-4 pattern; None outside the table."""
    if isinstance(key, str):
        key = MomentKey.parse(key)
    if key.degree != 4:
        raise ValueError("moment4 needs a degree-4 key")
    _check_range(n, key)
    if all(k == "w" for k, _, _ in key.factors):
        return _w4_table(n, key)
    total = Fraction(0)
    for mono, c in _z_expansion(key).items():
        val = _z4_table(n, mono)
        if val is None:
            return None
        total += c * val
    return total


# --- exact integration of arbitrary polynomials ---------------------------------


def _perfect_matchings(items: Tuple[int, ...]):
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for k in range(len(rest)):
        for m in _perfect_matchings(rest[:k] + rest[k + 1:]):
            yield ((first, rest[k]),) + m


@lru_cache(maxsize=None)
def _proj_entry(n: int, a: int, b: int) -> Poly:
    """Entry (a, b) of |x|^2 I - x x^T as a quadratic form in x."""
    out = {}
    if a == b:
        for i in range(n):
            if i != a:
                e = [0] * n
                e[i] = 2
                out[tuple(e)] = Fraction(1)
    else:
        e = [0] * n
        e[a] += 1
        e[b] += 1
        out[tuple(e)] = Fraction(-1)
    return Poly(n, out)


@lru_cache(maxsize=None)
def _y_conditional(n: int, yexp: Tuple[int, ...]) -> Poly:
    """E[y^yexp | x] times |x|^(2k) (a form in x), for y uniform on the unit sphere of x-perp."""
    idx = tuple(i for i, e in enumerate(yexp) for _ in range(e))
    if len(idx) % 2:
        return Poly(n)
    k = len(idx) // 2
    total = Poly(n)
    for m in _perfect_matchings(idx):
        term = Poly.constant(n, Fraction(1))
        for a, b in m:
            term = term * _proj_entry(n, a, b)
        total = total + term
    chi = math.prod(n - 1 + 2 * t for t in range(k))
    return total * Fraction(1, chi)


def sphere_moment(n: int, exp: Sequence[int]) -> Fraction:
    """E[x^exp] for x uniform on the unit sphere in R^n."""
    if any(e % 2 for e in exp):
        return Fraction(0)
    deg = sum(exp)
    num = math.prod(double_factorial(e - 1) for e in exp)
    den = math.prod(n + 2 * t for t in range(deg // 2))
    return Fraction(num, den)


def integrate_exact(p: Union[Poly, BiformQuad], n: int) -> Fraction:
    """Exact integral over T of a polynomial in (x_1..x_n, y_1..y_n)."""
    if isinstance(p, BiformQuad):
        p = p.to_poly()
    total = Fraction(0)
    for e, c in p.terms.items():
        xe, ye = e[:n], e[n:]
        cond = _y_conditional(n, tuple(ye))
        for ce, cv in cond.terms.items():
            total += Fraction(c) * cv * sphere_moment(n, [a + b for a, b in zip(xe, ce)])
    return total


# --- sampling ---------------------------------------------------------------------


@dataclass(frozen=True)
class StiefelSample:
    x: np.ndarray
    y: np.ndarray


def sample_batch(n: int, size: int, rng: np.random.Generator, method: str = "gaussian") -> Tuple[np.ndarray, np.ndarray]:
    """Draw ``size`` points of T, returned as arrays of shape (size, n).

    ``gaussian``: x is a normalized Gaussian, y the normalized projection of an
    independent Gaussian onto x-perp.  ``givens``: nested Givens-angle
    parameterization with angles drawn from their marginal densities.
    """
    if n < 2:
        raise ValueError("n >= 2 required")
    if method == "givens":
        return _sample_givens(n, size, rng)
    if method != "gaussian":
        raise ValueError(f"unknown sampler {method!r}")
    x = rng.standard_normal((size, n))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    y = rng.standard_normal((size, n))
    y -= np.sum(x * y, axis=1, keepdims=True) * x
    y /= np.linalg.norm(y, axis=1, keepdims=True)
    y -= np.sum(x * y, axis=1, keepdims=True) * x
    y /= np.linalg.norm(y, axis=1, keepdims=True)
    return x, y


def sample(n: int, seed: int, method: str = "gaussian") -> StiefelSample:
    if n < 3:
        raise ValueError("n >= 3 required")
    x, y = sample_batch(n, 1, np.random.default_rng(seed), method)
    return StiefelSample(x[0], y[0])


def _sin_power_angles(k: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """Angles on [0, pi] with density proportional to sin^k (rejection sampling)."""
    out = np.empty(size)
    filled = 0
    while filled < size:
        m = max(2 * (size - filled), 64)
        phi = rng.uniform(0.0, np.pi, m)
        keep = phi[rng.uniform(0.0, 1.0, m) <= np.sin(phi) ** k]
        take = min(len(keep), size - filled)
        out[filled:filled + take] = keep[:take]
        filled += take
    return out


def _sphere_from_angles(angles: List[np.ndarray]) -> np.ndarray:
    """Hyperspherical coordinates: first column of R^{m-1}(phi_{m-1}) ... R^1(phi_1)."""
    size = angles[0].shape[0]
    m = len(angles) + 1
    u = np.zeros((size, m))
    s = np.ones(size)
    for t, phi in enumerate(angles):
        u[:, t] = s * np.cos(phi)
        s = s * np.sin(phi)
    u[:, m - 1] = s
    return u


def _givens_frame(angles: List[np.ndarray]) -> np.ndarray:
    """Batch of rotations H = R^{m-1}(phi_{m-1}) ... R^1(phi_1); R^t rotates coordinates (t, t+1)."""
    size = angles[0].shape[0]
    m = len(angles) + 1
    H = np.tile(np.eye(m), (size, 1, 1))
    for t, phi in enumerate(angles):
        c, s = np.cos(phi), np.sin(phi)
        R = np.tile(np.eye(m), (size, 1, 1))
        R[:, t, t] = c
        R[:, t, t + 1] = -s
        R[:, t + 1, t] = s
        R[:, t + 1, t + 1] = c
        H = R @ H
    return H


def _sample_givens(n: int, size: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    phis = [_sin_power_angles(n - 1 - t, size, rng) for t in range(1, n - 1)]
    phis.append(rng.uniform(0.0, 2 * np.pi, size))
    psis = [_sin_power_angles(n - 2 - t, size, rng) for t in range(1, n - 2)]
    psis.append(rng.uniform(0.0, 2 * np.pi, size))
    H = _givens_frame(phis)
    x = H[:, :, 0]
    u = np.zeros((size, n))
    u[:, 1:] = _sphere_from_angles(psis) if n > 2 else 1.0
    y = np.einsum("sij,sj->si", H, u)
    return x, y


# --- Monte Carlo --------------------------------------------------------------------


def _as_batch_fn(p, n: int) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    if isinstance(p, BiformQuad):
        T = p.tensor()
        return lambda x, y: np.einsum("ijkl,si,sj,sk,sl->s", T, x, x, y, y, optimize=True)
    if isinstance(p, Poly):
        if p.nvars != 2 * n:
            raise ValueError("polynomial must have 2n variables")
        return lambda x, y: p.evaluate_batch(np.concatenate([x, y], axis=1))
    return p


def mc_integrate(p, n: int, trials: int, seed: int, method: str = "gaussian",
                 chunk: int = 200_000) -> Tuple[float, float]:
    """Sample mean and standard error of p over ``trials`` draws from T.

    Chunks are drawn from a single seeded generator in a fixed order, so the
    result is reproducible for a given seed.
    """
    if trials < 1000:
        raise ValueError("trials >= 1000 required")
    fn = _as_batch_fn(p, n)
    rng = np.random.default_rng(seed)
    s1 = s2 = 0.0
    done = 0
    while done < trials:
        m = min(chunk, trials - done)
        x, y = sample_batch(n, m, rng, method)
        v = np.asarray(fn(x, y), dtype=float)
        s1 += v.sum()
        s2 += (v * v).sum()
        done += m
    mean = s1 / trials
    var = max(s2 / trials - mean * mean, 0.0)
    return mean, math.sqrt(var / (trials - 1))


def moment_key_fn(key: Union[MomentKey, str]) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    """Vectorized evaluation of a moment key at sample arrays."""
    if isinstance(key, str):
        key = MomentKey.parse(key)

    def fn(x, y):
        out = np.ones(x.shape[0])
        for kind, i, j in key.factors:
            zij = x[:, i] * y[:, j]
            zji = x[:, j] * y[:, i]
            out = out * (zij if kind == "z" else zij + zji if kind == "v" else zij - zji)
        return out

    return fn


# --- norms of bilinear forms ----------------------------------------------------------


def _matrix(g) -> np.ndarray:
    return np.asarray(g.B if isinstance(g, BilinearForm) else g)


def l2_norm_sq(g, n: Optional[int] = None) -> Union[Fraction, float]:
    """||x^T B y||_2^2 from the degree-2 moment table (exact for rational B)."""
    B = _matrix(g)
    n = B.shape[0]
    exact = B.dtype == object
    total = Fraction(0) if exact else 0.0
    for i in range(n):
        for j in range(n):
            if B[i, j] == 0:
                continue
            for k in range(n):
                for l in range(n):
                    if B[k, l] == 0:
                        continue
                    m = _z2(n, ((i, j), (k, l)))
                    total += B[i, j] * B[k, l] * (m if exact else float(m))
    return total


def l2_norm(g, n: Optional[int] = None) -> float:
    return math.sqrt(float(l2_norm_sq(g, n)))


def l2_norm_sq_batch(B: np.ndarray) -> np.ndarray:
    """Vectorized ||x^T B y||_2^2 for a batch of matrices, shape (m, n, n)."""
    n = B.shape[-1]
    S = 0.5 * (B + np.swapaxes(B, -1, -2))
    trM = np.einsum("...ij,...ij->...", B, B)
    trS = np.einsum("...ii->...", S)
    trS2 = np.einsum("...ij,...ji->...", S, S)
    return (trM / n - (trS ** 2 + 2 * trS2) / (n * (n + 2))) / (n - 1)


def gaussian_quadform_moment(mats: Sequence[np.ndarray]) -> np.ndarray:
    """E[prod_k x^T A_k x] for x ~ N(0, I); each A_k symmetric, optionally batched."""
    m = len(mats)
    total = 0.0
    for perm in itertools.permutations(range(m)):
        seen = [False] * m
        term = 1.0
        for s in range(m):
            if seen[s]:
                continue
            cyc = []
            t = s
            while not seen[t]:
                seen[t] = True
                cyc.append(t)
                t = perm[t]
            P = mats[cyc[0]]
            for c in cyc[1:]:
                P = P @ mats[c]
            term = term * (2 ** (len(cyc) - 1)) * np.einsum("...ii->...", P)
        total = total + term
    return total


def l4_norm4_exact_batch(B: np.ndarray) -> np.ndarray:
    """||x^T B y||_4^4 for any B via y-conditioning and Gaussian quadratic-form moments."""
    B = np.asarray(B, dtype=float)
    n = B.shape[-1]
    S = 0.5 * (B + np.swapaxes(B, -1, -2))
    M = B @ np.swapaxes(B, -1, -2)
    Id = np.broadcast_to(np.eye(n), B.shape)
    g = gaussian_quadform_moment
    es2 = (g([Id, Id, M, M]) - 2 * g([Id, M, S, S]) + g([S, S, S, S])) / (n * (n + 2) * (n + 4) * (n + 6))
    return 3.0 * es2 / ((n - 1) * (n + 1))


def _elem_sym(d: np.ndarray, k: int) -> float:
    return float(sum(math.prod(c) for c in itertools.combinations(d, k)))


def l4_norm4_symmetric(d: Sequence[float], n: int) -> float:
    """Closed form of ||sum d_i z_i||_4^4 from the tabulated degree-4 moments."""
    d = np.asarray(d, dtype=float)
    p1, p2, p4 = d.sum(), (d ** 2).sum(), (d ** 4).sum()
    p3 = (d ** 3).sum()
    s_ij3 = p3 * p1 - p4  # sum_{i != j} d_i^3 d_j
    s_ii_jj = 0.5 * (p2 * p2 - p4)  # sum_{i<j} d_i^2 d_j^2
    s_iijk = sum(d[i] ** 2 * _elem_sym(np.delete(d, i), 2) for i in range(n))
    total = p4 * float(J1(n)) + 4 * s_ij3 * float(J2(n)) + 6 * s_ii_jj * float(J3(n)) + 12 * s_iijk * float(J4(n))
    if n >= 4:
        total += 24 * _elem_sym(d, 4) * float(J5(n))
    return total


def l2_norm_sq_symmetric(d: Sequence[float], n: int) -> float:
    d = np.asarray(d, dtype=float)
    cross = 0.5 * (d.sum() ** 2 - (d ** 2).sum())
    return float(((d ** 2).sum() - 2.0 / (n - 1) * cross) * float(I1(n)))


def skew_canonical_pairs(B: np.ndarray) -> np.ndarray:
    """Nonnegative a_k with B = U (sum a_k (e_{2k-1} e_{2k}^T - e_{2k} e_{2k-1}^T)) U^T, U orthogonal.

    The a_k are the nonnegative eigenvalues of the Hermitian matrix iB, which
    come in pairs +-a_k (plus a zero for odd n).
    """
    B = np.asarray(B, dtype=float)
    w = np.linalg.eigvalsh(1j * 0.5 * (B - B.T))
    return np.clip(w[::-1][: B.shape[0] // 2], 0.0, None)


def l4_norm4_skew(a: Sequence[float], n: int) -> float:
    a2 = np.asarray(a, dtype=float) ** 2
    cross = 0.5 * (a2.sum() ** 2 - (a2 ** 2).sum())
    j7 = float(J6(n)) / 6
    return float((a2 ** 2).sum() * float(J6(n)) + 6 * cross * j7)


def l2_norm_sq_skew(a: Sequence[float], n: int) -> float:
    return float((np.asarray(a, dtype=float) ** 2).sum() * float(I5(n)))


def symmetry_class(B: np.ndarray, tol: float = 1e-12) -> str:
    B = np.asarray(B, dtype=float)
    scale = max(np.abs(B).max(), 1e-300)
    if np.abs(B - B.T).max() <= tol * scale:
        return "sym"
    if np.abs(B + B.T).max() <= tol * scale:
        return "skew"
    return "general"


def l4_norm(g, n: Optional[int] = None, method: str = "auto", trials: int = 10 ** 6, seed: int = 0) -> float:
    """||g||_4 for a bilinear form.

    ``auto`` uses the eigenvalue expansion for symmetric B, canonical skew
    pairs for skew B and the exact Gaussian route for mixed B; ``mc`` uses
    Monte Carlo.
    """
    B = np.asarray(_matrix(g), dtype=float)
    n = B.shape[0]
    if method == "mc":
        fn = lambda x, y: np.einsum("si,ij,sj->s", x, B, y) ** 4  # noqa: E731
        return mc_integrate(fn, n, trials, seed)[0] ** 0.25
    cls = symmetry_class(B)
    if method == "auto" and cls == "sym":
        val = l4_norm4_symmetric(np.linalg.eigvalsh(B), n)
    elif method == "auto" and cls == "skew":
        val = l4_norm4_skew(skew_canonical_pairs(B), n)
    else:
        val = float(l4_norm4_exact_batch(B))
    return max(val, 0.0) ** 0.25


HOLDER_BOUNDS = {"sym": math.sqrt(3.0), "skew": 6 ** 0.25, "general": math.sqrt(6.0)}


def holder_check(g, n: Optional[int] = None, zero_tol: float = 1e-14) -> Tuple[float, float, bool]:
    """Ratio ||g||_4 / ||g||_2 and the bound for the symmetry class of g."""
    B = np.asarray(_matrix(g), dtype=float)
    n = B.shape[0]
    l2 = float(l2_norm_sq(B))
    if l2 <= zero_tol * max(np.abs(B).max() ** 2, 1e-300):
        raise ValueError("g vanishes identically on T")
    ratio = l4_norm(B) / math.sqrt(l2)
    bound = HOLDER_BOUNDS[symmetry_class(B)]
    return ratio, bound, ratio <= bound + 1e-9


def holder_batch(B: np.ndarray, cls: str) -> np.ndarray:
    """Hoelder ratios for a batch (m, n, n) using the closed form for ``cls``."""
    B = np.asarray(B, dtype=float)
    n = B.shape[-1]
    if cls == "sym":
        d = np.linalg.eigvalsh(B)
        l4 = np.array([l4_norm4_symmetric(row, n) for row in d])
        l2 = np.array([l2_norm_sq_symmetric(row, n) for row in d])
    elif cls == "skew":
        pairs = [skew_canonical_pairs(b) for b in B]
        l4 = np.array([l4_norm4_skew(a, n) for a in pairs])
        l2 = np.array([l2_norm_sq_skew(a, n) for a in pairs])
    else:
        l4 = l4_norm4_exact_batch(B)
        l2 = l2_norm_sq_batch(B)
    return l4 ** 0.25 / np.sqrt(l2)


def sym_witness_ratio(n: int) -> float:
    return (9 * n * (n + 2) / ((n + 4) * (n + 6))) ** 0.25


def skew_witness_ratio(n: int) -> float:
    return (6 * (n - 1) * n / ((n + 1) * (n + 2))) ** 0.25


# --- dimensions and the probability bound -------------------------------------------


def dim_D_U(n: int) -> int:
    return n * n - 1


def dim_D_M(n: int) -> int:
    return (n * (n + 1) // 2) ** 2 - n * n - 1


@dataclass(frozen=True)
class ProbabilityBound:
    n: int
    D_M: int
    D_U: int
    base: float  # per-dimension factor, decreasing in n
    log10_bound: float  # log10 of base ** D_M

    @property
    def bound(self) -> float:
        return 10.0 ** self.log10_bound if self.log10_bound < 300 else math.inf


def probability_bound(n: int) -> ProbabilityBound:
    """Upper bound base**D_M on the fraction of cross-positive maps that are completely cross-positive."""
    if n < 3:
        raise ValueError("n >= 3 required")
    base = 2 ** 5 * math.sqrt(2) * 25 * 10 ** (2 / 9) / (3 ** 1.5 * math.sqrt(n))
    dm = dim_D_M(n)
    return ProbabilityBound(n, dm, dim_D_U(n), base, dm * math.log10(base))
