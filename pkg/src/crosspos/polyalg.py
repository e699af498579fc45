"""Biforms, bilinear forms and linear maps on symmetric matrices.

Everything here works in two arithmetic modes.  Exact mode stores
``fractions.Fraction`` coefficients (ints are promoted); float mode stores
Python floats.  Index conventions in the Python API are 0-based; the JSON
files use 1-based indices.

The central correspondence is ``p_A(x, y) = y^T A(x x^T) y`` between a map
``A`` on symmetric matrices and a biquadratic biform.  The ideal ``I`` is the
principal ideal generated by ``x^T y``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .poly import Poly, unit_exp

Quad = Tuple[int, int, int, int]


def _is_exact(v) -> bool:
    return isinstance(v, (Fraction, int)) and not isinstance(v, bool)


def _to_exact(v):
    return Fraction(v) if isinstance(v, (int, str)) else v


def _scalar_from_json(v):
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, int):
        return Fraction(v)
    return float(v)


def _scalar_to_json(v):
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else v.numerator
    if isinstance(v, (int, np.integer)):
        return int(v)
    return float(v)


def _canon(i: int, j: int, k: int, l: int) -> Quad:
    return (min(i, j), max(i, j), min(k, l), max(k, l))


@lru_cache(maxsize=None)
def canonical_quads(n: int) -> Tuple[Quad, ...]:
    """Canonical index quadruples (i<=j, k<=l) in lexicographic order."""
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    return tuple((i, j, k, l) for (i, j) in pairs for (k, l) in pairs)


@lru_cache(maxsize=None)
def quad_index(n: int) -> Dict[Quad, int]:
    return {q: t for t, q in enumerate(canonical_quads(n))}


class BiformQuad:
    """Biquadratic biform ``sum c_{ijkl} x_i x_j y_k y_l`` with i<=j, k<=l."""

    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, coeffs: Dict[Quad, object] | None = None):
        if n < 1:
            raise ValueError("n must be positive")
        self.n = n
        self.coeffs: Dict[Quad, object] = {}
        for (i, j, k, l), c in (coeffs or {}).items():
            for idx in (i, j, k, l):
                if not 0 <= idx < n:
                    raise ValueError(f"index {idx} out of range for n={n}")
            key = _canon(i, j, k, l)
            s = self.coeffs.get(key, 0) + _to_exact(c)
            if s == 0:
                self.coeffs.pop(key, None)
            else:
                self.coeffs[key] = s

    @property
    def exact(self) -> bool:
        return all(_is_exact(c) for c in self.coeffs.values())

    def __getitem__(self, key: Quad):
        return self.coeffs.get(_canon(*key), 0)

    def __add__(self, other: "BiformQuad") -> "BiformQuad":
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return BiformQuad(self.n, out)

    def __neg__(self) -> "BiformQuad":
        return BiformQuad(self.n, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other: "BiformQuad") -> "BiformQuad":
        return self + (-other)

    def __mul__(self, s) -> "BiformQuad":
        return BiformQuad(self.n, {k: v * s for k, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, BiformQuad) and self.n == other.n and self.coeffs == other.coeffs

    def __repr__(self) -> str:
        return f"BiformQuad(n={self.n}, terms={len(self.coeffs)})"

    def to_float(self) -> "BiformQuad":
        return BiformQuad(self.n, {k: float(v) for k, v in self.coeffs.items()})

    def max_abs(self) -> float:
        return max((abs(float(v)) for v in self.coeffs.values()), default=0.0)

    def is_zero(self, tol: float = 0.0) -> bool:
        return self.max_abs() <= tol

    def vector(self) -> np.ndarray:
        """Coefficients in :func:`canonical_quads` order (float)."""
        idx = quad_index(self.n)
        out = np.zeros(len(idx))
        for k, v in self.coeffs.items():
            out[idx[k]] = float(v)
        return out

    @classmethod
    def from_vector(cls, n: int, vec: Sequence) -> "BiformQuad":
        return cls(n, {q: v for q, v in zip(canonical_quads(n), vec) if v != 0})

    def tensor(self) -> np.ndarray:
        """Dense float tensor T with p = sum T[i,j,k,l] x_i x_j y_k y_l, symmetric in (i,j) and (k,l)."""
        n = self.n
        T = np.zeros((n, n, n, n))
        for (i, j, k, l), c in self.coeffs.items():
            v = float(c) / ((1 if i == j else 2) * (1 if k == l else 2))
            for a, b in {(i, j), (j, i)}:
                for e, f in {(k, l), (l, k)}:
                    T[a, b, e, f] = v
        return T

    def __call__(self, x, y):
        """Evaluate; ``x`` and ``y`` may be batched along leading axes."""
        x = np.asarray(x)
        y = np.asarray(y)
        if x.dtype == object or y.dtype == object:
            return sum(c * x[i] * x[j] * y[k] * y[l] for (i, j, k, l), c in self.coeffs.items())
        return np.einsum("ijkl,...i,...j,...k,...l->...", self.tensor(), x, x, y, y)

    def to_poly(self) -> Poly:
        """As a polynomial in the 2n variables (x_1..x_n, y_1..y_n)."""
        n = self.n
        return Poly(2 * n, {unit_exp(2 * n, i, j, n + k, n + l): c for (i, j, k, l), c in self.coeffs.items()})

    @classmethod
    def from_poly(cls, n: int, p: Poly) -> "BiformQuad":
        out = {}
        for e, c in p.terms.items():
            xs = [i for i in range(n) for _ in range(e[i])]
            ys = [k for k in range(n) for _ in range(e[n + k])]
            if len(xs) != 2 or len(ys) != 2:
                raise ValueError("polynomial is not of bidegree (2,2)")
            out[(xs[0], xs[1], ys[0], ys[1])] = c
        return cls(n, out)

    def swap(self) -> "BiformQuad":
        """The biform p(y, x)."""
        return BiformQuad(self.n, {(k, l, i, j): c for (i, j, k, l), c in self.coeffs.items()})

    def substitute(self, g: np.ndarray, h: np.ndarray) -> "BiformQuad":
        """The biform (x, y) -> p(g x, h y) in float arithmetic."""
        T = np.einsum("abcd,ai,bj,ck,dl->ijkl", self.tensor(), g, g, h, h)
        return biform_from_tensor(T)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "coeffs": [
                {"i": i + 1, "j": j + 1, "k": k + 1, "l": l + 1, "c": _scalar_to_json(c)}
                for (i, j, k, l), c in sorted(self.coeffs.items())
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "BiformQuad":
        n = int(data["n"])
        coeffs: Dict[Quad, object] = {}
        for t in data["coeffs"]:
            key = _canon(t["i"] - 1, t["j"] - 1, t["k"] - 1, t["l"] - 1)
            coeffs[key] = coeffs.get(key, 0) + _scalar_from_json(t["c"])
        return cls(n, coeffs)


def biform_from_tensor(T: np.ndarray, tol: float = 0.0) -> BiformQuad:
    """Collect a dense tensor sum T[i,j,k,l] x_i x_j y_k y_l into canonical form."""
    n = T.shape[0]
    S = 0.5 * (T + T.transpose(1, 0, 2, 3))
    S = 0.5 * (S + S.transpose(0, 1, 3, 2))
    out = {}
    for (i, j, k, l) in canonical_quads(n):
        v = S[i, j, k, l] * (1 if i == j else 2) * (1 if k == l else 2)
        if abs(v) > tol:
            out[(i, j, k, l)] = float(v)
    return BiformQuad(n, out)


def sphere_product(n: int) -> BiformQuad:
    """(sum x_i^2)(sum y_j^2), equal to 1 on pairs of unit vectors."""
    return BiformQuad(n, {(i, i, k, k): Fraction(1) for i in range(n) for k in range(n)})


def xty_squared(n: int) -> BiformQuad:
    """(x^T y)^2, the square of the ideal generator."""
    return BilinearForm.identity(n).times_xty()


@dataclass(frozen=True)
class BilinearForm:
    """g(x, y) = x^T B y."""

    n: int
    B: np.ndarray

    def __post_init__(self):
        B = np.asarray(self.B)
        if B.shape != (self.n, self.n):
            raise ValueError("B must be n x n")
        object.__setattr__(self, "B", B)

    @classmethod
    def identity(cls, n: int) -> "BilinearForm":
        B = np.empty((n, n), dtype=object)
        for a in range(n):
            for b in range(n):
                B[a, b] = Fraction(int(a == b))
        return cls(n, B)

    def sym(self) -> "BilinearForm":
        return BilinearForm(self.n, (self.B + self.B.T) / 2 if self.B.dtype != object
                            else (self.B + self.B.T) * Fraction(1, 2))

    def skew(self) -> "BilinearForm":
        return BilinearForm(self.n, (self.B - self.B.T) / 2 if self.B.dtype != object
                            else (self.B - self.B.T) * Fraction(1, 2))

    def __call__(self, x, y):
        return np.einsum("...i,ij,...j->...", np.asarray(x), self.B, np.asarray(y))

    def times_xty(self) -> BiformQuad:
        """The biform g(x, y) * (x^T y)."""
        out: Dict[Quad, object] = {}
        for a in range(self.n):
            for b in range(self.n):
                c = self.B[a, b]
                if c == 0:
                    continue
                for i in range(self.n):
                    key = _canon(a, i, b, i)
                    out[key] = out.get(key, 0) + c
        return BiformQuad(self.n, out)

    def square(self) -> BiformQuad:
        """The biform g(x, y)^2."""
        out: Dict[Quad, object] = {}
        n = self.n
        for a in range(n):
            for b in range(n):
                if self.B[a, b] == 0:
                    continue
                for c in range(n):
                    for d in range(n):
                        key = _canon(a, c, b, d)
                        out[key] = out.get(key, 0) + self.B[a, b] * self.B[c, d]
        return BiformQuad(n, out)

    def to_json(self) -> dict:
        return {"n": self.n, "B": [[_scalar_to_json(v) for v in row] for row in self.B]}


def _sym_basis(n: int, i: int, j: int, exact: bool) -> np.ndarray:
    E = np.zeros((n, n), dtype=object if exact else float)
    if exact:
        E[:, :] = Fraction(0)
        one = Fraction(1)
    else:
        one = 1.0
    E[i, j] = one
    E[j, i] = one
    return E


def _as_matrix(m, exact: bool) -> np.ndarray:
    if exact:
        arr = np.empty((len(m), len(m)), dtype=object)
        for a, row in enumerate(m):
            for b, v in enumerate(row):
                arr[a, b] = Fraction(v) if not isinstance(v, float) else Fraction(v)
        return arr
    return np.asarray(m, dtype=float)


class SymMapTensor:
    """A linear map on symmetric n x n matrices, stored by basis images.

    ``diag[i] = A(E_ii)`` and ``offdiag[(i, j)] = A(E_ij + E_ji)`` for i<j.
    """

    __slots__ = ("n", "diag", "offdiag")

    def __init__(self, n: int, diag: Sequence, offdiag: Dict[Tuple[int, int], object], check: bool = True):
        self.n = n
        self.diag = [np.asarray(m) for m in diag]
        self.offdiag = {tuple(k): np.asarray(v) for k, v in offdiag.items()}
        if len(self.diag) != n or len(self.offdiag) != n * (n - 1) // 2:
            raise ValueError("wrong number of basis images")
        if check:
            for M in self.matrices():
                if M.shape != (n, n):
                    raise ValueError("basis image has wrong shape")
                if M.dtype == object:
                    if not all(M[a, b] == M[b, a] for a in range(n) for b in range(n)):
                        raise ValueError("basis image is not symmetric")
                elif np.abs(M - M.T).max(initial=0.0) > 1e-12:
                    raise ValueError("basis image is not symmetric")

    def matrices(self) -> List[np.ndarray]:
        return list(self.diag) + [self.offdiag[k] for k in sorted(self.offdiag)]

    @property
    def exact(self) -> bool:
        return all(M.dtype == object for M in self.matrices())

    def image(self, i: int, j: int) -> np.ndarray:
        """A(E_ii) if i == j else A(E_ij + E_ji)."""
        return self.diag[i] if i == j else self.offdiag[(min(i, j), max(i, j))]

    def __call__(self, X) -> np.ndarray:
        X = np.asarray(X)
        out = sum(X[i, i] * self.diag[i] for i in range(self.n))
        for (i, j), M in self.offdiag.items():
            out = out + X[i, j] * M
        return out

    def __add__(self, other: "SymMapTensor") -> "SymMapTensor":
        return SymMapTensor(self.n, [a + b for a, b in zip(self.diag, other.diag)],
                            {k: self.offdiag[k] + other.offdiag[k] for k in self.offdiag}, check=False)

    def __sub__(self, other: "SymMapTensor") -> "SymMapTensor":
        return SymMapTensor(self.n, [a - b for a, b in zip(self.diag, other.diag)],
                            {k: self.offdiag[k] - other.offdiag[k] for k in self.offdiag}, check=False)

    def __mul__(self, s) -> "SymMapTensor":
        return SymMapTensor(self.n, [a * s for a in self.diag],
                            {k: v * s for k, v in self.offdiag.items()}, check=False)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return (isinstance(other, SymMapTensor) and self.n == other.n
                and all(np.array_equal(a, b) for a, b in zip(self.matrices(), other.matrices())))

    def max_abs_diff(self, other: "SymMapTensor") -> float:
        return max(float(np.abs(np.asarray(a - b, dtype=float)).max()) for a, b in zip(self.matrices(), other.matrices()))

    def to_float(self) -> "SymMapTensor":
        return SymMapTensor(self.n, [np.asarray(M, dtype=float) for M in self.diag],
                            {k: np.asarray(v, dtype=float) for k, v in self.offdiag.items()}, check=False)

    @classmethod
    def from_function(cls, n: int, fn, exact: bool = False) -> "SymMapTensor":
        diag = [np.asarray(fn(_sym_basis(n, i, i, exact))) for i in range(n)]
        off = {(i, j): np.asarray(fn(_sym_basis(n, i, j, exact))) for i in range(n) for j in range(i + 1, n)}
        return cls(n, diag, off, check=False)

    @classmethod
    def identity(cls, n: int) -> "SymMapTensor":
        return cls.from_function(n, lambda X: X, exact=True)

    @classmethod
    def trace_map(cls, n: int) -> "SymMapTensor":
        eye = _as_matrix(np.eye(n, dtype=int).tolist(), True)
        return cls.from_function(n, lambda X: np.trace(X) * eye, exact=True)

    def act(self, g: np.ndarray) -> "SymMapTensor":
        """GL_n action (g.A)(X) = g A(g^-1 X g^-T) g^T, in float arithmetic."""
        g = np.asarray(g, dtype=float)
        gi = np.linalg.inv(g)
        A = self.to_float()
        return SymMapTensor.from_function(self.n, lambda X: g @ A(gi @ X @ gi.T) @ g.T)

    def to_json(self) -> dict:
        def mat(M):
            return [[_scalar_to_json(v) for v in row] for row in M]

        return {
            "n": self.n,
            "diag": [mat(M) for M in self.diag],
            "offdiag": [{"i": i + 1, "j": j + 1, "m": mat(self.offdiag[(i, j)])} for (i, j) in sorted(self.offdiag)],
        }

    @classmethod
    def from_json(cls, data: dict) -> "SymMapTensor":
        n = int(data["n"])
        exact = not any(isinstance(v, float) for M in data["diag"] for row in M for v in row) and not any(
            isinstance(v, float) for t in data["offdiag"] for row in t["m"] for v in row)

        def mat(m):
            return _as_matrix([[_scalar_from_json(v) for v in row] for row in m], exact)

        diag = [mat(M) for M in data["diag"]]
        off = {(t["i"] - 1, t["j"] - 1): mat(t["m"]) for t in data["offdiag"]}
        return cls(n, diag, off)


def map_to_biform(A: SymMapTensor) -> BiformQuad:
    """p_A(x, y) = y^T A(x x^T) y."""
    n = A.n
    out: Dict[Quad, object] = {}
    for i in range(n):
        for j in range(i, n):
            M = A.image(i, j)
            for k in range(n):
                for l in range(k, n):
                    c = M[k, k] if k == l else 2 * M[k, l]
                    if c != 0:
                        out[(i, j, k, l)] = c
    return BiformQuad(n, out)


def biform_to_map(p: BiformQuad) -> SymMapTensor:
    """Inverse of :func:`map_to_biform` on maps of symmetric matrices."""
    n = p.n
    exact = p.exact
    half = Fraction(1, 2) if exact else 0.5
    zero = Fraction(0) if exact else 0.0
    mats = {}
    for i in range(n):
        for j in range(i, n):
            M = np.empty((n, n), dtype=object if exact else float)
            M[:, :] = zero
            for k in range(n):
                M[k, k] = p[(i, j, k, k)] + zero
                for l in range(k + 1, n):
                    M[k, l] = M[l, k] = p[(i, j, k, l)] * half
            mats[(i, j)] = M
    return SymMapTensor(n, [mats[(i, i)] for i in range(n)],
                        {(i, j): mats[(i, j)] for i in range(n) for j in range(i + 1, n)}, check=False)


def lie_map(C: np.ndarray) -> SymMapTensor:
    """The map X -> C X + X C^T on symmetric matrices."""
    C = np.asarray(C)
    n = C.shape[0]
    exact = C.dtype == object
    if exact:
        C = np.vectorize(Fraction, otypes=[object])(C)
    return SymMapTensor.from_function(n, lambda X: C @ X + X @ C.T, exact=exact)


# --- the ideal (x^T y) --------------------------------------------------------


@lru_cache(maxsize=None)
def _ideal_basis_float(n: int) -> Tuple[np.ndarray, np.ndarray]:
    S = _ideal_basis_exact(n).astype(float)
    return S, np.linalg.solve(S.T @ S, S.T)


@lru_cache(maxsize=None)
def _ideal_basis_exact(n: int) -> np.ndarray:
    """Columns: coefficient vectors of x_a y_b (x^T y), a, b in lexicographic order."""
    idx = quad_index(n)
    S = np.zeros((len(idx), n * n), dtype=object)
    S[:, :] = Fraction(0)
    for a in range(n):
        for b in range(n):
            for i in range(n):
                S[idx[_canon(a, i, b, i)], a * n + b] += 1
    return S


def _solve_exact(M: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Gauss-Jordan elimination over Fractions for a nonsingular system."""
    m = M.shape[0]
    A = [[Fraction(v) for v in row] + [Fraction(r)] for row, r in zip(M, rhs)]
    for col in range(m):
        piv = next(r for r in range(col, m) if A[r][col] != 0)
        A[col], A[piv] = A[piv], A[col]
        pv = A[col][col]
        A[col] = [v / pv for v in A[col]]
        for r in range(m):
            if r != col and A[r][col] != 0:
                f = A[r][col]
                A[r] = [a - f * b for a, b in zip(A[r], A[col])]
    return np.array([A[r][m] for r in range(m)], dtype=object)


@lru_cache(maxsize=None)
def _ideal_gram_exact(n: int) -> np.ndarray:
    S = _ideal_basis_exact(n)
    return S.T.dot(S)


def reduce_mod_ideal(p: BiformQuad) -> Tuple[BiformQuad, BilinearForm]:
    """Split p = canonical + g (x^T y), canonical orthogonal to the ideal part.

    Exact when ``p`` has rational coefficients, float otherwise.
    """
    n = p.n
    if p.exact:
        S = _ideal_basis_exact(n)
        c = np.array([Fraction(v) for v in _exact_vector(p)], dtype=object)
        g = _solve_exact(_ideal_gram_exact(n), S.T.dot(c))
        canonical = BiformQuad.from_vector(n, c - S.dot(g))
        return canonical, BilinearForm(n, g.reshape(n, n))
    S, pinv = _ideal_basis_float(n)
    c = p.vector()
    g = pinv @ c
    return BiformQuad.from_vector(n, c - S @ g), BilinearForm(n, g.reshape(n, n))


def _exact_vector(p: BiformQuad) -> List[Fraction]:
    idx = quad_index(p.n)
    out = [Fraction(0)] * len(idx)
    for k, v in p.coeffs.items():
        out[idx[k]] = Fraction(v)
    return out


def in_ideal(p: BiformQuad, tol: float = 0.0) -> bool:
    """True iff p is a bilinear multiple of x^T y (exact unless tol > 0)."""
    return reduce_mod_ideal(p)[0].is_zero(tol)


# --- the parameterization Psi and Q_A -----------------------------------------


def _psi_terms(n: int) -> List[List[Tuple[int, int, int]]]:
    """y_k = sum over (alpha index, sign, x index) of sign * alpha * x."""
    if n < 2:
        raise ValueError("n >= 2 required")
    terms: List[List[Tuple[int, int, int]]] = []
    for k in range(n):
        row = []
        if k < n - 1:
            row.append((k, 1, k + 1))
        if k > 0:
            row.append((k - 1, -1, k - 1))
        terms.append(row)
    return terms


def psi(x: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    """The point y = Psi(x, alpha), orthogonal to x by construction."""
    x = np.asarray(x)
    alpha = np.asarray(alpha)
    n = x.shape[-1]
    y = np.zeros(np.broadcast_shapes(x.shape, alpha.shape[:-1] + (n,)), dtype=np.result_type(x, alpha))
    for k, row in enumerate(_psi_terms(n)):
        for a, s, i in row:
            y[..., k] = y[..., k] + s * alpha[..., a] * x[..., i]
    return y


class QAlphaForm:
    """q(x, alpha): quartic in x, quadratic in alpha.

    ``coeffs`` maps ``(xexp, a, b)`` with a<=b to the coefficient of
    ``x^xexp alpha_a alpha_b``.
    """

    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, coeffs: Dict[Tuple[Tuple[int, ...], int, int], object]):
        self.n = n
        self.coeffs = {}
        for (e, a, b), c in coeffs.items():
            if sum(e) != 4 or len(e) != n:
                raise ValueError("x-degree must be 4")
            if c != 0:
                self.coeffs[(tuple(e), min(a, b), max(a, b))] = c

    def __call__(self, x, alpha):
        x = np.asarray(x, dtype=float)
        alpha = np.asarray(alpha, dtype=float)
        total = 0.0
        for (e, a, b), c in self.coeffs.items():
            total = total + float(c) * np.prod(x ** np.array(e), axis=-1) * alpha[..., a] * alpha[..., b]
        return total

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(abs(v) <= tol for v in self.coeffs.values())


def substitute_psi(p: BiformQuad) -> QAlphaForm:
    """q(x, alpha) = p(x, Psi(x, alpha))."""
    n = p.n
    terms = _psi_terms(n)
    out: Dict[Tuple[Tuple[int, ...], int, int], object] = {}
    for (i, j, k, l), c in p.coeffs.items():
        for a, s1, u in terms[k]:
            for b, s2, v in terms[l]:
                key = (unit_exp(n, i, j, u, v), min(a, b), max(a, b))
                out[key] = out.get(key, 0) + c * s1 * s2
    return QAlphaForm(n, out)


@dataclass
class MatrixQuarticPoly:
    """Symmetric (n-1) x (n-1) matrix of quartic forms in x."""

    n: int
    entries: List[List[Poly]] = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.entries)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        m = self.size
        out = np.zeros(x.shape[:-1] + (m, m))
        for a in range(m):
            for b in range(m):
                out[..., a, b] = self.entries[a][b].to_float()(np.moveaxis(x, -1, 0))
        return out

    def trace(self) -> Poly:
        t = Poly(self.n)
        for a in range(self.size):
            t = t + self.entries[a][a]
        return t

    def det(self) -> Poly:
        if self.size == 1:
            return self.entries[0][0].copy()
        if self.size != 2:
            raise ValueError("determinant implemented for 1x1 and 2x2 only")
        e = self.entries
        return e[0][0] * e[1][1] - e[0][1] * e[1][0]

    def scaled(self, s: Poly) -> "MatrixQuarticPoly":
        return MatrixQuarticPoly(self.n, [[s * q for q in row] for row in self.entries])


def build_QA(q: QAlphaForm) -> MatrixQuarticPoly:
    """Symmetric Q with alpha^T Q(x) alpha = q(x, alpha)."""
    n = q.n
    m = n - 1
    exact = all(_is_exact(c) for c in q.coeffs.values())
    half = Fraction(1, 2) if exact else 0.5
    ent = [[{} for _ in range(m)] for _ in range(m)]
    for (e, a, b), c in q.coeffs.items():
        if a == b:
            ent[a][a][e] = ent[a][a].get(e, 0) + c
        else:
            ent[a][b][e] = ent[a][b].get(e, 0) + c * half
            ent[b][a][e] = ent[b][a].get(e, 0) + c * half
    return MatrixQuarticPoly(n, [[Poly(n, ent[a][b]) for b in range(m)] for a in range(m)])
