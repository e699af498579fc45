"""Sparse homogeneous polynomials over exact rationals or floats.

A tiny dict-of-terms representation used internally for certificate
reconstruction, the Psi substitution and ternary forms.  Keys are exponent
tuples, values are ``Fraction`` or ``float``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Tuple

import numpy as np

Exponent = Tuple[int, ...]


@lru_cache(maxsize=None)
def monomials(nvars: int, degree: int) -> Tuple[Exponent, ...]:
    """All exponent tuples of the given total degree, in lexicographic order (descending)."""
    if nvars == 1:
        return ((degree,),)
    out = []
    for first in range(degree, -1, -1):
        for rest in monomials(nvars - 1, degree - first):
            out.append((first,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def bimonomials(n: int, dx: int, dy: int) -> Tuple[Exponent, ...]:
    """Exponents over (x_1..x_n, y_1..y_n) of bidegree (dx, dy)."""
    return tuple(a + b for a in monomials(n, dx) for b in monomials(n, dy))


def add_exp(a: Exponent, b: Exponent) -> Exponent:
    return tuple(i + j for i, j in zip(a, b))


def unit_exp(nvars: int, *idx: int) -> Exponent:
    e = [0] * nvars
    for i in idx:
        e[i] += 1
    return tuple(e)


class Poly:
    """Sparse polynomial in ``nvars`` variables."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Dict[Exponent, object] | None = None):
        self.nvars = nvars
        self.terms: Dict[Exponent, object] = {}
        if terms:
            for k, v in terms.items():
                if v != 0:
                    self.terms[tuple(k)] = v

    @classmethod
    def variable(cls, nvars: int, i: int, coeff=1) -> "Poly":
        return cls(nvars, {unit_exp(nvars, i): coeff})

    @classmethod
    def constant(cls, nvars: int, c) -> "Poly":
        return cls(nvars, {(0,) * nvars: c})

    def copy(self) -> "Poly":
        return Poly(self.nvars, dict(self.terms))

    def __add__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for k, v in other.terms.items():
            s = out.get(k, 0) + v
            if s == 0:
                out.pop(k, None)
            else:
                out[k] = s
        return Poly(self.nvars, out)

    def __radd__(self, other) -> "Poly":
        if other == 0:
            return self
        return self + Poly.constant(self.nvars, other)

    def __neg__(self) -> "Poly":
        return Poly(self.nvars, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            return Poly(self.nvars, {k: v * other for k, v in self.terms.items()})
        out: Dict[Exponent, object] = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                k = add_exp(k1, k2)
                out[k] = out.get(k, 0) + v1 * v2
        return Poly(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        out = Poly.constant(self.nvars, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.nvars == other.nvars and self.terms == other.terms

    def __repr__(self) -> str:
        return f"Poly({self.nvars}, {self.terms!r})"

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(abs(v) <= tol for v in self.terms.values())

    def max_abs(self) -> float:
        return max((abs(float(v)) for v in self.terms.values()), default=0.0)

    def degrees(self) -> set:
        return {sum(k) for k in self.terms}

    def to_float(self) -> "Poly":
        return Poly(self.nvars, {k: float(v) for k, v in self.terms.items()})

    def __call__(self, point) -> object:
        """Evaluate at a point; ``point`` may carry a trailing batch axis."""
        pt = list(point)
        total = 0
        for k, v in self.terms.items():
            term = v
            for xi, e in zip(pt, k):
                if e:
                    term = term * xi ** e
            total = total + term
        return total

    def evaluate_batch(self, pts: np.ndarray) -> np.ndarray:
        """Evaluate at rows of ``pts`` (shape (m, nvars)) in floating point."""
        pts = np.asarray(pts, dtype=float)
        if not self.terms:
            return np.zeros(pts.shape[0])
        exps = np.array(list(self.terms.keys()), dtype=float)
        coef = np.array([float(v) for v in self.terms.values()])
        with np.errstate(divide="ignore", invalid="ignore"):
            logs = np.prod(pts[:, None, :] ** exps[None, :, :], axis=2)
        return logs @ coef

    def substitute_linear(self, images: Iterable["Poly"]) -> "Poly":
        """Compose with variable images ``x_i -> images[i]`` (all in a common ring)."""
        images = list(images)
        m = images[0].nvars
        out = Poly(m)
        cache: Dict[Tuple[int, int], Poly] = {}
        for k, v in self.terms.items():
            term = Poly.constant(m, v)
            for i, e in enumerate(k):
                if e:
                    key = (i, e)
                    if key not in cache:
                        cache[key] = images[i] ** e
                    term = term * cache[key]
            out = out + term
        return out


def as_scalar(value, exact: bool):
    """Parse a number or rational string into Fraction (exact) or float."""
    if isinstance(value, str):
        value = Fraction(value)
    if exact:
        return Fraction(value)
    return float(value)
