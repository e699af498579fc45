"""Bundled regression data: a proper cross-positive map on 3x3 matrices and
the orthogonal seed pairs it was generated from."""

from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources
from typing import List, Tuple

import numpy as np

from .polyalg import SymMapTensor


def _load(name: str) -> dict:
    return json.loads(resources.files("crosspos.data").joinpath(name).read_text())


def example_map() -> SymMapTensor:
    """The 3x3 proper cross-positive map (float coefficients)."""
    return SymMapTensor.from_json(_load("example_map.json"))


def load_seed_pairs(data: dict, exact: bool = False) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Parse a seeds file: ``{"n": n, "points": [{"x": [...], "y": [...]}, ...]}``."""
    conv = Fraction if exact else (lambda v: float(Fraction(v)) if isinstance(v, str) else float(v))
    out = []
    for pt in data["points"]:
        x = np.array([conv(v) for v in pt["x"]], dtype=object if exact else float)
        y = np.array([conv(v) for v in pt["y"]], dtype=object if exact else float)
        out.append((x, y))
    return out


def example_seed_pairs(exact: bool = False) -> List[Tuple[np.ndarray, np.ndarray]]:
    """The five orthogonal pairs in R^3 used to generate :func:`example_map`."""
    return load_seed_pairs(_load("example_seeds.json"), exact)


def block_embedded_map(A: SymMapTensor) -> SymMapTensor:
    """B(X) = [[0, 0], [0, A(D(X))]] on (n+1) x (n+1), D deleting the first row and column."""
    n = A.n
    A = A.to_float()

    def fn(X):
        out = np.zeros((n + 1, n + 1))
        out[1:, 1:] = A(np.asarray(X, dtype=float)[1:, 1:])
        return out

    return SymMapTensor.from_function(n + 1, fn)


def reduction_map(n: int) -> SymMapTensor:
    """X -> Tr(X) I - X, a positive map whose biform is a sum of squares of 2x2 minors."""
    return SymMapTensor.from_function(n, lambda X: np.trace(X) * np.eye(n) - X)
