"""Solver-agnostic semidefinite feasibility problems.

An :class:`SdpProblem` has symmetric PSD blocks, free scalar variables and
sparse linear equalities over the concatenation

    [vec(X_1), ..., vec(X_m), f]

where ``vec`` is row-major over the full ``size x size`` block.  Triplet
JSON layout::

    {"blocks": [{"name": str, "size": int}, ...],
     "free_vars": int,
     "num_equalities": int,
     "triplets": {"row": [...], "col": [...], "val": [...]},
     "rhs": [...],
     "objective": "feasibility" | {"maximize": free_var_index}}

The bundled backend calls cvxpy with Clarabel (falling back to SCS).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

SOLVER_OPTIONS = {"SCS": {"max_iters": 20000, "eps": 1e-9}}


@dataclass
class SdpProblem:
    blocks: List[Tuple[str, int]]
    free_vars: int
    A: sp.csr_matrix
    b: np.ndarray
    maximize: Optional[int] = None

    def __post_init__(self):
        self.A = sp.csr_matrix(self.A)
        self.b = np.asarray(self.b, dtype=float)
        if self.A.shape != (len(self.b), self.num_vars):
            raise ValueError(f"equality matrix has shape {self.A.shape}, expected ({len(self.b)}, {self.num_vars})")
        if self.maximize is not None and not 0 <= self.maximize < self.free_vars:
            raise ValueError("objective must designate a declared free variable")

    @property
    def num_vars(self) -> int:
        return sum(s * s for _, s in self.blocks) + self.free_vars

    def offsets(self) -> Dict[str, int]:
        out, pos = {}, 0
        for name, s in self.blocks:
            out[name] = pos
            pos += s * s
        out["free"] = pos
        return out

    def to_json(self) -> dict:
        A = self.A.tocoo()
        return {
            "blocks": [{"name": n, "size": s} for n, s in self.blocks],
            "free_vars": self.free_vars,
            "num_equalities": int(len(self.b)),
            "triplets": {"row": A.row.tolist(), "col": A.col.tolist(), "val": A.data.tolist()},
            "rhs": self.b.tolist(),
            "objective": "feasibility" if self.maximize is None else {"maximize": self.maximize},
        }

    @classmethod
    def from_json(cls, data: dict) -> "SdpProblem":
        blocks = [(b["name"], int(b["size"])) for b in data["blocks"]]
        nv = sum(s * s for _, s in blocks) + int(data["free_vars"])
        t = data["triplets"]
        A = sp.coo_matrix((t["val"], (t["row"], t["col"])), shape=(int(data["num_equalities"]), nv))
        obj = data["objective"]
        return cls(blocks, int(data["free_vars"]), A, np.asarray(data["rhs"], dtype=float),
                   None if obj == "feasibility" else int(obj["maximize"]))


@dataclass
class SdpSolution:
    status: str  # optimal | infeasible | unknown
    blocks: Dict[str, np.ndarray] = field(default_factory=dict)
    free: np.ndarray = field(default_factory=lambda: np.zeros(0))
    duals: np.ndarray = field(default_factory=lambda: np.zeros(0))
    objective: Optional[float] = None
    solver: str = ""
    detail: str = ""


class SdpBuilder:
    """Accumulate equality triplets by block name."""

    def __init__(self, blocks: Sequence[Tuple[str, int]], free_vars: int):
        self.blocks = list(blocks)
        self.free_vars = free_vars
        self._off = {}
        pos = 0
        for name, s in self.blocks:
            self._off[name] = (pos, s)
            pos += s * s
        self._off["free"] = (pos, None)
        self.rows: List[np.ndarray] = []
        self.cols: List[np.ndarray] = []
        self.vals: List[np.ndarray] = []
        self.rhs: List[float] = []

    def add_block_terms(self, rows, block: str, i, j, vals):
        """Add coefficient ``vals`` on entries X[i, j] of ``block`` in equality ``rows``."""
        off, s = self._off[block]
        self._push(rows, off + np.asarray(i) * s + np.asarray(j), vals)

    def add_free_terms(self, rows, k, vals):
        off, _ = self._off["free"]
        self._push(rows, off + np.asarray(k), vals)

    def _push(self, rows, cols, vals):
        rows, cols, vals = np.broadcast_arrays(np.asarray(rows), np.asarray(cols), np.asarray(vals, dtype=float))
        self.rows.append(rows.ravel())
        self.cols.append(cols.ravel())
        self.vals.append(vals.ravel())

    def new_rows(self, rhs) -> np.ndarray:
        rhs = np.atleast_1d(np.asarray(rhs, dtype=float))
        start = len(self.rhs)
        self.rhs.extend(rhs.tolist())
        return np.arange(start, start + len(rhs))

    def build(self, maximize: Optional[int] = None) -> SdpProblem:
        nv = sum(s * s for _, s in self.blocks) + self.free_vars
        rows = np.concatenate(self.rows) if self.rows else np.zeros(0, int)
        cols = np.concatenate(self.cols) if self.cols else np.zeros(0, int)
        vals = np.concatenate(self.vals) if self.vals else np.zeros(0)
        A = sp.coo_matrix((vals, (rows, cols)), shape=(len(self.rhs), nv)).tocsr()
        A.sum_duplicates()
        return SdpProblem(self.blocks, self.free_vars, A, np.array(self.rhs), maximize)


def solve(problem: SdpProblem, solver: str = "CLARABEL", verbose: bool = False,
          fallback: bool = True) -> SdpSolution:
    """Solve with cvxpy; returns primal blocks, free values and equality duals.

    If the primary solver fails and ``fallback`` is set, SCS is tried next.
    """
    import cvxpy as cp

    Xs = [cp.Variable((s, s), symmetric=True, name=name) for name, s in problem.blocks]
    parts = [cp.vec(X, order="C") for X in Xs]
    f = cp.Variable(problem.free_vars, name="free") if problem.free_vars else None
    if f is not None:
        parts.append(f)
    z = cp.hstack(parts) if len(parts) > 1 else parts[0]
    eq = problem.A @ z == problem.b
    cons = [eq] + [X >> 0 for X in Xs]
    obj = cp.Maximize(f[problem.maximize]) if problem.maximize is not None else cp.Minimize(0)
    prob = cp.Problem(obj, cons)

    status, used, detail = "unknown", solver, ""
    names = [solver] + ([s for s in ("SCS",) if s != solver] if fallback else [])
    for name in names:
        used = name
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                prob.solve(solver=name, verbose=verbose, **SOLVER_OPTIONS.get(name, {}))
        except cp.error.SolverError as exc:
            detail = str(exc)
            continue
        st = prob.status
        if st in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
            status = "optimal"
            detail = st
        elif st in (cp.INFEASIBLE, cp.INFEASIBLE_INACCURATE):
            status = "infeasible"
            detail = st
        else:
            status, detail = "unknown", str(st)
        if status != "unknown":
            break
    sol = SdpSolution(status=status, solver=used, detail=detail)
    if status == "optimal":
        sol.blocks = {name: np.asarray(X.value) for (name, _), X in zip(problem.blocks, Xs)}
        sol.free = np.asarray(f.value) if f is not None else np.zeros(0)
        sol.duals = np.asarray(eq.dual_value) if eq.dual_value is not None else np.zeros(len(problem.b))
        sol.objective = float(prob.value) if problem.maximize is not None else None
    return sol


def psd_floor(M: np.ndarray) -> float:
    """Smallest eigenvalue of the symmetric part of M."""
    if M.size == 0:
        return 0.0
    return float(np.linalg.eigvalsh(0.5 * (M + M.T))[0])


def clip_psd(M: np.ndarray) -> np.ndarray:
    """Nearest PSD matrix in Frobenius norm."""
    w, V = np.linalg.eigh(0.5 * (M + M.T))
    return (V * np.clip(w, 0.0, None)) @ V.T


def min_norm_correction(A: sp.spmatrix, r: np.ndarray) -> np.ndarray:
    """Least-norm dz with A dz = r (A with full row rank, or least squares otherwise)."""
    A = sp.csr_matrix(A)
    AAt = (A @ A.T).toarray()
    y = np.linalg.lstsq(AAt, r, rcond=None)[0]
    return A.T @ y
