"""Assembly and solution of the Walsh operational-matrix system.

Expanding ``x``, ``f`` and the kernels in Walsh functions and collapsing the
products with ``T_W T_W = m I`` leaves the linear system

    X - m K^T X - m diag(H1) - m diag(H2) = F,
    H1 = m K1^T diag(X) P,   H2 = m K2^T diag(X) P_S,

in the cell-integral coefficients ``X``. Since
``diag(K1^T diag(X) P)_j = sum_i K1[i, j] X[i] P[i, j]`` the system matrix is

    A = I - m K^T - m^2 (K1 * P)^T - m^2 (K2 * P_S)^T

with ``*`` the entrywise product. ``x_m(t) = m X[floor(m t)]``.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from svfie.basis import Resolution, as_resolution, cell_integrals_1d, cell_integrals_2d, walsh_matrix
from svfie.operational import integration_matrix, stochastic_matrix
from svfie.problems import SvfieProblem
from svfie.stochastic import BrownianPath, zero_path

log = logging.getLogger(__name__)

COND_WARN = 1e12


class SingularSystemError(np.linalg.LinAlgError):
    pass


class IllConditionedWarning(RuntimeWarning):
    pass


def fredholm_cell_mask(problem: SvfieProblem, res: Resolution) -> np.ndarray:
    """Boolean mask of the cells making up ``[alpha, beta]``."""
    lo, hi = problem.alpha * res.m, problem.beta * res.m
    if abs(lo - round(lo)) > 1e-9 or abs(hi - round(hi)) > 1e-9:
        raise ValueError(
            f"Fredholm limits [{problem.alpha}, {problem.beta}] are not aligned to cells of width {res.h}"
        )
    cells = np.arange(res.m)
    return (cells >= round(lo)) & (cells < round(hi))


@dataclass(frozen=True, eq=False)
class Discretization:
    """Path-independent part of the system: cell integrals of ``f`` and the
    kernels, ``P`` and ``T_W``. Reused across Monte Carlo paths."""

    problem: SvfieProblem
    res: Resolution
    F: np.ndarray
    K: np.ndarray
    K1: np.ndarray
    K2: np.ndarray
    P: np.ndarray
    T: np.ndarray
    # A without the stochastic block
    A_det: np.ndarray
    K2P_weight: np.ndarray


def discretize(problem: SvfieProblem, res, order: int = 5) -> Discretization:
    res = as_resolution(res)
    m = res.m
    mask = fredholm_cell_mask(problem, res)
    F = cell_integrals_1d(problem.f, res, order)
    K = cell_integrals_2d(problem.k, res, order) * mask[:, None]
    K1 = cell_integrals_2d(problem.k1, res, order)
    K2 = cell_integrals_2d(problem.k2, res, order)
    P = integration_matrix(res)
    A_det = np.eye(m) - m * K.T - m * m * (K1 * P).T
    return Discretization(problem, res, F, K, K1, K2, P, walsh_matrix(res), A_det, m * m * K2.T)


def noise_coefficients(problem: SvfieProblem, path: BrownianPath) -> np.ndarray:
    """Per-path addition to ``F``: the noise term at cell midpoints times ``h``."""
    if problem.noise_term is None:
        return np.zeros(path.m)
    mids = path.res.midpoints()
    return np.asarray(problem.noise_term(mids, path.at_midpoints()), dtype=float) * path.res.h


@dataclass(frozen=True, eq=False)
class AssembledSystem:
    A: np.ndarray
    F: np.ndarray
    res: Resolution
    method: str
    path_id: str
    PS: np.ndarray = field(repr=False)


def _check_path(res: Resolution, path: BrownianPath | None) -> BrownianPath:
    if path is None:
        return zero_path(res)
    if path.m != res.m:
        raise ValueError(f"path resolution m={path.m} does not match m={res.m}")
    return path


def assemble(
    problem: SvfieProblem, res, path: BrownianPath | None = None, order: int = 5,
    disc: Discretization | None = None,
) -> AssembledSystem:
    """Walsh-method system for one path (``None`` means ``B = 0``)."""
    res = as_resolution(res)
    path = _check_path(res, path)
    if disc is None:
        disc = discretize(problem, res, order)
    elif disc.res != res:
        raise ValueError(f"discretization is for m={disc.res.m}, expected m={res.m}")
    PS = stochastic_matrix(path)
    A = disc.A_det - disc.K2P_weight * PS.T
    F = disc.F + noise_coefficients(problem, path)
    return AssembledSystem(A, F, res, "WFM", path.path_id, PS)


def literal_operator(disc: Discretization, PS: np.ndarray, X) -> np.ndarray:
    """Left-hand side of the system with the diagonal-extraction terms
    formed explicitly from ``diag(X)``; used to check ``A @ X``."""
    X = np.asarray(X, dtype=float)
    m = disc.res.m
    Xt = np.diag(X)
    H1 = m * disc.K1.T @ Xt @ disc.P
    H2 = m * disc.K2.T @ Xt @ PS
    return X - m * disc.K.T @ X - m * np.diag(H1) - m * np.diag(H2)


@dataclass(frozen=True, eq=False)
class SolveResult:
    X: np.ndarray
    res: Resolution
    method: str
    path_id: str
    residual: float
    condition: float

    def cell_values(self) -> np.ndarray:
        """Value of the staircase ``x_m`` on each cell."""
        return self.res.m * self.X if self.method == "WFM" else self.X.copy()

    def __call__(self, t):
        return reconstruct_solution(self, t)


def _solve_dense(A: np.ndarray, F: np.ndarray):
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(F))):
        raise SingularSystemError("system contains non-finite entries")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(A, check_finite=False)
    if np.any(np.diag(lu) == 0.0):
        raise SingularSystemError("LU factorization hit an exactly zero pivot")
    X = scipy.linalg.lu_solve((lu, piv), F, check_finite=False)
    cond = float(np.linalg.cond(A, 1))
    if not math.isfinite(cond) or cond > COND_WARN:
        warnings.warn(f"system condition estimate {cond:.3g} exceeds {COND_WARN:g}", IllConditionedWarning)
    scale = max(np.linalg.norm(F), np.finfo(float).tiny)
    residual = float(np.linalg.norm(A @ X - F) / scale)
    return X, residual, cond


def solve(system: AssembledSystem) -> SolveResult:
    """LU with partial pivoting."""
    X, residual, cond = _solve_dense(system.A, system.F)
    log.debug("solved %s m=%d residual=%.2e cond=%.2e", system.method, system.res.m, residual, cond)
    return SolveResult(X, system.res, system.method, system.path_id, residual, cond)


def assemble_bpf(problem: SvfieProblem, res, path: BrownianPath | None = None, order: int = 5) -> AssembledSystem:
    """Block-pulse comparator with cell-mean coefficients:

        X_b = F_b + h K_b^T X_b + hat(K1_b^T diag(X_b) P) + hat(K2_b^T diag(X_b) P_S)
    """
    res = as_resolution(res)
    path = _check_path(res, path)
    m, h = res.m, res.h
    mask = fredholm_cell_mask(problem, res)
    f_b = m * cell_integrals_1d(problem.f, res, order)
    if problem.noise_term is not None:
        f_b = f_b + np.asarray(problem.noise_term(res.midpoints(), path.at_midpoints()), dtype=float)
    k_b = m * m * cell_integrals_2d(problem.k, res, order) * mask[:, None]
    k1_b = m * m * cell_integrals_2d(problem.k1, res, order)
    k2_b = m * m * cell_integrals_2d(problem.k2, res, order)
    P = integration_matrix(res)
    PS = stochastic_matrix(path)
    # hat(K^T diag(X) Q)_j = sum_i K[i, j] Q[i, j] X[i]
    A = np.eye(m) - h * k_b.T - np.einsum("ij,ij->ji", k1_b, P) - np.einsum("ij,ij->ji", k2_b, PS)
    return AssembledSystem(A, f_b, res, "BPF", path.path_id, PS)


def solve_bpf(problem: SvfieProblem, res, path: BrownianPath | None = None, order: int = 5) -> SolveResult:
    return solve(assemble_bpf(problem, res, path, order))


def reconstruct_solution(result: SolveResult, t):
    """``m X[floor(m t)]`` for the Walsh method, ``X_b[floor(m t)]`` for BPF."""
    vals = result.cell_values()[result.res.cell_of(t)]
    return float(vals) if np.ndim(t) == 0 else vals
