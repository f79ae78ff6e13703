"""Error norms, convergence rates, Monte Carlo ensembles and the Gronwall
mean-square error bound."""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from svfie.basis import as_resolution
from svfie.problems import RegularityConstants, SvfieProblem
from svfie.solver import SolveResult, assemble, discretize, solve
from svfie.stochastic import SeedPlan, brownian_path, derive_seeds

DEFAULT_PROBES = (0.1, 0.3, 0.5, 0.7, 0.9)


@dataclass(frozen=True)
class ErrorReport:
    m: int
    l2_error: float
    max_error: float
    probe_errors: tuple[tuple[float, float], ...]


def l2_error(approx, exact, n_quad: int = 4096, probes=DEFAULT_PROBES) -> ErrorReport:
    """Discrete L2 and max error of ``approx - exact`` on the midpoints of a
    uniform ``n_quad`` grid. ``approx`` is a SolveResult or any vectorized
    callable on [0, 1)."""
    t = (np.arange(n_quad) + 0.5) / n_quad
    diff = np.abs(np.asarray(approx(t), dtype=float) - np.asarray(exact(t), dtype=float))
    probes = np.asarray(probes, dtype=float)
    pdiff = np.abs(np.asarray(approx(probes), dtype=float) - np.asarray(exact(probes), dtype=float))
    m = approx.res.m if isinstance(approx, SolveResult) else 0
    return ErrorReport(
        m=m,
        l2_error=float(np.sqrt(np.mean(diff**2))),
        max_error=float(diff.max()),
        probe_errors=tuple(zip(probes.tolist(), pdiff.tolist())),
    )


def convergence_rate(errors) -> float:
    """Negated least-squares slope of log2(error) against log2(m).

    ``errors`` is a sequence of ``(m, error)`` with ``m`` doubling at each
    step. Returns ``inf`` (saturated) when any error is exactly zero.
    """
    errors = list(errors)
    if len(errors) < 3:
        raise ValueError(f"need at least 3 (m, error) pairs, got {len(errors)}")
    ms = np.array([e[0] for e in errors], dtype=float)
    errs = np.array([e[1] for e in errors], dtype=float)
    if np.any(ms[1:] != 2 * ms[:-1]):
        raise ValueError(f"m must double at every step, got {ms.astype(int).tolist()}")
    if np.any(errs < 0) or not np.all(np.isfinite(errs)):
        raise ValueError("errors must be finite and non-negative")
    if np.any(errs == 0):
        warnings.warn("zero error encountered; convergence rate saturated", RuntimeWarning)
        return math.inf
    slope = np.polyfit(np.log2(ms), np.log2(errs), 1)[0]
    return float(-slope)


def convergence_study(problem: SvfieProblem, ms, n_quad: int = 4096, order: int = 5):
    """Deterministic solves of ``problem`` against its exact solution.

    Returns ``(reports, rate)``.
    """
    if problem.exact_deterministic is None:
        raise ValueError(f"problem {problem.name!r} has no exact deterministic solution")
    reports = []
    for m in ms:
        result = solve(assemble(problem, m, None, order))
        reports.append(l2_error(result, problem.exact_deterministic, n_quad))
    rate = convergence_rate([(r.m, r.l2_error) for r in reports])
    return reports, rate


@dataclass(frozen=True)
class McSummary:
    n_paths: int
    m: int
    master_seed: int
    probes: tuple[float, ...]
    mean: tuple[float, ...]
    std: tuple[float, ...]
    stderr: tuple[float, ...]


class MonteCarloError(RuntimeError):
    def __init__(self, path_index: int, cause: Exception):
        super().__init__(f"path {path_index} failed: {cause}")
        self.path_index = path_index


def monte_carlo(
    problem: SvfieProblem, res, n_paths: int, plan: SeedPlan, probes=DEFAULT_PROBES,
    order: int = 5, workers: int | None = None,
) -> McSummary:
    """Solve once per derived path seed and summarize ``x_m`` at ``probes``.

    The result depends only on ``(plan.master_seed, m, n_paths, problem)``;
    ``workers`` changes scheduling, not the reduction order.
    """
    if n_paths < 1:
        raise ValueError(f"n_paths must be >= 1, got {n_paths}")
    res = as_resolution(res)
    probes = tuple(float(p) for p in probes)
    cells = res.cell_of(np.asarray(probes))
    disc = discretize(problem, res, order)
    seeds = derive_seeds(plan, n_paths)

    def one(index: int) -> np.ndarray:
        try:
            path = brownian_path(seeds[index], res)
            result = solve(assemble(problem, res, path, order, disc=disc))
        except Exception as exc:
            raise MonteCarloError(index, exc) from exc
        return result.cell_values()[cells]

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one, range(n_paths)))
    else:
        rows = [one(i) for i in range(n_paths)]
    samples = np.vstack(rows)
    mean = samples.mean(axis=0)
    # shifting by the first path keeps identical samples at exactly zero spread
    centred = samples - samples[0]
    std = centred.std(axis=0, ddof=1) if n_paths > 1 else np.zeros(len(probes))
    stderr = std / math.sqrt(n_paths)
    return McSummary(
        n_paths=n_paths,
        m=res.m,
        master_seed=int(plan.master_seed),
        probes=probes,
        mean=tuple(mean.tolist()),
        std=tuple(std.tolist()),
        stderr=tuple(stderr.tolist()),
    )


@dataclass(frozen=True)
class GronwallBound:
    R1: float
    R2: float
    bound: float


def gronwall_bound(rc: RegularityConstants, alpha: float, beta: float, h: float) -> GronwallBound:
    """Mean-square error bound ``R1 * exp(R2)`` on ``[0, 1)``."""
    if not 0.0 < h <= 1.0:
        raise ValueError(f"h must lie in (0, 1], got {h}")
    if not 0.0 <= alpha < beta:
        raise ValueError(f"need 0 <= alpha < beta, got [{alpha}, {beta}]")
    for name, value in vars(rc).items():
        if value < 0:
            raise ValueError(f"{name} must be non-negative, got {value}")
    r2h = math.sqrt(2.0) * h
    R1 = 7 * (
        rc.C**2 * h**2
        + 2 * (beta - alpha) * (r2h * rc.L * rc.sigma) ** 2
        + 2 * (r2h * rc.L1 * rc.sigma) ** 2
        + 2 * (r2h * rc.L2 * rc.sigma) ** 2
    )
    R2 = 7 * (2 * (rc.rho + r2h * rc.L) ** 2 + 2 * (rc.rho1 + r2h * rc.L1) ** 2 + 2 * (rc.rho2 + r2h * rc.L2) ** 2)
    if R1 == 0.0:
        bound = 0.0
    else:
        try:
            bound = R1 * math.exp(R2)
        except OverflowError:
            bound = math.inf
    return GronwallBound(R1=R1, R2=R2, bound=bound)
