"""Problem instances

    x(t) = f(t) + int_alpha^beta k(s,t) x(s) ds + int_0^t k1(s,t) x(s) ds
                + int_0^t k2(s,t) x(s) dB(s)

and the built-in registry. All problem functions are numpy-vectorized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

Func1 = Callable[[np.ndarray], np.ndarray]
Func2 = Callable[[np.ndarray, np.ndarray], np.ndarray]


def _zero2(s, t):
    return np.zeros(np.broadcast_shapes(np.shape(s), np.shape(t)))


@dataclass(frozen=True)
class RegularityConstants:
    """Lipschitz constants (C, L, L1, L2), kernel bounds (rho, rho1, rho2)
    and solution bound sigma used by the Gronwall error bound."""

    C: float = 0.0
    L: float = 0.0
    L1: float = 0.0
    L2: float = 0.0
    rho: float = 0.0
    rho1: float = 0.0
    rho2: float = 0.0
    sigma: float = 0.0

    def __post_init__(self):
        for name, value in vars(self).items():
            if not value >= 0:
                raise ValueError(f"{name} must be non-negative, got {value}")


@dataclass(frozen=True)
class SvfieProblem:
    name: str
    f: Func1
    k: Func2 = _zero2
    k1: Func2 = _zero2
    k2: Func2 = _zero2
    alpha: float = 0.0
    beta: float = 1.0
    # (t, B(t)) -> additive per-path perturbation of f
    noise_term: Optional[Func2] = None
    exact_deterministic: Optional[Func1] = None
    constants: Optional[RegularityConstants] = None
    description: str = ""

    def __post_init__(self):
        if not 0.0 <= self.alpha < self.beta <= 1.0:
            raise ValueError(f"need 0 <= alpha < beta <= 1, got [{self.alpha}, {self.beta}]")

    @property
    def is_stochastic(self) -> bool:
        return self.noise_term is not None or self.k2 is not _zero2


def _gauss_panels(a, b, order, panels):
    """Composite Gauss-Legendre nodes/weights on [a, b]; ``a``/``b`` may be
    arrays (one interval per entry, last axis holds the nodes)."""
    x, w = np.polynomial.legendre.leggauss(order)
    a = np.asarray(a, dtype=float)[..., None]
    b = np.asarray(b, dtype=float)[..., None]
    nodes, weights = [], []
    for p in range(panels):
        lo = a + (b - a) * p / panels
        hi = a + (b - a) * (p + 1) / panels
        nodes.append((hi - lo) / 2 * x + (hi + lo) / 2)
        weights.append((hi - lo) / 2 * w * np.ones_like(nodes[-1]))
    return np.concatenate(nodes, axis=-1), np.concatenate(weights, axis=-1)


def deterministic_residual(
    problem: SvfieProblem, candidate: Func1, n_check: int = 101, order: int = 20, panels: int = 4
) -> float:
    """Max over ``n_check`` probe points of the deterministic residual of
    ``candidate`` (stochastic kernel and noise ignored)."""
    t = np.linspace(0.0, 1.0, n_check, endpoint=False)
    t = t + 0.5 / n_check
    sf, wf = _gauss_panels(problem.alpha, problem.beta, order, panels)
    fred = np.sum(wf * problem.k(sf, t[:, None]) * candidate(sf), axis=-1)
    sv, wv = _gauss_panels(np.zeros_like(t), t, order, panels)
    volt = np.sum(wv * problem.k1(sv, t[:, None]) * candidate(sv), axis=-1)
    resid = candidate(t) - problem.f(t) - fred - volt
    return float(np.max(np.abs(resid)))


# --- built-ins -----------------------------------------------------------

def _f_example1(t):
    # printed as sin(s+t); sin(1+t) makes x = t**2 the deterministic solution
    return t**2 + np.sin(1 + t) - 2 * np.cos(1 + t) - 2 * np.sin(t) - 7 * t**4 / 12


def _f_example2(t):
    return 2 - math.cos(1) - (1 + t) * math.sin(1) + 0 * t


_SQRT2 = math.sqrt(2.0)

_EX1_CONSTANTS = RegularityConstants(
    C=1.03, L=_SQRT2, L1=_SQRT2, L2=3 * _SQRT2, rho=1.0, rho1=2.0, rho2=1.0, sigma=1.0
)
_EX2_CONSTANTS = RegularityConstants(
    C=math.sin(1), L=_SQRT2, L1=_SQRT2, L2=_SQRT2 / 125, rho=2.0, rho1=1.0, rho2=1 / 125, sigma=1.0
)


def _example1() -> SvfieProblem:
    return SvfieProblem(
        name="example1",
        f=_f_example1,
        k=lambda s, t: np.cos(s + t),
        k1=lambda s, t: s + t,
        k2=lambda s, t: np.exp(-3 * (s + t)),
        noise_term=lambda t, B: B / 40,
        constants=_EX1_CONSTANTS,
        description="kernels cos(s+t), s+t, exp(-3(s+t)); noise B(t)/40",
    )


def _example1_det() -> SvfieProblem:
    return SvfieProblem(
        name="example1_det",
        f=_f_example1,
        k=lambda s, t: np.cos(s + t),
        k1=lambda s, t: s + t,
        exact_deterministic=lambda t: t**2,
        constants=_EX1_CONSTANTS,
        description="example1 without the Ito term and noise; exact solution t^2",
    )


def _example2() -> SvfieProblem:
    return SvfieProblem(
        name="example2",
        f=_f_example2,
        k=lambda s, t: s + t,
        k1=lambda s, t: s - t,
        k2=lambda s, t: np.sin(s + t) / 125,
        noise_term=lambda t, B: np.sin(B) / 250,
        constants=_EX2_CONSTANTS,
        description="kernels s+t, s-t, sin(s+t)/125; noise sin(B(t))/250",
    )


def _example2_det() -> SvfieProblem:
    return SvfieProblem(
        name="example2_det",
        f=_f_example2,
        k=lambda s, t: s + t,
        k1=lambda s, t: s - t,
        exact_deterministic=np.cos,
        constants=_EX2_CONSTANTS,
        description="example2 without the Ito term and noise; exact solution cos t",
    )


def _const_fredholm() -> SvfieProblem:
    return SvfieProblem(
        name="const_fredholm",
        f=lambda t: np.ones_like(np.asarray(t, dtype=float)),
        k=lambda s, t: np.full(np.broadcast_shapes(np.shape(s), np.shape(t)), 0.5),
        exact_deterministic=lambda t: np.full_like(np.asarray(t, dtype=float), 2.0),
        constants=RegularityConstants(rho=0.5, sigma=2.0),
        description="x = 1 + int_0^1 x/2 ds; exact solution 2",
    )


_REGISTRY: dict[str, Callable[[], SvfieProblem]] = {
    "example1": _example1,
    "example1_det": _example1_det,
    "example2": _example2,
    "example2_det": _example2_det,
    "const_fredholm": _const_fredholm,
}


def registry_names() -> list[str]:
    return list(_REGISTRY)


def registry_get(name: str) -> SvfieProblem:
    try:
        return _REGISTRY[name]()
    except KeyError:
        raise KeyError(f"unknown problem {name!r}; known: {', '.join(_REGISTRY)}") from None
