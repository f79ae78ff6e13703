"""Rademacher, Walsh and block-pulse functions on [0, 1).

Coefficient vectors follow the cell-integral convention: ``F[i]`` is the
integral of ``f`` over cell ``[ih, (i+1)h)``, so the block-pulse (cell mean)
coefficient is ``m * F[i]``. Kernel matrices are indexed ``K[i, j]`` with
``s`` in cell ``i`` and ``t`` in cell ``j``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class Resolution:
    """Number of cells ``m = 2**k`` on the unit interval."""

    m: int

    def __post_init__(self):
        m = self.m
        if isinstance(m, bool) or not isinstance(m, (int, np.integer)):
            raise TypeError(f"m must be an integer, got {m!r}")
        if m < 1 or m & (m - 1):
            raise ValueError(f"m must be a positive power of two, got {m}")
        object.__setattr__(self, "m", int(m))

    @classmethod
    def from_k(cls, k: int) -> Resolution:
        return cls(2**k)

    @property
    def k(self) -> int:
        return self.m.bit_length() - 1

    @property
    def h(self) -> float:
        # dyadic, so h * m == 1 exactly
        return 1.0 / self.m

    def cell_of(self, t):
        """Index of the cell containing ``t``."""
        t = _check_unit(t)
        return np.floor(t * self.m).astype(np.int64)

    def midpoints(self) -> np.ndarray:
        return (np.arange(self.m) + 0.5) * self.h


def as_resolution(res) -> Resolution:
    return res if isinstance(res, Resolution) else Resolution(res)


def _check_unit(t):
    arr = np.asarray(t, dtype=float)
    if not np.all((arr >= 0.0) & (arr < 1.0)):
        raise ValueError(f"t must lie in [0, 1), got {t!r}")
    return arr


def _scalar_or_array(arr: np.ndarray, like):
    if np.ndim(like) == 0:
        return int(arr) if arr.dtype.kind == "i" else float(arr)
    return arr


def rademacher(i: int, t):
    """Right-continuous square wave ``(-1)**floor(2**i * t)``; ``r_0 = 1``.

    Agrees with ``sgn(sin(2**i * pi * t))`` away from dyadic breakpoints and
    never returns 0.
    """
    if i < 0:
        raise ValueError(f"Rademacher index must be non-negative, got {i}")
    arr = _check_unit(t)
    if i == 0:
        out = np.ones(arr.shape, dtype=np.int64)
    else:
        # ldexp keeps the scaling exact for dyadic inputs
        out = 1 - 2 * (np.floor(np.ldexp(arr, i)).astype(np.int64) & 1)
    return _scalar_or_array(out, t)


def walsh_eval(n: int, t):
    """Paley-ordered Walsh function ``w_n(t)``.

    Bit ``p`` of ``n`` (least significant is ``p = 0``) selects the factor
    ``r_{p+1}``.
    """
    if n < 0:
        raise ValueError(f"Walsh index must be non-negative, got {n}")
    arr = _check_unit(t)
    out = np.ones(arr.shape, dtype=np.int64)
    p = 0
    while n >> p:
        if (n >> p) & 1:
            out = out * rademacher(p + 1, arr)
        p += 1
    return _scalar_or_array(out, t)


@lru_cache(maxsize=None)
def _walsh_matrix_cached(m: int) -> np.ndarray:
    mids = Resolution(m).midpoints()
    T = np.empty((m, m), dtype=np.int64)
    for i in range(m):
        T[i] = walsh_eval(i, mids)
    T.setflags(write=False)
    return T


def walsh_matrix(res) -> np.ndarray:
    """Walsh operational matrix ``T[i, j] = w_i(midpoint of cell j)``.

    Integer entries in {-1, +1}; symmetric with ``T @ T == m * I``. The
    returned array is read-only and shared between calls.
    """
    return _walsh_matrix_cached(as_resolution(res).m)


def walsh_vector(t, res) -> np.ndarray:
    """``W(t) = [w_0(t), ..., w_{m-1}(t)]``."""
    res = as_resolution(res)
    return walsh_matrix(res)[:, int(res.cell_of(t))].astype(float)


def walsh_coefficients(F, res=None) -> np.ndarray:
    """Walsh coefficients ``c_i = integral of f * w_i`` from cell integrals."""
    F = np.asarray(F, dtype=float)
    res = as_resolution(res if res is not None else len(F))
    return walsh_matrix(res) @ F


def block_pulse(i: int, t, res):
    """Indicator of cell ``i``."""
    res = as_resolution(res)
    out = (res.cell_of(t) == i).astype(np.int64)
    return _scalar_or_array(out, t)


@lru_cache(maxsize=32)
def _gauss_legendre(order: int):
    if order < 1:
        raise ValueError(f"quadrature order must be >= 1, got {order}")
    x, w = np.polynomial.legendre.leggauss(order)
    return (x + 1.0) / 2.0, w / 2.0


def _cell_nodes(res: Resolution, order: int):
    x, w = _gauss_legendre(order)
    nodes = (np.arange(res.m)[:, None] + x[None, :]) * res.h
    return nodes, w * res.h


def _evaluate(func, *args) -> np.ndarray:
    shape = np.broadcast_shapes(*(a.shape for a in args))
    return np.broadcast_to(np.asarray(func(*args), dtype=float), shape)


def cell_integrals_1d(f, res, order: int = 5) -> np.ndarray:
    """``F[i]`` = integral of ``f`` over cell ``i`` by per-cell Gauss-Legendre.

    ``f`` must accept numpy arrays.
    """
    res = as_resolution(res)
    nodes, w = _cell_nodes(res, order)
    return _evaluate(f, nodes) @ w


def cell_integrals_2d(k, res, order: int = 5) -> np.ndarray:
    """``K[i, j]`` = double integral of ``k(s, t)`` over ``s`` in cell ``i``,
    ``t`` in cell ``j`` (tensor Gauss-Legendre)."""
    res = as_resolution(res)
    nodes, w = _cell_nodes(res, order)
    s = nodes[:, None, :, None]
    t = nodes[None, :, None, :]
    vals = _evaluate(k, s, t)
    return np.einsum("ijab,a,b->ij", vals, w, w)


def reconstruct(coeffs, t):
    """Staircase ``F^T T_W W(t) = m * F[floor(m t)]``."""
    coeffs = np.asarray(coeffs, dtype=float)
    res = as_resolution(len(coeffs))
    out = res.m * coeffs[res.cell_of(t)]
    return float(out) if np.ndim(t) == 0 else out
