"""Block-pulse operational matrices and their Walsh conjugates."""

from __future__ import annotations

import numpy as np

from svfie.basis import as_resolution, walsh_matrix
from svfie.stochastic import BrownianPath


def integration_matrix(res) -> np.ndarray:
    """``P`` with ``integral_0^t Phi = P Phi(t)``: ``h/2`` on the diagonal,
    ``h`` above it."""
    res = as_resolution(res)
    h = res.h
    return np.triu(np.full((res.m, res.m), h), 1) + np.eye(res.m) * (h / 2)


def stochastic_matrix(path: BrownianPath, res=None) -> np.ndarray:
    """``P_S`` with ``integral_0^t Phi dB = P_S Phi(t)`` for one path.

    Row ``i``: ``B(midpoint_i) - B(ih)`` on the diagonal and
    ``B((i+1)h) - B(ih)`` to the right of it.
    """
    if res is not None and as_resolution(res).m != path.m:
        raise ValueError(f"path sampled for m={path.m}, expected m={as_resolution(res).m}")
    B = path.values
    start = B[0:-1:2]
    diag = B[1::2] - start
    full = B[2::2] - start
    m = path.m
    PS = np.triu(np.broadcast_to(full[:, None], (m, m)), 1)
    PS[np.diag_indices(m)] = diag
    return PS


def walsh_conjugate(T, M) -> np.ndarray:
    """``(1/m) T M T``; maps a block-pulse operational matrix to the Walsh
    basis and back (``T T = m I``)."""
    T = np.asarray(T)
    M = np.asarray(M, dtype=float)
    m = T.shape[0]
    if T.shape != (m, m) or M.shape != (m, m):
        raise ValueError(f"dimension mismatch: T {T.shape}, M {M.shape}")
    return (T @ M @ T) / m


def integration_matrix_walsh(res) -> np.ndarray:
    """``Lambda`` with ``integral_0^t W = Lambda W(t)``."""
    res = as_resolution(res)
    return walsh_conjugate(walsh_matrix(res), integration_matrix(res))


def stochastic_matrix_walsh(path: BrownianPath) -> np.ndarray:
    """``Lambda_S`` with ``integral_0^t W dB = Lambda_S W(t)``."""
    return walsh_conjugate(walsh_matrix(path.m), stochastic_matrix(path))
