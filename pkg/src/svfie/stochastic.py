"""Seeded Brownian paths on the half-step grid and a left-point Ito oracle."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from svfie.basis import Resolution, as_resolution

_U64 = (1 << 64) - 1


@dataclass(frozen=True)
class SeedPlan:
    """Derives one 64-bit seed per path index from a master seed."""

    master_seed: int

    def __post_init__(self):
        if not 0 <= int(self.master_seed) <= _U64:
            raise ValueError(f"master_seed must fit in 64 unsigned bits, got {self.master_seed}")


def derive_seed(plan: SeedPlan, path_index: int) -> int:
    """Pure function of ``(plan.master_seed, path_index)``.

    Uses numpy's SeedSequence hashing, whose 64-bit outputs have no
    collisions over the index ranges used here (checked in the tests).
    """
    if path_index < 0:
        raise ValueError(f"path_index must be non-negative, got {path_index}")
    ss = np.random.SeedSequence(entropy=int(plan.master_seed), spawn_key=(int(path_index),))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def derive_seeds(plan: SeedPlan, n: int) -> list[int]:
    seeds = [derive_seed(plan, i) for i in range(n)]
    if len(set(seeds)) != n:
        raise RuntimeError(f"seed collision among the first {n} path indices")
    return seeds


@dataclass(frozen=True, eq=False)
class BrownianPath:
    """``values[j] = B(j * h / 2)`` for ``j = 0..2m``."""

    res: Resolution
    seed: int | None
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (2 * self.res.m + 1,):
            raise ValueError(
                f"path for m={self.res.m} needs {2 * self.res.m + 1} values, got {values.shape}"
            )
        if values[0] != 0.0:
            raise ValueError("Brownian path must start at 0")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def m(self) -> int:
        return self.res.m

    @property
    def path_id(self) -> str:
        return "zero" if self.seed is None else f"seed:{self.seed}"

    @property
    def step(self) -> float:
        return self.res.h / 2

    def grid_index(self, t: float) -> int:
        """Index of ``t`` on the half-step grid; ``t`` must lie on it."""
        x = t * 2 * self.res.m
        j = int(round(x))
        if not 0 <= j <= 2 * self.res.m or abs(x - j) > 1e-9:
            raise ValueError(f"t={t} is not on the half-step grid of m={self.res.m}")
        return j

    def at(self, t: float) -> float:
        return float(self.values[self.grid_index(t)])

    def at_midpoints(self) -> np.ndarray:
        return self.values[1::2]

    def at_cell_starts(self) -> np.ndarray:
        return self.values[0:-1:2]


def brownian_path(seed: int, res) -> BrownianPath:
    """Bit-reproducible path for a fixed ``(seed, m)``."""
    res = as_resolution(res)
    rng = np.random.Generator(np.random.PCG64(seed))
    dB = rng.normal(0.0, np.sqrt(res.h / 2), size=2 * res.m)
    values = np.concatenate(([0.0], np.cumsum(dB)))
    return BrownianPath(res, seed, values)


def zero_path(res) -> BrownianPath:
    res = as_resolution(res)
    return BrownianPath(res, None, np.zeros(2 * res.m + 1))


def ito_oracle(step_values, path: BrownianPath, t: float) -> float:
    """Left-point Ito sum of a cell-constant integrand up to ``t``.

    ``step_values[i]`` is the integrand on cell ``i``; the sum runs over the
    half-step grid so ``t`` may be any multiple of ``h/2``.
    """
    step_values = np.asarray(step_values, dtype=float)
    if step_values.shape != (path.m,):
        raise ValueError(f"expected {path.m} cell values, got {step_values.shape}")
    n = path.grid_index(t)
    total = 0.0
    for j in range(n):
        # half-step interval j lies inside cell j // 2
        total += step_values[j // 2] * (path.values[j + 1] - path.values[j])
    return total
