"""Deterministic low-discrepancy sequences for parameter sweeps."""

from __future__ import annotations

import numpy as np

_PRIMES = (2.0, 3.0, 5.0, 7.0, 11.0, 13.0, 17.0, 19.0)


def low_discrepancy(n: int, dim: int, seed: int = 0) -> np.ndarray:
    """(n, dim) additive-recurrence points in [0,1)^dim.

    Uses powers of the inverse of the root of x^{dim+1} = x + 1; the seed
    shifts every coordinate by an irrational offset so distinct seeds give
    disjoint-looking sweeps while staying fully deterministic.
    """
    if n < 0 or dim < 1 or dim > len(_PRIMES):
        raise ValueError(f"unsupported sweep shape ({n}, {dim})")
    x = 2.0
    for _ in range(80):
        x = (1 + x) ** (1 / (dim + 1))
    alpha = np.array([(1 / x) ** (j + 1) for j in range(dim)])
    beta = np.sqrt(np.array(_PRIMES[:dim]))
    i = np.arange(1, n + 1, dtype=np.float64)[:, None]
    return np.mod(0.5 + i * alpha[None, :] + seed * beta[None, :], 1.0)
