"""High-precision reference evaluations via mpmath.

Everything here recomputes quantities from first principles with
arbitrary-precision arithmetic.  The fast float implementations in
``bounds`` are tested against these, never the other way around.
"""

from __future__ import annotations

import mpmath as mp

__all__ = [
    "g_exact",
    "envelope_exact",
    "extremal_prob_exact",
    "two_point_expect_exp",
]


def g_exact(d, dps: int = 40) -> mp.mpf:
    """sup E|e^Z - 1| over centered real two-point laws of diameter d.

    Evaluated as E e^{X - EX} - 1 for the law placing mass
    (e^d - 1 - d)/(d(e^d - 1)) at d and the rest at 0.
    """
    with mp.workdps(dps):
        d = mp.mpf(d)
        if d == 0:
            return mp.mpf(0)
        p = extremal_prob_exact(d, dps=dps)
        m = p * d
        return mp.e ** (-m) * (p * mp.e ** d + (1 - p)) - 1


def envelope_exact(d, dps: int = 40) -> mp.mpf:
    """e^{d^2/8} - 1."""
    with mp.workdps(dps):
        return mp.expm1(mp.mpf(d) ** 2 / 8)


def extremal_prob_exact(d, dps: int = 40) -> mp.mpf:
    """(e^d - 1 - d) / (d (e^d - 1)), the optimal mass at the far point."""
    with mp.workdps(dps):
        d = mp.mpf(d)
        if d == 0:
            return mp.mpf(1) / 2
        return (mp.expm1(d) - d) / (d * mp.expm1(d))


def two_point_expect_exp(ell, x, theta, dps: int = 40) -> mp.mpc:
    """E e^Z for the centered two-point law with span ell, mass split x,
    direction theta: value ell(1-x)e^{i theta} w.p. x and -ell x e^{i theta}
    w.p. 1-x."""
    with mp.workdps(dps):
        ell = mp.mpf(ell)
        x = mp.mpf(x)
        theta = mp.mpf(theta)
        u = mp.e ** (1j * theta)
        return x * mp.e ** (ell * (1 - x) * u) + (1 - x) * mp.e ** (-ell * x * u)
