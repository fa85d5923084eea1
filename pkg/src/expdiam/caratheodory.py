"""Decomposition of zero-mean laws into mixtures of small zero-mean laws.

Any finitely supported zero-mean law is a convex combination of zero-mean
laws each supported on at most three of the original points.  The
construction peels one small component at a time: find a subset of the
current support that can carry a zero-mean law on its own, take as much
of it as the remaining masses allow (driving at least one atom to exactly
zero), and repeat.  No new support points are ever introduced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

import numpy as np

from .complex_dist import FiniteDistribution

__all__ = [
    "MixtureDecomposition",
    "zero_simplex_subset",
    "decompose",
]

# Barycentric weights this close to the simplex boundary get re-examined
# with exact rational arithmetic before a subset is accepted or rejected.
_EXACT_BAND = 1e-9


@dataclass(frozen=True)
class MixtureDecomposition:
    """(weight, zero-mean component) pairs reproducing the input law."""

    components: tuple[tuple[float, FiniteDistribution], ...]

    @property
    def weights(self) -> tuple[float, ...]:
        return tuple(w for w, _ in self.components)

    def mixed(self) -> FiniteDistribution:
        from .complex_dist import mix

        return mix([c for _, c in self.components], [w for w, _ in self.components])

    def max_support_size(self) -> int:
        return max(len(c) for _, c in self.components)


@lru_cache(maxsize=64)
def _triples(n: int) -> np.ndarray:
    return np.array(list(combinations(range(n), 3)), dtype=np.intp)


def _bary_zero(a: complex, b: complex, c: complex) -> tuple[float, float, float] | None:
    t = (b.real - a.real) * (c.imag - a.imag) - (b.imag - a.imag) * (c.real - a.real)
    if t == 0:
        return None
    l1 = (b.real * c.imag - b.imag * c.real) / t
    l2 = (c.real * a.imag - c.imag * a.real) / t
    l3 = (a.real * b.imag - a.imag * b.real) / t
    return (l1, l2, l3)


def _bary_zero_exact(a: complex, b: complex, c: complex):
    ax, ay = Fraction(a.real), Fraction(a.imag)
    bx, by = Fraction(b.real), Fraction(b.imag)
    cx, cy = Fraction(c.real), Fraction(c.imag)
    t = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    if t == 0:
        return None
    l1 = (bx * cy - by * cx) / t
    l2 = (cx * ay - cy * ax) / t
    l3 = (ax * by - ay * bx) / t
    return (l1, l2, l3)


def _is_collinear(a: complex, b: complex, c: complex) -> bool:
    """Degenerate-triangle test at the same relative threshold the triangle
    family uses, so flat three-point remainders get split, not bundled."""
    t = (b.real - a.real) * (c.imag - a.imag) - (b.imag - a.imag) * (c.real - a.real)
    diam2 = max(abs(a - b), abs(b - c), abs(a - c)) ** 2
    return abs(t) <= 1e-10 * diam2


def _segment_weights(
    a: complex, b: complex, rel_tol: float = 1e-12
) -> tuple[float, float] | None:
    """Convex weights putting the mean of {a, b} at 0, for 0 strictly
    between the endpoints on their segment."""
    d = b - a
    denom = abs(d) ** 2
    if denom == 0:
        return None
    s = -(a.real * d.real + a.imag * d.imag) / denom
    residual = a + s * d
    scale = max(abs(a), abs(b))
    if scale == 0 or abs(residual) > rel_tol * scale:
        return None
    if s <= 0 or s >= 1:
        return None
    return (1 - s, s)


def _split_collinear(pts: np.ndarray) -> tuple[tuple[int, ...], tuple[float, ...]]:
    """Zero-mean subset for a flat triple, segments only: a degenerate
    triangle must shed two-point pieces, never survive whole."""
    for i in range(len(pts)):
        if pts[i] == 0:
            return ((i,), (1.0,))
    for i, j in combinations(range(len(pts)), 2):
        w = _segment_weights(pts[i], pts[j], rel_tol=1e-9)
        if w is not None:
            return ((i, j), w)
    raise ValueError("collinear remainder has no segment through 0; mean not 0?")


def zero_simplex_subset(points: np.ndarray) -> tuple[tuple[int, ...], tuple[float, ...]]:
    """Pick a subset of at most 3 points carrying its own zero-mean law.

    Preference order, each tier scanned in lexicographic index order:

    1. a single point equal to 0;
    2. a triangle with 0 strictly inside;
    3. a pair with 0 strictly between the endpoints;
    4. a triangle with 0 on its boundary (a zero weight is dropped).

    Strict-interior triangles win over aligned pairs so near-degenerate
    configurations keep full-dimensional components as long as possible.
    Barycentric weights within 1e-9 of the boundary are recomputed in
    exact rational arithmetic before deciding.

    Returns (indices, probabilities).  Raises ValueError when no subset
    works, which for a genuine zero-mean support cannot happen.
    """
    pts = np.asarray(points, dtype=np.complex128)
    n = len(pts)
    for i in range(n):
        if pts[i] == 0:
            return ((i,), (1.0,))
    boundary_tri: tuple[tuple[int, ...], tuple[float, ...]] | None = None
    if n >= 3:
        trip = _triples(n)
        a, b, c = pts[trip[:, 0]], pts[trip[:, 1]], pts[trip[:, 2]]
        t = (b.real - a.real) * (c.imag - a.imag) - (b.imag - a.imag) * (c.real - a.real)
        with np.errstate(divide="ignore", invalid="ignore"):
            l1 = (b.real * c.imag - b.imag * c.real) / t
            l2 = (c.real * a.imag - c.imag * a.real) / t
            l3 = (a.real * b.imag - a.imag * b.real) / t
        lo = np.where(t != 0, np.minimum(np.minimum(l1, l2), l3), -np.inf)
        # float scan proposes, exact arithmetic disposes: flat triangles can
        # report garbage barycentrics, so every winner is re-derived exactly
        for k in np.flatnonzero(lo > _EXACT_BAND):
            i, j, m = (int(v) for v in trip[k])
            exact = _bary_zero_exact(pts[i], pts[j], pts[m])
            if exact is not None and min(exact) > 0:
                return ((i, j, m), tuple(float(v) for v in exact))
        # near-boundary candidates decided exactly, still in lex order
        for k in np.flatnonzero((lo > -_EXACT_BAND) & np.isfinite(lo)):
            i, j, m = (int(v) for v in trip[k])
            exact = _bary_zero_exact(pts[i], pts[j], pts[m])
            if exact is None:
                continue
            if min(exact) > 0:
                return ((i, j, m), tuple(float(v) for v in exact))
            if min(exact) >= 0 and boundary_tri is None:
                keep = [(idx, float(p)) for idx, p in zip((i, j, m), exact) if p > 0]
                boundary_tri = (
                    tuple(idx for idx, _ in keep),
                    tuple(p for _, p in keep),
                )
    for i, j in combinations(range(n), 2):
        w = _segment_weights(pts[i], pts[j])
        if w is not None:
            return ((i, j), w)
    if boundary_tri is not None:
        return boundary_tri
    raise ValueError("no zero-mean subset of size <= 3 found; is the mean really 0?")


def decompose(dist: FiniteDistribution, max_components: int = 10_000) -> MixtureDecomposition:
    """Write a zero-mean law as a mixture of zero-mean laws on <= 3 points.

    Peels components greedily: each step removes take * (component law)
    from the remaining mass with the largest feasible take, zeroing the
    binding atom exactly, so the support shrinks every step.  Exactly
    collinear three-point remainders are split into two segment laws
    rather than kept whole.
    """
    mean = dist.mean()
    if abs(mean) > 1e-10:
        raise ValueError(f"law has mean {mean!r}, expected 0")
    # the residual mean (<= 1e-10) rides along untouched: shifting the
    # points would break support ⊆ original at the last ulp
    pts = np.array(dist.points, dtype=np.complex128)
    mass = np.array(dist.probs, dtype=np.float64)
    components: list[FiniteDistribution] = []
    weights: list[float] = []
    for _ in range(max_components):
        alive = np.flatnonzero(mass > 0)
        if len(alive) == 0:
            break
        sub = pts[alive]
        collinear3 = len(alive) == 3 and _is_collinear(sub[0], sub[1], sub[2])
        if len(alive) <= 3 and not collinear3:
            total = float(mass[alive].sum())
            components.append(
                FiniteDistribution(
                    [(complex(z), float(m) / total) for z, m in zip(sub, mass[alive])]
                )
            )
            weights.append(total)
            mass[alive] = 0.0
            continue
        if collinear3:
            idx_local, probs = _split_collinear(sub)
        else:
            idx_local, probs = zero_simplex_subset(sub)
        idx = alive[np.array(idx_local, dtype=np.intp)]
        q = np.array(probs, dtype=np.float64)
        ratios = mass[idx] / q
        take = float(ratios.min())
        argmin = int(np.argmin(ratios))
        components.append(
            FiniteDistribution([(complex(pts[g]), float(p)) for g, p in zip(idx, q)])
        )
        weights.append(take)
        mass[idx] -= take * q
        mass[idx[argmin]] = 0.0  # exact removal of the binding atom
    else:
        raise RuntimeError("decomposition failed to terminate")
    total = math.fsum(weights)
    return MixtureDecomposition(
        components=tuple((w / total, c) for w, c in zip(weights, components))
    )
