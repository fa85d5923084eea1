"""Finitely supported complex-valued random variables.

A distribution is an ordered list of (point, probability) atoms.  All
operations are pure: nothing here mutates shared state, so instances are
safe to use from any number of threads.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

__all__ = [
    "Disk",
    "FiniteDistribution",
    "enclosing_disk",
    "mix",
    "loads",
    "dumps",
]

# Probability sums further than this from 1 are rejected outright;
# anything closer is silently renormalized.
PROB_SUM_TOL = 1e-9


@dataclass(frozen=True)
class Disk:
    """A closed disk in the complex plane."""

    center: complex
    radius: float

    def contains(self, z: complex, slack: float = 1e-12) -> bool:
        return abs(z - self.center) <= self.radius * (1 + 1e-14) + slack


def _require_finite(value: float, what: str) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{what} must be finite, got {value!r}")
    return value


class FiniteDistribution:
    """Immutable finitely supported distribution on the complex plane.

    Atoms with exactly coincident coordinates are merged (probabilities
    add); atoms with probability exactly 0 are dropped.  Probabilities
    must be nonnegative and sum to 1 within ``PROB_SUM_TOL``; the sum is
    then renormalized away.
    """

    __slots__ = ("_points", "_probs")

    def __init__(self, atoms: Iterable[tuple[complex, float]]):
        merged: dict[tuple[float, float], float] = {}
        order: list[tuple[float, float]] = []
        count = 0
        for point, prob in atoms:
            count += 1
            z = complex(point)
            _require_finite(z.real, "atom real part")
            _require_finite(z.imag, "atom imaginary part")
            p = _require_finite(prob, "atom probability")
            if p < 0:
                raise ValueError(f"negative probability {p!r}")
            key = (z.real, z.imag)
            if key in merged:
                merged[key] += p
            else:
                merged[key] = p
                order.append(key)
        if count == 0:
            raise ValueError("distribution needs at least one atom")
        total = math.fsum(merged.values())
        if abs(total - 1.0) > PROB_SUM_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1")
        keys = [k for k in order if merged[k] != 0.0]
        if not keys:
            raise ValueError("all atoms have zero probability")
        points = np.array([complex(re, im) for re, im in keys], dtype=np.complex128)
        probs = np.array([merged[k] / total for k in keys], dtype=np.float64)
        points.setflags(write=False)
        probs.setflags(write=False)
        self._points = points
        self._probs = probs

    @classmethod
    def from_arrays(cls, points: Sequence[complex], probs: Sequence[float]) -> "FiniteDistribution":
        return cls(zip(np.asarray(points, dtype=np.complex128), np.asarray(probs, dtype=np.float64)))

    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def probs(self) -> np.ndarray:
        return self._probs

    @property
    def atoms(self) -> list[tuple[complex, float]]:
        return [(complex(z), float(p)) for z, p in zip(self._points, self._probs)]

    def __len__(self) -> int:
        return len(self._points)

    def __repr__(self) -> str:
        return f"FiniteDistribution({self.atoms!r})"

    def mean(self) -> complex:
        return complex(np.dot(self._probs, self._points))

    def center(self) -> "FiniteDistribution":
        """The same distribution translated to mean zero."""
        m = self.mean()
        return FiniteDistribution.from_arrays(self._points - m, self._probs)

    def diameter(self) -> float:
        """Largest pairwise distance between support points."""
        if len(self._points) == 1:
            return 0.0
        z = self._points
        return float(np.abs(z[:, None] - z[None, :]).max())

    def expect(self, f: Callable[[complex], complex]) -> complex:
        """Expectation of f(Z); f values must be finite."""
        total = 0j
        for z, p in zip(self._points, self._probs):
            w = complex(f(complex(z)))
            if not (math.isfinite(w.real) and math.isfinite(w.imag)):
                raise ValueError(f"f({complex(z)!r}) = {w!r} is not finite")
            total += p * w
        return total

    def expect_exp(self) -> complex:
        """E exp(Z).  Raises OverflowError instead of saturating."""
        if float(np.max(self._points.real)) > 700.0:
            raise OverflowError("support has exp-overflowing real part")
        with np.errstate(over="raise"):
            vals = np.exp(self._points)
        out = complex(np.dot(self._probs, vals))
        if not (math.isfinite(out.real) and math.isfinite(out.imag)):
            raise OverflowError("E exp(Z) overflowed")
        return out

    def moment(self, k: int) -> complex:
        """E Z^k by iterated multiplication (no pow/log round trip)."""
        if k < 0 or k != int(k):
            raise ValueError("moment order must be a nonnegative integer")
        acc = np.ones_like(self._points)
        for _ in range(int(k)):
            acc = acc * self._points
        return complex(np.dot(self._probs, acc))

    def scaled(self, factor: complex) -> "FiniteDistribution":
        return FiniteDistribution.from_arrays(self._points * factor, self._probs)

    def translated(self, offset: complex) -> "FiniteDistribution":
        return FiniteDistribution.from_arrays(self._points + offset, self._probs)


def mix(dists: Sequence[FiniteDistribution], weights: Sequence[float]) -> FiniteDistribution:
    """Mixture of distributions; shared support points merge exactly."""
    if len(dists) != len(weights) or not dists:
        raise ValueError("need matching nonempty dists and weights")
    w = np.asarray(weights, dtype=np.float64)
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ValueError("mixture weights must be finite and nonnegative")
    if abs(w.sum() - 1.0) > PROB_SUM_TOL:
        raise ValueError(f"mixture weights sum to {w.sum()!r}, not 1")
    atoms: list[tuple[complex, float]] = []
    for dist, wk in zip(dists, w):
        for z, p in zip(dist.points, dist.probs):
            atoms.append((complex(z), wk * p))
    return FiniteDistribution(atoms)


# ---------------------------------------------------------------------------
# Smallest enclosing disk, randomized incremental construction.


def _circle_two(a: complex, b: complex) -> Disk:
    c = (a + b) / 2
    return Disk(c, max(abs(a - c), abs(b - c)))


def _circumcircle(a: complex, b: complex, c: complex) -> Disk | None:
    # standard circumcenter via relative coordinates for stability
    ox = (min(a.real, b.real, c.real) + max(a.real, b.real, c.real)) / 2
    oy = (min(a.imag, b.imag, c.imag) + max(a.imag, b.imag, c.imag)) / 2
    ax, ay = a.real - ox, a.imag - oy
    bx, by = b.real - ox, b.imag - oy
    cx, cy = c.real - ox, c.imag - oy
    d = 2 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if d == 0:
        return None
    x = ox + ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay) + (cx * cx + cy * cy) * (ay - by)) / d
    y = oy + ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx) + (cx * cx + cy * cy) * (bx - ax)) / d
    center = complex(x, y)
    return Disk(center, max(abs(a - center), abs(b - center), abs(c - center)))


def _in_disk(disk: Disk | None, z: complex) -> bool:
    return disk is not None and abs(z - disk.center) <= disk.radius * (1 + 1e-14)


def _disk_two_points(points: list[complex], a: complex, b: complex) -> Disk:
    circ = _circle_two(a, b)
    left: Disk | None = None
    right: Disk | None = None
    for z in points:
        if _in_disk(circ, z):
            continue
        cross = (b - a).real * (z - a).imag - (b - a).imag * (z - a).real
        c = _circumcircle(a, b, z)
        if c is None:
            continue
        ccross = (b - a).real * (c.center - a).imag - (b - a).imag * (c.center - a).real
        if cross > 0 and (left is None or ccross > (b - a).real * (left.center - a).imag - (b - a).imag * (left.center - a).real):
            left = c
        elif cross < 0 and (right is None or ccross < (b - a).real * (right.center - a).imag - (b - a).imag * (right.center - a).real):
            right = c
    if left is None and right is None:
        return circ
    if left is None:
        return right  # type: ignore[return-value]
    if right is None:
        return left
    return left if left.radius <= right.radius else right


def _disk_one_point(points: list[complex], a: complex) -> Disk:
    disk = Disk(a, 0.0)
    for i, z in enumerate(points):
        if not _in_disk(disk, z):
            if disk.radius == 0.0:
                disk = _circle_two(a, z)
            else:
                disk = _disk_two_points(points[: i + 1], a, z)
    return disk


def enclosing_disk(arg: FiniteDistribution | Sequence[complex]) -> Disk:
    """Smallest disk containing the support (expected linear time).

    The insertion order is shuffled with a deterministically seeded local
    generator, so results are reproducible and the call is thread-safe.
    """
    if isinstance(arg, FiniteDistribution):
        pts = [complex(z) for z in arg.points]
    else:
        pts = [complex(z) for z in arg]
    if not pts:
        raise ValueError("no points to enclose")
    for z in pts:
        _require_finite(z.real, "point real part")
        _require_finite(z.imag, "point imaginary part")
    shuffled = list(dict.fromkeys(pts))
    random.Random(0x5EED ^ len(shuffled)).shuffle(shuffled)
    disk: Disk | None = None
    for i, z in enumerate(shuffled):
        if disk is None or not _in_disk(disk, z):
            disk = _disk_one_point(shuffled[: i + 1], z)
    assert disk is not None
    return disk


# ---------------------------------------------------------------------------
# Text serialization: one atom per line "re im prob", '#' starts a comment.


def dumps(dist: FiniteDistribution, header: str | None = None) -> str:
    lines = []
    if header:
        for row in header.splitlines():
            lines.append(f"# {row}")
    for z, p in zip(dist.points, dist.probs):
        lines.append(f"{z.real:.17g} {z.imag:.17g} {p:.17g}")
    return "\n".join(lines) + "\n"


def loads(text: str) -> FiniteDistribution:
    atoms: list[tuple[complex, float]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected 're im prob', got {raw!r}")
        try:
            re, im, p = (float(v) for v in parts)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
        atoms.append((complex(re, im), p))
    if not atoms:
        raise ValueError("no atoms found in text")
    return FiniteDistribution(atoms)
