"""Attainable-value regions of E e^Z for small zero-mean families.

A region cloud is a quasi-random sweep of E e^Z over the two-point or
three-point family at a fixed diameter cap.  Boundaries come from
rasterizing the cloud onto an occupancy grid and running marching
squares; the regions are non-convex, so contouring the occupancy field
is the right tool (support-function tracing would fill concavities).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, QhullError
from skimage import measure

from ._sampling import low_discrepancy
from .bounds import envelope
from .complex_dist import FiniteDistribution, mix
from .families import TriangleSupport, TwoPointParams, triangle_dist, two_point

__all__ = [
    "RegionCloud",
    "BoundaryCurve",
    "Raster",
    "StarlikeReport",
    "TWO_POINT",
    "THREE_POINT",
    "sample_region",
    "member_from_params",
    "rasterize",
    "trace_boundary",
    "starlike_check",
    "convexity_gap",
]

TWO_POINT = "two-point"
THREE_POINT = "three-point"

# marching squares needs at least a blob to walk around
_MIN_OCCUPIED = 8

# low-discrepancy sweeps are generated in chunks this large so the
# feasibility filter never holds more than one block in memory
_CHUNK_MIN = 40_000
_CHUNK_MAX = 2_000_000
_CHUNK_SEED_STRIDE = 1_000_003


@dataclass(frozen=True)
class RegionCloud:
    """Sampled values of E e^Z with the parameters that generated them.

    ``family`` is "two-point" or "three-point".  ``params`` rows run
    parallel to ``points``: (ell, x, theta) for two-point clouds, the six
    support coordinates (re1, im1, re2, im2, re3, im3) for three-point
    clouds; an all-zero row is the deterministic degenerate member whose
    value is exactly 1.  ``params`` is None when the sweep was asked to
    drop them to save memory.
    """

    d: float
    family: str
    points: np.ndarray
    params: np.ndarray | None
    seed: int

    def __len__(self) -> int:
        return len(self.points)

    def validate(self) -> None:
        limit = envelope(self.d) + 1e-9
        dev = np.abs(self.points - 1.0)
        if dev.max(initial=0.0) > limit:
            worst = float(dev.max())
            raise ValueError(
                f"cloud escapes the deviation envelope: |p-1| up to {worst}, limit {limit}"
            )


@dataclass(frozen=True)
class BoundaryCurve:
    """Closed polyline (first vertex repeated last), counterclockwise."""

    vertices: np.ndarray
    cell_size: float

    def __len__(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True)
class StarlikeReport:
    """Outcome of segment checks toward 1 on a sampled cloud."""

    checked: int
    passed: int
    max_value_error: float
    max_diameter_excess: float

    @property
    def all_passed(self) -> bool:
        return self.checked == self.passed


def _family_name(family) -> str:
    if family in (2, "2", TWO_POINT):
        return TWO_POINT
    if family in (3, "3", THREE_POINT):
        return THREE_POINT
    raise ValueError(f"unknown family {family!r}; expected two-point or three-point")


def _two_point_sweep(d: float, n: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    u = low_discrepancy(n, 3, seed)
    ell = u[:, 0] * d
    x = u[:, 1]
    theta = (2 * u[:, 2] - 1) * np.pi
    w = np.exp(1j * theta)
    vals = x * np.exp(ell * (1 - x) * w) + (1 - x) * np.exp(-ell * x * w)
    params = np.column_stack([ell, x, theta])
    return vals, params


def _three_point_chunk(
    d: float, block: int, chunk_seed: int, keep_params: bool
) -> tuple[np.ndarray, np.ndarray | None]:
    from .search import _triangle_batch

    u = low_discrepancy(block, 6, chunk_seed)
    z1, z2, z3, _, l1, l2, l3, ok = _triangle_batch(u, d, area_floor=1e-8)
    idx = np.flatnonzero(ok)
    v = (
        l1[idx] * np.exp(z1[idx])
        + l2[idx] * np.exp(z2[idx])
        + l3[idx] * np.exp(z3[idx])
    )
    rows = None
    if keep_params:
        rows = np.column_stack(
            [
                z1[idx].real,
                z1[idx].imag,
                z2[idx].real,
                z2[idx].imag,
                z3[idx].real,
                z3[idx].imag,
            ]
        )
    return v, rows


def _three_point_sweep(
    d: float, n: int, seed: int, keep_params: bool, threads: int = 1
) -> tuple[np.ndarray, np.ndarray | None]:
    """Feasibility-filtered sweep, collected chunk by chunk in seed order.

    Whole chunks are appended until the target count is reached, then the
    concatenation is truncated, so the result is byte-for-byte identical
    for any thread count.
    """
    block = min(max(n, _CHUNK_MIN), _CHUNK_MAX)
    vals: list[np.ndarray] = []
    rows: list[np.ndarray] = []

    def take(v: np.ndarray, r: np.ndarray | None) -> int:
        if len(v) == 0:
            return 0
        vals.append(v)
        if keep_params:
            rows.append(r)
        return len(v)

    got = 0
    next_seed = seed
    if threads <= 1:
        while got < n:
            v, r = _three_point_chunk(d, block, next_seed, keep_params)
            next_seed += _CHUNK_SEED_STRIDE
            got += take(v, r)
    else:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            while got < n:
                seeds = [next_seed + i * _CHUNK_SEED_STRIDE for i in range(threads)]
                next_seed = seeds[-1] + _CHUNK_SEED_STRIDE
                for v, r in pool.map(
                    lambda s: _three_point_chunk(d, block, s, keep_params), seeds
                ):
                    got += take(v, r)
    values = np.concatenate(vals)[:n]
    params = np.concatenate(rows)[:n] if keep_params else None
    return values, params


def sample_region(
    d: float, family, n: int, seed: int = 0, keep_params: bool = True, threads: int = 1
) -> RegionCloud:
    """Sweep E e^Z over the family at diameter cap d; n values total.

    The first entry is always the degenerate member (value exactly 1,
    all-zero params row), so every cloud contains the point the region is
    star-like from.  The result does not depend on ``threads``.
    """
    if d <= 0 or not math.isfinite(d):
        raise ValueError(f"diameter must be finite and positive, got {d!r}")
    if n < 1:
        raise ValueError(f"sample count must be at least 1, got {n!r}")
    name = _family_name(family)
    width = 3 if name == TWO_POINT else 6
    if n == 1:
        vals = np.zeros(0, dtype=np.complex128)
        params = np.zeros((0, width))
    elif name == TWO_POINT:
        vals, params = _two_point_sweep(d, n - 1, seed)
    else:
        vals, params = _three_point_sweep(d, n - 1, seed, keep_params, threads)
    points = np.concatenate([np.array([1.0 + 0j]), vals])
    if keep_params:
        assert params is not None
        params = np.vstack([np.zeros((1, width)), params])
    else:
        params = None
    cloud = RegionCloud(d=float(d), family=name, points=points, params=params, seed=seed)
    cloud.validate()
    return cloud


def member_from_params(cloud: RegionCloud, index: int) -> FiniteDistribution:
    """Rebuild the law behind cloud.points[index] from its params row."""
    if cloud.params is None:
        raise ValueError("cloud was sampled without params")
    row = cloud.params[index]
    if not row.any():
        return FiniteDistribution([(0j, 1.0)])
    if cloud.family == TWO_POINT:
        return two_point(TwoPointParams(float(row[0]), float(row[1]), float(row[2])))
    support = TriangleSupport(
        complex(row[0], row[1]), complex(row[2], row[3]), complex(row[4], row[5])
    )
    return triangle_dist(support, 0j, allow_boundary=True)


@dataclass(frozen=True)
class Raster:
    """Occupancy grid over the cloud's bounding box (square cells)."""

    grid: np.ndarray
    origin: complex
    cell: float

    def cell_index(self, p: complex | np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        p = np.asarray(p, dtype=np.complex128)
        res = self.grid.shape[0]
        col = np.clip(((p.real - self.origin.real) / self.cell).astype(int), 0, res - 1)
        row = np.clip(((p.imag - self.origin.imag) / self.cell).astype(int), 0, res - 1)
        return row, col

    def occupied_at(self, p: complex | np.ndarray) -> np.ndarray:
        row, col = self.cell_index(p)
        return self.grid[row, col]


def rasterize(cloud: RegionCloud, grid_resolution: int = 512) -> Raster:
    """Mark the square cells hit by cloud points; cells are sized by the
    larger bounding-box span so the grid is uniform in both axes."""
    if len(cloud) == 0:
        raise ValueError("empty cloud")
    if grid_resolution < 2:
        raise ValueError("grid resolution must be at least 2")
    re, im = cloud.points.real, cloud.points.imag
    lo = complex(re.min(), im.min())
    span = max(float(re.max() - re.min()), float(im.max() - im.min()))
    if span == 0:
        raise ValueError("cloud is a single point; nothing to rasterize")
    cell = span / grid_resolution
    col = np.clip(((re - lo.real) / cell).astype(int), 0, grid_resolution - 1)
    row = np.clip(((im - lo.imag) / cell).astype(int), 0, grid_resolution - 1)
    grid = np.zeros((grid_resolution, grid_resolution), dtype=bool)
    grid[row, col] = True
    return Raster(grid=grid, origin=lo, cell=cell)


def _close_and_orient(vertices: np.ndarray) -> np.ndarray:
    if abs(vertices[0] - vertices[-1]) > 0:
        vertices = np.append(vertices, vertices[0])
    v = vertices[:-1]
    nxt = vertices[1:]
    area2 = float(np.sum(v.real * nxt.imag - v.imag * nxt.real))
    if area2 < 0:
        vertices = vertices[::-1]
    return vertices


def trace_boundary(cloud: RegionCloud, grid_resolution: int = 512) -> list[BoundaryCurve]:
    """Marching-squares contours of the occupancy raster, longest first.

    Each curve is closed (first vertex repeated) and counterclockwise.
    Raises when fewer than 8 cells are occupied: the raster is too coarse
    to carry a shape.
    """
    raster = rasterize(cloud, grid_resolution)
    occupied = int(raster.grid.sum())
    if occupied < _MIN_OCCUPIED:
        raise ValueError(
            f"only {occupied} occupied cells at resolution {grid_resolution}; too coarse"
        )
    padded = np.pad(raster.grid.astype(float), 1)
    curves = []
    for contour in measure.find_contours(padded, 0.5):
        # rows index the imaginary axis; the pad shifts indices by one
        verts = (
            raster.origin.real
            + (contour[:, 1] - 1) * raster.cell
            + 1j * (raster.origin.imag + (contour[:, 0] - 1) * raster.cell)
        )
        curves.append(
            BoundaryCurve(vertices=_close_and_orient(verts), cell_size=raster.cell)
        )
    curves.sort(key=len, reverse=True)
    return curves


def starlike_check(cloud: RegionCloud, seed: int = 0, checks: int = 256) -> StarlikeReport:
    """Shrink sampled members toward the zero law and verify the value
    moves along the straight segment to 1.

    For each sampled (member, c) pair the mixture c*law + (1-c)*delta_0
    must keep diameter <= d and hit 1 + c*(value - 1) to 1e-12.  Returns
    the counts rather than raising: this is a diagnostic report.
    """
    if cloud.params is None:
        raise ValueError("starlike check needs a cloud sampled with params")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, len(cloud), size=checks)
    cs = rng.random(checks)
    # pin the two trivial endpoints so they are always exercised
    if checks >= 2:
        cs[0], cs[1] = 1.0, 0.0
    passed = 0
    max_err = 0.0
    max_excess = 0.0
    for i, c in zip(idx, cs):
        base = member_from_params(cloud, int(i))
        mixed = mix([base, FiniteDistribution([(0j, 1.0)])], [float(c), 1.0 - float(c)])
        expected = 1.0 + c * (cloud.points[int(i)] - 1.0)
        err = abs(mixed.expect_exp() - expected)
        excess = mixed.diameter() - cloud.d
        max_err = max(max_err, float(err))
        max_excess = max(max_excess, float(excess))
        if err <= 1e-12 and excess <= 1e-12:
            passed += 1
    return StarlikeReport(
        checked=int(checks),
        passed=passed,
        max_value_error=max_err,
        max_diameter_excess=max_excess,
    )


def convexity_gap(cloud: RegionCloud, grid_resolution: int = 512) -> float:
    """Fraction of the convex hull's area not covered by occupied cells.

    Near 0 for convex regions; positive when the cloud has a genuine
    indentation.  Raises on degenerate (collinear) clouds where the hull
    has no area.
    """
    raster = rasterize(cloud, grid_resolution)
    pts = np.column_stack([cloud.points.real, cloud.points.imag])
    try:
        hull = ConvexHull(pts)
    except QhullError as exc:
        raise ValueError("cloud is degenerate (collinear); no hull area") from exc
    hull_area = float(hull.volume)
    if hull_area <= 0:
        raise ValueError("cloud is degenerate (collinear); no hull area")
    occupied_area = float(raster.grid.sum()) * raster.cell**2
    return (hull_area - occupied_area) / hull_area
