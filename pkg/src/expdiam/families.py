"""Parametric families of centered laws and their local second-order data.

Two families carry all the optimization work:

* two-point laws, parametrized by span, mass split, and direction;
* three-point laws on a nondegenerate triangle, probabilities given by
  the barycentric coordinates of the requested mean.

For a fixed triangle support, E e^Z = Ax + By + C exactly when the mean
sits at x + iy (the probabilities are affine in the mean), so the
centered moment is e^{-x-iy}(Ax + By + C) and all second-order behavior
of Re E e^{Z-EZ} and |E e^{Z-EZ} - 1|^2 near a stationary mean reduces
to the three complex coefficients.  StationaryFrame extracts the real
parameters (v, w, c0, c1, delta) that the closed-form matrices R and Q
are written in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .complex_dist import FiniteDistribution

__all__ = [
    "TwoPointParams",
    "TriangleSupport",
    "ExpansionCoefficients",
    "StationaryFrame",
    "two_point",
    "two_point_objective",
    "canonical_two_point",
    "triangle_dist",
    "expansion_coefficients",
    "centered_functional",
    "stationary_frame",
    "r_matrix",
    "r_matrix_min_eig",
    "q_matrix",
    "q_trace_claim",
    "q_det_claim",
    "hessian_fd",
]

# A triangle flatter than this fraction of diameter^2 is degenerate: the
# barycentric solve is too ill-conditioned to trust.
_DEGENERATE_AREA = 1e-10

REAL_PART = "real-part"
MODULUS = "modulus"
MODULUS_SQUARED = "modulus-squared"


@dataclass(frozen=True)
class TwoPointParams:
    """Span ell >= 0, mass split x in [0,1], direction theta in [-pi, pi]."""

    ell: float
    x: float
    theta: float

    def validate(self) -> None:
        if not (math.isfinite(self.ell) and self.ell >= 0):
            raise ValueError(f"span must be finite and nonnegative, got {self.ell!r}")
        if not (0 <= self.x <= 1):
            raise ValueError(f"mass split must lie in [0,1], got {self.x!r}")
        if not (math.isfinite(self.theta) and -math.pi <= self.theta <= math.pi):
            raise ValueError(f"direction must lie in [-pi, pi], got {self.theta!r}")


def two_point(params: TwoPointParams) -> FiniteDistribution:
    """Centered two-point law: ell(1-x)e^{i theta} w.p. x and
    -ell x e^{i theta} w.p. 1-x; x in {0, 1} degenerates to the point
    mass at 0."""
    params.validate()
    u = complex(math.cos(params.theta), math.sin(params.theta))
    hi = params.ell * (1 - params.x) * u
    lo = -params.ell * params.x * u
    return FiniteDistribution([(hi, params.x), (lo, 1 - params.x)])


def two_point_objective(params: TwoPointParams) -> float:
    """Re E e^Z for the two-point law."""
    params.validate()
    u = complex(math.cos(params.theta), math.sin(params.theta))
    value = params.x * np.exp(params.ell * (1 - params.x) * u) + (
        1 - params.x
    ) * np.exp(-params.ell * params.x * u)
    return float(value.real)


def _wrap_angle(theta: float) -> float:
    if theta > math.pi:
        return theta - 2 * math.pi
    if theta < -math.pi:
        return theta + 2 * math.pi
    return theta


def canonical_two_point(params: TwoPointParams) -> TwoPointParams:
    """Representative of the exact symmetry orbit (ell, x, theta) ~
    (ell, 1-x, pi-theta): fold onto x >= 1/2; at x = 1/2 take the smaller
    direction."""
    ell, x, theta = params.ell, params.x, params.theta
    if x < 0.5:
        x, theta = 1 - x, _wrap_angle(math.pi - theta)
    elif x == 0.5:
        theta = min(theta, _wrap_angle(math.pi - theta))
    return TwoPointParams(ell, x, theta)


def _cross(a: complex, b: complex) -> float:
    return a.real * b.imag - a.imag * b.real


@dataclass(frozen=True)
class TriangleSupport:
    """Three non-collinear support points."""

    z1: complex
    z2: complex
    z3: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.z1, self.z2, self.z3], dtype=np.complex128)

    def diameter(self) -> float:
        z = self.as_array()
        return float(np.abs(z[:, None] - z[None, :]).max())

    def signed_area2(self) -> float:
        """Twice the signed area (positive for counterclockwise order)."""
        return _cross(self.z1, self.z2) + _cross(self.z2, self.z3) + _cross(self.z3, self.z1)

    def barycentric(self, w: complex) -> tuple[float, float, float]:
        """Barycentric coordinates of w with respect to the triangle."""
        t = self.signed_area2()
        if t == 0:
            raise ValueError("support triangle is degenerate")
        l1 = _cross(self.z2 - w, self.z3 - w) / t
        l2 = _cross(self.z3 - w, self.z1 - w) / t
        l3 = _cross(self.z1 - w, self.z2 - w) / t
        return (l1, l2, l3)

    def validate(self) -> None:
        for z in (self.z1, self.z2, self.z3):
            if not (math.isfinite(z.real) and math.isfinite(z.imag)):
                raise ValueError(f"support point {z!r} is not finite")
        diam = self.diameter()
        if diam == 0 or abs(self.signed_area2()) <= _DEGENERATE_AREA * diam * diam:
            raise ValueError("support triangle is degenerate (collinear points)")


def triangle_dist(
    support: TriangleSupport,
    target_mean: complex = 0j,
    allow_boundary: bool = False,
) -> FiniteDistribution:
    """The law on the triangle's vertices whose mean is target_mean; the
    probabilities are exactly the barycentric coordinates.

    The target must be strictly inside the triangle; with
    ``allow_boundary`` a target on the boundary yields the <= 2-point law
    on the touching edge or vertex.
    """
    support.validate()
    lam = support.barycentric(complex(target_mean))
    lo = min(lam)
    if allow_boundary:
        if lo < -1e-12:
            raise ValueError(f"target {target_mean!r} outside the triangle (weights {lam})")
    elif lo <= 0:
        raise ValueError(
            f"target {target_mean!r} not strictly inside the triangle (weights {lam})"
        )
    probs = [max(p, 0.0) for p in lam]
    return FiniteDistribution(
        [(support.z1, probs[0]), (support.z2, probs[1]), (support.z3, probs[2])]
    )


@dataclass(frozen=True)
class ExpansionCoefficients:
    """E e^Z = A x + B y + C for the law on a fixed triangle support with
    mean x + iy."""

    a: complex
    b: complex
    c: complex

    def moment_at(self, mean: complex) -> complex:
        return self.a * mean.real + self.b * mean.imag + self.c


def expansion_coefficients(support: TriangleSupport) -> ExpansionCoefficients:
    """Exact affine coefficients; the origin must lie in the closed hull
    so that C is an attained moment value."""
    support.validate()
    if min(support.barycentric(0j)) < -1e-12:
        raise ValueError("origin outside the support triangle")
    z = support.as_array()
    t = support.signed_area2()
    a = 0j
    b = 0j
    c = 0j
    # lam_k(P) = (cross(za, zb) + cross(zb - za, P)) / t over the edge
    # (za, zb) opposite z_k, so each gradient in P = x + iy is constant
    for k, ia, ib in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        w = z[ib] - z[ia]
        ek = np.exp(z[k])
        c += _cross(z[ia], z[ib]) / t * ek
        a += (-w.imag / t) * ek
        b += (w.real / t) * ek
    return ExpansionCoefficients(a=complex(a), b=complex(b), c=complex(c))


def centered_functional(support: TriangleSupport, mean: complex, functional: str) -> float:
    """Value of the chosen functional of E e^{Z-EZ} when the mean of the
    law on this fixed support is moved to ``mean``.

    "real-part":       Re E e^{Z-EZ}
    "modulus-squared": |E e^{Z-EZ} - 1|^2
    """
    mean = complex(mean)
    lam = support.barycentric(mean)
    if min(lam) < 0:
        raise ValueError(f"mean {mean!r} leaves the support triangle")
    coeffs = expansion_coefficients(support)
    value = np.exp(-mean) * coeffs.moment_at(mean)
    if functional == REAL_PART:
        return float(value.real)
    if functional == MODULUS_SQUARED:
        return float(abs(value - 1.0) ** 2)
    raise ValueError(f"unknown functional {functional!r}")


@dataclass(frozen=True)
class StationaryFrame:
    """Real parameters (v, w, c0, c1, delta) of the affine expansion at a
    (candidate) stationary support: c0 + i c1 = C and delta = |C - 1|;
    v, w describe how A - C and B - iC align with the direction the
    functional is flat along."""

    v: float
    w: float
    c0: float
    c1: float
    delta: float


def stationary_frame(
    coeffs: ExpansionCoefficients, convention: str
) -> tuple[StationaryFrame, float]:
    """Extract (frame, residual) under the given convention.

    "real-part": stationarity of Re E e^{Z-EZ} forces A - C and B - iC
    purely imaginary; v, w are their imaginary parts and the residual is
    the norm of the leftover real parts.

    "modulus": stationarity of |E e^{Z-EZ} - 1|^2 forces A - C and
    B - iC to be real multiples of i(C-1); v, w are the least-squares
    multiples and the residual is the orthogonal remainder norm.  C = 1
    makes the frame undefined (the functional is at its global minimum,
    never a maximum).
    """
    ga = coeffs.a - coeffs.c
    gb = coeffs.b - 1j * coeffs.c
    c0, c1 = coeffs.c.real, coeffs.c.imag
    delta = abs(coeffs.c - 1.0)
    if convention == REAL_PART:
        frame = StationaryFrame(v=ga.imag, w=gb.imag, c0=c0, c1=c1, delta=delta)
        return frame, math.hypot(ga.real, gb.real)
    if convention == MODULUS:
        d = coeffs.c - 1.0
        if abs(d) < 1e-12:
            raise ValueError("frame undefined: E e^Z = 1 at this support")
        axis = 1j * d
        v = (ga * axis.conjugate()).real / abs(d) ** 2
        w = (gb * axis.conjugate()).real / abs(d) ** 2
        ra = ga - 1j * v * d
        rb = gb - 1j * w * d
        frame = StationaryFrame(v=v, w=w, c0=c0, c1=c1, delta=delta)
        return frame, math.sqrt(abs(ra) ** 2 + abs(rb) ** 2)
    raise ValueError(f"unknown convention {convention!r}")


def r_matrix(frame: StationaryFrame) -> np.ndarray:
    """Second-order form of Re E e^{Z-EZ} in the mean (half-Hessian) at a
    real-part-stationary support:

        [[-c0/2, (c1+v)/2], [(c1+v)/2, c0/2 + w]]
    """
    c0, c1, v, w = frame.c0, frame.c1, frame.v, frame.w
    return np.array(
        [
            [-c0 / 2, (c1 + v) / 2],
            [(c1 + v) / 2, c0 / 2 + w],
        ]
    )


def r_matrix_min_eig(frame: StationaryFrame) -> float:
    """Least eigenvalue of r_matrix in closed form:
    w/2 - sqrt((w + c0)^2 + (v + c1)^2)/2 (negative whenever c0 > 0)."""
    c0, c1, v, w = frame.c0, frame.c1, frame.v, frame.w
    return w / 2 - math.hypot(w + c0, v + c1) / 2


def q_matrix(frame: StationaryFrame) -> np.ndarray:
    """Stated second-order form for |E e^{Z-EZ} - 1|^2 at a
    modulus-stationary support, built verbatim:

        [[D v^2 + c0 - c1^2 - c0^2, D v w - c1],
         [D v w - c1,               D w^2 + c0 - 1]]

    with D = delta.  Finite-difference probes disagree with these entries
    (and with the trace/determinant claims below) at stationary supports;
    the verify report archives the comparison.  Compare before trusting.
    """
    d, c0, c1, v, w = frame.delta, frame.c0, frame.c1, frame.v, frame.w
    return np.array(
        [
            [d * v * v + c0 - c1 * c1 - c0 * c0, d * v * w - c1],
            [d * v * w - c1, d * w * w + c0 - 1.0],
        ]
    )


def q_trace_claim(frame: StationaryFrame) -> float:
    """Stated trace of the q form: D (v^2 + w^2 - 1)."""
    return frame.delta * (frame.v**2 + frame.w**2 - 1.0)


def q_det_claim(frame: StationaryFrame) -> float:
    """Stated determinant of the q form:
    D (-w^2 c0^2 - (1 - v^2 - w^2) c0 - (v - w c1)^2)."""
    d, c0, c1, v, w = frame.delta, frame.c0, frame.c1, frame.v, frame.w
    return d * (-(w**2) * c0**2 - (1 - v**2 - w**2) * c0 - (v - w * c1) ** 2)


def hessian_fd(
    support: TriangleSupport, functional: str, step: float | None = None
) -> np.ndarray:
    """Central finite-difference half-Hessian (Hessian / 2) of the chosen
    functional in the mean displacement at 0, directly comparable to
    r_matrix / q_matrix.

    The origin must be strictly inside the triangle and every stencil
    point must stay inside; otherwise the probabilities would go negative
    and the call errors out.
    """
    if functional not in (REAL_PART, MODULUS_SQUARED):
        raise ValueError(f"unknown functional {functional!r}")
    support.validate()
    if min(support.barycentric(0j)) <= 0:
        raise ValueError("origin not strictly inside the support triangle")
    diam = support.diameter()
    h = step if step is not None else 1e-4 * diam
    if h <= 0 or not math.isfinite(h):
        raise ValueError(f"bad finite-difference step {h!r}")
    for i in (-1, 0, 1):
        for j in (-1, 0, 1):
            if min(support.barycentric(complex(i * h, j * h))) < 0:
                raise ValueError(
                    "finite-difference stencil leaves the support triangle; reduce step"
                )

    def f(ix: int, iy: int) -> float:
        return centered_functional(support, complex(ix * h, iy * h), functional)

    fxx = (f(1, 0) - 2 * f(0, 0) + f(-1, 0)) / (h * h)
    fyy = (f(0, 1) - 2 * f(0, 0) + f(0, -1)) / (h * h)
    fxy = (f(1, 1) - f(1, -1) - f(-1, 1) + f(-1, -1)) / (4 * h * h)
    return np.array([[fxx, fxy], [fxy, fyy]]) / 2
