"""Barrier evaluation and supersolution certification on geodesic balls.

The barrier

    w(r) = lambda (R**2 - r**2)**(-2/e1) + mu,    e1 = q + 1 - p,

blows up at the boundary and dominates z = |grad u|**2 for solutions of the
Hamilton-Jacobi equation once  L*(w) = A(w) + C w**e2 - D |grad w|**2 / w
- (n-1) B**2 w  is nonnegative on the ball.  The certification evaluates an
explicit lower bound for L*(w), assembled term by term from the relaxed
closed-form comparison majorants, on a radius grid clustered toward r = R.

A negative margin is a first-class report outcome, not an exception: the
batch runner sweeps parameter grids and must record where certification
breaks down.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constants import Exponents, ProofConstants
from .errors import ConfigurationError, DomainError
from .geometry import CurvatureData, ModelManifold, laplacian_distance_bound

DEFAULT_GRID_POINTS = 10_000
DEFAULT_R0_FRAC = 1e-3
DEFAULT_EDGE_EPS = 1e-6


@dataclass(frozen=True)
class BarrierParams:
    """Barrier data on the ball B_R: coefficients, exponents, curvature."""

    R: float
    lam: float
    mu: float
    exponents: Exponents
    curvature: CurvatureData
    n: int

    def __post_init__(self):
        if self.R <= 0.0:
            raise DomainError(f"R must be > 0, got {self.R}")
        if self.lam < 0.0 or self.mu < 0.0:
            raise DomainError("barrier coefficients must be >= 0")
        if self.n < 2:
            raise DomainError(f"dimension must be >= 2, got {self.n}")

    def bp(self) -> float:
        return self.curvature.bp(self.exponents.p)


def barrier_eval(bp: BarrierParams, r):
    """(w, w', w'') at 0 <= r < R, closed form.

    w'(r) = (4 lam / e1) r y**(-(2/e1 + 1)),  y = R**2 - r**2, so w' >= 0
    and w'(0) = 0; w'' carries the extra 2 r**2 (q+3-p)/e1 term.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r < 0.0) or np.any(r >= bp.R):
        raise DomainError("barrier evaluated outside [0, R)")
    e1 = bp.exponents.e1
    y = bp.R**2 - r * r
    w = bp.lam * y ** (-2.0 / e1) + bp.mu
    w1 = (4.0 * bp.lam / e1) * r * y ** (-(2.0 / e1 + 1.0))
    w2 = (4.0 * bp.lam / e1) * y ** (-(2.0 / e1 + 2.0)) * (
        y + 2.0 * (2.0 / e1 + 1.0) * r * r
    )
    if r.ndim:
        return w, w1, w2
    return float(w), float(w1), float(w2)


def _bracket_laplacian(bp: BarrierParams, r, y):
    """Bracket of the relaxed Delta_2 w majorant: 2 r^2 (q+3-p)/e1 + y (1 + (n-1)(1+Br))."""
    e = bp.exponents
    B = bp.curvature.B
    return 2.0 * r * r * (e.q + 3.0 - e.p) / e.e1 + y * (
        1.0 + (bp.n - 1) * (1.0 + B * r)
    )


def _bracket_hessian(bp: BarrierParams, r, y, regime: str):
    """Bracket of the relaxed Hessian-term majorant: p >= 2 uses y (2 + S r), p <= 2 uses 2 y."""
    e = bp.exponents
    lead = 2.0 * r * r * (e.q + 3.0 - e.p) / e.e1
    if regime == "p_ge_2":
        S = bp.curvature.S
        if S is None:
            raise ConfigurationError("p > 2 regime requires a sectional bound S")
        return lead + y * (2.0 + S * r)
    if regime == "p_le_2":
        return lead + 2.0 * y
    raise ConfigurationError(f"unknown regime {regime!r}")


def _edge_factor(bp: BarrierParams, y):
    e = bp.exponents
    return (4.0 * bp.lam / e.e1) * y ** (-2.0 * e.e2 / e.e1)


def laplacian_w_upper(bp: BarrierParams, m: ModelManifold, r):
    """(relaxed, sharp) upper bounds on Delta_2 w at 0 < r < R.

    relaxed:  (4 lam/e1) y**(-2 e2/e1) [2 r^2 (q+3-p)/e1 + y (1+(n-1)(1+Br))],
              from the polynomial relaxation (1+Br)/r of B coth(Br);
    sharp:    w'' + w' (n-1) B coth(Br), which the relaxed form dominates.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0) or np.any(r >= bp.R):
        raise DomainError("radius outside (0, R)")
    y = bp.R**2 - r * r
    relaxed = _edge_factor(bp, y) * _bracket_laplacian(bp, r, y)
    _, w1, w2 = barrier_eval(bp, r)
    coth_bound, _ = laplacian_distance_bound(bp.n, bp.curvature.B, r)
    sharp = w2 + w1 * np.asarray(coth_bound)
    if r.ndim:
        return relaxed, sharp
    return float(relaxed), float(sharp)


def hessian_term_upper(bp: BarrierParams, m: ModelManifold, r, regime: str = "auto"):
    """Displayed upper bound on <D^2 w (grad u), grad u>/|grad u|**2.

    ``regime`` is "p_ge_2" (needs Sec >= -S**2), "p_le_2" (curvature-free,
    valid under Sec <= 0), or "auto" to pick from p.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0) or np.any(r >= bp.R):
        raise DomainError("radius outside (0, R)")
    if regime == "auto":
        regime = "p_ge_2" if bp.exponents.p > 2.0 else "p_le_2"
    y = bp.R**2 - r * r
    out = _edge_factor(bp, y) * _bracket_hessian(bp, r, y, regime)
    return out if np.asarray(out).ndim else float(out)


def supersolution_lower_bound(bp: BarrierParams, constants: ProofConstants, r):
    """Certified lower bound for L*(w) at radii r, assembled term by term.

    With y = R**2 - r**2 and Bp = B + (p-2)_+ S:

        LB(r) = lam y^(-2 e2/e1) [ C lam^e1 - k (R^2 + y Bp r) - 16 D r^2/e1^2 ]
                + C mu^e2 - (n-1) B^2 lam y^(-2/e1) - (n-1) B^2 mu.

    Every ingredient is an inequality in the favorable direction, so
    LB(r) >= 0 on the grid certifies L*(w) >= 0 on the ball.
    """
    e = bp.exponents
    e1, e2 = e.e1, e.e2
    r = np.asarray(r, dtype=float)
    y = bp.R**2 - r * r
    B = bp.curvature.B
    nb2 = (bp.n - 1) * B * B
    bracket = (
        constants.C * bp.lam**e1
        - constants.k * (bp.R**2 + y * bp.bp() * r)
        - 16.0 * constants.D * r * r / (e1 * e1)
    )
    out = (
        bp.lam * y ** (-2.0 * e2 / e1) * bracket
        + constants.C * bp.mu**e2
        - nb2 * bp.lam * y ** (-2.0 / e1)
        - nb2 * bp.mu
    )
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class GridSpec:
    """Radius grid geometrically clustered toward r = R.

    Both the barrier and its bounds blow up at R; clustering resolves the
    edge while the transformed-margin check covers the limit itself.
    """

    points: int = DEFAULT_GRID_POINTS
    r0_frac: float = DEFAULT_R0_FRAC
    edge_eps: float = DEFAULT_EDGE_EPS

    def radii(self, R: float) -> np.ndarray:
        if self.points < 2:
            raise ConfigurationError("grid must have at least 2 points")
        gaps = np.exp(
            np.linspace(np.log(1.0 - self.r0_frac), np.log(self.edge_eps), self.points)
        )
        return R * (1.0 - gaps)


@dataclass(frozen=True)
class CertificationReport:
    """Outcome of one supersolution certification (failure is an outcome)."""

    params: BarrierParams
    min_margin: float
    argmin_r: float
    passed: bool
    edge_margin: float
    grid_points: int
    margins: np.ndarray = field(repr=False, compare=False, default=None)


def certify_supersolution(
    bp: BarrierParams,
    constants: ProofConstants,
    manifold: ModelManifold,
    grid: GridSpec | None = None,
    keep_margins: bool = False,
) -> CertificationReport:
    """Evaluate the L*(w) lower bound on the grid; pass iff min margin >= 0."""
    if manifold.n != bp.n or manifold.B != bp.curvature.B:
        raise ConfigurationError("manifold does not match the barrier's curvature data")
    grid = grid or GridSpec()
    r = grid.radii(bp.R)
    if r.size == 0:
        raise ConfigurationError("empty certification grid")
    margins = supersolution_lower_bound(bp, constants, r)
    i = int(np.argmin(margins))
    return CertificationReport(
        params=bp,
        min_margin=float(margins[i]),
        argmin_r=float(r[i]),
        passed=bool(margins[i] >= 0.0),
        edge_margin=float(margins[-1]),
        grid_points=r.size,
        margins=margins if keep_margins else None,
    )


def edge_limit_coefficient(bp: BarrierParams, constants: ProofConstants) -> float:
    """Limit of y**(2 e2/e1) LB(r) as r -> R: lam (C lam^e1 - k R^2 - 16 D R^2/e1^2).

    Positive for any certified (lambda, mu); the divergence rate of the
    bound near the edge is y**(-2 e2/e1).
    """
    e = bp.exponents
    return bp.lam * (
        constants.C * bp.lam**e.e1
        - constants.k * bp.R**2
        - 16.0 * constants.D * bp.R**2 / (e.e1 * e.e1)
    )
