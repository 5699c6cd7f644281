"""The headline checks: gradient bounds, barrier comparison, Liouville, Harnack.

Every check compares an observed supremum against a bound computed from the
constants ledger and reports an :class:`EstimateOutcome`; a failed check on
a valid solution is an implementation bug by default (the estimates are
theorems), so the batch runner only downgrades failures to recorded
findings when explicitly asked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .barrier import BarrierParams, barrier_eval
from .constants import Exponents, ProofConstants, barrier_lambda_mu, gradient_constant
from .errors import ConfigurationError, DomainError
from .geometry import ModelManifold
from .radial import RadialField, flat_blowup_radius, solve_radial_hj

PASS_SLACK = 1e-12  # relative slack on observed <= bound comparisons

# A run that stays bounded out to this radius on the flat model contradicts
# the Liouville property at numerical scale and is flagged loudly.
LIOUVILLE_FINDING_RMAX = 1e6


@dataclass(frozen=True)
class EstimateOutcome:
    """bound vs observed supremum; pass iff observed <= bound (1 + slack)."""

    bound_value: float
    observed_sup: float
    passed: bool
    witness: float

    @classmethod
    def from_values(cls, bound: float, observed: float, witness: float) -> "EstimateOutcome":
        return cls(
            bound_value=bound,
            observed_sup=observed,
            passed=bool(observed <= bound * (1.0 + PASS_SLACK)),
            witness=witness,
        )


def global_gradient_bound(n: int, e: Exponents, B: float,
                          constants: ProofConstants | None = None) -> float:
    """Global gradient bound c_grad * B**(1/e1); zero at B = 0 (Liouville)."""
    if B < 0.0:
        raise DomainError(f"B must be >= 0, got {B}")
    c = constants.c_grad if constants is not None else gradient_constant(n, e)
    return c * B ** (1.0 / e.e1)


def interior_gradient_bound(n: int, e: Exponents, B: float, S: float | None, d: float) -> float:
    """Interior bound sqrt(lambda(d) d**(-4/e1) + A mu) at distance d from the boundary.

    Equals c(n,p,q,d) * max{B**(1/e1), (1+Bp)**(1/(2 e1)) d**(-1/(2 e1))} and
    decreases to the global bound as d -> infinity.
    """
    if d <= 0.0:
        raise DomainError(f"boundary distance must be > 0, got {d}")
    lam, mu, A = barrier_lambda_mu(n, e, B, S, d)
    return math.sqrt(lam * d ** (-4.0 / e.e1) + A * mu)


def compare_to_barrier(field: RadialField, bp: BarrierParams) -> EstimateOutcome:
    """Check z(r) = s(r)**2 <= w(r) pointwise; witness at the max of z/w."""
    r = field.r
    if r[0] < 0.0 or r[-1] >= bp.R:
        raise ConfigurationError(
            f"field domain [{r[0]}, {r[-1]}] not contained in [0, R={bp.R})"
        )
    w, _, _ = barrier_eval(bp, r)
    ratio = field.s**2 / np.asarray(w)
    i = int(np.argmax(ratio))
    return EstimateOutcome.from_values(1.0, float(ratio[i]), float(r[i]))


def log_transform(field: RadialField, p: float | None = None) -> RadialField:
    """u = -(p-1) ln v of a positive field; lands in the q = p equation."""
    p = field.p if p is None else p
    v = field.u
    if np.any(v <= 0.0):
        raise DomainError("log transform requires a strictly positive field")
    u = -(p - 1.0) * np.log(v)
    s_u = -(p - 1.0) * field.s / v
    sprime_u = None
    if field.sprime is not None:
        sprime_u = -(p - 1.0) * (field.sprime * v - field.s**2) / (v * v)
    return RadialField(
        manifold=field.manifold, p=p, q=p, r=field.r, u=u, s=s_u,
        sprime=sprime_u, provenance=field.provenance, status=field.status,
    )


def log_transform_inverse(field: RadialField, p: float | None = None) -> RadialField:
    """v = exp(-u/(p-1)): inverse of :func:`log_transform`."""
    p = field.p if p is None else p
    v = np.exp(-field.u / (p - 1.0))
    s_v = -v * field.s / (p - 1.0)
    sprime_v = None
    if field.sprime is not None:
        sprime_v = v * (field.s**2 / (p - 1.0) ** 2 - field.sprime / (p - 1.0))
    return RadialField(
        manifold=field.manifold, p=p, q=None, r=field.r, u=v, s=s_v,
        sprime=sprime_v, provenance=field.provenance, status=field.status,
    )


def hj_residual(field: RadialField) -> float:
    """max | -Delta_p u + |grad u|**q | over samples, from analytic derivatives."""
    e = field.exponents
    if e is None:
        raise ConfigurationError("field has no Hamilton-Jacobi exponents")
    if field.sprime is None:
        raise ConfigurationError("residual needs the analytic second derivative")
    from .geometry import radial_p_laplacian

    lap = radial_p_laplacian(field.manifold, e.p, field.r, field.s, field.sprime)
    res = -np.asarray(lap) + np.abs(field.s) ** e.q
    return float(np.max(np.abs(res)))


def harnack_check(field: RadialField, a: float, x: float,
                  c_harnack: float, B: float | None = None) -> EstimateOutcome:
    """Two-sided Harnack bound between the coordinates a and x.

    Checks |ln v(x) - ln v(a)| <= c_harnack B dist(x, a) with dist the
    coordinate distance (geodesics in these symmetries are coordinate lines).
    """
    v = field.u
    if np.any(v <= 0.0):
        raise DomainError("Harnack check requires a positive field")
    B = field.manifold.B if B is None else B
    lo, hi = field.r[0], field.r[-1]
    if not (lo <= a <= hi and lo <= x <= hi):
        raise ConfigurationError("a, x must lie in the field's domain")
    logv = np.log(v)
    la = float(np.interp(a, field.r, logv))
    lx = float(np.interp(x, field.r, logv))
    d = abs(x - a)
    return EstimateOutcome.from_values(c_harnack * B * d, abs(lx - la), x)


def harnack_sweep(field: RadialField, c_harnack: float, B: float | None = None) -> EstimateOutcome:
    """Worst pair of samples: sup |ln v(x) - ln v(a)| / (B dist).

    The worst pair ratio equals the worst consecutive-sample ratio (mediant
    inequality), so consecutive slopes of ln v are enough.
    """
    v = field.u
    if np.any(v <= 0.0):
        raise DomainError("Harnack check requires a positive field")
    B = field.manifold.B if B is None else B
    if B == 0.0:
        raise ConfigurationError("Harnack sweep needs B > 0")
    slopes = np.abs(np.diff(np.log(v)) / np.diff(field.r))
    i = int(np.argmax(slopes))
    return EstimateOutcome.from_values(c_harnack, float(slopes[i] / B), float(field.r[i]))


def kotschwar_ni_comparison(field: RadialField, B: float | None = None) -> tuple[float, float]:
    """(measured sup |grad v|/v, (p-1) B): comparison against the classical
    Kotschwar-Ni decay line for positive p-harmonic functions.

    Reported as data only; on the exact log-model function the measured
    ratio is (n-1) B/(p-1), which exceeds the line whenever
    (n-1)/(p-1) > p-1.
    """
    v = field.u
    if np.any(v <= 0.0):
        raise DomainError("comparison requires a positive field")
    B = field.manifold.B if B is None else B
    measured = float(np.max(np.abs(field.s) / v))
    return measured, (field.p - 1.0) * B


@dataclass(frozen=True)
class LiouvilleRun:
    s0: float
    r0: float
    status: str
    r_star: float | None


@dataclass(frozen=True)
class LiouvilleReport:
    exponents: Exponents
    n: int
    r0: float
    runs: tuple[LiouvilleRun, ...]
    monotone_decreasing: bool
    findings: tuple[str, ...]
    inconclusive: tuple[float, ...]

    @property
    def all_blew_up(self) -> bool:
        return all(run.status == "blew_up" for run in self.runs)


def liouville_start_radius(n: int, e: Exponents, s0_grid) -> float:
    """Smallest decade start radius from which every sweep run provably blows up.

    Uses the closed-form flat-model blow-up radius: picks r0 in
    {0.01, 0.1, ..., 1e6} such that r*(s0, r0) is finite and at most
    100 max(1, r0) for every s0 in the grid.
    """
    for exp10 in range(-2, 7):
        r0 = 10.0**exp10
        stars = [flat_blowup_radius(n, e, s0, r0) for s0 in s0_grid]
        if all(math.isfinite(rs) and rs <= 100.0 * max(1.0, r0) for rs in stars):
            return r0
    raise ConfigurationError("no start radius with guaranteed desk-scale blow-up")


def liouville_sweep(
    e: Exponents,
    n: int,
    s0_grid,
    r_max: float = LIOUVILLE_FINDING_RMAX,
    tol: float = 1e-10,
    r0: float | None = None,
) -> LiouvilleReport:
    """Blow-up sweep on the flat model: no nonconstant radial branch survives.

    Every s0 > 0 must blow up at finite r*; a complete run reaching
    r_max >= 1e6 contradicts the Liouville property at numerical scale and
    is flagged as a FINDING, while a complete run on a shorter range is
    only inconclusive.
    """
    s0_grid = sorted(float(s) for s in s0_grid)
    if any(s <= 0.0 for s in s0_grid):
        raise DomainError("s0 grid must be positive (s0 = 0 is the constant solution)")
    if r0 is None:
        r0 = liouville_start_radius(n, e, s0_grid)
    if r_max <= r0:
        # range too short to even start: every run is inconclusive
        return LiouvilleReport(
            exponents=e, n=n, r0=r0,
            runs=tuple(LiouvilleRun(s0, r0, "inconclusive", None) for s0 in s0_grid),
            monotone_decreasing=False, findings=(),
            inconclusive=tuple(s0_grid),
        )
    m = ModelManifold("euclidean", n)
    runs = []
    findings = []
    inconclusive = []
    for s0 in s0_grid:
        field = solve_radial_hj(m, e, s0, r0, r_max, tol=tol)
        if field.status == "blew_up":
            runs.append(LiouvilleRun(s0, r0, "blew_up", field.blow_up_r))
        else:
            runs.append(LiouvilleRun(s0, r0, field.status, None))
            if field.status == "complete" and r_max >= LIOUVILLE_FINDING_RMAX:
                findings.append(
                    f"FINDING: s0={s0} stayed bounded to r={r_max:g} on the flat model"
                )
            else:
                inconclusive.append(s0)
    stars = [run.r_star for run in runs if run.r_star is not None]
    monotone = len(stars) == len(runs) and all(
        a > b for a, b in zip(stars, stars[1:])
    )
    return LiouvilleReport(
        exponents=e, n=n, r0=r0, runs=tuple(runs),
        monotone_decreasing=monotone, findings=tuple(findings),
        inconclusive=tuple(inconclusive),
    )
