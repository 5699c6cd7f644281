"""Closed-form model manifolds and radial comparison-geometry formulas.

The models are the constant-curvature spaces where every comparison bound
used downstream is either an identity or globally valid:

* ``euclidean``   -- flat space, warping f(r) = r;
* ``hyperbolic``  -- curvature -B**2, warping f(r) = sinh(B r)/B;
* ``log_model``   -- hyperbolic space in horospherical coordinates, where
  functions of the coordinate t satisfy Delta_2 t = (n-1) B and
  constant-slope exact solutions of the Hamilton-Jacobi equation live.

All operations are pure functions; arrays broadcast elementwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DegeneracyError, DomainError

# Below this argument coth switches to its Laurent series: direct 1/tanh(x)
# loses relative accuracy to cancellation as x -> 0.
COTH_SERIES_CUTOFF = 1e-4

RADIAL_KINDS = ("euclidean", "hyperbolic")
ALL_KINDS = ("euclidean", "hyperbolic", "log_model")


def coth(x):
    """coth(x) for x > 0, Laurent series (3 terms) below the cutoff.

    coth(x) = 1/x + x/3 - x**3/45 + O(x**5); at the cutoff 1e-4 the dropped
    term is ~2e-27 relative to the leading 1/x.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0):
        raise DomainError("coth evaluated at nonpositive argument")
    small = x < COTH_SERIES_CUTOFF
    out = np.empty_like(x)
    xs = x[small]
    out[small] = 1.0 / xs + xs / 3.0 - xs**3 / 45.0
    xl = x[~small]
    out[~small] = 1.0 / np.tanh(xl)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class ModelManifold:
    """A rotationally symmetric or horospherical space form.

    ``B`` is the curvature scale: Ricc >= -(n-1) B**2 with equality on the
    hyperbolic kinds.  ``euclidean`` behaves identically to ``hyperbolic``
    with B = 0.
    """

    kind: str
    n: int
    B: float = 0.0

    def __post_init__(self):
        if self.kind not in ALL_KINDS:
            raise ConfigurationError(f"unknown manifold kind {self.kind!r}")
        if self.n < 2:
            raise DomainError(f"dimension must be >= 2, got {self.n}")
        if self.B < 0.0:
            raise DomainError(f"curvature scale B must be >= 0, got {self.B}")
        if self.kind == "euclidean" and self.B != 0.0:
            raise ConfigurationError("euclidean manifold must have B = 0")

    @property
    def is_radial(self) -> bool:
        return self.kind in RADIAL_KINDS

    def log_density_slope(self, x):
        """d/dx log(volume density) along the symmetry coordinate.

        Radial kinds: (n-1) f'/f.  Log model: (n-1) B, constant in t.
        """
        if self.kind == "log_model":
            x = np.asarray(x, dtype=float)
            out = np.full_like(x, (self.n - 1) * self.B)
            return out if out.ndim else float(out)
        _, _, fpf = warping(self, x)
        return (self.n - 1) * np.asarray(fpf)

    def density(self, x):
        """Volume density along the coordinate: f(r)**(n-1), or exp((n-1) B t)."""
        if self.kind == "log_model":
            return np.exp((self.n - 1) * self.B * np.asarray(x, dtype=float))
        f, _, _ = warping(self, x)
        return np.asarray(f) ** (self.n - 1)


@dataclass(frozen=True)
class CurvatureData:
    """Curvature bounds feeding the barrier assembly.

    B: Ricci lower-bound scale (Ricc >= (1-n) B**2).
    S: sectional-curvature magnitude bound (needed only for p > 2);
       None means "not available".
    Bp = B + (p-2)_+ S.
    """

    B: float
    S: float | None = None

    def __post_init__(self):
        if self.B < 0.0:
            raise DomainError(f"B must be >= 0, got {self.B}")
        if self.S is not None and self.S < 0.0:
            raise DomainError(f"S must be >= 0, got {self.S}")

    @classmethod
    def from_model(cls, m: ModelManifold) -> "CurvatureData":
        # On a constant-curvature model the sectional bound equals B.
        return cls(B=m.B, S=m.B)

    def bp(self, p: float) -> float:
        if p <= 2.0:
            return self.B
        if self.S is None:
            raise ConfigurationError("p > 2 requires a sectional curvature bound S")
        return self.B + (p - 2.0) * self.S


def warping(m: ModelManifold, r):
    """(f, f', f'/f) at radius r > 0 for the radial kinds.

    Hyperbolic: f = sinh(Br)/B, f'/f = B coth(Br), series-evaluated for
    Br below the cutoff to avoid cancellation.
    """
    if not m.is_radial:
        raise ConfigurationError("warping is defined for radial kinds only")
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0):
        raise DomainError("radius must be > 0")
    if m.B == 0.0:
        f = r.copy()
        fp = np.ones_like(r)
        fpf = 1.0 / r
    else:
        x = m.B * r
        f = np.sinh(x) / m.B
        fp = np.cosh(x)
        fpf = m.B * np.asarray(coth(x))
    if r.ndim:
        return f, fp, fpf
    return float(f), float(fp), float(fpf)


def laplacian_distance_bound(n: int, B: float, r):
    """Upper bounds for the distance Laplacian: ((n-1) B coth(Br), (n-1)(1+Br)/r).

    The coth bound dominates the exact Delta_2 r on every model with
    Ricc >= (1-n) B**2; the relaxed form dominates the coth bound.
    """
    if n < 2:
        raise DomainError(f"dimension must be >= 2, got {n}")
    if B < 0.0:
        raise DomainError(f"B must be >= 0, got {B}")
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0):
        raise DomainError("radius must be > 0")
    if B == 0.0:
        coth_bound = (n - 1) / r
    else:
        coth_bound = (n - 1) * B * np.asarray(coth(B * r))
    relaxed = (n - 1) * (1.0 + B * r) / r
    if r.ndim:
        return coth_bound, relaxed
    return float(coth_bound), float(relaxed)


def hessian_distance_bound(S: float, r):
    """Upper bounds for the distance Hessian eigenvalues: (S coth(Sr), (S/r)(1+Sr)).

    Valid for 0 >= Sec >= -S**2; the S -> 0 limit of the first form is 1/r.
    """
    if S < 0.0:
        raise DomainError(f"S must be >= 0, got {S}")
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0):
        raise DomainError("radius must be > 0")
    if S == 0.0:
        coth_bound = 1.0 / r
    else:
        coth_bound = S * np.asarray(coth(S * r))
    relaxed = (S / r) * (1.0 + S * r) if S > 0.0 else np.zeros_like(r)
    if r.ndim:
        return coth_bound, relaxed
    return float(coth_bound), float(relaxed)


def radial_p_laplacian(m: ModelManifold, p: float, r, s, sprime):
    """Delta_p u for u a function of the symmetry coordinate, u' = s, u'' = s'.

    Radial kinds: |s|**(p-2) ((p-1) s' + (n-1)(f'/f) s); on the log model the
    drag coefficient is the constant (n-1) B.  For p = 2 the |s| factor is
    omitted exactly, so s = 0 is fine there.
    """
    if p <= 1.0:
        raise DomainError(f"p must be > 1, got {p}")
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    sprime = np.asarray(sprime, dtype=float)
    if p < 2.0 and np.any(s == 0.0):
        raise DegeneracyError("p < 2 and s = 0: degenerate point rejected")
    drag = m.log_density_slope(r)
    linear = (p - 1.0) * sprime + np.asarray(drag) * s
    if p == 2.0:
        out = linear
    else:
        out = np.abs(s) ** (p - 2.0) * linear
    out = np.asarray(out)
    return out if out.ndim else float(out)
