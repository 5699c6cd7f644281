"""Derivation and certification of every constant the gradient-estimate proof uses.

The underlying argument never computes its constants; it only asserts they
exist.  This module fixes one explicit, auditable derivation:

* ``bochner_constants`` -- one Young split (auxiliary a = 1) of the
  differential inequality satisfied by z = |grad u|**2, yielding explicit
  absorption constants (C, D).  The split is certified by randomized
  sampling of admissible tuples; the margin decomposes into a sum of
  manifestly nonnegative terms, so certification is exact.
* ``k_constant``        -- the single geometric constant collecting the
  finitely many coefficients of the barrier comparison majorants.
* ``barrier_lambda_mu`` -- the barrier coefficients (lambda, mu) and the
  amplification A, with the scale factor c picked as the smallest value
  making every absorption requirement hold uniformly on [0, R).
* ``ellipticity``       -- the ellipticity pair of the frozen-coefficient
  operator  -Delta_2 - (p-2) <D^2 . (nu), nu>,  nu the gradient direction.

Any valid choice of constants proves the same estimates; the grid and
randomized certifications in the test suite are the arbiter of validity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConstraintError, DomainError

# Fixed auxiliary of the Young split.  C and D below are derived for this
# value; changing it changes them consistently.
BOCHNER_A = 1.0


@dataclass(frozen=True)
class Exponents:
    """The pair (p, q) with the structural constraint q > p-1 > 0."""

    p: float
    q: float

    def __post_init__(self):
        if not self.p > 1.0:
            raise ConstraintError(f"q > p-1 > 0 requires p > 1, got p = {self.p}")
        if not self.q > self.p - 1.0:
            raise ConstraintError(
                f"constraint q > p-1 violated: q = {self.q}, p-1 = {self.p - 1.0}"
            )

    @property
    def e1(self) -> float:
        """q + 1 - p, the homogeneity exponent of the gradient bound (> 0)."""
        return self.q + 1.0 - self.p

    @property
    def e2(self) -> float:
        """q + 2 - p, the absorption exponent (> 1)."""
        return self.q + 2.0 - self.p


def ellipticity(p: float) -> tuple[float, float]:
    """(theta, Theta) = (min(1, p-1), max(1, p-1)).

    Eigenvalues of I + (p-2) nu (x) nu are p-1 (along nu) and 1 (normal to
    it), so the quadratic form is sandwiched between theta |xi|**2 and
    Theta |xi|**2 for unit nu.
    """
    if p <= 1.0:
        raise DomainError(f"p must be > 1, got {p}")
    return min(1.0, p - 1.0), max(1.0, p - 1.0)


def bochner_constants(e: Exponents, n: int) -> tuple[float, float, float]:
    """Explicit (a, C, D) for the absorption step of the z-inequality.

    With a = 1 the Young split of the cross term
        e2 z^((q-p)/2) G  >=  -(a**2/n) z^e2 - (n e2**2 / (4 a**2)) P**2/z
    and |G| <= P sqrt(z) give
        C = a**2/n,
        D = 1/(n a**2) + (3/2)|p-2| + n e2**2/(4 a**2).
    """
    if n < 2:
        raise DomainError(f"dimension must be >= 2, got {n}")
    a = BOCHNER_A
    C = a * a / n
    D = 1.0 / (n * a * a) + 1.5 * abs(e.p - 2.0) + n * e.e2**2 / (4.0 * a * a)
    return a, C, D


def bochner_margin(e: Exponents, n: int, z, P, u):
    """Margin of the certified inequality at the admissible tuple (z, G, P).

    The tuple is parametrized by u = G/(P sqrt(z)) in [-1, 1] so the
    Cauchy-Schwarz constraint is built in.  The margin

        (2a^2/n) z^e2 - G^2/(n a^2 z^2) - ((p-2)/2) P^2/z + (p-2) G^2/z^2
        + e2 z^((q-p)/2) G - (C z^e2 - D P^2/z)

    is rearranged, exactly, into a sum of nonnegative terms, which is also
    the numerically stable way to evaluate it:

        (x - y)^2 + e2 z^(e1/2) P (1+u) + P^2 (1-u^2)/(n a^2 z) + T3,
        x = a z^(e2/2)/sqrt(n),  y = sqrt(n) e2 P / (2 a sqrt(z)),
        T3 = (p-2) P^2 (1+u^2)/z          if p >= 2,
             (2-p) P^2 (2-u^2)/z          if p <  2.
    """
    a, _, _ = bochner_constants(e, n)
    z = np.asarray(z, dtype=float)
    P = np.asarray(P, dtype=float)
    u = np.asarray(u, dtype=float)
    p, e1, e2 = e.p, e.e1, e.e2
    x = a * z ** (e2 / 2.0) / math.sqrt(n)
    y = math.sqrt(n) * e2 * P / (2.0 * a * np.sqrt(z))
    cross = e2 * z ** (e1 / 2.0) * P * (1.0 + u)
    t2 = P * P * (1.0 - u * u) / (n * a * a * z)
    if p >= 2.0:
        t3 = (p - 2.0) * P * P * (1.0 + u * u) / z
    else:
        t3 = (2.0 - p) * P * P * (2.0 - u * u) / z
    out = (x - y) ** 2 + cross + t2 + t3
    return out if out.ndim else float(out)


def bochner_margin_direct(e: Exponents, n: int, z, P, G):
    """Term-by-term evaluation of the same margin, for cross-checking.

    Suffers cancellation at large scales; use :func:`bochner_margin` for
    certification sweeps.
    """
    a, C, D = bochner_constants(e, n)
    z = np.asarray(z, dtype=float)
    P = np.asarray(P, dtype=float)
    G = np.asarray(G, dtype=float)
    p, e2 = e.p, e.e2
    lhs = (
        (2.0 * a * a / n) * z**e2
        - G * G / (n * a * a * z * z)
        - ((p - 2.0) / 2.0) * P * P / z
        + (p - 2.0) * G * G / (z * z)
        + e2 * z ** ((e.q - p) / 2.0) * G
    )
    rhs = C * z**e2 - D * P * P / z
    out = lhs - rhs
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class BochnerCertificate:
    exponents: Exponents
    n: int
    samples: int
    seed: int
    min_margin: float
    argmin: tuple[float, float, float]  # (z, P, G) at the minimum
    passed: bool


def certify_bochner(
    e: Exponents,
    n: int,
    samples: int = 100_000,
    seed: int = 0,
    z_range: tuple[float, float] = (1e-3, 1e3),
    p_max: float = 1e3,
    slack: float = 0.0,
) -> BochnerCertificate:
    """Randomized certification of the absorption inequality.

    z is log-uniform on ``z_range``, P uniform on [0, p_max], and
    G = u P sqrt(z) with u uniform on [-1, 1].  Passes iff the minimum
    margin is >= -slack.
    """
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    lo, hi = z_range
    z = np.exp(rng.uniform(math.log(lo), math.log(hi), samples))
    P = rng.uniform(0.0, p_max, samples)
    u = rng.uniform(-1.0, 1.0, samples)
    margins = bochner_margin(e, n, z, P, u)
    i = int(np.argmin(margins))
    G = u[i] * P[i] * math.sqrt(z[i])
    m = float(margins[i])
    return BochnerCertificate(
        exponents=e,
        n=n,
        samples=samples,
        seed=seed,
        min_margin=m,
        argmin=(float(z[i]), float(P[i]), float(G)),
        passed=m >= -slack,
    )


def k_constant(n: int, e: Exponents) -> float:
    """Geometric constant k(n, p, q) of the barrier comparison bound.

    Collects the coefficients of the relaxed Laplacian majorant and, scaled
    by |p-2|, of the Hessian majorant, against the normal form
    R**2 + (R**2 - r**2) Bp r:

        k = (4/e1) * ( 2 (q+3-p)(1+|p-2|)/e1 + n + 2 |p-2| ).

    The r**2 terms are bounded by R**2; the curvature terms contribute at
    most n * (R**2-r**2) Bp r, which n in the bracket absorbs.
    """
    if n < 2:
        raise DomainError(f"dimension must be >= 2, got {n}")
    p = e.p
    e1 = e.e1
    qp3 = e.q + 3.0 - p  # = e1 + 2
    return (4.0 / e1) * (2.0 * qp3 * (1.0 + abs(p - 2.0)) / e1 + n + 2.0 * abs(p - 2.0))


def amplification(e: Exponents, n: int) -> float:
    """Smallest power of two A >= (1/(C e2))**(1/e1); A = 1 when C e2 >= 1.

    Guarantees the comparison trigger C e2 (A mu)**e1 >= (n-1) B**2 once
    mu = ((n-1) B**2)**(1/e1).
    """
    _, C, _ = bochner_constants(e, n)
    need = C * e.e2
    if need >= 1.0:
        return 1.0
    raw = (1.0 / need) ** (1.0 / e.e1)
    return float(2.0 ** math.ceil(math.log2(raw)))


def barrier_lambda_mu(
    n: int, e: Exponents, B: float, S: float | None, R: float
) -> tuple[float, float, float]:
    """(lambda, mu, A) making the barrier a certified supersolution on B_R.

    mu = ((n-1) B**2)**(1/e1); A per :func:`amplification`.  lambda**e1 is
    the max of three uniform requirements over 0 <= r < R (y = R**2 - r**2):

      1. (2/C) * max_r [ k (R**2 + y Bp r) + 16 D r**2 / e1**2 ]
         -- half the z**e2 budget absorbs the operator and gradient terms;
      2. (4 (n-1)/C) B**2 R**4
         -- a quarter budget absorbs -(n-1) B**2 lambda y**(-2/e1) and the
            remaining quarter covers the mu-term deficit (1-C) (n-1) B**2 mu;
      3. A**e1 (n-1) B**2 R**4
         -- keeps the amplified barrier (mu -> A mu) a supersolution and
            w(center) >= A mu.

    The reported c is lambda divided by the scale
    max{ (R**4 B**2)**(1/e1), ((1+Bp) R**3)**(1/e1) }.
    """
    if R <= 0.0:
        raise DomainError(f"R must be > 0, got {R}")
    if B < 0.0:
        raise DomainError(f"B must be >= 0, got {B}")
    e1 = e.e1
    _, C, D = bochner_constants(e, n)
    k = k_constant(n, e)
    bp = B if e.p <= 2.0 else B + (e.p - 2.0) * _require_s(S)

    mu = ((n - 1) * B * B) ** (1.0 / e1)
    A = amplification(e, n)

    req1 = (2.0 / C) * _max_operator_rhs(k, D, e1, bp, R)
    req2 = (4.0 * (n - 1) / C) * B * B * R**4
    req3 = A**e1 * (n - 1) * B * B * R**4
    lam = max(req1, req2, req3) ** (1.0 / e1)
    return lam, mu, A


def _require_s(S: float | None) -> float:
    if S is None:
        raise DomainError("p > 2 requires a sectional curvature bound S")
    return S


def _max_operator_rhs(k: float, D: float, e1: float, bp: float, R: float) -> float:
    """max over r in [0, R] of k (R**2 + (R**2 - r**2) bp r) + 16 D r**2/e1**2.

    The cubic's interior critical point solves
    -3 k bp r**2 + (32 D / e1**2) r + k bp R**2 = 0; the max is over it and
    the endpoints.
    """

    def g(r: float) -> float:
        return k * (R * R + (R * R - r * r) * bp * r) + 16.0 * D * r * r / (e1 * e1)

    candidates = [0.0, R]
    if bp > 0.0:
        b = 32.0 * D / (e1 * e1)
        disc = b * b + 12.0 * (k * bp) ** 2 * R * R
        r_star = (b + math.sqrt(disc)) / (6.0 * k * bp)
        if 0.0 < r_star < R:
            candidates.append(r_star)
    return max(g(r) for r in candidates)


def barrier_scale(e: Exponents, B: float, bp: float, R: float) -> float:
    """The normalizing scale of lambda: max{(R^4 B^2)^(1/e1), ((1+Bp) R^3)^(1/e1)}."""
    e1 = e.e1
    return max((R**4 * B * B) ** (1.0 / e1), ((1.0 + bp) * R**3) ** (1.0 / e1))


@dataclass(frozen=True)
class ProofConstants:
    """Complete constants ledger for one configuration (n, p, q, B, S, R)."""

    n: int
    exponents: Exponents
    B: float
    S: float | None
    R: float
    a: float
    C: float
    D: float
    k: float
    c: float
    lam: float
    mu: float
    A: float
    theta: float
    Theta: float
    c_grad: float
    c_harnack: float

    LEDGER_COLUMNS = (
        "n,p,q,B,S,R,a,C,D,k,c,lambda,mu,A,theta,Theta,c_grad,c_harnack"
    )

    def ledger_row(self) -> list[float]:
        e = self.exponents
        return [
            self.n, e.p, e.q, self.B,
            self.S if self.S is not None else float("nan"), self.R,
            self.a, self.C, self.D, self.k, self.c, self.lam, self.mu,
            self.A, self.theta, self.Theta, self.c_grad, self.c_harnack,
        ]


def gradient_constant(n: int, e: Exponents) -> float:
    """c_grad(n, p, q): the R -> infinity limit of the interior bound constant.

    Only requirements 2 and 3 of the lambda derivation survive the limit
    lambda R**(-4/e1), so

        c_grad = sqrt( (max{4(n-1)/C, A**e1 (n-1)})**(1/e1) + A (n-1)**(1/e1) )

    and the global bound is c_grad * B**(1/e1).  It dominates the exact
    constant-slope gradient ((n-1) B)**(1/e1) since 4 n (n-1) >= (n-1)**2.
    """
    _, C, _ = bochner_constants(e, n)
    A = amplification(e, n)
    e1 = e.e1
    level = max(4.0 * (n - 1) / C, A**e1 * (n - 1)) ** (1.0 / e1)
    return math.sqrt(level + A * (n - 1) ** (1.0 / e1))


def harnack_constant(n: int, p: float) -> float:
    """c_harnack(n, p) = c_grad(n, p, q=p) / (p-1).

    Integrating the q = p gradient bound along a unit-speed minimizing
    geodesic gives |u(x) - u(a)| <= c_grad B d; dividing by p-1 converts to
    the two-sided bound on log v for v = exp(-u/(p-1)).
    """
    return gradient_constant(n, Exponents(p, p)) / (p - 1.0)


def build_constants(
    n: int, e: Exponents, B: float, S: float | None, R: float
) -> ProofConstants:
    """Assemble the full ledger record for one configuration."""
    a, C, D = bochner_constants(e, n)
    k = k_constant(n, e)
    lam, mu, A = barrier_lambda_mu(n, e, B, S, R)
    bp = B if e.p <= 2.0 else B + (e.p - 2.0) * _require_s(S)
    theta, Theta = ellipticity(e.p)
    return ProofConstants(
        n=n, exponents=e, B=B, S=S, R=R,
        a=a, C=C, D=D, k=k,
        c=lam / barrier_scale(e, B, bp, R),
        lam=lam, mu=mu, A=A,
        theta=theta, Theta=Theta,
        c_grad=gradient_constant(n, e),
        c_harnack=harnack_constant(n, e.p),
    )
