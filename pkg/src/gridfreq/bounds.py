"""Closed-form constants and inequality bounds for grid-domain frequencies.

Everything here is exact arithmetic on (N, p, q) and a few geometric numbers
(inradius, order, volume, diameter); no solver output enters any formula. The
q = ∞ convention throughout: every 1/q term reads 0 and ω_N^(1/q) reads 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from gridfreq.errors import ValidationError

INF = math.inf

#: first positive root of the Bessel function J0, to 9 digits (hard-coded to
#: avoid a special-function dependency; exceeds every tolerance used here)
J01 = 2.404825558

#: λ(B₁) for p = q = 2 in the plane; square of J01
LAMBDA_DISK = J01 * J01


def omega(N: int) -> float:
    """Volume of the unit ball in R^N."""
    return math.pi ** (N / 2.0) / math.gamma(N / 2.0 + 1.0)


@dataclass(frozen=True)
class Exponents:
    """Validated (N, p, q) triple, q = math.inf allowed.

    Admissibility: q ≤ p* when p < N (p* = Np/(N-p)), q < ∞ when p = N,
    q ≤ ∞ when p > N.
    """

    N: int
    p: float
    q: float

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise ValidationError(f"N must be a positive integer, got {self.N}")
        if not (self.p >= 1):
            raise ValidationError(f"p must be >= 1, got {self.p}")
        if not (self.q >= 1):
            raise ValidationError(f"q must be >= 1 (math.inf allowed), got {self.q}")
        if self.p < self.N and self.q > self.p_star + 1e-12:
            raise ValidationError(
                f"q = {self.q} exceeds the critical exponent p* = {self.p_star:.6g}"
            )
        if self.p == self.N and self.q == INF:
            raise ValidationError("q must be finite when p = N")

    @property
    def p_star(self) -> float:
        """Critical embedding exponent Np/(N-p) (∞ when p >= N)."""
        if self.p >= self.N:
            return INF
        return self.N * self.p / (self.N - self.p)

    @property
    def inv_q(self) -> float:
        return 0.0 if self.q == INF else 1.0 / self.q

    @property
    def subhomogeneous(self) -> bool:
        return self.p <= self.q

    def planar_table_ok(self) -> bool:
        """Exponent table for the planar multiply-connected lower bound:
        q < p* if p < 2, q < ∞ if p = 2, q ≤ ∞ if p > 2 (plus p ≤ q)."""
        if self.N != 2 or not self.subhomogeneous:
            return False
        if self.p < 2:
            return self.q < self.p_star
        if self.p == 2:
            return self.q < INF
        return True


@dataclass(frozen=True)
class BoundRow:
    """One verification record comparing a numeric value with a bound."""

    label: str
    inputs: dict = field(default_factory=dict)
    bound: float = math.nan
    target: float = math.nan
    tolerance: float = 0.0
    flagged: bool = False  # solver failure: row is reported but not judged

    @property
    def margin(self) -> float:
        return self.target - self.bound

    @property
    def passed(self) -> bool:
        return self.flagged or self.margin >= -self.tolerance


def mu_lower_bound(e: Exponents, volume: float, diameter: float) -> float:
    """Lower bound for the Poincaré-Wirtinger constant of a bounded convex set.

    (N ω_N^{1/N})^p (V/diam^N)^p ((1/N-1/p+1/q)/(1-1/p+1/q))^{p-1+p/q} V^{1-p/N-p/q}
    """
    if not e.subhomogeneous:
        raise ValidationError("the convex lower bound needs q >= p")
    if not (volume > 0 and diameter > 0):
        raise ValidationError("volume and diameter must be positive")
    N, p, iq = e.N, e.p, e.inv_q
    wN = omega(N)
    num = 1.0 / N - 1.0 / p + iq
    den = 1.0 - 1.0 / p + iq
    ratio = num / den
    if ratio < 0:
        raise ValidationError("inadmissible exponents: negative embedding exponent")
    return (
        (N * wN ** (1.0 / N)) ** p
        * (volume / diameter**N) ** p
        * ratio ** (p - 1.0 + p * iq)
        * volume ** (1.0 - p / N - p * iq)
    )


@dataclass(frozen=True)
class ExtensionConstants:
    A: float  # gradient-extension factor for bi-Lipschitz-to-ball sets
    B: float  # function-extension factor
    alpha: float  # A evaluated at eccentricity sqrt(N) (cube case)


def extension_constants(e: Exponents, eccentricity: float) -> ExtensionConstants:
    """Extension operator norms as a function of the set's eccentricity
    (circumradius/inradius about the chosen center)."""
    if eccentricity < 1.0:
        raise ValidationError("eccentricity must be >= 1")
    N, p = e.N, e.p

    # evaluated in log space: the raw power 6^(3N+p) overflows for large p
    def grad_factor(ecc: float) -> float:
        return math.exp(
            (math.log(4.0) + (3 * N + p) * math.log(6.0)) / p
            + (6.0 * N / p + 2.0) * math.log(ecc)
        )

    B = math.exp(
        (math.log(2.0) + N * math.log(6.0)) / p + (2.0 * N / p) * math.log(eccentricity)
    )
    return ExtensionConstants(
        grad_factor(eccentricity), B, grad_factor(math.sqrt(N))
    )


def mazya_constant(e: Exponents, ratio: float, mu_value: float | None = None) -> float:
    """Explicit constant of the capacitary cube Poincaré inequality.

    `ratio` is d/D (cube half-side over ball radius), constrained to
    0 < d/D < 1/sqrt(N). By default the Poincaré-Wirtinger constant of the
    unit ball is replaced by its closed-form convex lower bound, which keeps
    the result reproducible bit for bit; pass mu_value to plug a different
    number (the constant is strictly increasing in it).
    """
    N, p = e.N, e.p
    if not (0.0 < ratio < 1.0 / math.sqrt(N)):
        raise ValidationError(f"d/D must lie in (0, 1/sqrt(N)), got {ratio}")
    if not e.subhomogeneous:
        raise ValidationError("the cube inequality needs q >= p")
    if mu_value is None:
        mu_value = mu_lower_bound(e, volume=omega(N), diameter=2.0)
    if not (mu_value > 0):
        raise ValidationError("mu plug-in value must be positive")
    alpha = extension_constants(e, math.sqrt(N)).alpha
    wN = omega(N)
    iq = e.inv_q
    wq = 1.0 if e.q == INF else wN**iq
    bracket = wq + 4.0 * wN ** (1.0 / p) / (1.0 - math.sqrt(N) * ratio) * mu_value ** (
        -1.0 / p
    )
    return (1.0 / alpha) * ratio ** (4.0 * N / p + N * iq) / bracket


@dataclass(frozen=True)
class ThetaBound:
    theta: float  # the (p, q) constant alone
    bound: float  # Θ_{p,q} (√k r)^{-(p-2+2p/q)}
    exponent: float  # p - 2 + 2p/q


def theta_lower_bound(e: Exponents, k: int, r: float) -> ThetaBound:
    """Planar lower bound for λ_{p,q} of a multiply connected set of order k
    with inradius r. Rejects q < p: the inequality genuinely fails there
    (long thin strips have arbitrarily small λ_{p,q} at unit inradius)."""
    if e.N != 2:
        raise ValidationError("the multiply-connected bound is planar (N = 2)")
    if not e.subhomogeneous:
        raise ValidationError(
            "q < p rejected: the lower bound fails already for convex sets "
            "(infinite strips give λ = 0 with unit inradius)"
        )
    if not e.planar_table_ok():
        raise ValidationError(f"exponent pair (p={e.p}, q={e.q}) outside the planar table")
    if k < 1 or int(k) != k:
        raise ValidationError("order k must be a positive integer")
    if not (r > 0):
        raise ValidationError("inradius must be positive")
    p, iq = e.p, e.inv_q
    C = mazya_constant(e, 0.5)
    theta = C**p / (2.0**p * 10.0 ** (p - 1.0 + 2.0 * p * iq))
    expo = p - 2.0 + 2.0 * p * iq
    return ThetaBound(theta, theta * (math.sqrt(k) * r) ** (-expo), expo)


# ---------------------------------------------------------------------------
# Closed-form capacities


def interval_point_capacity(p: float, a: float, b: float, x0: float) -> tuple[float, float]:
    """p-capacity of the point x0 relative to the interval (a, b).

    Returns (exact optimum, convexity lower bound 2^p/(b-a)^(p-1)). The exact
    value is (x0-a)^(1-p) + (b-x0)^(1-p) for p > 1 and 2 for p = 1.
    """
    if not (a < x0 < b):
        raise ValidationError("need a < x0 < b")
    if p < 1:
        raise ValidationError("p must be >= 1")
    lower = 2.0**p / (b - a) ** (p - 1.0)
    if p == 1.0:
        return 2.0, lower
    exact = (x0 - a) ** (1.0 - p) + (b - x0) ** (1.0 - p)
    return exact, lower


def disk_capacity_relative(eps: float) -> float:
    """2-capacity of the disk of radius eps relative to the concentric unit
    disk: 2π / log(1/eps)."""
    if not (0.0 < eps < 1.0):
        raise ValidationError("eps must lie in (0, 1)")
    return 2.0 * math.pi / math.log(1.0 / eps)


def punctured_ball_capacity(N: int, p: float) -> float:
    """p-capacity of the center point relative to the unit ball, p > N:
    N ω_N ((p-N)/(p-1))^(p-1)."""
    if not p > N:
        raise ValidationError("point capacity is positive only for p > N")
    return N * omega(N) * ((p - N) / (p - 1.0)) ** (p - 1.0)


def closed_form_capacities(kind: str, **params) -> float | tuple[float, float]:
    """Dispatcher over the closed-form capacity family."""
    if kind == "interval_point":
        return interval_point_capacity(
            params["p"], params["a"], params["b"], params["x0"]
        )
    if kind == "disk_relative":
        return disk_capacity_relative(params["eps"])
    if kind == "punctured_ball_value":
        return punctured_ball_capacity(params["N"], params["p"])
    raise ValidationError(f"unknown capacity kind {kind!r}")


# ---------------------------------------------------------------------------
# Endpoint (p > N) bounds and their interpolation


@dataclass(frozen=True)
class EndpointBounds:
    beta: float  # max{Λ_p(B₁∖{0})/(√N+1)^p, ((p-N)/p)^p}
    hardy_component: float
    puncture_component: float
    lambda_p_lower: float  # β/r^p
    lambda_inf_lower: float  # Λ_{p,∞}(B₁∖{0})/r^(p-N)
    interpolated_lower: float  # β^{p/q} Λ_∞^{1-p/q} r^{-(p-N+Np/q)}


def endpoint_bounds(
    e: Exponents, r: float, Lambda_p_ball: float, Lambda_p_inf_ball: float
) -> EndpointBounds:
    """Inradius lower bounds for λ_p, λ_{p,∞} and the interpolated λ_{p,q},
    built from the punctured-ball constants (supplied by the radial solver or
    the closed form)."""
    N, p, q = e.N, e.p, e.q
    if not p > N:
        raise ValidationError("endpoint bounds need p > N")
    if not (r > 0 and Lambda_p_ball > 0 and Lambda_p_inf_ball > 0):
        raise ValidationError("inradius and punctured constants must be positive")
    punct = Lambda_p_ball / (math.sqrt(N) + 1.0) ** p
    hardy = ((p - N) / p) ** p
    beta = max(punct, hardy)
    pq = 0.0 if q == INF else p / q
    interp = (
        beta**pq
        * Lambda_p_inf_ball ** (1.0 - pq)
        * r ** -(p - N + N * pq)
    )
    return EndpointBounds(
        beta=beta,
        hardy_component=hardy,
        puncture_component=punct,
        lambda_p_lower=beta / r**p,
        lambda_inf_lower=Lambda_p_inf_ball / r ** (p - N),
        interpolated_lower=interp,
    )


@dataclass(frozen=True)
class BuserBounds:
    cheeger_lower: float  # Θ_{1,1}/(√k r)
    buser_upper: float  # (j01/Θ_{1,1})² k h²
    lambda_lower_from_h: float  # (h/2)²
    theta_11: float


def buser_bounds(k: int, h_value: float, r: float) -> BuserBounds:
    """Geometric Cheeger lower bound, the planar reverse inequality for λ,
    and the universal (h/2)² ≤ λ lower bound."""
    if k < 1:
        raise ValidationError("order k must be >= 1")
    if not (h_value > 0 and r > 0):
        raise ValidationError("h and r must be positive")
    theta11 = theta_lower_bound(Exponents(2, 1.0, 1.0), 1, 1.0).theta
    return BuserBounds(
        cheeger_lower=theta11 / (math.sqrt(k) * r),
        buser_upper=(J01 / theta11) ** 2 * k * h_value**2,
        lambda_lower_from_h=(h_value / 2.0) ** 2,
        theta_11=theta11,
    )


def scaling_exponent(e: Exponents) -> float:
    """Homogeneity degree of λ_{p,q} under dilation: value of the dilated-by-t
    set equals t^(-(p - N + Np/q)) times the original."""
    return e.p - e.N + e.N * e.p * e.inv_q
