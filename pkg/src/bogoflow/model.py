"""Model parameters, closed-form energies, and regime checks.

Conventions used throughout the package:

- N particles occupy three interacting modes: a condensate mode and a
  pair of opposite-momentum modes.  N is even by construction.
- phi > 0 is the interaction strength (energy units); epsilon = k^2/phi
  is the ratio of the pair modes' kinetic energy to phi.  The kinetic
  energy k^2 is never stored, always recomputed as epsilon*phi.
- delta0 is the smallest kinetic energy of any mode outside the
  interacting triple; it only enters gap accounting and window caps.
- The default normalization is phi = 1, so energies read in units of phi.

`phi = 0` is tolerated as the degenerate no-interaction configuration
(used by cross-checks); the solver itself requires phi > 0.
"""

import math
from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters; immutable and safe to share across threads."""

    n_particles: int
    epsilon: float
    phi: float = 1.0
    delta0: float = 1.0
    # geometry metadata, reporting only
    box_side: Optional[float] = None
    dimension: Optional[int] = None
    density: Optional[float] = None

    def __post_init__(self):
        n = self.n_particles
        if not isinstance(n, (int,)) or isinstance(n, bool):
            raise ValueError("n_particles must be an integer")
        if n < 2:
            raise ValueError("n_particles must be >= 2")
        if n % 2 != 0:
            raise ValueError("n must be even")
        if not (self.epsilon > 0.0) or not math.isfinite(self.epsilon):
            raise ValueError("epsilon must be positive and finite")
        if self.phi < 0.0 or not math.isfinite(self.phi):
            raise ValueError("phi must be nonnegative and finite")
        if not (self.delta0 > 0.0):
            raise ValueError("delta0 must be positive")

    @property
    def kinetic(self) -> float:
        """Pair-mode kinetic energy k^2 = epsilon * phi."""
        return self.epsilon * self.phi


@dataclass(frozen=True)
class FlowConfig:
    """Exponents, empirical constants, and tolerances of the flow machinery.

    nu, mu, gamma, beta are the exponents of the four regime conditions;
    delta controls the top of the spectral window (None means the
    standard choice 1 + sqrt(epsilon), resolved per parameter point).
    theta, c_gamma, k_gamma are "sufficiently small/large" constants with
    documented defaults; they are configuration, not ground truth.
    """

    nu: float = 1.5
    mu: float = 2.0 / 3.0
    gamma: float = 1.0 / 3.0
    beta: float = 2.0 / 3.0
    delta: Optional[float] = None
    theta: float = 0.1
    c_gamma: float = 10.0
    k_gamma: float = 0.05
    tol_root: float = 1e-12
    tol_residual: float = 1e-10

    def __post_init__(self):
        if not self.nu > 11.0 / 8.0:
            raise ValueError("nu must exceed 11/8")
        if not 0.0 < self.mu < 1.0:
            raise ValueError("mu must lie in (0, 1)")
        if not 0.0 < self.gamma < 1.0:
            raise ValueError("gamma must lie in (0, 1)")
        if not 0.0 < self.beta < 1.0:
            raise ValueError("beta must lie in (0, 1)")
        if self.delta is not None and not self.delta < 2.0:
            raise ValueError("delta must be < 2")
        if not (self.tol_root > 0.0 and self.tol_residual > 0.0):
            raise ValueError("tolerances must be positive")

    def resolved_delta(self, epsilon: float) -> float:
        return self.delta if self.delta is not None else 1.0 + math.sqrt(epsilon)

    @property
    def theta_exponent(self) -> float:
        """Exponent of the xi = epsilon**Theta correction in sequence bounds."""
        return min(2.0 * (self.nu - 11.0 / 8.0), 0.25)


def bogoliubov_energy(params: ModelParams) -> float:
    """Closed-form pair-mode ground-energy approximation.

    Dimensionless form: E/phi = -(epsilon + 1 - sqrt(epsilon^2+2*epsilon)).
    Evaluated as -phi / (1 + epsilon + sqrt(epsilon^2 + 2*epsilon)), which
    is the same quantity without the cancellation at large epsilon
    ((1+eps)^2 - (eps^2+2eps) = 1 identically).
    """
    eps = params.epsilon
    return -params.phi / (1.0 + eps + math.sqrt(eps * (eps + 2.0)))


def b_coefficient(epsilon: float, delta: float) -> float:
    """Window-slope coefficient (1+eps)*delta*sqrt(eps^2+2eps), cut at delta >= 2."""
    if not 0.0 <= delta < 2.0:
        return 0.0
    return (1.0 + epsilon) * delta * math.sqrt(epsilon * (epsilon + 2.0))


def c_coefficient(epsilon: float, delta: float) -> float:
    """Quadratic window coefficient -(1-delta^2)*(eps^2+2eps), cut at delta >= 2."""
    if not 0.0 <= delta < 2.0:
        return 0.0
    return -(1.0 - delta * delta) * epsilon * (epsilon + 2.0)


@dataclass(frozen=True)
class CoefficientSet:
    """Coefficient family entering every estimate and comparison sequence.

    a_prime and a_bound are numerically the same quantity eps^2 + 2*eps;
    they are kept as separate fields because they play two roles: a_prime
    is the exact coefficient of the closed-form solution, a_bound is the
    realized remainder form 2*eps + eps^2 used inside sequence bounds.
    """

    a_prime: float
    a_bound: float
    a_gamma: float
    b_delta: float
    c_delta: float
    eta: float
    xi: float
    theta_exponent: float


def coefficient_set(params: ModelParams, cfg: FlowConfig) -> CoefficientSet:
    eps = params.epsilon
    n = params.n_particles
    delta = cfg.resolved_delta(eps)
    theta_exp = cfg.theta_exponent
    a_gamma = 2.0 * eps + cfg.c_gamma * (eps / n**cfg.gamma + 1.0 / n + eps * eps)
    return CoefficientSet(
        a_prime=eps * eps + 2.0 * eps,
        a_bound=2.0 * eps + eps * eps,
        a_gamma=a_gamma,
        b_delta=b_coefficient(eps, delta),
        c_delta=c_coefficient(eps, delta),
        eta=1.0 - math.sqrt(eps),
        xi=eps**theta_exp,
        theta_exponent=theta_exp,
    )


@dataclass(frozen=True)
class AssumptionReport:
    """Pass/fail per regime condition.  Failures never abort computation;
    they tag downstream results as outside the proven regime.

    gamma_size_ok isolates the N-dependent part of the gamma condition
    (the epsilon^2 term is N-independent and already fails for moderate
    epsilon no matter how large N is); sweeps use it to pick N.
    """

    nu_ok: bool
    mu_ok: bool
    gamma_ok: bool
    gamma_size_ok: bool
    details: dict

    @property
    def all_ok(self) -> bool:
        return self.nu_ok and self.mu_ok and self.gamma_ok

    @property
    def solver_regime_ok(self) -> bool:
        """Conditions needed by the flow and the last elimination step."""
        return self.nu_ok and self.mu_ok


def check_assumptions(params: ModelParams, cfg: FlowConfig) -> AssumptionReport:
    """Evaluate the three regime conditions.

    (i)   1/N <= epsilon**nu
    (ii)  phi*N^mu / (delta0*N*(N - N^mu)) < 1/2  and  N^-mu <= eps^((1+theta)/2)
    (iii) eps^2 + eps/N^gamma + 1/N <= k_gamma*eps^1.5  and
          N^-(1-gamma) <= k_gamma*eps
    """
    eps, n, phi = params.epsilon, params.n_particles, params.phi
    details = {}

    lhs, rhs = 1.0 / n, eps**cfg.nu
    nu_ok = lhs <= rhs
    details["nu"] = (lhs, rhs, nu_ok)

    n_mu = n**cfg.mu
    gap_ok = n > n_mu and phi * n_mu / (params.delta0 * n * (n - n_mu)) < 0.5
    occ_ok = 1.0 / n_mu <= eps ** ((1.0 + cfg.theta) / 2.0)
    mu_ok = gap_ok and occ_ok
    details["mu_gap"] = (
        phi * n_mu / (params.delta0 * n * (n - n_mu)) if n > n_mu else math.inf,
        0.5,
        gap_ok,
    )
    details["mu_occupation"] = (1.0 / n_mu, eps ** ((1.0 + cfg.theta) / 2.0), occ_ok)

    g_lhs = eps * eps + eps / n**cfg.gamma + 1.0 / n
    g_rhs = cfg.k_gamma * eps * math.sqrt(eps)
    s_lhs = 1.0 / n ** (1.0 - cfg.gamma)
    s_rhs = cfg.k_gamma * eps
    gamma_ok = g_lhs <= g_rhs and s_lhs <= s_rhs
    # N-dependent part only: drop the eps^2 term from the first inequality
    gamma_size_ok = (eps / n**cfg.gamma + 1.0 / n <= g_rhs) and s_lhs <= s_rhs
    details["gamma_smallness"] = (g_lhs, g_rhs, g_lhs <= g_rhs)
    details["gamma_size"] = (s_lhs, s_rhs, s_lhs <= s_rhs)

    return AssumptionReport(
        nu_ok=nu_ok,
        mu_ok=mu_ok,
        gamma_ok=gamma_ok,
        gamma_size_ok=gamma_size_ok,
        details=details,
    )


@dataclass(frozen=True)
class SpectralWindow:
    """Admissible interval of the spectral parameter for the flow."""

    z_min: float
    z_max: float

    @property
    def width(self) -> float:
        return self.z_max - self.z_min


def spectral_window(
    params: ModelParams,
    cfg: FlowConfig,
    z_star_hint: Optional[float] = None,
) -> SpectralWindow:
    """Window [z_min, z_max] on which the flow is evaluated.

    z_max = E + (delta-1)*phi*sqrt(eps^2+2eps) with E the closed-form
    ground-energy approximation; a known root location tightens the top
    to min(hint + delta0/2, z_max).  z_min defaults to E - 10*phi, far
    enough below the spectrum that the fixed-point function is positive.
    """
    eps = params.epsilon
    e_bog = bogoliubov_energy(params)
    delta = cfg.resolved_delta(eps)
    z_max = e_bog + (delta - 1.0) * params.phi * math.sqrt(eps * (eps + 2.0))
    if z_star_hint is not None:
        z_max = min(z_star_hint + 0.5 * params.delta0, z_max)
    return SpectralWindow(z_min=e_bog - 10.0 * params.phi, z_max=z_max)
