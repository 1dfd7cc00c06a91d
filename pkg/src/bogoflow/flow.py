"""Scalar shell-elimination flow for the three-modes Hamiltonian.

The flow walks the even levels i = 0, 2, ..., N-2, where level i holds
i condensate particles and (N-i)/2 particles in each pair mode.  Each
step eliminates one shell and produces the geometric-series factor

    G_i(z) = 1 / (1 - W_i(z) * G_{i-2}(z)),      G_0(z) = 1,

where W_i(z) is the scalar product of the downward and upward coupling
elements divided by the two shell resolvents:

    W_i(z) = (i-1)*i/N^2 * phi^2 * (m/2 + 1)^2
             / ([ (i*phi/N + k^2)*m - z ] * [ ((i-2)*phi/N + k^2)*(m+2) - z ])

with m = N - i the pair-mode occupation at level i.  The series sum is
valid while q = W*G stays in [0, 1); the table records the first level
where that fails instead of raising.

The one-dimensional remainder after the last elimination,

    f(z) = -z - (1 - 1/N) * phi^2 / (phi*(2*eps + 2 - 4/N) - z) * G_{N-2}(z),

is, identically in z, the Schur complement of the sector tridiagonal
matrix onto the condensate entry; its unique root in the window is the
ground-state energy.  The level <-> pair-index dictionary is pinned here
once: level i corresponds to pair count k = (N - i)/2, so W_i(z) equals
t_{k}^2 / ((d_k - z)(d_{k+1} - z)) in terms of the sector matrix
elements.  That identity is asserted by the equivalence tests, never
used in the computation.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .model import ModelParams

# Denominators of W below this multiple of phi*N indicate z outside the
# admissible window; positivity is only guaranteed inside it.
POLE_FLOOR = 1e-12


class FlowDomainError(ValueError):
    """z too close to a resolvent pole for the flow to be meaningful."""


@dataclass(frozen=True)
class FlowTable:
    """Flow factors at a fixed spectral parameter.

    g_values[j] is G at level start_level + 2j; w_products[j] the scalar
    coupling product entering that level (0.0 at the start level, which
    has none).  valid means every geometric-series condition held;
    otherwise invalid_level is the first offending level.
    """

    z: float
    start_level: int
    g_values: np.ndarray
    w_products: np.ndarray
    f_value: float
    valid: bool
    invalid_level: int

    @property
    def levels(self) -> np.ndarray:
        return self.start_level + 2 * np.arange(self.g_values.shape[0])

    def to_csv(self, path) -> None:
        lines = ["i,w_product,g_value"]
        for i, w, g in zip(self.levels, self.w_products, self.g_values):
            lines.append(f"{int(i)},{float(w)!r},{float(g)!r}")
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")


def _w_product_arrays(params: ModelParams, z: float, start_level: int):
    """Coupling products for levels start_level..N-2; index 0 is 0.0."""
    n = params.n_particles
    phi, k2 = params.phi, params.kinetic
    count = (n - start_level) // 2
    i = start_level + 2.0 * np.arange(count)
    m = n - i
    num = (i - 1.0) * i / (float(n) * float(n)) * phi * phi * (0.5 * m + 1.0) ** 2
    den1 = (i * phi / n + k2) * m - z
    den2 = ((i - 2.0) * phi / n + k2) * (m + 2.0) - z
    w = np.zeros(count)
    if count > 1:
        floor = POLE_FLOOR * max(phi, k2, 1e-300) * n
        if np.min(np.abs(den1[1:])) <= floor or np.min(np.abs(den2[1:])) <= floor:
            raise FlowDomainError(
                f"resolvent denominator below pole floor at z={z!r}"
            )
        w[1:] = num[1:] / (den1[1:] * den2[1:])
    return w


def w_product(params: ModelParams, i: int, z: float) -> float:
    """Scalar coupling product at a single even level i, 2 <= i <= N-2."""
    n = params.n_particles
    if i % 2 != 0 or not 2 <= i <= n - 2:
        raise ValueError("level must be even with 2 <= i <= N-2")
    w = _w_product_arrays(params, z, i - 2)
    return float(w[1])


def g_check(params: ModelParams, z: float, start_level: int = 0) -> FlowTable:
    """Run the flow upward from start_level (value 1 there) to level N-2."""
    n = params.n_particles
    if start_level % 2 != 0 or not 0 <= start_level <= n - 2:
        raise ValueError("start_level must be even with 0 <= start_level <= N-2")
    w = _w_product_arrays(params, z, start_level)
    g = np.empty_like(w)
    g[0] = 1.0
    first_bad = int(_kernels.flow_recursion(w, g))
    valid = first_bad < 0
    f_value = _f_from_g(params, z, float(g[-1]))
    return FlowTable(
        z=float(z),
        start_level=start_level,
        g_values=g,
        w_products=w,
        f_value=f_value,
        valid=valid,
        invalid_level=-1 if valid else start_level + 2 * first_bad,
    )


def _f_from_g(params: ModelParams, z: float, g_last: float) -> float:
    n, phi, eps = params.n_particles, params.phi, params.epsilon
    den = phi * (2.0 * eps + 2.0 - 4.0 / n) - z
    if den == 0.0:
        raise FlowDomainError("final resolvent pole at this z")
    return -z - (1.0 - 1.0 / n) * phi * phi / den * g_last


def f_of_z(params: ModelParams, z: float) -> float:
    """Fixed-point function; requires the flow to be valid at z."""
    table = g_check(params, z)
    if not table.valid:
        raise FlowDomainError(
            f"geometric-series condition failed at level {table.invalid_level}"
        )
    return table.f_value


def g_truncated(params: ModelParams, z: float, beta: float) -> float:
    """Level-(N-2) flow value restarted from level N - floor(N^(1-beta)).

    The restart level is rounded down to even and the restart value is 1;
    with beta -> 0 the restart level is 0 and the full flow is recovered.
    """
    n = params.n_particles
    if not 0.0 < beta < 1.0:
        raise ValueError("beta must lie in (0, 1)")
    span = int(n ** (1.0 - beta) + 1e-9)  # nudge floor against pow slop
    if span < 4:
        raise ValueError("N^(1-beta) must be at least 4")
    span -= span % 2
    start = max(n - span, 0)
    table = g_check(params, z, start_level=start)
    return float(table.g_values[-1])


@dataclass(frozen=True)
class YStarSequence:
    """Downward comparison sequence matched to the truncated flow.

    values[j] is the entry at pair index two_l[j]; two_l descends from
    floor(N^(1-beta))+2 to 2.  positive is False past the first
    nonpositive entry (a regime violation, reported not raised).
    """

    two_l: np.ndarray
    values: np.ndarray
    positive: bool
    first_nonpositive: int


def y_star_sequence(params: ModelParams, beta: float) -> YStarSequence:
    """Recursion Y_{2l-2} = 1 - 1/(4*(1 + a' - 2b/(2l) - (1-c)/(4l^2))*Y_{2l})
    started at 1, with a' = eps^2 + 2eps and b, c evaluated at delta = 1.
    """
    n, eps = params.n_particles, params.epsilon
    if not 0.0 < beta < 1.0:
        raise ValueError("beta must lie in (0, 1)")
    span = int(n ** (1.0 - beta) + 1e-9)  # nudge floor against pow slop
    if span < 4:
        raise ValueError("N^(1-beta) must be at least 4")
    span -= span % 2

    a_prime = eps * eps + 2.0 * eps
    b1 = (1.0 + eps) * math.sqrt(a_prime)
    # c at delta = 1 vanishes identically
    two_l = np.arange(span + 2, 0, -2, dtype=np.float64)  # span+2 down to 2
    # step j (from two_l[j-1] to two_l[j]) uses the upper index two_l[j-1]
    upper = two_l[:-1]
    dfac = np.empty_like(two_l)
    dfac[0] = 1.0
    dfac[1:] = 1.0 + a_prime - 2.0 * b1 / upper - 1.0 / (upper * upper)
    y = np.empty_like(two_l)
    y[0] = 1.0
    first_bad = int(_kernels.rational_chain(dfac, y))
    return YStarSequence(
        two_l=two_l.astype(np.int64),
        values=y,
        positive=first_bad < 0,
        first_nonpositive=first_bad,
    )
