"""Property suites: every analytic identity, bound, and equivalence the
package claims, runnable as one machine-readable report.

Each check returns a PropertyResult with the measured margin (positive
means the property holds with room to spare).  run_all drives the whole
battery on a default grid; the CLI verify mode and the acceptance tests
call the same functions with their own grids.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from . import flow, groundstate, oracle, sequences, spectrum
from .model import (
    FlowConfig,
    ModelParams,
    b_coefficient,
    bogoliubov_energy,
    c_coefficient,
    check_assumptions,
)

DEFAULT_GRID_N = (2, 4, 16, 128, 1024)
DEFAULT_GRID_EPS = (0.5, 0.1, 0.01)


@dataclass
class PropertyResult:
    name: str
    passed: bool
    margin: float  # smallest slack observed; negative quantifies a failure
    details: str = ""

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "margin": float(self.margin),
            "details": self.details,
        }


def _subspectral_grid(lam0: float, phi: float, count: int) -> np.ndarray:
    """count points strictly below lam0, offsets log-spaced in [0.01, 3]*phi."""
    offsets = np.geomspace(0.01, 3.0, count) * phi
    return lam0 - offsets


def check_cf_equivalence(
    n_values: Sequence[int] = DEFAULT_GRID_N,
    eps_values: Sequence[float] = DEFAULT_GRID_EPS,
    phi: float = 1.0,
    n_z: int = 20,
    rel_tol: float = 1e-12,
    perturb_tk: float = 0.0,
) -> PropertyResult:
    """Flow fixed-point function against the directly evaluated matrix
    Schur complement, at sub-spectral z.  perturb_tk != 0 multiplies one
    coupling of the matrix side by (1 + perturb_tk) as a negative control.
    """
    worst = 0.0
    where = ""
    for n in n_values:
        for eps in eps_values:
            params = ModelParams(n_particles=n, epsilon=eps, phi=phi)
            tri = oracle.build_sector_hamiltonian(params)
            if perturb_tk:
                # perturb a shallow coupling: deep ones are geometrically
                # suppressed in the folded function and would go unseen
                off = tri.offdiag.copy()
                off[min(1, len(off) - 1)] *= 1.0 + perturb_tk
                tri = oracle.TridiagonalHamiltonian(diag=tri.diag, offdiag=off)
            lam0 = oracle.lowest_eigenpair(tri).value
            for z in _subspectral_grid(lam0, phi, n_z):
                f_flow = flow.f_of_z(params, z)
                f_direct = oracle.schur_complement(tri, z)
                rel = abs(f_flow - f_direct) / abs(f_direct)
                if rel > worst:
                    worst, where = rel, f"n={n} eps={eps} z={z:.6g}"
    return PropertyResult(
        name="cf_equivalence",
        passed=worst <= rel_tol,
        margin=rel_tol - worst,
        details=f"worst rel diff {worst:.3e} at {where}; tol {rel_tol:g}",
    )


def check_flow_monotonicity(
    params: ModelParams,
    n_z: int = 8,
    level_tol: float = 1e-12,
) -> PropertyResult:
    """G nondecreasing in z at every level, and f slope <= -1."""
    cfg = FlowConfig()
    lam0 = oracle.lowest_eigenpair(oracle.build_sector_hamiltonian(params)).value
    zs = _subspectral_grid(lam0, params.phi, n_z)
    zs.sort()
    worst = math.inf
    f_slope_worst = -math.inf
    prev_table = None
    for z in zs:
        table = flow.g_check(params, z)
        if prev_table is not None:
            dg = table.g_values - prev_table.g_values
            worst = min(worst, float(dg.min()))
            slope = (table.f_value - prev_table.f_value) / (z - prev_table.z)
            f_slope_worst = max(f_slope_worst, slope)
        prev_table = table
    ok = worst >= -level_tol and f_slope_worst <= -1.0 + 1e-9
    return PropertyResult(
        name="flow_monotonicity",
        passed=ok,
        margin=min(worst + level_tol, -1.0 - f_slope_worst + 1e-9),
        details=f"min level increment {worst:.3e}, max f slope {f_slope_worst:.6f}",
    )


def check_w_bound(
    params: ModelParams, deltas: Optional[Sequence[float]] = None
) -> PropertyResult:
    """Each coupling product at the window edge for slope delta stays below
    1/(4*(1 + a - 2 b_delta/(N-i+1) - (1-c_delta)/(N-i+1)^2))."""
    eps, phi, n = params.epsilon, params.phi, params.n_particles
    if deltas is None:
        root = math.sqrt(eps)
        deltas = (1.0, 1.0 + 0.5 * root, 1.0 + root)
    e_bog = bogoliubov_energy(params)
    s = math.sqrt(eps * (eps + 2.0))
    a = 2.0 * eps + eps * eps
    worst = math.inf
    for delta in deltas:
        z = e_bog + (delta - 1.0) * phi * s
        b = b_coefficient(eps, delta)
        c = c_coefficient(eps, delta)
        table = flow.g_check(params, z)
        levels = table.levels[1:]
        w = table.w_products[1:]  # dimensionless: phi^2 over (energy)^2
        m = n - levels + 1.0
        cap = 1.0 / (4.0 * (1.0 + a - 2.0 * b / m - (1.0 - c) / (m * m)))
        slack = cap - w
        tol = sequences.BOUND_SLACK * (1.0 + np.abs(w))
        worst = min(worst, float((slack + tol).min()))
    return PropertyResult(
        name="w_bound",
        passed=worst >= 0.0,
        margin=worst,
        details=f"min slack {worst:.3e} over deltas {tuple(deltas)}",
    )


def check_g_lower_bound_link(
    params: ModelParams, cfg: Optional[FlowConfig] = None
) -> PropertyResult:
    """Flow factors dominate the reciprocal minorant chain on the tail:
    G_i >= 1/xtilde_i for levels from N - N^(1-gamma) on, at the window
    edge for the configured delta."""
    cfg = cfg or FlowConfig()
    eps, phi = params.epsilon, params.phi
    delta = cfg.resolved_delta(eps)
    z = bogoliubov_energy(params) + (delta - 1.0) * phi * math.sqrt(eps * (eps + 2.0))
    table = flow.g_check(params, z)
    seq = sequences.xtilde_sequence(params, cfg)
    g_on_levels = table.g_values[seq.levels // 2]
    with np.errstate(divide="ignore"):
        recip = 1.0 / seq.values
    ok_mask = seq.values > 0.0
    slack = g_on_levels[ok_mask] - recip[ok_mask]
    tol = sequences.BOUND_SLACK * (1.0 + np.abs(recip[ok_mask]))
    worst = float((slack + tol).min())
    return PropertyResult(
        name="g_lower_bound_link",
        passed=bool(np.all(ok_mask)) and worst >= 0.0 and table.valid,
        margin=worst,
        details=f"min G - 1/xtilde = {worst:.3e} on {int(ok_mask.sum())} levels",
    )


def check_x_bounds(params: ModelParams, cfg: Optional[FlowConfig] = None) -> PropertyResult:
    seq = sequences.x_sequence(params, cfg)
    margin = seq.margin
    tol = sequences.BOUND_SLACK * (1.0 + np.abs(seq.values))
    worst = float((margin + tol).min())
    return PropertyResult(
        name="x_lower_bound",
        passed=seq.holds() and seq.first_nonpositive < 0,
        margin=worst,
        details=f"min margin {float(margin.min()):.3e} over {seq.values.size} entries",
    )


def check_xtilde_bounds(
    params: ModelParams, cfg: Optional[FlowConfig] = None
) -> PropertyResult:
    seq = sequences.xtilde_sequence(params, cfg)
    finite = np.isfinite(seq.bound)
    margin = seq.margin[finite]
    tol = sequences.BOUND_SLACK * (1.0 + np.abs(seq.values[finite]))
    worst = float((margin + tol).min()) if margin.size else math.inf
    return PropertyResult(
        name="xtilde_upper_bound",
        passed=seq.holds() and seq.first_nonpositive < 0,
        margin=worst,
        details=f"min tail margin {float(margin.min()):.3e} on {margin.size} entries",
    )


def check_y_closed_residual(
    eps_values: Optional[np.ndarray] = None,
    l_values: Optional[np.ndarray] = None,
    rel_tol: float = 1e-12,
) -> PropertyResult:
    if eps_values is None:
        eps_values = np.geomspace(1e-6, 0.5, 13)
    if l_values is None:
        l_values = np.unique(np.geomspace(2, 1e6, 25).astype(np.int64)).astype(float)
    worst = 0.0
    for eps in eps_values:
        res = sequences.y_closed_recursion_residual(l_values, float(eps))
        worst = max(worst, float(np.max(res)))
    return PropertyResult(
        name="y_closed_residual",
        passed=worst <= rel_tol,
        margin=rel_tol - worst,
        details=f"max recursion residual {worst:.3e}; tol {rel_tol:g}",
    )


def check_accessori(
    eps_values: Sequence[float] = (0.0, 0.01, 0.1),
    delta_values: Sequence[float] = (0.0, 1.0, 1.3, 1.99),
    m_values: Optional[np.ndarray] = None,
    rel_tol: float = 1e-13,
) -> PropertyResult:
    if m_values is None:
        m_values = np.unique(np.geomspace(3, 1e6, 40).astype(np.int64))
    worst = 0.0
    for eps in eps_values:
        for delta in delta_values:
            worst = max(
                worst, sequences.accessori_identity_check(float(eps), float(delta), m_values)
            )
    return PropertyResult(
        name="accessori_identity",
        passed=worst <= rel_tol,
        margin=rel_tol - worst,
        details=f"max relative residual {worst:.3e}; tol {rel_tol:g}",
    )


def check_coefficient_identities(
    eps_values: Optional[np.ndarray] = None,
) -> PropertyResult:
    """(1 + eps)^2 = 1 + a' and sqrt(1 + a') = 1 + eps, at rounding level;
    the rational fixed point solves its equation to 1 ulp."""
    if eps_values is None:
        eps_values = np.geomspace(1e-8, 1.0, 30)
    worst = 0.0
    for eps in eps_values:
        a = eps * eps + 2.0 * eps
        worst = max(worst, abs((1.0 + a) - (1.0 + eps) ** 2) / (1.0 + a))
        worst = max(worst, abs(math.sqrt(1.0 + a) - (1.0 + eps)) / (1.0 + eps))
        y = sequences.rational_fixed_point(a)
        worst = max(worst, abs(y - (1.0 - 1.0 / (4.0 * (1.0 + a) * y))))
    tol = 1e-15
    return PropertyResult(
        name="coefficient_identities",
        passed=worst <= tol,
        margin=tol - worst,
        details=f"max identity residual {worst:.3e}",
    )


def check_flow_oracle(
    n_values: Sequence[int] = DEFAULT_GRID_N,
    eps_values: Sequence[float] = DEFAULT_GRID_EPS,
    phi: float = 1.0,
    abs_tol: float = 1e-10,
) -> PropertyResult:
    worst = 0.0
    where = ""
    for n in n_values:
        for eps in eps_values:
            params = ModelParams(n_particles=n, epsilon=eps, phi=phi)
            result = spectrum.solve_fixed_point(params, compare_oracle=True)
            if result.oracle_delta > worst:
                worst, where = result.oracle_delta, f"n={n} eps={eps}"
    return PropertyResult(
        name="flow_oracle_equivalence",
        passed=worst <= abs_tol,
        margin=abs_tol - worst,
        details=f"worst |z* - lambda0| = {worst:.3e} at {where}; tol {abs_tol:g}",
    )


def check_zstar_upper_bound(
    n_values: Sequence[int] = DEFAULT_GRID_N,
    eps_values: Sequence[float] = DEFAULT_GRID_EPS,
    phi: float = 1.0,
) -> PropertyResult:
    """Root below its analytic cap at every point passing the 1/N <= eps^nu
    regime gate; points failing the gate are reported but not judged."""
    cfg = FlowConfig()
    violations = []
    tested = 0
    worst = math.inf
    for n in n_values:
        for eps in eps_values:
            params = ModelParams(n_particles=n, epsilon=eps, phi=phi)
            if not check_assumptions(params, cfg).nu_ok:
                continue
            tested += 1
            result = spectrum.solve_fixed_point(params, cfg)
            cap = bogoliubov_energy(params) + spectrum.UPPER_BOUND_COEF * math.sqrt(
                eps
            ) * phi * math.sqrt(eps * (eps + 2.0))
            worst = min(worst, cap - result.z_star)
            if not result.upper_bound_check:
                violations.append((n, eps))
    return PropertyResult(
        name="zstar_upper_bound",
        passed=not violations,
        margin=worst if tested else math.inf,
        details=f"{tested} regime points, {len(violations)} violations; min cap margin {worst:.3e}",
    )


def check_gap_bound(
    n_values: Sequence[int] = DEFAULT_GRID_N,
    eps_values: Sequence[float] = DEFAULT_GRID_EPS,
    phi: float = 1.0,
) -> PropertyResult:
    cfg = FlowConfig()
    violations = []
    tested = 0
    worst = math.inf
    for n in n_values:
        for eps in eps_values:
            params = ModelParams(n_particles=n, epsilon=eps, phi=phi)
            if not check_assumptions(params, cfg).nu_ok:
                continue
            tested += 1
            report = spectrum.gap_bound_check(params, cfg)
            worst = min(worst, report.sector_gap - report.gap_floor)
            if not report.sector_ok:
                violations.append((n, eps))
    return PropertyResult(
        name="sector_gap_bound",
        passed=not violations,
        margin=worst if tested else math.inf,
        details=f"{tested} regime points, {len(violations)} violations; min gap margin {worst:.3e}",
    )


def check_overlap(
    n_values: Sequence[int] = DEFAULT_GRID_N,
    eps_values: Sequence[float] = DEFAULT_GRID_EPS,
    phi: float = 1.0,
    overlap_tol: float = 1e-9,
    residual_factor: float = 1e-8,
) -> PropertyResult:
    worst_overlap = 1.0
    worst_residual = 0.0
    for n in n_values:
        for eps in eps_values:
            params = ModelParams(n_particles=n, epsilon=eps, phi=phi)
            result = spectrum.solve_fixed_point(params)
            vec = groundstate.expand_ground_state(
                params, result.z_star, compare_oracle=True
            )
            tri = oracle.build_sector_hamiltonian(params)
            res = groundstate.eigen_residual(tri, vec.coeffs, result.z_star)
            worst_overlap = min(worst_overlap, vec.overlap_oracle)
            worst_residual = max(worst_residual, res / tri.norm_inf())
    ok = worst_overlap >= 1.0 - overlap_tol and worst_residual <= residual_factor
    return PropertyResult(
        name="ground_state_overlap",
        passed=ok,
        margin=min(worst_overlap - (1.0 - overlap_tol), residual_factor - worst_residual),
        details=(
            f"min overlap {worst_overlap:.12f}, "
            f"max residual/norm_inf {worst_residual:.3e}"
        ),
    )


def check_ebog_convergence(
    eps: float = 0.01,
    n_values: Sequence[int] = (10**3, 10**4, 10**5, 10**6),
    slope_range=(-1.5, -0.4),
) -> PropertyResult:
    errs = []
    for n in n_values:
        params = ModelParams(n_particles=n, epsilon=eps)
        result = spectrum.solve_fixed_point(params)
        errs.append(abs(result.z_star - bogoliubov_energy(params)))
    errs = np.array(errs)
    decreasing = bool(np.all(np.diff(errs) < 0.0))
    slope = float(np.polyfit(np.log(np.array(n_values, float)), np.log(errs), 1)[0])
    ok = decreasing and slope_range[0] <= slope <= slope_range[1]
    return PropertyResult(
        name="ebog_convergence",
        passed=ok,
        margin=min(slope - slope_range[0], slope_range[1] - slope),
        details=f"errors {['%.3e' % e for e in errs]}, log-log slope {slope:.3f}",
    )


def check_truncation_decay(
    eps_values: Sequence[float] = (0.04, 0.01),
    beta_values: Sequence[float] = (0.3, 0.5, 0.7),
    n_cap: int = 10**5,
    r2_floor: float = 0.95,
) -> PropertyResult:
    """Per (eps, beta): fit log|G - G_T| against N^(1-beta) over an N grid
    chosen so the difference stays above the rounding floor."""
    worst_r2 = 1.0
    worst_slope = -math.inf
    details = []
    for eps in eps_values:
        for beta in beta_values:
            # spans ~[8, 60] keep the decay measurable in float64
            spans = np.unique((np.geomspace(8, 60, 7) // 2 * 2).astype(np.int64))
            xs, diffs = [], []
            for span in spans:
                n = int(round(span ** (1.0 / (1.0 - beta))))
                n += n % 2
                if n < span + 4:
                    n = span + 4 + (span % 2)
                if n > n_cap:
                    continue
                params = ModelParams(n_particles=n, epsilon=eps)
                z = bogoliubov_energy(params)
                full = flow.g_check(params, z).g_values[-1]
                trunc = flow.g_truncated(params, z, beta)
                xs.append(int(n ** (1.0 - beta)))
                diffs.append(abs(full - trunc))
            report = groundstate.fit_truncation_decay(np.array(xs), np.array(diffs))
            worst_r2 = min(worst_r2, report.r_squared)
            worst_slope = max(worst_slope, report.slope)
            details.append(
                f"eps={eps} beta={beta}: slope={report.slope:.4f} R2={report.r_squared:.4f}"
            )
    ok = worst_slope < 0.0 and worst_r2 >= r2_floor
    return PropertyResult(
        name="truncation_decay",
        passed=ok,
        margin=min(-worst_slope, worst_r2 - r2_floor),
        details="; ".join(details),
    )


def check_fixed_point_uniqueness(
    params: ModelParams, n_probe: int = 100, seed: int = 7
) -> PropertyResult:
    """sign(f(z)) == sign(z* - z) at random window points below the root
    region: a single crossing."""
    result = spectrum.solve_fixed_point(params)
    rng = np.random.default_rng(seed)
    lo = result.window.z_min
    hi = min(result.window.z_max, result.z_star + 0.49 * params.delta0)
    bad = 0
    for z in rng.uniform(lo, hi, n_probe):
        side = spectrum._flow_side(params, float(z))
        expect = 1 if z < result.z_star else -1
        if abs(z - result.z_star) < 10 * FlowConfig().tol_root * params.phi:
            continue
        if side != expect:
            bad += 1
    return PropertyResult(
        name="fixed_point_uniqueness",
        passed=bad == 0,
        margin=float(-bad),
        details=f"{bad} sign mismatches out of {n_probe} probes",
    )


@dataclass
class VerifyConfig:
    n_values: Sequence[int] = DEFAULT_GRID_N
    eps_values: Sequence[float] = DEFAULT_GRID_EPS
    phi: float = 1.0
    only: Optional[str] = None
    perturb_tk: float = 0.0
    sequence_points: List[ModelParams] = field(default_factory=list)


def run_all(config: Optional[VerifyConfig] = None) -> List[PropertyResult]:
    config = config or VerifyConfig()
    # N = 10^7 satisfies every N-dependent part of the gamma condition at
    # the documented constants for both default epsilon values
    seq_points = config.sequence_points or [
        ModelParams(n_particles=10**7, epsilon=0.04),
        ModelParams(n_particles=10**7, epsilon=0.01),
    ]
    mono_point = ModelParams(n_particles=256, epsilon=0.01, phi=config.phi)

    suites = {
        "cf": lambda: [
            check_cf_equivalence(
                config.n_values,
                config.eps_values,
                config.phi,
                perturb_tk=config.perturb_tk,
            )
        ],
        "flow": lambda: [
            check_flow_monotonicity(mono_point),
            check_w_bound(ModelParams(n_particles=1024, epsilon=0.01, phi=config.phi)),
            check_g_lower_bound_link(seq_points[0]),
            check_fixed_point_uniqueness(mono_point),
        ],
        "sequences": lambda: [
            *(check_x_bounds(p) for p in seq_points),
            *(check_xtilde_bounds(p) for p in seq_points),
            check_y_closed_residual(),
            check_accessori(),
            check_coefficient_identities(),
        ],
        "spectrum": lambda: [
            check_flow_oracle(config.n_values, config.eps_values, config.phi),
            check_zstar_upper_bound(config.n_values, config.eps_values, config.phi),
            check_gap_bound(config.n_values, config.eps_values, config.phi),
            check_ebog_convergence(n_values=(10**3, 10**4, 10**5)),
        ],
        "groundstate": lambda: [
            check_overlap(config.n_values, config.eps_values, config.phi),
            check_truncation_decay(),
        ],
    }
    results: List[PropertyResult] = []
    for name, runner in suites.items():
        if config.only and not name.startswith(config.only):
            continue
        results.extend(runner())
    return results
