import math

import numpy as np
import pytest

from bogoflow import (
    ModelParams,
    bogoliubov_energy,
    build_sector_hamiltonian,
    energy_error_diagnostic,
    gap_bound_check,
    lowest_eigenpair,
    solve_fixed_point,
)
from bogoflow.spectrum import GAP_COEF, UPPER_BOUND_COEF, _flow_side


def test_solve_n2_analytic():
    # 2x2 sector: ground energy eps - sqrt(eps^2 + 1/2) at phi = 1
    result = solve_fixed_point(ModelParams(n_particles=2, epsilon=0.01))
    assert result.z_star == pytest.approx(-0.6971774883294858, abs=1e-12)


def test_solve_matches_oracle_midsize():
    result = solve_fixed_point(
        ModelParams(n_particles=1024, epsilon=0.01), compare_oracle=True
    )
    assert result.oracle_delta <= 1e-10


def test_solve_requires_interaction():
    with pytest.raises(ValueError):
        solve_fixed_point(ModelParams(n_particles=4, epsilon=0.1, phi=0.0))


def test_root_inside_window_and_bracket():
    result = solve_fixed_point(ModelParams(n_particles=256, epsilon=0.05))
    lo, hi = result.bracket
    assert lo <= result.z_star <= hi
    assert abs(result.f_at_z_star) <= 1e-9


def test_upper_bound_on_regime_grid():
    for n, eps in ((1024, 0.01), (16384, 0.01), (128, 0.1), (4096, 0.5)):
        params = ModelParams(n_particles=n, epsilon=eps)
        result = solve_fixed_point(params)
        cap = bogoliubov_energy(params) + UPPER_BOUND_COEF * math.sqrt(
            eps
        ) * math.sqrt(eps * (eps + 2.0))
        assert result.z_star < cap
        assert result.upper_bound_check


def test_extended_bracket_outside_regime():
    # window top below the root: only reachable outside the regime
    result = solve_fixed_point(
        ModelParams(n_particles=2, epsilon=0.001), compare_oracle=True
    )
    assert result.extended_bracket
    assert result.oracle_delta <= 1e-10


def test_single_crossing_property():
    params = ModelParams(n_particles=128, epsilon=0.05)
    result = solve_fixed_point(params)
    rng = np.random.default_rng(3)
    zs = rng.uniform(result.window.z_min, result.z_star + 0.3, 100)
    for z in zs:
        if abs(z - result.z_star) < 1e-10:
            continue
        assert _flow_side(params, float(z)) == (1 if z < result.z_star else -1)


def test_zstar_decreasing_in_phi_at_fixed_kinetic():
    # attractive pairing: more interaction lowers the ground energy
    k2 = 0.01
    stars = []
    for phi in (0.5, 1.0, 2.0, 4.0):
        params = ModelParams(n_particles=128, epsilon=k2 / phi, phi=phi)
        stars.append(solve_fixed_point(params).z_star)
    assert all(a > b for a, b in zip(stars, stars[1:]))


def test_gap_bound_report():
    params = ModelParams(n_particles=128, epsilon=0.01, delta0=1.0)
    report = gap_bound_check(params)
    assert report.sector_ok and report.combined_ok
    assert report.gap_floor == pytest.approx(
        GAP_COEF * 0.1 * math.sqrt(0.01 * 2.01), rel=1e-12
    )
    # a huge delta0 leaves only the sector term in the combined floor
    big = gap_bound_check(ModelParams(n_particles=128, epsilon=0.01, delta0=1e12))
    assert big.combined_floor == big.gap_floor


def test_gap_n2_analytic():
    report = gap_bound_check(ModelParams(n_particles=2, epsilon=0.01))
    assert report.sector_gap == pytest.approx(2.0 * math.sqrt(0.5001), abs=1e-11)


def test_error_budget_trend():
    errs = []
    for n in (10**3, 10**4, 10**5):
        params = ModelParams(n_particles=n, epsilon=0.01)
        result = solve_fixed_point(params)
        errs.append(abs(result.z_star - bogoliubov_energy(params)))
    assert errs[0] > errs[1] > errs[2]


def test_error_budget_dominant_term():
    # once the geometric term has died off (large N at eps = 0.01,
    # beta = 2/3) the algebraic truncation term dominates the budget
    params = ModelParams(n_particles=10**6, epsilon=0.01)
    budget = energy_error_diagnostic(params)
    assert budget.term_truncation > budget.term_geometric
    assert budget.term_truncation > budget.term_inverse_n


def test_error_budget_in_regime():
    params = ModelParams(n_particles=10**6, epsilon=0.01)
    budget = energy_error_diagnostic(params)
    assert budget.regime_ok
    assert budget.in_budget


def test_error_budget_regime_violation_reported():
    budget = energy_error_diagnostic(ModelParams(n_particles=2, epsilon=0.01))
    assert not budget.regime_ok
    assert not budget.in_budget


def test_isospectrality_at_certified_point():
    # |z* - lambda0| at machine level whenever the flow is valid there
    for n, eps in ((16, 0.5), (512, 0.05)):
        params = ModelParams(n_particles=n, epsilon=eps)
        result = solve_fixed_point(params)
        lam0 = lowest_eigenpair(build_sector_hamiltonian(params)).value
        assert abs(result.z_star - lam0) <= 1e-10


def test_random_parameter_points_end_to_end():
    # seeded random (N, eps, phi, delta0) sweep off the standard grids:
    # flow root, oracle eigenvalue, and eigenvector must all agree
    from bogoflow import expand_ground_state

    rng = np.random.default_rng(2024)
    for _ in range(12):
        n = 2 * int(rng.integers(1, 700))
        eps = float(10.0 ** rng.uniform(-3, 0))
        phi = float(10.0 ** rng.uniform(-1, 1))
        delta0 = float(10.0 ** rng.uniform(-1, 1))
        params = ModelParams(n_particles=n, epsilon=eps, phi=phi, delta0=delta0)
        result = solve_fixed_point(params, compare_oracle=True)
        assert result.oracle_delta <= 1e-10 * max(1.0, phi), (n, eps, phi)
        vec = expand_ground_state(params, result.z_star, compare_oracle=True)
        assert vec.overlap_oracle >= 1.0 - 1e-9, (n, eps, phi)
