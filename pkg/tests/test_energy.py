
import numpy as np
import pytest

from thermobeam.energy import (
    EnergySeries,
    LyapunovConfig,
    beta0,
    check_monotone,
    continuous_energy,
    decay_plateau,
    discrete_energy,
    fit_decay_rate,
    lyapunov,
    series_for,
)
from thermobeam.errors import DegenerateSeries, MissingPrev, UnsupportedVariant
from thermobeam.fem import assemble_matrices, build_mesh
from thermobeam.model import Variant
from thermobeam.stepper import BeamState

from conftest import canonical_params, mild_params
from oracles import energy_by_quadrature, lyapunov_by_quadrature

DT = 0.03125


def zero_state(m):
    return BeamState(0.0, *(np.zeros(m) for _ in range(7)))


def random_state(mesh, rng):
    return BeamState(0.0, *(rng.standard_normal(mesh.interior_dim) for _ in range(7)))


def synthetic_series(values, dt=0.01):
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    t = dt * np.arange(n)
    zeros = np.zeros(n)
    return EnergySeries(dt=dt, t=t, energy=values, diss_theta=zeros,
                        diss_p=zeros, diss_damp=zeros)


def test_discrete_energy_zero_state():
    fem = assemble_matrices(build_mesh(1.0, 4))
    assert discrete_energy(zero_state(3), canonical_params(), fem, DT) == 0.0


def test_discrete_energy_single_node_shear_term():
    # s = 2: only phi = [1] set, so E = kappa/2 * phi^T K phi = 365/2 * 4
    fem = assemble_matrices(build_mesh(1.0, 2))
    state = zero_state(1)
    state.phi = np.array([1.0])
    assert discrete_energy(state, canonical_params(), fem, DT) == pytest.approx(730.0)


def test_discrete_energy_matches_quadrature_oracle(rng):
    mesh = build_mesh(1.0, 4)
    fem = assemble_matrices(mesh)
    for params in (canonical_params(), mild_params()):
        for _ in range(5):
            state = random_state(mesh, rng)
            ours = discrete_energy(state, params, fem, DT)
            oracle = energy_by_quadrature(state, params, mesh, DT)
            assert ours == pytest.approx(oracle, rel=1e-12, abs=1e-12)


def test_discrete_energy_requires_backward_difference_seed():
    fem = assemble_matrices(build_mesh(1.0, 4))
    state = zero_state(3)
    state.phi_t_prev = None
    with pytest.raises(MissingPrev):
        discrete_energy(state, canonical_params(), fem, DT)


def test_discrete_energy_nonnegative_for_validated_params(rng):
    mesh = build_mesh(1.0, 4)
    fem = assemble_matrices(mesh)
    params = canonical_params()
    for _ in range(10_000):
        state = random_state(mesh, rng)
        assert discrete_energy(state, params, fem, DT) >= 0.0


def test_continuous_energy_equals_discrete(rng):
    mesh = build_mesh(1.0, 6)
    fem = assemble_matrices(mesh)
    for params in (canonical_params(), mild_params()):
        for _ in range(20):
            state = random_state(mesh, rng)
            e_d = discrete_energy(state, params, fem, DT)
            e_c = continuous_energy(state, params, fem, DT)
            assert abs(e_c - e_d) <= 1e-12 * max(e_d, 1.0)


def test_energy_theta_p_block_single_node():
    # c = 1, r = 4e-4, d = 0.002 on s = 2: contribution (c + r + 2d)/6
    params = canonical_params()
    fem = assemble_matrices(build_mesh(1.0, 2))
    state = zero_state(1)
    state.theta = np.array([1.0])
    state.p = np.array([1.0])
    expected = 0.5 * (params.c_cap / 3.0 + params.r_cap / 3.0 + 2.0 * params.d_cap / 3.0)
    assert discrete_energy(state, params, fem, DT) == pytest.approx(expected, rel=1e-14)


def test_check_monotone_constant_series_passes():
    report = check_monotone(synthetic_series(np.full(50, 2.5)))
    assert report.passed
    assert report.max_rate == 0.0


def test_check_monotone_flags_increase():
    values = np.linspace(1.0, 0.5, 40)
    values[17] = values[16] + 1e-3
    report = check_monotone(synthetic_series(values))
    assert not report.passed
    assert report.worst_step == 17


def test_fit_decay_rate_exact_exponential():
    t = 0.01 * np.arange(200)
    series = synthetic_series(3.0 * np.exp(-2.0 * t), dt=0.01)
    fit = fit_decay_rate(series)
    assert fit.rate == pytest.approx(2.0, abs=1e-8)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
    assert fit.tail_average > 0.0


def test_fit_decay_rate_constant_series():
    fit = fit_decay_rate(synthetic_series(np.full(100, 4.0)))
    assert fit.rate == pytest.approx(0.0, abs=1e-12)
    assert fit.r_squared == 1.0


def test_fit_decay_rate_rejects_nonpositive_window():
    values = 3.0 * np.exp(-2.0 * 0.01 * np.arange(100))
    values[-3] = 0.0
    with pytest.raises(DegenerateSeries):
        fit_decay_rate(synthetic_series(values))


def test_fit_window_widens_to_minimum_samples():
    t = 0.01 * np.arange(30)
    series = synthetic_series(np.exp(-t), dt=0.01)
    fit = fit_decay_rate(series)
    assert fit.window_start == 10  # 30 samples, min window 20


def test_decay_plateau_flat_for_pure_exponential():
    t = 0.01 * np.arange(400)
    series = synthetic_series(np.exp(-3.0 * t), dt=0.01)
    plat = decay_plateau(series)
    assert plat.final_value == pytest.approx(3.0)
    assert plat.relative_slope < 1e-10


def test_lyapunov_zero_state_is_zero():
    fem = assemble_matrices(build_mesh(1.0, 4))
    cfg = LyapunovConfig()
    value = lyapunov(zero_state(3), canonical_params(), fem, cfg, DT)
    assert value == 0.0


def test_lyapunov_rejects_undamped():
    fem = assemble_matrices(build_mesh(1.0, 4))
    with pytest.raises(UnsupportedVariant):
        lyapunov(zero_state(3), canonical_params(variant=Variant.UNDAMPED),
                 fem, LyapunovConfig(), DT)


def test_lyapunov_reduces_when_velocity_vanishes(rng):
    # with phi_t = 0 all velocity-bearing terms drop: L = N E + mu psi^T M psi
    params = canonical_params(variant=Variant.ROTATION_DAMPED)
    mesh = build_mesh(1.0, 6)
    fem = assemble_matrices(mesh)
    cfg = LyapunovConfig(n_weight=100.0, n1_weight=2.0)
    state = random_state(mesh, rng)
    state.phi_t = np.zeros(state.m)
    expected = (cfg.n_weight * discrete_energy(state, params, fem, DT)
                + params.mu * float(state.psi @ fem.mass @ state.psi))
    assert lyapunov(state, params, fem, cfg, DT) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("variant", [Variant.ROTATION_DAMPED, Variant.DISPLACEMENT_DAMPED])
def test_lyapunov_matches_quadrature_oracle(variant, rng):
    params = mild_params(variant=variant, mu=0.7)
    mesh = build_mesh(1.0, 4)
    fem = assemble_matrices(mesh)
    cfg = LyapunovConfig(n_weight=50.0, n1_weight=3.0)
    for _ in range(5):
        state = random_state(mesh, rng)
        ours = lyapunov(state, params, fem, cfg, DT)
        oracle = lyapunov_by_quadrature(state, params, mesh, cfg, DT)
        assert ours == pytest.approx(oracle, rel=1e-12, abs=1e-12)


def test_beta0_unit_coefficients():
    from dataclasses import replace

    params = replace(canonical_params(), kappa=1.0, mu=1.0)
    assert beta0(params, LyapunovConfig(n1_weight=1.0)) == 2.0


def test_beta0_dominated_by_weighted_density():
    from dataclasses import replace

    params = replace(mild_params(variant=Variant.ROTATION_DAMPED, mu=0.01),
                     rho1=2.0, rho2=0.01, alpha=0.01, kappa=10.0)
    assert beta0(params, LyapunovConfig(n1_weight=10.0)) == 20.0


def test_beta0_canonical_coefficients():
    params = canonical_params()
    value = beta0(params, LyapunovConfig(n1_weight=1.0))
    assert value == max(1.0, 2.0, 2.0, 1.0 + 1.0 / 365.0)
    assert value == 2.0


def test_lyapunov_config_rejects_nonpositive_weights():
    with pytest.raises(ValueError):
        LyapunovConfig(n_weight=0.0)
    with pytest.raises(ValueError):
        LyapunovConfig(n1_weight=-1.0)


def test_series_for_records_channels(rng):
    params = canonical_params()
    mesh = build_mesh(1.0, 4)
    fem = assemble_matrices(mesh)
    states = [random_state(mesh, rng) for _ in range(3)]
    for i, st in enumerate(states):
        st.t = i * DT
    series = series_for(states, params, fem, DT, lyapunov_cfg=LyapunovConfig())
    assert len(series) == 3
    rec = series.record(1)
    assert rec.t == pytest.approx(DT)
    assert rec.diss_theta >= 0.0 and rec.diss_p >= 0.0 and rec.diss_damp >= 0.0
    assert rec.lyapunov is not None
    assert rec.diss_theta == pytest.approx(
        params.k_theta * float(states[1].theta @ fem.stiffness @ states[1].theta))


def test_series_for_skips_lyapunov_when_undamped(rng):
    params = canonical_params(variant=Variant.UNDAMPED)
    mesh = build_mesh(1.0, 4)
    fem = assemble_matrices(mesh)
    series = series_for([random_state(mesh, rng)], params, fem, DT,
                        lyapunov_cfg=LyapunovConfig())
    assert series.lyapunov is None


@pytest.mark.parametrize("variant", [Variant.UNDAMPED, Variant.ROTATION_DAMPED,
                                     Variant.DISPLACEMENT_DAMPED])
@pytest.mark.parametrize("maker", ["canonical", "mild"])
def test_energy_drop_covers_recorded_dissipation(variant, maker):
    # per step the energy must fall by at least dt times the recorded
    # dissipation channels; the implicit scheme only adds further decay
    from thermobeam.fem import build_mesh
    from thermobeam.model import InitialData
    from thermobeam.stepper import run

    params = (canonical_params(variant=variant) if maker == "canonical"
              else mild_params(variant=variant, mu=0.5))
    mesh = build_mesh(1.0, 8)
    _, series = run(params, mesh, 1.0 / 16.0, 1.0, InitialData.cubic_bump())
    drops = np.diff(series.energy)
    channels = series.diss_theta[1:] + series.diss_p[1:] + series.diss_damp[1:]
    slack = np.max(drops + series.dt * channels)
    assert slack <= 1e-12 * max(float(series.energy[0]), 1.0), slack
