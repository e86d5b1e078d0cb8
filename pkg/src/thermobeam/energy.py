"""Discrete energy, dissipation channels and stability diagnostics.

The discrete energy of a state at level n is

    E^n = 1/2 ( rho1 ||phi_t||^2 + (rho1 rho2 / kappa) ||dbar phi_t||^2
              + rho2 ||(phi_t)_x||^2 + kappa ||phi_x + psi||^2
              + r ||p||^2 + c ||theta||^2 + alpha ||psi_x||^2
              + 2 d (p, theta) )

with dbar phi_t = (phi_t^n - phi_t^{n-1}) / dt.  All norms are L2 norms of
P1 functions, realized exactly through the mass/stiffness/grad matrices.  The
scheme makes E^n non-increasing; the dissipation channels recorded alongside
are the conductive term k_theta ||theta_x||^2, the diffusive term
h ||p_x||^2 and the frictional term mu ||damped velocity||^2.

The weighted functionals combined into the stability certificate for the
damped variants are evaluated here as numerical diagnostics; their decay and
the exponential fit of E^n stand in for the analytic estimates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional

import numpy as np

from .errors import DegenerateSeries, MissingPrev, UnsupportedVariant
from .fem import FemMatrices
from .model import ModelParams, Variant

if TYPE_CHECKING:  # avoid an import cycle; states are duck-typed at runtime
    from .stepper import BeamState


@dataclass(frozen=True)
class EnergyRecord:
    """Energy and dissipation channels of one time level."""

    t: float
    energy: float
    diss_theta: float   # k_theta * theta^T K theta
    diss_p: float       # h * p^T K p
    diss_damp: float    # mu * (damped velocity)^T M (damped velocity)
    lyapunov: Optional[float] = None


@dataclass(frozen=True)
class LyapunovConfig:
    """Weights of the combined functional N*E + N1*F1 + ... diagnostics."""

    n_weight: float = 1.0e3
    n1_weight: float = 1.0

    def __post_init__(self) -> None:
        if not (self.n_weight > 0.0 and self.n1_weight > 0.0):
            raise ValueError("Lyapunov weights must be positive")


@dataclass(frozen=True)
class EnergySeries:
    """Column-wise energy history of a run (index 0 is the initial state)."""

    dt: float
    t: np.ndarray
    energy: np.ndarray
    diss_theta: np.ndarray
    diss_p: np.ndarray
    diss_damp: np.ndarray
    lyapunov: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return self.t.shape[0]

    def record(self, n: int) -> EnergyRecord:
        lyap = None if self.lyapunov is None else float(self.lyapunov[n])
        return EnergyRecord(float(self.t[n]), float(self.energy[n]),
                            float(self.diss_theta[n]), float(self.diss_p[n]),
                            float(self.diss_damp[n]), lyap)


def _backward_difference(state: "BeamState", dt: float) -> np.ndarray:
    if state.phi_t_prev is None:
        raise MissingPrev("state carries no previous velocity for the backward difference")
    return (state.phi_t - state.phi_t_prev) / dt


def shear_norm_sq(phi: np.ndarray, psi: np.ndarray, fem: FemMatrices) -> float:
    """||phi_x + psi||^2 expanded into the exact quadratic of M, K, grad."""
    return float(phi @ fem.stiffness @ phi
                 + 2.0 * (psi @ fem.grad @ phi)
                 + psi @ fem.mass @ psi)


def discrete_energy(state: "BeamState", params: ModelParams, fem: FemMatrices,
                    dt: float) -> float:
    """Energy E^n of a state (non-negative whenever the capacity matrix is PD)."""
    p = params
    M, K = fem.mass, fem.stiffness
    dphi_t = _backward_difference(state, dt)
    return 0.5 * (
        p.rho1 * (state.phi_t @ M @ state.phi_t)
        + (p.rho1 * p.rho2 / p.kappa) * (dphi_t @ M @ dphi_t)
        + p.rho2 * (state.phi_t @ K @ state.phi_t)
        + p.kappa * shear_norm_sq(state.phi, state.psi, fem)
        + p.r_cap * (state.p @ M @ state.p)
        + p.c_cap * (state.theta @ M @ state.theta)
        + p.alpha * (state.psi @ K @ state.psi)
        + 2.0 * p.d_cap * (state.p @ M @ state.theta)
    )


def continuous_energy(state: "BeamState", params: ModelParams, fem: FemMatrices,
                      dt: float) -> float:
    """Energy in completed-square form; algebraically identical to discrete_energy.

    The thermal/diffusive block is regrouped as
        (c - d^2/r) ||theta||^2 + ||sqrt(r) p + d/sqrt(r) theta||^2,
    which equals r||p||^2 + c||theta||^2 + 2d(p, theta) for every state.
    """
    p = params
    M, K = fem.mass, fem.stiffness
    dphi_t = _backward_difference(state, dt)
    mix = np.sqrt(p.r_cap) * state.p + (p.d_cap / np.sqrt(p.r_cap)) * state.theta
    return 0.5 * (
        p.rho1 * (state.phi_t @ M @ state.phi_t)
        + (p.rho1 * p.rho2 / p.kappa) * (dphi_t @ M @ dphi_t)
        + p.rho2 * (state.phi_t @ K @ state.phi_t)
        + p.kappa * shear_norm_sq(state.phi, state.psi, fem)
        + p.alpha * (state.psi @ K @ state.psi)
        + (p.c_cap - p.d_cap**2 / p.r_cap) * (state.theta @ M @ state.theta)
        + (mix @ M @ mix)
    )


def dissipation_channels(state: "BeamState", params: ModelParams,
                         fem: FemMatrices) -> tuple[float, float, float]:
    """(conductive, diffusive, frictional) dissipation rates of a state."""
    K, M = fem.stiffness, fem.mass
    diss_theta = params.k_theta * float(state.theta @ K @ state.theta)
    diss_p = params.h_diff * float(state.p @ K @ state.p)
    if params.variant is Variant.ROTATION_DAMPED:
        damped = state.psi_t
    elif params.variant is Variant.DISPLACEMENT_DAMPED:
        damped = state.phi_t
    else:
        damped = None
    diss_damp = 0.0 if damped is None else params.mu * float(damped @ M @ damped)
    return diss_theta, diss_p, diss_damp


def lyapunov(state: "BeamState", params: ModelParams, fem: FemMatrices,
             cfg: LyapunovConfig, dt: float) -> float:
    """Combined functional N*E + weighted correctors for the damped variants.

    Rotation damping uses four correctors:
        F1 = -rho1 (phi_t, phi)
        F2 =  rho1 (phi_t, phi) + mu/2 ||psi||^2
        F3 = -rho2 ((phi_t)_x, phi_x) + mu/2 ||psi||^2
        F4 = -rho2 ((phi_t)_x, phi_x + psi) - (alpha rho1 / kappa) ((phi_t)_x, psi)

    Displacement damping uses two:
        F1 = -mu/2 ||phi_t||^2 - kappa ((phi_t)_x, phi_x)
        F2 =  rho1 (phi, phi_t) + mu/2 ||phi||^2
             + (mu rho2 / 2 kappa) ||phi_t||^2 + rho2 ((phi_t)_x, phi_x)

    and the combination is N*E + N1*F1 + F2 (+ F3 + F4 for rotation damping).
    """
    p = params
    M, K, G = fem.mass, fem.stiffness, fem.grad
    e_n = discrete_energy(state, params, fem, dt)
    phi, psi, phi_t = state.phi, state.psi, state.phi_t

    if p.variant is Variant.ROTATION_DAMPED:
        vel_disp = float(phi_t @ M @ phi)          # (phi_t, phi)
        vel_disp_x = float(phi_t @ K @ phi)        # ((phi_t)_x, phi_x)
        velx_psi = float(psi @ G @ phi_t)          # ((phi_t)_x, psi)
        psi_sq = float(psi @ M @ psi)
        f1 = -p.rho1 * vel_disp
        f2 = p.rho1 * vel_disp + 0.5 * p.mu * psi_sq
        f3 = -p.rho2 * vel_disp_x + 0.5 * p.mu * psi_sq
        f4 = -p.rho2 * (vel_disp_x + velx_psi) - (p.alpha * p.rho1 / p.kappa) * velx_psi
        return cfg.n_weight * e_n + cfg.n1_weight * f1 + f2 + f3 + f4

    if p.variant is Variant.DISPLACEMENT_DAMPED:
        vel_sq = float(phi_t @ M @ phi_t)
        vel_disp = float(phi @ M @ phi_t)
        vel_disp_x = float(phi_t @ K @ phi)
        phi_sq = float(phi @ M @ phi)
        f1 = -0.5 * p.mu * vel_sq - p.kappa * vel_disp_x
        f2 = (p.rho1 * vel_disp + 0.5 * p.mu * phi_sq
              + (p.mu * p.rho2 / (2.0 * p.kappa)) * vel_sq
              + p.rho2 * vel_disp_x)
        return cfg.n_weight * e_n + cfg.n1_weight * f1 + f2

    raise UnsupportedVariant("the combined functional is defined for damped variants only")


def beta0(params: ModelParams, cfg: LyapunovConfig) -> float:
    """Equivalence constant between the combined functional and the energy.

    beta0 = max(N1 rho1, rho1 + rho2/2 + mu/2, 3 rho2/2 + mu/2,
                rho2 + alpha rho1 / kappa)
    for the rotation-damped combination.
    """
    p = params
    return max(
        cfg.n1_weight * p.rho1,
        p.rho1 + 0.5 * p.rho2 + 0.5 * p.mu,
        1.5 * p.rho2 + 0.5 * p.mu,
        p.rho2 + p.alpha * p.rho1 / p.kappa,
    )


def series_for(trajectory: list["BeamState"], params: ModelParams, fem: FemMatrices,
               dt: float, lyapunov_cfg: Optional[LyapunovConfig] = None) -> EnergySeries:
    """Evaluate energy and dissipation channels along a trajectory."""
    n = len(trajectory)
    t = np.empty(n)
    e = np.empty(n)
    d_theta = np.empty(n)
    d_p = np.empty(n)
    d_damp = np.empty(n)
    want_lyap = lyapunov_cfg is not None and params.variant is not Variant.UNDAMPED
    lyap = np.empty(n) if want_lyap else None
    for i, state in enumerate(trajectory):
        t[i] = state.t
        e[i] = discrete_energy(state, params, fem, dt)
        d_theta[i], d_p[i], d_damp[i] = dissipation_channels(state, params, fem)
        if want_lyap:
            lyap[i] = lyapunov(state, params, fem, lyapunov_cfg, dt)
    return EnergySeries(dt=dt, t=t, energy=e, diss_theta=d_theta,
                        diss_p=d_p, diss_damp=d_damp, lyapunov=lyap)


@dataclass(frozen=True)
class MonotoneReport:
    """Largest per-step energy rate (E^n - E^{n-1})/dt against a tolerance."""

    max_rate: float
    worst_step: int
    tolerance: float
    passed: bool


def check_monotone(series: EnergySeries, tolerance: Optional[float] = None) -> MonotoneReport:
    """Verify (E^n - E^{n-1})/dt <= tolerance at every step.

    Default tolerance is 1e-10 * max(E^0, 1), a roundoff allowance on the
    exact non-increase the scheme guarantees.
    """
    if len(series) < 2:
        raise ValueError("need at least two samples to check monotonicity")
    if tolerance is None:
        tolerance = 1e-10 * max(float(series.energy[0]), 1.0)
    rates = np.diff(series.energy) / series.dt
    worst = int(np.argmax(rates))
    max_rate = float(rates[worst])
    return MonotoneReport(max_rate=max_rate, worst_step=worst + 1,
                          tolerance=tolerance, passed=max_rate <= tolerance)


@dataclass(frozen=True)
class DecayFit:
    """Least-squares exponential decay rate of an energy series tail."""

    rate: float          # slope of -ln E vs t on the window
    r_squared: float
    tail_average: float  # mean of -ln(E^n / E^0) / t^n on the window
    window_start: int


def _fit_window(n_samples: int, fraction: float, min_samples: int) -> int:
    start = n_samples - max(int(round(fraction * n_samples)), min_samples)
    return max(start, 0)


def fit_decay_rate(series: EnergySeries, fraction: float = 0.5,
                   min_samples: int = 20) -> DecayFit:
    """Fit -ln E^n = rate * t + const over the final part of the series.

    The window is the last `fraction` of the samples, widened to at least
    min_samples.  Raises DegenerateSeries if any windowed energy is <= 0.
    """
    n = len(series)
    start = _fit_window(n, fraction, min_samples)
    t = series.t[start:]
    e = series.energy[start:]
    if np.any(e <= 0.0):
        raise DegenerateSeries("non-positive energy inside the fit window")
    y = -np.log(e)
    slope, intercept = np.polyfit(t, y, 1)
    residual = y - (slope * t + intercept)
    ss_res = float(residual @ residual)
    centered = y - y.mean()
    ss_tot = float(centered @ centered)
    if ss_tot <= 1e-300:
        r_squared = 1.0 if ss_res <= 1e-12 else 0.0
    else:
        r_squared = 1.0 - ss_res / ss_tot
    e0 = float(series.energy[0])
    positive_t = t > 0.0
    tail_avg = float(np.mean(-np.log(e[positive_t] / e0) / t[positive_t]))
    return DecayFit(rate=float(slope), r_squared=r_squared,
                    tail_average=tail_avg, window_start=start)


@dataclass(frozen=True)
class PlateauReport:
    """Flatness of the -ln(E)/t curve over its final stretch."""

    slope: float
    final_value: float
    relative_slope: float


def decay_plateau(series: EnergySeries, fraction: float = 0.25) -> PlateauReport:
    """Slope of g(t) = -ln(E)/t over the final fraction, relative to g(T).

    A small relative slope means the curve has levelled off, i.e. the decay
    has settled onto a fixed exponential rate.
    """
    mask = series.t > 0.0
    t = series.t[mask]
    e = series.energy[mask]
    if np.any(e <= 0.0):
        raise DegenerateSeries("non-positive energy in the plateau window")
    g = -np.log(e) / t
    n = t.shape[0]
    start = max(n - max(int(round(fraction * n)), 2), 0)
    slope = float(np.polyfit(t[start:], g[start:], 1)[0])
    final_value = float(g[-1])
    rel = abs(slope) / abs(final_value) if final_value != 0.0 else np.inf
    return PlateauReport(slope=slope, final_value=final_value, relative_slope=rel)
