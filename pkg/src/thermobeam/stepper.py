"""Implicit Euler time stepping of the coupled beam system.

One step advances the velocities and the parabolic fields by solving a single
linear system in the stacked unknown x = [phi_t, psi_t, theta, p] (4m values),
then recovers the displacements from the update formulas

    phi^n = phi^{n-1} + dt * phi_t^n,      psi^n = psi^{n-1} + dt * psi_t^n.

Folding those updates into the weak equations makes the system matrix depend
only on (params, mesh, dt, variant), never on the state, so it is factorized
once per run.  All terms are evaluated at the new time level, which is what
makes the discrete energy decay unconditionally.

Block layout (rows = test equations, columns = unknowns; M, K, G = mass,
stiffness, grad with the derivative on G's column index, so G.T realizes the
value-against-test-derivative pairing):

    row phi_t:  (rho1/dt) M + kappa dt K [+ mu M]   | kappa dt G.T      | 0                       | 0
    row psi_t:  (rho2/dt) G.T + kappa dt G          | alpha dt K
                                                      + kappa dt M [+ mu M] | xi1 G.T            | xi2 G.T
    row theta:  0                                   | xi1 G.T           | (c/dt) M + k_theta K    | (d/dt) M
    row p:      0                                   | xi2 G.T           | (d/dt) M                | (r/dt) M + h K

The damping block mu M sits in the phi_t row (displacement damping) or the
psi_t row (rotation damping).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import energy as energy_mod
from .errors import DimensionMismatch, SingularSystem, SolveFailure
from .fem import FemMatrices, Mesh1D, assemble_matrices, interpolate
from .model import InitialData, ModelParams, Variant, require_valid


@dataclass
class BeamState:
    """Nodal interior values of all fields at one time level.

    phi_t_prev holds the velocity at the previous level so the backward
    difference (phi_t - phi_t_prev)/dt, the acceleration surrogate entering
    the discrete energy, is always available.
    """

    t: float
    phi: np.ndarray
    psi: np.ndarray
    phi_t: np.ndarray
    psi_t: np.ndarray
    theta: np.ndarray
    p: np.ndarray
    phi_t_prev: np.ndarray

    FIELDS = ("phi", "psi", "phi_t", "psi_t", "theta", "p", "phi_t_prev")

    @property
    def m(self) -> int:
        return self.phi.shape[0]

    def copy(self) -> "BeamState":
        return BeamState(self.t, *(getattr(self, f).copy() for f in self.FIELDS))

    def scaled(self, factor: float) -> "BeamState":
        return BeamState(self.t, *(factor * getattr(self, f) for f in self.FIELDS))

    def difference(self, other: "BeamState") -> "BeamState":
        if other.m != self.m:
            raise DimensionMismatch(f"state dimensions {self.m} vs {other.m}")
        return BeamState(self.t, *(getattr(self, f) - getattr(other, f) for f in self.FIELDS))


@dataclass
class StepSystem:
    """Factorized constant system matrix for one (params, mesh, dt, variant)."""

    params: ModelParams
    dt: float
    m: int
    matrix: sp.csc_matrix
    factorization: spla.SuperLU


def assemble_step_system(params: ModelParams, fem: FemMatrices, dt: float) -> StepSystem:
    """Build and factorize the 4m x 4m implicit Euler matrix."""
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    p = params
    m = fem.m
    M, K, G = fem.mass, fem.stiffness, fem.grad
    GT = G.T
    Z = np.zeros((m, m))

    a00 = (p.rho1 / dt) * M + p.kappa * dt * K
    a11 = p.alpha * dt * K + p.kappa * dt * M
    if p.variant is Variant.DISPLACEMENT_DAMPED:
        a00 = a00 + p.mu * M
    elif p.variant is Variant.ROTATION_DAMPED:
        a11 = a11 + p.mu * M

    blocks = [
        [a00, p.kappa * dt * GT, Z, Z],
        [(p.rho2 / dt) * GT + p.kappa * dt * G, a11, p.xi1 * GT, p.xi2 * GT],
        [Z, p.xi1 * GT, (p.c_cap / dt) * M + p.k_theta * K, (p.d_cap / dt) * M],
        [Z, p.xi2 * GT, (p.d_cap / dt) * M, (p.r_cap / dt) * M + p.h_diff * K],
    ]
    matrix = sp.csc_matrix(sp.bmat([[sp.csr_matrix(b) for b in row] for row in blocks]))
    try:
        factorization = spla.splu(matrix)
    except RuntimeError as exc:
        raise SingularSystem(f"step system factorization failed: {exc}") from exc
    return StepSystem(params=p, dt=dt, m=m, matrix=matrix, factorization=factorization)


def assemble_rhs(state: BeamState, params: ModelParams, fem: FemMatrices, dt: float) -> np.ndarray:
    """Collect all previous-level terms of the scheme on the right-hand side."""
    if state.m != fem.m:
        raise DimensionMismatch(f"state dimension {state.m} vs mesh interior {fem.m}")
    p = params
    M, K, G = fem.mass, fem.stiffness, fem.grad
    GT = G.T

    r0 = (p.rho1 / dt) * (M @ state.phi_t) - p.kappa * (K @ state.phi + GT @ state.psi)
    r1 = ((p.rho2 / dt) * (GT @ state.phi_t)
          - p.alpha * (K @ state.psi)
          - p.kappa * (G @ state.phi + M @ state.psi))
    r2 = (p.c_cap / dt) * (M @ state.theta) + (p.d_cap / dt) * (M @ state.p)
    r3 = (p.d_cap / dt) * (M @ state.theta) + (p.r_cap / dt) * (M @ state.p)
    return np.concatenate([r0, r1, r2, r3])


def step(state: BeamState, system: StepSystem, params: ModelParams, fem: FemMatrices) -> BeamState:
    """Advance one time level; deterministic for identical inputs."""
    dt = system.dt
    rhs = assemble_rhs(state, params, fem, dt)
    x = system.factorization.solve(rhs)
    if not np.all(np.isfinite(x)):
        raise SolveFailure("non-finite values in time-step solution")
    m = system.m
    phi_t = x[0:m]
    psi_t = x[m:2 * m]
    theta = x[2 * m:3 * m]
    p_new = x[3 * m:4 * m]
    return BeamState(
        t=state.t + dt,
        phi=state.phi + dt * phi_t,
        psi=state.psi + dt * psi_t,
        phi_t=phi_t,
        psi_t=psi_t,
        theta=theta,
        p=p_new,
        phi_t_prev=state.phi_t.copy(),
    )


def consistent_acceleration(params: ModelParams, fem: FemMatrices,
                            phi0: np.ndarray, psi0: np.ndarray,
                            phi_t0: np.ndarray) -> np.ndarray:
    """Initial acceleration satisfying the first weak equation discretely.

    Solves rho1 M a = -kappa (K phi0 + G.T psi0) [- mu M phi_t0], the t = 0
    analogue of the scheme's first row.  Seeding the backward difference with
    this vector makes the discrete energy non-increasing from the very first
    step; an interpolated acceleration profile generally does not satisfy the
    discrete equation and can make the energy jump at n = 1.
    """
    rhs = -params.kappa * (fem.stiffness @ phi0 + fem.grad.T @ psi0)
    if params.variant is Variant.DISPLACEMENT_DAMPED:
        rhs = rhs - params.mu * (fem.mass @ phi_t0)
    return np.linalg.solve(params.rho1 * fem.mass, rhs)


def initial_state(params: ModelParams, mesh: Mesh1D, fem: FemMatrices, dt: float,
                  initial: InitialData, accel_seed: str = "consistent") -> BeamState:
    """Interpolate the initial profiles and seed the backward difference.

    accel_seed selects the t = 0 acceleration surrogate: "consistent" solves
    the discrete first equation (see :func:`consistent_acceleration`), "phi2"
    interpolates the supplied acceleration profile directly.
    """
    phi0 = interpolate(initial.phi0, mesh)
    phi_t0 = interpolate(initial.phi1, mesh)
    psi0 = interpolate(initial.psi0, mesh)
    psi_t0 = interpolate(initial.psi1, mesh)
    theta0 = interpolate(initial.theta0, mesh)
    p0 = interpolate(initial.p0, mesh)

    if accel_seed == "consistent":
        accel0 = consistent_acceleration(params, fem, phi0, psi0, phi_t0)
    elif accel_seed == "phi2":
        accel0 = interpolate(initial.phi2, mesh)
    else:
        raise ValueError(f"unknown accel_seed {accel_seed!r} (use 'consistent' or 'phi2')")

    return BeamState(
        t=0.0,
        phi=phi0,
        psi=psi0,
        phi_t=phi_t0,
        psi_t=psi_t0,
        theta=theta0,
        p=p0,
        phi_t_prev=phi_t0 - dt * accel0,
    )


def run(params: ModelParams, mesh: Mesh1D, dt: float, t_final: float,
        initial: InitialData, *, fem: FemMatrices | None = None,
        accel_seed: str = "consistent",
        lyapunov_cfg: "energy_mod.LyapunovConfig | None" = None,
        ) -> tuple[list[BeamState], "energy_mod.EnergySeries"]:
    """Integrate from t = 0 to t_final and record the energy every step.

    Returns the full trajectory (N + 1 states, state 0 included) and the
    energy series with its dissipation channels.  dt must divide t_final up
    to rounding; N = round(t_final / dt).
    """
    require_valid(params)
    if not t_final > 0.0:
        raise ValueError(f"t_final must be positive, got {t_final}")
    if fem is None:
        fem = assemble_matrices(mesh)
    n_steps = int(round(t_final / dt))
    if n_steps < 1:
        raise ValueError(f"dt = {dt} exceeds t_final = {t_final}: no steps to take")

    system = assemble_step_system(params, fem, dt)
    state = initial_state(params, mesh, fem, dt, initial, accel_seed=accel_seed)

    trajectory = [state]
    for _ in range(n_steps):
        state = step(state, system, params, fem)
        trajectory.append(state)

    series = energy_mod.series_for(trajectory, params, fem, dt, lyapunov_cfg=lyapunov_cfg)
    return trajectory, series
