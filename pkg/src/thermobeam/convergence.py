"""Grid-refinement error study against a fine reference solution.

The scheme satisfies a first-order bound: at the final time the composite
squared norm

    ||phi_t - phi_t*||^2 + ||(phi_x + psi) - (phi_x + psi)*||^2
    + ||psi_t - psi_t*||^2 + ||psi_x - psi_x*||^2
    + ||theta - theta*||^2 + ||p - p*||^2

is bounded by c (dt^2 + h^2).  No closed-form solution exists, so the study
measures self-convergence: a reference run on a much finer grid stands in for
the exact solution and is restricted to each coarse grid by nodal sampling
(coarse nodes are a subset of the fine nodes whenever the element counts
divide).  Refining with dt proportional to h should then show the squared
error falling by ~4 per level, i.e. observed order ~2 on the squared norm.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import GridMismatch
from .fem import FemMatrices, assemble_matrices, build_mesh
from .model import InitialData, ModelParams
from .stepper import BeamState, run


def restrict_to_coarse(vector: np.ndarray, m_coarse: int) -> np.ndarray:
    """Sample a fine-grid interior vector at the coarse interior nodes."""
    m_fine = vector.shape[0]
    s_coarse, s_fine = m_coarse + 1, m_fine + 1
    if s_fine % s_coarse != 0:
        raise GridMismatch(
            f"coarse grid with {s_coarse} elements does not divide fine grid with {s_fine}"
        )
    ratio = s_fine // s_coarse
    idx = (np.arange(1, m_coarse + 1) * ratio) - 1
    return vector[idx]


def restrict_state(state: BeamState, m_coarse: int) -> BeamState:
    return BeamState(state.t, *(restrict_to_coarse(getattr(state, f), m_coarse)
                                for f in BeamState.FIELDS))


def composite_error(coarse_state: BeamState, reference_state: BeamState,
                    fem_coarse: FemMatrices) -> float:
    """Six-term squared error norm between a state and the restricted reference."""
    ref = (reference_state if reference_state.m == coarse_state.m
           else restrict_state(reference_state, coarse_state.m))
    diff = coarse_state.difference(ref)
    M, K, G = fem_coarse.mass, fem_coarse.stiffness, fem_coarse.grad
    shear = float(diff.phi @ K @ diff.phi
                  + 2.0 * (diff.psi @ G @ diff.phi)
                  + diff.psi @ M @ diff.psi)
    return float(
        diff.phi_t @ M @ diff.phi_t
        + shear
        + diff.psi_t @ M @ diff.psi_t
        + diff.psi @ K @ diff.psi
        + diff.theta @ M @ diff.theta
        + diff.p @ M @ diff.p
    )


@dataclass(frozen=True)
class RefinementStudy:
    """Errors and observed orders of a simultaneous space-time refinement."""

    levels: tuple[tuple[int, float], ...]     # (elements, dt) per level
    reference: tuple[int, float]
    errors: tuple[float, ...]
    orders: tuple[float, ...]                 # log2(e_k / e_{k+1}) per pair
    exact: bool                               # all errors vanished (orders undefined)

    @property
    def mean_order(self) -> float:
        return float(np.mean(self.orders)) if self.orders else float("nan")

    def rows(self) -> list[tuple[int, int, float, float, Optional[float]]]:
        """(level, elements, dt, error, order-to-next) table rows."""
        out = []
        for k, ((s, dt), err) in enumerate(zip(self.levels, self.errors)):
            order = self.orders[k - 1] if 0 < k <= len(self.orders) else None
            out.append((k, s, dt, err, order))
        return out


def run_study(base_params: ModelParams, initial: InitialData, t_final: float,
              levels: list[int], reference_factor: int = 4, *,
              dt_ratio: float = 0.5, fixed_dt: Optional[float] = None,
              error_over_time: bool = False, accel_seed: str = "consistent",
              workers: int = 1) -> RefinementStudy:
    """Run every refinement level against one fine reference and fit orders.

    levels lists element counts (strictly increasing, at least 3 of them for
    order estimates); each level uses dt = dt_ratio * h unless fixed_dt pins
    the step for all levels (isolating the time-error floor).  The reference
    uses reference_factor times the finest element count (at least 4) and
    always refines its own step.  With error_over_time the per-level error is
    the maximum over common time levels instead of the final-time value.
    """
    if len(levels) < 3:
        raise ValueError("need at least 3 refinement levels for order estimates")
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise ValueError(f"levels must be strictly increasing, got {levels}")
    if reference_factor < 4:
        raise ValueError("reference must be at least 4x finer than the finest level")

    length = base_params.length
    s_ref = levels[-1] * reference_factor
    dt_ref = dt_ratio * length / s_ref
    mesh_ref = build_mesh(length, s_ref)
    traj_ref, _ = run(base_params, mesh_ref, dt_ref, t_final, initial,
                      accel_seed=accel_seed)

    def level_error(s: int) -> float:
        dt = fixed_dt if fixed_dt is not None else dt_ratio * length / s
        mesh = build_mesh(length, s)
        fem = assemble_matrices(mesh)
        trajectory, _ = run(base_params, mesh, dt, t_final, initial,
                            accel_seed=accel_seed, fem=fem)
        if not error_over_time:
            return composite_error(trajectory[-1], traj_ref[-1], fem)
        stride = dt / dt_ref
        if abs(stride - round(stride)) > 1e-9:
            raise GridMismatch(f"dt {dt} is not a multiple of the reference dt {dt_ref}")
        stride = int(round(stride))
        return max(composite_error(state, traj_ref[n * stride], fem)
                   for n, state in enumerate(trajectory))

    if workers > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            errors = list(pool.map(level_error, levels))
    else:
        errors = [level_error(s) for s in levels]

    exact = all(e == 0.0 for e in errors)
    if exact or any(e <= 0.0 for e in errors):
        orders: tuple[float, ...] = ()
    else:
        orders = tuple(float(np.log2(errors[k] / errors[k + 1]))
                       for k in range(len(errors) - 1))
    level_dts = tuple(
        (s, fixed_dt if fixed_dt is not None else dt_ratio * length / s) for s in levels
    )
    return RefinementStudy(levels=level_dts, reference=(s_ref, dt_ref),
                           errors=tuple(errors), orders=orders, exact=exact)
