"""Independent quadrature oracles used by the test suite.

Everything here is built from scratch on purpose: piecewise-linear functions
are evaluated pointwise from their nodal values and every integral is done by
4-point Gauss-Legendre quadrature element by element.  Products of P1
functions are polynomials of degree <= 2 per element, so these integrals are
exact to roundoff and arbitrate the closed-form stencils and quadratic forms
used by the package.
"""

from __future__ import annotations

import numpy as np

GAUSS_X, GAUSS_W = np.polynomial.legendre.leggauss(4)


def element_quad(f, a: float, b: float) -> float:
    """Integral of callable f over [a, b] by 4-point Gauss."""
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    return half * sum(w * f(mid + half * x) for x, w in zip(GAUSS_X, GAUSS_W))


def quad_integral(f, mesh) -> float:
    """Integral of f over (0, L) element by element."""
    total = 0.0
    for k in range(mesh.num_elements):
        total += element_quad(f, mesh.nodes[k], mesh.nodes[k + 1])
    return total


def padded(v: np.ndarray) -> np.ndarray:
    """Interior nodal values extended by the zero boundary values."""
    return np.concatenate(([0.0], np.asarray(v, dtype=float), [0.0]))


def fe_value(v: np.ndarray, mesh, x: float) -> float:
    """Value at x of the P1 function with interior nodal values v."""
    full = padded(v)
    h = mesh.h_mesh
    k = min(int(x / h), mesh.num_elements - 1)
    local = (x - mesh.nodes[k]) / h
    return full[k] * (1.0 - local) + full[k + 1] * local


def fe_deriv(v: np.ndarray, mesh, x: float) -> float:
    """Derivative at x (piecewise constant) of the P1 function with values v."""
    full = padded(v)
    h = mesh.h_mesh
    k = min(int(x / h), mesh.num_elements - 1)
    return (full[k + 1] - full[k]) / h


def hat(mesh, j: int):
    """The hat function attached to interior node j (1-based node index j)."""
    m = mesh.interior_dim
    v = np.zeros(m)
    v[j - 1] = 1.0
    return v


def assemble_by_quadrature(mesh):
    """Mass, stiffness and gradient matrices assembled per element by Gauss.

    grad[i, j] integrates u_j' * u_i, matching the package's convention of
    derivative on the column index.
    """
    m = mesh.interior_dim
    mass = np.zeros((m, m))
    stiffness = np.zeros((m, m))
    grad = np.zeros((m, m))
    for i in range(1, m + 1):
        ui = hat(mesh, i)
        for j in range(max(1, i - 1), min(m, i + 1) + 1):
            uj = hat(mesh, j)
            mass[i - 1, j - 1] = quad_integral(
                lambda x: fe_value(uj, mesh, x) * fe_value(ui, mesh, x), mesh)
            stiffness[i - 1, j - 1] = quad_integral(
                lambda x: fe_deriv(uj, mesh, x) * fe_deriv(ui, mesh, x), mesh)
            grad[i - 1, j - 1] = quad_integral(
                lambda x: fe_deriv(uj, mesh, x) * fe_value(ui, mesh, x), mesh)
    return mass, stiffness, grad


def inner_value_value(u: np.ndarray, v: np.ndarray, mesh) -> float:
    """(u, v): L2 inner product of two P1 functions."""
    return quad_integral(lambda x: fe_value(u, mesh, x) * fe_value(v, mesh, x), mesh)


def inner_deriv_value(u: np.ndarray, v: np.ndarray, mesh) -> float:
    """(u_x, v): derivative of the first against the value of the second."""
    return quad_integral(lambda x: fe_deriv(u, mesh, x) * fe_value(v, mesh, x), mesh)


def inner_deriv_deriv(u: np.ndarray, v: np.ndarray, mesh) -> float:
    """(u_x, v_x)."""
    return quad_integral(lambda x: fe_deriv(u, mesh, x) * fe_deriv(v, mesh, x), mesh)


def scheme_residual(params, mesh, dt: float, prev, candidate) -> np.ndarray:
    """Left-hand side of the time-step equations evaluated by quadrature.

    prev holds the known level (phi, psi, phi_t, theta, p as nodal vectors);
    candidate the unknowns (phi_t, psi_t, theta, p).  Displacements at the new
    level are reconstructed from the update formulas.  Returns the stacked
    residual over all interior test functions, which must equal A @ x - rhs
    of the assembled system.
    """
    from thermobeam.model import Variant

    m = mesh.interior_dim
    phi_t_new, psi_t_new, theta_new, p_new = candidate
    phi_prev, psi_prev, phi_t_prev, theta_prev, p_prev = prev
    phi_new = phi_prev + dt * phi_t_new
    psi_new = psi_prev + dt * psi_t_new

    res = np.zeros(4 * m)
    for i in range(1, m + 1):
        ui = hat(mesh, i)

        eq_phi = (params.rho1 / dt) * inner_value_value(phi_t_new - phi_t_prev, ui, mesh)
        eq_phi += params.kappa * (inner_deriv_deriv(phi_new, ui, mesh)
                                  + inner_deriv_value(ui, psi_new, mesh))
        if params.variant is Variant.DISPLACEMENT_DAMPED:
            eq_phi += params.mu * inner_value_value(phi_t_new, ui, mesh)

        eq_psi = (params.rho2 / dt) * inner_deriv_value(ui, phi_t_new - phi_t_prev, mesh)
        eq_psi += params.alpha * inner_deriv_deriv(psi_new, ui, mesh)
        eq_psi += params.kappa * (inner_deriv_value(phi_new, ui, mesh)
                                  + inner_value_value(psi_new, ui, mesh))
        eq_psi += params.xi1 * inner_deriv_value(ui, theta_new, mesh)
        eq_psi += params.xi2 * inner_deriv_value(ui, p_new, mesh)
        if params.variant is Variant.ROTATION_DAMPED:
            eq_psi += params.mu * inner_value_value(psi_t_new, ui, mesh)

        eq_theta = (params.c_cap / dt) * inner_value_value(theta_new - theta_prev, ui, mesh)
        eq_theta += (params.d_cap / dt) * inner_value_value(p_new - p_prev, ui, mesh)
        eq_theta += params.k_theta * inner_deriv_deriv(theta_new, ui, mesh)
        eq_theta += params.xi1 * inner_deriv_value(ui, psi_t_new, mesh)

        eq_p = (params.d_cap / dt) * inner_value_value(theta_new - theta_prev, ui, mesh)
        eq_p += (params.r_cap / dt) * inner_value_value(p_new - p_prev, ui, mesh)
        eq_p += params.h_diff * inner_deriv_deriv(p_new, ui, mesh)
        eq_p += params.xi2 * inner_deriv_value(ui, psi_t_new, mesh)

        res[i - 1] = eq_phi
        res[m + i - 1] = eq_psi
        res[2 * m + i - 1] = eq_theta
        res[3 * m + i - 1] = eq_p
    return res


def energy_by_quadrature(state, params, mesh, dt: float) -> float:
    """Discrete energy evaluated term by term with Gauss quadrature."""
    dphi_t = (state.phi_t - state.phi_t_prev) / dt

    def sq(v):
        return quad_integral(lambda x: fe_value(v, mesh, x) ** 2, mesh)

    def sq_x(v):
        return quad_integral(lambda x: fe_deriv(v, mesh, x) ** 2, mesh)

    shear = quad_integral(
        lambda x: (fe_deriv(state.phi, mesh, x) + fe_value(state.psi, mesh, x)) ** 2, mesh)
    cross = quad_integral(
        lambda x: fe_value(state.p, mesh, x) * fe_value(state.theta, mesh, x), mesh)

    return 0.5 * (
        params.rho1 * sq(state.phi_t)
        + (params.rho1 * params.rho2 / params.kappa) * sq(dphi_t)
        + params.rho2 * sq_x(state.phi_t)
        + params.kappa * shear
        + params.r_cap * sq(state.p)
        + params.c_cap * sq(state.theta)
        + params.alpha * sq_x(state.psi)
        + 2.0 * params.d_cap * cross
    )


def lyapunov_by_quadrature(state, params, mesh, cfg, dt: float) -> float:
    """Combined functional evaluated term by term with Gauss quadrature."""
    from thermobeam.model import Variant

    e_n = energy_by_quadrature(state, params, mesh, dt)
    phi, psi, phi_t = state.phi, state.psi, state.phi_t

    if params.variant is Variant.ROTATION_DAMPED:
        vel_disp = inner_value_value(phi_t, phi, mesh)
        vel_disp_x = inner_deriv_deriv(phi_t, phi, mesh)
        velx_psi = inner_deriv_value(phi_t, psi, mesh)
        velx_shear = quad_integral(
            lambda x: fe_deriv(phi_t, mesh, x)
            * (fe_deriv(phi, mesh, x) + fe_value(psi, mesh, x)), mesh)
        psi_sq = inner_value_value(psi, psi, mesh)
        f1 = -params.rho1 * vel_disp
        f2 = params.rho1 * vel_disp + 0.5 * params.mu * psi_sq
        f3 = -params.rho2 * vel_disp_x + 0.5 * params.mu * psi_sq
        f4 = (-params.rho2 * velx_shear
              - (params.alpha * params.rho1 / params.kappa) * velx_psi)
        return cfg.n_weight * e_n + cfg.n1_weight * f1 + f2 + f3 + f4

    if params.variant is Variant.DISPLACEMENT_DAMPED:
        vel_sq = inner_value_value(phi_t, phi_t, mesh)
        vel_disp = inner_value_value(phi, phi_t, mesh)
        vel_disp_x = inner_deriv_deriv(phi_t, phi, mesh)
        phi_sq = inner_value_value(phi, phi, mesh)
        f1 = -0.5 * params.mu * vel_sq - params.kappa * vel_disp_x
        f2 = (params.rho1 * vel_disp + 0.5 * params.mu * phi_sq
              + (params.mu * params.rho2 / (2.0 * params.kappa)) * vel_sq
              + params.rho2 * vel_disp_x)
        return cfg.n_weight * e_n + cfg.n1_weight * f1 + f2

    raise ValueError("combined functional defined for damped variants only")
