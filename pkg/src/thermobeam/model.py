"""Physical model of the thermoelastic beam with mass diffusion.

The beam couples transverse displacement phi, rotation angle psi, temperature
theta and chemical potential P on the interval (0, L):

    rho1 phi_tt - kappa (phi_x + psi)_x                                  = 0
    -rho2 phi_ttx - alpha psi_xx + kappa (phi_x + psi)
                      - xi1 theta_x - xi2 P_x                            = 0
    c theta_t + d P_t - k_theta theta_xx - xi1 psi_tx                    = 0
    d theta_t + r P_t - h P_xx - xi2 psi_tx                              = 0

with homogeneous Dirichlet conditions on all four fields.  The effective
coefficients (alpha, xi1, xi2, c, r) arise from eliminating the concentration
field in favour of the chemical potential:

    alpha = b - beta^2 / varrho        xi1 = gamma + beta varpi / varrho
    xi2   = beta / varrho              c   = rho3 + varpi / varrho
    r     = 1 / varrho

Dissipation requires the capacity matrix [[c, d], [d, r]] to be positive
definite, i.e. c > 0, r > 0 and c*r - d^2 > 0.  Frictional damping mu may act
on the rotation velocity (second equation) or on the displacement velocity
(first equation); both variants are exponentially stable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, NamedTuple

from .errors import DivisionDomain, NonPositiveAlpha, ValidationError


class Variant(Enum):
    """Placement of the frictional damping term mu."""

    UNDAMPED = "undamped"
    ROTATION_DAMPED = "rotation_damped"          # +mu psi_t in the rotation equation
    DISPLACEMENT_DAMPED = "displacement_damped"  # +mu phi_t in the displacement equation

    @classmethod
    def parse(cls, name: str) -> "Variant":
        key = name.strip().lower().replace("-", "_").replace(" ", "_")
        aliases = {
            "undamped": cls.UNDAMPED,
            "rotation_damped": cls.ROTATION_DAMPED,
            "rotationdamped": cls.ROTATION_DAMPED,
            "displacement_damped": cls.DISPLACEMENT_DAMPED,
            "displacementdamped": cls.DISPLACEMENT_DAMPED,
        }
        if key not in aliases:
            raise ValueError(f"unknown damping variant {name!r}")
        return aliases[key]


@dataclass(frozen=True)
class RawConstants:
    """Raw thermodiffusion constants before elimination of the concentration."""

    b: float        # bending stiffness
    beta: float     # stress-diffusion coupling
    gamma: float    # stress-temperature coupling
    varrho: float   # measure of the diffusive effect (> 0)
    varpi: float    # measure of the thermo-diffusion effect
    rho3: float     # thermal capacity


class EffectiveParams(NamedTuple):
    alpha: float
    xi1: float
    xi2: float
    c_cap: float
    r_cap: float


def derive_effective_params(raw: RawConstants) -> EffectiveParams:
    """Eliminate the concentration field: return (alpha, xi1, xi2, c, r).

    Raises DivisionDomain if varrho <= 0 and NonPositiveAlpha if the effective
    bending stiffness b - beta^2/varrho would not be positive.  The cross
    capacity d is not derived here, so positive definiteness of the capacity
    matrix is checked later by :func:`validate`.
    """
    if raw.varrho <= 0.0:
        raise DivisionDomain(f"varrho must be positive, got {raw.varrho}")
    alpha = raw.b - raw.beta**2 / raw.varrho
    if alpha <= 0.0:
        raise NonPositiveAlpha(
            f"b - beta^2/varrho = {alpha} must be positive"
        )
    xi1 = raw.gamma + raw.beta * raw.varpi / raw.varrho
    xi2 = raw.beta / raw.varrho
    c_cap = raw.rho3 + raw.varpi / raw.varrho
    r_cap = 1.0 / raw.varrho
    return EffectiveParams(alpha, xi1, xi2, c_cap, r_cap)


@dataclass(frozen=True)
class ModelParams:
    """All coefficients of the beam system plus the damping variant."""

    rho1: float      # mass density per unit length
    rho2: float      # rotational inertia coefficient
    kappa: float     # shear stiffness (coefficient of phi_x + psi)
    alpha: float     # effective bending stiffness
    xi1: float       # temperature coupling
    xi2: float       # chemical-potential coupling
    c_cap: float     # thermal capacity
    d_cap: float     # cross capacity
    r_cap: float     # diffusion capacity
    k_theta: float   # thermal conductivity (coefficient of theta_xx)
    h_diff: float    # mass-diffusion coefficient (coefficient of P_xx)
    mu: float = 0.0  # frictional damping coefficient
    variant: Variant = Variant.UNDAMPED
    length: float = 1.0


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[Check, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def summary(self) -> str:
        lines = []
        for c in self.checks:
            status = "ok  " if c.passed else "FAIL"
            lines.append(f"{status}  {c.name}: {c.detail}")
        return "\n".join(lines)


def validate(params: ModelParams) -> ValidationReport:
    """Check every model invariant and report pass/fail per check.

    A passing report guarantees r P^2 + c theta^2 + 2 d P theta > 0 for all
    (theta, P) != (0, 0), which is what the dissipation argument needs.
    """
    checks: list[Check] = []

    def positive(name: str, value: float) -> None:
        checks.append(Check(name, value > 0.0 and math.isfinite(value),
                            f"{name} = {value!r} must be > 0"))

    positive("rho1", params.rho1)
    positive("rho2", params.rho2)
    positive("kappa", params.kappa)
    positive("alpha", params.alpha)
    positive("k_theta", params.k_theta)
    positive("h_diff", params.h_diff)
    positive("length", params.length)

    for name in ("xi1", "xi2", "d_cap"):
        value = getattr(params, name)
        checks.append(Check(name, math.isfinite(value), f"{name} = {value!r} must be finite"))

    checks.append(Check("mu", math.isfinite(params.mu) and params.mu >= 0.0,
                        f"mu = {params.mu!r} must be >= 0"))

    positive("c_cap", params.c_cap)
    positive("r_cap", params.r_cap)
    det = params.c_cap * params.r_cap - params.d_cap**2
    checks.append(Check(
        "capacity_matrix",
        det > 0.0 and params.c_cap > 0.0 and params.r_cap > 0.0,
        f"c*r - d^2 = {det!r} must be > 0 (positive definite capacity matrix)",
    ))

    undamped_ok = params.variant is not Variant.UNDAMPED or params.mu == 0.0
    checks.append(Check(
        "variant_damping",
        undamped_ok,
        f"variant {params.variant.value} with mu = {params.mu!r}"
        " (undamped requires mu = 0)",
    ))

    return ValidationReport(tuple(checks))


def require_valid(params: ModelParams) -> ModelParams:
    """Raise ValidationError listing every violated invariant; return params if clean."""
    report = validate(params)
    if not report.passed:
        raise ValidationError([f"{c.name}: {c.detail}" for c in report.failures()])
    return params


ScalarFunction = Callable[[float], float]


def _cubic_bump(x: float) -> float:
    return x * x * (1.0 - x)


@dataclass(frozen=True)
class InitialData:
    """Initial profiles for the seven fields the scheme is seeded from.

    phi0, phi1, phi2 are displacement, velocity and acceleration at t = 0;
    psi0, psi1 the rotation and its velocity; theta0 and p0 the thermal and
    chemical-potential fields.  Every profile must vanish at both endpoints to
    be compatible with the Dirichlet conditions.
    """

    phi0: ScalarFunction
    phi1: ScalarFunction
    phi2: ScalarFunction
    psi0: ScalarFunction
    psi1: ScalarFunction
    theta0: ScalarFunction
    p0: ScalarFunction

    FIELDS = ("phi0", "phi1", "phi2", "psi0", "psi1", "theta0", "p0")

    @classmethod
    def zero(cls) -> "InitialData":
        z = lambda x: 0.0
        return cls(z, z, z, z, z, z, z)

    @classmethod
    def cubic_bump(cls) -> "InitialData":
        """The canonical profile x^2 (1 - x) applied to all seven fields (L = 1)."""
        f = _cubic_bump
        return cls(f, f, f, f, f, f, f)

    def scaled(self, factor: float) -> "InitialData":
        def scale(f: ScalarFunction) -> ScalarFunction:
            return lambda x: factor * f(x)

        return InitialData(*(scale(getattr(self, name)) for name in self.FIELDS))

    def check_boundary(self, length: float, tol: float = 1e-9) -> ValidationReport:
        """Verify each profile vanishes at x = 0 and x = L (within tol)."""
        checks = []
        for name in self.FIELDS:
            f = getattr(self, name)
            left, right = abs(f(0.0)), abs(f(length))
            ok = left <= tol and right <= tol
            checks.append(Check(f"initial_{name}", ok,
                                f"|{name}(0)| = {left:.3e}, |{name}(L)| = {right:.3e}"))
        return ValidationReport(tuple(checks))


def with_variant(params: ModelParams, variant: Variant, mu: float | None = None) -> ModelParams:
    """Copy params onto another damping variant (mu forced to 0 when undamped)."""
    if variant is Variant.UNDAMPED:
        return replace(params, variant=variant, mu=0.0)
    return replace(params, variant=variant, mu=params.mu if mu is None else mu)
