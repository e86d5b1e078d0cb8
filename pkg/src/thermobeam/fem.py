"""Uniform 1D mesh and P1 element matrices on the interior (Dirichlet) nodes.

Every pairing in the weak form reduces to one of three matrices over the hat
functions u_1 .. u_m attached to the interior nodes of a uniform mesh:

    mass[i, j]      = integral  u_j   u_i   dx     (tridiag: 2h/3, h/6)
    stiffness[i, j] = integral  u_j'  u_i'  dx     (tridiag: 2/h, -1/h)
    grad[i, j]      = integral  u_j'  u_i   dx     (tridiag: -1/2, 0, +1/2)

The grad matrix carries the derivative on its column (trial) function; with
zero boundary values integration by parts gives grad.T == -grad exactly, so
the value-against-test-derivative pairing is realized by grad.T.  Products of
P1 functions are polynomials, so the closed-form stencils above are exact and
reproducible bit-for-bit; quadrature is reserved for test oracles.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import BadMesh, DimensionMismatch


@dataclass(frozen=True)
class Mesh1D:
    """Uniform partition of (0, length) into num_elements subintervals."""

    length: float
    num_elements: int
    h_mesh: float
    nodes: np.ndarray  # shape (num_elements + 1,), x_j = j * h_mesh

    @property
    def interior_dim(self) -> int:
        """Number of interior nodes m = num_elements - 1."""
        return self.num_elements - 1

    @property
    def interior_nodes(self) -> np.ndarray:
        return self.nodes[1:-1]


def build_mesh(length: float, num_elements: int) -> Mesh1D:
    if num_elements < 2:
        raise BadMesh(f"need at least 2 elements for an interior node, got {num_elements}")
    if not length > 0.0:
        raise BadMesh(f"length must be positive, got {length}")
    h = length / num_elements
    nodes = np.linspace(0.0, length, num_elements + 1)
    return Mesh1D(length=length, num_elements=num_elements, h_mesh=h, nodes=nodes)


@dataclass(frozen=True)
class FemMatrices:
    """The three interior-node element matrices of a mesh."""

    mesh: Mesh1D
    mass: np.ndarray       # symmetric positive definite
    stiffness: np.ndarray  # symmetric positive definite
    grad: np.ndarray       # exactly skew: grad + grad.T == 0

    @property
    def m(self) -> int:
        return self.mesh.interior_dim


def assemble_matrices(mesh: Mesh1D) -> FemMatrices:
    """Assemble mass, stiffness and gradient-coupling matrices from the stencils."""
    m = mesh.interior_dim
    h = mesh.h_mesh

    mass = np.zeros((m, m))
    stiffness = np.zeros((m, m))
    grad = np.zeros((m, m))

    idx = np.arange(m)
    mass[idx, idx] = 2.0 * h / 3.0
    stiffness[idx, idx] = 2.0 / h
    off = np.arange(m - 1)
    mass[off, off + 1] = h / 6.0
    mass[off + 1, off] = h / 6.0
    stiffness[off, off + 1] = -1.0 / h
    stiffness[off + 1, off] = -1.0 / h
    grad[off, off + 1] = 0.5
    grad[off + 1, off] = -0.5

    return FemMatrices(mesh=mesh, mass=mass, stiffness=stiffness, grad=grad)


def interpolate(f: Callable[[float], float], mesh: Mesh1D) -> np.ndarray:
    """Nodal interpolant of f on the interior nodes (boundary values implicit 0)."""
    return np.array([float(f(x)) for x in mesh.interior_nodes])


def _check_dims(*items) -> None:
    sizes = set()
    for item in items:
        sizes.add(item.shape[0])
        if item.ndim == 2:
            sizes.add(item.shape[1])
    if len(sizes) > 1:
        raise DimensionMismatch(f"incompatible dimensions {sorted(sizes)}")


def l2_norm_sq(v: np.ndarray, mass: np.ndarray) -> float:
    """Squared L2 norm of the P1 function with interior values v: v^T M v."""
    _check_dims(v, mass)
    return float(v @ mass @ v)


def h1_seminorm_sq(v: np.ndarray, stiffness: np.ndarray) -> float:
    """Squared L2 norm of the derivative: v^T K v."""
    _check_dims(v, stiffness)
    return float(v @ stiffness @ v)


def pairing(u: np.ndarray, v: np.ndarray, a: np.ndarray) -> float:
    """Bilinear pairing u^T A v."""
    if u.shape[0] != a.shape[0] or v.shape[0] != a.shape[1]:
        raise DimensionMismatch(
            f"pairing of {u.shape[0]} x {a.shape} x {v.shape[0]}"
        )
    return float(u @ a @ v)
