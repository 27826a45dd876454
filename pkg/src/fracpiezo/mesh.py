"""Uniform 1D mesh, Lagrange/Hermite shape functions and DOF numbering."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .fracops import DomainError

logger = logging.getLogger(__name__)


class ConfigurationError(ValueError):
    """Model, mesh or boundary-condition setup is inconsistent."""


@dataclass(frozen=True)
class Mesh1D:
    length: float
    n_elements: int
    patch_start_node: int = 0
    patch_end_node: int | None = None
    snap_distance: float = 0.0
    node_coords: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "node_coords", np.linspace(0.0, self.length, self.n_elements + 1))
        if self.patch_end_node is None:
            object.__setattr__(self, "patch_end_node", self.n_elements)

    @property
    def element_length(self) -> float:
        return self.length / self.n_elements

    @property
    def n_nodes(self) -> int:
        return self.n_elements + 1

    @property
    def patch_range(self) -> tuple[float, float]:
        return float(self.node_coords[self.patch_start_node]), float(self.node_coords[self.patch_end_node])

    @property
    def n_patch_elements(self) -> int:
        return self.patch_end_node - self.patch_start_node

    @property
    def patch_nodes(self) -> np.ndarray:
        return np.arange(self.patch_start_node, self.patch_end_node + 1)

    def n_inf(self, h_l: float) -> float:
        """Elements per horizon length."""
        return h_l / self.element_length


def build_mesh(length: float, n_elements: int, patch=None) -> Mesh1D:
    """Uniform mesh on ``[0, length]``; ``patch = (x0, L_P)`` is snapped to nodes."""
    if n_elements < 2:
        raise ConfigurationError("need at least two elements")
    if length <= 0:
        raise ConfigurationError("length must be positive")
    if patch is None:
        return Mesh1D(length, n_elements)
    x0, lp = patch
    le = length / n_elements
    if x0 < 0 or x0 + lp > length * (1 + 1e-12) or lp <= 0:
        raise ConfigurationError(f"patch [{x0}, {x0 + lp}] not inside [0, {length}]")
    start = int(round(x0 / le))
    end = int(round((x0 + lp) / le))
    if end - start < 1:
        raise ConfigurationError("patch shorter than one element")
    snap = max(abs(start * le - x0), abs(end * le - (x0 + lp)))
    if snap > 1e-9 * le:
        logger.warning("patch [%g, %g] snapped to nodes [%g, %g]", x0, x0 + lp, start * le, end * le)
    return Mesh1D(length, n_elements, start, end, snap)


def lagrange_eval(xi: float, l_e: float = 1.0):
    """Linear Lagrange values and x-derivatives at local coordinate ``xi``."""
    values = np.array([1.0 - xi, xi])
    derivs = np.array([-1.0, 1.0]) / l_e
    return values, derivs


def hermite_eval(xi: float, l_e: float):
    """Cubic Hermite values, first and second x-derivatives for DOFs (w1, t1, w2, t2)."""
    x2, x3 = xi * xi, xi**3
    values = np.array([
        1 - 3 * x2 + 2 * x3,
        l_e * (xi - 2 * x2 + x3),
        3 * x2 - 2 * x3,
        l_e * (-x2 + x3),
    ])
    d1 = np.array([
        (-6 * xi + 6 * x2) / l_e,
        1 - 4 * xi + 3 * x2,
        (6 * xi - 6 * x2) / l_e,
        -2 * xi + 3 * x2,
    ])
    d2 = np.array([
        (-6 + 12 * xi) / l_e**2,
        (-4 + 6 * xi) / l_e,
        (6 - 12 * xi) / l_e**2,
        (-2 + 6 * xi) / l_e,
    ])
    return values, d1, d2


# second derivatives of the Hermite basis as c0 + c1*xi, scaled by l_e**-2 and l_e**-1
HERMITE_D2_CONST = np.array([-6.0, -4.0, 6.0, -2.0])
HERMITE_D2_SLOPE = np.array([12.0, 6.0, -12.0, 6.0])
HERMITE_D2_SCALE_POWER = np.array([2, 1, 2, 1])


def locate_element(s: float, mesh: Mesh1D) -> int:
    """Index ``e`` with ``x_e <= s < x_{e+1}``; ``s = L`` maps to the last element."""
    if s < 0 or s > mesh.length:
        raise DomainError(f"s={s} outside [0, {mesh.length}]")
    e = int(np.searchsorted(mesh.node_coords, s, side="right")) - 1
    return min(e, mesh.n_elements - 1)


@dataclass(frozen=True)
class DofMap:
    """Global DOF layout: ``[u (N+1) | w, theta interleaved (2N+2) | phi (N_P+1)]``."""

    mesh: Mesh1D
    with_phi: bool = False

    @property
    def n_u(self) -> int:
        return self.mesh.n_nodes

    @property
    def n_w(self) -> int:
        return 2 * self.mesh.n_nodes

    @property
    def n_phi(self) -> int:
        return self.mesh.n_patch_elements + 1 if self.with_phi else 0

    @property
    def total(self) -> int:
        return self.n_u + self.n_w + self.n_phi

    def u(self, node: int) -> int:
        return node

    def w(self, node: int) -> int:
        return self.n_u + 2 * node

    def theta(self, node: int) -> int:
        return self.n_u + 2 * node + 1

    def phi(self, node: int) -> int:
        if not self.with_phi:
            raise ConfigurationError("no potential DOFs in this layout")
        k = node - self.mesh.patch_start_node
        if not 0 <= k < self.n_phi:
            raise ConfigurationError(f"node {node} carries no potential DOF")
        return self.n_u + self.n_w + k

    @property
    def u_slice(self) -> slice:
        return slice(0, self.n_u)

    @property
    def w_slice(self) -> slice:
        return slice(self.n_u, self.n_u + self.n_w)

    @property
    def phi_slice(self) -> slice:
        return slice(self.n_u + self.n_w, self.total)
