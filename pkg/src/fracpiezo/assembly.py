"""Fractional strain-displacement rows and global system assembly.

A row ``B`` evaluated at ``x`` maps global nodal DOFs of one field to the
Riesz-Caputo derivative of the interpolated field (``u0`` for the axial
rows, ``dw0/dx`` for the bending rows). Inner integrals over the horizon are
exact per element; outer integrals use Gauss-Legendre points per element.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fracops import horizon_at
from .mesh import (
    HERMITE_D2_CONST,
    HERMITE_D2_SCALE_POWER,
    HERMITE_D2_SLOPE,
    ConfigurationError,
    DofMap,
    Mesh1D,
    hermite_eval,
    lagrange_eval,
)
from .model import SmartBeamModel, electrode_constants, section_constants

DEFAULT_QUAD_ORDER = 4


@dataclass(frozen=True)
class Region:
    """Node-aligned sub-interval that owns its own horizon truncation."""

    start_node: int
    end_node: int

    @classmethod
    def substrate(cls, mesh: Mesh1D) -> Region:
        return cls(0, mesh.n_elements)

    @classmethod
    def patch(cls, mesh: Mesh1D) -> Region:
        return cls(mesh.patch_start_node, mesh.patch_end_node)

    def bounds(self, mesh: Mesh1D) -> tuple[float, float]:
        return float(mesh.node_coords[self.start_node]), float(mesh.node_coords[self.end_node])


@dataclass(frozen=True)
class NonlocalRow:
    x: float
    coeffs: np.ndarray
    l_A: float
    l_B: float

    def __matmul__(self, dofs):
        return float(self.coeffs @ np.asarray(dofs))

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.coeffs)


def _n_cols(mesh: Mesh1D, kind: str) -> int:
    return mesh.n_nodes if kind == "u" else 2 * mesh.n_nodes


def _scatter_element(rows, pidx, elem, xi_weighted, const_weighted, le, kind):
    """Add ``const_weighted * B(xi=0) + xi_weighted * dB/dxi`` of element ``elem``."""
    if kind == "u":
        np.add.at(rows, (pidx, elem), -const_weighted / le)
        np.add.at(rows, (pidx, elem + 1), const_weighted / le)
        return
    for k in range(4):
        col = 2 * elem + k
        scale = le ** (-float(HERMITE_D2_SCALE_POWER[k]))
        vals = (HERMITE_D2_CONST[k] * const_weighted + HERMITE_D2_SLOPE[k] * xi_weighted) * scale
        np.add.at(rows, (pidx, col), vals)


def local_rows(points, mesh: Mesh1D, region: Region, kind: str) -> np.ndarray:
    """Integer-order rows: ``du/dx`` (Lagrange) or ``d2w/dx2`` (Hermite)."""
    x = np.atleast_1d(np.asarray(points, dtype=float))
    le = mesh.element_length
    rows = np.zeros((x.size, _n_cols(mesh, kind)))
    elem = np.clip(np.floor(x / le).astype(int), region.start_node, region.end_node - 1)
    xi = (x - mesh.node_coords[elem]) / le
    _scatter_element(rows, np.arange(x.size), elem, xi, np.ones_like(x), le, kind)
    return rows


def nonlocal_rows(points, mesh: Mesh1D, region: Region, alpha: float, h_l: float, kind: str) -> np.ndarray:
    """Fractional rows at every point, horizons truncated at the region ends.

    ``kind`` is ``"u"`` for the axial field or ``"w"`` for the rotation of the
    transverse field.
    """
    if kind not in ("u", "w"):
        raise ValueError("kind must be 'u' or 'w'")
    if alpha == 1.0:
        return local_rows(points, mesh, region, kind)
    x = np.atleast_1d(np.asarray(points, dtype=float))
    le = mesh.element_length
    r0, r1 = region.bounds(mesh)
    tol = 1e-12 * mesh.length
    if np.any(x < r0 - tol) or np.any(x > r1 + tol):
        raise ConfigurationError("evaluation point outside its region")
    x = np.clip(x, r0, r1)
    # points within round-off of a node are moved onto it; the kernel's
    # d**(1 - alpha) mass would otherwise turn a 1e-16 sliver into an O(1e-2) term
    nearest = np.rint(x / le).astype(int)
    on_node = np.abs(x - mesh.node_coords[nearest]) <= 1e-12 * le
    x = np.where(on_node, mesh.node_coords[nearest], x)
    l_a = np.minimum(h_l, x - r0)
    l_b = np.minimum(h_l, r1 - x)

    n_band = int(np.ceil(2 * h_l / le)) + 2
    first = np.clip(np.floor((x - l_a) / le).astype(int), region.start_node, region.end_node - 1)
    elem = first[:, None] + np.arange(n_band)[None, :]
    in_region = elem <= region.end_node - 1
    elem = np.minimum(elem, region.end_node - 1)
    xa = mesh.node_coords[elem]
    xb = mesh.node_coords[elem + 1]
    xc = x[:, None]

    rows = np.zeros((x.size, _n_cols(mesh, kind)))
    pidx = np.broadcast_to(np.arange(x.size)[:, None], elem.shape)
    p0, p1 = 1.0 - alpha, 2.0 - alpha

    for side, lengths in (("left", l_a), ("right", l_b)):
        if side == "left":
            a = np.maximum(xa, (x - l_a)[:, None])
            b = np.minimum(xb, xc)
            d1, d2 = xc - b, xc - a
        else:
            a = np.maximum(xa, xc)
            b = np.minimum(xb, (x + l_b)[:, None])
            d1, d2 = a - xc, b - xc
        valid = in_region & (b > a) & (lengths[:, None] > 0)
        d1 = np.where(valid, np.maximum(d1, 0.0), 0.0)
        d2 = np.where(valid, np.maximum(d2, 0.0), 0.0)
        safe_l = np.where(lengths > 0, lengths, 1.0)
        scale = (0.5 * (1.0 - alpha) * safe_l ** (alpha - 1.0))[:, None]
        m0 = scale * (d2**p0 - d1**p0) / p0
        if kind == "w":
            m1 = scale * (d2**p1 - d1**p1) / p1
            sgn = -1.0 if side == "left" else 1.0
            m_xi = ((xc - xa) * m0 + sgn * m1) / le
        else:
            m_xi = np.zeros_like(m0)
        m0 = np.where(valid, m0, 0.0)
        m_xi = np.where(valid, m_xi, 0.0)
        _scatter_element(rows, pidx.ravel(), elem.ravel(), m_xi.ravel(), m0.ravel(), le, kind)

    # a side truncated to zero length contributes half the one-sided derivative
    for lengths in (l_a, l_b):
        zero = lengths == 0
        if np.any(zero):
            rows[zero] += 0.5 * local_rows(x[zero], mesh, region, kind)
    return rows


def b_alpha_u(x: float, frac, region: Region, mesh: Mesh1D) -> NonlocalRow:
    r0, r1 = region.bounds(mesh)
    hz = horizon_at(x, r0, r1, frac.h_l)
    coeffs = nonlocal_rows([x], mesh, region, frac.alpha_m, frac.h_l, "u")[0]
    return NonlocalRow(x, coeffs, hz.l_A, hz.l_B)


def b_alpha_w(x: float, frac, region: Region, mesh: Mesh1D) -> NonlocalRow:
    r0, r1 = region.bounds(mesh)
    hz = horizon_at(x, r0, r1, frac.h_l)
    coeffs = nonlocal_rows([x], mesh, region, frac.alpha_m, frac.h_l, "w")[0]
    return NonlocalRow(x, coeffs, hz.l_A, hz.l_B)


def gauss_points(mesh: Mesh1D, region: Region, order: int = DEFAULT_QUAD_ORDER):
    """Quadrature points and weights over every element of ``region``."""
    xi, wt = np.polynomial.legendre.leggauss(order)
    le = mesh.element_length
    starts = mesh.node_coords[region.start_node:region.end_node]
    pts = (starts[:, None] + 0.5 * (1.0 + xi)[None, :] * le).ravel()
    wts = np.tile(0.5 * le * wt, starts.size)
    return pts, wts


def lagrange_rows(points, mesh: Mesh1D) -> np.ndarray:
    """Lagrange values at points, over patch potential DOFs."""
    x = np.atleast_1d(np.asarray(points, dtype=float))
    le = mesh.element_length
    s, e = mesh.patch_start_node, mesh.patch_end_node
    elem = np.clip(np.floor(x / le).astype(int), s, e - 1)
    xi = (x - mesh.node_coords[elem]) / le
    rows = np.zeros((x.size, e - s + 1))
    idx = np.arange(x.size)
    np.add.at(rows, (idx, elem - s), 1.0 - xi)
    np.add.at(rows, (idx, elem - s + 1), xi)
    return rows


@dataclass(frozen=True)
class GlobalSystem:
    """Assembled blocks; coupling blocks are ``None`` when not requested."""

    dofs: DofMap
    K_uu: np.ndarray
    K_uw: np.ndarray
    K_ww: np.ndarray
    F_a: np.ndarray
    F_t: np.ndarray
    F_ae: np.ndarray
    F_te: np.ndarray
    K_uphi: np.ndarray | None = None
    K_wphi: np.ndarray | None = None
    K_phiphi: np.ndarray | None = None

    def mechanical_matrix(self) -> np.ndarray:
        return np.block([[self.K_uu, self.K_uw], [self.K_uw.T, self.K_ww]])

    def full_matrix(self) -> np.ndarray:
        if self.K_phiphi is None:
            raise ConfigurationError("system was assembled without electrical blocks")
        return np.block([
            [self.K_uu, self.K_uw, self.K_uphi],
            [self.K_uw.T, self.K_ww, self.K_wphi],
            [self.K_uphi.T, self.K_wphi.T, self.K_phiphi],
        ])


class _Rows:
    """Cached row matrices at the quadrature points of one region."""

    def __init__(self, model: SmartBeamModel, mesh: Mesh1D, region: Region, quad_order: int):
        a, hl = model.frac.alpha_m, model.frac.h_l
        self.x, self.w = gauss_points(mesh, region, quad_order)
        self.Bu = nonlocal_rows(self.x, mesh, region, a, hl, "u")
        self.Bw = nonlocal_rows(self.x, mesh, region, a, hl, "w")


def _weighted(Bl, w, coef, Br):
    return Bl.T @ ((w * coef)[:, None] * Br)


def assemble_mechanical(model: SmartBeamModel, mesh: Mesh1D, quad_order: int = DEFAULT_QUAD_ORDER, _rows=None):
    """Return ``(K_uu, K_uw, K_ww)``."""
    sub, pat = _rows or (_Rows(model, mesh, Region.substrate(mesh), quad_order),
                         _Rows(model, mesh, Region.patch(mesh), quad_order))
    sc = section_constants(model)
    m = model.materials
    K_uu = _weighted(sub.Bu, sub.w, m.E_S * sc.A, sub.Bu)
    K_ww = _weighted(sub.Bw, sub.w, m.E_S * sc.I, sub.Bw)
    K_uw = np.zeros((K_uu.shape[0], K_ww.shape[0]))
    if model.has_piezo:
        K_uu += _weighted(pat.Bu, pat.w, m.E_P * sc.A_P, pat.Bu)
        K_ww += _weighted(pat.Bw, pat.w, m.E_P * sc.I_P, pat.Bw)
        K_uw += _weighted(pat.Bu, pat.w, -m.E_P * sc.B_P, pat.Bw)
    if model.electrodes is not None and model.electrodes.h_e > 0:
        ec = electrode_constants(model)
        E_e = model.electrodes.E_e
        region = Region.patch(mesh)
        Bu = local_rows(pat.x, mesh, region, "u")
        Bw = local_rows(pat.x, mesh, region, "w")
        K_uu += _weighted(Bu, pat.w, E_e * ec.A, Bu)
        K_ww += _weighted(Bw, pat.w, E_e * ec.I, Bw)
        K_uw += _weighted(Bu, pat.w, -E_e * ec.B, Bw)
    return K_uu, K_uw, K_ww


def assemble_coupling(model: SmartBeamModel, mesh: Mesh1D, quad_order: int = DEFAULT_QUAD_ORDER, _rows=None):
    """Return ``(K_uphi, K_wphi, K_phiphi)`` over the patch potential DOFs."""
    if not model.has_piezo:
        raise ConfigurationError("electro-mechanical coupling needs a piezo layer with h_P > 0")
    pat = _rows[1] if _rows else _Rows(model, mesh, Region.patch(mesh), quad_order)
    sc = section_constants(model)
    m, hp = model.materials, model.patch.h_P
    Lp = lagrange_rows(pat.x, mesh)
    K_uphi = _weighted(pat.Bu, pat.w, sc.A_P * m.e31 / hp, Lp)
    K_wphi = _weighted(pat.Bw, pat.w, -sc.B_P * m.e31 / hp, Lp)
    K_phiphi = _weighted(Lp, pat.w, -m.a33 * sc.A_P / hp**2, Lp)
    return K_uphi, K_wphi, K_phiphi


def _phi_at(points, mesh: Mesh1D, phi0) -> np.ndarray:
    phi0 = np.asarray(phi0, dtype=float)
    if phi0.ndim == 0:
        return np.full(np.size(points), float(phi0))
    if phi0.shape != (mesh.n_patch_elements + 1,):
        raise ConfigurationError("nodal potential profile must have one value per patch node")
    return lagrange_rows(points, mesh) @ phi0


def assemble_loads(model: SmartBeamModel, mesh: Mesh1D, q0=0.0, f_a=0.0, phi0=0.0,
                   quad_order: int = DEFAULT_QUAD_ORDER, _rows=None):
    """Return ``(F_a, F_t, F_ae, F_te)``.

    ``q0`` and ``f_a`` are uniform line loads (N/m); ``phi0`` is either a
    uniform top-electrode potential or one value per patch node.
    """
    xs, ws = gauss_points(mesh, Region.substrate(mesh), quad_order)
    le = mesh.element_length
    elem = np.clip(np.floor(xs / le).astype(int), 0, mesh.n_elements - 1)
    xi = (xs - mesh.node_coords[elem]) / le
    F_a = np.zeros(mesh.n_nodes)
    F_t = np.zeros(2 * mesh.n_nodes)
    lv, _ = lagrange_eval(xi, le)
    hv, _, _ = hermite_eval(xi, le)
    for k in range(2):
        np.add.at(F_a, elem + k, f_a * ws * lv[k])
    for k in range(4):
        np.add.at(F_t, 2 * elem + k, q0 * ws * hv[k])

    F_ae = np.zeros(mesh.n_nodes)
    F_te = np.zeros(2 * mesh.n_nodes)
    if model.has_piezo and np.any(np.asarray(phi0) != 0):
        pat = _rows[1] if _rows else _Rows(model, mesh, Region.patch(mesh), quad_order)
        sc = section_constants(model)
        m, hp = model.materials, model.patch.h_P
        phi = _phi_at(pat.x, mesh, phi0)
        F_ae = pat.Bu.T @ (pat.w * (-m.e31 * phi * sc.A_P / hp))
        F_te = pat.Bw.T @ (pat.w * (m.e31 * phi * sc.B_P / hp))
    return F_a, F_t, F_ae, F_te


def assemble_system(model: SmartBeamModel, mesh: Mesh1D, q0=0.0, f_a=0.0, phi0=0.0,
                    direct: bool = False, quad_order: int = DEFAULT_QUAD_ORDER) -> GlobalSystem:
    """Assemble every block needed for a converse or direct solve."""
    rows = (_Rows(model, mesh, Region.substrate(mesh), quad_order),
            _Rows(model, mesh, Region.patch(mesh), quad_order))
    K_uu, K_uw, K_ww = assemble_mechanical(model, mesh, quad_order, rows)
    F_a, F_t, F_ae, F_te = assemble_loads(model, mesh, q0, f_a, phi0, quad_order, rows)
    coupling = assemble_coupling(model, mesh, quad_order, rows) if direct else (None, None, None)
    return GlobalSystem(DofMap(mesh, with_phi=direct), K_uu, K_uw, K_ww, F_a, F_t, F_ae, F_te, *coupling)
