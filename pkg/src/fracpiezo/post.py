"""Field recovery, scalar metrics and strong-form residual checks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PPoly, make_lsq_spline

from .assembly import Region, lagrange_rows, local_rows, nonlocal_rows
from .fracops import DomainError, horizon_at, rrl_derivative
from .mesh import Mesh1D, hermite_eval, lagrange_eval
from .model import SmartBeamModel, electrode_constants, section_constants
from .solve import Solution

SAMPLES_PER_ELEMENT = 10


class ModeError(ValueError):
    """The solution lacks the fields a metric needs."""


@dataclass(frozen=True)
class FieldProfile:
    """Fields sampled along the beam.

    Patch quantities (``N_P``, ``M_P``, ``P3``, ``E3``) are zero off the patch.
    ``strain`` is the fractional axial strain at height ``x3`` in the substrate.
    """

    x: np.ndarray
    u0: np.ndarray
    w0: np.ndarray
    phi0: np.ndarray
    strain: np.ndarray
    N: np.ndarray
    M: np.ndarray
    N_P: np.ndarray
    M_P: np.ndarray
    E3: np.ndarray
    P3: np.ndarray
    x3: float = 0.0


def default_samples(mesh: Mesh1D, per_element: int = SAMPLES_PER_ELEMENT) -> np.ndarray:
    return np.linspace(0.0, mesh.length, mesh.n_elements * per_element + 1)


def _check_points(x, mesh: Mesh1D) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    tol = 1e-12 * mesh.length
    if np.any(x < -tol) or np.any(x > mesh.length + tol):
        raise DomainError(f"sample points must lie in [0, {mesh.length}]")
    if np.any(np.diff(x) <= 0):
        raise DomainError("sample points must be strictly increasing")
    return np.clip(x, 0.0, mesh.length)


def _locate(x, mesh: Mesh1D):
    le = mesh.element_length
    elem = np.clip(np.floor(x / le).astype(int), 0, mesh.n_elements - 1)
    return elem, (x - mesh.node_coords[elem]) / le


def interpolate_u(u_g, x, mesh: Mesh1D) -> np.ndarray:
    elem, xi = _locate(x, mesh)
    lv, _ = lagrange_eval(xi)
    return lv[0] * u_g[elem] + lv[1] * u_g[elem + 1]


def interpolate_w(w_g, x, mesh: Mesh1D) -> np.ndarray:
    elem, xi = _locate(x, mesh)
    hv, _, _ = hermite_eval(xi, mesh.element_length)
    return sum(hv[k] * w_g[2 * elem + k] for k in range(4))


def _potential(solution: Solution, x, mesh: Mesh1D) -> np.ndarray:
    """Potential at ``x`` (zero off the patch); converse runs use the prescribed value."""
    x0, x1 = mesh.patch_range
    on = (x >= x0) & (x <= x1)
    phi = np.zeros_like(x)
    if solution.phi_g is not None:
        nodal = solution.phi_g
    else:
        prescribed = np.asarray(solution.metadata.get("phi0", 0.0), dtype=float)
        nodal = np.full(mesh.n_patch_elements + 1, float(prescribed)) if prescribed.ndim == 0 else prescribed
    if np.any(on):
        phi[on] = lagrange_rows(x[on], mesh) @ nodal
    return phi


def evaluate_fields(solution: Solution, model: SmartBeamModel, mesh: Mesh1D, sample_points=None,
                    x3: float = 0.0) -> FieldProfile:
    """Displacements, potential, fractional strain and resultants at sample points."""
    x = default_samples(mesh) if sample_points is None else _check_points(sample_points, mesh)
    a, hl = model.frac.alpha_m, model.frac.h_l
    sc = section_constants(model)
    mat = model.materials

    sub = Region.substrate(mesh)
    eps0 = nonlocal_rows(x, mesh, sub, a, hl, "u") @ solution.u_g
    kappa = nonlocal_rows(x, mesh, sub, a, hl, "w") @ solution.w_g
    N = mat.E_S * sc.A * eps0
    M = -mat.E_S * sc.I * kappa

    phi = _potential(solution, x, mesh)
    N_P, M_P, E3, P3 = (np.zeros_like(x) for _ in range(4))
    if model.has_piezo:
        x0, x1 = mesh.patch_range
        on = (x >= x0) & (x <= x1)
        if np.any(on):
            pat = Region.patch(mesh)
            xp = x[on]
            ep = nonlocal_rows(xp, mesh, pat, a, hl, "u") @ solution.u_g
            kp = nonlocal_rows(xp, mesh, pat, a, hl, "w") @ solution.w_g
            e3 = -phi[on] / model.patch.h_P
            E3[on] = e3
            N_P[on] = mat.E_P * (sc.A_P * ep - sc.B_P * kp) - mat.e31 * sc.A_P * e3
            M_P[on] = mat.E_P * (sc.B_P * ep - sc.I_P * kp) - mat.e31 * sc.B_P * e3
            P3[on] = mat.a33 * sc.A_P * e3 + mat.e31 * (sc.A_P * ep - sc.B_P * kp)

    return FieldProfile(
        x=x,
        u0=interpolate_u(solution.u_g, x, mesh),
        w0=interpolate_w(solution.w_g, x, mesh),
        phi0=phi,
        strain=eps0 - x3 * kappa,
        N=N, M=M, N_P=N_P, M_P=M_P, E3=E3, P3=P3, x3=x3,
    )


def normalized_midspan(solution: Solution, model: SmartBeamModel, q0: float) -> float:
    """Midspan deflection scaled by the substrate's clamped-clamped UDL value."""
    if q0 == 0:
        raise ZeroDivisionError("normalized deflection needs a nonzero load q0")
    sc = section_constants(model)
    w_mid = float(interpolate_w(solution.w_g, np.array([model.L / 2.0]), solution.mesh)[0])
    return 384.0 * model.materials.E_S * sc.I / (q0 * model.L**4) * w_mid


def rms_voltage(solution: Solution, nodes: str = "mesh") -> float:
    """Root-mean-square of the nodal potentials.

    ``nodes="mesh"`` divides the patch sum of squares by every mesh node
    (zero potential off the patch), which reproduces the published tables;
    ``nodes="patch"`` divides by the patch node count only. The two agree
    when the piezo layer spans the beam.
    """
    if solution.phi_g is None:
        raise ModeError("rms voltage needs a direct-effect solution with nodal potentials")
    if nodes == "mesh":
        count = solution.mesh.n_nodes
    elif nodes == "patch":
        count = solution.phi_g.size
    else:
        raise ValueError(f"unknown node set {nodes!r}")
    return float(np.sqrt(np.dot(solution.phi_g, solution.phi_g) / count))


@dataclass(frozen=True)
class ResidualReport:
    """Relative L2 residuals of the strong-form equations; ``None`` if not applicable."""

    axial: float
    bending: float
    electrical: float | None
    n_points: int


def _smooth(x, values, lo, hi, spacing) -> PPoly:
    """Least-squares cubic spline on ``[lo, hi]`` with knots about ``spacing`` apart."""
    n_int = max(int(round((hi - lo) / spacing)), 1)
    inner = np.linspace(lo, hi, n_int + 1)
    knots = np.concatenate([[lo] * 3, inner, [hi] * 3])
    mask = (x >= lo) & (x <= hi)
    return PPoly.from_spline(make_lsq_spline(x[mask], values[mask], knots, k=3))


def _rrl(spline: PPoly, x, alpha, hz, step) -> float:
    return rrl_derivative(spline, x, alpha, hz, step)


def _d_rrl(spline: PPoly, x, alpha, hz, step) -> float:
    if alpha == 1.0:
        return float(spline.derivative(2)(x))
    return (rrl_derivative(spline, x + step, alpha, hz, step / 10)
            - rrl_derivative(spline, x - step, alpha, hz, step / 10)) / (2.0 * step)


def _relative(residual, *terms) -> float:
    scale = max(float(np.sqrt(np.mean(np.square(t)))) for t in terms)
    norm = float(np.sqrt(np.mean(np.square(residual))))
    if scale == 0.0:
        return 0.0 if norm == 0.0 else float("inf")
    return norm / scale


def strong_residual(solution: Solution, model: SmartBeamModel, mesh: Mesh1D, sample_points=None,
                    q0: float = 0.0, f_a: float = 0.0, knot_elements: int = 8) -> ResidualReport:
    """Pointwise check of the axial, bending and electrical equilibrium equations.

    Resultants are reconstructed as least-squares cubic splines (knots every
    ``knot_elements`` elements) before the Riesz-type derivatives are taken.
    Points closer than two horizons plus one knot span to a support or a
    patch edge are dropped: only there do all neighbours inside the horizon
    carry untruncated horizons, so the rigid-horizon operator is the exact
    adjoint. Each residual is scaled by the largest of the load and
    the RMS of the terms it balances.
    """
    a, hl = model.frac.alpha_m, model.frac.h_l
    spacing = knot_elements * mesh.element_length
    reach = (2.0 * hl if a < 1.0 else 0.0) + spacing
    dense = evaluate_fields(solution, model, mesh, default_samples(mesh))
    x = default_samples(mesh, 2) if sample_points is None else _check_points(sample_points, mesh)

    p0, p1 = mesh.patch_range
    edges = [0.0, model.L] + ([p0, p1] if model.has_piezo else [])
    keep = np.all(np.abs(x[:, None] - np.array(edges)[None, :]) >= reach, axis=1)
    x = x[keep]
    if x.size == 0:
        raise DomainError("no sample points clear of supports and patch edges")

    step = spacing / 10.0
    N_s = _smooth(dense.x, dense.N, 0.0, model.L, spacing)
    M_s = _smooth(dense.x, dense.M, 0.0, model.L, spacing)
    on = np.zeros(x.size, dtype=bool)
    if model.has_piezo:
        on = (x > p0) & (x < p1)
        NP_s = _smooth(dense.x, dense.N_P, p0, p1, spacing)
        MP_s = _smooth(dense.x, dense.M_P, p0, p1, spacing)

    ax_sub, ax_pat, be_sub, be_pat = (np.zeros(x.size) for _ in range(4))
    for i, xi in enumerate(x):
        hz = horizon_at(xi, 0.0, model.L, hl)
        ax_sub[i] = _rrl(N_s, xi, a, hz, step / 10)
        be_sub[i] = _d_rrl(M_s, xi, a, hz, step)
        if on[i]:
            hp = horizon_at(xi, p0, p1, hl)
            ax_pat[i] = _rrl(NP_s, xi, a, hp, step / 10)
            be_pat[i] = _d_rrl(MP_s, xi, a, hp, step)

    ax_el, be_el = _electrode_terms(solution, model, mesh, x, on)
    r_ax = ax_sub + ax_pat + ax_el + f_a
    r_be = be_sub + be_pat + be_el + q0
    axial = _relative(r_ax, np.full(x.size, f_a), ax_sub, ax_pat)
    bending = _relative(r_be, np.full(x.size, q0), be_sub, be_pat)

    electrical = None
    if solution.phi_g is not None and model.has_piezo and np.any(on):
        sc = section_constants(model)
        P3 = dense.P3
        mask = (dense.x > p0) & (dense.x < p1)
        dielectric = model.materials.a33 * sc.A_P * dense.E3[mask]
        electrical = _relative(P3[mask], dielectric, P3[mask] - dielectric)
    return ResidualReport(axial, bending, electrical, int(x.size))


def _electrode_terms(solution, model, mesh, x, on):
    """Local (integer-order) electrode contributions to the axial and bending equations."""
    ax, be = np.zeros(x.size), np.zeros(x.size)
    if model.electrodes is None or model.electrodes.h_e == 0 or not np.any(on):
        return ax, be
    ec, E_e = electrode_constants(model), model.electrodes.E_e
    pat = Region.patch(mesh)
    p0, p1 = mesh.patch_range
    xs = default_samples(mesh)
    xs = xs[(xs >= p0) & (xs <= p1)]
    du = local_rows(xs, mesh, pat, "u") @ solution.u_g
    d2w = local_rows(xs, mesh, pat, "w") @ solution.w_g
    spacing = 8 * mesh.element_length
    N_e = _smooth(xs, E_e * (ec.A * du - ec.B * d2w), p0, p1, spacing)
    M_e = _smooth(xs, E_e * (ec.B * du - ec.I * d2w), p0, p1, spacing)
    ax[on] = N_e.derivative()(x[on])
    be[on] = M_e.derivative(2)(x[on])
    return ax, be
