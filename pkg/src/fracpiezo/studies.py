"""Study drivers: single cases, sweeps, convergence runs and table validation."""

from __future__ import annotations

import csv
import io
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import presets as P
from .assembly import DEFAULT_QUAD_ORDER
from .config import ConfigError, StudyConfig
from .mesh import build_mesh
from .model import Electrodes
from .post import evaluate_fields, normalized_midspan, rms_voltage
from .solve import Solution, solve_converse, solve_direct

logger = logging.getLogger(__name__)

METRIC_COLUMNS = ("case", "alpha", "h_l", "n_elements", "n_inf", "bc", "mode", "electrodes",
                  "w_max", "w_bar", "v_rms", "status")
PROFILE_COLUMNS = ("x", "u0", "w0", "phi0")
CONVERGENCE_COLUMNS = ("alpha", "h_l", "n_inf", "n_elements", "metric", "rel_change", "converged")
CONVERGED_REL = 0.01


def fmt(value) -> str:
    """Fixed 6-significant-digit text; empty for missing values."""
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.6g}"
    return str(value)


def write_csv(path, columns, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([fmt(row.get(c)) for c in columns])


def csv_text(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(row.get(c)) for c in columns])
    return buf.getvalue()


@dataclass(frozen=True)
class CaseResult:
    name: str
    metrics: dict
    solution: Solution | None
    profile: dict | None = None


def case_name(cfg: StudyConfig, alpha: float, h_l: float, n: int, electrodes: Electrodes | None) -> str:
    tag = f"{cfg.name}_a{alpha:g}_hl{h_l / cfg.geometry.L:.4g}L_n{n}"
    if cfg.electrodes is not None:
        tag += "_el" if electrodes is not None else "_noel"
    return tag.replace(".", "p")


def solve_case(cfg: StudyConfig, alpha: float, h_l: float, n: int, electrodes=None,
               quad_order: int = DEFAULT_QUAD_ORDER) -> Solution:
    model = cfg.build_model(alpha, h_l, electrodes)
    mesh = cfg.build_mesh(n)
    ld = cfg.loads
    if cfg.mode == "converse":
        return solve_converse(model, mesh, q0=ld.q0, phi0=ld.phi0, f_a=ld.f_a, quad_order=quad_order)
    return solve_direct(model, mesh, q0=ld.q0, f_a=ld.f_a, quad_order=quad_order)


def run_point(cfg: StudyConfig, alpha: float, h_l: float, n: int, electrodes=None,
              quad_order: int = DEFAULT_QUAD_ORDER, with_profile: bool = False) -> CaseResult:
    """Solve one grid point; failures are recorded in the ``status`` column."""
    name = case_name(cfg, alpha, h_l, n, electrodes)
    metrics = {
        "case": name, "alpha": alpha, "h_l": h_l, "n_elements": n, "n_inf": h_l * n / cfg.geometry.L,
        "bc": cfg.bc, "mode": cfg.mode, "electrodes": "on" if electrodes is not None else "off",
    }
    try:
        sol = solve_case(cfg, alpha, h_l, n, electrodes, quad_order)
    except Exception as exc:  # noqa: BLE001 - recorded per row, the sweep continues
        logger.error("case %s failed: %s", name, exc)
        metrics["status"] = f"error: {exc}"
        return CaseResult(name, metrics, None)
    w = sol.deflections
    metrics["w_max"] = float(w[np.argmax(np.abs(w))])
    model = cfg.build_model(alpha, h_l, electrodes)
    if cfg.mode == "converse" and cfg.loads.q0 != 0 and cfg.loads.phi0 == 0:
        metrics["w_bar"] = normalized_midspan(sol, model, cfg.loads.q0)
    if cfg.mode == "direct":
        metrics["v_rms"] = rms_voltage(sol)
    metrics["status"] = "ok"
    profile = None
    if with_profile:
        mesh = sol.mesh
        x = np.linspace(0.0, mesh.length, mesh.n_elements * cfg.outputs.samples_per_element + 1)
        fp = evaluate_fields(sol, model, mesh, x)
        profile = {"x": fp.x, "u0": fp.u0, "w0": fp.w0, "phi0": fp.phi0}
    return CaseResult(name, metrics, sol, profile)


def _points(cfg: StudyConfig):
    out = []
    for alpha, h_l in cfg.grid():
        n = cfg.mesh.elements_for(cfg.geometry.L, h_l)[0]
        for el in cfg.electrode_variants():
            out.append((alpha, h_l, n, el))
    return out


def _map(fn, items, threads: int):
    if threads <= 1:
        return [fn(*it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda it: fn(*it), items))


def parametric_sweep(cfg: StudyConfig, threads: int = 1, quad_order: int = DEFAULT_QUAD_ORDER) -> list[dict]:
    """One metrics row per grid point, alpha outer and h_l inner."""
    results = _map(lambda a, h, n, el: run_point(cfg, a, h, n, el, quad_order), _points(cfg), threads)
    return [r.metrics for r in results]


def run_cases(cfg: StudyConfig, threads: int = 1, quad_order: int = DEFAULT_QUAD_ORDER) -> list[CaseResult]:
    return _map(lambda a, h, n, el: run_point(cfg, a, h, n, el, quad_order, with_profile=True), _points(cfg), threads)


def convergence_study(cfg: StudyConfig, quad_order: int = DEFAULT_QUAD_ORDER) -> list[dict]:
    """Metric against mesh density with successive relative changes.

    The metric is V_rms in direct mode and the extreme deflection otherwise.
    ``converged`` flags the first density whose change to the next finer
    density is below 1%.
    """
    rows = []
    for alpha, h_l in cfg.grid():
        ns = sorted(cfg.mesh.elements_for(cfg.geometry.L, h_l))
        if len(ns) < 2:
            raise ConfigError("mesh", "convergence study needs at least two mesh densities")
        values = []
        for n in ns:
            r = run_point(cfg, alpha, h_l, n, cfg.electrode_variants()[-1], quad_order)
            values.append(r.metrics.get("v_rms" if cfg.mode == "direct" else "w_max"))
        flagged = False
        block = []
        for i, n in enumerate(ns):
            row = {"alpha": alpha, "h_l": h_l, "n_inf": h_l * n / cfg.geometry.L, "n_elements": n,
                   "metric": values[i]}
            if i + 1 < len(ns) and values[i] is not None and values[i + 1] is not None:
                change = abs(values[i + 1] - values[i]) / abs(values[i + 1])
                row["rel_change"] = change
                if change < CONVERGED_REL and not flagged:
                    row["converged"] = "yes"
                    flagged = True
            block.append(row)
        rows.extend(block)
    return rows


def first_converged(rows: list[dict]) -> float | None:
    for row in rows:
        if row.get("converged") == "yes":
            return row["n_inf"]
    return None


# -- validation against the published tables --------------------------------------------

@dataclass(frozen=True)
class Cell:
    table: int
    label: str
    expected: float
    got: float
    tol: float
    relative: bool

    @property
    def delta(self) -> float:
        return abs(self.got - self.expected)

    @property
    def passed(self) -> bool:
        if not np.isfinite(self.got):
            return False
        err = self.delta / abs(self.expected) if self.relative else self.delta
        return err <= self.tol

    def line(self) -> str:
        tol = f"{100 * self.tol:g}% rel" if self.relative else f"{self.tol:g} abs"
        verdict = "PASS" if self.passed else "FAIL"
        return (f"table{self.table} {self.label}: expected={self.expected:.6g} got={self.got:.6g} "
                f"|d|={self.delta:.3g} tol={tol} {verdict}")


def _hl_label(div: int) -> str:
    return f"h_l=L/{div}"


def _grid_cells(table: int, ref: dict, solve_one, tol: float, relative: bool, threads: int) -> list[Cell]:
    keys = [(div, a) for div in ref for a in ref[div]]
    got = _map(lambda div, a: solve_one(a, P.L_REF / div), keys, threads)
    return [Cell(table, f"alpha={a:g} {_hl_label(div)}", ref[div][a], g, tol, relative)
            for (div, a), g in zip(keys, got)]


def validate_table1(n: int = P.N_ELEMENTS, quad_order: int = DEFAULT_QUAD_ORDER, threads: int = 1) -> list[Cell]:
    mesh = build_mesh(P.L_REF, n, (0.0, P.L_REF))

    def one(alpha, h_l):
        model = P.bare_beam(alpha, h_l)
        return normalized_midspan(solve_converse(model, mesh, q0=1.0, quad_order=quad_order), model, 1.0)

    return _grid_cells(1, P.TABLE1, one, 1e-3, False, threads)


def validate_table2(n: int = P.N_ELEMENTS, quad_order: int = DEFAULT_QUAD_ORDER, threads: int = 1) -> list[Cell]:
    mesh = build_mesh(P.L_REF, n, (0.0, P.L_REF))

    def one(alpha, h_l):
        return rms_voltage(solve_direct(P.layer_beam(alpha, h_l), mesh, q0=1.0, quad_order=quad_order))

    cells = _grid_cells(2, P.TABLE2, one, 5e-3, True, threads)
    return cells + _trend_cells(2, cells, increasing=True)


def validate_table4(n: int = P.N_ELEMENTS, quad_order: int = DEFAULT_QUAD_ORDER, threads: int = 1) -> list[Cell]:
    mesh = build_mesh(P.L_REF, n, (0.0, 0.3 * P.L_REF))

    def one(alpha, h_l):
        return rms_voltage(solve_direct(P.patch_cantilever(alpha, h_l), mesh, q0=1.0, quad_order=quad_order))

    cells = _grid_cells(4, P.TABLE4, one, 5e-3, True, threads)
    return cells + _trend_cells(4, cells, increasing=False)


def _trend_cells(table: int, cells: list[Cell], increasing: bool) -> list[Cell]:
    """One cell per horizon: 1 if V_rms is monotone in alpha as published, else 0."""
    out = []
    by_hl: dict[str, list[float]] = {}
    for c in cells:
        by_hl.setdefault(c.label.split()[1], []).append(c.got)
    for hl, vals in by_hl.items():
        steps = np.diff(vals)  # alpha decreasing along the list
        ok = np.all(steps >= 0) if increasing else np.all(steps <= 0)
        word = "non-decreasing" if increasing else "non-increasing"
        out.append(Cell(table, f"trend {hl} ({word} as alpha drops)", 1.0, float(ok), 0.0, False))
    return out


def table3_values(n: int = P.N_ELEMENTS, quad_order: int = DEFAULT_QUAD_ORDER, threads: int = 1):
    """V_rms without and with electrodes, and the percentage reduction, per alpha."""
    mesh = build_mesh(P.L_REF, n, (0.0, P.L_REF))

    def one(alpha, electrodes):
        model = P.layer_beam(alpha, P.TABLE3_H_L, h_P=P.H_PIEZO_THICK, electrodes=electrodes)
        return rms_voltage(solve_direct(model, mesh, q0=1.0, quad_order=quad_order))

    items = [(a, el) for a in P.TABLE3_ALPHAS for el in (None, P.ALUMINIUM_ELECTRODES)]
    vals = _map(one, items, threads)
    out = {}
    for i, a in enumerate(P.TABLE3_ALPHAS):
        without, with_el = vals[2 * i], vals[2 * i + 1]
        out[a] = (without, with_el, 100.0 * (without - with_el) / without)
    return out


def validate_table3(n: int = P.N_ELEMENTS, quad_order: int = DEFAULT_QUAD_ORDER, threads: int = 1) -> list[Cell]:
    vals = table3_values(n, quad_order, threads)
    return [Cell(3, f"alpha={a:g} electrode reduction (%)", P.TABLE3["difference_pct"][a], vals[a][2], 1.0, False)
            for a in P.TABLE3_ALPHAS]


VALIDATORS = {1: validate_table1, 2: validate_table2, 3: validate_table3, 4: validate_table4}


def validation_suite(tables=(1, 2, 3, 4), n: int = P.N_ELEMENTS, quad_order: int = DEFAULT_QUAD_ORDER,
                     threads: int = 1) -> list[Cell]:
    cells = []
    for t in tables:
        cells.extend(VALIDATORS[t](n, quad_order, threads))
    return cells


def validation_report(cells: list[Cell]) -> str:
    lines = [c.line() for c in cells]
    n_fail = sum(not c.passed for c in cells)
    lines.append(f"summary: {len(cells) - n_fail}/{len(cells)} cells pass")
    return "\n".join(lines) + "\n"

