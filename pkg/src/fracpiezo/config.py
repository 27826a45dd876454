"""Study configuration: nested JSON sections in SI units."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import presets as P
from .fracops import FractionalParams
from .mesh import Mesh1D, build_mesh
from .model import BoundaryType, Electrodes, Materials, Patch, SmartBeamModel

MODES = ("converse", "direct")


class ConfigError(ValueError):
    """Invalid or incomplete study configuration; ``field`` names the offending key."""

    def __init__(self, field_name: str, message: str):
        super().__init__(message)
        self.field = field_name


@dataclass(frozen=True)
class Geometry:
    L: float
    b: float
    h: float


@dataclass(frozen=True)
class FracGrid:
    alpha: tuple[float, ...]
    h_l: tuple[float, ...]


@dataclass(frozen=True)
class MeshSpec:
    """Either explicit element counts or target elements per horizon."""

    n_elements: tuple[int, ...] = ()
    n_inf: tuple[float, ...] = ()

    def elements_for(self, L: float, h_l: float) -> list[int]:
        if self.n_elements:
            return list(self.n_elements)
        return [max(2, int(round(n * L / h_l))) for n in self.n_inf]


@dataclass(frozen=True)
class Loads:
    q0: float = 0.0
    f_a: float = 0.0
    phi0: float = 0.0


@dataclass(frozen=True)
class ElectrodeSpec:
    h_e: float
    E_e: float
    compare: bool = False


@dataclass(frozen=True)
class Outputs:
    directory: str = "out"
    samples_per_element: int = 10


@dataclass(frozen=True)
class StudyConfig:
    name: str
    geometry: Geometry
    patch: Patch
    materials: Materials
    fractional: FracGrid
    mesh: MeshSpec
    mode: str
    bc: str
    loads: Loads = field(default_factory=Loads)
    electrodes: ElectrodeSpec | None = None
    outputs: Outputs = field(default_factory=Outputs)

    def grid(self) -> list[tuple[float, float]]:
        """Grid points, alpha outer and h_l inner."""
        return [(a, h) for a in self.fractional.alpha for h in self.fractional.h_l]

    def electrode_variants(self) -> list[Electrodes | None]:
        if self.electrodes is None:
            return [None]
        on = Electrodes(self.electrodes.h_e, self.electrodes.E_e)
        return [None, on] if self.electrodes.compare else [on]

    def build_model(self, alpha: float, h_l: float, electrodes: Electrodes | None = None) -> SmartBeamModel:
        g = self.geometry
        return SmartBeamModel(
            L=g.L, b=g.b, h=g.h, patch=self.patch, materials=self.materials,
            frac=FractionalParams(alpha_m=alpha, h_l=h_l), bc=BoundaryType(self.bc),
            electrodes=electrodes,
        )

    def build_mesh(self, n_elements: int) -> Mesh1D:
        return build_mesh(self.geometry.L, n_elements, (self.patch.x0, self.patch.L_P))

    def to_dict(self) -> dict:
        return json.loads(json.dumps(asdict(self)))


def _section(data: dict, key: str, path: str = "", required: bool = True):
    full = f"{path}.{key}" if path else key
    if key not in data or data[key] is None:
        if required:
            raise ConfigError(full, "missing required field")
        return None
    return data[key]


def _number(data: dict, key: str, path: str, default=None, positive: bool = False) -> float:
    full = f"{path}.{key}"
    raw = _section(data, key, path, required=default is None)
    if raw is None:
        return default
    try:
        value = float(raw)
    except (TypeError, ValueError):
        raise ConfigError(full, f"expected a number, got {raw!r}") from None
    if not math.isfinite(value) or (positive and value <= 0):
        raise ConfigError(full, f"must be {'positive' if positive else 'finite'}")
    return value


def _number_list(data: dict, key: str, path: str, required: bool = True) -> tuple[float, ...]:
    full = f"{path}.{key}"
    raw = _section(data, key, path, required=required)
    if raw is None:
        return ()
    raw = raw if isinstance(raw, list) else [raw]
    if not raw:
        if required:
            raise ConfigError(full, "list must not be empty")
        return ()
    try:
        return tuple(float(v) for v in raw)
    except (TypeError, ValueError):
        raise ConfigError(full, "expected numbers") from None


def parse_config(data: dict) -> StudyConfig:
    """Validate a nested mapping and build a :class:`StudyConfig`."""
    if not isinstance(data, dict):
        raise ConfigError("<root>", "configuration must be a mapping")
    g = _section(data, "geometry")
    geometry = Geometry(*(_number(g, k, "geometry", positive=True) for k in ("L", "b", "h")))
    p = _section(data, "patch")
    patch = Patch(_number(p, "x0", "patch"), _number(p, "L_P", "patch", positive=True), _number(p, "h_P", "patch"))
    m = _section(data, "materials")
    try:
        materials = Materials(*(_number(m, k, "materials") for k in ("E_S", "E_P", "e31", "a33")))
    except ValueError as exc:
        raise ConfigError("materials", str(exc)) from None

    f = _section(data, "fractional")
    frac = FracGrid(_number_list(f, "alpha", "fractional"), _number_list(f, "h_l", "fractional"))
    for a in frac.alpha:
        if not 0 < a <= 1:
            raise ConfigError("fractional.alpha", f"order {a} outside (0, 1]")
    for h in frac.h_l:
        if not 0 < h <= geometry.L:
            raise ConfigError("fractional.h_l", f"horizon {h} outside (0, L]")

    ms = _section(data, "mesh")
    n_el = _number_list(ms, "n_elements", "mesh", required=False)
    n_inf = _number_list(ms, "n_inf", "mesh", required=False)
    if not n_el and not n_inf:
        raise ConfigError("mesh.n_elements", "missing required field (or give mesh.n_inf)")
    if any(n < 2 or n != int(n) for n in n_el):
        raise ConfigError("mesh.n_elements", "element counts must be integers >= 2")
    mesh = MeshSpec(tuple(int(n) for n in n_el), n_inf)

    mode = _section(data, "mode")
    if mode not in MODES:
        raise ConfigError("mode", f"expected one of {MODES}, got {mode!r}")
    bc = _section(data, "bc")
    try:
        bc = BoundaryType(bc).value
    except ValueError:
        raise ConfigError("bc", f"unknown boundary condition {bc!r}") from None

    ld = _section(data, "loads", required=False) or {}
    loads = Loads(*(_number(ld, k, "loads", default=0.0) for k in ("q0", "f_a", "phi0")))

    el = _section(data, "electrodes", required=False)
    electrodes = None
    if el is not None:
        electrodes = ElectrodeSpec(_number(el, "h_e", "electrodes"), _number(el, "E_e", "electrodes", positive=True),
                                   bool(el.get("compare", False)))

    out = _section(data, "outputs", required=False) or {}
    outputs = Outputs(str(out.get("directory", "out")), int(out.get("samples_per_element", 10)))

    cfg = StudyConfig(
        name=str(data.get("name", "case")), geometry=geometry, patch=patch, materials=materials,
        fractional=frac, mesh=mesh, mode=mode, bc=bc, loads=loads, electrodes=electrodes, outputs=outputs,
    )
    _check_resolution(cfg)
    return cfg


def _check_resolution(cfg: StudyConfig):
    for a, h in cfg.grid():
        if a == 1.0:
            continue
        for n in cfg.mesh.elements_for(cfg.geometry.L, h):
            if h * n / cfg.geometry.L < 1.0:
                raise ConfigError("mesh", f"N_inf = h_l/l_e < 1 for h_l={h:g}, {n} elements")


def load_config(path) -> StudyConfig:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("<file>", f"not valid JSON: {exc}") from None
    return parse_config(data)


def dump_config(cfg: StudyConfig) -> str:
    return json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n"


def _base(name: str, h_P: float, patch_length: float, bc: BoundaryType, mode: str, alphas, h_ls, n, q0=1.0,
          phi0=0.0, electrodes=None) -> dict:
    mat = P.PZT5H_ON_BRASS
    cfg = {
        "name": name,
        "geometry": {"L": P.L_REF, "b": P.WIDTH, "h": P.H_SUBSTRATE},
        "patch": {"x0": 0.0, "L_P": patch_length, "h_P": h_P},
        "materials": {"E_S": mat.E_S, "E_P": mat.E_P, "e31": mat.e31, "a33": mat.a33},
        "fractional": {"alpha": list(alphas), "h_l": list(h_ls)},
        "mesh": n,
        "mode": mode,
        "bc": bc.value,
        "loads": {"q0": q0, "f_a": 0.0, "phi0": phi0},
        "outputs": {"directory": f"out/{name}", "samples_per_element": 10},
    }
    if electrodes is not None:
        cfg["electrodes"] = electrodes
    return cfg


def preset(name: str) -> dict:
    """Bundled study configurations reproducing the published studies."""
    L, N = P.L_REF, {"n_elements": [P.N_ELEMENTS]}
    SS, CC, CF = BoundaryType.SIMPLY_SUPPORTED, BoundaryType.CLAMPED_CLAMPED, BoundaryType.CANTILEVER
    table = {
        "table1": lambda: _base("table1", 0.0, L, CC, "converse", P.ALPHAS, [L / 10, L / 5], N),
        "table2": lambda: _base("table2", P.H_PIEZO, L, SS, "direct", P.ALPHAS, [L / 20, L / 10, L / 5], N),
        "table3": lambda: _base("table3", P.H_PIEZO_THICK, L, SS, "direct", P.TABLE3_ALPHAS, [P.TABLE3_H_L], N,
                                electrodes={"h_e": P.ALUMINIUM_ELECTRODES.h_e, "E_e": P.ALUMINIUM_ELECTRODES.E_e,
                                            "compare": True}),
        "table4": lambda: _base("table4", P.H_PIEZO, 0.3 * L, CF, "direct", P.ALPHAS, [L / 20, L / 10, L / 5], N),
        "fig2-convergence": lambda: _base("fig2-convergence", P.H_PIEZO, L, SS, "converse", [0.8], [L / 5],
                                          {"n_inf": [5, 10, 20, 40]}, q0=100.0, phi0=100.0),
        "fig2-convergence-direct": lambda: _base("fig2-convergence-direct", P.H_PIEZO, L, SS, "direct", [0.8],
                                                 [L / 5], {"n_inf": [5, 10, 20, 40]}),
        "layer-actuation": lambda: _base("layer-actuation", P.H_PIEZO, L, SS, "converse", [0.8], [L / 5], N,
                                         q0=100.0, phi0=100.0),
    }
    if name not in table:
        raise ConfigError("preset", f"unknown preset {name!r}; choose from {sorted(table)}")
    return table[name]()


PRESET_NAMES = ("table1", "table2", "table3", "table4", "fig2-convergence", "fig2-convergence-direct",
                "layer-actuation")
