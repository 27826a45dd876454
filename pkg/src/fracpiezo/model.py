"""Smart beam geometry, materials and through-thickness section constants.

The reference axis is the substrate mid-plane (``x3 = 0``); the substrate
occupies ``[-h/2, h/2]`` and the piezo layer sits on its top face.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

from .fracops import FractionalParams


class BoundaryType(str, Enum):
    SIMPLY_SUPPORTED = "simply-supported"
    CLAMPED_CLAMPED = "clamped-clamped"
    CANTILEVER = "cantilever"


@dataclass(frozen=True)
class Materials:
    E_S: float
    E_P: float
    e31: float
    a33: float

    def __post_init__(self):
        if self.E_S <= 0 or self.E_P <= 0 or self.a33 <= 0:
            raise ValueError("moduli and permittivity must be positive")


@dataclass(frozen=True)
class Patch:
    x0: float
    L_P: float
    h_P: float


@dataclass(frozen=True)
class Electrodes:
    h_e: float
    E_e: float


@dataclass(frozen=True)
class SmartBeamModel:
    L: float
    b: float
    h: float
    patch: Patch
    materials: Materials
    frac: FractionalParams = field(default_factory=FractionalParams)
    bc: BoundaryType = BoundaryType.SIMPLY_SUPPORTED
    electrodes: Electrodes | None = None

    def __post_init__(self):
        if min(self.L, self.b, self.h) <= 0:
            raise ValueError("beam dimensions must be positive")
        p = self.patch
        if p.x0 < 0 or p.L_P <= 0 or p.h_P < 0:
            raise ValueError("invalid patch geometry")
        if p.x0 + p.L_P > self.L * (1 + 1e-12):
            raise ValueError("patch extends beyond the beam")
        if not self.frac.h_l <= self.L:
            raise ValueError("horizon length exceeds beam length")
        object.__setattr__(self, "bc", BoundaryType(self.bc))

    @property
    def slenderness(self) -> float:
        return self.L / self.h

    @property
    def has_piezo(self) -> bool:
        return self.patch.h_P > 0

    def with_frac(self, alpha: float, h_l: float) -> SmartBeamModel:
        return replace(self, frac=FractionalParams(alpha_m=alpha, h_l=h_l, alpha_e=self.frac.alpha_e))


@dataclass(frozen=True)
class SectionConstants:
    A: float
    I: float
    A_P: float
    B_P: float
    I_P: float


@dataclass(frozen=True)
class LayerMoments:
    """Width-integrated moments ``b * int z**k dz`` (k = 0, 1, 2) of one layer."""

    A: float
    B: float
    I: float


def layer_moments(b: float, z_bottom: float, z_top: float) -> LayerMoments:
    return LayerMoments(
        A=b * (z_top - z_bottom),
        B=b * (z_top**2 - z_bottom**2) / 2.0,
        I=b * (z_top**3 - z_bottom**3) / 3.0,
    )


def piezo_offset(model: SmartBeamModel) -> float:
    """Height of the piezo layer's bottom face above the mid-plane."""
    h_e = model.electrodes.h_e if model.electrodes is not None else 0.0
    return model.h / 2.0 + h_e


def section_constants(model: SmartBeamModel) -> SectionConstants:
    b, h, hp = model.b, model.h, model.patch.h_P
    z0 = piezo_offset(model)
    pz = layer_moments(b, z0, z0 + hp)
    return SectionConstants(A=b * h, I=b * h**3 / 12.0, A_P=pz.A, B_P=pz.B, I_P=pz.I)


def electrode_constants(model: SmartBeamModel) -> LayerMoments:
    """Combined moments of the two electrode films bracketing the piezo layer."""
    if model.electrodes is None or model.electrodes.h_e == 0:
        return LayerMoments(0.0, 0.0, 0.0)
    b, h, hp, he = model.b, model.h, model.patch.h_P, model.electrodes.h_e
    lower = layer_moments(b, h / 2.0, h / 2.0 + he)
    upper = layer_moments(b, h / 2.0 + he + hp, h / 2.0 + 2 * he + hp)
    return LayerMoments(lower.A + upper.A, lower.B + upper.B, lower.I + upper.I)
