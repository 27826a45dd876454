"""Reference beam configurations and published table values."""

from __future__ import annotations

from .fracops import FractionalParams
from .model import BoundaryType, Electrodes, Materials, Patch, SmartBeamModel

L_REF = 24.53e-3
WIDTH = 6.4e-3
H_SUBSTRATE = 0.14e-3
H_PIEZO = 0.05e-3
H_PIEZO_THICK = 0.265e-3

PZT5H_ON_BRASS = Materials(E_S=105e9, E_P=60.6e9, e31=16.604, a33=0.26e-7)
ALUMINIUM_ELECTRODES = Electrodes(h_e=5e-6, E_e=68e9)

N_ELEMENTS = 500
ALPHAS = (1.0, 0.9, 0.8, 0.7)


def layer_beam(alpha: float = 1.0, h_l: float = L_REF / 5, h_P: float = H_PIEZO,
               bc=BoundaryType.SIMPLY_SUPPORTED, electrodes: Electrodes | None = None) -> SmartBeamModel:
    """Piezo layer covering the whole substrate."""
    return SmartBeamModel(
        L=L_REF, b=WIDTH, h=H_SUBSTRATE,
        patch=Patch(x0=0.0, L_P=L_REF, h_P=h_P),
        materials=PZT5H_ON_BRASS,
        frac=FractionalParams(alpha_m=alpha, h_l=h_l),
        bc=bc, electrodes=electrodes,
    )


def patch_cantilever(alpha: float = 1.0, h_l: float = L_REF / 5, L_P: float = 0.3 * L_REF) -> SmartBeamModel:
    """Cantilever with a piezo patch at the clamped end."""
    return SmartBeamModel(
        L=L_REF, b=WIDTH, h=H_SUBSTRATE,
        patch=Patch(x0=0.0, L_P=L_P, h_P=H_PIEZO),
        materials=PZT5H_ON_BRASS,
        frac=FractionalParams(alpha_m=alpha, h_l=h_l),
        bc=BoundaryType.CANTILEVER,
    )


def bare_beam(alpha: float = 1.0, h_l: float = L_REF / 5, bc=BoundaryType.CLAMPED_CLAMPED) -> SmartBeamModel:
    """Elastic substrate alone (zero piezo thickness)."""
    return SmartBeamModel(
        L=L_REF, b=WIDTH, h=H_SUBSTRATE,
        patch=Patch(x0=0.0, L_P=L_REF, h_P=0.0),
        materials=PZT5H_ON_BRASS,
        frac=FractionalParams(alpha_m=alpha, h_l=h_l),
        bc=bc,
    )


# normalized midspan deflection, clamped-clamped bare beam; keyed by L/h_l
TABLE1 = {
    10: {1.0: 1.0000, 0.9: 1.0243, 0.8: 1.0456, 0.7: 1.0673},
    5: {1.0: 1.0000, 0.9: 1.0720, 0.8: 1.1401, 0.7: 1.2098},
}

# V_rms (V), simply supported layer beam, q0 = 1 N/m
TABLE2 = {
    20: {1.0: 0.4512, 0.9: 0.4526, 0.8: 0.4538, 0.7: 0.4548},
    10: {1.0: 0.4512, 0.9: 0.4527, 0.8: 0.4539, 0.7: 0.4550},
    5: {1.0: 0.4512, 0.9: 0.4543, 0.8: 0.4573, 0.7: 0.4606},
}

# V_rms (V) with thick piezo layer, without / with electrodes
TABLE3_ALPHAS = (1.0, 0.99, 0.9, 0.8, 0.7)
TABLE3_H_L = L_REF / 5  # horizon not published for this study
TABLE3 = {
    "without": {1.0: 0.4341, 0.99: 0.4343, 0.9: 0.4362, 0.8: 0.4380, 0.7: 0.4397},
    "with": {1.0: 0.4053, 0.99: 0.4056, 0.9: 0.4073, 0.8: 0.4090, 0.7: 0.4106},
    "difference_pct": {1.0: 6.63, 0.99: 6.60, 0.9: 6.62, 0.8: 6.62, 0.7: 6.62},
}

# V_rms (V), cantilever with patch on [0, 0.3 L], q0 = 1 N/m
TABLE4 = {
    20: {1.0: 0.9296, 0.9: 0.9284, 0.8: 0.9254, 0.7: 0.9224},
    10: {1.0: 0.9296, 0.9: 0.9241, 0.8: 0.9162, 0.7: 0.9087},
    5: {1.0: 0.9296, 0.9: 0.9185, 0.8: 0.9033, 0.7: 0.8879},
}
