import pytest

from fracpiezo import presets as P
from fracpiezo.model import (
    BoundaryType,
    Electrodes,
    Patch,
    SmartBeamModel,
    electrode_constants,
    layer_moments,
    section_constants,
)


def test_reference_section_constants():
    sc = section_constants(P.layer_beam())
    b, h, hp = P.WIDTH, P.H_SUBSTRATE, P.H_PIEZO
    assert sc.A == pytest.approx(b * h)
    assert sc.I == pytest.approx(b * h**3 / 12)
    assert sc.A_P == pytest.approx(3.2e-7, rel=1e-12)
    assert sc.B_P == pytest.approx(3.04e-11, rel=1e-12)
    assert sc.I_P == pytest.approx(b * ((h / 2 + hp) ** 3 - (h / 2) ** 3) / 3)


def test_layer_moments_about_midplane():
    lm = layer_moments(2.0, -0.5, 0.5)
    assert lm.A == pytest.approx(2.0) and lm.B == pytest.approx(0.0) and lm.I == pytest.approx(2 / 12)


def test_electrode_constants():
    model = P.layer_beam(h_P=P.H_PIEZO_THICK, electrodes=P.ALUMINIUM_ELECTRODES)
    ec = electrode_constants(model)
    assert ec.A == pytest.approx(2 * P.WIDTH * 5e-6)
    assert ec.A == pytest.approx(6.4e-8)
    # piezo layer rides on the lower electrode
    sc = section_constants(model)
    z0 = P.H_SUBSTRATE / 2 + 5e-6
    assert sc.B_P == pytest.approx(P.WIDTH * ((z0 + P.H_PIEZO_THICK) ** 2 - z0**2) / 2)


def test_no_electrodes_zero_constants():
    ec = electrode_constants(P.layer_beam())
    assert (ec.A, ec.B, ec.I) == (0.0, 0.0, 0.0)


def test_bare_beam_has_no_piezo():
    assert not P.bare_beam().has_piezo
    assert P.layer_beam().has_piezo


def test_slenderness():
    assert P.layer_beam().slenderness == pytest.approx(P.L_REF / P.H_SUBSTRATE)


@pytest.mark.parametrize("kwargs", [
    {"L": -1.0},
    {"patch": Patch(0.0, 2.0, 1e-4)},
    {"patch": Patch(-0.1, 0.5, 1e-4)},
])
def test_invalid_models(kwargs):
    base = dict(L=1.0, b=0.01, h=1e-3, patch=Patch(0.0, 0.5, 1e-4), materials=P.PZT5H_ON_BRASS)
    base.update(kwargs)
    with pytest.raises(ValueError):
        SmartBeamModel(**base)


def test_bc_from_string_and_with_frac():
    m = SmartBeamModel(1.0, 0.01, 1e-3, Patch(0, 1, 0), P.PZT5H_ON_BRASS, bc="cantilever")
    assert m.bc is BoundaryType.CANTILEVER
    m2 = m.with_frac(0.8, 0.2)
    assert m2.frac.alpha_m == 0.8 and m2.frac.h_l == 0.2 and m.frac.alpha_m == 1.0


def test_electrodes_shift_nothing_without_them():
    m = P.layer_beam(electrodes=Electrodes(0.0, 68e9))
    assert electrode_constants(m).A == 0.0
