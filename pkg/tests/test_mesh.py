import logging

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fracpiezo.fracops import DomainError
from fracpiezo.mesh import ConfigurationError, DofMap, build_mesh, hermite_eval, lagrange_eval, locate_element


def test_uniform_nodes():
    m = build_mesh(2.0, 4)
    assert np.allclose(m.node_coords, [0, 0.5, 1, 1.5, 2])
    assert m.element_length == 0.5 and m.n_nodes == 5


def test_patch_snapped_to_nodes(caplog):
    with caplog.at_level(logging.WARNING):
        m = build_mesh(1.0, 10, (0.12, 0.31))
    assert (m.patch_start_node, m.patch_end_node) == (1, 4)
    assert "snapped" in caplog.text


def test_exact_patch_no_warning(caplog):
    with caplog.at_level(logging.WARNING):
        m = build_mesh(1.0, 10, (0.0, 0.3))
    assert m.patch_range == pytest.approx((0.0, 0.3))
    assert caplog.text == ""


@pytest.mark.parametrize("args", [(1.0, 1), (0.0, 10), (1.0, 10, (0.5, 0.01)), (1.0, 10, (0.5, 0.8))])
def test_invalid(args):
    with pytest.raises(ConfigurationError):
        build_mesh(*args)


def test_n_inf():
    assert build_mesh(1.0, 500).n_inf(0.2) == pytest.approx(100.0)


def test_lagrange_partition_of_unity():
    v, d = lagrange_eval(0.3, 2.0)
    assert v.sum() == pytest.approx(1.0) and d.sum() == pytest.approx(0.0)


@given(st.floats(0, 1), st.floats(0.1, 3))
def test_hermite_reproduces_cubics(xi, le):
    # w(x) = x**3 on an element starting at 0
    x = xi * le
    dofs = np.array([0.0, 0.0, le**3, 3 * le**2])
    v, d1, d2 = hermite_eval(xi, le)
    assert v @ dofs == pytest.approx(x**3, abs=1e-12 * max(1, le**3))
    assert d1 @ dofs == pytest.approx(3 * x**2, abs=1e-10 * max(1, le**2))
    assert d2 @ dofs == pytest.approx(6 * x, abs=1e-9 * max(1, le))


def test_locate_element():
    m = build_mesh(1.0, 4)
    assert locate_element(0.0, m) == 0
    assert locate_element(0.25, m) == 1
    assert locate_element(1.0, m) == 3
    with pytest.raises(DomainError):
        locate_element(1.5, m)


def test_dof_layout():
    m = build_mesh(1.0, 10, (0.2, 0.3))
    d = DofMap(m, with_phi=True)
    assert (d.n_u, d.n_w, d.n_phi) == (11, 22, 4)
    assert d.total == 37
    assert d.w(3) == 11 + 6 and d.theta(3) == 11 + 7
    assert d.phi(2) == 33 and d.phi(5) == 36
    with pytest.raises(ConfigurationError):
        d.phi(6)
    with pytest.raises(ConfigurationError):
        DofMap(m).phi(2)
