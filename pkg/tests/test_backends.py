import numpy as np
import pytest

from lemnilab import BACKEND
from lemnilab import _kernels_py as py
from lemnilab.errors import SingularityError

cy = pytest.importorskip("lemnilab._kernels")

PAIRS = np.array([[0, 1], [1, 2], [2, 3], [3, 4], [0, 4]])


def config(seed):
    rng = np.random.default_rng(seed)
    ang = 2 * np.pi * np.arange(5) / 5 + rng.uniform(-0.2, 0.2, 5)
    pos = np.stack([np.cos(ang), np.sin(ang)], axis=1) * rng.uniform(0.5, 1.5, (5, 1))
    return pos, rng.normal(size=(5, 2)) * 0.3


def test_compiled_backend_selected():
    assert BACKEND == "cython" and cy.BACKEND == "cython" and py.BACKEND == "python"


@pytest.mark.parametrize("m", [0.0, 0.3, 0.6536604139547734, 0.9999300005380373])
def test_elliptic_kernels_agree(m):
    assert cy.complete_k(m) == pytest.approx(py.complete_k(m), rel=1e-15)
    u = np.linspace(-30, 30, 201)
    assert np.max(np.abs(np.array(cy.jacobi_array(u, m)) - np.array(py.jacobi_array(u, m)))) < 1e-14
    assert np.allclose(cy.jacobi(1.3, m), py.jacobi(1.3, m), atol=1e-15)


def test_kinematics_agree():
    t = np.linspace(-10, 10, 301).reshape(7, 43)
    a = cy.curve_kinematics(t, 0.9, 1.4)
    b = py.curve_kinematics(t, 0.9, 1.4)
    assert a.shape == b.shape == (7, 43, 6)
    assert np.max(np.abs(a - b)) < 1e-13


@pytest.mark.parametrize("seed", range(5))
def test_forces_and_potential_agree(seed):
    pos, _ = config(seed)
    args = (PAIRS, 0.25, 0.01, -0.03)
    assert np.max(np.abs(cy.pair_forces(pos, *args) - py.pair_forces(pos, *args))) < 1e-13
    assert cy.pair_potential(pos, *args) == pytest.approx(py.pair_potential(pos, *args), rel=1e-13)


def test_integrators_agree():
    pos, vel = config(11)
    args = (PAIRS, 0.25, 0.0, -0.02)
    a = cy.yoshida4(pos, vel, *args, 0.01, 300)
    b = py.yoshida4(pos, vel, *args, 0.01, 300)
    assert np.max(np.abs(a[0] - b[0])) < 1e-11
    t_out = np.array([0.0, 0.5, 2.0])
    c = cy.dopri5(pos, vel, *args, 0.0, t_out, 1e-10, 1e-3, 100000)
    d = py.dopri5(pos, vel, *args, 0.0, t_out, 1e-10, 1e-3, 100000)
    assert c[2] == d[2] and c[3] == d[3]
    assert np.max(np.abs(c[0] - d[0])) < 1e-11


@pytest.mark.parametrize("mod", [cy, py], ids=["cython", "python"])
def test_collision_reported_identically(mod):
    pos = np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [3.0, 1.0]])
    with pytest.raises(SingularityError) as info:
        mod.pair_forces(pos, PAIRS, 0.25, 0.0, 0.0)
    assert info.value.pair == (1, 2)
