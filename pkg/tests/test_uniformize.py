import math

import numpy as np
import pytest

from _support import random_class_point, random_genus2_in_N, random_in_N
from idealdisk import angles as ang
from idealdisk import uniformize as un
from idealdisk.errors import MaxIterExceeded, NotInN
from idealdisk.hypvol import prism_volume
from idealdisk.meshes import fan_disk, genus2_octagon, single_triangle

PI = math.pi


@pytest.fixture(scope="module")
def g2():
    return genus2_octagon()


@pytest.fixture(scope="module")
def basis(g2):
    return ang.conformal_basis(g2)


def test_objective_uniform(g2):
    x = np.full(18, PI / 9)
    assert un.objective(g2, x) == pytest.approx(6 * prism_volume(PI / 9, PI / 9, PI / 9), abs=1e-13)


def test_objective_requires_angle_system(g2):
    x = np.full(18, PI / 9)
    x[0] = 0.0
    x[1] += PI / 9
    with pytest.raises(NotInN):
        un.objective(g2, x)


def test_gradient_zero_at_uniform(g2):
    assert np.abs(un.gradient(g2, np.full(18, PI / 9))).max() < 1e-14


def test_gradient_two_forms_agree(g2, basis):
    rng = np.random.default_rng(0)
    for _ in range(30):
        x = random_genus2_in_N(rng)
        assert np.allclose(un.gradient(g2, x), un.gradient_from_prisms(g2, x, basis), atol=1e-11)


def test_gradient_sign(g2):
    # g_e < 0 exactly when the -1 side of w_e carries the longer copy of e
    rng = np.random.default_rng(1)
    for _ in range(30):
        x = random_genus2_in_N(rng)
        L = un.side_lengths(x).ravel()
        g = un.gradient(g2, x)
        for k, e in enumerate(g2.interior_edges):
            first, second = g2.edges[e].sides
            if L[second] > L[first]:
                assert g[k] < 0
            elif L[second] < L[first]:
                assert g[k] > 0


def test_gradient_finite_differences(g2, basis):
    rng = np.random.default_rng(2)
    h = 1e-5
    for _ in range(20):
        x = random_genus2_in_N(rng)
        g = un.gradient(g2, x)
        fd = np.array(
            [
                (un.objective(g2, x + h * basis.w(e)) - un.objective(g2, x - h * basis.w(e))) / (2 * h)
                for e in basis.interior
            ]
        )
        assert np.abs(g - fd).max() <= 1e-5 * np.abs(g).max()


def test_coordinate_hessian_matches_fd(g2, basis):
    rng = np.random.default_rng(3)
    x = random_genus2_in_N(rng)
    H = un.coordinate_hessian(g2, x, basis)
    h = 1e-6
    fd = np.empty_like(H)
    for k, e in enumerate(basis.interior):
        fd[:, k] = (un.gradient(g2, x + h * basis.w(e)) - un.gradient(g2, x - h * basis.w(e))) / (2 * h)
    assert np.abs(H - fd).max() <= 1e-5 * np.abs(H).max()
    assert np.linalg.eigvalsh(0.5 * (H + H.T)).max() < 0


def test_concave_on_random_slice(g2, basis):
    rng = np.random.default_rng(4)
    x = random_genus2_in_N(rng)
    d1, d2 = basis.W @ rng.normal(size=9), basis.W @ rng.normal(size=9)
    d1 /= np.abs(d1).max()
    d2 /= np.abs(d2).max()
    h = 1e-3
    f = lambda a, b: un.objective(g2, x + a * d1 + b * d2)  # noqa: E731
    fd = np.array(
        [
            [(f(h, 0) - 2 * f(0, 0) + f(-h, 0)) / h**2, (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4 * h * h)],
            [0.0, (f(0, h) - 2 * f(0, 0) + f(0, -h)) / h**2],
        ]
    )
    fd[1, 0] = fd[0, 1]
    assert np.linalg.eigvalsh(fd).max() < 0


def test_maximize_at_solution(g2):
    u = un.maximize(g2, np.full(18, PI / 9))
    assert u.iterations == 0 and u.residual == 0.0


def test_maximize_recovers_symmetric_solution(g2, basis):
    rng = np.random.default_rng(5)
    x0 = basis.deform(np.full(18, PI / 9), rng.uniform(-0.05, 0.05, 9))
    u = un.maximize(g2, x0)
    assert u.residual <= 1e-10
    assert np.abs(u.angles - PI / 9).max() <= 1e-7
    # every accepted step raised the objective, up to summation roundoff
    diffs = np.diff(u.history)
    assert np.all(diffs > -1e-12)
    assert u.history[-1] > u.history[0]
    # class preserved
    assert np.abs(ang.psi_edges(g2, u.angles) - ang.psi_edges(g2, x0)).max() <= 1e-9
    assert np.allclose(basis.deform(x0, u.conformal_coords), u.angles, atol=1e-14)
    assert u.gradient_residual < 1e-9
    assert u.lengths.shape == (6, 3)


@pytest.mark.parametrize("mode", ["bfgs", "gradient"])
def test_other_modes(g2, basis, mode):
    rng = np.random.default_rng(6)
    x0 = basis.deform(np.full(18, PI / 9), rng.uniform(-0.05, 0.05, 9))
    cfg = un.SolverConfig(hessian_mode=mode)
    u = un.maximize(g2, x0, cfg)
    assert u.residual <= cfg.tol_residual
    assert np.abs(u.angles - PI / 9).max() <= 1e-7


def test_uniqueness_in_random_class(g2, basis):
    rng = np.random.default_rng(7)
    x = random_genus2_in_N(rng)
    y1 = random_class_point(g2, x, basis, rng, 0.2)
    y2 = random_class_point(g2, x, basis, rng, 0.2)
    u1, u2 = un.maximize(g2, y1), un.maximize(g2, y2)
    assert np.abs(u1.angles - u2.angles).max() <= 1e-6


def test_maximize_errors(g2, basis):
    x = np.full(18, PI / 9)
    x[0] = -0.1
    x[1] += 0.1
    with pytest.raises(NotInN):
        un.maximize(g2, x)
    rng = np.random.default_rng(8)
    x0 = basis.deform(np.full(18, PI / 9), rng.uniform(-0.05, 0.05, 9))
    with pytest.raises(MaxIterExceeded) as info:
        un.maximize(g2, x0, un.SolverConfig(max_iter=1))
    details = info.value.details
    assert "smallest_angle_per_triangle" in details and "largest_curvature" in details


def test_single_triangle_class_is_a_point():
    td = single_triangle({"0": 0.3, "1": 0.4, "2": 0.5})
    u = un.maximize(td, np.array([0.3, 0.4, 0.5]))
    assert u.iterations == 0 and u.conformal_coords.size == 0
    assert u.objective == pytest.approx(prism_volume(0.3, 0.4, 0.5))


def test_disk_with_corner_targets():
    targets = {str(v): (2 * PI if v == 0 else PI / 4) for v in range(8)}
    td = fan_disk(7, targets)
    rng = np.random.default_rng(9)
    x0 = random_in_N(td, rng)
    u = un.maximize(td, x0)
    assert u.residual <= 1e-10
    assert np.allclose(ang.vertex_sums(td, u.angles), td.vertex_targets, atol=1e-12)


def test_solver_config_validation():
    with pytest.raises(ValueError):
        un.SolverConfig(tol_residual=0.1)
    with pytest.raises(ValueError):
        un.SolverConfig(max_iter=0)
    with pytest.raises(ValueError):
        un.SolverConfig(hessian_mode="lbfgs")
    with pytest.raises(ValueError):
        un.SolverConfig(backtrack=1.5)
