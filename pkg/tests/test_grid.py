import numpy as np
import pytest
from hypothesis import given, strategies as st

from maxplus_ifs.errors import OutOfDomain
from maxplus_ifs.grid import UniformGrid, discretize_map, project, project_points
from maxplus_ifs.ifs import AffineMap


def test_project_examples():
    assert project(0.2503, UniformGrid(1, 1000)) == 250
    assert project(0.25, UniformGrid(1, 2)) == 1
    assert project((1.0, 0.0), UniformGrid(2, 256)) == (256, 0)
    assert project(1.0 + 1e-12, UniformGrid(1, 10)) == 10


def test_project_out_of_domain():
    with pytest.raises(OutOfDomain):
        project(1.01, UniformGrid(1, 10))
    assert project(1.01, UniformGrid(1, 10), clamp=True) == 10


def test_discretize_examples():
    assert discretize_map(AffineMap.line(0.5, 0.5), UniformGrid(1, 4))[2] == 3
    assert discretize_map(AffineMap.line(0.25, 0.25), UniformGrid(1, 10))[5] == 4
    const = discretize_map(AffineMap.line(0.0, 0.3), UniformGrid(1, 10))
    assert set(const.tolist()) == {3}


def test_table_is_read_only():
    t = discretize_map(AffineMap.line(0.5, 0.0), UniformGrid(1, 8))
    with pytest.raises(ValueError):
        t[0] = 1


@given(st.integers(2, 400), st.floats(0, 1))
def test_projection_error_within_half_mesh(M, x):
    g = UniformGrid(1, M)
    i = project(x, g)
    assert abs(x - i / M) <= g.epsilon + 1e-12


@given(st.integers(2, 300))
def test_project_idempotent_on_grid(M):
    g = UniformGrid(1, M)
    idx = np.arange(M + 1)
    assert np.array_equal(project_points(g.value(idx)[:, None], g)[:, 0], idx)


@given(st.integers(2, 40), st.floats(-0.9, 0.9), st.floats(-0.9, 0.9), st.floats(0, 0.05))
def test_discretized_map_error_bound_2d(M, a, b, c):
    # scaled to keep the image inside the square
    A = ((a / 4, b / 4), (c, -c))
    phi = AffineMap.planar(A, (0.5, 0.5))
    g = UniformGrid(2, M)
    images = phi(g.coordinates())
    table = discretize_map(phi, g)
    snapped = g.coordinates()[table]
    assert np.abs(images - snapped).max() <= g.epsilon + 1e-12


def test_flat_layout_matches_ravel():
    g = UniformGrid(2, 5)
    coords = g.coordinates()
    assert coords[1 * 6 + 4].tolist() == [0.2, 0.8]
    assert np.array_equal(g.unflat(g.flat(np.array([[3, 2]]))), [[3, 2]])
