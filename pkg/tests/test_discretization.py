import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fcurrents import synth
from fcurrents.core import FunctionalShape, InvalidShapeError, discrete_mass
from fcurrents.discretization import DegenerateCellWarning, discretize, discretize_curve, discretize_surface, refine_curve
from fcurrents.kernels import KernelConfig, fcurrent_distance


def test_curve_by_hand():
    s = FunctionalShape([[0, 0], [1, 0], [2, 0]], [[0, 1], [1, 2]], [0, 1, 2])
    C = discretize_curve(s)
    assert np.array_equal(C.x, [[0.5, 0], [1.5, 0]])
    assert np.array_equal(C.xi, [[1, 0], [1, 0]])
    assert np.array_equal(C.m, [[0.5], [1.5]])


def test_zero_length_edge_dropped():
    s = FunctionalShape([[1, 1], [1, 1]], [[0, 1]], [0, 0])
    with pytest.warns(DegenerateCellWarning):
        C = discretize_curve(s)
    assert len(C) == 0 and C.dropped == 1


def test_triangle_by_hand():
    s = FunctionalShape([[0, 0, 0], [1, 0, 0], [0, 1, 0]], [[0, 1, 2]], [0, 0, 3], 2)
    C = discretize_surface(s)
    assert np.allclose(C.x, [[1 / 3, 1 / 3, 0]], rtol=0, atol=1e-16)
    assert np.array_equal(C.xi, [[0, 0, 0.5]])
    assert np.array_equal(C.m, [[1.0]])


def test_wrong_kind_and_invalid():
    sq = synth.unit_square()
    with pytest.raises(InvalidShapeError):
        discretize_curve(sq)
    with pytest.raises(InvalidShapeError):
        discretize(FunctionalShape([[0, 0], [1, 0]], [[0, 2]], [0, 0]))


def test_degenerate_triangle_dropped():
    s = FunctionalShape([[0, 0, 0], [1, 0, 0], [2, 0, 0], [0, 1, 0]], [[0, 1, 2], [0, 1, 3]], np.zeros(4), 2)
    with pytest.warns(DegenerateCellWarning):
        C = discretize(s)
    assert len(C) == 1 and C.dropped == 1


def test_no_atom_below_threshold(rng):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateCellWarning)
        for _ in range(10):
            s = synth.random_polyline(30, rng)
            C = discretize(s)
            assert np.all(np.linalg.norm(C.xi, axis=1) > 1e-12 * s.diameter())


def test_orientation_flip(rng):
    for s in (synth.random_polyline(20, rng), synth.sphere_with_caps(6, 8)):
        a, b = discretize(s), discretize(s.flipped())
        assert np.array_equal(a.xi, -b.xi)
        assert np.allclose(a.x, b.x, atol=1e-15)
        assert np.allclose(a.m, b.m, atol=1e-15)


def _rotation3(rng):
    Q, R = np.linalg.qr(rng.normal(size=(3, 3)))
    Q *= np.sign(np.diag(R))
    if np.linalg.det(Q) < 0:
        Q[:, 0] *= -1
    return Q


def test_rigid_motion_equivariance(rng):
    th = 0.7
    R2 = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    s = synth.random_polyline(25, rng)
    t = np.array([0.3, -2.0])
    a, b = discretize(s), discretize(s.with_vertices(s.vertices @ R2.T + t))
    assert np.allclose(b.x, a.x @ R2.T + t, atol=1e-13)
    assert np.allclose(b.xi, a.xi @ R2.T, atol=1e-13)
    assert np.array_equal(a.m, b.m)
    R3 = _rotation3(rng)
    s = synth.sphere_with_caps(8, 12)
    a, b = discretize(s), discretize(s.with_vertices(s.vertices @ R3.T + 1.0))
    assert np.allclose(b.x, a.x @ R3.T + 1.0, atol=1e-13)
    assert np.allclose(b.xi, a.xi @ R3.T, atol=1e-13)


def test_mass_is_length_and_area(rng):
    s = synth.random_polyline(40, rng)
    length = sum(np.linalg.norm(s.vertices[j] - s.vertices[i]) for i, j in s.cells)
    assert discrete_mass(discretize(s)) == pytest.approx(length, rel=1e-12)
    sq = synth.unit_square()
    assert discrete_mass(discretize(sq)) == pytest.approx(1.0, rel=1e-12)
    S = synth.sphere_with_caps(8, 12)
    v = S.vertices[S.cells]
    area = sum(0.5 * np.linalg.norm(np.cross(t[1] - t[0], t[2] - t[0])) for t in v)
    assert discrete_mass(discretize(S)) == pytest.approx(area, rel=1e-12)


def test_refine_one_edge():
    s = FunctionalShape([[0, 0], [2, 0]], [[0, 1]], [0, 4])
    r = refine_curve(s, 2)
    assert r.n_vertices == 3 and len(r.cells) == 2
    assert np.array_equal(r.vertices[2], [1, 0])
    assert r.signal[2, 0] == 2.0
    assert np.array_equal(r.cells, [[0, 2], [2, 1]])
    for bad in (1, 0, 2.5):
        with pytest.raises(ValueError):
            refine_curve(s, bad)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 9), st.integers(0, 2**31))
def test_refine_keeps_mass(factor, seed):
    s = synth.random_polyline(15, np.random.default_rng(seed))
    assert discrete_mass(discretize(refine_curve(s, factor))) == pytest.approx(discrete_mass(discretize(s)), rel=1e-12)


def test_refinement_approaches_reference():
    cfg = KernelConfig("gaussian", 0.3, "gaussian", 0.5)
    coarse = synth.circle(32, signal=lambda t: np.cos(3 * t))
    ref = discretize(refine_curve(coarse, 64))
    d = [fcurrent_distance(cfg, discretize(refine_curve(coarse, f)), ref) for f in (2, 4, 8, 16)]
    assert all(a > b for a, b in zip(d, d[1:]))
