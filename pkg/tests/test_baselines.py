import numpy as np
import pytest

from fcurrents import synth
from fcurrents.baselines import (colored_current, colored_distance, colored_from_parts, colored_inner_product,
                                 lift_curve, product_distance, product_space_current)
from fcurrents.core import DimensionMismatchError, FCurrent, discrete_mass, scale_atoms
from fcurrents.discretization import discretize
from fcurrents.kernels import KernelConfig, fcurrent_distance, fcurrent_inner_product

CFG = KernelConfig("gaussian", 0.2, "gaussian", 0.5)


def test_zero_signal_vanishes():
    s = synth.ellipse_stain(20).with_signal(np.zeros((20, 1)))
    c = colored_current(s)
    assert not np.any(c.w)
    assert colored_inner_product(CFG, c, c) == 0.0


def test_unit_signal_is_plain_current(rng):
    s = synth.random_polyline(20, rng).with_signal(np.ones((21, 1)))
    c = colored_current(s)
    C = discretize(s)
    assert np.array_equal(c.w, C.xi)
    assert colored_inner_product(CFG, c, c) == pytest.approx(fcurrent_inner_product(CFG.currents_only(), C, C),
                                                             rel=1e-14)


def test_scaling_ambiguity_exact_instance():
    # integer grid positions, xi and signals divisible by 3: every product is exact
    x = np.array([[0.0, 0.0], [1.0, 2.0], [3.0, -1.0]])
    xi = 3.0 * np.array([[1.0, 2.0], [-4.0, 0.0], [5.0, 7.0]])
    f = np.array([2.0, -1.0, 4.0])
    a = colored_from_parts(x, f, xi)
    b = colored_from_parts(x, 3 * f, xi / 3)
    assert a == b
    assert colored_distance(CFG, a, b) == 0.0


def test_scaling_ambiguity_random(rng):
    x, xi, f = rng.normal(size=(50, 3)), rng.normal(size=(50, 3)), rng.normal(size=50)
    a, b = colored_from_parts(x, f, xi, 2), colored_from_parts(x, 3 * f, xi / 3, 2)
    assert np.allclose(a.w, b.w, rtol=1e-15, atol=0)


def test_fcurrent_has_no_ambiguity():
    s = synth.ellipse_stain(40, smooth=True)
    C = discretize(s)
    for r in (0.5, 3.0, -1.0):
        Cr = FCurrent(C.x, C.m * r, C.xi / r)
        assert fcurrent_distance(CFG, C, Cr) > 1e-3
    assert fcurrent_distance(CFG, C, scale_atoms(C, 3.0)) > 0


def test_colored_rejects_vector_signal():
    s = synth.circle(8).with_signal(np.zeros((8, 2)))
    with pytest.raises(DimensionMismatchError):
        colored_current(s)


def test_lift_examples(rng):
    s = synth.random_polyline(15, rng)
    flat = s.with_signal(np.full((16, 1), 2.5))
    assert np.all(lift_curve(flat).vertices[:, 2] == 2.5)
    assert discrete_mass(product_space_current(s)) >= discrete_mass(discretize(s))
    with pytest.raises(DimensionMismatchError):
        product_space_current(synth.sphere_with_caps(4, 6))


def test_disconnection_gap():
    f_d, p_d = [], []
    for gap in (0.1, 0.01, 0.001):
        a, b = synth.gapped_curve_pair(gap)
        f_d.append(fcurrent_distance(CFG, discretize(a), discretize(b)))
        p_d.append(product_distance(CFG, a, b))
    assert f_d[0] > f_d[1] > f_d[2] and f_d[2] <= 1e-2 * f_d[0]
    assert min(p_d) >= 0.5 * p_d[0]
