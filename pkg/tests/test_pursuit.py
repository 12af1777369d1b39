import math

import numpy as np
import pytest

from fcurrents import synth
from fcurrents.core import FCurrent
from fcurrents.discretization import discretize
from fcurrents.kernels import KernelConfig, fcurrent_distance, fcurrent_norm
from fcurrents.pursuit import (MPConfig, MPResult, SingularGramError, _solve_gram, correlation_field, grid_candidates,
                               mp_compress, reconstruct)

CFG = KernelConfig("gaussian", 0.25, "gaussian", 0.5)

SEGMENT_ORTHOGONAL_ATOMS = 7
SEGMENT_GREEDY_ATOMS = 27
SPHERE_CAPS_ATOMS = {0.25: 274, 0.5: 93, 1.0: 41}


def suite():
    rng = np.random.default_rng(21)
    return {
        "segment": discretize(synth.straight_segment(200)),
        "crenel": discretize(synth.crenellated_circle(128, 4)),
        "ellipse": discretize(synth.ellipse_stain(96)),
        "polyline": discretize(synth.random_polyline(100, rng)),
        "bundle": discretize(synth.fiber_bundle(30, 10)),
        "sphere": discretize(synth.sphere_with_caps(8, 12)),
    }


def test_correlation_examples():
    C = FCurrent([[0.3, 0.4]], [[1.0]], [[2.0, -1.0]])
    assert np.array_equal(correlation_field(CFG, C, C.x, C.m), [[2.0, -1.0]])
    D = discretize(synth.ellipse_stain(30))
    far = correlation_field(CFG, D, [[10 * 0.25 + 5, 0.0]], [[0.5]])
    assert np.linalg.norm(far) <= 1e-10 * np.linalg.norm(D.xi, axis=1).sum()


def test_single_atom_recovery():
    C = FCurrent([[0.3, 0.4]], [[1.0]], [[2.0, -1.0]])
    for v in ("orthogonal", "greedy"):
        r = mp_compress(CFG, C, MPConfig(variant=v))
        assert r.n_atoms == 1 and len(r.steps) == 1
        assert r.residual_norms[-1] == 0.0
        P = reconstruct(r)
        assert np.array_equal(P.x, C.x) and np.array_equal(P.m, C.m)
        # the default ridge shrinks coefficients by a factor 1 / (1 + 1e-10)
        assert np.allclose(P.xi, C.xi, rtol=1e-9, atol=0)
    r = mp_compress(CFG, C, MPConfig(ridge=0.0))
    assert reconstruct(r) == C


def test_two_far_atoms():
    C = FCurrent([[0.0, 0.0], [25.0, 0.0]], [[0.0], [1.0]], [[1.0, 0.0], [0.0, 1.0]])
    r = mp_compress(CFG, C, MPConfig(epsilon=1e-9))
    assert r.n_atoms == 2
    assert r.residual_norms[-1] <= 1e-8 * r.residual_norms[0]


def test_reconstruct_empty():
    r = MPResult(FCurrent.empty(2, 1, 1), [0.0], True)
    assert len(reconstruct(r)) == 0


def test_segment_regression():
    C = discretize(synth.straight_segment(200))
    r = mp_compress(CFG, C)
    assert r.converged and r.n_atoms <= 0.15 * len(C)
    assert r.n_atoms == SEGMENT_ORTHOGONAL_ATOMS
    g = mp_compress(CFG, C, MPConfig(variant="greedy", max_atoms=2000))
    assert g.converged and g.n_atoms == SEGMENT_GREEDY_ATOMS


@pytest.mark.parametrize("lg", sorted(SPHERE_CAPS_ATOMS))
def test_sphere_caps_regression(lg):
    C = discretize(synth.sphere_with_caps())
    r = mp_compress(KernelConfig("gaussian", lg, "gaussian", 0.5), C)
    assert r.converged and r.n_atoms == SPHERE_CAPS_ATOMS[lg]


@pytest.mark.parametrize("name", list(suite()))
@pytest.mark.parametrize("variant", ["orthogonal", "greedy"])
def test_residual_properties(name, variant):
    C = suite()[name]
    r = mp_compress(CFG, C, MPConfig(variant=variant, max_atoms=400))
    res = np.array(r.residual_norms)
    assert res[0] == pytest.approx(fcurrent_norm(CFG, C), rel=1e-14)
    assert np.all(np.diff(res) <= 1e-12 * res[0])
    if variant == "orthogonal":
        assert np.all(np.diff(res) < 0)
    # the tracked residual equals the true distance to the reconstruction
    assert fcurrent_distance(CFG, C, reconstruct(r)) == pytest.approx(res[-1], rel=1e-6, abs=1e-9 * res[0])


@pytest.mark.parametrize("name", list(suite()))
def test_orthogonality_and_pythagoras(name):
    C = suite()[name]
    norm_c = fcurrent_norm(CFG, C)
    r = mp_compress(CFG, C, MPConfig(max_atoms=400))
    P = reconstruct(r)
    gamma = correlation_field(CFG, C, P.x, P.m, selected=P)
    assert np.abs(gamma).max() <= 1e-8 * norm_c
    lhs = norm_c ** 2
    rhs = fcurrent_norm(CFG, P) ** 2 + fcurrent_distance(CFG, C, P) ** 2
    assert abs(lhs - rhs) <= 1e-8 * lhs


def test_orthogonality_every_step():
    C = suite()["ellipse"]
    norm_c = fcurrent_norm(CFG, C)
    for n in range(1, 12):
        r = mp_compress(CFG, C, MPConfig(epsilon=1e-6, max_atoms=n))
        P = reconstruct(r)
        assert np.abs(correlation_field(CFG, C, P.x, P.m, selected=P)).max() <= 1e-8 * norm_c


def test_wider_kernel_never_needs_more_atoms():
    for name, C in suite().items():
        counts = [mp_compress(KernelConfig("gaussian", lg, "gaussian", 0.5), C).n_atoms for lg in (0.05, 0.1, 0.2, 0.4)]
        assert all(a >= b for a, b in zip(counts, counts[1:])), (name, counts)


def test_step_log_and_callback():
    C = suite()["crenel"]
    seen = []
    r = mp_compress(CFG, C, callback=seen.append)
    assert seen == r.steps
    assert [s.step for s in r.steps] == list(range(1, r.n_atoms + 1))
    assert all(math.isclose(s.residual_ratio, q / r.residual_norms[0]) for s, q in zip(r.steps, r.residual_norms[1:]))


def test_grid_dictionary():
    C = suite()["ellipse"]
    cx, cm = grid_candidates(C, 0.1, 0.25)
    assert cx.shape[1] == 2 and len(cx) == len(cm)
    r = mp_compress(CFG, C, MPConfig(dictionary="grid", grid_spacing=0.1, grid_signal_spacing=0.25))
    assert r.converged
    res = np.array(r.residual_norms)
    assert np.all(np.diff(res) < 0)
    with pytest.raises(ValueError):
        MPConfig(dictionary="grid")


def test_config_validation_and_errors():
    for kw in ({"epsilon": 0}, {"epsilon": 1.5}, {"max_atoms": 0}, {"variant": "x"}, {"ridge": -1}):
        with pytest.raises(ValueError):
            MPConfig(**kw)
    with pytest.raises(ValueError):
        mp_compress(CFG, FCurrent.empty(2, 1, 1))
    with pytest.raises(SingularGramError, match="condition number"):
        _solve_gram(np.ones((2, 2)), np.ones((2, 1)), 0.0)
    # coincident supports: default ridge keeps the solve well posed
    C = FCurrent([[0, 0], [0, 0], [1, 0]], [[0], [0], [0]], [[1, 0], [0, 1], [1, 1]])
    r = mp_compress(CFG, C, MPConfig(epsilon=1e-6))
    assert r.converged
