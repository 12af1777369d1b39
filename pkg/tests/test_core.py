import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fcurrents.core import (DimensionMismatchError, DiracFCurrent, FCurrent, FunctionalShape, InvalidShapeError,
                            discrete_mass, scale_atoms, validate_shape, volume_dim)

TRI = FunctionalShape([[0, 0, 0], [1, 0, 0], [0, 1, 0]], [[0, 1, 2]], [0, 0, 3], 2)


def test_valid_triangle_has_no_violations():
    assert validate_shape(TRI) == []


def test_repeated_index_is_degenerate():
    s = FunctionalShape(TRI.vertices, [[0, 0, 1]], TRI.signal, 2)
    assert validate_shape(s) == ["degenerate cell 0"]


def test_short_signal():
    s = FunctionalShape(TRI.vertices, TRI.cells, [[0.0], [1.0]], 2)
    assert validate_shape(s) == ["signal length mismatch"]


def test_other_violations():
    s = FunctionalShape([[0, 0], [1, 0]], [[0, 5]], [1.0, np.nan])
    v = validate_shape(s)
    assert "cell index out of range in cell 0" in v
    assert "non-finite signal values" in v
    with pytest.raises(InvalidShapeError) as e:
        s.check()
    assert e.value.violations == v
    assert validate_shape(FunctionalShape(np.zeros((3, 2)), [[0, 1, 2]], np.zeros(3), 2))[0].startswith("unsupported")


def test_shape_is_immutable_copy():
    v = np.array([[0.0, 0.0], [1.0, 0.0]])
    s = FunctionalShape(v, [[0, 1]], [0.0, 1.0])
    v[0, 0] = 5
    assert s.vertices[0, 0] == 0
    with pytest.raises(ValueError):
        s.vertices[0, 0] = 1


def test_volume_dim():
    assert volume_dim(2, 1) == 2 and volume_dim(3, 1) == 3 and volume_dim(3, 2) == 3
    with pytest.raises(DimensionMismatchError):
        volume_dim(2, 2)


def test_mass_examples():
    assert discrete_mass(FCurrent([[0, 0]], [[0]], [[3, 4]])) == 5.0
    assert discrete_mass(FCurrent.empty(2, 1, 1)) == 0.0
    assert discrete_mass(FCurrent([[0, 0], [1, 1]], [[0], [0]], [[1, 0], [0, 1]])) == 2.0


def test_scale_examples():
    C = FCurrent([[0, 0]], [[0]], [[1, 0]])
    assert scale_atoms(C, 1) == C
    assert np.array_equal(scale_atoms(C, 2).xi, [[2, 0]])
    with pytest.raises(ValueError):
        scale_atoms(C, 0)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 20), st.floats(-1e3, 1e3).filter(lambda r: abs(r) > 1e-3), st.integers(0, 2**31))
def test_mass_homogeneous(N, r, seed):
    rng = np.random.default_rng(seed)
    C = FCurrent(rng.normal(size=(N, 3)), rng.normal(size=(N, 2)), rng.normal(size=(N, 3)), 2)
    # oracle: recompute norms directly
    expected = abs(r) * sum(np.sqrt(np.sum(row ** 2)) for row in C.xi)
    assert discrete_mass(scale_atoms(C, r)) == pytest.approx(expected, rel=1e-12)


def test_fcurrent_shape_checks():
    with pytest.raises(DimensionMismatchError):
        FCurrent([[0, 0]], [[0]], [[1, 0, 0]])
    with pytest.raises(DimensionMismatchError):
        FCurrent([[0, 0], [1, 1]], [[0]], [[1, 0], [0, 1]])


def test_atoms_roundtrip():
    C = FCurrent([[0, 0], [1, 2]], [[0.5], [1.5]], [[1, 0], [0, 1]])
    atoms = C.atoms
    assert isinstance(atoms[0], DiracFCurrent)
    assert FCurrent.from_atoms(atoms) == C
    assert len(C.concat(C, -1)) == 4
    assert np.array_equal(C[1].x, [1, 2])
