"""Data model: functional shapes, Dirac fcurrents and finite fcurrent sums.

A functional shape is a polyline or a triangle mesh carrying one signal
vector per vertex. Its discrete fcurrent is a list of atoms
``delta_{(x, m)}^{xi}`` stored column-wise as three arrays.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

SUPPORTED_DIMS = {(2, 1), (3, 1), (3, 2)}


class InvalidShapeError(ValueError):
    """Raised when a shape fails validation; carries the violation list."""

    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class DimensionMismatchError(ValueError):
    pass


def _frozen(a, dtype=float, ndim=2) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True)
    if arr.ndim == 1 and ndim == 2:
        arr = arr.reshape(-1, 1) if arr.size else arr.reshape(0, 0)
    arr.setflags(write=False)
    return arr


def volume_dim(ambient_dim: int, manifold_dim: int) -> int:
    """Length of the stored volume element: the tangent for curves, the
    cross-product normal for surfaces in 3D."""
    if (ambient_dim, manifold_dim) not in SUPPORTED_DIMS:
        raise DimensionMismatchError(
            f"unsupported (ambient_dim, manifold_dim) = ({ambient_dim}, {manifold_dim})")
    return ambient_dim if manifold_dim == 1 else 3


@dataclass(frozen=True, eq=False)
class FunctionalShape:
    """A mesh (polyline if ``manifold_dim == 1``, triangles if 2) with one
    signal vector per vertex.

    Arrays are copied and made read-only on construction. Construction does
    not validate; call :func:`validate_shape` or :meth:`check`.
    """

    vertices: np.ndarray
    cells: np.ndarray
    signal: np.ndarray
    manifold_dim: int = 1

    def __post_init__(self):
        vertices = np.array(self.vertices, dtype=float)
        if vertices.ndim != 2:
            raise DimensionMismatchError("vertices must be a 2D array (n_vertices, ambient_dim)")
        object.__setattr__(self, "vertices", _frozen(vertices))
        cells = np.array(self.cells, dtype=np.int64)
        if cells.size == 0:
            cells = cells.reshape(0, self.manifold_dim + 1)
        object.__setattr__(self, "cells", _frozen(cells, dtype=np.int64))
        signal = np.array(self.signal, dtype=float)
        if signal.ndim == 1:
            signal = signal.reshape(-1, 1)
        object.__setattr__(self, "signal", _frozen(signal))

    @property
    def ambient_dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def signal_dim(self) -> int:
        return self.signal.shape[1]

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    def diameter(self) -> float:
        """Bounding-box diagonal of the vertex set."""
        if self.n_vertices == 0:
            return 0.0
        return float(np.linalg.norm(self.vertices.max(0) - self.vertices.min(0)))

    def check(self) -> "FunctionalShape":
        violations = validate_shape(self)
        if violations:
            raise InvalidShapeError(violations)
        return self

    def with_vertices(self, vertices) -> "FunctionalShape":
        return FunctionalShape(vertices, self.cells, self.signal, self.manifold_dim)

    def with_signal(self, signal) -> "FunctionalShape":
        return FunctionalShape(self.vertices, self.cells, signal, self.manifold_dim)

    def flipped(self) -> "FunctionalShape":
        """Same shape with every cell orientation reversed."""
        cells = self.cells.copy()
        if self.manifold_dim == 1:
            cells = cells[:, ::-1]
        else:
            cells[:, [1, 2]] = cells[:, [2, 1]]
        return FunctionalShape(self.vertices, cells, self.signal, self.manifold_dim)

    def __eq__(self, other):
        if not isinstance(other, FunctionalShape):
            return NotImplemented
        return (self.manifold_dim == other.manifold_dim
                and np.array_equal(self.vertices, other.vertices)
                and np.array_equal(self.cells, other.cells)
                and np.array_equal(self.signal, other.signal))

    __hash__ = None


def validate_shape(shape: FunctionalShape) -> list[str]:
    """Return the list of invariant violations of ``shape`` (empty if valid)."""
    out = []
    n, d = shape.ambient_dim, shape.manifold_dim
    if (n, d) not in SUPPORTED_DIMS:
        out.append(f"unsupported dimensions (ambient_dim={n}, manifold_dim={d})")
    if shape.cells.ndim != 2 or shape.cells.shape[1] != d + 1:
        out.append(f"cells must have {d + 1} indices each")
        return out
    nv = shape.n_vertices
    for i, cell in enumerate(shape.cells):
        if np.any(cell < 0) or np.any(cell >= nv):
            out.append(f"cell index out of range in cell {i}")
        elif len(set(cell.tolist())) != len(cell):
            out.append(f"degenerate cell {i}")
    if shape.signal.shape[0] != nv:
        out.append("signal length mismatch")
    if shape.signal.shape[1] < 1:
        out.append("signal_dim must be >= 1")
    if not np.all(np.isfinite(shape.vertices)):
        out.append("non-finite vertex coordinates")
    if not np.all(np.isfinite(shape.signal)):
        out.append("non-finite signal values")
    return out


@dataclass(frozen=True)
class DiracFCurrent:
    """One atom: position ``x``, signal value ``m`` and volume element ``xi``."""

    x: np.ndarray
    m: np.ndarray
    xi: np.ndarray

    def __post_init__(self):
        for name in ("x", "m", "xi"):
            object.__setattr__(self, name, _frozen(np.atleast_1d(getattr(self, name)), ndim=1))


@dataclass(frozen=True, eq=False)
class FCurrent:
    """Finite sum of Dirac fcurrents, stored as arrays ``x`` (N, n), ``m`` (N, k)
    and ``xi`` (N, q).

    ``dropped`` counts degenerate cells discarded while discretizing.
    """

    x: np.ndarray
    m: np.ndarray
    xi: np.ndarray
    manifold_dim: int = 1
    dropped: int = field(default=0, compare=False)

    def __post_init__(self):
        x = np.array(self.x, dtype=float)
        m = np.array(self.m, dtype=float)
        xi = np.array(self.xi, dtype=float)
        if m.ndim == 1:
            m = m.reshape(-1, 1)
        if x.ndim != 2 or m.ndim != 2 or xi.ndim != 2:
            raise DimensionMismatchError("x, m, xi must be 2D arrays")
        if not (x.shape[0] == m.shape[0] == xi.shape[0]):
            raise DimensionMismatchError("x, m, xi must have the same number of atoms")
        if xi.shape[1] != volume_dim(x.shape[1], self.manifold_dim):
            raise DimensionMismatchError(
                f"volume elements of length {xi.shape[1]} do not match "
                f"(ambient_dim={x.shape[1]}, manifold_dim={self.manifold_dim})")
        object.__setattr__(self, "x", _frozen(x))
        object.__setattr__(self, "m", _frozen(m))
        object.__setattr__(self, "xi", _frozen(xi))

    @classmethod
    def empty(cls, ambient_dim: int, manifold_dim: int, signal_dim: int) -> "FCurrent":
        q = volume_dim(ambient_dim, manifold_dim)
        return cls(np.zeros((0, ambient_dim)), np.zeros((0, signal_dim)),
                   np.zeros((0, q)), manifold_dim)

    @classmethod
    def from_atoms(cls, atoms: Sequence[DiracFCurrent], manifold_dim: int = 1) -> "FCurrent":
        if not atoms:
            raise ValueError("from_atoms needs at least one atom to infer dimensions")
        return cls(np.stack([a.x for a in atoms]), np.stack([a.m for a in atoms]),
                   np.stack([a.xi for a in atoms]), manifold_dim)

    @property
    def ambient_dim(self) -> int:
        return self.x.shape[1]

    @property
    def signal_dim(self) -> int:
        return self.m.shape[1]

    @property
    def atoms(self) -> list[DiracFCurrent]:
        return list(iter(self))

    def __len__(self) -> int:
        return self.x.shape[0]

    def __iter__(self) -> Iterator[DiracFCurrent]:
        for i in range(len(self)):
            yield DiracFCurrent(self.x[i], self.m[i], self.xi[i])

    def __getitem__(self, i: int) -> DiracFCurrent:
        return DiracFCurrent(self.x[i], self.m[i], self.xi[i])

    def __eq__(self, other):
        if not isinstance(other, FCurrent):
            return NotImplemented
        return (self.manifold_dim == other.manifold_dim
                and np.array_equal(self.x, other.x)
                and np.array_equal(self.m, other.m)
                and np.array_equal(self.xi, other.xi))

    __hash__ = None

    def concat(self, other: "FCurrent", sign: float = 1.0) -> "FCurrent":
        """Formal sum ``self + sign * other`` as a longer atom list."""
        check_compatible(self, other)
        return FCurrent(np.vstack([self.x, other.x]), np.vstack([self.m, other.m]),
                        np.vstack([self.xi, sign * other.xi]), self.manifold_dim)


def check_compatible(a: FCurrent, b: FCurrent) -> None:
    if (a.ambient_dim, a.manifold_dim, a.signal_dim) != (b.ambient_dim, b.manifold_dim, b.signal_dim):
        raise DimensionMismatchError(
            f"incompatible fcurrents: (n, d, k) = {(a.ambient_dim, a.manifold_dim, a.signal_dim)} "
            f"vs {(b.ambient_dim, b.manifold_dim, b.signal_dim)}")


def discrete_mass(C: FCurrent) -> float:
    """Sum of the volume-element norms, the discrete mass of ``C``."""
    return float(np.linalg.norm(C.xi, axis=1).sum())


def scale_atoms(C: FCurrent, r: float) -> FCurrent:
    """Multiply every volume element by ``r``; positions and signals are kept."""
    if r == 0:
        raise ValueError("scale factor must be nonzero")
    return FCurrent(C.x, C.m, r * C.xi, C.manifold_dim)
