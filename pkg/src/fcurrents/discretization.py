"""Midpoint / centroid discretization of functional shapes into fcurrents."""
from __future__ import annotations

import warnings

import numpy as np

from .core import FCurrent, FunctionalShape, InvalidShapeError, validate_shape

DEGENERACY_RTOL = 1e-12


class DegenerateCellWarning(UserWarning):
    pass


def cell_atoms(vertices: np.ndarray, cells: np.ndarray, signal: np.ndarray, manifold_dim: int):
    """Atom arrays ``(x, m, xi)`` for every cell, degenerate cells included.

    Curves: edge midpoint and edge vector. Surfaces: centroid and half the
    cross product of the two edges leaving the first vertex.
    """
    v = vertices[cells]                      # (N, d+1, n)
    x = v.mean(axis=1)
    m = signal[cells].mean(axis=1)
    if manifold_dim == 1:
        xi = v[:, 1] - v[:, 0]
    else:
        xi = 0.5 * np.cross(v[:, 1] - v[:, 0], v[:, 2] - v[:, 0])
    return x, m, xi


def _discretize(shape: FunctionalShape, manifold_dim: int) -> FCurrent:
    if shape.manifold_dim != manifold_dim:
        raise InvalidShapeError([f"expected manifold_dim={manifold_dim}, got {shape.manifold_dim}"])
    violations = validate_shape(shape)
    if violations:
        raise InvalidShapeError(violations)
    x, m, xi = cell_atoms(shape.vertices, shape.cells, shape.signal, manifold_dim)
    # the threshold scales like a length for curves and an area for surfaces
    tol = (DEGENERACY_RTOL * shape.diameter()) ** manifold_dim
    keep = np.linalg.norm(xi, axis=1) > tol
    dropped = int((~keep).sum())
    if dropped:
        warnings.warn(f"dropped {dropped} degenerate cell(s)", DegenerateCellWarning, stacklevel=3)
    return FCurrent(x[keep], m[keep], xi[keep], manifold_dim, dropped=dropped)


def discretize_curve(shape: FunctionalShape) -> FCurrent:
    """One atom per edge: midpoint, oriented edge vector, mean endpoint signal."""
    return _discretize(shape, 1)


def discretize_surface(shape: FunctionalShape) -> FCurrent:
    """One atom per triangle: centroid, area-weighted normal, mean vertex signal."""
    return _discretize(shape, 2)


def discretize(shape: FunctionalShape) -> FCurrent:
    if shape.manifold_dim == 1:
        return discretize_curve(shape)
    return discretize_surface(shape)


def refine_curve(shape: FunctionalShape, factor: int) -> FunctionalShape:
    """Split every edge into ``factor`` collinear sub-edges.

    New vertices and their signals are linear interpolants of the edge
    endpoints. Original vertices keep their indices; new ones are appended.
    """
    if shape.manifold_dim != 1:
        raise ValueError("refine_curve only applies to curves")
    if int(factor) != factor or factor < 2:
        raise ValueError("factor must be an integer >= 2")
    factor = int(factor)
    nv = shape.n_vertices
    t = np.arange(1, factor) / factor        # interior fractions
    a, b = shape.cells[:, 0], shape.cells[:, 1]
    va, vb = shape.vertices[a], shape.vertices[b]
    sa, sb = shape.signal[a], shape.signal[b]
    new_v = va[:, None, :] + t[None, :, None] * (vb - va)[:, None, :]
    new_s = sa[:, None, :] + t[None, :, None] * (sb - sa)[:, None, :]
    ne = len(shape.cells)
    new_idx = nv + np.arange(ne * (factor - 1)).reshape(ne, factor - 1)
    chain = np.concatenate([a[:, None], new_idx, b[:, None]], axis=1)
    cells = np.stack([chain[:, :-1], chain[:, 1:]], axis=2).reshape(-1, 2)
    vertices = np.vstack([shape.vertices, new_v.reshape(-1, shape.ambient_dim)])
    signal = np.vstack([shape.signal, new_s.reshape(-1, shape.signal_dim)])
    return FunctionalShape(vertices, cells, signal, 1)
