"""The two representations fcurrents replace: colored currents and
currents in the product space (geometry x signal)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import FCurrent, FunctionalShape, DimensionMismatchError
from .discretization import discretize, discretize_curve
from .kernels import KernelConfig, fcurrent_distance, sqdist


@dataclass(frozen=True, eq=False)
class ColoredCurrent:
    """Plain current whose volume elements are weighted by a scalar signal:
    atoms ``delta_{x_i}^{f_i xi_i}``."""

    x: np.ndarray
    w: np.ndarray
    manifold_dim: int = 1

    def __len__(self):
        return len(self.x)

    def __eq__(self, other):
        if not isinstance(other, ColoredCurrent):
            return NotImplemented
        return np.array_equal(self.x, other.x) and np.array_equal(self.w, other.w)

    __hash__ = None


def colored_from_parts(x, f, xi, manifold_dim: int = 1) -> ColoredCurrent:
    x = np.asarray(x, float)
    f = np.asarray(f, float).reshape(-1)
    xi = np.asarray(xi, float)
    return ColoredCurrent(x, f[:, None] * xi, manifold_dim)


def colored_current(shape) -> ColoredCurrent:
    """Colored current of a scalar-signal shape (or of its fcurrent atoms)."""
    C = shape if isinstance(shape, FCurrent) else None
    if C is None:
        C = discretize(shape)
    if C.signal_dim != 1:
        raise DimensionMismatchError("colored currents need a scalar signal (signal_dim == 1)")
    return colored_from_parts(C.x, C.m[:, 0], C.xi, C.manifold_dim)


def colored_inner_product(cfg: KernelConfig, A: ColoredCurrent, B: ColoredCurrent) -> float:
    """Geometric-kernel inner product; the signal kernel is not used."""
    if len(A) == 0 or len(B) == 0:
        return 0.0
    return float(np.sum(cfg.kg(sqdist(A.x, B.x)) * (A.w @ B.w.T)))


def colored_distance(cfg: KernelConfig, A: ColoredCurrent, B: ColoredCurrent) -> float:
    d2 = colored_inner_product(cfg, A, A) - 2 * colored_inner_product(cfg, A, B) + colored_inner_product(cfg, B, B)
    return math.sqrt(max(d2, 0.0))


def lift_curve(shape: FunctionalShape) -> FunctionalShape:
    """Graph ``(x, y, f(x, y))`` of a planar scalar-signal curve, as a curve in
    3D with a zero signal."""
    if (shape.ambient_dim, shape.manifold_dim, shape.signal_dim) != (2, 1, 1):
        raise DimensionMismatchError("product-space currents need a planar curve with scalar signal")
    v = np.hstack([shape.vertices, shape.signal])
    return FunctionalShape(v, shape.cells, np.zeros((shape.n_vertices, 1)), 1)


def product_space_current(shape: FunctionalShape) -> FCurrent:
    """Plain 1-current in R^3 of the lifted curve (constant signal)."""
    return discretize_curve(lift_curve(shape))


def product_distance(cfg: KernelConfig, A: FunctionalShape, B: FunctionalShape) -> float:
    """Currents distance between the lifts, using the geometric kernel only."""
    return fcurrent_distance(cfg.currents_only(), product_space_current(A), product_space_current(B))
