"""Numerical experiments: crenel rotation on the circle and refinement convergence."""
from __future__ import annotations

import numpy as np

from .discretization import discretize, refine_curve
from .kernels import KernelConfig, fcurrent_distance
from .synth import circle, crenel_l1_distance, crenellated_circle

CRENEL_KERNELS = KernelConfig("gaussian", 0.2, "gaussian", 0.5)


def crenel_experiment(dthetas, segments: int = 512, crenels: int = 16, amplitude: float = 1.0,
                      kernels: KernelConfig = CRENEL_KERNELS, threads=None):
    """W' and exact L1 distances between a crenellated circle and its rotations.

    Returns a list of ``(dtheta, wprime, l1)`` tuples.
    """
    base = discretize(crenellated_circle(segments, crenels, amplitude))
    rows = []
    for dt in dthetas:
        rot = discretize(crenellated_circle(segments, crenels, amplitude, rotation=dt))
        rows.append((float(dt), fcurrent_distance(kernels, base, rot, threads=threads),
                     crenel_l1_distance(crenels, amplitude, dt)))
    return rows


def linear_fit_r2(x, y) -> float:
    """Coefficient of determination of the least-squares line through (x, y)."""
    x, y = np.asarray(x, float), np.asarray(y, float)
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    ss_res = np.sum((A @ coef - y) ** 2)
    ss_tot = np.sum((y - y.mean()) ** 2)
    return float(1 - ss_res / ss_tot)


def refinement_errors(kernels: KernelConfig, segments: int = 32, factors=(2, 4, 8),
                      reference_factor: int = 64, signal=lambda t: np.cos(3 * t)):
    """Distance of each refinement of a coarse circle to a much finer one.

    The finest refinement stands in for the continuous fcurrent of the
    coarse polygon (with its linearly interpolated signal).
    """
    coarse = circle(segments, signal=signal)
    ref = discretize(refine_curve(coarse, reference_factor))
    return [fcurrent_distance(kernels, discretize(refine_curve(coarse, f)), ref) for f in factors]
