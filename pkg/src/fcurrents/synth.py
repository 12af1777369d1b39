"""Synthetic functional shapes used by the experiments, tests and demos."""
from __future__ import annotations

import math

import numpy as np

from .core import FunctionalShape


def _closed_cells(n):
    i = np.arange(n)
    return np.stack([i, (i + 1) % n], axis=1)


def _open_cells(n_vertices):
    i = np.arange(n_vertices - 1)
    return np.stack([i, i + 1], axis=1)


def circle(segments: int, radius: float = 1.0, signal=None, center=(0.0, 0.0)) -> FunctionalShape:
    """Closed counter-clockwise polygon; ``signal(theta)`` gives vertex values."""
    theta = 2 * np.pi * np.arange(segments) / segments
    v = np.asarray(center, float) + radius * np.stack([np.cos(theta), np.sin(theta)], 1)
    s = np.zeros(segments) if signal is None else np.asarray(signal(theta), float)
    return FunctionalShape(v, _closed_cells(segments), s.reshape(segments, -1))


def crenel_signal(theta, crenels: int, amplitude: float = 1.0, rotation: float = 0.0):
    """Square wave on the circle: ``amplitude`` on the first half of each of
    the ``crenels`` periods, 0 on the second half, shifted by ``rotation``."""
    period = 2 * np.pi / crenels
    phase = np.mod(np.asarray(theta) - rotation, period)
    return np.where(phase < period / 2, amplitude, 0.0)


def _crenel_primitive(theta, crenels, amplitude, rotation):
    # integral of crenel_signal from rotation to theta (any real theta)
    period = 2 * np.pi / crenels
    u = np.asarray(theta) - rotation
    k = np.floor(u / period)
    r = u - k * period
    return amplitude * (k * period / 2 + np.minimum(r, period / 2))


def crenellated_circle(segments: int, crenels: int, amplitude: float = 1.0,
                       rotation: float = 0.0) -> FunctionalShape:
    """Unit circle carrying a crenel signal rotated by ``rotation``.

    Each vertex takes the mean of the signal over its dual arc (half an
    edge on each side), so vertex values vary continuously with the
    rotation angle instead of jumping when a crenel edge crosses a vertex.
    """
    h = 2 * np.pi / segments
    theta = h * np.arange(segments)
    lo, hi = theta - h / 2, theta + h / 2
    avg = (_crenel_primitive(hi, crenels, amplitude, rotation)
           - _crenel_primitive(lo, crenels, amplitude, rotation)) / h
    return circle(segments, signal=lambda _: avg)


def crenel_l1_distance(crenels: int, amplitude: float, dtheta: float) -> float:
    """Exact L1 distance on the unit circle between a crenel signal and its
    rotation by ``dtheta``."""
    period = 2 * math.pi / crenels
    s = math.fmod(abs(dtheta), period)
    return amplitude * crenels * 2 * min(s, period - s)


def ellipse_stain(segments: int = 96, a: float = 1.0, b: float = 0.6, stain_center: float = 0.0,
                  stain_width: float = 0.6, center=(0.0, 0.0), smooth: bool = False) -> FunctionalShape:
    """Ellipse with a binary (or smooth bump) stain of angular half-width
    ``stain_width`` centered at angle ``stain_center``."""
    theta = 2 * np.pi * np.arange(segments) / segments
    v = np.asarray(center, float) + np.stack([a * np.cos(theta), b * np.sin(theta)], 1)
    dist = np.abs(np.angle(np.exp(1j * (theta - stain_center))))
    if smooth:
        s = np.clip(1 - dist / stain_width, 0, None)
    else:
        s = (dist <= stain_width).astype(float)
    return FunctionalShape(v, _closed_cells(segments), s.reshape(-1, 1))


def straight_segment(edges: int, length: float = 1.0, signal: float = 1.0) -> FunctionalShape:
    """Horizontal segment from the origin split into ``edges`` edges."""
    t = np.linspace(0.0, length, edges + 1)
    v = np.stack([t, np.zeros_like(t)], 1)
    return FunctionalShape(v, _open_cells(edges + 1), np.full((edges + 1, 1), float(signal)))


def polyline(points, signal) -> FunctionalShape:
    """Open polyline through ``points`` with per-vertex ``signal``."""
    points = np.asarray(points, float)
    return FunctionalShape(points, _open_cells(len(points)), np.asarray(signal, float).reshape(len(points), -1))


def random_polyline(edges: int, rng: np.random.Generator, step: float = 0.1, dim: int = 2) -> FunctionalShape:
    """Random walk polyline with uniform random scalar signal."""
    steps = rng.normal(size=(edges, dim))
    steps *= step / np.linalg.norm(steps, axis=1, keepdims=True)
    v = np.vstack([np.zeros(dim), np.cumsum(steps, 0)])
    return FunctionalShape(v, _open_cells(edges + 1), rng.uniform(size=(edges + 1, 1)))


def fiber_bundle(fibers: int = 300, points: int = 20, rng: np.random.Generator | None = None,
                 spread: float = 0.5, levels=(0.0, 100.0, 200.0)) -> FunctionalShape:
    """Bundle of planar open fibers fanning out from a common region.

    Each fiber carries a constant signal drawn from ``levels`` according to
    its lateral position (three bands). Fibers are disconnected from each
    other.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    t = np.linspace(0.0, 1.0, points)
    offsets = np.sort(rng.uniform(-spread, spread, fibers))
    bend = rng.normal(0.0, 0.05, fibers)
    band = np.digitize(offsets, np.linspace(-spread, spread, len(levels) + 1)[1:-1])
    verts, cells, sig = [], [], []
    for f in range(fibers):
        x = t * 2.0
        y = offsets[f] * (0.3 + 0.7 * t) + bend[f] * np.sin(np.pi * t)
        base = f * points
        verts.append(np.stack([x, y], 1))
        cells.append(base + _open_cells(points))
        sig.append(np.full(points, levels[band[f]]))
    return FunctionalShape(np.vstack(verts), np.vstack(cells), np.concatenate(sig).reshape(-1, 1))


def unit_square() -> FunctionalShape:
    """Unit square in the z=0 plane as two counter-clockwise triangles."""
    v = [[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]]
    return FunctionalShape(v, [[0, 1, 2], [0, 2, 3]], np.zeros((4, 1)), 2)


def sphere_with_caps(n_lat: int = 16, n_lon: int = 32, radius: float = 1.0,
                     cap_angle: float = math.pi / 5, cap_value: float = 1.0) -> FunctionalShape:
    """UV sphere (outward normals) with signal ``cap_value`` on the two polar
    caps of angular radius ``cap_angle`` and 0 elsewhere."""
    theta = np.linspace(0, math.pi, n_lat + 1)[1:-1]            # polar angle of ring vertices
    phi = 2 * math.pi * np.arange(n_lon) / n_lon
    ring = np.stack([np.outer(np.sin(theta), np.cos(phi)), np.outer(np.sin(theta), np.sin(phi)),
                     np.outer(np.cos(theta), np.ones_like(phi))], -1).reshape(-1, 3)
    north, south = len(ring), len(ring) + 1
    v = radius * np.vstack([ring, [0, 0, 1], [0, 0, -1]])
    cells = []
    idx = lambda i, j: i * n_lon + (j % n_lon)
    for j in range(n_lon):
        cells.append([north, idx(0, j), idx(0, j + 1)])
        cells.append([south, idx(n_lat - 2, j + 1), idx(n_lat - 2, j)])
    for i in range(n_lat - 2):
        for j in range(n_lon):
            a, b, c, d = idx(i, j), idx(i, j + 1), idx(i + 1, j), idx(i + 1, j + 1)
            cells.append([a, c, b])
            cells.append([b, c, d])
    polar = np.arccos(np.clip(v[:, 2] / radius, -1, 1))
    s = np.where((polar <= cap_angle) | (polar >= math.pi - cap_angle), cap_value, 0.0)
    return FunctionalShape(v, np.array(cells), s.reshape(-1, 1), 2)


def gapped_curve_pair(gap: float, edges: int = 10):
    """Two collinear pieces with signals 0 and 1 separated by ``gap``.

    Returns ``(connected, disconnected)``: identical vertices and signals,
    the connected version has one extra edge bridging the gap.
    """
    xa = np.linspace(-1.0, 0.0, edges + 1)
    xb = gap + np.linspace(0.0, 1.0, edges + 1)
    v = np.vstack([np.stack([xa, np.zeros_like(xa)], 1), np.stack([xb, np.zeros_like(xb)], 1)])
    s = np.r_[np.zeros(edges + 1), np.ones(edges + 1)].reshape(-1, 1)
    ca = _open_cells(edges + 1)
    cb = ca + edges + 1
    bridge = np.array([[edges, edges + 1]])
    return (FunctionalShape(v, np.vstack([ca, bridge, cb]), s),
            FunctionalShape(v, np.vstack([ca, cb]), s))
