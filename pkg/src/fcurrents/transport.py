"""Flows of time-dependent velocity fields and transport of shapes and fcurrents.

Two kinds of fields are supported:

* :class:`DeformationPath` -- a kernel velocity field carried by moving
  control points, ``v_j(x) = sum_p k_V(|x - q_p(t_j)|) a_p(t_j)``, with the
  momenta held constant on each time step. Control points move with the
  field, so they are integrated jointly with any advected points.
* :class:`AnalyticVelocityField` -- an arbitrary vectorized ``v(t, X)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import FCurrent, FunctionalShape
from .kernels import sqdist

INTEGRATORS = ("euler", "rk4")


class FlowDivergenceError(FloatingPointError):
    pass


class SingularJacobianError(ValueError):
    pass


def gaussian_velocity(x: np.ndarray, q: np.ndarray, a: np.ndarray, sigma: float) -> np.ndarray:
    """Velocity at points ``x`` of the Gaussian field with centers ``q`` and momenta ``a``."""
    return np.exp(-sqdist(x, q) / sigma ** 2) @ a


def _step(f, t, y, h, integrator):
    """One explicit step of ``y' = f(t, y)``."""
    if integrator == "euler":
        return y + h * f(t, y)
    k1 = f(t, y)
    k2 = f(t + h / 2, y + h / 2 * k1)
    k3 = f(t + h / 2, y + h / 2 * k2)
    k4 = f(t + h, y + h * k3)
    return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def _check_finite(y, j):
    if not np.all(np.isfinite(y)):
        bad = np.argwhere(~np.all(np.isfinite(y), axis=-1)).ravel()
        raise FlowDivergenceError(
            f"non-finite positions at timestep {j} for {bad.size} point(s), first index {bad[0]}")


def shoot_control_points(q0: np.ndarray, momenta: np.ndarray, sigma_v: float,
                         integrator: str = "euler") -> np.ndarray:
    """Trajectories (T+1, P, n) of control points under their own field."""
    if integrator not in INTEGRATORS:
        raise ValueError(f"integrator must be one of {INTEGRATORS}")
    T = momenta.shape[0]
    h = 1.0 / T
    q = np.empty((T + 1,) + q0.shape)
    q[0] = q0
    for j in range(T):
        a = momenta[j]
        q[j + 1] = _step(lambda t, y: gaussian_velocity(y, y, a, sigma_v), j * h, q[j], h, integrator)
        _check_finite(q[j + 1], j + 1)
    return q


@dataclass(frozen=True, eq=False)
class DeformationPath:
    """Time-discretized kernel velocity field.

    ``control_points`` has shape (T+1, P, n); ``momenta`` has shape (T, P, n).
    """

    control_points: np.ndarray
    momenta: np.ndarray
    sigma_v: float
    integrator: str = "rk4"

    def __post_init__(self):
        q = np.array(self.control_points, dtype=float)
        a = np.array(self.momenta, dtype=float)
        if a.ndim != 3 or q.ndim != 3:
            raise ValueError("control_points must be (T+1, P, n) and momenta (T, P, n)")
        if q.shape != (a.shape[0] + 1,) + a.shape[1:]:
            raise ValueError(f"inconsistent shapes: control_points {q.shape}, momenta {a.shape}")
        if a.shape[0] < 1:
            raise ValueError("need at least one timestep")
        if not self.sigma_v > 0:
            raise ValueError("sigma_v must be positive")
        if self.integrator not in INTEGRATORS:
            raise ValueError(f"integrator must be one of {INTEGRATORS}")
        q.setflags(write=False)
        a.setflags(write=False)
        object.__setattr__(self, "control_points", q)
        object.__setattr__(self, "momenta", a)

    @classmethod
    def from_momenta(cls, q0, momenta, sigma_v: float, integrator: str = "rk4") -> "DeformationPath":
        momenta = np.asarray(momenta, float)
        q = shoot_control_points(np.asarray(q0, float), momenta, sigma_v, integrator)
        return cls(q, momenta, sigma_v, integrator)

    @classmethod
    def zero(cls, q0, timesteps: int, sigma_v: float, integrator: str = "rk4") -> "DeformationPath":
        q0 = np.asarray(q0, float)
        return cls.from_momenta(q0, np.zeros((timesteps,) + q0.shape), sigma_v, integrator)

    @property
    def timesteps(self) -> int:
        return self.momenta.shape[0]

    @property
    def step(self) -> float:
        return 1.0 / self.timesteps

    def to_dict(self) -> dict:
        return {
            "timesteps": self.timesteps,
            "sigma_v": self.sigma_v,
            "integrator": self.integrator,
            "control_points": self.control_points.tolist(),
            "momenta": self.momenta.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DeformationPath":
        path = cls(d["control_points"], d["momenta"], float(d["sigma_v"]), d["integrator"])
        if path.timesteps != int(d["timesteps"]):
            raise ValueError("timesteps does not match the momenta array")
        return path


@dataclass(frozen=True)
class AnalyticVelocityField:
    """Closed-form field ``v(t, X)`` evaluated on an (N, n) array of points.

    ``sup_norm`` and ``lip_norm`` optionally declare the time integrals of
    ``sup_x |v|`` and of the first-derivative sup norms.
    """

    func: Callable[[float, np.ndarray], np.ndarray]
    timesteps: int = 10
    integrator: str = "rk4"
    sup_norm: Optional[float] = None
    lip_norm: Optional[float] = None

    def __call__(self, t, x):
        return np.asarray(self.func(t, x), dtype=float)


def velocity_at(path: DeformationPath, j: int, x) -> np.ndarray:
    """Velocity of the path at timestep ``j`` evaluated at point(s) ``x``."""
    if not 0 <= j < path.timesteps:
        raise IndexError(f"timestep {j} out of range [0, {path.timesteps})")
    x = np.asarray(x, float)
    single = x.ndim == 1
    v = gaussian_velocity(np.atleast_2d(x), path.control_points[j], path.momenta[j], path.sigma_v)
    return v[0] if single else v


def flow_points(field, points) -> np.ndarray:
    """Positions of ``points`` at every timestep, shape (T+1, N, n).

    For a :class:`DeformationPath` the control points are re-integrated
    together with the points (with the same scheme) so that intermediate
    RK4 stages see consistent centers.
    """
    x0 = np.array(points, dtype=float)
    if x0.ndim == 1:
        x0 = x0.reshape(1, -1)
    if isinstance(field, DeformationPath):
        T, h, P = field.timesteps, field.step, field.momenta.shape[1]
        sigma = field.sigma_v
        out = np.empty((T + 1,) + x0.shape)
        out[0] = x0
        q = field.control_points[0].copy()
        for j in range(T):
            a = field.momenta[j]

            def f(t, y):
                # control points first, advected points after
                return gaussian_velocity(y, y[:P], a, sigma)

            y = _step(f, j * h, np.vstack([q, out[j]]), h, field.integrator)
            q, out[j + 1] = y[:P], y[P:]
            _check_finite(out[j + 1], j + 1)
        return out
    if isinstance(field, AnalyticVelocityField):
        if field.integrator not in INTEGRATORS:
            raise ValueError(f"integrator must be one of {INTEGRATORS}")
        T = field.timesteps
        h = 1.0 / T
        out = np.empty((T + 1,) + x0.shape)
        out[0] = x0
        for j in range(T):
            out[j + 1] = _step(field, j * h, out[j], h, field.integrator)
            _check_finite(out[j + 1], j + 1)
        return out
    raise TypeError(f"unsupported field type {type(field).__name__}")


def flow_map(field) -> Callable[[np.ndarray], np.ndarray]:
    """The endpoint map ``x -> phi_{0,1}(x)`` of a field."""
    return lambda x: flow_points(field, x)[-1]


def transport_shape(shape: FunctionalShape, field, action: str = "geometric") -> FunctionalShape:
    """Move the vertices along the flow; cells and signal values are kept."""
    if action != "geometric":
        raise ValueError("only the geometric action transports shapes; "
                         "use pushforward_atoms for contrast changes")
    end = flow_points(field, shape.vertices)[-1]
    return shape.with_vertices(end)


def finite_difference_jacobian(phi, x: np.ndarray, step: float) -> np.ndarray:
    """Central-difference Jacobians of ``phi`` at each row of ``x``; (N, n, n)."""
    N, n = x.shape
    J = np.empty((N, n, n))
    for c in range(n):
        e = np.zeros(n)
        e[c] = step
        J[:, :, c] = (phi(x + e) - phi(x - e)) / (2 * step)
    return J


def pushforward_atoms(C: FCurrent, phi, jacobian=None, psi=None, fd_step: float | None = None,
                      det_tol: float = 1e-12) -> FCurrent:
    """Apply ``(phi, psi)`` to every atom.

    Positions go through ``phi``, signals through ``psi`` (identity by
    default). Tangent vectors are multiplied by the Jacobian; surface normals
    transform by the cofactor matrix ``det(J) J^{-T}``. Without an explicit
    ``jacobian`` one is estimated by central differences with step
    ``1e-5 * diameter``.
    """
    if len(C) == 0:
        return C
    x = C.x
    if jacobian is None:
        if fd_step is None:
            diam = float(np.linalg.norm(x.max(0) - x.min(0)))
            fd_step = 1e-5 * (diam if diam > 0 else 1.0)
        J = finite_difference_jacobian(phi, x, fd_step)
    else:
        J = np.asarray(jacobian(x), dtype=float)
    det = np.linalg.det(J)
    bad = np.abs(det) <= det_tol
    if np.any(bad):
        raise SingularJacobianError(f"singular Jacobian at atom {int(np.argmax(bad))}")
    if C.manifold_dim == 1:
        xi = np.einsum("nij,nj->ni", J, C.xi)
    else:
        cof = det[:, None, None] * np.linalg.inv(J).transpose(0, 2, 1)
        xi = np.einsum("nij,nj->ni", cof, C.xi)
    m = C.m if psi is None else np.asarray(psi(C.m), dtype=float).reshape(C.m.shape)
    return FCurrent(np.asarray(phi(x), dtype=float), m, xi, C.manifold_dim)
