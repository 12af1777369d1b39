"""Diffeomorphic registration of functional shapes with an fcurrent attachment.

Control points are the source vertices ``q`` and the unknowns are the
momenta ``a`` (T, P, n), one set per time step. The discrete energy is

    kinetic    = sum_j h * sum_{p,p'} a_jp . a_jp' k_V(|q_jp - q_jp'|)
    attachment = lam * |C(q_T) - C_target|^2_{W'}

where ``q_{j+1}`` is one Euler or RK4 step of ``q' = K_V(q, q) a_j`` and
``C(q_T)`` re-discretizes the deformed source with its original signal.
The gradient is obtained by reverse accumulation through those steps.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DimensionMismatchError, FCurrent, FunctionalShape, InvalidShapeError, validate_shape
from .discretization import cell_atoms, discretize
from .kernels import KernelConfig, sqdist
from .transport import INTEGRATORS, DeformationPath, FlowDivergenceError, flow_points


class RegistrationError(RuntimeError):
    def __init__(self, msg, trace=None):
        super().__init__(msg)
        self.trace = trace or []


@dataclass(frozen=True)
class RegistrationConfig:
    kernels: KernelConfig
    sigma_v: float
    timesteps: int = 10
    lam: float = 1.0
    max_iters: int = 200
    grad_tol: float = 1e-6
    initial_step: float | None = None
    shrink: float = 0.5
    armijo: float = 1e-4
    min_step: float = 1e-14
    integrator: str = "euler"

    def __post_init__(self):
        if not self.sigma_v > 0:
            raise ValueError("sigma_v must be positive")
        if self.timesteps < 1:
            raise ValueError("timesteps must be >= 1")
        if not self.lam > 0:
            raise ValueError("lam must be positive")
        if self.max_iters < 0 or self.grad_tol < 0:
            raise ValueError("max_iters and grad_tol must be nonnegative")
        if self.initial_step is not None and not self.initial_step > 0:
            raise ValueError("initial_step must be positive")
        if not 0 < self.shrink < 1:
            raise ValueError("shrink must lie in (0, 1)")
        if not 0 < self.armijo < 1:
            raise ValueError("armijo must lie in (0, 1)")
        if self.integrator not in INTEGRATORS:
            raise ValueError(f"integrator must be one of {INTEGRATORS}")


@dataclass(frozen=True, eq=False)
class RegistrationResult:
    path: DeformationPath
    deformed_source: FunctionalShape
    energy_trace: list          # (kinetic, attachment, total) per accepted iterate
    final_gradient_norm: float
    iterations: int = 0
    stop_reason: str = ""

    def to_dict(self) -> dict:
        return {
            "path": self.path.to_dict(),
            "energy_trace": [list(map(float, e)) for e in self.energy_trace],
            "final_gradient_norm": self.final_gradient_norm,
            "iterations": self.iterations,
            "stop_reason": self.stop_reason,
        }


# -- kernel velocity field and its vector-Jacobian product -------------------

def _kv(q, sigma):
    return np.exp(-sqdist(q, q) / sigma ** 2)


def _field(q, a, sigma):
    return _kv(q, sigma) @ a


def _pair_weight_grad(K, sigma, W, q):
    """Gradient in q of ``sum_{p,p'} W_pp' k(|q_p - q_p'|^2)`` for the Gaussian k."""
    S = (-K / sigma ** 2) * (W + W.T)
    return 2.0 * (S.sum(1)[:, None] * q - S @ q)


def _field_vjp(q, a, sigma, mu):
    """Cotangents (dq, da) of ``mu . (K(q, q) a)``."""
    K = _kv(q, sigma)
    return _pair_weight_grad(K, sigma, mu @ a.T, q), K @ mu


def _kinetic_step(q, a, sigma, h):
    K = _kv(q, sigma)
    val = h * float(np.sum(K * (a @ a.T)))
    gq = h * _pair_weight_grad(K, sigma, a @ a.T, q)
    ga = 2.0 * h * (K @ a)
    return val, gq, ga


def _step_forward(q, a, sigma, h, integrator):
    if integrator == "euler":
        return q + h * _field(q, a, sigma)
    k1 = _field(q, a, sigma)
    k2 = _field(q + h / 2 * k1, a, sigma)
    k3 = _field(q + h / 2 * k2, a, sigma)
    k4 = _field(q + h * k3, a, sigma)
    return q + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def _step_backward(q, a, sigma, h, integrator, lam):
    """Pull the cotangent ``lam`` of the step output back to (q, a)."""
    if integrator == "euler":
        bq, ba = _field_vjp(q, a, sigma, lam)
        return lam + h * bq, h * ba
    k1 = _field(q, a, sigma)
    z2 = q + h / 2 * k1
    k2 = _field(z2, a, sigma)
    z3 = q + h / 2 * k2
    k3 = _field(z3, a, sigma)
    z4 = q + h * k3
    bq = lam.copy()
    bk1, bk2, bk3, bk4 = h / 6 * lam, h / 3 * lam, h / 3 * lam, h / 6 * lam
    dz, ba = _field_vjp(z4, a, sigma, bk4)
    bq += dz
    bk3 = bk3 + h * dz
    dz, da = _field_vjp(z3, a, sigma, bk3)
    bq += dz
    ba += da
    bk2 = bk2 + h / 2 * dz
    dz, da = _field_vjp(z2, a, sigma, bk2)
    bq += dz
    ba += da
    bk1 = bk1 + h / 2 * dz
    dz, da = _field_vjp(q, a, sigma, bk1)
    return bq + dz, ba + da


def shoot(q0, momenta, sigma, integrator):
    T = momenta.shape[0]
    h = 1.0 / T
    q = np.empty((T + 1,) + q0.shape)
    q[0] = q0
    for j in range(T):
        q[j + 1] = _step_forward(q[j], momenta[j], sigma, h, integrator)
        if not np.all(np.isfinite(q[j + 1])):
            raise FlowDivergenceError(f"non-finite control points at timestep {j + 1}")
    return q


# -- fcurrent attachment ----------------------------------------------------

def _pair_grads(cfg, x, m, xi, y, my, eta):
    """Gradients in (x, xi) of ``sum_ij kf kg(|x_i - y_j|^2) xi_i . eta_j``."""
    kf = cfg.kf(sqdist(m, my))
    r2 = sqdist(x, y)
    K = kf * cfg.kg(r2)
    D = 2.0 * kf * cfg.kg.deriv(r2) * (xi @ eta.T)
    gx = D.sum(1)[:, None] * x - D @ y
    return gx, K @ eta


def _sum_pairs(cfg, x, m, xi, y, my, eta):
    return float(np.sum(cfg.kf(sqdist(m, my)) * cfg.kg(sqdist(x, y)) * (xi @ eta.T)))


def attachment(cfg: KernelConfig, vertices, cells, signal, manifold_dim, target: FCurrent, lam=1.0,
               grad=False):
    """``lam * |C(vertices) - target|^2`` and optionally its vertex gradient."""
    x, m, xi = cell_atoms(vertices, cells, signal, manifold_dim)
    y, my, eta = target.x, target.m, target.xi
    d2 = (_sum_pairs(cfg, x, m, xi, x, m, xi) - 2.0 * _sum_pairs(cfg, x, m, xi, y, my, eta)
          + _sum_pairs(cfg, y, my, eta, y, my, eta))
    val = lam * max(d2, 0.0)
    if not grad:
        return val
    gx_s, gxi_s = _pair_grads(cfg, x, m, xi, x, m, xi)
    gx_t, gxi_t = _pair_grads(cfg, x, m, xi, y, my, eta)
    gx = 2.0 * lam * (gx_s - gx_t)
    gxi = 2.0 * lam * (gxi_s - gxi_t)
    gv = np.zeros_like(vertices)
    if manifold_dim == 1:
        np.add.at(gv, cells[:, 0], 0.5 * gx - gxi)
        np.add.at(gv, cells[:, 1], 0.5 * gx + gxi)
    else:
        v = vertices[cells]
        e1, e2 = v[:, 1] - v[:, 0], v[:, 2] - v[:, 0]
        g1 = 0.5 * np.cross(e2, gxi)
        g2 = 0.5 * np.cross(gxi, e1)
        np.add.at(gv, cells[:, 0], gx / 3 - g1 - g2)
        np.add.at(gv, cells[:, 1], gx / 3 + g1)
        np.add.at(gv, cells[:, 2], gx / 3 + g2)
    return val, gv


# -- energy and gradient ---------------------------------------------------

def _check_pair(source: FunctionalShape, target: FunctionalShape):
    for s in (source, target):
        v = validate_shape(s)
        if v:
            raise InvalidShapeError(v)
    if (source.ambient_dim, source.manifold_dim, source.signal_dim) != \
            (target.ambient_dim, target.manifold_dim, target.signal_dim):
        raise DimensionMismatchError("source and target must have the same (n, d, k)")


def _momenta(source, cfg, momenta):
    a = np.asarray(momenta, float)
    expect = (cfg.timesteps, source.n_vertices, source.ambient_dim)
    if a.shape != expect:
        raise DimensionMismatchError(f"momenta must have shape {expect}, got {a.shape}")
    return a


def energy_and_gradient(cfg: RegistrationConfig, source: FunctionalShape, target, momenta, grad=True):
    """Energy terms and (optionally) the momentum gradient of the total.

    ``target`` may be a shape or an already discretized fcurrent.
    """
    a = _momenta(source, cfg, momenta)
    tgt = discretize(target) if isinstance(target, FunctionalShape) else target
    T, h, s = cfg.timesteps, 1.0 / cfg.timesteps, cfg.sigma_v
    q = shoot(source.vertices, a, s, cfg.integrator)
    kin = 0.0
    kin_grads = []
    for j in range(T):
        val, gq, ga = _kinetic_step(q[j], a[j], s, h)
        kin += val
        kin_grads.append((gq, ga))
    res = attachment(cfg.kernels, q[T], source.cells, source.signal, source.manifold_dim,
                     tgt, cfg.lam, grad=grad)
    if not grad:
        return (kin, res, kin + res), None
    att, lam_q = res
    g = np.empty_like(a)
    for j in range(T - 1, -1, -1):
        lam_q, ga = _step_backward(q[j], a[j], s, h, cfg.integrator, lam_q)
        gq_k, ga_k = kin_grads[j]
        g[j] = ga + ga_k
        lam_q = lam_q + gq_k
    return (kin, att, kin + att), g


def energy(cfg: RegistrationConfig, source: FunctionalShape, target, momenta):
    """``(kinetic, attachment, total)`` for the given momenta."""
    if isinstance(target, FunctionalShape):
        _check_pair(source, target)
    return energy_and_gradient(cfg, source, target, momenta, grad=False)[0]


def gradient(cfg: RegistrationConfig, source: FunctionalShape, target, momenta) -> np.ndarray:
    if isinstance(target, FunctionalShape):
        _check_pair(source, target)
    return energy_and_gradient(cfg, source, target, momenta)[1]


# -- optimizer ------------------------------------------------------------------

def register(cfg: RegistrationConfig, source: FunctionalShape, target: FunctionalShape,
             callback=None) -> RegistrationResult:
    """Backtracking gradient descent on the momenta, starting from zero.

    Stops when the gradient norm falls below ``grad_tol`` times its initial
    value, after ``max_iters`` accepted steps, or when the line search step
    collapses below ``min_step``. ``callback(iteration, energies)`` is
    called after each accepted step.
    """
    _check_pair(source, target)
    tgt = discretize(target)
    a = np.zeros((cfg.timesteps, source.n_vertices, source.ambient_dim))
    e, g = energy_and_gradient(cfg, source, tgt, a)
    trace = [e]
    if not all(map(math.isfinite, e)):
        raise RegistrationError("non-finite initial energy", trace)
    gnorm = g0 = float(np.linalg.norm(g))
    if cfg.initial_step is not None:
        t = cfg.initial_step
    else:
        # first trial moves the largest momentum component by sigma_v
        t = cfg.sigma_v / max(float(np.abs(g).max()), 1e-300)
    it = 0
    reason = "max_iters"
    while True:
        if gnorm <= cfg.grad_tol * g0:
            reason = "grad_tol"
            break
        if it >= cfg.max_iters:
            break
        while t >= cfg.min_step:
            trial = a - t * g
            try:
                e_new, g_new = energy_and_gradient(cfg, source, tgt, trial)
            except FlowDivergenceError:
                t *= cfg.shrink
                continue
            if math.isfinite(e_new[2]) and e_new[2] <= e[2] - cfg.armijo * t * gnorm ** 2:
                break
            t *= cfg.shrink
        else:
            reason = "step_collapse"
            break
        a, e, g = trial, e_new, g_new
        gnorm = float(np.linalg.norm(g))
        trace.append(e)
        it += 1
        if callback is not None:
            callback(it, e)
        t /= cfg.shrink
    path = DeformationPath.from_momenta(source.vertices, a, cfg.sigma_v, cfg.integrator)
    deformed = source.with_vertices(flow_points(path, source.vertices)[-1])
    return RegistrationResult(path, deformed, trace, gnorm, it, reason)


def apply_result(result: RegistrationResult, shape: FunctionalShape) -> FunctionalShape:
    """Move an arbitrary shape through the registered deformation."""
    if shape.ambient_dim != result.path.control_points.shape[2]:
        raise DimensionMismatchError("shape does not live in the source's ambient space")
    return shape.with_vertices(flow_points(result.path, shape.vertices)[-1])
