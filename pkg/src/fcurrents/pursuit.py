"""Greedy and orthogonal matching pursuit on fcurrents.

The dictionary is a finite set of candidate supports ``(x, m)``; each
candidate carries a free volume element. At a candidate the residual
correlation is the vector

    gamma(x, m) = sum_i K((x, m), (x_i, m_i)) xi_i - sum_j K((x, m), (x'_j, m'_j)) alpha_j

and the best unit atom there points along ``gamma``. The orthogonal variant
keeps the selected supports and re-solves all coefficients from the shared
scalar Gram system ``(G + ridge I) alpha = gamma_C`` (one right-hand side
per volume-element component).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .core import FCurrent
from .kernels import KernelConfig, fcurrent_inner_product, scalar_kernel

VARIANTS = ("greedy", "orthogonal")
DICTIONARIES = ("source", "grid")


class SingularGramError(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True)
class MPConfig:
    """Stopping rule and dictionary for :func:`mp_compress`.

    ``epsilon`` is relative: the loop stops once ``|R_n| <= epsilon |C|``.
    ``ridge=None`` uses ``1e-10 * trace(G) / n``.
    """

    epsilon: float = 0.05
    max_atoms: int = 1000
    variant: str = "orthogonal"
    dictionary: str = "source"
    grid_spacing: float | None = None
    grid_signal_spacing: float | None = None
    ridge: float | None = None

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.max_atoms < 1:
            raise ValueError("max_atoms must be >= 1")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")
        if self.dictionary not in DICTIONARIES:
            raise ValueError(f"dictionary must be one of {DICTIONARIES}")
        if self.dictionary == "grid" and not (self.grid_spacing and self.grid_spacing > 0):
            raise ValueError("grid dictionary needs a positive grid_spacing")
        if self.ridge is not None and self.ridge < 0:
            raise ValueError("ridge must be nonnegative")


@dataclass(frozen=True)
class MPStep:
    step: int
    candidate: int
    x: tuple
    m: tuple
    gamma_norm: float
    residual_ratio: float


@dataclass(frozen=True, eq=False)
class MPResult:
    """Selected atoms (the projection) and the residual history.

    ``residual_norms[j]`` is the norm of the residual after ``j`` atoms, so
    ``residual_norms[0] == |C|``.
    """

    atoms: FCurrent
    residual_norms: list
    converged: bool
    steps: list = field(default_factory=list)

    @property
    def n_atoms(self) -> int:
        return len(self.atoms)


def grid_candidates(C: FCurrent, spacing: float, signal_spacing: float | None = None):
    """Regular grid over the bounding boxes of positions and signals."""
    def axis(lo, hi, s):
        n = int(math.floor((hi - lo) / s + 1e-9)) + 1
        pts = lo + s * np.arange(n)
        return pts + 0.5 * ((hi - lo) - (pts[-1] - lo))   # centered in the box

    xs = [axis(lo, hi, spacing) for lo, hi in zip(C.x.min(0), C.x.max(0))]
    mlo, mhi = C.m.min(0), C.m.max(0)
    if signal_spacing is None:
        signal_spacing = max(float(np.max(mhi - mlo)) / 10, 1e-300)
    ms = [axis(lo, hi, signal_spacing) for lo, hi in zip(mlo, mhi)]
    gx = np.stack(np.meshgrid(*xs, indexing="ij"), -1).reshape(-1, C.ambient_dim)
    gm = np.stack(np.meshgrid(*ms, indexing="ij"), -1).reshape(-1, C.signal_dim)
    cx = np.repeat(gx, len(gm), axis=0)
    cm = np.tile(gm, (len(gx), 1))
    return cx, cm


def correlation_field(cfg: KernelConfig, C: FCurrent, cand_x, cand_m,
                      selected: FCurrent | None = None, chunk: int = 2048) -> np.ndarray:
    """Residual correlation vectors gamma at each candidate, shape (M, q).

    The residual is ``C - selected``.
    """
    cand_x = np.atleast_2d(np.asarray(cand_x, float))
    cand_m = np.asarray(cand_m, float).reshape(len(cand_x), -1)
    out = np.zeros((len(cand_x), C.xi.shape[1]))
    for lo in range(0, len(cand_x), chunk):
        hi = lo + chunk
        if len(C):
            out[lo:hi] += scalar_kernel(cfg, cand_x[lo:hi], cand_m[lo:hi], C.x, C.m) @ C.xi
        if selected is not None and len(selected):
            out[lo:hi] -= scalar_kernel(cfg, cand_x[lo:hi], cand_m[lo:hi], selected.x, selected.m) @ selected.xi
    return out


def _solve_gram(G, rhs, ridge):
    A = G + ridge * np.eye(len(G))
    try:
        factor = scipy.linalg.cho_factor(A, lower=True)
    except np.linalg.LinAlgError:
        cond = np.linalg.cond(A)
        raise SingularGramError(f"Gram matrix not positive definite (condition number {cond:.3e}); "
                                "increase the ridge") from None
    return scipy.linalg.cho_solve(factor, rhs)


def mp_compress(cfg: KernelConfig, C: FCurrent, mp: MPConfig = MPConfig(), callback=None) -> MPResult:
    """Compress ``C`` into few Dirac fcurrents by (orthogonal) matching pursuit.

    ``callback`` is called with each :class:`MPStep` as it is produced.
    Ties in the correlation argmax go to the lowest candidate index.
    """
    if len(C) == 0:
        raise ValueError("cannot compress an empty fcurrent")
    if mp.dictionary == "source":
        cand_x, cand_m = C.x, C.m
    else:
        cand_x, cand_m = grid_candidates(C, mp.grid_spacing, mp.grid_signal_spacing)
    M, q = len(cand_x), C.xi.shape[1]
    gamma_c = correlation_field(cfg, C, cand_x, cand_m)
    self_k = cfg.kf(np.zeros(M)) * cfg.kg(np.zeros(M))
    norm_c2 = fcurrent_inner_product(cfg, C, C)
    norm_c = math.sqrt(norm_c2)

    sel: list[int] = []
    alpha = np.zeros((0, q))
    Kc = np.zeros((M, 0))                  # kernel between candidates and selected supports
    residuals = [norm_c]
    steps = []
    orth = mp.variant == "orthogonal"
    floor = 1e-14 * norm_c

    while residuals[-1] > mp.epsilon * norm_c and len(sel) < mp.max_atoms:
        gamma = gamma_c - Kc @ alpha
        score = np.linalg.norm(gamma, axis=1)
        if orth and sel:
            score[sel] = -np.inf           # already spanned
        c = int(np.argmax(score))
        if not score[c] > floor:
            break
        if c in sel:                       # greedy re-selection: update in place
            alpha[sel.index(c)] += gamma[c] / self_k[c]
        else:
            sel.append(c)
            col = scalar_kernel(cfg, cand_x, cand_m, cand_x[c:c + 1], cand_m[c:c + 1])
            Kc = np.hstack([Kc, col])
            if orth:
                alpha = np.zeros((len(sel), q))
            else:
                alpha = np.vstack([alpha, gamma[c] / self_k[c]])
        G = Kc[sel]
        if orth:
            ridge = mp.ridge if mp.ridge is not None else 1e-10 * np.trace(G) / len(sel)
            alpha = _solve_gram(G, gamma_c[sel], ridge)
        r2 = norm_c2 - 2.0 * np.sum(alpha * gamma_c[sel]) + np.sum(alpha * (G @ alpha))
        residuals.append(math.sqrt(max(r2, 0.0)))
        rec = MPStep(len(sel) if orth else len(steps) + 1, c, tuple(cand_x[c]), tuple(cand_m[c]),
                     float(score[c]), residuals[-1] / norm_c)
        steps.append(rec)
        if callback is not None:
            callback(rec)

    idx = np.array(sel, dtype=int)
    atoms = FCurrent(cand_x[idx].reshape(-1, C.ambient_dim), cand_m[idx].reshape(-1, C.signal_dim),
                     alpha.reshape(-1, q), C.manifold_dim)
    return MPResult(atoms, residuals, residuals[-1] <= mp.epsilon * norm_c, steps)


def reconstruct(result: MPResult) -> FCurrent:
    """The compressed fcurrent ``Pi_n(C)``."""
    return result.atoms
