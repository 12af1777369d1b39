"""Tensor-product RKHS metric on fcurrents.

Kernels are radial scalar profiles written as functions of the squared
distance ``r2``:

* gaussian: ``exp(-r2 / s**2)`` (no factor 2 in the denominator)
* cauchy:   ``1 / (1 + r2 / s**2)``
* constant: ``1`` (signal kernel only; the infinite-width limit, which
  turns the fcurrent metric into the plain currents metric)

The inner product of two atoms is ``k_f(|m1 - m2|) k_g(|x1 - x2|) <xi1, xi2>``.
Sums over atom pairs are evaluated in fixed-size row chunks whose partial
results are added in chunk order, so the value does not depend on the
number of worker threads.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import DiracFCurrent, DimensionMismatchError, FCurrent, check_compatible

GEOM_KINDS = ("gaussian", "cauchy")
SIG_KINDS = ("gaussian", "cauchy", "constant")
CHUNK = 2048


class KernelSpecError(ValueError):
    pass


@dataclass(frozen=True)
class RadialKernel:
    kind: str
    width: float = 1.0

    def __post_init__(self):
        if self.kind not in SIG_KINDS:
            raise KernelSpecError(f"unknown kernel kind {self.kind!r}")
        if self.kind != "constant" and not (self.width > 0 and math.isfinite(self.width)):
            raise KernelSpecError(f"kernel width must be positive, got {self.width!r}")

    def __call__(self, r2):
        """Kernel value as a function of the squared distance."""
        r2 = np.asarray(r2, dtype=float)
        if self.kind == "gaussian":
            return np.exp(-r2 / self.width ** 2)
        if self.kind == "cauchy":
            return 1.0 / (1.0 + r2 / self.width ** 2)
        return np.ones_like(r2)

    def deriv(self, r2):
        """Derivative of the profile with respect to the squared distance."""
        r2 = np.asarray(r2, dtype=float)
        s2 = self.width ** 2
        if self.kind == "gaussian":
            return -np.exp(-r2 / s2) / s2
        if self.kind == "cauchy":
            return -1.0 / (s2 * (1.0 + r2 / s2) ** 2)
        return np.zeros_like(r2)

    def spec(self) -> str:
        return "constant" if self.kind == "constant" else f"{self.kind}:{self.width!r}"


def parse_kernel_spec(text: str) -> RadialKernel:
    """Parse ``<kind>:<width>`` (e.g. ``gaussian:0.04``) or ``constant``."""
    text = text.strip()
    if text == "constant":
        return RadialKernel("constant")
    kind, sep, width = text.partition(":")
    if not sep or kind not in SIG_KINDS or kind == "constant":
        raise KernelSpecError(f"bad kernel spec {text!r}; expected <gaussian|cauchy>:<width> or constant")
    try:
        w = float(width)
    except ValueError:
        raise KernelSpecError(f"bad kernel width in {text!r}") from None
    return RadialKernel(kind, w)


@dataclass(frozen=True)
class KernelConfig:
    """Geometric kernel (on positions) tensored with a signal kernel."""

    geom_kind: str
    geom_width: float
    sig_kind: str = "constant"
    sig_width: float = 1.0

    def __post_init__(self):
        if self.geom_kind not in GEOM_KINDS:
            raise KernelSpecError(f"geometric kernel must be one of {GEOM_KINDS}, got {self.geom_kind!r}")
        # validates widths
        RadialKernel(self.geom_kind, self.geom_width)
        RadialKernel(self.sig_kind, self.sig_width)

    @classmethod
    def from_specs(cls, kg: str, kf: str = "constant") -> "KernelConfig":
        g, f = parse_kernel_spec(kg), parse_kernel_spec(kf)
        if g.kind == "constant":
            raise KernelSpecError("the geometric kernel cannot be constant")
        return cls(g.kind, g.width, f.kind, f.width)

    @property
    def kg(self) -> RadialKernel:
        return RadialKernel(self.geom_kind, self.geom_width)

    @property
    def kf(self) -> RadialKernel:
        return RadialKernel(self.sig_kind, self.sig_width)

    def currents_only(self) -> "KernelConfig":
        return KernelConfig(self.geom_kind, self.geom_width, "constant", 1.0)


def sqdist(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix of squared Euclidean distances between the rows of a and b."""
    diff = a[:, None, :] - b[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def scalar_kernel(cfg: KernelConfig, x1, m1, x2, m2) -> np.ndarray:
    """Scalar Gram block ``k_f(|m_i - m'_j|) k_g(|x_i - x'_j|)``."""
    return cfg.kf(sqdist(m1, m2)) * cfg.kg(sqdist(x1, x2))


def eval_geom_kernel(cfg: KernelConfig, x1, x2) -> float:
    x1, x2 = np.atleast_1d(np.asarray(x1, float)), np.atleast_1d(np.asarray(x2, float))
    if x1.shape != x2.shape:
        raise DimensionMismatchError("points must have the same dimension")
    return float(cfg.kg(np.sum((x1 - x2) ** 2)))


def eval_sig_kernel(cfg: KernelConfig, m1, m2) -> float:
    m1, m2 = np.atleast_1d(np.asarray(m1, float)), np.atleast_1d(np.asarray(m2, float))
    if m1.shape != m2.shape:
        raise DimensionMismatchError("signals must have the same dimension")
    return float(cfg.kf(np.sum((m1 - m2) ** 2)))


def dirac_inner_product(cfg: KernelConfig, a: DiracFCurrent, b: DiracFCurrent) -> float:
    if a.xi.shape != b.xi.shape:
        raise DimensionMismatchError("volume elements must have the same dimension")
    return eval_sig_kernel(cfg, a.m, b.m) * eval_geom_kernel(cfg, a.x, b.x) * float(a.xi @ b.xi)


def _chunk_sum(cfg, A, B, lo, hi):
    K = scalar_kernel(cfg, A.x[lo:hi], A.m[lo:hi], B.x, B.m)
    return float(np.sum(K * (A.xi[lo:hi] @ B.xi.T)))


def fcurrent_inner_product(cfg: KernelConfig, A: FCurrent, B: FCurrent,
                           threads: int | None = None, chunk: int = CHUNK) -> float:
    """``sum_{i,j} <a_i, b_j>`` over all atom pairs."""
    check_compatible(A, B)
    if len(A) == 0 or len(B) == 0:
        return 0.0
    bounds = [(lo, min(lo + chunk, len(A))) for lo in range(0, len(A), chunk)]
    if threads and threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda b: _chunk_sum(cfg, A, B, *b), bounds))
    else:
        parts = [_chunk_sum(cfg, A, B, lo, hi) for lo, hi in bounds]
    total = 0.0
    for p in parts:
        total += p
    return total


def fcurrent_norm(cfg: KernelConfig, A: FCurrent, **kw) -> float:
    return math.sqrt(max(fcurrent_inner_product(cfg, A, A, **kw), 0.0))


def _atom_keys(C: FCurrent):
    return [row.tobytes() for row in np.hstack([C.x, C.m, C.xi])]


def cancel_common_atoms(A: FCurrent, B: FCurrent) -> tuple[FCurrent, FCurrent]:
    """Drop atoms present bit-for-bit in both A and B (as multisets).

    ``A - B`` is unchanged, but shared parts no longer go through the
    cancellation-prone expansion of the squared distance.
    """
    check_compatible(A, B)
    pool: dict[bytes, list[int]] = {}
    for j, key in enumerate(_atom_keys(B)):
        pool.setdefault(key, []).append(j)
    keep_a = np.ones(len(A), bool)
    keep_b = np.ones(len(B), bool)
    for i, key in enumerate(_atom_keys(A)):
        hits = pool.get(key)
        if hits:
            keep_a[i] = False
            keep_b[hits.pop()] = False
    if keep_a.all() and keep_b.all():
        return A, B

    def sub(C, keep):
        return FCurrent(C.x[keep], C.m[keep], C.xi[keep], C.manifold_dim)
    return sub(A, keep_a), sub(B, keep_b)


def squared_distance(cfg: KernelConfig, A: FCurrent, B: FCurrent, **kw) -> float:
    """``<A,A> - 2<A,B> + <B,B>``, set to 0 when negative within rounding.

    Atoms shared exactly by A and B are cancelled first.
    """
    A, B = cancel_common_atoms(A, B)
    aa = fcurrent_inner_product(cfg, A, A, **kw)
    bb = fcurrent_inner_product(cfg, B, B, **kw)
    ab = fcurrent_inner_product(cfg, A, B, **kw)
    d2 = aa - 2.0 * ab + bb
    if d2 < 0:
        if d2 < -1e-12 * (abs(aa) + abs(bb)):
            raise ArithmeticError(f"negative squared distance {d2!r}; kernel not positive definite?")
        d2 = 0.0
    return d2


def fcurrent_distance(cfg: KernelConfig, A: FCurrent, B: FCurrent, **kw) -> float:
    return math.sqrt(squared_distance(cfg, A, B, **kw))


def gram_matrix(cfg: KernelConfig, x, m) -> np.ndarray:
    """Scalar Gram matrix of the supports ``(x_i, m_i)``."""
    x = np.asarray(x, float)
    m = np.asarray(m, float)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if x.ndim != 2 or len(x) == 0:
        raise ValueError("gram_matrix needs a nonempty list of supports")
    if len(x) != len(m):
        raise DimensionMismatchError("positions and signals must have the same length")
    return scalar_kernel(cfg, x, m, x, m)
