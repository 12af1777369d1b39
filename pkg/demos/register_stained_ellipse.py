"""Registering two stained ellipses with and without the signal kernel.

With a Gaussian signal kernel the stained arc of the source is driven onto
the stained arc of the target. With a constant signal kernel only the
geometry is matched and the stain ends up wherever the contour goes.
"""
import math

import numpy as np

from fcurrents import KernelConfig, RegistrationConfig, register
from fcurrents.synth import ellipse_stain

src = ellipse_stain(64, 1.0, 0.6, stain_center=0.0, stain_width=0.7)
tgt = ellipse_stain(64, 1.1, 0.7, stain_center=0.6, stain_width=0.7)
goal = np.array([1.1 * math.cos(0.6), 0.7 * math.sin(0.6)])

for label, kf in (("gaussian signal kernel", ("gaussian", 0.3)), ("constant signal kernel", ("constant", 1.0))):
    cfg = RegistrationConfig(KernelConfig("gaussian", 0.25, *kf), sigma_v=0.5, timesteps=10, lam=10.0, max_iters=300)
    res = register(cfg, src, tgt)
    k0, a0, _ = res.energy_trace[0]
    k1, a1, _ = res.energy_trace[-1]
    miss = np.linalg.norm(res.deformed_source.vertices[0] - goal)
    print(f"{label}: {res.iterations} iterations ({res.stop_reason}), "
          f"attachment {a0:.3f} -> {a1:.4f}, kinetic {k1:.3f}, stain midpoint off by {miss:.3f}")
