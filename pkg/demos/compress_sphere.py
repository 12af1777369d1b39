"""Matching pursuit on a sphere carrying two polar signal caps.

A wider geometric kernel needs fewer Diracs to reach the same relative
residual.
"""
from fcurrents import KernelConfig, MPConfig, discretize, mp_compress, reconstruct, fcurrent_distance
from fcurrents.synth import sphere_with_caps

C = discretize(sphere_with_caps())
print(f"input: {len(C)} atoms")

for lg in (0.25, 0.5, 1.0):
    cfg = KernelConfig("gaussian", lg, "gaussian", 0.5)
    res = mp_compress(cfg, C, MPConfig(epsilon=0.05))
    err = fcurrent_distance(cfg, C, reconstruct(res)) / res.residual_norms[0]
    print(f"lambda_g={lg:<5} atoms={res.n_atoms:4d}  relative residual={err:.4f}")

# the step log: where the first few atoms went
res = mp_compress(KernelConfig("gaussian", 1.0, "gaussian", 0.5), C)
for s in res.steps[:5]:
    print(f"step {s.step}: x=({s.x[0]:+.2f}, {s.x[1]:+.2f}, {s.x[2]:+.2f}) m={s.m[0]:.0f} ratio={s.residual_ratio:.3f}")
