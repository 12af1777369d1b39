"""Rotating a crenellated signal on the unit circle.

The L1 distance between a square-wave signal and its rotation grows with
the number of crenels, while the fcurrent distance stays of order dtheta
whatever the crenel count.
"""
from fcurrents.experiments import CRENEL_KERNELS, crenel_experiment, linear_fit_r2

dthetas = [0.005, 0.01, 0.02, 0.04]

for crenels in (4, 16):
    rows = crenel_experiment(dthetas, segments=512, crenels=crenels)
    print(f"{crenels} crenels")
    print("  dtheta     W'        L1      L1/W'")
    for dt, w, l1 in rows:
        print(f"  {dt:<8g} {w:8.5f} {l1:8.4f} {l1 / w:7.2f}")
    w = [r[1] for r in rows]
    print(f"  linear fit of W' vs dtheta: R^2 = {linear_fit_r2(dthetas, w):.4f}")

print("kernels:", CRENEL_KERNELS)
