"""Two failure modes of older representations.

Colored currents cannot tell a signal f on a volume xi from 3f on xi/3.
Product-space currents jump when a curve is cut, however small the cut.
"""
import numpy as np

from fcurrents import KernelConfig, discretize, fcurrent_distance
from fcurrents.baselines import colored_current, colored_distance, colored_from_parts, product_distance
from fcurrents.core import FCurrent
from fcurrents.synth import gapped_curve_pair, straight_segment

cfg = KernelConfig("gaussian", 0.2, "gaussian", 0.5)

s = straight_segment(8, length=3.0, signal=2.0)
C = discretize(s)
c = colored_current(s)
c3 = colored_from_parts(C.x, 3 * C.m[:, 0], C.xi / 3)
print("colored distance after (f, xi) -> (3f, xi/3):", colored_distance(cfg, c, c3))
print("fcurrent distance for the same rescaling:   ",
      fcurrent_distance(cfg, C, FCurrent(C.x, 3 * C.m, C.xi / 3)))

print("\n gap      fcurrent   product")
for gap in (0.1, 0.01, 0.001):
    joined, cut = gapped_curve_pair(gap)
    print(f" {gap:<7g}  {fcurrent_distance(cfg, discretize(joined), discretize(cut)):.6f}"
          f"   {product_distance(cfg, joined, cut):.6f}")
print("(signal jumps from 0 to 1 across the gap)", np.round(joined.signal[9:13, 0], 1))
