"""Quantum counting: estimate the number of marked items by phase estimation."""
import math

import numpy as np

from groverlab.count import concentration_mass, count_marked, fast_distribution
from groverlab.sv import OracleSpec

rng = np.random.default_rng(11)
n, a = 8, 10
oracle = OracleSpec(n, rng.choice(1 << n, size=a, replace=False))
theta = math.asin(math.sqrt(a / (1 << n)))
print(f"true count {a} of {1 << n}")
for t in (4, 6, 8, 10, 12):
    ests = [count_marked(oracle, t, rng).a_tilde for _ in range(300)]
    mass = concentration_mass(fast_distribution(theta, t), theta, t)
    print(f"t={t:2d}  median estimate {np.median(ests):7.3f}  "
          f"median |error| {np.median(np.abs(np.array(ests) - a)):6.3f}  mass within one code {mass:.3f}")
