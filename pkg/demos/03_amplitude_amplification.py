"""Amplitude amplification around a Haar-random state preparation.

Shows the rotation angle, the eigenvalue check on the two-dimensional plane
and the success rate of the known-p and unknown-p procedures.
"""
import numpy as np

from groverlab._random import haar_unitary
from groverlab.amplify import amplify_known, amplify_unknown, eigen_structure, make_amplifier

rng = np.random.default_rng(5)
U = haar_unitary(64, rng)
amp = make_amplifier(U, [3])
es = eigen_structure(amp)
print(f"p = {amp.p:.5f}, theta = {amp.theta:.5f}")
print(f"eigenvalue residuals: {es.residual_plus:.1e}, {es.residual_minus:.1e}")

known = [amplify_known(amp, rng) for _ in range(2000)]
unknown = [amplify_unknown(amp, rng=rng) for _ in range(2000)]
print(f"known p:   success {np.mean([o.success for o in known]):.3f}, "
      f"{known[0].iterations} iterations each")
print(f"unknown p: success {np.mean([o.success for o in unknown]):.3f}, "
      f"mean iterations {np.mean([o.iterations for o in unknown]):.2f}")
