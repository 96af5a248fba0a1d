"""
Weak values of the path qubit
=============================

Pre-select the spin along +x, post-select on a point of the Bloch sphere and
look at W = <f|sz|i>/<f|i>. Near orthogonal post-selection the real part
leaves the eigenvalue range [-1, 1].
"""
import math

import numpy as np

from spinweak import PostSelection, SIGMA_Z, SPIN_X_PLUS, closed_form, weak_value
from spinweak.weakvalue import overlap_sq

# the ratio definition and the closed form agree
post = PostSelection(5 * math.pi / 6, 0.0)
print("ratio      ", complex(weak_value(SIGMA_Z, SPIN_X_PLUS, post.state)))
print("closed form", complex(closed_form(post)))

# phi = 0: real weak values, anomalous near theta = -pi/2
print("\ntheta     overlap^2   Re W")
for theta in np.linspace(-math.pi, math.pi, 13):
    p = PostSelection(theta, 0.0)
    if overlap_sq(p) < 1e-3:
        print(f"{theta:+.3f}   {overlap_sq(p):.2e}   (orthogonal, skipped)")
        continue
    print(f"{theta:+.3f}   {overlap_sq(p):.2e}   {closed_form(p).re:+.4f}")

# phi = pi/2: unit modulus, real and imaginary parts in quadrature
print("\ntheta     Re W      Im W      |W|")
for theta in np.linspace(-math.pi, math.pi, 9):
    w = closed_form(PostSelection(theta, math.pi / 2))
    print(f"{theta:+.3f}   {w.re:+.4f}   {w.im:+.4f}   {w.modulus:.4f}")
