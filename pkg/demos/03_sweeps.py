"""
Polar-angle sweeps
==================

Ideal sweeps of the post-selection polar angle. The re-exponentiated model
returns the closed form; the exact model shows the finite-coupling bias,
which shrinks as alpha^2.
"""
import math

import numpy as np

from spinweak import CampaignConfig, Coupling, EvolutionModel, PostSelection, SPIN_X_PLUS
from spinweak import closed_form, extract, intensity_quartet, polarimeter_pair, sweep_campaign

for model in (EvolutionModel.EXACT, EvolutionModel.REEXP):
    rows = sweep_campaign(CampaignConfig(phi=0.0, model=model, theta_count=13))
    print(f"\nphi = 0, {model.value}")
    print("theta     re_est     re_true")
    for r in rows:
        print(f"{r['theta']:+.3f}   {r['re_est']:+9.4f}  {r['re_true']:+9.4f}  {r['clamped_flags']}")

rows = sweep_campaign(CampaignConfig(phi=math.pi / 2, model=EvolutionModel.REEXP))
mods = np.array([r["mod_est"] for r in rows if not r["clamped_flags"]])
print(f"\nphi = pi/2: |W| between {mods.min():.12f} and {mods.max():.12f}")

# bias of the exact model against the weak-coupling limit
post = PostSelection(0.6, math.pi / 4)
w = closed_form(post)
print("\nalpha(deg)   |error|")
for deg in (16, 8, 4, 2, 1):
    c = Coupling(math.radians(deg))
    e = extract(intensity_quartet(SPIN_X_PLUS, post, c), polarimeter_pair(SPIN_X_PLUS, post, c), c, poisson=False)
    print(f"{deg:>6}      {abs(complex(e) - complex(w)):.3e}")
