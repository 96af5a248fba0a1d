"""
Counting statistics
===================

Poisson replicates at one post-selection: do the propagated error bars
describe the scatter? Pulls (estimate - truth) / sigma should be unit normal.
Then the same data reduced without the contrast correction.
"""
import math

import numpy as np

from spinweak import CampaignConfig, DetectorModel, EvolutionModel
from spinweak.campaign import montecarlo_campaign, montecarlo_pulls

cfg = CampaignConfig(
    phi=math.pi / 4, model=EvolutionModel.REEXP, detector=DetectorModel(contrast=0.8, seed=3),
    contrast_policy="uniform", quartet_counts=5e4, replicates=400,
)
pulls, truth = montecarlo_pulls(cfg, theta=-math.pi / 6)
print("truth (re, im, |W|):", np.round(truth, 4))
print("pull mean:", np.round(pulls.mean(axis=0), 3))
print("pull std: ", np.round(pulls.std(axis=0, ddof=1), 3))

# W = 0 with an 80% contrast interferometer, modulus left uncorrected.
# Even corrected, arccos near r_x = 1 turns noise into a small positive offset.
for policy in ("none", "paper"):
    grid = cfg.replace(phi=0.0, theta_start=math.pi / 2, theta_stop=2.0, theta_count=2,
                       contrast_policy=policy, replicates=50)
    row = montecarlo_campaign(grid)[0]
    print(f"policy {policy:5s}: mean |W| = {row['mod_mean']:.3f}  (truth {row['mod_true']:.3f})")
print(f"arccos(0.8)/alpha = {math.acos(0.8) / cfg.alpha:.3f}")
