"""How the reconstruction responds to small changes in the eigenvalues.

We fix a random spectrum, perturb it along one direction with shrinking
size delta, and watch the ratio of kernel change to spectral distance.  A
ratio that stays flat as delta -> 0 is what a Lipschitz-type stability
estimate predicts.  A seeded ensemble then gives sample maxima of every
ratio in the ball of radius 1 around {k^2}.
"""
import numpy as np

from convkernel import SolverConfig, random_spectrum
from convkernel import stability

cfg = SolverConfig()
rng = np.random.default_rng(7)
base = random_spectrum(rng, 16, r=0.5)
direction = rng.standard_normal(16)

print("delta     Lambda      ||dM||_2,pi   ratio    ||dM||_inf,pi/Lambda1")
for delta, rep in stability.delta_sweep(base, direction, [1e-1, 1e-2, 1e-3, 1e-4], cfg):
    print(f"{delta:7.0e}  {rep.lambda_dist:.3e}  {rep.dM_l2w:.3e}   "
          f"{rep.ratios['M_l2w/Lambda']:.4f}   {rep.ratios['M_infw/Lambda1']:.4f}")

rows = stability.ensemble(seed=2024, count=20, r=1.0, K=16, cfg=cfg)
print("\nsample maxima over 20 random pairs (r = 1):")
for name, value in stability.summarize(rep for _, rep in rows).items():
    print(f"  {name:16s} {value:.4f}")
print("The last step M = 2N - 1*N*N obeys the explicit bound 2 + 2 sqrt(pi) = "
      f"{2 + 2 * np.sqrt(np.pi):.3f} on M_l2w/N_l2w.")
