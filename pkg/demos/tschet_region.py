"""Planes glued from two halves of the real plane along the y-axis. Desargues
fails inside every disk we try, and S_r is isomorphic to S_(1/r)."""

import numpy as np

from planelab.plane_engine import ReciprocalIsomorphism
from planelab.verification import check_plane_axioms, nowhere_desarguesian_sample, smoothness_probe

rep = check_plane_axioms("tschet:r=2", 2000, 0)
print(f"tschet(2) plane axioms on 2000 samples: {'ok' if rep.ok else 'broken'}, max residual {rep.max_residual:.1e}")

for i, d in enumerate(nowhere_desarguesian_sample("tschet:r=2", disks=8, seed=3)):
    print(f"  disk {i}: worst miss {d.max_discrepancy:.3f} after {d.trials} configurations")

print("\nsmoothness at the gluing line:", smoothness_probe("tschet:r=3").max_jump)

for r in (3.0, 0.5):
    iso = ReciprocalIsomorphism(r)
    worst, _ = iso.incidence_defect(iso.source.sample_flags(np.random.default_rng(0), 2000))
    print(f"S_{r:g} -> S_{1 / r:g}: worst incidence defect {worst:.1e}")
