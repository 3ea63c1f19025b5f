"""Mutated quaternions c o z = mu cz + (1 - mu) zc give a non-Desarguesian
8-dimensional plane. Its polarity rho-bar has a 7-dimensional unital, and
a sharply transitive motion group moves the origin to every affine
absolute point."""

import numpy as np

from planelab import Affine, get_polarity
from planelab.collineations import dimension_audit, draw_motion, membership, motion_test, recover_unital_motion
from planelab.polarities import classify_line, random_secant, unital_probe
from planelab.verification import check_algebra_axioms

MUT = "mutation-h:mu=0.75"
pol = get_polarity(MUT, "rho-bar")
cs = pol.plane.cs

for cls in ("semifield", "skewfield"):
    rep = check_algebra_axioms(cs, cls, 1000, 0)
    print(f"{cls:>9} laws: {'hold' if rep.ok else 'fail'}" + (f" (witness {rep.witnesses[0]['check']})" if rep.witnesses else ""))

probe = unital_probe(pol, 500, 0)
print(f"\nunital: local dimension {probe.local_dimension} at {len(probe.probe_dimensions)} probe points")
rng = np.random.default_rng(1)
L, _ = random_secant(pol, rng)
print("a secant meets it in dimension", classify_line(pol, L).local_dimension)

a, b = probe.samples[0, :4], probe.samples[0, 4:]
coll, res = recover_unital_motion(pol, a, b)
img = coll.apply(Affine(np.zeros(4), np.zeros(4)))
print(f"\nmotion sending the origin to a unital point: constraint residual {res:.1e}, image error {np.linalg.norm(img.x - a) + np.linalg.norm(img.y - b):.1e}")
print("it satisfies the closed-form motion conditions:", membership(pol, coll))

agree = 0
for k in range(40):
    r = motion_test(pol, draw_motion(pol, rng, member=k % 2 == 0), 20, k)
    agree += r.condition_membership == r.commutes
print(f"closed form vs commuting with the polarity: {agree}/40 agree")
params, rank, dim = dimension_audit(pol)
print(f"motion group: {params} parameters, {rank} independent constraints, dimension {dim}")
