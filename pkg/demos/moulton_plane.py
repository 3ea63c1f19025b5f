"""The Moulton plane: lines of negative slope bend where they cross the
y-axis, and Desargues configurations stop closing."""

import sys

import numpy as np

from planelab import Affine, plane_from_id
from planelab.plane_engine import join, meet
from planelab.cli import RenderSpec, render_svg
from planelab.polarities import get_polarity, unital_probe
from planelab.verification import configuration_test, smoothness_probe

plane = plane_from_id("moulton:k=2")

# a line through a point on each side of the axis
p, q = Affine(np.array([-2.0]), np.array([3.0])), Affine(np.array([1.0]), np.array([-1.0]))
L = join(plane, p, q)
print("join of (-2, 3) and (1, -1):", L)
for x in (-2.0, -1.0, 0.0, 0.5, 1.0):
    print(f"  y({x:+.1f}) = {plane.cs.tau(L.s, np.array([x]), L.t)[0]:+.4f}")

M = join(plane, Affine(np.array([-1.0]), np.array([-1.0])), Affine(np.array([1.0]), np.array([1.0])))
print("it meets the diagonal y = x in", meet(plane, L, M))

res = configuration_test(plane, "desargues", None, 100, 0)
print(f"\nDesargues over 100 random configurations: max miss {res.max_discrepancy:.3f}, {res.failures} failures")
classical = configuration_test("classical-r", "desargues", None, 100, 0)
print(f"the same test in the real plane: max miss {classical.max_discrepancy:.1e}")

jump = smoothness_probe("moulton:k=2", "slope-sign boundary", 1, at=[-1.0])
print(f"\nd(s o x)/ds at s = 0, x = -1 jumps by {jump.max_jump:g} between the two sides")

probe = unital_probe(get_polarity(plane, "pi"), 200, 0)
print(f"absolute points of the polarity pi: {len(probe.samples)} samples, local dimension {probe.local_dimension}")

out = sys.argv[1] if len(sys.argv) > 1 else "moulton.svg"
render_svg(RenderSpec("moulton:k=2", overlay="pi", out=out))
print("picture written to", out)
