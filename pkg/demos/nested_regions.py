"""
Local constants grow into the global one
========================================

The Lipschitz constant over a region can only grow as the region grows:
fewer activation patterns are reachable locally, so fewer linear pieces
compete in the maximum. This demo certifies a small MaxMin network on a
sequence of nested boxes and watches the exact constant increase toward
the global value.
"""
import numpy as np

import lipcert as lc

rng = np.random.default_rng(7)
net = lc.Network([
    lc.AffineLayer(rng.normal(size=(4, 2)), rng.normal(size=4)),
    lc.maxmin(4),
    lc.AffineLayer(rng.normal(size=(4, 4)), rng.normal(size=4)),
    lc.relu(4),
    lc.AffineLayer(rng.normal(size=(1, 4)), rng.normal(size=1)),
])

pair = lc.NormPair(2, 2)
print("radius    exact L    iterations  subproblems")
for r in (0.05, 0.1, 0.25, 0.5, 1.0, 2.0):
    omega = lc.Polyhedron.from_box([-r, -r], [r, r])
    res = lc.solve(net, omega, lc.SolverConfig(norm=pair))
    print("%6.2f  %10.6f  %10d  %11d"
          % (r, res.glb, res.iterations, res.subproblems_created))

res = lc.solve(net, lc.Polyhedron.universe(2), lc.SolverConfig(norm=pair))
print("global  %10.6f  %10d  %11d"
      % (res.glb, res.iterations, res.subproblems_created))

# the same certificate from the brute-force side, as a sanity check
oracle = lc.brute_force_oracle(net, lc.Polyhedron.universe(2), pair)
print("oracle  %10.6f" % oracle)
