"""
Anytime behavior: a sound bracket at every iteration
====================================================

Branch-and-bound keeps a global lower bound (best exactly-solved piece so
far) and a global upper bound (worst open subproblem). The pair is valid
whenever the search stops: on a time limit, an iteration budget, or the
early-stop ratio theta. This demo prints the bracket trace and shows the
three ways to stop early.
"""
import numpy as np

import lipcert as lc

rng = np.random.default_rng(12)
net = lc.Network([
    lc.AffineLayer(rng.normal(size=(4, 3)), rng.normal(size=4)),
    lc.relu(4),
    lc.AffineLayer(rng.normal(size=(4, 4)), rng.normal(size=4)),
    lc.maxmin(4),
    lc.AffineLayer(rng.normal(size=(2, 4)), rng.normal(size=2)),
])
omega = lc.Polyhedron.from_box([-1.0] * 3, [1.0] * 3)

res = lc.solve(net, omega)
print("exact value %.9f after %d iterations" % (res.glb, res.iterations))
print("bracket trace (glb, gub):")
for i, (lo, hi) in enumerate(res.bounds_history):
    print("  iter %3d:  %.9f  %.9f" % (i, lo, hi))

# stop when the bracket ratio reaches theta
for theta in (2.0, 1.25, 1.0):
    res = lc.solve(net, omega, lc.SolverConfig(theta=theta))
    print("theta=%.2f: [%.6f, %.6f] status=%s iterations=%d"
          % (theta, res.glb, res.gub, res.status, res.iterations))

# an iteration budget returns early with the bracket reached so far
res = lc.solve(net, omega, lc.SolverConfig(max_iterations=2))
print("2 iterations: [%.6f, %.6f] status=%s" % (res.glb, res.gub, res.status))

# seeding the lower bound with sampled Jacobians prunes the frontier
plain = lc.solve(net, omega)
seeded = lc.solve(net, omega, lc.SolverConfig(sample_count=5000))
print("peak open subproblems: %d unseeded, %d seeded"
      % (plain.peak_heap_size, seeded.peak_heap_size))
