"""
The absolute-value network, end to end
======================================

f(x) = relu(x) + relu(-x) = |x| is the smallest network where the naive
layerwise product is visibly loose: each factor has operator norm sqrt(2),
so the product says 2, while the true Lipschitz constant is 1. Branching on
the two relu neurons recovers the exact value.
"""
import numpy as np

import lipcert as lc

net = lc.Network([
    lc.AffineLayer([[1.0], [-1.0]], [0.0, 0.0]),
    lc.relu(2),
    lc.AffineLayer([[1.0, 1.0]], [0.0]),
])

print("f(-3) =", net.forward([-3.0]), " f(2) =", net.forward([2.0]))

pair = lc.NormPair(2, 2)
omega = lc.Polyhedron.universe(1)

# the cheap bounds first
print("layerwise product bound:", lc.layerwise_bound(net, pair))
print("one-shot interval bound:", lc.symprop_bound(net, omega, pair))
print("sampled lower bound:    ", lc.sampled_lower_bound(net, omega, pair, 100))

# exact branch-and-bound
res = lc.solve(net, omega)
print("branch-and-bound: glb=%.12g gub=%.12g status=%s iterations=%d"
      % (res.glb, res.gub, res.status, res.iterations))

# brute force over the four activation patterns agrees
print("brute-force oracle:", lc.brute_force_oracle(net, omega, pair))

# restricted to a region on one side of the kink the function is linear,
# so the constant drops out of the symbolic pass with zero branching
for lo, hi in [(1.0, 2.0), (-2.0, -1.0), (-1.0, 1.0)]:
    region = lc.Polyhedron.from_box([lo], [hi])
    res = lc.solve(net, region)
    print("L on [%5.1f, %4.1f] = %.12g  (iterations %d)"
          % (lo, hi, res.glb, res.iterations))
