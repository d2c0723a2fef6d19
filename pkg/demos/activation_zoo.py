"""
Beyond ReLU: exact constants for sorting, pooling, and spline layers
====================================================================

Every activation here is continuous piecewise linear, so the solver treats
them all the same way: enumerate or bound the linear pieces a region can
reach. This demo builds one small net per activation family, solves each
to optimality, and checks the result against the exhaustive oracle.
"""
import numpy as np

import lipcert as lc

rng = np.random.default_rng(3)
omega = lc.Polyhedron.from_box([-1.0, -1.0], [1.0, 1.0])


def sandwich(act):
    """Random affine, the activation under test, random affine."""
    return lc.Network([
        lc.AffineLayer(rng.normal(size=(act.in_width, 2)), rng.normal(size=act.in_width)),
        act,
        lc.AffineLayer(rng.normal(size=(1, act.out_width)), [0.0]),
    ])


zoo = [
    ("relu", sandwich(lc.relu(4))),
    ("leaky_relu", sandwich(lc.leaky_relu(4, 0.1))),
    ("hard_tanh spline", sandwich(
        lc.spline(3, [-1.0, 1.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 1.0]))),
    ("maxmin", sandwich(lc.maxmin(4))),
    ("fullsort", sandwich(lc.fullsort(3))),
    ("groupsort(3)", sandwich(lc.groupsort(6, 3))),
    ("maxpool", sandwich(lc.MaxPoolActivation(4, [(0, 1), (2, 3)]))),
]

pair = lc.NormPair(2.0, 2.0)
print("%-18s %12s %12s %6s" % ("activation", "solver", "oracle", "iters"))
for name, net in zoo:
    res = lc.solve(net, omega)
    oracle = lc.brute_force_oracle(net, omega, pair)
    assert res.status == "exact"
    assert abs(res.glb - oracle) <= 1e-9 * max(1.0, oracle)
    print("%-18s %12.6f %12.6f %6d" % (name, res.glb, oracle, res.iterations))

# sorting layers are 1-Lipschitz in every norm, so a pure sorting net
# composed with an isometry keeps the constant of the affine parts
iso = lc.Network([
    lc.AffineLayer(np.eye(4), np.zeros(4)),
    lc.fullsort(4),
    lc.AffineLayer(np.eye(4) * 2.0, np.zeros(4)),
])
box = lc.Polyhedron.from_box([-1.0] * 4, [1.0] * 4)
for spec in ("1:1", "2:2", "inf:inf"):
    res = lc.solve(iso, box, lc.SolverConfig(norm=lc.NormPair.parse(spec)))
    print("fullsort isometry, %-7s L = %.6f" % (spec, res.glb))
