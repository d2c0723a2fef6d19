"""Cheap comparison bounds: layerwise product, one-shot interval bound, sampling."""
from __future__ import annotations

import numpy as np

from .bnb import initial_subproblem, upper_bound
from .exceptions import InfeasibleRegionError, SamplingError, UnsupportedNormError
from .network import Network
from .norms import NormPair, induced_norm
from .polyhedra import Polyhedron, coordinate_bounds, is_feasible

BOUNDARY_TOL = 1e-9
DEFAULT_SAMPLE_BOX = (-10.0, 10.0)


def layerwise_bound(net: Network, pair: NormPair) -> float:
    """Product of per-layer operator norms; valid only for p == q."""
    if pair.p != pair.q:
        raise UnsupportedNormError(
            f"layerwise bound requires p == q, got {pair}"
        )
    out = 1.0
    for aff in net.affine:
        out *= induced_norm(aff.W, pair)
    for act in net.activations:
        out *= act.activation_lipschitz(pair)
    return out


def symprop_bound(net: Network, omega: Polyhedron, pair: NormPair) -> float:
    """Upper bound of the root subproblem: one symbolic pass, no branching."""
    root = initial_subproblem(net, omega)
    return upper_bound(root, net, pair)


def sampled_lower_bound(net: Network, omega: Polyhedron, pair: NormPair,
                        n_samples: int, seed: int = 0,
                        default_box=DEFAULT_SAMPLE_BOX) -> float:
    """Max Jacobian norm over uniform samples from omega; always a lower bound.

    Samples are drawn by rejection from the tightest box around omega;
    unbounded coordinates fall back to default_box. Samples whose forward
    pass grazes a piece boundary are kept as samples but skipped as
    witnesses. Returns 0.0 when n_samples is 0 or every sample is flagged.
    """
    if n_samples < 0:
        raise ValueError("n_samples must be non-negative")
    if n_samples == 0:
        return 0.0
    if omega.dim != net.input_dim:
        raise ValueError(f"region dimension {omega.dim} does not match input {net.input_dim}")
    if not is_feasible(omega):
        raise InfeasibleRegionError("input region is empty")
    d_lo, d_hi = float(default_box[0]), float(default_box[1])
    if not d_lo < d_hi:
        raise ValueError("default sample box must have positive width")
    lo, hi = coordinate_bounds(omega)
    width = d_hi - d_lo
    for i in range(omega.dim):
        finite_lo = bool(np.isfinite(lo[i]))
        finite_hi = bool(np.isfinite(hi[i]))
        if not finite_lo:
            lo[i] = d_lo
        if not finite_hi:
            hi[i] = d_hi
        # a finite bound outside the default box would invert the interval;
        # keep the finite side and restore the default width
        if lo[i] > hi[i]:
            if finite_lo and not finite_hi:
                hi[i] = lo[i] + width
            elif finite_hi and not finite_lo:
                lo[i] = hi[i] - width
    rng = np.random.default_rng(seed)
    best = 0.0
    accepted = 0
    attempts = 0
    cap = 100 * n_samples
    check = omega.m > 0
    while accepted < n_samples:
        if attempts >= cap:
            raise SamplingError(
                f"rejection sampling produced {accepted}/{n_samples} points "
                f"after {attempts} draws"
            )
        attempts += 1
        x = rng.uniform(lo, hi)
        if check and not omega.contains(x):
            continue
        accepted += 1
        J, flagged = net.jacobian_at(x, BOUNDARY_TOL)
        if flagged:
            continue
        best = max(best, induced_norm(J, pair))
    return best
