"""Symbolic forward analysis over an input region.

The analysis walks the network once, carrying every post-activation value as
an affine expression B x_sym + b over the original inputs plus one auxiliary
symbol per undecided neuron met so far. Per activation layer it records which
pieces stay feasible over the reachable set, the interval hull of their
affine parameters, and the set of undecided (star) neurons.

A neuron counts as decided when some feasible piece's preimage contains the
whole reachable set, i.e. the activation is affine on the entire region (ties
resolved toward the lowest piece index), or when every feasible piece agrees
on the neuron's affine parameters. Otherwise it is a star neuron; its exact
value is replaced by a fresh auxiliary variable constrained only by the box
hull of the per-piece output ranges, which keeps the reachable-set
overapproximation sound for all later layers.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .activations import ComponentwiseActivation, PwlActivation
from .exceptions import InfeasibleRegionError, LpSolverError
from .intervals import IntervalMatrix
from .network import Network
from .polyhedra import (
    FEAS_TOL,
    Polyhedron,
    affine_preimage,
    is_feasible,
    linear_bounds,
    stack,
    support_value,
)


@dataclass
class LayerAnalysis:
    """Outcome of classifying one activation layer over a reachable set."""

    stars: list[int]
    lam_mat: IntervalMatrix
    lam_vec: IntervalMatrix
    fixed_T: np.ndarray  # rows of star neurons are zero
    fixed_t: np.ndarray
    aux_bounds: dict = field(default_factory=dict)  # star neuron -> (lo, hi)


@dataclass
class InitPattern:
    """Per-layer activation state produced by the symbolic pass."""

    lam_mats: tuple[IntervalMatrix, ...]
    lam_vecs: tuple[IntervalMatrix, ...]
    first_star_layer: int  # 1-based; depth + 1 when the whole net is decided
    stars: tuple[tuple[int, ...], ...]


def _spline_image(slope: float, intercept: float, lo: float, hi: float):
    """Range of s*z + i over [lo, hi] (closed, possibly infinite)."""
    if slope == 0.0:
        return intercept, intercept
    a = slope * lo + intercept
    b = slope * hi + intercept
    return (a, b) if slope > 0.0 else (b, a)


def _analyze_componentwise(act: ComponentwiseActivation, region, J, b, with_aux):
    w = act.out_width
    lam_lo = np.zeros((w, act.in_width))
    lam_hi = np.zeros((w, act.in_width))
    vec_lo = np.zeros(w)
    vec_hi = np.zeros(w)
    fixed_T = np.zeros((w, act.in_width))
    fixed_t = np.zeros(w)
    stars: list[int] = []
    aux: dict[int, tuple[float, float]] = {}
    for n in range(w):
        lo, hi = linear_bounds(region, J[n])
        lo += b[n]
        hi += b[n]
        feas = []
        fixed_j = -1
        for j in range(act.piece_count):
            left, right = act.piece_interval(j)
            if lo <= right + FEAS_TOL and hi >= left - FEAS_TOL:
                feas.append(j)
                if fixed_j < 0 and lo >= left - FEAS_TOL and hi <= right + FEAS_TOL:
                    fixed_j = j
        if not feas:
            raise LpSolverError(f"no spline piece reachable for neuron {n}")
        params = [(act.slopes[n, j], act.intercepts[n, j]) for j in feas]
        distinct = any(p != params[0] for p in params[1:])
        if fixed_j >= 0 or not distinct:
            j = fixed_j if fixed_j >= 0 else feas[0]
            s, ic = act.slopes[n, j], act.intercepts[n, j]
            lam_lo[n, n] = lam_hi[n, n] = s
            vec_lo[n] = vec_hi[n] = ic
            fixed_T[n, n] = s
            fixed_t[n] = ic
        else:
            stars.append(n)
            slopes = [p[0] for p in params]
            ics = [p[1] for p in params]
            lam_lo[n, n] = min(slopes)
            lam_hi[n, n] = max(slopes)
            vec_lo[n] = min(ics)
            vec_hi[n] = max(ics)
            if with_aux:
                out_lo = float("inf")
                out_hi = float("-inf")
                for j in feas:
                    left, right = act.piece_interval(j)
                    zl = max(lo, left)
                    zh = min(hi, right)
                    a, bb = _spline_image(act.slopes[n, j], act.intercepts[n, j], zl, zh)
                    out_lo = min(out_lo, a)
                    out_hi = max(out_hi, bb)
                aux[n] = (out_lo, out_hi)
    return LayerAnalysis(
        stars,
        IntervalMatrix(lam_lo, lam_hi),
        IntervalMatrix(vec_lo.reshape(-1, 1), vec_hi.reshape(-1, 1)),
        fixed_T,
        fixed_t,
        aux,
    )


def _piece_contains(region, piece_region, J, b) -> bool:
    """Does {J x + b : x in region} lie inside the piece region?"""
    for r in range(piece_region.m):
        row = piece_region.C[r]
        hi = support_value(region, row @ J)
        if hi + row @ b > piece_region.c[r] + FEAS_TOL:
            return False
    return True


def _analyze_generic(act: PwlActivation, region, J, b, with_aux):
    out_w, in_w = act.out_width, act.in_width
    lam_lo = np.zeros((out_w, in_w))
    lam_hi = np.zeros((out_w, in_w))
    vec_lo = np.zeros(out_w)
    vec_hi = np.zeros(out_w)
    fixed_T = np.zeros((out_w, in_w))
    fixed_t = np.zeros(out_w)
    stars: list[int] = []
    aux: dict[int, tuple[float, float]] = {}
    for fixed_neurons, pieces in act.branch_groups():
        feas = []
        containing = -1
        for idx, np_piece in enumerate(pieces):
            stacked = stack(region, affine_preimage(np_piece.region, J, b))
            if not is_feasible(stacked):
                continue
            feas.append((idx, np_piece, stacked))
            if containing < 0 and _piece_contains(region, np_piece.region, J, b):
                containing = len(feas) - 1
        if not feas:
            raise LpSolverError("no activation piece reachable over a non-empty region")
        group_stars: list[int] = []
        for rpos, n in enumerate(fixed_neurons):
            cand = [(p.piece.T[rpos], p.piece.t[rpos]) for _, p, _ in feas]
            if containing >= 0:
                row, off = cand[containing]
                star = False
            else:
                row, off = cand[0]
                star = any(
                    not (np.array_equal(rw, row) and off == o) for rw, o in cand[1:]
                )
            if star:
                group_stars.append(n)
                stars.append(n)
                rows = np.stack([rw for rw, _ in cand])
                lam_lo[n] = rows.min(axis=0)
                lam_hi[n] = rows.max(axis=0)
                offs = [o for _, o in cand]
                vec_lo[n] = min(offs)
                vec_hi[n] = max(offs)
            else:
                lam_lo[n] = lam_hi[n] = row
                vec_lo[n] = vec_hi[n] = off
                fixed_T[n] = row
                fixed_t[n] = off
        if with_aux and group_stars:
            for n in group_stars:
                rpos = fixed_neurons.index(n)
                out_lo = float("inf")
                out_hi = float("-inf")
                for _, p, stacked in feas:
                    const = float(p.piece.T[rpos] @ b + p.piece.t[rpos])
                    plo, phi = linear_bounds(stacked, p.piece.T[rpos] @ J)
                    out_lo = min(out_lo, plo + const)
                    out_hi = max(out_hi, phi + const)
                aux[n] = (out_lo, out_hi)
    stars.sort()
    return LayerAnalysis(
        stars,
        IntervalMatrix(lam_lo, lam_hi),
        IntervalMatrix(vec_lo.reshape(-1, 1), vec_hi.reshape(-1, 1)),
        fixed_T,
        fixed_t,
        aux,
    )


def analyze_activation_layer(act: PwlActivation, region: Polyhedron, J, b,
                             with_aux: bool = False) -> LayerAnalysis:
    """Classify each neuron of one activation layer over {J x + b : x in region}."""
    J = np.asarray(J, dtype=float)
    b = np.asarray(b, dtype=float).reshape(-1)
    if J.shape != (act.in_width, region.dim) or b.shape[0] != act.in_width:
        raise ValueError("pre-activation map does not match the layer")
    if isinstance(act, ComponentwiseActivation):
        return _analyze_componentwise(act, region, J, b, with_aux)
    return _analyze_generic(act, region, J, b, with_aux)


def _extend_domain(dom: Polyhedron, bounds) -> Polyhedron:
    """Append one box-bounded variable per (lo, hi) pair; infinite sides add no row."""
    k = len(bounds)
    d = dom.dim
    C = np.hstack([dom.C, np.zeros((dom.m, k))])
    rows = [C]
    offs = [dom.c]
    for i, (lo, hi) in enumerate(bounds):
        if np.isfinite(hi):
            e = np.zeros(d + k)
            e[d + i] = 1.0
            rows.append(e[None, :])
            offs.append([hi])
        if np.isfinite(lo):
            e = np.zeros(d + k)
            e[d + i] = -1.0
            rows.append(e[None, :])
            offs.append([-lo])
    return Polyhedron(np.vstack(rows), np.concatenate([np.asarray(o, dtype=float) for o in offs]),
                      dim=d + k)


def _symprop_impl(net: Network, omega: Polyhedron, collect_trace: bool):
    if omega.dim != net.input_dim:
        raise ValueError(f"region dimension {omega.dim} does not match input {net.input_dim}")
    if not is_feasible(omega):
        raise InfeasibleRegionError("input region is empty")
    dom = omega
    B = net.affine[0].W.copy()
    bb = net.affine[0].b.copy()
    lam_mats = []
    lam_vecs = []
    stars = []
    trace = [] if collect_trace else None
    for l in range(1, net.depth + 1):
        act = net.activations[l - 1]
        la = analyze_activation_layer(act, dom, B, bb, with_aux=True)
        lam_mats.append(la.lam_mat)
        lam_vecs.append(la.lam_vec)
        stars.append(tuple(la.stars))
        n_star = len(la.stars)
        Bhat = np.zeros((act.out_width, dom.dim + n_star))
        Bhat[:, : dom.dim] = la.fixed_T @ B
        for k, n in enumerate(la.stars):
            Bhat[n, dom.dim + k] = 1.0
        bhat = la.fixed_T @ bb + la.fixed_t
        if collect_trace:
            trace.append({
                "stars": tuple(la.stars),
                "aux_bounds": dict(la.aux_bounds),
                "Bhat": Bhat.copy(),
                "bhat": bhat.copy(),
            })
        if n_star:
            dom = _extend_domain(dom, [la.aux_bounds[n] for n in la.stars])
        if l < net.depth:
            aff = net.affine[l]
            B = aff.W @ Bhat
            bb = aff.W @ bhat + aff.b
    first = net.depth + 1
    for l, s in enumerate(stars, start=1):
        if s:
            first = l
            break
    pattern = InitPattern(tuple(lam_mats), tuple(lam_vecs), first, tuple(stars))
    return pattern, trace


def symprop(net: Network, omega: Polyhedron) -> InitPattern:
    """One symbolic forward pass; the seed state for branch-and-bound."""
    pattern, _ = _symprop_impl(net, omega, collect_trace=False)
    return pattern


def symprop_trace(net: Network, omega: Polyhedron):
    """(pattern, per-layer trace) with the affine envelopes B_hat, b_hat kept."""
    return _symprop_impl(net, omega, collect_trace=True)
