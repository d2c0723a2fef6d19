"""Induced operator norms ||A||_{p->q} for the supported (p, q) pairs.

Supported: p == q in {1, 2, inf}; p == 1 with any q (max column q-norm);
q == inf with any p (max row dual-norm). The remaining combinations
(inf->1, inf->2, 2->1) are NP-hard or have no closed form and are rejected.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import UnsupportedNormError

_ORDERS = (1.0, 2.0, float("inf"))

_SPECTRAL_TOL = 1e-12
_SPECTRAL_MAX_ITER = 20000


def _order_name(v: float) -> str:
    return "inf" if np.isinf(v) else str(int(v))


@dataclass(frozen=True)
class NormPair:
    """Validated (p, q) pair for the input/output vector norms."""

    p: float
    q: float

    def __post_init__(self):
        p = float(self.p)
        q = float(self.q)
        if p not in _ORDERS or q not in _ORDERS:
            raise UnsupportedNormError(
                f"norm orders must be 1, 2, or inf, got ({self.p}, {self.q})"
            )
        if not (p == q or p == 1.0 or np.isinf(q)):
            raise UnsupportedNormError(
                f"unsupported norm pair {_order_name(p)}->{_order_name(q)}"
            )
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @classmethod
    def parse(cls, text: str) -> "NormPair":
        """Parse 'P' or 'P:Q' with P, Q in {1, 2, inf}."""
        parts = text.split(":")
        if len(parts) > 2 or not all(parts):
            raise UnsupportedNormError(f"cannot parse norm spec {text!r}")
        vals = []
        for tok in parts:
            tok = tok.strip()
            if tok == "inf":
                vals.append(float("inf"))
            elif tok in ("1", "2"):
                vals.append(float(tok))
            else:
                raise UnsupportedNormError(f"unsupported norm order {tok!r}")
        if len(vals) == 1:
            vals.append(vals[0])
        return cls(vals[0], vals[1])

    def __str__(self):
        if self.p == self.q:
            return _order_name(self.p)
        return f"{_order_name(self.p)}:{_order_name(self.q)}"


def _vector_norm(v: np.ndarray, order: float) -> float:
    if np.isinf(order):
        return float(np.abs(v).max()) if v.size else 0.0
    if order == 1.0:
        return float(np.abs(v).sum())
    return float(np.sqrt(np.dot(v, v)))


def _power_iteration(G: np.ndarray, v0: np.ndarray) -> float:
    """Largest eigenvalue of the PSD matrix G by power iteration."""
    nv = np.linalg.norm(v0)
    if nv == 0.0:
        return 0.0
    v = v0 / nv
    lam = 0.0
    for _ in range(_SPECTRAL_MAX_ITER):
        w = G @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
        new = float(v @ (G @ v))
        if abs(new - lam) <= _SPECTRAL_TOL * max(1.0, abs(new)):
            return new
        lam = new
    return lam


def _spectral_norm(A: np.ndarray) -> float:
    scale = float(np.abs(A).max()) if A.size else 0.0
    if scale == 0.0:
        return 0.0
    B = A / scale
    # iterate on the smaller Gram matrix
    G = B.T @ B if B.shape[1] <= B.shape[0] else B @ B.T
    n = G.shape[0]
    if n == 1:
        return float(np.sqrt(G[0, 0])) * scale
    # deterministic start plus one seeded restart, guarding against a start
    # vector orthogonal to the top eigenspace
    rng = np.random.default_rng(0)
    lam = max(
        _power_iteration(G, np.ones(n)),
        _power_iteration(G, rng.standard_normal(n)),
    )
    return float(np.sqrt(max(lam, 0.0))) * scale


def induced_norm(A, pair: NormPair) -> float:
    """Operator norm sup_{x != 0} ||A x||_q / ||x||_p."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise ValueError(f"expected a matrix, got ndim {A.ndim}")
    if not np.isfinite(A).all():
        raise ValueError("matrix entries must be finite")
    if A.size == 0:
        return 0.0
    if pair.p == 1.0:
        # unit-ball vertices are signed basis vectors
        return max(_vector_norm(A[:, j], pair.q) for j in range(A.shape[1]))
    if np.isinf(pair.q):
        dual = 1.0 if np.isinf(pair.p) else (2.0 if pair.p == 2.0 else float("inf"))
        return max(_vector_norm(A[i], dual) for i in range(A.shape[0]))
    if pair.p == 2.0 and pair.q == 2.0:
        return _spectral_norm(A)
    raise UnsupportedNormError(f"unsupported norm pair {pair}")
