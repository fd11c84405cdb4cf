"""Cosine decision rule: a triple is correct iff the same-sense pair is
strictly closest.

All accumulation is double precision regardless of input width, so verdicts
near ties are stable across platforms. Ties and degenerate inputs
(zero-norm vectors) never count as correct.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ScoringError


def cosine(u, v) -> float:
    """cos(u, v) with double-precision accumulation.

    Raises :class:`ScoringError` on width mismatch or a zero-norm input.
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.ndim != 1 or v.ndim != 1:
        raise ScoringError("cosine expects 1-d vectors")
    if u.shape != v.shape:
        raise ScoringError(f"width mismatch: {u.shape[0]} vs {v.shape[0]}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ScoringError("zero-norm vector")
    return float(np.dot(u, v) / (nu * nv))


@dataclass(frozen=True)
class SimilarityVerdict:
    """sim1 = cos(a,b), sim2 = cos(a,c), sim3 = cos(b,c)."""

    sim1: float
    sim2: float
    sim3: float

    @property
    def correct(self) -> bool:
        return self.sim1 > self.sim2 and self.sim1 > self.sim3


def score_triple(va, vb, vc) -> SimilarityVerdict:
    """Score one triple of vectors; anchors are ``va``/``vb``."""
    return SimilarityVerdict(
        sim1=cosine(va, vb),
        sim2=cosine(va, vc),
        sim3=cosine(vb, vc),
    )
