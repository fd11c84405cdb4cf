from __future__ import annotations

import math
import random

import numpy as np
import pytest

from homosem.errors import ScoringError
from homosem.scoring import SimilarityVerdict, cosine, score_triple


# ---------------------------------------------------------------------------
# independent naive re-implementation (pure python, fsum accumulation)

def naive_cosine(u, v) -> float:
    dot = math.fsum(float(x) * float(y) for x, y in zip(u, v))
    nu = math.sqrt(math.fsum(float(x) * float(x) for x in u))
    nv = math.sqrt(math.fsum(float(y) * float(y) for y in v))
    return dot / (nu * nv)


def naive_verdict(va, vb, vc) -> bool:
    s1 = naive_cosine(va, vb)
    s2 = naive_cosine(va, vc)
    s3 = naive_cosine(vb, vc)
    return s1 > s2 and s1 > s3


def random_triple(rng: np.random.Generator, width: int):
    return [rng.normal(size=width) for _ in range(3)]


class TestCosine:
    def test_identical_unit_vectors(self):
        assert cosine([1.0, 0.0], [1.0, 0.0]) == 1.0

    def test_orthogonal(self):
        assert cosine([1.0, 0.0], [0.0, 1.0]) == 0.0

    def test_hand_value(self):
        # dot = 4, norms sqrt(5) each -> 4/5
        assert cosine([1.0, 2.0], [2.0, 1.0]) == pytest.approx(0.8, abs=1e-12)

    def test_zero_norm_rejected(self):
        with pytest.raises(ScoringError, match="zero-norm"):
            cosine([0.0, 0.0], [1.0, 0.0])

    def test_width_mismatch_rejected(self):
        with pytest.raises(ScoringError, match="width"):
            cosine([1.0, 0.0], [1.0, 0.0, 0.0])

    def test_single_precision_inputs_accumulate_in_double(self):
        u = np.full(10_000, 0.1, dtype=np.float32)
        v = np.full(10_000, 0.1, dtype=np.float32)
        assert cosine(u, v) == pytest.approx(1.0, abs=1e-12)

    def test_matches_naive_on_random_vectors(self):
        rng = np.random.default_rng(4)
        for _ in range(100):
            u = rng.normal(size=17)
            v = rng.normal(size=17)
            assert cosine(u, v) == pytest.approx(naive_cosine(u, v), abs=1e-12)


class TestScoreTriple:
    def test_clear_winner(self):
        verdict = score_triple([1.0, 0.0], [1.0, 0.0], [0.0, 1.0])
        assert (verdict.sim1, verdict.sim2, verdict.sim3) == (1.0, 0.0, 0.0)
        assert verdict.correct

    def test_constructed_sims_with_closer_outlier(self):
        # unit vectors realizing cosines sim1=0.90, sim2=0.95, sim3=0.80
        # (the Gram matrix is positive definite, so a Cholesky factor exists)
        gram = np.array([[1.0, 0.90, 0.95],
                         [0.90, 1.0, 0.80],
                         [0.95, 0.80, 1.0]])
        chol = np.linalg.cholesky(gram)
        va, vb, vc = chol[0], chol[1], chol[2]
        verdict = score_triple(va, vb, vc)
        assert verdict.sim1 == pytest.approx(0.90, abs=1e-9)
        assert verdict.sim2 == pytest.approx(0.95, abs=1e-9)
        assert verdict.sim3 == pytest.approx(0.80, abs=1e-9)
        assert not verdict.correct

    def test_exact_tie_is_incorrect(self):
        v = [1.0, 0.0]
        assert not score_triple(v, v, v).correct
        # sim1 == sim2 == sim3 == 0
        assert not score_triple([1, 0, 0], [0, 1, 0], [0, 0, 1]).correct

    def test_tie_on_sim2_only(self):
        # anchors identical to each other and to the outlier direction
        verdict = SimilarityVerdict(sim1=0.5, sim2=0.5, sim3=0.1)
        assert not verdict.correct
        verdict = SimilarityVerdict(sim1=0.5, sim2=0.1, sim3=0.5)
        assert not verdict.correct

    def test_zero_vector_raises(self):
        with pytest.raises(ScoringError):
            score_triple([0.0, 0.0], [1.0, 0.0], [0.0, 1.0])


class TestOracleEquivalence:
    def test_verdicts_match_naive_implementation(self):
        rng = np.random.default_rng(20240518)
        widths = rng.integers(3, 257, size=300)
        mismatches = 0
        for width in widths:
            va, vb, vc = random_triple(rng, int(width))
            ours = score_triple(va, vb, vc).correct
            if ours != naive_verdict(va, vb, vc):
                mismatches += 1
        assert mismatches == 0

    def test_sims_match_naive_within_tolerance(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            va, vb, vc = random_triple(rng, 64)
            verdict = score_triple(va, vb, vc)
            assert verdict.sim1 == pytest.approx(naive_cosine(va, vb), abs=1e-10)
            assert verdict.sim2 == pytest.approx(naive_cosine(va, vc), abs=1e-10)
            assert verdict.sim3 == pytest.approx(naive_cosine(vb, vc), abs=1e-10)


class TestInvariances:
    def test_positive_scaling_never_flips_the_verdict(self):
        rng = np.random.default_rng(77)
        py_rng = random.Random(77)
        for _ in range(200):
            va, vb, vc = random_triple(rng, py_rng.randint(3, 128))
            base = score_triple(va, vb, vc).correct
            alpha, beta, gamma = (math.exp(py_rng.uniform(-3, 3)) for _ in range(3))
            scaled = score_triple(alpha * va, beta * vb, gamma * vc).correct
            assert scaled == base

    def test_anchor_swap_never_flips_the_verdict(self):
        rng = np.random.default_rng(78)
        for _ in range(200):
            va, vb, vc = random_triple(rng, 32)
            assert score_triple(va, vb, vc).correct == \
                score_triple(vb, va, vc).correct

    def test_swap_permutes_sim2_sim3(self):
        rng = np.random.default_rng(79)
        va, vb, vc = random_triple(rng, 16)
        fwd = score_triple(va, vb, vc)
        rev = score_triple(vb, va, vc)
        assert fwd.sim1 == pytest.approx(rev.sim1, abs=1e-15)
        assert fwd.sim2 == pytest.approx(rev.sim3, abs=1e-15)
        assert fwd.sim3 == pytest.approx(rev.sim2, abs=1e-15)
