from __future__ import annotations

import random

import pytest

from homosem.agreement import (
    AnnotationSheet,
    align_sheets,
    cohen_kappa,
    kappa_from_labels,
    pair_ref,
    pooled_kappa,
    read_sheet,
    sample_pairs,
    write_sheet,
)
from homosem.dataset import export_pairs
from homosem.errors import HomosemError, ValidationError

from conftest import toy_bundle


def sheet(annotator, labels, refs=None):
    refs = refs or [f"p{i}" for i in range(len(labels))]
    return AnnotationSheet(annotator, tuple(zip(refs, labels)))


class TestKappaFromLabels:
    def test_identical_annotations_score_one(self):
        a = ["T", "F", "T", "F", "T"]
        assert kappa_from_labels(a, list(a)) == pytest.approx(1.0, abs=1e-12)

    def test_balanced_disagreement_scores_zero(self):
        # observed agreement 0.5 equals chance agreement 0.5 exactly
        a = ["T", "T", "F", "F"]
        b = ["T", "F", "F", "T"]
        assert kappa_from_labels(a, b) == pytest.approx(0.0, abs=1e-12)

    def test_symmetric_in_annotators(self):
        rng = random.Random(3)
        for _ in range(50):
            n = rng.randint(2, 40)
            a = [rng.choice("TF") for _ in range(n)]
            b = [rng.choice("TF") for _ in range(n)]
            assert kappa_from_labels(a, b) == pytest.approx(
                kappa_from_labels(b, a), abs=1e-12)

    def test_single_label_universe_defines_kappa_one(self):
        # both marginals are degenerate, so chance agreement is 1; identical
        # annotations still count as full agreement
        assert kappa_from_labels(["T", "T"], ["T", "T"]) == 1.0

    def test_total_disagreement_is_negative(self):
        a = ["T", "T", "F", "F"]
        b = ["F", "F", "T", "T"]
        assert kappa_from_labels(a, b) == pytest.approx(-1.0, abs=1e-12)

    def test_hand_value(self):
        # agreement 3/4; marginals a: 3T/1F, b: 2T/2F -> p_e = 0.5
        a = ["T", "T", "T", "F"]
        b = ["T", "T", "F", "F"]
        assert kappa_from_labels(a, b) == pytest.approx(0.5, abs=1e-12)

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValidationError):
            kappa_from_labels(["T"], ["T", "F"])

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            kappa_from_labels([], [])

    def test_unknown_label_rejected(self):
        with pytest.raises(ValidationError):
            kappa_from_labels(["T", "X"], ["T", "F"])


class TestSheets:
    def test_round_trip(self, tmp_path):
        s = sheet("ann1", ["T", "F", "T"])
        path = tmp_path / "ann1.tsv"
        write_sheet(s, path)
        again = read_sheet(path)
        assert again == s

    def test_annotator_defaults_to_stem(self, tmp_path):
        path = tmp_path / "marta.tsv"
        write_sheet(sheet("ignored", ["T"]), path)
        assert read_sheet(path).annotator_id == "marta"

    def test_align_reorders_by_ref(self):
        a = sheet("a", ["T", "F"], refs=["p1", "p2"])
        b = sheet("b", ["F", "T"], refs=["p2", "p1"])
        la, lb = align_sheets(a, b)
        assert list(la) == ["T", "F"]
        assert list(lb) == ["T", "F"]

    def test_align_reports_missing_refs(self):
        a = sheet("a", ["T", "F"], refs=["p1", "p2"])
        b = sheet("b", ["T"], refs=["p1"])
        with pytest.raises(ValidationError, match="p2"):
            align_sheets(a, b)

    def test_duplicate_ref_rejected(self):
        a = sheet("a", ["T", "F"], refs=["p1", "p1"])
        with pytest.raises(ValidationError, match="duplicate"):
            align_sheets(a, a)

    def test_cohen_kappa_via_alignment(self):
        a = sheet("a", ["T", "T", "F", "F"])
        b = sheet("b", ["T", "F", "F", "T"])
        assert cohen_kappa(a, b) == pytest.approx(0.0, abs=1e-12)

    def test_pooled_concatenates_pairs(self):
        a1 = sheet("a", ["T", "T"], refs=["p1", "p2"])
        b1 = sheet("b", ["T", "T"], refs=["p1", "p2"])
        a2 = sheet("a", ["T", "T", "F", "F"], refs=["q1", "q2", "q3", "q4"])
        b2 = sheet("b", ["T", "F", "F", "T"], refs=["q1", "q2", "q3", "q4"])
        pooled = pooled_kappa([(a1, b1), (a2, b2)])
        # pooled labels: a = TTTTFF, b = TTTFFT -> p_o = 4/6,
        # marginals a: 4T/2F, b: 4T/2F -> p_e = 5/9, kappa = 0.25
        assert pooled == pytest.approx(0.25, abs=1e-12)


class TestSampling:
    def test_deterministic_under_seed(self):
        bundle = toy_bundle()
        s1 = sample_pairs(bundle, 5, seed=13)
        s2 = sample_pairs(bundle, 5, seed=13)
        assert s1 == s2
        s3 = sample_pairs(bundle, 5, seed=14)
        assert s1 != s3

    def test_blank_labels_and_valid_refs(self):
        bundle = toy_bundle()
        refs = {pair_ref(p) for p in export_pairs(bundle)}
        s = sample_pairs(bundle, 8, seed=0)
        assert len(s.pairs) == 8
        for ref, label in s.pairs:
            assert label == ""
            assert ref in refs

    def test_wic_only_restricts_the_pool(self):
        bundle = toy_bundle()
        wic_refs = {pair_ref(p) for p in export_pairs(bundle, wic_only=True)}
        s = sample_pairs(bundle, 4, seed=2, wic_only=True)
        assert {ref for ref, _ in s.pairs} <= wic_refs

    def test_oversampling_rejected(self):
        bundle = toy_bundle()
        with pytest.raises(HomosemError, match="32"):
            sample_pairs(bundle, 33, seed=0)

    def test_pair_ref_layout(self):
        bundle = toy_bundle()
        pair = export_pairs(bundle)[0]
        ref = pair_ref(pair)
        parts = ref.split("/")
        assert len(parts) == 6
        assert parts[0] == bundle.language
        assert parts[1] == "coach"
