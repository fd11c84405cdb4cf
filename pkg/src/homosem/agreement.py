"""Annotation-audit utilities: pair sampling and Cohen's kappa.

Annotation sheets are TSV files with columns ``pair_ref`` and ``label``.
A pair reference is the slash-joined identity of an exported pair:
``lang/lemma/sense_a/sent_a/sense_b/sent_b``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .dataset import DatasetBundle, LabeledPair, export_pairs
from .errors import HomosemError, ParseError, ValidationError

LABELS = ("T", "F")


@dataclass(frozen=True)
class AnnotationSheet:
    annotator_id: str
    pairs: tuple[tuple[str, str], ...]  # (pair_ref, label); label may be blank

    def labels(self) -> dict[str, str]:
        return dict(self.pairs)


def pair_ref(pair: LabeledPair) -> str:
    return "/".join([pair.lang, pair.lemma, pair.sense_id_a, str(pair.sent_id_a),
                     pair.sense_id_b, str(pair.sent_id_b)])


def sample_pairs(bundle: DatasetBundle, n: int, seed: int,
                 wic_only: bool = False,
                 annotator_id: str = "template") -> AnnotationSheet:
    """A blank sheet of ``n`` pairs drawn uniformly without replacement."""
    pool = export_pairs(bundle, wic_only=wic_only)
    if n > len(pool):
        raise HomosemError(f"requested {n} pairs but the dataset yields only "
                           f"{len(pool)}")
    chosen = random.Random(seed).sample(pool, n)
    return AnnotationSheet(annotator_id=annotator_id,
                           pairs=tuple((pair_ref(p), "") for p in chosen))


def write_sheet(sheet: AnnotationSheet, path: str | Path) -> None:
    lines = ["pair_ref\tlabel"]
    lines += [f"{ref}\t{label}" for ref, label in sheet.pairs]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_sheet(path: str | Path, annotator_id: str | None = None) -> AnnotationSheet:
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or lines[0].split("\t") != ["pair_ref", "label"]:
        raise ParseError(f"{path}: missing or malformed sheet header")
    pairs = []
    for n, line in enumerate(lines[1:], start=2):
        cols = line.split("\t")
        if len(cols) != 2:
            raise ParseError(f"{path}:{n}: expected 2 columns")
        pairs.append((cols[0], cols[1]))
    return AnnotationSheet(annotator_id=annotator_id or path.stem,
                           pairs=tuple(pairs))


# ---------------------------------------------------------------------------
# kappa

def kappa_from_labels(a: Sequence[str], b: Sequence[str]) -> float:
    """Cohen's kappa over two aligned binary label sequences.

    When the expected agreement is 1 (both annotators constant and equal)
    kappa is defined as 1: there is nothing left for chance to explain.
    """
    if len(a) != len(b):
        raise ValidationError(f"sheets differ in length: {len(a)} vs {len(b)}")
    if not a:
        raise ValidationError("cannot compute kappa over zero pairs")
    for label in (*a, *b):
        if label not in LABELS:
            raise ValidationError(f"label {label!r} is not one of {LABELS}")
    n = len(a)
    p_o = sum(1 for x, y in zip(a, b) if x == y) / n
    pa_t = sum(1 for x in a if x == "T") / n
    pb_t = sum(1 for x in b if x == "T") / n
    p_e = pa_t * pb_t + (1 - pa_t) * (1 - pb_t)
    if p_e == 1.0:
        return 1.0
    return (p_o - p_e) / (1 - p_e)


def align_sheets(a: AnnotationSheet, b: AnnotationSheet
                 ) -> tuple[list[str], list[str]]:
    """Label sequences of both sheets, aligned by pair reference."""
    refs_a = [ref for ref, _ in a.pairs]
    refs_b = [ref for ref, _ in b.pairs]
    if sorted(refs_a) != sorted(refs_b):
        only_a = set(refs_a) - set(refs_b)
        only_b = set(refs_b) - set(refs_a)
        raise ValidationError(
            "sheets cover different pairs"
            + (f"; only in {a.annotator_id}: {sorted(only_a)[:3]}" if only_a else "")
            + (f"; only in {b.annotator_id}: {sorted(only_b)[:3]}" if only_b else ""))
    if len(set(refs_a)) != len(refs_a):
        raise ValidationError("duplicate pair references in a sheet")
    lookup_b = b.labels()
    return [label for _, label in a.pairs], [lookup_b[ref] for ref, _ in a.pairs]


def cohen_kappa(a: AnnotationSheet, b: AnnotationSheet) -> float:
    la, lb = align_sheets(a, b)
    return kappa_from_labels(la, lb)


def pooled_kappa(sheet_pairs: Sequence[tuple[AnnotationSheet, AnnotationSheet]]) -> float:
    """Micro-average kappa: one statistic over the pooled pairs of all sheets."""
    pooled_a: list[str] = []
    pooled_b: list[str] = []
    for a, b in sheet_pairs:
        la, lb = align_sheets(a, b)
        pooled_a += la
        pooled_b += lb
    return kappa_from_labels(pooled_a, pooled_b)
