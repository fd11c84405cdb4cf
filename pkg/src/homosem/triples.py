"""Triple generation, experiment classification, POS filtering, triple-file I/O.

A triple holds two anchors ``a``/``b`` that convey the same sense and one
outlier ``c`` with a different meaning. Cross-sense triples pair every
unordered anchor pair from one sense's sense-bearing sentences (ids 1, 2, 4,
5) with every sense-bearing sentence of another sense of the same homonym —
up to ``C(4,2) * 4 = 24`` per direction, 48 per unordered sense pair.
Distractor triples keep both anchors inside one sense and use its sentence 3
as the outlier: anchor pairs must have distinct surface forms and include
sentence 1 or 2, so at least one anchor shares the distractor's context.

Each triple is tagged with the experiment it instantiates:

* ``exp1`` — one surface form in three different contexts, outlier cross-sense;
* ``exp2`` — target + its synonym vs. the other sense's synonym, all forms
  distinct;
* ``exp3`` — target + its synonym vs. the other sense's target form (the
  shared homonym form matches exactly one anchor);
* ``exp4`` — target/synonym pair vs. the distractor sharing a context;
* ``other`` — everything else (still scored in the full aggregate).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from itertools import combinations
from pathlib import Path

from .dataset import (
    ROLE_DISTRACTOR,
    ROLE_SYNONYM,
    ROLE_TARGET,
    DatasetBundle,
    SentenceRecord,
    normalize_form,
)
from .errors import ParseError, ValidationError

EXPERIMENTS = ("exp1", "exp2", "exp3", "exp4")

#: sentence ids whose presence makes a distractor anchor pair share a context
_DISTRACTOR_CONTEXT_IDS = frozenset({1, 2})


@dataclass(frozen=True)
class EvalTriple:
    lemma: str
    a: tuple[str, int]  # (sense_id, sentence_id)
    b: tuple[str, int]
    c: tuple[str, int]
    experiment: str
    same_pos: bool
    #: sense that supplies the anchors (== a's sense)
    direction: str

    @property
    def key(self) -> tuple:
        """Identity under which a triple set holds no duplicates."""
        return (self.lemma, self.a, self.b, self.c)


@dataclass(frozen=True)
class TripleSet:
    language: str
    triples: tuple[EvalTriple, ...]
    provenance: str  # "generated" | "loaded"

    def __len__(self) -> int:
        return len(self.triples)


# ---------------------------------------------------------------------------
# generation and classification

def generate_triples(bundle: DatasetBundle) -> TripleSet:
    """Enumerate every triple the bundle supports, classified and POS-flagged.

    Missing optional sentences simply shrink the enumeration. Anchors are
    kept in ascending sentence order; the result is sorted by
    ``(lemma, sense_a, sent_a, sent_b, sense_c, sent_c)``.
    """
    triples: list[EvalTriple] = []
    for hom in bundle.homonyms:
        for s in hom.senses:
            anchor_pairs = list(combinations(s.available(), 2))
            for t in hom.senses:
                if t.sense_id == s.sense_id:
                    continue
                outliers = t.available()
                for x, y in anchor_pairs:
                    for z in outliers:
                        triples.append(_build(hom.lemma, s.sense_id, x, y,
                                              t.sense_id, z, cross=True))
            dis = s.sentences.get(3)
            if dis is None:
                continue
            for x, y in anchor_pairs:
                if not {x.sentence_id, y.sentence_id} & _DISTRACTOR_CONTEXT_IDS:
                    continue
                if normalize_form(x.form) == normalize_form(y.form):
                    continue
                triples.append(_build(hom.lemma, s.sense_id, x, y,
                                      s.sense_id, dis, cross=False))
    triples.sort(key=_sort_key)
    return TripleSet(language=bundle.language, triples=tuple(triples),
                     provenance="generated")


def _build(lemma: str, sense_ab: str, x: SentenceRecord, y: SentenceRecord,
           sense_c: str, z: SentenceRecord, cross: bool) -> EvalTriple:
    return EvalTriple(
        lemma=lemma,
        a=(sense_ab, x.sentence_id),
        b=(sense_ab, y.sentence_id),
        c=(sense_c, z.sentence_id),
        experiment=_classify(x, y, z, cross),
        same_pos=(x.pos is not None and x.pos == y.pos == z.pos),
        direction=sense_ab,
    )


def _sort_key(t: EvalTriple) -> tuple:
    return (t.lemma, t.a[0], t.a[1], t.b[1], t.c[0], t.c[1])


def _classify(a: SentenceRecord, b: SentenceRecord, c: SentenceRecord,
              cross: bool) -> str:
    forms = (normalize_form(a.form), normalize_form(b.form), normalize_form(c.form))
    contexts_distinct = len({a.context_id, b.context_id, c.context_id}) == 3
    anchor_roles = {a.role, b.role}
    if cross and contexts_distinct and forms[0] == forms[1] == forms[2]:
        return "exp1"
    if (cross and contexts_distinct
            and anchor_roles == {ROLE_TARGET, ROLE_SYNONYM}
            and c.role == ROLE_SYNONYM and len(set(forms)) == 3):
        return "exp2"
    if (cross and contexts_distinct
            and anchor_roles == {ROLE_TARGET, ROLE_SYNONYM}
            and c.role == ROLE_TARGET
            # the shared form must match exactly one anchor
            and (forms[2] == forms[0]) != (forms[2] == forms[1])):
        return "exp3"
    if (not cross and c.role == ROLE_DISTRACTOR
            and c.context_id in (a.context_id, b.context_id)
            and forms[0] != forms[1]):
        return "exp4"
    return "other"


def classify_triple(t: EvalTriple, bundle: DatasetBundle) -> str:
    """Experiment tag for one triple, resolved against its bundle."""
    a, b, c = resolve_triple(t, bundle)
    return _classify(a, b, c, cross=t.c[0] != t.a[0])


def resolve_triple(t: EvalTriple, bundle: DatasetBundle
                   ) -> tuple[SentenceRecord, SentenceRecord, SentenceRecord]:
    """The three sentence records behind a triple.

    Raises :class:`ValidationError` on a dangling (sense, sentence) reference.
    """
    hom = None
    for cand in bundle.homonyms:
        if cand.lemma == t.lemma:
            hom = cand
            break
    if hom is None:
        raise ValidationError(f"triple references unknown lemma {t.lemma!r}")
    out = []
    for sense_id, sent_id in (t.a, t.b, t.c):
        try:
            rec = hom.sense(sense_id).sentences[sent_id]
        except KeyError:
            raise ValidationError(
                f"triple references unknown sentence {t.lemma}/{sense_id}/{sent_id}"
            ) from None
        out.append(rec)
    return out[0], out[1], out[2]


def filter_same_pos(ts: TripleSet, bundle: DatasetBundle | None = None) -> TripleSet:
    """Keep only triples whose three target POS tags are equal.

    With a bundle the tags are re-read from the sentences and a missing tag
    is an error naming the sentence; without one the flags stored on the
    triples (set at generation or read from the file) are trusted.
    """
    if bundle is None:
        kept = tuple(t for t in ts.triples if t.same_pos)
        return TripleSet(ts.language, kept, ts.provenance)
    kept = []
    for t in ts.triples:
        recs = resolve_triple(t, bundle)
        for ref, rec in zip((t.a, t.b, t.c), recs):
            if rec.pos is None:
                raise ValidationError(
                    f"sentence {t.lemma}/{ref[0]}/{ref[1]} has no POS tag")
        if recs[0].pos == recs[1].pos == recs[2].pos:
            kept.append(replace(t, same_pos=True))
    return TripleSet(ts.language, tuple(kept), ts.provenance)


def count_by_experiment(ts: TripleSet, same_pos_only: bool = False) -> dict[str, int]:
    """Triple counts per experiment tag (including ``other``)."""
    counts = {tag: 0 for tag in EXPERIMENTS + ("other",)}
    for t in ts.triples:
        if same_pos_only and not t.same_pos:
            continue
        counts[t.experiment] += 1
    return counts


def triple_set_diff(left: TripleSet, right: TripleSet
                    ) -> tuple[tuple[EvalTriple, ...], tuple[EvalTriple, ...]]:
    """Set difference under triple identity: (only in left, only in right)."""
    left_keys = {t.key for t in left.triples}
    right_keys = {t.key for t in right.triples}
    only_left = tuple(t for t in sorted(left.triples, key=_sort_key)
                      if t.key not in right_keys)
    only_right = tuple(t for t in sorted(right.triples, key=_sort_key)
                       if t.key not in left_keys)
    return only_left, only_right


# ---------------------------------------------------------------------------
# file format

TRIPLE_COLUMNS = ("lang", "lemma", "sense_a", "sent_a", "sense_b", "sent_b",
                  "sense_c", "sent_c", "experiment", "same_pos")


def write_triples(ts: TripleSet, path: str | Path) -> None:
    lines = ["\t".join(TRIPLE_COLUMNS)]
    for t in sorted(ts.triples, key=_sort_key):
        lines.append("\t".join([
            ts.language, t.lemma,
            t.a[0], str(t.a[1]), t.b[0], str(t.b[1]), t.c[0], str(t.c[1]),
            t.experiment, "1" if t.same_pos else "0",
        ]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_triples(path: str | Path, bundle: DatasetBundle | None = None) -> TripleSet:
    """Read a triple file; with a bundle, verify every reference resolves."""
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or tuple(lines[0].split("\t")) != TRIPLE_COLUMNS:
        raise ParseError(f"{path}: missing or malformed triple header")
    language = ""
    triples = []
    for n, line in enumerate(lines[1:], start=2):
        cols = line.split("\t")
        if len(cols) != len(TRIPLE_COLUMNS):
            raise ParseError(f"{path}:{n}: expected {len(TRIPLE_COLUMNS)} columns, "
                             f"got {len(cols)}")
        lang, lemma, sa, na, sb, nb, sc, nc, experiment, same_pos = cols
        if language and lang != language:
            raise ParseError(f"{path}:{n}: mixed languages {language!r} and {lang!r}")
        language = lang
        if experiment not in EXPERIMENTS + ("other",):
            raise ParseError(f"{path}:{n}: unknown experiment {experiment!r}")
        if same_pos not in ("0", "1"):
            raise ParseError(f"{path}:{n}: same_pos must be 0 or 1, got {same_pos!r}")
        try:
            t = EvalTriple(lemma=lemma, a=(sa, int(na)), b=(sb, int(nb)),
                           c=(sc, int(nc)), experiment=experiment,
                           same_pos=same_pos == "1", direction=sa)
        except ValueError:
            raise ParseError(f"{path}:{n}: non-integer sentence id") from None
        triples.append(t)
    ts = TripleSet(language=language, triples=tuple(triples), provenance="loaded")
    if bundle is not None:
        for t in ts.triples:
            resolve_triple(t, bundle)
    return ts
