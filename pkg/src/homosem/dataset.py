"""Sense-annotated homonym dataset: domain model, I/O, validation, pair export.

A dataset file is a UTF-8 JSON document with schema version
``homosem-dataset/1`` holding one language. Each homonym has two or more
senses, and each sense carries up to five sentences:

===  ===========  =============================================
id   role         context
===  ===========  =============================================
1    target_form  A (shared with 2 and 3)
2    synonym      A
3    distractor   A
4    target_form  B
5    synonym      C
===  ===========  =============================================

Sentences 1, 3 and 4 are mandatory; 2 and 5 are each optional (some senses
have no usable synonym). Every sentence stores the character spans of its
target occurrence; multiword targets use one span per component and their
surface form is the space-joined concatenation of the component forms.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .errors import ParseError, ValidationError

SCHEMA_VERSION = "homosem-dataset/1"

ROLE_TARGET = "target_form"
ROLE_SYNONYM = "synonym"
ROLE_DISTRACTOR = "distractor"

#: role each sentence id must carry
ROLE_BY_ID = {1: ROLE_TARGET, 2: ROLE_SYNONYM, 3: ROLE_DISTRACTOR,
              4: ROLE_TARGET, 5: ROLE_SYNONYM}

#: sentence ids that must be present in every sense
REQUIRED_IDS = (1, 3, 4)

#: sentence ids whose targets convey the sense (everything but the distractor)
SENSE_BEARING_IDS = (1, 2, 4, 5)


def normalize_form(form: str) -> str:
    """Whitespace-normalized, case-folded shape used for form identity."""
    return " ".join(form.split()).casefold()


@dataclass(frozen=True)
class TargetSpan:
    start: int
    end: int
    form: str


@dataclass(frozen=True)
class SentenceRecord:
    sentence_id: int
    text: str
    role: str
    pos: str | None
    context_id: str
    spans: tuple[TargetSpan, ...]
    #: target form deliberately differs from the lemma (inflection noted in
    #: the source data); suppresses the form-equals-lemma check
    inflected: bool = False

    @property
    def form(self) -> str:
        return " ".join(s.form for s in self.spans)


@dataclass(frozen=True)
class SenseEntry:
    sense_id: str
    gloss: str
    sentences: dict[int, SentenceRecord] = field(compare=True)

    def available(self, ids: Iterable[int] = SENSE_BEARING_IDS) -> list[SentenceRecord]:
        return [self.sentences[i] for i in ids if i in self.sentences]

    @property
    def pos(self) -> str | None:
        """POS of the sense, taken from its canonical target occurrence."""
        rec = self.sentences.get(1)
        return rec.pos if rec is not None else None


@dataclass(frozen=True)
class HomonymEntry:
    lemma: str
    ambiguity_level: str
    senses: tuple[SenseEntry, ...]

    def sense(self, sense_id: str) -> SenseEntry:
        for s in self.senses:
            if s.sense_id == sense_id:
                return s
        raise KeyError(sense_id)


@dataclass(frozen=True)
class DatasetBundle:
    language: str
    homonyms: tuple[HomonymEntry, ...]

    def homonym(self, lemma: str) -> HomonymEntry:
        for h in self.homonyms:
            if h.lemma == lemma:
                return h
        raise KeyError(lemma)

    def iter_sentences(self) -> Iterator[tuple[HomonymEntry, SenseEntry, SentenceRecord]]:
        for hom in self.homonyms:
            for sense in hom.senses:
                for sid in sorted(sense.sentences):
                    yield hom, sense, sense.sentences[sid]


@dataclass(frozen=True)
class Finding:
    severity: str  # "error" or "warning"
    code: str
    message: str


@dataclass(frozen=True)
class DatasetStats:
    n_homonyms: int
    n_senses: int
    n_sentences: int
    n_cross_pos_sense_pairs: int


@dataclass(frozen=True)
class LabeledPair:
    lang: str
    lemma: str
    sense_id_a: str
    sent_id_a: int
    sense_id_b: str
    sent_id_b: int
    form_a: str
    form_b: str
    label: str  # "T" same sense, "F" different sense


# ---------------------------------------------------------------------------
# parsing

def _require(mapping: dict, key: str, where: str):
    if key not in mapping:
        raise ParseError(f"{where}: missing required field '{key}'")
    return mapping[key]


def _parse_sentence(raw: dict, where: str) -> SentenceRecord:
    sid = _require(raw, "sentence_id", where)
    if not isinstance(sid, int):
        raise ParseError(f"{where}: sentence_id must be an integer, got {sid!r}")
    text = _require(raw, "text", where)
    spans_raw = _require(raw, "target", where)
    if not isinstance(spans_raw, list) or not spans_raw:
        raise ParseError(f"{where}: 'target' must be a non-empty list of spans")
    spans = []
    for sp in spans_raw:
        start, end = _require(sp, "start", where), _require(sp, "end", where)
        if not (isinstance(start, int) and isinstance(end, int)):
            raise ParseError(f"{where}: span offsets must be integers")
        spans.append(TargetSpan(start=start, end=end, form=_require(sp, "form", where)))
    return SentenceRecord(
        sentence_id=sid,
        text=text,
        role=_require(raw, "role", where),
        pos=raw.get("pos"),
        context_id=_require(raw, "context_id", where),
        spans=tuple(spans),
        inflected=bool(raw.get("inflected", False)),
    )


def parse_dataset(doc: dict) -> DatasetBundle:
    """Build a bundle from a decoded document. No validation beyond shape."""
    version = _require(doc, "version", "document")
    if version != SCHEMA_VERSION:
        raise ParseError(f"unsupported schema version {version!r}, expected {SCHEMA_VERSION!r}")
    language = _require(doc, "language", "document")
    homonyms = []
    for hraw in _require(doc, "homonyms", "document"):
        lemma = _require(hraw, "lemma", "homonym")
        senses = []
        for sraw in _require(hraw, "senses", f"homonym {lemma!r}"):
            sense_id = _require(sraw, "sense_id", f"homonym {lemma!r}")
            where = f"sense {sense_id!r}"
            sentences: dict[int, SentenceRecord] = {}
            for key, rraw in _require(sraw, "sentences", where).items():
                try:
                    sid = int(key)
                except ValueError:
                    raise ParseError(f"{where}: sentence key {key!r} is not an integer") from None
                rec = _parse_sentence(dict(rraw, sentence_id=rraw.get("sentence_id", sid)),
                                      f"{where} sentence {sid}")
                if rec.sentence_id != sid:
                    raise ParseError(f"{where}: sentence key {sid} disagrees with "
                                     f"sentence_id {rec.sentence_id}")
                sentences[sid] = rec
            senses.append(SenseEntry(sense_id=sense_id,
                                     gloss=_require(sraw, "gloss", where),
                                     sentences=sentences))
        homonyms.append(HomonymEntry(lemma=lemma,
                                     ambiguity_level=_require(hraw, "ambiguity_level",
                                                              f"homonym {lemma!r}"),
                                     senses=tuple(senses)))
    return DatasetBundle(language=language, homonyms=tuple(homonyms))


def load_dataset(path: str | Path, strict: bool = True) -> DatasetBundle:
    """Load and validate one language file.

    With ``strict`` (the default) any validation error raises
    :class:`ValidationError`; warnings are tolerated either way.
    """
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: not valid JSON: {exc}") from exc
    bundle = parse_dataset(doc)
    findings = validate_dataset(bundle)
    errors = [f for f in findings if f.severity == "error"]
    if errors and strict:
        raise ValidationError(
            f"{path}: {len(errors)} validation error(s), first: {errors[0].message}",
            findings=tuple(findings))
    return bundle


def write_dataset(bundle: DatasetBundle, path: str | Path) -> None:
    doc = {
        "version": SCHEMA_VERSION,
        "language": bundle.language,
        "homonyms": [
            {
                "lemma": hom.lemma,
                "ambiguity_level": hom.ambiguity_level,
                "senses": [
                    {
                        "sense_id": sense.sense_id,
                        "gloss": sense.gloss,
                        "sentences": {
                            str(sid): _sentence_doc(sense.sentences[sid])
                            for sid in sorted(sense.sentences)
                        },
                    }
                    for sense in hom.senses
                ],
            }
            for hom in bundle.homonyms
        ],
    }
    Path(path).write_text(json.dumps(doc, ensure_ascii=False, indent=1) + "\n",
                          encoding="utf-8")


def _sentence_doc(rec: SentenceRecord) -> dict:
    doc = {
        "sentence_id": rec.sentence_id,
        "text": rec.text,
        "role": rec.role,
        "pos": rec.pos,
        "context_id": rec.context_id,
        "target": [{"start": s.start, "end": s.end, "form": s.form} for s in rec.spans],
    }
    if rec.inflected:
        doc["inflected"] = True
    return doc


# ---------------------------------------------------------------------------
# validation

def validate_dataset(bundle: DatasetBundle) -> list[Finding]:
    """Check the structural contract and return all findings.

    Errors make the bundle unusable for triple generation; warnings flag
    permitted gaps (a sense without synonym sentences, a missing POS tag).
    """
    findings: list[Finding] = []
    err = lambda code, msg: findings.append(Finding("error", code, msg))
    warn = lambda code, msg: findings.append(Finding("warning", code, msg))

    if not bundle.language:
        err("language", "bundle has an empty language code")
    seen_lemmas: set[str] = set()
    for hom in bundle.homonyms:
        where = f"homonym {hom.lemma!r}"
        if hom.lemma in seen_lemmas:
            err("dup-lemma", f"{where}: duplicate lemma entry")
        seen_lemmas.add(hom.lemma)
        if not hom.ambiguity_level:
            err("ambiguity", f"{where}: empty ambiguity_level")
        if len(hom.senses) < 2:
            err("sense-count", f"{where}: needs at least 2 senses, has {len(hom.senses)}")
        seen_senses: set[str] = set()
        context_owner: dict[str, str] = {}
        for sense in hom.senses:
            swhere = f"{where} sense {sense.sense_id!r}"
            if sense.sense_id in seen_senses:
                err("dup-sense", f"{swhere}: duplicate sense_id")
            seen_senses.add(sense.sense_id)
            for sid in REQUIRED_IDS:
                if sid not in sense.sentences:
                    err("missing-sentence", f"{swhere}: sentence {sid} is required")
            for sid in (2, 5):
                if sid not in sense.sentences:
                    warn("no-synonym", f"{swhere}: sentence {sid} absent (no synonym)")
            for sid, rec in sorted(sense.sentences.items()):
                rwhere = f"{swhere} sentence {sid}"
                expected_role = ROLE_BY_ID.get(sid)
                if expected_role is None:
                    err("bad-id", f"{rwhere}: sentence id outside 1..5")
                    continue
                if rec.role != expected_role:
                    err("role", f"{rwhere}: role {rec.role!r}, expected {expected_role!r}")
                if rec.pos is None:
                    warn("no-pos", f"{rwhere}: target has no POS tag")
                _check_spans(rec, rwhere, findings)
                if (rec.role == ROLE_TARGET and not rec.inflected
                        and normalize_form(rec.form) != normalize_form(hom.lemma)):
                    err("lemma-form", f"{rwhere}: target form {rec.form!r} does not "
                                      f"match lemma {hom.lemma!r} and is not marked inflected")
            # context topology within the sense
            ctx = {sid: rec.context_id for sid, rec in sense.sentences.items()}
            shared = {ctx[sid] for sid in (1, 2, 3) if sid in ctx}
            if len(shared) > 1:
                err("context-shared", f"{swhere}: sentences 1/2/3 must share one context_id")
            for sid in (4, 5):
                if sid in ctx and ctx[sid] in {c for o, c in ctx.items() if o != sid}:
                    err("context-distinct", f"{swhere}: sentence {sid} reuses a context_id")
            for cid in set(ctx.values()):
                owner = context_owner.setdefault(cid, sense.sense_id)
                if owner != sense.sense_id:
                    warn("context-reuse", f"{where}: context {cid!r} appears in senses "
                                          f"{owner!r} and {sense.sense_id!r}")
    return findings


def _check_spans(rec: SentenceRecord, where: str, findings: list[Finding]) -> None:
    prev_end = -1
    for sp in rec.spans:
        if not (0 <= sp.start < sp.end <= len(rec.text)):
            findings.append(Finding("error", "span-bounds",
                                    f"{where}: span {sp.start}:{sp.end} outside text"))
            continue
        if sp.start < prev_end:
            findings.append(Finding("error", "span-overlap",
                                    f"{where}: spans overlap or are out of order"))
        prev_end = sp.end
        piece = rec.text[sp.start:sp.end]
        if piece != sp.form:
            findings.append(Finding("error", "span-form",
                                    f"{where}: text slice {piece!r} != span form {sp.form!r}"))


# ---------------------------------------------------------------------------
# statistics and pair export

def dataset_stats(bundle: DatasetBundle) -> DatasetStats:
    """Summary counts for one validated language bundle."""
    n_senses = 0
    n_sentences = 0
    n_cross = 0
    for hom in bundle.homonyms:
        n_senses += len(hom.senses)
        for sense in hom.senses:
            n_sentences += len(sense.sentences)
        for i, a in enumerate(hom.senses):
            for b in hom.senses[i + 1:]:
                if a.pos is not None and b.pos is not None and a.pos != b.pos:
                    n_cross += 1
    return DatasetStats(
        n_homonyms=len(bundle.homonyms),
        n_senses=n_senses,
        n_sentences=n_sentences,
        n_cross_pos_sense_pairs=n_cross,
    )


def export_pairs(bundle: DatasetBundle, wic_only: bool = False) -> list[LabeledPair]:
    """Flatten the bundle into labeled sentence pairs.

    All sense-bearing sentences (roles target_form and synonym) of one
    homonym are paired with each other; a pair is positive exactly when both
    members belong to the same sense. Each distractor sentence is paired
    only against the same-sense sentences that share its context, always
    negatively: the distractor is a different word in that same context, so
    those pairs are the context-controlled negatives the layout supports.

    With ``wic_only`` the export keeps only pairs whose two target forms are
    identical under :func:`normalize_form`, the setting where surface form
    gives the classifier no signal.
    """
    pairs: list[LabeledPair] = []
    for hom in bundle.homonyms:
        members: list[tuple[SenseEntry, SentenceRecord]] = []
        for sense in hom.senses:
            for sid in sorted(sense.sentences):
                rec = sense.sentences[sid]
                if rec.role != ROLE_DISTRACTOR:
                    members.append((sense, rec))
        for i in range(len(members)):
            for j in range(i + 1, len(members)):
                pairs.append(_make_pair(bundle.language, hom, members[i], members[j]))
        for sense in hom.senses:
            distractor = sense.sentences.get(3)
            if distractor is None:
                continue
            for sid in sorted(sense.sentences):
                rec = sense.sentences[sid]
                if rec.role == ROLE_DISTRACTOR:
                    continue
                if rec.context_id == distractor.context_id:
                    pairs.append(_make_pair(bundle.language, hom,
                                            (sense, rec), (sense, distractor)))
    if wic_only:
        pairs = [p for p in pairs
                 if normalize_form(p.form_a) == normalize_form(p.form_b)]
    pairs.sort(key=lambda p: (p.lemma, p.sense_id_a, p.sent_id_a,
                              p.sense_id_b, p.sent_id_b))
    return pairs


def _make_pair(lang: str, hom: HomonymEntry,
               a: tuple[SenseEntry, SentenceRecord],
               b: tuple[SenseEntry, SentenceRecord]) -> LabeledPair:
    if (b[0].sense_id, b[1].sentence_id) < (a[0].sense_id, a[1].sentence_id):
        a, b = b, a
    same_sense = (a[0].sense_id == b[0].sense_id
                  and a[1].role != ROLE_DISTRACTOR and b[1].role != ROLE_DISTRACTOR)
    return LabeledPair(
        lang=lang, lemma=hom.lemma,
        sense_id_a=a[0].sense_id, sent_id_a=a[1].sentence_id,
        sense_id_b=b[0].sense_id, sent_id_b=b[1].sentence_id,
        form_a=a[1].form, form_b=b[1].form,
        label="T" if same_sense else "F",
    )


PAIR_COLUMNS = ("lang", "lemma", "sense_id_a", "sent_id_a", "sense_id_b",
                "sent_id_b", "form_a", "form_b", "label")


def write_pairs(pairs: Iterable[LabeledPair], path: str | Path) -> None:
    lines = ["\t".join(PAIR_COLUMNS)]
    for p in pairs:
        lines.append("\t".join([p.lang, p.lemma, p.sense_id_a, str(p.sent_id_a),
                                p.sense_id_b, str(p.sent_id_b), p.form_a, p.form_b,
                                p.label]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_pairs(path: str | Path) -> list[LabeledPair]:
    text = Path(path).read_text(encoding="utf-8").splitlines()
    if not text or tuple(text[0].split("\t")) != PAIR_COLUMNS:
        raise ParseError(f"{path}: missing or malformed pair header")
    out = []
    for n, line in enumerate(text[1:], start=2):
        cols = line.split("\t")
        if len(cols) != len(PAIR_COLUMNS):
            raise ParseError(f"{path}:{n}: expected {len(PAIR_COLUMNS)} columns")
        out.append(LabeledPair(lang=cols[0], lemma=cols[1], sense_id_a=cols[2],
                               sent_id_a=int(cols[3]), sense_id_b=cols[4],
                               sent_id_b=int(cols[5]), form_a=cols[6], form_b=cols[7],
                               label=cols[8]))
    return out


# ---------------------------------------------------------------------------
# flat-table converter

def convert_sense_table(path: str | Path, language: str) -> DatasetBundle:
    """Import a flat one-sentence-per-row TSV into a bundle.

    Expected columns: lemma, ambiguity_level, sense_id, gloss, sentence_id,
    role, pos, context_id, text, spans. ``spans`` is ``start-end`` offsets,
    ``;``-separated for multiword targets. Rows must group sentences of one
    sense together; homonym and sense order follows first appearance.
    """
    header_expected = ["lemma", "ambiguity_level", "sense_id", "gloss", "sentence_id",
                       "role", "pos", "context_id", "text", "spans"]
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0].split("\t") != header_expected:
        raise ParseError(f"{path}: expected header {' '.join(header_expected)}")
    homonyms: dict[str, dict] = {}
    for n, line in enumerate(lines[1:], start=2):
        cols = line.split("\t")
        if len(cols) != len(header_expected):
            raise ParseError(f"{path}:{n}: expected {len(header_expected)} columns")
        (lemma, ambiguity, sense_id, gloss, sentence_id,
         role, pos, context_id, text, spans_col) = cols
        spans = []
        for chunk in spans_col.split(";"):
            try:
                start_s, end_s = chunk.split("-")
                start, end = int(start_s), int(end_s)
            except ValueError:
                raise ParseError(f"{path}:{n}: malformed span {chunk!r}") from None
            spans.append(TargetSpan(start=start, end=end, form=text[start:end]))
        hom = homonyms.setdefault(lemma, {"ambiguity_level": ambiguity, "senses": {}})
        sense = hom["senses"].setdefault(sense_id, {"gloss": gloss, "sentences": {}})
        sense["sentences"][int(sentence_id)] = SentenceRecord(
            sentence_id=int(sentence_id), text=text, role=role,
            pos=pos or None, context_id=context_id, spans=tuple(spans))
    return DatasetBundle(
        language=language,
        homonyms=tuple(
            HomonymEntry(lemma=lemma, ambiguity_level=h["ambiguity_level"],
                         senses=tuple(SenseEntry(sense_id=sid, gloss=s["gloss"],
                                                 sentences=s["sentences"])
                                      for sid, s in h["senses"].items()))
            for lemma, h in homonyms.items()),
    )
