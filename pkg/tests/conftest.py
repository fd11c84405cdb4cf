"""Shared builders for synthetic datasets, vector tables, and CEIF fixtures."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from homosem.ceif import CeifRecord, CeifToken
from homosem.dataset import (
    DatasetBundle,
    HomonymEntry,
    SenseEntry,
    SentenceRecord,
    TargetSpan,
)

ROLE_BY_ID = {1: "target_form", 2: "synonym", 3: "distractor",
              4: "target_form", 5: "synonym"}


def record(sentence_id: int, form: str, context_id: str, pos: str | None = "NOUN",
           role: str | None = None, prefix: str = "somebody saw the",
           suffix: str = "yesterday", inflected: bool = False) -> SentenceRecord:
    """One sentence whose target spans are synthesized around ``form``.

    Multiword forms get one span per component word.
    """
    text = f"{prefix} {form} {suffix}"
    spans = []
    cursor = len(prefix) + 1
    for word in form.split():
        spans.append(TargetSpan(start=cursor, end=cursor + len(word), form=word))
        cursor += len(word) + 1
    return SentenceRecord(
        sentence_id=sentence_id,
        text=text,
        role=role or ROLE_BY_ID[sentence_id],
        pos=pos,
        context_id=context_id,
        spans=tuple(spans),
        inflected=inflected,
    )


def sense(sense_id: str, lemma: str, synonym: str | None, distractor: str,
          pos: str = "NOUN", synonym5: str | None = None, has2: bool = True,
          has5: bool = True, ctx: str | None = None,
          lemma4: str | None = None) -> SenseEntry:
    """A sense with the standard five-sentence layout.

    ``synonym5`` defaults to the sentence-2 synonym; ``lemma4`` lets the
    second target occurrence use an inflected variant.
    """
    ctx = ctx or sense_id
    sentences = {
        1: record(1, lemma, f"{ctx}-a", pos=pos),
        3: record(3, distractor, f"{ctx}-a", pos=pos),
        4: record(4, lemma4 or lemma, f"{ctx}-b", pos=pos,
                  inflected=lemma4 is not None),
    }
    if has2 and synonym is not None:
        sentences[2] = record(2, synonym, f"{ctx}-a", pos=pos)
    if has5 and (synonym5 or synonym) is not None:
        sentences[5] = record(5, synonym5 or synonym, f"{ctx}-c", pos=pos)
    return SenseEntry(sense_id=sense_id, gloss=f"gloss of {sense_id}",
                      sentences=sentences)


def toy_bundle() -> DatasetBundle:
    """Two fully populated senses of one homonym; the synonym of sentence 5
    repeats the one from sentence 2, so distractor anchor pairs are exactly
    (1,2), (1,5), (4,2) per sense."""
    hom = HomonymEntry(
        lemma="coach",
        ambiguity_level="full",
        senses=(
            sense("bus", "coach", "bus", "driver", ctx="s1"),
            sense("trainer", "coach", "trainer", "president", ctx="s2"),
        ),
    )
    return DatasetBundle(language="en", homonyms=(hom,))


@pytest.fixture
def toy():
    return toy_bundle()


# ---------------------------------------------------------------------------
# vector-table fixtures

def write_vector_file(path: Path, entries: dict[str, list[float]]) -> Path:
    dim = len(next(iter(entries.values())))
    lines = [f"{len(entries)} {dim}"]
    for token, vec in entries.items():
        lines.append(token + " " + " ".join(repr(float(x)) for x in vec))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# CEIF fixtures

def make_ceif_record(key, tokens_spec, num_layers=4, hidden_size=3,
                     model_id="fixture", seed=0, includes_layer0=False,
                     stack=None) -> CeifRecord:
    """``tokens_spec``: list of (text, start, end, special) tuples; word_index
    is assigned from span adjacency for non-specials."""
    tokens = []
    word_index = -1
    prev_end = None
    for text, start, end, special in tokens_spec:
        if special:
            tokens.append(CeifToken(text=text, start=start, end=end,
                                    special=True, word_index=None))
            continue
        if prev_end is None or start != prev_end:
            word_index += 1
        tokens.append(CeifToken(text=text, start=start, end=end,
                                special=False, word_index=word_index))
        prev_end = end
    n_rows = num_layers + 1 if includes_layer0 else num_layers
    if stack is None:
        rng = np.random.default_rng(seed)
        stack = rng.normal(size=(n_rows, len(tokens), hidden_size))
    return CeifRecord(sentence_key=tuple(key), model_id=model_id,
                      num_layers=num_layers, hidden_size=hidden_size,
                      tokens=tuple(tokens),
                      stack=np.asarray(stack, dtype=np.float32),
                      includes_layer0=includes_layer0)


def dump_dataset(bundle: DatasetBundle, path: Path) -> Path:
    from homosem.dataset import write_dataset

    write_dataset(bundle, path)
    return path


def read_json(path: Path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))
