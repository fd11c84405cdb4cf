"""Contextualized-vector provider over CEIF files.

CEIF is line-delimited JSON, one record per line. Each record carries the
subword tokens of one dataset sentence (with character offsets and a
special-token flag) and a layer-major stack of hidden states::

    {"version": "ceif/1", "sentence_key": [lemma, sense_id, sentence_id],
     "model_id": ..., "num_layers": L, "hidden_size": H,
     "includes_layer0": false,
     "tokens": [{"text", "start", "end", "special", "word_index"}, ...],
     "stack": [[[... H floats ...] * T] * L]}

Layers are stored 1..L in order; the embedding layer (0) is optional and
flagged via ``includes_layer0``. Strategies:

* ``lay``  — per-layer mean over the target's piece vectors (width H);
* ``cat``  — concatenation of the last ``last_n`` layer means, ascending
  layer order (width last_n x H);
* ``add``  — elementwise sum of the last ``last_n`` layer means (width H);
* ``sent`` — mean over non-special tokens of each token's last-4
  concatenation (width 4H).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .conllu import SentenceKey
from .dataset import DatasetBundle, SentenceRecord, TargetSpan
from .errors import AlignmentError, ParseError, ScoringError, StrategyError

CEIF_VERSION = "ceif/1"


@dataclass(frozen=True)
class CeifToken:
    text: str
    start: int
    end: int
    special: bool
    word_index: int | None


@dataclass(frozen=True)
class CeifRecord:
    sentence_key: SentenceKey
    model_id: str
    num_layers: int
    hidden_size: int
    tokens: tuple[CeifToken, ...]
    #: (L, T, H) or (L+1, T, H) with the embedding layer first
    stack: np.ndarray
    includes_layer0: bool = False

    def layer(self, index: int) -> np.ndarray:
        """The (T, H) hidden states of one layer; 1..L, or 0 when exported."""
        if index == 0:
            if not self.includes_layer0:
                raise StrategyError(f"{_key_str(self.sentence_key)}: layer 0 "
                                    "was not exported")
            return self.stack[0]
        if not 1 <= index <= self.num_layers:
            raise StrategyError(f"layer {index} outside 1..{self.num_layers}")
        return self.stack[index if self.includes_layer0 else index - 1]


@dataclass(frozen=True)
class Strategy:
    kind: str  # sent | cat | add | lay
    layer: int | None = None
    last_n: int = 4

    def __post_init__(self):
        if self.kind not in ("sent", "cat", "add", "lay"):
            raise StrategyError(f"unknown contextual strategy {self.kind!r}")
        if self.kind == "lay" and self.layer is None:
            raise StrategyError("lay strategy needs a layer number")
        if self.last_n < 1:
            raise StrategyError("last_n must be >= 1")

    def check(self, record: CeifRecord) -> None:
        if self.kind == "lay":
            low = 0 if record.includes_layer0 else 1
            if not low <= self.layer <= record.num_layers:
                raise StrategyError(f"layer {self.layer} outside {low}.."
                                    f"{record.num_layers} for {record.model_id}")
        elif self.kind in ("cat", "add") and self.last_n > record.num_layers:
            raise StrategyError(f"{self.kind} needs {self.last_n} layers, model "
                                f"has {record.num_layers}")


def _key_str(key: SentenceKey) -> str:
    return f"{key[0]}/{key[1]}/{key[2]}"


# ---------------------------------------------------------------------------
# I/O

def load_ceif(path: str | Path) -> dict[SentenceKey, CeifRecord]:
    """Read a CEIF file into a key-indexed map, dimension-checking every record."""
    path = Path(path)
    records: dict[SentenceKey, CeifRecord] = {}
    with path.open(encoding="utf-8") as fh:
        for n, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                doc = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path}:{n}: invalid JSON record: {exc}") from exc
            record = _parse_record(doc, f"{path}:{n}")
            if record.sentence_key in records:
                raise ParseError(f"{path}:{n}: duplicate sentence_key "
                                 f"{_key_str(record.sentence_key)}")
            records[record.sentence_key] = record
    return records


def _parse_record(doc: dict, where: str) -> CeifRecord:
    if doc.get("version") != CEIF_VERSION:
        raise ParseError(f"{where}: unknown version {doc.get('version')!r}, "
                         f"expected {CEIF_VERSION!r}")
    try:
        raw_key = doc["sentence_key"]
        key: SentenceKey = (str(raw_key[0]), str(raw_key[1]), int(raw_key[2]))
        num_layers = int(doc["num_layers"])
        hidden_size = int(doc["hidden_size"])
        tokens_raw = doc["tokens"]
        stack_raw = doc["stack"]
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise ParseError(f"{where}: malformed record: {exc}") from exc
    includes_layer0 = bool(doc.get("includes_layer0", False))
    where = f"{where} ({_key_str(key)})"

    tokens = []
    for i, t in enumerate(tokens_raw):
        special = bool(t.get("special", False))
        word_index = t.get("word_index")
        if special and word_index is not None:
            raise ParseError(f"{where}: special token {i} carries a word_index")
        tok = CeifToken(text=str(t.get("text", "")), start=int(t.get("start", 0)),
                        end=int(t.get("end", 0)), special=special,
                        word_index=None if word_index is None else int(word_index))
        if not special and not tok.start < tok.end:
            raise ParseError(f"{where}: non-special token {i} has empty span "
                             f"{tok.start}:{tok.end}")
        tokens.append(tok)
    _check_word_contiguity(tokens, where)

    n_layers = num_layers + 1 if includes_layer0 else num_layers
    if len(stack_raw) != n_layers:
        raise ParseError(f"{where}: stack has {len(stack_raw)} layers, "
                         f"expected {n_layers}")
    for li, layer in enumerate(stack_raw):
        if len(layer) != len(tokens):
            raise ParseError(f"{where}: layer {li} has {len(layer)} rows, "
                             f"expected {len(tokens)} tokens")
        for row in layer:
            if len(row) != hidden_size:
                raise ParseError(f"{where}: row width {len(row)} != hidden_size "
                                 f"{hidden_size}")
    stack = np.asarray(stack_raw, dtype=np.float32)
    return CeifRecord(sentence_key=key, model_id=str(doc.get("model_id", "")),
                      num_layers=num_layers, hidden_size=hidden_size,
                      tokens=tuple(tokens), stack=stack,
                      includes_layer0=includes_layer0)


def _check_word_contiguity(tokens: Sequence[CeifToken], where: str) -> None:
    seen: set[int] = set()
    current: int | None = None
    for tok in tokens:
        if tok.word_index is None:
            continue
        if tok.word_index != current:
            if tok.word_index in seen:
                raise ParseError(f"{where}: pieces of word {tok.word_index} "
                                 "are not contiguous")
            seen.add(tok.word_index)
            current = tok.word_index


def write_ceif(records: Iterable[CeifRecord], path: str | Path) -> None:
    lines = []
    for rec in records:
        doc = {
            "version": CEIF_VERSION,
            "sentence_key": list(rec.sentence_key),
            "model_id": rec.model_id,
            "num_layers": rec.num_layers,
            "hidden_size": rec.hidden_size,
            "includes_layer0": rec.includes_layer0,
            "tokens": [
                {"text": t.text, "start": t.start, "end": t.end,
                 "special": t.special, "word_index": t.word_index}
                for t in rec.tokens
            ],
            "stack": [[[float(x) for x in row] for row in layer]
                      for layer in rec.stack],
        }
        lines.append(json.dumps(doc, ensure_ascii=False))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# strategies

def align_target(record: CeifRecord, spans: Sequence[TargetSpan]) -> list[int]:
    """Indices of the non-special pieces overlapping any target span."""
    hits = []
    for i, tok in enumerate(record.tokens):
        if tok.special:
            continue
        for sp in spans:
            if tok.start < sp.end and sp.start < tok.end:
                hits.append(i)
                break
    if not hits:
        raise AlignmentError(f"{_key_str(record.sentence_key)}: no piece overlaps "
                             "the target span")
    return hits


def _piece_mean(record: CeifRecord, layer: int, indices: Sequence[int]) -> np.ndarray:
    return record.layer(layer)[indices].astype(np.float64).mean(axis=0)


def _last_layers(record: CeifRecord, last_n: int) -> range:
    return range(record.num_layers - last_n + 1, record.num_layers + 1)


def target_vector(record: CeifRecord, spans: Sequence[TargetSpan],
                  strategy: Strategy) -> np.ndarray:
    """Target-word vector under cat/add/lay; pieces are averaged per layer."""
    strategy.check(record)
    indices = align_target(record, spans)
    if strategy.kind == "lay":
        return _piece_mean(record, strategy.layer, indices)
    if strategy.kind == "cat":
        return np.concatenate([_piece_mean(record, l, indices)
                               for l in _last_layers(record, strategy.last_n)])
    if strategy.kind == "add":
        means = [_piece_mean(record, l, indices)
                 for l in _last_layers(record, strategy.last_n)]
        return np.sum(means, axis=0)
    raise StrategyError(f"target_vector cannot apply strategy {strategy.kind!r}")


def sentence_vector_ctx(record: CeifRecord, last_n: int = 4) -> np.ndarray:
    """Sentence vector: mean over non-special pieces of per-piece last-n cats."""
    if last_n > record.num_layers:
        raise StrategyError(f"sentence strategy needs {last_n} layers, model "
                            f"has {record.num_layers}")
    indices = [i for i, tok in enumerate(record.tokens) if not tok.special]
    if not indices:
        raise ScoringError(f"{_key_str(record.sentence_key)}: every token is special")
    layers = [record.layer(l)[indices].astype(np.float64)
              for l in _last_layers(record, last_n)]
    per_piece = np.concatenate(layers, axis=1)  # (T', last_n*H)
    return per_piece.mean(axis=0)


# ---------------------------------------------------------------------------
# provider

class ContextualProvider:
    """Resolves dataset sentence references to CEIF-backed vectors."""

    kinds = ("sent", "cat", "add", "lay")

    def __init__(self, records: dict[SentenceKey, CeifRecord],
                 bundle: DatasetBundle, strategy: Strategy):
        self.records = records
        self.strategy = strategy
        self._spans: dict[SentenceKey, SentenceRecord] = {}
        for hom, sense, rec in bundle.iter_sentences():
            self._spans[(hom.lemma, sense.sense_id, rec.sentence_id)] = rec

    @property
    def describes(self) -> str:
        if self.strategy.kind == "lay":
            return f"contextual/lay:{self.strategy.layer}"
        return f"contextual/{self.strategy.kind}"

    def layer_count(self) -> int:
        counts = {rec.num_layers for rec in self.records.values()}
        if len(counts) != 1:
            raise ParseError(f"heterogeneous layer counts in CEIF input: "
                             f"{sorted(counts)}")
        return counts.pop()

    def missing_keys(self, refs: Iterable[SentenceKey]) -> list[str]:
        return [f"{l}/{s}/{n}" for (l, s, n) in refs
                if (l, s, n) not in self.records or (l, s, n) not in self._spans]

    def vector(self, key: SentenceKey) -> np.ndarray:
        record = self.records[key]
        if self.strategy.kind == "sent":
            return sentence_vector_ctx(record, self.strategy.last_n)
        return target_vector(record, self._spans[key].spans, self.strategy)
