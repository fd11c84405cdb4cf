"""Static word-vector provider: table loading and the WV/Sent/Syn strategies.

The vector file is plain text: a header line ``<vocab_size> <dim>`` followed
by one row per token (token then ``dim`` decimal floats, space-separated).
Strategies:

* ``wv``   — the target word's stored vector; multiword targets average
  their component vectors.
* ``sent`` — arithmetic mean over the sentence's in-vocabulary tokens.
* ``syn``  — the target vector plus the vectors of up to ``k`` syntactically
  related words chosen by a POS-specific hierarchy over the dependency parse.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .conllu import DependencyParse, SentenceKey
from .dataset import DatasetBundle, SentenceRecord
from .errors import ParseError, ScoringError, StrategyError

log = logging.getLogger(__name__)

OOV_POLICIES = ("error", "zero", "lowercase_retry")

#: relations a noun's sibling may bear under its head verb
_DEPVERB_RELS = frozenset({"obj", "nmod", "obl"})
#: relations counted as verb arguments after the direct object
_ARG_RELS = frozenset({"nsubj", "nmod", "obl"})

_WORD_RE = re.compile(r"\w+", re.UNICODE)


@dataclass
class OovCounter:
    """Mutable tally of lookup misses, shared across one evaluation run."""
    count: int = 0
    misses: list[str] = field(default_factory=list)

    def record(self, token: str) -> None:
        self.count += 1
        self.misses.append(token)


@dataclass(frozen=True)
class VectorTable:
    dim: int
    entries: dict[str, np.ndarray]

    @property
    def vocab_size(self) -> int:
        return len(self.entries)

    def lookup(self, token: str, policy: str = "zero",
               counter: OovCounter | None = None) -> np.ndarray | None:
        """Resolve one token under the given OOV policy.

        Returns ``None`` only when the token is missing and the caller is
        expected to skip it (``sentence_vector`` semantics are handled by the
        callers, which pass ``policy='skip'``).
        """
        vec = self.entries.get(token)
        if vec is None and policy == "lowercase_retry":
            vec = self.entries.get(token.casefold())
        if vec is not None:
            return vec
        if counter is not None:
            counter.record(token)
        if policy == "error":
            raise ScoringError(f"token {token!r} not in the vector table")
        if policy == "skip":
            return None
        log.warning("OOV token %r replaced by the zero vector", token)
        return np.zeros(self.dim, dtype=np.float32)


def load_vectors(path: str | Path) -> VectorTable:
    """Read a text vector table, keeping the first row of any duplicate token."""
    path = Path(path)
    entries: dict[str, np.ndarray] = {}
    dim = None
    declared = None
    with path.open(encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ParseError(f"{path}:1: header must be '<vocab_size> <dim>'")
        try:
            declared, dim = int(header[0]), int(header[1])
        except ValueError:
            raise ParseError(f"{path}:1: header fields must be integers") from None
        if dim <= 0:
            raise ParseError(f"{path}:1: dim must be positive, got {dim}")
        for n, line in enumerate(fh, start=2):
            parts = line.rstrip("\n").split(" ")
            if parts and parts[-1] == "":  # fastText-style trailing space
                parts.pop()
            if len(parts) != dim + 1:
                raise ParseError(f"{path}:{n}: expected 1 token + {dim} floats, "
                                 f"got {len(parts)} fields")
            token = parts[0]
            if token in entries:
                log.warning("%s:%d: duplicate token %r, keeping first", path, n, token)
                continue
            try:
                entries[token] = np.array([float(x) for x in parts[1:]], dtype=np.float32)
            except ValueError:
                raise ParseError(f"{path}:{n}: non-numeric vector component") from None
    if declared != len(entries):
        log.warning("%s: header declares %d tokens, table holds %d",
                    path, declared, len(entries))
    return VectorTable(dim=dim, entries=entries)


# ---------------------------------------------------------------------------
# strategies

def word_vector(table: VectorTable, forms: str | Sequence[str],
                policy: str = "zero", counter: OovCounter | None = None) -> np.ndarray:
    """Vector of a (possibly multiword) surface form.

    Multiword forms yield the arithmetic mean of their component vectors,
    each component resolved under the OOV policy.
    """
    if policy not in OOV_POLICIES:
        raise StrategyError(f"unknown OOV policy {policy!r}, expected one of {OOV_POLICIES}")
    words = forms.split() if isinstance(forms, str) else list(forms)
    if not words:
        raise ScoringError("empty target form")
    parts = [table.lookup(w, policy, counter) for w in words]
    return np.mean(np.stack(parts), axis=0)


def sentence_vector(table: VectorTable, tokens: Sequence[str],
                    counter: OovCounter | None = None,
                    exclude: Iterable[str] = ()) -> np.ndarray:
    """Mean over the in-vocabulary tokens of a sentence; OOV tokens are skipped."""
    skip = set(exclude)
    rows = []
    for tok in tokens:
        if tok in skip:
            continue
        vec = table.lookup(tok, "skip", counter)
        if vec is not None:
            rows.append(vec)
    if not rows:
        raise ScoringError("no in-vocabulary token in the sentence")
    return np.mean(np.stack(rows), axis=0)


def select_syntactic_context(parse: DependencyParse, target: int, k: int) -> list[int]:
    """Up to ``k`` context-token indices for the Syn strategy.

    Nouns walk HeadVerb > DepVerb > DepAdj > DepNoun; verbs walk
    Head > Obj > Arg. Ties within a tier are broken by ascending token
    index; the target itself is never selected.
    """
    if not 1 <= k <= 4:
        raise StrategyError(f"syn context size must be 1..4, got {k}")
    tokens = parse.tokens
    upos = tokens[target].upos
    tiers: list[list[int]] = []
    if upos in ("NOUN", "PROPN"):
        head = tokens[target].head
        head_verb = head if head is not None and tokens[head].upos == "VERB" else None
        if head_verb is not None:
            tiers.append([head_verb])
            tiers.append([i for i in parse.children(head_verb)
                          if i != target and tokens[i].deprel in _DEPVERB_RELS])
        deps = parse.children(target)
        tiers.append([i for i in deps if tokens[i].upos == "ADJ"])
        tiers.append([i for i in deps if tokens[i].upos in ("NOUN", "PROPN")])
    elif upos == "VERB":
        head = tokens[target].head
        if head is not None and tokens[head].upos in ("VERB", "NOUN"):
            tiers.append([head])
        deps = parse.children(target)
        tiers.append([i for i in deps if tokens[i].deprel == "obj"])
        tiers.append([i for i in deps if tokens[i].deprel in _ARG_RELS])
    else:
        log.warning("target token %r has POS %s, outside the selection hierarchies",
                    tokens[target].form, upos)
        return []
    chosen: list[int] = []
    for tier in tiers:
        for i in sorted(tier):
            if i != target and i not in chosen:
                chosen.append(i)
                if len(chosen) == k:
                    return chosen
    return chosen


def syn_vector(table: VectorTable, parse: DependencyParse, record: SentenceRecord,
               k: int, policy: str = "zero",
               counter: OovCounter | None = None) -> np.ndarray:
    """Target vector plus the sum of its selected context-word vectors.

    Context words that are out of vocabulary are skipped rather than zeroed,
    so they neither help nor hurt.
    """
    target = parse.target_index(record.text, record.spans)
    base = word_vector(table, [s.form for s in record.spans], policy, counter)
    total = base.astype(np.float64)
    for i in select_syntactic_context(parse, target, k):
        vec = table.lookup(parse.tokens[i].form, "skip", counter)
        if vec is not None:
            total = total + vec
    return total


# ---------------------------------------------------------------------------
# provider

class StaticProvider:
    """Resolves dataset sentence references to vectors under one strategy."""

    kinds = ("wv", "sent", "syn")

    def __init__(self, table: VectorTable, bundle: DatasetBundle,
                 strategy: str, parses: dict[SentenceKey, DependencyParse] | None = None,
                 syn_k: int = 3, oov_policy: str = "zero"):
        if strategy not in self.kinds:
            raise StrategyError(f"static provider cannot apply strategy {strategy!r}")
        if strategy == "syn" and parses is None:
            raise StrategyError("syn strategy needs dependency parses")
        self.table = table
        self.bundle = bundle
        self.strategy = strategy
        self.parses = parses or {}
        self.syn_k = syn_k
        self.oov_policy = oov_policy
        self.counter = OovCounter()
        self._records: dict[SentenceKey, SentenceRecord] = {}
        for hom, sense, rec in bundle.iter_sentences():
            self._records[(hom.lemma, sense.sense_id, rec.sentence_id)] = rec

    @property
    def describes(self) -> str:
        suffix = f":{self.syn_k}" if self.strategy == "syn" else ""
        return f"static/{self.strategy}{suffix}"

    def missing_keys(self, refs: Iterable[SentenceKey]) -> list[str]:
        missing = [f"{l}/{s}/{n}" for (l, s, n) in refs if (l, s, n) not in self._records]
        if self.strategy == "syn":
            missing += [f"{l}/{s}/{n} (no parse)" for (l, s, n) in refs
                        if (l, s, n) in self._records and (l, s, n) not in self.parses]
        return missing

    def vector(self, key: SentenceKey) -> np.ndarray:
        rec = self._records[key]
        if self.strategy == "wv":
            return word_vector(self.table, [s.form for s in rec.spans],
                               self.oov_policy, self.counter)
        if self.strategy == "sent":
            return sentence_vector(self.table, self._tokens(key, rec), self.counter)
        return syn_vector(self.table, self.parses[key], rec, self.syn_k,
                          self.oov_policy, self.counter)

    def _tokens(self, key: SentenceKey, rec: SentenceRecord) -> list[str]:
        parse = self.parses.get(key)
        if parse is not None:
            return [t.form for t in parse.tokens]
        return _WORD_RE.findall(rec.text)
