"""Minimal CoNLL-U reader for the dependency parses used by the Syn strategy.

Only the columns the selection hierarchies need are kept (form, lemma, UPOS,
head, deprel). Parse blocks are keyed by a sentence-id comment of the form
``# sent_id = <lemma>/<sense_id>/<sentence_id>`` so they can be matched with
dataset sentences.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .errors import AlignmentError, ParseError

SentenceKey = tuple[str, str, int]


@dataclass(frozen=True)
class ParseToken:
    form: str
    lemma: str
    upos: str
    head: int | None  # 0-based index of the head token; None for the root
    deprel: str


@dataclass(frozen=True)
class DependencyParse:
    key: SentenceKey
    tokens: tuple[ParseToken, ...]

    def children(self, index: int) -> list[int]:
        return [i for i, tok in enumerate(self.tokens) if tok.head == index]

    def token_offsets(self, text: str) -> list[tuple[int, int]]:
        """Character offsets of each token, matched left-to-right in ``text``.

        Tokens must occur in order, separated only by whitespace; anything
        else means the parse does not belong to this sentence.
        """
        offsets = []
        pos = 0
        for tok in self.tokens:
            while pos < len(text) and text[pos].isspace():
                pos += 1
            if not text.startswith(tok.form, pos):
                raise AlignmentError(
                    f"{_key_str(self.key)}: token {tok.form!r} not found at "
                    f"offset {pos} of the sentence text")
            offsets.append((pos, pos + len(tok.form)))
            pos += len(tok.form)
        return offsets

    def align_spans(self, text: str, spans) -> list[int]:
        """Indices of tokens overlapping any of the target character spans."""
        offsets = self.token_offsets(text)
        hits = []
        for i, (start, end) in enumerate(offsets):
            for sp in spans:
                if start < sp.end and sp.start < end:
                    hits.append(i)
                    break
        if not hits:
            raise AlignmentError(f"{_key_str(self.key)}: no token overlaps the target span")
        return hits

    def target_index(self, text: str, spans) -> int:
        """The syntactic head among the tokens covered by the target spans.

        For single-word targets this is simply the covering token; for
        multiword targets the component whose head lies outside the target
        (the internal head of the expression).
        """
        hits = self.align_spans(text, spans)
        inside = set(hits)
        for i in hits:
            if self.tokens[i].head not in inside:
                return i
        return hits[0]


def _key_str(key: SentenceKey) -> str:
    return f"{key[0]}/{key[1]}/{key[2]}"


def parse_key(raw: str) -> SentenceKey:
    parts = raw.strip().split("/")
    if len(parts) != 3:
        raise ParseError(f"malformed sent_id {raw!r}, expected lemma/sense/sentence")
    try:
        return parts[0], parts[1], int(parts[2])
    except ValueError:
        raise ParseError(f"malformed sent_id {raw!r}: sentence part must be an integer") from None


def load_conllu(path: str | Path) -> dict[SentenceKey, DependencyParse]:
    """Read every parse block of a file into a key-indexed map."""
    path = Path(path)
    parses: dict[SentenceKey, DependencyParse] = {}
    key: SentenceKey | None = None
    rows: list[tuple[int, str, str, str, int, str]] = []

    def flush(lineno: int) -> None:
        nonlocal key, rows
        if not rows:
            key = None
            return
        if key is None:
            raise ParseError(f"{path}:{lineno}: parse block without a sent_id comment")
        if key in parses:
            raise ParseError(f"{path}:{lineno}: duplicate sent_id {_key_str(key)}")
        parses[key] = _build_parse(key, rows, path, lineno)
        key, rows = None, []

    lines = path.read_text(encoding="utf-8").splitlines()
    for n, line in enumerate(lines, start=1):
        if not line.strip():
            flush(n)
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("sent_id") and "=" in body:
                key = parse_key(body.split("=", 1)[1])
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise ParseError(f"{path}:{n}: expected 10 tab-separated columns")
        ident = cols[0]
        if "-" in ident or "." in ident:  # multiword-token ranges / empty nodes
            continue
        try:
            tid = int(ident)
            head = int(cols[6])
        except ValueError:
            raise ParseError(f"{path}:{n}: non-integer token id or head") from None
        rows.append((tid, cols[1], cols[2], cols[3], head, cols[7]))
    flush(len(lines) + 1)
    return parses


def _build_parse(key: SentenceKey, rows, path: Path, lineno: int) -> DependencyParse:
    rows = sorted(rows)
    ids = [r[0] for r in rows]
    if ids != list(range(1, len(rows) + 1)):
        raise ParseError(f"{path} near line {lineno}: token ids of {_key_str(key)} "
                         f"are not contiguous from 1")
    index_of = {tid: i for i, tid in enumerate(ids)}
    tokens = []
    n_roots = 0
    for tid, form, lemma, upos, head, deprel in rows:
        if head == 0:
            n_roots += 1
            head_index = None
        else:
            if head not in index_of:
                raise ParseError(f"{path} near line {lineno}: {_key_str(key)} head "
                                 f"{head} out of range")
            head_index = index_of[head]
        tokens.append(ParseToken(form=form, lemma=lemma, upos=upos,
                                 head=head_index, deprel=deprel))
    if n_roots != 1:
        raise ParseError(f"{path} near line {lineno}: {_key_str(key)} has "
                         f"{n_roots} roots, expected exactly 1")
    return DependencyParse(key=key, tokens=tuple(tokens))


def write_conllu(parses: Iterable[DependencyParse], path: str | Path) -> None:
    """Serialize parses, one block per sentence, in key order."""
    blocks = []
    for parse in sorted(parses, key=lambda p: p.key):
        lines = [f"# sent_id = {_key_str(parse.key)}"]
        for i, tok in enumerate(parse.tokens):
            head = 0 if tok.head is None else tok.head + 1
            lines.append("\t".join([str(i + 1), tok.form, tok.lemma, tok.upos, "_",
                                    "_", str(head), tok.deprel, "_", "_"]))
        blocks.append("\n".join(lines))
    Path(path).write_text("\n\n".join(blocks) + "\n", encoding="utf-8")
