from __future__ import annotations

import pytest

from homosem.conllu import (
    DependencyParse,
    ParseToken,
    load_conllu,
    parse_key,
    write_conllu,
)
from homosem.dataset import TargetSpan
from homosem.errors import AlignmentError, ParseError

SAMPLE = """\
# sent_id = bank/river/1
# text = He swims to the bank
1\tHe\the\tPRON\t_\t_\t2\tnsubj\t_\t_
2\tswims\tswim\tVERB\t_\t_\t0\troot\t_\t_
3\tto\tto\tADP\t_\t_\t5\tcase\t_\t_
4\tthe\tthe\tDET\t_\t_\t5\tdet\t_\t_
5\tbank\tbank\tNOUN\t_\t_\t2\tobl\t_\t_

# sent_id = bank/money/1
1\tbanks\tbank\tNOUN\t_\t_\t2\tnsubj\t_\t_
2\tlend\tlend\tVERB\t_\t_\t0\troot\t_\t_
"""


@pytest.fixture
def parses(tmp_path):
    path = tmp_path / "sample.conllu"
    path.write_text(SAMPLE, encoding="utf-8")
    return load_conllu(path)


class TestLoad:
    def test_keys_and_tokens(self, parses):
        assert set(parses) == {("bank", "river", 1), ("bank", "money", 1)}
        parse = parses[("bank", "river", 1)]
        assert [t.form for t in parse.tokens] == ["He", "swims", "to", "the", "bank"]
        assert parse.tokens[1].head is None
        assert parse.tokens[4].head == 1
        assert parse.tokens[4].deprel == "obl"
        assert parse.tokens[0].upos == "PRON"

    def test_children(self, parses):
        parse = parses[("bank", "river", 1)]
        assert parse.children(1) == [0, 4]
        assert parse.children(4) == [2, 3]

    def test_round_trip(self, parses, tmp_path):
        out = tmp_path / "out.conllu"
        write_conllu(parses.values(), out)
        again = load_conllu(out)
        assert again == parses

    def test_multiword_token_lines_skipped(self, tmp_path):
        text = (
            "# sent_id = x/a/1\n"
            "1-2\tdel\t_\t_\t_\t_\t_\t_\t_\t_\n"
            "1\tde\tde\tADP\t_\t_\t2\tcase\t_\t_\n"
            "2\tel\tel\tDET\t_\t_\t0\troot\t_\t_\n"
        )
        path = tmp_path / "mwt.conllu"
        path.write_text(text)
        parse = load_conllu(path)[("x", "a", 1)]
        assert [t.form for t in parse.tokens] == ["de", "el"]

    def test_missing_sent_id_is_an_error(self, tmp_path):
        path = tmp_path / "bad.conllu"
        path.write_text("1\tHe\the\tPRON\t_\t_\t0\troot\t_\t_\n")
        with pytest.raises(ParseError, match="sent_id"):
            load_conllu(path)

    def test_duplicate_sent_id_is_an_error(self, tmp_path):
        path = tmp_path / "bad.conllu"
        block = "# sent_id = x/a/1\n1\tHe\the\tPRON\t_\t_\t0\troot\t_\t_\n"
        path.write_text(block + "\n" + block)
        with pytest.raises(ParseError, match="duplicate"):
            load_conllu(path)

    def test_head_out_of_range(self, tmp_path):
        path = tmp_path / "bad.conllu"
        path.write_text("# sent_id = x/a/1\n1\tHe\the\tPRON\t_\t_\t9\tnsubj\t_\t_\n")
        with pytest.raises(ParseError, match="head"):
            load_conllu(path)

    def test_column_count_enforced(self, tmp_path):
        path = tmp_path / "bad.conllu"
        path.write_text("# sent_id = x/a/1\n1\tHe\the\tPRON\n")
        with pytest.raises(ParseError, match="column"):
            load_conllu(path)

    def test_parse_key(self):
        assert parse_key("bank/river/1") == ("bank", "river", 1)
        with pytest.raises(ParseError):
            parse_key("bank/river")


class TestOffsets:
    def test_tokens_located_left_to_right(self, parses):
        parse = parses[("bank", "river", 1)]
        offsets = parse.token_offsets("He swims to the bank")
        assert offsets == [(0, 2), (3, 8), (9, 11), (12, 15), (16, 20)]

    def test_repeated_words_consume_in_order(self):
        tokens = tuple(ParseToken(w, w, "NOUN", None if i == 0 else 0, "dep")
                       for i, w in enumerate(["the", "the"]))
        parse = DependencyParse(("x", "a", 1), tokens)
        assert parse.token_offsets("the the") == [(0, 3), (4, 7)]

    def test_text_mismatch_is_an_error(self, parses):
        parse = parses[("bank", "river", 1)]
        with pytest.raises(AlignmentError):
            parse.token_offsets("completely different text")


class TestSpanAlignment:
    def test_single_word_target(self, parses):
        parse = parses[("bank", "river", 1)]
        text = "He swims to the bank"
        assert parse.align_spans(text, (TargetSpan(16, 20, "bank"),)) == [4]
        assert parse.target_index(text, (TargetSpan(16, 20, "bank"),)) == 4

    def test_mwe_head_most_token_wins(self):
        # "gave up": 'gave' heads 'up', so the target index is 'gave'
        tokens = (
            ParseToken("she", "she", "PRON", 1, "nsubj"),
            ParseToken("gave", "give", "VERB", None, "root"),
            ParseToken("up", "up", "ADP", 1, "compound:prt"),
        )
        parse = DependencyParse(("give up", "a", 1), tokens)
        text = "she gave up"
        spans = (TargetSpan(4, 8, "gave"), TargetSpan(9, 11, "up"))
        assert parse.align_spans(text, spans) == [1, 2]
        assert parse.target_index(text, spans) == 1

    def test_no_overlap_is_an_error(self, parses):
        parse = parses[("bank", "river", 1)]
        with pytest.raises(AlignmentError):
            parse.align_spans("He swims to the bank", (TargetSpan(0, 0, ""),))
