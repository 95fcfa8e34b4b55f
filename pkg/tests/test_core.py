import pytest
from conftest import FIG_REF
from hypothesis import given
from strategies import segmented

from evalsub.core import (
    BoundaryTag,
    Corpus,
    MassMode,
    ParseError,
    SegmentedText,
    lines,
    mask_tokens,
    parse_corpus,
    parse_sentence,
    read_corpus,
    select_boundaries,
    serialize_sentence,
    strip_boundaries,
    subtitles,
    to_masses,
    with_tags,
    write_corpus,
)

EOL, EOB = BoundaryTag.EOL, BoundaryTag.EOB


def test_parse_notation():
    t = parse_sentence("a b <eol> c <eob>")
    assert t.tokens == ("a", "b", "c")
    assert dict(t.boundaries) == {2: EOL, 3: EOB}


def test_parse_example_sentence():
    t = parse_sentence("the car has just left Paris <eol> for its destination London <eob>")
    assert len(t) == 10
    assert dict(t.boundaries) == {6: EOL, 10: EOB}


def test_figure_reference_counts():
    t = parse_sentence(FIG_REF)
    assert len(t) == 21
    assert len(t.boundaries) == 4
    assert len(strip_boundaries(t)) == 21


@pytest.mark.parametrize("line,pos", [("a <eob> <eob> b", 2), ("<eol> a", 0),
                                      ("a <eol> <eob>", 2)])
def test_parse_rejects_bad_tags(line, pos):
    with pytest.raises(ParseError) as e:
        parse_sentence(line, line_number=4)
    assert e.value.line_number == 4
    assert e.value.position == pos
    assert "line 4" in str(e.value)


@pytest.mark.parametrize("line", ["", "   ", "<eol>", "<eob> <eol>"])
def test_parse_rejects_empty(line):
    with pytest.raises(ParseError):
        parse_sentence(line)


def test_lenient_mode_drops_and_logs(caplog):
    t = parse_sentence("<eol> a <eob> <eol> b", lenient=True)
    assert t.tokens == ("a", "b")
    assert dict(t.boundaries) == {1: EOB}
    assert "dropping" in caplog.text


def test_serialize_examples():
    assert serialize_sentence(SegmentedText(("a", "b", "c"), {2: EOL})) == "a b <eol> c"
    assert serialize_sentence(SegmentedText(("a", "b"))) == "a b"


def test_serialize_normalizes_whitespace():
    assert serialize_sentence(parse_sentence("  a\tb <eol>   c ")) == "a b <eol> c"


@given(segmented())
def test_round_trip(t):
    assert parse_sentence(serialize_sentence(t)) == t


def test_invalid_construction():
    with pytest.raises(ValueError):
        SegmentedText(("a", "b"), {0: EOL})
    with pytest.raises(ValueError):
        SegmentedText(("a", "b"), {3: EOL})
    with pytest.raises(ValueError):
        SegmentedText(("a", "<eol>"))
    with pytest.raises(ValueError):
        SegmentedText(("a b",))


def test_masses_examples():
    t = SegmentedText(tuple("abcde"), {2: EOL, 5: EOB})
    assert to_masses(t, MassMode.AGNOSTIC) == (2, 3)
    assert to_masses(t, MassMode.BLOCK) == (5,)
    assert to_masses(t, MassMode.LINE) == (2, 3)
    assert to_masses(t.with_boundaries({})) == (5,)


@given(segmented())
def test_masses_sum_to_length(t):
    for mode in MassMode:
        m = to_masses(t, mode)
        assert sum(m) == len(t)
        assert all(x > 0 for x in m)


def test_mask_tokens():
    t = parse_sentence("a b <eol> c")
    assert serialize_sentence(mask_tokens(t)) == "_ _ <eol> _"
    assert mask_tokens(SegmentedText(("x",) * 4)).tokens == ("_",) * 4
    with pytest.raises(ValueError):
        mask_tokens(t, "<eob>")


@given(segmented())
def test_mask_preserves_boundaries(t):
    assert mask_tokens(t).boundary_map() == t.boundary_map()
    assert strip_boundaries(t) == list(t.tokens)


def test_views():
    t = parse_sentence("a b <eol> c <eob> d")
    assert with_tags(t) == ["a", "b", "<eol>", "c", "<eob>", "d"]
    assert lines(t) == [("a", "b"), ("c",), ("d",)]
    assert subtitles(t, MassMode.BLOCK) == [(("a", "b", "c"), EOB), (("d",), None)]
    assert dict(select_boundaries(t, "line").boundaries) == {2: EOL}


def test_corpus_io(tmp_path):
    c = parse_corpus(["a b <eol> c <eob>", "d"], "x")
    p = tmp_path / "c.txt"
    write_corpus(c, p)
    assert p.read_text(encoding="utf-8") == "a b <eol> c <eob>\nd\n"
    back = read_corpus(p)
    assert back.sentences == c.sentences
    assert back.identifier == "c.txt"
    assert (c.n_tokens, c.n_boundaries) == (4, 2)


def test_corpus_parse_error_names_line(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("a b\nc <eol> <eol>\n", encoding="utf-8")
    with pytest.raises(ParseError, match="line 2"):
        read_corpus(p)


def test_empty_line_inside_file_is_an_error():
    with pytest.raises(ParseError, match="line 2"):
        parse_corpus(["a", "", "b"])


def test_pickle_round_trip():
    import pickle
    t = parse_sentence("a b <eol> c")
    assert pickle.loads(pickle.dumps(t)) == t
    c = Corpus((t,), "id")
    assert pickle.loads(pickle.dumps(c)) == c
