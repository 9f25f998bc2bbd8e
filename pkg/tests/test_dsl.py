import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from docgen import gen_document
from sketchkit.cli import corpus_path
from sketchkit.dsl import (
    Document,
    dualize_document,
    parse_document,
    serialize_document,
    tokenize,
)
from sketchkit.errors import ParseError, ResolutionError
from sketchkit.kernel import LIMIT, Path, dualize_sketch

CORPUS_TEXT = open(corpus_path(), encoding="utf-8").read()


def test_corpus_parses(corpus):
    assert len(corpus) == 60
    assert {"One", "Two", "Iso2", "ParFork", "B2", "Vee"} <= set(corpus.categories)
    for c in ("One", "Two", "Iso2", "ParFork", "B2", "Vee"):
        assert c + "_op" in corpus.categories


def test_empty_input():
    assert parse_document("") == Document()
    assert parse_document("  // only a comment\n") == Document()
    assert serialize_document(Document()) == ""


def test_missing_path_is_a_parse_error():
    text = "sketch S { objects: A; arrow f: A -> A; commute f = ; }"
    with pytest.raises(ParseError) as err:
        parse_document(text)
    e = err.value
    assert e.line == 1 and text[e.column - 1] == ";"
    assert e.column > text.index("=")


def test_parse_error_position_and_expected():
    with pytest.raises(ParseError) as err:
        parse_document("category C {\n  objects: A\n}")
    assert err.value.line == 3 and err.value.column == 1
    assert "';'" in err.value.expected or "','" in err.value.expected


def test_resolution_errors_are_collected():
    text = """
    category C { objects: X; }
    sketch S { objects: A; arrow f: A -> A; }
    sequent Q = S |- T |- U;
    structure F : S in C { map A |-> Y; map f |-> id_X; }
    """
    with pytest.raises(ResolutionError) as err:
        parse_document(text)
    msgs = err.value.messages
    assert len(msgs) == 3
    assert any("'T'" in m for m in msgs) and any("'Y'" in m for m in msgs)
    assert all(m.startswith("line ") for m in msgs)


def test_dangling_arrow_is_a_validation_issue():
    d = parse_document("sketch S { objects: A; arrow f: A -> B; }")
    from sketchkit.kernel import validate_sketch

    assert len(validate_sketch(d.sketch("S"))) == 1


def test_path_direction_and_identity():
    d = parse_document("""
        sketch S { objects: A, B, C; arrow f: A -> B; arrow g: B -> C; arrow h: A -> C;
                   commute g.f = h; commute id(A) = id(A); }
    """)
    c1, c2 = d.sketch("S").commutativities
    assert c1.lhs == Path("A", ("f", "g")) and c1.rhs == Path("A", ("h",))
    assert c2.lhs == Path("A")


def test_category_identities_and_composition():
    d = parse_document("category C { objects: X, Y; arrow f: X -> Y; arrow g: Y -> X; "
                       "compose g.f = id_X; compose f.g = id_Y; }")
    c = d.category("C")
    assert c.identity("X") == "id_X"
    assert c.compose("g", "f") == "id_X"
    assert c.compose("f", "id_X") == "f"


def test_convergence_syntax():
    d = parse_document("""
        sketch S { objects: X, Y, P; arrow p: P -> X; arrow q: P -> Y;
                   limit P with (W2: q, W1: p) over { nodes: W1, W2; }; }
    """)
    (c,) = d.sketch("S").convergences
    assert c.kind == LIMIT and c.apex == "P"
    assert c.shape.vertices == ("W1", "W2")
    assert c.leg_map == {"W1": "p", "W2": "q"}


def test_extends_and_category_references(corpus):
    mono = corpus.sketch("MonoB")
    assert set(corpus.sketch("ArrowCat").commutativities) <= set(mono.commutativities)
    assert corpus.sequent("MonoSeq").a.name == "ArrowCat"


def test_keywords_are_reserved():
    with pytest.raises(ParseError):
        parse_document("sketch limit { objects: ; }")


def test_tokens_carry_positions():
    toks = tokenize("sketch S {\n  objects: A;\n}")
    assert [(t.line, t.column) for t in toks[:3]] == [(1, 1), (1, 8), (1, 10)]


def test_corpus_round_trip(corpus):
    text = serialize_document(corpus)
    assert parse_document(text) == corpus
    assert serialize_document(parse_document(text)) == text


def test_dualize_document(corpus):
    dual = dualize_document(corpus)
    back = parse_document(serialize_document(dual))
    assert back == dual
    assert dual.sketch("ProdB") == dualize_sketch(corpus.sketch("ProdB"))
    twice = dualize_document(dual)
    assert twice.sketch("MonoB") == corpus.sketch("MonoB")


@settings(max_examples=1000, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.randoms(use_true_random=False))
def test_generated_documents_round_trip(rng):
    d = gen_document(rng)
    text = serialize_document(d)
    back = parse_document(text)
    assert back == d
    assert serialize_document(back) == text


@settings(max_examples=300, deadline=None)
@given(st.integers(0, len(CORPUS_TEXT) - 1), st.integers(1, 20), st.text(max_size=5))
def test_damaged_input_fails_cleanly(start, length, junk):
    text = CORPUS_TEXT[:start] + junk + CORPUS_TEXT[start + length:]
    try:
        parse_document(text)
    except ParseError as e:
        lines = text.split("\n")
        assert 1 <= e.line <= len(lines) + 1
        assert 1 <= e.column <= len(lines[e.line - 1]) + 2 if e.line <= len(lines) else True
    except ResolutionError as e:
        assert e.messages


def test_category_references_are_resolved():
    text = "category C { objects: X; arrow f: X -> Y; compose f.id_X = f; compose g.f = f; }"
    with pytest.raises(ResolutionError) as err:
        parse_document(text)
    msgs = err.value.messages
    assert len(msgs) == 2
    assert "'Y'" in msgs[0] and "'g'" in msgs[1]
