"""Transfer-language wire format: goldens, round trips, rejections."""

import pytest

import listings
from astgen import generate_toplevels
from syntheto.parser import parse_program
from syntheto.transfer import (
    NIL, SChar, SInt, SList, SStr, SSym, TransferError, ast_to_transfer,
    outcome_to_transfer, parse_sexpr, serialize, slist, sym,
    transfer_to_ast, transfer_to_outcome,
)

GOLDEN_POSITIVE = """\
(SYNTHETO::PROCESS-SYNTHETO-TOPLEVEL
 (SYNTHETO::MAKE-TOPLEVEL-TYPE
  :GET (SYNTHETO::MAKE-TYPE-DEFINITION
        :NAME (SYNTHETO::MAKE-IDENTIFIER :NAME "positive")
        :BODY (SYNTHETO::MAKE-TYPE-DEFINER-SUBSET
               :GET (SYNTHETO::MAKE-TYPE-SUBSET
                     :SUPERTYPE (SYNTHETO::MAKE-TYPE-INTEGER)
                     :VARIABLE (SYNTHETO::MAKE-IDENTIFIER :NAME "x")
                     :RESTRICTION
                     (SYNTHETO::MAKE-EXPRESSION-BINARY
                      :OPERATOR (SYNTHETO::MAKE-BINARY-OP-GT)
                      :LEFT-OPERAND
                      (SYNTHETO::MAKE-EXPRESSION-VARIABLE
                       :NAME (SYNTHETO::MAKE-IDENTIFIER :NAME "x"))
                      :RIGHT-OPERAND
                      (SYNTHETO::MAKE-EXPRESSION-LITERAL
                       :GET (SYNTHETO::MAKE-LITERAL-INTEGER :VALUE 0)))
                     :WITNESS NIL)))))
"""

GOLDEN_OUTCOME = '(SYNTHETO::MAKE-OUTCOME-TYPE-SUCCESS :MESSAGE "positive")'


def normalize_ws(s: str) -> str:
    return " ".join(s.split())


def test_character_serialization():
    assert serialize(SChar("!")) == "(CODE-CHAR 33)"


def test_special_symbols_bare():
    assert serialize(SSym("COMMON-LISP", "T")) == "T"
    assert serialize(NIL) == "NIL"
    assert serialize(sym("FOO")) == "SYNTHETO::FOO"


def test_symbol_charset_enforced():
    with pytest.raises(TransferError):
        serialize(sym("lower"))
    with pytest.raises(TransferError):
        serialize(sym("SPACE D"))
    assert serialize(sym("SEQ.X:A-B[C]")) == "SYNTHETO::SEQ.X:A-B[C]"


def test_golden_positive_byte_for_byte():
    [unit] = parse_program(listings.POSITIVE)
    assert normalize_ws(serialize(ast_to_transfer(unit))) == \
        normalize_ws(GOLDEN_POSITIVE)


def test_golden_positive_subterms():
    [unit] = parse_program(listings.POSITIVE)
    text = serialize(ast_to_transfer(unit))
    assert "(SYNTHETO::MAKE-LITERAL-INTEGER :VALUE 0)" in text
    assert ":WITNESS NIL" in text
    assert '(SYNTHETO::MAKE-IDENTIFIER :NAME "positive")' in text


def test_golden_outcome():
    s = outcome_to_transfer("type-success", "positive")
    assert serialize(s) == GOLDEN_OUTCOME
    kind, message, payload = transfer_to_outcome(parse_sexpr(GOLDEN_OUTCOME))
    assert (kind, message, payload) == ("type-success", "positive", ())


def test_parse_simple_list():
    s = parse_sexpr("(A B 3)")
    assert s == SList((SSym("SYNTHETO", "A"), SSym("SYNTHETO", "B"), SInt(3)))


def test_backquote_rejected():
    with pytest.raises(TransferError):
        parse_sexpr("`(A)")
    with pytest.raises(TransferError):
        parse_sexpr("(QUOTE 'X)")
    with pytest.raises(TransferError):
        parse_sexpr("#(1 2)")


def test_unbalanced_parens():
    with pytest.raises(TransferError):
        parse_sexpr("(A (B)")
    with pytest.raises(TransferError):
        parse_sexpr("A)")


def test_parse_round_trip_golden():
    s = parse_sexpr(GOLDEN_POSITIVE)
    assert parse_sexpr(serialize(s)) == s


def test_parse_serialize_identity_on_sexprs():
    cases = [
        SInt(-7),
        SStr("hello world"),
        SChar("\x00"),
        slist(sym("A-B"), SInt(1), slist(NIL)),
        slist(SSym("COMMON-LISP", "LIST"), SStr(""), SChar("!")),
    ]
    for s in cases:
        assert parse_sexpr(serialize(s)) == s


def test_transfer_to_ast_golden():
    [unit] = parse_program(listings.POSITIVE)
    assert transfer_to_ast(parse_sexpr(GOLDEN_POSITIVE)) == unit


def test_unknown_constructor():
    with pytest.raises(TransferError):
        transfer_to_ast(parse_sexpr("(SYNTHETO::MAKE-NOPE :X 1)"))
    with pytest.raises(TransferError):
        transfer_to_ast(parse_sexpr('(SYNTHETO::MAKE-TOPLEVEL-TYPE :GET 3)'))


def test_round_trip_corpus_listings():
    for src in listings.ALL_SECTION_LISTINGS:
        for unit in parse_program(src):
            assert transfer_to_ast(ast_to_transfer(unit)) == unit


def test_round_trip_500_random_asts():
    units = generate_toplevels(500)
    assert len(units) == 500
    for unit in units:
        wire = serialize(ast_to_transfer(unit))
        back = transfer_to_ast(parse_sexpr(wire))
        assert back == unit


def test_lowercase_names_travel_as_strings():
    import re
    for unit in generate_toplevels(60, seed=7):
        wire = serialize(ast_to_transfer(unit))
        no_strings = re.sub(r'"[^"]*"', '""', wire)
        for token in no_strings.replace("(", " ").replace(")", " ").split():
            if token.startswith('"') or token.startswith(":"):
                continue
            if token.lstrip("-").isdigit():
                continue
            bare = token.split("::")[-1]
            assert bare == bare.upper(), token


def test_serialization_deterministic():
    units = generate_toplevels(50, seed=99)
    a = [serialize(ast_to_transfer(u)) for u in units]
    b = [serialize(ast_to_transfer(u)) for u in units]
    assert a == b
