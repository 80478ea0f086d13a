"""Parser, printer and alpha-equivalence tests."""

import pytest

import listings
from syntheto.ast import (
    Binary, Call, Conditional, FunctionUnit, Literal, ProductBody, SeqType,
    SubtypeBody, TheoremUnit, TransformUnit, TypeUnit, Var, alpha_equal,
    INT, NamedType,
)
from syntheto.lexer import SyntaxDiagnostic
from syntheto.parser import parse_expression, parse_program
from syntheto.printer import print_toplevel


def test_empty_input():
    assert parse_program("") == []


def test_struct_point():
    [u] = parse_program("struct point { x: int, y: int }")
    assert isinstance(u, TypeUnit)
    assert u.definition.name == "point"
    assert u.definition.body == ProductBody(
        (("x", INT), ("y", INT)), None)


def test_factorial_listing():
    [u] = parse_program(listings.FACTORIAL)
    assert isinstance(u, FunctionUnit)
    d = u.definition
    assert d.name == "factorial"
    assert d.precondition == Binary(">=", Var("n"), Literal(0, "int"))
    assert d.postcondition == Binary(">", Var("out"), Literal(0, "int"))
    assert isinstance(d.body, Conditional)
    assert d.body.then == Literal(1, "int")


def test_rational_invariant():
    [u] = parse_program(listings.RATIONAL)
    inv = u.definition.body.invariant
    assert inv == Binary("==",
                         Call("gcd", (Call("abs", (Var("numerator"),)),
                                      Call("abs", (Var("denominator"),)))),
                         Literal(1, "int"))


def test_subtype_positive():
    [u] = parse_program(listings.POSITIVE)
    body = u.definition.body
    assert isinstance(body, SubtypeBody)
    assert body.supertype == INT
    assert body.variable == "x"
    assert body.witness is None


def test_theorem_listing():
    units = parse_program(listings.CONNECTED_PATH)
    th = units[-1]
    assert isinstance(th, TheoremUnit)
    assert th.name == "path_p_rest"
    assert th.variables == (("edges", SeqType(NamedType("edge"))),)


def test_transform_invocation():
    [u] = parse_program(listings.TAIL_RECURSION_INVOCATION)
    assert u == TransformUnit("crossings_count_aux_1", "crossings_count_aux",
                              "tail_recursion",
                              (("new_parameter_name", Var("count")),))


def test_transform_no_options():
    [u] = parse_program("function g = transform f by simplify")
    assert u.options == ()


def test_all_section_listings_parse():
    for src in listings.ALL_SECTION_LISTINGS:
        units = parse_program(src)
        assert units, src


def test_ternary_and_precedence():
    e = parse_expression("a ? b : c ? d : e")
    assert isinstance(e, Conditional)
    assert isinstance(e.orelse, Conditional)
    e = parse_expression("1 + 2 * 3")
    assert e == Binary("+", Literal(1, "int"),
                       Binary("*", Literal(2, "int"), Literal(3, "int")))
    e = parse_expression("a && b || c")
    assert e == Binary("||", Binary("&&", Var("a"), Var("b")), Var("c"))
    e = parse_expression("a ==> b ==> c")
    assert e == Binary("==>", Var("a"), Binary("==>", Var("b"), Var("c")))
    e = parse_expression("!a && b")
    assert e.op == "&&"


def test_seq_literal_sugar():
    assert parse_expression("[]") == Call("seq", ())
    assert parse_expression("[1, 2]") == Call(
        "seq", (Literal(1, "int"), Literal(2, "int")))


def test_syntax_error_has_position_and_expectations():
    with pytest.raises(SyntaxDiagnostic) as exc:
        parse_program("struct point { x int }")
    assert exc.value.line == 1
    assert exc.value.column > 1
    assert ":" in exc.value.expected


def test_parser_never_crashes_on_junk():
    for junk in ["}{", "function", "struct 3", "@@@", "fn x", "]]]", '"abc']:
        with pytest.raises(SyntaxDiagnostic):
            parse_program(junk)


def test_subtype_print_pinned_layout():
    [u] = parse_program(listings.POSITIVE)
    assert print_toplevel(u) == "subtype positive {\n  x: int | x > 0\n}"


def test_tuple_type_print():
    [u] = parse_program("function f(p: (int, bool)) returns (o: int) { return 1; }")
    assert "(int, bool)" in print_toplevel(u)


def test_round_trip_all_listings():
    for src in listings.ALL_SECTION_LISTINGS:
        for unit in parse_program(src):
            text = print_toplevel(unit)
            reparsed = parse_program(text)
            assert len(reparsed) == 1, text
            assert reparsed[0] == unit, text


def test_alpha_equal_bound_renaming():
    [a] = parse_program("function f(x: int) returns (o: int) { return x; }")
    [b] = parse_program("function f(y: int) returns (o: int) { return y; }")
    [c] = parse_program("function g(x: int) returns (o: int) { return x; }")
    assert alpha_equal(a, b)
    assert not alpha_equal(a, c)


def test_alpha_equal_accumulator_renaming():
    import re
    a = parse_program(listings.AUX_1)[0]
    b = parse_program(re.sub(r"\bcount\b", "acc", listings.AUX_1))[0]
    assert alpha_equal(a, b)


def test_alpha_equal_is_equivalence():
    units = [u for src in listings.ALL_SECTION_LISTINGS
             for u in parse_program(src)]
    for u in units:
        assert alpha_equal(u, u)
    for u in units:
        for v in units:
            assert alpha_equal(u, v) == alpha_equal(v, u)


def test_alpha_distinguishes_free_variables():
    [a] = parse_program("function f(x: int) returns (o: int) { return x + 1; }")
    [b] = parse_program("function f(x: int) returns (o: int) { return x + 2; }")
    assert not alpha_equal(a, b)


def test_let_renaming_is_alpha_equal():
    src = "function f(x: int) returns (o: int) { let v: int = x + 1; return v; }"
    [a] = parse_program(src)
    [b] = parse_program(src.replace("v", "w"))
    assert alpha_equal(a, b)


def test_alpha_equal_equivalence_on_generated_asts():
    import random
    from astgen import generate_toplevels
    units = generate_toplevels(120, seed=5)
    for u in units:
        assert alpha_equal(u, u)  # reflexive
    rng = random.Random(17)
    sample = rng.sample(units, 30)
    for a in sample:
        for b in sample:
            assert alpha_equal(a, b) == alpha_equal(b, a)  # symmetric
    for a in sample[:12]:
        for b in sample[:12]:
            for c in sample[:12]:
                if alpha_equal(a, b) and alpha_equal(b, c):
                    assert alpha_equal(a, c)  # transitive
