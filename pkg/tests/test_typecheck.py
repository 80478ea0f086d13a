"""Type checking, obligation generation, wellfoundedness, witnesses."""

import pytest

import listings
from helpers import accept_unit, build_world, inhabited_by_enumeration
from syntheto.ast import (
    BOOL, INT, Binary, Call, Literal, NamedType, SeqType, SetType, TypeUnit,
    Unary, Var,
)
from syntheto.parser import parse_expression, parse_program
from syntheto.printer import print_expr
from syntheto.typecheck import (
    NEEDS_USER, TypecheckError, TypeWorld, check_toplevel,
    check_type_wellfounded, infer_expr_type, infer_witness,
    instantiate_polytypes,
)
from syntheto.values import VInt


@pytest.fixture(scope="module")
def geometry_world():
    w = build_world(listings.POINT_EDGE)
    w = build_world(listings.CONNECTED_PATH.split("theorem")[0], w)
    w = build_world(
        "function edges_intersect(e1: edge, e2: edge) returns (b: bool)"
        " { return e1.p1 == e2.p1; }", w)
    return w


def test_literal_arithmetic():
    assert infer_expr_type(parse_expression("1 + 2"), {}, TypeWorld()) == INT


def test_first_of_edges(geometry_world):
    t = infer_expr_type(parse_expression("first(edges)"),
                        {"edges": SeqType(NamedType("edge"))},
                        geometry_world)
    assert t == NamedType("edge")


def test_bool_operator_on_int_is_error():
    with pytest.raises(TypecheckError):
        infer_expr_type(parse_expression("1 && true"), {}, TypeWorld())


def test_unknown_variable_and_function():
    with pytest.raises(TypecheckError):
        infer_expr_type(Var("nope"), {}, TypeWorld())
    with pytest.raises(TypecheckError):
        infer_expr_type(Call("nope", ()), {}, TypeWorld())


def test_arity_error(geometry_world):
    with pytest.raises(TypecheckError):
        infer_expr_type(parse_expression("connected(e)"),
                        {"e": NamedType("edge")}, geometry_world)


def test_rational_construction_obligation():
    w = build_world(listings.POSITIVE)
    w = build_world(listings.RATIONAL, w)
    [unit] = parse_program(
        "function mk() returns (r: rational) {"
        " return rational(numerator = 2, denominator = 4); }")
    _, obligations = check_toplevel(unit, w)
    inv = [o for o in obligations if o.provenance == "product-invariant"]
    assert len(inv) == 1
    assert print_expr(inv[0].conclusion) == "gcd(abs(2), abs(4)) == 1"
    sub = [o for o in obligations if o.provenance == "subtype-restriction"]
    assert len(sub) == 1
    assert print_expr(sub[0].conclusion) == "4 > 0"


def test_factorial_obligations():
    [unit] = parse_program(listings.FACTORIAL)
    _, obligations = check_toplevel(unit, TypeWorld())
    pre = [o for o in obligations if o.provenance == "precondition-at-call"]
    assert len(pre) == 1
    assert print_expr(pre[0].conclusion) == "n - 1 >= 0"
    hyps = [print_expr(h) for h in pre[0].hypotheses]
    assert hyps == ["n >= 0", "!(n == 0)"]
    assert pre[0].variables == (("n", INT),)
    post = [o for o in obligations if o.provenance == "postcondition"]
    assert len(post) == 1
    assert print_expr(post[0].conclusion) == "factorial(n) > 0"
    assert [print_expr(h) for h in post[0].hypotheses] == ["n >= 0"]


def test_division_obligation():
    [unit] = parse_program(
        "function half(n: int, d: int) returns (o: int) { return n / d; }")
    _, obligations = check_toplevel(unit, TypeWorld())
    assert any(print_expr(o.conclusion) == "d != 0" for o in obligations)


def test_duplicate_definition_rejected():
    w = build_world("struct point { x: int, y: int }")
    with pytest.raises(TypecheckError):
        build_world("struct point { x: int, y: int }", w)


def test_obligation_count_matches_sites():
    # every construction, coercion and guarded call yields exactly one obligation
    w = build_world(listings.POSITIVE)
    w = build_world(listings.RATIONAL, w)
    [unit] = parse_program("""
function two(a: positive) assumes a > 1 returns (r: rational) {
  return rational(numerator = two(a).numerator, denominator = a);
}""")
    _, obligations = check_toplevel(unit, w)
    by_kind = {}
    for o in obligations:
        by_kind.setdefault(o.provenance, []).append(o)
    assert len(by_kind["product-invariant"]) == 1   # one construction
    assert len(by_kind["precondition-at-call"]) == 1  # one guarded call
    # int argument `a` flows into the positive field: no coercion needed
    # (a is already positive); constructing from a literal would add one
    assert "subtype-restriction" not in by_kind


def test_wellfounded_tree():
    [unit] = parse_program("variant tree {leaf, node(l: tree, r: tree)}")
    assert check_type_wellfounded([unit.definition], TypeWorld()) == []


def test_wellfounded_bad():
    [unit] = parse_program("variant bad {node(next: bad)}")
    assert check_type_wellfounded([unit.definition], TypeWorld()) == ["bad"]
    with pytest.raises(TypecheckError):
        accept_unit(unit, TypeWorld())


def test_wellfounded_mutual_pair():
    units = parse_program("""
types {
  variant forest {empty, grow(t: tree2, rest: forest)}
  variant tree2 {node(children: forest)}
}""")
    defs = list(units[0].definitions)
    assert check_type_wellfounded(defs, TypeWorld()) == []
    w = accept_unit(units[0], TypeWorld())
    for d in defs:
        assert inhabited_by_enumeration(NamedType(d.name), w, depth=5)


def test_wellfounded_agrees_with_enumerator():
    # generated cliques of <= 3 types, <= 3 alternatives each
    import itertools
    shapes = []
    names = ["t0", "t1", "t2"]
    for n_types in (1, 2, 3):
        for recursive_mask in itertools.product([0, 1], repeat=n_types):
            defs = []
            for i in range(n_types):
                if recursive_mask[i]:
                    # recursive alternative plus optionally no base
                    defs.append(f"variant {names[i]} "
                                f"{{n(x: {names[(i + 1) % n_types]})}}")
                else:
                    defs.append(f"variant {names[i]} "
                                f"{{base, n(x: {names[(i + 1) % n_types]})}}")
            shapes.append("types {" + " ".join(defs) + "}")
    for src in shapes:
        [unit] = parse_program(src)
        defs = list(unit.definitions)
        bad = set(check_type_wellfounded(defs, TypeWorld()))
        try:
            w = accept_unit(unit, TypeWorld())
        except TypecheckError:
            assert bad, src
            continue
        for d in defs:
            assert inhabited_by_enumeration(NamedType(d.name), w, 5) == (
                d.name not in bad), src


def test_witness_positive_and_nonneg():
    [pos] = parse_program(listings.POSITIVE)
    w = TypeWorld()
    assert infer_witness(pos.definition, w) == VInt(1)
    [nonneg] = parse_program("subtype nonneg { x: int | x >= 0 }")
    assert infer_witness(nonneg.definition, w) == VInt(0)


def test_witness_needs_user():
    [u] = parse_program("subtype prime_gt_100 { x: int | x > 100 }")
    assert infer_witness(u.definition, TypeWorld()) is NEEDS_USER


def test_explicit_witness_checked():
    [ok] = parse_program("subtype big { x: int | x > 100 witness 101 }")
    assert infer_witness(ok.definition, TypeWorld()) == VInt(101)
    [bad] = parse_program("subtype big { x: int | x > 100 witness 7 }")
    with pytest.raises(TypecheckError):
        infer_witness(bad.definition, TypeWorld())


def test_instantiate_crossings(geometry_world):
    units = parse_program(listings.CROSSINGS)
    typed, _ = check_toplevel(units[0], geometry_world)
    inst = instantiate_polytypes(typed, TypeWorld())
    assert inst == [SeqType(NamedType("edge"))]


def test_instantiate_bottom_up():
    [unit] = parse_program(
        "function f(s: seq<set<int>>) returns (n: int) { return length(s); }")
    typed, _ = check_toplevel(unit, TypeWorld())
    inst = instantiate_polytypes(typed, TypeWorld())
    assert inst.index(SetType(INT)) < inst.index(SeqType(SetType(INT)))


def test_instantiate_nothing():
    [unit] = parse_program("function f(n: int) returns (o: int) { return n; }")
    typed, _ = check_toplevel(unit, TypeWorld())
    assert instantiate_polytypes(typed, TypeWorld()) == []


def test_quantified_function_constraints():
    w = TypeWorld()
    [ok] = parse_program(
        "function all_pos(s: seq<int>) returns (b: bool) "
        "{ return forall (x: int) member(x, s) ==> x > 0; }")
    typed, _ = check_toplevel(ok, w)
    assert not typed.executable
    with pytest.raises(TypecheckError):
        [bad] = parse_program(
            "function q(s: seq<int>) returns (n: int) "
            "{ return forall (x: int) x > 0; }")
        check_toplevel(bad, w)


def test_spec_kinds():
    units = parse_program(
        "specification s1 (function f(x: int) returns (y: int)) "
        "{ y == x; }")
    assert units[0].body_kind == "io-relation"
    units = parse_program(
        "specification s2 (function f(x: int) returns (y: int)) "
        "{ forall (z: int) z == z; }")
    assert units[0].body_kind == "quantified"
    units = parse_program(
        "specification s3 (function f(x: int) returns (y: int)) "
        "{ true; }")
    assert units[0].body_kind == "plain"


def test_reserved_names_rejected():
    with pytest.raises(TypecheckError):
        build_world("function length(s: seq<int>) returns (n: int) { return 0; }")


def test_subtype_chain_coercion():
    w = build_world(listings.POSITIVE)
    w = build_world("subtype big_positive { y: positive | y > 10 witness 11 }", w)
    [unit] = parse_program(
        "function f(n: int) returns (b: big_positive) { return n; }")
    _, obligations = check_toplevel(unit, w)
    subs = [print_expr(o.conclusion) for o in obligations
            if o.provenance == "subtype-restriction"]
    assert subs == ["n > 0", "n > 10"]
