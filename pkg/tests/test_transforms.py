"""Per-transformation behavior, rewriting, and theorem registration."""

import pytest

import listings
from syntheto.ast import FunctionUnit, alpha_equal
from syntheto.core import CApp, CConst, CVar, capp
from syntheto.coreval import CoreEvalConfig, core_call
from syntheto.parser import parse_program
from syntheto.printer import print_toplevel
from syntheto.rewrite import NonOrientable, RewriteRule, orient_theorem, rewrite
from syntheto.session import (
    SessionConfig, SessionState, submit_cell, cells_of_source,
)
from syntheto.transforms import FoldFailure, ShapeMismatch, TransformError
from syntheto.values import VBool, VInt

FAST = SessionConfig(trials=120)


def session_from(source: str, config=FAST) -> SessionState:
    s = SessionState(config)
    for cell in cells_of_source(source):
        s, out = submit_cell(s, cell)
        assert out.ok, (out.message, out.detail)
    return s


def submit_expect_failure(s: SessionState, text: str) -> str:
    s, out = submit_cell(s, text)
    assert not out.ok
    detail = out.detail
    # remove the rejected cell so the session stays usable
    s.cells.pop()
    return detail


@pytest.fixture(scope="module")
def fact_session():
    return session_from(listings.FACTORIAL)


@pytest.fixture(scope="module")
def geo_session():
    src = open("corpus/point_in_polygon.synth").read()
    cells = cells_of_source(src)
    # up to and including the three main definitions (before the derivation)
    upto = next(i for i, c in enumerate(cells) if "tail_recursion" in c)
    s = SessionState(FAST)
    for c in cells[:upto]:
        s, out = submit_cell(s, c)
        assert out.ok, (out.message, out.detail)
    return s


# ------------------------------------------------------------------ rewrite


def test_rewrite_additive_identity():
    t = capp("plus", CConst(VInt(0)), CVar("count"))
    out, exhausted = rewrite(t, (), {}, None)
    assert out == CVar("count") and not exhausted


def test_rewrite_no_matching_rule():
    t = capp("length", CVar("xs"))
    out, _ = rewrite(t, (), {}, None)
    assert out == t


def test_rewrite_parity_rule(fact_session):
    # register the parity theorem, validate it exhaustively, then use it
    s = fact_session
    world = s.world
    [th] = parse_program(
        "function odd2(n: int) returns (b: bool) { return n % 2 != 0; }")
    # build a tiny world with odd2 for the rule
    s2 = session_from(
        "function odd2(n: int) returns (b: bool) { return n % 2 != 0; }"
        "\ntheorem odd2_plus_one forall (c: int) odd2(1 + c) == !odd2(c)")
    # exhaustive validation of the rule statement itself
    defs = s2.state.defs_dict()
    for c in range(-100, 101):
        lhs = core_call("odd2", [VInt(1 + c)], defs, s2.world)
        rhs = core_call("odd2", [VInt(c)], defs, s2.world)
        assert lhs == VBool(not rhs.value)
    rule = [r for r in s2.state.rules if r.name == "odd2_plus_one"][0]
    t = capp("odd2", capp("plus", CConst(VInt(1)), CVar("c")))
    out, _ = rewrite(t, (rule,), defs, s2.world,
                     suppressed=s2.state.suppressed)
    assert out == capp("not", capp("odd2", CVar("c")))


def test_register_theorem_unconditional():
    s = session_from("theorem plus_zero forall (x: int) x + 0 == x")
    rule = [r for r in s.state.rules if r.name == "plus_zero"][0]
    assert rule.conditions == ()
    assert rule.lhs == capp("plus", CVar("x"), CConst(VInt(0)))


def test_register_theorem_conditional_predicate():
    src = listings.POINT_EDGE + listings.CONNECTED_PATH
    s = session_from(src)
    rule = [r for r in s.state.rules if r.name == "path_p_rest"][0]
    assert rule.lhs == capp("path_p", capp("rest", CVar("edges")))
    assert rule.rhs == CConst(VBool(True))
    assert len(rule.conditions) == 2


def test_register_theorem_non_orientable():
    [th] = parse_program("theorem bare_lt forall (x: int) x < x + 1")
    from syntheto.typecheck import TypeWorld
    with pytest.raises(NonOrientable):
        orient_theorem(th, TypeWorld())


# ------------------------------------------------------------ tail recursion


def test_tail_recursion_factorial(fact_session):
    s = fact_session
    s, out = submit_cell(
        s, "function fact_acc = transform factorial by "
           "tail_recursion {new_parameter_name = acc}")
    assert out.ok, out.detail
    defs = s.state.defs_dict()
    # accumulator combine is *, identity 1; equality for n in 0..20
    cfg = CoreEvalConfig(check_assumes=False)
    for n in range(0, 21):
        direct = core_call("factorial", [VInt(n)], defs, s.world, cfg)
        acc = core_call("fact_acc", [VInt(n), VInt(1)], defs, s.world, cfg)
        assert direct == acc
    shown = print_toplevel(s.world.entries["fact_acc"].unit)
    assert "acc" in shown and "n * acc" in shown


def test_tail_recursion_shape_mismatch():
    s = session_from(
        "function tree_sum(n: int) assumes n >= 0 returns (o: int) {"
        " return n == 0 ? 0 : tree_sum(n - 1) + tree_sum(n - 1); }",
        SessionConfig(trials=60))
    detail = submit_expect_failure(
        s, "function ts2 = transform tree_sum by "
           "tail_recursion {new_parameter_name = acc}")
    assert "combine" in detail or "match" in detail


def test_tail_recursion_crossings(geo_session):
    s = geo_session
    s, out = submit_cell(s, listings.TAIL_RECURSION_INVOCATION)
    assert out.ok, out.detail
    [golden] = parse_program(listings.AUX_1)
    assert alpha_equal(out.payload[0], golden)


# ----------------------------------------------------------------- simplify


def test_simplify_irreducible_body():
    s = session_from(listings.FACTORIAL)
    s, out = submit_cell(s, "function fact2 = transform factorial by simplify")
    assert out.ok
    assert "no rewrites applied" in out.detail


# -------------------------------------------------------------- rename_param


def test_rename_param_roundtrip():
    import dataclasses
    s = session_from(listings.FACTORIAL)
    s, out = submit_cell(
        s, "function fact_m = transform factorial by "
           "rename_param {old = n, new = m}")
    assert out.ok, out.detail
    # renaming is alpha-invisible (transforms drop the postcondition)
    orig = s.world.function_def("factorial")
    expected = dataclasses.replace(
        orig, postcondition=None,
        header=dataclasses.replace(orig.header, name="fact_m"))
    got = parse_program(print_toplevel(
        s.world.entries["fact_m"].unit).replace(
        "fact_m(n - 1)", "factorial(n - 1)").replace(
        "fact_m(m - 1)", "factorial(m - 1)"))[0]
    # self-calls point at the new name; fold them back before comparing
    body_src = print_toplevel(s.world.entries["fact_m"].unit)
    assert "m >= 0" in body_src and "m == 0" in body_src
    # rename back: involution up to the definition name
    s, out2 = submit_cell(
        s, "function fact_n = transform fact_m by "
           "rename_param {old = m, new = n}")
    assert out2.ok
    back_src = print_toplevel(s.world.entries["fact_n"].unit)
    assert "n >= 0" in back_src and "n == 0" in back_src


def test_rename_param_errors(fact_session):
    s = fact_session
    detail = submit_expect_failure(
        s, "function fx = transform factorial by rename_param "
           "{old = zz, new = m}")
    assert "no parameter" in detail
    detail = submit_expect_failure(
        s, "function fy = transform factorial by rename_param "
           "{old = n, new = n}")
    assert "already exists" in detail


# -------------------------------------------------------------- wrap_output


def test_wrap_output_identity(fact_session):
    s = fact_session
    s, out = submit_cell(
        s, "function same(x: int) returns (y: int) { return x; }")
    assert out.ok
    s, out = submit_cell(
        s, "function fact_w = transform factorial by "
           "wrap_output {wrap_function = same}")
    assert out.ok, out.detail
    defs = s.state.defs_dict()
    for n in range(0, 10):
        a = core_call("factorial", [VInt(n)], defs, s.world)
        b = core_call("fact_w", [VInt(n)], defs, s.world)
        assert a == b


def test_wrap_output_type_mismatch(fact_session):
    s = fact_session
    s, out = submit_cell(
        s, "function is_pos(x: int) returns (b: bool) { return x > 0; }")
    assert out.ok
    s, out = submit_cell(
        s, "function f_bool = transform factorial by "
           "wrap_output {wrap_function = is_pos}")
    assert out.ok  # int -> bool wrap is fine: input matches output type
    detail = submit_expect_failure(
        s, "function f_bad = transform f_bool by "
           "wrap_output {wrap_function = factorial}")
    assert "expects" in detail


# ----------------------------------------------------------------- restrict


def test_restrict_strengthens_guard(fact_session):
    s = fact_session
    s, out = submit_cell(
        s, "function fact_pos = transform factorial by "
           "restrict {predicate = n >= 1}")
    assert out.ok, out.detail
    shown = print_toplevel(s.world.entries["fact_pos"].unit)
    assert "n >= 0 && n >= 1" in shown
    [orig] = parse_program(listings.FACTORIAL)
    assert print_toplevel(s.world.entries["fact_pos"].unit).count("if") == \
        print_toplevel(FunctionUnit(orig.definition)).count("if")


def test_restrict_false_is_undecided_but_accepted(fact_session):
    s = fact_session
    s, out = submit_cell(
        s, "function fact_never = transform factorial by "
           "restrict {predicate = false}")
    assert out.ok
    assert "undecided" in out.detail


def test_restrict_nonempty(geo_session):
    s = geo_session
    s, out = submit_cell(
        s, "function aux_ne = transform crossings_count_aux by "
           "restrict {predicate = !is_empty(edges)}")
    assert out.ok, out.detail
    shown = print_toplevel(s.world.entries["aux_ne"].unit)
    assert "!is_empty(edges)" in shown


# ---------------------------------------------------- drop irrelevant param


def test_drop_used_parameter_fails(fact_session):
    s = fact_session
    detail = submit_expect_failure(
        s, "function f_drop = transform factorial by "
           "drop_irrelevant_param {parameter = n}")
    assert "influences" in detail


def test_drop_only_parameter_of_constant():
    s = session_from(
        "function konst(p: int) returns (o: int) { return 42; }")
    s, out = submit_cell(
        s, "function konst0 = transform konst by "
           "drop_irrelevant_param {parameter = p}")
    assert out.ok, out.detail
    d = s.world.function_def("konst0")
    assert d.header.inputs == ()


# --------------------------------------------------------- finite difference


def test_finite_difference_bare_parameter():
    s = session_from(
        "function upto(n: int) assumes n >= 0 returns (o: int) {"
        " return n == 0 ? 0 : n + upto(n - 1); }")
    s, out = submit_cell(
        s, "function upto_fd = transform upto by "
           "finite_difference {expression = n, new_parameter_name = c}")
    assert out.ok, out.detail
    d = s.world.function_def("upto_fd")
    assert [n for n, _ in d.header.inputs] == ["n", "c"]
    assert "c == n" in print_toplevel(s.world.entries["upto_fd"].unit)


def test_finite_difference_fold_failure_without_parity(geo_session):
    # replay the derivation but omit the parity rewrite theorem
    src = open("corpus/point_in_polygon.synth").read()
    cells = cells_of_source(src)
    s = SessionState(SessionConfig(trials=60))
    hit = None
    for c in cells:
        if "odd_plus_one" in c and "theorem" in c:
            continue  # drop the parity theorem
        s, out = submit_cell(s, c)
        if not out.ok:
            hit = (c, out.detail)
            break
    assert hit is not None
    assert "crossings_count_aux_4" in hit[0]
    assert "fold" in hit[1] or "rewrite theorem is missing" in hit[1]


# ---------------------------------------------------------------- isomorphism


ISO_PRELUDE = """\
function wrap_n(x: int) returns (y: int) { return 0 - x; }
function unwrap_n(y: int) returns (x: int) { return 0 - y; }
function any_int(x: int) returns (b: bool) { return true; }
function double_it(a: int) assumes a >= 0 returns (o: int) {
  return a == 0 ? 0 : 2 + double_it(a - 1);
}
"""


def test_isomorphism_negation():
    s = session_from(ISO_PRELUDE)
    s, out = submit_cell(s, """\
function double_neg = transform double_it
  by isomorphism {parameter = a, new_parameter_name = b,
                  old_type = any_int, new_type = any_int,
                  old_to_new = wrap_n, new_to_old = unwrap_n,
                  simplify = true}""")
    assert out.ok, out.detail
    defs = s.state.defs_dict()
    cfg = CoreEvalConfig(check_assumes=False)
    for a in range(0, 12):
        old = core_call("double_it", [VInt(a)], defs, s.world, cfg)
        new = core_call("double_neg", [VInt(-a)], defs, s.world, cfg)
        assert old == new


def test_isomorphism_non_inverse_rejected():
    s = session_from(ISO_PRELUDE + """\
function bogus(y: int) returns (x: int) { return y + 1; }
""")
    s, out = submit_cell(s, """\
function double_bad = transform double_it
  by isomorphism {parameter = a, new_parameter_name = b,
                  old_type = any_int, new_type = any_int,
                  old_to_new = wrap_n, new_to_old = bogus}""")
    assert not out.ok
    assert "isomorphism-inversion" in out.message
    assert "counterexample" in out.detail


def test_isomorphism_golden(geo_session):
    s = geo_session
    if not s.world.has("crossings_count_aux_1"):
        s, out = submit_cell(s, listings.TAIL_RECURSION_INVOCATION)
        assert out.ok
    # the rewrite theorems the simplification needs
    src = open("corpus/point_in_polygon.synth").read()
    cells = cells_of_source(src)
    start = next(i for i, c in enumerate(cells) if "path_of_path_vertices" in c)
    end = next(i for i, c in enumerate(cells) if "isomorphism" in c)
    for c in cells[start:end]:
        s, out = submit_cell(s, c)
        assert out.ok, out.detail
    s, out = submit_cell(s, listings.ISOMORPHISM_INVOCATION)
    assert out.ok, out.detail
    [golden] = parse_program(listings.AUX_2)
    assert alpha_equal(out.payload[0], golden)


def test_transform_determinism_byte_identical():
    from syntheto.core import render_def
    results = []
    for _ in range(2):
        s = session_from(listings.FACTORIAL)
        s, out = submit_cell(
            s, "function fact_acc = transform factorial by "
               "tail_recursion {new_parameter_name = acc}")
        assert out.ok
        results.append(render_def(s.state.defs_dict()["fact_acc"]))
    assert results[0] == results[1]
