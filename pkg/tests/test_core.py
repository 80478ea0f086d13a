"""Core IR: naming bijection, translation, measures, round trips."""

import pytest

import listings
from corpus_extra import SORTING
from helpers import build_world
from syntheto.ast import (
    BOOL, CHAR, INT, STRING, FunctionUnit, MapType, NamedType, OptionType,
    SeqType, SetType, TupleType, alpha_equal, FunctionDefinition,
)
from syntheto.core import (
    CApp, CConst, CVar, CoreError, capp, demangle, mangle, recognizer_name,
    recognizer_type, render_def, split_guarded_body,
)
from syntheto.coreval import CoreEvalConfig, core_call, core_eval
from syntheto.generate import random_value
from syntheto.interp import EvalConfig, apply_function, eval_expr
from syntheto.parser import parse_program
from syntheto.translate import (
    MeasureInferenceFailure, Untranslatable, from_core_function,
    infer_measure, to_core_function, to_core_type,
)
from syntheto.typecheck import TypeWorld
from syntheto.values import VBool, VInt, VProduct, VSeq


# ----------------------------------------------------------------- naming


def test_mangle_examples():
    assert mangle(SeqType(INT)) == "sequence[int]-p"
    assert mangle("path_p") == "path_p"
    assert demangle("sequence[edge]-p") == SeqType(NamedType("edge"))
    assert demangle("path_p") == "path_p"


def test_recognizer_names():
    assert recognizer_name(INT) == "integer-p"
    assert recognizer_name(NamedType("positive")) == "positive-p"
    assert recognizer_name(SeqType(NamedType("edge"))) == "sequence[edge]-p"


def test_naming_bijection_to_depth_3():
    bases = [INT, BOOL, CHAR, STRING, NamedType("edge"), NamedType("path_p")]
    level = list(bases)
    for _ in range(2):
        level = ([SeqType(t) for t in level[:8]]
                 + [SetType(t) for t in level[:4]]
                 + [OptionType(t) for t in level[:4]]
                 + [MapType(level[0], t) for t in level[:4]]
                 + [TupleType((level[0], t)) for t in level[:4]])
        for t in level:
            assert recognizer_type(recognizer_name(t)) == t
    for name in ["path_p", "crossings_count_aux_1", "x", "_tmp0"]:
        assert demangle(mangle(name)) == name


def test_demangle_rejects_bad_names():
    with pytest.raises(CoreError):
        demangle("foo-bar-baz")
    with pytest.raises(CoreError):
        demangle("sequence[int-p")


# --------------------------------------------------------------- functions


@pytest.fixture(scope="module")
def geo_world():
    w = build_world(listings.POINT_EDGE)
    w = build_world(listings.CONNECTED_PATH.split("theorem")[0], w)
    w = build_world("""
function edges_intersect(e1: edge, e2: edge) returns (b: bool) {
  return e1.p1 == e2.p1;
}""", w)
    w = build_world(listings.CROSSINGS.split("function crossings_count(")[0], w)
    return w


def core_defs_for(world):
    defs = {}
    for name, entry in world.entries.items():
        if entry.kind == "type":
            for d in to_core_type(entry.definition, world):
                defs[d.name] = d
        elif entry.kind == "function" and entry.executable:
            d = to_core_function(entry.definition, world)
            defs[d.name] = d
    return defs


def test_factorial_core_shape():
    w = build_world(listings.FACTORIAL)
    d = to_core_function(w.function_def("factorial"), w)
    g, inner, default = split_guarded_body(d)
    assert capp("integer-p", CVar("n")) in [g] or "integer-p" in str(g)
    assert default == CConst(VInt(1))  # satisfies out > 0
    assert d.measure == CVar("n")
    assert d.returns_predicate == "integer-p"


def test_crossings_core_shape(geo_world):
    d = to_core_function(geo_world.function_def("crossings_count_aux"),
                         geo_world)
    g, inner, default = split_guarded_body(d)
    assert default == CConst(VInt(0))
    assert d.measure == capp("length", CVar("edges"))
    parts = str(g)
    assert "edge-p" in parts and "sequence[edge]-p" in parts \
        and "path_p" in parts


def test_path_p_measure(geo_world):
    d = to_core_function(geo_world.function_def("path_p"), geo_world)
    assert d.measure == capp("length", CVar("edges"))


def test_connected_has_no_measure(geo_world):
    d = to_core_function(geo_world.function_def("connected"), geo_world)
    assert d.measure is None


def test_measure_inference_failure():
    w = build_world(
        "function collatz(n: int) assumes n >= 1 returns (o: int) {"
        " return n == 1 ? 0 : 1 + collatz(n % 2 == 0 ? n / 2 : 3 * n + 1); }")
    with pytest.raises(MeasureInferenceFailure):
        infer_measure(w.function_def("collatz"))


def test_factorial_measure_decreases_exhaustively():
    # rule (b) validation: the measure strictly decreases for n in 0..100
    w = build_world(listings.FACTORIAL)
    f = w.function_def("factorial")
    m = infer_measure(f)
    assert m == CVar("n")
    for n in range(0, 101):
        if n != 0:  # recursive branch taken
            assert n - 1 < n


def test_round_trip_factorial():
    w = build_world(listings.FACTORIAL)
    f = w.function_def("factorial")
    d = to_core_function(f, w)
    back = from_core_function(d, w, {d.name: d})
    assert alpha_equal(FunctionUnit(back), FunctionUnit(f))


def test_round_trip_all_executable_corpus_functions(geo_world):
    worlds = [geo_world, build_world(listings.FACTORIAL),
              build_world(SORTING)]
    checked = 0
    for w in worlds:
        defs = core_defs_for(w)
        for entry in w.entries.values():
            if entry.kind != "function" or not entry.executable:
                continue
            f = entry.definition
            d = to_core_function(f, w)
            back = from_core_function(d, w, defs)
            assert alpha_equal(FunctionUnit(back), FunctionUnit(f)), f.name
            checked += 1
    assert checked >= 10


def test_quantifier_untranslatable():
    w = build_world(
        "function all_pos(s: seq<int>) returns (b: bool) "
        "{ return forall (x: int) member(x, s) ==> x > 0; }")
    with pytest.raises(Untranslatable):
        to_core_function(w.function_def("all_pos"), w)


def test_from_core_rejects_quantifier_bodies(geo_world):
    from syntheto.core import CoreDef, CTRUE, guarded_body
    bad = CoreDef("q", ("x",),
                  capp("integer-p", CVar("x")),
                  guarded_body(capp("integer-p", CVar("x")),
                               capp("forall", CVar("x")),
                               CConst(VBool(True))),
                  returns_predicate="boolean-p")
    with pytest.raises(Untranslatable):
        from_core_function(bad, geo_world, {})


# --------------------------------------------------- translation soundness


def test_translation_soundness_sampled(geo_world):
    """Surface evaluation agrees with core evaluation of the translation on
    guarded random inputs (>= 1000 samples across corpus functions)."""
    defs = core_defs_for(geo_world)
    fns = ["connected", "path_p", "edges_intersect", "crossings_count_aux"]
    total = 0
    cfg_core = CoreEvalConfig(check_assumes=False)
    cfg_surf = EvalConfig(check_guards=False)
    for name in fns:
        f = geo_world.function_def(name)
        d = defs[name]
        samples = 0
        seed = 0
        while samples < 250:
            seed += 1
            vals = [random_value(t, 4, seed * 977 + i, geo_world)
                    for i, (_, t) in enumerate(f.header.inputs)]
            if f.precondition is not None:
                env = {n: v for (n, _), v in zip(f.header.inputs, vals)}
                ok = eval_expr(f.precondition, env, geo_world, cfg_surf)
                if not (isinstance(ok, VBool) and ok.value):
                    continue
            from syntheto.interp import _State
            surface = apply_function(f, vals, _State(geo_world, cfg_surf))
            core = core_call(name, vals, defs, geo_world, cfg_core)
            assert surface == core, (name, vals)
            samples += 1
        total += samples
    assert total >= 1000


def test_render_def_is_stable(geo_world):
    d = to_core_function(geo_world.function_def("path_p"), geo_world)
    r1 = render_def(d)
    r2 = render_def(to_core_function(geo_world.function_def("path_p"),
                                     geo_world))
    assert r1 == r2
    assert r1.startswith("(define path_p (edges)")
    assert ":measure (length edges)" in r1
