"""The eight transformations over core definitions.

Each transformation builds a new definition, a set of correctness
obligations (tested by the randomized oracle before the result is
committed), and rewrite rules that later simplification steps use to
replace the old function by the new one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .ast import (
    Binary, Call, Expression, FunctionDefinition, Literal, TransformUnit,
    TypeExpr, Var,
)
from .core import (
    CApp, CAssume, CConst, CIf, CLet, CTerm, CVar, CoreDef, CoreError,
    capp, conj, conjuncts, free_core_vars, guarded_body,
    recognizer_name, recognizer_type, split_guarded_body, subst_core,
)
from .coreval import CoreEvalConfig, core_call
from .rewrite import RewriteRule, match, rewrite
from .translate import from_core_function, to_core_expr
from .typecheck import Obligation, TypeWorld, _Checker, _Ctx
from .values import VBool, VInt, Value


class TransformError(CoreError):
    pass


class ShapeMismatch(TransformError):
    pass


class FoldFailure(TransformError):
    pass


# combine-operator registry for tail recursion: op -> identity element
COMBINE_REGISTRY: dict[str, Value] = {
    "plus": VInt(0),
    "times": VInt(1),
    "and": VBool(True),
    "or": VBool(False),
}

_SURFACE_OP = {"plus": "+", "times": "*", "and": "&&", "or": "||"}


@dataclass
class RewriteEnvironment:
    """Everything a transformation needs from the accepted world."""

    world: TypeWorld
    core_defs: dict[str, CoreDef]
    rules: tuple[RewriteRule, ...]
    suppressed: frozenset = frozenset()
    fuel: int = 10000


@dataclass
class TransformResult:
    new_def: CoreDef
    new_surface: FunctionDefinition
    obligations: list[Obligation]
    rules_added: list[RewriteRule]
    report: str


TRANSFORM_NAMES = (
    "simplify", "tail_recursion", "finite_difference", "rename_param",
    "isomorphism", "drop_irrelevant_param", "wrap_output", "restrict",
)


# -------------------------------------------------------------- option table


_OPTION_SCHEMAS: dict[str, dict[str, str]] = {
    # option name -> "ident" | "expr" | "bool"
    "simplify": {},
    "tail_recursion": {"new_parameter_name": "ident"},
    "finite_difference": {"expression": "expr",
                          "new_parameter_name": "ident",
                          "simplify": "bool"},
    "rename_param": {"old": "ident", "new": "ident"},
    "isomorphism": {"parameter": "ident", "new_parameter_name": "ident",
                    "old_type": "ident", "new_type": "ident",
                    "old_to_new": "ident", "new_to_old": "ident",
                    "simplify": "bool"},
    "drop_irrelevant_param": {"parameter": "ident"},
    "wrap_output": {"wrap_function": "ident", "simplify": "bool"},
    "restrict": {"predicate": "expr"},
}


class _Options:
    def __init__(self, unit: TransformUnit):
        schema = _OPTION_SCHEMAS.get(unit.transform_name)
        if schema is None:
            raise TransformError(
                f"unknown transformation {unit.transform_name!r}")
        self.given = dict(unit.options)
        for name in self.given:
            if name not in schema:
                raise TransformError(
                    f"{unit.transform_name} has no option {name!r}")
        self.schema = schema

    def ident(self, name: str, required: bool = True) -> Optional[str]:
        v = self.given.get(name)
        if v is None:
            if required:
                raise TransformError(f"missing option {name!r}")
            return None
        if not isinstance(v, Var):
            raise TransformError(f"option {name!r} must be an identifier")
        return v.name

    def expr(self, name: str) -> Expression:
        v = self.given.get(name)
        if v is None:
            raise TransformError(f"missing option {name!r}")
        return v

    def flag(self, name: str, default: bool) -> bool:
        v = self.given.get(name)
        if v is None:
            return default
        match v:
            case Literal(b, "bool"):
                return b
        raise TransformError(f"option {name!r} must be a boolean")


# ------------------------------------------------------------------- helpers


def _surface_inputs(env: RewriteEnvironment, name: str):
    d = env.world.maybe_function_def(name)
    if d is None:
        raise TransformError(f"unknown function {name!r}")
    return d


def _old_hyps(old_surface: FunctionDefinition) -> tuple[Expression, ...]:
    return ((old_surface.precondition,)
            if old_surface.precondition is not None else ())


def _call_params(name: str, params) -> Call:
    return Call(name, tuple(Var(n) for n, _ in params))


def _fresh_vars(n: int) -> tuple[str, ...]:
    return tuple(f"_a{i}" for i in range(n))


def _map_self_calls(t: CTerm, fn: str, f) -> CTerm:
    """Rewrite every application of fn bottom-up through f(args)->CTerm."""
    match t:
        case CConst() | CVar():
            return t
        case CApp(g, args):
            new_args = tuple(_map_self_calls(a, fn, f) for a in args)
            if g == fn:
                return f(new_args)
            return CApp(g, new_args)
        case CIf(a, b, c):
            return CIf(_map_self_calls(a, fn, f), _map_self_calls(b, fn, f),
                       _map_self_calls(c, fn, f))
        case CLet(bindings, body):
            return CLet(tuple((n, _map_self_calls(e, fn, f))
                              for n, e in bindings),
                        _map_self_calls(body, fn, f))
        case CAssume(x):
            return CAssume(_map_self_calls(x, fn, f))
    raise TypeError(f"not a core term: {t!r}")


def _replace_subterm(t: CTerm, old: CTerm, new: CTerm) -> CTerm:
    if t == old:
        return new
    match t:
        case CConst() | CVar():
            return t
        case CApp(g, args):
            return CApp(g, tuple(_replace_subterm(a, old, new) for a in args))
        case CIf(a, b, c):
            return CIf(_replace_subterm(a, old, new),
                       _replace_subterm(b, old, new),
                       _replace_subterm(c, old, new))
        case CLet(bindings, body):
            return CLet(tuple((n, _replace_subterm(e, old, new))
                              for n, e in bindings),
                        _replace_subterm(body, old, new))
        case CAssume(x):
            return CAssume(_replace_subterm(x, old, new))
    raise TypeError(f"not a core term: {t!r}")


def _contains_instance(t: CTerm, pattern: CTerm, variables: frozenset) -> bool:
    if match(pattern, t, variables) is not None:
        return True
    match t:
        case CApp(_, args):
            return any(_contains_instance(a, pattern, variables) for a in args)
        case CIf(a, b, c):
            return any(_contains_instance(x, pattern, variables)
                       for x in (a, b, c))
        case CLet(bindings, body):
            return (any(_contains_instance(e, pattern, variables)
                        for _, e in bindings)
                    or _contains_instance(body, pattern, variables))
        case CAssume(x):
            return _contains_instance(x, pattern, variables)
    return False


def _simplify_body(body: CTerm, guard: CTerm, env: RewriteEnvironment,
                   extra_rules=(), lift_ifs=False) -> tuple[CTerm, bool]:
    return rewrite(body, tuple(env.rules) + tuple(extra_rules), env.core_defs,
                   env.world, fuel=env.fuel, facts=conjuncts(guard),
                   lift_ifs=lift_ifs, assume_context=True,
                   suppressed=env.suppressed)


def _check_expr(e: Expression, surface: FunctionDefinition,
                env: RewriteEnvironment) -> tuple[CTerm, TypeExpr]:
    checker = _Checker(env.world, "transform-option")
    env_t = {n: t for n, t in surface.header.inputs}
    t = checker.infer(e, env_t, _Ctx(tuple(surface.header.inputs)))
    return to_core_expr(e, checker.types, env.world), t


def _obligation(ident: str, variables, hypotheses, conclusion,
                provenance: str) -> Obligation:
    return Obligation(ident, tuple(variables), tuple(hypotheses), conclusion,
                      provenance)


def _finish(env: RewriteEnvironment, new_def: CoreDef, obligations,
            rules_added, report: str) -> TransformResult:
    defs = dict(env.core_defs)
    defs[new_def.name] = new_def
    surface = from_core_function(new_def, env.world, defs)
    return TransformResult(new_def, surface, list(obligations),
                           list(rules_added), report)


def _insert_after_recognizers(parts: list[CTerm], params: tuple[str, ...],
                              extra: list[CTerm]) -> list[CTerm]:
    """Insert conjuncts right after the leading parameter recognizers."""
    i = 0
    seen = set()
    for c in parts:
        matched = False
        match c:
            case CApp(fn, (CVar(p),)) if p in params and p not in seen:
                if recognizer_type(fn) is not None:
                    seen.add(p)
                    matched = True
        if not matched:
            break
        i += 1
    return parts[:i] + extra + parts[i:]


# ------------------------------------------------------------ the transforms


def apply_transform(unit: TransformUnit, env: RewriteEnvironment) -> TransformResult:
    """Dispatch a transform invocation; raises TransformError subclasses on
    inapplicability. Obligation testing is the caller's job."""
    if env.world.has(unit.new_name):
        raise TransformError(f"duplicate definition of {unit.new_name!r}")
    old = env.core_defs.get(unit.target)
    if old is None or old.body is None:
        raise TransformError(f"{unit.target!r} has no core definition")
    old_surface = _surface_inputs(env, unit.target)
    opts = _Options(unit)
    handler = {
        "simplify": t_simplify,
        "tail_recursion": t_tail_recursion,
        "finite_difference": t_finite_difference,
        "rename_param": t_rename_param,
        "isomorphism": t_isomorphism,
        "drop_irrelevant_param": t_drop_irrelevant_parameter,
        "wrap_output": t_wrap_output,
        "restrict": t_restrict,
    }[unit.transform_name]
    return handler(unit.new_name, old, old_surface, opts, env)


def t_simplify(new_name: str, old: CoreDef, old_surface: FunctionDefinition,
               opts: _Options, env: RewriteEnvironment) -> TransformResult:
    g, inner, default = split_guarded_body(old)
    body2, exhausted = _simplify_body(inner, g, env)
    unchanged = body2 == inner
    body2 = _map_self_calls(body2, old.name,
                            lambda args: CApp(new_name, args))
    recursive = new_name in {a.fn for a in _all_apps(body2)}
    new_def = CoreDef(
        name=new_name, params=old.params,
        guard=g, body=guarded_body(g, body2, default),
        measure=old.measure if recursive else None,
        returns_predicate=old.returns_predicate,
        origin="transform", out_names=old.out_names)
    vars_ = old_surface.header.inputs
    ob = _obligation(
        f"{new_name}#transform-correctness#1", vars_,
        _old_hyps(old_surface),
        Binary("==", _call_params(old.name, vars_),
               _call_params(new_name, vars_)),
        "transform-correctness")
    a = _fresh_vars(len(old.params))
    rule = RewriteRule(
        f"{old.name}-becomes-{new_name}", a,
        CApp(old.name, tuple(CVar(x) for x in a)),
        CApp(new_name, tuple(CVar(x) for x in a)))
    report = f"simplified {old.name} into {new_name}"
    if exhausted:
        report += " (rewriting stopped at the fuel limit)"
    if unchanged:
        report += " (no rewrites applied)"
    return _finish(env, new_def, [ob], [rule], report)


def _all_apps(t: CTerm):
    from .rewrite import _apps
    return _apps(t)


def _factor_recursion(t: CTerm, fname: str) -> Optional[tuple[str, CTerm, tuple[CTerm, ...]]]:
    """View t as combine(step, fname(args)); steps from plain self-calls are
    the combine identity. Returns (op, step, args) or None."""
    match t:
        case CApp(fn, args) if fn == fname:
            return None, None, args  # bare self-call
        case CApp(op, (step, CApp(fn, args))) if op in COMBINE_REGISTRY and fn == fname:
            if fname not in {a.fn for a in _all_apps(step)}:
                return op, step, args
        case CApp(op, (CApp(fn, args), step)) if op in COMBINE_REGISTRY and fn == fname:
            if fname not in {a.fn for a in _all_apps(step)}:
                return op, step, args
        case CIf(c, x, y):
            fx = _factor_recursion(x, fname)
            fy = _factor_recursion(y, fname)
            if fx is None or fy is None:
                return None
            opx, sx, ax = fx
            opy, sy, ay = fy
            if ax != ay:
                return None
            op = opx or opy
            if op is None or (opx and opy and opx != opy):
                return None
            ident = CConst(COMBINE_REGISTRY[op])
            sx = sx if sx is not None else ident
            sy = sy if sy is not None else ident
            if fname in {a.fn for a in _all_apps(c)}:
                return None
            return op, CIf(c, sx, sy), ax
    return None


def t_tail_recursion(new_name: str, old: CoreDef,
                     old_surface: FunctionDefinition, opts: _Options,
                     env: RewriteEnvironment) -> TransformResult:
    acc = opts.ident("new_parameter_name")
    if acc in old.params:
        raise TransformError(f"parameter {acc!r} already exists")
    g, inner, default = split_guarded_body(old)

    match inner:
        case CIf(test, base, else_) if old.name not in {
                a.fn for a in _all_apps(base)} and old.name not in {
                a.fn for a in _all_apps(test)}:
            factored = _factor_recursion(else_, old.name)
        case CIf(test, else_, base) if old.name not in {
                a.fn for a in _all_apps(base)} and old.name not in {
                a.fn for a in _all_apps(test)}:
            factored = _factor_recursion(else_, old.name)
            test = capp("not", test)
        case _:
            raise ShapeMismatch(
                f"{old.name} is not if(test, base, combine(step, recursion))")
    if factored is None or factored[0] is None:
        raise ShapeMismatch(
            f"the recursive branch of {old.name} does not match "
            f"combine(step, {old.name}(smaller))")
    op, step, rec_args = factored

    out_t = recognizer_type(old.returns_predicate)
    if out_t is None:
        raise TransformError(f"{old.name} lacks an output type")
    acc_rec = capp(recognizer_name(out_t), CVar(acc))
    guard_parts = _insert_after_recognizers(
        conjuncts(g), old.params, [acc_rec])
    guard1 = conj(guard_parts)

    ident_v = COMBINE_REGISTRY[op]
    base1, _ = rewrite(CApp(op, (base, CVar(acc))), (), env.core_defs,
                       env.world, fuel=env.fuel)
    step1 = CApp(op, (step, CVar(acc)))
    inner1 = CIf(test, base1, CApp(new_name, rec_args + (step1,)))
    new_def = CoreDef(
        name=new_name, params=old.params + (acc,),
        guard=guard1, body=guarded_body(guard1, inner1, default),
        measure=old.measure, returns_predicate=old.returns_predicate,
        origin="transform", out_names=old.out_names)

    vars_ = old_surface.header.inputs
    vars_acc = vars_ + ((acc, out_t),)
    surf_op = _SURFACE_OP[op]
    ob_general = _obligation(
        f"{new_name}#transform-correctness#1", vars_acc,
        _old_hyps(old_surface),
        Binary("==",
               Call(new_name, tuple(Var(n) for n, _ in vars_) + (Var(acc),)),
               Binary(surf_op, _call_params(old.name, vars_), Var(acc))),
        "transform-correctness")
    ident_lit = _value_literal(ident_v)
    ob_wrapper = _obligation(
        f"{new_name}#transform-correctness#2", vars_,
        _old_hyps(old_surface),
        Binary("==", _call_params(old.name, vars_),
               Call(new_name, tuple(Var(n) for n, _ in vars_) + (ident_lit,))),
        "transform-correctness")
    a = _fresh_vars(len(old.params))
    rule = RewriteRule(
        f"{old.name}-becomes-{new_name}", a,
        CApp(old.name, tuple(CVar(x) for x in a)),
        CApp(new_name, tuple(CVar(x) for x in a) + (CConst(ident_v),)))
    report = (f"{new_name} accumulates {old.name} through {surf_op} "
              f"with identity {ident_v}")
    return _finish(env, new_def, [ob_general, ob_wrapper], [rule], report)


def _value_literal(v: Value) -> Expression:
    match v:
        case VBool(b):
            return Literal(b, "bool")
        case VInt(i):
            return Literal(i, "int")
    raise TransformError(f"no literal for {v!r}")


def t_rename_param(new_name: str, old: CoreDef,
                   old_surface: FunctionDefinition, opts: _Options,
                   env: RewriteEnvironment) -> TransformResult:
    old_p = opts.ident("old")
    new_p = opts.ident("new")
    if old_p not in old.params:
        raise TransformError(f"{old.name} has no parameter {old_p!r}")
    if new_p in old.params:
        raise TransformError(f"parameter {new_p!r} already exists")
    m = {old_p: CVar(new_p)}
    params = tuple(new_p if p == old_p else p for p in old.params)
    guard1 = subst_core(old.guard, m)
    _, inner, default = split_guarded_body(old)
    inner1 = _map_self_calls(subst_core(inner, m), old.name,
                             lambda args: CApp(new_name, args))
    new_def = CoreDef(
        name=new_name, params=params, guard=guard1,
        body=guarded_body(guard1, inner1, default),
        measure=subst_core(old.measure, m) if old.measure is not None else None,
        returns_predicate=old.returns_predicate,
        origin="transform", out_names=old.out_names)
    vars_ = old_surface.header.inputs
    ob = _obligation(
        f"{new_name}#transform-correctness#1", vars_,
        _old_hyps(old_surface),
        Binary("==", _call_params(old.name, vars_),
               _call_params(new_name, vars_)),
        "transform-correctness")
    a = _fresh_vars(len(old.params))
    rule = RewriteRule(
        f"{old.name}-becomes-{new_name}", a,
        CApp(old.name, tuple(CVar(x) for x in a)),
        CApp(new_name, tuple(CVar(x) for x in a)))
    return _finish(env, new_def, [ob], [rule],
                   f"renamed {old_p} to {new_p} in {old.name}")


def t_wrap_output(new_name: str, old: CoreDef,
                  old_surface: FunctionDefinition, opts: _Options,
                  env: RewriteEnvironment) -> TransformResult:
    wrap = opts.ident("wrap_function")
    simplify = opts.flag("simplify", False)
    wrap_surface = env.world.maybe_function_def(wrap)
    wrap_core = env.core_defs.get(wrap)
    if wrap_surface is None or wrap_core is None:
        raise TransformError(f"unknown wrap function {wrap!r}")
    if len(wrap_surface.header.inputs) != 1:
        raise TransformError(f"{wrap} must take exactly one input")
    out_t = recognizer_type(old.returns_predicate)
    if wrap_surface.header.inputs[0][1] != out_t:
        raise TransformError(
            f"{wrap} expects {wrap_surface.header.inputs[0][1]}, "
            f"but {old.name} returns {out_t}")

    g, inner, default = split_guarded_body(old)

    def dist(t: CTerm) -> CTerm:
        match t:
            case CIf(a, b, c):
                return CIf(a, dist(b), dist(c))
            case CLet(bindings, body):
                return CLet(bindings, dist(body))
            case CApp(fn, args) if fn == old.name:
                return CApp(new_name, args)
        return capp(wrap, t)

    body1 = dist(inner)
    if simplify:
        body1, _ = _simplify_body(body1, g, env)

    new_default = core_call(wrap, [_const_value(default)], env.core_defs,
                            env.world, CoreEvalConfig(check_assumes=False))
    new_def = CoreDef(
        name=new_name, params=old.params, guard=g,
        body=guarded_body(g, body1, CConst(new_default)),
        measure=old.measure, returns_predicate=wrap_core.returns_predicate,
        origin="transform", out_names=wrap_core.out_names)

    vars_ = old_surface.header.inputs
    ob = _obligation(
        f"{new_name}#transform-correctness#1", vars_,
        _old_hyps(old_surface),
        Binary("==", _call_params(new_name, vars_),
               Call(wrap, (_call_params(old.name, vars_),))),
        "transform-correctness")
    a = _fresh_vars(len(old.params))
    rule = RewriteRule(
        f"{old.name}-becomes-{new_name}", a,
        CApp(wrap, (CApp(old.name, tuple(CVar(x) for x in a)),)),
        CApp(new_name, tuple(CVar(x) for x in a)))
    return _finish(env, new_def, [ob], [rule],
                   f"{new_name} computes {wrap}({old.name}(...))")


def _const_value(t: CTerm) -> Value:
    match t:
        case CConst(v):
            return v
    raise TransformError("default output is not a constant")


def t_isomorphism(new_name: str, old: CoreDef,
                  old_surface: FunctionDefinition, opts: _Options,
                  env: RewriteEnvironment) -> TransformResult:
    param = opts.ident("parameter")
    new_param = opts.ident("new_parameter_name")
    old_type = opts.ident("old_type")
    new_type = opts.ident("new_type")
    old_to_new = opts.ident("old_to_new")
    new_to_old = opts.ident("new_to_old")
    simplify = opts.flag("simplify", True)

    if param not in old.params:
        raise TransformError(f"{old.name} has no parameter {param!r}")
    if new_param in old.params:
        raise TransformError(f"parameter {new_param!r} already exists")
    for fn in (old_type, new_type, old_to_new, new_to_old):
        if env.world.maybe_function_def(fn) is None:
            raise TransformError(f"unknown function {fn!r}")

    t_old = dict(old_surface.header.inputs)[param]
    o2n = env.world.function_def(old_to_new)
    n2o = env.world.function_def(new_to_old)
    if len(o2n.header.inputs) != 1 or len(n2o.header.inputs) != 1:
        raise TransformError("isomorphism maps must be unary")
    if o2n.header.inputs[0][1] != t_old:
        raise TransformError(
            f"{old_to_new} does not consume {t_old}")
    t_new = o2n.header.outputs[0][1]
    if n2o.header.inputs[0][1] != t_new or n2o.header.outputs[0][1] != t_old:
        raise TransformError(
            f"{new_to_old} must map {t_new} back to {t_old}")

    # inversion and typing obligations, tested before acceptance
    inv = [
        _obligation(f"{new_name}#isomorphism-inversion#1", [("a", t_old)],
                    [Call(old_type, (Var("a"),))],
                    Binary("==", Call(new_to_old,
                                      (Call(old_to_new, (Var("a"),)),)),
                           Var("a")),
                    "isomorphism-inversion"),
        _obligation(f"{new_name}#isomorphism-inversion#2", [("a", t_old)],
                    [Call(old_type, (Var("a"),))],
                    Call(new_type, (Call(old_to_new, (Var("a"),)),)),
                    "isomorphism-inversion"),
        _obligation(f"{new_name}#isomorphism-inversion#3", [("b", t_new)],
                    [Call(new_type, (Var("b"),))],
                    Binary("==", Call(old_to_new,
                                      (Call(new_to_old, (Var("b"),)),)),
                           Var("b")),
                    "isomorphism-inversion"),
        _obligation(f"{new_name}#isomorphism-inversion#4", [("b", t_new)],
                    [Call(new_type, (Var("b"),))],
                    Call(old_type, (Call(new_to_old, (Var("b"),)),)),
                    "isomorphism-inversion"),
    ]

    conv = capp(new_to_old, CVar(new_param))
    k = old.params.index(param)
    params1 = tuple(new_param if p == param else p for p in old.params)

    old_rec = capp(recognizer_name(t_old), CVar(param))
    new_rec = capp(recognizer_name(t_new), CVar(new_param))
    guard_parts: list[CTerm] = []
    residuals: list[CTerm] = []
    for c in conjuncts(old.guard):
        if c == old_rec:
            guard_parts.append(new_rec)
        else:
            matched = False
            match c:
                case CApp(fn, (CVar(p),)) if p != param and \
                        recognizer_type(fn) is not None:
                    guard_parts.append(c)
                    matched = True
            if not matched:
                residuals.append(subst_core(c, {param: conv}))
    guard1 = conj(guard_parts + [capp(new_type, CVar(new_param))] + residuals)

    g, inner, default = split_guarded_body(old)
    step1 = subst_core(inner, {param: conv})
    step2 = _map_self_calls(
        step1, old.name,
        lambda args: CApp(new_name, args[:k]
                          + (capp(old_to_new, args[k]),) + args[k + 1:]))
    measure1 = (subst_core(old.measure, {param: conv})
                if old.measure is not None else None)

    body1 = step2
    if simplify:
        cancel = (
            RewriteRule(f"{new_name}-cancel-n2o-o2n", ("_x",),
                        capp(new_to_old, capp(old_to_new, CVar("_x"))),
                        CVar("_x")),
            RewriteRule(f"{new_name}-cancel-o2n-n2o", ("_x",),
                        capp(old_to_new, capp(new_to_old, CVar("_x"))),
                        CVar("_x")),
        )
        body1, _ = _simplify_body(step2, guard1, env, extra_rules=cancel)

    new_def = CoreDef(
        name=new_name, params=params1, guard=guard1,
        body=guarded_body(guard1, body1, default),
        measure=measure1, returns_predicate=old.returns_predicate,
        origin="transform", out_names=old.out_names)

    vars_ = old_surface.header.inputs
    call_new = Call(new_name, tuple(
        Call(old_to_new, (Var(n),)) if n == param else Var(n)
        for n, _ in vars_))
    ob_eq = _obligation(
        f"{new_name}#transform-correctness#1", vars_,
        _old_hyps(old_surface),
        Binary("==", _call_params(old.name, vars_), call_new),
        "transform-correctness")
    a = _fresh_vars(len(old.params))
    rule = RewriteRule(
        f"{old.name}-becomes-{new_name}", a,
        CApp(old.name, tuple(CVar(x) for x in a)),
        CApp(new_name, tuple(
            capp(old_to_new, CVar(x)) if i == k else CVar(x)
            for i, x in enumerate(a))))
    report = (f"{new_name} carries {new_param}: "
              f"{t_new} isomorphic to {param}: {t_old}")
    return _finish(env, new_def, inv + [ob_eq], [rule], report)


def t_finite_difference(new_name: str, old: CoreDef,
                        old_surface: FunctionDefinition, opts: _Options,
                        env: RewriteEnvironment) -> TransformResult:
    expression = opts.expr("expression")
    c_name = opts.ident("new_parameter_name")
    simplify = opts.flag("simplify", True)
    if c_name in old.params:
        raise TransformError(f"parameter {c_name!r} already exists")

    expr_c, t_c = _check_expr(expression, old_surface, env)
    g, inner, default = split_guarded_body(old)

    # a bare parameter is a degenerate (but legal) expression: the new
    # parameter just duplicates it, and nothing needs folding
    bare = isinstance(expr_c, CVar)
    invariant_rule = None if bare else RewriteRule(
        f"{new_name}-invariant", (), expr_c, CVar(c_name))

    c_rec = capp(recognizer_name(t_c), CVar(c_name))
    inv_eq = capp("equal", CVar(c_name), expr_c)
    guard_parts = _insert_after_recognizers(
        conjuncts(g), old.params, [c_rec])
    guard1 = conj(guard_parts + [inv_eq])

    body1 = _replace_subterm(inner, expr_c, CVar(c_name))
    param_vars = frozenset(old.params)
    preservation: list[Obligation] = []
    counter = [0]

    def fold_call(args: tuple[CTerm, ...], path: tuple[CTerm, ...]) -> CTerm:
        update = subst_core(expr_c, dict(zip(old.params, args)))
        if bare:
            return CApp(new_name, args + (update,))
        folded, _ = rewrite(
            update, tuple(env.rules) + (invariant_rule,), env.core_defs,
            env.world, fuel=env.fuel, facts=conjuncts(guard1) + list(path),
            lift_ifs=True, assume_context=True, suppressed=env.suppressed)
        if _contains_instance(folded, expr_c, param_vars):
            raise FoldFailure(
                f"the updated expression does not fold into "
                f"{c_name}; a rewrite theorem is missing")
        counter[0] += 1
        preservation.append(_fold_obligation(
            new_name, counter[0], old_surface, c_name, t_c, expression,
            folded, update, path, env))
        return CApp(new_name, args + (folded,))

    body2 = _map_self_calls_with_path(body1, old.name, fold_call)
    if simplify:
        extra = () if invariant_rule is None else (invariant_rule,)
        body2, _ = _simplify_body(body2, guard1, env, extra_rules=extra)

    new_def = CoreDef(
        name=new_name, params=old.params + (c_name,), guard=guard1,
        body=guarded_body(guard1, body2, default),
        measure=old.measure, returns_predicate=old.returns_predicate,
        origin="transform", out_names=old.out_names)

    vars_ = old_surface.header.inputs
    vars_c = vars_ + ((c_name, t_c),)
    inv_surface = Binary("==", Var(c_name), expression)
    ob_eq = _obligation(
        f"{new_name}#transform-correctness#1", vars_c,
        _old_hyps(old_surface) + (inv_surface,),
        Binary("==",
               Call(new_name, tuple(Var(n) for n, _ in vars_) + (Var(c_name),)),
               _call_params(old.name, vars_)),
        "transform-correctness")

    a = _fresh_vars(len(old.params))
    rule = RewriteRule(
        f"{old.name}-becomes-{new_name}", a,
        CApp(old.name, tuple(CVar(x) for x in a)),
        CApp(new_name, tuple(CVar(x) for x in a)
             + (subst_core(expr_c, {p: CVar(x)
                                    for p, x in zip(old.params, a)}),)))
    report = (f"{new_name} maintains {c_name} == "
              f"the tracked expression incrementally")
    return _finish(env, new_def, [ob_eq] + preservation, [rule], report)


def _map_self_calls_with_path(t: CTerm, fn: str, f,
                              path: tuple[CTerm, ...] = ()) -> CTerm:
    """Like _map_self_calls, but hands each call the branch conditions on
    the way to it."""
    from .rewrite import negate, push_not
    match t:
        case CConst() | CVar():
            return t
        case CApp(g, args):
            new_args = tuple(_map_self_calls_with_path(a, fn, f, path)
                             for a in args)
            if g == fn:
                return f(new_args, path)
            return CApp(g, new_args)
        case CIf(a, b, c):
            return CIf(_map_self_calls_with_path(a, fn, f, path),
                       _map_self_calls_with_path(
                           b, fn, f, path + tuple(push_not(a))),
                       _map_self_calls_with_path(
                           c, fn, f, path + tuple(negate(a))))
        case CLet(bindings, body):
            return CLet(tuple((n, _map_self_calls_with_path(e, fn, f, path))
                              for n, e in bindings),
                        _map_self_calls_with_path(body, fn, f, path))
        case CAssume(x):
            return CAssume(_map_self_calls_with_path(x, fn, f, path))
    raise TypeError(f"not a core term: {t!r}")


def _fold_obligation(new_name, idx, old_surface, c_name, t_c, expression,
                     folded: CTerm, update: CTerm, path: tuple[CTerm, ...],
                     env: RewriteEnvironment) -> Obligation:
    from .translate import from_core_expr
    env_t = {n: t for n, t in old_surface.header.inputs}
    env_t[c_name] = t_c
    folded_s = from_core_expr(folded, env_t, env.world, env.core_defs)
    update_s = from_core_expr(update, env_t, env.world, env.core_defs)
    path_s = tuple(from_core_expr(p, env_t, env.world, env.core_defs)
                   for p in path)
    vars_ = old_surface.header.inputs + ((c_name, t_c),)
    return _obligation(
        f"{new_name}#transform-correctness#inv{idx}", vars_,
        _old_hyps(old_surface) + (Binary("==", Var(c_name), expression),)
        + path_s,
        Binary("==", folded_s, update_s),
        "transform-correctness")


def t_drop_irrelevant_parameter(new_name: str, old: CoreDef,
                                old_surface: FunctionDefinition,
                                opts: _Options,
                                env: RewriteEnvironment) -> TransformResult:
    param = opts.ident("parameter")
    if param not in old.params:
        raise TransformError(f"{old.name} has no parameter {param!r}")
    k = old.params.index(param)
    g, inner, default = split_guarded_body(old)

    body1 = _map_self_calls(
        inner, old.name,
        lambda args: CApp(new_name, args[:k] + args[k + 1:]))
    if param in free_core_vars(body1):
        raise TransformError(
            f"parameter {param!r} influences the result of {old.name}")
    if old.measure is not None and param in free_core_vars(old.measure):
        raise TransformError(
            f"the measure of {old.name} depends on {param!r}")

    params1 = old.params[:k] + old.params[k + 1:]
    guard1 = conj([c for c in conjuncts(g)
                   if param not in free_core_vars(c)])
    new_def = CoreDef(
        name=new_name, params=params1, guard=guard1,
        body=guarded_body(guard1, body1, default),
        measure=old.measure, returns_predicate=old.returns_predicate,
        origin="transform", out_names=old.out_names)

    vars_ = old_surface.header.inputs
    kept = tuple(Var(n) for n, _ in vars_ if n != param)
    ob = _obligation(
        f"{new_name}#transform-correctness#1", vars_,
        _old_hyps(old_surface),
        Binary("==", _call_params(old.name, vars_), Call(new_name, kept)),
        "transform-correctness")
    a = _fresh_vars(len(old.params))
    rule = RewriteRule(
        f"{old.name}-becomes-{new_name}", a,
        CApp(old.name, tuple(CVar(x) for x in a)),
        CApp(new_name, tuple(CVar(x) for i, x in enumerate(a) if i != k)))
    return _finish(env, new_def, [ob], [rule],
                   f"dropped {param} from {old.name}")


def t_restrict(new_name: str, old: CoreDef,
               old_surface: FunctionDefinition, opts: _Options,
               env: RewriteEnvironment) -> TransformResult:
    predicate = opts.expr("predicate")
    pred_c, t_p = _check_expr(predicate, old_surface, env)
    from .ast import BOOL
    if t_p != BOOL:
        raise TransformError("restriction predicate must be boolean")
    g, inner, default = split_guarded_body(old)
    guard1 = conj(conjuncts(g) + [pred_c])
    new_def = CoreDef(
        name=new_name, params=old.params, guard=guard1,
        body=guarded_body(guard1, inner, default),
        measure=old.measure, returns_predicate=old.returns_predicate,
        origin="transform", out_names=old.out_names)
    vars_ = old_surface.header.inputs
    ob = _obligation(
        f"{new_name}#transform-correctness#1", vars_,
        _old_hyps(old_surface) + (predicate,),
        Binary("==", _call_params(old.name, vars_),
               _call_params(new_name, vars_)),
        "transform-correctness")
    a = _fresh_vars(len(old.params))
    m = {p: CVar(x) for p, x in zip(old.params, a)}
    checker_pred = subst_core(pred_c, m)
    rule = RewriteRule(
        f"{old.name}-becomes-{new_name}", a,
        CApp(old.name, tuple(CVar(x) for x in a)),
        CApp(new_name, tuple(CVar(x) for x in a)),
        conditions=(checker_pred,))
    return _finish(env, new_def, [ob], [rule],
                   f"{new_name} is {old.name} restricted by the predicate")
