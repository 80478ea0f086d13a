"""Definitional interpreter for the executable subset.

Two modes:
  checked -- every guard assumption encountered (function preconditions,
             product invariants, subtype restrictions) is verified and a
             violation raises GuardViolation;
  logic   -- guard checks are skipped (total-logic reading, used by the
             equivalence oracle). Builtin domain errors still raise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .ast import (
    Bind, Binary, Call, Conditional, Expression, FunctionDefinition,
    IntType, Literal, MapType, NamedType, OptionType, ProductAccess,
    ProductBody, ProductConstruct, ProductUpdate, Quantified, SeqType,
    SetType, SubtypeBody, SumAccess, SumBody, SumConstruct, SumTest,
    TupleAccess, TupleConstruct, TupleType, TypeExpr, Unary, Var,
    BoolType, CharType, StringType,
)
from .lexer import SynthetoError
from .printer import print_expr
from .typecheck import BUILTIN_FUNCTIONS, TypeWorld
from .values import (
    FALSE, TRUE, Value, VBool, VChar, VInt, VMap, VOption, VProduct, VSeq,
    VSet, VString, VSum, VTuple, make_map, make_set, render,
)


class EvalError(SynthetoError):
    pass


class GuardViolation(EvalError):
    """Raised when a checked guard assumption is false. Message formatting
    is deferred: violations are routine during rejection sampling."""

    def __init__(self, formula, binding: dict[str, Value]):
        self.formula = formula
        self.binding = binding
        Exception.__init__(self)

    def __str__(self) -> str:
        formula = self.formula() if callable(self.formula) else self.formula
        shown = ", ".join(f"{k} = {render(v)}"
                          for k, v in self.binding.items())
        return (f"guard violation: {formula}"
                + (f" with {shown}" if shown else ""))


class NonExecutable(EvalError):
    pass


class ResourceLimit(EvalError):
    pass


@dataclass
class EvalConfig:
    check_guards: bool = True
    max_depth: int = 100000
    # function-variable bindings for testing specifications
    fn_bindings: dict[str, str] = field(default_factory=dict)


@dataclass
class _State:
    world: TypeWorld
    config: EvalConfig
    depth: int = 0


def eval_expr(e: Expression, env: dict[str, Value], world: TypeWorld,
              config: Optional[EvalConfig] = None) -> Value:
    """Evaluate a well-typed executable expression."""
    st = _State(world, config or EvalConfig())
    return _eval(e, env, st)


def _truth(v: Value, node: Expression) -> bool:
    if not isinstance(v, VBool):
        raise EvalError(f"expected a boolean at {print_expr(node)}")
    return v.value


def _int(v: Value, node: Expression) -> int:
    if not isinstance(v, VInt):
        raise EvalError(f"expected an integer at {print_expr(node)}")
    return v.value


def _eval(e: Expression, env: dict[str, Value], st: _State) -> Value:
    # hot path: dispatch by node class
    h = _HANDLERS.get(e.__class__)
    if h is None:
        if isinstance(e, Quantified):
            raise NonExecutable("quantified formulas are not executable")
        raise EvalError(f"cannot evaluate {e!r}")
    return h(e, env, st)


def _ev_literal(e: Literal, env, st) -> Value:
    kind = e.kind
    if kind == "bool":
        return TRUE if e.value else FALSE
    if kind == "int":
        return VInt(e.value)
    if kind == "char":
        return VChar(e.value)
    return VString(e.value)


def _ev_var(e: Var, env, st) -> Value:
    try:
        return env[e.name]
    except KeyError:
        raise EvalError(f"unbound variable {e.name!r}") from None


def _ev_unary(e: Unary, env, st) -> Value:
    v = _eval(e.operand, env, st)
    if e.op == "!":
        return FALSE if _truth(v, e) else TRUE
    return VInt(-_int(v, e))


def _ev_conditional(e: Conditional, env, st) -> Value:
    if _truth(_eval(e.test, env, st), e.test):
        return _eval(e.then, env, st)
    return _eval(e.orelse, env, st)


def _ev_call(e: Call, env, st) -> Value:
    return _eval_call(e, e.function, e.arguments, env, st)


def _ev_bind(e: Bind, env, st) -> Value:
    env2 = dict(env)
    for name, ty, init in e.locals:
        v = _eval(init, env2, st)
        _check_subtype_guards(v, ty, st, {name: v})
        env2[name] = v
    return _eval(e.body, env2, st)


def _ev_tuple_construct(e: TupleConstruct, env, st) -> Value:
    return VTuple(tuple(_eval(c, env, st) for c in e.components))


def _ev_tuple_access(e: TupleAccess, env, st) -> Value:
    v = _eval(e.target, env, st)
    if not isinstance(v, VTuple) or e.index >= len(v.components):
        raise EvalError(f"bad tuple access .{e.index}")
    return v.components[e.index]


def _ev_product_construct(e: ProductConstruct, env, st) -> Value:
    return _eval_product_construct(e.type, dict(e.fields), env, st)


def _ev_product_access(e: ProductAccess, env, st) -> Value:
    v = _eval(e.target, env, st)
    if v.__class__ is not VProduct:
        raise EvalError(f"field access .{e.field} on non-product")
    fld = e.field
    for n, x in v.fields:
        if n == fld:
            return x
    raise EvalError(f"no field {fld!r}")


def _ev_product_update(e: ProductUpdate, env, st) -> Value:
    v = _eval(e.target, env, st)
    if not isinstance(v, VProduct):
        raise EvalError("update of non-product")
    updates = {n: _eval(x, env, st) for n, x in e.fields}
    new_fields = tuple((n, updates.get(n, old)) for n, old in v.fields)
    out = VProduct(v.type, new_fields)
    _check_product_invariant(out, st)
    return out


def _ev_sum_construct(e: SumConstruct, env, st) -> Value:
    d = st.world.type_def(e.type)
    alt_fields = dict(d.body.alternatives)[e.alternative]
    vals = {n: _eval(x, env, st) for n, x in e.fields}
    ordered = tuple((n, vals[n]) for n, _ in alt_fields)
    return VSum(e.type, e.alternative, ordered)


def _ev_sum_test(e: SumTest, env, st) -> Value:
    v = _eval(e.target, env, st)
    if not isinstance(v, VSum):
        raise EvalError("alternative test on non-sum value")
    return VBool(v.alternative == e.alternative)


def _ev_sum_access(e: SumAccess, env, st) -> Value:
    v = _eval(e.target, env, st)
    if not isinstance(v, VSum):
        raise EvalError("alternative access on non-sum value")
    if v.alternative != e.alternative:
        raise GuardViolation(
            lambda v=v, e=e: f"value is {v.alternative}, not {e.alternative}",
            {})
    return v.get(e.field)


_HANDLERS = {
    Literal: _ev_literal,
    Var: _ev_var,
    Unary: _ev_unary,
    Binary: lambda e, env, st: _eval_binary(e, e.op, e.left, e.right, env, st),
    Conditional: _ev_conditional,
    Call: _ev_call,
    Bind: _ev_bind,
    TupleConstruct: _ev_tuple_construct,
    TupleAccess: _ev_tuple_access,
    ProductConstruct: _ev_product_construct,
    ProductAccess: _ev_product_access,
    ProductUpdate: _ev_product_update,
    SumConstruct: _ev_sum_construct,
    SumTest: _ev_sum_test,
    SumAccess: _ev_sum_access,
}


def _trunc_div(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def _eval_binary(e, op, l, r, env, st) -> Value:
    if op == "&&":
        if not _truth(_eval(l, env, st), l):
            return FALSE
        return TRUE if _truth(_eval(r, env, st), r) else FALSE
    if op == "||":
        if _truth(_eval(l, env, st), l):
            return TRUE
        return TRUE if _truth(_eval(r, env, st), r) else FALSE
    if op == "==>":
        if not _truth(_eval(l, env, st), l):
            return TRUE
        return TRUE if _truth(_eval(r, env, st), r) else FALSE
    if op == "<==":
        if not _truth(_eval(r, env, st), r):
            return TRUE
        return TRUE if _truth(_eval(l, env, st), l) else FALSE
    if op == "<==>":
        return VBool(_truth(_eval(l, env, st), l)
                     == _truth(_eval(r, env, st), r))
    lv = _eval(l, env, st)
    rv = _eval(r, env, st)
    if op == "==":
        return TRUE if lv == rv else FALSE
    if op == "!=":
        return TRUE if lv != rv else FALSE
    a, b = _int(lv, e), _int(rv, e)
    if op == "+":
        return VInt(a + b)
    if op == "<=":
        return TRUE if a <= b else FALSE
    if op == "-":
        return VInt(a - b)
    if op == "*":
        return VInt(a * b)
    if op == "<":
        return TRUE if a < b else FALSE
    if op == ">":
        return TRUE if a > b else FALSE
    if op == ">=":
        return TRUE if a >= b else FALSE
    if op == "/" or op == "%":
        if b == 0:
            raise GuardViolation("divisor != 0", {})
        q = _trunc_div(a, b)
        return VInt(q) if op == "/" else VInt(a - b * q)
    raise EvalError(f"unknown operator {op}")


def _eval_call(e, fn, args, env, st) -> Value:
    if fn in BUILTIN_FUNCTIONS:
        vals = [_eval(a, env, st) for a in args]
        return eval_builtin(fn, vals)
    target = st.config.fn_bindings.get(fn, fn)
    entry = st.world.entries.get(target)
    if entry is None or entry.kind != "function":
        if entry is not None and entry.kind == "specification":
            raise NonExecutable(f"specification {fn} is not executable")
        raise EvalError(f"unknown function {fn!r}")
    d: FunctionDefinition = entry.definition
    if d.is_quantified:
        raise NonExecutable(f"quantified function {fn} is not executable")
    vals = [_eval(a, env, st) for a in args]
    return apply_function(d, vals, st)


def apply_function(d: FunctionDefinition, vals: list[Value], st: _State) -> Value:
    if st.depth >= st.config.max_depth:
        raise ResourceLimit(f"recursion depth cap at {d.name}")
    h = d.header
    if len(vals) != len(h.inputs):
        raise EvalError(f"arity mismatch calling {d.name}")
    env = {n: v for (n, _), v in zip(h.inputs, vals)}
    if st.config.check_guards:
        for (n, t), v in zip(h.inputs, vals):
            _check_subtype_guards(v, t, st, {n: v})
        if d.precondition is not None:
            if not _truth(_eval(d.precondition, env,
                                st), d.precondition):
                raise GuardViolation(
                    lambda p=d.precondition: print_expr(p), env)
    st2 = _State(st.world, st.config, st.depth + 1)
    try:
        return _eval(d.body, env, st2)
    except RecursionError:
        raise ResourceLimit(f"host recursion limit at {d.name}") from None


def _check_product_invariant(v: VProduct, st: _State) -> None:
    if not st.config.check_guards:
        return
    d = st.world.maybe_type_def(v.type)
    if d is None or not isinstance(d.body, ProductBody):
        return
    if d.body.invariant is None:
        return
    env = {n: x for n, x in v.fields}
    if not _truth(_eval(d.body.invariant, env, st),
                  d.body.invariant):
        raise GuardViolation(
            lambda inv=d.body.invariant: print_expr(inv), env)


def _eval_product_construct(ty: str, fields: dict[str, Expression],
                            env: dict[str, Value], st: _State) -> Value:
    d = st.world.type_def(ty)
    vals = tuple((n, _eval(fields[n], env, st)) for n, _ in d.body.fields)
    out = VProduct(ty, vals)
    _check_product_invariant(out, st)
    if st.config.check_guards:
        for (n, ft), (_, v) in zip(d.body.fields, vals):
            _check_subtype_guards(v, ft, st, {n: v})
    return out


def _check_subtype_guards(v: Value, t: TypeExpr, st: _State,
                          binding: dict[str, Value]) -> None:
    """Verify the named-subtype restrictions along t's chain hold for v."""
    if not st.config.check_guards:
        return
    while isinstance(t, NamedType):
        d = st.world.maybe_type_def(t.name)
        if d is None or not isinstance(d.body, SubtypeBody):
            return
        body = d.body
        ok = _eval(body.restriction, {body.variable: v}, st)
        if not (isinstance(ok, VBool) and ok.value):
            raise GuardViolation(
                lambda n=t.name, r=body.restriction:
                f"{n}: {print_expr(r)}", binding)
        t = body.supertype


# ------------------------------------------------------------------ builtins


def eval_builtin(fn: str, vals: list[Value]) -> Value:
    match fn, vals:
        case "length", [VSeq(items)]:
            return VInt(len(items))
        case "length", [VSet(items)]:
            return VInt(len(items))
        case "length", [VMap(entries)]:
            return VInt(len(entries))
        case "length", [VString(s)]:
            return VInt(len(s))
        case "is_empty", [VSeq(items)]:
            return VBool(not items)
        case "is_empty", [VSet(items)]:
            return VBool(not items)
        case "is_empty", [VMap(entries)]:
            return VBool(not entries)
        case "is_empty", [VString(s)]:
            return VBool(not s)
        case "first", [VSeq(items)]:
            if not items:
                raise GuardViolation("!is_empty(first argument)", {})
            return items[0]
        case "rest", [VSeq(items)]:
            if not items:
                raise GuardViolation("!is_empty(rest argument)", {})
            return VSeq(items[1:])
        case "member", [x, VSeq(items)]:
            return VBool(x in items)
        case "member", [x, VSet(items)]:
            return VBool(x in items)
        case "add", [x, VSet(items)]:
            return make_set(items + (x,))
        case "remove", [x, VSet(items)]:
            return make_set(tuple(i for i in items if i != x))
        case "cons", [x, VSeq(items)]:
            return VSeq((x,) + items)
        case "append", [VSeq(a), VSeq(b)]:
            return VSeq(a + b)
        case "get", [VMap(entries), k]:
            for key, v in entries:
                if key == k:
                    return v
            raise GuardViolation("member(key, keys(map))", {"key": k})
        case "put", [VMap(entries), k, v]:
            return make_map(tuple(entries) + ((k, v),))
        case "keys", [VMap(entries)]:
            return make_set(k for k, _ in entries)
        case "abs", [VInt(a)]:
            return VInt(abs(a))
        case "gcd", [VInt(a), VInt(b)]:
            return VInt(math.gcd(a, b))
        case "max", [VInt(a), VInt(b)]:
            return VInt(max(a, b))
        case "min", [VInt(a), VInt(b)]:
            return VInt(min(a, b))
        case "seq", _:
            return VSeq(tuple(vals))
        case "some", [x]:
            return VOption(x)
        case "none", []:
            return VOption(None)
    raise EvalError(f"bad builtin application {fn}({len(vals)} args)")


# ------------------------------------------------------- value/type matching


def value_matches_type(v: Value, t: TypeExpr, world: TypeWorld,
                       check_guards: bool = True) -> bool:
    """Structural membership of v in t; named-subtype restrictions and
    product invariants are evaluated when check_guards is set."""
    match t:
        case BoolType():
            return isinstance(v, VBool)
        case CharType():
            return isinstance(v, VChar)
        case StringType():
            return isinstance(v, VString)
        case IntType():
            return isinstance(v, VInt)
        case OptionType(el):
            return isinstance(v, VOption) and (
                v.value is None
                or value_matches_type(v.value, el, world, check_guards))
        case SeqType(el):
            return isinstance(v, VSeq) and all(
                value_matches_type(x, el, world, check_guards)
                for x in v.items)
        case SetType(el):
            return isinstance(v, VSet) and all(
                value_matches_type(x, el, world, check_guards)
                for x in v.items)
        case MapType(dom, rng):
            return isinstance(v, VMap) and all(
                value_matches_type(k, dom, world, check_guards)
                and value_matches_type(x, rng, world, check_guards)
                for k, x in v.entries)
        case TupleType(cs):
            return (isinstance(v, VTuple) and len(v.components) == len(cs)
                    and all(value_matches_type(x, c, world, check_guards)
                            for x, c in zip(v.components, cs)))
        case NamedType(name):
            d = world.maybe_type_def(name)
            if d is None:
                return False
            match d.body:
                case SubtypeBody(supertype, var, restriction, _):
                    if not value_matches_type(v, supertype, world, check_guards):
                        return False
                    if not check_guards:
                        return True
                    try:
                        res = eval_expr(restriction, {var: v}, world)
                    except SynthetoError:
                        return False
                    return isinstance(res, VBool) and res.value
                case ProductBody(fields, invariant):
                    if not isinstance(v, VProduct) or v.type != name:
                        return False
                    if tuple(n for n, _ in v.fields) != tuple(n for n, _ in fields):
                        return False
                    if not all(value_matches_type(x, ft, world, check_guards)
                               for (_, x), (_, ft) in zip(v.fields, fields)):
                        return False
                    if invariant is None or not check_guards:
                        return True
                    env = {n: x for n, x in v.fields}
                    try:
                        res = eval_expr(invariant, env, world)
                    except SynthetoError:
                        return False
                    return isinstance(res, VBool) and res.value
                case SumBody(alternatives):
                    if not isinstance(v, VSum) or v.type != name:
                        return False
                    alts = dict(alternatives)
                    if v.alternative not in alts:
                        return False
                    fields = alts[v.alternative]
                    if tuple(n for n, _ in v.fields) != tuple(n for n, _ in fields):
                        return False
                    return all(
                        value_matches_type(x, ft, world, check_guards)
                        for (_, x), (_, ft) in zip(v.fields, fields))
    return False


def call_function(name: str, vals: list[Value], world: TypeWorld,
                  config: Optional[EvalConfig] = None) -> Value:
    """Apply a defined function to already-evaluated argument values."""
    d = world.function_def(name)
    st = _State(world, config or EvalConfig())
    return apply_function(d, vals, st)
