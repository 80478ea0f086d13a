"""Evaluator for core terms.

assume(f) is checked when check_assumes is set (a false formula raises);
with the flag off it is read as logically true and skipped, which is the
total-logic semantics the equivalence oracle uses.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .core import (
    CApp, CAssume, CConst, CIf, CLet, CTerm, CVar, CoreDef, CoreError,
    CORE_BUILTINS, recognizer_type,
)
from .interp import eval_builtin, value_matches_type
from .lexer import SynthetoError
from .typecheck import TypeWorld
from .values import (
    FALSE, TRUE, Value, VBool, VInt, VProduct, VSum, VTuple, render,
)


class CoreEvalError(CoreError):
    pass


class AssumeViolation(CoreEvalError):
    pass


@dataclass
class CoreEvalConfig:
    check_assumes: bool = True
    max_depth: int = 100000


@dataclass
class _St:
    defs: dict[str, CoreDef]
    world: TypeWorld
    config: CoreEvalConfig
    depth: int = 0


def core_eval(t: CTerm, env: dict[str, Value], defs: dict[str, CoreDef],
              world: TypeWorld, config: Optional[CoreEvalConfig] = None) -> Value:
    st = _St(defs, world, config or CoreEvalConfig())
    return _ev(t, env, st)


def core_call(name: str, vals: list[Value], defs: dict[str, CoreDef],
              world: TypeWorld, config: Optional[CoreEvalConfig] = None) -> Value:
    st = _St(defs, world, config or CoreEvalConfig())
    return _apply(name, vals, st)


def _truth(v: Value) -> bool:
    if not isinstance(v, VBool):
        raise CoreEvalError(f"expected boolean, got {render(v)}")
    return v.value


def _ev(t: CTerm, env: dict[str, Value], st: _St) -> Value:
    match t:
        case CConst(v):
            return v
        case CVar(x):
            if x not in env:
                raise CoreEvalError(f"unbound core variable {x!r}")
            return env[x]
        case CIf(a, b, c):
            return _ev(b, env, st) if _truth(_ev(a, env, st)) else _ev(c, env, st)
        case CLet(bindings, body):
            env2 = dict(env)
            for n, e in bindings:
                env2[n] = _ev(e, env2, st)
            return _ev(body, env2, st)
        case CAssume(f):
            if not st.config.check_assumes:
                return TRUE
            v = _ev(f, env, st)
            if not _truth(v):
                raise AssumeViolation(f"assume failed: {f!r}")
            return TRUE
        case CApp(fn, args):
            return _ev_app(fn, args, env, st)
    raise CoreEvalError(f"cannot evaluate {t!r}")


def _int(v: Value) -> int:
    if not isinstance(v, VInt):
        raise CoreEvalError(f"expected integer, got {render(v)}")
    return v.value


def _trunc_div(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def _ev_app(fn: str, args: tuple[CTerm, ...], env, st: _St) -> Value:
    # short-circuit connectives
    if fn == "and":
        for a in args:
            if not _truth(_ev(a, env, st)):
                return FALSE
        return TRUE
    if fn == "or":
        for a in args:
            if _truth(_ev(a, env, st)):
                return TRUE
        return FALSE
    if fn == "implies":
        if not _truth(_ev(args[0], env, st)):
            return TRUE
        return VBool(_truth(_ev(args[1], env, st)))
    if fn == "impliedby":
        if not _truth(_ev(args[1], env, st)):
            return TRUE
        return VBool(_truth(_ev(args[0], env, st)))
    if fn == "not":
        return VBool(not _truth(_ev(args[0], env, st)))

    vals = [_ev(a, env, st) for a in args]
    match fn:
        case "iff":
            return VBool(_truth(vals[0]) == _truth(vals[1]))
        case "equal":
            return VBool(vals[0] == vals[1])
        case "noteq":
            return VBool(vals[0] != vals[1])
        case "plus":
            return VInt(_int(vals[0]) + _int(vals[1]))
        case "minus":
            return VInt(_int(vals[0]) - _int(vals[1]))
        case "times":
            return VInt(_int(vals[0]) * _int(vals[1]))
        case "div" | "mod":
            a, b = _int(vals[0]), _int(vals[1])
            if b == 0:
                raise CoreEvalError("division by zero")
            q = _trunc_div(a, b)
            return VInt(q) if fn == "div" else VInt(a - b * q)
        case "negate":
            return VInt(-_int(vals[0]))
        case "lt":
            return VBool(_int(vals[0]) < _int(vals[1]))
        case "le":
            return VBool(_int(vals[0]) <= _int(vals[1]))
        case "gt":
            return VBool(_int(vals[0]) > _int(vals[1]))
        case "ge":
            return VBool(_int(vals[0]) >= _int(vals[1]))
        case "tuple":
            return VTuple(tuple(vals))
        case "tuple-ref":
            idx = _int(vals[1])
            v = vals[0]
            if not isinstance(v, VTuple) or idx >= len(v.components):
                raise CoreEvalError("bad tuple-ref")
            return v.components[idx]

    # recognizers and type-support functions by naming convention
    rt = recognizer_type(fn)
    if rt is not None:
        return VBool(value_matches_type(vals[0], rt, st.world))
    structural = _structural(fn, vals, st)
    if structural is not None:
        return structural

    if fn in CORE_BUILTINS:
        try:
            return eval_builtin(fn, vals)
        except SynthetoError as exc:
            raise CoreEvalError(str(exc)) from None
    return _apply(fn, vals, st)


def _structural(fn: str, vals: list[Value], st: _St) -> Optional[Value]:
    world = st.world
    if fn.startswith("update-"):
        rest = fn[len("update-"):]
        if "-" in rest:
            ty, fld = rest.rsplit("-", 1)
            v = vals[0]
            if isinstance(v, VProduct) and v.type == ty:
                return VProduct(ty, tuple(
                    (n, vals[1] if n == fld else old) for n, old in v.fields))
        return None
    if "->" in fn:
        left, fld = fn.split("->", 1)
        if "-" in left:
            ty, alt = left.rsplit("-", 1)
            v = vals[0]
            if isinstance(v, VSum) and v.type == ty:
                if v.alternative != alt:
                    raise CoreEvalError(
                        f"{fn} applied to alternative {v.alternative}")
                return v.get(fld)
            return None
        v = vals[0]
        if isinstance(v, VProduct) and v.type == left:
            return v.get(fld)
        return None
    if "-is-" in fn:
        ty, alt = fn.split("-is-", 1)
        v = vals[0]
        if isinstance(v, VSum) and v.type == ty:
            return VBool(v.alternative == alt)
        return None
    if fn.startswith("make-"):
        rest = fn[len("make-"):]
        d = world.maybe_type_def(rest)
        if d is not None and hasattr(d.body, "fields"):
            names = [n for n, _ in d.body.fields]
            return VProduct(rest, tuple(zip(names, vals)))
        if "-" in rest:
            ty, alt = rest.rsplit("-", 1)
            d = world.maybe_type_def(ty)
            if d is not None and hasattr(d.body, "alternatives"):
                alts = dict(d.body.alternatives)
                if alt in alts:
                    names = [n for n, _ in alts[alt]]
                    return VSum(ty, alt, tuple(zip(names, vals)))
        return None
    return None


def _apply(name: str, vals: list[Value], st: _St) -> Value:
    d = st.defs.get(name)
    if d is None or d.body is None:
        raise CoreEvalError(f"unknown core function {name!r}")
    if st.depth >= st.config.max_depth:
        raise CoreEvalError(f"recursion depth cap at {name}")
    if len(vals) != len(d.params):
        raise CoreEvalError(f"arity mismatch calling {name}")
    env = dict(zip(d.params, vals))
    st2 = _St(st.defs, st.world, st.config, st.depth + 1)
    try:
        return _ev(d.body, env, st2)
    except RecursionError:
        raise CoreEvalError(f"host recursion limit at {name}") from None
