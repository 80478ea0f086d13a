"""Surface <-> core translation.

Forward: functions get a guard (parameter recognizers plus the declared
precondition) incorporated into the body as if(assume(guard), body, default)
where the default is a value of the output type, preferring one that also
satisfies the postcondition. Recursive functions get an inferred measure.

Backward: parameter types are extracted from recognizer conjuncts of the
guard, the remaining conjuncts become the precondition, assume-wrappers are
treated as true and simplified away, and local types are re-inferred.
"""

from __future__ import annotations

from typing import Optional

from .ast import (
    BOOL, CHAR, INT, STRING, Bind, Binary, BoolType, Call, CharType,
    Conditional, Expression, FunctionDefinition, FunctionHeader, IntType,
    Literal, MapType, NamedType, OptionType, ProductAccess, ProductBody,
    ProductConstruct, ProductUpdate, Quantified, SeqType, SetType,
    StringType, SubtypeBody, SumAccess, SumBody, SumConstruct, SumTest,
    TupleAccess, TupleConstruct, TupleType, TypeDefinition, TypeExpr, Unary,
    Var, called_functions,
)
from .core import (
    CApp, CAssume, CConst, CIf, CLet, CTerm, CVar, CoreDef, CoreError,
    CORE_TO_OP, CORE_BUILTINS, CTRUE, OP_TO_CORE, Untranslatable, accessor_name,
    capp, conj, conjuncts, constructor_name, guarded_body, recognizer_name,
    recognizer_type, split_guarded_body, sum_accessor_name,
    sum_constructor_name, sum_test_name, updater_name,
)
from .interp import eval_expr
from .lexer import SynthetoError
from .typecheck import (
    TypeWorld, _Checker, _check_function, resolve_base,
)
from .values import (
    Value, VBool, VChar, VInt, VMap, VOption, VProduct, VSeq, VSet, VString,
    VTuple,
)


class MeasureInferenceFailure(CoreError):
    pass


# ------------------------------------------------------------ forward: types


def to_core_type(d: TypeDefinition, world: TypeWorld) -> list[CoreDef]:
    """Support definitions for a named type: recognizer, constructor,
    accessors, updaters (products); per-alternative support (sums);
    recognizer in terms of the supertype (subtypes)."""
    name = d.name
    out: list[CoreDef] = []

    def native(fn_name: str, params: tuple[str, ...],
               returns: Optional[str] = None) -> CoreDef:
        return CoreDef(fn_name, params, CTRUE, None,
                       returns_predicate=returns, origin="type-support")

    match d.body:
        case ProductBody(fields, invariant):
            rec_body = None  # structural check is native
            out.append(CoreDef(recognizer_name(NamedType(name)), ("x",),
                               CTRUE, rec_body,
                               returns_predicate="boolean-p",
                               origin="type-support"))
            out.append(native(constructor_name(name),
                              tuple(n for n, _ in fields),
                              recognizer_name(NamedType(name))))
            for n, ft in fields:
                out.append(native(accessor_name(name, n), ("x",),
                                  recognizer_name(ft)))
                out.append(native(updater_name(name, n), ("x", "v"),
                                  recognizer_name(NamedType(name))))
        case SumBody(alternatives):
            out.append(CoreDef(recognizer_name(NamedType(name)), ("x",),
                               CTRUE, None, returns_predicate="boolean-p",
                               origin="type-support"))
            for alt, fields in alternatives:
                out.append(native(sum_constructor_name(name, alt),
                                  tuple(n for n, _ in fields),
                                  recognizer_name(NamedType(name))))
                out.append(native(sum_test_name(name, alt), ("x",),
                                  "boolean-p"))
                for n, ft in fields:
                    out.append(native(sum_accessor_name(name, alt, n), ("x",),
                                      recognizer_name(ft)))
        case SubtypeBody(supertype, var, restriction, _):
            checker = _Checker(world, name)
            from .typecheck import _Ctx
            checker.infer(restriction, {var: supertype}, _Ctx())
            restr = to_core_expr(restriction, checker.types, world)
            body = conj([capp(recognizer_name(supertype), CVar(var)), restr])
            out.append(CoreDef(recognizer_name(NamedType(name)), (var,),
                               CTRUE, body, returns_predicate="boolean-p",
                               origin="type-support"))
    return out


def to_core_instance(t: TypeExpr) -> CoreDef:
    """Recognizer for a parameterized-type instance (e.g. seq<edge>)."""
    return CoreDef(recognizer_name(t), ("x",), CTRUE, None,
                   returns_predicate="boolean-p", origin="type-support")


# ------------------------------------------------------ forward: expressions


def to_core_expr(e: Expression, types: dict[int, TypeExpr],
                 world: TypeWorld) -> CTerm:
    def product_of(node: Expression) -> str:
        t = resolve_base(types[id(node)], world)
        assert isinstance(t, NamedType)
        return t.name

    def go(e: Expression) -> CTerm:
        match e:
            case Literal(value, kind):
                if kind == "bool":
                    return CConst(VBool(value))
                if kind == "int":
                    return CConst(VInt(value))
                if kind == "char":
                    return CConst(VChar(value))
                return CConst(VString(value))
            case Var(x):
                return CVar(x)
            case Unary(op, a):
                return capp("not" if op == "!" else "negate", go(a))
            case Binary(op, l, r):
                return capp(OP_TO_CORE[op], go(l), go(r))
            case Conditional(t, a, b):
                return CIf(go(t), go(a), go(b))
            case Call(fn, args):
                return CApp(fn, tuple(go(a) for a in args))
            case Bind(locals_, body):
                return CLet(tuple((n, go(init)) for n, _, init in locals_),
                            go(body))
            case TupleConstruct(cs):
                return CApp("tuple", tuple(go(c) for c in cs))
            case TupleAccess(t, i):
                return capp("tuple-ref", go(t), CConst(VInt(i)))
            case ProductConstruct(ty, fields):
                d = world.type_def(ty)
                given = dict(fields)
                return CApp(constructor_name(ty), tuple(
                    go(given[n]) for n, _ in d.body.fields))
            case ProductAccess(target, fld):
                return capp(accessor_name(product_of(target), fld), go(target))
            case ProductUpdate(target, fields):
                ty = product_of(target)
                term = go(target)
                for n, v in fields:
                    term = capp(updater_name(ty, n), term, go(v))
                return term
            case SumConstruct(ty, alt, fields):
                d = world.type_def(ty)
                alt_fields = dict(d.body.alternatives)[alt]
                given = dict(fields)
                return CApp(sum_constructor_name(ty, alt), tuple(
                    go(given[n]) for n, _ in alt_fields))
            case SumTest(target, alt):
                return capp(sum_test_name(product_of(target), alt), go(target))
            case SumAccess(target, alt, fld):
                return capp(sum_accessor_name(product_of(target), alt, fld),
                            go(target))
            case Quantified(q, bound, matrix):
                raise Untranslatable("quantifier in executable position", e)
        raise Untranslatable(f"cannot translate {e!r}", e)

    return go(e)


# -------------------------------------------------------------- default values


def type_default(t: TypeExpr, world: TypeWorld) -> Value:
    """Canonical inhabitant of a type (ground default)."""
    match resolve_base_keeping_named(t, world):
        case IntType():
            return VInt(0)
        case BoolType():
            return VBool(False)
        case CharType():
            return VChar("a")
        case StringType():
            return VString("")
        case SeqType(_):
            return VSeq(())
        case SetType(_):
            return VSet(())
        case MapType(_, _):
            return VMap(())
        case OptionType(_):
            return VOption(None)
        case TupleType(cs):
            return VTuple(tuple(type_default(c, world) for c in cs))
        case NamedType(name):
            entry = world.entries.get(name)
            if entry is None or entry.kind != "type":
                raise CoreError(f"unknown type {name!r}")
            if entry.witness is not None:
                return entry.witness
            d = entry.definition
            match d.body:
                case ProductBody(fields, _):
                    return VProduct(name, tuple(
                        (n, type_default(ft, world)) for n, ft in fields))
                case SumBody(alternatives):
                    from .generate import random_value
                    return random_value(NamedType(name), 0, 0, world)
    raise CoreError(f"no default for {t!r}")


def resolve_base_keeping_named(t: TypeExpr, world: TypeWorld) -> TypeExpr:
    """Resolve to the structural base, but keep named product/sum types."""
    if isinstance(t, NamedType):
        d = world.maybe_type_def(t.name)
        if d is not None and isinstance(d.body, SubtypeBody):
            # keep the subtype itself: its witness is the default
            return t if world.entries[t.name].witness is not None \
                else resolve_base_keeping_named(d.body.supertype, world)
        return t
    return t


def default_output_value(out_type: TypeExpr, out_name: str,
                         postcondition: Optional[Expression],
                         world: TypeWorld) -> Value:
    """A value of the output type, preferring one satisfying the
    postcondition (with only the output bound)."""
    candidates: list[Value] = []
    base = resolve_base(out_type, world)
    match base:
        case IntType():
            candidates = [VInt(0), VInt(1), VInt(-1)]
        case BoolType():
            candidates = [VBool(False), VBool(True)]
        case StringType():
            candidates = [VString("")]
        case SeqType(_):
            candidates = [VSeq(())]
        case SetType(_):
            candidates = [VSet(())]
        case MapType(_, _):
            candidates = [VMap(())]
        case OptionType(_):
            candidates = [VOption(None)]
    fallback = type_default(out_type, world)
    candidates.append(fallback)
    if postcondition is not None:
        for v in candidates:
            try:
                res = eval_expr(postcondition, {out_name: v}, world)
            except SynthetoError:
                continue
            if isinstance(res, VBool) and res.value:
                return v
    return candidates[0] if candidates else fallback


# ----------------------------------------------------------- forward: functions


def to_core_function(f: FunctionDefinition, world: TypeWorld,
                     clique: Optional[dict[str, FunctionDefinition]] = None,
                     ) -> CoreDef:
    """Translate an executable function definition to a guarded core def."""
    if f.is_quantified:
        raise Untranslatable(f"{f.name} is quantified; no core translation")
    h = f.header
    checker = _Checker(world, f.name,
                       self_headers=clique or {f.name: f})
    _check_function(f, checker, world)

    recognizers = [capp(recognizer_name(t), CVar(n)) for n, t in h.inputs]
    guard_parts = list(recognizers)
    if f.precondition is not None:
        guard_parts.append(to_core_expr(f.precondition, checker.types, world))
    guard = conj(guard_parts)

    inner = to_core_expr(f.body, checker.types, world)
    out_type = (h.outputs[0][1] if len(h.outputs) == 1
                else TupleType(tuple(t for _, t in h.outputs)))
    post = f.postcondition if len(h.outputs) == 1 else None
    default = default_output_value(out_type, h.outputs[0][0], post, world)
    body = guarded_body(guard, inner, CConst(default))

    measure = None
    names = set(clique or {f.name: f})
    if called_functions(f.body) & names:
        measure = infer_measure(f)

    postcondition = None
    if f.postcondition is not None:
        postcondition = to_core_expr(f.postcondition, checker.types, world)

    return CoreDef(
        name=f.name,
        params=tuple(n for n, _ in h.inputs),
        guard=guard,
        body=body,
        measure=measure,
        returns_predicate=recognizer_name(out_type),
        origin="user",
        out_names=tuple(n for n, _ in h.outputs),
        postcondition=postcondition,
    )


# ------------------------------------------------------------------ measures


def _self_call_args(e: Expression, names: set[str]) -> list[tuple[str, tuple]]:
    out = []

    def walk(x: Expression) -> None:
        match x:
            case Call(fn, args):
                if fn in names:
                    out.append((fn, args))
                for a in args:
                    walk(a)
            case Literal() | Var():
                pass
            case Unary(_, a):
                walk(a)
            case Binary(_, l, r):
                walk(l)
                walk(r)
            case Conditional(t, a, b):
                walk(t)
                walk(a)
                walk(b)
            case Bind(locals_, body):
                for _, _, init in locals_:
                    walk(init)
                walk(body)
            case TupleConstruct(cs):
                for c in cs:
                    walk(c)
            case TupleAccess(t, _):
                walk(t)
            case ProductConstruct(_, fs) | SumConstruct(_, _, fs):
                for _, v in fs:
                    walk(v)
            case ProductAccess(t, _) | SumTest(t, _) | SumAccess(t, _, _):
                walk(t)
            case ProductUpdate(t, fs):
                walk(t)
                for _, v in fs:
                    walk(v)
            case Quantified(_, _, m):
                walk(m)

    walk(e)
    return out


def _is_strict_shrink(arg: Expression, param: str) -> bool:
    """arg is rest(...rest(param)...) with at least one rest, or a set/map
    removal applied to param."""
    depth = 0
    while True:
        match arg:
            case Call("rest", (inner,)):
                arg = inner
                depth += 1
            case Call("remove", (_, inner)):
                arg = inner
                depth += 1
            case _:
                break
    return depth >= 1 and arg == Var(param)


def _int_lower_bound(f: FunctionDefinition, param: str) -> Optional[int]:
    if f.precondition is None:
        return None
    for c in _expr_conjuncts(f.precondition):
        match c:
            case Binary(">=", Var(p), Literal(b, "int")) if p == param:
                return b
            case Binary(">", Var(p), Literal(b, "int")) if p == param:
                return b + 1
            case Binary("<=", Literal(b, "int"), Var(p)) if p == param:
                return b
            case Binary("<", Literal(b, "int"), Var(p)) if p == param:
                return b + 1
    return None


def _expr_conjuncts(e: Expression) -> list[Expression]:
    match e:
        case Binary("&&", l, r):
            return _expr_conjuncts(l) + _expr_conjuncts(r)
    return [e]


def _decreases_by_constant(arg: Expression, param: str) -> bool:
    match arg:
        case Binary("-", Var(p), Literal(c, "int")) if p == param and c > 0:
            return True
    return False


def infer_measure(f: FunctionDefinition) -> CTerm:
    """Measure heuristic:
    (a) a sequence/set/map parameter strictly shrinks in every recursive
        call -> length of that parameter;
    (b) an integer parameter with a guard lower bound decreases by a
        positive constant in every call -> parameter minus bound."""
    h = f.header
    calls = _self_call_args(f.body, {h.name})
    if not calls:
        raise MeasureInferenceFailure(f"{h.name} is not self-recursive")
    for i, (pname, ptype) in enumerate(h.inputs):
        if isinstance(ptype, (SeqType, SetType, MapType)):
            if all(len(args) == len(h.inputs)
                   and _is_strict_shrink(args[i], pname)
                   for _, args in calls):
                return capp("length", CVar(pname))
    for i, (pname, ptype) in enumerate(h.inputs):
        if ptype == INT:
            bound = _int_lower_bound(f, pname)
            if bound is None:
                continue
            if all(len(args) == len(h.inputs)
                   and _decreases_by_constant(args[i], pname)
                   for _, args in calls):
                if bound == 0:
                    return CVar(pname)
                return capp("minus", CVar(pname), CConst(VInt(bound)))
    raise MeasureInferenceFailure(
        f"no effective measure found for {h.name}")


# ------------------------------------------------------- backward translation


def _bool_simplify(t: CTerm) -> CTerm:
    """Constant-fold the control skeleton after assumes become true."""
    match t:
        case CIf(a, b, c):
            a2, b2, c2 = _bool_simplify(a), _bool_simplify(b), _bool_simplify(c)
            if a2 == CTRUE:
                return b2
            if a2 == CConst(VBool(False)):
                return c2
            return CIf(a2, b2, c2)
        case CApp("and", args):
            parts = [_bool_simplify(a) for a in args]
            parts = [p for p in parts if p != CTRUE]
            if not parts:
                return CTRUE
            if len(parts) == 1:
                return parts[0]
            return CApp("and", tuple(parts))
        case CApp("or", args):
            parts = [_bool_simplify(a) for a in args]
            if any(p == CTRUE for p in parts):
                return CTRUE
            parts = [p for p in parts if p != CConst(VBool(False))]
            if not parts:
                return CConst(VBool(False))
            if len(parts) == 1:
                return parts[0]
            return CApp("or", tuple(parts))
        case CApp(fn, args):
            return CApp(fn, tuple(_bool_simplify(a) for a in args))
        case CLet(bindings, body):
            return CLet(tuple((n, _bool_simplify(e)) for n, e in bindings),
                        _bool_simplify(body))
        case CAssume(_):
            return CTRUE
    return t


def _strip_assumes(t: CTerm) -> CTerm:
    match t:
        case CAssume(_):
            return CTRUE
        case CApp(fn, args):
            return CApp(fn, tuple(_strip_assumes(a) for a in args))
        case CIf(a, b, c):
            return CIf(_strip_assumes(a), _strip_assumes(b), _strip_assumes(c))
        case CLet(bindings, body):
            return CLet(tuple((n, _strip_assumes(e)) for n, e in bindings),
                        _strip_assumes(body))
    return t


def core_term_type(t: CTerm, env: dict[str, TypeExpr], world: TypeWorld,
                   defs: dict[str, CoreDef]) -> TypeExpr:
    """Best-effort type inference on core terms, for back-translation."""
    match t:
        case CConst(VBool(_)):
            return BOOL
        case CConst(VInt(_)):
            return INT
        case CConst(VChar(_)):
            return CHAR
        case CConst(VString(_)):
            return STRING
        case CVar(x):
            if x not in env:
                raise Untranslatable(f"cannot infer type of {x!r}", t)
            return env[x]
        case CIf(_, b, c):
            try:
                return core_term_type(b, env, world, defs)
            except Untranslatable:
                return core_term_type(c, env, world, defs)
        case CLet(bindings, body):
            env2 = dict(env)
            for n, e in bindings:
                env2[n] = core_term_type(e, env2, world, defs)
            return core_term_type(body, env2, world, defs)
        case CApp(fn, args):
            if fn in ("plus", "minus", "times", "div", "mod", "negate",
                      "length", "abs", "gcd", "max", "min"):
                return INT
            if fn in ("and", "or", "not", "implies", "impliedby", "iff",
                      "equal", "noteq", "lt", "le", "gt", "ge", "is_empty",
                      "member"):
                return BOOL
            if fn == "first":
                st = core_term_type(args[0], env, world, defs)
                base = resolve_base(st, world)
                if isinstance(base, SeqType):
                    return base.element
                raise Untranslatable("first of non-sequence", t)
            if fn in ("rest", "append"):
                return core_term_type(args[0], env, world, defs)
            if fn == "cons":
                return core_term_type(args[1], env, world, defs)
            if fn == "seq":
                if args:
                    return SeqType(core_term_type(args[0], env, world, defs))
                raise Untranslatable("untyped empty sequence", t)
            rt = recognizer_type(fn)
            if rt is not None:
                return BOOL
            if fn.startswith("make-"):
                rest = fn[len("make-"):]
                if world.maybe_type_def(rest) is not None:
                    return NamedType(rest)
                if "-" in rest:
                    ty, _ = rest.rsplit("-", 1)
                    if world.maybe_type_def(ty) is not None:
                        return NamedType(ty)
            if "->" in fn:
                left, fld = fn.split("->", 1)
                ty = left.rsplit("-", 1)[0] if "-" in left else left
                d = world.maybe_type_def(ty)
                if d is not None:
                    if hasattr(d.body, "fields"):
                        for n, ft in d.body.fields:
                            if n == fld:
                                return ft
                    if hasattr(d.body, "alternatives"):
                        alt = left.rsplit("-", 1)[1]
                        for n, ft in dict(d.body.alternatives).get(alt, ()):
                            if n == fld:
                                return ft
            if "-is-" in fn:
                return BOOL
            d = defs.get(fn)
            if d is not None and d.returns_predicate is not None:
                rt = recognizer_type(d.returns_predicate)
                if rt is not None:
                    return rt
        case _:
            pass
    raise Untranslatable(f"cannot infer core type of {t!r}", t)


def from_core_expr(t: CTerm, env: dict[str, TypeExpr], world: TypeWorld,
                   defs: dict[str, CoreDef]) -> Expression:
    match t:
        case CConst(v):
            match v:
                case VBool(b):
                    return Literal(b, "bool")
                case VInt(i):
                    return Literal(i, "int") if i >= 0 else \
                        Unary("-", Literal(-i, "int"))
                case VChar(c):
                    return Literal(c, "char")
                case VString(s):
                    return Literal(s, "string")
                case VSeq(()):
                    return Call("seq", ())
            raise Untranslatable(f"constant {v!r} has no surface form", t)
        case CVar(x):
            return Var(x)
        case CIf(a, b, c):
            return Conditional(from_core_expr(a, env, world, defs),
                               from_core_expr(b, env, world, defs),
                               from_core_expr(c, env, world, defs))
        case CLet(bindings, body):
            env2 = dict(env)
            locals_ = []
            for n, e in bindings:
                ty = core_term_type(e, env2, world, defs)
                locals_.append((n, ty, from_core_expr(e, env2, world, defs)))
                env2[n] = ty
            return Bind(tuple(locals_),
                        from_core_expr(body, env2, world, defs))
        case CAssume(_):
            raise Untranslatable("assume survived simplification", t)
        case CApp(fn, args):
            xs = lambda: [from_core_expr(a, env, world, defs) for a in args]
            if fn in CORE_TO_OP:
                l, r = xs()
                return Binary(CORE_TO_OP[fn], l, r)
            if fn == "not":
                return Unary("!", xs()[0])
            if fn == "negate":
                return Unary("-", xs()[0])
            if fn == "tuple":
                return TupleConstruct(tuple(xs()))
            if fn == "tuple-ref":
                match args[1]:
                    case CConst(VInt(i)):
                        return TupleAccess(
                            from_core_expr(args[0], env, world, defs), i)
                raise Untranslatable("non-constant tuple index", t)
            if fn in ("forall", "exists"):
                raise Untranslatable("quantifier in core body", t)
            rt = recognizer_type(fn)
            if rt is not None:
                raise Untranslatable(
                    f"recognizer {fn} in executable position", t)
            if fn in CORE_BUILTINS:
                return Call(fn, tuple(xs()))
            if fn.startswith("update-"):
                rest = fn[len("update-"):]
                ty, fld = rest.rsplit("-", 1)
                target, value = xs()
                if isinstance(target, ProductUpdate):
                    return ProductUpdate(target.target,
                                         target.fields + ((fld, value),))
                return ProductUpdate(target, ((fld, value),))
            if "->" in fn:
                left, fld = fn.split("->", 1)
                if world.maybe_type_def(left) is not None:
                    return ProductAccess(xs()[0], fld)
                if "-" in left:
                    ty, alt = left.rsplit("-", 1)
                    if world.maybe_type_def(ty) is not None:
                        return SumAccess(xs()[0], alt, fld)
            if "-is-" in fn:
                ty, alt = fn.split("-is-", 1)
                if world.maybe_type_def(ty) is not None:
                    return SumTest(xs()[0], alt)
            if fn.startswith("make-"):
                rest = fn[len("make-"):]
                d = world.maybe_type_def(rest)
                if d is not None and isinstance(d.body, ProductBody):
                    names = [n for n, _ in d.body.fields]
                    return ProductConstruct(rest, tuple(zip(names, xs())))
                if "-" in rest:
                    ty, alt = rest.rsplit("-", 1)
                    d = world.maybe_type_def(ty)
                    if d is not None and isinstance(d.body, SumBody):
                        names = [n for n, _ in dict(d.body.alternatives)[alt]]
                        return SumConstruct(ty, alt, tuple(zip(names, xs())))
            if "-" in fn:
                raise Untranslatable(f"untranslatable core name {fn!r}", t)
            return Call(fn, tuple(xs()))
    raise Untranslatable(f"cannot back-translate {t!r}", t)


def from_core_function(d: CoreDef, world: TypeWorld,
                       defs: dict[str, CoreDef]) -> FunctionDefinition:
    """Back-translate a core def: types from recognizer conjuncts, the rest
    of the guard into `assumes`, assume-wrappers simplified away."""
    if d.body is None:
        raise Untranslatable(f"{d.name} is a native definition")
    param_types: dict[str, TypeExpr] = {}
    residual: list[CTerm] = []
    for c in conjuncts(d.guard):
        matched = False
        match c:
            case CApp(fn, (CVar(p),)) if p in d.params and p not in param_types:
                rt = recognizer_type(fn)
                if rt is not None:
                    param_types[p] = rt
                    matched = True
        if not matched:
            residual.append(c)
    missing = [p for p in d.params if p not in param_types]
    if missing:
        raise Untranslatable(
            f"no recognizer conjunct for parameter(s) {missing} of {d.name}")
    env = dict(param_types)

    # output header from the returns predicate
    if d.returns_predicate is None:
        raise Untranslatable(f"{d.name} lacks a returns predicate")
    out_t = recognizer_type(d.returns_predicate)
    if out_t is None:
        raise Untranslatable(
            f"{d.name} has non-recognizer returns predicate")
    if len(d.out_names) == 1:
        outputs = ((d.out_names[0], out_t),)
    else:
        assert isinstance(out_t, TupleType)
        outputs = tuple(zip(d.out_names, out_t.components))

    # body: strip the guard wrapper, read remaining assumes as true
    try:
        _, inner, _ = split_guarded_body(d)
    except CoreError:
        inner = d.body
    inner = _bool_simplify(_strip_assumes(inner))
    body = from_core_expr(inner, env, world, defs)

    precondition = None
    if residual:
        parts = [from_core_expr(c, env, world, defs) for c in residual]
        precondition = parts[0]
        for p in parts[1:]:
            precondition = Binary("&&", precondition, p)

    postcondition = None
    if d.postcondition is not None:
        env_post = dict(env)
        for n, t in outputs:
            env_post[n] = t
        postcondition = from_core_expr(d.postcondition, env_post, world, defs)

    header = FunctionHeader(
        d.name,
        tuple((p, param_types[p]) for p in d.params),
        outputs,
    )
    return FunctionDefinition(header, precondition, postcondition, body)
