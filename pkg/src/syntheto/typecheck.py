"""Decidable type checking plus obligation generation.

The checker decides everything it can (names, arities, base types) and turns
the rest into Obligations: product invariants at constructions and updates,
subtype restrictions at coercions, callee preconditions at call sites,
function postconditions, nonzero divisors, and theorem statements. Each
obligation is a universally quantified formula over typed variables, with
hypotheses collected from the enclosing precondition, let-bindings and
branch conditions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .ast import (
    BOOL, CHAR, INT, STRING, Bind, Binary, BoolType, Call, CharType,
    Conditional, Expression, FunctionCliqueUnit, FunctionDefinition,
    FunctionHeader, FunctionUnit, IntType, Literal, MapType, NamedType,
    OptionType, ProductAccess, ProductBody, ProductConstruct, ProductUpdate,
    Quantified, SeqType, SetType, SpecificationUnit, StringType, SubtypeBody,
    SumAccess, SumBody, SumConstruct, SumTest, TheoremUnit, TopLevel,
    TransformUnit, TupleAccess, TupleConstruct, TupleType, TypeCliqueUnit,
    TypeDefinition, TypeExpr, TypeUnit, Unary, Var, called_functions,
    unit_name,
)
from .lexer import SynthetoError

BUILTIN_FUNCTIONS = {
    "length", "first", "rest", "is_empty", "member", "add", "remove",
    "get", "put", "keys", "abs", "gcd", "max", "min", "cons", "append",
    "seq", "some", "none",
}

# reserved words of the core layer; user definitions may not shadow them
RESERVED_NAMES = BUILTIN_FUNCTIONS | {
    "plus", "minus", "times", "div", "mod", "negate", "equal", "noteq",
    "lt", "le", "gt", "ge", "and", "or", "not", "implies", "impliedby",
    "iff", "if", "let", "assume", "true", "false", "forall", "exists",
    "tuple", "integer", "boolean", "character", "sequence", "option",
}


class TypecheckError(SynthetoError):
    def __init__(self, message: str, node: object = None):
        self.node = node
        super().__init__(message)


PROVENANCES = (
    "product-invariant", "subtype-restriction", "subtype-witness",
    "precondition-at-call", "postcondition", "measure-decrease",
    "transform-correctness", "isomorphism-inversion", "theorem",
)


@dataclass(frozen=True)
class Obligation:
    """A universally quantified boolean formula with provenance."""

    id: str
    variables: tuple[tuple[str, TypeExpr], ...]
    hypotheses: tuple[Expression, ...]
    conclusion: Expression
    provenance: str

    def __post_init__(self):
        assert self.provenance in PROVENANCES


@dataclass
class WorldEntry:
    kind: str  # "type" | "function" | "specification" | "theorem"
    unit: TopLevel
    definition: Union[TypeDefinition, FunctionDefinition, None] = None
    executable: bool = True
    witness: object = None  # subtype witness Value, once inferred
    clique: tuple[str, ...] = ()  # co-members of the defining clique


@dataclass
class TypeWorld:
    """Ordered accepted definitions plus instantiated parameterized types.

    Immutable by convention: define() returns a new world.
    """

    entries: dict[str, WorldEntry] = field(default_factory=dict)
    instances: tuple[TypeExpr, ...] = ()

    def copy(self) -> "TypeWorld":
        return TypeWorld(dict(self.entries), self.instances)

    def has(self, name: str) -> bool:
        return name in self.entries

    def define(self, name: str, entry: WorldEntry) -> "TypeWorld":
        if name in self.entries:
            raise TypecheckError(f"duplicate definition of {name!r}")
        if name in RESERVED_NAMES:
            raise TypecheckError(f"{name!r} is a reserved name")
        w = self.copy()
        w.entries[name] = entry
        return w

    def with_instances(self, new: "list[TypeExpr]") -> "TypeWorld":
        w = self.copy()
        w.instances = self.instances + tuple(
            t for t in new if t not in self.instances)
        return w

    def type_def(self, name: str) -> TypeDefinition:
        e = self.entries.get(name)
        if e is None or e.kind != "type":
            raise TypecheckError(f"unknown type {name!r}")
        return e.definition

    def maybe_type_def(self, name: str) -> Optional[TypeDefinition]:
        e = self.entries.get(name)
        return e.definition if e is not None and e.kind == "type" else None

    def function_def(self, name: str) -> FunctionDefinition:
        e = self.entries.get(name)
        if e is None or e.kind != "function":
            raise TypecheckError(f"unknown function {name!r}")
        return e.definition

    def maybe_function_def(self, name: str) -> Optional[FunctionDefinition]:
        e = self.entries.get(name)
        return e.definition if e is not None and e.kind == "function" else None

    def functions(self) -> list[FunctionDefinition]:
        return [e.definition for e in self.entries.values()
                if e.kind == "function"]


@dataclass
class TypedUnit:
    """A top-level unit plus a type for every expression node (by identity)."""

    unit: TopLevel
    types: dict[int, TypeExpr]
    executable: bool

    def type_of(self, node: Expression) -> TypeExpr:
        return self.types[id(node)]


# ------------------------------------------------------------ type utilities


def resolve_base(t: TypeExpr, world: TypeWorld) -> TypeExpr:
    """Follow named-subtype chains to the underlying structural type."""
    seen = set()
    while isinstance(t, NamedType):
        if t.name in seen:
            raise TypecheckError(f"cyclic subtype chain at {t.name!r}")
        seen.add(t.name)
        d = world.maybe_type_def(t.name)
        if d is None:
            raise TypecheckError(f"unknown type {t.name!r}")
        if isinstance(d.body, SubtypeBody):
            t = d.body.supertype
            continue
        return t
    return t


def subtype_chain(t: TypeExpr, world: TypeWorld) -> list[tuple[NamedType, SubtypeBody]]:
    """Subtype steps from t upward (nearest first); empty for non-subtypes."""
    out = []
    while isinstance(t, NamedType):
        d = world.maybe_type_def(t.name)
        if d is None or not isinstance(d.body, SubtypeBody):
            break
        out.append((t, d.body))
        t = d.body.supertype
    return out


def type_le(a: TypeExpr, b: TypeExpr, world: TypeWorld) -> bool:
    """a usable where b is expected with no obligation (a below b)."""
    if a == b:
        return True
    while isinstance(a, NamedType):
        d = world.maybe_type_def(a.name)
        if d is None or not isinstance(d.body, SubtypeBody):
            return False
        a = d.body.supertype
        if a == b:
            return True
    return False


def check_type_exists(t: TypeExpr, world: TypeWorld,
                      extra_names: frozenset = frozenset()) -> None:
    match t:
        case BoolType() | CharType() | StringType() | IntType():
            return
        case NamedType(name):
            if name in extra_names or world.maybe_type_def(name) is not None:
                return
            raise TypecheckError(f"unknown type {name!r}")
        case OptionType(e) | SetType(e) | SeqType(e):
            check_type_exists(e, world, extra_names)
        case MapType(d, r):
            check_type_exists(d, world, extra_names)
            check_type_exists(r, world, extra_names)
        case TupleType(cs):
            for c in cs:
                check_type_exists(c, world, extra_names)
        case _:
            raise TypecheckError(f"bad type expression {t!r}")


def subst_expr(e: Expression, mapping: dict[str, Expression]) -> Expression:
    """Capture-aware substitution of free variables."""
    match e:
        case Literal():
            return e
        case Var(x):
            return mapping.get(x, e)
        case Unary(op, a):
            return Unary(op, subst_expr(a, mapping))
        case Binary(op, l, r):
            return Binary(op, subst_expr(l, mapping), subst_expr(r, mapping))
        case Conditional(t, a, b):
            return Conditional(subst_expr(t, mapping), subst_expr(a, mapping),
                               subst_expr(b, mapping))
        case Call(f, args):
            return Call(f, tuple(subst_expr(a, mapping) for a in args))
        case Bind(locals_, body):
            m = dict(mapping)
            new_locals = []
            for n, ty, init in locals_:
                new_locals.append((n, ty, subst_expr(init, m)))
                m.pop(n, None)
            return Bind(tuple(new_locals), subst_expr(body, m))
        case TupleConstruct(cs):
            return TupleConstruct(tuple(subst_expr(c, mapping) for c in cs))
        case TupleAccess(t, i):
            return TupleAccess(subst_expr(t, mapping), i)
        case ProductConstruct(ty, fs):
            return ProductConstruct(ty, tuple(
                (n, subst_expr(v, mapping)) for n, v in fs))
        case ProductAccess(t, f):
            return ProductAccess(subst_expr(t, mapping), f)
        case ProductUpdate(t, fs):
            return ProductUpdate(subst_expr(t, mapping), tuple(
                (n, subst_expr(v, mapping)) for n, v in fs))
        case SumConstruct(ty, alt, fs):
            return SumConstruct(ty, alt, tuple(
                (n, subst_expr(v, mapping)) for n, v in fs))
        case SumTest(t, alt):
            return SumTest(subst_expr(t, mapping), alt)
        case SumAccess(t, alt, f):
            return SumAccess(subst_expr(t, mapping), alt, f)
        case Quantified(q, bound, matrix):
            m = {k: v for k, v in mapping.items()
                 if k not in {n for n, _ in bound}}
            return Quantified(q, bound, subst_expr(matrix, m))
    raise TypeError(f"not an expression: {e!r}")


# ------------------------------------------------------------------- checker


@dataclass
class _Ctx:
    """Obligation context: typed variables and hypothesis formulas."""

    variables: tuple[tuple[str, TypeExpr], ...] = ()
    hypotheses: tuple[Expression, ...] = ()

    def bind(self, name: str, t: TypeExpr) -> "_Ctx":
        return _Ctx(self.variables + ((name, t),), self.hypotheses)

    def assume(self, h: Expression) -> "_Ctx":
        return _Ctx(self.variables, self.hypotheses + (h,))


class _Checker:
    def __init__(self, world: TypeWorld, unit_label: str,
                 fn_scope: Optional[dict[str, FunctionHeader]] = None,
                 self_headers: Optional[dict[str, FunctionDefinition]] = None):
        self.world = world
        self.unit_label = unit_label
        self.obligations: list[Obligation] = []
        self.types: dict[int, TypeExpr] = {}
        self.fn_scope = fn_scope or {}
        # headers of the clique being defined (visible before acceptance)
        self.self_headers = self_headers or {}
        self._counter = 0

    # ------------------------------------------------------------ obligations

    def emit(self, provenance: str, ctx: _Ctx, conclusion: Expression) -> None:
        self._counter += 1
        self.obligations.append(Obligation(
            id=f"{self.unit_label}#{provenance}#{self._counter}",
            variables=ctx.variables,
            hypotheses=ctx.hypotheses,
            conclusion=conclusion,
            provenance=provenance,
        ))

    # ---------------------------------------------------------------- helpers

    def lookup_callee(self, name: str) -> Optional[FunctionDefinition]:
        if name in self.self_headers:
            return self.self_headers[name]
        return self.world.maybe_function_def(name)

    def note(self, e: Expression, t: TypeExpr) -> TypeExpr:
        self.types[id(e)] = t
        return t

    def coerce(self, e: Expression, actual: TypeExpr, expected: Optional[TypeExpr],
               ctx: _Ctx) -> TypeExpr:
        """Accept actual where expected, emitting restriction obligations for
        downward coercions into named subtypes."""
        if expected is None or actual == expected:
            return actual
        if type_le(actual, expected, self.world):
            return actual
        # walk expected's chain upward until actual fits; obligations per step
        steps = []
        t = expected
        ok = False
        for named, body in subtype_chain(expected, self.world):
            steps.append((named, body))
            t = body.supertype
            if type_le(actual, t, self.world):
                ok = True
                break
        if not ok:
            raise TypecheckError(
                f"type mismatch: expected {expected}, got {actual}", e)
        for named, body in reversed(steps):
            self.emit("subtype-restriction", ctx,
                      subst_expr(body.restriction, {body.variable: e}))
        return actual

    # ------------------------------------------------------------------ infer

    def infer(self, e: Expression, env: dict[str, TypeExpr], ctx: _Ctx,
              expected: Optional[TypeExpr] = None) -> TypeExpr:
        t = self._infer(e, env, ctx, expected)
        self.coerce(e, t, expected, ctx)
        return self.note(e, t)

    def _expected_base(self, expected: Optional[TypeExpr]) -> Optional[TypeExpr]:
        if expected is None:
            return None
        return resolve_base(expected, self.world)

    def _infer(self, e: Expression, env: dict[str, TypeExpr], ctx: _Ctx,
               expected: Optional[TypeExpr]) -> TypeExpr:
        match e:
            case Literal(_, kind):
                return {"bool": BOOL, "int": INT,
                        "char": CHAR, "string": STRING}[kind]
            case Var(x):
                if x not in env:
                    raise TypecheckError(f"unknown variable {x!r}", e)
                return env[x]
            case Unary(op, a):
                if op == "!":
                    self.infer(a, env, ctx, BOOL)
                    return BOOL
                self.infer(a, env, ctx, INT)
                return INT
            case Binary(op, l, r):
                if op in ("&&", "||", "==>", "<==", "<==>"):
                    self.infer(l, env, ctx, BOOL)
                    # the left conjunct (or negated disjunct) guards the right
                    if op == "&&":
                        rctx = ctx.assume(l)
                    elif op == "||":
                        rctx = ctx.assume(Unary("!", l))
                    elif op == "==>":
                        rctx = ctx.assume(l)
                    else:
                        rctx = ctx
                    self.infer(r, env, rctx, BOOL)
                    return BOOL
                if op in ("+", "-", "*", "/", "%"):
                    self.infer(l, env, ctx, INT)
                    self.infer(r, env, ctx, INT)
                    if op in ("/", "%"):
                        self.emit("precondition-at-call", ctx,
                                  Binary("!=", r, Literal(0, "int")))
                    return INT
                if op in ("<", "<=", ">", ">="):
                    self.infer(l, env, ctx, INT)
                    self.infer(r, env, ctx, INT)
                    return BOOL
                # == and != : operands of a common type
                lt = self.infer(l, env, ctx)
                rt = self.infer(r, env, ctx)
                if not (type_le(lt, rt, self.world)
                        or type_le(rt, lt, self.world)):
                    raise TypecheckError(
                        f"cannot compare {lt} with {rt}", e)
                return BOOL
            case Conditional(test, then, orelse):
                self.infer(test, env, ctx, BOOL)
                tctx = ctx.assume(test)
                ectx = ctx.assume(Unary("!", test))
                if expected is not None:
                    self.infer(then, env, tctx, expected)
                    self.infer(orelse, env, ectx, expected)
                    return expected
                t1 = self.infer(then, env, tctx)
                t2 = self.infer(orelse, env, ectx)
                if type_le(t1, t2, self.world):
                    return t2
                if type_le(t2, t1, self.world):
                    return t1
                raise TypecheckError(
                    f"branches disagree: {t1} vs {t2}", e)
            case Call(fn, args):
                return self.infer_call(e, fn, args, env, ctx, expected)
            case Bind(locals_, body):
                env2 = dict(env)
                ctx2 = ctx
                for name, ty, init in locals_:
                    check_type_exists(ty, self.world)
                    self.infer(init, env2, ctx2, ty)
                    env2[name] = ty
                    ctx2 = ctx2.bind(name, ty).assume(
                        Binary("==", Var(name), init))
                return self.infer(body, env2, ctx2, expected)
            case TupleConstruct(comps):
                exp = self._expected_base(expected)
                if isinstance(exp, TupleType) and len(exp.components) == len(comps):
                    for c, ct in zip(comps, exp.components):
                        self.infer(c, env, ctx, ct)
                    return TupleType(exp.components)
                return TupleType(tuple(
                    self.infer(c, env, ctx) for c in comps))
            case TupleAccess(target, index):
                tt = resolve_base(self.infer(target, env, ctx), self.world)
                if not isinstance(tt, TupleType):
                    raise TypecheckError(f"not a tuple: {tt}", e)
                if not (0 <= index < len(tt.components)):
                    raise TypecheckError(f"tuple index {index} out of range", e)
                return tt.components[index]
            case ProductConstruct(ty, fields):
                return self.infer_product_construct(e, ty, fields, env, ctx)
            case ProductAccess(target, fld):
                tt = self.infer(target, env, ctx)
                body = self.product_body_of(tt, e)
                for n, ft in body.fields:
                    if n == fld:
                        return ft
                raise TypecheckError(f"no field {fld!r} in {tt}", e)
            case ProductUpdate(target, fields):
                tt = self.infer(target, env, ctx)
                body = self.product_body_of(tt, e)
                field_types = dict(body.fields)
                for n, v in fields:
                    if n not in field_types:
                        raise TypecheckError(f"no field {n!r} in {tt}", e)
                    self.infer(v, env, ctx, field_types[n])
                if body.invariant is not None:
                    updated = dict(fields)
                    mapping = {n: updated.get(n, ProductAccess(target, n))
                               for n, _ in body.fields}
                    self.emit("product-invariant", ctx,
                              subst_expr(body.invariant, mapping))
                return tt
            case SumConstruct(ty, alt, fields):
                d = self.world.maybe_type_def(ty)
                if d is None or not isinstance(d.body, SumBody):
                    raise TypecheckError(f"unknown sum type {ty!r}", e)
                for alt_name, alt_fields in d.body.alternatives:
                    if alt_name == alt:
                        break
                else:
                    raise TypecheckError(f"no alternative {alt!r} in {ty}", e)
                self.check_field_args(e, dict(alt_fields), fields, env, ctx)
                return NamedType(ty)
            case SumTest(target, alt):
                tt = self.infer(target, env, ctx)
                self.sum_alternative_of(tt, alt, e)
                return BOOL
            case SumAccess(target, alt, fld):
                tt = self.infer(target, env, ctx)
                alt_fields = self.sum_alternative_of(tt, alt, e)
                for n, ft in alt_fields:
                    if n == fld:
                        return ft
                raise TypecheckError(f"no field {fld!r} in alternative {alt}", e)
            case Quantified():
                raise TypecheckError(
                    "quantifier allowed only as a whole body", e)
        raise TypecheckError(f"cannot type {e!r}", e)

    # ----------------------------------------------------- calls and builtins

    def product_body_of(self, t: TypeExpr, node) -> ProductBody:
        base = resolve_base(t, self.world)
        if isinstance(base, NamedType):
            d = self.world.maybe_type_def(base.name)
            if d is not None and isinstance(d.body, ProductBody):
                return d.body
        raise TypecheckError(f"not a product type: {t}", node)

    def sum_alternative_of(self, t: TypeExpr, alt: str, node):
        base = resolve_base(t, self.world)
        if isinstance(base, NamedType):
            d = self.world.maybe_type_def(base.name)
            if d is not None and isinstance(d.body, SumBody):
                for alt_name, alt_fields in d.body.alternatives:
                    if alt_name == alt:
                        return alt_fields
                raise TypecheckError(f"no alternative {alt!r} in {t}", node)
        raise TypecheckError(f"not a sum type: {t}", node)

    def check_field_args(self, node, field_types: dict[str, TypeExpr],
                         given: tuple[tuple[str, Expression], ...],
                         env, ctx) -> None:
        names = [n for n, _ in given]
        if set(names) != set(field_types) or len(names) != len(set(names)):
            raise TypecheckError(
                f"fields {sorted(names)} do not match {sorted(field_types)}",
                node)
        for n, v in given:
            self.infer(v, env, ctx, field_types[n])

    def infer_product_construct(self, e, ty, fields, env, ctx) -> TypeExpr:
        d = self.world.maybe_type_def(ty)
        if d is None or not isinstance(d.body, ProductBody):
            raise TypecheckError(f"unknown product type {ty!r}", e)
        self.check_field_args(e, dict(d.body.fields), fields, env, ctx)
        if d.body.invariant is not None:
            mapping = dict(fields)
            self.emit("product-invariant", ctx,
                      subst_expr(d.body.invariant, mapping))
        return NamedType(ty)

    def infer_call(self, e, fn, args, env, ctx,
                   expected: Optional[TypeExpr]) -> TypeExpr:
        if fn in BUILTIN_FUNCTIONS:
            return self.infer_builtin(e, fn, args, env, ctx, expected)
        callee = None
        if fn in self.fn_scope:
            header = self.fn_scope[fn]
            pre = None
        else:
            callee = self.lookup_callee(fn)
            if callee is None:
                raise TypecheckError(f"unknown function {fn!r}", e)
            header = callee.header
            pre = callee.precondition
        if len(args) != len(header.inputs):
            raise TypecheckError(
                f"{fn} expects {len(header.inputs)} arguments, got {len(args)}",
                e)
        for a, (_, pt) in zip(args, header.inputs):
            self.infer(a, env, ctx, pt)
        if pre is not None:
            mapping = {n: a for (n, _), a in zip(header.inputs, args)}
            self.emit("precondition-at-call", ctx, subst_expr(pre, mapping))
        outs = header.outputs
        if len(outs) == 1:
            return outs[0][1]
        return TupleType(tuple(t for _, t in outs))

    def infer_builtin(self, e, fn, args, env, ctx,
                      expected: Optional[TypeExpr]) -> TypeExpr:
        def arity(n: int) -> None:
            if len(args) != n:
                raise TypecheckError(
                    f"{fn} expects {n} arguments, got {len(args)}", e)

        def seq_of(t: TypeExpr) -> SeqType:
            base = resolve_base(t, self.world)
            if not isinstance(base, SeqType):
                raise TypecheckError(f"{fn} expects a sequence, got {t}", e)
            return base

        def set_of(t: TypeExpr) -> SetType:
            base = resolve_base(t, self.world)
            if not isinstance(base, SetType):
                raise TypecheckError(f"{fn} expects a set, got {t}", e)
            return base

        def map_of(t: TypeExpr) -> MapType:
            base = resolve_base(t, self.world)
            if not isinstance(base, MapType):
                raise TypecheckError(f"{fn} expects a map, got {t}", e)
            return base

        match fn:
            case "length":
                arity(1)
                t = resolve_base(self.infer(args[0], env, ctx), self.world)
                if not isinstance(t, (SeqType, SetType, MapType, StringType)):
                    raise TypecheckError(f"length of {t}", e)
                return INT
            case "is_empty":
                arity(1)
                t = resolve_base(self.infer(args[0], env, ctx), self.world)
                if not isinstance(t, (SeqType, SetType, MapType, StringType)):
                    raise TypecheckError(f"is_empty of {t}", e)
                return BOOL
            case "first":
                arity(1)
                return seq_of(self.infer(args[0], env, ctx)).element
            case "rest":
                arity(1)
                st = seq_of(self.infer(args[0], env, ctx))
                return st
            case "member":
                arity(2)
                ct = resolve_base(self.infer(args[1], env, ctx), self.world)
                if isinstance(ct, (SeqType, SetType)):
                    self.infer(args[0], env, ctx, ct.element)
                    return BOOL
                raise TypecheckError(f"member in {ct}", e)
            case "add" | "remove":
                arity(2)
                st = set_of(self.infer(args[1], env, ctx))
                self.infer(args[0], env, ctx, st.element)
                return st
            case "cons":
                arity(2)
                st = seq_of(self.infer(args[1], env, ctx))
                self.infer(args[0], env, ctx, st.element)
                return st
            case "append":
                arity(2)
                st = seq_of(self.infer(args[0], env, ctx))
                self.infer(args[1], env, ctx, st)
                return st
            case "get":
                arity(2)
                mt = map_of(self.infer(args[0], env, ctx))
                self.infer(args[1], env, ctx, mt.domain)
                return mt.range
            case "put":
                arity(3)
                mt = map_of(self.infer(args[0], env, ctx))
                self.infer(args[1], env, ctx, mt.domain)
                self.infer(args[2], env, ctx, mt.range)
                return mt
            case "keys":
                arity(1)
                return SetType(map_of(self.infer(args[0], env, ctx)).domain)
            case "abs":
                arity(1)
                self.infer(args[0], env, ctx, INT)
                return INT
            case "gcd" | "max" | "min":
                arity(2)
                self.infer(args[0], env, ctx, INT)
                self.infer(args[1], env, ctx, INT)
                return INT
            case "seq":
                exp = self._expected_base(expected)
                if args:
                    et = self.infer(args[0], env, ctx)
                    if isinstance(exp, SeqType):
                        et = exp.element
                        self.infer(args[0], env, ctx, et)
                    for a in args[1:]:
                        self.infer(a, env, ctx, et)
                    return SeqType(et)
                if isinstance(exp, SeqType):
                    return exp
                raise TypecheckError(
                    "cannot infer element type of empty sequence", e)
            case "some":
                arity(1)
                exp = self._expected_base(expected)
                if isinstance(exp, OptionType):
                    self.infer(args[0], env, ctx, exp.element)
                    return OptionType(exp.element)
                return OptionType(self.infer(args[0], env, ctx))
            case "none":
                arity(0)
                exp = self._expected_base(expected)
                if isinstance(exp, OptionType):
                    return exp
                raise TypecheckError(
                    "cannot infer element type of none", e)
        raise TypecheckError(f"unhandled builtin {fn}", e)


# --------------------------------------------------------------- public ops


def infer_expr_type(e: Expression, env: dict[str, TypeExpr],
                    world: TypeWorld) -> TypeExpr:
    """Type of e under env; raises TypecheckError on any decidable failure."""
    c = _Checker(world, "expr")
    return c.infer(e, env, _Ctx(tuple(env.items())))


def _check_header(h: FunctionHeader, world: TypeWorld,
                  extra_types: frozenset = frozenset()) -> None:
    names = [n for n, _ in h.inputs + h.outputs]
    if len(names) != len(set(names)):
        raise TypecheckError(f"duplicate parameter names in {h.name}")
    if not h.outputs:
        raise TypecheckError(f"{h.name} needs at least one output")
    for _, t in h.inputs + h.outputs:
        check_type_exists(t, world, extra_types)


def _check_function(d: FunctionDefinition, checker: _Checker,
                    world: TypeWorld) -> None:
    h = d.header
    _check_header(h, world)
    env = {n: t for n, t in h.inputs}
    ctx = _Ctx(tuple(h.inputs))
    if d.precondition is not None:
        checker.infer(d.precondition, env, ctx, BOOL)
        ctx = ctx.assume(d.precondition)
    if d.postcondition is not None:
        env_post = dict(env)
        ctx_post = ctx
        for n, t in h.outputs:
            env_post[n] = t
            ctx_post = ctx_post.bind(n, t)
        checker.infer(d.postcondition, env_post, ctx_post, BOOL)
    if d.is_quantified:
        q: Quantified = d.body
        if len(h.outputs) != 1 or h.outputs[0][1] != BOOL:
            raise TypecheckError(
                f"quantified function {h.name} must have one bool output")
        if h.name in called_functions(q.matrix):
            raise TypecheckError(
                f"quantified function {h.name} cannot be recursive")
        env_q = dict(env)
        ctx_q = ctx
        for n, t in q.bound:
            check_type_exists(t, world)
            env_q[n] = t
            ctx_q = ctx_q.bind(n, t)
        checker.infer(q.matrix, env_q, ctx_q, BOOL)
        checker.note(q, BOOL)
    else:
        out_t = (h.outputs[0][1] if len(h.outputs) == 1
                 else TupleType(tuple(t for _, t in h.outputs)))
        checker.infer(d.body, env, ctx, out_t)
    # postcondition obligation about the definition itself
    if d.postcondition is not None:
        result = Call(h.name, tuple(Var(n) for n, _ in h.inputs))
        if len(h.outputs) == 1:
            mapping = {h.outputs[0][0]: result}
        else:
            mapping = {n: TupleAccess(result, i)
                       for i, (n, _) in enumerate(h.outputs)}
        checker.emit("postcondition", ctx,
                     subst_expr(d.postcondition, mapping))


def _executable_function(d: FunctionDefinition, world: TypeWorld,
                         clique: dict[str, FunctionDefinition]) -> bool:
    if d.is_quantified:
        return False
    for fn in called_functions(d.body):
        if fn in BUILTIN_FUNCTIONS or fn in clique:
            continue
        entry = world.entries.get(fn)
        if entry is None or entry.kind != "function" or not entry.executable:
            return False
    return True


def check_toplevel(u: TopLevel, world: TypeWorld) -> tuple[TypedUnit, list[Obligation]]:
    """Check one unit against the world; returns annotations and obligations.

    Raises TypecheckError on decidable failures (the world is unchanged).
    """
    label = unit_name(u)
    checker = _Checker(world, label)
    executable = True
    match u:
        case TypeUnit(d):
            _check_type_definition(d, checker, world, clique_names=frozenset())
        case TypeCliqueUnit(defs):
            if not defs:
                raise TypecheckError("empty type clique")
            names = frozenset(d.name for d in defs)
            if len(names) != len(defs):
                raise TypecheckError("duplicate names in type clique")
            for d in defs:
                _check_type_definition(d, checker, world, clique_names=names)
        case FunctionUnit(d):
            checker.self_headers = {d.name: d}
            if world.has(d.name):
                raise TypecheckError(f"duplicate definition of {d.name!r}")
            _check_function(d, checker, world)
            executable = _executable_function(d, world, {d.name: d})
        case FunctionCliqueUnit(defs):
            if not defs:
                raise TypecheckError("empty function clique")
            clique = {d.name: d for d in defs}
            if len(clique) != len(defs):
                raise TypecheckError("duplicate names in function clique")
            checker.self_headers = clique
            for d in defs:
                _check_function(d, checker, world)
            executable = all(
                _executable_function(d, world, clique) for d in defs)
        case SpecificationUnit(name, headers, kind, body):
            fn_scope = {}
            for h in headers:
                _check_header(h, world)
                fn_scope[h.name] = h
            checker.fn_scope = fn_scope
            env: dict[str, TypeExpr] = {}
            if kind == "io-relation":
                if len(headers) != 1:
                    raise TypecheckError(
                        "io-relation specification needs one function variable")
                env = {n: t for n, t in headers[0].inputs + headers[0].outputs}
            ctx = _Ctx(tuple(env.items()))
            if kind == "quantified":
                q: Quantified = body
                env_q = dict(env)
                ctx_q = ctx
                for n, t in q.bound:
                    check_type_exists(t, world)
                    env_q[n] = t
                    ctx_q = ctx_q.bind(n, t)
                checker.infer(q.matrix, env_q, ctx_q, BOOL)
                checker.note(q, BOOL)
            else:
                checker.infer(body, env, ctx, BOOL)
            executable = False
        case TheoremUnit(name, variables, formula):
            names = [n for n, _ in variables]
            if len(names) != len(set(names)):
                raise TypecheckError("duplicate theorem variables")
            for _, t in variables:
                check_type_exists(t, world)
            env = {n: t for n, t in variables}
            ctx = _Ctx(tuple(variables))
            checker.infer(formula, env, ctx, BOOL)
            checker.emit("theorem", _Ctx(tuple(variables)), formula)
            executable = False
        case TransformUnit(new_name, target, _, _):
            if world.has(new_name):
                raise TypecheckError(f"duplicate definition of {new_name!r}")
            entry = world.entries.get(target)
            if entry is None or entry.kind != "function":
                raise TypecheckError(f"unknown transform target {target!r}")
        case _:
            raise TypecheckError(f"unknown toplevel {u!r}")
    return TypedUnit(u, checker.types, executable), checker.obligations


def _check_type_definition(d: TypeDefinition, checker: _Checker,
                           world: TypeWorld, clique_names: frozenset) -> None:
    if world.has(d.name):
        raise TypecheckError(f"duplicate definition of {d.name!r}")
    names_in_scope = clique_names | {d.name}
    match d.body:
        case ProductBody(fields, invariant):
            fnames = [n for n, _ in fields]
            if len(fnames) != len(set(fnames)):
                raise TypecheckError(f"duplicate fields in {d.name}")
            for _, t in fields:
                check_type_exists(t, world, names_in_scope)
            if invariant is not None:
                env = {n: t for n, t in fields}
                checker.infer(invariant, env, _Ctx(tuple(fields)), BOOL)
        case SumBody(alternatives):
            anames = [n for n, _ in alternatives]
            if len(anames) != len(set(anames)):
                raise TypecheckError(f"duplicate alternatives in {d.name}")
            for _, fields in alternatives:
                fnames = [n for n, _ in fields]
                if len(fnames) != len(set(fnames)):
                    raise TypecheckError(f"duplicate fields in {d.name}")
                for _, t in fields:
                    check_type_exists(t, world, names_in_scope)
        case SubtypeBody(supertype, var, restriction, witness):
            check_type_exists(supertype, world)  # no recursion through subtypes
            env = {var: supertype}
            checker.infer(restriction, env, _Ctx(((var, supertype),)), BOOL)
            if witness is not None:
                checker.infer(witness, {}, _Ctx(()), supertype)
                checker.emit("subtype-witness", _Ctx(()),
                             subst_expr(restriction, {var: witness}))


# ------------------------------------------------------------ wellfoundedness


def check_type_wellfounded(clique: list[TypeDefinition],
                           world: TypeWorld) -> list[str]:
    """Least-fixpoint inhabitation; returns the names of uninhabited members
    (empty list means ok)."""
    names = {d.name for d in clique}
    inhabited: set[str] = set()

    def type_inhabited(t: TypeExpr) -> bool:
        match t:
            case BoolType() | CharType() | StringType() | IntType():
                return True
            case OptionType(_) | SetType(_) | SeqType(_) | MapType(_, _):
                return True  # empty collection / none always exists
            case TupleType(cs):
                return all(type_inhabited(c) for c in cs)
            case NamedType(n):
                if n in names:
                    return n in inhabited
                return world.maybe_type_def(n) is not None  # accepted => inhabited
        return False

    def def_inhabited(d: TypeDefinition) -> bool:
        match d.body:
            case ProductBody(fields, _):
                return all(type_inhabited(t) for _, t in fields)
            case SumBody(alternatives):
                return any(all(type_inhabited(t) for _, t in fields)
                           for _, fields in alternatives)
            case SubtypeBody(supertype, _, _, _):
                return type_inhabited(supertype)
        return False

    changed = True
    while changed:
        changed = False
        for d in clique:
            if d.name not in inhabited and def_inhabited(d):
                inhabited.add(d.name)
                changed = True
    return [d.name for d in clique if d.name not in inhabited]


# ----------------------------------------------------------- instantiations


def instantiate_polytypes(typed: TypedUnit, world: TypeWorld) -> list[TypeExpr]:
    """Parameterized-type instances used by the unit, inner before outer,
    deduplicated against the world."""
    seen: list[TypeExpr] = []

    def visit(t: TypeExpr) -> None:
        match t:
            case OptionType(e) | SetType(e) | SeqType(e):
                visit(e)
            case MapType(d, r):
                visit(d)
                visit(r)
            case TupleType(cs):
                for c in cs:
                    visit(c)
            case _:
                return
        if t not in seen and t not in world.instances:
            seen.append(t)

    def visit_unit_types(u: TopLevel) -> None:
        match u:
            case TypeUnit(d):
                visit_typedef(d)
            case TypeCliqueUnit(defs):
                for d in defs:
                    visit_typedef(d)
            case FunctionUnit(d):
                visit_fn(d)
            case FunctionCliqueUnit(defs):
                for d in defs:
                    visit_fn(d)
            case SpecificationUnit(_, headers, _, _):
                for h in headers:
                    for _, t in h.inputs + h.outputs:
                        visit(t)
            case TheoremUnit(_, variables, _):
                for _, t in variables:
                    visit(t)
            case TransformUnit():
                pass

    def visit_typedef(d: TypeDefinition) -> None:
        match d.body:
            case ProductBody(fields, _):
                for _, t in fields:
                    visit(t)
            case SumBody(alternatives):
                for _, fields in alternatives:
                    for _, t in fields:
                        visit(t)
            case SubtypeBody(supertype, _, _, _):
                visit(supertype)

    def visit_fn(d: FunctionDefinition) -> None:
        for _, t in d.header.inputs + d.header.outputs:
            visit(t)
        if isinstance(d.body, Quantified):
            for _, t in d.body.bound:
                visit(t)

    visit_unit_types(typed.unit)
    for t in typed.types.values():
        visit(t)
    return seen


# ------------------------------------------------------------------ witness


class NeedsUser:
    """Sentinel: no witness could be inferred; the user must supply one."""

    def __repr__(self) -> str:
        return "NeedsUser()"


NEEDS_USER = NeedsUser()


def infer_witness(d: TypeDefinition, world: TypeWorld):
    """Witness Value for a subtype definition, NEEDS_USER, or raise on a
    failing explicit witness."""
    from . import interp
    from .values import (VBool, VInt, VMap, VSeq, VSet, VString)

    assert isinstance(d.body, SubtypeBody)
    body = d.body

    def satisfies(v) -> bool:
        if not interp.value_matches_type(v, body.supertype, world):
            return False
        try:
            res = interp.eval_expr(body.restriction, {body.variable: v}, world)
        except SynthetoError:
            return False
        return isinstance(res, VBool) and res.value

    if body.witness is not None:
        v = interp.eval_expr(body.witness, {}, world)
        if not satisfies(v):
            raise TypecheckError(
                f"witness for {d.name} fails its restriction")
        return v

    base = resolve_base(body.supertype, world)
    candidates = []
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
        case NamedType(n):
            td = world.maybe_type_def(n)
            if td is not None and isinstance(td.body, SumBody):
                for alt, fields in td.body.alternatives:
                    if not fields:
                        from .values import VSum
                        candidates.append(VSum(n, alt, ()))
    for v in candidates:
        if satisfies(v):
            return v
    return NEEDS_USER
