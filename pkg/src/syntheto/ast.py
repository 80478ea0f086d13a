"""Surface-language abstract syntax.

Every node is an immutable dataclass. Expressions carry no type
annotations here; the checker produces a separate node->type mapping.
alpha_equal compares top-level units up to consistent renaming of
parameters, let-bound locals and quantifier variables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union


# ---------------------------------------------------------------- identifiers

IDENT_RE = r"[A-Za-z_][A-Za-z0-9_]*"


def is_identifier(name: str) -> bool:
    if not name:
        return False
    if not (name[0].isalpha() or name[0] == "_"):
        return False
    return all(c.isalnum() or c == "_" for c in name[1:])


# ---------------------------------------------------------------------- types


@dataclass(frozen=True, slots=True)
class TypeExpr:
    """Base class for static types. Abstract."""


@dataclass(frozen=True, slots=True)
class BoolType(TypeExpr):
    def __str__(self) -> str:
        return "bool"


@dataclass(frozen=True, slots=True)
class CharType(TypeExpr):
    def __str__(self) -> str:
        return "char"


@dataclass(frozen=True, slots=True)
class StringType(TypeExpr):
    def __str__(self) -> str:
        return "string"


@dataclass(frozen=True, slots=True)
class IntType(TypeExpr):
    def __str__(self) -> str:
        return "int"


@dataclass(frozen=True, slots=True)
class NamedType(TypeExpr):
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class OptionType(TypeExpr):
    element: TypeExpr

    def __str__(self) -> str:
        return f"opt<{self.element}>"


@dataclass(frozen=True, slots=True)
class SetType(TypeExpr):
    element: TypeExpr

    def __str__(self) -> str:
        return f"set<{self.element}>"


@dataclass(frozen=True, slots=True)
class SeqType(TypeExpr):
    element: TypeExpr

    def __str__(self) -> str:
        return f"seq<{self.element}>"


@dataclass(frozen=True, slots=True)
class MapType(TypeExpr):
    domain: TypeExpr
    range: TypeExpr

    def __str__(self) -> str:
        return f"map<{self.domain}, {self.range}>"


@dataclass(frozen=True, slots=True)
class TupleType(TypeExpr):
    components: tuple[TypeExpr, ...]

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.components) + ")"


BOOL = BoolType()
CHAR = CharType()
STRING = StringType()
INT = IntType()


# ---------------------------------------------------------------- expressions

BINARY_OPS = (
    "==", "!=", "<", "<=", ">", ">=",
    "+", "-", "*", "/", "%",
    "&&", "||", "==>", "<==", "<==>",
)
UNARY_OPS = ("!", "-")


@dataclass(frozen=True, slots=True)
class Expression:
    """Base class for expressions. Abstract."""


@dataclass(frozen=True, slots=True)
class Literal(Expression):
    value: Union[bool, int, str]
    kind: str  # "bool" | "int" | "char" | "string"

    def __post_init__(self):
        assert self.kind in ("bool", "int", "char", "string")


@dataclass(frozen=True, slots=True)
class Var(Expression):
    name: str


@dataclass(frozen=True, slots=True)
class Unary(Expression):
    op: str
    operand: Expression


@dataclass(frozen=True, slots=True)
class Binary(Expression):
    op: str
    left: Expression
    right: Expression


@dataclass(frozen=True, slots=True)
class Conditional(Expression):
    test: Expression
    then: Expression
    orelse: Expression


@dataclass(frozen=True, slots=True)
class Call(Expression):
    function: str
    arguments: tuple[Expression, ...]


@dataclass(frozen=True, slots=True)
class Bind(Expression):
    """Local bindings: let v1:T1 = e1; ...; body."""

    locals: tuple[tuple[str, TypeExpr, Expression], ...]
    body: Expression


@dataclass(frozen=True, slots=True)
class TupleConstruct(Expression):
    components: tuple[Expression, ...]


@dataclass(frozen=True, slots=True)
class TupleAccess(Expression):
    target: Expression
    index: int


@dataclass(frozen=True, slots=True)
class ProductConstruct(Expression):
    type: str
    fields: tuple[tuple[str, Expression], ...]


@dataclass(frozen=True, slots=True)
class ProductAccess(Expression):
    target: Expression
    field: str


@dataclass(frozen=True, slots=True)
class ProductUpdate(Expression):
    target: Expression
    fields: tuple[tuple[str, Expression], ...]


@dataclass(frozen=True, slots=True)
class SumConstruct(Expression):
    type: str
    alternative: str
    fields: tuple[tuple[str, Expression], ...]


@dataclass(frozen=True, slots=True)
class SumTest(Expression):
    target: Expression
    alternative: str


@dataclass(frozen=True, slots=True)
class SumAccess(Expression):
    target: Expression
    alternative: str
    field: str


@dataclass(frozen=True, slots=True)
class Quantified(Expression):
    """forall/exists expression; legal only as a whole function/spec body."""

    quantifier: str  # "forall" | "exists"
    bound: tuple[tuple[str, TypeExpr], ...]
    matrix: Expression


# ------------------------------------------------------------- declarations


@dataclass(frozen=True, slots=True)
class FunctionHeader:
    name: str
    inputs: tuple[tuple[str, TypeExpr], ...]
    outputs: tuple[tuple[str, TypeExpr], ...]


@dataclass(frozen=True, slots=True)
class FunctionDefinition:
    header: FunctionHeader
    precondition: Optional[Expression]
    postcondition: Optional[Expression]
    body: Expression  # Quantified node => quantified definition

    @property
    def name(self) -> str:
        return self.header.name

    @property
    def is_quantified(self) -> bool:
        return isinstance(self.body, Quantified)


@dataclass(frozen=True, slots=True)
class ProductBody:
    fields: tuple[tuple[str, TypeExpr], ...]
    invariant: Optional[Expression]


@dataclass(frozen=True, slots=True)
class SumBody:
    alternatives: tuple[tuple[str, tuple[tuple[str, TypeExpr], ...]], ...]


@dataclass(frozen=True, slots=True)
class SubtypeBody:
    supertype: TypeExpr
    variable: str
    restriction: Expression
    witness: Optional[Expression]


@dataclass(frozen=True, slots=True)
class TypeDefinition:
    name: str
    body: Union[ProductBody, SumBody, SubtypeBody]


# ------------------------------------------------------------------ toplevel


@dataclass(frozen=True, slots=True)
class TopLevel:
    """Base class for top-level units. Abstract."""


@dataclass(frozen=True, slots=True)
class TypeUnit(TopLevel):
    definition: TypeDefinition

    @property
    def name(self) -> str:
        return self.definition.name


@dataclass(frozen=True, slots=True)
class TypeCliqueUnit(TopLevel):
    definitions: tuple[TypeDefinition, ...]


@dataclass(frozen=True, slots=True)
class FunctionUnit(TopLevel):
    definition: FunctionDefinition

    @property
    def name(self) -> str:
        return self.definition.name


@dataclass(frozen=True, slots=True)
class FunctionCliqueUnit(TopLevel):
    definitions: tuple[FunctionDefinition, ...]


@dataclass(frozen=True, slots=True)
class SpecificationUnit(TopLevel):
    name: str
    headers: tuple[FunctionHeader, ...]
    body_kind: str  # "plain" | "quantified" | "io-relation"
    body: Expression


@dataclass(frozen=True, slots=True)
class TheoremUnit(TopLevel):
    name: str
    variables: tuple[tuple[str, TypeExpr], ...]
    formula: Expression


@dataclass(frozen=True, slots=True)
class TransformUnit(TopLevel):
    new_name: str
    target: str
    transform_name: str
    options: tuple[tuple[str, Expression], ...]


def unit_name(u: TopLevel) -> str:
    match u:
        case TypeUnit(d):
            return d.name
        case FunctionUnit(d):
            return d.name
        case TypeCliqueUnit(ds):
            return "+".join(d.name for d in ds)
        case FunctionCliqueUnit(ds):
            return "+".join(d.name for d in ds)
        case SpecificationUnit(name=n):
            return n
        case TheoremUnit(name=n):
            return n
        case TransformUnit(new_name=n):
            return n
    raise TypeError(f"not a toplevel: {u!r}")


# ----------------------------------------------------------- alpha-equality


def alpha_equal_expr(a: Expression, b: Expression,
                     ren: dict[str, str], ner: dict[str, str]) -> bool:
    """Structural equality with a bijective renaming of bound variables."""
    if type(a) is not type(b):
        return False
    match a, b:
        case Literal(), Literal():
            return a == b
        case Var(x), Var(y):
            if x in ren or y in ner:
                return ren.get(x) == y and ner.get(y) == x
            return x == y
        case Unary(op1, e1), Unary(op2, e2):
            return op1 == op2 and alpha_equal_expr(e1, e2, ren, ner)
        case Binary(op1, l1, r1), Binary(op2, l2, r2):
            return (op1 == op2 and alpha_equal_expr(l1, l2, ren, ner)
                    and alpha_equal_expr(r1, r2, ren, ner))
        case Conditional(t1, a1, b1), Conditional(t2, a2, b2):
            return (alpha_equal_expr(t1, t2, ren, ner)
                    and alpha_equal_expr(a1, a2, ren, ner)
                    and alpha_equal_expr(b1, b2, ren, ner))
        case Call(f1, args1), Call(f2, args2):
            return (f1 == f2 and len(args1) == len(args2)
                    and all(alpha_equal_expr(x, y, ren, ner)
                            for x, y in zip(args1, args2)))
        case Bind(locals1, body1), Bind(locals2, body2):
            if len(locals1) != len(locals2):
                return False
            ren2, ner2 = dict(ren), dict(ner)
            for (n1, t1, e1), (n2, t2, e2) in zip(locals1, locals2):
                if t1 != t2 or not alpha_equal_expr(e1, e2, ren2, ner2):
                    return False
                ren2[n1] = n2
                ner2[n2] = n1
            return alpha_equal_expr(body1, body2, ren2, ner2)
        case TupleConstruct(c1), TupleConstruct(c2):
            return (len(c1) == len(c2)
                    and all(alpha_equal_expr(x, y, ren, ner)
                            for x, y in zip(c1, c2)))
        case TupleAccess(t1, i1), TupleAccess(t2, i2):
            return i1 == i2 and alpha_equal_expr(t1, t2, ren, ner)
        case ProductConstruct(ty1, f1), ProductConstruct(ty2, f2):
            return (ty1 == ty2 and len(f1) == len(f2)
                    and all(n1 == n2 and alpha_equal_expr(x, y, ren, ner)
                            for (n1, x), (n2, y) in zip(f1, f2)))
        case ProductAccess(t1, f1), ProductAccess(t2, f2):
            return f1 == f2 and alpha_equal_expr(t1, t2, ren, ner)
        case ProductUpdate(t1, f1), ProductUpdate(t2, f2):
            return (alpha_equal_expr(t1, t2, ren, ner) and len(f1) == len(f2)
                    and all(n1 == n2 and alpha_equal_expr(x, y, ren, ner)
                            for (n1, x), (n2, y) in zip(f1, f2)))
        case SumConstruct(ty1, a1, f1), SumConstruct(ty2, a2, f2):
            return (ty1 == ty2 and a1 == a2 and len(f1) == len(f2)
                    and all(n1 == n2 and alpha_equal_expr(x, y, ren, ner)
                            for (n1, x), (n2, y) in zip(f1, f2)))
        case SumTest(t1, a1), SumTest(t2, a2):
            return a1 == a2 and alpha_equal_expr(t1, t2, ren, ner)
        case SumAccess(t1, a1, f1), SumAccess(t2, a2, f2):
            return (a1 == a2 and f1 == f2
                    and alpha_equal_expr(t1, t2, ren, ner))
        case Quantified(q1, b1, m1), Quantified(q2, b2, m2):
            if q1 != q2 or len(b1) != len(b2):
                return False
            ren2, ner2 = dict(ren), dict(ner)
            for (n1, t1), (n2, t2) in zip(b1, b2):
                if t1 != t2:
                    return False
                ren2[n1] = n2
                ner2[n2] = n1
            return alpha_equal_expr(m1, m2, ren2, ner2)
    return False


def _alpha_equal_fn(a: FunctionDefinition, b: FunctionDefinition) -> bool:
    if a.name != b.name:
        return False
    ha, hb = a.header, b.header
    if len(ha.inputs) != len(hb.inputs) or len(ha.outputs) != len(hb.outputs):
        return False
    ren: dict[str, str] = {}
    ner: dict[str, str] = {}
    for (n1, t1), (n2, t2) in zip(ha.inputs + ha.outputs,
                                  hb.inputs + hb.outputs):
        if t1 != t2:
            return False
        ren[n1] = n2
        ner[n2] = n1

    def opt_eq(x: Optional[Expression], y: Optional[Expression]) -> bool:
        if (x is None) != (y is None):
            return False
        return x is None or alpha_equal_expr(x, y, ren, ner)

    return (opt_eq(a.precondition, b.precondition)
            and opt_eq(a.postcondition, b.postcondition)
            and alpha_equal_expr(a.body, b.body, ren, ner))


def _alpha_equal_typedef(a: TypeDefinition, b: TypeDefinition) -> bool:
    if a.name != b.name or type(a.body) is not type(b.body):
        return False
    match a.body, b.body:
        case ProductBody(f1, inv1), ProductBody(f2, inv2):
            if f1 != f2 or (inv1 is None) != (inv2 is None):
                return False
            if inv1 is None:
                return True
            # field names are free in the invariant, not renameable
            return alpha_equal_expr(inv1, inv2, {}, {})
        case SumBody(a1), SumBody(a2):
            return a1 == a2
        case SubtypeBody(s1, v1, r1, w1), SubtypeBody(s2, v2, r2, w2):
            if s1 != s2:
                return False
            ren, ner = {v1: v2}, {v2: v1}
            if not alpha_equal_expr(r1, r2, ren, ner):
                return False
            if (w1 is None) != (w2 is None):
                return False
            return w1 is None or alpha_equal_expr(w1, w2, {}, {})
    return False


def alpha_equal(a: TopLevel, b: TopLevel) -> bool:
    """True iff a and b are identical up to consistent renaming of bound
    variables (parameters, locals, quantifier variables). Top-level names,
    field names and alternative names are significant."""
    if type(a) is not type(b):
        return False
    match a, b:
        case TypeUnit(d1), TypeUnit(d2):
            return _alpha_equal_typedef(d1, d2)
        case TypeCliqueUnit(ds1), TypeCliqueUnit(ds2):
            return (len(ds1) == len(ds2)
                    and all(_alpha_equal_typedef(x, y)
                            for x, y in zip(ds1, ds2)))
        case FunctionUnit(d1), FunctionUnit(d2):
            return _alpha_equal_fn(d1, d2)
        case FunctionCliqueUnit(ds1), FunctionCliqueUnit(ds2):
            return (len(ds1) == len(ds2)
                    and all(_alpha_equal_fn(x, y) for x, y in zip(ds1, ds2)))
        case SpecificationUnit(n1, h1, k1, b1), SpecificationUnit(n2, h2, k2, b2):
            if n1 != n2 or k1 != k2 or len(h1) != len(h2):
                return False
            ren: dict[str, str] = {}
            ner: dict[str, str] = {}
            for x, y in zip(h1, h2):
                if x.name != y.name:
                    return False
                if len(x.inputs) != len(y.inputs) or len(x.outputs) != len(y.outputs):
                    return False
                for (m1, t1), (m2, t2) in zip(x.inputs + x.outputs,
                                              y.inputs + y.outputs):
                    if t1 != t2:
                        return False
                    ren[m1] = m2
                    ner[m2] = m1
            return alpha_equal_expr(b1, b2, ren, ner)
        case TheoremUnit(n1, v1, f1), TheoremUnit(n2, v2, f2):
            if n1 != n2 or len(v1) != len(v2):
                return False
            ren, ner = {}, {}
            for (m1, t1), (m2, t2) in zip(v1, v2):
                if t1 != t2:
                    return False
                ren[m1] = m2
                ner[m2] = m1
            return alpha_equal_expr(f1, f2, ren, ner)
        case TransformUnit(), TransformUnit():
            return a == b
    return False


# --------------------------------------------------------------- free names


def free_vars(e: Expression) -> set[str]:
    """Free variable names of an expression."""
    match e:
        case Literal():
            return set()
        case Var(x):
            return {x}
        case Unary(_, a):
            return free_vars(a)
        case Binary(_, l, r):
            return free_vars(l) | free_vars(r)
        case Conditional(t, a, b):
            return free_vars(t) | free_vars(a) | free_vars(b)
        case Call(_, args):
            return set().union(*[free_vars(a) for a in args]) if args else set()
        case Bind(locals_, body):
            out: set[str] = set()
            bound: set[str] = set()
            for name, _, init in locals_:
                out |= free_vars(init) - bound
                bound.add(name)
            return out | (free_vars(body) - bound)
        case TupleConstruct(cs):
            return set().union(*[free_vars(c) for c in cs]) if cs else set()
        case TupleAccess(t, _):
            return free_vars(t)
        case ProductConstruct(_, fs) | SumConstruct(_, _, fs):
            return set().union(*[free_vars(x) for _, x in fs]) if fs else set()
        case ProductAccess(t, _) | SumTest(t, _) | SumAccess(t, _, _):
            return free_vars(t)
        case ProductUpdate(t, fs):
            out = free_vars(t)
            for _, x in fs:
                out |= free_vars(x)
            return out
        case Quantified(_, bound, matrix):
            return free_vars(matrix) - {n for n, _ in bound}
    raise TypeError(f"not an expression: {e!r}")


def called_functions(e: Expression) -> set[str]:
    """Names of all functions called anywhere inside an expression."""
    out: set[str] = set()

    def walk(x: Expression) -> None:
        match x:
            case Call(f, args):
                out.add(f)
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
