"""Seeded random AST generator: well-formed surface trees covering every
node kind (not necessarily well-typed). Bind appears only in statement
position and quantifiers only as whole bodies, mirroring the grammar."""

import random

from syntheto.ast import (
    BOOL, CHAR, INT, STRING, Bind, Binary, Call, Conditional, Expression,
    FunctionCliqueUnit, FunctionDefinition, FunctionHeader, FunctionUnit,
    Literal, MapType, NamedType, OptionType, ProductAccess, ProductBody,
    ProductConstruct, ProductUpdate, Quantified, SeqType, SetType,
    SpecificationUnit, SubtypeBody, SumAccess, SumBody, SumConstruct,
    SumTest, TheoremUnit, TopLevel, TransformUnit, TupleAccess,
    TupleConstruct, TupleType, TypeCliqueUnit, TypeDefinition, TypeUnit,
    Unary, Var, BINARY_OPS,
)

_NAMES = ["alpha", "beta", "gamma", "delta", "width", "height", "item",
          "acc", "left", "right", "node_value", "x0", "y1", "_tmp"]
_STRINGS = ["", "hello", "a b c", "line"]


def _name(rng):
    return rng.choice(_NAMES)


def gen_type(rng: random.Random, depth: int = 2):
    if depth <= 0:
        return rng.choice([BOOL, CHAR, INT, STRING, NamedType(_name(rng))])
    match rng.randrange(10):
        case 0:
            return BOOL
        case 1:
            return CHAR
        case 2:
            return STRING
        case 3:
            return INT
        case 4:
            return NamedType(_name(rng))
        case 5:
            return OptionType(gen_type(rng, depth - 1))
        case 6:
            return SetType(gen_type(rng, depth - 1))
        case 7:
            return SeqType(gen_type(rng, depth - 1))
        case 8:
            return MapType(gen_type(rng, depth - 1), gen_type(rng, depth - 1))
        case _:
            return TupleType((gen_type(rng, depth - 1),
                              gen_type(rng, depth - 1)))


def gen_expr(rng: random.Random, depth: int = 3) -> Expression:
    if depth <= 0:
        match rng.randrange(5):
            case 0:
                return Literal(rng.random() < 0.5, "bool")
            case 1:
                return Literal(rng.randrange(-40, 40), "int")
            case 2:
                return Literal(chr(rng.randrange(32, 127)), "char")
            case 3:
                return Literal(rng.choice(_STRINGS), "string")
            case _:
                return Var(_name(rng))
    match rng.randrange(14):
        case 0:
            return Unary(rng.choice(["!", "-"]), gen_expr(rng, depth - 1))
        case 1:
            return Binary(rng.choice(BINARY_OPS), gen_expr(rng, depth - 1),
                          gen_expr(rng, depth - 1))
        case 2:
            return Conditional(gen_expr(rng, depth - 1),
                               gen_expr(rng, depth - 1),
                               gen_expr(rng, depth - 1))
        case 3:
            return Call(_name(rng), tuple(
                gen_expr(rng, depth - 1)
                for _ in range(rng.randrange(0, 3))))
        case 4:
            return TupleConstruct((gen_expr(rng, depth - 1),
                                   gen_expr(rng, depth - 1)))
        case 5:
            return TupleAccess(gen_expr(rng, depth - 1), rng.randrange(2))
        case 6:
            return ProductConstruct(_name(rng), (
                ("f1", gen_expr(rng, depth - 1)),
                ("f2", gen_expr(rng, depth - 1))))
        case 7:
            return ProductAccess(gen_expr(rng, depth - 1), _name(rng))
        case 8:
            return ProductUpdate(gen_expr(rng, depth - 1),
                                 (("f1", gen_expr(rng, depth - 1)),))
        case 9:
            return SumConstruct(_name(rng), _name(rng),
                                (("f1", gen_expr(rng, depth - 1)),))
        case 10:
            return SumTest(gen_expr(rng, depth - 1), _name(rng))
        case 11:
            return SumAccess(gen_expr(rng, depth - 1), _name(rng), _name(rng))
        case _:
            return gen_expr(rng, 0)


def gen_body(rng: random.Random) -> Expression:
    """Statement-position expression: optional lets, conditional spine."""
    body: Expression = gen_expr(rng, 2)
    if rng.random() < 0.4:
        body = Conditional(gen_expr(rng, 1), gen_body(rng), gen_body(rng)) \
            if rng.random() < 0.5 else body
    if rng.random() < 0.5:
        locals_ = tuple(
            (f"v{i}", gen_type(rng, 1), gen_expr(rng, 1))
            for i in range(rng.randrange(1, 3)))
        body = Bind(locals_, body)
    return body


def gen_header(rng: random.Random, name=None) -> FunctionHeader:
    inputs = tuple((f"in{i}", gen_type(rng, 1))
                   for i in range(rng.randrange(0, 3)))
    outputs = tuple((f"out{i}", gen_type(rng, 1))
                    for i in range(rng.randrange(1, 3)))
    return FunctionHeader(name or _name(rng), inputs, outputs)


def gen_function(rng: random.Random) -> FunctionDefinition:
    header = gen_header(rng)
    pre = gen_expr(rng, 1) if rng.random() < 0.5 else None
    post = gen_expr(rng, 1) if rng.random() < 0.5 else None
    if rng.random() < 0.2:
        body: Expression = Quantified(
            rng.choice(["forall", "exists"]),
            (("q0", gen_type(rng, 1)),), gen_expr(rng, 2))
    else:
        body = gen_body(rng)
    return FunctionDefinition(header, pre, post, body)


def gen_typedef(rng: random.Random) -> TypeDefinition:
    name = _name(rng)
    match rng.randrange(3):
        case 0:
            fields = tuple((f"f{i}", gen_type(rng, 1))
                           for i in range(rng.randrange(1, 4)))
            inv = gen_expr(rng, 1) if rng.random() < 0.4 else None
            return TypeDefinition(name, ProductBody(fields, inv))
        case 1:
            alts = tuple(
                (f"alt{i}", tuple((f"f{j}", gen_type(rng, 1))
                                  for j in range(rng.randrange(0, 3))))
                for i in range(rng.randrange(1, 4)))
            return TypeDefinition(name, SumBody(alts))
        case _:
            witness = gen_expr(rng, 1) if rng.random() < 0.5 else None
            return TypeDefinition(name, SubtypeBody(
                gen_type(rng, 1), "v", gen_expr(rng, 1), witness))


def gen_toplevel(rng: random.Random) -> TopLevel:
    match rng.randrange(7):
        case 0:
            return TypeUnit(gen_typedef(rng))
        case 1:
            return TypeCliqueUnit(tuple(
                gen_typedef(rng) for _ in range(rng.randrange(1, 3))))
        case 2:
            return FunctionUnit(gen_function(rng))
        case 3:
            return FunctionCliqueUnit(tuple(
                gen_function(rng) for _ in range(rng.randrange(1, 3))))
        case 4:
            headers = tuple(gen_header(rng, name=f"fv{i}")
                            for i in range(rng.randrange(1, 3)))
            kind = rng.choice(["plain", "quantified", "io-relation"])
            if kind == "quantified":
                body: Expression = Quantified(
                    "forall", (("q0", INT),), gen_expr(rng, 2))
            else:
                body = gen_expr(rng, 2)
            return SpecificationUnit(_name(rng), headers, kind, body)
        case 5:
            return TheoremUnit(_name(rng), tuple(
                (f"t{i}", gen_type(rng, 1))
                for i in range(rng.randrange(0, 3))), gen_expr(rng, 2))
        case _:
            options = tuple(
                (f"opt{i}", gen_expr(rng, 1))
                for i in range(rng.randrange(0, 3)))
            return TransformUnit(_name(rng), _name(rng),
                                 rng.choice(["simplify", "tail_recursion"]),
                                 options)


def generate_toplevels(count: int, seed: int = 2024) -> list[TopLevel]:
    rng = random.Random(seed)
    return [gen_toplevel(rng) for _ in range(count)]
