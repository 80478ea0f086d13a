"""The S-expression transfer language.

Wire payloads are constructor trees ("make-myself" forms): interpreting one
rebuilds the AST value it encodes. Symbols are restricted to uppercase
letters, digits, periods, colons, hyphens and brackets; surface-language
names always travel as strings. Characters serialize as (CODE-CHAR n);
T, NIL, LIST, CODE-CHAR print bare; keywords as :NAME; anything else as
PACKAGE::NAME. Serialization is byte-deterministic with single spaces.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import ast
from .ast import (
    BOOL, CHAR, INT, STRING, Bind, Binary, BoolType, Call, CharType,
    Conditional, Expression, FunctionCliqueUnit, FunctionDefinition,
    FunctionHeader, FunctionUnit, IntType, Literal, MapType, NamedType,
    OptionType, ProductAccess, ProductBody, ProductConstruct, ProductUpdate,
    Quantified, SeqType, SetType, SpecificationUnit, StringType, SubtypeBody,
    SumAccess, SumBody, SumConstruct, SumTest, TheoremUnit, TopLevel,
    TransformUnit, TupleAccess, TupleConstruct, TupleType, TypeCliqueUnit,
    TypeDefinition, TypeExpr, TypeUnit, Unary, Var,
)
from .lexer import SynthetoError


class TransferError(SynthetoError):
    pass


# ------------------------------------------------------------------- model


@dataclass(frozen=True, slots=True)
class SExpr:
    """Base class for S-expressions. Abstract."""


@dataclass(frozen=True, slots=True)
class SList(SExpr):
    items: tuple[SExpr, ...]


@dataclass(frozen=True, slots=True)
class SSym(SExpr):
    package: str
    name: str


@dataclass(frozen=True, slots=True)
class SKey(SExpr):
    name: str


@dataclass(frozen=True, slots=True)
class SStr(SExpr):
    value: str


@dataclass(frozen=True, slots=True)
class SInt(SExpr):
    value: int


@dataclass(frozen=True, slots=True)
class SChar(SExpr):
    value: str  # one char, code <= 255


SPECIAL_SYMBOLS = ("T", "NIL", "LIST", "CODE-CHAR")
_SYMBOL_CHARS = frozenset(
    "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789.:-[]")


def sym(name: str, package: str = "SYNTHETO") -> SSym:
    return SSym(package, name)


def slist(*items: SExpr) -> SList:
    return SList(tuple(items))


# --------------------------------------------------------------- serialize


def _check_symbol(name: str) -> None:
    if not name or any(c not in _SYMBOL_CHARS for c in name):
        raise TransferError(f"symbol {name!r} outside the allowed characters")


def serialize(s: SExpr) -> str:
    """Canonical text: single spaces, no line breaks."""
    match s:
        case SList(items):
            return "(" + " ".join(serialize(x) for x in items) + ")"
        case SSym(package, name):
            _check_symbol(name)
            if name in SPECIAL_SYMBOLS and package == "COMMON-LISP":
                return name
            _check_symbol(package)
            return f"{package}::{name}"
        case SKey(name):
            _check_symbol(name)
            return f":{name}"
        case SStr(value):
            if '"' in value or "\\" in value:
                raise TransferError(
                    "the transfer language has no string escapes")
            return f'"{value}"'
        case SInt(value):
            return str(value)
        case SChar(value):
            return f"(CODE-CHAR {ord(value)})"
    raise TypeError(f"not an s-expression: {s!r}")


_SPECIAL = {name: SSym("COMMON-LISP", name) for name in SPECIAL_SYMBOLS}
TRUE_SYM = _SPECIAL["T"]
NIL = _SPECIAL["NIL"]
LIST_SYM = _SPECIAL["LIST"]


# ------------------------------------------------------------------- parse


def parse_sexpr(text: str) -> SExpr:
    """Parse one S-expression; rejects reader macros and backquote."""
    items, i = _parse_many(text, 0)
    i = _skip_ws(text, i)
    if i != len(text):
        raise TransferError(f"trailing input at offset {i}")
    if len(items) != 1:
        raise TransferError(f"expected one form, found {len(items)}")
    return items[0]


_FORBIDDEN = "`',#;|\\"


def _skip_ws(text: str, i: int) -> int:
    while i < len(text) and text[i] in " \t\r\n":
        i += 1
    return i


def _parse_many(text: str, i: int) -> tuple[list[SExpr], int]:
    out: list[SExpr] = []
    while True:
        i = _skip_ws(text, i)
        if i >= len(text) or text[i] == ")":
            return out, i
        e, i = _parse_one(text, i)
        out.append(e)


def _parse_one(text: str, i: int) -> tuple[SExpr, int]:
    c = text[i]
    if c in _FORBIDDEN:
        raise TransferError(f"forbidden syntax {c!r} at offset {i}")
    if c == "(":
        items, i = _parse_many(text, i + 1)
        if i >= len(text) or text[i] != ")":
            raise TransferError("unbalanced parentheses")
        i += 1
        # (CODE-CHAR n) reads back as a character atom
        match items:
            case [SSym("COMMON-LISP", "CODE-CHAR"), SInt(n)]:
                if not (0 <= n <= 255):
                    raise TransferError(f"character code {n} out of range")
                return SChar(chr(n)), i
        return SList(tuple(items)), i
    if c == '"':
        j = text.find('"', i + 1)
        if j < 0:
            raise TransferError("unterminated string")
        body = text[i + 1:j]
        if any(ch in _FORBIDDEN and ch != ";" for ch in body) and "\\" in body:
            raise TransferError("the transfer language has no string escapes")
        return SStr(body), j + 1
    if c == ":":
        j = i + 1
        while j < len(text) and text[j] in _SYMBOL_CHARS:
            j += 1
        name = text[i + 1:j]
        if not name:
            raise TransferError(f"bad keyword at offset {i}")
        return SKey(name), j
    j = i
    while j < len(text) and text[j] not in " \t\r\n()\"":
        if text[j] in _FORBIDDEN:
            raise TransferError(f"forbidden syntax {text[j]!r} at offset {j}")
        j += 1
    token = text[i:j]
    if token.lstrip("-").isdigit() and token.lstrip("-"):
        return SInt(int(token)), j
    if "::" in token:
        package, name = token.split("::", 1)
        _check_symbol(package)
        _check_symbol(name)
        return SSym(package, name), j
    _check_symbol(token)
    if token in SPECIAL_SYMBOLS:
        return _SPECIAL[token], j
    # unqualified symbols live in the workbench home package
    return SSym("SYNTHETO", token), j


# ------------------------------------------------- make-myself construction
#
# The codec is table-driven: one row per AST constructor, mapping keywords
# to typed fields. Rows are consulted both to encode and to decode, which
# keeps the two directions structurally identical.

_E = "expr"
_T = "type"
_I = "ident"


def _enc_ident(name: str) -> SExpr:
    return slist(sym("MAKE-IDENTIFIER"), SKey("NAME"), SStr(name))


def _enc_opt(e: Optional[SExpr]) -> SExpr:
    return NIL if e is None else e


def _enc_list(items) -> SExpr:
    return SList((LIST_SYM,) + tuple(items))


def _enc_typed_vars(pairs) -> SExpr:
    return _enc_list(
        slist(sym("MAKE-TYPED-VARIABLE"), SKey("NAME"), _enc_ident(n),
              SKey("TYPE"), encode_type(t))
        for n, t in pairs)


_BINOP_NAMES = {
    "==": "EQ", "!=": "NE", "<": "LT", "<=": "LE", ">": "GT", ">=": "GE",
    "+": "ADD", "-": "SUB", "*": "MUL", "/": "DIV", "%": "REM",
    "&&": "AND", "||": "OR", "==>": "IMPLIES", "<==": "IMPLIED",
    "<==>": "IFF",
}
_BINOP_BACK = {v: k for k, v in _BINOP_NAMES.items()}


def encode_type(t: TypeExpr) -> SExpr:
    match t:
        case BoolType():
            return slist(sym("MAKE-TYPE-BOOLEAN"))
        case CharType():
            return slist(sym("MAKE-TYPE-CHARACTER"))
        case StringType():
            return slist(sym("MAKE-TYPE-STRING"))
        case IntType():
            return slist(sym("MAKE-TYPE-INTEGER"))
        case NamedType(name):
            return slist(sym("MAKE-TYPE-DEFINED"), SKey("NAME"),
                         _enc_ident(name))
        case OptionType(e):
            return slist(sym("MAKE-TYPE-OPTION"), SKey("ELEMENT"),
                         encode_type(e))
        case SetType(e):
            return slist(sym("MAKE-TYPE-SET"), SKey("ELEMENT"),
                         encode_type(e))
        case SeqType(e):
            return slist(sym("MAKE-TYPE-SEQUENCE"), SKey("ELEMENT"),
                         encode_type(e))
        case MapType(d, r):
            return slist(sym("MAKE-TYPE-MAP"), SKey("DOMAIN"), encode_type(d),
                         SKey("RANGE"), encode_type(r))
        case TupleType(cs):
            return slist(sym("MAKE-TYPE-TUPLE"), SKey("COMPONENTS"),
                         _enc_list(encode_type(c) for c in cs))
    raise TransferError(f"cannot encode type {t!r}")


def encode_expr(e: Expression) -> SExpr:
    match e:
        case Literal(value, kind):
            if kind == "bool":
                lit = slist(sym("MAKE-LITERAL-BOOLEAN"), SKey("VALUE"),
                            TRUE_SYM if value else NIL)
            elif kind == "int":
                lit = slist(sym("MAKE-LITERAL-INTEGER"), SKey("VALUE"),
                            SInt(value))
            elif kind == "char":
                lit = slist(sym("MAKE-LITERAL-CHARACTER"), SKey("VALUE"),
                            SChar(value))
            else:
                lit = slist(sym("MAKE-LITERAL-STRING"), SKey("VALUE"),
                            SStr(value))
            return slist(sym("MAKE-EXPRESSION-LITERAL"), SKey("GET"), lit)
        case Var(name):
            return slist(sym("MAKE-EXPRESSION-VARIABLE"), SKey("NAME"),
                         _enc_ident(name))
        case Unary(op, operand):
            op_name = "NOT" if op == "!" else "MINUS"
            return slist(sym("MAKE-EXPRESSION-UNARY"),
                         SKey("OPERATOR"), slist(sym(f"MAKE-UNARY-OP-{op_name}")),
                         SKey("OPERAND"), encode_expr(operand))
        case Binary(op, left, right):
            return slist(sym("MAKE-EXPRESSION-BINARY"),
                         SKey("OPERATOR"),
                         slist(sym(f"MAKE-BINARY-OP-{_BINOP_NAMES[op]}")),
                         SKey("LEFT-OPERAND"), encode_expr(left),
                         SKey("RIGHT-OPERAND"), encode_expr(right))
        case Conditional(test, then, orelse):
            return slist(sym("MAKE-EXPRESSION-IF"),
                         SKey("TEST"), encode_expr(test),
                         SKey("THEN"), encode_expr(then),
                         SKey("ELSE"), encode_expr(orelse))
        case Call(fn, args):
            return slist(sym("MAKE-EXPRESSION-CALL"),
                         SKey("FUNCTION"), _enc_ident(fn),
                         SKey("ARGUMENTS"),
                         _enc_list(encode_expr(a) for a in args))
        case Bind(locals_, body):
            bindings = _enc_list(
                slist(sym("MAKE-BINDING"),
                      SKey("VARIABLE"),
                      slist(sym("MAKE-TYPED-VARIABLE"), SKey("NAME"),
                            _enc_ident(n), SKey("TYPE"), encode_type(t)),
                      SKey("VALUE"), encode_expr(init))
                for n, t, init in locals_)
            return slist(sym("MAKE-EXPRESSION-BIND"),
                         SKey("BINDINGS"), bindings,
                         SKey("BODY"), encode_expr(body))
        case TupleConstruct(cs):
            return slist(sym("MAKE-EXPRESSION-TUPLE-CONSTRUCT"),
                         SKey("COMPONENTS"),
                         _enc_list(encode_expr(c) for c in cs))
        case TupleAccess(target, index):
            return slist(sym("MAKE-EXPRESSION-TUPLE-ACCESS"),
                         SKey("TARGET"), encode_expr(target),
                         SKey("INDEX"), SInt(index))
        case ProductConstruct(ty, fields):
            return slist(sym("MAKE-EXPRESSION-PRODUCT-CONSTRUCT"),
                         SKey("TYPE"), _enc_ident(ty),
                         SKey("FIELDS"), _enc_initializers(fields))
        case ProductAccess(target, fld):
            return slist(sym("MAKE-EXPRESSION-PRODUCT-ACCESS"),
                         SKey("TARGET"), encode_expr(target),
                         SKey("FIELD"), _enc_ident(fld))
        case ProductUpdate(target, fields):
            return slist(sym("MAKE-EXPRESSION-PRODUCT-UPDATE"),
                         SKey("TARGET"), encode_expr(target),
                         SKey("FIELDS"), _enc_initializers(fields))
        case SumConstruct(ty, alt, fields):
            return slist(sym("MAKE-EXPRESSION-SUM-CONSTRUCT"),
                         SKey("TYPE"), _enc_ident(ty),
                         SKey("ALTERNATIVE"), _enc_ident(alt),
                         SKey("FIELDS"), _enc_initializers(fields))
        case SumTest(target, alt):
            return slist(sym("MAKE-EXPRESSION-SUM-TEST"),
                         SKey("TARGET"), encode_expr(target),
                         SKey("ALTERNATIVE"), _enc_ident(alt))
        case SumAccess(target, alt, fld):
            return slist(sym("MAKE-EXPRESSION-SUM-ACCESS"),
                         SKey("TARGET"), encode_expr(target),
                         SKey("ALTERNATIVE"), _enc_ident(alt),
                         SKey("FIELD"), _enc_ident(fld))
        case Quantified(q, bound, matrix):
            return slist(sym("MAKE-EXPRESSION-QUANTIFIED"),
                         SKey("QUANTIFIER"),
                         slist(sym(f"MAKE-QUANTIFIER-{q.upper()}")),
                         SKey("VARIABLES"), _enc_typed_vars(bound),
                         SKey("MATRIX"), encode_expr(matrix))
    raise TransferError(f"cannot encode expression {e!r}")


def _enc_initializers(fields) -> SExpr:
    return _enc_list(
        slist(sym("MAKE-INITIALIZER"), SKey("FIELD"), _enc_ident(n),
              SKey("VALUE"), encode_expr(v))
        for n, v in fields)


def encode_type_definition(d: TypeDefinition) -> SExpr:
    match d.body:
        case ProductBody():
            definer = slist(sym("MAKE-TYPE-DEFINER-PRODUCT"), SKey("GET"),
                            _enc_product(d.body))
        case SumBody(alternatives):
            alts = _enc_list(
                slist(sym("MAKE-ALTERNATIVE"), SKey("NAME"), _enc_ident(n),
                      SKey("PRODUCT"),
                      _enc_product(ProductBody(fields, None)))
                for n, fields in alternatives)
            definer = slist(sym("MAKE-TYPE-DEFINER-SUM"), SKey("GET"),
                            slist(sym("MAKE-TYPE-SUM"),
                                  SKey("ALTERNATIVES"), alts))
        case SubtypeBody(supertype, variable, restriction, witness):
            definer = slist(
                sym("MAKE-TYPE-DEFINER-SUBSET"), SKey("GET"),
                slist(sym("MAKE-TYPE-SUBSET"),
                      SKey("SUPERTYPE"), encode_type(supertype),
                      SKey("VARIABLE"), _enc_ident(variable),
                      SKey("RESTRICTION"), encode_expr(restriction),
                      SKey("WITNESS"),
                      _enc_opt(encode_expr(witness)
                               if witness is not None else None)))
        case _:
            raise TransferError(f"cannot encode {d!r}")
    return slist(sym("MAKE-TYPE-DEFINITION"), SKey("NAME"),
                 _enc_ident(d.name), SKey("BODY"), definer)


def _enc_product(body: ProductBody) -> SExpr:
    fields = _enc_list(
        slist(sym("MAKE-FIELD"), SKey("NAME"), _enc_ident(n),
              SKey("TYPE"), encode_type(t))
        for n, t in body.fields)
    return slist(sym("MAKE-TYPE-PRODUCT"), SKey("FIELDS"), fields,
                 SKey("INVARIANT"),
                 _enc_opt(encode_expr(body.invariant)
                          if body.invariant is not None else None))


def encode_header(h: FunctionHeader) -> SExpr:
    return slist(sym("MAKE-FUNCTION-HEADER"), SKey("NAME"),
                 _enc_ident(h.name),
                 SKey("INPUTS"), _enc_typed_vars(h.inputs),
                 SKey("OUTPUTS"), _enc_typed_vars(h.outputs))


def encode_function_definition(d: FunctionDefinition) -> SExpr:
    if d.is_quantified:
        q: Quantified = d.body
        definer = slist(sym("MAKE-FUNCTION-DEFINER-QUANTIFIED"),
                        SKey("QUANTIFIER"),
                        slist(sym(f"MAKE-QUANTIFIER-{q.quantifier.upper()}")),
                        SKey("VARIABLES"), _enc_typed_vars(q.bound),
                        SKey("MATRIX"), encode_expr(q.matrix))
    else:
        definer = slist(sym("MAKE-FUNCTION-DEFINER-REGULAR"),
                        SKey("BODY"), encode_expr(d.body))
    return slist(sym("MAKE-FUNCTION-DEFINITION"),
                 SKey("HEADER"), encode_header(d.header),
                 SKey("PRECONDITION"),
                 _enc_opt(encode_expr(d.precondition)
                          if d.precondition is not None else None),
                 SKey("POSTCONDITION"),
                 _enc_opt(encode_expr(d.postcondition)
                          if d.postcondition is not None else None),
                 SKey("DEFINER"), definer)


def ast_to_transfer(u: TopLevel) -> SExpr:
    """Wrapped make-myself form for one top-level unit."""
    return slist(sym("PROCESS-SYNTHETO-TOPLEVEL"), encode_toplevel(u))


def encode_toplevel(u: TopLevel) -> SExpr:
    match u:
        case TypeUnit(d):
            return slist(sym("MAKE-TOPLEVEL-TYPE"), SKey("GET"),
                         encode_type_definition(d))
        case TypeCliqueUnit(defs):
            return slist(sym("MAKE-TOPLEVEL-TYPES"), SKey("GET"),
                         _enc_list(encode_type_definition(d) for d in defs))
        case FunctionUnit(d):
            return slist(sym("MAKE-TOPLEVEL-FUNCTION"), SKey("GET"),
                         encode_function_definition(d))
        case FunctionCliqueUnit(defs):
            return slist(sym("MAKE-TOPLEVEL-FUNCTIONS"), SKey("GET"),
                         _enc_list(encode_function_definition(d)
                                   for d in defs))
        case SpecificationUnit(name, headers, kind, body):
            kind_sym = {"plain": "PLAIN", "quantified": "QUANTIFIED",
                        "io-relation": "IO"}[kind]
            return slist(sym("MAKE-TOPLEVEL-SPECIFICATION"), SKey("GET"),
                         slist(sym("MAKE-SPECIFICATION"),
                               SKey("NAME"), _enc_ident(name),
                               SKey("FUNCTIONS"),
                               _enc_list(encode_header(h) for h in headers),
                               SKey("KIND"),
                               slist(sym(f"MAKE-SPEC-KIND-{kind_sym}")),
                               SKey("BODY"), encode_expr(body)))
        case TheoremUnit(name, variables, formula):
            return slist(sym("MAKE-TOPLEVEL-THEOREM"), SKey("GET"),
                         slist(sym("MAKE-THEOREM"),
                               SKey("NAME"), _enc_ident(name),
                               SKey("VARIABLES"), _enc_typed_vars(variables),
                               SKey("FORMULA"), encode_expr(formula)))
        case TransformUnit(new_name, target, transform_name, options):
            args = _enc_list(
                slist(sym("MAKE-TRANSFORM-ARGUMENT"),
                      SKey("NAME"), _enc_ident(n),
                      SKey("VALUE"), encode_expr(v))
                for n, v in options)
            return slist(sym("MAKE-TOPLEVEL-TRANSFORM"), SKey("GET"),
                         slist(sym("MAKE-TRANSFORM"),
                               SKey("NEW-FUNCTION-NAME"), _enc_ident(new_name),
                               SKey("OLD-FUNCTION-NAME"), _enc_ident(target),
                               SKey("TRANSFORM-NAME"), SStr(transform_name),
                               SKey("ARGUMENTS"), args))
    raise TransferError(f"cannot encode {u!r}")


# ---------------------------------------------------------------- decoding


def _fields(s: SExpr, head: str) -> dict[str, SExpr]:
    match s:
        case SList(items) if items and items[0] == sym(head):
            rest = items[1:]
            if len(rest) % 2 != 0:
                raise TransferError(f"odd keyword list in {head}")
            out = {}
            for k, v in zip(rest[::2], rest[1::2]):
                if not isinstance(k, SKey):
                    raise TransferError(f"expected keyword in {head}")
                out[k.name] = v
            return out
    raise TransferError(f"expected ({head} ...), got {s!r}")


def _head_of(s: SExpr) -> str:
    match s:
        case SList(items) if items and isinstance(items[0], SSym):
            return items[0].name
    raise TransferError(f"expected a constructor form, got {s!r}")


def _dec_ident(s: SExpr) -> str:
    f = _fields(s, "MAKE-IDENTIFIER")
    match f.get("NAME"):
        case SStr(v):
            return v
    raise TransferError("identifier name must be a string")


def _dec_list(s: SExpr) -> list[SExpr]:
    match s:
        case SList(items) if items and items[0] == LIST_SYM:
            return list(items[1:])
        case SSym("COMMON-LISP", "NIL"):
            return []
    raise TransferError(f"expected (LIST ...), got {s!r}")


def _dec_opt(s: SExpr, dec):
    if s == NIL:
        return None
    return dec(s)


def _dec_str(s: SExpr) -> str:
    match s:
        case SStr(v):
            return v
    raise TransferError(f"expected a string, got {s!r}")


def _dec_int(s: SExpr) -> int:
    match s:
        case SInt(v):
            return v
    raise TransferError(f"expected an integer, got {s!r}")


def _dec_typed_vars(s: SExpr) -> tuple:
    out = []
    for item in _dec_list(s):
        f = _fields(item, "MAKE-TYPED-VARIABLE")
        out.append((_dec_ident(f["NAME"]), decode_type(f["TYPE"])))
    return tuple(out)


def decode_type(s: SExpr) -> TypeExpr:
    head = _head_of(s)
    f = _fields(s, head)
    match head:
        case "MAKE-TYPE-BOOLEAN":
            return BOOL
        case "MAKE-TYPE-CHARACTER":
            return CHAR
        case "MAKE-TYPE-STRING":
            return STRING
        case "MAKE-TYPE-INTEGER":
            return INT
        case "MAKE-TYPE-DEFINED":
            return NamedType(_dec_ident(f["NAME"]))
        case "MAKE-TYPE-OPTION":
            return OptionType(decode_type(f["ELEMENT"]))
        case "MAKE-TYPE-SET":
            return SetType(decode_type(f["ELEMENT"]))
        case "MAKE-TYPE-SEQUENCE":
            return SeqType(decode_type(f["ELEMENT"]))
        case "MAKE-TYPE-MAP":
            return MapType(decode_type(f["DOMAIN"]), decode_type(f["RANGE"]))
        case "MAKE-TYPE-TUPLE":
            return TupleType(tuple(decode_type(c)
                                   for c in _dec_list(f["COMPONENTS"])))
    raise TransferError(f"unknown type constructor {head}")


def decode_expr(s: SExpr) -> Expression:
    head = _head_of(s)
    f = _fields(s, head)
    match head:
        case "MAKE-EXPRESSION-LITERAL":
            lit = f["GET"]
            lhead = _head_of(lit)
            lf = _fields(lit, lhead)
            match lhead:
                case "MAKE-LITERAL-BOOLEAN":
                    return Literal(lf["VALUE"] == TRUE_SYM, "bool")
                case "MAKE-LITERAL-INTEGER":
                    return Literal(_dec_int(lf["VALUE"]), "int")
                case "MAKE-LITERAL-CHARACTER":
                    match lf["VALUE"]:
                        case SChar(c):
                            return Literal(c, "char")
                    raise TransferError("bad character literal")
                case "MAKE-LITERAL-STRING":
                    return Literal(_dec_str(lf["VALUE"]), "string")
            raise TransferError(f"unknown literal {lhead}")
        case "MAKE-EXPRESSION-VARIABLE":
            return Var(_dec_ident(f["NAME"]))
        case "MAKE-EXPRESSION-UNARY":
            op_head = _head_of(f["OPERATOR"])
            op = "!" if op_head == "MAKE-UNARY-OP-NOT" else "-"
            return Unary(op, decode_expr(f["OPERAND"]))
        case "MAKE-EXPRESSION-BINARY":
            op_head = _head_of(f["OPERATOR"])
            if not op_head.startswith("MAKE-BINARY-OP-"):
                raise TransferError(f"unknown operator {op_head}")
            op = _BINOP_BACK.get(op_head[len("MAKE-BINARY-OP-"):])
            if op is None:
                raise TransferError(f"unknown operator {op_head}")
            return Binary(op, decode_expr(f["LEFT-OPERAND"]),
                          decode_expr(f["RIGHT-OPERAND"]))
        case "MAKE-EXPRESSION-IF":
            return Conditional(decode_expr(f["TEST"]),
                               decode_expr(f["THEN"]),
                               decode_expr(f["ELSE"]))
        case "MAKE-EXPRESSION-CALL":
            return Call(_dec_ident(f["FUNCTION"]),
                        tuple(decode_expr(a)
                              for a in _dec_list(f["ARGUMENTS"])))
        case "MAKE-EXPRESSION-BIND":
            locals_ = []
            for b in _dec_list(f["BINDINGS"]):
                bf = _fields(b, "MAKE-BINDING")
                tv = _fields(bf["VARIABLE"], "MAKE-TYPED-VARIABLE")
                locals_.append((_dec_ident(tv["NAME"]),
                                decode_type(tv["TYPE"]),
                                decode_expr(bf["VALUE"])))
            return Bind(tuple(locals_), decode_expr(f["BODY"]))
        case "MAKE-EXPRESSION-TUPLE-CONSTRUCT":
            return TupleConstruct(tuple(
                decode_expr(c) for c in _dec_list(f["COMPONENTS"])))
        case "MAKE-EXPRESSION-TUPLE-ACCESS":
            return TupleAccess(decode_expr(f["TARGET"]),
                               _dec_int(f["INDEX"]))
        case "MAKE-EXPRESSION-PRODUCT-CONSTRUCT":
            return ProductConstruct(_dec_ident(f["TYPE"]),
                                    _dec_initializers(f["FIELDS"]))
        case "MAKE-EXPRESSION-PRODUCT-ACCESS":
            return ProductAccess(decode_expr(f["TARGET"]),
                                 _dec_ident(f["FIELD"]))
        case "MAKE-EXPRESSION-PRODUCT-UPDATE":
            return ProductUpdate(decode_expr(f["TARGET"]),
                                 _dec_initializers(f["FIELDS"]))
        case "MAKE-EXPRESSION-SUM-CONSTRUCT":
            return SumConstruct(_dec_ident(f["TYPE"]),
                                _dec_ident(f["ALTERNATIVE"]),
                                _dec_initializers(f["FIELDS"]))
        case "MAKE-EXPRESSION-SUM-TEST":
            return SumTest(decode_expr(f["TARGET"]),
                           _dec_ident(f["ALTERNATIVE"]))
        case "MAKE-EXPRESSION-SUM-ACCESS":
            return SumAccess(decode_expr(f["TARGET"]),
                             _dec_ident(f["ALTERNATIVE"]),
                             _dec_ident(f["FIELD"]))
        case "MAKE-EXPRESSION-QUANTIFIED":
            q = ("forall" if _head_of(f["QUANTIFIER"]) ==
                 "MAKE-QUANTIFIER-FORALL" else "exists")
            return Quantified(q, _dec_typed_vars(f["VARIABLES"]),
                              decode_expr(f["MATRIX"]))
    raise TransferError(f"unknown expression constructor {head}")


def _dec_initializers(s: SExpr) -> tuple:
    out = []
    for item in _dec_list(s):
        f = _fields(item, "MAKE-INITIALIZER")
        out.append((_dec_ident(f["FIELD"]), decode_expr(f["VALUE"])))
    return tuple(out)


def decode_type_definition(s: SExpr) -> TypeDefinition:
    f = _fields(s, "MAKE-TYPE-DEFINITION")
    name = _dec_ident(f["NAME"])
    definer = f["BODY"]
    head = _head_of(definer)
    df = _fields(definer, head)
    match head:
        case "MAKE-TYPE-DEFINER-PRODUCT":
            return TypeDefinition(name, _dec_product(df["GET"]))
        case "MAKE-TYPE-DEFINER-SUM":
            sf = _fields(df["GET"], "MAKE-TYPE-SUM")
            alts = []
            for a in _dec_list(sf["ALTERNATIVES"]):
                af = _fields(a, "MAKE-ALTERNATIVE")
                product = _dec_product(af["PRODUCT"])
                alts.append((_dec_ident(af["NAME"]), product.fields))
            return TypeDefinition(name, SumBody(tuple(alts)))
        case "MAKE-TYPE-DEFINER-SUBSET":
            bf = _fields(df["GET"], "MAKE-TYPE-SUBSET")
            return TypeDefinition(name, SubtypeBody(
                decode_type(bf["SUPERTYPE"]),
                _dec_ident(bf["VARIABLE"]),
                decode_expr(bf["RESTRICTION"]),
                _dec_opt(bf["WITNESS"], decode_expr)))
    raise TransferError(f"unknown type definer {head}")


def _dec_product(s: SExpr) -> ProductBody:
    f = _fields(s, "MAKE-TYPE-PRODUCT")
    fields = []
    for item in _dec_list(f["FIELDS"]):
        ff = _fields(item, "MAKE-FIELD")
        fields.append((_dec_ident(ff["NAME"]), decode_type(ff["TYPE"])))
    return ProductBody(tuple(fields), _dec_opt(f["INVARIANT"], decode_expr))


def decode_header(s: SExpr) -> FunctionHeader:
    f = _fields(s, "MAKE-FUNCTION-HEADER")
    return FunctionHeader(_dec_ident(f["NAME"]),
                          _dec_typed_vars(f["INPUTS"]),
                          _dec_typed_vars(f["OUTPUTS"]))


def decode_function_definition(s: SExpr) -> FunctionDefinition:
    f = _fields(s, "MAKE-FUNCTION-DEFINITION")
    header = decode_header(f["HEADER"])
    pre = _dec_opt(f["PRECONDITION"], decode_expr)
    post = _dec_opt(f["POSTCONDITION"], decode_expr)
    definer = f["DEFINER"]
    head = _head_of(definer)
    df = _fields(definer, head)
    if head == "MAKE-FUNCTION-DEFINER-REGULAR":
        body = decode_expr(df["BODY"])
    elif head == "MAKE-FUNCTION-DEFINER-QUANTIFIED":
        q = ("forall" if _head_of(df["QUANTIFIER"]) ==
             "MAKE-QUANTIFIER-FORALL" else "exists")
        body = Quantified(q, _dec_typed_vars(df["VARIABLES"]),
                          decode_expr(df["MATRIX"]))
    else:
        raise TransferError(f"unknown function definer {head}")
    return FunctionDefinition(header, pre, post, body)


def transfer_to_ast(s: SExpr) -> TopLevel:
    """Inverse of ast_to_transfer; accepts wrapped or bare forms."""
    match s:
        case SList(items) if items and \
                items[0] == sym("PROCESS-SYNTHETO-TOPLEVEL"):
            if len(items) != 2:
                raise TransferError("bad PROCESS-SYNTHETO-TOPLEVEL arity")
            s = items[1]
    head = _head_of(s)
    f = _fields(s, head)
    match head:
        case "MAKE-TOPLEVEL-TYPE":
            return TypeUnit(decode_type_definition(f["GET"]))
        case "MAKE-TOPLEVEL-TYPES":
            return TypeCliqueUnit(tuple(
                decode_type_definition(d) for d in _dec_list(f["GET"])))
        case "MAKE-TOPLEVEL-FUNCTION":
            return FunctionUnit(decode_function_definition(f["GET"]))
        case "MAKE-TOPLEVEL-FUNCTIONS":
            return FunctionCliqueUnit(tuple(
                decode_function_definition(d) for d in _dec_list(f["GET"])))
        case "MAKE-TOPLEVEL-SPECIFICATION":
            sf = _fields(f["GET"], "MAKE-SPECIFICATION")
            kind = {"MAKE-SPEC-KIND-PLAIN": "plain",
                    "MAKE-SPEC-KIND-QUANTIFIED": "quantified",
                    "MAKE-SPEC-KIND-IO": "io-relation"}[_head_of(sf["KIND"])]
            return SpecificationUnit(
                _dec_ident(sf["NAME"]),
                tuple(decode_header(h) for h in _dec_list(sf["FUNCTIONS"])),
                kind, decode_expr(sf["BODY"]))
        case "MAKE-TOPLEVEL-THEOREM":
            tf = _fields(f["GET"], "MAKE-THEOREM")
            return TheoremUnit(_dec_ident(tf["NAME"]),
                               _dec_typed_vars(tf["VARIABLES"]),
                               decode_expr(tf["FORMULA"]))
        case "MAKE-TOPLEVEL-TRANSFORM":
            tf = _fields(f["GET"], "MAKE-TRANSFORM")
            options = []
            for a in _dec_list(tf["ARGUMENTS"]):
                af = _fields(a, "MAKE-TRANSFORM-ARGUMENT")
                options.append((_dec_ident(af["NAME"]),
                                decode_expr(af["VALUE"])))
            return TransformUnit(_dec_ident(tf["NEW-FUNCTION-NAME"]),
                                 _dec_ident(tf["OLD-FUNCTION-NAME"]),
                                 _dec_str(tf["TRANSFORM-NAME"]),
                                 tuple(options))
    raise TransferError(f"unknown toplevel constructor {head}")


# ---------------------------------------------------------------- outcomes


_OUTCOME_HEADS = {
    "type-success": "MAKE-OUTCOME-TYPE-SUCCESS",
    "function-success": "MAKE-OUTCOME-FUNCTION-SUCCESS",
    "specification-success": "MAKE-OUTCOME-SPECIFICATION-SUCCESS",
    "theorem-success": "MAKE-OUTCOME-THEOREM-SUCCESS",
    "transform-success": "MAKE-OUTCOME-TRANSFORMATION-SUCCESS",
    "failure": "MAKE-OUTCOME-FAILURE",
}
_OUTCOME_KINDS = {v: k for k, v in _OUTCOME_HEADS.items()}


def outcome_to_transfer(kind: str, message: str,
                        payload: tuple[TopLevel, ...] = ()) -> SExpr:
    head = _OUTCOME_HEADS.get(kind)
    if head is None:
        raise TransferError(f"unknown outcome kind {kind!r}")
    items: list[SExpr] = [sym(head), SKey("MESSAGE"), SStr(message)]
    if payload:
        items += [SKey("TOPLEVELS"),
                  _enc_list(encode_toplevel(u) for u in payload)]
    return SList(tuple(items))


def transfer_to_outcome(s: SExpr) -> tuple[str, str, tuple[TopLevel, ...]]:
    head = _head_of(s)
    kind = _OUTCOME_KINDS.get(head)
    if kind is None:
        raise TransferError(f"unknown outcome constructor {head}")
    f = _fields(s, head)
    message = _dec_str(f["MESSAGE"])
    payload: tuple[TopLevel, ...] = ()
    if "TOPLEVELS" in f:
        payload = tuple(transfer_to_ast(u) for u in _dec_list(f["TOPLEVELS"]))
    return kind, message, payload
