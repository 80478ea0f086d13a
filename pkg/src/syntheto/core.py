"""Prover-style core IR: first-order terms, defs, invertible naming.

Core names are flat strings. User names pass through unchanged; every type
gets a recognizer predicate whose name maps back to the type
(sequence[int]-p <-> seq<int>), and product/sum support functions follow
fixed make-/accessor/updater conventions. Hyphens never occur in surface
identifiers, so the conventions are unambiguous.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

from .ast import (
    BOOL, CHAR, INT, STRING, BoolType, CharType, IntType, MapType, NamedType,
    OptionType, SeqType, SetType, StringType, TupleType, TypeExpr,
)
from .lexer import SynthetoError
from .values import (
    Value, VBool, VChar, VInt, VSeq, VString, render,
)

# surface operator -> core operator name (and back)
OP_TO_CORE = {
    "+": "plus", "-": "minus", "*": "times", "/": "div", "%": "mod",
    "==": "equal", "!=": "noteq", "<": "lt", "<=": "le", ">": "gt",
    ">=": "ge", "&&": "and", "||": "or", "==>": "implies",
    "<==": "impliedby", "<==>": "iff",
}
CORE_TO_OP = {v: k for k, v in OP_TO_CORE.items()}

CORE_BUILTINS = {
    "length", "first", "rest", "is_empty", "member", "add", "remove",
    "get", "put", "keys", "abs", "gcd", "max", "min", "cons", "append",
    "seq", "some", "none",
}


class CoreError(SynthetoError):
    pass


class Untranslatable(CoreError):
    def __init__(self, message: str, term: object = None):
        self.term = term
        super().__init__(message)


# ----------------------------------------------------------------- terms


@dataclass(frozen=True, slots=True)
class CTerm:
    """Base class for core terms. Abstract."""


@dataclass(frozen=True, slots=True)
class CConst(CTerm):
    value: Value


@dataclass(frozen=True, slots=True)
class CVar(CTerm):
    name: str


@dataclass(frozen=True, slots=True)
class CApp(CTerm):
    fn: str
    args: tuple[CTerm, ...]


@dataclass(frozen=True, slots=True)
class CIf(CTerm):
    test: CTerm
    then: CTerm
    orelse: CTerm


@dataclass(frozen=True, slots=True)
class CLet(CTerm):
    bindings: tuple[tuple[str, CTerm], ...]
    body: CTerm


@dataclass(frozen=True, slots=True)
class CAssume(CTerm):
    """A formula taken as true by the logic, checkable at runtime."""

    formula: CTerm


CTRUE = CConst(VBool(True))
CFALSE = CConst(VBool(False))


def capp(fn: str, *args: CTerm) -> CApp:
    return CApp(fn, tuple(args))


def conj(terms: list[CTerm]) -> CTerm:
    """Right-nested conjunction; empty conjunction is true."""
    terms = [t for t in terms if t != CTRUE]
    if not terms:
        return CTRUE
    out = terms[-1]
    for t in reversed(terms[:-1]):
        out = capp("and", t, out)
    return out


def conjuncts(t: CTerm) -> list[CTerm]:
    match t:
        case CApp("and", args):
            out = []
            for a in args:
                out.extend(conjuncts(a))
            return out
        case CConst(VBool(True)):
            return []
    return [t]


def free_core_vars(t: CTerm) -> set[str]:
    match t:
        case CConst():
            return set()
        case CVar(x):
            return {x}
        case CApp(_, args):
            out = set()
            for a in args:
                out |= free_core_vars(a)
            return out
        case CIf(a, b, c):
            return free_core_vars(a) | free_core_vars(b) | free_core_vars(c)
        case CLet(bindings, body):
            out = set()
            bound = set()
            for n, e in bindings:
                out |= free_core_vars(e) - bound
                bound.add(n)
            return out | (free_core_vars(body) - bound)
        case CAssume(f):
            return free_core_vars(f)
    raise TypeError(f"not a core term: {t!r}")


def subst_core(t: CTerm, mapping: dict[str, CTerm]) -> CTerm:
    match t:
        case CConst():
            return t
        case CVar(x):
            return mapping.get(x, t)
        case CApp(fn, args):
            return CApp(fn, tuple(subst_core(a, mapping) for a in args))
        case CIf(a, b, c):
            return CIf(subst_core(a, mapping), subst_core(b, mapping),
                       subst_core(c, mapping))
        case CLet(bindings, body):
            m = dict(mapping)
            new = []
            for n, e in bindings:
                new.append((n, subst_core(e, m)))
                m.pop(n, None)
            return CLet(tuple(new), subst_core(body, m))
        case CAssume(f):
            return CAssume(subst_core(f, mapping))
    raise TypeError(f"not a core term: {t!r}")


def term_size(t: CTerm) -> int:
    match t:
        case CConst() | CVar():
            return 1
        case CApp(_, args):
            return 1 + sum(term_size(a) for a in args)
        case CIf(a, b, c):
            return 1 + term_size(a) + term_size(b) + term_size(c)
        case CLet(bindings, body):
            return 1 + sum(1 + term_size(e) for _, e in bindings) + term_size(body)
        case CAssume(f):
            return 1 + term_size(f)
    raise TypeError(f"not a core term: {t!r}")


# ------------------------------------------------------------------ defs


@dataclass(frozen=True, slots=True)
class CoreDef:
    name: str
    params: tuple[str, ...]
    guard: CTerm
    body: Optional[CTerm]  # None for native type-support definitions
    measure: Optional[CTerm] = None
    returns_predicate: Optional[str] = None
    origin: str = "user"  # "user" | "type-support" | "transform"
    out_names: tuple[str, ...] = ("out",)
    postcondition: Optional[CTerm] = None

    def __post_init__(self):
        assert self.origin in ("user", "type-support", "transform")


def split_guarded_body(d: CoreDef) -> tuple[CTerm, CTerm, CTerm]:
    """Decompose if(assume(guard), inner, default); raises if d has no body
    of that shape."""
    match d.body:
        case CIf(CAssume(g), inner, default):
            return g, inner, default
    raise CoreError(f"{d.name} has no guarded body")


def guarded_body(guard: CTerm, inner: CTerm, default: CTerm) -> CTerm:
    return CIf(CAssume(guard), inner, default)


# ------------------------------------------------------------------ naming


_PRIMITIVE_KEYS = {"int": INT, "bool": BOOL, "char": CHAR, "string": STRING}


def type_key(t: TypeExpr) -> str:
    """Bracketed type-instance name; invertible."""
    match t:
        case IntType():
            return "int"
        case BoolType():
            return "bool"
        case CharType():
            return "char"
        case StringType():
            return "string"
        case NamedType(n):
            return n
        case SeqType(e):
            return f"sequence[{type_key(e)}]"
        case SetType(e):
            return f"set[{type_key(e)}]"
        case OptionType(e):
            return f"option[{type_key(e)}]"
        case MapType(d, r):
            return f"map[{type_key(d)},{type_key(r)}]"
        case TupleType(cs):
            return "tuple[" + ",".join(type_key(c) for c in cs) + "]"
    raise CoreError(f"no key for type {t!r}")


def parse_type_key(key: str) -> TypeExpr:
    t, rest = _parse_key(key)
    if rest:
        raise CoreError(f"trailing characters in type key {key!r}")
    return t


def _parse_key(s: str) -> tuple[TypeExpr, str]:
    i = 0
    while i < len(s) and s[i] not in "[,]":
        i += 1
    word, rest = s[:i], s[i:]
    if not word:
        raise CoreError(f"bad type key at {s!r}")
    if rest.startswith("["):
        args = []
        rest = rest[1:]
        while True:
            t, rest = _parse_key(rest)
            args.append(t)
            if rest.startswith(","):
                rest = rest[1:]
                continue
            if rest.startswith("]"):
                rest = rest[1:]
                break
            raise CoreError(f"unterminated type key near {rest!r}")
        match word, len(args):
            case "sequence", 1:
                return SeqType(args[0]), rest
            case "set", 1:
                return SetType(args[0]), rest
            case "option", 1:
                return OptionType(args[0]), rest
            case "map", 2:
                return MapType(args[0], args[1]), rest
            case "tuple", _:
                return TupleType(tuple(args)), rest
        raise CoreError(f"bad parameterized key {word!r}/{len(args)}")
    if word in _PRIMITIVE_KEYS:
        return _PRIMITIVE_KEYS[word], rest
    return NamedType(word), rest


_PRIMITIVE_RECOGNIZERS = {
    "integer-p": INT, "boolean-p": BOOL,
    "character-p": CHAR, "string-p": STRING,
}
_RECOGNIZER_OF_PRIMITIVE = {
    "int": "integer-p", "bool": "boolean-p",
    "char": "character-p", "string": "string-p",
}


def recognizer_name(t: TypeExpr) -> str:
    key = type_key(t)
    return _RECOGNIZER_OF_PRIMITIVE.get(key, key + "-p")


def recognizer_type(name: str) -> Optional[TypeExpr]:
    """Inverse of recognizer_name; None if the name is not a recognizer."""
    if name in _PRIMITIVE_RECOGNIZERS:
        return _PRIMITIVE_RECOGNIZERS[name]
    if not name.endswith("-p"):
        return None
    try:
        return parse_type_key(name[:-2])
    except CoreError:
        return None


def constructor_name(type_name: str) -> str:
    return f"make-{type_name}"


def accessor_name(type_name: str, field_name: str) -> str:
    return f"{type_name}->{field_name}"


def updater_name(type_name: str, field_name: str) -> str:
    return f"update-{type_name}-{field_name}"


def sum_constructor_name(type_name: str, alt: str) -> str:
    return f"make-{type_name}-{alt}"


def sum_test_name(type_name: str, alt: str) -> str:
    return f"{type_name}-is-{alt}"


def sum_accessor_name(type_name: str, alt: str, field_name: str) -> str:
    return f"{type_name}-{alt}->{field_name}"


def mangle(x) -> str:
    """Core name of a surface name or a type instance."""
    if isinstance(x, TypeExpr):
        return recognizer_name(x)
    if isinstance(x, str):
        if "-" in x or not x:
            raise CoreError(f"not a surface name: {x!r}")
        return x
    raise CoreError(f"cannot mangle {x!r}")


def demangle(name: str):
    """Inverse of mangle: a TypeExpr for recognizers, the name itself for
    plain names. Raises on names outside the conventions."""
    t = recognizer_type(name)
    if t is not None:
        return t
    if "-" in name:
        raise CoreError(f"not a demanglable name: {name!r}")
    return name


# --------------------------------------------------------------- rendering


def render_const(v: Value) -> str:
    match v:
        case VBool(b):
            return "T" if b else "NIL"
        case VInt(i):
            return str(i)
        case VChar(c):
            return f"(CODE-CHAR {ord(c)})"
        case VString(s):
            return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'
        case VSeq(()):
            return "(QUOTE NIL)"
    return f"(QUOTE {render(v)})"


def render_term(t: CTerm) -> str:
    """Single-line, byte-stable S-expression rendering."""
    match t:
        case CConst(v):
            return render_const(v)
        case CVar(x):
            return x
        case CApp(fn, args):
            if not args:
                return f"({fn})"
            return "(" + fn + " " + " ".join(render_term(a) for a in args) + ")"
        case CIf(a, b, c):
            return f"(if {render_term(a)} {render_term(b)} {render_term(c)})"
        case CLet(bindings, body):
            bs = " ".join(f"({n} {render_term(e)})" for n, e in bindings)
            return f"(let ({bs}) {render_term(body)})"
        case CAssume(f):
            return f"(assume {render_term(f)})"
    raise TypeError(f"not a core term: {t!r}")


def render_def(d: CoreDef) -> str:
    parts = [f"(define {d.name} ({' '.join(d.params)})"]
    parts.append(f":guard {render_term(d.guard)}")
    if d.body is not None:
        parts.append(f":body {render_term(d.body)}")
    else:
        parts.append(":body :native")
    if d.measure is not None:
        parts.append(f":measure {render_term(d.measure)}")
    if d.returns_predicate is not None:
        parts.append(f":returns {d.returns_predicate}")
    if d.postcondition is not None:
        parts.append(f":ensures {render_term(d.postcondition)}")
    parts.append(f":origin {d.origin})")
    return " ".join(parts)
