"""Runtime values.

Characters are 8-bit (ISO 8859-1); integers unbounded. Sets and maps are
kept in a canonical sorted order so equal values have equal representations
and rendering is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True, slots=True)
class Value:
    """Base class for runtime values. Abstract."""


@dataclass(frozen=True, slots=True)
class VBool(Value):
    value: bool


@dataclass(frozen=True, slots=True)
class VChar(Value):
    value: str  # single char, ord <= 255

    def __post_init__(self):
        assert len(self.value) == 1 and ord(self.value) <= 255


@dataclass(frozen=True, slots=True)
class VString(Value):
    value: str


@dataclass(frozen=True, slots=True)
class VInt(Value):
    value: int


@dataclass(frozen=True, slots=True)
class VOption(Value):
    value: Optional[Value]  # None encodes the absent case


@dataclass(frozen=True, slots=True)
class VSeq(Value):
    items: tuple[Value, ...]


@dataclass(frozen=True, slots=True)
class VSet(Value):
    items: tuple[Value, ...]  # canonically sorted, duplicate-free


@dataclass(frozen=True, slots=True)
class VMap(Value):
    entries: tuple[tuple[Value, Value], ...]  # sorted by key, keys unique


@dataclass(frozen=True, slots=True)
class VTuple(Value):
    components: tuple[Value, ...]


@dataclass(frozen=True, slots=True)
class VProduct(Value):
    type: str
    fields: tuple[tuple[str, Value], ...]  # in definition order

    def get(self, name: str) -> Value:
        for n, v in self.fields:
            if n == name:
                return v
        raise KeyError(name)


@dataclass(frozen=True, slots=True)
class VSum(Value):
    type: str
    alternative: str
    fields: tuple[tuple[str, Value], ...]

    def get(self, name: str) -> Value:
        for n, v in self.fields:
            if n == name:
                return v
        raise KeyError(name)


TRUE = VBool(True)
FALSE = VBool(False)


def _rank(v: Value) -> int:
    return {VBool: 0, VChar: 1, VString: 2, VInt: 3, VOption: 4, VSeq: 5,
            VSet: 6, VMap: 7, VTuple: 8, VProduct: 9, VSum: 10}[type(v)]


def order_key(v: Value):
    """Total order over values, used to canonicalize sets and maps."""
    match v:
        case VBool(b):
            return (0, b)
        case VChar(c):
            return (1, ord(c))
        case VString(s):
            return (2, s)
        case VInt(i):
            return (3, i)
        case VOption(x):
            return (4, (0,) if x is None else (1, order_key(x)))
        case VSeq(items):
            return (5, tuple(order_key(x) for x in items))
        case VSet(items):
            return (6, tuple(order_key(x) for x in items))
        case VMap(entries):
            return (7, tuple((order_key(k), order_key(x)) for k, x in entries))
        case VTuple(comps):
            return (8, tuple(order_key(x) for x in comps))
        case VProduct(ty, fields):
            return (9, ty, tuple((n, order_key(x)) for n, x in fields))
        case VSum(ty, alt, fields):
            return (10, ty, alt, tuple((n, order_key(x)) for n, x in fields))
    raise TypeError(f"not a value: {v!r}")


def make_set(items) -> VSet:
    uniq: list[Value] = []
    for x in sorted(items, key=order_key):
        if not uniq or uniq[-1] != x:
            uniq.append(x)
    return VSet(tuple(uniq))


def make_map(entries) -> VMap:
    by_key: dict = {}
    for k, v in entries:
        by_key[order_key(k)] = (k, v)
    return VMap(tuple(by_key[k] for k in sorted(by_key)))


def render(v: Value) -> str:
    """Human-readable display form (counterexamples, CLI output)."""
    match v:
        case VBool(b):
            return "true" if b else "false"
        case VChar(c):
            return f"'{c}'"
        case VString(s):
            return f'"{s}"'
        case VInt(i):
            return str(i)
        case VOption(x):
            return "none" if x is None else f"some({render(x)})"
        case VSeq(items):
            return "[" + ", ".join(render(x) for x in items) + "]"
        case VSet(items):
            return "{" + ", ".join(render(x) for x in items) + "}"
        case VMap(entries):
            inner = ", ".join(f"{render(k)}: {render(x)}" for k, x in entries)
            return "{" + inner + "}"
        case VTuple(comps):
            return "(" + ", ".join(render(x) for x in comps) + ")"
        case VProduct(ty, fields):
            inner = ", ".join(f"{n} = {render(x)}" for n, x in fields)
            return f"{ty}({inner})"
        case VSum(ty, alt, fields):
            if fields:
                inner = ", ".join(f"{n} = {render(x)}" for n, x in fields)
                return f"{ty}::{alt}({inner})"
            return f"{ty}::{alt}"
    raise TypeError(f"not a value: {v!r}")
