"""Deterministic random value generation per type.

random_value(t, size, seed, world) is a pure function of its arguments:
integers are drawn from [-size, size], collection lengths are at most size,
and invariant-carrying types are produced by rejection sampling with a retry
cap, falling back to the type's stored witness. random_value_rng reuses a
caller-owned generator for batch sampling.
"""

from __future__ import annotations

import random

from .ast import (
    BoolType, CharType, IntType, MapType, NamedType, OptionType, ProductBody,
    SeqType, SetType, StringType, SubtypeBody, SumBody, TupleType, TypeExpr,
)
from .interp import EvalError, value_matches_type
from .typecheck import TypeWorld
from .values import (
    Value, VBool, VChar, VInt, VOption, VProduct, VSeq, VString,
    VSum, VTuple, make_map, make_set,
)

RETRY_CAP = 1000
_MAX_NAMED_DEPTH = 12


class GenerationExhausted(EvalError):
    pass


def random_value(t: TypeExpr, size: int, seed: int, world: TypeWorld) -> Value:
    """Deterministic sample of type t at the given size."""
    rng = random.Random(f"{seed}|{size}|{t}")
    return _gen(t, max(size, 0), rng, world, 0)


def random_value_rng(t: TypeExpr, size: int, rng: random.Random,
                     world: TypeWorld) -> Value:
    """Sample using a caller-provided random stream."""
    return _gen(t, max(size, 0), rng, world, 0)


def _mentions(t: TypeExpr, names: frozenset) -> bool:
    match t:
        case NamedType(n):
            return n in names
        case OptionType(e) | SetType(e) | SeqType(e):
            return _mentions(e, names)
        case MapType(d, r):
            return _mentions(d, names) or _mentions(r, names)
        case TupleType(cs):
            return any(_mentions(c, names) for c in cs)
    return False


def _below(rng: random.Random, n: int) -> int:
    # uniform 0..n-1; random() is far cheaper than randint
    return int(rng.random() * n)


def _gen(t: TypeExpr, size: int, rng: random.Random, world: TypeWorld,
         depth: int) -> Value:
    tt = type(t)
    if tt is IntType:
        return VInt(_below(rng, 2 * size + 1) - size)
    if tt is BoolType:
        return VBool(rng.random() < 0.5)
    if tt is SeqType:
        n = _below(rng, size + 1)
        el = t.element
        return VSeq(tuple(_gen(el, size, rng, world, depth)
                          for _ in range(n)))
    if tt is NamedType:
        return _gen_named(t.name, size, rng, world, depth)
    if tt is CharType:
        return VChar(chr(_below(rng, 256)))
    if tt is StringType:
        n = _below(rng, size + 1)
        return VString("".join(chr(32 + _below(rng, 95)) for _ in range(n)))
    if tt is OptionType:
        if rng.random() < 0.25:
            return VOption(None)
        return VOption(_gen(t.element, size, rng, world, depth))
    if tt is SetType:
        n = _below(rng, size + 1)
        return make_set(_gen(t.element, size, rng, world, depth)
                        for _ in range(n))
    if tt is MapType:
        n = _below(rng, size + 1)
        return make_map((_gen(t.domain, size, rng, world, depth),
                         _gen(t.range, size, rng, world, depth))
                        for _ in range(n))
    if tt is TupleType:
        return VTuple(tuple(_gen(c, size, rng, world, depth)
                            for c in t.components))
    raise EvalError(f"cannot generate for type {t!r}")


def _gen_named(name: str, size: int, rng: random.Random, world: TypeWorld,
               depth: int) -> Value:
    entry = world.entries.get(name)
    if entry is None or entry.kind != "type":
        raise EvalError(f"unknown type {name!r}")
    d = entry.definition
    body = d.body
    bt = type(body)
    if bt is ProductBody:
        fields = body.fields
        if body.invariant is None:
            return VProduct(name, tuple(
                (n, _gen(ft, size, rng, world, depth + 1))
                for n, ft in fields))
        for _ in range(RETRY_CAP):
            v = VProduct(name, tuple(
                (n, _gen(ft, size, rng, world, depth + 1))
                for n, ft in fields))
            if value_matches_type(v, NamedType(name), world):
                return v
        raise GenerationExhausted(
            f"no {name} found satisfying its invariant")
    if bt is SumBody:
        alternatives = body.alternatives
        clique = frozenset(entry.clique) | {name}
        recursive = [a for a in alternatives
                     if any(_mentions(ft, clique) for _, ft in a[1])]
        base = [a for a in alternatives if a not in recursive]
        pool = list(alternatives)
        if depth >= _MAX_NAMED_DEPTH or size == 0:
            pool = base or pool
        alt, fields = pool[_below(rng, len(pool))]
        inner = max(size - 1, 0) if (alt, fields) in recursive else size
        return VSum(name, alt, tuple(
            (n, _gen(ft, inner, rng, world, depth + 1))
            for n, ft in fields))
    if bt is SubtypeBody:
        for _ in range(RETRY_CAP):
            v = _gen(body.supertype, size, rng, world, depth + 1)
            if value_matches_type(v, NamedType(name), world):
                return v
        if entry.witness is not None:
            return entry.witness
        raise GenerationExhausted(
            f"no {name} found satisfying its restriction")
    raise EvalError(f"cannot generate for {name!r}")


def random_binding(variables, size: int, seed: int,
                   world: TypeWorld) -> dict[str, Value]:
    """One sample for a typed variable list; deterministic in its inputs."""
    rng = random.Random(f"binding|{seed}|{size}")
    out: dict[str, Value] = {}
    for name, t in variables:
        out[name] = random_value_rng(t, size, rng, world)
    return out


def compile_generator(t: TypeExpr, world: TypeWorld):
    """Compile t into a closure gen(size, rng, depth) -> Value; same
    distribution as random_value_rng, with per-node dispatch paid once."""
    named_memo: dict[str, object] = {}

    def compile_(t: TypeExpr):
        tt = type(t)
        if tt is IntType:
            return lambda size, rng, depth: VInt(
                int(rng.random() * (2 * size + 1)) - size)
        if tt is BoolType:
            return lambda size, rng, depth: VBool(rng.random() < 0.5)
        if tt is CharType:
            return lambda size, rng, depth: VChar(
                chr(int(rng.random() * 256)))
        if tt is StringType:
            return lambda size, rng, depth: VString(
                "".join(chr(32 + int(rng.random() * 95))
                        for _ in range(int(rng.random() * (size + 1)))))
        if tt is SeqType:
            elem = compile_(t.element)
            return lambda size, rng, depth: VSeq(tuple(
                elem(size, rng, depth)
                for _ in range(int(rng.random() * (size + 1)))))
        if tt is SetType:
            elem = compile_(t.element)
            return lambda size, rng, depth: make_set(
                elem(size, rng, depth)
                for _ in range(int(rng.random() * (size + 1))))
        if tt is MapType:
            kg, vg = compile_(t.domain), compile_(t.range)
            return lambda size, rng, depth: make_map(
                (kg(size, rng, depth), vg(size, rng, depth))
                for _ in range(int(rng.random() * (size + 1))))
        if tt is OptionType:
            elem = compile_(t.element)
            return lambda size, rng, depth: (
                VOption(None) if rng.random() < 0.25
                else VOption(elem(size, rng, depth)))
        if tt is TupleType:
            gens = tuple(compile_(c) for c in t.components)
            return lambda size, rng, depth: VTuple(tuple(
                g(size, rng, depth) for g in gens))
        if tt is NamedType:
            return compile_named(t.name)
        raise EvalError(f"cannot generate for type {t!r}")

    def compile_named(name: str):
        if name in named_memo:
            cached = named_memo[name]
            return lambda size, rng, depth: named_memo[name](size, rng, depth)
        # placeholder first, for recursive cliques
        named_memo[name] = None
        entry = world.entries.get(name)
        if entry is None or entry.kind != "type":
            raise EvalError(f"unknown type {name!r}")
        d = entry.definition
        body = d.body
        fn = None
        if isinstance(body, ProductBody):
            field_gens = tuple((n, compile_(ft)) for n, ft in body.fields)
            if body.invariant is None:
                def fn(size, rng, depth, _name=name, _fg=field_gens):
                    return VProduct(_name, tuple(
                        (n, g(size, rng, depth + 1)) for n, g in _fg))
            else:
                nt = NamedType(name)

                def fn(size, rng, depth, _name=name, _fg=field_gens, _nt=nt):
                    for _ in range(RETRY_CAP):
                        v = VProduct(_name, tuple(
                            (n, g(size, rng, depth + 1)) for n, g in _fg))
                        if value_matches_type(v, _nt, world):
                            return v
                    raise GenerationExhausted(
                        f"no {_name} found satisfying its invariant")
        elif isinstance(body, SumBody):
            clique = frozenset(entry.clique) | {name}
            compiled = []
            for alt, fields in body.alternatives:
                rec = any(_mentions(ft, clique) for _, ft in fields)
                compiled.append(
                    (alt, rec, tuple((n, compile_(ft)) for n, ft in fields)))
            base = [c for c in compiled if not c[1]] or compiled

            def fn(size, rng, depth, _name=name, _all=tuple(compiled),
                   _base=tuple(base)):
                pool = _base if (depth >= _MAX_NAMED_DEPTH or size == 0) \
                    else _all
                alt, rec, fg = pool[int(rng.random() * len(pool))]
                inner = max(size - 1, 0) if rec else size
                return VSum(_name, alt, tuple(
                    (n, g(inner, rng, depth + 1)) for n, g in fg))
        elif isinstance(body, SubtypeBody):
            sup = compile_(body.supertype)
            nt = NamedType(name)

            def fn(size, rng, depth, _name=name, _sup=sup, _nt=nt,
                   _entry=entry):
                for _ in range(RETRY_CAP):
                    v = _sup(size, rng, depth + 1)
                    if value_matches_type(v, _nt, world):
                        return v
                if _entry.witness is not None:
                    return _entry.witness
                raise GenerationExhausted(
                    f"no {_name} found satisfying its restriction")
        else:
            raise EvalError(f"cannot generate for {name!r}")
        named_memo[name] = fn
        return fn

    g = compile_(t)
    return lambda size, rng: g(size, rng, 0)
