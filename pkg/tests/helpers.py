"""Test utilities: lightweight world building and brute-force oracles."""

from __future__ import annotations

import itertools

from syntheto.ast import (
    FunctionCliqueUnit, FunctionUnit, IntType, BoolType, CharType, StringType,
    MapType, NamedType, OptionType, ProductBody, SeqType, SetType,
    SpecificationUnit, SubtypeBody, SumBody, TheoremUnit, TupleType, TypeExpr,
    TypeCliqueUnit, TypeUnit,
)
from syntheto.parser import parse_program
from syntheto.typecheck import (
    NEEDS_USER, TypecheckError, TypeWorld, WorldEntry, check_toplevel,
    check_type_wellfounded, infer_witness, instantiate_polytypes,
)
from syntheto.values import (
    VBool, VChar, VInt, VProduct, VSeq, VSet, VString, VSum,
)


def build_world(source: str, world: TypeWorld | None = None) -> TypeWorld:
    """Parse and accept all units, without testing obligations. Raises on
    any decidable error (tests that need outcomes use the session module)."""
    world = world or TypeWorld()
    for unit in parse_program(source):
        world = accept_unit(unit, world)
    return world


def accept_unit(unit, world: TypeWorld) -> TypeWorld:
    typed, _obligations = check_toplevel(unit, world)
    match unit:
        case TypeUnit(d):
            bad = check_type_wellfounded([d], world)
            if bad:
                raise TypecheckError(f"uninhabited types: {bad}")
            entry = WorldEntry("type", unit, d)
            world2 = world.define(d.name, entry)
            if isinstance(d.body, SubtypeBody):
                w = infer_witness(d, world2)
                if w is NEEDS_USER:
                    raise TypecheckError(f"{d.name} needs a witness")
                entry.witness = w
        case TypeCliqueUnit(defs):
            bad = check_type_wellfounded(list(defs), world)
            if bad:
                raise TypecheckError(f"uninhabited types: {bad}")
            names = tuple(d.name for d in defs)
            world2 = world
            for d in defs:
                world2 = world2.define(
                    d.name, WorldEntry("type", unit, d, clique=names))
        case FunctionUnit(d):
            world2 = world.define(
                d.name, WorldEntry("function", unit, d,
                                   executable=typed.executable))
        case FunctionCliqueUnit(defs):
            names = tuple(d.name for d in defs)
            world2 = world
            for d in defs:
                world2 = world2.define(
                    d.name, WorldEntry("function", unit, d,
                                       executable=typed.executable,
                                       clique=names))
        case SpecificationUnit():
            world2 = world.define(
                unit.name, WorldEntry("specification", unit, None,
                                      executable=False))
        case TheoremUnit():
            world2 = world.define(
                unit.name, WorldEntry("theorem", unit, None, executable=False))
        case _:
            raise TypecheckError(f"cannot accept {unit!r} without a session")
    return world2.with_instances(instantiate_polytypes(typed, world2))


def enumerate_values(t: TypeExpr, world: TypeWorld, depth: int):
    """Brute-force enumeration of values of t up to a structural depth;
    the independent oracle for inhabitation checks."""
    if depth < 0:
        return
    match t:
        case BoolType():
            yield VBool(False)
            yield VBool(True)
        case IntType():
            yield VInt(0)
            yield VInt(1)
        case CharType():
            yield VChar("a")
        case StringType():
            yield VString("")
        case SeqType(el):
            yield VSeq(())
            for v in enumerate_values(el, world, depth - 1):
                yield VSeq((v,))
        case SetType(el):
            yield VSet(())
        case MapType(_, _):
            from syntheto.values import VMap
            yield VMap(())
        case OptionType(el):
            from syntheto.values import VOption
            yield VOption(None)
        case TupleType(cs):
            pools = [list(itertools.islice(
                enumerate_values(c, world, depth - 1), 4)) for c in cs]
            for combo in itertools.product(*pools):
                yield VTuple(tuple(combo))
        case NamedType(name):
            d = world.maybe_type_def(name)
            if d is None:
                return
            match d.body:
                case ProductBody(fields, _):
                    pools = [list(itertools.islice(
                        enumerate_values(ft, world, depth - 1), 4))
                        for _, ft in fields]
                    for combo in itertools.product(*pools):
                        yield VProduct(name, tuple(
                            (n, v) for (n, _), v in zip(fields, combo)))
                case SumBody(alternatives):
                    for alt, fields in alternatives:
                        pools = [list(itertools.islice(
                            enumerate_values(ft, world, depth - 1), 4))
                            for _, ft in fields]
                        for combo in itertools.product(*pools):
                            yield VSum(name, alt, tuple(
                                (n, v) for (n, _), v in zip(fields, combo)))
                case SubtypeBody(supertype, _, _, _):
                    yield from enumerate_values(supertype, world, depth - 1)


def inhabited_by_enumeration(t: TypeExpr, world: TypeWorld,
                             depth: int = 5) -> bool:
    for _ in enumerate_values(t, world, depth):
        return True
    return False
