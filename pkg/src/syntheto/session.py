"""Notebook session state machine.

Cells are appended one by one; each submission parses, checks, tests the
generated obligations with the randomized oracle, and commits to the world
only when nothing failed. Editing a cell rolls the world back to the
snapshot before that cell and resubmits it and everything after it, in
order, stopping at the first rejection.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Optional

from .ast import (
    Binary, Bind, Call, Conditional, Expression, FunctionCliqueUnit,
    FunctionDefinition, FunctionUnit, ProductAccess,
    ProductConstruct, ProductUpdate, SpecificationUnit,
    SubtypeBody, SumAccess, SumConstruct, SumTest, TheoremUnit, TopLevel,
    TransformUnit, TupleAccess, TupleConstruct, TypeCliqueUnit, TypeUnit,
    Unary, Var, unit_name,
)
from .core import CoreDef, CTerm, render_def
from .lexer import SynthetoError
from .oracle import DEFAULT_SEED, DEFAULT_SIZE, DEFAULT_TRIALS, test_obligation
from .parser import parse_program_spans
from .rewrite import NonOrientable, RewriteRule, lhs_head, orient_theorem
from .transforms import RewriteEnvironment, apply_transform
from .translate import (
    from_core_expr, to_core_function, to_core_instance,
    to_core_type,
)
from .typecheck import (
    NEEDS_USER, Obligation, TypecheckError, TypeWorld, TypedUnit, WorldEntry,
    check_toplevel, check_type_wellfounded, infer_witness,
    instantiate_polytypes, subst_expr,
)
from .values import render

# obligations quantifying over a transformation's guarded domain are judged
# in the total-logic reading (guard checks off); everything else is checked
_LOGIC_PROVENANCES = ("transform-correctness", "isomorphism-inversion")


@dataclass
class SessionConfig:
    trials: int = DEFAULT_TRIALS
    size: int = DEFAULT_SIZE
    seed: int = DEFAULT_SEED


@dataclass(frozen=True)
class WorldState:
    """Immutable snapshot of everything a cell submission can change."""

    world: TypeWorld = field(default_factory=TypeWorld)
    core_defs: tuple[tuple[str, CoreDef], ...] = ()
    rules: tuple[RewriteRule, ...] = ()
    suppressed: frozenset = frozenset()

    def defs_dict(self) -> dict[str, CoreDef]:
        return dict(self.core_defs)

    def fingerprint(self) -> str:
        lines = [render_def(d) for _, d in self.core_defs]
        lines += [f"(rule {r.name})" for r in self.rules]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Outcome:
    kind: str   # "<unitkind>-success" | "transform-success" | "failure"
    message: str
    payload: tuple[TopLevel, ...] = ()
    detail: str = ""
    verdicts: tuple[tuple[str, str], ...] = ()  # (obligation id, status)

    @property
    def ok(self) -> bool:
        return self.kind != "failure"


@dataclass
class Cell:
    source: str
    outcomes: tuple[Outcome, ...] = ()
    status: str = "unsubmitted"  # accepted | rejected | stale | unsubmitted
    after: Optional[WorldState] = None  # state snapshot once accepted


@dataclass
class SessionState:
    config: SessionConfig = field(default_factory=SessionConfig)
    cells: list[Cell] = field(default_factory=list)
    state: WorldState = field(default_factory=WorldState)
    session_id: str = "local"
    revision: int = 0

    @property
    def world(self) -> TypeWorld:
        return self.state.world

    def first_rejected(self) -> Optional[int]:
        for i, c in enumerate(self.cells):
            if c.status == "rejected":
                return i
        return None


class BlockedByRejection(SynthetoError):
    pass


# ------------------------------------------------------------- acceptance


def _outcome_kind(u: TopLevel) -> str:
    match u:
        case TypeUnit() | TypeCliqueUnit():
            return "type-success"
        case FunctionUnit() | FunctionCliqueUnit():
            return "function-success"
        case SpecificationUnit():
            return "specification-success"
        case TheoremUnit():
            return "theorem-success"
        case TransformUnit():
            return "transform-success"
    raise TypeError(f"not a toplevel: {u!r}")


def _measure_obligations(f: FunctionDefinition, measure: CTerm,
                         world: TypeWorld) -> list[Obligation]:
    """One measure-decrease obligation per recursive call site, carrying the
    branch conditions on the path to the call."""
    h = f.header
    params = [n for n, _ in h.inputs]
    env_t = {n: t for n, t in h.inputs}
    measure_s = from_core_expr(measure, env_t, world, {})
    obligations: list[Obligation] = []
    counter = itertools.count(1)

    base_hyps: tuple[Expression, ...] = ()
    if f.precondition is not None:
        base_hyps = (f.precondition,)

    def visit(e: Expression, hyps: tuple[Expression, ...],
              variables: tuple) -> None:
        match e:
            case Call(fn, args):
                for a in args:
                    visit(a, hyps, variables)
                if fn == h.name:
                    callee = subst_expr(measure_s, dict(zip(params, args)))
                    obligations.append(Obligation(
                        f"{h.name}#measure-decrease#{next(counter)}",
                        variables, hyps,
                        Binary("<", callee, measure_s),
                        "measure-decrease"))
            case Conditional(t, a, b):
                visit(t, hyps, variables)
                visit(a, hyps + (t,), variables)
                visit(b, hyps + (Unary("!", t),), variables)
            case Binary("&&", l, r):
                visit(l, hyps, variables)
                visit(r, hyps + (l,), variables)
            case Binary("||", l, r):
                visit(l, hyps, variables)
                visit(r, hyps + (Unary("!", l),), variables)
            case Binary(_, l, r):
                visit(l, hyps, variables)
                visit(r, hyps, variables)
            case Unary(_, a):
                visit(a, hyps, variables)
            case Bind(locals_, body):
                v = variables
                hh = hyps
                for n, t, init in locals_:
                    visit(init, hh, v)
                    v = v + ((n, t),)
                    hh = hh + (Binary("==", Var(n), init),)
                visit(body, hh, v)
            case TupleConstruct(cs):
                for c in cs:
                    visit(c, hyps, variables)
            case TupleAccess(t, _):
                visit(t, hyps, variables)
            case ProductConstruct(_, fs) | SumConstruct(_, _, fs):
                for _, x in fs:
                    visit(x, hyps, variables)
            case ProductAccess(t, _) | SumTest(t, _) | SumAccess(t, _, _):
                visit(t, hyps, variables)
            case ProductUpdate(t, fs):
                visit(t, hyps, variables)
                for _, x in fs:
                    visit(x, hyps, variables)
            case _:
                pass

    visit(f.body, base_hyps, tuple(h.inputs))
    return obligations


def _failure(message: str, detail: str = "") -> Outcome:
    return Outcome("failure", message, (), detail)


def _test_all(obligations, state: WorldState, config: SessionConfig,
              ) -> tuple[Optional[Outcome], list[str], tuple]:
    """Run the oracle; a FAIL verdict produces a failure outcome. Undecided
    verdicts are collected as notes; all verdicts are reported."""
    notes = []
    verdicts = []
    for ob in obligations:
        check_guards = ob.provenance not in _LOGIC_PROVENANCES
        v = test_obligation(ob, state.world, trials=config.trials,
                            size=config.size, seed=config.seed,
                            check_guards=check_guards)
        verdicts.append((ob.id, v.status))
        if v.status == "fail":
            shown = ", ".join(f"{k} = {render(x)}"
                              for k, x in (v.counterexample or {}).items())
            return _failure(
                ob.id,
                f"obligation {ob.id} fails with counterexample [{shown}]"), \
                notes, tuple(verdicts)
        if v.status == "undecided":
            notes.append(f"{ob.id}: undecided ({v.detail})")
    return None, notes, tuple(verdicts)


def accept_unit(unit: TopLevel, state: WorldState, config: SessionConfig,
                ) -> tuple[WorldState, Outcome]:
    """Check, test and commit one top-level unit. The returned state is
    unchanged when the outcome is a failure."""
    try:
        typed, obligations = check_toplevel(unit, state.world)
    except (TypecheckError, SynthetoError) as exc:
        return state, _failure(unit_name(unit), str(exc))

    try:
        if isinstance(unit, TransformUnit):
            return _accept_transform(unit, state, config)
        return _accept_plain(unit, typed, obligations, state, config)
    except SynthetoError as exc:
        return state, _failure(unit_name(unit), str(exc))


def _accept_plain(unit: TopLevel, typed: TypedUnit, obligations,
                  state: WorldState, config: SessionConfig,
                  ) -> tuple[WorldState, Outcome]:
    world = state.world
    new_defs: list[CoreDef] = []
    new_rules: list[RewriteRule] = []
    suppressed = state.suppressed
    witness_notes: list[str] = []

    match unit:
        case TypeUnit(d):
            bad = check_type_wellfounded([d], world)
            if bad:
                return state, _failure(
                    d.name, f"type {bad[0]} has no finite value")
            entry = WorldEntry("type", unit, d)
            world = world.define(d.name, entry)
            if isinstance(d.body, SubtypeBody):
                w = infer_witness(d, world)
                if w is NEEDS_USER:
                    return state, _failure(
                        d.name,
                        f"no witness value found for {d.name}; add an "
                        f"explicit witness expression")
                entry.witness = w
                witness_notes.append(f"witness {render(w)}")
            new_defs.extend(to_core_type(d, world))
        case TypeCliqueUnit(defs):
            bad = check_type_wellfounded(list(defs), world)
            if bad:
                return state, _failure(
                    unit_name(unit), f"uninhabited types: {', '.join(bad)}")
            names = tuple(d.name for d in defs)
            for d in defs:
                world = world.define(
                    d.name, WorldEntry("type", unit, d, clique=names))
            for d in defs:
                new_defs.extend(to_core_type(d, world))
        case FunctionUnit(d):
            world = world.define(d.name, WorldEntry(
                "function", unit, d, executable=typed.executable))
            if typed.executable:
                core = to_core_function(d, world)
                new_defs.append(core)
                if core.measure is not None:
                    obligations = list(obligations) + _measure_obligations(
                        d, core.measure, world)
        case FunctionCliqueUnit(defs):
            names = tuple(d.name for d in defs)
            clique = {d.name: d for d in defs}
            for d in defs:
                world = world.define(d.name, WorldEntry(
                    "function", unit, d, executable=typed.executable,
                    clique=names))
            if typed.executable:
                for d in defs:
                    core = to_core_function(d, world, clique)
                    new_defs.append(core)
                    if core.measure is not None:
                        obligations = list(obligations) + _measure_obligations(
                            d, core.measure, world)
        case SpecificationUnit():
            world = world.define(unit.name, WorldEntry(
                "specification", unit, None, executable=False))
        case TheoremUnit():
            world = world.define(unit.name, WorldEntry(
                "theorem", unit, None, executable=False))
        case _:
            return state, _failure(unit_name(unit), "unsupported unit")

    # parameterized-type instances used by this unit, bottom-up
    instances = instantiate_polytypes(typed, world)
    for t in instances:
        new_defs.append(to_core_instance(t))
    world = world.with_instances(instances)

    candidate = WorldState(
        world,
        state.core_defs + tuple((d.name, d) for d in new_defs),
        state.rules,
        suppressed,
    )

    failure, notes, verdicts = _test_all(obligations, candidate, config)
    if failure is not None:
        return state, replace(failure, verdicts=verdicts)

    # theorems become rewrite rules once their statement passes the oracle
    if isinstance(unit, TheoremUnit):
        try:
            rule = orient_theorem(unit, world)
            new_rules.append(rule)
            head = lhs_head(rule)
            if head is not None and \
                    candidate.world.maybe_function_def(head) is not None:
                suppressed = suppressed | {head}
        except NonOrientable as exc:
            notes.append(str(exc))

    final = replace(candidate, rules=state.rules + tuple(new_rules),
                    suppressed=suppressed)
    detail = "; ".join(witness_notes + notes)
    return final, Outcome(_outcome_kind(unit), unit_name(unit), (), detail,
                          verdicts)


def _accept_transform(unit: TransformUnit, state: WorldState,
                      config: SessionConfig) -> tuple[WorldState, Outcome]:
    env = RewriteEnvironment(state.world, state.defs_dict(), state.rules,
                             state.suppressed)
    result = apply_transform(unit, env)

    world = state.world.define(unit.new_name, WorldEntry(
        "function", FunctionUnit(result.new_surface), result.new_surface,
        executable=True))
    # annotate and register instances introduced by the derived definition;
    # its internal guard obligations are the parent's, already discharged
    typed, _ = check_toplevel(FunctionUnit(result.new_surface), state.world)
    instances = instantiate_polytypes(typed, world)
    new_defs = [to_core_instance(t) for t in instances]
    world = world.with_instances(instances)

    candidate = WorldState(
        world,
        state.core_defs + tuple((d.name, d) for d in new_defs)
        + ((result.new_def.name, result.new_def),),
        state.rules,
        state.suppressed,
    )
    failure, notes, verdicts = _test_all(result.obligations, candidate, config)
    if failure is not None:
        return state, replace(failure, verdicts=verdicts)

    final = replace(candidate, rules=state.rules + tuple(result.rules_added))
    detail = result.report
    if notes:
        detail += "; " + "; ".join(notes)
    return final, Outcome("transform-success", unit.new_name,
                          (FunctionUnit(result.new_surface),), detail,
                          verdicts)


# ------------------------------------------------------------------ session


def submit_cell(s: SessionState, text: str) -> tuple[SessionState, Outcome]:
    """Append a cell and run it. Blocked while an earlier cell is rejected.
    Multi-unit cells are atomic: all units accept or the world is unchanged."""
    if s.first_rejected() is not None:
        raise BlockedByRejection(
            "a rejected cell must be fixed and resubmitted first")
    cell = Cell(text)
    state, outcomes = _run_cell(cell, s.state, s.config)
    s.cells.append(cell)
    if cell.status == "accepted":
        s.state = state
    s.revision += 1
    return s, outcomes[-1] if outcomes else _failure("empty", "no content")


def _run_cell(cell: Cell, state: WorldState, config: SessionConfig,
              ) -> tuple[WorldState, list[Outcome]]:
    try:
        units = [u for u, _ in parse_program_spans(cell.source)]
    except SynthetoError as exc:
        cell.outcomes = (_failure("parse", str(exc)),)
        cell.status = "rejected"
        return state, list(cell.outcomes)
    if not units:
        cell.outcomes = (_failure("empty", "cell contains no definitions"),)
        cell.status = "rejected"
        return state, list(cell.outcomes)
    outcomes: list[Outcome] = []
    working = state
    for u in units:
        working, outcome = accept_unit(u, working, config)
        outcomes.append(outcome)
        if not outcome.ok:
            cell.outcomes = tuple(outcomes)
            cell.status = "rejected"
            cell.after = None
            return state, outcomes
    cell.outcomes = tuple(outcomes)
    cell.status = "accepted"
    cell.after = working
    return working, outcomes


def edit_cell_stream(s: SessionState, index: int, new_text: str):
    """Replace cell `index`, then resubmit it and every later cell in order,
    yielding (i, cell) as each finishes; cells after the first rejection are
    yielded immediately as stale."""
    if not (0 <= index < len(s.cells)):
        raise SynthetoError(f"cell index {index} out of range")
    s.cells[index] = Cell(new_text)
    state = s.cells[index - 1].after if index > 0 else WorldState()
    assert state is not None, "editing below a rejected cell"
    stop = None
    for i in range(index, len(s.cells)):
        cell = s.cells[i]
        if stop is not None:
            cell.status = "stale"
            cell.outcomes = ()
            cell.after = None
            yield i, cell
            continue
        fresh = Cell(cell.source)
        state2, _ = _run_cell(fresh, state, s.config)
        s.cells[i] = fresh
        if fresh.status == "accepted":
            state = state2
        else:
            stop = i
        s.state = state  # world up to (excluding) any rejected cell
        yield i, fresh
    s.revision += 1


def edit_cell(s: SessionState, index: int, new_text: str,
              ) -> tuple[SessionState, list[Outcome]]:
    """Replace cell `index` and resubmit it and all later cells in order,
    stopping at the first rejection; later cells become stale."""
    outcomes: list[Outcome] = []
    for i, cell in edit_cell_stream(s, index, new_text):
        if cell.status != "stale":
            outcomes.extend(cell.outcomes)
    return s, outcomes


def rebuild(sources: list[str], config: Optional[SessionConfig] = None,
            ) -> SessionState:
    """Replay a list of cell sources into a fresh session."""
    s = SessionState(config or SessionConfig())
    for src in sources:
        if s.first_rejected() is not None:
            s.cells.append(Cell(src, status="unsubmitted"))
            continue
        submit_cell(s, src)
    return s


def save_notebook(s: SessionState) -> str:
    sep = "\n/* ---- cell ---- */\n"
    return sep.join(c.source for c in s.cells)


def load_notebook(text: str) -> list[str]:
    sep = "/* ---- cell ---- */"
    if sep in text:
        return [part.strip() for part in text.split(sep) if part.strip()]
    return [text]


def cells_of_source(source: str) -> list[str]:
    """Split a .synth file into one cell per top-level unit."""
    return [source[a:b] for _, (a, b) in parse_program_spans(source)]
