"""Term rewriting: leftmost-innermost, fuel-bounded, context-aware.

Rules come from registered theorems (oriented left to right), from type
definitions (accessor/recognizer-of-constructor collapses), and from
transformations (old -> new). Conditional rules fire only when their
conditions are discharged by the facts collected from enclosing branch
tests and the definition's guard. Small non-recursive definitions unfold
unless a registered theorem mentions them at its left-hand head.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .ast import TheoremUnit
from .core import (
    CApp, CAssume, CConst, CIf, CLet, CTerm, CVar, CoreDef, CoreError,
    CTRUE, CFALSE, capp, conjuncts, free_core_vars, recognizer_type,
    subst_core,
)
from .typecheck import TypeWorld, _Checker, _Ctx
from .values import VBool, VInt

DEFAULT_FUEL = 10000
ENABLE_SIZE_LIMIT = 8

_OPERATORS = {
    "plus", "minus", "times", "div", "mod", "negate", "equal", "noteq",
    "lt", "le", "gt", "ge", "and", "or", "not", "implies", "impliedby",
    "iff", "tuple", "tuple-ref",
}


class NonOrientable(CoreError):
    pass


@dataclass(frozen=True)
class RewriteRule:
    name: str
    variables: tuple[str, ...]
    lhs: CTerm
    rhs: CTerm
    conditions: tuple[CTerm, ...] = ()
    enabled: bool = True

    def __post_init__(self):
        assert not isinstance(self.lhs, CVar), "lhs must not be a bare variable"
        lhs_vars = free_core_vars(self.lhs) & set(self.variables)
        for t in (self.rhs,) + self.conditions:
            extra = (free_core_vars(t) & set(self.variables)) - lhs_vars
            assert not extra, f"free rule variables {extra} not bound by lhs"


# ---------------------------------------------------------------- matching


def match(pattern: CTerm, term: CTerm, variables: frozenset,
          binding: Optional[dict[str, CTerm]] = None) -> Optional[dict[str, CTerm]]:
    """Nonlinear first-order matching."""
    if binding is None:
        binding = {}
    match pattern:
        case CVar(x) if x in variables:
            if x in binding:
                return binding if binding[x] == term else None
            binding[x] = term
            return binding
        case CVar(x):
            return binding if term == CVar(x) else None
        case CConst(_):
            return binding if pattern == term else None
        case CApp(fn, args):
            if not isinstance(term, CApp) or term.fn != fn \
                    or len(term.args) != len(args):
                return None
            for p, t in zip(args, term.args):
                binding = match(p, t, variables, binding)
                if binding is None:
                    return None
            return binding
        case CIf(a, b, c):
            if not isinstance(term, CIf):
                return None
            for p, t in ((a, term.test), (b, term.then), (c, term.orelse)):
                binding = match(p, t, variables, binding)
                if binding is None:
                    return None
            return binding
    return None


# -------------------------------------------------------------------- facts


def push_not(t: CTerm) -> list[CTerm]:
    """Literal facts carried by asserting t."""
    match t:
        case CApp("and", args):
            out = []
            for a in args:
                out.extend(push_not(a))
            return out
        case CApp("not", (CApp("or", args),)):
            out = []
            for a in args:
                out.extend(push_not(capp("not", a)))
            return out
        case CApp("not", (CApp("not", (inner,)),)):
            return push_not(inner)
        case CApp("not", (CApp("noteq", args),)):
            return [CApp("equal", args)]
        case CApp("not", (CApp("lt", args),)):
            return [CApp("ge", args)]
        case CApp("not", (CApp("le", args),)):
            return [CApp("gt", args)]
        case CApp("not", (CApp("gt", args),)):
            return [CApp("le", args)]
        case CApp("not", (CApp("ge", args),)):
            return [CApp("lt", args)]
    return [t]


def negate(t: CTerm) -> list[CTerm]:
    return push_not(capp("not", t))


# ------------------------------------------------------------------ engine


class FuelExhausted(Exception):
    pass


@dataclass
class RewriteState:
    rules: tuple[RewriteRule, ...]
    defs: dict[str, CoreDef]
    world: TypeWorld
    fuel: int = DEFAULT_FUEL
    lift_ifs: bool = False
    assume_context: bool = False
    suppressed: frozenset = frozenset()
    exhausted: bool = False

    def spend(self) -> None:
        if self.fuel <= 0:
            raise FuelExhausted()
        self.fuel -= 1


def rule_size(t: CTerm) -> int:
    """Size for the auto-enable heuristic: calls weigh 2, the rest 1."""
    match t:
        case CConst() | CVar():
            return 1
        case CApp(fn, args):
            w = 1 if fn in _OPERATORS else 2
            return w + sum(rule_size(a) for a in args)
        case CIf(a, b, c):
            return 1 + rule_size(a) + rule_size(b) + rule_size(c)
        case CLet(bindings, body):
            return 1 + sum(1 + rule_size(e) for _, e in bindings) + rule_size(body)
        case CAssume(f):
            return 1 + rule_size(f)
    raise TypeError(f"not a core term: {t!r}")


def unfoldable(name: str, st: RewriteState) -> Optional[CoreDef]:
    """Definition body to unfold, if the enable heuristic admits it."""
    if name in st.suppressed or name in _OPERATORS:
        return None
    d = st.defs.get(name)
    if d is None or d.body is None or d.origin != "user":
        return None
    from .core import split_guarded_body
    try:
        _, inner, _ = split_guarded_body(d)
    except CoreError:
        inner = d.body
    if name in {a.fn for a in _apps(inner)}:
        return None  # recursive
    if rule_size(inner) > ENABLE_SIZE_LIMIT:
        return None
    return d


def _apps(t: CTerm):
    match t:
        case CApp(_, args):
            yield t
            for a in args:
                yield from _apps(a)
        case CIf(a, b, c):
            yield from _apps(a)
            yield from _apps(b)
            yield from _apps(c)
        case CLet(bindings, body):
            for _, e in bindings:
                yield from _apps(e)
            yield from _apps(body)
        case CAssume(f):
            yield from _apps(f)


def _const_int(t: CTerm) -> Optional[int]:
    match t:
        case CConst(VInt(i)):
            return i
    return None


def _fold_ground(t: CApp) -> Optional[CTerm]:
    """Constant-fold operator applications on literal arguments."""
    fn = t.fn
    if fn in ("plus", "minus", "times", "div", "mod", "lt", "le", "gt", "ge"):
        a, b = _const_int(t.args[0]), _const_int(t.args[1])
        if a is None or b is None:
            return None
        if fn in ("div", "mod") and b == 0:
            return None
        from .coreval import _trunc_div
        match fn:
            case "plus":
                return CConst(VInt(a + b))
            case "minus":
                return CConst(VInt(a - b))
            case "times":
                return CConst(VInt(a * b))
            case "div":
                return CConst(VInt(_trunc_div(a, b)))
            case "mod":
                return CConst(VInt(a - b * _trunc_div(a, b)))
            case "lt":
                return CConst(VBool(a < b))
            case "le":
                return CConst(VBool(a <= b))
            case "gt":
                return CConst(VBool(a > b))
            case "ge":
                return CConst(VBool(a >= b))
    if fn == "negate":
        a = _const_int(t.args[0])
        return CConst(VInt(-a)) if a is not None else None
    if fn in ("equal", "noteq"):
        match t.args:
            case (CConst(x), CConst(y)):
                eq = x == y
                return CConst(VBool(eq if fn == "equal" else not eq))
    return None


def _structural_step(t: CTerm, st: RewriteState) -> Optional[CTerm]:
    """Always-on simplifications; one step or None."""
    match t:
        case CIf(CConst(VBool(True)), b, _):
            return b
        case CIf(CConst(VBool(False)), _, c):
            return c
        case CIf(_, b, c) if b == c:
            return b
        case CIf(CApp("not", (inner,)), b, c):
            return CIf(inner, c, b)
        case CApp("not", (CConst(VBool(x)),)):
            return CConst(VBool(not x))
        case CApp("not", (CApp("not", (inner,)),)):
            return inner
        case CApp("and", (CConst(VBool(True)), x)) | CApp("and", (x, CConst(VBool(True)))):
            return x
        case CApp("and", (CConst(VBool(False)), _)):
            return CFALSE
        case CApp("or", (CConst(VBool(False)), x)) | CApp("or", (x, CConst(VBool(False)))):
            return x
        case CApp("or", (CConst(VBool(True)), _)):
            return CTRUE
        case CApp("implies", (CConst(VBool(True)), x)):
            return x
        case CApp("implies", (CConst(VBool(False)), _)):
            return CTRUE
        case CApp("plus", (CConst(VInt(0)), x)) | CApp("plus", (x, CConst(VInt(0)))):
            return x
        case CApp("times", (CConst(VInt(1)), x)) | CApp("times", (x, CConst(VInt(1)))):
            return x
        case CApp("minus", (x, CConst(VInt(0)))):
            return x
        case CApp("equal", (x, y)) if x == y:
            return CTRUE
        case CApp():
            folded = _fold_ground(t)
            if folded is not None:
                return folded
    # accessor-of-constructor and recognizer-of-constructor collapse
    match t:
        case CApp(acc, (CApp(mk, args),)) if "->" in acc and mk.startswith("make-"):
            left, fld = acc.split("->", 1)
            ty = mk[len("make-"):]
            if left == ty:
                d = st.world.maybe_type_def(ty)
                if d is not None and hasattr(d.body, "fields"):
                    names = [n for n, _ in d.body.fields]
                    if fld in names and len(args) == len(names):
                        return args[names.index(fld)]
        case CApp(rec, (CApp(mk, _),)) if rec.endswith("-p") and mk.startswith("make-"):
            rt = recognizer_type(rec)
            from .ast import NamedType
            if rt == NamedType(mk[len("make-"):]):
                return CTRUE
    if st.lift_ifs:
        match t:
            case CApp(fn, args):
                for i, a in enumerate(args):
                    if isinstance(a, CIf) and fn != "seq":
                        pre, post = args[:i], args[i + 1:]
                        return CIf(a.test,
                                   CApp(fn, pre + (a.then,) + post),
                                   CApp(fn, pre + (a.orelse,) + post))
    return None


def _discharge(cond: CTerm, facts: frozenset, st: RewriteState) -> bool:
    for c in conjuncts(cond):
        if c == CTRUE or c in facts:
            continue
        reduced = _normalize(c, facts, st)
        if reduced == CTRUE or reduced in facts:
            continue
        return False
    return True


def _try_rules(t: CTerm, facts: frozenset, st: RewriteState) -> Optional[CTerm]:
    for rule in st.rules:
        if not rule.enabled:
            continue
        b = match(rule.lhs, t, frozenset(rule.variables))
        if b is None:
            continue
        if rule.conditions:
            inst_conds = [subst_core(c, b) for c in rule.conditions]
            if not all(_discharge(c, facts, st) for c in inst_conds):
                continue
        st.spend()
        return subst_core(rule.rhs, b)
    # assume-true context: typing predicates hold
    if st.assume_context:
        match t:
            case CApp(fn, _) if recognizer_type(fn) is not None:
                st.spend()
                return CTRUE
    # enabled-definition unfolding
    match t:
        case CApp(fn, args):
            d = unfoldable(fn, st)
            if d is not None and len(args) == len(d.params):
                from .core import split_guarded_body
                try:
                    _, inner, _ = split_guarded_body(d)
                except CoreError:
                    inner = d.body
                st.spend()
                return subst_core(inner, dict(zip(d.params, args)))
    return None


def _normalize(t: CTerm, facts: frozenset, st: RewriteState) -> CTerm:
    match t:
        case CConst() | CVar():
            pass
        case CIf(a, b, c):
            a2 = _normalize(a, facts, st)
            b2 = _normalize(b, facts | frozenset(push_not(a2)), st)
            c2 = _normalize(c, facts | frozenset(negate(a2)), st)
            t = CIf(a2, b2, c2)
        case CApp(fn, args):
            if fn == "and":
                # the left conjunct guards the right
                l = _normalize(args[0], facts, st)
                r = _normalize(args[1], facts | frozenset(push_not(l)), st)
                t = CApp(fn, (l, r))
            elif fn == "or":
                l = _normalize(args[0], facts, st)
                r = _normalize(args[1], facts | frozenset(negate(l)), st)
                t = CApp(fn, (l, r))
            else:
                t = CApp(fn, tuple(_normalize(a, facts, st) for a in args))
        case CLet(bindings, body):
            new = tuple((n, _normalize(e, facts, st)) for n, e in bindings)
            t = CLet(new, _normalize(body, facts, st))
        case CAssume(f):
            t = CAssume(_normalize(f, facts, st))
    while True:
        stepped = _structural_step(t, st)
        if stepped is not None:
            st.spend()
        else:
            stepped = _try_rules(t, facts, st)
            if stepped is None:
                return t
        t = _normalize(stepped, facts, st)


def rewrite(t: CTerm, rules, defs: dict[str, CoreDef], world: TypeWorld,
            fuel: int = DEFAULT_FUEL, facts=(), lift_ifs: bool = False,
            assume_context: bool = False, suppressed=frozenset(),
            ) -> tuple[CTerm, bool]:
    """Normalize t; returns (term, fuel_exhausted). On exhaustion the input
    term is returned unchanged with the flag set; callers treat that as a
    failed simplification."""
    st = RewriteState(tuple(rules), defs, world, fuel, lift_ifs,
                      assume_context, frozenset(suppressed))
    fact_set = frozenset(x for f in facts for x in push_not(f))
    try:
        return _normalize(t, fact_set, st), False
    except FuelExhausted:
        st.exhausted = True
        return t, True


# ------------------------------------------------------ theorem orientation


def orient_theorem(th: TheoremUnit, world: TypeWorld) -> RewriteRule:
    """Turn a theorem into a rewrite rule.

    equalities/coimplications orient left to right; implications contribute
    their hypotheses as conditions; a (possibly negated) call conclusion
    rewrites the call to its truth value. Anything else is non-orientable.
    """
    from .translate import to_core_expr

    checker = _Checker(world, th.name)
    env = {n: t for n, t in th.variables}
    checker.infer(th.formula, env, _Ctx(tuple(th.variables)))

    def core(e) -> CTerm:
        return to_core_expr(e, checker.types, world)

    conditions: list[CTerm] = []
    formula = core(th.formula)
    while True:
        match formula:
            case CApp("implies", (h, rest)):
                conditions.extend(conjuncts(h))
                formula = rest
                continue
        break
    match formula:
        case CApp("equal" | "iff", (l, r)):
            lhs, rhs = l, r
        case CApp("not", (CApp(fn, _) as call,)) if fn not in _OPERATORS:
            lhs, rhs = call, CFALSE
        case CApp(fn, _) if fn not in _OPERATORS:
            lhs, rhs = formula, CTRUE
        case _:
            raise NonOrientable(
                f"theorem {th.name} is not an oriented equality or a "
                f"predicate conclusion")
    if isinstance(lhs, (CVar, CConst)):
        raise NonOrientable(f"theorem {th.name} has a trivial left-hand side")
    vars_ = tuple(n for n, _ in th.variables)
    lhs_vars = free_core_vars(lhs) & set(vars_)
    for t in [rhs] + conditions:
        if (free_core_vars(t) & set(vars_)) - lhs_vars:
            raise NonOrientable(
                f"theorem {th.name} binds variables outside its left side")
    return RewriteRule(th.name, vars_, lhs, rhs, tuple(conditions))


def lhs_head(rule: RewriteRule) -> Optional[str]:
    match rule.lhs:
        case CApp(fn, _):
            return fn
    return None
