"""Randomized-testing oracle for proof obligations and specifications.

Bindings are sampled per type and filtered by the hypotheses (rejection);
sample sizes ramp up from 1 to the configured maximum so that both small
structured cases and large ones are exercised. Everything is deterministic
given the seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import random

from .ast import SpecificationUnit, Quantified
from .generate import random_value, random_value_rng
from .interp import EvalConfig, EvalError, call_function, eval_expr
from .lexer import SynthetoError
from .typecheck import Obligation, TypeWorld
from .values import Value, VBool, VTuple

DEFAULT_TRIALS = 1000
DEFAULT_SIZE = 20
DEFAULT_SEED = 0xC0FFEE

_ATTEMPTS_PER_TRIAL = 100
_TRIAL_BUDGET_FACTOR = 10   # extra trial slots to absorb barren sizes


@dataclass(frozen=True)
class TestVerdict:
    status: str  # "pass" | "fail" | "undecided"
    trials: int  # satisfied samples actually evaluated
    counterexample: Optional[dict[str, Value]]
    seed: int
    detail: str = ""

    def __post_init__(self):
        assert self.status in ("pass", "fail", "undecided")


def _sizes(trials: int, size: int):
    """Ramp of per-trial sizes: 1 .. size, skewed toward the small end."""
    size = max(size, 1)
    for i in range(trials):
        yield 1 + (i * size) // max(trials, 1)


class _SizeSchedule:
    """Cycles through sizes 1..size so every size is visited early, with a
    bias toward the last size that produced a hypothesis-satisfying sample.
    Deterministic given the rng."""

    def __init__(self, trials: int, size: int, rng: random.Random):
        self.trials = max(trials, 1)
        self.size = max(size, 1)
        self.rng = rng
        self.good: Optional[int] = None
        self.i = 0

    def next(self) -> int:
        ramp = 1 + (self.i % self.size)
        self.i += 1
        if self.good is not None and self.rng.random() < 0.8:
            return self.good
        return ramp

    def succeeded(self, s: int) -> None:
        self.good = s

    def hopeless(self) -> bool:
        """Every size tried several times without one satisfying sample."""
        return self.good is None and self.i >= max(60, 3 * self.size)


def test_obligation(ob: Obligation, world: TypeWorld,
                    trials: int = DEFAULT_TRIALS, size: int = DEFAULT_SIZE,
                    seed: int = DEFAULT_SEED,
                    check_guards: bool = True) -> TestVerdict:
    """Sample hypothesis-satisfying bindings and evaluate the conclusion.

    check_guards=False evaluates in the total-logic reading; obligations
    about transformation results use it, since their hypotheses already
    restrict sampling to the guarded domain."""
    rng = random.Random(f"{seed}|{ob.id}")
    satisfied = 0
    config = EvalConfig(check_guards=check_guards)
    schedule = _SizeSchedule(trials, size, rng)
    plan = _SamplePlan(ob.variables, ob.hypotheses, world)
    budget = trials * _TRIAL_BUDGET_FACTOR
    while satisfied < trials and schedule.i < budget:
        trial_size = schedule.next()
        binding = _find_satisfying(plan, trial_size, rng, world, config)
        if binding is None:
            if schedule.hopeless():
                break
            continue
        schedule.succeeded(trial_size)
        try:
            v = eval_expr(ob.conclusion, binding, world, config)
        except SynthetoError as exc:
            return TestVerdict("undecided", satisfied, binding, seed,
                               f"evaluation error: {exc}")
        if not (isinstance(v, VBool) and v.value):
            # confirm the counterexample re-evaluates to false
            again = eval_expr(ob.conclusion, binding, world, config)
            assert isinstance(again, VBool) and not again.value
            return TestVerdict("fail", satisfied + 1, binding, seed)
        satisfied += 1
    if satisfied >= trials:
        return TestVerdict("pass", satisfied, None, seed)
    return TestVerdict("undecided", satisfied, None, seed,
                       f"only {satisfied}/{trials} samples satisfied the hypotheses")


class _SamplePlan:
    """Per-obligation sampling plan.

    Variables whose value is pinned by an equation hypothesis
    (v == rhs, with rhs over earlier variables) are computed, not sampled:
    let-bound locals and difference invariants have that shape. Variables
    not mentioned by any hypothesis are drawn only after the constrained
    ones satisfy the hypotheses."""

    def __init__(self, variables, hypotheses, world: TypeWorld):
        from .ast import Binary, Var, free_vars
        from .generate import compile_generator
        self.order = []     # ("sample" | "solve", name, gen-or-rhs)
        determined: dict[str, object] = {}
        remaining = list(hypotheses)
        known: set = set()
        for name, t in variables:
            rhs = None
            for h in remaining:
                match h:
                    case Binary("==", Var(v), r) if v == name and \
                            free_vars(r) <= known:
                        rhs = r
                        break
            if rhs is not None:
                remaining.remove(h)
                self.order.append(("solve", name, rhs))
            else:
                self.order.append(("sample", name,
                                   compile_generator(t, world)))
            known.add(name)
        self.checks = tuple(remaining)
        from .ast import free_vars as fv
        used = set()
        for h in self.checks:
            used |= fv(h)
        # variables a check or a solved rhs depends on must be sampled
        # inside the rejection loop; the rest can be drawn once at the end
        needed = set(used)
        changed = True
        while changed:
            changed = False
            for kind, name, payload in self.order:
                if kind == "solve" and name in needed:
                    extra = fv(payload) - needed
                    if extra:
                        needed |= extra
                        changed = True
        self.needed = needed


def _find_satisfying(plan: _SamplePlan, size: int, rng: random.Random,
                     world: TypeWorld, config: EvalConfig) -> Optional[dict[str, Value]]:
    for _ in range(_ATTEMPTS_PER_TRIAL):
        binding: dict[str, Value] = {}
        try:
            for kind, name, payload in plan.order:
                if name not in plan.needed:
                    continue
                if kind == "sample":
                    binding[name] = payload(size, rng)
                else:
                    binding[name] = eval_expr(payload, binding, world, config)
        except SynthetoError:
            continue
        if _holds_all(plan.checks, binding, world, config):
            try:
                for kind, name, payload in plan.order:
                    if name in plan.needed:
                        continue
                    if kind == "sample":
                        binding[name] = payload(size, rng)
                    else:
                        binding[name] = eval_expr(payload, binding, world,
                                                  config)
            except SynthetoError:
                continue
            return binding
    return None


def _holds_all(hypotheses, binding, world, config) -> bool:
    for h in hypotheses:
        try:
            v = eval_expr(h, binding, world, config)
        except SynthetoError:
            return False
        if not (isinstance(v, VBool) and v.value):
            return False
    return True


def check_spec(spec: SpecificationUnit, bindings: dict[str, str],
               world: TypeWorld, trials: int = DEFAULT_TRIALS,
               size: int = DEFAULT_SIZE, seed: int = DEFAULT_SEED) -> TestVerdict:
    """Test a specification against concrete functions bound to its
    function variables."""
    for h in spec.headers:
        if h.name not in bindings:
            raise EvalError(f"no binding for function variable {h.name!r}")
        target = world.maybe_function_def(bindings[h.name])
        if target is None:
            raise EvalError(f"unknown function {bindings[h.name]!r}")
        th = target.header
        if ([t for _, t in th.inputs] != [t for _, t in h.inputs]
                or [t for _, t in th.outputs] != [t for _, t in h.outputs]):
            raise EvalError(
                f"signature of {bindings[h.name]} does not match "
                f"function variable {h.name}")
    config = EvalConfig(fn_bindings=dict(bindings))
    rng = random.Random(f"{seed}|spec|{spec.name}")

    if spec.body_kind == "io-relation":
        header = spec.headers[0]
        fn = bindings[header.name]
        checked = 0
        for trial_size in _sizes(trials, size):
            binding = {}
            try:
                for name, t in header.inputs:
                    binding[name] = random_value_rng(t, trial_size, rng, world)
                result = call_function(
                    fn, [binding[n] for n, _ in header.inputs], world)
            except SynthetoError:
                continue
            outs = header.outputs
            if len(outs) == 1:
                binding[outs[0][0]] = result
            else:
                assert isinstance(result, VTuple)
                for (n, _), v in zip(outs, result.components):
                    binding[n] = v
            try:
                v = eval_expr(spec.body, binding, world, config)
            except SynthetoError as exc:
                return TestVerdict("undecided", checked, binding, seed,
                                   f"evaluation error: {exc}")
            if not (isinstance(v, VBool) and v.value):
                return TestVerdict("fail", checked + 1, binding, seed)
            checked += 1
        if checked == 0:
            return TestVerdict("undecided", 0, None, seed,
                               "no inputs satisfied the callee guards")
        return TestVerdict("pass", checked, None, seed)

    body = spec.body
    if spec.body_kind == "quantified":
        assert isinstance(body, Quantified)
        variables = body.bound
        matrix = body.matrix
        existential = body.quantifier == "exists"
    else:
        variables = ()
        matrix = body
        existential = False

    checked = 0
    for trial_size in _sizes(trials, size):
        binding = {n: random_value_rng(t, trial_size, rng, world)
                   for n, t in variables}
        try:
            v = eval_expr(matrix, binding, world, config)
        except SynthetoError as exc:
            return TestVerdict("undecided", checked, binding, seed,
                               f"evaluation error: {exc}")
        ok = isinstance(v, VBool) and v.value
        if existential and ok:
            return TestVerdict("pass", checked + 1, binding, seed)
        if not existential and not ok:
            return TestVerdict("fail", checked + 1, binding, seed)
        checked += 1
        if not variables:
            # closed formula: one evaluation decides it
            return TestVerdict("pass" if not existential else "undecided",
                               1, None, seed)
    if existential:
        return TestVerdict("undecided", checked, None, seed,
                           "no witness found")
    return TestVerdict("pass", checked, None, seed)
