"""Proof obligations and the randomized-testing oracle.

Run:  python3 demos/02_obligations_and_oracle.py
"""

from syntheto.oracle import check_spec
from syntheto.parser import parse_program
from syntheto.printer import print_expr
from syntheto.session import SessionConfig, SessionState, submit_cell
from syntheto.typecheck import TypeWorld, check_toplevel
from syntheto.values import render

print("== what the checker turns into obligations ==")
[unit] = parse_program("""
function factorial (n:int) assumes n >= 0 returns (out:int) ensures out > 0 {
  if (n == 0) { return 1; }
  else { return n * factorial(n - 1); }
}
""")
typed, obligations = check_toplevel(unit, TypeWorld())
for ob in obligations:
    hyps = " && ".join(print_expr(h) for h in ob.hypotheses) or "true"
    print(f"  [{ob.provenance}] {hyps}  |-  {print_expr(ob.conclusion)}")

print("\n== testing them (1000 hypothesis-satisfying samples each) ==")
session = SessionState(SessionConfig(trials=1000))
session, outcome = submit_cell(session, """
function factorial (n:int) assumes n >= 0 returns (out:int) ensures out > 0 {
  if (n == 0) { return 1; }
  else { return n * factorial(n - 1); }
}
""")
for ob, status in outcome.verdicts:
    print(f"  {ob}: {status}")

print("\n== a false conjecture gets a counterexample ==")
session, outcome = submit_cell(
    session, "theorem all_positive forall (x: int) x > 0")
print(f"  {outcome.kind}: {outcome.detail}")

print("\n== second-order specifications constrain function variables ==")
sorting = """
function ordered(s: seq<int>) returns (b: bool) {
  return length(s) <= 1 || (first(s) <= first(rest(s)) && ordered(rest(s)));
}
function remove_one(x: int, s: seq<int>) returns (o: seq<int>) {
  return is_empty(s) ? [] : (first(s) == x ? rest(s) : cons(first(s), remove_one(x, rest(s))));
}
function permutation(a: seq<int>, b: seq<int>) returns (ok: bool) {
  return is_empty(a) ? is_empty(b)
       : (member(first(a), b) && permutation(rest(a), remove_one(first(a), b)));
}
function insert_sorted(x: int, s: seq<int>) returns (o: seq<int>) {
  return is_empty(s) ? [x] : (x <= first(s) ? cons(x, s) : cons(first(s), insert_sorted(x, rest(s))));
}
function insertion_sort(input: seq<int>) returns (output: seq<int>) {
  return is_empty(input) ? [] : insert_sorted(first(input), insertion_sort(rest(input)));
}
function identity_seq(input: seq<int>) returns (output: seq<int>) {
  return input;
}
specification sort_spec
  (function sort (input: seq<int>) returns (output: seq<int>)) {
   ordered(output) && permutation(output, input);
}
"""
fresh = SessionState(SessionConfig(trials=400))
from syntheto.session import cells_of_source
for cell in cells_of_source(sorting):
    fresh, out = submit_cell(fresh, cell)
    assert out.ok, out.detail

spec = fresh.world.entries["sort_spec"].unit
good = check_spec(spec, {"sort": "insertion_sort"}, fresh.world, trials=400)
print(f"  insertion_sort vs sort_spec: {good.status} ({good.trials} samples)")
bad = check_spec(spec, {"sort": "identity_seq"}, fresh.world, trials=400)
unsorted = render(bad.counterexample["input"])
print(f"  identity_seq vs sort_spec:  {bad.status}, e.g. input = {unsorted}")
