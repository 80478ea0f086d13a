"""Tour of the surface language: parse, print, inspect, evaluate.

Run:  python3 demos/01_surface_language.py
"""

from syntheto.parser import parse_program
from syntheto.printer import print_toplevel
from syntheto.session import SessionConfig, SessionState, submit_cell
from syntheto.interp import call_function
from syntheto.values import VInt, render

FACTORIAL = """
function factorial (n:int) assumes n >= 0 returns (out:int) ensures out > 0 {
  if (n == 0) {
    return 1;
  }
  else {
    return n * factorial(n - 1);
  }
}
"""

print("== parsing ==")
[unit] = parse_program(FACTORIAL)
print(f"parsed a {type(unit).__name__} named {unit.name!r}")

print("\n== canonical pretty-printing ==")
print(print_toplevel(unit))

print("\n== submitting to a session (type check + tested obligations) ==")
session = SessionState(SessionConfig(trials=300))
session, outcome = submit_cell(session, FACTORIAL)
print(f"outcome: {outcome.kind} {outcome.message}")
for ob, status in outcome.verdicts:
    print(f"  obligation {ob}: {status}")

print("\n== evaluating ==")
for n in (0, 5, 10):
    v = call_function("factorial", [VInt(n)], session.world)
    print(f"factorial({n}) = {render(v)}")

print("\n== a failing obligation is a rejected cell ==")
session, outcome = submit_cell(session, """
subtype positive { x: int | x > 0 }
""")
session, outcome = submit_cell(session, """
struct rational {
   numerator: int,
   denominator: positive
  | gcd(abs(numerator), abs(denominator)) == 1
}
""")
session, outcome = submit_cell(session, """
function bad() returns (r: rational) {
  return rational(numerator = 2, denominator = 4);
}
""")
print(f"outcome: {outcome.kind}")
print(f"detail:  {outcome.detail}")
