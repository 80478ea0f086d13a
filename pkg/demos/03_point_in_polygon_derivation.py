"""The flagship derivation: from a clear specification of point-in-polygon
to an optimized implementation, one verified transformation at a time.

Run:  python3 demos/03_point_in_polygon_derivation.py
(takes a couple of minutes at the default 1000-trial oracle; set
SYNTHETO_DEMO_TRIALS to go faster)
"""

import os
import time

from syntheto.printer import print_toplevel
from syntheto.session import (
    SessionConfig, SessionState, cells_of_source, submit_cell,
)

trials = int(os.environ.get("SYNTHETO_DEMO_TRIALS", "1000"))
source = open("corpus/point_in_polygon.synth").read()
cells = cells_of_source(source)
session = SessionState(SessionConfig(trials=trials))

t0 = time.time()
for i, cell in enumerate(cells):
    session, outcome = submit_cell(session, cell)
    marker = "ok " if outcome.ok else "NO "
    print(f"[{i:2}] {marker} {outcome.kind:22} {outcome.message}")
    if outcome.payload:
        print("     derived definition:")
        for unit in outcome.payload:
            for line in print_toplevel(unit).splitlines():
                print(f"     | {line}")
    if not outcome.ok:
        print("     " + outcome.detail)
        break

print(f"\n{len(session.cells)} cells in {time.time() - t0:.1f}s; "
      f"{len(session.state.rules)} rewrite rules in the world")

print("\nThe final chain: point_in_polygon_final -> crossings_count_1 -> "
      "crossings_count_aux_5,\na boolean accumulator instead of a counter, "
      "and vertices instead of edge lists.")
