"""Notebook session semantics: submit, blocking, edit cascades, replay."""

import re

import pytest

import listings
from syntheto.ast import alpha_equal
from syntheto.printer import print_toplevel
from syntheto.session import (
    BlockedByRejection, Cell, SessionConfig, SessionState, cells_of_source,
    edit_cell, load_notebook, rebuild, save_notebook, submit_cell,
)

FAST = SessionConfig(trials=80)

FIVE_CELLS = [
    "struct point { x: int, y: int }",
    "function getx(p: point) returns (o: int) { return p.x; }",
    "function gety(p: point) returns (o: int) { return p.y; }",
    "function sum_xy(p: point) returns (o: int) { return getx(p) + gety(p); }",
    "theorem sum_comm forall (p: point) getx(p) + gety(p) == gety(p) + getx(p)",
]


def fresh(cells=(), config=FAST) -> SessionState:
    s = SessionState(config)
    for c in cells:
        s, out = submit_cell(s, c)
        assert out.ok, (out.message, out.detail)
    return s


def test_submit_positive_success():
    s = SessionState(FAST)
    s, out = submit_cell(s, listings.POSITIVE)
    assert out.kind == "type-success"
    assert out.message == "positive"


def test_submit_failure_keeps_world():
    s = fresh(FIVE_CELLS[:1])
    before = s.state.fingerprint()
    s, out = submit_cell(s, "function f(x: nosuch) returns (o: int) { return 1; }")
    assert not out.ok
    assert s.cells[-1].status == "rejected"
    assert s.state.fingerprint() == before


def test_blocked_after_rejection():
    s = fresh(FIVE_CELLS[:1])
    s, out = submit_cell(s, "struct point { x: int, y: int }")  # duplicate
    assert not out.ok
    with pytest.raises(BlockedByRejection):
        submit_cell(s, "struct other { a: int }")


def test_rejected_cell_fixable_by_edit():
    s = fresh(FIVE_CELLS[:1])
    s, out = submit_cell(s, "struct point { x: int, y: int }")
    assert not out.ok
    s, outs = edit_cell(s, 1, "struct other { a: int }")
    assert all(o.ok for o in outs)
    s, out = submit_cell(s, FIVE_CELLS[1])
    assert out.ok


def test_edit_cell_0_with_equivalent_definition():
    s = fresh(FIVE_CELLS)
    s, outcomes = edit_cell(s, 0, "struct point { x: int,\n  y: int }")
    assert len(outcomes) == 5
    assert all(o.ok for o in outcomes)
    assert [c.status for c in s.cells] == ["accepted"] * 5


def test_edit_introduces_error_and_staleness():
    s = fresh(FIVE_CELLS)
    s, outcomes = edit_cell(s, 1, "function getx(p: point) returns (o: int) "
                                  "{ return p.nosuchfield; }")
    assert not outcomes[0].ok
    assert [c.status for c in s.cells] == \
        ["accepted", "rejected", "stale", "stale", "stale"]
    # the world stops before the rejected cell
    assert s.world.has("point") and not s.world.has("getx")


def test_prefix_monotonicity_invariant():
    s = fresh(FIVE_CELLS)
    s, _ = edit_cell(s, 2, "function gety(p: point) returns (o: int) "
                           "{ return unknown_fn(p); }")
    statuses = [c.status for c in s.cells]
    first_rejected = statuses.index("rejected")
    assert all(x == "accepted" for x in statuses[:first_rejected])
    assert all(x in ("stale", "unsubmitted") for x in statuses[first_rejected + 1:])


def test_replay_determinism_fingerprint():
    sources = cells_of_source(open("corpus/point_in_polygon.synth").read())
    upto = next(i for i, c in enumerate(sources) if "crossings_count_aux" in c)
    a = rebuild(sources[:upto], FAST)
    b = rebuild(sources[:upto], FAST)
    assert a.state.fingerprint() == b.state.fingerprint()
    assert a.state.fingerprint()  # nonempty


def test_edit_transform_options_reruns_downstream():
    src = open("corpus/point_in_polygon.synth").read()
    sources = cells_of_source(src)
    tail_at = next(i for i, c in enumerate(sources) if "tail_recursion" in c)
    iso_at = next(i for i, c in enumerate(sources) if "isomorphism" in c)
    s = fresh(sources[:iso_at + 1])

    # rename the accumulator upstream: count -> acc
    edited = re.sub(r"\bcount\b", "acc", sources[tail_at])
    s, outcomes = edit_cell(s, tail_at, edited)
    assert all(o.ok for o in outcomes), [o.detail for o in outcomes]
    shown = print_toplevel(s.world.entries["crossings_count_aux_2"].unit)
    assert "acc" in shown and not re.search(r"\bcount\b", shown)

    # the replay oracle: rerunning the edited prefix from scratch agrees
    replayed = rebuild([c.source for c in s.cells], FAST)
    assert replayed.state.fingerprint() == s.state.fingerprint()


def test_save_and_load_notebook():
    s = fresh(FIVE_CELLS)
    text = save_notebook(s)
    sources = load_notebook(text)
    assert sources == FIVE_CELLS
    replayed = rebuild(sources, FAST)
    assert replayed.state.fingerprint() == s.state.fingerprint()


def test_multi_unit_cell_is_atomic():
    s = SessionState(FAST)
    s, out = submit_cell(
        s, "struct a1 { x: int }\nstruct a1 { y: int }")
    assert not out.ok
    assert not s.world.has("a1")


def test_transform_cell_payload_is_back_translation():
    src = open("corpus/point_in_polygon.synth").read()
    sources = cells_of_source(src)
    tail_at = next(i for i, c in enumerate(sources) if "tail_recursion" in c)
    s = fresh(sources[:tail_at + 1])
    out = s.cells[-1].outcomes[-1]
    assert out.kind == "transform-success"
    [payload] = out.payload
    [golden] = __import__("syntheto.parser", fromlist=["parse_program"]) \
        .parse_program(listings.AUX_1)
    assert alpha_equal(payload, golden)


def test_revision_strictly_increases():
    s = SessionState(FAST)
    revs = [s.revision]
    for c in FIVE_CELLS:
        s, _ = submit_cell(s, c)
        revs.append(s.revision)
    assert revs == sorted(set(revs))
