"""Sorting mini-corpus used by specification and round-trip tests."""

SORTING = """\
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
