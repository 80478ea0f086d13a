"""Shared source fixtures: the surface listings exercised across the suite."""

RATIONAL = """\
struct rational {
   numerator: int,
   denominator: positive
  | gcd(abs(numerator), abs(denominator)) == 1
}
"""

ORIENTATION = "variant orientation {clockwise, counterclockwise, colinear}"

POSITIVE = """\
subtype positive {
  x: int | x > 0
}
"""

FACTORIAL = """\
function factorial (n:int) assumes n >= 0 returns (out:int) ensures out > 0 {
  if (n == 0) {
    return 1;
  }
  else {
    return n * factorial(n - 1);
  }
}
"""

SORT_SPEC = """\
specification sort_spec
  (function sort (input: seq<int>) returns (output: seq<int>)) {
   ordered(output) && permutation(output, input);
}
"""

POINT_EDGE = """\
struct point {
  x: int,
  y: int
}
struct edge {
  p1: point,
  p2: point
}
"""

CONNECTED_PATH = """\
function connected(e1:edge, e2:edge) returns (b:bool) {
  return e1.p2 == e2.p1;
}
function path_p(edges:seq<edge>) returns (b:bool) {
  return length(edges) <= 1
        || (connected(first(edges), first(rest(edges)))
             && path_p(rest(edges)));
}
theorem path_p_rest
  forall(edges:seq<edge>)
    !is_empty(edges) && path_p(edges)
      ==> path_p(rest(edges))
"""

CROSSINGS = """\
/* number of times edge0 crosses edges */
function crossings_count_aux(edge0: edge, edges: seq<edge>)
  assumes path_p(edges)
  returns (n: int) ensures n >= 0 {
  if (is_empty(edges)) {
    return 0;
  }
  else {
    if (edges_intersect(edge0, first(edges))) {
      return 1 + crossings_count_aux(edge0, rest(edges));
  }
  else {
    return crossings_count_aux(edge0, rest(edges));
  }}
}
function crossings_count(p: point, polygon: seq<point>)
  assumes simple_polygon(polygon)
  returns (n: int) ensures n >=0 {
  let pm:point = point(x=max_x(polygon) + 1, y=p.y);  /* pm is outside polygon */
  let e:edge = edge(p1 = p, p2 = pm);
  return crossings_count_aux(e,edges(polygon));
}
/* Top-level function */
function point_in_polygon(p: point, polygon: seq<point>)
  assumes simple_polygon(polygon)
  returns (b: bool) {
  return odd(crossings_count(p,polygon));
}
"""

TAIL_RECURSION_INVOCATION = """\
function crossings_count_aux_1 =
  transform crossings_count_aux
    by tail_recursion {new_parameter_name = count}
"""

# expected result of the tail-recursion step (back-translated display form)
AUX_1 = """\
function crossings_count_aux_1(edge0:edge,edges:seq<edge>,count:int)
  assumes path_p(edges)
  returns (n:int) {
  if (is_empty(edges)) {
     return count;
    }
    else {
      crossings_count_aux_1(edge0,rest(edges),
                              (edges_intersect(edge0, first(edges))
                                ? 1 : 0)
                              + count);
    }
}
"""

ISOMORPHISM_INVOCATION = """\
function crossings_count_aux_2 =
  transform crossings_count_aux_1
    by isomorphism {parameter = edges,
                      new_parameter_name = vertices,
                      old_type = path_p,
                      new_type = points2_p,
                      old_to_new = path_vertices,
                      new_to_old = path,
                      simplify = true}
"""

# expected result of the isomorphism step
AUX_2 = """\
function crossings_count_aux_2(edge0:edge,vertices:seq<point>,count:int)
  assumes (points2_p(vertices) && path_p(path(vertices)))
  returns (n:int) {
  if (is_empty(vertices) || is_empty(rest(vertices))) {
     return count;
   } else {
       crossings_count_aux_2(edge0,rest(vertices),
                               (edge_points_intersect
                                  (edge0.p1,edge0.p2,
                                   first(vertices),first(rest(vertices)))
                                 ? 1 : 0)
                               + count);
   }
}
"""

REMAINING_INVOCATIONS = """\
function crossings_count_aux_3 =
  transform crossings_count_aux_2
    by wrap_output {wrap_function = odd}
function crossings_count_aux_4 =
  transform crossings_count_aux_3
    by finite_difference {expression = odd(count),
                             new_parameter_name = count_odd,
                             simplify = true}
function crossings_count_aux_5 =
  transform crossings_count_aux_4
    by drop_irrelevant_param {parameter = count}
function crossings_count_1 =
  transform crossings_count
    by wrap_output {wrap_function = odd,
                      simplify = true}
function point_in_polygon_final =
  transform point_in_polygon
    by simplify
"""

# expected final optimized function, with the recursive call in its
# self-referential form (a display that instead names the pre-drop
# definition crossings_count_aux_2 denotes the same function, since the
# two agree wherever the dropped counter is consistent; the harness pins
# the self-recursive form).
AUX_5 = """\
function crossings_count_aux_5(edge0:edge,vertices:seq<point>,count_odd:bool)
  assumes (points2_p(vertices) && path_p(path(vertices)))
  returns (b:bool) {
  if (is_empty(vertices) || is_empty(rest(vertices))) {
     return count_odd;
   } else {
       crossings_count_aux_5(edge0,rest(vertices),
                               (edge_points_intersect
                                  (edge0.p1,edge0.p2,
                                   first(vertices),first(rest(vertices)))
                                 ? !count_odd : count_odd));
   }
}
"""

ALL_SECTION_LISTINGS = [
    RATIONAL, ORIENTATION, POSITIVE, FACTORIAL, SORT_SPEC, POINT_EDGE,
    CONNECTED_PATH, CROSSINGS, TAIL_RECURSION_INVOCATION, AUX_1,
    ISOMORPHISM_INVOCATION, AUX_2, REMAINING_INVOCATIONS, AUX_5,
]
