"""Pretty-printer producing canonical .synth text.

Deterministic layout; parse_program(print_toplevel(u)) == [u] for every
well-formed unit. Conditionals in terminal statement position print as
if/else blocks, elsewhere as `test ? a : b`.
"""

from __future__ import annotations

from .ast import (
    Bind, Binary, Call, Conditional, Expression, FunctionCliqueUnit,
    FunctionDefinition, FunctionHeader, FunctionUnit, Literal, ProductAccess,
    ProductBody, ProductConstruct, ProductUpdate, Quantified,
    SpecificationUnit, SubtypeBody, SumAccess, SumBody, SumConstruct, SumTest,
    TheoremUnit, TopLevel, TransformUnit, TupleAccess, TupleConstruct,
    TypeCliqueUnit, TypeDefinition, TypeExpr, TypeUnit, Unary, Var,
)

# precedence levels; higher binds tighter
_TERNARY = 1
_BIN_PREC = {
    "<==>": 2,
    "==>": 3, "<==": 3,
    "||": 4,
    "&&": 5,
    "==": 6, "!=": 6, "<": 6, "<=": 6, ">": 6, ">=": 6,
    "+": 7, "-": 7,
    "*": 8, "/": 8, "%": 8,
}
_RIGHT_ASSOC = {"==>", "<=="}
_NON_ASSOC = {"==", "!=", "<", "<=", ">", ">=", "<==>"}
_UNARY = 9
_POSTFIX = 10


def print_type(t: TypeExpr) -> str:
    return str(t)


def _escape_string(s: str) -> str:
    out = []
    for c in s:
        if c == '"':
            out.append('\\"')
        elif c == "\\":
            out.append("\\\\")
        elif c == "\n":
            out.append("\\n")
        elif c == "\t":
            out.append("\\t")
        else:
            out.append(c)
    return "".join(out)


def _escape_char(c: str) -> str:
    mapping = {"'": "\\'", "\\": "\\\\", "\n": "\\n", "\t": "\\t"}
    return mapping.get(c, c)


def print_expr(e: Expression, prec: int = 0) -> str:
    """Render with minimal parentheses for the given surrounding precedence."""
    match e:
        case Literal(value, kind):
            if kind == "bool":
                return "true" if value else "false"
            if kind == "int":
                return str(value)
            if kind == "string":
                return f'"{_escape_string(value)}"'
            return f"'{_escape_char(value)}'"
        case Var(name):
            return name
        case Unary(op, operand):
            s = op + print_expr(operand, _UNARY)
            return f"({s})" if prec > _UNARY else s
        case Binary(op, left, right):
            p = _BIN_PREC[op]
            if op in _NON_ASSOC:
                lp, rp = p + 1, p + 1
            elif op in _RIGHT_ASSOC:
                lp, rp = p + 1, p
            else:
                lp, rp = p, p + 1
            s = f"{print_expr(left, lp)} {op} {print_expr(right, rp)}"
            return f"({s})" if prec > p else s
        case Conditional(test, then, orelse):
            s = (f"{print_expr(test, _TERNARY + 1)} ? "
                 f"{print_expr(then, _TERNARY)} : {print_expr(orelse, _TERNARY)}")
            return f"({s})" if prec > _TERNARY else s
        case Call("seq", args):
            return "[" + ", ".join(print_expr(a) for a in args) + "]"
        case Call(fn, args):
            return fn + "(" + ", ".join(print_expr(a) for a in args) + ")"
        case Bind():
            # the grammar introduces lets only in statement position
            raise ValueError("let-binding outside statement position")
        case TupleConstruct(comps):
            return "(" + ", ".join(print_expr(c) for c in comps) + ")"
        case TupleAccess(target, index):
            return f"{print_expr(target, _POSTFIX)}.{index}"
        case ProductConstruct(ty, fields):
            inner = ", ".join(f"{n} = {print_expr(v)}" for n, v in fields)
            return f"{ty}({inner})"
        case ProductAccess(target, fld):
            return f"{print_expr(target, _POSTFIX)}.{fld}"
        case ProductUpdate(target, fields):
            inner = ", ".join(f"{n} = {print_expr(v)}" for n, v in fields)
            s = f"{print_expr(target, _POSTFIX)} with {{ {inner} }}"
            return f"({s})" if prec > _POSTFIX else s
        case SumConstruct(ty, alt, fields):
            if fields:
                inner = ", ".join(f"{n} = {print_expr(v)}" for n, v in fields)
                return f"{ty}::{alt}({inner})"
            return f"{ty}::{alt}"
        case SumTest(target, alt):
            s = f"{print_expr(target, 7)} is {alt}"
            return f"({s})" if prec > 6 else s
        case SumAccess(target, alt, fld):
            return f"({print_expr(target)} as {alt}).{fld}"
        case Quantified(quant, bound, matrix):
            vars_s = ", ".join(f"{n}: {print_type(t)}" for n, t in bound)
            s = f"{quant} ({vars_s}) {print_expr(matrix)}"
            return f"({s})" if prec > 0 else s
    raise TypeError(f"not an expression: {e!r}")


def print_body(e: Expression, indent: int) -> str:
    """Statement-form rendering of a function body (without braces)."""
    pad = "  " * indent
    match e:
        case Bind(locals_, body):
            lines = [f"{pad}let {n}: {print_type(t)} = {print_expr(v)};"
                     for n, t, v in locals_]
            lines.append(print_body(body, indent))
            return "\n".join(lines)
        case Conditional(test, then, orelse):
            then_s = print_body(then, indent + 1)
            else_s = print_body(orelse, indent + 1)
            return (f"{pad}if ({print_expr(test)}) {{\n{then_s}\n{pad}}}\n"
                    f"{pad}else {{\n{else_s}\n{pad}}}")
        case _:
            return f"{pad}return {print_expr(e)};"


def _print_typed_names(pairs) -> str:
    return ", ".join(f"{n}: {print_type(t)}" for n, t in pairs)


def print_type_definition(d: TypeDefinition, indent: int = 0) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    match d.body:
        case ProductBody(fields, invariant):
            lines = [f"{pad}struct {d.name} {{"]
            for i, (n, t) in enumerate(fields):
                comma = "," if i < len(fields) - 1 else ""
                lines.append(f"{inner}{n}: {print_type(t)}{comma}")
            if invariant is not None:
                lines.append(f"{inner}| {print_expr(invariant)}")
            lines.append(pad + "}")
            return "\n".join(lines)
        case SumBody(alternatives):
            alts = []
            for name, fields in alternatives:
                if fields:
                    alts.append(f"{name}({_print_typed_names(fields)})")
                else:
                    alts.append(name)
            return f"{pad}variant {d.name} {{" + ", ".join(alts) + "}"
        case SubtypeBody(supertype, var, restriction, witness):
            w = f" witness {print_expr(witness)}" if witness is not None else ""
            return (f"{pad}subtype {d.name} {{\n"
                    f"{inner}{var}: {print_type(supertype)} | "
                    f"{print_expr(restriction)}{w}\n{pad}}}")
    raise TypeError(f"not a type definition body: {d.body!r}")


def print_function_definition(d: FunctionDefinition, indent: int = 0) -> str:
    pad = "  " * indent
    h = d.header
    parts = [f"{pad}function {h.name}({_print_typed_names(h.inputs)})"]
    if d.precondition is not None:
        parts.append(f"{pad}  assumes {print_expr(d.precondition)}")
    parts.append(f"{pad}  returns ({_print_typed_names(h.outputs)})")
    if d.postcondition is not None:
        parts.append(f"{pad}  ensures {print_expr(d.postcondition)}")
    body = print_body(d.body, indent + 1)
    return "\n".join(parts) + " {\n" + body + f"\n{pad}}}"


def print_function_header(h: FunctionHeader) -> str:
    return (f"function {h.name}({_print_typed_names(h.inputs)}) "
            f"returns ({_print_typed_names(h.outputs)})")


def print_toplevel(u: TopLevel) -> str:
    """Canonical source text for one top-level unit."""
    match u:
        case TypeUnit(d):
            return print_type_definition(d)
        case TypeCliqueUnit(defs):
            inner = "\n".join(print_type_definition(d, 1) for d in defs)
            return "types {\n" + inner + "\n}"
        case FunctionUnit(d):
            return print_function_definition(d)
        case FunctionCliqueUnit(defs):
            inner = "\n".join(print_function_definition(d, 1) for d in defs)
            return "functions {\n" + inner + "\n}"
        case SpecificationUnit(name, headers, _, body):
            hs = ", ".join(print_function_header(h) for h in headers)
            return (f"specification {name} ({hs}) {{\n"
                    + print_body(body, 1) + "\n}")
        case TheoremUnit(name, variables, formula):
            if variables:
                vs = f" forall ({_print_typed_names(variables)})"
            else:
                vs = ""
            return f"theorem {name}{vs} {print_expr(formula)}"
        case TransformUnit(new_name, target, transform_name, options):
            opts = ""
            if options:
                inner = ", ".join(f"{n} = {print_expr(v)}" for n, v in options)
                opts = f" {{{inner}}}"
            return (f"function {new_name} = transform {target} "
                    f"by {transform_name}{opts}")
    raise TypeError(f"not a toplevel: {u!r}")
