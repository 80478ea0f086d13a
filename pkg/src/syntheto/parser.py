"""Recursive-descent parser for .synth source text.

Statement-looking forms (`return e;`, `if {...} else {...}`, `let ... ;`)
desugar at parse time to expressions; the AST holds only expressions.
The concrete grammar is frozen in docs/grammar.ebnf.
"""

from __future__ import annotations

from .ast import (
    BOOL, CHAR, INT, STRING, Bind, Binary, Call, Conditional, Expression,
    FunctionCliqueUnit, FunctionDefinition, FunctionHeader, FunctionUnit,
    Literal, MapType, NamedType, OptionType, ProductAccess, ProductBody,
    ProductConstruct, ProductUpdate, Quantified, SeqType, SetType,
    SpecificationUnit, SubtypeBody, SumBody, SumConstruct, SumAccess, SumTest,
    TheoremUnit, TopLevel, TransformUnit, TupleAccess, TupleConstruct,
    TupleType, TypeCliqueUnit, TypeDefinition, TypeExpr, TypeUnit, Unary, Var,
    free_vars,
)
from .lexer import SyntaxDiagnostic, Token, tokenize

CMP_OPS = ("==", "!=", "<", "<=", ">", ">=")


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    # ------------------------------------------------------------- plumbing

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def at(self, text: str) -> bool:
        t = self.peek()
        return t.kind in ("punct", "keyword") and t.text == text

    def take(self) -> Token:
        t = self.tokens[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            t = self.peek()
            raise SyntaxDiagnostic(f"unexpected {t.text!r}" if t.kind != "eof"
                                   else "unexpected end of input",
                                   t.line, t.column, expected=(text,))
        return self.take()

    def expect_ident(self) -> str:
        t = self.peek()
        if t.kind != "ident":
            raise SyntaxDiagnostic(
                f"unexpected {t.text!r}" if t.kind != "eof"
                else "unexpected end of input",
                t.line, t.column, expected=("identifier",))
        self.take()
        return t.text

    # ----------------------------------------------------------------- types

    def parse_type(self) -> TypeExpr:
        t = self.peek()
        if t.kind == "keyword":
            if t.text == "bool":
                self.take()
                return BOOL
            if t.text == "char":
                self.take()
                return CHAR
            if t.text == "string":
                self.take()
                return STRING
            if t.text == "int":
                self.take()
                return INT
            if t.text in ("opt", "set", "seq"):
                self.take()
                self.expect("<")
                elem = self.parse_type()
                self.expect(">")
                return {"opt": OptionType, "set": SetType,
                        "seq": SeqType}[t.text](elem)
            if t.text == "map":
                self.take()
                self.expect("<")
                dom = self.parse_type()
                self.expect(",")
                rng = self.parse_type()
                self.expect(">")
                return MapType(dom, rng)
        if t.kind == "ident":
            self.take()
            return NamedType(t.text)
        if self.at("("):
            self.take()
            comps = [self.parse_type()]
            while self.at(","):
                self.take()
                comps.append(self.parse_type())
            self.expect(")")
            if len(comps) < 2:
                raise SyntaxDiagnostic("tuple type needs >= 2 components",
                                       t.line, t.column)
            return TupleType(tuple(comps))
        raise SyntaxDiagnostic(
            f"unexpected {t.text!r}" if t.kind != "eof"
            else "unexpected end of input",
            t.line, t.column, expected=("type",))

    def parse_typed_names(self, *terminators: str) -> tuple[tuple[str, TypeExpr], ...]:
        """name: type, name: type, ... up to (not consuming) a terminator."""
        out: list[tuple[str, TypeExpr]] = []
        if not any(self.at(t) for t in terminators):
            while True:
                name = self.expect_ident()
                self.expect(":")
                out.append((name, self.parse_type()))
                if self.at(","):
                    self.take()
                    continue
                break
        return tuple(out)

    # ----------------------------------------------------------- expressions

    def parse_expr(self) -> Expression:
        if self.at("forall") or self.at("exists"):
            quant = self.take().text
            self.expect("(")
            bound = self.parse_typed_names(")")
            self.expect(")")
            matrix = self.parse_expr()
            return Quantified(quant, bound, matrix)
        return self.parse_ternary()

    def parse_ternary(self) -> Expression:
        test = self.parse_coimp()
        if self.at("?"):
            self.take()
            then = self.parse_expr()
            self.expect(":")
            orelse = self.parse_expr()
            return Conditional(test, then, orelse)
        return test

    def parse_coimp(self) -> Expression:
        left = self.parse_imp()
        while self.at("<==>"):
            self.take()
            left = Binary("<==>", left, self.parse_imp())
        return left

    def parse_imp(self) -> Expression:
        left = self.parse_disj()
        if self.at("==>") or self.at("<=="):
            op = self.take().text
            return Binary(op, left, self.parse_imp())
        return left

    def parse_disj(self) -> Expression:
        left = self.parse_conj()
        while self.at("||"):
            self.take()
            left = Binary("||", left, self.parse_conj())
        return left

    def parse_conj(self) -> Expression:
        left = self.parse_cmp()
        while self.at("&&"):
            self.take()
            left = Binary("&&", left, self.parse_cmp())
        return left

    def parse_cmp(self) -> Expression:
        left = self.parse_add()
        for op in CMP_OPS:
            if self.at(op):
                self.take()
                return Binary(op, left, self.parse_add())
        if self.at("is"):
            self.take()
            alt = self.expect_ident()
            return SumTest(left, alt)
        return left

    def parse_add(self) -> Expression:
        left = self.parse_mul()
        while self.at("+") or self.at("-"):
            op = self.take().text
            left = Binary(op, left, self.parse_mul())
        return left

    def parse_mul(self) -> Expression:
        left = self.parse_unary()
        while self.at("*") or self.at("/") or self.at("%"):
            op = self.take().text
            left = Binary(op, left, self.parse_unary())
        return left

    def parse_unary(self) -> Expression:
        if self.at("!") or self.at("-"):
            op = self.take().text
            return Unary(op, self.parse_unary())
        return self.parse_postfix()

    def parse_postfix(self) -> Expression:
        e = self.parse_primary()
        while True:
            if self.at("."):
                self.take()
                t = self.peek()
                if t.kind == "int":
                    self.take()
                    e = TupleAccess(e, t.value)
                else:
                    e = ProductAccess(e, self.expect_ident())
                continue
            if self.at("with"):
                self.take()
                self.expect("{")
                fields = self.parse_named_args("}")
                self.expect("}")
                e = ProductUpdate(e, fields)
                continue
            return e

    def parse_named_args(self, terminator: str) -> tuple[tuple[str, Expression], ...]:
        out: list[tuple[str, Expression]] = []
        if not self.at(terminator):
            while True:
                name = self.expect_ident()
                self.expect("=")
                out.append((name, self.parse_expr()))
                if self.at(","):
                    self.take()
                    continue
                break
        return tuple(out)

    def parse_primary(self) -> Expression:
        t = self.peek()
        if t.kind == "int":
            self.take()
            return Literal(t.value, "int")
        if t.kind == "string":
            self.take()
            return Literal(t.value, "string")
        if t.kind == "char":
            self.take()
            return Literal(t.value, "char")
        if self.at("true") or self.at("false"):
            self.take()
            return Literal(t.text == "true", "bool")
        if t.kind == "ident":
            self.take()
            name = t.text
            if self.at("::"):
                self.take()
                alt = self.expect_ident()
                fields: tuple[tuple[str, Expression], ...] = ()
                if self.at("("):
                    self.take()
                    fields = self.parse_named_args(")")
                    self.expect(")")
                return SumConstruct(name, alt, fields)
            if self.at("("):
                self.take()
                # named arguments => product construction
                if (self.peek().kind == "ident" and self.peek(1).kind == "punct"
                        and self.peek(1).text == "="
                        and not (self.peek(2).kind == "punct"
                                 and self.peek(2).text == "=")):
                    fields = self.parse_named_args(")")
                    self.expect(")")
                    return ProductConstruct(name, fields)
                args: list[Expression] = []
                if not self.at(")"):
                    while True:
                        args.append(self.parse_expr())
                        if self.at(","):
                            self.take()
                            continue
                        break
                self.expect(")")
                return Call(name, tuple(args))
            return Var(name)
        if self.at("("):
            self.take()
            inner = self.parse_expr()
            if self.at("as"):
                self.take()
                alt = self.expect_ident()
                self.expect(")")
                self.expect(".")
                field = self.expect_ident()
                return SumAccess(inner, alt, field)
            if self.at(","):
                comps = [inner]
                while self.at(","):
                    self.take()
                    comps.append(self.parse_expr())
                self.expect(")")
                return TupleConstruct(tuple(comps))
            self.expect(")")
            return inner
        if self.at("["):
            self.take()
            args = []
            if not self.at("]"):
                while True:
                    args.append(self.parse_expr())
                    if self.at(","):
                        self.take()
                        continue
                    break
            self.expect("]")
            return Call("seq", tuple(args))
        raise SyntaxDiagnostic(
            f"unexpected {t.text!r}" if t.kind != "eof"
            else "unexpected end of input",
            t.line, t.column, expected=("expression",))

    # ------------------------------------------------------------ statements

    def parse_block(self) -> Expression:
        """{ let ...; ... terminal } desugared to a single expression."""
        self.expect("{")
        locals_: list[tuple[str, TypeExpr, Expression]] = []
        while self.at("let"):
            self.take()
            name = self.expect_ident()
            self.expect(":")
            ty = self.parse_type()
            self.expect("=")
            init = self.parse_expr()
            self.expect(";")
            locals_.append((name, ty, init))
        body = self.parse_terminal()
        self.expect("}")
        if locals_:
            return Bind(tuple(locals_), body)
        return body

    def parse_terminal(self) -> Expression:
        if self.at("return"):
            self.take()
            e = self.parse_expr()
            self.expect(";")
            return e
        if self.at("if"):
            return self.parse_if_statement()
        e = self.parse_expr()
        if self.at(";"):
            self.take()
        return e

    def parse_if_statement(self) -> Expression:
        self.expect("if")
        self.expect("(")
        test = self.parse_expr()
        self.expect(")")
        then = self.parse_block()
        self.expect("else")
        if self.at("if"):
            orelse = self.parse_if_statement()
        else:
            orelse = self.parse_block()
        return Conditional(test, then, orelse)

    # -------------------------------------------------------------- toplevel

    def parse_type_definition(self) -> TypeDefinition:
        if self.at("struct"):
            self.take()
            name = self.expect_ident()
            self.expect("{")
            fields = self.parse_typed_names("|", "}")
            invariant = None
            if self.at("|"):
                self.take()
                invariant = self.parse_expr()
            self.expect("}")
            return TypeDefinition(name, ProductBody(fields, invariant))
        if self.at("variant"):
            self.take()
            name = self.expect_ident()
            self.expect("{")
            alts: list[tuple[str, tuple[tuple[str, TypeExpr], ...]]] = []
            while True:
                alt_name = self.expect_ident()
                alt_fields: tuple[tuple[str, TypeExpr], ...] = ()
                if self.at("("):
                    self.take()
                    alt_fields = self.parse_typed_names(")")
                    self.expect(")")
                alts.append((alt_name, alt_fields))
                if self.at(","):
                    self.take()
                    continue
                break
            self.expect("}")
            return TypeDefinition(name, SumBody(tuple(alts)))
        if self.at("subtype"):
            self.take()
            name = self.expect_ident()
            self.expect("{")
            var = self.expect_ident()
            self.expect(":")
            supertype = self.parse_type()
            self.expect("|")
            restriction = self.parse_expr()
            witness = None
            if self.at("witness"):
                self.take()
                witness = self.parse_expr()
            self.expect("}")
            return TypeDefinition(name, SubtypeBody(supertype, var,
                                                    restriction, witness))
        t = self.peek()
        raise SyntaxDiagnostic(
            f"unexpected {t.text!r}", t.line, t.column,
            expected=("struct", "variant", "subtype"))

    def parse_function_header(self) -> FunctionHeader:
        self.expect("function")
        name = self.expect_ident()
        self.expect("(")
        inputs = self.parse_typed_names(")")
        self.expect(")")
        self.expect("returns")
        self.expect("(")
        outputs = self.parse_typed_names(")")
        self.expect(")")
        return FunctionHeader(name, inputs, outputs)

    def parse_function_definition(self) -> FunctionDefinition:
        self.expect("function")
        name = self.expect_ident()
        self.expect("(")
        inputs = self.parse_typed_names(")")
        self.expect(")")
        precondition = None
        if self.at("assumes"):
            self.take()
            precondition = self.parse_expr()
        self.expect("returns")
        self.expect("(")
        outputs = self.parse_typed_names(")")
        self.expect(")")
        postcondition = None
        if self.at("ensures"):
            self.take()
            postcondition = self.parse_expr()
        body = self.parse_block()
        return FunctionDefinition(FunctionHeader(name, inputs, outputs),
                                  precondition, postcondition, body)

    def parse_toplevel(self) -> TopLevel:
        if self.at("struct") or self.at("variant") or self.at("subtype"):
            return TypeUnit(self.parse_type_definition())
        if self.at("types"):
            self.take()
            self.expect("{")
            defs = []
            while not self.at("}"):
                defs.append(self.parse_type_definition())
            self.expect("}")
            return TypeCliqueUnit(tuple(defs))
        if self.at("functions"):
            self.take()
            self.expect("{")
            defs = []
            while not self.at("}"):
                defs.append(self.parse_function_definition())
            self.expect("}")
            return FunctionCliqueUnit(tuple(defs))
        if self.at("function"):
            # transform invocation: function NEW = transform OLD by NAME {...}
            if (self.peek(1).kind == "ident" and self.peek(2).kind == "punct"
                    and self.peek(2).text == "="):
                self.take()
                new_name = self.expect_ident()
                self.expect("=")
                self.expect("transform")
                target = self.expect_ident()
                self.expect("by")
                t = self.peek()
                if t.kind == "ident":
                    transform_name = self.expect_ident()
                else:
                    raise SyntaxDiagnostic("expected transform name",
                                           t.line, t.column,
                                           expected=("identifier",))
                options: tuple[tuple[str, Expression], ...] = ()
                if self.at("{"):
                    self.take()
                    options = self.parse_named_args("}")
                    self.expect("}")
                return TransformUnit(new_name, target, transform_name, options)
            return FunctionUnit(self.parse_function_definition())
        if self.at("specification"):
            self.take()
            name = self.expect_ident()
            self.expect("(")
            headers = [self.parse_function_header()]
            while self.at(","):
                self.take()
                headers.append(self.parse_function_header())
            self.expect(")")
            body = self.parse_block()
            kind = _spec_body_kind(tuple(headers), body)
            return SpecificationUnit(name, tuple(headers), kind, body)
        if self.at("theorem"):
            self.take()
            name = self.expect_ident()
            variables: tuple[tuple[str, TypeExpr], ...] = ()
            if self.at("forall"):
                self.take()
                self.expect("(")
                variables = self.parse_typed_names(")")
                self.expect(")")
            formula = self.parse_expr()
            return TheoremUnit(name, variables, formula)
        t = self.peek()
        raise SyntaxDiagnostic(
            f"unexpected {t.text!r}" if t.kind != "eof"
            else "unexpected end of input",
            t.line, t.column,
            expected=("struct", "variant", "subtype", "types", "functions",
                      "function", "specification", "theorem"))


def _spec_body_kind(headers: tuple[FunctionHeader, ...],
                    body: Expression) -> str:
    if isinstance(body, Quantified):
        return "quantified"
    if len(headers) == 1:
        io_names = {n for n, _ in headers[0].inputs + headers[0].outputs}
        if free_vars(body) & io_names:
            return "io-relation"
    return "plain"


def parse_program(source: str) -> list[TopLevel]:
    """Parse a whole .synth text into top-level units, in order."""
    return [u for u, _ in parse_program_spans(source)]


def parse_program_spans(source: str) -> list[tuple[TopLevel, tuple[int, int]]]:
    """Like parse_program but returns each unit's (start, end) offsets,
    measured in token positions mapped back to character offsets."""
    tokens = tokenize(source)
    p = _Parser(tokens)
    out: list[tuple[TopLevel, tuple[int, int]]] = []
    line_starts = _line_starts(source)
    while p.peek().kind != "eof":
        start_tok = p.peek()
        unit = p.parse_toplevel()
        end_tok = p.tokens[p.pos - 1] if p.pos > 0 else start_tok
        start = line_starts[start_tok.line - 1] + start_tok.column - 1
        end = line_starts[end_tok.line - 1] + end_tok.column - 1 + len(end_tok.text)
        out.append((unit, (start, end)))
    return out


def _line_starts(source: str) -> list[int]:
    starts = [0]
    for i, c in enumerate(source):
        if c == "\n":
            starts.append(i + 1)
    return starts


def parse_expression(source: str) -> Expression:
    """Parse a single expression (used for transform options and tests)."""
    tokens = tokenize(source)
    p = _Parser(tokens)
    e = p.parse_expr()
    t = p.peek()
    if t.kind != "eof":
        raise SyntaxDiagnostic(f"trailing input {t.text!r}", t.line, t.column)
    return e
