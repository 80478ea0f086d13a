"""Tokenizer for .synth source text."""

from __future__ import annotations

from dataclasses import dataclass


class SynthetoError(Exception):
    """Base class for all workbench errors."""


class SyntaxDiagnostic(SynthetoError):
    def __init__(self, message: str, line: int, column: int,
                 expected: tuple[str, ...] = ()):
        self.message = message
        self.line = line
        self.column = column
        self.expected = tuple(sorted(set(expected)))
        detail = f"{line}:{column}: {message}"
        if self.expected:
            detail += " (expected " + ", ".join(self.expected) + ")"
        super().__init__(detail)


KEYWORDS = {
    "struct", "variant", "subtype", "types", "functions", "function",
    "specification", "theorem", "transform", "by", "assumes", "returns",
    "ensures", "let", "return", "if", "else", "forall", "exists", "witness",
    "with", "is", "as", "true", "false",
    "bool", "char", "string", "int", "opt", "set", "seq", "map",
}

# longest-match first
PUNCT = [
    "<==>", "==>", "<==", "==", "!=", "<=", ">=", "&&", "||", "::",
    "(", ")", "{", "}", "[", "]", "<", ">", ",", ";", ":", "?", "|",
    "+", "-", "*", "/", "%", "!", "=", ".",
]


@dataclass(frozen=True)
class Token:
    kind: str   # "ident" | "keyword" | "int" | "string" | "char" | "punct" | "eof"
    text: str
    value: object
    line: int
    column: int


def tokenize(source: str) -> list[Token]:
    """Lex source into tokens. Raises SyntaxDiagnostic on bad input."""
    tokens: list[Token] = []
    i = 0
    line = 1
    col = 1
    n = len(source)

    def advance(k: int) -> None:
        nonlocal i, line, col
        for _ in range(k):
            if source[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        c = source[i]
        if c in " \t\r\n":
            advance(1)
            continue
        if source.startswith("/*", i):
            start_line, start_col = line, col
            advance(2)
            while i < n and not source.startswith("*/", i):
                advance(1)
            if i >= n:
                raise SyntaxDiagnostic("unterminated comment", start_line, start_col)
            advance(2)
            continue
        if c.isdigit():
            start_line, start_col = line, col
            j = i
            while j < n and source[j].isdigit():
                j += 1
            text = source[i:j]
            advance(j - i)
            tokens.append(Token("int", text, int(text), start_line, start_col))
            continue
        if c.isalpha() or c == "_":
            start_line, start_col = line, col
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            text = source[i:j]
            advance(j - i)
            kind = "keyword" if text in KEYWORDS else "ident"
            tokens.append(Token(kind, text, text, start_line, start_col))
            continue
        if c == '"':
            start_line, start_col = line, col
            advance(1)
            chars: list[str] = []
            while i < n and source[i] != '"':
                ch = source[i]
                if ch == "\\":
                    if i + 1 >= n:
                        break
                    esc = source[i + 1]
                    if esc == "n":
                        chars.append("\n")
                    elif esc == "t":
                        chars.append("\t")
                    elif esc in ('"', "\\", "'"):
                        chars.append(esc)
                    else:
                        raise SyntaxDiagnostic(
                            f"bad escape \\{esc}", line, col)
                    advance(2)
                    continue
                if ord(ch) > 255:
                    raise SyntaxDiagnostic(
                        "character outside 8-bit range", line, col)
                chars.append(ch)
                advance(1)
            if i >= n:
                raise SyntaxDiagnostic("unterminated string",
                                       start_line, start_col)
            advance(1)
            tokens.append(Token("string", '"' + "".join(chars) + '"',
                                "".join(chars), start_line, start_col))
            continue
        if c == "'":
            start_line, start_col = line, col
            advance(1)
            if i >= n:
                raise SyntaxDiagnostic("unterminated character literal",
                                       start_line, start_col)
            ch = source[i]
            if ch == "\\":
                if i + 1 >= n:
                    raise SyntaxDiagnostic("unterminated character literal",
                                           start_line, start_col)
                esc = source[i + 1]
                mapping = {"n": "\n", "t": "\t", "'": "'", '"': '"', "\\": "\\"}
                if esc not in mapping:
                    raise SyntaxDiagnostic(f"bad escape \\{esc}", line, col)
                ch = mapping[esc]
                advance(2)
            else:
                if ord(ch) > 255:
                    raise SyntaxDiagnostic(
                        "character outside 8-bit range", line, col)
                advance(1)
            if i >= n or source[i] != "'":
                raise SyntaxDiagnostic("unterminated character literal",
                                       start_line, start_col)
            advance(1)
            tokens.append(Token("char", f"'{ch}'", ch, start_line, start_col))
            continue
        for p in PUNCT:
            if source.startswith(p, i):
                tokens.append(Token("punct", p, p, line, col))
                advance(len(p))
                break
        else:
            raise SyntaxDiagnostic(f"unexpected character {c!r}", line, col)

    tokens.append(Token("eof", "", None, line, col))
    return tokens
