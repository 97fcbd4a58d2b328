"""Lexer and recursive-descent parser for the Wright concrete syntax.

Accepted input is a single Style or Configuration.  Keywords are matched
case-insensitively (inputs in the wild spell them both ways); identifiers are
case-sensitive.  A leading underscore on a name in event position marks the
event as initiated.  ``//`` starts a comment running to end of line, and the
body of a Constraints clause is skipped without lexing.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from .model import (
    Attachment,
    ArchSpec,
    Component,
    Configuration,
    Connector,
    DeclKind,
    Declaration,
    EventRef,
    ExternalChoice,
    InterfaceRef,
    InternalChoice,
    Instance,
    Prefix,
    ProcessExpr,
    Ref,
    SourcePos,
    Style,
    SUCCESS,
    Success,
    Empty,
    Choice,
)

KEYWORDS = {
    "style",
    "configuration",
    "component",
    "connector",
    "port",
    "role",
    "computation",
    "glue",
    "instances",
    "attachments",
    "end",
    "constraints",
    "as",
    "where",
    "tick",
    "skip",
}


class ParseError(Exception):
    def __init__(self, pos: SourcePos, message: str) -> None:
        super().__init__(f"{pos}: {message}")
        self.pos = pos
        self.message = message


class TokKind(Enum):
    KEYWORD = "keyword"
    IDENT = "ident"
    DOTTED = "dotted"       # value is (first, second)
    INITEVENT = "initevent"  # value is (name, scope-or-None)
    ARROW = "->"
    ECHOICE = "[]"
    ICHOICE = "|~|"
    EQUALS = "="
    DOT = "."
    COMMA = ","
    COLON = ":"
    LPAREN = "("
    RPAREN = ")"
    LBRACE = "{"
    RBRACE = "}"
    EOF = "eof"


@dataclass(frozen=True)
class Token:
    kind: TokKind
    value: object
    pos: SourcePos
    text: str = ""  # original spelling (keywords are matched case-folded)

    def __repr__(self) -> str:
        return f"Token({self.kind.name}, {self.value!r}, {self.pos})"


def _is_ident_start(c: str) -> bool:
    return c.isalpha() or c == "_"


def _is_ident_char(c: str) -> bool:
    return c.isalnum() or c == "_"


class _Lexer:
    def __init__(self, source: str) -> None:
        self.src = source
        self.i = 0
        self.line = 1
        self.col = 1

    def pos(self) -> SourcePos:
        return SourcePos(self.line, self.col)

    def _advance(self, n: int = 1) -> None:
        for _ in range(n):
            if self.i < len(self.src):
                if self.src[self.i] == "\n":
                    self.line += 1
                    self.col = 1
                else:
                    self.col += 1
                self.i += 1

    def _peek(self, k: int = 0) -> str:
        j = self.i + k
        return self.src[j] if j < len(self.src) else ""

    def _read_ident(self) -> str:
        start = self.i
        while self.i < len(self.src) and _is_ident_char(self.src[self.i]):
            self._advance()
        return self.src[start : self.i]

    def _skip_constraints_body(self) -> None:
        # The clause body is not Wright; scan raw text for the closing `end`.
        while self.i < len(self.src):
            c = self._peek()
            if _is_ident_start(c):
                start_pos = self.pos()
                word = self._read_ident()
                if word.lower() == "end":
                    # rewind: re-lex `end` as a normal token
                    self.i -= len(word)
                    self.line = start_pos.line
                    self.col = start_pos.column
                    return
            else:
                self._advance()

    def tokens(self) -> list[Token]:
        out: list[Token] = []
        while True:
            while self.i < len(self.src):
                c = self._peek()
                if c in " \t\r\n":
                    self._advance()
                elif c == "/" and self._peek(1) == "/":
                    while self.i < len(self.src) and self._peek() != "\n":
                        self._advance()
                else:
                    break
            if self.i >= len(self.src):
                out.append(Token(TokKind.EOF, None, self.pos()))
                return out
            pos = self.pos()
            c = self._peek()
            if c == "_" and _is_ident_char(self._peek(1)):
                # initiated event: _name or _name.name
                self._advance()
                first = self._read_ident()
                scope = None
                if self._peek() == "." and _is_ident_start(self._peek(1)):
                    self._advance()
                    second = self._read_ident()
                    scope, name = first, second
                else:
                    name = first
                out.append(Token(TokKind.INITEVENT, (name, scope), pos))
            elif _is_ident_start(c):
                word = self._read_ident()
                if word.lower() in KEYWORDS:
                    out.append(Token(TokKind.KEYWORD, word.lower(), pos, word))
                    if word.lower() == "constraints":
                        self._skip_constraints_body()
                elif self._peek() == "." and _is_ident_start(self._peek(1)):
                    self._advance()
                    second = self._read_ident()
                    out.append(Token(TokKind.DOTTED, (word, second), pos))
                else:
                    out.append(Token(TokKind.IDENT, word, pos))
            elif c == "-" and self._peek(1) == ">":
                self._advance(2)
                out.append(Token(TokKind.ARROW, "->", pos))
            elif c == "[" and self._peek(1) == "]":
                self._advance(2)
                out.append(Token(TokKind.ECHOICE, "[]", pos))
            elif c == "|" and self._peek(1) == "~" and self._peek(2) == "|":
                self._advance(3)
                out.append(Token(TokKind.ICHOICE, "|~|", pos))
            elif c == "=":
                self._advance()
                out.append(Token(TokKind.EQUALS, "=", pos))
            elif c == ".":
                self._advance()
                out.append(Token(TokKind.DOT, ".", pos))
            elif c == ",":
                self._advance()
                out.append(Token(TokKind.COMMA, ",", pos))
            elif c == ":":
                self._advance()
                out.append(Token(TokKind.COLON, ":", pos))
            elif c == "(":
                self._advance()
                out.append(Token(TokKind.LPAREN, "(", pos))
            elif c == ")":
                self._advance()
                out.append(Token(TokKind.RPAREN, ")", pos))
            elif c == "{":
                self._advance()
                out.append(Token(TokKind.LBRACE, "{", pos))
            elif c == "}":
                self._advance()
                out.append(Token(TokKind.RBRACE, "}", pos))
            else:
                raise ParseError(pos, f"illegal character {c!r}")


def tokenize(source: str) -> list[Token]:
    return _Lexer(source).tokens()


class Parser:
    """Recursive-descent parser over the token stream."""

    def __init__(self, tokens: list[Token]) -> None:
        self.toks = tokens
        self.k = 0
        self.warnings: list[str] = []

    # -- token plumbing ----------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        j = min(self.k + ahead, len(self.toks) - 1)
        return self.toks[j]

    def next(self) -> Token:
        t = self.peek()
        if t.kind is not TokKind.EOF:
            self.k += 1
        return t

    def at_keyword(self, *words: str) -> bool:
        t = self.peek()
        return t.kind is TokKind.KEYWORD and t.value in words

    def expect_keyword(self, word: str) -> Token:
        t = self.peek()
        if not self.at_keyword(word):
            raise ParseError(t.pos, f"expected '{word}', found {_show(t)}")
        return self.next()

    def expect(self, kind: TokKind) -> Token:
        t = self.peek()
        if t.kind is not kind:
            raise ParseError(t.pos, f"expected {kind.value!r}, found {_show(t)}")
        return self.next()

    def expect_ident(self) -> tuple[str, SourcePos]:
        t = self.peek()
        if t.kind is not TokKind.IDENT:
            raise ParseError(t.pos, f"expected identifier, found {_show(t)}")
        self.next()
        return str(t.value), t.pos

    # -- grammar -----------------------------------------------------------

    def parse_spec(self) -> ArchSpec:
        if self.at_keyword("style"):
            spec = self.parse_style()
        elif self.at_keyword("configuration"):
            spec = self.parse_configuration()
        else:
            t = self.peek()
            raise ParseError(t.pos, f"expected 'Style' or 'Configuration', found {_show(t)}")
        t = self.peek()
        if t.kind is not TokKind.EOF:
            raise ParseError(t.pos, f"trailing input after specification: {_show(t)}")
        return spec

    def parse_style(self) -> Style:
        start = self.expect_keyword("style")
        name, _ = self.expect_ident()
        types = self.parse_type_decls()
        self.expect_keyword("constraints")
        self.expect_keyword("end")
        self.expect_keyword("style")
        return Style(name=name, types=types, pos=start.pos)

    def parse_configuration(self) -> Configuration:
        start = self.expect_keyword("configuration")
        name, _ = self.expect_ident()
        types = self.parse_type_decls()
        self.expect_keyword("instances")
        instances: list[Instance] = []
        while self.peek().kind is TokKind.IDENT:
            instances.extend(self.parse_instance_line())
        self.expect_keyword("attachments")
        attachments: list[Attachment] = []
        while self.peek().kind is TokKind.DOTTED:
            attachments.append(self.parse_attachment())
        self.expect_keyword("end")
        self.expect_keyword("configuration")
        return Configuration(name, types, instances, attachments, pos=start.pos)

    def parse_type_decls(self) -> list[Component | Connector]:
        types: list[Component | Connector] = []
        while True:
            if self.at_keyword("component"):
                types.append(self.parse_component())
            elif self.at_keyword("connector"):
                types.append(self.parse_connector())
            else:
                return types

    def parse_component(self) -> Component:
        start = self.expect_keyword("component")
        name, _ = self.expect_ident()
        ports: list[Declaration] = []
        while self.at_keyword("port"):
            pkw = self.next()
            pname, _ = self.expect_ident()
            self.expect(TokKind.EQUALS)
            body, locals_ = self.parse_process_with_where()
            ports.append(Declaration(DeclKind.PORT, pname, body, locals_, pkw.pos))
        if not ports:
            raise ParseError(self.peek().pos, f"component {name} declares no ports")
        ckw = self.expect_keyword("computation")
        self.expect(TokKind.EQUALS)
        body, locals_ = self.parse_process_with_where()
        computation = Declaration(DeclKind.COMPUTATION, "Computation", body, locals_, ckw.pos)
        return Component(name, ports, computation, pos=start.pos)

    def parse_connector(self) -> Connector:
        start = self.expect_keyword("connector")
        name, _ = self.expect_ident()
        roles: list[Declaration] = []
        while self.at_keyword("role"):
            rkw = self.next()
            rname, _ = self.expect_ident()
            self.expect(TokKind.EQUALS)
            body, locals_ = self.parse_process_with_where()
            roles.append(Declaration(DeclKind.ROLE, rname, body, locals_, rkw.pos))
        if not roles:
            raise ParseError(self.peek().pos, f"connector {name} declares no roles")
        gkw = self.expect_keyword("glue")
        self.expect(TokKind.EQUALS)
        body, locals_ = self.parse_process_with_where()
        glue = Declaration(DeclKind.GLUE, "Glue", body, locals_, gkw.pos)
        return Connector(name, roles, glue, pos=start.pos)

    def parse_instance_line(self) -> list[Instance]:
        names: list[tuple[str, SourcePos]] = [self.expect_ident()]
        while self.peek().kind is TokKind.COMMA:
            self.next()
            names.append(self.expect_ident())
        self.expect(TokKind.COLON)
        tname, _ = self.expect_ident()
        return [Instance(n, tname, p) for n, p in names]

    def parse_attachment(self) -> Attachment:
        left = self.parse_interface()
        self.expect_keyword("as")
        right = self.parse_interface()
        return Attachment(left, right, pos=left.pos)

    def parse_interface(self) -> InterfaceRef:
        t = self.peek()
        if t.kind is not TokKind.DOTTED:
            raise ParseError(t.pos, f"expected instance.point interface, found {_show(t)}")
        self.next()
        inst, point = t.value  # type: ignore[misc]
        return InterfaceRef(inst, point, t.pos)

    def parse_process_with_where(self) -> tuple[ProcessExpr, list[Declaration]]:
        body = self.parse_proc_expr()
        locals_: list[Declaration] = []
        if self.at_keyword("where"):
            self.next()
            self.expect(TokKind.LBRACE)
            while self.peek().kind is TokKind.IDENT:
                lname, lpos = self.expect_ident()
                self.expect(TokKind.EQUALS)
                lbody = self.parse_proc_expr()
                locals_.append(Declaration(DeclKind.WHERE_LOCAL, lname, lbody, [], lpos))
            self.expect(TokKind.RBRACE)
        return body, locals_

    def parse_proc_expr(self) -> ProcessExpr:
        left = self.parse_prefix_expr()
        ops_seen: set[TokKind] = set()
        while self.peek().kind in (TokKind.ECHOICE, TokKind.ICHOICE):
            op = self.next()
            ops_seen.add(op.kind)
            if len(ops_seen) == 2:
                self.warnings.append(
                    f"{op.pos}: '[]' and '|~|' mixed at the same level without "
                    "parentheses; grouping left-to-right"
                )
                ops_seen = {op.kind}
            right = self.parse_prefix_expr()
            cls = ExternalChoice if op.kind is TokKind.ECHOICE else InternalChoice
            left = cls(left, right)
        return left

    def parse_prefix_expr(self) -> ProcessExpr:
        t = self.peek()
        if t.kind is TokKind.INITEVENT:
            self.next()
            name, scope = t.value  # type: ignore[misc]
            ev = EventRef(name, True, (scope,) if scope else ())
            self.expect(TokKind.ARROW)
            return Prefix(ev, self.parse_prefix_expr())
        if t.kind is TokKind.DOTTED:
            self.next()
            first, second = t.value  # type: ignore[misc]
            ev = EventRef(second, False, (first,))
            self.expect(TokKind.ARROW)
            return Prefix(ev, self.parse_prefix_expr())
        if t.kind is TokKind.IDENT and self.peek(1).kind is TokKind.ARROW:
            self.next()
            self.next()
            ev = EventRef(str(t.value), False, ())
            return Prefix(ev, self.parse_prefix_expr())
        return self.parse_atom()

    def parse_atom(self) -> ProcessExpr:
        t = self.peek()
        if t.kind is TokKind.KEYWORD and t.value in ("tick", "skip"):
            self.next()
            return SUCCESS
        if t.kind is TokKind.KEYWORD and t.value in ("glue", "computation"):
            # the glue/computation processes may refer to themselves by name
            self.next()
            return Ref(t.text)
        if t.kind is TokKind.IDENT:
            self.next()
            return Ref(str(t.value))
        if t.kind is TokKind.LPAREN:
            self.next()
            inner = self.parse_proc_expr()
            self.expect(TokKind.RPAREN)
            return inner
        raise ParseError(t.pos, f"expected a process expression, found {_show(t)}")


def _show(t: Token) -> str:
    if t.kind is TokKind.EOF:
        return "end of input"
    if t.kind is TokKind.KEYWORD:
        return f"keyword '{t.value}'"
    if t.kind is TokKind.DOTTED:
        a, b = t.value  # type: ignore[misc]
        return f"'{a}.{b}'"
    if t.kind is TokKind.INITEVENT:
        name, scope = t.value  # type: ignore[misc]
        return "'_" + (f"{scope}.{name}'" if scope else f"{name}'")
    return f"'{t.value}'"


def parse(tokens: list[Token]) -> ArchSpec:
    return Parser(tokens).parse_spec()


def parse_source(source: str) -> tuple[ArchSpec, list[str]]:
    """Parse a whole file; returns the spec and any parser warnings."""
    p = Parser(tokenize(source))
    spec = p.parse_spec()
    return spec, p.warnings


# --- canonical Wright printing (round-trip support) -------------------------


def _event_src(e: EventRef) -> str:
    return ("_" if e.initiated else "") + e.qualified


def _expr_src(expr: ProcessExpr, parent_choice: bool = False) -> str:
    if isinstance(expr, Prefix):
        text = f"{_event_src(expr.event)} -> {_expr_src(expr.rest)}"
        return f"({text})" if parent_choice else text
    if isinstance(expr, Choice):
        op = "[]" if isinstance(expr, ExternalChoice) else "|~|"
        left = _expr_src(expr.left, parent_choice=True)
        right = _expr_src(expr.right, parent_choice=True)
        text = f"{left} {op} {right}"
        return f"({text})" if parent_choice else text
    if isinstance(expr, Ref):
        return expr.name
    if isinstance(expr, Success):
        return "TICK"
    if isinstance(expr, Empty):
        return "SKIP"
    raise TypeError(f"unprintable expression {expr!r}")


def _decl_src(label: str, decl: Declaration, indent: str) -> list[str]:
    lines = [f"{indent}{label} = {_expr_src(decl.body)}"]
    if decl.locals:
        lines[-1] += " where {"
        for loc in decl.locals:
            lines.append(f"{indent}  {loc.name} = {_expr_src(loc.body)}")
        lines.append(f"{indent}}}")
    return lines


def to_wright(spec: ArchSpec) -> str:
    """Render a parsed spec back to canonical Wright source."""
    lines: list[str] = []
    if isinstance(spec, Style):
        lines.append(f"Style {spec.name}")
    else:
        lines.append(f"Configuration {spec.name}")
    for t in spec.types:
        if isinstance(t, Component):
            lines.append(f"Component {t.name}")
            for p in t.ports:
                lines.extend(_decl_src(f"Port {p.name}", p, "  "))
            lines.extend(_decl_src("Computation", t.computation, "  "))
        else:
            lines.append(f"Connector {t.name}")
            for r in t.roles:
                lines.extend(_decl_src(f"Role {r.name}", r, "  "))
            lines.extend(_decl_src("Glue", t.glue, "  "))
    if isinstance(spec, Style):
        lines.append("Constraints")
        lines.append("  // no constraints")
        lines.append("End Style")
    else:
        lines.append("Instances")
        for inst in spec.instances:
            lines.append(f"  {inst.name} : {inst.type_name}")
        lines.append("Attachments")
        for att in spec.attachments:
            lines.append(f"  {att.left} As {att.right}")
        lines.append("End Configuration")
    return "\n".join(lines) + "\n"
