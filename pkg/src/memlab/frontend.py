"""Lexer and recursive-descent parser for the analyzable C subset.

The subset covers exactly what the fixture corpus needs: ``typedef struct``
definitions, global and local declarations with initializers, pointer types,
assignments, ``if``/``else``/``while``/``return``, calls (allocation
builtins, ``printf`` and user functions), ``sizeof``, ``.``/``->`` field
access, address-of, dereference, pointer casts and comparisons against
``NULL``/``0``.  Anything else is rejected with a located error instead of
a crash.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field

KEYWORDS = {
    "int", "void", "char", "struct", "typedef", "if", "else", "while",
    "return", "sizeof", "NULL",
}

# Library functions modeled directly by the analyzer; no prototype needed.
BUILTIN_FUNCTIONS = {
    "malloc", "calloc", "realloc", "free", "printf",
    "memset", "memcpy", "memmove",
}

PUNCTUATION = [
    "->", "==", "!=", "<=", ">=",
    "(", ")", "{", "}", ";", ",", "*", "&", "=", "<", ">",
    "+", "-", "/", "!", ".",
]


class LexError(Exception):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class ParseError(Exception):
    def __init__(self, message: str, line: int, column: int, expected: set[str] | None = None):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column
        self.expected = expected or set()


class UnsupportedConstruct(ParseError):
    """A real C construct that lies outside the analyzable subset."""


@dataclass(frozen=True)
class SourceUnit:
    """A source file plus an offset -> (line, column) index (1-based)."""

    path: str
    text: str
    _line_starts: tuple[int, ...] = field(default=(), compare=False)

    @classmethod
    def from_text(cls, path: str, text: str) -> "SourceUnit":
        starts = [0]
        for i, ch in enumerate(text):
            if ch == "\n":
                starts.append(i + 1)
        return cls(path=path, text=text, _line_starts=tuple(starts))

    @classmethod
    def from_file(cls, path) -> "SourceUnit":
        with open(path, encoding="utf-8") as fh:
            return cls.from_text(str(path), fh.read())

    def line_col(self, offset: int) -> tuple[int, int]:
        if offset < 0 or offset > len(self.text):
            raise ValueError(f"offset {offset} outside source of length {len(self.text)}")
        lineno = bisect.bisect_right(self._line_starts, offset)
        return lineno, offset - self._line_starts[lineno - 1] + 1

    @property
    def line_count(self) -> int:
        return len(self._line_starts)


@dataclass(frozen=True)
class Token:
    kind: str  # KW | IDENT | INT | STRING | PREPROC | PUNCT
    lexeme: str
    line: int
    column: int
    offset: int


def tokenize(unit: SourceUnit) -> list[Token]:
    """Split a source unit into tokens; whitespace and comments are dropped.

    Concatenating the token lexemes together with the discarded
    whitespace/comments reconstructs the input exactly.
    """
    text = unit.text
    tokens: list[Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            i += 1
            continue
        if text.startswith("//", i):
            j = text.find("\n", i)
            i = n if j < 0 else j
            continue
        if text.startswith("/*", i):
            j = text.find("*/", i + 2)
            if j < 0:
                line, col = unit.line_col(i)
                raise LexError("unterminated block comment", line, col)
            i = j + 2
            continue
        line, col = unit.line_col(i)
        if ch == "#":
            # Preprocessor directives are captured whole and skipped later.
            j = text.find("\n", i)
            j = n if j < 0 else j
            tokens.append(Token("PREPROC", text[i:j], line, col, i))
            i = j
            continue
        if ch == '"':
            j = i + 1
            while j < n:
                if text[j] == "\\":
                    j += 2
                    continue
                if text[j] == '"':
                    break
                j += 1
            if j >= n:
                raise LexError("unterminated string literal", line, col)
            tokens.append(Token("STRING", text[i:j + 1], line, col, i))
            i = j + 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token("INT", text[i:j], line, col, i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            lexeme = text[i:j]
            kind = "KW" if lexeme in KEYWORDS else "IDENT"
            tokens.append(Token(kind, lexeme, line, col, i))
            i = j
            continue
        for punct in PUNCTUATION:
            if text.startswith(punct, i):
                tokens.append(Token("PUNCT", punct, line, col, i))
                i += len(punct)
                break
        else:
            raise LexError(f"illegal character {ch!r}", line, col)
    return tokens


# ---------------------------------------------------------------------------
# Types and AST
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CType:
    """Int, Void, Char, Struct(name) or Pointer(inner)."""

    base: str  # "int" | "void" | "char" | "struct" | "unknown"
    struct_name: str | None = None
    pointer_depth: int = 0

    def pointer_to(self) -> "CType":
        return CType(self.base, self.struct_name, self.pointer_depth + 1)

    @property
    def is_pointer(self) -> bool:
        return self.pointer_depth > 0

    def __str__(self) -> str:
        name = self.struct_name if self.base == "struct" else self.base
        return f"{name}{'*' * self.pointer_depth}"


@dataclass(frozen=True)
class Loc:
    line: int
    column: int


@dataclass
class Node:
    loc: Loc


# Expressions


@dataclass
class Ident(Node):
    name: str


@dataclass
class IntLit(Node):
    value: int


@dataclass
class StrLit(Node):
    value: str


@dataclass
class NullLit(Node):
    pass


@dataclass
class Deref(Node):
    expr: "Expr"


@dataclass
class AddressOf(Node):
    expr: "Expr"


@dataclass
class FieldAccess(Node):
    expr: "Expr"
    fieldname: str
    via_pointer: bool


@dataclass
class Call(Node):
    name: str
    args: list


@dataclass
class SizeofType(Node):
    ctype: CType


@dataclass
class SizeofExpr(Node):
    expr: "Expr"
    # True for the exact shape `sizeof(*identifier)`, which some tools
    # historically failed to size correctly.
    star_of_ident: bool = False


@dataclass
class BinOp(Node):
    op: str
    left: "Expr"
    right: "Expr"


@dataclass
class UnaryNot(Node):
    expr: "Expr"


@dataclass
class Cast(Node):
    ctype: CType
    expr: "Expr"


Expr = Ident | IntLit | StrLit | NullLit | Deref | AddressOf | FieldAccess | Call \
    | SizeofType | SizeofExpr | BinOp | UnaryNot | Cast


# Statements


@dataclass
class VarDecl(Node):
    name: str
    ctype: CType
    init: Expr | None


@dataclass
class Assign(Node):
    target: Expr  # Ident, Deref or FieldAccess
    value: Expr


@dataclass
class ExprStmt(Node):
    expr: Expr  # a call used for effect


@dataclass
class If(Node):
    cond: Expr
    then: list
    els: list | None


@dataclass
class While(Node):
    cond: Expr
    body: list


@dataclass
class Return(Node):
    expr: Expr | None


Stmt = VarDecl | Assign | ExprStmt | If | While | Return


@dataclass
class FunctionDef(Node):
    name: str
    params: list[tuple[str, CType]]
    return_type: CType
    body: list


@dataclass
class StructDef(Node):
    name: str
    fields: list[tuple[str, CType]]


@dataclass
class TranslationUnit:
    unit: SourceUnit
    structs: list[StructDef]
    functions: list[FunctionDef]
    globals: list[VarDecl]

    def function(self, name: str) -> FunctionDef:
        for fn in self.functions:
            if fn.name == name:
                return fn
        raise KeyError(name)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


class _Parser:
    def __init__(self, tokens: list[Token], unit: SourceUnit):
        # Preprocessor lines are recognized by the lexer and skipped here.
        self.tokens = [t for t in tokens if t.kind != "PREPROC"]
        self.unit = unit
        self.pos = 0
        self.struct_names: set[str] = set()

    # -- token helpers --

    def peek(self, ahead: int = 0) -> Token | None:
        idx = self.pos + ahead
        return self.tokens[idx] if idx < len(self.tokens) else None

    def at_end(self) -> bool:
        return self.pos >= len(self.tokens)

    def advance(self) -> Token:
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else None
            line = last.line if last else 1
            col = last.column if last else 1
            raise ParseError("unexpected end of input", line, col)
        self.pos += 1
        return tok

    def check(self, lexeme: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.lexeme == lexeme

    def accept(self, lexeme: str) -> Token | None:
        if self.check(lexeme):
            return self.advance()
        return None

    def expect(self, lexeme: str) -> Token:
        tok = self.peek()
        if tok is None or tok.lexeme != lexeme:
            got = tok.lexeme if tok else "end of input"
            line = tok.line if tok else (self.tokens[-1].line if self.tokens else 1)
            col = tok.column if tok else 1
            raise ParseError(f"expected {lexeme!r}, got {got!r}", line, col, {lexeme})
        return self.advance()

    def error(self, message: str, unsupported: bool = False) -> ParseError:
        tok = self.peek() or (self.tokens[-1] if self.tokens else None)
        line = tok.line if tok else 1
        col = tok.column if tok else 1
        cls = UnsupportedConstruct if unsupported else ParseError
        return cls(message, line, col)

    def loc(self, tok: Token) -> Loc:
        return Loc(tok.line, tok.column)

    # -- type recognition --

    def at_type(self) -> bool:
        tok = self.peek()
        if tok is None:
            return False
        if tok.lexeme in ("int", "void", "char", "struct"):
            return True
        return tok.kind == "IDENT" and tok.lexeme in self.struct_names

    def parse_type(self) -> CType:
        tok = self.advance()
        if tok.lexeme in ("int", "void", "char"):
            ctype = CType(tok.lexeme)
        elif tok.lexeme == "struct":
            name_tok = self.advance()
            ctype = CType("struct", name_tok.lexeme)
        elif tok.kind == "IDENT" and tok.lexeme in self.struct_names:
            ctype = CType("struct", tok.lexeme)
        else:
            raise ParseError(f"expected a type, got {tok.lexeme!r}", tok.line, tok.column)
        while self.accept("*"):
            ctype = ctype.pointer_to()
        return ctype

    # -- top level --

    def parse_translation_unit(self) -> TranslationUnit:
        structs: list[StructDef] = []
        functions: list[FunctionDef] = []
        globals_: list[VarDecl] = []
        while not self.at_end():
            if self.check("typedef"):
                structs.append(self.parse_typedef_struct())
                continue
            if self.check("struct") and self.peek(2) is not None and self.peek(2).lexeme == "{":
                structs.append(self.parse_plain_struct())
                continue
            if not self.at_type():
                raise self.error(f"unsupported top-level construct {self.peek().lexeme!r}",
                                 unsupported=True)
            start = self.peek()
            ctype = self.parse_type()
            name_tok = self.advance()
            if name_tok.kind != "IDENT":
                raise ParseError(f"expected a name, got {name_tok.lexeme!r}",
                                 name_tok.line, name_tok.column)
            if self.check("("):
                functions.append(self.parse_function_rest(ctype, name_tok, start))
            else:
                globals_.append(self.parse_decl_rest(ctype, name_tok, start))
        tu = TranslationUnit(self.unit, structs, functions, globals_)
        self._check_unique(tu)
        return tu

    def _check_unique(self, tu: TranslationUnit) -> None:
        seen: set[str] = set()
        for fn in tu.functions:
            if fn.name in seen:
                raise ParseError(f"duplicate function {fn.name!r}", fn.loc.line, fn.loc.column)
            seen.add(fn.name)
        seen = set()
        for st in tu.structs:
            if st.name in seen:
                raise ParseError(f"duplicate struct {st.name!r}", st.loc.line, st.loc.column)
            seen.add(st.name)

    def parse_typedef_struct(self) -> StructDef:
        start = self.expect("typedef")
        self.expect("struct")
        tag = None
        if self.peek() is not None and self.peek().kind == "IDENT":
            tag = self.advance().lexeme
            if tag is not None:
                self.struct_names.add(tag)
        fields = self.parse_struct_fields()
        alias_tok = self.advance()
        if alias_tok.kind != "IDENT":
            raise ParseError("expected typedef alias name", alias_tok.line, alias_tok.column)
        self.expect(";")
        self.struct_names.add(alias_tok.lexeme)
        return StructDef(self.loc(start), alias_tok.lexeme, fields)

    def parse_plain_struct(self) -> StructDef:
        start = self.expect("struct")
        name_tok = self.advance()
        self.struct_names.add(name_tok.lexeme)
        fields = self.parse_struct_fields()
        self.expect(";")
        return StructDef(self.loc(start), name_tok.lexeme, fields)

    def parse_struct_fields(self) -> list[tuple[str, CType]]:
        self.expect("{")
        fields: list[tuple[str, CType]] = []
        while not self.check("}"):
            ctype = self.parse_type()
            name_tok = self.advance()
            fields.append((name_tok.lexeme, ctype))
            self.expect(";")
        self.expect("}")
        return fields

    def parse_function_rest(self, ret: CType, name_tok: Token, start: Token) -> FunctionDef:
        self.expect("(")
        params: list[tuple[str, CType]] = []
        if not self.check(")"):
            if self.check("void") and self.peek(1) is not None and self.peek(1).lexeme == ")":
                self.advance()
            else:
                while True:
                    ptype = self.parse_type()
                    pname = self.advance()
                    params.append((pname.lexeme, ptype))
                    if not self.accept(","):
                        break
        self.expect(")")
        body = self.parse_block()
        return FunctionDef(self.loc(start), name_tok.lexeme, params, ret, body)

    def parse_decl_rest(self, ctype: CType, name_tok: Token, start: Token) -> VarDecl:
        init = None
        if self.accept("="):
            init = self.parse_expr()
        self.expect(";")
        return VarDecl(self.loc(start), name_tok.lexeme, ctype, init)

    # -- statements --

    def parse_block(self) -> list:
        self.expect("{")
        stmts: list = []
        while not self.check("}"):
            stmts.append(self.parse_stmt())
        self.expect("}")
        return stmts

    def parse_stmt_or_block(self) -> list:
        if self.check("{"):
            return self.parse_block()
        return [self.parse_stmt()]

    def parse_stmt(self) -> Stmt:
        tok = self.peek()
        if tok is None:
            raise self.error("unexpected end of input")
        if tok.lexeme in ("for", "switch", "do", "goto", "break", "continue"):
            raise self.error(f"{tok.lexeme!r} statements are outside the subset",
                             unsupported=True)
        if tok.lexeme == "if":
            return self.parse_if()
        if tok.lexeme == "while":
            return self.parse_while()
        if tok.lexeme == "return":
            self.advance()
            expr = None if self.check(";") else self.parse_expr()
            self.expect(";")
            return Return(self.loc(tok), expr)
        if self.at_type() and not self._looks_like_expression_start():
            ctype = self.parse_type()
            name_tok = self.advance()
            return self.parse_decl_rest(ctype, name_tok, tok)
        expr = self.parse_expr()
        if self.accept("="):
            if not isinstance(expr, (Ident, Deref, FieldAccess)):
                raise ParseError("invalid assignment target", tok.line, tok.column)
            value = self.parse_expr()
            self.expect(";")
            return Assign(self.loc(tok), expr, value)
        self.expect(";")
        if not isinstance(expr, Call):
            raise ParseError("expression statement must be a call", tok.line, tok.column)
        return ExprStmt(self.loc(tok), expr)

    def _looks_like_expression_start(self) -> bool:
        # A struct-typedef name followed by '(' or an operator is an
        # expression (e.g. a call), not the start of a declaration.
        tok = self.peek()
        nxt = self.peek(1)
        if tok is None or nxt is None:
            return False
        if tok.kind == "IDENT" and tok.lexeme in self.struct_names:
            return nxt.lexeme not in ("*",) and nxt.kind != "IDENT"
        return False

    def parse_if(self) -> If:
        start = self.expect("if")
        self.expect("(")
        cond = self.parse_expr()
        self.expect(")")
        then = self.parse_stmt_or_block()
        els = None
        if self.accept("else"):
            if self.check("if"):
                els = [self.parse_if()]
            else:
                els = self.parse_stmt_or_block()
        return If(self.loc(start), cond, then, els)

    def parse_while(self) -> While:
        start = self.expect("while")
        self.expect("(")
        cond = self.parse_expr()
        self.expect(")")
        body = self.parse_stmt_or_block()
        return While(self.loc(start), cond, body)

    # -- expressions (precedence climbing) --

    def parse_expr(self) -> Expr:
        return self.parse_comparison()

    def parse_comparison(self) -> Expr:
        left = self.parse_additive()
        while self.peek() is not None and self.peek().lexeme in ("==", "!=", "<", ">", "<=", ">="):
            op = self.advance()
            right = self.parse_additive()
            left = BinOp(Loc(op.line, op.column), op.lexeme, left, right)
        return left

    def parse_additive(self) -> Expr:
        left = self.parse_multiplicative()
        while self.peek() is not None and self.peek().lexeme in ("+", "-"):
            op = self.advance()
            right = self.parse_multiplicative()
            left = BinOp(Loc(op.line, op.column), op.lexeme, left, right)
        return left

    def parse_multiplicative(self) -> Expr:
        left = self.parse_unary()
        while self.peek() is not None and self.peek().lexeme in ("*", "/"):
            op = self.advance()
            right = self.parse_unary()
            left = BinOp(Loc(op.line, op.column), op.lexeme, left, right)
        return left

    def parse_unary(self) -> Expr:
        tok = self.peek()
        if tok is None:
            raise self.error("unexpected end of input")
        if tok.lexeme == "*":
            self.advance()
            return Deref(self.loc(tok), self.parse_unary())
        if tok.lexeme == "&":
            self.advance()
            return AddressOf(self.loc(tok), self.parse_unary())
        if tok.lexeme == "!":
            self.advance()
            return UnaryNot(self.loc(tok), self.parse_unary())
        if tok.lexeme == "-":
            self.advance()
            operand = self.parse_unary()
            if isinstance(operand, IntLit):
                return IntLit(self.loc(tok), -operand.value)
            return BinOp(self.loc(tok), "-", IntLit(self.loc(tok), 0), operand)
        if tok.lexeme == "sizeof":
            return self.parse_sizeof()
        if tok.lexeme == "(" and self._at_cast():
            self.advance()
            ctype = self.parse_type()
            if not ctype.is_pointer:
                raise self.error("only pointer casts are in the subset", unsupported=True)
            self.expect(")")
            return Cast(self.loc(tok), ctype, self.parse_unary())
        return self.parse_postfix()

    def _at_cast(self) -> bool:
        # '(' <type> '*'... ')' starting a cast; called with peek() == '('.
        tok = self.peek(1)
        if tok is None:
            return False
        if tok.lexeme in ("int", "void", "char", "struct"):
            return True
        return tok.kind == "IDENT" and tok.lexeme in self.struct_names \
            and self.peek(2) is not None and self.peek(2).lexeme == "*"

    def parse_sizeof(self) -> Expr:
        start = self.expect("sizeof")
        self.expect("(")
        if self.at_type():
            ctype = self.parse_type()
            self.expect(")")
            return SizeofType(self.loc(start), ctype)
        inner = self.parse_expr()
        self.expect(")")
        star_of_ident = isinstance(inner, Deref) and isinstance(inner.expr, Ident)
        return SizeofExpr(self.loc(start), inner, star_of_ident)

    def parse_postfix(self) -> Expr:
        expr = self.parse_primary()
        while True:
            tok = self.peek()
            if tok is None:
                return expr
            if tok.lexeme == "(" and isinstance(expr, Ident):
                self.advance()
                args: list = []
                if not self.check(")"):
                    while True:
                        args.append(self.parse_expr())
                        if not self.accept(","):
                            break
                self.expect(")")
                expr = Call(expr.loc, expr.name, args)
                continue
            if tok.lexeme in (".", "->"):
                self.advance()
                name_tok = self.advance()
                expr = FieldAccess(self.loc(tok), expr, name_tok.lexeme, tok.lexeme == "->")
                continue
            return expr

    def parse_primary(self) -> Expr:
        tok = self.advance()
        if tok.kind == "INT":
            return IntLit(self.loc(tok), int(tok.lexeme))
        if tok.kind == "STRING":
            return StrLit(self.loc(tok), tok.lexeme)
        if tok.lexeme == "NULL":
            return NullLit(self.loc(tok))
        if tok.kind == "IDENT":
            return Ident(self.loc(tok), tok.lexeme)
        if tok.lexeme == "(":
            expr = self.parse_expr()
            self.expect(")")
            return expr
        raise ParseError(f"unexpected token {tok.lexeme!r}", tok.line, tok.column)


def parse(tokens: list[Token], unit: SourceUnit) -> TranslationUnit:
    return _Parser(tokens, unit).parse_translation_unit()


def parse_source(path: str, text: str) -> TranslationUnit:
    unit = SourceUnit.from_text(path, text)
    return parse(tokenize(unit), unit)


def parse_file(path) -> TranslationUnit:
    unit = SourceUnit.from_file(path)
    return parse(tokenize(unit), unit)
