"""Concrete syntax for HML formulas.

Grammar, loosest binding first::

    formula := conj ('|' formula)?
    conj    := unary ('&' conj)?
    unary   := '<' label '>' unary | '[' label ']' unary | atom
    atom    := 'tt' | 'ff' | '(' formula ')'
    label   := bare | '"' chars '"'

Both binary connectives associate to the right. A bare label is any run of
characters other than whitespace, quotes and ``<>[]()&|``; e.g. ``a``,
``tau``, ``'a`` and ``send_1`` are all bare labels.
"""

from __future__ import annotations

import re

from ._deep import deep_safe
from .errors import ParseError
from .formula import FF, TT, And, Box, Diamond, Ff, Formula, Or, Tt

__all__ = ["parse", "pretty", "parse_formula_lines"]

_BARE_LABEL = re.compile(r"""[^\s"<>\[\]()&|]+""")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message, pos=None):
        return ParseError(message, pos=self.pos if pos is None else pos)

    def skip_ws(self):
        text, n = self.text, len(self.text)
        while self.pos < n and text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            found = self.peek() or "end of input"
            raise self.error(f"expected {ch!r}, found {found!r}")
        self.pos += 1

    def formula(self) -> Formula:
        parts = [self.conj()]
        while self.peek() == "|":
            self.pos += 1
            parts.append(self.conj())
        out = parts.pop()
        while parts:
            out = Or(parts.pop(), out)
        return out

    def conj(self) -> Formula:
        parts = [self.unary()]
        while self.peek() == "&":
            self.pos += 1
            parts.append(self.unary())
        out = parts.pop()
        while parts:
            out = And(parts.pop(), out)
        return out

    def unary(self) -> Formula:
        mods = []
        while True:
            ch = self.peek()
            if ch == "<":
                self.pos += 1
                mods.append((Diamond, self.label(">")))
            elif ch == "[":
                self.pos += 1
                mods.append((Box, self.label("]")))
            else:
                break
        out = self.atom()
        while mods:
            cls, lbl = mods.pop()
            out = cls(lbl, out)
        return out

    def label(self, close: str) -> str:
        self.skip_ws()
        start = self.pos
        if self.peek() == '"':
            self.pos += 1
            chars = []
            while True:
                if self.pos >= len(self.text):
                    raise self.error("unterminated quoted label", start)
                c = self.text[self.pos]
                self.pos += 1
                if c == "\\" and self.pos < len(self.text):
                    chars.append(self.text[self.pos])
                    self.pos += 1
                elif c == '"':
                    break
                else:
                    chars.append(c)
            name = "".join(chars)
        else:
            m = _BARE_LABEL.match(self.text, self.pos)
            if not m:
                raise self.error("expected a label")
            name = m.group()
            self.pos = m.end()
        if not name:
            raise self.error("empty label", start)
        self.expect(close)
        return name

    def atom(self) -> Formula:
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            inner = self.formula()
            self.expect(")")
            return inner
        for word, value in (("tt", TT), ("ff", FF)):
            if self.text.startswith(word, self.pos):
                end = self.pos + 2
                if end < len(self.text) and (self.text[end].isalnum() or self.text[end] == "_"):
                    break
                self.pos = end
                return value
        if not ch:
            raise self.error("unexpected end of input, expected a formula")
        raise self.error(f"unexpected {ch!r}, expected a formula")


def parse(text: str) -> Formula:
    """Parse formula text; raises :class:`ParseError` with an offset."""
    p = _Parser(text)
    out = p.formula()
    if p.peek():
        raise p.error(f"unexpected {p.peek()!r} after formula")
    return out


def _label_text(label: str) -> str:
    if _BARE_LABEL.fullmatch(label):
        return label
    return '"' + label.replace("\\", "\\\\").replace('"', '\\"') + '"'


_PREC = {Or: 1, And: 2}


@deep_safe
def pretty(phi: Formula) -> str:
    """Render with the fewest parentheses that still parse back to ``phi``."""
    out: list[str] = []

    def emit(node, ctx):
        t = type(node)
        if t is Tt:
            out.append("tt")
        elif t is Ff:
            out.append("ff")
        elif t is Diamond or t is Box:
            lb = _label_text(node.label)
            out.append(f"<{lb}>" if t is Diamond else f"[{lb}]")
            emit(node.body, 3)
        else:
            prec = _PREC[t]
            wrap = prec < ctx
            if wrap:
                out.append("(")
            # left operand of a right-associative operator binds one level tighter
            emit(node.left, prec + 1)
            out.append(" & " if t is And else " | ")
            emit(node.right, prec)
            if wrap:
                out.append(")")

    emit(phi, 0)
    return "".join(out)


def parse_formula_lines(text: str) -> list[Formula]:
    """One formula per non-blank line; ``#`` starts a comment line."""
    formulas = []
    for n, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            formulas.append(parse(stripped))
        except ParseError as exc:
            raise ParseError(exc.message, pos=exc.pos, line=n) from None
    return formulas
