"""A small CCS front-end: parse guarded process definitions, derive their
transitions and compile the reachable part into a :class:`FiniteLts`.

Syntax (tightest binding first)::

    0               inaction
    a.P  'a.P       input / output prefix
    tau.P           silent prefix
    P \\ {a, b}      restriction (postfix, binds looser than prefix)
    P | Q           parallel composition
    P + Q           choice
    A = P           definition (one per line)

``|`` and ``+`` associate to the right. ``#`` starts a comment. A ``.ccs``
file holds definition lines plus any number of bare expression lines, which
become the roots.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping

from ._deep import deep_safe
from .errors import CcsError, ParseError, ResourceLimitError
from .lts import FiniteLts

__all__ = [
    "Action",
    "TAU",
    "Process",
    "Nil",
    "Prefix",
    "Sum",
    "Par",
    "Restrict",
    "Const",
    "NIL",
    "CcsProgram",
    "parse_ccs",
    "parse_process",
    "check_guarded",
    "check_resolved",
    "GuardViolation",
    "step",
    "reachable_lts",
    "pretty_process",
    "DEFAULT_MAX_STATES",
]

DEFAULT_MAX_STATES = 10_000


@dataclass(frozen=True)
class Action:
    """``name`` is None for tau; ``co`` marks an output (``'a``)."""

    name: str | None
    co: bool = False

    def __post_init__(self):
        if self.name is None and self.co:
            raise ValueError("tau has no co-action")
        if self.name is not None and not self.name:
            raise ValueError("action names must be non-empty")
        if self.name == "tau":
            raise ValueError("tau is not a channel name; use TAU")

    @property
    def is_tau(self) -> bool:
        return self.name is None

    def complement(self) -> "Action":
        if self.name is None:
            raise ValueError("tau has no complement")
        return Action(self.name, not self.co)

    def __str__(self):
        if self.name is None:
            return "tau"
        return ("'" if self.co else "") + self.name


TAU = Action(None)


class Process:
    __slots__ = ()

    def __str__(self):
        return pretty_process(self)


@dataclass(frozen=True)
class Nil(Process):
    pass


@dataclass(frozen=True)
class Prefix(Process):
    action: Action
    cont: Process


@dataclass(frozen=True)
class Sum(Process):
    left: Process
    right: Process


@dataclass(frozen=True)
class Par(Process):
    left: Process
    right: Process


@dataclass(frozen=True)
class Restrict(Process):
    proc: Process
    names: frozenset

    def __post_init__(self):
        object.__setattr__(self, "names", frozenset(self.names))
        for n in self.names:
            if not isinstance(n, str) or not n or n.startswith("'") or n == "tau":
                raise ValueError(f"cannot restrict {n!r}: only plain channel names")


@dataclass(frozen=True)
class Const(Process):
    name: str


NIL = Nil()


def _memo_hash(cls):
    # Terms reached through recursion under restriction can nest deeply, and
    # the dataclass hash walks the whole term; remember it per node instead.
    plain = cls.__hash__

    def __hash__(self):
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = plain(self)
            object.__setattr__(self, "_hash", h)
            return h

    cls.__hash__ = __hash__


for _cls in (Nil, Prefix, Sum, Par, Restrict, Const):
    _memo_hash(_cls)


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<co>'[A-Za-z_][A-Za-z0-9_]*)
  | (?P<zero>0)
  | (?P<op>[.+|\\{},()=])
    """,
    re.VERBOSE,
)


class _Lexer:
    def __init__(self, text: str, line: int | None = None, offset: int = 0):
        self.tokens: list[tuple[str, str, int]] = []
        self.line = line
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m:
                raise ParseError(f"unexpected character {text[pos]!r}", pos=offset + pos, line=line)
            kind = m.lastgroup
            if kind != "ws":
                self.tokens.append((kind, m.group(), offset + pos))
            pos = m.end()
        self.end = offset + len(text)
        self.i = 0

    def peek(self, k: int = 0):
        j = self.i + k
        return self.tokens[j] if j < len(self.tokens) else ("eof", "", self.end)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        return ParseError(message, pos=tok[2], line=self.line)

    def expect(self, value: str):
        tok = self.take()
        if tok[1] != value or tok[0] == "eof":
            raise self.error(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok)
        return tok


def _parse_sum(lx: _Lexer) -> Process:
    parts = [_parse_par(lx)]
    while lx.peek()[1] == "+":
        lx.take()
        parts.append(_parse_par(lx))
    out = parts.pop()
    while parts:
        out = Sum(parts.pop(), out)
    return out


def _parse_par(lx: _Lexer) -> Process:
    parts = [_parse_restrict(lx)]
    while lx.peek()[1] == "|":
        lx.take()
        parts.append(_parse_restrict(lx))
    out = parts.pop()
    while parts:
        out = Par(parts.pop(), out)
    return out


def _parse_restrict(lx: _Lexer) -> Process:
    proc = _parse_prefix(lx)
    while lx.peek()[1] == "\\":
        lx.take()
        lx.expect("{")
        names = []
        if lx.peek()[1] != "}":
            while True:
                tok = lx.take()
                if tok[0] != "ident" or tok[1] == "tau":
                    raise lx.error("restriction sets contain plain channel names only", tok)
                names.append(tok[1])
                if lx.peek()[1] != ",":
                    break
                lx.take()
        lx.expect("}")
        proc = Restrict(proc, frozenset(names))
    return proc


def _parse_prefix(lx: _Lexer) -> Process:
    actions = []
    while True:
        kind, text, _ = lx.peek()
        if kind in ("ident", "co") and lx.peek(1)[1] == ".":
            lx.take()
            lx.take()
            if text == "'tau":
                raise lx.error("tau has no co-action")
            if kind == "co":
                actions.append(Action(text[1:], True))
            elif text == "tau":
                actions.append(TAU)
            else:
                actions.append(Action(text))
        else:
            break
    out = _parse_atom(lx)
    while actions:
        out = Prefix(actions.pop(), out)
    return out


def _parse_atom(lx: _Lexer) -> Process:
    tok = lx.take()
    kind, text, _ = tok
    if kind == "zero":
        return NIL
    if kind == "ident":
        if text == "tau":
            raise lx.error("'tau' must be followed by '.'", tok)
        return Const(text)
    if text == "(" and kind == "op":
        inner = _parse_sum(lx)
        lx.expect(")")
        return inner
    if kind == "co":
        raise lx.error(f"co-action {text!r} must be followed by '.'", tok)
    raise lx.error(f"expected a process, found {text or 'end of input'!r}", tok)


@deep_safe
def parse_process(text: str) -> Process:
    """Parse a single process expression."""
    lx = _Lexer(text)
    out = _parse_sum(lx)
    if lx.peek()[0] != "eof":
        raise lx.error(f"unexpected {lx.peek()[1]!r} after process")
    return out


@dataclass(frozen=True)
class GuardViolation:
    """Constant ``occurrence`` appears unguarded in the body of ``definition``.

    ``path`` lists the operators from the body's root down to it.
    """

    definition: str
    occurrence: str
    path: tuple[str, ...]

    def __str__(self):
        where = " > ".join(self.path) or "top level"
        return f"unguarded occurrence of {self.occurrence} in {self.definition} (at {where})"


@dataclass(frozen=True)
class CcsProgram:
    defs: Mapping[str, Process]
    roots: tuple[Process, ...]


def _constants(p: Process) -> set[str]:
    out = set()
    stack = [p]
    while stack:
        q = stack.pop()
        t = type(q)
        if t is Const:
            out.add(q.name)
        elif t is Prefix:
            stack.append(q.cont)
        elif t is Sum or t is Par:
            stack += [q.left, q.right]
        elif t is Restrict:
            stack.append(q.proc)
    return out


def check_guarded(defs: Mapping[str, Process]) -> list[GuardViolation]:
    """Constant occurrences not beneath a prefix, in definition order.

    An empty list means every definition is guarded.
    """
    found = []
    for name, body in defs.items():
        stack = [(body, ())]
        while stack:
            q, path = stack.pop()
            t = type(q)
            if t is Const:
                found.append(GuardViolation(name, q.name, path))
            elif t is Sum or t is Par:
                op = "+" if t is Sum else "|"
                stack.append((q.right, path + (f"{op}.right",)))
                stack.append((q.left, path + (f"{op}.left",)))
            elif t is Restrict:
                stack.append((q.proc, path + ("\\",)))
            # Prefix guards everything below it; Nil has nothing to check
    return found


def check_resolved(defs: Mapping[str, Process], roots: Iterable[Process]):
    """Raise :class:`CcsError` if any constant lacks a definition."""
    for where, p in [*((f"definition of {n}", b) for n, b in defs.items()), *(("root", r) for r in roots)]:
        missing = _constants(p) - defs.keys()
        if missing:
            raise CcsError(f"unresolved constant {sorted(missing)[0]} in {where}")


@deep_safe
def parse_ccs(text: str) -> CcsProgram:
    """Parse a ``.ccs`` program: definitions ``A = P`` and root expressions.

    Raises :class:`ParseError` on syntax errors and :class:`CcsError` on
    unresolved or unguarded constants.
    """
    defs: dict[str, Process] = {}
    roots: list[Process] = []
    offset = 0
    for n, raw in enumerate(text.splitlines(keepends=True), 1):
        line = raw.split("#", 1)[0].rstrip("\r\n")
        if line.strip():
            lx = _Lexer(line, line=n, offset=offset)
            if lx.peek()[0] == "ident" and lx.peek(1)[1] == "=":
                name = lx.take()[1]
                if name == "tau":
                    raise lx.error("'tau' cannot be defined")
                if name in defs:
                    raise ParseError(f"constant {name} defined twice", pos=lx.peek()[2], line=n)
                lx.take()
                body = _parse_sum(lx)
                defs[name] = body
            else:
                roots.append(_parse_sum(lx))
            if lx.peek()[0] != "eof":
                raise lx.error(f"unexpected {lx.peek()[1]!r}")
        offset += len(raw)
    check_resolved(defs, roots)
    violations = check_guarded(defs)
    if violations:
        raise CcsError(str(violations[0]))
    return CcsProgram(defs, tuple(roots))


# -- printing ----------------------------------------------------------------

_LEVEL = {Sum: 1, Par: 2, Restrict: 3, Prefix: 4}


@deep_safe
def pretty_process(p: Process) -> str:
    """Render ``p`` with minimal parentheses; ``parse_process`` inverts it."""

    def go(q, ctx):
        t = type(q)
        if t is Nil:
            return "0"
        if t is Const:
            return q.name
        level = _LEVEL[t]
        if t is Prefix:
            s = f"{q.action}.{go(q.cont, 4)}"
        elif t is Restrict:
            s = f"{go(q.proc, 3)} \\ {{{', '.join(sorted(q.names))}}}"
        else:
            op = " + " if t is Sum else " | "
            s = go(q.left, level + 1) + op + go(q.right, level)
        return f"({s})" if level < ctx else s

    return go(p, 0)


# -- operational semantics ---------------------------------------------------


def step(defs: Mapping[str, Process], p: Process) -> frozenset[tuple[Action, Process]]:
    """All one-step transitions of ``p``.

    Rules: prefix, left/right choice, interleaving on both sides of ``|``,
    synchronisation of complementary actions into tau, restriction (blocks
    both polarities of a restricted name) and constant unfolding.
    """
    return _step(defs, p, {})


def _step(defs, p, memo):
    # memo maps subterms to their transitions; shared across one exploration
    try:
        return memo[p]
    except KeyError:
        pass
    t = type(p)
    if t is Nil:
        out = frozenset()
    elif t is Prefix:
        out = frozenset({(p.action, p.cont)})
    elif t is Sum:
        out = _step(defs, p.left, memo) | _step(defs, p.right, memo)
    elif t is Par:
        left, right = _step(defs, p.left, memo), _step(defs, p.right, memo)
        moves = {(a, Par(l2, p.right)) for a, l2 in left}
        moves |= {(a, Par(p.left, r2)) for a, r2 in right}
        for a, l2 in left:
            if a.is_tau:
                continue
            for b, r2 in right:
                if b.name == a.name and b.co != a.co:
                    moves.add((TAU, Par(l2, r2)))
        out = frozenset(moves)
    elif t is Restrict:
        out = frozenset(
            (a, Restrict(q, p.names)) for a, q in _step(defs, p.proc, memo) if a.is_tau or a.name not in p.names
        )
    elif t is Const:
        try:
            body = defs[p.name]
        except KeyError:
            raise CcsError(f"unresolved constant {p.name}") from None
        out = _step(defs, body, memo)
    else:
        raise TypeError(f"not a process: {p!r}")
    memo[p] = out
    return out


@deep_safe
def reachable_lts(
    defs: Mapping[str, Process],
    roots: Iterable[Process],
    max_states: int = DEFAULT_MAX_STATES,
) -> tuple[FiniteLts, list[Process]]:
    """Breadth-first closure of :func:`step` from ``roots``.

    Returns the LTS and the table mapping state ids to processes; roots get
    the first ids (duplicates share one). Processes are identified only up to
    structural equality. Labels are sorted, with ``tau`` always present.
    """
    table: list[Process] = []
    ids: dict[Process, int] = {}
    queue: deque[int] = deque()

    def intern(q):
        if q not in ids:
            if len(table) >= max_states:
                raise ResourceLimitError(
                    f"state budget of {max_states} exceeded with at least {len(queue) + 1} "
                    "discovered states still unexplored"
                )
            ids[q] = len(table)
            table.append(q)
            queue.append(ids[q])
        return ids[q]

    roots = list(roots)
    check_resolved(defs, roots)
    violations = check_guarded(defs)
    if violations:
        raise CcsError(str(violations[0]))
    for r in roots:
        intern(r)
    edges = []
    memo: dict = {}
    while queue:
        s = queue.popleft()
        for a, q in _step(defs, table[s], memo):
            edges.append((s, str(a), intern(q)))
    labels = sorted({a for _, a, _ in edges} | {"tau"})
    index = {a: i for i, a in enumerate(labels)}
    lts = FiniteLts(len(table), labels, [(s, index[a], t) for s, a, t in edges])
    return lts, table
