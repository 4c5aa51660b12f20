"""Reading and writing the Aldebaran ``.aut`` format.

::

    des (0, 3, 2)
    (0, "a", 1)
    (0, "b", 0)
    (1, "a", 0)

The header is ``des (initial_state, num_transitions, num_states)``. Labels may be
double-quoted (with ``\\"`` and ``\\\\`` escapes) or bare tokens without commas
or parentheses.
"""

from __future__ import annotations

import os
import re
from typing import Sequence

from .errors import LtsError, ParseError
from .lts import FiniteLts

__all__ = ["read_aut", "write_aut", "load_aut", "save_aut"]

_HEADER = re.compile(r"^\s*des\s*\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)\s*$")
_EDGE = re.compile(
    r"""^\s*\(\s*(\d+)\s*,\s*
        (?:"((?:[^"\\]|\\.)*)"|([^,()"]*?))
        \s*,\s*(\d+)\s*\)\s*$""",
    re.VERBOSE,
)


def _unescape(s: str) -> str:
    return re.sub(r"\\(.)", r"\1", s)


def _escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def read_aut(text: str, labels: Sequence[str] | None = None) -> FiniteLts:
    """Parse ``.aut`` text.

    Labels are interned in order of first appearance. Passing ``labels`` fixes
    the leading part of the label table, which also keeps labels that no
    transition uses.
    """
    lines = [(n, ln) for n, ln in enumerate(text.splitlines(), 1) if ln.strip()]
    if not lines:
        raise ParseError("empty .aut input", line=1)
    n0, header = lines[0]
    m = _HEADER.match(header)
    if not m:
        raise ParseError(f"bad .aut header {header.strip()!r}", line=n0)
    initial, num_transitions, num_states = map(int, m.groups())

    label_table = list(labels or ())
    index = {name: i for i, name in enumerate(label_table)}
    edges = []
    for n, line in lines[1:]:
        m = _EDGE.match(line)
        if not m:
            raise ParseError(f"bad .aut transition {line.strip()!r}", line=n)
        src, quoted, bare, dst = m.groups()
        name = _unescape(quoted) if quoted is not None else bare.strip()
        if not name:
            raise ParseError("empty label", line=n)
        if name not in index:
            index[name] = len(label_table)
            label_table.append(name)
        src, dst = int(src), int(dst)
        if src >= num_states or dst >= num_states:
            raise ParseError(f"state out of range in {line.strip()!r} (declared {num_states} states)", line=n)
        edges.append((src, index[name], dst))
    if len(edges) != num_transitions:
        raise ParseError(f"header declares {num_transitions} transitions, found {len(edges)}", line=n0)
    try:
        return FiniteLts(num_states, label_table, edges, initial)
    except LtsError as exc:
        raise ParseError(str(exc), line=n0) from None


def write_aut(lts: FiniteLts) -> str:
    """Serialise to ``.aut`` text.

    Transitions are grouped by label index, so reading the result back
    yields the same label order (labels without transitions are dropped
    unless passed to :func:`read_aut`).
    """
    edges = sorted(lts.transitions, key=lambda e: (e[1], e[0], e[2]))
    out = [f"des ({lts.initial}, {len(edges)}, {lts.num_states})"]
    for s, a, t in edges:
        out.append(f'({s}, "{_escape(lts.labels[a])}", {t})')
    return "\n".join(out) + "\n"


def load_aut(path: str | os.PathLike) -> FiniteLts:
    with open(path, encoding="utf-8") as fh:
        return read_aut(fh.read())


def save_aut(lts: FiniteLts, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(write_aut(lts))
