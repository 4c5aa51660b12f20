"""HML formulas: the negation-free grammar with ``ff`` as a primitive.

    phi ::= tt | ff | phi & phi | phi | phi | <a>phi | [a]phi

Formulas are immutable trees with structural equality. Labels are stored by
name and resolved against an LTS only when a formula is evaluated.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from ._deep import deep_safe

__all__ = [
    "Formula",
    "Tt",
    "Ff",
    "And",
    "Or",
    "Diamond",
    "Box",
    "TT",
    "FF",
    "neg",
    "modal_depth",
    "size",
    "height",
    "labels_of",
    "conj",
    "disj",
    "enumerate_formulas",
]


class Formula:
    __slots__ = ()

    def __str__(self):
        from .syntax import pretty

        return pretty(self)

    # Builders, for readability in tests and client code.
    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)

    def __invert__(self):
        return neg(self)


@dataclass(frozen=True, repr=False)
class Tt(Formula):
    def __repr__(self):
        return "TT"


@dataclass(frozen=True, repr=False)
class Ff(Formula):
    def __repr__(self):
        return "FF"


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Diamond(Formula):
    label: str
    body: Formula


@dataclass(frozen=True)
class Box(Formula):
    label: str
    body: Formula


TT = Tt()
FF = Ff()


@deep_safe
def neg(phi: Formula) -> Formula:
    """The dual formula, satisfied exactly where ``phi`` is not."""
    t = type(phi)
    if t is Tt:
        return FF
    if t is Ff:
        return TT
    if t is And:
        return Or(neg(phi.left), neg(phi.right))
    if t is Or:
        return And(neg(phi.left), neg(phi.right))
    if t is Diamond:
        return Box(phi.label, neg(phi.body))
    if t is Box:
        return Diamond(phi.label, neg(phi.body))
    raise TypeError(f"not a formula: {phi!r}")


def _children(phi):
    t = type(phi)
    if t is And or t is Or:
        return (phi.left, phi.right)
    if t is Diamond or t is Box:
        return (phi.body,)
    return ()


def _fold(phi: Formula, leaf, combine):
    # Iterative post-order so that very deep formulas are fine.
    out: dict[int, int] = {}
    stack = [(phi, False)]
    while stack:
        node, done = stack.pop()
        if id(node) in out:
            continue
        kids = _children(node)
        if done or not kids:
            out[id(node)] = combine(node, [out[id(k)] for k in kids]) if kids else leaf
        else:
            stack.append((node, True))
            stack.extend((k, False) for k in kids)
    return out[id(phi)]


def modal_depth(phi: Formula) -> int:
    """Maximum nesting of ``<a>``/``[a]`` modalities."""
    return _fold(phi, 0, lambda node, ks: max(ks) + (1 if type(node) in (Diamond, Box) else 0))


def size(phi: Formula) -> int:
    """Number of AST nodes."""
    return _fold(phi, 1, lambda node, ks: 1 + sum(ks))


def height(phi: Formula) -> int:
    """Longest root-to-leaf path, counted in nodes. Memoised on the root."""
    cached = phi.__dict__.get("_height")
    if cached is None:
        cached = _fold(phi, 1, lambda node, ks: 1 + max(ks))
        object.__setattr__(phi, "_height", cached)
    return cached


def labels_of(phi: Formula) -> frozenset[str]:
    """Labels mentioned in ``phi``. Memoised on the (immutable) root node."""
    cached = phi.__dict__.get("_labels")
    if cached is not None:
        return cached
    found = set()
    seen = set()
    stack = [phi]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        if type(node) in (Diamond, Box):
            found.add(node.label)
        stack.extend(_children(node))
    found = frozenset(found)
    object.__setattr__(phi, "_labels", found)
    return found


def conj(parts: Iterable[Formula]) -> Formula:
    """Right-nested conjunction; the empty conjunction is ``tt``."""
    parts = list(parts)
    if not parts:
        return TT
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = And(p, out)
    return out


def disj(parts: Iterable[Formula]) -> Formula:
    """Right-nested disjunction; the empty disjunction is ``ff``."""
    parts = list(parts)
    if not parts:
        return FF
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Or(p, out)
    return out


def enumerate_formulas(labels: Sequence[str], max_size: int, max_depth: int | None = None) -> Iterator[Formula]:
    """Yield every canonical formula with at most ``max_size`` nodes.

    Canonical means conjunctions and disjunctions are right-nested chains of
    pairwise distinct operands in increasing generation order, so each finite
    set of two or more operands appears exactly once per connective. Up to
    associativity, commutativity and idempotence of ``&`` and ``|`` every
    formula has exactly one canonical representative here. Formulas are
    produced in order of increasing size.
    """
    if max_depth is None:
        max_depth = max_size
    # by_size[n] = list of (formula, id, depth, head_id) where head_id is the id
    # of the first operand of a chain of the same connective (own id otherwise)
    by_size: list[list[tuple]] = [[]]
    next_id = 0

    def emit(bucket, phi, depth, head):
        nonlocal next_id
        bucket.append((phi, next_id, depth, next_id if head is None else head))
        next_id += 1

    for n in range(1, max_size + 1):
        bucket: list[tuple] = []
        if n == 1:
            emit(bucket, TT, 0, None)
            emit(bucket, FF, 0, None)
        else:
            for body, _, d, _ in by_size[n - 1]:
                if d + 1 > max_depth:
                    continue
                for a in labels:
                    emit(bucket, Diamond(a, body), d + 1, None)
                    emit(bucket, Box(a, body), d + 1, None)
            for conn in (And, Or):
                for nl in range(1, n - 1):
                    nr = n - 1 - nl
                    for left, lid, ld, _ in by_size[nl]:
                        if type(left) is conn:
                            continue
                        for right, rid, rd, rhead in by_size[nr]:
                            if type(right) is conn:
                                if lid >= rhead:
                                    continue
                            elif lid >= rid:
                                continue
                            emit(bucket, conn(left, right), max(ld, rd), lid)
        by_size.append(bucket)
        for phi, *_ in bucket:
            yield phi
