"""Finite labelled transition systems.

States are dense integers ``0..num_states-1``. Labels are interned: a label is
stored by its index into ``lts.labels`` and only converted to text at parse
and print boundaries.
"""

from __future__ import annotations

import threading
from typing import Iterable, Sequence

from .errors import LtsError

__all__ = ["FiniteLts", "build"]


class FiniteLts:
    """An immutable finite LTS with forward and backward image indexes.

    ``forward[s][a]`` is the sorted tuple of ``a``-successors of ``s`` and
    ``backward[t][a]`` the sorted tuple of ``a``-predecessors of ``t``.
    """

    __slots__ = (
        "num_states",
        "labels",
        "label_index",
        "transitions",
        "initial",
        "forward",
        "backward",
        "_memo",
        "_lock",
    )

    def __init__(self, num_states: int, labels: Sequence[str], transitions: Iterable[tuple[int, int, int]], initial: int = 0):
        labels = tuple(labels)
        if num_states < 1:
            raise LtsError("an LTS needs at least one state")
        if len(set(labels)) != len(labels):
            raise LtsError(f"duplicate label names in {labels!r}")
        if not 0 <= initial < num_states:
            raise LtsError(f"initial state {initial} out of range [0, {num_states})")
        nl = len(labels)
        trans = frozenset(transitions)
        fwd = [[[] for _ in range(nl)] for _ in range(num_states)]
        bwd = [[[] for _ in range(nl)] for _ in range(num_states)]
        for s, a, t in trans:
            if not (0 <= s < num_states and 0 <= t < num_states and 0 <= a < nl):
                raise LtsError(f"transition {(s, a, t)} refers to an invalid state or label index")
            fwd[s][a].append(t)
            bwd[t][a].append(s)
        self.num_states = num_states
        self.labels = labels
        self.label_index = {name: i for i, name in enumerate(labels)}
        self.transitions = trans
        self.initial = initial
        self.forward = tuple(tuple(tuple(sorted(ts)) for ts in row) for row in fwd)
        self.backward = tuple(tuple(tuple(sorted(ss)) for ss in row) for row in bwd)
        self._memo = {}
        self._lock = threading.Lock()

    # -- accessors -------------------------------------------------------

    @property
    def num_labels(self) -> int:
        return len(self.labels)

    @property
    def num_transitions(self) -> int:
        return len(self.transitions)

    def states(self) -> range:
        return range(self.num_states)

    def label_id(self, label: str | int) -> int:
        """Resolve a label name (or pass through a valid index)."""
        if isinstance(label, int):
            if 0 <= label < len(self.labels):
                return label
            raise LtsError(f"label index {label} out of range")
        try:
            return self.label_index[label]
        except KeyError:
            raise LtsError(f"unknown label {label!r}") from None

    def check_state(self, s: int) -> int:
        if not isinstance(s, int) or not 0 <= s < self.num_states:
            raise LtsError(f"state {s!r} out of range [0, {self.num_states})")
        return s

    def image(self, s: int, label: str | int) -> frozenset[int]:
        """All states reachable from ``s`` by one ``label``-transition."""
        return frozenset(self.forward[self.check_state(s)][self.label_id(label)])

    def has_transition(self, s: int, label: str | int, t: int) -> bool:
        self.check_state(t)
        return t in self.forward[self.check_state(s)][self.label_id(label)]

    def named_transitions(self) -> list[tuple[int, str, int]]:
        """Transitions as ``(src, label_name, dst)``, sorted."""
        return sorted((s, self.labels[a], t) for s, a, t in self.transitions)

    def cached(self, key, compute):
        """Per-LTS memo for derived structures (partitions and the like)."""
        with self._lock:
            if key in self._memo:
                return self._memo[key]
        value = compute()
        with self._lock:
            return self._memo.setdefault(key, value)

    # -- value semantics -------------------------------------------------

    def _key(self):
        return (self.num_states, self.labels, self.transitions, self.initial)

    def __eq__(self, other):
        if not isinstance(other, FiniteLts):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return (
            f"FiniteLts(num_states={self.num_states}, labels={list(self.labels)!r}, "
            f"transitions={self.named_transitions()!r})"
        )


def build(num_states: int, labels: Sequence[str], transitions: Iterable[tuple[int, str, int]], initial: int = 0) -> FiniteLts:
    """Build an LTS from ``(src, label, dst)`` triples using label names.

    Duplicate triples collapse (the transition relation is a set).
    """
    labels = list(labels)
    index = {name: i for i, name in enumerate(labels)}
    indexed = []
    for triple in transitions:
        s, name, t = triple
        if name not in index:
            raise LtsError(f"transition {triple!r} uses unknown label {name!r}")
        for x in (s, t):
            if not isinstance(x, int) or not 0 <= x < num_states:
                raise LtsError(f"transition {triple!r} has state {x!r} outside [0, {num_states})")
        indexed.append((s, index[name], t))
    return FiniteLts(num_states, labels, indexed, initial)
