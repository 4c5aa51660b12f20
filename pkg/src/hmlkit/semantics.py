"""Satisfaction and denotation of HML formulas over a :class:`FiniteLts`.

The two evaluators are deliberately built differently. :func:`satisfies`
recurses on the formula at a single state and stops quantifying over
successors as soon as the answer is known. :func:`denotation` computes the
full set of satisfying states bottom-up, using predecessor bitmasks for the
modalities. :func:`check_semantic_agreement` compares them.
"""

from __future__ import annotations

from typing import Iterable, Iterator

from ._deep import deep_safe
from .errors import FormulaTooDeepError, UnknownLabelError
from .formula import And, Box, Diamond, Ff, Formula, Or, Tt, height, labels_of
from .lts import FiniteLts

__all__ = [
    "DEFAULT_MAX_HEIGHT",
    "StateSet",
    "satisfies",
    "denotation",
    "check_semantic_agreement",
]

DEFAULT_MAX_HEIGHT = 10_000


class StateSet:
    """A set of states of one LTS, stored as an integer bitmask."""

    __slots__ = ("bits", "capacity")

    def __init__(self, bits: int, capacity: int):
        if bits >> capacity:
            raise ValueError("bitmask has members outside the state range")
        self.bits = bits
        self.capacity = capacity

    @classmethod
    def of(cls, states: Iterable[int], capacity: int) -> "StateSet":
        bits = 0
        for s in states:
            if not 0 <= s < capacity:
                raise ValueError(f"state {s} out of range [0, {capacity})")
            bits |= 1 << s
        return cls(bits, capacity)

    @classmethod
    def full(cls, capacity: int) -> "StateSet":
        return cls((1 << capacity) - 1, capacity)

    def __contains__(self, s: int) -> bool:
        return 0 <= s < self.capacity and bool(self.bits >> s & 1)

    def __iter__(self) -> Iterator[int]:
        x = self.bits
        while x:
            low = x & -x
            yield low.bit_length() - 1
            x ^= low

    def __len__(self) -> int:
        return bin(self.bits).count("1")

    def __eq__(self, other):
        if isinstance(other, StateSet):
            return self.bits == other.bits and self.capacity == other.capacity
        if isinstance(other, (set, frozenset)):
            return set(self) == other
        return NotImplemented

    def __hash__(self):
        return hash((self.bits, self.capacity))

    def complement(self) -> "StateSet":
        return StateSet(((1 << self.capacity) - 1) & ~self.bits, self.capacity)

    def __and__(self, other: "StateSet") -> "StateSet":
        return StateSet(self.bits & other.bits, self.capacity)

    def __or__(self, other: "StateSet") -> "StateSet":
        return StateSet(self.bits | other.bits, self.capacity)

    def to_list(self) -> list[int]:
        return list(self)

    def __repr__(self):
        return f"StateSet({self.to_list()})"


def _check(lts: FiniteLts, phi: Formula, max_height: int):
    if height(phi) > max_height:
        raise FormulaTooDeepError(f"formula height {height(phi)} exceeds the limit {max_height}")
    labels = labels_of(phi)
    if not labels <= lts.label_index.keys():
        raise UnknownLabelError(min(labels - lts.label_index.keys()))


def satisfies(lts: FiniteLts, s: int, phi: Formula, max_height: int = DEFAULT_MAX_HEIGHT) -> bool:
    """Does state ``s`` satisfy ``phi``?

    Raises :class:`UnknownLabelError` if ``phi`` mentions a label outside the
    LTS, and :class:`FormulaTooDeepError` beyond ``max_height`` nested nodes.
    """
    lts.check_state(s)
    _check(lts, phi, max_height)
    return _satisfies(lts.forward, lts.label_index, s, phi)


@deep_safe
def _satisfies(fwd, index, s, phi):
    t = type(phi)
    if t is Tt:
        return True
    if t is Ff:
        return False
    if t is And:
        return _sat(fwd, index, s, phi.left) and _sat(fwd, index, s, phi.right)
    if t is Or:
        return _sat(fwd, index, s, phi.left) or _sat(fwd, index, s, phi.right)
    if t is Diamond:
        for u in fwd[s][index[phi.label]]:
            if _sat(fwd, index, u, phi.body):
                return True
        return False
    if t is Box:
        for u in fwd[s][index[phi.label]]:
            if not _sat(fwd, index, u, phi.body):
                return False
        return True
    raise TypeError(f"not a formula: {phi!r}")


# recursive calls skip the RecursionError wrapper
_sat = _satisfies.__wrapped__


def _predecessor_masks(lts: FiniteLts):
    def compute():
        return tuple(
            tuple(sum(1 << p for p in lts.backward[t][a]) for t in range(lts.num_states))
            for a in range(lts.num_labels)
        )

    return lts.cached("predecessor_masks", compute)


def denotation(phi: Formula, lts: FiniteLts, max_height: int = DEFAULT_MAX_HEIGHT) -> StateSet:
    """The set of states satisfying ``phi``, computed bottom-up."""
    _check(lts, phi, max_height)
    full = (1 << lts.num_states) - 1
    bits = _denote(phi, full, _predecessor_masks(lts), lts.label_index, {})
    return StateSet(bits, lts.num_states)


def _preimage(masks, target):
    out = 0
    while target:
        low = target & -target
        out |= masks[low.bit_length() - 1]
        target ^= low
    return out


@deep_safe
def _denote(phi, full, pre, index, memo):
    # memo is keyed by node identity so shared subformulas are computed once
    key = id(phi)
    if key in memo:
        return memo[key]
    t = type(phi)
    if t is Tt:
        out = full
    elif t is Ff:
        out = 0
    elif t is And:
        out = _den(phi.left, full, pre, index, memo) & _den(phi.right, full, pre, index, memo)
    elif t is Or:
        out = _den(phi.left, full, pre, index, memo) | _den(phi.right, full, pre, index, memo)
    elif t is Diamond:
        out = _preimage(pre[index[phi.label]], _den(phi.body, full, pre, index, memo))
    elif t is Box:
        body = _den(phi.body, full, pre, index, memo)
        out = full & ~_preimage(pre[index[phi.label]], full & ~body)
    else:
        raise TypeError(f"not a formula: {phi!r}")
    memo[key] = out
    return out


_den = _denote.__wrapped__


def check_semantic_agreement(lts: FiniteLts, phi: Formula) -> list[int]:
    """States where :func:`satisfies` and :func:`denotation` disagree (should be none)."""
    den = denotation(phi, lts)
    return [s for s in lts.states() if satisfies(lts, s, phi) != (s in den)]
