"""Bisimilarity, theory equivalence and distinguishing formulas.

Bisimilarity is computed by signature refinement: starting from the single
class of all states, each round gives every state the signature
``(own class, {(label, class of target)})`` and splits classes whose members
disagree. The class assignment after every round is kept, so for any two
non-bisimilar states we know the first round that separated them. That round
bounds the modal depth of the distinguishing formula we synthesise for them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import InvariantViolation, NotABisimulationError, ResourceLimitError
from .formula import FF, TT, And, Box, Diamond, Formula, Or, conj, neg
from .lts import FiniteLts
from .semantics import satisfies

__all__ = [
    "Partition",
    "Counterexample",
    "DistinguishResult",
    "bisimilarity",
    "bisimilar",
    "theory_eq",
    "bisimulation_counterexample",
    "is_bisimulation",
    "theory_eq_bounded",
    "bounded_distinguisher",
    "distinguishing_formula",
    "bisimulation_invariance_check",
    "MAX_ORACLE_STATES",
    "MAX_ORACLE_LABELS",
    "MAX_ORACLE_SIZE",
]

Relation = Iterable[tuple[int, int]]


def _renumber(keys) -> tuple[int, ...]:
    ids: dict = {}
    return tuple(ids.setdefault(k, len(ids)) for k in keys)


@dataclass(frozen=True)
class Partition:
    """Equivalence classes of states, plus the refinement history.

    ``rounds[k][s]`` is the class of ``s`` after ``k`` refinement rounds;
    ``rounds[0]`` puts every state in class 0 and ``rounds[-1]`` equals
    ``class_of``. Class ids are numbered by smallest member.
    """

    class_of: tuple[int, ...]
    num_classes: int
    rounds: tuple[tuple[int, ...], ...]

    @property
    def num_rounds(self) -> int:
        return len(self.rounds) - 1

    def same_class(self, s: int, t: int) -> bool:
        return self.class_of[s] == self.class_of[t]

    def classes(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.num_classes)]
        for s, c in enumerate(self.class_of):
            out[c].append(s)
        return out

    def separation_round(self, s: int, t: int) -> int | None:
        """First round after which ``s`` and ``t`` are in different classes."""
        if self.class_of[s] == self.class_of[t]:
            return None
        for k, assignment in enumerate(self.rounds):
            if assignment[s] != assignment[t]:
                return k
        raise AssertionError("unreachable")

    def split_rounds(self) -> tuple[int, ...]:
        """Per state, the last round at which its class was split (0 if never)."""
        out = [0] * len(self.class_of)
        for k in range(1, len(self.rounds)):
            before, after = self.rounds[k - 1], self.rounds[k]
            sizes_before: dict[int, int] = {}
            sizes_after: dict[int, int] = {}
            for s in range(len(out)):
                sizes_before[before[s]] = sizes_before.get(before[s], 0) + 1
                sizes_after[after[s]] = sizes_after.get(after[s], 0) + 1
            for s in range(len(out)):
                if sizes_after[after[s]] != sizes_before[before[s]]:
                    out[s] = k
        return tuple(out)

    def as_relation(self) -> frozenset[tuple[int, int]]:
        return frozenset((s, t) for cls in self.classes() for s in cls for t in cls)


def _refine(lts: FiniteLts) -> Partition:
    n, fwd, nl = lts.num_states, lts.forward, lts.num_labels
    current = (0,) * n
    rounds = [current]
    num = 1
    while True:
        sigs = [
            (current[s], frozenset((a, current[t]) for a in range(nl) for t in fwd[s][a]))
            for s in range(n)
        ]
        refined = _renumber(sigs)
        new_num = max(refined) + 1
        if new_num == num:
            break
        current, num = refined, new_num
        rounds.append(current)
    return Partition(current, num, tuple(rounds))


def bisimilarity(lts: FiniteLts) -> Partition:
    """The coarsest bisimulation, as a partition. Cached per LTS."""
    return lts.cached("bisimilarity", lambda: _refine(lts))


def bisimilar(lts: FiniteLts, s1: int, s2: int) -> bool:
    lts.check_state(s1)
    lts.check_state(s2)
    return bisimilarity(lts).same_class(s1, s2)


def theory_eq(lts: FiniteLts, s1: int, s2: int) -> bool:
    """Do ``s1`` and ``s2`` satisfy exactly the same HML formulas?

    Decided through bisimilarity. On image-finite systems (every finite LTS
    is one) the two relations coincide by the Hennessy-Milner theorem; the
    bounded oracle :func:`theory_eq_bounded` checks this independently on
    small instances.
    """
    return bisimilar(lts, s1, s2)


@dataclass(frozen=True)
class Counterexample:
    """A transition of ``mover`` (1 or 2) from the pair that the other side cannot match."""

    left: int
    right: int
    label: str
    target: int
    mover: int = 1

    def __str__(self):
        who = self.left if self.mover == 1 else self.right
        return f"({self.left}, {self.right}): {who} --{self.label}--> {self.target} is unmatched"


def _successor_masks(lts: FiniteLts):
    def compute():
        return tuple(tuple(sum(1 << u for u in row) for row in lts.forward[s]) for s in range(lts.num_states))

    return lts.cached("successor_masks", compute)


def _lowest(bits: int) -> int:
    return (bits & -bits).bit_length() - 1


def bisimulation_counterexample(lts: FiniteLts, relation: Relation) -> Counterexample | None:
    """First pair of ``relation`` (in sorted order) violating a transfer condition.

    Within a pair, labels are tried in index order, the left state's moves
    before the right state's, and the smallest unmatched target is reported.
    """
    rel = frozenset(relation)
    n, nl = lts.num_states, lts.num_labels
    right_of = [0] * n  # bitmask of t with (s, t) in rel, indexed by s
    left_of = [0] * n
    for s, t in rel:
        if not (isinstance(s, int) and isinstance(t, int) and 0 <= s < n and 0 <= t < n):
            lts.check_state(s)
            lts.check_state(t)
        right_of[s] |= 1 << t
        left_of[t] |= 1 << s
    succ = _successor_masks(lts)

    def related_to(row, image):
        # states related (through ``row``) to some member of the successor set
        out = 0
        while image:
            low = image & -image
            out |= row[low.bit_length() - 1]
            image ^= low
        return out

    # can_match_left[t][a]: sources whose moves t can answer with an a-step
    can_match_left = [[related_to(left_of, succ[t][a]) for a in range(nl)] for t in range(n)]
    can_match_right = [[related_to(right_of, succ[s][a]) for a in range(nl)] for s in range(n)]
    for s, t in sorted(rel):
        for a in range(nl):
            bad = succ[s][a] & ~can_match_left[t][a]
            if bad:
                return Counterexample(s, t, lts.labels[a], _lowest(bad), 1)
            bad = succ[t][a] & ~can_match_right[s][a]
            if bad:
                return Counterexample(s, t, lts.labels[a], _lowest(bad), 2)
    return None


def is_bisimulation(lts: FiniteLts, relation: Relation) -> bool:
    return bisimulation_counterexample(lts, relation) is None


def bisimulation_invariance_check(lts: FiniteLts, relation: Relation, phi: Formula) -> list[tuple[int, int]]:
    """Pairs ``(s, t)`` of a bisimulation with ``s |= phi`` but not ``t |= phi``.

    The result is empty for every formula whenever ``relation`` is a
    bisimulation. Raises :class:`NotABisimulationError` if it is not one.
    """
    frozen = frozenset(relation)
    # harnesses check many formulas against one relation; remember the last verdict
    last = lts.cached("last_bisimulation_check", dict)
    entry = last.get("entry")
    if entry is not None and entry[0] == frozen:
        cex = entry[1]
    else:
        cex = bisimulation_counterexample(lts, frozen)
        last["entry"] = (frozen, cex)
    rel = sorted(frozen)
    if cex is not None:
        raise NotABisimulationError(cex)
    memo: dict[int, bool] = {}

    def sat(s):
        if s not in memo:
            memo[s] = satisfies(lts, s, phi)
        return memo[s]

    return [(s, t) for s, t in rel if sat(s) and not sat(t)]


# -- bounded theory oracle ---------------------------------------------------

MAX_ORACLE_STATES = 5
MAX_ORACLE_LABELS = 2
MAX_ORACLE_SIZE = 7


def _modal_tables(lts: FiniteLts):
    # dia[a][m]: states with some a-successor in m; box[a][m]: all a-successors in m
    n = lts.num_states
    dia, box = [], []
    for a in range(lts.num_labels):
        d_row, b_row = [], []
        for m in range(1 << n):
            d = b = 0
            for s in range(n):
                succ = lts.forward[s][a]
                if any(m >> t & 1 for t in succ):
                    d |= 1 << s
                if all(m >> t & 1 for t in succ):
                    b |= 1 << s
            d_row.append(d)
            b_row.append(b)
        dia.append(d_row)
        box.append(b_row)
    return dia, box


def _bounded_closure(lts: FiniteLts, max_size: int, max_depth: int) -> dict[int, tuple[int, Formula]]:
    """Every denotation reachable by a formula within the bounds.

    Maps each reachable state set (a bitmask) to the size of the smallest
    formula denoting it and that formula. Formulas are explored modulo their
    denotation: of all formulas with the same meaning on this LTS only a
    smallest one is extended further, which covers every formula in the
    bounds without listing them one by one.
    """
    full = (1 << lts.num_states) - 1
    dia, box = _modal_tables(lts)
    labels = lts.labels

    def relax(best, mask, sz, phi):
        if sz <= max_size and (mask not in best or sz < best[mask][0]):
            best[mask] = (sz, phi)
            return True
        return False

    def close(best):
        changed = True
        while changed:
            changed = False
            items = list(best.items())
            for ma, (sa, fa) in items:
                for mb, (sb, fb) in items:
                    sz = sa + sb + 1
                    if sz > max_size:
                        continue
                    changed |= relax(best, ma & mb, sz, And(fa, fb))
                    changed |= relax(best, ma | mb, sz, Or(fa, fb))
        return best

    best: dict[int, tuple[int, Formula]] = {}
    relax(best, full, 1, TT)
    relax(best, 0, 1, FF)
    close(best)
    for _ in range(max_depth):
        nxt = dict(best)
        for m, (sz, phi) in best.items():
            for a, name in enumerate(labels):
                relax(nxt, dia[a][m], sz + 1, Diamond(name, phi))
                relax(nxt, box[a][m], sz + 1, Box(name, phi))
        best = close(nxt)
    return best


def _oracle_guard(lts: FiniteLts, max_size: int, max_depth: int):
    if lts.num_states > MAX_ORACLE_STATES or lts.num_labels > MAX_ORACLE_LABELS or max_size > MAX_ORACLE_SIZE:
        raise ResourceLimitError(
            f"bounded theory oracle refuses instances beyond {MAX_ORACLE_STATES} states, "
            f"{MAX_ORACLE_LABELS} labels and formula size {MAX_ORACLE_SIZE} "
            f"(got {lts.num_states}, {lts.num_labels}, {max_size})"
        )
    if max_size < 1 or max_depth < 0:
        raise ValueError("max_size must be >= 1 and max_depth >= 0")


def bounded_distinguisher(lts: FiniteLts, s1: int, s2: int, max_size: int, max_depth: int) -> Formula | None:
    """A smallest formula within the bounds that ``s1`` satisfies and ``s2`` does not.

    Negation preserves size and modal depth, so this is ``None`` exactly when
    no formula in the bounds tells the two states apart in either direction.
    """
    lts.check_state(s1)
    lts.check_state(s2)
    _oracle_guard(lts, max_size, max_depth)
    closure = lts.cached(("bounded_closure", max_size, max_depth), lambda: _bounded_closure(lts, max_size, max_depth))
    found = None
    for mask, (sz, phi) in closure.items():
        if (mask >> s1 & 1) != (mask >> s2 & 1):
            if found is None or (sz, mask) < found[:2]:
                found = (sz, mask, phi)
    if found is None:
        return None
    _, mask, phi = found
    if mask >> s1 & 1:
        return phi
    # phi holds at s2 only; its dual holds at s1 only
    return neg(phi)


def theory_eq_bounded(lts: FiniteLts, s1: int, s2: int, max_size: int = MAX_ORACLE_SIZE, max_depth: int = 3) -> bool:
    """True iff no formula of at most ``max_size`` nodes and modal depth
    ``max_depth`` separates ``s1`` from ``s2``.

    Refuses (:class:`ResourceLimitError`) beyond the ``MAX_ORACLE_*`` caps.
    Any separating formula found is re-checked with :func:`satisfies`.
    """
    phi = bounded_distinguisher(lts, s1, s2, max_size, max_depth)
    if phi is None:
        return True
    if not (satisfies(lts, s1, phi) and not satisfies(lts, s2, phi)):
        raise InvariantViolation(f"bounded oracle produced a non-separating formula {phi}")
    return False


# -- distinguishing formulas -------------------------------------------------


@dataclass(frozen=True)
class DistinguishResult:
    """Outcome of :func:`distinguishing_formula`.

    Either ``formula`` is None (the states are equivalent) or
    ``satisfied_by`` satisfies it and ``refuted_by`` does not.
    """

    formula: Formula | None
    satisfied_by: int | None = None
    refuted_by: int | None = None

    @property
    def equivalent(self) -> bool:
        return self.formula is None


def distinguishing_formula(lts: FiniteLts, s1: int, s2: int, verify: bool = True) -> DistinguishResult:
    """Build a formula true at ``s1`` and false at ``s2``, or report equivalence.

    For a pair first separated in refinement round ``k`` we look for a move
    ``s1 --a--> t`` such that no ``a``-successor ``u`` of ``s2`` is bisimilar
    to ``t``. Each pair ``(t, u)`` then separates in an earlier round, and
    the result is ``<a>(phi_1 & ... & phi_n)`` with ``phi_i`` distinguishing
    ``t`` from the ``i``-th successor (``<a>tt`` when ``s2`` has none).
    When only ``s2`` has such a move we build the formula for ``(s2, s1)``
    and negate it. Moves are ranked by the latest separation round among
    their subproblems, then by (label index, target); the chosen move always
    has rank below ``k``, so the modal depth is at most ``k``.
    """
    lts.check_state(s1)
    lts.check_state(s2)
    part = bisimilarity(lts)
    if part.same_class(s1, s2):
        return DistinguishResult(None)

    fwd = lts.forward
    sep = part.separation_round
    memo: dict[tuple[int, int], Formula] = {}

    def build(p, q):
        if (p, q) in memo:
            return memo[(p, q)]
        best = None
        for side, (x, y) in enumerate(((p, q), (q, p))):
            for a in range(lts.num_labels):
                ys = fwd[y][a]
                for x2 in fwd[x][a]:
                    rounds = [sep(x2, y2) for y2 in ys]
                    if None in rounds:
                        continue
                    key = (max(rounds, default=0), side, a, x2)
                    if best is None or key < best:
                        best = key
        if best is None:
            raise InvariantViolation(f"no separating move between non-bisimilar states {p} and {q}")
        _, side, a, x2 = best
        x, y = (p, q) if side == 0 else (q, p)
        parts: list[Formula] = []
        for y2 in fwd[y][a]:
            phi = build(x2, y2)
            if not any(phi is c or phi == c for c in parts):
                parts.append(phi)
        out = Diamond(lts.labels[a], conj(parts))
        if side == 1:
            out = neg(out)
        memo[(p, q)] = out
        return out

    phi = build(s1, s2)
    if verify and not (satisfies(lts, s1, phi) and not satisfies(lts, s2, phi)):
        raise InvariantViolation(f"synthesised formula does not separate {s1} from {s2}: {phi}")
    return DistinguishResult(phi, s1, s2)
