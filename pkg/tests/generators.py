"""Instance generators shared by the test modules."""

import itertools
import random

from hmlkit import FiniteLts
from hmlkit.ccs import NIL, TAU, Action, Const, Par, Prefix, Restrict, Sum
from hmlkit.formula import FF, TT, And, Box, Diamond, Or

LABELS = ("a", "b", "c")


def random_lts(rng, max_states, max_labels=3, max_branch=3, min_labels=1):
    n = rng.randint(1, max_states)
    labels = LABELS[: rng.randint(min_labels, max_labels)]
    density = rng.random()
    edges = []
    for s in range(n):
        for a in range(len(labels)):
            if rng.random() < density:
                for _ in range(rng.randint(1, max_branch)):
                    edges.append((s, a, rng.randrange(n)))
    return FiniteLts(n, labels, edges)


def inflated_lts(rng, max_states, max_labels=2):
    """An LTS with many bisimilar states: every state copies the behaviour
    of a state of a smaller random base LTS, through randomly chosen copies."""
    base = random_lts(rng, max(1, max_states // 3), max_labels, max_branch=2)
    n = rng.randint(base.num_states, max(base.num_states, max_states))
    owner = list(range(base.num_states)) + [rng.randrange(base.num_states) for _ in range(n - base.num_states)]
    copies = {b: [s for s in range(n) if owner[s] == b] for b in range(base.num_states)}
    edges = []
    for s in range(n):
        for a in range(base.num_labels):
            for t in base.forward[owner[s]][a]:
                # at least one copy of each target, sometimes more
                for c in rng.sample(copies[t], rng.randint(1, len(copies[t]))):
                    edges.append((s, a, c))
    return FiniteLts(n, base.labels, edges)


def mixed_lts(rng, max_states):
    return inflated_lts(rng, max_states) if rng.random() < 0.5 else random_lts(rng, max_states)


def random_formula(rng, labels, depth, size_budget=12):
    """Random formula with modal depth <= depth."""
    if size_budget <= 1 or rng.random() < 0.15:
        return rng.choice((TT, FF))
    r = rng.random()
    if depth > 0 and r < 0.55:
        cls = Diamond if rng.random() < 0.5 else Box
        return cls(rng.choice(labels), random_formula(rng, labels, depth - 1, size_budget - 1))
    left_budget = rng.randint(1, max(1, size_budget - 2))
    cls = And if rng.random() < 0.5 else Or
    return cls(
        random_formula(rng, labels, depth, left_budget),
        random_formula(rng, labels, depth, size_budget - 1 - left_budget),
    )


def all_ltss(num_states, labels):
    """Every LTS over exactly these states and labels."""
    triples = [(s, a, t) for s in range(num_states) for a in range(len(labels)) for t in range(num_states)]
    for bits in range(1 << len(triples)):
        yield FiniteLts(num_states, labels, [tr for i, tr in enumerate(triples) if bits >> i & 1])


def small_lts_grid(max_states=3, label_sets=((), ("a",), ("a", "b"))):
    for n in range(1, max_states + 1):
        for labels in label_sets:
            yield from all_ltss(n, labels)


def iso_representatives(num_states, labels):
    """One LTS per isomorphism class, under renaming of states and labels."""
    import numpy as np

    nl = len(labels)
    triples = [(s, a, t) for s in range(num_states) for a in range(nl) for t in range(num_states)]
    pos = {tr: i for i, tr in enumerate(triples)}
    codes = np.arange(1 << len(triples), dtype=np.int64)
    canon = codes.copy()
    for sp in itertools.permutations(range(num_states)):
        for lp in itertools.permutations(range(nl)):
            img = np.zeros_like(codes)
            for i, (s, a, t) in enumerate(triples):
                img |= ((codes >> i) & 1) << pos[(sp[s], lp[a], sp[t])]
            canon = np.minimum(canon, img)
    for bits in np.unique(canon).tolist():
        yield FiniteLts(num_states, labels, [tr for i, tr in enumerate(triples) if bits >> i & 1])


# -- CCS ---------------------------------------------------------------------

CHANNELS = ("a", "b")


def random_action(rng):
    r = rng.random()
    if r < 0.15:
        return TAU
    return Action(rng.choice(CHANNELS), rng.random() < 0.4)


def random_process(rng, size, consts=(), guarded=False):
    """Random process term; with ``guarded`` no constant appears outside a prefix."""
    if size <= 1:
        options = ["nil"] + (["const"] if consts and not guarded else [])
        kind = rng.choice(options)
        return Const(rng.choice(consts)) if kind == "const" else NIL
    kinds = ["prefix", "prefix", "sum", "par", "restrict"]
    kind = rng.choice(kinds)
    if kind == "prefix":
        return Prefix(random_action(rng), random_process(rng, size - 1, consts, False))
    if kind == "restrict":
        names = frozenset(rng.sample(CHANNELS, rng.randint(1, len(CHANNELS))))
        return Restrict(random_process(rng, size - 1, consts, guarded), names)
    left = rng.randint(1, size - 2) if size > 2 else 1
    cls = Sum if kind == "sum" else Par
    return cls(random_process(rng, left, consts, guarded), random_process(rng, max(1, size - 1 - left), consts, guarded))


def random_program(rng, max_defs=2, body_size=5):
    names = [f"P{i}" for i in range(rng.randint(0, max_defs))]
    defs = {n: random_process(rng, rng.randint(2, body_size), tuple(names), guarded=True) for n in names}
    return defs, tuple(names)
