"""Hennessy-Milner logic over finite labelled transition systems."""

from .aut import load_aut, read_aut, save_aut, write_aut
from .equivalence import (
    Counterexample,
    DistinguishResult,
    Partition,
    bisimilar,
    bisimilarity,
    bisimulation_counterexample,
    bisimulation_invariance_check,
    bounded_distinguisher,
    distinguishing_formula,
    is_bisimulation,
    theory_eq,
    theory_eq_bounded,
)
from .errors import (
    CcsError,
    EvaluationError,
    FormulaTooDeepError,
    HmlError,
    InvariantViolation,
    LtsError,
    NotABisimulationError,
    ParseError,
    ResourceLimitError,
    UnknownLabelError,
)
from .formula import FF, TT, And, Box, Diamond, Ff, Formula, Or, Tt, conj, disj, modal_depth, neg, size
from .lts import FiniteLts, build
from .semantics import StateSet, check_semantic_agreement, denotation, satisfies
from .syntax import parse, pretty

__version__ = "0.1.0"
