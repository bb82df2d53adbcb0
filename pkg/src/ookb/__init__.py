"""Reasoner and query engine for object-oriented knowledge bases.

A knowledge base is authored as taxonomy facts, Skolem-function descriptive
rules, qualified number constraints, sufficient conditions and equality
statements.  The engine grounds the rules to a chosen nesting depth, computes
an answer set (memberships, relation values, equality representatives,
constraint report) and answers subsumption, description, comparison and
relationship-path queries over it.
"""

from .engine import (
    AnswerSet,
    AtomSet,
    ConstraintViolation,
    EqClasses,
    LEX_MIN_DEPTH,
    RANDOM_POLICY,
    Substitution,
    answer_set,
    base_fixpoint,
    check_constraints,
    congruence_closure,
    entails,
    fire_sufficient_conditions,
    project_value_e,
    select_representatives,
)
from .errors import (
    BudgetExceededError,
    InconsistentKBError,
    InfeasibleProfileError,
    InvariantFamilyError,
    KBLoadError,
    OOKBError,
    UniverseCapError,
    UnknownSymbolError,
)
from .grounder import (
    GroundProgram,
    GroundRule,
    TermUniverse,
    build_universe,
    ground_program,
    saturate,
)
from .model import (
    Atom,
    DescriptiveRule,
    OOKBDomain,
    SkolemId,
    SufficientCondition,
    Term,
    apply_skolem,
    atom,
    individual,
    term_depth,
)
from .oracle import enumerate_answer_sets_oracle
from .parser import (
    ParseError,
    SourceSpan,
    load_kb_files,
    parse_atom,
    parse_atoms,
    parse_kb,
    render_atoms,
    render_domain,
)
from .queries import Comparison, Description, Path, compare, describe, find_paths, msc_of, subsumes
from .stats import StatsTable, kb_stats
from .synth import GenProfile, generate_synthetic

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # model
    "SkolemId", "Term", "Atom", "atom", "individual", "apply_skolem", "term_depth",
    "DescriptiveRule", "SufficientCondition", "OOKBDomain",
    # parser
    "SourceSpan", "ParseError", "parse_kb", "load_kb_files", "parse_atom",
    "parse_atoms", "render_atoms", "render_domain",
    # grounder
    "TermUniverse", "GroundRule", "GroundProgram", "build_universe",
    "ground_program", "saturate",
    # engine
    "AtomSet", "EqClasses", "Substitution", "ConstraintViolation", "AnswerSet",
    "LEX_MIN_DEPTH", "RANDOM_POLICY", "base_fixpoint", "fire_sufficient_conditions",
    "congruence_closure", "select_representatives", "project_value_e",
    "check_constraints", "answer_set", "entails", "enumerate_answer_sets_oracle",
    # queries
    "Description", "Comparison", "Path", "subsumes", "describe", "msc_of",
    "compare", "find_paths",
    # stats / synthetic
    "StatsTable", "kb_stats", "GenProfile", "generate_synthetic",
    # errors
    "OOKBError", "KBLoadError", "InconsistentKBError", "UniverseCapError",
    "BudgetExceededError", "UnknownSymbolError", "InvariantFamilyError",
    "InfeasibleProfileError",
]
