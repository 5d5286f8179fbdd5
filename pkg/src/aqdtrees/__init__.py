"""Alternating quantifier depth of the KEIN properties on rooted trees.

Builds the T1/T2 tree constructions, evaluates first-order formulas over the
parent relation, plays the three Ehrenfeucht game variants, and checks an
explicit Duplicator strategy against exhaustive and random Spoilers.
"""

from .adaptors import adapt_batches_to_switch_budget, adapt_fixed_to_sizes
from .errors import *  # noqa: F401,F403
from .games import (BatchSizes, Board, FixedBatches, GameInstance, Move, SwitchBudget,
                    check_winning, initial_state, legal_spoiler_moves, play_round)
from .logic import (aqd_syntactic, eval_formula, eval_P_direct, formula_for_KEIN, formula_for_P,
                    nnf, qd)
from .solver import Player, solve_minimax
from .strategy import (DesignatedConfig, RecursiveStrategy, new_session, respond, session_selfcheck,
                       validate_designated)
from .syntax import parse_formula, to_text
from .trees import Tree, build_construction, canonical_code, construction_pair, deserialize, serialize

__version__ = "0.1.0"

__all__ = [
    "adapt_batches_to_switch_budget", "adapt_fixed_to_sizes", "BatchSizes", "Board", "FixedBatches",
    "GameInstance", "Move", "SwitchBudget", "check_winning", "initial_state", "legal_spoiler_moves",
    "play_round", "aqd_syntactic", "eval_formula", "eval_P_direct", "formula_for_KEIN",
    "formula_for_P", "nnf", "qd", "Player", "solve_minimax", "DesignatedConfig", "RecursiveStrategy",
    "new_session", "respond", "session_selfcheck", "validate_designated", "parse_formula", "to_text", "Tree", "build_construction",
    "canonical_code", "construction_pair", "deserialize", "serialize",
]
