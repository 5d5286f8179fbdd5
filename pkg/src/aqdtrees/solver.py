"""Exact minimax solver for the three game variants.

Positions are memoized on the rules state plus the *set* of pairs played so
far: the winning conditions only look at which pairs exist, not their order.
Branches whose pairs already violate a winning condition are cut, which is
sound because adding pairs never repairs a violation.  ``early_exit=False``
switches that off and checks only complete histories.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

from .errors import BudgetExceededError, IllegalMoveError, ParameterError, StrategyViolatedError
from .games import (Board, GameInstance, Move, Responder, SwitchBudget, batch_of_round,
                    check_winning, consistent_with, replay)
from .trees import _all_codes

_BOARDS = (Board.LEFT, Board.RIGHT)


class Player(str, enum.Enum):
    SPOILER = "Spoiler"
    DUPLICATOR = "Duplicator"

    def __str__(self):
        return self.value


@dataclass
class Outcome:
    winner: Player
    strategy: Optional["SolvedStrategy"] = None
    line: Optional[list] = None          # [(Move, duplicator vertex)] for Spoiler wins
    stats: dict = field(default_factory=dict)


def orbit_signatures(tree, fixed):
    """Per-vertex signature, equal exactly on orbits of the automorphisms fixing ``fixed``.

    Each picked vertex gets its own label, the labeled AHU code is computed
    bottom-up, and a vertex's signature is the code sequence on its root path.
    """
    intern = {}
    lc = [0] * len(tree)
    for v in reversed(tree.preorder):
        key = (v if v in fixed else -1, tuple(sorted(lc[c] for c in tree.children[v])))
        lc[v] = intern.setdefault(key, len(intern))
    paths = {}
    sig = [0] * len(tree)
    for v in tree.preorder:
        p = tree.parents[v]
        sig[v] = paths.setdefault((sig[p] if p is not None else -1, lc[v]), len(paths))
    return sig


class MinimaxSolver:
    def __init__(self, instance: GameInstance, max_rounds=6, max_nodes=200, max_memo=10**7,
                 prune_symmetry=False, early_exit=True):
        if instance.total_rounds > max_rounds:
            raise BudgetExceededError(f"{instance.total_rounds} rounds exceed the bound {max_rounds}")
        for tree in (instance.left, instance.right):
            if len(tree) > max_nodes:
                raise BudgetExceededError(f"tree with {len(tree)} nodes exceeds the bound {max_nodes}")
        self.instance = instance
        self.trees = (instance.left, instance.right)
        self.max_memo = max_memo
        self.prune_symmetry = prune_symmetry
        self.early_exit = early_exit
        self.memo = {}
        self.positions = 0
        variant = instance.variant
        self._switch = isinstance(variant, SwitchBudget)
        self._s = variant.s if self._switch else None
        self._batch = None if self._switch else [batch_of_round(variant, i)
                                                   for i in range(variant.total_rounds)]
        self._total = variant.total_rounds
        self._codes = tuple(_all_codes(t) for t in self.trees)
        self._orbits = {}
        self.initial = (((instance.left.root, instance.right.root),) + instance.designated,
                        0, None, None, 0)

    # -- rules on the internal state (pairs, rnd, start, cur, switches) --------

    def boards(self, st):
        _, rnd, start, cur, sw = st
        if rnd == 0:
            return (0, 1)
        if self._switch:
            return (cur, 1 - cur) if sw < self._s else (cur,)
        b = self._batch[rnd]
        return (start if b % 2 == 0 else 1 - start,)

    def advance(self, st, board, z, w):
        pairs, rnd, start, cur, sw = st
        pair = (z, w) if board == 0 else (w, z)
        switched = rnd > 0 and board != cur
        return (pairs + (pair,), rnd + 1, board if rnd == 0 else start, board, sw + switched)

    def _key(self, st):
        pairs, rnd, start, cur, sw = st
        if self._switch:
            return (rnd, cur, sw, frozenset(pairs))
        return (rnd, start, frozenset(pairs))

    def _reps(self, board, pairs, vertices):
        """First vertex of each symmetry orbit among ``vertices`` (order kept)."""
        fixed = frozenset(p[board] for p in pairs)
        sig = self._orbits.get((board, fixed))
        if sig is None:
            sig = orbit_signatures(self.trees[board], fixed)
            self._orbits[(board, fixed)] = sig
        seen = set()
        out = []
        for v in vertices:
            if sig[v] not in seen:
                seen.add(sig[v])
                out.append(v)
        return out

    def spoiler_moves(self, st, board):
        vertices = range(len(self.trees[board]))
        if self.prune_symmetry:
            return self._reps(board, st[0], vertices)
        return list(vertices)

    def duplicator_replies(self, st, board, z):
        """Duplicator's candidate replies on the other board, best guesses first."""
        pairs = st[0]
        S, D = self.trees[board], self.trees[1 - board]
        if not self.early_exit:
            return list(range(len(D)))
        sp, dp = S.parents, D.parents
        cands = None
        for p in pairs:
            if p[board] == z:
                cands = [p[1 - board]]
                break
        if cands is None:
            for p in pairs:
                if sp[z] == p[board]:
                    cands = list(D.children[p[1 - board]])
                    break
                if sp[p[board]] == z:
                    q = dp[p[1 - board]]
                    cands = [] if q is None else [q]
                    break
        if cands is None:
            cands = range(len(D))
        left, right = self.trees
        if board == 0:
            ok = [w for w in cands if consistent_with(left, right, pairs, z, w)]
        else:
            ok = [w for w in cands if consistent_with(left, right, pairs, w, z)]
        dz, cz = S.depth[z], self._codes[board][z]
        dcodes = self._codes[1 - board]
        ok.sort(key=lambda w: (abs(D.depth[w] - dz), dcodes[w] != cz, w))
        if self.prune_symmetry:
            ok = self._reps(1 - board, pairs, ok)
        return ok

    # -- search ---------------------------------------------------------------

    def duplicator_wins(self, st):
        if st[1] == self._total:
            if self.early_exit:
                return True
            return bool(check_winning(self.trees[0], self.trees[1], st[0]))
        key = self._key(st)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        self.positions += 1
        result = True
        for board in self.boards(st):
            for z in self.spoiler_moves(st, board):
                if self.winning_reply(st, board, z) is None:
                    result = False
                    break
            if not result:
                break
        if len(self.memo) >= self.max_memo:
            raise BudgetExceededError(f"memo table exceeded {self.max_memo} entries")
        self.memo[key] = result
        return result

    def winning_reply(self, st, board, z):
        for w in self.duplicator_replies(st, board, z):
            if self.duplicator_wins(self.advance(st, board, z, w)):
                return w
        return None

    def start_consistent(self):
        return bool(check_winning(self.trees[0], self.trees[1], self.initial[0]))

    def solve(self) -> Outcome:
        if self.early_exit and not self.start_consistent():
            win = False
        else:
            win = self.duplicator_wins(self.initial)
        stats = {"memo_entries": len(self.memo), "positions": self.positions}
        if win:
            return Outcome(Player.DUPLICATOR, strategy=SolvedStrategy(self), stats=stats)
        return Outcome(Player.SPOILER, line=self.spoiler_line(), stats=stats)

    def spoiler_line(self):
        """A principal variation for Spoiler, ending in a violated history."""
        st = self.initial
        line = []
        left, right = self.trees
        while st[1] < self._total and check_winning(left, right, st[0]):
            chosen = None
            for board in self.boards(st):
                for z in self.spoiler_moves(st, board):
                    if self.winning_reply(st, board, z) is None:
                        chosen = (board, z)
                        break
                if chosen:
                    break
            if chosen is None:
                raise StrategyViolatedError("no winning Spoiler move in a lost position")
            board, z = chosen
            replies = self.duplicator_replies(st, board, z) or [0]
            w = replies[0]
            line.append((Move(_BOARDS[board], z), w))
            st = self.advance(st, board, z, w)
        return line


def solve_minimax(instance, **kwargs) -> Outcome:
    return MinimaxSolver(instance, **kwargs).solve()


class SolvedStrategy:
    """Factory for responders that follow the first winning reply of a solve."""

    name = "minimax"

    def __init__(self, solver: MinimaxSolver):
        self.solver = solver

    def __call__(self, instance=None):
        inst = self.solver.instance
        if instance is not None and instance is not inst:
            same = (instance.left.parents == inst.left.parents
                    and instance.right.parents == inst.right.parents
                    and instance.variant == inst.variant and instance.designated == inst.designated)
            if not same:
                raise ParameterError("strategy was solved for a different instance")
        return SolvedResponder(self.solver, self.solver.initial)


class SolvedResponder(Responder):
    """Plays the first winning reply; ``forgiving`` falls back to any consistent one.

    The fallback is only for interactive play from lost positions.
    """

    def __init__(self, solver, st, forgiving=False):
        self.solver = solver
        self.st = st
        self.forgiving = forgiving

    def respond(self, move: Move) -> int:
        solver = self.solver
        board = 0 if move.board is Board.LEFT else 1
        if board not in solver.boards(self.st):
            raise IllegalMoveError("spoiler board", f"{move.board.name} is not playable now")
        if not solver.trees[board].is_valid(move.vertex):
            raise IllegalMoveError("spoiler vertex", f"{move.vertex!r}")
        w = solver.winning_reply(self.st, board, move.vertex)
        if w is None and self.forgiving:
            replies = solver.duplicator_replies(self.st, board, move.vertex)
            w = replies[0] if replies else solver.trees[1 - board].root
        if w is None:
            raise StrategyViolatedError(f"no winning reply to {move} from this position")
        self.st = solver.advance(self.st, board, move.vertex, w)
        return w

    def fork(self):
        return SolvedResponder(self.solver, self.st, self.forgiving)

    def selfcheck(self):
        left, right = self.solver.trees
        return {"Main": bool(check_winning(left, right, self.st[0]))}


def replay_line(instance, line):
    """Replay a Spoiler line and return the final winning-condition check."""
    state = replay(instance, line)
    return check_winning(instance.left, instance.right, state.history)
