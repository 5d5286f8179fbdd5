"""Strategy transfer between game variants by replay in a virtual batch game.

The wrapped strategy plays ``FixedBatches{S, K}``.  Each maximal run of
Spoiler moves on one board in the real game is fed into one virtual batch;
when the real game changes board, the rest of the current virtual batch is
filled with root picks so that the next run starts a fresh batch.  Root
picks are answered by roots in any winning play, so the real history is
contained in the virtual one and inherits its winning conditions.
"""

from __future__ import annotations

from .errors import DesyncError, ParameterError
from .games import BatchSizes, FixedBatches, GameInstance, Move, Responder, SwitchBudget


class VirtualBatchGame(Responder):
    def __init__(self, inner, instance, S, K):
        self.inner = inner
        self.instance = instance
        self.S, self.K = S, K
        self.batch = 0
        self.filled = 0
        self.board = None
        self.padding = 0

    def _feed(self, move):
        if self.batch >= self.S:
            raise DesyncError(f"virtual game has only {self.S} batches")
        if self.filled >= self.K:
            raise DesyncError(f"virtual batch {self.batch + 1} already holds {self.K} rounds")
        w = self.inner.respond(move)
        if not self.instance.tree(move.board.other).is_valid(w):
            raise DesyncError(f"inner strategy answered {w!r}, not a vertex of {move.board.other.name}")
        self.filled += 1
        return w

    def _close_batch(self):
        root = self.instance.tree(self.board).root
        while self.filled < self.K:
            self._feed(Move(self.board, root))
            self.padding += 1
        self.batch += 1
        self.filled = 0
        self.board = self.board.other

    def respond(self, move: Move) -> int:
        if self.board is None:
            self.board = move.board
        elif move.board is not self.board:
            self._close_batch()
        return self._feed(move)

    def fork(self):
        twin = VirtualBatchGame(self.inner.fork(), self.instance, self.S, self.K)
        twin.batch, twin.filled, twin.board, twin.padding = self.batch, self.filled, self.board, self.padding
        return twin

    def selfcheck(self):
        report = dict(self.inner.selfcheck())
        report["virtual batches"] = self.batch < self.S and self.filled <= self.K
        return report


class AdaptedStrategy:
    """Factory for :class:`VirtualBatchGame` responders around an inner factory."""

    def __init__(self, inner_factory, S, K, target, name):
        self.inner_factory = inner_factory
        self.S, self.K = S, K
        self.target = target
        self.name = name

    def __call__(self, instance: GameInstance):
        if instance.variant != self.target:
            raise ParameterError(f"{self.name} does not play {instance.variant}")
        virtual = GameInstance(instance.left, instance.right, FixedBatches(self.S, self.K),
                               instance.designated)
        return VirtualBatchGame(self.inner_factory(virtual), instance, self.S, self.K)


def adapt_batches_to_switch_budget(factory, s, r, batches=None):
    """Turn a ``FixedBatches{s+1, r}`` strategy into a ``SwitchBudget{s, r}`` one.

    ``batches`` lets the inner strategy play a longer batch game; only the
    first ``s + 1`` batches are ever reached.
    """
    target = SwitchBudget(s, r)
    S = s + 1 if batches is None else batches
    if S < s + 1:
        raise ParameterError(f"a virtual game of {S} batches cannot absorb {s} switches")
    return AdaptedStrategy(factory, S, r, target, f"switch-from-batch:{S},{r}")


def adapt_fixed_to_sizes(factory, s, k, sizes):
    """Turn a ``FixedBatches{s, k}`` strategy into a ``BatchSizes{sizes}`` one."""
    target = BatchSizes(tuple(sizes))
    if len(target.sizes) > s or any(i > k for i in target.sizes):
        raise ParameterError(f"sizes {target.sizes} need at most {s} batches of length <= {k}")
    return AdaptedStrategy(factory, s, k, target, f"sizes-from-batch:{s},{k}")
