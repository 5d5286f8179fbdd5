"""Rules of the three Ehrenfeucht game variants on pairs of rooted trees.

History index 0 always holds the root pair, followed by designated pairs
and then one pair per played round, each pair written (left, right).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

from .errors import GameOverError, IllegalMoveError, ParameterError


class Board(enum.Enum):
    LEFT = "L"
    RIGHT = "R"

    @property
    def other(self):
        return Board.RIGHT if self is Board.LEFT else Board.LEFT


@dataclass(frozen=True)
class SwitchBudget:
    """At most ``s`` switches over ``r`` rounds."""
    s: int
    r: int

    def __post_init__(self):
        if not (isinstance(self.s, int) and isinstance(self.r, int) and self.r >= self.s >= 0):
            raise ParameterError(f"SwitchBudget needs r >= s >= 0, got s={self.s}, r={self.r}")

    @property
    def total_rounds(self):
        return self.r

    def __str__(self):
        return f"switch:{self.s},{self.r}"


@dataclass(frozen=True)
class FixedBatches:
    """``s`` batches of ``k`` rounds, forced switch between batches."""
    s: int
    k: int

    def __post_init__(self):
        if not (isinstance(self.s, int) and isinstance(self.k, int) and self.s >= 1 and self.k >= 1):
            raise ParameterError(f"FixedBatches needs s, k >= 1, got s={self.s}, k={self.k}")

    @property
    def sizes(self):
        return (self.k,) * self.s

    @property
    def total_rounds(self):
        return self.s * self.k

    def __str__(self):
        return f"batch:{self.s},{self.k}"


@dataclass(frozen=True)
class BatchSizes:
    """Batches of announced lengths ``i_1..i_s``."""
    sizes: Tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(self.sizes)
        object.__setattr__(self, "sizes", sizes)
        if not sizes or any(not isinstance(i, int) or i < 1 for i in sizes):
            raise ParameterError(f"BatchSizes needs positive sizes, got {sizes}")

    @property
    def total_rounds(self):
        return sum(self.sizes)

    def __str__(self):
        return "sizes:" + ",".join(map(str, self.sizes))


def parse_variant(text: str):
    try:
        kind, _, args = text.partition(":")
        nums = tuple(int(a) for a in args.split(",")) if args else ()
    except ValueError as exc:
        raise ParameterError(f"bad variant {text!r}") from exc
    if kind == "switch" and len(nums) == 2:
        return SwitchBudget(*nums)
    if kind == "batch" and len(nums) == 2:
        return FixedBatches(*nums)
    if kind == "sizes" and nums:
        return BatchSizes(nums)
    raise ParameterError(f"bad variant {text!r}; use switch:s,r | batch:s,k | sizes:i1,i2,...")


def batch_of_round(variant, round_index):
    """0-based batch of the round with 0-based index ``round_index``."""
    sizes = variant.sizes
    acc = 0
    for b, size in enumerate(sizes):
        acc += size
        if round_index < acc:
            return b
    return len(sizes) - 1


@dataclass(frozen=True)
class Move:
    board: Board
    vertex: int

    def __str__(self):
        return f"{self.board.value}:{self.vertex}"


@dataclass(frozen=True)
class GameInstance:
    left: object
    right: object
    variant: object
    designated: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        pairs = tuple((int(x), int(y)) for x, y in self.designated)
        object.__setattr__(self, "designated", pairs)
        for x, y in pairs:
            if not (self.left.is_valid(x) and self.right.is_valid(y)):
                raise ParameterError(f"designated pair {(x, y)} references invalid vertices")

    def tree(self, board: Board):
        return self.left if board is Board.LEFT else self.right

    @property
    def total_rounds(self):
        return self.variant.total_rounds

    def swapped(self):
        return GameInstance(self.right, self.left, self.variant,
                            tuple((y, x) for x, y in self.designated))


@dataclass(frozen=True)
class PlayState:
    history: Tuple[Tuple[int, int], ...]
    base: int
    round_index: int = 0
    start_board: Optional[Board] = None
    current_board: Optional[Board] = None
    switches_used: int = 0
    spoiler_boards: Tuple[Board, ...] = ()

    @property
    def rounds(self):
        return self.history[self.base:]


def initial_state(instance: GameInstance) -> PlayState:
    history = ((instance.left.root, instance.right.root),) + instance.designated
    return PlayState(history=history, base=len(history))


def game_over(instance, state):
    return state.round_index >= instance.total_rounds


def legal_boards(instance, state):
    """Boards Spoiler may play on in the next round."""
    if game_over(instance, state):
        raise GameOverError("all rounds have been played")
    variant = instance.variant
    if state.round_index == 0:
        return (Board.LEFT, Board.RIGHT)
    if isinstance(variant, SwitchBudget):
        if state.switches_used < variant.s:
            return (state.current_board, state.current_board.other)
        return (state.current_board,)
    b = batch_of_round(variant, state.round_index)
    return (state.start_board if b % 2 == 0 else state.start_board.other,)


def legal_spoiler_moves(instance, state):
    """All legal Spoiler moves, in (board, vertex) order."""
    return [Move(board, v) for board in legal_boards(instance, state)
            for v in range(len(instance.tree(board)))]


def play_round(instance, state, spoiler: Move, duplicator_vertex: int) -> PlayState:
    boards = legal_boards(instance, state)
    if spoiler.board not in boards:
        if isinstance(instance.variant, SwitchBudget):
            raise IllegalMoveError("switch budget", f"{instance.variant.s} switch(es) already used")
        raise IllegalMoveError("batch board", f"round {state.round_index + 1} must be played on "
                               f"{boards[0].name}")
    if not instance.tree(spoiler.board).is_valid(spoiler.vertex):
        raise IllegalMoveError("spoiler vertex", f"{spoiler.vertex!r} is not a vertex of {spoiler.board.name}")
    if not instance.tree(spoiler.board.other).is_valid(duplicator_vertex):
        raise IllegalMoveError("duplicator board",
                               f"{duplicator_vertex!r} is not a vertex of {spoiler.board.other.name}")
    if spoiler.board is Board.LEFT:
        pair = (spoiler.vertex, duplicator_vertex)
    else:
        pair = (duplicator_vertex, spoiler.vertex)
    switched = state.current_board is not None and spoiler.board is not state.current_board
    return replace(
        state,
        history=state.history + (pair,),
        round_index=state.round_index + 1,
        start_board=state.start_board or spoiler.board,
        current_board=spoiler.board,
        switches_used=state.switches_used + int(switched),
        spoiler_boards=state.spoiler_boards + (spoiler.board,),
    )


# -- winning conditions ----------------------------------------------------

@dataclass(frozen=True)
class WinCheck:
    satisfied: bool
    pair: Optional[Tuple[int, int]] = None
    rule: Optional[str] = None

    def __bool__(self):
        return self.satisfied


def check_winning(left, right, history) -> WinCheck:
    """Check both winning conditions over every ordered index pair of ``history``."""
    lp, rp = left.parents, right.parents
    n = len(history)
    for j in range(n):
        xj, yj = history[j]
        for i in range(n):
            xi, yi = history[i]
            if (lp[xj] == xi) != (rp[yj] == yi):
                return WinCheck(False, (i, j), "Main 1")
            if (xi == xj) != (yi == yj):
                return WinCheck(False, (i, j), "Main 2")
    return WinCheck(True)


def consistent_with(left, right, history, x, y):
    """True when adding the pair (x, y) to a satisfied ``history`` keeps it satisfied."""
    lp, rp = left.parents, right.parents
    px, py = lp[x], rp[y]
    if (px == x) != (py == y):
        return False
    for xi, yi in history:
        if (xi == x) != (yi == y):
            return False
        if (px == xi) != (py == yi):
            return False
        if (lp[xi] == x) != (rp[yi] == y):
            return False
    return True


# -- transcripts -----------------------------------------------------------

def format_transcript(instance, state, notes=()):
    lines = ["# ehrenfeucht transcript v1", f"variant={instance.variant}",
             f"left_nodes={len(instance.left)}", f"right_nodes={len(instance.right)}"]
    des = ",".join(f"{x}:{y}" for x, y in instance.designated) or "none"
    lines.append(f"designated={des}")
    lines.extend(f"# {n}" for n in notes)
    for n, ((x, y), board) in enumerate(zip(state.rounds, state.spoiler_boards), start=1):
        sp, du = (x, y) if board is Board.LEFT else (y, x)
        lines.append(f"round={n} spoiler={board.value}:{sp} duplicator={board.other.value}:{du}")
    return "\n".join(lines) + "\n"


@dataclass
class Transcript:
    variant: object
    designated: tuple
    moves: list = field(default_factory=list)  # (Move, duplicator vertex)
    left_nodes: Optional[int] = None
    right_nodes: Optional[int] = None


def parse_transcript(text: str) -> Transcript:
    header = {}
    moves = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("round="):
            fields = dict(part.split("=", 1) for part in line.split())
            sb, sv = fields["spoiler"].split(":")
            db, dv = fields["duplicator"].split(":")
            board = Board(sb)
            if Board(db) is not board.other:
                raise ParameterError(f"transcript line has both picks on one board: {line!r}")
            moves.append((Move(board, int(sv)), int(dv)))
        else:
            key, _, value = line.partition("=")
            header[key] = value
    if "variant" not in header:
        raise ParameterError("transcript has no variant header")
    designated = ()
    if header.get("designated", "none") != "none":
        designated = tuple(tuple(int(a) for a in p.split(":")) for p in header["designated"].split(","))
    return Transcript(parse_variant(header["variant"]), designated, moves,
                      int(header["left_nodes"]) if "left_nodes" in header else None,
                      int(header["right_nodes"]) if "right_nodes" in header else None)


def replay(instance, moves):
    """Replay (spoiler move, duplicator vertex) pairs through the rules."""
    state = initial_state(instance)
    for spoiler, dup in moves:
        state = play_round(instance, state, spoiler, dup)
    return state


class Responder:
    """Duplicator in a game in progress: receives Spoiler moves, returns her vertex.

    Responders track the play themselves, so ``respond`` must be called once
    per round in order.  ``fork`` returns an independent copy used to branch
    exhaustive searches.
    """

    def respond(self, move: Move) -> int:
        raise NotImplementedError

    def fork(self) -> "Responder":
        import copy
        return copy.deepcopy(self)

    def selfcheck(self) -> dict:
        return {}
