"""Verification pipelines: construction checks, Spoiler sweeps, formula pools."""

from __future__ import annotations

import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

from .adaptors import adapt_batches_to_switch_budget
from .errors import (BudgetExceededError, DesyncError, IllegalMoveError, ParameterError,
                     StrategyViolatedError)
from .games import (Board, FixedBatches, GameInstance, Move, SwitchBudget, check_winning,
                    game_over, initial_state, legal_boards, play_round)
from .logic import (ROOT, And, Eq, Exists, Forall, Iff, Implies, Not, Or, ParentOf, Var,
                    aqd_syntactic, eval_formula, eval_P_direct, formula_for_KEIN, is_sentence, qd)
from .solver import MinimaxSolver, Player, orbit_signatures
from .strategy import RecursiveStrategy
from .syntax import to_text
from .trees import construction_pair


# -- construction ----------------------------------------------------------

@dataclass
class ConstructionReport:
    s: int
    k: int
    m: int
    sizes: tuple
    t1_direct: bool
    t2_direct: bool
    t1_formula: bool
    t2_formula: bool

    @property
    def passed(self):
        return self.t1_direct and not self.t2_direct and self.t1_formula and not self.t2_formula


def verify_construction(s, k, m) -> ConstructionReport:
    """Check that T1 satisfies KEIN_s and T2 does not, by both evaluators."""
    t1, t2 = construction_pair(s, k, m)
    kein = formula_for_KEIN(s)
    return ConstructionReport(s, k, m, (len(t1), len(t2)),
                              eval_P_direct(t1, s, t1.root), eval_P_direct(t2, s, t2.root),
                              eval_formula(t1, kein), eval_formula(t2, kein))


# -- sweeps ----------------------------------------------------------------

@dataclass
class SweepReport:
    instance: str
    strategy: str
    lines: int = 0
    losses: int = 0
    forfeits: dict = field(default_factory=dict)
    tallies: dict = field(default_factory=dict)   # label -> [passes, failures]
    wall_time: float = 0.0
    first_loss: Optional[list] = None
    seed: Optional[int] = None
    deduplicated: bool = False

    @property
    def passed(self):
        return self.losses == 0

    def merge(self, other: "SweepReport") -> "SweepReport":
        tallies = {k: list(v) for k, v in self.tallies.items()}
        for label, (ok, bad) in other.tallies.items():
            cur = tallies.setdefault(label, [0, 0])
            cur[0] += ok
            cur[1] += bad
        forfeits = dict(self.forfeits)
        for k, v in other.forfeits.items():
            forfeits[k] = forfeits.get(k, 0) + v
        losses = [x for x in (self.first_loss, other.first_loss) if x is not None]
        return SweepReport(self.instance, self.strategy, self.lines + other.lines,
                           self.losses + other.losses, forfeits, tallies,
                           self.wall_time + other.wall_time,
                           min(losses) if losses else None, self.seed,
                           self.deduplicated or other.deduplicated)

    def fingerprint(self):
        """Everything except wall time, for reproducibility checks."""
        doc = self.to_json()
        doc.pop("wall_time")
        return doc

    def to_json(self):
        doc = asdict(self)
        doc["passed"] = self.passed
        return doc


def _describe(instance):
    return (f"{instance.variant} left={len(instance.left)} right={len(instance.right)} "
            f"designated={list(instance.designated)}")


def estimate_lines(instance, start_boards=None):
    """Number of complete Spoiler lines, counted from board sizes."""
    sizes = {Board.LEFT: len(instance.left), Board.RIGHT: len(instance.right)}
    variant = instance.variant
    starts = tuple(start_boards or (Board.LEFT, Board.RIGHT))
    total = 0
    if isinstance(variant, SwitchBudget):
        for start in starts:
            ways = {(start, 0): sizes[start]}
            for _ in range(variant.r - 1):
                nxt = {}
                for (board, sw), n in ways.items():
                    nxt[(board, sw)] = nxt.get((board, sw), 0) + n * sizes[board]
                    if sw < variant.s:
                        key = (board.other, sw + 1)
                        nxt[key] = nxt.get(key, 0) + n * sizes[board.other]
                ways = nxt
            total += sum(ways.values())
        return total
    for start in starts:
        n = 1
        for b, size in enumerate(variant.sizes):
            n *= sizes[start if b % 2 == 0 else start.other] ** size
        total += n
    return total


_FORFEITS = (StrategyViolatedError, DesyncError, IllegalMoveError)


class _Sweeper:
    def __init__(self, instance, factory, selfcheck, dedup, report):
        self.instance = instance
        self.factory = factory
        self.selfcheck = selfcheck
        self.dedup = dedup
        self.report = report

    def tally(self, responder):
        for label, ok in responder.selfcheck().items():
            cur = self.report.tallies.setdefault(label, [0, 0])
            cur[0 if ok else 1] += 1

    def moves(self, state, board):
        tree = self.instance.tree(board)
        if not self.dedup:
            return range(len(tree))
        fixed = frozenset(p[0] if board is Board.LEFT else p[1] for p in state.history)
        sig = orbit_signatures(tree, fixed)
        seen = {}
        for v in range(len(tree)):
            seen.setdefault(sig[v], v)
        return sorted(seen.values())

    def finish(self, state, line, lost):
        rep = self.report
        rep.lines += 1
        if lost or not check_winning(self.instance.left, self.instance.right, state.history):
            rep.losses += 1
            entry = [[m.board.value, m.vertex, w] for m, w in line]
            if rep.first_loss is None or entry < rep.first_loss:
                rep.first_loss = entry

    def play(self, state, responder, move, line):
        try:
            w = responder.respond(move)
            state = play_round(self.instance, state, move, w)
        except _FORFEITS as exc:
            name = type(exc).__name__
            self.report.forfeits[name] = self.report.forfeits.get(name, 0) + 1
            self.finish(state, line + [(move, -1)], lost=True)
            return None
        if self.selfcheck:
            self.tally(responder)
        return state, line + [(move, w)]

    def dfs(self, state, responder, line):
        if game_over(self.instance, state):
            self.finish(state, line, lost=False)
            return
        for board in legal_boards(self.instance, state):
            for v in self.moves(state, board):
                child = responder.fork()
                nxt = self.play(state, child, Move(board, v), line)
                if nxt is not None:
                    self.dfs(nxt[0], child, nxt[1])


def _sweep_opening(args):
    instance, factory, move, selfcheck, dedup = args
    report = SweepReport(_describe(instance), getattr(factory, "name", type(factory).__name__))
    sw = _Sweeper(instance, factory, selfcheck, dedup, report)
    state = initial_state(instance)
    responder = factory(instance)
    nxt = sw.play(state, responder, move, [])
    if nxt is not None:
        sw.dfs(nxt[0], responder, nxt[1])
    return report


def exhaustive_spoiler_sweep(instance, factory, max_lines=2_000_000, start_boards=None,
                             selfcheck=True, dedup=False, workers=1) -> SweepReport:
    """Drive ``factory``'s Duplicator through every legal Spoiler line.

    A strategy that raises instead of answering forfeits the line, which
    counts as a loss.  ``dedup`` keeps one Spoiler move per symmetry orbit;
    that shrinks the sweep but only proves something for strategies that
    treat symmetric moves alike, so it is off by default.
    """
    estimate = estimate_lines(instance, start_boards)
    if estimate > max_lines:
        raise BudgetExceededError(f"sweep would enumerate {estimate} lines (limit {max_lines})")
    t0 = time.perf_counter()
    starts = tuple(start_boards or (Board.LEFT, Board.RIGHT))
    report = SweepReport(_describe(instance), getattr(factory, "name", type(factory).__name__),
                         deduplicated=dedup)
    opener = _Sweeper(instance, factory, selfcheck, dedup, report)
    state = initial_state(instance)
    jobs = [(instance, factory, Move(b, v), selfcheck, dedup)
            for b in starts for v in opener.moves(state, b)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            parts = list(pool.map(_sweep_opening, jobs))
    else:
        parts = [_sweep_opening(job) for job in jobs]
    for part in parts:
        report = report.merge(part)
    report.wall_time = time.perf_counter() - t0
    return report


def _random_vertex(rng, tree, picks):
    if not picks or rng.random() < 0.5:
        return rng.randrange(len(tree))
    u = rng.choice(picks)
    near = [u, *tree.children[u]]
    p = tree.parents[u]
    if p is not None:
        near += [p, *tree.children[p]]
    for c in tree.children[u]:
        near += tree.children[c]
    return rng.choice(near)


def random_spoiler_sweep(instance, factory, n, seed=0, selfcheck_every=0) -> SweepReport:
    """Play ``n`` seeded random Spoiler lines.

    Half of Spoiler's moves are uniform over the board; the rest land next to
    an earlier pick (itself, a parent, child, sibling or grandchild), which is
    where the strategy's case analysis branches.
    """
    rng = random.Random(seed)
    report = SweepReport(_describe(instance), getattr(factory, "name", type(factory).__name__),
                         seed=seed)
    sw = _Sweeper(instance, factory, False, False, report)
    t0 = time.perf_counter()
    for i in range(n):
        state = initial_state(instance)
        responder = factory(instance)
        line = []
        while not game_over(instance, state):
            board = rng.choice(legal_boards(instance, state))
            picks = [p[0] if board is Board.LEFT else p[1] for p in state.history]
            move = Move(board, _random_vertex(rng, instance.tree(board), picks))
            nxt = sw.play(state, responder, move, line)
            if nxt is None:
                break
            state, line = nxt
            if selfcheck_every and i % selfcheck_every == 0:
                sw.tally(responder)
        else:
            sw.finish(state, line, lost=False)
    report.wall_time = time.perf_counter() - t0
    return report


# -- formula pools and the game/logic spot check ----------------------------

@dataclass
class FormulaPool:
    seed: int
    bounds: tuple
    sentences: list

    def __len__(self):
        return len(self.sentences)


def _random_formula(rng, depth, scope, names):
    terms = [Var(v) for v in scope] + [ROOT]
    roll = rng.random()
    if depth == 0 or roll < 0.25:
        a, b = rng.choice(terms), rng.choice(terms)
        return Eq(a, b) if rng.random() < 0.4 else ParentOf(a, b)
    if roll < 0.6:
        var = names[len(scope)]
        body = _random_formula(rng, depth - 1, scope + [var], names)
        return (Exists if rng.random() < 0.5 else Forall)(var, body)
    if roll < 0.7:
        return Not(_random_formula(rng, depth, scope, names))
    op = rng.choice((And, Or, Implies, Iff))
    return op(_random_formula(rng, depth, scope, names), _random_formula(rng, depth, scope, names))


def generate_formula_pool(seed, qd_max, aqd_max, n) -> FormulaPool:
    """Deterministic pool of distinct sentences within the given bounds."""
    if n < 1:
        raise ParameterError("a pool needs n >= 1")
    rng = random.Random(seed)
    names = [f"x{i}" for i in range(qd_max + 1)]
    sentences, seen = [], set()
    for i in range(0, qd_max):
        if i <= aqd_max:
            kein = formula_for_KEIN(i)
            sentences.append(kein)
            seen.add(to_text(kein))
    attempts = 0
    while len(sentences) < n and attempts < 200 * n:
        attempts += 1
        var = names[0]
        phi = (Exists if rng.random() < 0.5 else Forall)(
            var, _random_formula(rng, max(qd_max - 1, 0), [var], names)) if qd_max > 0 \
            else _random_formula(rng, 0, [], names)
        if not is_sentence(phi) or qd(phi) > qd_max or aqd_syntactic(phi) > aqd_max:
            continue
        text = to_text(phi)
        if text not in seen:
            seen.add(text)
            sentences.append(phi)
    return FormulaPool(seed, (qd_max, aqd_max), sentences)


@dataclass
class Theorem1Report:
    winner: Player
    s: int
    r: int
    checked: int
    disagreements: list
    witness: Optional[str] = None

    @property
    def counterexample(self):
        return self.winner is Player.DUPLICATOR and bool(self.disagreements)

    @property
    def passed(self):
        return not self.counterexample


def theorem1_spotcheck(left, right, s, r, pool, **solver_kw) -> Theorem1Report:
    """Compare the game verdict with the pool sentences inside the (qd, aqd) bounds."""
    outcome = MinimaxSolver(GameInstance(left, right, SwitchBudget(s, r)), **solver_kw).solve()
    eligible = [phi for phi in pool.sentences if qd(phi) <= r and aqd_syntactic(phi) <= s]
    split = [to_text(phi) for phi in eligible if eval_formula(left, phi) != eval_formula(right, phi)]
    return Theorem1Report(outcome.winner, s, r, len(eligible), split, split[0] if split else None)


# -- the full argument at desk scale ----------------------------------------

@dataclass
class Step:
    name: str
    passed: bool
    detail: str


@dataclass
class PipelineReport:
    s: int
    k: int
    m: int
    steps: list
    verdict: Optional[str] = None

    @property
    def passed(self):
        return all(step.passed for step in self.steps) and self.verdict is not None

    def to_json(self):
        return {"s": self.s, "k": self.k, "m": self.m, "passed": self.passed,
                "verdict": self.verdict, "steps": [asdict(st) for st in self.steps]}


def lower_bound_pipeline(s, k, max_lines=2_000_000, prune_symmetry=True, random_lines=0,
                         seed=0) -> PipelineReport:
    """Run the lower-bound argument for KEIN_s with m = s*k and report each step.

    1. The construction splits KEIN_s.
    2. Duplicator wins ``FixedBatches{s, k}``: the explicit strategy is swept
       exhaustively if the line count allows, otherwise minimax decides.
    3. The batch strategy is transferred to ``SwitchBudget{s', k}`` with
       ``s' = min(s - 1, k)``; the transfer is swept and cross-checked by minimax
       where the budgets allow.  A k-round game has at most k - 1 switches, so
       the clamp loses nothing.
    """
    if s < 1 or k < 1:
        raise ParameterError("the pipeline needs s >= 1 and k >= 1")
    m = s * k
    steps = []
    report = PipelineReport(s, k, m, steps)
    con = verify_construction(s, k, m)
    kein = formula_for_KEIN(s)
    metrics = (qd(kein), aqd_syntactic(kein))
    steps.append(Step("construction", con.passed and metrics == (s + 1, s),
                      f"sizes={con.sizes} T1|=KEIN={con.t1_direct} T2|=KEIN={con.t2_direct} "
                      f"KEIN(qd,aqd)={metrics}"))
    if not steps[-1].passed:
        return report
    t1, t2 = construction_pair(s, k, m)
    batch = GameInstance(t1, t2, FixedBatches(s, k))
    explicit = RecursiveStrategy()
    if estimate_lines(batch) <= max_lines:
        sweep = exhaustive_spoiler_sweep(batch, explicit, max_lines=max_lines, selfcheck=False)
        ok, detail = sweep.passed, f"exhaustive sweep: {sweep.lines} lines, {sweep.losses} losses"
        try:
            out = MinimaxSolver(batch, prune_symmetry=prune_symmetry).solve()
            ok &= out.winner is Player.DUPLICATOR
            detail += f"; minimax: {out.winner}"
        except BudgetExceededError:
            pass
        steps.append(Step("batch game", ok, detail))
    else:
        try:
            out = MinimaxSolver(batch, prune_symmetry=prune_symmetry).solve()
            steps.append(Step("batch game", out.winner is Player.DUPLICATOR,
                              f"minimax: {out.winner} wins ({out.stats['positions']} positions)"))
        except BudgetExceededError as exc:
            if not random_lines:
                steps.append(Step("batch game", False, f"too large to verify: {exc}"))
                return report
            sweep = random_spoiler_sweep(batch, explicit, random_lines, seed)
            steps.append(Step("batch game", sweep.passed,
                              f"random sweep (evidence, not proof): {sweep.lines} lines, "
                              f"{sweep.losses} losses, seed {seed}"))
    if not steps[-1].passed:
        return report
    s_sw = min(s - 1, k)
    switch = GameInstance(t1, t2, SwitchBudget(s_sw, k))
    adapted = adapt_batches_to_switch_budget(explicit, s_sw, k, batches=s)
    details = []
    ok = True
    if estimate_lines(switch) <= max_lines:
        sweep = exhaustive_spoiler_sweep(switch, adapted, max_lines=max_lines, selfcheck=False)
        ok &= sweep.passed and not sweep.forfeits
        details.append(f"adapted strategy swept: {sweep.lines} lines, {sweep.losses} losses")
    try:
        out = MinimaxSolver(switch, prune_symmetry=prune_symmetry).solve()
        ok &= out.winner is Player.DUPLICATOR
        details.append(f"minimax on switch:{s_sw},{k}: {out.winner}")
    except BudgetExceededError as exc:
        details.append(f"minimax skipped: {exc}")
    if not details or len(details) == 1 and details[0].startswith("minimax skipped"):
        ok = False
        details.append("no verification of the switch game was within limits")
    steps.append(Step("switch game", ok, "; ".join(details)))
    if ok:
        report.verdict = (f"no sentence with qd <= {k} and aqd <= {s_sw} separates T1 from T2, "
                          f"while KEIN_{s} (qd {s + 1}, aqd {s}) does")
    return report
