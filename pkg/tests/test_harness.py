import pytest

from aqdtrees.errors import BudgetExceededError, ParameterError, StrategyViolatedError
from aqdtrees.games import Board, FixedBatches, GameInstance, Responder, SwitchBudget
from aqdtrees.harness import (estimate_lines, exhaustive_spoiler_sweep, generate_formula_pool,
                              lower_bound_pipeline, random_spoiler_sweep, theorem1_spotcheck,
                              verify_construction)
from aqdtrees.logic import aqd_syntactic, formula_for_KEIN, is_sentence, qd
from aqdtrees.solver import Player, solve_minimax
from aqdtrees.strategy import RecursiveStrategy
from aqdtrees.syntax import to_text


class RootOnly(Responder):
    def respond(self, move):
        return 0


class Crasher(Responder):
    def respond(self, move):
        raise StrategyViolatedError("no case applies")


def test_verify_construction():
    rep = verify_construction(2, 1, 2)
    assert rep.passed and rep.sizes == (25, 27)
    assert rep.t1_direct and not rep.t2_direct and rep.t1_formula and not rep.t2_formula


class TestSweeps:
    def test_line_estimate(self, pair):
        t1, t2 = pair(1, 1, 1)
        assert estimate_lines(GameInstance(t1, t2, FixedBatches(1, 1))) == 9
        assert estimate_lines(GameInstance(t1, t2, FixedBatches(2, 1))) == 5 * 4 + 4 * 5

    def test_budget(self, pair):
        t1, t2 = pair(2, 2, 4)
        with pytest.raises(BudgetExceededError):
            exhaustive_spoiler_sweep(GameInstance(t1, t2, FixedBatches(2, 2)), RecursiveStrategy(),
                                     max_lines=1000)

    def test_losing_strategy_is_caught(self, pair):
        t1, t2 = pair(1, 1, 1)
        rep = exhaustive_spoiler_sweep(GameInstance(t1, t2, FixedBatches(1, 1)), lambda i: RootOnly())
        # only the two root openings are answered correctly
        assert rep.lines == 9 and rep.losses == 7 and not rep.passed
        assert rep.first_loss is not None

    def test_forfeit_counts_as_loss(self, pair):
        t1, t2 = pair(1, 1, 1)
        rep = exhaustive_spoiler_sweep(GameInstance(t1, t2, FixedBatches(1, 1)), lambda i: Crasher())
        assert rep.losses == 9 and rep.forfeits == {"StrategyViolatedError": 9}

    def test_start_board_filter(self, pair):
        t1, t2 = pair(1, 1, 1)
        rep = exhaustive_spoiler_sweep(GameInstance(t1, t2, FixedBatches(1, 1)), RecursiveStrategy(),
                                       start_boards=[Board.RIGHT])
        assert rep.lines == 4

    def test_dedup_and_workers_agree(self, pair):
        t1, t2 = pair(1, 2, 2)
        inst = GameInstance(t1, t2, FixedBatches(1, 2))
        full = exhaustive_spoiler_sweep(inst, RecursiveStrategy())
        small = exhaustive_spoiler_sweep(inst, RecursiveStrategy(), dedup=True)
        par = exhaustive_spoiler_sweep(inst, RecursiveStrategy(), workers=2)
        assert full.lines == 164 and small.lines < full.lines
        assert full.losses == small.losses == par.losses == 0
        assert par.fingerprint() == full.fingerprint()

    def test_random_is_seeded(self, pair):
        t1, t2 = pair(2, 1, 2)
        inst = GameInstance(t1, t2, FixedBatches(2, 1))
        a = random_spoiler_sweep(inst, lambda i: RootOnly(), 300, seed=4)
        b = random_spoiler_sweep(inst, lambda i: RootOnly(), 300, seed=4)
        assert a.losses == b.losses and a.first_loss == b.first_loss
        assert a.losses > 0

    def test_report_json(self, pair):
        t1, t2 = pair(1, 1, 1)
        rep = exhaustive_spoiler_sweep(GameInstance(t1, t2, FixedBatches(1, 1)), RecursiveStrategy())
        doc = rep.to_json()
        assert doc["lines"] == 9 and doc["losses"] == 0 and doc["strategy"] == "recursive"


class TestFormulaPool:
    def test_bounds_and_determinism(self):
        a = generate_formula_pool(3, 2, 1, 150)
        b = generate_formula_pool(3, 2, 1, 150)
        assert [to_text(p) for p in a.sentences] == [to_text(p) for p in b.sentences]
        assert len(a) == 150
        for phi in a.sentences:
            assert is_sentence(phi) and qd(phi) <= 2 and aqd_syntactic(phi) <= 1
        assert len({to_text(p) for p in a.sentences}) == 150

    def test_kein_members(self):
        pool = generate_formula_pool(0, 3, 1, 20)
        texts = [to_text(p) for p in pool.sentences]
        assert to_text(formula_for_KEIN(0)) in texts and to_text(formula_for_KEIN(1)) in texts
        assert to_text(formula_for_KEIN(2)) not in texts

    def test_empty_pool(self):
        with pytest.raises(ParameterError):
            generate_formula_pool(0, 2, 1, 0)


class TestSpotCheck:
    def test_witness_when_spoiler_wins(self, pair):
        t1, t2 = pair(1, 1, 1)
        rep = theorem1_spotcheck(t1, t2, 1, 2, generate_formula_pool(1, 2, 2, 60))
        assert rep.winner is Player.SPOILER and rep.witness is not None and rep.passed

    def test_duplicator_win_has_no_split(self, pair):
        t1, t2 = pair(1, 2, 2)
        rep = theorem1_spotcheck(t1, t2, 0, 2, generate_formula_pool(2, 2, 2, 200))
        assert rep.winner is Player.DUPLICATOR
        assert rep.checked > 0 and rep.disagreements == [] and not rep.counterexample


class TestPipeline:
    @pytest.mark.parametrize("s,k", [(1, 1), (1, 2), (2, 1), (2, 2)])
    def test_small(self, s, k):
        rep = lower_bound_pipeline(s, k)
        assert rep.passed, rep.to_json()
        assert [st.name for st in rep.steps][0] == "construction"
        assert rep.to_json()["verdict"] == rep.verdict

    def test_random_fallback(self):
        rep = lower_bound_pipeline(3, 1, random_lines=300)
        assert rep.passed, rep.to_json()

    def test_parameters(self):
        with pytest.raises(ParameterError):
            lower_bound_pipeline(0, 1)


def test_switch_game_sweep_with_minimax(pair):
    t1, t2 = pair(1, 2, 2)
    inst = GameInstance(t1, t2, SwitchBudget(0, 2))
    out = solve_minimax(inst)
    assert exhaustive_spoiler_sweep(inst, out.strategy).passed
