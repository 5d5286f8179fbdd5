import json

import pytest

from aqdtrees.errors import IllegalMoveError, NoFreeChildError, ParameterError
from aqdtrees.games import Board, FixedBatches, GameInstance, Move, SwitchBudget
from aqdtrees.harness import exhaustive_spoiler_sweep, random_spoiler_sweep
from aqdtrees.solver import Player, solve_minimax
from aqdtrees.strategy import (DesignatedConfig, RecursiveStrategy, new_session, respond,
                               session_selfcheck, validate_designated)
from aqdtrees.trees import Tree

L, R = Board.LEFT, Board.RIGHT


def all_pass(report):
    return all(report.values())


class TestNewSession:
    @pytest.mark.parametrize("board", [L, R])
    def test_empty_start(self, pair, board):
        t1, t2 = pair(1, 1, 1)
        st = new_session(t1, t2, 1, spoiler_board=board).tracker_state()
        assert st["role"] is None
        assert st["free_a_tops"] == list(t1.children[0])
        assert st["free_b_tops"] == list(t2.children[0])

    def test_role_avoids_designated(self, pair):
        t1, t2 = pair(2, 1, 2)
        u1, u2, u3 = t1.children[0]
        v1 = t2.children[0][0]
        cfg = DesignatedConfig.build(t1, t2, [(u1, v1)])
        session = new_session(t1, t2, 1, cfg, R)
        assert session.tracker_state()["role"] == u2

    def test_all_tops_touched(self, pair):
        t1, t2 = pair(1, 2, 2)
        pairs = [(u, t2.children[0][0]) for u in t1.children[0]]
        with pytest.raises(NoFreeChildError):
            new_session(t1, t2, 2, pairs, R)

    def test_designated_need_right_start(self, pair):
        t1, t2 = pair(2, 1, 2)
        cfg = DesignatedConfig.build(t1, t2, [(t1.children[0][0], t2.children[0][0])])
        with pytest.raises(ParameterError):
            new_session(t1, t2, 1, cfg, L)

    def test_invalid_designated(self, pair):
        t1, t2 = pair(2, 1, 2)
        special = t2.children[0][-1]
        with pytest.raises(ParameterError):
            new_session(t1, t2, 1, [(t1.children[0][0], special)], R)

    def test_m_too_small(self, pair):
        t1, t2 = pair(1, 1, 1)
        with pytest.raises(ParameterError):
            new_session(t1, t2, 2)

    def test_wrong_roles(self, pair):
        t1, t2 = pair(1, 1, 1)
        with pytest.raises(ParameterError):
            new_session(t2, t1, 1)


class TestValidation:
    def test_conditions(self, pair):
        t1, t2 = pair(2, 1, 2)
        u1, u2, _ = t1.children[0]
        v1, v2, special = t2.children[0]
        inst = GameInstance(t1, t2, FixedBatches(2, 1))
        assert validate_designated(inst, DesignatedConfig.build(t1, t2, [(u1, v1)]))
        bad = validate_designated(inst, [(u1, special)])
        assert not bad and bad.condition == "C1"
        bad = validate_designated(inst, [(u1, v1 + 1)])
        assert not bad and bad.condition == "C3"
        k2 = GameInstance(t1, t2, FixedBatches(2, 1))
        assert validate_designated(k2, [(u1, v1), (u2, v2)]).condition == "C1"

    def test_c2(self, pair):
        t1, t2 = pair(2, 2, 4)
        u1 = t1.children[0][0]
        v1, v2 = t2.children[0][:2]
        inst = GameInstance(t1, t2, FixedBatches(2, 2))
        bad = validate_designated(inst, [(u1, v1), (u1 + 1, v2 + 1)])
        assert not bad and bad.condition == "C2"


class TestBaseCase:
    def test_right_start_mirrors_index(self, pair):
        t1, t2 = pair(1, 2, 2)
        for i, v in enumerate(t2.children[0]):
            session = new_session(t1, t2, 2, spoiler_board=R)
            assert respond(session, Move(R, v)) == t1.children[0][i]

    def test_repeat_returns_mate(self, pair):
        t1, t2 = pair(1, 2, 2)
        session = new_session(t1, t2, 2, spoiler_board=R)
        v = t2.children[0][1]
        first = respond(session, Move(R, v))
        assert respond(session, Move(R, v)) == first

    def test_left_start_takes_lowest_free(self, pair):
        t1, t2 = pair(1, 2, 2)
        session = new_session(t1, t2, 2, spoiler_board=L)
        u1, u2, u3 = t1.children[0]
        v1, v2, _ = t2.children[0]
        assert respond(session, Move(L, u3)) == v1
        assert respond(session, Move(L, u1)) == v2

    def test_wrong_board(self, pair):
        t1, t2 = pair(2, 1, 2)
        session = new_session(t1, t2, 1, spoiler_board=R)
        respond(session, Move(R, 1))
        with pytest.raises(IllegalMoveError):
            respond(session, Move(R, 2))

    def test_determinism(self, pair):
        t1, t2 = pair(2, 1, 2)
        line = [Move(R, 26), Move(L, 20)]
        out = []
        for _ in range(2):
            session = new_session(t1, t2, 1, spoiler_board=R)
            out.append([respond(session, m) for m in line])
        assert out[0] == out[1]


class TestSelfcheck:
    def test_fresh_session(self, pair):
        t1, t2 = pair(1, 1, 1)
        assert all_pass(session_selfcheck(new_session(t1, t2, 1)))

    def test_after_base_plays(self, pair):
        t1, t2 = pair(1, 2, 2)
        session = new_session(t1, t2, 2, spoiler_board=R)
        respond(session, Move(R, t2.children[0][2]))
        respond(session, Move(R, t2.children[0][0] + 1))
        report = session_selfcheck(session)
        assert {"Main", "A1", "A2", "A3"} <= set(report) and all_pass(report)

    def test_corruption_detected(self, pair):
        t1, t2 = pair(2, 1, 2)
        session = new_session(t1, t2, 1, spoiler_board=R)
        respond(session, Move(R, t2.children[0][0] + 1))
        respond(session, Move(L, t1.children[0][1] + 2))
        assert all_pass(session_selfcheck(session))
        x, y = session.pairs[-1]
        session.pairs[-1] = (x, t2.children[0][-1])
        report = session_selfcheck(session)
        assert not all_pass(report)
        assert not report["Main"] or not report["B2"]

    def test_later_labels(self, pair):
        t1, t2 = pair(2, 1, 2)
        session = new_session(t1, t2, 1, spoiler_board=L)
        respond(session, Move(L, 1))
        respond(session, Move(R, 26))
        report = session_selfcheck(session)
        assert {"A'1", "A'2", "A'3", "B'1", "B'2", "B'3", "B'4"} <= set(report)
        assert all_pass(report)

    def test_tracker_json(self, pair):
        t1, t2 = pair(2, 1, 2)
        resp = RecursiveStrategy()(GameInstance(t1, t2, FixedBatches(2, 1)))
        assert resp.tracker_state() is None
        special = t2.children[0][-1]
        resp.respond(Move(R, special))
        role = resp.tracker_state()["role"]
        assert role == t1.children[0][0]
        # a pick below the role child is answered inside the special child's copy
        assert t2.in_subtree(resp.respond(Move(L, role + 1)), special)
        doc = json.loads(resp.tracker_json())
        assert doc["rounds"] == 2 and doc["child"] is not None


class TestRecursiveStrategy:
    @pytest.mark.parametrize("skm", [(1, 3, 3), (2, 1, 3), (1, 2, 3)])
    def test_exhaustive_with_spare_children(self, pair, skm):
        s, k, m = skm
        t1, t2 = pair(s, k, m)
        rep = exhaustive_spoiler_sweep(GameInstance(t1, t2, FixedBatches(s, k)), RecursiveStrategy())
        assert rep.losses == 0 and not rep.forfeits
        assert all(bad == 0 for _, bad in rep.tallies.values())

    def test_swapped_boards(self, pair):
        t1, t2 = pair(2, 1, 2)
        rep = exhaustive_spoiler_sweep(GameInstance(t2, t1, FixedBatches(2, 1)), RecursiveStrategy())
        assert rep.losses == 0 and not rep.forfeits

    def test_random_with_selfcheck(self, pair):
        t1, t2 = pair(2, 2, 4)
        rep = random_spoiler_sweep(GameInstance(t1, t2, FixedBatches(2, 2)), RecursiveStrategy(),
                                   n=2000, seed=5, selfcheck_every=1)
        assert rep.losses == 0
        assert rep.tallies and all(bad == 0 for _, bad in rep.tallies.values())

    def test_agrees_with_minimax_on_designated(self, pair):
        t1, t2 = pair(2, 1, 2)
        cfg = DesignatedConfig.build(t1, t2, [(3, 3)])
        inst = GameInstance(t1, t2, FixedBatches(2, 1), designated=cfg.pairs)
        assert validate_designated(inst, cfg)
        assert solve_minimax(inst).winner is Player.DUPLICATOR
        rep = exhaustive_spoiler_sweep(inst, RecursiveStrategy(), start_boards=[R])
        assert rep.losses == 0

    @pytest.mark.parametrize("variant", [SwitchBudget(1, 2), FixedBatches(1, 1), FixedBatches(2, 2)])
    def test_refuses_other_games(self, pair, variant):
        t1, t2 = pair(2, 1, 2)
        with pytest.raises(ParameterError):
            RecursiveStrategy()(GameInstance(t1, t2, variant))

    def test_needs_construction_trees(self, pair):
        t1, _ = pair(1, 1, 1)
        with pytest.raises(ParameterError):
            RecursiveStrategy()(GameInstance(t1, Tree([None, 0]), FixedBatches(1, 1)))
