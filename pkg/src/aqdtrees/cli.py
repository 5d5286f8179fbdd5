"""Command-line interface.  Exit codes: 0 pass, 1 verification failure, 2 usage error."""

from __future__ import annotations

import argparse
import json
import sys

from .errors import AqdError
from .games import (Board, FixedBatches, GameInstance, Move, check_winning, format_transcript, game_over,
                    initial_state, legal_boards, parse_transcript, parse_variant, play_round, replay)
from .harness import (estimate_lines, exhaustive_spoiler_sweep, generate_formula_pool,
                      lower_bound_pipeline, random_spoiler_sweep, theorem1_spotcheck,
                      verify_construction)
from .logic import aqd_syntactic, eval_formula, eval_P_direct, qd
from .solver import MinimaxSolver, Player, SolvedResponder
from .strategy import RecursiveStrategy
from .syntax import parse_formula, to_text
from .trees import build_construction, construction_pair, deserialize, serialize

PASS, FAIL, USAGE = 0, 1, 2


def _load_tree(path):
    with open(path, "rb") as fh:
        return deserialize(fh.read())


def _load_pairs(path):
    if not path:
        return ()
    with open(path) as fh:
        return tuple(tuple(p) for p in json.load(fh))


def _emit(args, doc, text):
    print(json.dumps(doc, indent=2, sort_keys=True, default=str) if args.json else text)


# -- tree / prop / formula -------------------------------------------------

def cmd_tree_build(args):
    tree = build_construction(args.role, args.s, args.k, args.m)
    data = serialize(tree, "json")
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    if args.dot:
        with open(args.dot, "wb") as fh:
            fh.write(serialize(tree, "dot"))
    if not args.out:
        sys.stdout.write(data.decode() + "\n")
    else:
        _emit(args, {"nodes": len(tree), "out": args.out}, f"wrote {len(tree)} nodes to {args.out}")
    return PASS


def cmd_prop_eval(args):
    tree = _load_tree(args.tree)
    vertex = tree.root if args.vertex is None else args.vertex
    value = eval_P_direct(tree, args.i, vertex)
    _emit(args, {"i": args.i, "vertex": vertex, "value": value}, str(value).lower())
    return PASS


def cmd_formula(args):
    phi = parse_formula(args.formula)
    if args.action == "qd":
        _emit(args, {"formula": to_text(phi), "qd": qd(phi)}, str(qd(phi)))
    elif args.action == "aqd":
        _emit(args, {"formula": to_text(phi), "aqd": aqd_syntactic(phi)}, str(aqd_syntactic(phi)))
    else:
        if not args.tree:
            raise AqdError("formula eval needs --tree")
        value = eval_formula(_load_tree(args.tree), phi)
        _emit(args, {"formula": to_text(phi), "value": value}, str(value).lower())
    return PASS


# -- games -----------------------------------------------------------------

def _instance(args):
    return GameInstance(_load_tree(args.left), _load_tree(args.right), parse_variant(args.variant),
                        _load_pairs(args.designated))


def _line_doc(line):
    return [{"spoiler": str(m), "duplicator": f"{m.board.other.value}:{w}"} for m, w in line]


def cmd_game_solve(args):
    inst = _instance(args)
    out = MinimaxSolver(inst, prune_symmetry=args.prune).solve()
    doc = {"winner": str(out.winner), "stats": out.stats}
    text = f"winner: {out.winner}"
    if out.line is not None:
        doc["line"] = _line_doc(out.line)
        text += "\nSpoiler line: " + ", ".join(f"{d['spoiler']}->{d['duplicator']}" for d in doc["line"])
    _emit(args, doc, text)
    return PASS


def _engine(inst, name):
    if name in ("auto", "recursive"):
        try:
            return RecursiveStrategy()(inst), "recursive"
        except AqdError:
            if name == "recursive":
                raise
    solver = MinimaxSolver(inst, prune_symmetry=True)
    out = solver.solve()
    return SolvedResponder(solver, solver.initial, forgiving=True), f"minimax ({out.winner} wins)"


def _read_move(inst, state, stream, out):
    boards = legal_boards(inst, state)
    names = "/".join(b.value for b in boards)
    while True:
        out.write(f"round {state.round_index + 1} [{names}] board vertex> ")
        out.flush()
        raw = stream.readline()
        if not raw:
            return None
        text = raw.strip().replace(":", " ")
        if text in ("q", "quit"):
            return None
        parts = text.split()
        try:
            if len(parts) == 1 and len(boards) == 1:
                board, vertex = boards[0], int(parts[0])
            else:
                board, vertex = Board(parts[0].upper()), int(parts[1])
        except (ValueError, IndexError):
            out.write("enter e.g. 'L 3' or 'R:0'\n")
            continue
        if board not in boards or not inst.tree(board).is_valid(vertex):
            out.write("illegal move, try again\n")
            continue
        return Move(board, vertex)


def cmd_game_play(args, stdin=None):
    stdin = stdin or sys.stdin
    inst = _instance(args)
    responder, engine = _engine(inst, args.strategy)
    print(f"Duplicator engine: {engine}; variant {inst.variant}; "
          f"left {len(inst.left)} nodes, right {len(inst.right)} nodes")
    state = initial_state(inst)
    while not game_over(inst, state):
        move = _read_move(inst, state, stdin, sys.stdout)
        if move is None:
            print("\nquit")
            break
        w = responder.respond(move)
        state = play_round(inst, state, move, w)
        status = check_winning(inst.left, inst.right, state.history)
        checks = " ".join(f"{k}={'ok' if v else 'FAIL'}" for k, v in responder.selfcheck().items())
        print(f"  {move} -> {move.board.other.value}:{w}   conditions: "
              f"{'satisfied' if status else 'violated ' + str(status.rule)} {checks}")
    final = check_winning(inst.left, inst.right, state.history)
    winner = "unfinished"
    if game_over(inst, state):
        winner = Player.DUPLICATOR if final else Player.SPOILER
    with open(args.transcript, "w") as fh:
        fh.write(format_transcript(inst, state, notes=[f"engine {engine}"]))
    print(f"result: {winner}; transcript saved to {args.transcript}")
    return PASS


def cmd_game_replay(args):
    tr = parse_transcript(open(args.transcript).read())
    left, right = _load_tree(args.left), _load_tree(args.right)
    inst = GameInstance(left, right, tr.variant, tr.designated)
    state = replay(inst, tr.moves)
    final = check_winning(left, right, state.history)
    doc = {"rounds": state.round_index, "satisfied": final.satisfied,
           "violation": final.pair, "rule": final.rule}
    _emit(args, doc, "satisfied" if final else f"violated {final.rule} at {final.pair}")
    return PASS


# -- verification ------------------------------------------------------------

def cmd_verify_construction(args):
    rep = verify_construction(args.s, args.k, args.m)
    doc = {"s": rep.s, "k": rep.k, "m": rep.m, "sizes": rep.sizes, "passed": rep.passed,
           "t1_direct": rep.t1_direct, "t2_direct": rep.t2_direct,
           "t1_formula": rep.t1_formula, "t2_formula": rep.t2_formula}
    _emit(args, doc, f"construction ({args.s},{args.k},{args.m}) sizes {rep.sizes}: "
                     f"{'pass' if rep.passed else 'FAIL'}")
    return PASS if rep.passed else FAIL


def cmd_verify_sweep(args):
    m = args.m if args.m is not None else args.s * args.k
    t1, t2 = construction_pair(args.s, args.k, m)
    inst = GameInstance(t1, t2, FixedBatches(args.s, args.k), _load_pairs(args.designated))
    starts = None if args.start is None else (Board(args.start),)
    if args.random:
        rep = random_spoiler_sweep(inst, RecursiveStrategy(), args.random, args.seed)
    else:
        rep = exhaustive_spoiler_sweep(inst, RecursiveStrategy(), max_lines=args.max_lines,
                                       start_boards=starts, workers=args.workers)
    text = (f"{rep.instance}: {rep.lines} lines, {rep.losses} losses, "
            f"{rep.wall_time:.2f}s (estimate {estimate_lines(inst, starts)})")
    _emit(args, rep.to_json(), text)
    return PASS if rep.passed else FAIL


def cmd_verify_theorem1(args):
    left, right = _load_tree(args.left), _load_tree(args.right)
    pool = generate_formula_pool(args.seed, args.qd_max, args.aqd_max, args.n)
    rep = theorem1_spotcheck(left, right, args.s, args.r, pool)
    doc = {"winner": str(rep.winner), "checked": rep.checked, "disagreements": rep.disagreements,
           "witness": rep.witness, "counterexample": rep.counterexample, "seed": args.seed}
    _emit(args, doc, f"{rep.winner} wins switch:{args.s},{args.r}; {rep.checked} sentences checked; "
                     f"witness: {rep.witness}; counterexample: {rep.counterexample}")
    return PASS if rep.passed else FAIL


def cmd_verify_lower_bound(args):
    rep = lower_bound_pipeline(args.s, args.k, random_lines=args.random, seed=args.seed)
    lines = [f"[{'pass' if st.passed else 'FAIL'}] {st.name}: {st.detail}" for st in rep.steps]
    lines.append(f"verdict: {rep.verdict}" if rep.verdict else "no verdict")
    _emit(args, rep.to_json(), "\n".join(lines))
    return PASS if rep.passed else FAIL


# -- parser ----------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit a JSON report")
    parser = argparse.ArgumentParser(prog="aqdtrees", description=__doc__)
    sub = parser.add_subparsers(dest="group", required=True)

    tree = sub.add_parser("tree").add_subparsers(dest="action", required=True)
    p = tree.add_parser("build", parents=[common])
    p.add_argument("--role", choices=["T1", "T2"], required=True)
    for name in ("--s", "--k", "--m"):
        p.add_argument(name, type=int, required=True)
    p.add_argument("--out")
    p.add_argument("--dot")
    p.set_defaults(func=cmd_tree_build)

    prop = sub.add_parser("prop").add_subparsers(dest="action", required=True)
    p = prop.add_parser("eval", parents=[common])
    p.add_argument("--tree", required=True)
    p.add_argument("--i", type=int, required=True)
    p.add_argument("--vertex", type=int)
    p.set_defaults(func=cmd_prop_eval)

    p = sub.add_parser("formula", parents=[common])
    p.add_argument("action", choices=["qd", "aqd", "eval"])
    p.add_argument("--formula", required=True)
    p.add_argument("--tree")
    p.set_defaults(func=cmd_formula)

    game = sub.add_parser("game").add_subparsers(dest="action", required=True)
    for name, func in (("solve", cmd_game_solve), ("play", cmd_game_play)):
        p = game.add_parser(name, parents=[common])
        p.add_argument("--left", required=True)
        p.add_argument("--right", required=True)
        p.add_argument("--variant", required=True, help="switch:s,r | batch:s,k | sizes:i1,i2,...")
        p.add_argument("--designated", help="JSON file with [[x, y], ...]")
        p.set_defaults(func=func)
        if name == "solve":
            p.add_argument("--prune", action="store_true", help="symmetry pruning")
        else:
            p.add_argument("--human", choices=["spoiler"], default="spoiler")
            p.add_argument("--strategy", choices=["auto", "recursive", "minimax"], default="auto")
            p.add_argument("--transcript", default="transcript.log")
    p = game.add_parser("replay", parents=[common])
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--transcript", required=True)
    p.set_defaults(func=cmd_game_replay)

    verify = sub.add_parser("verify").add_subparsers(dest="action", required=True)
    p = verify.add_parser("construction", parents=[common])
    for name in ("--s", "--k", "--m"):
        p.add_argument(name, type=int, required=True)
    p.set_defaults(func=cmd_verify_construction)

    p = verify.add_parser("sweep", parents=[common])
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--m", type=int)
    p.add_argument("--designated")
    p.add_argument("--start", choices=["L", "R"])
    p.add_argument("--max-lines", type=int, default=2_000_000)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--random", type=int, default=0, help="play N random lines instead")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify_sweep)

    p = verify.add_parser("theorem1", parents=[common])
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--qd-max", type=int, default=2)
    p.add_argument("--aqd-max", type=int, default=2)
    p.add_argument("--n", type=int, default=200)
    p.set_defaults(func=cmd_verify_theorem1)

    p = verify.add_parser("lower-bound", parents=[common])
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--random", type=int, default=0,
                   help="fall back to N random lines when exact checks are out of budget")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify_lower_bound)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (AqdError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
