"""Explicit recursive Duplicator strategy for ``FixedBatches{s, k}`` on a construction pair.

A :class:`LevelSession` plays one level of the recursion on a pair of
regions: side ``A`` is a ``T1`` copy rooted at ``a`` and side ``B`` a ``T2``
copy rooted at ``b``.  The top-level children ("tops") of ``a`` are all
``T2`` copies of the next level down; ``b`` has ``m`` such tops plus one
*special* top carrying a ``T1`` copy.  One top of ``a`` is given the *role*
of the special top's partner and is kept apart for the recursive game.

First batch
    Picks are mapped top to top.  A pick inside a top already holding an
    earlier pick goes to that pick's partner top; a pick in a fresh top goes
    to the lowest-id fresh top on the other side.  Inside partner tops the
    answer is the image under a fixed isomorphism.  When Spoiler starts on
    ``B``, picks in the special subtree are answered inside the role subtree
    by the same rule one level down.

Later batches
    Picks outside the role/special subtrees keep using the co-location rule.
    Picks inside them are handed to a child session one level down, whose
    ``A`` side is the special subtree and whose ``B`` side is the role
    subtree.  The child's designated pairs are the first-batch pairs already
    placed there.  Batch ``b`` of this session feeds batch ``b - 1`` of the
    child; rounds the child would otherwise miss are filled with root picks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from .errors import (IllegalMoveError, NoFreeChildError, ParameterError, StrategyViolatedError)
from .games import Board, FixedBatches, GameInstance, Move, Responder, check_winning
from .trees import IsoCache, special_child

A, B = "A", "B"


def _other(side):
    return B if side == A else A


@dataclass(frozen=True)
class DesignatedConfig:
    """Designated pairs, written (vertex of the T1 tree, vertex of the T2 tree)."""
    pairs: tuple = ()
    iso_choice: tuple = field(default=(), compare=False)

    @classmethod
    def build(cls, t1, t2, pairs, iso=None):
        """Attach the (t, t') tops and isomorphism used by each pair."""
        iso = iso or IsoCache()
        choice = []
        for x, y in pairs:
            t, tp = t1.top_child(t1.root, x), t2.top_child(t2.root, y)
            phi = iso.get(t1, t, t2, tp) if t is not None and tp is not None else None
            choice.append((t, tp, phi))
        return cls(tuple((int(x), int(y)) for x, y in pairs), tuple(choice))


@dataclass(frozen=True)
class Validation:
    valid: bool
    reason: Optional[str] = None
    condition: Optional[str] = None

    def __bool__(self):
        return self.valid


def _check_designated(tA, a, tB, b, pairs, iso):
    """Check the three designated-pair conditions; pairs are (A vertex, B vertex)."""
    special = special_child(tB, b)
    for i, (x, y) in enumerate(pairs):
        if tA.top_child(a, x) is None:
            return Validation(False, f"pair {i}: {x} is not below a top of the T1 side", "C1")
        ty = tB.top_child(b, y)
        if ty is None or ty == special:
            return Validation(False, f"pair {i}: {y} is not below a non-special top of the T2 side", "C1")
    for i, (xi, yi) in enumerate(pairs):
        for j, (xj, yj) in enumerate(pairs):
            if i < j:
                same_a = tA.top_child(a, xi) == tA.top_child(a, xj)
                same_b = tB.top_child(b, yi) == tB.top_child(b, yj)
                if same_a != same_b:
                    return Validation(False, f"pairs {i} and {j} are co-located on one side only", "C2")
    for i, (x, y) in enumerate(pairs):
        t, tp = tA.top_child(a, x), tB.top_child(b, y)
        if iso.get(tA, t, tB, tp)(x) != y:
            return Validation(False, f"pair {i}: {y} is not the image of {x} under the fixed map", "C3")
    return Validation(True)


def _orient(instance):
    """Return (T1 tree, T2 tree, T1 board) for a construction instance."""
    left, right = instance.left, instance.right
    roles = (left.blueprint and left.blueprint.role, right.blueprint and right.blueprint.role)
    if roles == ("T1", "T2"):
        return left, right, Board.LEFT
    if roles == ("T2", "T1"):
        return right, left, Board.RIGHT
    raise ParameterError("the strategy needs one T1 and one T2 construction tree")


def validate_designated(instance, config) -> Validation:
    t1, t2, t1_board = _orient(instance)
    pairs = config.pairs if isinstance(config, DesignatedConfig) else tuple(config)
    k = instance.variant.k if isinstance(instance.variant, FixedBatches) else t1.blueprint.k
    if len(pairs) > k:
        return Validation(False, f"{len(pairs)} designated pairs exceed k={k}", "C1")
    return _check_designated(t1, t1.root, t2, t2.root, pairs, IsoCache())


class LevelSession:
    def __init__(self, level, k, tA, a, tB, b, designated, start, iso, aligned=None):
        self.level, self.k = level, k
        self.tA, self.a, self.tB, self.b = tA, a, tB, b
        self.start = start
        self.iso = iso
        self.special = special_child(tB, b)
        if self.special is None:
            raise ParameterError(f"vertex {b} carries no T2 copy with a special child")
        self.a_tops = tA.children[a]
        self.b_plain = tuple(t for t in tB.children[b] if t != self.special)
        self.designated = tuple(designated)
        self.pairs = [(a, b)] + list(self.designated)
        self.base = len(self.pairs)
        self.rounds = 0
        self.child = None
        self.child_padding = 0
        if start == A and self.designated:
            raise ParameterError("designated pairs are only supported when Spoiler starts on the T2 side")
        if aligned is None:
            aligned = level == 1 and start == B and not self.designated
        self.aligned = aligned
        self.role = None
        if start == B and not aligned:
            self.role = self._free_a_top()

    # -- bookkeeping ------------------------------------------------------

    def _tree(self, side):
        return self.tA if side == A else self.tB

    def _free_a_top(self):
        touched = {self.tA.top_child(self.a, x) for x, _ in self.pairs}
        for t in self.a_tops:
            if t not in touched:
                return t
        raise NoFreeChildError(f"every top child of {self.a} already holds a pick")

    def _role(self):
        if self.role is None:
            self.role = self.a_tops[-1] if self.aligned else self._free_a_top()
        return self.role

    def batch_side(self, batch):
        return self.start if batch % 2 == 0 else _other(self.start)

    @property
    def batch(self):
        return self.rounds // self.k

    def mate(self, side, z):
        idx = 0 if side == A else 1
        for p in self.pairs:
            if p[idx] == z:
                return p[1 - idx]
        return None

    def _colocated(self, src, z, src_root, dst_root, allowed, prefer=None):
        ts, td = self._tree(src), self._tree(_other(src))
        si = 0 if src == A else 1
        top = ts.top_child(src_root, z)
        dst_top = None
        for p in self.pairs:
            if p[si] != src_root and ts.in_subtree(p[si], top):
                dst_top = td.top_child(dst_root, p[1 - si])
                break
        if dst_top is None:
            touched = {td.top_child(dst_root, p[1 - si]) for p in self.pairs}
            free = [t for t in allowed if t not in touched]
            if not free:
                raise NoFreeChildError(f"no fresh top below {dst_root} for a pick in {top}")
            dst_top = prefer if prefer in free else free[0]
        elif dst_top not in allowed:
            raise StrategyViolatedError(f"partner top {dst_top} of {top} is outside the allowed set")
        return self.iso.get(ts, top, td, dst_top)(z)

    # -- moves ------------------------------------------------------------

    def respond_side(self, side, z):
        batch = self.batch
        if batch >= self.level:
            raise IllegalMoveError("game over", f"all {self.level * self.k} rounds were played")
        if side != self.batch_side(batch):
            raise IllegalMoveError("batch board", f"round {self.rounds + 1} belongs to side {self.batch_side(batch)}")
        if not self._tree(side).in_subtree(z, self.a if side == A else self.b):
            raise IllegalMoveError("spoiler vertex", f"{z} lies outside this session's region")
        w = self._first_batch(side, z) if batch == 0 else self._later_batch(side, z, batch)
        self.pairs.append((z, w) if side == A else (w, z))
        self.rounds += 1
        return w

    def _first_batch(self, side, z):
        mate = self.mate(side, z)
        if mate is not None:
            return mate
        if side == A:
            # Spoiler opened on the T1 side: every top goes to a plain top.
            return self._colocated(A, z, self.a, self.b, self.b_plain)
        if self.tB.in_subtree(z, self.special):
            role = self._role()
            if z == self.special:
                return role
            inner = tuple(t for t in self.tA.children[role] if t != special_child(self.tA, role))
            return self._colocated(B, z, self.special, role, inner)
        role = self._role()
        allowed = tuple(t for t in self.a_tops if t != role)
        prefer = None
        if self.aligned:
            prefer = self.a_tops[self.tB.children[self.b].index(self.tB.top_child(self.b, z))]
        return self._colocated(B, z, self.b, self.a, allowed, prefer)

    def _later_batch(self, side, z, batch):
        role = self._role()
        region = role if side == A else self.special
        if self._tree(side).in_subtree(z, region):
            child = self._ensure_child()
            child.pad_to(batch - 1)
            return child.respond_side(B if side == A else A, z)
        mate = self.mate(side, z)
        if mate is not None:
            return mate
        if side == A:
            return self._colocated(A, z, self.a, self.b, self.b_plain)
        allowed = tuple(t for t in self.a_tops if t != role)
        return self._colocated(B, z, self.b, self.a, allowed)

    def _ensure_child(self):
        if self.child is None:
            role = self._role()
            inherited = [(y, x) for x, y in self.pairs[1:]
                         if x != role and self.tA.in_subtree(x, role)]
            if self.start == A and inherited:
                raise StrategyViolatedError("role subtree was touched during the first batch")
            self.child = LevelSession(self.level - 1, self.k, self.tB, self.special, self.tA, role,
                                      inherited, self.start, self.iso)
        return self.child

    def pad_to(self, batch):
        """Fill earlier batches with root picks until ``batch`` is the current one."""
        if self.batch > batch:
            raise StrategyViolatedError(f"child is already in batch {self.batch}, past {batch}")
        while self.batch < batch:
            side = self.batch_side(self.batch)
            self.respond_side(side, self.a if side == A else self.b)
            self.child_padding += 1

    def fork(self):
        twin = object.__new__(LevelSession)
        twin.__dict__.update(self.__dict__)
        twin.pairs = list(self.pairs)
        twin.child = self.child.fork() if self.child is not None else None
        return twin

    # -- diagnostics ------------------------------------------------------

    def selfcheck(self):
        """Re-derive the phase conditions from the recorded pairs."""
        tA, tB, a, b = self.tA, self.tB, self.a, self.b
        report = {"Main": bool(check_winning(tA, tB, self.pairs))}
        if self.designated:
            v = _check_designated(tA, a, tB, b, self.designated, self.iso)
            for label in ("C1", "C2", "C3"):
                report[label] = v.valid or v.condition != label
        rounds = self.pairs[self.base:]
        first = rounds[:self.k]
        role = self.role if self.role is not None else (self.a_tops[-1] if self.aligned else None)
        ta = lambda x: tA.top_child(a, x)
        tb = lambda y: tB.top_child(b, y)
        if self.start == B:
            prefix = "A"
            ok1 = ok2 = ok3 = True
            earlier = self.pairs[1:self.base]
            for i, (x, y) in enumerate(first):
                if (x == a) != (y == b):
                    ok1 = False
                elif x != a:
                    in_role = role is not None and tA.in_subtree(x, role)
                    if in_role != tB.in_subtree(y, self.special):
                        ok1 = False
                    elif not in_role:
                        ok1 &= tb(y) in self.b_plain and self._phi(A, ta(x), tb(y))(x) == y
                    elif (x == role) != (y == self.special):
                        ok1 = False
                    elif x != role:
                        rt = tA.top_child(role, x)
                        st = tB.top_child(self.special, y)
                        ok1 &= rt != special_child(tA, role) and self._phi(A, rt, st)(x) == y
                for xj, yj in earlier + first[:i]:
                    if x == a or xj == a:
                        continue
                    rx = role is not None and tA.in_subtree(x, role)
                    if rx != (role is not None and tA.in_subtree(xj, role)):
                        continue
                    if not rx:
                        ok2 &= (ta(x) == ta(xj)) == (tb(y) == tb(yj))
                    elif x != role and xj != role:
                        same_x = tA.top_child(role, x) == tA.top_child(role, xj)
                        same_y = tB.top_child(self.special, y) == tB.top_child(self.special, yj)
                        ok3 &= same_x == same_y
        else:
            prefix = "A'"
            ok1 = all((x == a) == (y == b) for x, y in first)
            ok2 = all(x == a or (tb(y) in self.b_plain and self._phi(A, ta(x), tb(y))(x) == y)
                      for x, y in first)
            ok3 = all((ta(x) == ta(xj)) == (tb(y) == tb(yj))
                      for i, (x, y) in enumerate(first) for xj, yj in first[:i]
                      if x != a and xj != a)
        report.update({f"{prefix}1": ok1, f"{prefix}2": ok2, f"{prefix}3": ok3})
        if self.rounds > self.k:
            report.update(self._later_checks())
        return report

    def _phi(self, src, s_top, d_top):
        if src == A:
            return self.iso.get(self.tA, s_top, self.tB, d_top)
        return self.iso.get(self.tB, s_top, self.tA, d_top)

    def _later_checks(self):
        tA, tB, a, b = self.tA, self.tB, self.a, self.b
        role = self._role()
        prefix = "B" if self.start == B else "B'"
        ta = lambda x: tA.top_child(a, x)
        tb = lambda y: tB.top_child(b, y)
        in_s1 = lambda x: x != a and not tA.in_subtree(x, role)
        in_s2 = lambda y: y != b and not tB.in_subtree(y, self.special)
        ok1 = all((x == a) == (y == b) for x, y in self.pairs)
        ok2 = all(in_s1(x) == in_s2(y) and (not in_s1(x) or self._phi(A, ta(x), tb(y))(x) == y)
                  for x, y in self.pairs)
        s_pairs = [(x, y) for x, y in self.pairs if in_s1(x) and in_s2(y)]
        ok3 = all((ta(x) == ta(xj)) == (tb(y) == tb(yj))
                  for i, (x, y) in enumerate(s_pairs) for xj, yj in s_pairs[:i])
        ok4 = all(tA.in_subtree(x, role) == tB.in_subtree(y, self.special) for x, y in self.pairs)
        region = {(y, x) for x, y in self.pairs[1:] if x != role and tA.in_subtree(x, role)}
        if self.child is not None:
            child = self.child
            real = {p for p in child.pairs[1:] if p[0] != child.a or p[1] != child.b}
            ok4 &= real == region
            ok4 &= child.rounds <= self.batch * self.k
            ok4 &= all(child.selfcheck().values())
        return {f"{prefix}1": ok1, f"{prefix}2": ok2, f"{prefix}3": ok3, f"{prefix}4": ok4}

    def tracker_state(self):
        touched_a = {self.tA.top_child(self.a, x) for x, _ in self.pairs} - {None}
        touched_b = {self.tB.top_child(self.b, y) for _, y in self.pairs} - {None}
        return {
            "level": self.level,
            "k": self.k,
            "a": self.a,
            "b": self.b,
            "start": self.start,
            "rounds": self.rounds,
            "batch": self.batch,
            "role": self.role,
            "special": self.special,
            "free_a_tops": [t for t in self.a_tops if t not in touched_a],
            "free_b_tops": [t for t in self.tB.children[self.b] if t not in touched_b],
            "designated": [list(p) for p in self.designated],
            "pairs": [list(p) for p in self.pairs[self.base:]],
            "padding": self.child_padding,
            "child": self.child.tracker_state() if self.child is not None else None,
        }


def new_session(left, right, k, designated=(), spoiler_board=Board.RIGHT, iso=None):
    """Start a top-level session on a (T1, T2) construction pair.

    ``spoiler_board`` is the board of Spoiler's first move.  Designated pairs
    are given as (T1 vertex, T2 vertex).
    """
    if left.blueprint is None or right.blueprint is None:
        raise ParameterError("both trees must carry a construction blueprint")
    s, m = left.blueprint.s, left.blueprint.m
    if (right.blueprint.s, right.blueprint.m) != (s, m) or left.blueprint.role != "T1" \
            or right.blueprint.role != "T2":
        raise ParameterError("left must be T1 and right T2 of the same construction")
    if m < s * k:
        raise ParameterError(f"the strategy needs m >= s*k, got m={m}, s={s}, k={k}")
    pairs = designated.pairs if isinstance(designated, DesignatedConfig) else tuple(designated)
    start = B if spoiler_board is Board.RIGHT else A
    iso = iso or IsoCache()
    session = LevelSession(s, k, left, left.root, right, right.root, pairs, start, iso)
    if pairs:
        if len(pairs) > k:
            raise ParameterError(f"{len(pairs)} designated pairs exceed k={k}")
        v = _check_designated(left, left.root, right, right.root, pairs, iso)
        if not v:
            raise ParameterError(f"invalid designated pairs ({v.condition}): {v.reason}")
    return session


class RecursiveResponder(Responder):
    def __init__(self, instance, t1, t2, t1_board, iso):
        self.instance = instance
        self.t1, self.t2, self.t1_board = t1, t2, t1_board
        self.iso = iso
        self.session = None
        k = instance.variant.k
        if t1_board is Board.LEFT:
            self.designated = instance.designated
        else:
            self.designated = tuple((y, x) for x, y in instance.designated)
        self.k = k

    def respond(self, move: Move) -> int:
        side = A if move.board is self.t1_board else B
        if self.session is None:
            board = Board.LEFT if side == A else Board.RIGHT
            self.session = new_session(self.t1, self.t2, self.k, self.designated, board, self.iso)
        return self.session.respond_side(side, move.vertex)

    def fork(self):
        twin = RecursiveResponder.__new__(RecursiveResponder)
        twin.__dict__.update(self.__dict__)
        twin.session = self.session.fork() if self.session is not None else None
        return twin

    def selfcheck(self):
        return self.session.selfcheck() if self.session is not None else {"Main": True}

    def tracker_state(self):
        return self.session.tracker_state() if self.session is not None else None

    def tracker_json(self):
        return json.dumps(self.tracker_state(), sort_keys=True)


class RecursiveStrategy:
    """Factory producing :class:`RecursiveResponder` objects for construction instances."""

    name = "recursive"

    def __init__(self):
        self._iso = {}

    def __call__(self, instance: GameInstance) -> RecursiveResponder:
        t1, t2, t1_board = _orient(instance)
        variant = instance.variant
        if not isinstance(variant, FixedBatches) or variant.s != t1.blueprint.s:
            raise ParameterError(f"the strategy plays batch:{t1.blueprint.s},k, not {variant}")
        if t1.blueprint.m < variant.s * variant.k:
            raise ParameterError("the strategy needs m >= s*k")
        iso = self._iso.setdefault((id(t1), id(t2)), IsoCache())
        return RecursiveResponder(instance, t1, t2, t1_board, iso)


def respond(session, spoiler: Move) -> int:
    """Answer a move on a top-level session, whose left board is the T1 tree."""
    if isinstance(session, Responder):
        return session.respond(spoiler)
    side = A if spoiler.board is Board.LEFT else B
    return session.respond_side(side, spoiler.vertex)


def session_selfcheck(session) -> dict:
    return session.selfcheck()
