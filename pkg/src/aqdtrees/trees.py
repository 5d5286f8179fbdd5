"""Finite rooted trees, the T1/T2 construction family and AHU canonical forms.

A :class:`Tree` is an immutable parent array with node 0 as the root.  Trees
built by :func:`build_construction` additionally carry a :class:`Blueprint`
and a per-node :class:`ConstructionLabel` naming the copy of ``T1``/``T2``
rooted at that node, which the Duplicator strategy uses to locate the
distinguished subtrees.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .errors import NotIsomorphicError, ParameterError, TreeParseError, TreeStructureError

ROLES = ("T1", "T2")


@dataclass(frozen=True)
class NodeRecord:
    id: int
    parent: Optional[int]
    children: tuple


@dataclass(frozen=True)
class ConstructionLabel:
    role: str
    level: int


@dataclass(frozen=True)
class Blueprint:
    role: str
    s: int
    k: int
    m: int

    @property
    def child_roles(self):
        """Recipe (role, level) of the subtree hanging from each top-level child."""
        return tuple(_child_label(self.role, self.s, t, self.m) for t in range(self.m + 1))

    def to_json(self):
        return {"role": self.role, "s": self.s, "k": self.k, "m": self.m}


def _child_label(role, level, t, m):
    # u_1..u_{m+1} of T1 and v_1..v_m of T2 carry T2 copies; v_{m+1} carries T1.
    if role == "T1" or t < m:
        return ConstructionLabel("T2", level - 1)
    return ConstructionLabel("T1", level - 1)


class Tree:
    """Immutable rooted tree on nodes ``0..n-1`` with root 0."""

    def __init__(self, parents: Sequence[Optional[int]], blueprint: Blueprint = None, labels=None):
        parents = tuple(parents)
        _check_parents(parents)
        n = len(parents)
        kids = [[] for _ in range(n)]
        for v, p in enumerate(parents):
            if p is not None:
                kids[p].append(v)
        self.parents = parents
        self.children = tuple(tuple(c) for c in kids)
        self.root = 0
        self.blueprint = blueprint
        self.labels = dict(labels or {})
        self._codes = None
        self._compute_order()

    def _compute_order(self):
        n = len(self.parents)
        tin = [0] * n
        tout = [0] * n
        depth = [0] * n
        order = []
        stack = [(0, False)]
        while stack:
            v, done = stack.pop()
            if done:
                tout[v] = len(order)
                continue
            tin[v] = len(order)
            order.append(v)
            stack.append((v, True))
            for c in reversed(self.children[v]):
                depth[c] = depth[v] + 1
                stack.append((c, False))
        if len(order) != n:
            raise TreeStructureError("some nodes are not reachable from the root")
        self._tin = tin
        self._tout = tout
        self.depth = tuple(depth)
        self.preorder = tuple(order)

    def __len__(self):
        return len(self.parents)

    def __repr__(self):
        tag = f" {self.blueprint.role}^({self.blueprint.s},{self.blueprint.k},{self.blueprint.m})" if self.blueprint else ""
        return f"<Tree{tag} n={len(self)}>"

    def __deepcopy__(self, memo):
        return self

    @property
    def nodes(self):
        return [NodeRecord(v, self.parents[v], self.children[v]) for v in range(len(self))]

    def parent(self, v):
        return self.parents[v]

    def is_valid(self, v):
        return isinstance(v, int) and 0 <= v < len(self.parents)

    def in_subtree(self, v, top):
        """True when ``v`` lies in the subtree T(top) (``top`` included)."""
        return self._tin[top] <= self._tin[v] < self._tout[top]

    def subtree(self, v) -> Iterator[int]:
        return iter(self.preorder[self._tin[v]:self._tout[v]])

    def subtree_size(self, v):
        return self._tout[v] - self._tin[v]

    def top_child(self, top, v):
        """The child of ``top`` whose subtree contains ``v`` (``v`` strictly below ``top``)."""
        if v == top or not self.in_subtree(v, top):
            return None
        while self.parents[v] != top:
            v = self.parents[v]
        return v

    def label(self, v):
        return self.labels.get(v)

    def code(self, v):
        return canonical_code(self, v)


def _check_parents(parents):
    n = len(parents)
    if n == 0:
        raise TreeStructureError("a tree needs at least one node")
    if parents[0] is not None:
        raise TreeStructureError("node 0 must be the root")
    for v, p in enumerate(parents):
        if v == 0:
            continue
        if p is None:
            raise TreeStructureError(f"node {v} has no parent but is not the root")
        if not isinstance(p, int) or isinstance(p, bool) or not 0 <= p < n:
            raise TreeStructureError(f"node {v} has invalid parent {p!r}")
        if p == v:
            raise TreeStructureError(f"node {v} is its own parent")


# -- constructions ---------------------------------------------------------

def build_construction(role: str, s: int, k: int, m: int) -> Tree:
    """Build ``T1^(s,k,m)`` or ``T2^(s,k,m)``.

    Node ids follow construction order: the root, then the whole subtree of
    the first top-level child, then the second, and so on.
    """
    if role not in ROLES:
        raise ParameterError(f"role must be one of {ROLES}, got {role!r}")
    for name, value in (("s", s), ("k", k), ("m", m)):
        if not isinstance(value, int) or value < 1:
            raise ParameterError(f"{name} must be a positive integer, got {value!r}")
    if m < s * k:
        raise ParameterError(f"construction needs m >= s*k, got m={m} < {s}*{k}")
    parents, labels = _grow(role, s, m)
    return Tree(parents, Blueprint(role, s, k, m), labels)


def _grow(role, level, m):
    parents = []
    labels = {}

    def grow(label, parent):
        v = len(parents)
        parents.append(parent)
        labels[v] = label
        if label.level == 0:
            # T1^(0) is a single vertex, T2^(0) a vertex with m leaves.
            if label.role == "T2":
                for _ in range(m):
                    parents.append(v)
            return
        for t in range(m + 1):
            grow(_child_label(label.role, label.level, t, m), v)

    grow(ConstructionLabel(role, level), None)
    return parents, labels


def construction_size(role, s, m):
    """Node count of a construction copy, from the size recurrences."""
    if s == 0:
        return 1 if role == "T1" else 1 + m
    t2 = construction_size("T2", s - 1, m)
    if role == "T1":
        return 1 + (m + 1) * t2
    return 1 + m * t2 + construction_size("T1", s - 1, m)


def construction_pair(s, k, m):
    return build_construction("T1", s, k, m), build_construction("T2", s, k, m)


def top_children(tree, v):
    return tree.children[v]


def special_child(tree, v):
    """The top-level child of a T2 copy at ``v`` that carries the T1 copy."""
    for c in tree.children[v]:
        lab = tree.labels.get(c)
        if lab is not None and lab.role == "T1":
            return c
    return None


# -- canonical forms -------------------------------------------------------

def _all_codes(tree):
    if tree._codes is None:
        codes = [None] * len(tree)
        for v in reversed(tree.preorder):
            codes[v] = "(" + "".join(sorted(codes[c] for c in tree.children[v])) + ")"
        tree._codes = codes
    return tree._codes


def canonical_code(tree: Tree, v: int) -> str:
    """AHU parenthesis code of T(v); equal codes iff root-preserving isomorphic."""
    if not tree.is_valid(v):
        raise TreeStructureError(f"invalid node id {v!r}")
    return _all_codes(tree)[v]


@dataclass(frozen=True)
class IsoMap:
    source_root: int
    target_root: int
    mapping: dict

    def __call__(self, v):
        return self.mapping[v]

    def __contains__(self, v):
        return v in self.mapping

    def inverse(self):
        return IsoMap(self.target_root, self.source_root, {b: a for a, b in self.mapping.items()})


def construction_isomorphism(tree_a: Tree, a: int, tree_b: Tree, b: int) -> IsoMap:
    """Root-preserving isomorphism T_a(a) -> T_b(b).

    Children are paired after sorting both sides by (canonical code, id), so
    the result is deterministic and swapping the arguments yields the inverse.
    """
    if canonical_code(tree_a, a) != canonical_code(tree_b, b):
        raise NotIsomorphicError(f"subtrees at {a} and {b} are not isomorphic")
    codes_a = _all_codes(tree_a)
    codes_b = _all_codes(tree_b)
    mapping = {}
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        mapping[x] = y
        xs = sorted(tree_a.children[x], key=lambda c: (codes_a[c], c))
        ys = sorted(tree_b.children[y], key=lambda c: (codes_b[c], c))
        stack.extend(zip(xs, ys))
    return IsoMap(a, b, mapping)


def is_isomorphism(tree_a, tree_b, iso: IsoMap) -> bool:
    """Independent check that ``iso`` is a parent-preserving bijection of subtrees."""
    src = list(tree_a.subtree(iso.source_root))
    dst = set(tree_b.subtree(iso.target_root))
    if set(iso.mapping) != set(src) or set(iso.mapping.values()) != dst or len(dst) != len(src):
        return False
    if iso.mapping[iso.source_root] != iso.target_root:
        return False
    for v in src:
        if v == iso.source_root:
            continue
        if tree_b.parents[iso.mapping[v]] != iso.mapping[tree_a.parents[v]]:
            return False
    return True


class IsoCache:
    """Lazily materialised, fixed-once isomorphisms between subtrees."""

    def __init__(self):
        self._maps = {}
        self._keep = {}

    def get(self, tree_a, a, tree_b, b) -> IsoMap:
        key = (id(tree_a), a, id(tree_b), b)
        iso = self._maps.get(key)
        if iso is None:
            iso = construction_isomorphism(tree_a, a, tree_b, b)
            self._maps[key] = iso
            self._keep[id(tree_a)] = tree_a
            self._keep[id(tree_b)] = tree_b
        return iso

    def __len__(self):
        return len(self._maps)


# -- serialization ---------------------------------------------------------

def serialize(tree: Tree, fmt: str = "json") -> bytes:
    fmt = fmt.lower()
    if fmt == "json":
        doc = {"root": tree.root,
               "nodes": [{"id": v, "parent": p} for v, p in enumerate(tree.parents)]}
        if tree.blueprint is not None:
            doc["blueprint"] = tree.blueprint.to_json()
        return json.dumps(doc).encode()
    if fmt == "dot":
        lines = ["digraph T {", f"  {tree.root} [shape=doublecircle];"]
        for v, p in enumerate(tree.parents):
            if p is not None:
                lines.append(f"  {p} -> {v};")
        lines.append("}")
        return ("\n".join(lines) + "\n").encode()
    raise ParameterError(f"unknown format {fmt!r}")


def deserialize(data) -> Tree:
    if isinstance(data, (bytes, bytearray)):
        data = data.decode()
    try:
        doc = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise TreeParseError(f"malformed JSON: {exc}") from exc
    if not isinstance(doc, dict) or "root" not in doc or "nodes" not in doc:
        raise TreeParseError("expected an object with 'root' and 'nodes'")
    nodes = doc["nodes"]
    if not isinstance(nodes, list):
        raise TreeParseError("'nodes' must be a list")
    parent_of = {}
    for rec in nodes:
        if not isinstance(rec, dict) or "id" not in rec or "parent" not in rec:
            raise TreeParseError(f"bad node record {rec!r}")
        vid, par = rec["id"], rec["parent"]
        if not isinstance(vid, int) or not (par is None or isinstance(par, int)):
            raise TreeParseError(f"bad node record {rec!r}")
        if vid in parent_of:
            raise TreeStructureError(f"duplicate node id {vid}")
        parent_of[vid] = par
    n = len(parent_of)
    if set(parent_of) != set(range(n)):
        raise TreeStructureError("node ids must be dense integers 0..n-1")
    if doc["root"] != 0:
        raise TreeStructureError("root must be node 0")
    tree = Tree([parent_of[v] for v in range(n)])
    bp = doc.get("blueprint")
    if bp is not None:
        try:
            ref = build_construction(bp["role"], bp["s"], bp["k"], bp["m"])
        except (KeyError, TypeError) as exc:
            raise TreeParseError(f"bad blueprint {bp!r}") from exc
        if ref.parents != tree.parents:
            raise TreeStructureError("tree does not match its blueprint")
        return ref
    return tree
