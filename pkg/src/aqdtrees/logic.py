"""First-order formulas over rooted trees.

The vocabulary is the root constant ``R``, vertex equality and the parent
atom ``pi(c) = p``.  Quantifiers range over every vertex, root included.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Optional

from .errors import FormulaError, UnboundVariableError

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")
RESERVED = frozenset({"E", "A", "R", "pi"})


@dataclass(frozen=True)
class Var:
    name: str

    def __post_init__(self):
        if not isinstance(self.name, str) or not _IDENT.match(self.name) or self.name in RESERVED:
            raise FormulaError(f"invalid variable name {self.name!r}")

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class RootConst:
    def __str__(self):
        return "R"


ROOT = RootConst()


class Formula:
    """Base class of the formula AST."""

    __slots__ = ()

    def __str__(self):
        from .syntax import to_text
        return to_text(self)


@dataclass(frozen=True)
class Eq(Formula):
    left: object
    right: object


@dataclass(frozen=True)
class ParentOf(Formula):
    """``pi(child) = parent``."""
    child: object
    parent: object


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


class _Quant(Formula):
    __slots__ = ()

    def __post_init__(self):
        Var(self.var)
        # Inner binders of the same name are renamed so nothing shadows.
        if self.var in bound_vars(self.body):
            avoid = all_vars(self.body) | {self.var}
            object.__setattr__(self, "body", _rename_binders(self.body, self.var, avoid))


@dataclass(frozen=True)
class Exists(_Quant):
    var: str
    body: Formula


@dataclass(frozen=True)
class Forall(_Quant):
    var: str
    body: Formula


BINARY = (And, Or, Implies, Iff)
ATOMS = (Eq, ParentOf)


def _terms(phi):
    return (phi.left, phi.right) if isinstance(phi, Eq) else (phi.child, phi.parent)


def fresh_name(base, avoid):
    base = base.rstrip("0123456789") or "v"
    for i in itertools.count(1):
        name = f"{base}{i}"
        if name not in avoid and name not in RESERVED:
            return name


def all_vars(phi):
    if isinstance(phi, ATOMS):
        return {t.name for t in _terms(phi) if isinstance(t, Var)}
    if isinstance(phi, Not):
        return all_vars(phi.body)
    if isinstance(phi, BINARY):
        return all_vars(phi.left) | all_vars(phi.right)
    return all_vars(phi.body) | {phi.var}


def bound_vars(phi):
    if isinstance(phi, ATOMS):
        return set()
    if isinstance(phi, Not):
        return bound_vars(phi.body)
    if isinstance(phi, BINARY):
        return bound_vars(phi.left) | bound_vars(phi.right)
    return bound_vars(phi.body) | {phi.var}


def free_vars(phi):
    if isinstance(phi, ATOMS):
        return {t.name for t in _terms(phi) if isinstance(t, Var)}
    if isinstance(phi, Not):
        return free_vars(phi.body)
    if isinstance(phi, BINARY):
        return free_vars(phi.left) | free_vars(phi.right)
    return free_vars(phi.body) - {phi.var}


def is_sentence(phi):
    return not free_vars(phi)


def _rename_binders(phi, name, avoid):
    if isinstance(phi, ATOMS):
        return phi
    if isinstance(phi, Not):
        return Not(_rename_binders(phi.body, name, avoid))
    if isinstance(phi, BINARY):
        return type(phi)(_rename_binders(phi.left, name, avoid), _rename_binders(phi.right, name, avoid))
    body = _rename_binders(phi.body, name, avoid)
    if phi.var != name:
        return type(phi)(phi.var, body)
    new = fresh_name(name, avoid)
    avoid.add(new)
    return type(phi)(new, substitute(body, name, Var(new)))


def substitute(phi, name, term):
    """Replace free occurrences of variable ``name`` by ``term`` (capture-avoiding)."""
    if isinstance(phi, ATOMS):
        a, b = (term if isinstance(t, Var) and t.name == name else t for t in _terms(phi))
        return type(phi)(a, b)
    if isinstance(phi, Not):
        return Not(substitute(phi.body, name, term))
    if isinstance(phi, BINARY):
        return type(phi)(substitute(phi.left, name, term), substitute(phi.right, name, term))
    if phi.var == name:
        return phi
    if isinstance(term, Var) and phi.var == term.name and name in free_vars(phi.body):
        new = fresh_name(phi.var, all_vars(phi.body) | {name, term.name})
        return type(phi)(new, substitute(substitute(phi.body, phi.var, Var(new)), name, term))
    return type(phi)(phi.var, substitute(phi.body, name, term))


# -- evaluation ------------------------------------------------------------

def eval_formula(tree, phi: Formula, env: Optional[dict] = None, guarded: bool = True) -> bool:
    """Tarskian satisfaction of ``phi`` in ``tree`` under assignment ``env``.

    With ``guarded`` set, a quantifier whose body is ``pi(y) = t -> ...`` or
    ``pi(y) = t & ...`` only iterates over the children of ``t`` (and dually
    for ``pi(t) = y``), which leaves the truth value unchanged.
    """
    env = dict(env or {})
    missing = free_vars(phi) - set(env)
    if missing:
        raise UnboundVariableError(f"unbound variables: {sorted(missing)}")
    for name, v in env.items():
        if not tree.is_valid(v):
            raise FormulaError(f"variable {name} assigned to invalid vertex {v!r}")
    return _compile(phi, guarded)(tree, env)


def _term_fn(t):
    if isinstance(t, RootConst):
        return lambda tree, env: tree.root
    name = t.name
    return lambda tree, env: env[name]


def _compile(phi, guarded):
    if isinstance(phi, Eq):
        a, b = _term_fn(phi.left), _term_fn(phi.right)
        return lambda tree, env: a(tree, env) == b(tree, env)
    if isinstance(phi, ParentOf):
        c, p = _term_fn(phi.child), _term_fn(phi.parent)
        return lambda tree, env: tree.parents[c(tree, env)] == p(tree, env)
    if isinstance(phi, Not):
        f = _compile(phi.body, guarded)
        return lambda tree, env: not f(tree, env)
    if isinstance(phi, BINARY):
        f, g = _compile(phi.left, guarded), _compile(phi.right, guarded)
        if isinstance(phi, And):
            return lambda tree, env: f(tree, env) and g(tree, env)
        if isinstance(phi, Or):
            return lambda tree, env: f(tree, env) or g(tree, env)
        if isinstance(phi, Implies):
            return lambda tree, env: (not f(tree, env)) or g(tree, env)
        return lambda tree, env: f(tree, env) == g(tree, env)
    body = _compile(phi.body, guarded)
    var = phi.var
    domain = _guard_domain(phi) if guarded else None
    if domain is None:
        def domain(tree, env):
            return range(len(tree))
    if isinstance(phi, Exists):
        def ev(tree, env):
            saved = env.get(var, _MISSING)
            try:
                for v in domain(tree, env):
                    env[var] = v
                    if body(tree, env):
                        return True
                return False
            finally:
                _restore(env, var, saved)
    else:
        def ev(tree, env):
            saved = env.get(var, _MISSING)
            try:
                for v in domain(tree, env):
                    env[var] = v
                    if not body(tree, env):
                        return False
                return True
            finally:
                _restore(env, var, saved)
    return ev


_MISSING = object()


def _restore(env, var, saved):
    if saved is _MISSING:
        env.pop(var, None)
    else:
        env[var] = saved


def _guard_domain(q):
    body = q.body
    # forall needs "guard -> rest", exists needs "guard & rest"
    if isinstance(q, Forall) and isinstance(body, Implies):
        guard = body.left
    elif isinstance(q, Exists) and isinstance(body, And):
        guard = body.left
    else:
        return None
    if not isinstance(guard, ParentOf):
        return None
    var = q.var
    c, p = guard.child, guard.parent
    if isinstance(c, Var) and c.name == var and not (isinstance(p, Var) and p.name == var):
        pf = _term_fn(p)
        return lambda tree, env: tree.children[pf(tree, env)]
    if isinstance(p, Var) and p.name == var and not (isinstance(c, Var) and c.name == var):
        cf = _term_fn(c)

        def parent_domain(tree, env):
            par = tree.parents[cf(tree, env)]
            return () if par is None else (par,)
        return parent_domain
    return None


# -- depth measures --------------------------------------------------------

def qd(phi: Formula) -> int:
    """Syntactic quantifier nesting depth."""
    if isinstance(phi, ATOMS):
        return 0
    if isinstance(phi, Not):
        return qd(phi.body)
    if isinstance(phi, BINARY):
        return max(qd(phi.left), qd(phi.right))
    return 1 + qd(phi.body)


def nnf(phi: Formula, negate: bool = False) -> Formula:
    """Negation normal form; implications and biconditionals are expanded."""
    if isinstance(phi, ATOMS):
        return Not(phi) if negate else phi
    if isinstance(phi, Not):
        return nnf(phi.body, not negate)
    if isinstance(phi, And):
        op = Or if negate else And
        return op(nnf(phi.left, negate), nnf(phi.right, negate))
    if isinstance(phi, Or):
        op = And if negate else Or
        return op(nnf(phi.left, negate), nnf(phi.right, negate))
    if isinstance(phi, Implies):
        return nnf(Or(Not(phi.left), phi.right), negate)
    if isinstance(phi, Iff):
        expanded = And(Or(Not(phi.left), phi.right), Or(Not(phi.right), phi.left))
        return nnf(expanded, negate)
    if isinstance(phi, Exists):
        return (Forall if negate else Exists)(phi.var, nnf(phi.body, negate))
    return (Exists if negate else Forall)(phi.var, nnf(phi.body, negate))


def _alternations(phi, last):
    if isinstance(phi, ATOMS):
        return 0
    if isinstance(phi, Not):
        return _alternations(phi.body, last)
    if isinstance(phi, (And, Or)):
        return max(_alternations(phi.left, last), _alternations(phi.right, last))
    kind = type(phi)
    step = 1 if last is not None and last is not kind else 0
    return step + _alternations(phi.body, kind)


def aqd_syntactic(phi: Formula) -> int:
    """Maximum number of exists/forall switches along a nesting chain of the NNF."""
    return _alternations(nnf(phi), None)


# -- the recursive properties ----------------------------------------------

def formula_for_P(i: int, var: str = "x") -> Formula:
    """``P_0(x) = A y. !pi(y)=x`` and ``P_i(x) = A y. pi(y)=x -> !P_{i-1}(y)``."""
    if i < 0:
        raise FormulaError("i must be non-negative")
    Var(var)
    names = []
    avoid = {var}
    for _ in range(i + 1):
        name = fresh_name("y", avoid)
        avoid.add(name)
        names.append(name)
    return _build_P(i, Var(var), names)


def _build_P(i, x, names):
    y = names[i]
    if i == 0:
        return Forall(y, Not(ParentOf(Var(y), x)))
    return Forall(y, Implies(ParentOf(Var(y), x), Not(_build_P(i - 1, Var(y), names))))


def formula_for_KEIN(i: int) -> Formula:
    return substitute(formula_for_P(i, "x"), "x", ROOT)


def example_one() -> Formula:
    """There is a vertex with precisely one child."""
    x, y, z = Var("x"), Var("y"), Var("z")
    return Exists("x", Exists("y", And(ParentOf(y, x),
                                       Forall("z", Implies(ParentOf(z, x), Eq(z, y))))))


def p_table(tree, i):
    """Truth values of ``P_i`` at every vertex, bottom-up."""
    leaf = [not tree.children[v] for v in range(len(tree))]
    cur = leaf
    for _ in range(i):
        cur = [all(not cur[c] for c in tree.children[v]) for v in range(len(tree))]
    return cur


def eval_P_direct(tree, i: int, v: int) -> bool:
    """Evaluate ``P_i(v)`` straight from the recursion, bypassing formulas."""
    if i < 0:
        raise FormulaError("i must be non-negative")
    if not tree.is_valid(v):
        raise FormulaError(f"invalid vertex {v!r}")
    return p_table(tree, i)[v]
