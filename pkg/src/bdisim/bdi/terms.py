"""First-order terms and syntactic unification."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union

__all__ = [
    "Term", "Atom", "Number", "Text", "Var", "Compound",
    "t", "to_term", "to_python", "is_ground", "unify", "substitute", "key_of",
]


@dataclass(frozen=True)
class Atom:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Number:
    value: float

    def __str__(self):
        return f"{self.value:g}"


@dataclass(frozen=True)
class Text:
    value: str

    def __str__(self):
        return repr(self.value)


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Compound:
    functor: str
    args: tuple

    def __str__(self):
        return f"{self.functor}({', '.join(map(str, self.args))})"


Term = Union[Atom, Number, Text, Var, Compound]
_TERM_TYPES = (Atom, Number, Text, Var, Compound)


def to_term(value) -> Term:
    """Lift a Python value: numbers become :class:`Number`, strings :class:`Atom`."""
    if isinstance(value, _TERM_TYPES):
        return value
    if isinstance(value, bool):
        return Atom("true" if value else "false")
    if isinstance(value, (int, float)):
        return Number(float(value))
    if isinstance(value, str):
        return Atom(value)
    raise TypeError(f"cannot convert {value!r} to a term")


def t(functor: str, *args) -> Term:
    """Build ``functor(args...)``; with no args, an atom."""
    if not args:
        return Atom(functor)
    return Compound(functor, tuple(to_term(a) for a in args))


def to_python(term: Term):
    if isinstance(term, Number):
        return term.value
    if isinstance(term, Text):
        return term.value
    if isinstance(term, Atom):
        return term.name
    return term


def key_of(term: Term) -> tuple[str, int]:
    """(functor, arity) used to index beliefs and triggers."""
    if isinstance(term, Compound):
        return (term.functor, len(term.args))
    if isinstance(term, Atom):
        return (term.name, 0)
    raise TypeError(f"{term} has no functor")


def is_ground(term: Term) -> bool:
    if isinstance(term, Var):
        return False
    if isinstance(term, Compound):
        return all(is_ground(a) for a in term.args)
    return True


def _walk(term, b):
    while isinstance(term, Var) and term.name in b:
        term = b[term.name]
    return term


def _occurs(name, term, b):
    term = _walk(term, b)
    if isinstance(term, Var):
        return term.name == name
    if isinstance(term, Compound):
        return any(_occurs(name, a, b) for a in term.args)
    return False


def unify(a: Term, b: Term, bindings: Mapping[str, Term] | None = None) -> dict | None:
    """Most general unifier extending ``bindings``, or ``None``.

    The anonymous variable ``_`` matches anything and is never bound.
    """
    env = dict(bindings or {})
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        x, y = _walk(x, env), _walk(y, env)
        if isinstance(x, Var) and x.name == "_" or isinstance(y, Var) and y.name == "_":
            continue
        if x == y:
            continue
        if isinstance(x, Var):
            if _occurs(x.name, y, env):
                return None
            env[x.name] = y
        elif isinstance(y, Var):
            if _occurs(y.name, x, env):
                return None
            env[y.name] = x
        elif isinstance(x, Compound) and isinstance(y, Compound):
            if x.functor != y.functor or len(x.args) != len(y.args):
                return None
            stack.extend(zip(x.args, y.args))
        else:
            return None
    return env


def substitute(term: Term, bindings: Mapping[str, Term]) -> Term:
    term = _walk(term, bindings)
    if isinstance(term, Compound):
        return Compound(term.functor, tuple(substitute(a, bindings) for a in term.args))
    return term
