"""Monadic combinators over computations, defined by handler expansion.

Each combinator builds a term; none of them is a new primitive.  The
sequencing form is a handler with no operation clauses, so the familiar
monad laws hold up to normalization (the property suites check this).
Binders introduced here are primed away from the free variables of the
surrounding pieces, keeping expansion capture-free and reproducible.
"""

from __future__ import annotations

from .syntax import Abs, App, Const, Eta, Handler, Term, Var, free_vars, fresh_name


def eta_identity() -> Term:
    """The do-nothing value clause a handler gets when none is written."""
    return Abs("x", Eta(Var("x")))


def bind(m: Term, k: Term) -> Term:
    """Sequence computation `m` into `k`, a function of its value."""
    return Handler((), k, m)


def apply_right(f: Term, x: Term) -> Term:
    """Apply a computation of a function to a pure argument."""
    v = fresh_name("f", free_vars(x))
    return bind(f, Abs(v, Eta(App(Var(v), x))))


def apply_left(f: Term, x: Term) -> Term:
    """Apply a pure function to a computation of its argument."""
    v = fresh_name("x", free_vars(f))
    return bind(x, Abs(v, Eta(App(f, Var(v)))))


def apply_both(f: Term, x: Term) -> Term:
    """Apply a computation of a function to a computation of its argument.

    The function's effects run first, then the argument's.
    """
    vf = fresh_name("f", free_vars(x))
    vx = fresh_name("x", frozenset((vf,)))
    return bind(f, Abs(vf, bind(x, Abs(vx, Eta(App(Var(vf), Var(vx)))))))


def lift_binary(op: str, m: Term, n: Term) -> Term:
    """Lift a curried binary constant over two computations."""
    return apply_both(apply_left(Const(op), m), n)
