"""A simply typed lambda calculus with algebraic effects and handlers.

The package provides the term and type syntax, a bidirectional type
checker with effect-row subsumption, a small-step normalizer with
pluggable strategies, monadic combinators, a natural-language fragment
whose derivations double as a golden-test corpus, and empirical
verification suites for the standard metatheory.
"""

from .syntax import (
    Abs,
    Ann,
    App,
    Atom,
    Cherry,
    Comp,
    Const,
    EMPTY_ROW,
    Eta,
    Exchange,
    Fun,
    Handler,
    Op,
    RowError,
    Signature,
    Term,
    Type,
    UNIT,
    Var,
    alpha_eq,
    canonical_key,
    erase,
    free_vars,
    fresh_name,
    handler,
    size,
    subst,
)

__all__ = [
    "Abs",
    "Ann",
    "App",
    "Atom",
    "Cherry",
    "Comp",
    "Const",
    "EMPTY_ROW",
    "Eta",
    "Exchange",
    "Fun",
    "Handler",
    "Op",
    "RowError",
    "Signature",
    "Term",
    "Type",
    "UNIT",
    "Var",
    "alpha_eq",
    "canonical_key",
    "erase",
    "free_vars",
    "fresh_name",
    "handler",
    "size",
    "subst",
]
