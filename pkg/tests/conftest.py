"""Shared hypothesis strategies for randomly shaped (untyped) terms and types."""

from __future__ import annotations

import hypothesis.strategies as st

from efflam.syntax import (
    Abs,
    App,
    Atom,
    Cherry,
    Comp,
    Const,
    Eta,
    Exchange,
    Fun,
    Handler,
    Op,
    Signature,
    Var,
)

NAMES = ["x", "y", "z", "u"]
OPS = ["opa", "opb"]
CONSTS = ["c0", "c1"]

A = Atom("A")
B = Atom("B")

OP_TABLE = Signature.of({"opa": (A, A), "opb": (A, B)})

_rows = st.sets(st.sampled_from(OPS)).map(
    lambda names: Signature.of({name: OP_TABLE.get(name) for name in names})
)

_leaf_types = st.sampled_from([A, B])


def _compound_types(children: st.SearchStrategy) -> st.SearchStrategy:
    return st.one_of(
        st.builds(Fun, children, children),
        st.builds(Comp, _rows, children),
    )


types = st.recursive(_leaf_types, _compound_types, max_leaves=6)

leaf_terms = st.one_of(
    st.sampled_from(NAMES).map(Var),
    st.sampled_from(CONSTS).map(Const),
)


def _compound(children: st.SearchStrategy) -> st.SearchStrategy:
    return st.one_of(
        st.builds(Abs, st.sampled_from(NAMES), children),
        st.builds(App, children, children),
        st.builds(Eta, children),
        st.builds(Op, st.sampled_from(OPS), children, st.sampled_from(NAMES), children),
        st.builds(Cherry, children),
        st.builds(Exchange, children),
        st.builds(
            lambda pairs, eta_clause, scrutinee: Handler(
                tuple(sorted(dict(pairs).items())), eta_clause, scrutinee
            ),
            st.lists(st.tuples(st.sampled_from(OPS), children), max_size=2),
            children,
            children,
        ),
    )


terms = st.recursive(leaf_terms, _compound, max_leaves=12)
