"""Enumeration, oracle agreement, reduction graphs, and the suite drivers."""

import random

import pytest

from efflam.reduce import Rule
from efflam.surface import print_term
from efflam.syntax import (
    Abs,
    App,
    Atom,
    Comp,
    Const,
    EMPTY_ROW,
    Eta,
    Fun,
    Signature,
    Var,
    alpha_eq,
    canonical_key,
    free_vars,
)
from efflam.typecheck import TypeCheckError, check_against, synthesize
from efflam.verify import (
    A,
    B,
    CONTEXT,
    SuiteReport,
    closed_shapes,
    confluence,
    derivable,
    enumerate_typed,
    handler_identity,
    monad_laws,
    reduction_graph,
    run_suite,
    sample_typed,
    subject_reduction,
    termination,
)

# ---------------------------------------------------------------------------
# enumeration


def test_shapes_are_closed_and_distinct():
    shapes = closed_shapes(5)
    assert all(not free_vars(t) for t in shapes)
    assert len({canonical_key(t) for t in shapes}) == len(shapes)


def test_shape_counts_grow_with_size():
    counts = [len(closed_shapes(n)) for n in range(1, 6)]
    assert counts[0] == 3
    assert all(a < b for a, b in zip(counts, counts[1:]))


def test_enumeration_contains_the_expected_small_terms():
    shapes = closed_shapes(3)
    assert any(alpha_eq(t, Const("a0")) for t in shapes)
    assert any(alpha_eq(t, Abs("x", Var("x"))) for t in shapes)
    assert any(alpha_eq(t, App(Const("f0"), Const("a0"))) for t in shapes)
    assert any(alpha_eq(t, Eta(Eta(Const("*")))) for t in shapes)


def test_typed_enumeration_agrees_with_the_checker():
    typed = dict()
    for t, ty in enumerate_typed(4):
        typed[canonical_key(t)] = ty
    assert typed[canonical_key(Const("a0"))] == A
    assert typed[canonical_key(App(Const("f0"), Const("a0")))] == B
    assert typed[canonical_key(Eta(Const("a0")))] == Comp(EMPTY_ROW, A)
    assert canonical_key(App(Const("a0"), Const("a0"))) not in typed


def test_typed_enumeration_is_deterministic():
    first = [(canonical_key(t), ty) for t, ty in enumerate_typed(5)]
    second = [(canonical_key(t), ty) for t, ty in enumerate_typed(5)]
    assert first == second


# ---------------------------------------------------------------------------
# the declarative search agrees with the algorithmic checker


def test_oracle_derives_everything_the_checker_synthesizes():
    for t, ty in enumerate_typed(5):
        assert derivable(CONTEXT, t, ty, depth=8), print_term(t)


def test_everything_the_oracle_derives_passes_check_mode():
    from efflam.verify import _UNIVERSE

    derivations = 0
    for t in closed_shapes(3):
        for ty in _UNIVERSE:
            if derivable(CONTEXT, t, ty, depth=4):
                derivations += 1
                check_against(CONTEXT, t, ty)
    assert derivations > 30


def test_oracle_rejects_a_misapplied_constant():
    from efflam.verify import _UNIVERSE

    bogus = App(Const("a0"), Const("a0"))
    assert not any(derivable(CONTEXT, bogus, ty) for ty in _UNIVERSE)


def test_oracle_applies_subsumption_to_rows():
    row = Signature.of({"op1": (A, A)})
    assert derivable(CONTEXT, Eta(Const("a0")), Comp(row, A))


# ---------------------------------------------------------------------------
# seeded sampling


def test_samples_are_well_typed_by_construction():
    rng = random.Random(7)
    row = Signature.of({"op1": (A, A), "op2": (A, B)})
    for _ in range(200):
        ty = rng.choice((Comp(row, A), Comp(EMPTY_ROW, B), Fun(A, Comp(row, B))))
        term = sample_typed(rng, ty, depth=6)
        check_against(CONTEXT, term, ty)


def test_sampling_is_reproducible():
    ty = Comp(Signature.of({"op1": (A, A)}), A)
    one = sample_typed(random.Random(42), ty, depth=6)
    two = sample_typed(random.Random(42), ty, depth=6)
    assert one == two


# ---------------------------------------------------------------------------
# reduction graphs


def test_single_step_graph():
    graph = reduction_graph(App(Abs("x", Var("x")), Const("a0")))
    assert len(graph.nodes) == 2
    assert len(graph.edges) == 1
    src, rule, path, dst = graph.edges[0]
    assert rule is Rule.beta and path == ()
    assert graph.complete
    assert len(graph.normal_forms) == 1
    assert alpha_eq(graph.normal_forms[0], Const("a0"))


def test_diamond_joins_up():
    # two independent redexes; the middle nodes are alpha-equivalent,
    # so deduplication folds them and both orders reach the same point
    term = App(Abs("x", Var("x")), App(Abs("y", Var("y")), Const("a0")))
    graph = reduction_graph(term)
    assert graph.complete
    assert len(graph.nodes) == 3
    outer = [dst for _, _, path, dst in graph.edges if path == ()]
    inner = [dst for _, _, path, dst in graph.edges if path == (1,)]
    assert outer and inner and set(outer[:1]) == set(inner[:1])
    assert len(graph.normal_forms) == 1
    assert alpha_eq(graph.normal_forms[0], Const("a0"))


def test_looping_term_closes_into_a_cycle():
    omega_half = Abs("x", App(Var("x"), Var("x")))
    omega = App(omega_half, omega_half)
    graph = reduction_graph(omega)
    assert graph.complete
    assert len(graph.nodes) == 1
    assert graph.normal_forms == []
    src, rule, path, dst = graph.edges[0]
    assert src == dst and rule is Rule.beta


def test_graph_budget_marks_incomplete():
    term = App(Abs("x", Var("x")), App(Abs("y", Var("y")), Const("a0")))
    graph = reduction_graph(term, budget=1)
    assert not graph.complete


# ---------------------------------------------------------------------------
# suites


def test_subject_reduction_suite_passes_at_small_size():
    report = subject_reduction(max_size=5)
    assert report.ok
    assert report.checked > 50


def test_confluence_suite_passes_at_small_size():
    report = confluence(max_size=5)
    assert report.ok
    assert report.checked > 50


def test_termination_suite_passes_on_a_small_draw():
    report = termination(samples=300, depth=6, seed=1)
    assert report.ok
    assert report.checked == 300


def test_handler_identity_suite_passes_on_a_small_draw():
    report = handler_identity(samples=200, depth=5, seed=1)
    assert report.ok


def test_monad_laws_suite_passes():
    report = monad_laws(max_size=5)
    assert report.ok
    assert report.checked > 50


def test_suites_are_deterministic():
    first = termination(samples=100, depth=5, seed=9)
    second = termination(samples=100, depth=5, seed=9)
    assert first == second


def test_report_lines_name_the_suite_and_verdict():
    report = SuiteReport("confluence", 10, ())
    assert report.lines() == ["confluence: 10 checked, 0 failures: PASS"]
    report = SuiteReport("confluence", 10, ("boom",))
    assert report.lines()[0].endswith("FAIL")
    assert report.lines()[1] == "  boom"


def test_run_suite_dispatches_by_name():
    report = run_suite("monadLaws", size=4)
    assert report.suite == "monadLaws" and report.ok
    with pytest.raises(KeyError):
        run_suite("nonsense")
