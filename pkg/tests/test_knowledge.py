import random

import pytest

from helpers import random_term
from sortaid.errors import KBError, UnknownSourceTag
from sortaid.knowledge import (
    SOURCE_CONCEPTNET,
    SOURCE_GIVEN,
    Fact,
    FactStore,
    loads_kb,
    normalize_triple,
    query,
    substitute,
    unify,
)
from sortaid.terms import Atom, Compound, Text, Variable, parse_term


def fact(text, source=SOURCE_GIVEN):
    return Fact(term=parse_term(text), source=source)


# --- unification ------------------------------------------------------------

def test_unify_binds_variable_against_ground():
    env = unify(parse_term("(onDate ?p Wednesday)"), parse_term("(onDate Levodopa Wednesday)"))
    assert env == {"p": Atom("Levodopa")}


def test_unify_identity_on_ground_terms():
    rng = random.Random(7)
    for _ in range(200):
        term = random_term(rng, ground=True)
        assert unify(term, term) == {}


def test_unify_functor_mismatch_fails():
    assert unify(parse_term("(IsA ?x pill)"), parse_term("(AtLocation pill cabinet)")) is None


def test_unify_does_not_mutate_env():
    env = {"a": Atom("b")}
    unify(Variable("x"), Atom("c"), env)
    assert env == {"a": Atom("b")}


def test_occurs_check():
    assert unify(parse_term("?x"), parse_term("(f ?x)")) is None


def test_unify_soundness_and_symmetry_random():
    rng = random.Random(99)
    for _ in range(2000):
        a = random_term(rng)
        b = random_term(rng)
        forward = unify(a, b)
        backward = unify(b, a)
        assert (forward is None) == (backward is None)
        if forward is not None:
            assert substitute(a, forward) == substitute(b, forward)
            assert substitute(a, backward) == substitute(b, backward)


def test_substitution_idempotent():
    rng = random.Random(3)
    for _ in range(500):
        a = random_term(rng)
        b = random_term(rng)
        env = unify(a, b)
        if env is None:
            continue
        once = substitute(a, env)
        assert substitute(once, env) == once


# --- store and query ----------------------------------------------------------

def trace_store():
    return FactStore(
        [
            fact("(IsA Levodopa pill)"),
            fact("(AtLocation pill cabinet)", SOURCE_CONCEPTNET),
            fact("(IsA Wednesday weekday)", SOURCE_CONCEPTNET),
            fact("(IsA Wednesday day)", SOURCE_CONCEPTNET),
        ]
    )


def test_query_multiple_matches_in_insertion_order():
    results = query(trace_store(), parse_term("(IsA Wednesday ?w)"))
    assert results == [{"w": Atom("weekday")}, {"w": Atom("day")}]


def test_query_no_match_is_empty():
    assert query(trace_store(), parse_term("(IsA Thursday ?w)")) == []


def test_query_ground_membership():
    assert query(trace_store(), parse_term("(IsA Levodopa pill)")) == [{}]


def test_query_matches_linear_scan_oracle():
    rng = random.Random(41)
    facts = [Fact(term=random_term(rng, ground=True), source=SOURCE_GIVEN) for _ in range(200)]
    store = FactStore(facts)
    for _ in range(300):
        pattern = random_term(rng)
        expected = [env for f in store if (env := unify(pattern, f.term)) is not None]
        assert query(store, pattern) == expected


def test_store_set_semantics_first_source_wins():
    store = FactStore([fact("(IsA a b)", SOURCE_GIVEN), fact("(IsA a b)", SOURCE_CONCEPTNET)])
    assert len(store) == 1
    assert store.get(parse_term("(IsA a b)")).source == SOURCE_GIVEN


def test_fact_requires_ground_term():
    with pytest.raises(ValueError):
        Fact(term=parse_term("(IsA ?x pill)"), source=SOURCE_GIVEN)


# --- KB files -----------------------------------------------------------------

def test_load_kb_normalizes_infix_triples():
    store = loads_kb("ConceptNet | (Friday IsA 'business day')\n")
    assert parse_term("(IsA Friday 'business day')") in store
    assert next(iter(store)).source == SOURCE_CONCEPTNET


def test_normalize_triple_leaves_prefix_alone():
    term = parse_term("(IsA Friday weekday)")
    assert normalize_triple(term) == term


def test_load_kb_empty_and_comments():
    assert len(loads_kb("")) == 0
    assert len(loads_kb("# nothing\n\n")) == 0


def test_load_kb_duplicate_is_noop():
    text = "ConceptNet | (IsA a b)\nConceptNet | (IsA a b)\n"
    assert len(loads_kb(text)) == 1


def test_load_kb_unknown_tag():
    with pytest.raises(UnknownSourceTag) as excinfo:
        loads_kb("Hearsay | (IsA a b)\n")
    assert excinfo.value.line == 1


def test_load_kb_parse_error_carries_line():
    with pytest.raises(KBError) as excinfo:
        loads_kb("# ok\nConceptNet | (broken\n")
    assert excinfo.value.line == 2


def test_bundled_mini_kb_loads():
    from sortaid.explain import default_kb

    store = default_kb()
    assert parse_term("(AtLocation pill cabinet)") in store
    assert parse_term("(IsA Friday 'business day')") in store
