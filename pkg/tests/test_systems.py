"""Tests for formula parsing, read-once normalization and system evaluation."""

from __future__ import annotations

import random

import numpy as np
import pytest

from oracles import (
    enumeration_probability,
    random_dnf_formula,
    random_read_once,
    truth_vector,
)
from vulntrust.assessment import ComponentAssessment, TrustParams
from vulntrust.errors import MissingOpinionError, NotReadOnceError, SchemaError
from vulntrust.opinions import Opinion, conjunction, fold_conjunction, fuse, WeightedOpinion
from vulntrust.systems import (
    And,
    Atom,
    Or,
    assess_system,
    atom_names,
    evaluate,
    fuse_assessments,
    is_read_once,
    parse_spec,
    parse_node,
    spec_to_doc,
    to_read_once,
)

FIG8_DOC = {
    "name": "secret-shared-db",
    "formula": {
        "and": [
            {"atom": "B"},
            {"atom": "D"},
            {"or": [
                {"and": [{"atom": "A"}, {"atom": "C"}]},
                {"and": [{"atom": "X"}, {"atom": "Y"}]},
            ]},
        ]
    },
}


def A(*names):
    return And(tuple(Atom(n) for n in names))


class TestParsing:
    def test_simple_and(self):
        assert parse_node({"and": [{"atom": "B"}, {"atom": "D"}]}) == A("B", "D")

    def test_nested_redundant_system(self):
        spec = parse_spec(FIG8_DOC)
        assert spec.formula == And((
            Atom("B"), Atom("D"),
            Or((A("A", "C"), A("X", "Y"))),
        ))

    def test_empty_or_rejected(self):
        with pytest.raises(SchemaError):
            parse_node({"or": []})

    def test_single_child_rejected(self):
        with pytest.raises(SchemaError):
            parse_node({"and": [{"atom": "A"}]})

    def test_unknown_kind_rejected(self):
        with pytest.raises(SchemaError):
            parse_node({"xor": [{"atom": "A"}, {"atom": "B"}]})

    def test_spec_needs_name(self):
        with pytest.raises(SchemaError):
            parse_spec({"formula": {"atom": "A"}})

    def test_unknown_components_warn(self):
        with pytest.warns(UserWarning, match="unassessed"):
            parse_spec(FIG8_DOC, known_components=["B", "D"])

    def test_doc_round_trip(self):
        spec = parse_spec(FIG8_DOC)
        assert parse_spec(spec_to_doc(spec)) == spec


class TestToReadOnce:
    def test_shared_conjunct_extraction(self):
        # (A&B&C&D) | (B&D&X&Y)  ->  B & D & ((A&C) | (X&Y)), no deletions
        formula = Or((A("A", "B", "C", "D"), A("B", "D", "X", "Y")))
        got, log = to_read_once(formula)
        assert got == And((Atom("B"), Atom("D"), Or((A("A", "C"), A("X", "Y")))))
        assert log == []

    def test_read_once_input_unchanged(self):
        formula = And((Or((Atom("A"), Atom("B"))), Or((Atom("C"), Atom("D")))))
        got, log = to_read_once(formula)
        assert got is formula
        assert log == []

    def test_absorption_without_deletion(self):
        got, log = to_read_once(Or((Atom("A"), A("A", "B"))))
        assert got == Atom("A")
        assert log == []

    def test_majority_deletes_lowest_certainty_term(self):
        opinions = {
            "A": Opinion(0.9, 0.3, 0.5),
            "B": Opinion(0.9, 0.3, 0.5),
            "C": Opinion(0.9, 0.95, 0.5),
        }
        majority = Or((A("A", "B"), A("A", "C"), A("B", "C")))
        got, log = to_read_once(majority, opinions)
        assert got == And((Atom("C"), Or((Atom("A"), Atom("B")))))
        assert [entry["term"] for entry in log if entry["action"] == "deleted_term"] == [["A", "B"]]

        # brute-force confirmation of the deletion criteria: every single-term
        # deletion leaves 1 repetition, so the tie-break picks the lowest
        # folded certainty, which is the A&B term
        terms = [frozenset("AB"), frozenset("AC"), frozenset("BC")]
        reps = []
        for victim in terms:
            rest = [t for t in terms if t != victim]
            counts = {}
            for t in rest:
                for a in t:
                    counts[a] = counts.get(a, 0) + 1
            reps.append(sum(v - 1 for v in counts.values()))
        assert reps == [1, 1, 1]
        certainties = [fold_conjunction(opinions[a] for a in sorted(t)).c for t in terms]
        assert min(range(3), key=lambda i: certainties[i]) == 0

    def test_factoring_preserves_truth_tables(self):
        rng = random.Random(99)
        checked = 0
        while checked < 60:
            pool = [f"a{i}" for i in range(rng.randint(3, 8))]
            formula = random_dnf_formula(rng, pool)
            got, log = to_read_once(formula)
            if any(e["action"] == "deleted_term" for e in log):
                continue  # deletions intentionally change the function
            atoms = sorted(set(atom_names(formula)))
            np.testing.assert_array_equal(
                truth_vector(formula, atoms),
                truth_vector(got, atoms),
            )
            checked += 1

    def test_deletion_is_conservative(self):
        rng = random.Random(2024)
        for _ in range(80):
            pool = [f"a{i}" for i in range(rng.randint(3, 10))]
            formula = random_dnf_formula(rng, pool)
            opinions = {a: Opinion(rng.uniform(0.05, 0.95), 1.0, 0.5) for a in pool}
            got, _ = to_read_once(formula, opinions)
            result = evaluate(got, opinions).expectation
            exact = enumeration_probability(formula, {a: o.expectation for a, o in opinions.items()})
            assert result <= exact + 1e-9


class TestEvaluate:
    def test_single_atom_identity(self):
        o = Opinion(0.7, 0.8, 0.6)
        assert evaluate(Atom("x"), {"x": o}) == o

    def test_matches_direct_conjunction(self):
        a = Opinion(0.968, 0.966, 0.974)
        b = Opinion(0.950, 0.920, 0.974)
        got = evaluate(A("linux", "firefox"), {"linux": a, "firefox": b})
        want = conjunction(a, b)
        assert got == want

    def test_nested_system_against_enumeration(self):
        rng = random.Random(8)
        spec = parse_spec(FIG8_DOC)
        opinions = {n: Opinion(rng.uniform(0.1, 0.95), 1.0, 0.5) for n in "ABCDXY"}
        got = evaluate(spec.formula, opinions)
        exact = enumeration_probability(spec.formula, {n: o.t for n, o in opinions.items()})
        assert got.expectation == pytest.approx(exact, abs=1e-9)

    def test_random_read_once_formulas_match_enumeration(self):
        rng = random.Random(4242)
        for _ in range(60):
            n = rng.randint(2, 12)
            atoms = [f"c{i}" for i in range(n)]
            formula = random_read_once(rng, atoms)
            opinions = {a: Opinion(rng.random(), 1.0, 0.5) for a in atoms}
            got = evaluate(formula, opinions)
            exact = enumeration_probability(formula, {a: o.t for a, o in opinions.items()})
            assert got.expectation == pytest.approx(exact, abs=1e-9)

    def test_child_reordering_invariance(self):
        rng = random.Random(17)
        opinions = {n: Opinion(rng.random(), rng.random(), rng.uniform(0.05, 0.95)) for n in "ABCD"}
        forward = evaluate(And((Atom("A"), Atom("B"), Or((Atom("C"), Atom("D"))))), opinions)
        backward = evaluate(And((Or((Atom("D"), Atom("C"))), Atom("B"), Atom("A"))), opinions)
        assert forward.t == pytest.approx(backward.t, abs=1e-9)
        assert forward.c == pytest.approx(backward.c, abs=1e-9)
        assert forward.f == pytest.approx(backward.f, abs=1e-9)

    def test_repeated_atom_rejected(self):
        with pytest.raises(NotReadOnceError):
            evaluate(A("A", "A"), {"A": Opinion(0.5, 0.5, 0.5)})

    def test_missing_opinion_rejected(self):
        with pytest.raises(MissingOpinionError):
            evaluate(A("A", "B"), {"A": Opinion(0.5, 0.5, 0.5)})


def assessment_for(name, t, c, f, params):
    return ComponentAssessment.from_opinion(name, Opinion(t, c, f), params)


class TestAssessSystem:
    def test_equivalent_count_attached(self):
        params = TrustParams()
        assessments = {
            "a": assessment_for("a", 0.9, 1.0, 0.5, params),
            "b": assessment_for("b", 0.8, 1.0, 0.5, params),
        }
        spec = parse_spec({"name": "pair", "formula": {"and": [{"atom": "a"}, {"atom": "b"}]}})
        got = assess_system(spec, assessments, params)
        assert got.system == "pair"
        assert got.expectation == pytest.approx(0.72, abs=1e-12)
        assert got.equivalent_vulns == pytest.approx((1 - 0.72) * 1080, abs=1e-9)
        assert got.simplification_log == ()

    def test_disjoint_redundancy_at_full_certainty(self):
        params = TrustParams()
        assessments = {
            "a": assessment_for("a", 0.6, 1.0, 0.5, params),
            "b": assessment_for("b", 0.7, 1.0, 0.5, params),
        }
        spec = parse_spec({"name": "1oo2", "formula": {"or": [{"atom": "a"}, {"atom": "b"}]}})
        got = assess_system(spec, assessments, params)
        assert got.opinion.t == pytest.approx(1 - 0.4 * 0.3, abs=1e-12)

    def test_deletions_surface_in_log(self):
        params = TrustParams()
        assessments = {
            n: assessment_for(n, 0.9, 0.5, 0.5, params) for n in ("A", "B", "C")
        }
        spec = parse_spec({"name": "maj", "formula": {"or": [
            {"and": [{"atom": "A"}, {"atom": "B"}]},
            {"and": [{"atom": "A"}, {"atom": "C"}]},
            {"and": [{"atom": "B"}, {"atom": "C"}]},
        ]}})
        got = assess_system(spec, assessments, params)
        assert any(e["action"] == "deleted_term" for e in got.simplification_log)


class TestFuseAssessments:
    def test_identical_sources_unchanged(self):
        o = Opinion(0.8, 0.7, 0.4)
        got = fuse_assessments([(o, 1.0), (o, 1.0)])
        assert got.opinion.t == pytest.approx(o.t, abs=1e-12)
        assert got.opinion.c == pytest.approx(o.c, abs=1e-12)
        assert got.opinion.f == pytest.approx(o.f, abs=1e-12)
        assert got.doc == 0.0

    def test_matches_direct_fusion_with_preference_weights(self):
        a, b = Opinion(0.9, 0.8, 0.5), Opinion(0.4, 0.6, 0.5)
        got = fuse_assessments([(a, 2.0), (b, 1.0)])
        want = fuse([WeightedOpinion(a, 2.0), WeightedOpinion(b, 1.0)])
        assert got == want

    def test_conflicting_certain_sources_zero_certainty(self):
        got = fuse_assessments([(Opinion(1, 1, 0.5), 1.0), (Opinion(0, 1, 0.5), 1.0)])
        assert got.opinion.c == 0.0
        assert got.doc == 1.0
