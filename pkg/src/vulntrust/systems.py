"""System security-dependency structure: boolean formulas over components.

A system is a monotone boolean formula whose atoms assert "component X
is safe": AND groups mean every member must hold, OR groups encode
redundancy.  Evaluating a formula over component opinions requires a
*read-once* form (each atom appearing exactly once), because the
conjunction/disjunction operators assume independent operands.

`to_read_once` first tries equivalence-preserving rewrites: absorption
plus greedy extraction of conjuncts shared by all DNF terms, recursing
on the residue and splitting atom-disjoint term groups.  If a residue
stays unfactorable, DNF terms are deleted one at a time - preferring
deletions that minimize remaining atom repetitions, then terms of
lowest certainty, then lexicographic order - until the rest factors.
Deleting a disjunct only ever makes the formula harder to satisfy, so
the resulting score is a lower bound on the original system's quality.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

from .assessment import ComponentAssessment, TrustParams
from .errors import (
    MissingOpinionError,
    NotReadOnceError,
    SchemaError,
    UnsimplifiableError,
)
from .opinions import (
    FusedOpinion,
    Opinion,
    WeightedOpinion,
    conjunction,
    disjunction,
    fold_conjunction,
    fuse,
)


@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class And:
    children: tuple["Formula", ...]


@dataclass(frozen=True)
class Or:
    children: tuple["Formula", ...]


Formula = Union[Atom, And, Or]


@dataclass(frozen=True)
class SystemSpec:
    name: str
    formula: Formula
    description: str | None = None


@dataclass(frozen=True)
class SystemAssessment:
    system: str
    opinion: Opinion
    expectation: float
    equivalent_vulns: float
    simplification_log: tuple[dict, ...] = field(default_factory=tuple)


def atom_names(formula: Formula) -> list[str]:
    """All atom occurrences, in tree order (repeats included)."""
    if isinstance(formula, Atom):
        return [formula.name]
    out: list[str] = []
    for child in formula.children:
        out.extend(atom_names(child))
    return out


def is_read_once(formula: Formula) -> bool:
    names = atom_names(formula)
    return len(names) == len(set(names))


# ── parsing ────────────────────────────────────────────────────────


def parse_node(node) -> Formula:
    if not isinstance(node, dict) or len(node) != 1:
        raise SchemaError(f"formula node must be a single-key object, got {node!r}")
    key, value = next(iter(node.items()))
    if key == "atom":
        if not isinstance(value, str) or not value:
            raise SchemaError(f"atom must be a nonempty string, got {value!r}")
        return Atom(value)
    if key in ("and", "or"):
        if not isinstance(value, list) or len(value) < 2:
            raise SchemaError(f"'{key}' needs a list of at least 2 children")
        children = tuple(parse_node(child) for child in value)
        return And(children) if key == "and" else Or(children)
    raise SchemaError(f"unknown formula node kind {key!r}")


def parse_spec(doc, known_components: Iterable[str] | None = None) -> SystemSpec:
    """Parse {"name": ..., "formula": node}; warns about unknown atoms.

    Raises:
        SchemaError: structural violations.
    """
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaError("system spec must be a JSON object")
    name = doc.get("name")
    if not isinstance(name, str) or not name:
        raise SchemaError("system spec needs a nonempty 'name'")
    if "formula" not in doc:
        raise SchemaError("system spec needs a 'formula'")
    formula = parse_node(doc["formula"])
    if known_components is not None:
        unknown = sorted(set(atom_names(formula)) - set(known_components))
        if unknown:
            warnings.warn(f"system {name!r} references unassessed components: {', '.join(unknown)}", stacklevel=2)
    description = doc.get("description")
    if description is not None and not isinstance(description, str):
        raise SchemaError("'description' must be a string")
    return SystemSpec(name=name, formula=formula, description=description)


def spec_to_doc(spec: SystemSpec) -> dict:
    def node(f: Formula):
        if isinstance(f, Atom):
            return {"atom": f.name}
        key = "and" if isinstance(f, And) else "or"
        return {key: [node(c) for c in f.children]}

    doc = {"name": spec.name, "formula": node(spec.formula)}
    if spec.description is not None:
        doc["description"] = spec.description
    return doc


# ── normalization to a read-once form ──────────────────────────────

Term = frozenset


def to_dnf(formula: Formula) -> list[Term]:
    """Disjunctive normal form as a list of atom sets (monotone formulas)."""
    if isinstance(formula, Atom):
        return [frozenset([formula.name])]
    if isinstance(formula, Or):
        terms: list[Term] = []
        for child in formula.children:
            terms.extend(to_dnf(child))
        return terms
    product: list[Term] = [frozenset()]
    for child in formula.children:
        product = [left | right for left in product for right in to_dnf(child)]
    return product


def _absorb(terms: Iterable[Term]) -> list[Term]:
    """Drop duplicate terms and supersets of other terms (X or X.Y = X)."""
    unique = sorted(set(terms), key=lambda t: (len(t), sorted(t)))
    kept: list[Term] = []
    for term in unique:
        if not any(other < term or other == term for other in kept):
            kept.append(term)
    return sorted(kept, key=lambda t: sorted(t))


def _connected_groups(terms: Sequence[Term]) -> list[list[Term]]:
    """Group terms transitively connected through shared atoms."""
    remaining = list(terms)
    groups: list[list[Term]] = []
    while remaining:
        group = [remaining.pop(0)]
        atoms = set(group[0])
        grew = True
        while grew:
            grew = False
            for term in remaining[:]:
                if term & atoms:
                    group.append(term)
                    atoms |= term
                    remaining.remove(term)
                    grew = True
        groups.append(sorted(group, key=lambda t: sorted(t)))
    return sorted(groups, key=lambda g: sorted(g[0]))


def _repetitions(terms: Sequence[Term]) -> int:
    counts: dict[str, int] = {}
    for term in terms:
        for atom in term:
            counts[atom] = counts.get(atom, 0) + 1
    return sum(c - 1 for c in counts.values())


def _term_certainty(term: Term, opinions: Mapping[str, Opinion] | None) -> float | None:
    if opinions is None:
        return None
    try:
        return fold_conjunction(opinions[a] for a in sorted(term)).c
    except KeyError:
        return None


def _choose_deletion(terms: Sequence[Term], opinions: Mapping[str, Opinion] | None) -> tuple[Term, dict]:
    """Pick the term to drop: fewest remaining repetitions, then lowest
    certainty, then lexicographically smallest."""
    best = None
    for term in terms:
        remaining = [t for t in terms if t != term]
        reps = _repetitions(remaining)
        certainty = _term_certainty(term, opinions)
        key = (reps, certainty if certainty is not None else float("inf"), sorted(term))
        if best is None or key < best[0]:
            best = (key, term, reps, certainty)
    _, term, reps, certainty = best
    reason = {"repetitions_after": reps}
    if certainty is not None:
        reason["term_certainty"] = certainty
    return term, reason


def _term_formula(term: Term) -> Formula:
    atoms = sorted(term)
    if len(atoms) == 1:
        return Atom(atoms[0])
    return And(tuple(Atom(a) for a in atoms))


def _make_and(parts: list[Formula]) -> Formula:
    flat: list[Formula] = []
    for part in parts:
        if isinstance(part, And):
            flat.extend(part.children)
        else:
            flat.append(part)
    return flat[0] if len(flat) == 1 else And(tuple(flat))


def _make_or(parts: list[Formula]) -> Formula:
    flat: list[Formula] = []
    for part in parts:
        if isinstance(part, Or):
            flat.extend(part.children)
        else:
            flat.append(part)
    return flat[0] if len(flat) == 1 else Or(tuple(flat))


def _factor(terms: list[Term], opinions: Mapping[str, Opinion] | None, log: list[dict]) -> Formula:
    terms = _absorb(terms)
    if not terms:
        raise UnsimplifiableError("formula reduced to nothing")
    if len(terms) == 1:
        return _term_formula(terms[0])

    groups = _connected_groups(terms)
    if len(groups) > 1:
        return _make_or([_factor(group, opinions, log) for group in groups])

    shared = frozenset.intersection(*terms)
    if shared:
        residues = [term - shared for term in terms]
        sub = _factor(residues, opinions, log)
        return _make_and([_term_formula(shared), sub])

    # connected, nothing shared by all terms: sacrifice a disjunct
    victim, reason = _choose_deletion(terms, opinions)
    log.append({"action": "deleted_term", "term": sorted(victim), **reason})
    return _factor([t for t in terms if t != victim], opinions, log)


def to_read_once(
    formula: Formula,
    opinions: Mapping[str, Opinion] | None = None,
) -> tuple[Formula, list[dict]]:
    """Rewrite a formula so each atom appears exactly once.

    Already-read-once input is returned unchanged.  Otherwise the
    formula goes through DNF + absorption + greedy factoring, falling
    back to logged conservative term deletion.  Opinions, when given,
    feed the lowest-certainty tie-break for deletions.
    """
    if is_read_once(formula):
        return formula, []
    log: list[dict] = []
    result = _factor(to_dnf(formula), opinions, log)
    return result, log


# ── evaluation ─────────────────────────────────────────────────────


def evaluate(formula: Formula, opinions: Mapping[str, Opinion]) -> Opinion:
    """Bottom-up evaluation of a read-once formula over component opinions.

    Raises:
        NotReadOnceError: an atom appears more than once.
        MissingOpinionError: an atom has no opinion.
    """
    if not is_read_once(formula):
        raise NotReadOnceError("formula repeats atoms; call to_read_once first")
    return _evaluate(formula, opinions)


def _evaluate(formula: Formula, opinions: Mapping[str, Opinion]) -> Opinion:
    if isinstance(formula, Atom):
        try:
            return opinions[formula.name]
        except KeyError:
            raise MissingOpinionError(formula.name) from None
    results = [_evaluate(child, opinions) for child in formula.children]
    combine = conjunction if isinstance(formula, And) else disjunction
    acc = results[0]
    for nxt in results[1:]:
        acc = combine(acc, nxt)
    return acc


def assess_system(
    spec: SystemSpec,
    assessments: Mapping[str, ComponentAssessment],
    params: TrustParams,
) -> SystemAssessment:
    """Normalize the system formula, evaluate it, and attach report numbers."""
    opinions = {name: a.opinion for name, a in assessments.items()}
    read_once, log = to_read_once(spec.formula, opinions)
    opinion = evaluate(read_once, opinions)
    e = opinion.expectation
    return SystemAssessment(
        system=spec.name,
        opinion=opinion,
        expectation=e,
        equivalent_vulns=(1.0 - e) * params.lambda_,
        simplification_log=tuple(log),
    )


def fuse_assessments(per_source: Sequence[tuple[Opinion, float]]) -> FusedOpinion:
    """Merge opinions about one component from several evidence sources."""
    return fuse([WeightedOpinion(opinion, weight) for opinion, weight in per_source])
