"""Uncertain-probability opinions and their logical and fusion operators.

An opinion o = (t, c, f) represents an uncertain probability about a
binary proposition ("this component stays free of vulnerabilities"):

    t ∈ [0,1] — trust value, the most likely value of the probability
                (mode of the posterior)
    c ∈ [0,1] — certainty, how representative t is expected to be
    f ∈ [0,1] — initial expectation absent evidence (the prior)

The scalar trustworthiness score is the expectation

    E(o) = t·c + (1−c)·f

which interpolates between the prior (c = 0) and the evidence-backed
estimate (c = 1).

Why not a bare probability?  A scalar conflates "the evidence says 50%"
with "we have no evidence"; the (t, c, f) triple keeps those apart, and
the operators below propagate the distinction through conjunction,
disjunction and multi-source fusion.

Operators
---------
``conjunction`` (AND) and ``disjunction`` (OR) combine opinions about
*independent* propositions.  Both are commutative and associative, and
at full certainty (c = 1) they reduce exactly to probabilistic logic:
t_AND = t_A·t_B and t_OR = t_A + t_B − t_A·t_B.  Expectations always
compose probabilistically: E(a AND b) = E(a)·E(b) and
E(a OR b) = E(a) + E(b) − E(a)·E(b).

``fuse`` merges n weighted opinions about the *same* proposition and
reports a degree of conflict DoC ∈ [0,1]; the fused certainty is scaled
by (1 − DoC), so totally conflicting certain sources yield a fully
uncertain result.  Fusion is commutative and idempotent but NOT
associative; always fuse the whole input set at once.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InvalidWeightsError, UndefinedOperandError


def _validated(value: float, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise TypeError(f"{name} must be a number, got {type(value).__name__}")
    value = float(value)
    if math.isnan(value) or math.isinf(value):
        raise ValueError(f"{name} must be finite, got {value}")
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must be in [0, 1], got {value}")
    return value


def _unit(value: float) -> float:
    """Clamp float noise back into [0, 1]; operator results live there."""
    if value < 0.0:
        return 0.0
    if value > 1.0:
        return 1.0
    return value


@dataclass(frozen=True)
class Opinion:
    """An uncertain probability (t, c, f); all components in [0, 1]."""

    t: float
    c: float
    f: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "t", _validated(self.t, "t"))
        object.__setattr__(self, "c", _validated(self.c, "c"))
        object.__setattr__(self, "f", _validated(self.f, "f"))

    @property
    def expectation(self) -> float:
        """E = t·c + (1−c)·f."""
        return self.t * self.c + (1.0 - self.c) * self.f

    def __repr__(self) -> str:
        return f"Opinion(t={self.t:.6g}, c={self.c:.6g}, f={self.f:.6g})"


@dataclass(frozen=True)
class WeightedOpinion:
    """An opinion with a nonnegative preference weight.

    Weight 0 means "do not consider this source"; such inputs are
    dropped before fusion, exactly as if they had not been supplied.
    """

    opinion: Opinion
    weight: float = 1.0

    def __post_init__(self) -> None:
        w = float(self.weight)
        if math.isnan(w) or math.isinf(w) or w < 0.0:
            raise InvalidWeightsError(f"weight must be finite and >= 0, got {self.weight}")
        object.__setattr__(self, "weight", w)


@dataclass(frozen=True)
class FusedOpinion:
    """Fusion result: the combined opinion plus its degree of conflict."""

    opinion: Opinion
    doc: float

    @property
    def expectation(self) -> float:
        return self.opinion.expectation


def expectation(o: Opinion) -> float:
    """Trustworthiness score E(o) = t·c + (1−c)·f."""
    return o.expectation


def conjunction(a: Opinion, b: Opinion) -> Opinion:
    """Combine opinions on independent propositions: both must hold.

    Resulting components::

        f = f_A·f_B
        c = c_A + c_B − c_A·c_B
            − [(1−c_A)·c_B·(1−f_A)·t_B + c_A·(1−c_B)·(1−f_B)·t_A] / (1 − f_A·f_B)
        t = (1/c) · (c_A·c_B·t_A·t_B
            + [c_A·(1−c_B)·(1−f_A)·f_B·t_A + (1−c_A)·c_B·f_A·(1−f_B)·t_B] / (1 − f_A·f_B))
        t = 0.5 when the resulting c is 0 (sentinel; E then equals f).

    Undefined when f_A·f_B = 1, i.e. both priors are exactly 1.

    Raises:
        UndefinedOperandError: if f_A·f_B = 1.
    """
    fa, fb = a.f, b.f
    if fa * fb == 1.0:
        raise UndefinedOperandError("conjunction undefined when both priors are 1")
    denom = 1.0 - fa * fb
    ta, ca = a.t, a.c
    tb, cb = b.t, b.c

    c = ca + cb - ca * cb - ((1.0 - ca) * cb * (1.0 - fa) * tb + ca * (1.0 - cb) * (1.0 - fb) * ta) / denom
    c = _unit(c)
    if c == 0.0:
        t = 0.5
    else:
        t = (ca * cb * ta * tb + (ca * (1.0 - cb) * (1.0 - fa) * fb * ta + (1.0 - ca) * cb * fa * (1.0 - fb) * tb) / denom) / c
        t = _unit(t)
    return Opinion(t=t, c=c, f=fa * fb)


def disjunction(a: Opinion, b: Opinion) -> Opinion:
    """Combine opinions on independent propositions: at least one holds.

    Resulting components::

        f = f_A + f_B − f_A·f_B
        c = c_A + c_B − c_A·c_B
            − [c_A·(1−c_B)·f_B·(1−t_A) + (1−c_A)·c_B·f_A·(1−t_B)] / (f_A + f_B − f_A·f_B)
        t = (1/c) · (c_A·t_A + c_B·t_B − c_A·c_B·t_A·t_B)
        t = 0.5 when the resulting c is 0 (sentinel).

    Undefined when f_A + f_B − f_A·f_B = 0, i.e. both priors are exactly 0.

    Raises:
        UndefinedOperandError: if f_A = f_B = 0.
    """
    fa, fb = a.f, b.f
    denom = fa + fb - fa * fb
    if denom == 0.0:
        raise UndefinedOperandError("disjunction undefined when both priors are 0")
    ta, ca = a.t, a.c
    tb, cb = b.t, b.c

    c = ca + cb - ca * cb - (ca * (1.0 - cb) * fb * (1.0 - ta) + (1.0 - ca) * cb * fa * (1.0 - tb)) / denom
    c = _unit(c)
    if c == 0.0:
        t = 0.5
    else:
        t = (ca * ta + cb * tb - ca * cb * ta * tb) / c
        t = _unit(t)
    return Opinion(t=t, c=c, f=denom)


# Spec'd operator names read better at call sites dealing with formulas.
and_ct = conjunction
or_ct = disjunction


def pairwise_conflict(a: WeightedOpinion, b: WeightedOpinion) -> float:
    """Degree of conflict between two weighted opinions.

        DoC = |t_1 − t_2| · c_1 · c_2 · (1 − |w_1 − w_2| / (w_1 + w_2))

    1 means equally weighted, fully certain, maximally divergent trust
    values; 0 means agreement, or at least one uncertain (c = 0) or
    ignored (w = 0) side.

    Raises:
        InvalidWeightsError: if w_1 + w_2 = 0.
    """
    w1, w2 = a.weight, b.weight
    if w1 + w2 == 0.0:
        raise InvalidWeightsError("pairwise conflict needs w_1 + w_2 > 0")
    o1, o2 = a.opinion, b.opinion
    return abs(o1.t - o2.t) * o1.c * o2.c * (1.0 - abs(w1 - w2) / (w1 + w2))


def fuse(inputs: Sequence[WeightedOpinion]) -> FusedOpinion:
    """Conflict-aware fusion of n >= 2 weighted opinions on one proposition.

    DoC is the mean of all pairwise conflicts.  With W = Σw:

        f = Σ w_i·f_i / W                          (always)
        t = Σ w_i·t_i / W              if every c_i = 1
          = 0.5                        if every c_i = 0
          = Σ c_i·t_i·w_i·Π_{j≠i}(1−c_j) / Σ c_i·w_i·Π_{j≠i}(1−c_j)   otherwise
        c = 1                          if every c_i = 1
          = Σ c_i·w_i·Π_{j≠i}(1−c_j) / Σ w_i·Π_{j≠i}(1−c_j)           otherwise
        and the resulting c is scaled by (1 − DoC).

    When some but not all inputs are fully certain the mixed-case ratios
    degenerate to 0/0; we use their limit, which is the weighted mean of
    the certain subset with c = 1 (before conflict scaling).

    Zero-weight inputs are dropped first, so weighting a source 0 gives
    exactly the result of fusing without it.

    Raises:
        InvalidWeightsError: if all weights are zero.
        ValueError: if fewer than two opinions are supplied.
    """
    if len(inputs) < 2:
        raise ValueError("fusion needs at least two weighted opinions")
    if all(wo.weight == 0.0 for wo in inputs):
        raise InvalidWeightsError("fusion needs at least one positive weight")

    live = [wo for wo in inputs if wo.weight > 0.0]
    if len(live) == 1:
        return FusedOpinion(opinion=live[0].opinion, doc=0.0)

    n = len(live)
    weights = [wo.weight for wo in live]
    ops = [wo.opinion for wo in live]
    wsum = sum(weights)

    pair_count = n * (n - 1) // 2
    doc = sum(pairwise_conflict(x, y) for x, y in itertools.combinations(live, 2)) / pair_count
    doc = _unit(doc)

    f = sum(w * o.f for w, o in zip(weights, ops)) / wsum

    certain = [i for i, o in enumerate(ops) if o.c == 1.0]
    if certain:
        wc = sum(weights[i] for i in certain)
        t = sum(weights[i] * ops[i].t for i in certain) / wc
        c_unscaled = 1.0
    elif all(o.c == 0.0 for o in ops):
        t = 0.5
        c_unscaled = 0.0
    else:
        others = [
            math.prod((1.0 - ops[j].c) for j in range(n) if j != i)
            for i in range(n)
        ]
        t_den = sum(ops[i].c * weights[i] * others[i] for i in range(n))
        t = sum(ops[i].c * ops[i].t * weights[i] * others[i] for i in range(n)) / t_den
        c_unscaled = t_den / sum(weights[i] * others[i] for i in range(n))

    c = _unit(c_unscaled * (1.0 - doc))
    return FusedOpinion(opinion=Opinion(t=_unit(t), c=c, f=_unit(f)), doc=doc)


def fold_conjunction(opinions: Iterable[Opinion]) -> Opinion:
    """Conjunction over any number of opinions (left fold; associative)."""
    it = iter(opinions)
    try:
        acc = next(it)
    except StopIteration:
        raise ValueError("fold_conjunction needs at least one opinion") from None
    for o in it:
        acc = conjunction(acc, o)
    return acc
