"""End-to-end reversibility classification.

Pipeline: the constant-RMT shortcut settles strictly irreversible rules, the
balance shortcut settles unbalanced ones, and every other rule gets a
minimized reachability tree whose nodes are checked against the per-level
completeness conditions.  Violations become irreversibility expressions,
arithmetic progressions (residue, modulus, smallest size) whose union is the
set of sizes the CA is irreversible for.

Every classification is cross-checked against the pair-graph oracle on a
window of sizes before it is returned; a disagreement raises
OracleMismatchError instead of silently shipping either verdict.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from math import lcm
from typing import Iterable, Sequence

from .debruijn import reversible_by_pair_graph
from .dynamics import brute_force_reversible
from .mintree import MinimizedTree, build_minimized, exact_occurrences
from .rulespace import Rule, is_balanced_rule, is_strictly_irreversible, wolfram_decimal
from .rtree import (
    node_balanced,
    node_total,
    restrict_special,
    reversible_for_n_by_tree,
)

DEFAULT_ORACLE_WINDOW = 24


class CAClass(enum.Enum):
    REVERSIBLE = "Reversible"
    STRICTLY_IRREVERSIBLE = "StrictlyIrreversible"
    TRIVIALLY_SEMI_REVERSIBLE = "TriviallySemiReversible"
    NON_TRIVIALLY_SEMI_REVERSIBLE = "NonTriviallySemiReversible"


@dataclass(frozen=True, order=True)
class IrreversibilityExpression:
    """The size set {n >= min_n : n == residue (mod modulus)}.

    A final segment n >= min_n is encoded with modulus 1 (residue 0).
    """

    min_n: int
    modulus: int
    residue: int

    def __post_init__(self) -> None:
        if self.modulus < 1:
            raise ValueError(f"modulus must be >= 1, got {self.modulus}")
        if not 0 <= self.residue < self.modulus:
            raise ValueError(f"residue {self.residue} out of range [0, {self.modulus})")
        if self.min_n < 1 or self.min_n % self.modulus != self.residue:
            raise ValueError(
                f"min_n {self.min_n} is not a member of its own progression"
            )

    @classmethod
    def segment(cls, min_n: int) -> "IrreversibilityExpression":
        return cls(min_n=min_n, modulus=1, residue=0)

    @classmethod
    def progression(cls, min_n: int, modulus: int) -> "IrreversibilityExpression":
        return cls(min_n=min_n, modulus=modulus, residue=min_n % modulus)

    @property
    def is_segment(self) -> bool:
        return self.modulus == 1

    def covers(self, n: int) -> bool:
        return n >= self.min_n and n % self.modulus == self.residue

    def subset_of(self, other: "IrreversibilityExpression") -> bool:
        return (
            self.min_n >= other.min_n
            and self.modulus % other.modulus == 0
            and self.residue % other.modulus == other.residue
        )

    def __str__(self) -> str:
        if self.is_segment:
            return f"n ≥ {self.min_n}"
        return f"n ≡ {self.residue} (mod {self.modulus}), n ≥ {self.min_n}"


def normalize_expressions(
    expressions: Iterable[IrreversibilityExpression],
    sporadic: Iterable[int] = (),
) -> tuple[tuple[IrreversibilityExpression, ...], tuple[int, ...]]:
    """Canonical form: drop subsets, absorb sporadic sizes into adjacent segments.

    Idempotent and independent of input order.  Returns the surviving
    expressions (sorted) and the sporadic sizes not absorbed.
    """
    exprs = set(expressions)
    sizes = set(sporadic)
    changed = True
    while changed:
        changed = False
        covered = {s for s in sizes if any(e.covers(s) for e in exprs)}
        if covered:
            sizes -= covered
            changed = True
        for s in sorted(sizes, reverse=True):
            for e in list(exprs):
                if e.is_segment and e.min_n == s + 1:
                    exprs.remove(e)
                    exprs.add(IrreversibilityExpression.segment(s))
                    sizes.remove(s)
                    changed = True
                    break
        # grow a progression one step earlier while that size is already
        # covered elsewhere; coverage only grows, so the fixpoint is unique
        for e in sorted(exprs):
            prev = e.min_n - e.modulus
            if prev >= 1 and (
                prev in sizes or any(o != e and o.covers(prev) for o in exprs)
            ):
                exprs.remove(e)
                exprs.add(
                    IrreversibilityExpression(
                        min_n=prev, modulus=e.modulus, residue=e.residue
                    )
                )
                changed = True
        # distinct expressions cannot be mutual subsets, so one pass suffices
        redundant = {e for e in exprs if any(o != e and e.subset_of(o) for o in exprs)}
        if redundant:
            exprs -= redundant
            changed = True
    return tuple(sorted(exprs)), tuple(sorted(sizes))


@dataclass(frozen=True)
class Violation:
    node_id: int
    kind: str  # "intermediate" or "special"
    iota: int  # 0 for intermediate violations
    expression: IrreversibilityExpression | None
    sporadic_size: int | None


def _scan(tree: MinimizedTree, rule: Rule) -> list[Violation]:
    """All per-node condition failures with the sizes they rule out.

    Placements come from the exact occurrence levels of each node (the level
    sequence of the unrolled tree is eventually periodic, so every node's
    levels are finitely many sporadic values plus arithmetic progressions).

    Intermediate placements (the node sits at least m levels above the
    leaves) require d^m RMTs and balance; a failure rules out every
    n >= min_level + m.  Special placements at level n-iota check the
    level-restricted node against d^iota RMTs and balance; a failure rules
    out n = level + iota for every occurrence level, i.e. one progression
    per anchor plus single sizes for sporadic occurrences (sizes below m are
    owned by the brute-forced small-size table and dropped).
    """
    p = rule.params
    out: list[Violation] = []
    full = p.table_size
    occurrences = exact_occurrences(tree)
    for nid in range(tree.unique_nodes):
        gamma = tree.gammas[nid]
        occ = occurrences[nid]
        if node_total(gamma) != full or not node_balanced(gamma, rule):
            out.append(
                Violation(
                    nid,
                    "intermediate",
                    0,
                    IrreversibilityExpression.segment(occ.min_level + p.m),
                    None,
                )
            )
        for iota in range(1, p.m):
            restricted = restrict_special(gamma, iota, p)
            if node_total(restricted) == p.d**iota and node_balanced(restricted, rule):
                continue
            for anchor in occ.anchors:
                out.append(
                    Violation(
                        nid,
                        "special",
                        iota,
                        IrreversibilityExpression.progression(
                            anchor + iota, occ.period
                        ),
                        None,
                    )
                )
            for level in occ.sporadic:
                if level + iota >= p.m:
                    out.append(Violation(nid, "special", iota, None, level + iota))
    return out


def scan_violations(tree: MinimizedTree, rule: Rule) -> list[IrreversibilityExpression]:
    """Raw irreversibility expressions read off the minimized tree."""
    return [v.expression for v in _scan(tree, rule) if v.expression is not None]


@dataclass(frozen=True)
class TreeEvidence:
    unique_nodes: int
    height: int
    violating_nodes: tuple[int, ...]
    decided_at: int  # creation level of the first trivial trigger, else height


@dataclass(frozen=True)
class Classification:
    rule: Rule
    ca_class: CAClass
    expressions: tuple[IrreversibilityExpression, ...]
    sporadic_irreversible: tuple[int, ...]
    small_n_reversible: dict[int, bool]
    evidence: TreeEvidence | None
    verified_up_to: int


class OracleMismatchError(Exception):
    """Classifier and pair-graph oracle disagree on some checked size."""

    def __init__(
        self,
        rule: Rule,
        predicted: Sequence[bool],
        oracle: Sequence[bool],
    ):
        self.rule = rule
        self.predicted = list(predicted)
        self.oracle = list(oracle)
        bad = [n + 1 for n, (a, b) in enumerate(zip(predicted, oracle)) if a != b]
        super().__init__(
            f"rule {rule} (d={rule.params.d}, m={rule.params.m}): classification "
            f"disagrees with the pair-graph oracle at n = {bad}"
        )


def _covered(
    n: int,
    expressions: Sequence[IrreversibilityExpression],
    sporadic: Sequence[int],
) -> bool:
    return n in sporadic or any(e.covers(n) for e in expressions)


def complement_is_finite(
    expressions: Sequence[IrreversibilityExpression],
    sporadic: Sequence[int],
    start: int,
) -> bool:
    """Is {n >= start} minus the expressed set finite?  Exact: beyond every
    min_n, coverage is a union of residue classes modulo the lcm of the moduli."""
    if not expressions:
        return False
    period = lcm(*(e.modulus for e in expressions))
    horizon = max(
        [e.min_n for e in expressions] + [s + 1 for s in sporadic] + [start]
    )
    return all(
        _covered(n, expressions, sporadic)
        for n in range(horizon + 1, horizon + period + 1)
    )


def classify(
    rule: Rule,
    verified_up_to: int = DEFAULT_ORACLE_WINDOW,
    max_nodes: int = 1_000_000,
) -> Classification:
    """Classify a rule and cross-check the verdicts on the oracle window."""
    p = rule.params
    small = {n: brute_force_reversible(rule, n) for n in range(1, p.m)}
    evidence: TreeEvidence | None = None
    sporadic: tuple[int, ...] = ()

    if is_strictly_irreversible(rule):
        ca_class = CAClass.STRICTLY_IRREVERSIBLE
        expressions = (IrreversibilityExpression.segment(1),)
    elif not is_balanced_rule(rule):
        ca_class = CAClass.TRIVIALLY_SEMI_REVERSIBLE
        expressions = (IrreversibilityExpression.segment(p.m),)
    else:
        tree = build_minimized(rule, max_nodes=max_nodes, stop_on_violation=True)
        if tree.stopped_at is not None:
            # a violation during construction proves irreversibility for the
            # whole tail n >= stop_horizon; the finitely many sizes below are
            # decided exactly on their own reachability trees
            ca_class = CAClass.TRIVIALLY_SEMI_REVERSIBLE
            horizon = tree.stop_horizon
            expressions, sporadic = normalize_expressions(
                [IrreversibilityExpression.segment(horizon)],
                [
                    n
                    for n in range(p.m, horizon)
                    if not reversible_for_n_by_tree(rule, n)
                ],
            )
            evidence = TreeEvidence(
                unique_nodes=tree.unique_nodes,
                height=tree.height,
                violating_nodes=(tree.unique_nodes - 1,),
                decided_at=tree.stopped_at,
            )
        else:
            violations = _scan(tree, rule)
            expressions, sporadic = normalize_expressions(
                [v.expression for v in violations if v.expression is not None],
                [v.sporadic_size for v in violations if v.sporadic_size is not None],
            )
            trigger_ids = [
                v.node_id
                for v in violations
                if (v.expression is not None and v.expression.is_segment)
                or v.sporadic_size is not None
            ]
            decided_at = (
                tree.creation_level[min(trigger_ids)] if trigger_ids else tree.height
            )
            evidence = TreeEvidence(
                unique_nodes=tree.unique_nodes,
                height=tree.height,
                violating_nodes=tuple(sorted({v.node_id for v in violations})),
                decided_at=decided_at,
            )
            if not expressions and not sporadic and all(small.values()):
                ca_class = CAClass.REVERSIBLE
            elif complement_is_finite(expressions, sporadic, p.m):
                ca_class = CAClass.TRIVIALLY_SEMI_REVERSIBLE
            else:
                ca_class = CAClass.NON_TRIVIALLY_SEMI_REVERSIBLE

    result = Classification(
        rule=rule,
        ca_class=ca_class,
        expressions=expressions,
        sporadic_irreversible=sporadic,
        small_n_reversible=small,
        evidence=evidence,
        verified_up_to=verified_up_to,
    )
    if verified_up_to >= 1:
        predicted = [is_reversible_for(result, n) for n in range(1, verified_up_to + 1)]
        oracle = reversible_by_pair_graph(rule, verified_up_to)
        if predicted != oracle:
            raise OracleMismatchError(rule, predicted, oracle)
    return result


def is_reversible_for(c: Classification, n: int) -> bool:
    """Membership query: is the CA reversible for lattice size n?"""
    if n < 1:
        raise ValueError(f"size must be >= 1, got {n}")
    if n < c.rule.params.m:
        return c.small_n_reversible[n]
    return not _covered(n, c.expressions, c.sporadic_irreversible)


def reversible_sizes(c: Classification, limit: int) -> list[int]:
    """All reversible sizes up to and including `limit`."""
    if limit < 1:
        raise ValueError(f"limit must be >= 1, got {limit}")
    return [n for n in range(1, limit + 1) if is_reversible_for(c, n)]


def expressions_text(c: Classification) -> str:
    if c.ca_class is CAClass.STRICTLY_IRREVERSIBLE:
        return "∀ n ∈ ℕ"
    parts = [str(e) for e in c.expressions]
    parts.extend(f"n = {s}" for s in c.sporadic_irreversible)
    return "; ".join(parts) if parts else "∅"


def classification_to_json(c: Classification) -> dict:
    p = c.rule.params
    return {
        "rule": str(c.rule),
        "d": p.d,
        "m": p.m,
        "decimal": wolfram_decimal(c.rule),
        "class": c.ca_class.value,
        "expressions": [
            {"residue": e.residue, "modulus": e.modulus, "min_n": e.min_n}
            for e in c.expressions
        ],
        "sporadic_irreversible": list(c.sporadic_irreversible),
        "small_n_reversible": {str(n): v for n, v in sorted(c.small_n_reversible.items())},
        "tree": (
            None
            if c.evidence is None
            else {"unique_nodes": c.evidence.unique_nodes, "height": c.evidence.height}
        ),
        "verified_up_to": c.verified_up_to,
    }
