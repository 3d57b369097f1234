"""de Bruijn graph of a rule and the pair-graph reversibility oracle.

The graph has the d^(m-1) words of length m-1 as nodes and one edge per RMT
(the word overlap a·x -> x·b carries RMT axb and its output).  Cycles of
length n correspond one-to-one with the RMT sequences of n-cell
configurations, so counting closed walk *pairs* with equal outputs decides
injectivity of the global map: trace(M^n) counts pairs (x, y) with
G_n(x) = G_n(y), and equals d^n exactly when only the diagonal pairs remain.

All matrix arithmetic is exact.  A numpy int64 fast path is used while a
proven magnitude bound rules out overflow; otherwise multiplication falls
back to Python big integers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rulespace import Rule

_INT64_SAFE = 1 << 62


@dataclass(frozen=True)
class DeBruijnEdge:
    src: int
    dst: int
    rmt: int
    output: int


@dataclass(frozen=True)
class DeBruijnGraph:
    rule: Rule
    edges: tuple[DeBruijnEdge, ...]

    @property
    def node_count(self) -> int:
        return self.rule.params.node_width

    def node_word(self, node: int) -> str:
        p = self.rule.params
        digits = []
        for _ in range(p.m - 1):
            digits.append(str(node % p.d))
            node //= p.d
        return "".join(reversed(digits))


def build_graph(rule: Rule) -> DeBruijnGraph:
    """Graph with edge r: (r div d) -> (r mod d^(m-1)), labeled r / R[r]."""
    width = rule.params.node_width
    edges = tuple(
        DeBruijnEdge(src=r // rule.params.d, dst=r % width, rmt=r, output=rule.table[r])
        for r in range(rule.params.table_size)
    )
    return DeBruijnGraph(rule, edges)


def export_debruijn_dot(graph: DeBruijnGraph) -> str:
    """DOT text with nodes labeled by their word and edges by "rmt/output"."""
    lines = ["digraph debruijn {"]
    for node in range(graph.node_count):
        lines.append(f'    {node} [label="{graph.node_word(node)}"];')
    for e in graph.edges:  # ascending RMT order
        lines.append(f'    {e.src} -> {e.dst} [label="{e.rmt}/{e.output}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


_FLOAT_SAFE = 1 << 53  # float64 arithmetic on integers is exact below this


class ExactMatrix:
    """Square matrix of non-negative integers with exact multiplication.

    Small entries are multiplied as float64 (BLAS; exact while every partial
    sum stays below 2^53), midsize entries as int64, and anything bigger as
    Python big integers.  All three tiers compute the same exact values.
    """

    __slots__ = ("dim", "_array", "_rows", "_max")

    def __init__(self, data):
        if isinstance(data, np.ndarray):
            self._array = data
            self._rows = None
            self.dim = data.shape[0]
            self._max = int(data.max()) if data.size else 0
        else:
            self._array = None
            self._rows = data
            self.dim = len(data)
            self._max = max(max(row) for row in data) if data else 0

    @classmethod
    def identity(cls, dim: int) -> "ExactMatrix":
        return cls(np.eye(dim, dtype=np.float64))

    @property
    def rows(self) -> list[list[int]]:
        if self._rows is None:
            self._rows = [[int(v) for v in row] for row in self._array]
        return self._rows

    def max_entry(self) -> int:
        return self._max

    def trace(self) -> int:
        if self._array is not None:
            # sum in int64: a float64 sum of many near-2^53 entries may round
            return int(np.trace(self._array.astype(np.int64)))
        return sum(self._rows[i][i] for i in range(self.dim))

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        bound = self.max_entry() * other.max_entry() * self.dim
        if self._array is not None and other._array is not None:
            if bound < _FLOAT_SAFE:
                a = self._array.astype(np.float64, copy=False)
                b = other._array.astype(np.float64, copy=False)
                return ExactMatrix(a @ b)
            if bound < _INT64_SAFE:
                a = self._array.astype(np.int64, copy=False)
                b = other._array.astype(np.int64, copy=False)
                return ExactMatrix(a @ b)
        cols = list(zip(*other.rows))
        return ExactMatrix(
            [[sum(x * y for x, y in zip(row, col)) for col in cols] for row in self.rows]
        )


def pair_matrix(rule: Rule) -> ExactMatrix:
    """Transfer matrix over node pairs; entry counts RMT pairs with equal output."""
    width = rule.params.node_width
    d = rule.params.d
    dim = width * width
    table = np.asarray(rule.table)
    matrix = np.zeros((dim, dim), dtype=np.float64)
    for x in range(d):
        (group,) = np.nonzero(table == x)
        src = (group // d)[:, None] * width + (group // d)[None, :]
        dst = (group % width)[:, None] * width + (group % width)[None, :]
        np.add.at(matrix, (src.ravel(), dst.ravel()), 1)
    return ExactMatrix(matrix)


def matrix_power(matrix: ExactMatrix, n: int) -> ExactMatrix:
    """n-th power by repeated squaring."""
    if n < 0:
        raise ValueError("negative power")
    result = ExactMatrix.identity(matrix.dim)
    base = matrix
    while n:
        if n & 1:
            result = result @ base
        n >>= 1
        if n:
            base = base @ base
    return result


def pair_trace_oracle(rule: Rule, n: int) -> bool:
    """True iff the CA is reversible for size n, decided by trace(M^n) = d^n."""
    if n < 1:
        raise ValueError(f"size must be >= 1, got {n}")
    m = matrix_power(pair_matrix(rule), n)
    return m.trace() == rule.params.d**n


def pair_traces_up_to(rule: Rule, upto: int) -> list[int]:
    """trace(M^n) for n = 1..upto via incremental powers (one multiply per n)."""
    matrix = pair_matrix(rule)
    traces = []
    power = matrix
    for n in range(1, upto + 1):
        if n > 1:
            power = power @ matrix
        traces.append(power.trace())
    return traces


def reversible_by_pair_graph(rule: Rule, upto: int) -> list[bool]:
    """Reversibility verdicts for n = 1..upto from the pair-graph traces."""
    d = rule.params.d
    return [t == d ** (i + 1) for i, t in enumerate(pair_traces_up_to(rule, upto))]
