"""Configurations, the finite global map under periodic boundary, and the
exhaustive bijectivity oracle.

Configurations are tuples of cell states on a ring of n cells; their decimal
code reads cell 0 as the most significant base-d digit.  All enumeration is
vectorized over the full configuration space, so the brute-force oracle stays
usable up to the configured limit (2^24 configurations by default).
"""

from __future__ import annotations

import numpy as np

from .rulespace import Rule

DEFAULT_BRUTE_LIMIT = 1 << 24

Configuration = tuple[int, ...]


def config_to_code(cells: Configuration, d: int) -> int:
    code = 0
    for s in cells:
        code = code * d + s
    return code


def config_from_code(code: int, n: int, d: int) -> Configuration:
    cells = []
    for _ in range(n):
        cells.append(code % d)
        code //= d
    return tuple(reversed(cells))


def parse_config(text: str, d: int) -> Configuration:
    cells = tuple(int(c) for c in text)
    if any(s >= d for s in cells):
        raise ValueError(f"configuration '{text}' has a cell state >= {d}")
    return cells


def rmt_sequence(cells: Configuration, rule: Rule) -> tuple[int, ...]:
    """RMT read by each cell: neighborhood indices wrap mod n (also for n < m)."""
    p = rule.params
    n = len(cells)
    out = []
    for i in range(n):
        r = 0
        for k in range(-p.l_r, p.r_r + 1):
            r = r * p.d + cells[(i + k) % n]
        out.append(r)
    return tuple(out)


def step(cells: Configuration, rule: Rule) -> Configuration:
    """Successor configuration under the global map."""
    return tuple(rule.table[r] for r in rmt_sequence(cells, rule))


def shift(cells: Configuration, k: int = 1) -> Configuration:
    """Cyclic left shift by k cells."""
    n = len(cells)
    k %= n
    return cells[k:] + cells[:k]


def _check_limit(rule: Rule, n: int, limit: int) -> int:
    total = rule.params.d**n
    if total > limit:
        raise ValueError(
            f"{rule.params.d}^{n} = {total} configurations exceed the limit {limit}"
        )
    return total


def successor_codes(rule: Rule, n: int, limit: int = DEFAULT_BRUTE_LIMIT) -> np.ndarray:
    """Vectorized successor code for every configuration code 0..d^n-1.

    Cell columns are materialized one at a time and the per-cell RMT is
    maintained as a rolling window, so memory stays at a few int64 arrays.
    """
    p = rule.params
    d = p.d
    total = _check_limit(rule, n, limit)
    codes = np.arange(total, dtype=np.int64)
    table = np.asarray(rule.table, dtype=np.int64)

    def column(j: int) -> np.ndarray:
        j %= n
        return (codes // d ** (n - 1 - j)) % d

    # RMT of cell 0: columns -l_r .. r_r
    rmt = np.zeros(total, dtype=np.int64)
    for k in range(-p.l_r, p.r_r + 1):
        rmt = rmt * d + column(k)
    width = p.node_width
    succ = table[rmt].copy()
    for i in range(1, n):
        rmt = (rmt % width) * d + column(i + p.r_r)
        succ = succ * d + table[rmt]
    return succ


def brute_force_reversible(rule: Rule, n: int, limit: int = DEFAULT_BRUTE_LIMIT) -> bool:
    """True iff the global map on all d^n configurations is injective.

    On a finite set of equal size, surjectivity and injectivity coincide, so a
    presence bitmap of the successor codes decides both at once.
    """
    total = _check_limit(rule, n, limit)
    succ = successor_codes(rule, n, limit)
    seen = np.zeros(total, dtype=bool)
    seen[succ] = True
    return bool(seen.all())


def predecessors(
    cells: Configuration, rule: Rule, limit: int = DEFAULT_BRUTE_LIMIT
) -> list[Configuration]:
    """All configurations that map to `cells`; empty iff `cells` is non-reachable."""
    n = len(cells)
    d = rule.params.d
    succ = successor_codes(rule, n, limit)
    target = config_to_code(cells, d)
    return [config_from_code(int(c), n, d) for c in np.nonzero(succ == target)[0]]


def reachable_codes(rule: Rule, n: int, limit: int = DEFAULT_BRUTE_LIMIT) -> set[int]:
    """Codes of all configurations with at least one predecessor."""
    return set(int(c) for c in np.unique(successor_codes(rule, n, limit)))


def export_transition_diagram(rule: Rule, n: int, limit: int = DEFAULT_BRUTE_LIMIT) -> str:
    """DOT digraph with one edge per configuration (decimal-coded) to its successor.

    Nodes and edges are emitted in ascending code order so output is stable
    for golden-file comparisons.
    """
    succ = successor_codes(rule, n, limit)
    lines = [f'digraph transitions {{']
    lines.append(f'    label="d={rule.params.d} m={rule.params.m} rule={rule} n={n}";')
    for code in range(len(succ)):
        lines.append(f"    {code} -> {int(succ[code])};")
    lines.append("}")
    return "\n".join(lines) + "\n"
