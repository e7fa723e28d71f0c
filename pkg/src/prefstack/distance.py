"""Edit distances over token sequences.

Tokens only need equality and hashability: they may be plain strings or
secondary-action sets (compared by set equality). Two metrics:

- levenshtein: classic unit-cost insert/delete/substitute.
- modified_levenshtein: unit-cost add and delete plus a unit-cost adjacent
  shift of one element; no unit substitution (replacing an element costs 2
  via delete+add). Computed with the adjacent-transposition dynamic program
  that also admits priced gaps inside a shifted pair, which matches a
  brute-force search over the operator set exactly (the plain "restricted"
  transposition recurrence does not: it overprices e.g. [C,A] -> [A,B,C],
  which is a shift plus an add).

Swapped neighbours therefore end up closer (distance 1) than positions
holding two genuinely different elements (distance 2).
"""

from __future__ import annotations

from collections.abc import Hashable, Sequence

import numpy as np

from .errors import MalformedMatrix

Token = Hashable

METRICS = ("lev", "mod")


def levenshtein(a: Sequence[Token], b: Sequence[Token]) -> int:
    """Minimum unit-cost insert/delete/substitute edits turning a into b."""
    la, lb = len(a), len(b)
    if la == 0:
        return lb
    if lb == 0:
        return la
    prev = list(range(lb + 1))
    cur = [0] * (lb + 1)
    for i in range(1, la + 1):
        cur[0] = i
        ai = a[i - 1]
        for j in range(1, lb + 1):
            cost = 0 if ai == b[j - 1] else 1
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost)
        prev, cur = cur, prev
    return prev[lb]


def modified_levenshtein(a: Sequence[Token], b: Sequence[Token]) -> int:
    """Minimum cost over add(1), delete(1) and adjacent shift(1); substitute costs 2."""
    la, lb = len(a), len(b)
    if la == 0:
        return lb
    if lb == 0:
        return la
    maxdist = la + lb
    # H has a sentinel row/column of maxdist guarding the transposition term.
    H = [[0] * (lb + 2) for _ in range(la + 2)]
    H[0][0] = maxdist
    for i in range(la + 1):
        H[i + 1][0] = maxdist
        H[i + 1][1] = i
    for j in range(lb + 1):
        H[0][j + 1] = maxdist
        H[1][j + 1] = j
    last_row: dict[Token, int] = {}
    for i in range(1, la + 1):
        ai = a[i - 1]
        last_col = 0
        for j in range(1, lb + 1):
            bj = b[j - 1]
            k = last_row.get(bj, 0)
            l = last_col
            if ai == bj:
                cost = 0
                last_col = j
            else:
                cost = 2
            H[i + 1][j + 1] = min(
                H[i][j] + cost,          # match or delete+add in place
                H[i + 1][j] + 1,         # add
                H[i][j + 1] + 1,         # delete
                # shift ai and the last seen bj past (i-k-1) deletions and
                # (j-l-1) additions sitting between them
                H[k][l] + (i - k - 1) + 1 + (j - l - 1),
            )
        last_row[ai] = i
    return H[la + 1][lb + 1]


_METRIC_FNS = {"lev": levenshtein, "mod": modified_levenshtein}


def distance_matrix(seqs: Sequence[Sequence[Token]], metric: str = "mod") -> np.ndarray:
    """Symmetric integer matrix of pairwise distances; diagonal zero."""
    if metric not in _METRIC_FNS:
        raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")
    if not len(seqs):
        raise ValueError("need at least one sequence")
    fn = _METRIC_FNS[metric]
    n = len(seqs)
    out = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(i + 1, n):
            d = fn(seqs[i], seqs[j])
            out[i, j] = d
            out[j, i] = d
    return out


def matrix_to_csv(matrix: np.ndarray, labels: Sequence[str] | None = None) -> str:
    """Debug rendering of a distance matrix with optional row/column labels."""
    m = np.asarray(matrix)
    n = m.shape[0]
    names = list(labels) if labels is not None else [str(i) for i in range(n)]
    lines = ["," + ",".join(names)]
    for i in range(n):
        lines.append(names[i] + "," + ",".join(str(int(m[i, j])) for j in range(n)))
    return "\n".join(lines) + "\n"


def check_matrix(matrix: np.ndarray) -> np.ndarray:
    """Validate a precomputed distance matrix; returns it as float array."""
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise MalformedMatrix(f"matrix must be square, got shape {m.shape}")
    if (m < 0).any():
        raise MalformedMatrix("matrix has negative entries")
    if not np.array_equal(m, m.T):
        raise MalformedMatrix("matrix is not symmetric")
    if np.diagonal(m).any():
        raise MalformedMatrix("matrix diagonal must be zero")
    return m
