"""Independent brute-force oracles used only by the tests.

The modified-distance oracle searches over the literal operator set: delete
an element, add an element anywhere, or shift an element to a neighbouring
position, each at cost 1. Breadth-first search gives the exact minimum, so
it is independent of the dynamic program it certifies.
"""

from collections import deque
from functools import lru_cache
from itertools import product


def bfs_modified_distance(a, b, alphabet):
    """Exact operator-set distance between two sequences via BFS."""
    a, b = tuple(a), tuple(b)
    if a == b:
        return 0
    limit = len(a) + len(b)  # delete-all-then-add-all upper bound
    # no optimal path needs intermediate length above (len(a)+len(b)+limit)/2
    cap = (len(a) + len(b) + limit) // 2
    seen = {a}
    queue = deque([(a, 0)])
    while queue:
        state, d = queue.popleft()
        if d >= limit:
            continue
        for nxt in _successors(state, alphabet, cap):
            if nxt == b:
                return d + 1
            if nxt not in seen:
                seen.add(nxt)
                queue.append((nxt, d + 1))
    raise AssertionError("BFS exhausted without reaching the target")


def _successors(state, alphabet, cap):
    n = len(state)
    for i in range(n):
        yield state[:i] + state[i + 1 :]
    if n < cap:
        for i in range(n + 1):
            for t in alphabet:
                yield state[:i] + (t,) + state[i:]
    for i in range(n - 1):
        yield state[:i] + (state[i + 1], state[i]) + state[i + 2 :]


def all_pairs_bfs(alphabet, max_len):
    """Distances between all sequence pairs over the alphabet up to max_len.

    One BFS per relabeling-canonical source covers every target at once;
    distances are invariant under permuting the alphabet, so a non-canonical
    source reads its row through the relabeling map.
    """
    alphabet = tuple(alphabet)
    seqs = [tuple(p) for n in range(max_len + 1) for p in product(alphabet, repeat=n)]
    target_set = set(seqs)
    cap = 2 * max_len
    rows = {}

    def bfs_row(source):
        found = {source: 0}
        seen = {source}
        queue = deque([(source, 0)])
        limit = len(source) + max_len
        while queue and len(found) < len(seqs):
            state, d = queue.popleft()
            if d >= limit:
                continue
            for nxt in _successors(state, alphabet, cap):
                if nxt not in seen:
                    seen.add(nxt)
                    if nxt in target_set and nxt not in found:
                        found[nxt] = d + 1
                    queue.append((nxt, d + 1))
        return found

    out = {}
    for a in seqs:
        relabel = {}
        for t in a + alphabet:
            if t not in relabel:
                relabel[t] = alphabet[len(relabel)]
        canonical = tuple(relabel[t] for t in a)
        if canonical not in rows:
            rows[canonical] = bfs_row(canonical)
        row = rows[canonical]
        for b in seqs:
            out[(a, b)] = row[tuple(relabel[t] for t in b)]
    return out


@lru_cache(maxsize=None)
def _lev_rec(a, b):
    if not a:
        return len(b)
    if not b:
        return len(a)
    return min(
        _lev_rec(a[1:], b) + 1,
        _lev_rec(a, b[1:]) + 1,
        _lev_rec(a[1:], b[1:]) + (a[0] != b[0]),
    )


def recursive_levenshtein(a, b):
    """Plain recursive definition of the classic distance."""
    return _lev_rec(tuple(a), tuple(b))
