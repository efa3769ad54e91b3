"""Exact A(n, d) and A_Lin(n, d) at small n.

``max_code_size`` solves maximum clique in the graph on {0,1}^n joining
words at distance >= d.  Symmetry cuts the search: translate so that the
code contains 0 and a closest pair is (0, 1^w), then branch on the orbit
of a third codeword under the permutations fixing 1^w.  The clique search
is a bitset branch and bound with a greedy colouring bound (compiled with
numba).

``max_linear_code_size`` enumerates subspaces through reduced echelon
bases, tracking the set of vectors that can no longer be added.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numba as nb
import numpy as np

from .io import encode_scalar

DEFAULT_MAX_N = 9
DEFAULT_MAX_N_LINEAR = 14


class OracleCapError(ValueError):
    pass


@dataclass
class OracleResult:
    n: int
    d: int
    size: int
    witness: list[int]
    linear: bool = False
    nodes: int = 0
    elapsed: float = field(default=0.0, compare=False)

    def witness_strings(self) -> list[str]:
        return ["".join(str((w >> j) & 1) for j in range(self.n)) for w in self.witness]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "linear": self.linear,
            "size": encode_scalar(self.size),
            "witness": self.witness_strings(),
            "witness_kind": "basis" if self.linear else "codewords",
        }


# ---------------------------------------------------------------------------
# clique search


@nb.njit(cache=True)
def _popc(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return (x * np.uint64(0x0101010101010101)) >> np.uint64(56)


@nb.njit(cache=True)
def _lowbit(x):
    return _popc((x & (~x + np.uint64(1))) - np.uint64(1))


@nb.njit(cache=True)
def _max_clique(adj, N, lb):
    """Largest clique of size > lb; returns (size, members, nodes) or (lb, [], nodes)."""
    W = adj.shape[1]
    maxd = N + 2
    P = np.zeros((maxd, W), dtype=np.uint64)
    order = np.zeros((maxd, N), dtype=np.int64)
    cols = np.zeros((maxd, N), dtype=np.int64)
    pos = np.zeros(maxd, dtype=np.int64)
    cur = np.zeros(maxd, dtype=np.int64)
    best = lb
    bestset = np.zeros(N, dtype=np.int64)
    U = np.zeros(W, dtype=np.uint64)
    Q = np.zeros(W, dtype=np.uint64)
    for i in range(N):
        P[0, i >> 6] |= np.uint64(1) << np.uint64(i & 63)
    depth = 0
    need_color = True
    nodes = 0
    while depth >= 0:
        if need_color:
            nodes += 1
            for w in range(W):
                U[w] = P[depth, w]
            k = 0
            c = 0
            while True:
                empty = True
                for w in range(W):
                    if U[w] != 0:
                        empty = False
                        break
                if empty:
                    break
                k += 1
                for w in range(W):
                    Q[w] = U[w]
                for w in range(W):
                    while Q[w] != 0:
                        b = _lowbit(Q[w])
                        v = w * 64 + b
                        m = ~(np.uint64(1) << np.uint64(b))
                        Q[w] &= m
                        U[w] &= m
                        for w2 in range(W):
                            Q[w2] &= ~adj[v, w2]
                        order[depth, c] = v
                        cols[depth, c] = k
                        c += 1
            pos[depth] = c - 1
            need_color = False
        i = pos[depth]
        if i < 0 or depth + cols[depth, i] <= best:
            depth -= 1
            continue
        v = order[depth, i]
        pos[depth] = i - 1
        cur[depth] = v
        nonempty = False
        for w in range(W):
            x = P[depth, w] & adj[v, w]
            P[depth + 1, w] = x
            if x != 0:
                nonempty = True
        P[depth, v >> 6] &= ~(np.uint64(1) << np.uint64(v & 63))
        if nonempty:
            depth += 1
            need_color = True
        elif depth + 1 > best:
            best = depth + 1
            for j in range(depth + 1):
                bestset[j] = cur[j]
    if best == lb:
        return best, bestset[:0].copy(), nodes
    return best, bestset[:best].copy(), nodes


def _weights(x: np.ndarray) -> np.ndarray:
    return np.bitwise_count(x).astype(np.int64)


def _build(verts: np.ndarray, dist: int) -> tuple[np.ndarray, np.ndarray]:
    """Adjacency bit matrix (distance >= dist), vertices sorted by degree."""
    N = len(verts)
    W = (N + 63) // 64
    ok = _weights(verts[:, None] ^ verts[None, :]) >= dist
    np.fill_diagonal(ok, False)
    perm = np.argsort(-ok.sum(1), kind="stable")
    ok = ok[perm][:, perm]
    adj = np.zeros((N, W), dtype=np.uint64)
    for w in range(W):
        blk = ok[:, w * 64 : (w + 1) * 64].astype(np.uint64)
        shifts = np.arange(blk.shape[1], dtype=np.uint64)
        adj[:, w] = (blk << shifts[None, :]).sum(axis=1, dtype=np.uint64)
    return adj, verts[perm]


def is_code(words, d: int) -> bool:
    w = np.asarray(list(words), dtype=np.int64)
    if len(w) < 2:
        return True
    dist = _weights(w[:, None] ^ w[None, :])
    np.fill_diagonal(dist, d)
    return bool((dist >= d).all())


def max_code_size(n: int, d: int, max_n: int = DEFAULT_MAX_N) -> OracleResult:
    if not 1 <= d <= n:
        raise ValueError("need 1 <= d <= n")
    if n > max_n:
        raise OracleCapError(f"n = {n} exceeds the oracle cap {max_n}")
    t0 = time.perf_counter()
    if d == 1:
        return OracleResult(n, d, 1 << n, list(range(1 << n)), elapsed=time.perf_counter() - t0)
    allw = np.arange(1 << n, dtype=np.int64)
    wt = _weights(allw)
    best = [0, (1 << n) - 1]
    nodes = 0
    for w in range(d, n + 1):
        c = (1 << w) - 1
        base = allw[(wt >= w) & (_weights(allw ^ c) >= w) & (allw != c)]
        if len(base) == 0:
            continue
        inside, outside = _weights(base & c), _weights(base & ~c)
        key = inside * (n + 1) + outside
        types, counts = np.unique(key, return_counts=True)
        done = np.zeros(len(base), dtype=bool)
        for t in types[np.argsort(-counts, kind="stable")]:
            in_t = key == t
            rep = int(base[in_t][0])
            cand = ~done & (base != rep) & (_weights(base ^ rep) >= w)
            done |= in_t
            verts = base[cand]
            fixed = [0, c, rep]
            if len(verts) == 0:
                if len(best) < 3:
                    best = fixed
                continue
            lb = max(len(best) - 3, 0)
            adj, order = _build(verts, w)
            size, members, k = _max_clique(adj, len(verts), lb)
            nodes += int(k)
            if size > lb:
                best = fixed + [int(order[i]) for i in members]
    best = sorted(best)
    if not is_code(best, d):
        raise AssertionError("oracle witness fails the distance check")
    return OracleResult(n, d, len(best), best, nodes=nodes, elapsed=time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# linear codes


def span(basis) -> list[int]:
    out = [0]
    for b in basis:
        out += [x ^ b for x in out]
    return out


def is_linear_code(basis, d: int) -> bool:
    elems = span(basis)
    if len(set(elems)) != len(elems):
        return False
    return all(x.bit_count() >= d for x in elems if x)


def max_linear_code_size(n: int, d: int, max_n: int = DEFAULT_MAX_N_LINEAR) -> OracleResult:
    """Largest linear code, searched over reduced echelon bases.

    Each basis vector has a leading (highest) bit above those of earlier
    vectors and zeros at their leading positions, so every subspace is
    visited once.  ``blocked`` holds ``C + B(d - 1)``: adding ``v`` is legal
    iff ``v`` is not blocked, and then ``blocked |= blocked + v``.
    """
    if not 1 <= d <= n:
        raise ValueError("need 1 <= d <= n")
    if n > max_n:
        raise OracleCapError(f"n = {n} exceeds the linear oracle cap {max_n}")
    t0 = time.perf_counter()
    if d == 1:
        basis = [1 << j for j in range(n)]
        return OracleResult(n, d, 1 << n, basis, True, elapsed=time.perf_counter() - t0)
    idx = np.arange(1 << n, dtype=np.int64)
    blocked0 = _weights(idx) <= d - 1
    best: list[int] = []
    nodes = 0

    def dfs(basis: list[int], blocked: np.ndarray, last: int, pivmask: int):
        nonlocal best, nodes
        nodes += 1
        if len(basis) > len(best):
            best = list(basis)
        k = len(basis)
        free = int((~blocked).sum())
        # the next j vectors add 2^k (2^j - 1) new, unblocked elements
        reach = k
        while reach - k < n - 1 - last and (1 << k) * ((1 << (reach - k + 1)) - 1) <= free:
            reach += 1
        if reach <= len(best):
            return
        for p in range(last + 1, n):
            lo, hi = 1 << p, 1 << (p + 1)
            cands = idx[lo:hi]
            cands = cands[~blocked[lo:hi] & ((cands & pivmask) == 0)]
            for v in cands:
                v = int(v)
                dfs(basis + [v], blocked | blocked[idx ^ v], p, pivmask | (1 << p))
                if len(best) >= reach:
                    return

    dfs([], blocked0, -1, 0)
    if not is_linear_code(best, d):
        raise AssertionError("linear oracle witness fails the distance check")
    return OracleResult(n, d, 1 << len(best), best, True, nodes, time.perf_counter() - t0)
