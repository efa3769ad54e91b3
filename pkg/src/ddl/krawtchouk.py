"""Krawtchouk polynomials and the column-profile (symmetrized) engine.

Univariate part: exact integer tables, rational evaluation, first-root
brackets by exact sign tests, and the Christoffel-Darboux kernel.

Multivariate part: functions on ``l x n`` matrices that are invariant under
column permutations depend only on the *profile* of ``X``, the vector
``alpha`` counting how many columns equal each type ``v`` in ``{0,1}^l``
(bit ``i`` of a type is the row-``i`` entry).  ``ProfileSpace`` enumerates
profiles, maps dense indices to profiles, applies the ``A^u`` operators
and computes the Fourier transform of symmetric functions without ever
touching the ``2^(l n)`` dense domain.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from math import comb, factorial, gcd
from typing import Callable, Sequence

import numpy as np

from .cube import EXACT, FLOAT, FOURIER, PRIMAL, CubeMatrix, DenseCapError, ValueTable, _as_int_objects, _reduce, _to_fraction, check_dense

# the profile transform stores a size x size integer matrix
PROFILE_TRANSFORM_CAP = 8192


# ---------------------------------------------------------------------------
# univariate


@dataclass(frozen=True)
class KrawtchoukTable:
    """``K[i][j]`` is ``K_i(j)`` as an exact integer, ``0 <= i, j <= n``."""

    n: int
    K: tuple[tuple[int, ...], ...]

    def __call__(self, i: int, j: int) -> int:
        return self.K[i][j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.K[i]


@lru_cache(maxsize=64)
def build_table(n: int) -> KrawtchoukTable:
    if n < 1:
        raise ValueError("n must be >= 1")
    rows = [[1] * (n + 1), [n - 2 * j for j in range(n + 1)]]
    for i in range(1, n):
        prev, cur = rows[i - 1], rows[i]
        nxt = []
        for j in range(n + 1):
            num = (n - 2 * j) * cur[j] - (n - i + 1) * prev[j]
            q, rem = divmod(num, i + 1)
            assert rem == 0
            nxt.append(q)
        rows.append(nxt)
    return KrawtchoukTable(n, tuple(tuple(r) for r in rows[: n + 1]))


def eval_all(n: int, s, upto: int | None = None) -> list[Fraction]:
    """``[K_0(s), ..., K_upto(s)]`` in exact arithmetic."""
    upto = n if upto is None else upto
    s = _to_fraction(s)
    vals = [Fraction(1), n - 2 * s]
    for i in range(1, upto):
        vals.append(((n - 2 * s) * vals[i] - (n - i + 1) * vals[i - 1]) / (i + 1))
    return vals[: upto + 1]


def eval_rational(n: int, i: int, s) -> Fraction:
    if not 0 <= i <= n:
        raise ValueError(f"index {i} outside 0..{n}")
    return eval_all(n, s, i)[i]


def _sign_at(n: int, i: int, s: Fraction) -> int:
    """Sign of ``K_i(s)`` using integer arithmetic only.

    With ``s = p/q``, ``q^i i! K_i(s)`` satisfies an integer recurrence, so
    its sign is the sign of ``K_i(s)``.
    """
    p, q = s.numerator, s.denominator
    # P_k = q^k k! K_k(p/q)
    a, b = 1, n * q - 2 * p
    if i == 0:
        return 1
    for k in range(1, i):
        a, b = b, (n * q - 2 * p) * b - (n - k + 1) * k * q * q * a
    return (b > 0) - (b < 0)


@dataclass(frozen=True)
class RootBracket:
    """``K_i(lo) > 0 >= K_i(hi)`` with the first root of ``K_i`` inside."""

    i: int
    lo: Fraction
    hi: Fraction

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo


def default_width(n: int) -> Fraction:
    return Fraction(n, 1 << 20)


def _bisect(n: int, i: int, lo: Fraction, hi: Fraction, width: Fraction) -> RootBracket:
    while hi - lo > width:
        mid = (lo + hi) / 2
        if _sign_at(n, i, mid) > 0:
            lo = mid
        else:
            hi = mid
    return RootBracket(i, lo, hi)


def first_root(n: int, i: int, width=None) -> RootBracket:
    """Bracket the smallest root ``z_{1,i}`` of ``K_i``.

    Smallest roots decrease strictly in ``i`` and ``K_i`` changes sign
    exactly once on ``[0, z_{1,i-1}]``, so each bracket is found inside the
    previous one by bisection on exact sign tests.
    """
    if not 1 <= i <= n:
        raise ValueError(f"index {i} outside 1..{n}")
    width = default_width(n) if width is None else _to_fraction(width)
    if width <= 0:
        raise ValueError("width must be positive")
    half = Fraction(n, 2)
    prev = RootBracket(1, half - width / 2, half + width / 2)
    for k in range(2, i + 1):
        lo, hi = prev.lo, prev.hi
        if _sign_at(n, k, lo) <= 0:
            prev = _bisect(n, k, Fraction(0), lo, width)
            continue
        # z_{1,k} lies in (lo, z_{1,k-1}); tighten the previous bracket until
        # K_k is nonpositive at its right end
        km1 = k - 1
        while _sign_at(n, k, hi) > 0:
            mid = (lo + hi) / 2
            if _sign_at(n, km1, mid) > 0:
                lo = mid
            else:
                hi = mid
            if _sign_at(n, k, lo) <= 0:
                hi = lo
                lo = Fraction(0)
                break
        prev = _bisect(n, k, lo, hi, width)
    return prev


def cd_kernel(n: int, r: int, s, j: int) -> Fraction:
    """``sum_{i <= r} K_i(s) K_i(j) / C(n, i)``."""
    if not 0 <= r <= n or not 0 <= j <= n:
        raise ValueError("need 0 <= r, j <= n")
    tab = build_table(n)
    ks = eval_all(n, s, r)
    return sum((ks[i] * tab.K[i][j] / comb(n, i) for i in range(r + 1)), Fraction(0))


# ---------------------------------------------------------------------------
# profiles


def profile(X: CubeMatrix) -> tuple[int, ...]:
    """Column-type counts of ``X``."""
    counts = [0] * (1 << X.ell)
    for j in range(X.n):
        counts[X.column_type(j)] += 1
    return tuple(counts)


def _compositions(n: int, parts: int):
    if parts == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, parts - 1):
            yield (first,) + rest


class ProfileSpace:
    """All profiles of ``l x n`` matrices, in lexicographic order."""

    def __init__(self, ell: int, n: int):
        if ell < 1 or n < 1:
            raise ValueError("need ell >= 1 and n >= 1")
        self.ell = ell
        self.n = n
        self.T = 1 << ell
        self.profiles: list[tuple[int, ...]] = list(_compositions(n, self.T))
        self.size = len(self.profiles)
        self.array = np.asarray(self.profiles, dtype=np.int64)

    def rank(self, alpha: Sequence[int]) -> int:
        """Lexicographic rank, computed combinatorially."""
        if len(alpha) != self.T or sum(alpha) != self.n or min(alpha) < 0:
            raise ValueError(f"not a profile of ({self.ell}, {self.n}): {alpha}")
        r = 0
        left = self.n
        for k in range(self.T - 1):
            rest = self.T - k - 1
            for c in range(alpha[k]):
                r += comb(left - c + rest - 1, rest - 1)
            left -= alpha[k]
        return r

    def zero_index(self) -> int:
        return self.rank((self.n,) + (0,) * (self.T - 1))

    @cached_property
    def multinomials(self) -> np.ndarray:
        """Number of matrices with each profile."""
        fn = factorial(self.n)
        out = np.empty(self.size, dtype=object)
        for k, a in enumerate(self.profiles):
            m = fn
            for c in a:
                m //= factorial(c)
            out[k] = m
        return out

    def row_weights(self, i: int) -> np.ndarray:
        mask = np.array([(v >> i) & 1 for v in range(self.T)], dtype=np.int64)
        return self.array @ mask

    def span_weights(self, u: int) -> np.ndarray:
        """``|u^T X|`` as a function of the profile."""
        mask = np.array([(u & v).bit_count() & 1 for v in range(self.T)], dtype=np.int64)
        return self.array @ mask

    @cached_property
    def _keys(self) -> tuple[np.ndarray, np.ndarray]:
        radix = (self.n + 1) ** np.arange(self.T, dtype=np.int64)
        keys = self.array @ radix
        order = np.argsort(keys)
        return keys[order], order

    def _ranks_of(self, arr: np.ndarray) -> np.ndarray:
        radix = (self.n + 1) ** np.arange(self.T, dtype=np.int64)
        skeys, order = self._keys
        pos = np.searchsorted(skeys, arr @ radix)
        return order[pos]

    @cached_property
    def shift(self) -> np.ndarray:
        """``shift[v, w, k]``: rank of ``alpha_k - e_v + e_w`` or -1."""
        out = np.full((self.T, self.T, self.size), -1, dtype=np.int64)
        eye = np.eye(self.T, dtype=np.int64)
        for v in range(self.T):
            ok = self.array[:, v] > 0
            for w in range(self.T):
                moved = self.array[ok] - eye[v] + eye[w]
                out[v, w, ok] = self._ranks_of(moved)
        return out

    def dense_index_map(self, dense_cap: int | None = None) -> np.ndarray:
        """Profile rank of every flattened matrix index."""
        N = self.ell * self.n
        check_dense(N, FLOAT, dense_cap)
        idx = np.arange(1 << N, dtype=np.int64)
        counts = np.zeros((1 << N, self.T), dtype=np.int64)
        for j in range(self.n):
            t = np.zeros_like(idx)
            for i in range(self.ell):
                t |= ((idx >> (i * self.n + j)) & 1) << i
            counts[idx, t] += 1
        return self._ranks_of(counts)

    @cached_property
    def krawtchouk_matrix(self) -> np.ndarray:
        """``KM[b, a] = sum over Y with profile a of (-1)^<X, Y>``, ``X`` of profile ``b``.

        Built column by column: peel one column of type ``v`` off ``X`` and
        sum over the type ``w`` of the matching column of ``Y``.
        """
        if self.size > PROFILE_TRANSFORM_CAP:
            raise DenseCapError(
                f"profile transform over {self.size} profiles exceeds the cap {PROFILE_TRANSFORM_CAP}"
            )
        if self.ell * self.n > 62:
            raise DenseCapError("profile transform entries would overflow 64-bit integers")
        T = self.T
        chi = np.array([[1 - 2 * ((v & w).bit_count() & 1) for w in range(T)] for v in range(T)], dtype=np.int64)
        prev_space = None
        KM = np.ones((1, 1), dtype=np.int64)  # n = 0: single empty profile
        for m in range(1, self.n + 1):
            space = ProfileSpace(self.ell, m) if m < self.n else self
            prev_ranks = prev_space._ranks_of if prev_space is not None else (lambda a: np.zeros(len(a), dtype=np.int64))
            eye = np.eye(T, dtype=np.int64)
            new = np.zeros((space.size, space.size), dtype=np.int64)
            arr = space.array
            # for every alpha and w with alpha_w > 0, rank of alpha - e_w in the smaller space
            down = np.full((T, space.size), -1, dtype=np.int64)
            for w in range(T):
                ok = arr[:, w] > 0
                down[w, ok] = prev_ranks(arr[ok] - eye[w])
            for b in range(space.size):
                v = int(np.argmax(arr[b] > 0))
                pb = int(prev_ranks((arr[b] - eye[v])[None, :])[0])
                row = np.zeros(space.size, dtype=np.int64)
                for w in range(T):
                    ok = down[w] >= 0
                    row[ok] += chi[v, w] * KM[pb, down[w, ok]]
                new[b] = row
            KM = new
            prev_space = space
        return KM


@dataclass(frozen=True, eq=False)
class ProfileTable:
    """A column-symmetric function stored by profile, with a side tag."""

    space: ProfileSpace
    data: np.ndarray
    mode: str = EXACT
    side: str = PRIMAL
    den: int = 1

    def __post_init__(self):
        if len(self.data) != self.space.size:
            raise ValueError("one value per profile required")

    @classmethod
    def from_values(cls, space: ProfileSpace, values, mode: str = EXACT, side: str = PRIMAL) -> "ProfileTable":
        vals = list(values)
        if mode == FLOAT:
            return cls(space, np.asarray([float(v) for v in vals]), FLOAT, side)
        fr = [_to_fraction(v) for v in vals]
        den = 1
        for f in fr:
            den = den * f.denominator // gcd(den, f.denominator)
        num, den = _reduce(_as_int_objects([f.numerator * (den // f.denominator) for f in fr]), den)
        return cls(space, num, EXACT, side, den)

    @classmethod
    def from_function(cls, space: ProfileSpace, fn: Callable[[tuple[int, ...]], object], mode: str = EXACT, side: str = PRIMAL) -> "ProfileTable":
        return cls.from_values(space, (fn(a) for a in space.profiles), mode, side)

    def __getitem__(self, k):
        if isinstance(k, tuple):
            k = self.space.rank(k)
        if self.mode == FLOAT:
            return float(self.data[k])
        return Fraction(self.data[k], self.den)

    def to_fractions(self) -> list[Fraction]:
        if self.mode == FLOAT:
            return [Fraction(float(v)) for v in self.data]
        return [Fraction(v, self.den) for v in self.data]

    def to_float(self) -> np.ndarray:
        if self.mode == FLOAT:
            return self.data.copy()
        return np.asarray([float(Fraction(v, self.den)) for v in self.data])

    def signs(self) -> np.ndarray:
        if self.mode == FLOAT:
            return np.sign(self.data).astype(np.int64)
        return np.fromiter((0 if v == 0 else (1 if v > 0 else -1) for v in self.data), np.int64, len(self.data))

    def max_abs(self):
        if self.mode == FLOAT:
            return float(np.max(np.abs(self.data)))
        return Fraction(max(abs(v) for v in self.data), self.den)

    def _wrap(self, data, den) -> "ProfileTable":
        if self.mode == FLOAT:
            return ProfileTable(self.space, data, FLOAT, self.side)
        num, den = _reduce(data, den)
        return ProfileTable(self.space, num, EXACT, self.side, den)

    def __mul__(self, other) -> "ProfileTable":
        if isinstance(other, ProfileTable):
            if other.space is not self.space and other.space.profiles != self.space.profiles:
                raise ValueError("profile spaces differ")
            if other.mode != self.mode or other.side != self.side:
                raise ValueError("mode or side mismatch")
            return self._wrap(self.data * other.data, self.den * other.den)
        if self.mode == FLOAT:
            return self._wrap(self.data * float(other), 1)
        c = _to_fraction(other)
        return self._wrap(self.data * c.numerator, self.den * c.denominator)

    __rmul__ = __mul__

    def __add__(self, other: "ProfileTable") -> "ProfileTable":
        if other.mode != self.mode or other.side != self.side:
            raise ValueError("mode or side mismatch")
        if self.mode == FLOAT:
            return self._wrap(self.data + other.data, 1)
        den = self.den * other.den // gcd(self.den, other.den)
        return self._wrap(self.data * (den // self.den) + other.data * (den // other.den), den)

    def __neg__(self) -> "ProfileTable":
        return ProfileTable(self.space, -self.data, self.mode, self.side, self.den)

    def __sub__(self, other: "ProfileTable") -> "ProfileTable":
        return self + (-other)

    def to_dense(self, dense_cap: int | None = None) -> ValueTable:
        N = self.space.ell * self.space.n
        check_dense(N, self.mode, dense_cap)
        data = self.data[self.space.dense_index_map(dense_cap=N)]
        return ValueTable(N, data, self.mode, self.side, self.den)


def profile_fourier(f: ProfileTable) -> ProfileTable:
    """Fourier transform of a column-symmetric function, by profile."""
    sp = f.space
    N = sp.ell * sp.n
    side = FOURIER if f.side == PRIMAL else PRIMAL
    KM = sp.krawtchouk_matrix
    if f.mode == FLOAT:
        return ProfileTable(sp, (KM.astype(np.float64) @ f.data) / float(1 << N), FLOAT, side)
    out = KM.astype(object).dot(f.data)
    num, den = _reduce(out, f.den << N)
    return ProfileTable(sp, num, EXACT, side, den)


def profile_sum(f: ProfileTable):
    """``sum_X f(X)`` over all ``2^(l n)`` matrices."""
    m = f.space.multinomials
    if f.mode == FLOAT:
        return float(np.dot(m.astype(np.float64), f.data))
    return Fraction(int(np.dot(m, f.data)), f.den)


def apply_au_symmetric(f: ProfileTable | Sequence, u: int, space: ProfileSpace | None = None) -> ProfileTable:
    """``(A^u f)(alpha) = sum_v alpha_v f(alpha - e_v + e_{u+v})``."""
    if not isinstance(f, ProfileTable):
        if space is None:
            raise ValueError("a profile space is needed for raw values")
        f = ProfileTable.from_values(space, f)
    sp = f.space
    if u == 0 or not 0 < u < sp.T:
        raise ValueError(f"u must be a nonzero type in 1..{sp.T - 1}")
    zero = 0.0 if f.mode == FLOAT else 0
    out = np.full(sp.size, zero, dtype=f.data.dtype)
    for v in range(sp.T):
        tgt = sp.shift[v, u ^ v]
        ok = tgt >= 0
        out[ok] = out[ok] + sp.array[ok, v] * f.data[tgt[ok]]
    return ProfileTable(sp, out, f.mode, f.side, f.den) if f.mode == FLOAT else f._wrap(out, f.den)
