"""Hypercube points, dense function tables and the Walsh-Hadamard engine.

Normalisation follows the usual convention for Delsarte-type LPs:

* primal side: ``<f, g> = 2^-N sum f g`` and ``(f * g)(x) = 2^-N sum_y f(y) g(x + y)``;
* Fourier side: ``f^(x) = <f, chi_x>``, with inner product and convolution
  taken *without* normalisation.

So ``2^N * fourier(fourier(f)) == f``, ``fourier(f * g) == f^ . g^`` and
``fourier(f . g) == f^ *_F g^``.

An ``l x n`` matrix ``X`` is identified with a point of ``{0,1}^(l n)`` by
row-major flattening: row ``i`` occupies bits ``[i n, (i + 1) n)`` of the
table index and coordinate ``j`` of a row is bit ``j``.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from numbers import Rational
from typing import Callable, Iterable, Sequence

import numpy as np

EXACT = "exact"
FLOAT = "float"
PRIMAL = "primal"
FOURIER = "fourier"

DEFAULT_DENSE_CAP = {FLOAT: 26, EXACT: 20}
DENSE_CAP_ENV = "DDL_DENSE_CAP"


class DenseCapError(ValueError):
    """Raised when a dense table over ``2^N`` points would exceed the cap."""


class TableMismatchError(ValueError):
    """Raised when two tables disagree on side, mode or dimension."""


def dense_cap(mode: str, override: int | None = None) -> int:
    if override is not None:
        return int(override)
    env = os.environ.get(DENSE_CAP_ENV)
    if env:
        return int(env)
    return DEFAULT_DENSE_CAP[mode]


def check_dense(dim: int, mode: str, override: int | None = None) -> None:
    cap = dense_cap(mode, override)
    if dim > cap:
        raise DenseCapError(
            f"dense table over 2^{dim} points exceeds the {mode} cap 2^{cap}; "
            "use the profile-domain engine or raise the cap"
        )


def popcount(a: np.ndarray | int) -> np.ndarray | int:
    if isinstance(a, (int, np.integer)):
        return int(a).bit_count()
    return np.bitwise_count(np.asarray(a, dtype=np.int64)).astype(np.int64)


# ---------------------------------------------------------------------------
# points and matrices


@dataclass(frozen=True)
class CubePoint:
    """A point of ``{0,1}^n`` stored as an int (coordinate ``j`` is bit ``j``)."""

    bits: int
    n: int

    def __post_init__(self):
        if self.n < 0 or self.bits < 0 or self.bits >> self.n:
            raise ValueError(f"bits {self.bits:#x} do not fit in length {self.n}")

    @classmethod
    def from_str(cls, s: str) -> "CubePoint":
        s = s.strip()
        if set(s) - {"0", "1"}:
            raise ValueError(f"not a binary string: {s!r}")
        return cls(sum(1 << j for j, ch in enumerate(s) if ch == "1"), len(s))

    @classmethod
    def zero(cls, n: int) -> "CubePoint":
        return cls(0, n)

    @classmethod
    def unit(cls, j: int, n: int) -> "CubePoint":
        return cls(1 << j, n)

    @property
    def weight(self) -> int:
        return self.bits.bit_count()

    def __getitem__(self, j: int) -> int:
        if not 0 <= j < self.n:
            raise IndexError(j)
        return (self.bits >> j) & 1

    def __add__(self, other: "CubePoint") -> "CubePoint":
        if other.n != self.n:
            raise ValueError("length mismatch")
        return CubePoint(self.bits ^ other.bits, self.n)

    def __str__(self) -> str:
        return "".join(str((self.bits >> j) & 1) for j in range(self.n))


def weight(x: CubePoint | int) -> int:
    """Hamming weight."""
    if isinstance(x, CubePoint):
        return x.weight
    return int(x).bit_count()


@dataclass(frozen=True)
class CubeMatrix:
    """An ``l x n`` binary matrix with bit-packed rows."""

    rows: tuple[int, ...]
    n: int

    def __post_init__(self):
        if not self.rows or self.n < 1:
            raise ValueError("need at least one row and n >= 1")
        if any(r < 0 or r >> self.n for r in self.rows):
            raise ValueError("row does not fit in length n")

    @classmethod
    def from_rows(cls, rows: Sequence[str | CubePoint]) -> "CubeMatrix":
        pts = [CubePoint.from_str(r) if isinstance(r, str) else r for r in rows]
        n = pts[0].n
        if any(p.n != n for p in pts):
            raise ValueError("rows have different lengths")
        return cls(tuple(p.bits for p in pts), n)

    @classmethod
    def from_index(cls, index: int, ell: int, n: int) -> "CubeMatrix":
        mask = (1 << n) - 1
        return cls(tuple((index >> (i * n)) & mask for i in range(ell)), n)

    @classmethod
    def zeros(cls, ell: int, n: int) -> "CubeMatrix":
        return cls((0,) * ell, n)

    @classmethod
    def from_columns(cls, columns: Sequence[int], ell: int) -> "CubeMatrix":
        """Build from column types (bit ``i`` of a type is the row-``i`` entry)."""
        rows = [0] * ell
        for j, v in enumerate(columns):
            for i in range(ell):
                if (v >> i) & 1:
                    rows[i] |= 1 << j
        return cls(tuple(rows), len(columns))

    @property
    def ell(self) -> int:
        return len(self.rows)

    @property
    def index(self) -> int:
        out = 0
        for i, r in enumerate(self.rows):
            out |= r << (i * self.n)
        return out

    def row(self, i: int) -> CubePoint:
        return CubePoint(self.rows[i], self.n)

    def column_type(self, j: int) -> int:
        return sum(((r >> j) & 1) << i for i, r in enumerate(self.rows))

    def row_weights(self) -> tuple[int, ...]:
        return tuple(r.bit_count() for r in self.rows)

    def __str__(self) -> str:
        return "/".join(str(self.row(i)) for i in range(self.ell))


def row_combination(X: CubeMatrix, u: CubePoint | int) -> CubePoint:
    """``u^T X``: XOR of the rows ``i`` with ``u_i = 1``."""
    if isinstance(u, CubePoint):
        if u.n != X.ell:
            raise ValueError(f"u has length {u.n}, X has {X.ell} rows")
        u = u.bits
    elif u < 0 or u >> X.ell:
        raise ValueError(f"u = {u} does not fit in {X.ell} rows")
    acc = 0
    for i, r in enumerate(X.rows):
        if (u >> i) & 1:
            acc ^= r
    return CubePoint(acc, X.n)


def row_weight_arrays(ell: int, n: int) -> list[np.ndarray]:
    """Weights of every row for all ``2^(l n)`` flattened matrices."""
    idx = np.arange(1 << (ell * n), dtype=np.int64)
    mask = (1 << n) - 1
    return [popcount((idx >> (i * n)) & mask) for i in range(ell)]


def span_weight_array(ell: int, n: int, u: int) -> np.ndarray:
    """``|u^T X|`` for all flattened matrices ``X``."""
    idx = np.arange(1 << (ell * n), dtype=np.int64)
    mask = (1 << n) - 1
    acc = np.zeros_like(idx)
    for i in range(ell):
        if (u >> i) & 1:
            acc ^= (idx >> (i * n)) & mask
    return popcount(acc)


# ---------------------------------------------------------------------------
# dense tables


def _to_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    if isinstance(v, Rational):
        return Fraction(v.numerator, v.denominator)
    if isinstance(v, (float, np.floating)):
        return Fraction(float(v))
    raise TypeError(f"cannot represent {v!r} exactly")


def _reduce(num: np.ndarray, den: int) -> tuple[np.ndarray, int]:
    if den < 0:
        num, den = -num, -den
    if den == 1:
        return num, den
    g = gcd(int(np.gcd.reduce(num)) if len(num) else 0, den)
    if g > 1:
        num = num // g
        den //= g
    return num, den


def _as_int_objects(a) -> np.ndarray:
    out = np.empty(len(a), dtype=object)
    out[:] = [int(v) for v in a]
    return out


@dataclass(frozen=True, eq=False)
class ValueTable:
    """A dense function ``{0,1}^N -> scalar``.

    In exact mode ``data`` holds Python-int numerators over the common
    denominator ``den``; in float mode ``data`` is a float64 array and
    ``den`` is 1.  ``side`` records which normalisation applies.
    """

    dim: int
    data: np.ndarray
    mode: str = EXACT
    side: str = PRIMAL
    den: int = 1

    def __post_init__(self):
        if self.mode not in (EXACT, FLOAT):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.side not in (PRIMAL, FOURIER):
            raise ValueError(f"unknown side {self.side!r}")
        if len(self.data) != 1 << self.dim:
            raise ValueError(f"table length {len(self.data)} != 2^{self.dim}")
        if self.mode == FLOAT and self.den != 1:
            raise ValueError("float tables carry no denominator")
        if self.den <= 0:
            raise ValueError("denominator must be positive")

    # -- construction ------------------------------------------------------

    @classmethod
    def _exact(cls, num: np.ndarray, den: int, dim: int, side: str) -> "ValueTable":
        num, den = _reduce(num, int(den))
        return cls(dim, num, EXACT, side, den)

    @classmethod
    def from_values(
        cls,
        values: Iterable,
        mode: str = EXACT,
        side: str = PRIMAL,
        dense_cap: int | None = None,
    ) -> "ValueTable":
        vals = list(values)
        dim = max(len(vals) - 1, 0).bit_length()
        if len(vals) != 1 << dim:
            raise ValueError(f"{len(vals)} values is not a power of two")
        check_dense(dim, mode, dense_cap)
        if mode == FLOAT:
            return cls(dim, np.asarray([float(v) for v in vals], dtype=np.float64), FLOAT, side)
        fr = [_to_fraction(v) for v in vals]
        den = 1
        for q in {f.denominator for f in fr}:
            den = den * q // gcd(den, q)
        num = _as_int_objects([f.numerator * (den // f.denominator) for f in fr])
        return cls._exact(num, den, dim, side)

    @classmethod
    def from_function(
        cls,
        fn: Callable[[int], object],
        dim: int,
        mode: str = EXACT,
        side: str = PRIMAL,
        dense_cap: int | None = None,
    ) -> "ValueTable":
        check_dense(dim, mode, dense_cap)
        return cls.from_values((fn(i) for i in range(1 << dim)), mode, side, dense_cap)

    @classmethod
    def zeros(cls, dim: int, mode: str = EXACT, side: str = PRIMAL, dense_cap=None) -> "ValueTable":
        return cls.constant(0, dim, mode, side, dense_cap)

    @classmethod
    def constant(cls, c, dim: int, mode: str = EXACT, side: str = PRIMAL, dense_cap=None) -> "ValueTable":
        check_dense(dim, mode, dense_cap)
        if mode == FLOAT:
            return cls(dim, np.full(1 << dim, float(c)), FLOAT, side)
        c = _to_fraction(c)
        num = np.empty(1 << dim, dtype=object)
        num[:] = c.numerator
        return cls._exact(num, c.denominator, dim, side)

    @classmethod
    def delta(cls, dim: int, at: int = 0, mode: str = EXACT, side: str = PRIMAL, scale=1, dense_cap=None) -> "ValueTable":
        t = cls.zeros(dim, mode, side, dense_cap)
        if mode == FLOAT:
            data = t.data.copy()
            data[at] = float(scale)
            return cls(dim, data, FLOAT, side)
        s = _to_fraction(scale)
        num = t.data.copy()
        num[at] = s.numerator
        return cls._exact(num, s.denominator, dim, side)

    @classmethod
    def from_weights(
        cls,
        per_weight: Sequence,
        n: int,
        mode: str = EXACT,
        side: str = PRIMAL,
        dense_cap: int | None = None,
    ) -> "ValueTable":
        """Radial table ``x -> per_weight[|x|]`` on ``{0,1}^n``."""
        if len(per_weight) != n + 1:
            raise ValueError("need one value per weight 0..n")
        check_dense(n, mode, dense_cap)
        w = popcount(np.arange(1 << n, dtype=np.int64))
        if mode == FLOAT:
            return cls(n, np.asarray([float(v) for v in per_weight])[w], FLOAT, side)
        fr = [_to_fraction(v) for v in per_weight]
        den = 1
        for f in fr:
            den = den * f.denominator // gcd(den, f.denominator)
        nums = _as_int_objects([f.numerator * (den // f.denominator) for f in fr])
        return cls._exact(nums[w], den, n, side)

    # -- access ------------------------------------------------------------

    def __len__(self) -> int:
        return len(self.data)

    def __getitem__(self, i: int):
        if self.mode == FLOAT:
            return float(self.data[i])
        return Fraction(self.data[i], self.den)

    def to_fractions(self) -> list[Fraction]:
        if self.mode == FLOAT:
            return [Fraction(float(v)) for v in self.data]
        return [Fraction(v, self.den) for v in self.data]

    def to_float(self) -> np.ndarray:
        if self.mode == FLOAT:
            return self.data.copy()
        try:
            return self.data.astype(np.float64) / float(self.den)
        except OverflowError:
            return np.asarray([float(Fraction(v, self.den)) for v in self.data])

    def astype(self, mode: str) -> "ValueTable":
        if mode == self.mode:
            return self
        if mode == FLOAT:
            return ValueTable(self.dim, self.to_float(), FLOAT, self.side)
        return ValueTable.from_values(self.data.tolist(), EXACT, self.side, dense_cap=self.dim)

    def with_side(self, side: str) -> "ValueTable":
        return ValueTable(self.dim, self.data, self.mode, side, self.den)

    def signs(self) -> np.ndarray:
        """Sign of every entry as an int array (exact in exact mode)."""
        if self.mode == FLOAT:
            return np.sign(self.data).astype(np.int64)
        return np.fromiter((0 if v == 0 else (1 if v > 0 else -1) for v in self.data), np.int64, len(self.data))

    def max_abs(self):
        if self.mode == FLOAT:
            return float(np.max(np.abs(self.data))) if len(self.data) else 0.0
        return Fraction(max(abs(v) for v in self.data), self.den)

    def equals(self, other: "ValueTable") -> bool:
        if self.dim != other.dim or self.side != other.side:
            return False
        if self.mode == EXACT and other.mode == EXACT:
            return self.den == other.den and bool(np.all(self.data == other.data))
        return bool(np.array_equal(self.to_float(), other.to_float()))

    def sha256(self) -> str:
        h = hashlib.sha256()
        h.update(f"{self.dim}:{self.mode}:{self.side}:".encode())
        if self.mode == FLOAT:
            h.update(self.data.astype("<f8").tobytes())
        else:
            h.update(f"{self.den}|".encode())
            h.update(",".join(str(v) for v in self.data).encode())
        return h.hexdigest()

    # -- arithmetic --------------------------------------------------------

    def _check_same(self, other: "ValueTable") -> None:
        if self.dim != other.dim:
            raise TableMismatchError(f"dimension {self.dim} vs {other.dim}")
        if self.mode != other.mode:
            raise TableMismatchError(f"mode {self.mode} vs {other.mode}")
        if self.side != other.side:
            raise TableMismatchError(f"side {self.side} vs {other.side}")

    def __mul__(self, other) -> "ValueTable":
        if isinstance(other, ValueTable):
            self._check_same(other)
            if self.mode == FLOAT:
                return ValueTable(self.dim, self.data * other.data, FLOAT, self.side)
            return ValueTable._exact(self.data * other.data, self.den * other.den, self.dim, self.side)
        if self.mode == FLOAT:
            return ValueTable(self.dim, self.data * float(other), FLOAT, self.side)
        c = _to_fraction(other)
        return ValueTable._exact(self.data * c.numerator, self.den * c.denominator, self.dim, self.side)

    __rmul__ = __mul__

    def __add__(self, other: "ValueTable") -> "ValueTable":
        self._check_same(other)
        if self.mode == FLOAT:
            return ValueTable(self.dim, self.data + other.data, FLOAT, self.side)
        den = self.den * other.den // gcd(self.den, other.den)
        num = self.data * (den // self.den) + other.data * (den // other.den)
        return ValueTable._exact(num, den, self.dim, self.side)

    def __neg__(self) -> "ValueTable":
        return ValueTable(self.dim, -self.data, self.mode, self.side, self.den)

    def __sub__(self, other: "ValueTable") -> "ValueTable":
        return self + (-other)

    def __pow__(self, k: int) -> "ValueTable":
        if self.mode == FLOAT:
            return ValueTable(self.dim, self.data**k, FLOAT, self.side)
        return ValueTable._exact(self.data**k, self.den**k, self.dim, self.side)


# ---------------------------------------------------------------------------
# transforms


def wht_inplace(a: np.ndarray) -> np.ndarray:
    """Unnormalised Walsh-Hadamard transform, butterflies in place."""
    n = len(a)
    if n & (n - 1):
        raise ValueError("length must be a power of two")
    h = 1
    while h < n:
        v = a.reshape(-1, 2, h)
        lo = v[:, 0, :].copy()
        v[:, 0, :] += v[:, 1, :]
        v[:, 1, :] = lo - v[:, 1, :]
        h <<= 1
    return a


def fourier(f: ValueTable) -> ValueTable:
    """``f^(x) = 2^-N sum_y f(y) (-1)^<x,y>``.

    Applying it to a Fourier-side table gives ``2^-N`` times the primal
    function, so the output side is always the opposite of the input side.
    """
    side = FOURIER if f.side == PRIMAL else PRIMAL
    a = wht_inplace(f.data.copy())
    if f.mode == FLOAT:
        return ValueTable(f.dim, a / float(1 << f.dim), FLOAT, side)
    return ValueTable._exact(a, f.den << f.dim, f.dim, side)


def inverse_fourier(fh: ValueTable) -> ValueTable:
    """Recover ``f`` from ``f^`` (``2^N * fourier(f^)``)."""
    g = fourier(fh)
    return g * (1 << fh.dim)


def _xor_conv_unnormalised(a: ValueTable, b: ValueTable) -> ValueTable:
    ha = wht_inplace(a.data.copy())
    hb = wht_inplace(b.data.copy())
    c = wht_inplace(ha * hb)
    if a.mode == FLOAT:
        return ValueTable(a.dim, c / float(1 << a.dim), FLOAT, a.side)
    return ValueTable._exact(c, (a.den * b.den) << a.dim, a.dim, a.side)


def _xor_conv_direct(a: ValueTable, b: ValueTable) -> ValueTable:
    size = 1 << a.dim
    idx = np.arange(size)
    out = np.empty(size, dtype=a.data.dtype)
    for x in range(size):
        out[x] = (a.data * b.data[idx ^ x]).sum()
    if a.mode == FLOAT:
        return ValueTable(a.dim, out, FLOAT, a.side)
    return ValueTable._exact(out, a.den * b.den, a.dim, a.side)


def convolve(f: ValueTable, g: ValueTable, method: str = "fast") -> ValueTable:
    """Convolution with the side-appropriate normalisation.

    ``method="direct"`` sums over all pairs, which is quadratic in the table
    size and meant as an independent check at small ``N``.
    """
    f._check_same(g)
    if method == "fast":
        c = _xor_conv_unnormalised(f, g)
    elif method == "direct":
        c = _xor_conv_direct(f, g)
    else:
        raise ValueError(f"unknown method {method!r}")
    if f.side == PRIMAL:
        c = c * Fraction(1, 1 << f.dim) if f.mode == EXACT else c * (1.0 / (1 << f.dim))
    return c


def tensor(f: ValueTable, g: ValueTable, dense_cap: int | None = None) -> ValueTable:
    """``(f (x) g)(x, y) = f(x) g(y)``; ``x`` takes the low ``f.dim`` bits."""
    if f.mode != g.mode:
        raise TableMismatchError(f"mode {f.mode} vs {g.mode}")
    if f.side != g.side:
        raise TableMismatchError(f"side {f.side} vs {g.side}")
    check_dense(f.dim + g.dim, f.mode, dense_cap)
    data = np.outer(g.data, f.data).reshape(-1)
    if f.mode == FLOAT:
        return ValueTable(f.dim + g.dim, data, FLOAT, f.side)
    return ValueTable._exact(data, f.den * g.den, f.dim + g.dim, f.side)


def tensor_power(f: ValueTable, k: int, dense_cap: int | None = None) -> ValueTable:
    if k < 1:
        raise ValueError("tensor power needs k >= 1")
    out = f
    for _ in range(k - 1):
        out = tensor(out, f, dense_cap)
    return out


def inner(f: ValueTable, g: ValueTable):
    """Side-appropriate inner product (``2^-N`` on the primal side only)."""
    f._check_same(g)
    if f.mode == FLOAT:
        s = float(np.dot(f.data, g.data))
        return s / (1 << f.dim) if f.side == PRIMAL else s
    s = Fraction(int((f.data * g.data).sum()), f.den * g.den)
    return s / (1 << f.dim) if f.side == PRIMAL else s
