"""Dual feasible solutions: first-LP certificate, hierarchy certificates,
the linear-valued lift, and diagnostics around them.

All builders are exact.  ``Lambda`` is radial, so everything built from it
is column-symmetric and is stored by profile; dense tables are produced on
demand for verification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb, gcd
from typing import Sequence

import numpy as np

from .cube import EXACT, FLOAT, FOURIER, PRIMAL, CubeMatrix, ValueTable, check_dense, fourier, popcount, row_combination
from .io import encode_scalar
from .krawtchouk import ProfileSpace, ProfileTable, apply_au_symmetric, build_table, profile_fourier, profile_sum
from .lp import GENERAL, LINEAR, LINEAR_VALUED, Instance, rank_one_indices, verify_dual, verify_eigen_condition, verify_problem1

FIRST_LP = "first-lp"
HIERARCHY_GENERAL = "hierarchy-general"
HIERARCHY_LINEAR = "hierarchy-linear-phi"
LINEAR_VALUED_LIFT = "linear-valued-lift"

DEFAULT_DENOMINATOR_CAP = 1024


class ConstructionError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# parameters


def _iroot_ceil(R: int, m: int) -> int:
    """Smallest integer ``x >= 0`` with ``x^m >= R``."""
    if R <= 1:
        return max(R, 0)
    x = 1 << ((R.bit_length() + m - 1) // m)
    while True:
        y = ((m - 1) * x + R // x ** (m - 1)) // m
        if y >= x:
            break
        x = y
    while x**m < R:
        x += 1
    while x > 0 and (x - 1) ** m >= R:
        x -= 1
    return x


def choose_epsilon(n: int, d: int, m: int, denominator_cap: int | None = None) -> Fraction:
    """Smallest ``eps`` with ``(n - d + 2 eps)^m - (n - d)^m >= 1``.

    The search is over ``2 eps = p/q`` with ``q <= denominator_cap``.
    """
    if m < 2 or m % 2:
        raise ValueError("m must be even and >= 2")
    if not 1 <= d < n:
        raise ValueError("need 1 <= d < n")
    a = n - d
    D = DEFAULT_DENOMINATOR_CAP if denominator_cap is None else int(denominator_cap)
    if D < 1:
        raise ValueError("denominator cap must be >= 1")
    target = a**m + 1
    best = None
    for q in range(1, D + 1):
        p = _iroot_ceil(q**m * target, m) - q * a
        t = Fraction(p, q)
        if best is None or t < best:
            best = t
    eps = best / 2
    if not 0 < eps < 1:
        raise ConstructionError(f"no admissible eps below 1 with denominators up to {D}")
    return eps


def choose_m(ell: int, delta, variant: str = GENERAL) -> int:
    """Smallest even ``m >= 2`` with ``target <= ((1 + delta)/(1 - delta))^m``.

    ``target`` is ``ell`` for the general hierarchy and ``2^(ell - 1)`` for
    the linear one.
    """
    delta = Fraction(delta)
    if not 0 < delta < 1:
        raise ValueError("need 0 < delta < 1")
    if ell < 1:
        raise ValueError("ell must be >= 1")
    ratio = (1 + delta) / (1 - delta)
    target = ell if variant == GENERAL else 1 << (ell - 1)
    m = 2
    while ratio**m < target:
        m += 2
    return m


# ---------------------------------------------------------------------------
# Lambda


@dataclass(frozen=True)
class LambdaFunction:
    """``Lambda`` and its transform, both as functions of the weight.

    ``hat[i]`` is the transform on the weight-``i`` shell and ``primal_num[j]
    / primal_den`` is ``Lambda`` at weight ``j``.
    """

    n: int
    d: int
    eps: Fraction
    r: int
    hat: tuple[Fraction, ...]
    primal_num: tuple[int, ...]
    primal_den: int

    def primal(self, j: int) -> Fraction:
        return Fraction(self.primal_num[j], self.primal_den)

    @property
    def support_size(self) -> int:
        return sum(comb(self.n, i) for i in range(self.n + 1) if self.hat[i] != 0)

    def hat_l1(self) -> Fraction:
        return sum((comb(self.n, i) * abs(h) for i, h in enumerate(self.hat)), Fraction(0))

    def hat_l2_sq(self) -> Fraction:
        return sum((comb(self.n, i) * h * h for i, h in enumerate(self.hat)), Fraction(0))

    def hat_table(self, mode: str = EXACT, dense_cap: int | None = None) -> ValueTable:
        return ValueTable.from_weights(self.hat, self.n, mode, FOURIER, dense_cap)

    def primal_table(self, mode: str = EXACT, dense_cap: int | None = None) -> ValueTable:
        return ValueTable.from_weights([self.primal(j) for j in range(self.n + 1)], self.n, mode, PRIMAL, dense_cap)

    def hat_profile(self, space: ProfileSpace, mode: str = EXACT) -> ProfileTable:
        """``Lambda^(x)^{(x) l}`` on the profiles of ``space``."""
        rw = [space.row_weights(i) for i in range(space.ell)]
        vals = []
        for k in range(space.size):
            v = Fraction(1)
            for w in rw:
                v *= self.hat[int(w[k])]
            vals.append(v)
        return ProfileTable.from_values(space, vals, mode, FOURIER)


def _lambda_coefficients(n: int, s: Fraction) -> tuple[int, list[Fraction]]:
    """Support radius and ``K_i(s)`` for ``i <= r``, stopping at the first sign change."""
    p, q = s.numerator, s.denominator
    c = n * q - 2 * p
    # P_k = q^k k! K_k(s)
    P = [1, c]
    fact, qk = [1, 1], [1, q]
    if c <= 0:
        return 0, [Fraction(1)]
    k = 1
    while k < n:
        nxt = c * P[k] - (n - k + 1) * k * q * q * P[k - 1]
        P.append(nxt)
        fact.append(fact[-1] * (k + 1))
        qk.append(qk[-1] * q)
        k += 1
        if nxt <= 0:
            r = k - 1
            return r, [Fraction(P[i], qk[i] * fact[i]) for i in range(r + 1)]
    raise ConstructionError(f"K_i(d - eps) > 0 for every i <= n; d - eps = {s} is below all first roots")


def build_lambda(n: int, d: int, eps=1, check: bool = True) -> LambdaFunction:
    """Radial ``Lambda`` with transform ``K_i(d - eps) / C(n, i)`` on shells ``i <= r``.

    ``r`` is the smallest index with ``K_{r+1}(d - eps) <= 0``.  With
    ``check`` the three sufficient conditions are asserted: ``Lambda^(0) =
    1``, ``Lambda^ >= 0`` and ``A Lambda^ >= (n - 2d + 2 eps) Lambda^``.
    """
    eps = Fraction(eps)
    if not 0 < eps < d:
        raise ValueError("need 0 < eps < d")
    if d > n:
        raise ValueError("need d <= n")
    s = d - eps
    r, ks = _lambda_coefficients(n, s)
    if any(k <= 0 for k in ks):
        raise ConstructionError("K_i(d - eps) <= 0 below the support radius")
    hat = [ks[i] / comb(n, i) for i in range(r + 1)] + [Fraction(0)] * (n - r)
    coeff = hat[: r + 1]
    L = 1
    for a in coeff:
        L = L * a.denominator // gcd(L, a.denominator)
    A = [a.numerator * (L // a.denominator) for a in coeff]
    tab = build_table(n)
    nums = [sum(A[i] * tab.K[i][j] for i in range(r + 1)) for j in range(n + 1)]
    g = 0
    for v in nums:
        g = gcd(g, v)
    g = gcd(g, L) or 1
    lam = LambdaFunction(n, d, eps, r, tuple(hat), tuple(v // g for v in nums), L // g)
    if check:
        if lam.hat[0] != 1:
            raise ConstructionError("Lambda^(0) != 1")
        if any(h < 0 for h in lam.hat):
            raise ConstructionError("Lambda^ has a negative value")
        sp = ProfileSpace(1, n)
        rep = verify_eigen_condition(lam.hat_profile(sp), Instance(n, d, 1), 0, 1, n - 2 * d + 2 * eps, [1])
        if not rep.feasible:
            raise ConstructionError(f"eigen condition fails: {rep.violations}")
    return lam


# ---------------------------------------------------------------------------
# certificates


@dataclass
class Certificate:
    inst: Instance
    construction: str
    eps: Fraction
    m: int | None
    r: int
    g: ValueTable | ProfileTable | None
    claimed_value: object
    support_size: int
    extra: dict = field(default_factory=dict)

    def dense(self, dense_cap: int | None = None) -> ValueTable:
        if isinstance(self.g, ValueTable):
            return self.g
        if isinstance(self.g, ProfileTable):
            return self.g.to_dense(dense_cap)
        raise ValueError("certificate carries no table")

    def table_hash(self, dense_cap: int | None = None) -> str | None:
        try:
            return self.dense(dense_cap).sha256()
        except (ValueError, RuntimeError):
            return None

    def to_json(self, dense_cap: int | None = None) -> dict:
        return {
            "construction": self.construction,
            "instance": self.inst.to_json(),
            "params": {"epsilon": encode_scalar(self.eps), "m": self.m, "r": self.r},
            "claimed_value": encode_scalar(self.claimed_value),
            "support_size": self.support_size,
            "table_sha256": self.table_hash(dense_cap),
        }


def first_lp_value(lam: LambdaFunction) -> Fraction:
    """``g(0) / g^(0)`` for ``g = 2 (d - |x|) Lambda^2``, by weight."""
    n, d = lam.n, lam.d
    num = lam.primal_num
    top = 2 * d * num[0] ** 2 << n
    bottom = sum(comb(n, j) * 2 * (d - j) * num[j] ** 2 for j in range(n + 1))
    if bottom <= 0:
        raise ConstructionError("g^(0) <= 0")
    return Fraction(top, bottom)


def build_g1(n: int, d: int, eps=1, mode: str = EXACT, dense: bool = True, dense_cap: int | None = None) -> Certificate:
    """``g(x) = 2 (d - |x|) Lambda(x)^2`` with its claimed ratio value."""
    eps = Fraction(eps)
    lam = build_lambda(n, d, eps)
    value = first_lp_value(lam)
    ratio_bound = Fraction(d) / eps * lam.hat_l1() ** 2 / lam.hat_l2_sq()
    supp_bound = Fraction(d) / eps * lam.support_size
    if not value <= ratio_bound <= supp_bound:
        raise ConstructionError(f"value {value} exceeds its norm bound {ratio_bound}")
    g = None
    if dense:
        per = [2 * (d - j) * lam.primal(j) ** 2 for j in range(n + 1)]
        g = ValueTable.from_weights(per, n, mode, PRIMAL, dense_cap)
    return Certificate(
        Instance(n, d, 1), FIRST_LP, eps, None, lam.r, g, value, lam.support_size,
        {"norm_bound": ratio_bound, "support_bound": supp_bound, "lambda": lam},
    )


@dataclass(frozen=True)
class PhiFunction:
    """``Phi`` (general) or ``Phi^Lin`` (linear) as a product of factors.

    The factors are indexed by nonempty ``U`` subsets of rows (general,
    encoded as bit masks) or by nonzero ``v`` (linear).  Both read only
    weights: row weights for the general kind, ``|u^T X|`` per ``u`` for
    the linear kind.
    """

    n: int
    d: int
    ell: int
    m: int
    kind: str = GENERAL

    def __post_init__(self):
        if self.m < 2 or self.m % 2:
            raise ValueError("m must be even and >= 2")

    def _term(self, w: int) -> int:
        return (self.n + self.d - 2 * w) ** self.m - (self.n - self.d) ** self.m

    def weights_of(self, X: CubeMatrix) -> tuple[int, ...]:
        if self.kind == GENERAL:
            return X.row_weights()
        return tuple(row_combination(X, u).weight for u in range(1 << self.ell))

    def weights_of_profile(self, space: ProfileSpace, k: int) -> tuple[int, ...]:
        a = space.profiles[k]
        if self.kind == GENERAL:
            return tuple(sum(a[v] for v in range(space.T) if (v >> i) & 1) for i in range(self.ell))
        return tuple(sum(a[v] for v in range(space.T) if (u & v).bit_count() & 1) for u in range(space.T))

    def factors(self, w: Sequence[int]) -> list[tuple[int, int]]:
        """``[(index, value)]`` per factor for the weight vector ``w``."""
        out = []
        for idx in range(1, 1 << self.ell):
            if self.kind == GENERAL:
                val = sum(self._term(w[i]) for i in range(self.ell) if (idx >> i) & 1)
            else:
                val = sum(self._term(w[u]) for u in range(1, 1 << self.ell) if (u & idx).bit_count() & 1)
            out.append((idx, val))
        return out

    def value(self, w: Sequence[int]) -> int:
        p = 1
        for _, v in self.factors(w):
            p *= v
        return p

    def __call__(self, X: CubeMatrix) -> int:
        return self.value(self.weights_of(X))

    def profile_table(self, space: ProfileSpace, mode: str = EXACT) -> ProfileTable:
        vals = [self.value(self.weights_of_profile(space, k)) for k in range(space.size)]
        return ProfileTable.from_values(space, vals, mode, PRIMAL)

    def dense_table(self, mode: str = EXACT, dense_cap: int | None = None) -> ValueTable:
        return self.profile_table(ProfileSpace(self.ell, self.n), mode).to_dense(dense_cap)


def build_phi_general(n: int, d: int, ell: int, m: int) -> PhiFunction:
    return PhiFunction(n, d, ell, m, GENERAL)


def build_phi_linear(n: int, d: int, ell: int, m: int) -> PhiFunction:
    return PhiFunction(n, d, ell, m, LINEAR)


def hierarchy_value_bound_log2(n: int, d: int, ell: int, support: int) -> float:
    """``log2`` of ``(e n^(1/delta))^(2^l log2 l) |supp|^l``."""
    delta = d / n
    return (1 << ell) * math.log2(ell) * (math.log2(math.e) + math.log2(n) / delta) + ell * math.log2(support)


def build_g_ell(
    n: int,
    d: int,
    ell: int,
    variant: str = GENERAL,
    m: int | None = None,
    eps=None,
    denominator_cap: int | None = None,
    mode: str = EXACT,
) -> Certificate:
    """``Phi . (Lambda^{(x) l})^2``, stored by profile."""
    if variant not in (GENERAL, LINEAR):
        raise ValueError("variant must be general or linear")
    if not 1 <= d < n:
        raise ValueError("need 1 <= d < n")
    m = choose_m(ell, Fraction(d, n), variant) if m is None else m
    eps = choose_epsilon(n, d, m, denominator_cap) if eps is None else Fraction(eps)
    lam = build_lambda(n, d, eps)
    phi = PhiFunction(n, d, ell, m, variant)
    sp = ProfileSpace(ell, n)
    rw = [sp.row_weights(i) for i in range(ell)]
    lam_p = [lam.primal(j) for j in range(n + 1)]
    vals = []
    for k in range(sp.size):
        t = Fraction(1)
        for w in rw:
            t *= lam_p[int(w[k])]
        vals.append(phi.value(phi.weights_of_profile(sp, k)) * t * t)
    g = ProfileTable.from_values(sp, vals, EXACT, PRIMAL)
    total = profile_sum(g)
    ghat0 = total / (1 << (ell * n))
    if ghat0 <= 0:
        raise ConstructionError("g^(0) <= 0")
    value = g[sp.zero_index()] / ghat0
    support = lam.support_size**ell
    extra = {"lambda": lam, "phi": phi}
    if ell >= 2 and variant == GENERAL:
        bound = hierarchy_value_bound_log2(n, d, ell, lam.support_size)
        extra["value_bound_log2"] = bound
        if math.log2(value) > bound:
            raise ConstructionError(f"log2 value {math.log2(value):.3f} exceeds the bound {bound:.3f}")
    if mode == FLOAT:
        g = ProfileTable(sp, g.to_float(), FLOAT, PRIMAL)
    kind = HIERARCHY_GENERAL if variant == GENERAL else HIERARCHY_LINEAR
    return Certificate(Instance(n, d, ell, variant), kind, eps, m, lam.r, g, value, support, extra)


def slack_constant(ell: int) -> int:
    c = 1
    for j in range(1, ell + 1):
        c *= j ** comb(ell, j)
    return c


@dataclass
class SlackReport:
    holds: bool
    constant: int
    min_slack: object
    witness: str | None


def fourier_slack(cert: Certificate, domain: str = "profile", dense_cap: int | None = None) -> SlackReport:
    """Check ``g^ >= c . F[(Lambda^{(x) l})^2]`` pointwise, ``c = prod_j j^C(l, j)``.

    ``g^`` is ``Phi^ *_F (Lambda^ *_F Lambda^)`` with ``Lambda`` tensored.
    """
    lam: LambdaFunction = cert.extra["lambda"]
    ell, n = cert.inst.ell, cert.inst.n
    c = slack_constant(ell)
    sp = ProfileSpace(ell, n)
    rw = [sp.row_weights(i) for i in range(ell)]
    gam2 = []
    for k in range(sp.size):
        t = Fraction(1)
        for w in rw:
            t *= lam.primal(int(w[k]))
        gam2.append(t * t)
    gam2 = ProfileTable.from_values(sp, gam2, EXACT, PRIMAL)
    g = cert.g if isinstance(cert.g, ProfileTable) and cert.g.mode == EXACT else None
    if g is None:
        raise ValueError("slack check needs the exact profile table")
    if domain == "profile":
        gh, fh = profile_fourier(g), profile_fourier(gam2)
        label = lambda k: "profile" + str(sp.profiles[k])
    else:
        gh, fh = fourier(g.to_dense(dense_cap)), fourier(gam2.to_dense(dense_cap))
        label = lambda k: str(CubeMatrix.from_index(k, ell, n))
    diff = gh - fh * c
    k = int(np.argmin(diff.data))
    worst = diff[k]
    return SlackReport(worst >= 0, c, worst, label(k))


# ---------------------------------------------------------------------------
# linear-valued program


def lift_linear_valued(g1: ValueTable, ell: int, d: int, verify: bool = True, dense_cap: int | None = None) -> Certificate:
    """Lift a Delsarte certificate to ``l x n`` matrices.

    ``g1`` is rescaled so ``g1^(0) = 1``.  Then ``g(0) = g1(0)``, ``g(u x^T)
    = 1 + (g1(x) - 1)/(2^l - 1)`` for nonzero ``u, x``, and ``g = 1``
    elsewhere.
    """
    n = g1.dim
    if g1.side != PRIMAL:
        raise ValueError("g1 must be primal-side")
    if verify:
        rep = verify_dual(g1, Instance(n, d, 1))
        if not rep.feasible:
            raise ConstructionError(f"g1 is not feasible: {rep.violations}")
    g1h0 = fourier(g1)[0]
    g1n = g1 * (1 / g1h0) if g1.mode == FLOAT else g1 * (Fraction(1) / g1h0)
    N = ell * n
    check_dense(N, g1.mode, dense_cap)
    xs = np.arange(1, 1 << n, dtype=np.int64)
    idx_all = []
    for u in range(1, 1 << ell):
        idx = np.zeros_like(xs)
        for i in range(ell):
            if (u >> i) & 1:
                idx |= xs << (i * n)
        idx_all.append(idx)
    idx_all = np.concatenate(idx_all)
    if len(np.unique(idx_all)) != len(idx_all):
        raise ConstructionError("rank-one factorisation is not unique")
    k = (1 << ell) - 1
    x_of = np.tile(xs, k)
    if g1.mode == FLOAT:
        data = np.ones(1 << N)
        data[idx_all] = 1 + (g1n.data[x_of] - 1) / k
        data[0] = g1n.data[0]
        g = ValueTable(N, data, FLOAT, PRIMAL)
    else:
        den = g1n.den * k
        data = np.empty(1 << N, dtype=object)
        data[:] = den
        data[idx_all] = den + g1n.data[x_of] - g1n.den
        data[0] = g1n.data[0] * k
        g = ValueTable._exact(data, den, N, PRIMAL)
    return Certificate(Instance(n, d, ell, LINEAR_VALUED), LINEAR_VALUED_LIFT, Fraction(0), None, 0, g, g1n[0], int((fourier(g1).signs() != 0).sum()), {})


def ghat_closed_form(g1hat: ValueTable, X: CubeMatrix):
    """Transform of the lifted function at ``X``, from ``g1^`` alone."""
    if g1hat.side != FOURIER:
        raise ValueError("g1hat must be Fourier-side")
    n, ell = g1hat.dim, X.ell
    if X.n != n:
        raise ValueError("length mismatch")
    coef = Fraction(1, (1 << ((ell - 1) * n)) * ((1 << ell) - 1))
    s = Fraction(0)
    for u in range(1, 1 << ell):
        y = row_combination(X, u).bits
        s += _to_frac(g1hat[y]) - (1 if y == 0 else 0)
    out = (1 if X.index == 0 else 0) + coef * s
    return float(out) if g1hat.mode == FLOAT else out


def _to_frac(v):
    return v if isinstance(v, Fraction) else Fraction(v)


def ghat_closed_form_table(g1hat: ValueTable, ell: int, dense_cap: int | None = None) -> ValueTable:
    """``ghat_closed_form`` at every ``X``, vectorised."""
    if g1hat.side != FOURIER:
        raise ValueError("g1hat must be Fourier-side")
    n = g1hat.dim
    N = ell * n
    check_dense(N, g1hat.mode, dense_cap)
    idx = np.arange(1 << N, dtype=np.int64)
    mask = (1 << n) - 1
    rows = [(idx >> (i * n)) & mask for i in range(ell)]
    k = (1 << ell) - 1
    if g1hat.mode == FLOAT:
        acc = np.zeros(1 << N)
        for u in range(1, 1 << ell):
            y = np.zeros_like(idx)
            for i in range(ell):
                if (u >> i) & 1:
                    y ^= rows[i]
            acc += g1hat.data[y] - (y == 0)
        out = acc / ((1 << ((ell - 1) * n)) * k)
        out[0] += 1
        return ValueTable(N, out, FLOAT, FOURIER)
    acc = np.zeros(1 << N, dtype=np.int64).astype(object)
    for u in range(1, 1 << ell):
        y = np.zeros_like(idx)
        for i in range(ell):
            if (u >> i) & 1:
                y ^= rows[i]
        acc = acc + g1hat.data[y] - np.where(y == 0, g1hat.den, 0).astype(object)
    den = g1hat.den * (1 << ((ell - 1) * n)) * k
    acc[0] += den
    return ValueTable._exact(acc, den, N, FOURIER)


# ---------------------------------------------------------------------------
# diagnostics


@dataclass
class CounterexampleReport:
    n: int
    d: int
    ell: int
    u: int
    eps: Fraction
    lam_e1: Fraction
    lhs: Fraction
    rhs: Fraction
    stated_bound: Fraction
    bound_holds: bool
    violated: bool


def counterexample_au(n: int, d: int, ell: int, u: int, eps=1) -> CounterexampleReport:
    """Compare ``(A^u Lambda^{(x) l})(0)`` with ``(n - 2(d - eps)) Lambda^{(x) l}(0)``.

    Since ``Lambda^`` is 1 at 0, the left side is ``n Lambda^(e_1)^|u|``
    and the right side is ``n - 2d + 2 eps``.  For ``|u| >= 2`` the tensor
    power falls short, so it cannot certify the linear hierarchy the way
    it certifies the general one.
    """
    wu = int(u).bit_count()
    if not 0 < u < (1 << ell):
        raise ValueError("u must be a nonzero type")
    if wu <= 1:
        raise ValueError("|u| must be at least 2; single-row directions satisfy the condition")
    if n <= 2 * d:
        raise ValueError("need n > 2d")
    eps = Fraction(eps)
    lam = build_lambda(n, d, eps, check=False)
    e1 = lam.hat[1]
    lhs = lam.hat[0] ** (ell - wu) * n * e1**wu
    rhs = (n - 2 * (d - eps)) * lam.hat[0] ** ell
    stated = Fraction(n, (n - 2 * d) ** wu)
    return CounterexampleReport(n, d, ell, u, eps, e1, lhs, rhs, stated, lhs <= stated, lhs < rhs)


@dataclass
class Problem1Result:
    gamma_hat: ProfileTable
    report: object
    support_shells: int
    certified: bool = False


def search_problem1(n: int, d: int, ell: int, m: int | None = None, iterations: int = 200, max_shells: int | None = None) -> Problem1Result:
    """Experimental, float-only search for the linear support problem.

    Grows the support of ``G^`` shell by shell (profiles with ``k`` nonzero
    columns), sets ``G^`` on the support to the leading eigenvector of
    ``sum_u (A^u + d I)^m`` restricted to it by power iteration, and stops
    at the first support that passes the constraints.  Nothing is proven
    here, so the result is never marked as certified.
    """
    m = choose_m(ell, Fraction(d, n), LINEAR) if m is None else m
    sp = ProfileSpace(ell, n)
    inst = Instance(n, d, ell, LINEAR)
    phi = PhiFunction(n, d, ell, m, LINEAR).profile_table(sp, FLOAT)
    shell = n - sp.array[:, 0]
    zero = sp.zero_index()
    max_shells = n if max_shells is None else max_shells
    last = None
    for k in range(max_shells + 1):
        supp = shell <= k
        x = ProfileTable(sp, supp.astype(np.float64), FLOAT, FOURIER)
        for _ in range(iterations):
            acc = ProfileTable(sp, np.zeros(sp.size), FLOAT, FOURIER)
            for u in range(1, sp.T):
                h = x
                for _ in range(m):
                    h = apply_au_symmetric(h, u) + h * d
                acc = acc + h
            data = np.where(supp, acc.data, 0.0)
            x = ProfileTable(sp, data / data[zero], FLOAT, FOURIER)
        rep = verify_problem1(x, phi, inst)
        last = Problem1Result(x, rep, k)
        if rep.feasible:
            return last
    return last
