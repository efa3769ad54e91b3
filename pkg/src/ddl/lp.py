"""Forbidden/valid configurations and feasibility checks for the dual programs.

Three dual programs are covered:

* ``general`` / ``linear``: ``g <= 0`` on valid nonzero configurations,
  ``g^ >= 0`` and ``g^(0) > 0``; objective ``g(0) / g^(0)``.
* ``linear-valued``: ``g(u x^T) <= 1 - 1/(2^l - 1)`` for ``|x| >= d``,
  ``g <= 1`` on linear-valid nonzero configurations, ``g^ >= 0`` and
  ``g^(0) = 1``; objective ``g(0)``.

Checks run either on a dense table or, for column-symmetric functions, on
a profile table.  Each report keeps only the worst violation per family.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Sequence

import numpy as np

from .cube import EXACT, FLOAT, FOURIER, PRIMAL, CubeMatrix, ValueTable, fourier, inverse_fourier, popcount, row_combination
from .io import encode_scalar
from .krawtchouk import ProfileSpace, ProfileTable, apply_au_symmetric, profile_fourier

GENERAL = "general"
LINEAR = "linear"
LINEAR_VALUED = "linear-valued"
VARIANTS = (GENERAL, LINEAR, LINEAR_VALUED)

FLOAT_RTOL = 1e-9


class Config(Enum):
    FORBIDDEN = "forbidden"
    VALID = "valid"


@dataclass(frozen=True)
class Instance:
    n: int
    d: int
    ell: int = 1
    variant: str = GENERAL

    def __post_init__(self):
        if not 1 <= self.d <= self.n:
            raise ValueError(f"need 1 <= d <= n, got n={self.n}, d={self.d}")
        if self.ell < 1:
            raise ValueError("ell must be >= 1")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")

    @property
    def dim(self) -> int:
        return self.ell * self.n

    @property
    def delta(self) -> Fraction:
        return Fraction(self.d, self.n)

    def to_json(self) -> dict:
        return {"n": self.n, "d": self.d, "ell": self.ell, "variant": self.variant}


@dataclass
class Violation:
    constraint: str
    witness: str
    magnitude: object

    def to_json(self) -> dict:
        return {"constraint": self.constraint, "witness": self.witness, "magnitude": encode_scalar(self.magnitude)}


@dataclass
class VerificationReport:
    instance: Instance
    feasible: bool
    value: object
    violations: list[Violation]
    mode: str
    checked_domain: str
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "instance": self.instance.to_json(),
            "mode": self.mode,
            "checked_domain": self.checked_domain,
            "feasible": self.feasible,
            "value": encode_scalar(self.value),
            "violations": [v.to_json() for v in self.violations],
            "extra": {k: encode_scalar(v) if isinstance(v, (Fraction, float, int)) and not isinstance(v, bool) else v for k, v in sorted(self.extra.items())},
        }


# ---------------------------------------------------------------------------
# classifiers


def _bad(w: int, d: int) -> bool:
    return 1 <= w <= d - 1


def classify_general(X: CubeMatrix, d: int) -> Config:
    if any(_bad(w, d) for w in X.row_weights()):
        return Config.FORBIDDEN
    return Config.VALID


def classify_linear(X: CubeMatrix, d: int) -> Config:
    for u in range(1, 1 << X.ell):
        if _bad(row_combination(X, u).weight, d):
            return Config.FORBIDDEN
    return Config.VALID


def _dense_row_weights(ell: int, n: int) -> list[np.ndarray]:
    idx = np.arange(1 << (ell * n), dtype=np.int64)
    mask = (1 << n) - 1
    return [(idx >> (i * n)) & mask for i in range(ell)]


def valid_mask(inst: Instance) -> np.ndarray:
    """Boolean mask over all flattened ``l x n`` matrices."""
    rows = _dense_row_weights(inst.ell, inst.n)
    ok = np.ones(1 << inst.dim, dtype=bool)
    if inst.variant == GENERAL:
        for r in rows:
            w = popcount(r)
            ok &= ~((w >= 1) & (w <= inst.d - 1))
        return ok
    for u in range(1, 1 << inst.ell):
        acc = np.zeros_like(rows[0])
        for i in range(inst.ell):
            if (u >> i) & 1:
                acc ^= rows[i]
        w = popcount(acc)
        ok &= ~((w >= 1) & (w <= inst.d - 1))
    return ok


def profile_valid_mask(space: ProfileSpace, d: int, variant: str) -> np.ndarray:
    ok = np.ones(space.size, dtype=bool)
    if variant == GENERAL:
        weights = [space.row_weights(i) for i in range(space.ell)]
    else:
        weights = [space.span_weights(u) for u in range(1, space.T)]
    for w in weights:
        ok &= ~((w >= 1) & (w <= d - 1))
    return ok


def rank_one_indices(ell: int, n: int, d: int) -> np.ndarray:
    """Flattened indices of all ``u x^T`` with ``u != 0`` and ``|x| >= d``."""
    xs = np.arange(1 << n, dtype=np.int64)
    xs = xs[popcount(xs) >= d]
    out = []
    for u in range(1, 1 << ell):
        idx = np.zeros_like(xs)
        for i in range(ell):
            if (u >> i) & 1:
                idx |= xs << (i * n)
        out.append(idx)
    return np.concatenate(out) if out else np.zeros(0, dtype=np.int64)


# ---------------------------------------------------------------------------
# A^u


def dense_au_matrix_action(f: ValueTable, u: int, ell: int, n: int) -> ValueTable:
    """``(A^u f)(X) = sum_j f(X + u e_j^T)``."""
    if f.dim != ell * n:
        raise ValueError(f"table has dimension {f.dim}, expected {ell * n}")
    if not 0 < u < (1 << ell):
        raise ValueError(f"u must be a nonzero type in 1..{(1 << ell) - 1}")
    idx = np.arange(1 << f.dim, dtype=np.int64)
    out = None
    for j in range(n):
        mask = 0
        for i in range(ell):
            if (u >> i) & 1:
                mask |= 1 << (i * n + j)
        term = f.data[idx ^ mask]
        out = term if out is None else out + term
    if f.mode == FLOAT:
        return ValueTable(f.dim, out, FLOAT, f.side)
    return ValueTable._exact(out, f.den, f.dim, f.side)


# ---------------------------------------------------------------------------
# verification helpers


def _tau(table, mode: str):
    if mode == EXACT:
        return 0
    m = table.max_abs()
    return FLOAT_RTOL * m if m > 0 else FLOAT_RTOL


def _scalar(table, k):
    return table[int(k)]


class _Witness:
    def __init__(self, domain: str, ell: int, n: int, space: ProfileSpace | None = None):
        self.domain, self.ell, self.n, self.space = domain, ell, n, space

    def __call__(self, k: int) -> str:
        if self.domain == "dense":
            return str(CubeMatrix.from_index(int(k), self.ell, self.n))
        return "profile" + str(tuple(int(c) for c in self.space.profiles[int(k)]))


def _argext(data: np.ndarray, where: np.ndarray, largest: bool) -> int | None:
    pos = np.flatnonzero(where)
    if len(pos) == 0:
        return None
    vals = data[pos]
    k = int(np.argmax(vals) if largest else np.argmin(vals))
    return int(pos[k])


def _check_upper(table, mask: np.ndarray, bound, name: str, wit: _Witness, tau) -> tuple[Violation | None, object]:
    """Worst violation of ``table <= bound`` on ``mask``; also the residual."""
    k = _argext(table.data, mask, largest=True)
    if k is None:
        return None, 0
    excess = _scalar(table, k) - bound
    if excess > tau:
        return Violation(name, wit(k), excess), excess
    return None, max(excess, 0)


def _check_lower(table, mask: np.ndarray, bound, name: str, wit: _Witness, tau) -> tuple[Violation | None, object]:
    k = _argext(table.data, mask, largest=False)
    if k is None:
        return None, 0
    deficit = bound - _scalar(table, k)
    if deficit > tau:
        return Violation(name, wit(k), deficit), deficit
    return None, max(deficit, 0)


def _as_table(g):
    if isinstance(g, ValueTable):
        return "dense"
    if isinstance(g, ProfileTable):
        return "profile"
    raise TypeError("expected a ValueTable or ProfileTable")


def verify_dual(g: ValueTable | ProfileTable, inst: Instance) -> VerificationReport:
    """Check ``g <= 0`` on valid nonzero X, ``g^ >= 0`` and ``g^(0) > 0``.

    The value reported is ``g(0) / g^(0)``.
    """
    if inst.variant == LINEAR_VALUED:
        raise ValueError("use verify_dual_linear_valued for the linear-valued program")
    domain = _as_table(g)
    if g.side != PRIMAL:
        raise ValueError("verify_dual expects a primal-side table")
    if domain == "dense":
        if g.dim != inst.dim:
            raise ValueError(f"table dimension {g.dim} does not match l*n = {inst.dim}")
        gh = fourier(g)
        mask = valid_mask(inst)
        zero = 0
        wit = _Witness("dense", inst.ell, inst.n)
    else:
        sp = g.space
        if (sp.ell, sp.n) != (inst.ell, inst.n):
            raise ValueError("profile space does not match the instance")
        gh = profile_fourier(g)
        mask = profile_valid_mask(sp, inst.d, inst.variant)
        zero = sp.zero_index()
        wit = _Witness("profile", inst.ell, inst.n, sp)
    mask = mask.copy()
    mask[zero] = False
    tau_g, tau_h = _tau(g, g.mode), _tau(gh, g.mode)
    violations = []
    residuals = {}
    v, residuals["nonpositive_on_valid"] = _check_upper(g, mask, 0, "nonpositive_on_valid", wit, tau_g)
    violations += [v] if v else []
    v, residuals["fourier_nonnegative"] = _check_lower(gh, np.ones(len(gh.data), dtype=bool), 0, "fourier_nonnegative", wit, tau_h)
    violations += [v] if v else []
    h0 = gh[zero]
    if not h0 > tau_h:
        violations.append(Violation("fourier_origin_positive", wit(zero), -h0))
    feasible = not violations
    value = g[zero] / h0 if feasible else None
    extra = {"g0": g[zero], "ghat0": h0}
    if g.mode == FLOAT:
        extra.update({f"residual_{k}": float(r) for k, r in residuals.items()})
    return VerificationReport(inst, feasible, value, violations, g.mode, domain, extra)


def verify_dual_linear_valued(g: ValueTable, inst: Instance) -> VerificationReport:
    """The four constraint families of the linear-valued program (dense).

    ``g <= 1`` is checked on linear-valid configurations other than 0: at 0
    the objective ``g(0)`` itself is the bound and exceeds 1 for any useful
    certificate.
    """
    if not isinstance(g, ValueTable):
        raise TypeError("linear-valued verification runs on dense tables")
    if g.dim != inst.dim:
        raise ValueError(f"table dimension {g.dim} does not match l*n = {inst.dim}")
    ell, n = inst.ell, inst.n
    wit = _Witness("dense", ell, n)
    gh = fourier(g)
    tau_g, tau_h = _tau(g, g.mode), _tau(gh, g.mode)
    one = 1.0 if g.mode == FLOAT else Fraction(1)
    cap = one - one / ((1 << ell) - 1)
    violations = []
    r1 = np.zeros(len(g.data), dtype=bool)
    r1[rank_one_indices(ell, n, inst.d)] = True
    v, _ = _check_upper(g, r1, cap, "rank_one_bound", wit, tau_g)
    violations += [v] if v else []
    lin = valid_mask(Instance(n, inst.d, ell, LINEAR))
    lin[0] = False
    v, _ = _check_upper(g, lin, one, "at_most_one_on_valid", wit, tau_g)
    violations += [v] if v else []
    v, _ = _check_lower(gh, np.ones(len(gh.data), dtype=bool), 0, "fourier_nonnegative", wit, tau_h)
    violations += [v] if v else []
    dev = gh[0] - one
    if abs(dev) > tau_h:
        violations.append(Violation("fourier_origin_one", wit(0), dev))
    feasible = not violations
    return VerificationReport(inst, feasible, g[0] if feasible else None, violations, g.mode, "dense", {"ghat0": gh[0]})


def verify_eigen_condition(
    lam_hat: ProfileTable,
    inst: Instance,
    shift: int = 0,
    power: int = 1,
    threshold=None,
    us: Sequence[int] | None = None,
) -> VerificationReport:
    """Check ``(A^u + shift I)^power f >= threshold f`` pointwise by profile.

    ``threshold`` defaults to ``n - 2d + 2``.  The report value is the worst
    ratio over points where ``f > 0`` (points with ``f = 0`` only need the
    left side nonnegative).
    """
    sp = lam_hat.space
    if (sp.ell, sp.n) != (inst.ell, inst.n):
        raise ValueError("profile space does not match the instance")
    if np.any(lam_hat.signs() < 0):
        raise ValueError("the function must be nonnegative")
    threshold = Fraction(inst.n - 2 * inst.d + 2) if threshold is None else threshold
    if lam_hat.mode == FLOAT:
        threshold = float(threshold)
    us = list(range(1, sp.T)) if us is None else list(us)
    wit = _Witness("profile", inst.ell, inst.n, sp)
    violations = []
    worst_ratio, worst_at = None, None
    pos = np.flatnonzero(lam_hat.signs() > 0)
    for u in us:
        h = lam_hat
        for _ in range(power):
            a = apply_au_symmetric(h, u)
            h = a + h * shift if shift else a
        diff = h - lam_hat * threshold
        tau = _tau(h, lam_hat.mode)
        k = _argext(diff.data, np.ones(sp.size, dtype=bool), largest=False)
        if -diff[k] > tau:
            violations.append(Violation(f"eigen_u{u}", wit(k), -diff[k]))
        for p in pos:
            ratio = h[int(p)] / lam_hat[int(p)]
            if worst_ratio is None or ratio < worst_ratio:
                worst_ratio, worst_at = ratio, (u, wit(int(p)))
    extra = {"worst_ratio": worst_ratio, "worst_at": None if worst_at is None else f"u={worst_at[0]} {worst_at[1]}", "threshold": threshold}
    return VerificationReport(inst, not violations, worst_ratio if not violations else None, violations, lam_hat.mode, "profile", extra)


def verify_problem1(gamma_hat: ValueTable | ProfileTable, phi_lin: ValueTable | ProfileTable, inst: Instance) -> VerificationReport:
    """Constraints of the support-minimisation problem for linear codes.

    ``G^(0) = 1``, ``G^ >= 0`` and ``Phi^ *_F G^ >= 2^((l-1)(2^l-1)) G^``.
    The convolution is evaluated as the transform of ``Phi . G``.  The
    report value is ``|supp G^|`` (counted with orbit sizes by profile).
    """
    domain = _as_table(gamma_hat)
    if gamma_hat.side != FOURIER:
        raise ValueError("gamma_hat must be a Fourier-side table")
    ell = inst.ell
    const = 1 << ((ell - 1) * ((1 << ell) - 1))
    if domain == "dense":
        gamma = inverse_fourier(gamma_hat)
        conv = fourier(phi_lin * gamma)
        zero = 0
        wit = _Witness("dense", ell, inst.n)
        weights = None
    else:
        sp = gamma_hat.space
        gamma = profile_fourier(gamma_hat) * (1 << (ell * inst.n))
        conv = profile_fourier(phi_lin * gamma)
        zero = sp.zero_index()
        wit = _Witness("profile", ell, inst.n, sp)
        weights = sp.multinomials
    violations = []
    tau = _tau(conv, gamma_hat.mode)
    one = 1.0 if gamma_hat.mode == FLOAT else Fraction(1)
    if abs(gamma_hat[zero] - one) > tau:
        violations.append(Violation("origin_one", wit(zero), gamma_hat[zero] - one))
    v, _ = _check_lower(gamma_hat, np.ones(len(gamma_hat.data), dtype=bool), 0, "nonnegative", wit, _tau(gamma_hat, gamma_hat.mode))
    violations += [v] if v else []
    diff = conv - gamma_hat * const
    v, _ = _check_lower(diff, np.ones(len(diff.data), dtype=bool), 0, "phi_convolution", wit, tau)
    violations += [v] if v else []
    supp = gamma_hat.signs() != 0
    size = int(supp.sum()) if weights is None else int(weights[supp].sum())
    feasible = not violations
    return VerificationReport(inst, feasible, size if feasible else None, violations, gamma_hat.mode, domain, {"support_size": size})
