"""Rate curves and the overhead of the hierarchy bound."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .constructions import build_lambda, first_lp_value


def binary_entropy(x: float) -> float:
    if not 0 <= x <= 1:
        raise ValueError("entropy argument must lie in [0, 1]")
    if x in (0, 1):
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def gv_rate(delta: float) -> float:
    return 1 - binary_entropy(delta)


def mrrw_rate(delta: float) -> float:
    return binary_entropy(0.5 - math.sqrt(delta * (1 - delta)))


def log2_fraction(q: Fraction) -> float:
    return math.log2(q.numerator) - math.log2(q.denominator)


def finite_n_rate(n: int, delta: float, eps=1) -> tuple[int, float]:
    """``(d, log2(value)/n)`` for the first-LP certificate at ``d = round(delta n)``."""
    d = max(2, round(delta * n))
    lam = build_lambda(n, d, Fraction(eps), check=False)
    return d, log2_fraction(first_lp_value(lam)) / n


def overhead(ell: int, n: int) -> float:
    """Per-symbol cost ``2^l log2(l) log2(n) / (l n)`` of the hierarchy bound."""
    return (1 << ell) * math.log2(ell) * math.log2(n) / (ell * n)


def overhead_threshold(n: int) -> float:
    return math.log2(n) - math.log2(math.log2(n))


@dataclass
class OverheadRow:
    n: int
    threshold: float
    predicted: int
    first_crossing: int | None
    overheads: dict


def overhead_table(ns, ells) -> list[OverheadRow]:
    """First ``l`` with overhead above one bit per symbol, next to the prediction.

    The prediction is the first integer strictly above ``log2 n - log2 log2 n``.
    """
    rows = []
    for n in ns:
        ov = {ell: overhead(ell, n) for ell in ells}
        cross = next((ell for ell in sorted(ells) if ov[ell] > 1), None)
        thr = overhead_threshold(n)
        rows.append(OverheadRow(n, thr, math.floor(thr) + 1, cross, ov))
    return rows


def parse_grid(text: str) -> list[float]:
    """``"lo:hi:step"`` inclusive of ``hi`` (with rounding slack) or a comma list."""
    if ":" in text:
        lo, hi, step = (Fraction(s) for s in text.split(":"))
        if step <= 0:
            raise ValueError("grid step must be positive")
        out = []
        x = lo
        while x <= hi:
            out.append(float(x))
            x += step
        return out
    return [float(s) for s in text.split(",") if s.strip()]
