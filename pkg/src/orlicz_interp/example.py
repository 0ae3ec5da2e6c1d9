"""The three-space example family and its witness computations.

The family tags the thirds of the circle with the identity germ, a
power-log germ, and the exponential-square-root germ.  This module computes
the induced derivation on flat unit vectors, the log-ratio witness
sequences, the sandwich margins, and the divergence tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .functions import OrliczFunction, phi0, phi1, phi2, psi1, psi2, \
    legendre_transform, _psi1_germ
from .sequences import FiniteSequence, luxemburg_norm
from .interpolation import (
    Arc,
    FiniteFamily,
    derivation,
    interpolated_function,
)

__all__ = [
    "example_family",
    "WitnessRow",
    "witness_row",
    "SandwichRow",
    "sandwich_check",
    "ell2_equivalence_probe",
    "DivergenceReport",
    "divergence_report",
    "psi2_closed_form_check",
]

_THIRD = 2.0 * math.pi / 3.0

SQRT3_OVER_2PI = math.sqrt(3.0) / (2.0 * math.pi)
THREE_OVER_2PI = 3.0 / (2.0 * math.pi)


@lru_cache(maxsize=1)
def example_family() -> FiniteFamily:
    """The fixed three-arc family on equal thirds of the circle."""
    return FiniteFamily([
        (phi0(), Arc(0.0, _THIRD)),
        (phi1(), Arc(_THIRD, 2.0 * _THIRD)),
        (phi2(), Arc(2.0 * _THIRD, 2.0 * math.pi)),
    ])


def _log_ratios(log_u: float) -> tuple[float, float]:
    """The witness log-ratios at factorization argument exp(log_u).

    A = log( inv0(u) inv2(u) / inv1(u)^2 ),  B = log( inv2(u) / inv0(u) ).
    """
    f0, f1, f2 = example_family().functions
    l0 = f0.log_inverse(log_u)
    l1 = f1.log_inverse(log_u)
    l2 = f2.log_inverse(log_u)
    return l0 + l2 - 2.0 * l1, l2 - l0


@dataclass(frozen=True)
class WitnessRow:
    n: int
    A_n: float
    B_n: float
    omega_check: float


def witness_row(n: int) -> WitnessRow:
    """Witness values at the flat unit vector with n entries.

    The factorization argument of the derivation at s_n is exactly 1/n: the
    Luxemburg norm makes the modular equal 1, and the n equal entries then
    each contribute phi_z(|s_n(j)|/rho) = 1/n.  The closed forms are
    evaluated at that argument in the log domain; omega_check is the largest
    pointwise deviation of the derivation from the closed-form prediction.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    log_u = -math.log(n)
    a_n, b_n = _log_ratios(log_u)

    family = example_family()
    sn = FiniteSequence.flat(n)
    rep = derivation(family, 0.0, sn)
    scale = 1.0 / math.sqrt(n)
    expected1 = SQRT3_OVER_2PI * a_n * scale
    expected2 = THREE_OVER_2PI * b_n * scale
    dev = 0.0
    for j in rep.omega.indices():
        dev = max(dev,
                  abs(rep.omega1[j] - expected1),
                  abs(rep.omega2[j] - expected2),
                  abs(rep.omega[j] - (rep.omega1[j] + 1j * rep.omega2[j])))
    return WitnessRow(n=n, A_n=a_n, B_n=b_n, omega_check=dev)


@dataclass(frozen=True)
class SandwichRow:
    t: float
    lower_margin: float   # log t - log lhs; positive means the bound holds
    upper_margin: float   # log rhs - log t; positive means the bound holds


def sandwich_check(t_grid: Sequence[float]) -> list[SandwichRow]:
    """Margins of the two product inequalities, evaluated in log domain.

    lower: inv1(t^4/100)^(1/2) inv2(t^4/100)^(1/2) <= t
    upper: t <= inv1(t^4)^(1/2) inv2(t^4)^(1/2)
    """
    _, f1, f2 = example_family().functions
    rows = []
    for t in t_grid:
        if t <= 0:
            raise ValueError("grid values must be positive")
        lt = math.log(t)
        l4 = 4.0 * lt
        lhs = 0.5 * (f1.log_inverse(l4 - math.log(100.0))
                     + f2.log_inverse(l4 - math.log(100.0)))
        rhs = 0.5 * (f1.log_inverse(l4) + f2.log_inverse(l4))
        rows.append(SandwichRow(t=float(t), lower_margin=lt - lhs,
                                upper_margin=rhs - lt))
    return rows


@dataclass(frozen=True)
class Ell2ProbeReport:
    supports: list
    min_ratio: dict
    max_ratio: dict
    band_width: dict          # max/min per support
    drift_factor: float       # band width at the largest vs smallest support


def ell2_equivalence_probe(trials: int, max_support: int,
                           seed: int = 20240901) -> Ell2ProbeReport:
    """Ratio of the interpolated-function norm to the l2 norm on random data.

    Draws complex gaussian vectors at log-spaced support sizes from 2 to
    max_support and reports the two-sided ratio band per support.
    """
    if trials < 1:
        raise ValueError("needs at least one trial")
    family = example_family()
    f0 = interpolated_function(family, 0.0)
    rng = np.random.default_rng(seed)

    n_buckets = max(2, int(math.log2(max_support)))
    supports = sorted({2, max_support}
                      | {int(round(2 ** k)) for k in
                         np.linspace(1, math.log2(max_support), n_buckets)})
    per = max(1, trials // len(supports))
    min_ratio, max_ratio, width = {}, {}, {}
    for m in supports:
        ratios = []
        for _ in range(per):
            v = rng.normal(size=m) + 1j * rng.normal(size=m)
            x = FiniteSequence.from_values(v)
            ratios.append(luxemburg_norm(f0, x) / x.lp_norm(2.0))
        min_ratio[m] = min(ratios)
        max_ratio[m] = max(ratios)
        width[m] = max_ratio[m] / min_ratio[m]
    drift = width[supports[-1]] / width[supports[0]]
    return Ell2ProbeReport(supports=supports, min_ratio=min_ratio,
                           max_ratio=max_ratio, band_width=width,
                           drift_factor=drift)


@dataclass(frozen=True)
class DivergenceReport:
    rows: list                 # (n, A_n, B_n)
    gamma_rows: dict           # gamma -> list of |gamma A_n - B_n|
    tail_increasing: bool      # |A_n| increasing over the last five grid rows
    gamma_growth: dict         # gamma -> max over grid minus value at first n


def divergence_report(n_grid: Sequence[int],
                      gamma_grid: Sequence[float]) -> DivergenceReport:
    """|A_n| and |gamma A_n - B_n| along the grid.

    Evidence tables only: growth over a finite grid, never a limit claim.
    The log-ratio argument follows the derivation's factorization value 1/n.
    """
    ns = sorted(int(n) for n in n_grid)
    if any(n < 1 for n in ns):
        raise ValueError("grid entries must be positive integers")
    rows = []
    for n in ns:
        a, b = _log_ratios(-math.log(n))
        rows.append((n, a, b))
    abs_a = [abs(a) for _, a, _ in rows]
    tail = abs_a[-5:] if len(abs_a) >= 5 else abs_a
    tail_increasing = all(x < y for x, y in zip(tail, tail[1:]))
    gamma_rows, gamma_growth = {}, {}
    for g in gamma_grid:
        vals = [abs(g * a - b) for _, a, b in rows]
        gamma_rows[g] = vals
        gamma_growth[g] = max(vals) - vals[0]
    return DivergenceReport(rows=rows, gamma_rows=gamma_rows,
                            tail_increasing=tail_increasing,
                            gamma_growth=gamma_growth)


@dataclass(frozen=True)
class Psi2CheckRow:
    s: float
    numeric: float
    closed_form: float
    rel_dev: float
    argmax: float


@dataclass(frozen=True)
class Psi2CheckReport:
    rows: list
    max_rel_dev: float
    identity_max_rel_dev: float   # phi2 vs 5^-2 psi2^2 pointwise


def psi2_closed_form_check(s_grid: Sequence[float]) -> Psi2CheckReport:
    """Numeric Legendre transform of the raw psi1 map against the closed form.

    The transform maximizes t*s - t log(t)^2 over t in (0, 8], which brackets
    the interior maximizer near t = 1 for small s.  Also verifies the
    pointwise identity phi2 = 5^-2 psi2^2 on the same grid.
    """
    p2 = psi2()
    f2 = phi2()
    rows = []
    worst = 0.0
    for s in s_grid:
        if not (0.0 < s <= 0.1):
            raise ValueError("grid values must lie in (0, 0.1]")
        numeric, argmax = legendre_transform(_psi1_germ, float(s), 8.0)
        closed = p2.evaluate(float(s))
        rel = abs(numeric - closed) / closed
        worst = max(worst, rel)
        rows.append(Psi2CheckRow(s=float(s), numeric=numeric,
                                 closed_form=closed, rel_dev=rel,
                                 argmax=argmax))
    ident = 0.0
    for s in s_grid:
        lhs = f2.evaluate(float(s))
        rhs = p2.evaluate(float(s)) ** 2 / 25.0
        ident = max(ident, abs(lhs - rhs) / rhs)
    return Psi2CheckReport(rows=rows, max_rel_dev=worst,
                           identity_max_rel_dev=ident)
