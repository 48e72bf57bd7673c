"""Upper bounds on cumulants and growth-regime classification.

The subgraph-count bounds combine, per block count r, the number of
connected row-injective partitions with the minimal contraction edge
count: the partition count controls the n power and the edge count the
retention-probability power. Regime classification compares the retention
exponent against the motif's density thresholds; all comparisons are
exact rational arithmetic so a regime is never misclassified by floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterable, Optional, Sequence

from gmpy2 import mpq

from .errors import CriticalRegimeError
from .exact import FiniteModelSpec, linear_projection_variance, rational
from .motifs import MotifGraph, automorphism_count, contraction_profile, is_strongly_balanced

# Any rational upper bound for e**2 keeps the derived constants valid;
# a smaller constant only weakens the bound being asserted.
_E_SQUARED_UPPER = mpq(7389056098930651, 10 ** 15)


def kernel_cumulant_bound(n: int, k: int, sup_norm, order: int) -> mpq:
    """Universal j-th cumulant bound from the kernel sup norm alone."""
    if order < 1:
        raise ValueError("order must be >= 1")
    s = rational(sup_norm)
    j = order
    return (mpq(n) ** (1 + (k - 1) * j) * s ** j * mpq(j) ** (j - 1)
            * mpq(factorial(j)) ** k * mpq(factorial(k)) ** (j - 1))


def subgraph_cumulant_bound(g: MotifGraph, n: int, p, order: int,
                            cap: Optional[int] = None) -> mpq:
    """Partition-resolved cumulant bound for subgraph counts.

    Sum over block counts r of (partition count) * n**r * p**(minimal
    contraction edges), scaled by j**(j-1) / a(G)**j.
    """
    if order < 2:
        raise ValueError("order must be >= 2")
    p = rational(p)
    j = order
    a_g = automorphism_count(g)
    profile = contraction_profile(g, j, cap)
    acc = mpq(0)
    for r, (count, min_edges) in profile.items():
        acc += count * mpq(n) ** r * p ** min_edges
    return mpq(j) ** (j - 1) / mpq(a_g) ** j * acc


def pointwise_regime(g: MotifGraph, n: int, p) -> str:
    """dense / sparse / critical by comparing p against n**(-(v-1)/e) exactly."""
    p = rational(p)
    lhs = p ** g.edge_count * mpq(n) ** (g.vertex_count - 1)
    if lhs > 1:
        return "dense"
    if lhs < 1:
        return "sparse"
    return "critical"


def regime_bound(g: MotifGraph, n: int, p, order: int) -> mpq:
    """Regime-specific cumulant bound for strongly balanced motifs.

    The dense-side bound carries n**(1+(v-1)j) p**(j e); the sparse side
    n**v p**e. Exactly on the boundary neither applies and the call is
    refused.
    """
    if order < 2:
        raise ValueError("order must be >= 2")
    if not is_strongly_balanced(g):
        raise ValueError("regime bounds require a strongly balanced motif")
    p = rational(p)
    j = order
    k = g.vertex_count
    e = g.edge_count
    coeff = (mpq(j) ** (j - 1) * mpq(factorial(j)) ** k
             * mpq(factorial(k)) ** (j - 1) / mpq(automorphism_count(g)) ** j)
    regime = pointwise_regime(g, n, p)
    if regime == "dense":
        return coeff * mpq(n) ** (1 + (k - 1) * j) * p ** (j * e)
    if regime == "sparse":
        return coeff * mpq(n) ** k * p ** e
    raise CriticalRegimeError(
        f"p == n**(-(v-1)/e) exactly at n={n}; no bound applies on the boundary")


@dataclass(frozen=True)
class RegimeClassification:
    """Where a retention schedule p_n = c * n**-a sits for a given motif."""

    variance_regime: str      # dense | sparse | critical
    containment_regime: str   # supercritical | subcritical | critical
    exponent: Fraction
    variance_threshold: Fraction     # (v-1)/e
    containment_threshold: Fraction  # v/e


def classify_regime(g: MotifGraph, exponent) -> RegimeClassification:
    """Classify a schedule exponent; thresholds compared as exact rationals."""
    if not g.is_connected():
        raise ValueError("regime classification requires a connected motif")
    a = Fraction(exponent)
    v, e = g.vertex_count, g.edge_count
    var_thr = Fraction(v - 1, e)
    cont_thr = Fraction(v, e)
    if a < var_thr:
        variance = "dense"
    elif a > var_thr:
        variance = "sparse"
    else:
        variance = "critical"
    if a < cont_thr:
        containment = "supercritical"
    elif a > cont_thr:
        containment = "subcritical"
    else:
        containment = "critical"
    return RegimeClassification(variance_regime=variance,
                                containment_regime=containment,
                                exponent=a,
                                variance_threshold=var_thr,
                                containment_threshold=cont_thr)


# -- kernel-level variance floor and normalized-cumulant constants ----------


@dataclass(frozen=True)
class VarianceFloor:
    """Second-cumulant lower bound kappa_2 >= coefficient * (n)_(2k-1).

    Valid from min_n on; both values derive from the kernel alone.
    """

    coefficient: mpq
    min_n: mpq


def variance_floor(spec: FiniteModelSpec) -> VarianceFloor:
    var = linear_projection_variance(spec)
    if var <= 0:
        raise ValueError("the linear projection variance is zero; no floor applies")
    sup = spec.sup_norm()
    k = spec.k
    min_n = mpq(2) ** (3 * k + 1) * sup ** 2 * factorial(k) / var
    return VarianceFloor(coefficient=var / 2, min_n=min_n)


def normalized_cumulant_bound_sq(spec: FiniteModelSpec, n: int, order: int) -> mpq:
    """Square of the normalized j-th cumulant bound (squared to stay rational).

    Valid for n >= max(4(k-1), variance_floor(spec).min_n); the squared
    form avoids the half-integer powers in the bound itself.
    """
    j = order
    if j < 3:
        raise ValueError("normalized bounds start at order 3")
    k = spec.k
    sup = spec.sup_norm()
    c_low = variance_floor(spec).coefficient
    num = (sup ** (2 * j) * mpq(j) ** (2 * (j - 1)) * mpq(factorial(j)) ** (2 * k)
           * mpq(factorial(k)) ** (2 * (j - 1)) * mpq(n) ** (2 * (1 + (k - 1) * j)))
    den = (c_low * (mpq(n) / 2) ** (2 * k - 1)) ** j
    return num / den


def statulevicius_constants(spec: FiniteModelSpec) -> tuple:
    """(gamma, c_tilde) for the factorial-growth form of the cumulant bound.

    gamma = k, and c_tilde is the largest rational constant for which the
    chain of inequalities behind normalized_cumulant_bound_sq yields
    |kappa_j| <= (j!)**(1+gamma) / (n*c_tilde)**(j/2-1) at orders 3 and 4.
    """
    k = spec.k
    sup = spec.sup_norm()
    c_low = variance_floor(spec).coefficient
    a_sq = sup ** 2 * _E_SQUARED_UPPER * mpq(factorial(k)) ** 2 \
        * mpq(2) ** (2 * k - 1) / c_low
    c3 = mpq(factorial(k)) ** 2 / a_sq ** 3
    c4 = mpq(factorial(k)) / a_sq ** 2
    return (k, min(c3, c4))


def statulevicius_form_bound_sq(spec: FiniteModelSpec, n: int, order: int) -> mpq:
    """Square of (j!)**(k+1) / (n*c_tilde)**(j/2-1) with the derived constant."""
    j = order
    if j not in (3, 4):
        raise ValueError("the derived constant is calibrated for orders 3 and 4")
    _, c_tilde = statulevicius_constants(spec)
    return mpq(factorial(j)) ** (2 * (spec.k + 1)) / (mpq(n) * c_tilde) ** (j - 2)


# -- empirical cumulant-growth fitting ---------------------------------------


@dataclass(frozen=True)
class StatuleviciusFit:
    """Largest scale for which |kappa_j| <= (j!)**(1+gamma) / scale**(j-2)."""

    gamma: float
    delta: float
    orders: tuple
    vacuous: bool

    def to_json(self) -> dict:
        return {"gamma": self.gamma,
                "delta": None if self.vacuous else self.delta,
                "orders": list(self.orders),
                "vacuous": self.vacuous}


def fit_statulevicius(kappas: Sequence, gamma: float,
                      orders: Iterable[int]) -> StatuleviciusFit:
    """Fit the growth scale from a normalized cumulant sequence.

    kappas lists kappa_1, kappa_2, ... of the standardized statistic, so
    kappa_1 must be 0 and kappa_2 must be 1. Orders with kappa_j == 0
    impose no constraint; if none constrains, the condition holds
    vacuously and the scale is reported as infinite.
    """
    ks = [float(x) for x in kappas]
    orders = tuple(sorted(set(int(j) for j in orders)))
    if not orders or orders[0] < 3:
        raise ValueError("fitted orders must start at 3")
    if orders[-1] > len(ks):
        raise ValueError("cumulant sequence does not cover the requested orders")
    if abs(ks[0]) > 1e-9 or abs(ks[1] - 1) > 1e-9:
        raise ValueError("sequence is not normalized (needs kappa_1=0, kappa_2=1)")
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    deltas = []
    for j in orders:
        mag = abs(ks[j - 1])
        if mag == 0:
            continue
        deltas.append((mag / factorial(j) ** (1.0 + gamma)) ** (-1.0 / (j - 2)))
    if not deltas:
        return StatuleviciusFit(gamma=float(gamma), delta=math.inf,
                                orders=orders, vacuous=True)
    return StatuleviciusFit(gamma=float(gamma), delta=min(deltas),
                            orders=orders, vacuous=False)
