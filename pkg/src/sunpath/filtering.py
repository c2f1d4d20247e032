"""Minimax eigenstate-filtering polynomial and its matrix application.

R_ell(x; delta) is the degree-2*ell Chebyshev ratio that equals 1 at x = 0
and stays below 2 exp(-sqrt(2) ell delta) on delta <= |x| <= 1. Applied to
H / alpha it suppresses every eigencomponent outside the 0-eigenspace.

The denominator T_ell evaluated outside [-1, 1] grows like exp(ell theta),
so scalar evaluation works with log-cosh arithmetic and the matrix
application runs a rescaled three-term recurrence on vectors; a Chebyshev
matrix power is never formed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NonpositiveGap
from .hamiltonian import EffectiveHamiltonian, flat_index

INV_SQRT12 = 1.0 / math.sqrt(12.0)
_SQRT2 = math.sqrt(2.0)
_DELTA_SLACK = 1e-12


@dataclass(frozen=True)
class FilterSpec:
    """Degree, gap parameter, normalization and error budget of one filter."""

    ell: int
    delta: float
    alpha: float
    eps: float
    eps_a: float
    eps_prime: float

    def __post_init__(self):
        if self.ell < 1:
            raise DomainError("filter half-degree ell must be >= 1")
        if not 0.0 < self.delta <= INV_SQRT12 + _DELTA_SLACK:
            raise DomainError(f"delta={self.delta} outside (0, 1/sqrt(12)]")

    @property
    def degree(self) -> int:
        return 2 * self.ell

    def residual_bound(self) -> float:
        return residual_bound(self.ell, self.delta)


def residual_bound(ell: int, delta: float) -> float:
    """2 exp(-sqrt(2) ell delta): filtering error outside the gap."""
    return 2.0 * math.exp(-_SQRT2 * ell * delta)


def choose_degree(gap: float, alpha: float, eps: float) -> int:
    """Smallest ell with 2 exp(-sqrt(2) ell delta) <= eps, delta = min(gap/alpha, 1/sqrt(12))."""
    if gap <= 0:
        raise NonpositiveGap(f"gap={gap}")
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps={eps} outside (0, 1)")
    delta = min(gap / alpha, INV_SQRT12)
    exact = math.log(2.0 / eps) / (_SQRT2 * delta)
    return max(1, math.ceil(exact * (1.0 - 1e-12)))


def _log_cosh(z: float) -> float:
    return z + math.log1p(math.exp(-2.0 * z)) - math.log(2.0)


def _check_domain(x: float, delta: float) -> None:
    if abs(x) > 1.0 + 1e-12:
        raise DomainError(f"|x|={abs(x)} > 1")
    if not 0.0 < delta <= INV_SQRT12 + _DELTA_SLACK:
        raise DomainError(f"delta={delta} outside (0, 1/sqrt(12)]")


def _shift(x: float, delta: float) -> float:
    return -1.0 + 2.0 * (x * x - delta * delta) / (1.0 - delta * delta)


def eval_r(x: float, ell: int, delta: float) -> float:
    """R_ell(x; delta) via the cos/cosh closed forms of Chebyshev polynomials.

    The ratio is assembled in log space so the exponentially large
    denominator never overflows.
    """
    _check_domain(x, delta)
    y = _shift(x, delta)
    y0 = _shift(0.0, delta)
    theta0 = math.acosh(-y0)
    log_t0 = _log_cosh(ell * theta0)
    if y >= -1.0:
        num = math.cos(ell * math.acos(min(1.0, max(-1.0, y))))
        sign = -1.0 if ell % 2 else 1.0
        return num * sign * math.exp(-log_t0)
    return math.exp(_log_cosh(ell * math.acosh(-y)) - log_t0)


def eval_r_three_term(x: float, ell: int, delta: float) -> float:
    """Same ratio by the plain scalar three-term recurrence (stability cross-check)."""
    _check_domain(x, delta)

    def cheb(y: float) -> float:
        t_prev, t_cur = 1.0, y
        if ell == 0:
            return t_prev
        for _ in range(ell - 1):
            t_prev, t_cur = t_cur, 2.0 * y * t_cur - t_prev
        return t_cur

    return cheb(_shift(x, delta)) / cheb(_shift(0.0, delta))


def apply_filter(h: EffectiveHamiltonian, spec: FilterSpec) -> np.ndarray:
    """Unnormalized R_ell(H / alpha; delta) e_s via a rescaled Chebyshev recurrence.

    The recurrence runs in the shifted variable applied to vectors: with
    M = -I + 2 ((H/alpha)^2 - delta^2 I) / (1 - delta^2), the iterates
    T_k(M) e_s are tracked under a shared log-scale so that intermediate
    growth ~ cosh(k theta0) never overflows, and the final division by
    T_ell at the shift of zero happens in log space.
    """
    delta, alpha, ell = spec.delta, spec.alpha, spec.ell
    c2 = 2.0 / (1.0 - delta * delta)
    y0 = _shift(0.0, delta)

    def m_apply(vec: np.ndarray) -> np.ndarray:
        w = h.dense @ vec
        w = h.dense @ w
        return c2 * w / (alpha * alpha) + y0 * vec

    e_s = np.zeros(h.dim)
    e_s[flat_index(h.n, 1, 1)] = 1.0
    log_scale = 0.0
    prev = e_s.copy()
    cur = m_apply(e_s)
    for _ in range(ell - 1):
        nxt = 2.0 * m_apply(cur) - prev
        prev, cur = cur, nxt
        top = float(np.max(np.abs(cur)))
        if top > 1e100:
            prev = prev / top
            cur = cur / top
            log_scale += math.log(top)
    theta0 = math.acosh(-y0)
    log_t0 = _log_cosh(ell * theta0)
    sign = -1.0 if ell % 2 else 1.0
    return sign * cur * math.exp(log_scale - log_t0)


def robustness_bound(ell: int, eps_a: float, alpha: float) -> float:
    """Error inflation from an eps_a-accurate block encoding (natural log).

    Pure bound bookkeeping: no inexact encoding is simulated, the value
    only enters the reported error budget.
    """
    if eps_a < 0:
        raise DomainError("eps_a must be non-negative")
    if eps_a == 0:
        return 0.0
    bracket = math.log(2.0 * alpha / eps_a + 1.0) + 1.0
    return 16.0 * ell * ell * eps_a / alpha * bracket * bracket


def plan_filter(
    report,
    alpha: float | None = None,
    eps: float | None = None,
    eps_a: float | None = None,
    eps_prime: float | None = None,
) -> FilterSpec:
    """Filter budget for one instance, from its spectral data.

    Defaults follow the algorithm's error split: eps_prime = 1/(4mn),
    eps = p_min ||Pi_0 e_s|| / 4 with p_min the smallest odd-root mass,
    eps_a = (mn)^-3 (bookkeeping only). alpha defaults to the d^2
    block-encoding normalization.
    """
    d, m, n = report.d, report.m, report.n
    if alpha is None:
        alpha = float(d * d)
    overlap = report.overlap_norm_s()
    p_min = overlap * overlap
    if eps_prime is None:
        eps_prime = 1.0 / (4.0 * m * n)
    if eps is None:
        eps = p_min * overlap / 4.0
    if eps_a is None:
        eps_a = float(m * n) ** -3
    ell = choose_degree(report.delta, alpha, eps)
    delta = min(report.delta / alpha, INV_SQRT12)
    return FilterSpec(ell=ell, delta=delta, alpha=alpha, eps=eps, eps_a=eps_a, eps_prime=eps_prime)
