"""Exact symbol error probability of LoRa on Rician block fading.

Two independent routes are provided:

* the closed-form alternating binomial sum (and its noncoherent special case),
  which suffers catastrophic cancellation as M grows and is therefore
  evaluated in working precision chosen from the size of its largest term;
* direct adaptive quadrature of the conditional error probability against
  the noncentral chi-square density of the correct-bin metric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .link import LinkBudget
from .modem import LoRaParams
from .quadrature import QuadratureError, integrate
from .specfun import log_binomial, noncentral_chi2_pdf

__all__ = [
    "AlternatingSum",
    "PrecisionError",
    "QuadratureError",
    "ber_factor",
    "ber_from_ser",
    "exact_rician_sum",
    "ser_exact_rician",
    "ser_noncoherent",
    "ser_numeric_integration",
]

DEFAULT_MAX_SF = 7
TRUST_RTOL = 1e-8

_GUARD_DIGITS = 25
_TARGET_LOSS = 1e-22
_MAX_DIGITS = 4000


class PrecisionError(ValueError):
    """The exact sum was requested for a spreading factor above the allowed one."""


@dataclass(frozen=True)
class AlternatingSum:
    """Value of an alternating binomial sum plus its numerical diagnostics.

    ``condition`` is sum(|t_n|) / |sum(t_n)|; ``rel_error`` is the estimated
    relative error of ``value`` given the working precision ``digits``.
    """

    value: float
    condition: float
    digits: int
    rel_error: float

    @property
    def trusted(self) -> bool:
        return self.rel_error <= TRUST_RTOL


def _alternating_sum(m_size: int, gamma: float, mu2: float, s2: float) -> AlternatingSum:
    """sum_{n=1}^{M-1} (-1)^{n+1} C(M-1, n) / d_n * exp(-n gamma mu2 / d_n),
    d_n = (n + 1) + n s2 gamma.

    Inputs are converted to multiprecision exactly; the binomials are exact
    integers. Precision is raised until the cancellation is covered.
    """
    top = m_size - 1
    if top == 0:
        return AlternatingSum(0.0, 1.0, 0, 0.0)
    # magnitude of the largest term, in decimal digits, from double precision
    log_terms = [
        log_binomial(top, n)
        - math.log((n + 1) + n * s2 * gamma)
        - n * gamma * mu2 / ((n + 1) + n * s2 * gamma)
        for n in range(1, m_size)
    ]
    digits = int(max(0.0, max(log_terms) / math.log(10))) + _GUARD_DIGITS
    while True:
        with mpmath.workdps(digits):
            g = mpmath.mpf(gamma)
            m2 = mpmath.mpf(mu2)
            v2 = mpmath.mpf(s2)
            total = mpmath.mpf(0)
            magnitude = mpmath.mpf(0)
            binom = 1
            for n in range(1, m_size):
                binom = binom * (top - n + 1) // n
                den = (n + 1) + n * v2 * g
                t = binom / den * mpmath.exp(-n * g * m2 / den)
                magnitude += t
                total += t if n % 2 else -t
            condition = magnitude / abs(total) if total != 0 else mpmath.inf
            loss = condition * mpmath.mpf(10) ** (-digits)
            if loss <= _TARGET_LOSS or digits >= _MAX_DIGITS:
                return AlternatingSum(float(total), float(condition), digits, float(loss))
            digits = min(_MAX_DIGITS, int(mpmath.log10(condition)) + _GUARD_DIGITS)


def _check_sf(sf: int, max_sf: int | None) -> None:
    if max_sf is not None and sf > max_sf:
        raise PrecisionError(
            f"exact SER refused for SF={sf} > {max_sf}: the binomial sum cancels "
            f"catastrophically; use ser_numeric_integration or raise max_sf"
        )


def exact_rician_sum(lb: LinkBudget, max_sf: int | None = DEFAULT_MAX_SF) -> AlternatingSum:
    """Exact Rician SER with its precision diagnostics."""
    _check_sf(lb.params.sf, max_sf)
    return _alternating_sum(lb.m_size, lb.es_n0, abs(lb.ch.mu_h) ** 2, lb.ch.sigma_h2)


def ser_exact_rician(lb: LinkBudget, max_sf: int | None = DEFAULT_MAX_SF) -> float:
    """Exact SER on flat Rician block fading (alternating binomial sum).

    Raises PrecisionError for ``sf > max_sf``; pass ``max_sf=None`` to lift the
    limit (evaluation cost then grows with the digits needed, ~M/3).
    """
    return min(1.0, max(0.0, exact_rician_sum(lb, max_sf).value))


def ser_noncoherent(params: LoRaParams, es_n0: float) -> float:
    """Noncoherent orthogonal SER on AWGN with a unit-magnitude random-phase tap."""
    if not es_n0 >= 0:
        raise ValueError(f"es_n0 must be >= 0, got {es_n0!r}")
    value = _alternating_sum(params.m_size, es_n0, 1.0, 0.0).value
    return min(1.0, max(0.0, value))


def _conditional_error(r: np.ndarray, en0: float, m_size: int) -> np.ndarray:
    """1 - (1 - exp(-r / EN0))^(M-1), stable for large M and small r."""
    with np.errstate(divide="ignore"):
        return -np.expm1((m_size - 1) * np.log1p(-np.exp(-r / en0)))


def _support(lb: LinkBudget, tail_tol: float) -> list[float]:
    d = lb.metric()
    en0 = 2.0 * lb.sigma1_2
    m_size = lb.m_size
    sigma0 = d.sigma0
    c = 1.0 + lb.sigma0_2 / lb.sigma1_2
    r_star = en0 * math.log(m_size - 1)

    def tail(r: float) -> float:
        return d.sf(r) * min(1.0, (m_size - 1) * math.exp(-r / en0))

    r_hi = (d.s + 10.0 * sigma0) ** 2 + 2.0 * r_star + 10.0 * en0
    while tail(r_hi) > tail_tol:
        r_hi = (math.sqrt(r_hi) + 5.0 * sigma0) ** 2

    points = {0.0, r_hi, r_star}
    # density peak and the peak of the density tilted by exp(-r / EN0)
    for centre, width in ((d.s, sigma0), (d.s / c, sigma0 / math.sqrt(c))):
        for k in (-8, -4, -2, -1, 0, 1, 2, 4, 8):
            root = centre + k * width
            if root > 0:
                points.add(root * root)
    for mult in (0.25, 1.0, 4.0, 16.0):
        points.add(mult * en0)
    return sorted(p for p in points if 0.0 <= p <= r_hi)


def ser_numeric_integration(
    lb: LinkBudget,
    abs_tol: float = 1e-13,
    rel_tol: float = 1e-11,
    max_intervals: int = 20000,
) -> float:
    """SER by quadrature of P[error | R_m = r] against the density of R_m.

    Raises QuadratureError (carrying the partial result) if the tolerance
    cannot be met within ``max_intervals`` subintervals.
    """
    m_size = lb.m_size
    if lb.es_n0 == 0:
        return (m_size - 1) / m_size
    d = lb.metric()
    en0 = 2.0 * lb.sigma1_2

    def integrand(r):
        return noncentral_chi2_pdf(d, r) * _conditional_error(r, en0, m_size)

    result = integrate(
        integrand,
        _support(lb, 1e-3 * abs_tol),
        abs_tol=abs_tol,
        rel_tol=rel_tol,
        max_intervals=max_intervals,
    )
    return min(1.0, max(0.0, result.value))


def ber_factor(params: LoRaParams) -> float:
    """2^(SF-1) / (2^SF - 1): fraction of bits wrong given a symbol error."""
    return (params.m_size // 2) / (params.m_size - 1)


def ber_from_ser(params: LoRaParams, ser: float) -> float:
    if not 0.0 <= ser <= 1.0:
        raise ValueError(f"ser must lie in [0, 1], got {ser!r}")
    return ber_factor(params) * ser
