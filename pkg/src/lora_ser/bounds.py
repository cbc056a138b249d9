"""Two-region union bounds on the LoRa symbol error probability.

The conditional error probability given the correct-bin metric r is bounded
by 1 for r <= r* = E N0 ln(M-1) and by (M-1) exp(-r / E N0) above it (upper
bound), or by 1/2 and half of that exponential (lower bound). Integrating
against the noncentral chi-square density gives closed forms with two Marcum
Q functions; for a zero-mean (Rayleigh) tap they reduce to elementary
functions.

All public bound values are clamped to [0, 1]; ``bound_terms`` exposes the
raw pieces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .link import LinkBudget
from .modem import LoRaParams
from .specfun import marcum_p1, marcum_q1

__all__ = [
    "BoundDomainError",
    "BoundTerms",
    "MarcumArgs",
    "bound_terms",
    "marcum_args",
    "marcum_args_from_moments",
    "ser_lower",
    "ser_lower_exp",
    "ser_lower_rayleigh",
    "ser_upper",
    "ser_upper_exp",
    "ser_upper_rayleigh",
]


class BoundDomainError(ValueError):
    """An exponential Marcum bound was requested where beta2 <= alpha2."""


@dataclass(frozen=True)
class MarcumArgs:
    alpha1: float
    beta1: float
    alpha2: float
    beta2: float
    r_star: float
    s_tilde: float
    r_tilde_star: float


def _clamp(x: float) -> float:
    return min(1.0, max(0.0, x))


def _log_m1(m_size: int) -> float:
    if m_size < 2:
        raise ValueError(f"union bounds need M >= 2, got M={m_size}")
    return math.log(m_size - 1)


def marcum_args(lb: LinkBudget) -> MarcumArgs:
    """Marcum arguments from the closed forms in E/N0, mu_H and sigma_H^2."""
    log_m1 = _log_m1(lb.m_size)
    g = lb.es_n0
    inv_g = 1.0 / g if g > 0 else math.inf
    mu = abs(lb.ch.mu_h)
    s2 = lb.ch.sigma_h2
    x = s2 * g
    c = 2.0 + x  # 1 + sigma0^2 / sigma1^2
    r_star = lb.energy * lb.ch.n0 * log_m1
    return MarcumArgs(
        alpha1=mu * math.sqrt(2.0 / (s2 + inv_g)),
        beta1=math.sqrt(2.0 * log_m1 / (1.0 + x)),
        alpha2=mu * math.sqrt(2.0 / (3.0 * s2 + 2.0 * inv_g + s2 * x)),
        beta2=math.sqrt(2.0 * log_m1 * (1.0 + 1.0 / (1.0 + x))),
        r_star=r_star,
        s_tilde=lb.s / math.sqrt(c),
        r_tilde_star=c * r_star,
    )


def marcum_args_from_moments(lb: LinkBudget) -> MarcumArgs:
    """Same arguments built from s, sigma0, r* and the scaled s~, r~*."""
    if lb.es_n0 <= 0:
        raise ValueError("moment route needs es_n0 > 0")
    r_star = lb.energy * lb.ch.n0 * _log_m1(lb.m_size)
    sigma0 = math.sqrt(lb.sigma0_2)
    c = 1.0 + lb.sigma0_2 / lb.sigma1_2
    s_tilde = lb.s / math.sqrt(c)
    r_tilde_star = c * r_star
    return MarcumArgs(
        alpha1=lb.s / sigma0,
        beta1=math.sqrt(r_star) / sigma0,
        alpha2=s_tilde / sigma0,
        beta2=math.sqrt(r_tilde_star) / sigma0,
        r_star=r_star,
        s_tilde=s_tilde,
        r_tilde_star=r_tilde_star,
    )


@dataclass(frozen=True)
class BoundTerms:
    """Raw upper bound = ``region_one + weight * q2``.

    ``region_one`` is P[R_m <= r*] and ``weight * q2`` the integral of
    (M-1) exp(-r/EN0) f(r) over r > r*.
    """

    args: MarcumArgs
    region_one: float
    weight: float
    q2: float

    @property
    def upper_raw(self) -> float:
        return self.region_one + self.weight * self.q2

    @property
    def lower_raw(self) -> float:
        return 0.5 * self.upper_raw


def bound_terms(lb: LinkBudget) -> BoundTerms:
    args = marcum_args(lb)
    g = lb.es_n0
    inv_g = 1.0 / g if g > 0 else math.inf
    mu2 = abs(lb.ch.mu_h) ** 2
    s2 = lb.ch.sigma_h2
    weight = (lb.m_size - 1) / (2.0 + s2 * g) * math.exp(-mu2 / (s2 + 2.0 * inv_g))
    return BoundTerms(
        args=args,
        region_one=marcum_p1(args.alpha1, args.beta1),
        weight=weight,
        q2=marcum_q1(args.alpha2, args.beta2),
    )


def _require_ordered(args: MarcumArgs) -> None:
    if not args.beta2 > args.alpha2 >= 0:
        raise BoundDomainError(
            f"exponential Marcum bound needs beta2 > alpha2 >= 0, "
            f"got alpha2={args.alpha2:.6g}, beta2={args.beta2:.6g}"
        )


def ser_upper(lb: LinkBudget) -> float:
    """Two-region upper union bound on the SER."""
    return _clamp(bound_terms(lb).upper_raw)


def ser_lower(lb: LinkBudget) -> float:
    """Two-region lower union bound; term by term half of the upper bound."""
    return _clamp(bound_terms(lb).lower_raw)


def ser_upper_exp(lb: LinkBudget) -> float:
    """Upper bound with Q1(a2, b2) <= exp(-(b2 - a2)^2 / 2)."""
    t = bound_terms(lb)
    a = t.args
    _require_ordered(a)
    return _clamp(t.region_one + t.weight * math.exp(-0.5 * (a.beta2 - a.alpha2) ** 2))


def ser_lower_exp(lb: LinkBudget) -> float:
    """Lower bound with Q1(a2, b2) >= exp(-(b2 + a2)^2 / 2)."""
    t = bound_terms(lb)
    a = t.args
    _require_ordered(a)
    return _clamp(0.5 * (t.region_one + t.weight * math.exp(-0.5 * (a.beta2 + a.alpha2) ** 2)))


def _rayleigh_upper_raw(params: LoRaParams, sigma_h2: float, es_n0: float) -> float:
    if not sigma_h2 > 0:
        raise ValueError(f"Rayleigh bounds need sigma_h2 > 0, got {sigma_h2!r}")
    if not es_n0 >= 0:
        raise ValueError(f"es_n0 must be >= 0, got {es_n0!r}")
    x = sigma_h2 * es_n0
    z = -_log_m1(params.m_size) / (1.0 + x)
    # 1 + (1/(2+x) - 1) e^z, regrouped so the high-SNR value is not a
    # difference of two numbers close to 1
    return -math.expm1(z) + math.exp(z) / (2.0 + x)


def ser_upper_rayleigh(params: LoRaParams, sigma_h2: float, es_n0: float) -> float:
    """Upper union bound for a zero-mean tap; elementary functions only."""
    return _clamp(_rayleigh_upper_raw(params, sigma_h2, es_n0))


def ser_lower_rayleigh(params: LoRaParams, sigma_h2: float, es_n0: float) -> float:
    """Lower union bound for a zero-mean tap; half the upper one."""
    return _clamp(0.5 * _rayleigh_upper_raw(params, sigma_h2, es_n0))
