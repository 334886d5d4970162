"""Closed-form bit-error and convergence bounds for majority-vote sign
aggregation under channel noise, fading with truncated inversion, and
bounded CSI error.

Per-coordinate decoding quality is controlled by the gradient
signal-to-data-noise ratio ``S = sqrt(n_b) * |g_i| / sigma_i``. A single
device mis-signs a coordinate with probability at most
:func:`fail_prob_bound`(S) (Gauss tail inequality for unimodal symmetric
noise); the majority vote across K devices then errs with probability at
most the ``perr_bound_*`` expressions, which combine a Cantelli bound on
the vote count with the effective channel noise ``z / (2 sqrt(rho0))``.

The convergence bounds take the common form::

    (a / sqrt(N)) * ( sqrt(||L||_1) * (F0 - F* + gamma/2)
                      + (2 gamma / sqrt(K)) * ||sigma||_1 + b )

where all channel hostility enters through the scaling factor ``a >= 1``
and the bias ``b >= 0``; both revert to their noiseless limits (1 and 0)
as the device count or receive SNR grows.

Probability bounds are returned raw; they can exceed 1/2 in hostile
regimes. Clamp with :func:`as_probability` before comparing against an
empirical error frequency (any sign decision with symmetric noise errs
with probability at most 1/2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import VacuousBoundError

SQRT6 = math.sqrt(6.0)
_BRANCH_POINT = 2.0 / math.sqrt(3.0)

SCENARIOS = ("noiseless", "awgn", "fading", "imperfect")


def fail_prob_bound(s: float) -> float:
    """Bound on one device mis-signing a coordinate at signal ratio `s`.

    Piecewise in s: ``(2/9)/s^2`` above the branch point ``2/sqrt(3)``,
    ``1/2 - s/(2 sqrt(3))`` below it; both branches meet at 1/6 and the
    bound lives in [0, 1/2].
    """
    if s < 0:
        raise ValueError("signal ratio must be non-negative")
    if s == 0.0:
        return 0.5
    if math.isinf(s):
        return 0.0
    if s > _BRANCH_POINT:
        return (2.0 / 9.0) / (s * s)
    return 0.5 - s / (2.0 * math.sqrt(3.0))


def grad_snr(g_i: float, sigma_i: float, n_b: int) -> float:
    """Gradient signal-to-data-noise ratio ``sqrt(n_b) |g_i| / sigma_i``.

    A zero-noise coordinate returns +inf (its sign is never mis-read).
    """
    if sigma_i < 0:
        raise ValueError("sigma_i must be non-negative")
    if n_b < 1:
        raise ValueError("batch size must be >= 1")
    if sigma_i == 0.0:
        return math.inf
    return math.sqrt(n_b) * abs(g_i) / sigma_i


def as_probability(bound: float) -> float:
    """Clamp a raw bound to 1/2 for use as an error-probability ceiling."""
    return min(bound, 0.5)


def perr_bound_awgn(k: int, s: float, rho: float) -> float:
    """Majority-vote bit-error bound over a static unit channel.

    ``1/(sqrt(K) S) + 1/(K S sqrt(rho)) + 1/(2 K sqrt(rho))`` with
    ``rho = rho0 / sigma_z^2`` the receive SNR. Monotone decreasing in all
    three arguments; the first term alone survives as rho -> inf.
    """
    if k < 1 or s <= 0 or rho <= 0:
        raise ValueError("require K >= 1, S > 0, rho > 0")
    sr = math.sqrt(rho)
    return 1.0 / (math.sqrt(k) * s) + 1.0 / (k * s * sr) + 1.0 / (2.0 * k * sr)


def perr_bound_fading_conditional(k_i: int, s: float, rho: float) -> float:
    """Bit-error bound given that `k_i` devices survived truncation.

    With an empty transmitting set the decoder sees pure noise and the
    decision is a coin flip (1/2); otherwise the static-channel bound
    applies with K replaced by the survivor count.
    """
    if k_i < 0:
        raise ValueError("survivor count must be a non-negative integer")
    if k_i == 0:
        return 0.5
    if s <= 0 or rho <= 0:
        raise ValueError("require S > 0, rho > 0")
    return 1.0 / (math.sqrt(k_i) * s) + (1.0 / k_i) * (1.0 / math.sqrt(rho)) * (
        1.0 / s + 0.5
    )


def _binom_weighted_sum(k: int, alpha: float, exponent: float) -> float:
    """Exact ``sum_{j=1}^{K} j^{-exponent} C(K,j) alpha^j (1-alpha)^(K-j)``.

    Terms are assembled in log space for numerical stability and summed
    with compensated (exact) summation.
    """
    if k < 1:
        raise ValueError("K must be >= 1")
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    if alpha == 1.0:
        return float(k) ** (-exponent)
    j = np.arange(1, k + 1, dtype=np.float64)
    log_terms = (
        gammaln(k + 1)
        - gammaln(j + 1)
        - gammaln(k - j + 1)
        + j * math.log(alpha)
        + (k - j) * math.log1p(-alpha)
        - exponent * np.log(j)
    )
    return float(math.fsum(np.exp(log_terms)))


def binom_f(k: int, alpha: float) -> float:
    """Expected reciprocal survivor count over the positive-survivor mass.

    Exact sum; bounded above by ``2 / (K alpha)``.
    """
    return _binom_weighted_sum(k, alpha, 1.0)


def binom_g(k: int, alpha: float) -> float:
    """Like :func:`binom_f` with an inverse square root weight.

    Exact sum; bounded above by ``sqrt(6) / sqrt(K alpha)``.
    """
    return _binom_weighted_sum(k, alpha, 0.5)


def perr_bound_fading(k: int, alpha: float, s: float, rho: float) -> float:
    """Unconditional bit-error bound under fading with perfect CSI.

    ``(1/2)(1-alpha)^K + sqrt(6)/(sqrt(alpha K) S)
    + (2/(alpha K)) (1/sqrt(rho)) (1/S + 1/2)``; the first term is the
    all-truncated mass, the rest average the conditional bound over a
    Binomial(K, alpha) survivor count.
    """
    if k < 1 or not 0.0 < alpha <= 1.0 or s <= 0 or rho <= 0:
        raise ValueError("require K >= 1, alpha in (0,1], S > 0, rho > 0")
    none_mass = 0.5 * math.exp(k * math.log1p(-alpha)) if alpha < 1.0 else 0.0
    ak = alpha * k
    return (
        none_mass
        + SQRT6 / (math.sqrt(ak) * s)
        + (2.0 / ak) * (1.0 / math.sqrt(rho)) * (1.0 / s + 0.5)
    )


def csi_attenuation(sigma_delta: float, g_th: float, delta_max: float) -> float:
    """CSI-error penalty factor ``sigma_delta / sqrt(sqrt(g_th) - delta_max)``.

    Requires ``sqrt(g_th) > delta_max``: surviving channels then keep
    amplitude at least ``sqrt(g_th) - delta_max``, which caps the variance
    of the inversion mismatch.
    """
    if g_th < 0 or delta_max < 0 or sigma_delta < 0:
        raise ValueError("arguments must be non-negative")
    root_gap = math.sqrt(g_th) - delta_max
    if root_gap <= 0:
        raise ValueError(
            f"need sqrt(g_th) > delta_max, got sqrt(g_th)={math.sqrt(g_th):.4g} "
            f"<= delta_max={delta_max:.4g}"
        )
    return sigma_delta / math.sqrt(root_gap)


@dataclass(frozen=True)
class ScenarioParams:
    """Channel-side parameters entering the bounds.

    ``rho`` is the receive SNR ``rho0 / sigma_z^2``; ``alpha`` the
    non-truncation probability, tied to the cutoff by
    ``alpha = exp(-g_th)``.
    """

    k: int
    rho: float
    alpha: float = 1.0
    sigma_delta: float = 0.0
    g_th: float = 0.0
    delta_max: float = 0.0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("K must be >= 1")
        if not self.rho > 0:
            raise ValueError("rho must be positive")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must lie in (0, 1]")
        if self.sigma_delta < 0 or self.delta_max < 0 or self.g_th < 0:
            raise ValueError("sigma_delta, delta_max, g_th must be non-negative")
        if not math.isclose(self.alpha, math.exp(-self.g_th), rel_tol=1e-9):
            raise ValueError(
                f"alpha={self.alpha} inconsistent with exp(-g_th)={math.exp(-self.g_th)}"
            )


def perr_bound_imperfect(params: ScenarioParams, s: float) -> float:
    """Unconditional bit-error bound under fading with estimated CSI.

    Extends the perfect-CSI bound with the inversion-mismatch penalty
    ``(2/S + 1) * csi_attenuation`` inside the ``sqrt(6)/sqrt(alpha K)``
    term.
    """
    if s <= 0:
        raise ValueError("require S > 0")
    t = csi_attenuation(params.sigma_delta, params.g_th, params.delta_max)
    base = perr_bound_fading(params.k, params.alpha, s, params.rho)
    return base + SQRT6 / math.sqrt(params.alpha * params.k) * (2.0 / s + 1.0) * t


@dataclass(frozen=True)
class LandscapeConstants:
    """Loss-landscape constants entering the convergence bounds."""

    l1: float  # ||L||_1, summed per-coordinate smoothness
    sigma1: float  # ||sigma||_1, summed per-coordinate gradient-noise bound
    f0: float  # initial loss
    fstar: float  # loss lower bound
    gamma: float  # rounds-to-batch ratio N / n_b
    n: int  # communication rounds

    def __post_init__(self):
        if self.l1 < 0 or self.sigma1 < 0:
            raise ValueError("l1 and sigma1 must be non-negative")
        if self.f0 < self.fstar:
            raise ValueError("initial loss must not undercut the lower bound")
        if self.gamma <= 0 or self.n < 1:
            raise ValueError("require gamma > 0 and N >= 1")


@dataclass(frozen=True)
class BoundReport:
    """Evaluated scaling factor, bias term, and full bound for one scenario."""

    scenario: str
    a: float
    b: float
    rhs: float


def _scaling_denominator(scenario: str, p: ScenarioParams) -> float:
    if scenario == "noiseless":
        return 1.0
    if scenario == "awgn":
        return 1.0 - 1.0 / (p.k * math.sqrt(p.rho))
    none_mass = math.exp(p.k * math.log1p(-p.alpha)) if p.alpha < 1.0 else 0.0
    denom = 1.0 - none_mass - 2.0 / (p.alpha * p.k * math.sqrt(p.rho))
    if scenario == "fading":
        return denom
    if scenario == "imperfect":
        t = csi_attenuation(p.sigma_delta, p.g_th, p.delta_max)
        return denom - 2.0 * SQRT6 * t / math.sqrt(p.alpha * p.k)
    raise ValueError(f"unknown scenario {scenario!r}")


def _bias_term(scenario: str, p: ScenarioParams, gamma: float, sigma1: float) -> float:
    if scenario == "noiseless":
        return 0.0
    if scenario == "awgn":
        return 2.0 * gamma * sigma1 / (p.k * math.sqrt(p.rho))
    fading_part = 4.0 / (p.alpha * p.k * math.sqrt(p.rho))
    if scenario == "fading":
        return fading_part * gamma * sigma1
    t = csi_attenuation(p.sigma_delta, p.g_th, p.delta_max)
    csi_part = 4.0 * SQRT6 * t / math.sqrt(p.alpha * p.k)
    return (fading_part + csi_part) * gamma * sigma1


def conv_bound(
    scenario: ScenarioParams, constants: LandscapeConstants, which: str
) -> BoundReport:
    """Evaluate the time-averaged gradient-norm bound for one scenario.

    `which` is one of ``noiseless | awgn | fading | imperfect``. Raises
    :class:`VacuousBoundError` when the scaling-factor denominator is not
    strictly positive (the bound carries no information there).
    """
    if which not in SCENARIOS:
        raise ValueError(f"unknown scenario {which!r}; pick one of {SCENARIOS}")
    denom = _scaling_denominator(which, scenario)
    if denom <= 0.0:
        raise VacuousBoundError(
            f"{which} scaling factor is undefined for K={scenario.k}, "
            f"rho={scenario.rho:.4g}, alpha={scenario.alpha:.4g}",
            denominator=denom,
        )
    a = 1.0 / denom
    b = _bias_term(which, scenario, constants.gamma, constants.sigma1)
    rhs = (
        a
        / math.sqrt(constants.n)
        * (
            math.sqrt(constants.l1) * (constants.f0 - constants.fstar + constants.gamma / 2.0)
            + 2.0 * constants.gamma / math.sqrt(scenario.k) * constants.sigma1
            + b
        )
    )
    return BoundReport(scenario=which, a=a, b=b, rhs=rhs)
