"""Rayleigh fading, truncated channel-inversion power control, CSI error.

Channel coefficients are i.i.d. circularly symmetric complex Gaussian with
unit variance, redrawn independently for every OFDM symbol and device
(block fading; only the marginal distribution matters downstream). The
static-channel mode pins every coefficient to exactly 1+0j.

Truncated inversion transmits ``sqrt(rho0) * conj(h) / |h|^2`` on
sub-channels whose gain ``|h|^2`` clears the cutoff ``g_th`` and stays
silent otherwise. ``rho0`` is chosen so the long-term per-sub-channel
power budget ``P0/M`` is met with equality: since the gain of a unit
Rayleigh channel is unit-mean exponential, the average spent power is
``rho0 * E1(g_th)`` with ``E1`` the exponential integral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import exp1
from scipy.stats import norm as _norm

from .errors import ConfigError

AWGN = "awgn"
FADING_PERFECT = "fading_perfect_csi"
FADING_IMPERFECT = "fading_imperfect_csi"
POLICY_MODES = (AWGN, FADING_PERFECT, FADING_IMPERFECT)

# CSI perturbations must stay well below the cutoff amplitude or the
# truncation decision itself becomes unreliable.
MAX_DELTA_FRACTION = 0.3


def exp_integral_e1(x):
    """Exponential integral E1(x) = integral_x^inf t^-1 exp(-t) dt, x > 0.

    Accepts scalars or arrays; the integral diverges as x -> 0+, so
    non-positive arguments are a domain error.
    """
    arr = np.asarray(x, dtype=np.float64)
    if np.any(arr <= 0.0):
        raise ValueError("exp_integral_e1 requires x > 0 (diverges at 0)")
    out = exp1(arr)
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out


@dataclass(frozen=True)
class PowerPolicy:
    """Derived transmit-power policy for one scenario.

    ``rho0`` is the per-device receive power of a surviving gradient
    entry; ``alpha`` the probability that an entry survives the cutoff.
    """

    p0: float
    m: int
    g_th: float
    mode: str
    rho0: float
    alpha: float


def derive_policy(p0: float, m: int, g_th: float, mode: str) -> PowerPolicy:
    """Populate a :class:`PowerPolicy` from the power budget and cutoff."""
    if mode not in POLICY_MODES:
        raise ConfigError(f"unknown channel mode {mode!r}")
    if p0 <= 0 or m < 1:
        raise ConfigError("require P0 > 0 and M >= 1")
    if g_th < 0:
        raise ConfigError("cutoff g_th must be non-negative")
    if mode == AWGN:
        if g_th != 0.0:
            raise ConfigError("static unit channel performs no truncation; set g_th = 0")
        return PowerPolicy(p0=p0, m=m, g_th=0.0, mode=mode, rho0=p0 / m, alpha=1.0)
    if g_th == 0.0:
        raise ConfigError(
            "full channel inversion is infeasible under a power budget; "
            "fading modes need g_th > 0"
        )
    rho0 = p0 / (m * exp_integral_e1(g_th))
    return PowerPolicy(
        p0=p0, m=m, g_th=g_th, mode=mode, rho0=rho0, alpha=math.exp(-g_th)
    )


def _truncated_gaussian_setup(sigma_delta: float, complex_valued: bool):
    # Cut at radius c*s with c = sqrt(3); rescale s so the post-truncation
    # variance is exactly sigma_delta^2.
    c = math.sqrt(3.0)
    if complex_valued:
        a = c * c
        factor = (1.0 - (1.0 + a) * math.exp(-a)) / (1.0 - math.exp(-a))
    else:
        factor = 1.0 - 2.0 * c * _norm.pdf(c) / (2.0 * _norm.cdf(c) - 1.0)
    s = sigma_delta / math.sqrt(factor)
    return s, c * s


@dataclass(frozen=True)
class CsiErrorModel:
    """Bounded zero-mean perturbation added to estimated channel gains.

    The default family is uniform: ``sigma_delta * sqrt(3/2) * (U1 + j U2)``
    with U1, U2 independent on [-1, 1], giving total variance
    ``sigma_delta**2`` and a hard magnitude bound ``sigma_delta * sqrt(3)``.
    A truncated complex Gaussian of the same variance and a real-only
    switch are selectable.
    """

    sigma_delta: float
    family: str = "uniform"
    complex_valued: bool = True

    def __post_init__(self):
        if self.sigma_delta < 0:
            raise ConfigError("sigma_delta must be non-negative")
        if self.family not in ("uniform", "truncated_gaussian"):
            raise ConfigError(f"unknown CSI error family {self.family!r}")

    @property
    def delta_max(self) -> float:
        """Hard bound on the perturbation magnitude."""
        if self.sigma_delta == 0.0:
            return 0.0
        if self.family == "uniform":
            return self.sigma_delta * math.sqrt(3.0)
        return _truncated_gaussian_setup(self.sigma_delta, self.complex_valued)[1]

    def check_cutoff(self, g_th: float) -> None:
        """Reject configurations whose error bound rivals the cutoff amplitude."""
        limit = MAX_DELTA_FRACTION * math.sqrt(g_th)
        if self.delta_max > limit:
            raise ConfigError(
                f"CSI error bound {self.delta_max:.4g} exceeds "
                f"{MAX_DELTA_FRACTION} * sqrt(g_th) = {limit:.4g}; "
                "raise g_th or lower sigma_delta"
            )

    def sample(self, shape, rng: np.random.Generator) -> np.ndarray:
        """Draw perturbations of the given shape."""
        if self.sigma_delta == 0.0:
            dt = np.complex128 if self.complex_valued else np.float64
            return np.zeros(shape, dtype=dt)
        if self.family == "uniform":
            if self.complex_valued:
                scale = self.sigma_delta * math.sqrt(1.5)
                return scale * (
                    rng.uniform(-1.0, 1.0, shape) + 1j * rng.uniform(-1.0, 1.0, shape)
                )
            return self.sigma_delta * math.sqrt(3.0) * rng.uniform(-1.0, 1.0, shape)
        s, radius = _truncated_gaussian_setup(self.sigma_delta, self.complex_valued)
        if self.complex_valued:
            draw = lambda n: s * math.sqrt(0.5) * (
                rng.standard_normal(n) + 1j * rng.standard_normal(n)
            )
        else:
            draw = lambda n: s * rng.standard_normal(n)
        out = draw(int(np.prod(shape)))
        bad = np.abs(out) > radius
        while np.any(bad):  # rejection keeps the distribution symmetric
            out[bad] = draw(int(bad.sum()))
            bad = np.abs(out) > radius
        return out.reshape(shape)


@dataclass(frozen=True)
class ChannelRealization:
    """Per-device fading coefficients and their estimated versions.

    Arrays are shaped (K, n_symbols, M): one coefficient per device, OFDM
    symbol, and sub-channel. ``h_hat`` equals ``h`` under perfect CSI.
    """

    h: np.ndarray
    h_hat: np.ndarray

    def __post_init__(self):
        if self.h.shape != self.h_hat.shape or self.h.ndim != 3:
            raise ValueError("h and h_hat must share a (K, n_symbols, M) shape")


def perturb_csi(
    h: np.ndarray, model: CsiErrorModel, rng: np.random.Generator
) -> np.ndarray:
    """Estimated coefficients: true ones plus a bounded zero-mean error."""
    return h + model.sample(h.shape, rng)


def sample_channel(
    k: int,
    n_symbols: int,
    m: int,
    mode: str,
    rng: np.random.Generator,
    csi_model: CsiErrorModel | None = None,
) -> ChannelRealization:
    """Draw one round's coefficients for K devices over n_symbols blocks."""
    if k < 1 or m < 1 or n_symbols < 1:
        raise ConfigError("require K >= 1, M >= 1, n_symbols >= 1")
    if mode not in POLICY_MODES:
        raise ConfigError(f"unknown channel mode {mode!r}")
    shape = (k, n_symbols, m)
    if mode == AWGN:
        h = np.ones(shape, dtype=np.complex128)
        return ChannelRealization(h=h, h_hat=h)
    h = math.sqrt(0.5) * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    if mode == FADING_IMPERFECT:
        if csi_model is None:
            raise ConfigError("imperfect-CSI mode needs a CsiErrorModel")
        return ChannelRealization(h=h, h_hat=perturb_csi(h, csi_model, rng))
    return ChannelRealization(h=h, h_hat=h)


def inversion_coefficient(h_est, policy: PowerPolicy):
    """Transmit coefficient for estimated channel(s): zero below the cutoff,
    ``sqrt(rho0) * conj(h)/|h|^2`` above it (aligning phase and amplitude).
    """
    h = np.asarray(h_est, dtype=np.complex128)
    gain = h.real**2 + h.imag**2
    live = gain >= policy.g_th
    coeff = np.zeros_like(h)
    np.divide(
        math.sqrt(policy.rho0) * np.conj(h), gain, out=coeff, where=live & (gain > 0)
    )
    return coeff if h.ndim else complex(coeff)


def empirical_power_check(
    policy: PowerPolicy, trials: int, rng: np.random.Generator, chunk: int = 1_000_000
) -> float:
    """Monte Carlo estimate of the spent per-sub-channel power E[|p|^2].

    By construction of ``rho0`` this equals ``P0/M`` exactly in fading
    modes; the static mode spends exactly ``P0/M`` deterministically.
    """
    if policy.mode == AWGN:
        return policy.p0 / policy.m
    total = 0.0
    done = 0
    while done < trials:
        n = min(chunk, trials - done)
        gains = rng.exponential(1.0, n)
        live = gains >= policy.g_th
        contrib = np.zeros(n)
        np.divide(policy.rho0, gains, out=contrib, where=live)
        total += float(contrib.sum())
        done += n
    return total / trials
