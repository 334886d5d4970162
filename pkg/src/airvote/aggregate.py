"""Waveform superposition over the multiple-access channel and the
majority-vote sign decoder.

Framing: q values ride on M sub-channels over consecutive OFDM symbols,
element i on sub-channel ``i mod M`` of symbol ``i // M`` (row-major).
BPSK puts one sign per sub-channel use and decodes the real part of the
output. 4-QAM packs two signs per use (odd 1-based index on the real
axis, even on the imaginary) at unit symbol energy, halving the symbol
count at the same per-sign signal-to-noise ratio; an odd sign count pads
the final imaginary slot with +1, as in the symbol codec.

Noise conventions: the channel adds circularly symmetric complex noise of
total variance ``sigma_z**2``, so each real decision dimension sees
variance ``sigma_z**2 / 2``. The closed-form bounds instead model a single
real perturbation of full variance ``sigma_z**2`` on a unit-energy BPSK
axis; 4-QAM per-dimension detection (half signal energy, half noise
variance) matches that convention exactly, while BPSK real-part detection
enjoys a 3 dB advantage over it. Both mappings are exercised in tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization, PowerPolicy, inversion_coefficient
from .core import validate_gradient, validate_signs
from .errors import ConfigError

BPSK = "bpsk"
QAM4 = "qam4"
MODULATIONS = (BPSK, QAM4)

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


def slots_required(n_signs: int, modulation: str) -> int:
    """Sub-channel uses needed to carry `n_signs` values."""
    if modulation == BPSK:
        return n_signs
    if modulation == QAM4:
        return (n_signs + 1) // 2
    raise ConfigError(f"unknown modulation {modulation!r}")


def symbols_required(n_signs: int, m: int, modulation: str) -> int:
    """OFDM symbols needed to carry `n_signs` values over M sub-channels."""
    return -(-slots_required(n_signs, modulation) // m)


@dataclass(frozen=True)
class AggregatedBlock:
    """Channel outputs for one round plus per-sign survivor counts.

    ``values`` has shape (n_symbols, M): real detection values in BPSK
    mode, raw complex outputs in 4-QAM mode. ``counts`` records, per sign,
    how many devices were not truncated on its sub-channel; it is purely
    diagnostic (the decoder never sees it).
    """

    values: np.ndarray
    counts: np.ndarray
    n_signs: int
    modulation: str

    def __post_init__(self):
        if self.modulation not in MODULATIONS:
            raise ConfigError(f"unknown modulation {self.modulation!r}")
        if self.values.ndim != 2:
            raise ValueError("values must be shaped (n_symbols, M)")
        n_sym, m = self.values.shape
        need = symbols_required(self.n_signs, m, self.modulation)
        if n_sym != need:
            raise ValueError(
                f"framing mismatch: {n_sym} symbols of width {m} cannot carry "
                f"{self.n_signs} signs in {self.modulation} (need {need})"
            )
        if self.counts.shape != (self.n_signs,):
            raise ValueError("need one survivor count per sign")


def _pack_symbols(signs: np.ndarray, n_slots: int, modulation: str) -> np.ndarray:
    """Map (K, q) signs to (K, n_slots) channel-input symbols.

    Unused trailing slots carry zero amplitude (nothing is transmitted).
    """
    k, q = signs.shape
    if modulation == BPSK:
        sym = np.zeros((k, n_slots), dtype=np.complex128)
        sym[:, :q] = signs
        return sym
    padded = signs
    if q % 2:
        padded = np.hstack([signs, np.ones((k, 1))])  # +1 pad, stripped on decode
    sym = np.zeros((k, n_slots), dtype=np.complex128)
    used = padded.shape[1] // 2
    sym[:, :used] = (padded[:, 0::2] + 1j * padded[:, 1::2]) * _INV_SQRT2
    return sym


def _per_sign_counts(live: np.ndarray, n_signs: int, modulation: str) -> np.ndarray:
    """Survivor counts per sign from the (K, n_slots) liveness mask."""
    per_slot = live.sum(axis=0)
    if modulation == BPSK:
        return per_slot[:n_signs].astype(np.int64)
    return np.repeat(per_slot, 2)[:n_signs].astype(np.int64)


def air_superpose(
    sign_vectors: np.ndarray,
    channel: ChannelRealization,
    policy: PowerPolicy,
    sigma_z: float,
    rng: np.random.Generator,
    modulation: str = BPSK,
) -> AggregatedBlock:
    """Superpose K modulated sign vectors at the channel output.

    Each element of the output is ``sum_k h_k * p_k(h_hat_k) * x_k + z``
    with ``z ~ CN(0, sigma_z^2)``; truncated devices contribute nothing.
    The noise draw happens even when ``sigma_z`` is zero so that stream
    consumption does not depend on the noise level.
    """
    signs = np.atleast_2d(np.asarray(sign_vectors, dtype=np.float64))
    for row in signs:
        validate_signs(row)
    k, q = signs.shape
    if sigma_z < 0:
        raise ConfigError("sigma_z must be non-negative")
    n_sym, m = channel.h.shape[1], channel.h.shape[2]
    if channel.h.shape[0] != k:
        raise ValueError(
            f"channel carries {channel.h.shape[0]} devices, got {k} sign vectors"
        )
    if n_sym != symbols_required(q, m, modulation):
        raise ValueError(
            f"channel frames {n_sym} symbols of width {m}; "
            f"{q} signs in {modulation} need {symbols_required(q, m, modulation)}"
        )
    n_slots = n_sym * m
    coeff = inversion_coefficient(channel.h_hat, policy).reshape(k, n_slots)
    weight = channel.h.reshape(k, n_slots) * coeff
    symbols = _pack_symbols(signs, n_slots, modulation)
    noise = sigma_z * math.sqrt(0.5) * (
        rng.standard_normal(n_slots) + 1j * rng.standard_normal(n_slots)
    )
    out = np.einsum("ks,ks->s", weight, symbols) + noise
    counts = _per_sign_counts(coeff != 0.0, q, modulation)
    values = out.real if modulation == BPSK else out
    return AggregatedBlock(
        values=values.reshape(n_sym, m),
        counts=counts,
        n_signs=q,
        modulation=modulation,
    )


def majority_vote(block: AggregatedBlock) -> np.ndarray:
    """Elementwise sign of the cascaded channel outputs (ties become +1)."""
    flat = block.values.reshape(-1)
    if block.modulation == BPSK:
        decisions = flat[: block.n_signs].real
    else:
        used = flat[: slots_required(block.n_signs, QAM4)]
        decisions = np.empty(2 * used.shape[0])
        decisions[0::2] = used.real
        decisions[1::2] = used.imag
        decisions = decisions[: block.n_signs]
    return np.where(decisions >= 0.0, 1.0, -1.0)


def analog_superpose(
    gradients: np.ndarray,
    channel: ChannelRealization,
    policy: PowerPolicy,
    sigma_z: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Unquantized aggregation baseline over the same channel.

    Devices scale their raw gradients to unit average symbol power and pack
    them pairwise into complex symbols; the decoder rescales by the mean
    device scale (treated as perfectly shared side information) over
    ``K * sqrt(rho0)``. Recovers the plain gradient average exactly when
    the channel is transparent and all device scales agree.
    """
    grads = np.atleast_2d(np.asarray(gradients, dtype=np.float64))
    for row in grads:
        validate_gradient(row)
    k, q = grads.shape
    scales = np.sqrt(np.mean(grads**2, axis=1))
    scales = np.where(scales > 0.0, scales, 1.0)
    unit = grads / scales[:, None]

    n_sym, m = channel.h.shape[1], channel.h.shape[2]
    if channel.h.shape[0] != k or n_sym != symbols_required(q, m, QAM4):
        raise ValueError("channel shape does not match the gradient framing")
    n_slots = n_sym * m
    padded = unit if q % 2 == 0 else np.hstack([unit, np.zeros((k, 1))])
    symbols = np.zeros((k, n_slots), dtype=np.complex128)
    used = padded.shape[1] // 2
    symbols[:, :used] = (padded[:, 0::2] + 1j * padded[:, 1::2]) * _INV_SQRT2

    coeff = inversion_coefficient(channel.h_hat, policy).reshape(k, n_slots)
    weight = channel.h.reshape(k, n_slots) * coeff
    noise = sigma_z * math.sqrt(0.5) * (
        rng.standard_normal(n_slots) + 1j * rng.standard_normal(n_slots)
    )
    out = np.einsum("ks,ks->s", weight, symbols) + noise

    entries = np.empty(2 * used)
    entries[0::2] = out[:used].real
    entries[1::2] = out[:used].imag
    entries = entries[:q] * math.sqrt(2.0)
    return float(np.mean(scales)) * entries / (k * math.sqrt(policy.rho0))
