"""Sign vectors, one-bit quantization, and 4-QAM symbol packing.

Gradients and sign vectors are plain 1-D float64 numpy arrays. A sign
vector contains only +1.0 and -1.0; zero entries quantize to +1 so that a
run is bit-reproducible (ties must not depend on platform sign-of-zero
behaviour).

The 4-QAM codec packs two signs per unit-energy complex symbol: odd
(1-based) positions ride the real axis, even positions the imaginary axis.
An odd-length vector gets one +1 pad in the final imaginary slot, recorded
in the block and stripped again on decode.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_INV_SQRT2 = 1.0 / np.sqrt(2.0)


def validate_gradient(g, q: int | None = None) -> np.ndarray:
    """Return `g` as a finite 1-D float64 array, checking length if given."""
    arr = np.asarray(g, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"gradient must be 1-D, got shape {arr.shape}")
    if q is not None and arr.shape[0] != q:
        raise ValueError(f"gradient has length {arr.shape[0]}, expected {q}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("gradient contains non-finite entries")
    return arr


def validate_signs(s, q: int | None = None) -> np.ndarray:
    """Return `s` as a 1-D float64 array of exactly +1/-1 entries."""
    arr = np.asarray(s, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"sign vector must be 1-D, got shape {arr.shape}")
    if q is not None and arr.shape[0] != q:
        raise ValueError(f"sign vector has length {arr.shape[0]}, expected {q}")
    if not np.all(np.abs(arr) == 1.0):
        raise ValueError("sign vector entries must be exactly +1 or -1")
    return arr


def sign_quantize(g) -> np.ndarray:
    """One-bit quantization: elementwise sign with sign(0) := +1."""
    arr = validate_gradient(g)
    return np.where(arr >= 0.0, 1.0, -1.0)


def l1_norm(g) -> float:
    """Sum of absolute values of a finite gradient vector."""
    arr = validate_gradient(g)
    return float(np.sum(np.abs(arr)))


@dataclass(frozen=True)
class QamSymbolBlock:
    """A sign vector packed into unit-energy 4-QAM symbols.

    ``symbols[j] = (s[2j] + 1j * s[2j+1]) / sqrt(2)`` (0-based), so each
    symbol's real and imaginary parts are +-1/sqrt(2). ``n_signs`` records
    the source length; when it is odd the last imaginary slot is a +1 pad.
    """

    symbols: np.ndarray
    n_signs: int

    def __post_init__(self):
        sym = np.asarray(self.symbols, dtype=np.complex128)
        if sym.ndim != 1:
            raise ValueError("symbols must be a 1-D complex array")
        n = int(self.n_signs)
        if n < 1 or sym.shape[0] != (n + 1) // 2:
            raise ValueError(
                f"{sym.shape[0]} symbols cannot carry {n} signs"
            )
        parts = np.concatenate([sym.real, sym.imag])
        if not np.all(np.abs(np.abs(parts) - _INV_SQRT2) < 1e-12):
            raise ValueError("symbol components must be +-1/sqrt(2)")
        object.__setattr__(self, "symbols", sym)
        object.__setattr__(self, "n_signs", n)

    @property
    def padded(self) -> bool:
        return self.n_signs % 2 == 1


def qam_encode(s) -> QamSymbolBlock:
    """Pack a sign vector into 4-QAM symbols (two signs per symbol)."""
    signs = validate_signs(s)
    q = signs.shape[0]
    if q % 2:
        signs = np.append(signs, 1.0)  # pad slot, stripped on decode
    symbols = (signs[0::2] + 1j * signs[1::2]) * _INV_SQRT2
    return QamSymbolBlock(symbols=symbols, n_signs=q)


def qam_decode(block: QamSymbolBlock) -> np.ndarray:
    """Exact inverse of :func:`qam_encode`, stripping any pad slot."""
    real = np.where(block.symbols.real > 0.0, 1.0, -1.0)
    imag = np.where(block.symbols.imag > 0.0, 1.0, -1.0)
    if block.padded and imag[-1] != 1.0:
        raise ValueError("malformed pad: odd-length block must pad with +1")
    signs = np.empty(2 * block.symbols.shape[0], dtype=np.float64)
    signs[0::2] = real
    signs[1::2] = imag
    return signs[: block.n_signs]
