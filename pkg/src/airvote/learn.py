"""Loss landscapes, device datasets, local gradients, and hyperparameters.

Two landscapes are bundled:

* :class:`QuadraticLandscape` -- the mean of ``1/2 ||w - x||^2`` over a
  point cloud. Every constant the convergence bounds need is exact: unit
  per-coordinate smoothness, optimum at the cloud mean, gradient noise
  equal to the centered cloud distribution. The bundled generator builds
  the cloud from +-paired Gaussian draws so the single-sample gradient
  noise is symmetric by construction.
* :class:`LogisticLandscape` -- l2-regularized logistic regression, the
  desk-scale stand-in for image-classification experiments. Smoothness is
  a per-coordinate curvature upper bound (quarter of the max feature
  square plus the ridge weight) and the loss lower bound is 0, both loose
  but valid.

The hyperparameter rule ties the learning rate and batch size to the
round budget: ``n_b = ceil(N / gamma)`` (clamped to the device dataset
size) and ``eta = 1 / sqrt(||L||_1 * n_b)``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .core import validate_gradient, validate_signs
from .errors import ConfigError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ModelState:
    """Parameter vector plus the index of the round that produced it."""

    w: np.ndarray
    round_index: int = 0

    def __post_init__(self):
        object.__setattr__(self, "w", validate_gradient(self.w))
        if self.round_index < 0:
            raise ValueError("round_index must be non-negative")


@dataclass(frozen=True)
class DeviceDataset:
    """One device's local samples and its mini-batch size."""

    features: np.ndarray
    labels: np.ndarray
    batch_size: int

    def __post_init__(self):
        if self.features.ndim != 2 or self.features.shape[0] != self.labels.shape[0]:
            raise ConfigError("features must be (n, d) with one label per row")
        if self.features.shape[0] == 0:
            raise ConfigError("device dataset is empty")
        if not 1 <= self.batch_size <= self.features.shape[0]:
            raise ConfigError(
                f"batch_size {self.batch_size} outside [1, {self.features.shape[0]}]"
            )

    def __len__(self) -> int:
        return self.features.shape[0]


@dataclass(frozen=True)
class GradientNoiseProfile:
    """Per-coordinate bound on single-sample gradient standard deviation."""

    sigma: np.ndarray
    inflation: float = 1.2

    @property
    def sigma1(self) -> float:
        return float(np.sum(self.sigma))


@dataclass(frozen=True)
class Hyperparams:
    eta: float
    n_b: int
    clamped: bool


class QuadraticLandscape:
    """Mean of ``1/2 ||w - x||^2`` over a fixed point cloud."""

    def __init__(self, points: np.ndarray):
        points = np.asarray(points, dtype=np.float64)
        if points.ndim != 2 or points.shape[0] < 1:
            raise ConfigError("point cloud must be a non-empty (n, q) array")
        self.points = points
        self.center = points.mean(axis=0)
        self.q = points.shape[1]
        self.smoothness = np.ones(self.q)
        # Exact single-sample gradient noise: the centered cloud itself.
        self.sigma = points.std(axis=0)
        self.lower_bound = 0.5 * float(
            np.mean(np.sum((points - self.center) ** 2, axis=1))
        )

    def loss(self, w) -> float:
        w = validate_gradient(w, self.q)
        return 0.5 * float(np.sum((w - self.center) ** 2)) + self.lower_bound

    def full_gradient(self, w) -> np.ndarray:
        return validate_gradient(w, self.q) - self.center

    def sample_gradients(self, w, features, labels=None) -> np.ndarray:
        """Per-sample gradient rows at `w` for the given feature rows."""
        return validate_gradient(w, self.q)[None, :] - features


class LogisticLandscape:
    """l2-regularized logistic regression with labels in {-1, +1}."""

    def __init__(self, features: np.ndarray, labels: np.ndarray, l2: float = 1e-3):
        features = np.asarray(features, dtype=np.float64)
        labels = np.asarray(labels, dtype=np.float64)
        if features.ndim != 2 or features.shape[0] != labels.shape[0]:
            raise ConfigError("features must be (n, d) with one label per row")
        if not np.all(np.abs(labels) == 1.0):
            raise ConfigError("labels must be -1 or +1")
        if l2 < 0:
            raise ConfigError("ridge weight must be non-negative")
        self.features = features
        self.labels = labels
        self.l2 = l2
        self.q = features.shape[1]
        # Curvature upper bound: logistic second derivative peaks at 1/4.
        self.smoothness = 0.25 * np.max(features**2, axis=0) + l2
        self.lower_bound = 0.0

    def loss(self, w) -> float:
        w = validate_gradient(w, self.q)
        margins = self.labels * (self.features @ w)
        data = float(np.mean(np.logaddexp(0.0, -margins)))
        return data + 0.5 * self.l2 * float(np.sum(w * w))

    def full_gradient(self, w) -> np.ndarray:
        w = validate_gradient(w, self.q)
        margins = self.labels * (self.features @ w)
        coef = -self.labels * expit(-margins)
        return (coef @ self.features) / self.features.shape[0] + self.l2 * w

    def sample_gradients(self, w, features, labels) -> np.ndarray:
        w = validate_gradient(w, self.q)
        margins = labels * (features @ w)
        coef = -labels * expit(-margins)
        return coef[:, None] * features + self.l2 * w[None, :]

    def accuracy(self, w, features, labels) -> float:
        """Fraction of rows whose decision-function sign matches the label."""
        scores = features @ validate_gradient(w, self.q)
        predicted = np.where(scores >= 0.0, 1.0, -1.0)
        return float(np.mean(predicted == labels))


def local_gradient(
    landscape, model: ModelState, dataset: DeviceDataset, rng: np.random.Generator
) -> np.ndarray:
    """Mini-batch gradient estimate at the current model.

    The batch is sampled uniformly without replacement; a full-size batch
    uses the whole local dataset in storage order (so it reproduces the
    device's full gradient bit-for-bit).
    """
    n = len(dataset)
    if dataset.batch_size == n:
        idx = slice(None)
    else:
        idx = rng.choice(n, size=dataset.batch_size, replace=False)
    grads = landscape.sample_gradients(
        model.w, dataset.features[idx], dataset.labels[idx]
    )
    return grads.mean(axis=0)


def apply_update(model: ModelState, v, eta: float) -> ModelState:
    """Descend one step along a decoded sign vector."""
    if not eta > 0:
        raise ConfigError("learning rate must be positive")
    signs = validate_signs(v, model.w.shape[0])
    return ModelState(w=model.w - eta * signs, round_index=model.round_index + 1)


def theorem_hyperparams(
    smoothness, n_rounds: int, gamma: float, max_batch: int
) -> Hyperparams:
    """Batch size and learning rate tied to the round budget.

    ``n_b = ceil(N / gamma)`` clamped to [1, max_batch] (clamping is
    logged: it changes the effective gamma of the run), and
    ``eta = 1 / sqrt(||L||_1 * n_b)``.
    """
    l1 = float(np.sum(np.abs(np.asarray(smoothness, dtype=np.float64))))
    if l1 == 0.0:
        raise ConfigError("degenerate landscape: zero total smoothness")
    if n_rounds < 1 or gamma <= 0 or max_batch < 1:
        raise ConfigError("require N >= 1, gamma > 0, max_batch >= 1")
    raw = math.ceil(n_rounds / gamma)
    n_b = min(max(raw, 1), max_batch)
    clamped = n_b != raw
    if clamped:
        logger.warning(
            "batch size clamped from %d to %d (dataset size); "
            "effective gamma becomes %.4g",
            raw,
            n_b,
            n_rounds / n_b,
        )
    return Hyperparams(eta=1.0 / math.sqrt(l1 * n_b), n_b=n_b, clamped=clamped)


def estimate_noise_profile(
    landscape,
    model: ModelState,
    dataset: DeviceDataset,
    trials: int,
    rng: np.random.Generator,
) -> GradientNoiseProfile:
    """Empirical per-coordinate noise bound from single-sample gradients.

    Draws `trials` single samples with replacement, measures the root mean
    square deviation of their gradients around the full gradient, and
    inflates by 20% as a safety margin for the bound's sigma.
    """
    if trials < 30:
        raise ConfigError("need at least 30 trials for a usable estimate")
    idx = rng.integers(0, len(dataset), size=trials)
    grads = landscape.sample_gradients(
        model.w, dataset.features[idx], dataset.labels[idx]
    )
    resid = grads - landscape.full_gradient(model.w)[None, :]
    raw = np.sqrt(np.mean(resid**2, axis=0))
    return GradientNoiseProfile(sigma=1.2 * raw, inflation=1.2)


# ---------------------------------------------------------------------------
# Problem builders and dataset I/O
# ---------------------------------------------------------------------------


def make_quadratic_cloud(
    q: int, n_points: int, rng: np.random.Generator, spread: float = 1.0
) -> np.ndarray:
    """Point cloud with exactly symmetric single-sample gradient noise.

    Half the points are Gaussian draws, the other half their reflections
    through the cloud center, so the empirical noise distribution is
    symmetric (and its mean lands exactly on the center).
    """
    if n_points % 2:
        raise ConfigError("cloud size must be even for +- pairing")
    center = rng.standard_normal(q)
    half = spread * rng.standard_normal((n_points // 2, q))
    return np.vstack([center + half, center - half])


def split_train_test(
    features: np.ndarray,
    labels: np.ndarray,
    test_fraction: float,
    rng: np.random.Generator,
):
    """Deterministic shuffled split; returns (train_f, train_y, test_f, test_y)."""
    n = features.shape[0]
    n_test = int(round(test_fraction * n))
    if not 0 < n_test < n:
        raise ConfigError(f"test fraction {test_fraction} leaves an empty split")
    order = rng.permutation(n)
    test, train = order[:n_test], order[n_test:]
    return features[train], labels[train], features[test], labels[test]


def load_digits_pair(digit_a: int = 3, digit_b: int = 5):
    """Two-class handwritten-digits subset with scaled pixels and a bias column.

    Labels map to -1 (digit_a) and +1 (digit_b).
    """
    from sklearn.datasets import load_digits

    data = load_digits()
    mask = (data.target == digit_a) | (data.target == digit_b)
    x = data.data[mask] / 16.0  # pixel range [0, 16] -> [0, 1]
    y = np.where(data.target[mask] == digit_b, 1.0, -1.0)
    x = np.hstack([x, np.ones((x.shape[0], 1))])
    return x, y


def load_delimited_dataset(path):
    """Read the plain text sample format: one row per sample, whitespace- or
    comma-delimited, features first and an integer label last.

    The two distinct label values map to -1 (smaller) and +1 (larger).
    """
    try:
        raw = np.loadtxt(path, dtype=np.float64, delimiter=None)
    except ValueError:
        raw = np.loadtxt(path, dtype=np.float64, delimiter=",")
    except OSError as exc:
        raise ConfigError(f"cannot read dataset {path}: {exc}") from exc
    if raw.ndim == 1:
        raw = raw[None, :]
    if raw.shape[1] < 2:
        raise ConfigError("dataset rows need at least one feature and a label")
    if not np.all(np.isfinite(raw)):
        raise ConfigError("dataset contains non-finite values")
    features, labels = raw[:, :-1], raw[:, -1]
    if not np.all(labels == np.round(labels)):
        raise ConfigError("labels must be integers")
    values = np.unique(labels)
    if values.shape[0] != 2:
        raise ConfigError(f"expected exactly two label values, found {values}")
    y = np.where(labels == values[1], 1.0, -1.0)
    return features, y
