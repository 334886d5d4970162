"""Experiment harness: run configuration, the end-to-end training loop over
the simulated channel, Monte Carlo verification of the bit-error bounds,
bound sweeps, and CSV/plot-script serialization.

A run configuration is a JSON file with exactly the documented keys;
unknown keys are a hard error so that typos cannot silently change an
experiment. All randomness flows through counter-based streams keyed by
``(seed, purpose, round, device)`` or ``(seed, purpose, point, chunk)``,
making every output byte a pure function of (config, seed) regardless of
thread count.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy.stats import norm as _norm

from . import rng as rng_mod
from .aggregate import (
    MODULATIONS,
    QAM4,
    air_superpose,
    majority_vote,
    symbols_required,
)
from .analysis import (
    LandscapeConstants,
    ScenarioParams,
    as_probability,
    conv_bound,
    perr_bound_awgn,
    perr_bound_fading,
    perr_bound_imperfect,
)
from .channel import (
    AWGN,
    FADING_IMPERFECT,
    FADING_PERFECT,
    CsiErrorModel,
    derive_policy,
    sample_channel,
)
from .core import l1_norm, sign_quantize
from .errors import ConfigError, VacuousBoundError
from .learn import (
    DeviceDataset,
    LogisticLandscape,
    ModelState,
    QuadraticLandscape,
    apply_update,
    estimate_noise_profile,
    load_delimited_dataset,
    load_digits_pair,
    local_gradient,
    make_quadratic_cloud,
    split_train_test,
    theorem_hyperparams,
)

NOISELESS = "noiseless"
RUN_MODES = (NOISELESS, AWGN, FADING_PERFECT, FADING_IMPERFECT)
LANDSCAPES = ("quadratic", "logistic")

# Desk-scale dataset sizes; fixed so that (config, seed) pins every output.
QUADRATIC_DEVICE_SAMPLES = 256
QUADRATIC_INIT_HALF_WIDTH = 2.0
LOGISTIC_DEVICE_SAMPLES = 20
LOGISTIC_TEST_FRACTION = 0.2
LOGISTIC_NOISE_TRIALS = 1000
MC_CHUNK = 20_000

_MODE_TO_SCENARIO = {
    NOISELESS: "noiseless",
    AWGN: "awgn",
    FADING_PERFECT: "fading",
    FADING_IMPERFECT: "imperfect",
}


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VerifySpec:
    """Grid for the Monte Carlo bit-error verification."""

    scenarios: tuple = ("awgn", "fading", "imperfect")
    k: tuple = (1, 10, 100)
    s: tuple = (0.5, 1.0, 2.0, 5.0)
    rho_db: tuple = (0.0, 10.0, 20.0)
    alpha: tuple = (0.5, 0.9)
    sigma_delta: tuple = (0.0, 0.02, 0.05)
    trials: int = 100_000


@dataclass(frozen=True)
class SweepSpec:
    """Grid for tabulating the convergence bounds."""

    scenarios: tuple = ("awgn", "fading", "imperfect")
    k: tuple = (10, 100, 1000)
    rho_db: tuple = (0.0, 10.0, 20.0)
    alpha: tuple = (0.9,)
    sigma_delta: tuple = (0.02,)
    constants: dict | None = None


@dataclass(frozen=True)
class RunConfig:
    """One experiment's complete configuration (see README for the schema)."""

    seed: int = 0
    k: int = 100
    m: int = 1000
    n: int = 150
    q: int = 10
    snr_db: float = 10.0
    mode: str = AWGN
    g_th: float = 0.0
    gamma: float = 1.0
    sigma_delta: float = 0.0
    landscape: str = "quadratic"
    modulation: str = QAM4
    dataset_path: str | None = None
    output_dir: str = "results"
    sweep: SweepSpec | None = None
    verify: VerifySpec | None = None


_TOP_KEYS = {
    "seed": ("seed", int),
    "K": ("k", int),
    "M": ("m", int),
    "N": ("n", int),
    "q": ("q", int),
    "snr_db": ("snr_db", float),
    "mode": ("mode", str),
    "g_th": ("g_th", float),
    "gamma": ("gamma", float),
    "sigma_delta": ("sigma_delta", float),
    "landscape": ("landscape", str),
    "modulation": ("modulation", str),
    "dataset_path": ("dataset_path", str),
    "output_dir": ("output_dir", str),
}

_VERIFY_KEYS = {
    "scenarios": tuple,
    "k": tuple,
    "s": tuple,
    "rho_db": tuple,
    "alpha": tuple,
    "sigma_delta": tuple,
    "trials": int,
}

_SWEEP_KEYS = {
    "scenarios": tuple,
    "k": tuple,
    "rho_db": tuple,
    "alpha": tuple,
    "sigma_delta": tuple,
    "constants": dict,
}


def _parse_section(data, schema, factory, name):
    if not isinstance(data, dict):
        raise ConfigError(f"section {name!r} must be an object")
    unknown = sorted(set(data) - set(schema))
    if unknown:
        raise ConfigError(f"unknown keys in {name!r} section: {unknown}")
    kwargs = {}
    for key, value in data.items():
        kind = schema[key]
        try:
            if kind is tuple:
                kwargs[key] = tuple(value)
            elif kind is dict:
                kwargs[key] = dict(value) if value is not None else None
            else:
                kwargs[key] = kind(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {name}.{key}: {exc}") from exc
    return factory(**kwargs)


def config_from_dict(data: dict) -> RunConfig:
    """Validate a parsed JSON object into a :class:`RunConfig`."""
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    known = set(_TOP_KEYS) | {"sweep", "verify"}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {unknown}")
    kwargs = {}
    for key, (attr, kind) in _TOP_KEYS.items():
        if key not in data:
            continue
        value = data[key]
        if key == "dataset_path" and value is None:
            kwargs[attr] = None
            continue
        try:
            kwargs[attr] = kind(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}") from exc
    if "sweep" in data and data["sweep"] is not None:
        kwargs["sweep"] = _parse_section(data["sweep"], _SWEEP_KEYS, SweepSpec, "sweep")
    if "verify" in data and data["verify"] is not None:
        kwargs["verify"] = _parse_section(
            data["verify"], _VERIFY_KEYS, VerifySpec, "verify"
        )
    cfg = RunConfig(**kwargs)
    validate_config(cfg)
    return cfg


def load_config(path) -> RunConfig:
    """Load and validate a JSON run configuration."""
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return config_from_dict(data)


def validate_config(cfg: RunConfig) -> None:
    if cfg.mode not in RUN_MODES:
        raise ConfigError(f"mode must be one of {RUN_MODES}, got {cfg.mode!r}")
    if cfg.landscape not in LANDSCAPES:
        raise ConfigError(f"landscape must be one of {LANDSCAPES}")
    if cfg.modulation not in MODULATIONS:
        raise ConfigError(f"modulation must be one of {MODULATIONS}")
    if min(cfg.k, cfg.m, cfg.n, cfg.q) < 1:
        raise ConfigError("K, M, N, q must all be >= 1")
    if cfg.gamma <= 0:
        raise ConfigError("gamma must be positive")
    if cfg.sigma_delta < 0:
        raise ConfigError("sigma_delta must be non-negative")
    if cfg.sigma_delta > 0 and cfg.mode != FADING_IMPERFECT:
        raise ConfigError("sigma_delta only applies to fading_imperfect_csi mode")
    if cfg.mode in (NOISELESS, AWGN) and cfg.g_th != 0.0:
        raise ConfigError(f"{cfg.mode} mode performs no truncation; set g_th = 0")
    if cfg.dataset_path is not None and not os.path.exists(cfg.dataset_path):
        raise ConfigError(f"dataset file not found: {cfg.dataset_path}")


# ---------------------------------------------------------------------------
# Channel and bound setup shared by run/sweep
# ---------------------------------------------------------------------------


def channel_setup(cfg: RunConfig):
    """Derive (policy, sigma_z, csi_model, channel_mode) from a config.

    The receive SNR is ``rho = 10**(snr_db/10) = rho0 / sigma_z**2``; the
    power budget is normalized to ``P0 = M`` so the static-channel receive
    power is exactly 1 (only the ratio rho is physically meaningful).
    """
    rho = 10.0 ** (cfg.snr_db / 10.0)
    if cfg.mode in (NOISELESS, AWGN):
        policy = derive_policy(float(cfg.m), cfg.m, 0.0, AWGN)
        sigma_z = 0.0 if cfg.mode == NOISELESS else math.sqrt(policy.rho0 / rho)
        return policy, sigma_z, None, AWGN
    policy = derive_policy(float(cfg.m), cfg.m, cfg.g_th, cfg.mode)
    sigma_z = math.sqrt(policy.rho0 / rho)
    if cfg.mode == FADING_IMPERFECT:
        csi = CsiErrorModel(sigma_delta=cfg.sigma_delta)
        csi.check_cutoff(cfg.g_th)
        return policy, sigma_z, csi, FADING_IMPERFECT
    return policy, sigma_z, None, FADING_PERFECT


def bound_scenario(cfg: RunConfig, policy, csi) -> tuple[str, ScenarioParams]:
    which = _MODE_TO_SCENARIO[cfg.mode]
    rho = math.inf if cfg.mode == NOISELESS else 10.0 ** (cfg.snr_db / 10.0)
    params = ScenarioParams(
        k=cfg.k,
        rho=rho,
        alpha=policy.alpha,
        sigma_delta=cfg.sigma_delta,
        g_th=policy.g_th,
        delta_max=csi.delta_max if csi is not None else 0.0,
    )
    return which, params


# ---------------------------------------------------------------------------
# Problem construction
# ---------------------------------------------------------------------------


@dataclass
class Problem:
    landscape: object
    device_features: list
    device_labels: list
    w0: np.ndarray
    sigma: np.ndarray
    eval_features: np.ndarray | None = None
    eval_labels: np.ndarray | None = None


def build_problem(cfg: RunConfig) -> Problem:
    """Landscape, per-device data, initial model, and noise constants."""
    if cfg.landscape == "quadratic":
        cloud = make_quadratic_cloud(
            cfg.q, QUADRATIC_DEVICE_SAMPLES, rng_mod.stream(cfg.seed, rng_mod.DATASET)
        )
        landscape = QuadraticLandscape(cloud)
        w0 = rng_mod.stream(cfg.seed, rng_mod.INIT).uniform(
            -QUADRATIC_INIT_HALF_WIDTH, QUADRATIC_INIT_HALF_WIDTH, cfg.q
        )
        labels = np.zeros(cloud.shape[0])
        return Problem(
            landscape=landscape,
            device_features=[cloud] * cfg.k,  # homogeneous devices share the cloud
            device_labels=[labels] * cfg.k,
            w0=w0,
            sigma=landscape.sigma,
        )

    if cfg.dataset_path is not None:
        features, labels = load_delimited_dataset(cfg.dataset_path)
        features = np.hstack([features, np.ones((features.shape[0], 1))])
    else:
        features, labels = load_digits_pair()
    if features.shape[1] != cfg.q:
        raise ConfigError(
            f"logistic landscape has {features.shape[1]} parameters "
            f"(features plus bias); set q accordingly"
        )
    tr_f, tr_y, te_f, te_y = split_train_test(
        features, labels, LOGISTIC_TEST_FRACTION, rng_mod.stream(cfg.seed, rng_mod.SPLIT)
    )
    landscape = LogisticLandscape(tr_f, tr_y)
    data_rng = rng_mod.stream(cfg.seed, rng_mod.DATASET)
    dev_f, dev_y = [], []
    n_train = tr_f.shape[0]
    take = min(LOGISTIC_DEVICE_SAMPLES, n_train)
    for _ in range(cfg.k):
        idx = data_rng.choice(n_train, size=take, replace=False)
        dev_f.append(tr_f[idx])
        dev_y.append(tr_y[idx])
    w0 = np.zeros(cfg.q)
    pool = DeviceDataset(features=tr_f, labels=tr_y, batch_size=1)
    profile = estimate_noise_profile(
        landscape,
        ModelState(w=w0),
        pool,
        LOGISTIC_NOISE_TRIALS,
        rng_mod.stream(cfg.seed, rng_mod.TRIALS),
    )
    return Problem(
        landscape=landscape,
        device_features=dev_f,
        device_labels=dev_y,
        w0=w0,
        sigma=profile.sigma,
        eval_features=te_f,
        eval_labels=te_y,
    )


# ---------------------------------------------------------------------------
# End-to-end training runs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RoundRecord:
    """One communication round's metrics.

    ``g_l1`` is the full-batch global gradient norm at the pre-update
    model; ``accuracy`` is the held-out accuracy of the post-update model
    (None for landscapes without a classification task); ``ber_emp`` the
    fraction of decoded signs disagreeing with the full-gradient signs;
    ``trunc_frac`` the truncated fraction of (device, element) slots.
    """

    round: int
    g_l1: float
    g_l1_timeavg: float
    accuracy: float | None
    ber_emp: float
    trunc_frac: float


def _device_gradients(landscape, model, devices, seed, round_index, threads):
    def one(k: int) -> np.ndarray:
        return local_gradient(
            landscape,
            model,
            devices[k],
            rng_mod.stream(seed, rng_mod.BATCH, round_index, k),
        )

    indices = range(len(devices))
    if threads <= 1:
        return [one(k) for k in indices]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(one, indices))  # map preserves device order


def run_feel(cfg: RunConfig, threads: int = 1):
    """Run the full uplink-aggregation training loop.

    Returns ``(records, report, info)``: per-round metrics, the evaluated
    convergence bound for the configured scenario, and a metadata dict.
    Raises :class:`VacuousBoundError` before round 1 when the scenario's
    scaling factor is undefined.
    """
    validate_config(cfg)
    problem = build_problem(cfg)
    landscape = problem.landscape
    hp = theorem_hyperparams(
        landscape.smoothness, cfg.n, cfg.gamma, len(problem.device_features[0])
    )
    policy, sigma_z, csi, channel_mode = channel_setup(cfg)
    gamma_eff = cfg.n / hp.n_b
    constants = LandscapeConstants(
        l1=float(np.sum(landscape.smoothness)),
        sigma1=float(np.sum(problem.sigma)),
        f0=landscape.loss(problem.w0),
        fstar=landscape.lower_bound,
        gamma=gamma_eff,
        n=cfg.n,
    )
    which, params = bound_scenario(cfg, policy, csi)
    report = conv_bound(params, constants, which)

    devices = [
        DeviceDataset(features=f, labels=y, batch_size=hp.n_b)
        for f, y in zip(problem.device_features, problem.device_labels)
    ]
    n_sym = symbols_required(cfg.q, cfg.m, cfg.modulation)
    model = ModelState(w=problem.w0)
    records = []
    l1_sum = 0.0
    for rnd in range(cfg.n):
        grads = _device_gradients(landscape, model, devices, cfg.seed, rnd, threads)
        signs = np.stack([sign_quantize(g) for g in grads])
        chan = sample_channel(
            cfg.k,
            n_sym,
            cfg.m,
            channel_mode,
            rng_mod.stream(cfg.seed, rng_mod.CHANNEL, rnd),
            csi,
        )
        block = air_superpose(
            signs,
            chan,
            policy,
            sigma_z,
            rng_mod.stream(cfg.seed, rng_mod.NOISE, rnd),
            cfg.modulation,
        )
        decoded = majority_vote(block)

        g_full = landscape.full_gradient(model.w)
        g_l1 = l1_norm(g_full)
        l1_sum += g_l1
        ber = float(np.mean(decoded != sign_quantize(g_full)))
        trunc = 1.0 - float(block.counts.sum()) / (cfg.k * cfg.q)
        model = apply_update(model, decoded, hp.eta)
        accuracy = None
        if problem.eval_features is not None:
            accuracy = landscape.accuracy(
                model.w, problem.eval_features, problem.eval_labels
            )
        records.append(
            RoundRecord(
                round=rnd,
                g_l1=g_l1,
                g_l1_timeavg=l1_sum / (rnd + 1),
                accuracy=accuracy,
                ber_emp=ber,
                trunc_frac=trunc,
            )
        )
    info = {
        "mode": cfg.mode,
        "landscape": cfg.landscape,
        "modulation": cfg.modulation,
        "seed": cfg.seed,
        "K": cfg.k,
        "M": cfg.m,
        "N": cfg.n,
        "q": cfg.q,
        "snr_db": cfg.snr_db,
        "rho0": policy.rho0,
        "sigma_z": sigma_z,
        "alpha": policy.alpha,
        "eta": hp.eta,
        "n_b": hp.n_b,
        "batch_clamped": hp.clamped,
        "gamma_config": cfg.gamma,
        "gamma_effective": gamma_eff,
        "l1": constants.l1,
        "sigma1": constants.sigma1,
        "f0": constants.f0,
        "fstar": constants.fstar,
        "scenario": report.scenario,
        "a": report.a,
        "b": report.b,
        "rhs": report.rhs,
    }
    return records, report, info


# ---------------------------------------------------------------------------
# Monte Carlo verification of the bit-error bounds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VerifyPoint:
    scenario: str
    k: int
    s: float
    rho_db: float
    alpha: float
    sigma_delta: float
    trials: int
    p_emp: float
    p_bound: float
    margin: float
    passed: bool


def _mc_errors_awgn(k, s, rho, trials, seed, point, chunk=MC_CHUNK):
    # Synthetic votes: true sign +1, per-device flip probability induced by
    # Gaussian gradient noise at ratio s; real channel noise of variance
    # sigma_z^2 on the sqrt(rho0)-scaled sum (the bound's convention).
    q_flip = float(_norm.sf(s))
    errors = 0
    for ci, start in enumerate(range(0, trials, chunk)):
        n = min(chunk, trials - start)
        g = rng_mod.stream(seed, rng_mod.TRIALS, point, ci)
        wrong = (g.random((n, k)) < q_flip).sum(axis=1)
        votes = k - 2 * wrong
        z = g.standard_normal(n) / math.sqrt(rho)
        errors += int(np.sum(votes + z < 0.0))
    return errors


def _mc_errors_fading(k, alpha, s, rho, trials, seed, point, chunk=MC_CHUNK):
    q_flip = float(_norm.sf(s))
    g_th = -math.log(alpha)
    errors = 0
    for ci, start in enumerate(range(0, trials, chunk)):
        n = min(chunk, trials - start)
        g = rng_mod.stream(seed, rng_mod.TRIALS, point, ci)
        live = g.exponential(1.0, (n, k)) >= g_th
        signs = np.where(g.random((n, k)) < q_flip, -1.0, 1.0)
        votes = np.sum(signs * live, axis=1)
        z = g.standard_normal(n) / math.sqrt(rho)
        errors += int(np.sum(votes + z < 0.0))
    return errors


def _mc_errors_imperfect(
    k, alpha, s, rho, sigma_delta, trials, seed, point, chunk=MC_CHUNK
):
    q_flip = float(_norm.sf(s))
    g_th = -math.log(alpha)
    csi = CsiErrorModel(sigma_delta=sigma_delta)
    errors = 0
    for ci, start in enumerate(range(0, trials, chunk)):
        n = min(chunk, trials - start)
        g = rng_mod.stream(seed, rng_mod.TRIALS, point, ci)
        h = math.sqrt(0.5) * (
            g.standard_normal((n, k)) + 1j * g.standard_normal((n, k))
        )
        h_hat = h + csi.sample((n, k), g)
        gain = h_hat.real**2 + h_hat.imag**2
        live = gain >= g_th
        # Re(h / h_hat): the inversion uses the estimate, the channel the truth.
        weight = np.zeros_like(gain)
        np.divide((h * np.conj(h_hat)).real, gain, out=weight, where=live)
        signs = np.where(g.random((n, k)) < q_flip, -1.0, 1.0)
        votes = np.sum(weight * signs, axis=1)
        z = g.standard_normal(n) / math.sqrt(rho)
        errors += int(np.sum(votes + z < 0.0))
    return errors


def _verify_grid(spec: VerifySpec):
    """Fixed-order grid of (scenario, k, s, rho_db, alpha, sigma_delta)."""
    points = []
    for scenario in spec.scenarios:
        if scenario == "awgn":
            for k, s, db in product(spec.k, spec.s, spec.rho_db):
                points.append((scenario, k, s, db, 1.0, 0.0))
        elif scenario == "fading":
            for k, s, db, alpha in product(spec.k, spec.s, spec.rho_db, spec.alpha):
                points.append((scenario, k, s, db, alpha, 0.0))
        elif scenario == "imperfect":
            for k, s, db, alpha, sd in product(
                spec.k, spec.s, spec.rho_db, spec.alpha, spec.sigma_delta
            ):
                points.append((scenario, k, s, db, alpha, sd))
        else:
            raise ConfigError(f"unknown verify scenario {scenario!r}")
    return points


def _verify_one(item, trials, seed):
    index, (scenario, k, s, db, alpha, sd) = item
    rho = 10.0 ** (db / 10.0)
    if scenario == "awgn":
        raw = perr_bound_awgn(k, s, rho)
        errors = _mc_errors_awgn(k, s, rho, trials, seed, index)
    elif scenario == "imperfect" and sd > 0.0:
        g_th = -math.log(alpha)
        delta_max = CsiErrorModel(sigma_delta=sd).delta_max
        raw = perr_bound_imperfect(
            ScenarioParams(
                k=k, rho=rho, alpha=alpha, sigma_delta=sd, g_th=g_th, delta_max=delta_max
            ),
            s,
        )
        errors = _mc_errors_imperfect(k, alpha, s, rho, sd, trials, seed, index)
    else:
        # fading with perfect CSI; also the sigma_delta = 0 reduction of the
        # imperfect scenario (identical channel law, identical bound).
        raw = perr_bound_fading(k, alpha, s, rho)
        errors = _mc_errors_fading(k, alpha, s, rho, trials, seed, index)
    p_emp = errors / trials
    p_bound = as_probability(raw)
    band = 3.0 * math.sqrt(p_bound * (1.0 - p_bound) / trials)
    return VerifyPoint(
        scenario=scenario,
        k=k,
        s=s,
        rho_db=db,
        alpha=alpha,
        sigma_delta=sd,
        trials=trials,
        p_emp=p_emp,
        p_bound=p_bound,
        margin=p_bound - p_emp,
        passed=p_emp <= p_bound + band,
    )


def verify_perr(cfg: RunConfig, threads: int = 1) -> list[VerifyPoint]:
    """Monte Carlo check that empirical bit-error rates respect the bounds.

    Each grid point simulates the synthetic majority-vote statistic at a
    controlled signal ratio and compares the empirical error frequency
    against the (clamped) closed-form bound plus a 3-sigma binomial band.
    """
    spec = cfg.verify if cfg.verify is not None else VerifySpec()
    if spec.trials < 10_000:
        raise ConfigError("verification needs at least 10^4 trials per point")
    items = list(enumerate(_verify_grid(spec)))
    if threads <= 1:
        return [_verify_one(item, spec.trials, cfg.seed) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(lambda it: _verify_one(it, spec.trials, cfg.seed), items))


# ---------------------------------------------------------------------------
# Bound sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    scenario: str
    k: int
    rho_db: float
    alpha: float
    sigma_delta: float
    a: float  # nan marks a vacuous point
    b: float
    rhs: float


def _constants_from_config(cfg: RunConfig) -> LandscapeConstants:
    problem = build_problem(cfg)
    hp = theorem_hyperparams(
        problem.landscape.smoothness, cfg.n, cfg.gamma, len(problem.device_features[0])
    )
    return LandscapeConstants(
        l1=float(np.sum(problem.landscape.smoothness)),
        sigma1=float(np.sum(problem.sigma)),
        f0=problem.landscape.loss(problem.w0),
        fstar=problem.landscape.lower_bound,
        gamma=cfg.n / hp.n_b,
        n=cfg.n,
    )


def sweep_bounds(cfg: RunConfig) -> list[SweepRow]:
    """Tabulate scaling factor, bias, and bound over a parameter grid.

    Vacuous points (non-positive scaling denominator) are kept in the
    table with NaN entries rather than dropped.
    """
    spec = cfg.sweep if cfg.sweep is not None else SweepSpec()
    if spec.constants is not None:
        constants = LandscapeConstants(**spec.constants)
    else:
        constants = _constants_from_config(cfg)
    rows = []
    for scenario in spec.scenarios:
        alphas = spec.alpha if scenario in ("fading", "imperfect") else (1.0,)
        sigmas = spec.sigma_delta if scenario == "imperfect" else (0.0,)
        for k, db, alpha, sd in product(spec.k, spec.rho_db, alphas, sigmas):
            rho = 10.0 ** (db / 10.0)
            g_th = -math.log(alpha) if alpha < 1.0 else 0.0
            delta_max = CsiErrorModel(sigma_delta=sd).delta_max if sd > 0 else 0.0
            params = ScenarioParams(
                k=k, rho=rho, alpha=alpha, sigma_delta=sd, g_th=g_th, delta_max=delta_max
            )
            try:
                rep = conv_bound(params, constants, scenario)
                rows.append(
                    SweepRow(scenario, k, db, alpha, sd, rep.a, rep.b, rep.rhs)
                )
            except VacuousBoundError:
                rows.append(
                    SweepRow(scenario, k, db, alpha, sd, math.nan, math.nan, math.nan)
                )
    return rows


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


ROUNDS_HEADER = "round,g_l1,g_l1_timeavg,accuracy,ber_emp,trunc_frac"
VERIFY_HEADER = (
    "scenario,K,S,rho_db,alpha,sigma_delta,trials,p_emp,p_bound,margin,pass"
)
SWEEP_HEADER = "scenario,K,rho_db,alpha,sigma_delta,a,b,rhs"


def write_rounds_csv(path, records) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(ROUNDS_HEADER + "\n")
        for r in records:
            fh.write(
                ",".join(
                    [
                        _fmt(r.round),
                        _fmt(r.g_l1),
                        _fmt(r.g_l1_timeavg),
                        _fmt(r.accuracy),
                        _fmt(r.ber_emp),
                        _fmt(r.trunc_frac),
                    ]
                )
                + "\n"
            )


def write_verify_csv(path, points) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(VERIFY_HEADER + "\n")
        for p in points:
            fh.write(
                ",".join(
                    [
                        p.scenario,
                        _fmt(p.k),
                        _fmt(p.s),
                        _fmt(p.rho_db),
                        _fmt(p.alpha),
                        _fmt(p.sigma_delta),
                        _fmt(p.trials),
                        _fmt(p.p_emp),
                        _fmt(p.p_bound),
                        _fmt(p.margin),
                        _fmt(p.passed),
                    ]
                )
                + "\n"
            )


def write_sweep_csv(path, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(SWEEP_HEADER + "\n")
        for r in rows:
            fh.write(
                ",".join(
                    [
                        r.scenario,
                        _fmt(r.k),
                        _fmt(r.rho_db),
                        _fmt(r.alpha),
                        _fmt(r.sigma_delta),
                        _fmt(r.a),
                        _fmt(r.b),
                        _fmt(r.rhs),
                    ]
                )
                + "\n"
            )


def write_run_info(path, info: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(info, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Plot-script generation (gnuplot text format; no plotting in-process)
# ---------------------------------------------------------------------------

_GP_PREAMBLE = (
    "set datafile separator \",\"\n"
    "set key autotitle columnhead\n"
    "set grid\n"
    "set term pngcairo size 900,540\n"
)


def _gp_accuracy_vs_round() -> str:
    return (
        _GP_PREAMBLE
        + "set output \"accuracy_vs_round.png\"\n"
        + "set xlabel \"communication round\"\n"
        + "set ylabel \"test accuracy\"\n"
        + "set key bottom right\n"
        + "plot \"rounds_awgn.csv\" using 1:4 with lines lw 2 title \"static channel\", \\\n"
        + "     \"rounds_fading_perfect_csi.csv\" using 1:4 with lines lw 2 "
        + "title \"fading, perfect CSI\", \\\n"
        + "     \"rounds_fading_imperfect_csi.csv\" using 1:4 with lines lw 2 "
        + "title \"fading, imperfect CSI\"\n"
    )


def _gp_accuracy_vs_devices() -> str:
    return (
        _GP_PREAMBLE
        + "set output \"accuracy_vs_devices.png\"\n"
        + "set xlabel \"participating devices K\"\n"
        + "set ylabel \"final test accuracy\"\n"
        + "set key bottom right\n"
        + "plot \"accuracy_vs_k.csv\" using 1:2 with linespoints lw 2 "
        + "title \"static channel\", \\\n"
        + "     \"accuracy_vs_k.csv\" using 1:3 with linespoints lw 2 "
        + "title \"fading, perfect CSI\", \\\n"
        + "     \"accuracy_vs_k.csv\" using 1:4 with linespoints lw 2 "
        + "title \"fading, imperfect CSI\"\n"
    )


def _gp_bound_vs_empirical() -> str:
    return (
        _GP_PREAMBLE
        + "set output \"bound_vs_empirical.png\"\n"
        + "set xlabel \"grid point\"\n"
        + "set ylabel \"bit error probability\"\n"
        + "set logscale y\n"
        + "plot \"verify_perr.csv\" using 0:8 with points pt 7 title \"empirical\", \\\n"
        + "     \"verify_perr.csv\" using 0:9 with lines lw 2 title \"bound\"\n"
    )


PLOT_GROUPS = (
    (
        "accuracy_vs_round.gp",
        (
            "rounds_awgn.csv",
            "rounds_fading_perfect_csi.csv",
            "rounds_fading_imperfect_csi.csv",
        ),
        _gp_accuracy_vs_round,
    ),
    ("accuracy_vs_devices.gp", ("accuracy_vs_k.csv",), _gp_accuracy_vs_devices),
    ("bound_vs_empirical.gp", ("verify_perr.csv",), _gp_bound_vs_empirical),
)


def emit_plots(results_dir):
    """Write gnuplot scripts next to the result CSVs they read.

    Scripts are emitted for every group whose inputs are all present;
    if no group is complete a :class:`ConfigError` lists every expected
    file. Returns ``(written, missing)`` paths.
    """
    written, missing = [], []
    for script_name, inputs, render in PLOT_GROUPS:
        absent = [f for f in inputs if not os.path.exists(os.path.join(results_dir, f))]
        if absent:
            missing.extend(absent)
            continue
        path = os.path.join(results_dir, script_name)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(render())
        written.append(path)
    if not written:
        expected = sorted({f for _, inputs, _ in PLOT_GROUPS for f in inputs})
        raise ConfigError(
            "no plottable results in "
            f"{results_dir}; expected any complete group of: {expected}"
        )
    return written, missing
