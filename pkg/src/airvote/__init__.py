"""One-bit over-the-air gradient aggregation for federated edge learning.

Devices quantize local stochastic gradients to signs, modulate them onto
shared OFDM sub-channels, and let the multiple-access channel superpose
the waveforms; the server decodes the global update by majority vote.
The package simulates that pipeline under static, fading, and
estimated-CSI channels and evaluates (and Monte Carlo verifies) the
closed-form bit-error and convergence bounds that govern it.
"""

from .aggregate import (
    AggregatedBlock,
    air_superpose,
    analog_superpose,
    majority_vote,
    slots_required,
    symbols_required,
)
from .analysis import (
    BoundReport,
    LandscapeConstants,
    ScenarioParams,
    as_probability,
    binom_f,
    binom_g,
    conv_bound,
    csi_attenuation,
    fail_prob_bound,
    grad_snr,
    perr_bound_awgn,
    perr_bound_fading,
    perr_bound_fading_conditional,
    perr_bound_imperfect,
)
from .channel import (
    ChannelRealization,
    CsiErrorModel,
    PowerPolicy,
    derive_policy,
    empirical_power_check,
    exp_integral_e1,
    inversion_coefficient,
    perturb_csi,
    sample_channel,
)
from .core import (
    QamSymbolBlock,
    l1_norm,
    qam_decode,
    qam_encode,
    sign_quantize,
    validate_gradient,
    validate_signs,
)
from .errors import ConfigError, VacuousBoundError
from .harness import (
    RoundRecord,
    RunConfig,
    SweepSpec,
    VerifySpec,
    emit_plots,
    load_config,
    run_feel,
    sweep_bounds,
    verify_perr,
)
from .learn import (
    DeviceDataset,
    GradientNoiseProfile,
    LogisticLandscape,
    ModelState,
    QuadraticLandscape,
    apply_update,
    estimate_noise_profile,
    load_delimited_dataset,
    local_gradient,
    theorem_hyperparams,
)

__version__ = "0.1.0"
