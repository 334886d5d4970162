"""Exception types shared across the package, mapped to CLI exit codes."""


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration (CLI exit code 2)."""


class VacuousBoundError(ValueError):
    """Convergence bound whose scaling-factor denominator is not positive
    (CLI exit code 3).

    The closed-form scaling factors are only meaningful when their
    denominator is strictly positive; tiny device counts at low SNR can
    push it to zero or below. The offending denominator is kept for
    diagnostics.
    """

    def __init__(self, message: str, denominator: float):
        super().__init__(f"{message} (denominator={denominator:.6g})")
        self.denominator = denominator
