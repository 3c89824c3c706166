"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """A configuration value (or combination) is invalid before any trial runs."""


class DegenerateChannelError(RuntimeError):
    """Channel matrix too close to singular for ZF precoding; the trial is ZF-infeasible."""


class NumericalError(RuntimeError):
    """A numerical guard tripped (ill-conditioned system, non-finite propagation)."""
