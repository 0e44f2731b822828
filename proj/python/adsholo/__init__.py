"""AdS2 strip holography laboratory (C++ core)."""

from ._adsholo import (
    AdsholoError,
    Model,
    __version__,
    check_positivity,
    command_names,
    default_config_text,
    fd_spectrum,
    fock_dimension,
    kahler_from_covariance,
    normalize_config,
    run,
    run_inclusion,
    weyl_operator,
)

__all__ = [
    "AdsholoError",
    "Model",
    "check_positivity",
    "command_names",
    "default_config_text",
    "fd_spectrum",
    "fock_dimension",
    "kahler_from_covariance",
    "normalize_config",
    "run",
    "run_inclusion",
    "weyl_operator",
]
