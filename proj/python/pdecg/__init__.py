"""Boundary control environments for 1D transport, 1D reaction-diffusion and 2D Navier-Stokes."""

from ._core import (
    BlowUpError,
    ConfigError,
    ConvergenceError,
    Environment,
    Error,
    InputError,
    ProtocolError,
    StateError,
    backstepping_action,
    default_config,
    kernel_hyperbolic,
    kernel_parabolic,
    load_config,
    reward_step,
    reward_terminal,
    run_episode,
    run_suite,
    validate_config,
)

__all__ = [
    "BlowUpError",
    "ConfigError",
    "ConvergenceError",
    "Environment",
    "Error",
    "InputError",
    "ProtocolError",
    "StateError",
    "backstepping_action",
    "default_config",
    "kernel_hyperbolic",
    "kernel_parabolic",
    "load_config",
    "reward_step",
    "reward_terminal",
    "run_episode",
    "run_suite",
    "validate_config",
]
