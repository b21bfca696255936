from .driver import KINDS, RunResult, SolverConfig, run
from .random import StepRandomness, binomial_from_uniform
from .steps import (
    MAX_JUMP_PROBABILITY,
    channel_keys,
    deterministic_successor,
    jump_probability,
    jump_successor,
    mcwf_step,
    nmep_step,
    nmqj_step,
)

__all__ = [
    "KINDS",
    "MAX_JUMP_PROBABILITY",
    "RunResult",
    "SolverConfig",
    "StepRandomness",
    "binomial_from_uniform",
    "channel_keys",
    "deterministic_successor",
    "jump_probability",
    "jump_successor",
    "mcwf_step",
    "nmep_step",
    "nmqj_step",
    "run",
]
