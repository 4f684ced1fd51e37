"""Backstepping synchronisation of chaotic Colpitts oscillators with SSO/PSO gain tuning."""

__version__ = "0.1.0"

from .backstepping import (
    ControlVariant,
    Gains,
    LyapunovValues,
    TransformedError,
    closed_loop_matrix,
    control_law,
    inverse_transform,
    lyapunov_values,
    transform_error,
)
from .model import (
    TYPICAL,
    ErrorState,
    OscillatorParams,
    State3,
    error_derivative,
    master_derivative,
    nonlinearity_F,
    slave_derivative,
)
from .sim import (
    DIVERGED,
    CostResult,
    DivergenceError,
    GainObjective,
    SimConfig,
    Trajectory,
    evaluate_gains,
    rk4_step,
    simulate_pair,
    tss_cost,
)
