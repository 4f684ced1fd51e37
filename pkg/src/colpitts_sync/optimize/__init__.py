from .gradient import fd_gradient
from .pso import PsoConfig, pso_optimize
from .result import OptResult
from .sso import SharkPopulation, SsoConfig, sso_optimize, sso_stage, sso_velocity

__all__ = [
    "OptResult",
    "PsoConfig",
    "SharkPopulation",
    "SsoConfig",
    "fd_gradient",
    "pso_optimize",
    "sso_optimize",
    "sso_stage",
    "sso_velocity",
]
