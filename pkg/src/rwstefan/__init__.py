"""Random-walk Monte Carlo solvers for diffusion and the one-phase Stefan problem."""

from .analytic import (
    erf,
    flux_amplitude,
    fourier_T,
    gaussian_T,
    solve_lambda,
    special_s,
    special_T,
    stefan_s,
    stefan_T,
)
from .core import (
    ConfigError,
    Constant,
    Exponential,
    GridSpec,
    InverseSqrtFlux,
    PhysicalParams,
    SampledFlux,
    SampledTemperature,
    Sinusoid,
    SolutionField,
    make_grid,
    water_params,
)
from .fdm import FdmConfig, solve_fdm_stefan
from .rw_solver import (
    StefanRunConfig,
    absorbed_ledger,
    simulate_fixed_dirichlet,
    simulate_free,
    simulate_stefan,
    simulate_stefan_flux,
)

__version__ = "0.1.0"
