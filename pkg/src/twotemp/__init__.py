"""Two-temperature kinetic model of a polyatomic gas with slow internal relaxation.

Modules: ``core_model`` (collision kernels and Borgnakke-Larsen maps),
``equilibrium`` (two-temperature Maxwellians), ``collision_quadrature``
(Monte-Carlo and deterministic collision integrals), ``chapman_enskog``
(Galerkin transport coefficients), ``particle_oracle`` (DSMC),
``fluid1d`` (finite-volume solver) and ``cli_driver``.
"""

__version__ = "0.1.0"

from .core_model import GasModel
from .equilibrium import MacroState

__all__ = ["GasModel", "MacroState", "__version__"]
