"""Positive radial ground states of the Hamiltonian system

    -Lap u = |v|^(p-1) v,   -Lap v = |u|^(q-1) u   on hyperbolic space H^N,

computed by shooting on the radial ODE and checked against the known
qualitative properties of such solutions.
"""

__version__ = "0.1.0"

from ._backend import BACKEND
from .diagnostics import (check_energy_dissipation, check_identities,
                          check_monotone, characteristic_tail_bound,
                          energy_J, fit_decay, run_all)
from .errors import (BracketError, DomainError, HyperlaneError, InputError,
                     IntegrationError, NoBracketError, NotApplicable,
                     PreconditionError, StructureError, WindowError)
from .geometry import (RadialGrid, ball_radius_from_geodesic,
                       geodesic_from_ball_radius, radial_integral, sphere_area,
                       weight_k)
from .ode import (ExponentPair, IntegratorControls, Outcome, RadialState,
                  ShootingOutcome, Trajectory, integrate, rhs, taylor_start)
from .regimes import (CharacteristicRoots, EmbeddingRange, ExponentRegime,
                      characteristic_roots, classify_exponents,
                      critical_exponent, embedding_range,
                      sobolev_pair_interval)
from .shooting import (GroundState, bisect_on_diagonal, classify_outcome,
                       find_ground_state)

__all__ = [
    "BACKEND", "__version__",
    "ball_radius_from_geodesic", "geodesic_from_ball_radius", "weight_k",
    "sphere_area", "RadialGrid", "radial_integral",
    "ExponentPair", "IntegratorControls", "RadialState", "Trajectory",
    "Outcome", "ShootingOutcome", "rhs", "taylor_start", "integrate",
    "classify_outcome", "bisect_on_diagonal", "find_ground_state",
    "GroundState",
    "check_monotone", "energy_J", "check_energy_dissipation", "fit_decay",
    "check_identities", "characteristic_tail_bound", "run_all",
    "ExponentRegime", "CharacteristicRoots", "EmbeddingRange",
    "classify_exponents", "sobolev_pair_interval", "embedding_range",
    "characteristic_roots", "critical_exponent",
    "HyperlaneError", "DomainError", "InputError", "PreconditionError",
    "IntegrationError", "BracketError", "StructureError", "NoBracketError",
    "WindowError", "NotApplicable",
]
