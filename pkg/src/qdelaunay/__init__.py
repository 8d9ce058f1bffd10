"""Delaunay-type solutions of the constant Q-curvature equation and their
Jacobi operators, on the cylinder R x S^{n-1}."""

from .core import (CylState, DimensionParams, Event, IntegrationError, Trajectory,
                   hamiltonian, integrate, make_params, rhs)
from .cylinder import cyl_indicial, cyl_mu_squared, cyl_period, sph_jet, sph_state
from .delaunay import (DelaunayProfile, ProfileInvariantError, ProfileSchemaError,
                       ShootingError, eps_derivative, eval_profile, load_profile,
                       save_profile, solve_delaunay)
from .cache import ProfileCache
from .floquet import gamma_set, jacobi_w0, jacobi_wk1, monodromy
from .bands import band_edges, band_eigs, verify_band_props
from .families import TranslationSpec, eval_family, expansion_error, h_rad, h_rad_family
from .fourier_laplace import FLSample, fl_inverse, fl_transform

__version__ = "0.1.0"
