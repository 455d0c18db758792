"""Phase-space entropy of evolving quantum states on a periodic lattice."""

from .dispersion import (
    CoherentStateParams,
    DispersionModel,
    coherent_state,
    conjugate,
    group_velocity,
    hessian,
    omega,
    propagate_exact,
    propagate_taylor,
)
from .entropy import (
    EntropyValue,
    differential_entropy,
    gaussian_entropy_closed_form,
    joint_entropy_2d,
    phase_space_entropy,
)
from .numerics import Density, Grid, WaveFunction, inner_product, make_grid
from .qcurve import QCurve, make_decreasing_from_coherent, sample_entropy_series
from .series import Block, BlockLabel, EntropySeries, classify
from .transitions import (
    MultiLevelSystem,
    TwoLevelSystem,
    transition_coefficients,
    transition_probability,
)
from .twoparticle import CollisionParams, Statistics, collision_scenario, make_two_particle

__version__ = "0.1.0"
