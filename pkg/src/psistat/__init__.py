"""Coordinate/momentum psi-functions, characteristic functions, uncertainty
relations, Fisher information and the root density estimator."""

from .basis import BasisSet, hermite_functions, legendre_functions, make_basis
from .charfunc import (
    CharFunc,
    CharFuncValidity,
    charfunc_from_density,
    charfunc_via_momentum_convolution,
    moment_from_charfunc,
    momentum_charfunc_via_coordinate_convolution,
    symmetric_grid,
    validate_charfunc,
)
from .errors import ConfigError, InputError, NumericalError, PsiStatError
from .finite import (
    FiniteState,
    HermitianOp,
    SchmidtReport,
    basis_state,
    evolve,
    fidelity,
    finite_inner,
    new_finite_state,
    schmidt,
    tensor,
)
from .grid import (
    CoordState,
    DensityProfile,
    Grid,
    MomentumState,
    PhaseProfile,
    complete_to_state,
    decompose_density_phase,
    density,
    inner_product,
    make_grid,
    new_coord_state,
    to_coordinate,
    to_momentum,
)
from .uncertainty import (
    MatrixUncertaintyReport,
    MomentReport,
    MultiState,
    commutator_residual,
    gaussian_min_state,
    heisenberg_check,
    matrix_uncertainty_check,
    moment_report,
    multi_covariances,
    new_multi_state,
    psd_sqrt,
    robertson_check,
)

__version__ = "0.1.0"
