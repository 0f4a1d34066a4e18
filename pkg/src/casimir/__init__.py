"""Photon creation by parametric resonance in a vibrating-wall cavity.

A one-dimensional cavity with one harmonically driven mirror pumps photons
out of the vacuum when the drive sits at an integer multiple of the
fundamental frequency.  The package integrates the exact truncated mode
equations, evaluates the closed-form perturbation solution, and extracts
Bogoliubov coefficients and photon spectra at the wall-stop time.
"""

from .backend import backend_name
from .bogoliubov import (
    ANALYTIC_FIRST_ORDER,
    ANALYTIC_RESONANT,
    NUMERIC_FULL,
    NUMERIC_LINEARIZED,
    BogoliubovPair,
    PhotonSpectrum,
    analytic_spectrum,
    beta_resonant_analytic,
    bogoliubov_resonant_analytic,
    expected_peak_modes,
    peak_mode,
    photon_number,
    photon_number_analytic,
    project_bogoliubov,
    unitarity_defect,
)
from .cavity import (
    CavityParams,
    CouplingMatrix,
    coupling_g,
    coupling_matrix,
    drive_coefficient,
    drive_matrix,
    instantaneous_basis,
    mode_frequency,
    mode_function_eval,
    wall_accel_ratio,
    wall_log_derivative,
    wall_position,
)
from .errors import (
    CasimirError,
    IntegrationError,
    MatchingDomainError,
    ModeIndexError,
    NonFiniteStateError,
    PositionDomainError,
    ResonanceUndefinedError,
    UserInputError,
)
from .evolution import (
    FULL,
    LINEARIZED,
    IntegratorConfig,
    QPState,
    XState,
    integrate,
    matched_start_qp,
    qp_from_x,
    rhs_full,
    rhs_linearized,
    vacuum_qp_state,
    vacuum_x_state,
    x_from_qp,
)
from .perturbation import (
    PerturbativeSolution,
    e_kernel,
    q_first_order,
    q_resonant,
    x_first_order,
    x_second_order_resonant,
    x_zeroth,
)
from .version import __version__

__all__ = [name for name in dir() if not name.startswith("_")]
