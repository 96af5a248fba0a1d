"""Weak values of a spin observable read out through a two-path probe qubit.

Simulates pre-selection, a weak path-conditional spin rotation and
post-selection, produces interferometer and polarimeter intensities with
optional detector noise, and inverts them back into the real part,
imaginary part and modulus of the weak value.
"""
from .campaign import (
    CampaignConfig,
    fringe_campaign,
    montecarlo_campaign,
    montecarlo_pulls,
    sweep_campaign,
)
from .detector import CountRecord, DetectorModel, expected_counts, sample_counts, stream
from .errors import (
    AtanhDivergenceError,
    FitFailureError,
    InvalidArgumentError,
    NoSignalError,
    NumericalError,
    OrthogonalPostselectionError,
    SpinWeakError,
    UndefinedStateError,
    UnsupportedModelError,
)
from .experiment import (
    NOMINAL_ALPHA,
    Coupling,
    EvolutionModel,
    IntensityQuartet,
    PolarimeterPair,
    incident_state,
    interaction,
    interferogram,
    intensity_quartet,
    polarimeter_pair,
)
from .extraction import (
    FringeFit,
    WeakValueEstimate,
    asymmetry,
    error_bars,
    extract,
    fit_fringe,
    locate_settings,
    read_quartet,
)
from .hilbert import (
    SPIN_X_PLUS,
    PhaseShifterSetting,
    PostSelection,
    lifted_pauli,
    path_projector,
    spin_state,
)
from .qmath import SIGMA_X, SIGMA_Y, SIGMA_Z, Operator, StateVector, expectation, tensor, unitary_exp
from .weakvalue import WeakValue, closed_form, overlap_sq, weak_value

__version__ = "0.1.0"
