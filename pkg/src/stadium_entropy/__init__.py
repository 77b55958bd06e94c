"""Certified entropy lower bounds and symbolic orbits for the stadium billiard."""

from .billiard import PhasePoint, StepOutcome, measure_distortion, reverse, step, trajectory
from .coding import (
    Alphabet,
    MembershipReport,
    SymbolWord,
    decode_levels,
    itinerary,
    membership,
    recode_levels,
    to_three,
)
from .errors import Singular, SingularAtStep, StadiumError
from .geometry import BoundaryPiece, StadiumTable, arc_argument, arc_param, boundary_point, inward_normal
from .orbits import OrbitCertificate, certify, fold_to_phase_point, maximize_length, realize_word, unfold_word
from .sft import (
    EntropyResult,
    TransitionMatrix,
    count_periodic,
    count_words,
    entropy_lower_bound,
    eq0_root,
    matrix_sigma_prime,
    matrix_sigma_tilde,
    rome_reduce,
    rome_root,
    spectral_radius,
)

__version__ = "0.1.0"
