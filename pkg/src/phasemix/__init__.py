"""phasemix: stochastic mixed-channel approximation of quantum circuits.

Replaces small-angle Z-phase gates with mixtures of the identity and an
optimal over-rotation under a strict diamond-distance budget, simplifies the
sampled instances, and verifies the induced channel error exactly at small
qubit counts.
"""

from .circuit import (
    Circuit,
    CircuitError,
    Gate,
    ParseError,
    WidthCapError,
    cnot,
    h,
    invert,
    normalize_phase,
    parse,
    phase_aligned_overlap,
    s,
    serialize,
    two_qubit_count,
    unitary_of,
    zphase,
    zphase_sequence,
)
from .distances import (
    ReplacementChannelParams,
    avg_case_single,
    brute_force_diamond_single,
    diamond_distance_single,
    frobenius_avg_single,
    haar_frobenius_mc_single,
    haar_trace_mc_single,
    min_diamond_distance,
    optimal_theta,
    trace_avg_single,
)
from .generators import DEFAULT_PROBS, GateProbabilities, cp_decompose, qft, random_circuit
from .protocol import (
    ReplacementCandidate,
    ReplacementPlan,
    ShotEstimate,
    SweepRecord,
    estimate_avg_two_qubit,
    expected_two_qubit_count,
    plan_replacements,
    plan_squash,
    records_to_csv,
    sample_instance,
    substituted_circuit,
    sweep,
)
from .rng import derive_seed, stream
from .simplify import AGGRESSIVE, BASIC, Strategy, best_simplify, simplify
from .verify import (
    DistanceReport,
    avg_case_distance,
    choi_of,
    diamond_lower_bound,
    diamond_upper_bound,
    frobenius_mc_full,
    is_completely_positive,
    is_trace_preserving,
    mixed_channel_superoperator,
    superoperator_of,
)

__version__ = "0.1.0"
