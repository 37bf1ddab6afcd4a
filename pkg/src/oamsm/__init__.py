"""Link-level simulator and analytic evaluator for spatial modulation over
helically phased (orbital-angular-momentum) millimeter-wave beams.

The package builds the deterministic free-space channel between a transmit
line array and ring-mounted receive antenna pairs, runs the
encode/transmit/demodulate chain, and evaluates discrete-input capacity,
average bit error probability, and transmitter energy efficiency, with a
conventional-array baseline on the same geometry for comparison.
"""

__version__ = "0.1.0"

from .beam import BeamParams, NoMatchingWaistError, curvature_radius, lg_field, ring_radius, spot_size, waist_for_state
from .channel import ChannelTensor, build_channel_tensor, in_ring_response, off_ring_response, write_tensor_csv
from .config import PROVENANCE, SystemConfig, default_states, load_config
from .errors import ConfigError, NumericError
from .geometry import ArrayLayout, DegenerateGeometryError, pair_azimuths, pair_distances, radial_offsets
from .metrics import (
    AntennaErrorSummary,
    CapacityEstimate,
    PowerModel,
    abep,
    antenna_abep,
    antenna_detection_prob,
    antenna_detection_prob_avg,
    dcmc_capacity,
    energy_efficiency,
    gray_gamma,
    mimo_capacity_baseline,
    mimo_channel_matrix,
    mod_bep,
)
from .modem import BerReport, OamSymbol, SymbolMap, demodulate_ml, demodulate_stepwise, simulate_ber, transmit
from .numerics import (
    Constellation,
    NoncentralChiSq2,
    integrate,
    log_bessel_i0,
    log_sum_exp,
    marcum_q1,
    ncx2_cdf,
    ncx2_pdf,
    psk_constellation,
    q_function,
)

__all__ = [
    "__version__",
    "ArrayLayout",
    "AntennaErrorSummary",
    "BeamParams",
    "BerReport",
    "CapacityEstimate",
    "ChannelTensor",
    "ConfigError",
    "Constellation",
    "DegenerateGeometryError",
    "NoMatchingWaistError",
    "NoncentralChiSq2",
    "NumericError",
    "OamSymbol",
    "PROVENANCE",
    "PowerModel",
    "SymbolMap",
    "SystemConfig",
    "abep",
    "antenna_abep",
    "antenna_detection_prob",
    "antenna_detection_prob_avg",
    "build_channel_tensor",
    "curvature_radius",
    "dcmc_capacity",
    "default_states",
    "demodulate_ml",
    "demodulate_stepwise",
    "energy_efficiency",
    "gray_gamma",
    "in_ring_response",
    "integrate",
    "lg_field",
    "load_config",
    "log_bessel_i0",
    "log_sum_exp",
    "marcum_q1",
    "mimo_capacity_baseline",
    "mimo_channel_matrix",
    "mod_bep",
    "ncx2_cdf",
    "ncx2_pdf",
    "off_ring_response",
    "pair_azimuths",
    "pair_distances",
    "psk_constellation",
    "q_function",
    "radial_offsets",
    "ring_radius",
    "simulate_ber",
    "spot_size",
    "transmit",
    "waist_for_state",
    "write_tensor_csv",
]
