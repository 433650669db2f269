"""Monte Carlo study of mutual coupling in densely spaced receive arrays.

Simulates the uplink of a single user through a scatterer cluster to a
uniform linear array of half-wavelength dipoles, with the receive chain
modeled circuit-theoretically, and estimates symbol error rates of
coherent and noncoherent detectors that either use or ignore the
coupling model.
"""

__version__ = "0.1.0"

from .detect import (
    Constellation,
    DetectorMode,
    NcCache,
    build_constellation,
    build_nc_cache,
    mrc_detect,
    nc_detect,
)
from .em_coupling import (
    ArrayGeometry,
    CouplingModel,
    Scene,
    array_response,
    dipole_self_impedance,
    draw_inter_array_coupling,
    impedance_matrix,
    inter_array_covariance,
    mutual_impedance,
    sample_scatterers,
)
from .mc import (
    DEFAULT_DETECTORS,
    Detector,
    ExperimentSpec,
    SerEstimate,
    build_point_model,
    calibrate_power,
    estimate_ser,
    run_sweep,
    wilson_interval,
)
from .multiport import (
    CircuitParams,
    MultiportChannel,
    build_channel,
    channel_covariance,
    channel_from_zart,
    gamma_factors,
    matching_network,
    noise_covariance,
    q_matrix,
)
from .specfun import cosine_integral, sine_integral

__all__ = [
    "ArrayGeometry",
    "CircuitParams",
    "Constellation",
    "CouplingModel",
    "DEFAULT_DETECTORS",
    "Detector",
    "DetectorMode",
    "ExperimentSpec",
    "MultiportChannel",
    "NcCache",
    "Scene",
    "SerEstimate",
    "array_response",
    "build_channel",
    "build_constellation",
    "build_nc_cache",
    "build_point_model",
    "calibrate_power",
    "channel_covariance",
    "channel_from_zart",
    "cosine_integral",
    "dipole_self_impedance",
    "draw_inter_array_coupling",
    "estimate_ser",
    "gamma_factors",
    "impedance_matrix",
    "inter_array_covariance",
    "matching_network",
    "mrc_detect",
    "mutual_impedance",
    "nc_detect",
    "noise_covariance",
    "q_matrix",
    "run_sweep",
    "sample_scatterers",
    "sine_integral",
    "wilson_interval",
]
