"""Amplitude-controlled surface beamforming: hologram synthesis, multi-user
channels, hybrid digital/holographic beamforming, and sum-rate optimization."""

from .geometry import (
    SPEED_OF_LIGHT,
    Direction,
    SurfaceGeometry,
    free_space_wavenumber,
    line_geometry,
    planar_geometry,
    scan_angle_deg,
    scan_direction,
)
from .holography import (
    PIN_IDEAL_WEIGHTS,
    PIN_MEASURED_WEIGHTS,
    LobeShortfallError,
    PinState,
    RadiationPattern,
    amplitude_eq1,
    amplitude_map,
    array_factor,
    average_multibeam,
    find_main_lobes,
    multibeam_pattern,
    quantize_pin,
    radiation_pattern,
)
from .channel import (
    ChannelConfig,
    ChannelRealization,
    dump_channel_csv,
    generate_channel,
    load_channel_csv,
    steering_vector,
    trial_rng,
)
from .beamforming import (
    LinkBudget,
    SingularChannelError,
    effective_channel,
    holographic_response,
    sum_rate,
    user_sinr,
    zf_beamformer,
)
from .optimizer import (
    FpAuxiliaries,
    OptimizationReport,
    OptimizerConfig,
    baseline_superposition,
    dominant_direction,
    holographic_update,
    optimize,
    superposition_init,
    surrogate_gradient,
    surrogate_value,
    update_auxiliaries,
)

__version__ = "0.1.0"
