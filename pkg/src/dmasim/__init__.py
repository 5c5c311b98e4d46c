"""Uplink link-level simulator for dynamic metasurface antenna receivers versus
partially-connected hybrid and fully digital arrays."""

from .channel import (
    ChannelRealization,
    NoiseSpec,
    PathlossModel,
    UserDrop,
    draw_user_drop,
    export_channels,
    import_channel_file,
    pathloss_umi_nlos,
    rf_noise_power,
    sample_channel,
)
from .dma import (
    BAM,
    LPM,
    DmaWeights,
    MicrostripParams,
    UnitCellParams,
    lorentzian_polarizability,
    max_dipole_moment,
    project_bam,
    project_lorentzian,
    propagation_matrix,
    wave_domain_combiner,
)
from .errors import ChannelFileError, ConfigurationError
from .geometry import (
    ArrayLayout,
    CaptureModel,
    antenna_noise_power,
    build_layout,
    receive_correlation,
)
from .harness import ExperimentConfig, ExperimentResult, run_experiment, summarize
from .optimizer import (
    CombinerSolution,
    alternate_optimize,
    cfm_update,
    desired_combiner,
    digital_update,
    noise_whitener,
    nzm_update,
    sinr,
    sum_rate,
)
from .power import (
    ComponentPowers,
    architecture_power,
    dma_config_power,
    energy_efficiency,
    lna_power,
    rf_chain_power,
)
from .rivals import PchpLossBudget, dpa_combiner, pchp_analog_weights, pchp_loss_amplitude

__version__ = "0.1.0"
