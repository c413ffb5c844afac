"""Open-quantum-system engine and chemistry-dynamics experiments."""

from .lindblad import LindbladSpec, LindbladResult, lindblad_evolve
from .noise import (
    NoiseProcess,
    PiecewiseNoise,
    estimate_spectrum,
    lorentzian_spectrum,
    telegraph_spectrum,
)
from .stochastic import stochastic_evolve
from .experiments import (
    CM1,
    EnaqtConfig,
    EtConfig,
    ExperimentResult,
    PyrazineConfig,
    VaetConfig,
    dominant_gap,
    enaqt_experiment,
    et_experiment,
    et_rate_spectrum,
    hopping_matrix,
    pyrazine_experiment,
    dephased_spinboson_experiment,
    spectral_density,
    thermal_prep_kicks,
    transfer_rate,
    vaet_resonance_frequency,
)

__all__ = [
    "LindbladSpec",
    "LindbladResult",
    "lindblad_evolve",
    "NoiseProcess",
    "PiecewiseNoise",
    "estimate_spectrum",
    "lorentzian_spectrum",
    "telegraph_spectrum",
    "stochastic_evolve",
    "CM1",
    "EnaqtConfig",
    "EtConfig",
    "ExperimentResult",
    "PyrazineConfig",
    "VaetConfig",
    "dominant_gap",
    "enaqt_experiment",
    "et_experiment",
    "et_rate_spectrum",
    "hopping_matrix",
    "pyrazine_experiment",
    "dephased_spinboson_experiment",
    "spectral_density",
    "thermal_prep_kicks",
    "transfer_rate",
    "vaet_resonance_frequency",
]
