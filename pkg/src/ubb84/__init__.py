"""Key-rate analysis for phase-encoded BB84 with an unbalanced interferometer."""

from .attack import (
    ConstraintSet,
    InfeasibleError,
    OptimResult,
    grid_oracle,
    maximize_holevo_qubit,
    maximize_holevo_realistic,
    qubit_keyrate,
)
from .channel import ChannelParams, ObservedStats, default_params, honest_statistics, load_params
from .engine import (
    KeyRatePoint,
    compare_variants,
    cutoff_distance,
    distance_scan,
    format_csv,
    optimize_mu,
    qubit_scan,
    realistic_keyrate,
)
from .protocol import ProtocolConfig, Variant, make_config
from .sifting import SymmetricState, overall_holevo, symmetrize
from .squash import ClickPattern, EffectiveOutcome, classify, squash_distribution, squash_sample

__version__ = "0.1.0"

__all__ = [
    "ChannelParams",
    "ClickPattern",
    "ConstraintSet",
    "EffectiveOutcome",
    "InfeasibleError",
    "KeyRatePoint",
    "ObservedStats",
    "OptimResult",
    "ProtocolConfig",
    "SymmetricState",
    "Variant",
    "classify",
    "compare_variants",
    "cutoff_distance",
    "default_params",
    "distance_scan",
    "format_csv",
    "grid_oracle",
    "honest_statistics",
    "load_params",
    "make_config",
    "maximize_holevo_qubit",
    "maximize_holevo_realistic",
    "optimize_mu",
    "overall_holevo",
    "qubit_keyrate",
    "qubit_scan",
    "realistic_keyrate",
    "squash_distribution",
    "squash_sample",
    "symmetrize",
]
