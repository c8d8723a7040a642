"""heavytail: Monte Carlo laboratory for cluster indices, stable central
limits, and precise large deviations of heavy-tailed Markov chains.

The package simulates regularly varying chains (linear autoregressions,
stochastic recurrence equations, GARCH volatility recursions), estimates
the cluster index of partial sums along directions by independent routes,
and validates the implied stable laws, large-deviation ratios, and
regenerative Gaussian limits against each other.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    DegenerateSampleError,
    DivergenceError,
    HeavytailError,
    InsufficientCyclesError,
    InsufficientExceedancesError,
    MinorizationInvalidError,
    NoCyclesError,
    NoRootError,
    OutOfRegimeError,
    ParameterError,
    SingularDrawError,
    UnsupportedCaseError,
    UnsupportedLawError,
    WidenRError,
)
from .randkit import RngStream, TailLaw, derive_stream
from .models import (
    DriftReport,
    Garch11Spec,
    KestenSpec,
    PathMatrix,
    TailProcessPath,
    Var1Spec,
    acf_functional_path,
    drift_margin,
    sample_tail_process,
    simulate_path,
    tail_index,
)
from .tailstats import (
    AngularMeasure,
    EmpiricalTailProcess,
    TailFit,
    angular_measure,
    empirical_tail_process,
    hill_estimate,
    normalizing_sequence,
)
from .cluster import (
    ClusterIndexEstimate,
    Direction,
    LimitMeasureEvaluator,
    closed_form_cluster_index,
    cluster_index_tail_process,
    extremal_index,
    nu_alpha,
    telescoping_difference,
)
from .limits import (
    CfComparison,
    GaussianCltReport,
    LdpScanResult,
    StableLawParams,
    gaussian_sigma,
    ldp_scan,
    stable_cf,
    stable_check,
)
from .regen import (
    MinorizationSpec,
    RegenBlocks,
    block_spectral_measure,
    harvest_blocks,
    kac_check,
    split_step,
)
from .cli import ExperimentConfig, RunManifest, parse_config, run

__all__ = [
    "AngularMeasure",
    "CfComparison",
    "ClusterIndexEstimate",
    "ConfigError",
    "DegenerateSampleError",
    "Direction",
    "DivergenceError",
    "DriftReport",
    "EmpiricalTailProcess",
    "ExperimentConfig",
    "Garch11Spec",
    "GaussianCltReport",
    "HeavytailError",
    "InsufficientCyclesError",
    "InsufficientExceedancesError",
    "KestenSpec",
    "LdpScanResult",
    "LimitMeasureEvaluator",
    "MinorizationInvalidError",
    "MinorizationSpec",
    "NoCyclesError",
    "NoRootError",
    "OutOfRegimeError",
    "ParameterError",
    "PathMatrix",
    "RegenBlocks",
    "RngStream",
    "RunManifest",
    "SingularDrawError",
    "StableLawParams",
    "TailFit",
    "TailLaw",
    "TailProcessPath",
    "UnsupportedCaseError",
    "UnsupportedLawError",
    "Var1Spec",
    "WidenRError",
    "acf_functional_path",
    "angular_measure",
    "block_spectral_measure",
    "closed_form_cluster_index",
    "cluster_index_tail_process",
    "derive_stream",
    "drift_margin",
    "empirical_tail_process",
    "extremal_index",
    "gaussian_sigma",
    "harvest_blocks",
    "hill_estimate",
    "kac_check",
    "ldp_scan",
    "normalizing_sequence",
    "nu_alpha",
    "parse_config",
    "run",
    "sample_tail_process",
    "simulate_path",
    "split_step",
    "stable_cf",
    "stable_check",
    "tail_index",
    "telescoping_difference",
]
