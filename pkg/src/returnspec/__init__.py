"""Return-time sets of group rotations: simulation, spectra, reconstruction."""

__version__ = "0.1.0"

from .cache import GcReport, cache_gc, cache_key, cache_lookup, cache_store, cached_return_set
from .config import (
    ConfigError,
    ExperimentConfig,
    load_config,
    parse_config,
    parse_generators,
    parse_group,
    parse_open_set,
    parse_point,
    parse_polynomial,
    parse_window,
)
from .exactnum import ExactArithmeticError, QuadraticNumber, parse_exact
from .groups import (
    Character,
    GeneratorReport,
    GroupDescriptor,
    GroupPoint,
    ShapeMismatchError,
    char_eval,
    char_phase,
    invariant_metric,
    is_generator,
    scalar_mul,
)
from .gset import (
    OPEN_QUESTION_BANNER,
    Action,
    BlockSystem,
    CapExceededError,
    GSetError,
    PermGroup,
    SearchRecord,
    SweepRecord,
    actions_isomorphic,
    block_system_generated,
    catalog,
    enumerate_group,
    is_simple,
    reconstruct_from_return_subset,
    return_subset,
    search_counterexamples,
    setwise_stabilizer,
    sweep_reconstruction,
    transitive_actions,
    verify_certificate,
    verify_sweep_record,
)
from .opensets import (
    Arc,
    Membership,
    OpenSet,
    StabilizerReport,
    closure_stabilizer,
    jordan_measure,
    membership,
)
from .orbits import (
    IntegerPolynomial,
    ReturnSet,
    SkewSystem,
    WindowError,
    return_set_linear,
    return_set_polynomial,
    return_set_skew,
    weyl_discrepancy,
)
from .reconstruct import ReconstructionError, ReconstructionResult, reconstruct_group
from .relations import (
    RelationSearchError,
    RelationSet,
    SmithDecomposition,
    detect_relations,
    lll_reduce,
    relation_residual,
    smith_normal_form,
)
from .spectral import (
    CoefficientEstimate,
    CompareReport,
    SpectrumPeak,
    cesaro_average,
    compare_systems,
    default_threshold,
    estimate_coefficient,
    find_peaks,
    refine_peak,
    scan_spectrum,
)

__all__ = [
    "parse_window",
    "parse_polynomial",
    "parse_point",
    "parse_open_set",
    "parse_group",
    "parse_generators",
    "parse_config",
    "load_config",
    "cached_return_set",
    "cache_store",
    "cache_lookup",
    "cache_key",
    "cache_gc",
    "ExperimentConfig",
    "ConfigError",
    "GcReport",
    "Action",
    "Arc",
    "BlockSystem",
    "CapExceededError",
    "Character",
    "CoefficientEstimate",
    "CompareReport",
    "ExactArithmeticError",
    "GSetError",
    "GeneratorReport",
    "GroupDescriptor",
    "GroupPoint",
    "IntegerPolynomial",
    "Membership",
    "OpenSet",
    "PermGroup",
    "QuadraticNumber",
    "ReconstructionError",
    "ReconstructionResult",
    "RelationSearchError",
    "RelationSet",
    "ReturnSet",
    "OPEN_QUESTION_BANNER",
    "SearchRecord",
    "SweepRecord",
    "ShapeMismatchError",
    "SkewSystem",
    "SmithDecomposition",
    "SpectrumPeak",
    "StabilizerReport",
    "WindowError",
    "actions_isomorphic",
    "block_system_generated",
    "catalog",
    "cesaro_average",
    "char_eval",
    "char_phase",
    "closure_stabilizer",
    "compare_systems",
    "default_threshold",
    "detect_relations",
    "enumerate_group",
    "estimate_coefficient",
    "find_peaks",
    "invariant_metric",
    "is_generator",
    "is_simple",
    "jordan_measure",
    "lll_reduce",
    "membership",
    "parse_exact",
    "reconstruct_from_return_subset",
    "reconstruct_group",
    "refine_peak",
    "relation_residual",
    "return_set_linear",
    "return_set_polynomial",
    "return_set_skew",
    "return_subset",
    "scalar_mul",
    "scan_spectrum",
    "search_counterexamples",
    "setwise_stabilizer",
    "smith_normal_form",
    "transitive_actions",
    "sweep_reconstruction",
    "verify_certificate",
    "verify_sweep_record",
    "weyl_discrepancy",
    "__version__",
]
