"""ctrent: entropy assessment for system counter traces.

Takes aligned captures of numeric system counters, strips trends and
constant structure (difference encoding plus XOR-folding), estimates
per-counter Shannon and min-entropy, eliminates and ranks counters,
measures pairwise dependence via mutual information, and classifies
cross-capture robustness. Designed for judging low-entropy sources that
feed a generator seed pool.
"""

from .dependence import (
    DependencyReport,
    MiMatrix,
    RobustnessSeries,
    build_mi_matrix,
    classify_robustness,
    dependency_groups,
    mutual_information,
    sliding_mi,
)
from .entropy import (
    AlphaEntropy,
    EntropyAssessment,
    SymbolDistribution,
    assess_counter,
    entropy_bits,
    estimate_distribution,
    min_entropy,
    shannon_entropy,
)
from .errors import (
    DataWarning,
    SourceSpecError,
    TraceCsvError,
    UnsupportedPlatformError,
)
from .pipeline import (
    EliminationReport,
    EntropyBudget,
    RankingReport,
    budget,
    eliminate,
    rank,
    select_final,
)
from .preprocess import (
    DeltaSequence,
    SymbolStream,
    delta,
    fold,
    pack,
    preprocess_counter,
    to_nibbles,
)
from .synth import SourceSpec, generate, generate_run
from .trace import (
    CounterTrace,
    TraceRun,
    parse_wide_csv,
    read_wide_csv,
    write_wide_csv,
    write_wide_csv_file,
)

__version__ = "0.1.0"

__all__ = [
    "AlphaEntropy",
    "CounterTrace",
    "DataWarning",
    "DeltaSequence",
    "DependencyReport",
    "EliminationReport",
    "EntropyAssessment",
    "EntropyBudget",
    "MiMatrix",
    "RankingReport",
    "RobustnessSeries",
    "SourceSpec",
    "SourceSpecError",
    "SymbolDistribution",
    "SymbolStream",
    "TraceCsvError",
    "TraceRun",
    "UnsupportedPlatformError",
    "assess_counter",
    "budget",
    "build_mi_matrix",
    "classify_robustness",
    "delta",
    "dependency_groups",
    "eliminate",
    "entropy_bits",
    "estimate_distribution",
    "fold",
    "generate",
    "generate_run",
    "min_entropy",
    "mutual_information",
    "pack",
    "parse_wide_csv",
    "preprocess_counter",
    "rank",
    "read_wide_csv",
    "select_final",
    "shannon_entropy",
    "sliding_mi",
    "to_nibbles",
    "write_wide_csv",
    "write_wide_csv_file",
    "__version__",
]
