"""Sparse 1-d signal recovery from autocorrelation measurements.

Two recovery routes are provided.  The combinatorial route reconstructs
the support from the set of realized lags and solves for values on a
graph of uniquely realized distances; it scales to long signals and never
returns an unverified answer.  The semidefinite route relaxes support and
signal recovery into two small convex programs solved by an ADMM
splitting; it tolerates denser supports at small lengths.  A spectral
enumeration oracle lists every signal consistent with an autocorrelation
on desk-scale instances, which the test suite uses as ground truth.
"""

from .admm import (
    SdpProblem,
    SdpSolution,
    SolverConfig,
    psd_project,
    soft_threshold,
    solve,
    sym_eigen,
)
from .combinatorial import (
    ExtremeDistances,
    GoodPairGraph,
    LagSet,
    build_good_pair_graph,
    extract_extremes,
    lag_set,
    recover_support,
    solve_graph,
)
from .combinatorial import recover_signal as recover_combinatorial
from .errors import (
    AmbiguousSupport,
    Disconnected,
    InfeasibleSpec,
    NegativeSquare,
    NoCandidate,
    NoConvergence,
    NoOddCycle,
    NotRankOne,
    NotSymmetric,
    RecoveryError,
    RootPairingFailed,
    SolverFailed,
    SupportInconsistent,
    TooSmall,
    VerificationFailed,
)
from .experiment import (
    ExperimentConfig,
    ExperimentRow,
    parse_config_file,
    rows_to_csv,
    run_experiment,
)
from .oracle import (
    ZeroQuadruple,
    classify_roots,
    construct_ambiguous_pair,
    enumerate_factorizations,
    is_uniform_support,
    poly_roots,
)
from .sdp import (
    SignalSdpSpec,
    SupportSdpSpec,
    build_signal_sdp,
    build_support_sdp,
    extract_signal,
    extract_support,
)
from .sdp import recover_signal as recover_sdp
from .signals import (
    Autocorrelation,
    Signal,
    SparseModelParams,
    SupportSet,
    autocorrelation,
    canonical_sign,
    default_zero_tol,
    equivalent,
    fourier_magnitudes,
    load_autocorrelation,
    load_signal,
    power_spectrum,
    random_sparse_signal,
    save_autocorrelation,
    save_signal,
    support_set,
)

__version__ = "0.1.0"

__all__ = [
    "Autocorrelation",
    "Signal",
    "SparseModelParams",
    "SupportSet",
    "autocorrelation",
    "canonical_sign",
    "default_zero_tol",
    "equivalent",
    "fourier_magnitudes",
    "power_spectrum",
    "random_sparse_signal",
    "support_set",
    "load_signal",
    "save_signal",
    "load_autocorrelation",
    "save_autocorrelation",
    "LagSet",
    "ExtremeDistances",
    "GoodPairGraph",
    "lag_set",
    "extract_extremes",
    "recover_support",
    "build_good_pair_graph",
    "solve_graph",
    "recover_combinatorial",
    "SdpProblem",
    "SolverConfig",
    "SdpSolution",
    "solve",
    "sym_eigen",
    "psd_project",
    "soft_threshold",
    "SupportSdpSpec",
    "SignalSdpSpec",
    "build_support_sdp",
    "extract_support",
    "build_signal_sdp",
    "extract_signal",
    "recover_sdp",
    "ZeroQuadruple",
    "poly_roots",
    "classify_roots",
    "enumerate_factorizations",
    "construct_ambiguous_pair",
    "is_uniform_support",
    "ExperimentConfig",
    "ExperimentRow",
    "run_experiment",
    "rows_to_csv",
    "parse_config_file",
    "RecoveryError",
    "TooSmall",
    "NoCandidate",
    "SupportInconsistent",
    "Disconnected",
    "NoOddCycle",
    "NegativeSquare",
    "VerificationFailed",
    "InfeasibleSpec",
    "AmbiguousSupport",
    "NotRankOne",
    "NotSymmetric",
    "SolverFailed",
    "NoConvergence",
    "RootPairingFailed",
]
