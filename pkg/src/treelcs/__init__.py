"""treelcs: a simulation-and-verification lab for largest common
subtrees of critical random trees.

Exact samplers for (conditioned / root-biased / size-biased) Bienayme
trees, exact rooted/unrooted/Y-shaped largest-common-subtree algorithms
with brute-force oracles, and reproducible Monte-Carlo estimators for
the square-root scaling law and its heavy-tail counterexample.
"""

from . import errors
from ._rng import Rng
from .assignment import max_weight_matching
from .estimators import (EmpiricalDistribution, EstimateResult,
                         big_jumps_check, estimate_c, estimate_p_eps,
                         ks_distance, many_to_one_check, star_lower_bound,
                         survival_curve, wasserstein1)
from .harness import ExperimentConfig, RunManifest, run_experiment, summarize
from .lcs import (TripodFrontier, lcs3_length, lcs_rooted,
                  lcs_rooted_bruteforce, lcs_unrooted,
                  lcs_unrooted_bruteforce, lcsN_bruteforce, span_length,
                  tripod_frontier)
from .offspring import (OffspringLaw, exact_size_law, height_survival,
                        law_from_spec, make_logtail_law, make_standard_law,
                        moments, p_moment)
from .samplers import (SpineTree, sample_bgw, sample_conditioned,
                       sample_root_biased, sample_spine)
from .trees import (LukasiewiczPath, OrientedSubtree, PlaneTree, cut_at,
                    decode_lukasiewicz, encode_lukasiewicz,
                    neighbor_component_depths, parse, reroot, serialize,
                    subtree_at, trim_at)

__version__ = "0.1.0"

__all__ = [
    "Rng", "errors", "__version__",
    "OffspringLaw", "make_standard_law", "make_logtail_law", "law_from_spec",
    "exact_size_law", "moments", "p_moment", "height_survival",
    "PlaneTree", "LukasiewiczPath", "OrientedSubtree",
    "decode_lukasiewicz", "encode_lukasiewicz", "serialize", "parse",
    "subtree_at", "cut_at", "trim_at", "reroot",
    "neighbor_component_depths",
    "SpineTree", "sample_bgw", "sample_conditioned", "sample_root_biased",
    "sample_spine",
    "max_weight_matching",
    "lcs_rooted", "lcs_unrooted", "lcs3_length", "span_length",
    "tripod_frontier", "TripodFrontier", "lcsN_bruteforce",
    "lcs_rooted_bruteforce", "lcs_unrooted_bruteforce",
    "EstimateResult", "EmpiricalDistribution", "estimate_c",
    "survival_curve", "estimate_p_eps", "many_to_one_check",
    "big_jumps_check", "star_lower_bound", "ks_distance", "wasserstein1",
    "ExperimentConfig", "RunManifest", "run_experiment", "summarize",
]
