"""ordsub: maximize ordered-submodular sequence objectives.

Greedy solving (a 2-approximation for nonnegative ordered-submodular
objectives), an exhaustive exact oracle, a definitional checker, and two
objective families from ranked recommendation: patience-limited user
coverage and genre-calibration overlap scores.
"""

__version__ = "0.1.0"

from ._backend import active_name as active_backend, select as select_backend
from .calibration import (CalibrationInstance, OverlapSpec, build_q,
                          concave_ratio_spec, f_divergence, f_divergence_spec,
                          hellinger_divergence_spec, hellinger_overlap,
                          hellinger_spec, hellinger_sq_generator, kl_heuristic,
                          log_ratio_spec,
                          make_calibration_fn, make_kl_fn, overlap, power_spec,
                          variable_length_solve)
from .core import (BudgetError, ObjectiveError, SequenceFn, SolveResult,
                   SpecificationError, SubmodularityReport, UndefinedRatioError,
                   Violation, approximation_ratio, brute_force_optimum,
                   check_ordered_submodularity, compare, evaluate,
                   greedy_maximize, linear_combination, prefix_threshold_fn,
                   rank_weighted_fn)
from .coverage import (CoverageInstance, coverage_set_fn, coverage_value,
                       make_coverage_fn)
from .instances import (InstanceFile, instance_document, kl_counterexample,
                        random_calibration, random_coverage, read_instance,
                        seqdep_instance, tightness_instance, write_instance)

__all__ = [
    "__version__",
    "active_backend",
    "select_backend",
    "SequenceFn",
    "SolveResult",
    "Violation",
    "SubmodularityReport",
    "ObjectiveError",
    "BudgetError",
    "SpecificationError",
    "UndefinedRatioError",
    "evaluate",
    "greedy_maximize",
    "brute_force_optimum",
    "approximation_ratio",
    "compare",
    "check_ordered_submodularity",
    "linear_combination",
    "prefix_threshold_fn",
    "rank_weighted_fn",
    "CoverageInstance",
    "coverage_value",
    "make_coverage_fn",
    "coverage_set_fn",
    "CalibrationInstance",
    "OverlapSpec",
    "hellinger_spec",
    "power_spec",
    "f_divergence_spec",
    "concave_ratio_spec",
    "hellinger_divergence_spec",
    "log_ratio_spec",
    "hellinger_sq_generator",
    "build_q",
    "hellinger_overlap",
    "f_divergence",
    "overlap",
    "make_calibration_fn",
    "kl_heuristic",
    "make_kl_fn",
    "variable_length_solve",
    "InstanceFile",
    "instance_document",
    "write_instance",
    "read_instance",
    "tightness_instance",
    "kl_counterexample",
    "seqdep_instance",
    "random_coverage",
    "random_calibration",
]
