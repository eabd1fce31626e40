"""User-coverage objective with per-type patience.

A catalog of n movies is shown as an ordered list S to a population of user
types. A user of type u scans the first theta_u positions and is covered if
at least one inspected movie satisfies them (movie m satisfies type u
independently with probability p_sat[m, u]). The objective is the coverage
probability of a random user:

    f(S) = sum_u pi_u * (1 - prod_{j <= min(theta_u, |S|)} (1 - p_sat[S_j, u]))

f is prefix-monotone, bounded in [0, 1], ordered-submodular, and reduces to
a set function when every patience exceeds the list length.
"""

import dataclasses

import numpy as np

from . import _backend
from .core import SequenceFn

__all__ = ["CoverageInstance", "coverage_value", "make_coverage_fn",
           "coverage_set_fn"]

_SUM_TOL = 1e-9


@dataclasses.dataclass(frozen=True)
class CoverageInstance:
    """Immutable coverage problem data.

    pi : (n_types,) user-type distribution, nonnegative, sums to 1.
    p_sat : (n_movies, n_types) satisfaction probabilities in [0, 1].
    theta : (n_types,) integer patience values >= 1.
    """
    pi: np.ndarray
    p_sat: np.ndarray
    theta: np.ndarray

    def __post_init__(self):
        pi = np.ascontiguousarray(self.pi, dtype=np.float64)
        p_sat = np.ascontiguousarray(self.p_sat, dtype=np.float64)
        theta = np.ascontiguousarray(self.theta, dtype=np.int64)
        if pi.ndim != 1 or theta.ndim != 1 or p_sat.ndim != 2:
            raise ValueError("pi and theta must be vectors, p_sat a matrix")
        if pi.shape[0] != theta.shape[0] or p_sat.shape[1] != pi.shape[0]:
            raise ValueError(
                f"dimension mismatch: pi has {pi.shape[0]} types, theta "
                f"{theta.shape[0]}, p_sat {p_sat.shape[1]} columns")
        if p_sat.shape[0] < 1:
            raise ValueError("need at least one movie")
        if np.any(pi < 0.0) or abs(float(pi.sum()) - 1.0) > _SUM_TOL:
            raise ValueError("pi must be nonnegative and sum to 1")
        if np.any(p_sat < 0.0) or np.any(p_sat > 1.0):
            raise ValueError("p_sat entries must lie in [0, 1]")
        if np.asarray(self.theta).dtype.kind not in "iu" and not np.all(
                np.asarray(self.theta) == theta):
            raise ValueError("theta must be integer-valued")
        if np.any(theta < 1):
            raise ValueError("patience values must be >= 1")
        for name, arr in (("pi", pi), ("p_sat", p_sat), ("theta", theta)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n_movies(self) -> int:
        return int(self.p_sat.shape[0])

    @property
    def n_types(self) -> int:
        return int(self.pi.shape[0])


def coverage_value(inst: CoverageInstance, seq) -> float:
    """Coverage probability of one ordered list (repeats permitted)."""
    return make_coverage_fn(inst)(seq)


def make_coverage_fn(inst: CoverageInstance) -> SequenceFn:
    """Wrap an instance as a SequenceFn with a kernel-backed batch path."""
    pi, theta, p_sat = inst.pi, inst.theta, inst.p_sat

    def batch(seqs: np.ndarray) -> np.ndarray:
        return _backend.coverage_values(pi, theta, p_sat, seqs)

    return SequenceFn(None, inst.n_movies, name="coverage",
                      batch_evaluate=batch)


def coverage_set_fn(pi, p_sat):
    """Set-function form (patience ignored): callable on frozensets.

    h(T) = sum_u pi_u * (1 - prod_{m in T} (1 - p_sat[m, u])). Monotone and
    submodular; useful as the inner h of the threshold/rank-weighted
    sequence-function constructions.
    """
    pi = np.ascontiguousarray(pi, dtype=np.float64)
    p_sat = np.ascontiguousarray(p_sat, dtype=np.float64)

    def h(members: frozenset) -> float:
        if not members:
            return 0.0
        idx = np.fromiter(members, dtype=np.int64)
        missed = (1.0 - p_sat[idx]).prod(axis=0)
        return float(((1.0 - missed) * pi).sum())

    return h
