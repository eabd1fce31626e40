"""Calibration objectives for ranked recommendation lists.

Each movie i carries a genre distribution p(g|i); a user has a target genre
distribution. A ranked list S induces a genre subdistribution

    q(g) = sum_r rank_weights[r] * p(g | S[r])

built incrementally with absolute per-position weights, no renormalization of
partial lists (renormalization happens only across the length sweep of
variable_length_solve). The list is scored by an overlap measure G(target, q),
optionally plus a modular quality bonus; for the overlap measures shipped
here the resulting sequence function is ordered-submodular, so greedy carries
its 2-approximation guarantee.

Overlap measure families (OverlapSpec):

  hellinger        G(p, q) = sum_x sqrt(p(x) q(x))
  power(alpha)     G(p, q) = sum_x p(x)^(1-alpha) q(x)^alpha, alpha in (0, 1)
  f_divergence     G(p, q) = d_star - D_f(p, q), D_f(p, q) = sum_x f(p/q) q
  concave_ratio    G(p, q) = sum_x f(q(x)) / f'(p(x)), f concave non-decreasing

A log-sum scoring heuristic (kl_heuristic) is also provided; it is NOT
ordered-submodular and exists as a negative exhibit for the checker.
"""

import dataclasses
import math
import operator
from typing import Callable

import numpy as np

from . import _backend
from ._kernels_numpy import KIND_POWER, KIND_SQRT
from .core import (ObjectiveError, SequenceFn, SolveResult, SpecificationError,
                   greedy_maximize)

__all__ = [
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
]

_SUM_TOL = 1e-9

WEIGHT_MODES = ("normalized", "raw")


@dataclasses.dataclass(frozen=True)
class CalibrationInstance:
    """Immutable calibration problem data.

    genre_dist : (n_movies, n_genres), each row a distribution.
    target : (n_genres,) distribution the list should approach.
    rank_weights : (k,) positive weakly-decreasing position weights; they
        must sum to 1 in "normalized" mode, anything positive in "raw" mode
        (raw mode exists for the log-scoring exhibit, whose weights are
        (w1, 1)).
    quality : optional (n_movies,) scores combined via quality_tradeoff.
    quality_tradeoff : lambda >= 0 weighting the modular quality bonus.
    """
    genre_dist: np.ndarray
    target: np.ndarray
    rank_weights: np.ndarray
    weight_mode: str = "normalized"
    quality: np.ndarray | None = None
    quality_tradeoff: float = 0.0

    def __post_init__(self):
        rows = np.ascontiguousarray(self.genre_dist, dtype=np.float64)
        target = np.ascontiguousarray(self.target, dtype=np.float64)
        weights = np.ascontiguousarray(self.rank_weights, dtype=np.float64)
        if rows.ndim != 2 or target.ndim != 1 or weights.ndim != 1:
            raise ValueError(
                "genre_dist must be a matrix, target and rank_weights vectors")
        if rows.shape[0] < 1 or weights.shape[0] < 1:
            raise ValueError("need at least one movie and one rank weight")
        if rows.shape[1] != target.shape[0]:
            raise ValueError(
                f"genre mismatch: rows have {rows.shape[1]} genres, target "
                f"{target.shape[0]}")
        if np.any(rows < 0.0) or np.any(
                np.abs(rows.sum(axis=1) - 1.0) > _SUM_TOL):
            raise ValueError("each genre_dist row must be a distribution")
        if np.any(target < 0.0) or abs(float(target.sum()) - 1.0) > _SUM_TOL:
            raise ValueError("target must be a distribution")
        if self.weight_mode not in WEIGHT_MODES:
            raise ValueError(f"weight_mode must be one of {WEIGHT_MODES}")
        if np.any(weights <= 0.0) or np.any(np.diff(weights) > 0.0):
            raise ValueError("rank_weights must be positive and weakly decreasing")
        if self.weight_mode == "normalized" and abs(
                float(weights.sum()) - 1.0) > _SUM_TOL:
            raise ValueError("normalized-mode rank_weights must sum to 1")
        lam = float(self.quality_tradeoff)
        if not (lam >= 0.0 and math.isfinite(lam)):
            raise ValueError("quality_tradeoff must be a finite value >= 0")
        quality = self.quality
        if quality is not None:
            quality = np.ascontiguousarray(quality, dtype=np.float64)
            if quality.shape != (rows.shape[0],):
                raise ValueError("quality must have one score per movie")
            if not np.all(np.isfinite(quality)):
                raise ValueError("quality scores must be finite")
            quality.setflags(write=False)
        for arr in (rows, target, weights):
            arr.setflags(write=False)
        object.__setattr__(self, "genre_dist", rows)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "rank_weights", weights)
        object.__setattr__(self, "quality", quality)
        object.__setattr__(self, "quality_tradeoff", lam)

    @property
    def n_movies(self) -> int:
        return int(self.genre_dist.shape[0])

    @property
    def n_genres(self) -> int:
        return int(self.genre_dist.shape[1])

    @property
    def max_list_len(self) -> int:
        return int(self.rank_weights.shape[0])


@dataclasses.dataclass(frozen=True)
class OverlapSpec:
    """One overlap measure G(p, q) on (distribution, subdistribution) pairs.

    Use the factory functions (hellinger_spec, power_spec, f_divergence_spec,
    concave_ratio_spec) rather than constructing directly. kernel_kind marks
    specs whose values are computed by the accelerated batch kernels.
    """
    kind: str
    name: str
    alpha: float = 0.0
    generator: Callable | None = None
    zero_q_limit: Callable | None = None
    d_star: float = 0.0
    distance: Callable | None = None
    concave_fn: Callable | None = None
    concave_fn_prime: Callable | None = None
    kernel_kind: int | None = None

    def __post_init__(self):
        if self.kind == "power" and not 0.0 < self.alpha < 1.0:
            raise ValueError("power exponent must lie strictly in (0, 1)")
        if self.kind == "f_divergence":
            if self.generator is None and self.distance is None:
                raise ValueError("f_divergence needs a generator or a distance")
            if not math.isfinite(self.d_star):
                raise ValueError("f_divergence needs a finite d_star bound")
        if self.kind == "concave_ratio" and (
                self.concave_fn is None or self.concave_fn_prime is None):
            raise ValueError("concave_ratio needs the function and its derivative")


def hellinger_spec() -> OverlapSpec:
    """Affinity overlap sum(sqrt(p*q)); in [0, 1], equal to 1 iff q = p."""
    return OverlapSpec(kind="hellinger", name="hellinger",
                       kernel_kind=KIND_SQRT)


def power_spec(alpha: float) -> OverlapSpec:
    """Weighted-geometric-mean overlap sum(p^(1-a) * q^a), a in (0, 1)."""
    alpha = float(alpha)
    return OverlapSpec(kind="power", name=f"power:{alpha:g}", alpha=alpha,
                       kernel_kind=KIND_POWER)


def f_divergence_spec(generator: Callable, d_star: float,
                      zero_q_limit: Callable | None = None,
                      distance: Callable | None = None,
                      name: str = "fdiv:custom") -> OverlapSpec:
    """Overlap d_star - D_f(p, q) from a convex generator with f(1) = 0.

    d_star must be a finite upper bound on the divergence (supplied by the
    caller; it is never guessed). zero_q_limit(p) gives the finite limit of
    f(p/q)*q as q -> 0+ where one exists. distance, when given, is a closed
    form for D_f used instead of the generator sum; monotonicity of the
    resulting objective is the caller's responsibility for custom specs.
    """
    return OverlapSpec(kind="f_divergence", name=name, generator=generator,
                       zero_q_limit=zero_q_limit, d_star=float(d_star),
                       distance=distance)


def concave_ratio_spec(f: Callable, f_prime: Callable,
                       name: str = "ratio:custom") -> OverlapSpec:
    """Overlap sum(f(q(x)) / f'(p(x))) for non-decreasing concave f.

    The derivative is supplied by the caller, never approximated numerically.
    """
    return OverlapSpec(kind="concave_ratio", name=name, concave_fn=f,
                       concave_fn_prime=f_prime)


def hellinger_sq_generator(t: float) -> float:
    """Convex generator of the squared Hellinger divergence; 0 at t = 1.

    Scaled so the generator sum over two distributions equals the closed
    form 1 - sum(sqrt(p*q)), whose maximum is 1.
    """
    return 0.5 * (math.sqrt(t) - 1.0) ** 2


def _hellinger_zero_q_limit(p: float) -> float:
    # lim_{q->0+} 0.5*(sqrt(p/q)-1)^2 * q = p/2
    return 0.5 * p


def _hellinger_distance(p: np.ndarray, q: np.ndarray) -> float:
    return 1.0 - float(np.sqrt(p * q).sum())


def hellinger_divergence_spec() -> OverlapSpec:
    """Squared-Hellinger divergence overlap, 1 - H2(p, q) = sum(sqrt(p*q)).

    Evaluates through the closed form (coordinate-monotone on
    subdistributions, unlike the raw generator sum), so its values coincide
    with hellinger_spec and it shares the accelerated kernel.
    """
    return OverlapSpec(kind="f_divergence", name="fdiv:hellinger",
                       generator=hellinger_sq_generator,
                       zero_q_limit=_hellinger_zero_q_limit,
                       d_star=1.0, distance=_hellinger_distance,
                       kernel_kind=KIND_SQRT)


def log_ratio_spec() -> OverlapSpec:
    """Concave-ratio overlap with f = log1p: sum((1 + p(x)) * log(1 + q(x)))."""
    return OverlapSpec(kind="concave_ratio", name="ratio:log1p",
                       concave_fn=math.log1p,
                       concave_fn_prime=lambda p: 1.0 / (1.0 + p))


def _coerce_seq(inst: CalibrationInstance, seq) -> tuple[int, ...]:
    try:
        items = tuple(operator.index(x) for x in seq)
    except TypeError as exc:
        raise ValueError(f"sequence items must be integers: {seq!r}") from exc
    for x in items:
        if not 0 <= x < inst.n_movies:
            raise ValueError(
                f"movie index {x} out of range for {inst.n_movies} movies")
    if len(items) > inst.max_list_len:
        raise ValueError(
            f"sequence of length {len(items)} exceeds the {inst.max_list_len} "
            f"rank weights")
    return items


def build_q(inst: CalibrationInstance, seq) -> np.ndarray:
    """Genre subdistribution of a ranked list, position r weighted by w_r."""
    items = _coerce_seq(inst, seq)
    if not items:
        return np.zeros(inst.n_genres)
    idx = np.asarray(items, dtype=np.int64)
    w = inst.rank_weights[:len(items)]
    return (inst.genre_dist[idx] * w[:, None]).sum(axis=0)


def _check_pq(p, q) -> tuple[np.ndarray, np.ndarray]:
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape or p.ndim != 1:
        raise ValueError("p and q must be vectors of equal length")
    if np.any(p < 0.0) or np.any(q < 0.0):
        raise ValueError("p and q entries must be >= 0")
    return p, q


def hellinger_overlap(p, q) -> float:
    """sum(sqrt(p*q)): 1 exactly at q = p, smaller everywhere else."""
    p, q = _check_pq(p, q)
    return float(np.sqrt(p * q).sum())


def f_divergence(fgen: Callable, p, q, zero_q_limit: Callable | None = None) -> float:
    """Generator-sum divergence D_f(p, q) = sum_x f(p(x)/q(x)) * q(x).

    Zero handling: q(x) = 0 contributes 0 when p(x) = 0; when p(x) > 0 the
    limit of f(p/q)*q is used where known (supplied via zero_q_limit, or
    built in for the shipped generator), otherwise the divergence is
    effectively unbounded and an ObjectiveError suggests a bounded one.
    """
    p, q = _check_pq(p, q)
    if zero_q_limit is None and fgen is hellinger_sq_generator:
        zero_q_limit = _hellinger_zero_q_limit
    total = 0.0
    for px, qx in zip(p.tolist(), q.tolist()):
        if qx > 0.0:
            total += fgen(px / qx) * qx
        elif px > 0.0:
            if zero_q_limit is None:
                raise ObjectiveError(
                    "divergence is unbounded at q(x)=0 with p(x)>0 and no "
                    "zero_q_limit was given; use a bounded divergence")
            total += zero_q_limit(px)
    if not math.isfinite(total):
        raise ObjectiveError(
            f"divergence value {total!r} is not finite; use a bounded divergence")
    return total


def overlap(spec: OverlapSpec, p, q) -> float:
    """Evaluate one overlap measure G(p, q)."""
    p, q = _check_pq(p, q)
    if spec.kind == "hellinger":
        return float(np.sqrt(p * q).sum())
    if spec.kind == "power":
        a = spec.alpha
        return float((p ** (1.0 - a) * q ** a).sum())
    if spec.kind == "f_divergence":
        if spec.distance is not None:
            d = float(spec.distance(p, q))
        else:
            d = f_divergence(spec.generator, p, q, spec.zero_q_limit)
        value = spec.d_star - d
        if value < -1e-12:
            raise SpecificationError(
                f"overlap {spec.name} came out negative ({value!r}): the "
                f"declared d_star={spec.d_star!r} is below the actual "
                f"divergence supremum")
        return value
    if spec.kind == "concave_ratio":
        f, fp = spec.concave_fn, spec.concave_fn_prime
        total = 0.0
        for px, qx in zip(p.tolist(), q.tolist()):
            d = fp(px)
            # f'(p) may be +inf at p=0 for root-like f; that term vanishes
            total += 0.0 if math.isinf(d) else f(qx) / d
        if not math.isfinite(total):
            raise ObjectiveError(
                f"overlap {spec.name} value {total!r} is not finite")
        return total
    raise ValueError(f"unknown overlap kind {spec.kind!r}")


def make_calibration_fn(inst: CalibrationInstance, spec: OverlapSpec) -> SequenceFn:
    """Sequence objective: overlap(target, built q) plus any quality bonus.

    evaluate(S) = overlap(spec, target, build_q(inst, S))
                  + quality_tradeoff * sum_{i in S} quality[i]

    The quality term is 0 when the instance carries no quality scores.
    Hellinger/power specs (and the closed-form divergence preset) evaluate
    through the batch kernels; other specs take the scalar path.
    """
    n = inst.n_movies
    lam = inst.quality_tradeoff if inst.quality is not None else 0.0
    quality = (inst.quality if inst.quality is not None
               else np.zeros(n))
    name = f"calibration:{spec.name}"
    if spec.kernel_kind is not None:
        kind, alpha = spec.kernel_kind, spec.alpha
        target, rows, weights = inst.target, inst.genre_dist, inst.rank_weights

        def batch(seqs: np.ndarray) -> np.ndarray:
            return _backend.overlap_values(kind, alpha, target, rows, weights,
                                           quality, lam, seqs)

        return SequenceFn(None, n, name=name, batch_evaluate=batch,
                          max_len=inst.max_list_len)

    def scalar(items: tuple[int, ...]) -> float:
        value = overlap(spec, inst.target, build_q(inst, items))
        if lam != 0.0:
            value += lam * float(quality[list(items)].sum())
        return value

    return SequenceFn(scalar, n, name=name, max_len=inst.max_list_len)


def kl_heuristic(inst: CalibrationInstance, seq) -> float:
    """Log-mass list score sum_g target[g] * ln(sum_r w_r * p(g | S[r])).

    Natural logarithm, raw weights as-is. Returns -inf as a sentinel when
    some genre has positive target but zero built mass (the empty list
    included). Negative values are normal; this score is sign-inconsistent
    and not ordered-submodular, which is the point of shipping it.
    """
    items = _coerce_seq(inst, seq)
    total = 0.0
    for g in range(inst.n_genres):
        pg = float(inst.target[g])
        if pg <= 0.0:
            continue
        mass = 0.0
        for r, movie in enumerate(items):
            mass += float(inst.rank_weights[r]) * float(inst.genre_dist[movie, g])
        if mass <= 0.0:
            return float("-inf")
        total += pg * math.log(mass)
    return total


def make_kl_fn(inst: CalibrationInstance) -> SequenceFn:
    """Wrap kl_heuristic as a SequenceFn for the solvers and the checker.

    The empty list scores 0 here rather than the raw -inf sentinel: solver
    and checker arithmetic needs a finite empty value, and 0 preserves the
    inequality structure wherever both sides are finite.
    """
    target, rows, weights = inst.target, inst.genre_dist, inst.rank_weights

    def batch(seqs: np.ndarray) -> np.ndarray:
        return _backend.kl_values(target, rows, weights, seqs)

    return SequenceFn(None, inst.n_movies, name="kl-heuristic",
                      batch_evaluate=batch, max_len=inst.max_list_len)


def variable_length_solve(inst: CalibrationInstance, spec: OverlapSpec,
                          k: int, allow_repeats: bool = False) -> SolveResult:
    """Greedy over every list length 1..k with per-length weight rescaling.

    For each length the leading weights are renormalized to sum to 1, greedy
    runs at exactly that length, and the best value wins; ties go to the
    shorter list. evaluations aggregates all sweeps.
    """
    k = operator.index(k)
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > inst.max_list_len:
        raise ValueError(f"k={k} exceeds the {inst.max_list_len} rank weights")
    best: SolveResult | None = None
    evaluations = 0
    for length in range(1, k + 1):
        w = inst.rank_weights[:length]
        sub = dataclasses.replace(inst, rank_weights=w / w.sum(),
                                  weight_mode="normalized")
        result = greedy_maximize(make_calibration_fn(sub, spec), length,
                                 allow_repeats)
        evaluations += result.evaluations
        if best is None or result.value > best.value:
            best = result
    assert best is not None
    return SolveResult(best.sequence, best.value, evaluations=evaluations)
