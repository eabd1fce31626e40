"""Named problem instances, seeded random families, and the instance file format.

All generators are pure functions of their arguments. Random families draw
from numpy's default_rng (PCG64) with a documented draw order, so a seed
pins the instance bit-for-bit across platforms.

Instance files are JSON documents with three top-level fields:

    kind      "coverage" or "calibration"
    metadata  {"name": ..., "seed": ..., "params": {...}}
    payload   the instance arrays (coverage: pi, theta, p_sat;
              calibration: genre_dist, target, rank_weights, weight_mode,
              quality, quality_tradeoff)

Reals are serialized with round-trip precision (shortest repr), and the
serialization is canonical: write -> read -> write reproduces the file
byte for byte.
"""

import dataclasses
import json
import operator
import os

import numpy as np

from .calibration import CalibrationInstance
from .coverage import CoverageInstance

__all__ = [
    "tightness_instance",
    "kl_counterexample",
    "seqdep_instance",
    "random_coverage",
    "random_calibration",
    "InstanceFile",
    "instance_document",
    "write_instance",
    "read_instance",
]

KL_DEFAULT_P = (0.05, 0.9, 0.025, 0.025)
KL_DEFAULT_EPS = 1e-10


def tightness_instance(k: int, delta: float = 1e-6) -> CoverageInstance:
    """Coverage family on which greedy attains exactly half the optimum.

    k movies and k user types: type i (1-based) has patience i and is
    satisfied only by movie i. Type probabilities are 1/k perturbed to
    pi_i proportional to 1 + i*delta (then renormalized), which steers
    greedy to pick movies in reverse order while any positive marginal
    remains: after the first k/2 reverse picks every remaining movie sits
    past its type's patience, gains are all zero, and the lowest-index rule
    appends the leftovers in ascending order. Either way only k/2 types get
    covered (value ~ 1/2) while the identity order covers all k (value 1).

    delta must lie in [0, 1/k); with delta=0 the lowest-index tie-break picks
    movie 1 first and greedy reaches the optimum, so the instance is only
    tight for delta > 0.
    """
    k = operator.index(k)
    if k < 2 or k % 2 != 0:
        raise ValueError("k must be an even integer >= 2")
    delta = float(delta)
    if not 0.0 <= delta < 1.0 / k:
        raise ValueError("delta must lie in [0, 1/k)")
    pi = 1.0 + delta * np.arange(1, k + 1, dtype=np.float64)
    pi /= pi.sum()
    theta = np.arange(1, k + 1, dtype=np.int64)
    p_sat = np.eye(k, dtype=np.float64)
    return CoverageInstance(pi=pi, p_sat=p_sat, theta=theta)


def kl_counterexample(w1: float, eps: float = KL_DEFAULT_EPS,
                      p=KL_DEFAULT_P) -> CalibrationInstance:
    """Two-movie, four-genre instance on which the log-mass score misbehaves.

    Movie 1 spreads mass (1/2, 1/4, 1/4, eps)*(1-eps falloff); movie 2
    concentrates it (1/2, 1/2, eps/2, eps/2). Rank weights are (w1, 1) in
    raw mode with w1 > 1; the target is p. Scored with the kl heuristic,
    the two orderings of the movies bracket sign changes as w1 grows, and
    the ordered-submodularity checker finds violations in the
    sign-inconsistent regime.
    """
    w1 = float(w1)
    if not w1 > 1.0:
        raise ValueError("w1 must be > 1")
    eps = float(eps)
    if not 0.0 < eps < 1.0 / 3.0:
        raise ValueError("eps must lie strictly in (0, 1/3)")
    p = np.asarray(p, dtype=np.float64)
    if p.shape != (4,):
        raise ValueError("p must be a 4-vector")
    if np.any(p < 0.0) or abs(float(p.sum()) - 1.0) > 1e-9:
        raise ValueError("p must be a distribution over the 4 genres")
    genre_dist = np.array([
        [0.5 * (1 - eps), 0.25 * (1 - eps), 0.25 * (1 - eps), eps],
        [0.5 * (1 - eps), 0.5 * (1 - eps), 0.5 * eps, 0.5 * eps],
    ])
    return CalibrationInstance(genre_dist=genre_dist, target=p,
                               rank_weights=np.array([w1, 1.0]),
                               weight_mode="raw")


def seqdep_instance() -> CalibrationInstance:
    """Four movies over two genres whose best ordering is context-dependent.

    With weights (0.5, 0.3, 0.2) and target (0.5, 0.5), the better relative
    order of the first two movies flips depending on which third movie
    completes the list.
    """
    genre_dist = np.array([
        [0.4, 0.6],
        [0.8, 0.2],
        [1.0, 0.0],
        [0.0, 1.0],
    ])
    return CalibrationInstance(genre_dist=genre_dist,
                               target=np.array([0.5, 0.5]),
                               rank_weights=np.array([0.5, 0.3, 0.2]))


def random_coverage(seed: int, n_movies: int, n_types: int,
                    max_patience: int) -> CoverageInstance:
    """Seeded uniform coverage instance.

    Draw order: pi (n_types uniforms, normalized), p_sat (n_movies x n_types
    uniforms), theta (n_types integers uniform on [1, max_patience]).
    """
    if min(n_movies, n_types, max_patience) < 1:
        raise ValueError("dimensions and max_patience must be >= 1")
    rng = np.random.default_rng(seed)
    pi = rng.random(n_types)
    pi /= pi.sum()
    p_sat = rng.random((n_movies, n_types))
    theta = rng.integers(1, max_patience + 1, size=n_types)
    return CoverageInstance(pi=pi, p_sat=p_sat, theta=theta)


def random_calibration(seed: int, n_movies: int, n_genres: int, k: int, *,
                       with_quality: bool = False,
                       quality_tradeoff: float = 0.0) -> CalibrationInstance:
    """Seeded uniform calibration instance with k rank weights.

    Draw order: genre rows (n_movies x n_genres uniforms, row-normalized),
    target (n_genres uniforms, normalized), rank weights (k uniforms, sorted
    descending, normalized), then optionally quality (n_movies uniforms).
    """
    if min(n_movies, n_genres, k) < 1:
        raise ValueError("dimensions and k must be >= 1")
    if k > n_movies:
        raise ValueError("k must not exceed n_movies")
    rng = np.random.default_rng(seed)
    rows = rng.random((n_movies, n_genres))
    rows /= rows.sum(axis=1, keepdims=True)
    target = rng.random(n_genres)
    target /= target.sum()
    weights = np.sort(rng.random(k))[::-1]
    weights /= weights.sum()
    quality = rng.random(n_movies) if with_quality else None
    return CalibrationInstance(genre_dist=rows, target=target,
                               rank_weights=weights,
                               quality=quality,
                               quality_tradeoff=quality_tradeoff)


@dataclasses.dataclass(frozen=True)
class InstanceFile:
    """A kind tag, free-form metadata, and the validated instance."""
    kind: str
    metadata: dict
    instance: CoverageInstance | CalibrationInstance


def _payload(instance) -> tuple[str, dict]:
    if isinstance(instance, CoverageInstance):
        return "coverage", {
            "pi": instance.pi.tolist(),
            "theta": instance.theta.tolist(),
            "p_sat": instance.p_sat.tolist(),
        }
    if isinstance(instance, CalibrationInstance):
        return "calibration", {
            "genre_dist": instance.genre_dist.tolist(),
            "target": instance.target.tolist(),
            "rank_weights": instance.rank_weights.tolist(),
            "weight_mode": instance.weight_mode,
            "quality": None if instance.quality is None
                       else instance.quality.tolist(),
            "quality_tradeoff": instance.quality_tradeoff,
        }
    raise TypeError(f"not a serializable instance: {type(instance).__name__}")


def _instance_from(kind: str, payload: dict):
    if not isinstance(payload, dict):
        raise ValueError("payload must be an object")
    if kind == "coverage":
        required = {"pi", "theta", "p_sat"}
    elif kind == "calibration":
        required = {"genre_dist", "target", "rank_weights", "weight_mode",
                    "quality", "quality_tradeoff"}
    else:
        raise ValueError(f"unknown instance kind {kind!r}")
    missing = required - payload.keys()
    unexpected = payload.keys() - required
    if missing or unexpected:
        raise ValueError(
            f"bad {kind} payload fields: missing {sorted(missing)}, "
            f"unexpected {sorted(unexpected)}")
    if kind == "coverage":
        return CoverageInstance(pi=np.asarray(payload["pi"]),
                                p_sat=np.asarray(payload["p_sat"]),
                                theta=np.asarray(payload["theta"]))
    quality = payload["quality"]
    return CalibrationInstance(
        genre_dist=np.asarray(payload["genre_dist"]),
        target=np.asarray(payload["target"]),
        rank_weights=np.asarray(payload["rank_weights"]),
        weight_mode=payload["weight_mode"],
        quality=None if quality is None else np.asarray(quality),
        quality_tradeoff=float(payload["quality_tradeoff"]))


def instance_document(instfile: InstanceFile) -> str:
    """Canonical serialized form (what write_instance puts on disk)."""
    kind, payload = _payload(instfile.instance)
    meta = instfile.metadata
    doc = {
        "kind": kind,
        "metadata": {
            "name": meta.get("name", ""),
            "seed": meta.get("seed"),
            "params": meta.get("params", {}),
        },
        "payload": payload,
    }
    return json.dumps(doc, indent=2) + "\n"


def write_instance(path: str | os.PathLike, instance, *, name: str = "",
                   seed: int | None = None,
                   params: dict | None = None) -> InstanceFile:
    """Serialize an instance to a canonical JSON file; returns the record."""
    metadata = {"name": name, "seed": seed, "params": params or {}}
    kind, _ = _payload(instance)
    record = InstanceFile(kind=kind, metadata=metadata, instance=instance)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(instance_document(record))
    return record


def read_instance(path: str | os.PathLike) -> InstanceFile:
    """Parse and validate an instance file."""
    with open(path, encoding="utf-8") as handle:
        try:
            doc = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict) or {"kind", "metadata", "payload"} - doc.keys():
        raise ValueError(f"{path}: expected kind/metadata/payload fields")
    metadata = doc["metadata"]
    if not isinstance(metadata, dict):
        raise ValueError(f"{path}: metadata must be an object")
    instance = _instance_from(doc["kind"], doc["payload"])
    return InstanceFile(kind=doc["kind"], metadata=metadata, instance=instance)
