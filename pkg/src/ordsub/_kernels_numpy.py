"""Pure-numpy batch kernels. Same contracts as the numba versions.

Every kernel takes a (B, L) int64 array of movie indices (one sequence per
row, all rows the same length) and returns a (B,) float64 array of objective
values. L = 0 is legal and means the empty sequence.
"""

import numpy as np

KIND_SQRT = 0
KIND_POWER = 1


def coverage_values(pi: np.ndarray, theta: np.ndarray, p_sat: np.ndarray,
                    seqs: np.ndarray) -> np.ndarray:
    B, L = seqs.shape
    if L == 0:
        return np.zeros(B)
    # factors[b, j, u] = 1 - p_sat[seq[b, j], u], neutralized past patience
    factors = 1.0 - p_sat[seqs]
    keep = np.arange(L)[:, None] < theta[None, :]
    factors = np.where(keep[None, :, :], factors, 1.0)
    missed = factors.prod(axis=1)
    return ((1.0 - missed) * pi[None, :]).sum(axis=1)


def overlap_values(kind: int, alpha: float, target: np.ndarray,
                   rows: np.ndarray, weights: np.ndarray,
                   quality: np.ndarray, lam: float,
                   seqs: np.ndarray) -> np.ndarray:
    B, L = seqs.shape
    G = target.shape[0]
    if L == 0:
        built = np.zeros((B, G))
    else:
        built = (rows[seqs] * weights[:L, None]).sum(axis=1)
    if kind == KIND_SQRT:
        vals = np.sqrt(target[None, :] * built).sum(axis=1)
    else:
        vals = (target[None, :] ** (1.0 - alpha) * built ** alpha).sum(axis=1)
    if lam != 0.0 and L > 0:
        vals = vals + lam * quality[seqs].sum(axis=1)
    return vals


def kl_values(p: np.ndarray, qrows: np.ndarray, weights: np.ndarray,
              seqs: np.ndarray) -> np.ndarray:
    B, L = seqs.shape
    if L == 0:
        return np.zeros(B)
    mass = (qrows[seqs] * weights[:L, None]).sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        logm = np.log(mass)
        terms = np.where(p[None, :] > 0.0, p[None, :] * logm, 0.0)
    return terms.sum(axis=1)
