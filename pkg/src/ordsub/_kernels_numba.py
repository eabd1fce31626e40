"""Numba-jitted batch kernels, parallel over the batch dimension."""

import math

import numpy as np
from numba import njit, prange

KIND_SQRT = 0
KIND_POWER = 1


@njit(cache=True, parallel=True)
def coverage_values(pi, theta, p_sat, seqs):
    B, L = seqs.shape
    U = pi.shape[0]
    out = np.empty(B)
    for b in prange(B):
        total = 0.0
        for u in range(U):
            t = theta[u]
            if t > L:
                t = L
            missed = 1.0
            for j in range(t):
                missed *= 1.0 - p_sat[seqs[b, j], u]
            total += pi[u] * (1.0 - missed)
        out[b] = total
    return out


@njit(cache=True, parallel=True)
def overlap_values(kind, alpha, target, rows, weights, quality, lam, seqs):
    B, L = seqs.shape
    G = target.shape[0]
    out = np.empty(B)
    for b in prange(B):
        val = 0.0
        for g in range(G):
            built = 0.0
            for r in range(L):
                built += weights[r] * rows[seqs[b, r], g]
            if kind == KIND_SQRT:
                val += math.sqrt(target[g] * built)
            else:
                val += target[g] ** (1.0 - alpha) * built ** alpha
        if lam != 0.0:
            for r in range(L):
                val += lam * quality[seqs[b, r]]
        out[b] = val
    return out


@njit(cache=True, parallel=True)
def kl_values(p, qrows, weights, seqs):
    B, L = seqs.shape
    G = p.shape[0]
    out = np.empty(B)
    for b in prange(B):
        if L == 0:
            out[b] = 0.0
            continue
        val = 0.0
        for g in range(G):
            if p[g] <= 0.0:
                continue
            mass = 0.0
            for r in range(L):
                mass += weights[r] * qrows[seqs[b, r], g]
            if mass > 0.0:
                val += p[g] * math.log(mass)
            else:
                val = -np.inf
                break
        out[b] = val
    return out
