"""Numba-compiled inner loops for skip-gram negative-sampling training.

The deterministic kernel owns its own xorshift64* generator so that a run is
reproducible bit-for-bit from the seed alone, independent of numpy's global
state. The parallel kernel derives one stream per document and tolerates
unsynchronized weight updates (hogwild-style).
"""

import math

import numpy as np
from numba import njit, prange

_MULT = np.uint64(0x2545F4914F6CDD1D)
_F53 = 1.0 / 9007199254740992.0  # 2^-53
_MAX_EXP = 30.0


@njit(cache=True, inline="always")
def _next_u64(state):
    x = state[0]
    x ^= x >> np.uint64(12)
    x ^= x << np.uint64(25)
    x ^= x >> np.uint64(27)
    state[0] = x
    return x * _MULT


@njit(cache=True, inline="always")
def _next_f64(state):
    return float(_next_u64(state) >> np.uint64(11)) * _F53


@njit(cache=True, inline="always")
def _sample_negative(state, neg_cdf):
    u = _next_f64(state)
    return np.searchsorted(neg_cdf, u, side="right")


@njit(cache=True, inline="always")
def _train_pair(center, ctx, w_in, w_out, neg_cdf, negatives, alpha, state, grad):
    """One SGD step on a (center, context) pair. Returns the pair's loss."""
    dim = w_in.shape[1]
    v = w_in[center]
    for d in range(dim):
        grad[d] = 0.0
    loss = 0.0
    for n in range(negatives + 1):
        if n == 0:
            target = ctx
            label = 1.0
        else:
            target = _sample_negative(state, neg_cdf)
            if target == ctx:
                continue
            label = 0.0
        u = w_out[target]
        f = 0.0
        for d in range(dim):
            f += v[d] * u[d]
        if f > _MAX_EXP:
            p = 1.0
        elif f < -_MAX_EXP:
            p = 0.0
        else:
            p = 1.0 / (1.0 + math.exp(-f))
        if label > 0.5:
            loss += -math.log(max(p, 1e-12))
        else:
            loss += -math.log(max(1.0 - p, 1e-12))
        g = (label - p) * alpha
        for d in range(dim):
            grad[d] += g * u[d]
            u[d] += g * v[d]
    for d in range(dim):
        v[d] += grad[d]
    return loss


@njit(cache=True)
def train_deterministic(tokens, doc_offsets, w_in, w_out, neg_cdf, keep_prob,
                        window, negatives, epochs, alpha0, alpha_min, seed,
                        epoch_losses):
    n_tokens = tokens.shape[0]
    total_steps = epochs * n_tokens
    state = np.empty(1, dtype=np.uint64)
    state[0] = np.uint64(seed) ^ np.uint64(0x9E3779B97F4A7C15)
    if state[0] == np.uint64(0):
        state[0] = np.uint64(1)
    grad = np.empty(w_in.shape[1], dtype=np.float64)
    step = 0
    for epoch in range(epochs):
        loss_sum = 0.0
        pair_count = 0
        for d in range(doc_offsets.shape[0] - 1):
            lo = doc_offsets[d]
            hi = doc_offsets[d + 1]
            for i in range(lo, hi):
                frac = step / total_steps
                alpha = alpha0 + (alpha_min - alpha0) * frac
                if alpha < alpha_min:
                    alpha = alpha_min
                step += 1
                w = tokens[i]
                if keep_prob[w] < 1.0 and _next_f64(state) >= keep_prob[w]:
                    continue
                b = 1 + int(_next_u64(state) % np.uint64(window))
                for j in range(max(lo, i - b), min(hi, i + b + 1)):
                    if j == i:
                        continue
                    loss_sum += _train_pair(w, tokens[j], w_in, w_out, neg_cdf,
                                            negatives, alpha, state, grad)
                    pair_count += 1
        epoch_losses[epoch] = loss_sum / max(1, pair_count)


@njit(cache=True, parallel=True)
def train_parallel(tokens, doc_offsets, w_in, w_out, neg_cdf, keep_prob,
                   window, negatives, epochs, alpha0, alpha_min, seed,
                   epoch_losses):
    n_tokens = tokens.shape[0]
    total_steps = epochs * n_tokens
    n_docs = doc_offsets.shape[0] - 1
    doc_loss = np.zeros(n_docs, dtype=np.float64)
    doc_pairs = np.zeros(n_docs, dtype=np.int64)
    for epoch in range(epochs):
        for d in prange(n_docs):
            state = np.empty(1, dtype=np.uint64)
            state[0] = (np.uint64(seed) ^ np.uint64(0x9E3779B97F4A7C15)
                        ^ (np.uint64(d + 1) * np.uint64(0xBF58476D1CE4E5B9))
                        ^ (np.uint64(epoch + 1) << np.uint64(32)))
            if state[0] == np.uint64(0):
                state[0] = np.uint64(1)
            grad = np.empty(w_in.shape[1], dtype=np.float64)
            lo = doc_offsets[d]
            hi = doc_offsets[d + 1]
            loss_sum = 0.0
            pair_count = 0
            for i in range(lo, hi):
                frac = (epoch * n_tokens + i) / total_steps
                alpha = alpha0 + (alpha_min - alpha0) * frac
                if alpha < alpha_min:
                    alpha = alpha_min
                w = tokens[i]
                if keep_prob[w] < 1.0 and _next_f64(state) >= keep_prob[w]:
                    continue
                b = 1 + int(_next_u64(state) % np.uint64(window))
                for j in range(max(lo, i - b), min(hi, i + b + 1)):
                    if j == i:
                        continue
                    loss_sum += _train_pair(w, tokens[j], w_in, w_out, neg_cdf,
                                            negatives, alpha, state, grad)
                    pair_count += 1
            doc_loss[d] = loss_sum
            doc_pairs[d] = pair_count
        epoch_losses[epoch] = doc_loss.sum() / max(1, doc_pairs.sum())
