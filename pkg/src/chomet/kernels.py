"""Hot numeric kernels, numba-compiled unless CHOMET_NUMBA=0.

Every kernel is plain numpy-compatible Python; the jit shim either
compiles it or leaves it untouched, so both paths execute identical
code. ``scripts/benchmark.py`` times the two paths against each other.
"""

import numpy as np

from ._jit import NUMBA_ENABLED, njit

if NUMBA_ENABLED:
    _jit = njit(cache=True)
else:
    def _jit(func):
        return func


@_jit
def madow_select(marginals, u):
    """Systematic (Madow) sampling of a binary vector from marginals.

    One uniform draw u in [0, 1) generates the grid {u, u+1, u+2, ...};
    entry n is selected iff a grid point lands in (C_{n-1}, C_n] of the
    cumulative marginal sums. E[out_n] = marginals[n] exactly and the
    selected count is floor or ceil of the marginal total.
    """
    n = marginals.shape[0]
    out = np.zeros(n, dtype=np.int8)
    c = 0.0
    count_prev = int(np.floor(-u)) + 1
    for idx in range(n):
        c += marginals[idx]
        count = int(np.floor(c - u)) + 1
        if count > count_prev:
            out[idx] = 1
        count_prev = count
    return out


@_jit
def hedge_update(weights, losses, eta):
    """Exponential-weights update w_k <- w_k exp(eta*l_k), renormalized.

    The max shift guards overflow and is value-identical (shift
    invariance of the normalized update).
    """
    z = eta * losses
    z = z - np.max(z)
    w = weights * np.exp(z)
    return w / np.sum(w)


@_jit
def expert_ascent(iterates, grad, thetas):
    """Projected gradient-ascent step for all experts; the projection is
    entrywise clipping to [0, 1] (the unit box equals the feasible hull)."""
    K, n = iterates.shape
    out = np.empty_like(iterates)
    for k in range(K):
        for j in range(n):
            v = iterates[k, j] + thetas[k] * grad[j]
            if v < 0.0:
                v = 0.0
            elif v > 1.0:
                v = 1.0
            out[k, j] = v
    return out


@_jit
def weighted_norm(dx, b):
    s = 0.0
    for j in range(dx.shape[0]):
        s += b[j] * dx[j] * dx[j]
    return np.sqrt(s)


@_jit
def meta_run(grads, deltas, switch_weights, thetas, eta, init_weights, uniforms):
    """Full-horizon meta-learning loop.

    Per slot: mix expert iterates with the meta weights, quantize with one
    uniform draw, evaluate the shared utility gradient at the implemented
    decision, update weights with the surrogate losses, then let every
    expert take its ascent step. Expert iterates start at zero, as does
    the pre-horizon implemented decision.

    Returns (decisions (T, n) int8, mix marginals (T, n), weight
    trajectory (T, K) holding the weights used in slot t).
    """
    T, n = grads.shape
    K = thetas.shape[0]
    iterates = np.zeros((K, n))
    w = init_weights.copy()
    x_prev = np.zeros(n)
    decisions = np.zeros((T, n), dtype=np.int8)
    mixes = np.zeros((T, n))
    weight_traj = np.zeros((T, K))
    losses = np.zeros(K)
    for t in range(T):
        weight_traj[t] = w
        mix = w @ iterates
        mixes[t] = mix
        x_bin = madow_select(mix, uniforms[t])
        x = x_bin.astype(np.float64)
        decisions[t] = x_bin
        grad = grads[t]
        switch_term = deltas[t] * weighted_norm(x - x_prev, switch_weights[t])
        gx = grad @ x
        for k in range(K):
            losses[k] = grad @ iterates[k] - gx - switch_term
        w = hedge_update(w, losses, eta)
        iterates = expert_ascent(iterates, grad, thetas)
        x_prev = x
    return decisions, mixes, weight_traj


@_jit
def dp_solve(grads, consts, deltas, switch_weights):
    """Exact maximizer of the switching-coupled horizon problem.

    Forward DP over all 2^n binary decisions with state = previous
    decision; the pre-horizon state is all zeros. Returns (total value,
    decisions (T, n) int8).
    """
    T, n = grads.shape
    S = 1 << n
    NEG = -1.0e300
    value = np.full(S, NEG)
    value[0] = 0.0
    parent = np.zeros((T, S), dtype=np.int32)
    util = np.empty(S)
    new_value = np.empty(S)
    for t in range(T):
        for s in range(S):
            v = consts[t]
            for j in range(n):
                if (s >> j) & 1:
                    v += grads[t, j]
            util[s] = v
        for s in range(S):
            best = NEG
            best_prev = 0
            for sp in range(S):
                if value[sp] <= NEG:
                    continue
                diff = s ^ sp
                cost = 0.0
                for j in range(n):
                    if (diff >> j) & 1:
                        cost += switch_weights[t, j]
                cand = value[sp] + util[s] - deltas[t] * np.sqrt(cost)
                if cand > best:
                    best = cand
                    best_prev = sp
            new_value[s] = best
            parent[t, s] = best_prev
        value[:] = new_value
    state = int(np.argmax(value))
    total = value[state]
    decisions = np.zeros((T, n), dtype=np.int8)
    for t in range(T - 1, -1, -1):
        for j in range(n):
            decisions[t, j] = (state >> j) & 1
        state = parent[t, state]
    return total, decisions
