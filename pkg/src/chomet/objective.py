"""Slot utility, its gradient, and the weighted switching cost.

The utility is linear in the preparation vector: a log-rate reward for
preparing the served cell, a beta penalty for preparing any other cell,
and a gamma penalty for leaving the served cell unprepared. The
switching cost is the diagonal-weighted Euclidean norm of the decision
change, scaled by delta.
"""

from dataclasses import dataclass

import numpy as np

from .radio import ScenarioTimeline, SlotEnvironment


@dataclass(frozen=True)
class ObjectiveBreakdown:
    rate_term: float
    beta_penalty: float
    gamma_penalty: float
    utility: float
    switching_cost: float   # delta * weighted norm
    objective: float        # utility - switching_cost


def _flat(x: np.ndarray, env: SlotEnvironment) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return x.reshape(env.sinr.shape) if x.ndim == 1 else x


def _log_rate_served(env: SlotEnvironment) -> np.ndarray:
    served = env.served
    if np.any((served > 0) & (env.rate <= 0)):
        raise ValueError("served cell with zero rate: inconsistent environment")
    with np.errstate(divide="ignore"):
        return np.where(served > 0, np.log(np.where(env.rate > 0, env.rate, 1.0)), 0.0)


def utility(x: np.ndarray, env: SlotEnvironment) -> float:
    """Slot utility g(x); accepts flat (I*J,) or (I, J) decisions, fractional or binary."""
    x2 = _flat(x, env)
    p = env.served
    log_c = _log_rate_served(env)
    rate_term = float(np.sum(x2 * p * env.availability[None, :] * log_c))
    beta_penalty = float(np.sum(env.beta * x2 * (1.0 - p)))
    gamma_penalty = float(np.sum(env.gamma * p * (1.0 - x2)))
    return rate_term - beta_penalty - gamma_penalty


def utility_gradient(env: SlotEnvironment) -> np.ndarray:
    """Gradient of g as a flat (I*J,) vector; decision-independent since g is linear."""
    p = env.served
    log_c = _log_rate_served(env)
    grad = p * env.availability[None, :] * log_c - env.beta * (1.0 - p) + env.gamma * p
    return grad.reshape(-1)


def utility_constant(env: SlotEnvironment) -> float:
    """Additive constant so that g(x) = <grad, x> + constant."""
    return -float(np.sum(env.gamma * env.served))


def switching_norm(x: np.ndarray, x_prev: np.ndarray, weights: np.ndarray) -> float:
    """Weighted norm of the decision change: sqrt(sum_n b_n (x_n - x'_n)^2)."""
    b = np.asarray(weights, dtype=float)
    if np.any(b <= 0):
        raise ValueError("switching weights must be strictly positive")
    dx = np.asarray(x, dtype=float).reshape(-1) - np.asarray(x_prev, dtype=float).reshape(-1)
    return float(np.sqrt(np.sum(b * dx * dx)))


def objective(x: np.ndarray, x_prev: np.ndarray, env: SlotEnvironment) -> ObjectiveBreakdown:
    """Full breakdown of the slot objective g(x) - delta * ||x - x_prev||_B."""
    x2 = _flat(x, env)
    p = env.served
    log_c = _log_rate_served(env)
    rate_term = float(np.sum(x2 * p * env.availability[None, :] * log_c))
    beta_penalty = float(np.sum(env.beta * x2 * (1.0 - p)))
    gamma_penalty = float(np.sum(env.gamma * p * (1.0 - x2)))
    util = rate_term - beta_penalty - gamma_penalty
    cost = env.delta * switching_norm(x, x_prev, env.switch_weights)
    return ObjectiveBreakdown(
        rate_term=rate_term,
        beta_penalty=beta_penalty,
        gamma_penalty=gamma_penalty,
        utility=util,
        switching_cost=cost,
        objective=util - cost,
    )


def timeline_gradients(timeline: ScenarioTimeline) -> np.ndarray:
    """Utility gradients for every slot, shape (T, I*J)."""
    p = timeline.served
    if np.any((p > 0) & (timeline.rate <= 0)):
        raise ValueError("served cell with zero rate: inconsistent timeline")
    with np.errstate(divide="ignore"):
        log_c = np.where(p > 0, np.log(np.where(timeline.rate > 0, timeline.rate, 1.0)), 0.0)
    avail = timeline.availability[:, None, :]
    beta = timeline.beta[:, None, None]
    gamma = timeline.gamma[:, None, None]
    grad = p * avail * log_c - beta * (1.0 - p) + gamma * p
    return grad.reshape(timeline.num_slots, -1)


def timeline_constants(timeline: ScenarioTimeline) -> np.ndarray:
    """Per-slot additive constants: g_t(x) = <grad_t, x> + const_t."""
    return -timeline.gamma * np.sum(timeline.served, axis=(1, 2))


def evaluate_decisions(decisions: np.ndarray, timeline: ScenarioTimeline):
    """Vectorized per-slot utility and switching cost of a decision sequence.

    ``decisions`` has shape (T, I*J); the pre-horizon decision is all
    zeros, so the first slot is charged for every initial preparation.
    Returns (utility, switching, objective) arrays of shape (T,).
    """
    x = np.asarray(decisions, dtype=float)
    grads = timeline_gradients(timeline)
    consts = timeline_constants(timeline)
    util = np.einsum("tn,tn->t", grads, x) + consts
    prev = np.vstack([np.zeros(x.shape[1]), x[:-1]])
    dx = x - prev
    switching = timeline.delta * np.sqrt(
        np.einsum("tn,tn->t", timeline.switch_weights, dx * dx)
    )
    return util, switching, util - switching
