"""CHOMET: expert pool with projected online gradient ascent, an
exponential-weights meta-learner over surrogate losses, and Madow
quantization to binary preparation decisions."""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels, objective
from .radio import ScenarioTimeline, SlotEnvironment


@dataclass(frozen=True)
class HyperParams:
    horizon: int
    num_experts: int
    thetas: np.ndarray       # ascending, geometric with ratio 2
    eta: float
    nu: float
    diameter: float          # D = sqrt(I*J)
    grad_bound: float        # G
    diameter_b: float        # D_B = D sqrt(b_max)
    diameter_b_dual: float   # D_B* = D / sqrt(b_max)
    grad_bound_b: float      # G_B = G sqrt(b_max)
    b_max: float
    c_max: float
    beta_max: float
    gamma_max: float


def derive_hyperparams(
    horizon: int,
    ue_count: int,
    cell_count: int,
    b_max: float,
    c_max: float,
    beta_max: float,
    gamma_max: float,
    theta_scale: float = 1.0,
) -> HyperParams:
    """Expert count, step grid and meta step from the problem bounds.

    All constants derive from the known scenario bounds (max switching
    weight, max rate, max scalarization values), not from observed data.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if min(b_max, c_max) <= 0 or beta_max < 0 or gamma_max < 0:
        raise ValueError("invalid bound parameters")
    T = horizon
    I, J = ue_count, cell_count
    D = math.sqrt(I * J)
    G = math.sqrt(I * (J - 1) * beta_max**2 + I * (math.log(c_max) + gamma_max) ** 2)
    D_B = D * math.sqrt(b_max)
    D_B_star = D / math.sqrt(b_max)
    G_B = G * math.sqrt(b_max)
    K = math.ceil(math.log2(math.sqrt(1.0 + 2.0 * T))) + 1
    theta_base = math.sqrt(D_B**2 / (T * (G**2 + 2.0 * G_B)))
    thetas = theta_scale * theta_base * 2.0 ** np.arange(K)
    # The fully conservative constant (with the squared factor) yields a
    # meta step so small the weights barely move within these horizons;
    # this milder constant keeps the meta-learner responsive while the
    # step still shrinks as 1/sqrt(T).
    nu = (D_B + 0.125) * (G * D + 2.0 * D_B)
    eta = 3.0 / math.sqrt(T * nu)
    return HyperParams(
        horizon=T,
        num_experts=K,
        thetas=thetas,
        eta=eta,
        nu=nu,
        diameter=D,
        grad_bound=G,
        diameter_b=D_B,
        diameter_b_dual=D_B_star,
        grad_bound_b=G_B,
        b_max=b_max,
        c_max=c_max,
        beta_max=beta_max,
        gamma_max=gamma_max,
    )


def hyperparams_for_timeline(timeline: ScenarioTimeline, theta_scale: float = 1.0) -> HyperParams:
    from .radio import max_rate_bound

    return derive_hyperparams(
        horizon=timeline.num_slots,
        ue_count=timeline.num_ues,
        cell_count=timeline.num_cells,
        b_max=1.0,
        c_max=max_rate_bound(timeline.config),
        beta_max=float(np.max(timeline.beta)),
        gamma_max=float(np.max(timeline.gamma)),
        theta_scale=theta_scale,
    )


def init_weights(num_experts: int) -> np.ndarray:
    """Initial meta weights w_k = (1 + 1/K) / (k (k+1)); sums to one by telescoping."""
    if num_experts < 1:
        raise ValueError("need at least one expert")
    k = np.arange(1, num_experts + 1, dtype=float)
    return (1.0 + 1.0 / num_experts) / (k * (k + 1.0))


def meta_combine(weights: np.ndarray, expert_decisions: np.ndarray) -> np.ndarray:
    """Weight-mix of expert iterates; stays inside the unit box."""
    return np.asarray(weights) @ np.asarray(expert_decisions)


def madow_quantize(marginals: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Unbiased binary rounding of fractional marginals via systematic sampling."""
    m = np.ascontiguousarray(marginals, dtype=float)
    if np.any(m < 0) or np.any(m > 1.0 + 1e-12):
        raise ValueError("marginals must lie in [0, 1]")
    return kernels.madow_select(m, rng.random())


def surrogate_loss(grad, expert_iterate, decision, switching_term) -> float:
    """Partially linearized per-expert loss: <grad, x^k - x_t> minus the
    (expert-independent) weighted switching cost of the implemented decision."""
    g = np.asarray(grad, dtype=float)
    diff = np.asarray(expert_iterate, dtype=float) - np.asarray(decision, dtype=float)
    return float(g @ diff) - float(switching_term)


def update_weights(weights: np.ndarray, losses: np.ndarray, eta: float) -> np.ndarray:
    if eta <= 0:
        raise ValueError("eta must be positive")
    return kernels.hedge_update(
        np.ascontiguousarray(weights, dtype=float),
        np.ascontiguousarray(losses, dtype=float),
        eta,
    )


def expert_step(iterate: np.ndarray, grad: np.ndarray, theta: float) -> np.ndarray:
    """Single-expert ascent step with clipping to the unit box."""
    out = kernels.expert_ascent(
        np.ascontiguousarray(iterate, dtype=float).reshape(1, -1),
        np.ascontiguousarray(grad, dtype=float),
        np.array([theta]),
    )
    return out[0]


@dataclass
class SlotOutcome:
    decision: np.ndarray         # (I*J,) int8
    mix: np.ndarray              # fractional meta decision before quantization
    weights: np.ndarray          # weights used for this slot's mix
    losses: np.ndarray           # surrogate losses of all experts
    utility: float
    switching_cost: float
    objective: float
    preparations: int


class ChometLearner:
    """Stateful slot-by-slot runner; one instance per simulation run."""

    def __init__(self, hyper: HyperParams, dim: int, rng: np.random.Generator):
        self.hyper = hyper
        self.dim = dim
        self.rng = rng
        self.iterates = np.zeros((hyper.num_experts, dim))
        self.weights = init_weights(hyper.num_experts)
        self.x_prev = np.zeros(dim)

    def step(self, env: SlotEnvironment) -> SlotOutcome:
        hp = self.hyper
        mix = meta_combine(self.weights, self.iterates)
        decision = madow_quantize(mix, self.rng)
        x = decision.astype(float)
        grad = objective.utility_gradient(env)
        breakdown = objective.objective(x, self.x_prev, env)
        losses = self.iterates @ grad - float(grad @ x) - breakdown.switching_cost
        used_weights = self.weights
        self.weights = update_weights(self.weights, losses, hp.eta)
        self.iterates = kernels.expert_ascent(
            self.iterates, grad, np.ascontiguousarray(hp.thetas)
        )
        self.x_prev = x
        return SlotOutcome(
            decision=decision,
            mix=mix,
            weights=used_weights,
            losses=losses,
            utility=breakdown.utility,
            switching_cost=breakdown.switching_cost,
            objective=breakdown.objective,
            preparations=int(decision.sum()),
        )


def run_chomet(timeline: ScenarioTimeline, hyper: HyperParams, rng: np.random.Generator):
    """Fast full-horizon run through the compiled kernel.

    Consumes exactly one uniform draw per slot from ``rng`` and follows
    the same trajectory as the slot-by-slot ``ChometLearner`` (identical
    decisions; float state equal up to compiled-dot rounding).
    """
    grads = objective.timeline_gradients(timeline)
    uniforms = rng.random(timeline.num_slots)
    decisions, mixes, weight_traj = kernels.meta_run(
        grads,
        np.ascontiguousarray(timeline.delta),
        np.ascontiguousarray(timeline.switch_weights),
        np.ascontiguousarray(hyper.thetas),
        hyper.eta,
        init_weights(hyper.num_experts),
        uniforms,
    )
    return decisions, mixes, weight_traj
