"""3GPP-style (N-best, TTT) comparators and hindsight oracles."""

from dataclasses import dataclass

import numpy as np

from . import kernels, objective
from .radio import ScenarioTimeline

# State space of the exact DP is 2^(I*J); beyond this the oracle refuses.
DP_DIMENSION_CAP = 14


@dataclass(frozen=True)
class TttComparatorConfig:
    n_best: int   # cells per UE considered "top"; 0 prepares nothing
    ttt: int      # consecutive slots in the top-N required before preparing

    def __post_init__(self):
        if self.n_best < 0:
            raise ValueError("n_best must be >= 0")
        if self.ttt < 1:
            raise ValueError("ttt must be >= 1")

    @property
    def label(self) -> str:
        return f"ttt({self.n_best},{self.ttt})"


@dataclass(frozen=True)
class OracleResult:
    decisions: np.ndarray        # (T, I*J) int8
    per_slot_values: np.ndarray  # (T,)
    total: float


def run_ttt_comparator(
    timeline: ScenarioTimeline, cfg: TttComparatorConfig, use_offsets: bool = False
) -> np.ndarray:
    """Decisions of the (N-best, TTT) comparator, shape (T, I*J) int8.

    A cell is prepared for a UE at slot t iff it ranked in that UE's
    top-N for each of the TTT slots t-TTT .. t-1 (the trigger fires on
    past observations only; the comparator, like any online policy,
    commits before seeing slot t); before TTT observations exist nothing
    qualifies. Ranking uses raw SINR by default; with ``use_offsets``
    the per-cell offsets are subtracted from the dB score, as in an
    A3-style trigger. Ties break towards the lowest cell index.
    """
    T, I, J = timeline.sinr.shape
    if cfg.n_best > J:
        raise ValueError(f"n_best={cfg.n_best} exceeds the number of cells ({J})")
    if cfg.n_best == 0:
        return np.zeros((T, I * J), dtype=np.int8)
    if use_offsets:
        with np.errstate(divide="ignore"):
            score = np.where(
                timeline.sinr > 0,
                10.0 * np.log10(np.where(timeline.sinr > 0, timeline.sinr, 1.0)),
                -np.inf,
            ) - timeline.offsets[:, None, :]
    else:
        score = timeline.sinr
    # Stable sort on -score: equal scores keep ascending cell index.
    order = np.argsort(-score, axis=2, kind="stable")
    ranks = np.empty_like(order)
    np.put_along_axis(ranks, order, np.broadcast_to(np.arange(J), (T, I, J)).copy(), axis=2)
    in_top = (ranks < cfg.n_best).astype(np.int32)
    csum = np.concatenate([np.zeros((1, I, J), dtype=np.int32), np.cumsum(in_top, axis=0)])
    prepared = np.zeros((T, I, J), dtype=np.int8)
    if T > cfg.ttt:
        # Window of the TTT slots strictly before t: csum[t] - csum[t-TTT].
        window = csum[cfg.ttt:-1] - csum[: T - cfg.ttt]
        prepared[cfg.ttt:] = (window == cfg.ttt).astype(np.int8)
    return prepared.reshape(T, I * J)


def oracle_per_slot(timeline: ScenarioTimeline) -> OracleResult:
    """Per-slot hindsight maximizer of the utility, ignoring switching.

    The utility is linear, so an entry is prepared iff its gradient
    coefficient is strictly positive. ``per_slot_values`` are utility
    values (no switching is charged to this benchmark).
    """
    grads = objective.timeline_gradients(timeline)
    consts = objective.timeline_constants(timeline)
    decisions = (grads > 0).astype(np.int8)
    values = np.einsum("tn,tn->t", grads, decisions.astype(float)) + consts
    return OracleResult(decisions=decisions, per_slot_values=values, total=float(values.sum()))


def oracle_dp(timeline: ScenarioTimeline) -> OracleResult:
    """Exact full-horizon maximizer including switching costs (small instances).

    ``per_slot_values`` are full objective values (utility minus weighted
    switching), summing to the optimum.
    """
    n = timeline.dim
    if n > DP_DIMENSION_CAP:
        raise ValueError(
            f"oracle_dp handles at most {DP_DIMENSION_CAP} decision entries "
            f"(got {n}); use oracle_per_slot at this scale"
        )
    grads = objective.timeline_gradients(timeline)
    consts = objective.timeline_constants(timeline)
    total, decisions = kernels.dp_solve(
        np.ascontiguousarray(grads),
        np.ascontiguousarray(consts),
        np.ascontiguousarray(timeline.delta),
        np.ascontiguousarray(timeline.switch_weights),
    )
    _, _, per_slot = objective.evaluate_decisions(decisions.astype(float), timeline)
    return OracleResult(decisions=decisions, per_slot_values=per_slot, total=float(total))
