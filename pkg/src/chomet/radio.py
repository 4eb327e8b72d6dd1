"""Per-slot radio environment generation.

Produces the exogenous quantities the controller observes each slot:
SINR, achievable rates, best-cell indicators, offsets, bandwidth
availability, switching weights and scalarization parameters. Scenarios
either draw SINR directly in dB (stationary/volatile) or derive it from
transmit powers and channel gains (physical).
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

# Weights below this are clamped up: the switching norm needs strictly
# positive diagonal weights and the dual-norm constant blows up at zero.
MIN_SWITCH_WEIGHT = 1e-3

Schedule = Union[float, Sequence[float], np.ndarray]


@dataclass(frozen=True)
class CellConfig:
    """Static per-cell radio parameters (physical mode)."""

    transmit_power: float        # watts
    bandwidth: float             # MHz
    cochannel: tuple = ()        # indices of cells on the same frequency
    noise_psd: float = 1e-9      # watts/MHz

    def validate(self, own_index: int) -> None:
        if self.transmit_power <= 0:
            raise ValueError(f"cell {own_index}: transmit_power must be > 0")
        if self.bandwidth <= 0:
            raise ValueError(f"cell {own_index}: bandwidth must be > 0")
        if self.noise_psd <= 0:
            raise ValueError(f"cell {own_index}: noise_psd must be > 0")
        if own_index in self.cochannel:
            raise ValueError(f"cell {own_index} lists itself as co-channel interferer")


@dataclass(frozen=True)
class ScenarioConfig:
    mode: str = "volatile"                   # volatile | stationary | physical
    ue_count: int = 20
    cell_count: int = 10
    slots: int = 5000
    sinr_range_db: tuple = (10.0, 30.0)
    change_period: Optional[int] = None      # default: 10 volatile, 600 stationary
    bandwidth_set: tuple = (5.0, 10.0, 15.0, 20.0)
    beta: Schedule = 0.5
    gamma: Schedule = 10.0
    delta: Schedule = 5.0
    availability: str = "fixed"              # fixed | random
    offset_range_db: tuple = (0.0, 1.0)
    offsets_per_slot: bool = False           # redraw offsets every slot instead of on the SINR schedule
    seed: int = 0
    # physical mode only
    cells: tuple = ()
    gains: Optional[np.ndarray] = None       # (T, I, J) channel gains

    def __post_init__(self):
        if self.mode not in ("volatile", "stationary", "physical"):
            raise ValueError(f"unknown scenario mode {self.mode!r}")
        if self.ue_count < 1 or self.cell_count < 1 or self.slots < 1:
            raise ValueError("ue_count, cell_count and slots must be positive")
        if self.sinr_range_db[0] >= self.sinr_range_db[1]:
            raise ValueError("sinr_range_db lower bound must be below upper bound")
        if self.effective_change_period < 1:
            raise ValueError("change_period must be >= 1")
        if self.mode == "physical":
            if len(self.cells) != self.cell_count:
                raise ValueError("physical mode needs one CellConfig per cell")
            for j, cell in enumerate(self.cells):
                cell.validate(j)
            if self.gains is None or self.gains.shape != (self.slots, self.ue_count, self.cell_count):
                raise ValueError("physical mode needs gains of shape (slots, ue_count, cell_count)")

    @property
    def effective_change_period(self) -> int:
        if self.change_period is not None:
            return int(self.change_period)
        return 600 if self.mode == "stationary" else 10


@dataclass(frozen=True)
class SlotEnvironment:
    """Everything exogenous the controller sees in one slot."""

    sinr: np.ndarray             # (I, J) linear
    rate: np.ndarray             # (I, J) Mbps
    served: np.ndarray           # (I, J) one-hot rows (best-cell indicator)
    offsets: np.ndarray          # (J,) dB
    availability: np.ndarray     # (J,) in [0, 1]
    switch_weights: np.ndarray   # (I*J,) in (0, 1]
    beta: Union[float, np.ndarray]
    gamma: Union[float, np.ndarray]
    delta: float


@dataclass(frozen=True)
class ScenarioTimeline:
    config: ScenarioConfig
    sinr: np.ndarray             # (T, I, J) linear
    rate: np.ndarray             # (T, I, J) Mbps
    served: np.ndarray           # (T, I, J) one-hot rows
    offsets: np.ndarray          # (T, J) dB
    availability: np.ndarray     # (T, J)
    switch_weights: np.ndarray   # (T, I*J)
    beta: np.ndarray             # (T,)
    gamma: np.ndarray            # (T,)
    delta: np.ndarray            # (T,)
    bandwidths: np.ndarray = field(default=None)  # (J,) MHz

    @property
    def num_slots(self) -> int:
        return self.sinr.shape[0]

    @property
    def num_ues(self) -> int:
        return self.sinr.shape[1]

    @property
    def num_cells(self) -> int:
        return self.sinr.shape[2]

    @property
    def dim(self) -> int:
        return self.num_ues * self.num_cells

    def slot(self, t: int) -> SlotEnvironment:
        return SlotEnvironment(
            sinr=self.sinr[t],
            rate=self.rate[t],
            served=self.served[t],
            offsets=self.offsets[t],
            availability=self.availability[t],
            switch_weights=self.switch_weights[t],
            beta=float(self.beta[t]),
            gamma=float(self.gamma[t]),
            delta=float(self.delta[t]),
        )


def compute_sinr(ue_gains: np.ndarray, cell_index: int, cells: Sequence[CellConfig]) -> float:
    """Linear SINR of one cell towards one UE given the UE's gain row."""
    gains = np.asarray(ue_gains, dtype=float)
    if np.any(gains < 0):
        raise ValueError("channel gains must be nonnegative")
    cell = cells[cell_index]
    cell.validate(cell_index)
    interference = sum(cells[k].transmit_power * gains[k] for k in cell.cochannel)
    denom = cell.bandwidth * cell.noise_psd + interference
    if denom <= 0:
        raise ValueError("SINR denominator is nonpositive; invalid cell configuration")
    return cell.transmit_power * gains[cell_index] / denom


def compute_rate(bandwidth: float, sinr: float) -> float:
    """Shannon rate in Mbps for a bandwidth in MHz and a linear SINR."""
    if bandwidth <= 0:
        raise ValueError("bandwidth must be positive")
    if sinr < 0:
        raise ValueError("SINR must be nonnegative")
    return bandwidth * np.log2(1.0 + sinr)


def best_cell_indicator(sinr_row: np.ndarray, offsets_db: np.ndarray) -> np.ndarray:
    """One-hot row marking the offset-adjusted strongest cell.

    The comparison happens on the dB scale (offsets are dB values, as in
    A3-event triggers); unreachable cells (zero linear SINR) never win.
    Ties break towards the lowest cell index.
    """
    s = np.asarray(sinr_row, dtype=float)
    if np.all(s <= 0):
        raise ValueError("UE out of coverage: SINR row is all zero")
    with np.errstate(divide="ignore"):
        adjusted = np.where(s > 0, 10.0 * np.log10(np.where(s > 0, s, 1.0)), -np.inf)
    adjusted = adjusted - np.asarray(offsets_db, dtype=float)
    out = np.zeros_like(s)
    out[int(np.argmax(adjusted))] = 1.0
    return out


def _as_schedule(value: Schedule, num_slots: int, name: str) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(value, dtype=float))
    if arr.size == 1:
        return np.full(num_slots, float(arr[0]))
    if arr.shape != (num_slots,):
        raise ValueError(f"{name} schedule must be scalar or length {num_slots}")
    return arr.copy()


def _served_from(sinr: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """Best-cell indicators for all slots; vectorized argmax on the dB scale."""
    with np.errstate(divide="ignore"):
        db = np.where(sinr > 0, 10.0 * np.log10(np.where(sinr > 0, sinr, 1.0)), -np.inf)
    adjusted = db - offsets[:, None, :]
    best = np.argmax(adjusted, axis=2)
    served = np.zeros_like(sinr)
    t_idx, i_idx = np.meshgrid(
        np.arange(sinr.shape[0]), np.arange(sinr.shape[1]), indexing="ij"
    )
    served[t_idx, i_idx, best] = 1.0
    return served


def generate_timeline(config: ScenarioConfig, seed=None) -> ScenarioTimeline:
    """Build the full exogenous timeline for a scenario.

    Pure function of (config, seed): identical inputs give bit-identical
    timelines. SINR, offsets and switching weights are redrawn every
    ``change_period`` slots and held in between (offsets optionally per
    slot).
    """
    rng = np.random.default_rng(config.seed if seed is None else seed)
    T, I, J = config.slots, config.ue_count, config.cell_count
    period = config.effective_change_period
    num_blocks = -(-T // period)
    expand = np.repeat(np.arange(num_blocks), period)[:T]

    lo_db, hi_db = config.sinr_range_db
    if config.mode == "physical":
        bandwidths = np.array([c.bandwidth for c in config.cells], dtype=float)
        q = np.array([c.transmit_power for c in config.cells])
        noise = np.array([c.bandwidth * c.noise_psd for c in config.cells])
        interference = np.zeros((T, I, J))
        for j, cell in enumerate(config.cells):
            for k in cell.cochannel:
                interference[:, :, j] += q[k] * config.gains[:, :, k]
        sinr = q[None, None, :] * config.gains / (noise[None, None, :] + interference)
    else:
        bandwidths = rng.choice(np.asarray(config.bandwidth_set, dtype=float), size=J)
        sinr_db_blocks = rng.uniform(lo_db, hi_db, size=(num_blocks, I, J))
        sinr = 10.0 ** (sinr_db_blocks[expand] / 10.0)

    o_lo, o_hi = config.offset_range_db
    if config.offsets_per_slot:
        offsets = rng.uniform(o_lo, o_hi, size=(T, J))
    else:
        offsets = rng.uniform(o_lo, o_hi, size=(num_blocks, J))[expand]

    raw_b = rng.uniform(0.0, 1.0, size=(num_blocks, I * J))[expand]
    switch_weights = np.clip(raw_b, MIN_SWITCH_WEIGHT, 1.0)

    if config.availability == "fixed":
        availability = np.ones((T, J))
    elif config.availability == "random":
        availability = rng.uniform(0.0, 1.0, size=(T, J))
    else:
        raise ValueError(f"unknown availability mode {config.availability!r}")

    rate = bandwidths[None, None, :] * np.log2(1.0 + sinr)
    served = _served_from(sinr, offsets)

    return ScenarioTimeline(
        config=config,
        sinr=sinr,
        rate=rate,
        served=served,
        offsets=offsets,
        availability=availability,
        switch_weights=switch_weights,
        beta=_as_schedule(config.beta, T, "beta"),
        gamma=_as_schedule(config.gamma, T, "gamma"),
        delta=_as_schedule(config.delta, T, "delta"),
        bandwidths=bandwidths,
    )


def max_rate_bound(config: ScenarioConfig) -> float:
    """Upper bound on any rate the scenario can produce (Mbps)."""
    if config.mode == "physical":
        w = max(c.bandwidth for c in config.cells)
        s_max = float(np.max([compute_sinr(config.gains[t, i], j, config.cells)
                              for t in range(config.slots)
                              for i in range(config.ue_count)
                              for j in range(config.cell_count)]))
        return w * float(np.log2(1.0 + s_max))
    w = max(config.bandwidth_set)
    s_max = 10.0 ** (config.sinr_range_db[1] / 10.0)
    return w * float(np.log2(1.0 + s_max))
