"""Meta-learning cell preparation for conditional handovers.

Library + CLI simulator: a synthetic radio environment, a linear slot
utility with weighted switching costs, the expert/meta-learner with
Madow quantization, (N-best, TTT) comparators, hindsight oracles, and a
reproducible experiment harness.
"""

from .benchmarks import OracleResult, TttComparatorConfig, oracle_dp, oracle_per_slot, run_ttt_comparator
from .harness import (
    AlgorithmSpec,
    ExperimentConfig,
    SlotRecord,
    compute_path_length,
    compute_regret,
    load_config,
    preset_config,
    regret_bound,
    run_experiment,
    write_csv,
)
from .learner import (
    ChometLearner,
    HyperParams,
    derive_hyperparams,
    expert_step,
    init_weights,
    madow_quantize,
    meta_combine,
    run_chomet,
    surrogate_loss,
    update_weights,
)
# The slot-objective function itself lives at chomet.objective.objective;
# re-exporting it here would shadow the submodule.
from .objective import ObjectiveBreakdown, switching_norm, utility, utility_gradient
from .radio import (
    CellConfig,
    ScenarioConfig,
    ScenarioTimeline,
    SlotEnvironment,
    best_cell_indicator,
    compute_rate,
    compute_sinr,
    generate_timeline,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
