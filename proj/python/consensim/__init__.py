"""Agent-based simulator of adversarial consensus games on networks."""

from ._core import (
    Graph,
    GameRecord,
    ModelBank,
    TopologySpec,
    assign_roles_random,
    ba_spec,
    breakage_rate,
    consensus_rate,
    er_dense_spec,
    er_sparse_spec,
    er_spec,
    generate,
    logistic_prob,
    mix_seed,
    default_model_bank,
    place_greedy,
    project_l1,
    run_batch,
    smallworld_spec,
    wilson_interval,
)

__all__ = [
    "Graph",
    "GameRecord",
    "ModelBank",
    "TopologySpec",
    "assign_roles_random",
    "ba_spec",
    "breakage_rate",
    "consensus_rate",
    "er_dense_spec",
    "er_sparse_spec",
    "er_spec",
    "generate",
    "logistic_prob",
    "mix_seed",
    "default_model_bank",
    "place_greedy",
    "project_l1",
    "run_batch",
    "smallworld_spec",
    "wilson_interval",
]
