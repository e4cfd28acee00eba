"""Cheating committers, binding values and the inverter reduction."""

from .adversary import (
    Adversary,
    BindingRelation,
    BindingReport,
    alternating_adversary,
    evaluate_binding,
    honest_commit_adversary,
    perfect_adversary,
    perturbed_adversary,
    random_adversary,
    uhlmann_adversary,
)
from .cheat import (
    SlotStrategy,
    cheating_slot,
    honest_slot,
    optimal_statistical_cheat,
    parallel_binding_decompose,
    spectral_optimum,
)
from .inverter import aggregate_inversion, build_inverter_circuit, phi, run_inverter
from .reduction import reduction_pipeline

__all__ = [
    "Adversary", "BindingRelation", "BindingReport", "SlotStrategy", "aggregate_inversion",
    "alternating_adversary", "build_inverter_circuit", "cheating_slot", "evaluate_binding",
    "honest_commit_adversary", "honest_slot", "optimal_statistical_cheat",
    "parallel_binding_decompose", "perfect_adversary", "perturbed_adversary", "phi",
    "random_adversary", "reduction_pipeline", "run_inverter", "spectral_optimum",
    "uhlmann_adversary",
]
