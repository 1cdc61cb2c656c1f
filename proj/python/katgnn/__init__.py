"""Python interface to the KAT-GNN risk-prediction pipeline.

The heavy lifting lives in the compiled extension; this package re-exports
its operations: exact ranking metrics, quantile binning, ontology LCS
distances, co-occurrence mining, the synthetic cohort generator and the
training entry point.
"""

from katgnn._core import (
    Ontology,
    assign_bin,
    auprc,
    auroc,
    cooccurrence_edges,
    fit_bins,
    generate_synthetic,
    mine,
    most_general_concept,
    one_cycle_lr,
    train,
)

__all__ = [
    "Ontology",
    "assign_bin",
    "auprc",
    "auroc",
    "cooccurrence_edges",
    "fit_bins",
    "generate_synthetic",
    "mine",
    "most_general_concept",
    "one_cycle_lr",
    "train",
]
