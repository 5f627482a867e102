from hyfi.datasets.loader import (
    DATASET_FILES,
    dataset_fingerprint,
    load_hypergraph,
    save_hypergraph,
)

__all__ = ["DATASET_FILES", "dataset_fingerprint", "load_hypergraph", "save_hypergraph"]
