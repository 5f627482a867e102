"""The `hyfi` command line: train, evaluate, analyze, ablate and embed."""
