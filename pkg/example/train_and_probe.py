import sys

from hyfi.datasets import load_hypergraph
from hyfi.evaluation import SplitSpec, commonality_curve, linear_evaluate, node_embeddings
from hyfi.training import EncoderConfig, TrainConfig, train

if __name__ == "__main__":
    data_dir = sys.argv[1] if len(sys.argv) > 1 else "datasets/zoo"
    h, x, labels = load_hypergraph(data_dir)

    for point in commonality_curve(h, x).points:
        print(f"c={point.c}: {point.mean_cosine:.3f} over {point.pair_count} pairs")

    cfg = TrainConfig(epochs=100, encoder=EncoderConfig(hidden_dim=128, proj_dim=128))
    result = train(h, x, labels, cfg)

    embeddings = node_embeddings(h, x, result.params, cfg.encoder.self_loops)
    report = linear_evaluate(embeddings, labels, SplitSpec(num_splits=5, num_inits=2))
    print(f"accuracy {report.mean:.4f} +/- {report.std:.4f}")
