#!/usr/bin/env python3
"""Regenerate the citeworld toy fixture (50 papers, 120 undirected edges).

Node n07 is given exactly four neighbors. Output is deterministic.
"""
import json
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "crates/graph-instruct/fixtures/citeworld"

TOPICS = {
    "machine learning": ["neural", "gradient", "representation", "training", "classifier",
                         "embedding", "regularization", "generalization", "attention", "kernel"],
    "databases": ["query", "index", "transaction", "storage", "join",
                  "schema", "optimizer", "replication", "consistency", "partition"],
    "networking": ["routing", "congestion", "packet", "latency", "protocol",
                   "bandwidth", "topology", "wireless", "throughput", "switching"],
    "theory": ["complexity", "approximation", "bound", "reduction", "graph",
               "algorithm", "lower", "randomized", "polynomial", "hardness"],
}
FILLER = ["we", "propose", "a", "new", "method", "for", "the", "problem", "of", "and",
          "show", "that", "it", "improves", "on", "prior", "work", "with", "results", "in"]
NOUNS = ["Framework", "Analysis", "Approach", "Study", "Model", "System", "Method", "Design"]


def main():
    rng = random.Random(7)
    labels = sorted(TOPICS)
    nodes = []
    for i in range(50):
        label = labels[i % len(labels)]
        words = TOPICS[label]
        title_words = rng.sample(words, rng.randint(2, 4))
        title = " ".join(w.capitalize() for w in title_words) + " " + rng.choice(NOUNS)
        length = rng.randint(18, 36)
        body = [rng.choice(words) if rng.random() < 0.45 else rng.choice(FILLER) for _ in range(length)]
        abstract = " ".join(body).capitalize() + "."
        nodes.append({"id": f"n{i:02d}", "type": "PAPER", "title": title,
                      "abstract": abstract, "label": label})

    edges = set()
    others = [n["id"] for n in nodes if n["id"] != "n07"]
    for v in rng.sample(others, 4):
        edges.add(tuple(sorted(("n07", v))))
    while len(edges) < 120:
        a, b = rng.sample(others, 2)
        edges.add(tuple(sorted((a, b))))
    edge_list = sorted(edges)
    rng.shuffle(edge_list)

    OUT.mkdir(parents=True, exist_ok=True)
    with open(OUT / "nodes.jsonl", "w") as f:
        for n in nodes:
            f.write(json.dumps(n) + "\n")
    with open(OUT / "edges.jsonl", "w") as f:
        for a, b in edge_list:
            rel = "CITES" if rng.random() < 0.8 else "EXTENDS"
            f.write(json.dumps({"src": a, "dst": b, "relation": rel}) + "\n")


if __name__ == "__main__":
    main()
