"""Reference graph signatures computed with networkx.

Writes graph_corpus.json: 100 seeded random graphs (n <= 12) with square
clustering per vertex, reachable-pair Wiener index, diameter over components,
component count and the algebraic connectivity (0 when disconnected).
"""

import json
import pathlib
import random

import networkx as nx
import numpy as np


def reference(g):
    dist = dict(nx.all_pairs_shortest_path_length(g))
    wiener = 0
    diameter = 0
    nodes = sorted(g.nodes)
    for i, s in enumerate(nodes):
        for t in nodes[i + 1:]:
            d = dist[s].get(t)
            if d:
                wiener += d
                diameter = max(diameter, d)
    comps = nx.number_connected_components(g)
    if comps == 1 and g.number_of_nodes() > 1:
        lap = nx.laplacian_matrix(g, nodelist=nodes).toarray().astype(float)
        fiedler = float(np.sort(np.linalg.eigvalsh(lap))[1])
    else:
        fiedler = 0.0
    sq = nx.square_clustering(g)
    return {
        "n": g.number_of_nodes(),
        "edges": sorted([min(u, v), max(u, v)] for u, v in g.edges),
        "square_clustering": [sq[v] for v in nodes],
        "wiener_index": wiener,
        "diameter": diameter,
        "n_components": comps,
        "eigengap": fiedler,
    }


def main():
    rng = random.Random(20240611)
    graphs = []
    for _ in range(100):
        n = rng.randint(2, 12)
        p = rng.choice([0.2, 0.35, 0.5, 0.8])
        g = nx.gnp_random_graph(n, p, seed=rng.randint(0, 2**31))
        graphs.append(reference(g))
    out = pathlib.Path(__file__).with_name("graph_corpus.json")
    out.write_text(json.dumps(graphs, indent=1) + "\n")


if __name__ == "__main__":
    main()
