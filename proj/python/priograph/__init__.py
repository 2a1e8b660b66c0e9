"""Context-dependent priority graphs over instructions and values.

Thin dict-based wrapper around the compiled ``_priograph`` module, which
exposes the C++ core through a JSON-string API.
"""

import json

from ._priograph import (  # noqa: F401
    PriographError,
    build_graph_json,
    decide_json,
    diff_graphs_json,
    effective_graph_json,
    export_graph_json,
    extract_hierarchy_json,
    find_paradoxes_json,
    load_corpus_json,
    measure_pair_json,
    run_suite_json,
    search_adversarial_context_json,
)

__all__ = [
    "PriographError",
    "decide",
    "measure_pair",
    "build_graph",
    "find_paradoxes",
    "extract_hierarchy",
    "diff_graphs",
    "export_graph",
    "search_adversarial_context",
    "effective_graph",
    "run_suite",
    "load_corpus",
]

DEFAULT_POLICY = {
    "name": "win_prob",
    "tie_threshold": 0.05,
    "samples_per_pair": 0,
    "seed": 0,
}


def _d(value):
    return json.dumps(value)


def decide(oracle, a1, a2, context):
    """Decision distribution of the oracle for one ordered pair."""
    return json.loads(decide_json(_d(oracle), _d(a1), _d(a2), _d(context)))


def measure_pair(oracle, a1, a2, context, policy=None):
    """Measurement outcome (scores, relation, margin, confidence)."""
    return json.loads(
        measure_pair_json(_d(oracle), _d(a1), _d(a2), _d(context), _d(policy or DEFAULT_POLICY))
    )


def build_graph(nodes, context, oracle, policy=None):
    """Pairwise tournament over ``nodes`` in ``context``."""
    return json.loads(
        build_graph_json(_d(nodes), _d(context), _d(oracle), _d(policy or DEFAULT_POLICY))
    )


def find_paradoxes(graph):
    """Witness cycles, one per strongly connected component of size >= 2."""
    return json.loads(find_paradoxes_json(_d(graph)))


def extract_hierarchy(graph):
    """Unique total order of a complete acyclic tournament."""
    return json.loads(extract_hierarchy_json(_d(graph)))


def diff_graphs(graph_a, graph_b):
    """Flipped/gained/lost pairs and the stability index."""
    return json.loads(diff_graphs_json(_d(graph_a), _d(graph_b)))


def export_graph(graph, format="json"):
    """Serialize a graph to ``"json"`` or ``"dot"`` text."""
    return export_graph_json(_d(graph), format)


def search_adversarial_context(oracle, base_context, safety, value, templates, config, nodes):
    """Template search for a context that flips ``value`` over ``safety``."""
    return json.loads(
        search_adversarial_context_json(
            _d(oracle), _d(base_context), _d(safety), _d(value), _d(templates), _d(config),
            _d(nodes)
        )
    )


def effective_graph(context, oracle, sources, default_graph, policy=None, build_policy=None):
    """Verify the context's premises and pick the governing graph.

    Returns ``{"graph": ..., "report": ...}``.
    """
    return json.loads(
        effective_graph_json(
            _d(context), _d(oracle), _d(sources), _d(default_graph), _d(policy or {}),
            _d(build_policy or DEFAULT_POLICY)
        )
    )


def run_suite(scenarios, oracle, policy=None):
    """Measure every scenario; returns results, per-type tallies, flip map."""
    return json.loads(run_suite_json(_d(scenarios), _d(oracle), _d(policy or DEFAULT_POLICY)))


def load_corpus(path):
    """Load and validate a scenario corpus file."""
    return json.loads(load_corpus_json(str(path)))
