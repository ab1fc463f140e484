"""Shared fixtures: pipeline assembly and independent exact-value oracles."""

from __future__ import annotations

import math

import andor_mpe as am

TWO_VAR_UAI = """BAYES
2
2 2
2
1 0
2 0 1

2
0.4 0.6

4
0.8 0.2
0.1 0.9
"""


def pipeline(net, ibound, seed=0, mode="smb"):
    """Order, build tree/contexts, compile heuristic; returns the pieces."""
    g = am.primal_graph(net)
    elim = am.min_fill_order(g, seed=seed)
    tree = am.build_pseudo_tree(g, elim)
    ctx = am.compute_contexts(tree, g)
    if mode == "smb":
        tables = am.compile_smb(net, elim, tree, ibound)
        evaluator = am.SmbEvaluator(tables, tree)
    else:
        evaluator = am.DmbEvaluator(net, elim, tree, ibound)
    problem = am.SearchProblem(net, tree, ctx, evaluator)
    return g, elim, tree, ctx, problem


def close(a, b, tol=1e-9):
    if a == -math.inf or b == -math.inf:
        return a == b
    return abs(a - b) <= tol


def exact_subproblem_values(problem):
    """Exact conditioned value of every node of the context-minimal graph,
    computed from arc weights alone (independent of any heuristic).

    Returns (root value, or_value, and_value): `and_value(X, asg)` is the
    exact value below an AND node (asg must assign X and its ancestors) and
    `or_value(X, asg)` the exact value of the matching OR node.
    """
    tree, net = problem.tree, problem.net
    asg: dict[int, int] = {}
    and_values: dict = {}  # keyed by (var, context assignment): complete,
    # since a child's context never mentions variables outside its parent's

    def ex_or(X):
        best = -math.inf
        for x in range(problem.domains[X]):
            w = am.arc_weight(net, tree, asg, X, x)
            asg[X] = x
            best = max(best, w + ex_and(X))
            del asg[X]
        return best

    def ex_and(X):
        key = (X, tuple(asg[u] for u in problem.contexts[X]))
        if key in and_values:
            return and_values[key]
        total = 0.0
        for c in tree.children[X]:
            total += ex_or(c)
        and_values[key] = total
        return total

    root_v = ex_or(tree.root)

    def and_value(X, full_asg):
        return and_values[(X, tuple(full_asg[u] for u in problem.contexts[X]))]

    def or_value(X, full_asg):
        best = -math.inf
        for x in range(problem.domains[X]):
            path = dict(full_asg)
            path.pop(X, None)
            w = am.arc_weight(net, tree, path, X, x)
            path[X] = x
            best = max(best, w + and_value(X, path))
        return best

    return root_v, or_value, and_value
