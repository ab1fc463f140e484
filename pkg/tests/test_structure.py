import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import andor_mpe as am
from andor_mpe.structure import context_cache_bound, induced_graph

from helpers import TWO_VAR_UAI


def random_graph(seed, n=None):
    import random
    rng = random.Random(seed)
    n = n or rng.randint(2, 14)
    g = {v: set() for v in range(n)}
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.3:
                g[i].add(j)
                g[j].add(i)
    return g


def test_min_fill_chain_width_one():
    g = {0: {1}, 1: {0, 2}, 2: {1, 3}, 3: {2}}
    elim = am.min_fill_order(g)
    assert elim.induced_width == 1
    assert set(elim.order) == set(g)


def test_min_fill_clique_width():
    n = 5
    g = {v: set(range(n)) - {v} for v in range(n)}
    elim = am.min_fill_order(g)
    assert elim.induced_width == n - 1


def test_min_fill_deterministic_given_seed():
    g = random_graph(3)
    assert am.min_fill_order(g, seed=7) == am.min_fill_order(g, seed=7)


def test_min_fill_empty_graph_raises():
    with pytest.raises(ValueError):
        am.min_fill_order({})


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 10_000), order_seed=st.integers(0, 5))
def test_min_fill_is_permutation_and_width_consistent(seed, order_seed):
    g = random_graph(seed)
    elim = am.min_fill_order(g, seed=order_seed)
    assert sorted(elim.order) == sorted(g)
    # induced width equals the max later-neighbor count in the induced graph
    ind = induced_graph(g, elim.order)
    pos = elim.position
    w = max(len([u for u in ind[v] if pos[u] > pos[v]]) for v in elim.order)
    assert elim.induced_width == w


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 10_000), order_seed=st.integers(0, 5))
def test_pseudo_tree_back_arc_property(seed, order_seed):
    g = random_graph(seed)
    elim = am.min_fill_order(g, seed=order_seed)
    tree = am.build_pseudo_tree(g, elim)
    assert am.validate_pseudo_tree(tree, g)
    assert tree.root == elim.order[-1]
    # parent is eliminated after the child
    pos = elim.position
    for v, p in tree.parent.items():
        if p is not None:
            assert pos[p] > pos[v]


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_pseudo_tree_depth_and_preorder(seed):
    g = random_graph(seed)
    elim = am.min_fill_order(g)
    tree = am.build_pseudo_tree(g, elim)
    assert tree.depth[tree.root] == 0
    assert tree.height == max(tree.depth.values())
    assert tree.dfs_order[0] == tree.root
    assert sorted(tree.dfs_order) == sorted(g)
    for v, p in tree.parent.items():
        if p is not None:
            assert tree.depth[v] == tree.depth[p] + 1
            assert tree.preorder_index(p) < tree.preorder_index(v)


def test_validate_pseudo_tree_rejects_cross_edges():
    g = {0: {1, 2}, 1: {0, 2}, 2: {0, 1}}
    bad = am.PseudoTree(parent={0: None, 1: 0, 2: 0},
                        children={0: [1, 2], 1: [], 2: []},
                        root=0, height=1, depth={0: 0, 1: 1, 2: 1},
                        dfs_order=(0, 1, 2))
    # edge 1-2 joins two siblings: invalid
    assert not am.validate_pseudo_tree(bad, g)


def test_disconnected_components_form_single_tree():
    g = {0: {1}, 1: {0}, 2: {3}, 3: {2}, 4: set()}
    elim = am.min_fill_order(g)
    tree = am.build_pseudo_tree(g, elim)
    assert am.validate_pseudo_tree(tree, g)
    roots = [v for v, p in tree.parent.items() if p is None]
    assert roots == [tree.root]


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_context_size_bounded_by_width_plus_one(seed):
    g = random_graph(seed)
    elim = am.min_fill_order(g)
    tree = am.build_pseudo_tree(g, elim)
    ctx = am.compute_contexts(tree, g)
    for v, c in ctx.items():
        assert len(c) <= elim.induced_width + 1
        assert c[-1] == v
        # ancestors appear root-to-leaf
        depths = [tree.depth[u] for u in c[:-1]]
        assert depths == sorted(depths)
        assert all(tree.is_ancestor(u, v) for u in c[:-1])


def test_context_root_is_singleton():
    net = am.parse_uai(TWO_VAR_UAI)
    g = am.primal_graph(net)
    elim = am.min_fill_order(g)
    tree = am.build_pseudo_tree(g, elim)
    ctx = am.compute_contexts(tree, g)
    assert ctx[tree.root] == (tree.root,)


def test_chain_contexts_are_parent_child_pairs():
    g = {0: {1}, 1: {0, 2}, 2: {1, 3}, 3: {2}}
    elim = am.EliminationOrder(order=(0, 1, 2, 3), induced_width=1)
    tree = am.build_pseudo_tree(g, elim)
    ctx = am.compute_contexts(tree, g)
    assert ctx[3] == (3,)
    assert ctx[2] == (3, 2)
    assert ctx[1] == (2, 1)
    assert ctx[0] == (1, 0)


def test_context_cache_bound_products():
    domains = {0: 2, 1: 3, 2: 4}
    assert context_cache_bound((0,), domains) == 2
    assert context_cache_bound((0, 1, 2), domains) == 24
    assert context_cache_bound((), domains) == 1


def test_subtree_and_ancestors():
    g = {0: {1}, 1: {0, 2}, 2: {1, 3}, 3: {2}}
    elim = am.EliminationOrder(order=(0, 1, 2, 3), induced_width=1)
    tree = am.build_pseudo_tree(g, elim)
    assert tree.root == 3
    assert set(tree.subtree(2)) == {0, 1, 2}
    assert tree.subtree(2)[0] == 2
    assert tree.ancestors(0) == [1, 2, 3]
    assert tree.is_ancestor(3, 0) and not tree.is_ancestor(0, 3)
