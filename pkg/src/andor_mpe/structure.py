"""Min-fill elimination orders, pseudo-trees and cache contexts."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

Graph = dict[int, set[int]]


@dataclass(frozen=True)
class EliminationOrder:
    order: tuple[int, ...]  # first entry eliminated first
    induced_width: int

    @property
    def position(self) -> dict[int, int]:
        return {v: i for i, v in enumerate(self.order)}


@dataclass(eq=False)
class PseudoTree:
    parent: dict[int, int | None]
    children: dict[int, list[int]]
    root: int
    height: int
    depth: dict[int, int]
    dfs_order: tuple[int, ...]  # preorder
    elim: EliminationOrder | None = None
    _preorder_index: dict[int, int] = field(default=None, repr=False)

    def __post_init__(self):
        if self._preorder_index is None:
            self._preorder_index = {v: i for i, v in enumerate(self.dfs_order)}

    def preorder_index(self, v: int) -> int:
        return self._preorder_index[v]

    def ancestors(self, v: int) -> list[int]:
        out = []
        p = self.parent[v]
        while p is not None:
            out.append(p)
            p = self.parent[p]
        return out

    def subtree(self, v: int) -> list[int]:
        """All variables of the subtree rooted at v, v first."""
        out = [v]
        stack = [v]
        while stack:
            u = stack.pop()
            for c in self.children[u]:
                out.append(c)
                stack.append(c)
        return out

    def is_ancestor(self, a: int, v: int) -> bool:
        """True iff `a` is a proper ancestor of `v`."""
        p = self.parent[v]
        while p is not None:
            if p == a:
                return True
            p = self.parent[p]
        return False


def _copy_graph(g: Graph) -> Graph:
    return {v: set(nb) for v, nb in g.items()}


def min_fill_order(g: Graph, seed: int = 0) -> EliminationOrder:
    """Greedy min-fill ordering; ties broken uniformly with the given seed.

    Returns the order (first eliminated first) and the induced width measured
    while eliminating.
    """
    if not g:
        raise ValueError("empty graph")
    rng = random.Random(seed)
    work = _copy_graph(g)
    order = []
    width = 0
    while work:
        best_cost = None
        candidates = []
        for v in sorted(work):
            nbrs = sorted(work[v])
            cost = 0
            for i in range(len(nbrs)):
                for j in range(i + 1, len(nbrs)):
                    if nbrs[j] not in work[nbrs[i]]:
                        cost += 1
            if best_cost is None or cost < best_cost:
                best_cost = cost
                candidates = [v]
            elif cost == best_cost:
                candidates.append(v)
        v = candidates[0] if len(candidates) == 1 else rng.choice(candidates)
        nbrs = list(work[v])
        width = max(width, len(nbrs))
        for i in range(len(nbrs)):
            for j in range(i + 1, len(nbrs)):
                work[nbrs[i]].add(nbrs[j])
                work[nbrs[j]].add(nbrs[i])
        for u in nbrs:
            work[u].discard(v)
        del work[v]
        order.append(v)
    return EliminationOrder(order=tuple(order), induced_width=width)


def induced_graph(g: Graph, order: tuple[int, ...]) -> Graph:
    """Adjacency of the graph triangulated along `order`."""
    work = _copy_graph(g)
    full = _copy_graph(g)
    for v in order:
        nbrs = list(work[v])
        for i in range(len(nbrs)):
            for j in range(i + 1, len(nbrs)):
                a, b = nbrs[i], nbrs[j]
                work[a].add(b)
                work[b].add(a)
                full[a].add(b)
                full[b].add(a)
        for u in nbrs:
            work[u].discard(v)
        del work[v]
    return full


def build_pseudo_tree(g: Graph, elim: EliminationOrder) -> PseudoTree:
    """Bucket-tree construction over the induced graph.

    Each vertex's parent is its earliest-eliminated induced neighbor among
    those eliminated later; the last-eliminated vertex is the root. Roots of
    disconnected components are attached below the global root, which keeps
    the result a single tree without introducing back-arc violations.
    """
    order = elim.order
    pos = elim.position
    if set(order) != set(g):
        raise ValueError("elimination order does not cover the graph")
    ind = induced_graph(g, order)
    root = order[-1]
    parent: dict[int, int | None] = {root: None}
    for v in order[:-1]:
        later = [u for u in ind[v] if pos[u] > pos[v]]
        parent[v] = min(later, key=lambda u: pos[u]) if later else root
    children: dict[int, list[int]] = {v: [] for v in order}
    for v, p in parent.items():
        if p is not None:
            children[p].append(v)
    # Deterministic child order: reverse elimination (shallow contexts first).
    for v in children:
        children[v].sort(key=lambda u: -pos[u])
    depth = {root: 0}
    dfs = []
    stack = [root]
    while stack:
        v = stack.pop()
        dfs.append(v)
        for c in reversed(children[v]):
            depth[c] = depth[v] + 1
            stack.append(c)
    height = max(depth.values())
    return PseudoTree(parent=parent, children=children, root=root, height=height,
                      depth=depth, dfs_order=tuple(dfs), elim=elim)


def validate_pseudo_tree(t: PseudoTree, g: Graph) -> bool:
    """True iff every graph edge joins an ancestor/descendant pair of t."""
    if set(t.parent) != set(g):
        return False
    for v, nbrs in g.items():
        for u in nbrs:
            if u == v:
                continue
            if not (t.is_ancestor(u, v) or t.is_ancestor(v, u)):
                return False
    return True


def compute_contexts(t: PseudoTree, g: Graph) -> dict[int, tuple[int, ...]]:
    """Per-variable cache contexts: ancestors with induced-graph edges
    crossing below the variable, plus the variable itself (listed last,
    ancestors in root-to-leaf order)."""
    if t.elim is None:
        raise ValueError("pseudo-tree carries no elimination order")
    pos = t.elim.position
    ind = induced_graph(g, t.elim.order)
    contexts = {}
    for v in t.parent:
        anc = [u for u in ind[v] if pos[u] > pos[v]]
        anc.sort(key=lambda u: t.depth[u])
        assert all(t.is_ancestor(u, v) for u in anc)
        contexts[v] = tuple(anc) + (v,)
    return contexts


def context_cache_bound(context: tuple[int, ...], domains: dict[int, int]) -> int:
    """Max distinct cache entries for one variable: product of context domains."""
    return math.prod(domains[u] for u in context)
