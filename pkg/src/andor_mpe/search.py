"""AND/OR graph search over the context-minimal graph: best-first (AOBF)
and depth-first branch-and-bound (AOBB) with full context caching."""

from __future__ import annotations

import heapq
import math
import sys
import time
from dataclasses import dataclass, field

from .factor_ops import LogFactor
from .heuristics import _CompiledFn
from .model import BeliefNetwork
from .structure import PseudoTree, context_cache_bound

NEG_INF = float("-inf")
_LIMIT_CHECK_STRIDE = 256


@dataclass
class SearchLimits:
    time_limit_s: float | None = None
    max_nodes: int | None = None  # memory proxy: explicated nodes / cache entries


@dataclass
class SearchStats:
    expansions: int = 0
    cache_hits: int = 0
    cache_entries: int = 0
    elapsed_s: float = 0.0


@dataclass
class SolveResult:
    status: str  # solved | timeout | memout
    mpe_log: float
    assignment: dict[int, int] | None
    stats: SearchStats
    marked_weight_sum: float | None = None
    solution_tree_nodes: int | None = None


class SearchProblem:
    """Immutable per-instance precomputation shared by both algorithms.

    Every CPT is statically assigned to its deepest scope variable in the
    pseudo-tree, so each CPT contributes to exactly one arc weight along any
    root-to-leaf path.
    """

    def __init__(self, net: BeliefNetwork, tree: PseudoTree,
                 contexts: dict[int, tuple[int, ...]], evaluator):
        self.net = net
        self.tree = tree
        self.contexts = contexts
        self.evaluator = evaluator
        self.variables = list(net.variables)
        self.size = max(self.variables) + 1 if self.variables else 0
        self.domains = net.domains
        self.children = tree.children
        self.preorder = {v: tree.preorder_index(v) for v in self.variables}
        self.weight_fns: dict[int, list[_CompiledFn]] = {v: [] for v in self.variables}
        for f in net.factors:
            wvar = max(f.scope, key=lambda u: tree.depth[u])
            self.weight_fns[wvar].append(
                _CompiledFn(LogFactor.from_linear(f.scope, f.table)))
        self.dead_cache = {v: len(contexts[v]) - 1 == tree.depth[v]
                           for v in self.variables}

    def weight(self, var: int, asg) -> float:
        """Arc weight into <var, asg[var]>; asg must cover the tree path."""
        total = 0.0
        for fn in self.weight_fns[var]:
            total += fn(asg)
        return total


def arc_weight(net: BeliefNetwork, tree: PseudoTree, path: dict[int, int],
               var: int, value: int) -> float:
    """Log arc weight of assigning `var=value` below the given path: the sum
    of every CPT statically assigned to `var` (deepest scope variable),
    evaluated at path plus the new assignment."""
    asg = dict(path)
    asg[var] = value
    total = 0.0
    for f in net.factors:
        wvar = max(f.scope, key=lambda u: tree.depth[u])
        if wvar != var:
            continue
        for u in f.scope:
            if u not in asg:
                raise ValueError(f"scope variable {u} unassigned on the path")
        entry = float(f.table[tuple(asg[u] for u in f.scope)])
        if entry <= 0.0:
            return NEG_INF
        total += math.log(entry)
    return total


class _OrNode:
    __slots__ = ("var", "v", "children", "marked", "solved", "parent", "depth")

    def __init__(self, var, depth, v, parent):
        self.var = var
        self.v = v
        self.children = []
        self.marked = None
        self.solved = False
        self.parent = parent
        self.depth = depth


class _AndNode:
    __slots__ = ("var", "val", "v", "children", "solved", "parents", "w",
                 "depth", "terminal")

    def __init__(self, var, val, depth, v, w, terminal):
        self.var = var
        self.val = val
        self.v = v
        self.children = []
        self.solved = terminal
        self.parents = []
        self.w = w
        self.depth = depth
        self.terminal = terminal


def select_tip(tips, preorder: dict[int, int]):
    """Deterministic tip policy: deepest node, ties by pseudo-tree preorder."""
    return max(tips, key=lambda nd: (nd.depth, -preorder[nd.var]))


def _assert_cache_bound(cache, contexts, domains):
    for var, entries in cache.items():
        bound = context_cache_bound(contexts[var], domains)
        if len(entries) > bound:
            raise AssertionError(
                f"cache entries for variable {var} ({len(entries)}) exceed the "
                f"context bound {bound}")


def aobf(problem: SearchProblem, limits: SearchLimits | None = None,
         on_revise=None) -> SolveResult:
    """Best-first AND/OR graph search: repeatedly trace the marked partial
    solution tree, expand a nonterminal tip, and revise values bottom-up
    until the root is solved. `on_revise(node, old_v, new_v)` is an optional
    instrumentation hook."""
    limits = limits or SearchLimits()
    t0 = time.perf_counter()
    stats = SearchStats()
    if not problem.variables:
        return SolveResult("solved", 0.0, {}, stats)
    tree = problem.tree
    evaluator = problem.evaluator
    asg = [-1] * problem.size
    cache: dict[int, dict] = {v: {} for v in problem.variables}
    root = _OrNode(tree.root, 0, evaluator.h_or(tree.root, asg), None)
    nodes_created = 1

    def revise(start):
        heap = []
        inset = set()
        seq = 0

        def push(nd):
            nonlocal seq
            if id(nd) not in inset:
                inset.add(id(nd))
                heapq.heappush(heap, (-nd.depth, seq, nd))
                seq += 1

        push(start)
        while heap:
            _, _, m = heapq.heappop(heap)
            inset.discard(id(m))
            if isinstance(m, _AndNode):
                if m.terminal:
                    continue
                newv = 0.0
                newsolved = True
                for c in m.children:
                    newv += c.v
                    if not c.solved:
                        newsolved = False
                changed = (newv != m.v) or (newsolved and not m.solved)
                if on_revise is not None:
                    on_revise(m, m.v, newv)
                m.v = newv
                if newsolved:
                    m.solved = True
                if changed:
                    for p in m.parents:
                        if p.marked is m:
                            push(p)
            else:
                best = None
                bestv = NEG_INF
                for c in m.children:
                    val = c.w + c.v
                    if best is None or val > bestv:
                        best = c
                        bestv = val
                newsolved = best.solved
                changed = (bestv != m.v) or (newsolved and not m.solved)
                if on_revise is not None:
                    on_revise(m, m.v, bestv)
                m.v = bestv
                m.marked = best
                if newsolved:
                    m.solved = True
                if changed and m.parent is not None:
                    push(m.parent)

    status = "solved"
    while not root.solved:
        if (limits.time_limit_s is not None
                and time.perf_counter() - t0 >= limits.time_limit_s):
            status = "timeout"
            break
        if limits.max_nodes is not None and nodes_created > limits.max_nodes:
            status = "memout"
            break
        # Trace the best partial solution tree along marked arcs.
        tips = []
        touched = []
        stack = [root]
        while stack:
            nd = stack.pop()
            if isinstance(nd, _OrNode):
                if not nd.children:
                    tips.append(nd)
                elif not nd.marked.solved:
                    stack.append(nd.marked)
            else:
                asg[nd.var] = nd.val
                touched.append(nd.var)
                if nd.terminal or nd.solved:
                    continue
                if not nd.children:
                    tips.append(nd)
                else:
                    for c in nd.children:
                        if not c.solved:
                            stack.append(c)
        tip = select_tip(tips, problem.preorder)
        stats.expansions += 1
        if isinstance(tip, _OrNode):
            X = tip.var
            ctx = problem.contexts[X]
            kid_vars = problem.children[X]
            for x in range(problem.domains[X]):
                asg[X] = x
                w = problem.weight(X, asg)
                key = tuple(asg[u] for u in ctx)
                child = cache[X].get(key)
                if child is None:
                    terminal = not kid_vars
                    v0 = 0.0 if terminal else evaluator.h_and(X, asg)
                    child = _AndNode(X, x, tip.depth + 1, v0, w, terminal)
                    cache[X][key] = child
                    nodes_created += 1
                else:
                    stats.cache_hits += 1
                tip.children.append(child)
                child.parents.append(tip)
            asg[X] = -1
        else:
            for cvar in problem.children[tip.var]:
                orn = _OrNode(cvar, tip.depth + 1, evaluator.h_or(cvar, asg), tip)
                tip.children.append(orn)
                nodes_created += 1
        revise(tip)
        for v in touched:
            asg[v] = -1

    stats.cache_entries = sum(len(d) for d in cache.values())
    stats.elapsed_s = time.perf_counter() - t0
    _assert_cache_bound(cache, problem.contexts, problem.domains)
    if status != "solved":
        return SolveResult(status, root.v, None, stats)
    # Read the solution off the marked arcs.
    assignment: dict[int, int] = {}
    weight_sum = 0.0
    sol_nodes = 0
    stack = [root]
    while stack:
        nd = stack.pop()
        sol_nodes += 1
        if isinstance(nd, _OrNode):
            m = nd.marked
            weight_sum += m.w
            assignment[m.var] = m.val
            stack.append(m)
        else:
            stack.extend(nd.children)
    assert len(assignment) == len(problem.variables)
    if not (root.v == NEG_INF and weight_sum == NEG_INF):
        assert abs(weight_sum - root.v) <= 1e-9 * max(1.0, abs(root.v)), \
            "marked arc weights disagree with the root value"
    return SolveResult("solved", root.v, assignment, stats,
                       marked_weight_sum=weight_sum, solution_tree_nodes=sol_nodes)


class _Abort(Exception):
    def __init__(self, status):
        self.status = status


def aobb(problem: SearchProblem, caching: bool = True,
         dead_cache_elim: bool = False,
         limits: SearchLimits | None = None) -> SolveResult:
    """Depth-first branch-and-bound on the same AND/OR graph. At each OR node
    children are tried in decreasing (weight + h) order; a branch is pruned
    when its bound cannot strictly beat the relevant incumbent. Exactly
    solved AND contexts are cached and reused."""
    limits = limits or SearchLimits()
    t0 = time.perf_counter()
    stats = SearchStats()
    if not problem.variables:
        return SolveResult("solved", 0.0, {}, stats)
    tree = problem.tree
    evaluator = problem.evaluator
    domains = problem.domains
    children = problem.children
    contexts = problem.contexts
    dead = problem.dead_cache
    asg = [-1] * problem.size
    cache: dict[int, dict] = {v: {} for v in problem.variables}
    sys.setrecursionlimit(max(sys.getrecursionlimit(),
                              10000 + 8 * len(problem.variables)))
    incumbent = [NEG_INF, None]
    check = [0]

    def maybe_abort():
        check[0] += 1
        if check[0] % _LIMIT_CHECK_STRIDE == 0 or check[0] == 1:
            if (limits.time_limit_s is not None
                    and time.perf_counter() - t0 >= limits.time_limit_s):
                raise _Abort("timeout")
            if limits.max_nodes is not None:
                if sum(len(d) for d in cache.values()) > limits.max_nodes:
                    raise _Abort("memout")

    def solve_or(X, ub, track=False):
        # Returns (value, assignment-of-subtree); value is exact when > ub,
        # otherwise it is a valid underestimate <= ub.
        stats.expansions += 1
        maybe_abort()
        kids = children[X]
        cands = []
        for x in range(domains[X]):
            asg[X] = x
            w = problem.weight(X, asg)
            hv = evaluator.h_and(X, asg) if kids else 0.0
            cands.append((w + hv, x, w))
        cands.sort(key=lambda t: (-t[0], t[1]))
        best = NEG_INF
        best_asg = None
        for bound, x, w in cands:
            thr = best if best > ub else ub
            if bound <= thr:
                continue
            asg[X] = x
            if not kids:
                val = w
                sub = {}
            else:
                key = tuple(asg[u] for u in contexts[X]) if caching else None
                hit = cache[X].get(key) if caching else None
                if hit is not None:
                    stats.cache_hits += 1
                    vsub, sub = hit
                else:
                    r = solve_and(X, thr - w)
                    if r is None:
                        continue
                    vsub, sub = r
                    if caching and not (dead_cache_elim and dead[X]):
                        cache[X][key] = (vsub, sub)
                val = w + vsub
            if val > best:
                best = val
                best_asg = dict(sub)
                best_asg[X] = x
                if track:
                    incumbent[0] = best
                    incumbent[1] = best_asg
        asg[X] = -1
        return best, best_asg

    def solve_and(X, ub):
        # Value of the decomposed subproblem below <X, asg[X]>;
        # None means provably <= ub.
        stats.expansions += 1
        maybe_abort()
        kids = children[X]
        hs = [evaluator.h_or(c, asg) for c in kids]
        rest = sum(hs)
        if rest == NEG_INF:
            return None
        total = 0.0
        merged = {}
        for hv, c in zip(hs, kids):
            rest -= hv
            vc, sub = solve_or(c, ub - total - rest)
            if vc <= ub - total - rest:
                return None
            total += vc
            merged.update(sub)
        return total, merged

    status = "solved"
    try:
        solve_or(tree.root, NEG_INF, track=True)
    except _Abort as e:
        status = e.status
    stats.cache_entries = sum(len(d) for d in cache.values())
    stats.elapsed_s = time.perf_counter() - t0
    _assert_cache_bound(
        {v: d for v, d in cache.items()}, problem.contexts, problem.domains)
    if status != "solved":
        return SolveResult(status, incumbent[0], None, stats)
    assignment = dict(incumbent[1]) if incumbent[1] is not None else {}
    for v in problem.variables:
        assignment.setdefault(v, 0)  # every assignment attains -inf
    return SolveResult("solved", incumbent[0], assignment, stats)
