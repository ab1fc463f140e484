"""Mini-bucket heuristics: static compilation (SMB) and per-node dynamic
recompilation (DMB). Everything is log-space; bounds overestimate the exact
max-product value of the subproblem they summarize."""

from __future__ import annotations

from dataclasses import dataclass, field

from .factor_ops import LogFactor, combine, max_out
from .model import BeliefNetwork
from .structure import EliminationOrder, PseudoTree


class MemoryBudgetExceeded(RuntimeError):
    pass


class _CompiledFn:
    """Flat table with per-variable strides for O(scope) lookups."""

    __slots__ = ("scope", "strides", "flat")

    def __init__(self, f: LogFactor):
        self.scope = f.scope
        shape = f.table.shape
        strides = []
        acc = 1
        for d in reversed(shape):
            strides.append(acc)
            acc *= d
        self.strides = tuple(reversed(strides))
        self.flat = f.table.ravel().tolist()

    def __call__(self, asg) -> float:
        i = 0
        for v, s in zip(self.scope, self.strides):
            i += s * asg[v]
        return self.flat[i]


@dataclass
class MessageRecord:
    origin: int
    dest: int | None  # None: message became a root constant
    factor: LogFactor
    provenance: frozenset  # original factor indices combined into it


def mini_bucket_pass(functions, elim_vars, pos, i_bound,
                     max_table_entries=None):
    """One mini-bucket elimination sweep.

    `functions` is a list of (LogFactor, provenance) pairs; every scope
    variable must be in `elim_vars` or the function is misplaced. Buckets are
    processed in elimination order; each bucket is greedily partitioned
    (first-fit over functions sorted by decreasing scope size) into
    mini-buckets of joint scope at most `i_bound` variables, except that a
    single function wider than the bound is kept whole.

    Returns (constant, records, partitions): the summed scalar output, the
    emitted messages, and the per-bucket provenance partition.
    """
    if i_bound < 1:
        raise ValueError("i-bound must be >= 1")
    bucket: dict[int, list] = {v: [] for v in elim_vars}
    constant = 0.0
    records: list[MessageRecord] = []
    partitions: dict[int, list[frozenset]] = {}
    for f, prov in functions:
        if not f.scope:
            constant += f.scalar()
            continue
        b = min(f.scope, key=lambda v: pos[v])
        bucket[b].append((f, prov))
    entries = 0
    for v in elim_vars:
        funcs = bucket[v]
        if not funcs:
            partitions[v] = []
            continue
        funcs.sort(key=lambda t: (-len(t[0].scope), t[0].scope))
        minis: list[list] = []  # [joint scope set, [(factor, prov), ...]]
        for f, prov in funcs:
            for mb in minis:
                u = mb[0] | set(f.scope)
                if len(u) <= i_bound:
                    mb[0] = u
                    mb[1].append((f, prov))
                    break
            else:
                minis.append([set(f.scope), [(f, prov)]])
        partitions[v] = [frozenset().union(*(p for _, p in mb[1])) for mb in minis]
        for mb, prov in zip(minis, partitions[v]):
            combined = combine([f for f, _ in mb[1]])
            msg, _ = max_out(combined, v)
            entries += msg.table.size
            if max_table_entries is not None and entries > max_table_entries:
                raise MemoryBudgetExceeded(
                    f"mini-bucket tables exceed {max_table_entries} entries")
            if not msg.scope:
                constant += msg.scalar()
                records.append(MessageRecord(v, None, msg, prov))
            else:
                dest = min(msg.scope, key=lambda u: pos[u])
                bucket[dest].append((msg, prov))
                records.append(MessageRecord(v, dest, msg, prov))
    return constant, records, partitions


@dataclass(eq=False)
class MiniBucketTables:
    """Compiled SMB tables, with messages indexed per pseudo-tree node:
    `exiting[X]` holds every message generated inside X's subtree whose
    destination bucket lies outside it."""

    i_bound: int
    root_bound: float
    exiting: dict[int, list[_CompiledFn]]
    bucket_partitions: dict[int, list[frozenset]]
    table_entries: int


def compile_smb(net: BeliefNetwork, elim: EliminationOrder, tree: PseudoTree,
                i_bound: int, max_table_entries: int | None = None) -> MiniBucketTables:
    functions = [(LogFactor.from_linear(f.scope, f.table), frozenset([k]))
                 for k, f in enumerate(net.factors)]
    pos = elim.position
    constant, records, partitions = mini_bucket_pass(
        functions, list(elim.order), pos, i_bound, max_table_entries)
    exiting: dict[int, list[_CompiledFn]] = {v: [] for v in elim.order}
    entries = 0
    for rec in records:
        compiled = _CompiledFn(rec.factor)
        entries += len(compiled.flat)
        cur = rec.origin
        while cur is not None and cur != rec.dest:
            exiting[cur].append(compiled)
            cur = tree.parent[cur]
        if rec.dest is not None and cur is None:
            raise AssertionError("message destination is not an ancestor of its origin")
    return MiniBucketTables(i_bound=i_bound, root_bound=constant, exiting=exiting,
                            bucket_partitions=partitions, table_entries=entries)


class SmbEvaluator:
    """Static heuristic: table lookups over the pre-compiled messages."""

    mode = "static"

    def __init__(self, tables: MiniBucketTables, tree: PseudoTree):
        self.tables = tables
        self.tree = tree
        self.i_bound = tables.i_bound
        self._exiting = tables.exiting
        self._children = tree.children

    def h_or(self, var: int, asg) -> float:
        total = 0.0
        for fn in self._exiting[var]:
            total += fn(asg)
        return total

    def h_and(self, var: int, asg) -> float:
        # asg must already assign `var`.
        total = 0.0
        for c in self._children[var]:
            total += self.h_or(c, asg)
        return total


class DmbEvaluator:
    """Dynamic heuristic: a fresh mini-bucket sweep over the conditioned
    subproblem at every evaluated node."""

    mode = "dynamic"

    def __init__(self, net: BeliefNetwork, elim: EliminationOrder,
                 tree: PseudoTree, i_bound: int,
                 max_table_entries: int | None = None):
        self.net = net
        self.elim = elim
        self.tree = tree
        self.i_bound = i_bound
        self.max_table_entries = max_table_entries
        pos = elim.position
        self._pos = pos
        self._logfactors = [LogFactor.from_linear(f.scope, f.table)
                            for f in net.factors]
        self._children = tree.children
        self._subtree_vars: dict[int, list[int]] = {}
        self._subtree_set: dict[int, set[int]] = {}
        self._subtree_factors: dict[int, list[int]] = {}
        bucket_of = {}
        for k, f in enumerate(net.factors):
            bucket_of[k] = min(f.scope, key=lambda v: pos[v]) if f.scope else None
        for v in tree.parent:
            sub = tree.subtree(v)
            sub.sort(key=lambda u: pos[u])
            self._subtree_vars[v] = sub
            ss = set(sub)
            self._subtree_set[v] = ss
            self._subtree_factors[v] = [k for k, b in bucket_of.items() if b in ss]

    def h_or(self, var: int, asg) -> float:
        ss = self._subtree_set[var]
        functions = []
        for k in self._subtree_factors[var]:
            lf = self._logfactors[k]
            fixed = {u: asg[u] for u in lf.scope if u not in ss}
            functions.append((lf.restrict(fixed) if fixed else lf, frozenset([k])))
        constant, records, _ = mini_bucket_pass(
            functions, self._subtree_vars[var], self._pos, self.i_bound,
            self.max_table_entries)
        # every message is consumed inside the subtree; only constants remain
        assert all(r.dest is None or r.dest in ss for r in records)
        return constant

    def h_and(self, var: int, asg) -> float:
        total = 0.0
        for c in self._children[var]:
            total += self.h_or(c, asg)
        return total


def evaluate_h(evaluator, path_assignment: dict[int, int], node) -> float:
    """Heuristic value of a search node, given the assignment of its
    pseudo-tree ancestors. `node` is ("or", var) or ("and", var, value)."""
    try:
        if node[0] == "or":
            return evaluator.h_or(node[1], path_assignment)
        if node[0] == "and":
            asg = dict(path_assignment)
            asg[node[1]] = node[2]
            return evaluator.h_and(node[1], asg)
    except KeyError as e:
        raise ValueError(f"unassigned ancestor {e.args[0]} in path assignment")
    raise ValueError(f"unknown node kind {node[0]!r}")


def compute_dmb(net: BeliefNetwork, elim: EliminationOrder, tree: PseudoTree,
                i_bound: int, path_assignment: dict[int, int], node,
                max_table_entries: int | None = None) -> float:
    """Dynamic mini-bucket bound for one node (fresh sweep, nothing cached)."""
    ev = DmbEvaluator(net, elim, tree, i_bound, max_table_entries)
    return evaluate_h(ev, path_assignment, node)
