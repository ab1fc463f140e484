"""Exact MPE solving for Bayesian networks over AND/OR search graphs."""

from .model import (BeliefNetwork, Factor, apply_evidence, log_probability,
                    parse_evidence, parse_uai, primal_graph, serialize_uai)
from .structure import (EliminationOrder, PseudoTree, build_pseudo_tree,
                        compute_contexts, min_fill_order, validate_pseudo_tree)
from .heuristics import (DmbEvaluator, MiniBucketTables, SmbEvaluator,
                         compile_smb, compute_dmb, evaluate_h)
from .search import (SearchLimits, SearchProblem, SolveResult, aobb, aobf,
                     arc_weight)
from .oracle import OracleResult, bucket_elimination_mpe, enumerate_mpe
from .generators import GenSpec, gen_coding, gen_grid, gen_random

__all__ = [
    "BeliefNetwork", "Factor", "parse_uai", "serialize_uai", "parse_evidence",
    "apply_evidence", "primal_graph", "log_probability",
    "EliminationOrder", "PseudoTree", "min_fill_order", "build_pseudo_tree",
    "validate_pseudo_tree", "compute_contexts",
    "MiniBucketTables", "SmbEvaluator", "DmbEvaluator", "compile_smb",
    "compute_dmb", "evaluate_h",
    "SearchProblem", "SearchLimits", "SolveResult", "aobf", "aobb", "arc_weight",
    "OracleResult", "enumerate_mpe", "bucket_elimination_mpe",
    "GenSpec", "gen_random", "gen_grid", "gen_coding",
]
