"""Approximate symmetries of undirected graphs.

Two solvers (a simulated-annealing search over permutations with a bounded
number of fixed points, and a Frank-Wolfe relaxation over doubly stochastic
matrices with permutation projection), the random/structured graph models used
to benchmark them, a paired experiment harness with the matching statistics,
and ingestion of weighted connectivity matrices.
"""

from graphsym.graphs import (
    DimensionError,
    Graph,
    Permutation,
    as_penalty,
    asp_objective,
    epsilon,
    fixed_points,
    graph_from_text,
    graph_to_text,
    hamming,
    load_graph,
    load_permutation,
    mismatch_count,
    permutation_from_text,
    permutation_matrix,
    permutation_to_text,
    permute_graph,
    save_graph,
    save_permutation,
    symmetry_coefficient,
)
from graphsym.generators import (
    DistortedLrmInstance,
    LrmInstance,
    distort_lrm,
    gen_ba,
    gen_er,
    gen_grid,
    gen_lrm,
    gen_sbm,
    random_perm_max_fp,
    reshuffle_perm,
    rewire_k,
)
from graphsym.assignment import lap_min, project_to_permutation
from graphsym.reports import InitSpec, SolverReport
from graphsym.qsa import QsaOptions, default_penalty, fw_linesearch, qsa_gradient, qsa_solve
from graphsym.afp import AfpOptions, afp_solve, delta_epsilon, temperature
from graphsym.stats import TTestResult, best_of, bonferroni, cohens_d_paired, paired_t_test
from graphsym.harness import (
    ExperimentConfig,
    ExperimentRecord,
    read_records_csv,
    run_experiment,
    write_records_csv,
)
from graphsym.brain import WeightedMatrix, binarize_density, load_matrix, lr_from_file, lr_halves

__version__ = "0.1.0"
