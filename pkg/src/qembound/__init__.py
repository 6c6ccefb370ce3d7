"""Accuracy and generalization metrics for quantum-embedding classifiers."""

from .linalg import (
    BinaryPOVM,
    DensityOperator,
    NumericalError,
    PureState,
    ValidationError,
    fidelity,
    helstrom_povm,
    helstrom_risk,
    matrix_function,
    swap_test_estimate,
    trace_norm,
    von_neumann_entropy,
)
from .embeddings import (
    AngleEmbedding,
    BasisEmbedding,
    ConstantEmbedding,
    DepolarizedEmbedding,
    Embedding,
    LabeledEnsemble,
    NCopiesEmbedding,
    ReuploadingEmbedding,
    class_average,
    embed,
    embedding_from_json,
    embedding_purity_stats,
)
from .bounds import (
    KernelMatrix,
    RiskReport,
    approximation_error,
    bayes_risk,
    conditional_renyi_mi,
    delta_total_variation,
    gen_bound_B,
    kernel_bound_B,
    almost_diagonal_expansion,
    multiclass_pgm_training_bound,
    pgm_approx_bound,
    purity_rank_bound,
    rademacher_budget,
    renyi_mutual_information,
    risk,
    risk_info_bounds,
    risk_report,
)
from .bottleneck import (
    IBConfig,
    IBSolution,
    SimplexConfig,
    ib_iterate_mixed,
    ib_iterate_pure,
    ib_lagrangian,
    vqib_loss,
    vqib_train,
)
from .datasets import gaussian_ensemble, two_moons
from .ising import IsingSpec, ising_overlap, overlap_matrix
from .experiments import (
    ExperimentResult,
    fidelity_classifier,
    run_bounds,
    run_fig4,
    run_ib_sweep,
    run_ising,
    run_moons_vqib,
)

__version__ = "0.1.0"
