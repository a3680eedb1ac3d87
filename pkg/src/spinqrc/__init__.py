"""Spin-network quantum reservoir computing simulator and sweep harness."""

from . import core, entanglement, harness, pca, report, reservoir, signals, training
from .core import (
    CouplingMatrix,
    HamiltonianParams,
    LindbladGenerator,
    Propagator,
    RegisterSpec,
    build_hamiltonian,
    build_jump_operators,
    build_liouvillian,
    evolve,
    expect_sigma_z,
    inject_input,
    make_propagator,
    partial_trace,
    sample_couplings,
)
from .entanglement import (
    NegativityRecord,
    log_negativity,
    mean_log_negativity,
    partial_transpose,
    trajectory_mean_negativity,
)
from .harness import SweepSpec, evaluate_point, rescale_capacity_by_frequency, run_sweep
from .pca import PcaConfig, covariance_dimension
from .reservoir import ReadoutMatrix, RunConfig, TrajectoryDiagnostics, run_reservoir
from .signals import (
    InputSeries,
    InputSpec,
    TargetSeries,
    gen_input,
    gen_random_input,
    target_delay,
    target_narma,
)
from .training import (
    CapacityReport,
    RidgeModel,
    memory_capacity,
    ridge_fit,
    select_lambda,
    total_capacity,
)

__version__ = "0.1.0"
