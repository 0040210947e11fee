"""Graph trend filtering: l1-penalized denoising of signals over graph nodes.

Thin Python layer over the C++ core (`gtf._gtf`): graph construction and
generators, the graph difference operators, exact TV denoising by
parametric max-flow, the ADMM / projected Newton GTF solvers, degrees of
freedom diagnostics, MAD-GTF transduction, synthetic signal generators and
the numerical verification suite.
"""

from ._gtf import (  # noqa: F401
    DifferenceOperator,
    Graph,
    GtfError,
    GtfFit,
    MadFit,
    active_set,
    add_noise,
    boundary_trim,
    chain,
    connected_components,
    denoised_snr,
    elementwise_penalty,
    erdos_renyi,
    estimate_df,
    gaussian_mixture_signal,
    grid2d,
    grid2d_coordinates,
    gtf_admm,
    gtf_projected_newton,
    knn_graph,
    lambda_crit,
    lambda_path,
    laplacian_smooth,
    mad_gtf,
    misclassification_rate,
    mse,
    noise_snr,
    nullspace_residual,
    poisson_equation_signal,
    random_walk_signal,
    read_edge_list,
    run_theory_suite,
    soft_threshold,
    solve,
    sparse_gtf,
    tv_denoise,
    univariate_difference_operator,
    write_edge_list,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
