"""Spectral computations for Schroedinger operators on metric graphs."""
from .asymptotics import (ExpansionReport, VertexAsymptotics, all_vertex_asymptotics,
                          phi_expansion, psi_expansion, verify_expansion, vertex_asymptotics)
from .edge_solver import (EdgeSolution, SpectralParameter, edge_dtn, edge_ntd, solve_edge,
                          solve_phi, solve_psi)
from .errors import *  # noqa: F401,F403
from .fem import fem_spectrum
from .graph import MetricGraph, cycle, interval, path, star
from .mmatrix import (DELTA, DELTA_PRIME, MatchingScheme, MMatrixSample, assemble,
                      assemble_delta, assemble_delta_prime, mmatrix_batch)
from .potentials import (Cosine, EdgePotential, Exponential, PiecewiseConstant, Polynomial,
                         constant, cosine, piecewise, zero)
from .series import InversePowerSeries, exp_series, log1p_series, quotient
from .spectrum import (Spectrum, compute_spectrum, eigenvalue_count, isospectral,
                       lowest_eigenvalue, secular_function)
from .trace import (TraceReport, check_trace, det_ratio_scan, recover_uniform_alpha,
                    trace_sum, trace_sum_oracle)

__version__ = "0.1.0"
