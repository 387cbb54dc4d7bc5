"""Maximal Bell correlations of commuting finite-dimensional operator algebras."""
from .algebra import (Algebra, AlgebraStructure, center, check_commuting, commutant, conditional_expectation,
                      diagonal_pair, direct_sum_pair, full_algebra, generate_algebra, qubit_pair, qudit_pair,
                      qutrit_pair, same_algebra, spectral_sign, structure_report, tensor_embed)
from .bell import (BellCandidate, BellReport, Diagnostics, OptimizerOptions, bell_operator, best_response,
                   brute_force_beta, candidate_diagnostics, correlation_value, horodecki_beta, maximize_bell,
                   structural_diagnostics)
from .cluster import (BoundParams, ClusterCheck, ClusterEstimate, SamplerOptions, bound_table, clustering_bound,
                      clustering_coefficient, exponential_cluster_bound, short_distance_bound,
                      verify_cluster_bound)
from .errors import (BellcorrError, ConvergenceError, DegenerateGroundError, EstimationError, FitError,
                     InputError, InvariantViolation, ScenarioError)
from .invariant import InvariantOptions, InvariantReport, beta_inf, beta_star, minimax_gap, minimax_interval
from .lattice import (ChainModel, CurvePoint, DecayFit, RegionSpec, build_chain, fit_decay, ground_state,
                      region_algebra, separation_curve)
from .runner import ReportBundle, run_scenario
from .scenario import Scenario, parse_scenario
from .states import (State, make_state, maximally_mixed, mixture, product_state, random_product_state,
                     random_state, reduced_state, singlet, trace_distance, werner)

__version__ = "0.1.0"
