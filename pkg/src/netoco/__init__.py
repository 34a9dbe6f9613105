"""Decentralized online control on networks.

Agents on a graph repeatedly pick actions under convex stage costs that
couple them to their own past (movement) and to their neighbors (edge
costs).  The package provides the localized predictive controller, exact
clairvoyant solvers to compare against, exact closed-form decay factors and
competitive-ratio ceilings, and experiment drivers that measure every
inequality the analysis promises.
"""

from .boxqp import BoxQpResult, SolverDiverged, kkt_residual, solve_direct, solve_projected_gradient
from .costs import (Box, CannotCertify, CertificationError, NegativeCost, NodeCost,
                    NotSmooth, NotStronglyConvex, PairCost, certify_node, certify_pair,
                    node_minimizer)
from .graph import (Network, complete_graph, cycle_graph, from_edge_list_text,
                    grid_graph, laplacian, make_network, path_graph, ring_of_blocks,
                    st_neighborhood, star_graph)
from .instances import (Instance, InstanceConstants, InstanceInfeasible, PricingModel,
                        PricingParams, SpatialOneStep, instance_from_config,
                        pricing_instance, random_instance, random_pricing_params,
                        spatial_onestep_instance, temporal_adversary_instance)
from .trajectory import Trajectory
from .solver import (DEFAULT_SETTINGS, SolveReport, SolveSettings, clairvoyant_pinned,
                     clairvoyant_tail, local_psi, offline_opt)
from .lpc import (THREAD_ENV_VAR, CompetitiveRatioReport, DegenerateOptimum, LpcConfig,
                  competitive_ratio, greedy_run, lpc_run, lpc_step, per_step_errors)
from .theory import (AugmentationVerdicts, BasicDecay, CrBound, DecayParams,
                     DistanceTooSmall, GlobalDecay, HypothesisViolated, LaplacianFloor,
                     LowerBoundFactors, TightDecay, augmentation_relations, c3,
                     compute_decay_params, cr_upper_bound, decay_basic, decay_global,
                     decay_params_for_instance, decay_tight, geometric_b_pair,
                     laplacian_decay_floor, lower_bound_factors)
from .experiments import (ExperimentReport, InequalityCheck, PerturbationRecord,
                          cr_sweep, error_accumulation_check, per_step_bound_check,
                          perturbation_sweep, pricing_demo, spatial_lower_demo)

__version__ = "0.1.0"
