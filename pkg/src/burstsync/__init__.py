"""Simulation and bifurcation analysis of linearly coupled elliptic bursters
with amplitude-dependent spiking frequency: full and reduced vector fields,
deterministic/stochastic integration, transverse stability of inphase and
antiphase spiking, bifurcation scans, and within-burst synchrony detection.
"""

from .model import (CouplingSpec, ModelParams, NetworkField, NetworkState,
                    PolarPairState, derive_coefficients, domega_dr,
                    eval_field_cartesian, eval_field_polar_pair, omega_of_r,
                    to_cartesian, to_polar, wrap_phase)
from .constrained import (LTState, ReducedState, eval_lt_field, eval_reduced_field,
                          eval_subspace_field, lt_fast_rhs, lt_to_r1r2, r1r2_to_lt)
from .integrate import (IntegratorConfig, NumericalError, RawSolution, Trajectory,
                        integrate_deterministic, integrate_deterministic_dense,
                        integrate_noisy, resample, simulate_network)
from .stability import (AsymptoticPoints, BranchError, FastEquilibrium,
                        asymptotic_points, classify, classify_eigenvalues,
                        exact_det_zero, find_fast_equilibria, jacobian_antiphase,
                        jacobian_inphase, lt_fast_jacobian, solve_branch_r, trace_det)
from .scan import (BranchDiagram, NoSignChangeError, RegionBoundary, boundary_scan,
                   branch_diagram, det_zero_bisect)
from .synchrony import (BurstSegment, NoBurstsError, SynchronyReport, TransitionEvent,
                        classify_synchrony, detect_transitions, pairwise_distance,
                        phase_difference_series, segment_bursts, slow_passage_offset,
                        spike_peaks)

__version__ = "0.1.0"
