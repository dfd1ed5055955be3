//! Solvers for regularized non-monotone submodular maximization.
//!
//! The problem: given a non-negative submodular g, a non-negative modular
//! cost ell, and optionally a matroid constraint, maximize g(A) - ell(A).
//! The objective can be negative and is not monotone, so plain greedy
//! arguments break; every solver here counters that with a distorted
//! objective that phases the cost in early and the submodular value in
//! late, and each one guarantees an expected output value of the form
//!
//!   E[g(S) - ell(S)] >= alpha * g(OPT) - ell(OPT) (- additive slack),
//!
//! with alpha = 1/e for the continuous matroid solver, (1 - 1/k)^(k-1) for
//! the cardinality solvers, and (1 - 1/n)^(n-1) for the unconstrained pass.
//! Note the asymmetry: the cost of the optimum is paid in full, never
//! scaled by alpha.
//!
//! Module map:
//!
//! * [`setfn`]: ground sets, subset masks, counted set-function oracles,
//!   the modular cost, and the scale parameter M.
//! * [`matroid`]: uniform, partition, and explicit matroids, their
//!   polytopes, and greedy linear maximization.
//! * [`extensions`]: multilinear and Lovasz extensions, the sampled
//!   marginal-weight estimator, and deterministic RNG streams.
//! * [`contgreedy`]: measured continuous greedy over a matroid polytope.
//! * [`rounding`]: pipage rounding from the polytope back to a set.
//! * [`discrete`]: random greedy, sampling greedy, the dispatcher between
//!   them, and the unconstrained pass.
//! * [`exact`]: brute-force optima, guarantee bounds, and replicated-run
//!   statistics for verifying the guarantees on small instances.
//!
//! Determinism: all randomness flows through [`RngStream`], every
//! tie-break is fixed (lower element index, smaller canonical set), and
//! parallel reductions are associative, so any run is reproducible from
//! its seed regardless of thread scheduling.

pub mod contgreedy;
pub mod discrete;
pub mod error;
pub mod exact;
pub mod extensions;
pub mod matroid;
pub mod rounding;
pub mod setfn;

pub use contgreedy::{
    distorted_coefficient, distorted_potential, run_measured_continuous_greedy,
    ContinuousGreedyConfig, ContinuousGreedyRun, Trajectory, TrajectoryStep,
};
pub use discrete::{
    distorted_gain, distorted_set_potential, run_cardinality_auto, run_distorted_random_greedy,
    run_distorted_random_sampling_greedy, run_sampling_greedy_with_params,
    run_unconstrained_distorted_greedy, sample_rank, sampling_overhead, select_candidate_pool,
    solve_sampling_threshold, DiscreteAlgorithm, RunStats, SamplingParams, StepLog,
};
pub use error::{Error, Result};
pub use exact::{
    brute_force_opt, empirical_expectation, summary_stats, EmpiricalStats, GuaranteeForm, Optimum,
};
pub use extensions::{
    estimate_marginal_weights, lovasz_exact, multilinear_exact, multilinear_gradient_exact,
    sample_random_subset, RngStream, WeightEstimate,
};
pub use matroid::{FractionalPoint, Matroid};
pub use rounding::pipage_round;
pub use setfn::{
    compute_m, verify_nonnegative, verify_submodular, GroundSet, ModularCost, SetFunction,
    SubsetMask, EXACT_MAX_N,
};
