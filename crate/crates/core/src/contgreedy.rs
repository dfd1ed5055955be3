//! Measured continuous greedy over a matroid polytope, driven by a distorted
//! objective.
//!
//! The solver maintains y(t) in the polytope, starting from y(0) = 0 and
//! taking 1/delta discrete steps. At step t it estimates the marginal
//! weights w_e(t) ~ E[g(e | R_y(t))] by sampling, finds the polytope vertex
//! z(t) maximizing <v, c(t) w(t) - l> where c(t) = (1 - delta)^((1-t)/delta - 1)
//! is the distortion schedule, and moves y by delta * z(t) o (1 - y(t)).
//! The measured update keeps every coordinate below 1 - (1-delta)^(t/delta),
//! which is what controls the non-monotone loss; the growing distortion
//! coefficient starts the run caring mostly about the cost l and ends it
//! weighing g at full strength.
//!
//! With the default schedule delta = 1 / ceil(2 + n^2/eps) and
//! r = ceil(2 n^2 eps^-2 ln(2 n eps^-1 delta^-1)) samples per element, the
//! returned point satisfies, with probability at least 1 - eps,
//!
//!   G(y(1)) - L(y(1)) >= e^-1 g(OPT) - l(OPT) - 5 eps M,
//!
//! where G, L are the multilinear and linear extensions and M is the scale
//! parameter from [`crate::setfn::compute_m`]. The run spends exactly
//! 2 n r / delta oracle queries.

use crate::error::{Error, Result};
use crate::extensions::{estimate_marginal_weights, multilinear_exact, RngStream};
use crate::matroid::{FractionalPoint, Matroid};
use crate::setfn::{ModularCost, SetFunction, SubsetMask};

/// Step and sampling schedule for one continuous-greedy run.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousGreedyConfig {
    pub epsilon: f64,
    /// Number of steps, 1/delta. The default makes delta <= min(1/2, eps/n^2).
    pub steps: usize,
    /// Fresh samples per element per step.
    pub samples_per_element: usize,
}

impl ContinuousGreedyConfig {
    /// Default schedule: delta = 1 / ceil(2 + n^2 / eps) and the sample
    /// count that makes each weight estimate accurate to 2 eps M / n with
    /// failure probability eps delta / n per (element, step) pair.
    pub fn from_epsilon(n: usize, epsilon: f64) -> Result<ContinuousGreedyConfig> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidEpsilon {
                epsilon,
                range: "(0, inf)",
            });
        }
        let nf = n as f64;
        let steps = (2.0 + nf * nf / epsilon).ceil() as usize;
        let samples = (2.0 * nf * nf / (epsilon * epsilon)
            * (2.0 * nf / epsilon * steps as f64).ln())
        .ceil() as usize;
        Ok(ContinuousGreedyConfig {
            epsilon,
            steps,
            samples_per_element: samples.max(1),
        })
    }

    /// Test-scale override of the sample count; the step schedule and the
    /// query accounting (2 n r / delta) are unchanged.
    pub fn with_samples(mut self, r: usize) -> ContinuousGreedyConfig {
        assert!(r >= 1);
        self.samples_per_element = r;
        self
    }

    /// Test-scale override of the step count.
    pub fn with_steps(mut self, steps: usize) -> ContinuousGreedyConfig {
        assert!(steps >= 1);
        self.steps = steps;
        self
    }

    pub fn delta(&self) -> f64 {
        1.0 / self.steps as f64
    }
}

/// Distortion coefficient (1 - delta)^((1 - t)/delta - 1), evaluated in log
/// space. Equals 1 at the last step (t = 1 - delta) and 1/(1 - delta) at
/// t = 1.
pub fn distorted_coefficient(delta: f64, t: f64) -> f64 {
    debug_assert!(delta > 0.0 && delta < 1.0);
    let exponent = (1.0 - t) / delta - 1.0;
    (exponent * (-delta).ln_1p()).exp()
}

fn coefficient_from_index(steps: usize, i: usize) -> f64 {
    // At t = i * delta the exponent (1-t)/delta - 1 is exactly steps - i - 1.
    let exponent = (steps - i - 1) as f64;
    (exponent * (-1.0 / steps as f64).ln_1p()).exp()
}

/// One recorded step: the state before the move and the move itself.
#[derive(Debug, Clone)]
pub struct TrajectoryStep {
    pub index: usize,
    pub t: f64,
    pub y: FractionalPoint,
    pub weights: Vec<f64>,
    pub direction: SubsetMask,
    pub coefficient: f64,
}

/// Full record of a continuous-greedy run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub steps: Vec<TrajectoryStep>,
    pub final_point: FractionalPoint,
}

#[derive(Debug, Clone)]
pub struct ContinuousGreedyRun {
    pub point: FractionalPoint,
    pub trajectory: Trajectory,
    /// Oracle queries spent: exactly 2 n r steps.
    pub queries: u64,
}

/// Runs the measured continuous greedy. Randomness is drawn from child
/// streams of `stream` keyed by step index, then element index, so the run
/// is reproducible under any sampling parallelism.
pub fn run_measured_continuous_greedy(
    g: &SetFunction,
    ell: &ModularCost,
    matroid: &Matroid,
    config: &ContinuousGreedyConfig,
    stream: &RngStream,
) -> Result<ContinuousGreedyRun> {
    let n = g.n();
    if ell.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: ell.n(),
        });
    }
    if matroid.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: matroid.n(),
        });
    }
    let steps = config.steps;
    let delta = config.delta();
    let r = config.samples_per_element;

    let mut y = FractionalPoint::zeros(n);
    let mut trajectory = Vec::with_capacity(steps);
    let mut queries = 0u64;
    for i in 0..steps {
        let t = i as f64 / steps as f64;
        let estimate = estimate_marginal_weights(g, &y, r, &stream.derive(i as u64))?;
        queries += estimate.queries_spent;
        let coefficient = coefficient_from_index(steps, i);
        let linear: Vec<f64> = (0..n)
            .map(|e| coefficient * estimate.weights[e] - ell.get(e))
            .collect();
        let (direction, _) = matroid.linear_maximize(&linear);
        let mut next = y.to_vec();
        for e in direction.iter() {
            next[e] = (next[e] + delta * (1.0 - next[e])).min(1.0);
        }
        trajectory.push(TrajectoryStep {
            index: i,
            t,
            y: y.clone(),
            weights: estimate.weights,
            direction,
            coefficient,
        });
        y = FractionalPoint::from_vec_unchecked(next);
    }
    Ok(ContinuousGreedyRun {
        point: y.clone(),
        trajectory: Trajectory {
            steps: trajectory,
            final_point: y,
        },
        queries,
    })
}

/// Distorted potential (1 - delta)^((1-t)/delta) G(y) - L(y), evaluated
/// exactly by enumeration (diagnostic, n <= 20, uncounted). Along a run it
/// starts at (1 - delta)^(1/delta) G(0) >= 0 and ends at G(y(1)) - L(y(1)).
pub fn distorted_potential(
    g: &SetFunction,
    ell: &ModularCost,
    delta: f64,
    t: f64,
    y: &FractionalPoint,
) -> Result<f64> {
    let scale = (((1.0 - t) / delta) * (-delta).ln_1p()).exp();
    Ok(scale * multilinear_exact(g, y)? - ell.dot(y.as_slice()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> SetFunction {
        SetFunction::directed_cut(3, &[(0, 1, 2.0), (1, 2, 1.0), (2, 0, 3.0)]).unwrap()
    }

    #[test]
    fn coefficient_boundary_values() {
        let delta = 0.1;
        assert!((distorted_coefficient(delta, 1.0) - 1.0 / 0.9).abs() < 1e-12);
        assert!((distorted_coefficient(delta, 1.0 - delta) - 1.0).abs() < 1e-12);
        assert!((distorted_coefficient(0.5, 0.0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn coefficient_index_form_matches_real_form() {
        let steps = 74;
        let delta = 1.0 / steps as f64;
        for i in [0usize, 1, 36, 72, 73] {
            let t = i as f64 / steps as f64;
            let a = coefficient_from_index(steps, i);
            let b = distorted_coefficient(delta, t);
            assert!((a - b).abs() < 1e-9 * b.max(1.0));
        }
    }

    #[test]
    fn config_follows_schedule_formulas() {
        let cfg = ContinuousGreedyConfig::from_epsilon(6, 0.5).unwrap();
        assert_eq!(cfg.steps, 74);
        assert_eq!(cfg.samples_per_element, 2155);
        assert!(ContinuousGreedyConfig::from_epsilon(6, 0.0).is_err());
        assert!(ContinuousGreedyConfig::from_epsilon(6, -1.0).is_err());
    }

    #[test]
    fn zero_function_stays_at_origin() {
        let g = SetFunction::modular(vec![0.0; 3]).unwrap();
        let ell = ModularCost::zeros(3);
        let m = Matroid::uniform(3, 2);
        let cfg = ContinuousGreedyConfig::from_epsilon(3, 0.5)
            .unwrap()
            .with_samples(5);
        let run = run_measured_continuous_greedy(&g, &ell, &m, &cfg, &RngStream::new(1)).unwrap();
        assert_eq!(run.point.as_slice(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn single_element_run_matches_closed_form() {
        // One covering element, no cost, cardinality one: every step moves
        // along the element, so y(1) = 1 - (1 - delta)^(1/delta) up to the
        // rare all-samples-inside event.
        let g = SetFunction::weighted_coverage(1, vec![1.0], &[vec![0]]).unwrap();
        let ell = ModularCost::zeros(1);
        let m = Matroid::uniform(1, 1);
        let cfg = ContinuousGreedyConfig::from_epsilon(1, 0.5).unwrap();
        assert_eq!(cfg.steps, 4);
        let target = 1.0 - (1.0 - cfg.delta()).powi(cfg.steps as i32);
        for seed in 0..20 {
            let run =
                run_measured_continuous_greedy(&g, &ell, &m, &cfg, &RngStream::new(seed)).unwrap();
            let y = run.point.get(0);
            assert!(y <= target + 1e-9, "seed {seed}: y={y} above cap {target}");
            assert!(y >= target - 0.05, "seed {seed}: y={y} far below {target}");
        }
    }

    #[test]
    fn trajectory_is_monotone_capped_and_feasible() {
        let g = triangle();
        let ell = ModularCost::new(vec![0.1, 0.1, 0.1]).unwrap();
        let m = Matroid::uniform(3, 2);
        let cfg = ContinuousGreedyConfig::from_epsilon(3, 0.5)
            .unwrap()
            .with_samples(50);
        let run = run_measured_continuous_greedy(&g, &ell, &m, &cfg, &RngStream::new(9)).unwrap();
        let delta = cfg.delta();
        assert_eq!(run.trajectory.steps[0].y.as_slice(), &[0.0; 3]);
        let mut prev = FractionalPoint::zeros(3);
        for (i, step) in run.trajectory.steps.iter().enumerate() {
            for e in 0..3 {
                assert!(step.y.get(e) >= prev.get(e) - 1e-15);
                let cap = 1.0 - (1.0 - delta).powi(i as i32);
                assert!(step.y.get(e) <= cap + 1e-9, "step {i} coordinate above cap");
            }
            prev = step.y.clone();
        }
        assert!(m.in_polytope(&run.point, 1e-9));
        assert_eq!(run.queries, 2 * 3 * 50 * cfg.steps as u64);
    }

    #[test]
    fn potential_endpoints() {
        let g = triangle();
        let ell = ModularCost::new(vec![0.1, 0.1, 0.1]).unwrap();
        let delta = 0.25;
        let zero = FractionalPoint::zeros(3);
        // Cut functions vanish on the empty set, so the start potential is 0.
        assert_eq!(
            distorted_potential(&g, &ell, delta, 0.0, &zero).unwrap(),
            0.0
        );
        let y = FractionalPoint::new(vec![0.5, 0.0, 0.5]).unwrap();
        let at_one = distorted_potential(&g, &ell, delta, 1.0, &y).unwrap();
        let direct = multilinear_exact(&g, &y).unwrap() - ell.dot(y.as_slice());
        assert!((at_one - direct).abs() < 1e-12);
    }
}
