//! Exact references for small instances: brute-force optima, the guarantee
//! lower bounds each solver promises against them, and replicated-run
//! statistics for checking those promises empirically.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::extensions::RngStream;
use crate::matroid::Matroid;
use crate::setfn::{ModularCost, SetFunction, SubsetMask, EXACT_MAX_N};

/// A brute-force maximizer of g(A) - ell(A).
#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    /// Canonical optimal set: ties resolved to smaller cardinality, then
    /// lexicographically smaller element list.
    pub set: SubsetMask,
    pub g_value: f64,
    pub ell_value: f64,
}

impl Optimum {
    pub fn objective(&self) -> f64 {
        self.g_value - self.ell_value
    }
}

/// Enumerates every feasible subset and returns the maximizer of
/// g(A) - ell(A), restricted to independent sets when a matroid is given.
/// Uses silent evaluations, so the oracle's query counter is untouched.
/// Refuses ground sets larger than `EXACT_MAX_N`.
pub fn brute_force_opt(
    g: &SetFunction,
    ell: &ModularCost,
    matroid: Option<&Matroid>,
) -> Result<Optimum> {
    let n = g.n();
    if n > EXACT_MAX_N {
        return Err(Error::GroundSetTooLarge {
            n,
            max: EXACT_MAX_N,
        });
    }
    if ell.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: ell.n(),
        });
    }
    if let Some(m) = matroid {
        if m.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: m.n(),
            });
        }
    }
    let evaluate = |bits: u64| -> Result<Option<Optimum>> {
        let set = SubsetMask::from_bits(n, bits);
        if let Some(m) = matroid {
            if !m.is_independent(&set) {
                return Ok(None);
            }
        }
        let g_value = g.eval_silent(&set)?;
        let ell_value = ell.value(&set);
        Ok(Some(Optimum {
            set,
            g_value,
            ell_value,
        }))
    };
    // Strictly-better-objective wins; exact ties go to the canonical
    // smaller set, making the reduction associative and commutative so the
    // parallel fold is deterministic.
    let better = |a: Optimum, b: Optimum| -> Optimum {
        let (oa, ob) = (a.objective(), b.objective());
        if oa > ob {
            a
        } else if ob > oa {
            b
        } else if a.set <= b.set {
            a
        } else {
            b
        }
    };
    let best = (0u64..(1u64 << n))
        .into_par_iter()
        .map(evaluate)
        .try_reduce(
            || None,
            |x, y| {
                Ok(match (x, y) {
                    (Some(a), Some(b)) => Some(better(a, b)),
                    (Some(a), None) => Some(a),
                    (None, b) => b,
                })
            },
        )?;
    // The empty set is always feasible, so a maximizer always exists.
    Ok(best.expect("empty set is feasible"))
}

/// The lower bound each solver guarantees on the expected objective of its
/// output, as a function of the optimum's split (g(OPT), ell(OPT)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GuaranteeForm {
    /// Continuous greedy plus rounding over a matroid: 1/e g(OPT) -
    /// ell(OPT) - 5 epsilon M, holding with probability at least
    /// 1 - epsilon per run.
    MatroidContinuous { epsilon: f64, m: f64 },
    /// Random greedy under |A| <= k.
    CardinalityRandomGreedy { k: usize },
    /// Sampling greedy under |A| <= k at accuracy epsilon.
    CardinalitySamplingGreedy { k: usize, epsilon: f64 },
    /// Unconstrained single pass on n elements.
    Unconstrained { n: usize },
}

impl GuaranteeForm {
    /// The bound's value at a given optimum split.
    pub fn bound(&self, g_opt: f64, ell_opt: f64) -> f64 {
        fn damp(k: usize) -> f64 {
            // (1 - 1/k)^(k - 1), exactly 1 at k = 1.
            if k <= 1 {
                1.0
            } else {
                ((k as f64 - 1.0) * (-1.0 / k as f64).ln_1p()).exp()
            }
        }
        match *self {
            GuaranteeForm::MatroidContinuous { epsilon, m } => {
                (-1.0f64).exp() * g_opt - ell_opt - 5.0 * epsilon * m
            }
            GuaranteeForm::CardinalityRandomGreedy { k } => damp(k) * g_opt - ell_opt,
            GuaranteeForm::CardinalitySamplingGreedy { k, epsilon } => {
                (1.0 - epsilon) * (damp(k) * g_opt - ell_opt)
            }
            GuaranteeForm::Unconstrained { n } => damp(n) * g_opt - ell_opt,
        }
    }
}

/// Mean, spread, and raw values of a replicated randomized quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalStats {
    pub mean: f64,
    /// Standard error of the mean (unbiased sample variance over reps).
    pub stderr: f64,
    pub values: Vec<f64>,
}

/// Sample mean and standard error of the mean; stderr is 0 for a single
/// value.
pub fn summary_stats(values: &[f64]) -> (f64, f64) {
    assert!(!values.is_empty(), "no values to summarize");
    let reps = values.len() as f64;
    let mean = values.iter().sum::<f64>() / reps;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (reps - 1.0);
    (mean, (var / reps).sqrt())
}

/// Runs `runner` once per replica on an independently derived stream and
/// summarizes the outcomes. Replicas run in parallel; results are collected
/// in replica order, so the statistics do not depend on scheduling.
pub fn empirical_expectation<F>(reps: usize, base: &RngStream, runner: F) -> EmpiricalStats
where
    F: Fn(&RngStream) -> f64 + Sync,
{
    assert!(
        reps >= 2,
        "at least two replicas are needed for a standard error"
    );
    let values: Vec<f64> = (0..reps as u64)
        .into_par_iter()
        .map(|rep| runner(&base.derive(rep)))
        .collect();
    let (mean, stderr) = summary_stats(&values);
    EmpiricalStats {
        mean,
        stderr,
        values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn triangle() -> SetFunction {
        SetFunction::directed_cut(3, &[(0, 1, 2.0), (1, 2, 1.0), (2, 0, 3.0)]).unwrap()
    }

    #[test]
    fn unconstrained_optimum_of_triangle() {
        let g = triangle();
        let ell = ModularCost::zeros(3);
        let opt = brute_force_opt(&g, &ell, None).unwrap();
        assert_eq!(opt.set.elements(), vec![2]);
        assert_eq!(opt.g_value, 3.0);
        assert_eq!(opt.ell_value, 0.0);
    }

    #[test]
    fn constrained_optimum_respects_matroid() {
        let g = triangle();
        let ell = ModularCost::new(vec![0.5, 0.5, 0.5]).unwrap();
        let m = Matroid::uniform(3, 1);
        let opt = brute_force_opt(&g, &ell, Some(&m)).unwrap();
        assert_eq!(opt.set.elements(), vec![2]);
        assert_eq!(opt.objective(), 2.5);
    }

    #[test]
    fn ties_resolve_to_the_canonical_smaller_set() {
        // Every subset scores zero, so the empty set must win.
        let g = SetFunction::modular(vec![0.0, 1.0]).unwrap();
        let ell = ModularCost::new(vec![0.0, 1.0]).unwrap();
        let opt = brute_force_opt(&g, &ell, None).unwrap();
        assert!(opt.set.is_empty());
        assert_eq!(opt.objective(), 0.0);
    }

    #[test]
    fn brute_force_leaves_query_counter_untouched() {
        let g = triangle();
        let ell = ModularCost::zeros(3);
        brute_force_opt(&g, &ell, None).unwrap();
        assert_eq!(g.query_count(), 0);
    }

    #[test]
    fn brute_force_refuses_large_ground_sets() {
        let g = SetFunction::directed_cut(EXACT_MAX_N + 1, &[(0, 1, 1.0)]).unwrap();
        let ell = ModularCost::zeros(EXACT_MAX_N + 1);
        assert!(matches!(
            brute_force_opt(&g, &ell, None),
            Err(Error::GroundSetTooLarge { .. })
        ));
    }

    #[test]
    fn guarantee_bounds_frozen_values() {
        let unconstrained = GuaranteeForm::Unconstrained { n: 3 };
        assert!((unconstrained.bound(3.0, 0.5) - (4.0 / 3.0 - 0.5)).abs() < 1e-12);

        let greedy = GuaranteeForm::CardinalityRandomGreedy { k: 2 };
        assert!((greedy.bound(3.0, 0.5) - 1.0).abs() < 1e-12);
        let exact_at_one = GuaranteeForm::CardinalityRandomGreedy { k: 1 };
        assert_eq!(exact_at_one.bound(3.0, 0.5), 2.5);

        let continuous = GuaranteeForm::MatroidContinuous {
            epsilon: 0.5,
            m: 3.0,
        };
        let expected = 3.0 * (-1.0f64).exp() - 0.3 - 7.5;
        assert!((continuous.bound(3.0, 0.3) - expected).abs() < 1e-12);
        assert!((continuous.bound(3.0, 0.3) - (-6.696361676485673)).abs() < 1e-9);

        let sampled = GuaranteeForm::CardinalitySamplingGreedy { k: 2, epsilon: 0.3 };
        assert!((sampled.bound(3.0, 0.5) - 0.7).abs() < 1e-12);
    }

    #[test]
    fn summary_stats_known_values() {
        let (mean, stderr) = summary_stats(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(mean, 2.5);
        // Sample variance 5/3, stderr sqrt(5/12).
        assert!((stderr - (5.0f64 / 12.0).sqrt()).abs() < 1e-12);
        let (m1, s1) = summary_stats(&[7.0]);
        assert_eq!((m1, s1), (7.0, 0.0));
    }

    #[test]
    fn empirical_expectation_of_constant_has_zero_spread() {
        let stats = empirical_expectation(100, &RngStream::new(1), |_| 4.25);
        assert_eq!(stats.mean, 4.25);
        assert_eq!(stats.stderr, 0.0);
        assert_eq!(stats.values.len(), 100);
    }

    #[test]
    fn empirical_expectation_tracks_a_fair_coin() {
        let stats = empirical_expectation(40_000, &RngStream::new(2), |stream| {
            if stream.rng().gen::<f64>() < 0.5 {
                1.0
            } else {
                0.0
            }
        });
        assert!((stats.mean - 0.5).abs() < 4.0 * stats.stderr + 1e-9);
        assert!((stats.stderr - 0.0025).abs() < 3e-4);
    }

    #[test]
    fn empirical_expectation_is_deterministic_across_schedules() {
        let run =
            || empirical_expectation(500, &RngStream::new(3), |stream| stream.rng().gen::<f64>());
        let a = run();
        let b = run();
        assert_eq!(a.values, b.values);
    }
}
