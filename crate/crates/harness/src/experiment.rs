//! Seeded experiment runner: many independent replicas of one solver on one
//! instance, parallelized over replicas, reported as CSV rows plus a
//! summary row.
//!
//! Determinism contract: replica r draws from the stream derived as
//! (seed, r), rows are emitted in replica order regardless of thread
//! scheduling, and floats are written in their shortest round-trip form, so
//! two runs of the same configuration produce identical CSV bytes except
//! for the wall-time column.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;

use regsubmax::{
    brute_force_opt, compute_m, pipage_round, run_cardinality_auto, run_distorted_random_greedy,
    run_distorted_random_sampling_greedy, run_measured_continuous_greedy,
    run_unconstrained_distorted_greedy, ContinuousGreedyConfig, GuaranteeForm, Matroid, RngStream,
    SubsetMask,
};

use crate::error::{HarnessError, Result};
use crate::instance::{ConstraintSpec, Instance};

/// Solver selector, as given on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum AlgorithmChoice {
    /// Measured continuous greedy plus pipage rounding (needs a matroid).
    Continuous,
    /// Random greedy (needs k).
    RandomGreedy,
    /// Sampling greedy (needs k and epsilon).
    SamplingGreedy,
    /// Single unconstrained pass (ignores k and the constraint).
    Unconstrained,
    /// Cardinality dispatcher: scan, random greedy, or sampling greedy.
    Auto,
}

/// One experiment: an algorithm, its parameters, and the replica plan.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub algorithm: AlgorithmChoice,
    pub k: Option<usize>,
    pub epsilon: Option<f64>,
    pub seed: u64,
    pub reps: usize,
    /// Compare the replica mean against the brute-force bound (n <= 20).
    pub verify: bool,
    /// Replica-level parallelism; None uses the global thread pool.
    pub threads: Option<usize>,
}

/// One CSV row. Option fields print as empty cells.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub algorithm: String,
    pub n: usize,
    pub k: Option<usize>,
    pub epsilon: Option<f64>,
    pub seed: u64,
    pub set_size: Option<usize>,
    pub g_value: f64,
    pub ell_value: f64,
    pub objective: f64,
    pub g_queries: u64,
    pub elapsed_ms: f64,
    pub opt_g: Option<f64>,
    pub opt_ell: Option<f64>,
    pub bound: Option<f64>,
    pub bound_satisfied: Option<bool>,
    pub objective_stderr: Option<f64>,
}

/// Per-run rows (replica order) plus the summary row.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub records: Vec<RunRecord>,
    pub summary: RunRecord,
}

/// Fixed CSV column order. The final column is only populated on the
/// summary row.
pub const CSV_HEADER: &str = "algorithm,n,k,epsilon,seed,set_size,g_value,ell_value,objective,\
g_queries,elapsed_ms,opt_g,opt_ell,bound,bound_satisfied,objective_stderr";

fn cell<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

impl RunRecord {
    fn to_csv_row(&self) -> String {
        let mut row = String::new();
        let _ = write!(
            row,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.algorithm,
            self.n,
            cell(&self.k),
            cell(&self.epsilon),
            self.seed,
            cell(&self.set_size),
            self.g_value,
            self.ell_value,
            self.objective,
            self.g_queries,
            self.elapsed_ms,
            cell(&self.opt_g),
            cell(&self.opt_ell),
            cell(&self.bound),
            cell(&self.bound_satisfied),
            cell(&self.objective_stderr),
        );
        row
    }
}

impl ExperimentReport {
    /// The full CSV document: header, one row per replica, summary row.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.records.len() + 2));
        out.push_str(CSV_HEADER);
        out.push('\n');
        out.push_str(&self.to_csv_rows());
        out
    }

    /// The data rows alone, for concatenating several reports under one
    /// header.
    pub fn to_csv_rows(&self) -> String {
        let mut out = String::with_capacity(64 * (self.records.len() + 1));
        for record in &self.records {
            out.push_str(&record.to_csv_row());
            out.push('\n');
        }
        out.push_str(&self.summary.to_csv_row());
        out.push('\n');
        out
    }
}

/// The concrete plan after checking algorithm/constraint compatibility.
enum Plan {
    Continuous {
        matroid: Matroid,
        config: ContinuousGreedyConfig,
        epsilon: f64,
    },
    RandomGreedy {
        k: usize,
    },
    SamplingGreedy {
        k: usize,
        epsilon: f64,
    },
    Auto {
        k: usize,
        epsilon: f64,
    },
    Unconstrained,
}

fn resolve_k(instance: &Instance, config: &ExperimentConfig) -> Result<usize> {
    let from_instance = match &instance.file.constraint {
        ConstraintSpec::Uniform { k } => Some(*k),
        ConstraintSpec::None => None,
        ConstraintSpec::Partition { .. } => {
            return Err(HarnessError::Config(
                "cardinality solvers need a uniform constraint, but the instance \
                 carries a partition constraint"
                    .into(),
            ))
        }
    };
    match (config.k, from_instance) {
        (Some(a), Some(b)) if a != b => Err(HarnessError::Config(format!(
            "--k {a} conflicts with the instance's cardinality bound {b}"
        ))),
        (Some(k), _) | (None, Some(k)) => Ok(k),
        (None, None) => Err(HarnessError::Config(
            "this algorithm needs a cardinality bound: pass --k or use an instance \
             with a uniform constraint"
                .into(),
        )),
    }
}

fn resolve_epsilon(config: &ExperimentConfig) -> Result<f64> {
    config.epsilon.ok_or_else(|| {
        HarnessError::Config("this algorithm needs an accuracy parameter: pass --epsilon".into())
    })
}

fn resolve_plan(instance: &Instance, config: &ExperimentConfig) -> Result<Plan> {
    match config.algorithm {
        AlgorithmChoice::Unconstrained => Ok(Plan::Unconstrained),
        AlgorithmChoice::RandomGreedy => Ok(Plan::RandomGreedy {
            k: resolve_k(instance, config)?,
        }),
        AlgorithmChoice::SamplingGreedy => Ok(Plan::SamplingGreedy {
            k: resolve_k(instance, config)?,
            epsilon: resolve_epsilon(config)?,
        }),
        AlgorithmChoice::Auto => Ok(Plan::Auto {
            k: resolve_k(instance, config)?,
            epsilon: resolve_epsilon(config)?,
        }),
        AlgorithmChoice::Continuous => {
            let epsilon = resolve_epsilon(config)?;
            let matroid = match (&instance.matroid, config.k) {
                (Some(m), None) => m.clone(),
                (None, Some(k)) => {
                    if k > instance.n() {
                        return Err(HarnessError::Solver(regsubmax::Error::InvalidK {
                            k,
                            n: instance.n(),
                        }));
                    }
                    Matroid::uniform(instance.n(), k)
                }
                (Some(m), Some(k)) => match &instance.file.constraint {
                    ConstraintSpec::Uniform { k: ik } if *ik == k => m.clone(),
                    _ => {
                        return Err(HarnessError::Config(
                            "--k conflicts with the instance's constraint".into(),
                        ))
                    }
                },
                (None, None) => {
                    return Err(HarnessError::Config(
                        "the continuous solver needs a matroid: use an instance with a \
                         constraint or pass --k for a uniform one"
                            .into(),
                    ))
                }
            };
            let config = ContinuousGreedyConfig::from_epsilon(instance.n(), epsilon)?;
            Ok(Plan::Continuous {
                matroid,
                config,
                epsilon,
            })
        }
    }
}

struct ReplicaOutcome {
    algorithm: &'static str,
    set: SubsetMask,
    queries: u64,
    elapsed_ms: f64,
    seed_state: u64,
}

fn run_replica(instance: &Instance, plan: &Plan, stream: &RngStream) -> Result<ReplicaOutcome> {
    let oracle = instance.g.clone();
    oracle.reset_query_count();
    let started = Instant::now();
    let (set, algorithm) = match plan {
        Plan::Continuous {
            matroid, config, ..
        } => {
            let run = run_measured_continuous_greedy(
                &oracle,
                &instance.ell,
                matroid,
                config,
                &stream.derive(0),
            )?;
            let mut rng = stream.derive(1).rng();
            let set = pipage_round(matroid, &run.point, &mut rng)?;
            (set, "continuous")
        }
        Plan::RandomGreedy { k } => {
            let (set, stats) = run_distorted_random_greedy(&oracle, &instance.ell, *k, stream)?;
            (set, stats.algorithm.name())
        }
        Plan::SamplingGreedy { k, epsilon } => {
            let (set, stats) =
                run_distorted_random_sampling_greedy(&oracle, &instance.ell, *k, *epsilon, stream)?;
            (set, stats.algorithm.name())
        }
        Plan::Auto { k, epsilon } => {
            let (set, stats) = run_cardinality_auto(&oracle, &instance.ell, *k, *epsilon, stream)?;
            (set, stats.algorithm.name())
        }
        Plan::Unconstrained => {
            let (set, stats) = run_unconstrained_distorted_greedy(&oracle, &instance.ell, stream)?;
            (set, stats.algorithm.name())
        }
    };
    Ok(ReplicaOutcome {
        algorithm,
        set,
        queries: oracle.query_count(),
        elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
        seed_state: stream.state(),
    })
}

/// Brute-force check data attached to a verified report.
struct Verification {
    opt_g: f64,
    opt_ell: f64,
    bound: f64,
}

fn verify_bound(instance: &Instance, plan: &Plan, routed: &str) -> Result<Verification> {
    let (constraint, form): (Option<Matroid>, GuaranteeForm) = match plan {
        Plan::Continuous {
            matroid, epsilon, ..
        } => {
            let m = compute_m(&instance.g.clone())?;
            (
                Some(matroid.clone()),
                GuaranteeForm::MatroidContinuous {
                    epsilon: *epsilon,
                    m,
                },
            )
        }
        Plan::RandomGreedy { k } => (
            Some(Matroid::uniform(instance.n(), *k)),
            GuaranteeForm::CardinalityRandomGreedy { k: *k },
        ),
        Plan::SamplingGreedy { k, epsilon } => (
            Some(Matroid::uniform(instance.n(), *k)),
            GuaranteeForm::CardinalitySamplingGreedy {
                k: *k,
                epsilon: *epsilon,
            },
        ),
        Plan::Auto { k, epsilon } => {
            let form = if routed == "sampling_greedy" {
                GuaranteeForm::CardinalitySamplingGreedy {
                    k: *k,
                    epsilon: *epsilon,
                }
            } else {
                GuaranteeForm::CardinalityRandomGreedy { k: *k }
            };
            (Some(Matroid::uniform(instance.n(), *k)), form)
        }
        Plan::Unconstrained => (None, GuaranteeForm::Unconstrained { n: instance.n() }),
    };
    let opt = brute_force_opt(&instance.g, &instance.ell, constraint.as_ref())?;
    Ok(Verification {
        opt_g: opt.g_value,
        opt_ell: opt.ell_value,
        bound: form.bound(opt.g_value, opt.ell_value),
    })
}

/// Runs the configured experiment and builds its report.
pub fn run_experiment(instance: &Instance, config: &ExperimentConfig) -> Result<ExperimentReport> {
    if config.reps == 0 {
        return Err(HarnessError::Config("need at least one replica".into()));
    }
    let plan = resolve_plan(instance, config)?;
    let base = RngStream::new(config.seed);
    let run_all = || -> Result<Vec<ReplicaOutcome>> {
        (0..config.reps as u64)
            .into_par_iter()
            .map(|rep| run_replica(instance, &plan, &base.derive(rep)))
            .collect()
    };
    let outcomes = match config.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?
            .install(run_all),
        None => run_all(),
    }?;

    let routed = outcomes.first().map(|o| o.algorithm).unwrap_or("none");
    let verification = if config.verify {
        Some(verify_bound(instance, &plan, routed)?)
    } else {
        None
    };

    let (k, epsilon) = match &plan {
        Plan::Continuous { epsilon, .. } => (config.k, Some(*epsilon)),
        Plan::RandomGreedy { k } => (Some(*k), None),
        Plan::SamplingGreedy { k, epsilon } | Plan::Auto { k, epsilon } => {
            (Some(*k), Some(*epsilon))
        }
        Plan::Unconstrained => (None, None),
    };

    let mut records = Vec::with_capacity(outcomes.len());
    for outcome in &outcomes {
        let g_value = instance.g.eval_silent(&outcome.set)?;
        let ell_value = instance.ell.value(&outcome.set);
        records.push(RunRecord {
            algorithm: outcome.algorithm.to_string(),
            n: instance.n(),
            k,
            epsilon,
            seed: outcome.seed_state,
            set_size: Some(outcome.set.len()),
            g_value,
            ell_value,
            objective: g_value - ell_value,
            g_queries: outcome.queries,
            elapsed_ms: outcome.elapsed_ms,
            opt_g: verification.as_ref().map(|v| v.opt_g),
            opt_ell: verification.as_ref().map(|v| v.opt_ell),
            bound: verification.as_ref().map(|v| v.bound),
            bound_satisfied: None,
            objective_stderr: None,
        });
    }

    let objectives: Vec<f64> = records.iter().map(|r| r.objective).collect();
    let (mean_obj, stderr) = regsubmax::summary_stats(&objectives);
    let mean_g = records.iter().map(|r| r.g_value).sum::<f64>() / records.len() as f64;
    let mean_ell = records.iter().map(|r| r.ell_value).sum::<f64>() / records.len() as f64;
    let summary = RunRecord {
        algorithm: format!("summary:{routed}"),
        n: instance.n(),
        k,
        epsilon,
        seed: config.seed,
        set_size: None,
        g_value: mean_g,
        ell_value: mean_ell,
        objective: mean_obj,
        g_queries: records.iter().map(|r| r.g_queries).sum(),
        elapsed_ms: records.iter().map(|r| r.elapsed_ms).sum(),
        opt_g: verification.as_ref().map(|v| v.opt_g),
        opt_ell: verification.as_ref().map(|v| v.opt_ell),
        bound: verification.as_ref().map(|v| v.bound),
        // The guarantees speak about the expected objective, so the flag
        // compares the replica mean, with a three standard error allowance
        // for Monte-Carlo noise.
        bound_satisfied: verification
            .as_ref()
            .map(|v| mean_obj >= v.bound - 3.0 * stderr),
        objective_stderr: Some(stderr),
    };
    Ok(ExperimentReport { records, summary })
}
