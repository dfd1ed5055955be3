//! Experiment harness for the regularized submodular maximization solvers:
//! instance files (JSON), a seeded random-instance generator, a parallel
//! experiment runner, and CSV reporting. The `regsubmax` binary in this
//! crate exposes all of it on the command line.

pub mod error;
pub mod experiment;
pub mod instance;

pub use error::{HarnessError, Result};
pub use experiment::{
    run_experiment, AlgorithmChoice, ExperimentConfig, ExperimentReport, RunRecord, CSV_HEADER,
};
pub use instance::{
    gen_digraph_cut_instance, instance_to_json, load_instance, parse_instance_json, save_instance,
    ConstraintSpec, FunctionSpec, Instance, InstanceFile,
};
