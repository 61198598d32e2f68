//! Spec-file driven growth experiments: parse a `.gspec`, run an
//! experiment, emit CSV / JSON / gnuplot data.

pub mod emit;
pub mod run;
pub mod spec;

pub use emit::{emit, to_json, Format};
pub use run::{run_experiment, select, ExperimentReport, RunConfig, RunError};
pub use spec::{parse_spec, serialize, ParseError, SpecFile};

use std::env;

pub const CAP_ENV: &str = "GROWTHLAB_CAP";

/// Letter cap: the flag wins over the environment, which wins over the
/// default.
pub fn resolve_cap(flag: Option<usize>) -> Result<usize, String> {
    if let Some(c) = flag {
        return Ok(c);
    }
    match env::var(CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| format!("{CAP_ENV} must be a positive integer, got {v:?}")),
        Err(_) => Ok(run::DEFAULT_CAP),
    }
}
