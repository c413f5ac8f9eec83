//! Instrumented runs reporting abstract step counts.

use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::counting::count_reduced;
use crate::enumeration::Enumerator;
use crate::error::{Error, Result};
use crate::model::{gaifman_graph, Database, Node};
use crate::qe::{eliminate_quantifiers, Config};
use crate::query::Formula;
use crate::steps;
use crate::testing::Tester;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Count,
    Test,
    Enumerate,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "count" => Ok(Mode::Count),
            "test" => Ok(Mode::Test),
            "enumerate" => Ok(Mode::Enumerate),
            _ => Err(Error::Invalid(format!("unknown bench mode {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OpSteps {
    pub max: u64,
    pub mean: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchReport {
    pub n: usize,
    pub d: usize,
    pub mode: String,
    pub prep_steps: u64,
    pub prep_wall_ms: u64,
    pub per_op_steps: OpSteps,
    pub answers: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_delay_steps: Option<u64>,
}

/// Options beyond the engine configuration.
#[derive(Clone, Debug)]
pub struct BenchOptions {
    /// Number of tuples probed in test mode.
    pub samples: usize,
    pub seed: u64,
    /// Stop enumeration after this many answers.
    pub limit: Option<u64>,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions { samples: 1000, seed: 1, limit: None }
    }
}

pub fn database_degree(db: &Database) -> Result<usize> {
    let rels: Vec<&str> = db.relation_names();
    Ok(gaifman_graph(db, &rels)?.degree())
}

pub fn bench(db: &Database, phi: &Formula, cfg: &Config, mode: Mode, opts: &BenchOptions) -> Result<BenchReport> {
    let d = database_degree(db)?;
    let start = Instant::now();
    steps::reset();
    let ri = Arc::new(eliminate_quantifiers(db, phi, cfg)?);
    let mut report = BenchReport {
        n: db.n(),
        d,
        mode: String::new(),
        prep_steps: 0,
        prep_wall_ms: 0,
        per_op_steps: OpSteps { max: 0, mean: 0.0 },
        answers: 0,
        max_delay_steps: None,
    };
    let mut ops: Vec<u64> = Vec::new();
    match mode {
        Mode::Count => {
            report.mode = "count".into();
            report.prep_steps = steps::read();
            report.prep_wall_ms = start.elapsed().as_millis() as u64;
            let (c, cost) = steps::measure(|| count_reduced(&ri));
            let c = c?;
            report.answers = u64::try_from(&c).unwrap_or(u64::MAX);
            ops.push(cost);
        }
        Mode::Test => {
            report.mode = "test".into();
            let tester = Tester::new(ri.clone())?;
            report.prep_steps = steps::read();
            report.prep_wall_ms = start.elapsed().as_millis() as u64;
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            let n = db.n().max(1) as Node;
            for _ in 0..opts.samples {
                let t: Vec<Node> = (0..ri.k).map(|_| rng.gen_range(0..n)).collect();
                let (ok, cost) = steps::measure(|| tester.test(&t));
                report.answers += ok? as u64;
                ops.push(cost);
            }
        }
        Mode::Enumerate => {
            report.mode = "enumerate".into();
            let mut en = Enumerator::new(ri.clone(), cfg)?;
            report.prep_steps = steps::read();
            report.prep_wall_ms = start.elapsed().as_millis() as u64;
            loop {
                if opts.limit.is_some_and(|l| report.answers >= l) {
                    break;
                }
                let (out, cost) = steps::measure(|| en.next_answer());
                ops.push(cost);
                if out?.is_none() {
                    break;
                }
                report.answers += 1;
            }
            report.max_delay_steps = Some(ops.iter().copied().max().unwrap_or(0));
        }
    }
    report.per_op_steps = OpSteps {
        max: ops.iter().copied().max().unwrap_or(0),
        mean: if ops.is_empty() { 0.0 } else { ops.iter().sum::<u64>() as f64 / ops.len() as f64 },
    };
    Ok(report)
}
