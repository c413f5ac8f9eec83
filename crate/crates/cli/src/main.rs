use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use lowdeg_core::bench::{bench, database_degree, BenchOptions, Mode};
use lowdeg_core::corpus::{corpus_config, run_corpus};
use lowdeg_core::counting::count_reduced;
use lowdeg_core::enumeration::Enumerator;
use lowdeg_core::generate::{generate, parse_signature_spec, Schedule};
use lowdeg_core::model::{load_database, Database, Node};
use lowdeg_core::qe::{eliminate_quantifiers, Config, ReducedInstance};
use lowdeg_core::query::{parse_query, Formula};
use lowdeg_core::steps;
use lowdeg_core::storing::Epsilon;
use lowdeg_core::testing::Tester;
use lowdeg_core::Error;
use serde_json::json;

#[derive(Parser)]
#[command(name = "lowdeg", version, about = "Count, test and enumerate first-order query answers on low-degree databases")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Fact file.
    #[arg(long, global = true)]
    db: Option<PathBuf>,
    /// Query text.
    #[arg(long, global = true, conflicts_with = "query_file")]
    query: Option<String>,
    /// File holding the query text.
    #[arg(long, global = true)]
    query_file: Option<PathBuf>,
    /// Storage trade-off parameter, e.g. 0.5 or 1/3.
    #[arg(long, global = true, default_value = "0.5")]
    epsilon: String,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Largest neighbourhood size accepted by type canonicalisation.
    #[arg(long, global = true)]
    cap_neighborhood: Option<usize>,
    /// Write the reduced colored graph here and its V-node map to FILE.map.
    #[arg(long, global = true)]
    dump_reduced: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a fact file and print a summary.
    Ingest,
    /// Print the exact number of answers.
    Count,
    /// Decide whether a tuple is an answer (exit 1 when it is not).
    Test {
        /// Comma-separated node ids.
        #[arg(long, allow_hyphen_values = true)]
        tuple: String,
    },
    /// Print every answer, one per line.
    Enumerate {
        #[arg(long)]
        limit: Option<u64>,
        /// Print `{prep_steps, max_delay_steps, answers}` to stderr.
        #[arg(long)]
        stats: bool,
    },
    /// Generate a random database under a degree schedule.
    Gen {
        #[arg(long)]
        n: usize,
        /// const:D, log_pow:C or poly:DELTA.
        #[arg(long)]
        schedule: String,
        /// Relations as NAME/ARITY:PARAM, comma separated.
        #[arg(long, default_value = "E/2:1.5,B/1:0.03,R/1:0.03")]
        signature: String,
        /// Output file (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one instrumented mode and print a JSON report.
    Bench {
        #[arg(long, default_value = "enumerate")]
        mode: String,
        /// Tuples probed in test mode.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long)]
        limit: Option<u64>,
    },
    /// Compare every engine with the brute-force evaluator on the built-in corpus.
    Check,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<Error>().map_or(2, Error::exit_code);
            ExitCode::from(code as u8)
        }
    }
}

impl Global {
    fn config(&self) -> anyhow::Result<Config> {
        let mut cfg = Config { epsilon: Epsilon::parse(&self.epsilon)?, ..Config::default() };
        if let Some(cap) = self.cap_neighborhood {
            cfg.canon_cap = cap;
        }
        Ok(cfg)
    }

    fn database(&self) -> anyhow::Result<Database> {
        let Some(path) = &self.db else { bail!(Error::Invalid("--db FILE is required".into())) };
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Ok(load_database(&text)?)
    }

    fn formula(&self) -> anyhow::Result<Formula> {
        let text = match (&self.query, &self.query_file) {
            (Some(q), _) => q.clone(),
            (None, Some(p)) => fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
            (None, None) => bail!(Error::Invalid("--query or --query-file is required".into())),
        };
        Ok(parse_query(&text)?)
    }

    fn reduce(&self, db: &Database, phi: &Formula, cfg: &Config) -> anyhow::Result<Arc<ReducedInstance>> {
        let ri = eliminate_quantifiers(db, phi, cfg)?;
        if let Some(path) = &self.dump_reduced {
            write_dump(&ri, path)?;
        }
        Ok(Arc::new(ri))
    }
}

fn write_dump(ri: &ReducedInstance, path: &Path) -> anyhow::Result<()> {
    let (facts, map) = ri.dump();
    fs::write(path, facts).with_context(|| format!("writing {}", path.display()))?;
    let mut map_path = path.as_os_str().to_owned();
    map_path.push(".map");
    fs::write(&map_path, map).with_context(|| format!("writing {}", Path::new(&map_path).display()))?;
    Ok(())
}

fn parse_tuple(s: &str) -> anyhow::Result<Vec<Node>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|w| w.trim().parse::<Node>().map_err(|_| Error::Invalid(format!("bad node id {w:?}")).into()))
        .collect()
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let g = &cli.global;
    let out = io::stdout();
    let mut out = BufWriter::new(out.lock());
    match cli.cmd {
        Cmd::Ingest => {
            let db = g.database()?;
            writeln!(out, "domain {}", db.n())?;
            for name in db.relation_names() {
                let r = db.relation(name).expect("listed relation");
                writeln!(out, "{name}/{} {} tuples", r.arity(), r.len())?;
            }
            writeln!(out, "degree {}", database_degree(&db)?)?;
        }
        Cmd::Count => {
            let (db, phi, cfg) = (g.database()?, g.formula()?, g.config()?);
            let ri = g.reduce(&db, &phi, &cfg)?;
            writeln!(out, "{}", count_reduced(&ri)?)?;
        }
        Cmd::Test { tuple } => {
            let (db, phi, cfg) = (g.database()?, g.formula()?, g.config()?);
            let tuple = parse_tuple(&tuple)?;
            let tester = Tester::new(g.reduce(&db, &phi, &cfg)?)?;
            let ok = tester.test(&tuple)?;
            writeln!(out, "{}", if ok { "true" } else { "false" })?;
            out.flush()?;
            return Ok(if ok { 0 } else { 1 });
        }
        Cmd::Enumerate { limit, stats } => {
            let (db, phi, cfg) = (g.database()?, g.formula()?, g.config()?);
            steps::reset();
            let ri = g.reduce(&db, &phi, &cfg)?;
            let mut en = Enumerator::new(ri, &cfg)?;
            let prep_steps = steps::read();
            let mut failed = Ok(());
            let run = en.run(limit, |t| {
                if failed.is_ok() {
                    let line: Vec<String> = t.iter().map(|v| v.to_string()).collect();
                    failed = writeln!(out, "{}", line.join(" "));
                }
            })?;
            failed?;
            if stats {
                out.flush()?;
                let s = json!({"prep_steps": prep_steps, "max_delay_steps": run.max_delay_steps, "answers": run.answers});
                eprintln!("{s}");
            }
        }
        Cmd::Gen { n, schedule, signature, out: path } => {
            let schedule: Schedule = schedule.parse()?;
            let sig = parse_signature_spec(&signature)?;
            let db = generate(n, schedule, &sig, g.seed)?;
            match path {
                Some(p) => fs::write(&p, db.to_fact_text()).with_context(|| format!("writing {}", p.display()))?,
                None => out.write_all(db.to_fact_text().as_bytes())?,
            }
        }
        Cmd::Bench { mode, samples, limit } => {
            let (db, phi, cfg) = (g.database()?, g.formula()?, g.config()?);
            if g.dump_reduced.is_some() {
                g.reduce(&db, &phi, &cfg)?;
            }
            let mode: Mode = mode.parse()?;
            let opts = BenchOptions { samples, seed: g.seed, limit };
            let report = bench(&db, &phi, &cfg, mode, &opts)?;
            writeln!(out, "{}", serde_json::to_string(&report)?)?;
        }
        Cmd::Check => {
            let mut cfg = corpus_config();
            cfg.epsilon = Epsilon::parse(&g.epsilon)?;
            if let Some(cap) = g.cap_neighborhood {
                cfg.canon_cap = cap;
            }
            let reports = run_corpus(&cfg);
            let mut failures = 0;
            for r in &reports {
                let verdict = if r.passed() { "PASS" } else { "FAIL" };
                failures += usize::from(!r.passed());
                write!(out, "{verdict} {} | {} | answers={}", r.db, r.query, r.expected)?;
                if let Some(e) = &r.error {
                    write!(out, " | error: {e}")?;
                } else if !r.passed() {
                    write!(out, " | count={} test={} enumerate={}", r.count_ok, r.test_ok, r.enum_ok)?;
                }
                writeln!(out)?;
            }
            writeln!(out, "{} of {} cases passed", reports.len() - failures, reports.len())?;
            out.flush()?;
            return Ok(u8::from(failures > 0));
        }
    }
    out.flush()?;
    Ok(0)
}
