use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use kronfact::harness::{self, io as hio, GrowthParams, InstanceSpec};
use kronfact::oracle::{brute_force_factorize_guarded, divisor_splits, DEFAULT_MAX_SIDE};
use kronfact::{alternate_local_search, BinaryMatrix, SearchConfig};

#[derive(Parser)]
#[command(name = "kronfact", version, about = "Kronecker factorization of directed graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct SearchOpts {
    /// key=value file with search settings
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "max-iter")]
    max_iter: Option<usize>,
    #[arg(long = "max-restarts")]
    max_restarts: Option<usize>,
    /// Extra setting, e.g. --set exhaustion_stall=8 (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl SearchOpts {
    fn build(&self, dim_b: usize, dim_c: usize, seed: Option<u64>) -> anyhow::Result<SearchConfig> {
        let mut cfg = SearchConfig::new(dim_b, dim_c);
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            cfg.apply_kv(&text)?;
        }
        for kv in &self.set {
            let (k, v) = kv.split_once('=').with_context(|| format!("expected KEY=VALUE, got {kv:?}"))?;
            cfg.set(k.trim(), v.trim())?;
        }
        if let Some(v) = self.max_iter {
            cfg.max_iter = v;
        }
        if let Some(v) = self.max_restarts {
            cfg.max_restarts = v;
        }
        if let Some(s) = seed {
            cfg.rng_seed = s;
        }
        cfg.dim_b = dim_b;
        cfg.dim_c = dim_c;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random permuted Kronecker product
    Gen {
        #[arg(long = "dimB")]
        dim_b: usize,
        #[arg(long = "dimC")]
        dim_c: usize,
        #[arg(long = "rhoB", default_value_t = 0.5)]
        rho_b: f64,
        #[arg(long = "rhoC", default_value_t = 0.5)]
        rho_c: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the hidden permutation and factors as JSON
        #[arg(long)]
        hidden: Option<PathBuf>,
    },
    /// Factorize one matrix for a fixed split
    Solve {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "dimB")]
        dim_b: usize,
        #[arg(long = "dimC")]
        dim_c: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        search: SearchOpts,
    },
    /// Try every nontrivial divisor split of the side
    SolveAll {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        search: SearchOpts,
    },
    /// Run the instances x variations protocol and summarize
    Batch {
        #[arg(long = "dimB")]
        dim_b: usize,
        #[arg(long = "dimC")]
        dim_c: usize,
        #[arg(long = "rhoB", default_value_t = 0.5)]
        rho_b: f64,
        #[arg(long = "rhoC", default_value_t = 0.5)]
        rho_c: f64,
        #[arg(long, default_value_t = 10)]
        instances: usize,
        #[arg(long, default_value_t = 10)]
        variations: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV summary
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-run JSON lines
        #[arg(long)]
        runs: Option<PathBuf>,
        #[command(flatten)]
        search: SearchOpts,
    },
    /// Time against edge count for increasing dimC
    Growth {
        #[arg(long = "rhoA", default_value_t = 0.25)]
        rho_a: f64,
        #[arg(long = "dimB", default_value_t = 10)]
        dim_b: usize,
        #[arg(long = "dimC-list", value_delimiter = ',', required = true)]
        dim_c_list: Vec<usize>,
        #[arg(long, default_value_t = 6)]
        instances: usize,
        #[arg(long, default_value_t = 10)]
        variations: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        search: SearchOpts,
    },
    /// Exhaustive verdict for small matrices
    Oracle {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "dimB", requires = "dim_c")]
        dim_b: Option<usize>,
        #[arg(long = "dimC", requires = "dim_b")]
        dim_c: Option<usize>,
        #[arg(long = "max-side", default_value_t = DEFAULT_MAX_SIDE)]
        max_side: usize,
    },
}

fn read_matrix(path: &Path) -> anyhow::Result<BinaryMatrix> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    hio::parse_input(&text).with_context(|| format!("parsing {}", path.display()))
}

fn sink(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_json(path: Option<&Path>, value: &serde_json::Value) -> anyhow::Result<()> {
    let mut w = sink(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn fmt_opt(t: Option<f64>) -> String {
    t.map_or_else(|| "NA".into(), |t| format!("{t:.4}s"))
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Gen {
            dim_b,
            dim_c,
            rho_b,
            rho_c,
            seed,
            out,
            hidden,
        } => {
            let inst = harness::generate_instance(&InstanceSpec::new(dim_b, dim_c, rho_b, rho_c, seed))?;
            let mut w = sink(out.as_deref())?;
            w.write_all(inst.a.to_text().as_bytes())?;
            w.flush()?;
            if let Some(path) = hidden {
                let h = &inst.hidden;
                write_json(Some(&path), &json!({ "p": h.p, "b": h.b, "c": h.c }))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve {
            input,
            dim_b,
            dim_c,
            seed,
            out,
            search,
        } => {
            let a = read_matrix(&input)?;
            let cfg = search.build(dim_b, dim_c, seed)?;
            let report = alternate_local_search(&a, &cfg)?;
            if report.success && !report.verify(&a) {
                bail!("internal error: certificate does not verify");
            }
            write_json(out.as_deref(), &serde_json::to_value(&report)?)?;
            if report.success {
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("no solution found (residual {})", report.residual);
                Ok(ExitCode::from(2))
            }
        }
        Command::SolveAll {
            input,
            seed,
            out,
            search,
        } => {
            let a = read_matrix(&input)?;
            if divisor_splits(a.n()).is_empty() {
                eprintln!("side {} has no nontrivial divisors; nothing to try", a.n());
            }
            let cfg = search.build(1, a.n(), seed)?;
            let splits = harness::solve_all_divisor_splits(&a, &cfg)?;
            let rows: Vec<_> = splits
                .iter()
                .map(|s| json!({ "n1": s.n1, "n2": s.n2, "report": s.report }))
                .collect();
            write_json(out.as_deref(), &serde_json::Value::Array(rows))?;
            let any = splits.iter().any(|s| s.report.success);
            Ok(if any { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
        Command::Batch {
            dim_b,
            dim_c,
            rho_b,
            rho_c,
            instances,
            variations,
            seed,
            out,
            runs,
            search,
        } => {
            let spec = InstanceSpec::new(dim_b, dim_c, rho_b, rho_c, seed);
            let cfg = search.build(dim_b, dim_c, None)?;
            let report = harness::run_batch(&spec, instances, variations, &cfg)?;
            if let Some(path) = runs {
                let mut w = sink(Some(&path))?;
                hio::write_records_jsonl(&report.records, &mut w)?;
                w.flush()?;
            }
            let mut w = sink(out.as_deref())?;
            hio::write_summary_csv(&report, &mut w)?;
            w.flush()?;
            let s = &report.stats;
            eprintln!(
                "{} runs, failure {:.2}%, t_min {} t_avg' {} t_avg {} t_max {}",
                s.runs,
                s.failure_pct,
                fmt_opt(s.t_min),
                fmt_opt(s.t_avg_prime),
                fmt_opt(s.t_avg),
                fmt_opt(s.t_max)
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Growth {
            rho_a,
            dim_b,
            dim_c_list,
            instances,
            variations,
            seed,
            out,
            search,
        } => {
            let mut params = GrowthParams::new(rho_a, dim_b, dim_c_list);
            params.instances = instances;
            params.variations = variations;
            params.seed = seed;
            let cfg = search.build(dim_b, 1, None)?;
            let rows = harness::growth_study(&params, &cfg)?;
            let mut w = sink(out.as_deref())?;
            hio::write_growth_dat(&rows, &mut w)?;
            w.flush()?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Oracle {
            input,
            dim_b,
            dim_c,
            max_side,
        } => {
            let a = read_matrix(&input)?;
            let splits = match (dim_b, dim_c) {
                (Some(b), Some(c)) => vec![(b, c)],
                _ => divisor_splits(a.n()),
            };
            let mut rows = Vec::new();
            for (n1, n2) in splits {
                let v = brute_force_factorize_guarded(&a, n1, n2, max_side)?;
                let witnesses: Vec<_> = v
                    .witnesses
                    .iter()
                    .map(|w| json!({ "p": w.p, "b": w.b, "c": w.c }))
                    .collect();
                rows.push(json!({ "n1": n1, "n2": n2, "composite": v.composite, "witnesses": witnesses }));
            }
            write_json(None, &serde_json::Value::Array(rows))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
