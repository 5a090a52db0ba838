use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use edgeflip::activation::path_prefactor;
use edgeflip::{enumerate_paths, predict_fixed_arbitrary, predict_fixed_complete, PhaseTypeDist};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{ExpError, Result};
use crate::oracle::run_oracle_suite;
use crate::output::write_outputs;
use crate::report::compare_theory;
use crate::sweep::run_sweep;

#[derive(Debug, Parser)]
#[command(name = "edgeflip", version, about = "Transition times of queue-based random access on dynamic bipartite graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a sweep over the r grid and write CSV and JSON outputs.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Worker threads; defaults to the available parallelism.
        #[arg(long)]
        workers: Option<usize>,
        /// Output directory; overrides `output_dir` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Master seed; overrides `seed` in the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List admissible activation paths with d*, regime and predictions.
    Paths {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Write to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate survival and density of the disconnection time.
    Pht {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long)]
        x_max: Option<f64>,
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a config file without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Brute-force checks on small random graphs.
    Oracle {
        #[arg(long, default_value_t = 200)]
        graphs: usize,
        #[arg(long, default_value_t = 6)]
        max_size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(std::fs::File::create(path)?),
        None => Box::new(io::stdout().lock()),
    })
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, workers, out, seed } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            let workers = workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let dir = out.or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
            let sweep = run_sweep(&cfg, workers)?;
            let report = compare_theory(&sweep);
            for flag in &report.flags {
                log::warn!("{flag}");
            }
            let files = write_outputs(&dir, &sweep, &report)?;
            let mut stdout = io::stdout().lock();
            writeln!(stdout, "d* = {}, regime {:?}, case {:?}", report.d_star, report.regime, report.case)?;
            for row in &report.rows {
                writeln!(
                    stdout,
                    "r = {:<10} mean = {:<12.6} se = {:<10.4} predicted = {:<12.6} ratio = {:.4}",
                    row.r, row.mean, row.std_err, row.predicted, row.ratio
                )?;
            }
            if let Some(fit) = report.fit {
                writeln!(
                    stdout,
                    "fitted exponent {:.4} [{:.4}, {:.4}], predicted {}",
                    fit.slope, fit.ci.0, fit.ci.1, report.predicted_exponent
                )?;
            }
            for f in files {
                writeln!(stdout, "wrote {}", f.display())?;
            }
            Ok(())
        }
        Command::Paths { config, format, out } => paths(&ExperimentConfig::load(&config)?, format, out.as_deref()),
        Command::Pht { m, d, lambda, x_max, points, out } => pht(m, d, lambda, x_max, points, out.as_deref()),
        Command::Validate { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let g = cfg.graph.build()?;
            println!(
                "ok: {}x{} graph with {} edges, {} r values, {} replications each",
                g.m(),
                g.n(),
                g.edge_count(),
                cfg.r_grid.len(),
                cfg.replications
            );
            Ok(())
        }
        Command::Oracle { graphs, max_size, seed } => {
            if !(1..=8).contains(&max_size) {
                return Err(ExpError::Config("--max-size must be between 1 and 8".into()));
            }
            let rep = run_oracle_suite(graphs, max_size, seed)?;
            println!("{}", serde_json::to_string_pretty(&rep)?);
            if rep.passed() {
                Ok(())
            } else {
                Err(ExpError::Data(format!("{} oracle checks failed", rep.failures.len())))
            }
        }
    }
}

#[derive(Serialize)]
struct PathRow {
    path: usize,
    order: String,
    d_bars: String,
    n_k: String,
    probability: String,
    d_star: usize,
    prefactor: f64,
}

#[derive(Serialize)]
struct PathsJson<'a> {
    d_star: usize,
    regime: edgeflip::Regime,
    r: f64,
    paths: &'a [PathRow],
    path_weighted: edgeflip::RegimePrediction,
    complete_graph: Option<edgeflip::RegimePrediction>,
}

fn join<T: ToString>(xs: impl IntoIterator<Item = T>) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn paths(cfg: &ExperimentConfig, format: Format, out: Option<&Path>) -> Result<()> {
    let g = cfg.graph.build()?;
    let all = enumerate_paths(&g)?;
    let r = *cfg.r_grid.last().expect("validated grid");
    let qp = cfg.queues.at(r);
    let pred = predict_fixed_arbitrary(&all, cfg.rates.beta, &qp)?;
    let rows: Vec<PathRow> = all
        .iter()
        .enumerate()
        .map(|(i, p)| PathRow {
            path: i,
            order: join(p.order()),
            d_bars: join(p.d_bars()),
            n_k: join(p.steps.iter().map(|s| s.n_k)),
            probability: format!("1/{}", p.probability_denominator),
            d_star: p.d_star,
            prefactor: path_prefactor(p),
        })
        .collect();
    let mut w = sink(out)?;
    match format {
        Format::Csv => {
            let mut csv = csv::Writer::from_writer(w);
            for row in &rows {
                csv.serialize(row)?;
            }
            csv.flush()?;
        }
        Format::Json => {
            let complete = (g.m() > 0 && g.edge_count() == g.m() * g.n())
                .then(|| predict_fixed_complete(g.m(), cfg.rates.beta, &qp))
                .transpose()?;
            let doc = PathsJson {
                d_star: all[0].d_star,
                regime: pred.weighted.regime,
                r,
                paths: &rows,
                path_weighted: pred.weighted,
                complete_graph: complete,
            };
            serde_json::to_writer_pretty(&mut w, &doc)?;
            writeln!(w)?;
        }
    }
    Ok(())
}

fn pht(m: usize, d: usize, lambda: f64, x_max: Option<f64>, points: usize, out: Option<&Path>) -> Result<()> {
    let ph = PhaseTypeDist::disconnection(m, d, lambda).map_err(|e| ExpError::Config(e.to_string()))?;
    if points < 2 {
        return Err(ExpError::Config("--points must be at least 2".into()));
    }
    let x_max = x_max.unwrap_or(5.0 * ph.mean());
    if !(x_max > 0.0) {
        return Err(ExpError::Config("--x-max must be positive".into()));
    }
    let mut csv = csv::Writer::from_writer(sink(out)?);
    csv.write_record(["x", "survival", "density", "cdf"])?;
    for i in 0..points {
        let x = x_max * i as f64 / (points - 1) as f64;
        let (s, f) = ph.evaluate(x)?;
        csv.write_record([x.to_string(), s.to_string(), f.to_string(), (1.0 - s).to_string()])?;
    }
    csv.flush()?;
    Ok(())
}
