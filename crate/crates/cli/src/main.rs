use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use outlier_lab::experiments::{
    run_claims_table, run_pn_figure, run_ptd_demo, run_randomsum_demo, ClaimsConfig, ExperimentResult, PnFigureConfig,
    PtdConfig, RandomSumDemoConfig, SurfaceConfig,
};
use serde_json::{Map, Value};

#[derive(Debug, Parser)]
#[command(name = "outlier-lab", version, about = "Outlier probability experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Monte Carlo replicates per estimate
    #[arg(long, global = true, default_value_t = 300, value_parser = clap::value_parser!(u64).range(2..))]
    m: u64,

    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Outlier threshold in standard deviations (default: the experiment's own)
    #[arg(long, global = true)]
    k: Option<f64>,

    #[arg(long, global = true, default_value = "results")]
    out_dir: PathBuf,

    #[arg(long, global = true, value_enum, default_value_t = Format::CsvSvg)]
    format: Format,

    /// Worker threads, or "auto"
    #[arg(long, global = true, default_value = "auto", value_parser = parse_threads)]
    threads: Threads,

    /// Cells per axis of the fig3 surface
    #[arg(long, global = true, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    grid: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
enum Command {
    /// Stable alpha=1.2 vs Gaussian p_n, k=3
    Fig1,
    /// Stable alpha=1.8 vs Gaussian p_n, k=2.5
    Fig2,
    /// Tempered stable limit probability surface
    Fig3,
    /// Headline numbers vs reference constants (k is fixed at 3)
    Claims,
    /// Put-tail-down transform checks
    Ptd,
    /// Random-sum convergence checks
    Randomsums,
    /// Everything above
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    #[value(name = "csv+svg")]
    CsvSvg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Threads {
    Auto,
    Fixed(usize),
}

fn parse_threads(s: &str) -> std::result::Result<Threads, String> {
    if s == "auto" {
        return Ok(Threads::Auto);
    }
    match s.parse::<usize>() {
        Ok(n) if n > 0 => Ok(Threads::Fixed(n)),
        _ => Err(format!("expected a positive integer or \"auto\", got {s:?}")),
    }
}

fn run_one(cli: &Cli, command: Command) -> Result<ExperimentResult> {
    let m = cli.m as usize;
    let seed = cli.seed;
    let with_k = |cfg: PnFigureConfig| match cli.k {
        Some(k) => cfg.with_k(k),
        None => cfg,
    };
    let result = match command {
        Command::Fig1 => run_pn_figure(&with_k(PnFigureConfig::figure1(m, seed)))?,
        Command::Fig2 => run_pn_figure(&with_k(PnFigureConfig::figure2(m, seed)))?,
        Command::Fig3 => outlier_lab::experiments::run_figure3(&SurfaceConfig::figure3(
            cli.grid as usize,
            cli.k.unwrap_or(3.0),
            seed,
        ))?,
        Command::Claims => {
            if cli.k.is_some() {
                eprintln!("note: claims always uses k=3");
            }
            run_claims_table(&ClaimsConfig::new(m, seed))?
        }
        Command::Ptd => {
            let mut cfg = PtdConfig::new(seed);
            cfg.k = cli.k.unwrap_or(cfg.k);
            run_ptd_demo(&cfg)?
        }
        Command::Randomsums => {
            let mut cfg = RandomSumDemoConfig::new(seed);
            cfg.k = cli.k.unwrap_or(cfg.k);
            run_randomsum_demo(&cfg)?
        }
        Command::All => unreachable!("expanded by the caller"),
    };
    Ok(result)
}

fn write_artifacts(dir: &Path, format: Format, result: &ExperimentResult) -> Result<()> {
    let csv = dir.join(format!("{}.csv", result.experiment_id));
    fs::write(&csv, result.to_csv()).with_context(|| format!("writing {}", csv.display()))?;
    if format == Format::CsvSvg {
        let svg = dir.join(format!("{}.svg", result.experiment_id));
        fs::write(&svg, result.to_svg()).with_context(|| format!("writing {}", svg.display()))?;
    }
    Ok(())
}

fn summarize(cli: &Cli, results: &[ExperimentResult]) -> Value {
    let mut map = Map::new();
    map.insert("seed".into(), cli.seed.into());
    map.insert("m".into(), cli.m.into());
    for r in results {
        let id = &r.experiment_id;
        for (key, value) in &r.parameters {
            map.insert(format!("{id}.param.{key}"), value.clone().into());
        }
        for c in &r.checks {
            map.insert(format!("{id}.{}", c.name), c.status().into());
            let value = serde_json::Number::from_f64(c.value).map_or(Value::Null, Value::Number);
            map.insert(format!("{id}.{}.value", c.name), value);
        }
        map.insert(format!("{id}.passed"), r.all_passed().into());
    }
    map.insert("all_passed".into(), results.iter().all(|r| r.all_passed()).into());
    Value::Object(map)
}

fn run(cli: &Cli) -> Result<bool> {
    if let Threads::Fixed(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the worker pool")?;
    }
    if cli.k.is_some_and(|k| !(k.is_finite() && k > 0.0)) {
        bail!("--k must be a positive number");
    }
    fs::create_dir_all(&cli.out_dir).with_context(|| format!("creating {}", cli.out_dir.display()))?;
    let commands = match cli.command {
        Command::All => vec![
            Command::Fig1,
            Command::Fig2,
            Command::Fig3,
            Command::Claims,
            Command::Ptd,
            Command::Randomsums,
        ],
        c => vec![c],
    };
    let mut results = Vec::new();
    for command in commands {
        let result = run_one(cli, command)?;
        write_artifacts(&cli.out_dir, cli.format, &result)?;
        println!(
            "{} ({:.1} s)",
            result.experiment_id,
            result.provenance.runtime.as_secs_f64()
        );
        for c in &result.checks {
            println!("  {:4} {} = {} [{}, {}]", c.status(), c.name, c.value, c.lower, c.upper);
        }
        results.push(result);
    }
    let summary = cli.out_dir.join("summary.json");
    let text = serde_json::to_string_pretty(&summarize(cli, &results))? + "\n";
    fs::write(&summary, text).with_context(|| format!("writing {}", summary.display()))?;
    Ok(results.iter().all(|r| r.all_passed()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
