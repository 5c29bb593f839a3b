use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{CommandFactory, FromArgMatches, Parser};

use fwbesov_cli::commands;
use fwbesov_cli::config::{help_text, read_file, Command, RunConfig};
use fwbesov_cli::report::{write_all, ExperimentReport, Timings};

/// Fornberg-Whitham experiments with Besov-norm diagnostics.
#[derive(Parser, Debug)]
#[command(name = "fwbesov", version)]
struct Cli {
    command: Command,
    /// Flat `key = value` configuration file.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long = "N")]
    n: Option<String>,
    #[arg(long = "L")]
    l: Option<String>,
    #[arg(long)]
    dt: Option<String>,
    #[arg(long = "t_end", alias = "t-end", allow_hyphen_values = true)]
    t_end: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    s: Option<String>,
    #[arg(long)]
    r: Option<String>,
    #[arg(long = "n_list", alias = "n-list")]
    n_list: Option<String>,
    #[arg(long = "K")]
    k: Option<String>,
    #[arg(long = "C_star", alias = "C-star")]
    c_star: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    initial: Option<String>,
    #[arg(long)]
    amplitude: Option<String>,
    #[arg(long)]
    kmax: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    count: Option<String>,
    #[arg(long = "A", allow_hyphen_values = true)]
    a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    #[arg(long)]
    iterations: Option<String>,
    #[arg(long)]
    formats: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Cli {
    fn flags(&self) -> BTreeMap<String, String> {
        let pairs = [
            ("N", &self.n),
            ("L", &self.l),
            ("dt", &self.dt),
            ("t_end", &self.t_end),
            ("s", &self.s),
            ("r", &self.r),
            ("n_list", &self.n_list),
            ("K", &self.k),
            ("C_star", &self.c_star),
            ("initial", &self.initial),
            ("amplitude", &self.amplitude),
            ("kmax", &self.kmax),
            ("seed", &self.seed),
            ("count", &self.count),
            ("A", &self.a),
            ("c", &self.c),
            ("iterations", &self.iterations),
            ("formats", &self.formats),
        ];
        let mut map: BTreeMap<String, String> = pairs
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
            .collect();
        if let Some(out) = &self.out {
            map.insert("out".into(), out.display().to_string());
        }
        map
    }
}

fn main() -> ExitCode {
    let matches = match Cli::command().after_long_help(help_text()).try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

/// Returns whether every verdict passed.
fn run(cli: &Cli) -> anyhow::Result<bool> {
    let file = match &cli.config {
        Some(p) => read_file(p)?,
        None => BTreeMap::new(),
    };
    let env_out = std::env::var("FWBESOV_OUT").ok().filter(|s| !s.is_empty());
    let cfg = RunConfig::resolve(cli.command, &file, &cli.flags(), env_out)?;

    let started = Instant::now();
    let outcome = commands::run(&cfg)?;
    let report = ExperimentReport {
        config: cfg.echo(),
        measurements: &outcome.measurements,
        fits: &outcome.fits,
        verdicts: &outcome.verdicts,
        timings: Timings {
            compute_seconds: started.elapsed().as_secs_f64(),
        },
        version: env!("CARGO_PKG_VERSION").to_string(),
    };
    write_all(&cfg.out, &report, &outcome, cfg.formats.csv, cfg.formats.plot)?;
    for v in &outcome.verdicts {
        println!("{:<32} {:>12.6e} {}", v.name, v.value, if v.pass { "PASS" } else { "FAIL" });
    }
    println!("report written to {}", cfg.out.join("report.json").display());
    Ok(outcome.all_pass())
}
