use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::{self, Context, Outcome};
use crate::config::RunConfig;
use crate::error::{CliError, EXIT_CONFIG};

#[derive(Debug, Parser)]
#[command(name = "kitaev", version, about = "Sub-geometric phase engine for driven Kitaev honeycomb flip configurations")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Flat TOML run configuration.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Override one configuration key; repeatable, applied in order.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE", value_parser = parse_key_value)]
    pub set: Vec<(String, String)>,

    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    #[arg(long, global = true)]
    pub nx: Option<usize>,
    #[arg(long, global = true)]
    pub ny: Option<usize>,
    /// Drive amplitude D.
    #[arg(long = "d", global = true, value_name = "D")]
    pub amplitude: Option<f64>,
    #[arg(long, global = true)]
    pub omega: Option<f64>,
    /// `label` or `hilbert`.
    #[arg(long, global = true)]
    pub engine: Option<String>,
    /// Initial configuration as a hex bitmask.
    #[arg(long, global = true)]
    pub initial: Option<String>,
    #[arg(long, global = true)]
    pub plaquette: Option<usize>,
    #[arg(long = "t-max", global = true)]
    pub t_max: Option<f64>,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long, global = true)]
    pub kt: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads for sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,

    /// Write a matplotlib script next to each plottable data file.
    #[arg(long, global = true)]
    pub emit_plot_script: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dump and validate the torus geometry.
    Lattice,
    /// Enumerate weight classes and the energy table.
    Manifold {
        /// Report class sizes for N plaquettes without building a lattice.
        #[arg(long)]
        n: Option<usize>,
    },
    /// First-order coefficient series.
    Evolve,
    /// Phase decomposition, stability intervals and effective levels.
    Phase,
    /// Final transition probability against drive frequency.
    Sweep,
    /// Sublattice entanglement entropy over time.
    Entropy,
    /// Spin correlations from the coefficient formula and exact evolution.
    Correlate,
    /// Weighted mixture of evolved states.
    Thermal,
    /// Property and oracle suite.
    Validate,
}

fn parse_key_value(s: &str) -> Result<(String, String), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected KEY=VALUE, got {s:?}"))?;
    let k = k.trim();
    if k.is_empty() {
        return Err("empty key".into());
    }
    Ok((k.to_string(), v.trim().to_string()))
}

impl GlobalArgs {
    /// `--set` pairs followed by the dedicated flags, so flags win.
    fn overrides(&self) -> Vec<(String, String)> {
        let mut out = self.set.clone();
        let quote = |s: &str| format!("{s:?}");
        let mut push = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                out.push((k.to_string(), v));
            }
        };
        push("nx", self.nx.map(|v| v.to_string()));
        push("ny", self.ny.map(|v| v.to_string()));
        push("d", self.amplitude.map(float));
        push("omega", self.omega.map(float));
        push("engine", self.engine.as_deref().map(quote));
        push("initial", self.initial.as_deref().map(quote));
        push("plaquette", self.plaquette.map(|v| v.to_string()));
        push("t_max", self.t_max.map(float));
        push("samples", self.samples.map(|v| v.to_string()));
        push("kt", self.kt.map(float));
        push("seed", self.seed.map(|v| v.to_string()));
        push("output", self.out.as_ref().map(|p| quote(&p.display().to_string())));
        out
    }
}

/// TOML float literal.
fn float(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:?}")
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    if let Command::Manifold { n: Some(n) } = cli.command {
        return commands::manifold::counting_report(n);
    }
    let cfg = RunConfig::load(cli.global.config.as_deref(), &cli.global.overrides())?;
    let ctx = Context { cfg, emit_plot_script: cli.global.emit_plot_script, jobs: cli.global.jobs.max(1) };
    match cli.command {
        Command::Lattice => commands::lattice::run(&ctx),
        Command::Manifold { .. } => commands::manifold::run(&ctx),
        Command::Evolve => commands::evolve::run(&ctx),
        Command::Phase => commands::evolve::run_phase(&ctx),
        Command::Sweep => commands::sweep::run(&ctx),
        Command::Entropy => commands::entropy::run(&ctx),
        Command::Correlate => commands::correlate::run(&ctx),
        Command::Thermal => commands::thermal::run(&ctx),
        Command::Validate => commands::validate::run(&ctx),
    }
}

/// Runs one invocation, writing reports to `stdout` and failures to `stderr`.
/// Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut impl Write, stderr: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    let err = CliError::Config(e.kind().to_string());
                    let _ = writeln!(stderr, "{}", err.to_json());
                    EXIT_CONFIG
                }
            };
        }
    };
    match dispatch(&cli) {
        Ok(outcome) => {
            for line in &outcome.lines {
                let _ = writeln!(stdout, "{line}");
            }
            for f in &outcome.files {
                let _ = writeln!(stdout, "wrote {}", f.display());
            }
            if outcome.failed.is_empty() {
                0
            } else {
                let err = CliError::ChecksFailed(outcome.failed);
                let _ = writeln!(stderr, "{}", err.to_json());
                err.exit_code()
            }
        }
        Err(err) => {
            let _ = writeln!(stderr, "error: {err}");
            let _ = writeln!(stderr, "{}", err.to_json());
            err.exit_code()
        }
    }
}
