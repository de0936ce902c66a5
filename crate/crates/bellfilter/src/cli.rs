//! Command-line interface.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use bellfilter_core::measures::measure_state;
use bellfilter_core::normal_form::optimal_filters;
use bellfilter_core::pipeline::{compare_to_published, run_experiment, Form, Mode};
use bellfilter_core::tomography::{
    mle_reconstruct, simulate_counts, MeasurementRecord, DEFAULT_MAX_ITER, DEFAULT_TOL,
};
use bellfilter_core::{Classification, DensityMatrix, ExperimentConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::formats::{self, Matrix2Json, MatrixJson};
use crate::report::{self, ComparisonJson, Format, ReportJson, SettingsJson};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "bellfilter",
    version,
    about = "Optimal local-filtering distillation of two-qubit states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the dephased input state of form 1 or 2 to a state file.
    Prepare {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Optimal filters and the distilled state for a state file.
    Distill {
        #[arg(long)]
        state: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Concurrence, entanglement of formation and maximal CHSH value.
    Measure {
        #[arg(long)]
        state: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Simulate tomography counts from a state, or reconstruct a state from counts.
    Tomo {
        #[arg(long, conflicts_with = "counts", required_unless_present = "counts")]
        state: Option<PathBuf>,
        #[arg(long)]
        counts: Option<PathBuf>,
        /// Expected pairs per analysis setting.
        #[arg(long, default_value_t = 1e4)]
        budget: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full experiment: prepare, filter, measure.
    Run {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value_t = ModeArg::Ideal)]
        mode: ModeArg,
        #[arg(long, default_value_t = 1e4)]
        budget: f64,
        /// Bootstrap resamples in tomographic mode (0 disables error bars).
        #[arg(long, default_value_t = 100)]
        bootstrap: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Append the table of published values (published parameter sets only).
        #[arg(long)]
        compare: bool,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Ideal,
    Tomo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Table,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Table => Format::Table,
        }
    }
}

#[derive(Debug, Args)]
pub struct Source {
    #[arg(
        long,
        value_enum,
        conflicts_with = "state",
        required_unless_present = "state"
    )]
    pub form: Option<FormArg>,
    /// Amplitude of |HH⟩; b = sqrt(1 - a²).
    #[arg(long, requires = "form")]
    pub a: Option<f64>,
    /// Dephasing probability.
    #[arg(long, requires = "form")]
    pub p: Option<f64>,
    /// Custom input state file.
    #[arg(long)]
    pub state: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Output {
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    pub format: FormatArg,
}

impl Source {
    fn config(&self) -> Result<ExperimentConfig> {
        if let Some(path) = &self.state {
            let rho = formats::read_state(path)?;
            return Ok(ExperimentConfig::custom(
                rho,
                Some(path.display().to_string()),
            ));
        }
        let (a, p) = match (self.a, self.p) {
            (Some(a), Some(p)) => (a, p),
            _ => return Err(Error::Usage("--form needs both --a and --p".into())),
        };
        let cfg = match self.form {
            Some(FormArg::One) => ExperimentConfig::form1(a, p),
            Some(FormArg::Two) => ExperimentConfig::form2(a, p),
            None => return Err(Error::Usage("either --form or --state is required".into())),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Error::io(path, e)),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

#[derive(Debug, Serialize)]
struct DistillJson {
    schema_version: u32,
    classification: String,
    alice_filter: Option<Matrix2Json>,
    bob_filter: Option<Matrix2Json>,
    success_probability: f64,
    state: MatrixJson,
}

#[derive(Debug, Serialize)]
struct MeasureJson {
    schema_version: u32,
    concurrence: f64,
    eof: f64,
    s: f64,
    settings: SettingsJson,
}

fn distill(rho: &DensityMatrix, output: &Output) -> Result<()> {
    let nf = optimal_filters(rho)?;
    let filtered = nf.classification == Classification::BellDiagonalizable;
    let body = DistillJson {
        schema_version: report::SCHEMA_VERSION,
        classification: report::classification_label(nf.classification).to_string(),
        alice_filter: filtered.then(|| formats::matrix2_to_json(nf.filter_a.matrix())),
        bob_filter: filtered.then(|| formats::matrix2_to_json(nf.filter_b.matrix())),
        success_probability: nf.probability,
        state: formats::matrix_to_json(nf.state.matrix()),
    };
    let text = match Format::from(output.format) {
        Format::Json => to_json(&body)?,
        Format::Table => {
            let mut s = format!("classification: {}\n", body.classification);
            if let (Some(a), Some(b)) = (&body.alice_filter, &body.bob_filter) {
                s += &format!(
                    "alice filter: {}\nbob filter:   {}\n",
                    report::matrix2_text(a),
                    report::matrix2_text(b)
                );
            }
            s += &format!("success probability: {:.6}\n", body.success_probability);
            s += &format!(
                "distilled state:\n{}\n",
                formats::state_to_string(&nf.state)?
            );
            s
        }
    };
    emit(output.out.as_deref(), &text)
}

fn measure(rho: &DensityMatrix, output: &Output) -> Result<()> {
    let m = measure_state(rho);
    let body = MeasureJson {
        schema_version: report::SCHEMA_VERSION,
        concurrence: m.concurrence,
        eof: m.eof,
        s: m.s_value,
        settings: report::settings_json(&m.settings),
    };
    let text = match Format::from(output.format) {
        Format::Json => to_json(&body)?,
        Format::Table => {
            let mut s = format!(
                "concurrence {:.6}\nentanglement of formation {:.6}\nS {:.6}\n",
                body.concurrence, body.eof, body.s
            );
            for (name, d) in [
                ("a1", &body.settings.a1),
                ("a2", &body.settings.a2),
                ("b1", &body.settings.b1),
                ("b2", &body.settings.b2),
            ] {
                s += &format!(
                    "{name}: bloch ({:+.4}, {:+.4}, {:+.4})  qwp {:.2}°  hwp {:.2}°\n",
                    d.bloch[0], d.bloch[1], d.bloch[2], d.qwp_deg, d.hwp_deg
                );
            }
            s
        }
    };
    emit(output.out.as_deref(), &text)
}

fn tomo(
    state: Option<&Path>,
    counts: Option<&Path>,
    budget: f64,
    seed: u64,
    out: Option<&Path>,
) -> Result<()> {
    match (state, counts) {
        (Some(path), _) => {
            let rho = formats::read_state(path)?;
            let rec = simulate_counts(&rho, budget, seed)?;
            let mut buf = Vec::new();
            formats::write_counts(&mut buf, &rec)?;
            emit(out, &String::from_utf8_lossy(&buf))
        }
        (None, Some(path)) => {
            let counts = formats::read_counts_file(path)?;
            let rec = MeasurementRecord::new(&counts, budget, seed)?;
            let res = mle_reconstruct(&rec, DEFAULT_TOL, DEFAULT_MAX_ITER)?;
            if !res.converged {
                eprintln!(
                    "warning: reconstruction stopped after {} iterations",
                    res.iterations
                );
            }
            emit(out, &(formats::state_to_string(&res.state)? + "\n"))
        }
        (None, None) => Err(Error::Usage("tomo needs --state or --counts".into())),
    }
}

pub fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Prepare { source, out } => {
            if source.state.is_some() {
                return Err(Error::Usage("prepare takes --form, not --state".into()));
            }
            let rho = source.config()?.input_state()?;
            emit(out.as_deref(), &(formats::state_to_string(&rho)? + "\n"))
        }
        Command::Distill { state, output } => distill(&formats::read_state(state)?, output),
        Command::Measure { state, output } => measure(&formats::read_state(state)?, output),
        Command::Tomo {
            state,
            counts,
            budget,
            seed,
            out,
        } => tomo(
            state.as_deref(),
            counts.as_deref(),
            *budget,
            *seed,
            out.as_deref(),
        ),
        Command::Run {
            source,
            mode,
            budget,
            bootstrap,
            seed,
            compare,
            output,
        } => {
            let mut cfg = source.config()?;
            cfg.seed = *seed;
            cfg.budget = *budget;
            cfg.bootstrap_resamples = *bootstrap;
            if *mode == ModeArg::Tomo {
                cfg.mode = Mode::SimulatedTomography;
            }
            cfg.validate()?;
            let r = run_experiment(&cfg)?;
            let mut json = ReportJson::new(&r);
            if *compare {
                if cfg.form == Form::Custom {
                    return Err(Error::Usage("--compare needs --form".into()));
                }
                let cmp: ComparisonJson = report::comparison_json(&compare_to_published(&r)?);
                json.comparison = Some(cmp);
            }
            emit(output.out.as_deref(), &json.render(output.format.into())?)
        }
    }
}

/// Parses arguments, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
