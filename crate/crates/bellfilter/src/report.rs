//! Machine-readable (JSON) and human-readable (table) distillation reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use bellfilter_core::measures::waveplate_angles;
use bellfilter_core::pipeline::{Comparison, Form, MeasureErrors, Mode, TomographyStats};
use bellfilter_core::tomography::BootstrapSummary;
use bellfilter_core::{ChshSettings, Classification, DistillationReport, LocalOp, MeasureSet};
use serde::{Deserialize, Serialize};

use crate::formats::{matrix2_to_json, matrix_to_json, Matrix2Json, MatrixJson};
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigJson {
    pub form: String,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub p: Option<f64>,
    pub mode: String,
    pub budget: Option<f64>,
    pub bootstrap_resamples: Option<usize>,
    pub seed: u64,
    pub state_path: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiltersJson {
    pub alice: Matrix2Json,
    pub bob: Matrix2Json,
}

/// A measurement direction with the wave-plate angles (degrees) that select it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionJson {
    pub bloch: [f64; 3],
    pub qwp_deg: f64,
    pub hwp_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettingsJson {
    pub a1: DirectionJson,
    pub a2: DirectionJson,
    pub b1: DirectionJson,
    pub b2: DirectionJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryJson {
    pub mean: f64,
    pub std: f64,
    pub resamples: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorsJson {
    pub concurrence: SummaryJson,
    pub eof: SummaryJson,
    pub s: SummaryJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TomographyJson {
    pub counts: Vec<u64>,
    pub nll: f64,
    pub start_nll: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedsJson {
    pub master: u64,
    pub counts_before: u64,
    pub counts_after: u64,
    pub bootstrap_before: u64,
    pub bootstrap_after: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRowJson {
    pub quantity: String,
    pub ideal: f64,
    pub this_run: f64,
    pub published: Option<f64>,
    pub published_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonJson {
    pub rows: Vec<ComparisonRowJson>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub schema_version: u32,
    pub tool_version: String,
    pub config: ConfigJson,
    pub classification: String,
    pub rho_before: MatrixJson,
    pub rho_after: MatrixJson,
    pub filters: Option<FiltersJson>,
    pub success_probability: f64,
    pub concurrence_before: f64,
    pub concurrence_after: f64,
    pub eof_before: f64,
    pub eof_after: f64,
    pub s_before: f64,
    pub s_after: f64,
    pub s_before_at_after_settings: f64,
    pub settings_before: SettingsJson,
    pub settings_after: SettingsJson,
    pub errors_before: Option<ErrorsJson>,
    pub errors_after: Option<ErrorsJson>,
    pub tomography_before: Option<TomographyJson>,
    pub tomography_after: Option<TomographyJson>,
    pub fidelity_before: f64,
    pub fidelity_after: f64,
    pub fidelity_before_root: f64,
    pub fidelity_after_root: f64,
    pub seeds: SeedsJson,
    pub notes: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparison: Option<ComparisonJson>,
}

pub fn form_label(form: Form) -> &'static str {
    match form {
        Form::Form1 => "1",
        Form::Form2 => "2",
        Form::Custom => "custom",
    }
}

pub fn classification_label(c: Classification) -> &'static str {
    match c {
        Classification::BellDiagonalizable => "bell_diagonalizable",
        Classification::QuasiDistillable => "quasi_distillable",
        Classification::Degenerate => "degenerate",
    }
}

fn direction(n: &[f64; 3]) -> DirectionJson {
    let (qwp_deg, hwp_deg) = waveplate_angles(n);
    DirectionJson {
        bloch: *n,
        qwp_deg,
        hwp_deg,
    }
}

pub fn settings_json(s: &ChshSettings) -> SettingsJson {
    SettingsJson {
        a1: direction(&s.a1),
        a2: direction(&s.a2),
        b1: direction(&s.b1),
        b2: direction(&s.b2),
    }
}

fn summary(s: &BootstrapSummary) -> SummaryJson {
    SummaryJson {
        mean: s.mean,
        std: s.std,
        resamples: s.resamples,
        failures: s.failures,
    }
}

fn errors(e: &MeasureErrors) -> ErrorsJson {
    ErrorsJson {
        concurrence: summary(&e.concurrence),
        eof: summary(&e.eof),
        s: summary(&e.s_value),
    }
}

fn tomography(t: &TomographyStats) -> TomographyJson {
    TomographyJson {
        counts: t.counts.to_vec(),
        nll: t.nll,
        start_nll: t.start_nll,
        iterations: t.iterations,
        converged: t.converged,
    }
}

pub fn filters_json(filters: &(LocalOp, LocalOp)) -> FiltersJson {
    FiltersJson {
        alice: matrix2_to_json(filters.0.matrix()),
        bob: matrix2_to_json(filters.1.matrix()),
    }
}

pub fn comparison_json(c: &Comparison) -> ComparisonJson {
    ComparisonJson {
        rows: c
            .rows
            .iter()
            .map(|r| ComparisonRowJson {
                quantity: r.quantity.to_string(),
                ideal: r.ideal,
                this_run: r.this_run,
                published: r.published.map(|p| p.value),
                published_error: r.published.and_then(|p| p.error),
            })
            .collect(),
        note: c.note.to_string(),
    }
}

impl ReportJson {
    pub fn new(r: &DistillationReport) -> Self {
        let cfg = &r.config;
        let parametric = cfg.form != Form::Custom;
        let tomo = cfg.mode == Mode::SimulatedTomography;
        let (mb, ma): (&MeasureSet, &MeasureSet) = (&r.measures_before, &r.measures_after);
        ReportJson {
            schema_version: SCHEMA_VERSION,
            tool_version: r.version.to_string(),
            config: ConfigJson {
                form: form_label(cfg.form).to_string(),
                a: parametric.then_some(cfg.a),
                b: parametric.then(|| cfg.b()),
                p: parametric.then_some(cfg.p),
                mode: if tomo { "tomo" } else { "ideal" }.to_string(),
                budget: tomo.then_some(cfg.budget),
                bootstrap_resamples: tomo.then_some(cfg.bootstrap_resamples),
                seed: cfg.seed,
                state_path: cfg.custom_state_path.clone(),
            },
            classification: classification_label(r.classification).to_string(),
            rho_before: matrix_to_json(r.rho_before.matrix()),
            rho_after: matrix_to_json(r.rho_after.matrix()),
            filters: r.filters.as_ref().map(filters_json),
            success_probability: r.success_probability,
            concurrence_before: mb.concurrence,
            concurrence_after: ma.concurrence,
            eof_before: mb.eof,
            eof_after: ma.eof,
            s_before: mb.s_value,
            s_after: ma.s_value,
            s_before_at_after_settings: r.s_before_at_after_settings,
            settings_before: settings_json(&mb.settings),
            settings_after: settings_json(&ma.settings),
            errors_before: r.errors_before.as_ref().map(errors),
            errors_after: r.errors_after.as_ref().map(errors),
            tomography_before: r.tomography_before.as_ref().map(tomography),
            tomography_after: r.tomography_after.as_ref().map(tomography),
            fidelity_before: r.fidelity_before,
            fidelity_after: r.fidelity_after,
            fidelity_before_root: r.fidelity_before.sqrt(),
            fidelity_after_root: r.fidelity_after.sqrt(),
            seeds: SeedsJson {
                master: r.seeds.master,
                counts_before: r.seeds.counts_before,
                counts_after: r.seeds.counts_after,
                bootstrap_before: r.seeds.bootstrap_before,
                bootstrap_after: r.seeds.bootstrap_after,
            },
            notes: r
                .notes
                .iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .chain([(
                    "error_bars".to_string(),
                    "parametric Poisson bootstrap, sample standard deviation".to_string(),
                )])
                .collect(),
            comparison: None,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let report: ReportJson = serde_json::from_str(text)?;
        if report.schema_version != SCHEMA_VERSION {
            return Err(Error::Format(format!(
                "unsupported report schema version {}",
                report.schema_version
            )));
        }
        Ok(report)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => Ok(self.to_json()? + "\n"),
            Format::Table => Ok(self.table()),
        }
    }

    /// Before/after table.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let c = &self.config;
        let _ = write!(out, "form {}  mode {}", c.form, c.mode);
        if let (Some(a), Some(b), Some(p)) = (c.a, c.b, c.p) {
            let _ = write!(out, "  a = {a}  b = {b:.6}  p = {p}");
        }
        if let Some(path) = &c.state_path {
            let _ = write!(out, "  state {path}");
        }
        let _ = writeln!(out, "\nclassification: {}", self.classification);

        let with_error = |v: f64, e: Option<&SummaryJson>| match e {
            Some(e) => format!("{v:.4} ± {:.4}", e.std),
            None => format!("{v:.4}"),
        };
        let (eb, ea) = (self.errors_before.as_ref(), self.errors_after.as_ref());
        let rows = [
            (
                "concurrence",
                with_error(self.concurrence_before, eb.map(|e| &e.concurrence)),
                with_error(self.concurrence_after, ea.map(|e| &e.concurrence)),
            ),
            (
                "entanglement of formation",
                with_error(self.eof_before, eb.map(|e| &e.eof)),
                with_error(self.eof_after, ea.map(|e| &e.eof)),
            ),
            (
                "S (optimal settings)",
                with_error(self.s_before, eb.map(|e| &e.s)),
                with_error(self.s_after, ea.map(|e| &e.s)),
            ),
            (
                "S (after-state settings)",
                format!("{:.4}", self.s_before_at_after_settings),
                format!("{:.4}", self.s_after),
            ),
            (
                "fidelity to exact state",
                format!("{:.4}", self.fidelity_before),
                format!("{:.4}", self.fidelity_after),
            ),
        ];
        let _ = writeln!(out, "\n{:<28}{:>18}{:>18}", "", "before", "after");
        for (name, before, after) in rows {
            let _ = writeln!(out, "{name:<28}{before:>18}{after:>18}");
        }
        let _ = writeln!(
            out,
            "\nsuccess probability: {:.6}",
            self.success_probability
        );
        match &self.filters {
            Some(f) => {
                let _ = writeln!(out, "alice filter: {}", matrix2_text(&f.alice));
                let _ = writeln!(out, "bob filter:   {}", matrix2_text(&f.bob));
            }
            None => {
                let _ = writeln!(out, "no filters applied");
            }
        }
        if let Some(cmp) = &self.comparison {
            out.push('\n');
            out.push_str(&comparison_table(cmp));
        }
        out
    }
}

fn complex_text(z: &[f64; 2]) -> String {
    if z[1].abs() < 5e-7 {
        format!("{:.6}", z[0])
    } else {
        format!("{:.6}{:+.6}i", z[0], z[1])
    }
}

pub(crate) fn matrix2_text(m: &Matrix2Json) -> String {
    format!(
        "[[{}, {}], [{}, {}]]",
        complex_text(&m[0][0]),
        complex_text(&m[0][1]),
        complex_text(&m[1][0]),
        complex_text(&m[1][1])
    )
}

pub fn comparison_table(cmp: &ComparisonJson) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<28}{:>12}{:>12}{:>18}",
        "quantity", "exact", "this run", "published"
    );
    for r in &cmp.rows {
        let published = match (r.published, r.published_error) {
            (Some(v), Some(e)) => format!("{v:.3} ± {e:.3}"),
            (Some(v), None) => format!("{v:.3}"),
            _ => "-".to_string(),
        };
        let _ = writeln!(
            out,
            "{:<28}{:>12.4}{:>12.4}{:>18}",
            r.quantity, r.ideal, r.this_run, published
        );
    }
    let _ = writeln!(out, "\n{}", cmp.note);
    out
}

/// Writes the report to `path`.
pub fn emit_report(report: &DistillationReport, path: &Path, format: Format) -> Result<()> {
    let text = ReportJson::new(report).render(format)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
