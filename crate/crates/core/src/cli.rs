//! The `twobridge` command line: `riley`, `verify`, `oracle` and `batch`.
//!
//! [`run`] does all the work and returns the rendered output and exit code,
//! so the binary is a thin wrapper and tests can drive the CLI in-process.
//!
//! Exit codes: 0 pass, 1 computation failure, 2 invalid input.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cochain::{oracle_survey, OracleSurvey, SurveyError};
use crate::config::{OutputFormat, RunConfig, Tolerances};
use crate::numeric::GenericSample;
use crate::real::Precision;
use crate::riley::{check_identities, riley_polynomial, IdentityReport, RileyData};
use crate::schubert::{validate, KnotWords, SchubertError};
use crate::torsion::{
    inverse_sum_statistics, torsion_spectrum, InverseSumStatistics, TorsionError, TrialRecord,
};
use crate::poly::MultiPoly;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "twobridge", version, about = "Riley polynomials and adjoint torsion of two-bridge knots")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Riley polynomial, words and exact identity checks for one knot.
    Riley {
        #[command(flatten)]
        knot: KnotArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Sampled inverse-torsion sums over trace fibers.
    Verify {
        #[command(flatten)]
        knot: KnotArgs,
        #[arg(long)]
        trials: Option<usize>,
        /// Pin the trace value instead of sampling, e.g. `2.5+0.3i`.
        #[arg(long, allow_hyphen_values = true)]
        c: Option<Complex64>,
        /// With `--c`: fall back to sampling when the pinned value is not generic.
        #[arg(long)]
        resample: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Closed-form torsion against the cochain-complex torsion.
    Oracle {
        #[command(flatten)]
        knot: KnotArgs,
        /// Number of sampled trace values; every character over each is compared.
        #[arg(long, default_value_t = 10)]
        samples: usize,
        /// Write the cochain data of every compared character as JSON.
        #[arg(long)]
        dump_cochain: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Runs `verify` on every `p,q` row of a CSV file.
    Batch {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        trials: Option<usize>,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Args, Debug)]
struct KnotArgs {
    #[arg(long)]
    p: i64,
    #[arg(long, allow_hyphen_values = true)]
    q: i64,
}

#[derive(Args, Debug)]
struct CommonArgs {
    #[arg(long)]
    seed: Option<u64>,
    /// Override a tolerance, `NAME=VALUE`; repeatable.
    #[arg(long = "tolerance", value_name = "NAME=VALUE")]
    tolerances: Vec<String>,
    #[arg(long)]
    precision: Option<Precision>,
    #[arg(long)]
    format: Option<OutputFormat>,
    /// TOML file with defaults (overrides the `TWOBRIDGE_CONFIG` file).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the output here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Result of one CLI invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliOutcome {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CliOutcome {
    fn invalid(msg: impl std::fmt::Display) -> Self {
        CliOutcome {
            exit_code: EXIT_INVALID,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Failed(String),
}

impl From<SchubertError> for CliError {
    fn from(e: SchubertError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<TorsionError> for CliError {
    fn from(e: TorsionError) -> Self {
        CliError::Failed(e.to_string())
    }
}

impl From<SurveyError> for CliError {
    fn from(e: SurveyError) -> Self {
        CliError::Failed(e.to_string())
    }
}

fn resolve_config(common: &CommonArgs, trials: Option<usize>) -> Result<RunConfig, CliError> {
    let invalid = |e: crate::config::ConfigError| CliError::Invalid(e.to_string());
    let mut cfg = match &common.config {
        Some(path) => RunConfig::from_toml_file(path).map_err(invalid)?,
        None => RunConfig::from_env().map_err(invalid)?,
    };
    for arg in &common.tolerances {
        cfg.tolerances.apply_override(arg).map_err(invalid)?;
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(t) = trials {
        cfg.trials = t;
    }
    if let Some(p) = common.precision {
        cfg.precision = p;
    }
    if let Some(f) = common.format {
        cfg.format = f;
    }
    cfg.validate().map_err(invalid)?;
    Ok(cfg)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> CliOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                CliOutcome {
                    exit_code: EXIT_INVALID,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                CliOutcome {
                    exit_code: EXIT_PASS,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let (common, result) = match &cli.command {
        Command::Riley { knot, common } => (common, resolve_config(common, None).and_then(|cfg| cmd_riley(knot, &cfg))),
        Command::Verify {
            knot,
            trials,
            c,
            resample,
            common,
        } => (
            common,
            resolve_config(common, *trials).and_then(|cfg| cmd_verify(knot, *c, *resample, &cfg)),
        ),
        Command::Oracle {
            knot,
            samples,
            dump_cochain,
            common,
        } => (
            common,
            resolve_config(common, None).and_then(|cfg| cmd_oracle(knot, *samples, dump_cochain.as_deref(), &cfg)),
        ),
        Command::Batch { input, trials, common } => {
            (common, resolve_config(common, *trials).and_then(|cfg| cmd_batch(input, &cfg)))
        }
    };
    match result {
        Ok(rendered) => {
            let mut outcome = CliOutcome {
                exit_code: rendered.exit_code,
                stdout: rendered.body,
                stderr: rendered.summary,
            };
            if let Some(path) = &common.output {
                if let Err(e) = std::fs::write(path, &outcome.stdout) {
                    return CliOutcome::invalid(format!("writing {}: {e}", path.display()));
                }
                outcome.stdout.clear();
            }
            outcome
        }
        Err(CliError::Invalid(msg)) => CliOutcome::invalid(msg),
        Err(CliError::Failed(msg)) => CliOutcome {
            exit_code: EXIT_FAIL,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        },
    }
}

struct Rendered {
    exit_code: i32,
    body: String,
    /// One-line verdict for stderr.
    summary: String,
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn csv_string(write: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    write(&mut w).expect("in-memory csv");
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 csv")
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn load_knot(knot: &KnotArgs) -> Result<RileyData, CliError> {
    let form = validate(knot.p, knot.q)?;
    Ok(riley_polynomial(form)?)
}

/// Output of `riley`.
#[derive(Clone, Debug, Serialize)]
pub struct RileySummary {
    pub p: i64,
    pub q: i64,
    pub k: i64,
    pub eps_k: i32,
    pub epsilon: Vec<i32>,
    pub words: KnotWords,
    pub phi_w: String,
    pub phi_w_terms: MultiPoly,
    pub degree_u: u32,
    pub identities: IdentityReport,
}

pub fn riley_summary(data: &RileyData) -> RileySummary {
    RileySummary {
        p: data.p(),
        q: data.q(),
        k: data.k,
        eps_k: data.eps_k,
        epsilon: data.form.epsilon_sequence(),
        words: data.words.clone(),
        phi_w: data.phi_w.display_mu(),
        phi_w_terms: data.phi_w.clone(),
        degree_u: data.phi_w.degree_t3().unwrap_or(0),
        identities: check_identities(data),
    }
}

fn cmd_riley(knot: &KnotArgs, cfg: &RunConfig) -> Result<Rendered, CliError> {
    let data = load_knot(knot)?;
    let s = riley_summary(&data);
    let pass = s.identities.all();
    let body = match cfg.format {
        OutputFormat::Json => to_json(&s),
        OutputFormat::Csv => csv_string(|w| {
            w.write_record(["p", "q", "k", "eps_k", "degree_u", "phi_w", "identities"])?;
            w.write_record([
                s.p.to_string(),
                s.q.to_string(),
                s.k.to_string(),
                s.eps_k.to_string(),
                s.degree_u.to_string(),
                s.phi_w.clone(),
                verdict(pass).to_string(),
            ])
        }),
        OutputFormat::Text => {
            let mut t = String::new();
            let _ = writeln!(t, "knot ({}, {})", s.p, s.q);
            let _ = writeln!(t, "epsilon: {:?}", s.epsilon);
            let _ = writeln!(t, "k = {}, eps_k = {}", s.k, s.eps_k);
            let _ = writeln!(t, "w  = {}", s.words.w);
            let _ = writeln!(t, "v  = {}", s.words.v);
            let _ = writeln!(t, "v' = {}", s.words.v_prime);
            let _ = writeln!(t, "y  = {}", s.words.y);
            let _ = writeln!(t, "phi_w = {}", s.phi_w);
            let id = &s.identities;
            for (name, ok) in [
                ("det rho(w) = 1", id.det_one),
                ("u w12 + w21 = 0", id.riley_relation),
                ("phi_w = w'22 + (m - 1/m) w'12", id.w_dagger_identity),
                ("rho(r) = I + phi_w M", id.relator_expansion),
                ("v'11 phi_v' = m^(1-eps_k) v11 phi_v", id.vprime_identity),
                ("degree and leading coefficient", id.degree_and_leading),
            ] {
                let _ = writeln!(t, "{}: {}", verdict(ok), name);
            }
            t
        }
    };
    Ok(Rendered {
        exit_code: if pass { EXIT_PASS } else { EXIT_FAIL },
        body,
        summary: format!("{}: identities for ({}, {})\n", verdict(pass), s.p, s.q),
    })
}

/// Output of `verify`.
#[derive(Clone, Debug, Serialize)]
pub struct VerifySummary {
    pub pass: bool,
    /// `-2q` for torus knots, `0` otherwise.
    #[serde(with = "crate::serde_complex")]
    pub target: Complex64,
    /// Threshold the verdict was judged against.
    pub threshold: f64,
    /// Whether a pinned `--c` was rejected and replaced by sampling.
    pub resampled: bool,
    pub tolerances: Tolerances,
    #[serde(flatten)]
    pub statistics: InverseSumStatistics,
}

fn verify_knot(data: &RileyData, pinned: Option<Complex64>, resample: bool, cfg: &RunConfig) -> Result<VerifySummary, CliError> {
    let tol = &cfg.tolerances;
    let mut resampled = false;
    let statistics = match pinned {
        Some(c) => match torsion_spectrum(data, c, cfg.precision, tol) {
            Ok(report) => pinned_statistics(data, cfg, c, report),
            Err(e) if resample && e.is_resampleable() => {
                resampled = true;
                inverse_sum_statistics(data, cfg.trials, cfg.seed, cfg.precision, tol)?
            }
            Err(e) => return Err(CliError::Failed(format!("pinned trace value {c} rejected: {e}"))),
        },
        None => inverse_sum_statistics(data, cfg.trials, cfg.seed, cfg.precision, tol)?,
    };
    let torus = data.form.is_torus();
    Ok(VerifySummary {
        pass: statistics.passes(tol),
        target: Complex64::new(if torus { -2.0 * data.q() as f64 } else { 0.0 }, 0.0),
        threshold: if torus { tol.torus_sum } else { tol.vanishing },
        resampled,
        tolerances: tol.clone(),
        statistics,
    })
}

fn pinned_statistics(data: &RileyData, cfg: &RunConfig, c: Complex64, report: crate::torsion::TorsionReport) -> InverseSumStatistics {
    let torus = data.form.is_torus().then(|| report.torus_deviation());
    let residual = report.relative_residual;
    InverseSumStatistics {
        p: data.p(),
        q: data.q(),
        seed: cfg.seed,
        precision: cfg.precision,
        trials: vec![TrialRecord {
            trial: 0,
            sample: GenericSample {
                c,
                d: report.d,
                attempts: 0,
            },
            retries: 0,
            report,
        }],
        max_relative_residual: residual,
        median_relative_residual: residual,
        max_torus_deviation: torus,
        total_draws: 0,
        total_retries: 0,
    }
}

fn fmt_c(z: Complex64) -> String {
    format!("{:.12e}{:+.12e}i", z.re, z.im)
}

fn cmd_verify(knot: &KnotArgs, pinned: Option<Complex64>, resample: bool, cfg: &RunConfig) -> Result<Rendered, CliError> {
    let data = load_knot(knot)?;
    let s = verify_knot(&data, pinned, resample, cfg)?;
    let stats = &s.statistics;
    let body = match cfg.format {
        OutputFormat::Json => to_json(&s),
        OutputFormat::Csv => csv_string(|w| {
            w.write_record([
                "trial", "c_re", "c_im", "d_re", "d_im", "sum_re", "sum_im", "relative_residual", "retries",
            ])?;
            for t in &stats.trials {
                let r = &t.report;
                w.write_record([
                    t.trial.to_string(),
                    r.c.re.to_string(),
                    r.c.im.to_string(),
                    r.d.re.to_string(),
                    r.d.im.to_string(),
                    r.inverse_sum.re.to_string(),
                    r.inverse_sum.im.to_string(),
                    r.relative_residual.to_string(),
                    t.retries.to_string(),
                ])?;
            }
            Ok(())
        }),
        OutputFormat::Text => {
            let mut t = String::new();
            let _ = writeln!(t, "knot ({}, {}), {} trial(s), seed {}", stats.p, stats.q, stats.trials.len(), stats.seed);
            for tr in &stats.trials {
                let r = &tr.report;
                let _ = writeln!(
                    t,
                    "trial {:>3}  c = {}  sum = {}  residual = {:.3e}",
                    tr.trial,
                    fmt_c(r.c),
                    fmt_c(r.inverse_sum),
                    r.relative_residual
                );
            }
            let _ = writeln!(t, "max relative residual {:.3e}", stats.max_relative_residual);
            if let Some(dev) = stats.max_torus_deviation {
                let _ = writeln!(t, "max deviation from {} {:.3e}", s.target.re, dev);
            }
            let _ = writeln!(t, "{}", verdict(s.pass));
            t
        }
    };
    let measure = stats.max_torus_deviation.unwrap_or(stats.max_relative_residual);
    Ok(Rendered {
        exit_code: if s.pass { EXIT_PASS } else { EXIT_FAIL },
        body,
        summary: format!(
            "{}: ({}, {}) max deviation {:.3e} (threshold {:.0e})\n",
            verdict(s.pass),
            stats.p,
            stats.q,
            measure,
            s.threshold
        ),
    })
}

fn cmd_oracle(knot: &KnotArgs, samples: usize, dump: Option<&Path>, cfg: &RunConfig) -> Result<Rendered, CliError> {
    if samples == 0 {
        return Err(CliError::Invalid("samples must be at least 1".into()));
    }
    let data = load_knot(knot)?;
    let survey: OracleSurvey = oracle_survey(&data, samples, cfg.seed, &cfg.tolerances)?;
    if let Some(path) = dump {
        std::fs::write(path, to_json(&survey.cochain))
            .map_err(|e| CliError::Invalid(format!("writing {}: {e}", path.display())))?;
    }
    let pass = survey.passes(&cfg.tolerances);
    let body = match cfg.format {
        OutputFormat::Json => to_json(&survey),
        OutputFormat::Csv => csv_string(|w| {
            w.write_record(["sample", "u_re", "u_im", "abs_formula", "abs_oracle", "relative_difference"])?;
            for e in &survey.entries {
                let c = &e.comparison;
                w.write_record([
                    e.sample.to_string(),
                    c.u.re.to_string(),
                    c.u.im.to_string(),
                    c.abs_formula.to_string(),
                    c.abs_oracle.to_string(),
                    c.relative_difference.to_string(),
                ])?;
            }
            Ok(())
        }),
        OutputFormat::Text => {
            let mut t = String::new();
            let _ = writeln!(t, "{:>6}  {:>20}  {:>20}  {:>10}", "sample", "|formula|", "|oracle|", "rel diff");
            for e in &survey.entries {
                let c = &e.comparison;
                let _ = writeln!(
                    t,
                    "{:>6}  {:>20.12e}  {:>20.12e}  {:>10.2e}",
                    e.sample, c.abs_formula, c.abs_oracle, c.relative_difference
                );
            }
            let _ = writeln!(t, "max relative difference {:.3e}", survey.max_relative_difference);
            let _ = match survey.sign {
                Some(s) => writeln!(t, "constant sign ratio {s:+}"),
                None => writeln!(t, "sign ratio not constant"),
            };
            let _ = writeln!(t, "{}", verdict(pass));
            t
        }
    };
    Ok(Rendered {
        exit_code: if pass { EXIT_PASS } else { EXIT_FAIL },
        body,
        summary: format!(
            "{}: ({}, {}) {} characters, max relative difference {:.3e}\n",
            verdict(pass),
            survey.p,
            survey.q,
            survey.entries.len(),
            survey.max_relative_difference
        ),
    })
}

#[derive(Debug, Deserialize)]
struct KnotRow {
    p: i64,
    q: i64,
}

/// One row of `batch` output.
#[derive(Clone, Debug, Serialize)]
pub struct BatchRow {
    pub row: usize,
    pub p: i64,
    pub q: i64,
    /// `pass`, `fail`, `invalid` or `error`.
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_relative_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub median_relative_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_torus_deviation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_retries: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BatchSummary {
    pub seed: u64,
    pub trials: usize,
    pub precision: Precision,
    pub pass: bool,
    pub rows: Vec<BatchRow>,
}

fn batch_row(row: usize, p: i64, q: i64, cfg: &RunConfig) -> (BatchRow, i32) {
    let mut out = BatchRow {
        row,
        p,
        q,
        status: String::new(),
        error: None,
        max_relative_residual: None,
        median_relative_residual: None,
        max_torus_deviation: None,
        total_retries: None,
    };
    let knot = KnotArgs { p, q };
    let code = match load_knot(&knot).and_then(|data| verify_knot(&data, None, false, cfg)) {
        Ok(s) => {
            out.status = if s.pass { "pass" } else { "fail" }.into();
            out.max_relative_residual = Some(s.statistics.max_relative_residual);
            out.median_relative_residual = Some(s.statistics.median_relative_residual);
            out.max_torus_deviation = s.statistics.max_torus_deviation;
            out.total_retries = Some(s.statistics.total_retries);
            if s.pass {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(CliError::Invalid(msg)) => {
            out.status = "invalid".into();
            out.error = Some(msg);
            EXIT_INVALID
        }
        Err(CliError::Failed(msg)) => {
            out.status = "error".into();
            out.error = Some(msg);
            EXIT_FAIL
        }
    };
    (out, code)
}

fn read_rows(input: &Path) -> Result<Vec<Result<KnotRow, String>>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(input)
        .map_err(|e| CliError::Invalid(format!("reading {}: {e}", input.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| CliError::Invalid(format!("reading {}: {e}", input.display())))?;
    if headers.iter().collect::<Vec<_>>() != ["p", "q"] {
        return Err(CliError::Invalid(format!("{}: header must be `p,q`", input.display())));
    }
    Ok(reader
        .deserialize::<KnotRow>()
        .map(|r| r.map_err(|e| e.to_string()))
        .collect())
}

fn cmd_batch(input: &Path, cfg: &RunConfig) -> Result<Rendered, CliError> {
    let rows = read_rows(input)?;
    let results: Vec<(BatchRow, i32)> = rows
        .par_iter()
        .enumerate()
        .map(|(i, row)| match row {
            Ok(r) => batch_row(i, r.p, r.q, cfg),
            Err(msg) => (
                BatchRow {
                    row: i,
                    p: 0,
                    q: 0,
                    status: "invalid".into(),
                    error: Some(msg.clone()),
                    max_relative_residual: None,
                    median_relative_residual: None,
                    max_torus_deviation: None,
                    total_retries: None,
                },
                EXIT_INVALID,
            ),
        })
        .collect();
    let exit_code = results.iter().map(|(_, c)| *c).max().unwrap_or(EXIT_PASS);
    let summary = BatchSummary {
        seed: cfg.seed,
        trials: cfg.trials,
        precision: cfg.precision,
        pass: exit_code == EXIT_PASS,
        rows: results.into_iter().map(|(r, _)| r).collect(),
    };
    let body = match cfg.format {
        OutputFormat::Json => to_json(&summary),
        OutputFormat::Csv => csv_string(|w| {
            w.write_record(["row", "p", "q", "status", "max_relative_residual", "max_torus_deviation", "error"])?;
            let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
            for r in &summary.rows {
                w.write_record([
                    r.row.to_string(),
                    r.p.to_string(),
                    r.q.to_string(),
                    r.status.clone(),
                    opt(r.max_relative_residual),
                    opt(r.max_torus_deviation),
                    r.error.clone().unwrap_or_default(),
                ])?;
            }
            Ok(())
        }),
        OutputFormat::Text => {
            let mut t = String::new();
            for r in &summary.rows {
                let measure = r.max_torus_deviation.or(r.max_relative_residual);
                let _ = match (measure, &r.error) {
                    (Some(x), _) => writeln!(t, "{:>4}  ({}, {})  {}  {:.3e}", r.row, r.p, r.q, r.status, x),
                    (None, Some(e)) => writeln!(t, "{:>4}  ({}, {})  {}  {}", r.row, r.p, r.q, r.status, e),
                    (None, None) => writeln!(t, "{:>4}  ({}, {})  {}", r.row, r.p, r.q, r.status),
                };
            }
            let _ = writeln!(t, "{}", verdict(summary.pass));
            t
        }
    };
    let failed = summary.rows.iter().filter(|r| r.status != "pass").count();
    Ok(Rendered {
        exit_code,
        body,
        summary: format!("{}: {} row(s), {} not passing\n", verdict(summary.pass), summary.rows.len(), failed),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> CliOutcome {
        run(std::iter::once("twobridge").chain(args.iter().copied()))
    }

    #[test]
    fn riley_trefoil_text() {
        let out = run_args(&["riley", "--p", "3", "--q", "1", "--format", "text"]);
        assert_eq!(out.exit_code, 0, "{}", out.stderr);
        assert!(out.stdout.contains("phi_w = m^2 + m^-2 - 1 - u"));
    }

    #[test]
    fn riley_invalid_form() {
        let out = run_args(&["riley", "--p", "4", "--q", "1"]);
        assert_eq!(out.exit_code, EXIT_INVALID);
        assert!(out.stderr.contains("odd"));
    }

    #[test]
    fn negative_q_parses() {
        let out = run_args(&["riley", "--p", "5", "--q", "-1", "--format", "csv"]);
        assert_eq!(out.exit_code, 0, "{}", out.stderr);
        assert!(out.stdout.starts_with("p,q,k"));
    }

    #[test]
    fn bad_tolerance_is_invalid() {
        let out = run_args(&["verify", "--p", "5", "--q", "3", "--tolerance", "vanishing=-1"]);
        assert_eq!(out.exit_code, EXIT_INVALID);
        let out = run_args(&["verify", "--p", "5", "--q", "3", "--tolerance", "bogus=1"]);
        assert_eq!(out.exit_code, EXIT_INVALID);
    }

    #[test]
    fn unknown_flag_is_invalid() {
        assert_eq!(run_args(&["riley", "--bogus"]).exit_code, EXIT_INVALID);
        assert_eq!(run_args(&["--help"]).exit_code, EXIT_PASS);
    }

    #[test]
    fn pinned_non_generic_trace() {
        let out = run_args(&["verify", "--p", "5", "--q", "3", "--trials", "1", "--c", "2.0+0i"]);
        assert_eq!(out.exit_code, EXIT_FAIL);
        let out = run_args(&["verify", "--p", "5", "--q", "3", "--trials", "1", "--c", "2.0+0i", "--resample"]);
        assert_eq!(out.exit_code, EXIT_PASS, "{}", out.stderr);
        let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["resampled"], true);
    }
}
