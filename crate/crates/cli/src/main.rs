//! `qwsim` — simulators, classical baselines, figure data, scaling tables,
//! and the verification suite for quantum-walk search on the simplex of
//! complete graphs.
//!
//! Exit codes: 0 success, 1 usage error, 2 verification failure, 3 I/O error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use qwsim_core::classical;
use qwsim_core::ctqw::{self, CtqwParams, GammaMode};
use qwsim_core::dtqw::{self, CoinChoice};
use qwsim_core::multistep::{self, MultistepParams};
use qwsim_core::numerics::ComplexMatrix;
use qwsim_core::record::{RunRecord, RunRow};
use qwsim_core::verify;
use qwsim_core::Error as CoreError;

const PI: f64 = std::f64::consts::PI;
const SQRT_2: f64 = std::f64::consts::SQRT_2;

#[derive(Parser)]
#[command(
    name = "qwsim",
    version,
    about = "Quantum-walk search on the simplex of complete graphs: \
             discrete/continuous simulators, classical baselines, figure data, \
             scaling tables, and a verification suite"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// Comma-separated values with `# key=value` headers (plain text for `verify`)
    Csv,
    /// Pretty-printed JSON
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum FigureId {
    /// Coined-walk success probability: flip coin at M=100 plus skw sweep
    Fig2,
    /// Continuous-time walk at the near-critical rate 1 + 1/M
    Fig3,
    /// Composed-step search: k walk steps per oracle query
    Fig4,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScalingKind {
    /// Classical random walk, query after every step
    #[value(name = "classical-k1")]
    ClassicalK1,
    /// Classical random walk, query after every ceil(sqrt(M)) steps
    #[value(name = "classical-sqrt")]
    ClassicalSqrt,
    /// Classical random walk, query after every M steps
    #[value(name = "classical-M")]
    ClassicalM,
    /// Coined walk with the skw marked coin, one step per query
    #[value(name = "quantum-dtqw")]
    QuantumDtqw,
    /// Continuous-time walk at rate 1 + 1/M
    #[value(name = "quantum-ctqw")]
    QuantumCtqw,
    /// Composed-step walk at the resonant k
    #[value(name = "quantum-multistep")]
    QuantumMultistep,
}

impl ScalingKind {
    fn name(self) -> &'static str {
        match self {
            ScalingKind::ClassicalK1 => "classical-k1",
            ScalingKind::ClassicalSqrt => "classical-sqrt",
            ScalingKind::ClassicalM => "classical-M",
            ScalingKind::QuantumDtqw => "quantum-dtqw",
            ScalingKind::QuantumCtqw => "quantum-ctqw",
            ScalingKind::QuantumMultistep => "quantum-multistep",
        }
    }
}

fn parse_coin(s: &str) -> Result<CoinChoice, String> {
    s.parse().map_err(|e: CoreError| e.to_string())
}

fn parse_gamma_mode(s: &str) -> Result<GammaMode, String> {
    s.parse().map_err(|e: CoreError| e.to_string())
}

#[derive(Subcommand)]
enum Command {
    /// Coined discrete-time walk in the reduced six-dimensional basis
    Dtqw {
        /// Clique size M (the graph has M(M+1) vertices)
        #[arg(long)]
        m: usize,
        /// Marked-vertex coin: flip or skw
        #[arg(long, value_parser = parse_coin)]
        coin: CoinChoice,
        /// Walk steps (default: 20% past the predicted skw peak)
        #[arg(long)]
        steps: Option<u64>,
        /// Output file (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Continuous-time walk in the reduced three-dimensional basis
    Ctqw {
        #[arg(long)]
        m: usize,
        /// Jumping rate: exact | approx | value:<x>
        #[arg(long, default_value = "exact", value_parser = parse_gamma_mode)]
        gamma_mode: GammaMode,
        /// Evolution time (default: 25% past the predicted peak)
        #[arg(long)]
        t_max: Option<f64>,
        /// Sampling interval
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Composed-step search: k walk steps per oracle query
    Multistep {
        #[arg(long)]
        m: usize,
        /// Walk steps per query (default: the resonant choice for `n`)
        #[arg(long, conflicts_with = "n")]
        k: Option<u64>,
        /// Odd-multiple selector for the resonant k
        #[arg(long, default_value_t = 0)]
        n: u32,
        /// Oracle queries to simulate (default: a little past the predicted peak)
        #[arg(long)]
        steps: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Classical random-walk baseline: exact hitting times plus Monte Carlo
    Classical {
        #[arg(long)]
        m: usize,
        /// Walk steps between oracle queries
        #[arg(long, default_value_t = 1)]
        steps_per_query: u64,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Reproduce a figure's data, one file per curve
    Figure {
        #[arg(value_enum)]
        id: FigureId,
        /// Sizes for the swept curves
        #[arg(long, value_delimiter = ',', default_values_t = vec![100usize, 200, 300])]
        m_list: Vec<usize>,
        /// Directory for the per-curve files (all curves to stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Fit a query-complexity exponent over a size sweep
    Scaling {
        #[arg(value_enum)]
        kind: ScalingKind,
        /// At least three distinct sizes
        #[arg(long, value_delimiter = ',', default_values_t = vec![16usize, 32, 64, 128, 256])]
        m_list: Vec<usize>,
        /// Monte Carlo trials per size (classical kinds only)
        #[arg(long, default_value_t = 2000)]
        trials: u64,
        #[arg(long, default_value_t = 1234)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Run the aggregated verification suite (exit 2 when any check fails)
    Verify {
        /// Largest size for the full-Hilbert-space equivalence checks
        #[arg(long, default_value_t = 16)]
        max_m_fullspace: usize,
        /// Deliberately perturb the walk operator to demonstrate detection
        #[arg(long)]
        inject_fault: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        /// csv renders the plain-text report
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

enum CliError {
    Usage(String),
    Verification(String),
    Io(String),
}

impl CliError {
    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Verification(m) | CliError::Io(m) => m,
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Verification(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        match err {
            CoreError::ToleranceNotMet { .. } => CliError::Verification(err.to_string()),
            _ => CliError::Usage(err.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Dtqw { m, coin, steps, out, format } => {
            let steps = steps.unwrap_or_else(|| default_dtqw_steps(m));
            let record = dtqw::evolve_dtqw(m, coin, steps)?;
            write_record(&record, format, out.as_deref())
        }
        Command::Ctqw { m, gamma_mode, t_max, dt, out, format } => {
            let gamma = gamma_mode.resolve(m)?;
            let t_max = t_max.unwrap_or_else(|| 1.25 * PI * (m as f64).sqrt() / 2.0);
            let params = CtqwParams::new(m, gamma, t_max, dt)?;
            let mut record = ctqw::evolve_ctqw(params)?;
            record.push_meta("gamma_mode", gamma_mode);
            write_record(&record, format, out.as_deref())
        }
        Command::Multistep { m, k, n, steps, out, format } => {
            let queries = steps.unwrap_or_else(|| default_multistep_queries(m));
            let params = match k {
                Some(k) => MultistepParams::with_explicit_k(m, k, queries)?,
                None => MultistepParams::new(m, n, queries)?,
            };
            let run = multistep::run_multistep(params)?;
            write_record(&run.record, format, out.as_deref())
        }
        Command::Classical { m, steps_per_query, trials, seed, out, format } => {
            let record = run_classical(m, steps_per_query, trials, seed)?;
            write_record(&record, format, out.as_deref())
        }
        Command::Figure { id, m_list, out, format } => {
            let m_list = normalized_m_list(m_list)?;
            let curves = run_figure(id, &m_list)?;
            write_curves(&curves, format, out.as_deref())
        }
        Command::Scaling { kind, m_list, trials, seed, out, format } => {
            let m_list = normalized_m_list(m_list)?;
            if m_list.len() < 3 {
                return Err(CliError::Usage(format!(
                    "scaling needs at least three distinct sizes, got {}",
                    m_list.len()
                )));
            }
            let record = run_scaling(kind, &m_list, trials, seed)?;
            write_record(&record, format, out.as_deref())
        }
        Command::Verify { max_m_fullspace, inject_fault, out, format } => {
            run_verify(max_m_fullspace, inject_fault, format, out.as_deref())
        }
    }
}

/// 20% past the predicted skw peak step πM/(2√2).
fn default_dtqw_steps(m: usize) -> u64 {
    (1.2 * PI * m as f64 / (2.0 * SQRT_2)).ceil() as u64
}

/// A little past the predicted peak query round(π√M/4).
fn default_multistep_queries(m: usize) -> u64 {
    (PI * (m as f64).sqrt() / 4.0).round() as u64 + 6
}

fn normalized_m_list(mut m_list: Vec<usize>) -> Result<Vec<usize>, CliError> {
    if m_list.is_empty() {
        return Err(CliError::Usage("--m-list must not be empty".into()));
    }
    m_list.sort_unstable();
    m_list.dedup();
    Ok(m_list)
}

fn run_classical(m: usize, steps_per_query: u64, trials: u64, seed: u64) -> Result<RunRecord, CliError> {
    let summary = classical::monte_carlo_queries(m, steps_per_query, trials, seed)?;
    let (hb, hc) = classical::exact_hitting_steps(m)?;
    let mut record = RunRecord::new("classical");
    record.push_meta("m", m);
    record.push_meta("steps_per_query", steps_per_query);
    record.push_meta("trials", trials);
    record.push_meta("seed", seed);
    record.push_meta("mean_queries", format!("{:.12e}", summary.mean_queries));
    record.push_meta("std_error", format!("{:.12e}", summary.std_error));
    record.push_meta("exact_hitting_b", format!("{hb:.12e}"));
    record.push_meta("exact_hitting_c", format!("{hc:.12e}"));
    record.push_row(RunRow {
        index: m as f64,
        success_probability: 1.0,
        walk_steps: summary.mean_steps.round() as u64,
        oracle_queries: summary.mean_queries,
    });
    record.validate()?;
    Ok(record)
}

fn push_peak_meta(record: &mut RunRecord) {
    if let Some(peak) = record.peak().copied() {
        record.push_meta("peak_index", qwsim_core::record::format_number(peak.index));
        record.push_meta(
            "peak_probability",
            qwsim_core::record::format_number(peak.success_probability),
        );
    }
}

fn run_figure(id: FigureId, m_list: &[usize]) -> Result<Vec<(String, RunRecord)>, CliError> {
    let mut curves = Vec::new();
    match id {
        FigureId::Fig2 => {
            let mut flip = dtqw::evolve_dtqw(100, CoinChoice::Flip, 1000)?;
            push_peak_meta(&mut flip);
            curves.push(("fig2_flip_m100".to_string(), flip));
            for &m in m_list {
                let mut rec = dtqw::evolve_dtqw(m, CoinChoice::Skw, default_dtqw_steps(m))?;
                push_peak_meta(&mut rec);
                curves.push((format!("fig2_skw_m{m}"), rec));
            }
        }
        FigureId::Fig3 => {
            for &m in m_list {
                let gamma = GammaMode::Approx.resolve(m)?;
                let t_max = 1.25 * PI * (m as f64).sqrt() / 2.0;
                let params = CtqwParams::new(m, gamma, t_max, 0.01)?;
                let mut rec = ctqw::evolve_ctqw(params)?;
                rec.push_meta("gamma_mode", GammaMode::Approx);
                push_peak_meta(&mut rec);
                curves.push((format!("fig3_ctqw_m{m}"), rec));
            }
        }
        FigureId::Fig4 => {
            for &m in m_list {
                let params = MultistepParams::new(m, 0, default_multistep_queries(m))?;
                let mut rec = multistep::run_multistep(params)?.record;
                push_peak_meta(&mut rec);
                curves.push((format!("fig4_multistep_m{m}"), rec));
            }
        }
    }
    Ok(curves)
}

fn run_scaling(kind: ScalingKind, m_list: &[usize], trials: u64, seed: u64) -> Result<RunRecord, CliError> {
    let mut record = RunRecord::new("scaling");
    record.push_meta("kind", kind.name());
    record.push_meta(
        "m_list",
        m_list.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(","),
    );
    let mut points = Vec::new();
    match kind {
        ScalingKind::ClassicalK1 | ScalingKind::ClassicalSqrt | ScalingKind::ClassicalM => {
            record.push_meta("trials", trials);
            record.push_meta("seed", seed);
            for &m in m_list {
                let k = match kind {
                    ScalingKind::ClassicalK1 => 1,
                    ScalingKind::ClassicalSqrt => (m as f64).sqrt().ceil() as u64,
                    _ => m as u64,
                };
                let summary = classical::monte_carlo_queries(m, k, trials, seed)?;
                record.push_meta(format!("k_m{m}").as_str(), k);
                record.push_meta(
                    format!("std_error_m{m}").as_str(),
                    format!("{:.6e}", summary.std_error),
                );
                record.push_row(RunRow {
                    index: m as f64,
                    success_probability: 1.0,
                    walk_steps: summary.mean_steps.round() as u64,
                    oracle_queries: summary.mean_queries,
                });
                points.push((m as f64, summary.mean_queries));
            }
        }
        ScalingKind::QuantumDtqw => {
            for &m in m_list {
                let steps = (1.3 * PI * m as f64 / (2.0 * SQRT_2)).ceil() as u64;
                let rec = dtqw::evolve_dtqw(m, CoinChoice::Skw, steps)?;
                let row = crossing_row(&rec, m)?;
                record.push_row(scaled_row(m, row));
                points.push((m as f64, row.oracle_queries));
            }
        }
        ScalingKind::QuantumCtqw => {
            for &m in m_list {
                let gamma = GammaMode::Approx.resolve(m)?;
                let params = CtqwParams::new(m, gamma, 2.5 * (m as f64).sqrt(), 0.05)?;
                let rec = ctqw::evolve_ctqw(params)?;
                let row = crossing_row(&rec, m)?;
                record.push_row(scaled_row(m, row));
                points.push((m as f64, row.oracle_queries));
            }
        }
        ScalingKind::QuantumMultistep => {
            for &m in m_list {
                let queries = default_multistep_queries(m);
                let params = MultistepParams::new(m, 0, queries)?;
                let run = multistep::run_multistep(params)?;
                let row = crossing_row(&run.record, m)?;
                record.push_meta(format!("k_m{m}").as_str(), params.k);
                // Secondary, tighter threshold: the composed-step walk is the
                // only curve expected to clear 0.9.
                if let Some(q90) = run.record.first_crossing(0.9) {
                    record.push_meta(
                        format!("q90_m{m}").as_str(),
                        qwsim_core::record::format_number(q90.oracle_queries),
                    );
                }
                record.push_row(scaled_row(m, row));
                points.push((m as f64, row.oracle_queries));
            }
        }
    }
    let fit = classical::scaling_fit(&points)?;
    record.push_meta("exponent", format!("{:.6}", fit.exponent));
    record.push_meta("intercept", format!("{:.6e}", fit.intercept));
    record.push_meta("r_squared", format!("{:.6}", fit.r_squared));
    record.validate()?;
    Ok(record)
}

fn crossing_row(record: &RunRecord, m: usize) -> Result<RunRow, CliError> {
    record
        .first_crossing(0.5)
        .copied()
        .ok_or_else(|| {
            CliError::Verification(format!(
                "success probability never reached 0.5 at M={m}"
            ))
        })
}

fn scaled_row(m: usize, crossing: RunRow) -> RunRow {
    RunRow {
        index: m as f64,
        success_probability: crossing.success_probability,
        walk_steps: crossing.walk_steps,
        oracle_queries: crossing.oracle_queries,
    }
}

fn run_verify(
    max_m_fullspace: usize,
    inject_fault: bool,
    format: Format,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let mut report = verify::verify_all(max_m_fullspace)?;
    if inject_fault {
        let walk = dtqw::build_u0(10)?;
        let mut entries = walk.entries().to_vec();
        entries[0] += Complex64::new(1e-3, 0.0);
        let perturbed = ComplexMatrix::new(6, entries)?;
        let preds = multistep::u0_spectrum_closed_form(10)?;
        report.checks.extend(verify::check_exact_spectrum(
            "fault-injected walk spectrum M=10",
            &perturbed,
            &preds,
            1e-10,
            1.0 - 1e-8,
        )?);
    }
    let body = match format {
        Format::Csv => report.render_text(),
        Format::Json => report.to_json(),
    };
    write_body(&body, out)?;
    if report.all_passed() {
        Ok(())
    } else {
        let failed = report.checks.len() - report.passed_count();
        Err(CliError::Verification(format!(
            "{failed} of {} verification checks failed",
            report.checks.len()
        )))
    }
}

fn render(record: &RunRecord, format: Format) -> String {
    match format {
        Format::Csv => record.to_csv(),
        Format::Json => record.to_json(),
    }
}

fn write_body(body: &str, out: Option<&Path>) -> Result<(), CliError> {
    let mut owned;
    let body = if body.ends_with('\n') {
        body
    } else {
        owned = body.to_string();
        owned.push('\n');
        &owned
    };
    match out {
        None => {
            print!("{body}");
            Ok(())
        }
        Some(path) => std::fs::write(path, body)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
    }
}

fn write_record(record: &RunRecord, format: Format, out: Option<&Path>) -> Result<(), CliError> {
    write_body(&render(record, format), out)
}

fn write_curves(
    curves: &[(String, RunRecord)],
    format: Format,
    out: Option<&Path>,
) -> Result<(), CliError> {
    match out {
        None => {
            for (_, record) in curves {
                write_body(&render(record, format), None)?;
            }
            Ok(())
        }
        Some(dir) => {
            std::fs::create_dir_all(dir)
                .map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
            let ext = match format {
                Format::Csv => "csv",
                Format::Json => "json",
            };
            for (stem, record) in curves {
                let path = dir.join(format!("{stem}.{ext}"));
                write_body(&render(record, format), Some(&path))?;
                println!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}
