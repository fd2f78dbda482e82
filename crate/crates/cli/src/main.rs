//! `ewens` — compute and verify variance statistics of additive functions on
//! Ewens-distributed random permutations.
//!
//! Every subcommand takes θ as mandatory text: `p/q` or an integer selects
//! exact rational arithmetic, a decimal literal selects f64; `--mode`
//! overrides the inference. Exit status is 0 iff every executed check passed.

mod suites;

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::Serialize;

use ewens_core::esf::{mean_a, variance_d, WeightVector};
use ewens_core::export::{hahn_csv, matrix_csv, SpectrumRecord};
use ewens_core::hahn::HahnBasis;
use ewens_core::oracle::mc_estimate;
use ewens_core::scalar::{Scalar, ThetaParam, ThetaTable};
use ewens_core::spectral::{
    build_kernel, build_l_float, build_m_float, exp_l_gauge, extremal_a, float_spectrum, mu_closed,
    rayleigh_ratio, tau_closed, triangularize,
};

#[derive(Parser)]
#[command(
    name = "ewens",
    about = "Variance statistics and spectral verification for the Ewens sampling formula",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub(crate) enum Mode {
    Exact,
    Float,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub(crate) enum Format {
    Json,
    Csv,
    Plain,
}

#[derive(Args)]
pub(crate) struct Session {
    /// Dimension n (number of letters); spectral commands need n >= 2
    #[arg(long)]
    pub(crate) n: usize,
    /// Ewens parameter: "p/q" or integer (exact) or decimal literal (float)
    #[arg(long)]
    pub(crate) theta: String,
    /// Arithmetic mode; inferred from the theta literal when omitted
    #[arg(long, value_enum)]
    pub(crate) mode: Option<Mode>,
    /// Output format
    #[arg(long, value_enum, default_value = "plain")]
    pub(crate) format: Format,
    /// Write the report here instead of stdout
    #[arg(long)]
    pub(crate) out: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Sharp constant (θ+2)/(θ+1) three ways, with an equality verdict
    Tau {
        #[command(flatten)]
        session: Session,
        /// Sweep cells "LO-HI:t1,t2,..." (overrides --n/--theta)
        #[arg(long)]
        grid: Option<String>,
    },
    /// Closed-form spectrum vs. triangularization (exact) or eigensolve (float)
    Spectrum {
        #[command(flatten)]
        session: Session,
    },
    /// Export a matrix as CSV
    Matrix {
        #[command(flatten)]
        session: Session,
        /// kernel | m | l | exp-gauge | triangular
        #[arg(long, value_enum, default_value = "kernel")]
        which: MatrixKind,
    },
    /// Hahn polynomial value table and squared norms
    Hahn {
        #[command(flatten)]
        session: Session,
    },
    /// Exact identity suite at one (n, theta) or over a grid
    Identities {
        #[command(flatten)]
        session: Session,
        /// Sweep cells "LO-HI:t1,t2,..." (overrides --n/--theta)
        #[arg(long)]
        grid: Option<String>,
    },
    /// Exhaustive-enumeration oracle vs. the closed forms
    Oracle {
        #[command(flatten)]
        session: Session,
        /// Number of random weight vectors to compare
        #[arg(long, default_value = "50")]
        vectors: usize,
        #[arg(long, default_value = "1")]
        seed: u64,
        /// Also run the statistical checks with this many draws/proposals
        #[arg(long)]
        count: Option<usize>,
    },
    /// Monte Carlo moments of an additive statistic vs. formula values
    Sample {
        #[command(flatten)]
        session: Session,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value = "1")]
        seed: u64,
        #[arg(long, default_value = "1")]
        streams: u64,
        /// Inline weights a_1,a_2,...,a_n (comma separated)
        #[arg(long, conflicts_with = "weights_file", allow_hyphen_values = true)]
        weights: Option<String>,
        /// Weight file, one value per line, index-implicit
        #[arg(long)]
        weights_file: Option<String>,
    },
    /// Run invariant suites; nonzero exit on any failure
    Verify {
        #[command(flatten)]
        session: Session,
        /// Comma-separated subset of: spectral, hahn, identities, oracle, remark
        #[arg(long)]
        suites: String,
        /// Sweep cells "LO-HI:t1,t2,..." (overrides --n/--theta)
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, default_value = "1")]
        seed: u64,
        /// Random weight vectors per oracle cell
        #[arg(long, default_value = "50")]
        vectors: usize,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum MatrixKind {
    Kernel,
    M,
    L,
    ExpGauge,
    Triangular,
}

pub(crate) fn infer_mode(theta: &str, requested: Option<Mode>) -> Mode {
    requested.unwrap_or_else(|| {
        if theta.contains('.') || theta.contains('e') || theta.contains('E') {
            Mode::Float
        } else {
            Mode::Exact
        }
    })
}

pub(crate) fn emit(out: &Option<String>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {path}"))?,
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

/// Grid spec "LO-HI:t1,t2,...": n sweeps LO..=HI crossed with the theta list.
pub(crate) fn parse_grid(spec: &str) -> Result<(Vec<usize>, Vec<String>)> {
    let (range, thetas) = spec
        .split_once(':')
        .ok_or_else(|| anyhow!("grid must look like 2-30:1/3,1,2"))?;
    let (lo, hi) = range
        .split_once('-')
        .ok_or_else(|| anyhow!("grid range must look like 2-30"))?;
    let lo: usize = lo.trim().parse()?;
    let hi: usize = hi.trim().parse()?;
    if lo > hi {
        bail!("empty grid range {lo}-{hi}");
    }
    let thetas: Vec<String> = thetas.split(',').map(|t| t.trim().to_string()).collect();
    if thetas.is_empty() {
        bail!("grid needs at least one theta");
    }
    Ok(((lo..=hi).collect(), thetas))
}

type CellOutput = Result<(Vec<String>, bool)>;

/// Run one closure per grid cell on a small worker pool; outputs are
/// buffered per cell and emitted in grid order regardless of scheduling.
pub(crate) fn run_grid<F>(cells: &[(usize, String)], f: F) -> CellOutput
where
    F: Fn(usize, &str) -> CellOutput + Sync,
{
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Mutex;
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<CellOutput>>> =
        Mutex::new((0..cells.len()).map(|_| None).collect());
    let workers = std::thread::available_parallelism()
        .map(|p| p.get())
        .unwrap_or(1)
        .min(cells.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                if idx >= cells.len() {
                    break;
                }
                let (n, theta) = &cells[idx];
                let r = f(*n, theta);
                results.lock().unwrap()[idx] = Some(r);
            });
        }
    });
    let mut lines = Vec::new();
    let mut all_pass = true;
    for slot in results.into_inner().unwrap() {
        let (mut cell_lines, pass) = slot.expect("cell executed")?;
        lines.append(&mut cell_lines);
        all_pass &= pass;
    }
    Ok((lines, all_pass))
}

#[derive(Serialize)]
struct TauReport {
    n: usize,
    theta: String,
    mode: &'static str,
    tau_closed: String,
    one_plus_theta_mu2: String,
    rayleigh_at_extremal: String,
    verdict: &'static str,
}

fn tau_report<S: Scalar>(n: usize, theta: ThetaParam<S>) -> Result<TauReport> {
    if n < 2 {
        bail!("{}", ewens_core::Error::NTooSmall { n });
    }
    let t = ThetaTable::new(theta.clone(), n);
    let tau = tau_closed(&theta);
    let via_mu = S::one() + theta.get().clone() * mu_closed(2, &theta);
    let a = extremal_a(&theta, n);
    let ratio = rayleigh_ratio(&t, n, &a)?;
    let equal = if S::EXACT {
        tau == via_mu && tau == ratio
    } else {
        let scale = tau.to_f64().abs().max(1.0);
        (tau.to_f64() - via_mu.to_f64()).abs() <= 1e-12 * scale
            && (tau.to_f64() - ratio.to_f64()).abs() <= 1e-12 * scale
    };
    Ok(TauReport {
        n,
        theta: theta.to_string(),
        mode: S::MODE,
        tau_closed: tau.to_string(),
        one_plus_theta_mu2: via_mu.to_string(),
        rayleigh_at_extremal: ratio.to_string(),
        verdict: if equal { "pass" } else { "fail" },
    })
}

fn format_tau(rep: &TauReport, format: Format) -> String {
    match format {
        Format::Json => format!("{}\n", serde_json::to_string(rep).unwrap()),
        Format::Csv => format!(
            "n,theta,mode,tau_closed,one_plus_theta_mu2,rayleigh_at_extremal,verdict\n{},{},{},{},{},{},{}\n",
            rep.n, rep.theta, rep.mode, rep.tau_closed, rep.one_plus_theta_mu2,
            rep.rayleigh_at_extremal, rep.verdict
        ),
        Format::Plain => format!(
            "n = {}, theta = {} ({})\n  (theta+2)/(theta+1)   = {}\n  1 + theta*mu_2        = {}\n  D/(theta*B) extremal  = {}\n  verdict: {}\n",
            rep.n, rep.theta, rep.mode, rep.tau_closed, rep.one_plus_theta_mu2,
            rep.rayleigh_at_extremal, rep.verdict
        ),
    }
}

fn cmd_tau(session: &Session, grid: &Option<String>) -> Result<bool> {
    let mode = infer_mode(&session.theta, session.mode);
    let cells: Vec<(usize, String)> = match grid {
        Some(spec) => {
            let (ns, thetas) = parse_grid(spec)?;
            ns.iter()
                .flat_map(|&n| thetas.iter().map(move |t| (n, t.clone())))
                .collect()
        }
        None => vec![(session.n, session.theta.clone())],
    };
    let format = session.format;
    let (lines, all_pass) = run_grid(&cells, |n, theta| {
        let rep = match mode {
            Mode::Exact => tau_report::<BigRational>(n, ThetaParam::parse(theta)?)?,
            Mode::Float => tau_report::<f64>(n, ThetaParam::parse(theta)?)?,
        };
        let pass = rep.verdict == "pass";
        Ok((vec![format_tau(&rep, format)], pass))
    })?;
    emit(&session.out, &lines.join(""))?;
    Ok(all_pass)
}

fn spectrum_records_exact(n: usize, theta_text: &str) -> Result<(Vec<SpectrumRecord>, bool)> {
    let theta = ThetaParam::<BigRational>::parse(theta_text)?;
    let t = ThetaTable::new(theta.clone(), n);
    let r_mat = triangularize(&t, n)?;
    let mut pass = r_mat.is_upper_triangular();
    let mut records = Vec::with_capacity(n);
    for r in 1..=n {
        let closed = mu_closed(r, &theta);
        let diag = &r_mat[(r, r)];
        pass &= diag == &closed;
        records.push(SpectrumRecord {
            n,
            theta: theta.to_string(),
            r,
            mu_closed: closed.to_string(),
            mu_numeric: None,
            abs_err: None,
        });
    }
    Ok((records, pass))
}

fn spectrum_records_float(n: usize, theta_text: &str) -> Result<(Vec<SpectrumRecord>, bool)> {
    let theta = ThetaParam::<f64>::parse(theta_text)?;
    let theta_f = *theta.get();
    let numeric = float_spectrum(n, theta_f)?;
    let mut closed: Vec<(usize, f64)> = (1..=n).map(|r| (r, mu_closed(r, &theta))).collect();
    // pair sorted eigenvalues with sorted closed-form values
    closed.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    let mut pass = true;
    let mut records: Vec<SpectrumRecord> = closed
        .iter()
        .zip(&numeric)
        .map(|(&(r, mu), &num)| {
            let err = (mu - num).abs();
            pass &= err < 1e-8;
            SpectrumRecord {
                n,
                theta: theta.to_string(),
                r,
                mu_closed: mu.to_string(),
                mu_numeric: Some(num),
                abs_err: Some(err),
            }
        })
        .collect();
    records.sort_by_key(|rec| rec.r);
    Ok((records, pass))
}

fn cmd_spectrum(session: &Session) -> Result<bool> {
    let mode = infer_mode(&session.theta, session.mode);
    let (records, pass) = match mode {
        Mode::Exact => spectrum_records_exact(session.n, &session.theta)?,
        Mode::Float => spectrum_records_float(session.n, &session.theta)?,
    };
    let mut text = String::new();
    match session.format {
        Format::Json => {
            for rec in &records {
                text.push_str(&serde_json::to_string(rec).unwrap());
                text.push('\n');
            }
        }
        Format::Csv => {
            text.push_str("n,theta,r,mu_closed,mu_numeric,abs_err\n");
            for rec in &records {
                text.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    rec.n,
                    rec.theta,
                    rec.r,
                    rec.mu_closed,
                    rec.mu_numeric.map_or(String::new(), |v| v.to_string()),
                    rec.abs_err.map_or(String::new(), |v| v.to_string()),
                ));
            }
        }
        Format::Plain => {
            text.push_str(&format!(
                "spectrum of M_n, n = {}, theta = {}\n",
                session.n, session.theta
            ));
            for rec in &records {
                match (rec.mu_numeric, rec.abs_err) {
                    (Some(num), Some(err)) => text.push_str(&format!(
                        "  r = {:>3}  mu = {:<24} numeric = {:<24} |err| = {:.3e}\n",
                        rec.r, rec.mu_closed, num, err
                    )),
                    _ => text.push_str(&format!(
                        "  r = {:>3}  mu = {} (triangular diagonal matches exactly)\n",
                        rec.r, rec.mu_closed
                    )),
                }
            }
            text.push_str(if pass {
                "verdict: pass\n"
            } else {
                "verdict: fail\n"
            });
        }
    }
    emit(&session.out, &text)?;
    Ok(pass)
}

fn cmd_matrix(session: &Session, which: MatrixKind) -> Result<bool> {
    let mode = infer_mode(&session.theta, session.mode);
    let n = session.n;
    let text = match which {
        // square-root forms are float by construction
        MatrixKind::M => {
            let theta = ThetaParam::<f64>::parse(&session.theta)?;
            matrix_csv(&build_m_float(n, *theta.get())?)
        }
        MatrixKind::L => {
            let theta = ThetaParam::<f64>::parse(&session.theta)?;
            matrix_csv(&build_l_float(n, *theta.get())?)
        }
        _ => match mode {
            Mode::Exact => {
                let t = ThetaTable::new(ThetaParam::<BigRational>::parse(&session.theta)?, n);
                match which {
                    MatrixKind::Kernel => matrix_csv(build_kernel(&t, n)?.mat()),
                    MatrixKind::ExpGauge => matrix_csv(&exp_l_gauge(&t, n)?),
                    MatrixKind::Triangular => matrix_csv(&triangularize(&t, n)?),
                    _ => unreachable!(),
                }
            }
            Mode::Float => {
                let t = ThetaTable::new(ThetaParam::<f64>::parse(&session.theta)?, n);
                match which {
                    MatrixKind::Kernel => matrix_csv(build_kernel(&t, n)?.mat()),
                    MatrixKind::ExpGauge => matrix_csv(&exp_l_gauge(&t, n)?),
                    MatrixKind::Triangular => matrix_csv(&triangularize(&t, n)?),
                    _ => unreachable!(),
                }
            }
        },
    };
    emit(&session.out, &text)?;
    Ok(true)
}

fn cmd_hahn(session: &Session) -> Result<bool> {
    let n = session.n;
    if n == 0 {
        bail!("{}", ewens_core::Error::NTooSmall { n });
    }
    let text = match infer_mode(&session.theta, session.mode) {
        Mode::Exact => {
            let t = ThetaTable::new(ThetaParam::<BigRational>::parse(&session.theta)?, n);
            hahn_csv(&HahnBasis::build(&t, n)?)
        }
        Mode::Float => {
            let t = ThetaTable::new(ThetaParam::<f64>::parse(&session.theta)?, n);
            hahn_csv(&HahnBasis::build(&t, n)?)
        }
    };
    emit(&session.out, &text)?;
    Ok(true)
}

#[derive(Serialize)]
struct SampleReport {
    n: usize,
    theta: f64,
    count: usize,
    seed: u64,
    streams: u64,
    mean_mc: f64,
    mean_se: f64,
    var_mc: f64,
    var_se: f64,
    mean_formula: f64,
    var_formula: f64,
    mean_z: f64,
    var_z: f64,
}

#[allow(clippy::too_many_arguments)]
fn cmd_sample(
    session: &Session,
    count: usize,
    seed: u64,
    streams: u64,
    weights: &Option<String>,
    weights_file: &Option<String>,
) -> Result<bool> {
    let n = session.n;
    let theta = ThetaParam::<f64>::parse(&session.theta)?;
    let theta_f = *theta.get();
    let a: WeightVector<f64> = match (weights, weights_file) {
        (Some(inline), None) => WeightVector::parse_lines(&inline.replace(',', "\n"))?,
        (None, Some(path)) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
            WeightVector::parse_lines(&text)?
        }
        _ => bail!("provide exactly one of --weights or --weights-file"),
    };
    if a.n() != n {
        bail!(
            "{}",
            ewens_core::Error::DimensionMismatch {
                expected: n,
                got: a.n()
            }
        );
    }
    let est = mc_estimate(n, theta_f, &a.to_f64(), count, seed, streams)?;
    let t = ThetaTable::new(theta.clone(), n);
    let mean_formula = mean_a(&t, n, &a)?;
    let var_formula = variance_d(&t, n, &a)?;
    let mean_z = if est.mean_se > 0.0 {
        (est.mean - mean_formula).abs() / est.mean_se
    } else {
        0.0
    };
    let var_z = if est.var_se > 0.0 {
        (est.var - var_formula).abs() / est.var_se
    } else {
        0.0
    };
    let rep = SampleReport {
        n,
        theta: theta_f,
        count,
        seed,
        streams,
        mean_mc: est.mean,
        mean_se: est.mean_se,
        var_mc: est.var,
        var_se: est.var_se,
        mean_formula,
        var_formula,
        mean_z,
        var_z,
    };
    let text = match session.format {
        Format::Json => format!("{}\n", serde_json::to_string(&rep)?),
        Format::Csv => format!(
            "n,theta,count,seed,streams,mean_mc,mean_se,var_mc,var_se,mean_formula,var_formula,mean_z,var_z\n{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            rep.n, rep.theta, rep.count, rep.seed, rep.streams, rep.mean_mc, rep.mean_se,
            rep.var_mc, rep.var_se, rep.mean_formula, rep.var_formula, rep.mean_z, rep.var_z
        ),
        Format::Plain => format!(
            "n = {}, theta = {}, {} draws (seed {}, {} streams)\n  mean: mc = {:.6} +- {:.6}, formula = {:.6} (z = {:.2})\n  var:  mc = {:.6} +- {:.6}, formula = {:.6} (z = {:.2})\n",
            rep.n, rep.theta, rep.count, rep.seed, rep.streams, rep.mean_mc, rep.mean_se,
            rep.mean_formula, rep.mean_z, rep.var_mc, rep.var_se, rep.var_formula, rep.var_z
        ),
    };
    emit(&session.out, &text)?;
    Ok(rep.mean_z <= 4.0 && rep.var_z <= 4.0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Tau { session, grid } => cmd_tau(session, grid),
        Command::Spectrum { session } => cmd_spectrum(session),
        Command::Matrix { session, which } => cmd_matrix(session, *which),
        Command::Hahn { session } => cmd_hahn(session),
        Command::Identities { session, grid } => suites::cmd_identities(session, grid),
        Command::Oracle {
            session,
            vectors,
            seed,
            count,
        } => suites::cmd_oracle(session, *vectors, *seed, *count),
        Command::Sample {
            session,
            count,
            seed,
            streams,
            weights,
            weights_file,
        } => cmd_sample(session, *count, *seed, *streams, weights, weights_file),
        Command::Verify {
            session,
            suites,
            grid,
            seed,
            vectors,
        } => suites::cmd_verify(session, suites, grid, *seed, *vectors),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
