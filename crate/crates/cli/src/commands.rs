use std::path::PathBuf;

use cesaro_core::{
    dense_spectrum_check, doubling_schedule, eigenpair, ergodic_trace, finite_section_spectrum,
    gamma_norm_bound, log_ratio, operator_norm_witness, product_bound_scan, resolvent_apply,
    Complex, NormTag, Operator, RadialWeight, Resolvent, Series, Strategy, WeightKind,
};
use clap::{Args, Parser, Subcommand};
use log::info;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{ConfigFile, ExperimentConfig, Format, Overrides};
use crate::error::CliError;
use crate::output::{config_hash, emit, read_series, render, Artifact, Cell, Table};
use crate::report;

/// Slack allowed above a theoretical bound before the norm table flags a row.
pub const NORM_SLACK: f64 = 5e-3;

#[derive(Debug, Parser)]
#[command(
    name = "cesaro",
    version,
    about = "Experiments with generalized Cesàro operators C_t"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Flat TOML config; flags override its keys
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Operator parameter in [0, 1]; repeat or comma-separate for lists
    #[arg(long = "t", global = true, value_name = "FLOAT", value_delimiter = ',')]
    pub t: Vec<f64>,
    /// Truncation degree
    #[arg(long = "N", global = true, value_name = "INT")]
    pub truncation: Option<usize>,
    /// Radial grid size for sup-norm estimates
    #[arg(long, global = true, value_name = "INT")]
    pub radii: Option<usize>,
    /// Angular grid size for sup-norm estimates
    #[arg(long, global = true, value_name = "INT")]
    pub angles: Option<usize>,
    /// unit | gamma:<float> | logpow:<int> | table:<path.csv>
    #[arg(long, global = true, value_name = "SPEC")]
    pub weight: Option<String>,
    /// RNG seed (ChaCha8) for random test functions and report checks
    #[arg(long, global = true, value_name = "INT")]
    pub seed: Option<u64>,
    /// Degree of random test functions
    #[arg(long, global = true, value_name = "INT")]
    pub degree: Option<usize>,
    /// Output file (stdout when absent)
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Nu {
    pub re: f64,
    pub im: f64,
}

impl Nu {
    fn complex(self) -> Complex {
        Complex::new(self.re, self.im)
    }
}

fn parse_nu(s: &str) -> Result<Nu, String> {
    let num = |x: &str| {
        x.trim()
            .parse::<f64>()
            .map_err(|_| format!("bad number `{x}`"))
    };
    match s.split_once(',') {
        Some((re, im)) => Ok(Nu {
            re: num(re)?,
            im: num(im)?,
        }),
        None => Ok(Nu {
            re: num(s)?,
            im: 0.0,
        }),
    }
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Apply C_t to a series (JSON pair list or n,re,im CSV)
    Apply {
        #[arg(long)]
        input: PathBuf,
        /// recurrence | matrix | quadrature
        #[arg(long, default_value = "recurrence")]
        strategy: String,
        /// Gauss-Legendre nodes for the quadrature strategy
        #[arg(long, default_value_t = 128)]
        nodes: usize,
    },
    /// Lower-witness estimates of the operator norm on a weighted sup-norm space
    Norm {
        /// f1 | g0 | log:<n> | random:<count> | file:<path>; repeatable
        #[arg(long = "witness", value_name = "WITNESS")]
        witnesses: Vec<String>,
    },
    /// Eigenvalues of the N x N finite section
    Spectrum {
        /// Also run a dense eigensolver (N <= 64) and report its deviation on stderr
        #[arg(long)]
        dense_check: bool,
    },
    /// Eigenfunction for the eigenvalue 1/(m+1)
    Eigen {
        #[arg(long)]
        m: usize,
    },
    /// Solve (C_t - nu I) f = rhs
    Resolvent {
        #[arg(long, value_parser = parse_nu, allow_hyphen_values = true, value_name = "RE,IM")]
        nu: Nu,
        #[arg(long)]
        rhs: PathBuf,
        #[arg(long, value_name = "FLOAT")]
        tol_lambda: Option<f64>,
    },
    /// Products prod |1 - 1/(k nu)| and their scaling by n^{Re(1/nu)}
    LemmaBounds {
        #[arg(long, value_parser = parse_nu, allow_hyphen_values = true, value_name = "RE,IM")]
        nu: Nu,
        #[arg(long, default_value_t = 10_000)]
        nmax: usize,
    },
    /// Distance of Cesàro means to the ergodic limit f(0) g_0
    Ergodic {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 2048)]
        nmax: usize,
        /// k:<int> | ksum:<int> | gamma:<float>
        #[arg(long, default_value = "k:2")]
        norm: String,
    },
    /// Run the acceptance checks and print a summary table
    Report {
        /// Comma-separated criterion numbers (default: all)
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Apply { .. } => "apply",
            Command::Norm { .. } => "norm",
            Command::Spectrum { .. } => "spectrum",
            Command::Eigen { .. } => "eigen",
            Command::Resolvent { .. } => "resolvent",
            Command::LemmaBounds { .. } => "lemma-bounds",
            Command::Ergodic { .. } => "ergodic",
            Command::Report { .. } => "report",
        }
    }
}

pub fn resolve_config(common: &Common) -> Result<ExperimentConfig, CliError> {
    let file = match &common.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    ExperimentConfig::resolve(
        file,
        Overrides {
            truncation: common.truncation,
            radii: common.radii,
            angles: common.angles,
            t_list: common.t.clone(),
            weight: common.weight.clone(),
            seed: common.seed,
            degree: common.degree,
            output: common.out.clone(),
            format: common.format,
        },
    )
}

/// Runs the command; `Ok(false)` means it ran but some check failed.
pub fn execute(cli: &Cli) -> Result<bool, CliError> {
    let cfg = resolve_config(&cli.common)?;
    let (artifact, passed) = match &cli.command {
        Command::Apply {
            input,
            strategy,
            nodes,
        } => (apply(&cfg, input, strategy, *nodes)?, true),
        Command::Norm { witnesses } => norm(&cfg, witnesses)?,
        Command::Spectrum { dense_check } => (spectrum(&cfg, *dense_check)?, true),
        Command::Eigen { m } => {
            let p = eigenpair(cfg.single_t()?, *m, cfg.truncation)?;
            (Artifact::Series(p.eigenseries), true)
        }
        Command::Resolvent {
            nu,
            rhs,
            tol_lambda,
        } => (resolvent(&cfg, *nu, rhs, *tol_lambda)?, true),
        Command::LemmaBounds { nu, nmax } => (lemma_bounds(*nu, *nmax)?, true),
        Command::Ergodic { input, nmax, norm } => (ergodic(&cfg, input, *nmax, norm)?, true),
        Command::Report { only } => {
            let (table, ok) = report::run(&cfg, only)?;
            (Artifact::Table(table), ok)
        }
    };
    let hash = config_hash(cli.command.name(), &cli.command, &cfg);
    let bytes = render(&artifact, cfg.format, &hash)?;
    emit(&bytes, cfg.output.as_deref())?;
    Ok(passed)
}

fn apply(
    cfg: &ExperimentConfig,
    input: &std::path::Path,
    strategy: &str,
    nodes: usize,
) -> Result<Artifact, CliError> {
    let t = cfg.single_t()?;
    let strategy = match strategy.parse::<Strategy>()? {
        Strategy::Quadrature { .. } => Strategy::Quadrature { nodes },
        s => s,
    };
    if nodes == 0 {
        return Err(CliError::validation("--nodes must be at least 1"));
    }
    let f = read_series(input)?.with_degree(cfg.truncation);
    let op = Operator::new(t)?.with_strategy(strategy);
    Ok(Artifact::Series(op.apply(&f)))
}

/// Builds the witness pool for one value of `t`.
pub fn witnesses(
    cfg: &ExperimentConfig,
    specs: &[String],
    t: f64,
) -> Result<Vec<Series>, CliError> {
    let n = cfg.truncation;
    let default = ["f1".to_string(), "g0".to_string()];
    let specs = if specs.is_empty() {
        &default[..]
    } else {
        specs
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::new();
    for spec in specs {
        let (tag, arg) = spec.split_once(':').unwrap_or((spec.as_str(), ""));
        let int = |what: &str| {
            arg.parse::<u32>()
                .map_err(|_| CliError::validation(format!("witness `{spec}`: bad {what}")))
        };
        match tag {
            "f1" => out.push(Series::constant(Complex::new(1.0, 0.0), 0)),
            "g0" => out.push(Series::geometric(t, n)),
            "log" => {
                let p = int("power")?;
                if p == 0 {
                    return Err(CliError::validation("log witness power must be >= 1"));
                }
                out.push(Series::log_one_minus(n).power_truncated(p, n));
            }
            "random" => {
                for _ in 0..int("count")? {
                    out.push(Series::random(&mut rng, cfg.degree));
                }
            }
            "file" => out.push(read_series(std::path::Path::new(arg))?),
            _ => return Err(CliError::validation(format!("unknown witness `{spec}`"))),
        }
    }
    Ok(out)
}

/// One row per `t`: witness estimate against `-log(1-t)/t` and, for standard
/// weights, against `min{-log(1-t)/t, M_gamma/gamma}`.
fn norm(cfg: &ExperimentConfig, specs: &[String]) -> Result<(Artifact, bool), CliError> {
    if cfg.t_list.is_empty() {
        return Err(CliError::validation("norm needs at least one --t"));
    }
    let weight = RadialWeight::parse_spec(&cfg.weight)?;
    let grid = cfg.grid();
    let mut table = Table::new(&[
        "t",
        "estimate",
        "direction",
        "upper_bound",
        "bound_formula",
        "gamma_bound",
        "violation",
    ]);
    let mut clean = true;
    for &t in &cfg.t_list {
        let pool = witnesses(cfg, specs, t)?;
        let est = operator_norm_witness(t, &weight, &pool, cfg.truncation, &grid)?;
        let upper = log_ratio(t);
        let gamma = match weight.kind() {
            WeightKind::StandardGamma(g) => Some(upper.min(gamma_norm_bound(*g)?.ratio)),
            _ => None,
        };
        let tightest = gamma.unwrap_or(upper);
        let violation = est.value > tightest + NORM_SLACK;
        clean &= !violation;
        info!("t={t}: estimate {} bound {tightest}", est.value);
        table.push(vec![
            t.into(),
            est.value.into(),
            "lower-witness".into(),
            upper.into(),
            "-log(1-t)/t".into(),
            gamma.map_or(Cell::from(""), Cell::from),
            violation.into(),
        ]);
    }
    Ok((Artifact::Table(table), clean))
}

fn spectrum(cfg: &ExperimentConfig, dense: bool) -> Result<Artifact, CliError> {
    let t = cfg.single_t()?;
    let values = finite_section_spectrum(t, cfg.truncation)?;
    if dense {
        let dev = dense_spectrum_check(t, cfg.truncation)?;
        eprintln!("dense eigensolver deviation: {dev:e}");
    }
    let mut table = Table::new(&["n", "lambda"]);
    for (n, l) in values.into_iter().enumerate() {
        table.push(vec![n.into(), l.into()]);
    }
    Ok(Artifact::Table(table))
}

fn resolvent(
    cfg: &ExperimentConfig,
    nu: Nu,
    rhs: &std::path::Path,
    tol: Option<f64>,
) -> Result<Artifact, CliError> {
    let t = cfg.single_t()?;
    let g = read_series(rhs)?;
    let g = g.with_degree(g.degree().max(cfg.truncation));
    let q = match tol {
        Some(tol) => Resolvent::with_tolerance(nu.complex(), g, tol)?,
        None => Resolvent::new(nu.complex(), g)?,
    };
    Ok(Artifact::Series(resolvent_apply(&q, t)?))
}

fn lemma_bounds(nu: Nu, nmax: usize) -> Result<Artifact, CliError> {
    let rep = product_bound_scan(nu.complex(), nmax)?;
    eprintln!(
        "alpha = {}, d_hat = {}, D_hat = {}, last-decade slope = {:e}",
        rep.alpha, rep.d_hat, rep.big_d_hat, rep.trend_slope
    );
    let mut table = Table::new(&["n", "p_n", "scaled"]);
    for s in &rep.samples {
        table.push(vec![s.n.into(), s.p_n.into(), s.scaled.into()]);
    }
    Ok(Artifact::Table(table))
}

fn ergodic(
    cfg: &ExperimentConfig,
    input: &std::path::Path,
    nmax: usize,
    norm: &str,
) -> Result<Artifact, CliError> {
    let t = cfg.single_t()?;
    if nmax == 0 {
        return Err(CliError::validation("--nmax must be at least 1"));
    }
    let mut tag = NormTag::parse(norm)?;
    if let NormTag::Weighted(_, grid) = &mut tag {
        *grid = cfg.grid();
    }
    let f = read_series(input)?.with_degree(cfg.truncation);
    let trace = ergodic_trace(t, &f, &doubling_schedule(nmax), tag)?;
    let mut table = Table::new(&["n", "distance"]);
    for (&n, &d) in trace.n_values.iter().zip(&trace.distances) {
        table.push(vec![n.into(), d.into()]);
    }
    Ok(Artifact::Table(table))
}
