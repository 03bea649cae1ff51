use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Parsed command line. [`RunConfig::to_args`] renders it back to a
/// canonical flag list that parses to an identical value.
#[derive(Debug, Clone, PartialEq, Parser)]
#[command(
    name = "heston-stab",
    version,
    about = "Stability checks for the central finite-difference Heston semi-discretization"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand)]
pub enum Command {
    /// Assemble A1..A5 and report their structure, optionally dumping them.
    Operators(OperatorsArgs),
    /// Run stability checks on one parameter set.
    Check(CheckArgs),
    /// Evaluate the row certificates for a list of y values.
    Certificate(CertificateArgs),
    /// Estimate max_t ||exp(t(A3+A4+A5))||_2 over a parameter sweep.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct ModelArgs {
    #[arg(long, default_value_t = 0.05, allow_negative_numbers = true)]
    pub r: f64,
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    pub kappa: f64,
    #[arg(long, default_value_t = 0.04, allow_negative_numbers = true)]
    pub eta: f64,
    #[arg(long, default_value_t = 0.2, allow_negative_numbers = true)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub rho: f64,
    /// Barrier L (lower end of the s-interval).
    #[arg(
        long,
        visible_alias = "L",
        default_value_t = 0.0,
        allow_negative_numbers = true
    )]
    pub barrier: f64,
    /// Truncation S of the s-interval.
    #[arg(
        long = "s-max",
        visible_alias = "S",
        default_value_t = 800.0,
        allow_negative_numbers = true
    )]
    pub s_max: f64,
    /// Truncation V of the v-interval.
    #[arg(
        long = "v-max",
        visible_alias = "V",
        default_value_t = 5.0,
        allow_negative_numbers = true
    )]
    pub v_max: f64,
    /// Interior points in v.
    #[arg(long, default_value_t = 5)]
    pub m2: usize,
    /// Interior points in s; defaults to 2 * m2.
    #[arg(long)]
    pub m1: Option<usize>,
}

impl ModelArgs {
    pub fn m1(&self) -> usize {
        self.m1.unwrap_or(2 * self.m2)
    }

    fn push_args(&self, out: &mut Vec<String>) {
        flag(out, "r", self.r);
        flag(out, "kappa", self.kappa);
        flag(out, "eta", self.eta);
        flag(out, "sigma", self.sigma);
        flag(out, "rho", self.rho);
        flag(out, "barrier", self.barrier);
        flag(out, "s-max", self.s_max);
        flag(out, "v-max", self.v_max);
        flag(out, "m2", self.m2);
        if let Some(m1) = self.m1 {
            flag(out, "m1", m1);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct ToleranceArgs {
    /// Convergence tolerance of the iterative norm estimates.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Slack for sign checks, relative to the matrix max entry.
    #[arg(long = "sign-tol", default_value_t = 1e-8)]
    pub sign_tol: f64,
    /// Slack for exponential bounds.
    #[arg(long = "exp-tol", default_value_t = 1e-8)]
    pub exp_tol: f64,
    /// Hermitian eigensolver: auto, power or direct.
    #[arg(long, default_value = "auto")]
    pub eigensolver: String,
}

impl ToleranceArgs {
    fn push_args(&self, out: &mut Vec<String>) {
        flag(out, "tol", self.tol);
        flag(out, "sign-tol", self.sign_tol);
        flag(out, "exp-tol", self.exp_tol);
        flag(out, "eigensolver", &self.eigensolver);
    }
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct OperatorsArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Directory receiving one text file per operator.
    #[arg(long = "dump-dir")]
    pub dump_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub tolerances: ToleranceArgs,
    /// Comma-separated check names; all registered checks when omitted.
    #[arg(long, value_delimiter = ',')]
    pub checks: Vec<String>,
    /// Print the registered checks and exit.
    #[arg(long = "list-checks")]
    pub list_checks: bool,
    /// Number of roots of unity sampled on |zeta| = 1.
    #[arg(long = "zeta-samples", default_value_t = 64)]
    pub zeta_samples: usize,
    /// Times at which exponential bounds are checked.
    #[arg(long = "t-samples", value_delimiter = ',', default_values_t = [0.0, 0.5, 1.0, 2.0, 5.0, 10.0])]
    pub t_samples: Vec<f64>,
    /// CSV file receiving every check.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print every check, not only failures.
    #[arg(long, short)]
    pub verbose: bool,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct CertificateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub tolerances: ToleranceArgs,
    /// Comma-separated y values.
    #[arg(
        long = "y",
        value_delimiter = ',',
        allow_hyphen_values = true,
        default_values_t = [0.0, 0.1, -0.1, 0.25, -0.25, 0.49, -0.49, 0.5, -0.5, 0.6, -0.6, 1.0, -1.0, 5.0, -5.0]
    )]
    pub y: Vec<f64>,
    /// CSV file receiving every check.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// CSV file receiving every certificate row.
    #[arg(long = "rows-out")]
    pub rows_out: Option<PathBuf>,
    #[arg(long, short)]
    pub verbose: bool,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct SweepArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.2])]
    pub sigmas: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [-1.0, 0.0, 1.0])]
    pub rhos: Vec<f64>,
    #[arg(long, visible_alias = "Ls", value_delimiter = ',', default_values_t = [0.0, 10.0])]
    pub barriers: Vec<f64>,
    /// Values of m2; defaults to 5,7,...,15 (or up to 25 with --full).
    #[arg(long, value_delimiter = ',', conflicts_with = "full")]
    pub m2s: Vec<usize>,
    /// Extend the default m2 list to 25.
    #[arg(long)]
    pub full: bool,
    /// Not accepted: the sweep always uses m1 = 2 * m2.
    #[arg(long, hide = true)]
    pub m1: Option<usize>,
    #[arg(long = "s-max", visible_alias = "S", default_value_t = 800.0)]
    pub s_max: f64,
    #[arg(long = "v-max", visible_alias = "V", default_value_t = 5.0)]
    pub v_max: f64,
    #[arg(long = "t-max", default_value_t = 100.0)]
    pub t_max: f64,
    #[arg(long = "t-step", default_value_t = 1.0)]
    pub t_step: f64,
    /// Refinement levels around the coarse argmax.
    #[arg(long, default_value_t = 2)]
    pub refine: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// CSV output; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory receiving one `m2,max_norm2` series per (sigma, rho, L).
    #[arg(long = "plot-dir")]
    pub plot_dir: Option<PathBuf>,
}

fn flag(out: &mut Vec<String>, name: &str, value: impl std::fmt::Display) {
    out.push(format!("--{name}={value}"));
}

fn list<T: std::fmt::Display>(out: &mut Vec<String>, name: &str, values: &[T]) {
    let joined: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    flag(out, name, joined.join(","));
}

fn path(out: &mut Vec<String>, name: &str, value: &Option<PathBuf>) {
    if let Some(p) = value {
        flag(out, name, p.display());
    }
}

impl RunConfig {
    /// Canonical arguments (without the program name): every flag spelled
    /// out as `--name=value`, in a fixed order.
    pub fn to_args(&self) -> Vec<String> {
        let mut out = Vec::new();
        match &self.command {
            Command::Operators(a) => {
                out.push("operators".into());
                a.model.push_args(&mut out);
                path(&mut out, "dump-dir", &a.dump_dir);
            }
            Command::Check(a) => {
                out.push("check".into());
                a.model.push_args(&mut out);
                a.tolerances.push_args(&mut out);
                if !a.checks.is_empty() {
                    list(&mut out, "checks", &a.checks);
                }
                if a.list_checks {
                    out.push("--list-checks".into());
                }
                flag(&mut out, "zeta-samples", a.zeta_samples);
                list(&mut out, "t-samples", &a.t_samples);
                path(&mut out, "out", &a.out);
                if a.verbose {
                    out.push("--verbose".into());
                }
            }
            Command::Certificate(a) => {
                out.push("certificate".into());
                a.model.push_args(&mut out);
                a.tolerances.push_args(&mut out);
                list(&mut out, "y", &a.y);
                path(&mut out, "out", &a.out);
                path(&mut out, "rows-out", &a.rows_out);
                if a.verbose {
                    out.push("--verbose".into());
                }
            }
            Command::Sweep(a) => {
                out.push("sweep".into());
                list(&mut out, "sigmas", &a.sigmas);
                list(&mut out, "rhos", &a.rhos);
                list(&mut out, "barriers", &a.barriers);
                if !a.m2s.is_empty() {
                    list(&mut out, "m2s", &a.m2s);
                }
                if a.full {
                    out.push("--full".into());
                }
                if let Some(m1) = a.m1 {
                    flag(&mut out, "m1", m1);
                }
                flag(&mut out, "s-max", a.s_max);
                flag(&mut out, "v-max", a.v_max);
                flag(&mut out, "t-max", a.t_max);
                flag(&mut out, "t-step", a.t_step);
                flag(&mut out, "refine", a.refine);
                flag(&mut out, "tol", a.tol);
                path(&mut out, "out", &a.out);
                path(&mut out, "plot-dir", &a.plot_dir);
            }
        }
        out
    }

    /// [`RunConfig::to_args`] joined by single spaces.
    pub fn canonical(&self) -> String {
        self.to_args().join(" ")
    }

    /// Parses `argv` without the program name.
    pub fn parse_args<I, T>(argv: I) -> Result<Self, clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<std::ffi::OsString> + Clone,
    {
        Self::try_parse_from(
            std::iter::once(std::ffi::OsString::from("heston-stab"))
                .chain(argv.into_iter().map(Into::into)),
        )
    }
}
