use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use heston_stability::experiments::{
    check_growth_trend, check_records, compare_barrier_effect, run_sweep, SweepConfig, TimeSampling,
};
use heston_stability::linalg::{eigensolver, log_norm_2, log_norm_d, Settings};
use heston_stability::operators::{commutator_check, write_matrix_text};
use heston_stability::stability::{
    certificate_for, BoundCheck, CheckContext, CheckRegistry, CheckSettings,
};
use heston_stability::{build_operators, make_grid, scaling_matrices, GridSpec, HestonParams};
use thiserror::Error;

use crate::args::{
    CertificateArgs, CheckArgs, Command, ModelArgs, OperatorsArgs, RunConfig, SweepArgs,
    ToleranceArgs,
};
use crate::output::{emit_plot_data, write_csv, write_csv_file};

/// Window in which the sweep maximum is expected to be attained.
const ARGMAX_WINDOW: f64 = 5.0;
const COMMUTATOR_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] heston_stability::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_numerical() => 3,
            _ => 2,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// How a successful run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    AllHold,
    ChecksFailed,
    /// Some sweep cases could not be evaluated.
    CasesFailed,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::AllHold => 0,
            Status::ChecksFailed => 1,
            Status::CasesFailed => 3,
        }
    }

    fn from_checks<'a>(checks: impl IntoIterator<Item = &'a BoundCheck>) -> Self {
        if checks.into_iter().all(|c| c.holds) {
            Status::AllHold
        } else {
            Status::ChecksFailed
        }
    }
}

/// Executes `cfg`. Reports go to `out`; sweep CSV without `--out` also goes
/// to `out`, with its report moved to `err`.
pub fn run<O: Write, E: Write>(
    cfg: &RunConfig,
    out: &mut O,
    err: &mut E,
) -> Result<Status, CliError> {
    let io = |e: io::Error| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source: e,
    };
    match &cfg.command {
        Command::Operators(a) => run_operators(a, out).map_err(|e| e.or_io(io)),
        Command::Check(a) => run_check(a, out).map_err(|e| e.or_io(io)),
        Command::Certificate(a) => run_certificate(a, out).map_err(|e| e.or_io(io)),
        Command::Sweep(a) => run_sweep_cmd(a, out, err).map_err(|e| e.or_io(io)),
    }
}

/// Internal error: either a finished [`CliError`] or a bare write failure on
/// the report stream.
enum RunError {
    Cli(CliError),
    Stream(io::Error),
}

impl RunError {
    fn or_io(self, f: impl FnOnce(io::Error) -> CliError) -> CliError {
        match self {
            RunError::Cli(e) => e,
            RunError::Stream(e) => f(e),
        }
    }
}

impl From<CliError> for RunError {
    fn from(e: CliError) -> Self {
        RunError::Cli(e)
    }
}

impl From<heston_stability::Error> for RunError {
    fn from(e: heston_stability::Error) -> Self {
        RunError::Cli(e.into())
    }
}

impl From<io::Error> for RunError {
    fn from(e: io::Error) -> Self {
        RunError::Stream(e)
    }
}

fn model(m: &ModelArgs) -> Result<(HestonParams, GridSpec), CliError> {
    let params = HestonParams::new(
        m.r, m.kappa, m.eta, m.sigma, m.rho, m.barrier, m.s_max, m.v_max,
    )?;
    let grid = make_grid(&params, m.m1(), m.m2)?;
    Ok((params, grid))
}

fn settings(t: &ToleranceArgs) -> Result<CheckSettings, CliError> {
    for (name, v) in [
        ("tol", t.tol),
        ("sign-tol", t.sign_tol),
        ("exp-tol", t.exp_tol),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(CliError::Usage(format!(
                "--{name} must be a positive number, got {v}"
            )));
        }
    }
    let mut s = CheckSettings::default();
    s.linalg.tol = t.tol;
    s.linalg.eigensolver = eigensolver(&t.eigensolver)?;
    s.sign_tol = t.sign_tol;
    s.exp_tol = t.exp_tol;
    Ok(s)
}

fn report<W: Write + ?Sized>(out: &mut W, checks: &[BoundCheck], verbose: bool) -> io::Result<()> {
    for c in checks.iter().filter(|c| verbose || !c.holds) {
        writeln!(
            out,
            "  [{}] {}: lhs={:.6e} rhs={:.6e} margin={:.3e}",
            if c.holds { "ok" } else { "FAIL" },
            c.name,
            c.lhs,
            c.rhs,
            c.margin
        )?;
    }
    Ok(())
}

fn summary_line<W: Write + ?Sized>(
    out: &mut W,
    label: &str,
    checks: &[BoundCheck],
) -> io::Result<()> {
    let held = checks.iter().filter(|c| c.holds).count();
    let min_margin = checks.iter().map(|c| c.margin).fold(f64::INFINITY, |a, b| {
        if b < a || b.is_nan() {
            b
        } else {
            a
        }
    });
    writeln!(
        out,
        "{label}: {held}/{} hold, min margin {min_margin:.3e}",
        checks.len()
    )
}

fn run_operators<W: Write>(a: &OperatorsArgs, out: &mut W) -> Result<Status, RunError> {
    let (params, grid) = model(&a.model)?;
    let ops = build_operators(&params, &grid);
    let s = Settings::default();
    writeln!(
        out,
        "grid: m1={} m2={} m={}",
        grid.m1(),
        grid.m2(),
        grid.m()
    )?;
    writeln!(out, "ds={:.6e} dv={:.6e}", grid.ds(), grid.dv())?;
    let named = [
        ("A1", &ops.a1),
        ("A2", &ops.a2),
        ("A3", &ops.a3),
        ("A4", &ops.a4),
        ("A5", &ops.a5),
        ("A", &ops.a),
        ("A3+A4+A5", &ops.diffusion),
    ];
    for (name, m) in named {
        let nnz = m.iter().filter(|x| **x != 0.0).count();
        writeln!(
            out,
            "{name}: nnz={nnz} mu2={:.10e}",
            log_norm_2(m, &s)?.value
        )?;
    }
    let d = scaling_matrices(&grid).d;
    writeln!(
        out,
        "muD[A3+A4+A5]={:.10e}",
        log_norm_d(&ops.diffusion, &d, &s)?.value
    )?;
    let residual = commutator_check(&grid);
    let check = BoundCheck::le(
        "commutator identity residual",
        residual,
        COMMUTATOR_TOL,
        0.0,
    );
    writeln!(out, "commutator residual={residual:.3e}")?;

    if let Some(dir) = &a.dump_dir {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let files = [
            ("A1.txt", &ops.a1),
            ("A2.txt", &ops.a2),
            ("A3.txt", &ops.a3),
            ("A4.txt", &ops.a4),
            ("A5.txt", &ops.a5),
            ("A.txt", &ops.a),
        ];
        for (file, m) in files {
            let path = dir.join(file);
            let f = fs::File::create(&path).map_err(io_err(&path))?;
            write_matrix_text(m, io::BufWriter::new(f)).map_err(io_err(&path))?;
        }
        writeln!(out, "wrote {} matrices to {}", files.len(), dir.display())?;
    }
    Ok(Status::from_checks([&check]))
}

fn run_check<W: Write>(a: &CheckArgs, out: &mut W) -> Result<Status, RunError> {
    let registry = CheckRegistry::with_defaults();
    if a.list_checks {
        for name in registry.names() {
            writeln!(out, "{name}: {}", registry.get(name)?.description())?;
        }
        return Ok(Status::AllHold);
    }
    let (params, grid) = model(&a.model)?;
    let mut s = settings(&a.tolerances)?;
    s.zeta_samples = a.zeta_samples;
    s.t_samples = a.t_samples.clone();
    let ops = build_operators(&params, &grid);
    let ctx = CheckContext {
        params: &params,
        grid: &grid,
        ops: &ops,
        settings: &s,
    };
    let results = registry.run_selected(&a.checks, &ctx)?;
    let mut all = Vec::new();
    for (name, checks) in results {
        summary_line(out, name, &checks)?;
        report(out, &checks, a.verbose)?;
        all.extend(checks);
    }
    let status = Status::from_checks(&all);
    writeln!(
        out,
        "{}",
        if status == Status::AllHold {
            "PASS"
        } else {
            "FAIL"
        }
    )?;
    if let Some(path) = &a.out {
        write_csv_file(&all, path).map_err(io_err(path))?;
    }
    Ok(status)
}

fn run_certificate<W: Write>(a: &CertificateArgs, out: &mut W) -> Result<Status, RunError> {
    let (_, grid) = model(&a.model)?;
    let s = settings(&a.tolerances)?;
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for &y in &a.y {
        let cert = certificate_for(&grid, y, &s)?;
        let cert_checks: Vec<BoundCheck> = cert.all_checks().cloned().collect();
        summary_line(out, &format!("y={y}"), &cert_checks)?;
        report(out, &cert_checks, a.verbose)?;
        checks.extend(cert_checks);
        rows.extend(cert.rows);
    }
    let status = Status::from_checks(&checks);
    writeln!(
        out,
        "{}",
        if status == Status::AllHold {
            "PASS"
        } else {
            "FAIL"
        }
    )?;
    if let Some(path) = &a.out {
        write_csv_file(&checks, path).map_err(io_err(path))?;
    }
    if let Some(path) = &a.rows_out {
        write_csv_file(&rows, path).map_err(io_err(path))?;
    }
    Ok(status)
}

/// Builds the sweep configuration, rejecting flags that contradict the
/// fixed `m1 = 2 m2` layout.
pub fn sweep_config(a: &SweepArgs) -> Result<SweepConfig, CliError> {
    if a.m1.is_some() {
        return Err(CliError::Usage(
            "--m1 cannot be set for a sweep: every case uses m1 = 2 * m2".into(),
        ));
    }
    let base = if a.full {
        SweepConfig::full()
    } else {
        SweepConfig::default()
    };
    let settings = Settings {
        tol: a.tol,
        ..Settings::default()
    };
    Ok(SweepConfig {
        sigmas: a.sigmas.clone(),
        rhos: a.rhos.clone(),
        barriers: a.barriers.clone(),
        m2s: if a.m2s.is_empty() {
            base.m2s.clone()
        } else {
            a.m2s.clone()
        },
        s_max: a.s_max,
        v_max: a.v_max,
        sampling: TimeSampling {
            t_max: a.t_max,
            coarse_step: a.t_step,
            refine_levels: a.refine,
        },
        settings,
        ..base
    })
}

fn run_sweep_cmd<O: Write, E: Write>(
    a: &SweepArgs,
    out: &mut O,
    err: &mut E,
) -> Result<Status, RunError> {
    let config = sweep_config(a)?;
    let records = run_sweep(&config)?;
    match &a.out {
        Some(path) => write_csv_file(&records, path).map_err(io_err(path))?,
        None => write_csv(&records, &mut *out)?,
    }
    if let Some(dir) = &a.plot_dir {
        emit_plot_data(&records, dir).map_err(io_err(dir))?;
    }
    let log: &mut dyn Write = if a.out.is_some() { out } else { err };

    let failed: Vec<_> = records.iter().filter(|r| r.failure.is_some()).collect();
    for r in &failed {
        writeln!(
            log,
            "case L={} sigma={} rho={} m2={} failed: {}",
            r.barrier,
            r.sigma,
            r.rho,
            r.m2,
            r.failure.as_deref().unwrap_or_default()
        )?;
    }
    let per_record = check_records(&records, ARGMAX_WINDOW);
    summary_line(log, "records", &per_record)?;
    report(log, &per_record, false)?;
    let mut all = per_record;

    let has_zero = config.barriers.contains(&0.0);
    if has_zero && config.barriers.len() > 1 {
        let ordering = compare_barrier_effect(&records)?;
        summary_line(log, "barrier ordering", &ordering)?;
        report(log, &ordering, false)?;
        all.extend(ordering);
    }
    let growth = check_growth_trend(&records);
    if !growth.is_empty() {
        summary_line(log, "growth trend", &growth)?;
        report(log, &growth, false)?;
        all.extend(growth);
    }

    if !failed.is_empty() {
        writeln!(
            log,
            "FAIL: {} of {} cases could not be evaluated",
            failed.len(),
            records.len()
        )?;
        return Ok(Status::CasesFailed);
    }
    let status = Status::from_checks(&all);
    writeln!(
        log,
        "{}",
        if status == Status::AllHold {
            "PASS"
        } else {
            "FAIL"
        }
    )?;
    Ok(status)
}
