use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use heston_stability::experiments::SweepRecord;
use heston_stability::stability::{BoundCheck, CertificateRow};

/// A row type with a fixed CSV layout. Fields must not contain commas or
/// newlines; nothing is quoted.
pub trait CsvRecord {
    const HEADER: &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

impl CsvRecord for SweepRecord {
    const HEADER: &'static [&'static str] = &[
        "m2",
        "m1",
        "L",
        "sigma",
        "rho",
        "S",
        "V",
        "max_norm2",
        "t_argmax",
        "max_normD",
        "bound",
        "within_bound",
    ];

    fn fields(&self) -> Vec<String> {
        vec![
            self.m2.to_string(),
            self.m1.to_string(),
            fmt_f64(self.barrier),
            fmt_f64(self.sigma),
            fmt_f64(self.rho),
            fmt_f64(self.s_max),
            fmt_f64(self.v_max),
            fmt_f64(self.max_norm2),
            fmt_f64(self.t_argmax),
            fmt_f64(self.max_norm_d),
            fmt_f64(self.bound),
            self.within_bound.to_string(),
        ]
    }
}

impl CsvRecord for BoundCheck {
    const HEADER: &'static [&'static str] = &["name", "lhs", "rhs", "margin", "tol", "holds"];

    fn fields(&self) -> Vec<String> {
        vec![
            self.name.clone(),
            fmt_f64(self.lhs),
            fmt_f64(self.rhs),
            fmt_f64(self.margin),
            fmt_f64(self.tol),
            self.holds.to_string(),
        ]
    }
}

impl CsvRecord for CertificateRow {
    const HEADER: &'static [&'static str] = &[
        "y",
        "i",
        "nu",
        "eps",
        "a",
        "b",
        "alpha",
        "beta_mag",
        "gamma_mag",
        "theta",
        "row_value",
    ];

    fn fields(&self) -> Vec<String> {
        vec![
            fmt_f64(self.y),
            self.i.to_string(),
            fmt_f64(self.nu),
            fmt_opt(self.eps),
            fmt_opt(self.a),
            fmt_opt(self.b),
            fmt_f64(self.alpha),
            fmt_f64(self.beta_mag),
            fmt_f64(self.gamma_mag),
            fmt_opt(self.theta),
            fmt_f64(self.row_value),
        ]
    }
}

fn write_line<W: Write>(out: &mut W, fields: &[impl AsRef<str>]) -> io::Result<()> {
    for (k, f) in fields.iter().enumerate() {
        let f = f.as_ref();
        if f.contains([',', '\n', '\r']) {
            return Err(io::Error::new(
                io::ErrorKind::InvalidData,
                format!("CSV field needs quoting: {f:?}"),
            ));
        }
        if k > 0 {
            out.write_all(b",")?;
        }
        out.write_all(f.as_bytes())?;
    }
    out.write_all(b"\n")
}

/// Header row, then one row per record.
pub fn write_csv<R: CsvRecord, W: Write>(records: &[R], mut out: W) -> io::Result<()> {
    write_line(&mut out, R::HEADER)?;
    for r in records {
        write_line(&mut out, &r.fields())?;
    }
    out.flush()
}

pub fn write_csv_file<R: CsvRecord>(records: &[R], path: &Path) -> io::Result<()> {
    write_csv(records, BufWriter::new(File::create(path)?))
}

/// File name of the `(sigma, rho, L)` series.
pub fn series_file_name(sigma: f64, rho: f64, barrier: f64) -> String {
    format!("sigma{sigma}_rho{rho}_L{barrier}.csv")
}

/// Writes one `m2,max_norm2` file per `(sigma, rho, L)` into `dir`, creating
/// it if needed. Panels are `(sigma, rho)`, series within a panel are `L`.
/// Returns the written paths in sweep order.
pub fn emit_plot_data(records: &[SweepRecord], dir: &Path) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut series: BTreeMap<String, Vec<&SweepRecord>> = BTreeMap::new();
    let mut order = Vec::new();
    for r in records {
        let name = series_file_name(r.sigma, r.rho, r.barrier);
        if !series.contains_key(&name) {
            order.push(name.clone());
        }
        series.entry(name).or_default().push(r);
    }
    let mut written = Vec::with_capacity(order.len());
    for name in order {
        let path = dir.join(&name);
        let mut out = BufWriter::new(File::create(&path)?);
        write_line(&mut out, &["m2", "max_norm2"])?;
        let mut points = series[&name].clone();
        points.sort_by_key(|r| r.m2);
        for r in points {
            write_line(&mut out, &[r.m2.to_string(), fmt_f64(r.max_norm2)])?;
        }
        out.flush()?;
        written.push(path);
    }
    Ok(written)
}
