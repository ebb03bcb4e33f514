//! CSV tables and gnuplot scripts.

use std::path::Path;

use mimo_recip_core::montecarlo::{SweepRow, SweepTable};

pub const CSV_HEADER: [&str; 18] = [
    "sweep_variable",
    "sweep_value",
    "scheme",
    "sinr_analytic_db",
    "sinr_mc_db",
    "sinr_mc_stderr_db",
    "sinr_mean_ratio_db",
    "A_t",
    "A_r",
    "A_I",
    "B_I",
    "tau2",
    "M",
    "K",
    "rho_db",
    "trials",
    "master_seed",
    "redraws",
];

/// `printf("%.{digits}g", x)`.
pub fn format_g(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let p = digits.max(1);
    // exponent after rounding to p significant digits
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -4 || exp >= p as i32 {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn g12(x: f64) -> String {
    format_g(x, 12)
}

fn row_fields(r: &SweepRow) -> [String; 18] {
    [
        r.variable.name().to_string(),
        g12(r.value),
        r.scheme.name().to_string(),
        g12(r.analytic.sinr_db),
        g12(r.mc.sinr_db()),
        g12(r.mc.stderr_db()),
        g12(r.mc.mean_ratio_db()),
        g12(r.factors.a_t),
        g12(r.factors.a_r),
        g12(r.factors.a_i),
        g12(r.factors.b_i),
        g12(r.cfg.tau2()),
        r.cfg.m.to_string(),
        r.cfg.k.to_string(),
        g12(r.cfg.rho_db()),
        r.trials.to_string(),
        r.master_seed.to_string(),
        r.mc.redraws.to_string(),
    ]
}

/// Writes a header and arbitrary rows as RFC 4180 CSV.
pub fn csv_bytes<I, R>(header: &[&str], rows: I) -> Vec<u8>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// The sweep table in the documented column layout.
pub fn sweep_csv(table: &SweepTable) -> Vec<u8> {
    csv_bytes(&CSV_HEADER, table.rows.iter().map(row_fields))
}

/// One curve of a gnuplot plot.
pub struct PlotSeries<'a> {
    pub csv: &'a str,
    pub label: &'a str,
}

/// Script plotting analytic lines and MC points with error bars for each
/// scheme in each CSV. CSV paths are relative, so run gnuplot from the
/// directory holding the script.
pub fn gnuplot_script(title: &str, xlabel: &str, series: &[PlotSeries<'_>], schemes: &[&str], logx: bool) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set key autotitle columnhead\n");
    s.push_str(&format!("set title '{}'\n", title.replace('\'', "''")));
    s.push_str(&format!("set xlabel '{xlabel}'\n"));
    s.push_str("set ylabel 'SINR (dB)'\n");
    s.push_str("set grid\n");
    s.push_str("set key outside right\n");
    if logx {
        s.push_str("set logscale x\n");
    }
    let mut parts = Vec::new();
    for (i, ser) in series.iter().enumerate() {
        for sc in schemes {
            let file = format!("'{}'", ser.csv);
            let sel = format!("(strcol(3) eq '{sc}' ? $4 : 1/0)");
            let sel_mc = format!("(strcol(3) eq '{sc}' ? $5 : 1/0)");
            parts.push(format!(
                "{file} using 2:{sel} with lines lc {i} title '{} {sc} analytic'",
                ser.label
            ));
            parts.push(format!(
                "{file} using 2:{sel_mc}:6 with yerrorbars pt 7 ps 0.5 lc {i} title '{} {sc} MC'",
                ser.label
            ));
        }
    }
    s.push_str("plot \\\n    ");
    s.push_str(&parts.join(", \\\n    "));
    s.push('\n');
    s
}

/// Writes `bytes` to `path`, creating parent directories.
pub fn write_file(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(path, bytes)
}
