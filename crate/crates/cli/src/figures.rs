//! Figure presets: each preset is a set of named curves sharing one sweep.

use mimo_recip_core::analytic::zf_mrt_ratio;
use mimo_recip_core::montecarlo::{run_sweep, SkippedPoint, SweepSpec, SweepTable, SweepVariable, TrialExecutor};
use mimo_recip_core::precoding::{Normalization, Scheme};
use mimo_recip_core::rf::{ErrorComponent, RfErrorProfile, SystemConfig};
use mimo_recip_core::Result;

use crate::output::{csv_bytes, format_g, gnuplot_script, sweep_csv, PlotSeries};

pub const FIGURE_IDS: [u32; 8] = [2, 3, 4, 5, 6, 7, 8, 9];
pub const DEFAULT_FIGURE_TRIALS: usize = 2000;

#[derive(Debug, Clone)]
pub struct Curve {
    /// File-name stem.
    pub name: &'static str,
    pub label: &'static str,
    pub cfg: SystemConfig,
    pub profile: RfErrorProfile,
}

#[derive(Debug, Clone)]
pub struct FigurePreset {
    pub id: u32,
    pub title: &'static str,
    pub xlabel: &'static str,
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    pub schemes: Vec<Scheme>,
    pub curves: Vec<Curve>,
    pub logx: bool,
}

fn unit_grid() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

fn base() -> SystemConfig {
    SystemConfig::from_db(500, 20, 10.0, 0.0).expect("valid preset")
}

fn amp(mean: f64, lim: f64) -> ErrorComponent {
    ErrorComponent::new(mean, 0.5, -lim, lim)
}

fn phase(mean: f64, low: f64, high: f64) -> ErrorComponent {
    ErrorComponent::new(mean, 0.5, low, high)
}

fn profile(amp_tx: ErrorComponent, amp_rx: ErrorComponent, ph: ErrorComponent) -> RfErrorProfile {
    RfErrorProfile {
        amp_tx,
        amp_rx,
        phase_tx: ph,
        phase_rx: ph,
        ..RfErrorProfile::error_free()
    }
}

fn amplitude_curves() -> Vec<Curve> {
    let ph = phase(0.0, -20.0, 20.0);
    let c = |name, label, tx, rx| Curve {
        name,
        label,
        cfg: base(),
        profile: profile(tx, rx, ph),
    };
    vec![
        c("amp_pm1db", "[-1,1] dB", amp(0.0, 1.0), amp(0.0, 1.0)),
        c("amp_pm2db", "[-2,2] dB", amp(0.0, 2.0), amp(0.0, 2.0)),
        c("amp_pm4db", "[-4,4] dB", amp(0.0, 4.0), amp(0.0, 4.0)),
        c("amp_tx_mean1db", "Tx mean 1 dB", amp(1.0, 2.0), amp(0.0, 2.0)),
        c("amp_rx_mean1db", "Rx mean 1 dB", amp(0.0, 2.0), amp(1.0, 2.0)),
        c("amp_tx_wide", "Tx [-4,4] Rx [-1,1] dB", amp(0.0, 4.0), amp(0.0, 1.0)),
        c("amp_rx_wide", "Tx [-1,1] Rx [-4,4] dB", amp(0.0, 1.0), amp(0.0, 4.0)),
    ]
}

fn phase_curves() -> Vec<Curve> {
    let a = amp(0.0, 1.0);
    let c = |name, label, ph| Curve {
        name,
        label,
        cfg: base(),
        profile: profile(a, a, ph),
    };
    vec![
        c("phase_mean0", "mean 0 deg [-40,40]", phase(0.0, -40.0, 40.0)),
        c("phase_mean10", "mean 10 deg [-40,40]", phase(10.0, -40.0, 40.0)),
        c("phase_mean20", "mean 20 deg [-40,40]", phase(20.0, -40.0, 40.0)),
        c("phase_m30_p10", "mean 0 deg [-30,10]", phase(0.0, -30.0, 10.0)),
        c("phase_m10_p30", "mean 0 deg [-10,30]", phase(0.0, -10.0, 30.0)),
    ]
}

fn level_curves(cfg: SystemConfig) -> Vec<Curve> {
    vec![
        Curve {
            name: "error_free",
            label: "no error",
            cfg,
            profile: RfErrorProfile::error_free(),
        },
        Curve {
            name: "normal",
            label: "normal level",
            cfg,
            profile: RfErrorProfile::normal_level(),
        },
        Curve {
            name: "high",
            label: "high level",
            cfg,
            profile: RfErrorProfile::high_level(),
        },
    ]
}

/// Profile swept along both variances in the ratio figure.
pub fn ratio_profile() -> RfErrorProfile {
    RfErrorProfile::symmetric(
        ErrorComponent::new(0.0, 0.0, -4.0, 4.0),
        ErrorComponent::new(0.0, 0.0, -50.0, 50.0),
    )
}

pub fn ratio_curves() -> Vec<Curve> {
    let cfg = |tau2| SystemConfig::from_db(500, 20, 20.0, tau2).expect("valid preset");
    vec![
        Curve {
            name: "tau2_0",
            label: "tau^2 = 0",
            cfg: cfg(0.0),
            profile: ratio_profile(),
        },
        Curve {
            name: "tau2_0.01",
            label: "tau^2 = 0.01",
            cfg: cfg(0.01),
            profile: ratio_profile(),
        },
    ]
}

pub fn preset(id: u32) -> Option<FigurePreset> {
    let rho_grid: Vec<f64> = (0..=8).map(|i| 5.0 * i as f64).collect();
    let p = match id {
        2 | 3 => FigurePreset {
            id,
            title: if id == 2 { "MRT, fixed phase errors" } else { "ZF, fixed phase errors" },
            xlabel: "amplitude error variance",
            variable: SweepVariable::AmpVariance,
            values: unit_grid(),
            schemes: vec![if id == 2 { Scheme::Mrt } else { Scheme::Zf }],
            curves: amplitude_curves(),
            logx: false,
        },
        4 | 5 => FigurePreset {
            id,
            title: if id == 4 { "MRT, fixed amplitude errors" } else { "ZF, fixed amplitude errors" },
            xlabel: "phase error variance (rad^2)",
            variable: SweepVariable::PhaseVariance,
            values: unit_grid(),
            schemes: vec![if id == 4 { Scheme::Mrt } else { Scheme::Zf }],
            curves: phase_curves(),
            logx: false,
        },
        6 => FigurePreset {
            id,
            title: "SINR versus M",
            xlabel: "M",
            variable: SweepVariable::M,
            values: vec![10.0, 20.0, 50.0, 100.0, 200.0, 500.0],
            schemes: Scheme::ALL.to_vec(),
            curves: level_curves(base()),
            logx: true,
        },
        7 | 8 => {
            let tau2 = if id == 8 { 0.1 } else { 0.0 };
            FigurePreset {
                id,
                title: if id == 7 { "SINR versus SNR" } else { "SINR versus SNR, tau^2 = 0.1" },
                xlabel: "rho_d (dB)",
                variable: SweepVariable::RhoDb,
                values: rho_grid,
                schemes: Scheme::ALL.to_vec(),
                curves: level_curves(SystemConfig::from_db(500, 20, 10.0, tau2).expect("valid preset")),
                logx: false,
            }
        }
        9 => FigurePreset {
            id,
            title: "MRT and ZF under matched amplitude and phase variances",
            xlabel: "error variance",
            variable: SweepVariable::BothVariances,
            values: unit_grid(),
            schemes: Scheme::ALL.to_vec(),
            curves: ratio_curves(),
            logx: false,
        },
        _ => return None,
    };
    Some(p)
}

#[derive(Debug, Clone, Copy)]
pub struct FigureOptions {
    pub trials: usize,
    pub master_seed: u64,
}

impl Default for FigureOptions {
    fn default() -> Self {
        FigureOptions {
            trials: DEFAULT_FIGURE_TRIALS,
            master_seed: crate::config::DEFAULT_SEED,
        }
    }
}

/// Generated files, in write order.
#[derive(Debug, Clone, Default)]
pub struct FigureOutput {
    pub files: Vec<(String, Vec<u8>)>,
    pub skipped: Vec<(&'static str, SkippedPoint)>,
}

/// Runs one curve of `p` and returns its table.
pub fn run_curve<E: TrialExecutor>(p: &FigurePreset, c: &Curve, opts: FigureOptions, exec: &E) -> Result<SweepTable> {
    let spec = SweepSpec {
        variable: p.variable,
        values: p.values.clone(),
        schemes: p.schemes.clone(),
        trials: opts.trials,
        master_seed: opts.master_seed,
        normalization: Normalization::Analytic,
    };
    run_sweep(&c.cfg, &c.profile, &spec, exec)
}

/// Runs every curve of figure `p`. `progress` receives one line per curve.
pub fn run_figure<E: TrialExecutor>(
    p: &FigurePreset,
    opts: FigureOptions,
    exec: &E,
    progress: &mut dyn FnMut(&str),
) -> Result<FigureOutput> {
    let mut out = FigureOutput::default();
    let mut tables = Vec::new();
    for (i, c) in p.curves.iter().enumerate() {
        progress(&format!("fig{} curve {}/{} ({})", p.id, i + 1, p.curves.len(), c.name));
        let table = run_curve(p, c, opts, exec)?;
        out.skipped.extend(table.skipped.iter().map(|s| (c.name, *s)));
        out.files.push((format!("fig{}_{}.csv", p.id, c.name), sweep_csv(&table)));
        tables.push(table);
    }
    if p.id == 9 {
        out.files.push(("fig9_ratio.csv".into(), ratio_csv(p, &tables)));
    }
    let names: Vec<String> = out.files.iter().take(p.curves.len()).map(|(n, _)| n.clone()).collect();
    let series: Vec<PlotSeries<'_>> = names
        .iter()
        .zip(&p.curves)
        .map(|(n, c)| PlotSeries { csv: n, label: c.label })
        .collect();
    let schemes: Vec<&str> = p.schemes.iter().map(|s| s.name()).collect();
    let script = gnuplot_script(p.title, p.xlabel, &series, &schemes, p.logx);
    out.files.push((format!("fig{}.gp", p.id), script.into_bytes()));
    Ok(out)
}

pub const RATIO_HEADER: [&str; 7] = [
    "sweep_value",
    "tau2",
    "ratio_analytic",
    "ratio_mc",
    "ratio_limit",
    "ratio_limit_kind",
    "ratio_limit_infinite",
];

/// ZF/MRT ratio per point with the limiting ratio for overlay.
fn ratio_csv(p: &FigurePreset, tables: &[SweepTable]) -> Vec<u8> {
    let mut rows = Vec::new();
    for table in tables {
        for &value in &p.values {
            let find = |s| table.rows.iter().find(|r| r.value == value && r.scheme == s);
            let (Some(m), Some(z)) = (find(Scheme::Mrt), find(Scheme::Zf)) else {
                continue;
            };
            let with_est = z.cfg.tau > 0.0;
            let lim = zf_mrt_ratio(&z.cfg, &z.factors, with_est);
            rows.push(vec![
                format_g(value, 12),
                format_g(z.cfg.tau2(), 12),
                format_g(z.analytic.sinr_linear / m.analytic.sinr_linear, 12),
                format_g(z.mc.sinr_eq19 / m.mc.sinr_eq19, 12),
                format_g(lim.value, 12),
                if with_est { "C_I" } else { "C_tilde_I" }.to_string(),
                lim.infinite.to_string(),
            ]);
        }
    }
    csv_bytes(&RATIO_HEADER, rows)
}
