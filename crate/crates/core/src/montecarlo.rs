//! Seeded Monte Carlo engine for the output SINR.
//!
//! Every trial owns a ChaCha8 stream seeded from `(master_seed, sweep_index,
//! trial_index)`, so results do not depend on how trials are scheduled. The
//! SINR estimate is `mean(P_s) * mean(1/(P_I + noise))` with users pooled.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::analytic::{self, AnalyticSinr};
use crate::precoding::{effective_gains, lambda_for, powers_from_gains, Normalization, Scheme};
use crate::rf::{
    build_channels, derive_error_factors, ChannelRealization, ErrorFactors, FrontendLaws, RfErrorProfile,
    SystemConfig,
};
use crate::{Error, Result};

/// Maximum number of redraws after a singular ZF Gram matrix.
pub const MAX_REDRAWS: u32 = 8;

/// SplitMix64 finaliser.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `trial_index` at sweep point `sweep_index`.
pub fn mix_seed(master_seed: u64, sweep_index: u64, trial_index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master_seed) ^ sweep_index) ^ trial_index)
}

/// Per-user powers of one realization under one scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub ps: Vec<f64>,
    pub pi: Vec<f64>,
    /// Realizations discarded because the ZF Gram matrix was singular.
    pub redraws: u32,
    /// `tr(W W^H)` of the unnormalised precoder.
    pub trace_wwh: f64,
}

/// Everything a trial needs that does not depend on the seed.
#[derive(Debug, Clone)]
pub struct TrialContext {
    pub cfg: SystemConfig,
    pub factors: ErrorFactors,
    pub normalization: Normalization,
    laws: FrontendLaws,
}

impl TrialContext {
    pub fn new(cfg: &SystemConfig, profile: &RfErrorProfile, normalization: Normalization) -> Result<Self> {
        cfg.validate()?;
        Ok(TrialContext {
            cfg: *cfg,
            factors: derive_error_factors(profile, cfg.tau)?,
            normalization,
            laws: FrontendLaws::new(profile)?,
        })
    }

    /// Runs one realization through every scheme in `schemes`.
    ///
    /// All schemes see the same channel and frontend draw. If ZF hits a
    /// singular Gram matrix the whole realization is redrawn.
    pub fn run(&self, schemes: &[Scheme], seed: u64) -> Result<Vec<TrialResult>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut redraws = 0;
        loop {
            let real = ChannelRealization::sample(&self.cfg, &self.laws, &mut rng);
            match self.evaluate(&real, schemes, redraws) {
                Err(Error::Singular(_)) => {
                    redraws += 1;
                    if redraws > MAX_REDRAWS {
                        return Err(Error::RedrawLimit { redraws });
                    }
                }
                other => return other,
            }
        }
    }

    /// Powers for a given realization.
    pub fn evaluate(&self, real: &ChannelRealization, schemes: &[Scheme], redraws: u32) -> Result<Vec<TrialResult>> {
        let (h_d, h_hat) = build_channels(real, self.cfg.tau)?;
        schemes
            .iter()
            .map(|&scheme| {
                let (g, trace_wwh) = effective_gains(&h_d, &h_hat, scheme)?;
                let lambda = lambda_for(&self.cfg, &self.factors, scheme, self.normalization, trace_wwh)?;
                let (ps, pi) = powers_from_gains(&g, lambda, self.cfg.rho_d);
                Ok(TrialResult {
                    ps,
                    pi,
                    redraws,
                    trace_wwh,
                })
            })
            .collect()
    }
}

/// Runs one trial of a single scheme.
pub fn run_trial(
    cfg: &SystemConfig,
    profile: &RfErrorProfile,
    scheme: Scheme,
    normalization: Normalization,
    trial_seed: u64,
) -> Result<TrialResult> {
    let ctx = TrialContext::new(cfg, profile, normalization)?;
    let mut out = ctx.run(&[scheme], trial_seed)?;
    Ok(out.remove(0))
}

/// Aggregated SINR over many trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrEstimate {
    /// `mean(P_s) * mean(1/(P_I + noise))`.
    pub sinr_eq19: f64,
    /// `mean(P_s/(P_I + noise))`, for comparison.
    pub sinr_mean_ratio: f64,
    /// Delta-method standard error of `sinr_eq19`.
    pub stderr: f64,
    pub trials: usize,
    pub redraws: u64,
}

impl SinrEstimate {
    pub fn sinr_db(&self) -> f64 {
        crate::linear_to_db(self.sinr_eq19)
    }

    /// Standard error on the dB scale.
    pub fn stderr_db(&self) -> f64 {
        10.0 / core::f64::consts::LN_10 * self.stderr / self.sinr_eq19
    }

    pub fn mean_ratio_db(&self) -> f64 {
        crate::linear_to_db(self.sinr_mean_ratio)
    }
}

/// Sample mean and its standard error.
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, libm::sqrt(var / n))
}

/// Pools users and trials into the SINR estimate. Needs at least two trials.
pub fn estimate_sinr(trials: &[TrialResult], noise_var: f64) -> Result<SinrEstimate> {
    if trials.len() < 2 {
        return Err(Error::Parameter("SINR estimation needs at least two trials"));
    }
    if !(noise_var > 0.0) {
        return Err(Error::Parameter("noise variance must be positive"));
    }
    let n = trials.len() as f64;
    let mut sum_a = 0.0;
    let mut sum_b = 0.0;
    let mut sum_ratio = 0.0;
    let mut users = 0usize;
    let mut per_trial = Vec::with_capacity(trials.len());
    let mut redraws = 0u64;
    for t in trials {
        let k = t.ps.len();
        if k == 0 || t.pi.len() != k {
            return Err(Error::Parameter("trial results must have matching nonempty power vectors"));
        }
        let mut a = 0.0;
        let mut b = 0.0;
        for (&ps, &pi) in t.ps.iter().zip(&t.pi) {
            let inv = 1.0 / (pi + noise_var);
            a += ps;
            b += inv;
            sum_ratio += ps * inv;
        }
        users += k;
        sum_a += a;
        sum_b += b;
        per_trial.push((a / k as f64, b / k as f64));
        redraws += u64::from(t.redraws);
    }
    let mean_a = sum_a / users as f64;
    let mean_b = sum_b / users as f64;

    // delta method on the product of per-trial means (users within a trial are correlated)
    let (ma, mb) = per_trial
        .iter()
        .fold((0.0, 0.0), |(x, y), &(a, b)| (x + a / n, y + b / n));
    let (mut saa, mut sbb, mut sab) = (0.0, 0.0, 0.0);
    for &(a, b) in &per_trial {
        saa += (a - ma) * (a - ma);
        sbb += (b - mb) * (b - mb);
        sab += (a - ma) * (b - mb);
    }
    let d = n - 1.0;
    let var = (mb * mb * saa / d + ma * ma * sbb / d + 2.0 * ma * mb * sab / d) / n;

    Ok(SinrEstimate {
        sinr_eq19: mean_a * mean_b,
        sinr_mean_ratio: sum_ratio / users as f64,
        stderr: libm::sqrt(var.max(0.0)),
        trials: trials.len(),
        redraws,
    })
}

/// Per-user `mean(P_s) * mean(1/(P_I + noise))` without pooling.
pub fn per_user_sinr(trials: &[TrialResult], noise_var: f64) -> Result<Vec<f64>> {
    let k = trials.first().map(|t| t.ps.len()).ok_or(Error::Parameter("no trials"))?;
    let n = trials.len() as f64;
    (0..k)
        .map(|u| {
            let mut a = 0.0;
            let mut b = 0.0;
            for t in trials {
                if t.ps.len() != k {
                    return Err(Error::Parameter("trials have different user counts"));
                }
                a += t.ps[u];
                b += 1.0 / (t.pi[u] + noise_var);
            }
            Ok(a / n * b / n)
        })
        .collect()
}

/// Runs `n` independent jobs and returns their outputs in index order.
pub trait TrialExecutor {
    fn run<T, F>(&self, n: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Runs jobs one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl TrialExecutor for Sequential {
    fn run<T, F>(&self, n: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..n).map(job).collect()
    }
}

/// Runs `trials` seeded trials of `schemes` and returns one trial list per scheme.
pub fn simulate<E: TrialExecutor>(
    ctx: &TrialContext,
    schemes: &[Scheme],
    trials: usize,
    master_seed: u64,
    sweep_index: u64,
    exec: &E,
) -> Result<Vec<Vec<TrialResult>>> {
    let raw = exec.run(trials, |t| ctx.run(schemes, mix_seed(master_seed, sweep_index, t as u64)));
    let mut out: Vec<Vec<TrialResult>> = schemes.iter().map(|_| Vec::with_capacity(trials)).collect();
    for r in raw {
        for (slot, res) in out.iter_mut().zip(r?) {
            slot.push(res);
        }
    }
    Ok(out)
}

/// Quantity varied along a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    /// Amplitude variance on both sides.
    AmpVariance,
    /// Phase variance on both sides.
    PhaseVariance,
    /// Amplitude and phase variance set to the same value.
    BothVariances,
    M,
    RhoDb,
    Tau2,
}

impl SweepVariable {
    pub const ALL: [SweepVariable; 6] = [
        SweepVariable::AmpVariance,
        SweepVariable::PhaseVariance,
        SweepVariable::BothVariances,
        SweepVariable::M,
        SweepVariable::RhoDb,
        SweepVariable::Tau2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::AmpVariance => "amp_variance",
            SweepVariable::PhaseVariance => "phase_variance",
            SweepVariable::BothVariances => "both_variances",
            SweepVariable::M => "M",
            SweepVariable::RhoDb => "rho_db",
            SweepVariable::Tau2 => "tau2",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or(Error::Parameter("unknown sweep variable"))
    }

    /// Applies `value` to copies of the configuration and profile.
    pub fn apply(self, cfg: &SystemConfig, profile: &RfErrorProfile, value: f64) -> Result<(SystemConfig, RfErrorProfile)> {
        let mut c = *cfg;
        let mut p = *profile;
        match self {
            SweepVariable::AmpVariance => p = p.with_amp_variance(value),
            SweepVariable::PhaseVariance => p = p.with_phase_variance(value),
            SweepVariable::BothVariances => p = p.with_amp_variance(value).with_phase_variance(value),
            SweepVariable::M => {
                if !(value >= 1.0) || libm::trunc(value) != value {
                    return Err(Error::Parameter("M sweep values must be positive integers"));
                }
                c.m = value as usize;
            }
            SweepVariable::RhoDb => c.rho_d = crate::db_to_linear(value),
            SweepVariable::Tau2 => {
                if !(0.0..=1.0).contains(&value) {
                    return Err(Error::Parameter("tau^2 must lie in [0, 1]"));
                }
                c.tau = libm::sqrt(value);
            }
        }
        c.validate()?;
        p.validate()?;
        Ok((c, p))
    }
}

/// Sweep settings shared by every point.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    pub schemes: Vec<Scheme>,
    pub trials: usize,
    pub master_seed: u64,
    pub normalization: Normalization,
}

/// One `(value, scheme)` result.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub variable: SweepVariable,
    pub value: f64,
    pub scheme: Scheme,
    pub cfg: SystemConfig,
    pub factors: ErrorFactors,
    pub analytic: AnalyticSinr,
    pub mc: SinrEstimate,
    pub trials: usize,
    pub master_seed: u64,
}

/// A point where a scheme could not be evaluated (ZF with `M <= K`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkippedPoint {
    pub value: f64,
    pub scheme: Scheme,
}

#[derive(Debug, Clone, Default)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub skipped: Vec<SkippedPoint>,
}

/// Runs the analytic formulas and the Monte Carlo engine at every sweep value.
pub fn run_sweep<E: TrialExecutor>(
    base_cfg: &SystemConfig,
    profile: &RfErrorProfile,
    spec: &SweepSpec,
    exec: &E,
) -> Result<SweepTable> {
    let mut table = SweepTable::default();
    for (idx, &value) in spec.values.iter().enumerate() {
        let (cfg, prof) = spec.variable.apply(base_cfg, profile, value)?;
        let ctx = TrialContext::new(&cfg, &prof, spec.normalization)?;
        let schemes: Vec<Scheme> = spec
            .schemes
            .iter()
            .copied()
            .filter(|&s| {
                let ok = s != Scheme::Zf || cfg.m > cfg.k;
                if !ok {
                    table.skipped.push(SkippedPoint { value, scheme: s });
                }
                ok
            })
            .collect();
        if schemes.is_empty() {
            continue;
        }
        let results = simulate(&ctx, &schemes, spec.trials, spec.master_seed, idx as u64, exec)?;
        for (&scheme, trials) in schemes.iter().zip(&results) {
            table.rows.push(SweepRow {
                variable: spec.variable,
                value,
                scheme,
                cfg,
                factors: ctx.factors,
                analytic: analytic::sinr(&cfg, &ctx.factors, scheme)?,
                mc: estimate_sinr(trials, cfg.noise_var)?,
                trials: spec.trials,
                master_seed: spec.master_seed,
            });
        }
    }
    Ok(table)
}
