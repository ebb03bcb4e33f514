//! Closed-form output SINR for MRT and ZF, their error-free and asymptotic
//! specialisations, and the ZF/MRT ratio.
//!
//! The SINR is approximated as `E{P_s} E{1/(P_I + 1)}`, with the inverse moment
//! expanded to second order: `E{1/X} ~ 1/E{X} + var(X)/E{X}^3`.

use crate::precoding::Scheme;
use crate::rf::{ErrorFactors, SystemConfig};
use crate::{linear_to_db, Error, Result};

/// First and second moments of the per-user powers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerMoments {
    pub e_ps: f64,
    pub e_pi: f64,
    pub var_pi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticSinr {
    pub scheme: Scheme,
    pub sinr_linear: f64,
    pub sinr_db: f64,
    pub powers: PowerMoments,
    /// Approximation of `E{1/(P_I + noise)}`.
    pub inv_moment: f64,
}

/// `1/mean + variance/mean^3`.
pub fn inverse_moment_correction(mean: f64, variance: f64) -> Result<f64> {
    if !(mean > 0.0) {
        return Err(Error::Parameter("inverse moment needs a positive mean"));
    }
    Ok(1.0 / mean + variance / (mean * mean * mean))
}

fn require_zf(cfg: &SystemConfig) -> Result<()> {
    if cfg.m <= cfg.k {
        return Err(Error::Parameter("ZF closed forms require M > K"));
    }
    Ok(())
}

pub fn expected_powers_mrt(cfg: &SystemConfig, f: &ErrorFactors) -> PowerMoments {
    let (m, k, rho) = (cfg.m as f64, cfg.k as f64, cfg.rho_d);
    let tau2 = cfg.tau2();
    let est = (1.0 - tau2) * f.a_r;
    let e_ps = rho * f.a_t / k * (est * ((m - 1.0) * f.a_i + 2.0) + tau2) / (est + tau2);
    let e_pi = rho * (k - 1.0) / k * f.a_t;
    let var_pi = rho * rho * (k - 1.0) * f.a_t * f.a_t / (k * k);
    PowerMoments { e_ps, e_pi, var_pi }
}

/// `B_I` evaluated at the configuration's `tau` (the factors may carry another one).
fn b_i_at(cfg: &SystemConfig, f: &ErrorFactors) -> f64 {
    let tau2 = cfg.tau2();
    (1.0 - tau2) * f.a_i * f.a_t * f.a_r / ((1.0 - tau2) * f.a_r + tau2)
}

pub fn expected_powers_zf(cfg: &SystemConfig, f: &ErrorFactors) -> Result<PowerMoments> {
    require_zf(cfg)?;
    let (m, k, rho) = (cfg.m as f64, cfg.k as f64, cfg.rho_d);
    let b = b_i_at(cfg, f);
    let d = f.a_t - b;
    Ok(PowerMoments {
        e_ps: rho * (m - k) / k * b,
        e_pi: rho * (k - 1.0) / k * d,
        var_pi: rho * rho * (k - 1.0) / (k * k) * d * d,
    })
}

fn assemble(scheme: Scheme, cfg: &SystemConfig, p: PowerMoments) -> Result<AnalyticSinr> {
    let inv_moment = inverse_moment_correction(p.e_pi + cfg.noise_var, p.var_pi)?;
    let sinr_linear = p.e_ps * inv_moment;
    Ok(AnalyticSinr {
        scheme,
        sinr_linear,
        sinr_db: linear_to_db(sinr_linear),
        powers: p,
        inv_moment,
    })
}

/// MRT output SINR.
pub fn sinr_mrt(cfg: &SystemConfig, f: &ErrorFactors) -> Result<AnalyticSinr> {
    assemble(Scheme::Mrt, cfg, expected_powers_mrt(cfg, f))
}

/// ZF output SINR; requires `M > K`.
pub fn sinr_zf(cfg: &SystemConfig, f: &ErrorFactors) -> Result<AnalyticSinr> {
    assemble(Scheme::Zf, cfg, expected_powers_zf(cfg, f)?)
}

pub fn sinr(cfg: &SystemConfig, f: &ErrorFactors, scheme: Scheme) -> Result<AnalyticSinr> {
    match scheme {
        Scheme::Mrt => sinr_mrt(cfg, f),
        Scheme::Zf => sinr_zf(cfg, f),
    }
}

/// MRT SINR written out as a single expression (unit noise variance).
///
/// ```text
/// rho A_t [(1-tau^2) A_r ((M-1) A_I + 2) + tau^2] / [(1-tau^2) A_r + tau^2]
///   * [K^2 + rho K (K-1)(rho A_t^2 + 2 A_t)] / (rho (K-1) A_t + K)^3
/// ```
pub fn sinr_mrt_expanded(cfg: &SystemConfig, f: &ErrorFactors) -> f64 {
    let (m, k, rho) = (cfg.m as f64, cfg.k as f64, cfg.rho_d);
    let tau2 = cfg.tau2();
    let est = (1.0 - tau2) * f.a_r;
    let signal = rho * f.a_t * (est * ((m - 1.0) * f.a_i + 2.0) + tau2) / (est + tau2);
    let num = k * k + rho * k * (k - 1.0) * (rho * f.a_t * f.a_t + 2.0 * f.a_t);
    let den = rho * (k - 1.0) * f.a_t + k;
    signal * num / (den * den * den)
}

/// ZF SINR written out as a single expression (unit noise variance), with `D = A_t - B_I`.
///
/// ```text
/// rho (M-K) B_I [K^2 + rho K (K-1) D (rho D + 2)] / (rho (K-1) D + K)^3
/// ```
pub fn sinr_zf_expanded(cfg: &SystemConfig, f: &ErrorFactors) -> Result<f64> {
    require_zf(cfg)?;
    let (m, k, rho) = (cfg.m as f64, cfg.k as f64, cfg.rho_d);
    let b = b_i_at(cfg, f);
    let d = f.a_t - b;
    let num = k * k + rho * k * (k - 1.0) * d * (rho * d + 2.0);
    let den = rho * (k - 1.0) * d + k;
    Ok(rho * (m - k) * b * num / (den * den * den))
}

/// SINR with reciprocity errors only (`tau = 0`).
pub fn sinr_no_estimation(cfg: &SystemConfig, f: &ErrorFactors, scheme: Scheme) -> Result<AnalyticSinr> {
    let mut c = *cfg;
    c.tau = 0.0;
    sinr(&c, &f.with_tau(0.0)?, scheme)
}

/// Limiting regimes of the closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AsymptoticRegime {
    /// MRT, many users, no estimation error: `rho ((M-1) A_I + 2) / (K (rho + 1/A_t))`.
    MrtLargeK,
    /// MRT, `M -> inf`, high SNR, no estimation error: `(M/K) A_I`.
    MrtNoEstimation,
    /// ZF, `M -> inf`, no estimation error: `rho (M-K) A_I A_t / (K (rho A_t (1 - A_I) + 1))`.
    ZfNoEstimation,
    /// ZF, additionally `rho (1 - A_I) >> 1`: `(M/K) / (1/A_I - 1)`.
    ZfNoEstimationHighSnr,
    /// MRT with estimation error: `(M/K) rho B~ / (rho + 1/A_t)`.
    MrtWithEstimation,
    /// ZF with estimation error: `((M-K)/K) rho B~ / (rho (1 - B~) + 1/A_t)`.
    ZfWithEstimation,
}

impl AsymptoticRegime {
    pub const ALL: [AsymptoticRegime; 6] = [
        AsymptoticRegime::MrtLargeK,
        AsymptoticRegime::MrtNoEstimation,
        AsymptoticRegime::ZfNoEstimation,
        AsymptoticRegime::ZfNoEstimationHighSnr,
        AsymptoticRegime::MrtWithEstimation,
        AsymptoticRegime::ZfWithEstimation,
    ];

    pub fn scheme(self) -> Scheme {
        match self {
            AsymptoticRegime::MrtLargeK
            | AsymptoticRegime::MrtNoEstimation
            | AsymptoticRegime::MrtWithEstimation => Scheme::Mrt,
            _ => Scheme::Zf,
        }
    }
}

/// Which normalised signal factor the estimation-error limits use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LimitForm {
    /// `B~ = B_I / A_t` with `1/A_t` in the denominators; reduces to the
    /// error-only limits at `tau = 0`.
    #[default]
    Consistent,
    /// `B~ = B_I / A_I` with `1/A_I` in the denominators. Does not reduce to
    /// the error-only limits; kept so the discrepancy can be reported.
    Alternate,
}

/// Limit value for `regime`; `scheme` must match the regime.
///
/// Returns `+inf` for [`AsymptoticRegime::ZfNoEstimationHighSnr`] at `A_I = 1`.
pub fn asymptotic_limits(
    cfg: &SystemConfig,
    f: &ErrorFactors,
    scheme: Scheme,
    regime: AsymptoticRegime,
) -> Result<f64> {
    asymptotic_limit_with(cfg, f, scheme, regime, LimitForm::Consistent)
}

pub fn asymptotic_limit_with(
    cfg: &SystemConfig,
    f: &ErrorFactors,
    scheme: Scheme,
    regime: AsymptoticRegime,
    form: LimitForm,
) -> Result<f64> {
    if regime.scheme() != scheme {
        return Err(Error::Parameter("asymptotic regime does not belong to this scheme"));
    }
    let (m, k, rho) = (cfg.m as f64, cfg.k as f64, cfg.rho_d);
    let (b_tilde, inv) = match form {
        LimitForm::Consistent => (b_i_at(cfg, f) / f.a_t, 1.0 / f.a_t),
        LimitForm::Alternate => (b_i_at(cfg, f) / f.a_i, 1.0 / f.a_i),
    };
    Ok(match regime {
        AsymptoticRegime::MrtLargeK => rho * ((m - 1.0) * f.a_i + 2.0) / (k * (rho + 1.0 / f.a_t)),
        AsymptoticRegime::MrtNoEstimation => m / k * f.a_i,
        AsymptoticRegime::ZfNoEstimation => {
            require_zf(cfg)?;
            rho * (m - k) * f.a_i * f.a_t / (k * (rho * f.a_t * (1.0 - f.a_i) + 1.0))
        }
        AsymptoticRegime::ZfNoEstimationHighSnr => {
            if f.a_i >= 1.0 {
                f64::INFINITY
            } else {
                m / k / (1.0 / f.a_i - 1.0)
            }
        }
        AsymptoticRegime::MrtWithEstimation => m / k * rho * b_tilde / (rho + inv),
        AsymptoticRegime::ZfWithEstimation => {
            require_zf(cfg)?;
            (m - k) / k * rho * b_tilde / (rho * (1.0 - b_tilde) + inv)
        }
    })
}

/// Limiting ZF/MRT SINR ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioLimit {
    /// `1/(1 - x)`, or `+inf` when `x = 1`.
    pub value: f64,
    /// Set when `value` is the infinity sentinel.
    pub infinite: bool,
}

/// `1/(1 - A_I)` without estimation error, `1/(1 - B_I/A_t)` with it.
pub fn zf_mrt_ratio(cfg: &SystemConfig, f: &ErrorFactors, with_estimation: bool) -> RatioLimit {
    let x = if with_estimation {
        b_i_at(cfg, f) / f.a_t
    } else {
        f.a_i
    };
    if x >= 1.0 {
        RatioLimit {
            value: f64::INFINITY,
            infinite: true,
        }
    } else {
        RatioLimit {
            value: 1.0 / (1.0 - x),
            infinite: false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rf::{derive_error_factors, RfErrorProfile};

    fn cfg(m: usize, k: usize, rho: f64, tau: f64) -> SystemConfig {
        SystemConfig::new(m, k, rho, tau).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn inverse_moment_examples() {
        assert_eq!(inverse_moment_correction(1.0, 0.0).unwrap(), 1.0);
        assert_eq!(inverse_moment_correction(2.0, 0.0).unwrap(), 0.5);
        assert_eq!(inverse_moment_correction(2.0, 1.0).unwrap(), 0.625);
        assert!(inverse_moment_correction(0.0, 1.0).is_err());
    }

    #[test]
    fn error_free_reductions() {
        let f = ErrorFactors::error_free(0.0).unwrap();
        let c = cfg(64, 1, 10.0, 0.0);
        let p = expected_powers_mrt(&c, &f);
        assert!(close(p.e_ps, 650.0, 1e-14));
        assert_eq!(p.e_pi, 0.0);
        assert!(close(sinr_mrt(&c, &f).unwrap().sinr_linear, 650.0, 1e-14));

        let c = cfg(500, 20, 10.0, 0.0);
        assert!(close(expected_powers_mrt(&c, &f).e_pi, 9.5, 1e-14));
        let z = expected_powers_zf(&c, &f).unwrap();
        assert!(close(z.e_ps, 240.0, 1e-14));
        assert_eq!(z.e_pi, 0.0);
        assert!(close(sinr_zf(&c, &f).unwrap().sinr_linear, 240.0, 1e-14));
    }

    #[test]
    fn zf_needs_more_antennas_than_users() {
        let f = ErrorFactors::error_free(0.0).unwrap();
        assert!(sinr_zf(&cfg(4, 4, 10.0, 0.0), &f).is_err());
        assert!(sinr_zf_expanded(&cfg(4, 8, 10.0, 0.0), &f).is_err());
    }

    #[test]
    fn uncorrelated_estimate_has_no_zf_signal() {
        let f = derive_error_factors(&RfErrorProfile::normal_level(), 1.0).unwrap();
        assert_eq!(expected_powers_zf(&cfg(500, 20, 10.0, 1.0), &f).unwrap().e_ps, 0.0);
    }

    #[test]
    fn expanded_forms_match_factored() {
        for p in [RfErrorProfile::normal_level(), RfErrorProfile::high_level()] {
            for &(m, k, rho, tau) in &[(500, 20, 10.0, 0.0), (64, 8, 100.0, 0.3), (30, 2, 1.0, 0.9)] {
                let f = derive_error_factors(&p, tau).unwrap();
                let c = cfg(m, k, rho, tau);
                assert!(close(sinr_mrt_expanded(&c, &f), sinr_mrt(&c, &f).unwrap().sinr_linear, 1e-12));
                assert!(close(
                    sinr_zf_expanded(&c, &f).unwrap(),
                    sinr_zf(&c, &f).unwrap().sinr_linear,
                    1e-12
                ));
            }
        }
    }

    #[test]
    fn limit_examples() {
        let f = ErrorFactors::error_free(0.0).unwrap();
        let c = cfg(500, 20, 10.0, 0.0);
        let v = asymptotic_limits(&c, &f, Scheme::Mrt, AsymptoticRegime::MrtNoEstimation).unwrap();
        assert_eq!(v, 25.0);
        let v = asymptotic_limits(&c, &f, Scheme::Zf, AsymptoticRegime::ZfNoEstimationHighSnr).unwrap();
        assert!(v.is_infinite());
        assert!(asymptotic_limits(&c, &f, Scheme::Zf, AsymptoticRegime::MrtLargeK).is_err());

        let mut half = f;
        half.a_i = 0.5;
        let v = asymptotic_limits(&c, &half, Scheme::Zf, AsymptoticRegime::ZfNoEstimationHighSnr).unwrap();
        assert!(close(v, 25.0, 1e-15));
        let r = zf_mrt_ratio(&c, &half, false);
        assert!(close(r.value, 2.0, 1e-15) && !r.infinite);
        half.a_i = 1e-12;
        assert!(close(zf_mrt_ratio(&c, &half, false).value, 1.0, 1e-11));
        assert!(zf_mrt_ratio(&c, &f, false).infinite);
    }
}
