//! RF frontend errors, the scalar error factors they induce, and channel generation.
//!
//! Each base-station antenna has a transmit gain `h_bt,i = A_bt,i exp(j phi_bt,i)`
//! and a receive gain `h_br,i` of the same form. Amplitudes and phases are
//! independent truncated Gaussians described by [`ErrorComponent`] quadruples.
//! The downlink estimate built from uplink pilots is
//!
//! ```text
//! H_d_hat = sqrt(1 - tau^2) H^T diag(h_br) + tau V^T
//! ```
//!
//! while the true downlink channel is `H_d = H^T diag(h_bt)`.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::ComplexMatrix;
use crate::quadrature::{GaussLegendre, DEFAULT_ORDER};
use crate::truncated::TruncatedGaussian;
use crate::{Error, Result};

/// How amplitude quadruples are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AmplitudeDomain {
    /// Sample `X` in dB and use the linear amplitude `10^(X/20)`.
    #[default]
    Db,
    /// Sample the linear amplitude directly; bounds must be positive.
    Linear,
}

/// Unit of the phase variance. Phase means and bounds are always in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseVarianceUnit {
    #[default]
    Rad2,
    Deg2,
}

/// A `(mean, variance, [low, high])` quadruple in the profile's units.
///
/// `variance == 0` denotes a fixed value at `mean`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorComponent {
    pub mean: f64,
    pub variance: f64,
    pub low: f64,
    pub high: f64,
}

impl ErrorComponent {
    pub const fn new(mean: f64, variance: f64, low: f64, high: f64) -> Self {
        ErrorComponent {
            mean,
            variance,
            low,
            high,
        }
    }

    /// No randomness: the component always equals `value`.
    pub const fn fixed(value: f64) -> Self {
        ErrorComponent::new(value, 0.0, value, value)
    }

    fn law(&self, scale_mean: f64, scale_var: f64) -> Result<TruncatedGaussian> {
        if !(self.variance >= 0.0) {
            return Err(Error::Parameter("error component variance must be nonnegative"));
        }
        TruncatedGaussian::new_or_point_mass(
            self.mean * scale_mean,
            self.variance * scale_var,
            self.low * scale_mean,
            self.high * scale_mean,
        )
    }
}

/// Transmit or receive side of the base-station frontend.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Tx,
    Rx,
}

/// Amplitude and phase error laws for both frontends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RfErrorProfile {
    pub amp_tx: ErrorComponent,
    pub amp_rx: ErrorComponent,
    pub phase_tx: ErrorComponent,
    pub phase_rx: ErrorComponent,
    pub amplitude_domain: AmplitudeDomain,
    pub phase_variance_unit: PhaseVarianceUnit,
}

const DEG: f64 = PI / 180.0;

impl RfErrorProfile {
    /// Same amplitude and phase quadruples on both sides, default unit flags.
    pub fn symmetric(amp: ErrorComponent, phase: ErrorComponent) -> Self {
        RfErrorProfile {
            amp_tx: amp,
            amp_rx: amp,
            phase_tx: phase,
            phase_rx: phase,
            amplitude_domain: AmplitudeDomain::Db,
            phase_variance_unit: PhaseVarianceUnit::Rad2,
        }
    }

    /// Perfect frontends: unit amplitude, zero phase.
    pub fn error_free() -> Self {
        Self::symmetric(ErrorComponent::fixed(0.0), ErrorComponent::fixed(0.0))
    }

    /// Amplitude `(0 dB, 0.5, [-1, 1] dB)`, phase `(0 deg, 0.5, [-20, 20] deg)`.
    pub fn normal_level() -> Self {
        Self::symmetric(
            ErrorComponent::new(0.0, 0.5, -1.0, 1.0),
            ErrorComponent::new(0.0, 0.5, -20.0, 20.0),
        )
    }

    /// Amplitude `(0 dB, 1, [-4, 4] dB)`, phase `(0 deg, 1, [-50, 50] deg)`.
    pub fn high_level() -> Self {
        Self::symmetric(
            ErrorComponent::new(0.0, 1.0, -4.0, 4.0),
            ErrorComponent::new(0.0, 1.0, -50.0, 50.0),
        )
    }

    pub fn with_units(mut self, amp: AmplitudeDomain, phase: PhaseVarianceUnit) -> Self {
        self.amplitude_domain = amp;
        self.phase_variance_unit = phase;
        self
    }

    /// Sets the amplitude variance on both sides.
    pub fn with_amp_variance(mut self, v: f64) -> Self {
        self.amp_tx.variance = v;
        self.amp_rx.variance = v;
        self
    }

    /// Sets the phase variance on both sides.
    pub fn with_phase_variance(mut self, v: f64) -> Self {
        self.phase_tx.variance = v;
        self.phase_rx.variance = v;
        self
    }

    /// Amplitude law in the profile's domain (dB or linear).
    pub fn amplitude_law(&self, side: Side) -> Result<TruncatedGaussian> {
        let c = match side {
            Side::Tx => &self.amp_tx,
            Side::Rx => &self.amp_rx,
        };
        let law = c.law(1.0, 1.0)?;
        match self.amplitude_domain {
            AmplitudeDomain::Db => {
                if !law.lower().is_finite() || !law.upper().is_finite() {
                    return Err(Error::Parameter("dB amplitude bounds must be finite"));
                }
            }
            AmplitudeDomain::Linear => {
                if !(law.lower() > 0.0) {
                    return Err(Error::Parameter("linear amplitude lower bound must be positive"));
                }
            }
        }
        Ok(law)
    }

    /// Phase law in radians.
    pub fn phase_law(&self, side: Side) -> Result<TruncatedGaussian> {
        let c = match side {
            Side::Tx => &self.phase_tx,
            Side::Rx => &self.phase_rx,
        };
        let var_scale = match self.phase_variance_unit {
            PhaseVarianceUnit::Rad2 => 1.0,
            PhaseVarianceUnit::Deg2 => DEG * DEG,
        };
        if !(c.low > -180.0) || !(c.high <= 180.0) {
            return Err(Error::Parameter("phase bounds must lie in (-180, 180] degrees"));
        }
        c.law(DEG, var_scale)
    }

    /// Checks every component.
    pub fn validate(&self) -> Result<()> {
        for side in [Side::Tx, Side::Rx] {
            self.amplitude_law(side)?;
            self.phase_law(side)?;
        }
        Ok(())
    }
}

/// Scalar summaries of an error profile used by the closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorFactors {
    /// Mean linear Tx amplitude.
    pub alpha_t: f64,
    pub alpha_r: f64,
    /// Variance of the linear Tx amplitude.
    pub sigma_t2: f64,
    pub sigma_r2: f64,
    /// `E{exp(j phi_t)}`.
    pub g_t: Complex64,
    pub g_r: Complex64,
    /// `alpha_t^2 + sigma_t^2`.
    pub a_t: f64,
    pub a_r: f64,
    /// Aggregated reciprocity error factor, in `(0, 1]`.
    pub a_i: f64,
    /// Signal-power factor with estimation error.
    pub b_i: f64,
    /// Normalised factor `B_I / A_t`, which reduces to `(1 - tau^2) A_I` when `A_r ~ 1`.
    pub b_i_tilde: f64,
    /// The alternative normalisation `B_I / A_I`, kept for comparison.
    pub b_i_tilde_alt: f64,
    pub tau: f64,
}

impl ErrorFactors {
    /// Assembles the factors from amplitude moments and phase characteristic values.
    pub fn from_parts(
        alpha_t: f64,
        sigma_t2: f64,
        alpha_r: f64,
        sigma_r2: f64,
        g_t: Complex64,
        g_r: Complex64,
        tau: f64,
    ) -> Result<Self> {
        check_tau(tau)?;
        if !(alpha_t > 0.0) || !(alpha_r > 0.0) || !(sigma_t2 >= 0.0) || !(sigma_r2 >= 0.0) {
            return Err(Error::Parameter("amplitude moments must be positive"));
        }
        let a_t = alpha_t * alpha_t + sigma_t2;
        let a_r = alpha_r * alpha_r + sigma_r2;
        let a_i = (alpha_t * alpha_t * alpha_r * alpha_r) / (a_t * a_r)
            * g_t.norm_sqr()
            * g_r.norm_sqr();
        let tau2 = tau * tau;
        let b_i = (1.0 - tau2) * a_i * a_t * a_r / ((1.0 - tau2) * a_r + tau2);
        Ok(ErrorFactors {
            alpha_t,
            alpha_r,
            sigma_t2,
            sigma_r2,
            g_t,
            g_r,
            a_t,
            a_r,
            a_i,
            b_i,
            b_i_tilde: b_i / a_t,
            b_i_tilde_alt: b_i / a_i,
            tau,
        })
    }

    /// Factors of a perfect frontend.
    pub fn error_free(tau: f64) -> Result<Self> {
        let one = Complex64::new(1.0, 0.0);
        Self::from_parts(1.0, 0.0, 1.0, 0.0, one, one, tau)
    }

    /// Same frontend statistics under a different estimation error.
    pub fn with_tau(&self, tau: f64) -> Result<Self> {
        Self::from_parts(
            self.alpha_t,
            self.sigma_t2,
            self.alpha_r,
            self.sigma_r2,
            self.g_t,
            self.g_r,
            tau,
        )
    }

    pub fn tau2(&self) -> f64 {
        self.tau * self.tau
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if (0.0..=1.0).contains(&tau) {
        Ok(())
    } else {
        Err(Error::Parameter("tau must lie in [0, 1]"))
    }
}

/// Mean and variance of the linear amplitude.
pub fn amplitude_moments(law: &TruncatedGaussian, domain: AmplitudeDomain) -> (f64, f64) {
    match domain {
        AmplitudeDomain::Linear => {
            let m = law.moments();
            (m.mean, m.variance)
        }
        AmplitudeDomain::Db => {
            if law.is_degenerate() {
                return (db_amplitude(law.mu()), 0.0);
            }
            // mass beyond 12 sigma is below 1e-32
            let s = law.sigma();
            let lo = law.lower().max(law.mu() - 12.0 * s);
            let hi = law.upper().min(law.mu() + 12.0 * s);
            let gl = GaussLegendre::new(DEFAULT_ORDER);
            let mass = gl.integrate(lo, hi, |x| law.pdf(x));
            let m1 = gl.integrate(lo, hi, |x| law.pdf(x) * db_amplitude(x)) / mass;
            let m2 = gl.integrate(lo, hi, |x| law.pdf(x) * db_amplitude(2.0 * x)) / mass;
            (m1, (m2 - m1 * m1).max(0.0))
        }
    }
}

fn db_amplitude(x: f64) -> f64 {
    libm::pow(10.0, x / 20.0)
}

/// Derives every scalar factor of `profile` at estimation error `tau`.
pub fn derive_error_factors(profile: &RfErrorProfile, tau: f64) -> Result<ErrorFactors> {
    check_tau(tau)?;
    let (alpha_t, sigma_t2) = amplitude_moments(&profile.amplitude_law(Side::Tx)?, profile.amplitude_domain);
    let (alpha_r, sigma_r2) = amplitude_moments(&profile.amplitude_law(Side::Rx)?, profile.amplitude_domain);
    let g_t = profile.phase_law(Side::Tx)?.char_exp();
    let g_r = profile.phase_law(Side::Rx)?.char_exp();
    ErrorFactors::from_parts(alpha_t, sigma_t2, alpha_r, sigma_r2, g_t, g_r, tau)
}

/// Validated sampling laws for both frontends.
#[derive(Debug, Clone, Copy)]
pub struct FrontendLaws {
    amp: [TruncatedGaussian; 2],
    phase: [TruncatedGaussian; 2],
    domain: AmplitudeDomain,
}

impl FrontendLaws {
    pub fn new(profile: &RfErrorProfile) -> Result<Self> {
        Ok(FrontendLaws {
            amp: [profile.amplitude_law(Side::Tx)?, profile.amplitude_law(Side::Rx)?],
            phase: [profile.phase_law(Side::Tx)?, profile.phase_law(Side::Rx)?],
            domain: profile.amplitude_domain,
        })
    }

    fn gain<R: Rng + ?Sized>(&self, idx: usize, rng: &mut R) -> Complex64 {
        let x = self.amp[idx].sample(rng);
        let a = match self.domain {
            AmplitudeDomain::Db => db_amplitude(x),
            AmplitudeDomain::Linear => x,
        };
        let (s, c) = libm::sincos(self.phase[idx].sample(rng));
        Complex64::new(a * c, a * s)
    }

    /// Draws `(h_bt, h_br)` for `m` antennas: all Tx gains first, then all Rx gains.
    pub fn sample<R: Rng + ?Sized>(&self, m: usize, rng: &mut R) -> (Vec<Complex64>, Vec<Complex64>) {
        let h_bt = (0..m).map(|_| self.gain(0, rng)).collect();
        let h_br = (0..m).map(|_| self.gain(1, rng)).collect();
        (h_bt, h_br)
    }
}

/// Draws i.i.d. Tx and Rx frontend gains for `m` antennas.
pub fn sample_frontends<R: Rng + ?Sized>(
    profile: &RfErrorProfile,
    m: usize,
    rng: &mut R,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    if m == 0 {
        return Err(Error::Parameter("antenna count must be at least 1"));
    }
    Ok(FrontendLaws::new(profile)?.sample(m, rng))
}

/// Diagonal of `E = H_bt H_br^{-1}`.
pub fn reciprocity_error_matrix(h_bt: &[Complex64], h_br: &[Complex64]) -> Result<Vec<Complex64>> {
    if h_bt.len() != h_br.len() {
        return Err(Error::Dimension {
            op: "reciprocity_error_matrix",
            expected: (h_bt.len(), 1),
            found: (h_br.len(), 1),
        });
    }
    h_bt.iter()
        .zip(h_br)
        .map(|(&t, &r)| {
            if r.norm_sqr() == 0.0 {
                Err(Error::Singular("receive frontend gain"))
            } else {
                Ok(t / r)
            }
        })
        .collect()
}

/// Antenna count, users, transmit SNR and estimation error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    pub m: usize,
    pub k: usize,
    /// Transmit SNR as a linear power ratio.
    pub rho_d: f64,
    pub tau: f64,
    /// Per-user noise variance, 1 throughout.
    pub noise_var: f64,
}

impl SystemConfig {
    pub fn new(m: usize, k: usize, rho_d: f64, tau: f64) -> Result<Self> {
        let cfg = SystemConfig {
            m,
            k,
            rho_d,
            tau,
            noise_var: 1.0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Like [`SystemConfig::new`] with the SNR in dB and `tau^2` instead of `tau`.
    pub fn from_db(m: usize, k: usize, rho_db: f64, tau2: f64) -> Result<Self> {
        if !(tau2 >= 0.0) {
            return Err(Error::Parameter("tau^2 must be nonnegative"));
        }
        Self::new(m, k, crate::db_to_linear(rho_db), libm::sqrt(tau2))
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.k == 0 {
            return Err(Error::Parameter("M and K must be at least 1"));
        }
        if !(self.rho_d > 0.0) || !self.rho_d.is_finite() {
            return Err(Error::Parameter("transmit SNR must be positive and finite"));
        }
        if !(self.noise_var > 0.0) || !self.noise_var.is_finite() {
            return Err(Error::Parameter("noise variance must be positive"));
        }
        check_tau(self.tau)
    }

    pub fn tau2(&self) -> f64 {
        self.tau * self.tau
    }

    pub fn rho_db(&self) -> f64 {
        crate::linear_to_db(self.rho_d)
    }
}

/// One draw of everything random in the model.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// `M x K` propagation channel.
    pub h: ComplexMatrix,
    /// `M x K` estimation error.
    pub v: ComplexMatrix,
    pub h_bt: Vec<Complex64>,
    pub h_br: Vec<Complex64>,
}

impl ChannelRealization {
    /// Draws `H`, `V` and then the frontends, in that order.
    pub fn sample<R: Rng + ?Sized>(cfg: &SystemConfig, laws: &FrontendLaws, rng: &mut R) -> Self {
        let (h, v) = draw_channel(cfg.m, cfg.k, rng);
        let (h_bt, h_br) = laws.sample(cfg.m, rng);
        ChannelRealization { h, v, h_bt, h_br }
    }
}

/// One `CN(0, 1)` value.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

fn draw_channel<R: Rng + ?Sized>(m: usize, k: usize, rng: &mut R) -> (ComplexMatrix, ComplexMatrix) {
    let h = ComplexMatrix::from_fn(m, k, |_, _| complex_normal(rng));
    let v = ComplexMatrix::from_fn(m, k, |_, _| complex_normal(rng));
    (h, v)
}

/// Draws the propagation channel `H` and estimation error `V`, both `M x K` with i.i.d. `CN(0, 1)` entries.
pub fn sample_channel<R: Rng + ?Sized>(cfg: &SystemConfig, rng: &mut R) -> Result<(ComplexMatrix, ComplexMatrix)> {
    cfg.validate()?;
    Ok(draw_channel(cfg.m, cfg.k, rng))
}

/// Returns `(H_d, H_d_hat)`, both `K x M`.
pub fn build_channels(real: &ChannelRealization, tau: f64) -> Result<(ComplexMatrix, ComplexMatrix)> {
    check_tau(tau)?;
    let (m, k) = real.h.shape();
    if real.v.shape() != (m, k) || real.h_bt.len() != m || real.h_br.len() != m {
        return Err(Error::Dimension {
            op: "build_channels",
            expected: (m, k),
            found: real.v.shape(),
        });
    }
    let est = libm::sqrt(1.0 - tau * tau);
    let h = &real.h;
    let v = &real.v;
    let truth = ComplexMatrix::from_fn(k, m, |u, i| h[(i, u)] * real.h_bt[i]);
    let hat = ComplexMatrix::from_fn(k, m, |u, i| h[(i, u)] * real.h_br[i] * est + v[(i, u)] * tau);
    Ok((truth, hat))
}
