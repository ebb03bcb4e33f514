//! Truncated Gaussian law `N_T(mu, sigma^2)` restricted to `[a, b]`.
//!
//! Bounds may be infinite, which recovers the plain Gaussian. A zero-variance
//! component is represented by [`TruncatedGaussian::point_mass`] rather than
//! by `sigma2 == 0`.

use core::f64::consts::SQRT_2;

use num_complex::Complex64;
use rand::Rng;

use crate::special::{
    erf_raw, erfcx, std_normal_cdf, std_normal_pdf, std_normal_quantile, std_normal_sf,
};
use crate::{Error, Result};

/// Mean and variance of a distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
}

/// Gaussian with location `mu` and variance `sigma2`, conditioned on `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedGaussian {
    mu: f64,
    sigma2: f64,
    a: f64,
    b: f64,
    degenerate: bool,
}

impl TruncatedGaussian {
    /// Validates and builds the distribution.
    ///
    /// Requires finite `mu`, `sigma2 > 0`, `a < b` (either may be infinite) and a
    /// non-vanishing probability mass `Phi(beta) - Phi(alpha)` of the interval.
    pub fn new(mu: f64, sigma2: f64, a: f64, b: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::Parameter("truncated Gaussian location must be finite"));
        }
        if !(sigma2 > 0.0) || !sigma2.is_finite() {
            return Err(Error::Parameter(
                "truncated Gaussian variance must be positive and finite",
            ));
        }
        if a.is_nan() || b.is_nan() || !(a < b) {
            return Err(Error::Parameter("truncation bounds must satisfy a < b"));
        }
        if a == f64::INFINITY || b == f64::NEG_INFINITY {
            return Err(Error::Parameter("truncation interval is empty"));
        }
        let d = TruncatedGaussian {
            mu,
            sigma2,
            a,
            b,
            degenerate: false,
        };
        if !(d.mass() > 0.0) {
            return Err(Error::Parameter(
                "truncation interval carries no probability mass",
            ));
        }
        Ok(d)
    }

    /// Untruncated Gaussian, `[-inf, inf]`.
    pub fn untruncated(mu: f64, sigma2: f64) -> Result<Self> {
        Self::new(mu, sigma2, f64::NEG_INFINITY, f64::INFINITY)
    }

    /// Degenerate law concentrated at `mu` (the `sigma2 -> 0` limit).
    pub fn point_mass(mu: f64) -> Self {
        TruncatedGaussian {
            mu,
            sigma2: 0.0,
            a: mu,
            b: mu,
            degenerate: true,
        }
    }

    /// Builds a point mass when `sigma2 == 0`, otherwise calls [`Self::new`].
    ///
    /// A point mass must lie inside `[a, b]`.
    pub fn new_or_point_mass(mu: f64, sigma2: f64, a: f64, b: f64) -> Result<Self> {
        if sigma2 == 0.0 {
            if !mu.is_finite() || mu < a || mu > b {
                return Err(Error::Parameter(
                    "zero-variance component must lie inside its bounds",
                ));
            }
            Ok(Self::point_mass(mu))
        } else {
            Self::new(mu, sigma2, a, b)
        }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn sigma(&self) -> f64 {
        libm::sqrt(self.sigma2)
    }

    pub fn lower(&self) -> f64 {
        self.a
    }

    pub fn upper(&self) -> f64 {
        self.b
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Standardised bounds `(alpha, beta) = ((a - mu)/sigma, (b - mu)/sigma)`.
    pub fn standardized_bounds(&self) -> (f64, f64) {
        let s = self.sigma();
        ((self.a - self.mu) / s, (self.b - self.mu) / s)
    }

    /// `Z = Phi(beta) - Phi(alpha)`, evaluated on the tail that avoids cancellation.
    pub fn mass(&self) -> f64 {
        if self.degenerate {
            return 1.0;
        }
        let (alpha, beta) = self.standardized_bounds();
        if alpha > 0.0 {
            std_normal_sf(alpha) - std_normal_sf(beta)
        } else {
            std_normal_cdf(beta) - std_normal_cdf(alpha)
        }
    }

    /// Density. Zero outside `[a, b]`; a point mass reports `+inf` at `mu`.
    pub fn pdf(&self, x: f64) -> f64 {
        if self.degenerate {
            return if x == self.mu { f64::INFINITY } else { 0.0 };
        }
        if x < self.a || x > self.b {
            return 0.0;
        }
        let s = self.sigma();
        std_normal_pdf((x - self.mu) / s) / (s * self.mass())
    }

    /// Distribution function.
    pub fn cdf(&self, x: f64) -> f64 {
        if self.degenerate {
            return if x >= self.mu { 1.0 } else { 0.0 };
        }
        if x <= self.a {
            return 0.0;
        }
        if x >= self.b {
            return 1.0;
        }
        let s = self.sigma();
        let (alpha, _) = self.standardized_bounds();
        let xi = (x - self.mu) / s;
        let p = if alpha > 0.0 {
            std_normal_sf(alpha) - std_normal_sf(xi)
        } else {
            std_normal_cdf(xi) - std_normal_cdf(alpha)
        };
        (p / self.mass()).clamp(0.0, 1.0)
    }

    /// Mean and variance of the truncated law.
    pub fn moments(&self) -> Moments {
        if self.degenerate {
            return Moments {
                mean: self.mu,
                variance: 0.0,
            };
        }
        let s = self.sigma();
        let (alpha, beta) = self.standardized_bounds();
        let z = self.mass();
        let (pa, pb) = (std_normal_pdf(alpha), std_normal_pdf(beta));
        let shift = (pa - pb) / z;
        let mean = (self.mu + s * shift).clamp(self.a, self.b);
        let variance = self.sigma2 * (1.0 + (x_pdf(alpha) - x_pdf(beta)) / z - shift * shift);
        Moments {
            mean,
            variance: variance.max(0.0),
        }
    }

    /// Draws one value by inversion of the distribution function.
    ///
    /// When the whole interval lies above `mu` the upper-tail function is
    /// inverted instead, so heavy truncation in either tail keeps precision.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.degenerate {
            return self.mu;
        }
        let u: f64 = rng.random();
        let (alpha, beta) = self.standardized_bounds();
        let std = if alpha > 0.0 {
            let hi = std_normal_sf(alpha);
            let lo = std_normal_sf(beta);
            -std_normal_quantile(hi - u * (hi - lo))
        } else {
            let lo = std_normal_cdf(alpha);
            let hi = std_normal_cdf(beta);
            std_normal_quantile(lo + u * (hi - lo))
        };
        (self.mu + self.sigma() * std).clamp(self.a, self.b)
    }

    /// `E{exp(jX)}`, the characteristic function at unit frequency.
    ///
    /// Closed form:
    ///
    /// ```text
    /// exp(-sigma^2/2 + j mu) * [erf(u_b - jc) - erf(u_a - jc)] / [erf(u_b) - erf(u_a)]
    /// ```
    ///
    /// with `u = (bound - mu) / sqrt(2 sigma^2)` and `c = sigma / sqrt 2`. When the
    /// interval lies entirely on one side of `mu` the ratio is rewritten with the
    /// scaled complement `erfcx`, which removes the cancellation between two
    /// error-function values close to +-1.
    pub fn char_exp(&self) -> Complex64 {
        if self.degenerate {
            return Complex64::new(0.0, self.mu).exp();
        }
        let root = SQRT_2 * self.sigma();
        let ua = (self.a - self.mu) / root;
        let ub = (self.b - self.mu) / root;
        let c = self.sigma() / SQRT_2;
        let phase = Complex64::new(0.0, self.mu).exp();

        if ua >= 0.0 {
            phase * upper_tail_ratio(ua, ub, c)
        } else if ub <= 0.0 {
            // X -> -X maps [a, b] onto [-b, -a] above the mean
            phase * upper_tail_ratio(-ub, -ua, c).conj()
        } else {
            let num = erf_shifted(ub, c) - erf_shifted(ua, c);
            let den = libm::erf(ub) - libm::erf(ua);
            phase * libm::exp(-c * c) * num / den
        }
    }
}

fn x_pdf(x: f64) -> f64 {
    if x.is_infinite() {
        0.0
    } else {
        x * std_normal_pdf(x)
    }
}

/// `erf(u - jc)`, with the infinite-bound limits `erf(+-inf - jc) = +-1`.
fn erf_shifted(u: f64, c: f64) -> Complex64 {
    if u.is_infinite() {
        Complex64::new(u.signum(), 0.0)
    } else {
        erf_raw(Complex64::new(u, -c))
    }
}

/// `exp(c^2) [erfc(ua - jc) - erfc(ub - jc)] / [erfc(ua) - erfc(ub)]` for `0 <= ua < ub`.
fn upper_tail_ratio(ua: f64, ub: f64, c: f64) -> Complex64 {
    let rot = |u: f64| Complex64::new(0.0, 2.0 * u * c).exp();
    let mut num = rot(ua) * erfcx(Complex64::new(ua, -c));
    let mut den = erfcx(Complex64::new(ua, 0.0)).re;
    if ub.is_finite() {
        let decay = libm::exp(-(ub - ua) * (ub + ua));
        if decay > 0.0 {
            num -= rot(ub) * erfcx(Complex64::new(ub, -c)) * decay;
            den -= erfcx(Complex64::new(ub, 0.0)).re * decay;
        }
    }
    num / den
}
