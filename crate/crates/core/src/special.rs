//! Scalar special functions: the standard normal law and the error function
//! of a complex argument.
//!
//! `erf_complex` splits the plane (after odd reflection to `Re z >= 0`) into two
//! regions. For `Re z <= 2.2` the Maclaurin series is summed directly; its
//! rounding error grows like `eps * exp(2 x^2)`, which stays below `1e-12`
//! there. For `Re z > 2.2` the scaled complement `erfcx(z) = exp(z^2) erfc(z)`
//! is evaluated from the Laplace continued fraction (modified Lentz), which
//! converges in at most a few dozen terms in that half plane.

use core::f64::consts::{FRAC_2_SQRT_PI, PI, SQRT_2};

use num_complex::Complex64;

/// `1 / sqrt(2 pi)`.
pub const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Radius inside which [`erf_complex`] guarantees `1e-10` relative accuracy.
pub const ERF_ACCURACY_RADIUS: f64 = 12.0;

const SERIES_MAX_RE: f64 = 2.2;
const MAX_SERIES_TERMS: usize = 4000;
const MAX_CF_TERMS: usize = 5000;

/// Standard normal density.
pub fn std_normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * libm::exp(-0.5 * x * x)
}

/// Standard normal distribution function, `0.5 * erfc(-x / sqrt 2)`.
///
/// The complementary form keeps full relative precision in the lower tail.
/// Infinite arguments map to 0 and 1.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Upper tail `1 - Phi(x)`, accurate for large positive `x`.
pub fn std_normal_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

/// Inverse of [`std_normal_cdf`] (Wichura's AS 241, about 1e-16 relative).
///
/// Returns `-inf` for `p == 0` and `+inf` for `p == 1`; `p` outside `[0, 1]` gives NaN.
pub fn std_normal_quantile(p: f64) -> f64 {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return f64::NAN;
    }
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }
    let q = p - 0.5;
    if libm::fabs(q) <= 0.425 {
        let r = 0.180625 - q * q;
        return q * poly(&AS241_A, r) / poly(&AS241_B, r);
    }
    let tail = if q < 0.0 { p } else { 1.0 - p };
    let mut r = libm::sqrt(-libm::log(tail));
    let x = if r <= 5.0 {
        r -= 1.6;
        poly(&AS241_C, r) / poly(&AS241_D, r)
    } else {
        r -= 5.0;
        poly(&AS241_E, r) / poly(&AS241_F, r)
    };
    if q < 0.0 {
        -x
    } else {
        x
    }
}

fn poly(coeffs: &[f64; 8], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

const AS241_A: [f64; 8] = [
    3.387_132_872_796_366_608,
    1.331_416_678_917_843_774_5e2,
    1.971_590_950_306_551_442_7e3,
    1.373_169_376_550_946_112_5e4,
    4.592_195_393_154_987_145_7e4,
    6.726_577_092_700_870_085_3e4,
    3.343_057_558_358_812_810_5e4,
    2.509_080_928_730_122_672_7e3,
];
const AS241_B: [f64; 8] = [
    1.0,
    4.231_333_070_160_091_125_2e1,
    6.871_870_074_920_579_083e2,
    5.394_196_021_424_751_107_7e3,
    2.121_379_430_158_659_586_7e4,
    3.930_789_580_009_271_061e4,
    2.872_908_573_572_194_267_4e4,
    5.226_495_278_852_854_561e3,
];
const AS241_C: [f64; 8] = [
    1.423_437_110_749_683_577_34,
    4.630_337_846_156_545_295_9,
    5.769_497_221_460_691_405_5,
    3.647_848_324_763_204_605_04,
    1.270_458_252_452_368_382_58,
    2.417_807_251_774_506_117_7e-1,
    2.272_384_498_926_918_458_33e-2,
    7.745_450_142_783_414_076_4e-4,
];
const AS241_D: [f64; 8] = [
    1.0,
    2.053_191_626_637_758_821_87,
    1.676_384_830_183_803_849_4,
    6.897_673_349_851_000_045_5e-1,
    1.481_039_764_274_800_745_9e-1,
    1.519_866_656_361_645_719_66e-2,
    5.475_938_084_995_344_946e-4,
    1.050_750_071_644_416_843_24e-9,
];
const AS241_E: [f64; 8] = [
    6.657_904_643_501_103_777_2,
    5.463_784_911_164_114_369_9,
    1.784_826_539_917_291_335_8,
    2.965_605_718_285_048_912_3e-1,
    2.653_218_952_657_612_309_3e-2,
    1.242_660_947_388_078_438_6e-3,
    2.711_555_568_743_487_578_15e-5,
    2.010_334_399_292_288_132_65e-7,
];
const AS241_F: [f64; 8] = [
    1.0,
    5.998_322_065_558_879_376_9e-1,
    1.369_298_809_227_358_053_1e-1,
    1.487_536_129_085_061_485_25e-2,
    7.868_691_311_456_132_591e-4,
    1.846_318_317_510_054_681_8e-5,
    1.421_511_758_316_445_888_7e-7,
    2.044_263_103_389_939_785_64e-15,
];

/// Whether a complex error-function value is inside the documented accuracy envelope.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErfStatus {
    /// `|z| <= ERF_ACCURACY_RADIUS`: relative error at most `1e-10`.
    Accurate,
    /// Outside the envelope; the value is computed by the same method but its
    /// accuracy is not guaranteed (it may also have overflowed).
    OutsideEnvelope,
}

/// Result of [`erf_complex`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexErf {
    pub value: Complex64,
    pub status: ErfStatus,
}

impl ComplexErf {
    pub fn is_accurate(&self) -> bool {
        self.status == ErfStatus::Accurate
    }
}

/// Error function of a complex argument (the analytic continuation of `erf`).
pub fn erf_complex(z: Complex64) -> ComplexErf {
    let status = if z.norm() <= ERF_ACCURACY_RADIUS {
        ErfStatus::Accurate
    } else {
        ErfStatus::OutsideEnvelope
    };
    ComplexErf {
        value: erf_raw(z),
        status,
    }
}

pub(crate) fn erf_raw(z: Complex64) -> Complex64 {
    if z.re < 0.0 {
        return -erf_raw(-z);
    }
    if z.im == 0.0 {
        return Complex64::new(libm::erf(z.re), 0.0);
    }
    if z.re <= SERIES_MAX_RE {
        erf_series(z)
    } else {
        Complex64::new(1.0, 0.0) - (-z * z).exp() * erfcx_continued_fraction(z)
    }
}

/// Scaled complementary error function `exp(z^2) * erfc(z)` for `Re z >= 0`.
///
/// Stays accurate where `erfc(z)` itself underflows or where `1 - erf(z)`
/// would cancel. For `Re z < 0` the argument is out of the supported domain
/// and `Error::Parameter` semantics are left to the caller: NaN is returned.
pub fn erfcx(z: Complex64) -> Complex64 {
    if z.re < 0.0 || z.re.is_nan() || z.im.is_nan() {
        return Complex64::new(f64::NAN, f64::NAN);
    }
    if z.re > SERIES_MAX_RE {
        erfcx_continued_fraction(z)
    } else {
        (z * z).exp() * (Complex64::new(1.0, 0.0) - erf_series(z))
    }
}

fn erf_series(z: Complex64) -> Complex64 {
    let z2 = z * z;
    let mut power = z;
    let mut sum = z;
    for n in 1..MAX_SERIES_TERMS {
        let nf = n as f64;
        power = power * (-z2) / nf;
        let term = power / (2.0 * nf + 1.0);
        sum += term;
        if nf > z2.norm() && term.norm() <= f64::EPSILON * 0.25 * sum.norm() {
            break;
        }
    }
    sum * FRAC_2_SQRT_PI
}

fn erfcx_continued_fraction(z: Complex64) -> Complex64 {
    // erfc(z) = exp(-z^2)/sqrt(pi) / (z + (1/2)/(z + 1/(z + (3/2)/(z + ...))))
    const TINY: f64 = 1e-300;
    let tiny = Complex64::new(TINY, 0.0);
    let mut f = z;
    let mut c = z;
    let mut d = Complex64::new(0.0, 0.0);
    for n in 1..MAX_CF_TERMS {
        let a = 0.5 * n as f64;
        d = z + d * a;
        if d.norm_sqr() == 0.0 {
            d = tiny;
        }
        d = d.inv();
        c = z + c.inv() * a;
        if c.norm_sqr() == 0.0 {
            c = tiny;
        }
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).norm() < 1e-16 {
            break;
        }
    }
    (f * libm::sqrt(PI)).inv()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pdf_values() {
        assert!((std_normal_pdf(0.0) - 0.398_942_280_401_432_7).abs() < 1e-16);
        assert_eq!(std_normal_pdf(1.3), std_normal_pdf(-1.3));
        let expected = libm::exp(-0.5) / libm::sqrt(2.0 * PI);
        assert!((std_normal_pdf(1.0) - expected).abs() < 1e-16);
    }

    #[test]
    fn cdf_values() {
        assert_eq!(std_normal_cdf(0.0), 0.5);
        assert!(std_normal_cdf(8.0) >= 1.0 - 1e-15);
        for i in -60..=60 {
            let x = i as f64 * 0.1;
            assert!((std_normal_cdf(x) + std_normal_cdf(-x) - 1.0).abs() < 1e-14);
        }
        assert_eq!(std_normal_cdf(f64::NEG_INFINITY), 0.0);
        assert_eq!(std_normal_cdf(f64::INFINITY), 1.0);
    }

    #[test]
    fn quantile_inverts_cdf() {
        for &p in &[1e-300, 1e-20, 1e-8, 0.001, 0.02425, 0.1, 0.3, 0.5, 0.7, 0.975, 0.999_999] {
            let x = std_normal_quantile(p);
            let back = std_normal_cdf(x);
            assert!(((back - p) / p).abs() < 1e-13, "p={p} x={x} back={back}");
        }
        // 1 - 1e-12 is not representable exactly; compare through the upper tail
        let x = std_normal_quantile(1.0 - 1e-12);
        assert!((std_normal_sf(x) - 1e-12).abs() / 1e-12 < 1e-4);
        // frozen reference values (scipy.stats.norm.ppf)
        assert!((std_normal_quantile(0.975) - 1.959_963_984_540_054).abs() < 1e-14);
        assert!((std_normal_quantile(1e-10) + 6.361_340_902_404_056).abs() < 1e-13);
        assert!(std_normal_quantile(0.0).is_infinite());
        assert!(std_normal_quantile(1.5).is_nan());
    }

    #[test]
    fn erf_zero_and_real_axis() {
        assert_eq!(erf_complex(c(0.0, 0.0)).value, c(0.0, 0.0));
        for i in -600..=600 {
            let x = i as f64 * 0.01;
            // tiny imaginary part forces the complex path
            let v = erf_raw(c(x, 1e-300));
            assert!((v.re - libm::erf(x)).abs() <= 1e-12, "x={x}");
        }
    }

    #[test]
    fn erf_symmetries() {
        for i in 0..40 {
            for j in 0..40 {
                let z = c(-6.0 + 0.3 * i as f64, -6.0 + 0.3 * j as f64);
                let w = erf_raw(z);
                let neg = erf_raw(-z);
                let conj = erf_raw(z.conj());
                let scale = w.norm().max(1.0);
                assert!((w + neg).norm() <= 1e-12 * scale, "odd at {z}");
                assert!((conj - w.conj()).norm() <= 1e-12 * scale, "reflection at {z}");
            }
        }
    }

    #[test]
    fn erf_known_value() {
        // mpmath.erf(1+1j) at 30 digits
        let v = erf_complex(c(1.0, 1.0));
        assert!(v.is_accurate());
        let expected = c(1.316_151_281_697_947_7, 0.190_453_469_237_834_69);
        assert!((v.value - expected).norm() / expected.norm() < 1e-14);
    }

    #[test]
    fn erf_envelope_flag() {
        assert!(erf_complex(c(3.0, 4.0)).is_accurate());
        assert_eq!(erf_complex(c(9.0, 9.0)).status, ErfStatus::OutsideEnvelope);
    }

    #[test]
    fn erfcx_matches_definition() {
        for &z in &[c(0.3, 0.2), c(1.0, -2.0), c(2.5, 0.5), c(4.0, 3.0), c(0.0, 1.0)] {
            let direct = (z * z).exp() * (c(1.0, 0.0) - erf_raw(z));
            let scaled = erfcx(z);
            assert!((direct - scaled).norm() / scaled.norm() < 1e-12, "z={z}");
        }
        // large real argument: erfcx(x) ~ 1/(x sqrt(pi)) (1 - 1/(2x^2))
        let x = 30.0;
        let approx = 1.0 / (x * libm::sqrt(PI)) * (1.0 - 0.5 / (x * x) + 0.75 / (x * x * x * x));
        assert!((erfcx(c(x, 0.0)).re - approx).abs() / approx < 1e-8);
        assert!(erfcx(c(-1.0, 0.0)).re.is_nan());
    }
}
