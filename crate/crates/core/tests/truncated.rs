use mimo_recip_core::truncated::TruncatedGaussian;
use mimo_recip_core::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const VARIANCES: [f64; 5] = [0.1, 0.45, 0.8, 1.15, 1.5];
const HALF_WIDTHS: [f64; 5] = [0.2, 0.45, 0.7, 0.95, 1.2];
const LOCATIONS: [f64; 5] = [-0.3, -0.15, 0.0, 0.15, 0.3];

/// Adaptive Simpson, used as an independent quadrature oracle.
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (flm, frm) = (f(0.5 * (a + m)), f(0.5 * (m + b)));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    step(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 50)
}

/// `E{exp(jX)}` by direct integration of the density.
fn char_exp_oracle(mu: f64, s2: f64, a: f64, b: f64) -> Complex64 {
    let s = s2.sqrt();
    let w = |x: f64| libm::exp(-0.5 * ((x - mu) / s).powi(2));
    let z = simpson(&w, a, b, 1e-14);
    let re = simpson(&|x| w(x) * x.cos(), a, b, 1e-14) / z;
    let im = simpson(&|x| w(x) * x.sin(), a, b, 1e-14) / z;
    Complex64::new(re, im)
}

/// Uniform-proposal rejection sampler; independent of the inversion sampler.
fn rejection_sample(rng: &mut ChaCha8Rng, mu: f64, s2: f64, a: f64, b: f64) -> f64 {
    let peak = mu.clamp(a, b);
    loop {
        let x = a + (b - a) * rng.random::<f64>();
        let accept = libm::exp(-((x - mu).powi(2) - (peak - mu).powi(2)) / (2.0 * s2));
        if rng.random::<f64>() < accept {
            return x;
        }
    }
}

fn grid() -> impl Iterator<Item = (f64, f64, f64, f64)> {
    VARIANCES.into_iter().flat_map(|s2| {
        HALF_WIDTHS
            .into_iter()
            .flat_map(move |b| LOCATIONS.into_iter().map(move |mu| (mu, s2, mu - b, b)))
    })
}

#[test]
fn char_exp_matches_quadrature_on_grid() {
    let mut worst: f64 = 0.0;
    for (mu, s2, a, b) in grid() {
        let d = TruncatedGaussian::new(mu, s2, a, b).unwrap();
        let err = (d.char_exp() - char_exp_oracle(mu, s2, a, b)).norm();
        worst = worst.max(err);
    }
    assert!(worst <= 1e-8, "worst {worst:e}");
}

#[test]
fn char_exp_matches_quadrature_on_shifted_intervals() {
    // the same grid with [mu - b, mu + b] and [-b, b]
    for s2 in VARIANCES {
        for b in HALF_WIDTHS {
            for mu in LOCATIONS {
                for (lo, hi) in [(mu - b, mu + b), (-b, b)] {
                    let d = TruncatedGaussian::new(mu, s2, lo, hi).unwrap();
                    let err = (d.char_exp() - char_exp_oracle(mu, s2, lo, hi)).norm();
                    assert!(err <= 1e-8, "{mu} {s2} [{lo}, {hi}]: {err:e}");
                }
            }
        }
    }
}

#[test]
fn char_exp_matches_sampling() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for &(mu, s2, a, b) in &[(0.0, 0.25, -0.5, 0.5), (0.3, 1.5, -0.9, 1.2), (-0.15, 0.8, -0.6, 0.45)] {
        let d = TruncatedGaussian::new(mu, s2, a, b).unwrap();
        let n = 1_000_000;
        let (mut sc, mut ss, mut sc2, mut ss2) = (0.0, 0.0, 0.0, 0.0);
        for _ in 0..n {
            let (s, c) = libm::sincos(d.sample(&mut rng));
            sc += c;
            ss += s;
            sc2 += c * c;
            ss2 += s * s;
        }
        let nf = n as f64;
        let (mc, ms) = (sc / nf, ss / nf);
        let se_c = ((sc2 / nf - mc * mc) / nf).sqrt();
        let se_s = ((ss2 / nf - ms * ms) / nf).sqrt();
        let v = d.char_exp();
        assert!((v.re - mc).abs() <= 4.0 * se_c);
        assert!((v.im - ms).abs() <= 4.0 * se_s);
    }
}

#[test]
fn moments_match_rejection_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let n = 200_000;
    for (i, (mu, s2, a, b)) in grid().enumerate() {
        if i % 6 != 0 {
            continue;
        }
        let d = TruncatedGaussian::new(mu, s2, a, b).unwrap();
        let xs: Vec<f64> = (0..n).map(|_| rejection_sample(&mut rng, mu, s2, a, b)).collect();
        let nf = n as f64;
        let mean = xs.iter().sum::<f64>() / nf;
        let c2: Vec<f64> = xs.iter().map(|x| (x - mean).powi(2)).collect();
        let var = c2.iter().sum::<f64>() / (nf - 1.0);
        let m4 = c2.iter().map(|v| v * v).sum::<f64>() / nf;
        let m = d.moments();
        assert!((m.mean - mean).abs() <= 4.0 * (var / nf).sqrt(), "mean at {mu} {s2} {a} {b}");
        assert!((m.variance - var).abs() <= 4.0 * ((m4 - var * var) / nf).sqrt(), "var at {mu} {s2} {a} {b}");
    }
}

#[test]
fn remark_reductions() {
    let v = TruncatedGaussian::untruncated(0.0, 1.0).unwrap().char_exp();
    assert!((v - Complex64::new((-0.5f64).exp(), 0.0)).norm() < 1e-15);
    let v = TruncatedGaussian::point_mass(0.3).char_exp();
    assert!((v - Complex64::new(0.3f64.cos(), 0.3f64.sin())).norm() < 1e-15);
    // half-infinite interval
    let d = TruncatedGaussian::new(0.2, 0.5, -0.4, f64::INFINITY).unwrap();
    assert!((d.char_exp() - char_exp_oracle(0.2, 0.5, -0.4, 12.0)).norm() < 1e-9);
}

proptest! {
    #[test]
    fn char_exp_is_bounded(mu in -1.0f64..1.0, s2 in 1e-6f64..4.0, a in -3.0f64..2.9, w in 0.01f64..3.0) {
        let d = TruncatedGaussian::new(mu, s2, a, a + w);
        prop_assume!(d.is_ok());
        let d = d.unwrap();
        prop_assert!(d.char_exp().norm() <= 1.0 + 1e-14);
    }

    #[test]
    fn symmetric_truncation_is_real(s2 in 1e-4f64..3.0, b in 0.01f64..3.0) {
        let v = TruncatedGaussian::new(0.0, s2, -b, b).unwrap().char_exp();
        prop_assert!(v.im.abs() <= 1e-12);
    }

    #[test]
    fn moments_respect_support(mu in -2.0f64..2.0, s2 in 1e-3f64..4.0, a in -3.0f64..2.9, w in 0.01f64..3.0) {
        let d = TruncatedGaussian::new(mu, s2, a, a + w);
        prop_assume!(d.is_ok());
        let d = d.unwrap();
        let m = d.moments();
        prop_assert!(m.mean >= a && m.mean <= a + w);
        prop_assert!(m.variance > 0.0);
        prop_assert!(m.variance <= s2 * (1.0 + 1e-9));
        prop_assert!(m.variance <= (w / 2.0).powi(2) * (1.0 + 1e-9));
    }

    #[test]
    fn samples_in_support(mu in -2.0f64..2.0, s2 in 1e-3f64..4.0, a in -3.0f64..2.9, w in 0.01f64..3.0, seed: u64) {
        let d = TruncatedGaussian::new(mu, s2, a, a + w);
        prop_assume!(d.is_ok());
        let d = d.unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..100 {
            let x = d.sample(&mut rng);
            prop_assert!(x >= a && x <= a + w);
        }
    }
}
