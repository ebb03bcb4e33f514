use mimo_recip_core::rf::*;
use mimo_recip_core::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Sampling estimate of `A_I` built only from drawn frontend gains.
fn sampled_a_i(profile: &RfErrorProfile, n: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (bt, br) = sample_frontends(profile, n, &mut rng).unwrap();
    let stats = |h: &[Complex64]| {
        let mean: Complex64 = h.iter().sum::<Complex64>() / n as f64;
        let power = h.iter().map(|z| z.norm_sqr()).sum::<f64>() / n as f64;
        mean.norm_sqr() / power
    };
    stats(&bt) * stats(&br)
}

#[test]
fn aggregated_factor_matches_sampling() {
    for (p, seed) in [(RfErrorProfile::normal_level(), 1), (RfErrorProfile::high_level(), 2)] {
        let f = derive_error_factors(&p, 0.0).unwrap();
        let est = sampled_a_i(&p, 4_000_000, seed);
        // relative sampling error of each ratio is well below 1e-3 at this size
        assert!((est - f.a_i).abs() < 3e-3 * f.a_i, "{est} vs {}", f.a_i);
    }
}

#[test]
fn frontend_mean_is_alpha_times_g() {
    let p = RfErrorProfile::high_level();
    let f = derive_error_factors(&p, 0.0).unwrap();
    let n = 1_000_000;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (bt, _) = sample_frontends(&p, n, &mut rng).unwrap();
    let nf = n as f64;
    let mean: Complex64 = bt.iter().sum::<Complex64>() / nf;
    let want = f.g_t * f.alpha_t;
    let var_re = bt.iter().map(|z| (z.re - mean.re).powi(2)).sum::<f64>() / nf;
    let var_im = bt.iter().map(|z| (z.im - mean.im).powi(2)).sum::<f64>() / nf;
    assert!((mean.re - want.re).abs() <= 4.0 * (var_re / nf).sqrt());
    assert!((mean.im - want.im).abs() <= 4.0 * (var_im / nf).sqrt());
    let power = bt.iter().map(|z| z.norm_sqr()).sum::<f64>() / nf;
    assert!((power - f.a_t).abs() < 2e-3 * f.a_t);
}

#[test]
fn linear_domain_uses_truncated_moments() {
    let p = RfErrorProfile::symmetric(ErrorComponent::new(1.0, 0.04, 0.8, 1.3), ErrorComponent::fixed(0.0))
        .with_units(AmplitudeDomain::Linear, PhaseVarianceUnit::Rad2);
    let f = derive_error_factors(&p, 0.0).unwrap();
    let m = mimo_recip_core::truncated::TruncatedGaussian::new(1.0, 0.04, 0.8, 1.3).unwrap().moments();
    assert_eq!((f.alpha_t, f.sigma_t2), (m.mean, m.variance));
    assert!((f.a_i - (m.mean * m.mean / (m.mean * m.mean + m.variance)).powi(2)).abs() < 1e-15);
}

#[test]
fn degree_variance_unit_is_narrower() {
    let rad = derive_error_factors(&RfErrorProfile::high_level(), 0.0).unwrap();
    let deg = derive_error_factors(
        &RfErrorProfile::high_level().with_units(AmplitudeDomain::Db, PhaseVarianceUnit::Deg2),
        0.0,
    )
    .unwrap();
    assert!(deg.g_t.norm() > rad.g_t.norm());
    // 1 deg^2 of phase spread: |g| ~ exp(-sigma^2/2)
    let s2 = (core::f64::consts::PI / 180.0).powi(2);
    assert!((deg.g_t.norm() - (-s2 / 2.0).exp()).abs() < 1e-6);
}

#[test]
fn frontends_stay_in_bounds() {
    let p = RfErrorProfile::high_level();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (bt, br) = sample_frontends(&p, 10_000, &mut rng).unwrap();
    let (lo, hi) = (10f64.powf(-4.0 / 20.0), 10f64.powf(4.0 / 20.0));
    let max_phase = 50f64.to_radians();
    for z in bt.iter().chain(&br) {
        assert!(z.norm() >= lo * (1.0 - 1e-12) && z.norm() <= hi * (1.0 + 1e-12));
        assert!(z.arg().abs() <= max_phase + 1e-12);
    }
    let (bt, br) = sample_frontends(&RfErrorProfile::error_free(), 16, &mut rng).unwrap();
    assert!(bt.iter().chain(&br).all(|&z| z == Complex64::new(1.0, 0.0)));
}

#[test]
fn b_i_is_nonincreasing_in_tau() {
    for p in [RfErrorProfile::normal_level(), RfErrorProfile::high_level(), RfErrorProfile::error_free()] {
        let mut prev = f64::INFINITY;
        for i in 0..=100 {
            let tau = i as f64 / 100.0;
            let f = derive_error_factors(&p, tau).unwrap();
            assert!(f.b_i <= prev + 1e-15);
            assert!(f.b_i >= 0.0 && f.b_i <= f.a_t);
            prev = f.b_i;
        }
    }
}

#[test]
fn channel_entries_are_unit_complex_normal() {
    let cfg = SystemConfig::new(1000, 1000, 1.0, 0.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let (h, v) = sample_channel(&cfg, &mut rng).unwrap();
    let n = 1_000_000.0;
    let p: Vec<f64> = h.as_slice().iter().map(|z| z.norm_sqr()).collect();
    let mean = p.iter().sum::<f64>() / n;
    // |CN(0,1)|^2 is Exp(1): unit variance
    assert!((mean - 1.0).abs() <= 4.0 / n.sqrt());
    let cross: Complex64 = h.as_slice().iter().zip(v.as_slice()).map(|(a, b)| a * b.conj()).sum::<Complex64>() / n;
    assert!(cross.re.abs() <= 4.0 * (0.5 / n).sqrt() && cross.im.abs() <= 4.0 * (0.5 / n).sqrt());

    let mut again = ChaCha8Rng::seed_from_u64(77);
    let (h2, v2) = sample_channel(&cfg, &mut again).unwrap();
    assert_eq!((h, v), (h2, v2));
}

#[test]
fn reconstruction_identity() {
    let cfg = SystemConfig::new(40, 6, 10.0, 0.4).unwrap();
    let laws = FrontendLaws::new(&RfErrorProfile::high_level()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let real = ChannelRealization::sample(&cfg, &laws, &mut rng);
        for tau in [0.0, 0.3, 0.9] {
            let (truth, hat) = build_channels(&real, tau).unwrap();
            let e = reciprocity_error_matrix(&real.h_bt, &real.h_br).unwrap();
            let scale = 1.0 / (1.0 - tau * tau).sqrt();
            for u in 0..cfg.k {
                for i in 0..cfg.m {
                    let rebuilt = (hat[(u, i)] - real.v[(i, u)] * tau) * scale / real.h_br[i] * real.h_bt[i];
                    assert!((rebuilt - truth[(u, i)]).norm() <= 1e-12 * truth[(u, i)].norm().max(1.0));
                }
            }
            for ((ei, br), bt) in e.iter().zip(&real.h_br).zip(&real.h_bt) {
                assert!((ei * br - bt).norm() <= 1e-14 * bt.norm().max(1.0));
            }
        }
    }
}
