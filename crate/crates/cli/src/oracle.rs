//! Reference computations used by the validation suite.
//!
//! None of these share code paths with the core crate: the error function is
//! summed as a Maclaurin series in double-double arithmetic, integrals use
//! adaptive Simpson, and truncated Gaussian samples come from rejection.

use mimo_recip_core::Complex64;
use rand::Rng;

/// Unevaluated sum `hi + lo` carrying about 32 significant digits.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

impl Dd {
    const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }

    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        let (hi, lo) = quick_two_sum(p, e + (self.hi * o.lo + self.lo * o.hi));
        Dd { hi, lo }
    }

    fn div_f64(self, d: f64) -> Dd {
        let q1 = self.hi / d;
        let p = q1 * d;
        let e = q1.mul_add(d, -p);
        let r = self.sub(Dd { hi: p, lo: e });
        let q2 = r.hi / d;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

#[derive(Debug, Clone, Copy)]
struct CDd {
    re: Dd,
    im: Dd,
}

impl CDd {
    fn add(self, o: CDd) -> CDd {
        CDd {
            re: self.re.add(o.re),
            im: self.im.add(o.im),
        }
    }

    fn mul(self, o: CDd) -> CDd {
        CDd {
            re: self.re.mul(o.re).sub(self.im.mul(o.im)),
            im: self.re.mul(o.im).add(self.im.mul(o.re)),
        }
    }

    fn div_f64(self, d: f64) -> CDd {
        CDd {
            re: self.re.div_f64(d),
            im: self.im.div_f64(d),
        }
    }

    fn abs_approx(self) -> f64 {
        self.re.hi.hypot(self.im.hi)
    }
}

/// `2/sqrt(pi)` as a double-double.
const TWO_OVER_SQRT_PI: Dd = Dd {
    hi: std::f64::consts::FRAC_2_SQRT_PI,
    lo: 1.533_545_961_316_588e-17,
};

/// `erf(z)` from `2/sqrt(pi) sum (-1)^n z^(2n+1) / (n! (2n+1))` in double-double.
///
/// Intended for `|z| <= 5`, where cancellation stays far below 32 digits.
pub fn erf_series_dd(z: Complex64) -> Complex64 {
    let zc = CDd {
        re: Dd::from(z.re),
        im: Dd::from(z.im),
    };
    let minus_z2 = {
        let s = zc.mul(zc);
        CDd {
            re: s.re.neg(),
            im: s.im.neg(),
        }
    };
    let mut term = zc;
    let mut sum = zc;
    let mut n = 1u32;
    loop {
        term = minus_z2.mul(term).div_f64(n as f64);
        let add = term.div_f64((2 * n + 1) as f64);
        sum = sum.add(add);
        let big = f64::from(n) > z.norm_sqr();
        if big && add.abs_approx() <= 1e-34 * sum.abs_approx().max(1e-300) {
            break;
        }
        n += 1;
        if n > 2000 {
            break;
        }
    }
    let k = CDd {
        re: TWO_OVER_SQRT_PI,
        im: Dd::ZERO,
    };
    let v = sum.mul(k);
    Complex64::new(v.re.to_f64(), v.im.to_f64())
}

/// Adaptive Simpson quadrature with Richardson correction.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
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

/// `E{exp(jX)}` for `X ~ N(mu, s2)` truncated to `[a, b]`, by direct integration.
pub fn char_exp_quadrature(mu: f64, s2: f64, a: f64, b: f64) -> Complex64 {
    let s = s2.sqrt();
    let w = |x: f64| (-0.5 * ((x - mu) / s).powi(2)).exp();
    let z = adaptive_simpson(&w, a, b, 1e-14);
    let re = adaptive_simpson(&|x| w(x) * x.cos(), a, b, 1e-14) / z;
    let im = adaptive_simpson(&|x| w(x) * x.sin(), a, b, 1e-14) / z;
    Complex64::new(re, im)
}

/// One draw from `N(mu, s2)` truncated to finite `[a, b]` by uniform-proposal rejection.
pub fn rejection_sample<R: Rng + ?Sized>(rng: &mut R, mu: f64, s2: f64, a: f64, b: f64) -> f64 {
    let peak = mu.clamp(a, b);
    let inv = 1.0 / (2.0 * s2);
    loop {
        let x = a + (b - a) * rng.random::<f64>();
        let accept = (-((x - mu).powi(2) - (peak - mu).powi(2)) * inv).exp();
        if rng.random::<f64>() < accept {
            return x;
        }
    }
}

/// Halton radical inverse in `base`.
pub fn halton(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}
