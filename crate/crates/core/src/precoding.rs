//! MRT and ZF precoders, power normalisation and per-user powers.
//!
//! Symbols are never drawn: with independent unit-power symbols the per-user
//! signal and interference powers are the conditional expectations
//! `P_s = rho lambda^2 |g_kk|^2` and `P_I = rho lambda^2 sum_{i != k} |g_ki|^2`,
//! where `G = H_d W` is the `K x K` effective gain matrix.

use alloc::vec::Vec;

use crate::linalg::ComplexMatrix;
use crate::rf::{ChannelRealization, ErrorFactors, SystemConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Mrt,
    Zf,
}

impl Scheme {
    pub const ALL: [Scheme; 2] = [Scheme::Mrt, Scheme::Zf];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Mrt => "mrt",
            Scheme::Zf => "zf",
        }
    }
}

/// How `lambda` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    /// Closed-form `lambda` satisfying the power constraint on average.
    #[default]
    Analytic,
    /// `lambda = 1/sqrt(tr(W W^H))` for each realization.
    Empirical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrecoderOutput {
    /// `M x K` precoding matrix.
    pub w: ComplexMatrix,
    pub lambda: f64,
    pub scheme: Scheme,
    pub normalization: Normalization,
}

/// `W = H_d_hat^H`.
pub fn mrt_matrix(h_hat: &ComplexMatrix) -> ComplexMatrix {
    h_hat.hermitian()
}

/// `W = H_d_hat^H (H_d_hat H_d_hat^H)^{-1}`.
pub fn zf_matrix(h_hat: &ComplexMatrix) -> Result<ComplexMatrix> {
    if h_hat.rows() > h_hat.cols() {
        return Err(Error::Parameter("ZF needs at least as many antennas as users"));
    }
    let ginv = h_hat.gram().invert_hermitian_posdef()?;
    h_hat.hermitian().matmul(&ginv)
}

/// Closed-form normalisation.
///
/// MRT: `1/sqrt(M K ((1 - tau^2) A_r + tau^2))`.
/// ZF: `sqrt((M - K)/K ((1 - tau^2) A_r + tau^2))`, defined for `M > K`.
pub fn lambda_analytic(cfg: &SystemConfig, f: &ErrorFactors, scheme: Scheme) -> Result<f64> {
    let (m, k) = (cfg.m as f64, cfg.k as f64);
    let tau2 = cfg.tau2();
    let q = (1.0 - tau2) * f.a_r + tau2;
    match scheme {
        Scheme::Mrt => Ok(1.0 / libm::sqrt(m * k * q)),
        Scheme::Zf => {
            if cfg.m <= cfg.k {
                return Err(Error::Parameter("ZF normalisation requires M > K"));
            }
            Ok(libm::sqrt((m - k) / k * q))
        }
    }
}

/// `1/sqrt(tr(W W^H))`.
pub fn lambda_empirical(w: &ComplexMatrix) -> Result<f64> {
    lambda_from_trace(w.fro2())
}

fn lambda_from_trace(tr: f64) -> Result<f64> {
    if !(tr > 0.0) || !tr.is_finite() {
        return Err(Error::Parameter("precoder has zero or non-finite power"));
    }
    Ok(1.0 / libm::sqrt(tr))
}

/// Builds the precoder and its normalisation for one estimate.
pub fn precode(
    h_hat: &ComplexMatrix,
    cfg: &SystemConfig,
    f: &ErrorFactors,
    scheme: Scheme,
    normalization: Normalization,
) -> Result<PrecoderOutput> {
    let w = match scheme {
        Scheme::Mrt => mrt_matrix(h_hat),
        Scheme::Zf => zf_matrix(h_hat)?,
    };
    let lambda = match normalization {
        Normalization::Analytic => lambda_analytic(cfg, f, scheme)?,
        Normalization::Empirical => lambda_empirical(&w)?,
    };
    Ok(PrecoderOutput {
        w,
        lambda,
        scheme,
        normalization,
    })
}

/// `(P_s, P_I)` of user `k` for precoder `w` scaled by `lambda`.
pub fn per_user_powers(
    real: &ChannelRealization,
    w: &ComplexMatrix,
    lambda: f64,
    cfg: &SystemConfig,
    k: usize,
) -> Result<(f64, f64)> {
    let (m, users) = real.h.shape();
    if w.shape() != (m, users) || real.h_bt.len() != m {
        return Err(Error::Dimension {
            op: "per_user_powers",
            expected: (m, users),
            found: w.shape(),
        });
    }
    if k >= users {
        return Err(Error::Parameter("user index out of range"));
    }
    let scale = cfg.rho_d * lambda * lambda;
    let mut ps = 0.0;
    let mut pi = 0.0;
    for i in 0..users {
        let mut g = num_complex::Complex64::new(0.0, 0.0);
        for a in 0..m {
            g += real.h[(a, k)] * real.h_bt[a] * w[(a, i)];
        }
        if i == k {
            ps = scale * g.norm_sqr();
        } else {
            pi += scale * g.norm_sqr();
        }
    }
    Ok((ps, pi))
}

/// Effective gains `G = H_d W` and `tr(W W^H)`, without forming `W`.
///
/// For MRT `G = H_d H_d_hat^H` and `tr(W W^H) = ||H_d_hat||_F^2`. For ZF,
/// `G = H_d H_d_hat^H (H_d_hat H_d_hat^H)^{-1}` and `tr(W W^H)` is the trace
/// of the inverse Gram matrix.
pub fn effective_gains(
    h_d: &ComplexMatrix,
    h_hat: &ComplexMatrix,
    scheme: Scheme,
) -> Result<(ComplexMatrix, f64)> {
    let cross = h_d.mul_adjoint(h_hat)?;
    match scheme {
        Scheme::Mrt => Ok((cross, h_hat.fro2())),
        Scheme::Zf => {
            if h_hat.rows() > h_hat.cols() {
                return Err(Error::Parameter("ZF needs at least as many antennas as users"));
            }
            let ginv = h_hat.gram().invert_hermitian_posdef()?;
            let tr = ginv.trace()?.re;
            Ok((cross.matmul(&ginv)?, tr))
        }
    }
}

/// Per-user `(P_s, P_I)` vectors from the effective gain matrix.
pub fn powers_from_gains(g: &ComplexMatrix, lambda: f64, rho_d: f64) -> (Vec<f64>, Vec<f64>) {
    let scale = rho_d * lambda * lambda;
    let k = g.rows();
    let mut ps = Vec::with_capacity(k);
    let mut pi = Vec::with_capacity(k);
    for u in 0..k {
        let row = g.row(u);
        let total: f64 = row.iter().map(|z| z.norm_sqr()).sum();
        let s = row[u].norm_sqr();
        ps.push(scale * s);
        pi.push(scale * (total - s).max(0.0));
    }
    (ps, pi)
}

/// Normalisation for one realization given `tr(W W^H)`.
pub fn lambda_for(
    cfg: &SystemConfig,
    f: &ErrorFactors,
    scheme: Scheme,
    normalization: Normalization,
    trace_wwh: f64,
) -> Result<f64> {
    match normalization {
        Normalization::Analytic => lambda_analytic(cfg, f, scheme),
        Normalization::Empirical => lambda_from_trace(trace_wwh),
    }
}
