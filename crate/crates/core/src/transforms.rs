//! Closed-form transforms of `S = Σ √a_j X_j` and the moments of its centred
//! version `Σ √a_j (X_j − γ)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::GammaSumModel;
use crate::numerics::special::ln_gamma_unchecked;

/// Largest order accepted by [`central_moments`].
pub const MAX_MOMENT_ORDER: usize = 60;

fn check_mgf_domain(model: &GammaSumModel, t: f64) -> Result<()> {
    let limit = 1.0 / model.weights().max().sqrt();
    if !(t < limit) {
        return Err(Error::Domain(format!(
            "moment generating function diverges for t >= 1/sqrt(a_max) = {limit} (t = {t})"
        )));
    }
    Ok(())
}

/// `E e^{tS} = Π_j (1 − t√a_j)^{−γ}`, finite for `t < 1/√a_max`.
pub fn mgf(model: &GammaSumModel, t: f64) -> Result<f64> {
    check_mgf_domain(model, t)?;
    let log: f64 = model
        .scales()
        .iter()
        .map(|s| -model.shape() * (-t * s).ln_1p())
        .sum();
    Ok(log.exp())
}

/// `ln E e^{t(S − ES)} = −γ Σ_j [t√a_j + ln(1 − t√a_j)]`.
pub fn centred_log_mgf(model: &GammaSumModel, t: f64) -> Result<f64> {
    check_mgf_domain(model, t)?;
    Ok(-model.shape()
        * model
            .scales()
            .iter()
            .map(|s| t * s + (-t * s).ln_1p())
            .sum::<f64>())
}

/// Characteristic function `Π_j (1 − i√a_j t)^{−γ}` on the principal branch.
pub fn cf(model: &GammaSumModel, t: f64) -> Complex64 {
    let gamma = model.shape();
    let (log_modulus, phase) = model.active_weights().iter().fold((0.0, 0.0), |(m, p), &a| {
        (m - 0.5 * gamma * (a * t * t).ln_1p(), p + gamma * (a.sqrt() * t).atan())
    });
    Complex64::from_polar(log_modulus.exp(), phase)
}

/// `(1 + s·t²/m)^{−mγ/2}` with `s = Σa`, an upper bound for `|cf(t)|` when
/// `a_max ≤ s/m`. For weights summing to one this is `(1 + t²/m)^{−mγ/2}`.
pub fn cf_envelope(model: &GammaSumModel, m: usize, t: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::Precondition("envelope order m must be positive".into()));
    }
    let w = model.weights();
    let total = w.sum();
    let mf = m as f64;
    if w.max() / total > 1.0 / mf * (1.0 + 1e-12) {
        return Err(Error::Precondition(format!(
            "envelope needs a_max <= 1/m after normalisation (a_max = {}, m = {m})",
            w.max() / total
        )));
    }
    Ok((-0.5 * mf * model.shape() * (total * t * t / mf).ln_1p()).exp())
}

/// `ln (k−1)!`, exact in floating point up to order 20.
fn ln_factorial_minus_one(k: usize) -> f64 {
    if k <= 20 {
        (1..k).map(|j| j as f64).product::<f64>().ln()
    } else {
        ln_gamma_unchecked(k as f64)
    }
}

/// κ_k of the centred sum: `γ·(k−1)!·Σ_j a_j^{k/2}`, k ≥ 2.
pub fn cumulant(model: &GammaSumModel, k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::Precondition(format!(
            "cumulants of the centred sum start at order 2, got {k}"
        )));
    }
    let power_sum: f64 = model
        .active_weights()
        .iter()
        .map(|a| a.powf(k as f64 / 2.0))
        .sum();
    let value = if k <= 20 {
        model.shape() * (1..k).map(|j| j as f64).product::<f64>() * power_sum
    } else {
        (model.shape().ln() + ln_factorial_minus_one(k) + power_sum.ln()).exp()
    };
    if !value.is_finite() {
        return Err(Error::Overflow(format!("cumulant of order {k} overflows")));
    }
    Ok(value)
}

/// Cumulants and central moments of `Σ √a_j (X_j − γ)` up to `max_order`.
///
/// `cumulants[k]` and `central_moments[k]` are indexed by order; the entries
/// at orders 0 and 1 are 0 (cumulants) and 1, 0 (moments).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentTable {
    pub shape: f64,
    pub weights: Vec<f64>,
    pub max_order: usize,
    pub orders: Vec<usize>,
    pub cumulants: Vec<f64>,
    pub central_moments: Vec<f64>,
}

/// Central moments from the cumulants via
/// `μ_m = Σ_{j=2}^{m} C(m−1, j−1)·κ_j·μ_{m−j}`.
pub fn central_moments(model: &GammaSumModel, max_order: usize) -> Result<MomentTable> {
    if max_order == 0 {
        return Err(Error::Precondition("max_order must be at least 1".into()));
    }
    if max_order > MAX_MOMENT_ORDER {
        return Err(Error::Overflow(format!(
            "central moments beyond order {MAX_MOMENT_ORDER} overflow fixed precision (requested {max_order})"
        )));
    }
    let mut kappa = vec![0.0; max_order + 1];
    for (k, slot) in kappa.iter_mut().enumerate().skip(2) {
        *slot = cumulant(model, k)?;
    }
    let mut mu = vec![0.0; max_order + 1];
    mu[0] = 1.0;
    // binomial row C(m−1, ·), updated in place
    let mut row = vec![1.0];
    for m in 2..=max_order {
        let prev = row.clone();
        row = vec![1.0; m];
        for j in 1..m - 1 {
            row[j] = prev[j - 1] + prev[j];
        }
        mu[m] = (2..=m).map(|j| row[j - 1] * kappa[j] * mu[m - j]).sum();
        if !mu[m].is_finite() {
            return Err(Error::Overflow(format!("central moment of order {m} overflows")));
        }
    }
    Ok(MomentTable {
        shape: model.shape(),
        weights: model.weights().as_slice().to_vec(),
        max_order,
        orders: (0..=max_order).collect(),
        cumulants: kappa,
        central_moments: mu,
    })
}
