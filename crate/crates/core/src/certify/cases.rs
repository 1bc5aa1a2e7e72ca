use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use super::mixture::ExponentialMixture;
use super::{EXACT_TOLERANCE, MOMENT_TOLERANCE, QUADRATURE_SLACK};
use crate::density::{density_bounds_pointwise, fourier_density_bound, DensityEvaluator};
use crate::entropy::{equal_weights_entropy, equal_weights_renyi, max_density, renyi_entropy, shannon_entropy};
use crate::error::{Error, Result};
use crate::model::{is_majorized, schur_ostrowski_check, GammaSumModel, WeightVector};
use crate::numerics::special::ln_gamma_unchecked;
use crate::numerics::QuadratureConfig;
use crate::transforms::{central_moments, cf, cf_envelope};

/// Tolerance of the pointwise envelope comparison (both sides are closed form).
const ENVELOPE_TOLERANCE: f64 = 1e-12;

pub const BNU_LOWER: f64 = 0.026_995_483_256_594_03;
pub const BNU_UPPER: f64 = 2.256_758_334_191_025;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum MaxDensityMode {
    /// `1/√(12γ) ≤ M ≤ γ^{−1/2}`, γ ≥ 1.
    G1,
    /// `M ≥ 0.003γ(1−a_1)^{(γ−1)/2}` for γ < 1; upper side at n = 2, γ ≥ ½.
    G12,
    /// γ = ½ with the Bobkov–Naumov–Ulyanov constants.
    Bnu,
    /// `1/(k+1) ≤ γ < 1/k`: two-sided at n = k+1, lower side and an
    /// empirical ratio beyond.
    Gk { k: usize },
}

/// Everything needed to re-evaluate one certificate case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CaseInput {
    Phi {
        shape: f64,
        c: f64,
        upper: Vec<f64>,
        lower: Vec<f64>,
        mixture: ExponentialMixture,
    },
    Phi0 {
        shape: f64,
        upper: Vec<f64>,
        lower: Vec<f64>,
        mixture: ExponentialMixture,
    },
    Fg {
        shape: f64,
        upper: Vec<f64>,
        lower: Vec<f64>,
        point: Vec<f64>,
        i: usize,
        j: usize,
    },
    Entropy {
        shape: f64,
        weights: Vec<f64>,
    },
    Renyi {
        shape: f64,
        alpha: f64,
        weights: Vec<f64>,
    },
    Moments {
        shape: f64,
        upper: Vec<f64>,
        lower: Vec<f64>,
        max_order: usize,
    },
    MaxDensity {
        mode: MaxDensityMode,
        shape: f64,
        weights: Vec<f64>,
    },
    CfEnvelope {
        shape: f64,
        m: usize,
        weights: Vec<f64>,
    },
    DensityBounds {
        shape: f64,
        weights: Vec<f64>,
        x: f64,
    },
}

/// One inequality `lhs ≤ rhs` accepted up to `tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    pub tolerance: f64,
}

impl Check {
    fn new(label: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self {
            label: label.into(),
            lhs,
            rhs,
            tolerance,
        }
    }

    /// Absolute tolerance scaled by the size of the compared values.
    fn scaled(label: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let scale = 1f64.max(lhs.abs()).max(rhs.abs());
        Self::new(label, lhs, rhs, tolerance * scale)
    }

    pub fn margin(&self) -> f64 {
        if self.lhs == f64::NEG_INFINITY || self.rhs == f64::INFINITY {
            return f64::INFINITY;
        }
        self.rhs - self.lhs
    }

    pub fn slack(&self) -> f64 {
        self.margin() + self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub note: Option<String>,
    pub observation: Option<(String, f64)>,
}

fn pair(upper: &[f64], lower: &[f64]) -> Result<(WeightVector, WeightVector)> {
    let a = WeightVector::new(upper.to_vec())?;
    let b = WeightVector::new(lower.to_vec())?;
    if !is_majorized(&a, &b)? {
        return Err(Error::Precondition("upper vector does not majorize lower vector".into()));
    }
    Ok((a, b))
}

fn tight_quadrature(cfg: &QuadratureConfig) -> QuadratureConfig {
    QuadratureConfig {
        abs_tol: cfg.abs_tol.min(1e-14),
        rel_tol: cfg.rel_tol.min(1e-12),
        ..*cfg
    }
}

/// `E Φ(c + Σ√a_j(X_j − γ))`.
pub fn phi_value(shape: f64, c: f64, a: &[f64], mixture: &ExponentialMixture, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    let scales: Vec<f64> = a.iter().map(|x| x.sqrt()).collect();
    let log_laplace = |t: f64| {
        -t * c
            + shape
                * scales
                    .iter()
                    .map(|s| t * s - (t * s).ln_1p())
                    .sum::<f64>()
    };
    let e = mixture.expectation(log_laplace, 1.0 / c, cfg)?;
    Ok((e.value, e.err_est))
}

/// `E Φ(Σ√a_j X_j)`.
pub fn phi0_value(shape: f64, a: &[f64], mixture: &ExponentialMixture, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    let scales: Vec<f64> = a.iter().map(|x| x.sqrt()).collect();
    if let Some(q) = mixture.power {
        let n_pos = a.iter().filter(|x| **x > 0.0).count() as f64;
        if q >= shape * n_pos {
            return Err(Error::Divergent {
                reason: format!("E S^-q is infinite for q = {q} ≥ γ·n_eff = {}", shape * n_pos),
                value: f64::INFINITY,
            });
        }
    }
    let mean: f64 = shape * scales.iter().sum::<f64>();
    let log_laplace = |t: f64| -shape * scales.iter().map(|s| (t * s).ln_1p()).sum::<f64>();
    let e = mixture.expectation(log_laplace, 1.0 / mean, cfg)?;
    Ok((e.value, e.err_est))
}

/// `F(x) = Π e^{γ√x_j}(1+√x_j)^{−γ}`.
pub fn f_functional(shape: f64, x: &[f64]) -> f64 {
    ln_f(shape, x).exp()
}

/// `G(x) = Π (1+√x_j)^{−γ}`.
pub fn g_functional(shape: f64, x: &[f64]) -> f64 {
    ln_g(shape, x).exp()
}

fn ln_f(shape: f64, x: &[f64]) -> f64 {
    shape * x.iter().map(|v| v.sqrt() - v.sqrt().ln_1p()).sum::<f64>()
}

fn ln_g(shape: f64, x: &[f64]) -> f64 {
    -shape * x.iter().map(|v| v.sqrt().ln_1p()).sum::<f64>()
}

/// `L_γ·Γ(1−kγ)/Γ(γ)` with `L_γ = sup_x x^{(k+1)γ−1}e^{−x}`: the explicit
/// constant of the max-density upper bound at n = k+1.
pub fn gk_upper_constant(shape: f64, k: usize) -> f64 {
    let m = (k as f64 + 1.0) * shape - 1.0;
    let ln_l = if m == 0.0 { 0.0 } else { m * m.ln() - m };
    (ln_l + ln_gamma_unchecked(1.0 - k as f64 * shape) - ln_gamma_unchecked(shape)).exp()
}

/// `m^m e^{−m}/Γ((k+1)γ)`, `m = (k+1)γ−1`: the matching lower constant at n = k+1.
pub fn gk_lower_constant(shape: f64, k: usize) -> f64 {
    let r = (k as f64 + 1.0) * shape;
    let m = r - 1.0;
    let ln_l = if m == 0.0 { 0.0 } else { m * m.ln() - m };
    (ln_l - ln_gamma_unchecked(r)).exp()
}

/// `(a_1…a_k)^{−γ/2}(1 − a_1 − … − a_k)^{(kγ−1)/2}` for descending `a`.
pub fn gk_shape_factor(shape: f64, k: usize, a: &[f64]) -> f64 {
    let head: f64 = a[..k].iter().map(|x| x.ln()).sum();
    let rest: f64 = (1.0 - a[..k].iter().sum::<f64>()).max(0.0);
    (-0.5 * shape * head + 0.5 * (k as f64 * shape - 1.0) * rest.ln()).exp()
}

fn descending(weights: &[f64]) -> Result<Vec<f64>> {
    let w = WeightVector::new(weights.to_vec())?;
    let mut a = w.as_slice().to_vec();
    a.sort_by(|x, y| y.total_cmp(x));
    Ok(a)
}

fn quad_tol(err: f64) -> f64 {
    err + QUADRATURE_SLACK
}

pub fn evaluate(input: &CaseInput, cfg: &QuadratureConfig) -> Result<Outcome> {
    match input {
        CaseInput::Phi {
            shape,
            c,
            upper,
            lower,
            mixture,
        } => {
            let (a, _) = pair(upper, lower)?;
            let n = upper.len() as f64;
            let bound = c * c / (shape * shape * n);
            if !(a.sum() < bound) {
                return Err(Error::Domain(format!(
                    "Σa = {} leaves the domain Σa < c²/(γ²n) = {bound}",
                    a.sum()
                )));
            }
            let cfg = tight_quadrature(cfg);
            let (va, ea) = phi_value(*shape, *c, upper, mixture, &cfg)?;
            let (vb, eb) = phi_value(*shape, *c, lower, mixture, &cfg)?;
            let mut check = Check::scaled("phi", va, vb, EXACT_TOLERANCE);
            check.tolerance += ea + eb;
            Ok(Outcome {
                checks: vec![check],
                ..Outcome::default()
            })
        }
        CaseInput::Phi0 {
            shape,
            upper,
            lower,
            mixture,
        } => {
            let (a, _) = pair(upper, lower)?;
            let cfg = tight_quadrature(cfg);
            let (va, ea) = phi0_value(*shape, upper, mixture, &cfg)?;
            let (vb, eb) = phi0_value(*shape, lower, mixture, &cfg)?;
            let uniform = vec![a.sum() / upper.len() as f64; upper.len()];
            let (vu, eu) = phi0_value(*shape, &uniform, mixture, &cfg)?;
            let mut main = Check::scaled("phi0", vb, va, EXACT_TOLERANCE);
            main.tolerance += ea + eb;
            let mut uni = Check::scaled("phi0-uniform", vu, va, EXACT_TOLERANCE);
            uni.tolerance += ea + eu;
            Ok(Outcome {
                checks: vec![main, uni],
                ..Outcome::default()
            })
        }
        CaseInput::Fg {
            shape,
            upper,
            lower,
            point,
            i,
            j,
        } => {
            pair(upper, lower)?;
            let g = *shape;
            let osf = schur_ostrowski_check(|x| ln_f(g, x), point, *i, *j, None)?;
            let osg = schur_ostrowski_check(|x| ln_g(g, x), point, *i, *j, None)?;
            Ok(Outcome {
                checks: vec![
                    Check::scaled("F", f_functional(g, upper), f_functional(g, lower), EXACT_TOLERANCE),
                    Check::scaled("G", g_functional(g, lower), g_functional(g, upper), EXACT_TOLERANCE),
                    Check::new("ostrowski-lnF", osf, 0.0, EXACT_TOLERANCE),
                    Check::new("ostrowski-lnG", 0.0, osg, EXACT_TOLERANCE),
                ],
                ..Outcome::default()
            })
        }
        CaseInput::Entropy { shape, weights } => {
            let n = weights.len();
            if shape * (n as f64) < 1.0 {
                return Err(Error::Precondition(format!("entropy comparison needs γn ≥ 1, got {}", shape * n as f64)));
            }
            let model = GammaSumModel::from_slice(*shape, weights)?;
            let rhs = equal_weights_entropy(*shape, n);
            let h = shannon_entropy(&model, cfg)?;
            Ok(Outcome {
                checks: vec![Check::new("entropy", h.value, rhs, quad_tol(h.err_est))],
                note: Some(format!("engine {}", h.engine)),
                ..Outcome::default()
            })
        }
        CaseInput::Renyi { shape, alpha, weights } => {
            let n = weights.len() as f64;
            let d = shape * n;
            if !(*alpha > 1.0) || d >= 1.0 || alpha * (d - 1.0) + 1.0 <= 0.0 {
                return Err(Error::Precondition(format!(
                    "Rényi comparison needs α > 1, nγ < 1 and α(nγ−1)+1 > 0 (α = {alpha}, nγ = {d})"
                )));
            }
            let model = GammaSumModel::from_slice(*shape, weights)?;
            let rhs = equal_weights_renyi(*shape, weights.len(), *alpha);
            let d_eff = model.total_shape();
            if alpha * (d_eff - 1.0) + 1.0 <= 0.0 {
                return Ok(Outcome {
                    checks: vec![Check::new("renyi", f64::NEG_INFINITY, rhs, 0.0)],
                    note: Some("trivial pass: ∫p^α = ∞ so the left side is −∞".into()),
                    ..Outcome::default()
                });
            }
            let h = renyi_entropy(&model, *alpha, cfg)?;
            Ok(Outcome {
                checks: vec![Check::new("renyi", h.value, rhs, quad_tol(h.err_est))],
                note: Some(format!("engine {}", h.engine)),
                ..Outcome::default()
            })
        }
        CaseInput::Moments {
            shape,
            upper,
            lower,
            max_order,
        } => {
            if *max_order > 20 {
                return Err(Error::Precondition(format!("moment suite is limited to order 20, got {max_order}")));
            }
            pair(upper, lower)?;
            let ma = central_moments(&GammaSumModel::from_slice(*shape, upper)?, *max_order)?;
            let mb = central_moments(&GammaSumModel::from_slice(*shape, lower)?, *max_order)?;
            let mut checks = Vec::new();
            for k in 2..=*max_order {
                let (a, b) = (ma.central_moments[k], mb.central_moments[k]);
                checks.push(Check::scaled(format!("mu{k}-schur"), b, a, MOMENT_TOLERANCE));
                checks.push(Check::scaled(format!("mu{k}-nonneg"), 0.0, a.min(b), MOMENT_TOLERANCE));
            }
            Ok(Outcome {
                checks,
                ..Outcome::default()
            })
        }
        CaseInput::MaxDensity { mode, shape, weights } => evaluate_max_density(*mode, *shape, weights, cfg),
        CaseInput::CfEnvelope { shape, m, weights } => {
            let model = GammaSumModel::from_slice(*shape, weights)?;
            let mut worst: Option<(Check, f64)> = None;
            for i in 0..=60 {
                let t = 10f64.powf(-2.0 + 5.0 * i as f64 / 60.0);
                let lhs = cf(&model, t).norm();
                let rhs = cf_envelope(&model, *m, t)?;
                let check = Check::new("envelope", lhs, rhs, ENVELOPE_TOLERANCE);
                if worst.as_ref().is_none_or(|(w, _)| check.slack() < w.slack()) {
                    worst = Some((check, t));
                }
            }
            let (envelope, t) = worst.expect("t-grid is non-empty");
            let mut checks = vec![envelope];
            if *m as f64 * shape > 1.0 {
                let bound = fourier_density_bound(*shape, *m)?;
                let md = max_density(&model, cfg)?;
                checks.push(Check::new("fourier-bound", md.value, bound, quad_tol(md.err_est)));
            }
            Ok(Outcome {
                checks,
                note: Some(format!("tightest envelope point t = {t:.6e}")),
                ..Outcome::default()
            })
        }
        CaseInput::DensityBounds { shape, weights, x } => {
            if weights.iter().any(|w| !(*w > 0.0)) {
                return Err(Error::Precondition("sandwich bounds need strictly positive weights".into()));
            }
            let model = GammaSumModel::from_slice(*shape, weights)?;
            let eval = DensityEvaluator::new(&model, None, cfg)?;
            let p = eval.eval(*x)?;
            let (lo, hi) = density_bounds_pointwise(&model, *x);
            let tol = p.err_est + 1e-12 * p.value;
            Ok(Outcome {
                checks: vec![
                    Check::new("lower", lo, p.value, tol),
                    Check::new("upper", p.value, hi * (1.0 + 1e-6), tol),
                ],
                note: Some(format!("engine {}", eval.engine())),
                ..Outcome::default()
            })
        }
    }
}

fn evaluate_max_density(mode: MaxDensityMode, shape: f64, weights: &[f64], cfg: &QuadratureConfig) -> Result<Outcome> {
    let a = descending(weights)?;
    let total: f64 = a.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::SumMismatch { left: total, right: 1.0 });
    }
    let n = a.iter().filter(|x| **x > 0.0).count();
    let regime = |ok: bool, what: &str| {
        if ok {
            Ok(())
        } else {
            Err(Error::Precondition(format!("{what} (γ = {shape}, n_eff = {n})")))
        }
    };
    match mode {
        MaxDensityMode::G1 => regime(shape >= 1.0, "g1 needs γ ≥ 1")?,
        MaxDensityMode::G12 => regime(shape < 1.0, "g12 needs γ < 1")?,
        MaxDensityMode::Bnu => regime(shape == 0.5, "bnu needs γ = 1/2")?,
        MaxDensityMode::Gk { k } => {
            let kf = k as f64;
            regime(k >= 1 && shape >= 1.0 / (kf + 1.0) && shape < 1.0 / kf, "gk needs 1/(k+1) ≤ γ < 1/k")?;
            regime(n > k, "gk needs n ≥ k+1")?;
        }
    }
    let model = GammaSumModel::from_slice(shape, &a)?;
    let md = max_density(&model, cfg)?;
    if md.is_infinite() {
        return Err(Error::Precondition(format!(
            "M = +inf for γ·n_eff = {} < 1; the draw is outside the bound's regime",
            model.total_shape()
        )));
    }
    let m = md.value;
    let tol = quad_tol(md.err_est);
    let spread = 1.0 - a[0];
    let g12_lower = 0.003 * shape * spread.powf(0.5 * (shape - 1.0));
    let mut out = Outcome {
        note: Some(format!("M = {m:.12e} at x* = {:.6e} ({})", md.argmax, md.engine)),
        ..Outcome::default()
    };
    match mode {
        MaxDensityMode::G1 => {
            out.checks.push(Check::new("moriguti", 1.0 / (12.0 * shape).sqrt(), m, tol));
            out.checks.push(Check::new("log-concave", m, 1.0 / shape.sqrt(), tol));
        }
        MaxDensityMode::G12 => {
            out.checks.push(Check::new("g12-lower", g12_lower, m, tol));
            if n == 2 && shape >= 0.5 {
                let upper = gk_upper_constant(shape, 1) * gk_shape_factor(shape, 1, &a);
                out.checks.push(Check::new("g12-upper", m, upper, tol));
            }
        }
        MaxDensityMode::Bnu => {
            let f = spread.powf(-0.25);
            out.checks.push(Check::new("bnu-lower", BNU_LOWER * f, m, tol));
            out.checks.push(Check::new("bnu-upper", m, BNU_UPPER * f, tol));
        }
        MaxDensityMode::Gk { k } => {
            let factor = gk_shape_factor(shape, k, &a);
            if n == k + 1 {
                out.checks.push(Check::new("gk-lower", gk_lower_constant(shape, k) * factor, m, tol));
                out.checks.push(Check::new("gk-upper", m, gk_upper_constant(shape, k) * factor, tol));
            } else {
                out.checks.push(Check::new("g12-lower", g12_lower, m, tol));
                out.checks.push(Check::new("moriguti", 1.0 / (12.0 * shape).sqrt(), m, tol));
                out.observation = Some((format!("gk_k{k}_n{n}_ratio_sup"), m / factor));
            }
        }
    }
    Ok(out)
}

/// `1/(2e²√(2π))` and `4/√π`.
pub fn bnu_constants() -> (f64, f64) {
    (1.0 / (2.0 * E * E * (2.0 * PI).sqrt()), 4.0 / PI.sqrt())
}
