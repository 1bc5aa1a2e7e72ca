//! Shannon and Rényi entropies of S, the maximal density M = e^{−h_∞}, and the
//! relative entropy to the Gaussian of equal variance.

use std::cell::RefCell;
use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::density::{default_grid, DensityEvaluator, Engine};
use crate::error::{Error, Result};
use crate::format::real;
use crate::model::GammaSumModel;
use crate::numerics::special::ln_gamma_unchecked;
use crate::numerics::{digamma, integrate, Estimate, Interval, QuadratureConfig};

/// Largest finite Rényi order accepted; beyond it use `f64::INFINITY`.
pub const MAX_FINITE_ORDER: f64 = 64.0;

/// Total shapes this close to 1 are treated as the bounded-at-zero boundary case.
const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyResult {
    /// Rényi order α; 1 is Shannon, `+inf` is −ln M.
    #[serde(with = "real")]
    pub order: f64,
    #[serde(with = "real")]
    pub value: f64,
    #[serde(with = "real")]
    pub err_est: f64,
    pub engine: Engine,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaxDensity {
    #[serde(with = "real")]
    pub value: f64,
    pub argmax: f64,
    #[serde(with = "real")]
    pub err_est: f64,
    pub engine: Engine,
}

impl MaxDensity {
    pub fn is_infinite(&self) -> bool {
        self.value.is_infinite()
    }
}

/// Evaluates the density inside a quadrature closure, parking the first engine
/// error so it can be reported instead of a generic non-finite-integrand error.
struct Sampler<'a> {
    eval: &'a DensityEvaluator,
    failure: RefCell<Option<Error>>,
}

impl<'a> Sampler<'a> {
    fn new(eval: &'a DensityEvaluator) -> Self {
        Self {
            eval,
            failure: RefCell::new(None),
        }
    }

    fn p(&self, x: f64) -> f64 {
        match self.eval.eval(x) {
            Ok(e) => e.value,
            Err(err) => {
                self.failure.borrow_mut().get_or_insert(err);
                f64::NAN
            }
        }
    }

    fn finish(self, r: Result<Estimate>) -> Result<Estimate> {
        match self.failure.into_inner() {
            Some(err) => Err(err),
            None => r,
        }
    }
}

/// Coarse argmax of the density on the default graded grid.
fn coarse_mode(eval: &DensityEvaluator, model: &GammaSumModel, points: usize) -> Result<(usize, Vec<f64>, Vec<f64>)> {
    let grid = default_grid(model, points);
    let values = grid.iter().map(|&x| eval.eval(x).map(|e| e.value)).collect::<Result<Vec<_>>>()?;
    let i = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    Ok((i, grid, values))
}

fn split_point(eval: &DensityEvaluator, model: &GammaSumModel) -> Result<(f64, f64)> {
    let (i, grid, values) = coarse_mode(eval, model, 64)?;
    let split = if i == 0 { 0.25 * model.mean() } else { grid[i] };
    let level = eval.eval(split)?.value.max(values[i].min(f64::MAX));
    Ok((split, level))
}

fn order_error(alpha: f64) -> Error {
    Error::Precondition(format!(
        "Rényi order must lie in (0, {MAX_FINITE_ORDER}] or be +inf, got {alpha}"
    ))
}

pub fn shannon_entropy(model: &GammaSumModel, cfg: &QuadratureConfig) -> Result<EntropyResult> {
    let eval = DensityEvaluator::new(model, None, cfg)?;
    shannon_entropy_with(&eval, model, cfg)
}

/// `−∫ p ln p`, split at the mode, graded at 0 when nγ < 2.
pub fn shannon_entropy_with(eval: &DensityEvaluator, model: &GammaSumModel, cfg: &QuadratureConfig) -> Result<EntropyResult> {
    let d = model.total_shape();
    let (split, _) = split_point(eval, model)?;
    let sigma = model.variance().sqrt();
    let sampler = Sampler::new(eval);
    let integrand = |x: f64| {
        let p = sampler.p(x);
        if p > 0.0 {
            -p * p.ln()
        } else if p == 0.0 {
            0.0
        } else {
            p
        }
    };
    let mut head = Interval::new(0.0, split);
    if d < 2.0 {
        head = head.with_singularity(d - 1.0);
    }
    let result = integrate(integrand, head, cfg).and_then(|h| {
        let t = integrate(integrand, Interval::semi_infinite(split).with_tail_scale(sigma), cfg)?;
        Ok(Estimate {
            value: h.value + t.value,
            err_est: h.err_est + t.err_est,
        })
    });
    let est = sampler.finish(result)?;
    Ok(EntropyResult {
        order: 1.0,
        value: est.value,
        err_est: est.err_est,
        engine: eval.engine(),
    })
}

pub fn renyi_entropy(model: &GammaSumModel, alpha: f64, cfg: &QuadratureConfig) -> Result<EntropyResult> {
    let eval = DensityEvaluator::new(model, None, cfg)?;
    renyi_entropy_with(&eval, model, alpha, cfg)
}

/// `(1−α)^{−1} ln ∫ p^α`. Order 1 falls back to Shannon, order `+inf` to
/// `−ln M`, order 0 reports `+inf` (the support is unbounded).
pub fn renyi_entropy_with(
    eval: &DensityEvaluator,
    model: &GammaSumModel,
    alpha: f64,
    cfg: &QuadratureConfig,
) -> Result<EntropyResult> {
    if alpha.is_nan() || alpha < 0.0 || (alpha.is_finite() && alpha > MAX_FINITE_ORDER) {
        return Err(order_error(alpha));
    }
    if alpha == 0.0 {
        return Ok(EntropyResult {
            order: 0.0,
            value: f64::INFINITY,
            err_est: 0.0,
            engine: eval.engine(),
        });
    }
    if alpha == 1.0 {
        return shannon_entropy_with(eval, model, cfg);
    }
    if alpha.is_infinite() {
        let m = max_density_with(eval, model, cfg)?;
        return Ok(EntropyResult {
            order: f64::INFINITY,
            value: -m.value.ln(),
            err_est: if m.value.is_finite() { m.err_est / m.value } else { 0.0 },
            engine: m.engine,
        });
    }
    let d = model.total_shape();
    let beta = alpha * (d - 1.0);
    if beta <= -1.0 {
        return Err(Error::Divergent {
            reason: format!("∫p^α diverges at 0: α(nγ−1)+1 = {} ≤ 0", beta + 1.0),
            value: f64::NEG_INFINITY,
        });
    }
    let (split, level) = split_point(eval, model)?;
    let sigma = model.variance().sqrt();
    let ln_level = level.ln();
    let sampler = Sampler::new(eval);
    // integrate (p/level)^α so the tolerances act on an O(1) quantity
    let integrand = |x: f64| {
        let p = sampler.p(x);
        if p > 0.0 {
            (alpha * (p.ln() - ln_level)).exp()
        } else if p == 0.0 {
            0.0
        } else {
            p
        }
    };
    let mut head = Interval::new(0.0, split);
    if beta < 1.0 {
        head = head.with_singularity(beta);
    }
    let tail_scale = sigma / alpha.max(1.0).sqrt();
    let result = integrate(integrand, head, cfg).and_then(|h| {
        let t = integrate(integrand, Interval::semi_infinite(split).with_tail_scale(tail_scale), cfg)?;
        Ok(Estimate {
            value: h.value + t.value,
            err_est: h.err_est + t.err_est,
        })
    });
    let est = sampler.finish(result)?;
    let ln_int = alpha * ln_level + est.value.ln();
    Ok(EntropyResult {
        order: alpha,
        value: ln_int / (1.0 - alpha),
        err_est: est.err_est / est.value / (1.0 - alpha).abs(),
        engine: eval.engine(),
    })
}

pub fn max_density(model: &GammaSumModel, cfg: &QuadratureConfig) -> Result<MaxDensity> {
    let eval = DensityEvaluator::new(model, None, cfg).or_else(|e| {
        if model.total_shape() < 1.0 {
            // M = ∞ needs no density engine
            Ok(DensityEvaluator::Closed { shape: 1.0, scale: 1.0 })
        } else {
            Err(e)
        }
    })?;
    max_density_with(&eval, model, cfg)
}

const GOLDEN_REL_TOL: f64 = 1e-8;

/// M = sup p. Infinite when nγ < 1; equal to `Π a_j^{−γ/2}` (attained at
/// 0+) when nγ = 1; otherwise a 512-point scan refined by golden section.
pub fn max_density_with(eval: &DensityEvaluator, model: &GammaSumModel, _cfg: &QuadratureConfig) -> Result<MaxDensity> {
    let d = model.total_shape();
    if d < 1.0 - BOUNDARY_TOL {
        return Ok(MaxDensity {
            value: f64::INFINITY,
            argmax: 0.0,
            err_est: 0.0,
            engine: eval.engine(),
        });
    }
    if (d - 1.0).abs() <= BOUNDARY_TOL {
        let ln_m = -0.5 * model.shape() * model.active_weights().iter().map(|a| a.ln()).sum::<f64>();
        let value = ln_m.exp();
        return Ok(MaxDensity {
            value,
            argmax: 0.0,
            err_est: 4.0 * f64::EPSILON * value,
            engine: eval.engine(),
        });
    }
    let (i, grid, _) = coarse_mode(eval, model, 512)?;
    let lo = if i == 0 { 0.0 } else { grid[i - 1] };
    let hi = grid[(i + 1).min(grid.len() - 1)];
    let f = |x: f64| eval.eval(x).map(|e| e.value);
    let (argmax, value) = golden_max(f, lo, hi)?;
    let err_est = eval.eval(argmax)?.err_est;
    Ok(MaxDensity {
        value,
        argmax,
        err_est,
        engine: eval.engine(),
    })
}

fn golden_max<F: Fn(f64) -> Result<f64>>(f: F, mut a: f64, mut b: f64) -> Result<(f64, f64)> {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a) > GOLDEN_REL_TOL * 0.5 * (a.abs() + b.abs()) {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc >= fd { (c, fc) } else { (d, fd) })
}

/// `D(S‖G) = ½ln(2πe·γΣa) − h(S)`.
pub fn relative_entropy_to_gaussian(model: &GammaSumModel, cfg: &QuadratureConfig) -> Result<Estimate> {
    let h = shannon_entropy(model, cfg)?;
    Ok(Estimate {
        value: gaussian_entropy(model.variance()) - h.value,
        err_est: h.err_est,
    })
}

pub fn gaussian_entropy(variance: f64) -> f64 {
    0.5 * (2.0 * PI * E * variance).ln()
}

/// Shannon entropy of `scale·Y`, `Y ~ Gamma(shape)`.
pub fn gamma_entropy(shape: f64, scale: f64) -> f64 {
    shape + ln_gamma_unchecked(shape) + (1.0 - shape) * digamma(shape).unwrap_or(f64::NAN) + scale.ln()
}

/// Rényi entropy of order α of `scale·Y`, `Y ~ Gamma(shape)`, from
/// `∫g^α = Γ(α(ρ−1)+1) / (Γ(ρ)^α·α^{α(ρ−1)+1})`.
pub fn gamma_renyi_entropy(shape: f64, scale: f64, alpha: f64) -> f64 {
    if alpha == 1.0 {
        return gamma_entropy(shape, scale);
    }
    if alpha.is_infinite() {
        return -gamma_max_density(shape, scale).ln();
    }
    let b = alpha * (shape - 1.0) + 1.0;
    if b <= 0.0 {
        return if alpha > 1.0 { f64::NEG_INFINITY } else { f64::INFINITY };
    }
    let ln_int = ln_gamma_unchecked(b) - alpha * ln_gamma_unchecked(shape) - b * alpha.ln();
    ln_int / (1.0 - alpha) + scale.ln()
}

/// Mode value of the `scale·Gamma(shape)` density (`+inf` when shape < 1).
pub fn gamma_max_density(shape: f64, scale: f64) -> f64 {
    if shape < 1.0 {
        return f64::INFINITY;
    }
    let m = shape - 1.0;
    let ln = if m == 0.0 { 0.0 } else { m * m.ln() - m } - ln_gamma_unchecked(shape);
    ln.exp() / scale
}

/// Equal-weights oracles with `a_j = 1/n`: S = Gamma(nγ)/√n.
pub fn equal_weights_entropy(shape: f64, n: usize) -> f64 {
    gamma_entropy(shape * n as f64, 1.0 / (n as f64).sqrt())
}

pub fn equal_weights_renyi(shape: f64, n: usize, alpha: f64) -> f64 {
    gamma_renyi_entropy(shape * n as f64, 1.0 / (n as f64).sqrt(), alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn model(shape: f64, a: &[f64]) -> GammaSumModel {
        GammaSumModel::from_slice(shape, a).unwrap()
    }

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn shannon_examples() {
        let h = shannon_entropy(&model(1.0, &[1.0]), &cfg()).unwrap();
        assert!((h.value - 1.0).abs() < 1e-8, "{h:?}");
        let h = shannon_entropy(&model(1.0, &[0.5, 0.5]), &cfg()).unwrap();
        assert!((h.value - 1.230_642_1).abs() < 1e-7, "{h:?}");
        assert_relative_eq!(equal_weights_entropy(1.0, 2), 1.230_642_1, epsilon = 1e-7);
        let a = model(0.7, &[0.6, 0.3, 0.1]);
        let b = model(0.7, &[2.4, 1.2, 0.4]);
        let ha = shannon_entropy(&a, &cfg()).unwrap().value;
        let hb = shannon_entropy(&b, &cfg()).unwrap().value;
        assert!((hb - ha - 0.5 * 4f64.ln()).abs() < 1e-7);
    }

    #[test]
    fn shannon_small_total_shape() {
        let m = model(0.2, &[0.5, 0.5]);
        let h = shannon_entropy(&m, &cfg()).unwrap();
        assert!((h.value - equal_weights_entropy(0.2, 2)).abs() < 1e-7, "{h:?}");
        let m = model(0.3, &[0.7, 0.3]);
        let h = shannon_entropy(&m, &cfg()).unwrap();
        assert!(h.value.is_finite() && h.err_est < 1e-6, "{h:?}");
    }

    #[test]
    fn renyi_examples() {
        let h = renyi_entropy(&model(1.0, &[1.0]), 2.0, &cfg()).unwrap();
        assert!((h.value - 2f64.ln()).abs() < 1e-8, "{h:?}");
        let oracle = equal_weights_renyi(1.0, 2, 2.0);
        assert_relative_eq!(oracle, 4f64.ln() - 0.5 * 2f64.ln(), max_relative = 1e-14);
        assert_relative_eq!(oracle, 1.039_720_770_8, epsilon = 1e-9);
        let h = renyi_entropy(&model(1.0, &[0.5, 0.5]), 2.0, &cfg()).unwrap();
        assert!((h.value - oracle).abs() < 1e-8);
        for (g, n, alpha) in [(0.3, 2, 0.5), (0.8, 3, 4.0), (2.0, 2, 64.0), (0.4, 2, 1.5)] {
            let m = GammaSumModel::uniform(g, n).unwrap();
            let h = renyi_entropy(&m, alpha, &cfg()).unwrap();
            let o = equal_weights_renyi(g, n, alpha);
            assert!((h.value - o).abs() < 1e-7, "γ={g} n={n} α={alpha}: {} vs {o}", h.value);
        }
    }

    #[test]
    fn renyi_orders_and_divergence() {
        let m = model(0.3, &[0.6, 0.4]);
        // α(nγ−1)+1 = 3·(−0.4)+1 < 0
        match renyi_entropy(&m, 3.0, &cfg()) {
            Err(Error::Divergent { value, .. }) => assert_eq!(value, f64::NEG_INFINITY),
            other => panic!("{other:?}"),
        }
        assert_eq!(renyi_entropy(&m, 0.0, &cfg()).unwrap().value, f64::INFINITY);
        assert_eq!(renyi_entropy(&m, f64::INFINITY, &cfg()).unwrap().value, f64::NEG_INFINITY);
        assert!(renyi_entropy(&m, 65.0, &cfg()).is_err());
        assert!(renyi_entropy(&m, -1.0, &cfg()).is_err());
    }

    #[test]
    fn renyi_near_one_is_continuous() {
        let m = model(1.5, &[0.5, 0.3, 0.2]);
        let h = shannon_entropy(&m, &cfg()).unwrap().value;
        for alpha in [0.999, 1.001] {
            let r = renyi_entropy(&m, alpha, &cfg()).unwrap().value;
            assert!((r - h).abs() <= 5e-3);
        }
    }

    #[test]
    fn max_density_examples() {
        let m = max_density(&model(1.0, &[1.0]), &cfg()).unwrap();
        assert_eq!((m.value, m.argmax), (1.0, 0.0));
        let m = max_density(&model(1.0, &[0.5, 0.5]), &cfg()).unwrap();
        assert!((m.value - 2f64.sqrt() / E).abs() < 1e-12, "{m:?}");
        assert!((m.argmax - 0.5f64.sqrt()).abs() < 1e-6);
        assert!(max_density(&model(0.5, &[1.0]), &cfg()).unwrap().is_infinite());
        let m = max_density(&model(0.5, &[0.5, 0.5]), &cfg()).unwrap();
        assert_relative_eq!(m.value, 2f64.sqrt(), max_relative = 1e-14);
        let m = max_density(&model(2.5, &[0.6, 0.4]), &cfg()).unwrap();
        assert!(m.value >= 1.0 / (12.0 * 2.5f64).sqrt() && m.value <= 1.0 / 2.5f64.sqrt());
    }

    #[test]
    fn relative_entropy_examples() {
        let d = relative_entropy_to_gaussian(&model(1.0, &[1.0]), &cfg()).unwrap();
        assert!((d.value - 0.418_938_533_2).abs() < 1e-8);
        let uniform = relative_entropy_to_gaussian(&model(1.0, &[0.5, 0.5]), &cfg()).unwrap();
        assert!(uniform.value < d.value && uniform.value > 0.0);
    }

    #[test]
    fn gamma_oracles() {
        assert_relative_eq!(gamma_entropy(1.0, 1.0), 1.0, max_relative = 1e-15);
        assert_relative_eq!(gamma_renyi_entropy(1.0, 1.0, 2.0), 2f64.ln(), max_relative = 1e-14);
        assert_relative_eq!(gamma_max_density(2.0, 1.0), 1.0 / E, max_relative = 1e-14);
        assert_relative_eq!(gamma_renyi_entropy(2.0, 1.0, f64::INFINITY), 1.0, max_relative = 1e-14);
    }
}
