//! Densities of S: closed form for equal weights, Fourier inversion, an exact
//! gamma-mixture engine (the "convolution" engine), a seeded sampler, and the
//! pointwise sandwich bounds.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::{self, real_vec};
use crate::model::GammaSumModel;
use crate::numerics::special::ln_gamma_unchecked;
use crate::numerics::{integrate_oscillatory, log_gamma, Estimate, OscillatoryTail, QuadratureConfig};
use crate::seed::derived_rng;
use crate::transforms;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Closed,
    CfInversion,
    Convolution,
    MonteCarlo,
}

impl Engine {
    pub fn as_str(&self) -> &'static str {
        match self {
            Engine::Closed => "closed",
            Engine::CfInversion => "cf_inversion",
            Engine::Convolution => "convolution",
            Engine::MonteCarlo => "monte_carlo",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed" => Ok(Engine::Closed),
            "cf_inversion" | "cf-inversion" | "cf" => Ok(Engine::CfInversion),
            "convolution" | "conv" => Ok(Engine::Convolution),
            "monte_carlo" | "monte-carlo" | "mc" => Ok(Engine::MonteCarlo),
            other => Err(Error::Precondition(format!("unknown engine '{other}'"))),
        }
    }
}

/// Density of `scale·Y` with `Y ~ Gamma(shape)`.
pub fn gamma_pdf(shape: f64, scale: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let z = x / scale;
    ((shape - 1.0) * z.ln() - z - ln_gamma_unchecked(shape)).exp() / scale
}

/// Equal-weights density with `a_j = 1/n`: S ~ Gamma(γn) scaled by `1/√n`, i.e.
/// `n^{γn/2}/Γ(γn)·x^{γn−1}·e^{−x√n}`.
pub fn density_closed_equal(shape: f64, n: usize, x: f64) -> f64 {
    if n == 0 || !(shape > 0.0) {
        return 0.0;
    }
    gamma_pdf(shape * n as f64, 1.0 / (n as f64).sqrt(), x)
}

fn closed_form_params(model: &GammaSumModel) -> Option<(f64, f64)> {
    if model.n_effective() == 1 || model.has_equal_weights() {
        let a = model.active_weights();
        Some((model.shape() * a.len() as f64, a[0].sqrt()))
    } else {
        None
    }
}

fn envelope_scale(model: &GammaSumModel) -> f64 {
    let sum_ln: f64 = model.active_weights().iter().map(|a| a.ln()).sum();
    (-0.5 * model.shape() * sum_ln).exp()
}

/// `p(x)` by Fourier inversion of the characteristic function.
pub fn density_cf_inversion(model: &GammaSumModel, x: f64, cfg: &QuadratureConfig) -> Result<Estimate> {
    let decay = model.total_shape();
    if decay <= 1.0 {
        return Err(Error::Integrability(format!(
            "cf decays like |t|^-{decay}; inversion needs γ·n_effective > 1"
        )));
    }
    if x <= 0.0 {
        return Ok(Estimate::exact(0.0));
    }
    let a_min = *model.active_weights().last().expect("model has a positive weight");
    let tail = OscillatoryTail {
        frequency: x,
        envelope_scale: envelope_scale(model),
        decay_exponent: decay,
        tail_start: (5.0 / a_min.sqrt()).min(1e6),
    };
    let integrand = |t: f64| transforms::cf(model, t) * Complex64::new(0.0, -t * x).exp();
    let est = integrate_oscillatory(integrand, &tail, cfg)?;
    Ok(Estimate {
        value: est.value.max(0.0),
        err_est: est.err_est,
    })
}

const PMF_CUTOFF: f64 = 1e-18;
const MAX_MIXTURE_TERMS: usize = 1 << 21;
const DIRECT_CONVOLUTION_WORK: usize = 1 << 22;

/// Exact representation of S as a gamma mixture.
///
/// With scales `s_j = √a_j` and `β = min s_j`, each `s_j·X_j` is a negative
/// binomial mixture of Gamma(γ+k, β) laws (k ~ NB(γ, β/s_j)), so
/// `S ~ Σ_k P(K=k)·Gamma(nγ+k, β)` where K is the sum of the NB counts. The
/// pmf of K is built by discrete convolution; truncated tail mass is tracked
/// and propagated into the error estimate.
#[derive(Debug, Clone)]
pub struct MixtureDensity {
    base_shape: f64,
    base_scale: f64,
    offset: usize,
    ln_pmf: Vec<f64>,
    ln_gamma: Vec<f64>,
    lost_mass: f64,
}

fn negative_binomial_pmf(shape: f64, q: f64) -> Result<(Vec<f64>, f64)> {
    if q >= 1.0 - 1e-14 {
        return Ok((vec![1.0], 0.0));
    }
    let rho = 1.0 - q;
    let mut ln_p = shape * q.ln();
    let mut out = Vec::new();
    let mut k = 0usize;
    loop {
        out.push(ln_p.exp());
        let ratio = rho * (shape + k as f64) / (k as f64 + 1.0);
        if ratio < 1.0 {
            let r = if shape >= 1.0 { ratio } else { rho };
            let tail = ln_p.exp() * r / (1.0 - r);
            if tail <= PMF_CUTOFF {
                return Ok((out, tail));
            }
        }
        if out.len() > MAX_MIXTURE_TERMS {
            return Err(Error::Precondition(format!(
                "weight spread too large for the mixture engine (more than {MAX_MIXTURE_TERMS} terms)"
            )));
        }
        ln_p += ratio.ln();
        k += 1;
    }
}

fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let len = a.len() + b.len() - 1;
    if a.len().saturating_mul(b.len()) <= DIRECT_CONVOLUTION_WORK {
        let mut out = vec![0.0; len];
        for (i, &x) in a.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            for (o, &y) in out[i..].iter_mut().zip(b) {
                *o += x * y;
            }
        }
        return out;
    }
    let size = len.next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    let mut fa: Vec<Complex64> = a.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fa.resize(size, Complex64::default());
    let mut fb: Vec<Complex64> = b.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fb.resize(size, Complex64::default());
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    inv.process(&mut fa);
    let norm = 1.0 / size as f64;
    fa[..len].iter().map(|z| (z.re * norm).max(0.0)).collect()
}

impl MixtureDensity {
    pub fn new(model: &GammaSumModel) -> Result<Self> {
        let shape = model.shape();
        let scales = model.scales();
        let base_scale = *scales.last().expect("model has a positive weight");
        let base_shape = model.total_shape();
        let mut pmf = vec![1.0];
        let mut offset = 0usize;
        let mut lost = 0.0;
        for &s in &scales {
            let (nb, tail) = negative_binomial_pmf(shape, base_scale / s)?;
            lost += tail;
            pmf = convolve(&pmf, &nb);
            // trim the upper tail
            let mut acc = 0.0;
            while pmf.len() > 1 {
                let last = *pmf.last().unwrap();
                if acc + last > PMF_CUTOFF {
                    break;
                }
                acc += last;
                pmf.pop();
            }
            lost += acc;
            // trim the lower tail only where the component density stays bounded
            let mut acc = 0.0;
            let mut drop = 0usize;
            while drop + 1 < pmf.len()
                && base_shape + (offset + drop) as f64 >= 1.0
                && acc + pmf[drop] <= PMF_CUTOFF
            {
                acc += pmf[drop];
                drop += 1;
            }
            if drop > 0 {
                pmf.drain(..drop);
                offset += drop;
                lost += acc;
            }
            if pmf.len() > MAX_MIXTURE_TERMS {
                return Err(Error::Precondition(format!(
                    "weight spread too large for the mixture engine (more than {MAX_MIXTURE_TERMS} terms)"
                )));
            }
        }
        let ln_pmf: Vec<f64> = pmf.iter().map(|p| p.ln()).collect();
        let ln_gamma = (0..pmf.len())
            .map(|i| ln_gamma_unchecked(base_shape + (offset + i) as f64))
            .collect();
        Ok(Self {
            base_shape,
            base_scale,
            offset,
            ln_pmf,
            ln_gamma,
            lost_mass: lost,
        })
    }

    pub fn terms(&self) -> usize {
        self.ln_pmf.len()
    }

    pub fn lost_mass(&self) -> f64 {
        self.lost_mass
    }

    pub fn eval(&self, x: f64) -> Estimate {
        if x <= 0.0 {
            return Estimate::exact(0.0);
        }
        let lambda = x / self.base_scale;
        let ln_lambda = lambda.ln();
        let width = 40.0 * (lambda + 1.0).sqrt() + 40.0;
        // r − 1 = base_shape + offset + i − 1 ∈ [λ − width, λ + width]
        let first = self.base_shape + self.offset as f64 - 1.0;
        let lo = ((lambda - width - first).floor().max(0.0)) as usize;
        let hi = (((lambda + width - first).ceil()).max(0.0) as usize + 1).min(self.ln_pmf.len());
        let mut sum = 0.0;
        for i in lo.min(hi)..hi {
            let r = first + 1.0 + i as f64;
            let ln_term = self.ln_pmf[i] + (r - 1.0) * ln_lambda - lambda - self.ln_gamma[i];
            sum += ln_term.exp();
        }
        let value = sum / self.base_scale;
        Estimate {
            value,
            err_est: self.lost_mass / self.base_scale + 1e-13 * value,
        }
    }
}

/// A density evaluator bound to one model and one engine.
#[derive(Debug, Clone)]
pub enum DensityEvaluator {
    Closed { shape: f64, scale: f64 },
    CfInversion { model: GammaSumModel, cfg: QuadratureConfig },
    Convolution(MixtureDensity),
}

impl DensityEvaluator {
    /// Builds an evaluator. With `engine = None` the closed form is used when it
    /// applies, then the mixture engine, and cf inversion only when the mixture
    /// would be too large.
    pub fn new(model: &GammaSumModel, engine: Option<Engine>, cfg: &QuadratureConfig) -> Result<Self> {
        cfg.validate()?;
        match engine {
            Some(Engine::Closed) => {
                let (shape, scale) = closed_form_params(model).ok_or_else(|| {
                    Error::Precondition("closed form needs equal positive weights or a single factor".into())
                })?;
                Ok(Self::Closed { shape, scale })
            }
            Some(Engine::CfInversion) => {
                if model.total_shape() <= 1.0 {
                    return Err(Error::Integrability(format!(
                        "cf decays like |t|^-{}; inversion needs γ·n_effective > 1",
                        model.total_shape()
                    )));
                }
                Ok(Self::CfInversion {
                    model: model.clone(),
                    cfg: *cfg,
                })
            }
            Some(Engine::Convolution) => Ok(Self::Convolution(MixtureDensity::new(model)?)),
            Some(Engine::MonteCarlo) => Err(Error::Precondition(
                "the Monte Carlo engine only produces histogram curves".into(),
            )),
            None => {
                if let Some((shape, scale)) = closed_form_params(model) {
                    return Ok(Self::Closed { shape, scale });
                }
                match MixtureDensity::new(model) {
                    Ok(m) => Ok(Self::Convolution(m)),
                    Err(e) if model.total_shape() > 1.0 => {
                        let _ = e;
                        Ok(Self::CfInversion {
                            model: model.clone(),
                            cfg: *cfg,
                        })
                    }
                    Err(e) => Err(e),
                }
            }
        }
    }

    pub fn engine(&self) -> Engine {
        match self {
            Self::Closed { .. } => Engine::Closed,
            Self::CfInversion { .. } => Engine::CfInversion,
            Self::Convolution(_) => Engine::Convolution,
        }
    }

    pub fn eval(&self, x: f64) -> Result<Estimate> {
        match self {
            Self::Closed { shape, scale } => {
                let v = gamma_pdf(*shape, *scale, x);
                Ok(Estimate {
                    value: v,
                    err_est: 1e-14 * v,
                })
            }
            Self::CfInversion { model, cfg } => density_cf_inversion(model, x, cfg),
            Self::Convolution(m) => Ok(m.eval(x)),
        }
    }
}

/// Density values on a grid together with provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityCurve {
    pub shape: f64,
    pub weights: Vec<f64>,
    pub engine: Engine,
    pub grid: Vec<f64>,
    #[serde(with = "real_vec")]
    pub values: Vec<f64>,
    #[serde(with = "real_vec")]
    pub err_est: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct CsvHeader {
    shape: f64,
    weights: Vec<f64>,
    engine: Engine,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    warnings: Vec<String>,
    #[serde(flatten)]
    extra: serde_json::Map<String, serde_json::Value>,
}

impl DensityCurve {
    pub fn max_point(&self) -> Option<(f64, f64)> {
        self.grid
            .iter()
            .zip(&self.values)
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(x, v)| (*x, *v))
    }

    /// Trapezoid mass over the grid.
    pub fn mass(&self) -> f64 {
        self.grid
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, v)| 0.5 * (x[1] - x[0]) * (v[0] + v[1]))
            .sum()
    }

    pub fn to_csv(&self) -> Result<String> {
        self.to_csv_with(serde_json::Map::new())
    }

    /// CSV with a `# {json}` header line; `extra` is merged into the header.
    pub fn to_csv_with(&self, extra: serde_json::Map<String, serde_json::Value>) -> Result<String> {
        let header = CsvHeader {
            shape: self.shape,
            weights: self.weights.clone(),
            engine: self.engine,
            warnings: self.warnings.clone(),
            extra,
        };
        let mut out = format!("# {}\nx,density,err_est\n", format::to_json_line(&header)?);
        for ((x, v), e) in self.grid.iter().zip(&self.values).zip(&self.err_est) {
            out.push_str(&format!(
                "{},{},{}\n",
                format::fmt_real(*x),
                format::fmt_real(*v),
                format::fmt_real(*e)
            ));
        }
        Ok(out)
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        Self::from_csv_with(text).map(|(curve, _)| curve)
    }

    /// Parses a CSV written by [`DensityCurve::to_csv_with`], returning the
    /// extra header fields alongside the curve.
    pub fn from_csv_with(text: &str) -> Result<(Self, serde_json::Map<String, serde_json::Value>)> {
        let mut lines = text.lines();
        let first = lines.next().unwrap_or_default();
        let json = first
            .strip_prefix('#')
            .ok_or_else(|| Error::Precondition("density CSV must start with a '# {json}' header".into()))?;
        let header: CsvHeader = serde_json::from_str(json.trim())
            .map_err(|e| Error::Precondition(format!("bad CSV header: {e}")))?;
        match lines.next() {
            Some(l) if l.trim() == "x,density,err_est" => {}
            _ => return Err(Error::Precondition("missing 'x,density,err_est' column header".into())),
        }
        let (mut grid, mut values, mut err_est) = (Vec::new(), Vec::new(), Vec::new());
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != 3 {
                return Err(Error::Precondition(format!("expected 3 columns in '{line}'")));
            }
            grid.push(format::parse_real(cells[0])?);
            values.push(format::parse_real(cells[1])?);
            err_est.push(format::parse_real(cells[2])?);
        }
        let curve = Self {
            shape: header.shape,
            weights: header.weights,
            engine: header.engine,
            grid,
            values,
            err_est,
            warnings: header.warnings,
        };
        Ok((curve, header.extra))
    }
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Precondition("grid is empty".into()));
    }
    if grid.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(Error::Precondition("grid points must be positive and finite".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Precondition("grid must be strictly ascending".into()));
    }
    Ok(())
}

fn resolution_warning(model: &GammaSumModel, grid: &[f64]) -> Option<String> {
    let d = model.total_shape();
    let sigma = model.variance().sqrt();
    (d < 1.0 && grid[0] > 1e-3 * sigma).then(|| {
        format!(
            "grid starts at {:.3e} but the density blows up like x^{:.3} at 0; refine the grid toward 0",
            grid[0],
            d - 1.0
        )
    })
}

fn curve_from(model: &GammaSumModel, evaluator: &DensityEvaluator, grid: &[f64]) -> Result<DensityCurve> {
    validate_grid(grid)?;
    let points: Vec<Estimate> = grid.par_iter().map(|&x| evaluator.eval(x)).collect::<Result<_>>()?;
    Ok(DensityCurve {
        shape: model.shape(),
        weights: model.weights().as_slice().to_vec(),
        engine: evaluator.engine(),
        grid: grid.to_vec(),
        values: points.iter().map(|e| e.value).collect(),
        err_est: points.iter().map(|e| e.err_est).collect(),
        warnings: resolution_warning(model, grid).into_iter().collect(),
    })
}

/// Density curve from the convolution (gamma-mixture) engine.
pub fn density_convolution(model: &GammaSumModel, grid: &[f64], cfg: &QuadratureConfig) -> Result<DensityCurve> {
    let evaluator = DensityEvaluator::new(model, Some(Engine::Convolution), cfg)?;
    curve_from(model, &evaluator, grid)
}

/// Draws used by [`density_curve`] for the Monte Carlo engine.
pub const MONTE_CARLO_DRAWS: usize = 1_000_000;

/// Density curve from any engine (`None` = automatic selection).
pub fn density_curve(
    model: &GammaSumModel,
    grid: &[f64],
    engine: Option<Engine>,
    cfg: &QuadratureConfig,
    rng_seed: u64,
) -> Result<DensityCurve> {
    if engine == Some(Engine::MonteCarlo) {
        return density_monte_carlo(model, grid, MONTE_CARLO_DRAWS, rng_seed);
    }
    let evaluator = DensityEvaluator::new(model, engine, cfg)?;
    curve_from(model, &evaluator, grid)
}

/// Histogram estimate at each grid point, using the cell between neighbouring
/// midpoints; `err_est` is one binomial standard deviation.
pub fn density_monte_carlo(model: &GammaSumModel, grid: &[f64], draws: usize, rng_seed: u64) -> Result<DensityCurve> {
    validate_grid(grid)?;
    let mut xs = sample(model, draws.max(1), rng_seed)?;
    xs.sort_unstable_by(f64::total_cmp);
    let n = xs.len() as f64;
    let count_below = |t: f64| xs.partition_point(|&v| v < t) as f64;
    let m = grid.len();
    let mut values = Vec::with_capacity(m);
    let mut err_est = Vec::with_capacity(m);
    for i in 0..m {
        let left_gap = if i > 0 { grid[i] - grid[i - 1] } else if m > 1 { grid[1] - grid[0] } else { grid[0] };
        let right_gap = if i + 1 < m { grid[i + 1] - grid[i] } else { left_gap };
        let lo = (grid[i] - 0.5 * left_gap).max(0.0);
        let hi = grid[i] + 0.5 * right_gap;
        let count = count_below(hi) - count_below(lo);
        let width = hi - lo;
        values.push(count / (n * width));
        err_est.push(count.max(1.0).sqrt() / (n * width));
    }
    Ok(DensityCurve {
        shape: model.shape(),
        weights: model.weights().as_slice().to_vec(),
        engine: Engine::MonteCarlo,
        grid: grid.to_vec(),
        values,
        err_est,
        warnings: resolution_warning(model, grid).into_iter().collect(),
    })
}

const SAMPLE_CHUNK: usize = 1 << 16;

/// `count` i.i.d. draws of S. Draws are produced in fixed-size chunks, each
/// with its own generator derived from `rng_seed`, so the output does not
/// depend on the number of worker threads.
pub fn sample(model: &GammaSumModel, count: usize, rng_seed: u64) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::Precondition("sample count must be at least 1".into()));
    }
    let dist = Gamma::new(model.shape(), 1.0).map_err(|e| Error::Domain(format!("gamma sampler: {e}")))?;
    let scales = model.scales();
    let chunks = count.div_ceil(SAMPLE_CHUNK);
    let out: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let len = SAMPLE_CHUNK.min(count - c * SAMPLE_CHUNK);
            let mut rng = derived_rng(rng_seed, c as u64);
            (0..len).map(|_| draw(&mut rng, &dist, &scales)).collect()
        })
        .collect();
    Ok(out.concat())
}

fn draw<R: Rng + ?Sized>(rng: &mut R, dist: &Gamma<f64>, scales: &[f64]) -> f64 {
    scales.iter().map(|s| s * dist.sample(rng)).sum()
}

/// Empirical quantiles from `draws` samples (grid placement only).
pub fn monte_carlo_quantiles(model: &GammaSumModel, probs: &[f64], draws: usize, rng_seed: u64) -> Result<Vec<f64>> {
    if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::Precondition("quantile levels must lie in [0, 1]".into()));
    }
    let mut xs = sample(model, draws, rng_seed)?;
    xs.sort_unstable_by(f64::total_cmp);
    let last = xs.len() - 1;
    Ok(probs
        .iter()
        .map(|p| xs[((p * last as f64).round() as usize).min(last)])
        .collect())
}

pub const DEFAULT_GRID_POINTS: usize = 4096;

/// Grid on `(0, mean + 12σ]`: graded toward 0 with exponent `max(1, 1/γ)` up
/// to the approximate mode, linear beyond it.
pub fn default_grid(model: &GammaSumModel, count: usize) -> Vec<f64> {
    let count = count.max(4);
    let mean = model.mean();
    let var = model.variance();
    let upper = mean + 12.0 * var.sqrt();
    let k = mean * mean / var;
    let mode = if k > 1.0 { (k - 1.0) * var / mean } else { 0.0 };
    let split = mode.max(0.25 * mean).min(0.5 * upper);
    let grading = (1.0 / model.shape()).max(1.0);
    let head = count / 2;
    let tail = count - head;
    let mut grid: Vec<f64> = (1..=head)
        .map(|i| split * (i as f64 / head as f64).powf(grading))
        .collect();
    grid.extend((1..=tail).map(|i| split + (upper - split) * i as f64 / tail as f64));
    grid.dedup_by(|a, b| *a <= *b);
    grid
}

/// Sandwich `C·x^{nγ−1}·e^{−x/√a_min} ≤ p(x) ≤ C·x^{nγ−1}` with
/// `C = Γ(nγ)^{−1}·Π a_j^{−γ/2}` over the positive weights.
pub fn density_bounds_pointwise(model: &GammaSumModel, x: f64) -> (f64, f64) {
    if x <= 0.0 {
        return (0.0, 0.0);
    }
    let a = model.active_weights();
    let d = model.total_shape();
    let a_min = *a.last().expect("model has a positive weight");
    let ln_c = -ln_gamma_unchecked(d) - 0.5 * model.shape() * a.iter().map(|w| w.ln()).sum::<f64>();
    let ln_upper = ln_c + (d - 1.0) * x.ln();
    (
        (ln_upper - x / a_min.sqrt()).exp(),
        ln_upper.exp(),
    )
}

/// `√m·Γ((mγ−1)/2) / (2√π·Γ(mγ/2))`: a bound on the maximal density for every
/// model whose largest weight is at most `Σa/m`.
pub fn fourier_density_bound(shape: f64, m: usize) -> Result<f64> {
    let mg = m as f64 * shape;
    if !(shape > 0.0) || m == 0 || mg <= 1.0 {
        return Err(Error::Precondition(format!("needs m·γ > 1, got {mg}")));
    }
    let ln = 0.5 * (m as f64).ln() + log_gamma(0.5 * (mg - 1.0))? - (2.0 * PI.sqrt()).ln() - log_gamma(0.5 * mg)?;
    Ok(ln.exp())
}
