//! Numerical certificates: seeded families of cases, each an inequality
//! `lhs ≤ rhs` checked up to a tolerance, assembled into replayable reports.

mod cases;
mod mixture;
mod suites;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use cases::{
    bnu_constants, evaluate, f_functional, g_functional, gk_lower_constant, gk_shape_factor, gk_upper_constant,
    phi0_value, phi_value, CaseInput, Check, MaxDensityMode, Outcome, BNU_LOWER, BNU_UPPER,
};
pub use mixture::{Atom, ExponentialMixture};

use crate::entropy::max_density;
use crate::error::{Error, Result};
use crate::format::real;
use crate::model::GammaSumModel;
use crate::numerics::QuadratureConfig;
use crate::seed::{derive_seed, derived_rng};

/// Tolerance for closed-form suites (relative to `max(1, |lhs|, |rhs|)`).
pub const EXACT_TOLERANCE: f64 = 1e-9;
/// Tolerance for the exact moment comparisons (same scaling).
pub const MOMENT_TOLERANCE: f64 = 1e-10;
/// Added to the combined error estimate in quadrature-based suites.
pub const QUADRATURE_SLACK: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub index: usize,
    /// Label of the tightest check of the case.
    pub check: String,
    pub inputs: CaseInput,
    #[serde(with = "real")]
    pub lhs: f64,
    #[serde(with = "real")]
    pub rhs: f64,
    /// `rhs − lhs`; the case passes when `margin ≥ −tolerance`.
    #[serde(with = "real")]
    pub margin: f64,
    #[serde(with = "real")]
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Observation(#[serde(with = "real")] pub f64);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub suite: String,
    pub seed: u64,
    pub trials: usize,
    #[serde(with = "real")]
    pub tolerance: f64,
    pub verdict: Verdict,
    #[serde(with = "real")]
    pub min_margin: f64,
    pub cases: Vec<CaseRecord>,
    /// Empirical quantities without verdict semantics (suprema over cases).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub observations: BTreeMap<String, Observation>,
}

impl CertificateReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn failures(&self) -> impl Iterator<Item = &CaseRecord> {
        self.cases.iter().filter(|c| !c.pass)
    }
}

fn record(index: usize, inputs: CaseInput, outcome: Result<Outcome>, tolerance: f64) -> (CaseRecord, Option<(String, f64)>) {
    match outcome {
        Ok(out) => {
            let pass = out.checks.iter().all(|c| c.slack() >= 0.0);
            let worst = out
                .checks
                .iter()
                .min_by(|a, b| a.slack().total_cmp(&b.slack()))
                .cloned()
                .unwrap_or_else(|| Check {
                    label: "none".into(),
                    lhs: 0.0,
                    rhs: 0.0,
                    tolerance,
                });
            let rec = CaseRecord {
                index,
                check: worst.label.clone(),
                inputs,
                lhs: worst.lhs,
                rhs: worst.rhs,
                margin: worst.margin(),
                tolerance: worst.tolerance,
                pass: pass && !worst.slack().is_nan(),
                note: out.note,
            };
            (rec, out.observation)
        }
        Err(e) => (
            CaseRecord {
                index,
                check: "error".into(),
                inputs,
                lhs: f64::NAN,
                rhs: f64::NAN,
                margin: f64::NEG_INFINITY,
                tolerance,
                pass: false,
                note: Some(e.to_string()),
            },
            None,
        ),
    }
}

/// Evaluates `inputs` (concurrently, reduced in index order) into a report.
pub fn run_cases(
    suite: &str,
    inputs: Vec<CaseInput>,
    trials: usize,
    seed: u64,
    tolerance: f64,
    cfg: &QuadratureConfig,
) -> CertificateReport {
    let results: Vec<(CaseRecord, Option<(String, f64)>)> = inputs
        .into_par_iter()
        .enumerate()
        .map(|(i, input)| {
            let outcome = evaluate(&input, cfg);
            record(i, input, outcome, tolerance)
        })
        .collect();
    let mut observations: BTreeMap<String, Observation> = BTreeMap::new();
    let mut cases = Vec::with_capacity(results.len());
    for (rec, obs) in results {
        if let Some((key, v)) = obs {
            let e = observations.entry(key).or_insert(Observation(f64::NEG_INFINITY));
            e.0 = e.0.max(v);
        }
        cases.push(rec);
    }
    let min_margin = cases.iter().map(|c| c.margin).fold(f64::INFINITY, f64::min);
    let verdict = if cases.iter().all(|c| c.pass) { Verdict::Pass } else { Verdict::Fail };
    CertificateReport {
        suite: suite.to_string(),
        seed,
        trials,
        tolerance,
        verdict,
        min_margin,
        cases,
        observations,
    }
}

/// Re-evaluates a single serialized case.
pub fn replay(input: &CaseInput, cfg: &QuadratureConfig) -> CertificateReport {
    let tolerance = match input {
        CaseInput::Phi { .. } | CaseInput::Phi0 { .. } | CaseInput::Fg { .. } => EXACT_TOLERANCE,
        CaseInput::Moments { .. } => MOMENT_TOLERANCE,
        _ => QUADRATURE_SLACK,
    };
    run_cases("replay", vec![input.clone()], 1, 0, tolerance, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Suite {
    #[serde(rename = "phi")]
    Phi,
    #[serde(rename = "phi0")]
    Phi0,
    #[serde(rename = "fg")]
    Fg,
    #[serde(rename = "entropy")]
    Entropy,
    #[serde(rename = "renyi")]
    Renyi,
    #[serde(rename = "moments")]
    Moments,
    #[serde(rename = "maxdensity-g1")]
    MaxDensityG1,
    #[serde(rename = "maxdensity-g12")]
    MaxDensityG12,
    #[serde(rename = "bnu")]
    Bnu,
    #[serde(rename = "gk")]
    Gk,
    #[serde(rename = "cf-envelope")]
    CfEnvelope,
    #[serde(rename = "density-bounds")]
    DensityBounds,
}

impl Suite {
    pub const ALL: [Suite; 12] = [
        Suite::Phi,
        Suite::Phi0,
        Suite::Fg,
        Suite::Entropy,
        Suite::Renyi,
        Suite::Moments,
        Suite::MaxDensityG1,
        Suite::MaxDensityG12,
        Suite::Bnu,
        Suite::Gk,
        Suite::CfEnvelope,
        Suite::DensityBounds,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Phi => "phi",
            Suite::Phi0 => "phi0",
            Suite::Fg => "fg",
            Suite::Entropy => "entropy",
            Suite::Renyi => "renyi",
            Suite::Moments => "moments",
            Suite::MaxDensityG1 => "maxdensity-g1",
            Suite::MaxDensityG12 => "maxdensity-g12",
            Suite::Bnu => "bnu",
            Suite::Gk => "gk",
            Suite::CfEnvelope => "cf-envelope",
            Suite::DensityBounds => "density-bounds",
        }
    }

    pub fn tolerance(&self) -> f64 {
        match self {
            Suite::Phi | Suite::Phi0 | Suite::Fg => EXACT_TOLERANCE,
            Suite::Moments => MOMENT_TOLERANCE,
            _ => QUADRATURE_SLACK,
        }
    }

    /// Case inputs of the suite for `trials` draws per parameter block.
    pub fn cases(&self, trials: usize, seed: u64) -> Result<Vec<CaseInput>> {
        let seed = suite_seed(seed, self.name());
        let mut out: Vec<CaseInput> = Vec::new();
        let shapes = [0.5, 1.0, 2.0];
        match self {
            Suite::Phi => {
                out.push(CaseInput::Phi {
                    shape: 1.0,
                    c: 3.0,
                    upper: vec![2.0, 0.0],
                    lower: vec![1.0, 1.0],
                    mixture: ExponentialMixture::single(1.0)?,
                });
                for (gi, &g) in shapes.iter().enumerate() {
                    for mix in test_mixtures(seed, gi)? {
                        let start = out.len();
                        out.extend(suites::phi_cases(g, None, &mix, trials, seed, start));
                    }
                }
            }
            Suite::Phi0 => {
                for (gi, &g) in shapes.iter().enumerate() {
                    for mix in test_mixtures(seed, gi)? {
                        let start = out.len();
                        out.extend(suites::phi0_cases(g, None, &mix, trials, seed, start));
                    }
                }
            }
            Suite::Fg => {
                for &g in &shapes {
                    let start = out.len();
                    out.extend(suites::fg_cases(g, trials, seed, start));
                }
            }
            Suite::Entropy => {
                for (g, n) in [(1.0, 2), (0.5, 3), (1.5, 3)] {
                    let start = out.len();
                    out.extend(suites::entropy_cases(g, n, trials, seed, start));
                }
            }
            Suite::Renyi => {
                for (g, n, alpha) in [(0.4, 2, 2.0), (0.45, 2, 1.5)] {
                    let start = out.len();
                    out.extend(suites::renyi_cases(g, n, alpha, trials, seed, start));
                }
            }
            Suite::Moments => {
                out.push(CaseInput::Moments {
                    shape: 1.0,
                    upper: vec![1.0, 0.0],
                    lower: vec![0.5, 0.5],
                    max_order: 12,
                });
                out.extend(suites::moment_cases(None, None, 12, trials, seed, 1));
            }
            Suite::MaxDensityG1 => {
                for g in [1.0, 2.0, 5.0] {
                    let start = out.len();
                    out.extend(suites::max_density_cases(MaxDensityMode::G1, g, trials, seed, start));
                }
            }
            Suite::MaxDensityG12 => {
                for g in [0.3, 0.6, 0.75] {
                    let start = out.len();
                    out.extend(suites::max_density_cases(MaxDensityMode::G12, g, trials, seed, start));
                }
            }
            Suite::Bnu => out.extend(suites::max_density_cases(MaxDensityMode::Bnu, 0.5, trials, seed, 0)),
            Suite::Gk => {
                for (k, g) in [(1, 0.75), (2, 0.4), (3, 0.3)] {
                    let start = out.len();
                    out.extend(suites::max_density_cases(MaxDensityMode::Gk { k }, g, trials, seed, start));
                }
            }
            Suite::CfEnvelope => {
                for &g in &shapes {
                    let start = out.len();
                    out.extend(suites::cf_envelope_cases(g, trials, seed, start));
                }
            }
            Suite::DensityBounds => out.extend(suites::density_bounds_cases(trials, seed, 0)),
        }
        Ok(out)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
                Error::Precondition(format!("unknown suite '{s}' (expected one of {} or all)", names.join(", ")))
            })
    }
}

/// FNV-1a of the suite name mixed into the base seed, so suites draw
/// independent streams from one `--seed`.
fn suite_seed(seed: u64, name: &str) -> u64 {
    let h = name
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3));
    derive_seed(seed, h)
}

/// Five completely monotone test functions: `e^{−x}`, three random atom
/// mixtures, and one power law `x^{−q}` with `q ∈ {½, 1, 2}`.
fn test_mixtures(seed: u64, block: usize) -> Result<Vec<ExponentialMixture>> {
    let mut out = vec![ExponentialMixture::single(1.0)?];
    for k in 0..3 {
        let mut rng = derived_rng(seed ^ 0x6d69_7874_7572_6573, (block * 8 + k) as u64);
        out.push(ExponentialMixture::random(&mut rng, &[]));
    }
    out.push(ExponentialMixture::power_law([0.5, 1.0, 2.0][block % 3])?);
    Ok(out)
}

pub fn run_suite(suite: Suite, trials: usize, seed: u64, cfg: &QuadratureConfig) -> Result<CertificateReport> {
    cfg.validate()?;
    let inputs = suite.cases(trials, seed)?;
    Ok(run_cases(suite.name(), inputs, trials, seed, suite.tolerance(), cfg))
}

/// Schur-concavity of `E Φ(c + S̃)` on `Σa < c²/(γ²n)` for one mixture.
pub fn certify_phi(
    shape: f64,
    n: usize,
    c: f64,
    mixture: &ExponentialMixture,
    trials: usize,
    seed: u64,
    cfg: &QuadratureConfig,
) -> Result<CertificateReport> {
    mixture.validate()?;
    if !(c > 0.0) || !(shape > 0.0) || n < 2 {
        return Err(Error::Precondition("certify_phi needs c > 0, γ > 0, n ≥ 2".into()));
    }
    let bound = c * c / (shape * shape * n as f64);
    let mut inputs = suites::phi_cases(shape, Some(n), mixture, trials, seed, 0);
    // rescale every pair into the admissible domain
    for input in &mut inputs {
        if let CaseInput::Phi { c: ci, upper, lower, .. } = input {
            let total: f64 = upper.iter().sum();
            let mut rng = derived_rng(seed ^ 0x7068_6964_6f6d, total.to_bits());
            let target = bound * rng.random_range(0.05..0.95);
            upper.iter_mut().chain(lower.iter_mut()).for_each(|x| *x *= target / total);
            *ci = c;
        }
    }
    Ok(run_cases("phi", inputs, trials, seed, EXACT_TOLERANCE, cfg))
}

/// Schur-convexity of `E Φ(S)` on the positive orthant.
pub fn certify_phi0(
    shape: f64,
    n: usize,
    mixture: &ExponentialMixture,
    trials: usize,
    seed: u64,
    cfg: &QuadratureConfig,
) -> Result<CertificateReport> {
    mixture.validate()?;
    if n < 2 {
        return Err(Error::Precondition("certify_phi0 needs n ≥ 2".into()));
    }
    let inputs = suites::phi0_cases(shape, Some(n), mixture, trials, seed, 0);
    Ok(run_cases("phi0", inputs, trials, seed, EXACT_TOLERANCE, cfg))
}

pub fn certify_f_g(shape: f64, trials: usize, seed: u64) -> Result<CertificateReport> {
    let inputs = suites::fg_cases(shape, trials, seed, 0);
    Ok(run_cases("fg", inputs, trials, seed, EXACT_TOLERANCE, &QuadratureConfig::default()))
}

pub fn certify_entropy(shape: f64, n: usize, trials: usize, seed: u64, cfg: &QuadratureConfig) -> Result<CertificateReport> {
    if shape * (n as f64) < 1.0 {
        return Err(Error::Precondition(format!("entropy comparison needs γn ≥ 1, got {}", shape * n as f64)));
    }
    let inputs = suites::entropy_cases(shape, n, trials, seed, 0);
    Ok(run_cases("entropy", inputs, trials, seed, QUADRATURE_SLACK, cfg))
}

pub fn certify_renyi(
    shape: f64,
    n: usize,
    alpha: f64,
    trials: usize,
    seed: u64,
    cfg: &QuadratureConfig,
) -> Result<CertificateReport> {
    let d = shape * n as f64;
    if !(alpha > 1.0) || d >= 1.0 || alpha * (d - 1.0) + 1.0 <= 0.0 {
        return Err(Error::Precondition(format!(
            "Rényi comparison needs α > 1, nγ < 1 and α(nγ−1)+1 > 0 (α = {alpha}, nγ = {d})"
        )));
    }
    let inputs = suites::renyi_cases(shape, n, alpha, trials, seed, 0);
    Ok(run_cases("renyi", inputs, trials, seed, QUADRATURE_SLACK, cfg))
}

pub fn certify_moments(shape: f64, n: usize, max_order: usize, trials: usize, seed: u64) -> Result<CertificateReport> {
    if !(2..=20).contains(&max_order) {
        return Err(Error::Precondition(format!("max_order must lie in [2, 20], got {max_order}")));
    }
    if n < 2 {
        return Err(Error::Precondition("certify_moments needs n ≥ 2".into()));
    }
    let inputs = suites::moment_cases(Some(shape), Some(n), max_order, trials, seed, 0);
    Ok(run_cases("moments", inputs, trials, seed, MOMENT_TOLERANCE, &QuadratureConfig::default()))
}

pub fn certify_maxdensity(
    shape: f64,
    mode: MaxDensityMode,
    trials: usize,
    seed: u64,
    cfg: &QuadratureConfig,
) -> Result<CertificateReport> {
    let ok = match mode {
        MaxDensityMode::G1 => shape >= 1.0,
        MaxDensityMode::G12 => shape > 0.0 && shape < 1.0,
        MaxDensityMode::Bnu => shape == 0.5,
        MaxDensityMode::Gk { k } => k >= 1 && shape >= 1.0 / (k as f64 + 1.0) && shape < 1.0 / k as f64,
    };
    if !ok {
        return Err(Error::Precondition(format!("γ = {shape} is outside the regime of {mode:?}")));
    }
    let inputs = suites::max_density_cases(mode, shape, trials, seed, 0);
    Ok(run_cases("maxdensity", inputs, trials, seed, QUADRATURE_SLACK, cfg))
}

pub fn certify_cf_envelope(shape: f64, trials: usize, seed: u64, cfg: &QuadratureConfig) -> Result<CertificateReport> {
    let inputs = suites::cf_envelope_cases(shape, trials, seed, 0);
    Ok(run_cases("cf-envelope", inputs, trials, seed, QUADRATURE_SLACK, cfg))
}

pub fn certify_density_bounds(trials: usize, seed: u64, cfg: &QuadratureConfig) -> Result<CertificateReport> {
    let inputs = suites::density_bounds_cases(trials, seed, 0);
    Ok(run_cases("density-bounds", inputs, trials, seed, QUADRATURE_SLACK, cfg))
}

/// Best-effort search (no verdict) over random simplex points for the ratio
/// `M / [(a_1…a_k)^{−γ/2}(1−a_1−…−a_k)^{(kγ−1)/2}]`, `k = ⌈1/γ⌉ − 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExploreReport {
    pub shape: f64,
    pub n: usize,
    pub k: usize,
    pub trials: usize,
    pub seed: u64,
    #[serde(with = "real")]
    pub ratio_max: f64,
    pub argmax_weights: Vec<f64>,
    #[serde(with = "real")]
    pub ratio_min: f64,
    pub argmin_weights: Vec<f64>,
    pub failures: usize,
}

pub fn explore(shape: f64, n: usize, trials: usize, seed: u64, cfg: &QuadratureConfig) -> Result<ExploreReport> {
    if !(shape > 0.0 && shape < 1.0) {
        return Err(Error::Precondition(format!("explore needs 0 < γ < 1, got {shape}")));
    }
    let k = ((1.0 / shape) - 1e-12).ceil() as usize - 1;
    if k == 0 || n <= k {
        return Err(Error::Precondition(format!("explore needs n > k = {k} (γ·n ≥ 1)")));
    }
    let draws: Vec<Result<(Vec<f64>, f64)>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = derived_rng(seed, i as u64);
            let mut a = if i % 2 == 0 {
                crate::model::dirichlet_simplex(&mut rng, n, 1.0)
            } else {
                crate::model::spiked_simplex(&mut rng, n, [0.5, 0.9, 0.99][i % 3], 1.0)
            };
            a.sort_by(|x, y| y.total_cmp(x));
            let m = max_density(&GammaSumModel::from_slice(shape, &a)?, cfg)?;
            Ok((a.clone(), m.value / gk_shape_factor(shape, k, &a)))
        })
        .collect();
    let mut report = ExploreReport {
        shape,
        n,
        k,
        trials,
        seed,
        ratio_max: f64::NEG_INFINITY,
        argmax_weights: Vec::new(),
        ratio_min: f64::INFINITY,
        argmin_weights: Vec::new(),
        failures: 0,
    };
    for d in draws {
        match d {
            Ok((a, r)) => {
                if r > report.ratio_max {
                    report.ratio_max = r;
                    report.argmax_weights = a.clone();
                }
                if r < report.ratio_min {
                    report.ratio_min = r;
                    report.argmin_weights = a;
                }
            }
            Err(_) => report.failures += 1,
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn pinned_phi_case() {
        let m = ExponentialMixture::single(1.0).unwrap();
        let tight = QuadratureConfig::default();
        let (hi, _) = phi_value(1.0, 3.0, &[1.0, 1.0], &m, &tight).unwrap();
        let (lo, _) = phi_value(1.0, 3.0, &[2.0, 0.0], &m, &tight).unwrap();
        assert!((hi - (-1.0f64).exp() / 4.0).abs() < 1e-15);
        assert!((hi - 0.091_969_9).abs() < 1e-7);
        assert!((lo - (-3.0f64).exp() * 2f64.sqrt().exp() / (1.0 + 2f64.sqrt())).abs() < 1e-15);
        assert!((lo - 0.084_825_4).abs() < 1e-7);
        let report = run_suite(Suite::Phi, 3, 1, &cfg()).unwrap();
        assert_eq!(report.cases[0].check, "phi");
        assert!((report.cases[0].margin - (hi - lo)).abs() < 1e-15);
        assert!(report.passed());
    }

    #[test]
    fn reflexive_pair_has_zero_margin() {
        let m = ExponentialMixture::new(vec![Atom { weight: 0.3, rate: 2.0 }], Some(1.0)).unwrap();
        let r = certify_phi(1.0, 3, 4.0, &m, 5, 2, &cfg()).unwrap();
        assert_eq!(r.cases[0].margin, 0.0);
        assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
    }

    #[test]
    fn fg_functionals() {
        assert!((f_functional(1.0, &[2.0, 0.0]) - 1.703_764_1).abs() < 1e-7);
        assert!((f_functional(1.0, &[1.0, 1.0]) - 1.847_264_024_7).abs() < 1e-9);
        assert!((g_functional(1.0, &[2.0, 0.0]) - 0.414_213_56).abs() < 1e-8);
        assert_eq!(g_functional(1.0, &[1.0, 1.0]), 0.25);
        let r = certify_f_g(2.0, 30, 4).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn constants() {
        let (lo, hi) = bnu_constants();
        assert!((lo - BNU_LOWER).abs() < 1e-17 && (hi - BNU_UPPER).abs() < 1e-15);
        assert!((gk_upper_constant(0.75, 1) - 1.268_922_332_3).abs() < 1e-9);
        // c_γ ≤ C_γ whenever both apply
        for (k, g) in [(1, 0.5), (1, 0.75), (2, 0.4), (3, 0.3)] {
            assert!(gk_lower_constant(g, k) <= gk_upper_constant(g, k));
        }
    }

    #[test]
    fn moments_pinned_and_random() {
        let r = run_suite(Suite::Moments, 20, 7, &cfg()).unwrap();
        assert!(r.passed());
        let worst_mu3 = evaluate(&r.cases[0].inputs, &cfg()).unwrap();
        let mu3 = worst_mu3.checks.iter().find(|c| c.label == "mu3-schur").unwrap();
        assert!((mu3.rhs - 2.0).abs() < 1e-14 && (mu3.lhs - 2f64.sqrt()).abs() < 1e-14);
        let mu2 = worst_mu3.checks.iter().find(|c| c.label == "mu2-schur").unwrap();
        assert!(mu2.margin().abs() < 1e-15);
    }

    #[test]
    fn preconditions() {
        assert!(certify_entropy(0.3, 2, 5, 0, &cfg()).is_err());
        assert!(certify_renyi(0.3, 2, 4.0, 5, 0, &cfg()).is_err());
        assert!(certify_maxdensity(0.5, MaxDensityMode::G1, 5, 0, &cfg()).is_err());
        assert!("nope".parse::<Suite>().is_err());
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
    }

    #[test]
    fn failing_case_is_recorded_and_replayable() {
        // a pair that is not ordered by majorization cannot be certified
        let bad = CaseInput::Moments {
            shape: 1.0,
            upper: vec![0.5, 0.5],
            lower: vec![1.0, 0.0],
            max_order: 4,
        };
        let r = replay(&bad, &cfg());
        assert!(!r.passed());
        assert_eq!(r.cases[0].check, "error");
        let json = crate::format::to_json_pretty(&r.cases[0]).unwrap();
        let back: CaseRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back.inputs, bad);
    }

    #[test]
    fn reports_are_deterministic() {
        let a = run_suite(Suite::Bnu, 6, 1, &cfg()).unwrap();
        let b = run_suite(Suite::Bnu, 6, 1, &cfg()).unwrap();
        assert_eq!(crate::format::to_json_pretty(&a).unwrap(), crate::format::to_json_pretty(&b).unwrap());
        assert!(a.passed() && a.min_margin > 0.0);
    }
}
