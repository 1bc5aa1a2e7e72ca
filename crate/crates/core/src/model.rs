//! Weight vectors, the gamma-sum model and majorization tools.
//!
//! Weights are stored as the squared coefficients `a_j`; the sum under study
//! is `Σ_j √a_j·X_j`. Every majorization statement is about `a`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::rng_from_seed;

/// Sums of two weight vectors are considered equal within this tolerance.
pub const SUM_TOLERANCE: f64 = 1e-12;

/// Nonnegative weights `a_1, …, a_n` with at least one positive entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(a: Vec<f64>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::InvalidWeights("weight vector is empty".into()));
        }
        if let Some(bad) = a.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidWeights(format!(
                "weights must be finite and nonnegative, found {bad}"
            )));
        }
        if !a.iter().any(|&w| w > 0.0) {
            return Err(Error::InvalidWeights("at least one weight must be positive".into()));
        }
        Ok(Self(a))
    }

    /// `n` copies of `total / n`.
    pub fn uniform(n: usize, total: f64) -> Result<Self> {
        Self::new(vec![total / n as f64; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }

    /// Whether the entries are already sorted descending.
    pub fn is_canonical(&self) -> bool {
        self.0.windows(2).all(|w| w[0] >= w[1])
    }

    /// Descending order.
    pub fn canonical(&self) -> Self {
        let mut a = self.0.clone();
        a.sort_by(|x, y| y.total_cmp(x));
        Self(a)
    }

    /// Rescaled to sum one.
    pub fn normalized(&self) -> Self {
        let s = self.sum();
        Self(self.0.iter().map(|w| w / s).collect())
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.0.iter().map(|w| w * factor).collect())
    }

    /// Strictly positive entries in descending order.
    pub fn positive_desc(&self) -> Vec<f64> {
        let mut a: Vec<f64> = self.0.iter().copied().filter(|&w| w > 0.0).collect();
        a.sort_by(|x, y| y.total_cmp(x));
        a
    }

    pub fn count_positive(&self) -> usize {
        self.0.iter().filter(|&&w| w > 0.0).count()
    }

    /// Descending prefix sums.
    pub fn prefix_sums(&self) -> Vec<f64> {
        self.canonical()
            .0
            .iter()
            .scan(0.0, |acc, &w| {
                *acc += w;
                Some(*acc)
            })
            .collect()
    }
}

impl TryFrom<Vec<f64>> for WeightVector {
    type Error = Error;
    fn try_from(a: Vec<f64>) -> Result<Self> {
        Self::new(a)
    }
}

impl From<WeightVector> for Vec<f64> {
    fn from(w: WeightVector) -> Self {
        w.0
    }
}

impl FromStr for WeightVector {
    type Err = Error;

    /// Comma-separated decimals, e.g. `0.5,0.3,0.2`.
    fn from_str(s: &str) -> Result<Self> {
        let parsed: std::result::Result<Vec<f64>, _> = s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::parse::<f64>)
            .collect();
        let a = parsed.map_err(|e| Error::InvalidWeights(format!("cannot parse '{s}': {e}")))?;
        Self::new(a)
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|w| w.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// The law of `Σ_j √a_j·X_j` with `X_j` i.i.d. Gamma(shape), unit rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaSumModel {
    shape: f64,
    weights: WeightVector,
}

impl GammaSumModel {
    pub fn new(shape: f64, weights: WeightVector) -> Result<Self> {
        if !(shape > 0.0) || !shape.is_finite() {
            return Err(Error::Domain(format!("shape must be positive and finite, got {shape}")));
        }
        Ok(Self { shape, weights })
    }

    pub fn from_slice(shape: f64, a: &[f64]) -> Result<Self> {
        Self::new(shape, WeightVector::new(a.to_vec())?)
    }

    /// Equal weights `1/n`.
    pub fn uniform(shape: f64, n: usize) -> Result<Self> {
        Self::new(shape, WeightVector::uniform(n, 1.0)?)
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn weights(&self) -> &WeightVector {
        &self.weights
    }

    /// Number of strictly positive weights.
    pub fn n_effective(&self) -> usize {
        self.weights.count_positive()
    }

    /// Positive weights in descending order.
    pub fn active_weights(&self) -> Vec<f64> {
        self.weights.positive_desc()
    }

    /// Coefficients `√a_j` of the positive weights, descending.
    pub fn scales(&self) -> Vec<f64> {
        self.active_weights().into_iter().map(f64::sqrt).collect()
    }

    /// `γ·n_effective`, the total shape of the sum.
    pub fn total_shape(&self) -> f64 {
        self.shape * self.n_effective() as f64
    }

    pub fn mean(&self) -> f64 {
        self.shape * self.weights.as_slice().iter().map(|a| a.sqrt()).sum::<f64>()
    }

    /// `γ·Σ a_j`.
    pub fn variance(&self) -> f64 {
        self.shape * self.weights.sum()
    }

    /// Whether all positive weights coincide (within relative 1e-14).
    pub fn has_equal_weights(&self) -> bool {
        let a = self.active_weights();
        let (hi, lo) = (a[0], a[a.len() - 1]);
        hi - lo <= 1e-14 * hi
    }
}

/// `(a, b)` with `a ≻ b`; `witness[k]` is the k-th descending prefix-sum
/// difference, nonnegative throughout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MajorizationPair {
    pub upper: WeightVector,
    pub lower: WeightVector,
    pub witness: Vec<f64>,
}

impl MajorizationPair {
    /// Validates `upper ≻ lower` and records the witness.
    pub fn new(upper: WeightVector, lower: WeightVector) -> Result<Self> {
        if !is_majorized(&upper, &lower)? {
            return Err(Error::Precondition(format!("{upper} does not majorize {lower}")));
        }
        let witness = prefix_differences(&upper, &lower);
        Ok(Self { upper, lower, witness })
    }
}

fn prefix_differences(a: &WeightVector, b: &WeightVector) -> Vec<f64> {
    a.prefix_sums()
        .iter()
        .zip(b.prefix_sums())
        .map(|(x, y)| x - y)
        .collect()
}

/// True iff `a ≻ b`: every descending prefix sum of `a` dominates that of `b`
/// and the totals agree.
pub fn is_majorized(a: &WeightVector, b: &WeightVector) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let (sa, sb) = (a.sum(), b.sum());
    if (sa - sb).abs() > SUM_TOLERANCE * sa.abs().max(sb.abs()).max(1.0) {
        return Err(Error::SumMismatch { left: sa, right: sb });
    }
    let tol = SUM_TOLERANCE * sa.abs().max(1.0);
    Ok(prefix_differences(a, b).iter().all(|&d| d >= -tol))
}

/// Uniform draw on `{a ≥ 0, Σa = total}` (symmetric Dirichlet(1)).
pub fn dirichlet_simplex<R: Rng + ?Sized>(rng: &mut R, n: usize, total: f64) -> Vec<f64> {
    let e: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| total * x / s).collect()
}

/// `a_1 = spike·total` with the remainder spread by a Dirichlet(1) draw.
pub fn spiked_simplex<R: Rng + ?Sized>(rng: &mut R, n: usize, spike: f64, total: f64) -> Vec<f64> {
    let mut a = vec![spike * total];
    if n > 1 {
        a.extend(dirichlet_simplex(rng, n - 1, (1.0 - spike) * total));
    }
    a
}

/// Moves `fraction·(a_i − a_j)/2` from coordinate `i` to `j` (requires
/// `a_i ≥ a_j`, `fraction ∈ [0, 1]`); the order of the two is preserved, so the
/// result is majorized by the input.
pub fn robin_hood_transfer(a: &[f64], i: usize, j: usize, fraction: f64) -> Vec<f64> {
    let mut b = a.to_vec();
    let delta = 0.5 * fraction * (a[i] - a[j]);
    b[i] -= delta;
    b[j] += delta;
    b
}

/// Applies one to three random Robin-Hood transfers to `a`, each moving a
/// strictly positive amount; returns `None` when `a` is constant.
pub fn random_transfers<R: Rng + ?Sized>(rng: &mut R, a: &[f64]) -> Option<Vec<f64>> {
    let n = a.len();
    let mut b = a.to_vec();
    let steps = rng.random_range(1..=3);
    let mut moved = false;
    for _ in 0..steps {
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        let (hi, lo) = if b[i] >= b[j] { (i, j) } else { (j, i) };
        if b[hi] <= b[lo] {
            continue;
        }
        let fraction = rng.random_range(0.05..=1.0);
        b = robin_hood_transfer(&b, hi, lo, fraction);
        moved = true;
    }
    if !moved {
        let hi = (0..n).max_by(|&x, &y| b[x].total_cmp(&b[y]))?;
        let lo = (0..n).min_by(|&x, &y| b[x].total_cmp(&b[y]))?;
        if b[hi] <= b[lo] {
            return None;
        }
        b = robin_hood_transfer(&b, hi, lo, rng.random_range(0.05..=1.0));
    }
    Some(b)
}

/// Majorization pair built from a given upper vector, using a seeded stream.
pub fn majorization_pair_from<R: Rng + ?Sized>(rng: &mut R, upper: Vec<f64>) -> Result<MajorizationPair> {
    let lower = random_transfers(rng, &upper)
        .ok_or_else(|| Error::Precondition("cannot transfer mass within a constant vector".into()))?;
    let pair = MajorizationPair {
        witness: Vec::new(),
        upper: WeightVector::new(upper)?,
        lower: WeightVector::new(lower)?,
    };
    let witness = prefix_differences(&pair.upper, &pair.lower);
    Ok(MajorizationPair { witness, ..pair })
}

/// Random `(a, b)` with `a ≻ b`, `a ≠ b`, both summing to `total`: `a` is a
/// Dirichlet draw and `b` follows from one to three Robin-Hood transfers.
pub fn random_majorization_pair(n: usize, total: f64, rng_seed: u64) -> Result<MajorizationPair> {
    if n < 2 {
        return Err(Error::Precondition(format!("majorization pairs need n >= 2, got {n}")));
    }
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::Precondition(format!("total must be positive, got {total}")));
    }
    let mut rng = rng_from_seed(rng_seed);
    loop {
        let upper = dirichlet_simplex(&mut rng, n, total);
        if let Ok(pair) = majorization_pair_from(&mut rng, upper) {
            if pair.upper != pair.lower {
                return Ok(pair);
            }
        }
    }
}

/// `(x_i − x_j)(∂f/∂x_i − ∂f/∂x_j)` by central differences. Negative values
/// indicate a Schur-concave direction, positive values a Schur-convex one.
///
/// `h` defaults to `1e-5·max(1, |x_i|)`; the perturbed points must stay in
/// the nonnegative orthant.
pub fn schur_ostrowski_check<F: Fn(&[f64]) -> f64>(
    f: F,
    x: &[f64],
    i: usize,
    j: usize,
    h: Option<f64>,
) -> Result<f64> {
    if i >= x.len() || j >= x.len() || i == j {
        return Err(Error::Precondition(format!(
            "indices must be distinct and below {}, got ({i}, {j})",
            x.len()
        )));
    }
    if x[i] == x[j] {
        return Err(Error::Precondition("Schur-Ostrowski check needs x_i != x_j".into()));
    }
    let h = h.unwrap_or(1e-5 * x[i].abs().max(1.0));
    if !(h > 0.0) || x[i] - h < 0.0 || x[j] - h < 0.0 {
        return Err(Error::StepOutOfDomain(format!(
            "step {h} leaves the nonnegative orthant at x_{i} = {}, x_{j} = {}",
            x[i], x[j]
        )));
    }
    let partial = |k: usize| {
        let mut plus = x.to_vec();
        let mut minus = x.to_vec();
        plus[k] += h;
        minus[k] -= h;
        (f(&plus) - f(&minus)) / (2.0 * h)
    };
    Ok((x[i] - x[j]) * (partial(i) - partial(j)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;

    fn w(a: &[f64]) -> WeightVector {
        WeightVector::new(a.to_vec()).unwrap()
    }

    #[test]
    fn weight_vector_validation() {
        assert!(WeightVector::new(vec![]).is_err());
        assert!(WeightVector::new(vec![0.0, 0.0]).is_err());
        assert!(WeightVector::new(vec![0.5, -0.1]).is_err());
        assert!(WeightVector::new(vec![f64::NAN]).is_err());
        assert!(WeightVector::new(vec![0.0, 1.0]).is_ok());
    }

    #[test]
    fn parse_and_serialize() {
        let a: WeightVector = "0.5, 0.3,0.2".parse().unwrap();
        assert_eq!(a.as_slice(), &[0.5, 0.3, 0.2]);
        assert_eq!(serde_json::to_string(&a).unwrap(), "[0.5,0.3,0.2]");
        let back: WeightVector = serde_json::from_str("[0.5,0.3,0.2]").unwrap();
        assert_eq!(back, a);
        assert!(serde_json::from_str::<WeightVector>("[-1.0]").is_err());
        assert!("0.5,abc".parse::<WeightVector>().is_err());
    }

    #[test]
    fn canonical_order_and_normalization() {
        let a = w(&[0.2, 0.5, 0.3]);
        assert!(!a.is_canonical());
        assert_eq!(a.canonical().as_slice(), &[0.5, 0.3, 0.2]);
        assert_eq!(w(&[1.0, 1.0]).normalized().as_slice(), &[0.5, 0.5]);
    }

    #[test]
    fn model_basics() {
        let m = GammaSumModel::from_slice(2.0, &[0.5, 0.0, 0.5]).unwrap();
        assert_eq!(m.n_effective(), 2);
        assert_eq!(m.variance(), 2.0);
        assert!(m.has_equal_weights());
        assert!(GammaSumModel::from_slice(0.0, &[1.0]).is_err());
    }

    #[test]
    fn majorization_examples() {
        assert!(is_majorized(&w(&[1.0, 0.0]), &w(&[0.5, 0.5])).unwrap());
        assert!(is_majorized(&w(&[0.7, 0.2, 0.1]), &w(&[0.5, 0.3, 0.2])).unwrap());
        assert!(!is_majorized(&w(&[0.6, 0.4]), &w(&[0.7, 0.3])).unwrap());
        assert!(matches!(
            is_majorized(&w(&[1.0]), &w(&[0.5, 0.5])),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            is_majorized(&w(&[1.0, 0.0]), &w(&[0.5, 0.6])),
            Err(Error::SumMismatch { .. })
        ));
    }

    #[test]
    fn pair_generator_contract() {
        let p = random_majorization_pair(2, 1.0, 11).unwrap();
        assert!(is_majorized(&p.upper, &p.lower).unwrap());
        assert_ne!(p.upper, p.lower);
        assert_eq!(p, random_majorization_pair(2, 1.0, 11).unwrap());
        assert!(p.witness.iter().all(|&d| d >= -1e-12));
        assert!(random_majorization_pair(1, 1.0, 0).is_err());
    }

    #[test]
    fn pair_generator_always_majorizes() {
        for seed in 0..1000 {
            let p = random_majorization_pair(5, 1.0, seed).unwrap();
            assert!(is_majorized(&p.upper, &p.lower).unwrap(), "seed {seed}");
            assert_ne!(p.upper, p.lower);
        }
    }

    #[test]
    fn single_transfer_closure() {
        let mut rng = rng_from_seed(3);
        for _ in 0..1000 {
            let n = rng.random_range(2..8);
            let a = dirichlet_simplex(&mut rng, n, 2.5);
            let i = rng.random_range(0..n);
            let j = rng.random_range(0..n);
            let (hi, lo) = if a[i] >= a[j] { (i, j) } else { (j, i) };
            let b = robin_hood_transfer(&a, hi, lo, rng.random_range(0.0..=1.0));
            assert!(is_majorized(&w(&a), &w(&b)).unwrap());
        }
    }

    #[test]
    fn chains_are_transitive() {
        let mut rng = rng_from_seed(5);
        for _ in 0..300 {
            let a = dirichlet_simplex(&mut rng, 4, 1.0);
            let Some(b) = random_transfers(&mut rng, &a) else { continue };
            let Some(c) = random_transfers(&mut rng, &b) else { continue };
            assert!(is_majorized(&w(&a), &w(&b)).unwrap());
            assert!(is_majorized(&w(&b), &w(&c)).unwrap());
            assert!(is_majorized(&w(&a), &w(&c)).unwrap());
        }
    }

    #[test]
    fn uniform_is_majorized_by_everything() {
        let mut rng = rng_from_seed(9);
        for _ in 0..500 {
            let n = rng.random_range(1..9);
            let total = rng.random_range(0.1..10.0);
            let a = dirichlet_simplex(&mut rng, n, total);
            let sum: f64 = a.iter().sum();
            let u = WeightVector::uniform(n, sum).unwrap();
            assert!(is_majorized(&w(&a), &u).unwrap());
        }
    }

    fn f_functional(gamma: f64) -> impl Fn(&[f64]) -> f64 {
        move |x: &[f64]| {
            x.iter()
                .map(|&v| (gamma * v.sqrt()).exp() * (1.0 + v.sqrt()).powf(-gamma))
                .product()
        }
    }

    fn g_functional(gamma: f64) -> impl Fn(&[f64]) -> f64 {
        move |x: &[f64]| x.iter().map(|&v| (1.0 + v.sqrt()).powf(-gamma)).product()
    }

    #[test]
    fn ostrowski_signs() {
        let x = [1.0, 4.0];
        // closed form: (x_0 - x_1)·(γ/2)·F·(1/(1+√x_0) − 1/(1+√x_1))
        let f = f_functional(1.0);
        let analytic = (1.0 - 4.0) * 0.5 * f(&x) * (1.0 / 2.0 - 1.0 / 3.0);
        let fd = schur_ostrowski_check(&f, &x, 0, 1, None).unwrap();
        assert!(fd < 0.0);
        assert!((fd - analytic).abs() <= 1e-8 * analytic.abs());
        assert!(schur_ostrowski_check(g_functional(1.0), &x, 0, 1, None).unwrap() > 0.0);
        let sum = |v: &[f64]| v.iter().sum::<f64>();
        assert!(schur_ostrowski_check(sum, &[0.3, 2.0, 1.0], 0, 1, None).unwrap().abs() < 1e-8);
    }

    #[test]
    fn ostrowski_domain_errors() {
        let f = g_functional(1.0);
        assert!(matches!(
            schur_ostrowski_check(&f, &[0.0, 1.0], 0, 1, None),
            Err(Error::StepOutOfDomain(_))
        ));
        assert!(schur_ostrowski_check(&f, &[1.0, 1.0], 0, 1, None).is_err());
        assert!(schur_ostrowski_check(&f, &[1.0, 2.0], 0, 0, None).is_err());
    }
}
