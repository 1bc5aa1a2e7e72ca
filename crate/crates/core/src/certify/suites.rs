use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::cases::{CaseInput, MaxDensityMode};
use super::mixture::ExponentialMixture;
use crate::model::{dirichlet_simplex, majorization_pair_from, spiked_simplex};
use crate::seed::derived_rng;

const SPIKES: [f64; 3] = [0.5, 0.9, 0.99];

/// Builds `count` cases, case `start + i` drawing from its own derived stream.
pub(super) fn generate<F>(seed: u64, start: usize, count: usize, mut f: F) -> Vec<CaseInput>
where
    F: FnMut(&mut ChaCha8Rng, usize) -> CaseInput,
{
    (0..count)
        .map(|i| {
            let mut rng = derived_rng(seed, (start + i) as u64);
            f(&mut rng, i)
        })
        .collect()
}

fn log_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..=hi.ln())).exp()
}

/// Dirichlet draw on even cases, spiked draw on odd ones.
fn simplex_draw<R: Rng + ?Sized>(rng: &mut R, n: usize, i: usize) -> Vec<f64> {
    if i.is_multiple_of(2) || n == 1 {
        dirichlet_simplex(rng, n, 1.0)
    } else {
        let spike = SPIKES[rng.random_range(0..SPIKES.len())];
        spiked_simplex(rng, n, spike, 1.0)
    }
}

fn pair_draw<R: Rng + ?Sized>(rng: &mut R, n: usize, total: f64) -> (Vec<f64>, Vec<f64>) {
    loop {
        let upper = dirichlet_simplex(rng, n, total);
        if let Ok(p) = majorization_pair_from(rng, upper) {
            return (p.upper.as_slice().to_vec(), p.lower.as_slice().to_vec());
        }
    }
}

pub(super) fn phi_cases(
    shape: f64,
    n: Option<usize>,
    mixture: &ExponentialMixture,
    trials: usize,
    seed: u64,
    start: usize,
) -> Vec<CaseInput> {
    generate(seed, start, trials, |rng, i| {
        let n = n.unwrap_or_else(|| rng.random_range(2..=6));
        let total = log_uniform(rng, 0.1, 10.0);
        let c = shape * (n as f64 * total).sqrt() * (1.0 + rng.random_range(0.05..1.5));
        let (upper, lower) = pair_draw(rng, n, total);
        // the first case of each block is the reflexive pair
        let lower = if i == 0 { upper.clone() } else { lower };
        CaseInput::Phi {
            shape,
            c,
            upper,
            lower,
            mixture: mixture.clone(),
        }
    })
}

pub(super) fn phi0_cases(
    shape: f64,
    n: Option<usize>,
    mixture: &ExponentialMixture,
    trials: usize,
    seed: u64,
    start: usize,
) -> Vec<CaseInput> {
    generate(seed, start, trials, |rng, _| {
        let n = n.unwrap_or_else(|| rng.random_range(2..=6));
        let total = log_uniform(rng, 0.1, 10.0);
        let (upper, lower) = pair_draw(rng, n, total);
        CaseInput::Phi0 {
            shape,
            upper,
            lower,
            mixture: mixture.clone(),
        }
    })
}

pub(super) fn fg_cases(shape: f64, trials: usize, seed: u64, start: usize) -> Vec<CaseInput> {
    generate(seed, start, trials, |rng, _| {
        let n = rng.random_range(2..=6);
        let total = log_uniform(rng, 0.1, 10.0);
        let (upper, lower) = pair_draw(rng, n, total);
        let point: Vec<f64> = dirichlet_simplex(rng, n, total).into_iter().map(|x| 0.01 + x).collect();
        let i = rng.random_range(0..n);
        let j = (i + rng.random_range(1..n)) % n;
        CaseInput::Fg {
            shape,
            upper,
            lower,
            point,
            i,
            j,
        }
    })
}

pub(super) fn entropy_cases(shape: f64, n: usize, trials: usize, seed: u64, start: usize) -> Vec<CaseInput> {
    generate(seed, start, trials, |rng, i| {
        let weights = match i {
            0 => extreme(n, 1),
            1 => vec![1.0 / n as f64; n],
            _ => simplex_draw(rng, n, i),
        };
        CaseInput::Entropy { shape, weights }
    })
}

pub(super) fn renyi_cases(shape: f64, n: usize, alpha: f64, trials: usize, seed: u64, start: usize) -> Vec<CaseInput> {
    generate(seed, start, trials, |rng, i| {
        let weights = match i {
            0 => vec![1.0 / n as f64; n],
            1 => extreme(n, 1),
            _ => simplex_draw(rng, n, i),
        };
        CaseInput::Renyi { shape, alpha, weights }
    })
}

pub(super) fn moment_cases(
    shape: Option<f64>,
    n: Option<usize>,
    max_order: usize,
    trials: usize,
    seed: u64,
    start: usize,
) -> Vec<CaseInput> {
    const SHAPES: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 5.0];
    generate(seed, start, trials, |rng, _| {
        let shape = shape.unwrap_or_else(|| SHAPES[rng.random_range(0..SHAPES.len())]);
        let n = n.unwrap_or_else(|| rng.random_range(2..=6));
        let (upper, lower) = pair_draw(rng, n, 1.0);
        CaseInput::Moments {
            shape,
            upper,
            lower,
            max_order,
        }
    })
}

/// Smallest n with a finite maximal density (nγ ≥ 1).
fn min_finite_n(shape: f64) -> usize {
    ((1.0 / shape) - 1e-12).ceil().max(1.0) as usize
}

pub(super) fn max_density_cases(
    mode: MaxDensityMode,
    shape: f64,
    trials: usize,
    seed: u64,
    start: usize,
) -> Vec<CaseInput> {
    generate(seed, start, trials, |rng, i| {
        let n = match mode {
            MaxDensityMode::G1 => rng.random_range(1..=6),
            MaxDensityMode::G12 => {
                let lo = min_finite_n(shape).max(2);
                if lo == 2 && i % 2 == 0 {
                    2
                } else {
                    rng.random_range(lo..=lo + 3)
                }
            }
            MaxDensityMode::Bnu => rng.random_range(2..=6),
            MaxDensityMode::Gk { k } => {
                if i % 2 == 0 {
                    k + 1
                } else {
                    k + 2
                }
            }
        };
        let mut weights = simplex_draw(rng, n, i / 2 + i % 2);
        weights.sort_by(|a, b| b.total_cmp(a));
        CaseInput::MaxDensity { mode, shape, weights }
    })
}

pub(super) fn cf_envelope_cases(shape: f64, trials: usize, seed: u64, start: usize) -> Vec<CaseInput> {
    generate(seed, start, trials, |rng, i| {
        if i == 0 {
            return CaseInput::CfEnvelope {
                shape,
                m: 2,
                weights: vec![0.5, 0.5, 0.0, 0.0],
            };
        }
        let m = rng.random_range(1..=4);
        let n = rng.random_range(m..=m + 4);
        let raw = dirichlet_simplex(rng, n, 1.0);
        let u = 1.0 / n as f64;
        let max = raw.iter().copied().fold(0.0, f64::max);
        let cap = 1.0 / m as f64;
        // shrink toward uniform until the largest weight is at most 1/m
        let lambda = if max <= cap { 1.0 } else { (cap - u) / (max - u) };
        let weights = raw.iter().map(|x| u + lambda * (x - u)).collect();
        CaseInput::CfEnvelope { shape, m, weights }
    })
}

pub(super) fn density_bounds_cases(trials: usize, seed: u64, start: usize) -> Vec<CaseInput> {
    const SHAPES: [f64; 4] = [0.3, 0.5, 1.0, 2.5];
    generate(seed, start, trials, |rng, _| {
        let shape = SHAPES[rng.random_range(0..SHAPES.len())];
        let n = rng.random_range(1..=4);
        let weights = dirichlet_simplex(rng, n, 1.0);
        let mean: f64 = shape * weights.iter().map(|a| a.sqrt()).sum::<f64>();
        let x = mean * log_uniform(rng, 1e-2, 5.0);
        CaseInput::DensityBounds { shape, weights, x }
    })
}

fn extreme(n: usize, ones: usize) -> Vec<f64> {
    (0..n).map(|j| if j < ones { 1.0 / ones as f64 } else { 0.0 }).collect()
}
