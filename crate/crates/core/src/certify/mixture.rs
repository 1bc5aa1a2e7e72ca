use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::special::ln_gamma_unchecked;
use crate::numerics::{integrate, Estimate, Interval, QuadratureConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub weight: f64,
    pub rate: f64,
}

/// Completely monotone `Φ(x) = Σ w_i e^{−s_i x} [+ x^{−q}]`, the power law
/// being realised as `∫ t^{q−1} e^{−tx} dt / Γ(q)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentialMixture {
    pub atoms: Vec<Atom>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power: Option<f64>,
}

impl ExponentialMixture {
    pub fn new(atoms: Vec<Atom>, power: Option<f64>) -> Result<Self> {
        let m = Self { atoms, power };
        m.validate()?;
        Ok(m)
    }

    pub fn single(rate: f64) -> Result<Self> {
        Self::new(vec![Atom { weight: 1.0, rate }], None)
    }

    pub fn power_law(q: f64) -> Result<Self> {
        Self::new(Vec::new(), Some(q))
    }

    pub fn validate(&self) -> Result<()> {
        if self.atoms.is_empty() && self.power.is_none() {
            return Err(Error::Precondition("mixture has no atoms".into()));
        }
        for a in &self.atoms {
            if !(a.weight > 0.0 && a.weight.is_finite() && a.rate > 0.0 && a.rate.is_finite()) {
                return Err(Error::Precondition(format!(
                    "atoms need positive finite weight and rate, got {a:?}"
                )));
            }
        }
        if let Some(q) = self.power {
            if !(q > 0.0 && q.is_finite()) {
                return Err(Error::Precondition(format!("power-law exponent must be positive, got {q}")));
            }
        }
        Ok(())
    }

    /// 1–5 atoms with rates log-uniform on `[1e-2, 1e2]`; with probability ½
    /// a power law `x^{−q}`, `q ∈ powers`, is added (when `powers` is non-empty).
    pub fn random<R: Rng + ?Sized>(rng: &mut R, powers: &[f64]) -> Self {
        let count = rng.random_range(1..=5);
        let atoms = (0..count)
            .map(|_| Atom {
                weight: rng.random_range(0.1..1.0),
                rate: 10f64.powf(rng.random_range(-2.0..=2.0)),
            })
            .collect();
        let power = (!powers.is_empty() && rng.random_bool(0.5)).then(|| powers[rng.random_range(0..powers.len())]);
        Self { atoms, power }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let atoms: f64 = self.atoms.iter().map(|a| a.weight * (-a.rate * x).exp()).sum();
        atoms + self.power.map_or(0.0, |q| x.powf(-q))
    }

    /// `E Φ(Y)` given `ln E e^{−tY}` for `t ≥ 0`; `scale` is a typical
    /// `1/E Y` used to map the power-law integral's tail.
    pub fn expectation<L: Fn(f64) -> f64>(&self, log_laplace: L, scale: f64, cfg: &QuadratureConfig) -> Result<Estimate> {
        let atoms: f64 = self.atoms.iter().map(|a| a.weight * log_laplace(a.rate).exp()).sum();
        let Some(q) = self.power else {
            return Ok(Estimate {
                value: atoms,
                err_est: 4.0 * f64::EPSILON * atoms.abs(),
            });
        };
        // ∫ t^{q−1} L(t) dt / Γ(q) in u = ln t, split at u0 = ln scale; both
        // halves then decay exponentially.
        let ln_norm = ln_gamma_unchecked(q);
        let u0 = scale.ln();
        let integrand = |u: f64| {
            let t = u.exp();
            if t == 0.0 || t.is_infinite() {
                return 0.0;
            }
            (q * u + log_laplace(t) - ln_norm).exp()
        };
        let left = integrate(|w| integrand(u0 - w), Interval::semi_infinite(0.0).with_tail_scale(1.0 / q), cfg)?;
        let right = integrate(|w| integrand(u0 + w), Interval::semi_infinite(0.0), cfg)?;
        let power = Estimate {
            value: left.value + right.value,
            err_est: left.err_est + right.err_est,
        };
        Ok(Estimate {
            value: atoms + power.value,
            err_est: power.err_est + 4.0 * f64::EPSILON * atoms.abs(),
        })
    }
}
