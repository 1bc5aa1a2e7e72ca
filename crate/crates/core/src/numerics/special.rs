//! Γ, ln Γ and ψ for positive real arguments.

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// ζ(2), ζ(3), …, ζ(30).
const ZETA: [f64; 29] = [
    1.6449340668482264365,
    1.2020569031595942854,
    1.0823232337111381915,
    1.0369277551433699263,
    1.0173430619844491397,
    1.0083492773819228268,
    1.0040773561979443394,
    1.0020083928260822144,
    1.0009945751278180853,
    1.0004941886041194646,
    1.0002460865533080483,
    1.0001227133475784891,
    1.0000612481350587048,
    1.0000305882363070205,
    1.0000152822594086519,
    1.0000076371976378998,
    1.0000038172932649998,
    1.0000019082127165539,
    1.0000009539620338728,
    1.0000004769329867878,
    1.0000002384505027277,
    1.0000001192199259653,
    1.0000000596081890513,
    1.0000000298035035147,
    1.0000000149015548284,
    1.0000000074507117898,
    1.0000000037253340248,
    1.0000000018626597235,
    1.0000000009313274324,
];

/// Lanczos coefficients for g = 671/128.
const LANCZOS_G: f64 = 5.242_187_5;
const LANCZOS: [f64; 14] = [
    57.156_235_665_862_923_5,
    -59.597_960_355_475_491_2,
    14.136_097_974_741_747_1,
    -0.491_913_816_097_620_199,
    0.339_946_499_848_118_887e-4,
    0.465_236_289_270_485_756e-4,
    -0.983_744_753_048_795_646e-4,
    0.158_088_703_224_912_494e-3,
    -0.210_264_441_724_104_883e-3,
    0.217_439_618_115_212_643e-3,
    -0.164_318_106_536_763_890e-3,
    0.844_182_239_838_527_433e-4,
    -0.261_908_384_015_814_087e-4,
    0.368_991_826_595_316_234e-5,
];

/// ln Γ(1 + z) for |z| ≤ 0.25 from the ζ-series.
fn ln_gamma_1p_series(z: f64) -> f64 {
    let mut acc = -EULER_GAMMA * z;
    let mut power = -z;
    for (i, zeta) in ZETA.iter().enumerate() {
        let k = (i + 2) as f64;
        power *= -z;
        acc += zeta * power / k;
    }
    acc
}

fn ln_gamma_lanczos(x: f64) -> f64 {
    let tmp = x + LANCZOS_G;
    let tmp = (x + 0.5) * tmp.ln() - tmp;
    let mut ser = 0.999_999_999_999_997_092;
    let mut y = x;
    for c in LANCZOS.iter() {
        y += 1.0;
        ser += c / y;
    }
    tmp + (2.506_628_274_631_000_5 * ser / x).ln()
}

/// ln Γ(x) for x > 0.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("log_gamma requires x > 0, got {x}")));
    }
    Ok(ln_gamma_unchecked(x))
}

/// ln Γ(x) without the domain check; callers guarantee x > 0.
pub(crate) fn ln_gamma_unchecked(x: f64) -> f64 {
    // the Lanczos sum loses relative accuracy near the zeros at 1 and 2
    if (x - 1.0).abs() <= 0.25 {
        ln_gamma_1p_series(x - 1.0)
    } else if (x - 2.0).abs() <= 0.25 {
        let z = x - 2.0;
        ln_gamma_1p_series(z) + z.ln_1p()
    } else {
        ln_gamma_lanczos(x)
    }
}

/// Γ(x) for x > 0; overflows to +∞ above x ≈ 171.6.
pub fn gamma(x: f64) -> Result<f64> {
    log_gamma(x).map(f64::exp)
}

/// Digamma ψ(x) = d/dx ln Γ(x) for x > 0.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("digamma requires x > 0, got {x}")));
    }
    let mut x = x;
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    // Bernoulli tail: B_2k / (2k x^2k)
    let tail = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2
                                * (1.0 / 240.0
                                    - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0 - inv2 / 12.0))))));
    Ok(acc + x.ln() - 0.5 / x - tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn log_gamma_reference_values() {
        assert_eq!(log_gamma(1.0).unwrap(), 0.0);
        assert_eq!(log_gamma(2.0).unwrap(), 0.0);
        assert_relative_eq!(log_gamma(0.5).unwrap(), 0.572_364_942_924_700_1, max_relative = 1e-14);
        assert_relative_eq!(log_gamma(4.0).unwrap(), 6f64.ln(), max_relative = 1e-14);
        // ln Γ(1e-6) and ln Γ(1e6) from mpmath
        assert_relative_eq!(log_gamma(1e-6).unwrap(), 13.815_509_980_749_432, max_relative = 1e-12);
        assert_relative_eq!(log_gamma(1e6).unwrap(), 12_815_504.569_147_61, max_relative = 1e-12);
        assert_relative_eq!(log_gamma(0.8).unwrap(), 0.152_059_678_399_837_3, max_relative = 1e-13);
        assert_relative_eq!(log_gamma(2.2).unwrap(), 0.096_947_466_790_638_78, max_relative = 1e-12);
    }

    #[test]
    fn log_gamma_rejects_nonpositive() {
        assert!(matches!(log_gamma(0.0), Err(Error::Domain(_))));
        assert!(matches!(log_gamma(-1.5), Err(Error::Domain(_))));
        assert!(log_gamma(f64::NAN).is_err());
    }

    #[test]
    fn digamma_reference_values() {
        assert_relative_eq!(digamma(1.0).unwrap(), -0.577_215_664_901_532_9, max_relative = 1e-13);
        assert_relative_eq!(digamma(2.0).unwrap(), 0.422_784_335_098_467_1, max_relative = 1e-13);
        assert_relative_eq!(digamma(0.5).unwrap(), -1.963_510_026_021_423_5, max_relative = 1e-13);
        assert_relative_eq!(digamma(1e-3).unwrap(), -1_000.575_571_931_810_3, max_relative = 1e-12);
        assert_relative_eq!(digamma(1e6).unwrap(), 13.815_510_057_964_191, max_relative = 1e-13);
        assert!(digamma(0.0).is_err());
    }

    #[test]
    fn gamma_matches_factorials() {
        for n in 1..15u32 {
            let fact: f64 = (1..n).map(f64::from).product();
            assert_relative_eq!(gamma(f64::from(n)).unwrap(), fact, max_relative = 1e-13);
        }
    }
}
