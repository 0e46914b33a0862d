//! Gauss hypergeometric function restricted to the Molchan–Golosov pattern
//! ₂F₁(−d, d; d+1; z) with z ≤ 0.
//!
//! The Pfaff transformation maps z ∈ (−∞, 0] to w = z/(z−1) ∈ [0, 1):
//!
//! ₂F₁(−d, d; d+1; z) = (1−z)^d · ₂F₁(−d, 1; d+1; w).
//!
//! For w ≤ ½ the Gauss series in w is summed directly. Closer to w = 1
//! (the s → 0⁺ end of the kernel) the 1−w connection formula is used. For
//! this parameter pattern its two Γ-ratio coefficients collapse to ½ and
//! ½·Γ(1+d)Γ(1−2d)/Γ(1−d), and the second series is (1−x)^{−d} in closed
//! form, so
//!
//! ₂F₁(−d, 1; d+1; w) = ½·₂F₁(−d, 1; 1−2d; x) + ½·Γ(1+d)Γ(1−2d)/Γ(1−d) · x^{2d} w^{−d},
//!
//! with x = 1 − w = 1/(1−z). Neither coefficient has a pole at d = 0.

use crate::error::{Error, Result};
use crate::real::Real;
use crate::special::gamma;

const MAX_TERMS: usize = 10_000;

/// ₂F₁(α, β; γ; z) for the pattern α = −d, β = d, γ = d + 1 with
/// d ∈ (−½, ½) and z ≤ 0.
pub fn hyp2f1<T: Real>(alpha: T, beta: T, gamma_param: T, z: T) -> Result<T> {
    let d = beta;
    let scale = T::one() + d.abs();
    let tol = T::of(1e-12) * scale;
    let half = T::of(0.5);
    let pattern_ok = (alpha + d).abs() <= tol
        && (gamma_param - d - T::one()).abs() <= tol
        && d > -half
        && d < half;
    if !pattern_ok {
        return Err(Error::ParameterPatternMismatch {
            alpha: alpha.to_f64_lossy(),
            beta: beta.to_f64_lossy(),
            gamma: gamma_param.to_f64_lossy(),
        });
    }
    hyp2f1_mg(d, z)
}

/// ₂F₁(−d, d; d+1; z), the factor appearing in the Molchan–Golosov kernel.
pub fn hyp2f1_mg<T: Real>(d: T, z: T) -> Result<T> {
    if z.is_nan() || z > T::zero() {
        return Err(Error::ArgumentOutOfRange(z.to_f64_lossy()));
    }
    if d == T::zero() || z == T::zero() {
        return Ok(T::one());
    }
    let one = T::one();
    let half = T::of(0.5);
    let prefactor = (one - z).powf(d);
    // x = 1 - w computed without cancellation
    let x = one / (one - z);
    let w = -z * x;

    let inner = if w <= half {
        gauss_series(-d, d + one, w)
    } else {
        let regular = gauss_series(-d, one - d - d, x);
        let coeff = gamma(one + d) * gamma(one - d - d) / gamma(one - d);
        half * regular + half * coeff * x.powf(d + d) * w.powf(-d)
    };
    Ok(prefactor * inner)
}

/// Σ_n (a)_n (1)_n / ((c)_n n!) · x^n = Σ_n (a)_n/(c)_n · x^n for |x| < 1.
fn gauss_series<T: Real>(a: T, c: T, x: T) -> T {
    let stop = T::of(1e-16);
    let mut term = T::one();
    let mut sum = T::one();
    for n in 0..MAX_TERMS {
        let nf = T::of_usize(n);
        term *= (nf + a) / (nf + c) * x;
        sum += term;
        if term.abs() <= stop * sum.abs() {
            break;
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    // Golden values from a 30-digit mpmath evaluation of the raw function.
    const GOLDEN: [(f64, f64, f64); 8] = [
        (0.25, -1.0, 1.042_393_892_029_156_1),
        (-0.25, -1.0, 1.067_814_992_741_264_2),
        (0.25, -0.5, 1.022_815_071_134_649_8),
        (-0.4, -3.0, 1.518_463_204_574_983_4),
        (0.45, -20.0, 2.212_758_334_535_140_1),
        (-0.1, -1e4, 1.494_378_018_705_142_9),
        (0.3, -1e8, 125.597_373_750_575_97),
        (0.001, -2.0, 1.000_001_435_506_939_5),
    ];

    #[test]
    fn golden_values() {
        for (d, z, want) in GOLDEN {
            let got = hyp2f1(-d, d, d + 1.0, z).unwrap();
            assert!(((got - want) / want).abs() < 1e-10, "d={d} z={z}: {got} vs {want}");
        }
    }

    #[test]
    fn zero_numerator_and_zero_argument() {
        for z in [0.0, -0.3, -7.0, -1e6] {
            assert_eq!(hyp2f1_mg(0.0, z).unwrap(), 1.0);
        }
        for d in [-0.45, -0.1, 0.2, 0.49] {
            assert_eq!(hyp2f1_mg(d, 0.0).unwrap(), 1.0);
        }
    }

    /// Raw Gauss series in z, valid for |z| < 1, summed with many terms.
    fn raw_series(d: f64, z: f64) -> f64 {
        let (a, b, c) = (-d, d, d + 1.0);
        let mut term = 1.0;
        let mut sum = 1.0;
        for n in 0..5000 {
            let n = n as f64;
            term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
            sum += term;
        }
        sum
    }

    #[test]
    fn agrees_with_raw_series_inside_unit_disc() {
        for d in [-0.45, -0.25, -0.01, 0.01, 0.25, 0.45] {
            for z in [-0.05, -0.3, -0.6, -0.9] {
                let got = hyp2f1_mg(d, z).unwrap();
                let want = raw_series(d, z);
                assert!(((got - want) / want).abs() < 1e-12, "d={d} z={z}");
            }
        }
    }

    #[test]
    fn both_branches_agree_at_the_switch() {
        // w = 1/2 corresponds to z = -1
        for d in [-0.3, 0.2] {
            let left: f64 = hyp2f1_mg(d, -1.0 + 1e-9).unwrap();
            let right = hyp2f1_mg(d, -1.0 - 1e-9).unwrap();
            assert!((left - right).abs() < 1e-8);
        }
    }

    #[test]
    fn rejects_positive_argument_and_wrong_pattern() {
        assert!(matches!(hyp2f1(-0.2, 0.2, 1.2, 0.1), Err(Error::ArgumentOutOfRange(_))));
        assert!(matches!(
            hyp2f1(0.2, 0.2, 1.2, -0.1),
            Err(Error::ParameterPatternMismatch { .. })
        ));
        assert!(matches!(
            hyp2f1(-0.6, 0.6, 1.6, -0.1),
            Err(Error::ParameterPatternMismatch { .. })
        ));
    }
}
