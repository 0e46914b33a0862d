//! Fractional Volterra kernels: Molchan–Golosov (MG), Mandelbrot–van Ness
//! (MvN) and the shifted, sign-flipped modified MvN kernel
//!
//! f_{a,d}(t, s) = (a + (−s)₊)^d − (a + (t−s)₊)^d,  d ∈ (−½, 0), a > 0,
//!
//! together with Lᵖ norms and integrability classification.

pub mod hypergeometric;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, Segment, Tolerance};
use crate::real::Real;
use crate::special::gamma;

pub use hypergeometric::{hyp2f1, hyp2f1_mg};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelFamily {
    #[serde(rename = "mg")]
    MG,
    #[serde(rename = "mvn")]
    MvN,
    #[serde(rename = "modified_mvn")]
    ModifiedMvN,
}

impl std::fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            KernelFamily::MG => "MG",
            KernelFamily::MvN => "MvN",
            KernelFamily::ModifiedMvN => "ModifiedMvN",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec<T> {
    pub family: KernelFamily,
    pub d: T,
    /// Shift; only meaningful for the modified MvN kernel.
    pub a: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrability {
    Integrable,
    NonIntegrable,
}

impl<T: Real> KernelSpec<T> {
    pub fn mg(d: T) -> Result<Self> {
        Self { family: KernelFamily::MG, d, a: T::one() }.validated()
    }

    pub fn mvn(d: T) -> Result<Self> {
        Self { family: KernelFamily::MvN, d, a: T::one() }.validated()
    }

    pub fn modified_mvn(a: T, d: T) -> Result<Self> {
        Self { family: KernelFamily::ModifiedMvN, d, a }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        let half = T::of(0.5);
        let d = self.d;
        let ok = match self.family {
            KernelFamily::MG => d > -half && d < half,
            KernelFamily::MvN => d > -half && d < half && d != T::zero(),
            KernelFamily::ModifiedMvN => d > -half && d < T::zero() && self.a > T::zero(),
        };
        if ok && self.a.is_finite() {
            Ok(self)
        } else {
            Err(Error::InvalidKernel(format!(
                "{} kernel with d = {}, a = {}",
                self.family, self.d, self.a
            )))
        }
    }

    /// L¹ flag of the MvN kernel: integrable iff d < 0.
    pub fn l1_integrable(&self) -> bool {
        classify_integrability(self, T::one()) == Integrability::Integrable
    }
}

/// (x + h)^d − x^d without cancellation when h ≪ x.
#[inline]
pub fn pow_diff<T: Real>(x: T, h: T, d: T) -> T {
    x.powf(d) * (d * (h / x).ln_1p()).exp_m1()
}

/// (a + (−s)₊)^d − (a + (t−s)₊)^d without validation, for hot loops.
///
/// Evaluated piecewise so that the far past, where both powers nearly
/// coincide, keeps full relative precision.
#[inline]
pub fn modified_mvn<T: Real>(a: T, d: T, t: T, s: T) -> T {
    let zero = T::zero();
    let lo = t.min(zero);
    let hi = t.max(zero);
    if s >= hi {
        return zero;
    }
    let sign = if t > zero { -T::one() } else { T::one() };
    if s <= lo {
        sign * pow_diff(a + (lo - s), t.abs(), d)
    } else {
        sign * pow_diff(a, hi - s, d)
    }
}

/// Normalising constant of the MG kernel, chosen so that ∫₀ᵗ f² ds = t^{2d+1}.
pub fn mg_constant<T: Real>(d: T) -> T {
    let half = T::of(0.5);
    let h = d + half;
    let two = T::of(2.0);
    (two * h * gamma(T::of(1.5) - h) / (gamma(h + half) * gamma(two - two * h))).sqrt()
}

pub fn kernel_value<T: Real>(spec: &KernelSpec<T>, t: T, s: T) -> Result<T> {
    let zero = T::zero();
    let d = spec.d;
    let singular = || Error::SingularPoint { t: t.to_f64_lossy(), s: s.to_f64_lossy() };
    match spec.family {
        KernelFamily::ModifiedMvN => Ok(modified_mvn(spec.a, d, t, s)),
        KernelFamily::MvN => {
            if d < zero && (s == t || s == zero) {
                return Err(singular());
            }
            let pos = |x: T| if x > zero { x.powf(d) } else { zero };
            Ok((pos(t - s) - pos(-s)) / gamma(T::one() + d))
        }
        KernelFamily::MG => {
            if s < zero || s > t {
                return Ok(zero);
            }
            if d == zero {
                return Ok(T::one());
            }
            if s == zero || (s == t && d < zero) {
                return Err(singular());
            }
            if s == t {
                return Ok(zero);
            }
            let f = hyp2f1_mg(d, (s - t) / s)?;
            Ok(mg_constant(d) * (t - s).powf(d) * f)
        }
    }
}

pub fn classify_integrability<T: Real>(spec: &KernelSpec<T>, p: T) -> Integrability {
    let one = T::one();
    let d = spec.d;
    let ok = p > T::zero()
        && match spec.family {
            KernelFamily::MG => p * d.abs() < one,
            KernelFamily::MvN => p * (one - d) > one && (d >= T::zero() || p * d > -one),
            KernelFamily::ModifiedMvN => p * (one - d) > one,
        };
    if ok {
        Integrability::Integrable
    } else {
        Integrability::NonIntegrable
    }
}

/// ∫_ℝ |f(t, s)|ᵖ ds to absolute tolerance `tol`.
pub fn kernel_norm<T: Real>(spec: &KernelSpec<T>, t: T, p: T, tol: T) -> Result<T> {
    power_integral(spec, t, p, move |f: T| f.abs().powf(p), Tolerance::absolute(tol))
}

/// Signed ∫_ℝ f(t, s)ᵏ ds, the kernel factor of the k-th cumulant.
pub fn kernel_moment_integral<T: Real>(spec: &KernelSpec<T>, t: T, k: u32, tol: T) -> Result<T> {
    kernel_moment_integral_tol(spec, t, k, Tolerance::absolute(tol))
}

/// [`kernel_moment_integral`] with a general (absolute and relative) tolerance.
pub fn kernel_moment_integral_tol<T: Real>(spec: &KernelSpec<T>, t: T, k: u32, tol: Tolerance<T>) -> Result<T> {
    let p = T::of(k as f64);
    let k = k as i32;
    power_integral(spec, t, p, move |f: T| f.powi(k), tol)
}

fn power_integral<T: Real>(
    spec: &KernelSpec<T>,
    t: T,
    p: T,
    transform: impl Fn(T) -> T + Copy,
    tolerance: Tolerance<T>,
) -> Result<T> {
    let spec = spec.validated()?;
    if classify_integrability(&spec, p) == Integrability::NonIntegrable {
        return Err(Error::Diverges(format!(
            "{} kernel with d = {} is not in L^{}",
            spec.family, spec.d, p
        )));
    }
    if !(tolerance.abs > T::zero() || tolerance.rel > T::zero()) {
        return Err(Error::InvalidKernel("tolerance must be positive".into()));
    }
    let zero = T::zero();
    let one = T::one();
    let d = spec.d;

    match spec.family {
        KernelFamily::MG => {
            if t <= zero {
                return Ok(zero);
            }
            let c = mg_constant(d);
            let f = move |_s: T, l: T, r: T| {
                let v = if d == zero {
                    one
                } else {
                    c * r.powf(d) * hyp2f1_mg(d, -r / l).unwrap_or(T::nan())
                };
                transform(v)
            };
            let segs = Segment::power_both(f, zero, t, -p * d, p * d);
            Ok(integrate(&segs, tolerance)?.value)
        }
        KernelFamily::ModifiedMvN | KernelFamily::MvN => {
            if t == zero {
                return Ok(zero);
            }
            let lo = t.min(zero);
            let hi = t.max(zero);
            let span = hi - lo;
            let sign = if t > zero { one } else { -one };
            let a = spec.a;
            let modified = spec.family == KernelFamily::ModifiedMvN;
            let norm = if modified { one } else { one / gamma(one + d) };
            // r is the exact distance to the segment's right end (lo or hi)
            let past = move |_s: T, _l: T, r: T| {
                let v = if modified {
                    -sign * pow_diff(a + r, span, d)
                } else {
                    sign * pow_diff(r, span, d) * norm
                };
                transform(v)
            };
            let inner = move |_s: T, _l: T, r: T| {
                let v = if modified { -sign * pow_diff(a, r, d) } else { sign * r.powf(d) * norm };
                transform(v)
            };
            // power of |f|^p at the kinks (0 for the bounded kernel)
            let beta = if modified { zero } else { p * d.min(zero) };
            let reach = if modified { a.max(span) } else { span };
            let cut = lo - reach;
            let mut segs = vec![
                Segment::lower_tail(move |s, l, r| past(s, l, r + reach), cut, p * (one - d), reach),
                Segment::power_right(past, cut, lo, beta),
            ];
            segs.extend(Segment::power_both(inner, lo, hi, beta, beta));
            Ok(integrate(&segs, tolerance)?.value)
        }
    }
}

/// ∫_{−∞}^{−m} f(t, u) du in closed form, for −m ≤ min(0, t).
pub fn tail_integral<T: Real>(spec: &KernelSpec<T>, t: T, m: T) -> Result<T> {
    let zero = T::zero();
    let one = T::one();
    let d = spec.d;
    if -m > t.min(zero) {
        return Err(Error::HorizonTooShort {
            horizon: m.to_f64_lossy(),
            required: (-t.min(zero)).to_f64_lossy(),
        });
    }
    match spec.family {
        KernelFamily::MG => Ok(zero),
        KernelFamily::ModifiedMvN => {
            let a = spec.a;
            Ok(((a + t + m).powf(d + one) - (a + m).powf(d + one)) / (d + one))
        }
        KernelFamily::MvN => {
            if d > zero {
                return Err(Error::Diverges(format!("MvN kernel with d = {d} is not in L^1")));
            }
            Ok((m.powf(d + one) - (t + m).powf(d + one)) / ((d + one) * gamma(one + d)))
        }
    }
}
