//! Second-order structure of the modified-MvN fractional subordinator.
//!
//! With I(t) = ∫ f_{a,d}(t, u)² du,
//!
//! I(t) = C + a^{2d} t − 2a^d (t+a)^{d+1}/(d+1) + (t+a)^{2d+1}/(2d+1) + c(t)·t^{2d+1},
//!
//! where C = a^{2d+1}(2/(d+1) − 1/(2d+1)) and
//! c(t) = ∫_{−∞}^{−a/t} [(1−y)^d − (−y)^d]² dy.
//!
//! Increments of length r at lag h·r have covariance
//! γ_r(h) = ½·Var(S₁)·[I((h+1)r) + I((h−1)r) − 2I(hr)].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::pow_diff;
use crate::quadrature::{integrate, Segment, Tolerance};
use crate::real::Real;
use crate::special::gamma;

/// Which variance multiplies the large-lag asymptote.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceConvention {
    /// Var(S₁) of the driver.
    #[default]
    Driver,
    /// Var(S^{a,d}₁) = Var(S₁)·I(1).
    Fractional,
}

impl std::str::FromStr for VarianceConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "driver" => Ok(Self::Driver),
            "fractional" => Ok(Self::Fractional),
            other => Err(Error::Config(format!("unknown variance convention `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CovarianceReport<T> {
    pub r: T,
    pub h: T,
    pub gamma_exact: T,
    pub gamma_asymptotic: T,
    #[serde(rename = "C")]
    pub big_c: T,
    /// c(t) at t = (h−1)r, hr, (h+1)r (zero where t = 0).
    pub c_of_t: [T; 3],
    /// I(t) at the same three points.
    pub f_squared: [T; 3],
    pub var_s1: T,
    pub convention: VarianceConvention,
}

fn check<T: Real>(a: T, d: T) -> Result<()> {
    if a > T::zero() && a.is_finite() && d > T::of(-0.5) && d < T::zero() {
        Ok(())
    } else {
        Err(Error::InvalidKernel(format!("need a > 0 and d in (-0.5, 0), got a = {a}, d = {d}")))
    }
}

pub fn big_c<T: Real>(a: T, d: T) -> T {
    let one = T::one();
    let two = T::of(2.0);
    a.powf(two * d + one) * (two / (d + one) - one / (two * d + one))
}

/// lim_{t→∞} c(t) = ∫_{−∞}^0 [(1−y)^d − (−y)^d]² dy
///            = Γ(d+1)² / (Γ(2d+2)·sin(π(d+½))) − 1/(2d+1).
pub fn c_limit<T: Real>(d: T) -> T {
    let one = T::one();
    let two = T::of(2.0);
    let g = gamma(d + one);
    g * g / (gamma(two * d + two) * (T::PI() * (d + T::of(0.5))).sin()) - one / (two * d + one)
}

fn tight<T: Real>() -> Tolerance<T> {
    Tolerance { abs: T::of(1e-300).max(T::min_positive_value()), rel: T::of(1e-13), max_panels: 4000 }
}

/// ∫_{−ε}^0 [(1−y)^d − (−y)^d]² dy after y = −v², which leaves the endpoint
/// behaviour 2v^{4d+1}.
fn near_origin<T: Real>(d: T, eps: T) -> Result<T> {
    let one = T::one();
    let two = T::of(2.0);
    let seg = Segment::power_left(
        move |_v: T, gap: T, _r: T| {
            let w = gap * gap;
            let x = (one + w).powf(d) - w.powf(d);
            two * gap * x * x
        },
        T::zero(),
        eps.sqrt(),
        T::of(4.0) * d + one,
    );
    Ok(integrate(&[seg], tight())?.value)
}

/// ∫_{−∞}^{−ε} [(1−y)^d − (−y)^d]² dy by direct quadrature of the tail.
pub fn c_direct<T: Real>(d: T, eps: T) -> Result<T> {
    let one = T::one();
    let alpha = T::of(2.0) * (one - d);
    let seg = Segment::lower_tail(
        move |_s: T, _l: T, r: T| {
            let x = pow_diff(eps + r, one, d);
            x * x
        },
        -eps,
        alpha,
        eps.max(one),
    );
    Ok(integrate(&[seg], tight())?.value)
}

/// c(t) = ∫_{−∞}^{−a/t} [(1−y)^d − (−y)^d]² dy.
///
/// Evaluated as c(∞) − ∫_{−a/t}^0 […]² dy for a/t < 1 and by direct tail
/// quadrature otherwise.
pub fn c_integral<T: Real>(a: T, d: T, t: T) -> Result<T> {
    check(a, d)?;
    if !(t > T::zero()) {
        return Err(Error::InvalidKernel(format!("c(t) needs t > 0, got {t}")));
    }
    let eps = a / t;
    if eps >= T::one() {
        c_direct(d, eps)
    } else {
        Ok(c_limit(d) - near_origin(d, eps)?)
    }
}

/// I(t) − C − a^{2d}·t, the part of ∫f² that survives second differences.
fn nonlinear_part<T: Real>(a: T, d: T, t: T) -> Result<(T, T)> {
    let one = T::one();
    let two = T::of(2.0);
    if t == T::zero() {
        return Ok((-big_c(a, d), T::zero()));
    }
    let c = c_integral(a, d, t)?;
    let v = -two * a.powf(d) * (t + a).powf(d + one) / (d + one)
        + (t + a).powf(two * d + one) / (two * d + one)
        + c * t.powf(two * d + one);
    Ok((v, c))
}

/// ∫ f_{a,d}(t, u)² du in closed form (t ≥ 0).
pub fn closed_form_f_squared<T: Real>(a: T, d: T, t: T) -> Result<T> {
    check(a, d)?;
    if t < T::zero() {
        return Err(Error::InvalidKernel(format!("closed form needs t >= 0, got {t}")));
    }
    if t == T::zero() {
        return Ok(T::zero());
    }
    let (v, _) = nonlinear_part(a, d, t)?;
    Ok(big_c(a, d) + a.powf(T::of(2.0) * d) * t + v)
}

pub fn increment_cov_exact<T: Real>(a: T, d: T, var_s1: T, r: T, h: T) -> Result<T> {
    Ok(report(a, d, var_s1, r, h, VarianceConvention::Driver)?.gamma_exact)
}

/// Var·|d|·a^d·r²·(hr + a)^{d−1}.
pub fn increment_cov_asymptotic<T: Real>(
    a: T,
    d: T,
    var_s1: T,
    r: T,
    h: T,
    convention: VarianceConvention,
) -> Result<T> {
    check(a, d)?;
    let var = match convention {
        VarianceConvention::Driver => var_s1,
        VarianceConvention::Fractional => var_s1 * closed_form_f_squared(a, d, T::one())?,
    };
    Ok(var * d.abs() * a.powf(d) * r * r * (h * r + a).powf(d - T::one()))
}

pub fn report<T: Real>(
    a: T,
    d: T,
    var_s1: T,
    r: T,
    h: T,
    convention: VarianceConvention,
) -> Result<CovarianceReport<T>> {
    check(a, d)?;
    if !(h >= T::one()) {
        return Err(Error::LagBelowOne(h.to_f64_lossy()));
    }
    if !(r > T::zero()) {
        return Err(Error::InvalidKernel(format!("increment length must be positive, got {r}")));
    }
    let one = T::one();
    let times = [(h - one) * r, h * r, (h + one) * r];
    let mut parts = [T::zero(); 3];
    let mut cs = [T::zero(); 3];
    let mut full = [T::zero(); 3];
    for i in 0..3 {
        let (v, c) = nonlinear_part(a, d, times[i])?;
        parts[i] = v;
        cs[i] = c;
        full[i] = if times[i] == T::zero() {
            T::zero()
        } else {
            big_c(a, d) + a.powf(T::of(2.0) * d) * times[i] + v
        };
    }
    let second = parts[2] + parts[0] - T::of(2.0) * parts[1];
    let gamma_exact = T::of(0.5) * var_s1 * second;
    Ok(CovarianceReport {
        r,
        h,
        gamma_exact,
        gamma_asymptotic: increment_cov_asymptotic(a, d, var_s1, r, h, convention)?,
        big_c: big_c(a, d),
        c_of_t: cs,
        f_squared: full,
        var_s1,
        convention,
    })
}
