//! Estimators used by the validation suite: sample ACF, log-log slopes,
//! ensemble cumulants and covariances with jackknife errors, and the
//! two-sample Kolmogorov–Smirnov test.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::levy::SamplePath;
use crate::real::Real;

/// Biased (1/n) sample autocovariance at lags 0..=max_lag.
pub fn sample_autocovariance<T: Real>(series: &[T], max_lag: usize) -> Result<Vec<T>> {
    let n = series.len();
    if n <= 4 * max_lag || n < 2 {
        return Err(Error::SeriesTooShort { len: n, required: (4 * max_lag).max(1) });
    }
    let nf = T::of_usize(n);
    let mean = series.iter().copied().sum::<T>() / nf;
    let centred: Vec<T> = series.iter().map(|x| *x - mean).collect();
    Ok((0..=max_lag)
        .map(|k| centred.iter().zip(&centred[k..]).map(|(a, b)| *a * *b).sum::<T>() / nf)
        .collect())
}

/// Sample autocorrelation with biased normalisation; lag 0 is exactly 1.
pub fn sample_acf<T: Real>(series: &[T], max_lag: usize) -> Result<Vec<T>> {
    let acov = sample_autocovariance(series, max_lag)?;
    let c0 = acov[0];
    if !(c0 > T::zero()) {
        return Err(Error::ZeroVariance);
    }
    let mut out: Vec<T> = acov.iter().map(|c| *c / c0).collect();
    out[0] = T::one();
    Ok(out)
}

/// Least-squares slope of log y on log x with its standard error.
pub fn loglog_slope<T: Real>(x: &[T], y: &[T]) -> Result<(T, T)> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(format!("{} x values and {} y values", x.len(), y.len())));
    }
    if x.len() < 3 {
        return Err(Error::SeriesTooShort { len: x.len(), required: 2 });
    }
    if x.iter().chain(y).any(|v| !(*v > T::zero())) {
        return Err(Error::NonPositiveData);
    }
    let lx: Vec<T> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<T> = y.iter().map(|v| v.ln()).collect();
    let n = T::of_usize(lx.len());
    let mx = lx.iter().copied().sum::<T>() / n;
    let my = ly.iter().copied().sum::<T>() / n;
    let sxx: T = lx.iter().map(|a| (*a - mx) * (*a - mx)).sum();
    let sxy: T = lx.iter().zip(&ly).map(|(a, b)| (*a - mx) * (*b - my)).sum();
    if !(sxx > T::zero()) {
        return Err(Error::ZeroVariance);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: T = lx.iter().zip(&ly).map(|(a, b)| (*b - intercept - slope * *a).powi(2)).sum();
    let stderr = (rss / (n - T::of(2.0)) / sxx).sqrt();
    Ok((slope, stderr))
}

/// Estimate with jackknife standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate<T> {
    pub value: T,
    pub stderr: T,
}

fn jackknife_se<T: Real>(leave_one_out: impl Iterator<Item = T>, n: usize) -> T {
    let vals: Vec<T> = leave_one_out.collect();
    let nf = T::of_usize(n);
    let mean = vals.iter().copied().sum::<T>() / nf;
    let ss: T = vals.iter().map(|v| (*v - mean) * (*v - mean)).sum();
    ((nf - T::one()) / nf * ss).sqrt()
}

pub fn mean_estimate<T: Real>(x: &[T]) -> Result<Estimate<T>> {
    let n = x.len();
    if n < 2 {
        return Err(Error::SeriesTooShort { len: n, required: 1 });
    }
    let nf = T::of_usize(n);
    let mean = x.iter().copied().sum::<T>() / nf;
    let var = x.iter().map(|v| (*v - mean) * (*v - mean)).sum::<T>() / (nf - T::one());
    Ok(Estimate { value: mean, stderr: (var / nf).sqrt() })
}

/// Unbiased sample covariance of paired samples with an O(n) jackknife.
pub fn covariance_estimate<T: Real>(x: &[T], y: &[T]) -> Result<Estimate<T>> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(format!("{} vs {} samples", x.len(), y.len())));
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::SeriesTooShort { len: n, required: 2 });
    }
    let nf = T::of_usize(n);
    let mx = x.iter().copied().sum::<T>() / nf;
    let my = y.iter().copied().sum::<T>() / nf;
    let dx: Vec<T> = x.iter().map(|v| *v - mx).collect();
    let dy: Vec<T> = y.iter().map(|v| *v - my).collect();
    let sx: T = dx.iter().copied().sum();
    let sy: T = dy.iter().copied().sum();
    let sxy: T = dx.iter().zip(&dy).map(|(a, b)| *a * *b).sum();
    let cov = |sx: T, sy: T, sxy: T, m: T| (sxy - sx * sy / m) / (m - T::one());
    let value = cov(sx, sy, sxy, nf);
    let m = nf - T::one();
    let stderr = jackknife_se(
        dx.iter().zip(&dy).map(|(a, b)| cov(sx - *a, sy - *b, sxy - *a * *b, m)),
        n,
    );
    Ok(Estimate { value, stderr })
}

pub fn variance_estimate<T: Real>(x: &[T]) -> Result<Estimate<T>> {
    covariance_estimate(x, x)
}

/// k-statistic (unbiased cumulant estimate) of order 1..=4 with jackknife error.
pub fn cumulant_estimate<T: Real>(x: &[T], k: u32) -> Result<Estimate<T>> {
    let n = x.len();
    if !(1..=4).contains(&k) {
        return Err(Error::CumulantUnavailable(k));
    }
    if n < 6 {
        return Err(Error::SeriesTooShort { len: n, required: 5 });
    }
    let nf = T::of_usize(n);
    let shift = x.iter().copied().sum::<T>() / nf;
    let c: Vec<T> = x.iter().map(|v| *v - shift).collect();
    let mut p = [T::zero(); 5];
    for v in &c {
        let mut w = T::one();
        for pk in p.iter_mut() {
            *pk += w;
            w *= *v;
        }
    }
    let kstat = |p: &[T; 5]| -> T {
        let m = p[0];
        let mean = p[1] / m;
        // central moments of the sample about its own mean
        let m2 = p[2] / m - mean * mean;
        let m3 = p[3] / m - T::of(3.0) * mean * p[2] / m + T::of(2.0) * mean.powi(3);
        let m4 = p[4] / m - T::of(4.0) * mean * p[3] / m + T::of(6.0) * mean * mean * p[2] / m
            - T::of(3.0) * mean.powi(4);
        let one = T::one();
        let two = T::of(2.0);
        let three = T::of(3.0);
        match k {
            1 => mean + shift,
            2 => m * m2 / (m - one),
            3 => m * m * m3 / ((m - one) * (m - two)),
            _ => m * m * ((m + one) * m4 - three * (m - one) * m2 * m2) / ((m - one) * (m - two) * (m - three)),
        }
    };
    let value = kstat(&p);
    let stderr = jackknife_se(
        c.iter().map(|v| {
            let mut q = p;
            let mut w = T::one();
            for qk in q.iter_mut() {
                *qk -= w;
                w *= *v;
            }
            kstat(&q)
        }),
        n,
    );
    Ok(Estimate { value, stderr })
}

fn grid_index<T: Real>(path: &SamplePath<T>, time: T) -> Result<usize> {
    let g = path.grid;
    let x = (time - g.t_start) / g.step;
    let k = x.round();
    if (x - k).abs() > T::of(1e-6) || k < T::zero() || k > T::of_usize(g.n_points - 1) {
        return Err(Error::OffGridLag(format!("time {time} is not a point of the grid [{}, {}]", g.t_start, g.t_end)));
    }
    Ok(k.to_usize().unwrap_or(0))
}

/// Across-path covariance of S_{s+r} − S_s and S_{s+(h+1)r} − S_{s+hr}.
pub fn increment_cov_mc<T: Real>(paths: &[SamplePath<T>], s: T, r: T, h: T) -> Result<Estimate<T>> {
    let first = paths.first().ok_or(Error::InsufficientEnsemble { got: 0, required: 3 })?;
    let i0 = grid_index(first, s)?;
    let i1 = grid_index(first, s + r)?;
    let j0 = grid_index(first, s + h * r)?;
    let j1 = grid_index(first, s + (h + T::one()) * r)?;
    let mut x = Vec::with_capacity(paths.len());
    let mut y = Vec::with_capacity(paths.len());
    for p in paths {
        if p.grid != first.grid {
            return Err(Error::LengthMismatch("paths do not share a grid".into()));
        }
        x.push(p.values[i1] - p.values[i0]);
        y.push(p.values[j1] - p.values[j0]);
    }
    covariance_estimate(&x, &y)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsResult<T> {
    pub statistic: T,
    pub critical: T,
    pub p_value: T,
    pub level: T,
    pub n: usize,
    pub m: usize,
    pub pass: bool,
}

pub const KS_MIN_SAMPLE: usize = 1000;

/// Asymptotic Kolmogorov survival function Q(λ) = 2Σ(−1)^{k−1}e^{−2k²λ²}.
pub fn kolmogorov_q<T: Real>(lambda: T) -> T {
    if lambda < T::of(0.2) {
        return T::one();
    }
    let mut sum = T::zero();
    let mut sign = T::one();
    for k in 1..=100 {
        let kf = T::of_usize(k);
        let term = (T::of(-2.0) * kf * kf * lambda * lambda).exp();
        sum += sign * term;
        if term < T::of(1e-18) {
            break;
        }
        sign = -sign;
    }
    (T::of(2.0) * sum).max(T::zero()).min(T::one())
}

/// Two-sample KS test at significance `level` with asymptotic critical value
/// c(α)·√((n+m)/(nm)), c(α) = √(−½ ln(α/2)).
pub fn ks_two_sample<T: Real>(a: &[T], b: &[T], level: T) -> Result<KsResult<T>> {
    let (n, m) = (a.len(), b.len());
    if n.min(m) < KS_MIN_SAMPLE {
        return Err(Error::InsufficientEnsemble { got: n.min(m), required: KS_MIN_SAMPLE });
    }
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    let cmp = |p: &T, q: &T| p.partial_cmp(q).unwrap_or(std::cmp::Ordering::Equal);
    xs.sort_by(cmp);
    ys.sort_by(cmp);
    let (nf, mf) = (T::of_usize(n), T::of_usize(m));
    let (mut i, mut j) = (0, 0);
    let mut d = T::zero();
    while i < n && j < m {
        let v = if xs[i] <= ys[j] { xs[i] } else { ys[j] };
        while i < n && xs[i] <= v {
            i += 1;
        }
        while j < m && ys[j] <= v {
            j += 1;
        }
        let gap = (T::of_usize(i) / nf - T::of_usize(j) / mf).abs();
        d = d.max(gap);
    }
    let ne = nf * mf / (nf + mf);
    let sq = ne.sqrt();
    let p_value = kolmogorov_q((sq + T::of(0.12) + T::of(0.11) / sq) * d);
    let critical = (T::of(-0.5) * (level / T::of(2.0)).ln()).sqrt() / sq;
    Ok(KsResult { statistic: d, critical, p_value, level, n, m, pass: d <= critical })
}
