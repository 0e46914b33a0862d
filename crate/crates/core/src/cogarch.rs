//! COGARCH(1,1), FICOGARCH(1,d,1) and the FICOGARCH(p,d,q) state-space model.
//!
//! For FICOGARCH the auxiliary process is X_t = β₁t − α₁S^{a,d}_t and the
//! squared volatility is advanced cell by cell with
//!
//! σ²_{i+1} = e^{X_i−X_{i+1}}σ²_i + α₀β₁·½Δ·(e^{X_i−X_{i+1}} + 1),
//!
//! i.e. the explicit solution with the trapezoidal rule for ∫e^{X_s}ds.
//! Starting the same recursion from σ² = 0 at −H yields the stationary
//! initial value α₀β₁∫_{−H}^0 e^{X_s}ds.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fracsub::{frac_from_jumps, layout, Driver, FracSubConfig};
use crate::kernels::KernelFamily;
use crate::levy::{simulate_levy, two_sided_jumps, Jump, LevyRealization, LevySpec, PathGrid, SamplePath};
use crate::real::Real;
use crate::seed::{stream_rng, Stream};
use crate::stats::{ks_two_sample, mean_estimate, variance_estimate, Estimate, KsResult};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialVariance<T> {
    Value(T),
    /// α₀β₁∫_{−H}^0 e^{X_s}ds on the two-sided extension, H the past horizon.
    Stationary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FicogarchParams<T> {
    pub alpha0: T,
    pub alpha1: T,
    pub beta1: T,
    pub sigma0_sq: InitialVariance<T>,
    /// Initial price G₀.
    #[serde(default)]
    pub g0: T,
}

impl<T: Real> FicogarchParams<T> {
    pub fn new(alpha0: T, alpha1: T, beta1: T, sigma0_sq: InitialVariance<T>) -> Self {
        Self { alpha0, alpha1, beta1, sigma0_sq, g0: T::zero() }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("alpha0", self.alpha0), ("alpha1", self.alpha1), ("beta1", self.beta1)] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} must be positive, got {v}")));
            }
        }
        if let InitialVariance::Value(v) = self.sigma0_sq {
            if !(v > T::zero()) {
                return Err(Error::NonPositiveInitial(v.to_f64_lossy()));
            }
        }
        Ok(())
    }

    /// κ = β₁ − α₁E(S₁)a^d, the mean decay rate of e^{X} into the past.
    pub fn kappa(&self, cfg: &FracSubConfig<T>) -> T {
        self.beta1 - self.alpha1 * cfg.driver.mean() * cfg.kernel.a.powf(cfg.kernel.d)
    }
}

/// Default burn-in 5/β₁ plus the past horizon.
pub fn default_burn_in<T: Real>(beta1: T, past_horizon: T) -> T {
    T::of(5.0) / beta1 + past_horizon
}

/// Order-(p,q) parameters: σ²_t = α₀ + aᵀY_t with
/// dY = B·Y dt + 1_q(α₀ + aᵀY) dS^{a,d}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdqParams<T> {
    pub p: usize,
    pub q: usize,
    pub alpha0: T,
    /// α₁…α_q.
    pub a_vec: Vec<T>,
    /// β₁…β_q.
    pub b_vec: Vec<T>,
    /// Y₀; zero when absent.
    #[serde(default)]
    pub y0: Option<Vec<T>>,
    #[serde(default)]
    pub g0: T,
}

impl<T: Real> PdqParams<T> {
    pub fn validate(&self) -> Result<()> {
        let (p, q) = (self.p, self.q);
        let bad = |m: String| Err(Error::OrderConstraintViolated(m));
        if p < 1 || q < p {
            return bad(format!("need q >= p >= 1, got p = {p}, q = {q}"));
        }
        if self.a_vec.len() != q || self.b_vec.len() != q {
            return bad(format!("a and b must have q = {q} entries"));
        }
        if self.a_vec[p - 1] == T::zero() {
            return bad(format!("alpha_{p} must be nonzero"));
        }
        if self.a_vec[p..].iter().any(|v| *v != T::zero()) {
            return bad(format!("alpha_j must vanish for j > p = {p}"));
        }
        if self.b_vec[q - 1] == T::zero() {
            return bad(format!("beta_{q} must be nonzero"));
        }
        if let Some(y0) = &self.y0 {
            if y0.len() != q {
                return bad(format!("initial state must have q = {q} entries"));
            }
        }
        if !(self.alpha0 > T::zero()) {
            return Err(Error::InvalidParams(format!("alpha0 must be positive, got {}", self.alpha0)));
        }
        Ok(())
    }

    /// Companion matrix: ones on the superdiagonal, last row (−β_q, …, −β₁).
    pub fn companion(&self) -> Vec<Vec<T>> {
        let q = self.q;
        let mut b = vec![vec![T::zero(); q]; q];
        for (i, row) in b.iter_mut().enumerate().take(q - 1) {
            row[i + 1] = T::one();
        }
        for j in 0..q {
            b[q - 1][j] = -self.b_vec[q - 1 - j];
        }
        b
    }

    /// The (1,1) model as a state-space model with Y₀ = (σ₀² − α₀)/α₁.
    pub fn from_order_one(params: &FicogarchParams<T>, sigma0_sq: T) -> Self {
        Self {
            p: 1,
            q: 1,
            alpha0: params.alpha0,
            a_vec: vec![params.alpha1],
            b_vec: vec![params.beta1],
            y0: Some(vec![(sigma0_sq - params.alpha0) / params.alpha1]),
            g0: params.g0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VolatilityPath<T> {
    pub grid: PathGrid<T>,
    pub sigma_sq: Vec<T>,
    /// Auxiliary process; absent for order (p,q).
    pub x: Option<Vec<T>>,
    pub g: Vec<T>,
    /// S^{a,d} for FICOGARCH, L for classic COGARCH.
    pub driver_path: SamplePath<T>,
    pub sigma0_sq: T,
    /// Extrapolated bound on the neglected ∫_{−∞}^{−H} part of σ₀².
    pub truncation_bound: Option<T>,
    /// Set when some σ² ≤ 0 occurred.
    pub nonpositive_variance: bool,
}

impl<T: Real> VolatilityPath<T> {
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,G,dG,sigma2,Sad,X")?;
        for i in 0..self.grid.n_points {
            let dg = if i == 0 { T::zero() } else { self.g[i] - self.g[i - 1] };
            let x = self.x.as_ref().map_or(T::nan(), |x| x[i]);
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                self.grid.time(i),
                self.g[i],
                dg,
                self.sigma_sq[i],
                self.driver_path.values[i],
                x
            )?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn sigma(&self) -> Vec<T> {
        self.sigma_sq.iter().map(|v| v.max(T::zero()).sqrt()).collect()
    }
}

fn require_origin_start<T: Real>(grid: &PathGrid<T>) -> Result<()> {
    grid.validate()?;
    if grid.t_start != T::zero() {
        return Err(Error::GridDegenerate(format!("volatility grids start at 0, got {}", grid.t_start)));
    }
    Ok(())
}

/// Adds σ_{t−}·ΔL over the grid: exact jump times, left-point σ for the
/// continuous part `cont` (one entry per cell).
fn price_path<T: Real>(grid: &PathGrid<T>, sigma_sq_at: impl Fn(usize, T) -> T, jumps: &[Jump<T>], cont: &[T], g0: T) -> Result<Vec<T>> {
    let n = grid.n_points;
    let mut dg = vec![T::zero(); n];
    for j in jumps.iter().filter(|j| j.time > grid.t_start && j.time <= grid.t_end) {
        let k = grid.snap(j.time)?;
        dg[k] += sigma_sq_at(k, j.time).max(T::zero()).sqrt() * j.size;
    }
    let mut g = Vec::with_capacity(n);
    let mut acc = g0;
    for i in 0..n {
        if i > 0 {
            acc += dg[i] + sigma_sq_at(i - 1, grid.time(i - 1)).max(T::zero()).sqrt() * cont[i - 1];
        }
        g.push(acc);
    }
    Ok(g)
}

fn continuous_increments<T: Real>(levy: &LevySpec<T>, grid: &PathGrid<T>, seed: u64) -> Vec<T> {
    let cells = grid.n_points - 1;
    let drift = levy.drift * grid.step;
    if levy.gaussian_var == T::zero() {
        return vec![drift; cells];
    }
    let mut rng = stream_rng(seed, Stream::PositiveDiffusion);
    let scale = (levy.gaussian_var * grid.step).sqrt();
    (0..cells).map(|_| drift + scale * T::standard_normal(&mut rng)).collect()
}

/// Classic COGARCH(1,1) driven by a fresh path of L on `grid`.
pub fn cogarch11<T: Real>(params: &FicogarchParams<T>, levy: &LevySpec<T>, grid: &PathGrid<T>, seed: u64) -> Result<VolatilityPath<T>> {
    params.validate()?;
    require_origin_start(grid)?;
    let real = simulate_levy(levy, grid, seed)?;
    cogarch11_from(params, &real)
}

/// Classic COGARCH(1,1) on a given realisation of L, evaluated exactly:
/// between jumps σ² relaxes to α₀ at rate β₁, at a jump it is multiplied
/// by 1 + α₁(ΔL)².
pub fn cogarch11_from<T: Real>(params: &FicogarchParams<T>, levy: &LevyRealization<T>) -> Result<VolatilityPath<T>> {
    params.validate()?;
    let grid = levy.path.grid;
    require_origin_start(&grid)?;
    let s0 = match params.sigma0_sq {
        InitialVariance::Value(v) => v,
        InitialVariance::Stationary => {
            return Err(Error::Config("stationary initialisation is available for FICOGARCH only".into()))
        }
    };
    let (a0, a1, b1) = (params.alpha0, params.alpha1, params.beta1);
    let n = grid.n_points;
    let mut cell_jumps: Vec<Vec<Jump<T>>> = vec![Vec::new(); n];
    for j in &levy.jumps {
        let k = grid.snap(j.time)?;
        if k > 0 {
            cell_jumps[k].push(*j);
        }
    }
    let relax = |s: T, dt: T| a0 + (s - a0) * (-b1 * dt.max(T::zero())).exp();
    let mut sigma_sq = vec![s0];
    let mut x = vec![T::zero()];
    let mut g = vec![params.g0];
    let (mut s, mut logsum, mut price) = (s0, T::zero(), params.g0);
    for i in 1..n {
        let (t0, t1) = (grid.time(i - 1), grid.time(i));
        let sigma_left = s.sqrt();
        let mut now = t0;
        let mut jump_total = T::zero();
        for j in &cell_jumps[i] {
            let tau = j.time.min(t1);
            s = relax(s, tau - now);
            now = tau;
            price += s.sqrt() * j.size;
            let factor = T::one() + a1 * j.size * j.size;
            s *= factor;
            logsum += factor.ln();
            jump_total += j.size;
        }
        s = relax(s, t1 - now);
        let cont = levy.path.values[i] - levy.path.values[i - 1] - jump_total;
        price += sigma_left * cont;
        sigma_sq.push(s);
        x.push(b1 * t1 - logsum);
        g.push(price);
    }
    Ok(VolatilityPath {
        grid,
        sigma_sq,
        x: Some(x),
        g,
        driver_path: levy.path.clone(),
        sigma0_sq: s0,
        truncation_bound: None,
        nonpositive_variance: false,
    })
}

/// Euler discretisation of dσ² = β₁(α₀ − σ²)dt + α₁σ²_{t−}d[L,L]^{(D)} on
/// the grid of `levy`.
pub fn cogarch11_euler<T: Real>(params: &FicogarchParams<T>, levy: &LevyRealization<T>) -> Result<Vec<T>> {
    params.validate()?;
    let grid = levy.path.grid;
    let s0 = match params.sigma0_sq {
        InitialVariance::Value(v) => v,
        InitialVariance::Stationary => return Err(Error::Config("stationary initialisation is available for FICOGARCH only".into())),
    };
    let mut qv = vec![T::zero(); grid.n_points];
    for j in &levy.jumps {
        qv[grid.snap(j.time)?] += j.size * j.size;
    }
    let mut out = vec![s0];
    let mut s = s0;
    for dq in qv.iter().skip(1) {
        s = s + params.beta1 * (params.alpha0 - s) * grid.step + params.alpha1 * s * *dq;
        out.push(s);
    }
    Ok(out)
}

fn check_ficogarch_config<T: Real>(cfg: &FracSubConfig<T>) -> Result<&LevySpec<T>> {
    if cfg.kernel.family != KernelFamily::ModifiedMvN {
        return Err(Error::InvalidKernel(format!("FICOGARCH uses the modified MvN kernel, got {}", cfg.kernel.family)));
    }
    match &cfg.driver {
        Driver::QuadraticVariation(l) => Ok(l),
        Driver::Subordinator(_) => Err(Error::Config("FICOGARCH is driven by the quadratic variation of L".into())),
    }
}

/// Configuration actually simulated: for stationary initialisation the grid
/// is extended back to −H, H the past horizon rounded down to the step.
/// Returns it with the index of t = 0.
pub fn volatility_config<T: Real>(sigma0: InitialVariance<T>, cfg: &FracSubConfig<T>) -> Result<(FracSubConfig<T>, usize)> {
    check_ficogarch_config(cfg)?;
    require_origin_start(&cfg.grid)?;
    match sigma0 {
        InitialVariance::Value(_) => Ok((*cfg, 0)),
        InitialVariance::Stationary => {
            let step = cfg.grid.step;
            let back = (cfg.past_horizon / step + T::of(1e-9)).floor().to_usize().unwrap_or(0);
            if back == 0 {
                return Err(Error::HorizonTooShort { horizon: cfg.past_horizon.to_f64_lossy(), required: step.to_f64_lossy() });
            }
            let mut ext = *cfg;
            ext.grid = PathGrid::new(-step * T::of_usize(back), step, back + cfg.grid.n_points)?;
            ext.grid.t_end = cfg.grid.t_end;
            Ok((ext, back))
        }
    }
}

/// Jump record of L covering everything `ficogarch_1d1_with_jumps` needs.
pub fn ficogarch_jumps<T: Real>(sigma0: InitialVariance<T>, cfg: &FracSubConfig<T>, seed: u64) -> Result<Vec<Jump<T>>> {
    let (vcfg, _) = volatility_config(sigma0, cfg)?;
    let ig = layout(&vcfg)?.integration;
    let law = &check_ficogarch_config(cfg)?.jump_law;
    Ok(two_sided_jumps(law, ig.t_start, ig.t_end, seed))
}

/// FICOGARCH(1,d,1) on the grid of `cfg` (which must start at 0).
pub fn ficogarch_1d1<T: Real>(params: &FicogarchParams<T>, cfg: &FracSubConfig<T>, seed: u64) -> Result<VolatilityPath<T>> {
    let jumps = ficogarch_jumps(params.sigma0_sq, cfg, seed)?;
    ficogarch_1d1_with_jumps(params, cfg, jumps, seed)
}

/// FICOGARCH(1,d,1) from a given jump record of L; `seed` drives only the
/// Brownian part of L in the price.
pub fn ficogarch_1d1_with_jumps<T: Real>(
    params: &FicogarchParams<T>,
    cfg: &FracSubConfig<T>,
    jumps: Vec<Jump<T>>,
    seed: u64,
) -> Result<VolatilityPath<T>> {
    params.validate()?;
    let levy = *check_ficogarch_config(cfg)?;
    let stationary = params.sigma0_sq == InitialVariance::Stationary;
    let kappa = params.kappa(cfg);
    if stationary && !(kappa > T::zero()) {
        return Err(Error::NonStationary(format!(
            "beta1 - alpha1 E(S_1) a^d = {kappa} must be positive"
        )));
    }
    let (vcfg, origin) = volatility_config(params.sigma0_sq, cfg)?;
    let real = frac_from_jumps(&vcfg, jumps)?;
    let full = &real.frac;
    let (a0, a1, b1) = (params.alpha0, params.alpha1, params.beta1);
    let xs: Vec<T> = (0..full.grid.n_points)
        .map(|i| b1 * full.grid.time(i) - a1 * full.values[i])
        .collect();
    let half_step = T::of(0.5) * full.grid.step;
    let advance = |s: T, i: usize| {
        let e = (xs[i] - xs[i + 1]).exp();
        e * s + a0 * b1 * half_step * (e + T::one())
    };
    let (s0, truncation_bound) = match params.sigma0_sq {
        InitialVariance::Value(v) => (v, None),
        InitialVariance::Stationary => {
            let s = (0..origin).fold(T::zero(), &advance);
            (s, Some(a0 * b1 * (xs[0] - xs[origin]).exp() / kappa))
        }
    };
    if !(s0 > T::zero()) {
        return Err(Error::NonPositiveInitial(s0.to_f64_lossy()));
    }
    let grid = cfg.grid;
    let mut sigma_sq = Vec::with_capacity(grid.n_points);
    sigma_sq.push(s0);
    for i in origin..full.grid.n_points - 1 {
        let next = advance(*sigma_sq.last().unwrap_or(&s0), i);
        sigma_sq.push(next);
    }
    let x: Vec<T> = xs[origin..].iter().map(|v| *v - xs[origin]).collect();
    let sad = SamplePath::new(grid, full.values[origin..].to_vec(), full.kind)?;
    let cont = continuous_increments(&levy, &grid, seed);
    let g = price_path(&grid, |i, t| interpolate(&grid, &sigma_sq, i, t), &real.levy_jumps, &cont, params.g0)?;
    let nonpositive_variance = sigma_sq.iter().any(|v| !(*v > T::zero()));
    Ok(VolatilityPath {
        grid,
        sigma_sq,
        x: Some(x),
        g,
        driver_path: sad,
        sigma0_sq: s0,
        truncation_bound,
        nonpositive_variance,
    })
}

/// Linear interpolation of grid values `v` at `t`, where `k` is the first
/// grid index at or after `t`.
fn interpolate<T: Real>(grid: &PathGrid<T>, v: &[T], k: usize, t: T) -> T {
    if k == 0 {
        return v[0];
    }
    let w = ((grid.time(k) - t) / grid.step).max(T::zero()).min(T::one());
    v[k] * (T::one() - w) + v[k - 1] * w
}

/// Euler scheme σ²_{i+1} = σ²_i − β₁(σ²_i − α₀)Δ + α₁σ²_iΔS^{a,d}_i on a
/// given S^{a,d} path.
pub fn ficogarch_1d1_euler<T: Real>(params: &FicogarchParams<T>, sad: &SamplePath<T>, sigma0_sq: T) -> Vec<T> {
    let dt = sad.grid.step;
    let mut out = Vec::with_capacity(sad.values.len());
    let mut s = sigma0_sq;
    out.push(s);
    for w in sad.values.windows(2) {
        s = s - params.beta1 * (s - params.alpha0) * dt + params.alpha1 * s * (w[1] - w[0]);
        out.push(s);
    }
    out
}

/// Per-cell residual σ²_{i+1} − σ²_i + β₁(σ²_i − α₀)Δ − α₁σ²_iΔS^{a,d}_i.
pub fn sde_residual<T: Real>(params: &FicogarchParams<T>, path: &VolatilityPath<T>) -> Vec<T> {
    let dt = path.grid.step;
    let s = &path.sigma_sq;
    let sad = &path.driver_path.values;
    (0..s.len() - 1)
        .map(|i| s[i + 1] - s[i] + params.beta1 * (s[i] - params.alpha0) * dt - params.alpha1 * s[i] * (sad[i + 1] - sad[i]))
        .collect()
}

/// FICOGARCH(p,d,q) by the Euler state recursion.
pub fn ficogarch_pdq<T: Real>(params: &PdqParams<T>, cfg: &FracSubConfig<T>, seed: u64) -> Result<VolatilityPath<T>> {
    let jumps = ficogarch_jumps(InitialVariance::Value(T::one()), cfg, seed)?;
    ficogarch_pdq_with_jumps(params, cfg, jumps, seed)
}

pub fn ficogarch_pdq_with_jumps<T: Real>(
    params: &PdqParams<T>,
    cfg: &FracSubConfig<T>,
    jumps: Vec<Jump<T>>,
    seed: u64,
) -> Result<VolatilityPath<T>> {
    params.validate()?;
    let levy = *check_ficogarch_config(cfg)?;
    require_origin_start(&cfg.grid)?;
    let real = frac_from_jumps(cfg, jumps)?;
    let sad = real.frac;
    let grid = cfg.grid;
    let q = params.q;
    let b = params.companion();
    let dt = grid.step;
    let mut y = params.y0.clone().unwrap_or_else(|| vec![T::zero(); q]);
    let level = |y: &[T]| params.alpha0 + params.a_vec.iter().zip(y).map(|(a, v)| *a * *v).sum::<T>();
    let mut sigma_sq = Vec::with_capacity(grid.n_points);
    sigma_sq.push(level(&y));
    for w in sad.values.windows(2) {
        let shock = level(&y) * (w[1] - w[0]);
        let by: Vec<T> = b.iter().map(|row| row.iter().zip(&y).map(|(m, v)| *m * *v).sum()).collect();
        for (yi, bi) in y.iter_mut().zip(by) {
            *yi += bi * dt + shock;
        }
        sigma_sq.push(level(&y));
    }
    let s0 = sigma_sq[0];
    let cont = continuous_increments(&levy, &grid, seed);
    let g = price_path(&grid, |i, t| interpolate(&grid, &sigma_sq, i, t), &real.levy_jumps, &cont, params.g0)?;
    let nonpositive_variance = sigma_sq.iter().any(|v| !(*v > T::zero()));
    Ok(VolatilityPath {
        grid,
        sigma_sq,
        x: None,
        g,
        driver_path: sad,
        sigma0_sq: s0,
        truncation_bound: None,
        nonpositive_variance,
    })
}

/// Two-sample comparison of an ensemble quantity at two times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StationarityReport<T> {
    pub t1: T,
    pub t2: T,
    pub ks: KsResult<T>,
    pub mean: [Estimate<T>; 2],
    pub variance: [Estimate<T>; 2],
    /// (m₂ − m₁)/√(se₁² + se₂²) for the mean and the variance.
    pub mean_z: T,
    pub variance_z: T,
    pub pass: bool,
}

fn on_grid_index<T: Real>(grid: &PathGrid<T>, t: T) -> Result<usize> {
    let k = grid.snap(t).map_err(|_| Error::OffGridLag(format!("time {t} is outside the grid")))?;
    if (grid.time(k) - t).abs() > T::of(1e-6) * grid.step {
        return Err(Error::OffGridLag(format!("time {t} is not a grid point")));
    }
    Ok(k)
}

fn compare<T: Real>(a: &[T], b: &[T], t1: T, t2: T, level: T) -> Result<StationarityReport<T>> {
    let ks = ks_two_sample(a, b, level)?;
    let mean = [mean_estimate(a)?, mean_estimate(b)?];
    let variance = [variance_estimate(a)?, variance_estimate(b)?];
    let z = |e: &[Estimate<T>; 2]| {
        let se = (e[0].stderr.powi(2) + e[1].stderr.powi(2)).sqrt();
        if se > T::zero() {
            (e[1].value - e[0].value) / se
        } else {
            T::zero()
        }
    };
    Ok(StationarityReport { t1, t2, mean_z: z(&mean), variance_z: z(&variance), ks, mean, variance, pass: ks.pass })
}

fn check_times<T: Real>(paths: &[VolatilityPath<T>], times: &[T], burn_in: T) -> Result<PathGrid<T>> {
    if paths.len() < crate::stats::KS_MIN_SAMPLE {
        return Err(Error::InsufficientEnsemble { got: paths.len(), required: crate::stats::KS_MIN_SAMPLE });
    }
    for t in times {
        if *t < burn_in {
            return Err(Error::BeforeBurnIn { time: t.to_f64_lossy(), burn_in: burn_in.to_f64_lossy() });
        }
    }
    let grid = paths[0].grid;
    if paths.iter().any(|p| p.grid != grid) {
        return Err(Error::LengthMismatch("paths do not share a grid".into()));
    }
    Ok(grid)
}

/// KS and moment comparison of {σ²_{t1}} and {σ²_{t2}} across the ensemble.
pub fn stationary_check<T: Real>(paths: &[VolatilityPath<T>], t1: T, t2: T, burn_in: T, level: T) -> Result<StationarityReport<T>> {
    let grid = check_times(paths, &[t1, t2], burn_in)?;
    let (i1, i2) = (on_grid_index(&grid, t1)?, on_grid_index(&grid, t2)?);
    let a: Vec<T> = paths.iter().map(|p| p.sigma_sq[i1]).collect();
    let b: Vec<T> = paths.iter().map(|p| p.sigma_sq[i2]).collect();
    compare(&a, &b, t1, t2, level)
}

/// The same comparison for price increments G_{t+window} − G_t.
pub fn increment_stationarity_check<T: Real>(
    paths: &[VolatilityPath<T>],
    t1: T,
    t2: T,
    window: T,
    burn_in: T,
    level: T,
) -> Result<StationarityReport<T>> {
    let grid = check_times(paths, &[t1, t2], burn_in)?;
    let idx = |t: T| -> Result<(usize, usize)> { Ok((on_grid_index(&grid, t)?, on_grid_index(&grid, t + window)?)) };
    let ((a0, a1), (b0, b1)) = (idx(t1)?, idx(t2)?);
    let a: Vec<T> = paths.iter().map(|p| p.g[a1] - p.g[a0]).collect();
    let b: Vec<T> = paths.iter().map(|p| p.g[b1] - p.g[b0]).collect();
    compare(&a, &b, t1, t2, level)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::KernelSpec;
    use crate::levy::{JumpSize, PathKind};

    fn reference(d: f64) -> (FicogarchParams<f64>, FracSubConfig<f64>) {
        let params = FicogarchParams::new(0.0195, 0.0105, 0.0513, InitialVariance::Stationary);
        let driver = Driver::QuadraticVariation(LevySpec::compound_poisson(5.0, JumpSize::Normal { mean: 0.0, var: 0.5 }));
        let grid = PathGrid::span(0.0, 20.0, 0.1).unwrap();
        (params, FracSubConfig::new(KernelSpec::modified_mvn(1.0, d).unwrap(), driver, grid))
    }

    fn no_jump_cfg() -> FracSubConfig<f64> {
        let driver = Driver::QuadraticVariation(LevySpec::drift(0.0));
        FracSubConfig::new(KernelSpec::modified_mvn(1.0, -0.3).unwrap(), driver, PathGrid::span(0.0, 10.0, 0.05).unwrap())
    }

    #[test]
    fn classic_without_jumps_relaxes_to_alpha0() {
        let p = FicogarchParams::<f64>::new(0.5, 0.1, 0.8, InitialVariance::Value(2.0));
        let grid = PathGrid::<f64>::span(0.0, 5.0, 0.1).unwrap();
        let v = cogarch11(&p, &LevySpec::drift(0.0), &grid, 1).unwrap();
        for (i, s) in v.sigma_sq.iter().enumerate() {
            let t = grid.time(i);
            assert!((s - (2.0 * (-0.8 * t).exp() + 0.5 * (1.0 - (-0.8 * t).exp()))).abs() < 1e-13);
        }
    }

    #[test]
    fn classic_single_jump() {
        let p = FicogarchParams::<f64>::new(0.5, 0.1, 0.8, InitialVariance::Value(0.5));
        let grid = PathGrid::<f64>::span(0.0, 2.0, 0.5).unwrap();
        let jumps = vec![Jump { time: 1.0, size: 2.0 }];
        let values = vec![0.0, 0.0, 2.0, 2.0, 2.0];
        let real = LevyRealization { path: SamplePath::new(grid, values, PathKind::Cadlag).unwrap(), jumps };
        let v = cogarch11_from(&p, &real).unwrap();
        assert!((v.sigma_sq[1] - 0.5).abs() < 1e-14);
        assert!((v.sigma_sq[2] - 0.5 * 1.4).abs() < 1e-14);
        let x = v.x.unwrap();
        assert!((x[2] - (0.8 - 1.4f64.ln())).abs() < 1e-14);
        assert!((v.g[2] - 0.5f64.sqrt() * 2.0).abs() < 1e-14);
    }

    #[test]
    fn classic_rejects_bad_initial_value() {
        let p = FicogarchParams::<f64>::new(0.5, 0.1, 0.8, InitialVariance::Value(0.0));
        let grid = PathGrid::span(0.0, 1.0, 0.5).unwrap();
        assert_eq!(cogarch11(&p, &LevySpec::drift(0.0), &grid, 1).unwrap_err(), Error::NonPositiveInitial(0.0));
    }

    #[test]
    fn ficogarch_without_jumps() {
        let cfg = no_jump_cfg();
        let p = FicogarchParams::new(0.3, 0.05, 0.6, InitialVariance::Value(1.5));
        let v = ficogarch_1d1(&p, &cfg, 3).unwrap();
        let x = v.x.as_ref().unwrap();
        for i in 0..cfg.grid.n_points {
            let t = cfg.grid.time(i);
            assert_eq!(v.driver_path.values[i], 0.0);
            assert!((x[i] - 0.6 * t).abs() < 1e-12);
            let exact = 1.5 * (-0.6 * t).exp() + 0.3 * (1.0 - (-0.6 * t).exp());
            assert!((v.sigma_sq[i] - exact).abs() < 1e-4 * exact, "t = {t}");
        }
    }

    #[test]
    fn stationary_init_without_jumps() {
        let cfg = no_jump_cfg();
        let p = FicogarchParams::new(0.3, 0.05, 0.6, InitialVariance::Stationary);
        let v = ficogarch_1d1(&p, &cfg, 3).unwrap();
        // α₀(1 − e^{−β₁H}) with H = 200
        assert!((v.sigma0_sq - 0.3).abs() < 1e-4);
        assert!(v.truncation_bound.unwrap() < 1e-40);
        assert!(v.sigma_sq.iter().all(|s| (s - 0.3).abs() < 1e-4));
    }

    #[test]
    fn reference_paths_are_positive_and_reproducible() {
        let (p, cfg) = reference(-0.4);
        let a = ficogarch_1d1(&p, &cfg, 11).unwrap();
        let b = ficogarch_1d1(&p, &cfg, 11).unwrap();
        assert_eq!(a, b);
        assert!(a.sigma_sq.iter().all(|s| *s > 0.0));
        assert_eq!(a.x.as_ref().unwrap()[0], 0.0);
        assert_eq!(a.g[0], 0.0);
        assert!(a.truncation_bound.unwrap() > 0.0);
        assert_eq!(a.to_csv().lines().count(), cfg.grid.n_points + 1);
    }

    #[test]
    fn nonstationary_parameters_are_rejected() {
        let (mut p, cfg) = reference(-0.4);
        p.alpha1 = 0.1;
        assert!(matches!(ficogarch_1d1(&p, &cfg, 1), Err(Error::NonStationary(_))));
    }

    #[test]
    fn ficogarch_needs_quadratic_variation_driver() {
        let (p, mut cfg) = reference(-0.4);
        cfg.driver = Driver::Subordinator(LevySpec::drift(1.0));
        assert!(matches!(ficogarch_1d1(&p, &cfg, 1), Err(Error::Config(_))));
    }

    #[test]
    fn pdq_order_constraints() {
        let mut p = PdqParams { p: 1, q: 2, alpha0: 0.1, a_vec: vec![0.2, 0.0], b_vec: vec![0.5, 0.3], y0: None, g0: 0.0 };
        assert!(p.validate().is_ok());
        p.a_vec[1] = 0.1;
        assert!(matches!(p.validate(), Err(Error::OrderConstraintViolated(_))));
        p.a_vec = vec![0.2, 0.0];
        p.b_vec[1] = 0.0;
        assert!(matches!(p.validate(), Err(Error::OrderConstraintViolated(_))));
        p.b_vec[1] = 0.3;
        p.p = 3;
        assert!(matches!(p.validate(), Err(Error::OrderConstraintViolated(_))));
    }

    #[test]
    fn companion_layout() {
        let p = PdqParams { p: 1, q: 3, alpha0: 0.1, a_vec: vec![1.0, 0.0, 0.0], b_vec: vec![1.0, 2.0, 3.0], y0: None, g0: 0.0 };
        let b = p.companion();
        assert_eq!(b[0], vec![0.0, 1.0, 0.0]);
        assert_eq!(b[1], vec![0.0, 0.0, 1.0]);
        assert_eq!(b[2], vec![-3.0, -2.0, -1.0]);
    }

    #[test]
    fn pdq_linear_decay_matches_matrix_exponential() {
        // eigenvalues −1 and −2: y'' + 3y' + 2y = 0
        let cfg = FracSubConfig {
            grid: PathGrid::span(0.0, 3.0, 1e-4).unwrap(),
            ..no_jump_cfg()
        };
        let p = PdqParams { p: 1, q: 2, alpha0: 0.1, a_vec: vec![1.0, 0.0], b_vec: vec![3.0, 2.0], y0: Some(vec![1.0, 0.0]), g0: 0.0 };
        let v = ficogarch_pdq(&p, &cfg, 1).unwrap();
        let n = cfg.grid.n_points - 1;
        let t: f64 = cfg.grid.time(n);
        let y1 = 2.0 * (-t).exp() - (-2.0 * t).exp();
        assert!((v.sigma_sq[n] - 0.1 - y1).abs() < 1e-4);
    }

    #[test]
    fn euler_helper_agrees_with_explicit_solution() {
        let (mut p, cfg) = reference(-0.3);
        p.sigma0_sq = InitialVariance::Value(0.05);
        let v = ficogarch_1d1(&p, &cfg, 2).unwrap();
        let e = ficogarch_1d1_euler(&p, &v.driver_path, 0.05);
        let gap = v.sigma_sq.iter().zip(&e).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(gap < 0.01 * 0.05, "gap {gap}");
        let r = sde_residual(&p, &v);
        assert!(r.iter().all(|x| x.abs() < 1e-4));
    }
}
