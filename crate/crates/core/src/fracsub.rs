//! Fractional subordinators S^{a,d}_t = ∫ f(t, u) dS_u built from a driving
//! subordinator on a uniform integration grid truncated at −M.
//!
//! Two discretisations share one driver realisation:
//!
//! * `StochasticRiemann`: Σ_j f(t, u_j)·ΔS_j with the kernel at the left end
//!   of each cell (the cell midpoint when the left end is a kernel
//!   singularity).
//! * `PartsIntegral`: −f(t, −M)·S_{−M} − ∫_{−M}^{max(t,0)} S_u ∂_u f(t, u) du
//!   with the trapezoidal rule per cell.
//!
//! Jumps of the driver are applied exactly at their snapped grid cell. A
//! deterministic drift contributes γ·∫_{−M}^t f(t,u) du in closed form and,
//! when tail compensation is on, the mean of the truncated past
//! E(S₁)·∫_{−∞}^{−M} f(t,u) du is added back.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{
    kernel_moment_integral_tol, kernel_value, tail_integral, KernelFamily, KernelSpec,
};
use crate::levy::{two_sided_jumps, Jump, LevySpec, PathGrid, PathKind, SamplePath};
use crate::quadrature::Tolerance;
use crate::real::{convolve, Real};

/// The driving subordinator S.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "levy", rename_all = "snake_case")]
pub enum Driver<T> {
    /// S is the given subordinator.
    Subordinator(LevySpec<T>),
    /// S = Σ(ΔL)² for the given Lévy process L.
    QuadraticVariation(LevySpec<T>),
}

impl<T: Real> Driver<T> {
    pub fn levy(&self) -> &LevySpec<T> {
        match self {
            Driver::Subordinator(s) | Driver::QuadraticVariation(s) => s,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Driver::Subordinator(s) => s.validate_subordinator(),
            Driver::QuadraticVariation(s) => {
                s.validate()?;
                if !s.has_finite_moment(4) {
                    return Err(Error::MomentConditionViolated("E(L₁⁴) must be finite".into()));
                }
                Ok(())
            }
        }
    }

    pub fn drift(&self) -> T {
        match self {
            Driver::Subordinator(s) => s.drift,
            Driver::QuadraticVariation(_) => T::zero(),
        }
    }

    /// κₖ(S₁).
    pub fn cumulant(&self, k: u32) -> Result<T> {
        match self {
            Driver::Subordinator(s) => s.cumulant(k),
            Driver::QuadraticVariation(s) => s.quadratic_variation_cumulant(k),
        }
    }

    pub fn mean(&self) -> T {
        self.cumulant(1).unwrap_or_else(|_| T::nan())
    }

    pub fn variance(&self) -> T {
        self.cumulant(2).unwrap_or_else(|_| T::nan())
    }

    /// Jump of S caused by a jump of L of size `x`.
    #[inline]
    pub fn jump_of_s(&self, x: T) -> T {
        match self {
            Driver::Subordinator(_) => x,
            Driver::QuadraticVariation(_) => x * x,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    StochasticRiemann,
    PartsIntegral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Evaluation {
    /// Direct sums, or FFT convolution when that is estimated to be cheaper.
    #[default]
    Auto,
    Direct,
    Fft,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FracSubConfig<T> {
    pub kernel: KernelSpec<T>,
    pub driver: Driver<T>,
    /// Output grid.
    pub grid: PathGrid<T>,
    /// Truncation M of the infinite past.
    pub past_horizon: T,
    pub scheme: Scheme,
    /// Integration step; must divide the output step. Defaults to it.
    pub driver_step: Option<T>,
    pub tail_compensation: bool,
    /// Allows the unmodified MvN kernel.
    pub pathological: bool,
    pub evaluation: Evaluation,
}

impl<T: Real> FracSubConfig<T> {
    /// Modified-MvN configuration with default horizon M = 200·a.
    pub fn new(kernel: KernelSpec<T>, driver: Driver<T>, grid: PathGrid<T>) -> Self {
        Self {
            kernel,
            driver,
            grid,
            past_horizon: default_past_horizon(&kernel).max(-grid.t_start),
            scheme: Scheme::StochasticRiemann,
            driver_step: None,
            tail_compensation: true,
            pathological: false,
            evaluation: Evaluation::Auto,
        }
    }
}

pub fn default_past_horizon<T: Real>(kernel: &KernelSpec<T>) -> T {
    match kernel.family {
        KernelFamily::ModifiedMvN => T::of(200.0) * kernel.a,
        _ => T::of(200.0),
    }
}

/// Integration grid and its relation to the output grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Layout<T> {
    pub integration: PathGrid<T>,
    /// Index of t = 0 on the integration grid.
    pub origin: usize,
    /// Integration index of the first output point.
    pub offset: usize,
    /// Integration cells per output cell.
    pub ratio: usize,
    /// Effective truncation point is −`horizon`.
    pub horizon: T,
}

impl<T: Real> Layout<T> {
    pub fn output_index(&self, i: usize) -> usize {
        self.offset + i * self.ratio
    }
}

fn whole_multiple<T: Real>(x: T, what: &str) -> Result<usize> {
    let k = x.round();
    if k < T::zero() || (x - k).abs() > T::of(1e-7) * k.max(T::one()) {
        return Err(Error::KernelGridIncompatible(format!("{what} is not a whole number of integration steps ({x})")));
    }
    Ok(k.to_usize().unwrap_or(0))
}

pub fn layout<T: Real>(cfg: &FracSubConfig<T>) -> Result<Layout<T>> {
    let grid = cfg.grid;
    grid.validate()?;
    let delta = cfg.driver_step.unwrap_or(grid.step);
    if !(delta > T::zero()) {
        return Err(Error::GridDegenerate(format!("driver step {delta}")));
    }
    let ratio = whole_multiple(grid.step / delta, "output step")?.max(1);
    let out_cells = grid.n_points - 1;
    if cfg.kernel.family == KernelFamily::MG {
        if grid.t_start < T::zero() {
            return Err(Error::KernelGridIncompatible("the MG kernel lives on [0, ∞); grid starts before 0".into()));
        }
        let offset = whole_multiple(grid.t_start / delta, "grid start")?;
        let n = offset + out_cells * ratio + 1;
        let integration = PathGrid::new(T::zero(), delta, n)?;
        return Ok(Layout { integration, origin: 0, offset, ratio, horizon: T::zero() });
    }
    let m = cfg.past_horizon;
    if !(m >= -grid.t_start.min(T::zero())) || !(m > T::zero()) {
        return Err(Error::HorizonTooShort {
            horizon: m.to_f64_lossy(),
            required: (-grid.t_start).max(T::zero()).to_f64_lossy(),
        });
    }
    // align −M with the output grid, rounding the horizon up
    let back = ((grid.t_start + m) / delta - T::of(1e-9)).ceil().max(T::zero());
    let back_cells = back.to_usize().unwrap_or(0);
    let u0 = grid.t_start - delta * back;
    let origin = whole_multiple(-u0 / delta, "time origin")?;
    let n = back_cells + out_cells * ratio + 1;
    let integration = PathGrid::new(u0, delta, n)?;
    if origin >= n {
        return Err(Error::GridMissingOrigin);
    }
    Ok(Layout { integration, origin, offset: back_cells, ratio, horizon: -u0 })
}

/// Paths produced by one realisation of the driver.
#[derive(Debug, Clone, PartialEq)]
pub struct FracRealization<T> {
    /// Driver S on the output grid, normalised to S₀ = 0.
    pub driver: SamplePath<T>,
    /// S^{a,d} on the output grid.
    pub frac: SamplePath<T>,
    /// Jumps of the underlying Lévy process (of S itself for a subordinator driver).
    pub levy_jumps: Vec<Jump<T>>,
    pub layout: Layout<T>,
}

pub fn frac_path<T: Real>(cfg: &FracSubConfig<T>, seed: u64) -> Result<SamplePath<T>> {
    Ok(frac_realization(cfg, seed)?.frac)
}

pub fn frac_realization<T: Real>(cfg: &FracSubConfig<T>, seed: u64) -> Result<FracRealization<T>> {
    check_config(cfg)?;
    let lay = layout(cfg)?;
    let ig = lay.integration;
    let levy_jumps = two_sided_jumps(&cfg.driver.levy().jump_law, ig.t_start, ig.t_end, seed);
    frac_from_levy_jumps(cfg, &lay, levy_jumps)
}

/// Builds the paths from a given jump record of L (times inside the
/// integration grid of `cfg`).
pub fn frac_from_jumps<T: Real>(cfg: &FracSubConfig<T>, levy_jumps: Vec<Jump<T>>) -> Result<FracRealization<T>> {
    check_config(cfg)?;
    let lay = layout(cfg)?;
    frac_from_levy_jumps(cfg, &lay, levy_jumps)
}

fn check_config<T: Real>(cfg: &FracSubConfig<T>) -> Result<()> {
    cfg.kernel.validated()?;
    cfg.driver.validate()?;
    let family = cfg.kernel.family;
    if family == KernelFamily::MvN && !cfg.pathological {
        return Err(Error::InvalidKernel(
            "paths with the unmodified MvN kernel need the pathological flag".into(),
        ));
    }
    if cfg.scheme == Scheme::PartsIntegral && family != KernelFamily::ModifiedMvN {
        return Err(Error::SchemeUnsupported { scheme: "parts_integral".into(), kernel: family.to_string() });
    }
    if cfg.evaluation == Evaluation::Fft
        && (family != KernelFamily::ModifiedMvN || cfg.scheme != Scheme::StochasticRiemann)
    {
        return Err(Error::SchemeUnsupported { scheme: "fft".into(), kernel: family.to_string() });
    }
    Ok(())
}

fn frac_from_levy_jumps<T: Real>(cfg: &FracSubConfig<T>, lay: &Layout<T>, levy_jumps: Vec<Jump<T>>) -> Result<FracRealization<T>> {
    let ig = lay.integration;
    let n = ig.n_points;
    // jump mass of S per snapped grid index
    let mut bins = vec![T::zero(); n];
    for j in &levy_jumps {
        bins[ig.snap(j.time)?] += cfg.driver.jump_of_s(j.size);
    }
    let mut s_int = Vec::with_capacity(n);
    let mut acc = T::zero();
    for b in &bins {
        acc += *b;
        s_int.push(acc);
    }
    let base = s_int[lay.origin];
    for v in s_int.iter_mut() {
        *v -= base;
    }

    let out = cfg.grid;
    let out_idx: Vec<usize> = (0..out.n_points).map(|i| lay.output_index(i)).collect();
    let jump_part = match (cfg.kernel.family, cfg.scheme) {
        (KernelFamily::ModifiedMvN, Scheme::StochasticRiemann) => {
            let jumps_used = bins.iter().filter(|b| **b != T::zero()).count();
            let direct_cost = (out_idx.len() * jumps_used) as f64;
            let fft_cost = 60.0 * n as f64 * (n as f64).log2().max(1.0);
            let use_fft = match cfg.evaluation {
                Evaluation::Fft => true,
                Evaluation::Direct => false,
                Evaluation::Auto => direct_cost > fft_cost,
            };
            if use_fft {
                let all = riemann_modified_fft(cfg.kernel, lay, &bins);
                out_idx.iter().map(|&i| all[i]).collect()
            } else {
                riemann_modified_direct(cfg.kernel, lay, &bins, &out_idx)
            }
        }
        (KernelFamily::ModifiedMvN, Scheme::PartsIntegral) => parts_modified_direct(cfg.kernel, lay, &s_int, &out_idx),
        _ => riemann_generic(cfg.kernel, lay, &bins, &out_idx)?,
    };

    let drift = cfg.driver.drift();
    let mean = cfg.driver.mean();
    let mut frac = Vec::with_capacity(out.n_points);
    let mut driver = Vec::with_capacity(out.n_points);
    for (i, &k) in out_idx.iter().enumerate() {
        let t = ig.time(k);
        let mut v = jump_part[i];
        if drift != T::zero() {
            v += drift * truncated_mass(&cfg.kernel, t, lay.horizon)?;
        }
        if cfg.tail_compensation && cfg.kernel.family != KernelFamily::MG {
            v += mean * tail_integral(&cfg.kernel, t, lay.horizon)?;
        }
        frac.push(v);
        driver.push(s_int[k] + drift * t);
    }
    let kind = if cfg.kernel.family == KernelFamily::MvN { PathKind::Cadlag } else { PathKind::Continuous };
    Ok(FracRealization {
        driver: SamplePath::new(out, driver, PathKind::Cadlag)?,
        frac: SamplePath::new(out, frac, kind)?,
        levy_jumps,
        layout: *lay,
    })
}

/// ∫_{−m}^{∞} f(t, u) du (from 0 for the MG kernel).
fn truncated_mass<T: Real>(kernel: &KernelSpec<T>, t: T, m: T) -> Result<T> {
    let one = T::one();
    match kernel.family {
        KernelFamily::ModifiedMvN => Ok(kernel.a.powf(kernel.d) * t - tail_integral(kernel, t, m)?),
        KernelFamily::MvN => Ok(-tail_integral(kernel, t, m)?),
        KernelFamily::MG => {
            if t <= T::zero() {
                return Ok(T::zero());
            }
            let unit = kernel_moment_integral_tol(kernel, one, 1, Tolerance { abs: T::of(1e-12), rel: T::of(1e-10), max_panels: 4000 })?;
            Ok(unit * t.powf(kernel.d + one))
        }
    }
}

/// Tables G_k = (a + kδ)^d for k = 0..n.
fn g_table<T: Real>(a: T, d: T, delta: T, n: usize) -> Vec<T> {
    (0..=n).map(|k| (a + delta * T::of_usize(k)).powf(d)).collect()
}

/// f(u_i, u_j) on the integration grid for the modified kernel.
#[inline]
fn modified_on_grid<T: Real>(g: &[T], origin: usize, i: usize, j: usize) -> T {
    let past = if j < origin { g[origin - j] } else { g[0] };
    let recent = if j < i { g[i - j] } else { g[0] };
    past - recent
}

fn riemann_modified_direct<T: Real>(kernel: KernelSpec<T>, lay: &Layout<T>, bins: &[T], out_idx: &[usize]) -> Vec<T> {
    let n = bins.len();
    let g = g_table(kernel.a, kernel.d, lay.integration.step, n);
    let jumps: Vec<(usize, T)> = bins.iter().enumerate().filter(|(k, b)| *k > 0 && **b != T::zero()).map(|(k, b)| (k, *b)).collect();
    out_idx
        .iter()
        .map(|&i| {
            let hi = i.max(lay.origin);
            let mut acc = T::zero();
            for &(k, size) in &jumps {
                if k > hi {
                    break;
                }
                acc += modified_on_grid(&g, lay.origin, i, k - 1) * size;
            }
            acc
        })
        .collect()
}

fn riemann_modified_fft<T: Real>(kernel: KernelSpec<T>, lay: &Layout<T>, bins: &[T]) -> Vec<T> {
    let n = bins.len();
    let o = lay.origin;
    let g = g_table(kernel.a, kernel.d, lay.integration.step, n);
    // ΔS_j over cell (u_j, u_{j+1}]
    let mut ds: Vec<T> = bins[1..].to_vec();
    ds.push(T::zero());
    let conv = convolve(&g[..n], &ds);
    let mut past = vec![T::zero(); n + 1];
    let mut mass = vec![T::zero(); n + 1];
    for j in 0..n {
        let w = if j < o { g[o - j] } else { g[0] };
        past[j + 1] = past[j] + w * ds[j];
        mass[j + 1] = mass[j] + ds[j];
    }
    (0..n)
        .map(|i| {
            let a_part = past[i.max(o)];
            let b_part = conv[i] - g[0] * ds[i];
            let c_part = if i < o { g[0] * (mass[o] - mass[i]) } else { T::zero() };
            a_part - b_part - c_part
        })
        .collect()
}

fn parts_modified_direct<T: Real>(kernel: KernelSpec<T>, lay: &Layout<T>, s: &[T], out_idx: &[usize]) -> Vec<T> {
    let n = s.len();
    let o = lay.origin;
    let (a, d) = (kernel.a, kernel.d);
    let delta = lay.integration.step;
    let g = g_table(a, d, delta, n);
    let e = g_table(a, d - T::one(), delta, n);
    let half = T::of(0.5) * delta;
    out_idx
        .iter()
        .map(|&i| {
            let hi = i.max(o);
            let boundary = -modified_on_grid(&g, o, i, 0) * s[0];
            let mut acc = T::zero();
            for c in 0..hi {
                // indicator pattern taken from the cell interior
                let past = c < o;
                let recent = c < i;
                let slope = |node: usize| {
                    let mut v = T::zero();
                    if past {
                        v -= d * e[o - node];
                    }
                    if recent {
                        v += d * e[i - node];
                    }
                    v
                };
                acc += half * (s[c] * slope(c) + s[c + 1] * slope(c + 1));
            }
            boundary - acc
        })
        .collect()
}

fn riemann_generic<T: Real>(kernel: KernelSpec<T>, lay: &Layout<T>, bins: &[T], out_idx: &[usize]) -> Result<Vec<T>> {
    let ig = lay.integration;
    let half = T::of(0.5) * ig.step;
    let jumps: Vec<(usize, T)> = bins.iter().enumerate().filter(|(k, b)| *k > 0 && **b != T::zero()).map(|(k, b)| (k, *b)).collect();
    let mut out = Vec::with_capacity(out_idx.len());
    for &i in out_idx {
        let t = ig.time(i);
        let hi = i.max(lay.origin);
        let mut acc = T::zero();
        for &(k, size) in &jumps {
            if k > hi {
                break;
            }
            let u = ig.time(k - 1);
            let f = match kernel_value(&kernel, t, u) {
                Err(Error::SingularPoint { .. }) => kernel_value(&kernel, t, u + half)?,
                other => other?,
            };
            acc += f * size;
        }
        out.push(acc);
    }
    Ok(out)
}

fn moment_tolerance<T: Real>() -> Tolerance<T> {
    Tolerance { abs: T::of(1e-13), rel: T::of(1e-10), max_panels: 4000 }
}

/// E(S^{a,d}_t) = E(S₁)·∫ f(t, u) du for the untruncated model.
pub fn frac_mean<T: Real>(cfg: &FracSubConfig<T>, t: T) -> Result<T> {
    frac_cumulant(cfg, 1, t)
}

/// κₖ(S^{a,d}_t) = κₖ(S₁)·∫ fᵏ(t, u) du.
pub fn frac_cumulant<T: Real>(cfg: &FracSubConfig<T>, k: u32, t: T) -> Result<T> {
    let kappa = cfg.driver.cumulant(k)?;
    if t == T::zero() {
        return Ok(T::zero());
    }
    let integral = kernel_moment_integral_tol(&cfg.kernel, t, k, moment_tolerance())?;
    Ok(kappa * integral)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::JumpSize;

    fn qv_driver(rate: f64) -> Driver<f64> {
        Driver::QuadraticVariation(LevySpec::compound_poisson(rate, JumpSize::Normal { mean: 0.0, var: 1.0 }))
    }

    fn cfg(step: f64, m: f64) -> FracSubConfig<f64> {
        let kernel = KernelSpec::modified_mvn(1.0, -0.25).unwrap();
        let grid = PathGrid::span(0.0, 5.0, step).unwrap();
        let mut c = FracSubConfig::new(kernel, qv_driver(0.4), grid);
        c.past_horizon = m;
        c
    }

    #[test]
    fn no_jumps_gives_zero_path() {
        let c = cfg(0.1, 20.0);
        let r = frac_from_jumps(&c, vec![]).unwrap();
        for (i, v) in r.frac.values.iter().enumerate() {
            let tail = tail_integral(&c.kernel, c.grid.time(i), r.layout.horizon).unwrap();
            assert!((v - 0.4 * tail).abs() < 1e-12);
        }
        let mut c2 = c;
        c2.tail_compensation = false;
        let r = frac_from_jumps(&c2, vec![]).unwrap();
        assert!(r.frac.values.iter().all(|v| *v == 0.0));
        assert!(r.driver.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn single_jump_matches_kernel() {
        let mut c = cfg(0.1, 20.0);
        c.tail_compensation = false;
        let r = frac_from_jumps(&c, vec![Jump { time: -3.05, size: 2.0 }]).unwrap();
        // jump lands in the cell starting at −3.1
        for (i, v) in r.frac.values.iter().enumerate() {
            let t = c.grid.time(i);
            let want = 4.0 * crate::kernels::modified_mvn(1.0, -0.25, t, -3.1);
            assert!((v - want).abs() < 1e-12);
        }
    }

    #[test]
    fn fft_matches_direct() {
        let mut c = cfg(0.05, 30.0);
        c.grid = PathGrid::span(-10.0, 5.0, 0.05).unwrap();
        c.evaluation = Evaluation::Direct;
        let a = frac_path(&c, 5).unwrap();
        c.evaluation = Evaluation::Fft;
        let b = frac_path(&c, 5).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() < 1e-10, "{x} vs {y}");
        }
    }

    #[test]
    fn riemann_and_parts_are_close() {
        let mut c = cfg(0.01, 30.0);
        let a = frac_path(&c, 11).unwrap();
        c.scheme = Scheme::PartsIntegral;
        let b = frac_path(&c, 11).unwrap();
        let gap = a.values.iter().zip(&b.values).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let scale = a.values.last().unwrap().abs().max(1.0);
        assert!(gap < 0.05 * scale, "gap {gap}");
    }

    #[test]
    fn paths_are_non_decreasing() {
        let c = cfg(0.05, 30.0);
        for seed in 0..20 {
            assert!(frac_path(&c, seed).unwrap().is_non_decreasing());
        }
    }

    #[test]
    fn mg_at_zero_d_reproduces_driver() {
        let kernel = KernelSpec::mg(0.0).unwrap();
        let grid = PathGrid::span(0.0, 3.0, 0.01).unwrap();
        let c = FracSubConfig::new(kernel, qv_driver(2.0), grid);
        let r = frac_realization(&c, 3).unwrap();
        for (x, y) in r.frac.values.iter().zip(&r.driver.values) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn config_errors() {
        let mut c = cfg(0.1, 20.0);
        c.grid = PathGrid::span(-30.0, 1.0, 0.1).unwrap();
        assert!(matches!(frac_path(&c, 0), Err(Error::HorizonTooShort { .. })));

        let mut c = cfg(0.1, 20.0);
        c.kernel = KernelSpec::mg(0.2).unwrap();
        c.grid = PathGrid::span(-1.0, 1.0, 0.1).unwrap();
        assert!(matches!(frac_path(&c, 0), Err(Error::KernelGridIncompatible(_))));

        let mut c = cfg(0.1, 20.0);
        c.kernel = KernelSpec::mg(0.2).unwrap();
        c.scheme = Scheme::PartsIntegral;
        assert!(matches!(frac_path(&c, 0), Err(Error::SchemeUnsupported { .. })));

        let mut c = cfg(0.1, 20.0);
        c.kernel = KernelSpec::mvn(-0.2).unwrap();
        assert!(matches!(frac_path(&c, 0), Err(Error::InvalidKernel(_))));
        c.pathological = true;
        assert!(frac_path(&c, 0).is_ok());
    }

    #[test]
    fn mean_and_cumulants() {
        let c = cfg(0.1, 20.0);
        assert_eq!(frac_mean(&c, 0.0).unwrap(), 0.0);
        // E(S₁) = 0.4, ∫f(t,·) = a^d·t
        let m = frac_mean(&c, 2.0).unwrap();
        assert!((m - 0.4 * 2.0).abs() < 1e-9);
        assert_eq!(frac_cumulant(&c, 1, 2.0).unwrap(), m);
    }
}
