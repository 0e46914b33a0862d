//! One- and two-sided Lévy processes with finite-activity jumps on uniform
//! grids, plus the discrete quadratic variation subordinator.
//!
//! Compound Poisson jumps are drawn at exact event times and kept in a jump
//! record; on the grid a jump at time τ is visible from the first grid point
//! `u_k ≥ τ` onwards.

use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;
use crate::seed::{stream_rng, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "dist", rename_all = "snake_case")]
pub enum JumpSize<T> {
    Normal { mean: T, var: T },
    Exponential { rate: T },
    Constant { value: T },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum JumpLaw<T> {
    None,
    CompoundPoisson { rate: T, size: JumpSize<T> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevySpec<T> {
    pub drift: T,
    pub gaussian_var: T,
    pub jump_law: JumpLaw<T>,
}

impl<T: Real> JumpSize<T> {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        match *self {
            JumpSize::Normal { mean, var } => mean + var.sqrt() * T::standard_normal(rng),
            JumpSize::Exponential { rate } => T::exp1(rng) / rate,
            JumpSize::Constant { value } => value,
        }
    }

    /// Raw moment E(Jᵏ).
    pub fn raw_moment(&self, k: u32) -> T {
        match *self {
            JumpSize::Normal { mean, var } => {
                let (mut prev, mut cur) = (T::one(), mean);
                if k == 0 {
                    return prev;
                }
                for j in 2..=k {
                    let next = mean * cur + T::of_usize(j as usize - 1) * var * prev;
                    prev = cur;
                    cur = next;
                }
                cur
            }
            JumpSize::Exponential { rate } => {
                (1..=k).fold(T::one(), |acc, j| acc * T::of_usize(j as usize) / rate)
            }
            JumpSize::Constant { value } => value.powi(k as i32),
        }
    }

    fn non_negative(&self) -> bool {
        match *self {
            JumpSize::Normal { mean, var } => var == T::zero() && mean >= T::zero(),
            JumpSize::Exponential { .. } => true,
            JumpSize::Constant { value } => value >= T::zero(),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            JumpSize::Normal { mean, var } => mean.is_finite() && var >= T::zero() && var.is_finite(),
            JumpSize::Exponential { rate } => rate > T::zero() && rate.is_finite(),
            JumpSize::Constant { value } => value.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSpec(format!("jump size law {self:?}")))
        }
    }
}

impl<T: Real> LevySpec<T> {
    pub fn drift(drift: T) -> Self {
        Self { drift, gaussian_var: T::zero(), jump_law: JumpLaw::None }
    }

    pub fn compound_poisson(rate: T, size: JumpSize<T>) -> Self {
        Self { drift: T::zero(), gaussian_var: T::zero(), jump_law: JumpLaw::CompoundPoisson { rate, size } }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.drift.is_finite() {
            return Err(Error::InvalidSpec(format!("drift {}", self.drift)));
        }
        if !(self.gaussian_var >= T::zero()) || !self.gaussian_var.is_finite() {
            return Err(Error::InvalidSpec(format!("negative Gaussian variance {}", self.gaussian_var)));
        }
        if let JumpLaw::CompoundPoisson { rate, size } = self.jump_law {
            if !(rate > T::zero()) || !rate.is_finite() {
                return Err(Error::InvalidSpec(format!("jump rate must be positive, got {rate}")));
            }
            size.validate()?;
        }
        Ok(())
    }

    pub fn is_subordinator(&self) -> bool {
        self.gaussian_var == T::zero()
            && self.drift >= T::zero()
            && match self.jump_law {
                JumpLaw::None => true,
                JumpLaw::CompoundPoisson { size, .. } => size.non_negative(),
            }
    }

    pub fn validate_subordinator(&self) -> Result<()> {
        self.validate()?;
        if self.is_subordinator() {
            Ok(())
        } else {
            Err(Error::InvalidSpec(
                "a subordinator needs zero Gaussian part, non-negative drift and non-negative jumps".into(),
            ))
        }
    }

    /// Every shipped jump law has moments of all orders.
    pub fn has_finite_moment(&self, _k: u32) -> bool {
        true
    }

    /// κₖ(L₁).
    pub fn cumulant(&self, k: u32) -> Result<T> {
        if k == 0 {
            return Err(Error::CumulantUnavailable(0));
        }
        let jumps = match self.jump_law {
            JumpLaw::None => T::zero(),
            JumpLaw::CompoundPoisson { rate, size } => rate * size.raw_moment(k),
        };
        Ok(match k {
            1 => self.drift + jumps,
            2 => self.gaussian_var + jumps,
            _ => jumps,
        })
    }

    /// κₖ of the squared-jump subordinator Σ(ΔL)² at time one.
    pub fn quadratic_variation_cumulant(&self, k: u32) -> Result<T> {
        if k == 0 {
            return Err(Error::CumulantUnavailable(0));
        }
        Ok(match self.jump_law {
            JumpLaw::None => T::zero(),
            JumpLaw::CompoundPoisson { rate, size } => rate * size.raw_moment(2 * k),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathGrid<T> {
    pub t_start: T,
    pub t_end: T,
    pub step: T,
    pub n_points: usize,
}

impl<T: Real> PathGrid<T> {
    pub fn new(t_start: T, step: T, n_points: usize) -> Result<Self> {
        let end = t_start + step * T::of_usize(n_points.saturating_sub(1));
        let grid = Self { t_start, t_end: end, step, n_points };
        grid.validate()?;
        Ok(grid)
    }

    /// Grid from `t_start` to `t_end`; the span must be a whole number of steps.
    pub fn span(t_start: T, t_end: T, step: T) -> Result<Self> {
        if !(step > T::zero()) {
            return Err(Error::GridDegenerate(format!("step {step} is not positive")));
        }
        let cells = ((t_end - t_start) / step).round();
        let n = cells.to_usize().ok_or_else(|| Error::GridDegenerate("negative span".into()))? + 1;
        let grid = Self { t_start, t_end, step, n_points: n };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > T::zero()) || !self.step.is_finite() {
            return Err(Error::GridDegenerate(format!("step {} is not positive", self.step)));
        }
        if self.n_points < 2 {
            return Err(Error::GridDegenerate(format!("{} grid points", self.n_points)));
        }
        let span = self.step * T::of_usize(self.n_points - 1);
        let scale = self.t_start.abs().max(self.t_end.abs()).max(span);
        let slack = T::of(64.0) * T::epsilon() * scale * T::of_usize(self.n_points).sqrt().max(T::one());
        if ((self.t_end - self.t_start) - span).abs() > slack {
            return Err(Error::GridDegenerate(format!(
                "span [{}, {}] is not {} steps of {}",
                self.t_start,
                self.t_end,
                self.n_points - 1,
                self.step
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn time(&self, i: usize) -> T {
        self.t_start + self.step * T::of_usize(i)
    }

    pub fn times(&self) -> Vec<T> {
        (0..self.n_points).map(|i| self.time(i)).collect()
    }

    /// Index of the grid point at t = 0, if there is one.
    pub fn origin_index(&self) -> Option<usize> {
        let x = -self.t_start / self.step;
        let k = x.round();
        if k < T::zero() || (x - k).abs() > T::of(1e-9) {
            return None;
        }
        let k = k.to_usize()?;
        (k < self.n_points).then_some(k)
    }

    /// First grid index whose time is ≥ `time` (up to rounding).
    pub fn snap(&self, time: T) -> Result<usize> {
        let tol = T::of(1e-9);
        let x = (time - self.t_start) / self.step;
        if x < -tol || x > T::of_usize(self.n_points - 1) + tol {
            return Err(Error::JumpOutsideGrid {
                time: time.to_f64_lossy(),
                start: self.t_start.to_f64_lossy(),
                end: self.t_end.to_f64_lossy(),
            });
        }
        let k = (x - tol).ceil().max(T::zero());
        Ok(k.to_usize().unwrap_or(0).min(self.n_points - 1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathKind {
    Cadlag,
    Continuous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePath<T> {
    pub grid: PathGrid<T>,
    pub values: Vec<T>,
    pub kind: PathKind,
}

impl<T: Real> SamplePath<T> {
    pub fn new(grid: PathGrid<T>, values: Vec<T>, kind: PathKind) -> Result<Self> {
        if values.len() != grid.n_points {
            return Err(Error::LengthMismatch(format!(
                "{} values for {} grid points",
                values.len(),
                grid.n_points
            )));
        }
        Ok(Self { grid, values, kind })
    }

    pub fn is_non_decreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0])
    }

    /// CSV with header `t,value` and 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,value")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(out, "{:.16e},{:.16e}", self.grid.time(i), v)?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jump<T> {
    pub time: T,
    pub size: T,
}

/// A grid path together with the exact jumps that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct LevyRealization<T> {
    pub path: SamplePath<T>,
    pub jumps: Vec<Jump<T>>,
}

/// Compound Poisson event times in `(0, horizon]` with their sizes.
pub fn sample_jumps<T: Real, R: Rng + ?Sized>(law: &JumpLaw<T>, horizon: T, rng: &mut R) -> Vec<Jump<T>> {
    let mut out = Vec::new();
    if let JumpLaw::CompoundPoisson { rate, size } = law {
        let mut t = T::zero();
        loop {
            t += T::exp1(rng) / *rate;
            if t > horizon {
                break;
            }
            out.push(Jump { time: t, size: size.sample(rng) });
        }
    }
    out
}

/// Brownian increments σ·√Δ·Z for `cells` consecutive grid cells.
fn gaussian_increments<T: Real, R: Rng + ?Sized>(var: T, step: T, cells: usize, rng: &mut R) -> Vec<T> {
    if var == T::zero() {
        return vec![T::zero(); cells];
    }
    let scale = (var * step).sqrt();
    (0..cells).map(|_| scale * T::standard_normal(rng)).collect()
}

/// Grid values Σ_{jumps visible at u_i} size, re-based so `reference` is 0.
fn accumulate_jumps<T: Real>(grid: &PathGrid<T>, jumps: &[Jump<T>], reference: usize, square: bool) -> Result<Vec<T>> {
    let mut bins = vec![T::zero(); grid.n_points];
    for j in jumps {
        let k = grid.snap(j.time)?;
        bins[k] += if square { j.size * j.size } else { j.size };
    }
    let mut acc = T::zero();
    for b in bins.iter_mut() {
        acc += *b;
        *b = acc;
    }
    let base = bins[reference];
    Ok(bins.into_iter().map(|v| v - base).collect())
}

/// One-sided path on `grid`, equal to 0 at `t_start`.
pub fn simulate_levy<T: Real>(spec: &LevySpec<T>, grid: &PathGrid<T>, seed: u64) -> Result<LevyRealization<T>> {
    spec.validate()?;
    grid.validate()?;
    let horizon = grid.t_end - grid.t_start;
    let mut jump_rng = stream_rng(seed, Stream::PositiveJumps);
    let jumps: Vec<Jump<T>> = sample_jumps(&spec.jump_law, horizon, &mut jump_rng)
        .into_iter()
        .map(|j| Jump { time: grid.t_start + j.time, size: j.size })
        .collect();
    let mut values = accumulate_jumps(grid, &jumps, 0, false)?;
    let mut diff_rng = stream_rng(seed, Stream::PositiveDiffusion);
    let noise = gaussian_increments(spec.gaussian_var, grid.step, grid.n_points - 1, &mut diff_rng);
    let mut w = T::zero();
    for i in 0..grid.n_points {
        if i > 0 {
            w += noise[i - 1];
        }
        values[i] += spec.drift * (grid.time(i) - grid.t_start) + w;
    }
    Ok(LevyRealization { path: SamplePath::new(*grid, values, PathKind::Cadlag)?, jumps })
}

/// Two-sided path L_t = −L¹_{(−t)−} for t < 0 and L²_t for t ≥ 0, from
/// independent copies driven by the negative and positive sub-streams.
pub fn two_sided<T: Real>(spec: &LevySpec<T>, grid: &PathGrid<T>, seed: u64) -> Result<LevyRealization<T>> {
    spec.validate()?;
    grid.validate()?;
    let origin = grid.origin_index().ok_or(Error::GridMissingOrigin)?;
    if origin == 0 {
        return simulate_levy(spec, grid, seed);
    }
    let jumps = two_sided_jumps(&spec.jump_law, grid.t_start, grid.t_end, seed);
    let mut values = accumulate_jumps(grid, &jumps, origin, false)?;

    let mut pos_rng = stream_rng(seed, Stream::PositiveDiffusion);
    let mut neg_rng = stream_rng(seed, Stream::NegativeDiffusion);
    let pos = gaussian_increments(spec.gaussian_var, grid.step, grid.n_points - 1 - origin, &mut pos_rng);
    let neg = gaussian_increments(spec.gaussian_var, grid.step, origin, &mut neg_rng);
    let mut w = T::zero();
    for i in origin + 1..grid.n_points {
        w += pos[i - origin - 1];
        values[i] += w;
    }
    let mut w = T::zero();
    for k in 1..=origin {
        w += neg[k - 1];
        values[origin - k] -= w;
    }
    for (i, v) in values.iter_mut().enumerate() {
        *v += spec.drift * grid.time(i);
    }
    Ok(LevyRealization { path: SamplePath::new(*grid, values, PathKind::Cadlag)?, jumps })
}

/// Jump record of the two-sided process on `[t_start, t_end]`, sorted by time.
///
/// Needs `t_start ≤ 0 ≤ t_end`. A jump of the negative-time copy at τ
/// appears at −τ with unchanged size.
pub fn two_sided_jumps<T: Real>(law: &JumpLaw<T>, t_start: T, t_end: T, seed: u64) -> Vec<Jump<T>> {
    let mut neg_rng = stream_rng(seed, Stream::NegativeJumps);
    let mut pos_rng = stream_rng(seed, Stream::PositiveJumps);
    let mut jumps: Vec<Jump<T>> = sample_jumps(law, -t_start, &mut neg_rng)
        .into_iter()
        .rev()
        .map(|j| Jump { time: -j.time, size: j.size })
        .collect();
    jumps.extend(sample_jumps(law, t_end, &mut pos_rng));
    jumps
}

/// S_t = Σ_{s ≤ t}(ΔL_s)² on the grid of `levy_path`, zero at the origin
/// (or at `t_start` when the grid does not contain 0).
pub fn quadratic_variation_discrete<T: Real>(levy_path: &SamplePath<T>, jumps: &[Jump<T>]) -> Result<SamplePath<T>> {
    let grid = levy_path.grid;
    let reference = grid.origin_index().unwrap_or(0);
    let values = accumulate_jumps(&grid, jumps, reference, true)?;
    SamplePath::new(grid, values, PathKind::Cadlag)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cp(rate: f64, mean: f64, var: f64) -> LevySpec<f64> {
        LevySpec::compound_poisson(rate, JumpSize::Normal { mean, var })
    }

    #[test]
    fn pure_drift_path() {
        let grid = PathGrid::<f64>::span(0.0, 1.0, 0.1).unwrap();
        let r = simulate_levy(&LevySpec::drift(1.0), &grid, 9).unwrap();
        for (i, v) in r.path.values.iter().enumerate() {
            assert!((v - 0.1 * i as f64).abs() < 1e-15);
        }
        assert!(r.jumps.is_empty());
    }

    #[test]
    fn two_sided_pure_drift_is_linear() {
        let grid = PathGrid::<f64>::span(-1.0, 1.0, 0.25).unwrap();
        let r = two_sided(&LevySpec::drift(1.0), &grid, 1).unwrap();
        for (i, v) in r.path.values.iter().enumerate() {
            assert!((v - grid.time(i)).abs() < 1e-15);
        }
    }

    #[test]
    fn two_sided_requires_origin() {
        let grid = PathGrid::<f64>::span(-1.05, 0.95, 0.1).unwrap();
        assert_eq!(two_sided(&LevySpec::drift(1.0), &grid, 1).unwrap_err(), Error::GridMissingOrigin);
    }

    #[test]
    fn positive_half_equals_one_sided_path() {
        let spec = cp(2.0, 0.3, 1.0);
        let two = two_sided(&spec, &PathGrid::<f64>::span(-5.0, 5.0, 0.05).unwrap(), 77).unwrap();
        let one = simulate_levy(&spec, &PathGrid::<f64>::span(0.0, 5.0, 0.05).unwrap(), 77).unwrap();
        let origin = 100;
        for (i, v) in one.path.values.iter().enumerate() {
            assert!((two.path.values[origin + i] - v).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_specs_and_grids() {
        assert!(matches!(cp(-1.0, 0.0, 1.0).validate(), Err(Error::InvalidSpec(_))));
        let mut s = LevySpec::drift(0.0);
        s.gaussian_var = -1.0;
        assert!(matches!(s.validate(), Err(Error::InvalidSpec(_))));
        assert!(matches!(PathGrid::new(0.0, 0.1, 1), Err(Error::GridDegenerate(_))));
        assert!(matches!(PathGrid::new(0.0, -0.1, 5), Err(Error::GridDegenerate(_))));
    }

    #[test]
    fn single_jump_quadratic_variation() {
        let grid = PathGrid::<f64>::span(0.0, 1.0, 0.1).unwrap();
        let path = SamplePath::new(grid, vec![0.0; 11], PathKind::Cadlag).unwrap();
        let qv = quadratic_variation_discrete(&path, &[Jump { time: 0.5, size: 2.0 }]).unwrap();
        for (i, v) in qv.values.iter().enumerate() {
            let want = if grid.time(i) < 0.5 - 1e-12 { 0.0 } else { 4.0 };
            assert_eq!(*v, want, "i = {i}");
        }
        let empty = quadratic_variation_discrete(&path, &[]).unwrap();
        assert!(empty.values.iter().all(|v| *v == 0.0));
        assert!(matches!(
            quadratic_variation_discrete(&path, &[Jump { time: 1.5, size: 1.0 }]),
            Err(Error::JumpOutsideGrid { .. })
        ));
    }

    #[test]
    fn normal_raw_moments() {
        let n = JumpSize::<f64>::Normal { mean: 0.0, var: 0.5 };
        assert_eq!(n.raw_moment(2), 0.5);
        assert!((n.raw_moment(4) - 0.75).abs() < 1e-15);
        let m = JumpSize::<f64>::Normal { mean: 1.0, var: 2.0 };
        // E(X³) = μ³ + 3μσ²
        assert!((m.raw_moment(3) - 7.0).abs() < 1e-14);
        let e = JumpSize::<f64>::Exponential { rate: 2.0 };
        assert!((e.raw_moment(3) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn cumulants() {
        let spec = cp(5.0, 0.0, 0.5);
        assert_eq!(spec.cumulant(1).unwrap(), 0.0);
        assert_eq!(spec.cumulant(2).unwrap(), 2.5);
        assert_eq!(spec.quadratic_variation_cumulant(1).unwrap(), 2.5);
        assert!((spec.quadratic_variation_cumulant(2).unwrap() - 3.75).abs() < 1e-14);
    }

    #[test]
    fn csv_layout() {
        let grid = PathGrid::<f64>::span(0.0, 0.2, 0.1).unwrap();
        let r = simulate_levy(&LevySpec::drift(1.0), &grid, 0).unwrap();
        let csv = r.path.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,value");
        assert_eq!(lines.len(), 4);
        let v: f64 = lines[2].split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(v, 0.1);
    }

    #[test]
    fn origin_and_snapping() {
        let grid = PathGrid::<f64>::span(-1.0, 1.0, 0.1).unwrap();
        assert_eq!(grid.origin_index(), Some(10));
        assert_eq!(grid.snap(0.05).unwrap(), 11);
        assert_eq!(grid.snap(0.1).unwrap(), 11);
        assert_eq!(grid.snap(-1.0).unwrap(), 0);
    }
}
