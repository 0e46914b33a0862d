//! TOML run configuration for `ficogarch simulate`.
//!
//! ```toml
//! [model]
//! alpha0 = 0.0195
//! alpha1 = 0.0105
//! beta1 = 0.0513
//! sigma0_sq = "stationary"   # or a positive number
//!
//! [kernel]
//! family = "modified_mvn"
//! a = 1.0
//! d = -0.4
//!
//! [driver]
//! jump_rate = 5.0
//! jump_size = "normal"
//! jump_mean = 0.0
//! jump_var = 0.5
//!
//! [simulation]
//! t_end = 200.0
//! step = 0.1
//! seed = 1
//! ```
//!
//! An order-(p,q) model replaces `alpha1`/`beta1` by `p`, `q`, `a`, `b`
//! (and optionally `y0`).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cogarch::{FicogarchParams, InitialVariance, PdqParams};
use crate::error::{Error, Result};
use crate::fracsub::{default_past_horizon, Driver, Evaluation, FracSubConfig, Scheme};
use crate::kernels::{KernelFamily, KernelSpec};
use crate::levy::{JumpLaw, JumpSize, LevySpec, PathGrid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialSetting {
    Value(f64),
    Keyword(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub alpha0: f64,
    pub alpha1: Option<f64>,
    pub beta1: Option<f64>,
    #[serde(default = "stationary_setting")]
    pub sigma0_sq: InitialSetting,
    #[serde(default)]
    pub g0: f64,
    pub p: Option<usize>,
    pub q: Option<usize>,
    pub a: Option<Vec<f64>>,
    pub b: Option<Vec<f64>>,
    pub y0: Option<Vec<f64>>,
}

fn stationary_setting() -> InitialSetting {
    InitialSetting::Keyword("stationary".into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSection {
    #[serde(default = "modified_family")]
    pub family: KernelFamily,
    pub d: f64,
    #[serde(default = "unit")]
    pub a: f64,
}

fn modified_family() -> KernelFamily {
    KernelFamily::ModifiedMvN
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JumpSizeKind {
    None,
    Normal,
    Exponential,
    Constant,
}

/// The Lévy process L.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriverSection {
    #[serde(default)]
    pub drift: f64,
    #[serde(default)]
    pub gaussian_var: f64,
    #[serde(default)]
    pub jump_rate: f64,
    #[serde(default = "no_jumps")]
    pub jump_size: JumpSizeKind,
    #[serde(default)]
    pub jump_mean: f64,
    #[serde(default = "unit")]
    pub jump_var: f64,
    /// Rate of exponential jump sizes.
    #[serde(default = "unit")]
    pub jump_size_rate: f64,
    /// Size of constant jumps.
    #[serde(default = "unit")]
    pub jump_value: f64,
}

fn no_jumps() -> JumpSizeKind {
    JumpSizeKind::None
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    pub t_end: f64,
    pub step: f64,
    pub past_horizon: Option<f64>,
    pub driver_step: Option<f64>,
    #[serde(default = "riemann")]
    pub scheme: Scheme,
    #[serde(default)]
    pub evaluation: Evaluation,
    #[serde(default = "yes")]
    pub tail_compensation: bool,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one_path")]
    pub paths: usize,
}

fn riemann() -> Scheme {
    Scheme::StochasticRiemann
}

fn yes() -> bool {
    true
}

fn one_path() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    pub kernel: KernelSection,
    pub driver: DriverSection,
    pub simulation: SimulationSection,
}

/// The volatility model selected by a configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Order11(FicogarchParams<f64>),
    Pdq(PdqParams<f64>),
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn levy(&self) -> Result<LevySpec<f64>> {
        let d = &self.driver;
        let size = match d.jump_size {
            JumpSizeKind::None => None,
            JumpSizeKind::Normal => Some(JumpSize::Normal { mean: d.jump_mean, var: d.jump_var }),
            JumpSizeKind::Exponential => Some(JumpSize::Exponential { rate: d.jump_size_rate }),
            JumpSizeKind::Constant => Some(JumpSize::Constant { value: d.jump_value }),
        };
        let jump_law = match size {
            Some(size) if d.jump_rate > 0.0 => JumpLaw::CompoundPoisson { rate: d.jump_rate, size },
            _ => JumpLaw::None,
        };
        let spec = LevySpec { drift: d.drift, gaussian_var: d.gaussian_var, jump_law };
        spec.validate()?;
        Ok(spec)
    }

    pub fn kernel(&self) -> Result<KernelSpec<f64>> {
        KernelSpec { family: self.kernel.family, d: self.kernel.d, a: self.kernel.a }.validated()
    }

    pub fn initial_variance(&self) -> Result<InitialVariance<f64>> {
        match &self.model.sigma0_sq {
            InitialSetting::Value(v) => Ok(InitialVariance::Value(*v)),
            InitialSetting::Keyword(k) if k == "stationary" => Ok(InitialVariance::Stationary),
            InitialSetting::Keyword(k) => Err(Error::Config(format!("sigma0_sq must be a number or \"stationary\", got \"{k}\""))),
        }
    }

    pub fn model(&self) -> Result<Model> {
        let m = &self.model;
        if m.p.is_some() || m.q.is_some() || m.a.is_some() || m.b.is_some() {
            let (Some(p), Some(q), Some(a), Some(b)) = (m.p, m.q, m.a.clone(), m.b.clone()) else {
                return Err(Error::Config("an order-(p,q) model needs p, q, a and b".into()));
            };
            let params = PdqParams { p, q, alpha0: m.alpha0, a_vec: a, b_vec: b, y0: m.y0.clone(), g0: m.g0 };
            params.validate()?;
            return Ok(Model::Pdq(params));
        }
        let (Some(alpha1), Some(beta1)) = (m.alpha1, m.beta1) else {
            return Err(Error::Config("model needs alpha1 and beta1 (or p, q, a, b)".into()));
        };
        let mut params = FicogarchParams::new(m.alpha0, alpha1, beta1, self.initial_variance()?);
        params.g0 = m.g0;
        params.validate()?;
        Ok(Model::Order11(params))
    }

    pub fn grid(&self) -> Result<PathGrid<f64>> {
        PathGrid::span(0.0, self.simulation.t_end, self.simulation.step)
    }

    /// Fractional subordinator configuration driven by [L, L]^{(D)}.
    pub fn frac_config(&self) -> Result<FracSubConfig<f64>> {
        let kernel = self.kernel()?;
        let mut cfg = FracSubConfig::new(kernel, Driver::QuadraticVariation(self.levy()?), self.grid()?);
        let s = &self.simulation;
        cfg.past_horizon = s.past_horizon.unwrap_or_else(|| default_past_horizon(&kernel));
        cfg.driver_step = s.driver_step;
        cfg.scheme = s.scheme;
        cfg.evaluation = s.evaluation;
        cfg.tail_compensation = s.tail_compensation;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const REFERENCE: &str = r#"
[model]
alpha0 = 0.0195
alpha1 = 0.0105
beta1 = 0.0513
sigma0_sq = "stationary"

[kernel]
a = 1.0
d = -0.4

[driver]
jump_rate = 5.0
jump_size = "normal"
jump_var = 0.5

[simulation]
t_end = 10.0
step = 0.1
seed = 7
"#;

    #[test]
    fn reference_config_round_trip() {
        let cfg = RunConfig::from_toml_str(REFERENCE).unwrap();
        let Model::Order11(p) = cfg.model().unwrap() else { panic!("expected order (1,1)") };
        assert_eq!(p.sigma0_sq, InitialVariance::Stationary);
        let frac = cfg.frac_config().unwrap();
        assert_eq!(frac.past_horizon, 200.0);
        assert_eq!(frac.driver.mean(), 2.5);
        assert_eq!(frac.grid.n_points, 101);
        let again = RunConfig::from_toml_str(&toml::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        let typo = REFERENCE.replace("alpha0", "alpha_0");
        assert!(matches!(RunConfig::from_toml_str(&typo), Err(Error::Config(_))));
        let bad = REFERENCE.replace("\"stationary\"", "\"warm\"");
        assert!(RunConfig::from_toml_str(&bad).unwrap().model().is_err());
        let neg = REFERENCE.replace("sigma0_sq = \"stationary\"", "sigma0_sq = -1.0");
        assert_eq!(RunConfig::from_toml_str(&neg).unwrap().model().unwrap_err(), Error::NonPositiveInitial(-1.0));
    }

    #[test]
    fn pdq_model_block() {
        let text = REFERENCE.replace(
            "alpha1 = 0.0105\nbeta1 = 0.0513",
            "p = 1\nq = 2\na = [0.01, 0.0]\nb = [0.5, 0.06]",
        );
        let Model::Pdq(p) = RunConfig::from_toml_str(&text).unwrap().model().unwrap() else { panic!("expected pdq") };
        assert_eq!(p.q, 2);
    }
}
