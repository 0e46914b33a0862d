//! `ficogarch` command-line interface.
//!
//! Exit codes: 0 success, 1 a validation criterion failed, 2 usage or input
//! error.

mod io;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use ficogarch::cogarch::{default_burn_in, ficogarch_1d1, ficogarch_pdq, VolatilityPath};
use ficogarch::config::{Model, RunConfig};
use ficogarch::covariance::{increment_cov_asymptotic, increment_cov_exact, VarianceConvention};
use ficogarch::fracsub::{frac_cumulant, frac_realization, layout, Driver, Evaluation, FracSubConfig, Scheme};
use ficogarch::kernels::{classify_integrability, kernel_norm, kernel_value, KernelFamily, KernelSpec};
use ficogarch::levy::{JumpSize, LevySpec, PathGrid};
use ficogarch::manifest::Manifest;
use ficogarch::seed::ensemble;
use ficogarch::stats::{cumulant_estimate, loglog_slope, sample_acf};
use ficogarch::validation::{run_suite, Budget, Suite};

use crate::io::{read_column, Sink};

#[derive(Parser, Debug)]
#[command(name = "ficogarch", version, about = "Fractional subordinators and FICOGARCH processes")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Base seed; path i uses a key derived from (seed, i).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for CSV files and manifest.json (default: CSV on
    /// stdout, manifest on stderr).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Number of Monte Carlo paths.
    #[arg(long, global = true)]
    paths: Option<usize>,
    /// Output grid step.
    #[arg(long, global = true)]
    step: Option<f64>,
    /// Truncation M of the infinite past.
    #[arg(long, global = true)]
    past_horizon: Option<f64>,
    /// Allow paths driven by the unmodified MvN kernel.
    #[arg(long, global = true)]
    pathological: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate FICOGARCH paths from a configuration file.
    Simulate,
    /// Fractional subordinator paths and moments.
    Fracsub {
        #[command(subcommand)]
        command: FracsubCommand,
    },
    /// Kernel values and norms.
    Kernel {
        #[command(subcommand)]
        command: KernelCommand,
    },
    /// Increment covariance tables.
    Cov {
        #[command(subcommand)]
        command: CovCommand,
    },
    /// Estimators on CSV columns.
    Stats {
        #[command(subcommand)]
        command: StatsCommand,
    },
    /// Run the acceptance criteria and print a PASS/FAIL table.
    Validate {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        #[arg(long, value_enum, default_value = "quick")]
        budget: BudgetArg,
    },
}

#[derive(Subcommand, Debug)]
enum FracsubCommand {
    /// Driver and fractional path side by side: `t,S,Sad`.
    Simulate(FracArgs),
    /// Analytic vs Monte Carlo cumulants at one time: `k,analytic,mc,mc_stderr`.
    Moments {
        #[command(flatten)]
        frac: FracArgs,
        /// Evaluation time.
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        /// Highest cumulant order (at most 4).
        #[arg(long, default_value_t = 2)]
        kmax: u32,
    },
}

#[derive(Subcommand, Debug)]
enum KernelCommand {
    /// Kernel values on an s-grid: `s,f` (singular points print NaN).
    Eval {
        #[command(flatten)]
        kernel: KernelArgs,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        t: f64,
        #[arg(long, default_value_t = -5.0, allow_hyphen_values = true)]
        s_min: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        s_max: f64,
        #[arg(long, default_value_t = 601)]
        points: usize,
    },
    /// ∫|f(t,s)|^p ds, or an error when the integral diverges.
    Norm {
        #[command(flatten)]
        kernel: KernelArgs,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// Absolute quadrature tolerance.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
}

#[derive(Subcommand, Debug)]
enum CovCommand {
    /// `h,gamma_exact,gamma_asym,ratio` for h = 1..hmax (or log-spaced).
    Table {
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = -0.25, allow_hyphen_values = true)]
        d: f64,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        #[arg(long, default_value_t = 100.0)]
        hmax: f64,
        /// Var(S₁) of the driver.
        #[arg(long, default_value_t = 1.0)]
        var_s1: f64,
        #[arg(long, value_enum, default_value = "driver")]
        convention: ConventionArg,
        /// Use this many log-spaced lags in [1, hmax] instead of integers.
        #[arg(long)]
        log_points: Option<usize>,
    },
}

#[derive(Subcommand, Debug)]
enum StatsCommand {
    /// Sample ACF (biased 1/n normalisation) of a column: `lag,acf`.
    Acf {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "sigma2")]
        column: String,
        #[arg(long, default_value_t = 50)]
        max_lag: usize,
        /// Keep every n-th row before estimating.
        #[arg(long, default_value_t = 1)]
        every: usize,
    },
    /// Least-squares slope of log y on log x: `slope,stderr`.
    Slope {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
}

#[derive(Args, Debug, Clone)]
struct KernelArgs {
    #[arg(long, value_enum, default_value = "modified-mvn")]
    family: FamilyArg,
    #[arg(long, default_value_t = -0.25, allow_hyphen_values = true)]
    d: f64,
    #[arg(long, default_value_t = 1.0)]
    a: f64,
}

impl KernelArgs {
    fn spec(&self) -> Result<KernelSpec<f64>> {
        let family = match self.family {
            FamilyArg::Mg => KernelFamily::MG,
            FamilyArg::Mvn => KernelFamily::MvN,
            FamilyArg::ModifiedMvn => KernelFamily::ModifiedMvN,
        };
        Ok(KernelSpec { family, d: self.d, a: self.a }.validated()?)
    }
}

#[derive(Args, Debug, Clone)]
struct FracArgs {
    #[command(flatten)]
    kernel: KernelArgs,
    /// `qv`: S is the quadratic variation of L; `subordinator`: S = L.
    #[arg(long, value_enum, default_value = "qv")]
    driver: DriverArg,
    /// Jump rate of L.
    #[arg(long, default_value_t = 0.4)]
    rate: f64,
    #[arg(long, value_enum, default_value = "normal")]
    jump_size: JumpArg,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    jump_mean: f64,
    #[arg(long, default_value_t = 1.0)]
    jump_var: f64,
    /// Rate of exponential jump sizes.
    #[arg(long, default_value_t = 1.0)]
    jump_exp_rate: f64,
    /// Size of constant jumps.
    #[arg(long, default_value_t = 1.0)]
    jump_value: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    t_start: f64,
    #[arg(long, default_value_t = 25.0)]
    t_end: f64,
    #[arg(long, value_enum, default_value = "riemann")]
    scheme: SchemeArg,
    /// Integration step (must divide the output step).
    #[arg(long)]
    driver_step: Option<f64>,
    #[arg(long, value_enum, default_value = "auto")]
    evaluation: EvaluationArg,
    #[arg(long)]
    no_tail_compensation: bool,
}

impl FracArgs {
    fn config(&self, g: &Global) -> Result<FracSubConfig<f64>> {
        let size = match self.jump_size {
            JumpArg::Normal => JumpSize::Normal { mean: self.jump_mean, var: self.jump_var },
            JumpArg::Exponential => JumpSize::Exponential { rate: self.jump_exp_rate },
            JumpArg::Constant => JumpSize::Constant { value: self.jump_value },
        };
        let levy = LevySpec::compound_poisson(self.rate, size);
        let driver = match self.driver {
            DriverArg::Qv => Driver::QuadraticVariation(levy),
            DriverArg::Subordinator => Driver::Subordinator(levy),
        };
        let grid = PathGrid::span(self.t_start, self.t_end, g.step.unwrap_or(0.01))?;
        let mut cfg = FracSubConfig::new(self.kernel.spec()?, driver, grid);
        if let Some(m) = g.past_horizon {
            cfg.past_horizon = m;
        }
        cfg.scheme = match self.scheme {
            SchemeArg::Riemann => Scheme::StochasticRiemann,
            SchemeArg::Parts => Scheme::PartsIntegral,
        };
        cfg.driver_step = self.driver_step;
        cfg.evaluation = match self.evaluation {
            EvaluationArg::Auto => Evaluation::Auto,
            EvaluationArg::Direct => Evaluation::Direct,
            EvaluationArg::Fft => Evaluation::Fft,
        };
        cfg.tail_compensation = !self.no_tail_compensation;
        cfg.pathological = g.pathological;
        Ok(cfg)
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FamilyArg {
    Mg,
    Mvn,
    ModifiedMvn,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum DriverArg {
    Qv,
    Subordinator,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum JumpArg {
    Normal,
    Exponential,
    Constant,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SchemeArg {
    Riemann,
    Parts,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum EvaluationArg {
    Auto,
    Direct,
    Fft,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ConventionArg {
    Driver,
    Fractional,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SuiteArg {
    Kernels,
    Fracsub,
    Covariance,
    Ficogarch,
    All,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum BudgetArg {
    Quick,
    Full,
}

enum Status {
    Ok,
    ValidationFailed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::ValidationFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<Status> {
    let g = &cli.global;
    match &cli.command {
        Command::Simulate => simulate(g),
        Command::Fracsub { command: FracsubCommand::Simulate(args) } => fracsub_simulate(g, args),
        Command::Fracsub { command: FracsubCommand::Moments { frac, t, kmax } } => fracsub_moments(g, frac, *t, *kmax),
        Command::Kernel { command } => kernel(g, command),
        Command::Cov { command: CovCommand::Table { a, d, r, hmax, var_s1, convention, log_points } } => {
            cov_table(g, *a, *d, *r, *hmax, *var_s1, *convention, *log_points)
        }
        Command::Stats { command } => stats(g, command),
        Command::Validate { suite, budget } => validate(g, *suite, *budget),
    }
}

fn file_name(stem: &str, index: usize, total: usize) -> String {
    if total == 1 {
        format!("{stem}.csv")
    } else {
        format!("{stem}_{index:04}.csv")
    }
}

fn require_out_for_many(g: &Global, paths: usize) -> Result<()> {
    if paths > 1 && g.out.is_none() {
        bail!("--paths {paths} needs --out <dir>");
    }
    if paths == 0 {
        bail!("--paths must be at least 1");
    }
    Ok(())
}

fn simulate(g: &Global) -> Result<Status> {
    let path = g.config.as_deref().context("simulate needs --config <file>")?;
    let mut rc = RunConfig::from_path(path)?;
    if let Some(seed) = g.seed {
        rc.simulation.seed = seed;
    }
    if let Some(n) = g.paths {
        rc.simulation.paths = n;
    }
    if let Some(step) = g.step {
        rc.simulation.step = step;
    }
    if let Some(m) = g.past_horizon {
        rc.simulation.past_horizon = Some(m);
    }
    let n = rc.simulation.paths;
    require_out_for_many(g, n)?;
    let seed = rc.simulation.seed;
    let cfg = rc.frac_config()?;
    let model = rc.model()?;
    let runs: Vec<VolatilityPath<f64>> = ensemble(seed, n, |key| match &model {
        Model::Order11(p) => ficogarch_1d1(p, &cfg, key),
        Model::Pdq(p) => ficogarch_pdq(p, &cfg, key),
    })?;

    let mut manifest = Manifest::new("simulate", seed, &rc)?;
    manifest.note("effective_past_horizon", layout(&cfg)?.horizon)?;
    manifest.note("grid_points", cfg.grid.n_points)?;
    if let Model::Order11(p) = &model {
        manifest.note("kappa", p.kappa(&cfg))?;
        manifest.note("default_burn_in", default_burn_in(p.beta1, cfg.past_horizon))?;
    }
    let bounds: Vec<f64> = runs.iter().filter_map(|r| r.truncation_bound).collect();
    if !bounds.is_empty() {
        manifest.note("max_truncation_bound", bounds.iter().copied().fold(0.0, f64::max))?;
    }
    manifest.note("sigma0_sq", runs.iter().map(|r| r.sigma0_sq).collect::<Vec<_>>())?;
    manifest.note("paths_with_nonpositive_variance", runs.iter().filter(|r| r.nonpositive_variance).count())?;

    let sink = Sink::new(g.out.as_deref())?;
    for (i, r) in runs.iter().enumerate() {
        sink.table(&file_name("path", i, n), &r.to_csv(), &mut manifest)?;
    }
    sink.finish(&manifest)?;
    Ok(Status::Ok)
}

fn fracsub_simulate(g: &Global, args: &FracArgs) -> Result<Status> {
    let cfg = args.config(g)?;
    let seed = g.seed.unwrap_or(0);
    let n = g.paths.unwrap_or(1);
    require_out_for_many(g, n)?;
    let runs = ensemble(seed, n, |key| frac_realization(&cfg, key))?;
    let mut manifest = Manifest::new("fracsub simulate", seed, cfg)?;
    manifest.note("effective_past_horizon", layout(&cfg)?.horizon)?;
    let sink = Sink::new(g.out.as_deref())?;
    for (i, r) in runs.iter().enumerate() {
        let mut body = String::from("t,S,Sad\n");
        for k in 0..cfg.grid.n_points {
            writeln!(body, "{:.16e},{:.16e},{:.16e}", cfg.grid.time(k), r.driver.values[k], r.frac.values[k])?;
        }
        sink.table(&file_name("fracsub", i, n), &body, &mut manifest)?;
    }
    sink.finish(&manifest)?;
    Ok(Status::Ok)
}

fn fracsub_moments(g: &Global, args: &FracArgs, t: f64, kmax: u32) -> Result<Status> {
    if !(1..=4).contains(&kmax) {
        bail!("--kmax must be between 1 and 4");
    }
    let mut cfg = args.config(g)?;
    let step = g.step.unwrap_or(0.01);
    cfg.grid = PathGrid::span(0.0, t, step)?;
    let seed = g.seed.unwrap_or(0);
    let n = g.paths.unwrap_or(1000);
    let last = cfg.grid.n_points - 1;
    let values: Vec<f64> = ensemble(seed, n, |key| Ok(frac_realization(&cfg, key)?.frac.values[last]))?;
    let mut body = String::from("k,analytic,mc,mc_stderr\n");
    for k in 1..=kmax {
        let analytic = frac_cumulant(&cfg, k, t)?;
        let mc = cumulant_estimate(&values, k)?;
        writeln!(body, "{k},{analytic:.16e},{:.16e},{:.16e}", mc.value, mc.stderr)?;
    }
    let mut manifest = Manifest::new("fracsub moments", seed, cfg)?;
    manifest.note("t", t)?;
    manifest.note("paths", n)?;
    let sink = Sink::new(g.out.as_deref())?;
    sink.table("moments.csv", &body, &mut manifest)?;
    sink.finish(&manifest)?;
    Ok(Status::Ok)
}

fn kernel(g: &Global, command: &KernelCommand) -> Result<Status> {
    match command {
        KernelCommand::Eval { kernel, t, s_min, s_max, points } => {
            let spec = kernel.spec()?;
            if *points < 2 || !(s_max > s_min) {
                bail!("need --points >= 2 and --s-max > --s-min");
            }
            let mut body = String::from("s,f\n");
            for i in 0..*points {
                let s = s_min + (s_max - s_min) * i as f64 / (*points - 1) as f64;
                let f = kernel_value(&spec, *t, s).unwrap_or(f64::NAN);
                writeln!(body, "{s:.16e},{f:.16e}")?;
            }
            let mut manifest = Manifest::new("kernel eval", 0, json!({"kernel": spec, "t": t}))?;
            let sink = Sink::new(g.out.as_deref())?;
            sink.table("kernel.csv", &body, &mut manifest)?;
            if g.out.is_some() {
                sink.finish(&manifest)?;
            }
        }
        KernelCommand::Norm { kernel, t, p, tol } => {
            let spec = kernel.spec()?;
            let class = classify_integrability(&spec, *p);
            let value = kernel_norm(&spec, *t, *p, *tol)?;
            println!("{value:.16e}");
            eprintln!("{class:?} (tolerance {tol:e})");
        }
    }
    Ok(Status::Ok)
}

#[allow(clippy::too_many_arguments)]
fn cov_table(
    g: &Global,
    a: f64,
    d: f64,
    r: f64,
    hmax: f64,
    var_s1: f64,
    convention: ConventionArg,
    log_points: Option<usize>,
) -> Result<Status> {
    if !(hmax >= 1.0) {
        bail!("--hmax must be at least 1");
    }
    let hs: Vec<f64> = match log_points {
        Some(n) if n >= 2 => (0..n).map(|i| (hmax.ln() * i as f64 / (n - 1) as f64).exp()).collect(),
        Some(_) => bail!("--log-points must be at least 2"),
        None => (1..=hmax.floor() as u64).map(|h| h as f64).collect(),
    };
    let convention = match convention {
        ConventionArg::Driver => VarianceConvention::Driver,
        ConventionArg::Fractional => VarianceConvention::Fractional,
    };
    let mut body = String::from("h,gamma_exact,gamma_asym,ratio\n");
    for h in hs {
        let exact = increment_cov_exact(a, d, var_s1, r, h)?;
        let asym = increment_cov_asymptotic(a, d, var_s1, r, h, convention)?;
        writeln!(body, "{h:.16e},{exact:.16e},{asym:.16e},{:.16e}", exact / asym)?;
    }
    let mut manifest = Manifest::new(
        "cov table",
        0,
        json!({"a": a, "d": d, "r": r, "hmax": hmax, "var_s1": var_s1, "convention": format!("{convention:?}").to_lowercase()}),
    )?;
    let sink = Sink::new(g.out.as_deref())?;
    sink.table("cov.csv", &body, &mut manifest)?;
    if g.out.is_some() {
        sink.finish(&manifest)?;
    }
    Ok(Status::Ok)
}

fn stats(g: &Global, command: &StatsCommand) -> Result<Status> {
    let mut manifest = Manifest::new("stats", 0, json!({}))?;
    let sink = Sink::new(g.out.as_deref())?;
    match command {
        StatsCommand::Acf { input, column, max_lag, every } => {
            let series: Vec<f64> = read_column(input, column)?.into_iter().step_by((*every).max(1)).collect();
            let acf = sample_acf(&series, *max_lag)?;
            let mut body = String::from("lag,acf\n");
            for (k, v) in acf.iter().enumerate() {
                writeln!(body, "{k},{v:.16e}")?;
            }
            sink.table("acf.csv", &body, &mut manifest)?;
        }
        StatsCommand::Slope { input, x, y } => {
            let (slope, se) = loglog_slope(&read_column(input, x)?, &read_column(input, y)?)?;
            sink.table("slope.csv", &format!("slope,stderr\n{slope:.16e},{se:.16e}\n"), &mut manifest)?;
        }
    }
    if g.out.is_some() {
        sink.finish(&manifest)?;
    }
    Ok(Status::Ok)
}

fn validate(g: &Global, suite: SuiteArg, budget: BudgetArg) -> Result<Status> {
    let suite = match suite {
        SuiteArg::Kernels => Suite::Kernels,
        SuiteArg::Fracsub => Suite::Fracsub,
        SuiteArg::Covariance => Suite::Covariance,
        SuiteArg::Ficogarch => Suite::Ficogarch,
        SuiteArg::All => Suite::All,
    };
    let budget = match budget {
        BudgetArg::Quick => Budget::Quick,
        BudgetArg::Full => Budget::Full,
    };
    let reports = run_suite(suite, budget);
    for r in &reports {
        println!("{r}");
    }
    let failed = reports.iter().filter(|r| !r.pass).count();
    println!("{} passed, {failed} failed", reports.len() - failed);
    if let Some(dir) = g.out.as_deref() {
        write_report(dir, suite, budget, &reports)?;
    }
    Ok(if failed == 0 { Status::Ok } else { Status::ValidationFailed })
}

fn write_report(dir: &Path, suite: Suite, budget: Budget, reports: &[ficogarch::validation::CriterionReport]) -> Result<()> {
    let mut manifest = Manifest::new("validate", 0, json!({"suite": suite, "budget": budget}))?;
    manifest.note("criteria", reports)?;
    let sink = Sink::new(Some(dir))?;
    let mut body = String::from("id,name,pass,observed\n");
    for r in reports {
        writeln!(body, "{},\"{}\",{},\"{}\"", r.id, r.name, r.pass, r.observed.replace('"', "'"))?;
    }
    sink.table("validation.csv", &body, &mut manifest)?;
    sink.finish(&manifest)?;
    Ok(())
}
