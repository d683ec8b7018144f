use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use fbl_core::solver::{Integrator, SolverConfig};
use fbl_core::{BesovSpec, DomainSpec, EvolutionParams, GridFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Lebesgue and summation exponents: JSON numbers, or the string `"inf"`.
pub mod exponent {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*x)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(x),
            Raw::Str(s) if matches!(s.as_str(), "inf" | "infinity" | "Infinity") => Ok(f64::INFINITY),
            Raw::Str(s) => Err(de::Error::custom(format!("expected a number or \"inf\", got {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Solve,
    Picard,
    LpAnalyze,
    ModulusCheck,
    CommutatorTest,
    AprioriScan,
    NegativityScan,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Solve => "solve",
            ExperimentKind::Picard => "picard",
            ExperimentKind::LpAnalyze => "lp-analyze",
            ExperimentKind::ModulusCheck => "modulus-check",
            ExperimentKind::CommutatorTest => "commutator-test",
            ExperimentKind::AprioriScan => "apriori-scan",
            ExperimentKind::NegativityScan => "negativity-scan",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    pub length: f64,
    pub points: usize,
    pub alpha: f64,
    pub nu: f64,
    pub t_end: f64,
    pub dt: Option<f64>,
    pub cfl: f64,
    pub snapshot_stride: usize,
    pub integrator: Integrator,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            length: 2.0 * PI,
            points: 256,
            alpha: 1.0,
            nu: 1.0,
            t_end: 1.0,
            dt: None,
            cfl: 0.4,
            snapshot_stride: 10,
            integrator: Integrator::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    Sine,
    TwoMode,
    GaussianBump,
    SteepTanh,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialData {
    pub profile: Profile,
    pub amplitude: f64,
    /// Added after the profile is built.
    pub mean: f64,
    pub seed: u64,
}

impl Default for InitialData {
    fn default() -> Self {
        Self {
            profile: Profile::Sine,
            amplitude: 1.0,
            mean: 0.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BesovSetting {
    pub s: f64,
    #[serde(with = "exponent")]
    pub p: f64,
    #[serde(with = "exponent")]
    pub r: f64,
}

impl From<BesovSetting> for BesovSpec {
    fn from(b: BesovSetting) -> Self {
        BesovSpec { s: b.s, p: b.p, r: b.r }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct XiGrid {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Default for XiGrid {
    fn default() -> Self {
        Self {
            lo: 1e-3,
            hi: 1e6,
            count: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisSettings {
    pub besov: Vec<BesovSetting>,
    pub xi0: f64,
    pub betas: Vec<f64>,
    pub quad_tol: f64,
    pub xi_grid: XiGrid,
    pub picard_iters: usize,
    pub picard_coupled: bool,
    /// Fit window of the block decay rates, in e-folds of the shell centre.
    pub decay_horizon: f64,
    pub decay_points: usize,
    /// Random pairs for `commutator-test`.
    pub pairs: usize,
    /// Ensemble size for `apriori-scan`.
    pub members: usize,
    #[serde(with = "exponent")]
    pub rho: f64,
    #[serde(with = "exponent")]
    pub rho1: f64,
    #[serde(with = "exponent")]
    pub p1: f64,
}

impl Default for AnalysisSettings {
    fn default() -> Self {
        Self {
            besov: vec![BesovSetting { s: 0.5, p: 2.0, r: 1.0 }],
            xi0: 1e10,
            betas: vec![1.0],
            quad_tol: 1e-8,
            xi_grid: XiGrid::default(),
            picard_iters: 5,
            picard_coupled: true,
            decay_horizon: 0.5,
            decay_points: 6,
            pairs: 10,
            members: 20,
            rho: f64::INFINITY,
            rho1: 1.0,
            p1: f64::INFINITY,
        }
    }
}

/// One experiment, with every default materialized after loading.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub solver: SolverSettings,
    #[serde(default)]
    pub initial: InitialData,
    #[serde(default)]
    pub analysis: AnalysisSettings,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn check(ok: bool, field: &str, reason: impl FnOnce() -> String) -> CliResult<()> {
    if ok {
        Ok(())
    } else {
        Err(CliError::invalid(field, reason()))
    }
}

fn positive(x: f64, field: &str) -> CliResult<()> {
    check(x.is_finite() && x > 0.0, field, || format!("must be positive and finite, got {x}"))
}

fn exponent_ok(x: f64, field: &str) -> CliResult<()> {
    check(x >= 1.0, field, || format!("must lie in [1, inf], got {x}"))
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::Input(format!("malformed config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        let s = &self.solver;
        positive(s.length, "solver.length")?;
        check(s.points >= 8 && s.points.is_power_of_two(), "solver.points", || {
            format!("must be a power of two >= 8, got {}", s.points)
        })?;
        check((0.0..=2.0).contains(&s.alpha), "solver.alpha", || {
            format!("must lie in [0, 2], got {}", s.alpha)
        })?;
        check(s.nu.is_finite() && s.nu >= 0.0, "solver.nu", || {
            format!("must be nonnegative, got {}", s.nu)
        })?;
        positive(s.t_end, "solver.t_end")?;
        if let Some(dt) = s.dt {
            positive(dt, "solver.dt")?;
        }
        positive(s.cfl, "solver.cfl")?;
        check(s.snapshot_stride >= 1, "solver.snapshot_stride", || "must be at least 1".into())?;
        check(self.initial.amplitude.is_finite(), "initial.amplitude", || "must be finite".into())?;
        check(self.initial.mean.is_finite(), "initial.mean", || "must be finite".into())?;

        let a = &self.analysis;
        for (i, b) in a.besov.iter().enumerate() {
            check(b.s.is_finite(), &format!("analysis.besov[{i}].s"), || "must be finite".into())?;
            exponent_ok(b.p, &format!("analysis.besov[{i}].p"))?;
            exponent_ok(b.r, &format!("analysis.besov[{i}].r"))?;
        }
        check(a.xi0.is_finite() && a.xi0 > 1.0, "analysis.xi0", || {
            format!("must be finite and > 1, got {}", a.xi0)
        })?;
        for (i, &b) in a.betas.iter().enumerate() {
            positive(b, &format!("analysis.betas[{i}]"))?;
        }
        check(a.quad_tol >= 1e-12 && a.quad_tol < 1.0, "analysis.quad_tol", || {
            format!("must lie in [1e-12, 1), got {}", a.quad_tol)
        })?;
        positive(a.xi_grid.lo, "analysis.xi_grid.lo")?;
        check(a.xi_grid.hi.is_finite() && a.xi_grid.hi >= a.xi_grid.lo, "analysis.xi_grid.hi", || {
            "must be finite and >= lo".into()
        })?;
        positive(a.decay_horizon, "analysis.decay_horizon")?;
        check(a.decay_points >= 3, "analysis.decay_points", || "must be at least 3".into())?;
        exponent_ok(a.rho, "analysis.rho")?;
        exponent_ok(a.rho1, "analysis.rho1")?;
        exponent_ok(a.p1, "analysis.p1")?;

        match self.kind {
            ExperimentKind::Picard => {
                check(a.picard_iters >= 1, "analysis.picard_iters", || "must be at least 1".into())
            }
            ExperimentKind::CommutatorTest => check(a.pairs >= 1, "analysis.pairs", || "must be at least 1".into()),
            ExperimentKind::AprioriScan => {
                check(a.members >= 1, "analysis.members", || "must be at least 1".into())?;
                check(!a.besov.is_empty(), "analysis.besov", || "needs at least one entry".into())
            }
            ExperimentKind::LpAnalyze => check(!a.besov.is_empty(), "analysis.besov", || {
                "needs at least one entry".into()
            }),
            _ => Ok(()),
        }
    }

    pub fn domain(&self) -> DomainSpec {
        DomainSpec {
            length: self.solver.length,
            points: self.solver.points,
        }
    }

    pub fn params(&self) -> EvolutionParams {
        EvolutionParams {
            alpha: self.solver.alpha,
            nu: self.solver.nu,
        }
    }

    pub fn solver_config(&self) -> SolverConfig {
        let s = &self.solver;
        let mut cfg = SolverConfig::new(self.domain(), self.params(), s.t_end)
            .with_cfl(s.cfl)
            .with_stride(s.snapshot_stride)
            .with_integrator(s.integrator);
        cfg.dt = s.dt;
        cfg
    }

    /// Initial data on the configured grid; random features come from `initial.seed`.
    pub fn initial_data(&self) -> CliResult<GridFunction> {
        let d = self.domain();
        let init = &self.initial;
        let mut rng = ChaCha8Rng::seed_from_u64(init.seed);
        let k0 = 2.0 * PI / d.length;
        let a = init.amplitude;
        let u = match init.profile {
            Profile::Sine => GridFunction::from_fn(d, |x| a * (k0 * x).sin())?,
            Profile::TwoMode => {
                let (p1, p2) = (rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..2.0 * PI));
                GridFunction::from_fn(d, |x| a * ((k0 * x + p1).sin() + 0.5 * (2.0 * k0 * x + p2).sin()))?
            }
            Profile::GaussianBump => {
                let c = rng.gen_range(0.0..d.length);
                let w = d.length / 16.0;
                GridFunction::from_fn(d, |x| {
                    let r = (x - c).rem_euclid(d.length);
                    let r = r.min(d.length - r);
                    a * (-0.5 * (r / w).powi(2)).exp()
                })?
                .subtract_mean()
            }
            Profile::SteepTanh => {
                let p = rng.gen_range(0.0..2.0 * PI);
                GridFunction::from_fn(d, |x| a * (10.0 * (k0 * x + p).sin()).tanh())?
            }
        };
        Ok(u.add(&GridFunction::constant(d, init.mean)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_materialize() {
        let cfg = ExperimentConfig::parse(r#"{"kind": "solve"}"#).unwrap();
        assert_eq!(cfg.solver, SolverSettings::default());
        let text = serde_json::to_string(&cfg).unwrap();
        assert!(text.contains("\"rho\":\"inf\""));
        assert_eq!(ExperimentConfig::parse(&text).unwrap(), cfg);
    }

    #[test]
    fn field_level_errors() {
        let err = ExperimentConfig::parse(r#"{"kind": "solve", "solver": {"alpha": 3}}"#).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert!(err.to_string().contains("solver.alpha"));
        let err = ExperimentConfig::parse(r#"{"kind": "solve", "solver": {"points": 100}}"#).unwrap_err();
        assert!(err.to_string().contains("solver.points"));
        let err = ExperimentConfig::parse(r#"{"kind": "nope"}"#).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let err = ExperimentConfig::parse(r#"{"kind": "solve", "extra": 1}"#).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn seeded_profiles_are_reproducible() {
        let mut cfg = ExperimentConfig::parse(r#"{"kind": "solve", "initial": {"profile": "two-mode", "seed": 7}}"#).unwrap();
        let a = cfg.initial_data().unwrap();
        assert_eq!(a, cfg.initial_data().unwrap());
        cfg.initial.seed = 8;
        assert_ne!(a, cfg.initial_data().unwrap());
        for profile in [Profile::Sine, Profile::GaussianBump, Profile::SteepTanh] {
            cfg.initial.profile = profile;
            let u = cfg.initial_data().unwrap();
            assert!(u.mean().abs() < 1e-12 && u.sup_norm() > 0.1);
        }
    }
}
