//! Run configuration: a TOML file layered over the testcase defaults, with
//! command-line overrides applied last.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use voladapt::indicators::IndicatorVariable;
use voladapt::{
    testcase, FluxKind, IndicatorConfig, RkMethod, ShockIndicatorConfig, SmoothScheme, StepController, StepMode, TestCase,
    VolumeMode,
};

use crate::error::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub testcase: Option<String>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    #[serde(default)]
    pub discretization: Discretization,
    #[serde(default)]
    pub time: Time,
    #[serde(default)]
    pub output: Output,
    #[serde(default)]
    pub study: Study,
}

/// Either `cells = 32` or `cells = [32, 16]`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Cells {
    Uniform(usize),
    PerDirection([usize; 2]),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Discretization {
    pub degree: Option<usize>,
    pub cells: Option<Cells>,
    pub surface_flux: Option<String>,
    pub volume_flux: Option<String>,
    pub volume_mode: Option<String>,
    pub sigma: Option<f64>,
    pub indicator_variable: Option<String>,
    pub beta_min: Option<f64>,
    pub beta_max: Option<f64>,
    pub smooth_scheme: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Time {
    pub method: Option<String>,
    pub cfl: Option<f64>,
    pub dt: Option<f64>,
    pub t_final: Option<f64>,
    pub max_steps: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    pub dir: Option<PathBuf>,
    /// Time-series sampling interval in steps.
    pub every: Option<usize>,
    /// Write a snapshot every this many steps; 0 keeps only initial and final.
    pub snapshot_every: Option<usize>,
    /// Keep one row per Runge-Kutta stage.
    pub stages: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Study {
    pub grids: Option<Vec<usize>>,
    pub modes: Option<Vec<String>>,
    /// Conserved variable reported in the convergence table.
    pub variable: Option<usize>,
}

impl ConfigFile {
    pub fn parse(text: &str, origin: &Path) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("{}: {e}", origin.display())))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, path)
    }

    /// Fills every field of `self` that `other` sets.
    pub fn merge(&mut self, other: ConfigFile) {
        fn take<T>(dst: &mut Option<T>, src: Option<T>) {
            if src.is_some() {
                *dst = src;
            }
        }
        take(&mut self.testcase, other.testcase);
        take(&mut self.seed, other.seed);
        take(&mut self.threads, other.threads);
        let (d, o) = (&mut self.discretization, other.discretization);
        take(&mut d.degree, o.degree);
        take(&mut d.cells, o.cells);
        take(&mut d.surface_flux, o.surface_flux);
        take(&mut d.volume_flux, o.volume_flux);
        take(&mut d.volume_mode, o.volume_mode);
        take(&mut d.sigma, o.sigma);
        take(&mut d.indicator_variable, o.indicator_variable);
        take(&mut d.beta_min, o.beta_min);
        take(&mut d.beta_max, o.beta_max);
        take(&mut d.smooth_scheme, o.smooth_scheme);
        let (t, o) = (&mut self.time, other.time);
        take(&mut t.method, o.method);
        take(&mut t.cfl, o.cfl);
        take(&mut t.dt, o.dt);
        take(&mut t.t_final, o.t_final);
        take(&mut t.max_steps, o.max_steps);
        let (w, o) = (&mut self.output, other.output);
        take(&mut w.dir, o.dir);
        take(&mut w.every, o.every);
        take(&mut w.snapshot_every, o.snapshot_every);
        take(&mut w.stages, o.stages);
        let (s, o) = (&mut self.study, other.study);
        take(&mut s.grids, o.grids);
        take(&mut s.modes, o.modes);
        take(&mut s.variable, o.variable);
    }
}

fn field<T: std::str::FromStr<Err = voladapt::Error>>(name: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|e: voladapt::Error| CliError::Config(format!("field '{name}': {e}")))
}

/// A fully resolved setup.
#[derive(Debug, Clone)]
pub struct Setup {
    pub case: TestCase,
    pub max_steps: usize,
    pub seed: u64,
    pub threads: Option<usize>,
    pub output_dir: PathBuf,
    pub every: usize,
    pub snapshot_every: usize,
    pub keep_stages: bool,
    pub grids: Vec<usize>,
    pub modes: Vec<VolumeMode>,
    pub variable: usize,
}

impl Setup {
    pub fn resolve(cfg: &ConfigFile) -> Result<Self, CliError> {
        let id = cfg
            .testcase
            .as_deref()
            .ok_or_else(|| CliError::Config("field 'testcase' is required".into()))?;
        let mut case = testcase(id).map_err(CliError::from)?;
        let d = &cfg.discretization;
        if let Some(p) = d.degree {
            case.degree = p;
        }
        match d.cells {
            Some(Cells::Uniform(n)) => case = case.with_cells(n),
            Some(Cells::PerDirection(c)) => {
                if case.eq.ndims() == 1 && c[1] != 1 {
                    return Err(CliError::Config(format!(
                        "field 'cells': {id} is one-dimensional, got {}x{}",
                        c[0], c[1]
                    )));
                }
                case.cells = c;
            }
            None => {}
        }
        if let Some(s) = &d.surface_flux {
            case.surface_flux = field::<FluxKind>("surface_flux", s)?;
        }
        if let Some(s) = &d.volume_flux {
            case.volume_flux = field::<FluxKind>("volume_flux", s)?;
        }
        let base = case.mode;
        if let Some(s) = &d.volume_mode {
            case.mode = field::<VolumeMode>("volume_mode", s)?;
        }
        case.mode = apply_mode_params(case.mode, base, d)?;

        let t = &cfg.time;
        if let Some(s) = &t.method {
            case.method = field::<RkMethod>("method", s)?;
        }
        match (t.cfl, t.dt) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config("fields 'cfl' and 'dt' are mutually exclusive".into()))
            }
            (Some(c), None) => case.step = StepMode::Cfl(c),
            (None, Some(dt)) => case.step = StepMode::FixedDt(dt),
            (None, None) => {}
        }
        if let Some(tf) = t.t_final {
            case.t_final = tf;
        }
        case.semidiscretization().map_err(CliError::from)?;
        let max_steps = t.max_steps.unwrap_or(10_000_000);
        StepController {
            mode: case.step,
            t_final: case.t_final,
            max_steps,
        }
        .validate()
        .map_err(CliError::from)?;

        let modes = match &cfg.study.modes {
            Some(names) => names
                .iter()
                .map(|s| field::<VolumeMode>("modes", s).and_then(|m| apply_mode_params(m, base, d)))
                .collect::<Result<Vec<_>, _>>()?,
            None => vec![case.mode],
        };
        let variable = cfg.study.variable.unwrap_or(0);
        if variable >= case.eq.nvars() {
            return Err(CliError::Config(format!(
                "field 'variable': {variable} out of range for {} variables",
                case.eq.nvars()
            )));
        }
        let grids = cfg.study.grids.clone().unwrap_or_else(|| {
            let n = case.cells[0];
            vec![n, 2 * n, 4 * n]
        });
        if grids.is_empty() || grids.contains(&0) {
            return Err(CliError::Config("field 'grids' needs positive cell counts".into()));
        }
        Ok(Setup {
            max_steps,
            seed: cfg.seed.unwrap_or(0),
            threads: cfg.threads,
            output_dir: cfg.output.dir.clone().unwrap_or_else(|| PathBuf::from("voladapt-out")),
            every: cfg.output.every.unwrap_or(1).max(1),
            snapshot_every: cfg.output.snapshot_every.unwrap_or(0),
            keep_stages: cfg.output.stages.unwrap_or(true),
            grids,
            modes,
            variable,
            case,
        })
    }
}

/// Applies σ and indicator overrides to the mode they belong to. Shock
/// capturing starts from the testcase's indicator if it has one.
fn apply_mode_params(mode: VolumeMode, base: VolumeMode, d: &Discretization) -> Result<VolumeMode, CliError> {
    let mode = match mode {
        VolumeMode::Adaptive(IndicatorConfig::Heuristic { sigma }) => VolumeMode::heuristic(d.sigma.unwrap_or(sigma)),
        VolumeMode::Adaptive(IndicatorConfig::ShockCapturing(_)) => {
            let mut cfg = match base {
                VolumeMode::Adaptive(IndicatorConfig::ShockCapturing(c)) => c,
                _ => ShockIndicatorConfig::default(),
            };
            if let Some(s) = &d.indicator_variable {
                cfg.variable = field::<IndicatorVariable>("indicator_variable", s)?;
            }
            if let Some(b) = d.beta_min {
                cfg.beta_min = b;
            }
            if let Some(b) = d.beta_max {
                cfg.beta_max = b;
            }
            if let Some(s) = &d.smooth_scheme {
                cfg.smooth = field::<SmoothScheme>("smooth_scheme", s)?;
            }
            VolumeMode::shock_capturing(cfg)
        }
        other => other,
    };
    if let VolumeMode::Adaptive(ind) = &mode {
        ind.validate().map_err(CliError::from)?;
    }
    Ok(mode)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ConfigFile, CliError> {
        ConfigFile::parse(text, Path::new("test.toml"))
    }

    #[test]
    fn defaults_come_from_registry() {
        let s = Setup::resolve(&parse("testcase = \"sod_modified\"").unwrap()).unwrap();
        assert_eq!(s.case.cells, [64, 1]);
        assert_eq!(s.case.t_final, 0.2);
        assert_eq!(s.modes, vec![VolumeMode::rigorous()]);
    }

    #[test]
    fn overrides_apply() {
        let text = r#"
testcase = "khi_2d"
[discretization]
degree = 4
cells = [8, 4]
volume_mode = "adaptive_heuristic"
sigma = 1e-2
[time]
dt = 1e-3
t_final = 0.5
"#;
        let s = Setup::resolve(&parse(text).unwrap()).unwrap();
        assert_eq!(s.case.degree, 4);
        assert_eq!(s.case.cells, [8, 4]);
        assert_eq!(s.case.mode, VolumeMode::heuristic(1e-2));
        assert_eq!(s.case.step, StepMode::FixedDt(1e-3));
    }

    #[test]
    fn shock_parameters_keep_testcase_indicator() {
        let text = "testcase = \"kpp\"\n[discretization]\nbeta_max = 0.3\n";
        let s = Setup::resolve(&parse(text).unwrap()).unwrap();
        let VolumeMode::Adaptive(IndicatorConfig::ShockCapturing(c)) = s.case.mode else {
            panic!("{:?}", s.case.mode)
        };
        assert_eq!(c.beta_max, 0.3);
        assert_eq!(c.variable, IndicatorVariable::Density);
    }

    #[test]
    fn unknown_field_names_line() {
        let err = parse("testcase = \"kpp\"\n[time]\ncfll = 0.3\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("cfll") && msg.contains("line 3"), "{msg}");
    }

    #[test]
    fn bad_values_are_config_errors() {
        for text in [
            "testcase = \"nope\"",
            "testcase = \"kpp\"\n[discretization]\nvolume_flux = \"x\"",
            "testcase = \"kpp\"\n[discretization]\nbeta_min = 0.9\nbeta_max = 0.1",
            "testcase = \"kpp\"\n[time]\ncfl = 0.5\ndt = 0.1",
            "testcase = \"burgers_sine\"\n[discretization]\ncells = [4, 4]",
            "testcase = \"burgers_sine\"\n[discretization]\nvolume_flux = \"ec_kpp\"",
        ] {
            let r = parse(text).and_then(|c| Setup::resolve(&c));
            assert!(matches!(r, Err(CliError::Config(_))), "{text}: {r:?}");
        }
    }
}
