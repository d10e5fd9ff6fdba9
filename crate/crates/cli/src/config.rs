//! Experiment configuration: a TOML file with one section per concern, named
//! presets for the standard figures, and `section.key=value` overrides.

use clap::ValueEnum;
use persuade_sis::model::{ModelParams, PopulationState};
use persuade_sis::optimal_control::{OcpSpec, StepScaling};
use persuade_sis::simulate::{ControlSchedule, RelaxOptions, SmithConfig, StageCost};
use persuade_sis::sweep::GridOptions;
use persuade_sis::Exec;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Sne,
    StaticSweep,
    Simulate,
    Optimize,
    Compare,
    GridMui,
    Check,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Sne => "sne",
            Experiment::StaticSweep => "static-sweep",
            Experiment::Simulate => "simulate",
            Experiment::Optimize => "optimize",
            Experiment::Compare => "compare",
            Experiment::GridMui => "grid-mui",
            Experiment::Check => "check",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Static sweep, protection-cost assumption holds.
    #[value(name = "fig1-left")]
    Fig1Left,
    /// Static sweep, protection-cost assumption violated.
    #[value(name = "fig1-right")]
    Fig1Right,
    /// Static versus dynamic signal, plain cost.
    #[value(name = "fig2")]
    Fig2,
    /// Dynamic signal with the fidelity penalty `c = 0.8`.
    #[value(name = "fig3")]
    Fig3,
    /// Two-fidelity relaxation grid.
    #[value(name = "fig4")]
    Fig4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialState {
    pub y: f64,
    pub z_sbar: f64,
    pub z_ibar: f64,
}

impl Default for InitialState {
    fn default() -> Self {
        let s = PopulationState::default();
        InitialState {
            y: s.y,
            z_sbar: s.z_sbar,
            z_ibar: s.z_ibar,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SneOptions {
    /// Defaults to `mu_s_max` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu_s: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepOptions {
    pub mu_min: f64,
    pub mu_max: f64,
    pub step: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            mu_min: 0.01,
            mu_max: 0.96,
            step: 0.005,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateOptions {
    pub horizon: f64,
    pub n_intervals: usize,
    /// Constant signal; defaults to the optimal static signal. Ignored when
    /// `schedule` is given.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu_s: Option<f64>,
    /// Explicit piecewise-constant schedule over `horizon`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Vec<f64>>,
    pub step: f64,
    pub weight: f64,
    /// Keep every `thin`-th trajectory row in the CSV.
    pub thin: usize,
}

impl Default for SimulateOptions {
    fn default() -> Self {
        SimulateOptions {
            horizon: 23.0,
            n_intervals: 46,
            mu_s: None,
            schedule: None,
            step: 1e-3,
            weight: 0.0,
            thin: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizeOptions {
    pub horizon: f64,
    pub n_intervals: usize,
    /// Penalty weight `c` on `(1 - mu_s)^2`; zero gives the plain cost.
    pub weight: f64,
    pub step: f64,
    pub init_mu: f64,
    pub max_iter: usize,
    pub grad_tol: f64,
    pub obj_tol: f64,
    pub fd_delta: f64,
    pub restarts: Vec<f64>,
    pub scaling: StepScaling,
    pub thin: usize,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        let spec = OcpSpec::new(ModelParams::default());
        OptimizeOptions {
            horizon: spec.horizon_t,
            n_intervals: spec.n_intervals,
            weight: 0.0,
            step: spec.step,
            init_mu: 0.5,
            max_iter: spec.solver.max_iter,
            grad_tol: spec.solver.grad_tol,
            obj_tol: spec.solver.obj_tol,
            fd_delta: spec.solver.fd_delta,
            restarts: spec.solver.restarts,
            scaling: spec.solver.scaling,
            thin: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub step: f64,
    pub start: f64,
    pub relax_horizon: f64,
    pub relax_step: f64,
    pub relax_tol: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        let g = GridOptions::default();
        GridSection {
            step: g.step,
            start: g.start,
            relax_horizon: g.relax.horizon,
            relax_step: g.relax.step,
            relax_tol: g.relax.tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub exec: Exec,
    #[serde(default)]
    pub model: ModelParams,
    #[serde(default)]
    pub smith: SmithConfig,
    #[serde(default)]
    pub initial: InitialState,
    #[serde(default)]
    pub sne: SneOptions,
    #[serde(default)]
    pub sweep: SweepOptions,
    #[serde(default)]
    pub simulate: SimulateOptions,
    #[serde(default)]
    pub optimize: OptimizeOptions,
    #[serde(default)]
    pub grid: GridSection,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        ExperimentConfig {
            experiment,
            exec: Exec::default(),
            model: ModelParams::default(),
            smith: SmithConfig::default(),
            initial: InitialState::default(),
            sne: SneOptions::default(),
            sweep: SweepOptions::default(),
            simulate: SimulateOptions::default(),
            optimize: OptimizeOptions::default(),
            grid: GridSection::default(),
        }
    }

    pub fn preset(preset: Preset) -> Self {
        match preset {
            Preset::Fig1Left => ExperimentConfig {
                model: ModelParams::static_sweep_satisfying(),
                ..Self::new(Experiment::StaticSweep)
            },
            Preset::Fig1Right => ExperimentConfig {
                model: ModelParams::static_sweep_violating(),
                ..Self::new(Experiment::StaticSweep)
            },
            Preset::Fig2 => ExperimentConfig {
                model: ModelParams::dynamic_signalling(),
                ..Self::new(Experiment::Compare)
            },
            Preset::Fig3 => {
                let mut c = ExperimentConfig {
                    model: ModelParams::dynamic_signalling(),
                    ..Self::new(Experiment::Optimize)
                };
                c.optimize.weight = 0.8;
                c
            }
            Preset::Fig4 => ExperimentConfig {
                model: ModelParams::static_sweep_satisfying(),
                ..Self::new(Experiment::GridMui)
            },
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    /// SHA-256 of the canonical TOML rendering.
    pub fn hash(&self) -> Result<String, CliError> {
        Ok(hex::encode(Sha256::digest(self.to_toml()?.as_bytes())))
    }

    /// Applies `section.key=value` assignments. Values are read as TOML
    /// literals, falling back to a bare string; the result is re-validated,
    /// so unknown keys are rejected.
    pub fn with_overrides(&self, overrides: &[String]) -> Result<Self, CliError> {
        if overrides.is_empty() {
            return Ok(self.clone());
        }
        let mut root = toml::Table::try_from(self).map_err(|e| CliError::Config(e.to_string()))?;
        for item in overrides {
            let (key, raw) = item.split_once('=').ok_or_else(|| {
                CliError::Config(format!("override `{item}` is not of the form key=value"))
            })?;
            let value = parse_value(raw.trim());
            let path: Vec<&str> = key.trim().split('.').collect();
            set_path(&mut root, &path, value)
                .map_err(|m| CliError::Config(format!("override `{item}`: {m}")))?;
        }
        root.try_into()
            .map_err(|e: toml::de::Error| CliError::Config(e.to_string()))
    }

    pub fn initial_state(&self) -> Result<PopulationState, CliError> {
        PopulationState::new(self.initial.y, self.initial.z_sbar, self.initial.z_ibar)
            .map_err(CliError::from)
    }

    pub fn smith(&self) -> Result<SmithConfig, CliError> {
        SmithConfig::new(self.smith.sigma).map_err(CliError::from)
    }

    pub fn ocp_spec(&self) -> Result<OcpSpec, CliError> {
        let o = &self.optimize;
        let mut spec = OcpSpec::new(self.model);
        spec.smith = self.smith()?;
        spec.horizon_t = o.horizon;
        spec.n_intervals = o.n_intervals;
        spec.stage_cost = if o.weight == 0.0 {
            StageCost::PlainY
        } else {
            StageCost::ModifiedY { weight: o.weight }
        };
        spec.init_state = self.initial_state()?;
        spec.init_guess = ControlSchedule::constant(o.horizon, o.n_intervals, o.init_mu)?;
        spec.step = o.step;
        spec.solver.max_iter = o.max_iter;
        spec.solver.grad_tol = o.grad_tol;
        spec.solver.obj_tol = o.obj_tol;
        spec.solver.fd_delta = o.fd_delta;
        spec.solver.restarts = o.restarts.clone();
        spec.solver.scaling = o.scaling;
        spec.solver.exec = self.exec;
        spec.validate()?;
        Ok(spec)
    }

    pub fn grid_options(&self) -> Result<GridOptions, CliError> {
        let g = &self.grid;
        Ok(GridOptions {
            step: g.step,
            start: g.start,
            smith: self.smith()?,
            init_state: self.initial_state()?,
            relax: RelaxOptions {
                horizon: g.relax_horizon,
                step: g.relax_step,
                tol: g.relax_tol,
            },
            exec: self.exec,
        })
    }
}

fn parse_value(raw: &str) -> toml::Value {
    match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t
            .remove("v")
            .unwrap_or_else(|| toml::Value::String(raw.to_string())),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

fn set_path(table: &mut toml::Table, path: &[&str], value: toml::Value) -> Result<(), String> {
    match path {
        [] => Err("empty key".into()),
        [leaf] => {
            table.insert((*leaf).to_string(), value);
            Ok(())
        }
        [head, rest @ ..] => {
            let entry = table
                .entry((*head).to_string())
                .or_insert_with(|| toml::Value::Table(toml::Table::new()));
            match entry {
                toml::Value::Table(inner) => set_path(inner, rest, value),
                _ => Err(format!("`{head}` is not a section")),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_round_trips() {
        for preset in Preset::value_variants() {
            let c = ExperimentConfig::preset(*preset);
            let text = c.to_toml().unwrap();
            assert_eq!(ExperimentConfig::parse(&text).unwrap(), c, "{preset:?}");
        }
    }

    #[test]
    fn minimal_file_takes_defaults() {
        let c = ExperimentConfig::parse("experiment = \"check\"\n").unwrap();
        assert_eq!(c, ExperimentConfig::new(Experiment::Check));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ExperimentConfig::parse("experiment = \"sne\"\nbogus = 1\n").is_err());
        assert!(ExperimentConfig::parse("experiment = \"sne\"\n[model]\nalpha = 0.4\n").is_err());
        assert!(ExperimentConfig::parse("experiment = \"sne\"\n[sweep]\nstpe = 0.1\n").is_err());
    }

    #[test]
    fn invalid_model_is_a_config_error() {
        let text = "experiment = \"sne\"\n[model]\nalpha = 0.45\ngamma = 0.2\nbeta_p = 0.7\nbeta_u = 0.6\nc_p = 1\nc_u = 2\nloss = 3\n";
        assert!(matches!(
            ExperimentConfig::parse(text),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn overrides_apply_and_validate() {
        let c = ExperimentConfig::preset(Preset::Fig2);
        let o = c
            .with_overrides(&[
                "optimize.weight=0.8".into(),
                "model.c_p=21".into(),
                "exec=sequential".into(),
            ])
            .unwrap();
        assert_eq!(o.optimize.weight, 0.8);
        assert_eq!(o.model.c_p, 21.0);
        assert_eq!(o.exec, Exec::Sequential);
        assert!(c.with_overrides(&["model.nope=1".into()]).is_err());
        assert!(c.with_overrides(&["novalue".into()]).is_err());
        assert!(c.with_overrides(&["sne.mu_s=0.3".into()]).unwrap().sne.mu_s == Some(0.3));
    }

    #[test]
    fn hash_tracks_content() {
        let a = ExperimentConfig::preset(Preset::Fig2);
        let b = a.with_overrides(&["smith.sigma=10".into()]).unwrap();
        assert_eq!(
            a.hash().unwrap(),
            ExperimentConfig::preset(Preset::Fig2).hash().unwrap()
        );
        assert_ne!(a.hash().unwrap(), b.hash().unwrap());
        assert_eq!(a.hash().unwrap().len(), 64);
    }
}
