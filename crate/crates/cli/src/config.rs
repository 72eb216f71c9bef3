use std::path::{Path, PathBuf};

use serde::Deserialize;

use pdm_core::exact::{ExactSolutionSpec, Mode, SolutionForm};
use pdm_core::integrate::{IntegratorOptions, Scheme};
use pdm_core::system::{build_system, CustomSpec, Family, KindTag, ParameterSet, PdmSystem, State, SystemSpec};

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub family: Family,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub kind: KindTag,
    #[serde(default)]
    pub params: ParameterSet,
    #[serde(default)]
    pub custom: CustomSpec,
    pub initial: Option<Initial>,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum Initial {
    Explicit {
        x: Vec<f64>,
        v: Vec<f64>,
        #[serde(default)]
        t: f64,
    },
    FromExact {
        from_exact: FromExact,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FromExact {
    pub modes: Vec<Mode>,
    #[serde(default)]
    pub form: SolutionForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeName {
    Adaptive,
    Rk4,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    pub scheme: SchemeName,
    pub h: Option<f64>,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub t_end: Option<f64>,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            scheme: SchemeName::Adaptive,
            h: None,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            h_init: 1e-3,
            h_min: 1e-12,
            h_max: 1.0,
            t_end: None,
            max_steps: 50_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
    #[serde(default = "one")]
    pub stride: usize,
}

fn one() -> usize {
    1
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            path: None,
            format: Format::Csv,
            stride: 1,
        }
    }
}

fn config_error(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(config_error)?;
        if cfg.output.stride == 0 {
            return Err(CliError::Config("output.stride: must be at least 1".into()));
        }
        Ok(cfg)
    }

    pub fn system_spec(&self) -> SystemSpec {
        SystemSpec {
            family: self.family,
            n: self.n,
            kind: self.kind,
            params: self.params.clone(),
            custom: self.custom.clone(),
        }
    }

    pub fn system(&self) -> Result<PdmSystem, CliError> {
        build_system(&self.system_spec()).map_err(config_error)
    }

    /// The closed form named by `initial.from_exact`, if any.
    pub fn exact_spec(&self) -> Result<Option<ExactSolutionSpec>, CliError> {
        let Some(Initial::FromExact { from_exact }) = &self.initial else {
            return Ok(None);
        };
        let mut spec = ExactSolutionSpec::new(self.family, self.params.clone(), from_exact.modes.clone());
        spec.form = from_exact.form;
        spec.validate()
            .map_err(|e| CliError::Config(format!("initial.from_exact: {e}")))?;
        Ok(Some(spec))
    }

    pub fn initial_state(&self) -> Result<State, CliError> {
        match &self.initial {
            None => Err(CliError::Config("missing field `initial`".into())),
            Some(Initial::Explicit { x, v, t }) => {
                if x.len() != v.len() {
                    return Err(CliError::Config("initial: x and v must have the same length".into()));
                }
                Ok(State::new(*t, x.clone(), v.clone()))
            }
            Some(Initial::FromExact { .. }) => {
                let spec = self.exact_spec()?.expect("from_exact");
                pdm_core::exact::exact_solution(&spec, 0.0)
                    .map_err(|e| CliError::Config(format!("initial.from_exact: {e}")))
            }
        }
    }

    pub fn t_end(&self) -> Result<f64, CliError> {
        self.integrator
            .t_end
            .ok_or_else(|| CliError::Config("missing field `integrator.t_end`".into()))
    }

    pub fn integrator_options(&self, t0: f64) -> Result<IntegratorOptions, CliError> {
        let c = &self.integrator;
        let scheme = match c.scheme {
            SchemeName::Rk4 => Scheme::FixedRk4 {
                h: c.h.ok_or_else(|| CliError::Config("missing field `integrator.h` for rk4".into()))?,
            },
            SchemeName::Adaptive => Scheme::Adaptive45 {
                rel_tol: c.rel_tol,
                abs_tol: c.abs_tol,
                h_init: c.h_init,
                h_min: c.h_min,
                h_max: c.h_max,
            },
        };
        let opts = IntegratorOptions {
            scheme,
            t_end: self.t_end()?,
            max_steps: c.max_steps,
        };
        opts.validate(t0).map_err(config_error)?;
        Ok(opts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explicit_and_exact_initial_conditions() {
        let cfg = RunConfig::parse(
            r#"{"family": "ml1", "params": {"omega": [1], "lambda": 1, "sign": "+"},
                "initial": {"x": [1], "v": [0]}, "integrator": {"t_end": 1}}"#,
        )
        .unwrap();
        assert_eq!(cfg.initial_state().unwrap().x, vec![1.0]);
        let cfg = RunConfig::parse(
            r#"{"family": "ml1", "params": {"omega": [1], "lambda": 1, "sign": "+"},
                "initial": {"from_exact": {"modes": [{"amplitude": 1}]}}, "integrator": {"t_end": 1}}"#,
        )
        .unwrap();
        assert_eq!(cfg.initial_state().unwrap().x, vec![1.0]);
    }

    #[test]
    fn unknown_keys_are_positioned_errors() {
        let err = RunConfig::parse("{\"family\": \"ml1\",\n \"omgea\": 1}").unwrap_err();
        let CliError::Config(msg) = err else { panic!() };
        assert!(msg.contains("omgea") && msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn missing_omega_is_named() {
        let cfg = RunConfig::parse(r#"{"family": "morse", "params": {"zeta": [1]}}"#).unwrap();
        let CliError::Config(msg) = cfg.system().unwrap_err() else { panic!() };
        assert!(msg.contains("omega"), "{msg}");
    }

    #[test]
    fn rk4_needs_a_step() {
        let cfg = RunConfig::parse(r#"{"family": "ml1", "integrator": {"scheme": "rk4", "t_end": 1}}"#).unwrap();
        assert!(cfg.integrator_options(0.0).is_err());
    }
}
