//! Sweep specifications: the JSON file schema and its mapping onto the
//! core sweep types.

use std::path::Path;

use diqkd_core::{
    ChannelModel, OptimizeFlags, RateProblem, SweepParameter, SweepScenario, SweepSpec,
};
use serde::Deserialize;

use crate::AppError;

type AppResult<T> = std::result::Result<T, AppError>;

fn one() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub parameter: String,
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub scenario: ScenarioSpec,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub kind: String,
    #[serde(default)]
    pub model: Option<ModelSpec>,
    #[serde(default)]
    pub q: f64,
    #[serde(default = "one")]
    pub alpha: f64,
    #[serde(default)]
    pub s: f64,
    #[serde(default)]
    pub optimize: Vec<String>,
    #[serde(default)]
    pub maxq: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub name: String,
    #[serde(default)]
    pub delta: f64,
    #[serde(default = "one")]
    pub eta: f64,
    #[serde(default)]
    pub theta: f64,
    #[serde(default)]
    pub phi_a: f64,
    #[serde(default = "one")]
    pub visibility: f64,
    #[serde(default)]
    pub bob_optimal: bool,
}

pub fn parse_parameter(name: &str) -> AppResult<SweepParameter> {
    Ok(match name {
        "delta" => SweepParameter::Delta,
        "eta" => SweepParameter::Eta,
        "s" => SweepParameter::S,
        "alpha" => SweepParameter::Alpha,
        "q" => SweepParameter::Q,
        "theta" => SweepParameter::Theta,
        other => {
            return Err(AppError::Validation(format!(
                "unknown sweep parameter '{other}' (expected delta, eta, s, alpha, q, theta)"
            )))
        }
    })
}

pub fn parse_flags(names: &[String]) -> AppResult<OptimizeFlags> {
    let mut flags = OptimizeFlags::default();
    for name in names {
        match name.as_str() {
            "alpha" => flags.alpha = true,
            "q" => flags.q = true,
            "theta" => flags.theta = true,
            "phi-a" | "phi_a" => flags.phi_a = true,
            other => {
                return Err(AppError::Validation(format!(
                    "unknown optimize flag '{other}' (expected alpha, q, theta, phi-a)"
                )))
            }
        }
    }
    Ok(flags)
}

impl ModelSpec {
    pub fn to_model(&self) -> AppResult<ChannelModel> {
        let model = match self.name.as_str() {
            "depolarizing" => ChannelModel::Depolarizing {
                delta: self.delta,
                bob_optimal: self.bob_optimal,
            },
            "loss-maxent" => ChannelModel::LossMaxEntangled {
                eta: self.eta,
                bob_optimal: self.bob_optimal,
                visibility: self.visibility,
            },
            "loss-partial" => ChannelModel::LossPartialEntangled {
                eta: self.eta,
                theta: self.theta,
                phi_a: self.phi_a,
                visibility: self.visibility,
            },
            other => {
                return Err(AppError::Validation(format!(
                    "unknown model '{other}' (expected depolarizing, loss-maxent, loss-partial)"
                )))
            }
        };
        model.validate()?;
        Ok(model)
    }
}

impl SpecFile {
    pub fn load(path: &Path) -> AppResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| AppError::Validation(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| AppError::Validation(format!("bad sweep spec: {e}")))
    }

    pub fn to_sweep(&self) -> AppResult<SweepSpec> {
        let parameter = parse_parameter(&self.parameter)?;
        let scenario = match self.scenario.kind.as_str() {
            "bound" => SweepScenario::Bound {
                q: self.scenario.q,
                alpha: self.scenario.alpha,
                s: self.scenario.s,
            },
            "best-alpha" => SweepScenario::BestAlpha { q: self.scenario.q },
            "rate" | "critical-eta" => {
                let model = self
                    .scenario
                    .model
                    .as_ref()
                    .ok_or_else(|| {
                        AppError::Validation("rate sweeps need a \"model\" object".into())
                    })?
                    .to_model()?;
                let problem = RateProblem {
                    template: model,
                    flags: parse_flags(&self.scenario.optimize)?,
                    q: self.scenario.q,
                    alpha: self.scenario.alpha,
                    maxq: self.scenario.maxq,
                };
                if self.scenario.kind == "rate" {
                    SweepScenario::Rate(problem)
                } else {
                    SweepScenario::CriticalEta(problem)
                }
            }
            other => {
                return Err(AppError::Validation(format!(
                "unknown scenario kind '{other}' (expected bound, best-alpha, rate, critical-eta)"
            )))
            }
        };
        let spec = SweepSpec {
            parameter,
            lo: self.lo,
            hi: self.hi,
            points: self.points,
            scenario,
        };
        spec.validate()?;
        Ok(spec)
    }
}
