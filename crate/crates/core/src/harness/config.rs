//! TOML simulation configs.
//!
//! A config holds exactly one of `[scenario]` (single-antenna users, any
//! fading family, optional OFDMA) or `[miso]`. `[geometry]` replaces the
//! homogeneous `rho_r`/`rho_b` of `[scenario]` with per-user path-loss
//! budgets. Every key is optional and falls back to its default.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::figures::{Curve, CurveKind, CurvePoint};
use super::{
    build_homogeneous_scenario, build_scenario, place_users_and_path_loss, Geometry,
    HomogeneousParams,
};
use crate::numerics::RngStream;
use crate::scheduler::{
    estimate_miso_sum_rate, estimate_ofdma_sum_rate, estimate_sum_rate, LinkBudgets, LosAngles,
    MisoLink, MisoScenario, PowerConvention, Scenario, SumRateEstimate, UserBudget,
};
use crate::{Error, Result};

/// Stream holding the user drop of geometric scenarios.
pub(super) const PLACEMENT: u64 = 0x706c_6163;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    /// Curve label in the output CSV.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slots: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<HomogeneousParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<Geometry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub miso: Option<MisoParams>,
}

/// BS-side LoS angles of the MISO BS-RS channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AngleMode {
    Grid,
    /// Drawn once per run from the seed.
    Uniform,
    /// Taken from `fixed_angles`.
    Fixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MisoParams {
    pub users: usize,
    pub antennas: usize,
    /// RS elements; zero selects dumb-antenna transmission on the direct
    /// links instead.
    pub elements: usize,
    pub beta: f64,
    pub rho_r: f64,
    pub rho_b: f64,
    pub whitening: bool,
    pub angles: AngleMode,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub fixed_angles: Vec<f64>,
    pub power: PowerConvention,
}

impl Default for MisoParams {
    fn default() -> Self {
        Self {
            users: 1,
            antennas: 1,
            elements: 0,
            beta: 1.0,
            rho_r: 1.0,
            rho_b: 1.0,
            whitening: true,
            angles: AngleMode::Grid,
            fixed_angles: Vec::new(),
            power: PowerConvention::PerAntenna,
        }
    }
}

impl MisoParams {
    pub fn to_scenario(&self) -> Result<MisoScenario> {
        if self.angles != AngleMode::Fixed && !self.fixed_angles.is_empty() {
            return Err(Error::Config(
                "`fixed_angles` needs `angles = \"fixed\"`".into(),
            ));
        }
        let link = if self.elements == 0 {
            MisoLink::BsObf
        } else {
            let angles = match self.angles {
                AngleMode::Grid => LosAngles::Grid,
                AngleMode::Uniform => LosAngles::UniformPerRun,
                AngleMode::Fixed => LosAngles::Fixed(self.fixed_angles.clone()),
            };
            MisoLink::Rs {
                elements: self.elements,
                beta: self.beta,
                angles,
                whitening: self.whitening,
            }
        };
        Ok(MisoScenario {
            users: self.users,
            antennas: self.antennas,
            budget: UserBudget {
                rho_r: self.rho_r,
                rho_b: self.rho_b,
            },
            link,
            power: self.power,
        })
    }
}

/// A config resolved into something the scheduler can run.
#[derive(Debug, Clone, PartialEq)]
pub enum SimulationRun {
    Single(Scenario),
    Miso(MisoScenario),
}

impl SimulationRun {
    pub fn users(&self) -> usize {
        match self {
            SimulationRun::Single(s) => s.users,
            SimulationRun::Miso(m) => m.users,
        }
    }

    pub fn estimate(&self, slots: u64, seed: u64) -> Result<SumRateEstimate> {
        match self {
            SimulationRun::Single(s) => estimate_scenario(s, slots, seed),
            SimulationRun::Miso(m) => estimate_miso_sum_rate(m, slots, seed),
        }
    }
}

/// Single-carrier or OFDMA estimate, whichever the scenario describes.
pub(super) fn estimate_scenario(
    scenario: &Scenario,
    slots: u64,
    seed: u64,
) -> Result<SumRateEstimate> {
    if scenario.subcarriers > 1 {
        estimate_ofdma_sum_rate(scenario, slots, seed)
    } else {
        estimate_sum_rate(scenario, slots, seed)
    }
}

impl SimulationConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.check_sections()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    fn check_sections(&self) -> Result<()> {
        match (&self.scenario, &self.miso) {
            (Some(_), Some(_)) => Err(Error::Config(
                "give either [scenario] or [miso], not both".into(),
            )),
            (None, None) => Err(Error::Config("missing [scenario] or [miso] section".into())),
            (None, Some(_)) if self.geometry.is_some() => Err(Error::Config(
                "[geometry] applies to [scenario] only".into(),
            )),
            _ => Ok(()),
        }
    }

    /// Resolve the config. `seed` fixes the user drop of geometric configs.
    pub fn build(&self, seed: u64) -> Result<SimulationRun> {
        self.check_sections()?;
        if let Some(miso) = &self.miso {
            return Ok(SimulationRun::Miso(miso.to_scenario()?));
        }
        let params = self.scenario.as_ref().expect("checked above");
        let scenario = match &self.geometry {
            Some(g) => {
                let budgets =
                    place_users_and_path_loss(g, params.users, RngStream::new(seed, PLACEMENT))?;
                build_scenario(params, LinkBudgets::PerUser(budgets))?
            }
            None => build_homogeneous_scenario(params)?,
        };
        Ok(SimulationRun::Single(scenario))
    }

    /// Simulate the configured scenario as a one-point curve at `x = K`.
    pub fn run(&self, slots: u64, seed: u64) -> Result<Curve> {
        let run = self.build(seed)?;
        let est = run.estimate(slots, seed)?;
        Ok(Curve {
            label: self.label.clone().unwrap_or_else(|| "simulation".into()),
            kind: CurveKind::Sim,
            points: vec![CurvePoint {
                x: run.users() as f64,
                value: est.mean,
                stderr: est.stderr,
            }],
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::FadingModel;
    use crate::scheduler::PhaseControl;

    const RICIAN: &str = r#"
label = "RS N=2, Rician"
slots = 2000
seed = 11

[scenario]
users = 16
elements = 2
antennas = 2
phases = "random"

[scenario.fading]
kind = "rician"
kappa = 10.0
kappa_b = 10.0
"#;

    #[test]
    fn parses_and_fills_defaults() {
        let c = SimulationConfig::from_toml(RICIAN).unwrap();
        let s = c.scenario.as_ref().unwrap();
        assert_eq!(s.users, 16);
        assert_eq!(s.beta, 1.0);
        assert_eq!(
            s.fading,
            FadingModel::Rician {
                kappa: 10.0,
                kappa_b: 10.0
            }
        );
        assert_eq!(s.phases, PhaseControl::Random);
        assert_eq!(c.slots, Some(2000));
    }

    #[test]
    fn round_trip_gives_the_same_scenario() {
        let geometric =
            format!("{RICIAN}\n[geometry]\ntx_power_dbm = 10.0\npath_loss = \"literal\"\n");
        let miso = "[miso]\nusers = 4\nantennas = 2\nelements = 2\nangles = \"fixed\"\nfixed_angles = [0.1, -0.3]\npower = \"unit-total\"\n";
        let corr = "[scenario]\nusers = 3\nelements = 3\nphases = \"designed\"\n[scenario.fading]\nkind = \"correlated\"\neta = 0.8\n";
        for text in [RICIAN, geometric.as_str(), miso, corr] {
            let first = SimulationConfig::from_toml(text).unwrap();
            let again = SimulationConfig::from_toml(&first.to_toml().unwrap()).unwrap();
            assert_eq!(first, again);
            assert_eq!(first.build(3).unwrap(), again.build(3).unwrap());
        }
    }

    #[test]
    fn geometry_gives_per_user_budgets_fixed_by_seed() {
        let text = format!("{RICIAN}\n[geometry]\n");
        let c = SimulationConfig::from_toml(&text).unwrap();
        let SimulationRun::Single(a) = c.build(1).unwrap() else {
            panic!()
        };
        let SimulationRun::Single(b) = c.build(1).unwrap() else {
            panic!()
        };
        let SimulationRun::Single(other) = c.build(2).unwrap() else {
            panic!()
        };
        assert!(matches!(a.budgets, LinkBudgets::PerUser(ref v) if v.len() == 16));
        assert_eq!(a, b);
        assert_ne!(a, other);
    }

    #[test]
    fn run_is_deterministic() {
        let c = SimulationConfig::from_toml(RICIAN).unwrap();
        let a = c.run(500, 4).unwrap();
        assert_eq!(a, c.run(500, 4).unwrap());
        assert_eq!(a.points[0].x, 16.0);
        assert_eq!(a.label, "RS N=2, Rician");
    }

    #[test]
    fn malformed_configs_are_rejected() {
        for text in [
            "",
            "[scenario]\nusers = 2\n[miso]\n",
            "[miso]\n[geometry]\n",
            "[scenario]\nuser = 2\n",
            "[scenario]\nusers = -2\n",
            "[scenario.fading]\nkind = \"nakagami\"\n",
            "[miso]\nelements = 2\nfixed_angles = [0.0]\n",
        ] {
            assert!(
                SimulationConfig::from_toml(text)
                    .and_then(|c| c.build(0))
                    .is_err(),
                "{text}"
            );
        }
        assert!(SimulationConfig::load(Path::new("/nonexistent/config.toml")).is_err());
    }
}
