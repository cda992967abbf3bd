//! Scenario builders, the geometric path-loss model, config files and the
//! figure jobs that write CSV.

mod config;
mod figures;
mod geometry;
mod output;

pub use config::{AngleMode, MisoParams, SimulationConfig, SimulationRun};
pub use figures::{compute_figure, run_figure, Curve, CurveKind, CurvePoint, FigureId, FigureJob};
pub use geometry::{drop_users, place_users_and_path_loss, Geometry, PathLossForm};
pub use output::{format_significant, write_curve_csv, CSV_HEADER};

use serde::{Deserialize, Serialize};

use crate::channel::{FadingSpec, RsConfig, DEFAULT_SPACING};
use crate::numerics::linalg::exponential_correlation;
use crate::scheduler::{
    DirectLink, LinkBudgets, PhaseControl, RsLink, Scenario, Transmitter, UserBudget,
};
use crate::{Error, Result};

/// Seed used when neither the caller nor `RSOBF_SEED` provides one.
pub const DEFAULT_SEED: u64 = 20_200_817;

/// Environment variable that overrides [`DEFAULT_SEED`].
pub const SEED_ENV: &str = "RSOBF_SEED";

/// The seed from `RSOBF_SEED`, or [`DEFAULT_SEED`] when unset.
pub fn default_seed() -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{SEED_ENV}=`{s}` is not an unsigned integer"))),
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_SEED),
        Err(e) => Err(Error::Config(format!("{SEED_ENV}: {e}"))),
    }
}

/// Decibels to a linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Fading family applied to both the RS-user and the BS-user links.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FadingModel {
    Awgn,
    Rayleigh,
    Rician {
        kappa: f64,
        kappa_b: f64,
    },
    /// Exponential correlation `η^|i−j|` across RS elements and BS antennas.
    Correlated {
        eta: f64,
    },
    FullyCorrelated,
}

/// Weights on a multi-antenna direct link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BsWeights {
    /// Fresh random power split and phases every slot.
    Obf,
    /// Equal power steered to `steer_angle`.
    Steered,
}

/// A scenario in which every user sees the same average link SNRs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HomogeneousParams {
    pub users: usize,
    pub subcarriers: usize,
    /// RS elements; zero removes the RS link.
    pub elements: usize,
    pub beta: f64,
    /// Element and antenna spacing in wavelengths.
    pub spacing: f64,
    pub phases: PhaseControl,
    /// Keep the BS-user link.
    pub direct: bool,
    pub antennas: usize,
    pub weights: BsWeights,
    pub steer_angle: f64,
    /// Average SNRs, linear.
    pub rho_r: f64,
    pub rho_b: f64,
    pub fading: FadingModel,
}

impl Default for HomogeneousParams {
    fn default() -> Self {
        Self {
            users: 1,
            subcarriers: 1,
            elements: 0,
            beta: 1.0,
            spacing: DEFAULT_SPACING,
            phases: PhaseControl::Random,
            direct: true,
            antennas: 1,
            weights: BsWeights::Obf,
            steer_angle: 0.0,
            rho_r: 1.0,
            rho_b: 1.0,
            fading: FadingModel::Rayleigh,
        }
    }
}

impl HomogeneousParams {
    pub fn users(mut self, users: usize) -> Self {
        self.users = users;
        self
    }

    pub fn elements(mut self, elements: usize) -> Self {
        self.elements = elements;
        self
    }

    pub fn antennas(mut self, antennas: usize) -> Self {
        self.antennas = antennas;
        self
    }

    pub fn fading(mut self, fading: FadingModel) -> Self {
        self.fading = fading;
        self
    }

    pub fn subcarriers(mut self, subcarriers: usize) -> Self {
        self.subcarriers = subcarriers;
        self
    }

    pub fn phases(mut self, phases: PhaseControl) -> Self {
        self.phases = phases;
        self
    }

    pub fn without_direct(mut self) -> Self {
        self.direct = false;
        self
    }

    fn link_fading(&self, dim: usize, rs_side: bool) -> Result<FadingSpec> {
        Ok(match self.fading {
            FadingModel::Awgn => FadingSpec::Awgn,
            FadingModel::Rayleigh => FadingSpec::Rayleigh,
            FadingModel::Rician { kappa, kappa_b } => FadingSpec::Rician {
                kappa: if rs_side { kappa } else { kappa_b },
            },
            FadingModel::Correlated { eta } => FadingSpec::CorrelatedRayleigh {
                correlation: exponential_correlation(dim, eta)?,
            },
            FadingModel::FullyCorrelated => FadingSpec::FullyCorrelated {
                spacing: self.spacing,
            },
        })
    }

    fn transmitter(&self) -> Transmitter {
        match (self.antennas, self.weights) {
            (1, _) => Transmitter::Single,
            (m, BsWeights::Obf) => Transmitter::Obf { antennas: m },
            (m, BsWeights::Steered) => Transmitter::Steered {
                antennas: m,
                angle: self.steer_angle,
                spacing: self.spacing,
            },
        }
    }
}

/// Scenario with the same `(ρ_R, ρ_B)` for every user.
pub fn build_homogeneous_scenario(params: &HomogeneousParams) -> Result<Scenario> {
    let budget = UserBudget {
        rho_r: params.rho_r,
        rho_b: params.rho_b,
    };
    build_scenario(params, LinkBudgets::Homogeneous(budget))
}

/// Scenario with the links of `params` and explicit budgets, e.g. from
/// [`place_users_and_path_loss`].
pub fn build_scenario(params: &HomogeneousParams, budgets: LinkBudgets) -> Result<Scenario> {
    if let FadingModel::Correlated { eta } = params.fading {
        if !(0.0..1.0).contains(&eta) {
            return Err(Error::Domain {
                name: "eta",
                value: eta,
            });
        }
    }
    let rs = if params.elements > 0 {
        let config = RsConfig::new(params.elements, params.beta)?.with_spacing(params.spacing)?;
        Some(RsLink {
            config,
            fading: params.link_fading(params.elements, true)?,
            phases: params.phases,
        })
    } else {
        None
    };
    let direct = if params.direct {
        if params.antennas == 0 {
            return Err(Error::scenario(
                "the direct link needs at least one antenna",
            ));
        }
        Some(DirectLink {
            fading: params.link_fading(params.antennas, false)?,
            transmitter: params.transmitter(),
        })
    } else {
        None
    };
    let scenario = Scenario {
        users: params.users,
        subcarriers: params.subcarriers,
        budgets,
        rs,
        direct,
    };
    scenario.validate()?;
    Ok(scenario)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::{scaling_law, LawParams, ScalingLaw};
    use crate::scheduler::estimate_sum_rate;

    #[test]
    fn defaults_are_unit_snr_unit_beta_rayleigh() {
        let p = HomogeneousParams::default();
        assert_eq!((p.beta, p.rho_r, p.rho_b), (1.0, 1.0, 1.0));
        assert_eq!(db_to_linear(0.0), 1.0);
        let s = build_homogeneous_scenario(&p.elements(2)).unwrap();
        let rs = s.rs.as_ref().unwrap();
        assert_eq!(rs.config.elements(), 2);
        assert_eq!(rs.fading, FadingSpec::Rayleigh);
        assert_eq!(s.direct.as_ref().unwrap().transmitter, Transmitter::Single);
    }

    #[test]
    fn awgn_single_user_gives_one_bit() {
        let p = HomogeneousParams::default().fading(FadingModel::Awgn);
        let est = estimate_sum_rate(&build_homogeneous_scenario(&p).unwrap(), 100, 3).unwrap();
        assert_eq!(est.mean, 1.0);
        assert_eq!(est.stderr, 0.0);
    }

    #[test]
    fn no_elements_means_no_rs_link_and_the_os_law() {
        let s = build_homogeneous_scenario(&HomogeneousParams::default().users(8)).unwrap();
        assert!(s.rs.is_none());
        let p = LawParams {
            elements: 0.0,
            ..LawParams::default()
        };
        for k in [2, 16, 256] {
            let with_rs = scaling_law(ScalingLaw::RsRayleighDirect, &p, k).unwrap();
            let os = scaling_law(ScalingLaw::OsRayleigh, &p, k).unwrap();
            assert_eq!(with_rs, os);
        }
    }

    #[test]
    fn rician_model_splits_kappas_between_links() {
        let p = HomogeneousParams::default()
            .elements(3)
            .antennas(2)
            .fading(FadingModel::Rician {
                kappa: 10.0,
                kappa_b: 4.0,
            });
        let s = build_homogeneous_scenario(&p).unwrap();
        assert_eq!(s.rs.unwrap().fading, FadingSpec::Rician { kappa: 10.0 });
        let d = s.direct.unwrap();
        assert_eq!(d.fading, FadingSpec::Rician { kappa: 4.0 });
        assert_eq!(d.transmitter, Transmitter::Obf { antennas: 2 });
    }

    #[test]
    fn correlated_model_uses_exponential_correlation() {
        let p = HomogeneousParams::default()
            .elements(3)
            .fading(FadingModel::Correlated { eta: 0.5 });
        let s = build_homogeneous_scenario(&p).unwrap();
        match s.rs.unwrap().fading {
            FadingSpec::CorrelatedRayleigh { correlation } => {
                assert!((correlation[(0, 2)].re - 0.25).abs() < 1e-15);
            }
            other => panic!("unexpected fading {other:?}"),
        }
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        let base = HomogeneousParams::default().elements(2);
        assert!(build_homogeneous_scenario(
            &base.clone().fading(FadingModel::Correlated { eta: 1.0 })
        )
        .is_err());
        assert!(
            build_homogeneous_scenario(&base.clone().fading(FadingModel::Rician {
                kappa: -1.0,
                kappa_b: 0.0
            }))
            .is_err()
        );
        assert!(build_homogeneous_scenario(&HomogeneousParams {
            beta: 1.5,
            ..base.clone()
        })
        .is_err());
        assert!(build_homogeneous_scenario(&base.clone().users(0)).is_err());
        assert!(
            build_homogeneous_scenario(&HomogeneousParams::default().without_direct()).is_err()
        );
        assert!(build_homogeneous_scenario(&HomogeneousParams {
            rho_b: -1.0,
            ..base
        })
        .is_err());
    }

    #[test]
    fn seed_env_override() {
        // Only this test touches the variable.
        std::env::remove_var(SEED_ENV);
        assert_eq!(default_seed().unwrap(), DEFAULT_SEED);
        std::env::set_var(SEED_ENV, " 42 ");
        assert_eq!(default_seed().unwrap(), 42);
        std::env::set_var(SEED_ENV, "x");
        assert!(default_seed().is_err());
        std::env::remove_var(SEED_ENV);
    }
}
