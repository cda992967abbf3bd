use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::engine::{par_slots, summarize, Simulator, FADING, PHASES, SLOT, STATIC};
use super::scenario::{DirectLink, LinkBudgets, Scenario, Transmitter, UserBudget};
use super::{schedule_slot, slot_rate, SumRateEstimate};
use crate::beamforming::{random_phase_schedule, whitening_transform, WhiteningTransform};
use crate::channel::{
    los_correlation, los_matrix, miso_cascade, FadingSpec, SlotRealization, UserFading,
};
use crate::numerics::linalg::CMatrix;
use crate::numerics::RngStream;
use crate::{Error, Result};

const ANGLES: u64 = 2;

/// BS-side LoS angles `ϑ′ₙ` of the `M × N` BS-RS channel.
#[derive(Debug, Clone, PartialEq)]
pub enum LosAngles {
    /// `sin ϑ′ₙ = (n−1)/N`: mutually orthogonal array responses, so the
    /// LoS correlation is the identity whenever `M ≤ N`.
    Grid,
    Fixed(Vec<f64>),
    /// Uniform on `[−π/2, π/2)`, drawn once per run from the seed.
    UniformPerRun,
}

/// Transmit power bookkeeping with `M` antennas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PowerConvention {
    /// Unit power per antenna, so total power grows with `M`.
    PerAntenna,
    /// Unit total power, split over the antennas.
    UnitTotal,
}

impl PowerConvention {
    fn scale(self, antennas: usize) -> f64 {
        match self {
            PowerConvention::PerAntenna => 1.0,
            PowerConvention::UnitTotal => 1.0 / antennas as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MisoLink {
    /// Transmission over the RS only, Rayleigh RS-user fading, with or
    /// without whitening at the BS.
    Rs {
        elements: usize,
        beta: f64,
        angles: LosAngles,
        whitening: bool,
    },
    /// Direct Rayleigh links with dumb-antenna weights.
    BsObf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MisoScenario {
    pub users: usize,
    pub antennas: usize,
    pub budget: UserBudget,
    pub link: MisoLink,
    pub power: PowerConvention,
}

#[derive(Debug, Clone)]
pub enum MisoSimulator {
    Direct(Simulator),
    Rs(RsMiso),
}

#[derive(Debug, Clone)]
pub struct RsMiso {
    users: usize,
    h1: CMatrix,
    whitening: Option<WhiteningTransform>,
    beta: f64,
    rho_r: f64,
    power_scale: f64,
    slots: RngStream,
    seed: u64,
}

impl MisoSimulator {
    pub fn new(scenario: &MisoScenario, seed: u64) -> Result<Self> {
        let m = scenario.antennas;
        if scenario.users == 0 || m == 0 {
            return Err(Error::scenario(
                "MISO needs at least one user and one antenna",
            ));
        }
        let scale = scenario.power.scale(m);
        match &scenario.link {
            MisoLink::BsObf => {
                let transmitter = if m == 1 {
                    Transmitter::Single
                } else {
                    Transmitter::Obf { antennas: m }
                };
                let single = Scenario {
                    users: scenario.users,
                    subcarriers: 1,
                    budgets: LinkBudgets::Homogeneous(UserBudget {
                        rho_r: 0.0,
                        rho_b: scenario.budget.rho_b * scale,
                    }),
                    rs: None,
                    direct: Some(DirectLink {
                        fading: FadingSpec::Rayleigh,
                        transmitter,
                    }),
                };
                Ok(MisoSimulator::Direct(Simulator::new(&single, seed)?))
            }
            MisoLink::Rs {
                elements,
                beta,
                angles,
                whitening,
            } => {
                let n = *elements;
                crate::beamforming::check_beta(*beta)?;
                if n == 0 {
                    return Err(Error::scenario("the RS needs at least one element"));
                }
                let angles = match angles {
                    LosAngles::Grid => (0..n).map(|i| (i as f64 / n as f64).asin()).collect(),
                    LosAngles::Fixed(a) => {
                        if a.len() != n {
                            return Err(Error::DimensionMismatch {
                                expected: n,
                                got: a.len(),
                            });
                        }
                        a.clone()
                    }
                    LosAngles::UniformPerRun => {
                        let mut rng = RngStream::new(seed, STATIC).substream(ANGLES).rng();
                        (0..n)
                            .map(|_| rng.random::<f64>() * 2.0 * FRAC_PI_2 - FRAC_PI_2)
                            .collect()
                    }
                };
                let h1 = los_matrix(m, &angles)?;
                let whitening = if *whitening {
                    Some(whitening_transform(&los_correlation(&h1), m)?)
                } else {
                    None
                };
                let rho_r = scenario.budget.rho_r;
                if !(rho_r >= 0.0) || !rho_r.is_finite() {
                    return Err(Error::Domain {
                        name: "rho_r",
                        value: rho_r,
                    });
                }
                Ok(MisoSimulator::Rs(RsMiso {
                    users: scenario.users,
                    h1,
                    whitening,
                    beta: *beta,
                    rho_r,
                    power_scale: scale,
                    slots: RngStream::new(seed, SLOT),
                    seed,
                }))
            }
        }
    }

    pub fn slot(&self, t: u64) -> Result<SlotRealization> {
        match self {
            MisoSimulator::Direct(sim) => Ok(sim.slot(t)?.remove(0)),
            MisoSimulator::Rs(rs) => rs.slot(t),
        }
    }

    pub fn estimate(&self, n_slots: u64) -> Result<SumRateEstimate> {
        let rates = par_slots(n_slots, |t| {
            let s = self.slot(t)?;
            Ok(slot_rate(s.snrs[schedule_slot(&s.snrs)?]))
        })?;
        let seed = match self {
            MisoSimulator::Direct(sim) => sim.estimate_seed(),
            MisoSimulator::Rs(rs) => rs.seed,
        };
        Ok(summarize(&rates, seed))
    }
}

impl RsMiso {
    /// `ζ` of the whitening transform, if whitening is on.
    pub fn zeta(&self) -> Option<f64> {
        self.whitening.as_ref().map(|w| w.zeta())
    }

    /// LoS correlation `R = H₁H₁^H / N`.
    pub fn correlation(&self) -> CMatrix {
        los_correlation(&self.h1)
    }

    fn slot(&self, t: u64) -> Result<SlotRealization> {
        let stream = self.slots.substream(t);
        let n = self.h1.ncols();
        let v = random_phase_schedule(n, self.beta, &mut stream.substream(PHASES).rng())?;
        // Same draw order as a single-carrier slot: subcarrier 0, users in turn.
        let mut rng = stream.substream(FADING).substream(0).rng();
        let fading = UserFading::Rayleigh { dim: n };
        let amplitude = Complex64::from(self.power_scale.sqrt());
        let gains = (0..self.users)
            .map(|_| {
                let h = miso_cascade(self.rho_r, &self.h1, &v, &fading.sample(&mut rng))?;
                let h = match &self.whitening {
                    Some(w) => w.apply(&h),
                    None => h,
                };
                Ok(h * amplitude)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SlotRealization::from_vectors(t, 0, gains))
    }
}

/// Average MISO sum rate under the scenario's link and power convention.
pub fn estimate_miso_sum_rate(
    scenario: &MisoScenario,
    n_slots: u64,
    seed: u64,
) -> Result<SumRateEstimate> {
    MisoSimulator::new(scenario, seed)?.estimate(n_slots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::SnrDistribution;
    use crate::channel::RsConfig;
    use crate::numerics::stats::ks_statistic;
    use crate::scheduler::{estimate_sum_rate, PhaseControl, RsLink};

    fn rs_miso(
        users: usize,
        antennas: usize,
        elements: usize,
        angles: LosAngles,
        whitening: bool,
    ) -> MisoScenario {
        MisoScenario {
            users,
            antennas,
            budget: UserBudget {
                rho_r: 1.0,
                rho_b: 1.0,
            },
            link: MisoLink::Rs {
                elements,
                beta: 1.0,
                angles,
                whitening,
            },
            power: PowerConvention::PerAntenna,
        }
    }

    #[test]
    fn single_antenna_reduces_to_single_carrier_estimator() {
        let scalar = Scenario {
            users: 16,
            subcarriers: 1,
            budgets: LinkBudgets::Homogeneous(UserBudget {
                rho_r: 1.0,
                rho_b: 1.0,
            }),
            rs: Some(RsLink {
                config: RsConfig::new(3, 1.0).unwrap(),
                fading: FadingSpec::Rayleigh,
                phases: PhaseControl::Random,
            }),
            direct: None,
        };
        for whitening in [false, true] {
            let miso = estimate_miso_sum_rate(
                &rs_miso(16, 1, 3, LosAngles::UniformPerRun, whitening),
                2000,
                8,
            )
            .unwrap();
            let base = estimate_sum_rate(&scalar, 2000, 8).unwrap();
            assert!((miso.mean - base.mean).abs() < 1e-12, "{miso:?} {base:?}");
        }
        let bs = MisoScenario {
            link: MisoLink::BsObf,
            ..rs_miso(16, 1, 3, LosAngles::Grid, false)
        };
        let direct = Scenario {
            rs: None,
            direct: Some(DirectLink {
                fading: FadingSpec::Rayleigh,
                transmitter: Transmitter::Single,
            }),
            ..scalar
        };
        assert_eq!(
            estimate_miso_sum_rate(&bs, 2000, 8).unwrap(),
            estimate_sum_rate(&direct, 2000, 8).unwrap()
        );
    }

    #[test]
    fn whitened_snr_is_scaled_chi_square() {
        let sc = rs_miso(1, 3, 4, LosAngles::UniformPerRun, true);
        let MisoSimulator::Rs(sim) = MisoSimulator::new(&sc, 31).unwrap() else {
            unreachable!()
        };
        let zeta = sim.zeta().unwrap();
        assert!(zeta < 1.0);
        let law = SnrDistribution::gamma(3, zeta * 4.0).unwrap();
        let mut draws: Vec<f64> = (0..200_000).map(|t| sim.slot(t).unwrap().snrs[0]).collect();
        let d = ks_statistic(&mut draws, |x| law.cdf(x));
        assert!(d < 0.005, "KS {d}");
    }

    #[test]
    fn grid_angles_give_identity_correlation() {
        let MisoSimulator::Rs(sim) =
            MisoSimulator::new(&rs_miso(1, 2, 4, LosAngles::Grid, true), 0).unwrap()
        else {
            unreachable!()
        };
        let r = sim.correlation();
        assert!((r - CMatrix::identity(2, 2)).norm() < 1e-12);
        assert!((sim.zeta().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unit_total_power_divides_every_snr_by_m() {
        let per = rs_miso(5, 2, 2, LosAngles::Grid, true);
        let unit = MisoScenario {
            power: PowerConvention::UnitTotal,
            ..per.clone()
        };
        let a = MisoSimulator::new(&per, 3).unwrap();
        let b = MisoSimulator::new(&unit, 3).unwrap();
        for t in 0..50 {
            let (sa, sb) = (a.slot(t).unwrap(), b.slot(t).unwrap());
            for (x, y) in sa.snrs.iter().zip(&sb.snrs) {
                assert!((x / 2.0 - y).abs() <= 1e-12 * x);
            }
        }
    }

    #[test]
    fn whitening_rejects_rank_deficient_correlation() {
        // Four antennas but only two elements: R has rank two.
        let err = MisoSimulator::new(&rs_miso(1, 4, 2, LosAngles::Grid, true), 0).unwrap_err();
        assert!(matches!(err, Error::Singular(_)), "{err}");
        assert!(MisoSimulator::new(&rs_miso(1, 4, 2, LosAngles::Grid, false), 0).is_ok());
        assert!(
            MisoSimulator::new(&rs_miso(1, 2, 3, LosAngles::Fixed(vec![0.0; 2]), false), 0)
                .is_err()
        );
    }
}
