use serde::{Deserialize, Serialize};

use crate::channel::{FadingSpec, RsConfig};
use crate::{Error, Result};

/// Average link SNRs (linear) of one user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserBudget {
    /// RS-assisted link.
    pub rho_r: f64,
    /// Direct BS-user link.
    pub rho_b: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LinkBudgets {
    /// Same budget for every user.
    Homogeneous(UserBudget),
    /// One budget per user, e.g. from path loss.
    PerUser(Vec<UserBudget>),
}

impl LinkBudgets {
    pub fn user(&self, k: usize) -> UserBudget {
        match self {
            LinkBudgets::Homogeneous(b) => *b,
            LinkBudgets::PerUser(v) => v[k],
        }
    }
}

/// How the RS phases are chosen in each slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseControl {
    /// Fresh uniform phases every slot.
    Random,
    /// Fixed phases from the dominant eigenvector of the effective
    /// correlation (needs Rayleigh or correlated Rayleigh RS fading).
    Designed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RsLink {
    pub config: RsConfig,
    /// RS-user fading over the elements.
    pub fading: FadingSpec,
    pub phases: PhaseControl,
}

/// BS transmit strategy on the direct link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transmitter {
    Single,
    /// Dumb antennas: fresh random power split and phases every slot.
    Obf {
        antennas: usize,
    },
    /// Equal power, phases steered to a fixed angle.
    Steered {
        antennas: usize,
        angle: f64,
        spacing: f64,
    },
}

impl Transmitter {
    pub fn antennas(&self) -> usize {
        match *self {
            Transmitter::Single => 1,
            Transmitter::Obf { antennas } | Transmitter::Steered { antennas, .. } => antennas,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectLink {
    /// BS-user fading over the transmit antennas.
    pub fading: FadingSpec,
    pub transmitter: Transmitter,
}

/// A single-antenna-receiver broadcast scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub users: usize,
    /// OFDMA subcarriers, i.i.d. fading on each.
    pub subcarriers: usize,
    pub budgets: LinkBudgets,
    pub rs: Option<RsLink>,
    pub direct: Option<DirectLink>,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.users == 0 {
            return Err(Error::scenario("at least one user is required"));
        }
        if self.subcarriers == 0 {
            return Err(Error::scenario("at least one subcarrier is required"));
        }
        if self.rs.is_none() && self.direct.is_none() {
            return Err(Error::scenario(
                "neither an RS link nor a direct link is present",
            ));
        }
        if let LinkBudgets::PerUser(v) = &self.budgets {
            if v.len() != self.users {
                return Err(Error::DimensionMismatch {
                    expected: self.users,
                    got: v.len(),
                });
            }
        }
        for k in 0..self.users {
            let b = self.budgets.user(k);
            for (name, value) in [("rho_r", b.rho_r), ("rho_b", b.rho_b)] {
                if !(value >= 0.0) || !value.is_finite() {
                    return Err(Error::Domain { name, value });
                }
            }
        }
        if let Some(rs) = &self.rs {
            rs.fading.validate(rs.config.elements())?;
            if rs.phases == PhaseControl::Designed
                && !matches!(
                    rs.fading,
                    FadingSpec::Rayleigh | FadingSpec::CorrelatedRayleigh { .. }
                )
            {
                return Err(Error::scenario(
                    "designed phases need Rayleigh or correlated Rayleigh RS fading",
                ));
            }
        }
        if let Some(d) = &self.direct {
            let m = d.transmitter.antennas();
            if m == 0 {
                return Err(Error::scenario(
                    "the transmitter needs at least one antenna",
                ));
            }
            d.fading.validate(m)?;
        }
        Ok(())
    }
}
