//! Geometric link budgets: users dropped uniformly over a rectangle and
//! free-space loss along the reflected and the direct path.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::db_to_linear;
use crate::numerics::RngStream;
use crate::scheduler::UserBudget;
use crate::{Error, Result};

const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// How the path gain depends on wavelength and distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathLossForm {
    /// `(λ / 4πd)²`.
    #[default]
    Friis,
    /// `λ (4πd)⁻²`, with `λ` in meters.
    Literal,
}

/// Deployment geometry and radio parameters. The RS link travels
/// `d_BR + d_RU`, the direct link `d_BU`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Geometry {
    /// Meters.
    pub bs_position: [f64; 3],
    pub rs_position: [f64; 3],
    /// Users are uniform on `user_x × user_y` at height `user_height`.
    pub user_x: [f64; 2],
    pub user_y: [f64; 2],
    pub user_height: f64,
    pub carrier_hz: f64,
    pub bandwidth_hz: f64,
    pub tx_power_dbm: f64,
    pub noise_density_dbm_hz: f64,
    pub path_loss: PathLossForm,
}

impl Default for Geometry {
    fn default() -> Self {
        Self {
            bs_position: [0.0, 0.0, 0.0],
            rs_position: [50.0, 50.0, 40.0],
            user_x: [0.0, 100.0],
            user_y: [50.0, 150.0],
            user_height: 0.0,
            carrier_hz: 28e9,
            bandwidth_hz: 100e6,
            tx_power_dbm: 30.0,
            noise_density_dbm_hz: -174.0,
            path_loss: PathLossForm::Friis,
        }
    }
}

fn distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    a.iter()
        .zip(&b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

impl Geometry {
    pub fn validate(&self) -> Result<()> {
        let scalars = [
            ("carrier_hz", self.carrier_hz),
            ("bandwidth_hz", self.bandwidth_hz),
        ];
        for (name, value) in scalars {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::Domain { name, value });
            }
        }
        let finite = self
            .bs_position
            .iter()
            .chain(&self.rs_position)
            .chain(&self.user_x)
            .chain(&self.user_y)
            .chain([
                &self.user_height,
                &self.tx_power_dbm,
                &self.noise_density_dbm_hz,
            ])
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Config("geometry values must be finite".into()));
        }
        if self.user_x[0] > self.user_x[1] || self.user_y[0] > self.user_y[1] {
            return Err(Error::Config(
                "user region bounds must be ordered low, high".into(),
            ));
        }
        if distance(self.bs_position, self.rs_position) == 0.0 {
            return Err(Error::Config("BS and RS positions coincide".into()));
        }
        let [bx, by, bz] = self.bs_position;
        let inside = (self.user_x[0]..=self.user_x[1]).contains(&bx)
            && (self.user_y[0]..=self.user_y[1]).contains(&by);
        if inside && bz == self.user_height {
            return Err(Error::Config(
                "the BS lies inside the user region, so a user may sit on it".into(),
            ));
        }
        Ok(())
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_hz
    }

    /// Noise power over the bandwidth, in milliwatts.
    pub fn noise_power_mw(&self) -> f64 {
        db_to_linear(self.noise_density_dbm_hz + 10.0 * self.bandwidth_hz.log10())
    }

    pub fn path_gain(&self, d: f64) -> f64 {
        let lambda = self.wavelength();
        match self.path_loss {
            PathLossForm::Friis => (lambda / (4.0 * PI * d)).powi(2),
            PathLossForm::Literal => lambda / (4.0 * PI * d).powi(2),
        }
    }

    /// Average SNRs of a user at `position`.
    pub fn budget_at(&self, position: [f64; 3]) -> UserBudget {
        let snr = db_to_linear(self.tx_power_dbm) / self.noise_power_mw();
        let reflected =
            distance(self.bs_position, self.rs_position) + distance(self.rs_position, position);
        let direct = distance(self.bs_position, position);
        UserBudget {
            rho_r: snr * self.path_gain(reflected),
            rho_b: snr * self.path_gain(direct),
        }
    }
}

/// Uniform user positions; user `k` draws from `stream.substream(k)`.
pub fn drop_users(geometry: &Geometry, users: usize, stream: RngStream) -> Result<Vec<[f64; 3]>> {
    geometry.validate()?;
    if users == 0 {
        return Err(Error::invalid("at least one user is required"));
    }
    let [x0, x1] = geometry.user_x;
    let [y0, y1] = geometry.user_y;
    Ok((0..users)
        .map(|k| {
            let mut rng = stream.substream(k as u64).rng();
            let x = x0 + (x1 - x0) * rng.random::<f64>();
            let y = y0 + (y1 - y0) * rng.random::<f64>();
            [x, y, geometry.user_height]
        })
        .collect())
}

/// Per-user linear `(ρ_R, ρ_B)` for `users` uniformly dropped users.
pub fn place_users_and_path_loss(
    geometry: &Geometry,
    users: usize,
    stream: RngStream,
) -> Result<Vec<UserBudget>> {
    Ok(drop_users(geometry, users, stream)?
        .into_iter()
        .map(|p| geometry.budget_at(p))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn ratio_at_the_far_corner_follows_the_two_distances() {
        let g = Geometry::default();
        let b = g.budget_at([100.0, 150.0, 0.0]);
        let d_bu = (100f64.powi(2) + 150f64.powi(2)).sqrt();
        let d_br = (50f64.powi(2) + 50f64.powi(2) + 40f64.powi(2)).sqrt();
        let d_ru = (50f64.powi(2) + 100f64.powi(2) + 40f64.powi(2)).sqrt();
        let want = (d_bu / (d_br + d_ru)).powi(2);
        assert!(rel(b.rho_r / b.rho_b, want) < 1e-13);
        let literal = Geometry {
            path_loss: PathLossForm::Literal,
            ..g.clone()
        }
        .budget_at([100.0, 150.0, 0.0]);
        assert!(rel(literal.rho_r / literal.rho_b, want) < 1e-13);
        assert!(rel(literal.rho_b / b.rho_b, 1.0 / g.wavelength()) < 1e-13);
    }

    #[test]
    fn absolute_budget_matches_hand_link_budget() {
        let g = Geometry::default();
        let p = [100.0, 150.0, 0.0];
        let d = (100f64.powi(2) + 150f64.powi(2)).sqrt();
        let lambda = 299_792_458.0 / 28e9;
        let gain_db = 20.0 * (lambda / (4.0 * PI * d)).log10();
        let noise_dbm = -174.0 + 80.0;
        let want_db = 30.0 + gain_db - noise_dbm;
        assert!((10.0 * g.budget_at(p).rho_b.log10() - want_db).abs() < 1e-10);
    }

    #[test]
    fn doubling_tx_power_doubles_every_snr() {
        let g = Geometry::default();
        let louder = Geometry {
            tx_power_dbm: g.tx_power_dbm + 10.0 * 2f64.log10(),
            ..g.clone()
        };
        let stream = RngStream::new(5, 0);
        let a = place_users_and_path_loss(&g, 20, stream).unwrap();
        let b = place_users_and_path_loss(&louder, 20, stream).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!(rel(y.rho_r, 2.0 * x.rho_r) < 1e-12);
            assert!(rel(y.rho_b, 2.0 * x.rho_b) < 1e-12);
        }
    }

    #[test]
    fn rs_ground_projection_minimizes_rs_user_distance() {
        let g = Geometry::default();
        let below = g.budget_at([50.0, 50.0, 0.0]);
        for p in drop_users(&g, 500, RngStream::new(9, 1)).unwrap() {
            assert!(g.budget_at(p).rho_r <= below.rho_r);
        }
    }

    #[test]
    fn drops_stay_in_region_and_are_nested() {
        let g = Geometry::default();
        let small = drop_users(&g, 10, RngStream::new(1, 7)).unwrap();
        let large = drop_users(&g, 100, RngStream::new(1, 7)).unwrap();
        assert_eq!(&large[..10], &small[..]);
        for [x, y, z] in large {
            assert!((0.0..=100.0).contains(&x) && (50.0..=150.0).contains(&y) && z == 0.0);
        }
    }

    #[test]
    fn invalid_geometry_is_rejected() {
        let g = Geometry::default();
        assert!(Geometry {
            carrier_hz: 0.0,
            ..g.clone()
        }
        .validate()
        .is_err());
        assert!(Geometry {
            bandwidth_hz: -1.0,
            ..g.clone()
        }
        .validate()
        .is_err());
        assert!(Geometry {
            rs_position: g.bs_position,
            ..g.clone()
        }
        .validate()
        .is_err());
        assert!(Geometry {
            user_x: [10.0, 0.0],
            ..g.clone()
        }
        .validate()
        .is_err());
        assert!(Geometry {
            user_y: [-10.0, 10.0],
            ..g.clone()
        }
        .validate()
        .is_err());
        assert!(drop_users(&g, 0, RngStream::new(0, 0)).is_err());
    }
}
