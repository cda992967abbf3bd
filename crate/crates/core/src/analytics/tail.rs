//! Large-argument approximations for the Rician cascade SNR, and the
//! conditional law of the correlated-fading SNR for a fixed phase vector.

use super::distribution::SnrDistribution;
use crate::beamforming::PhaseVector;
use crate::numerics::linalg::{is_hermitian, quadratic_form, CMatrix};
use crate::{Error, Result};

/// Tail approximations at one point. The log forms stay finite where the
/// plain values underflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailApproximation {
    pub ln_pdf: f64,
    pub ln_sf: f64,
}

impl TailApproximation {
    pub fn pdf(&self) -> f64 {
        self.ln_pdf.exp()
    }

    pub fn cdf(&self) -> f64 {
        -self.ln_sf.exp_m1()
    }

    /// `1 − cdf`, accurate where `cdf` rounds to 1.
    pub fn sf(&self) -> f64 {
        self.ln_sf.exp()
    }
}

/// Parameters of the Rician cascade `|√ρ (μ + CN(0, σ²))|²`, with
/// `μ = Nβ√a − δ` and `σ² = Nβ²u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RicianCascade {
    pub elements: usize,
    pub beta: f64,
    /// LoS energy share `κ/(1+κ)`.
    pub los_share: f64,
    /// Diffuse energy share `1/(1+κ)`.
    pub diffuse_share: f64,
    pub rho_r: f64,
    /// Phase-mismatch loss subtracted from the coherent amplitude.
    pub mismatch: f64,
}

impl RicianCascade {
    fn amplitude(&self) -> f64 {
        self.elements as f64 * self.beta * self.los_share.sqrt() - self.mismatch
    }

    fn diffuse_variance(&self) -> f64 {
        self.elements as f64 * self.beta * self.beta * self.diffuse_share
    }

    fn validate(&self) -> Result<()> {
        crate::beamforming::check_beta(self.beta)?;
        if self.elements == 0 {
            return Err(Error::invalid("at least one element is required"));
        }
        for (name, value) in [
            ("los_share", self.los_share),
            ("diffuse_share", self.diffuse_share),
            ("rho_r", self.rho_r),
        ] {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(Error::Domain { name, value });
            }
        }
        if !(self.diffuse_share > 0.0) || !(self.rho_r > 0.0) {
            return Err(Error::invalid("diffuse share and rho_r must be positive"));
        }
        if !(self.amplitude() > 0.0) {
            return Err(Error::Domain {
                name: "mismatch",
                value: self.mismatch,
            });
        }
        Ok(())
    }

    /// Exact law of the SNR.
    pub fn exact(&self) -> Result<SnrDistribution> {
        self.validate()?;
        let mu = self.amplitude();
        SnrDistribution::noncentral(self.rho_r * mu * mu, self.rho_r * self.diffuse_variance())
    }

    /// Tail forms obtained from `I_k(z) ~ eᶻ / √(2πz)`.
    pub fn tail(&self, x: f64) -> Result<TailApproximation> {
        self.validate()?;
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::Domain {
                name: "x",
                value: x,
            });
        }
        let rho = self.rho_r;
        let mu = self.amplitude();
        let var = self.diffuse_variance();
        let pi = std::f64::consts::PI;
        let root = (x / rho).sqrt();
        let ln_kernel = -(root - mu).powi(2) / var;
        let ln_pdf = ln_kernel - (2.0 * (pi * var * mu * (x * rho.powi(3)).sqrt()).sqrt()).ln();
        let ln_sf = ln_kernel + 0.5 * var.ln() - (2.0 * (pi * mu * root).sqrt()).ln();
        Ok(TailApproximation { ln_pdf, ln_sf })
    }
}

/// Shorthand for [`RicianCascade::tail`].
pub fn rician_tail_approximation(
    x: f64,
    elements: usize,
    beta: f64,
    los_share: f64,
    diffuse_share: f64,
    rho_r: f64,
    mismatch: f64,
) -> Result<TailApproximation> {
    RicianCascade {
        elements,
        beta,
        los_share,
        diffuse_share,
        rho_r,
        mismatch,
    }
    .tail(x)
}

/// Given the phase design `v̄`, the correlated-fading SNR is exponential
/// with mean `ρ_R v̄^H R̄ v̄`.
pub fn conditional_corr_snr_law(
    design: &PhaseVector,
    r_bar: &CMatrix,
    rho_r: f64,
) -> Result<SnrDistribution> {
    if r_bar.nrows() != design.len() || r_bar.ncols() != design.len() {
        return Err(Error::DimensionMismatch {
            expected: r_bar.nrows(),
            got: design.len(),
        });
    }
    if !is_hermitian(r_bar) {
        return Err(Error::NotHermitian(
            crate::numerics::linalg::hermitian_deviation(r_bar),
        ));
    }
    if !(rho_r > 0.0) || !rho_r.is_finite() {
        return Err(Error::Domain {
            name: "rho_r",
            value: rho_r,
        });
    }
    let lambda = quadratic_form(r_bar, design.as_vector());
    if lambda < 0.0 {
        return Err(Error::Indefinite(lambda));
    }
    SnrDistribution::exponential(rho_r * lambda)
}
