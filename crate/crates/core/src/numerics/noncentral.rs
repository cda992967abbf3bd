//! Noncentral chi-square law with two degrees of freedom.
//!
//! Parameterised the way it arises physically: the power `|μ + g|²` of a
//! deterministic component with `|μ|² = s²` plus a diffuse part
//! `g ~ CN(0, σ²)`. This is `(σ²/2)·χ'²₂(2s²/σ²)`.
//!
//! The cdf is `1 − Q₁(α, b)` with `α = s√2/σ`, `b = √(2x)/σ`, evaluated
//! through the Bessel series of the Marcum Q-function. Whichever of `F` and
//! `1 − F` is the small side is summed directly, so both tails keep full
//! relative accuracy.

use super::special::{bessel_i_scaled, bessel_i_scaled_orders};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoncentralChi2Two {
    noncentrality: f64,
    scale: f64,
}

impl NoncentralChi2Two {
    /// `noncentrality` is `s²`, `scale` is the diffuse power `σ²`.
    pub fn new(noncentrality: f64, scale: f64) -> Result<Self> {
        if !(noncentrality >= 0.0) || !noncentrality.is_finite() {
            return Err(Error::Domain {
                name: "noncentrality",
                value: noncentrality,
            });
        }
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::Domain {
                name: "scale",
                value: scale,
            });
        }
        Ok(Self {
            noncentrality,
            scale,
        })
    }

    pub fn noncentrality(&self) -> f64 {
        self.noncentrality
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn mean(&self) -> f64 {
        self.noncentrality + self.scale
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return f64::NEG_INFINITY;
        }
        let s = self.noncentrality.sqrt();
        let rx = x.sqrt();
        let arg = 2.0 * s * rx / self.scale;
        let bessel = bessel_i_scaled(0, arg).expect("argument is nonnegative");
        -(rx - s).powi(2) / self.scale - self.scale.ln() + bessel.ln()
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.ln_pdf(x).exp()
    }

    /// `(F(x), 1 − F(x))`, each accurate in relative terms on its small side.
    pub fn cdf_and_sf(&self, x: f64) -> (f64, f64) {
        if x <= 0.0 {
            return (0.0, 1.0);
        }
        if self.noncentrality == 0.0 {
            let t = x / self.scale;
            return (-(-t).exp_m1(), (-t).exp());
        }
        let sigma = self.scale.sqrt();
        let alpha = (2.0 * self.noncentrality).sqrt() / sigma;
        let b = (2.0 * x).sqrt() / sigma;
        if alpha < b {
            let sf = (-(b - alpha).powi(2) / 2.0).exp() * marcum_series(alpha / b, alpha * b, 0);
            (1.0 - sf, sf)
        } else {
            let cdf = (-(alpha - b).powi(2) / 2.0).exp() * marcum_series(b / alpha, alpha * b, 1);
            (cdf, 1.0 - cdf)
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.cdf_and_sf(x).0
    }

    pub fn sf(&self, x: f64) -> f64 {
        self.cdf_and_sf(x).1
    }

    /// `ln(1 − F(x))`, finite far into the upper tail.
    pub fn ln_sf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if self.noncentrality == 0.0 {
            return -x / self.scale;
        }
        let sigma = self.scale.sqrt();
        let alpha = (2.0 * self.noncentrality).sqrt() / sigma;
        let b = (2.0 * x).sqrt() / sigma;
        if alpha < b {
            -(b - alpha).powi(2) / 2.0 + marcum_series(alpha / b, alpha * b, 0).ln()
        } else {
            (-self.cdf(x)).ln_1p()
        }
    }
}

// Σ_{k ≥ first} ratio^k e^{−z} I_k(z) for 0 ≤ ratio ≤ 1.
fn marcum_series(ratio: f64, z: f64, first: usize) -> f64 {
    let max_order = 40 + (12.0 * z.sqrt()) as usize;
    let seq = bessel_i_scaled_orders(max_order, z).expect("argument is nonnegative");
    let mut sum = 0.0;
    let mut power = ratio.powi(first as i32);
    // I_k(z) decreases in k, so the terms are monotone and the first
    // negligible one ends the sum.
    for &term in &seq[first..] {
        let t = power * term;
        sum += t;
        if t <= 1e-18 * sum || t == 0.0 {
            break;
        }
        power *= ratio;
    }
    sum
}

/// Density and distribution function at `x` for noncentrality `s²` and
/// diffuse power `σ²`.
pub fn noncentral_chi2_2dof(x: f64, noncentrality: f64, scale: f64) -> Result<(f64, f64)> {
    if !(x >= 0.0) {
        return Err(Error::Domain {
            name: "x",
            value: x,
        });
    }
    let law = NoncentralChi2Two::new(noncentrality, scale)?;
    Ok((law.pdf(x), law.cdf(x)))
}
