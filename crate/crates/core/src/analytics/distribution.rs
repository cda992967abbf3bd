//! SNR laws with the cdf/pdf pairs the extreme-value and capacity code
//! consumes. Tails are kept in log space so order statistics of thousands
//! of users do not underflow.

use std::fmt;

use crate::numerics::NoncentralChi2Two;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum SnrDistribution {
    /// Exponential with the given mean (Rayleigh-faded SNR).
    Exponential { mean: f64 },
    /// Gamma with integer shape `M` and scale `c`, i.e. `(c/2) χ²(2M)`.
    Gamma { shape: u32, scale: f64 },
    /// `|μ + CN(0, σ²)|²`.
    NoncentralChi2(NoncentralChi2Two),
    /// Point mass (unfaded channel).
    Degenerate { value: f64 },
    /// Largest of `users` i.i.d. draws from `base`.
    Maximum {
        base: Box<SnrDistribution>,
        users: u64,
    },
}

impl SnrDistribution {
    pub fn exponential(mean: f64) -> Result<Self> {
        if !(mean > 0.0) || !mean.is_finite() {
            return Err(Error::Domain {
                name: "mean",
                value: mean,
            });
        }
        Ok(SnrDistribution::Exponential { mean })
    }

    pub fn gamma(shape: u32, scale: f64) -> Result<Self> {
        if shape == 0 {
            return Err(Error::invalid("gamma shape must be at least 1"));
        }
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::Domain {
                name: "scale",
                value: scale,
            });
        }
        Ok(SnrDistribution::Gamma { shape, scale })
    }

    pub fn noncentral(noncentrality: f64, scale: f64) -> Result<Self> {
        Ok(SnrDistribution::NoncentralChi2(NoncentralChi2Two::new(
            noncentrality,
            scale,
        )?))
    }

    pub fn degenerate(value: f64) -> Result<Self> {
        if !(value >= 0.0) || !value.is_finite() {
            return Err(Error::Domain {
                name: "value",
                value,
            });
        }
        Ok(SnrDistribution::Degenerate { value })
    }

    /// Mean of a single draw.
    pub fn mean(&self) -> f64 {
        match self {
            SnrDistribution::Exponential { mean } => *mean,
            SnrDistribution::Gamma { shape, scale } => *shape as f64 * scale,
            SnrDistribution::NoncentralChi2(law) => law.mean(),
            SnrDistribution::Degenerate { value } => *value,
            SnrDistribution::Maximum { base, users } => {
                // Only used to pick scales; the exact value needs quadrature.
                base.mean() * (1.0 + (*users as f64).ln())
            }
        }
    }

    pub fn is_continuous(&self) -> bool {
        match self {
            SnrDistribution::Degenerate { .. } => false,
            SnrDistribution::Maximum { base, .. } => base.is_continuous(),
            _ => true,
        }
    }

    /// `ln(1 − F(x))`.
    pub fn ln_sf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return match self {
                SnrDistribution::Degenerate { value } if *value <= x => f64::NEG_INFINITY,
                _ => 0.0,
            };
        }
        match self {
            SnrDistribution::Exponential { mean } => -x / mean,
            SnrDistribution::Gamma { shape, scale } => {
                let t = x / scale;
                -t + ln_truncated_exp_series(*shape, t)
            }
            SnrDistribution::NoncentralChi2(law) => law.ln_sf(x),
            SnrDistribution::Degenerate { value } => {
                if x < *value {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
            SnrDistribution::Maximum { base, users } => {
                // 1 − F^K = −expm1(K ln F), ln F = ln(1 − sf).
                let ln_f = (-base.ln_sf(x).exp()).ln_1p();
                let k = *users as f64;
                if k * ln_f > -1e-10 {
                    // Tiny sf: 1 − F^K ≈ K sf.
                    k.ln() + base.ln_sf(x)
                } else {
                    (-(k * ln_f).exp_m1()).ln()
                }
            }
        }
    }

    pub fn sf(&self, x: f64) -> f64 {
        self.ln_sf(x).exp()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            SnrDistribution::Exponential { mean } if x > 0.0 => -(-x / mean).exp_m1(),
            SnrDistribution::Maximum { base, users } => {
                if x <= 0.0 {
                    return 0.0;
                }
                (*users as f64 * (-base.sf(x)).ln_1p()).exp()
            }
            SnrDistribution::NoncentralChi2(law) => law.cdf(x.max(0.0)),
            _ => -self.ln_sf(x).exp_m1(),
        }
    }

    /// `ln f(x)`; `−∞` outside the support. A point mass has no density.
    pub fn ln_pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return f64::NEG_INFINITY;
        }
        match self {
            SnrDistribution::Exponential { mean } => -x / mean - mean.ln(),
            SnrDistribution::Gamma { shape, scale } => {
                let m = *shape as f64;
                if x == 0.0 {
                    return if *shape == 1 {
                        -scale.ln()
                    } else {
                        f64::NEG_INFINITY
                    };
                }
                (m - 1.0) * x.ln() - x / scale - m * scale.ln() - ln_factorial(shape - 1)
            }
            SnrDistribution::NoncentralChi2(law) => law.ln_pdf(x),
            SnrDistribution::Degenerate { .. } => f64::NEG_INFINITY,
            SnrDistribution::Maximum { base, users } => {
                let k = *users as f64;
                let ln_f = (-base.ln_sf(x).exp()).ln_1p();
                k.ln() + base.ln_pdf(x) + (k - 1.0) * ln_f
            }
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.ln_pdf(x).exp()
    }
}

impl fmt::Display for SnrDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SnrDistribution::Exponential { mean } => write!(f, "Exponential(mean={mean})"),
            SnrDistribution::Gamma { shape, scale } => {
                write!(f, "Gamma(shape={shape}, scale={scale})")
            }
            SnrDistribution::NoncentralChi2(law) => write!(
                f,
                "NoncentralChi2(s2={}, sigma2={})",
                law.noncentrality(),
                law.scale()
            ),
            SnrDistribution::Degenerate { value } => write!(f, "Degenerate({value})"),
            SnrDistribution::Maximum { base, users } => write!(f, "Max[{users}]({base})"),
        }
    }
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

// ln Σ_{m<M} t^m / m!, summed from the largest term down.
fn ln_truncated_exp_series(shape: u32, t: f64) -> f64 {
    let top = shape - 1;
    let mut ln_terms = Vec::with_capacity(shape as usize);
    let mut ln_term = 0.0;
    ln_terms.push(0.0);
    for m in 1..=top {
        ln_term += t.ln() - (m as f64).ln();
        ln_terms.push(ln_term);
    }
    let peak = ln_terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    peak + ln_terms.iter().map(|l| (l - peak).exp()).sum::<f64>().ln()
}

/// Law of the largest of `users` i.i.d. draws: cdf `F^K`, pdf `K f F^{K−1}`.
pub fn order_stat_max(dist: &SnrDistribution, users: u64) -> Result<SnrDistribution> {
    if users == 0 {
        return Err(Error::invalid("at least one user is required"));
    }
    if users == 1 {
        return Ok(dist.clone());
    }
    Ok(match dist {
        SnrDistribution::Degenerate { .. } => dist.clone(),
        SnrDistribution::Maximum { base, users: inner } => SnrDistribution::Maximum {
            base: base.clone(),
            users: inner * users,
        },
        _ => SnrDistribution::Maximum {
            base: Box::new(dist.clone()),
            users,
        },
    })
}

/// Quantile at upper-tail probability `exp(ln_p)`, by bisection on `ln_sf`.
pub fn upper_quantile(dist: &SnrDistribution, ln_p: f64) -> Result<f64> {
    if let SnrDistribution::Exponential { mean } = dist {
        return Ok(-mean * ln_p);
    }
    if ln_p >= 0.0 {
        return Ok(0.0);
    }
    let mut hi = dist.mean().max(f64::MIN_POSITIVE);
    let mut guard = 0;
    while dist.ln_sf(hi) > ln_p {
        hi *= 2.0;
        guard += 1;
        if guard > 2000 || !hi.is_finite() {
            return Err(Error::Nonconvergent(format!(
                "no upper bracket for quantile of {dist}"
            )));
        }
    }
    crate::numerics::quad::bisect(|x| dist.ln_sf(x) - ln_p, 0.0, hi, 1e-14)
}
