//! Channel realizations: the RS line-of-sight vector, per-user fading draws
//! and their composition into cascaded, composite, wide-band and MISO gains.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use crate::beamforming::{check_beta, BsObfWeights, PhaseVector};
use crate::numerics::linalg::{hermitian_sqrt, trace_re, CMatrix, CVector};
use crate::numerics::rng::{complex_normal, uniform_phase, RngStream};
use crate::{Error, Result};

/// Default element spacing in wavelengths.
pub const DEFAULT_SPACING: f64 = 0.5;

/// Geometry of the reconfigurable surface as seen from the base station.
#[derive(Debug, Clone, PartialEq)]
pub struct RsConfig {
    elements: usize,
    beta: f64,
    spacing: f64,
    los_angles: Vec<f64>,
}

impl RsConfig {
    /// `elements` reflectors with amplitude `beta`, half-wavelength spacing
    /// and a shared BS-side angle of zero.
    pub fn new(elements: usize, beta: f64) -> Result<Self> {
        if elements == 0 {
            return Err(Error::invalid("RS needs at least one element"));
        }
        check_beta(beta)?;
        Ok(Self {
            elements,
            beta,
            spacing: DEFAULT_SPACING,
            los_angles: vec![0.0; elements],
        })
    }

    pub fn with_spacing(mut self, spacing: f64) -> Result<Self> {
        if !(spacing >= 0.0) || !spacing.is_finite() {
            return Err(Error::Domain {
                name: "spacing",
                value: spacing,
            });
        }
        self.spacing = spacing;
        Ok(self)
    }

    pub fn with_shared_angle(mut self, angle: f64) -> Self {
        self.los_angles = vec![angle; self.elements];
        self
    }

    pub fn with_los_angles(mut self, angles: Vec<f64>) -> Result<Self> {
        if angles.len() != self.elements {
            return Err(Error::DimensionMismatch {
                expected: self.elements,
                got: angles.len(),
            });
        }
        self.los_angles = angles;
        Ok(self)
    }

    pub fn elements(&self) -> usize {
        self.elements
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn los_angles(&self) -> &[f64] {
        &self.los_angles
    }
}

/// BS→RS line-of-sight vector `h₁,ₙ = e^{j2π(n−1)d sin ϑₙ}`.
pub fn los_vector(cfg: &RsConfig) -> CVector {
    CVector::from_iterator(
        cfg.elements,
        cfg.los_angles.iter().enumerate().map(|(n, &angle)| {
            Complex64::from_polar(1.0, TAU * n as f64 * cfg.spacing * angle.sin())
        }),
    )
}

/// LoS and diffuse energy fractions `(a, u)` for a κ-factor.
pub fn rician_split(kappa: f64) -> (f64, f64) {
    if kappa.is_infinite() {
        return (1.0, 0.0);
    }
    (kappa / (1.0 + kappa), 1.0 / (1.0 + kappa))
}

/// Statistical family of a fading link.
#[derive(Debug, Clone, PartialEq)]
pub enum FadingSpec {
    /// Deterministic all-ones channel.
    Awgn,
    /// `CN(0, I)`.
    Rayleigh,
    /// Fixed LoS with uniform per-user phases plus `CN(0, u I)`.
    Rician { kappa: f64 },
    /// `R^{1/2} b` with `R` shared by all users.
    CorrelatedRayleigh { correlation: CMatrix },
    /// `l e^{jφ}` with a linear-array phase progression at a per-user angle.
    FullyCorrelated { spacing: f64 },
}

impl FadingSpec {
    pub fn validate(&self, dim: usize) -> Result<()> {
        if dim == 0 {
            return Err(Error::Empty);
        }
        match self {
            FadingSpec::Rician { kappa } if !(*kappa >= 0.0) => Err(Error::Domain {
                name: "kappa",
                value: *kappa,
            }),
            FadingSpec::CorrelatedRayleigh { correlation } => {
                if correlation.nrows() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: correlation.nrows(),
                    });
                }
                let tr = trace_re(correlation);
                if (tr - dim as f64).abs() > 1e-9 * dim as f64 {
                    return Err(Error::invalid(format!(
                        "correlation matrix trace {tr} must equal its dimension {dim}"
                    )));
                }
                hermitian_sqrt(correlation).map(|_| ())
            }
            FadingSpec::FullyCorrelated { spacing } if !(*spacing >= 0.0) => Err(Error::Domain {
                name: "spacing",
                value: *spacing,
            }),
            _ => Ok(()),
        }
    }

    /// Draw the per-user constants (LoS phases, arrival angles) for one user.
    pub fn instantiate<R: Rng + ?Sized>(&self, dim: usize, rng: &mut R) -> Result<UserFading> {
        self.validate(dim)?;
        Ok(match self {
            FadingSpec::CorrelatedRayleigh { correlation } => UserFading::Correlated {
                sqrt: Arc::new(hermitian_sqrt(correlation)?),
            },
            _ => self.instantiate_unchecked(dim, None, rng),
        })
    }

    /// One [`UserFading`] per user; user `k` draws its constants from
    /// `stream.substream(k)`, so a user's law does not depend on how many
    /// users follow it.
    pub fn instantiate_population(
        &self,
        dim: usize,
        users: usize,
        stream: RngStream,
    ) -> Result<Vec<UserFading>> {
        self.validate(dim)?;
        let shared_sqrt = match self {
            FadingSpec::CorrelatedRayleigh { correlation } => {
                Some(Arc::new(hermitian_sqrt(correlation)?))
            }
            _ => None,
        };
        Ok((0..users)
            .map(|k| {
                let mut rng = stream.substream(k as u64).rng();
                self.instantiate_unchecked(dim, shared_sqrt.clone(), &mut rng)
            })
            .collect())
    }

    fn instantiate_unchecked<R: Rng + ?Sized>(
        &self,
        dim: usize,
        sqrt: Option<Arc<CMatrix>>,
        rng: &mut R,
    ) -> UserFading {
        match self {
            FadingSpec::Awgn => UserFading::Awgn { dim },
            FadingSpec::Rayleigh => UserFading::Rayleigh { dim },
            FadingSpec::Rician { kappa } => {
                let phases: Vec<f64> = (0..dim).map(|_| uniform_phase(rng)).collect();
                UserFading::rician(*kappa, &phases).expect("kappa validated")
            }
            FadingSpec::CorrelatedRayleigh { correlation } => UserFading::Correlated {
                sqrt: sqrt
                    .unwrap_or_else(|| Arc::new(hermitian_sqrt(correlation).expect("validated"))),
            },
            FadingSpec::FullyCorrelated { spacing } => {
                let angle = rng.random::<f64>() * PI - FRAC_PI_2;
                UserFading::fully_correlated(dim, angle, *spacing)
            }
        }
    }
}

/// The fading law of one user's link with its per-user constants fixed.
#[derive(Debug, Clone)]
pub enum UserFading {
    Awgn { dim: usize },
    Rayleigh { dim: usize },
    Rician { los: CVector, diffuse_std: f64 },
    Correlated { sqrt: Arc<CMatrix> },
    FullyCorrelated { steering: CVector },
}

impl UserFading {
    /// Rician law `√a e^{jφ} + CN(0, u I)` with the given LoS phases.
    pub fn rician(kappa: f64, phases: &[f64]) -> Result<Self> {
        if !(kappa >= 0.0) {
            return Err(Error::Domain {
                name: "kappa",
                value: kappa,
            });
        }
        if phases.is_empty() {
            return Err(Error::Empty);
        }
        let (a, u) = rician_split(kappa);
        let los = CVector::from_iterator(
            phases.len(),
            phases.iter().map(|&p| Complex64::from_polar(a.sqrt(), p)),
        );
        Ok(UserFading::Rician {
            los,
            diffuse_std: u.sqrt(),
        })
    }

    /// Completely correlated law `l e^{jφ}`, `φₙ = 2πd(n−1) sin φ₀`.
    pub fn fully_correlated(dim: usize, angle: f64, spacing: f64) -> Self {
        let steering = CVector::from_fn(dim, |n, _| {
            Complex64::from_polar(1.0, TAU * spacing * n as f64 * angle.sin())
        });
        UserFading::FullyCorrelated { steering }
    }

    pub fn correlated(correlation: &CMatrix) -> Result<Self> {
        FadingSpec::CorrelatedRayleigh {
            correlation: correlation.clone(),
        }
        .validate(correlation.nrows())?;
        Ok(UserFading::Correlated {
            sqrt: Arc::new(hermitian_sqrt(correlation)?),
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            UserFading::Awgn { dim } | UserFading::Rayleigh { dim } => *dim,
            UserFading::Rician { los, .. } => los.len(),
            UserFading::Correlated { sqrt } => sqrt.nrows(),
            UserFading::FullyCorrelated { steering } => steering.len(),
        }
    }

    /// Fixed LoS component, if the law has one.
    pub fn los(&self) -> Option<&CVector> {
        match self {
            UserFading::Rician { los, .. } => Some(los),
            _ => None,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> CVector {
        match self {
            UserFading::Awgn { dim } => CVector::from_element(*dim, Complex64::new(1.0, 0.0)),
            UserFading::Rayleigh { dim } => CVector::from_fn(*dim, |_, _| complex_normal(rng)),
            UserFading::Rician { los, diffuse_std } => {
                los.map(|l| l + complex_normal(rng) * *diffuse_std)
            }
            UserFading::Correlated { sqrt } => {
                let b = CVector::from_fn(sqrt.nrows(), |_, _| complex_normal(rng));
                sqrt.as_ref() * b
            }
            UserFading::FullyCorrelated { steering } => steering * complex_normal(rng),
        }
    }

    /// `Σₙ wₙ hₙ` for a fresh draw `h`, consuming the same random numbers as
    /// [`UserFading::sample`] without allocating.
    pub fn sample_combined<R: Rng + ?Sized>(&self, weights: &CVector, rng: &mut R) -> Complex64 {
        debug_assert_eq!(weights.len(), self.dim());
        match self {
            UserFading::Awgn { .. } => weights.sum(),
            UserFading::Rayleigh { .. } => weights.iter().map(|w| w * complex_normal(rng)).sum(),
            UserFading::Rician { los, diffuse_std } => weights
                .iter()
                .zip(los.iter())
                .map(|(w, l)| w * (l + complex_normal(rng) * *diffuse_std))
                .sum(),
            UserFading::Correlated { .. } => (weights.transpose() * self.sample(rng))[(0, 0)],
            UserFading::FullyCorrelated { steering } => {
                let l = complex_normal(rng);
                weights
                    .iter()
                    .zip(steering.iter())
                    .map(|(w, s)| w * s)
                    .sum::<Complex64>()
                    * l
            }
        }
    }
}

/// One draw of `h₂,ₖ` (or of a direct-link vector) from `fading`.
pub fn sample_user_fading<R: Rng + ?Sized>(fading: &UserFading, rng: &mut R) -> CVector {
    fading.sample(rng)
}

/// `√ρ_R vᵀ diag(h₁) h₂`.
pub fn cascade_gain(rho_r: f64, h1: &CVector, v: &PhaseVector, h2: &CVector) -> Result<Complex64> {
    let n = h1.len();
    for got in [v.len(), h2.len()] {
        if got != n {
            return Err(Error::DimensionMismatch { expected: n, got });
        }
    }
    let sum: Complex64 = (0..n).map(|i| v.as_vector()[i] * h1[i] * h2[i]).sum();
    Ok(sum * rho_r.sqrt())
}

/// RS link plus direct link, `h_R + √ρ_B h_d`.
pub fn composite_gain(cascade: Complex64, rho_b: f64, h_d: Complex64) -> Complex64 {
    cascade + h_d * rho_b.sqrt()
}

/// Per-user gains or vectors in one slot.
#[derive(Debug, Clone, PartialEq)]
pub enum Gains {
    Scalar(Vec<Complex64>),
    Vector(Vec<CVector>),
}

/// Channels and SNRs of all users in one slot on one subcarrier.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotRealization {
    pub slot: u64,
    pub subcarrier: usize,
    pub gains: Gains,
    pub snrs: Vec<f64>,
}

impl SlotRealization {
    pub fn from_scalar(slot: u64, subcarrier: usize, gains: Vec<Complex64>) -> Self {
        let snrs = gains.iter().map(|g| g.norm_sqr()).collect();
        Self {
            slot,
            subcarrier,
            gains: Gains::Scalar(gains),
            snrs,
        }
    }

    pub fn from_vectors(slot: u64, subcarrier: usize, gains: Vec<CVector>) -> Self {
        let snrs = gains.iter().map(|g| g.norm_squared()).collect();
        Self {
            slot,
            subcarrier,
            gains: Gains::Vector(gains),
            snrs,
        }
    }

    pub fn users(&self) -> usize {
        self.snrs.len()
    }
}

/// Links of one user on one subcarrier.
#[derive(Debug, Clone)]
pub struct UserLinks {
    pub rho_r: f64,
    pub rho_b: f64,
    /// RS→user fading over the `N` elements.
    pub rs: Option<UserFading>,
    /// BS→user fading over the transmit antennas.
    pub direct: Option<UserFading>,
}

/// Everything needed to draw single-antenna-receiver slots on one subcarrier.
#[derive(Debug, Clone)]
pub struct LinkModel {
    pub h1: Option<CVector>,
    pub users: Vec<UserLinks>,
}

impl LinkModel {
    /// Draw every user's composite gain. Users consume `rng` in index order,
    /// RS link first, so user `k`'s channel is independent of how many users
    /// follow it.
    pub fn realize<R: Rng + ?Sized>(
        &self,
        slot: u64,
        subcarrier: usize,
        phases: Option<&PhaseVector>,
        bs: &BsObfWeights,
        rng: &mut R,
    ) -> Result<SlotRealization> {
        let rs_weights = match (&self.h1, phases) {
            (Some(h1), Some(v)) => {
                if v.len() != h1.len() {
                    return Err(Error::DimensionMismatch {
                        expected: h1.len(),
                        got: v.len(),
                    });
                }
                Some(v.as_vector().component_mul(h1))
            }
            (None, _) => None,
            (Some(_), None) => {
                return Err(Error::scenario("RS present but no phase schedule given"))
            }
        };
        let bs_weights = bs.combining();
        let mut gains = Vec::with_capacity(self.users.len());
        for user in &self.users {
            let cascade = match (&user.rs, &rs_weights) {
                (Some(f), Some(w)) => f.sample_combined(w, rng) * user.rho_r.sqrt(),
                _ => Complex64::new(0.0, 0.0),
            };
            let direct = match &user.direct {
                Some(f) => f.sample_combined(&bs_weights, rng),
                None => Complex64::new(0.0, 0.0),
            };
            gains.push(composite_gain(cascade, user.rho_b, direct));
        }
        Ok(SlotRealization::from_scalar(slot, subcarrier, gains))
    }
}

/// One slot over `models.len()` subcarriers. The phase schedule and BS
/// weights are shared; subcarrier `l` draws fading from `stream.substream(l)`.
pub fn wideband_slot(
    models: &[LinkModel],
    slot: u64,
    phases: Option<&PhaseVector>,
    bs: &BsObfWeights,
    stream: RngStream,
) -> Result<Vec<SlotRealization>> {
    if models.is_empty() {
        return Err(Error::invalid("at least one subcarrier is required"));
    }
    models
        .iter()
        .enumerate()
        .map(|(l, m)| m.realize(slot, l, phases, bs, &mut stream.substream(l as u64).rng()))
        .collect()
}

/// `M × N` LoS matrix `[H₁]_{m,n} = e^{j2π(m−1) sin ϑ′ₙ}`.
pub fn los_matrix(antennas: usize, angles: &[f64]) -> Result<CMatrix> {
    if antennas == 0 || angles.is_empty() {
        return Err(Error::Empty);
    }
    Ok(CMatrix::from_fn(antennas, angles.len(), |m, n| {
        Complex64::from_polar(1.0, TAU * m as f64 * angles[n].sin())
    }))
}

/// `R = H₁ H₁^H / N`, trace `M`.
pub fn los_correlation(h1: &CMatrix) -> CMatrix {
    (h1 * h1.adjoint()) / Complex64::from(h1.ncols() as f64)
}

/// `√ρ_R H₁ diag(v) h₂`: the MISO RS channel as physically composed.
pub fn miso_cascade(rho_r: f64, h1: &CMatrix, v: &PhaseVector, h2: &CVector) -> Result<CVector> {
    if v.len() != h1.ncols() || h2.len() != h1.ncols() {
        return Err(Error::DimensionMismatch {
            expected: h1.ncols(),
            got: v.len().min(h2.len()),
        });
    }
    Ok(h1 * v.as_vector().component_mul(h2) * Complex64::from(rho_r.sqrt()))
}

/// `√(ρ_R N) β R^{1/2} z` with `z ~ CN(0, I_M)`: the statistically
/// equivalent form of [`miso_cascade`] under Rayleigh `h₂`.
pub fn miso_rs_channel<R: Rng + ?Sized>(
    rho_r: f64,
    elements: usize,
    beta: f64,
    correlation: &CMatrix,
    rng: &mut R,
) -> Result<CVector> {
    let s = hermitian_sqrt(correlation)?;
    let z = CVector::from_fn(correlation.nrows(), |_, _| complex_normal(rng));
    Ok(s * z * Complex64::from((rho_r * elements as f64).sqrt() * beta))
}
