//! Per-slot control variables: RS phase schedules, dumb-antenna weights at
//! the base station, and the MISO whitening transform.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::Exp1;

use crate::numerics::linalg::{
    conjugate_by_diagonal, hermitian_eig, hermitian_inv_sqrt, hermitian_inverse, quadratic_form,
    trace_re, CMatrix, CVector,
};
use crate::numerics::rng::uniform_phase;
use crate::{Error, Result};

/// RS reflection vector with `|v_n| = β` for every element.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVector {
    v: CVector,
    beta: f64,
}

impl PhaseVector {
    pub fn from_phases(phases: &[f64], beta: f64) -> Result<Self> {
        check_beta(beta)?;
        if phases.is_empty() {
            return Err(Error::Empty);
        }
        let v = CVector::from_iterator(
            phases.len(),
            phases.iter().map(|&t| Complex64::from_polar(beta, t)),
        );
        Ok(Self { v, beta })
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn as_vector(&self) -> &CVector {
        &self.v
    }

    /// Phases `θ_n` in `(−π, π]`.
    pub fn phases(&self) -> Vec<f64> {
        self.v.iter().map(|z| z.arg()).collect()
    }

    pub fn conj(&self) -> Self {
        Self {
            v: self.v.map(|z| z.conj()),
            beta: self.beta,
        }
    }
}

pub(crate) fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "beta",
            value: beta,
        })
    }
}

/// Fresh i.i.d. uniform phases, `v_n = β e^{jθ_n}`.
pub fn random_phase_schedule<R: Rng + ?Sized>(
    n: usize,
    beta: f64,
    rng: &mut R,
) -> Result<PhaseVector> {
    check_beta(beta)?;
    if n == 0 {
        return Err(Error::Empty);
    }
    let v = CVector::from_fn(n, |_, _| Complex64::from_polar(beta, uniform_phase(rng)));
    Ok(PhaseVector { v, beta })
}

/// Phases that co-phase every entry of `target`: `v_n target_n` is real and
/// nonnegative. Zero entries get phase 0.
pub fn aligned_phases(target: &CVector, beta: f64) -> Result<PhaseVector> {
    let phases: Vec<f64> = target.iter().map(|z| -phase_or_zero(*z)).collect();
    PhaseVector::from_phases(&phases, beta)
}

fn phase_or_zero(z: Complex64) -> f64 {
    if z == Complex64::new(0.0, 0.0) {
        0.0
    } else {
        z.arg()
    }
}

/// Dumb-antenna weights: power fractions `α_m` and phases `θ_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct BsObfWeights {
    alpha: Vec<f64>,
    theta: Vec<f64>,
}

impl BsObfWeights {
    pub fn new(alpha: Vec<f64>, theta: Vec<f64>) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::Empty);
        }
        if alpha.len() != theta.len() {
            return Err(Error::DimensionMismatch {
                expected: alpha.len(),
                got: theta.len(),
            });
        }
        if alpha.iter().any(|&a| !(a >= 0.0)) {
            return Err(Error::invalid("power fractions must be nonnegative"));
        }
        let total: f64 = alpha.iter().sum();
        if !(total > 0.0) {
            return Err(Error::invalid("power fractions sum to zero"));
        }
        let alpha = alpha.into_iter().map(|a| a / total).collect();
        let theta = theta.into_iter().map(|t| t.rem_euclid(TAU)).collect();
        Ok(Self { alpha, theta })
    }

    /// A single antenna with all the power and no phase.
    pub fn single() -> Self {
        Self {
            alpha: vec![1.0],
            theta: vec![0.0],
        }
    }

    /// Equal power, phases steered at angle `theta0` for a linear array:
    /// `θ_m = −θ₀ − 2πd(m−1) sin θ₀`.
    pub fn steered(antennas: usize, theta0: f64, spacing: f64) -> Result<Self> {
        let alpha = vec![1.0 / antennas as f64; antennas];
        let theta = (0..antennas)
            .map(|m| -theta0 - array_phase(theta0, m, spacing))
            .collect();
        Self::new(alpha, theta)
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn antennas(&self) -> usize {
        self.alpha.len()
    }

    /// Combining vector `w_m = √α_m e^{jθ_m}`.
    pub fn combining(&self) -> CVector {
        CVector::from_iterator(
            self.alpha.len(),
            self.alpha
                .iter()
                .zip(&self.theta)
                .map(|(&a, &t)| Complex64::from_polar(a.sqrt(), t)),
        )
    }
}

/// Linear-array phase progression `2πd(m−1) sin φ` (zero-based `m`).
pub fn array_phase(angle: f64, m: usize, spacing: f64) -> f64 {
    TAU * spacing * m as f64 * angle.sin()
}

/// Flat-Dirichlet power split with uniform phases.
pub fn bs_obf_weights<R: Rng + ?Sized>(antennas: usize, rng: &mut R) -> Result<BsObfWeights> {
    if antennas == 0 {
        return Err(Error::Empty);
    }
    let alpha: Vec<f64> = (0..antennas).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let theta = (0..antennas).map(|_| uniform_phase(rng)).collect();
    BsObfWeights::new(alpha, theta)
}

/// `R̄ = diag(h₁) R diag(h₁)^H`.
pub fn effective_correlation(r: &CMatrix, h1: &CVector) -> Result<CMatrix> {
    conjugate_by_diagonal(r, h1)
}

/// Phase-only design from the dominant eigenvector of `R̄`.
#[derive(Debug, Clone)]
pub struct PhaseDesign {
    /// `v̄ = β e^{j∠u_max}`.
    pub design: PhaseVector,
    /// Achieved `v̄^H R̄ v̄`.
    pub quadratic_form: f64,
    /// `Nβ²λ_max`, reached by the unconstrained eigenvector `√N β u_max`.
    pub eigen_bound: f64,
}

impl PhaseDesign {
    /// The reflection vector to apply in `vᵀ diag(h₁) h₂`. Since the cascade
    /// uses a plain transpose, this is the conjugate of the design, which
    /// makes the cascade variance equal to `v̄^H R̄ v̄`.
    pub fn applied(&self) -> PhaseVector {
        self.design.conj()
    }
}

pub fn deterministic_phase_design(r_bar: &CMatrix, beta: f64) -> Result<PhaseDesign> {
    check_beta(beta)?;
    let eig = hermitian_eig(r_bar)?;
    if *eig.values.last().expect("nonempty") < -1e-12 * eig.max_value().max(1.0) {
        return Err(Error::Indefinite(*eig.values.last().unwrap()));
    }
    let mut u = eig.top_vector();
    // Fix the global phase: largest-magnitude entry real and positive.
    let pivot = u
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .map(|(i, _)| i)
        .expect("nonempty");
    let rot = Complex64::from_polar(1.0, -u[pivot].arg());
    u *= rot;
    let phases: Vec<f64> = u.iter().map(|&z| phase_or_zero(z)).collect();
    let design = PhaseVector::from_phases(&phases, beta)?;
    let quadratic_form = quadratic_form(r_bar, design.as_vector());
    let n = r_bar.nrows() as f64;
    Ok(PhaseDesign {
        design,
        quadratic_form,
        eigen_bound: n * beta * beta * eig.max_value(),
    })
}

/// `W = √ζ R^{−1/2}` with `ζ = M / tr(R⁻¹)`.
#[derive(Debug, Clone)]
pub struct WhiteningTransform {
    w: CMatrix,
    zeta: f64,
}

impl WhiteningTransform {
    pub fn matrix(&self) -> &CMatrix {
        &self.w
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn apply(&self, h: &CVector) -> CVector {
        &self.w * h
    }
}

pub fn whitening_transform(r: &CMatrix, antennas: usize) -> Result<WhiteningTransform> {
    if r.nrows() != antennas {
        return Err(Error::DimensionMismatch {
            expected: antennas,
            got: r.nrows(),
        });
    }
    let inv = hermitian_inverse(r)?;
    let zeta = antennas as f64 / trace_re(&inv);
    let w = hermitian_inv_sqrt(r)? * Complex64::from(zeta.sqrt());
    Ok(WhiteningTransform { w, zeta })
}
