//! Large-K sum-rate scaling laws.
//!
//! `log K` is the natural logarithm throughout; `O(log log K)` corrections
//! are dropped. At `K = 1` the laws are evaluated with `log 1 = 0`, leaving
//! only their fixed (line-of-sight) part.

use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// Every scaling law the library evaluates. The string ids accepted by
/// [`FromStr`] are listed next to each variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScalingLaw {
    /// `eq3`: single antenna, Rayleigh, `log₂(1 + ρ_B log K)`.
    OsRayleigh,
    /// `eq4`: single antenna, Rician.
    OsRician,
    /// `eq6`: dumb antennas at the BS, Rician.
    BsObfRician,
    /// `eq7`: dumb antennas at the BS, fully correlated.
    BsObfFullyCorrelated,
    /// `thm1`: RS only, Rayleigh.
    RsRayleigh,
    /// `cor1`: RS plus direct link, Rayleigh.
    RsRayleighDirect,
    /// `thm2`: RS only, Rician.
    RsRician,
    /// `cor2`: RS plus direct link, Rician.
    RsRicianDirect,
    /// `lem2-thm3`: RS only, correlated Rayleigh with the eigenvector design.
    RsCorrelated,
    /// `cor3`: as above plus a Rayleigh direct link.
    RsCorrelatedDirect,
    /// `cor4`: RS only, fully correlated.
    RsFullyCorrelated,
    /// `cor5`: `L` Rayleigh OFDMA subcarriers with direct links.
    OfdmaRayleigh,
    /// `cor6`: `L` Rician OFDMA subcarriers with direct links.
    OfdmaRician,
    /// `thm4`: MISO, RS with whitening, per-antenna power.
    MisoWhitened,
    /// `thm4-remark4`: MISO, RS with whitening, unit total power.
    MisoWhitenedUnitPower,
}

impl ScalingLaw {
    pub const ALL: [ScalingLaw; 15] = [
        ScalingLaw::OsRayleigh,
        ScalingLaw::OsRician,
        ScalingLaw::BsObfRician,
        ScalingLaw::BsObfFullyCorrelated,
        ScalingLaw::RsRayleigh,
        ScalingLaw::RsRayleighDirect,
        ScalingLaw::RsRician,
        ScalingLaw::RsRicianDirect,
        ScalingLaw::RsCorrelated,
        ScalingLaw::RsCorrelatedDirect,
        ScalingLaw::RsFullyCorrelated,
        ScalingLaw::OfdmaRayleigh,
        ScalingLaw::OfdmaRician,
        ScalingLaw::MisoWhitened,
        ScalingLaw::MisoWhitenedUnitPower,
    ];

    pub fn id(self) -> &'static str {
        match self {
            ScalingLaw::OsRayleigh => "eq3",
            ScalingLaw::OsRician => "eq4",
            ScalingLaw::BsObfRician => "eq6",
            ScalingLaw::BsObfFullyCorrelated => "eq7",
            ScalingLaw::RsRayleigh => "thm1",
            ScalingLaw::RsRayleighDirect => "cor1",
            ScalingLaw::RsRician => "thm2",
            ScalingLaw::RsRicianDirect => "cor2",
            ScalingLaw::RsCorrelated => "lem2-thm3",
            ScalingLaw::RsCorrelatedDirect => "cor3",
            ScalingLaw::RsFullyCorrelated => "cor4",
            ScalingLaw::OfdmaRayleigh => "cor5",
            ScalingLaw::OfdmaRician => "cor6",
            ScalingLaw::MisoWhitened => "thm4",
            ScalingLaw::MisoWhitenedUnitPower => "thm4-remark4",
        }
    }
}

impl fmt::Display for ScalingLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for ScalingLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        ScalingLaw::ALL
            .into_iter()
            .find(|law| law.id() == key)
            .ok_or_else(|| {
                let ids: Vec<_> = ScalingLaw::ALL.iter().map(|l| l.id()).collect();
                Error::invalid(format!(
                    "unknown law `{s}`; expected one of {}",
                    ids.join(", ")
                ))
            })
    }
}

/// Parameters shared by the laws. Each law reads only the fields it needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LawParams {
    pub rho_r: f64,
    pub rho_b: f64,
    /// RS elements `N`.
    pub elements: f64,
    /// BS antennas `M`.
    pub antennas: f64,
    pub beta: f64,
    /// RS-user κ-factor.
    pub kappa: f64,
    /// BS-user κ-factor.
    pub kappa_b: f64,
    /// Largest eigenvalue of the effective RS correlation.
    pub lambda_max: f64,
    /// OFDMA subcarriers `L`.
    pub subcarriers: f64,
    /// `tr(R⁻¹)` of the MISO LoS correlation; defaults to `M` (`R = I`).
    pub trace_r_inv: Option<f64>,
}

impl Default for LawParams {
    fn default() -> Self {
        Self {
            rho_r: 1.0,
            rho_b: 1.0,
            elements: 1.0,
            antennas: 1.0,
            beta: 1.0,
            kappa: 0.0,
            kappa_b: 0.0,
            lambda_max: 1.0,
            subcarriers: 1.0,
            trace_r_inv: None,
        }
    }
}

impl LawParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("rho_r", self.rho_r),
            ("rho_b", self.rho_b),
            ("elements", self.elements),
            ("antennas", self.antennas),
            ("kappa", self.kappa),
            ("kappa_b", self.kappa_b),
            ("lambda_max", self.lambda_max),
            ("subcarriers", self.subcarriers),
        ];
        for (name, value) in fields {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(Error::Domain { name, value });
            }
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(Error::Domain {
                name: "beta",
                value: self.beta,
            });
        }
        if let Some(t) = self.trace_r_inv {
            if !(t > 0.0) || !t.is_finite() {
                return Err(Error::Domain {
                    name: "trace_r_inv",
                    value: t,
                });
            }
        }
        Ok(())
    }
}

/// Value of `law` at `users` users, in bits/s/Hz.
pub fn scaling_law(law: ScalingLaw, params: &LawParams, users: u64) -> Result<f64> {
    params.validate()?;
    if users == 0 {
        return Err(Error::invalid("at least one user is required"));
    }
    let p = params;
    let ln_k = (users as f64).ln();
    let nb2 = p.elements * p.beta * p.beta;
    let value = match law {
        ScalingLaw::OsRayleigh => log2_1p(p.rho_b * ln_k),
        ScalingLaw::OsRician => {
            log2_1p(p.rho_b * (ln_k.sqrt() + p.kappa.sqrt()).powi(2) / (1.0 + p.kappa))
        }
        ScalingLaw::BsObfRician => log2_1p(
            p.rho_b * (ln_k.sqrt() + (p.antennas * p.kappa).sqrt()).powi(2) / (1.0 + p.kappa),
        ),
        ScalingLaw::BsObfFullyCorrelated => log2_1p(p.antennas * p.rho_b * ln_k),
        ScalingLaw::RsRayleigh => log2_1p(p.rho_r * nb2 * ln_k),
        ScalingLaw::RsRayleighDirect => rs_rayleigh_direct(p, ln_k),
        ScalingLaw::RsRician => log2_1p(
            p.rho_r * nb2 / (1.0 + p.kappa) * (ln_k.sqrt() + (p.elements * p.kappa).sqrt()).powi(2),
        ),
        ScalingLaw::RsRicianDirect => log2_1p(rician_peak_snr(p, ln_k)),
        ScalingLaw::RsCorrelated => log2_1p(p.rho_r * nb2 * p.lambda_max * ln_k),
        ScalingLaw::RsCorrelatedDirect => log2_1p((p.rho_r * nb2 * p.lambda_max + p.rho_b) * ln_k),
        ScalingLaw::RsFullyCorrelated => log2_1p(p.rho_r * nb2 * p.elements * ln_k),
        ScalingLaw::OfdmaRayleigh => p.subcarriers * rs_rayleigh_direct(p, ln_k),
        ScalingLaw::OfdmaRician => p.subcarriers * log2_1p(rician_peak_snr(p, ln_k)),
        ScalingLaw::MisoWhitened => {
            finite_log2(p.rho_r * nb2 * p.antennas * ln_k, law)? - trace_r_inv(p).log2()
        }
        ScalingLaw::MisoWhitenedUnitPower => {
            finite_log2(p.rho_r * nb2 * ln_k, law)? - trace_r_inv(p).log2()
        }
    };
    Ok(value)
}

fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / std::f64::consts::LN_2
}

fn finite_log2(x: f64, law: ScalingLaw) -> Result<f64> {
    if x > 0.0 {
        Ok(x.log2())
    } else {
        Err(Error::invalid(format!(
            "{law} has no finite value here (log of {x})"
        )))
    }
}

fn trace_r_inv(p: &LawParams) -> f64 {
    p.trace_r_inv.unwrap_or(p.antennas)
}

fn rs_rayleigh_direct(p: &LawParams, ln_k: f64) -> f64 {
    log2_1p((p.rho_r * (p.elements * p.beta * p.beta) + p.rho_b) * ln_k)
}

/// Peak SNR growth with Rician RS and direct links:
/// `(√((ρ_R Nβ²/(1+κ) + ρ_B/(1+κ_B)) log K) + Nβ√(ρ_R κ/(1+κ)) + √(ρ_B κ_B/(1+κ_B)))²`.
pub fn rician_peak_snr(p: &LawParams, ln_k: f64) -> f64 {
    let nb2 = p.elements * p.beta * p.beta;
    let diffuse = p.rho_r * nb2 / (1.0 + p.kappa) + p.rho_b / (1.0 + p.kappa_b);
    let los = p.elements * p.beta * (p.rho_r * p.kappa / (1.0 + p.kappa)).sqrt()
        + (p.rho_b * p.kappa_b / (1.0 + p.kappa_b)).sqrt();
    // Expanded square: reduces to `diffuse · log K` bit for bit without LoS.
    let spread = diffuse * ln_k;
    spread + los * (2.0 * spread.sqrt() + los)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn law(id: &str) -> ScalingLaw {
        id.parse().unwrap()
    }

    fn params() -> LawParams {
        LawParams::default()
    }

    #[test]
    fn golden_values() {
        let p = params();
        assert!((scaling_law(law("eq3"), &p, 256).unwrap() - 2.7104323).abs() < 1e-6);

        let p2 = LawParams {
            elements: 2.0,
            ..params()
        };
        assert!((scaling_law(law("cor1"), &p2, 2).unwrap() - 1.6226687).abs() < 1e-6);
        assert!((scaling_law(law("cor1"), &p2, 256).unwrap() - 4.1404132).abs() < 1e-6);

        let pk = LawParams {
            kappa: 10.0,
            ..params()
        };
        assert!((scaling_law(law("eq4"), &pk, 256).unwrap() - 1.9134636).abs() < 1e-4);
        let pm = LawParams {
            kappa: 10.0,
            antennas: 2.0,
            ..params()
        };
        assert!((scaling_law(law("eq6"), &pm, 256).unwrap() - 2.3887488).abs() < 1e-4);

        let pc = LawParams {
            elements: 2.0,
            lambda_max: 1.8,
            ..params()
        };
        assert!((scaling_law(law("cor3"), &pc, 128).unwrap() - 4.5434550).abs() < 1e-4);
    }

    #[test]
    fn ids_round_trip() {
        for l in ScalingLaw::ALL {
            assert_eq!(l.id().parse::<ScalingLaw>().unwrap(), l);
        }
        assert!("eq5".parse::<ScalingLaw>().is_err());
        assert_eq!(
            "COR1".parse::<ScalingLaw>().unwrap(),
            ScalingLaw::RsRayleighDirect
        );
    }

    #[test]
    fn single_user_keeps_only_the_fixed_part() {
        let p = LawParams {
            kappa: 10.0,
            kappa_b: 10.0,
            elements: 2.0,
            ..params()
        };
        assert_eq!(scaling_law(ScalingLaw::OsRayleigh, &p, 1).unwrap(), 0.0);
        let los = 2.0 * (10.0f64 / 11.0).sqrt() + (10.0f64 / 11.0).sqrt();
        let v = scaling_law(ScalingLaw::RsRicianDirect, &p, 1).unwrap();
        assert!((v - (1.0 + los * los).log2()).abs() < 1e-14);
        assert!(scaling_law(ScalingLaw::MisoWhitened, &p, 1).is_err());
        assert!(scaling_law(ScalingLaw::OsRayleigh, &p, 0).is_err());
    }

    #[test]
    fn miso_law_matches_definition() {
        let p = LawParams {
            elements: 2.0,
            antennas: 2.0,
            trace_r_inv: Some(2.5),
            ..params()
        };
        let k = 256u64;
        let ln_k = (k as f64).ln();
        let v = scaling_law(ScalingLaw::MisoWhitened, &p, k).unwrap();
        assert!((v - ((4.0 * ln_k).log2() - 2.5f64.log2())).abs() < 1e-14);
        let w = scaling_law(ScalingLaw::MisoWhitenedUnitPower, &p, k).unwrap();
        assert!((v - w - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_invalid_parameters() {
        let bad = LawParams {
            beta: 1.5,
            ..params()
        };
        assert!(scaling_law(ScalingLaw::RsRayleigh, &bad, 4).is_err());
        let bad = LawParams {
            rho_r: -1.0,
            ..params()
        };
        assert!(scaling_law(ScalingLaw::RsRayleigh, &bad, 4).is_err());
    }

    fn arb_params() -> impl Strategy<Value = LawParams> {
        (
            0.01f64..10.0,
            0.01f64..10.0,
            1u32..64,
            1u32..16,
            0.05f64..=1.0,
            0.0f64..20.0,
            0.0f64..20.0,
            1.0f64..8.0,
            1u32..16,
        )
            .prop_map(
                |(rho_r, rho_b, n, m, beta, kappa, kappa_b, lambda, l)| LawParams {
                    rho_r,
                    rho_b,
                    elements: n as f64,
                    antennas: m as f64,
                    beta,
                    kappa,
                    kappa_b,
                    lambda_max: lambda,
                    subcarriers: l as f64,
                    trace_r_inv: None,
                },
            )
    }

    proptest! {
        #[test]
        fn structural_identities(p in arb_params(), k in 1u64..100_000) {
            let thm1 = scaling_law(ScalingLaw::RsRayleigh, &p, k).unwrap();
            let cor1_no_direct = scaling_law(ScalingLaw::RsRayleighDirect, &LawParams { rho_b: 0.0, ..p }, k).unwrap();
            prop_assert_eq!(thm1, cor1_no_direct);

            let cor1 = scaling_law(ScalingLaw::RsRayleighDirect, &p, k).unwrap();
            let cor5 = scaling_law(ScalingLaw::OfdmaRayleigh, &p, k).unwrap();
            prop_assert_eq!(cor5, p.subcarriers * cor1);

            let cor4 = scaling_law(ScalingLaw::RsFullyCorrelated, &p, k).unwrap();
            let thm3 = scaling_law(ScalingLaw::RsCorrelated, &LawParams { lambda_max: p.elements, ..p }, k).unwrap();
            prop_assert_eq!(cor4, thm3);

            let rayleigh = LawParams { kappa: 0.0, kappa_b: 0.0, ..p };
            let cor2 = scaling_law(ScalingLaw::RsRicianDirect, &rayleigh, k).unwrap();
            let cor1 = scaling_law(ScalingLaw::RsRayleighDirect, &rayleigh, k).unwrap();
            prop_assert_eq!(cor2, cor1);

            let cor6 = scaling_law(ScalingLaw::OfdmaRician, &p, k).unwrap();
            let cor2 = scaling_law(ScalingLaw::RsRicianDirect, &p, k).unwrap();
            prop_assert_eq!(cor6, p.subcarriers * cor2);

            // A single element with unit amplitude turns the Rician RS law
            // into the single-antenna Rician law.
            let one = LawParams { elements: 1.0, beta: 1.0, rho_r: p.rho_b, ..p };
            let thm2 = scaling_law(ScalingLaw::RsRician, &one, k).unwrap();
            let eq4 = scaling_law(ScalingLaw::OsRician, &one, k).unwrap();
            prop_assert!((thm2 - eq4).abs() <= 1e-12 * eq4.max(1.0));
        }

        #[test]
        fn laws_increase_in_users_and_elements(p in arb_params(), k in 2u64..100_000) {
            let bigger_n = LawParams { elements: p.elements + 1.0, ..p };
            for law in ScalingLaw::ALL {
                let a = scaling_law(law, &p, k).unwrap();
                let b = scaling_law(law, &p, k + 1).unwrap();
                prop_assert!(b > a, "{} not increasing in K", law);
                let uses_n = !matches!(law, ScalingLaw::OsRayleigh | ScalingLaw::OsRician
                    | ScalingLaw::BsObfRician | ScalingLaw::BsObfFullyCorrelated);
                if uses_n {
                    let c = scaling_law(law, &bigger_n, k).unwrap();
                    prop_assert!(c > a, "{} not increasing in N", law);
                }
            }
        }
    }
}
