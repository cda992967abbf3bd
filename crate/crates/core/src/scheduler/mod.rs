//! Max-SNR scheduling and the Monte-Carlo sum-rate estimators.

mod engine;
mod miso;
mod scenario;

pub use engine::{estimate_ofdma_sum_rate, estimate_sum_rate, Simulator};
pub use miso::{
    estimate_miso_sum_rate, LosAngles, MisoLink, MisoScenario, MisoSimulator, PowerConvention,
};
pub use scenario::{
    DirectLink, LinkBudgets, PhaseControl, RsLink, Scenario, Transmitter, UserBudget,
};

use crate::{Error, Result};

/// Monte-Carlo estimate of the average sum rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumRateEstimate {
    /// Bits/s/Hz.
    pub mean: f64,
    /// Sample standard deviation over `√n_slots`.
    pub stderr: f64,
    pub n_slots: u64,
    pub seed: u64,
}

/// Index of the user with the largest SNR; ties go to the lowest index.
pub fn schedule_slot(snrs: &[f64]) -> Result<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (k, &s) in snrs.iter().enumerate() {
        if !(s >= 0.0) || !s.is_finite() {
            return Err(Error::Domain {
                name: "snr",
                value: s,
            });
        }
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((k, s));
        }
    }
    best.map(|(k, _)| k).ok_or(Error::Empty)
}

/// `log₂(1 + γ)`.
pub fn slot_rate(snr: f64) -> f64 {
    snr.ln_1p() / std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn schedule_examples() {
        assert_eq!(schedule_slot(&[0.5]).unwrap(), 0);
        assert_eq!(schedule_slot(&[1.0, 3.0, 2.0]).unwrap(), 1);
        assert_eq!(schedule_slot(&[2.0, 2.0]).unwrap(), 0);
        assert!(matches!(schedule_slot(&[]), Err(Error::Empty)));
        assert!(schedule_slot(&[1.0, f64::NAN]).is_err());
        assert!(schedule_slot(&[-1.0]).is_err());
    }

    #[test]
    fn rate_examples() {
        assert_eq!(slot_rate(0.0), 0.0);
        assert_eq!(slot_rate(1.0), 1.0);
        assert_eq!(slot_rate(3.0), 2.0);
    }

    proptest! {
        #[test]
        fn argmax_is_invariant_to_common_scaling(
            snrs in proptest::collection::vec(0.0f64..100.0, 1..64),
            scale in 1e-3f64..1e3,
        ) {
            let k = schedule_slot(&snrs).unwrap();
            let scaled: Vec<f64> = snrs.iter().map(|s| s * scale).collect();
            let j = schedule_slot(&scaled).unwrap();
            // Scaling can merge two nearly equal maxima by rounding; the
            // chosen user must still attain the maximum.
            prop_assert!(j <= k);
            prop_assert_eq!(scaled[j], scaled[k]);
            prop_assert!(snrs.iter().all(|&s| s <= snrs[k]));
        }

        #[test]
        fn picks_first_maximum(snrs in proptest::collection::vec(0u8..4, 1..32)) {
            let snrs: Vec<f64> = snrs.into_iter().map(f64::from).collect();
            let k = schedule_slot(&snrs).unwrap();
            let max = snrs.iter().cloned().fold(f64::MIN, f64::max);
            prop_assert_eq!(snrs[k], max);
            prop_assert!(snrs[..k].iter().all(|&s| s < max));
        }
    }
}
