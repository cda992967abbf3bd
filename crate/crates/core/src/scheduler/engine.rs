use rayon::prelude::*;

use super::scenario::{PhaseControl, Scenario, Transmitter};
use super::{schedule_slot, slot_rate, SumRateEstimate};
use crate::beamforming::{
    bs_obf_weights, deterministic_phase_design, effective_correlation, random_phase_schedule,
    BsObfWeights, PhaseVector,
};
use crate::channel::{
    los_vector, wideband_slot, FadingSpec, LinkModel, SlotRealization, UserLinks,
};
use crate::numerics::linalg::CMatrix;
use crate::numerics::stats::mean_and_stderr;
use crate::numerics::RngStream;
use crate::{Error, Result};

// Stream layout. Per-run constants come from `STATIC`, slot `t` from
// `SLOT.substream(t)`; inside a slot the phase schedule, the BS weights and
// the fading each get their own child stream.
pub(super) const STATIC: u64 = 0x7374_6174;
pub(super) const SLOT: u64 = 0x736c_6f74;
pub(super) const PHASES: u64 = 0;
pub(super) const BS_WEIGHTS: u64 = 1;
pub(super) const FADING: u64 = 2;
const RS_USERS: u64 = 0;
const DIRECT_USERS: u64 = 1;

#[derive(Debug, Clone)]
enum PhaseSource {
    Random { elements: usize, beta: f64 },
    Fixed(PhaseVector),
}

#[derive(Debug, Clone)]
enum WeightSource {
    Fixed(BsObfWeights),
    Random { antennas: usize },
}

/// A scenario with its per-run constants drawn, ready to produce slots.
#[derive(Debug, Clone)]
pub struct Simulator {
    models: Vec<LinkModel>,
    phases: Option<PhaseSource>,
    weights: WeightSource,
    slots: RngStream,
    seed: u64,
}

impl Simulator {
    pub fn new(scenario: &Scenario, seed: u64) -> Result<Self> {
        scenario.validate()?;
        let constants = RngStream::new(seed, STATIC);
        let k = scenario.users;

        let (h1, rs_fading, phases) = match &scenario.rs {
            Some(rs) => {
                let h1 = los_vector(&rs.config);
                let n = rs.config.elements();
                let fading =
                    rs.fading
                        .instantiate_population(n, k, constants.substream(RS_USERS))?;
                let phases = match rs.phases {
                    PhaseControl::Random => PhaseSource::Random {
                        elements: n,
                        beta: rs.config.beta(),
                    },
                    PhaseControl::Designed => {
                        let r = match &rs.fading {
                            FadingSpec::CorrelatedRayleigh { correlation } => correlation.clone(),
                            _ => CMatrix::identity(n, n),
                        };
                        let r_bar = effective_correlation(&r, &h1)?;
                        PhaseSource::Fixed(
                            deterministic_phase_design(&r_bar, rs.config.beta())?.applied(),
                        )
                    }
                };
                (Some(h1), Some(fading), Some(phases))
            }
            None => (None, None, None),
        };

        let (direct_fading, weights) = match &scenario.direct {
            Some(d) => {
                let m = d.transmitter.antennas();
                let fading =
                    d.fading
                        .instantiate_population(m, k, constants.substream(DIRECT_USERS))?;
                let weights = match d.transmitter {
                    Transmitter::Single => WeightSource::Fixed(BsObfWeights::single()),
                    Transmitter::Obf { antennas } => WeightSource::Random { antennas },
                    Transmitter::Steered {
                        antennas,
                        angle,
                        spacing,
                    } => WeightSource::Fixed(BsObfWeights::steered(antennas, angle, spacing)?),
                };
                (Some(fading), weights)
            }
            None => (None, WeightSource::Fixed(BsObfWeights::single())),
        };

        let users = (0..k)
            .map(|i| {
                let b = scenario.budgets.user(i);
                UserLinks {
                    rho_r: b.rho_r,
                    rho_b: b.rho_b,
                    rs: rs_fading.as_ref().map(|f| f[i].clone()),
                    direct: direct_fading.as_ref().map(|f| f[i].clone()),
                }
            })
            .collect();
        let model = LinkModel { h1, users };
        Ok(Self {
            models: vec![model; scenario.subcarriers],
            phases,
            weights,
            slots: RngStream::new(seed, SLOT),
            seed,
        })
    }

    pub fn users(&self) -> usize {
        self.models[0].users.len()
    }

    pub(super) fn estimate_seed(&self) -> u64 {
        self.seed
    }

    pub fn subcarriers(&self) -> usize {
        self.models.len()
    }

    /// Every subcarrier of slot `t`.
    pub fn slot(&self, t: u64) -> Result<Vec<SlotRealization>> {
        let stream = self.slots.substream(t);
        let phases = match &self.phases {
            Some(PhaseSource::Random { elements, beta }) => Some(random_phase_schedule(
                *elements,
                *beta,
                &mut stream.substream(PHASES).rng(),
            )?),
            Some(PhaseSource::Fixed(v)) => Some(v.clone()),
            None => None,
        };
        let weights = match &self.weights {
            WeightSource::Fixed(w) => w.clone(),
            WeightSource::Random { antennas } => {
                bs_obf_weights(*antennas, &mut stream.substream(BS_WEIGHTS).rng())?
            }
        };
        wideband_slot(
            &self.models,
            t,
            phases.as_ref(),
            &weights,
            stream.substream(FADING),
        )
    }

    /// Sum over subcarriers of the scheduled user's rate in slot `t`.
    pub fn slot_rate(&self, t: u64) -> Result<f64> {
        self.slot(t)?.iter().map(scheduled_rate).sum()
    }

    /// Largest SNR on subcarrier 0 in each of the first `n_slots` slots.
    pub fn max_snrs(&self, n_slots: u64) -> Result<Vec<f64>> {
        par_slots(n_slots, |t| {
            let s = self.slot(t)?;
            Ok(s[0].snrs[schedule_slot(&s[0].snrs)?])
        })
    }

    pub fn estimate(&self, n_slots: u64) -> Result<SumRateEstimate> {
        let rates = par_slots(n_slots, |t| self.slot_rate(t))?;
        Ok(summarize(&rates, self.seed))
    }
}

fn scheduled_rate(s: &SlotRealization) -> Result<f64> {
    Ok(slot_rate(s.snrs[schedule_slot(&s.snrs)?]))
}

/// Evaluate `f` on slots `0..n_slots` in parallel, returning results in slot order.
pub(super) fn par_slots<T, F>(n_slots: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    if n_slots == 0 {
        return Err(Error::invalid("at least one slot is required"));
    }
    let n = usize::try_from(n_slots)
        .map_err(|_| Error::invalid("slot count exceeds the address space"))?;
    (0..n).into_par_iter().map(|t| f(t as u64)).collect()
}

/// Mean and standard error of per-slot rates. The reduction runs serially
/// in slot order, so it does not depend on the worker count.
pub(super) fn summarize(rates: &[f64], seed: u64) -> SumRateEstimate {
    let (mean, stderr) = mean_and_stderr(rates);
    SumRateEstimate {
        mean,
        stderr,
        n_slots: rates.len() as u64,
        seed,
    }
}

/// Average single-carrier sum rate over `n_slots` slots.
pub fn estimate_sum_rate(scenario: &Scenario, n_slots: u64, seed: u64) -> Result<SumRateEstimate> {
    if scenario.subcarriers != 1 {
        return Err(Error::scenario(format!(
            "{} subcarriers given; use the OFDMA estimator",
            scenario.subcarriers
        )));
    }
    Simulator::new(scenario, seed)?.estimate(n_slots)
}

/// Average OFDMA sum rate: independent scheduling on each subcarrier, the
/// slot rate being the sum of the per-subcarrier rates.
pub fn estimate_ofdma_sum_rate(
    scenario: &Scenario,
    n_slots: u64,
    seed: u64,
) -> Result<SumRateEstimate> {
    Simulator::new(scenario, seed)?.estimate(n_slots)
}
