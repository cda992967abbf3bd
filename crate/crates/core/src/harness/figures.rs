//! Figure jobs: every curve of a figure evaluated over its sweep grid and
//! written as one CSV per curve.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use super::config::{estimate_scenario, PLACEMENT};
use super::output::write_curve_csv;
use super::{
    build_homogeneous_scenario, build_scenario, place_users_and_path_loss, FadingModel, Geometry,
    HomogeneousParams, MisoParams, DEFAULT_SEED,
};
use crate::analytics::{scaling_law, LawParams, ScalingLaw};
use crate::numerics::linalg::{exponential_correlation, hermitian_eig};
use crate::numerics::RngStream;
use crate::scheduler::{
    estimate_miso_sum_rate, LinkBudgets, PhaseControl, PowerConvention, Simulator, SumRateEstimate,
};
use crate::{Error, Result};

/// The reproducible figures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FigureId {
    /// Histogram of the composite channel amplitude of one user.
    AmplitudePdf,
    /// Sum rate against `K` under Rayleigh fading.
    RayleighSumRate,
    /// Sum rate against `K` under Rician fading.
    RicianSumRate,
    /// Sum rate against `N` with path-loss budgets from the geometry.
    GeometricCrossover,
    /// Sum rate against the correlation coefficient `η`.
    CorrelatedFading,
    /// OFDMA sum rate against `K`.
    Ofdma,
    /// MISO sum rate against `K`.
    Miso,
}

impl FigureId {
    pub const ALL: [FigureId; 7] = [
        FigureId::AmplitudePdf,
        FigureId::RayleighSumRate,
        FigureId::RicianSumRate,
        FigureId::GeometricCrossover,
        FigureId::CorrelatedFading,
        FigureId::Ofdma,
        FigureId::Miso,
    ];

    pub fn id(self) -> &'static str {
        match self {
            FigureId::AmplitudePdf => "fig2a",
            FigureId::RayleighSumRate => "fig2b",
            FigureId::RicianSumRate => "fig2c",
            FigureId::GeometricCrossover => "fig3",
            FigureId::CorrelatedFading => "fig4",
            FigureId::Ofdma => "fig5",
            FigureId::Miso => "fig6",
        }
    }

    /// Bin edges for the amplitude histogram, `N` for the geometric sweep,
    /// `η` for the correlation sweep and `K` otherwise.
    pub fn default_grid(self) -> Vec<f64> {
        match self {
            FigureId::AmplitudePdf => (0..=100).map(|i| 0.06 * i as f64).collect(),
            FigureId::GeometricCrossover => vec![2.0, 4.0, 8.0, 16.0, 32.0],
            FigureId::CorrelatedFading => (0..=8).map(|i| 0.1 * i as f64).collect(),
            _ => (0..=8).map(|i| (1u32 << i) as f64).collect(),
        }
    }

    pub fn default_slots(self) -> u64 {
        match self {
            FigureId::AmplitudePdf => 1_000_000,
            _ => 100_000,
        }
    }

    fn validate_grid(self, grid: &[f64]) -> Result<()> {
        if grid.is_empty() {
            return Err(Error::invalid("the sweep grid is empty"));
        }
        if grid.iter().any(|v| !v.is_finite()) || grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid(
                "the sweep grid must be finite and strictly increasing",
            ));
        }
        match self {
            FigureId::AmplitudePdf => {
                if grid.len() < 2 || grid[0] < 0.0 {
                    return Err(Error::invalid(
                        "histogram edges need two or more nonnegative values",
                    ));
                }
            }
            FigureId::CorrelatedFading => {
                if grid[0] < 0.0 || grid[grid.len() - 1] >= 1.0 {
                    return Err(Error::invalid(
                        "correlation coefficients must lie in [0, 1)",
                    ));
                }
            }
            _ => {
                if grid.iter().any(|&v| v < 1.0 || v.fract() != 0.0) {
                    return Err(Error::invalid(
                        "user and element counts must be positive integers",
                    ));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        FigureId::ALL
            .into_iter()
            .find(|f| f.id() == key)
            .ok_or_else(|| {
                let ids: Vec<_> = FigureId::ALL.iter().map(|f| f.id()).collect();
                Error::invalid(format!(
                    "unknown figure `{s}`; expected one of {}",
                    ids.join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    Sim,
    Analytic,
}

impl CurveKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CurveKind::Sim => "sim",
            CurveKind::Analytic => "analytic",
        }
    }
}

/// One point of a curve. For the amplitude histogram `value` is the
/// density of the bin centred at `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub x: f64,
    pub value: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub label: String,
    pub kind: CurveKind,
    pub points: Vec<CurvePoint>,
}

impl Curve {
    /// File-name stem derived from the label.
    pub fn slug(&self) -> String {
        let mut out = String::new();
        for c in self.label.chars() {
            if c.is_ascii_alphanumeric() {
                out.push(c.to_ascii_lowercase());
            } else if !out.ends_with('-') && !out.is_empty() {
                out.push('-');
            }
        }
        out.trim_end_matches('-').to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureJob {
    pub figure: FigureId,
    pub grid: Vec<f64>,
    pub slots: u64,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl FigureJob {
    /// Job with the figure's default grid and slot count.
    pub fn new(figure: FigureId, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            figure,
            grid: figure.default_grid(),
            slots: figure.default_slots(),
            seed: DEFAULT_SEED,
            out_dir: out_dir.into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.slots == 0 {
            return Err(Error::invalid("at least one slot is required"));
        }
        self.figure.validate_grid(&self.grid)
    }
}

/// Evaluate every curve of the job without touching the filesystem.
pub fn compute_figure(job: &FigureJob) -> Result<Vec<Curve>> {
    job.validate()?;
    if job.figure == FigureId::AmplitudePdf {
        return amplitude_histograms(job);
    }
    let specs = match job.figure {
        FigureId::RayleighSumRate => rayleigh_curves(job),
        FigureId::RicianSumRate => rician_curves(job),
        FigureId::GeometricCrossover => geometric_curves(job),
        FigureId::CorrelatedFading => correlated_curves(job),
        FigureId::Ofdma => ofdma_curves(job),
        FigureId::Miso => miso_curves(job),
        FigureId::AmplitudePdf => unreachable!(),
    };
    evaluate(specs, &job.grid)
}

/// Compute the job and write one CSV per curve into `job.out_dir`, named
/// `<figure>_<label>.csv`. Returns the written paths.
pub fn run_figure(job: &FigureJob) -> Result<Vec<PathBuf>> {
    let curves = compute_figure(job)?;
    let dir = job.out_dir.as_path();
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    curves
        .iter()
        .map(|c| write_into(dir, job.figure, c))
        .collect()
}

fn write_into(dir: &Path, figure: FigureId, curve: &Curve) -> Result<PathBuf> {
    let path = dir.join(format!("{}_{}.csv", figure.id(), curve.slug()));
    write_curve_csv(&path, curve)?;
    Ok(path)
}

type PointFn = Box<dyn Fn(f64) -> Result<(f64, f64)> + Send + Sync>;

struct CurveSpec {
    label: String,
    kind: CurveKind,
    eval: PointFn,
}

fn sim(
    label: impl Into<String>,
    f: impl Fn(f64) -> Result<SumRateEstimate> + Send + Sync + 'static,
) -> CurveSpec {
    CurveSpec {
        label: label.into(),
        kind: CurveKind::Sim,
        eval: Box::new(move |x| f(x).map(|e| (e.mean, e.stderr))),
    }
}

fn analytic(
    label: impl Into<String>,
    f: impl Fn(f64) -> Result<f64> + Send + Sync + 'static,
) -> CurveSpec {
    CurveSpec {
        label: label.into(),
        kind: CurveKind::Analytic,
        eval: Box::new(move |x| f(x).map(|v| (v, 0.0))),
    }
}

// All (curve, x) points run in parallel; results come back in grid order.
fn evaluate(specs: Vec<CurveSpec>, grid: &[f64]) -> Result<Vec<Curve>> {
    let tasks: Vec<(usize, f64)> = (0..specs.len())
        .flat_map(|c| grid.iter().map(move |&x| (c, x)))
        .collect();
    let values = tasks
        .par_iter()
        .map(|&(c, x)| (specs[c].eval)(x).map(|(value, stderr)| CurvePoint { x, value, stderr }))
        .collect::<Result<Vec<_>>>()?;
    Ok(specs
        .into_iter()
        .zip(values.chunks(grid.len()))
        .map(|(spec, points)| Curve {
            label: spec.label,
            kind: spec.kind,
            points: points.to_vec(),
        })
        .collect())
}

fn sim_homogeneous(
    label: impl Into<String>,
    job: &FigureJob,
    params: impl Fn(f64) -> HomogeneousParams + Send + Sync + 'static,
) -> CurveSpec {
    let (slots, seed) = (job.slots, job.seed);
    sim(label, move |x| {
        estimate_scenario(&build_homogeneous_scenario(&params(x))?, slots, seed)
    })
}

fn law(label: impl Into<String>, law: ScalingLaw, params: LawParams) -> CurveSpec {
    analytic(label, move |k| scaling_law(law, &params, k as u64))
}

fn by_users(base: HomogeneousParams) -> impl Fn(f64) -> HomogeneousParams + Send + Sync + 'static {
    move |k| base.clone().users(k as usize)
}

fn rayleigh_curves(job: &FigureJob) -> Vec<CurveSpec> {
    let base = HomogeneousParams::default();
    vec![
        sim_homogeneous("Sim. OS M=1", job, by_users(base.clone())),
        law("Ana. OS M=1", ScalingLaw::OsRayleigh, LawParams::default()),
        sim_homogeneous(
            "Sim. BS-assisted OBF M=2",
            job,
            by_users(base.clone().antennas(2)),
        ),
        sim_homogeneous(
            "Sim. RS-assisted OBF N=2, M=1",
            job,
            by_users(base.clone().elements(2)),
        ),
        law(
            "Ana. RS-assisted OBF N=2, M=1",
            ScalingLaw::RsRayleighDirect,
            LawParams {
                elements: 2.0,
                ..LawParams::default()
            },
        ),
        sim_homogeneous(
            "Sim. RS-assisted OBF N=4, M=1",
            job,
            by_users(base.elements(4)),
        ),
    ]
}

const KAPPA: f64 = 10.0;

fn rician_curves(job: &FigureJob) -> Vec<CurveSpec> {
    let base = HomogeneousParams::default().fading(FadingModel::Rician {
        kappa: KAPPA,
        kappa_b: KAPPA,
    });
    let p = LawParams {
        kappa: KAPPA,
        kappa_b: KAPPA,
        ..LawParams::default()
    };
    vec![
        sim_homogeneous("Sim. OS M=1", job, by_users(base.clone())),
        law("Ana. OS M=1", ScalingLaw::OsRician, p),
        sim_homogeneous(
            "Sim. BS-assisted OBF M=2",
            job,
            by_users(base.clone().antennas(2)),
        ),
        law(
            "Ana. BS-assisted OBF M=2",
            ScalingLaw::BsObfRician,
            LawParams { antennas: 2.0, ..p },
        ),
        sim_homogeneous(
            "Sim. RS-assisted OBF N=2, M=1",
            job,
            by_users(base.clone().elements(2)),
        ),
        law(
            "Ana. RS-assisted OBF N=2, M=1",
            ScalingLaw::RsRicianDirect,
            LawParams { elements: 2.0, ..p },
        ),
        sim_homogeneous(
            "Sim. RS-assisted OBF N=4, M=1",
            job,
            by_users(base.elements(4)),
        ),
    ]
}

/// User counts of the geometric sweep.
pub const GEOMETRIC_USERS: [usize; 2] = [64, 128];

fn geometric_curves(job: &FigureJob) -> Vec<CurveSpec> {
    let mut specs = Vec::new();
    for users in GEOMETRIC_USERS {
        let base = HomogeneousParams::default()
            .users(users)
            .fading(FadingModel::Rician {
                kappa: KAPPA,
                kappa_b: KAPPA,
            });
        let mut add =
            |label: String, params: Box<dyn Fn(f64) -> HomogeneousParams + Send + Sync>| {
                let (slots, seed) = (job.slots, job.seed);
                specs.push(sim(label, move |x| {
                    let p = params(x);
                    let budgets = place_users_and_path_loss(
                        &Geometry::default(),
                        p.users,
                        RngStream::new(seed, PLACEMENT),
                    )?;
                    estimate_scenario(
                        &build_scenario(&p, LinkBudgets::PerUser(budgets))?,
                        slots,
                        seed,
                    )
                }));
            };
        let os = base.clone();
        add(format!("OS M=1, K={users}"), Box::new(move |_| os.clone()));
        for m in [2, 4, 8] {
            let bs = base.clone().antennas(m);
            add(
                format!("BS-assisted OBF M={m}, K={users}"),
                Box::new(move |_| bs.clone()),
            );
        }
        // The RS curve transmits over the reflected path only; the variant
        // with the direct link kept is emitted alongside.
        let rs = base.clone().without_direct();
        add(
            format!("RS-assisted OBF M=1, K={users}"),
            Box::new(move |n| rs.clone().elements(n as usize)),
        );
        let composite = base.clone();
        add(
            format!("RS-assisted OBF M=1 with direct link, K={users}"),
            Box::new(move |n| composite.clone().elements(n as usize)),
        );
    }
    specs
}

/// Users in the correlation sweep.
pub const CORRELATED_USERS: usize = 128;

fn correlated_curves(job: &FigureJob) -> Vec<CurveSpec> {
    let base = HomogeneousParams::default().users(CORRELATED_USERS);
    let mut specs = vec![sim_homogeneous("Rayleigh, OS M=1", job, {
        let b = base.clone();
        move |_| b.clone()
    })];
    for n in [2usize, 3] {
        let rs = base.clone().elements(n);
        specs.push(sim_homogeneous(
            format!("Rayleigh, RS-assisted OBF N={n}"),
            job,
            {
                let b = rs.clone();
                move |_| b.clone()
            },
        ));
        specs.push(sim_homogeneous(
            format!("Corr. Rayleigh, RS-assisted OBF N={n}"),
            job,
            {
                let b = rs.clone();
                move |eta| b.clone().fading(FadingModel::Correlated { eta })
            },
        ));
        specs.push(sim_homogeneous(
            format!("Corr. Rayleigh, RS-assisted designed OBF N={n}"),
            job,
            {
                let b = rs.clone().phases(PhaseControl::Designed);
                move |eta| b.clone().fading(FadingModel::Correlated { eta })
            },
        ));
        specs.push(analytic(format!("Ana. designed OBF N={n}"), move |eta| {
            let lambda_max = hermitian_eig(&exponential_correlation(n, eta)?)?.max_value();
            let p = LawParams {
                elements: n as f64,
                lambda_max,
                ..LawParams::default()
            };
            scaling_law(ScalingLaw::RsCorrelatedDirect, &p, CORRELATED_USERS as u64)
        }));
    }
    specs
}

fn ofdma_curves(job: &FigureJob) -> Vec<CurveSpec> {
    let mut specs = Vec::new();
    for l in [1usize, 4] {
        let base = HomogeneousParams::default().subcarriers(l);
        let lf = l as f64;
        specs.push(sim_homogeneous(
            format!("OS M=1, L={l}"),
            job,
            by_users(base.clone()),
        ));
        specs.push(analytic(format!("Ana. OS M=1 times L, L={l}"), move |k| {
            Ok(lf * scaling_law(ScalingLaw::OsRayleigh, &LawParams::default(), k as u64)?)
        }));
        specs.push(sim_homogeneous(
            format!("RS-assisted OBF N=2, M=1, L={l}"),
            job,
            by_users(base.elements(2)),
        ));
        specs.push(law(
            format!("Ana. RS-assisted OBF N=2, M=1, L={l}"),
            ScalingLaw::OfdmaRayleigh,
            LawParams {
                elements: 2.0,
                subcarriers: lf,
                ..LawParams::default()
            },
        ));
    }
    specs
}

fn miso_curves(job: &FigureJob) -> Vec<CurveSpec> {
    let cases = [
        ("OS M=1", 1, 0, PowerConvention::PerAntenna),
        (
            "RS-assisted OBF M=1, N=2",
            1,
            2,
            PowerConvention::PerAntenna,
        ),
        ("BS-assisted OBF M=2", 2, 0, PowerConvention::PerAntenna),
        (
            "RS-assisted OBF M=2, N=2",
            2,
            2,
            PowerConvention::PerAntenna,
        ),
        ("BS-assisted OBF P=1, M=2", 2, 0, PowerConvention::UnitTotal),
        (
            "RS-assisted OBF P=1, M=2, N=2",
            2,
            2,
            PowerConvention::UnitTotal,
        ),
    ];
    cases
        .into_iter()
        .map(|(label, antennas, elements, power)| {
            let (slots, seed) = (job.slots, job.seed);
            sim(label, move |k| {
                let p = MisoParams {
                    users: k as usize,
                    antennas,
                    elements,
                    power,
                    ..MisoParams::default()
                };
                estimate_miso_sum_rate(&p.to_scenario()?, slots, seed)
            })
        })
        .collect()
}

fn amplitude_histograms(job: &FigureJob) -> Result<Vec<Curve>> {
    let rayleigh = HomogeneousParams::default();
    let rician = rayleigh.clone().fading(FadingModel::Rician {
        kappa: KAPPA,
        kappa_b: KAPPA,
    });
    let cases = [
        ("Rayleigh, OS M=1", rayleigh.clone()),
        (
            "Rayleigh, BS-assisted OBF M=2",
            rayleigh.clone().antennas(2),
        ),
        ("Rayleigh, RS-assisted OBF N=2, M=1", rayleigh.elements(2)),
        ("Rician, OS M=1", rician.clone()),
        ("Rician, BS-assisted OBF M=2", rician.clone().antennas(2)),
        ("Rician, RS-assisted OBF N=2, M=1", rician.elements(2)),
    ];
    let edges = &job.grid;
    let centers: Vec<f64> = edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let mut curves = cases
        .par_iter()
        .map(|(label, params)| {
            let sim = Simulator::new(&build_homogeneous_scenario(params)?, job.seed)?;
            let amplitudes: Vec<f64> = sim
                .max_snrs(job.slots)?
                .into_iter()
                .map(f64::sqrt)
                .collect();
            Ok(Curve {
                label: label.to_string(),
                kind: CurveKind::Sim,
                points: histogram(&amplitudes, edges),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    curves.push(Curve {
        label: "Ana. Rayleigh amplitude pdf".into(),
        kind: CurveKind::Analytic,
        points: centers
            .iter()
            .map(|&x| CurvePoint {
                x,
                value: 2.0 * x * (-x * x).exp(),
                stderr: 0.0,
            })
            .collect(),
    });
    Ok(curves)
}

/// Density per bin with its binomial standard error; samples outside the
/// edges count towards the total only.
fn histogram(samples: &[f64], edges: &[f64]) -> Vec<CurvePoint> {
    let bins = edges.len() - 1;
    let mut counts = vec![0u64; bins];
    for &s in samples {
        if s < edges[0] || s > edges[bins] {
            continue;
        }
        let i = edges
            .partition_point(|&e| e <= s)
            .saturating_sub(1)
            .min(bins - 1);
        counts[i] += 1;
    }
    let n = samples.len() as f64;
    counts
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let width = edges[i + 1] - edges[i];
            let p = c as f64 / n;
            CurvePoint {
                x: 0.5 * (edges[i] + edges[i + 1]),
                value: p / width,
                stderr: (p * (1.0 - p) / n).sqrt() / width,
            }
        })
        .collect()
}
