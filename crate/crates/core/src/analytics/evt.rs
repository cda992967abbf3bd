//! Extreme-value machinery: the growth function `g = (1 − F)/f` and the
//! location `l_K` solving `F(l_K) = 1 − 1/K`.

use super::distribution::{upper_quantile, SnrDistribution};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvtSummary {
    /// Limit of the growth function.
    pub growth: f64,
    /// `l_K`.
    pub location: f64,
}

/// Grid points per decade when probing `g`.
const PROBES_PER_DECADE: i32 = 4;
/// Decades above the mean covered by the probe.
const PROBE_DECADES: i32 = 3;

/// `g(x) = (1 − F(x)) / f(x)`, evaluated in log space.
pub fn growth_function(dist: &SnrDistribution, x: f64) -> f64 {
    (dist.ln_sf(x) - dist.ln_pdf(x)).exp()
}

/// Estimate `lim g(x)` on a geometric grid up to `10³ ×` the mean.
///
/// Tails of the form `x^p e^{−(√x − s)²/σ²}` approach their limit like
/// `x^{−1/2}`, too slowly for plain inspection, so each estimate is a
/// three-point extrapolation in `x^{−1/2}` and `x^{−1}`. The limit is
/// accepted when the estimates from the last two decades agree within 1%.
pub fn growth_limit(dist: &SnrDistribution) -> Result<f64> {
    let mean = dist.mean();
    let points: Vec<(f64, f64)> = (0..=PROBE_DECADES * PROBES_PER_DECADE)
        .map(|i| {
            let x = mean * 10f64.powf(i as f64 / PROBES_PER_DECADE as f64);
            (x, growth_function(dist, x))
        })
        .collect();
    if points.iter().any(|(_, g)| !g.is_finite() || *g <= 0.0) {
        return Err(Error::NoGrowthLimit(format!(
            "{dist}: g is not finite and positive on the probe grid"
        )));
    }
    let extrapolate = |end: usize| {
        let step = PROBES_PER_DECADE as usize / 2;
        let (a, b, c) = (points[end - 2 * step], points[end - step], points[end]);
        three_point_limit(a, b, c)
    };
    let last = points.len() - 1;
    let top = extrapolate(last);
    let previous = extrapolate(last - PROBES_PER_DECADE as usize);
    if !(top > 0.0) || ((top - previous) / top).abs() > 0.01 {
        return Err(Error::NoGrowthLimit(format!(
            "{dist}: estimates {previous} and {top} differ by more than 1%"
        )));
    }
    Ok(top)
}

// Solve g = c + A x^{−1/2} + B x^{−1} through three points, return c.
fn three_point_limit(p: (f64, f64), q: (f64, f64), r: (f64, f64)) -> f64 {
    let row = |(x, g): (f64, f64)| [1.0, x.powf(-0.5), 1.0 / x, g];
    let mut m = [row(p), row(q), row(r)];
    // Gaussian elimination with partial pivoting on the 3×4 system.
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        m.swap(col, pivot);
        let pivot_row = m[col];
        for row in m.iter_mut().skip(col + 1) {
            let f = row[col] / pivot_row[col];
            for (x, p) in row.iter_mut().zip(pivot_row).skip(col) {
                *x -= f * p;
            }
        }
    }
    let mut sol = [0.0; 3];
    for i in (0..3).rev() {
        let tail: f64 = (i + 1..3).map(|k| m[i][k] * sol[k]).sum();
        sol[i] = (m[i][3] - tail) / m[i][i];
    }
    sol[0]
}

/// Growth-function limit and `l_K` for `K ≥ 2` users.
pub fn evt_growth_and_lk(dist: &SnrDistribution, users: u64) -> Result<EvtSummary> {
    if users < 2 {
        return Err(Error::invalid("the extreme-value location needs K ≥ 2"));
    }
    if !dist.is_continuous() {
        return Err(Error::NoGrowthLimit(format!("{dist} has no density")));
    }
    let growth = growth_limit(dist)?;
    let location = upper_quantile(dist, -(users as f64).ln())?;
    Ok(EvtSummary { growth, location })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_is_exact() {
        let c = 2.5;
        let d = SnrDistribution::exponential(c).unwrap();
        for k in [2u64, 10, 256, 1_000_000] {
            let s = evt_growth_and_lk(&d, k).unwrap();
            assert!((s.growth - c).abs() < 1e-12);
            assert_eq!(s.location, c * (k as f64).ln());
        }
        for x in [0.1, 3.0, 100.0] {
            assert!((growth_function(&d, x) - c).abs() < 1e-12);
        }
    }

    #[test]
    fn gamma_location_grows_like_c_ln_k() {
        let c = 1.7;
        let d = SnrDistribution::gamma(2, c).unwrap();
        let s = evt_growth_and_lk(&d, 1_000_000).unwrap();
        assert!((s.growth / c - 1.0).abs() < 1e-3);
        let ratio = s.location / (c * 1e6f64.ln());
        // For shape 2, 1 − F = e^{−t}(1 + t) with t = x/c, so l_K/c is the
        // fixed point of t = ln K + ln(1 + t).
        let mut t = 1e6f64.ln();
        for _ in 0..100 {
            t = 1e6f64.ln() + t.ln_1p();
        }
        assert!(ratio > 1.0 && ratio < 1.25, "{ratio}");
        assert!((s.location / (c * t) - 1.0).abs() < 1e-9);
        assert!((d.sf(s.location) * 1e6 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn noncentral_growth_limit_is_diffuse_power() {
        // N = 2, β = 1, κ = 10: diffuse power N β² u.
        let u = 1.0 / 11.0;
        let s2 = (2.0 * (10.0f64 / 11.0).sqrt()).powi(2);
        let d = SnrDistribution::noncentral(s2, 2.0 * u).unwrap();
        let g = growth_limit(&d).unwrap();
        assert!((g / (2.0 * u) - 1.0).abs() < 0.01, "{g}");
    }

    #[test]
    fn rejects_small_k_and_point_masses() {
        let d = SnrDistribution::exponential(1.0).unwrap();
        assert!(evt_growth_and_lk(&d, 1).is_err());
        let p = SnrDistribution::degenerate(1.0).unwrap();
        assert!(matches!(
            evt_growth_and_lk(&p, 5),
            Err(Error::NoGrowthLimit(_))
        ));
    }
}
