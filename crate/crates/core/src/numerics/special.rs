//! Exponential integral and modified Bessel functions of the first kind.

use crate::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Upper incomplete gamma function of order zero, `Γ(0, x) = E₁(x)`.
///
/// Power series below `x = 1`, Lentz continued fraction above.
pub fn gamma0_upper(x: f64) -> Result<f64> {
    check_positive(x)?;
    if x < 1.0 {
        Ok(e1_series(x))
    } else {
        Ok((-x).exp() * e1_continued_fraction(x))
    }
}

/// `eˣ Γ(0, x)`, evaluated without forming `eˣ` for large arguments.
///
/// This is the building block of the closed-form Rayleigh sum capacity,
/// where `x` can reach several hundred.
pub fn exp_scaled_gamma0_upper(x: f64) -> Result<f64> {
    check_positive(x)?;
    if x < 1.0 {
        Ok(x.exp() * e1_series(x))
    } else {
        Ok(e1_continued_fraction(x))
    }
}

fn check_positive(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "x",
            value: x,
        })
    }
}

// E₁(x) = −γ − ln x − Σ (−x)ⁿ / (n·n!)
fn e1_series(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut power = 1.0;
    for n in 1..200 {
        let nf = n as f64;
        power *= -x / nf;
        let term = power / nf;
        sum += term;
        if term.abs() < f64::EPSILON * sum.abs() {
            break;
        }
    }
    -EULER_GAMMA - x.ln() - sum
}

// Continued fraction for eˣ E₁(x), modified Lentz; converges fast for x ≥ 1.
fn e1_continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

/// Modified Bessel function of the first kind, `I_m(x)`.
///
/// Overflows to infinity past `x ≈ 709`; use [`bessel_i_scaled`] there.
pub fn bessel_i(order: u32, x: f64) -> Result<f64> {
    Ok(bessel_i_scaled(order, x)? * x.exp())
}

/// Exponentially scaled Bessel function `e^{−x} I_m(x)`.
pub fn bessel_i_scaled(order: u32, x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain {
            name: "x",
            value: x,
        });
    }
    if x == 0.0 {
        return Ok(if order == 0 { 1.0 } else { 0.0 });
    }
    let m = order as f64;
    if x > 40.0 + 0.5 * m * m {
        Ok(scaled_asymptotic(m, x))
    } else {
        Ok(scaled_series(order, x))
    }
}

// All terms of the power series are positive; each is at most e^{-x} I_m(x),
// so starting in log space keeps them inside the f64 range.
fn scaled_series(order: u32, x: f64) -> f64 {
    let m = order as f64;
    let half = 0.5 * x;
    let ln_factorial: f64 = (1..=order).map(|k| (k as f64).ln()).sum();
    let mut term = (m * half.ln() - ln_factorial - x).exp();
    let quarter_sq = half * half;
    let mut sum = term;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= quarter_sq / (k * (k + m));
        sum += term;
        if (k > half && term <= f64::EPSILON * sum) || k > 5000.0 {
            break;
        }
    }
    sum
}

// Hankel expansion e^{-x} I_m(x) ~ (2πx)^{-1/2} Σ (−1)^k a_k(m) / x^k.
fn scaled_asymptotic(m: f64, x: f64) -> f64 {
    let mu = 4.0 * m * m;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..500 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        let next = -term * (mu - odd * odd) / (kf * 8.0 * x);
        if next.abs() > term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < f64::EPSILON * sum.abs() {
            break;
        }
    }
    sum / (2.0 * std::f64::consts::PI * x).sqrt()
}

/// `e^{−x} I_k(x)` for every order `k = 0..=max_order`, by Miller's backward
/// recurrence normalised with `I₀ + 2 Σ_{k≥1} I_k = eˣ`.
pub fn bessel_i_scaled_orders(max_order: usize, x: f64) -> Result<Vec<f64>> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain {
            name: "x",
            value: x,
        });
    }
    let mut out = vec![0.0; max_order + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return Ok(out);
    }
    let start = max_order + 30 + (10.0 * x.sqrt()) as usize;
    let two_over_x = 2.0 / x;
    let mut above = 0.0;
    let mut current = 1e-300;
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        let below = above + (k as f64) * two_over_x * current;
        above = current;
        current = below;
        // `above` now holds order k, `current` order k - 1.
        if k <= max_order {
            out[k] = above;
        }
        norm += 2.0 * above;
        if current > 1e250 {
            const SHRINK: f64 = 1e-250;
            current *= SHRINK;
            above *= SHRINK;
            norm *= SHRINK;
            out.iter_mut().for_each(|v| *v *= SHRINK);
        }
    }
    out[0] = current;
    norm += current;
    out.iter_mut().for_each(|v| *v /= norm);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    // Reference values from a 30-digit mpmath evaluation.
    const E1_TABLE: &[(f64, f64)] = &[
        (1e-6, 13.238295893062491),
        (0.5, 0.559_773_594_776_160_8),
        (1.0, 0.219_383_934_395_520_27),
        (2.5, 0.024_914_917_870_269_735),
        (10.0, 4.156_968_929_685_324_3e-6),
        (50.0, 3.783_264_029_550_459e-24),
        (300.0, 1.710_384_276_804_510_1e-133),
        (700.0, 1.406_518_766_234_032_9e-307),
    ];

    #[test]
    fn e1_matches_reference_table() {
        for &(x, want) in E1_TABLE {
            let got = gamma0_upper(x).unwrap();
            assert!(rel(got, want) < 1e-10, "E1({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn e1_examples() {
        assert!((gamma0_upper(1.0).unwrap() - 0.2193839344).abs() < 1e-10);
        assert!(rel(gamma0_upper(10.0).unwrap(), 4.15697e-6) < 1e-5);
    }

    #[test]
    fn e1_series_and_fraction_agree_at_the_split() {
        for &x in &[0.8, 0.95, 1.0, 1.05, 1.3] {
            let series = e1_series(x);
            let cf = (-x).exp() * e1_continued_fraction(x);
            assert!(rel(series, cf) < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn e1_leading_asymptotic_term() {
        for &x in &[1e2, 1e3, 1e5] {
            let v = exp_scaled_gamma0_upper(x).unwrap() * x;
            assert!((v - 1.0).abs() < 1.5 / x, "x = {x}: {v}");
        }
    }

    #[test]
    fn e1_rejects_nonpositive() {
        assert!(gamma0_upper(0.0).is_err());
        assert!(gamma0_upper(-1.0).is_err());
        assert!(gamma0_upper(f64::NAN).is_err());
    }

    const BESSEL_TABLE: &[(u32, f64, f64)] = &[
        (0, 1.0, 0.465_759_607_593_640_44),
        (1, 1.0, 0.207_910_415_349_708_45),
        (0, 10.0, 0.127_833_337_163_428_61),
        (3, 10.0, 0.079_830_361_029_840_517),
        (0, 100.0, 0.039_944_379_299_096_683),
        (5, 100.0, 0.035_229_468_707_741_779),
        (0, 700.0, 0.015_081_295_651_531_358),
        (2, 700.0, 0.015_038_237_024_546_452),
        (10, 5.0, 3.086_009_654_986_541_6e-5),
        (20, 30.0, 1.054_590_169_892_687_7e-4),
        (40, 600.0, 4.291_385_379_446_061_7e-3),
    ];

    #[test]
    fn scaled_bessel_matches_reference_table() {
        for &(m, x, want) in BESSEL_TABLE {
            let got = bessel_i_scaled(m, x).unwrap();
            assert!(rel(got, want) < 1e-9, "I_{m}({x}): {got} vs {want}");
        }
    }

    #[test]
    fn bessel_examples() {
        assert_eq!(bessel_i(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_i(1, 0.0).unwrap(), 0.0);
        // Σ (x/2)^{2n} / (n!)² at x = 1.
        let mut oracle = 0.0;
        let mut term = 1.0;
        for n in 0..30 {
            if n > 0 {
                term *= 0.25 / ((n * n) as f64);
            }
            oracle += term;
        }
        assert!(rel(bessel_i(0, 1.0).unwrap(), oracle) < 1e-12);
        assert!((bessel_i(0, 1.0).unwrap() - 1.2660658778).abs() < 1e-10);
    }

    #[test]
    fn miller_sequence_agrees_with_direct_evaluation() {
        for &x in &[0.3, 2.0, 17.0, 45.0, 120.0, 650.0] {
            let seq = bessel_i_scaled_orders(25, x).unwrap();
            for (m, &v) in seq.iter().enumerate() {
                let direct = bessel_i_scaled(m as u32, x).unwrap();
                if direct > 1e-250 {
                    assert!(rel(v, direct) < 1e-9, "x = {x}, m = {m}: {v} vs {direct}");
                }
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn scaled_e1_lies_between_bounds(x in 1e-6f64..700.0) {
            let v = exp_scaled_gamma0_upper(x).unwrap();
            proptest::prop_assert!(v > 1.0 / (x + 1.0) && v < 1.0 / x);
        }
    }

    #[test]
    fn bessel_rejects_negative_argument() {
        assert!(bessel_i(0, -1.0).is_err());
        assert!(bessel_i_scaled_orders(3, -0.5).is_err());
    }
}
