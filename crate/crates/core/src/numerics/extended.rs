//! Double-double (≈ 31 significant digits) evaluation of `eˣ E₁(x)`, for
//! alternating sums whose terms cancel by many orders of magnitude.
//!
//! Addition and multiplication come from `twofloat`. Its division between
//! two double-doubles and its transcendental functions stop near 1e-17, so
//! [`div_dd`], exp and ln are evaluated here.

use twofloat::TwoFloat;

use crate::{Error, Result};

const TOL: f64 = 1e-31;
/// Below this the power series loses fewer digits than the continued
/// fraction needs iterations.
const SERIES_LIMIT: f64 = 1.0;

/// `a / b` by two correction steps of long division.
pub fn div_dd(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let q1 = a.hi() / b.hi();
    let r = a - b * q1;
    let q2 = r.hi() / b.hi();
    let r = r - b * q2;
    let q3 = r.hi() / b.hi();
    TwoFloat::new_add(q1, q2) + q3
}

fn recip_dd(b: TwoFloat) -> TwoFloat {
    div_dd(TwoFloat::from(1.0), b)
}

fn euler_gamma() -> TwoFloat {
    TwoFloat::from(0.577_215_664_901_532_9) + TwoFloat::from(-4.942_915_152_430_645e-18)
}

/// `eˣ` by argument reduction `x = k ln2 + r` and a Taylor series in `r`.
pub fn exp_dd(x: TwoFloat) -> TwoFloat {
    let ln2 = twofloat::consts::LN_2;
    let k = (x.hi() / ln2.hi()).round();
    let r = x - ln2 * k;
    let mut term = TwoFloat::from(1.0);
    let mut sum = TwoFloat::from(1.0);
    for n in 1..60 {
        term = term * r / n as f64;
        sum += term;
        if term.hi().abs() < TOL * sum.hi().abs() {
            break;
        }
    }
    sum * 2f64.powi(k as i32)
}

/// Natural logarithm by Newton iteration on [`exp_dd`].
pub fn ln_dd(x: TwoFloat) -> TwoFloat {
    let mut y = TwoFloat::from(x.hi().ln());
    for _ in 0..2 {
        y = y + x * exp_dd(-y) - 1.0;
    }
    y
}

/// `eˣ E₁(x)` for `x > 0` in double-double precision.
pub fn exp_scaled_e1_dd(x: TwoFloat) -> Result<TwoFloat> {
    if !(x.hi() > 0.0) || !x.hi().is_finite() {
        return Err(Error::Domain {
            name: "x",
            value: x.hi(),
        });
    }
    if x.hi() < SERIES_LIMIT {
        Ok(exp_dd(x) * e1_series_dd(x))
    } else {
        e1_continued_fraction_dd(x)
    }
}

// E₁(x) = −γ − ln x − Σ (−x)ⁿ / (n·n!)
fn e1_series_dd(x: TwoFloat) -> TwoFloat {
    let mut sum = TwoFloat::from(0.0);
    let mut power = TwoFloat::from(1.0);
    for n in 1..400 {
        let nf = n as f64;
        power = -power * x / nf;
        let term = power / nf;
        sum += term;
        if term.hi().abs() < TOL * sum.hi().abs() {
            break;
        }
    }
    -euler_gamma() - ln_dd(x) - sum
}

// Modified Lentz on the same fraction as the f64 routine.
fn e1_continued_fraction_dd(x: TwoFloat) -> Result<TwoFloat> {
    let tiny = TwoFloat::from(1e-300);
    let mut b = x + 1.0;
    let mut c = recip_dd(tiny);
    let mut d = recip_dd(b);
    let mut h = d;
    for i in 1..20_000u32 {
        let an = -f64::from(i) * f64::from(i);
        b += 2.0;
        d = recip_dd(d * an + b);
        c = b + div_dd(TwoFloat::from(an), c);
        let del = c * d;
        h *= del;
        if (del - 1.0).hi().abs() < TOL {
            return Ok(h);
        }
    }
    Err(Error::Nonconvergent(format!(
        "eˣE₁({}) continued fraction",
        x.hi()
    )))
}
