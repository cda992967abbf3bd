use std::path::Path;

use super::figures::Curve;
use crate::{Error, Result};

/// Column order of every emitted CSV.
pub const CSV_HEADER: [&str; 5] = ["x", "sum_rate", "stderr", "label", "kind"];

/// `value` in plain decimal notation with `digits` significant digits.
pub fn format_significant(value: f64, digits: usize) -> String {
    if !value.is_finite() {
        return value.to_string();
    }
    let digits = digits.max(1) as i32;
    if value == 0.0 {
        return format!("{:.*}", (digits - 1) as usize, 0.0);
    }
    let exponent = value.abs().log10().floor() as i32;
    let decimals = (digits - 1 - exponent).max(0) as usize;
    let text = format!("{value:.decimals$}");
    // Rounding can carry into a new leading digit, e.g. 9.9999999996.
    let rounded: f64 = text.parse().expect("formatted float parses");
    if decimals > 0 && rounded.abs() >= 10f64.powi(exponent + 1) {
        format!("{value:.*}", decimals - 1)
    } else {
        text
    }
}

/// Write one curve as CSV, replacing any existing file.
pub fn write_curve_csv(path: &Path, curve: &Curve) -> Result<()> {
    let wrap = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut writer = csv::Writer::from_path(path).map_err(wrap)?;
    writer.write_record(CSV_HEADER).map_err(wrap)?;
    for p in &curve.points {
        writer
            .write_record([
                format_significant(p.x, 9),
                format_significant(p.value, 9),
                format_significant(p.stderr, 9),
                curve.label.clone(),
                curve.kind.as_str().to_string(),
            ])
            .map_err(wrap)?;
    }
    writer.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{CurveKind, CurvePoint};

    #[test]
    fn nine_significant_digits() {
        assert_eq!(format_significant(2.710432312345, 9), "2.71043231");
        assert_eq!(format_significant(256.0, 9), "256.000000");
        assert_eq!(format_significant(17.09601234, 9), "17.0960123");
        assert_eq!(format_significant(0.000123456789123, 9), "0.000123456789");
        assert_eq!(format_significant(-0.5, 9), "-0.500000000");
        assert_eq!(format_significant(0.0, 9), "0.00000000");
        assert_eq!(format_significant(1234567890123.0, 9), "1234567890123");
        assert_eq!(format_significant(f64::NAN, 9), "NaN");
    }

    #[test]
    fn carry_into_new_digit_keeps_digit_count() {
        assert_eq!(format_significant(9.9999999996, 9), "10.0000000");
        assert_eq!(format_significant(0.099999999996, 9), "0.100000000");
    }

    #[test]
    fn csv_has_header_and_fixed_columns() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.csv");
        let curve = Curve {
            label: "Sim, a \"quoted\" label".into(),
            kind: CurveKind::Sim,
            points: vec![CurvePoint {
                x: 2.0,
                value: 1.5,
                stderr: 0.01,
            }],
        };
        write_curve_csv(&path, &curve).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x,sum_rate,stderr,label,kind"));
        assert_eq!(
            lines.next(),
            Some("2.00000000,1.50000000,0.0100000000,\"Sim, a \"\"quoted\"\" label\",sim")
        );
        assert!(write_curve_csv(&dir.path().join("missing/c.csv"), &curve).is_err());
    }
}
