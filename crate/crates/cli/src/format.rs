//! Fixed numeric formatting for CSV output.

/// Significant digits of every number written.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Formats like C's `%.12g`: shortest of fixed or scientific, trailing zeros dropped.
pub fn g12(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let p = SIGNIFICANT_DIGITS;
    // Round first, so the exponent reflects the rounded mantissa.
    let sci = format!("{:.*e}", p - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= p as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Joins formatted fields with commas and terminates the row with LF.
pub fn csv_row(fields: &[String]) -> String {
    let mut row = fields.join(",");
    row.push('\n');
    row
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (20.0, "20"),
            (0.1, "0.1"),
            (1.0 / 3.0, "0.333333333333"),
            (0.822713465931885, "0.822713465932"),
            (1e-5, "1e-05"),
            (1.5e-4, "0.00015"),
            (123456789012.0, "123456789012"),
            (1234567890123.0, "1.23456789012e+12"),
            (9.9999999999999e11, "1e+12"),
            (6.02214076e23, "6.02214076e+23"),
        ];
        for (v, s) in cases {
            assert_eq!(g12(v), s, "{v}");
        }
    }

    #[test]
    fn special_values() {
        assert_eq!(g12(f64::NAN), "nan");
        assert_eq!(g12(f64::INFINITY), "inf");
        assert_eq!(g12(-0.0), "0");
    }
}
