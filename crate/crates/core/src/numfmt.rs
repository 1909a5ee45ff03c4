//! Decimal rendering helpers shared by the report and ket printers.

/// Round `x` to `digits` significant decimal digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    let digits = digits.clamp(1, 17);
    format!("{:.*e}", digits - 1, x).parse().unwrap_or(x)
}

/// Shortest decimal string for `x` after rounding to `digits` significant
/// digits, without a trailing `.0` (`1`, `0.5`, `-2.5e-7`).
pub fn fmt_sig(x: f64, digits: usize) -> String {
    let r = round_sig(x, digits);
    let r = if r == 0.0 { 0.0 } else { r };
    let s = format!("{r:?}");
    match s.strip_suffix(".0") {
        Some(t) => t.to_string(),
        None => s,
    }
}
