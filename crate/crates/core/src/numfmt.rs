//! Rounding to a fixed number of significant digits for text output.

/// Rounds `x` to `digits` significant digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    let s = format!("{:.*e}", digits.saturating_sub(1), x);
    s.parse().unwrap_or(x)
}

/// Shortest decimal text for `x` rounded to 9 significant digits.
pub fn fmt9(x: f64) -> String {
    let r = round_sig(x, 9);
    if r == 0.0 {
        "0".to_string()
    } else {
        format!("{r}")
    }
}
