//! printf-compatible float formatting (`%.*e`, `%.*g`).
//!
//! Rust's `{:e}` writes `1.5e0`; the log and CSV formats need the C layout
//! `1.5e+00` so that files can be produced and checked by any tool.

/// Formats `value` like C's `%.{precision}e`.
pub fn format_e(value: f64, precision: usize) -> String {
    if let Some(s) = non_finite(value) {
        return s.to_string();
    }
    let rust = format!("{value:.precision$e}");
    let (mantissa, exponent) = rust.split_once('e').expect("exponent marker");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    format!("{mantissa}{}", c_exponent(exponent))
}

/// Formats `value` like C's `%.{precision}g`.
pub fn format_g(value: f64, precision: usize) -> String {
    if let Some(s) = non_finite(value) {
        return s.to_string();
    }
    let precision = precision.max(1);
    if value == 0.0 {
        return if value.is_sign_negative() { "-0" } else { "0" }.to_string();
    }
    // The exponent is the one %e would print after rounding.
    let probe = format!("{value:.prec$e}", prec = precision - 1);
    let exponent: i32 = probe
        .split_once('e')
        .and_then(|(_, e)| e.parse().ok())
        .expect("integer exponent");
    let body = if exponent < -4 || exponent >= precision as i32 {
        let (mantissa, _) = probe.split_once('e').expect("exponent marker");
        format!("{}{}", strip_zeros(mantissa), c_exponent(exponent))
    } else {
        let decimals = (precision as i32 - 1 - exponent) as usize;
        strip_zeros(&format!("{value:.decimals$}")).to_string()
    };
    body
}

fn non_finite(value: f64) -> Option<&'static str> {
    if value.is_nan() {
        Some(if value.is_sign_negative() {
            "-nan"
        } else {
            "nan"
        })
    } else if value.is_infinite() {
        Some(if value < 0.0 { "-inf" } else { "inf" })
    } else {
        None
    }
}

fn c_exponent(exponent: i32) -> String {
    let sign = if exponent < 0 { '-' } else { '+' };
    format!("e{sign}{:02}", exponent.unsigned_abs())
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
