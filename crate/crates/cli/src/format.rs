//! Locale-independent decimal formatting with a fixed number of
//! significant digits.

/// Formats `x` in positional decimal notation with `digits` significant
/// digits, e.g. `format_significant(1.5e-4, 3) == "0.000150"`.
pub fn format_significant(x: f64, digits: usize) -> String {
    debug_assert!(x.is_finite());
    let digits = digits.max(1);
    if x == 0.0 {
        return if digits > 1 {
            format!("0.{}", "0".repeat(digits - 1))
        } else {
            "0".to_string()
        };
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exponent) = sci.split_once('e').expect("exponent in {:e} output");
    let exponent: i64 = exponent.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let significand: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();

    let mut out = String::with_capacity(digits + 8);
    if negative {
        out.push('-');
    }
    if exponent < 0 {
        out.push_str("0.");
        out.push_str(&"0".repeat((-exponent - 1) as usize));
        out.push_str(&significand);
    } else {
        let int_len = exponent as usize + 1;
        if int_len >= significand.len() {
            out.push_str(&significand);
            out.push_str(&"0".repeat(int_len - significand.len()));
        } else {
            out.push_str(&significand[..int_len]);
            out.push('.');
            out.push_str(&significand[int_len..]);
        }
    }
    out
}
