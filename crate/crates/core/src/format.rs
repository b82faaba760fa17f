//! Percent formatting for acceptability tables.

/// Format a probability as a percentage rounded to two significant figures.
///
/// Rounding is half-to-even on the shortest decimal representation of
/// `p · 100`, so `0.125` (12.5%) becomes `"12%"` and `0.995` becomes
/// `"100%"`. Trailing zeros are dropped: `0.01` gives `"1%"`.
///
/// ```
/// use accept::format_percent_2sf;
/// assert_eq!(format_percent_2sf(0.8929), "89%");
/// assert_eq!(format_percent_2sf(0.0377), "3.8%");
/// assert_eq!(format_percent_2sf(0.99704), "100%");
/// ```
pub fn format_percent_2sf(p: f64) -> String {
    format!("{}%", signif2(p * 100.0))
}

/// Decimal string of `x` rounded to two significant figures.
pub fn signif2(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let negative = x < 0.0;
    // Shortest round-trip digits, e.g. "8.929e1".
    let sci = format!("{:e}", x.abs());
    let (mantissa, exp) = sci.split_once('e').expect("LowerExp always has an exponent");
    let mut exp: i32 = exp.parse().expect("integer exponent");
    let digits: Vec<u8> = mantissa
        .bytes()
        .filter(u8::is_ascii_digit)
        .map(|b| b - b'0')
        .collect();

    let lead = digits[0] as u32;
    let second = digits.get(1).copied().unwrap_or(0) as u32;
    let mut kept = lead * 10 + second;
    let rest = digits.get(2..).unwrap_or(&[]);
    if let Some((&first, tail)) = rest.split_first() {
        let round_up = match first.cmp(&5) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => tail.iter().any(|&d| d != 0) || kept % 2 == 1,
        };
        if round_up {
            kept += 1;
        }
    }
    if kept == 100 {
        kept = 10;
        exp += 1;
    }

    // value = kept × 10^(exp − 1)
    let shift = exp - 1;
    let body = if shift >= 0 {
        format!("{}{}", kept, "0".repeat(shift as usize))
    } else {
        let s = kept.to_string();
        let frac_len = (-shift) as usize;
        let padded = if s.len() <= frac_len {
            format!("{}{}", "0".repeat(frac_len - s.len() + 1), s)
        } else {
            s
        };
        let (int_part, frac_part) = padded.split_at(padded.len() - frac_len);
        let frac_part = frac_part.trim_end_matches('0');
        if frac_part.is_empty() {
            int_part.to_string()
        } else {
            format!("{int_part}.{frac_part}")
        }
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}
