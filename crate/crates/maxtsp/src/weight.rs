//! Exact rational edge weights.
//!
//! All weights in the solver are `Rational64`. Instance files carry decimal
//! numbers; gadget construction introduces halves. Keeping everything rational
//! makes the correctness chain (alternating weights, gadget tables, phase
//! budgets) exact, with no tolerance juggling.

use num_rational::Rational64;
use num_traits::{Signed, Zero};

pub type Weight = Rational64;

/// Parses a nonnegative or negative decimal literal ("12", "2.3", "-0.05")
/// into an exact rational.
pub fn parse_decimal(s: &str) -> Option<Weight> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    let (sign, digits) = match s.strip_prefix('-') {
        Some(rest) => (-1i64, rest),
        None => (1i64, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((a, b)) => (a, b),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    if frac_part.len() > 9 {
        return None; // keeps i64 denominators comfortably in range
    }
    let mut num: i64 = 0;
    for c in int_part.chars().chain(frac_part.chars()) {
        num = num.checked_mul(10)?.checked_add((c as u8 - b'0') as i64)?;
    }
    let den = 10i64.checked_pow(frac_part.len() as u32)?;
    Some(Weight::new(sign * num, den))
}

/// Renders a rational as an exact decimal string when the denominator is of
/// the form 2^a * 5^b, and as "p/q" otherwise. Used for certificate output.
pub fn format_exact(w: &Weight) -> String {
    let mut den = *w.denom();
    debug_assert!(den > 0);
    let mut twos = 0u32;
    let mut fives = 0u32;
    while den % 2 == 0 {
        den /= 2;
        twos += 1;
    }
    while den % 5 == 0 {
        den /= 5;
        fives += 1;
    }
    if den != 1 {
        return format!("{}/{}", w.numer(), w.denom());
    }
    // scale to denominator 10^k with k = max(twos, fives)
    let k = twos.max(fives);
    let scale = 2i128.pow(k - twos.min(k)) * 5i128.pow(k - fives.min(k));
    let scaled = (*w.numer() as i128) * scale;
    let neg = scaled < 0;
    let digits = scaled.unsigned_abs().to_string();
    let k = k as usize;
    let body = if k == 0 {
        digits
    } else if digits.len() <= k {
        format!("0.{}{}", "0".repeat(k - digits.len()), digits)
    } else {
        let (a, b) = digits.split_at(digits.len() - k);
        format!("{a}.{b}")
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

pub fn is_nonnegative(w: &Weight) -> bool {
    !w.is_negative()
}

pub fn zero() -> Weight {
    Weight::zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_integers_and_decimals() {
        assert_eq!(parse_decimal("12").unwrap(), Weight::new(12, 1));
        assert_eq!(parse_decimal("2.3").unwrap(), Weight::new(23, 10));
        assert_eq!(parse_decimal("0.05").unwrap(), Weight::new(1, 20));
        assert_eq!(parse_decimal("-1.5").unwrap(), Weight::new(-3, 2));
        assert!(parse_decimal("").is_none());
        assert!(parse_decimal("1.2.3").is_none());
        assert!(parse_decimal("abc").is_none());
    }

    #[test]
    fn formats_decimal_denominators_exactly() {
        assert_eq!(format_exact(&Weight::new(23, 10)), "2.3");
        assert_eq!(format_exact(&Weight::new(-7, 2)), "-3.5");
        assert_eq!(format_exact(&Weight::new(5, 1)), "5");
        assert_eq!(format_exact(&Weight::new(1, 20)), "0.05");
        assert_eq!(format_exact(&Weight::new(1, 3)), "1/3");
    }

    #[test]
    fn parse_format_round_trip() {
        for s in ["0", "7", "2.3", "100.25", "0.125"] {
            let w = parse_decimal(s).unwrap();
            assert_eq!(parse_decimal(&format_exact(&w)).unwrap(), w);
        }
    }
}
