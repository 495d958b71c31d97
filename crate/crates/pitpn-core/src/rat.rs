//! Exact rational arithmetic helpers. All numeric values in the engine
//! are arbitrary-precision rationals; there is no floating point.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rat = BigRational;
pub type Int = BigInt;

/// Rational from an integer.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(Int::from(n))
}

/// Rational from a numerator/denominator pair.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

pub fn is_nonneg(r: &Rat) -> bool {
    !r.is_negative()
}

/// Renders `r` as `n` or `n/d`.
pub fn display(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `n`, `n/d`, or a decimal like `1.5` into an exact rational.
pub fn parse(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: Int = n.trim().parse().ok()?;
        let d: Int = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rat::new(n, d));
    }
    if let Some((w, f)) = s.split_once('.') {
        let neg = w.trim_start().starts_with('-');
        let w: Int = w.parse().ok()?;
        if f.is_empty() || !f.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let num: Int = f.parse().ok()?;
        let den = Int::from(10u32).pow(f.len() as u32);
        let frac = Rat::new(num, den);
        let whole = Rat::from_integer(w);
        return Some(if neg { whole - frac } else { whole + frac });
    }
    let n: Int = s.parse().ok()?;
    Some(Rat::from_integer(n))
}

/// Largest multiple of `step` that is <= `x`, as a count. `step` must be positive.
pub fn steps_below(x: &Rat, step: &Rat) -> Int {
    debug_assert!(step.is_positive());
    (x / step).floor().numer().clone()
}

pub fn one() -> Rat {
    Rat::one()
}

pub fn zero() -> Rat {
    Rat::zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse("5"), Some(rat(5)));
        assert_eq!(parse("-5"), Some(rat(-5)));
        assert_eq!(parse("7/2"), Some(ratio(7, 2)));
        assert_eq!(parse("2.5"), Some(ratio(5, 2)));
        assert_eq!(parse("-2.5"), Some(ratio(-5, 2)));
        assert_eq!(parse("1/0"), None);
        assert_eq!(parse("x"), None);
    }

    #[test]
    fn display_forms() {
        assert_eq!(display(&rat(3)), "3");
        assert_eq!(display(&ratio(7, 2)), "7/2");
        assert_eq!(display(&ratio(-7, 2)), "-7/2");
    }

    #[test]
    fn steps() {
        assert_eq!(steps_below(&ratio(7, 2), &rat(1)), Int::from(3));
        assert_eq!(steps_below(&rat(4), &rat(1)), Int::from(4));
        assert_eq!(steps_below(&ratio(9, 4), &ratio(1, 2)), Int::from(4));
    }
}
