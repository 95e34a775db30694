//! Exact rational arithmetic used throughout the logic path.
//!
//! All term constants, polynomial coefficients, and witness assignments are
//! arbitrary-precision rationals. Floating point appears only in the witness
//! fitter and in sampled certification checks.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = num_rational::BigRational;

/// Build a rational from an integer.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Build a rational from a numerator/denominator pair. Panics on zero
/// denominator.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parse a numeral in either integer form (`42`) or decimal form (`0.5`,
/// `12.25`) into an exact rational. Decimal digits scale by a power of ten,
/// so no rounding occurs.
pub fn parse_numeral(text: &str) -> Option<Rational> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    match text.split_once('.') {
        None => text.parse::<BigInt>().ok().map(Rational::from_integer),
        Some((int_part, frac_part)) => {
            if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            let int_part: BigInt = if int_part.is_empty() {
                BigInt::zero()
            } else {
                int_part.parse().ok()?
            };
            let frac: BigInt = frac_part.parse().ok()?;
            let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
            Some(Rational::from_integer(int_part) + Rational::new(frac, scale))
        }
    }
}

/// Canonical text form: plain integer when the denominator is one, `p/q`
/// otherwise. The parser folds constant division, so this round-trips.
pub fn display(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Lossy conversion for the numeric (witness-fitting) side.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Fall back to a quotient of truncated parts for extreme magnitudes.
        let n = r.numer().to_f64().unwrap_or(if r.numer().is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        });
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}
