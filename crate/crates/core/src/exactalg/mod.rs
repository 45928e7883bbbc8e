//! Exact linear algebra over the rationals.
//!
//! All numbers are arbitrary-precision `BigRational`s (reduced, positive
//! denominator).  Matrix elimination is deterministic: pivots are always the
//! first nonzero entry in column order, so echelon forms, ranks and nullspace
//! bases are reproducible bit for bit across runs.

mod matrix;
mod poly;
mod slopes;

pub use matrix::RationalMatrix;
pub use poly::{sturm_count_distinct_real_roots, sturm_count_roots_in, IntPolynomial};
pub use slopes::{newton_slopes, Slope};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational number: arbitrary-precision numerator and denominator,
/// stored reduced with a positive denominator.
pub type Rational = BigRational;

/// Rational from an integer.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Rational n/d (d nonzero).
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Render as "num/den", omitting "/den" when the denominator is 1.
pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parse "num" or "num/den".
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
        Some((n, d)) => {
            let n = n.trim().parse::<BigInt>().ok()?;
            let d = d.trim().parse::<BigInt>().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
    }
}

/// p-adic valuation of a nonzero integer.
pub fn int_valuation(n: &BigInt, p: u64) -> u64 {
    assert!(!n.is_zero(), "valuation of zero is infinite");
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = num_integer::Integer::div_rem(&n, &p);
        if r.is_zero() {
            n = q;
            v += 1;
        } else {
            return v;
        }
    }
}
