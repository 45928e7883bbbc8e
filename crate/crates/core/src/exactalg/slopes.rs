//! Newton polygons: p-adic valuations of the roots of an integer polynomial.
//!
//! For f = sum c_i x^i the Newton polygon at p is the lower convex hull of
//! the points (i, v_p(c_i)); a hull segment of horizontal length m and slope
//! -s contributes m roots of valuation s.  Roots that are literally zero
//! (the x^m factor) are reported as infinite slopes, which is how a nilpotent
//! Hecke eigenvalue shows up in a slope profile.

use super::{int_valuation, Rational};
use crate::{Error, Result};
use num_traits::Zero;
use std::cmp::Ordering;
use std::fmt;

/// Valuation of a root: finite rational, or infinite for a zero root.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Slope {
    Finite(Rational),
    Infinite,
}

impl PartialOrd for Slope {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Slope {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Slope::Finite(a), Slope::Finite(b)) => a.cmp(b),
            (Slope::Finite(_), Slope::Infinite) => Ordering::Less,
            (Slope::Infinite, Slope::Finite(_)) => Ordering::Greater,
            (Slope::Infinite, Slope::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slope::Finite(x) => write!(f, "{}", super::format_rational(x)),
            Slope::Infinite => write!(f, "inf"),
        }
    }
}

/// p-adic valuations of all roots of f (with multiplicity), ascending,
/// infinite slopes last.
pub fn newton_slopes(f: &super::IntPolynomial, p: u64) -> Result<Vec<Slope>> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !crate::arith::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let deg = f.degree().unwrap();
    let m = f.x_multiplicity();

    // hull vertices over the nonzero coefficients, x increasing
    let pts: Vec<(i64, i64)> = (m..=deg)
        .filter(|&i| !f.coeff(i).is_zero())
        .map(|i| (i as i64, int_valuation(&f.coeff(i), p) as i64))
        .collect();
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for pt in pts {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // keep b only if it lies strictly below the chord a..pt
            if ((b.1 - a.1) as i128) * ((pt.0 - a.0) as i128)
                < ((pt.1 - a.1) as i128) * ((b.0 - a.0) as i128)
            {
                break;
            }
            hull.pop();
        }
        hull.push(pt);
    }

    let mut out: Vec<Slope> = Vec::with_capacity(deg);
    for w in hull.windows(2) {
        let (x0, y0) = w[0];
        let (x1, y1) = w[1];
        let slope = Rational::new((y0 - y1).into(), (x1 - x0).into());
        for _ in x0..x1 {
            out.push(Slope::Finite(slope.clone()));
        }
    }
    out.extend(std::iter::repeat_with(|| Slope::Infinite).take(m));
    out.sort();
    Ok(out)
}
