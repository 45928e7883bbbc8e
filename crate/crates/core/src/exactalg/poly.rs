//! Integer polynomials, characteristic polynomials, and real-root counting.
//!
//! Characteristic polynomials are computed by the division-free Berkowitz
//! algorithm on a denominator-cleared integer copy of the matrix, then
//! rescaled; a Hecke operator preserves an integral lattice, so its
//! characteristic polynomial is monic integral and the rescaling divisions
//! are exact.  Real roots are counted exactly with Sturm chains, which is
//! how the eigenvalue bound |lambda| <= 2 q^((k-1)/2) is certified without
//! floating point.

use super::{Rational, RationalMatrix};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Polynomial with integer coefficients, stored ascending with no trailing
/// zeros (the zero polynomial has an empty coefficient vector).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn zero() -> Self {
        IntPolynomial { coeffs: vec![] }
    }

    pub fn one() -> Self {
        IntPolynomial {
            coeffs: vec![BigInt::one()],
        }
    }

    /// From ascending coefficients; trailing zeros are stripped.
    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64_coeffs(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// c * x^n.
    pub fn monomial(c: BigInt, n: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigInt::zero(); n + 1];
        coeffs[n] = c;
        IntPolynomial { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient of x^i (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| c.is_one())
    }

    pub fn evaluate(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + Rational::from_integer(c.clone());
        }
        acc
    }

    pub fn derivative(&self) -> IntPolynomial {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        IntPolynomial::from_coeffs(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * BigInt::from(i + 1))
                .collect(),
        )
    }

    /// Evaluate at a square matrix (used to check Cayley-Hamilton).
    pub fn evaluate_matrix(&self, m: &RationalMatrix) -> Result<RationalMatrix> {
        if !m.is_square() {
            return Err(Error::NonSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        let n = m.rows();
        let mut acc = RationalMatrix::zero(n, n);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(m);
            for i in 0..n {
                let t = &acc[(i, i)] + &Rational::from_integer(c.clone());
                acc[(i, i)] = t;
            }
        }
        Ok(acc)
    }

    /// Largest m with x^m dividing self (zero polynomial is rejected upstream).
    pub fn x_multiplicity(&self) -> usize {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .unwrap_or(0)
    }

    /// Content-free part with positive leading coefficient.
    fn primitive(&self) -> IntPolynomial {
        if self.is_zero() {
            return Self::zero();
        }
        let mut p = self.primitive_signed();
        if p.leading().unwrap().is_negative() {
            p = IntPolynomial {
                coeffs: p.coeffs.iter().map(|c| -c).collect(),
            };
        }
        p
    }

    /// Content-free part keeping the original signs (a Sturm chain must not
    /// have its members' signs normalized away).
    fn primitive_signed(&self) -> IntPolynomial {
        if self.is_zero() {
            return Self::zero();
        }
        let mut content = BigInt::zero();
        for c in &self.coeffs {
            content = content.gcd(c);
        }
        IntPolynomial {
            coeffs: self.coeffs.iter().map(|c| c / &content).collect(),
        }
    }

    /// Primitive gcd with positive leading coefficient.
    fn gcd(&self, other: &IntPolynomial) -> IntPolynomial {
        let mut a = self.primitive();
        let mut b = other.primitive();
        while !b.is_zero() {
            let r = pseudo_rem(&a, &b).primitive();
            a = b;
            b = r;
        }
        a
    }

    /// Squarefree part self / gcd(self, self'), primitive.
    pub fn squarefree_part(&self) -> IntPolynomial {
        if self.degree().unwrap_or(0) == 0 {
            return self.primitive();
        }
        let g = self.gcd(&self.derivative());
        div_exact(&self.primitive(), &g)
    }
}

/// Pseudo-remainder lc(b)^t * (a mod b) for some t >= 0, returned with t's
/// parity so callers that care about signs can undo the scaling.
fn pseudo_rem_steps(a: &IntPolynomial, b: &IntPolynomial) -> (IntPolynomial, usize) {
    let db = b.degree().expect("division by zero polynomial");
    let mut r = a.coeffs.clone();
    let lb = b.leading().unwrap().clone();
    let mut steps = 0;
    while r.len() > db {
        let lead = r.last().unwrap().clone();
        let shift = r.len() - 1 - db;
        for c in r.iter_mut() {
            *c *= &lb;
        }
        steps += 1;
        for j in 0..=db {
            let t = &r[shift + j] - &lead * &b.coeffs[j];
            r[shift + j] = t;
        }
        while r.last().is_some_and(|c| c.is_zero()) {
            r.pop();
        }
        if r.is_empty() {
            break;
        }
    }
    (IntPolynomial::from_coeffs(r), steps)
}

fn pseudo_rem(a: &IntPolynomial, b: &IntPolynomial) -> IntPolynomial {
    pseudo_rem_steps(a, b).0
}

/// Exact quotient a / b for primitive b dividing a (Gauss lemma keeps it integral).
fn div_exact(a: &IntPolynomial, b: &IntPolynomial) -> IntPolynomial {
    let db = b.degree().expect("division by zero polynomial");
    let da = a.degree().unwrap_or(0);
    let mut rem: Vec<Rational> = a
        .coeffs
        .iter()
        .map(|c| Rational::from_integer(c.clone()))
        .collect();
    let mut q = vec![Rational::zero(); da - db + 1];
    let lb = Rational::from_integer(b.leading().unwrap().clone());
    for shift in (0..=da - db).rev() {
        let lead = rem[shift + db].clone() / &lb;
        q[shift] = lead.clone();
        if lead.is_zero() {
            continue;
        }
        for j in 0..=db {
            let t = &rem[shift + j] - &(&lead * &Rational::from_integer(b.coeffs[j].clone()));
            rem[shift + j] = t;
        }
    }
    assert!(rem.iter().all(|c| c.is_zero()), "polynomial division not exact");
    IntPolynomial::from_coeffs(
        q.into_iter()
            .map(|c| {
                assert!(c.denom().is_one(), "quotient not integral");
                c.numer().clone()
            })
            .collect(),
    )
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            match i {
                0 => write!(f, "{mag}")?,
                _ => {
                    if mag.is_one() {
                        write!(f, "x")?;
                    } else {
                        write!(f, "{mag}*x")?;
                    }
                    if i > 1 {
                        write!(f, "^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl RationalMatrix {
    /// Characteristic polynomial det(xI - self) as a monic integer polynomial.
    ///
    /// The matrix must be similar to an integral one (true of any operator
    /// preserving a lattice); otherwise the rescaling divisions fail and an
    /// error is returned.
    pub fn charpoly(&self) -> Result<IntPolynomial> {
        if !self.is_square() {
            return Err(Error::NonSquare {
                rows: self.rows(),
                cols: self.cols(),
            });
        }
        let n = self.rows();
        let mut scale = BigInt::one();
        for i in 0..n {
            for j in 0..n {
                scale = scale.lcm(self[(i, j)].denom());
            }
        }
        let a: Vec<Vec<BigInt>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let x = &self[(i, j)];
                        x.numer() * (&scale / x.denom())
                    })
                    .collect()
            })
            .collect();
        let desc = berkowitz(&a);
        // char(self)(x) = scale^-n * char(scale*self)(scale*x): the
        // coefficient of x^(n-i) is desc[i] / scale^i.
        let mut coeffs = vec![BigInt::zero(); n + 1];
        let mut pow = BigInt::one();
        for (i, c) in desc.iter().enumerate() {
            let (q, r) = c.div_rem(&pow);
            if !r.is_zero() {
                return Err(Error::NonIntegralCharpoly);
            }
            coeffs[n - i] = q;
            if i < n {
                pow *= &scale;
            }
        }
        Ok(IntPolynomial::from_coeffs(coeffs))
    }
}

/// Berkowitz: coefficients of det(xI - a), descending, leading entry 1.
fn berkowitz(a: &[Vec<BigInt>]) -> Vec<BigInt> {
    let n = a.len();
    let mut v = vec![BigInt::one()];
    for k in 0..n {
        // Toeplitz column for the (k+1)-st leading principal submatrix:
        // [1, -a_kk, -(R C), -(R M C), ..., -(R M^(k-1) C)] with M the k x k
        // principal block, R the row a[k][..k], C the column a[..k][k].
        let mut t = Vec::with_capacity(k + 2);
        t.push(BigInt::one());
        t.push(-a[k][k].clone());
        if k > 0 {
            let mut w: Vec<BigInt> = (0..k).map(|i| a[i][k].clone()).collect();
            for j in 2..=k + 1 {
                let dot: BigInt = (0..k).map(|i| &a[k][i] * &w[i]).sum();
                t.push(-dot);
                if j <= k {
                    let nw: Vec<BigInt> = (0..k)
                        .map(|i| (0..k).map(|l| &a[i][l] * &w[l]).sum())
                        .collect();
                    w = nw;
                }
            }
        }
        let mut nv = vec![BigInt::zero(); k + 2];
        for (i, slot) in nv.iter_mut().enumerate() {
            for (j, vj) in v.iter().enumerate().take(i + 1) {
                if i - j < t.len() {
                    *slot += &t[i - j] * vj;
                }
            }
        }
        v = nv;
    }
    v
}

/// Sign of a polynomial chain evaluated at a rational point, as +1/0/-1.
fn sign_at(p: &IntPolynomial, x: &Rational) -> i32 {
    let v = p.evaluate(x);
    if v.is_zero() {
        0
    } else if v.is_negative() {
        -1
    } else {
        1
    }
}

fn sign_at_infinity(p: &IntPolynomial, positive: bool) -> i32 {
    let Some(lead) = p.leading() else { return 0 };
    let base = if lead.is_negative() { -1 } else { 1 };
    if positive || p.degree().unwrap() % 2 == 0 {
        base
    } else {
        -base
    }
}

fn variations(signs: impl Iterator<Item = i32>) -> usize {
    let mut count = 0;
    let mut last = 0;
    for s in signs {
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

/// Sturm chain of the squarefree part: p0, p0', then negated remainders,
/// each stripped to a primitive integer polynomial by a positive scalar so
/// the sign pattern is preserved.
fn sturm_chain(f: &IntPolynomial) -> Vec<IntPolynomial> {
    let p0 = f.squarefree_part();
    let mut chain = vec![p0.clone()];
    if p0.degree().unwrap_or(0) == 0 {
        return chain;
    }
    chain.push(p0.derivative());
    loop {
        let n = chain.len();
        let (a, b) = (&chain[n - 2], &chain[n - 1]);
        if b.is_zero() {
            chain.pop();
            break;
        }
        if b.degree() == Some(0) {
            break;
        }
        let (mut r, steps) = pseudo_rem_steps(a, b);
        if steps % 2 == 1 && b.leading().unwrap().is_negative() {
            // scaled by an odd power of a negative leading coefficient
            r = IntPolynomial::from_coeffs(r.coeffs.iter().map(|c| -c).collect());
        }
        let neg = IntPolynomial::from_coeffs(r.coeffs.iter().map(|c| -c).collect());
        if neg.is_zero() {
            break;
        }
        chain.push(neg.primitive_signed());
    }
    chain
}

/// Number of distinct real roots of f in the half-open interval (lo, hi].
pub fn sturm_count_roots_in(f: &IntPolynomial, lo: &Rational, hi: &Rational) -> usize {
    assert!(!f.is_zero(), "root counting needs a nonzero polynomial");
    assert!(lo < hi);
    let chain = sturm_chain(f);
    let va = variations(chain.iter().map(|p| sign_at(p, lo)));
    let vb = variations(chain.iter().map(|p| sign_at(p, hi)));
    va - vb
}

/// Number of distinct real roots of f.
pub fn sturm_count_distinct_real_roots(f: &IntPolynomial) -> usize {
    assert!(!f.is_zero(), "root counting needs a nonzero polynomial");
    let chain = sturm_chain(f);
    let va = variations(chain.iter().map(|p| sign_at_infinity(p, false)));
    let vb = variations(chain.iter().map(|p| sign_at_infinity(p, true)));
    va - vb
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{rat, ratio};

    #[test]
    fn charpoly_of_2x2() {
        let m = RationalMatrix::from_i64_rows(&[&[1, 2], &[3, 4]]);
        let p = m.charpoly().unwrap();
        assert_eq!(p, IntPolynomial::from_i64_coeffs(&[-2, -5, 1]));
        assert_eq!(p.to_string(), "x^2 - 5*x - 2");
    }

    #[test]
    fn charpoly_of_identity() {
        let p = RationalMatrix::identity(2).charpoly().unwrap();
        assert_eq!(p, IntPolynomial::from_i64_coeffs(&[1, -2, 1]));
    }

    #[test]
    fn charpoly_of_swap() {
        let m = RationalMatrix::from_i64_rows(&[&[0, 1], &[1, 0]]);
        assert_eq!(
            m.charpoly().unwrap(),
            IntPolynomial::from_i64_coeffs(&[-1, 0, 1])
        );
    }

    #[test]
    fn charpoly_of_1x1() {
        let m = RationalMatrix::from_i64_rows(&[&[-24]]);
        assert_eq!(m.charpoly().unwrap(), IntPolynomial::from_i64_coeffs(&[24, 1]));
    }

    #[test]
    fn charpoly_of_empty_matrix_is_one() {
        let m = RationalMatrix::zero(0, 0);
        assert_eq!(m.charpoly().unwrap(), IntPolynomial::one());
    }

    #[test]
    fn charpoly_rejects_nonlattice_matrix() {
        let m = RationalMatrix::from_fn(1, 1, |_, _| ratio(1, 2));
        assert!(matches!(m.charpoly(), Err(Error::NonIntegralCharpoly)));
    }

    #[test]
    fn charpoly_of_scaled_lattice_matrix() {
        // [[0, 1/2], [2, 0]] preserves the lattice Z x 2Z: charpoly x^2 - 1
        let m = RationalMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => ratio(1, 2),
            (1, 0) => rat(2),
            _ => rat(0),
        });
        assert_eq!(
            m.charpoly().unwrap(),
            IntPolynomial::from_i64_coeffs(&[-1, 0, 1])
        );
    }

    #[test]
    fn cayley_hamilton_small() {
        let m = RationalMatrix::from_i64_rows(&[&[2, -1, 0], &[1, 3, 5], &[0, 0, -2]]);
        let p = m.charpoly().unwrap();
        assert!(p.evaluate_matrix(&m).unwrap().is_zero_matrix());
    }

    #[test]
    fn squarefree_part_strips_multiplicity() {
        // (x-1)^2 (x+2) -> (x-1)(x+2)
        let f = IntPolynomial::from_i64_coeffs(&[2, -3, 0, 1]);
        assert_eq!(f.squarefree_part(), IntPolynomial::from_i64_coeffs(&[-2, 1, 1]));
    }

    #[test]
    fn sturm_counts_roots_of_cubic() {
        // (x-1)(x-2)(x+3) = x^3 - 7x + 6
        let f = IntPolynomial::from_i64_coeffs(&[6, -7, 0, 1]);
        assert_eq!(sturm_count_distinct_real_roots(&f), 3);
        assert_eq!(sturm_count_roots_in(&f, &rat(0), &rat(2)), 2);
        assert_eq!(sturm_count_roots_in(&f, &rat(-4), &rat(0)), 1);
        assert_eq!(sturm_count_roots_in(&f, &rat(1), &rat(2)), 1);
    }

    #[test]
    fn sturm_handles_no_real_roots() {
        let f = IntPolynomial::from_i64_coeffs(&[1, 0, 1]);
        assert_eq!(sturm_count_distinct_real_roots(&f), 0);
    }

    #[test]
    fn sturm_counts_repeated_roots_once() {
        // x^2 (x - 5)
        let f = IntPolynomial::from_i64_coeffs(&[0, 0, -5, 1]);
        assert_eq!(sturm_count_distinct_real_roots(&f), 2);
    }

    #[test]
    fn display_of_constants_and_zero() {
        assert_eq!(IntPolynomial::zero().to_string(), "0");
        assert_eq!(IntPolynomial::from_i64_coeffs(&[-7]).to_string(), "-7");
        assert_eq!(IntPolynomial::from_i64_coeffs(&[24, 1]).to_string(), "x + 24");
    }
}
