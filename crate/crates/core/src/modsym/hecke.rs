//! Hecke and star operators on the quotient basis.
//!
//! The operator of index n acts on a generator [P, x] by summing
//! [P h, x h] over the family of determinant-n integer matrices
//! h = [a, b; c, d] with a > c >= 0 and d > b >= 0.  Images whose projective
//! point fails gcd(point, N) = 1 drop out.  Assembly accumulates the shared-
//! denominator integer rows of the presentation, so all arithmetic stays in
//! big integers until a single division at the end.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::characters::DirichletCharacter;
use crate::exactalg::{Rational, RationalMatrix};
use crate::{Error, Result};

use super::p1::P1;
use super::relations::{subst_table, Presentation};

/// Determinant -1 reflection inducing the star involution.
pub(crate) const REFLECTION: [i64; 4] = [-1, 0, 0, 1];

/// All integer matrices [a, b; c, d] of determinant n with a > b >= 0 and
/// d > c >= 0, in lexicographic order of (a, b, c).
pub(crate) fn heilbronn_matrices(n: u64) -> Vec<[i64; 4]> {
    let n = n as i64;
    assert!(n >= 1);
    let mut out = Vec::new();
    for a in 1..=n {
        for b in 0..a {
            // d > c forces c (a - b) < n
            for c in 0..=(n - 1) / (a - b) {
                if (n + b * c) % a == 0 {
                    let d = (n + b * c) / a;
                    debug_assert!(d > c);
                    out.push([a, b, c, d]);
                }
            }
        }
    }
    out
}

/// Matrix of sum_h [P h, x h] on the quotient basis; columns are images of
/// the basis generators.
pub(crate) fn assemble_operator(
    p1: &P1,
    m: usize,
    chi: &DirichletCharacter,
    pres: &Presentation,
    mats: &[[i64; 4]],
) -> Result<RationalMatrix> {
    let len = p1.len();
    let dim = pres.dim();
    let tables: Vec<Vec<Vec<BigInt>>> = mats.iter().map(|h| subst_table(h, m)).collect();

    let mut columns: Vec<Vec<BigInt>> = Vec::with_capacity(dim);
    for &g in pres.basis_gens() {
        let (i, x) = (g / len, g % len);
        // Total coefficient landing on each image generator, gathered before
        // touching coordinate rows so each row is expanded at most once.
        let mut totals = vec![BigInt::zero(); (m + 1) * len];
        for (h, table) in mats.iter().zip(&tables) {
            let Some((y, lambda)) = p1.apply(x, h) else {
                continue;
            };
            let twist = chi.eval_u(lambda);
            if twist == 0 {
                return Err(Error::Internal(
                    "character vanished on a unit scalar".into(),
                ));
            }
            for (j, coeff) in table[i].iter().enumerate() {
                if !coeff.is_zero() {
                    totals[j * len + y] += coeff * twist as i64;
                }
            }
        }
        let mut acc = vec![BigInt::zero(); dim];
        for (gen, total) in totals.iter().enumerate() {
            if total.is_zero() {
                continue;
            }
            let Some((sign, row)) = pres.gen_int_row(gen) else {
                continue;
            };
            let signed = total * sign as i64;
            for (slot, value) in acc.iter_mut().zip(row) {
                *slot += &signed * value;
            }
        }
        columns.push(acc);
    }

    let denom = pres.denom().clone();
    Ok(RationalMatrix::from_fn(dim, dim, |r, f| {
        Rational::new(columns[f][r].clone(), denom.clone())
    }))
}

/// Operator restricted to the row span of `basis` (rows in reduced echelon
/// form).  Fails if the subspace is not invariant.
pub(crate) fn restrict_operator(
    op: &RationalMatrix,
    basis: &RationalMatrix,
    pivots: &[usize],
) -> Result<RationalMatrix> {
    let r = basis.rows();
    debug_assert_eq!(pivots.len(), r);
    let images = op.mul(&basis.transpose());
    let restricted = RationalMatrix::from_fn(r, r, |i, j| images[(pivots[i], j)].clone());
    let reconstructed = basis.transpose().mul(&restricted);
    if reconstructed != images {
        return Err(Error::Internal(
            "operator does not preserve the requested subspace".into(),
        ));
    }
    Ok(restricted)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_two_family_is_the_classical_quadruple() {
        assert_eq!(heilbronn_matrices(1), vec![[1, 0, 0, 1]]);
        assert_eq!(
            heilbronn_matrices(2),
            vec![[1, 0, 0, 2], [1, 0, 1, 2], [2, 0, 0, 1], [2, 1, 0, 1]]
        );
    }

    #[test]
    fn family_members_satisfy_the_inequalities() {
        for n in 1..=12u64 {
            let mats = heilbronn_matrices(n);
            for h in &mats {
                let [a, b, c, d] = *h;
                assert_eq!(a * d - b * c, n as i64, "{h:?}");
                assert!(a > b && b >= 0, "{h:?}");
                assert!(d > c && c >= 0, "{h:?}");
            }
            // completeness against a brute-force sweep of the defining box
            let n_i = n as i64;
            let mut brute = Vec::new();
            for a in 1..=n_i {
                for b in 0..a {
                    for d in 1..=n_i {
                        for c in 0..d {
                            if a * d - b * c == n_i {
                                brute.push([a, b, c, d]);
                            }
                        }
                    }
                }
            }
            let mut sorted = mats.clone();
            sorted.sort();
            brute.sort();
            assert_eq!(sorted, brute, "n = {n}");
        }
    }

    #[test]
    fn family_members_are_distinct() {
        for n in [2u64, 4, 6, 7, 12] {
            let mats = heilbronn_matrices(n);
            let mut sorted = mats.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted.len(), mats.len());
        }
    }

    #[test]
    fn restriction_recovers_a_block() {
        use crate::exactalg::rat;
        // operator with invariant span{e0, e1} in a 3-dim space
        let op = RationalMatrix::from_i64_rows(&[&[1, 2, 0], &[3, 4, 0], &[0, 0, 5]]);
        let basis = RationalMatrix::from_i64_rows(&[&[1, 0, 0], &[0, 1, 0]]);
        let restricted = restrict_operator(&op, &basis, &[0, 1]).unwrap();
        assert_eq!(restricted[(0, 0)], rat(1));
        assert_eq!(restricted[(0, 1)], rat(2));
        assert_eq!(restricted[(1, 0)], rat(3));
        assert_eq!(restricted[(1, 1)], rat(4));

        let bad = RationalMatrix::from_i64_rows(&[&[1, 0, 0], &[0, 0, 1]]);
        let op2 = RationalMatrix::from_i64_rows(&[&[1, 0, 0], &[1, 1, 0], &[0, 0, 2]]);
        assert!(restrict_operator(&op2, &bad, &[0, 2]).is_err());
    }
}
