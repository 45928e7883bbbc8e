//! Boundary map onto cusp classes.
//!
//! A generator (i, x) with lift [a, b; c, d] has boundary
//! [i = m] * cls(a, c) - [i = 0] * cls(b, d), where cls ranges over coprime
//! integer pairs subject to cls(-p, -q) = (-1)^m cls(p, q) and, for every
//! gamma in the level group, cls(gamma (p, q)) = chi(d_gamma) cls(p, q).
//! Classes whose stabilizer forces a sign of -1 vanish identically and are
//! dropped.  The kernel of the assembled matrix on the quotient basis is the
//! cuspidal subspace.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::characters::DirichletCharacter;
use crate::exactalg::{Rational, RationalMatrix};
use crate::{Error, Result};

use super::p1::P1;
use super::relations::Presentation;

/// (r, s) with p s - r q = 1 for coprime (p, q).
fn complete_to_sl2(p: i64, q: i64) -> (i64, i64) {
    let (g, x, y) = ext_gcd(p, q);
    debug_assert_eq!(g, 1, "boundary pair ({p}, {q}) is not coprime");
    (-y, x)
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a.abs(), a.signum(), 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

struct CuspClasses<'a> {
    n: i64,
    m: usize,
    chi: &'a DirichletCharacter,
    reps: Vec<(i64, i64)>,
    killed: Vec<bool>,
    cache: BTreeMap<(i64, i64), (usize, i8)>,
}

impl<'a> CuspClasses<'a> {
    fn new(n: u64, m: usize, chi: &'a DirichletCharacter) -> Self {
        CuspClasses {
            n: n as i64,
            m,
            chi,
            reps: Vec::new(),
            killed: Vec::new(),
            cache: BTreeMap::new(),
        }
    }

    /// All twist multipliers over group elements carrying `from` to `to`
    /// up to sign, or an empty list when the cusps are inequivalent.
    fn multipliers(&self, from: (i64, i64), to: (i64, i64)) -> Vec<i8> {
        let (p1, q1) = from;
        let (p2, q2) = to;
        let (r1, s1) = complete_to_sl2(p1, q1);
        let (_, s2) = complete_to_sl2(p2, q2);
        let mut out = Vec::new();
        for j in 0..self.n.max(1) {
            let lower_left = q2 * s1 - q1 * s2 - q1 * q2 * j;
            if lower_left.rem_euclid(self.n) != 0 {
                continue;
            }
            let d = p1 * q2 * j + p1 * s2 - q2 * r1;
            let value = self.chi.eval(d) as i8;
            debug_assert!(value != 0, "group element with non-unit diagonal");
            if !out.contains(&value) {
                out.push(value);
            }
        }
        out
    }

    /// Class index and coefficient of a pair, folding in the sign relation;
    /// coefficient 0 marks a vanishing class.
    fn resolve(&mut self, p: i64, q: i64) -> (usize, i8) {
        let flip = q < 0 || (q == 0 && p < 0);
        let (p, q) = if flip { (-p, -q) } else { (p, q) };
        let sign_factor: i8 = if flip && self.m % 2 == 1 { -1 } else { 1 };
        if let Some(&(idx, mu)) = self.cache.get(&(p, q)) {
            return (idx, sign_factor * mu);
        }
        let mut found = None;
        for (idx, &rep) in self.reps.iter().enumerate() {
            let mults = self.multipliers((p, q), rep);
            if mults.is_empty() {
                continue;
            }
            let mu = if self.killed[idx] {
                0
            } else {
                assert_eq!(mults.len(), 1, "inconsistent multiplier on a live class");
                mults[0]
            };
            found = Some((idx, mu));
            break;
        }
        let (idx, mu) = match found {
            Some(hit) => hit,
            None => {
                let idx = self.reps.len();
                self.reps.push((p, q));
                let self_mults = self.multipliers((p, q), (p, q));
                let dead = self_mults.contains(&-1);
                self.killed.push(dead);
                (idx, if dead { 0 } else { 1 })
            }
        };
        self.cache.insert((p, q), (idx, mu));
        (idx, sign_factor * mu)
    }
}

/// Boundary of one generator as (class, coefficient) pairs.
fn boundary_of_generator(
    classes: &mut CuspClasses<'_>,
    p1: &P1,
    m: usize,
    g: usize,
) -> Vec<(usize, i8)> {
    let len = p1.len();
    let (i, x) = (g / len, g % len);
    let [a, b, c, d] = p1.lift(x);
    let mut terms = Vec::new();
    if i == m {
        let (idx, mu) = classes.resolve(a, c);
        if mu != 0 {
            terms.push((idx, mu));
        }
    }
    if i == 0 {
        let (idx, mu) = classes.resolve(b, d);
        if mu != 0 {
            terms.push((idx, -mu));
        }
    }
    terms
}

/// Matrix whose kernel on quotient coordinates is the cuspidal subspace:
/// one row per surviving cusp class, one column per quotient basis element.
/// Fails if the boundary does not descend to the quotient.
pub(crate) fn boundary_matrix(
    p1: &P1,
    m: usize,
    chi: &DirichletCharacter,
    pres: &Presentation,
) -> Result<RationalMatrix> {
    let mut classes = CuspClasses::new(p1.modulus(), m, chi);
    let n_gens = pres.n_gens();
    let free: Vec<Vec<(usize, i8)>> = (0..n_gens)
        .map(|g| boundary_of_generator(&mut classes, p1, m, g))
        .collect();

    let n_classes = classes.reps.len();
    let dim = pres.dim();
    let to_dense = |terms: &[(usize, i8)]| {
        let mut v = vec![BigInt::zero(); n_classes];
        for &(idx, mu) in terms {
            v[idx] += BigInt::from(mu);
        }
        v
    };

    let basis_images: Vec<Vec<BigInt>> = pres
        .basis_gens()
        .iter()
        .map(|&g| to_dense(&free[g]))
        .collect();

    // The stored coordinate rows carry the shared denominator, so the
    // descent check compares denominator-scaled integer vectors.
    let denom = pres.denom();
    for g in 0..n_gens {
        let mut predicted = vec![BigInt::zero(); n_classes];
        if let Some((sign, row)) = pres.gen_int_row(g) {
            for (f, coeff) in row.iter().enumerate() {
                if coeff.is_zero() {
                    continue;
                }
                for (slot, value) in predicted.iter_mut().zip(&basis_images[f]) {
                    if !value.is_zero() {
                        *slot += coeff * value;
                    }
                }
            }
            if sign < 0 {
                for v in predicted.iter_mut() {
                    *v = -std::mem::take(v);
                }
            }
        }
        let direct = to_dense(&free[g]);
        if direct.iter().zip(&predicted).any(|(d, p)| &(d * denom) != p) {
            return Err(Error::Internal(format!(
                "boundary map does not descend to the quotient at generator {g}"
            )));
        }
    }

    let alive: Vec<usize> = (0..n_classes).filter(|&idx| !classes.killed[idx]).collect();
    Ok(RationalMatrix::from_fn(alive.len(), dim, |r, f| {
        Rational::from(basis_images[f][alive[r]].clone())
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modsym::relations::build_presentation;

    fn boundary(n: u64, k: i64, chi: &DirichletCharacter) -> (Presentation, RationalMatrix) {
        let p1 = P1::new(n);
        let m = (k - 2) as usize;
        let pres = build_presentation(&p1, m, chi);
        let matrix = boundary_matrix(&p1, m, chi, &pres).unwrap();
        (pres, matrix)
    }

    #[test]
    fn level_one_weight_twelve_has_one_cusp_and_corank_two() {
        let chi = DirichletCharacter::trivial(1);
        let (pres, b) = boundary(1, 12, &chi);
        assert_eq!(b.rows(), 1);
        assert_eq!(b.cols(), 3);
        assert_eq!(pres.dim() - b.rank(), 2);
    }

    #[test]
    fn level_eleven_weight_two_has_two_cusps() {
        let chi = DirichletCharacter::trivial(11);
        let (pres, b) = boundary(11, 2, &chi);
        assert_eq!(b.rows(), 2);
        // the boundary image has codimension one in the cusp space
        assert_eq!(b.rank(), 1);
        assert_eq!(pres.dim() - 1, 2);
    }

    #[test]
    fn descent_check_passes_across_characters() {
        for (n, k, d) in [(9u64, 4i64, None), (27, 2, None), (7, 3, Some(-7)), (5, 2, Some(5))] {
            let chi = match d {
                None => DirichletCharacter::trivial(n),
                Some(d) => DirichletCharacter::quadratic(
                    crate::characters::FundamentalDiscriminant::new(d).unwrap(),
                    n,
                )
                .unwrap(),
            };
            boundary(n, k, &chi);
        }
    }

    #[test]
    fn ext_gcd_completions_have_determinant_one() {
        for (p, q) in [(1i64, 0i64), (0, 1), (3, 5), (-4, 9), (7, -2), (-3, -8)] {
            let (r, s) = complete_to_sl2(p, q);
            assert_eq!(p * s - r * q, 1, "({p}, {q})");
        }
    }
}
