//! Eigenvalue multiplicities of Hecke operators on cusp form spaces.
//!
//! The full-space multiplicity of an eigenvalue lambda for the prime-index
//! operator T_p is the nullity of T_p - lambda on the cuspidal-plus basis.
//! New-space counts follow by inclusion-exclusion over the levels between
//! the conductor of the character and N: the divisor-counting degeneracy of
//! old forms inverts to the multiplicative weight beta with beta(q) = -2,
//! beta(q^2) = 1, and beta(q^e) = 0 for e >= 3.

use num_traits::Zero;

use crate::arith::{divisors, factor, is_prime};
use crate::characters::DirichletCharacter;
use crate::exactalg::{newton_slopes, Rational, Slope};
use crate::modsym::cache::Engine;
use crate::modsym::dim_cusp;
use crate::{Error, Result};

/// Dirichlet inverse of the divisor-counting function, multiplicative.
pub(crate) fn beta(n: u64) -> i64 {
    factor(n)
        .into_iter()
        .map(|(_, e)| match e {
            1 => -2,
            2 => 1,
            _ => 0,
        })
        .product()
}

/// Sum of f over the levels m with cond(chi) | m | n, weighted by
/// beta(n / m); the result must be a nonnegative count.
pub(crate) fn invert_to_new(
    n: u64,
    chi: &DirichletCharacter,
    mut full: impl FnMut(u64, &DirichletCharacter) -> Result<u64>,
) -> Result<u64> {
    let cond = chi.conductor();
    let mut acc: i64 = 0;
    for m in divisors(n) {
        if m % cond != 0 {
            continue;
        }
        let b = beta(n / m);
        if b == 0 {
            continue;
        }
        let chi_m = chi.with_modulus(m)?;
        acc += b * full(m, &chi_m)? as i64;
    }
    if acc < 0 {
        return Err(Error::Internal(format!(
            "new-space count at level {n} inverted to {acc}"
        )));
    }
    Ok(acc as u64)
}

pub(crate) fn check_operator_index(p: u64, n: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if n % p == 0 {
        return Err(Error::PDividesLevel { p, level: n });
    }
    Ok(())
}

/// Multiplicity of `lambda` as an eigenvalue of T_p on the weight-k
/// level-n space; p must be a prime not dividing n.
pub fn multiplicity_full(
    engine: &Engine,
    n: u64,
    k: i64,
    chi: &DirichletCharacter,
    p: u64,
    lambda: &Rational,
) -> Result<u64> {
    check_operator_index(p, n)?;
    let t = engine.hecke(n, k, chi, p)?;
    let shifted = t.matrix.sub_scalar_diag(lambda)?;
    Ok((shifted.cols() - shifted.rank()) as u64)
}

/// Multiplicity of `lambda` within the new subspace at level n.
pub fn multiplicity_new(
    engine: &Engine,
    n: u64,
    k: i64,
    chi: &DirichletCharacter,
    p: u64,
    lambda: &Rational,
) -> Result<u64> {
    check_operator_index(p, n)?;
    invert_to_new(n, chi, |m, chi_m| {
        multiplicity_full(engine, m, k, chi_m, p, lambda)
    })
}

/// Dimension of the new subspace at level n.
pub fn dim_new(n: u64, k: i64, chi: &DirichletCharacter) -> Result<u64> {
    invert_to_new(n, chi, |m, chi_m| dim_cusp(m, k, chi_m))
}

/// p-adic Newton slopes of the characteristic polynomial of T_p, sorted
/// ascending with infinite slopes last; the number of infinite slopes is
/// the multiplicity of the eigenvalue 0.
pub fn slope_profile(
    engine: &Engine,
    n: u64,
    k: i64,
    chi: &DirichletCharacter,
    p: u64,
) -> Result<Vec<Slope>> {
    check_operator_index(p, n)?;
    let t = engine.hecke(n, k, chi, p)?;
    let charpoly = t.matrix.charpoly()?;
    newton_slopes(&charpoly, p)
}

/// Everything the multiplicity query reports about one (p, lambda, k, N).
#[derive(Clone, Debug)]
pub struct MultiplicitySummary {
    pub level: u64,
    pub weight: i64,
    pub character: String,
    pub p: u64,
    pub lambda: Rational,
    pub dim_full: u64,
    pub dim_new: u64,
    pub mult_full: u64,
    pub mult_new: u64,
    pub slopes: Vec<Slope>,
    pub basis_fingerprint: String,
}

/// Run the full multiplicity query against one space.
pub fn multiplicity_summary(
    engine: &Engine,
    n: u64,
    k: i64,
    chi: &DirichletCharacter,
    p: u64,
    lambda: &Rational,
) -> Result<MultiplicitySummary> {
    check_operator_index(p, n)?;
    let t = engine.hecke(n, k, chi, p)?;
    let mult_full = multiplicity_full(engine, n, k, chi, p, lambda)?;
    let mult_new = multiplicity_new(engine, n, k, chi, p, lambda)?;
    let slopes = slope_profile(engine, n, k, chi, p)?;
    if lambda.is_zero() {
        let infinite = slopes.iter().filter(|s| **s == Slope::Infinite).count() as u64;
        if infinite != mult_full {
            return Err(Error::Internal(format!(
                "slope profile shows {infinite} infinite slopes but nullity is {mult_full}"
            )));
        }
    }
    Ok(MultiplicitySummary {
        level: n,
        weight: k,
        character: chi.spec_string(),
        p,
        lambda: lambda.clone(),
        dim_full: dim_cusp(n, k, chi)?,
        dim_new: dim_new(n, k, chi)?,
        mult_full,
        mult_new,
        slopes,
        basis_fingerprint: t.provenance.basis_fingerprint.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{rat, ratio};

    fn engine() -> Engine {
        Engine::new(None)
    }

    #[test]
    fn beta_is_the_inverse_of_divisor_counting() {
        assert_eq!(beta(1), 1);
        assert_eq!(beta(3), -2);
        assert_eq!(beta(9), 1);
        assert_eq!(beta(27), 0);
        assert_eq!(beta(6), 4);
        assert_eq!(beta(12), -2);
        // convolving beta against divisor counting gives the unit
        for n in 1..=60u64 {
            let conv: i64 = divisors(n)
                .into_iter()
                .map(|d| beta(d) * divisors(n / d).len() as i64)
                .sum();
            assert_eq!(conv, if n == 1 { 1 } else { 0 }, "n = {n}");
        }
    }

    #[test]
    fn operator_index_guards() {
        let chi = DirichletCharacter::trivial(9);
        let e = engine();
        assert!(matches!(
            multiplicity_full(&e, 9, 4, &chi, 3, &rat(0)),
            Err(Error::PDividesLevel { p: 3, level: 9 })
        ));
        assert!(matches!(
            multiplicity_full(&e, 9, 4, &chi, 4, &rat(0)),
            Err(Error::NotPrime(4))
        ));
    }

    #[test]
    fn zero_eigenvalue_on_the_level_nine_weight_four_form() {
        let chi = DirichletCharacter::trivial(9);
        let e = engine();
        assert_eq!(multiplicity_full(&e, 9, 4, &chi, 2, &rat(0)).unwrap(), 1);
        assert_eq!(multiplicity_new(&e, 9, 4, &chi, 2, &rat(0)).unwrap(), 1);
        assert_eq!(dim_new(9, 4, &chi).unwrap(), 1);
    }

    #[test]
    fn eigenvalues_of_the_discriminant_form() {
        let chi = DirichletCharacter::trivial(1);
        let e = engine();
        assert_eq!(multiplicity_full(&e, 1, 12, &chi, 5, &rat(0)).unwrap(), 0);
        assert_eq!(multiplicity_full(&e, 1, 12, &chi, 2, &rat(-24)).unwrap(), 1);
        assert_eq!(multiplicity_full(&e, 1, 12, &chi, 2, &ratio(1, 2)).unwrap(), 0);
    }

    #[test]
    fn new_multiplicity_at_level_twenty_seven() {
        let chi = DirichletCharacter::trivial(27);
        let e = engine();
        assert_eq!(multiplicity_full(&e, 27, 2, &chi, 5, &rat(0)).unwrap(), 1);
        assert_eq!(multiplicity_new(&e, 27, 2, &chi, 5, &rat(0)).unwrap(), 1);
        assert_eq!(dim_new(27, 2, &chi).unwrap(), 1);
    }

    #[test]
    fn slope_fixtures() {
        let e = engine();
        let triv1 = DirichletCharacter::trivial(1);
        assert_eq!(
            slope_profile(&e, 1, 12, &triv1, 2).unwrap(),
            vec![Slope::Finite(rat(3))]
        );
        assert_eq!(
            slope_profile(&e, 1, 12, &triv1, 5).unwrap(),
            vec![Slope::Finite(rat(1))]
        );
        let triv9 = DirichletCharacter::trivial(9);
        assert_eq!(
            slope_profile(&e, 9, 4, &triv9, 2).unwrap(),
            vec![Slope::Infinite]
        );
    }

    #[test]
    fn full_counts_decompose_over_divisors() {
        // sum over levels of new counts times divisor multiplicity must
        // reproduce the full count
        let e = engine();
        for (n, k, p) in [(27u64, 2i64, 5u64), (9, 4, 2), (12, 2, 5), (22, 2, 3)] {
            let chi = DirichletCharacter::trivial(n);
            let full = multiplicity_full(&e, n, k, &chi, p, &rat(0)).unwrap();
            let mut acc = 0u64;
            for m in divisors(n) {
                let chi_m = DirichletCharacter::trivial(m);
                let copies = divisors(n / m).len() as u64;
                acc += copies * multiplicity_new(&e, m, k, &chi_m, p, &rat(0)).unwrap();
            }
            assert_eq!(acc, full, "({n}, {k}, {p})");
        }
    }

    #[test]
    fn summary_is_internally_consistent() {
        let chi = DirichletCharacter::trivial(9);
        let e = engine();
        let s = multiplicity_summary(&e, 9, 4, &chi, 2, &rat(0)).unwrap();
        assert_eq!(s.dim_full, 1);
        assert_eq!(s.dim_new, 1);
        assert_eq!(s.mult_full, 1);
        assert_eq!(s.mult_new, 1);
        assert_eq!(s.slopes, vec![Slope::Infinite]);
        assert_eq!(s.character, "trivial;mod:9");
        assert!(!s.basis_fingerprint.is_empty());
    }
}
