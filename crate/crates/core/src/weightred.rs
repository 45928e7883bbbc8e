//! Weight reduction for forms annihilated by a prime-index Hecke operator.
//!
//! An eigenform of even weight k with p-th coefficient zero is congruent
//! mod p, after twisting by a power of the cyclotomic character, to a form
//! of weight at most (p + 3) / 2.  The twist exponent and the reduced
//! weight are read off the base-p digits of k - 1 modulo p^2 - 1: exactly
//! one pair 0 <= a < b <= p - 1 satisfies k - 1 = b + pa or a + bp there,
//! and the admissible (twist, weight) pairs depend only on whether the two
//! digits are adjacent.  The consequence for multiplicities is that the
//! nullity of T_p in weight k is bounded by its nullity in the reduced
//! weight; `verify_bound` checks that inequality on the new subspaces.

use num_traits::Zero;
use serde::Serialize;

use crate::arith::is_prime;
use crate::characters::DirichletCharacter;
use crate::exactalg::Rational;
use crate::modsym::cache::Engine;
use crate::mult::multiplicity_new;
use crate::{Error, Result};

/// Which digit arrangement of k - 1 mod p^2 - 1 matched.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CongruenceForm {
    #[serde(rename = "b+pa")]
    BPlusPa,
    #[serde(rename = "a+bp")]
    APlusBp,
}

impl CongruenceForm {
    pub fn as_str(self) -> &'static str {
        match self {
            CongruenceForm::BPlusPa => "b+pa",
            CongruenceForm::APlusBp => "a+bp",
        }
    }
}

impl std::fmt::Display for CongruenceForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Digit decomposition of k - 1 mod p^2 - 1 and the reductions it admits.
///
/// `options` lists every admissible (twist, reduced weight) pair; `chosen`
/// is the one with the smallest reduced weight, ties broken by the smaller
/// twist.  The chosen weight always satisfies 2 <= k' <= (p + 3) / 2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightReduction {
    pub p: u64,
    pub k: i64,
    pub a: u64,
    pub b: u64,
    pub form: CongruenceForm,
    pub options: Vec<(u64, i64)>,
    pub chosen: (u64, i64),
}

impl WeightReduction {
    /// The reduced weight k' of the chosen pair.
    pub fn k_prime(&self) -> i64 {
        self.chosen.1
    }
}

/// Find the unique digits 0 <= a < b <= p - 1 with k - 1 = b + pa or
/// a + bp mod p^2 - 1 and list the admissible reductions: for adjacent
/// digits b - a = 1 the single pair (a, 2), otherwise (a, 1 + b - a) and
/// (b - 1, p + 2 + a - b).
///
/// p = 3 is accepted even though the multiplicity bound needs p >= 5.
pub fn reduce_weight(p: u64, k: i64) -> Result<WeightReduction> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p == 2 {
        return Err(Error::NotOddPrime(p));
    }
    if k < 2 {
        return Err(Error::UnsupportedWeight(k));
    }
    if k % 2 != 0 {
        return Err(Error::OddWeight(k));
    }
    let p_i = p as i64;
    let modulus = p_i * p_i - 1;
    let target = (k - 1).rem_euclid(modulus);

    let mut matches = Vec::new();
    for a in 0..p_i {
        for b in (a + 1)..p_i {
            if (b + p_i * a) % modulus == target {
                matches.push((a, b, CongruenceForm::BPlusPa));
            }
            if (a + b * p_i) % modulus == target {
                matches.push((a, b, CongruenceForm::APlusBp));
            }
        }
    }
    let (a, b, form) = match matches[..] {
        [] => return Err(Error::NoDecomposition(k - 1)),
        [only] => only,
        _ => {
            return Err(Error::Internal(format!(
                "digit decomposition of {target} mod {modulus} is not unique: {matches:?}"
            )))
        }
    };

    let options = if b - a == 1 {
        vec![(a as u64, 2)]
    } else {
        vec![
            (a as u64, 1 + b - a),
            ((b - 1) as u64, p_i + 2 + a - b),
        ]
    };
    let chosen = options
        .iter()
        .copied()
        .min_by_key(|&(i, kp)| (kp, i))
        .expect("options is never empty");
    debug_assert!(2 <= chosen.1 && chosen.1 <= (p_i + 3) / 2);

    Ok(WeightReduction {
        p,
        k,
        a: a as u64,
        b: b as u64,
        form,
        options,
        chosen,
    })
}

/// One checked instance of the nullity bound m(0, k) <= m(0, k') on new
/// subspaces.
#[derive(Clone, Debug, Serialize)]
pub struct BoundCheck {
    pub reduction: WeightReduction,
    pub k_prime: i64,
    pub m_k_new: u64,
    pub m_kprime_new: u64,
    pub holds: bool,
}

/// Compute the nullity of T_p on the new subspace at weight k and at the
/// reduced weight k', and report whether the bound m(0, k) <= m(0, k')
/// holds.  A `false` verdict would be a counterexample; callers should
/// treat it as a reportable event, not as an expected outcome.
pub fn verify_bound(
    engine: &Engine,
    p: u64,
    n: u64,
    k: i64,
    chi: &DirichletCharacter,
) -> Result<BoundCheck> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p < 5 {
        return Err(Error::PrimeTooSmall(p));
    }
    let reduction = reduce_weight(p, k)?;
    let k_prime = reduction.k_prime();
    let zero = Rational::zero();
    let m_k_new = multiplicity_new(engine, n, k, chi, p, &zero)?;
    let m_kprime_new = multiplicity_new(engine, n, k_prime, chi, p, &zero)?;
    Ok(BoundCheck {
        reduction,
        k_prime,
        m_k_new,
        m_kprime_new,
        holds: m_k_new <= m_kprime_new,
    })
}
