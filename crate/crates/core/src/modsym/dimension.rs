//! Closed-form dimension of the cusp form space.
//!
//! The trace-formula expression is valid for weight k >= 2 and a character
//! whose parity matches the weight.  Weight 1 has no closed form of this
//! kind and is rejected; weights below 1 give the zero space.

use num_traits::{Signed, Zero};

use crate::arith::{factor, psi_index};
use crate::characters::DirichletCharacter;
use crate::exactalg::{rat, ratio, Rational};
use crate::{Error, Result};

/// Local factor at p^r for a character of p-conductor p^s.
fn local_factor(r: u32, s: u32, p: u64) -> u64 {
    if 2 * s > r {
        2 * p.pow(r - s)
    } else if r % 2 == 0 {
        p.pow(r / 2) + p.pow(r / 2 - 1)
    } else {
        2 * p.pow((r - 1) / 2)
    }
}

fn quartic_weight(k: i64) -> Rational {
    match k.rem_euclid(4) {
        0 => ratio(1, 4),
        2 => ratio(-1, 4),
        _ => Rational::zero(),
    }
}

fn cubic_weight(k: i64) -> Rational {
    match k.rem_euclid(3) {
        0 => ratio(1, 3),
        2 => ratio(-1, 3),
        _ => Rational::zero(),
    }
}

/// Character sum over solutions of x^2 + bx + c = 0 mod n.
fn solution_sum(n: u64, b: u64, c: u64, chi: &DirichletCharacter) -> i64 {
    (0..n)
        .filter(|&x| (x * x + b * x + c) % n == 0)
        .map(|x| chi.eval_u(x) as i64)
        .sum()
}

/// Exact dimension of the space of cusp forms of weight k, level n, and
/// nebentypus chi (given modulo a divisor of n).
pub(crate) fn dim_cusp_exact(n: u64, k: i64, chi: &DirichletCharacter) -> Result<u64> {
    assert!(n >= 1);
    if n % chi.modulus() != 0 {
        return Err(Error::ConductorNotDividing {
            cond: chi.modulus(),
            modulus: n,
        });
    }
    let weight_parity = if k.rem_euclid(2) == 0 { 1 } else { -1 };
    if chi.parity() != weight_parity {
        return Err(Error::ParityMismatch {
            k,
            chi_parity: chi.parity() as i64,
        });
    }
    if k <= 0 {
        return Ok(0);
    }
    if k == 1 {
        return Err(Error::UnsupportedWeight(k));
    }

    let f = chi.conductor();
    let mut total = ratio(k - 1, 12) * rat(psi_index(n) as i64);
    let mut local = 1u64;
    for (p, r) in factor(n) {
        let s = factor(f)
            .into_iter()
            .find(|&(q, _)| q == p)
            .map_or(0, |(_, e)| e);
        local *= local_factor(r, s, p);
    }
    total -= ratio(local as i64, 2);
    total += quartic_weight(k) * rat(solution_sum(n, 0, 1, chi));
    total += cubic_weight(k) * rat(solution_sum(n, 1, 1, chi));
    if k == 2 && f == 1 {
        total += rat(1);
    }

    if !total.is_integer() || total.is_negative() {
        return Err(Error::Internal(format!(
            "dimension expression evaluated to {total} at level {n}, weight {k}"
        )));
    }
    Ok(total.to_integer().try_into().expect("dimension fits u64"))
}

/// Genus-based route for the trivial character, used as an independent
/// cross-check of the closed form.
#[cfg(test)]
pub(crate) fn dim_cusp_trivial_by_genus(n: u64, k: i64) -> u64 {
    use crate::arith::{divisors, euler_phi, gcd_u64};
    assert!(k >= 2 && k % 2 == 0);
    let mu = psi_index(n) as i64;
    let e2: i64 = if n % 4 == 0 {
        0
    } else {
        factor(n)
            .iter()
            .map(|&(p, _)| match p % 4 {
                1 => 2,
                3 => 0,
                _ => 1,
            })
            .product()
    };
    let e3: i64 = if n % 9 == 0 {
        0
    } else {
        factor(n)
            .iter()
            .map(|&(p, _)| match p % 3 {
                1 => 2,
                2 => 0,
                _ => 1,
            })
            .product()
    };
    let cusps: i64 = divisors(n)
        .iter()
        .map(|&d| euler_phi(gcd_u64(d, n / d)) as i64)
        .sum();
    let genus_times_12 = 12 + mu - 3 * e2 - 4 * e3 - 6 * cusps;
    assert_eq!(genus_times_12 % 12, 0);
    let g = genus_times_12 / 12;
    let dim = if k == 2 {
        g
    } else {
        (k - 1) * (g - 1) + (k / 2 - 1) * cusps + (k / 4) * e2 + (k / 3) * e3
    };
    assert!(dim >= 0);
    dim as u64
}
