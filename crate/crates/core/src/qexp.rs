//! Truncated q-expansions: the independent oracle against which the
//! modular-symbol machinery is checked.
//!
//! Everything here is elementary series arithmetic over exact rationals:
//! Eisenstein series and the discriminant form give an echelonized basis of
//! the level-1 cusp forms, eta quotients supply fixtures at levels 9 and 27,
//! and the Hecke operator acts on coefficients literally by
//! b_n = a_{np} + p^(k-1) chi(p) a_{n/p}.  No modular symbols are involved,
//! so agreement between the two routes is meaningful evidence.

use crate::characters::DirichletCharacter;
use crate::exactalg::{format_rational, parse_rational, Rational};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

// ---- internal dense power series (coefficient of q^i at index i) ----

#[derive(Clone, Debug)]
struct Series {
    c: Vec<Rational>,
}

impl Series {
    fn zero(prec: usize) -> Self {
        Series {
            c: vec![Rational::zero(); prec],
        }
    }

    fn one(prec: usize) -> Self {
        let mut s = Self::zero(prec);
        if prec > 0 {
            s.c[0] = Rational::one();
        }
        s
    }

    fn prec(&self) -> usize {
        self.c.len()
    }

    fn mul(&self, other: &Series) -> Series {
        let prec = self.prec().min(other.prec());
        let mut out = Series::zero(prec);
        for i in 0..prec {
            if self.c[i].is_zero() {
                continue;
            }
            for j in 0..prec - i {
                if other.c[j].is_zero() {
                    continue;
                }
                let t = &out.c[i + j] + &(&self.c[i] * &other.c[j]);
                out.c[i + j] = t;
            }
        }
        out
    }

    fn pow(&self, e: u32) -> Series {
        let mut acc = Series::one(self.prec());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Multiplicative inverse; the constant term must be nonzero.
    fn invert(&self) -> Series {
        assert!(!self.c[0].is_zero(), "series with zero constant term");
        let prec = self.prec();
        let lead_inv = Rational::one() / &self.c[0];
        let mut out = Series::zero(prec);
        out.c[0] = lead_inv.clone();
        for i in 1..prec {
            let mut acc = Rational::zero();
            for j in 1..=i {
                if !self.c[j].is_zero() {
                    acc += &self.c[j] * &out.c[i - j];
                }
            }
            out.c[i] = -acc * &lead_inv;
        }
        out
    }

    fn sub_scaled(&mut self, factor: &Rational, other: &Series) {
        for i in 0..self.prec().min(other.prec()) {
            let t = &self.c[i] - &(factor * &other.c[i]);
            self.c[i] = t;
        }
    }
}

/// Euler function prod_{n>=1} (1 - q^(d n)), expanded by the pentagonal
/// number theorem: sum_j (-1)^j q^(d j(3j-1)/2) over all integers j.
fn euler_function(d: u64, prec: usize) -> Series {
    let mut s = Series::zero(prec);
    if prec > 0 {
        s.c[0] = Rational::one();
    }
    let mut j: i64 = 1;
    loop {
        let mut placed = false;
        for e in [j * (3 * j - 1) / 2, j * (3 * j + 1) / 2] {
            let idx = (e as u64).checked_mul(d).map(|v| v as usize);
            if let Some(idx) = idx {
                if idx < prec {
                    s.c[idx] = if j % 2 == 1 {
                        -Rational::one()
                    } else {
                        Rational::one()
                    };
                    placed = true;
                }
            }
        }
        if !placed {
            return s;
        }
        j += 1;
    }
}

fn sigma(n: u64, r: u32) -> BigInt {
    crate::arith::divisors(n)
        .into_iter()
        .map(|d| BigInt::from(d).pow(r))
        .sum()
}

/// E4 = 1 + 240 sum sigma_3(n) q^n.
fn eisenstein4(prec: usize) -> Series {
    let mut s = Series::one(prec);
    for n in 1..prec {
        s.c[n] = Rational::from_integer(BigInt::from(240) * sigma(n as u64, 3));
    }
    s
}

/// E6 = 1 - 504 sum sigma_5(n) q^n.
fn eisenstein6(prec: usize) -> Series {
    let mut s = Series::one(prec);
    for n in 1..prec {
        s.c[n] = Rational::from_integer(BigInt::from(-504) * sigma(n as u64, 5));
    }
    s
}

/// Delta = q prod (1 - q^n)^24.
fn delta(prec: usize) -> Series {
    let e24 = euler_function(1, prec).pow(24);
    let mut s = Series::zero(prec);
    for i in 1..prec {
        s.c[i] = e24.c[i - 1].clone();
    }
    s
}

// ---- public truncated cusp-form expansions ----

/// Cusp-form q-expansion truncated to coefficients a_1..a_B (a_0 omitted).
///
/// The weight, level, and character fields are advisory tags describing
/// where the series came from; operations trust only the coefficients.
#[derive(Clone, PartialEq, Debug)]
pub struct QSeries {
    coeffs: Vec<Rational>,
    weight: i64,
    level: u64,
    character: String,
}

impl QSeries {
    pub fn new(coeffs: Vec<Rational>, weight: i64, level: u64, character: &str) -> Self {
        QSeries {
            coeffs,
            weight,
            level,
            character: character.to_string(),
        }
    }

    pub fn zero(precision: usize, weight: i64, level: u64, character: &str) -> Self {
        Self::new(vec![Rational::zero(); precision], weight, level, character)
    }

    /// Number of known coefficients B.
    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    /// a_n for 1 <= n <= B.
    pub fn coeff(&self, n: usize) -> &Rational {
        assert!(
            n >= 1 && n <= self.coeffs.len(),
            "coefficient a_{n} outside stored precision {}",
            self.coeffs.len()
        );
        &self.coeffs[n - 1]
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn character(&self) -> &str {
        &self.character
    }

    pub fn is_zero_series(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Replace the advisory tags (for a series reused in another context).
    pub fn with_tags(mut self, weight: i64, level: u64, character: &str) -> Self {
        self.weight = weight;
        self.level = level;
        self.character = character.to_string();
        self
    }

    pub fn scale(&self, factor: &Rational) -> QSeries {
        QSeries {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
            ..self.clone()
        }
    }

    /// Coefficientwise agreement of a_1..a_b; both series must know that many.
    pub fn agrees_with(&self, other: &QSeries, b: usize) -> Result<bool> {
        let have = self.precision().min(other.precision());
        if have < b {
            return Err(Error::InsufficientPrecision { have, need: b });
        }
        Ok((0..b).all(|i| self.coeffs[i] == other.coeffs[i]))
    }
}

#[derive(Serialize, Deserialize)]
struct QSeriesJson {
    precision: usize,
    coefficients: Vec<String>,
    weight: i64,
    level: u64,
    character: String,
}

impl Serialize for QSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        QSeriesJson {
            precision: self.coeffs.len(),
            coefficients: self.coeffs.iter().map(format_rational).collect(),
            weight: self.weight,
            level: self.level,
            character: self.character.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for QSeries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = QSeriesJson::deserialize(deserializer)?;
        if raw.coefficients.len() != raw.precision {
            return Err(D::Error::custom(format!(
                "expected {} coefficients, found {}",
                raw.precision,
                raw.coefficients.len()
            )));
        }
        let coeffs = raw
            .coefficients
            .iter()
            .map(|s| parse_rational(s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}"))))
            .collect::<std::result::Result<_, _>>()?;
        Ok(QSeries {
            coeffs,
            weight: raw.weight,
            level: raw.level,
            character: raw.character,
        })
    }
}

/// The Hecke operator on coefficients: b_n = a_{np} + p^(k-1) chi(p) a_{n/p}
/// (second term only when p | n), to output precision `out_prec`.
pub fn hecke_qexp(
    f: &QSeries,
    p: u64,
    k: i64,
    chi: &DirichletCharacter,
    out_prec: usize,
) -> Result<QSeries> {
    if !crate::arith::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if k < 1 {
        return Err(Error::UnsupportedWeight(k));
    }
    let need = (p as usize) * out_prec;
    if f.precision() < need {
        return Err(Error::InsufficientPrecision {
            have: f.precision(),
            need,
        });
    }
    let twist = Rational::from_integer(BigInt::from(p).pow((k - 1) as u32) * chi.eval_u(p));
    let coeffs = (1..=out_prec)
        .map(|n| {
            let mut b = f.coeff(n * p as usize).clone();
            if n % p as usize == 0 {
                b += &twist * f.coeff(n / p as usize);
            }
            b
        })
        .collect();
    Ok(QSeries::new(coeffs, f.weight, f.level, &f.character))
}

/// Echelonized basis of the weight-k level-1 cusp forms to precision B:
/// row j has coefficient 1 at q^(j+1) and 0 at the other q^(i+1), i < dim.
///
/// Built from Delta^(j+1) E4^x E6^y and reduced; empty when the dimension
/// is zero (k odd, k < 12, or k = 14).
pub fn victor_miller_basis(k: i64, b: usize) -> Vec<QSeries> {
    if k < 4 || k % 2 != 0 {
        return vec![];
    }
    let d = (k / 12) as usize - usize::from(k % 12 == 2);
    if d == 0 || b == 0 {
        return vec![];
    }
    let prec = b.max(d) + 1;
    let e4 = eisenstein4(prec);
    let e6 = eisenstein6(prec);
    let dl = delta(prec);
    let mut rows: Vec<Series> = (0..d)
        .map(|j| {
            let m = k - 12 * (j as i64 + 1);
            let y = if m % 4 == 2 { 1 } else { 0 };
            let x = (m - 6 * y) / 4;
            debug_assert!(x >= 0);
            dl.pow(j as u32 + 1)
                .mul(&e4.pow(x as u32))
                .mul(&e6.pow(y as u32))
        })
        .collect();
    for j in 0..d {
        debug_assert!(rows[j].c[j + 1].is_one());
        for i in 0..d {
            if i != j {
                let factor = rows[i].c[j + 1].clone();
                if !factor.is_zero() {
                    let pivot = rows[j].clone();
                    rows[i].sub_scaled(&factor, &pivot);
                }
            }
        }
    }
    rows.into_iter()
        .map(|s| QSeries::new(s.c[1..=b].to_vec(), k, 1, "trivial"))
        .collect()
}

/// Eta quotient q^(sum d r / 24) prod_{(d,r)} prod_n (1 - q^(dn))^r as a
/// cusp-form expansion to precision B, tagged with the given level.
pub fn eta_quotient(spec: &[(u64, i64)], level: u64, b: usize) -> Result<QSeries> {
    let weight24: i64 = spec.iter().map(|&(d, r)| d as i64 * r).sum();
    if weight24 % 24 != 0 {
        return Err(Error::NonIntegralLeadingPower(weight24));
    }
    let lead = weight24 / 24;
    if lead < 1 {
        return Err(Error::NonCuspidalEta(lead));
    }
    let exp_sum: i64 = spec.iter().map(|&(_, r)| r).sum();
    if exp_sum % 2 != 0 {
        return Err(Error::UnsupportedWeight(exp_sum));
    }
    let lead = lead as usize;
    let mut coeffs = vec![Rational::zero(); b];
    if lead > b {
        return Ok(QSeries::new(coeffs, exp_sum / 2, level, "trivial"));
    }
    let prec = b - lead + 1;
    let mut prod = Series::one(prec);
    for &(d, r) in spec {
        assert!(d >= 1, "eta argument divisor must be positive");
        let base = euler_function(d, prec);
        let powed = if r >= 0 {
            base.pow(r as u32)
        } else {
            base.invert().pow((-r) as u32)
        };
        prod = prod.mul(&powed);
    }
    for (i, c) in prod.c.into_iter().enumerate() {
        coeffs[lead - 1 + i] = c;
    }
    Ok(QSeries::new(coeffs, exp_sum / 2, level, "trivial"))
}

/// Coefficient bound floor(k mu / 12), mu = [SL2(Z) : Gamma0(N)]: two cusp
/// forms of weight k and level N agreeing that far agree identically.
pub fn sturm_bound(k: u64, n: u64) -> usize {
    (k * crate::arith::psi_index(n) / 12) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;
    use num_integer::Integer;
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&c| rat(c)).collect()
    }

    /// Test-local reference: expand prod_{(d,r)} prod_{n <= prec} (1-q^(dn))^r
    /// by naive polynomial arithmetic, no pentagonal shortcut.
    fn eta_product_naive(spec: &[(u64, i64)], prec: usize) -> Vec<Rational> {
        let mut acc = vec![Rational::zero(); prec];
        acc[0] = Rational::one();
        let mul = |a: &[Rational], b: &[Rational]| {
            let mut out = vec![Rational::zero(); prec];
            for i in 0..prec {
                for j in 0..prec - i {
                    let t = &out[i + j] + &(&a[i] * &b[j]);
                    out[i + j] = t;
                }
            }
            out
        };
        for &(d, r) in spec {
            for n in 1..=prec as u64 {
                if (d * n) as usize >= prec {
                    break;
                }
                let mut factor = vec![Rational::zero(); prec];
                factor[0] = Rational::one();
                factor[(d * n) as usize] = -Rational::one();
                if r >= 0 {
                    for _ in 0..r {
                        acc = mul(&acc, &factor);
                    }
                } else {
                    // (1 - x)^-1 = 1 + x + x^2 + ... with x = q^(dn)
                    let mut inv = vec![Rational::zero(); prec];
                    let mut idx = 0;
                    while idx < prec {
                        inv[idx] = Rational::one();
                        idx += (d * n) as usize;
                    }
                    for _ in 0..-r {
                        acc = mul(&acc, &inv);
                    }
                }
            }
        }
        acc
    }

    #[test]
    fn delta_expansion_through_q6() {
        let basis = victor_miller_basis(12, 6);
        assert_eq!(basis.len(), 1);
        assert_eq!(basis[0].coeffs(), &ints(&[1, -24, 252, -1472, 4830, -6048])[..]);
    }

    #[test]
    fn weight_16_second_coefficient() {
        let basis = victor_miller_basis(16, 3);
        assert_eq!(basis.len(), 1);
        assert_eq!(basis[0].coeff(1), &rat(1));
        assert_eq!(basis[0].coeff(2), &rat(216));
    }

    #[test]
    fn dimensions_of_level_one_spaces() {
        for (k, expect) in [
            (0, 0), (2, 0), (4, 0), (6, 0), (8, 0), (10, 0), (11, 0), (12, 1),
            (14, 0), (16, 1), (18, 1), (20, 1), (22, 1), (24, 2), (26, 1), (28, 2),
        ] {
            assert_eq!(victor_miller_basis(k, 3).len(), expect, "k = {k}");
        }
    }

    #[test]
    fn echelon_shape_at_weight_24() {
        let basis = victor_miller_basis(24, 12);
        assert_eq!(basis.len(), 2);
        for (j, f) in basis.iter().enumerate() {
            for (i, _) in basis.iter().enumerate() {
                let expect = if i == j { rat(1) } else { rat(0) };
                assert_eq!(f.coeff(i + 1), &expect, "row {j} coefficient {}", i + 1);
            }
        }
    }

    #[test]
    fn eta_cube_level_nine() {
        let f = eta_quotient(&[(3, 8)], 9, 8).unwrap();
        assert_eq!(f.coeffs(), &ints(&[1, 0, 0, -8, 0, 0, 20, 0])[..]);
        assert_eq!(f.weight(), 4);
        assert_eq!(f.level(), 9);
    }

    #[test]
    fn eta_level_twentyseven() {
        let f = eta_quotient(&[(3, 2), (9, 2)], 27, 5).unwrap();
        assert_eq!(f.coeffs(), &ints(&[1, 0, 0, -2, 0])[..]);
        assert_eq!(f.weight(), 2);
    }

    #[test]
    fn eta_24_is_delta() {
        let f = eta_quotient(&[(1, 24)], 1, 20).unwrap();
        let basis = victor_miller_basis(12, 20);
        assert!(f.agrees_with(&basis[0], 20).unwrap());
    }

    #[test]
    fn eta_rejects_bad_exponent_sums() {
        assert!(matches!(
            eta_quotient(&[(3, 7)], 9, 5),
            Err(Error::NonIntegralLeadingPower(21))
        ));
        assert!(matches!(
            eta_quotient(&[(1, -24)], 1, 5),
            Err(Error::NonCuspidalEta(-1))
        ));
    }

    #[test]
    fn eta_vanishes_off_residue_one_mod_three() {
        let f = eta_quotient(&[(3, 8)], 9, 30).unwrap();
        for n in 1..=30 {
            if n % 3 != 1 {
                assert!(f.coeff(n).is_zero(), "a_{n} should vanish");
            }
        }
    }

    #[test]
    fn eta_matches_naive_product_expansion() {
        for spec in [
            vec![(1u64, 24i64)],
            vec![(3, 8)],
            vec![(3, 2), (9, 2)],
            vec![(2, 48), (1, -24)],
        ] {
            let lead: i64 = spec.iter().map(|&(d, r)| d as i64 * r).sum::<i64>() / 24;
            let b = 20usize;
            let f = eta_quotient(&spec, 1, b).unwrap();
            let reference = eta_product_naive(&spec, b);
            for n in 1..=b {
                let expect = if (n as i64) < lead {
                    Rational::zero()
                } else {
                    reference[n - lead as usize].clone()
                };
                assert_eq!(f.coeff(n), &expect, "spec {spec:?} at n = {n}");
            }
        }
    }

    #[test]
    fn hecke_at_two_scales_delta_by_its_second_coefficient() {
        let chi = DirichletCharacter::trivial(1);
        let f = victor_miller_basis(12, 40).remove(0);
        let tf = hecke_qexp(&f, 2, 12, &chi, 20).unwrap();
        assert!(tf.agrees_with(&f.scale(&rat(-24)), 20).unwrap());
    }

    #[test]
    fn hecke_at_five_scales_delta() {
        let chi = DirichletCharacter::trivial(1);
        let f = victor_miller_basis(12, 50).remove(0);
        let tf = hecke_qexp(&f, 5, 12, &chi, 10).unwrap();
        assert!(tf.agrees_with(&f.scale(&rat(4830)), 10).unwrap());
    }

    #[test]
    fn hecke_of_zero_series_is_zero() {
        let chi = DirichletCharacter::trivial(1);
        let z = QSeries::zero(30, 12, 1, "trivial");
        assert!(hecke_qexp(&z, 3, 12, &chi, 10).unwrap().is_zero_series());
    }

    #[test]
    fn hecke_precision_is_enforced() {
        let chi = DirichletCharacter::trivial(1);
        let f = victor_miller_basis(12, 30).remove(0);
        assert!(matches!(
            hecke_qexp(&f, 2, 12, &chi, 16),
            Err(Error::InsufficientPrecision { have: 30, need: 32 })
        ));
        assert!(matches!(hecke_qexp(&f, 4, 12, &chi, 5), Err(Error::NotPrime(4))));
    }

    #[test]
    fn hecke_square_recursion_on_delta() {
        // iterating the operator squares the eigenvalue, while the index-4
        // operator satisfies a_4 = a_2^2 - 2^11 a_1
        let chi = DirichletCharacter::trivial(1);
        let f = victor_miller_basis(12, 40).remove(0);
        let t2 = hecke_qexp(&f, 2, 12, &chi, 20).unwrap();
        let t2t2 = hecke_qexp(&t2, 2, 12, &chi, 10).unwrap();
        assert!(t2t2.agrees_with(&f.scale(&rat(576)), 10).unwrap());
        assert_eq!(f.coeff(4), &rat((-24i64) * (-24) - 2048));
    }

    #[test]
    fn hecke_coefficients_on_nontrivial_character() {
        // chi(p) = 0 at p dividing the modulus kills the oldform term
        let chi = DirichletCharacter::trivial(9);
        let f = eta_quotient(&[(3, 8)], 9, 30).unwrap();
        let tf = hecke_qexp(&f, 3, 4, &chi, 10).unwrap();
        for n in 1..=10 {
            assert_eq!(tf.coeff(n), f.coeff(3 * n));
        }
    }

    #[test]
    fn delta_coefficients_are_multiplicative() {
        let f = victor_miller_basis(12, 60).remove(0);
        for m in 2..=7u64 {
            for n in 2..=7u64 {
                if m.gcd(&n) == 1 && (m * n) as usize <= 60 {
                    assert_eq!(
                        f.coeff((m * n) as usize),
                        &(f.coeff(m as usize) * f.coeff(n as usize)),
                        "at ({m}, {n})"
                    );
                }
            }
        }
    }

    #[test]
    fn sturm_bound_values() {
        assert_eq!(sturm_bound(12, 1), 1);
        assert_eq!(sturm_bound(4, 9), 4);
        assert_eq!(sturm_bound(2, 27), 6);
        assert_eq!(sturm_bound(4, 81), 36);
        assert_eq!(sturm_bound(2, 1), 0);
    }

    #[test]
    fn qseries_json_round_trip() {
        let f = QSeries::new(ints(&[1, -24]), 12, 1, "trivial");
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(
            json,
            r#"{"precision":2,"coefficients":["1","-24"],"weight":12,"level":1,"character":"trivial"}"#
        );
        let back: QSeries = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f);
        assert!(serde_json::from_str::<QSeries>(
            r#"{"precision":3,"coefficients":["1"],"weight":12,"level":1,"character":"trivial"}"#
        )
        .is_err());
    }

    #[test]
    fn coefficient_access_is_bounds_checked() {
        let f = QSeries::new(ints(&[1, 2]), 2, 1, "trivial");
        assert_eq!(f.coeff(2), &rat(2));
        let result = std::panic::catch_unwind(|| f.coeff(3).clone());
        assert!(result.is_err());
    }

    proptest! {
        #[test]
        fn series_multiplication_commutes(a in prop::collection::vec(-9i64..9, 1..12),
                                          b in prop::collection::vec(-9i64..9, 1..12)) {
            let prec = a.len().min(b.len());
            let sa = Series { c: ints(&a) };
            let sb = Series { c: ints(&b) };
            prop_assert_eq!(sa.mul(&sb).c[..prec].to_vec(), sb.mul(&sa).c[..prec].to_vec());
        }

        #[test]
        fn series_inverse_is_two_sided(mut a in prop::collection::vec(-9i64..9, 2..10)) {
            if a[0] == 0 { a[0] = 1; }
            let s = Series { c: ints(&a) };
            let inv = s.invert();
            let prod = s.mul(&inv);
            prop_assert!(prod.c[0].is_one());
            prop_assert!(prod.c[1..].iter().all(|c| c.is_zero()));
        }
    }
}
