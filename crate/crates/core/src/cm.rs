//! CM forms attached to Hecke characters of imaginary quadratic fields,
//! and the count of CM contributions to the kernel of a Hecke operator.
//!
//! A Hecke character of the order O of Q(sqrt(D)), D < 0 with class
//! number one, is pinned down by a conductor generator m, an integer
//! weight w, and a finite character eps on (O/m)^* whose values are roots
//! of unity in O.  The attached q-expansion a_n = sum over ideals of norm
//! n coprime to m of xi(a), with xi((alpha)) = alpha^w eps(alpha), is a
//! newform of weight w + 1 and level |D| Nr(m), and its coefficient at
//! every prime inert in D vanishes.
//!
//! The converse direction counts CM forms inside a symbol space without
//! constructing characters: a form annihilated by T_q for every inert q
//! up to the Sturm bound of the twisted level N D^2 equals its twist by
//! the quadratic character of D, so the joint kernel of those operators
//! is exactly the CM-by-D subspace.

use std::collections::BTreeSet;
use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{divisors, gcd_u64, primes_up_to};
use crate::characters::{is_inert, kronecker, DirichletCharacter, FundamentalDiscriminant};
use crate::exactalg::{Rational, RationalMatrix};
use crate::modsym::cache::Engine;
use crate::mult::{check_operator_index, invert_to_new, multiplicity_new};
use crate::qexp::{sturm_bound, QSeries};
use crate::{Error, Result};

/// Discriminants of the imaginary quadratic fields with class number one.
const CLASS_NUMBER_ONE: [i64; 9] = [-3, -4, -7, -8, -11, -19, -43, -67, -163];

/// Element x + y*omega of the ring of integers of Q(sqrt(D)), written in
/// the basis (1, omega) with omega = (1 + sqrt(D))/2 for D = 1 mod 4 and
/// omega = sqrt(D/4) for D = 0 mod 4.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct QuadInt {
    pub x: BigInt,
    pub y: BigInt,
}

impl QuadInt {
    pub fn new(x: i64, y: i64) -> QuadInt {
        QuadInt {
            x: BigInt::from(x),
            y: BigInt::from(y),
        }
    }

    fn one() -> QuadInt {
        QuadInt::new(1, 0)
    }

    fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    /// True when the element lies in Z, i.e. has no omega part.
    pub fn is_rational(&self) -> bool {
        self.y.is_zero()
    }
}

impl std::fmt::Display for QuadInt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}+{}w", self.x, self.y)
    }
}

/// Arithmetic of the maximal order of Q(sqrt(D)): omega has trace `t` and
/// norm `nw`, so omega^2 = t*omega - nw.
#[derive(Clone, Copy, Debug)]
pub(crate) struct QuadRing {
    d: i64,
    t: i64,
    nw: i64,
}

impl QuadRing {
    pub(crate) fn new(d: FundamentalDiscriminant) -> QuadRing {
        let d = d.value();
        assert!(d < 0, "imaginary quadratic orders only");
        if d.rem_euclid(4) == 1 {
            QuadRing { d, t: 1, nw: (1 - d) / 4 }
        } else {
            QuadRing { d, t: 0, nw: -d / 4 }
        }
    }

    pub(crate) fn mul(&self, a: &QuadInt, b: &QuadInt) -> QuadInt {
        let cross = &a.y * &b.y;
        QuadInt {
            x: &a.x * &b.x - &cross * self.nw,
            y: &a.x * &b.y + &a.y * &b.x + cross * self.t,
        }
    }

    #[cfg(test)]
    pub(crate) fn conj(&self, a: &QuadInt) -> QuadInt {
        QuadInt {
            x: &a.x + self.t * &a.y,
            y: -&a.y,
        }
    }

    pub(crate) fn norm(&self, a: &QuadInt) -> BigInt {
        &a.x * &a.x + self.t * &a.x * &a.y + self.nw * &a.y * &a.y
    }

    pub(crate) fn pow(&self, a: &QuadInt, e: u32) -> QuadInt {
        let mut out = QuadInt::one();
        for _ in 0..e {
            out = self.mul(&out, a);
        }
        out
    }

    /// The roots of unity of the order: six for D = -3, four for D = -4,
    /// and +-1 otherwise.
    pub(crate) fn units(&self) -> Vec<QuadInt> {
        let coords: &[(i64, i64)] = match self.d {
            -3 => &[(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)],
            -4 => &[(1, 0), (0, 1), (-1, 0), (0, -1)],
            _ => &[(1, 0), (-1, 0)],
        };
        coords.iter().map(|&(x, y)| QuadInt::new(x, y)).collect()
    }

    /// sqrt(D) itself, as the element 2*omega - t.
    pub(crate) fn sqrt_d(&self) -> QuadInt {
        QuadInt::new(-self.t, 2)
    }
}

/// Z-basis (a, 0), (b, g) of the lattice spanned by the given elements
/// and their omega-multiples; canonical residues are (x mod a, y mod g).
#[derive(Clone, Debug)]
struct IdealLattice {
    a: BigInt,
    b: BigInt,
    g: BigInt,
}

fn ideal_lattice(ring: &QuadRing, gens: &[QuadInt]) -> IdealLattice {
    let omega = QuadInt::new(0, 1);
    let mut pivot: Option<(BigInt, BigInt)> = None;
    let mut xs: Vec<BigInt> = Vec::new();
    let mut absorb = |rx: BigInt, ry: BigInt| {
        if ry.is_zero() {
            xs.push(rx);
            return;
        }
        match pivot.take() {
            None => pivot = Some((rx, ry)),
            Some((px, py)) => {
                let e = py.extended_gcd(&ry);
                let nx = &e.x * &px + &e.y * &rx;
                xs.push((&py / &e.gcd) * &rx - (&ry / &e.gcd) * &px);
                pivot = Some((nx, e.gcd));
            }
        }
    };
    for m in gens {
        let mw = ring.mul(m, &omega);
        absorb(m.x.clone(), m.y.clone());
        absorb(mw.x, mw.y);
    }
    let (b, g) = pivot.expect("lattice of a nonzero ideal has full rank");
    let (b, g) = if g.is_negative() { (-b, -g) } else { (b, g) };
    let a = xs
        .into_iter()
        .fold(BigInt::zero(), |acc, x| acc.gcd(&x));
    assert!(!a.is_zero() && !g.is_zero(), "ideal lattice is degenerate");
    let b = b.mod_floor(&a);
    IdealLattice { a, b, g }
}

impl IdealLattice {
    fn index(&self) -> BigInt {
        &self.a * &self.g
    }

    fn reduce(&self, v: &QuadInt) -> (BigInt, BigInt) {
        let k = v.y.div_floor(&self.g);
        let y = &v.y - &k * &self.g;
        let x = (&v.x - &k * &self.b).mod_floor(&self.a);
        (x, y)
    }
}

/// True when the ideals generated by a and b sum to the whole order.
fn ideals_coprime(ring: &QuadRing, a: &QuadInt, b: &QuadInt) -> bool {
    ideal_lattice(ring, &[a.clone(), b.clone()]).index().is_one()
}

/// Character on (O/m)^* stored as one root-of-unity value per residue
/// class, built by closing a generating set.
#[derive(Clone, Debug)]
struct FiniteCharacter {
    lattice: IdealLattice,
    values: std::collections::BTreeMap<(BigInt, BigInt), QuadInt>,
}

impl FiniteCharacter {
    fn eval(&self, alpha: &QuadInt) -> Result<&QuadInt> {
        self.values.get(&self.lattice.reduce(alpha)).ok_or_else(|| {
            Error::Internal(format!("character undefined on the class of {alpha}"))
        })
    }
}

fn build_finite_character(
    ring: &QuadRing,
    modulus: &QuadInt,
    generators: &[(QuadInt, QuadInt)],
) -> Result<FiniteCharacter> {
    let lattice = ideal_lattice(ring, std::slice::from_ref(modulus));
    for (g, v) in generators {
        if !ideals_coprime(ring, g, modulus) {
            return Err(Error::AmbiguousCharacter(format!(
                "generator {g} is not coprime to the conductor"
            )));
        }
        if !ring.norm(v).is_one() {
            return Err(Error::AmbiguousCharacter(format!(
                "value {v} is not a root of unity"
            )));
        }
    }

    let mut values = std::collections::BTreeMap::new();
    values.insert(lattice.reduce(&QuadInt::one()), QuadInt::one());
    loop {
        let mut changed = false;
        for (g, zeta) in generators {
            for (key, val) in values.clone() {
                let rep = QuadInt { x: key.0, y: key.1 };
                let pkey = lattice.reduce(&ring.mul(&rep, g));
                let pval = ring.mul(&val, zeta);
                match values.get(&pkey) {
                    None => {
                        values.insert(pkey, pval);
                        changed = true;
                    }
                    Some(existing) if *existing != pval => {
                        return Err(Error::AmbiguousCharacter(format!(
                            "values contradict each other on the class of {g}"
                        )));
                    }
                    _ => {}
                }
            }
        }
        if !changed {
            break;
        }
    }

    let mut unit_classes = BTreeSet::new();
    let amax = i64::try_from(&lattice.a).expect("conductor norm fits in i64");
    let gmax = i64::try_from(&lattice.g).expect("conductor norm fits in i64");
    for x in 0..amax {
        for y in 0..gmax {
            let rep = QuadInt::new(x, y);
            if ideals_coprime(ring, &rep, modulus) {
                unit_classes.insert(lattice.reduce(&rep));
            }
        }
    }
    if values.len() != unit_classes.len() {
        return Err(Error::AmbiguousCharacter(format!(
            "generators reach {} of {} unit classes",
            values.len(),
            unit_classes.len()
        )));
    }
    Ok(FiniteCharacter { lattice, values })
}

/// Hecke character of weight w on the ideals of O coprime to the
/// conductor: xi((alpha)) = alpha^w eps(alpha), well defined because the
/// unit consistency eps(u) u^w = 1 is enforced at construction.
#[derive(Clone, Debug)]
pub struct HeckeCharacterSpec {
    d: FundamentalDiscriminant,
    ring: QuadRing,
    modulus: QuadInt,
    weight: u32,
    eps: FiniteCharacter,
    norm_m: u64,
}

impl HeckeCharacterSpec {
    /// Build and fully validate a character: D must be a negative
    /// fundamental discriminant of class number one, `eps_generators`
    /// must determine a character on all of (O/m)^*, and every unit u of
    /// O must satisfy eps(u) u^w = 1.  Conductors sharing a factor with
    /// sqrt(D) are rejected unless `allow_ramified` is set.
    pub fn new(
        d: i64,
        modulus: QuadInt,
        weight: u32,
        eps_generators: &[(QuadInt, QuadInt)],
        allow_ramified: bool,
    ) -> Result<HeckeCharacterSpec> {
        let fd = FundamentalDiscriminant::new(d)?;
        if !CLASS_NUMBER_ONE.contains(&d) {
            return Err(Error::ClassNumberNotOne(d));
        }
        if weight == 0 {
            return Err(Error::UnsupportedWeight(0));
        }
        if modulus.is_zero() {
            return Err(Error::AmbiguousCharacter(
                "conductor generator is zero".to_string(),
            ));
        }
        let ring = QuadRing::new(fd);
        if !allow_ramified && !ideals_coprime(&ring, &modulus, &ring.sqrt_d()) {
            return Err(Error::RamifiedConductor);
        }
        let eps = build_finite_character(&ring, &modulus, eps_generators)?;
        for u in ring.units() {
            let val = eps.eval(&u)?;
            let check = ring.mul(val, &ring.pow(&u, weight));
            if check != QuadInt::one() {
                return Err(Error::UnitInconsistency(format!(
                    "eps({u}) * ({u})^{weight} = {check}"
                )));
            }
        }
        let norm_m = u64::try_from(ring.norm(&modulus)).expect("conductor norm is positive");
        Ok(HeckeCharacterSpec {
            d: fd,
            ring,
            modulus,
            weight,
            eps,
            norm_m,
        })
    }

    pub fn discriminant(&self) -> FundamentalDiscriminant {
        self.d
    }

    /// The character weight w; the attached form has weight w + 1.
    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn form_weight(&self) -> i64 {
        self.weight as i64 + 1
    }

    /// Level |D| * Nr(m) of the attached form.
    pub fn level(&self) -> u64 {
        self.d.abs() * self.norm_m
    }

    fn xi(&self, alpha: &QuadInt) -> Result<QuadInt> {
        let val = self.eps.eval(alpha)?;
        Ok(self.ring.mul(&self.ring.pow(alpha, self.weight), val))
    }

    /// The nebentypus of the attached form: the Dirichlet character
    /// n -> kronecker(D, n) * eps(n), matched against the trivial and
    /// quadratic characters mod the level.
    pub fn nebentypus(&self) -> Result<DirichletCharacter> {
        let n = self.level();
        let mut expected = Vec::new();
        for j in 1..=n {
            if gcd_u64(j, n) != 1 {
                continue;
            }
            let e = self.eps.eval(&QuadInt::new(j as i64, 0))?;
            if !e.is_rational() {
                return Err(Error::AmbiguousCharacter(format!(
                    "nebentypus value at {j} is the non-rational root of unity {e}"
                )));
            }
            let e: i64 = i64::try_from(&e.x).expect("root of unity coordinate");
            expected.push((j, kronecker(self.d.value(), j as i64) as i64 * e));
        }

        let mut candidates = vec![DirichletCharacter::trivial(n)];
        for e in divisors(n) {
            for sign in [1i64, -1] {
                if let Ok(fd) = FundamentalDiscriminant::new(sign * e as i64) {
                    if let Ok(chi) = DirichletCharacter::quadratic(fd, n) {
                        candidates.push(chi);
                    }
                }
            }
        }
        candidates
            .into_iter()
            .find(|chi| {
                expected
                    .iter()
                    .all(|&(j, v)| chi.eval_u(j) as i64 == v)
            })
            .ok_or_else(|| {
                Error::AmbiguousCharacter(
                    "nebentypus matches no trivial or quadratic character".to_string(),
                )
            })
    }
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// All nonzero alpha in O with norm at most b, with their norms.
fn elements_of_norm_up_to(ring: &QuadRing, b: u64) -> Vec<(QuadInt, u64)> {
    let ymax = (isqrt(4 * b / ring.d.unsigned_abs()) + 1) as i64;
    let xmax = isqrt(b) as i64 + ymax + 1;
    let mut out = Vec::new();
    for y in -ymax..=ymax {
        for x in -xmax..=xmax {
            let nrm = x * x + ring.t * x * y + ring.nw * y * y;
            if nrm >= 1 && nrm as u64 <= b {
                out.push((QuadInt::new(x, y), nrm as u64));
            }
        }
    }
    out
}

/// q-expansion of the CM form attached to xi, to precision b: the n-th
/// coefficient sums xi over the ideals of norm n coprime to the
/// conductor.  Every coefficient must come out rational.
pub fn cm_qexp(xi: &HeckeCharacterSpec, b: usize) -> Result<QSeries> {
    let ring = &xi.ring;
    let unit_count = ring.units().len();
    let mut sums = vec![QuadInt::new(0, 0); b + 1];
    for (alpha, nrm) in elements_of_norm_up_to(ring, b as u64) {
        if !ideals_coprime(ring, &alpha, &xi.modulus) {
            continue;
        }
        let term = xi.xi(&alpha)?;
        let slot = &mut sums[nrm as usize];
        slot.x += term.x;
        slot.y += term.y;
    }
    let mut coeffs = Vec::with_capacity(b);
    for (n, total) in sums.into_iter().enumerate().skip(1) {
        let (qx, rx) = total.x.div_rem(&BigInt::from(unit_count));
        let (qy, ry) = total.y.div_rem(&BigInt::from(unit_count));
        if !rx.is_zero() || !ry.is_zero() {
            return Err(Error::Internal(format!(
                "coefficient sum {total} at {n} is not divisible by the unit count"
            )));
        }
        if !qy.is_zero() {
            return Err(Error::NonRationalCoefficient(n));
        }
        coeffs.push(Rational::from_integer(qx));
    }
    let character = xi.nebentypus()?.spec_string();
    Ok(QSeries::new(
        coeffs,
        xi.form_weight(),
        xi.level(),
        &character,
    ))
}

/// The negative fundamental discriminants whose absolute value divides
/// the level, in increasing |D|: the only fields whose CM forms can
/// appear at that level.
pub fn cm_discriminants(n: u64) -> Vec<FundamentalDiscriminant> {
    divisors(n)
        .into_iter()
        .filter_map(|e| FundamentalDiscriminant::new(-(e as i64)).ok())
        .collect()
}

/// Rows spanning the joint kernel of T_q over the listed primes, in
/// cuspidal-plus coordinates at the given level; stops early once the
/// kernel is trivial.
fn joint_kernel(
    engine: &Engine,
    n: u64,
    k: i64,
    chi: &DirichletCharacter,
    qs: &[u64],
) -> Result<RationalMatrix> {
    let space = engine.space(n, k, chi)?;
    let mut kernel = RationalMatrix::identity(space.dim_plus());
    for &q in qs {
        if kernel.rows() == 0 {
            break;
        }
        let t = engine.hecke(n, k, chi, q)?;
        let images = t.matrix.mul(&kernel.transpose());
        let combos = images.nullspace();
        kernel = combos.mul(&kernel);
        kernel.rref_in_place();
    }
    Ok(kernel)
}

/// CM counts inside the kernel of T_p on the new subspace at one
/// (level, weight, character, p).
#[derive(Clone, Debug, Serialize)]
pub struct CMCountReport {
    pub p: u64,
    pub k: i64,
    pub level: u64,
    pub character: String,
    /// One entry per candidate discriminant, increasing |D|; the count is
    /// zero for discriminants in which p is not inert.
    pub per_discriminant: Vec<(i64, u64)>,
    pub m_cm_total: u64,
    pub m_new: u64,
}

/// Count the CM-by-D newforms of the given space for every candidate D.
/// Split and ramified p contribute nothing; for inert p the joint kernel
/// over inert primes q <= sturm_bound(k, N D^2), q not dividing pN, cuts
/// out exactly the CM-by-D subspace, and the divisor inversion from
/// module-level counting converts its dimension to a newform count.
pub fn multiplicity_cm(
    engine: &Engine,
    n: u64,
    k: i64,
    chi: &DirichletCharacter,
    p: u64,
) -> Result<CMCountReport> {
    check_operator_index(p, n)?;
    if k < 2 {
        return Err(Error::UnsupportedWeight(k));
    }

    let mut per_discriminant = Vec::new();
    let mut kernels: Vec<(i64, RationalMatrix)> = Vec::new();
    for d in cm_discriminants(n) {
        if !is_inert(d, p) {
            per_discriminant.push((d.value(), 0));
            continue;
        }
        let b = sturm_bound(k as u64, n * d.abs() * d.abs());
        let qs: Vec<u64> = primes_up_to(b as u64)
            .into_iter()
            .filter(|&q| is_inert(d, q) && q != p && n % q != 0)
            .collect();
        let count = invert_to_new(n, chi, |m, chi_m| {
            Ok(joint_kernel(engine, m, k, chi_m, &qs)?.rows() as u64)
        })?;
        kernels.push((d.value(), joint_kernel(engine, n, k, chi, &qs)?));
        per_discriminant.push((d.value(), count));
    }

    for i in 0..kernels.len() {
        for j in (i + 1)..kernels.len() {
            let (d1, k1) = &kernels[i];
            let (d2, k2) = &kernels[j];
            if k1.rows() == 0 || k2.rows() == 0 {
                continue;
            }
            let stacked = RationalMatrix::from_rows(
                (0..k1.rows())
                    .map(|r| k1.row(r).to_vec())
                    .chain((0..k2.rows()).map(|r| k2.row(r).to_vec()))
                    .collect(),
            );
            if stacked.rank() != k1.rows() + k2.rows() {
                return Err(Error::Internal(format!(
                    "CM subspaces for discriminants {d1} and {d2} overlap"
                )));
            }
        }
    }

    let m_cm_total = per_discriminant.iter().map(|&(_, c)| c).sum();
    let m_new = multiplicity_new(engine, n, k, chi, p, &Rational::zero())?;
    if m_cm_total > m_new {
        return Err(Error::Internal(format!(
            "CM count {m_cm_total} exceeds the kernel dimension {m_new} at level {n} weight {k}"
        )));
    }
    Ok(CMCountReport {
        p,
        k,
        level: n,
        character: chi.spec_string(),
        per_discriminant,
        m_cm_total,
        m_new,
    })
}

/// One weight of the comparison between the kernel of T_p on the new
/// subspace and its CM part.
#[derive(Clone, Debug, Serialize)]
pub struct ConjectureRow {
    pub k: i64,
    pub m_new: u64,
    pub m_cm_total: u64,
    pub equal: bool,
}

/// Compare m_new(0) with the CM count for every even weight in the
/// range.  Inequality is reported, not treated as an error: the expected
/// picture is equality for all large weights, with possible exceptions
/// at small ones.
pub fn verify_conjecture(
    engine: &Engine,
    n: u64,
    chi: &DirichletCharacter,
    p: u64,
    k_range: RangeInclusive<i64>,
) -> Result<Vec<ConjectureRow>> {
    let ks: Vec<i64> = k_range.filter(|k| k % 2 == 0).collect();
    ks.par_iter()
        .map(|&k| {
            let report = multiplicity_cm(engine, n, k, chi, p)?;
            Ok(ConjectureRow {
                k,
                m_new: report.m_new,
                m_cm_total: report.m_cm_total,
                equal: report.m_new == report.m_cm_total,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qexp::{eta_quotient, hecke_qexp};

    fn ring(d: i64) -> QuadRing {
        QuadRing::new(FundamentalDiscriminant::new(d).unwrap())
    }

    /// Weight-3 character behind the level-9 CM form: D = -3, conductor
    /// sqrt(-3), eps the quadratic residue character mod sqrt(-3).
    fn level9_character() -> HeckeCharacterSpec {
        HeckeCharacterSpec::new(
            -3,
            QuadInt::new(-1, 2),
            3,
            &[(QuadInt::new(-1, 0), QuadInt::new(-1, 0))],
            true,
        )
        .unwrap()
    }

    /// Weight-1 character behind the level-27 CM form: D = -3, conductor
    /// 3, eps inverting the embedded sixth roots of unity.
    fn level27_character() -> HeckeCharacterSpec {
        HeckeCharacterSpec::new(
            -3,
            QuadInt::new(3, 0),
            1,
            &[(QuadInt::new(0, 1), QuadInt::new(1, -1))],
            true,
        )
        .unwrap()
    }

    /// Weight-2 character with trivial conductor: D = -7, m = (1).
    fn level7_character() -> HeckeCharacterSpec {
        HeckeCharacterSpec::new(-7, QuadInt::new(1, 0), 2, &[], false).unwrap()
    }

    #[test]
    fn norms_are_multiplicative() {
        for d in [-3, -4, -7, -8, -11, -163] {
            let r = ring(d);
            for (ax, ay) in [(2, 3), (-1, 4), (5, -2)] {
                for (bx, by) in [(1, 1), (-3, 2), (0, -5)] {
                    let a = QuadInt::new(ax, ay);
                    let b = QuadInt::new(bx, by);
                    assert_eq!(r.norm(&r.mul(&a, &b)), r.norm(&a) * r.norm(&b));
                    assert_eq!(r.mul(&a, &r.conj(&a)), {
                        let mut n = QuadInt::new(0, 0);
                        n.x = r.norm(&a);
                        n
                    });
                }
            }
        }
    }

    #[test]
    fn square_root_of_the_discriminant_squares_to_it() {
        for d in [-3, -4, -7, -8, -11, -19, -43, -67, -163] {
            let r = ring(d);
            let s = r.sqrt_d();
            assert_eq!(r.mul(&s, &s), QuadInt::new(d, 0));
        }
    }

    #[test]
    fn unit_groups_consist_of_roots_of_unity() {
        for (d, order) in [(-3, 6), (-4, 4), (-7, 2), (-163, 2)] {
            let r = ring(d);
            let units = r.units();
            assert_eq!(units.len(), order as usize);
            for u in &units {
                assert!(r.norm(u).is_one());
                assert_eq!(r.pow(u, order), QuadInt::one());
            }
        }
    }

    #[test]
    fn ideal_lattice_index_is_the_norm() {
        for (d, m) in [
            (-3, QuadInt::new(-1, 2)),
            (-3, QuadInt::new(3, 0)),
            (-4, QuadInt::new(1, 1)),
            (-7, QuadInt::new(0, 1)),
            (-7, QuadInt::new(1, 0)),
        ] {
            let r = ring(d);
            let lat = ideal_lattice(&r, std::slice::from_ref(&m));
            assert_eq!(lat.index(), r.norm(&m));
            let probe = QuadInt::new(17, -13);
            let once = lat.reduce(&probe);
            let twice = lat.reduce(&QuadInt {
                x: once.0.clone(),
                y: once.1.clone(),
            });
            assert_eq!(once, twice);
        }
    }

    #[test]
    fn coprimality_follows_ideal_arithmetic() {
        let r = ring(-3);
        let sqrt3 = QuadInt::new(-1, 2);
        assert!(ideals_coprime(&r, &QuadInt::new(2, 0), &sqrt3));
        assert!(!ideals_coprime(&r, &QuadInt::new(3, 0), &sqrt3));
        assert!(!ideals_coprime(&r, &sqrt3, &QuadInt::new(3, 0)));
        assert!(ideals_coprime(&r, &QuadInt::new(0, 1), &QuadInt::new(3, 0)));
        assert!(ideals_coprime(&r, &QuadInt::new(1, 0), &QuadInt::new(5, 0)));
    }

    #[test]
    fn character_construction_guards() {
        assert!(matches!(
            HeckeCharacterSpec::new(-15, QuadInt::new(1, 0), 2, &[], false),
            Err(Error::ClassNumberNotOne(-15))
        ));
        assert!(matches!(
            HeckeCharacterSpec::new(5, QuadInt::new(1, 0), 2, &[], false),
            Err(Error::ClassNumberNotOne(5))
        ));
        assert!(matches!(
            HeckeCharacterSpec::new(-12, QuadInt::new(1, 0), 2, &[], false),
            Err(Error::NotFundamental(-12))
        ));
        assert!(matches!(
            HeckeCharacterSpec::new(-3, QuadInt::new(-1, 2), 3, &[], false),
            Err(Error::RamifiedConductor)
        ));
    }

    #[test]
    fn underdetermined_character_is_rejected() {
        // Only the trivial class is reachable without generators, but
        // (O/3)^* has six classes.
        let err = HeckeCharacterSpec::new(-3, QuadInt::new(3, 0), 1, &[], true);
        assert!(matches!(err, Err(Error::AmbiguousCharacter(_))));
    }

    #[test]
    fn contradictory_character_is_rejected() {
        // 2^2 = 4 = 1 mod sqrt(-3), so sending the class of 2 to a sixth
        // root of order 6 cannot extend to a character.
        let err = HeckeCharacterSpec::new(
            -3,
            QuadInt::new(-1, 2),
            3,
            &[(QuadInt::new(2, 0), QuadInt::new(0, 1))],
            true,
        );
        assert!(matches!(err, Err(Error::AmbiguousCharacter(_))));
    }

    #[test]
    fn unit_inconsistency_is_rejected() {
        // The residue character mod sqrt(-3) pairs with odd weights only.
        let err = HeckeCharacterSpec::new(
            -3,
            QuadInt::new(-1, 2),
            2,
            &[(QuadInt::new(-1, 0), QuadInt::new(-1, 0))],
            true,
        );
        assert!(matches!(err, Err(Error::UnitInconsistency(_))));
    }

    #[test]
    fn level9_series_starts_like_the_eta_power() {
        let xi = level9_character();
        assert_eq!(xi.level(), 9);
        assert_eq!(xi.form_weight(), 4);
        let f = cm_qexp(&xi, 36).unwrap();
        assert_eq!(f.coeff(1), &crate::exactalg::rat(1));
        assert_eq!(f.coeff(2), &crate::exactalg::rat(0));
        assert_eq!(f.coeff(3), &crate::exactalg::rat(0));
        assert_eq!(f.coeff(4), &crate::exactalg::rat(-8));
        assert_eq!(f.coeff(7), &crate::exactalg::rat(20));
        assert_eq!(f.character(), "trivial;mod:9");

        let eta = eta_quotient(&[(3, 8)], 9, 36).unwrap();
        assert!(f.agrees_with(&eta, sturm_bound(4, 81)).unwrap());
    }

    #[test]
    fn level27_series_matches_the_eta_product() {
        let xi = level27_character();
        assert_eq!(xi.level(), 27);
        assert_eq!(xi.form_weight(), 2);
        let b = sturm_bound(2, 27 * 9);
        let f = cm_qexp(&xi, b).unwrap();
        assert_eq!(f.coeff(4), &crate::exactalg::rat(-2));
        assert_eq!(f.coeff(7), &crate::exactalg::rat(-1));
        assert_eq!(f.character(), "trivial;mod:27");

        let eta = eta_quotient(&[(3, 2), (9, 2)], 27, b).unwrap();
        assert!(f.agrees_with(&eta, b).unwrap());
    }

    #[test]
    fn trivial_conductor_character_gives_the_level7_form() {
        let xi = level7_character();
        assert_eq!(xi.level(), 7);
        assert_eq!(xi.form_weight(), 3);
        let f = cm_qexp(&xi, 20).unwrap();
        assert_eq!(f.coeff(1), &crate::exactalg::rat(1));
        assert_eq!(f.coeff(2), &crate::exactalg::rat(-3));
        assert_eq!(f.character(), "kronecker:-7");
    }

    #[test]
    fn inert_prime_coefficients_vanish() {
        let f9 = cm_qexp(&level9_character(), 36).unwrap();
        for q in [2u64, 5, 11, 17, 23, 29] {
            assert!(is_inert(FundamentalDiscriminant::new(-3).unwrap(), q));
            assert!(f9.coeff(q as usize).is_zero(), "a_{q} should vanish");
        }
        let f7 = cm_qexp(&level7_character(), 20).unwrap();
        for q in [3u64, 5, 13, 17, 19] {
            assert!(is_inert(FundamentalDiscriminant::new(-7).unwrap(), q));
            assert!(f7.coeff(q as usize).is_zero(), "a_{q} should vanish");
        }
    }

    #[test]
    fn cm_series_is_an_eigenform_to_precision() {
        let f = cm_qexp(&level9_character(), 36).unwrap();
        for m in 2..=36usize {
            for n in 2..=36usize {
                if m * n <= 36 && gcd_u64(m as u64, n as u64) == 1 {
                    assert_eq!(
                        f.coeff(m * n),
                        &(f.coeff(m) * f.coeff(n)),
                        "a_{m} a_{n} != a_{}",
                        m * n
                    );
                }
            }
        }
        let chi = DirichletCharacter::trivial(9);
        let t7 = hecke_qexp(&f, 7, 4, &chi, 5).unwrap();
        let scaled = f.scale(f.coeff(7));
        assert!(t7.agrees_with(&scaled, 5).unwrap());
    }

    #[test]
    fn candidate_discriminants_divide_the_level() {
        let values = |n: u64| -> Vec<i64> {
            cm_discriminants(n).iter().map(|d| d.value()).collect()
        };
        assert!(values(1).is_empty());
        assert_eq!(values(27), vec![-3]);
        assert_eq!(values(36), vec![-3, -4]);
        assert_eq!(values(24), vec![-3, -4, -8, -24]);
        assert_eq!(values(7), vec![-7]);
    }

    #[test]
    fn cm_count_matches_the_kernel_at_level_nine() {
        let engine = Engine::new(None);
        let chi = DirichletCharacter::trivial(9);
        let report = multiplicity_cm(&engine, 9, 4, &chi, 2).unwrap();
        assert_eq!(report.per_discriminant, vec![(-3, 1)]);
        assert_eq!(report.m_cm_total, 1);
        assert_eq!(report.m_new, 1);
    }

    #[test]
    fn cm_count_matches_the_kernel_at_level_twenty_seven() {
        let engine = Engine::new(None);
        let chi = DirichletCharacter::trivial(27);
        let report = multiplicity_cm(&engine, 27, 2, &chi, 5).unwrap();
        assert_eq!(report.per_discriminant, vec![(-3, 1)]);
        assert_eq!(report.m_cm_total, 1);
        assert_eq!(report.m_new, 1);
    }

    #[test]
    fn level_one_has_no_cm_candidates() {
        let engine = Engine::new(None);
        let chi = DirichletCharacter::trivial(1);
        let report = multiplicity_cm(&engine, 1, 12, &chi, 5).unwrap();
        assert!(report.per_discriminant.is_empty());
        assert_eq!(report.m_cm_total, 0);
        assert_eq!(report.m_new, 0);
    }

    #[test]
    fn non_cm_level_reports_zero_for_every_discriminant() {
        let engine = Engine::new(None);
        let chi = DirichletCharacter::trivial(24);
        let report = multiplicity_cm(&engine, 24, 2, &chi, 5).unwrap();
        assert_eq!(report.per_discriminant.len(), 4);
        assert!(report.per_discriminant.iter().all(|&(_, c)| c == 0));
        assert!(report.m_cm_total <= report.m_new);
    }

    #[test]
    fn cm_count_guards() {
        let engine = Engine::new(None);
        let chi = DirichletCharacter::trivial(9);
        assert!(matches!(
            multiplicity_cm(&engine, 9, 4, &chi, 3),
            Err(Error::PDividesLevel { p: 3, level: 9 })
        ));
        assert!(matches!(
            multiplicity_cm(&engine, 9, 4, &chi, 4),
            Err(Error::NotPrime(4))
        ));
    }

    #[test]
    fn conjecture_rows_match_the_pinned_counts() {
        let engine = Engine::new(None);

        let chi27 = DirichletCharacter::trivial(27);
        let rows = verify_conjecture(&engine, 27, &chi27, 5, 2..=2).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!((rows[0].k, rows[0].m_new, rows[0].m_cm_total), (2, 1, 1));
        assert!(rows[0].equal);

        let chi1 = DirichletCharacter::trivial(1);
        let rows = verify_conjecture(&engine, 1, &chi1, 5, 12..=12).unwrap();
        assert_eq!((rows[0].k, rows[0].m_new, rows[0].m_cm_total), (12, 0, 0));
        assert!(rows[0].equal);

        let chi9 = DirichletCharacter::trivial(9);
        let rows = verify_conjecture(&engine, 9, &chi9, 2, 4..=4).unwrap();
        assert_eq!((rows[0].k, rows[0].m_new, rows[0].m_cm_total), (4, 1, 1));
        assert!(rows[0].equal);
    }
}
