//! Dirichlet characters and Kronecker symbols.
//!
//! Only trivial and quadratic characters are first class: their values lie
//! in {-1, 0, +1}, so every downstream linear-algebra computation stays over
//! the rationals.  A quadratic character is always presented as kronecker(D)
//! for a fundamental discriminant D, where it is primitive of conductor |D|;
//! squarefree inputs are normalized to the discriminant of the field they
//! generate before use.

use crate::{Error, Result};
use std::fmt;

/// Kronecker symbol (a | n), extending the Jacobi symbol to all integers.
///
/// Conventions: (a | 0) = 1 iff a = +-1; (a | -1) = -1 iff a < 0;
/// (a | 2) = 0 for even a, +1 for a = +-1 mod 8, -1 for a = +-3 mod 8.
pub fn kronecker(a: i64, n: i64) -> i32 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    if a % 2 == 0 && n % 2 == 0 {
        return 0;
    }
    let mut n = n;
    let mut acc = 1;
    if n < 0 {
        n = -n;
        if a < 0 {
            acc = -acc;
        }
    }
    let mut twos = 0;
    while n % 2 == 0 {
        n /= 2;
        twos += 1;
    }
    if twos % 2 == 1 {
        acc *= match a.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => return 0,
        };
    }
    acc * jacobi(a, n)
}

/// Jacobi symbol for odd n >= 1, by quadratic reciprocity.
fn jacobi(a: i64, mut n: i64) -> i32 {
    debug_assert!(n >= 1 && n % 2 == 1);
    let mut a = a.rem_euclid(n);
    let mut t = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// True iff d is the discriminant of a quadratic field: d = 1 mod 4 and
/// squarefree (d != 1), or d = 4m with m squarefree and m = 2 or 3 mod 4.
pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => is_squarefree(d),
        0 => {
            let m = d / 4;
            is_squarefree(m) && matches!(m.rem_euclid(4), 2 | 3)
        }
        _ => false,
    }
}

fn is_squarefree(d: i64) -> bool {
    crate::arith::factor(d.unsigned_abs()).iter().all(|&(_, e)| e == 1)
}

/// Discriminant of Q(sqrt(d)) for a nonsquare integer d.
pub fn fundamentalize(d: i64) -> Result<i64> {
    if d == 0 {
        return Err(Error::NotFundamental(d));
    }
    let mut core = d.signum();
    for (p, e) in crate::arith::factor(d.unsigned_abs()) {
        if e % 2 == 1 {
            core *= p as i64;
        }
    }
    if core == 1 {
        return Err(Error::NotFundamental(d));
    }
    Ok(if core.rem_euclid(4) == 1 { core } else { 4 * core })
}

/// Fundamental discriminant, validated at construction.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct FundamentalDiscriminant(i64);

impl FundamentalDiscriminant {
    pub fn new(d: i64) -> Result<Self> {
        if is_fundamental_discriminant(d) {
            Ok(FundamentalDiscriminant(d))
        } else {
            Err(Error::NotFundamental(d))
        }
    }

    /// Normalize any nonsquare d to the discriminant of Q(sqrt(d)).
    pub fn of_field(d: i64) -> Result<Self> {
        Ok(FundamentalDiscriminant(fundamentalize(d)?))
    }

    pub fn value(&self) -> i64 {
        self.0
    }

    pub fn abs(&self) -> u64 {
        self.0.unsigned_abs()
    }
}

impl fmt::Display for FundamentalDiscriminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// True iff the prime q stays prime in Q(sqrt(D)).
pub fn is_inert(d: FundamentalDiscriminant, q: u64) -> bool {
    kronecker(d.value(), q as i64) == -1
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum CharKind {
    Trivial,
    Kronecker(i64),
}

/// Dirichlet character mod N with values in {-1, 0, +1}.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DirichletCharacter {
    modulus: u64,
    kind: CharKind,
    values: Vec<i8>,
}

impl DirichletCharacter {
    /// Principal character mod `modulus`.
    pub fn trivial(modulus: u64) -> Self {
        assert!(modulus >= 1);
        let values = (0..modulus)
            .map(|r| if gcd_u(r, modulus) == 1 { 1 } else { 0 })
            .collect::<Vec<i8>>();
        let values = if modulus == 1 { vec![1] } else { values };
        DirichletCharacter {
            modulus,
            kind: CharKind::Trivial,
            values,
        }
    }

    /// kronecker(D) as a character mod `modulus`, which |D| must divide.
    pub fn quadratic(d: FundamentalDiscriminant, modulus: u64) -> Result<Self> {
        if modulus % d.abs() != 0 {
            return Err(Error::ConductorNotDividing {
                cond: d.abs(),
                modulus,
            });
        }
        let values = (0..modulus)
            .map(|r| {
                if gcd_u(r, modulus) == 1 {
                    kronecker(d.value(), r as i64) as i8
                } else {
                    0
                }
            })
            .collect();
        Ok(DirichletCharacter {
            modulus,
            kind: CharKind::Kronecker(d.value()),
            values,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Conductor: 1 for the trivial kind, |D| for kronecker(D).
    pub fn conductor(&self) -> u64 {
        match self.kind {
            CharKind::Trivial => 1,
            CharKind::Kronecker(d) => d.unsigned_abs(),
        }
    }

    pub fn eval(&self, n: i64) -> i32 {
        self.values[n.rem_euclid(self.modulus as i64) as usize] as i32
    }

    pub fn eval_u(&self, n: u64) -> i32 {
        self.values[(n % self.modulus) as usize] as i32
    }

    /// chi(-1), which is +1 for even characters and -1 for odd ones.
    pub fn parity(&self) -> i32 {
        self.eval(-1)
    }

    pub fn is_trivial_kind(&self) -> bool {
        self.kind == CharKind::Trivial
    }

    pub fn discriminant(&self) -> Option<i64> {
        match self.kind {
            CharKind::Trivial => None,
            CharKind::Kronecker(d) => Some(d),
        }
    }

    /// The same character carried by a different modulus, which the
    /// conductor must divide.
    pub fn with_modulus(&self, modulus: u64) -> Result<Self> {
        match self.kind {
            CharKind::Trivial => Ok(DirichletCharacter::trivial(modulus)),
            CharKind::Kronecker(d) => {
                DirichletCharacter::quadratic(FundamentalDiscriminant::new(d)?, modulus)
            }
        }
    }

    /// Canonical spec string, the inverse of CharSpec::parse.
    pub fn spec_string(&self) -> String {
        let default_modulus = self.conductor();
        let base = match self.kind {
            CharKind::Trivial => "trivial".to_string(),
            CharKind::Kronecker(d) => format!("kronecker:{d}"),
        };
        if self.modulus == default_modulus {
            base
        } else {
            format!("{base};mod:{}", self.modulus)
        }
    }
}

fn gcd_u(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u(b, a % b)
    }
}

/// Parsed character specification: "trivial" or "kronecker:D", optionally
/// followed by ";mod:N" to induce to a larger modulus.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CharSpec {
    kind: CharKind,
    modulus_override: Option<u64>,
}

impl CharSpec {
    pub fn trivial() -> Self {
        CharSpec {
            kind: CharKind::Trivial,
            modulus_override: None,
        }
    }

    pub fn parse(s: &str) -> Result<CharSpec> {
        let bad = || Error::BadCharSpec(s.to_string());
        let mut parts = s.trim().split(';');
        let head = parts.next().ok_or_else(bad)?;
        let kind = if head == "trivial" {
            CharKind::Trivial
        } else if let Some(dstr) = head.strip_prefix("kronecker:") {
            let d: i64 = dstr.parse().map_err(|_| bad())?;
            if !is_fundamental_discriminant(d) {
                return Err(Error::NotFundamental(d));
            }
            CharKind::Kronecker(d)
        } else {
            return Err(bad());
        };
        let mut modulus_override = None;
        for part in parts {
            let Some(mstr) = part.strip_prefix("mod:") else {
                return Err(bad());
            };
            let m: u64 = mstr.parse().map_err(|_| bad())?;
            if m == 0 {
                return Err(bad());
            }
            modulus_override = Some(m);
        }
        Ok(CharSpec {
            kind,
            modulus_override,
        })
    }

    /// Instantiate the character; the default modulus is the conductor.
    pub fn character(&self) -> Result<DirichletCharacter> {
        match self.kind {
            CharKind::Trivial => Ok(DirichletCharacter::trivial(
                self.modulus_override.unwrap_or(1),
            )),
            CharKind::Kronecker(d) => {
                let fd = FundamentalDiscriminant::new(d)?;
                DirichletCharacter::quadratic(fd, self.modulus_override.unwrap_or(fd.abs()))
            }
        }
    }
}

impl fmt::Display for CharSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = match self.kind {
            CharKind::Trivial => "trivial".to_string(),
            CharKind::Kronecker(d) => format!("kronecker:{d}"),
        };
        match self.modulus_override {
            Some(m) => write!(f, "{base};mod:{m}"),
            None => write!(f, "{base}"),
        }
    }
}
