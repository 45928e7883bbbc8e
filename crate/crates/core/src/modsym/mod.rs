//! Symbol spaces for cusp forms: construction, boundary, star involution,
//! and Hecke action.
//!
//! `build_space` presents the weight-k level-N space on a deterministic
//! basis, splits off the cuspidal subspace as the kernel of the boundary
//! map, and diagonalizes the star involution on it.  Hecke operators are
//! assembled on the quotient basis and restricted, with every restriction
//! verified exactly.

mod boundary;
mod dimension;
mod hecke;
mod p1;
mod relations;

pub mod cache;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arith::is_prime;
use crate::characters::DirichletCharacter;
use crate::exactalg::RationalMatrix;
use crate::{Error, Result};

/// Version tag for the on-disk formats and basis fingerprints; bump on any
/// change that affects serialized bytes.
pub const SCHEMA_VERSION: u32 = 1;

/// Exact dimension of the cusp form space of weight k and level n for the
/// given character (taken modulo a divisor of n).
pub fn dim_cusp(n: u64, k: i64, chi: &DirichletCharacter) -> Result<u64> {
    dimension::dim_cusp_exact(n, k, chi)
}

/// A subspace given by a reduced-echelon row basis over the quotient
/// coordinates, plus its pivot columns for coordinate extraction.
#[derive(Clone)]
struct Subspace {
    rows: RationalMatrix,
    pivots: Vec<usize>,
}

impl Subspace {
    fn from_rows(mut rows: RationalMatrix) -> Subspace {
        let pivots = rows.rref_in_place();
        Subspace { rows, pivots }
    }

    fn dim(&self) -> usize {
        self.rows.rows()
    }
}

/// Identification data carried with every derived matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub level: u64,
    pub weight: i64,
    pub character: String,
    pub basis_fingerprint: String,
}

/// Matrix of the index-n Hecke operator on the cuspidal-plus basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeckeMatrix {
    pub n: u64,
    pub matrix: RationalMatrix,
    pub provenance: Provenance,
}

/// Presented symbol space with its cuspidal and star-eigenspace structure.
pub struct ManinSymbolSpace {
    level: u64,
    weight: i64,
    character: DirichletCharacter,
    p1: p1::P1,
    m: usize,
    presentation: relations::Presentation,
    cuspidal: Subspace,
    star_cuspidal: RationalMatrix,
    plus: Subspace,
    minus: Subspace,
    fingerprint: String,
}

/// Construct the space for level n, weight k, and character chi; chi must
/// be given modulo a divisor of n and have the parity of k.
pub fn build_space(n: u64, k: i64, chi: &DirichletCharacter) -> Result<ManinSymbolSpace> {
    assert!(n >= 1, "level must be positive");
    if k < 2 {
        return Err(Error::UnsupportedWeight(k));
    }
    if n % chi.modulus() != 0 {
        return Err(Error::ConductorNotDividing {
            cond: chi.modulus(),
            modulus: n,
        });
    }
    let weight_parity = if k % 2 == 0 { 1 } else { -1 };
    if chi.parity() != weight_parity {
        return Err(Error::ParityMismatch {
            k,
            chi_parity: chi.parity() as i64,
        });
    }

    let m = (k - 2) as usize;
    let p1 = p1::P1::new(n);
    let presentation = relations::build_presentation(&p1, m, chi);
    let boundary = boundary::boundary_matrix(&p1, m, chi, &presentation)?;
    let cuspidal = Subspace::from_rows(boundary.nullspace());

    let star_quotient = hecke::assemble_operator(&p1, m, chi, &presentation, &[hecke::REFLECTION])?;
    let star_cuspidal = hecke::restrict_operator(&star_quotient, &cuspidal.rows, &cuspidal.pivots)?;
    if star_cuspidal.mul(&star_cuspidal) != RationalMatrix::identity(cuspidal.dim()) {
        return Err(Error::Internal("star involution does not square to one".into()));
    }

    let eigenspace = |sign: i64| -> Result<Subspace> {
        let shifted = star_cuspidal.sub_scalar_diag(&crate::exactalg::rat(sign))?;
        let inside = shifted.nullspace();
        Ok(Subspace::from_rows(inside.mul(&cuspidal.rows)))
    };
    let plus = eigenspace(1)?;
    let minus = eigenspace(-1)?;
    if plus.dim() + minus.dim() != cuspidal.dim() {
        return Err(Error::Internal(
            "star eigenspaces do not fill the cuspidal subspace".into(),
        ));
    }

    let fingerprint = basis_fingerprint(n, k, &chi.spec_string(), &plus.rows, cuspidal.dim(), presentation.dim());

    Ok(ManinSymbolSpace {
        level: n,
        weight: k,
        character: chi.clone(),
        p1,
        m,
        presentation,
        cuspidal,
        star_cuspidal,
        plus,
        minus,
        fingerprint,
    })
}

fn basis_fingerprint(
    level: u64,
    weight: i64,
    character: &str,
    plus_rows: &RationalMatrix,
    dim_cuspidal: usize,
    dim_quotient: usize,
) -> String {
    let payload = serde_json::json!({
        "schema": SCHEMA_VERSION,
        "level": level,
        "weight": weight,
        "character": character,
        "dim_quotient": dim_quotient,
        "dim_cuspidal": dim_cuspidal,
        "plus_basis": plus_rows,
    });
    let bytes = serde_json::to_vec(&payload).expect("fingerprint payload serializes");
    let digest = Sha256::digest(&bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

impl ManinSymbolSpace {
    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    pub fn character(&self) -> &DirichletCharacter {
        &self.character
    }

    pub fn dim_quotient(&self) -> usize {
        self.presentation.dim()
    }

    pub fn dim_cuspidal(&self) -> usize {
        self.cuspidal.dim()
    }

    pub fn dim_plus(&self) -> usize {
        self.plus.dim()
    }

    pub fn dim_minus(&self) -> usize {
        self.minus.dim()
    }

    /// Digest of the plus basis and its construction parameters.
    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    /// Row basis of the cuspidal-plus subspace in quotient coordinates.
    pub fn plus_basis(&self) -> &RationalMatrix {
        &self.plus.rows
    }

    pub fn provenance(&self) -> Provenance {
        Provenance {
            level: self.level,
            weight: self.weight,
            character: self.character.spec_string(),
            basis_fingerprint: self.fingerprint.clone(),
        }
    }

    /// Matrix of the star involution on the cuspidal basis.
    pub fn star_matrix(&self) -> &RationalMatrix {
        &self.star_cuspidal
    }

    fn operator_on_quotient(&self, n: u64) -> Result<RationalMatrix> {
        hecke::assemble_operator(
            &self.p1,
            self.m,
            &self.character,
            &self.presentation,
            &hecke::heilbronn_matrices(n),
        )
    }

    /// Hecke operator of prime index q on the cuspidal-plus basis.  Primes
    /// dividing the level are permitted and act as the level-lowering
    /// operator there.
    pub fn hecke_matrix(&self, q: u64) -> Result<HeckeMatrix> {
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        let op = self.operator_on_quotient(q)?;
        let matrix = hecke::restrict_operator(&op, &self.plus.rows, &self.plus.pivots)?;
        Ok(HeckeMatrix {
            n: q,
            matrix,
            provenance: self.provenance(),
        })
    }

    /// Hecke operator of prime index q on the cuspidal-minus basis.
    pub fn hecke_matrix_minus(&self, q: u64) -> Result<RationalMatrix> {
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        let op = self.operator_on_quotient(q)?;
        hecke::restrict_operator(&op, &self.minus.rows, &self.minus.pivots)
    }

    /// Hecke operator of prime index q on the full cuspidal basis.
    pub fn hecke_matrix_cuspidal(&self, q: u64) -> Result<RationalMatrix> {
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        let op = self.operator_on_quotient(q)?;
        hecke::restrict_operator(&op, &self.cuspidal.rows, &self.cuspidal.pivots)
    }
}
