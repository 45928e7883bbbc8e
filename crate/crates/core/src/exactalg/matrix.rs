//! Dense matrices over the rationals.
//!
//! Rank is computed by fraction-free (Bareiss) elimination on a
//! denominator-cleared copy, so intermediate entries stay integral and no
//! rounding can occur.  Reduced row echelon form performs ordinary rational
//! elimination, carried on integer numerators over one denominator per row,
//! with the same deterministic pivot rule: the pivot is always the first
//! nonzero entry of the earliest unresolved column.

use super::{format_rational, parse_rational, Rational};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Index, IndexMut};

/// Dense row-major matrix of exact rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

/// Numerators of the entries over their least common denominator.
fn scale_integral(row: &[Rational]) -> (Vec<BigInt>, BigInt) {
    let lcm = row
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints = row
        .iter()
        .map(|x| x.numer() * (&lcm / x.denom()))
        .collect();
    (ints, lcm)
}

impl RationalMatrix {
    /// Zero matrix of the given shape.
    pub fn zero(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    /// Identity matrix of size n.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    /// Build from a closure over (row, col).
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        RationalMatrix {
            rows,
            cols,
            entries,
        }
    }

    /// Build from rows of integers (convenience for tests and fixtures).
    pub fn from_i64_rows(data: &[&[i64]]) -> Self {
        let rows = data.len();
        let cols = data.first().map_or(0, |r| r.len());
        Self::from_fn(rows, cols, |i, j| super::rat(data[i][j]))
    }

    /// Stack rows of rationals into a matrix; all rows must share a length.
    pub fn from_rows(data: Vec<Vec<Rational>>) -> Self {
        let rows = data.len();
        let cols = data.first().map_or(0, |r| r.len());
        assert!(data.iter().all(|r| r.len() == cols), "ragged rows");
        RationalMatrix {
            rows,
            cols,
            entries: data.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Borrow row i as a slice.
    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    /// Matrix product self * other.
    ///
    /// Rows of self and columns of other are scaled integral first, so each
    /// output entry costs one integer dot product and a single reduction.
    pub fn mul(&self, other: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in matrix product");
        let left: Vec<(Vec<BigInt>, BigInt)> =
            (0..self.rows).map(|i| scale_integral(self.row(i))).collect();
        let right: Vec<(Vec<BigInt>, BigInt)> = (0..other.cols)
            .map(|j| {
                let col: Vec<Rational> = (0..other.rows).map(|k| other[(k, j)].clone()).collect();
                scale_integral(&col)
            })
            .collect();
        let mut out = RationalMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            let (a, da) = &left[i];
            for j in 0..other.cols {
                let (b, db) = &right[j];
                let mut acc = BigInt::zero();
                for k in 0..self.cols {
                    if !a[k].is_zero() && !b[k].is_zero() {
                        acc += &a[k] * &b[k];
                    }
                }
                if !acc.is_zero() {
                    out[(i, j)] = Rational::new(acc, da * db);
                }
            }
        }
        out
    }

    /// self - other.
    pub fn sub(&self, other: &RationalMatrix) -> RationalMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (x, y) in out.entries.iter_mut().zip(&other.entries) {
            *x -= y;
        }
        out
    }

    /// self - lambda * I (square only).
    pub fn sub_scalar_diag(&self, lambda: &Rational) -> Result<RationalMatrix> {
        if !self.is_square() {
            return Err(Error::NonSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut out = self.clone();
        for i in 0..self.rows {
            let t = &out[(i, i)] - lambda;
            out[(i, i)] = t;
        }
        Ok(out)
    }

    pub fn transpose(&self) -> RationalMatrix {
        RationalMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.entries.iter().all(|x| x.is_zero())
    }

    /// Rank by fraction-free Bareiss elimination.
    ///
    /// Rows are first scaled integral (rank is unchanged); the elimination
    /// then performs only exact integer divisions by the previous pivot.
    pub fn rank(&self) -> usize {
        let mut m: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|i| scale_integral(self.row(i)).0)
            .collect();
        let mut prev = BigInt::one();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| !m[i][c].is_zero()) else {
                continue;
            };
            m.swap(r, pr);
            for i in r + 1..self.rows {
                for j in c + 1..self.cols {
                    let t = &m[r][c] * &m[i][j] - &m[i][c] * &m[r][j];
                    debug_assert!((&t % &prev).is_zero(), "Bareiss division not exact");
                    m[i][j] = t / &prev;
                }
                m[i][c] = BigInt::zero();
            }
            prev = m[r][c].clone();
            r += 1;
        }
        r
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    ///
    /// Rows are carried as primitive integer vectors: each Jordan update
    /// cross-multiplies and then divides out the row content, which on the
    /// row-reduced bases arising here stays far smaller than the minors a
    /// fraction-free scheme would carry.  Scaling rows never changes the
    /// canonical reduced form, so the result matches rational Gauss-Jordan.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let mut num: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|i| scale_integral(self.row(i)).0)
            .collect();
        let reduce_row = |row: &mut Vec<BigInt>| {
            let mut g = BigInt::zero();
            for v in row.iter() {
                g = g.gcd(v);
                if g.is_one() {
                    return;
                }
            }
            if !g.is_one() && !g.is_zero() {
                for v in row.iter_mut() {
                    *v /= &g;
                }
            }
        };

        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| !num[i][c].is_zero()) else {
                continue;
            };
            num.swap(r, pr);
            let p = num[r][c].clone();
            for i in 0..self.rows {
                if i == r || num[i][c].is_zero() {
                    continue;
                }
                let a = std::mem::take(&mut num[i][c]);
                let g = a.gcd(&p);
                let (sp, sa) = (&p / &g, &a / &g);
                for j in 0..self.cols {
                    if j == c {
                        continue;
                    }
                    if num[r][j].is_zero() {
                        if !sp.is_one() && !num[i][j].is_zero() {
                            num[i][j] = &num[i][j] * &sp;
                        }
                    } else if num[i][j].is_zero() {
                        num[i][j] = -(&num[r][j] * &sa);
                    } else {
                        num[i][j] = &num[i][j] * &sp - &num[r][j] * &sa;
                    }
                }
                reduce_row(&mut num[i]);
            }
            pivots.push(c);
            r += 1;
        }

        for i in 0..self.rows {
            if i < pivots.len() {
                let p = num[i][pivots[i]].clone();
                for j in 0..self.cols {
                    self[(i, j)] = if num[i][j].is_zero() {
                        Rational::zero()
                    } else {
                        Rational::new(num[i][j].clone(), p.clone())
                    };
                }
            } else {
                for j in 0..self.cols {
                    self[(i, j)] = Rational::zero();
                }
            }
        }
        pivots
    }

    /// Reduced row echelon form and pivot columns, without mutating self.
    pub fn rref(&self) -> (RationalMatrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        (m, pivots)
    }

    /// Basis of the right kernel {v : self * v = 0}, returned as the rows of
    /// a matrix in reduced row echelon form (so the basis is canonical).
    pub fn nullspace(&self) -> RationalMatrix {
        let (r, pivots) = self.rref();
        let is_pivot = {
            let mut v = vec![false; self.cols];
            for &c in &pivots {
                v[c] = true;
            }
            v
        };
        let free: Vec<usize> = (0..self.cols).filter(|&c| !is_pivot[c]).collect();
        let mut basis = RationalMatrix::zero(free.len(), self.cols);
        for (bi, &f) in free.iter().enumerate() {
            basis[(bi, f)] = Rational::one();
            for (ri, &p) in pivots.iter().enumerate() {
                basis[(bi, p)] = -r[(ri, f)].clone();
            }
        }
        basis.rref_in_place();
        basis
    }
}

impl Index<(usize, usize)> for RationalMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}x{}]", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(format_rational).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    entries: Vec<String>,
}

impl Serialize for RationalMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(format_rational).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = MatrixJson::deserialize(d)?;
        if raw.entries.len() != raw.rows * raw.cols {
            return Err(D::Error::custom(format!(
                "expected {} entries, got {}",
                raw.rows * raw.cols,
                raw.entries.len()
            )));
        }
        let entries = raw
            .entries
            .iter()
            .map(|s| parse_rational(s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}"))))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(RationalMatrix {
            rows: raw.rows,
            cols: raw.cols,
            entries,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{rat, ratio};

    #[test]
    fn rank_of_rank_one_matrix() {
        let m = RationalMatrix::from_i64_rows(&[&[1, 2], &[2, 4]]);
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn rank_of_identity() {
        assert_eq!(RationalMatrix::identity(3).rank(), 3);
    }

    #[test]
    fn rank_of_empty_and_zero() {
        assert_eq!(RationalMatrix::zero(0, 0).rank(), 0);
        assert_eq!(RationalMatrix::zero(3, 2).rank(), 0);
    }

    #[test]
    fn rank_with_rational_entries() {
        let m = RationalMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => ratio(1, 2),
            (0, 1) => ratio(1, 3),
            (1, 0) => ratio(3, 2),
            _ => rat(1),
        });
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn nullspace_of_rank_one_matrix() {
        let m = RationalMatrix::from_i64_rows(&[&[1, 2], &[2, 4]]);
        let ns = m.nullspace();
        assert_eq!(ns.rows(), 1);
        // proportional to (-2, 1); canonical RREF scaling gives (1, -1/2)
        assert_eq!(ns[(0, 0)], rat(1));
        assert_eq!(ns[(0, 1)], ratio(-1, 2));
        // membership: m * v = 0
        let v = ns.transpose();
        assert!(m.mul(&v).is_zero_matrix());
    }

    #[test]
    fn nullspace_of_identity_is_empty() {
        assert_eq!(RationalMatrix::identity(4).nullspace().rows(), 0);
    }

    #[test]
    fn rank_plus_nullity_is_cols() {
        let m = RationalMatrix::from_i64_rows(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]);
        assert_eq!(m.rank() + m.nullspace().rows(), m.cols());
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn rref_is_idempotent() {
        let m = RationalMatrix::from_i64_rows(&[&[2, 4, 1], &[1, 2, 0], &[0, 0, 3]]);
        let (r1, p1) = m.rref();
        let (r2, p2) = r1.rref();
        assert_eq!(r1, r2);
        assert_eq!(p1, p2);
    }

    #[test]
    fn json_round_trip_matches_format() {
        let m = RationalMatrix::from_fn(2, 2, |i, j| if i == j { rat(1) } else { ratio(1, 2) });
        let js = serde_json::to_string(&m).unwrap();
        assert_eq!(
            js,
            r#"{"rows":2,"cols":2,"entries":["1","1/2","1/2","1"]}"#
        );
        let back: RationalMatrix = serde_json::from_str(&js).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn json_rejects_wrong_entry_count() {
        let bad = r#"{"rows":2,"cols":2,"entries":["1","2","3"]}"#;
        assert!(serde_json::from_str::<RationalMatrix>(bad).is_err());
    }
}
