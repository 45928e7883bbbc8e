//! Quotient presentation of the symbol space.
//!
//! Generators are pairs (monomial degree i, projective point x) indexed as
//! g = i * |P1| + x for 0 <= i <= m with m = k - 2.  Two-term relations
//! identify generators up to sign and are folded into a signed union-find;
//! three-term relations are emitted once per orbit of the order-three
//! rotation and reduced to row echelon form over the surviving roots.  The
//! coordinates of every generator in the resulting quotient basis are stored
//! with a single shared denominator so that operator assembly can run on
//! integer rows.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::characters::DirichletCharacter;

use super::p1::P1;

/// Order-four rotation; pairs the monomial degrees i and m - i.
pub(crate) const SIGMA: [i64; 4] = [0, -1, 1, 0];
/// Order-three rotation generating the three-term relations.
pub(crate) const TAU: [i64; 4] = [0, -1, 1, -1];
const TAU_SQUARED: [i64; 4] = [-1, 1, -1, 0];

/// Coefficients of (a X + b Y)^e listed by the power of X.
fn binomial_power(a: i64, b: i64, e: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::one()];
    for _ in 0..e {
        let mut next = vec![BigInt::zero(); out.len() + 1];
        for (j, coeff) in out.iter().enumerate() {
            next[j + 1] += coeff * a;
            next[j] += coeff * b;
        }
        out = next;
    }
    out
}

/// Row i holds the expansion of X^i Y^(m-i) after the substitution
/// X -> a X + b Y, Y -> c X + d Y, listed by the power of X.
pub(crate) fn subst_table(h: &[i64; 4], m: usize) -> Vec<Vec<BigInt>> {
    (0..=m)
        .map(|i| {
            let top = binomial_power(h[0], h[1], i);
            let bottom = binomial_power(h[2], h[3], m - i);
            let mut row = vec![BigInt::zero(); m + 1];
            for (j1, c1) in top.iter().enumerate() {
                for (j2, c2) in bottom.iter().enumerate() {
                    row[j1 + j2] += c1 * c2;
                }
            }
            row
        })
        .collect()
}

/// Union-find tracking g = sign * root, with roots that acquired an
/// inconsistent sign marked dead (the generator is annihilated by 2).
struct SignedUnionFind {
    parent: Vec<usize>,
    sign: Vec<i8>,
    dead: Vec<bool>,
}

impl SignedUnionFind {
    fn new(n: usize) -> SignedUnionFind {
        SignedUnionFind {
            parent: (0..n).collect(),
            sign: vec![1; n],
            dead: vec![false; n],
        }
    }

    fn find(&mut self, g: usize) -> (usize, i8) {
        if self.parent[g] == g {
            return (g, 1);
        }
        let (root, s) = self.find(self.parent[g]);
        self.parent[g] = root;
        self.sign[g] *= s;
        (root, self.sign[g])
    }

    /// Impose g1 = s * g2.
    fn impose(&mut self, g1: usize, g2: usize, s: i8) {
        let (r1, s1) = self.find(g1);
        let (r2, s2) = self.find(g2);
        if r1 == r2 {
            if s1 != s * s2 {
                self.dead[r1] = true;
            }
            return;
        }
        self.parent[r1] = r2;
        self.sign[r1] = s1 * s * s2;
        if self.dead[r1] {
            self.dead[r2] = true;
        }
    }

    /// (root, sign) for a live generator, None for an annihilated one.
    fn resolve(&mut self, g: usize) -> Option<(usize, i8)> {
        let (root, s) = self.find(g);
        if self.dead[root] {
            None
        } else {
            Some((root, s))
        }
    }
}

/// Incremental sparse reduction to reduced row echelon form.  The relations
/// are homogeneous, so every row is kept as a primitive integer vector with
/// positive leading coefficient; the final reduced system is canonical for
/// the row space up to that scaling, so insertion order does not affect the
/// quotient presentation.
struct SparseRref {
    pivots: BTreeMap<usize, usize>,
    rows: Vec<BTreeMap<usize, BigInt>>,
}

/// row := row * scale_row - scale_other * other, dropping zeros.
fn eliminate(
    row: &mut BTreeMap<usize, BigInt>,
    other: &BTreeMap<usize, BigInt>,
    scale_row: &BigInt,
    scale_other: &BigInt,
) {
    if !scale_row.is_one() {
        for v in row.values_mut() {
            *v *= scale_row;
        }
    }
    for (&col, coeff) in other {
        let entry = row.entry(col).or_insert_with(BigInt::zero);
        *entry -= scale_other * coeff;
        if entry.is_zero() {
            row.remove(&col);
        }
    }
}

/// Divide out the content and make the leading coefficient positive.
fn make_primitive(row: &mut BTreeMap<usize, BigInt>) {
    let mut g = BigInt::zero();
    for v in row.values() {
        g = g.gcd(v);
        if g.is_one() {
            break;
        }
    }
    if row.values().next().is_some_and(Signed::is_negative) {
        g = -g;
    }
    if g.is_one() || g.is_zero() {
        return;
    }
    for v in row.values_mut() {
        *v /= &g;
    }
}

impl SparseRref {
    fn new() -> SparseRref {
        SparseRref {
            pivots: BTreeMap::new(),
            rows: Vec::new(),
        }
    }

    fn insert(&mut self, mut row: BTreeMap<usize, BigInt>) {
        loop {
            let Some((&col, _)) = row.iter().next() else {
                return;
            };
            match self.pivots.get(&col) {
                Some(&r) => {
                    let a = row[&col].clone();
                    let p = self.rows[r][&col].clone();
                    let g = a.gcd(&p);
                    eliminate(&mut row, &self.rows[r], &(&p / &g), &(&a / &g));
                    make_primitive(&mut row);
                }
                None => {
                    make_primitive(&mut row);
                    self.pivots.insert(col, self.rows.len());
                    self.rows.push(row);
                    return;
                }
            }
        }
    }

    /// Clear every pivot column from the tails, working from the largest
    /// pivot down so each subtraction only introduces free columns.  The
    /// pivot hits of a row are therefore fixed up front, and each row is
    /// expanded into a dense buffer for its eliminations since the tails
    /// fill most free columns anyway.
    fn finish(&mut self, n_cols: usize) {
        let cols: Vec<usize> = self.pivots.keys().copied().rev().collect();
        let mut dense: Vec<BigInt> = vec![BigInt::zero(); n_cols];
        let mut present = vec![false; n_cols];
        for &col in &cols {
            let r = self.pivots[&col];
            let row = std::mem::take(&mut self.rows[r]);
            let hits: Vec<usize> = row
                .keys()
                .copied()
                .filter(|c| *c != col && self.pivots.contains_key(c))
                .collect();
            if hits.is_empty() {
                self.rows[r] = row;
                continue;
            }
            let mut touched: Vec<usize> = row.keys().copied().collect();
            for (c, v) in row {
                dense[c] = v;
                present[c] = true;
            }
            for c2 in hits {
                let a = std::mem::take(&mut dense[c2]);
                let other = &self.rows[self.pivots[&c2]];
                let p = other[&c2].clone();
                let g = a.gcd(&p);
                let scale_row = &p / &g;
                let scale_other = &a / &g;
                if !scale_row.is_one() {
                    for &c in &touched {
                        if !dense[c].is_zero() {
                            dense[c] *= &scale_row;
                        }
                    }
                }
                for (&c, coeff) in other {
                    if c == c2 {
                        continue;
                    }
                    if !present[c] {
                        present[c] = true;
                        touched.push(c);
                    }
                    dense[c] -= &scale_other * coeff;
                }
            }
            let mut row = BTreeMap::new();
            for &c in &touched {
                present[c] = false;
                let v = std::mem::take(&mut dense[c]);
                if !v.is_zero() {
                    row.insert(c, v);
                }
            }
            make_primitive(&mut row);
            self.rows[r] = row;
        }
    }
}

/// The quotient of the free module on the generators by the two- and
/// three-term relations, with exact coordinates for every generator.
pub(crate) struct Presentation {
    n_gens: usize,
    dim: usize,
    basis_gens: Vec<usize>,
    gen_target: Vec<Option<(usize, i8)>>,
    expr_num: Vec<Vec<BigInt>>,
    denom: BigInt,
}

impl Presentation {
    pub fn n_gens(&self) -> usize {
        self.n_gens
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Generator indices whose images form the quotient basis, ascending.
    pub fn basis_gens(&self) -> &[usize] {
        &self.basis_gens
    }

    /// Shared positive denominator of all stored coordinate rows.
    pub fn denom(&self) -> &BigInt {
        &self.denom
    }

    /// Sign and denominator-scaled coordinate row of a generator, or None
    /// when the generator is zero in the quotient.
    pub fn gen_int_row(&self, g: usize) -> Option<(i8, &[BigInt])> {
        let (slot, sign) = self.gen_target[g]?;
        Some((sign, self.expr_num[slot].as_slice()))
    }

    /// Exact quotient coordinates of a generator.
    #[cfg(test)]
    pub fn gen_coords(&self, g: usize) -> Vec<crate::exactalg::Rational> {
        use crate::exactalg::Rational;
        match self.gen_int_row(g) {
            None => vec![Rational::zero(); self.dim],
            Some((sign, row)) => row
                .iter()
                .map(|v| {
                    let signed = if sign > 0 { v.clone() } else { -v };
                    Rational::new(signed, self.denom.clone())
                })
                .collect(),
        }
    }
}

pub(crate) fn build_presentation(p1: &P1, m: usize, chi: &DirichletCharacter) -> Presentation {
    let len = p1.len();
    let n_gens = (m + 1) * len;
    let chi_unit = |lambda: u64| -> i8 {
        let v = chi.eval_u(lambda);
        debug_assert!(v != 0, "character vanished on a unit scalar");
        v as i8
    };

    let mut uf = SignedUnionFind::new(n_gens);
    for x in 0..len {
        let (y, lambda) = p1.apply(x, &SIGMA).expect("rotation preserves validity");
        let c = chi_unit(lambda);
        for i in 0..=m {
            let s = if i % 2 == 0 { c } else { -c };
            let g1 = i * len + x;
            let g2 = (m - i) * len + y;
            if g1 == g2 {
                // (1 + s) g = 0: annihilated by 2 unless the signs cancel
                if s == 1 {
                    let (root, _) = uf.find(g1);
                    uf.dead[root] = true;
                }
            } else {
                uf.impose(g1, g2, -s);
            }
        }
    }

    let mut slot_of_root: BTreeMap<usize, usize> = BTreeMap::new();
    let mut roots: Vec<usize> = Vec::new();
    for g in 0..n_gens {
        if uf.parent[g] == g && !uf.dead[g] {
            slot_of_root.insert(g, roots.len());
            roots.push(g);
        }
    }

    let tau_table = subst_table(&TAU, m);
    let tau2_table = subst_table(&TAU_SQUARED, m);
    let mut elim = SparseRref::new();
    let mut seen = vec![false; len];
    for x in 0..len {
        if seen[x] {
            continue;
        }
        let (y, lambda1) = p1.apply(x, &TAU).expect("rotation preserves validity");
        let (z, lambda2) = p1.apply(y, &TAU).expect("rotation preserves validity");
        seen[x] = true;
        seen[y] = true;
        seen[z] = true;
        let c1 = chi_unit(lambda1);
        let c12 = c1 * chi_unit(lambda2);
        for i in 0..=m {
            let mut row: BTreeMap<usize, BigInt> = BTreeMap::new();
            let mut add = |row: &mut BTreeMap<usize, BigInt>, g: usize, coeff: BigInt| {
                if coeff.is_zero() {
                    return;
                }
                if let Some((root, sign)) = uf.resolve(g) {
                    let slot = slot_of_root[&root];
                    let signed = if sign > 0 { coeff } else { -coeff };
                    let entry = row.entry(slot).or_insert_with(BigInt::zero);
                    *entry += signed;
                    if entry.is_zero() {
                        row.remove(&slot);
                    }
                }
            };
            add(&mut row, i * len + x, BigInt::one());
            for j in 0..=m {
                add(&mut row, j * len + y, &tau_table[i][j] * c1);
                add(&mut row, j * len + z, &tau2_table[i][j] * c12);
            }
            if !row.is_empty() {
                elim.insert(row);
            }
        }
    }
    let n_slots = roots.len();
    elim.finish(n_slots);

    let mut free_index: BTreeMap<usize, usize> = BTreeMap::new();
    for slot in 0..n_slots {
        if !elim.pivots.contains_key(&slot) {
            let next = free_index.len();
            free_index.insert(slot, next);
        }
    }
    let dim = free_index.len();
    let basis_gens: Vec<usize> = free_index.keys().map(|&slot| roots[slot]).collect();

    let mut denom = BigInt::one();
    for (&slot, &r) in &elim.pivots {
        denom = denom.lcm(&elim.rows[r][&slot]);
    }
    debug_assert!(denom.is_positive());
    let expr_num: Vec<Vec<BigInt>> = (0..n_slots)
        .map(|slot| {
            let mut v = vec![BigInt::zero(); dim];
            match elim.pivots.get(&slot) {
                Some(&r) => {
                    let scale = &denom / &elim.rows[r][&slot];
                    for (&col, coeff) in &elim.rows[r] {
                        if col != slot {
                            v[free_index[&col]] = -(coeff * &scale);
                        }
                    }
                }
                None => v[free_index[&slot]] = denom.clone(),
            }
            v
        })
        .collect();

    let mut gen_target = Vec::with_capacity(n_gens);
    for g in 0..n_gens {
        gen_target.push(
            uf.resolve(g)
                .map(|(root, sign)| (slot_of_root[&root], sign)),
        );
    }

    Presentation {
        n_gens,
        dim,
        basis_gens,
        gen_target,
        expr_num,
        denom,
    }
}
