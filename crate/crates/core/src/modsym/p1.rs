//! The projective line over Z/N: canonical representatives, unit scalars,
//! and lifts to SL2(Z).
//!
//! A symbol index (c:d) requires gcd(c, d, N) = 1.  The canonical
//! representative of a point is the lexicographically smallest pair in its
//! unit-scaling orbit, and every valid pair stores the unit lambda carrying
//! the canonical pair onto it; that scalar is what picks up the character
//! twist chi(lambda) when symbols are normalized.

use std::collections::BTreeMap;

pub(crate) struct P1 {
    n: u64,
    points: Vec<(u64, u64)>,
    // every valid pair -> (index of canonical point, lambda with
    // pair = lambda * canonical)
    lookup: BTreeMap<(u64, u64), (usize, u64)>,
}

impl P1 {
    pub fn new(n: u64) -> P1 {
        assert!(n >= 1);
        let gcd3 = |a: u64, b: u64, c: u64| gcd(gcd(a, b), c);
        let units: Vec<u64> = (0..n.max(1)).filter(|&u| gcd(u, n) == 1).collect();
        let units = if n == 1 { vec![0] } else { units };
        let mut points = Vec::new();
        let mut lookup = BTreeMap::new();
        for c in 0..n.max(1) {
            for d in 0..n.max(1) {
                if n > 1 && gcd3(c, d, n) != 1 {
                    continue;
                }
                if lookup.contains_key(&(c, d)) {
                    continue;
                }
                // first lexicographic appearance of the orbit is canonical
                let idx = points.len();
                points.push((c, d));
                for &u in &units {
                    lookup.insert(((u * c) % n.max(1), (u * d) % n.max(1)), (idx, u));
                }
                // guard for n = 1 where the single orbit covers everything
                if n == 1 {
                    lookup.insert((0, 0), (0, 0));
                }
            }
        }
        P1 { n, points, lookup }
    }

    pub fn modulus(&self) -> u64 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    #[cfg(test)]
    pub fn point(&self, i: usize) -> (u64, u64) {
        self.points[i]
    }

    /// Canonical index and the unit lambda with (c, d) = lambda * canonical,
    /// or None when gcd(c, d, N) > 1.
    pub fn normalize(&self, c: u64, d: u64) -> Option<(usize, u64)> {
        self.lookup.get(&(c % self.n, d % self.n)).copied()
    }

    /// Image of point i under right multiplication by [a, b; c, d].
    pub fn apply(&self, i: usize, h: &[i64; 4]) -> Option<(usize, u64)> {
        let (u, v) = self.points[i];
        let n = self.n as i64;
        let uu = (u as i64 * h[0] + v as i64 * h[2]).rem_euclid(n) as u64;
        let vv = (u as i64 * h[1] + v as i64 * h[3]).rem_euclid(n) as u64;
        self.normalize(uu, vv)
    }

    /// A matrix [a, b; c', d'] in SL2(Z) whose bottom row reduces to the
    /// canonical representative of point i.
    pub fn lift(&self, i: usize) -> [i64; 4] {
        let (c, d) = self.points[i];
        if self.n == 1 {
            return [1, 0, 0, 1];
        }
        if c == 0 {
            debug_assert_eq!(d, 1);
            return [1, 0, 0, 1];
        }
        let c1 = c as i64;
        let mut d1 = d as i64;
        while gcd(c1 as u64, d1.unsigned_abs()) != 1 {
            d1 += self.n as i64;
            assert!(
                d1 < 4 * (self.n as i64) + d as i64,
                "no coprime lift found for ({c}:{d}) mod {}",
                self.n
            );
        }
        // a*d1 - b*c1 = 1
        let (x, y) = ext_gcd(d1, c1);
        [x, -y, c1, d1]
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// (x, y) with x*a + y*b = gcd(a, b) = 1 for the inputs used here.
fn ext_gcd(a: i64, b: i64) -> (i64, i64) {
    if b == 0 {
        (a.signum(), 0)
    } else {
        let (x, y) = ext_gcd(b, a.rem_euclid(b));
        (y, x - (a.div_euclid(b)) * y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_match_the_index_of_gamma0() {
        for (n, size) in [(1, 1), (2, 3), (3, 4), (4, 6), (9, 12), (11, 12), (27, 36), (30, 72)] {
            assert_eq!(P1::new(n).len(), size, "N = {n}");
            assert_eq!(crate::arith::psi_index(n) as usize, size);
        }
    }

    #[test]
    fn normalization_scalars_reconstruct_the_pair() {
        for n in [2u64, 4, 9, 12, 27] {
            let p1 = P1::new(n);
            for c in 0..n {
                for d in 0..n {
                    match p1.normalize(c, d) {
                        Some((idx, lambda)) => {
                            let (c0, d0) = p1.point(idx);
                            assert_eq!((lambda * c0) % n, c, "N={n} ({c},{d})");
                            assert_eq!((lambda * d0) % n, d);
                            assert_eq!(gcd(lambda, n), 1);
                        }
                        None => {
                            let g = gcd(gcd(c, d), n);
                            assert!(g > 1, "({c}:{d}) mod {n} should be valid");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn canonical_points_are_orbit_minima() {
        let p1 = P1::new(12);
        for i in 0..p1.len() {
            let (c, d) = p1.point(i);
            let (idx, lambda) = p1.normalize(c, d).unwrap();
            assert_eq!(idx, i);
            assert_eq!(lambda, 1);
        }
    }

    #[test]
    fn lifts_have_determinant_one_and_matching_bottom_row() {
        for n in [1u64, 2, 9, 11, 27, 30] {
            let p1 = P1::new(n);
            for i in 0..p1.len() {
                let [a, b, c, d] = p1.lift(i);
                assert_eq!(a * d - b * c, 1, "det at point {i} mod {n}");
                let (pc, pd) = p1.point(i);
                assert_eq!(c.rem_euclid(n as i64) as u64, pc % n);
                assert_eq!(d.rem_euclid(n as i64) as u64, pd % n);
            }
        }
    }

    #[test]
    fn apply_respects_scaling_classes() {
        // acting by a matrix then normalizing must be independent of which
        // orbit member we started from
        let p1 = P1::new(9);
        let h = [2i64, 1, 3, 2];
        for i in 0..p1.len() {
            let (c, d) = p1.point(i);
            for u in (1..9u64).filter(|&u| gcd(u, 9) == 1) {
                let scaled_c = (u * c) % 9;
                let scaled_d = (u * d) % 9;
                let direct = p1.apply(i, &h);
                let n = 9i64;
                let uu = (scaled_c as i64 * h[0] + scaled_d as i64 * h[2]).rem_euclid(n) as u64;
                let vv = (scaled_c as i64 * h[1] + scaled_d as i64 * h[3]).rem_euclid(n) as u64;
                let from_scaled = p1.normalize(uu, vv);
                assert_eq!(direct.map(|(idx, _)| idx), from_scaled.map(|(idx, _)| idx));
            }
        }
    }
}
