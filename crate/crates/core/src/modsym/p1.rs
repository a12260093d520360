//! The projective line over Z/M, which indexes the right cosets of Γ₀(M)
//! in SL₂(Z) via (a, b; c, d) ↦ (c : d).

use crate::arith::int::{egcd_i128, gcd_i128};

use super::mat2::Mat2;

#[derive(Debug, Clone)]
pub struct P1List {
    pub level: u64,
    /// Normalized representatives: the lexicographically least point of
    /// each orbit under scaling by units.
    pub points: Vec<(u64, u64)>,
    /// Dense (c, d) ↦ index table; `u32::MAX` marks non-points.
    table: Vec<u32>,
    lifts: Vec<Mat2>,
}

impl P1List {
    pub fn new(level: u64) -> Self {
        assert!(level >= 1);
        if level == 1 {
            return P1List { level, points: vec![(0, 1)], table: vec![0], lifts: vec![super::mat2::IDENTITY] };
        }
        let m = level as usize;
        let units: Vec<usize> = (1..m).filter(|&u| gcd_i128(u as i128, m as i128) == 1).collect();
        let mut table = vec![u32::MAX; m * m];
        let mut points = Vec::new();
        for c in 0..m {
            for d in 0..m {
                if table[c * m + d] != u32::MAX || gcd_i128(gcd_i128(c as i128, d as i128), m as i128) != 1 {
                    continue;
                }
                let idx = points.len() as u32;
                points.push((c as u64, d as u64));
                for &u in &units {
                    table[(u * c % m) * m + u * d % m] = idx;
                }
            }
        }
        let lifts = points.iter().map(|&(c, d)| lift(c as i128, d as i128, level as i128)).collect();
        P1List { level, points, table, lifts }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of the point (c : d); panics if gcd(c, d, M) ≠ 1.
    pub fn index(&self, c: i128, d: i128) -> usize {
        if self.level == 1 {
            return 0;
        }
        let m = self.level as i128;
        let (c, d) = (c.rem_euclid(m) as usize, d.rem_euclid(m) as usize);
        let i = self.table[c * self.level as usize + d];
        assert!(i != u32::MAX, "({c} : {d}) is not a point of P1(Z/{m})");
        i as usize
    }

    /// Coset of a matrix in SL₂(Z) (or any matrix with (c, d) primitive mod M).
    pub fn coset(&self, h: &Mat2) -> usize {
        self.index(h[2], h[3])
    }

    /// A determinant-one matrix in the coset of point `i`.
    pub fn lift(&self, i: usize) -> Mat2 {
        self.lifts[i]
    }
}

/// Determinant-one (a, b; c, d') with d' ≡ d mod m, for 0 ≤ c, d < m.
fn lift(c: i128, d: i128, m: i128) -> Mat2 {
    if c == 0 {
        // the orbit of (0 : d) is that of (0 : 1)
        return super::mat2::IDENTITY;
    }
    let mut dd = d;
    while gcd_i128(c, dd) != 1 {
        dd += m;
    }
    // x·dd + y·c = 1
    let (g, x, y) = egcd_i128(dd, c);
    debug_assert_eq!(g, 1);
    let h = [x, -y, c, dd];
    debug_assert_eq!(super::mat2::det(&h), 1);
    h
}

/// [SL₂(Z) : Γ₀(M)] = M ∏_{ℓ | M} (1 + 1/ℓ).
pub fn index_formula(m: u64) -> u64 {
    let mut r = m;
    for l in crate::arith::int::prime_divisors(m) {
        r = r / l * (l + 1);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_the_index() {
        for m in [1u64, 2, 11, 12, 17, 21, 27, 33, 297] {
            assert_eq!(P1List::new(m).len() as u64, index_formula(m), "level {m}");
        }
        assert_eq!(P1List::new(11).len(), 12);
        assert_eq!(P1List::new(17).len(), 18);
    }

    #[test]
    fn lifts_land_in_their_coset() {
        for m in [11u64, 12, 45, 297] {
            let p = P1List::new(m);
            for i in 0..p.len() {
                let h = p.lift(i);
                assert_eq!(super::super::mat2::det(&h), 1);
                assert_eq!(p.coset(&h), i);
            }
        }
    }
}
