//! Square and rectangular matrices over Z/p^k, entries kept in [0, p^k).

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::int::{inv_mod, modp, pow_u64, vp_int};

pub type ZpMat = Vec<Vec<BigInt>>;

/// p-adic order of det(a) when it is below k; `None` if det = 0 mod p^k.
///
/// Full pivoting on the entry of least valuation keeps every row operation
/// exact modulo p^k.
pub fn det_val(a: &ZpMat, p: u64, k: u32) -> Option<u32> {
    let n = a.len();
    let m = pow_u64(p, k);
    let pb = BigInt::from(p);
    let mut a: ZpMat = a.iter().map(|r| r.iter().map(|x| modp(x, &m)).collect()).collect();
    let mut total = 0u32;
    for c in 0..n {
        let mut best: Option<(u32, usize, usize)> = None;
        for i in c..n {
            for j in c..n {
                if let Some(v) = vp_int(&a[i][j], p) {
                    if best.is_none_or(|(bv, _, _)| v < bv) {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let (v, bi, bj) = best?;
        total += v;
        if total >= k {
            return None;
        }
        a.swap(c, bi);
        for row in a.iter_mut() {
            row.swap(c, bj);
        }
        let pv = num_traits::pow(pb.clone(), v as usize);
        let unit = &a[c][c] / &pv;
        let uinv = inv_mod(&unit, &m).expect("pivot cofactor is a unit");
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = modp(&(&a[i][c] / &pv * &uinv), &m);
            for j in c..n {
                let t = &f * &a[c][j];
                a[i][j] = modp(&(&a[i][j] - t), &m);
            }
        }
    }
    Some(total)
}

/// Inverse of a matrix whose determinant is a p-adic unit.
pub fn inverse(a: &ZpMat, p: u64, k: u32) -> Option<ZpMat> {
    let n = a.len();
    let m = pow_u64(p, k);
    let pb = BigInt::from(p);
    let mut w: ZpMat = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row: Vec<BigInt> = r.iter().map(|x| modp(x, &m)).collect();
            row.extend((0..n).map(|j| BigInt::from(u8::from(i == j))));
            row
        })
        .collect();
    for c in 0..n {
        let piv = (c..n).find(|&i| !(&w[i][c] % &pb).is_zero())?;
        w.swap(c, piv);
        let inv = inv_mod(&w[c][c], &m)?;
        for x in w[c].iter_mut() {
            *x = modp(&(&*x * &inv), &m);
        }
        for i in 0..n {
            if i == c || w[i][c].is_zero() {
                continue;
            }
            let f = w[i][c].clone();
            for j in 0..2 * n {
                let t = &f * &w[c][j];
                w[i][j] = modp(&(&w[i][j] - t), &m);
            }
        }
    }
    Some(w.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_vec(a: &ZpMat, v: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    a.iter()
        .map(|row| {
            let mut s = BigInt::zero();
            for (x, y) in row.iter().zip(v) {
                if !x.is_zero() && !y.is_zero() {
                    s += x * y;
                }
            }
            modp(&s, m)
        })
        .collect()
}

pub fn mat_mul(a: &ZpMat, b: &ZpMat, m: &BigInt) -> ZpMat {
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut s = BigInt::zero();
                    for (kk, x) in row.iter().enumerate() {
                        if !x.is_zero() {
                            s += x * &b[kk][j];
                        }
                    }
                    modp(&s, m)
                })
                .collect()
        })
        .collect()
}

pub fn reduce_p(a: &ZpMat, p: u64) -> Vec<Vec<u64>> {
    let pb = BigInt::from(p);
    a.iter()
        .map(|r| r.iter().map(|x| modp(x, &pb).to_u64().unwrap()).collect())
        .collect()
}

/// Characteristic polynomial over Z/m by the division-free Berkowitz
/// algorithm; monic, lowest degree first.
pub fn charpoly_berkowitz(a: &ZpMat, m: &BigInt) -> Vec<BigInt> {
    let n = a.len();
    // c holds coefficients highest degree first
    let mut c: Vec<BigInt> = vec![BigInt::from(1)];
    for r in 0..n {
        // submatrix A_r = a[0..r][0..r], column R = a[0..r][r], row S = a[r][0..r]
        let arr = a[r][r].clone();
        let col: Vec<BigInt> = (0..r).map(|i| a[i][r].clone()).collect();
        let row: Vec<BigInt> = (0..r).map(|j| a[r][j].clone()).collect();
        // Toeplitz first column: 1, -a_rr, -S R, -S A R, ...
        let mut t = vec![BigInt::from(1), modp(&(-&arr), m)];
        let mut v = col.clone();
        for _ in 0..r {
            let s: BigInt = row.iter().zip(&v).map(|(x, y)| x * y).sum();
            t.push(modp(&(-s), m));
            let sub: ZpMat = (0..r).map(|i| a[i][..r].to_vec()).collect();
            v = mat_vec(&sub, &v, m);
        }
        let mut nc = vec![BigInt::zero(); r + 2];
        for (i, ci) in c.iter().enumerate() {
            for (j, tj) in t.iter().enumerate().take(r + 2 - i) {
                nc[i + j] += ci * tj;
            }
        }
        c = nc.into_iter().map(|x| modp(&x, m)).collect();
    }
    c.reverse();
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mk(rows: &[&[i64]]) -> ZpMat {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn det_valuation() {
        // det = 3*9 - 0 = 27
        assert_eq!(det_val(&mk(&[&[3, 1], &[0, 9]]), 3, 10), Some(3));
        assert_eq!(det_val(&mk(&[&[3, 1], &[0, 9]]), 3, 3), None);
        // det = 2*5 - 3*3 = 1
        assert_eq!(det_val(&mk(&[&[2, 3], &[3, 5]]), 3, 5), Some(0));
    }

    #[test]
    fn berkowitz_small() {
        let m = BigInt::from(1_000_003);
        // [[1,2],[3,4]] -> x^2 - 5x - 2
        let c = charpoly_berkowitz(&mk(&[&[1, 2], &[3, 4]]), &m);
        assert_eq!(c, vec![modp(&BigInt::from(-2), &m), modp(&BigInt::from(-5), &m), BigInt::from(1)]);
    }

    #[test]
    fn inverse_roundtrip() {
        let m = pow_u64(5, 6);
        let a = mk(&[&[2, 5, 1], &[1, 1, 0], &[3, 0, 7]]);
        let inv = inverse(&a, 5, 6).unwrap();
        let id = mat_mul(&a, &inv, &m);
        for (i, r) in id.iter().enumerate() {
            for (j, x) in r.iter().enumerate() {
                assert_eq!(*x, BigInt::from(u8::from(i == j)));
            }
        }
    }
}
