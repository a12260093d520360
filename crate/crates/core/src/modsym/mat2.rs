//! 2×2 integer matrices, the polynomial action, and unimodular paths.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::arith::int::binomial;

/// (a, b; c, d) stored row-major.
pub type Mat2 = [i128; 4];

pub const IDENTITY: Mat2 = [1, 0, 0, 1];
pub const SIGMA: Mat2 = [0, -1, 1, 0];
pub const TAU: Mat2 = [0, -1, 1, -1];
pub const IOTA: Mat2 = [-1, 0, 0, 1];

pub fn mul(x: &Mat2, y: &Mat2) -> Mat2 {
    [
        x[0] * y[0] + x[1] * y[2],
        x[0] * y[1] + x[1] * y[3],
        x[2] * y[0] + x[3] * y[2],
        x[2] * y[1] + x[3] * y[3],
    ]
}

pub fn mul3(x: &Mat2, y: &Mat2, z: &Mat2) -> Mat2 {
    mul(&mul(x, y), z)
}

/// Adjugate; the inverse for determinant 1.
pub fn adj(x: &Mat2) -> Mat2 {
    [x[3], -x[1], -x[2], x[0]]
}

pub fn det(x: &Mat2) -> i128 {
    x[0] * x[3] - x[1] * x[2]
}

pub fn diag(a: i128, d: i128) -> Mat2 {
    [a, 0, 0, d]
}

/// Matrix R[out][in] of P ↦ P|m on degree-g polynomials, with
/// (P|m)(X, Y) = P(dX − cY, −bX + aY) and coefficient j on X^j Y^(g−j).
pub fn actmat(m: &Mat2, g: usize) -> Vec<Vec<BigInt>> {
    let [a, b, c, d] = m.map(BigInt::from);
    let pow = |x: &BigInt, n: usize| -> Vec<BigInt> {
        let mut v = Vec::with_capacity(n + 1);
        let mut acc = BigInt::from(1);
        for _ in 0..=n {
            v.push(acc.clone());
            acc *= x;
        }
        v
    };
    let (pd, pmc, pmb, pa) = (pow(&d, g), pow(&-&c, g), pow(&-&b, g), pow(&a, g));
    let binom: Vec<Vec<BigInt>> = (0..=g).map(|n| (0..=n).map(|s| binomial(n as u64, s as u64)).collect()).collect();
    let mut r = vec![vec![BigInt::zero(); g + 1]; g + 1];
    for j in 0..=g {
        // (dX − cY)^j: coefficient of X^s Y^(j−s)
        let p1: Vec<BigInt> = (0..=j).map(|s| &binom[j][s] * &pd[s] * &pmc[j - s]).collect();
        // (−bX + aY)^(g−j)
        let p2: Vec<BigInt> = (0..=g - j).map(|s| &binom[g - j][s] * &pmb[s] * &pa[g - j - s]).collect();
        for (s1, v1) in p1.iter().enumerate() {
            if v1.is_zero() {
                continue;
            }
            for (s2, v2) in p2.iter().enumerate() {
                if !v2.is_zero() {
                    r[s1 + s2][j] += v1 * v2;
                }
            }
        }
    }
    r
}

/// Determinant-one matrices h with {num/den} − {∞} = Σ h·({0} − {∞}),
/// read off the continued-fraction convergents. Each h = (a, b; c, d)
/// contributes {b/d} − {a/c}.
pub fn cf_paths(num: i128, den: i128) -> Vec<Mat2> {
    if den == 0 {
        return Vec::new();
    }
    let (mut n, mut d) = if den < 0 { (-num, -den) } else { (num, den) };
    let (mut pm2, mut qm2, mut pm1, mut qm1) = (0i128, 1i128, 1i128, 0i128);
    let mut out = Vec::new();
    loop {
        let a = n.div_euclid(d);
        let r = n.rem_euclid(d);
        let (p, q) = (a * pm1 + pm2, a * qm1 + qm2);
        let mut h = [pm1, p, qm1, q];
        if det(&h) == -1 {
            h[0] = -h[0];
            h[2] = -h[2];
        }
        debug_assert_eq!(det(&h), 1);
        out.push(h);
        (pm2, qm2, pm1, qm1) = (pm1, qm1, p, q);
        if r == 0 {
            break;
        }
        (n, d) = (d, r);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn paths_telescope() {
        for (n, d) in [(3, 25), (-7, 5), (0, 1), (13, 1), (22, 7)] {
            let hs = cf_paths(n, d);
            // consecutive paths share endpoints, starting at ∞ and ending at n/d
            assert_eq!((hs[0][0].abs(), hs[0][2]), (1, 0));
            for w in hs.windows(2) {
                // end cusp b/d of one path is the start cusp a/c of the next
                assert_eq!(w[0][1] * w[1][2], w[0][3] * w[1][0]);
            }
            let last = hs.last().unwrap();
            assert_eq!(last[1] * d, last[3] * n);
        }
    }

    proptest! {
        #[test]
        fn action_is_a_right_action(
            a in -6i128..6, b in -6i128..6, c in -6i128..6, d in -6i128..6,
            e in -6i128..6, f in -6i128..6, g2 in -6i128..6, h in -6i128..6,
        ) {
            let x = [a, b, c, d];
            let y = [e, f, g2, h];
            let g = 4;
            let lhs = actmat(&mul(&x, &y), g);
            // P|(xy) = (P|x)|y, so R(xy) = R(y) R(x)
            let rx = actmat(&x, g);
            let ry = actmat(&y, g);
            for i in 0..=g {
                for j in 0..=g {
                    let s: BigInt = (0..=g).map(|k| &ry[i][k] * &rx[k][j]).sum();
                    prop_assert_eq!(&lhs[i][j], &s);
                }
            }
        }
    }
}
