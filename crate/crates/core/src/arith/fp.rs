//! Polynomials and dense matrices over a prime field F_p, p < 2^63.
//!
//! Polynomials are coefficient vectors, lowest degree first, with no
//! trailing zeros (the zero polynomial is the empty vector).

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::int::{inv_mod_u64, pow_mod_u64};

pub type FpPoly = Vec<u64>;

#[inline]
pub fn mulm(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
pub fn addm(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % p as u128) as u64
}

#[inline]
pub fn subm(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        p - (b - a)
    }
}

pub fn trim(mut a: FpPoly) -> FpPoly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub fn deg(a: &FpPoly) -> isize {
    a.len() as isize - 1
}

pub fn add(a: &FpPoly, b: &FpPoly, p: u64) -> FpPoly {
    let n = a.len().max(b.len());
    let mut r = vec![0; n];
    for (i, ri) in r.iter_mut().enumerate() {
        *ri = addm(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0), p);
    }
    trim(r)
}

pub fn sub(a: &FpPoly, b: &FpPoly, p: u64) -> FpPoly {
    let n = a.len().max(b.len());
    let mut r = vec![0; n];
    for (i, ri) in r.iter_mut().enumerate() {
        *ri = subm(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0), p);
    }
    trim(r)
}

pub fn scale(a: &FpPoly, c: u64, p: u64) -> FpPoly {
    trim(a.iter().map(|&x| mulm(x, c, p)).collect())
}

pub fn mul(a: &FpPoly, b: &FpPoly, p: u64) -> FpPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut r = vec![0u128; a.len() + b.len() - 1];
    let pp = p as u128;
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            r[i + j] = (r[i + j] + x as u128 * y as u128) % pp;
        }
    }
    trim(r.into_iter().map(|v| v as u64).collect())
}

pub fn divrem(a: &FpPoly, b: &FpPoly, p: u64) -> (FpPoly, FpPoly) {
    assert!(!b.is_empty(), "division by zero polynomial");
    let mut r = a.clone();
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let inv = inv_mod_u64(*b.last().unwrap(), p);
    let mut q = vec![0u64; r.len() - b.len() + 1];
    for i in (0..q.len()).rev() {
        let c = mulm(r[i + b.len() - 1], inv, p);
        q[i] = c;
        if c != 0 {
            for (j, &bj) in b.iter().enumerate() {
                r[i + j] = subm(r[i + j], mulm(c, bj, p), p);
            }
        }
    }
    r.truncate(b.len() - 1);
    (trim(q), trim(r))
}

pub fn rem(a: &FpPoly, b: &FpPoly, p: u64) -> FpPoly {
    divrem(a, b, p).1
}

pub fn monic(a: &FpPoly, p: u64) -> FpPoly {
    match a.last() {
        None => Vec::new(),
        Some(&l) => scale(a, inv_mod_u64(l, p), p),
    }
}

pub fn gcd(a: &FpPoly, b: &FpPoly, p: u64) -> FpPoly {
    let (mut x, mut y) = (a.clone(), b.clone());
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    monic(&x, p)
}

/// Returns (g, s, t) with s*a + t*b = g monic.
pub fn xgcd(a: &FpPoly, b: &FpPoly, p: u64) -> (FpPoly, FpPoly, FpPoly) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (vec![1u64], Vec::new());
    let (mut t0, mut t1) = (Vec::new(), vec![1u64]);
    while !r1.is_empty() {
        let (q, r) = divrem(&r0, &r1, p);
        let s2 = sub(&s0, &mul(&q, &s1, p), p);
        let t2 = sub(&t0, &mul(&q, &t1, p), p);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s2;
        t0 = t1;
        t1 = t2;
    }
    if r0.is_empty() {
        return (r0, s0, t0);
    }
    let inv = inv_mod_u64(*r0.last().unwrap(), p);
    (scale(&r0, inv, p), scale(&s0, inv, p), scale(&t0, inv, p))
}

pub fn mulmod(a: &FpPoly, b: &FpPoly, m: &FpPoly, p: u64) -> FpPoly {
    rem(&mul(a, b, p), m, p)
}

/// a^e mod m with e given as little-endian u64 limbs.
pub fn powmod_limbs(a: &FpPoly, e: &[u64], m: &FpPoly, p: u64) -> FpPoly {
    let mut result = rem(&vec![1], m, p);
    let base = rem(a, m, p);
    for &limb in e.iter().rev() {
        for bit in (0..64).rev() {
            result = mulmod(&result, &result, m, p);
            if (limb >> bit) & 1 == 1 {
                result = mulmod(&result, &base, m, p);
            }
        }
    }
    result
}

pub fn powmod(a: &FpPoly, e: u128, m: &FpPoly, p: u64) -> FpPoly {
    powmod_limbs(a, &[e as u64, (e >> 64) as u64], m, p)
}

pub fn deriv(a: &FpPoly, p: u64) -> FpPoly {
    if a.len() <= 1 {
        return Vec::new();
    }
    trim(
        (1..a.len())
            .map(|i| mulm(a[i], (i as u64) % p, p))
            .collect(),
    )
}

pub fn eval(a: &FpPoly, x: u64, p: u64) -> u64 {
    a.iter().rev().fold(0, |acc, &c| addm(mulm(acc, x, p), c, p))
}

/// Square-free decomposition: returns (factor, multiplicity) with monic
/// pairwise coprime square-free factors.
pub fn squarefree(a: &FpPoly, p: u64) -> Vec<(FpPoly, usize)> {
    let mut out = Vec::new();
    sqf_rec(&monic(a, p), p, 1, &mut out);
    out.sort();
    out
}

fn sqf_rec(f: &FpPoly, p: u64, mult: usize, out: &mut Vec<(FpPoly, usize)>) {
    if f.len() <= 1 {
        return;
    }
    let df = deriv(f, p);
    if df.is_empty() {
        // f = g(x^p)
        let g: FpPoly = f.iter().step_by(p as usize).cloned().collect();
        sqf_rec(&g, p, mult * p as usize, out);
        return;
    }
    let mut c = gcd(f, &df, p);
    let mut w = divrem(f, &c, p).0;
    let mut i = 1;
    while w.len() > 1 {
        let y = gcd(&w, &c, p);
        let z = divrem(&w, &y, p).0;
        if z.len() > 1 {
            out.push((z, i * mult));
        }
        i += 1;
        w = y;
        c = divrem(&c, &w, p).0;
    }
    if c.len() > 1 {
        let g: FpPoly = c.iter().step_by(p as usize).cloned().collect();
        sqf_rec(&g, p, mult * p as usize, out);
    }
}

/// Distinct-degree factorization of a monic square-free polynomial.
fn ddf(f: &FpPoly, p: u64) -> Vec<(FpPoly, usize)> {
    let mut out = Vec::new();
    let mut f = f.clone();
    let x: FpPoly = vec![0, 1];
    let mut h = x.clone();
    let mut d = 1;
    while deg(&f) >= 2 * d as isize {
        h = powmod(&h, p as u128, &f, p);
        let g = gcd(&f, &sub(&h, &x, p), p);
        if g.len() > 1 {
            f = divrem(&f, &g, p).0;
            h = rem(&h, &f, p);
            out.push((g, d));
        }
        d += 1;
    }
    if f.len() > 1 {
        let dd = deg(&f) as usize;
        out.push((f, dd));
    }
    out
}

/// Equal-degree splitting (Cantor-Zassenhaus), odd p.
fn edf(f: &FpPoly, d: usize, p: u64, rng: &mut ChaCha8Rng, out: &mut Vec<FpPoly>) {
    let n = deg(f) as usize;
    if n == d {
        out.push(monic(f, p));
        return;
    }
    // exponent (p^d - 1)/2 as u128 limbs; d is small in practice
    let e = exp_half(p, d);
    loop {
        let a: FpPoly = trim((0..n).map(|_| rng.gen_range(0..p)).collect());
        if a.len() <= 1 {
            continue;
        }
        let b = if p == 2 {
            // trace map for characteristic 2
            let mut t = a.clone();
            let mut acc = a.clone();
            for _ in 1..d {
                t = mulmod(&t, &t, f, p);
                acc = add(&acc, &t, p);
            }
            acc
        } else {
            sub(&powmod_limbs(&a, &e, f, p), &vec![1], p)
        };
        let g = gcd(f, &b, p);
        if g.len() > 1 && g.len() < f.len() {
            edf(&g, d, p, rng, out);
            edf(&divrem(f, &g, p).0, d, p, rng, out);
            return;
        }
    }
}

fn exp_half(p: u64, d: usize) -> Vec<u64> {
    use num_bigint::BigUint;
    let q = num_traits::pow(BigUint::from(p), d);
    let e: BigUint = (q - 1u32) >> 1;
    let mut limbs = e.to_u64_digits();
    if limbs.is_empty() {
        limbs.push(0);
    }
    limbs
}

/// Full factorization into monic irreducibles with multiplicities, sorted.
pub fn factor(a: &FpPoly, p: u64, rng: &mut ChaCha8Rng) -> Vec<(FpPoly, usize)> {
    let mut out = Vec::new();
    for (g, m) in squarefree(a, p) {
        for (h, d) in ddf(&g, p) {
            let mut parts = Vec::new();
            edf(&h, d, p, rng, &mut parts);
            for q in parts {
                out.push((q, m));
            }
        }
    }
    out.sort();
    out
}

pub fn is_irreducible(a: &FpPoly, p: u64) -> bool {
    let n = deg(a);
    if n < 1 {
        return false;
    }
    let sq = squarefree(a, p);
    if sq.len() != 1 || sq[0].1 != 1 {
        return false;
    }
    let parts = ddf(&monic(a, p), p);
    parts.len() == 1 && parts[0].1 as isize == n
}

// ---------------------------------------------------------------- matrices

pub type FpMat = Vec<Vec<u64>>;

/// In-place reduced row echelon form; returns pivot columns.
pub fn rref(m: &mut FpMat, p: u64) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, piv);
        let inv = inv_mod_u64(m[r][c], p);
        for x in m[r].iter_mut() {
            *x = mulm(*x, inv, p);
        }
        for i in 0..rows {
            if i != r && m[i][c] != 0 {
                let f = m[i][c];
                for j in 0..cols {
                    let t = mulm(f, m[r][j], p);
                    m[i][j] = subm(m[i][j], t, p);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &FpMat, p: u64) -> usize {
    let mut a = m.clone();
    rref(&mut a, p).len()
}

/// Basis of the right kernel {x : m x = 0}.
pub fn kernel(m: &FpMat, ncols: usize, p: u64) -> Vec<Vec<u64>> {
    let mut a = m.clone();
    let pivots = rref(&mut a, p);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0u64; ncols];
            v[f] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = subm(0, a[i][f], p);
            }
            v
        })
        .collect()
}

/// Basis of the row space (rows of the rref).
pub fn row_basis(m: &FpMat, p: u64) -> FpMat {
    let mut a = m.clone();
    let k = rref(&mut a, p).len();
    a.truncate(k);
    a
}

pub fn inverse(m: &FpMat, p: u64) -> Option<FpMat> {
    let n = m.len();
    let mut a: FpMat = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| u64::from(i == j)));
            r
        })
        .collect();
    let piv = rref(&mut a, p);
    if piv.len() < n || piv[n - 1] != n - 1 {
        return None;
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_vec(m: &FpMat, v: &[u64], p: u64) -> Vec<u64> {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(0u64, |acc, (&a, &b)| addm(acc, mulm(a, b, p), p))
        })
        .collect()
}

pub fn mat_mul(a: &FpMat, b: &FpMat, p: u64) -> FpMat {
    let n = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..n)
                .map(|j| {
                    row.iter()
                        .enumerate()
                        .fold(0u64, |acc, (k, &x)| addm(acc, mulm(x, b[k][j], p), p))
                })
                .collect()
        })
        .collect()
}

pub fn pow_u(a: u64, e: u64, p: u64) -> u64 {
    pow_mod_u64(a, e, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn factor_product_roundtrip() {
        let p = 7;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        // (x+1)^2 (x^2+1) (x+3)
        let f = mul(
            &mul(&mul(&vec![1, 1], &vec![1, 1], p), &vec![1, 0, 1], p),
            &vec![3, 1],
            p,
        );
        let fs = factor(&f, p, &mut rng);
        let mut prod = vec![1];
        for (g, m) in &fs {
            for _ in 0..*m {
                prod = mul(&prod, g, p);
            }
        }
        assert_eq!(prod, f);
        assert!(fs.contains(&(vec![1, 1], 2)));
        assert!(fs.contains(&(vec![1, 0, 1], 1)));
    }

    #[test]
    fn squarefree_in_char_p() {
        let p = 3;
        // (x^3 + 1) = (x+1)^3 over F_3
        let sq = squarefree(&vec![1, 0, 0, 1], p);
        assert_eq!(sq, vec![(vec![1, 1], 3)]);
    }

    #[test]
    fn kernel_is_annihilated() {
        let p = 5;
        let m: FpMat = vec![vec![1, 2, 3, 4], vec![2, 4, 1, 3]];
        for v in kernel(&m, 4, p) {
            assert!(mat_vec(&m, &v, p).iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn irreducibility() {
        assert!(is_irreducible(&vec![1, 0, 1], 3));
        assert!(!is_irreducible(&vec![1, 0, 1], 5));
    }
}
