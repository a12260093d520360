//! Factorization of monic integer polynomials: square-free decomposition,
//! modular factorization, quadratic Hensel lifting and subset recombination.
//!
//! All randomness comes from a fixed-seed generator so the factor list is
//! reproducible.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::fp::{self, FpPoly};
use super::int::{is_prime, modp, mods};
use super::poly::{squarefree_decomposition, zdiv_exact, zmax_abs, zmod, ZPoly};

const FACTOR_SEED: u64 = 0x006d_746c_6162;

/// Irreducible monic factors with multiplicities, sorted by (degree, coefficients).
pub fn factor_monic(f: &ZPoly) -> Vec<(ZPoly, usize)> {
    assert!(
        f.last().is_some_and(|c| c.is_one()),
        "factor_monic expects a monic polynomial"
    );
    let mut out = Vec::new();
    for (g, m) in squarefree_decomposition(f) {
        for h in factor_squarefree(&g) {
            out.push((h, m));
        }
    }
    out.sort_by(|a, b| (a.0.len(), &a.0, a.1).cmp(&(b.0.len(), &b.0, b.1)));
    out
}

pub fn is_irreducible_monic(f: &ZPoly) -> bool {
    let fs = factor_monic(f);
    fs.len() == 1 && fs[0].1 == 1
}

fn factor_squarefree(f: &ZPoly) -> Vec<ZPoly> {
    let n = f.len() - 1;
    if n <= 1 {
        return vec![f.clone()];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(FACTOR_SEED);
    // pick the prime giving the fewest modular factors among a few candidates
    let mut best: Option<(u64, Vec<FpPoly>)> = None;
    let mut q = 3u64;
    let mut seen = 0;
    while seen < 8 {
        q += 2;
        if !is_prime(q) {
            continue;
        }
        let r = zmod(f, q);
        if r.len() != f.len() {
            continue;
        }
        if fp::gcd(&r, &fp::deriv(&r, q), q).len() != 1 {
            continue;
        }
        seen += 1;
        let facs: Vec<FpPoly> = fp::factor(&r, q, &mut rng)
            .into_iter()
            .map(|(g, _)| g)
            .collect();
        if best.as_ref().is_none_or(|(_, b)| facs.len() < b.len()) {
            best = Some((q, facs));
        }
        if best.as_ref().unwrap().1.len() == 1 {
            break;
        }
    }
    let (q, facs) = best.expect("some prime keeps the polynomial square-free");
    if facs.len() == 1 {
        return vec![f.clone()];
    }
    // coefficient bound for any monic factor: 2^n * (n+1) * |f|_inf
    let bound = (BigInt::one() << n) * BigInt::from(n + 1) * zmax_abs(f);
    let qb = BigInt::from(q);
    let mut a = 1u32;
    let mut m = qb.clone();
    while m <= &bound * 2 {
        m *= &qb;
        a += 1;
    }
    let lifted = hensel_multi(f, &facs, q, a);
    recombine(f, lifted, &m)
}

fn to_z(a: &FpPoly) -> ZPoly {
    a.iter().map(|&c| BigInt::from(c)).collect()
}

fn zreduce(a: &ZPoly, m: &BigInt) -> ZPoly {
    super::poly::ztrim(a.iter().map(|c| modp(c, m)).collect())
}

fn zadd_m(a: &ZPoly, b: &ZPoly, m: &BigInt) -> ZPoly {
    let n = a.len().max(b.len());
    let z = BigInt::zero();
    zreduce(
        &(0..n)
            .map(|i| a.get(i).unwrap_or(&z) + b.get(i).unwrap_or(&z))
            .collect(),
        m,
    )
}

fn zsub_m(a: &ZPoly, b: &ZPoly, m: &BigInt) -> ZPoly {
    let n = a.len().max(b.len());
    let z = BigInt::zero();
    zreduce(
        &(0..n)
            .map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z))
            .collect(),
        m,
    )
}

fn zmul_m(a: &ZPoly, b: &ZPoly, m: &BigInt) -> ZPoly {
    zreduce(&super::poly::zmul(a, b), m)
}

/// Division by a monic polynomial modulo m.
fn zdivrem_m(a: &ZPoly, b: &ZPoly, m: &BigInt) -> (ZPoly, ZPoly) {
    let mut r = zreduce(a, m);
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![BigInt::zero(); r.len() - b.len() + 1];
    for i in (0..q.len()).rev() {
        let c = modp(&r[i + b.len() - 1], m);
        if !c.is_zero() {
            for (j, bj) in b.iter().enumerate() {
                r[i + j] = modp(&(&r[i + j] - &c * bj), m);
            }
        }
        q[i] = c;
    }
    r.truncate(b.len() - 1);
    (zreduce(&q, m), zreduce(&r, m))
}

/// Lifts f = g h (mod q), g and h monic and coprime mod q, to mod q^a.
fn hensel_pair(f: &ZPoly, g: &FpPoly, h: &FpPoly, q: u64, a: u32) -> (ZPoly, ZPoly) {
    let (d, s, t) = fp::xgcd(g, h, q);
    debug_assert_eq!(d, vec![1]);
    let (mut g, mut h, mut s, mut t) = (to_z(g), to_z(h), to_z(&s), to_z(&t));
    let qb = BigInt::from(q);
    let target = num_traits::pow(qb.clone(), a as usize);
    let mut m = qb;
    while m < target {
        let m2 = &m * &m;
        let e = zsub_m(f, &zmul_m(&g, &h, &m2), &m2);
        let (qq, r) = zdivrem_m(&zmul_m(&s, &e, &m2), &h, &m2);
        let g2 = zadd_m(&zadd_m(&g, &zmul_m(&t, &e, &m2), &m2), &zmul_m(&qq, &g, &m2), &m2);
        let h2 = zadd_m(&h, &r, &m2);
        let b = zsub_m(
            &zadd_m(&zmul_m(&s, &g2, &m2), &zmul_m(&t, &h2, &m2), &m2),
            &vec![BigInt::one()],
            &m2,
        );
        let (c, dd) = zdivrem_m(&zmul_m(&s, &b, &m2), &h2, &m2);
        s = zsub_m(&s, &dd, &m2);
        t = zsub_m(&zsub_m(&t, &zmul_m(&t, &b, &m2), &m2), &zmul_m(&c, &g2, &m2), &m2);
        g = g2;
        h = h2;
        m = m2;
    }
    (zreduce(&g, &target), zreduce(&h, &target))
}

fn fp_product(fs: &[FpPoly], q: u64) -> FpPoly {
    fs.iter().fold(vec![1u64], |acc, g| fp::mul(&acc, g, q))
}

fn hensel_multi(f: &ZPoly, facs: &[FpPoly], q: u64, a: u32) -> Vec<ZPoly> {
    if facs.len() == 1 {
        let m = num_traits::pow(BigInt::from(q), a as usize);
        return vec![zreduce(f, &m)];
    }
    let mid = facs.len() / 2;
    let g = fp_product(&facs[..mid], q);
    let h = fp_product(&facs[mid..], q);
    let (gl, hl) = hensel_pair(f, &g, &h, q, a);
    let mut out = hensel_multi(&gl, &facs[..mid], q, a);
    out.extend(hensel_multi(&hl, &facs[mid..], q, a));
    out
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(idx.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 && idx[0] == n - k {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn recombine(f: &ZPoly, mut lifted: Vec<ZPoly>, m: &BigInt) -> Vec<ZPoly> {
    let mut out = Vec::new();
    let mut rest = f.clone();
    let mut s = 1;
    while 2 * s <= lifted.len() {
        let mut found = false;
        for comb in combinations(lifted.len(), s) {
            let mut g = vec![BigInt::one()];
            for &i in &comb {
                g = zmul_m(&g, &lifted[i], m);
            }
            let g: ZPoly = g.iter().map(|c| mods(c, m)).collect();
            if let Some(qt) = zdiv_exact(&rest, &g) {
                out.push(g);
                rest = qt;
                for &i in comb.iter().rev() {
                    lifted.remove(i);
                }
                found = true;
                break;
            }
        }
        if !found {
            s += 1;
        }
    }
    if rest.len() > 1 {
        out.push(rest);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::poly::zmul;

    fn z(v: &[i64]) -> ZPoly {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    #[test]
    fn swinnerton_dyer_like_is_irreducible() {
        // x^4 - 10x^2 + 1 splits modulo every prime but is irreducible over Q
        assert!(is_irreducible_monic(&z(&[1, 0, -10, 0, 1])));
    }

    #[test]
    fn product_of_known_factors() {
        let a = z(&[-2, 0, 1]);
        let b = z(&[1, 1, 1]);
        let c = z(&[-528, 1]);
        let f = zmul(&zmul(&a, &b), &zmul(&c, &c));
        let fs = factor_monic(&f);
        assert_eq!(fs, vec![(c.clone(), 2), (a, 1), (b, 1)]);
    }

    #[test]
    fn combinations_count() {
        assert_eq!(combinations(5, 2).len(), 10);
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
    }
}
