//! Scalar helpers on machine and big integers: gcds, primes, p-adic orders
//! and residues of rationals modulo prime powers.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_big(n: BigInt) -> Q {
    Q::from_integer(n)
}

pub fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Returns (g, x, y) with a*x + b*y = g = gcd(a, b) >= 0.
pub fn egcd_i128(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn primes_upto(n: u64) -> Vec<u64> {
    (2..=n).filter(|&k| is_prime(k)).collect()
}

/// Distinct prime divisors in increasing order.
pub fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn pow_u64(p: u64, k: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), k as usize)
}

/// p-adic order of a nonzero integer; `None` for zero.
pub fn vp_int(n: &BigInt, p: u64) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let mut v = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return Some(v);
        }
        m = q;
        v += 1;
    }
}

pub fn vp_rat(x: &Q, p: u64) -> Option<i64> {
    let a = vp_int(x.numer(), p)?;
    let b = vp_int(x.denom(), p).unwrap_or(0);
    Some(a as i64 - b as i64)
}

/// Symmetric-free canonical residue in [0, m).
pub fn modp(a: &BigInt, m: &BigInt) -> BigInt {
    let r = a % m;
    if r.sign() == Sign::Minus {
        r + m
    } else {
        r
    }
}

/// Symmetric residue in (-m/2, m/2].
pub fn mods(a: &BigInt, m: &BigInt) -> BigInt {
    let r = modp(a, m);
    if &r * 2 > *m {
        r - m
    } else {
        r
    }
}

pub fn inv_mod(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if !e.gcd.is_one() && e.gcd != BigInt::from(-1) {
        return None;
    }
    let x = if e.gcd.is_negative() { -e.x } else { e.x };
    Some(modp(&x, m))
}

/// Splits a rational as p^s * u with u a p-unit-denominator rational and
/// returns (s, u mod p^k). Zero maps to `None`.
pub fn rat_to_padic(x: &Q, p: u64, k: u32) -> Option<(i64, BigInt)> {
    if x.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let mut num = x.numer().clone();
    let mut den = x.denom().clone();
    let mut s = 0i64;
    while (&num % &pb).is_zero() {
        num /= &pb;
        s += 1;
    }
    while (&den % &pb).is_zero() {
        den /= &pb;
        s -= 1;
    }
    let m = pow_u64(p, k);
    let di = inv_mod(&den, &m).expect("denominator is a p-unit");
    Some((s, modp(&(num * di), &m)))
}

/// Residue of a p-integral rational modulo p^k (with scaling by p^shift
/// applied first, shift >= -v_p(x) required).
pub fn rat_mod(x: &Q, p: u64, k: u32) -> Option<BigInt> {
    if x.is_zero() {
        return Some(BigInt::zero());
    }
    let (s, u) = rat_to_padic(x, p, k)?;
    if s < 0 {
        return None;
    }
    let m = pow_u64(p, k);
    Some(modp(&(u * pow_u64(p, s as u32)), &m))
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

/// Binomial coefficient reduced mod a small prime via Lucas' theorem.
pub fn binomial_mod_p(mut n: u64, mut k: u64, p: u64) -> u64 {
    let mut r = 1u64;
    while n > 0 || k > 0 {
        let (a, b) = (n % p, k % p);
        if b > a {
            return 0;
        }
        r = r * (binomial(a, b) % BigInt::from(p)).to_u64().unwrap() % p;
        n /= p;
        k /= p;
    }
    r
}

pub fn lcm_big(a: &BigInt, b: &BigInt) -> BigInt {
    a.lcm(b)
}

pub fn pow_mod_u64(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u128;
    let mut bb = (b % m) as u128;
    let mm = m as u128;
    while e > 0 {
        if e & 1 == 1 {
            r = r * bb % mm;
        }
        bb = bb * bb % mm;
        e >>= 1;
    }
    b = r as u64;
    b
}

pub fn inv_mod_u64(a: u64, p: u64) -> u64 {
    let (g, x, _) = egcd_i128(a as i128, p as i128);
    assert_eq!(g, 1, "{a} not invertible mod {p}");
    x.rem_euclid(p as i128) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn padic_parts() {
        let x = Q::new(BigInt::from(50), BigInt::from(3));
        assert_eq!(vp_rat(&x, 5), Some(2));
        assert_eq!(vp_rat(&x, 3), Some(-1));
        let (s, u) = rat_to_padic(&x, 5, 3).unwrap();
        assert_eq!(s, 2);
        // 2/3 mod 125
        assert_eq!((u * 3) % 125, BigInt::from(2));
    }

    #[test]
    fn lucas_matches_direct() {
        for n in 0..40u64 {
            for k in 0..=n {
                let d = (binomial(n, k) % 7u32).to_u64().unwrap();
                assert_eq!(binomial_mod_p(n, k, 7), d);
            }
        }
    }

    #[test]
    fn egcd_identity() {
        for (a, b) in [(240i128, 46i128), (-7, 3), (0, 5), (5, 0)] {
            let (g, x, y) = egcd_i128(a, b);
            assert_eq!(a * x + b * y, g);
            assert_eq!(g, gcd_i128(a, b));
        }
    }
}
