//! Dense univariate polynomials over Q and Z, lowest degree first, trimmed.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::fp::{self, FpPoly};
use super::int::{q_big, Q};

pub type QPoly = Vec<Q>;
pub type ZPoly = Vec<BigInt>;

pub fn qtrim(mut a: QPoly) -> QPoly {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    a
}

pub fn ztrim(mut a: ZPoly) -> ZPoly {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    a
}

pub fn qdeg(a: &QPoly) -> isize {
    a.len() as isize - 1
}

pub fn qadd(a: &QPoly, b: &QPoly) -> QPoly {
    let n = a.len().max(b.len());
    let z = Q::zero();
    qtrim((0..n).map(|i| a.get(i).unwrap_or(&z) + b.get(i).unwrap_or(&z)).collect())
}

pub fn qsub(a: &QPoly, b: &QPoly) -> QPoly {
    let n = a.len().max(b.len());
    let z = Q::zero();
    qtrim((0..n).map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z)).collect())
}

pub fn qscale(a: &QPoly, c: &Q) -> QPoly {
    qtrim(a.iter().map(|x| x * c).collect())
}

pub fn qmul(a: &QPoly, b: &QPoly) -> QPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut r = vec![Q::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            r[i + j] += x * y;
        }
    }
    qtrim(r)
}

pub fn qdivrem(a: &QPoly, b: &QPoly) -> (QPoly, QPoly) {
    assert!(!b.is_empty(), "division by zero polynomial");
    let mut r = a.clone();
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let lead = b.last().unwrap().clone();
    let mut q = vec![Q::zero(); r.len() - b.len() + 1];
    for i in (0..q.len()).rev() {
        let c = &r[i + b.len() - 1] / &lead;
        if !c.is_zero() {
            for (j, bj) in b.iter().enumerate() {
                r[i + j] -= &c * bj;
            }
        }
        q[i] = c;
    }
    r.truncate(b.len() - 1);
    (qtrim(q), qtrim(r))
}

pub fn qmonic(a: &QPoly) -> QPoly {
    match a.last() {
        None => Vec::new(),
        Some(l) => {
            let l = l.clone();
            a.iter().map(|c| c / &l).collect()
        }
    }
}

pub fn qgcd(a: &QPoly, b: &QPoly) -> QPoly {
    let (mut x, mut y) = (qmonic(a), qmonic(b));
    while !y.is_empty() {
        let r = qdivrem(&x, &y).1;
        x = y;
        y = qmonic(&r);
    }
    qmonic(&x)
}

pub fn qderiv(a: &QPoly) -> QPoly {
    qtrim(
        a.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * Q::from_integer(BigInt::from(i)))
            .collect(),
    )
}

pub fn qeval(a: &QPoly, x: &Q) -> Q {
    a.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
}

pub fn from_z(a: &ZPoly) -> QPoly {
    qtrim(a.iter().map(|c| q_big(c.clone())).collect())
}

/// Clears denominators and content; the result has positive leading term.
pub fn primitive_part(a: &QPoly) -> ZPoly {
    if a.is_empty() {
        return Vec::new();
    }
    let den = a.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let mut z: ZPoly = a.iter().map(|c| (c * q_big(den.clone())).to_integer()).collect();
    let cont = z.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    if !cont.is_zero() {
        for c in z.iter_mut() {
            *c /= &cont;
        }
    }
    if z.last().unwrap().is_negative() {
        for c in z.iter_mut() {
            *c = -c.clone();
        }
    }
    ztrim(z)
}

/// Monic integer polynomial from a monic rational polynomial with
/// integral coefficients; `None` if some coefficient is not integral.
pub fn monic_integral(a: &QPoly) -> Option<ZPoly> {
    let m = qmonic(a);
    m.iter()
        .map(|c| c.is_integer().then(|| c.to_integer()))
        .collect()
}

pub fn zmul(a: &ZPoly, b: &ZPoly) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut r = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            r[i + j] += x * y;
        }
    }
    ztrim(r)
}

/// Exact division over Z; `None` if b does not divide a.
pub fn zdiv_exact(a: &ZPoly, b: &ZPoly) -> Option<ZPoly> {
    let mut r = a.clone();
    if r.len() < b.len() {
        return if r.is_empty() { Some(Vec::new()) } else { None };
    }
    let lead = b.last().unwrap();
    let mut q = vec![BigInt::zero(); r.len() - b.len() + 1];
    for i in (0..q.len()).rev() {
        let (c, rr) = r[i + b.len() - 1].div_rem(lead);
        if !rr.is_zero() {
            return None;
        }
        if !c.is_zero() {
            for (j, bj) in b.iter().enumerate() {
                r[i + j] -= &c * bj;
            }
        }
        q[i] = c;
    }
    if r.iter().any(|c| !c.is_zero()) {
        return None;
    }
    Some(ztrim(q))
}

pub fn zmod(a: &ZPoly, p: u64) -> FpPoly {
    let pb = BigInt::from(p);
    fp::trim(
        a.iter()
            .map(|c| super::int::modp(c, &pb).to_u64().unwrap())
            .collect(),
    )
}

pub fn zmax_abs(a: &ZPoly) -> BigInt {
    a.iter().map(|c| c.abs()).max().unwrap_or_default()
}

/// Square-freeness over Q, decided by reduction modulo primes near 2^31.
/// A single prime at which the reduction stays square-free of full degree
/// certifies square-freeness; `false` means no such prime was found among
/// the first few, which callers treat as "not usable".
pub fn probably_squarefree(a: &ZPoly) -> bool {
    if a.len() <= 2 {
        return true;
    }
    let mut tried = 0;
    let mut q: u64 = (1 << 31) - 1;
    while tried < 6 {
        if super::int::is_prime(q) {
            let r = zmod(a, q);
            if r.len() == a.len() {
                tried += 1;
                let d = fp::deriv(&r, q);
                if fp::gcd(&r, &d, q).len() == 1 {
                    return true;
                }
            }
        }
        q -= 2;
    }
    false
}

/// Square-free decomposition over Q of a monic integer polynomial:
/// returns (monic integer factor, multiplicity).
pub fn squarefree_decomposition(a: &ZPoly) -> Vec<(ZPoly, usize)> {
    if probably_squarefree(a) {
        return vec![(a.clone(), 1)];
    }
    let f = from_z(a);
    let mut out = Vec::new();
    let mut c = qgcd(&f, &qderiv(&f));
    let mut w = qdivrem(&f, &c).0;
    let mut i = 1;
    while w.len() > 1 {
        let y = qgcd(&w, &c);
        let z = qdivrem(&w, &y).0;
        if z.len() > 1 {
            out.push((monic_integral(&z).expect("monic factor of monic integer poly"), i));
        }
        i += 1;
        w = y;
        c = qdivrem(&c, &w).0;
    }
    out
}

pub fn pretty(a: &ZPoly) -> String {
    if a.is_empty() {
        return "0".into();
    }
    let mut terms = Vec::new();
    for (i, c) in a.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let mon = match i {
            0 => String::new(),
            1 => "x".into(),
            _ => format!("x^{i}"),
        };
        let coef = if c.is_one() && i > 0 {
            String::new()
        } else if *c == BigInt::from(-1) && i > 0 {
            "-".into()
        } else {
            c.to_string()
        };
        terms.push(format!("{coef}{mon}"));
    }
    terms.join(" + ").replace("+ -", "- ")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(v: &[i64]) -> ZPoly {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    #[test]
    fn sqf_decomposition() {
        // (x-1)^2 (x+2)
        let f = zmul(&zmul(&z(&[-1, 1]), &z(&[-1, 1])), &z(&[2, 1]));
        let d = squarefree_decomposition(&f);
        assert_eq!(d, vec![(z(&[2, 1]), 1), (z(&[-1, 1]), 2)]);
    }

    #[test]
    fn exact_division() {
        let f = zmul(&z(&[3, 1]), &z(&[1, 0, 1]));
        assert_eq!(zdiv_exact(&f, &z(&[3, 1])), Some(z(&[1, 0, 1])));
        assert_eq!(zdiv_exact(&f, &z(&[2, 1])), None);
    }

    #[test]
    fn pretty_print() {
        assert_eq!(pretty(&z(&[-1, 0, 1])), "x^2 - 1");
    }
}
