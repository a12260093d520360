//! Number fields Q[x]/(f) with f monic integral, and exact elements.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::factor::is_irreducible_monic;
use crate::arith::int::{q_big, Q};
use crate::arith::poly::{self, QPoly, ZPoly};
use crate::arith::qmat::QMat;
use crate::coeff::Coeff;
use crate::error::{Error, Result};

#[derive(Debug, PartialEq, Eq)]
pub struct NumberField {
    /// Monic, lowest degree first.
    pub minpoly: ZPoly,
    pub degree: usize,
}

/// Builds Q[x]/(minpoly) after checking irreducibility exactly.
pub fn make_field(minpoly: &[BigInt]) -> Result<Arc<NumberField>> {
    let f = poly::ztrim(minpoly.to_vec());
    if f.len() < 2 {
        return Err(Error::InvalidInput("minimal polynomial must be nonconstant".into()));
    }
    if !f.last().unwrap().is_one() {
        return Err(Error::InvalidInput("minimal polynomial must be monic".into()));
    }
    if !is_irreducible_monic(&f) {
        return Err(Error::ReduciblePolynomial);
    }
    Ok(Arc::new(NumberField { degree: f.len() - 1, minpoly: f }))
}

/// The field Q itself, with minimal polynomial x.
pub fn rational_field() -> Arc<NumberField> {
    Arc::new(NumberField { minpoly: vec![BigInt::zero(), BigInt::one()], degree: 1 })
}

/// An element num(θ)/den, with num reduced modulo the minimal polynomial,
/// den > 0 and gcd(content(num), den) = 1.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElem {
    pub field: Arc<NumberField>,
    num: Vec<BigInt>,
    den: BigInt,
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, c) in self.num.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let q = Q::new(c.clone(), self.den.clone());
            let mon = match i {
                0 => String::new(),
                1 => "a".to_string(),
                _ => format!("a^{i}"),
            };
            terms.push(if mon.is_empty() {
                q.to_string()
            } else if q.is_one() {
                mon
            } else if (-&q).is_one() {
                format!("-{mon}")
            } else {
                format!("{q}*{mon}")
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + ").replace("+ -", "- "))
        }
    }
}

impl FieldElem {
    fn normalized(field: Arc<NumberField>, mut num: Vec<BigInt>, mut den: BigInt) -> Self {
        let g = num.iter().fold(den.clone(), |g, c| g.gcd(c));
        if !g.is_one() && !g.is_zero() {
            for c in num.iter_mut() {
                *c /= &g;
            }
            den /= &g;
        }
        if den.is_negative() {
            den = -den;
            for c in num.iter_mut() {
                *c = -&*c;
            }
        }
        if num.iter().all(|c| c.is_zero()) {
            den = BigInt::one();
        }
        FieldElem { field, num, den }
    }

    pub fn zero(field: &Arc<NumberField>) -> Self {
        FieldElem { field: field.clone(), num: vec![BigInt::zero(); field.degree], den: BigInt::one() }
    }

    pub fn from_int(field: &Arc<NumberField>, c: &BigInt) -> Self {
        let mut num = vec![BigInt::zero(); field.degree];
        num[0] = c.clone();
        FieldElem { field: field.clone(), num, den: BigInt::one() }
    }

    pub fn from_q(field: &Arc<NumberField>, c: &Q) -> Self {
        let mut num = vec![BigInt::zero(); field.degree];
        num[0] = c.numer().clone();
        Self::normalized(field.clone(), num, c.denom().clone())
    }

    /// The class of x, i.e. the root θ of the minimal polynomial.
    pub fn generator(field: &Arc<NumberField>) -> Self {
        Self::from_poly(field, &[Q::zero(), Q::one()])
    }

    /// Reduces an arbitrary rational polynomial modulo the minimal polynomial.
    pub fn from_poly(field: &Arc<NumberField>, c: &[Q]) -> Self {
        let den = c.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
        let num: Vec<BigInt> = c.iter().map(|x| (x * q_big(den.clone())).to_integer()).collect();
        let num = reduce_mod(&field.minpoly, num);
        Self::normalized(field.clone(), num, den)
    }

    pub fn from_int_coeffs(field: &Arc<NumberField>, num: Vec<BigInt>, den: BigInt) -> Self {
        let num = reduce_mod(&field.minpoly, num);
        Self::normalized(field.clone(), num, den)
    }

    /// Coefficients in the power basis 1, θ, …, θ^(D−1).
    pub fn coeffs(&self) -> Vec<Q> {
        self.num.iter().map(|c| Q::new(c.clone(), self.den.clone())).collect()
    }

    pub fn numerator(&self) -> &[BigInt] {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn is_rational(&self) -> bool {
        self.num.iter().skip(1).all(|c| c.is_zero())
    }

    pub fn inv(&self) -> Result<Self> {
        if Coeff::is_zero(self) {
            return Err(Error::InvalidInput("inverse of zero".into()));
        }
        let a = poly::qtrim(self.coeffs());
        let f = poly::from_z(&self.field.minpoly);
        // s with s·a ≡ 1 (mod f), by the extended Euclidean algorithm over Q
        let (mut r0, mut r1) = (f, a);
        let (mut s0, mut s1): (QPoly, QPoly) = (Vec::new(), vec![Q::one()]);
        while r1.len() > 1 {
            let (q, r) = poly::qdivrem(&r0, &r1);
            let s2 = poly::qsub(&s0, &poly::qmul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
        }
        let c = r1[0].clone();
        Ok(Self::from_poly(&self.field, &poly::qscale(&s1, &(Q::one() / c))))
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = self.one_like();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn scale_q(&self, c: &Q) -> Self {
        let num = self.num.iter().map(|x| x * c.numer()).collect();
        Self::normalized(self.field.clone(), num, &self.den * c.denom())
    }

    /// Matrix of multiplication by self on the power basis (columns are images).
    pub fn mult_matrix(&self) -> QMat {
        let d = self.field.degree;
        let mut cols = Vec::with_capacity(d);
        let mut basis = vec![Q::zero(); d];
        for j in 0..d {
            basis.iter_mut().for_each(|x| *x = Q::zero());
            basis[j] = Q::one();
            cols.push(self.mul(&Self::from_poly(&self.field, &basis)).coeffs());
        }
        QMat::from_cols(&cols, d)
    }

    pub fn charpoly(&self) -> QPoly {
        self.mult_matrix().charpoly()
    }

    /// Minimal polynomial over Q: the radical of the characteristic polynomial.
    pub fn minpoly(&self) -> QPoly {
        let c = self.charpoly();
        let g = poly::qgcd(&c, &poly::qderiv(&c));
        poly::qmonic(&poly::qdivrem(&c, &g).0)
    }

    pub fn trace(&self) -> Q {
        let c = self.charpoly();
        -c[c.len() - 2].clone()
    }
}

/// Reduces an integer polynomial modulo a monic integer polynomial.
fn reduce_mod(f: &ZPoly, mut a: Vec<BigInt>) -> Vec<BigInt> {
    let d = f.len() - 1;
    while a.len() > d {
        let c = a.pop().unwrap();
        if !c.is_zero() {
            let base = a.len() - d;
            for (j, fj) in f.iter().enumerate().take(d) {
                if !fj.is_zero() {
                    a[base + j] -= &c * fj;
                }
            }
        }
    }
    a.resize(d, BigInt::zero());
    a
}

impl Coeff for FieldElem {
    fn zero_like(&self) -> Self {
        Self::zero(&self.field)
    }
    fn one_like(&self) -> Self {
        Self::from_int(&self.field, &BigInt::one())
    }
    fn is_zero(&self) -> bool {
        self.num.iter().all(|c| c.is_zero())
    }
    fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            let num = self.num.iter().zip(&o.num).map(|(a, b)| a + b).collect();
            return Self::normalized(self.field.clone(), num, self.den.clone());
        }
        let num = self
            .num
            .iter()
            .zip(&o.num)
            .map(|(a, b)| a * &o.den + b * &self.den)
            .collect();
        Self::normalized(self.field.clone(), num, &self.den * &o.den)
    }
    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    fn mul(&self, o: &Self) -> Self {
        let prod = poly::zmul(&self.num, &o.num);
        let num = reduce_mod(&self.field.minpoly, prod);
        Self::normalized(self.field.clone(), num, &self.den * &o.den)
    }
    fn neg(&self) -> Self {
        FieldElem { field: self.field.clone(), num: self.num.iter().map(|c| -c).collect(), den: self.den.clone() }
    }
    fn scale_int(&self, c: &BigInt) -> Self {
        let num = self.num.iter().map(|x| x * c).collect();
        Self::normalized(self.field.clone(), num, self.den.clone())
    }
    fn div_int(&self, c: &BigInt) -> Self {
        assert!(!c.is_zero(), "division by zero");
        Self::normalized(self.field.clone(), self.num.clone(), &self.den * c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int::q_int;

    fn z(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    #[test]
    fn rejects_reducible() {
        assert!(matches!(make_field(&z(&[-1, 0, 1])), Err(Error::ReduciblePolynomial)));
        assert_eq!(make_field(&z(&[1, 0, 1])).unwrap().degree, 2);
        assert_eq!(make_field(&z(&[0, 1])).unwrap().degree, 1);
    }

    #[test]
    fn inverse_and_minpoly() {
        let k = make_field(&z(&[-2, 0, 0, 1])).unwrap();
        let t = FieldElem::generator(&k);
        let x = t.add(&FieldElem::from_int(&k, &BigInt::from(3)));
        let y = x.inv().unwrap();
        assert_eq!(x.mul(&y), x.one_like());
        // θ^2 has minimal polynomial x^3 - 4
        let m = t.mul(&t).minpoly();
        assert_eq!(m, vec![q_int(-4), q_int(0), q_int(0), q_int(1)]);
    }

    #[test]
    fn display_is_readable() {
        let k = make_field(&z(&[1, 0, 1])).unwrap();
        let x = FieldElem::from_poly(&k, &[Q::new(1.into(), 2.into()), q_int(-1)]);
        assert_eq!(x.to_string(), "-a + 1/2");
    }
}
