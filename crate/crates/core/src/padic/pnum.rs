//! Elements of a completion K_𝔭 bundled with their embedding, so that
//! p-adic quantities can be used wherever a coefficient ring is expected.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::embedding::{LocalElement, PAdicEmbedding, ResidueElement};
use super::field::FieldElem;
use crate::arith::int::{inv_mod, pow_u64, Q};
use crate::coeff::Coeff;
use crate::error::Result;

#[derive(Clone)]
pub struct PAdic {
    pub emb: Arc<PAdicEmbedding>,
    pub x: LocalElement,
}

impl fmt::Debug for PAdic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.emb.local_to_string(&self.x))
    }
}

impl fmt::Display for PAdic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.emb.local_to_string(&self.x))
    }
}

/// Equality to the common known precision.
impl PartialEq for PAdic {
    fn eq(&self, o: &Self) -> bool {
        Coeff::is_zero(&self.sub(o))
    }
}

impl PAdic {
    pub fn from_field(emb: &Arc<PAdicEmbedding>, x: &FieldElem) -> Self {
        PAdic { emb: emb.clone(), x: emb.local(x) }
    }

    pub fn from_int(emb: &Arc<PAdicEmbedding>, c: &BigInt) -> Self {
        PAdic { emb: emb.clone(), x: emb.local_int(c) }
    }

    pub fn from_q(emb: &Arc<PAdicEmbedding>, c: &Q) -> Self {
        PAdic::from_int(emb, c.numer()).div_int(c.denom())
    }

    /// ϖ^k in the fixed convention of the embedding.
    pub fn pi_power(emb: &Arc<PAdicEmbedding>, k: i64) -> Self {
        PAdic { emb: emb.clone(), x: emb.pi_power(k) }
    }

    pub fn valuation(&self) -> Result<Q> {
        self.emb.local_valuation(&self.x)
    }

    /// Valuation, or `None` when zero to precision or not below M.
    pub fn valuation_capped(&self) -> Option<Q> {
        if Coeff::is_zero(self) {
            return None;
        }
        self.valuation().ok()
    }

    pub fn reduce(&self) -> Result<ResidueElement> {
        self.emb.local_reduce(&self.x)
    }

    pub fn inv(&self) -> Result<Self> {
        Ok(PAdic { emb: self.emb.clone(), x: self.emb.local_inverse(&self.x)? })
    }

    /// Absolute precision: the element is known modulo p^(this).
    pub fn absolute_precision(&self) -> Option<i64> {
        (!self.x.exact_zero).then_some(self.x.shift + self.x.prec as i64)
    }
}

impl Coeff for PAdic {
    fn zero_like(&self) -> Self {
        PAdic { emb: self.emb.clone(), x: self.emb.local_zero() }
    }
    fn one_like(&self) -> Self {
        PAdic::from_int(&self.emb, &BigInt::one())
    }
    /// Zero to the known precision.
    fn is_zero(&self) -> bool {
        self.x.exact_zero || self.x.prec == 0
    }
    fn add(&self, o: &Self) -> Self {
        PAdic { emb: self.emb.clone(), x: self.emb.add(&self.x, &o.x) }
    }
    fn sub(&self, o: &Self) -> Self {
        PAdic { emb: self.emb.clone(), x: self.emb.add(&self.x, &self.emb.neg(&o.x)) }
    }
    fn mul(&self, o: &Self) -> Self {
        PAdic { emb: self.emb.clone(), x: self.emb.mul(&self.x, &o.x) }
    }
    fn neg(&self) -> Self {
        PAdic { emb: self.emb.clone(), x: self.emb.neg(&self.x) }
    }
    fn scale_int(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return self.zero_like();
        }
        if c.is_one() {
            return self.clone();
        }
        PAdic { emb: self.emb.clone(), x: self.emb.scale_int(&self.x, c) }
    }
    fn div_int(&self, c: &BigInt) -> Self {
        assert!(!c.is_zero(), "division by zero");
        let p = self.emb.p;
        let pb = BigInt::from(p);
        let (mut u, mut v) = (c.clone(), 0i64);
        while (&u % &pb).is_zero() {
            u /= &pb;
            v += 1;
        }
        if self.x.exact_zero {
            return self.clone();
        }
        let m = pow_u64(p, self.x.prec.max(1));
        let ui = inv_mod(&u, &m).expect("p-prime part is invertible");
        let mut y = self.emb.scale_int(&self.x, &ui);
        y.shift -= v;
        PAdic { emb: self.emb.clone(), x: y }
    }
}
