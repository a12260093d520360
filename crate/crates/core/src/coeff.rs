//! The minimal ring interface shared by rationals, number-field elements and
//! residue-field elements, so polynomial and symbol code is written once.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::int::Q;

pub trait Coeff: Clone + PartialEq + std::fmt::Debug {
    /// Zero in the same ring (fields carry context, so this needs `self`).
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale_int(&self, c: &BigInt) -> Self;
    /// Division by a nonzero integer that is invertible in the ring.
    fn div_int(&self, c: &BigInt) -> Self;
}

impl Coeff for Q {
    fn zero_like(&self) -> Self {
        Q::zero()
    }
    fn one_like(&self) -> Self {
        Q::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale_int(&self, c: &BigInt) -> Self {
        self * Q::from_integer(c.clone())
    }
    fn div_int(&self, c: &BigInt) -> Self {
        self / Q::from_integer(c.clone())
    }
}
