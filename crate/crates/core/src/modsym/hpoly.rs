//! Homogeneous polynomials of degree g in X, Y over any coefficient ring.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::coeff::Coeff;

use super::mat2::{actmat, Mat2};

/// Coefficient j multiplies X^j Y^(g−j). Always g + 1 coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct HomogeneousPoly<C> {
    pub coeffs: Vec<C>,
}

impl<C: Coeff> HomogeneousPoly<C> {
    pub fn new(coeffs: Vec<C>) -> Self {
        assert!(!coeffs.is_empty(), "a homogeneous polynomial has g + 1 ≥ 1 coefficients");
        HomogeneousPoly { coeffs }
    }

    pub fn zero(g: usize, like: &C) -> Self {
        HomogeneousPoly { coeffs: vec![like.zero_like(); g + 1] }
    }

    /// The monomial c·X^j Y^(g−j).
    pub fn monomial(g: usize, j: usize, c: C) -> Self {
        let mut v = vec![c.zero_like(); g + 1];
        v[j] = c;
        HomogeneousPoly { coeffs: v }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        HomogeneousPoly { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        HomogeneousPoly { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.sub(b)).collect() }
    }

    pub fn neg(&self) -> Self {
        HomogeneousPoly { coeffs: self.coeffs.iter().map(|a| a.neg()).collect() }
    }

    pub fn scale(&self, c: &C) -> Self {
        HomogeneousPoly { coeffs: self.coeffs.iter().map(|a| a.mul(c)).collect() }
    }

    pub fn scale_int(&self, c: &BigInt) -> Self {
        HomogeneousPoly { coeffs: self.coeffs.iter().map(|a| a.scale_int(c)).collect() }
    }

    /// P|γ = P(dX − cY, −bX + aY).
    pub fn act(&self, gamma: &Mat2) -> Self {
        self.act_with(&actmat(gamma, self.degree()))
    }

    /// Applies a precomputed action matrix R[out][in].
    pub fn act_with(&self, r: &[Vec<BigInt>]) -> Self {
        let zero = self.coeffs[0].zero_like();
        let coeffs = r
            .iter()
            .map(|row| {
                let mut s = zero.clone();
                for (x, b) in row.iter().zip(&self.coeffs) {
                    if !x.is_zero() && !b.is_zero() {
                        s = s.add(&b.scale_int(x));
                    }
                }
                s
            })
            .collect();
        HomogeneousPoly { coeffs }
    }

    /// P(x, y) = Σ b_j x^j y^(g−j).
    pub fn eval(&self, x: &C, y: &C) -> C {
        let g = self.degree();
        let mut ypow = vec![x.one_like(); g + 1];
        for j in 1..=g {
            ypow[j] = ypow[j - 1].mul(y);
        }
        let mut acc = x.zero_like();
        let mut xp = x.one_like();
        for j in 0..=g {
            if !self.coeffs[j].is_zero() {
                acc = acc.add(&self.coeffs[j].mul(&xp).mul(&ypow[g - j]));
            }
            xp = xp.mul(x);
        }
        acc
    }

    /// Product with another homogeneous polynomial (degrees add).
    pub fn mul(&self, o: &Self) -> Self {
        let zero = self.coeffs[0].zero_like();
        let mut v = vec![zero; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    v[i + j] = v[i + j].add(&a.mul(b));
                }
            }
        }
        HomogeneousPoly { coeffs: v }
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> HomogeneousPoly<D> {
        HomogeneousPoly { coeffs: self.coeffs.iter().map(f).collect() }
    }
}

/// Free function form of [`HomogeneousPoly::act`].
pub fn act<C: Coeff>(p: &HomogeneousPoly<C>, gamma: &Mat2) -> HomogeneousPoly<C> {
    p.act(gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int::{q_int, vp_rat, Q};
    use proptest::prelude::*;

    fn qp(v: &[i64]) -> HomogeneousPoly<Q> {
        HomogeneousPoly::new(v.iter().map(|&x| q_int(x)).collect())
    }

    #[test]
    fn substitution_examples() {
        let yg = qp(&[1, 0, 0, 0]);
        assert_eq!(yg.act(&super::super::mat2::IDENTITY), yg);
        // X|σ = −Y for g = 1
        assert_eq!(qp(&[0, 1]).act(&super::super::mat2::SIGMA), qp(&[-1, 0]));
        // Y^g|(p,0;0,1) = p^g Y^g
        assert_eq!(yg.act(&[5, 0, 0, 1]), qp(&[125, 0, 0, 0]));
    }

    fn content(p: &HomogeneousPoly<Q>, l: u64) -> Option<i64> {
        p.coeffs.iter().filter_map(|c| vp_rat(c, l)).min()
    }

    proptest! {
        #[test]
        fn unimodular_action_preserves_content(
            coeffs in proptest::collection::vec(-50i64..50, 5),
            a in -9i128..9, b in -9i128..9, c in -9i128..9,
        ) {
            // complete (a, b) to a determinant ±1 matrix when possible
            let (g0, x, y) = crate::arith::int::egcd_i128(a, b);
            prop_assume!(g0 == 1);
            let gamma = [a, b, -y + c * a, x + c * b];
            prop_assert_eq!(super::super::mat2::det(&gamma).abs(), 1);
            let p = qp(&coeffs);
            for l in [2u64, 3, 5] {
                prop_assert_eq!(content(&p.act(&gamma), l), content(&p, l));
            }
        }

        #[test]
        fn composition_of_actions(
            coeffs in proptest::collection::vec(-20i64..20, 4),
            m1 in proptest::array::uniform4(-5i128..5),
            m2 in proptest::array::uniform4(-5i128..5),
        ) {
            let p = qp(&coeffs);
            let lhs = p.act(&m1).act(&m2);
            let rhs = p.act(&super::super::mat2::mul(&m1, &m2));
            prop_assert_eq!(lhs, rhs);
        }
    }
}
