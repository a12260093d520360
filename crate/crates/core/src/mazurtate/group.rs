//! Group rings over 𝒢ₙ = (Z/pⁿ)^× and the cyclic p-parts Gₙ ≅ Z/pⁿ, the
//! maps π and ν between adjacent levels, and finite-level μ and λ.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::arith::int::{binomial_mod_p, Q};
use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::padic::{PAdic, ResidueElement};

/// Σ c_a σ_a over a ∈ (Z/pⁿ)^×, stored in increasing order of a.
#[derive(Clone, Debug, PartialEq)]
pub struct FullGroupRingElement<C> {
    pub p: u64,
    pub n: u32,
    pub units: Vec<u64>,
    pub coeffs: Vec<C>,
}

/// Σ d_j γₙ^j for j = 0..pⁿ−1 with γₙ the image of 1 + p.
#[derive(Clone, Debug, PartialEq)]
pub struct CyclicGroupRingElement<C> {
    pub p: u64,
    pub n: u32,
    pub coeffs: Vec<C>,
}

/// Units of Z/pⁿ in increasing order.
pub fn units_mod(p: u64, n: u32) -> Vec<u64> {
    let m = p.pow(n);
    (1..m).filter(|a| a % p != 0).collect()
}

impl<C: Coeff> FullGroupRingElement<C> {
    pub fn new(p: u64, n: u32, coeffs: Vec<C>) -> Self {
        let units = units_mod(p, n);
        assert_eq!(units.len(), coeffs.len(), "one coefficient per unit");
        FullGroupRingElement { p, n, units, coeffs }
    }

    /// Coefficient of σ_a for a unit a (any representative).
    pub fn coeff(&self, a: i128) -> &C {
        let m = self.p.pow(self.n) as i128;
        let r = a.rem_euclid(m) as u64;
        let i = self.units.binary_search(&r).expect("a must be a unit");
        &self.coeffs[i]
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.add(b))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.sub(b))
    }

    fn zip(&self, o: &Self, f: impl Fn(&C, &C) -> C) -> Self {
        assert_eq!((self.p, self.n), (o.p, o.n));
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| f(a, b)).collect();
        FullGroupRingElement { p: self.p, n: self.n, units: self.units.clone(), coeffs }
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> FullGroupRingElement<D> {
        FullGroupRingElement { p: self.p, n: self.n, units: self.units.clone(), coeffs: self.coeffs.iter().map(f).collect() }
    }
}

impl<C: Coeff> CyclicGroupRingElement<C> {
    pub fn new(p: u64, n: u32, coeffs: Vec<C>) -> Self {
        assert_eq!(coeffs.len() as u64, p.pow(n), "one coefficient per group element");
        CyclicGroupRingElement { p, n, coeffs }
    }

    pub fn constant(p: u64, n: u32, c: C) -> Self {
        let mut coeffs = vec![c.zero_like(); p.pow(n) as usize];
        coeffs[0] = c;
        CyclicGroupRingElement { p, n, coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.add(b))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.sub(b))
    }

    fn zip(&self, o: &Self, f: impl Fn(&C, &C) -> C) -> Self {
        assert_eq!((self.p, self.n), (o.p, o.n));
        CyclicGroupRingElement { p: self.p, n: self.n, coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| f(a, b)).collect() }
    }

    pub fn neg(&self) -> Self {
        self.map(|c| c.neg())
    }

    pub fn scale(&self, c: &C) -> Self {
        self.map(|x| x.mul(c))
    }

    pub fn scale_int(&self, c: &BigInt) -> Self {
        self.map(|x| x.scale_int(c))
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> CyclicGroupRingElement<D> {
        CyclicGroupRingElement { p: self.p, n: self.n, coeffs: self.coeffs.iter().map(f).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Product in the group ring (cyclic convolution).
    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!((self.p, self.n), (o.p, o.n));
        let m = self.order();
        let mut out = vec![self.coeffs[0].zero_like(); m];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[(i + j) % m] = out[(i + j) % m].add(&a.mul(b));
            }
        }
        CyclicGroupRingElement { p: self.p, n: self.n, coeffs: out }
    }

    /// π: Gₙ → G_{n−1}, exponents reduced mod p^(n−1).
    pub fn pi_project(&self) -> Self {
        assert!(self.n >= 1, "π needs n ≥ 1");
        let m = self.p.pow(self.n - 1) as usize;
        let mut out = vec![self.coeffs[0].zero_like(); m];
        for (j, c) in self.coeffs.iter().enumerate() {
            out[j % m] = out[j % m].add(c);
        }
        CyclicGroupRingElement { p: self.p, n: self.n - 1, coeffs: out }
    }

    /// ν: γ_{n−1}^j ↦ Σ_t γₙ^(j + t·p^(n−1)), from level n−1 to level n.
    pub fn nu_corestrict(&self) -> Self {
        let m = self.order();
        let coeffs = (0..m * self.p as usize).map(|j| self.coeffs[j % m].clone()).collect();
        CyclicGroupRingElement { p: self.p, n: self.n + 1, coeffs }
    }

    /// The automorphism γ ↦ γ^u for u prime to p.
    pub fn automorphism(&self, u: u64) -> Self {
        assert!(!u.is_multiple_of(self.p), "u must be prime to p");
        let m = self.order();
        let mut out = vec![self.coeffs[0].zero_like(); m];
        for (j, c) in self.coeffs.iter().enumerate() {
            let t = (j as u128 * u as u128 % m as u128) as usize;
            out[t] = c.clone();
        }
        CyclicGroupRingElement { p: self.p, n: self.n, coeffs: out }
    }
}

/// μ and λ of a finite-level element, with the precision used.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantPair {
    pub mu: Q,
    pub lambda: u64,
    pub certified: bool,
    pub precision: u32,
}

impl InvariantPair {
    /// μ is written as an exact rational string.
    pub fn to_json(&self) -> Value {
        json!({"mu": self.mu.to_string(), "lambda": self.lambda, "certified": self.certified, "precision": self.precision})
    }
}

/// min ord_p of the coefficients.
pub fn mu_invariant(coeffs: &[PAdic]) -> Result<Q> {
    coeffs
        .iter()
        .filter_map(|c| c.valuation_capped())
        .min()
        .ok_or_else(|| Error::PrecisionExhausted("every coefficient vanishes to the working precision".into()))
}

/// λ of a residue-field element: the least m with a nonzero T^m
/// coefficient after γ = 1 + T, i.e. Σ_j d_j·C(j, m) ≠ 0 mod p.
pub fn lambda_residue(theta: &CyclicGroupRingElement<ResidueElement>) -> Option<u64> {
    let p = theta.p;
    let m = theta.order() as u64;
    let nz: Vec<(u64, &ResidueElement)> =
        theta.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(j, c)| (j as u64, c)).collect();
    if nz.is_empty() {
        return None;
    }
    let zero = nz[0].1.zero_like();
    (0..m).find(|&t| {
        let mut acc = zero.clone();
        for (j, c) in &nz {
            let b = binomial_mod_p(*j, t, p);
            if b != 0 {
                acc = acc.add(&c.scale_int(&BigInt::from(b)));
            }
        }
        !acc.is_zero()
    })
}

/// ϖ^(−μ)·θ reduced to the residue field; μ·e is an integer.
pub fn reduce_scaled(theta: &CyclicGroupRingElement<PAdic>, mu: &Q) -> Result<CyclicGroupRingElement<ResidueElement>> {
    let emb = theta.coeffs[0].emb.clone();
    let a = mu * Q::from_integer(BigInt::from(emb.e));
    if !a.is_integer() {
        return Err(Error::InvalidInput(format!("μ = {mu} is not a multiple of 1/e")));
    }
    let k = a.to_integer().to_i64().expect("small exponent");
    let s = PAdic::pi_power(&emb, -k);
    let coeffs = theta.coeffs.iter().map(|c| c.mul(&s).reduce()).collect::<Result<Vec<_>>>()?;
    Ok(CyclicGroupRingElement { p: theta.p, n: theta.n, coeffs })
}

/// λ after scaling by ϖ^(−μ).
pub fn lambda_invariant(theta: &CyclicGroupRingElement<PAdic>) -> Result<u64> {
    Ok(invariants(theta)?.lambda)
}

pub fn invariants(theta: &CyclicGroupRingElement<PAdic>) -> Result<InvariantPair> {
    let mu = mu_invariant(&theta.coeffs)?;
    let red = reduce_scaled(theta, &mu)?;
    let lambda = lambda_residue(&red)
        .ok_or_else(|| Error::PrecisionExhausted("scaled reduction vanished".into()))?;
    Ok(InvariantPair { mu, lambda, certified: true, precision: theta.coeffs[0].emb.precision })
}

/// qₙ = pⁿ⁻¹ − pⁿ⁻² + ⋯, ending in p − 1 for even n and in p² − p for
/// odd n; q₀ = q₁ = 0.
pub fn q_n(n: u32, p: u64) -> u64 {
    if n < 2 {
        return 0;
    }
    // Σ_{j=0}^{n−1} (−1)^(n−1−j) p^j with the p^0 term dropped when n is odd
    let mut s: i128 = 0;
    for j in 0..n {
        let t = (p as i128).pow(j);
        if (n - 1 - j).is_multiple_of(2) {
            s += t;
        } else {
            s -= t;
        }
    }
    if n % 2 == 1 {
        s -= 1;
    }
    s as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_values() {
        for p in [3u64, 5, 7] {
            assert_eq!(q_n(0, p), 0);
            assert_eq!(q_n(1, p), 0);
            assert_eq!(q_n(2, p), p - 1);
            assert_eq!(q_n(3, p), p * p - p);
            assert_eq!(q_n(4, p), p * p * p - p * p + p - 1);
        }
    }

    #[test]
    fn pi_nu() {
        let c: Vec<Q> = (0..9).map(|i| Q::from_integer(BigInt::from(i * i + 1))).collect();
        let t = CyclicGroupRingElement::new(3, 2, c);
        let back = t.nu_corestrict().pi_project();
        assert_eq!(back, t.scale_int(&BigInt::from(3)));
        let one = CyclicGroupRingElement::constant(3, 2, Q::from_integer(BigInt::from(5)));
        assert_eq!(one.pi_project(), CyclicGroupRingElement::constant(3, 1, Q::from_integer(BigInt::from(5))));
    }
}
