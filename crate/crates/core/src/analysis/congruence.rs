//! Residual congruences between a weight-k eigensymbol and weight-2
//! eigensymbols of the same level, and verification of the predicted
//! relation between their Mazur–Tate elements.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::arith::int::{is_prime, prime_divisors, Q};
use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::mazurtate::{reduce_scaled, theta_ni, CyclicGroupRingElement};
use crate::modsym::normalize::{mu_min, normalize, NormalizedSymbol};
use crate::modsym::{eigensymbols_at, Eigensymbol};
use crate::padic::{primes_above, ResidueElement, ResidueField};

/// [SL₂(Z) : Γ₀(N)].
pub fn gamma0_index(n: u64) -> u64 {
    prime_divisors(n).iter().fold(n, |acc, &q| acc / q * (q + 1))
}

/// ⌈k·[SL₂(Z):Γ₀(N)]/12⌉.
pub fn sturm_bound(k: u32, n: u64) -> u64 {
    (k as u64 * gamma0_index(n)).div_ceil(12)
}

/// A field map from one residue field into another, given by the image
/// of the generator t.
#[derive(Clone, Debug)]
pub struct ResidueMap {
    pub target: Arc<ResidueField>,
    pub image: ResidueElement,
}

impl ResidueMap {
    pub fn identity(field: &Arc<ResidueField>) -> Self {
        let t = if field.degree == 1 { field.from_u64(0) } else { field.elem(vec![0, 1]) };
        ResidueMap { target: field.clone(), image: t }
    }

    pub fn apply(&self, x: &ResidueElement) -> ResidueElement {
        // Horner in the image of t
        let mut acc = self.target.from_u64(0);
        for c in x.v.iter().rev() {
            acc = acc.mul(&self.image).add(&self.target.from_u64(*c));
        }
        acc
    }

    /// All embeddings of `source` into `target`.
    pub fn all(source: &Arc<ResidueField>, target: &Arc<ResidueField>) -> Vec<ResidueMap> {
        if source.p != target.p || !target.degree.is_multiple_of(source.degree) {
            return Vec::new();
        }
        if source.degree == 1 {
            return vec![ResidueMap { target: target.clone(), image: target.from_u64(0) }];
        }
        target
            .elements()
            .into_iter()
            .filter(|x| {
                let mut acc = target.from_u64(0);
                for c in source.modulus.iter().rev() {
                    acc = acc.mul(x).add(&target.from_u64(*c));
                }
                acc.is_zero()
            })
            .map(|image| ResidueMap { target: target.clone(), image })
            .collect()
    }
}

/// A common residue field for two forms, with the map from each side.
#[derive(Clone, Debug)]
pub struct CommonField {
    pub field: Arc<ResidueField>,
    pub source: ResidueMap,
    pub target: ResidueMap,
}

/// A weight-2 class whose residual eigenvalues agree with the source form
/// at every checked prime.
#[derive(Clone, Debug)]
pub struct CongruenceMatch {
    pub source_id: String,
    pub target_id: String,
    pub target: NormalizedSymbol,
    pub sturm_bound: u64,
    pub checked_primes: Vec<u64>,
    pub residual_field_degree: usize,
    /// Index of the chosen map among all maps that align the eigenvalues.
    pub embedding_choice: usize,
    pub common: CommonField,
}

impl CongruenceMatch {
    pub fn to_json(&self) -> Value {
        json!({
            "source": self.source_id,
            "target": self.target_id,
            "sturm_bound": self.sturm_bound,
            "checked_primes": self.checked_primes,
            "residual_field_degree": self.residual_field_degree,
            "embedding_choice": self.embedding_choice,
        })
    }
}

/// "key@index" naming a (Galois class, prime above p) pair.
pub fn form_id(sym: &NormalizedSymbol) -> String {
    format!("{}@{}", sym.eigen.key, sym.embedding.index)
}

fn residual(sym: &NormalizedSymbol, l: u64) -> Result<ResidueElement> {
    sym.embedding.reduce(&sym.eigen.a(l)?)
}

/// Compare residual eigenvalues of `f` and `g` at `primes`; on agreement of
/// minimal polynomials, find the aligning field maps.
fn align(f: &NormalizedSymbol, g: &NormalizedSymbol, primes: &[u64]) -> Result<Option<(Vec<CommonField>, usize)>> {
    let mut fa = Vec::new();
    let mut ga = Vec::new();
    for &l in primes {
        let (x, y) = (residual(f, l)?, residual(g, l)?);
        if x.minpoly() != y.minpoly() {
            return Ok(None);
        }
        fa.push(x);
        ga.push(y);
    }
    let (ff, gf) = (f.embedding.residue.clone(), g.embedding.residue.clone());
    let degree = ff.degree.max(gf.degree);
    let candidates: Vec<CommonField> = if gf.degree <= ff.degree {
        ResidueMap::all(&gf, &ff)
            .into_iter()
            .map(|m| CommonField { field: ff.clone(), source: ResidueMap::identity(&ff), target: m })
            .collect()
    } else {
        ResidueMap::all(&ff, &gf)
            .into_iter()
            .map(|m| CommonField { field: gf.clone(), source: m, target: ResidueMap::identity(&gf) })
            .collect()
    };
    let good: Vec<CommonField> = candidates
        .into_iter()
        .filter(|c| fa.iter().zip(&ga).all(|(x, y)| c.source.apply(x) == c.target.apply(y)))
        .collect();
    if good.is_empty() {
        return Err(Error::EmbeddingAmbiguity);
    }
    Ok(Some((good, degree)))
}

/// Every (weight-2 class, prime above p) at `level` whose residual
/// eigenvalues match `f` at all primes ℓ ≤ the Sturm bound with ℓ ≠ p and
/// ℓ ∤ level. The weight-2 symbols are taken with the sign of `f`.
pub fn find_congruent_weight2(f: &NormalizedSymbol, level: u64, ell_max: u64) -> Result<Vec<CongruenceMatch>> {
    let p = f.p();
    let bound = sturm_bound(f.weight(), level);
    let primes: Vec<u64> = (2..=bound).filter(|&l| is_prime(l) && l != p && !level.is_multiple_of(l)).collect();
    let classes = eigensymbols_at(level, 2, f.sign(), ell_max)?;
    let mut out = Vec::new();
    for class in classes {
        let class = Arc::new(class);
        for emb in primes_above(&class.field, p, f.embedding.precision)? {
            let g = normalize(&class, &Arc::new(emb))?;
            if let Some((maps, degree)) = align(f, &g, &primes)? {
                out.push(CongruenceMatch {
                    source_id: form_id(f),
                    target_id: form_id(&g),
                    target: g,
                    sturm_bound: bound,
                    checked_primes: primes.clone(),
                    residual_field_degree: degree,
                    embedding_choice: 0,
                    common: maps[0].clone(),
                });
            }
        }
    }
    Ok(out)
}

/// Normalized symbols for every class and prime above p, in the canonical
/// order (class order, then embedding index).
pub fn normalized_forms(classes: &[Eigensymbol], p: u64, precision: u32) -> Result<Vec<NormalizedSymbol>> {
    let mut out = Vec::new();
    for class in classes {
        let class = Arc::new(class.clone());
        for emb in primes_above(&class.field, p, precision)? {
            out.push(normalize(&class, &Arc::new(emb))?);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CongruenceMode {
    /// No rescaling of f (a = 0).
    MedWeight,
    /// f rescaled by ϖ^(−a) with ord_p(ϖ^a) = μ_min.
    LowSlope,
}

#[derive(Clone, Debug)]
pub struct CongruenceRow {
    pub n: u32,
    pub i: u32,
    pub pass: bool,
    pub note: String,
}

#[derive(Clone, Debug)]
pub struct CongruenceReport {
    pub mode: CongruenceMode,
    pub a: i64,
    pub unit: Option<ResidueElement>,
    pub rows: Vec<CongruenceRow>,
}

impl CongruenceReport {
    pub fn all_pass(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(|r| r.pass)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "mode": match self.mode { CongruenceMode::MedWeight => "medweight", CongruenceMode::LowSlope => "lowslope" },
            "a": self.a,
            "unit": self.unit.as_ref().map(|u| u.to_string()),
            "rows": self.rows.iter().map(|r| json!({"n": r.n, "i": r.i, "pass": r.pass, "note": r.note})).collect::<Vec<_>>(),
            "all_pass": self.all_pass(),
        })
    }
}

/// Twists i in 0..p−1 whose parity matches the sign, (−1)^i = sign.
pub fn matching_twists(p: u64, sign: i32) -> Vec<u32> {
    (0..(p - 1) as u32).filter(|i| (i % 2 == 0) == (sign == 1)).collect()
}

/// Checks reduce(ϖ^(−a)·θ_{n,i}(f)) = u·ν(reduce(θ_{n−1,i}(g))) for
/// 1 ≤ n ≤ n_max and twists of matching parity, with one unit u fitted at
/// the first nonzero right-hand side and reused.
pub fn verify_congruence(
    f: &NormalizedSymbol,
    m: &CongruenceMatch,
    n_max: u32,
    mode: CongruenceMode,
) -> Result<CongruenceReport> {
    let p = f.p();
    let g = &m.target;
    let a = match mode {
        CongruenceMode::MedWeight => 0,
        CongruenceMode::LowSlope => {
            let mu = mu_min(f)?;
            let a = mu * Q::from_integer(BigInt::from(f.embedding.e));
            if !a.is_integer() {
                return Err(Error::InvalidInput("μ_min is not a multiple of 1/e".into()));
            }
            a.to_integer().to_i64().expect("small")
        }
    };
    let mu = Q::new(BigInt::from(a), BigInt::from(f.embedding.e));
    let mut unit: Option<ResidueElement> = None;
    let mut rows = Vec::new();
    for n in 1..=n_max {
        for i in matching_twists(p, f.sign()) {
            let lhs = match reduce_scaled(&theta_ni(&f.local, p, n, i)?, &mu) {
                Ok(t) => t.map(|x| m.common.source.apply(x)),
                Err(e) => {
                    rows.push(CongruenceRow { n, i, pass: false, note: format!("scaling failed: {e}") });
                    continue;
                }
            };
            let rg = theta_ni(&g.local, p, n - 1, i)?;
            let rhs: CyclicGroupRingElement<ResidueElement> = CyclicGroupRingElement::new(
                p,
                n - 1,
                rg.coeffs.iter().map(|x| x.reduce().map(|r| m.common.target.apply(&r))).collect::<Result<_>>()?,
            )
            .nu_corestrict();
            if unit.is_none() {
                if let Some(j) = rhs.coeffs.iter().position(|c| !c.is_zero()) {
                    if !lhs.coeffs[j].is_zero() {
                        unit = Some(lhs.coeffs[j].mul(&rhs.coeffs[j].inv()?));
                    }
                }
            }
            let (pass, note) = match &unit {
                Some(u) => (lhs == rhs.scale(u), String::new()),
                None if rhs.is_zero() && lhs.is_zero() => (true, "both sides vanish".into()),
                None => (false, "no unit aligns the two sides".into()),
            };
            rows.push(CongruenceRow { n, i, pass, note });
        }
    }
    Ok(CongruenceReport { mode, a, unit, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_and_bound() {
        assert_eq!(gamma0_index(11), 12);
        assert_eq!(gamma0_index(21), 32);
        assert_eq!(gamma0_index(297), 432);
        assert_eq!(sturm_bound(18, 11), 18);
        assert_eq!(sturm_bound(10, 21), 27);
    }

    #[test]
    fn residue_maps_fix_the_prime_field() {
        let f9 = Arc::new(ResidueField { p: 3, degree: 2, modulus: vec![1, 0, 1] });
        let f3 = ResidueField::prime(3);
        let maps = ResidueMap::all(&f3, &f9);
        assert_eq!(maps.len(), 1);
        assert_eq!(maps[0].apply(&f3.from_u64(2)), f9.from_u64(2));
        // t² + 1 has two roots in F_9: both automorphisms
        assert_eq!(ResidueMap::all(&f9, &f9).len(), 2);
    }
}
