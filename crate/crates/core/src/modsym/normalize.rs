//! Cohomological normalization, the weight-lowering α map, the θ operator,
//! the divisibility filtrations, and μ_min.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::arith::int::{pow_u64, Q};
use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::padic::{FieldElem, PAdic, PAdicEmbedding, ResidueElement};

use super::eigen::Eigensymbol;
use super::hpoly::HomogeneousPoly;
use super::mat2::{adj, Mat2};
use super::p1::P1List;
use super::symbol::{CosetSymbol, Divisor};

/// An eigensymbol scaled so that its values have content exactly 1 at 𝔭.
#[derive(Clone, Debug)]
pub struct NormalizedSymbol {
    pub eigen: Arc<Eigensymbol>,
    pub embedding: Arc<PAdicEmbedding>,
    /// The scalar the eigensymbol was multiplied by.
    pub scale: FieldElem,
    pub symbol: CosetSymbol<FieldElem>,
    /// The same symbol in the completion.
    pub local: CosetSymbol<PAdic>,
    /// (coset, coefficient position) of a unit value.
    pub certificate: (usize, usize),
}

/// Scales `eigen` by the inverse of a coefficient of least valuation.
///
/// Coset values F(h) determine all values φ(h·D₀) = F(h)|h⁻¹ through
/// unimodular matrices, which preserve content, so the minimum over coset
/// values is the minimum over all of Δ₀.
pub fn normalize(eigen: &Arc<Eigensymbol>, emb: &Arc<PAdicEmbedding>) -> Result<NormalizedSymbol> {
    if !Arc::ptr_eq(&eigen.field, &emb.field) && *eigen.field != *emb.field {
        return Err(Error::InvalidInput("embedding belongs to another field".into()));
    }
    // Raw eigenvectors can carry a large power of p, so the search for a
    // least-valuation coefficient escalates the precision; the result is
    // exact, and the scaled symbol is then read at precision M.
    let mut search = emb.clone();
    let (i, j) = loop {
        if let Some(c) = least_valuation(&eigen.symbol, &search) {
            break c;
        }
        if search.precision >= 32 * emb.precision.max(8) {
            return Err(Error::PrecisionExhausted(format!(
                "every coefficient has valuation at least {}",
                search.precision
            )));
        }
        search = Arc::new(search.with_precision(search.precision * 2)?);
    };
    let scale = eigen.symbol.values[i].coeffs[j].inv()?;
    let symbol = eigen.symbol.scale(&scale);
    let local = symbol.map(|c| PAdic::from_field(emb, c));
    Ok(NormalizedSymbol { eigen: eigen.clone(), embedding: emb.clone(), scale, symbol, local, certificate: (i, j) })
}

fn least_valuation(sym: &CosetSymbol<FieldElem>, emb: &PAdicEmbedding) -> Option<(usize, usize)> {
    let mut best: Option<(Q, usize, usize)> = None;
    for (i, v) in sym.values.iter().enumerate() {
        for (j, c) in v.coeffs.iter().enumerate() {
            if let Some(val) = emb.valuation_capped(c) {
                if best.as_ref().is_none_or(|b| val < b.0) {
                    best = Some((val, i, j));
                }
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}

impl NormalizedSymbol {
    pub fn level(&self) -> u64 {
        self.symbol.level()
    }

    pub fn weight(&self) -> u32 {
        self.symbol.degree() as u32 + 2
    }

    pub fn sign(&self) -> i32 {
        self.eigen.sign
    }

    pub fn p(&self) -> u64 {
        self.embedding.p
    }

    pub fn evaluate(&self, d: &Divisor) -> HomogeneousPoly<FieldElem> {
        self.symbol.evaluate(d)
    }

    /// a_p as an exact field element (T_p when p ∤ M).
    pub fn a_p(&self) -> Result<FieldElem> {
        self.eigen.a(self.p())
    }

    /// ord_p(a_p), or `None` when a_p = 0 or its valuation reaches M.
    pub fn slope(&self) -> Result<Option<Q>> {
        Ok(self.embedding.valuation_capped(&self.a_p()?))
    }

    /// Generator values φ(h·D₀) for the lifts h of the cosets at `level`,
    /// which must be a multiple of the symbol's level.
    pub fn generator_values(&self, level: u64) -> Vec<HomogeneousPoly<PAdic>> {
        let p1 = Arc::new(P1List::new(level));
        (0..p1.len())
            .map(|i| {
                let h = p1.lift(i);
                self.local.value(&h).act(&adj(&h))
            })
            .collect()
    }
}

/// The weight-2 symbol at level Mp over the residue field, with coset
/// value F(h)(c, d) mod 𝔭 for the bottom row (c, d) of h; this is the
/// P ↦ P(0, 1) reduction of the generator value φ(h·D₀) = F(h)|h⁻¹.
pub fn alpha_map(sym: &NormalizedSymbol) -> Result<CosetSymbol<ResidueElement>> {
    let p = sym.p();
    let g = sym.symbol.degree() as u64;
    if g == 0 || !g.is_multiple_of(p - 1) {
        return Err(Error::WeightNotCongruent { g: g as u32, p });
    }
    alpha_image(sym, sym.level() * p, 0)
}

/// P ↦ ϖ^(−a)·P(0, 1) mod 𝔭 on generator values at `level`. Well defined
/// when every (0,1)-evaluation has valuation ≥ a/e and p^(level exponent)
/// exceeds p^(a/e)·ϖ, which callers arrange.
pub fn alpha_image(sym: &NormalizedSymbol, level: u64, a: i64) -> Result<CosetSymbol<ResidueElement>> {
    let p1 = Arc::new(P1List::new(level));
    let s = PAdic::pi_power(&sym.embedding, -a);
    let values = (0..p1.len())
        .map(|i| {
            let h = p1.lift(i);
            let v = eval_at(sym.local.value(&h), h[2], h[3]).mul(&s).reduce()?;
            Ok(HomogeneousPoly::new(vec![v]))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CosetSymbol::new(p1, values))
}

fn eval_at(f: &HomogeneousPoly<PAdic>, c: i128, d: i128) -> PAdic {
    let like = &f.coeffs[0];
    f.eval(&PAdic::from_int(&like.emb, &BigInt::from(c)), &PAdic::from_int(&like.emb, &BigInt::from(d)))
}

/// X^p Y − X Y^p as a degree-(p+1) polynomial over the residue field.
pub fn dickson(p: u64, like: &ResidueElement) -> HomogeneousPoly<ResidueElement> {
    let g = p as usize + 1;
    let mut c = vec![like.zero_like(); g + 1];
    c[p as usize] = like.one_like();
    c[1] = like.one_like().neg();
    HomogeneousPoly::new(c)
}

/// Multiplies every value by X^pY − XY^p, raising the weight by p + 1.
/// The product is invariant because (X^pY − XY^p)|γ = det γ·(X^pY − XY^p)
/// modulo p.
pub fn theta_op(sym: &CosetSymbol<ResidueElement>) -> CosetSymbol<ResidueElement> {
    let like = &sym.values[0].coeffs[0];
    let q = dickson(like.field.p, like);
    sym.map_values(|v| v.mul(&q))
}

/// Largest r with P ∈ Fil^r, from coefficient valuations (`None` = ∞),
/// capped at `cap`.
pub fn fil_r(vals: &[Option<Q>], cap: u32) -> u32 {
    let mut r = 0u32;
    while r < cap {
        let next = r + 1;
        // P ∈ Fil^next ⟺ v(b_j) ≥ next − j for all j < next
        let ok = (0..next as usize).all(|j| match vals.get(j) {
            Some(Some(v)) => *v >= Q::from_integer(BigInt::from(next as i64 - j as i64)),
            _ => true,
        });
        if !ok {
            break;
        }
        r = next;
    }
    r
}

/// Whether P ∈ Fil^{r,s} given P ∈ Fil^r: v(b_j) ≥ r − j + 1 for
/// r + 1 − s ≤ j ≤ r.
pub fn in_fil_rs(vals: &[Option<Q>], r: u32, s: u32) -> bool {
    let lo = (r + 1).saturating_sub(s) as usize;
    (lo..=r as usize).all(|j| match vals.get(j) {
        Some(Some(v)) => *v >= Q::from_integer(BigInt::from(r as i64 - j as i64 + 1)),
        _ => true,
    })
}

fn coeff_vals(p: &HomogeneousPoly<PAdic>) -> Vec<Option<Q>> {
    p.coeffs.iter().map(|c| c.valuation_capped()).collect()
}

/// The filtration depth (r, s) of the symbol's values on Γ₀(Mp):
/// r largest with all generator values in Fil^r, then s ≤ r largest with
/// all values in Fil^{r,s}.
pub fn filtration_depth(sym: &NormalizedSymbol) -> (u32, u32) {
    let vals: Vec<Vec<Option<Q>>> =
        sym.generator_values(sym.level() * sym.p()).iter().map(coeff_vals).collect();
    let cap = sym.embedding.precision;
    let r = vals.iter().map(|v| fil_r(v, cap)).min().unwrap_or(0);
    let mut s = 0;
    while s < r && vals.iter().all(|v| in_fil_rs(v, r, s + 1)) {
        s += 1;
    }
    (r, s)
}

/// μ_min: the least valuation of the (0,1)-evaluation over all degree-zero
/// divisors, i.e. of F_i(c, d) over cosets i and primitive (c, d) in the
/// class of i. Only (c, d) mod p^m matters, and after scaling by a unit
/// it suffices to take (x, 1) and (1, p·y). Depth m grows until the
/// running minimum is below m.
pub fn mu_min(sym: &NormalizedSymbol) -> Result<Q> {
    let emb = &sym.embedding;
    let p = emb.p;
    let cap = emb.precision;
    // integral local coordinates of every coefficient, modulo p^cap
    let mcap = pow_u64(p, cap);
    let coords: Vec<Vec<Vec<BigInt>>> = sym
        .local
        .values
        .iter()
        .map(|v| v.coeffs.iter().map(|c| integral_coords(c, &mcap)).collect())
        .collect::<Result<_>>()?;
    for m in 1..=cap {
        let md = pow_u64(p, m);
        let pm = md.to_u64().expect("p^m fits in u64 for the depths used");
        let mut best: Option<Q> = None;
        for poly in &coords {
            let g = poly.len() - 1;
            let pts = (0..pm).map(|x| (x, 1u64)).chain((0..pm / p).map(|y| (1u64, p * y)));
            for (x, y) in pts {
                // Σ b_j x^j y^(g−j) mod p^m, coordinate-wise
                let mut acc = vec![BigInt::zero(); poly[0].len()];
                let (xb, yb) = (BigInt::from(x), BigInt::from(y));
                let mut ypows = vec![BigInt::from(1)];
                for _ in 0..g {
                    let t = ypows.last().unwrap() * &yb % &md;
                    ypows.push(t);
                }
                let mut xp = BigInt::from(1);
                for (j, b) in poly.iter().enumerate() {
                    let w = &xp * &ypows[g - j] % &md;
                    if !w.is_zero() {
                        for (a, c) in acc.iter_mut().zip(b) {
                            *a += c * &w;
                        }
                    }
                    xp = xp * &xb % &md;
                }
                for a in acc.iter_mut() {
                    *a = crate::arith::int::modp(a, &md);
                }
                if acc.iter().all(|a| a.is_zero()) {
                    continue;
                }
                let le = crate::padic::LocalElement { shift: 0, coords: acc, prec: m, exact_zero: false };
                let le = emb.normalize(le);
                if let Ok(v) = emb.local_valuation(&le) {
                    if best.as_ref().is_none_or(|b| v < *b) {
                        best = Some(v);
                    }
                }
            }
        }
        if let Some(b) = best {
            if b < Q::from_integer(BigInt::from(m)) {
                return Ok(b);
            }
        }
    }
    Err(Error::OutOfBudget(format!("μ_min is at least the precision {cap}")))
}

fn integral_coords(c: &PAdic, m: &BigInt) -> Result<Vec<BigInt>> {
    if c.x.exact_zero {
        return Ok(vec![BigInt::zero(); c.emb.local_degree()]);
    }
    if c.x.shift < 0 {
        return Err(Error::NegativeValuation);
    }
    let s = pow_u64(c.emb.p, c.x.shift as u32);
    Ok(c.x.coords.iter().map(|x| x * &s % m).collect())
}

/// Hecke operator Σ|δ on residue-field coset symbols (any level).
pub fn hecke_on_residue(sym: &CosetSymbol<ResidueElement>, deltas: &[Mat2]) -> CosetSymbol<ResidueElement> {
    sym.apply(deltas, &sym.p1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int::{q_int, vp_rat};

    fn vals(c: &[i64], p: u64) -> Vec<Option<Q>> {
        c.iter().map(|&x| vp_rat(&q_int(x), p).map(q_int)).collect()
    }

    #[test]
    fn filtration_levels() {
        // b_0 = 9, b_1 = 3, b_2 = 1: in Fil^2 (v(b_0) ≥ 2, v(b_1) ≥ 1), not Fil^3
        let v = vals(&[9, 3, 1, 5], 3);
        assert_eq!(fil_r(&v, 8), 2);
        assert!(in_fil_rs(&v, 2, 0));
        // Fil^{2,1} needs v(b_2) ≥ 1
        assert!(!in_fil_rs(&v, 2, 1));
        // v = (2, 2, 1, 0): still Fil^2 only, but deep enough for s = 1, 2
        let w = vals(&[9, 9, 3, 1], 3);
        assert_eq!(fil_r(&w, 8), 2);
        assert!(in_fil_rs(&w, 2, 1));
        assert!(in_fil_rs(&w, 2, 2));
        assert_eq!(fil_r(&vals(&[1, 0, 0], 3), 8), 0);
    }
}
