//! Decomposition of the rescaled weight-2 reduction of a weight-k symbol
//! in the span of degeneracy images of a weight-2 symbol.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::arith::int::Q;
use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::modsym::normalize::{alpha_image, mu_min, NormalizedSymbol};
use crate::modsym::p1::P1List;
use crate::modsym::CosetSymbol;
use crate::padic::ResidueElement;

use super::congruence::CommonField;

#[derive(Clone, Debug)]
pub struct OldspaceReport {
    pub r: u32,
    /// The rescaling exponent a with ord_p(ϖ^a) = μ_min.
    pub a: i64,
    /// Coordinates a_1..a_r on φ̄_g|(p^t,0;0,1), t = 1..r.
    pub coefficients: Vec<ResidueElement>,
    pub span_dim: usize,
    /// Σ a_t·φ̄_g|(p^t,0;0,1) equals the target exactly.
    pub reassembles: bool,
}

impl OldspaceReport {
    pub fn to_json(&self) -> Value {
        json!({
            "r": self.r,
            "a": self.a,
            "coefficients": self.coefficients.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "span_dim": self.span_dim,
            "reassembles": self.reassembles,
        })
    }
}

/// φ̄_g|(p^t,0;0,1) for t = 1..r at level N·p^r, in the common field.
pub fn degeneracy_images(g: &NormalizedSymbol, r: u32, common: &CommonField) -> Result<Vec<CosetSymbol<ResidueElement>>> {
    let p = g.p();
    let gbar = reduce_symbol(&g.local, common, false)?;
    let target = Arc::new(P1List::new(g.level() * p.pow(r)));
    Ok((1..=r).map(|t| gbar.apply(&[[p.pow(t) as i128, 0, 0, 1]], &target)).collect())
}

fn reduce_symbol(
    sym: &CosetSymbol<crate::padic::PAdic>,
    common: &CommonField,
    source: bool,
) -> Result<CosetSymbol<ResidueElement>> {
    let map = if source { &common.source } else { &common.target };
    let values = sym
        .values
        .iter()
        .map(|v| {
            Ok(crate::modsym::HomogeneousPoly::new(
                v.coeffs.iter().map(|c| c.reduce().map(|r| map.apply(&r))).collect::<Result<Vec<_>>>()?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CosetSymbol::new(sym.p1.clone(), values))
}

/// Solves Σ x_t·cols[t] = w over a finite field; returns (rank, solution).
pub fn solve(cols: &[Vec<ResidueElement>], w: &[ResidueElement]) -> (usize, Option<Vec<ResidueElement>>) {
    let r = cols.len();
    let rows = w.len();
    let zero = w[0].zero_like();
    // augmented rows [cols | w]
    let mut m: Vec<Vec<ResidueElement>> =
        (0..rows).map(|i| (0..r).map(|t| cols[t][i].clone()).chain(std::iter::once(w[i].clone())).collect()).collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..r {
        let Some(pr) = (row..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(row, pr);
        let inv = m[row][c].inv().expect("nonzero pivot");
        for x in m[row].iter_mut() {
            *x = x.mul(&inv);
        }
        for i in 0..rows {
            if i != row && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..=r {
                    let v = m[i][j].sub(&f.mul(&m[row][j]));
                    m[i][j] = v;
                }
            }
        }
        pivots.push(c);
        row += 1;
    }
    let rank = pivots.len();
    if (rank..rows).any(|i| !m[i][r].is_zero()) {
        return (rank, None);
    }
    let mut x = vec![zero; r];
    for (k, &c) in pivots.iter().enumerate() {
        x[c] = m[k][r].clone();
    }
    (rank, Some(x))
}

/// Coordinates of ϖ^(−a)·α(φ_f) at level N·p^r in the basis of degeneracy
/// images of φ̄_g, where a is fixed by ord_p(ϖ^a) = μ_min(f).
pub fn oldspace_decompose(
    f: &NormalizedSymbol,
    g: &NormalizedSymbol,
    r: u32,
    common: &CommonField,
) -> Result<OldspaceReport> {
    if r == 0 {
        return Err(Error::InvalidInput("r must be at least 1".into()));
    }
    let p = f.p();
    let mu = mu_min(f)?;
    let a = mu * Q::from_integer(BigInt::from(f.embedding.e));
    if !a.is_integer() {
        return Err(Error::InvalidInput("μ_min is not a multiple of 1/e".into()));
    }
    let a = a.to_integer().to_i64().expect("small");
    let level = f.level() * p.pow(r);
    let target = alpha_image(f, level, a)?.map(|x| common.source.apply(x));
    let basis = degeneracy_images(g, r, common)?;
    let flat = |s: &CosetSymbol<ResidueElement>| s.values.iter().map(|v| v.coeffs[0].clone()).collect::<Vec<_>>();
    let cols: Vec<Vec<ResidueElement>> = basis.iter().map(flat).collect();
    let w = flat(&target);
    let (span_dim, sol) = solve(&cols, &w);
    let coefficients = sol.ok_or(Error::NotInSpan { span_dim })?;
    let mut acc = target.scale(&w[0].zero_like());
    for (c, b) in coefficients.iter().zip(&basis) {
        acc = acc.add(&b.scale(c));
    }
    let reassembles = acc == target;
    Ok(OldspaceReport { r, a, coefficients, span_dim, reassembles })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::ResidueField;

    #[test]
    fn solves_small_system() {
        let f = ResidueField::prime(5);
        let e = |v: &[u64]| v.iter().map(|&x| f.from_u64(x)).collect::<Vec<_>>();
        let cols = vec![e(&[1, 0, 1]), e(&[0, 1, 1]), e(&[1, 1, 2])];
        // w = 2·c0 + 3·c1
        let (rank, sol) = solve(&cols, &e(&[2, 3, 0]));
        assert_eq!(rank, 2);
        let x = sol.unwrap();
        assert_eq!(x, e(&[2, 3, 0]));
        let (_, none) = solve(&cols, &e(&[1, 0, 0]));
        assert!(none.is_none());
    }
}
