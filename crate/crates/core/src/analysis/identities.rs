//! Exact identities between Mazur–Tate elements and symbols, each
//! returning whether it holds on the given instance.

use num_bigint::BigInt;

use crate::arith::int::{pow_u64, Q};
use crate::coeff::Coeff;
use crate::error::Result;
use crate::mazurtate::{degeneracy_p, mazur_tate, omega_decompose, theta_ni, Stabilized};
use crate::modsym::normalize::{alpha_map, filtration_depth, mu_min, NormalizedSymbol};
use crate::modsym::{CosetSymbol, Eigensymbol, HeckeOp};
use crate::padic::{FieldElem, PAdic};

/// π(θ_{n+1,i}) = a_p·θ_{n,i} − p^(k−2)·ν(θ_{n−1,i}) for p ∤ N, n ≥ 1.
pub fn three_term(f: &NormalizedSymbol, n: u32, i: u32) -> Result<bool> {
    assert!(n >= 1, "the relation starts at n = 1");
    let p = f.p();
    let ap = PAdic::from_field(&f.embedding, &f.a_p()?);
    let up = theta_ni(&f.local, p, n + 1, i)?.pi_project();
    let mid = theta_ni(&f.local, p, n, i)?.scale(&ap);
    let low = theta_ni(&f.local, p, n - 1, i)?.nu_corestrict().scale_int(&pow_u64(p, f.weight() - 2));
    Ok(up == mid.sub(&low))
}

/// The three-term relation for 1 ≤ n ≤ n_max and every twist i, computing
/// each Mazur–Tate element once; returns (n, i, holds).
pub fn three_term_all(f: &NormalizedSymbol, n_max: u32) -> Result<Vec<(u32, u32, bool)>> {
    let p = f.p();
    let ap = PAdic::from_field(&f.embedding, &f.a_p()?);
    let c = pow_u64(p, f.weight() - 2);
    // θ_{n,i} comes from the level-(n+1) element
    let full = (0..=n_max + 1).map(|n| mazur_tate(&f.local, p, n + 1)).collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for i in 0..(p - 1) as u32 {
        let th = full.iter().map(|t| omega_decompose(t, i)).collect::<Result<Vec<_>>>()?;
        for n in 1..=n_max as usize {
            let lhs = th[n + 1].pi_project();
            let rhs = th[n].scale(&ap).sub(&th[n - 1].nu_corestrict().scale_int(&c));
            out.push((n as u32, i, lhs == rhs));
        }
    }
    Ok(out)
}

/// θ_{n,i}(φ|(p,0;0,1)) = p^g·ν(θ_{n−1,i}(φ)) for n ≥ 1, for any symbol
/// with p-adic values.
pub fn degen(sym: &CosetSymbol<PAdic>, p: u64, n: u32, i: u32) -> Result<bool> {
    assert!(n >= 1, "the identity starts at n = 1");
    let lhs = theta_ni(&degeneracy_p(sym, p), p, n, i)?;
    let rhs = theta_ni(sym, p, n - 1, i)?.nu_corestrict().scale_int(&pow_u64(p, sym.degree() as u32));
    Ok(lhs == rhs)
}

/// π(θ_{n,i}(f_α)) = α·θ_{n−1,i}(f_α) for n ≥ 1.
pub fn two_term(stab: &Stabilized, n: u32, i: u32) -> Result<bool> {
    let p = stab.base.p();
    let up = theta_ni(&stab.symbol, p, n, i)?.pi_project();
    let low = theta_ni(&stab.symbol, p, n - 1, i)?.scale(&stab.alpha);
    Ok(up == low)
}

/// The sign ε with φ|W_N = ε·N^(k/2−1)·φ, if φ is a W_N-eigensymbol with
/// such an eigenvalue.
pub fn fe_sign(e: &Eigensymbol) -> Result<Option<i32>> {
    let n = e.level();
    let deltas = HeckeOp::W.deltas(n)?;
    let image = e.symbol.apply(&deltas, &e.symbol.p1);
    let c = FieldElem::from_int(&e.field, &pow_u64(n, e.weight() / 2 - 1));
    for s in [1, -1] {
        let scale = if s == 1 { c.clone() } else { c.neg() };
        if image == e.symbol.scale(&scale) {
            return Ok(Some(s));
        }
    }
    Ok(None)
}

/// The level-n Mazur–Tate element of α(φ) equals the reduction of that of
/// φ, when α applies.
pub fn alphastick(f: &NormalizedSymbol, n: u32) -> Result<bool> {
    let a = alpha_map(f)?;
    let lhs = mazur_tate(&a, f.p(), n)?;
    let rhs = mazur_tate(&f.local, f.p(), n)?;
    let red = rhs.coeffs.iter().map(|c| c.reduce()).collect::<Result<Vec<_>>>()?;
    Ok(lhs.coeffs == red)
}

/// ord_p(a_p) ≥ r for the filtration depth (r, s), and ord_p(a_p) ≥ μ_min
/// when r = s and r ≤ μ_min < r + 1. A vanishing a_p satisfies both.
pub fn slope_bound(f: &NormalizedSymbol) -> Result<bool> {
    let (r, s) = filtration_depth(f);
    let Some(v) = f.slope()? else { return Ok(true) };
    let rq = Q::from_integer(BigInt::from(r));
    if v < rq {
        return Ok(false);
    }
    if r == s {
        let m = mu_min(f)?;
        if rq <= m && m < rq.clone() + Q::from_integer(BigInt::from(1)) && v < m {
            return Ok(false);
        }
    }
    Ok(true)
}
