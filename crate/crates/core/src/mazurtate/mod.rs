//! Mazur–Tate elements of modular symbols, their ω-decomposition, and
//! p-stabilization of ordinary eigensymbols.

pub mod group;

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::arith::int::{pow_u64, Q};
use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::modsym::normalize::NormalizedSymbol;
use crate::modsym::{CosetSymbol, Mat2};
use crate::modsym::p1::P1List;
use crate::padic::{teichmuller, PAdic, ResidueElement};

pub use group::{
    invariants, lambda_invariant, lambda_residue, mu_invariant, q_n, reduce_scaled, units_mod, CyclicGroupRingElement,
    FullGroupRingElement, InvariantPair,
};

/// Largest number of divisor evaluations one Mazur–Tate element may use.
pub const MT_BUDGET: u64 = 2_000_000;

/// ϑₙ: the coefficient of σ_a is the Y^g coefficient of φ({∞} − {a/pⁿ}).
pub fn mazur_tate<C: Coeff>(sym: &CosetSymbol<C>, p: u64, n: u32) -> Result<FullGroupRingElement<C>> {
    if n == 0 {
        return Err(Error::InvalidInput("Mazur–Tate elements start at level 1".into()));
    }
    let units = units_mod(p, n);
    if units.len() as u64 > MT_BUDGET {
        return Err(Error::OutOfBudget(format!("{} divisor evaluations", units.len())));
    }
    let m = p.pow(n) as i128;
    let coeffs = units.iter().map(|&a| sym.path_coefficient(a as i128, m, 0).neg()).collect();
    Ok(FullGroupRingElement { p, n, units, coeffs })
}

/// dlog table: position j holds (1 + p)^j mod p^(n+1), j < pⁿ.
fn dlog_table(p: u64, n: u32) -> std::collections::HashMap<u64, u64> {
    let m = p.pow(n + 1);
    let mut t = std::collections::HashMap::new();
    let mut x = 1u64;
    for j in 0..p.pow(n) {
        t.insert(x, j);
        x = ((x as u128 * (1 + p) as u128) % m as u128) as u64;
    }
    t
}

/// σ_a ↦ w(a)·γₙ^(dlog⟨a⟩) from level n+1 to the cyclic level n, where
/// `w(a)` is ω(a)^i in the coefficient ring.
fn omega_project<C: Coeff>(
    theta: &FullGroupRingElement<C>,
    i: u32,
    w: impl Fn(u64) -> C,
) -> Result<CyclicGroupRingElement<C>> {
    let p = theta.p;
    if theta.n == 0 {
        return Err(Error::InvalidInput("ω-projection needs level ≥ 1".into()));
    }
    if i as u64 >= p - 1 {
        return Err(Error::InvalidInput(format!("twist {i} must be below p − 1")));
    }
    let n = theta.n - 1;
    let m = p.pow(n + 1);
    let table = dlog_table(p, n);
    let mut out = vec![theta.coeffs[0].zero_like(); p.pow(n) as usize];
    for (&a, c) in theta.units.iter().zip(&theta.coeffs) {
        // ⟨a⟩ = a·ω(a)⁻¹ mod p^(n+1)
        let om = teichmuller(p, a % p, n + 1)?.to_u64().expect("fits");
        let inv = crate::arith::int::inv_mod_u64(om, m);
        let unit_part = ((a as u128 * inv as u128) % m as u128) as u64;
        let j = *table.get(&unit_part).expect("⟨a⟩ lies in 1 + pZ");
        out[j as usize] = out[j as usize].add(&c.mul(&w(a % p)));
    }
    Ok(CyclicGroupRingElement { p, n, coeffs: out })
}

/// θ_{n,i} = ω^i(ϑ_{n+1}) over the completion.
pub fn omega_decompose(theta: &FullGroupRingElement<PAdic>, i: u32) -> Result<CyclicGroupRingElement<PAdic>> {
    let emb = theta.coeffs[0].emb.clone();
    let w = emb.working_precision().max(emb.precision);
    let p = theta.p;
    let omegas: Vec<PAdic> = (0..p)
        .map(|a| {
            if a == 0 {
                return Ok(PAdic::from_int(&emb, &BigInt::from(0)));
            }
            let t = teichmuller(p, a, w)?;
            Ok(PAdic::from_int(&emb, &t.modpow(&BigInt::from(i), &pow_u64(p, w))))
        })
        .collect::<Result<_>>()?;
    omega_project(theta, i, |a| omegas[a as usize].clone())
}

/// θ_{n,i} over the residue field, where ω(a) reduces to a.
pub fn omega_decompose_residue(
    theta: &FullGroupRingElement<ResidueElement>,
    i: u32,
) -> Result<CyclicGroupRingElement<ResidueElement>> {
    let field = theta.coeffs[0].field.clone();
    omega_project(theta, i, |a| field.from_u64(crate::arith::int::pow_mod_u64(a, i as u64, theta.p)))
}

/// θ_{n,i}(φ) for a symbol with p-adic values.
pub fn theta_ni(sym: &CosetSymbol<PAdic>, p: u64, n: u32, i: u32) -> Result<CyclicGroupRingElement<PAdic>> {
    omega_decompose(&mazur_tate(sym, p, n + 1)?, i)
}

/// θ_{n,i} for a residue-field symbol.
pub fn theta_ni_residue(
    sym: &CosetSymbol<ResidueElement>,
    p: u64,
    n: u32,
    i: u32,
) -> Result<CyclicGroupRingElement<ResidueElement>> {
    omega_decompose_residue(&mazur_tate(sym, p, n + 1)?, i)
}

/// The p-stabilization φ − α⁻¹·φ|(p,0;0,1) at level Mp of an ordinary
/// eigensymbol; it is a U_p-eigensymbol with eigenvalue α. The result is
/// deliberately not renormalized.
#[derive(Clone, Debug)]
pub struct Stabilized {
    pub base: NormalizedSymbol,
    /// Unit root of x² − a_p x + p^(k−1).
    pub alpha: PAdic,
    pub symbol: CosetSymbol<PAdic>,
}

/// φ|(p,0;0,1) as a symbol at level Mp.
pub fn degeneracy_p(sym: &CosetSymbol<PAdic>, p: u64) -> CosetSymbol<PAdic> {
    let target = Arc::new(P1List::new(sym.level() * p));
    sym.apply(&[[p as i128, 0, 0, 1]], &target)
}

/// U_p = Σ_a |(1,a;0,p) on a symbol whose level is divisible by p.
pub fn u_p(sym: &CosetSymbol<PAdic>, p: u64) -> CosetSymbol<PAdic> {
    let deltas: Vec<Mat2> = (0..p as i128).map(|a| [1, a, 0, p as i128]).collect();
    sym.apply(&deltas, &sym.p1)
}

/// Unit root of x² − a x + c by Newton iteration from a.
pub fn unit_root(a: &PAdic, c: &PAdic) -> Result<PAdic> {
    if a.valuation_capped() != Some(Q::from_integer(BigInt::from(0))) {
        return Err(Error::NotOrdinary);
    }
    let two = BigInt::from(2);
    let mut x = a.clone();
    let steps = 64 - (a.emb.working_precision().max(1) as u64).leading_zeros() + 2;
    for _ in 0..steps {
        let fx = x.mul(&x).sub(&a.mul(&x)).add(c);
        let dfx = x.scale_int(&two).sub(a);
        x = x.sub(&fx.mul(&dfx.inv()?));
    }
    Ok(x)
}

pub fn p_stabilize(sym: &NormalizedSymbol) -> Result<Stabilized> {
    let p = sym.p();
    if sym.level().is_multiple_of(p) {
        return Err(Error::InvalidInput("p must not divide the level".into()));
    }
    let emb = sym.embedding.clone();
    let ap = PAdic::from_field(&emb, &sym.a_p()?);
    let c = PAdic::from_int(&emb, &pow_u64(p, sym.weight() - 1));
    let alpha = unit_root(&ap, &c)?;
    let target = Arc::new(P1List::new(sym.level() * p));
    let symbol = sym.local.restrict(&target).sub(&degeneracy_p(&sym.local, p).scale(&alpha.inv()?));
    Ok(Stabilized { base: sym.clone(), alpha, symbol })
}

/// ψ_{n,i} = α^(−n)·θ_{n,i}(f_α) together with its invariants.
pub fn lp_approx(stab: &Stabilized, i: u32, n: u32) -> Result<(CyclicGroupRingElement<PAdic>, InvariantPair)> {
    let p = stab.base.p();
    let theta = theta_ni(&stab.symbol, p, n, i)?;
    let mut s = stab.alpha.one_like();
    let ainv = stab.alpha.inv()?;
    for _ in 0..n {
        s = s.mul(&ainv);
    }
    let psi = theta.scale(&s);
    let inv = invariants(&psi)?;
    Ok((psi, inv))
}

fn padic_strings(c: &[PAdic]) -> Vec<String> {
    c.iter().map(|x| x.to_string()).collect()
}

pub fn full_to_json(t: &FullGroupRingElement<PAdic>) -> Value {
    json!({"p": t.p, "n": t.n, "group": "full", "coeffs": padic_strings(&t.coeffs)})
}

pub fn cyclic_to_json(t: &CyclicGroupRingElement<PAdic>) -> Value {
    json!({"p": t.p, "n": t.n, "group": "cyclic", "coeffs": padic_strings(&t.coeffs)})
}
