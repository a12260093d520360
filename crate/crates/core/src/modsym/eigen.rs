//! Cuspidal ±-subspaces and their decomposition into Galois classes of
//! Hecke eigensymbols.
//!
//! The cuspidal part of the ι = ±1 eigenspace is cut out by removing the
//! generalized eigenspace of T_ℓ₀ for the Eisenstein eigenvalue 1 + ℓ₀^(k−1),
//! ℓ₀ the least prime not dividing M. For squarefree M every Eisenstein
//! symbol has that eigenvalue and no cusp form does (|a_ℓ| ≤ 2ℓ^((k−1)/2)),
//! so the complement is exactly the cuspidal part.
//!
//! Splitting is deterministic: a fixed list of Hecke combinations is tried
//! in order, and any factor of multiplicity > 1 is split recursively inside
//! its generalized eigenspace, where U_q for q | M becomes available. The
//! other sign makes identical choices, so classes of both signs share keys.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::factor::factor_monic;
use crate::arith::int::{is_prime, prime_divisors, q_big, q_int, Q};
use crate::arith::poly::{self, monic_integral, QPoly, ZPoly};
use crate::arith::qmat::QMat;
use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::padic::{make_field, FieldElem, NumberField};

use super::space::{build_space, HeckeOp, ManinSymbolSpace};
use super::symbol::CosetSymbol;

/// A Hecke combination Σ c·op.
pub type Combo = Vec<(HeckeOp, i64)>;

fn combo_label(c: &Combo) -> String {
    c.iter()
        .map(|(op, k)| if *k == 1 { op.key() } else { format!("{k}{}", op.key()) })
        .collect::<Vec<_>>()
        .join("+")
}

/// Persistent backing for Hecke matrices, keyed by (level, weight, op).
pub trait MatrixStore {
    fn load(&self, level: u64, weight: u32, op: HeckeOp) -> Option<QMat>;
    fn store(&self, level: u64, weight: u32, op: HeckeOp, m: &QMat);
}

/// Hecke matrices of one space, computed on first use.
pub struct HeckeCache {
    pub space: Arc<ManinSymbolSpace>,
    mats: BTreeMap<HeckeOp, QMat>,
    backing: Option<Arc<dyn MatrixStore>>,
}

impl HeckeCache {
    pub fn new(space: Arc<ManinSymbolSpace>) -> Self {
        HeckeCache { space, mats: BTreeMap::new(), backing: None }
    }

    /// A cache that consults `store` before computing and writes back after.
    pub fn with_store(space: Arc<ManinSymbolSpace>, store: Arc<dyn MatrixStore>) -> Self {
        HeckeCache { space, mats: BTreeMap::new(), backing: Some(store) }
    }

    pub fn matrix(&mut self, op: HeckeOp) -> Result<&QMat> {
        if !self.mats.contains_key(&op) {
            let (level, weight) = (self.space.level, self.space.weight);
            let loaded = self
                .backing
                .as_ref()
                .and_then(|b| b.load(level, weight, op))
                .filter(|m| m.rows == self.space.dim() && m.cols == self.space.dim());
            let m = match loaded {
                Some(m) => m,
                None => {
                    let m = super::space::hecke_matrix(&self.space, op)?;
                    if let Some(b) = &self.backing {
                        b.store(level, weight, op, &m);
                    }
                    m
                }
            };
            self.mats.insert(op, m);
        }
        Ok(&self.mats[&op])
    }

    /// Inserts a matrix computed elsewhere (e.g. loaded from disk).
    pub fn insert(&mut self, op: HeckeOp, m: QMat) {
        self.mats.insert(op, m);
    }

    pub fn combo(&mut self, c: &Combo) -> Result<QMat> {
        let n = self.space.dim();
        let mut acc = QMat::zeros(n, n);
        for (op, k) in c {
            let m = self.matrix(*op)?.scale(&q_int(*k));
            acc = acc.add(&m);
        }
        Ok(acc)
    }
}

/// A subspace with a basis (columns) and a left inverse on chosen rows.
#[derive(Clone, Debug)]
pub struct Subspace {
    pub basis: QMat,
    rows: Vec<usize>,
    inv: QMat,
}

impl Subspace {
    pub fn from_vectors(vs: &[Vec<Q>], ambient: usize) -> Self {
        let basis = QMat::from_cols(vs, ambient);
        let rows = basis.independent_rows();
        let inv = basis.select_rows(&rows).inverse().expect("basis vectors are independent");
        Subspace { basis, rows, inv }
    }

    pub fn dim(&self) -> usize {
        self.basis.cols
    }

    /// Matrix of an endomorphism of the ambient space that preserves this
    /// subspace, in the subspace basis.
    pub fn restrict(&self, a: &QMat) -> QMat {
        self.inv.mul(&a.mul(&self.basis).select_rows(&self.rows))
    }

    /// Ambient vectors from subspace coordinates.
    pub fn lift(&self, coords: &[Q]) -> Vec<Q> {
        self.basis.mul_vec(coords)
    }
}

/// The ι = sign eigenspace.
pub fn sign_subspace(cache: &mut HeckeCache, sign: i32) -> Result<Subspace> {
    if sign != 1 && sign != -1 {
        return Err(Error::InvalidInput(format!("sign must be +1 or -1, got {sign}")));
    }
    let n = cache.space.dim();
    let iota = cache.matrix(HeckeOp::Iota)?.clone();
    let k = iota.sub(&QMat::identity(n).scale(&q_int(sign as i64))).kernel();
    Ok(Subspace::from_vectors(&k, n))
}

fn least_good_prime(level: u64) -> u64 {
    (2..).find(|&l| is_prime(l) && !level.is_multiple_of(l)).unwrap()
}

fn integral_charpoly(a: &QMat) -> Result<ZPoly> {
    monic_integral(&a.charpoly())
        .ok_or_else(|| Error::InvalidInput("Hecke characteristic polynomial is not integral".into()))
}

/// The cuspidal part of the ι = sign eigenspace (squarefree level only).
pub fn cuspidal_subspace(cache: &mut HeckeCache, sign: i32) -> Result<Subspace> {
    let space = cache.space.clone();
    if prime_divisors(space.level).iter().any(|&q| space.level.is_multiple_of(q * q)) {
        return Err(Error::InvalidInput(format!(
            "cuspidal subspaces are only cut out at squarefree level, got {}",
            space.level
        )));
    }
    let v = sign_subspace(cache, sign)?;
    if v.dim() == 0 {
        return Ok(v);
    }
    let l0 = least_good_prime(space.level);
    let t = v.restrict(cache.matrix(HeckeOp::T(l0))?);
    let e = BigInt::from(l0).pow(space.weight - 1) + 1u32;
    let lin: QPoly = vec![-q_big(e.clone()), Q::one()];
    let mut cp = t.charpoly();
    let mut mult = 0;
    loop {
        let (q, r) = poly::qdivrem(&cp, &lin);
        if !poly::qtrim(r).is_empty() {
            break;
        }
        cp = q;
        mult += 1;
    }
    let mut op = t.clone();
    for i in 0..t.rows {
        let x = op.at(i, i) - q_big(e.clone());
        op.set(i, i, x);
    }
    let mut pw = QMat::identity(t.rows);
    for _ in 0..mult {
        pw = pw.mul(&op);
    }
    let cols: Vec<Vec<Q>> = pw.column_basis().iter().map(|c| v.lift(c)).collect();
    Ok(Subspace::from_vectors(&cols, space.dim()))
}

/// The deterministic list of splitting combinations for a level.
pub fn splitting_combos(level: u64, ell_max: u64) -> Vec<Combo> {
    let ps: Vec<u64> = (2..=ell_max.max(7)).filter(|&l| is_prime(l) && !level.is_multiple_of(l)).take(3).collect();
    let qs = prime_divisors(level);
    let t = |l: u64| HeckeOp::T(l);
    let mut out: Vec<Combo> = vec![vec![(t(ps[0]), 1)]];
    if ps.len() > 1 {
        for j in 1..=4 {
            out.push(vec![(t(ps[0]), 1), (t(ps[1]), j)]);
        }
    }
    if ps.len() > 2 {
        out.push(vec![(t(ps[0]), 1), (t(ps[1]), 1), (t(ps[2]), 1)]);
    }
    for &q in &qs {
        out.push(vec![(HeckeOp::U(q), 1)]);
        for j in 1..=3 {
            out.push(vec![(t(ps[0]), 1), (HeckeOp::U(q), j)]);
        }
    }
    if qs.len() > 1 {
        out.push(vec![(HeckeOp::U(qs[0]), 1), (HeckeOp::U(qs[1]), 1)]);
        out.push(vec![(HeckeOp::U(qs[0]), 1), (HeckeOp::U(qs[1]), 2)]);
    }
    out
}

/// One Galois class before its eigenvector is formed.
struct Leaf {
    path: Vec<String>,
    combo: Combo,
    sub: Subspace,
    factor: ZPoly,
}

fn kernel_of_poly_power(a: &QMat, f: &ZPoly, m: usize) -> Vec<Vec<Q>> {
    let fq = poly::from_z(f);
    let mut fm: QPoly = vec![Q::one()];
    for _ in 0..m {
        fm = poly::qmul(&fm, &fq);
    }
    a.poly_eval(&fm).kernel()
}

fn split(cache: &mut HeckeCache, sub: Subspace, combos: &[Combo], path: Vec<String>, out: &mut Vec<Leaf>) -> Result<()> {
    if sub.dim() == 0 {
        return Ok(());
    }
    for combo in combos {
        let a = sub.restrict(&cache.combo(combo)?);
        let cp = integral_charpoly(&a)?;
        let fs = factor_monic(&cp);
        if fs.len() == 1 && fs[0].1 > 1 {
            continue;
        }
        for (f, m) in fs {
            let mut p = path.clone();
            p.push(format!("{}:{}", combo_label(combo), poly::pretty(&f)));
            if m == 1 {
                let ker = kernel_of_poly_power(&a, &f, 1);
                let vecs: Vec<Vec<Q>> = ker.iter().map(|k| sub.lift(k)).collect();
                let s = Subspace::from_vectors(&vecs, cache.space.dim());
                out.push(Leaf { path: p, combo: combo.clone(), sub: s, factor: f });
            } else {
                let ker = kernel_of_poly_power(&a, &f, m);
                let vecs: Vec<Vec<Q>> = ker.iter().map(|k| sub.lift(k)).collect();
                let s = Subspace::from_vectors(&vecs, cache.space.dim());
                split(cache, s, combos, p, out)?;
            }
        }
        return Ok(());
    }
    Err(Error::SplittingFailure(format!(
        "a {}-dimensional Hecke-stable subspace at level {} weight {} stays isotypic under every combination",
        sub.dim(),
        cache.space.level,
        cache.space.weight
    )))
}

/// A Galois class of cuspidal Hecke eigensymbols, realized over its
/// eigenvalue field.
#[derive(Clone, Debug)]
pub struct Eigensymbol {
    pub space: Arc<ManinSymbolSpace>,
    pub sign: i32,
    pub field: Arc<NumberField>,
    /// The splitting path; equal for the two signs of one class.
    pub key: String,
    pub splitting: Combo,
    /// Coordinates in the free basis of the space.
    pub coords: Vec<FieldElem>,
    pub symbol: CosetSymbol<FieldElem>,
    /// a_ℓ: T_ℓ eigenvalues for ℓ ∤ M and U_q eigenvalues for q | M.
    pub eigenvalues: BTreeMap<u64, FieldElem>,
    pub is_cuspidal: bool,
}

impl Eigensymbol {
    pub fn level(&self) -> u64 {
        self.space.level
    }

    pub fn weight(&self) -> u32 {
        self.space.weight
    }

    /// Eigenvalue of an operator that preserves the space, from one row of
    /// its matrix.
    pub fn eigenvalue_of(&self, op: HeckeOp) -> Result<FieldElem> {
        let deltas = op.deltas(self.space.level)?;
        let t0 = self.coords.iter().position(|c| !c.is_zero()).expect("eigensymbols are nonzero");
        let row = self.space.operator_rows(&self.space, &deltas, &[t0]);
        let mut acc = FieldElem::zero(&self.field);
        for (f, c) in self.coords.iter().enumerate() {
            let x = row.at(0, f);
            if !Zero::is_zero(x) && !c.is_zero() {
                acc = acc.add(&c.scale_q(x));
            }
        }
        acc.div(&self.coords[t0])
    }

    /// a_ℓ, from the stored table or computed on demand.
    pub fn a(&self, l: u64) -> Result<FieldElem> {
        if let Some(x) = self.eigenvalues.get(&l) {
            return Ok(x.clone());
        }
        if self.space.level.is_multiple_of(l) {
            self.eigenvalue_of(HeckeOp::U(l))
        } else {
            self.eigenvalue_of(HeckeOp::T(l))
        }
    }

    /// The full matrix of `op` applied to the coordinates.
    pub fn apply_matrix(&self, m: &QMat) -> Vec<FieldElem> {
        (0..m.rows)
            .map(|i| {
                let mut acc = FieldElem::zero(&self.field);
                for (j, c) in self.coords.iter().enumerate() {
                    let x = m.at(i, j);
                    if !Zero::is_zero(x) && !c.is_zero() {
                        acc = acc.add(&c.scale_q(x));
                    }
                }
                acc
            })
            .collect()
    }

    /// Whether the class is new: its a_ℓ for the two least primes ℓ ∤ M are
    /// not both roots of the T_ℓ characteristic polynomials at some level M/q.
    pub fn is_new(&self) -> Result<bool> {
        let level = self.space.level;
        let ls: Vec<u64> = (2..).filter(|&l| is_prime(l) && !level.is_multiple_of(l)).take(2).collect();
        for q in prime_divisors(level) {
            let lower = build_space(level / q, self.space.weight)?;
            let mut old = true;
            for &l in &ls {
                let cp = super::space::hecke_matrix(&lower, HeckeOp::T(l))?.charpoly();
                let mp = self.a(l)?.minpoly();
                if !poly::qtrim(poly::qdivrem(&cp, &mp).1).is_empty() {
                    old = false;
                    break;
                }
            }
            if old {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn eigenvector(cache: &mut HeckeCache, leaf: &Leaf) -> Result<(Arc<NumberField>, Vec<FieldElem>)> {
    let a = leaf.sub.restrict(&cache.combo(&leaf.combo)?);
    let w = a.rows;
    let f = &leaf.factor;
    let d = f.len() - 1;
    let field = make_field(f)?;
    let cp = integral_charpoly(&a)?;
    let h = poly::from_z(&poly::zdiv_exact(&cp, f).expect("factor divides the characteristic polynomial"));
    let u = (0..w)
        .map(|j| {
            let mut e = vec![Q::zero(); w];
            e[j] = Q::one();
            a.poly_apply(&h, &e)
        })
        .find(|u| u.iter().any(|x| !Zero::is_zero(x)))
        .expect("the f-part is nonzero");
    // A^j u for j < d
    let mut pows = vec![u];
    for _ in 1..d {
        let next = a.mul_vec(pows.last().unwrap());
        pows.push(next);
    }
    // V_m = Σ_j f_(m+1+j) A^j u; then Σ θ^m V_m is a θ-eigenvector of A.
    let fq = poly::from_z(f);
    let comps: Vec<Vec<Q>> = (0..d)
        .map(|m| {
            let mut v = vec![Q::zero(); w];
            for (j, pj) in pows.iter().enumerate().take(d - m) {
                let c = &fq[m + 1 + j];
                if Zero::is_zero(c) {
                    continue;
                }
                for (x, y) in v.iter_mut().zip(pj) {
                    *x += c * y;
                }
            }
            leaf.sub.lift(&v)
        })
        .collect();
    let n = cache.space.dim();
    let mut coords: Vec<FieldElem> = (0..n)
        .map(|t| FieldElem::from_poly(&field, &comps.iter().map(|c| c[t].clone()).collect::<Vec<_>>()))
        .collect();
    // clear the common denominator so coordinates are integral combinations
    let den = coords.iter().fold(BigInt::one(), |l, c| num_integer::Integer::lcm(&l, c.denominator()));
    if !den.is_one() {
        coords = coords.iter().map(|c| c.scale_int(&den)).collect();
    }
    Ok((field, coords))
}

fn minpoly_order_key(f: &ZPoly) -> (usize, Vec<BigInt>) {
    (f.len(), f.iter().rev().cloned().collect())
}

/// One eigensymbol per Galois class of cuspidal eigenforms in the ι = sign
/// part, ordered by (field degree, minimal polynomial read from the top).
pub fn cuspidal_eigensymbols(cache: &mut HeckeCache, sign: i32, ell_max: u64) -> Result<Vec<Eigensymbol>> {
    let space = cache.space.clone();
    let c = cuspidal_subspace(cache, sign)?;
    let combos = splitting_combos(space.level, ell_max);
    let mut leaves = Vec::new();
    split(cache, c, &combos, Vec::new(), &mut leaves)?;
    leaves.sort_by(|x, y| (minpoly_order_key(&x.factor), &x.path).cmp(&(minpoly_order_key(&y.factor), &y.path)));
    let mut out = Vec::new();
    for leaf in &leaves {
        let (field, coords) = eigenvector(cache, leaf)?;
        let values = space.values(&coords);
        let symbol = CosetSymbol::new(space.p1.clone(), values);
        let mut e = Eigensymbol {
            space: space.clone(),
            sign,
            field,
            key: leaf.path.join(" / "),
            splitting: leaf.combo.clone(),
            coords,
            symbol,
            eigenvalues: BTreeMap::new(),
            is_cuspidal: true,
        };
        for l in (2..=ell_max).filter(|&l| is_prime(l)) {
            let a = e.a(l)?;
            e.eigenvalues.insert(l, a);
        }
        out.push(e);
    }
    Ok(out)
}

/// Convenience: build the space and decompose one sign.
pub fn eigensymbols_at(level: u64, weight: u32, sign: i32, ell_max: u64) -> Result<Vec<Eigensymbol>> {
    let space = Arc::new(build_space(level, weight)?);
    let mut cache = HeckeCache::new(space);
    cuspidal_eigensymbols(&mut cache, sign, ell_max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(e: &FieldElem) -> Q {
        assert!(e.is_rational());
        e.coeffs()[0].clone()
    }

    #[test]
    fn x0_11_weight_two() {
        let es = eigensymbols_at(11, 2, 1, 13).unwrap();
        assert_eq!(es.len(), 1);
        let e = &es[0];
        assert_eq!(rat(&e.eigenvalues[&2]), q_int(-2));
        assert_eq!(rat(&e.eigenvalues[&3]), q_int(-1));
        assert_eq!(rat(&e.eigenvalues[&5]), q_int(1));
        assert_eq!(rat(&e.eigenvalues[&11]), q_int(1));
        assert!(e.symbol.satisfies_manin_relations());
        assert!(e.is_new().unwrap());
    }

    #[test]
    fn eigen_property_holds_for_every_matrix() {
        let space = Arc::new(build_space(17, 6).unwrap());
        let mut cache = HeckeCache::new(space.clone());
        for sign in [1, -1] {
            let es = cuspidal_eigensymbols(&mut cache, sign, 7).unwrap();
            for e in &es {
                for op in [HeckeOp::T(2), HeckeOp::T(3), HeckeOp::T(5), HeckeOp::U(17)] {
                    let m = cache.matrix(op).unwrap().clone();
                    let lhs = e.apply_matrix(&m);
                    let a = e.eigenvalue_of(op).unwrap();
                    let rhs: Vec<FieldElem> = e.coords.iter().map(|c| c.mul(&a)).collect();
                    assert_eq!(lhs, rhs);
                }
                let i = cache.matrix(HeckeOp::Iota).unwrap().clone();
                let s = FieldElem::from_int(&e.field, &BigInt::from(sign));
                assert_eq!(e.apply_matrix(&i), e.coords.iter().map(|c| c.mul(&s)).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn signs_share_class_keys() {
        let space = Arc::new(build_space(11, 8).unwrap());
        let mut cache = HeckeCache::new(space);
        let plus = cuspidal_eigensymbols(&mut cache, 1, 5).unwrap();
        let minus = cuspidal_eigensymbols(&mut cache, -1, 5).unwrap();
        let kp: Vec<_> = plus.iter().map(|e| (&e.key, &e.field.minpoly)).collect();
        let km: Vec<_> = minus.iter().map(|e| (&e.key, &e.field.minpoly)).collect();
        assert_eq!(kp, km);
        // dim S_8(Γ₀(11)) = (k/2 − 1)·#cusps = 6 since X₀(11) has genus 1 and no elliptic points
        assert_eq!(plus.iter().map(|e| e.field.degree).sum::<usize>(), 6);
    }
}
