//! Manin-symbol presentations of weight-k modular symbols for Γ₀(M).
//!
//! A symbol φ is stored through its coset function F(h) = φ(h·D₀)|h with
//! D₀ = {0} − {∞}; F depends only on the coset Γ₀(M)h, so it is a vector
//! of degree-g polynomials indexed by P¹(Z/M). The unknowns are the pairs
//! (coset, monomial) and the presentation expresses every unknown as a
//! rational combination of a set of free unknowns, subject to
//!
//!   F(h) + F(hσ)|σ = 0,   F(h) + F(hτ)|τ² + F(hτ²)|τ = 0.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::int::{is_prime, Q};
use crate::arith::qmat::QMat;
use crate::coeff::Coeff;
use crate::error::{Error, Result};

use super::hpoly::HomogeneousPoly;
use super::mat2::{self, actmat, adj, cf_paths, Mat2};
use super::p1::P1List;

/// Presentations with more unknowns than this are refused.
pub const DEFAULT_BUDGET: usize = 60_000;

#[derive(Debug)]
pub struct ManinSymbolSpace {
    pub level: u64,
    pub weight: u32,
    pub g: usize,
    pub p1: Arc<P1List>,
    /// Unknown index (coset·(g+1) + j) of each free coordinate.
    pub free: Vec<usize>,
    /// Each unknown as Σ c·x_free / den; sparse, sorted by free index.
    expr: Vec<Vec<(u32, BigInt)>>,
    den: BigInt,
}

/// Hecke and related operators, as sums of φ ↦ φ|δ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HeckeOp {
    /// T_ℓ for a prime ℓ not dividing the level.
    T(u64),
    /// U_q for a prime q dividing the level.
    U(u64),
    /// φ ↦ φ|diag(−1, 1).
    Iota,
    /// φ ↦ φ|(0, −1; N, 0).
    W,
    /// Level N to level N·d via φ ↦ φ|diag(r, 1), r | d.
    Degeneracy { d: u64, r: u64 },
}

impl HeckeOp {
    pub fn key(&self) -> String {
        match self {
            HeckeOp::T(l) => format!("T{l}"),
            HeckeOp::U(q) => format!("U{q}"),
            HeckeOp::Iota => "iota".into(),
            HeckeOp::W => "W".into(),
            HeckeOp::Degeneracy { d, r } => format!("B{d}_{r}"),
        }
    }

    /// The matrices δ with op = Σ |δ, after checking validity at `level`.
    pub fn deltas(&self, level: u64) -> Result<Vec<Mat2>> {
        let bad = |m: String| Err(Error::InvalidOperator(m));
        match *self {
            HeckeOp::T(l) => {
                if !is_prime(l) || level.is_multiple_of(l) {
                    return bad(format!("T_{l} needs a prime not dividing {level}"));
                }
                let l = l as i128;
                let mut v: Vec<Mat2> = (0..l).map(|a| [1, a, 0, l]).collect();
                v.push([l, 0, 0, 1]);
                Ok(v)
            }
            HeckeOp::U(q) => {
                if !is_prime(q) || !level.is_multiple_of(q) {
                    return bad(format!("U_{q} needs a prime dividing {level}"));
                }
                let q = q as i128;
                Ok((0..q).map(|a| [1, a, 0, q]).collect())
            }
            HeckeOp::Iota => Ok(vec![mat2::IOTA]),
            HeckeOp::W => Ok(vec![[0, -1, level as i128, 0]]),
            HeckeOp::Degeneracy { d, r } => {
                if d == 0 || r == 0 || d % r != 0 {
                    return bad(format!("degeneracy B_{{{d},{r}}} needs r | d"));
                }
                Ok(vec![mat2::diag(r as i128, 1)])
            }
        }
    }
}

/// Unimodular decomposition of φ(m·D₀)|m: terms (sign, g, a) standing for
/// sign · F(g)|a, where F(g) is the coset-function value of g.
pub fn pullback_terms(m: &Mat2) -> Vec<(i32, Mat2, Mat2)> {
    let mut out = Vec::new();
    // m·D₀ = {b/d} − {a/c}; each cusp path {x} − {∞} is Σ φ(g D₀) = Σ F(g)|adj(g)
    for (sign, num, den) in [(1, m[1], m[3]), (-1, m[0], m[2])] {
        for g in cf_paths(num, den) {
            out.push((sign, g, mat2::mul(&adj(&g), m)));
        }
    }
    out
}

/// Signed union–find over unknowns: value(u) = sign · value(parent).
struct SignedUf {
    parent: Vec<usize>,
    sign: Vec<i8>,
    zero: Vec<bool>,
}

impl SignedUf {
    fn new(n: usize) -> Self {
        SignedUf { parent: (0..n).collect(), sign: vec![1; n], zero: vec![false; n] }
    }

    fn find(&mut self, u: usize) -> (usize, i8) {
        let p = self.parent[u];
        if p == u {
            return (u, 1);
        }
        let (r, s) = self.find(p);
        self.parent[u] = r;
        self.sign[u] *= s;
        (r, self.sign[u])
    }

    /// Imposes value(u) = c · value(v).
    fn union(&mut self, u: usize, v: usize, c: i8) {
        let (ru, su) = self.find(u);
        let (rv, sv) = self.find(v);
        if ru == rv {
            if su != c * sv {
                self.zero[ru] = true;
            }
            return;
        }
        // value(ru) = su·value(u) = su·c·sv·value(rv)
        self.parent[ru] = rv;
        self.sign[ru] = su * c * sv;
        let z = self.zero[ru];
        self.zero[rv] |= z;
    }
}

fn make_primitive(row: &mut [BigInt]) {
    let mut g = BigInt::zero();
    let mut lead_neg = None;
    for x in row.iter() {
        if !x.is_zero() {
            g = g.gcd(x);
            lead_neg.get_or_insert(x.is_negative());
        }
    }
    if g.is_zero() {
        return;
    }
    if lead_neg == Some(true) {
        g = -g;
    }
    if !g.is_one() {
        for x in row.iter_mut() {
            if !x.is_zero() {
                *x /= &g;
            }
        }
    }
}

/// row ← a·row − b·other, where a = other[col], b = row[col].
fn eliminate(row: &mut [BigInt], other: &[BigInt], col: usize) {
    let a = other[col].clone();
    let b = row[col].clone();
    if b.is_zero() {
        return;
    }
    let ga = a.gcd(&b);
    let (a, b) = (&a / &ga, &b / &ga);
    for (x, y) in row.iter_mut().zip(other) {
        if y.is_zero() {
            if !x.is_zero() && !a.is_one() {
                *x *= &a;
            }
        } else {
            *x = &*x * &a - y * &b;
        }
    }
    make_primitive(row);
}

impl ManinSymbolSpace {
    pub fn ncosets(&self) -> usize {
        self.p1.len()
    }

    pub fn nunknowns(&self) -> usize {
        self.p1.len() * (self.g + 1)
    }

    pub fn dim(&self) -> usize {
        self.free.len()
    }

    /// Unknown u as (Σ c_t·x_t, den) in free coordinates.
    pub fn expression(&self, u: usize) -> (&[(u32, BigInt)], &BigInt) {
        (&self.expr[u], &self.den)
    }

    /// Coset-function values of the symbol with the given free coordinates.
    pub fn values<C: Coeff>(&self, coords: &[C]) -> Vec<HomogeneousPoly<C>> {
        assert_eq!(coords.len(), self.dim());
        let zero = coords[0].zero_like();
        let vals: Vec<C> = self
            .expr
            .iter()
            .map(|e| {
                let mut s = zero.clone();
                for (t, c) in e {
                    let x = &coords[*t as usize];
                    if !x.is_zero() {
                        s = s.add(&x.scale_int(c));
                    }
                }
                s.div_int(&self.den)
            })
            .collect();
        vals.chunks(self.g + 1).map(|c| HomogeneousPoly::new(c.to_vec())).collect()
    }

    /// Matrix (rows = free coordinates of `self`, columns = free coordinates
    /// of `src`) of φ ↦ Σ_δ φ|δ from the symbols of `src` to those of `self`.
    pub fn operator_from(&self, src: &ManinSymbolSpace, deltas: &[Mat2]) -> QMat {
        let all: Vec<usize> = (0..self.dim()).collect();
        self.operator_rows(src, deltas, &all)
    }

    /// The listed rows of [`Self::operator_from`], in the listed order.
    pub fn operator_rows(&self, src: &ManinSymbolSpace, deltas: &[Mat2], wanted: &[usize]) -> QMat {
        assert_eq!(self.g, src.g, "operators preserve the weight");
        let g = self.g;
        let mut by_coset: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
        for (k, &t) in wanted.iter().enumerate() {
            let u = self.free[t];
            by_coset.entry(u / (g + 1)).or_default().push((k, u % (g + 1)));
        }
        let mut rows: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); src.dim()]; wanted.len()];
        for (&i, targets) in &by_coset {
            let h = self.p1.lift(i);
            for delta in deltas {
                let m = mat2::mul(delta, &h);
                for (sign, gi, a) in pullback_terms(&m) {
                    let am = actmat(&a, g);
                    let j = src.p1.coset(&gi);
                    for &(k, r) in targets {
                        let row = &mut rows[k];
                        for (s, coef) in am[r].iter().enumerate() {
                            if coef.is_zero() {
                                continue;
                            }
                            let c = if sign < 0 { -coef } else { coef.clone() };
                            for (f, e) in &src.expr[j * (g + 1) + s] {
                                row[*f as usize] += &c * e;
                            }
                        }
                    }
                }
            }
        }
        let mut out = QMat::zeros(wanted.len(), src.dim());
        for (k, row) in rows.into_iter().enumerate() {
            for (f, x) in row.into_iter().enumerate() {
                if !x.is_zero() {
                    out.set(k, f, Q::new(x, src.den.clone()));
                }
            }
        }
        out
    }

    /// Matrix of an endomorphism of this space in the free basis.
    pub fn operator(&self, deltas: &[Mat2]) -> QMat {
        self.operator_from(self, deltas)
    }
}

/// Builds the presentation with the default size cap.
pub fn build_space(level: u64, weight: u32) -> Result<ManinSymbolSpace> {
    build_space_with_budget(level, weight, DEFAULT_BUDGET)
}

pub fn build_space_with_budget(level: u64, weight: u32, budget: usize) -> Result<ManinSymbolSpace> {
    if level == 0 {
        return Err(Error::InvalidInput("level must be positive".into()));
    }
    if weight < 2 || weight % 2 == 1 {
        return Err(Error::InvalidInput(format!("weight must be even and at least 2, got {weight}")));
    }
    let g = (weight - 2) as usize;
    let p1 = Arc::new(P1List::new(level));
    let n = p1.len() * (g + 1);
    if n > budget {
        return Err(Error::OutOfBudget(format!("{n} Manin generators exceed the cap of {budget}")));
    }
    let unk = |i: usize, j: usize| i * (g + 1) + j;

    // σ-relations are signed identifications: F(hσ)_j = −(F(h)|σ)_j and
    // (P|σ)_j = (−1)^(g−j)·b_(g−j).
    let mut uf = SignedUf::new(n);
    for i in 0..p1.len() {
        let j2 = p1.coset(&mat2::mul(&p1.lift(i), &mat2::SIGMA));
        for j in 0..=g {
            let s: i8 = if (g - j).is_multiple_of(2) { -1 } else { 1 };
            uf.union(unk(j2, j), unk(i, g - j), s);
        }
    }
    let mut rep_of = vec![(usize::MAX, 0i8); n];
    let mut reps: Vec<usize> = Vec::new();
    let mut rep_index = vec![usize::MAX; n];
    for u in 0..n {
        let (r, s) = uf.find(u);
        if uf.zero[r] {
            continue;
        }
        if rep_index[r] == usize::MAX {
            rep_index[r] = reps.len();
            reps.push(r);
        }
        rep_of[u] = (rep_index[r], s);
    }
    let nrep = reps.len();

    // τ-relations over the representatives, eliminated fraction-free.
    let a1 = actmat(&mat2::TAU, g);
    let a2 = actmat(&mat2::mul(&mat2::TAU, &mat2::TAU), g);
    let mut pivots: Vec<(usize, Vec<BigInt>)> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for i in 0..p1.len() {
        let h = p1.lift(i);
        let j1 = p1.coset(&mat2::mul(&h, &mat2::TAU));
        let j2 = p1.coset(&mat2::mul3(&h, &mat2::TAU, &mat2::TAU));
        // each τ-orbit of cosets gives the same relations
        let mut orbit = [i, j1, j2];
        orbit.sort_unstable();
        if !seen.insert(orbit) {
            continue;
        }
        for r in 0..=g {
            let mut row = vec![BigInt::zero(); nrep];
            let mut add = |u: usize, c: &BigInt| {
                let (ri, s) = rep_of[u];
                if ri != usize::MAX && !c.is_zero() {
                    if s > 0 {
                        row[ri] += c;
                    } else {
                        row[ri] -= c;
                    }
                }
            };
            add(unk(i, r), &BigInt::one());
            for s in 0..=g {
                add(unk(j1, s), &a2[r][s]);
                add(unk(j2, s), &a1[r][s]);
            }
            make_primitive(&mut row);
            for (pc, prow) in &pivots {
                if !row[*pc].is_zero() {
                    eliminate(&mut row, prow, *pc);
                }
            }
            // pivot on the entry of least absolute value to limit growth
            if let Some(pc) = (0..nrep).filter(|&c| !row[c].is_zero()).min_by_key(|&c| row[c].magnitude().clone()) {
                pivots.push((pc, row));
            }
        }
    }
    // back-substitution: every pivot row ends up supported on its pivot
    // column and the free columns
    for k in (0..pivots.len()).rev() {
        let (pc, prow) = pivots[k].clone();
        for e in pivots.iter_mut().take(k) {
            if !e.1[pc].is_zero() {
                eliminate(&mut e.1, &prow, pc);
            }
        }
    }
    let is_pivot: Vec<bool> = {
        let mut v = vec![false; nrep];
        for (pc, _) in &pivots {
            v[*pc] = true;
        }
        v
    };
    let mut free_reps: Vec<usize> = (0..nrep).filter(|&c| !is_pivot[c]).collect();
    free_reps.sort_by_key(|&c| reps[c]);
    let mut coord_of_rep = vec![usize::MAX; nrep];
    for (t, &c) in free_reps.iter().enumerate() {
        coord_of_rep[c] = t;
    }
    let den = pivots.iter().fold(BigInt::one(), |l, (pc, row)| l.lcm(&row[*pc]));
    let mut rep_expr: Vec<Vec<(u32, BigInt)>> = vec![Vec::new(); nrep];
    for &c in &free_reps {
        rep_expr[c] = vec![(coord_of_rep[c] as u32, den.clone())];
    }
    for (pc, row) in &pivots {
        let scale = &den / &row[*pc];
        let mut e: Vec<(u32, BigInt)> = free_reps
            .iter()
            .filter(|&&f| !row[f].is_zero())
            .map(|&f| (coord_of_rep[f] as u32, -(&row[f] * &scale)))
            .collect();
        e.sort_by_key(|x| x.0);
        rep_expr[*pc] = e;
    }
    let expr: Vec<Vec<(u32, BigInt)>> = (0..n)
        .map(|u| {
            let (ri, s) = rep_of[u];
            if ri == usize::MAX {
                return Vec::new();
            }
            rep_expr[ri].iter().map(|(t, c)| (*t, if s > 0 { c.clone() } else { -c })).collect()
        })
        .collect();
    let free = free_reps.iter().map(|&c| reps[c]).collect();
    Ok(ManinSymbolSpace { level, weight, g, p1, free, expr, den })
}

/// Matrix of `op` in the free basis. For a degeneracy operator the target
/// space (level·d) is built here and the matrix maps this space into it.
pub fn hecke_matrix(space: &ManinSymbolSpace, op: HeckeOp) -> Result<QMat> {
    let deltas = op.deltas(space.level)?;
    match op {
        HeckeOp::Degeneracy { d, .. } => {
            let target = build_space(space.level * d, space.weight)?;
            Ok(target.operator_from(space, &deltas))
        }
        _ => Ok(space.operator(&deltas)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int::q_int;

    fn random_coords(n: usize, seed: i64) -> Vec<Q> {
        (0..n).map(|i| q_int(((i as i64 * 7919 + seed * 104_729) % 23) - 11)).collect()
    }

    #[test]
    fn presentation_satisfies_manin_relations() {
        for (m, k) in [(1, 12), (11, 2), (11, 4), (17, 6), (21, 2), (12, 4)] {
            let s = build_space(m, k).unwrap();
            let vals = s.values(&random_coords(s.dim(), 3));
            let sg = actmat(&mat2::SIGMA, s.g);
            let t1 = actmat(&mat2::TAU, s.g);
            let t2 = actmat(&mat2::mul(&mat2::TAU, &mat2::TAU), s.g);
            for i in 0..s.ncosets() {
                let h = s.p1.lift(i);
                let js = s.p1.coset(&mat2::mul(&h, &mat2::SIGMA));
                assert!(vals[i].add(&vals[js].act_with(&sg)).is_zero(), "σ at level {m} weight {k}");
                let j1 = s.p1.coset(&mat2::mul(&h, &mat2::TAU));
                let j2 = s.p1.coset(&mat2::mul3(&h, &mat2::TAU, &mat2::TAU));
                let tot = vals[i].add(&vals[j1].act_with(&t2)).add(&vals[j2].act_with(&t1));
                assert!(tot.is_zero(), "τ at level {m} weight {k}");
            }
        }
    }

    #[test]
    fn generator_count_and_dimensions() {
        let s = build_space(11, 18).unwrap();
        assert_eq!(s.nunknowns(), 204);
        // weight 2: dim = 2·genus + (#cusps − 1) = 2 + 1 for X₀(11)
        assert_eq!(build_space(11, 2).unwrap().dim(), 3);
        // level 1 weight 12: Δ twice plus one Eisenstein symbol
        assert_eq!(build_space(1, 12).unwrap().dim(), 3);
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(build_space_with_budget(11, 18, 100), Err(Error::OutOfBudget(_))));
        assert!(matches!(build_space(11, 3), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn iota_is_an_involution_and_hecke_commutes() {
        let s = build_space(17, 6).unwrap();
        let i = hecke_matrix(&s, HeckeOp::Iota).unwrap();
        assert_eq!(i.mul(&i), QMat::identity(s.dim()));
        let t2 = hecke_matrix(&s, HeckeOp::T(2)).unwrap();
        let t3 = hecke_matrix(&s, HeckeOp::T(3)).unwrap();
        assert_eq!(t2.mul(&t3), t3.mul(&t2));
        assert_eq!(t2.mul(&i), i.mul(&t2));
        assert!(matches!(hecke_matrix(&s, HeckeOp::T(17)), Err(Error::InvalidOperator(_))));
        assert!(matches!(hecke_matrix(&s, HeckeOp::U(3)), Err(Error::InvalidOperator(_))));
    }

    #[test]
    fn level_one_weight_twelve_eigenvalues() {
        // Ramanujan τ(2) = −24 and the Eisenstein eigenvalue 1 + 2^11
        let s = build_space(1, 12).unwrap();
        let t2 = hecke_matrix(&s, HeckeOp::T(2)).unwrap();
        let cp = t2.charpoly();
        let expect = crate::arith::poly::qmul(
            &crate::arith::poly::qmul(&vec![q_int(24), q_int(1)], &vec![q_int(24), q_int(1)]),
            &vec![q_int(-2049), q_int(1)],
        );
        assert_eq!(cp, expect);
    }
}
