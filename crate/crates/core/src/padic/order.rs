//! p-local structure of Z[x]/(f): enlargement to a p-maximal order by the
//! Round 2 step (multiplier ring of the p-radical), then splitting of
//! O ⊗ Z_p into local components by lifting idempotents of O/pO.
//!
//! Everything is stored modulo p^w. Each enlargement divides products by p²,
//! so w drops by 2 per step; callers restart with more room when needed.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::arith::fp::{self, FpMat};
use crate::arith::int::{inv_mod, modp, pow_u64, Q};
use crate::arith::poly::ZPoly;
use crate::arith::qmat::QMat;
use crate::arith::zpmat::{self, ZpMat};

/// Structure constants of a commutative algebra: `t[a][b]` holds the
/// coordinates of basis(a)·basis(b).
pub(crate) type Table = Vec<Vec<Vec<BigInt>>>;
type FpTable = Vec<Vec<Vec<u64>>>;

pub(crate) fn table_mul(t: &Table, x: &[BigInt], y: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let d = x.len();
    let mut out = vec![BigInt::zero(); t[0][0].len()];
    for a in 0..d {
        if x[a].is_zero() {
            continue;
        }
        for b in 0..d {
            if y[b].is_zero() {
                continue;
            }
            let c = &x[a] * &y[b];
            for (o, s) in out.iter_mut().zip(&t[a][b]) {
                if !s.is_zero() {
                    *o += &c * s;
                }
            }
        }
    }
    out.iter().map(|v| modp(v, m)).collect()
}

fn fp_table(t: &Table, p: u64) -> FpTable {
    let pb = BigInt::from(p);
    t.iter()
        .map(|r| {
            r.iter()
                .map(|v| v.iter().map(|x| modp(x, &pb).to_u64().unwrap()).collect())
                .collect()
        })
        .collect()
}

fn fp_mul(t: &FpTable, x: &[u64], y: &[u64], p: u64) -> Vec<u64> {
    let d = x.len();
    let mut out = vec![0u64; d];
    for a in 0..d {
        if x[a] == 0 {
            continue;
        }
        for b in 0..d {
            if y[b] == 0 {
                continue;
            }
            let c = fp::mulm(x[a], y[b], p);
            for (o, &s) in out.iter_mut().zip(&t[a][b]) {
                *o = fp::addm(*o, fp::mulm(c, s, p), p);
            }
        }
    }
    out
}

fn fp_pow(t: &FpTable, x: &[u64], mut e: u64, one: &[u64], p: u64) -> Vec<u64> {
    let mut acc = one.to_vec();
    let mut base = x.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = fp_mul(t, &acc, &base, p);
        }
        base = fp_mul(t, &base, &base, p);
        e >>= 1;
    }
    acc
}

fn unit_vec(d: usize, i: usize) -> Vec<u64> {
    let mut v = vec![0; d];
    v[i] = 1;
    v
}

/// Matrix (rows = output coordinates) of the Frobenius x ↦ x^p.
fn frobenius(t: &FpTable, one: &[u64], p: u64) -> FpMat {
    let d = one.len();
    let cols: Vec<Vec<u64>> = (0..d).map(|a| fp_pow(t, &unit_vec(d, a), p, one, p)).collect();
    (0..d).map(|i| (0..d).map(|j| cols[j][i]).collect()).collect()
}

/// Jacobson radical of a commutative F_p-algebra as rref rows: the kernel
/// of a Frobenius power that kills every nilpotent.
pub(crate) fn radical(t: &FpTable, one: &[u64], p: u64) -> FpMat {
    let d = one.len();
    let fr = frobenius(t, one, p);
    let mut pw = fr.clone();
    let mut q = p;
    while (q as usize) < d {
        pw = fp::mat_mul(&pw, &fr, p);
        q = q.saturating_mul(p);
    }
    let ker = fp::kernel(&pw, d, p);
    fp::row_basis(&ker, p)
}

/// Integer basis (columns) of pO + lift(S) for S given by rref rows.
fn lattice_basis(rows: &FpMat, d: usize, p: u64) -> Vec<Vec<BigInt>> {
    let mut cols: Vec<Vec<BigInt>> = (0..d)
        .map(|j| {
            let mut v = vec![BigInt::zero(); d];
            v[j] = BigInt::from(p);
            v
        })
        .collect();
    for r in rows {
        let piv = r.iter().position(|&x| x != 0).expect("rref rows are nonzero");
        cols[piv] = r.iter().map(|&x| BigInt::from(x)).collect();
    }
    cols
}

/// p times the inverse of the basis matrix; integral because p annihilates
/// O / lattice.
fn p_inverse(cols: &[Vec<BigInt>], p: u64) -> ZpMat {
    let d = cols.len();
    let m = QMat::from_cols(
        &cols.iter().map(|c| c.iter().map(|x| Q::from_integer(x.clone())).collect()).collect::<Vec<_>>(),
        d,
    );
    let inv = m.inverse().expect("lattice basis is nonsingular");
    let pq = Q::from_integer(BigInt::from(p));
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let v = inv.at(i, j) * &pq;
                    assert!(v.is_integer(), "p·B^-1 must be integral");
                    v.to_integer()
                })
                .collect()
        })
        .collect()
}

/// An order of Q_p[x]/(f) in its own basis, modulo p^w.
#[derive(Clone, Debug)]
pub(crate) struct LocalOrder {
    pub p: u64,
    pub w: u32,
    pub d: usize,
    pub table: Table,
    /// Maps integral power-basis coordinates to order coordinates.
    pub pinv: ZpMat,
    pub one: Vec<BigInt>,
}

impl LocalOrder {
    pub fn modulus(&self) -> BigInt {
        pow_u64(self.p, self.w)
    }

    /// Z_p[θ] with the power basis.
    pub fn equation_order(f: &ZPoly, p: u64, w: u32) -> Self {
        let d = f.len() - 1;
        let m = pow_u64(p, w);
        // x^k mod f for k < 2d - 1
        let mut pows: Vec<Vec<BigInt>> = Vec::with_capacity(2 * d);
        let mut cur = vec![BigInt::zero(); d];
        cur[0] = BigInt::one();
        for _ in 0..2 * d - 1 {
            pows.push(cur.clone());
            // multiply by x: shift, then reduce the overflow term
            let top = cur[d - 1].clone();
            let mut next = vec![BigInt::zero(); d];
            for i in (1..d).rev() {
                next[i] = cur[i - 1].clone();
            }
            for i in 0..d {
                next[i] = modp(&(&next[i] - &top * &f[i]), &m);
            }
            cur = next;
        }
        let table = (0..d).map(|a| (0..d).map(|b| pows[a + b].clone()).collect()).collect();
        let pinv = (0..d)
            .map(|i| (0..d).map(|j| BigInt::from(u8::from(i == j))).collect())
            .collect();
        let mut one = vec![BigInt::zero(); d];
        one[0] = BigInt::one();
        LocalOrder { p, w, d, table, pinv, one }
    }

    fn one_mod_p(&self) -> Vec<u64> {
        let pb = BigInt::from(self.p);
        self.one.iter().map(|x| modp(x, &pb).to_u64().unwrap()).collect()
    }

    /// One Round 2 step. Returns false when the order is already p-maximal.
    pub fn enlarge(&mut self) -> bool {
        let (p, d) = (self.p, self.d);
        let m = self.modulus();
        let tp = fp_table(&self.table, p);
        let rad = radical(&tp, &self.one_mod_p(), p);
        let ib = lattice_basis(&rad, d, p);
        let ipinv = p_inverse(&ib, p);
        let pb = BigInt::from(p);
        let p2 = &pb * &pb;
        // rows indexed by (β, k), columns by a: I-coordinates of w_a·b_β mod p
        let mut map: FpMat = vec![vec![0u64; d]; d * d];
        for a in 0..d {
            let ea: Vec<BigInt> = (0..d).map(|i| BigInt::from(u8::from(i == a))).collect();
            for (beta, b) in ib.iter().enumerate() {
                let x = table_mul(&self.table, &ea, b, &m);
                let y = zpmat::mat_vec(&ipinv, &x, &p2);
                for k in 0..d {
                    debug_assert!((&y[k] % &pb).is_zero());
                    map[beta * d + k][a] = (&y[k] / &pb).to_u64().unwrap() % p;
                }
            }
        }
        let ker = fp::kernel(&map, d, p);
        if ker.is_empty() {
            return false;
        }
        let ub = lattice_basis(&fp::row_basis(&ker, p), d, p);
        let t = p_inverse(&ub, p);
        let nm = pow_u64(p, self.w - 2);
        let mut table = vec![vec![Vec::new(); d]; d];
        for a in 0..d {
            for b in a..d {
                let prod = table_mul(&self.table, &ub[a], &ub[b], &m);
                let v: Vec<BigInt> = zpmat::mat_vec(&t, &prod, &m)
                    .into_iter()
                    .map(|x| {
                        debug_assert!((&x % &p2).is_zero());
                        modp(&(x / &p2), &nm)
                    })
                    .collect();
                table[a][b] = v.clone();
                table[b][a] = v;
            }
        }
        self.pinv = zpmat::mat_mul(&t, &self.pinv, &nm);
        self.one = zpmat::mat_vec(&t, &self.one, &nm);
        self.table = table;
        self.w -= 2;
        true
    }

    /// Enlarges to a p-maximal order; `None` if precision ran below `floor`.
    pub fn maximal(f: &ZPoly, p: u64, w: u32, floor: u32) -> Option<Self> {
        let mut o = Self::equation_order(f, p, w);
        while o.enlarge() {
            if o.w < floor + 2 {
                return None;
            }
        }
        Some(o)
    }

    /// Orthogonal idempotents of O ⊗ Z_p, one per prime above p, lifted to p^w.
    pub fn idempotents(&self, rng: &mut ChaCha8Rng) -> Vec<Vec<BigInt>> {
        let (p, d) = (self.p, self.d);
        let tp = fp_table(&self.table, p);
        let one = self.one_mod_p();
        let fr = frobenius(&tp, &one, p);
        let mut fr_minus = fr.clone();
        for (i, row) in fr_minus.iter_mut().enumerate() {
            row[i] = fp::subm(row[i], 1, p);
        }
        // x^p = x exactly on F_p-combinations of primitive idempotents
        let berl = fp::kernel(&fr_minus, d, p);
        let count = berl.len();
        let mut idem: Vec<Vec<u64>> = vec![one.clone()];
        while idem.len() < count {
            let mut b = vec![0u64; d];
            for v in &berl {
                let c = rng.gen_range(0..p);
                for (x, y) in b.iter_mut().zip(v) {
                    *x = fp::addm(*x, fp::mulm(c, *y, p), p);
                }
            }
            let mut next = Vec::new();
            for e in &idem {
                for r in 0..p {
                    let mut br = b.clone();
                    for (x, o) in br.iter_mut().zip(&one) {
                        *x = fp::subm(*x, fp::mulm(r, *o, p), p);
                    }
                    let pw = fp_pow(&tp, &br, p - 1, &one, p);
                    let comp: Vec<u64> = one.iter().zip(&pw).map(|(a, b)| fp::subm(*a, *b, p)).collect();
                    let er = fp_mul(&tp, e, &comp, p);
                    if er.iter().any(|&x| x != 0) {
                        next.push(er);
                    }
                }
            }
            idem = next;
        }
        let m = self.modulus();
        idem.into_iter()
            .map(|e| {
                let mut x: Vec<BigInt> = e.into_iter().map(BigInt::from).collect();
                loop {
                    let x2 = table_mul(&self.table, &x, &x, &m);
                    if x2 == x {
                        break x;
                    }
                    let x3 = table_mul(&self.table, &x2, &x, &m);
                    x = x2
                        .iter()
                        .zip(&x3)
                        .map(|(a, b)| modp(&(a * 3 - b * 2), &m))
                        .collect();
                }
            })
            .collect()
    }

    /// Local data for the component cut out by the idempotent `e`.
    pub fn component(&self, e: &[BigInt]) -> Component {
        let (p, d) = (self.p, self.d);
        let m = self.modulus();
        // columns of multiplication by e
        let mcols: Vec<Vec<BigInt>> = (0..d)
            .map(|a| {
                let ea: Vec<BigInt> = (0..d).map(|i| BigInt::from(u8::from(i == a))).collect();
                table_mul(&self.table, e, &ea, &m)
            })
            .collect();
        let pb = BigInt::from(p);
        let red = |v: &BigInt| modp(v, &pb).to_u64().unwrap();
        // choose columns independent mod p: pivots of the transpose-free rref
        let mut rows: FpMat = (0..d).map(|i| mcols.iter().map(|c| red(&c[i])).collect()).collect();
        let colpiv = fp::rref(&mut rows, p);
        let di = colpiv.len();
        let basis: Vec<Vec<BigInt>> = colpiv.iter().map(|&j| mcols[j].clone()).collect();
        // rows S where the chosen columns are invertible mod p
        let mut bt: FpMat = basis.iter().map(|c| c.iter().map(red).collect()).collect();
        let rowsel = fp::rref(&mut bt, p);
        let sq: ZpMat = (0..di)
            .map(|r| (0..di).map(|c| basis[c][rowsel[r]].clone()).collect())
            .collect();
        let sqinv = zpmat::inverse(&sq, p, self.w).expect("selected minor is a unit");
        let msel: ZpMat = rowsel.iter().map(|&r| mcols.iter().map(|c| c[r].clone()).collect()).collect();
        let g = zpmat::mat_mul(&sqinv, &msel, &m);
        let to_local = |x: &[BigInt]| zpmat::mat_vec(&g, x, &m);
        let table = (0..di)
            .map(|a| (0..di).map(|b| to_local(&table_mul(&self.table, &basis[a], &basis[b], &m))).collect())
            .collect();
        let one = to_local(e);
        Component { p, w: self.w, di, g: zpmat::mat_mul(&g, &self.pinv, &m), table, one }
    }
}

/// One local factor O_i of O ⊗ Z_p, in a Z_p-basis of O_i, modulo p^w.
#[derive(Clone, Debug)]
pub(crate) struct Component {
    pub p: u64,
    pub w: u32,
    pub di: usize,
    /// Power-basis coordinates (integral) to local coordinates.
    pub g: ZpMat,
    pub table: Table,
    pub one: Vec<BigInt>,
}

impl Component {
    pub fn modulus(&self) -> BigInt {
        pow_u64(self.p, self.w)
    }

    pub fn mul(&self, x: &[BigInt], y: &[BigInt]) -> Vec<BigInt> {
        table_mul(&self.table, x, y, &self.modulus())
    }

    /// Matrix (rows = outputs) of multiplication by x.
    pub fn mult_matrix(&self, x: &[BigInt]) -> ZpMat {
        let m = self.modulus();
        let cols: Vec<Vec<BigInt>> = (0..self.di)
            .map(|b| {
                let eb: Vec<BigInt> = (0..self.di).map(|i| BigInt::from(u8::from(i == b))).collect();
                table_mul(&self.table, x, &eb, &m)
            })
            .collect();
        (0..self.di).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect()
    }

    pub fn fp_table(&self) -> FpTable {
        fp_table(&self.table, self.p)
    }

    pub fn one_mod_p(&self) -> Vec<u64> {
        let pb = BigInt::from(self.p);
        self.one.iter().map(|x| modp(x, &pb).to_u64().unwrap()).collect()
    }
}

/// Inverse of the p-prime part of a denominator modulo p^w.
pub(crate) fn unit_inverse(u: &BigInt, p: u64, w: u32) -> BigInt {
    inv_mod(u, &pow_u64(p, w)).expect("p-prime part is a unit")
}

pub(crate) fn fp_algebra_mul(t: &FpTable, x: &[u64], y: &[u64], p: u64) -> Vec<u64> {
    fp_mul(t, x, y, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn z(v: &[i64]) -> ZPoly {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    #[test]
    fn maximal_order_of_non_maximal_equation_order() {
        // x^2 - 12: discriminant 48 has 3-adic order 1, so no enlargement
        let o = LocalOrder::maximal(&z(&[-12, 0, 1]), 3, 20, 10).unwrap();
        assert_eq!(o.w, 20);
        // x^2 - 45 = x^2 - 9*5: index 3 over Z[√5]
        let o = LocalOrder::maximal(&z(&[-45, 0, 1]), 3, 20, 10).unwrap();
        assert_eq!(o.w, 18);
    }

    #[test]
    fn idempotents_of_split_prime() {
        // x^2 - 2 splits at 7 (3^2 = 2 mod 7)
        let o = LocalOrder::maximal(&z(&[-2, 0, 1]), 7, 12, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let es = o.idempotents(&mut rng);
        assert_eq!(es.len(), 2);
        let m = o.modulus();
        let s: Vec<BigInt> = es[0].iter().zip(&es[1]).map(|(a, b)| modp(&(a + b), &m)).collect();
        assert_eq!(s, o.one);
        let c = o.component(&es[0]);
        assert_eq!(c.di, 1);
    }
}
