//! Primes above p, the local rings O_𝔭, residue fields, and the maps from
//! exact field elements into them.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::field::{make_field, FieldElem, NumberField};
use super::order::{self, Component, LocalOrder};
use crate::arith::fp::{self, FpMat, FpPoly};
use crate::arith::int::{inv_mod_u64, is_prime, modp, pow_u64, Q};
use crate::arith::zpmat;
use crate::coeff::Coeff;
use crate::error::{Error, Result};

const EMBEDDING_SEED: u64 = 0x0065_6d62_6564;

/// Default absolute precision, in powers of p.
pub const DEFAULT_PRECISION: u32 = 8;

// ------------------------------------------------------------ residue fields

/// F_p[t]/(m) with m irreducible of degree f.
#[derive(Debug, PartialEq, Eq, Hash)]
pub struct ResidueField {
    pub p: u64,
    pub degree: usize,
    pub modulus: FpPoly,
}

impl ResidueField {
    pub fn prime(p: u64) -> Arc<Self> {
        Arc::new(ResidueField { p, degree: 1, modulus: vec![0, 1] })
    }

    pub fn elem(self: &Arc<Self>, v: FpPoly) -> ResidueElement {
        let v = fp::rem(&fp::trim(v.into_iter().map(|x| x % self.p).collect()), &self.modulus, self.p);
        ResidueElement { field: self.clone(), v }
    }

    pub fn from_u64(self: &Arc<Self>, a: u64) -> ResidueElement {
        self.elem(vec![a % self.p])
    }

    pub fn from_int(self: &Arc<Self>, a: &BigInt) -> ResidueElement {
        self.from_u64(modp(a, &BigInt::from(self.p)).to_u64().unwrap())
    }

    pub fn size(&self) -> BigInt {
        pow_u64(self.p, self.degree as u32)
    }

    /// Every element, in a fixed order (only sensible for small fields).
    pub fn elements(self: &Arc<Self>) -> Vec<ResidueElement> {
        let total = self.p.pow(self.degree as u32);
        (0..total)
            .map(|mut n| {
                let mut v = Vec::with_capacity(self.degree);
                for _ in 0..self.degree {
                    v.push(n % self.p);
                    n /= self.p;
                }
                self.elem(v)
            })
            .collect()
    }
}

/// An element of a residue field, as a reduced polynomial in t.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ResidueElement {
    pub field: Arc<ResidueField>,
    pub v: FpPoly,
}

impl fmt::Debug for ResidueElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ResidueElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.v.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .v
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| **c != 0)
            .map(|(i, c)| match i {
                0 => c.to_string(),
                1 => format!("{c}*t"),
                _ => format!("{c}*t^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl ResidueElement {
    pub fn inv(&self) -> Result<Self> {
        if self.v.is_empty() {
            return Err(Error::InvalidInput("inverse of zero".into()));
        }
        let p = self.field.p;
        let (g, s, _) = fp::xgcd(&self.v, &self.field.modulus, p);
        let c = fp::pow_u(g[0], p - 2, p);
        Ok(self.field.elem(fp::scale(&s, c, p)))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = self.one_like();
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            e >>= 1;
        }
        acc
    }

    pub fn is_prime_field_elem(&self) -> bool {
        self.v.len() <= 1
    }

    /// Minimal polynomial over F_p.
    pub fn minpoly(&self) -> FpPoly {
        let p = self.field.p;
        // conjugates under Frobenius
        let mut conj = vec![self.clone()];
        loop {
            let n = conj.last().unwrap().pow(p);
            if n == conj[0] {
                break;
            }
            conj.push(n);
        }
        // Π (x − c) computed with coefficients in the residue field, which lie in F_p
        let mut poly: Vec<ResidueElement> = vec![self.one_like()];
        for c in &conj {
            let mut next = vec![self.zero_like(); poly.len() + 1];
            for (i, a) in poly.iter().enumerate() {
                next[i + 1] = next[i + 1].add(a);
                next[i] = next[i].sub(&a.mul(c));
            }
            poly = next;
        }
        poly.iter().map(|c| c.v.first().copied().unwrap_or(0)).collect()
    }
}

impl Coeff for ResidueElement {
    fn zero_like(&self) -> Self {
        ResidueElement { field: self.field.clone(), v: Vec::new() }
    }
    fn one_like(&self) -> Self {
        self.field.from_u64(1)
    }
    fn is_zero(&self) -> bool {
        self.v.is_empty()
    }
    fn add(&self, o: &Self) -> Self {
        ResidueElement { field: self.field.clone(), v: fp::add(&self.v, &o.v, self.field.p) }
    }
    fn sub(&self, o: &Self) -> Self {
        ResidueElement { field: self.field.clone(), v: fp::sub(&self.v, &o.v, self.field.p) }
    }
    fn mul(&self, o: &Self) -> Self {
        let p = self.field.p;
        ResidueElement { field: self.field.clone(), v: fp::rem(&fp::mul(&self.v, &o.v, p), &self.field.modulus, p) }
    }
    fn neg(&self) -> Self {
        ResidueElement { field: self.field.clone(), v: fp::sub(&Vec::new(), &self.v, self.field.p) }
    }
    fn scale_int(&self, c: &BigInt) -> Self {
        let p = self.field.p;
        let c = modp(c, &BigInt::from(p)).to_u64().unwrap();
        ResidueElement { field: self.field.clone(), v: fp::scale(&self.v, c, p) }
    }
    fn div_int(&self, c: &BigInt) -> Self {
        let p = self.field.p;
        let c = modp(c, &BigInt::from(p)).to_u64().unwrap();
        assert!(c != 0, "division by an integer divisible by p");
        ResidueElement { field: self.field.clone(), v: fp::scale(&self.v, inv_mod_u64(c, p), p) }
    }
}

// ------------------------------------------------------------ teichmüller

/// The (p−1)-st root of unity congruent to a mod p, modulo p^m.
pub fn teichmuller(p: u64, a: u64, m: u32) -> Result<BigInt> {
    if !is_prime(p) || p == 2 {
        return Err(Error::InvalidInput(format!("teichmuller needs an odd prime, got {p}")));
    }
    if a.is_multiple_of(p) || m == 0 {
        return Err(Error::InvalidInput("teichmuller needs a unit residue and m >= 1".into()));
    }
    let md = pow_u64(p, m);
    // a^(p^(m-1)) is constant on a + pZ and has order dividing p − 1
    Ok(BigInt::from(a).modpow(&pow_u64(p, m - 1), &md))
}

// ------------------------------------------------------------ embeddings

/// A prime 𝔭 above p in a number field, with everything needed to compute
/// valuations and reductions of exact elements at absolute precision M.
#[derive(Clone)]
pub struct PAdicEmbedding {
    pub field: Arc<NumberField>,
    pub p: u64,
    pub index: usize,
    pub precision: u32,
    pub e: u32,
    pub f: u32,
    /// Factor of the minimal polynomial over Q_p, monic, modulo p^M.
    pub local_factor: Vec<BigInt>,
    pub residue: Arc<ResidueField>,
    comp: Arc<Component>,
    /// Local coordinates mod p to residue-field coordinates (f rows).
    red: FpMat,
    /// An element of valuation 1/e in local coordinates (p itself when e = 1).
    pi: Vec<BigInt>,
}

impl fmt::Debug for PAdicEmbedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PAdicEmbedding")
            .field("p", &self.p)
            .field("index", &self.index)
            .field("e", &self.e)
            .field("f", &self.f)
            .field("precision", &self.precision)
            .finish()
    }
}

/// Serialized reference to an embedding.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingSpec {
    pub minpoly: Vec<serde_json::Value>,
    pub p: u64,
    pub embedding_index: usize,
    pub precision: u32,
}

fn big_to_json(x: &BigInt) -> serde_json::Value {
    match x.to_i64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::from(x.to_string()),
    }
}

fn json_to_big(v: &serde_json::Value) -> Result<BigInt> {
    match v {
        serde_json::Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| Error::Parse(format!("non-integer coefficient {n}"))),
        serde_json::Value::String(s) => s.parse().map_err(|_| Error::Parse(format!("bad integer {s}"))),
        other => Err(Error::Parse(format!("bad coefficient {other}"))),
    }
}

/// All primes above p, ordered by local degree, residue degree, then the
/// local factor digit by digit.
pub fn primes_above(field: &Arc<NumberField>, p: u64, m: u32) -> Result<Vec<PAdicEmbedding>> {
    if p == 2 || !is_prime(p) {
        return Err(Error::InvalidInput(format!("p must be an odd prime, got {p}")));
    }
    if m == 0 {
        return Err(Error::PrecisionTooLow(m));
    }
    let d = field.degree;
    let target = m + 2 * d as u32 + 4;
    let mut extra = 2 * d as u32 + 8;
    let ord = loop {
        if let Some(o) = LocalOrder::maximal(&field.minpoly, p, target + extra, target) {
            break o;
        }
        extra *= 2;
        if extra > 4096 {
            return Err(Error::PrecisionTooLow(m));
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(EMBEDDING_SEED);
    let mut out = Vec::new();
    for e in ord.idempotents(&mut rng) {
        let comp = ord.component(&e);
        out.push(build_embedding(field, comp, m, &mut rng)?);
    }
    // factors compared mod p, then mod p², …, so the order does not depend on m
    let key = |e: &PAdicEmbedding| -> Vec<Vec<BigInt>> {
        (1..=m).map(|j| e.local_factor.iter().map(|x| modp(x, &pow_u64(p, j))).collect()).collect()
    };
    out.sort_by_key(|a| (a.comp.di, a.f, key(a)));
    for (i, emb) in out.iter_mut().enumerate() {
        emb.index = i;
    }
    Ok(out)
}

/// The unique embedding, or an error naming the count when p is not inert
/// or totally ramified (callers must then choose explicitly).
pub fn embedding_at(field: &Arc<NumberField>, p: u64, m: u32, index: usize) -> Result<PAdicEmbedding> {
    let all = primes_above(field, p, m)?;
    let n = all.len();
    all.into_iter()
        .nth(index)
        .ok_or_else(|| Error::InvalidInput(format!("embedding index {index} out of range ({n} primes)")))
}

/// Quotient coordinates of v modulo a subspace given by rref rows.
fn quotient_coords(v: &[u64], rad: &FpMat, p: u64) -> Vec<u64> {
    let mut v = v.to_vec();
    let mut pivots = Vec::new();
    for r in rad {
        let piv = r.iter().position(|&x| x != 0).unwrap();
        pivots.push(piv);
        let c = v[piv];
        if c != 0 {
            for (x, y) in v.iter_mut().zip(r) {
                *x = fp::subm(*x, fp::mulm(c, *y, p), p);
            }
        }
    }
    v.iter()
        .enumerate()
        .filter(|(i, _)| !pivots.contains(i))
        .map(|(_, &x)| x)
        .collect()
}

fn build_embedding(
    field: &Arc<NumberField>,
    comp: Component,
    m: u32,
    rng: &mut ChaCha8Rng,
) -> Result<PAdicEmbedding> {
    let p = comp.p;
    let di = comp.di;
    let tf = comp.fp_table();
    let one = comp.one_mod_p();
    let rad = order::radical(&tf, &one, p);
    let f = di - rad.len();
    let e = di / f;
    debug_assert_eq!(e * f, di);
    // a generator of the residue field and the reduction matrix
    let mut attempt = 0usize;
    let (modulus, red) = loop {
        let x: Vec<u64> = if attempt < di {
            (0..di).map(|i| u64::from(i == attempt)).collect()
        } else {
            (0..di).map(|_| rng.gen_range(0..p)).collect()
        };
        attempt += 1;
        let mut powers = vec![one.clone()];
        for _ in 0..f {
            let nx = order::fp_algebra_mul(&tf, powers.last().unwrap(), &x, p);
            powers.push(nx);
        }
        let q: Vec<Vec<u64>> = powers.iter().map(|v| quotient_coords(v, &rad, p)).collect();
        let pm: FpMat = (0..f).map(|i| (0..f).map(|j| q[j][i]).collect()).collect();
        let Some(pinv) = fp::inverse(&pm, p) else { continue };
        let c = fp::mat_vec(&pinv, &q[f], p);
        let mut modulus: FpPoly = c.iter().map(|&x| fp::subm(0, x, p)).collect();
        modulus.push(1);
        let qb: FpMat = (0..di)
            .map(|j| quotient_coords(&(0..di).map(|i| u64::from(i == j)).collect::<Vec<_>>(), &rad, p))
            .collect();
        let qmat: FpMat = (0..f).map(|i| (0..di).map(|j| qb[j][i]).collect()).collect();
        break (modulus, fp::mat_mul(&pinv, &qmat, p));
    };
    let residue = Arc::new(ResidueField { p, degree: f, modulus });
    let w = comp.w;
    let md = comp.modulus();
    let pi = if e == 1 {
        comp.one.iter().map(|x| modp(&(x * BigInt::from(p)), &md)).collect()
    } else {
        let mut cands: Vec<Vec<BigInt>> =
            rad.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let mut found = None;
        for _ in 0..1000 {
            let c = if let Some(c) = cands.pop() {
                c
            } else {
                let mut v = vec![BigInt::zero(); di];
                for r in &rad {
                    let k = rng.gen_range(0..p);
                    for (a, b) in v.iter_mut().zip(r) {
                        *a += BigInt::from(k * b);
                    }
                }
                v.iter().map(|x| modp(x, &md)).collect()
            };
            if zpmat::det_val(&comp.mult_matrix(&c), p, w) == Some(f as u32) {
                found = Some(c);
                break;
            }
        }
        found.ok_or_else(|| Error::PrecisionExhausted("no uniformizer found".into()))?
    };
    // local factor: characteristic polynomial of θ acting on O_𝔭
    let theta_power: Vec<BigInt> = if field.degree == 1 {
        vec![-&field.minpoly[0]]
    } else {
        (0..field.degree).map(|i| BigInt::from(u8::from(i == 1))).collect()
    };
    let theta = zpmat::mat_vec(&comp.g, &theta_power, &md);
    let cp = zpmat::charpoly_berkowitz(&comp.mult_matrix(&theta), &md);
    let mm = pow_u64(p, m);
    let local_factor = cp.iter().map(|x| modp(x, &mm)).collect();
    Ok(PAdicEmbedding {
        field: field.clone(),
        p,
        index: 0,
        precision: m,
        e: e as u32,
        f: f as u32,
        local_factor,
        residue,
        comp: Arc::new(comp),
        red,
        pi,
    })
}

/// An element p^shift · y of the completion, y integral and known modulo
/// p^prec in local coordinates. Normalized so that p ∤ y unless y is zero
/// to the known precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalElement {
    pub shift: i64,
    pub coords: Vec<BigInt>,
    pub prec: u32,
    /// True for the exact zero (infinite precision).
    pub exact_zero: bool,
}

impl PAdicEmbedding {
    pub fn spec(&self) -> EmbeddingSpec {
        EmbeddingSpec {
            minpoly: self.field.minpoly.iter().map(big_to_json).collect(),
            p: self.p,
            embedding_index: self.index,
            precision: self.precision,
        }
    }

    pub fn from_spec(spec: &EmbeddingSpec) -> Result<Self> {
        let f: Vec<BigInt> = spec.minpoly.iter().map(json_to_big).collect::<Result<_>>()?;
        let field = make_field(&f)?;
        embedding_at(&field, spec.p, spec.precision, spec.embedding_index)
    }

    /// Same prime at a different absolute precision.
    pub fn with_precision(&self, m: u32) -> Result<Self> {
        embedding_at(&self.field, self.p, m, self.index)
    }

    /// Relative precision carried by freshly embedded elements.
    pub fn working_precision(&self) -> u32 {
        self.comp.w
    }

    /// Degree of the completion over Q_p.
    pub fn local_degree(&self) -> usize {
        self.comp.di
    }

    fn working_modulus(&self) -> BigInt {
        self.comp.modulus()
    }

    pub(crate) fn normalize(&self, mut x: LocalElement) -> LocalElement {
        if x.exact_zero {
            return x;
        }
        let pb = BigInt::from(self.p);
        while x.prec > 0 && x.coords.iter().all(|c| (c % &pb).is_zero()) {
            for c in x.coords.iter_mut() {
                *c /= &pb;
            }
            x.shift += 1;
            x.prec -= 1;
        }
        let m = pow_u64(self.p, x.prec);
        for c in x.coords.iter_mut() {
            *c = modp(c, &m);
        }
        x
    }

    pub fn local_zero(&self) -> LocalElement {
        LocalElement { shift: 0, coords: vec![BigInt::zero(); self.comp.di], prec: 0, exact_zero: true }
    }

    /// Image of an integer.
    pub fn local_int(&self, c: &BigInt) -> LocalElement {
        if c.is_zero() {
            return self.local_zero();
        }
        let md = self.working_modulus();
        let coords = self.comp.one.iter().map(|x| modp(&(x * c), &md)).collect();
        self.normalize(LocalElement { shift: 0, coords, prec: self.comp.w, exact_zero: false })
    }

    /// Image of an exact field element in the completion.
    pub fn local(&self, x: &FieldElem) -> LocalElement {
        assert!(Arc::ptr_eq(&x.field, &self.field) || x.field == self.field, "element of another field");
        if x.is_zero() {
            return self.local_zero();
        }
        let p = self.p;
        let pb = BigInt::from(p);
        let mut den = x.denominator().clone();
        let mut a = 0i64;
        while (&den % &pb).is_zero() {
            den /= &pb;
            a += 1;
        }
        let md = self.working_modulus();
        let u = order::unit_inverse(&den, p, self.comp.w);
        let num: Vec<BigInt> = x.numerator().iter().map(|c| modp(&(c * &u), &md)).collect();
        let coords = zpmat::mat_vec(&self.comp.g, &num, &md);
        self.normalize(LocalElement { shift: -a, coords, prec: self.comp.w, exact_zero: false })
    }

    pub fn add(&self, x: &LocalElement, y: &LocalElement) -> LocalElement {
        if x.exact_zero {
            return y.clone();
        }
        if y.exact_zero {
            return x.clone();
        }
        let s = x.shift.min(y.shift);
        let abs = (x.shift + x.prec as i64).min(y.shift + y.prec as i64);
        let prec = (abs - s).max(0) as u32;
        let m = pow_u64(self.p, prec);
        let sx = pow_u64(self.p, (x.shift - s) as u32);
        let sy = pow_u64(self.p, (y.shift - s) as u32);
        let coords = x
            .coords
            .iter()
            .zip(&y.coords)
            .map(|(a, b)| modp(&(a * &sx + b * &sy), &m))
            .collect();
        self.normalize(LocalElement { shift: s, coords, prec, exact_zero: false })
    }

    pub fn neg(&self, x: &LocalElement) -> LocalElement {
        if x.exact_zero {
            return x.clone();
        }
        let m = pow_u64(self.p, x.prec);
        LocalElement { coords: x.coords.iter().map(|c| modp(&-c, &m)).collect(), ..x.clone() }
    }

    pub fn scale_int(&self, x: &LocalElement, c: &BigInt) -> LocalElement {
        self.mul(x, &self.local_int(c))
    }

    pub fn mul(&self, x: &LocalElement, y: &LocalElement) -> LocalElement {
        if x.exact_zero || y.exact_zero {
            return self.local_zero();
        }
        let prec = x.prec.min(y.prec);
        let m = pow_u64(self.p, prec);
        let prod = self.comp.mul(&x.coords, &y.coords);
        let coords = prod.iter().map(|c| modp(c, &m)).collect();
        self.normalize(LocalElement { shift: x.shift + y.shift, coords, prec, exact_zero: false })
    }

    /// Inverse of a nonzero element whose unit part is a unit of the local
    /// ring (always true when e = 1).
    pub fn local_inverse(&self, x: &LocalElement) -> Result<LocalElement> {
        if x.exact_zero || x.prec == 0 {
            return Err(Error::PrecisionExhausted("inverse of an element that is zero to precision".into()));
        }
        let m = pow_u64(self.p, x.prec);
        let mat = self.comp.mult_matrix(&x.coords);
        let inv = zpmat::inverse(&mat, self.p, x.prec)
            .ok_or_else(|| Error::InvalidInput("inverse of a non-unit local element".into()))?;
        let coords = zpmat::mat_vec(&inv, &self.comp.one, &m);
        Ok(self.normalize(LocalElement { shift: -x.shift, coords, prec: x.prec, exact_zero: false }))
    }

    /// Canonical text form: base-p digits of each local coordinate, as
    /// "v*p^k" terms (v a digit vector when the local degree exceeds 1),
    /// followed by the absolute precision.
    pub fn local_to_string(&self, x: &LocalElement) -> String {
        if x.exact_zero {
            return "0".into();
        }
        let pb = BigInt::from(self.p);
        let mut cs = x.coords.clone();
        let mut terms = Vec::new();
        for k in 0..x.prec {
            let digits: Vec<BigInt> = cs.iter().map(|c| modp(c, &pb)).collect();
            for c in cs.iter_mut() {
                *c /= &pb;
            }
            if digits.iter().all(|d| d.is_zero()) {
                continue;
            }
            let v = if digits.len() == 1 {
                digits[0].to_string()
            } else {
                format!("({})", digits.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(","))
            };
            terms.push(format!("{v}*p^{}", x.shift + k as i64));
        }
        let o = format!("O(p^{})", x.shift + x.prec as i64);
        if terms.is_empty() {
            o
        } else {
            format!("{} + {o}", terms.join(" + "))
        }
    }

    /// ϖ^k with the fixed convention ϖ^(qe+r) = p^q·ϖ₀^r, 0 ≤ r < e, so the
    /// implied unit is the same for every caller.
    pub fn pi_power(&self, k: i64) -> LocalElement {
        let e = self.e as i64;
        let (q, r) = (k.div_euclid(e), k.rem_euclid(e));
        let mut acc = self.local_int(&BigInt::one());
        if e > 1 {
            let pi = self.normalize(LocalElement {
                shift: 0,
                coords: self.pi.clone(),
                prec: self.comp.w,
                exact_zero: false,
            });
            for _ in 0..r {
                acc = self.mul(&acc, &pi);
            }
        }
        acc.shift += q;
        acc
    }

    /// The chosen uniformizer ϖ₀ (valuation 1/e).
    pub fn uniformizer(&self) -> LocalElement {
        self.pi_power(1)
    }

    /// Exact valuation of a local element, normalized so v(p) = 1.
    pub fn local_valuation(&self, x: &LocalElement) -> Result<Q> {
        if x.exact_zero {
            return Err(Error::PrecisionExhausted("valuation of zero".into()));
        }
        if x.prec == 0 {
            return Err(Error::PrecisionExhausted(format!("element is 0 mod p^{}", x.shift)));
        }
        let frac = if self.e == 1 {
            0
        } else {
            let mat = self.comp.mult_matrix(&x.coords);
            zpmat::det_val(&mat, self.p, x.prec)
                .ok_or_else(|| Error::PrecisionExhausted("determinant not certified".into()))?
                as i64
        };
        let v = Q::new(BigInt::from(x.shift * self.comp.di as i64 + frac), BigInt::from(self.comp.di));
        if v >= Q::from_integer(BigInt::from(self.precision)) {
            return Err(Error::PrecisionExhausted(format!(
                "valuation {v} is not below the precision {}",
                self.precision
            )));
        }
        Ok(v)
    }

    pub fn valuation(&self, x: &FieldElem) -> Result<Q> {
        self.local_valuation(&self.local(x))
    }

    /// Valuation of x, or `None` when x = 0 or v(x) ≥ M.
    pub fn valuation_capped(&self, x: &FieldElem) -> Option<Q> {
        if x.is_zero() {
            return None;
        }
        self.valuation(x).ok()
    }

    pub fn local_reduce(&self, x: &LocalElement) -> Result<ResidueElement> {
        if x.exact_zero || x.shift > 0 {
            return Ok(self.residue.elem(Vec::new()));
        }
        if x.shift < 0 {
            return Err(Error::NegativeValuation);
        }
        if x.prec == 0 {
            return Err(Error::PrecisionExhausted("no digits left to reduce".into()));
        }
        let pb = BigInt::from(self.p);
        let v: Vec<u64> = x.coords.iter().map(|c| modp(c, &pb).to_u64().unwrap()).collect();
        Ok(self.residue.elem(fp::mat_vec(&self.red, &v, self.p)))
    }

    pub fn reduce(&self, x: &FieldElem) -> Result<ResidueElement> {
        self.local_reduce(&self.local(x))
    }

    /// Residue of ϖ^(−k)·x with the fixed ϖ-power convention.
    pub fn reduce_scaled(&self, x: &FieldElem, k: i64) -> Result<ResidueElement> {
        let y = self.mul(&self.local(x), &self.pi_power(-k));
        self.local_reduce(&y)
    }

    /// v(x) expressed in units of 1/e, i.e. e·v(x) as an integer.
    pub fn pi_valuation(&self, x: &FieldElem) -> Result<i64> {
        let v = self.valuation(x)? * Q::from_integer(BigInt::from(self.e));
        debug_assert!(v.is_integer());
        Ok(v.to_integer().to_i64().unwrap())
    }

    /// Residue-field image of a rational with non-negative valuation.
    pub fn reduce_q(&self, x: &Q) -> Result<ResidueElement> {
        let pb = BigInt::from(self.p);
        if (x.denom() % &pb).is_zero() {
            return Err(Error::NegativeValuation);
        }
        let d = x.denom().mod_floor(&pb);
        let n = x.numer().mod_floor(&pb);
        let di = crate::arith::int::inv_mod(&d, &pb).unwrap();
        Ok(self.residue.from_int(&(n * di)))
    }

    /// Whether minpoly ≡ local_factor · h (mod p^M) for some monic h.
    pub fn local_factor_divides_minpoly(&self) -> bool {
        let m = pow_u64(self.p, self.precision);
        let mut r: Vec<BigInt> = self.field.minpoly.iter().map(|x| modp(x, &m)).collect();
        let g = &self.local_factor;
        let dg = g.len() - 1;
        while r.len() > dg {
            let c = r.pop().unwrap();
            if c.is_zero() {
                continue;
            }
            let base = r.len() - dg;
            for j in 0..dg {
                r[base + j] = modp(&(&r[base + j] - &c * &g[j]), &m);
            }
        }
        r.iter().all(|x| x.is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::field::rational_field;

    fn z(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    #[test]
    fn rational_field_is_unramified() {
        let k = rational_field();
        let es = primes_above(&k, 5, 4).unwrap();
        assert_eq!(es.len(), 1);
        assert_eq!((es[0].e, es[0].f), (1, 1));
        let p = FieldElem::from_int(&k, &BigInt::from(5));
        assert_eq!(es[0].valuation(&p).unwrap(), Q::one());
    }

    #[test]
    fn inert_quadratic() {
        // x^2 - 2 has no root mod 3
        let k = make_field(&z(&[-2, 0, 1])).unwrap();
        let es = primes_above(&k, 3, 3).unwrap();
        assert_eq!(es.len(), 1);
        assert_eq!((es[0].e, es[0].f), (1, 2));
        assert!(es[0].local_factor_divides_minpoly());
    }

    #[test]
    fn ramified_quadratic() {
        let k = make_field(&z(&[-5, 0, 1])).unwrap();
        let es = primes_above(&k, 5, 4).unwrap();
        assert_eq!(es.len(), 1);
        let emb = &es[0];
        assert_eq!((emb.e, emb.f), (2, 1));
        let pi = emb.uniformizer();
        assert_eq!(emb.local_valuation(&pi).unwrap(), Q::new(1.into(), 2.into()));
        let sq = emb.mul(&pi, &pi);
        assert_eq!(emb.local_valuation(&sq).unwrap(), Q::one());
        let theta = FieldElem::generator(&k);
        assert_eq!(emb.valuation(&theta).unwrap(), Q::new(1.into(), 2.into()));
    }

    #[test]
    fn split_prime_gives_two_embeddings() {
        let k = make_field(&z(&[-2, 0, 1])).unwrap();
        let es = primes_above(&k, 7, 4).unwrap();
        assert_eq!(es.len(), 2);
        for e in &es {
            assert!(e.local_factor_divides_minpoly());
            assert_eq!(e.local_factor.len(), 2);
        }
        // θ - 3 has valuation ≥ 1 at exactly one of them
        let t = FieldElem::generator(&k).sub(&FieldElem::from_int(&k, &BigInt::from(3)));
        let vs: Vec<Q> = es.iter().map(|e| e.valuation(&t).unwrap()).collect();
        assert!(vs.contains(&Q::zero()));
        assert!(vs.iter().any(|v| *v >= Q::one()));
    }

    #[test]
    fn non_maximal_equation_order() {
        // θ = 3√5 generates Z[3√5], of index 3 in the ring of integers
        let k = make_field(&z(&[-45, 0, 1])).unwrap();
        let es = primes_above(&k, 3, 6).unwrap();
        let total: u32 = es.iter().map(|e| e.e * e.f).sum();
        assert_eq!(total, 2);
        let theta = FieldElem::generator(&k);
        for e in &es {
            assert_eq!(e.valuation(&theta).unwrap(), Q::one());
            // θ/3 is a unit with square 5
            let u = theta.scale_q(&Q::new(1.into(), 3.into()));
            let r = e.reduce(&u).unwrap();
            assert_eq!(r.mul(&r), e.residue.from_u64(5));
        }
    }

    #[test]
    fn teichmuller_values() {
        assert_eq!(teichmuller(5, 1, 2).unwrap(), BigInt::from(1));
        assert_eq!(teichmuller(7, 6, 3).unwrap(), BigInt::from(342));
        let t = teichmuller(5, 2, 2).unwrap();
        // brute force: the x ≡ 2 mod 5 with x^4 ≡ 1 mod 25
        let brute = (0..25u64).find(|x| x % 5 == 2 && x.pow(4) % 25 == 1).unwrap();
        assert_eq!(t, BigInt::from(brute));
    }

    #[test]
    fn residue_field_arithmetic() {
        let k = make_field(&z(&[-2, 0, 1])).unwrap();
        let emb = &primes_above(&k, 3, 3).unwrap()[0];
        let t = emb.reduce(&FieldElem::generator(&k)).unwrap();
        assert_eq!(t.mul(&t), emb.residue.from_u64(2));
        assert_eq!(t.mul(&t.inv().unwrap()), t.one_like());
        assert_eq!(t.minpoly(), vec![1, 0, 1]);
    }
}
