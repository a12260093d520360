//! Cusps, degree-zero divisors, and symbols stored as coset functions.
//!
//! A [`CosetSymbol`] holds F(h) = φ(h·D₀)|h for every coset of Γ₀(M). It
//! needs no presentation, so symbols at auxiliary levels (restrictions,
//! degeneracy images, stabilizations) are built directly from symbols at
//! lower level.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;

use crate::arith::int::gcd_i128;
use crate::coeff::Coeff;
use crate::error::{Error, Result};

use super::hpoly::HomogeneousPoly;
use super::mat2::{self, actmat, adj, cf_paths, Mat2};
use super::p1::P1List;
use super::space::pullback_terms;

/// A point of P¹(Q). Rationals are reduced with positive denominator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cusp {
    Infinity,
    Rational(i128, i128),
}

impl Cusp {
    pub fn new(num: i128, den: i128) -> Self {
        if den == 0 {
            return Cusp::Infinity;
        }
        let g = gcd_i128(num, den) * den.signum();
        Cusp::Rational(num / g, den / g)
    }

    /// γ·x for a matrix with nonzero determinant.
    pub fn moebius(&self, m: &Mat2) -> Self {
        match *self {
            Cusp::Infinity => Cusp::new(m[0], m[2]),
            Cusp::Rational(x, y) => Cusp::new(m[0] * x + m[1] * y, m[2] * x + m[3] * y),
        }
    }
}

impl fmt::Display for Cusp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cusp::Infinity => write!(f, "oo"),
            Cusp::Rational(n, 1) => write!(f, "{n}"),
            Cusp::Rational(n, d) => write!(f, "{n}/{d}"),
        }
    }
}

/// A formal integer combination of cusps, kept sorted and combined.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Divisor {
    pub terms: Vec<(i64, Cusp)>,
}

impl Divisor {
    pub fn from_terms(terms: impl IntoIterator<Item = (i64, Cusp)>) -> Self {
        let mut map = std::collections::BTreeMap::new();
        for (c, x) in terms {
            *map.entry(x).or_insert(0i64) += c;
        }
        Divisor { terms: map.into_iter().filter(|(_, c)| *c != 0).map(|(x, c)| (c, x)).collect() }
    }

    /// {a} − {b}.
    pub fn path(a: Cusp, b: Cusp) -> Self {
        Self::from_terms([(1, a), (-1, b)])
    }

    pub fn degree(&self) -> i64 {
        self.terms.iter().map(|t| t.0).sum()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::from_terms(self.terms.iter().chain(&o.terms).copied())
    }

    pub fn neg(&self) -> Self {
        Divisor { terms: self.terms.iter().map(|&(c, x)| (-c, x)).collect() }
    }

    pub fn moebius(&self, m: &Mat2) -> Self {
        Self::from_terms(self.terms.iter().map(|&(c, x)| (c, x.moebius(m))))
    }
}

impl fmt::Display for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (c, x)) in self.terms.iter().enumerate() {
            let sign = if *c < 0 { "-" } else { "+" };
            if k == 0 {
                if *c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if c.abs() != 1 {
                write!(f, "{}*", c.abs())?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl FromStr for Cusp {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('{').trim_end_matches('}').trim();
        let bad = || Error::Parse(format!("not a cusp: {s:?}"));
        if s == "oo" || s == "∞" || s == "inf" {
            return Ok(Cusp::Infinity);
        }
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim().parse::<i128>().map_err(|_| bad())?, d.trim().parse::<i128>().map_err(|_| bad())?),
            None => (s.parse::<i128>().map_err(|_| bad())?, 1),
        };
        if d == 0 {
            return Err(bad());
        }
        Ok(Cusp::new(n, d))
    }
}

/// Parses sums like `"oo - 3/25"`, `"{0} - {oo}"` or `"2*1/3 - 2*oo"`.
/// The result must have degree zero.
impl FromStr for Divisor {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut terms = Vec::new();
        let mut sign = 1i64;
        let mut cur = String::new();
        let mut flush = |cur: &mut String, sign: i64| -> Result<()> {
            let t = cur.trim();
            if t.is_empty() {
                return Err(Error::Parse(format!("empty term in divisor {s:?}")));
            }
            let (mult, cusp) = match t.split_once('*') {
                Some((m, c)) => (m.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad multiplicity in {t:?}")))?, c),
                None => (1, t),
            };
            terms.push((sign * mult, cusp.parse::<Cusp>()?));
            cur.clear();
            Ok(())
        };
        // a '-' directly after '/' or at the start of a numerator is part of a number
        let mut expect_term = true;
        for ch in s.chars() {
            match ch {
                '+' | '-' if !expect_term => {
                    flush(&mut cur, sign)?;
                    sign = if ch == '-' { -1 } else { 1 };
                    expect_term = true;
                }
                '-' if expect_term && cur.trim().is_empty() => sign = -sign,
                '+' if expect_term && cur.trim().is_empty() => {}
                c => {
                    if !c.is_whitespace() {
                        expect_term = matches!(c, '/' | '*' | '{');
                    }
                    cur.push(c);
                }
            }
        }
        flush(&mut cur, sign)?;
        let d = Divisor::from_terms(terms);
        if d.degree() != 0 {
            return Err(Error::Parse(format!("divisor {s:?} has degree {} (expected 0)", d.degree())));
        }
        Ok(d)
    }
}

/// A modular symbol for Γ₀(M) as its coset function.
#[derive(Clone, Debug)]
pub struct CosetSymbol<C> {
    pub p1: Arc<P1List>,
    pub values: Vec<HomogeneousPoly<C>>,
}

impl<C: Coeff> PartialEq for CosetSymbol<C> {
    fn eq(&self, o: &Self) -> bool {
        self.p1.level == o.p1.level && self.values == o.values
    }
}

impl<C: Coeff> CosetSymbol<C> {
    pub fn new(p1: Arc<P1List>, values: Vec<HomogeneousPoly<C>>) -> Self {
        assert_eq!(p1.len(), values.len());
        CosetSymbol { p1, values }
    }

    pub fn level(&self) -> u64 {
        self.p1.level
    }

    pub fn degree(&self) -> usize {
        self.values[0].degree()
    }

    fn zero_poly(&self) -> HomogeneousPoly<C> {
        HomogeneousPoly::zero(self.degree(), &self.values[0].coeffs[0])
    }

    /// F(h) for any matrix whose bottom row is primitive mod M.
    pub fn value(&self, h: &Mat2) -> &HomogeneousPoly<C> {
        &self.values[self.p1.coset(h)]
    }

    /// φ({num/den} − {∞}).
    pub fn path_from_infinity(&self, num: i128, den: i128) -> HomogeneousPoly<C> {
        let mut acc = self.zero_poly();
        for g in cf_paths(num, den) {
            acc = acc.add(&self.value(&g).act(&adj(&g)));
        }
        acc
    }

    /// Coefficient j of φ({num/den} − {∞}); cheaper than the full value.
    pub fn path_coefficient(&self, num: i128, den: i128, j: usize) -> C {
        let g_deg = self.degree();
        let mut acc = self.values[0].coeffs[0].zero_like();
        for g in cf_paths(num, den) {
            let row = actmat_row(&adj(&g), g_deg, j);
            for (x, b) in row.iter().zip(&self.value(&g).coeffs) {
                if !num_traits::Zero::is_zero(x) && !b.is_zero() {
                    acc = acc.add(&b.scale_int(x));
                }
            }
        }
        acc
    }

    pub fn evaluate(&self, d: &Divisor) -> HomogeneousPoly<C> {
        let mut acc = self.zero_poly();
        for &(c, x) in &d.terms {
            if let Cusp::Rational(n, m) = x {
                acc = acc.add(&self.path_from_infinity(n, m).scale_int(&BigInt::from(c)));
            }
        }
        acc
    }

    /// Σ_δ φ|δ as a symbol for the group attached to `target`; the caller
    /// guarantees that this sum is invariant under that group.
    pub fn apply(&self, deltas: &[Mat2], target: &Arc<P1List>) -> Self {
        let g = self.degree();
        let values = (0..target.len())
            .map(|i| {
                let h = target.lift(i);
                let mut acc = self.zero_poly();
                for delta in deltas {
                    for (sign, gi, a) in pullback_terms(&mat2::mul(delta, &h)) {
                        let term = self.value(&gi).act_with(&actmat(&a, g));
                        acc = if sign > 0 { acc.add(&term) } else { acc.sub(&term) };
                    }
                }
                acc
            })
            .collect();
        CosetSymbol { p1: target.clone(), values }
    }

    /// The same symbol viewed at a level divisible by the current one.
    pub fn restrict(&self, target: &Arc<P1List>) -> Self {
        assert_eq!(target.level % self.level(), 0, "restriction needs a multiple of the level");
        let values = (0..target.len()).map(|i| self.value(&target.lift(i)).clone()).collect();
        CosetSymbol { p1: target.clone(), values }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.level(), o.level());
        CosetSymbol { p1: self.p1.clone(), values: self.values.iter().zip(&o.values).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_values(|v| v.neg())
    }

    pub fn scale(&self, c: &C) -> Self {
        self.map_values(|v| v.scale(c))
    }

    pub fn map_values(&self, f: impl Fn(&HomogeneousPoly<C>) -> HomogeneousPoly<C>) -> Self {
        CosetSymbol { p1: self.p1.clone(), values: self.values.iter().map(f).collect() }
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> CosetSymbol<D> {
        CosetSymbol { p1: self.p1.clone(), values: self.values.iter().map(|v| v.map(&f)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    /// Checks the two- and three-term Manin relations exactly.
    pub fn satisfies_manin_relations(&self) -> bool {
        let g = self.degree();
        let sg = actmat(&mat2::SIGMA, g);
        let t1 = actmat(&mat2::TAU, g);
        let t2 = actmat(&mat2::mul(&mat2::TAU, &mat2::TAU), g);
        (0..self.p1.len()).all(|i| {
            let h = self.p1.lift(i);
            let s = self.value(&mat2::mul(&h, &mat2::SIGMA)).act_with(&sg);
            let a = self.value(&mat2::mul(&h, &mat2::TAU)).act_with(&t2);
            let b = self.value(&mat2::mul3(&h, &mat2::TAU, &mat2::TAU)).act_with(&t1);
            self.values[i].add(&s).is_zero() && self.values[i].add(&a).add(&b).is_zero()
        })
    }
}

/// Row j of the action matrix of m: the X^j Y^(g−j) coefficient of each
/// monomial's image.
pub fn actmat_row(m: &Mat2, g: usize, j: usize) -> Vec<BigInt> {
    use crate::arith::int::binomial;
    let [a, b, c, d] = m.map(BigInt::from);
    (0..=g)
        .map(|s| {
            // coefficient of X^j in (dX − cY)^s (−bX + aY)^(g−s)
            let mut acc = BigInt::from(0);
            let lo = j.saturating_sub(g - s);
            for s1 in lo..=s.min(j) {
                let s2 = j - s1;
                let t1 = binomial(s as u64, s1 as u64) * num_traits::pow(d.clone(), s1) * num_traits::pow(-&c, s - s1);
                let t2 = binomial((g - s) as u64, s2 as u64)
                    * num_traits::pow(-&b, s2)
                    * num_traits::pow(a.clone(), g - s - s2);
                acc += t1 * t2;
            }
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_divisors() {
        let d: Divisor = "oo - 3/25".parse().unwrap();
        assert_eq!(d, Divisor::path(Cusp::Infinity, Cusp::new(3, 25)));
        let e: Divisor = "{-1/2} - {0}".parse().unwrap();
        assert_eq!(e, Divisor::path(Cusp::new(-1, 2), Cusp::new(0, 1)));
        let f: Divisor = "2*1/3 - 3/9 - oo".parse().unwrap();
        assert_eq!(f, Divisor::path(Cusp::new(1, 3), Cusp::Infinity));
        assert!("oo - 1/2 + 3".parse::<Divisor>().is_err());
        assert!("1/0 - 2".parse::<Divisor>().is_err());
        assert_eq!(d.to_string(), "oo - 3/25");
        assert_eq!(d.to_string().parse::<Divisor>().unwrap(), d);
    }

    #[test]
    fn row_matches_full_action_matrix() {
        let m = [3, -2, 7, 5];
        let full = actmat(&m, 6);
        for j in 0..=6 {
            assert_eq!(actmat_row(&m, 6, j), full[j]);
        }
    }
}
