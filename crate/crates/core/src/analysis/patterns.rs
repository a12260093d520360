//! Tables of finite-level invariants and their classification against the
//! closed set of λ-growth templates.

use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::arith::int::Q;
use crate::error::Result;
use crate::mazurtate::{invariants, lp_approx, p_stabilize, q_n, theta_ni};
use crate::modsym::normalize::NormalizedSymbol;

/// One (n, i) entry; uncertified rows carry the reason instead of values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantRow {
    pub n: u32,
    pub i: u32,
    pub mu: Option<Q>,
    pub lambda: Option<u64>,
    pub note: String,
}

impl InvariantRow {
    pub fn certified(&self) -> bool {
        self.mu.is_some() && self.lambda.is_some()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "i": self.i,
            "mu": self.mu.as_ref().map(|m| m.to_string()),
            "lambda": self.lambda,
            "certified": self.certified(),
            "note": self.note,
        })
    }

    /// Fields in the order of `CSV_HEADER`.
    pub fn csv_record(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.i.to_string(),
            self.mu.as_ref().map(|m| m.to_string()).unwrap_or_default(),
            self.lambda.map(|l| l.to_string()).unwrap_or_default(),
            self.certified().to_string(),
        ]
    }
}

pub const CSV_HEADER: [&str; 5] = ["n", "i", "mu", "lambda", "certified"];

/// Renders a header and records as CSV text.
pub fn csv_table<R, I>(header: &[&str], records: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in records {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pattern {
    /// λ = pⁿ − pⁿ⁻¹ + c
    Ordinary,
    /// λ = pⁿ − pⁿ⁻¹ + qₙ₋₁ + c_± by the parity of n
    Supersingular,
    /// λ = pⁿ − pⁿ⁻² + c
    Shifted,
    /// λ = pⁿ − pⁿ⁻² + qₙ₋₂ + c
    ShiftedSupersingular,
    /// λ = pⁿ − 1
    Maximal,
    None,
}

impl Pattern {
    pub fn name(&self) -> &'static str {
        match self {
            Pattern::Ordinary => "constant-lambda",
            Pattern::Supersingular => "supersingular",
            Pattern::Shifted => "shifted",
            Pattern::ShiftedSupersingular => "shifted-supersingular",
            Pattern::Maximal => "maximal",
            Pattern::None => "none",
        }
    }
}

/// Pattern of one twist with its fitted constants (c, or c₊ for even n
/// and c₋ for odd n).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternFit {
    pub i: u32,
    pub pattern: Pattern,
    pub constants: Vec<i64>,
    /// Smallest n of the rows used in the fit.
    pub n0: u32,
}

impl PatternFit {
    pub fn to_json(&self) -> Value {
        json!({"i": self.i, "pattern": self.pattern.name(), "constants": self.constants, "n0": self.n0})
    }
}

#[derive(Clone, Debug)]
pub struct InvariantReport {
    pub p: u64,
    pub rows: Vec<InvariantRow>,
    pub fits: Vec<PatternFit>,
}

impl InvariantReport {
    pub fn all_certified(&self) -> bool {
        self.rows.iter().all(|r| r.certified())
    }

    pub fn row(&self, n: u32, i: u32) -> Option<&InvariantRow> {
        self.rows.iter().find(|r| r.n == n && r.i == i)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "p": self.p,
            "rows": self.rows.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
            "patterns": self.fits.iter().map(|f| f.to_json()).collect::<Vec<_>>(),
        })
    }

    pub fn csv(&self) -> String {
        csv_table(&CSV_HEADER, self.rows.iter().map(InvariantRow::csv_record))
    }
}

fn pw(p: u64, e: i64) -> i64 {
    if e < 0 {
        0
    } else {
        (p as i64).pow(e as u32)
    }
}

fn q(n: i64, p: u64) -> i64 {
    if n < 0 {
        0
    } else {
        q_n(n as u32, p) as i64
    }
}

/// Fits the templates in a fixed order to (n, λ) points with n ≥ 2.
pub fn fit_pattern(p: u64, i: u32, pts: &[(u32, u64)]) -> PatternFit {
    let pts: Vec<(i64, i64)> = pts.iter().filter(|(n, _)| *n >= 2).map(|&(n, l)| (n as i64, l as i64)).collect();
    let n0 = pts.iter().map(|x| x.0 as u32).min().unwrap_or(0);
    let none = PatternFit { i, pattern: Pattern::None, constants: Vec::new(), n0 };
    if pts.is_empty() {
        return none;
    }
    let constant = |base: &dyn Fn(i64) -> i64| -> Option<i64> {
        let c = pts[0].1 - base(pts[0].0);
        pts.iter().all(|&(n, l)| l - base(n) == c).then_some(c)
    };
    if pts.iter().all(|&(n, l)| l == pw(p, n) - 1) {
        return PatternFit { i, pattern: Pattern::Maximal, constants: Vec::new(), n0 };
    }
    if let Some(c) = constant(&|n| pw(p, n) - pw(p, n - 1)) {
        return PatternFit { i, pattern: Pattern::Ordinary, constants: vec![c], n0 };
    }
    if let Some(c) = constant(&|n| pw(p, n) - pw(p, n - 2)) {
        return PatternFit { i, pattern: Pattern::Shifted, constants: vec![c], n0 };
    }
    if let Some(c) = constant(&|n| pw(p, n) - pw(p, n - 2) + q(n - 2, p)) {
        return PatternFit { i, pattern: Pattern::ShiftedSupersingular, constants: vec![c], n0 };
    }
    // parity-split constants
    let base = |n: i64| pw(p, n) - pw(p, n - 1) + q(n - 1, p);
    let mut cs: [Option<i64>; 2] = [None, None];
    for &(n, l) in &pts {
        let slot = &mut cs[(n % 2) as usize];
        match slot {
            None => *slot = Some(l - base(n)),
            Some(c) if *c != l - base(n) => return none,
            _ => {}
        }
    }
    PatternFit { i, pattern: Pattern::Supersingular, constants: cs.iter().map(|c| c.unwrap_or(0)).collect(), n0 }
}

/// μ and λ of θ_{n,i}(f) for n ≤ n_max and the given twists, with a
/// pattern fit per twist on the certified rows with n ≥ 2.
pub fn invariant_table(f: &NormalizedSymbol, n_max: u32, twists: &[u32]) -> Result<InvariantReport> {
    let p = f.p();
    let mut rows = Vec::new();
    for &i in twists {
        for n in 0..=n_max {
            let theta = theta_ni(&f.local, p, n, i)?;
            rows.push(match invariants(&theta) {
                Ok(inv) => InvariantRow { n, i, mu: Some(inv.mu), lambda: Some(inv.lambda), note: String::new() },
                Err(e) => InvariantRow { n, i, mu: None, lambda: None, note: e.to_string() },
            });
        }
    }
    let fits = twists
        .iter()
        .map(|&i| {
            let pts: Vec<(u32, u64)> =
                rows.iter().filter(|r| r.i == i).filter_map(|r| r.lambda.map(|l| (r.n, l))).collect();
            fit_pattern(p, i, &pts)
        })
        .collect();
    Ok(InvariantReport { p, rows, fits })
}

/// Outcome of the weight-2 pattern check.
#[derive(Clone, Debug)]
pub struct Weight2Report {
    /// "supersingular" when ord_p(a_p) > 0, otherwise "ordinary".
    pub branch: &'static str,
    pub table: InvariantReport,
    /// Supersingular branch: λ(θ_{n,i}) − qₙ per certified row.
    pub lambda_minus_q: Vec<(u32, u32, i64)>,
    /// Supersingular branch: the rows with n ≥ 2 give one constant per
    /// parity (and μ constant per parity).
    pub per_parity_constant: bool,
    /// Ordinary branch: invariants of ψ_{n,i}.
    pub psi_rows: Vec<InvariantRow>,
    /// Ordinary branch: first n with equal ψ invariants at n and n + 1.
    pub stabilized_at: Option<u32>,
}

impl Weight2Report {
    pub fn to_json(&self) -> Value {
        json!({
            "branch": self.branch,
            "table": self.table.to_json(),
            "lambda_minus_q": self.lambda_minus_q.iter().map(|(n, i, c)| json!({"n": n, "i": i, "value": c})).collect::<Vec<_>>(),
            "per_parity_constant": self.per_parity_constant,
            "psi": self.psi_rows.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
            "stabilized_at": self.stabilized_at,
        })
    }
}

/// Routes a weight-2 form by its slope: non-ordinary forms are checked for
/// per-parity constancy of μ and of λ − qₙ; ordinary forms are stabilized
/// and the invariants of ψ_{n,i} are tracked until two levels agree.
pub fn verify_weight2_patterns(g: &NormalizedSymbol, n_max: u32, twists: &[u32]) -> Result<Weight2Report> {
    let p = g.p();
    let table = invariant_table(g, n_max, twists)?;
    let zero = Q::from_integer(BigInt::from(0));
    let ordinary = g.slope()? == Some(zero.clone());
    if !ordinary {
        let mut lmq = Vec::new();
        let mut ok = true;
        for &i in twists {
            let mut seen: [Option<(Q, i64)>; 2] = [None, None];
            for r in table.rows.iter().filter(|r| r.i == i && r.n >= 2) {
                let (Some(mu), Some(l)) = (&r.mu, r.lambda) else {
                    ok = false;
                    continue;
                };
                let d = l as i64 - q_n(r.n, p) as i64;
                lmq.push((r.n, i, d));
                let slot = &mut seen[(r.n % 2) as usize];
                match slot {
                    None => *slot = Some((mu.clone(), d)),
                    Some((m0, d0)) => {
                        if *m0 != *mu || (*mu == zero && *d0 != d) {
                            ok = false;
                        }
                    }
                }
            }
        }
        return Ok(Weight2Report {
            branch: "supersingular",
            table,
            lambda_minus_q: lmq,
            per_parity_constant: ok,
            psi_rows: Vec::new(),
            stabilized_at: None,
        });
    }
    let stab = p_stabilize(g)?;
    let mut psi_rows = Vec::new();
    for &i in twists {
        for n in 0..=n_max {
            psi_rows.push(match lp_approx(&stab, i, n) {
                Ok((_, inv)) => InvariantRow { n, i, mu: Some(inv.mu), lambda: Some(inv.lambda), note: String::new() },
                Err(e) => InvariantRow { n, i, mu: None, lambda: None, note: e.to_string() },
            });
        }
    }
    let stabilized_at = (0..n_max).find(|&n| {
        twists.iter().all(|&i| {
            let a = psi_rows.iter().find(|r| r.i == i && r.n == n);
            let b = psi_rows.iter().find(|r| r.i == i && r.n == n + 1);
            matches!((a, b), (Some(a), Some(b)) if a.certified() && a.mu == b.mu && a.lambda == b.lambda)
        })
    });
    Ok(Weight2Report {
        branch: "ordinary",
        table,
        lambda_minus_q: Vec::new(),
        per_parity_constant: false,
        psi_rows,
        stabilized_at,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn templates() {
        assert_eq!(fit_pattern(5, 0, &[(1, 4), (2, 24), (3, 124)]).pattern, Pattern::Maximal);
        let f = fit_pattern(3, 0, &[(2, 6), (3, 18)]);
        assert_eq!((f.pattern, f.constants.clone()), (Pattern::Ordinary, vec![0]));
        let f = fit_pattern(3, 0, &[(2, 8), (3, 24)]);
        assert_eq!((f.pattern, f.constants.clone()), (Pattern::Shifted, vec![0]));
        // pⁿ − pⁿ⁻¹ + qₙ₋₁ + c±: n=2: 6+0+1, n=3: 18+2+0, n=4: 54+6+1
        let f = fit_pattern(3, 0, &[(2, 7), (3, 20), (4, 61)]);
        assert_eq!((f.pattern, f.constants.clone()), (Pattern::Supersingular, vec![1, 0]));
        assert_eq!(fit_pattern(3, 0, &[(2, 5), (3, 1), (4, 2)]).pattern, Pattern::None);
    }
}
