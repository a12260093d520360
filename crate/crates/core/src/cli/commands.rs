//! The batch commands. Each returns a `Report` holding the JSON payload,
//! an optional CSV table and the exit code; construction failures are
//! errors and map to exit code 1.

use std::collections::BTreeMap;
use std::sync::Arc;

use anyhow::{bail, Context};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::analysis::identities::{alphastick, degen, fe_sign, slope_bound, three_term_all, two_term};
use crate::analysis::{
    find_congruent_weight2, form_id, invariant_table, matching_twists, normalized_forms, oldspace_decompose,
    verify_congruence, verify_weight2_patterns, CongruenceMode, InvariantRow, OldspaceReport,
};
use crate::analysis::patterns::{csv_table, CSV_HEADER
};
use crate::arith::int::{q_int, Q};
use crate::arith::poly::pretty;
use crate::coeff::Coeff;
use crate::error::Error;
use crate::mazurtate::{lp_approx, p_stabilize};
use crate::modsym::eigen::{cuspidal_eigensymbols, MatrixStore};
use crate::modsym::normalize::{filtration_depth, mu_min, NormalizedSymbol};
use crate::modsym::{build_space, CosetSymbol, Eigensymbol, HeckeCache};
use crate::padic::PAdic;

use super::cache::DiskCache;
use super::config::{JobConfig, VerifyMode};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONSTRUCTION: i32 = 1;
pub const EXIT_UNCERTIFIED: i32 = 2;
pub const EXIT_IDENTITY: i32 = 3;

/// Random symbols checked by `verify --mode degen` besides the eigensymbols.
const RANDOM_DEGEN_SYMBOLS: usize = 10;
const RANDOM_SEED: u64 = 0x6d74_6c61_6221;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Invariants,
    Verify(VerifyMode),
    MuMin,
    Eigenforms,
    Stabilize,
}

impl Command {
    /// Base name of the report files.
    pub fn name(&self) -> String {
        match self {
            Command::Invariants => "invariants".into(),
            Command::Verify(m) => format!("verify-{}", m.name()),
            Command::MuMin => "mu-min".into(),
            Command::Eigenforms => "eigenforms".into(),
            Command::Stabilize => "stabilize".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub name: String,
    pub json: Value,
    pub csv: Option<String>,
    pub code: i32,
}

impl Report {
    /// Pretty JSON with a trailing newline; stable key order.
    pub fn json_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.json).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Lazily built spaces, classes and normalized forms for one job.
pub struct Session {
    pub cfg: JobConfig,
    pub store: Option<Arc<DiskCache>>,
    hecke: Option<HeckeCache>,
    classes: BTreeMap<i32, Vec<Eigensymbol>>,
    forms: BTreeMap<i32, Vec<NormalizedSymbol>>,
}

impl Session {
    pub fn new(cfg: JobConfig) -> anyhow::Result<Session> {
        cfg.validate()?;
        let store = match &cfg.cache_dir {
            Some(d) => Some(Arc::new(DiskCache::open(d).with_context(|| format!("opening cache {}", d.display()))?)),
            None => None,
        };
        Ok(Session { cfg, store, hecke: None, classes: BTreeMap::new(), forms: BTreeMap::new() })
    }

    fn hecke(&mut self) -> anyhow::Result<&mut HeckeCache> {
        if self.hecke.is_none() {
            let space = Arc::new(build_space(self.cfg.level, self.cfg.weight)?);
            self.hecke = Some(match &self.store {
                Some(s) => HeckeCache::with_store(space, s.clone() as Arc<dyn MatrixStore>),
                None => HeckeCache::new(space),
            });
        }
        Ok(self.hecke.as_mut().expect("just built"))
    }

    pub fn classes(&mut self, sign: i32) -> anyhow::Result<&[Eigensymbol]> {
        if !self.classes.contains_key(&sign) {
            let ell_max = self.cfg.ell_max;
            let cs = cuspidal_eigensymbols(self.hecke()?, sign, ell_max)?;
            self.classes.insert(sign, cs);
        }
        Ok(&self.classes[&sign])
    }

    pub fn forms(&mut self, sign: i32) -> anyhow::Result<&[NormalizedSymbol]> {
        if !self.forms.contains_key(&sign) {
            let (p, m) = (self.cfg.p, self.cfg.precision);
            let fs = normalized_forms(self.classes(sign)?, p, m)?;
            self.forms.insert(sign, fs);
        }
        Ok(&self.forms[&sign])
    }

    fn envelope(&self, cmd: Command, results: Value, code: i32) -> Value {
        let keys: Vec<String> = self.store.as_ref().map(|s| s.keys_used().iter().map(|k| k.label()).collect()).unwrap_or_default();
        json!({
            "schema_version": SCHEMA_VERSION,
            "command": cmd.name(),
            "config": self.cfg.to_json(),
            "cache_keys": keys,
            "exit_code": code,
            "results": results,
        })
    }
}

fn q_str(q: &Option<Q>) -> Value {
    q.as_ref().map_or(Value::Null, |q| Value::String(q.to_string()))
}

fn slope_json(f: &NormalizedSymbol) -> anyhow::Result<Value> {
    Ok(match f.slope()? {
        Some(s) => json!(s.to_string()),
        None => json!("inf"),
    })
}

/// Runs one command on a fresh session.
pub fn execute(cmd: Command, cfg: &JobConfig) -> anyhow::Result<Report> {
    let mut s = Session::new(cfg.clone())?;
    execute_in(&mut s, cmd)
}

pub fn execute_in(s: &mut Session, cmd: Command) -> anyhow::Result<Report> {
    let (results, csv, code) = match cmd {
        Command::Invariants => invariants(s)?,
        Command::MuMin => mu_min_cmd(s)?,
        Command::Eigenforms => eigenforms(s)?,
        Command::Stabilize => stabilize(s)?,
        Command::Verify(m) => {
            let (rows, code) = verify(s, m)?;
            (rows, None, code)
        }
    };
    Ok(Report { name: cmd.name(), json: s.envelope(cmd, results, code), csv, code })
}

type Outcome = (Value, Option<String>, i32);

fn invariants(s: &mut Session) -> anyhow::Result<Outcome> {
    let (p, n_max) = (s.cfg.p, s.cfg.n_max);
    let mut out = Vec::new();
    let mut csv = Vec::new();
    let mut certified = true;
    for sign in s.cfg.sign.signs() {
        for f in s.forms(sign)? {
            let report = invariant_table(f, n_max, &matching_twists(p, sign))?;
            certified &= report.all_certified();
            let id = form_id(f);
            for r in &report.rows {
                csv.push([vec![id.clone(), sign.to_string()], r.csv_record()].concat());
            }
            out.push(json!({"form": id, "sign": sign, "slope": slope_json(f)?, "report": report.to_json()}));
        }
    }
    let csv = csv_table(&[&["form", "sign"][..], &CSV_HEADER[..]].concat(), csv);
    Ok((json!(out), Some(csv), if certified { EXIT_OK } else { EXIT_UNCERTIFIED }))
}

fn mu_min_cmd(s: &mut Session) -> anyhow::Result<Outcome> {
    let mut out = Vec::new();
    let mut csv = Vec::new();
    let mut code = EXIT_OK;
    for sign in s.cfg.sign.signs() {
        for f in s.forms(sign)? {
            let (r, rs) = filtration_depth(f);
            let (mu, note) = match mu_min(f) {
                Ok(m) => (Some(m), String::new()),
                Err(e @ Error::OutOfBudget(_)) => {
                    code = EXIT_UNCERTIFIED;
                    (None, e.to_string())
                }
                Err(e) => return Err(e.into()),
            };
            let slope = slope_json(f)?;
            csv.push(vec![
                form_id(f),
                sign.to_string(),
                slope.as_str().unwrap_or("").to_string(),
                mu.as_ref().map(|m| m.to_string()).unwrap_or_default(),
                r.to_string(),
                rs.to_string(),
            ]);
            out.push(json!({
                "form": form_id(f), "sign": sign, "slope": slope, "mu_min": q_str(&mu),
                "filtration": [r, rs], "note": note,
            }));
        }
    }
    let csv = csv_table(&["form", "sign", "slope", "mu_min", "fil_r", "fil_s"], csv);
    Ok((json!(out), Some(csv), code))
}

fn eigenforms(s: &mut Session) -> anyhow::Result<Outcome> {
    let mut out = Vec::new();
    let mut csv = Vec::new();
    for sign in s.cfg.sign.signs() {
        let classes: Vec<Eigensymbol> = s.classes(sign)?.to_vec();
        let forms: Vec<NormalizedSymbol> = s.forms(sign)?.to_vec();
        for c in &classes {
            let new = c.is_new()?;
            let eps = if new { fe_sign(c)? } else { None };
            let mut embs = Vec::new();
            for f in forms.iter().filter(|f| f.eigen.key == c.key) {
                let slope = slope_json(f)?;
                csv.push(vec![
                    sign.to_string(),
                    c.key.clone(),
                    c.field.degree.to_string(),
                    new.to_string(),
                    eps.map(|e| e.to_string()).unwrap_or_default(),
                    f.embedding.index.to_string(),
                    f.embedding.e.to_string(),
                    f.embedding.f.to_string(),
                    slope.as_str().unwrap_or("").to_string(),
                ]);
                embs.push(json!({"index": f.embedding.index, "e": f.embedding.e, "f": f.embedding.f, "slope": slope}));
            }
            let eigenvalues: BTreeMap<String, String> =
                c.eigenvalues.iter().map(|(l, a)| (l.to_string(), a.to_string())).collect();
            out.push(json!({
                "sign": sign, "key": c.key, "degree": c.field.degree, "minpoly": pretty(&c.field.minpoly),
                "eigenvalues": eigenvalues, "new": new, "fe_sign": eps, "embeddings": embs,
            }));
        }
    }
    let header = ["sign", "class", "degree", "new", "fe_sign", "embedding", "e", "f", "slope"];
    Ok((json!(out), Some(csv_table(&header, csv)), EXIT_OK))
}

fn psi_rows(stab: &crate::mazurtate::Stabilized, twists: &[u32], n_max: u32) -> Vec<InvariantRow> {
    let mut rows = Vec::new();
    for &i in twists {
        for n in 0..=n_max {
            rows.push(match lp_approx(stab, i, n) {
                Ok((_, inv)) => InvariantRow { n, i, mu: Some(inv.mu), lambda: Some(inv.lambda), note: String::new() },
                Err(e) => InvariantRow { n, i, mu: None, lambda: None, note: e.to_string() },
            });
        }
    }
    rows
}

/// First n at which every twist has equal certified ψ invariants at n, n + 1.
pub fn stabilization_point(rows: &[InvariantRow], twists: &[u32], n_max: u32) -> Option<u32> {
    (0..n_max).find(|&n| {
        twists.iter().all(|&i| {
            let a = rows.iter().find(|r| r.i == i && r.n == n);
            let b = rows.iter().find(|r| r.i == i && r.n == n + 1);
            matches!((a, b), (Some(a), Some(b)) if a.certified() && a.mu == b.mu && a.lambda == b.lambda)
        })
    })
}

fn stabilize(s: &mut Session) -> anyhow::Result<Outcome> {
    let (p, n_max) = (s.cfg.p, s.cfg.n_max);
    let mut out = Vec::new();
    let mut csv = Vec::new();
    let mut code = EXIT_OK;
    for sign in s.cfg.sign.signs() {
        let twists = matching_twists(p, sign);
        for f in s.forms(sign)? {
            let id = form_id(f);
            let stab = match p_stabilize(f) {
                Ok(st) => st,
                Err(Error::NotOrdinary) => {
                    out.push(json!({"form": id, "sign": sign, "ordinary": false}));
                    continue;
                }
                Err(e) => return Err(e.into()),
            };
            let mut two = Vec::new();
            for &i in &twists {
                for n in 1..=n_max {
                    let ok = two_term(&stab, n, i)?;
                    if !ok {
                        code = EXIT_IDENTITY;
                    }
                    two.push(json!({"n": n, "i": i, "pass": ok}));
                }
            }
            let rows = psi_rows(&stab, &twists, n_max);
            if code == EXIT_OK && !rows.iter().all(|r| r.certified()) {
                code = EXIT_UNCERTIFIED;
            }
            for r in &rows {
                csv.push([vec![id.clone(), sign.to_string()], r.csv_record()].concat());
            }
            out.push(json!({
                "form": id, "sign": sign, "ordinary": true, "alpha": stab.alpha.to_string(),
                "two_term": two,
                "psi": rows.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
                "stabilized_at": stabilization_point(&rows, &twists, n_max),
            }));
        }
    }
    let csv = csv_table(&[&["form", "sign"][..], &CSV_HEADER[..]].concat(), csv);
    Ok((json!(out), Some(csv), code))
}

/// A symbol with random small integer coordinates, moved into the p-adic
/// completion of `like` after clearing denominators.
pub fn random_symbol(s: &mut Session, rng: &mut impl Rng, like: &NormalizedSymbol) -> anyhow::Result<CosetSymbol<PAdic>> {
    let space = s.hecke()?.space.clone();
    let coords: Vec<Q> = (0..space.dim()).map(|_| q_int(rng.gen_range(-9..=9))).collect();
    let values = space.values(&coords);
    let den = values
        .iter()
        .flat_map(|v| v.coeffs.iter())
        .fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let emb = like.embedding.clone();
    let sym = CosetSymbol::new(space.p1.clone(), values);
    Ok(sym.map(|c| PAdic::from_int(&emb, &(c * Q::from_integer(den.clone())).to_integer())))
}

fn verify(s: &mut Session, mode: VerifyMode) -> anyhow::Result<(Value, i32)> {
    let cfg = s.cfg.clone();
    let (p, n_max) = (cfg.p, cfg.n_max);
    let mut rows = Vec::new();
    let mut failed = false;
    fn note(rows: &mut Vec<Value>, failed: &mut bool, ok: bool, mut v: Value) {
        *failed |= !ok;
        v["pass"] = json!(ok);
        rows.push(v);
    }
    match mode {
        VerifyMode::ThreeTerm => {
            for sign in cfg.sign.signs() {
                for f in s.forms(sign)? {
                    for (n, i, ok) in three_term_all(f, n_max)? {
                        note(&mut rows, &mut failed, ok, json!({"form": form_id(f), "sign": sign, "n": n, "i": i}));
                    }
                }
            }
        }
        VerifyMode::Degen => {
            let mut rng = ChaCha8Rng::seed_from_u64(RANDOM_SEED);
            for sign in cfg.sign.signs() {
                let forms: Vec<NormalizedSymbol> = s.forms(sign)?.to_vec();
                for f in &forms {
                    for i in matching_twists(p, sign) {
                        for n in 1..=n_max {
                            let ok = degen(&f.local, p, n, i)?;
                            note(&mut rows, &mut failed, ok, json!({"symbol": form_id(f), "sign": sign, "n": n, "i": i}));
                        }
                    }
                }
                if let Some(like) = forms.first() {
                    for t in 0..RANDOM_DEGEN_SYMBOLS {
                        let sym = random_symbol(s, &mut rng, like)?;
                        for i in 0..(p - 1) as u32 {
                            for n in 1..=n_max {
                                let ok = degen(&sym, p, n, i)?;
                                note(&mut rows, &mut failed, ok, json!({"symbol": format!("random-{sign}-{t}"), "n": n, "i": i}));
                            }
                        }
                    }
                }
            }
        }
        VerifyMode::AtkinLehner => {
            for sign in cfg.sign.signs() {
                for c in s.classes(sign)? {
                    if !c.is_new()? {
                        continue;
                    }
                    let eps = fe_sign(c)?;
                    note(&mut rows, &mut failed, eps.is_some(), json!({"class": c.key, "sign": sign, "fe_sign": eps}));
                }
            }
        }
        VerifyMode::Alphastick => {
            if !(cfg.weight - 2).is_multiple_of(p as u32 - 1) {
                bail!(Error::WeightNotCongruent { g: cfg.weight - 2, p });
            }
            for sign in cfg.sign.signs() {
                for f in s.forms(sign)? {
                    for n in 1..=n_max {
                        let ok = alphastick(f, n)?;
                        note(&mut rows, &mut failed, ok, json!({"form": form_id(f), "sign": sign, "n": n}));
                    }
                    let ok = slope_bound(f)?;
                    note(&mut rows, &mut failed, ok, json!({"form": form_id(f), "sign": sign, "check": "slope-bound"}));
                }
            }
        }
        VerifyMode::Congruence => {
            for sign in cfg.sign.signs() {
                let forms: Vec<NormalizedSymbol> = s.forms(sign)?.to_vec();
                for f in &forms {
                    rows.extend(congruence_rows(f, &cfg, &mut failed)?);
                }
            }
        }
        VerifyMode::Wt2Patterns => {
            if cfg.weight != 2 {
                bail!("wt2-patterns needs weight 2, got {}", cfg.weight);
            }
            for sign in cfg.sign.signs() {
                for g in s.forms(sign)? {
                    let twists = matching_twists(p, sign);
                    let r = verify_weight2_patterns(g, n_max, &twists)?;
                    let mut ok = if r.branch == "supersingular" { r.per_parity_constant } else { r.stabilized_at.is_some() };
                    if r.branch == "ordinary" {
                        let stab = p_stabilize(g)?;
                        for &i in &twists {
                            for n in 1..=n_max {
                                ok &= two_term(&stab, n, i)?;
                            }
                        }
                    }
                    note(&mut rows, &mut failed, ok, json!({"form": form_id(g), "sign": sign, "report": r.to_json()}));
                }
            }
        }
        VerifyMode::Oldspace => {
            for sign in cfg.sign.signs() {
                let forms: Vec<NormalizedSymbol> = s.forms(sign)?.to_vec();
                let mut table = Vec::new();
                for f in &forms {
                    if cfg.weight == 2 || mu_min(f)? <= q_int(0) {
                        continue;
                    }
                    let slope = f.slope()?;
                    for m in find_congruent_weight2(f, cfg.level, cfg.ell_max)? {
                        let entry = match oldspace_decompose(f, &m.target, cfg.r, &m.common) {
                            Ok(o) => Ok(o),
                            Err(e @ Error::NotInSpan { .. }) => Err(e.to_string()),
                            Err(e) => return Err(e.into()),
                        };
                        table.push((slope.clone(), form_id(f), slope_json(f)?, m.target_id.clone(), entry));
                    }
                }
                // f_1, f_2, ... number the forms of one slope; within a slope,
                // forms whose decomposition uses the first degeneracy image
                // come first, canonical order otherwise (the sort is stable)
                let first_zero = |e: &Result<OldspaceReport, String>| match e {
                    Ok(o) => u8::from(o.coefficients.first().is_none_or(|c| c.is_zero())),
                    Err(_) => 2,
                };
                table.sort_by(|a, b| {
                    let ka = (a.0.is_none(), a.0.clone(), first_zero(&a.4));
                    let kb = (b.0.is_none(), b.0.clone(), first_zero(&b.4));
                    ka.cmp(&kb)
                });
                let mut j = 0;
                let mut prev: Option<Option<Q>> = None;
                for (slope, form, slope_v, target, entry) in table {
                    if prev.as_ref() != Some(&slope) {
                        j = 0;
                        prev = Some(slope);
                    }
                    j += 1;
                    let mut v = json!({"j": j, "slope": slope_v, "form": form, "sign": sign, "target": target});
                    let ok = match &entry {
                        Ok(o) => {
                            v["decomposition"] = o.to_json();
                            v["a"] = json!(o
                                .coefficients
                                .iter()
                                .enumerate()
                                .map(|(t, c)| json!({"t": t + 1, "value": c.to_string(), "zero": c.is_zero()}))
                                .collect::<Vec<_>>());
                            o.reassembles
                        }
                        Err(err) => {
                            v["in_span"] = json!(false);
                            v["note"] = json!(err);
                            true
                        }
                    };
                    note(&mut rows, &mut failed, ok, v);
                }
            }
        }
    }
    let code = if failed { EXIT_IDENTITY } else { EXIT_OK };
    Ok((json!({"mode": mode.name(), "checks": rows, "all_pass": !failed}), code))
}

/// Congruence rows for one form. A check counts towards failure only when
/// its hypotheses are certified: the weight-2 partner is non-ordinary (so
/// the residual representation is locally irreducible) and the slope or
/// weight condition of the mode holds.
fn congruence_rows(f: &NormalizedSymbol, cfg: &JobConfig, failed: &mut bool) -> anyhow::Result<Vec<Value>> {
    let p = cfg.p;
    let matches = find_congruent_weight2(f, cfg.level, cfg.ell_max)?;
    if matches.is_empty() {
        return Ok(Vec::new());
    }
    let slope = f.slope()?;
    let zero = q_int(0);
    let mm = mu_min(f)?;
    let mut rows = Vec::new();
    for m in &matches {
        let g_ordinary = m.target.slope()? == Some(zero.clone());
        let non_ordinary = slope.as_ref().is_none_or(|s| *s > zero);
        let low = matches!(&slope, Some(s) if *s > zero && *s < q_int(p as i64 - 1));
        let med = non_ordinary && cfg.weight > 2 && (cfg.weight as u64) < p * p + 1;
        let mut checks = Vec::new();
        for (mode, applies) in [(CongruenceMode::MedWeight, med), (CongruenceMode::LowSlope, low)] {
            if !applies {
                continue;
            }
            let r = verify_congruence(f, m, cfg.n_max, mode)?;
            let mu_ok = match mode {
                CongruenceMode::MedWeight => mm == zero,
                CongruenceMode::LowSlope => slope.as_ref().is_some_and(|s| mm <= *s),
            };
            let certified = !g_ordinary;
            if certified && !(r.all_pass() && mu_ok) {
                *failed = true;
            }
            checks.push(json!({
                "hypotheses_certified": certified, "mu_min_bound": mu_ok, "pass": r.all_pass() && mu_ok,
                "report": r.to_json(),
            }));
        }
        rows.push(json!({
            "form": form_id(f), "sign": f.sign(), "slope": slope_json(f)?, "mu_min": mm.to_string(),
            "unique_match": matches.len() == 1, "match": m.to_json(), "partner_ordinary": g_ordinary,
            "checks": checks,
        }));
    }
    Ok(rows)
}
