//! Property tests for the group-ring invariants, the filtrations on
//! V_g and the degeneracy identity on random symbols.

use std::sync::{Arc, LazyLock};

use mtlab::analysis::identities::degen;
use mtlab::arith::int::{q_int, Q};
use mtlab::mazurtate::group::{invariants, CyclicGroupRingElement};
use mtlab::modsym::normalize::{fil_r, in_fil_rs};
use mtlab::modsym::{build_space, CosetSymbol, HomogeneousPoly, ManinSymbolSpace};
use mtlab::padic::{primes_above, rational_field, PAdic, PAdicEmbedding};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn rational_embedding(p: u64) -> Arc<PAdicEmbedding> {
    Arc::new(primes_above(&rational_field(), p, 12).unwrap().remove(0))
}

static EMB3: LazyLock<Arc<PAdicEmbedding>> = LazyLock::new(|| rational_embedding(3));
static EMB5: LazyLock<Arc<PAdicEmbedding>> = LazyLock::new(|| rational_embedding(5));

fn emb(p: u64) -> Arc<PAdicEmbedding> {
    if p == 3 { EMB3.clone() } else { EMB5.clone() }
}

/// Exact p-adic valuation of an integer; `None` for zero.
fn vp(x: &BigInt, p: u64) -> Option<u32> {
    if x.is_zero() {
        return None;
    }
    let (mut x, p, mut v) = (x.clone(), BigInt::from(p), 0);
    while (&x % &p).is_zero() {
        x /= &p;
        v += 1;
    }
    Some(v)
}

/// Independent λ: least t with Σ_j c_j·C(j, t) ≢ 0 mod p, binomials exact.
fn lambda_exact(c: &[BigInt], p: u64) -> Option<u64> {
    let p = BigInt::from(p);
    (0..c.len()).find_map(|t| {
        let mut acc = BigInt::zero();
        let mut binom = BigInt::one(); // C(j, t), j = t onwards
        for (j, cj) in c.iter().enumerate().skip(t) {
            if j > t {
                binom = binom * BigInt::from(j) / BigInt::from(j - t);
            }
            acc += cj * &binom;
        }
        (!(acc % &p).is_zero()).then_some(t as u64)
    })
}

/// Independent (μ, λ) of an integer-coefficient element of Z_p[G_n].
fn invariants_exact(c: &[BigInt], p: u64) -> Option<(u32, u64)> {
    let mu = c.iter().filter_map(|x| vp(x, p)).min()?;
    let scale = BigInt::from(p).pow(mu);
    let scaled: Vec<BigInt> = c.iter().map(|x| x / &scale).collect();
    Some((mu, lambda_exact(&scaled, p)?))
}

fn element(p: u64, n: u32, c: &[BigInt]) -> CyclicGroupRingElement<PAdic> {
    let e = emb(p);
    CyclicGroupRingElement::new(p, n, c.iter().map(|x| PAdic::from_int(&e, x)).collect())
}

/// (p, n, integer coefficients) with small entries and a random p-power
/// factor, never identically zero.
fn group_ring_case(max_n: u32) -> impl Strategy<Value = (u64, u32, Vec<BigInt>)> {
    (prop_oneof![Just(3u64), Just(5u64)], 1..=max_n).prop_flat_map(|(p, n)| {
        let m = p.pow(n) as usize;
        (Just(p), Just(n), prop::collection::vec(-20i64..=20, m), 0u32..3, 0..m).prop_map(move |(p, n, v, k, at)| {
            let mut v: Vec<BigInt> = v.into_iter().map(BigInt::from).collect();
            if v.iter().all(Zero::is_zero) {
                v[at] = BigInt::one();
            }
            let s = BigInt::from(p).pow(k);
            (p, n, v.into_iter().map(|x| x * &s).collect())
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn invariants_agree_with_exact_binomials((p, n, c) in group_ring_case(3)) {
        let inv = invariants(&element(p, n, &c)).unwrap();
        let (mu, lambda) = invariants_exact(&c, p).unwrap();
        prop_assert_eq!(inv.mu, q_int(mu as i64));
        prop_assert_eq!(inv.lambda, lambda);
    }

    #[test]
    fn corestriction_shifts_lambda((p, n, c) in group_ring_case(2)) {
        let t = element(p, n, &c);
        let before = invariants(&t).unwrap();
        let after = invariants(&t.nu_corestrict()).unwrap();
        prop_assert_eq!(after.mu, before.mu);
        prop_assert_eq!(after.lambda, p.pow(n + 1) - p.pow(n) + before.lambda);
    }

    #[test]
    fn projection_keeps_invariants_below_the_lower_level((p, n, c) in group_ring_case(3)) {
        let t = element(p, n, &c);
        let full = invariants(&t).unwrap();
        let proj = t.pi_project();
        match invariants(&proj) {
            Ok(inv) if inv.mu == q_int(0) => {
                prop_assert_eq!(full.mu.clone(), q_int(0));
                prop_assert_eq!(inv.lambda, full.lambda);
            }
            _ => {}
        }
        // μ(θ) = 0 with λ(θ) below the order of the smaller group forces
        // π(θ) to have μ = 0 and the same λ
        if full.mu == q_int(0) && full.lambda < p.pow(n - 1) {
            let inv = invariants(&proj).unwrap();
            prop_assert_eq!(inv.mu, q_int(0));
            prop_assert_eq!(inv.lambda, full.lambda);
        }
    }

    #[test]
    fn automorphisms_preserve_invariants((p, n, c) in group_ring_case(3), u in 1u64..200) {
        prop_assume!(u % p != 0);
        let t = element(p, n, &c);
        prop_assert_eq!(invariants(&t.automorphism(u)).unwrap(), invariants(&t).unwrap());
    }
}

fn vals(poly: &HomogeneousPoly<Q>, p: u64) -> Vec<Option<Q>> {
    poly.coeffs
        .iter()
        .map(|c| {
            assert!(c.is_integer());
            vp(&c.to_integer(), p).map(|v| q_int(v as i64))
        })
        .collect()
}

/// A random element of S_0(p): integer entries, p | c, p ∤ a, det ≠ 0.
fn s0p(p: u64) -> impl Strategy<Value = [i128; 4]> {
    (-30i128..=30, -30i128..=30, -10i128..=10, -30i128..=30)
        .prop_map(move |(a, b, c, d)| {
            let p = p as i128;
            let a = if a % p == 0 { a + 1 } else { a };
            [a, b, c * p, d]
        })
        .prop_filter("invertible", |m| m[0] * m[3] - m[1] * m[2] != 0)
}

/// A random element of Fil^{r,s}(V_g(Z)) built coefficient by coefficient.
fn fil_rs_element(p: u64, g: usize, r: u32, s: u32, raw: &[i64]) -> HomogeneousPoly<Q> {
    let coeffs = (0..=g)
        .map(|j| {
            let need = if (j as u32) < r {
                r - j as u32 + u32::from(j as u32 + s > r)
            } else if j as u32 == r && s >= 1 {
                1
            } else {
                0
            };
            q_int(raw[j]) * Q::from_integer(BigInt::from(p).pow(need))
        })
        .collect();
    HomogeneousPoly::new(coeffs)
}

fn case_fil() -> impl Strategy<Value = (u64, usize, u32, u32, Vec<i64>, [i128; 4])> {
    (prop_oneof![Just(3u64), Just(5u64)], 2usize..=8).prop_flat_map(|(p, g)| {
        (0..=g as u32).prop_flat_map(move |r| {
            (Just(p), Just(g), Just(r), 0..=r, prop::collection::vec(-50i64..=50, g + 1), s0p(p))
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn fil_rs_is_stable_under_s0p((p, g, r, s, raw, m) in case_fil()) {
        let poly = fil_rs_element(p, g, r, s, &raw);
        prop_assert!(fil_r(&vals(&poly, p), g as u32 + 1) >= r);
        prop_assert!(in_fil_rs(&vals(&poly, p), r, s));
        let moved = poly.act(&m);
        let v = vals(&moved, p);
        prop_assert!(fil_r(&v, g as u32 + 1) >= r);
        prop_assert!(in_fil_rs(&v, r, s));
    }

    #[test]
    fn quotient_character((p, g, r, s, _raw, m) in case_fil()) {
        prop_assume!(r as usize <= g);
        // p^s X^{r−s} Y^{g−r+s} | γ ≡ d^{r−s} a^{g−r+s} · itself mod Fil^{r,s+1}
        let mono = HomogeneousPoly::monomial(g, (r - s) as usize, Q::from_integer(BigInt::from(p).pow(s)));
        let (a, d) = (BigInt::from(m[0]), BigInt::from(m[3]));
        let chi = d.pow(r - s) * a.pow(g as u32 - r + s);
        let diff = mono.act(&m).sub(&mono.scale(&Q::from_integer(chi)));
        let v = vals(&diff, p);
        prop_assert!(fil_r(&v, g as u32 + 1) >= r);
        prop_assert!(in_fil_rs(&v, r, s + 1));
        // and the monomial itself is not in Fil^{r,s+1}
        prop_assert!(!(fil_r(&vals(&mono, p), g as u32 + 1) >= r && in_fil_rs(&vals(&mono, p), r, s + 1)));
    }

    #[test]
    fn fil_r_under_upper_triangular_p((p, g, r, _s, raw, _m) in case_fil(), a in 0i128..5) {
        let poly = fil_rs_element(p, g, r, 0, &raw);
        let moved = poly.act(&[1, a, 0, p as i128]);
        for c in &moved.coeffs {
            let v = vp(&c.to_integer(), p);
            prop_assert!(v.is_none_or(|v| v >= r));
        }
    }
}

struct RandomSpace {
    p: u64,
    space: ManinSymbolSpace,
}

static SPACES: LazyLock<Vec<RandomSpace>> = LazyLock::new(|| {
    [(11u64, 4u32, 5u64), (17, 4, 3), (11, 6, 3), (7, 4, 3)]
        .into_iter()
        .map(|(n, k, p)| RandomSpace { p, space: build_space(n, k).unwrap() })
        .collect()
});

/// The symbol with the given free coordinates, scaled to integral values
/// and moved into Q_p.
fn integral_symbol(s: &RandomSpace, coords: &[i64]) -> CosetSymbol<PAdic> {
    let coords: Vec<Q> = coords.iter().take(s.space.dim()).map(|&c| q_int(c)).collect();
    let values = s.space.values(&coords);
    let den = values.iter().flat_map(|v| v.coeffs.iter()).fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let e = emb(s.p);
    CosetSymbol::new(s.space.p1.clone(), values)
        .map(|c| PAdic::from_int(&e, &(c * Q::from_integer(den.clone())).to_integer()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn degeneracy_identity_on_random_symbols(
        which in 0usize..4,
        coords in prop::collection::vec(-9i64..=9, 64),
        n in 1u32..=2,
        i_raw in 0u32..4,
    ) {
        let s = &SPACES[which];
        prop_assume!(s.space.dim() <= coords.len());
        prop_assume!(coords.iter().take(s.space.dim()).any(|c| *c != 0));
        let sym = integral_symbol(s, &coords);
        let i = i_raw % (s.p as u32 - 1);
        prop_assert!(degen(&sym, s.p, n, i).unwrap());
    }
}

#[test]
fn lambda_oracle_sanity() {
    // (1 + T)^j expansions: γ^2 − 1 = 2T + T², so λ = 1 for p odd
    let c: Vec<BigInt> = [-1i64, 0, 1].into_iter().map(BigInt::from).collect();
    assert_eq!(lambda_exact(&c, 3), Some(1));
    // norm element Σγ^j ≡ T^{p−1} mod p
    let c: Vec<BigInt> = vec![BigInt::one(); 5];
    assert_eq!(lambda_exact(&c, 5), Some(4));
}
