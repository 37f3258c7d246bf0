//! Acceptance suite: one PASS/FAIL line per criterion. Exits nonzero if any
//! criterion fails.

#![allow(clippy::needless_range_loop)]

use std::f64::consts::PI;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use kpgalois::cyclotomic::{sqrt_integer, CycNumber};
use kpgalois::fusion::{kac_walton_table, verlinde_table};
use kpgalois::galois_action::{build_action_table, galois_group_elements};
use kpgalois::invariants::{
    as_dimension, chain, genus_weights, keychain, parallel_unknots, verlinde_dimension,
};
use kpgalois::modular_data::ModularData;
use kpgalois::relations::{all_tuples, RelationReport, Verifier};
use kpgalois::rootsys::SimpleAlgebra;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const MODULAR_MATRIX: &[(&str, u32)] = &[
    ("A1", 1), ("A1", 2), ("A1", 3), ("A1", 4), ("A1", 5), ("A1", 6), ("A1", 7), ("A1", 8),
    ("A2", 1), ("A2", 2), ("A2", 3), ("A2", 4), ("A2", 5),
    ("A3", 1), ("A3", 2), ("A3", 3),
    ("G2", 1), ("G2", 2), ("G2", 3),
];

const RELATION_MATRIX: &[(&str, u32)] = &[
    ("A1", 1), ("A1", 2), ("A1", 3), ("A1", 4),
    ("A2", 1), ("A2", 2), ("A2", 3),
];

const LINEARIZED_MATRIX: &[(&str, u32)] = &[
    ("A1", 1), ("A1", 2), ("A1", 3), ("A1", 4),
    ("A2", 1), ("A2", 2),
];

fn build(name: &str, k: u32) -> ModularData {
    ModularData::build(Arc::new(SimpleAlgebra::parse(name).expect("algebra")), k)
        .unwrap_or_else(|e| panic!("{name} k={k}: {e}"))
}

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    for &(name, k) in MODULAR_MATRIX {
        let d = build(name, k);
        let tag = || format!("{name} k={k}");
        ensure(d.is_symmetric(), || format!("{}: S not symmetric", tag()))?;
        ensure(d.is_unitary(), || format!("{}: S not unitary", tag()))?;
        // `build` already rejects an S^2 that is not a permutation.
        ensure(d.conj_is_involution(), || format!("{}: C^2 != 1", tag()))?;
        ensure(d.satisfies_modular_relation(), || format!("{}: (ST)^3 != S^2", tag()))?;
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(180), || format!("took {t:?}, limit 3 min"))?;
    Ok(format!("{} (algebra, k) pairs exact", MODULAR_MATRIX.len()))
}

fn criterion_2() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 1..=8u32 {
        let d = build("A1", k);
        let m = (k + 2) as f64;
        for a in 0..=k as usize {
            for b in 0..=k as usize {
                let want = (2.0 / m).sqrt() * (PI * (a + 1) as f64 * (b + 1) as f64 / m).sin();
                let got = d.s_entry(a, b).embed_complex(53).map_err(|e| e.to_string())?;
                worst = worst.max((got - Complex64::new(want, 0.0)).norm());
            }
        }
    }
    ensure(worst < 1e-10, || format!("max deviation {worst:e}"))?;
    Ok(format!("max deviation {worst:.1e} for k <= 8"))
}

fn criterion_3() -> Outcome {
    let cases: Vec<(&str, u32)> = (1..=6).map(|k| ("A1", k)).chain((1..=4).map(|k| ("A2", k))).collect();
    let mut triples = 0;
    for (name, k) in cases {
        let d = build(name, k);
        let v = verlinde_table(&d).map_err(|e| e.to_string())?;
        let o = kac_walton_table(&d).map_err(|e| e.to_string())?;
        if let Some((a, b, c)) = v.first_difference(&o) {
            return Err(format!("{name} k={k}: Verlinde and Kac-Walton differ at ({a},{b},{c})"));
        }
        ensure(v.is_unital(), || format!("{name} k={k}: vacuum is not the unit"))?;
        ensure(v.is_commutative(), || format!("{name} k={k}: not commutative"))?;
        ensure(v.is_associative(), || format!("{name} k={k}: not associative"))?;
        ensure(v.is_conjugation_covariant(d.conj()), || format!("{name} k={k}: not C-covariant"))?;
        triples += d.len().pow(3);
    }
    Ok(format!("{triples} triples agree exactly"))
}

fn criterion_4() -> Outcome {
    let mut elements = 0;
    for &(name, k) in MODULAR_MATRIX {
        let d = build(name, k);
        let ells = galois_group_elements(&d, false);
        let acts: Vec<_> = ells
            .par_iter()
            .map(|&l| build_action_table(&d, l))
            .collect::<Result<_, _>>()
            .map_err(|e| format!("{name} k={k}: {e}"))?;
        let id = &acts[0];
        ensure(id.ell == 1 && id.is_identity(), || format!("{name} k={k}: ell=1 not trivial"))?;
        let c = acts.last().expect("N-1 present");
        ensure(
            c.ell == d.order() as i64 - 1 && c.perm == d.conj() && c.signs.iter().all(|&s| s == 1),
            || format!("{name} k={k}: ell=N-1 is not charge conjugation"),
        )?;
        elements += acts.len();
    }
    Ok(format!("{elements} Galois elements over {} pairs", MODULAR_MATRIX.len()))
}

fn summarize(reports: &[RelationReport]) -> Result<(u64, u64), String> {
    let mut tested = 0;
    let mut skipped = 0;
    for r in reports {
        if !r.passed() {
            return Err(format!(
                "{} failed for {} k={} ell={}: {} failures, first {:?}",
                r.relation,
                r.params.algebra,
                r.params.level,
                r.params.ell,
                r.failure_count,
                r.failures.first()
            ));
        }
        tested += r.tested;
        skipped += r.skipped_boundary;
    }
    Ok((tested, skipped))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut reports = Vec::new();
    for &(name, k) in RELATION_MATRIX {
        let d = build(name, k);
        let v = Verifier::new(&d).map_err(|e| e.to_string())?;
        for ell in galois_group_elements(&d, false) {
            let run = || -> kpgalois::Result<Vec<RelationReport>> {
                Ok(vec![v.verify_5b(ell)?, v.verify_5c(ell, 2, 3)?, v.verify_5d_5e(ell, 3)?])
            };
            reports.extend(run().map_err(|e| format!("{name} k={k} ell={ell}: {e}"))?);
        }
    }
    let (tested, _) = summarize(&reports)?;
    let t = start.elapsed();
    ensure(t < Duration::from_secs(600), || format!("took {t:?}, limit 10 min"))?;
    Ok(format!("{tested} instances, zero failures"))
}

fn criterion_6() -> Outcome {
    let mut reports = Vec::new();
    for &(name, k) in LINEARIZED_MATRIX {
        let d = build(name, k);
        let v = Verifier::new(&d).map_err(|e| e.to_string())?;
        for ell in galois_group_elements(&d, false) {
            let run = || -> kpgalois::Result<Vec<RelationReport>> {
                Ok(vec![v.verify_6a(ell)?, v.verify_6b(ell)?])
            };
            reports.extend(run().map_err(|e| format!("{name} k={k} ell={ell}: {e}"))?);
        }
    }
    // Each tested linearized instance is also compared with the fusion
    // relation at the same weights; a verdict mismatch counts as a failure.
    let (tested, skipped) = summarize(&reports)?;
    Ok(format!("{tested} instances, zero failures, {skipped} boundary-skipped"))
}

/// Non-decreasing `t`-tuples over `0..n`.
fn multisets(n: usize, t: usize) -> Vec<Vec<usize>> {
    all_tuples(n, t)
        .into_iter()
        .filter(|v| v.windows(2).all(|w| w[0] <= w[1]))
        .collect()
}

fn criterion_7() -> Outcome {
    let mut checked = 0u64;
    for &(name, k) in RELATION_MATRIX {
        let d = build(name, k);
        let n = d.len();
        let tag = |s: String| format!("{name} k={k}: {s}");
        let fusion = verlinde_table(&d).map_err(|e| tag(e.to_string()))?;
        let v10 = verlinde_dimension(&d, 1, &[]).map_err(|e| tag(e.to_string()))?;
        ensure(v10 == n as u64, || tag(format!("V^(1,0) = {v10}, |P_+^k| = {n}")))?;
        for (l, m, nu) in all_tuples(n, 3).into_iter().map(|v| (v[0], v[1], v[2])) {
            let v = verlinde_dimension(&d, 0, &[l, m, d.conj()[nu]]).map_err(|e| tag(e.to_string()))?;
            ensure(v == fusion.get(l, m, nu), || tag(format!("V^(0,3) != N at ({l},{m},{nu})")))?;
        }
        let ells = galois_group_elements(&d, false);
        for h in 0..=2u32 {
            let g = genus_weights(&d, h).map_err(|e| tag(e.to_string()))?;
            // sigma applied entrywise to every factor of the Verlinde sum
            let conjugated: Vec<(Vec<CycNumber>, Vec<Vec<CycNumber>>)> = ells
                .par_iter()
                .map(|&ell| {
                    let gs = g.iter().map(|x| x.galois(ell).expect("unit")).collect();
                    let rs = (0..n)
                        .map(|a| (0..n).map(|b| d.ratio(a, b).galois(ell).expect("unit")).collect())
                        .collect();
                    (gs, rs)
                })
                .collect();
            for t in 0..=3 {
                let results: Vec<Result<u64, String>> = multisets(n, t)
                    .into_par_iter()
                    .map(|ls| {
                        let sum = |gw: &[CycNumber], r: &dyn Fn(usize, usize) -> CycNumber| {
                            (0..n).fold(CycNumber::zero(d.order()), |acc, mu| {
                                acc + ls.iter().fold(gw[mu].clone(), |x, &l| &x * &r(l, mu))
                            })
                        };
                        let exact = sum(&g, &|a, b| d.ratio(a, b).clone());
                        let v = as_dimension(&exact, &|| format!("V^({h},{t}){ls:?}"))
                            .map_err(|e| tag(e.to_string()))?;
                        for (ell, (gs, rs)) in ells.iter().zip(&conjugated) {
                            let moved = sum(gs, &|a, b| rs[a][b].clone());
                            if moved != exact {
                                return Err(tag(format!("V^({h},{t}){ls:?} moved by ell={ell}")));
                            }
                        }
                        Ok(v)
                    })
                    .collect();
                for r in results {
                    r?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} Verlinde dimensions integral and Galois-fixed"))
}

fn criterion_8() -> Outcome {
    let mut checked = 0u64;
    let cases: Vec<(&str, u32)> = (1..=4).map(|k| ("A1", k)).chain([("A2", 2)]).collect();
    for (name, k) in cases {
        let d = build(name, k);
        let n = d.len();
        let c = d.conj();
        let tag = |s: String| format!("{name} k={k}: {s}");
        let err = |e: kpgalois::Error| tag(e.to_string());
        for l in 0..n {
            for m in 0..n {
                let s = d.s_entry(l, m);
                ensure(&chain(&d, &[l, m]).map_err(err)?.exact == s, || tag(format!("C_({l},{m}) != S")))?;
                ensure(&keychain(&d, l, &[m]).map_err(err)?.exact == s, || tag(format!("S_({l};{m}) != S")))?;
            }
        }
        for t in 0..=3 {
            for ls in all_tuples(n, t) {
                let cl: Vec<usize> = ls.iter().map(|&l| c[l]).collect();
                let dv = parallel_unknots(&d, &ls).map_err(err)?.exact;
                ensure(keychain(&d, 0, &ls).map_err(err)?.exact == dv, || tag(format!("S_(0;{ls:?}) != D")))?;
                ensure(parallel_unknots(&d, &cl).map_err(err)?.exact == dv, || tag(format!("D{ls:?} not C-covariant")))?;
                for h in 0..=2 {
                    let a = verlinde_dimension(&d, h, &ls).map_err(err)?;
                    let b = verlinde_dimension(&d, h, &cl).map_err(err)?;
                    ensure(a == b, || tag(format!("V^({h},{t}){ls:?} not C-covariant")))?;
                }
                if t >= 1 {
                    let a = chain(&d, &ls).map_err(err)?.exact;
                    ensure(chain(&d, &cl).map_err(err)?.exact == a, || tag(format!("C{ls:?} not C-covariant")))?;
                }
                for l0 in 0..n {
                    let a = keychain(&d, l0, &ls).map_err(err)?.exact;
                    let b = keychain(&d, c[l0], &cl).map_err(err)?.exact;
                    ensure(a == b, || tag(format!("S_({l0};{ls:?}) not C-covariant")))?;
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} weight tuples"))
}

fn random_cyc(rng: &mut ChaCha8Rng) -> CycNumber {
    let n = [1u32, 3, 4, 5, 7, 8, 12, 20, 24][rng.gen_range(0..9)];
    let terms: Vec<(i64, i64)> = (0..rng.gen_range(0..6))
        .map(|_| (rng.gen_range(0..48), rng.gen_range(-9..=9)))
        .collect();
    let den = rng.gen_range(1..7);
    CycNumber::from_exponents(n, &terms).scale(&BigRational::new(BigInt::from(1), BigInt::from(den)))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    const CASES: usize = 1000;
    // units modulo 840 = lcm of the sampled orders
    let units: Vec<i64> = (1..840).filter(|l| num_integer::gcd(*l, 840) == 1).collect();
    for case in 0..CASES {
        let (a, b, c) = (random_cyc(&mut rng), random_cyc(&mut rng), random_cyc(&mut rng));
        let tag = |s: &str| format!("case {case}: {s}");
        ensure(&a + &b == &b + &a && &a * &b == &b * &a, || tag("commutativity"))?;
        ensure(&(&a * &b) * &c == &a * &(&b * &c), || tag("associativity"))?;
        ensure(&a * &(&b + &c) == &(&a * &b) + &(&a * &c), || tag("distributivity"))?;
        if !a.is_zero() {
            let inv = a.inverse().map_err(|e| e.to_string())?;
            ensure(&a * &inv == CycNumber::one(1), || tag("inverse"))?;
        }
        let close = |x: Complex64, y: Complex64| (x - y).norm() <= 1e-12 * (1.0 + x.norm().max(y.norm()));
        ensure(close((&a * &b).embed(), a.embed() * b.embed()), || tag("embedding of products"))?;
        ensure(close((&a + &b).embed(), a.embed() + b.embed()), || tag("embedding of sums"))?;
        let l1 = units[rng.gen_range(0..units.len())];
        let l2 = units[rng.gen_range(0..units.len())];
        let g = |x: &CycNumber, l: i64| x.galois(l).expect("unit");
        ensure(g(&g(&a, l2), l1) == g(&a, l1 * l2 % 840), || tag("group law"))?;
        ensure(g(&(&a * &b), l1) == &g(&a, l1) * &g(&b, l1), || tag("multiplicativity"))?;
    }
    for d in 1..=60u64 {
        let r = sqrt_integer(d);
        ensure(&r * &r == CycNumber::from_integer(1, d), || format!("sqrt({d})^2 != {d}"))?;
    }
    Ok(format!("{CASES} random cases, sqrt(d)^2 = d for d <= 60"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("exact modular data", criterion_1),
        ("A1 sine oracle", criterion_2),
        ("fusion cross-validation", criterion_3),
        ("Galois action on S", criterion_4),
        ("fusion, Verlinde and key-chain Galois relations", criterion_5),
        ("linearized relations", criterion_6),
        ("Verlinde dimensions", criterion_7),
        ("invariant identities and C-covariance", criterion_8),
        ("cyclotomic substrate", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail} [{secs:.2}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
