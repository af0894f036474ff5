//! The twelve acceptance criteria, each reported on one line.
//! The report goes straight to stderr so it shows up even when the test
//! harness captures output.

use std::io::Write;
use std::panic::{self, AssertUnwindSafe};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use prime_spin::analytic::{self, TableSequence};
use prime_spin::ideals::{self, IdealFactorization};
use prime_spin::involution::{self, QuadraticSetting};
use prime_spin::selmer::{self, CurveConfig};
use prime_spin::spin::{SpinEngine, SpinFilters};
use prime_spin::symbols::{self, Mu2Table};
use prime_spin::units::{self, DomainPosition};
use prime_spin::{Element, FieldContext, IntElement};

type Outcome = Result<String, String>;

fn shanks1() -> FieldContext {
    FieldContext::shanks_cubic(1).unwrap()
}

fn random_element(rng: &mut ChaCha8Rng, n: usize, b: i128) -> IntElement {
    Element::new((0..n).map(|_| rng.gen_range(-b..=b)).collect())
}

fn random_odd(rng: &mut ChaCha8Rng, k: &FieldContext, b: i128) -> IntElement {
    loop {
        let e = random_element(rng, k.degree, b);
        if !e.is_zero() && symbols::is_odd_element(k, &e) {
            return e;
        }
    }
}

fn check(cond: bool, msg: String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg)
    }
}

fn c1_vaughan() -> Outcome {
    let k = shanks1();
    let engine = SpinEngine::new(&k).map_err(|e| e.to_string())?;
    let spin_seq = analytic::SpinSequence::new(&engine, 1, SpinFilters::default());
    let mut identities = 0;
    for x in [400u64, 2000] {
        let all = ideals::enumerate_ideals(&k, x).unwrap();
        let mut tables = vec![analytic::tabulate(&spin_seq, &all).unwrap()];
        for seed in [1u64, 2, 3] {
            tables.push(TableSequence::random(&all, seed).values);
        }
        for table in &tables {
            for (y, z) in analytic::vaughan_splits(x) {
                let r = analytic::vaughan_verify_table(&all, table, x, y, z).unwrap();
                check(r.exact_identity_holds, format!("identity fails at x={x} y={y} z={z}"))?;
                identities += 1;
            }
        }
    }
    Ok(format!("{identities} exact identities (4 sequences, x in {{400, 2000}}, all splits)"))
}

fn c2_mu2() -> Outcome {
    let k = shanks1();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut table = Mu2Table::default();
    let mut ones = 0;
    let one = Element::<i128>::one(3);
    while table.samples < 1000 {
        // every fourth pair lies in the (1, 1) cell; others are perturbed by
        // multiples of 8 to revisit earlier cells
        let (a, b) = if table.samples % 4 == 0 {
            let s = random_element(&mut rng, 3, 3).scale(&8);
            let t = random_element(&mut rng, 3, 3).scale(&8);
            (one.add(&s), one.add(&t))
        } else {
            let a = random_odd(&mut rng, &k, 12);
            let b = random_odd(&mut rng, &k, 12);
            if table.samples % 2 == 1 {
                (a, b)
            } else {
                let (a0, b0) = table.cells.keys().nth(rng.gen_range(0..table.cells.len().max(1))).cloned().unwrap_or((a.coords, b.coords));
                let s = random_element(&mut rng, 3, 2).scale(&8);
                let t = random_element(&mut rng, 3, 2).scale(&8);
                (Element::new(a0).add(&s), Element::new(b0).add(&t))
            }
        };
        if a.is_zero() || b.is_zero() || !symbols::is_odd_element(&k, &a) || !symbols::is_odd_element(&k, &b) {
            continue;
        }
        match table.insert(&k, &a, &b) {
            Ok(_) => {}
            Err(prime_spin::Error::NotCoprime) => continue,
            Err(e) => return Err(e.to_string()),
        }
        if a.reduce_mod(8).is_one() && b.reduce_mod(8).is_one() {
            let (_, mu2) = symbols::mu_and_mu2(&k, &a, &b).unwrap();
            check(mu2 == 1, format!("mu2 = -1 on (1,1) cell for {a} / {b}"))?;
            ones += 1;
        }
    }
    check(table.is_single_valued(), format!("{} conflicting samples", table.conflicts))?;
    let revisits = table.samples - table.cells.len();
    Ok(format!("{} samples, {} cells, {} repeat visits, {} pairs in the (1,1) cell, 0 conflicts", table.samples, table.cells.len(), revisits, ones))
}

fn c3_periodicity() -> Outcome {
    let k = shanks1();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let alphas: Vec<IntElement> = [[3i128, 1, 0], [2, 0, 0], [1, 1, 1], [4, 2, 0], [-5, 0, 3], [2, 2, 6], [7, -2, 1], [0, 2, 0], [1, 0, -4], [6, 0, 2]]
        .iter()
        .map(|c| Element::new(c.to_vec()))
        .collect();
    let even = alphas.iter().filter(|a| !symbols::is_odd_element(&k, a)).count();
    check(even >= 3, "need even upper entries".into())?;
    let mut pairs = 0;
    for a in &alphas {
        let modulus = a.scale(&8);
        let mut done = 0;
        while done < 200 {
            let b = random_odd(&mut rng, &k, 25);
            let t = random_element(&mut rng, 3, 3);
            let b2 = b.add(&k.mul(&modulus, &t));
            let s1 = symbols::completed_symbol(&k, a, &b).map_err(|e| e.to_string())?;
            let s2 = symbols::completed_symbol(&k, a, &b2).map_err(|e| e.to_string())?;
            check(s1 == s2, format!("|a/b| not periodic: a={a} b={b} b'={b2}"))?;
            done += 1;
        }
        pairs += done;
    }
    // bracket symbol modulo 2α for α with 1 + α odd
    let mut brackets = 0;
    let even_alphas: Vec<IntElement> = (0..10).map(|i| Element::new(vec![2 * (i + 1), 2 * (i % 3), 2 * (i % 2)])).collect();
    for a in &even_alphas {
        check(symbols::is_odd_element(&k, &a.add(&Element::one(3))), format!("1 + {a} not odd"))?;
        let modulus = a.scale(&2);
        let mut done = 0;
        while done < 200 {
            let b = random_odd(&mut rng, &k, 25);
            let t = random_element(&mut rng, 3, 3);
            let b2 = b.add(&k.mul(&modulus, &t));
            let (s1, s2) = match (symbols::bracket_symbol(&k, a, &b), symbols::bracket_symbol(&k, a, &b2)) {
                (Ok(x), Ok(y)) => (x, y),
                (Err(prime_spin::Error::NotCoprime), Err(prime_spin::Error::NotCoprime)) => continue,
                (x, y) => return Err(format!("bracket mismatch in coprimality: {x:?} {y:?}")),
            };
            check(s1 == s2, format!("[a/b] not periodic: a={a} b={b} b'={b2}"))?;
            done += 1;
        }
        brackets += done;
    }
    Ok(format!("{pairs} completed-symbol pairs over 10 alphas ({even} even), {brackets} bracket pairs over 10 even alphas"))
}

fn c4_spin_invariance() -> Outcome {
    let k = shanks1();
    let engine = SpinEngine::new(&k).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let primes: Vec<u64> = prime_spin::arith::primes_up_to(100_000)
        .into_iter()
        .filter(|p| p % 7 == 1 || p % 7 == 6)
        .collect();
    let mut tested = 0;
    for _ in 0..200 {
        let p = primes[rng.gen_range(0..primes.len())];
        let above = ideals::split_prime(&k, p).unwrap();
        let mut per_conjugate = Vec::new();
        for q in &above {
            let a = IdealFactorization::prime(q);
            let g = engine.canonical_generator(&a).unwrap();
            let s = engine.spin_with_generator(&g, &a, 1).unwrap();
            // raw short-vector generator made totally positive, no domain reduction
            let raw = ideals::find_generator(&k, &a).unwrap();
            let raw_tp = engine.units.make_totally_positive(&k, &raw).unwrap();
            check(engine.spin_with_generator(&raw_tp, &a, 1).unwrap() == s, format!("raw generator changes spin at p={p}"))?;
            for _ in 0..5 {
                let exps = [rng.gen_range(-3..=3), rng.gen_range(-3..=3)];
                let u = engine.units.unit_from_exponents(&k, &exps);
                let g2 = k.mul(&g, &k.mul(&u, &u));
                check(engine.spin_with_generator(&g2, &a, 1).unwrap() == s, format!("rechoice changes spin at p={p}"))?;
            }
            per_conjugate.push(s);
        }
        check(per_conjugate.iter().all(|&s| s == per_conjugate[0]), format!("conjugates disagree at p={p}: {per_conjugate:?}"))?;
        check(per_conjugate[0] != 0, format!("zero spin at unramified p={p}"))?;
        tested += 1;
    }
    Ok(format!("{tested} split primes x 3 conjugates x (canonical, raw, 5 rechoices)"))
}

fn c5_conjugation() -> Outcome {
    let k = shanks1();
    let engine = SpinEngine::new(&k).unwrap();
    let stream = engine.spin_prime_stream(100_000, &SpinFilters { degree_one_only: true, ..Default::default() }).unwrap();
    let mut split = 0;
    let mut one_mod4 = 0;
    for r in &stream.records {
        if !r.prime.is_split() {
            continue;
        }
        let c = engine.conjugation_relation_check(&r.prime).map_err(|e| e.to_string())?;
        check(c.holds, format!("relation fails at {:?}: {c:?}", r.prime))?;
        check(c.spin_first == r.spin(1) && c.spin_last == r.spin(2), "stream and check disagree".into())?;
        split += 1;
        if c.one_mod4 {
            one_mod4 += 1;
        }
    }
    check(stream.generator_failures.is_empty(), "generator failures".into())?;
    Ok(format!("{split} split primes <= 1e5 ({one_mod4} with generator = 1 mod 4), 0 exceptions"))
}

fn c6_domain() -> Outcome {
    let k = shanks1();
    let ug = units::UnitGroupData::new(&k).unwrap();
    let dom = units::build_domain(&k, &ug).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut done = 0;
    let mut inside = 0;
    let mut disjoint_checks = 0;
    while done < 500 {
        let e = random_element(&mut rng, 3, 40);
        if e.is_zero() {
            continue;
        }
        let e = ug.make_totally_positive(&k, &e).unwrap();
        let nm = k.norm(&e);
        if nm > 1_000_000 {
            continue;
        }
        let exps = [2 * rng.gen_range(-2..=2), 2 * rng.gen_range(-2..=2)];
        let e = k.mul(&e, &ug.unit_from_exponents(&k, &exps));
        let r = dom.reduce(&k, &e).unwrap();
        let pos = dom.contains(&k, &r).unwrap();
        check(pos != DomainPosition::Outside, format!("reduction left the closure for {e}"))?;
        let (best, minimisers) = units::orbit_minimum_bruteforce(&k, &ug, &e, 6);
        check(best == k.trace(&r), format!("trace {} vs exhaustive {best} for {e}", k.trace(&r)))?;
        check(minimisers.contains(&r), format!("reduced element not among orbit minimisers for {e}"))?;
        if pos == DomainPosition::Inside {
            inside += 1;
            check(minimisers.len() == 1, format!("interior point with {} minimisers", minimisers.len()))?;
            for s in &dom.small_units {
                let ur = k.mul(&s.element, &r);
                check(dom.contains(&k, &ur).unwrap() == DomainPosition::Outside, format!("u D meets D at {r}"))?;
                disjoint_checks += 1;
            }
        }
        done += 1;
    }
    Ok(format!("{done} elements, {inside} strictly inside and unique, {disjoint_checks} u*D disjointness checks"))
}

fn c7_residual() -> Outcome {
    let k = shanks1();
    let ug = units::UnitGroupData::new(&k).unwrap();
    let dom = units::build_domain(&k, &ug).unwrap();
    let x = 100_000u64;
    let moduli: Vec<IdealFactorization> = ideals::enumerate_ideals(&k, 50).unwrap().into_iter().filter(|m| !m.is_unit()).collect();
    let c = units::census(&k, &dom, x, &moduli).unwrap();
    let scale = (x as f64).powf(2.0 / 3.0);
    let worst = (0..moduli.len()).map(|i| c.max_residual(i)).fold(0.0, f64::max);
    let constant = worst / scale;
    check(constant <= 10.0, format!("c = {constant:.4}"))?;
    Ok(format!("N(x) = {}, {} moduli, worst residual {worst:.1}, c = {constant:.4}", c.total, moduli.len()))
}

fn c8_equidistribution() -> Outcome {
    let k = shanks1();
    let engine = SpinEngine::new(&k).unwrap();
    let mut parts = Vec::new();
    for (label, f) in [("all", SpinFilters::default()), ("gen = 1 mod 8", SpinFilters { mod8: Some(vec![1, 0, 0]), ..Default::default() })] {
        let s = engine.spin_prime_stream(1_000_000, &f).unwrap();
        check(s.generator_failures.is_empty(), format!("{} generator failures", s.generator_failures.len()))?;
        let split: Vec<_> = s.records.iter().filter(|r| r.prime.is_split()).collect();
        let plus = split.iter().filter(|r| r.spin(1) == 1).count();
        let frac = plus as f64 / split.len() as f64;
        check((0.45..=0.55).contains(&frac), format!("{label}: fraction {frac:.4}"))?;
        parts.push(format!("{label}: {plus}/{} = {frac:.4}", split.len()));
    }
    Ok(parts.join("; "))
}

fn c9_involution() -> Outcome {
    let mut parts = Vec::new();
    for d in [5i64, 13, 17] {
        let s = QuadraticSetting::new(d).unwrap();
        let scan = s.scan(100_000).unwrap();
        let bad = scan.records.iter().filter(|r| !r.agree() || !r.parity_ok).count();
        check(bad == 0, format!("d={d}: {bad} exceptions"))?;
        let cs = involution::complete_trace_sum(d);
        check(cs == 0, format!("d={d}: complete sum {cs}"))?;
        parts.push(format!("d={d}: {} primes agree, complete sum 0", scan.records.len()));
    }
    Ok(parts.join("; "))
}

fn c10_burgess() -> Outcome {
    let k = shanks1();
    let a = analytic::burgess_scan(&k, 10_000).unwrap();
    let b = analytic::burgess_scan(&k, 10_000).unwrap();
    check(a.max_ratio.is_finite(), "ratio not finite".into())?;
    check(a.max_ratio == b.max_ratio && a.rows == b.rows, "reruns differ".into())?;
    Ok(format!("{} characters, max ratio {:.6} at q = {} (identical on rerun)", a.rows.len(), a.max_ratio, a.argmax_q))
}

fn c11_selmer() -> Outcome {
    let k = shanks1();
    let engine = SpinEngine::new(&k).unwrap();
    let cfg = CurveConfig::curve_784(&k).unwrap();
    check(cfg.link_holds(&k), "field link".into())?;
    let cands = selmer::scan_twist_candidates(&cfg, &engine, 1_000_000).unwrap();
    let mut small = 0;
    for c in cands.iter().filter(|c| c.qualified() && c.p <= 100_000) {
        check(c.prime_independent(), format!("spin depends on the prime above p={}", c.p))?;
        check((c.predicted_dim == Some(3)) == (c.spin == Some(1)), format!("prediction rule at p={}", c.p))?;
        small += 1;
    }
    let q: Vec<_> = cands.iter().filter(|c| c.qualified()).collect();
    check(q.iter().all(|c| c.prime_independent()), "prime dependence above 1e5".into())?;
    let dim3 = q.iter().filter(|c| c.predicted_dim == Some(3)).count();
    let frac = dim3 as f64 / q.len() as f64;
    check((0.45..=0.55).contains(&frac), format!("dim-3 fraction {frac:.4}"))?;
    Ok(format!("{small} candidates <= 1e5 consistent; p <= 1e6: {dim3}/{} = {frac:.4} with dim 3", q.len()))
}

fn c12_units() -> Outcome {
    let mut count = 0;
    for m in -20..=20 {
        let k = FieldContext::shanks_cubic(m).map_err(|e| format!("shanks {m}: {e}"))?;
        check(units::verify_unit_plus_square(&k).map_err(|e| e.to_string())?.passed, format!("shanks {m}"))?;
        count += 1;
    }
    for m in -10..=10 {
        let k = FieldContext::lehmer_quintic(m).map_err(|e| format!("lehmer {m}: {e}"))?;
        check(units::verify_unit_plus_square(&k).map_err(|e| e.to_string())?.passed, format!("lehmer {m}"))?;
        count += 1;
    }
    Ok(format!("{count} fields (shanks |m| <= 20, lehmer |m| <= 10)"))
}

fn report(line: &str) {
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "{line}");
}

#[test]
fn acceptance_criteria() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("1 exact Vaughan identity", c1_vaughan),
        ("2 mu2 well-defined mod 8", c2_mu2),
        ("3 symbol periodicity", c3_periodicity),
        ("4 spin generator and Galois invariance", c4_spin_invariance),
        ("5 conjugation relation", c5_conjugation),
        ("6 fundamental domain partition", c6_domain),
        ("7 domain count residual", c7_residual),
        ("8 spin equidistribution", c8_equidistribution),
        ("9 involution dual pipeline", c9_involution),
        ("10 Burgess scan", c10_burgess),
        ("11 Selmer predictor", c11_selmer),
        ("12 unit hypothesis", c12_units),
    ];
    report("");
    let mut failures = Vec::new();
    for (name, f) in criteria {
        let t = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        match outcome {
            Ok(detail) => report(&format!("PASS  criterion {name}: {detail} [{:.1?}]", t.elapsed())),
            Err(detail) => {
                report(&format!("FAIL  criterion {name}: {detail} [{:.1?}]", t.elapsed()));
                failures.push(name);
            }
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
