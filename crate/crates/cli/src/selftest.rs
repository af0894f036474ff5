use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use prime_spin::analytic::{self, SpinSequence, TableSequence};
use prime_spin::ideals::{self, IdealFactorization};
use prime_spin::involution::{self, QuadraticSetting};
use prime_spin::selmer::{self, CurveConfig};
use prime_spin::spin::{SpinEngine, SpinFilters};
use prime_spin::symbols::{self, Mu2Table};
use prime_spin::units::{self, DomainPosition};
use prime_spin::{Element, Error, FieldContext, IntElement};

use crate::config::RunConfig;
use crate::output::Table;
use crate::CliError;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lib<T>(r: prime_spin::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
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

/// Small versions of the property suites on the simplest cubic with `m = 1`,
/// reported one row per check. Randomized checks draw from the configured seed.
pub fn run(cfg: &RunConfig) -> Result<String, CliError> {
    let seed = cfg.seed;
    let k = FieldContext::shanks_cubic(1)?;
    let engine = SpinEngine::new(&k)?;
    let checks: Vec<(&str, Box<dyn Fn() -> Check + '_>)> = vec![
        ("vaughan_identity", Box::new(|| vaughan(&engine, seed))),
        ("mu2_single_valued", Box::new(|| mu2(&k, seed))),
        ("completed_symbol_periodic", Box::new(|| periodicity(&k, seed))),
        ("spin_generator_invariance", Box::new(|| spin_invariance(&engine, seed))),
        ("conjugation_relation", Box::new(|| conjugation(&engine))),
        ("domain_reduction", Box::new(|| domain(&engine, seed))),
        ("window_scan", Box::new(|| windows(&k, seed))),
        ("involution_pipelines", Box::new(involution_pipelines)),
        ("selmer_rule", Box::new(|| selmer_rule(&engine))),
        ("unit_signs", Box::new(unit_signs)),
    ];
    let mut t = Table::new(&["check", "passed", "detail"]);
    let mut failed = 0;
    for (name, f) in &checks {
        let start = Instant::now();
        let (ok, detail) = match f() {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        eprintln!("{} {name}: {detail} [{:.1}s]", if ok { "PASS" } else { "FAIL" }, start.elapsed().as_secs_f64());
        t.push(vec![name.to_string(), ok.to_string(), detail.replace(',', ";")]);
    }
    t.summary = Some(json!({ "seed": seed, "checks": checks.len(), "failed": failed }));
    let out = t.render(cfg.format);
    if failed > 0 {
        print!("{out}");
        return Err(CliError::SelftestFailed(failed));
    }
    Ok(out)
}

fn vaughan(engine: &SpinEngine, seed: u64) -> Check {
    let x = 400;
    let all = lib(ideals::enumerate_ideals(&engine.ctx, x))?;
    let spin = lib(analytic::tabulate(&SpinSequence::new(engine, 1, SpinFilters::default()), &all))?;
    let random = TableSequence::random(&all, seed).values;
    let mut n = 0;
    for table in [&spin, &random] {
        for (y, z) in analytic::vaughan_splits(x) {
            let r = lib(analytic::vaughan_verify_table(&all, table, x, y, z))?;
            ensure(r.exact_identity_holds, || format!("fails at y={y} z={z}"))?;
            n += 1;
        }
    }
    Ok(format!("{n} exact identities at x = {x}"))
}

fn mu2(k: &FieldContext, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = Mu2Table::default();
    while table.samples < 200 {
        let (a, b) = if table.samples % 2 == 1 && !table.cells.is_empty() {
            // revisit an earlier cell through representatives shifted by 8
            let (a0, b0) = table.cells.keys().nth(rng.gen_range(0..table.cells.len())).cloned().expect("nonempty");
            let s = random_element(&mut rng, 3, 2).scale(&8);
            let t = random_element(&mut rng, 3, 2).scale(&8);
            (Element::new(a0).add(&s), Element::new(b0).add(&t))
        } else {
            (random_odd(&mut rng, k, 10), random_odd(&mut rng, k, 10))
        };
        if a.is_zero() || b.is_zero() {
            continue;
        }
        match table.insert(k, &a, &b) {
            Ok(_) | Err(Error::NotCoprime) => {}
            Err(e) => return Err(e.to_string()),
        }
    }
    ensure(table.is_single_valued(), || format!("{} conflicts", table.conflicts))?;
    ensure(table.samples > table.cells.len() + 50, || "too few repeat visits".into())?;
    Ok(format!("{} pairs in {} cells", table.samples, table.cells.len()))
}

fn periodicity(k: &FieldContext, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let mut n = 0;
    while n < 200 {
        let a = random_element(&mut rng, 3, 6);
        if a.is_zero() {
            continue;
        }
        let b = random_odd(&mut rng, k, 20);
        let b2 = b.add(&k.mul(&a.scale(&8), &random_element(&mut rng, 3, 2)));
        match (symbols::completed_symbol(k, &a, &b), symbols::completed_symbol(k, &a, &b2)) {
            (Ok(s), Ok(t)) => ensure(s == t, || format!("a={a} b={b}"))?,
            (Err(_), Err(_)) => continue,
            (x, y) => return Err(format!("a={a}: {x:?} vs {y:?}")),
        }
        n += 1;
    }
    Ok(format!("{n} pairs"))
}

fn spin_invariance(engine: &SpinEngine, seed: u64) -> Check {
    let k = &engine.ctx;
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2));
    let primes: Vec<_> = lib(ideals::enumerate_prime_ideals(k, 10_000))?.into_iter().filter(|q| q.is_split() && q.is_odd()).collect();
    for _ in 0..30 {
        let q = &primes[rng.gen_range(0..primes.len())];
        let a = IdealFactorization::prime(q);
        let g = lib(engine.canonical_generator(&a))?;
        let s = lib(engine.spin_with_generator(&g, &a, 1))?;
        for _ in 0..3 {
            let u = engine.units.unit_from_exponents(k, &[rng.gen_range(-3..=3), rng.gen_range(-3..=3)]);
            let g2 = k.mul(&g, &k.mul(&u, &u));
            ensure(lib(engine.spin_with_generator(&g2, &a, 1))? == s, || format!("rechoice at p={}", q.p))?;
        }
        for j in 1..3 {
            let c = lib(ideals::conjugate_prime(k, q, j))?;
            ensure(lib(engine.spin(&IdealFactorization::prime(&c), 1))? == s, || format!("conjugate at p={}", q.p))?;
        }
    }
    Ok("30 split primes below 1e4".into())
}

fn conjugation(engine: &SpinEngine) -> Check {
    let s = lib(engine.spin_prime_stream(10_000, &SpinFilters { degree_one_only: true, ..Default::default() }))?;
    let mut n = 0;
    for r in s.records.iter().filter(|r| r.prime.is_split()) {
        let c = lib(engine.conjugation_relation_check(&r.prime))?;
        ensure(c.holds, || format!("fails at {}:{}", r.prime.p, r.prime.position))?;
        n += 1;
    }
    Ok(format!("{n} split primes below 1e4"))
}

fn domain(engine: &SpinEngine, seed: u64) -> Check {
    let k = &engine.ctx;
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(3));
    let mut n = 0;
    while n < 100 {
        let e = random_element(&mut rng, 3, 20);
        if e.is_zero() {
            continue;
        }
        let e = lib(engine.units.make_totally_positive(k, &e))?;
        let r = lib(engine.domain.reduce(k, &e))?;
        ensure(lib(engine.domain.contains(k, &r))? != DomainPosition::Outside, || format!("{e} left the closure"))?;
        let (best, _) = units::orbit_minimum_bruteforce(k, &engine.units, &e, 5);
        ensure(best == k.trace(&r), || format!("trace mismatch for {e}"))?;
        n += 1;
    }
    Ok(format!("{n} elements"))
}

fn windows(k: &FieldContext, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(4));
    let primes: Vec<_> = lib(ideals::enumerate_prime_ideals(k, 2000))?.into_iter().filter(|q| q.is_split() && q.is_odd()).collect();
    for _ in 0..100 {
        let q = &primes[rng.gen_range(0..primes.len())];
        let chi = lib(symbols::dirichlet_char(&IdealFactorization::prime(q)))?;
        let n = rng.gen_range(1..100u64);
        let lo = rng.gen_range(0..3000u64);
        let hi = lo + rng.gen_range(1..30u64);
        let got = lib(analytic::char_sum_scan(&chi, n, lo, hi, None))?;
        let direct = (lo..hi).map(|m| analytic::char_sum_direct(&chi, m, n).abs()).max().unwrap_or(0);
        ensure(got.max_abs == direct, || format!("q={} window {n} at {lo}", q.p))?;
    }
    Ok("100 windows".into())
}

fn involution_pipelines() -> Check {
    let mut n = 0;
    for d in [5, 13, 17] {
        let s = lib(QuadraticSetting::new(d))?;
        let scan = lib(s.scan(10_000))?;
        ensure(scan.records.iter().all(|r| r.agree() && r.parity_ok), || format!("disagreement for d={d}"))?;
        ensure(involution::complete_trace_sum(d) == 0, || format!("complete sum for d={d}"))?;
        n += scan.records.len();
    }
    Ok(format!("{n} primes over d = 5 13 17"))
}

fn selmer_rule(engine: &SpinEngine) -> Check {
    let cfg = lib(CurveConfig::curve_784(&engine.ctx))?;
    let cands = lib(selmer::scan_twist_candidates(&cfg, engine, 20_000))?;
    let q: Vec<_> = cands.iter().filter(|c| c.qualified()).collect();
    for c in &q {
        ensure(c.prime_independent(), || format!("prime dependence at p={}", c.p))?;
        ensure((c.predicted_dim == Some(cfg.base_dim + 2)) == (c.spin == Some(1)), || format!("rule at p={}", c.p))?;
    }
    Ok(format!("{} qualified twists below 2e4", q.len()))
}

fn unit_signs() -> Check {
    for m in -5..=5 {
        let k = lib(FieldContext::shanks_cubic(m))?;
        ensure(lib(units::verify_unit_plus_square(&k))?.passed, || format!("shanks m={m}"))?;
    }
    Ok("shanks m in -5..5".into())
}
