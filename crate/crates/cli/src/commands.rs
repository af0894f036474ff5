use serde_json::json;

use prime_spin::analytic::{self, SpinSequence, TableSequence};
use prime_spin::ideals::{self, IdealFactorization, PrimeIdealData};
use prime_spin::involution::QuadraticSetting;
use prime_spin::selmer::{self, CurveConfig};
use prime_spin::spin::{SpinEngine, SpinFilters};
use prime_spin::{symbols, units, Element, Error, FieldContext, IntElement};

use crate::config::{parse_coords, parse_u64, Command, RunConfig};
use crate::output::{coords, float, json_doc, Table};
use crate::{selftest, CliError};

type Out = Result<String, CliError>;

pub fn run(cmd: &Command, cfg: &RunConfig) -> Out {
    match cmd {
        Command::FieldInfo => field_info(cfg),
        Command::DomainInfo => domain_info(cfg),
        Command::DomainCount => domain_count(cfg),
        Command::Primes => primes(cfg),
        Command::Symbol => symbol(cfg),
        Command::Spins => spins(cfg),
        Command::SpinSum => spin_sum(cfg),
        Command::VaughanVerify => vaughan_verify(cfg),
        Command::CharScan => char_scan(cfg),
        Command::QuadSpins => quad_spins(cfg),
        Command::SelmerScan => selmer_scan(cfg),
        Command::Selftest => selftest::run(cfg),
    }
}

fn field(cfg: &RunConfig) -> Result<FieldContext, CliError> {
    Ok(FieldContext::new(cfg.field)?)
}

/// Experiments refuse fields whose power basis is not known to be maximal.
fn experiment_field(cfg: &RunConfig) -> Result<FieldContext, CliError> {
    let ctx = field(cfg)?;
    if !ctx.maximal_order_verified {
        return Err(Error::HypothesisViolated(format!("power basis of {} not verified maximal", cfg.field)).into());
    }
    Ok(ctx)
}

fn prime_label(q: &PrimeIdealData) -> String {
    format!("{}:{}", q.p, q.position)
}

fn ideal_label(a: &IdealFactorization) -> String {
    if a.is_unit() {
        return "1".into();
    }
    a.factors
        .iter()
        .map(|(q, e)| if *e == 1 { prime_label(q) } else { format!("{}^{e}", prime_label(q)) })
        .collect::<Vec<_>>()
        .join("*")
}

fn field_info(cfg: &RunConfig) -> Out {
    let ctx = field(cfg)?;
    let gens = &ctx.unit_generators;
    let signs = gens.iter().map(|g| ctx.sign_vector(g)).collect::<prime_spin::Result<Vec<_>>>()?;
    let v = json!({
        "family": cfg.field.to_string(),
        "degree": ctx.degree,
        "polynomial": ctx.defining_poly,
        "polynomial_discriminant": ctx.poly_disc.to_string(),
        "field_discriminant": ctx.disc_field.as_ref().map(|d| d.to_string()),
        "maximal_order_verified": ctx.maximal_order_verified,
        "unit_generators": gens.iter().map(|g| g.coords.iter().map(|c| c.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "unit_signs": signs,
    });
    Ok(json_doc(&v))
}

fn domain_info(cfg: &RunConfig) -> Out {
    let ctx = experiment_field(cfg)?;
    let ug = units::UnitGroupData::new(&ctx)?;
    let dom = units::build_domain(&ctx, &ug)?;
    let c = dom.c.to_string();
    let c_f64 = num_ratio_f64(&c);
    let v = json!({
        "family": cfg.field.to_string(),
        "c": c,
        "c_approx": c_f64,
        "small_units": dom.small_units.len(),
        "contracting_unit": dom.contracting_unit.coords.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "contracting_exponents": dom.contracting_exponents,
        "size_constants": [dom.size_constants.0, dom.size_constants.1],
    });
    Ok(json_doc(&v))
}

fn num_ratio_f64(s: &str) -> f64 {
    match s.split_once('/') {
        Some((a, b)) => a.parse::<f64>().unwrap_or(f64::NAN) / b.parse::<f64>().unwrap_or(f64::NAN),
        None => s.parse().unwrap_or(f64::NAN),
    }
}

fn domain_count(cfg: &RunConfig) -> Out {
    let ctx = experiment_field(cfg)?;
    let ug = units::UnitGroupData::new(&ctx)?;
    let dom = units::build_domain(&ctx, &ug)?;
    let x = cfg.max_norm.unwrap_or(10_000);
    let moduli: Vec<IdealFactorization> =
        ideals::enumerate_ideals(&ctx, cfg.mod_norm)?.into_iter().filter(|m| !m.is_unit()).collect();
    let census = units::census(&ctx, &dom, x, &moduli)?;
    let mut t = Table::new(&["X", "ideal_norm", "class", "count", "expected", "residual"]);
    let mut worst: f64 = 0.0;
    for (i, m) in moduli.iter().enumerate() {
        let expected = census.total as f64 / m.norm as f64;
        for nu in census.residues(i) {
            let count = census.count(i, &nu);
            let residual = count as f64 - expected;
            worst = worst.max(residual.abs());
            t.push(vec![
                x.to_string(),
                m.norm.to_string(),
                format!("{}/{}", ideal_label(m), coords(&nu)),
                count.to_string(),
                float(expected),
                float(residual),
            ]);
        }
    }
    let scale = (x as f64).powf(2.0 / 3.0);
    t.summary = Some(json!({ "X": x, "total": census.total, "moduli": moduli.len(), "max_residual": worst, "residual_constant": worst / scale }));
    Ok(t.render(cfg.format))
}

fn primes(cfg: &RunConfig) -> Out {
    let ctx = field(cfg)?;
    let x = cfg.max_norm.unwrap_or(1000);
    let mut t = Table::new(&["p", "f", "e", "r", "norm"]);
    for q in ideals::enumerate_prime_ideals(&ctx, x)? {
        if cfg.degree_one_only && q.degree != 1 {
            continue;
        }
        t.push(vec![q.p.to_string(), q.degree.to_string(), q.ramification.to_string(), q.position.to_string(), q.norm().to_string()]);
    }
    Ok(t.render(cfg.format))
}

fn element(ctx: &FieldContext, key: &str, s: &str) -> Result<IntElement, CliError> {
    let c = parse_coords(key, s)?;
    if c.len() != ctx.degree {
        return Err(CliError::Usage(format!("--{key}: expected {} coordinates", ctx.degree)));
    }
    Ok(Element::new(c))
}

/// `p:r` factors joined by `*`, each optionally raised `^e`.
fn ideal_spec(ctx: &FieldContext, s: &str) -> Result<IdealFactorization, CliError> {
    let mut a = IdealFactorization::unit();
    for part in s.split('*') {
        let (base, e) = match part.split_once('^') {
            Some((b, e)) => (b, parse_u64("lower", e)? as u32),
            None => (part, 1),
        };
        let (p, r) = base.split_once(':').ok_or_else(|| CliError::Usage(format!("--lower: `{part}` is not p:r")))?;
        let p = parse_u64("lower", p)?;
        let r = parse_u64("lower", r)? as usize;
        let above = ideals::split_prime(ctx, p)?;
        let q = above.get(r).ok_or_else(|| CliError::Usage(format!("--lower: {p} has {} primes above it", above.len())))?;
        a = a.mul(&IdealFactorization::prime_power(q, e));
    }
    Ok(a)
}

fn symbol(cfg: &RunConfig) -> Out {
    let ctx = field(cfg)?;
    let upper = cfg.upper.as_deref().ok_or_else(|| CliError::Usage("symbol needs --upper".into()))?;
    let lower = cfg.lower.as_deref().ok_or_else(|| CliError::Usage("symbol needs --lower".into()))?;
    let a = element(&ctx, "upper", upper)?;
    let v = if lower.contains(':') {
        symbols::residue_symbol(&ctx, &a, &ideal_spec(&ctx, lower)?)?
    } else {
        symbols::element_symbol(&ctx, &a, &element(&ctx, "lower", lower)?)?
    };
    Ok(match cfg.format {
        crate::config::Format::Csv => format!("{v}\n"),
        crate::config::Format::Json => json_doc(&json!({ "upper": upper, "lower": lower, "symbol": v })),
    })
}

fn filters(cfg: &RunConfig) -> SpinFilters {
    SpinFilters { degree_one_only: cfg.degree_one_only, mod8: cfg.mod8.clone(), mod_m: cfg.mod_m.clone() }
}

fn engine(cfg: &RunConfig) -> Result<SpinEngine, CliError> {
    let e = SpinEngine::new(&field(cfg)?)?;
    let ctx = experiment_field(cfg)?;
    for c in cfg.mod8.iter().chain(cfg.mod_m.as_ref().map(|(_, c)| c)) {
        if c.len() != ctx.degree {
            return Err(CliError::Usage(format!("congruence class needs {} coordinates", ctx.degree)));
        }
    }
    Ok(e)
}

fn check_k(k: usize, n: usize) -> Result<usize, CliError> {
    if k == 0 || k >= n {
        return Err(CliError::Usage(format!("--k must lie in 1..{}", n - 1)));
    }
    Ok(k)
}

fn spins(cfg: &RunConfig) -> Out {
    let e = engine(cfg)?;
    let n = e.n();
    let ks: Vec<usize> = match cfg.k {
        Some(k) => vec![check_k(k, n)?],
        None => (1..n).collect(),
    };
    let x = cfg.max_norm.unwrap_or(1000);
    let stream = e.spin_prime_stream(x, &filters(cfg))?;
    let mut header = vec!["p".to_string(), "r".into(), "norm".into(), "gen_coords".into()];
    header.extend(ks.iter().map(|k| format!("spin_k{k}")));
    let mut t = Table { header, rows: Vec::new(), summary: None };
    for r in &stream.records {
        let mut row = vec![r.prime.p.to_string(), r.prime.position.to_string(), r.prime.norm().to_string(), coords(&r.generator.coords)];
        row.extend(ks.iter().map(|&k| r.spin(k).to_string()));
        t.push(row);
    }
    t.summary = Some(json!({
        "records": stream.records.len(),
        "filtered_out": stream.filtered_out,
        "generator_failures": stream.generator_failures.iter().map(prime_label).collect::<Vec<_>>(),
    }));
    Ok(t.render(cfg.format))
}

fn spin_sum(cfg: &RunConfig) -> Out {
    let e = engine(cfg)?;
    let k = check_k(cfg.k.unwrap_or(1), e.n())?;
    let x = cfg.max_norm.unwrap_or(100_000);
    let s = analytic::spin_sum(&e, x, k, &filters(cfg))?;
    let mean = if s.prime_count == 0 { String::new() } else { float(s.sum as f64 / s.prime_count as f64) };
    // observed exponent θ with |sum| = x^θ
    let exponent = (s.sum != 0 && x >= 2).then(|| (s.sum.abs() as f64).ln() / (x as f64).ln());
    let mut t = Table::new(&["x", "k", "prime_count", "sum", "mean", "exponent", "weighted"]);
    t.push(vec![x.to_string(), k.to_string(), s.prime_count.to_string(), s.sum.to_string(), mean, exponent.map(float).unwrap_or_default(), float(s.weighted.to_f64())]);
    t.summary = Some(json!({ "generator_failures": s.generator_failures, "observed_exponent": exponent }));
    Ok(t.render(cfg.format))
}

fn vaughan_verify(cfg: &RunConfig) -> Out {
    let e = engine(cfg)?;
    let k = check_k(cfg.k.unwrap_or(1), e.n())?;
    let x = cfg.max_norm.unwrap_or(400);
    if x > analytic::IDEAL_BUDGET {
        return Err(Error::CostGuard { what: "ideal enumeration bound".into(), size: x, budget: analytic::IDEAL_BUDGET }.into());
    }
    let all = ideals::enumerate_ideals(&e.ctx, x)?;
    let spin_seq = SpinSequence::new(&e, k, filters(cfg));
    let tables = [
        (format!("spin_k{k}"), analytic::tabulate(&spin_seq, &all)?),
        (format!("random_{}", cfg.seed), TableSequence::random(&all, cfg.seed).values),
    ];
    let mut t = Table::new(&["x", "y", "z", "sequence", "identity_holds", "s_x", "s_z", "s1", "s2", "s3"]);
    let mut all_hold = true;
    for (name, table) in &tables {
        for (y, z) in analytic::vaughan_splits(x) {
            let r = analytic::vaughan_verify_table(&all, table, x, y, z)?;
            all_hold &= r.exact_identity_holds;
            t.push(vec![
                x.to_string(),
                y.to_string(),
                z.to_string(),
                name.clone(),
                r.exact_identity_holds.to_string(),
                float(r.s_x.to_f64()),
                float(r.s_z.to_f64()),
                float(r.s1.to_f64()),
                float(r.s2.to_f64()),
                float(r.s3.to_f64()),
            ]);
        }
    }
    t.summary = Some(json!({ "all_identities_hold": all_hold, "splits": t.rows.len() }));
    Ok(t.render(cfg.format))
}

fn char_scan(cfg: &RunConfig) -> Out {
    let ctx = experiment_field(cfg)?;
    let q_max = cfg.max_norm.unwrap_or(1000);
    let r = analytic::burgess_scan(&ctx, q_max)?;
    let mut t = Table::new(&["q", "odd_support", "window", "max_abs", "argmax", "ratio"]);
    for row in &r.rows {
        let support = row.odd_support.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(";");
        t.push(vec![row.q.to_string(), support, row.window.to_string(), row.max_abs.to_string(), row.argmax.to_string(), float(row.ratio)]);
    }
    t.summary = Some(json!({
        "characters": r.rows.len(),
        "burgess_constant": r.max_ratio,
        "argmax_q": r.argmax_q,
        "principal_skipped": r.principal_skipped,
    }));
    Ok(t.render(cfg.format))
}

fn quad_spins(cfg: &RunConfig) -> Out {
    let s = QuadraticSetting::new(cfg.d)?;
    let x = cfg.max_norm.unwrap_or(10_000);
    let scan = s.scan(x)?;
    let mut t = Table::new(&["p", "beta", "spin_direct", "spin_formula", "agree"]);
    for r in &scan.records {
        t.push(vec![r.p.to_string(), r.beta.to_string(), r.spin_direct.to_string(), r.spin_formula.to_string(), r.agree().to_string()]);
    }
    let disagree = scan.records.iter().filter(|r| !r.agree()).count();
    t.summary = Some(json!({ "d": cfg.d, "records": scan.records.len(), "disagreements": disagree, "unqualified": scan.unqualified }));
    Ok(t.render(cfg.format))
}

fn curve(cfg: &RunConfig, ctx: &FieldContext) -> Result<CurveConfig, CliError> {
    if cfg.curve.trim() == "784" {
        return Ok(CurveConfig::curve_784(ctx)?);
    }
    let v: Vec<i64> = cfg
        .curve
        .split(',')
        .map(|s| s.trim().parse::<i64>().map_err(|_| CliError::Usage(format!("--curve: bad entry `{s}`"))))
        .collect::<Result<_, _>>()?;
    match v.as_slice() {
        &[a2, a4, a6, n, b] if n > 0 && b >= 0 => Ok(CurveConfig::new(ctx, a2, a4, a6, n as u64, b as u32)?),
        _ => Err(CliError::Usage("--curve: expected 784 or a2,a4,a6,conductor,base_dim".into())),
    }
}

fn selmer_scan(cfg: &RunConfig) -> Out {
    let e = engine(cfg)?;
    let curve = curve(cfg, &e.ctx)?;
    let x = cfg.max_p.unwrap_or(10_000);
    let cands = selmer::scan_twist_candidates(&curve, &e, x)?;
    let mut t = Table::new(&["p", "qualified", "spin", "predicted_dim", "failure_reason"]);
    let opt = |v: Option<String>| v.unwrap_or_default();
    for cand in &cands {
        t.push(vec![
            cand.p.to_string(),
            cand.qualified().to_string(),
            opt(cand.spin.map(|s| s.to_string())),
            opt(cand.predicted_dim.map(|d| d.to_string())),
            opt(cand.failure.map(|f| f.as_str().to_string())),
        ]);
    }
    let q: Vec<_> = cands.iter().filter(|c| c.qualified()).collect();
    let dim3 = q.iter().filter(|c| c.predicted_dim == Some(curve.base_dim + 2)).count();
    let frac = if q.is_empty() { None } else { Some(dim3 as f64 / q.len() as f64) };
    t.summary = Some(json!({ "candidates": cands.len(), "qualified": q.len(), "raised_rank": dim3, "raised_fraction": frac }));
    Ok(t.render(cfg.format))
}
