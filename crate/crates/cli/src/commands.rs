//! One function per subcommand. Each resolves its defaults into the argument
//! struct first, so the echoed config is complete and replays exactly.

use serde::Serialize;
use serde_json::{json, Value};

use primeprog::admissible::{
    bundled_50_tuple, enumerate_x_w, is_admissible, search_narrow_tuple, x_w_cardinality,
    Admissibility, Tuple,
};
use primeprog::arith::{parse_polys, IntPolynomial, PrimeTable};
use primeprog::correlation::{
    empirical_correlation, euler_product_experiment, polynomial_forms_average, ZMatrix,
    EULER_CHECKPOINTS,
};
use primeprog::local_factors::{
    bad_primes_linear, local_factor_rows, verify_local_estimates, LinearFormSystem,
};
use primeprog::progressions::{
    first_bounded_gap, first_in_a, progression_pipeline, search_bounded_gap, search_in_a,
    PipelineConfig, ProgressionHit,
};
use primeprog::sieve_measure::nu::verify_majorization_with;
use primeprog::sieve_measure::{CutoffFunction, NuEvaluator};
use primeprog::wtrick::{
    build_a_with, build_f_a, choose_parameters, read_set, select_residue, write_set,
    ParamOverrides, SieveContext,
};
use primeprog::{Error, Exec};

use crate::args::*;
use crate::config::echo;
use crate::error::{CliError, CliResult};
use crate::output::{join, Body, Report, Table};

const DEFAULT_TUPLE: &str = "0 2";
const DEFAULT_EPSILON0: f64 = 0.3;
const DEFAULT_N_PRIME: u64 = 100_000;
const DEFAULT_SIEVE_LIMIT: u64 = 1_000_000;
const DEFAULT_SEARCH_BUDGET: u64 = 1_000_000;
const DEFAULT_BUCKETS: usize = 20;
const DEFAULT_PMAX: u64 = 100;
const DEFAULT_H: u64 = 10;
const DEFAULT_XMAX: u64 = 100;
const DEFAULT_YMAX: u64 = 10;
const DEFAULT_M_RANGE: u64 = 10;
/// Elements of A shown in the `maynard-set` report.
const SET_PREVIEW: usize = 20;

fn config_of(g: &GlobalArgs, a: &impl Serialize) -> CliResult<Value> {
    Ok(echo(&[serde_json::to_value(g)?, serde_json::to_value(a)?]))
}

fn missing(flag: &str) -> CliError {
    CliError::Core(Error::Precondition(format!("{flag} is required")))
}

/// Inline tuples accept commas as separators.
fn parse_tuple(s: &str) -> CliResult<Tuple> {
    Ok(Tuple::parse(&s.replace(',', " "))?)
}

fn parse_shifts(s: &str) -> CliResult<Vec<i64>> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<i64>()
                .map_err(|_| CliError::Core(Error::Parse(format!("not an integer shift: {t:?}"))))
        })
        .collect()
}

fn parse_vars(s: &str) -> Vec<&str> {
    s.split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .collect()
}

/// Fills the defaults of the shared experiment parameters and derives the
/// W-trick context (with the smallest admissible residue).
fn context(exp: &mut ExperimentArgs, j_default: usize) -> CliResult<SieveContext> {
    let tuple = match &exp.tuple_file {
        Some(path) => Tuple::read_file(path)?,
        None => parse_tuple(exp.tuple.get_or_insert_with(|| DEFAULT_TUPLE.into()))?,
    };
    let m = *exp.m.get_or_insert(if tuple.k() >= 2 { 1 } else { 0 });
    let epsilon0 = *exp.epsilon0.get_or_insert(DEFAULT_EPSILON0);
    let n_prime = *exp.n_prime.get_or_insert(DEFAULT_N_PRIME);
    let j_max = *exp.j_max.get_or_insert(j_default.max(1));
    let overrides = ParamOverrides {
        w: exp.w,
        eta0: exp.eta0,
        c0: exp.c0,
    };
    Ok(choose_parameters(
        n_prime, tuple, m, epsilon0, j_max, &overrides,
    )?)
}

fn evaluator(ctx: SieveContext) -> CliResult<NuEvaluator> {
    Ok(NuEvaluator::new(ctx, CutoffFunction::normalize()?)?)
}

fn hit_table(hits: &[ProgressionHit]) -> Table {
    let mut t = Table::new(&["x", "y", "b", "values"]);
    for h in hits {
        t.push(vec![
            h.x0.to_string(),
            h.y0.to_string(),
            h.gap.map(|b| b.to_string()).unwrap_or_default(),
            join(&h.values),
        ]);
    }
    t
}

pub fn sieve(mut a: SieveArgs, g: &GlobalArgs) -> CliResult<Report> {
    let limit = *a.limit.get_or_insert(DEFAULT_SIEVE_LIMIT);
    let table = PrimeTable::new(limit)?;
    let summary = table.summary();
    let mut t;
    let mut body = json!({ "summary": summary });
    if a.list {
        t = Table::new(&["p"]);
        for p in table.primes() {
            t.push(vec![p.to_string()]);
        }
        body["primes"] = json!(table.primes());
    } else {
        t = Table::new(&["limit", "prime_count", "largest_prime"]);
        t.push(vec![
            summary.limit.to_string(),
            summary.prime_count.to_string(),
            summary
                .largest_prime
                .map(|p| p.to_string())
                .unwrap_or_default(),
        ]);
    }
    Report::document("sieve", config_of(g, &a)?, body, t)
}

pub fn admissible(mut a: AdmissibleArgs, g: &GlobalArgs) -> CliResult<Report> {
    let mut body = json!({});
    let tuple = if let Some(k) = a.search {
        let d = *a.max_diameter.get_or_insert(10 * k as u64);
        let budget = *a.budget.get_or_insert(DEFAULT_SEARCH_BUDGET);
        let found = search_narrow_tuple(k, d, budget);
        body["search"] = json!({ "k": k, "max_diameter": d, "found": found.is_some() });
        found
    } else if a.bundled {
        Some(bundled_50_tuple()?)
    } else if let Some(path) = &a.tuple_file {
        Some(Tuple::read_file(path)?)
    } else if let Some(s) = &a.tuple {
        Some(parse_tuple(s)?)
    } else {
        return Err(missing("one of --tuple, --tuple-file, --bundled, --search"));
    };

    let mut t = Table::new(&[
        "tuple",
        "k",
        "diameter",
        "admissible",
        "witness",
        "failing_prime",
    ]);
    if let Some(tuple) = &tuple {
        body["tuple"] = json!(tuple.as_slice());
        body["k"] = json!(tuple.k());
        body["diameter"] = json!(tuple.diameter());
        let (witness, failing) = match is_admissible(tuple) {
            Admissibility::Admissible(w) => (Some(w.residues), None),
            Admissibility::Inadmissible { prime } => (None, Some(prime)),
        };
        body["admissible"] = json!(witness.is_some());
        if let Some(w) = &witness {
            body["witness"] = json!(w);
        }
        if let Some(p) = failing {
            body["failing_prime"] = json!(p);
        }
        if let Some(w_mod) = a.x_w {
            let residues = enumerate_x_w(tuple, w_mod)?;
            body["x_w"] = json!({
                "modulus": w_mod,
                "residues": residues,
                "cardinality": x_w_cardinality(tuple, w_mod)?,
            });
        }
        let witness_cell = witness
            .map(|w| {
                w.iter()
                    .map(|(p, r)| format!("{p}:{r}"))
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .unwrap_or_default();
        t.push(vec![
            tuple.to_line(),
            tuple.k().to_string(),
            tuple.diameter().to_string(),
            failing.is_none().to_string(),
            witness_cell,
            failing.map(|p| p.to_string()).unwrap_or_default(),
        ]);
    }
    Report::document("admissible", config_of(g, &a)?, body, t)
}

pub fn maynard_set(mut a: MaynardSetArgs, g: &GlobalArgs, exec: Exec) -> CliResult<Report> {
    let base = context(&mut a.exp, 1)?;
    let set = build_a_with(&base.params, exec)?;
    let sel = select_residue(&set, &base)?;
    let ctx = base.with_residue(sel.b)?;
    let f = build_f_a(&set, &ctx);
    let config = config_of(g, &a)?;
    if let Some(path) = &a.export {
        write_set(path, &config, &set)?;
    }
    let mut t = Table::new(&["b", "count"]);
    for (b, c) in &sel.counts {
        t.push(vec![b.to_string(), c.to_string()]);
    }
    let body = json!({
        "context": ctx,
        "set_size": set.len(),
        "set_head": &set[..set.len().min(SET_PREVIEW)],
        "residue": sel,
        "support_size": f.positions.len(),
        "indicator_value": f.value,
        "indicator_mean": f.mean(),
    });
    Report::document("maynard-set", config, body, t)
}

pub fn nu_stats(mut a: NuStatsArgs, g: &GlobalArgs, exec: Exec) -> CliResult<Report> {
    let ctx = context(&mut a.exp, 1)?;
    let n = *a.n.get_or_insert(ctx.n);
    let buckets = *a.buckets.get_or_insert(DEFAULT_BUCKETS);
    let ev = evaluator(ctx.clone())?;
    let stats = ev.stats_with(n, buckets, exec)?;
    let mut success = true;
    let mut body = json!({ "context": ctx, "stats": stats });
    if a.majorization {
        let set = build_a_with(&ctx.params, exec)?;
        let f = build_f_a(&set, &ctx);
        let rep = verify_majorization_with(&f, &ev, exec)?;
        success = rep.holds();
        body["majorization"] = json!(rep);
    }
    let mut t = Table::new(&["lo", "hi", "count"]);
    for b in &stats.histogram {
        t.push(vec![
            b.lo.to_string(),
            b.hi.to_string(),
            b.count.to_string(),
        ]);
    }
    let mut r = Report::document("nu-stats", config_of(g, &a)?, body, t)?;
    r.success = success;
    Ok(r)
}

pub fn local_factors(mut a: LocalFactorsArgs, g: &GlobalArgs) -> CliResult<Report> {
    let path = a.forms.clone().ok_or_else(|| missing("--forms"))?;
    let pmax = *a.pmax.get_or_insert(DEFAULT_PMAX);
    let seed = g.seed.unwrap_or(0);
    let sys = LinearFormSystem::parse(&std::fs::read_to_string(&path)?)?;
    let primes: Vec<u64> = PrimeTable::new(pmax.max(2))?
        .primes_up_to(pmax)
        .iter()
        .map(|&p| p as u64)
        .collect();
    let rows = local_factor_rows(&sys, &primes)?;
    let bad = bad_primes_linear(&sys, pmax)?;
    let estimates = verify_local_estimates(&sys, &primes, seed)?;
    let mut t = Table::new(&["p", "class", "num", "den"]);
    for r in &rows {
        t.push(vec![
            r.p.to_string(),
            r.class.clone(),
            r.numerator.clone(),
            r.denominator.clone(),
        ]);
    }
    let body = json!({
        "system": sys,
        "rows": rows,
        "bad_primes": bad,
        "estimates": estimates,
    });
    Report::document("local-factors", config_of(g, &a)?, body, t)
}

pub fn correlation(mut a: CorrelationArgs, g: &GlobalArgs, exec: Exec) -> CliResult<Report> {
    let shifts = parse_shifts(a.shifts.get_or_insert_with(|| "0".into()))?;
    let ctx = context(&mut a.exp, shifts.len())?;
    let n = *a.n.get_or_insert(ctx.n);
    let ev = evaluator(ctx.clone())?;
    let rep = empirical_correlation(&ev, &shifts, n, exec)?;
    let mut body = json!({ "context": ctx, "correlation": rep });
    let mut t = Table::new(&[
        "shifts",
        "n",
        "average",
        "main_term",
        "bad_prime_sum",
        "correction_scale",
        "scale_condition_met",
    ]);
    t.push(vec![
        join(&rep.shifts),
        rep.n.to_string(),
        rep.average.to_string(),
        rep.main_term.to_string(),
        rep.bad_prime_sum.to_string(),
        rep.correction_scale.to_string(),
        rep.scale_condition_met.to_string(),
    ]);
    if a.euler {
        let sys = LinearFormSystem::from_context(&ctx, shifts.clone())?;
        let z = ZMatrix::real(sys.len(), ctx.r.ln())?;
        let euler = euler_product_experiment(&sys, &z, &EULER_CHECKPOINTS)?;
        t = Table::new(&[
            "limit",
            "re",
            "im",
            "ratio_to_target",
            "bad_prime_correction",
            "difference",
        ]);
        for c in &euler.checkpoints {
            t.push(vec![
                c.limit.to_string(),
                c.product[0].to_string(),
                c.product[1].to_string(),
                c.ratio_to_target.to_string(),
                c.bad_prime_correction.to_string(),
                c.difference.map(|d| d.to_string()).unwrap_or_default(),
            ]);
        }
        body["euler"] = json!(euler);
    }
    Report::document("correlation", config_of(g, &a)?, body, t)
}

pub fn poly_forms(mut a: PolyFormsArgs, g: &GlobalArgs, exec: Exec) -> CliResult<Report> {
    let src = a.polys.get_or_insert_with(|| "0, y".into()).clone();
    let vars_src = a.vars.get_or_insert_with(|| "y".into()).clone();
    let qs = parse_polys(&src, &parse_vars(&vars_src))?;
    let h = *a.h.get_or_insert(DEFAULT_H);
    let ctx = context(&mut a.exp, qs.len())?;
    let n = *a.n.get_or_insert(ctx.n);
    let ev = evaluator(ctx.clone())?;
    let rep = polynomial_forms_average(&ev, &qs, h, n, exec)?;
    let mut t = Table::new(&["ell", "shifts", "average", "bad_sum"]);
    for c in &rep.cells {
        t.push(vec![
            join(&c.ell),
            join(&c.shifts),
            c.average.to_string(),
            c.bad_sum.map(|s| s.to_string()).unwrap_or_default(),
        ]);
    }
    let body = json!({ "context": ctx, "poly_forms": rep });
    Report::document("poly-forms", config_of(g, &a)?, body, t)
}

/// Largest `max_j P_j(y)` over `1 <= y <= y_max`, floored at zero.
fn max_shift(polys: &[IntPolynomial], y_max: u64) -> CliResult<u64> {
    let mut hi = 0i64;
    for y in 1..=y_max as i64 {
        for p in polys {
            hi = hi.max(p.eval_to_i64(&[y])?);
        }
    }
    Ok(hi as u64)
}

fn in_set(
    set: &[u64],
    polys: &[IntPolynomial],
    x_max: u64,
    y_max: u64,
    first: bool,
    exec: Exec,
) -> CliResult<Vec<ProgressionHit>> {
    Ok(if first {
        first_in_a(set, polys, x_max, y_max)?.into_iter().collect()
    } else {
        search_in_a(set, polys, x_max, y_max, exec)?
    })
}

pub fn search(mut a: SearchArgs, g: &GlobalArgs, exec: Exec) -> CliResult<Report> {
    let src = a.polys.clone().ok_or_else(|| missing("--polys"))?;
    let polys = parse_polys(&src, &["y"])?;
    let x_max = *a.xmax.get_or_insert(DEFAULT_XMAX);
    let y_max = *a.ymax.get_or_insert(DEFAULT_YMAX);
    let hits = if let Some(path) = &a.set {
        let (_, mut values) = read_set(path)?;
        values.sort_unstable();
        values.dedup();
        in_set(&values, &polys, x_max, y_max, a.first, exec)?
    } else if let Some(b_max) = a.bmax {
        if a.first {
            first_bounded_gap(&polys, b_max, x_max, y_max)?
                .into_iter()
                .collect()
        } else {
            search_bounded_gap(&polys, b_max, x_max, y_max, exec)?
        }
    } else {
        let limit = x_max
            .checked_add(max_shift(&polys, y_max)?)
            .ok_or_else(|| Error::Capacity("search range overflows u64".into()))?;
        let primes: Vec<u64> = PrimeTable::new(limit.max(2))?
            .primes()
            .iter()
            .map(|&p| p as u64)
            .collect();
        in_set(&primes, &polys, x_max, y_max, a.first, exec)?
    };
    let lines = hits
        .iter()
        .map(serde_json::to_value)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Report {
        command: "search",
        config: config_of(g, &a)?,
        body: Body::Lines(lines),
        table: hit_table(&hits),
        success: true,
    })
}

pub fn pipeline(mut a: PipelineArgs, g: &GlobalArgs, exec: Exec) -> CliResult<Report> {
    let src = a.polys.get_or_insert_with(|| "y, 2*y".into()).clone();
    let polys = parse_polys(&src, &["y"])?;
    let m_range = *a.m_range.get_or_insert(DEFAULT_M_RANGE);
    // Resolves and validates the shared parameters before the run.
    let ctx = context(&mut a.exp, 1)?;
    let cfg = PipelineConfig {
        n_prime: ctx.params.n_prime,
        tuple: ctx.params.tuple.clone(),
        m: ctx.params.m,
        epsilon0: ctx.params.epsilon0,
        j_max: ctx.j_max,
        overrides: ParamOverrides {
            w: a.exp.w,
            eta0: a.exp.eta0,
            c0: a.exp.c0,
        },
        m_range,
    };
    let rep = progression_pipeline(&cfg, &polys, exec)?;
    let t = hit_table(&rep.hits);
    let success = rep.consistent;
    let mut r = Report::document("pipeline", config_of(g, &a)?, rep, t)?;
    r.success = success;
    Ok(r)
}

pub fn selftest(g: &GlobalArgs) -> CliResult<Report> {
    let checks = primeprog::selftest::run();
    let passed = checks.iter().all(|c| c.passed);
    let mut t = Table::new(&["name", "passed", "detail"]);
    for c in &checks {
        t.push(vec![
            c.name.to_string(),
            c.passed.to_string(),
            c.detail.clone(),
        ]);
    }
    let body = json!({ "passed": passed, "checks": checks });
    let mut r = Report::document("selftest", config_of(g, &json!({}))?, body, t)?;
    r.success = passed;
    Ok(r)
}
