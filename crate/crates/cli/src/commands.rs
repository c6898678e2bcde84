//! One function per subcommand. Each reads and validates its parameters
//! before loading tables or starting any computation.

use std::f64::consts::PI;
use std::path::PathBuf;

use gausslab::dioph::{
    count_constrained_primes, equid_report, equid_window_report, find_approx_primes, spacing_audit, ConstraintQuery,
    Metric, ScaleSchedule,
};
use gausslab::expsum::{
    e3_exact, f3_exact, g_c_profile, linear_expsum, type_sum_report, vaaler_eval, Coefficients, TypeSumParams,
    VaalerParams,
};
use gausslab::gint::{hurwitz_expansion, approximation_quality, ComplexHP, GaussInt};
use gausslab::gsieve::{count_primes_sector, load_or_build, load_table, save_table, PrimeTable, SectorAnnulus};
use gausslab::metrical::{
    a_p_two_prime_count, count_f_n, g_n_value, monte_carlo_theo_i, t_p_and_e_p, MetricalParams, SieveErrorParams,
};
use gausslab::report::Report;
use serde::Serialize;
use serde_json::Value;

use crate::params::{CliError, CliResult, EXIT_COMPUTE};
use crate::Context;

/// Environment variable naming a directory for `primes-<max_norm>.bin` caches.
pub const CACHE_DIR_VAR: &str = "GAUSSLAB_CACHE_DIR";

pub fn dispatch(name: &str, ctx: &mut Context) -> CliResult<Report> {
    match name {
        "sieve" => sieve(ctx),
        "count" => count(ctx),
        "equid" => equid(ctx),
        "spacing" => spacing(ctx),
        "coro-search" => coro_search(ctx),
        "vaaler" => vaaler(ctx),
        "linear" => linear(ctx),
        "gc" => gc(ctx),
        "e3" => bilinear(ctx, false),
        "f3" => bilinear(ctx, true),
        "report" => type_sums(ctx),
        "fn-count" => fn_count(ctx),
        "theo1-mc" => theo1_mc(ctx),
        "sieve-error" => sieve_error(ctx),
        "hurwitz" => hurwitz(ctx),
        other => Err(CliError::usage(format!("unknown command {other:?}"))),
    }
}

fn require(ok: bool, field: &str, why: &str) -> CliResult<()> {
    if ok {
        Ok(())
    } else {
        Err(CliError::invalid(field, why))
    }
}

fn rows<T: Serialize>(items: impl IntoIterator<Item = T>) -> CliResult<Report> {
    let mut r = Report::new();
    for it in items {
        r.push(&it)?;
    }
    Ok(r)
}

fn cache_path(ctx: &Context, max_norm: u64) -> Option<PathBuf> {
    ctx.cache
        .clone()
        .or_else(|| std::env::var_os(CACHE_DIR_VAR).map(|d| PathBuf::from(d).join(format!("primes-{max_norm}.bin"))))
}

/// A table covering `max_norm`, through the cache when one is configured.
/// An existing cache file is only read, never rewritten.
fn table(ctx: &mut Context, max_norm: u64) -> CliResult<PrimeTable> {
    let Some(path) = cache_path(ctx, max_norm) else {
        ctx.meta.push(("table".into(), "built in memory".into()));
        return Ok(PrimeTable::build(max_norm)?);
    };
    let status = if path.exists() { "loaded" } else { "built and saved" };
    let t = load_or_build(&path, max_norm)?;
    ctx.meta.push(("table".into(), format!("{status} {}", path.display()).into()));
    Ok(t)
}

fn norm_for_radius(r: f64) -> u64 {
    (r * r).floor() as u64
}

fn angles(ctx: &Context) -> CliResult<(f64, f64)> {
    Ok((ctx.bag.f64_or("theta_min", -PI)?, ctx.bag.f64_or("theta_max", PI)?))
}

fn sieve(ctx: &mut Context) -> CliResult<Report> {
    let max_norm = ctx.bag.u64("max_norm")?;
    let t = match cache_path(ctx, max_norm) {
        Some(path) if path.exists() => {
            let t = load_table(&path)?;
            if t.max_norm() != max_norm {
                return Err(CliError {
                    code: EXIT_COMPUTE,
                    msg: format!(
                        "{} holds primes up to norm {}, not {max_norm}; refusing to overwrite it",
                        path.display(),
                        t.max_norm()
                    ),
                });
            }
            ctx.meta.push(("cache".into(), format!("reused {}", path.display()).into()));
            t
        }
        Some(path) => {
            let t = PrimeTable::build(max_norm)?;
            save_table(&t, &path)?;
            ctx.meta.push(("cache".into(), format!("created {}", path.display()).into()));
            t
        }
        None => PrimeTable::build(max_norm)?,
    };
    #[derive(Serialize)]
    struct Row {
        max_norm: u64,
        entries: usize,
    }
    rows([Row { max_norm, entries: t.len() }])
}

fn count(ctx: &mut Context) -> CliResult<Report> {
    let b = &ctx.bag;
    let r_max = b.f64("r_max")?;
    let r_min = b.f64_or("r_min", 0.0)?;
    let (t0, t1) = angles(ctx)?;
    let pieces = b.u64_or("pieces", 1)?;
    require((1..=4096).contains(&pieces), "pieces", "must lie in [1, 4096]")?;
    let whole = SectorAnnulus::new(r_min, r_max, t0, t1)?;
    let constraint = if b.has("c") {
        let c = b.complex("c")?;
        let delta = b.f64("delta")?;
        let metric: Metric = b.str_or("metric", "sup")?.parse().map_err(|e| CliError::invalid("metric", e))?;
        ConstraintQuery::new(whole, delta, metric).validate()?;
        Some((c, delta, metric))
    } else {
        None
    };
    let t = table(ctx, norm_for_radius(r_max))?;
    #[derive(Serialize)]
    struct Row {
        piece: u64,
        theta_min: f64,
        theta_max: f64,
        observed: u64,
        kubilius_main: f64,
        ratio: Option<f64>,
        constrained: Option<u64>,
        predicted: Option<f64>,
    }
    let width = whole.width() / pieces as f64;
    let mut out = Vec::new();
    for k in 0..pieces {
        let lo = t0 + k as f64 * width;
        let hi = if k + 1 == pieces { t1 } else { t0 + (k + 1) as f64 * width };
        let region = SectorAnnulus::new(r_min, r_max, lo, hi)?;
        let s = count_primes_sector(&t, &region)?;
        let (constrained, predicted) = match &constraint {
            Some((c, delta, metric)) => {
                let n = count_constrained_primes(&t, c, &ConstraintQuery::new(region, *delta, *metric))?;
                let area = match metric {
                    Metric::Sup => 4.0 * delta * delta,
                    Metric::Euclid => PI * delta * delta,
                };
                (Some(n), Some(area * s.observed as f64))
            }
            None => (None, None),
        };
        out.push(Row {
            piece: k,
            theta_min: lo,
            theta_max: hi,
            observed: s.observed,
            kubilius_main: s.kubilius_main,
            ratio: (s.kubilius_main > 0.0).then(|| s.observed as f64 / s.kubilius_main),
            constrained,
            predicted,
        });
    }
    rows(out)
}

fn equid(ctx: &mut Context) -> CliResult<Report> {
    let b = &ctx.bag;
    let c = b.complex("c")?;
    let delta = b.f64("delta")?;
    require(delta > 0.0 && delta <= 0.5, "delta", "must lie in (0, 1/2]")?;
    let epsilon = b.f64_or("epsilon", 0.01)?;
    require(epsilon > 0.0, "epsilon", "must be positive")?;
    let x = b.f64_or("x", 0.0)?;
    let (t0, t1) = angles(ctx)?;
    let region = SectorAnnulus::new(0.0, 1.0, t0, t1)?;
    let n_max = b.u64_or("n_max", 1_000_000)?;
    let report = match b.u64_opt("k")? {
        Some(k) => {
            let schedule = ScaleSchedule::new(&c, n_max as u128)?;
            let scale = schedule.scales.get(k as usize).ok_or_else(|| {
                CliError::invalid("k", format!("only {} scales have norm(q)⁶ ≤ {n_max}", schedule.scales.len()))
            })?;
            require(x >= 0.0 && x <= scale.n as f64, "x", "must lie in [0, N_k]")?;
            let t = table(ctx, scale.n as u64)?;
            equid_report(&t, &schedule, k as usize, x, delta, &region, epsilon)?
        }
        None => {
            require(x >= 0.0 && x <= n_max as f64, "x", "must lie in [0, n_max]")?;
            let t = table(ctx, n_max)?;
            equid_window_report(&t, &c, x, n_max, delta, &region, epsilon)?
        }
    };
    rows([report])
}

fn spacing(ctx: &mut Context) -> CliResult<Report> {
    let c = ctx.bag.complex("c")?;
    let q_max = ctx.bag.f64_or("q_max", 100.0)?;
    require(q_max >= 1.0 && q_max <= 1e6, "q_max", "must lie in [1, 10⁶]")?;
    let cap = (q_max * q_max).floor() as u128;
    let e = hurwitz_expansion(&c, 400, Some(cap + 1))?;
    let audits = e
        .convergents
        .iter()
        .filter(|k| k.q.norm() <= cap)
        .map(|k| spacing_audit(&c, k.q, k.p))
        .collect::<Result<Vec<_>, _>>()?;
    rows(audits)
}

fn coro_search(ctx: &mut Context) -> CliResult<Report> {
    let c = ctx.bag.complex("c")?;
    let e = ctx.bag.f64_or("e", -1.0 / 12.0)?;
    let max_norm = ctx.bag.u64("max_norm")?;
    let t = table(ctx, max_norm)?;
    rows(find_approx_primes(&t, &c, e))
}

fn vaaler(ctx: &mut Context) -> CliResult<Report> {
    let j = ctx.bag.u64("j")?;
    require(j >= 1 && j <= 1 << 20, "j", "must lie in [1, 2²⁰]")?;
    let params = VaalerParams::new(j as u32)?;
    let xs: Vec<f64> = match ctx.bag.f64_opt("x")? {
        Some(x) => vec![x],
        None => {
            let n = ctx.bag.u64_or("points", 1000)?;
            require(n >= 1 && n <= 10_000_000, "points", "must lie in [1, 10⁷]")?;
            (0..n).map(|k| k as f64 / n as f64).collect()
        }
    };
    #[derive(Serialize)]
    struct Row {
        j: u64,
        x: f64,
        psi: f64,
        psi_star: f64,
        sigma: f64,
        within_envelope: bool,
    }
    rows(xs.into_iter().map(|x| {
        let v = vaaler_eval(&params, x);
        Row { j, x, psi: v.psi, psi_star: v.psi_star, sigma: v.sigma, within_envelope: (v.psi_star - v.psi).abs() <= v.sigma + 1e-12 }
    }))
}

fn linear(ctx: &mut Context) -> CliResult<Report> {
    let c = ctx.bag.complex("c")?;
    let y_hi = ctx.bag.f64("y_hi")?;
    let y_lo = ctx.bag.f64_or("y_lo", 0.0)?;
    let (t0, t1) = angles(ctx)?;
    let s = linear_expsum(&c, y_lo, y_hi, t0, t1)?;
    #[derive(Serialize)]
    struct Row {
        y_lo: f64,
        y_hi: f64,
        theta_min: f64,
        theta_max: f64,
        exact_re: f64,
        exact_im: f64,
        exact_abs: f64,
        bound: f64,
        ratio: f64,
        terms: u64,
    }
    rows([Row {
        y_lo,
        y_hi,
        theta_min: t0,
        theta_max: t1,
        exact_re: s.exact.re,
        exact_im: s.exact.im,
        exact_abs: s.exact.norm(),
        bound: s.bound,
        ratio: s.ratio(),
        terms: s.terms,
    }])
}

fn gc(ctx: &mut Context) -> CliResult<Report> {
    let c = ctx.bag.complex("c")?;
    let y = ctx.bag.f64("y")?;
    let z = ctx.bag.f64("z")?;
    require(y >= 1.0, "y", "must be at least 1")?;
    require(z >= 0.0, "z", "must be non-negative")?;
    let qs: Vec<GaussInt> = match ctx.bag.gauss_opt("q")? {
        Some(q) => vec![q],
        None => {
            let cap = ctx.bag.u64_or("q_norm_max", 2500)? as u128;
            let e = hurwitz_expansion(&c, 400, Some(cap + 1))?;
            e.denominators().filter(|q| q.norm() <= cap).collect()
        }
    };
    #[derive(Serialize)]
    struct Row {
        q: String,
        y: f64,
        z: f64,
        exact: f64,
        bound_general: f64,
        bound_small_z: Option<f64>,
    }
    let mut out = Vec::new();
    for q in qs {
        let g = g_c_profile(&c, y, z, q)?;
        out.push(Row { q: q.to_string(), y, z, exact: g.exact, bound_general: g.bound_general, bound_small_z: g.bound_small_z });
    }
    rows(out)
}

fn bilinear(ctx: &mut Context, restricted: bool) -> CliResult<Report> {
    let b = &ctx.bag;
    let c = b.complex("c")?;
    let x2 = b.f64("x2")?;
    let m = b.f64("m")?;
    let x1 = b.f64_or("x1", 0.0)?;
    let h1 = b.f64_or("h1", 1.0)?;
    let h2 = b.f64_or("h2", 0.5)?;
    let delta = if restricted { b.f64("delta")? } else { b.f64_or("delta", 0.5)? };
    let (t0, t1) = angles(ctx)?;
    let params = TypeSumParams::new(x1, x2, m, h1, h2, delta)?.with_angles(t0, t1);
    params.validate()?;
    let coefficients = if restricted {
        match b.str_or("coefficients", "one")?.as_str() {
            "one" => Coefficients::One,
            "signs" => Coefficients::Signs { seed: ctx.seed },
            other => return Err(CliError::invalid("coefficients", format!("expected one or signs, got {other:?}"))),
        }
    } else {
        Coefficients::One
    };
    let value = if restricted {
        // b_n uses the next stream seed so that a and b are independent
        let second = match coefficients {
            Coefficients::Signs { seed } => Coefficients::Signs { seed: seed.wrapping_add(1) },
            one => one,
        };
        f3_exact(&c, &params, |m| coefficients.value(m), |n| second.value(n))?
    } else {
        e3_exact(&c, &params)?
    };
    #[derive(Serialize)]
    struct Row {
        x1: f64,
        x2: f64,
        m_bound: f64,
        h1: f64,
        h2: f64,
        delta: f64,
        theta_min: f64,
        theta_max: f64,
        coefficients: &'static str,
        value: f64,
    }
    rows([Row {
        x1,
        x2,
        m_bound: m,
        h1,
        h2,
        delta,
        theta_min: t0,
        theta_max: t1,
        coefficients: match coefficients {
            Coefficients::One => "one",
            Coefficients::Signs { .. } => "signs",
        },
        value,
    }])
}

fn type_sums(ctx: &mut Context) -> CliResult<Report> {
    let b = &ctx.bag;
    let c = b.complex("c")?;
    let delta = b.f64("delta")?;
    let epsilon = b.f64_or("epsilon", 0.01)?;
    let audit = b.f64_or("audit", 32.0)?;
    let x1 = b.f64_or("x1", 0.0)?;
    let (t0, t1) = angles(ctx)?;
    let q = match b.gauss_opt("q")? {
        Some(q) => q,
        None => {
            let e = hurwitz_expansion(&c, 64, Some(2))?;
            let first = e.denominators().find(|q| q.norm() >= 2);
            first.ok_or_else(|| CliError::invalid("c", "no convergent denominator of norm ≥ 2 (c is a Gaussian integer)"))?
        }
    };
    let params = TypeSumParams::for_convergent(q, delta)?;
    let params = params.with_window(x1, params.x2).with_angles(t0, t1);
    rows([type_sum_report(&c, q, &params, epsilon, audit)?])
}

fn metrical_params(ctx: &Context) -> CliResult<MetricalParams> {
    let b = &ctx.bag;
    Ok(MetricalParams::new(
        b.complex("c")?,
        b.f64_or("epsilon", 0.01)?,
        b.f64("n")?,
        b.f64_or("a", 1.0)?,
        b.f64_or("b", 2.0)?,
        b.f64_or("c_const", 1.0)?,
    )?)
}

fn fn_count(ctx: &mut Context) -> CliResult<Report> {
    let params = metrical_params(ctx)?;
    let alpha = ctx.bag.complex("alpha")?;
    let (ar, ai) = alpha.to_f64();
    let t = table(ctx, params.needed_norm(ar.hypot(ai)).ceil() as u64)?;
    let count = count_f_n(&t, &params, &alpha)?;
    #[derive(Serialize)]
    struct Row {
        n: f64,
        epsilon: f64,
        count: u64,
        g_n: Option<f64>,
        degenerate: bool,
    }
    let g_n = if params.n >= 2.0 { Some(g_n_value(&params)?) } else { None };
    rows([Row { n: params.n, epsilon: params.epsilon, count, g_n, degenerate: params.degenerate() || alpha.is_zero() }])
}

fn theo1_mc(ctx: &mut Context) -> CliResult<Report> {
    let params = metrical_params(ctx)?;
    require(params.n >= 2.0, "n", "must be at least 2")?;
    let b = &ctx.bag;
    let r_min = b.f64_or("r_min", params.a)?;
    let r_max = b.f64_or("r_max", params.b)?;
    let (t0, t1) = angles(ctx)?;
    let sector = SectorAnnulus::new(r_min, r_max, t0, t1)?;
    require(r_min >= params.a && r_max <= params.b, "sector", "radii must lie within [A, B]")?;
    let samples = b.u64("samples")?;
    require(samples >= 1, "samples", "must be positive")?;
    let t = table(ctx, params.needed_norm(r_max).ceil() as u64)?;
    rows([monte_carlo_theo_i(&t, &params, &sector, samples, ctx.seed)?])
}

fn sieve_error(ctx: &mut Context) -> CliResult<Report> {
    let b = &ctx.bag;
    let c = b.complex("c")?;
    let alpha = b.complex("alpha")?;
    let p = b.f64("p")?;
    let one = GaussInt::new(1, 0);
    let d1 = b.gauss_or("d1", one)?;
    let d2 = b.gauss_or("d2", one)?;
    let sp = match b.f64_opt("mu")? {
        Some(mu) => SieveErrorParams::with_mu(p, mu, d1, d2, alpha)?,
        None => SieveErrorParams::from_epsilon(p, b.f64("epsilon")?, d1, d2, alpha)?,
    };
    let t = t_p_and_e_p(&sp, &c)?;
    let a = a_p_two_prime_count(&sp, &c)?;
    #[derive(Serialize)]
    struct Row {
        p: f64,
        d1: String,
        d2: String,
        mu: f64,
        t_p: u64,
        main: f64,
        e_p: f64,
        window: u64,
        two_prime: u64,
        degenerate: bool,
    }
    rows([Row {
        p,
        d1: d1.to_string(),
        d2: d2.to_string(),
        mu: sp.mu,
        t_p: t.t_p,
        main: t.main,
        e_p: t.e_p,
        window: a.window,
        two_prime: a.two_prime,
        degenerate: t.degenerate,
    }])
}

fn hurwitz(ctx: &mut Context) -> CliResult<Report> {
    let c: ComplexHP = ctx.bag.complex("c")?;
    let terms = ctx.bag.u64_or("terms", 20)?;
    require(terms >= 1 && terms <= 10_000, "terms", "must lie in [1, 10⁴]")?;
    let e = hurwitz_expansion(&c, terms as usize, None)?;
    ctx.meta.push(("terminated".into(), Value::from(e.terminated)));
    #[derive(Serialize)]
    struct Row {
        k: usize,
        quotient: String,
        p: String,
        q: String,
        q_norm: String,
        quality: f64,
    }
    rows(e.quotients.iter().zip(&e.convergents).enumerate().map(|(k, (a, cv))| Row {
        k,
        quotient: a.to_string(),
        p: cv.p.to_string(),
        q: cv.q.to_string(),
        q_norm: cv.q.norm().to_string(),
        quality: approximation_quality(&c, cv.p, cv.q),
    }))
}
