use std::path::Path;

use fgt_core::certify::{
    chernoff_lower, chernoff_upper, chernoff_upper_tight, check_certificate, check_moment_condition,
    second_moment_tail, sharp_threshold_bounds, CertificateParams,
};
use fgt_core::counting::{
    default_formula, family_size, intersection_profile, threshold_with_formula, FamilyKind, FamilySpec,
    Threshold, ThresholdFormula,
};
use fgt_core::events::{EventKind, TrialRunner};
use fgt_core::oracle::{exact_event_probability, parse_rational, FIXTURE_HEADER};
use fgt_core::scan::{geometric_grid, summarize, wilson_interval, HalfPoint, DEFAULT_Z};
use fgt_core::{Error, Space};
use serde::Serialize;
use serde_json::json;

use crate::config::{CertifyKind, Format, Opts};
use crate::output::{plot_data, to_csv, to_json, HalfPointJson, SimEnvelope, SimRow};
use crate::parallel::{count_successes, pool};
use crate::CliError;

pub const DEFAULT_TRIALS: u64 = 1000;
pub const DEFAULT_GRID_LO: f64 = 0.125;
pub const DEFAULT_GRID_HI: f64 = 8.0;
pub const DEFAULT_GRID_POINTS: usize = 13;

fn event_of(o: &Opts) -> Result<EventKind, CliError> {
    let name = o.event.as_deref().ok_or_else(|| CliError::invalid("--event is required"))?;
    let ev = EventKind::from_parts(name, o.m, o.ell)?;
    ev.validate(o.need_q()?, o.need_n()?)?;
    Ok(ev)
}

fn family_of(o: &Opts) -> Result<FamilySpec, CliError> {
    let name = o
        .family
        .as_deref()
        .or(o.event.as_deref())
        .ok_or_else(|| CliError::invalid("--family is required"))?;
    let need_m = || o.m.ok_or_else(|| CliError::invalid(format!("family {name} needs --m")));
    let need_ell = || o.ell.ok_or_else(|| CliError::invalid(format!("family {name} needs --ell")));
    let kind = match name {
        "rich-line" => FamilyKind::RichLine { ell: need_ell()? },
        "rich-flat" => FamilyKind::RichMFlat { m: need_m()?, ell: need_ell()? },
        "contained" => FamilyKind::ContainedMFlat { m: need_m()? },
        "incidence" => FamilyKind::IncidencePairs { m: need_m()? },
        other => {
            return Err(CliError::invalid(format!(
                "unknown family '{other}' (expected rich-line, rich-flat, contained, incidence)"
            )))
        }
    };
    Ok(FamilySpec::new(kind, o.need_q()?, o.need_n()?)?)
}

fn family_name(kind: &FamilyKind) -> &'static str {
    match kind {
        FamilyKind::RichLine { .. } => "rich-line",
        FamilyKind::RichMFlat { .. } => "rich-flat",
        FamilyKind::ContainedMFlat { .. } => "contained",
        FamilyKind::IncidencePairs { .. } => "incidence",
    }
}

fn family_ell(spec: &FamilySpec) -> Option<u64> {
    match spec.kind {
        FamilyKind::RichLine { ell } | FamilyKind::RichMFlat { ell, .. } => Some(ell),
        _ => None,
    }
}

fn predicted(o: &Opts, ev: &EventKind) -> Result<Option<Threshold>, CliError> {
    let (q, n) = (o.need_q()?, o.need_n()?);
    let formula = match &o.formula {
        Some(f) => ThresholdFormula::parse(f)?,
        None => match default_formula(ev, q, n) {
            Ok(f) => f,
            Err(Error::Unsupported(_)) => return Ok(None),
            Err(e) => return Err(e.into()),
        },
    };
    Ok(Some(threshold_with_formula(ev, q, n, formula)?))
}

/// A plain density, or `<k>t` for k times the predicted threshold.
fn parse_theta(raw: &str, t: Option<f64>) -> Result<f64, CliError> {
    let raw = raw.trim();
    let theta = if let Some(mult) = raw.strip_suffix('t') {
        let k: f64 = mult
            .parse()
            .map_err(|_| CliError::invalid(format!("bad theta '{raw}'")))?;
        let t = t.ok_or_else(|| CliError::invalid("this event has no predicted threshold to scale"))?;
        (k * t).min(1.0)
    } else {
        raw.parse().map_err(|_| CliError::invalid(format!("bad theta '{raw}'")))?
    };
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::InvalidTheta(theta).into());
    }
    Ok(theta)
}

fn emit(o: &Opts, text: String) -> Result<String, CliError> {
    match &o.out {
        Some(path) => {
            write_file(path, &text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::invalid(format!("cannot write {}: {e}", path.display())))
}

fn format_of(o: &Opts) -> Format {
    o.format.unwrap_or_default()
}

#[derive(Serialize)]
struct CountRow {
    family: &'static str,
    q: u64,
    n: u64,
    m: u64,
    ell: Option<u64>,
    quantity: &'static str,
    k: Option<u64>,
    value: String,
    exact: bool,
}

pub fn count(o: &Opts) -> Result<String, CliError> {
    let spec = family_of(o)?;
    let stats = family_size(&spec)?;
    let profile = match intersection_profile(&spec) {
        Ok(p) => Some(p),
        Err(Error::Unsupported(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let name = family_name(&spec.kind);
    let ell = family_ell(&spec);
    let text = match format_of(o) {
        Format::Csv => {
            let base = |quantity, k, value: String, exact| CountRow {
                family: name,
                q: spec.q,
                n: spec.n,
                m: spec.m(),
                ell,
                quantity,
                k,
                value,
                exact,
            };
            let mut rows = vec![
                base("size", None, stats.size.to_string(), stats.exact),
                base("ln_size", None, stats.log_size.to_string(), stats.exact),
            ];
            if let Some(lead) = stats.leading_order_log {
                rows.push(base("ln_leading_order", None, lead.to_string(), false));
            }
            if let Some(p) = &profile {
                for (&k, e) in &p.entries {
                    rows.push(base("I", Some(k), e.value.to_string(), e.exact));
                }
            }
            to_csv(&rows)?
        }
        Format::Json => {
            let prof = profile.as_ref().map(|p| {
                p.entries
                    .iter()
                    .map(|(k, e)| json!({"k": k, "value": e.value.to_string(), "exact": e.exact}))
                    .collect::<Vec<_>>()
            });
            to_json(&json!({
                "family": name,
                "q": spec.q,
                "n": spec.n,
                "m": spec.m(),
                "ell": ell,
                "size": stats.size.to_string(),
                "log_size": stats.log_size,
                "exact": stats.exact,
                "leading_order_log": stats.leading_order_log,
                "profile": prof,
            }))?
        }
    };
    emit(o, text)
}

#[derive(Serialize)]
struct ThresholdRow {
    event: &'static str,
    q: u64,
    n: u64,
    m: u64,
    ell: Option<u64>,
    formula: &'static str,
    threshold: f64,
    ln_threshold: f64,
    companion: Option<f64>,
    warnings: String,
}

pub fn threshold(o: &Opts) -> Result<String, CliError> {
    let ev = event_of(o)?;
    let t = predicted(o, &ev)?.ok_or_else(|| {
        CliError::from(Error::Unsupported(format!("{} has no θ threshold", ev.name())))
    })?;
    let row = ThresholdRow {
        event: ev.name(),
        q: o.need_q()?,
        n: o.need_n()?,
        m: ev.m(),
        ell: ev.ell(),
        formula: t.formula.name(),
        threshold: t.value,
        ln_threshold: t.ln_value,
        companion: t.companion,
        warnings: t.warnings.join("; "),
    };
    let text = match format_of(o) {
        Format::Csv => to_csv(&[row])?,
        Format::Json => to_json(&json!({
            "event": row.event,
            "q": row.q,
            "n": row.n,
            "m": row.m,
            "ell": row.ell,
            "formula": row.formula,
            "threshold": row.threshold,
            "ln_threshold": row.ln_threshold,
            "companion": row.companion,
            "warnings": t.warnings,
        }))?,
    };
    emit(o, text)
}

struct Prepared {
    event: EventKind,
    runner: TrialRunner,
    threshold: Option<Threshold>,
    trials: u64,
    seed: u64,
    z: f64,
    pool: rayon::ThreadPool,
}

fn prepare(o: &Opts) -> Result<Prepared, CliError> {
    let event = event_of(o)?;
    let threshold = predicted(o, &event)?;
    let trials = o.trials.unwrap_or(DEFAULT_TRIALS);
    if trials == 0 {
        return Err(CliError::invalid("--trials must be at least 1"));
    }
    let z = o.z.unwrap_or(DEFAULT_Z);
    if !(z > 0.0 && z.is_finite()) {
        return Err(CliError::invalid("--z must be positive"));
    }
    let pool = pool(o.workers()?)?;
    let space = Space::with_order(o.need_q()?, o.need_n()? as usize)?;
    let runner = TrialRunner::new(event, &space)?;
    Ok(Prepared {
        event,
        runner,
        threshold,
        trials,
        seed: o.seed.unwrap_or(0),
        z,
        pool,
    })
}

fn sim_row(o: &Opts, p: &Prepared, theta: f64, successes: u64) -> Result<SimRow, CliError> {
    let (ci_lo, ci_hi) = wilson_interval(successes, p.trials, p.z);
    Ok(SimRow {
        event: p.event.name().to_string(),
        q: o.need_q()?,
        n: o.need_n()?,
        m: p.event.m(),
        ell: p.event.ell(),
        theta,
        trials: p.trials,
        successes,
        p_hat: successes as f64 / p.trials as f64,
        ci_lo,
        ci_hi,
        seed: p.seed,
    })
}

pub fn simulate(o: &Opts) -> Result<String, CliError> {
    let p = prepare(o)?;
    let raw = o.theta.as_deref().ok_or_else(|| CliError::invalid("--theta is required"))?;
    let theta = parse_theta(raw, p.threshold.as_ref().map(|t| t.value))?;
    let successes = count_successes(&p.pool, &p.runner, theta, p.seed, p.trials)?;
    let row = sim_row(o, &p, theta, successes)?;
    let text = match format_of(o) {
        Format::Csv => to_csv(&[row])?,
        Format::Json => to_json(&SimEnvelope {
            predicted_threshold: p.threshold.as_ref().map(|t| t.value),
            half_point: None,
            rows: vec![row],
        })?,
    };
    emit(o, text)
}

fn half_point_json(h: &HalfPoint, ratio: Option<f64>) -> HalfPointJson {
    let status = match h {
        HalfPoint::Crossed { .. } => "crossed",
        HalfPoint::NeverReached => "not-crossed",
        HalfPoint::StartsAbove => "starts-above",
    };
    HalfPointJson {
        status: status.into(),
        theta: h.theta(),
        ratio,
    }
}

pub fn scan(o: &Opts) -> Result<String, CliError> {
    let p = prepare(o)?;
    let t = p
        .threshold
        .as_ref()
        .ok_or_else(|| CliError::from(Error::Unsupported(format!("{} has no θ threshold to scan around", p.event.name()))))?
        .value;
    let lo = o.grid_lo.unwrap_or(DEFAULT_GRID_LO);
    let hi = o.grid_hi.unwrap_or(DEFAULT_GRID_HI);
    let grid = geometric_grid(lo * t, hi * t, o.grid_points.unwrap_or(DEFAULT_GRID_POINTS))?;
    let successes: Vec<u64> = grid
        .iter()
        .map(|&theta| count_successes(&p.pool, &p.runner, theta, p.seed, p.trials))
        .collect::<Result<_, _>>()?;
    let summary = summarize(&grid, &successes, p.trials, p.z, t);
    let rows: Vec<SimRow> = grid
        .iter()
        .zip(&successes)
        .map(|(&theta, &s)| sim_row(o, &p, theta, s))
        .collect::<Result<_, _>>()?;
    let half = half_point_json(&summary.half_point, summary.ratio);
    let text = match format_of(o) {
        Format::Csv => to_csv(&rows)?,
        Format::Json => to_json(&SimEnvelope {
            predicted_threshold: Some(t),
            half_point: Some(half.clone()),
            rows: rows.clone(),
        })?,
    };
    if let Some(path) = &o.out {
        write_file(&path.with_extension("dat"), &plot_data(&rows))?;
    }
    match half.theta {
        Some(h) => eprintln!("half-point {h} (ratio to predicted {})", half.ratio.unwrap_or(f64::NAN)),
        None => eprintln!("half-point {}", half.status),
    }
    emit(o, text)
}

pub fn oracle(o: &Opts) -> Result<String, CliError> {
    let ev = event_of(o)?;
    let raw = o.theta.as_deref().ok_or_else(|| CliError::invalid("--theta is required"))?;
    let theta = parse_rational(raw)?;
    let space = Space::with_order(o.need_q()?, o.need_n()? as usize)?;
    let r = exact_event_probability(&ev, &space, &theta)?;
    let ell = ev.ell().map_or("-".to_string(), |l| l.to_string());
    let text = match format_of(o) {
        Format::Csv => format!(
            "{FIXTURE_HEADER}\n{},{},{},{},{},{},{},{},{}\n",
            ev.name(),
            o.need_q()?,
            o.need_n()?,
            ev.m(),
            ell,
            theta.numer(),
            theta.denom(),
            r.value.numer(),
            r.value.denom()
        ),
        Format::Json => to_json(&json!({
            "event": ev.name(),
            "q": o.need_q()?,
            "n": o.need_n()?,
            "m": ev.m(),
            "ell": ev.ell(),
            "theta": theta.to_string(),
            "probability": r.value.to_string(),
            "probability_f64": r.to_f64(),
            "instance_size": r.instance_size,
        }))?,
    };
    emit(o, text)
}

fn one_row<T: Serialize>(o: &Opts, row: T) -> Result<String, CliError> {
    let text = match format_of(o) {
        Format::Csv => to_csv(&[row])?,
        Format::Json => to_json(&row)?,
    };
    emit(o, text)
}

#[derive(Serialize)]
struct ConditionRow {
    family: &'static str,
    q: u64,
    n: u64,
    m: u64,
    ell: Option<u64>,
    c: f64,
    c_prime: Option<f64>,
    holds: bool,
    lhs_over_rhs: f64,
    conservative: bool,
    theta: Option<f64>,
    probability_lower_bound: Option<f64>,
}

#[derive(Serialize)]
struct TailRow {
    family: &'static str,
    q: u64,
    n: u64,
    m: u64,
    ell: Option<u64>,
    theta: f64,
    expectation: f64,
    second_moment: f64,
    chebyshev_bound: f64,
    conservative: bool,
}

#[derive(Serialize)]
struct ChernoffRow {
    eps: f64,
    p: f64,
    #[serde(rename = "N")]
    n: u64,
    lower: Option<f64>,
    upper: f64,
    upper_tight: f64,
}

#[derive(Serialize)]
struct SharpRow {
    q: u64,
    n: u64,
    m: u64,
    ell: u64,
    eps: f64,
    theta_below: f64,
    below_raw: f64,
    below: f64,
    theta_above: f64,
    above: f64,
}

pub fn certify(kind: CertifyKind, o: &Opts) -> Result<String, CliError> {
    match kind {
        CertifyKind::Condition => {
            let spec = family_of(o)?;
            let stats = family_size(&spec)?;
            let profile = intersection_profile(&spec)?;
            let c = o.c.ok_or_else(|| CliError::invalid("--c is required"))?;
            let row = match o.c_prime {
                Some(cp) => {
                    let cert = check_certificate(&stats, &profile, &CertificateParams::new(c, cp)?)?;
                    ConditionRow {
                        family: family_name(&spec.kind),
                        q: spec.q,
                        n: spec.n,
                        m: spec.m(),
                        ell: family_ell(&spec),
                        c,
                        c_prime: Some(cp),
                        holds: cert.check.holds,
                        lhs_over_rhs: cert.check.lhs_over_rhs,
                        conservative: cert.check.conservative,
                        theta: Some(cert.theta),
                        probability_lower_bound: Some(cert.probability_lower_bound),
                    }
                }
                None => {
                    let chk = check_moment_condition(&stats, &profile, c)?;
                    ConditionRow {
                        family: family_name(&spec.kind),
                        q: spec.q,
                        n: spec.n,
                        m: spec.m(),
                        ell: family_ell(&spec),
                        c,
                        c_prime: None,
                        holds: chk.holds,
                        lhs_over_rhs: chk.lhs_over_rhs,
                        conservative: chk.conservative,
                        theta: None,
                        probability_lower_bound: None,
                    }
                }
            };
            one_row(o, row)
        }
        CertifyKind::Tail => {
            let spec = family_of(o)?;
            let stats = family_size(&spec)?;
            let profile = intersection_profile(&spec)?;
            let raw = o.theta.as_deref().ok_or_else(|| CliError::invalid("--theta is required"))?;
            let theta = parse_theta(raw, None)?;
            let t = second_moment_tail(&stats, &profile, theta)?;
            one_row(
                o,
                TailRow {
                    family: family_name(&spec.kind),
                    q: spec.q,
                    n: spec.n,
                    m: spec.m(),
                    ell: family_ell(&spec),
                    theta,
                    expectation: t.expectation,
                    second_moment: t.second_moment,
                    chebyshev_bound: t.chebyshev_bound,
                    conservative: t.conservative,
                },
            )
        }
        CertifyKind::Chernoff => {
            let eps = o.eps.ok_or_else(|| CliError::invalid("--eps is required"))?;
            let p = o.p.ok_or_else(|| CliError::invalid("--p is required"))?;
            let n = o.big_n.ok_or_else(|| CliError::invalid("--N is required"))?;
            let lower = if eps < 1.0 { Some(chernoff_lower(eps, p, n)?) } else { None };
            one_row(
                o,
                ChernoffRow {
                    eps,
                    p,
                    n,
                    lower,
                    upper: chernoff_upper(eps, p, n)?,
                    upper_tight: chernoff_upper_tight(eps, p, n)?,
                },
            )
        }
        CertifyKind::Sharp => {
            let (q, n) = (o.need_q()?, o.need_n()?);
            let m = o.m.unwrap_or(1);
            let ell = o.ell.ok_or_else(|| CliError::invalid("--ell is required"))?;
            let eps = o.eps.ok_or_else(|| CliError::invalid("--eps is required"))?;
            let b = sharp_threshold_bounds(q, n, m, ell, eps)?;
            one_row(
                o,
                SharpRow {
                    q,
                    n,
                    m,
                    ell,
                    eps,
                    theta_below: b.theta_below,
                    below_raw: b.below_raw,
                    below: b.below,
                    theta_above: b.theta_above,
                    above: b.above,
                },
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_forms() {
        assert_eq!(parse_theta("0.25", None).unwrap(), 0.25);
        assert!((parse_theta("6t", Some(0.05)).unwrap() - 0.3).abs() < 1e-15);
        assert_eq!(parse_theta("100t", Some(0.05)).unwrap(), 1.0);
        assert!(parse_theta("6t", None).is_err());
        assert_eq!(parse_theta("1.5", None).unwrap_err().code, crate::EXIT_INVALID);
        assert!(parse_theta("x", None).is_err());
    }
}
