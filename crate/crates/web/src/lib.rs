//! WebAssembly bindings for the browser demo. Every export returns a JSON string;
//! errors come back as `{"error": "..."}`.

use fgt_core::counting::{family_size, intersection_profile, predicted_threshold, FamilyKind, FamilySpec};
use fgt_core::events::{sample_points, EventKind, SampleSeed, TrialRunner};
use fgt_core::scan::{count_successes, geometric_grid, summarize, DEFAULT_Z};
use fgt_core::{FlatTable, Space};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn opt(v: u32) -> Option<u64> {
    (v > 0).then_some(v as u64)
}

fn respond(r: Result<Value, String>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

/// Monte Carlo curve over 13 geometric points from t/8 to 8t.
/// Pass 0 for an `m` or `ell` the event does not take.
pub fn scan_curve_value(event: &str, q: u32, n: u32, m: u32, ell: u32, trials: u32, seed: u64) -> Result<Value, String> {
    let ev = EventKind::from_parts(event, opt(m), opt(ell)).map_err(|e| e.to_string())?;
    let space = Space::with_order(q as u64, n as usize).map_err(|e| e.to_string())?;
    let t = predicted_threshold(&ev, q as u64, n as u64).map_err(|e| e.to_string())?.value;
    let runner = TrialRunner::new(ev, &space).map_err(|e| e.to_string())?;
    let trials = trials.max(1) as u64;
    let grid = geometric_grid(t / 8.0, 8.0 * t, 13).map_err(|e| e.to_string())?;
    let successes = grid
        .iter()
        .map(|&th| count_successes(&runner, th, seed, 0, trials))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let s = summarize(&grid, &successes, trials, DEFAULT_Z, t);
    Ok(json!({
        "event": ev.name(),
        "predicted_threshold": t,
        "half_point": s.half_point.theta(),
        "ratio": s.ratio,
        "points": s.points,
    }))
}

/// A random subset of the plane F_q^2 and the lines holding at least `ell` of its points.
/// Coordinates are the integer codes of the field elements.
pub fn sample_plane_value(q: u32, ell: u32, theta: f64, seed: u64) -> Result<Value, String> {
    let space = Space::with_order(q as u64, 2).map_err(|e| e.to_string())?;
    let x = sample_points(&space, theta, SampleSeed::new(seed, 0)).map_err(|e| e.to_string())?;
    let coords = |code: u32| -> [u32; 2] { [code % q, code / q] };
    let table = FlatTable::build(&space, 1).map_err(|e| e.to_string())?;
    let rich: Vec<Vec<[u32; 2]>> = table
        .iter()
        .filter(|pts| pts.iter().filter(|&&p| x.contains_code(p)).count() >= ell.max(1) as usize)
        .map(|pts| pts.iter().map(|&p| coords(p)).collect())
        .collect();
    Ok(json!({
        "q": q,
        "theta": theta,
        "points": x.iter().map(|p| coords(p.code())).collect::<Vec<_>>(),
        "rich_lines": rich,
    }))
}

/// Exact family size, intersection profile and predicted threshold.
pub fn family_counts_value(family: &str, q: u32, n: u32, m: u32, ell: u32) -> Result<Value, String> {
    let (kind, event) = match family {
        "rich-line" => (FamilyKind::RichLine { ell: ell as u64 }, EventKind::RichLine { ell: ell as u64 }),
        "contained" => (FamilyKind::ContainedMFlat { m: m as u64 }, EventKind::ContainedMFlat { m: m as u64 }),
        "incidence" => (FamilyKind::IncidencePairs { m: m as u64 }, EventKind::Incidence { m: m as u64 }),
        other => return Err(format!("unknown family '{other}'")),
    };
    let spec = FamilySpec::new(kind, q as u64, n as u64).map_err(|e| e.to_string())?;
    let stats = family_size(&spec).map_err(|e| e.to_string())?;
    let profile = intersection_profile(&spec).map_err(|e| e.to_string())?;
    let t = predicted_threshold(&event, q as u64, n as u64).map_err(|e| e.to_string())?;
    Ok(json!({
        "family": family,
        "size": stats.size.to_string(),
        "log_size": stats.log_size,
        "profile": profile
            .entries
            .iter()
            .map(|(k, e)| json!({"k": k, "value": e.value.to_string(), "exact": e.exact}))
            .collect::<Vec<_>>(),
        "threshold": t.value,
        "formula": t.formula.name(),
    }))
}

#[wasm_bindgen]
pub fn scan_curve(event: &str, q: u32, n: u32, m: u32, ell: u32, trials: u32, seed: u64) -> String {
    respond(scan_curve_value(event, q, n, m, ell, trials, seed))
}

#[wasm_bindgen]
pub fn sample_plane(q: u32, ell: u32, theta: f64, seed: u64) -> String {
    respond(sample_plane_value(q, ell, theta, seed))
}

#[wasm_bindgen]
pub fn family_counts(family: &str, q: u32, n: u32, m: u32, ell: u32) -> String {
    respond(family_counts_value(family, q, n, m, ell))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_small_plane() {
        let v = family_counts_value("rich-line", 3, 2, 0, 3).unwrap();
        assert_eq!(v["size"], "12");
        assert_eq!(v["formula"], "sharp");
        assert!(family_counts("flags", 3, 2, 0, 3).contains("error"));
    }

    #[test]
    fn full_plane_has_every_line() {
        let v = sample_plane_value(5, 5, 1.0, 0).unwrap();
        assert_eq!(v["points"].as_array().unwrap().len(), 25);
        assert_eq!(v["rich_lines"].as_array().unwrap().len(), 30);
        assert!(sample_plane(6, 2, 0.5, 0).contains("prime power"));
    }

    #[test]
    fn scan_is_monotone_after_smoothing() {
        let v = scan_curve_value("rich-line", 5, 2, 0, 3, 50, 1).unwrap();
        let pts = v["points"].as_array().unwrap();
        assert_eq!(pts.len(), 13);
        let sm: Vec<f64> = pts.iter().map(|p| p["smoothed"].as_f64().unwrap()).collect();
        assert!(sm.windows(2).all(|w| w[0] <= w[1]));
    }
}
