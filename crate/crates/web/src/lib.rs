//! wasm-bindgen bindings for the static demo page in `www/`.
//!
//! Each binding returns a JSON string. Exact values travel as `"p/q"`
//! strings next to `f64` approximations used only for plotting.

use kstab_core::exactmath::{approx_f64, format_rational, rat, Polynomial, Rational};
use kstab_core::invariants;
use kstab_core::models::{self, sample_points, AmpleModelSequence, SequenceConfig};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// The two-piece sequence for `(n, c2)` with the continuity-solved degree.
fn sequence(n: u32, c2: i64) -> Result<AmpleModelSequence, String> {
    let cfg = SequenceConfig {
        comment: None,
        n,
        d: None,
        degree: None,
        c2,
        c1_multiple: None,
        pieces: None,
    };
    models::from_config(&cfg).map_err(|e| e.to_string())
}

fn exact(value: &Rational) -> Value {
    json!({ "exact": format_rational(value), "approx": approx_f64(value) })
}

pub fn eta_summary_json(n: u32, c2: i64) -> Result<String, String> {
    let seq = sequence(n, c2)?;
    let report = invariants::eta_report(&seq, None).map_err(|e| e.to_string())?;
    let preset = models::del_pezzo5_c2(n) == Some(c2);
    Ok(json!({
        "n": n,
        "c2": c2,
        "preset": preset,
        "degree": exact(&seq.degree),
        "breakpoints": seq.breakpoints().iter().map(exact).collect::<Vec<_>>(),
        "eta": exact(&report.eta),
        "eta_volume_check": report.eta_volume_check.as_ref().map(exact),
        "eta_closed_form": exact(&invariants::eta_closed_form(n, c2)),
        "verdict": report.verdict.as_str(),
        "pieces": report.pieces_summary.iter().map(|p| json!({
            "label": p.label,
            "contribution": exact(&p.contribution),
        })).collect::<Vec<_>>(),
    })
    .to_string())
}

/// Samples of `V(x)`, `Q(x)` and the weighted integrand `n (d - x) Q(x)`.
pub fn volume_curve_json(n: u32, c2: i64, samples_per_piece: usize) -> Result<String, String> {
    let seq = sequence(n, c2)?;
    let count = samples_per_piece.clamp(2, 2000);
    let weight = Polynomial::from_coeffs(vec![rat(seq.d as i64), rat(-1)]).scale(&rat(n as i64));
    let pieces: Vec<Value> = seq
        .pieces
        .iter()
        .map(|piece| {
            let integrand = &weight * &piece.q_poly;
            let xs = sample_points(&piece.tau_lo, &piece.tau_hi, count);
            let eval = |p: &Polynomial| {
                xs.iter()
                    .map(|x| approx_f64(&p.eval(x)))
                    .collect::<Vec<_>>()
            };
            json!({
                "label": piece.label,
                "tau_lo": exact(&piece.tau_lo),
                "tau_hi": exact(&piece.tau_hi),
                "q_poly": piece.q_poly.to_string(),
                "v_poly": piece.v_poly.to_string(),
                "x": xs.iter().map(approx_f64).collect::<Vec<_>>(),
                "v": eval(&piece.v_poly),
                "q": eval(&piece.q_poly),
                "integrand": eval(&integrand),
            })
        })
        .collect();
    Ok(json!({ "n": n, "c2": c2, "d": seq.d, "pieces": pieces }).to_string())
}

/// `η` for every `c2` in `c2_min..=c2_max` whose sequence is valid.
pub fn eta_profile_json(n: u32, c2_min: i64, c2_max: i64) -> Result<String, String> {
    if c2_min > c2_max || c2_max - c2_min > 200 {
        return Err(format!("bad c2 range {c2_min}..={c2_max}"));
    }
    let mut rows = Vec::new();
    for c2 in c2_min..=c2_max {
        if let Ok(seq) = sequence(n, c2) {
            let eta = invariants::eta(&seq).map_err(|e| e.to_string())?;
            rows.push(json!({
                "c2": c2,
                "eta": exact(&eta),
                "verdict": invariants::verdict(&eta).as_str(),
            }));
        }
    }
    Ok(json!({ "n": n, "rows": rows }).to_string())
}

#[wasm_bindgen(js_name = etaSummary)]
pub fn eta_summary(n: u32, c2: i32) -> Result<String, JsValue> {
    eta_summary_json(n, c2 as i64).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = volumeCurve)]
pub fn volume_curve(n: u32, c2: i32, samples_per_piece: u32) -> Result<String, JsValue> {
    volume_curve_json(n, c2 as i64, samples_per_piece as usize).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = etaProfile)]
pub fn eta_profile(n: u32, c2_min: i32, c2_max: i32) -> Result<String, JsValue> {
    eta_profile_json(n, c2_min as i64, c2_max as i64).map_err(|e| JsValue::from_str(&e))
}
