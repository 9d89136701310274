//! Browser bindings: a thin JSON/pixel layer over the core crate for the
//! static demo page in `www/`. Build with
//! `wasm-pack build crates/wasm --target web`.

use opident_core::hsop::{make_h0, shift_spreading, H0Kind, Lambda4};
use opident_core::lattice::Lattice4;
use opident_core::scenario::{
    run_gaussian_example, run_notident, run_thm51, ExperimentConfig,
};
use serde::Serialize;
use wasm_bindgen::prelude::wasm_bindgen;

#[derive(Serialize)]
struct DensityReport {
    rank: usize,
    d2: Option<f64>,
    det_tilde: f64,
    d_tilde: Option<f64>,
    necessary_condition: Option<bool>,
    error: Option<String>,
}

/// Density panel: generator entries a1,b1,c1,d1,a2,b2,c2,d2 → JSON with the
/// two-dimensional Beurling density, the derived lattice data and the √2
/// verdict.
#[wasm_bindgen]
pub fn density_report(entries: &[f64]) -> String {
    let report = density_report_impl(entries);
    serde_json::to_string(&report).unwrap_or_else(|e| format!("{{\"error\":\"{e}\"}}"))
}

fn density_report_impl(entries: &[f64]) -> DensityReport {
    if entries.len() != 8 {
        return DensityReport {
            rank: 0,
            d2: None,
            det_tilde: f64::NAN,
            d_tilde: None,
            necessary_condition: None,
            error: Some(format!("need 8 entries, got {}", entries.len())),
        };
    }
    let mut e = [0.0f64; 8];
    e.copy_from_slice(entries);
    let lat = Lattice4::from_flat(e);
    let tilde = lat.tilde_lattice();
    DensityReport {
        rank: lat.rank(),
        d2: lat.two_beurling_density().ok(),
        det_tilde: tilde.det().abs(),
        d_tilde: tilde.beurling_density().ok(),
        necessary_condition: lat.necessary_condition_holds().ok(),
        error: lat
            .two_beurling_density()
            .err()
            .map(|err| err.to_string()),
    }
}

/// Scenario panel: run one named experiment at desk scale and return the
/// outcome as JSON. `kind` is one of "thm51", "gauss1", "gauss2", "notident";
/// `p1` is `a` for thm51 and `alpha` otherwise; `p2` is `beta`.
#[wasm_bindgen]
pub fn scenario_report(kind: &str, len: usize, p1: f64, p2: f64) -> String {
    let cfg = ExperimentConfig {
        len,
        tol: 1e-6,
        trunc_n: 3,
        seed: 7,
        trials: 4,
    };
    let result = match kind {
        "thm51" => run_thm51(len, p1 as usize, &cfg)
            .and_then(|o| Ok(serde_json::to_value(&o)?)),
        "gauss1" => run_gaussian_example(1, p1, p2, &cfg)
            .and_then(|o| Ok(serde_json::to_value(&o)?)),
        "gauss2" => run_gaussian_example(2, p1, p2, &cfg)
            .and_then(|o| Ok(serde_json::to_value(&o)?)),
        "notident" => run_notident(p1, p2, &cfg).and_then(|o| Ok(serde_json::to_value(&o)?)),
        other => Err(opident_core::Error::InvalidParams(format!(
            "unknown scenario '{other}'"
        ))),
    };
    match result {
        Ok(v) => v.to_string(),
        Err(e) => format!("{{\"error\":{}}}", serde_json::json!(e.to_string())),
    }
}

/// Heatmap panel: |η_{H_λ}| of a catalog operator under the four-parameter
/// shift λ = (s, ω, z, y), as row-major RGBA pixels of size len×len.
/// `kind` is "gauss" or "box" (box support a = b = len/4).
#[wasm_bindgen]
pub fn spreading_heatmap(kind: &str, len: usize, s: i32, w: i32, z: i32, y: i32) -> Vec<u8> {
    spreading_heatmap_impl(kind, len, s, w, z, y).unwrap_or_default()
}

fn spreading_heatmap_impl(
    kind: &str,
    len: usize,
    s: i32,
    w: i32,
    z: i32,
    y: i32,
) -> opident_core::Result<Vec<u8>> {
    if len == 0 || len > 256 {
        return Err(opident_core::Error::InvalidParams(
            "len must be in 1..=256".into(),
        ));
    }
    let h0 = match kind {
        "box" => make_h0(
            len,
            &H0Kind::OpwBox {
                a: (len / 4).max(1),
                b: (len / 4).max(1),
            },
        )?,
        _ => make_h0(len, &H0Kind::GaussKernel)?,
    };
    let lam = Lambda4::new(s as i64, w as i64, z as i64, y as i64, len);
    let table = shift_spreading(h0.spreading(), lam);
    let vmax = table.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
    let mut pixels = Vec::with_capacity(len * len * 4);
    // Row = ν (flipped so frequency grows upward), column = t.
    for row in 0..len {
        let nu = len - 1 - row;
        for t in 0..len {
            let v = table[(t, nu)].norm();
            let rel = if vmax > 0.0 { (v / vmax).sqrt() } else { 0.0 };
            let [r, g, b] = viridis(rel);
            pixels.extend_from_slice(&[r, g, b, 255]);
        }
    }
    Ok(pixels)
}

/// Small viridis-like colormap on [0, 1].
fn viridis(t: f64) -> [u8; 3] {
    const STOPS: [[f64; 3]; 5] = [
        [0.267, 0.005, 0.329],
        [0.229, 0.322, 0.546],
        [0.127, 0.566, 0.551],
        [0.369, 0.789, 0.383],
        [0.993, 0.906, 0.144],
    ];
    let x = t.clamp(0.0, 1.0) * (STOPS.len() - 1) as f64;
    let i = (x.floor() as usize).min(STOPS.len() - 2);
    let f = x - i as f64;
    let mut out = [0u8; 3];
    for c in 0..3 {
        let v = STOPS[i][c] * (1.0 - f) + STOPS[i + 1][c] * f;
        out[c] = (v * 255.0).round() as u8;
    }
    out
}
