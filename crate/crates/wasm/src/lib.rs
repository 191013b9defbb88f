//! Browser bindings for the interactive demo page.
//!
//! Every entry point takes a system document (JSON string) and returns JSON;
//! failures come back as `{"error": "..."}` so the page can surface them
//! without exceptions crossing the boundary.

use dirac_bvp::asymptotics::sector_model;
use dirac_bvp::json::{parse_beam, parse_system, system_to_json};
use dirac_bvp::linalg::{c64, ScaledC64, I};
use dirac_bvp::propagator::{char_determinant_scaled, StepControl};
use dirac_bvp::sectors::{build_t, compute_fan};
use dirac_bvp::spectrum::{locate_eigenvalues, Region};
use dirac_bvp::timoshenko::reduce_to_dirac;
use wasm_bindgen::prelude::wasm_bindgen;

fn err_json(msg: impl std::fmt::Display) -> String {
    serde_json::json!({ "error": msg.to_string() }).to_string()
}

/// Separating lines, sectors, sign patterns, and det T per sector.
#[wasm_bindgen]
pub fn fan_json(system: &str) -> String {
    let bvp = match parse_system(system) {
        Ok(b) => b,
        Err(e) => return err_json(e),
    };
    let fan = match compute_fan(&bvp.weight) {
        Ok(f) => f,
        Err(e) => return err_json(e),
    };
    let sectors: Vec<serde_json::Value> = fan
        .sectors
        .iter()
        .map(|s| {
            let det = build_t(s.representative, &bvp.boundary.c, &bvp.boundary.d, &bvp.weight)
                .map(|t| t.det())
                .ok();
            serde_json::json!({
                "index": s.index,
                "phi_start": s.phi_start,
                "phi_end": s.phi_end,
                "signs": s.signs,
                "det_T": det.map(|d| serde_json::json!({"re": d.re, "im": d.im})),
                "abs_det_T": det.map(|d| d.norm()).unwrap_or(f64::NAN),
            })
        })
        .collect();
    serde_json::json!({ "lines": fan.lines, "sectors": sectors }).to_string()
}

/// Characteristic determinant on an nx x ny grid over the rectangle.
/// Returns flat row-major arrays of ln|Delta| and arg(Delta) for domain
/// coloring; `scaled` divides out the sector envelope so deep-field
/// features stay visible.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn detscan_json(
    system: &str,
    re0: f64,
    re1: f64,
    im0: f64,
    im1: f64,
    nx: usize,
    ny: usize,
    scaled: bool,
) -> String {
    let bvp = match parse_system(system) {
        Ok(b) => b,
        Err(e) => return err_json(e),
    };
    if nx < 2 || ny < 2 || nx * ny > 1 << 20 {
        return err_json("grid must be at least 2x2 and at most 2^20 points");
    }
    let ctrl = StepControl::default();
    let fan = match compute_fan(&bvp.weight) {
        Ok(f) => f,
        Err(e) => return err_json(e),
    };
    let models: Result<Vec<_>, _> = fan.sectors.iter().map(|s| sector_model(&bvp, s)).collect();
    let models = match models {
        Ok(m) => m,
        Err(e) => return err_json(e),
    };
    let mut ln_abs = Vec::with_capacity(nx * ny);
    let mut phase = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let lam = c64(
                re0 + (re1 - re0) * i as f64 / (nx - 1) as f64,
                im0 + (im1 - im0) * j as f64 / (ny - 1) as f64,
            );
            let value = match char_determinant_scaled(&bvp, lam, &ctrl) {
                Ok(raw) => {
                    if scaled {
                        match fan.sector_of(lam) {
                            Some(sector) => {
                                let m = &models[sector.index];
                                let ginv = ScaledC64::from_c64(c64(1.0, 0.0))
                                    .div(ScaledC64::from_c64(m.gamma));
                                raw.mul_exp(-I * m.tau * lam).mul(ginv)
                            }
                            None => raw,
                        }
                    } else {
                        raw
                    }
                }
                Err(e) => return err_json(e),
            };
            ln_abs.push(value.ln_abs());
            phase.push(value.mantissa.arg());
        }
    }
    serde_json::json!({
        "nx": nx, "ny": ny,
        "re0": re0, "re1": re1, "im0": im0, "im1": im1,
        "ln_abs": ln_abs,
        "phase": phase,
    })
    .to_string()
}

/// Eigenvalues with multiplicities inside the rectangle.
#[wasm_bindgen]
pub fn spectrum_json(system: &str, re0: f64, re1: f64, im0: f64, im1: f64, tol: f64) -> String {
    let bvp = match parse_system(system) {
        Ok(b) => b,
        Err(e) => return err_json(e),
    };
    let region = Region::new(re0, re1, im0, im1);
    match locate_eigenvalues(&bvp, &region, tol.max(1e-12), &StepControl::default()) {
        Ok(slice) => serde_json::json!({
            "total_count": slice.total_count,
            "eigenvalues": slice.eigenvalues.iter().map(|e| serde_json::json!({
                "re": e.value.re, "im": e.value.im, "multiplicity": e.multiplicity,
            })).collect::<Vec<_>>(),
        })
        .to_string(),
        Err(e) => err_json(e),
    }
}

/// Reduce a Timoshenko beam document to its 4x4 system document.
#[wasm_bindgen]
pub fn reduce_beam_json(beam: &str) -> String {
    let beam = match parse_beam(beam) {
        Ok(b) => b,
        Err(e) => return err_json(e),
    };
    match reduce_to_dirac(&beam) {
        Ok(red) => system_to_json(&red.dirac),
        Err(e) => err_json(e),
    }
}
