//! Browser bindings for the demo page in `www/`.
//!
//! Each exported function takes plain strings and numbers and returns a JSON
//! string. The `*_json` functions carry the logic and are testable natively.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use surfmod::free_words::{fox_derivative, verify_fox_identity, Word};
use surfmod::reduction_models::{self as rm, HilbertImage, LinearMomentumModel, ModelKind};
use surfmod::rep_cohomology::{
    build_complex, classify_orbit_type, relator_defect, stabilizer_fixed_subspace,
    stabilizer_generators, RepDocument, RepSource, Tolerances,
};

fn to_js(r: Result<Value, String>) -> Result<String, JsValue> {
    r.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e))
}

pub fn fox_json(word: &str, n: usize) -> Result<Value, String> {
    let w = Word::parse(word, n).map_err(|e| e.to_string())?;
    let derivatives = (0..n)
        .map(|j| fox_derivative(&w, j, n).map(|d| d.to_string()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    Ok(json!({
        "word": w.to_string(),
        "derivatives": derivatives,
        "fundamental_identity": verify_fox_identity(&w),
    }))
}

pub fn cohomology_json(group: &str, genus: usize, central: &str, rep: &str) -> Result<Value, String> {
    let doc = RepDocument {
        group: group.to_string(),
        genus,
        central: central.to_string(),
        rep: RepSource::Named(rep.to_string()),
    };
    let r = doc.resolve().map_err(|e| e.to_string())?;
    let tol = Tolerances::default();
    let defect = relator_defect(&r.presentation, &r.rep, &r.class);
    let cd = build_complex(&r.presentation, &r.rep, &tol);
    let orbit = classify_orbit_type(&r.rep, tol.rank());
    let gens = stabilizer_generators(&r.rep, tol.rank());
    let stratum_dim = stabilizer_fixed_subspace(&r.presentation, &r.rep, &gens, &tol).ok();
    Ok(json!({
        "relator_defect": defect,
        "on_variety": defect < tol.defect_tol,
        "h_dims": [cd.h_dims.h0, cd.h_dims.h1, cd.h_dims.h2],
        "duality": cd.duality_holds(genus),
        "stabilizer_dim": orbit.stabilizer_dim,
        "stratum": orbit.label,
        "stratum_dim": stratum_dim,
    }))
}

pub fn reduction_json(model: &str, count: usize, seed: u64) -> Result<Value, String> {
    let kind = ModelKind::parse(model).map_err(|e| e.to_string())?;
    let m = LinearMomentumModel::new(kind);
    let points = m.sample_zero_locus(count, seed);
    let zariski = rm::zariski_dim_at_origin(&m, &points).map_err(|e| e.to_string())?;
    let max_residual = points
        .iter()
        .map(|p| m.check_relations(p).max())
        .fold(0.0, f64::max);
    let images: Vec<Vec<f64>> = points.iter().map(|p| m.hilbert_map(&p.w).coordinates()).collect();
    let strata: Vec<String> = points
        .iter()
        .filter_map(|p| match m.hilbert_map(&p.w) {
            HilbertImage::Gram(l) => Some(rm::psd_rank_stratum(&l).to_string()),
            HilbertImage::Cone { .. } => None,
        })
        .collect();
    Ok(json!({
        "model": kind.to_string(),
        "zariski_dim": zariski,
        "max_relation_residual": max_residual,
        "images": images,
        "strata": strata,
    }))
}

/// Fox derivatives of `word` in `n` generators.
#[wasm_bindgen]
pub fn fox(word: &str, n: usize) -> Result<String, JsValue> {
    to_js(fox_json(word, n))
}

/// Cohomology dimensions and orbit type at a named representation.
#[wasm_bindgen]
pub fn cohomology(group: &str, genus: usize, central: &str, rep: &str) -> Result<String, JsValue> {
    to_js(cohomology_json(group, genus, central, rep))
}

/// Hilbert images of zero-locus samples of the `so2` or `so3` model.
#[wasm_bindgen]
pub fn reduction(model: &str, count: usize, seed: u32) -> Result<String, JsValue> {
    to_js(reduction_json(model, count, seed as u64))
}
