//! Browser bindings. Each export wraps a plain function returning JSON so the
//! numerics are testable natively.

use std::sync::Arc;

use compact_fourier::fourier::dirac_net_element;
use compact_fourier::io::FunctionSpec;
use compact_fourier::norms::operator_norm;
use compact_fourier::pego::lemmas::NET_THRESHOLD;
use compact_fourier::pego::{
    default_mesh, diagnose_family, ContinuityOptions, DualFiltration, FamilyDefinition, FamilyKind,
};
use compact_fourier::{GroupDescriptor, Harmonics, NeighborhoodSpec, QuadratureRule};
use serde::Serialize;
use wasm_bindgen::prelude::*;

type Out = Result<String, String>;

fn text<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn js(r: Out) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[derive(Serialize)]
struct FamilyView {
    name: String,
    group: String,
    members: usize,
    shells: Vec<u32>,
    sup_tail: Vec<f64>,
    delta: Vec<f64>,
    omega: Vec<f64>,
    eps: f64,
    conclusion: String,
    decay_shell: Option<u32>,
    continuity_delta: Option<f64>,
}

/// Builds one of the preset families and returns its tail and modulus curves
/// with the verdict at `eps`.
pub fn explore_family(preset: &str, group: &str, count: usize, eps: f64) -> Out {
    let g: GroupDescriptor = group.parse().map_err(text)?;
    if !(eps > 0.0) {
        return Err("eps must be positive".into());
    }
    let count = count.clamp(1, 128);
    let kind = match preset {
        "constants" => FamilyKind::ScaledConstants { r: 1.0, count },
        "integers" => FamilyKind::IntegerConstants { count },
        "span" => FamilyKind::MatrixEntrySpan {
            max_shell: 2,
            bound: 1.0,
            count,
        },
        "heat" => {
            let t_min = if matches!(g, GroupDescriptor::Torus(_)) {
                0.05
            } else {
                0.2
            };
            FamilyKind::HeatKernel {
                t_min,
                t_max: 2.0,
                count,
            }
        }
        "ladder" => FamilyKind::CharacterLadder { count },
        other => return Err(format!("unknown preset {other}")),
    };
    let k = FamilyDefinition::new(preset, g, kind).build().map_err(text)?;
    let filtration = DualFiltration::for_family(&k);
    let mesh = default_mesh(k.group(), &[eps], k.cutoff());
    let d = diagnose_family(&k, &[eps], &filtration, &mesh, &ContinuityOptions::default()).map_err(text)?;
    let v = &d.verdicts[0];
    let view = FamilyView {
        name: k.name().to_string(),
        group: k.group().to_string(),
        members: k.members().len(),
        shells: d.decay.steps.iter().map(|s| s.shell).collect(),
        sup_tail: d.decay.steps.iter().map(|s| s.sup_tail).collect(),
        delta: d.continuity.mesh.clone(),
        omega: d.continuity.omega.clone(),
        eps,
        conclusion: serde_json::to_value(v.conclusion)
            .map_err(text)?
            .as_str()
            .unwrap_or_default()
            .to_string(),
        decay_shell: v.uniform_decay.witness_shell,
        continuity_delta: v.equicontinuous.witness_delta,
    };
    serde_json::to_string(&view).map_err(text)
}

#[derive(Serialize)]
struct DiracView {
    group: String,
    threshold: f64,
    labels: Vec<String>,
    delta: Vec<f64>,
    /// `||e_U^(pi)||_op`, one row per radius; `null` rows are empty balls.
    norms: Vec<Option<Vec<f64>>>,
}

/// Operator norms of the approximate-identity spectrum as the ball shrinks.
pub fn dirac_spectrum(group: &str, band: u32, steps: usize) -> Out {
    let g: GroupDescriptor = group.parse().map_err(text)?;
    let rule = Arc::new(QuadratureRule::for_band(&g, band.min(24)).map_err(text)?);
    let h = Harmonics::full(rule.clone()).map_err(text)?;
    let steps = steps.clamp(2, 64);
    let top = g.diameter();
    let delta: Vec<f64> = (0..steps).map(|i| top * (1.0 - i as f64 / steps as f64)).collect();
    let mut norms = Vec::with_capacity(steps);
    for d in &delta {
        let spec = NeighborhoodSpec::new(*d, 1, 0).map_err(text)?;
        norms.push(match dirac_net_element(&rule, &spec) {
            Ok(e) => Some(
                h.forward(&e)
                    .map_err(text)?
                    .blocks()
                    .iter()
                    .map(operator_norm)
                    .collect(),
            ),
            Err(compact_fourier::Error::EmptyBall(_)) => None,
            Err(e) => return Err(e.to_string()),
        });
    }
    serde_json::to_string(&DiracView {
        group: g.to_string(),
        threshold: NET_THRESHOLD,
        labels: h.labels().iter().map(|l| l.to_string()).collect(),
        delta,
        norms,
    })
    .map_err(text)
}

#[derive(Serialize)]
struct Heatmap {
    label: String,
    dim: usize,
    /// Row-major `|f^(pi)_ij|`.
    magnitude: Vec<f64>,
}

/// Entry magnitudes of every coefficient block of `function`.
pub fn coefficient_heatmap(group: &str, band: u32, function: &str) -> Out {
    let g: GroupDescriptor = group.parse().map_err(text)?;
    let spec = FunctionSpec::parse(&g, function).map_err(text)?;
    if matches!(spec, FunctionSpec::File(_)) {
        return Err("files are not available in the browser".into());
    }
    let band = band.max(spec.shell().unwrap_or(0)).min(24);
    let rule = Arc::new(QuadratureRule::for_band(&g, band).map_err(text)?);
    let h = Harmonics::full(rule).map_err(text)?;
    let c = h.forward(&spec.sample(&h).map_err(text)?).map_err(text)?;
    let maps: Vec<Heatmap> = c
        .iter()
        .map(|(l, b)| Heatmap {
            label: l.to_string(),
            dim: l.dim(),
            magnitude: b.transpose().iter().map(|z| z.norm()).collect(),
        })
        .collect();
    serde_json::to_string(&maps).map_err(text)
}

#[wasm_bindgen(js_name = exploreFamily)]
pub fn explore_family_js(preset: &str, group: &str, count: usize, eps: f64) -> Result<String, JsValue> {
    js(explore_family(preset, group, count, eps))
}

#[wasm_bindgen(js_name = diracSpectrum)]
pub fn dirac_spectrum_js(group: &str, band: u32, steps: usize) -> Result<String, JsValue> {
    js(dirac_spectrum(group, band, steps))
}

#[wasm_bindgen(js_name = coefficientHeatmap)]
pub fn coefficient_heatmap_js(group: &str, band: u32, function: &str) -> Result<String, JsValue> {
    js(coefficient_heatmap(group, band, function))
}
