//! Browser demo bindings.
//!
//! Three interactive operations, each taking and returning JSON strings so
//! the page needs no generated types: explore a cyclic gate on a chosen
//! input state, watch the sorter route (or split) a single OAM value, and
//! synthesize a Fourier mesh for drawing. The `*_impl` functions are plain
//! Rust and unit-tested natively; the `#[wasm_bindgen]` wrappers only wrap
//! errors into `{"error": …}` objects.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

use oamx::element::Element;
use oamx::mesh::{butterfly_fourier, decompose_rectangular, fourier_matrix, Mesh};
use oamx::network::{Interferometer, Network, Variant};
use oamx::state::{CodingSubspace, PhotonState};
use oamx::verify::cyclic_oracle;
use oamx::window::max_abs_diff;

#[derive(Deserialize)]
struct GateRequest {
    d: usize,
    #[serde(default = "default_step")]
    p: u32,
    #[serde(default)]
    ell0: i64,
    #[serde(default = "default_variant")]
    variant: String,
    #[serde(default = "default_config")]
    config: String,
    input: InputSpec,
}

fn default_step() -> u32 {
    1
}

fn default_variant() -> String {
    "a".into()
}

fn default_config() -> String {
    "mz".into()
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum InputSpec {
    /// Coding ket number j (0-based).
    Basis { j: usize },
    /// Equal-weight superposition of all coding kets.
    Uniform,
    /// Explicit amplitudes on mode 0: [[ell, re, im], …].
    Custom { amps: Vec<(i64, f64, f64)> },
}

#[derive(Serialize)]
struct AmplitudeEntry {
    ell: i64,
    mode: usize,
    re: f64,
    im: f64,
    prob: f64,
    in_domain: bool,
}

#[derive(Serialize)]
struct ElementEntry {
    index: usize,
    label: String,
    folded_with: Option<usize>,
}

#[derive(Serialize)]
struct GateResponse {
    coding: Vec<i64>,
    elements: Vec<ElementEntry>,
    input: Vec<AmplitudeEntry>,
    output: Vec<AmplitudeEntry>,
    marginal: Vec<f64>,
    tally: oamx::network::ResourceTally,
    oracle_fidelity: f64,
    decoupling: f64,
}

fn amplitudes(state: &PhotonState, sub: &CodingSubspace) -> Vec<AmplitudeEntry> {
    state
        .iter()
        .map(|(label, amp)| AmplitudeEntry {
            ell: label.ell,
            mode: label.mode,
            re: amp.re,
            im: amp.im,
            prob: amp.norm_sqr(),
            in_domain: sub.contains(label.ell) && label.mode == 0,
        })
        .collect()
}

fn gate_demo_impl(request_json: &str) -> Result<GateResponse, String> {
    let req: GateRequest = serde_json::from_str(request_json).map_err(|e| e.to_string())?;
    let variant = match req.variant.as_str() {
        "a" => Variant::A,
        "b" => Variant::B,
        other => return Err(format!("unknown variant '{other}'")),
    };
    let config = match req.config.as_str() {
        "mz" => Interferometer::MachZehnder,
        "michelson" => Interferometer::Michelson,
        other => return Err(format!("unknown config '{other}'")),
    };
    let sub = CodingSubspace::new(req.d, req.p, req.ell0).map_err(|e| e.to_string())?;
    let net = Network::for_gate(&sub, variant, config).map_err(|e| e.to_string())?;

    let input = match req.input {
        InputSpec::Basis { j } => {
            if j >= req.d {
                return Err(format!("basis index {j} out of range for d={}", req.d));
            }
            PhotonState::basis_state(sub.values()[j], 0, req.d).map_err(|e| e.to_string())?
        }
        InputSpec::Uniform => {
            let amp = Complex64::new(1.0 / (req.d as f64).sqrt(), 0.0);
            let entries: Vec<(i64, usize, Complex64)> =
                sub.values().into_iter().map(|ell| (ell, 0, amp)).collect();
            PhotonState::superposition(req.d, &entries).map_err(|e| e.to_string())?
        }
        InputSpec::Custom { amps } => {
            let entries: Vec<(i64, usize, Complex64)> = amps
                .into_iter()
                .map(|(ell, re, im)| (ell, 0, Complex64::new(re, im)))
                .collect();
            PhotonState::superposition(req.d, &entries)
                .and_then(|s| s.normalized())
                .map_err(|e| e.to_string())?
        }
    };

    let output = net.apply(&input).map_err(|e| e.to_string())?.pruned();

    // Expected state under the defining cyclic map, for the fidelity badge.
    let oracle = cyclic_oracle(&sub);
    let mut expected_entries: Vec<(i64, usize, Complex64)> = Vec::new();
    for ell in sub.values() {
        let amp = input.amplitude(ell, 0);
        expected_entries.push((oracle[&ell], 0, amp));
    }
    let expected =
        PhotonState::superposition(req.d, &expected_entries).map_err(|e| e.to_string())?;
    let oracle_fidelity = if expected.norm_sqr() > 1e-12 {
        output.fidelity(&expected).map_err(|e| e.to_string())?
    } else {
        0.0
    };

    let folded: std::collections::BTreeMap<usize, usize> = net
        .folded_reuse()
        .iter()
        .map(|&(fwd, ret)| (ret, fwd))
        .collect();
    let elements = net
        .elements()
        .iter()
        .enumerate()
        .map(|(index, e)| ElementEntry {
            index,
            label: e.label(),
            folded_with: folded.get(&index).copied(),
        })
        .collect();

    let marginal = output.mode_marginal();
    let decoupling = marginal[0];
    Ok(GateResponse {
        coding: sub.values(),
        elements,
        input: amplitudes(&input, &sub),
        output: amplitudes(&output, &sub),
        marginal,
        tally: net.tally(),
        oracle_fidelity,
        decoupling,
    })
}

#[derive(Serialize)]
struct SorterResponse {
    d: usize,
    p: u32,
    ell: i64,
    input_mode: usize,
    /// Probability per output mode.
    mode_probabilities: Vec<f64>,
    /// True when the value routes onto a single mode.
    clean: bool,
    /// The mode it routes to when clean.
    routed_mode: Option<usize>,
}

fn sorter_demo_impl(d: usize, p: u32, ell: i64, input_mode: usize) -> Result<SorterResponse, String> {
    let net = Network::sorter(d, p, false).map_err(|e| e.to_string())?;
    let input = PhotonState::basis_state(ell, input_mode, d).map_err(|e| e.to_string())?;
    let out = net.apply(&input).map_err(|e| e.to_string())?.pruned();
    let mode_probabilities = out.mode_marginal();
    let mut routed_mode = None;
    for (mode, &prob) in mode_probabilities.iter().enumerate() {
        if prob > 1.0 - 1e-9 {
            routed_mode = Some(mode);
        }
    }
    Ok(SorterResponse {
        d,
        p,
        ell,
        input_mode,
        mode_probabilities,
        clean: routed_mode.is_some(),
        routed_mode,
    })
}

#[derive(Serialize)]
struct MeshOpEntry {
    kind: &'static str,
    a: usize,
    b: usize,
    theta: f64,
    phi: f64,
    /// Drawing column (greedy per-mode depth).
    col: usize,
}

#[derive(Serialize)]
struct MeshResponse {
    d: usize,
    scheme: String,
    beamsplitters: usize,
    phase_shifters: usize,
    stages: usize,
    residual: f64,
    columns: usize,
    permutation: Vec<usize>,
    ops: Vec<MeshOpEntry>,
    output_phases: Vec<f64>,
}

fn mesh_layout(mesh: &Mesh, scheme: &str, residual: f64) -> MeshResponse {
    let mut depth = vec![0usize; mesh.d()];
    let mut ops = Vec::new();
    for layer in mesh.layers() {
        match *layer {
            Element::BeamSplitter {
                mode_a,
                mode_b,
                theta,
                phi,
            } => {
                let col = depth[mode_a].max(depth[mode_b]);
                for slot in &mut depth[mode_a.min(mode_b)..=mode_a.max(mode_b)] {
                    *slot = col + 1;
                }
                ops.push(MeshOpEntry {
                    kind: "bs",
                    a: mode_a,
                    b: mode_b,
                    theta,
                    phi,
                    col,
                });
            }
            Element::ModePhase { mode, phi } => {
                let col = depth[mode];
                depth[mode] = col + 1;
                ops.push(MeshOpEntry {
                    kind: "phase",
                    a: mode,
                    b: mode,
                    theta: 0.0,
                    phi,
                    col,
                });
            }
            _ => {}
        }
    }
    MeshResponse {
        d: mesh.d(),
        scheme: scheme.to_string(),
        beamsplitters: mesh.beamsplitter_count(),
        phase_shifters: mesh.phase_shifter_count(),
        stages: mesh.stages(),
        residual,
        columns: depth.into_iter().max().unwrap_or(0),
        permutation: mesh.input_permutation().to_vec(),
        ops,
        output_phases: mesh.output_phases().to_vec(),
    }
}

fn mesh_demo_impl(d: usize, scheme: &str) -> Result<MeshResponse, String> {
    let target = fourier_matrix(d, false);
    let mesh = match scheme {
        "rectangular" => decompose_rectangular(target.view()).map_err(|e| e.to_string())?,
        "butterfly" => butterfly_fourier(d).map_err(|e| e.to_string())?,
        other => return Err(format!("unknown scheme '{other}'")),
    };
    let residual = max_abs_diff(mesh.matrix().view(), target.view());
    Ok(mesh_layout(&mesh, scheme, residual))
}

fn to_json<T: Serialize>(result: Result<T, String>) -> String {
    match result {
        Ok(value) => serde_json::to_string(&value).expect("response serializes"),
        Err(message) => serde_json::to_string(&serde_json::json!({ "error": message }))
            .expect("error serializes"),
    }
}

/// Build a cyclic gate, apply it to the requested input, and return the
/// element chain, amplitude tables, marginals and resource tally.
#[wasm_bindgen]
pub fn gate_demo(request_json: &str) -> String {
    to_json(gate_demo_impl(request_json))
}

/// Route a single OAM value through the step-p sorter.
#[wasm_bindgen]
pub fn sorter_demo(d: usize, p: u32, ell: i64, input_mode: usize) -> String {
    to_json(sorter_demo_impl(d, p, ell, input_mode))
}

/// Synthesize a Fourier-gate mesh and return its drawable layout.
#[wasm_bindgen]
pub fn mesh_demo(d: usize, scheme: &str) -> String {
    to_json(mesh_demo_impl(d, scheme))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gate_demo_basis_input() {
        let response = gate_demo_impl(
            r#"{"d": 3, "p": 1, "ell0": 0, "variant": "a", "config": "mz",
                "input": {"kind": "basis", "j": 2}}"#,
        )
        .unwrap();
        assert_eq!(response.coding, vec![0, 1, 2]);
        assert_eq!(response.output.len(), 1);
        assert_eq!(response.output[0].ell, 0);
        assert!(response.oracle_fidelity >= 1.0 - 1e-10);
        assert!(response.decoupling >= 1.0 - 1e-10);
        assert_eq!(response.tally.fourier_count, 4);
    }

    #[test]
    fn gate_demo_michelson_marks_folds() {
        let response = gate_demo_impl(
            r#"{"d": 3, "p": 2, "ell0": 1, "variant": "b", "config": "michelson",
                "input": {"kind": "uniform"}}"#,
        )
        .unwrap();
        assert!(response.elements.iter().any(|e| e.folded_with.is_some()));
        assert_eq!(response.tally.sorter_count, 1);
        assert!(response.oracle_fidelity >= 1.0 - 1e-10);
    }

    #[test]
    fn gate_demo_rejects_bad_requests() {
        assert!(gate_demo_impl("{}").is_err());
        assert!(gate_demo_impl(
            r#"{"d": 3, "variant": "z", "input": {"kind": "uniform"}}"#
        )
        .is_err());
        assert!(gate_demo_impl(
            r#"{"d": 3, "input": {"kind": "basis", "j": 7}}"#
        )
        .is_err());
        // Wrappers turn errors into an error object, not a panic.
        let wrapped = gate_demo("{}");
        assert!(wrapped.contains("\"error\""));
    }

    #[test]
    fn sorter_demo_routes_and_splits() {
        let clean = sorter_demo_impl(3, 1, 4, 0).unwrap();
        assert!(clean.clean);
        assert_eq!(clean.routed_mode, Some(1));

        let split = sorter_demo_impl(2, 2, 1, 0).unwrap();
        assert!(!split.clean);
        assert!((split.mode_probabilities[0] - 0.5).abs() < 1e-12);
        assert!((split.mode_probabilities[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn mesh_demo_layouts() {
        let rect = mesh_demo_impl(4, "rectangular").unwrap();
        assert_eq!(rect.beamsplitters, 6);
        assert!(rect.residual <= 1e-9);
        assert!(rect.columns >= 3);

        let butterfly = mesh_demo_impl(8, "butterfly").unwrap();
        assert_eq!(butterfly.beamsplitters, 12);
        assert_eq!(butterfly.stages, 3);
        assert_eq!(butterfly.permutation, vec![0, 4, 2, 6, 1, 5, 3, 7]);
        assert!(mesh_demo_impl(6, "butterfly").is_err());
    }
}
