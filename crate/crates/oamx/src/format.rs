//! Machine-readable file formats.
//!
//! * Component lists: one JSON document per network or mesh — an ordered
//!   array of `{type, params, modes, folded_with?}` entries plus a device
//!   tally and metadata. Lossless: a list re-parses to an equivalent
//!   network/mesh.
//! * Report files: line-oriented JSON — a header line, one report per sweep
//!   point, and a summary line. Serialization is byte-deterministic for
//!   fixed inputs.
//! * Sweep grids and input states: small JSON documents described below.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::element::Element;
use crate::error::{Error, Result};
use crate::mesh::{Mesh, MeshScheme};
use crate::network::{Interferometer, Network, NetworkKind, ResourceTally, SorterSpan, Variant};
use crate::state::PhotonState;
use crate::state::CodingSubspace;
use crate::verify::{GatePoint, VerificationReport};

pub const FORMAT_VERSION: u32 = 1;

fn format_err<T: std::fmt::Display>(e: T) -> Error {
    Error::Format(e.to_string())
}

/// One element of a component list.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComponentEntry {
    #[serde(rename = "type")]
    pub kind: String,
    pub params: Map<String, Value>,
    pub modes: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub folded_with: Option<usize>,
}

fn entry_params(pairs: &[(&str, Value)]) -> Map<String, Value> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

pub fn element_to_entry(e: &Element, folded_with: Option<usize>) -> ComponentEntry {
    let (kind, params, modes) = match e {
        Element::Spp {
            order,
            control_mode,
        } => {
            let mut params = entry_params(&[("order", Value::from(*order))]);
            let mut modes = Vec::new();
            if let Some(m) = control_mode {
                params.insert("control_mode".into(), Value::from(*m));
                modes.push(*m);
            }
            ("spp", params, modes)
        }
        Element::DovePhase { d, power } => (
            "dove_phase",
            entry_params(&[
                ("d", Value::from(*d)),
                ("power_num", Value::from(*power.numer())),
                ("power_den", Value::from(*power.denom())),
            ]),
            Vec::new(),
        ),
        Element::ModeFourier { d, inverse } => (
            "mode_fourier",
            entry_params(&[("d", Value::from(*d)), ("inverse", Value::from(*inverse))]),
            Vec::new(),
        ),
        Element::SorterPhases { d, step, inverse } => (
            "sorter_phases",
            entry_params(&[
                ("d", Value::from(*d)),
                ("step", Value::from(*step)),
                ("inverse", Value::from(*inverse)),
            ]),
            Vec::new(),
        ),
        Element::BeamSplitter {
            mode_a,
            mode_b,
            theta,
            phi,
        } => (
            "beamsplitter",
            entry_params(&[("theta", Value::from(*theta)), ("phi", Value::from(*phi))]),
            vec![*mode_a, *mode_b],
        ),
        Element::ModePhase { mode, phi } => (
            "mode_phase",
            entry_params(&[("phi", Value::from(*phi))]),
            vec![*mode],
        ),
        Element::RetroReflector { mode } => ("retroreflector", Map::new(), vec![*mode]),
        Element::Circulator => ("circulator", Map::new(), Vec::new()),
    };
    ComponentEntry {
        kind: kind.to_string(),
        params,
        modes,
        folded_with,
    }
}

fn param_i64(params: &Map<String, Value>, key: &str) -> Result<i64> {
    params
        .get(key)
        .and_then(Value::as_i64)
        .ok_or_else(|| Error::Format(format!("missing integer parameter '{key}'")))
}

fn param_u64(params: &Map<String, Value>, key: &str) -> Result<u64> {
    params
        .get(key)
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Format(format!("missing nonnegative parameter '{key}'")))
}

fn param_f64(params: &Map<String, Value>, key: &str) -> Result<f64> {
    params
        .get(key)
        .and_then(Value::as_f64)
        .ok_or_else(|| Error::Format(format!("missing numeric parameter '{key}'")))
}

fn param_bool(params: &Map<String, Value>, key: &str) -> Result<bool> {
    params
        .get(key)
        .and_then(Value::as_bool)
        .ok_or_else(|| Error::Format(format!("missing boolean parameter '{key}'")))
}

pub fn entry_to_element(entry: &ComponentEntry) -> Result<Element> {
    let p = &entry.params;
    match entry.kind.as_str() {
        "spp" => {
            let order = param_i64(p, "order")?;
            let control_mode = match p.get("control_mode") {
                Some(v) => Some(v.as_u64().ok_or_else(|| {
                    Error::Format("control_mode must be a nonnegative integer".into())
                })? as usize),
                None => None,
            };
            Ok(Element::Spp {
                order,
                control_mode,
            })
        }
        "dove_phase" => Ok(Element::DovePhase {
            d: param_u64(p, "d")? as usize,
            power: Ratio::new(param_i64(p, "power_num")?, param_i64(p, "power_den")?),
        }),
        "mode_fourier" => Ok(Element::ModeFourier {
            d: param_u64(p, "d")? as usize,
            inverse: param_bool(p, "inverse")?,
        }),
        "sorter_phases" => Ok(Element::SorterPhases {
            d: param_u64(p, "d")? as usize,
            step: param_u64(p, "step")? as u32,
            inverse: param_bool(p, "inverse")?,
        }),
        "beamsplitter" => {
            if entry.modes.len() != 2 {
                return Err(Error::Format("beamsplitter needs two modes".into()));
            }
            Element::beam_splitter(
                entry.modes[0],
                entry.modes[1],
                param_f64(p, "theta")?,
                param_f64(p, "phi")?,
            )
        }
        "mode_phase" => {
            if entry.modes.len() != 1 {
                return Err(Error::Format("mode_phase needs one mode".into()));
            }
            Ok(Element::mode_phase(entry.modes[0], param_f64(p, "phi")?))
        }
        "retroreflector" => {
            if entry.modes.len() != 1 {
                return Err(Error::Format("retroreflector needs one mode".into()));
            }
            Ok(Element::RetroReflector {
                mode: entry.modes[0],
            })
        }
        "circulator" => Ok(Element::Circulator),
        other => Err(Error::Format(format!("unknown element type '{other}'"))),
    }
}

/// Serialized form of a network or mesh.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComponentList {
    pub format_version: u32,
    /// "network" or "mesh".
    pub kind: String,
    pub d: usize,
    pub meta: Map<String, Value>,
    pub elements: Vec<ComponentEntry>,
    pub tally: ResourceTally,
}

impl ComponentList {
    pub fn from_network(net: &Network) -> Self {
        let mut folded: std::collections::BTreeMap<usize, usize> = Default::default();
        for &(fwd, ret) in net.folded_reuse() {
            folded.insert(ret, fwd);
        }
        let elements = net
            .elements()
            .iter()
            .enumerate()
            .map(|(i, e)| element_to_entry(e, folded.get(&i).copied()))
            .collect();
        let mut meta = Map::new();
        meta.insert(
            "network_kind".into(),
            serde_json::to_value(net.kind()).expect("enum serializes"),
        );
        meta.insert(
            "config".into(),
            serde_json::to_value(net.config()).expect("enum serializes"),
        );
        if let Some(v) = net.variant() {
            meta.insert("variant".into(), serde_json::to_value(v).expect("enum"));
        }
        if let Some(sub) = net.subspace() {
            meta.insert(
                "subspace".into(),
                serde_json::to_value(sub).expect("subspace serializes"),
            );
        }
        meta.insert(
            "sorter_spans".into(),
            serde_json::to_value(net.sorter_spans()).expect("spans serialize"),
        );
        ComponentList {
            format_version: FORMAT_VERSION,
            kind: "network".into(),
            d: net.d(),
            meta,
            elements,
            tally: net.tally(),
        }
    }

    pub fn to_network(&self) -> Result<Network> {
        if self.kind != "network" {
            return Err(Error::Format(format!(
                "expected a network component list, got '{}'",
                self.kind
            )));
        }
        let mut elements = Vec::with_capacity(self.elements.len());
        let mut folded = Vec::new();
        for (i, entry) in self.elements.iter().enumerate() {
            elements.push(entry_to_element(entry)?);
            if let Some(fwd) = entry.folded_with {
                folded.push((fwd, i));
            }
        }
        let kind: NetworkKind = match self.meta.get("network_kind") {
            Some(v) => serde_json::from_value(v.clone()).map_err(format_err)?,
            None => NetworkKind::Custom,
        };
        let config: Interferometer = match self.meta.get("config") {
            Some(v) => serde_json::from_value(v.clone()).map_err(format_err)?,
            None => Interferometer::MachZehnder,
        };
        let variant: Option<Variant> = match self.meta.get("variant") {
            Some(v) => Some(serde_json::from_value(v.clone()).map_err(format_err)?),
            None => None,
        };
        let subspace: Option<CodingSubspace> = match self.meta.get("subspace") {
            Some(v) => Some(serde_json::from_value(v.clone()).map_err(format_err)?),
            None => None,
        };
        let spans: Vec<SorterSpan> = match self.meta.get("sorter_spans") {
            Some(v) => serde_json::from_value(v.clone()).map_err(format_err)?,
            None => Vec::new(),
        };
        Network::with_parts(self.d, elements, kind, config, variant, subspace, folded, spans)
    }

    pub fn from_mesh(mesh: &Mesh, reconstruction_residual: Option<f64>) -> Self {
        let elements = mesh
            .layers()
            .iter()
            .map(|e| element_to_entry(e, None))
            .collect();
        let mut meta = Map::new();
        meta.insert(
            "scheme".into(),
            serde_json::to_value(mesh.scheme()).expect("enum serializes"),
        );
        meta.insert(
            "input_permutation".into(),
            serde_json::to_value(mesh.input_permutation()).expect("serializes"),
        );
        meta.insert(
            "output_phases".into(),
            serde_json::to_value(mesh.output_phases()).expect("serializes"),
        );
        meta.insert("stages".into(), Value::from(mesh.stages()));
        if let Some(r) = reconstruction_residual {
            meta.insert("reconstruction_residual".into(), Value::from(r));
        }
        let tally = ResourceTally {
            beamsplitter_count: mesh.beamsplitter_count(),
            mode_phase_count: mesh.phase_shifter_count(),
            ..Default::default()
        };
        ComponentList {
            format_version: FORMAT_VERSION,
            kind: "mesh".into(),
            d: mesh.d(),
            meta,
            elements,
            tally,
        }
    }

    pub fn to_mesh(&self) -> Result<Mesh> {
        if self.kind != "mesh" {
            return Err(Error::Format(format!(
                "expected a mesh component list, got '{}'",
                self.kind
            )));
        }
        let layers = self
            .elements
            .iter()
            .map(entry_to_element)
            .collect::<Result<Vec<_>>>()?;
        let scheme: MeshScheme = match self.meta.get("scheme") {
            Some(v) => serde_json::from_value(v.clone()).map_err(format_err)?,
            None => MeshScheme::Rectangular,
        };
        let permutation: Vec<usize> = match self.meta.get("input_permutation") {
            Some(v) => serde_json::from_value(v.clone()).map_err(format_err)?,
            None => (0..self.d).collect(),
        };
        let phases: Vec<f64> = match self.meta.get("output_phases") {
            Some(v) => serde_json::from_value(v.clone()).map_err(format_err)?,
            None => vec![0.0; self.d],
        };
        let stages = self
            .meta
            .get("stages")
            .and_then(Value::as_u64)
            .unwrap_or(self.d as u64) as usize;
        Mesh::from_parts(self.d, scheme, permutation, layers, phases, stages)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("component list serializes")
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(format_err)
    }
}

/// First line of a report file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportHeader {
    pub format_version: u32,
    pub tol: f64,
    pub trials: usize,
    pub seed: u64,
    pub points: usize,
}

/// Last line of a report file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportSummary {
    pub all_passed: bool,
    pub failed_points: usize,
}

/// Line-oriented report file: header, one report per line, summary.
pub fn write_report_file(header: &ReportHeader, reports: &[VerificationReport]) -> String {
    let mut out = String::new();
    out.push_str(&serde_json::to_string(header).expect("header serializes"));
    out.push('\n');
    for report in reports {
        out.push_str(&serde_json::to_string(report).expect("report serializes"));
        out.push('\n');
    }
    let summary = ReportSummary {
        all_passed: reports.iter().all(|r| r.passed),
        failed_points: reports.iter().filter(|r| !r.passed).count(),
    };
    out.push_str(&serde_json::to_string(&summary).expect("summary serializes"));
    out.push('\n');
    out
}

pub fn parse_report_file(
    text: &str,
) -> Result<(ReportHeader, Vec<VerificationReport>, ReportSummary)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: ReportHeader = serde_json::from_str(
        lines
            .next()
            .ok_or_else(|| Error::Format("empty report file".into()))?,
    )
    .map_err(format_err)?;
    let rest: Vec<&str> = lines.collect();
    if rest.is_empty() {
        return Err(Error::Format("report file has no summary line".into()));
    }
    let summary: ReportSummary =
        serde_json::from_str(rest[rest.len() - 1]).map_err(format_err)?;
    let reports = rest[..rest.len() - 1]
        .iter()
        .map(|line| serde_json::from_str(line).map_err(format_err))
        .collect::<Result<Vec<_>>>()?;
    Ok((header, reports, summary))
}

/// Sweep grid description.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridFile {
    pub d: Vec<usize>,
    pub p: Vec<u32>,
    pub ell0: Vec<i64>,
    pub variants: Vec<Variant>,
    pub configs: Vec<Interferometer>,
}

impl GridFile {
    /// d ∈ 2..=6, p ∈ 1..=2, ℓ0 ∈ −3..=3, both variants, both topologies.
    pub fn default_grid() -> Self {
        GridFile {
            d: (2..=6).collect(),
            p: vec![1, 2],
            ell0: (-3..=3).collect(),
            variants: vec![Variant::A, Variant::B],
            configs: vec![Interferometer::MachZehnder, Interferometer::Michelson],
        }
    }

    pub fn points(&self) -> Vec<GatePoint> {
        crate::verify::grid_points(&self.d, &self.p, &self.ell0, &self.variants, &self.configs)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let grid: GridFile = serde_json::from_str(text).map_err(format_err)?;
        if grid.d.is_empty()
            || grid.p.is_empty()
            || grid.ell0.is_empty()
            || grid.variants.is_empty()
            || grid.configs.is_empty()
        {
            return Err(Error::Format("grid file has an empty axis".into()));
        }
        Ok(grid)
    }
}

/// Parse an input state file: a JSON array of [ell, mode, re, im] entries.
pub fn parse_state_entries(text: &str) -> Result<Vec<(i64, usize, f64, f64)>> {
    let raw: Vec<(i64, i64, f64, f64)> = serde_json::from_str(text).map_err(format_err)?;
    raw.into_iter()
        .map(|(ell, mode, re, im)| {
            if mode < 0 {
                return Err(Error::Format(format!("negative mode index {mode}")));
            }
            Ok((ell, mode as usize, re, im))
        })
        .collect()
}

pub fn state_from_entries(d: usize, entries: &[(i64, usize, f64, f64)]) -> Result<PhotonState> {
    let amps: Vec<(i64, usize, num_complex::Complex64)> = entries
        .iter()
        .map(|&(ell, mode, re, im)| (ell, mode, num_complex::Complex64::new(re, im)))
        .collect();
    PhotonState::superposition(d, &amps)
}

/// Serialize a state as the same [ell, mode, re, im] array, in lexicographic
/// ket order.
pub fn state_to_json(state: &PhotonState) -> String {
    let entries: Vec<(i64, usize, f64, f64)> = state
        .iter()
        .map(|(label, amp)| (label.ell, label.mode, amp.re, amp.im))
        .collect();
    serde_json::to_string(&entries).expect("state serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::window::max_abs_diff;

    #[test]
    fn element_entries_round_trip() {
        let elements = vec![
            Element::spp(3),
            Element::spp_on(-8, 2),
            Element::dove_phase(5, Ratio::new(2, 3)),
            Element::mode_fourier(4),
            Element::SorterPhases {
                d: 4,
                step: 2,
                inverse: true,
            },
            Element::beam_splitter(0, 3, 0.5, 1.25).unwrap(),
            Element::mode_phase(1, 4.0),
            Element::RetroReflector { mode: 2 },
            Element::Circulator,
        ];
        for e in elements {
            let entry = element_to_entry(&e, None);
            let back = entry_to_element(&entry).unwrap();
            assert_eq!(e, back);
        }
    }

    #[test]
    fn network_list_round_trip() {
        let net = Network::michelson(3, 2, 1, Variant::B).unwrap();
        let list = ComponentList::from_network(&net);
        let text = list.to_json();
        let parsed = ComponentList::parse(&text).unwrap();
        let back = parsed.to_network().unwrap();
        assert_eq!(back.d(), net.d());
        assert_eq!(back.elements(), net.elements());
        assert_eq!(back.folded_reuse(), net.folded_reuse());
        assert_eq!(back.tally(), net.tally());
    }

    #[test]
    fn mesh_list_round_trip() {
        let mesh = crate::mesh::butterfly_fourier(8).unwrap();
        let list = ComponentList::from_mesh(&mesh, Some(1e-15));
        let parsed = ComponentList::parse(&list.to_json()).unwrap();
        let back = parsed.to_mesh().unwrap();
        assert!(max_abs_diff(back.matrix().view(), mesh.matrix().view()) < 1e-12);
        assert_eq!(back.beamsplitter_count(), mesh.beamsplitter_count());
    }

    #[test]
    fn state_file_round_trip() {
        let text = "[[0, 0, 0.6, 0.0], [2, 1, 0.0, 0.8]]";
        let entries = parse_state_entries(text).unwrap();
        let state = state_from_entries(2, &entries).unwrap();
        assert!((state.norm_sqr() - 1.0).abs() < 1e-12);
        let json = state_to_json(&state);
        let reparsed = parse_state_entries(&json).unwrap();
        assert_eq!(entries, reparsed);
    }

    #[test]
    fn malformed_inputs_are_format_errors() {
        assert!(parse_state_entries("not json").is_err());
        assert!(parse_state_entries("[[0, -1, 1.0, 0.0]]").is_err());
        assert!(GridFile::parse("{}").is_err());
        assert!(GridFile::parse(
            r#"{"d": [], "p": [1], "ell0": [0], "variants": ["a"], "configs": ["mz"]}"#
        )
        .is_err());
    }

    #[test]
    fn report_file_round_trip() {
        let grid = GridFile {
            d: vec![2, 3],
            p: vec![1],
            ell0: vec![0],
            variants: vec![Variant::A],
            configs: vec![Interferometer::MachZehnder],
        };
        let reports: Vec<_> = grid
            .points()
            .into_iter()
            .map(|pt| crate::verify::run_point(pt, 5, 1e-10, 7))
            .collect();
        let header = ReportHeader {
            format_version: FORMAT_VERSION,
            tol: 1e-10,
            trials: 5,
            seed: 7,
            points: reports.len(),
        };
        let text = write_report_file(&header, &reports);
        let (h, rs, summary) = parse_report_file(&text).unwrap();
        assert_eq!(h.points, 2);
        assert_eq!(rs.len(), 2);
        assert!(summary.all_passed);
        assert_eq!(rs, reports);
    }
}
