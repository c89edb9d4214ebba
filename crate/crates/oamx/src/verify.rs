//! Brute-force oracles and the verification engine.
//!
//! The oracle side never touches the optical simulation: the cyclic map is
//! written down directly from its definition, and the dense/sparse
//! consistency check compares two independently computed representations of
//! the same network. Reports are deterministic functions of (parameters,
//! seed): random superpositions come from a counter-seeded ChaCha stream and
//! all accumulations run in fixed order.

use std::collections::BTreeMap;

use ndarray::Array2;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{Interferometer, Network, NetworkKind, Variant};
use crate::state::{BasisLabel, CodingSubspace, PhotonState};
use crate::window::{max_abs_diff, OamWindow};

/// One sweep coordinate: which gate to build and verify.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GatePoint {
    pub d: usize,
    pub p: u32,
    pub ell0: i64,
    pub variant: Variant,
    pub config: Interferometer,
}

/// Parameters echoed into a report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportParams {
    pub d: usize,
    pub p: u32,
    pub ell0: i64,
    pub variant: Option<Variant>,
    pub config: Interferometer,
    pub kind: NetworkKind,
}

/// Result of checking one coding basis ket against the cyclic oracle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisCheck {
    pub input_ell: i64,
    pub expected_ell: i64,
    pub fidelity: f64,
}

/// Summary of the network's action on one ket outside the coding set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainProbe {
    pub input_ell: i64,
    pub support_len: usize,
    pub mode0_probability: f64,
    pub dominant_ell: i64,
    pub dominant_mode: usize,
    pub dominant_probability: f64,
}

/// Per-gate verification record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub params: ReportParams,
    pub seed: u64,
    pub trials: usize,
    pub tolerance: f64,
    pub per_basis: Vec<BasisCheck>,
    /// Smallest mode-0 probability seen across all checks.
    pub decoupling_min: f64,
    /// Smallest fidelity to the shifted amplitudes over the random trials.
    pub superposition_fidelity: f64,
    /// Largest componentwise deviation from the shifted amplitudes after
    /// aligning one global phase.
    pub coherence_residual: f64,
    /// Max-norm of M†M − I for the network matrix on the minimal window.
    pub unitarity_residual: f64,
    pub out_of_domain: Vec<DomainProbe>,
    /// Structural failure (dimension error, window escape, …), if any.
    pub error: Option<String>,
    pub passed: bool,
}

/// The defining cyclic map ℓ0 + j·p ↦ ℓ0 + ((j+1) mod d)·p, written down
/// directly with no optical simulation.
pub fn cyclic_oracle(sub: &CodingSubspace) -> BTreeMap<i64, i64> {
    let d = sub.dimension() as i64;
    let p = sub.step() as i64;
    let ell0 = sub.base_oam();
    (0..d)
        .map(|j| (ell0 + j * p, ell0 + ((j + 1) % d) * p))
        .collect()
}

/// Unit-norm superposition over the coding kets (mode 0) with independent
/// standard complex Gaussian amplitudes.
pub fn random_coding_superposition<R: rand::Rng>(
    sub: &CodingSubspace,
    rng: &mut R,
) -> PhotonState {
    let entries: Vec<(i64, usize, Complex64)> = sub
        .values()
        .into_iter()
        .map(|ell| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            (ell, 0, Complex64::new(re, im))
        })
        .collect();
    PhotonState::superposition(sub.dimension(), &entries)
        .expect("coding entries are valid")
        .normalized()
        .expect("Gaussian sample is nonzero with probability 1")
}

/// Certify a network against the cyclic oracle.
///
/// Checks, in order: every coding ket maps to its oracle successor with the
/// mode register back on 0; random coding superpositions transform
/// componentwise up to one global phase; the network matrix on the minimal
/// window is an isometry. Structural errors mark the report failed with a
/// diagnostic instead of propagating, so sweeps keep going.
pub fn verify_gate(
    net: &Network,
    sub: &CodingSubspace,
    trials: usize,
    tol: f64,
    seed: u64,
) -> VerificationReport {
    let mut report = VerificationReport {
        params: ReportParams {
            d: sub.dimension(),
            p: sub.step(),
            ell0: sub.base_oam(),
            variant: net.variant(),
            config: net.config(),
            kind: net.kind(),
        },
        seed,
        trials,
        tolerance: tol,
        per_basis: Vec::new(),
        decoupling_min: 1.0,
        superposition_fidelity: 1.0,
        coherence_residual: 0.0,
        unitarity_residual: 0.0,
        out_of_domain: Vec::new(),
        error: None,
        passed: false,
    };
    match verify_into(net, sub, trials, seed, &mut report) {
        Ok(()) => {
            report.passed = report.per_basis.iter().all(|b| b.fidelity >= 1.0 - tol)
                && report.decoupling_min >= 1.0 - tol
                && report.superposition_fidelity >= 1.0 - tol
                && report.coherence_residual <= tol
                && report.unitarity_residual <= tol;
        }
        Err(e) => {
            report.error = Some(e.to_string());
            report.passed = false;
        }
    }
    report
}

fn verify_into(
    net: &Network,
    sub: &CodingSubspace,
    trials: usize,
    seed: u64,
    report: &mut VerificationReport,
) -> Result<()> {
    let d = sub.dimension();
    let oracle = cyclic_oracle(sub);

    for ell in sub.values() {
        let out = net.apply(&PhotonState::basis_state(ell, 0, d)?)?;
        let expected_ell = oracle[&ell];
        let expected = PhotonState::basis_state(expected_ell, 0, d)?;
        let fidelity = out.fidelity(&expected)?;
        report.decoupling_min = report.decoupling_min.min(out.mode_marginal()[0]);
        report.per_basis.push(BasisCheck {
            input_ell: ell,
            expected_ell,
            fidelity,
        });
    }

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let input = random_coding_superposition(sub, &mut rng);
        let out = net.apply(&input)?;
        let mut expected = PhotonState::zero(d);
        for ell in sub.values() {
            expected.add(BasisLabel::new(oracle[&ell], 0), input.amplitude(ell, 0));
        }
        report.superposition_fidelity = report
            .superposition_fidelity
            .min(out.fidelity(&expected)?);
        report.decoupling_min = report.decoupling_min.min(out.mode_marginal()[0]);

        // Componentwise comparison after aligning the largest-magnitude
        // output component's phase to the oracle's.
        let mut align: Option<BasisLabel> = None;
        let mut best = 0.0;
        for (label, amp) in out.iter() {
            if amp.norm() > best {
                best = amp.norm();
                align = Some(*label);
            }
        }
        if let Some(label) = align {
            let o = out.amplitude(label.ell, label.mode);
            let e = expected.amplitude(label.ell, label.mode);
            let phase = if o.norm() > 0.0 && e.norm() > 0.0 {
                let g = e / o;
                g / g.norm()
            } else {
                Complex64::new(1.0, 0.0)
            };
            let mut residual: f64 = 0.0;
            for (lab, oamp) in out.iter() {
                residual =
                    residual.max((phase * oamp - expected.amplitude(lab.ell, lab.mode)).norm());
            }
            for (lab, eamp) in expected.iter() {
                residual =
                    residual.max((phase * out.amplitude(lab.ell, lab.mode) - eamp).norm());
            }
            report.coherence_residual = report.coherence_residual.max(residual);
        }
    }

    let window = net.minimal_window(sub)?;
    report.unitarity_residual = net.matrix(window)?.unitarity_residual();

    // Report (never judge) what the device does just outside the coding set.
    let p = sub.step() as i64;
    for probe_ell in [sub.base_oam() - p, sub.base_oam() + sub.dimension() as i64 * p] {
        let out = net
            .apply(&PhotonState::basis_state(probe_ell, 0, d)?)?
            .pruned();
        let marginal = out.mode_marginal();
        let mut dominant = (probe_ell, 0usize, 0.0f64);
        for (label, amp) in out.iter() {
            let prob = amp.norm_sqr();
            if prob > dominant.2 {
                dominant = (label.ell, label.mode, prob);
            }
        }
        report.out_of_domain.push(DomainProbe {
            input_ell: probe_ell,
            support_len: out.support_len(),
            mode0_probability: marginal[0],
            dominant_ell: dominant.0,
            dominant_mode: dominant.1,
            dominant_probability: dominant.2,
        });
    }
    Ok(())
}

/// Max-norm difference between the dense network matrix (product of element
/// kernels) and the same map assembled column by column from sparse
/// application. The two routes share no evaluation code.
pub fn matrix_consistency_check(net: &Network, window: OamWindow) -> Result<f64> {
    let dense = net.matrix(window)?;
    let d = net.d();
    let mut assembled: Array2<Complex64> = Array2::zeros(dense.matrix.dim());
    for (col, label) in window.labels(d).into_iter().enumerate() {
        let out = net.apply(&PhotonState::basis_state(label.ell, label.mode, d)?)?;
        for (out_label, amp) in out.iter() {
            let row = dense
                .output
                .index_of(*out_label, d)
                .ok_or(Error::WindowEscape {
                    ell: out_label.ell,
                    shifted: out_label.ell,
                    lo: dense.output.lo(),
                    hi: dense.output.hi(),
                })?;
            assembled[[row, col]] = *amp;
        }
    }
    Ok(max_abs_diff(dense.matrix.view(), assembled.view()))
}

/// Stable per-point seed derivation, so grid points draw independent but
/// reproducible randomness from one base seed.
pub fn point_seed(base: u64, point: &GatePoint) -> u64 {
    let mut h = base ^ 0x9e37_79b9_7f4a_7c15;
    let mut mix = |v: u64| {
        h ^= v
            .wrapping_add(0x9e37_79b9_7f4a_7c15)
            .wrapping_add(h << 6)
            .wrapping_add(h >> 2);
        h = h.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    };
    mix(point.d as u64);
    mix(point.p as u64);
    mix(point.ell0 as u64);
    mix(match point.variant {
        Variant::A => 1,
        Variant::B => 2,
    });
    mix(match point.config {
        Interferometer::MachZehnder => 1,
        Interferometer::Michelson => 2,
    });
    h
}

/// Build and verify the gate at one sweep point; build failures become
/// failed reports rather than panics, so sweeps always produce one report
/// per point.
pub fn run_point(point: GatePoint, trials: usize, tol: f64, base_seed: u64) -> VerificationReport {
    let seed = point_seed(base_seed, &point);
    let built = CodingSubspace::new(point.d, point.p, point.ell0)
        .and_then(|sub| Network::for_gate(&sub, point.variant, point.config).map(|n| (sub, n)));
    match built {
        Ok((sub, net)) => verify_gate(&net, &sub, trials, tol, seed),
        Err(e) => VerificationReport {
            params: ReportParams {
                d: point.d,
                p: point.p,
                ell0: point.ell0,
                variant: Some(point.variant),
                config: point.config,
                kind: NetworkKind::Custom,
            },
            seed,
            trials,
            tolerance: tol,
            per_basis: Vec::new(),
            decoupling_min: 0.0,
            superposition_fidelity: 0.0,
            coherence_residual: f64::MAX,
            unitarity_residual: f64::MAX,
            out_of_domain: Vec::new(),
            error: Some(e.to_string()),
            passed: false,
        },
    }
}

/// Cartesian sweep grid in deterministic (d, p, ℓ0, variant, config) order.
pub fn grid_points(
    ds: &[usize],
    ps: &[u32],
    ell0s: &[i64],
    variants: &[Variant],
    configs: &[Interferometer],
) -> Vec<GatePoint> {
    let mut points = Vec::new();
    for &d in ds {
        for &p in ps {
            for &ell0 in ell0s {
                for &variant in variants {
                    for &config in configs {
                        points.push(GatePoint {
                            d,
                            p,
                            ell0,
                            variant,
                            config,
                        });
                    }
                }
            }
        }
    }
    points
}
