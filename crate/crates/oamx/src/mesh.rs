//! Compilation of d-mode unitaries into beamsplitter/phase-shifter meshes.
//!
//! Two constructions:
//!
//! * [`decompose_rectangular`] — alternating-diagonal nulling on adjacent
//!   mode pairs, producing exactly d(d−1)/2 beamsplitters plus d output
//!   phases for any unitary. Degenerate nulling steps emit θ = 0
//!   beamsplitters so the count is deterministic.
//! * [`butterfly_fourier`] — the radix-2 structure for the d-mode Fourier
//!   gate, d a power of two: (d/2)·log2(d) beamsplitters in log2(d) stages
//!   with twiddle phase shifters, behind a recorded bit-reversal input
//!   permutation (kept explicit rather than absorbed into crossings).
//!
//! A mesh evaluates as: input permutation, then layers in order, then the
//! diagonal of output phases.

use ndarray::{Array2, ArrayView2};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::element::{root_of_unity, Element};
use crate::error::{Error, Result};
use crate::state::{BasisLabel, PhotonState};
use crate::window::unitarity_residual;

const TAU: f64 = std::f64::consts::TAU;
const PI: f64 = std::f64::consts::PI;
const FRAC_PI_4: f64 = std::f64::consts::FRAC_PI_4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeshScheme {
    Rectangular,
    Butterfly,
}

/// Beamsplitter/phase-shifter realization of a d-mode unitary.
#[derive(Clone, Debug)]
pub struct Mesh {
    d: usize,
    scheme: MeshScheme,
    /// Mode relabeling applied first: input on mode `input_permutation[i]`
    /// feeds position i of the layer stack. Identity for rectangular meshes,
    /// bit reversal for the butterfly.
    input_permutation: Vec<usize>,
    layers: Vec<Element>,
    output_phases: Vec<f64>,
    /// Butterfly stage count; d for rectangular meshes.
    stages: usize,
}

impl Mesh {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn scheme(&self) -> MeshScheme {
        self.scheme
    }

    pub fn input_permutation(&self) -> &[usize] {
        &self.input_permutation
    }

    pub fn layers(&self) -> &[Element] {
        &self.layers
    }

    pub fn output_phases(&self) -> &[f64] {
        &self.output_phases
    }

    pub fn stages(&self) -> usize {
        self.stages
    }

    pub fn beamsplitter_count(&self) -> usize {
        self.layers
            .iter()
            .filter(|e| matches!(e, Element::BeamSplitter { .. }))
            .count()
    }

    pub fn phase_shifter_count(&self) -> usize {
        self.layers
            .iter()
            .filter(|e| matches!(e, Element::ModePhase { .. }))
            .count()
    }

    pub(crate) fn from_parts(
        d: usize,
        scheme: MeshScheme,
        input_permutation: Vec<usize>,
        layers: Vec<Element>,
        output_phases: Vec<f64>,
        stages: usize,
    ) -> Result<Mesh> {
        if input_permutation.len() != d || output_phases.len() != d {
            return Err(Error::Format("mesh part lengths do not match d".into()));
        }
        let mut seen = vec![false; d];
        for &p in &input_permutation {
            if p >= d || seen[p] {
                return Err(Error::Format("input permutation is not a permutation".into()));
            }
            seen[p] = true;
        }
        for e in &layers {
            match e {
                Element::BeamSplitter { .. } | Element::ModePhase { .. } => e.check_dims(d)?,
                _ => {
                    return Err(Error::Format(
                        "mesh layers may only contain beamsplitters and mode phases".into(),
                    ))
                }
            }
        }
        Ok(Mesh {
            d,
            scheme,
            input_permutation,
            layers,
            output_phases,
            stages,
        })
    }

    /// Dense d×d matrix: output phases · layers · input permutation.
    pub fn matrix(&self) -> Array2<Complex64> {
        let d = self.d;
        let mut m: Array2<Complex64> = Array2::zeros((d, d));
        for i in 0..d {
            m[[i, self.input_permutation[i]]] = Complex64::new(1.0, 0.0);
        }
        for layer in &self.layers {
            left_multiply(layer, &mut m);
        }
        for (j, &phi) in self.output_phases.iter().enumerate() {
            let phase = Complex64::from_polar(1.0, phi);
            for c in 0..d {
                m[[j, c]] *= phase;
            }
        }
        m
    }

    /// Apply the mesh unitary to a sparse state (modes only; OAM untouched).
    pub fn apply(&self, s: &PhotonState) -> Result<PhotonState> {
        if s.mode_count() != self.d {
            return Err(Error::ModeCountMismatch {
                left: self.d,
                right: s.mode_count(),
            });
        }
        let mut state = PhotonState::zero(self.d);
        // new[(ℓ, i)] = old[(ℓ, perm[i])]
        let mut inverse = vec![0usize; self.d];
        for (i, &p) in self.input_permutation.iter().enumerate() {
            inverse[p] = i;
        }
        for (label, amp) in s.iter() {
            state.add(BasisLabel::new(label.ell, inverse[label.mode]), *amp);
        }
        for layer in &self.layers {
            state = layer.apply(&state)?;
        }
        let mut out = PhotonState::zero(self.d);
        for (label, amp) in state.iter() {
            out.add(
                *label,
                amp * Complex64::from_polar(1.0, self.output_phases[label.mode]),
            );
        }
        Ok(out)
    }

    /// Apply the inverse mesh unitary.
    pub fn apply_adjoint(&self, s: &PhotonState) -> Result<PhotonState> {
        if s.mode_count() != self.d {
            return Err(Error::ModeCountMismatch {
                left: self.d,
                right: s.mode_count(),
            });
        }
        let mut state = PhotonState::zero(self.d);
        for (label, amp) in s.iter() {
            state.add(
                *label,
                amp * Complex64::from_polar(1.0, -self.output_phases[label.mode]),
            );
        }
        for layer in self.layers.iter().rev() {
            state = layer.adjoint().apply(&state)?;
        }
        let mut out = PhotonState::zero(self.d);
        for (label, amp) in state.iter() {
            out.add(
                BasisLabel::new(label.ell, self.input_permutation[label.mode]),
                *amp,
            );
        }
        Ok(out)
    }
}

fn left_multiply(e: &Element, m: &mut Array2<Complex64>) {
    let cols = m.ncols();
    match *e {
        Element::BeamSplitter {
            mode_a,
            mode_b,
            theta,
            phi,
        } => {
            let (c, s) = (theta.cos(), theta.sin());
            let e_pos = Complex64::from_polar(1.0, phi);
            let e_neg = Complex64::from_polar(1.0, -phi);
            for k in 0..cols {
                let top = m[[mode_a, k]];
                let bot = m[[mode_b, k]];
                m[[mode_a, k]] = c * top - e_neg * s * bot;
                m[[mode_b, k]] = e_pos * s * top + c * bot;
            }
        }
        Element::ModePhase { mode, phi } => {
            let phase = Complex64::from_polar(1.0, phi);
            for k in 0..cols {
                m[[mode, k]] *= phase;
            }
        }
        _ => unreachable!("mesh layers are beamsplitters and mode phases"),
    }
}

/// Direct dense d-mode Fourier matrix, entry [k, j] = ω^{±jk}/√d.
pub fn fourier_matrix(d: usize, inverse: bool) -> Array2<Complex64> {
    let scale = 1.0 / (d as f64).sqrt();
    Array2::from_shape_fn((d, d), |(k, j)| {
        let num = (j * k) as i128;
        root_of_unity(if inverse { -num } else { num }, d as i128) * scale
    })
}

/// Decompose a unitary into the rectangular mesh.
///
/// Nulling alternates between right-multiplications (columns, odd diagonals)
/// and left-multiplications (rows, even diagonals); the left factors are then
/// commuted through the residual diagonal, which this beamsplitter convention
/// leaves unchanged up to the beamsplitter phase.
pub fn decompose_rectangular(u: ArrayView2<Complex64>) -> Result<Mesh> {
    let d = u.nrows();
    if d == 0 || u.ncols() != d {
        return Err(Error::InvalidArgument(format!(
            "expected a square matrix, got {}x{}",
            u.nrows(),
            u.ncols()
        )));
    }
    let residual = unitarity_residual(u);
    if residual > 1e-8 {
        return Err(Error::NotUnitary { residual });
    }
    if d == 1 {
        return Mesh::from_parts(
            1,
            MeshScheme::Rectangular,
            vec![0],
            Vec::new(),
            vec![u[[0, 0]].arg()],
            1,
        );
    }

    let mut work = u.to_owned();
    // (mode index a, theta, phi) with the pair being (a, a+1).
    let mut rights: Vec<(usize, f64, f64)> = Vec::new();
    let mut lefts: Vec<(usize, f64, f64)> = Vec::new();

    for i in 1..d {
        if i % 2 == 1 {
            for j in 0..i {
                let row = d - 1 - j;
                let col = i - 1 - j;
                let x = work[[row, col]];
                let y = work[[row, col + 1]];
                let theta = x.norm().atan2(y.norm());
                let phi = x.arg() - y.arg();
                right_multiply_adjoint(&mut work, col, theta, phi);
                rights.push((col, theta, phi.rem_euclid(TAU)));
            }
        } else {
            for j in 1..=i {
                let row = d + j - i - 1;
                let col = j - 1;
                let upper = work[[row - 1, col]];
                let lower = work[[row, col]];
                let theta = lower.norm().atan2(upper.norm());
                let phi = PI + lower.arg() - upper.arg();
                left_multiply_bs(&mut work, row - 1, theta, phi);
                lefts.push((row - 1, theta, phi.rem_euclid(TAU)));
            }
        }
    }

    let diag: Vec<Complex64> = (0..d).map(|j| work[[j, j]]).collect();
    let output_phases: Vec<f64> = diag.iter().map(|z| z.arg()).collect();

    let mut layers: Vec<Element> = Vec::with_capacity(rights.len() + lefts.len());
    for &(a, theta, phi) in &rights {
        layers.push(Element::beam_splitter(a, a + 1, theta, phi)?);
    }
    // Commute each left factor through the diagonal: T†(θ,φ)·D = D·T(θ,φ')
    // with e^{-iφ'} = -e^{-iφ}·D[n]/D[m]; applied in reverse order.
    for &(a, theta, phi) in lefts.iter().rev() {
        let z = -Complex64::from_polar(1.0, -phi) * diag[a + 1] / diag[a];
        let phi_new = -z.arg();
        layers.push(Element::beam_splitter(a, a + 1, theta, phi_new)?);
    }

    Mesh::from_parts(
        d,
        MeshScheme::Rectangular,
        (0..d).collect(),
        layers,
        output_phases,
        d,
    )
}

/// U ← U·T†(θ, φ) on columns (a, a+1).
fn right_multiply_adjoint(m: &mut Array2<Complex64>, a: usize, theta: f64, phi: f64) {
    let (c, s) = (theta.cos(), theta.sin());
    let e_pos = Complex64::from_polar(1.0, phi);
    let e_neg = Complex64::from_polar(1.0, -phi);
    for r in 0..m.nrows() {
        let left = m[[r, a]];
        let right = m[[r, a + 1]];
        m[[r, a]] = c * left - e_pos * s * right;
        m[[r, a + 1]] = e_neg * s * left + c * right;
    }
}

/// U ← T(θ, φ)·U on rows (a, a+1).
fn left_multiply_bs(m: &mut Array2<Complex64>, a: usize, theta: f64, phi: f64) {
    let (c, s) = (theta.cos(), theta.sin());
    let e_pos = Complex64::from_polar(1.0, phi);
    let e_neg = Complex64::from_polar(1.0, -phi);
    for k in 0..m.ncols() {
        let top = m[[a, k]];
        let bot = m[[a + 1, k]];
        m[[a, k]] = c * top - e_neg * s * bot;
        m[[a + 1, k]] = e_pos * s * top + c * bot;
    }
}

/// Radix-2 butterfly mesh for the d-mode Fourier gate, d = 2^q.
pub fn butterfly_fourier(d: usize) -> Result<Mesh> {
    if d < 2 || !d.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "butterfly mesh requires d to be a power of two, got {d}"
        )));
    }
    let q = d.trailing_zeros() as usize;
    let permutation: Vec<usize> = (0..d).map(|i| bit_reverse(i, q)).collect();
    let mut layers = Vec::new();
    for s in 1..=q {
        let block = 1usize << s;
        let half = block >> 1;
        for start in (0..d).step_by(block) {
            for t in 0..half {
                let a = start + t;
                let b = a + half;
                // Butterfly with twiddle w = exp(2πi·t/block):
                // (x_a + w·x_b, x_a − w·x_b)/√2 = BS(π/4, 0) ∘ diag(1, −w).
                let twiddle_phase = PI + TAU * t as f64 / block as f64;
                layers.push(Element::mode_phase(b, twiddle_phase));
                layers.push(Element::beam_splitter(a, b, FRAC_PI_4, 0.0)?);
            }
        }
    }
    Mesh::from_parts(
        d,
        MeshScheme::Butterfly,
        permutation,
        layers,
        vec![0.0; d],
        q,
    )
}

fn bit_reverse(value: usize, bits: usize) -> usize {
    let mut v = value;
    let mut out = 0;
    for _ in 0..bits {
        out = (out << 1) | (v & 1);
        v >>= 1;
    }
    out
}

/// Apply a network with every mode-Fourier element evaluated through the
/// given mesh (forward or adjoint per the element's inverse flag) instead of
/// the direct kernel. This is how a compiled mesh substitutes for the
/// integrated Fourier device inside a gate.
pub fn apply_with_fourier_mesh(
    net: &crate::network::Network,
    mesh: &Mesh,
    s: &PhotonState,
) -> Result<PhotonState> {
    if mesh.d() != net.d() {
        return Err(Error::ModeCountMismatch {
            left: mesh.d(),
            right: net.d(),
        });
    }
    let mut state = s.clone();
    for e in net.elements() {
        state = match e {
            Element::ModeFourier { inverse: false, .. } => mesh.apply(&state)?.pruned(),
            Element::ModeFourier { inverse: true, .. } => mesh.apply_adjoint(&state)?.pruned(),
            _ => e.apply(&state)?,
        };
    }
    Ok(state)
}

/// Haar-random d×d unitary from a complex Ginibre sample orthonormalized by
/// modified Gram-Schmidt (two passes per column for orthogonality).
pub fn haar_unitary<R: Rng>(d: usize, rng: &mut R) -> Array2<Complex64> {
    let scale = 1.0 / 2f64.sqrt();
    let mut g = Array2::from_shape_fn((d, d), |_| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im) * scale
    });
    for j in 0..d {
        for _ in 0..2 {
            for i in 0..j {
                let qi = g.column(i).to_owned();
                let proj: Complex64 = qi
                    .iter()
                    .zip(g.column(j).iter())
                    .map(|(q, v)| q.conj() * v)
                    .sum();
                let mut cj = g.column_mut(j);
                for r in 0..d {
                    cj[r] -= proj * qi[r];
                }
            }
        }
        let norm = g.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let mut cj = g.column_mut(j);
        for r in 0..d {
            cj[r] /= norm;
        }
    }
    g
}
