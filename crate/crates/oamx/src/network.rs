//! Gate architectures as ordered element sequences.
//!
//! A network is applied left to right. The sorter is the composite
//! [F, phase bank, F†]; running it backwards (its adjoint) is
//! [F, inverse phase bank, F†]. Michelson networks are stored unrolled:
//! the return pass through the single physical sorter appears as explicit
//! adjoint elements, with `folded_reuse` pairs recording which entries are
//! the same piece of hardware so resource tallies count it once.
//!
//! Cyclic-shift builders: for a coding set {ℓ0 + j·p}, the wrapped value
//! ℓ0 + d·p must be the only coding image routed onto the corrected mode.
//! The sorter routes cleanly only OAM values divisible by p, so the builder
//! first removes the sub-period offset r = ℓ0 mod p (variant A, shift ∓r,
//! correction on mode ((ℓ0−r)/p) mod d) or the full offset ℓ0 mod (p·d)
//! (variant B, correction on mode 0). For unit step both reduce to the
//! single correction index ℓ0 mod d and no extra shift.

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::element::{rect_action, Element};
use crate::error::{Error, Result};
use crate::state::{CodingSubspace, PhotonState};
use crate::window::{OamWindow, WindowedMatrix};

/// Which correction placement a generalized cyclic gate uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Controlled correction moved to the wrap mode.
    A,
    /// Coding set shifted onto the canonical one, correction on mode 0.
    B,
}

/// Interferometer topology.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Interferometer {
    #[serde(rename = "mz")]
    MachZehnder,
    Michelson,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NetworkKind {
    Sorter,
    CyclicX,
    CyclicXStep,
    Custom,
}

/// Indices of one [F, phases, F†] triple inside the element sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SorterSpan {
    pub start: usize,
    pub inverse: bool,
}

/// Physical device counts for a network, Michelson folds counted once.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceTally {
    pub sorter_count: usize,
    /// Orders of the spiral phase plates, in order of appearance.
    pub spp_orders: Vec<i64>,
    pub fourier_count: usize,
    /// Dove-prism-equivalent phase devices; a d-mode phase bank counts d−1.
    pub dove_phase_count: usize,
    pub beamsplitter_count: usize,
    pub mode_phase_count: usize,
    pub retroreflector_count: usize,
    pub circulator_count: usize,
}

impl ResourceTally {
    pub fn spp_count(&self) -> usize {
        self.spp_orders.len()
    }
}

/// Ordered element sequence with configuration metadata.
#[derive(Clone, Debug)]
pub struct Network {
    d: usize,
    elements: Vec<Element>,
    kind: NetworkKind,
    config: Interferometer,
    variant: Option<Variant>,
    subspace: Option<CodingSubspace>,
    folded_reuse: Vec<(usize, usize)>,
    sorter_spans: Vec<SorterSpan>,
}

fn check_dimension(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "mode count must be at least 2, got {d}"
        )));
    }
    Ok(())
}

fn sorter_elements(d: usize, p: u32, inverse: bool) -> [Element; 3] {
    [
        Element::mode_fourier(d),
        Element::SorterPhases {
            d,
            step: p,
            inverse,
        },
        Element::mode_fourier_inverse(d),
    ]
}

impl Network {
    /// The d-mode sorter with step p: routes |ℓ⟩|j⟩ → |ℓ⟩|j ⊕ ℓ/p⟩ for
    /// p | ℓ. `inverse` builds the reversed device.
    pub fn sorter(d: usize, p: u32, inverse: bool) -> Result<Network> {
        check_dimension(d)?;
        if p == 0 {
            return Err(Error::InvalidArgument("sorter step must be positive".into()));
        }
        Ok(Network {
            d,
            elements: sorter_elements(d, p, inverse).to_vec(),
            kind: NetworkKind::Sorter,
            config: Interferometer::MachZehnder,
            variant: None,
            subspace: None,
            folded_reuse: Vec::new(),
            sorter_spans: vec![SorterSpan { start: 0, inverse }],
        })
    }

    /// Cyclic shift |j⟩ → |j ⊕ 1⟩ on the coding set {0, …, d−1}.
    pub fn cyclic_x(d: usize) -> Result<Network> {
        let mut net = Network::cyclic_x_step(d, 1, 0, Variant::A)?;
        net.kind = NetworkKind::CyclicX;
        Ok(net)
    }

    /// Generalized cyclic shift on {ℓ0 + j·p}, Mach-Zehnder topology.
    pub fn cyclic_x_step(d: usize, p: u32, ell0: i64, variant: Variant) -> Result<Network> {
        let sub = CodingSubspace::new(d, p, ell0)?;
        let (pre_shift, control) = match variant {
            Variant::A => (sub.step_offset(), sub.wrap_mode()),
            Variant::B => (sub.alignment_shift(), 0),
        };
        let mut elements = Vec::new();
        let mut spans = Vec::new();
        if pre_shift != 0 {
            elements.push(Element::spp(-pre_shift));
        }
        elements.push(Element::spp(p as i64));
        spans.push(SorterSpan {
            start: elements.len(),
            inverse: false,
        });
        elements.extend(sorter_elements(d, p, false));
        elements.push(Element::spp_on(-(p as i64) * d as i64, control));
        spans.push(SorterSpan {
            start: elements.len(),
            inverse: true,
        });
        elements.extend(sorter_elements(d, p, true));
        if pre_shift != 0 {
            elements.push(Element::spp(pre_shift));
        }
        Ok(Network {
            d,
            elements,
            kind: NetworkKind::CyclicXStep,
            config: Interferometer::MachZehnder,
            variant: Some(variant),
            subspace: Some(sub),
            folded_reuse: Vec::new(),
            sorter_spans: spans,
        })
    }

    /// Generalized cyclic shift, folded Michelson topology: one physical
    /// sorter traversed twice, retro-reflectors on the uncorrected modes,
    /// a circulator separating output from input. Shared-arm shifts are
    /// traversed twice (forward then adjoint) and recorded as folded pairs.
    pub fn michelson(d: usize, p: u32, ell0: i64, variant: Variant) -> Result<Network> {
        let sub = CodingSubspace::new(d, p, ell0)?;
        let (shared_shift, control) = match variant {
            Variant::A => (sub.step_offset(), sub.wrap_mode()),
            Variant::B => (sub.alignment_shift(), 0),
        };
        let mut elements = vec![Element::spp(p as i64), Element::Circulator];
        let mut folded = Vec::new();
        let shared_idx = if shared_shift != 0 {
            elements.push(Element::spp(-shared_shift));
            Some(elements.len() - 1)
        } else {
            None
        };
        let fwd_start = elements.len();
        elements.extend(sorter_elements(d, p, false));
        elements.push(Element::spp_on(-(p as i64) * d as i64, control));
        for mode in 0..d {
            if mode != control {
                elements.push(Element::RetroReflector { mode });
            }
        }
        let ret_start = elements.len();
        elements.extend(sorter_elements(d, p, true));
        if let Some(idx) = shared_idx {
            elements.push(Element::spp(shared_shift));
            folded.push((idx, elements.len() - 1));
        }
        folded.push((fwd_start, ret_start + 2));
        folded.push((fwd_start + 1, ret_start + 1));
        folded.push((fwd_start + 2, ret_start));
        folded.sort_unstable();
        Ok(Network {
            d,
            elements,
            kind: NetworkKind::CyclicXStep,
            config: Interferometer::Michelson,
            variant: Some(variant),
            subspace: Some(sub),
            folded_reuse: folded,
            sorter_spans: vec![
                SorterSpan {
                    start: fwd_start,
                    inverse: false,
                },
                SorterSpan {
                    start: ret_start,
                    inverse: true,
                },
            ],
        })
    }

    /// Gate for a coding subspace in the requested topology.
    pub fn for_gate(
        sub: &CodingSubspace,
        variant: Variant,
        config: Interferometer,
    ) -> Result<Network> {
        match config {
            Interferometer::MachZehnder => {
                Network::cyclic_x_step(sub.dimension(), sub.step(), sub.base_oam(), variant)
            }
            Interferometer::Michelson => {
                Network::michelson(sub.dimension(), sub.step(), sub.base_oam(), variant)
            }
        }
    }

    /// Arbitrary element sequence; no sorter spans or folds recorded.
    pub fn custom(d: usize, elements: Vec<Element>) -> Result<Network> {
        check_dimension(d)?;
        for e in &elements {
            e.check_dims(d)?;
        }
        Ok(Network {
            d,
            elements,
            kind: NetworkKind::Custom,
            config: Interferometer::MachZehnder,
            variant: None,
            subspace: None,
            folded_reuse: Vec::new(),
            sorter_spans: Vec::new(),
        })
    }

    #[allow(clippy::too_many_arguments)]
    pub(crate) fn with_parts(
        d: usize,
        elements: Vec<Element>,
        kind: NetworkKind,
        config: Interferometer,
        variant: Option<Variant>,
        subspace: Option<CodingSubspace>,
        mut folded_reuse: Vec<(usize, usize)>,
        sorter_spans: Vec<SorterSpan>,
    ) -> Result<Network> {
        check_dimension(d)?;
        for e in &elements {
            e.check_dims(d)?;
        }
        folded_reuse.sort_unstable();
        for &(a, b) in &folded_reuse {
            if a >= elements.len() || b >= elements.len() || a >= b {
                return Err(Error::Format(format!("invalid folded pair ({a}, {b})")));
            }
        }
        Ok(Network {
            d,
            elements,
            kind,
            config,
            variant,
            subspace,
            folded_reuse,
            sorter_spans,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn kind(&self) -> NetworkKind {
        self.kind
    }

    pub fn config(&self) -> Interferometer {
        self.config
    }

    pub fn variant(&self) -> Option<Variant> {
        self.variant
    }

    pub fn subspace(&self) -> Option<&CodingSubspace> {
        self.subspace.as_ref()
    }

    pub fn folded_reuse(&self) -> &[(usize, usize)] {
        &self.folded_reuse
    }

    pub fn sorter_spans(&self) -> &[SorterSpan] {
        &self.sorter_spans
    }

    /// Left-to-right fold of element application.
    pub fn apply(&self, s: &PhotonState) -> Result<PhotonState> {
        if s.mode_count() != self.d {
            return Err(Error::ModeCountMismatch {
                left: self.d,
                right: s.mode_count(),
            });
        }
        let mut state = s.clone();
        for e in &self.elements {
            state = e.apply(&state)?;
        }
        Ok(state)
    }

    /// Dense matrix of the network starting from `input_window`.
    ///
    /// OAM shifts translate (uncontrolled) or extend (controlled) the window
    /// as the fold proceeds, so the result maps the input window onto a
    /// possibly larger output window and is exact for every input-window ket.
    pub fn matrix(&self, input_window: OamWindow) -> Result<WindowedMatrix> {
        let mut w_cur = input_window;
        let mut m: Array2<Complex64> = Array2::eye(input_window.dim(self.d));
        for e in &self.elements {
            e.check_dims(self.d)?;
            let w_next = match e.oam_shift() {
                Some((n, None)) => w_cur.shifted(n),
                Some((n, Some(_))) => w_cur.hull(w_cur.shifted(n)),
                None => w_cur,
            };
            m = rect_action(e, self.d, w_cur, w_next, m.view());
            w_cur = w_next;
        }
        Ok(WindowedMatrix {
            input: input_window,
            output: w_cur,
            d: self.d,
            matrix: m,
        })
    }

    /// Smallest OAM interval containing the coding set together with every
    /// OAM value reached while the network processes a coding ket.
    pub fn minimal_window(&self, sub: &CodingSubspace) -> Result<OamWindow> {
        let values = sub.values();
        let mut window = OamWindow::new(
            *values.iter().min().expect("nonempty coding set"),
            *values.iter().max().expect("nonempty coding set"),
        )?;
        for ell in values {
            let mut state = PhotonState::basis_state(ell, 0, self.d)?;
            for e in &self.elements {
                state = e.apply(&state)?.pruned();
                if let Some((lo, hi)) = state.oam_support() {
                    window = window.grown_to(lo).grown_to(hi);
                }
            }
        }
        Ok(window)
    }

    /// Count physical devices; folded pairs count once.
    pub fn tally(&self) -> ResourceTally {
        let folded_second: std::collections::BTreeSet<usize> =
            self.folded_reuse.iter().map(|&(_, b)| b).collect();
        let mut tally = ResourceTally::default();
        for (i, e) in self.elements.iter().enumerate() {
            if folded_second.contains(&i) {
                continue;
            }
            match *e {
                Element::Spp { order, .. } => tally.spp_orders.push(order),
                Element::ModeFourier { .. } => tally.fourier_count += 1,
                Element::SorterPhases { d, .. } => tally.dove_phase_count += d - 1,
                Element::DovePhase { .. } => tally.dove_phase_count += 1,
                Element::BeamSplitter { .. } => tally.beamsplitter_count += 1,
                Element::ModePhase { .. } => tally.mode_phase_count += 1,
                Element::RetroReflector { .. } => tally.retroreflector_count += 1,
                Element::Circulator => tally.circulator_count += 1,
            }
        }
        for span in &self.sorter_spans {
            if !folded_second.contains(&span.start) {
                tally.sorter_count += 1;
            }
        }
        tally
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::BasisLabel;
    use crate::window::{max_abs_diff, max_abs_diff_up_to_phase};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ket(ell: i64, mode: usize, d: usize) -> PhotonState {
        PhotonState::basis_state(ell, mode, d).unwrap()
    }

    #[test]
    fn sorter_routes_by_oam() {
        let net = Network::sorter(3, 1, false).unwrap();
        let out = net.apply(&ket(4, 0, 3)).unwrap();
        assert!(out.fidelity(&ket(4, 1, 3)).unwrap() >= 1.0 - 1e-12);

        let out = net.apply(&ket(2, 2, 3)).unwrap();
        assert!(out.fidelity(&ket(2, 1, 3)).unwrap() >= 1.0 - 1e-12);

        let neg = net.apply(&ket(-4, 0, 3)).unwrap();
        assert!(neg.fidelity(&ket(-4, 2, 3)).unwrap() >= 1.0 - 1e-12);
    }

    #[test]
    fn sorter_splits_non_multiples_of_step() {
        // d=2, p=2, OAM 1: the phase bank applies diag(1, i) between the
        // Fouriers, so port 0 splits as ((1+i)|0⟩ + (1-i)|1⟩)/2.
        let net = Network::sorter(2, 2, false).unwrap();
        let out = net.apply(&ket(1, 0, 2)).unwrap();
        assert!((out.amplitude(1, 0) - c(0.5, 0.5)).norm() < 1e-12);
        assert!((out.amplitude(1, 1) - c(0.5, -0.5)).norm() < 1e-12);

        // Same numbers from the dense route: product of the three element
        // matrices on the single-value window.
        let w = OamWindow::new(1, 1).unwrap();
        let m = net.matrix(w).unwrap();
        let col = w.index_of(BasisLabel::new(1, 0), 2).unwrap();
        assert!((m.matrix[[0, col]] - c(0.5, 0.5)).norm() < 1e-12);
        assert!((m.matrix[[1, col]] - c(0.5, -0.5)).norm() < 1e-12);
    }

    #[test]
    fn sorter_inverse_undoes_sorter() {
        let fwd = Network::sorter(4, 1, false).unwrap();
        let inv = Network::sorter(4, 1, true).unwrap();
        for i in -3..=5 {
            for j in 0..4 {
                let s = ket(i, j, 4);
                let back = inv.apply(&fwd.apply(&s).unwrap()).unwrap();
                assert!(back.fidelity(&s).unwrap() >= 1.0 - 1e-12);
            }
        }
    }

    #[test]
    fn cyclic_x_wraps() {
        let net = Network::cyclic_x(3).unwrap();
        let out = net.apply(&ket(2, 0, 3)).unwrap();
        assert!(out.fidelity(&ket(0, 0, 3)).unwrap() >= 1.0 - 1e-10);
        assert!(out.mode_marginal()[0] > 1.0 - 1e-10);
    }

    #[test]
    fn cyclic_x_preserves_coherence() {
        let net = Network::cyclic_x(3).unwrap();
        let (a, b, g) = (c(0.3, 0.1), c(-0.5, 0.4), c(0.2, -0.6));
        let input = PhotonState::superposition(3, &[(0, 0, a), (1, 0, b), (2, 0, g)])
            .unwrap()
            .normalized()
            .unwrap();
        let out = net.apply(&input).unwrap();
        let raw_norm = (a.norm_sqr() + b.norm_sqr() + g.norm_sqr()).sqrt();
        // Cyclic shift of the amplitude vector: (γ, α, β) up to normalization.
        for (ell, expected) in [(0, g), (1, a), (2, b)] {
            assert!((out.amplitude(ell, 0) - expected / raw_norm).norm() < 1e-10);
        }
    }

    #[test]
    fn cyclic_x_out_of_domain_input() {
        // |3⟩ for d=3: shifted to 4, routed to mode 1, correction bypassed.
        let net = Network::cyclic_x(3).unwrap();
        let out = net.apply(&ket(3, 0, 3)).unwrap();
        assert!(out.fidelity(&ket(4, 0, 3)).unwrap() >= 1.0 - 1e-10);
    }

    #[test]
    fn cyclic_x_order_two() {
        let net = Network::cyclic_x(2).unwrap();
        let once = net.apply(&ket(0, 0, 2)).unwrap();
        assert!(once.fidelity(&ket(1, 0, 2)).unwrap() >= 1.0 - 1e-10);
        let twice = net.apply(&once).unwrap();
        assert!(twice.fidelity(&ket(0, 0, 2)).unwrap() >= 1.0 - 1e-10);
    }

    #[test]
    fn empty_network_is_identity() {
        let net = Network::custom(2, vec![]).unwrap();
        let s = ket(5, 1, 2);
        assert_eq!(net.apply(&s).unwrap(), s);
        let w = OamWindow::new(-1, 1).unwrap();
        let m = net.matrix(w).unwrap();
        assert!(max_abs_diff(m.matrix.view(), Array2::eye(w.dim(2)).view()) < 1e-15);
    }

    #[test]
    fn cyclic_x_matrix_restricts_to_permutation() {
        let net = Network::cyclic_x(2).unwrap();
        let sub = CodingSubspace::new(2, 1, 0).unwrap();
        let window = net.minimal_window(&sub).unwrap();
        assert_eq!((window.lo(), window.hi()), (0, 2));
        let m = net.matrix(window).unwrap();
        assert!(m.unitarity_residual() < 1e-12);
        let coding = [BasisLabel::new(0, 0), BasisLabel::new(1, 0)];
        let r = m.restrict(&coding, &coding).unwrap();
        let expected = ndarray::array![
            [c(0.0, 0.0), c(1.0, 0.0)],
            [c(1.0, 0.0), c(0.0, 0.0)]
        ];
        assert!(max_abs_diff(r.view(), expected.view()) < 1e-12);
    }

    #[test]
    fn stepped_gate_wraps_aligned_base() {
        // Coding set {0, 2, 4} with d=3, p=2: top wraps to the base.
        let net = Network::cyclic_x_step(3, 2, 0, Variant::A).unwrap();
        let out = net.apply(&ket(4, 0, 3)).unwrap();
        assert!(out.fidelity(&ket(0, 0, 3)).unwrap() >= 1.0 - 1e-10);

        // Restricted to the coding kets the gate is the 3-cycle matrix.
        let sub = CodingSubspace::new(3, 2, 0).unwrap();
        let window = net.minimal_window(&sub).unwrap();
        let coding: Vec<BasisLabel> = sub
            .values()
            .into_iter()
            .map(|ell| BasisLabel::new(ell, 0))
            .collect();
        let m = net.matrix(window).unwrap().restrict(&coding, &coding).unwrap();
        let z = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        let expected = ndarray::array![[z, z, one], [one, z, z], [z, one, z]];
        assert!(max_abs_diff(m.view(), expected.view()) < 1e-10);
    }

    #[test]
    fn unit_step_offset_base() {
        // Coding set {4, 5, 6} with d=3: wrap mode is 4 mod 3 = 1.
        let net = Network::cyclic_x_step(3, 1, 4, Variant::A).unwrap();
        let out = net.apply(&ket(6, 0, 3)).unwrap();
        assert!(out.fidelity(&ket(4, 0, 3)).unwrap() >= 1.0 - 1e-10);

        let b = Network::cyclic_x_step(3, 1, 4, Variant::B).unwrap();
        for ell in [4, 5, 6] {
            let expected = if ell == 6 { 4 } else { ell + 1 };
            let out = b.apply(&ket(ell, 0, 3)).unwrap();
            assert!(out.fidelity(&ket(expected, 0, 3)).unwrap() >= 1.0 - 1e-10);
        }
    }

    #[test]
    fn stepped_gate_with_sub_period_offset() {
        // Coding sets whose values are not multiples of p: the builders must
        // still produce an exact cyclic permutation with a decoupled mode
        // register.
        for (d, p, ell0) in [(2usize, 2u32, 1i64), (3, 2, 4), (3, 3, -5), (4, 3, 7)] {
            let sub = CodingSubspace::new(d, p, ell0).unwrap();
            for variant in [Variant::A, Variant::B] {
                let net = Network::cyclic_x_step(d, p, ell0, variant).unwrap();
                for ell in sub.values() {
                    let expected = sub.successor(ell).unwrap();
                    let out = net.apply(&ket(ell, 0, d)).unwrap();
                    assert!(
                        out.fidelity(&ket(expected, 0, d)).unwrap() >= 1.0 - 1e-10,
                        "d={d} p={p} ell0={ell0} {variant:?}: {ell} should map to {expected}"
                    );
                    assert!(out.mode_marginal()[0] >= 1.0 - 1e-10);
                }
            }
        }
    }

    #[test]
    fn variants_agree_on_coding_subspace() {
        let sub = CodingSubspace::new(3, 1, 4).unwrap();
        let a = Network::cyclic_x_step(3, 1, 4, Variant::A).unwrap();
        let b = Network::cyclic_x_step(3, 1, 4, Variant::B).unwrap();
        let wa = a.minimal_window(&sub).unwrap();
        let wb = b.minimal_window(&sub).unwrap();
        let window = wa.hull(wb);
        let coding: Vec<BasisLabel> = sub
            .values()
            .into_iter()
            .map(|ell| BasisLabel::new(ell, 0))
            .collect();
        let ma = a.matrix(window).unwrap().restrict(&coding, &coding).unwrap();
        let mb = b.matrix(window).unwrap().restrict(&coding, &coding).unwrap();
        assert!(max_abs_diff_up_to_phase(ma.view(), mb.view()) < 1e-10);
    }

    #[test]
    fn michelson_matches_mach_zehnder() {
        let mz = Network::cyclic_x(4).unwrap();
        let mi = Network::michelson(4, 1, 0, Variant::A).unwrap();
        let window = OamWindow::new(0, 4).unwrap();
        let m1 = mz.matrix(window).unwrap();
        let m2 = mi.matrix(window).unwrap();
        assert_eq!(m1.output, m2.output);
        assert!(max_abs_diff_up_to_phase(m1.matrix.view(), m2.matrix.view()) < 1e-10);
    }

    #[test]
    fn michelson_counts_single_sorter() {
        let net = Network::michelson(3, 2, 1, Variant::A).unwrap();
        let tally = net.tally();
        assert_eq!(tally.sorter_count, 1);
        assert_eq!(tally.fourier_count, 2);
        assert_eq!(tally.dove_phase_count, 2);
        // Sub-period offset 1 needs one extra folded plate besides +p, −pd.
        assert_eq!(tally.spp_count(), 3);

        let plain = Network::michelson(3, 1, 0, Variant::A).unwrap().tally();
        assert_eq!(plain.retroreflector_count, 2);
        assert_eq!(plain.circulator_count, 1);
        assert_eq!(plain.spp_orders, vec![1, -3]);
    }

    #[test]
    fn mach_zehnder_tally() {
        for d in 2..=6 {
            let tally = Network::cyclic_x(d).unwrap().tally();
            assert_eq!(tally.sorter_count, 2);
            assert_eq!(tally.spp_orders, vec![1, -(d as i64)]);
            assert_eq!(tally.fourier_count, 4);
            assert_eq!(tally.dove_phase_count, 2 * (d - 1));
        }
        let b = Network::cyclic_x_step(3, 1, 4, Variant::B).unwrap().tally();
        assert_eq!(b.spp_orders, vec![-1, 1, -3, 1]);
    }

    #[test]
    fn folded_pairs_are_adjoints() {
        for variant in [Variant::A, Variant::B] {
            let net = Network::michelson(4, 2, 3, variant).unwrap();
            for &(fwd, ret) in net.folded_reuse() {
                assert!(fwd < ret);
                assert_eq!(net.elements()[fwd].adjoint(), net.elements()[ret]);
            }
        }
    }

    #[test]
    fn michelson_gate_acts_correctly() {
        for (d, p, ell0) in [(4usize, 1u32, 0i64), (3, 2, 1), (2, 2, 1), (5, 3, -4)] {
            let sub = CodingSubspace::new(d, p, ell0).unwrap();
            for variant in [Variant::A, Variant::B] {
                let net = Network::michelson(d, p, ell0, variant).unwrap();
                for ell in sub.values() {
                    let expected = sub.successor(ell).unwrap();
                    let out = net.apply(&ket(ell, 0, d)).unwrap();
                    assert!(
                        out.fidelity(&ket(expected, 0, d)).unwrap() >= 1.0 - 1e-10,
                        "michelson d={d} p={p} ell0={ell0} {variant:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(Network::sorter(1, 1, false).is_err());
        assert!(Network::sorter(3, 0, false).is_err());
        assert!(Network::cyclic_x(1).is_err());
        assert!(Network::cyclic_x_step(3, 0, 0, Variant::A).is_err());
    }
}
