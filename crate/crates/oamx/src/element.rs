//! Primitive optical elements as exact unitaries on [`PhotonState`].
//!
//! Conventions fixed here, which everything downstream depends on:
//!
//! * Mode Fourier gate: F|j⟩ = (1/√d)·Σ_k ω^{jk}|k⟩ with ω = exp(2πi/d);
//!   the inverse uses ω^{−jk}.
//! * Beamsplitter on modes (a, b): rows/columns ordered (a, b),
//!   [[cosθ, −e^{−iφ}·sinθ], [e^{iφ}·sinθ, cosθ]], θ ∈ [0, π/2], φ ∈ [0, 2π).
//! * Sorter phase bank: on mode k, OAM value ℓ picks up exp(2πi·ℓ·k/(p·d)).
//!
//! Composing F, the phase bank and F† routes |ℓ⟩|j⟩ → |ℓ⟩|j ⊕ ℓ/p⟩ whenever
//! p divides ℓ; other OAM values split into a superposition over output
//! modes, which is simulated faithfully rather than rejected.

use ndarray::{Array2, ArrayView2};
use num_complex::Complex64;
use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::state::{BasisLabel, PhotonState};
use crate::window::OamWindow;

const TAU: f64 = std::f64::consts::TAU;

/// exp(2πi·num/den) with the fraction reduced into [0, 1) first, so large
/// integer inputs lose no precision to argument wrapping.
pub(crate) fn root_of_unity(num: i128, den: i128) -> Complex64 {
    debug_assert!(den > 0);
    let reduced = num.rem_euclid(den);
    Complex64::from_polar(1.0, TAU * reduced as f64 / den as f64)
}

/// One primitive optical element.
#[derive(Clone, Debug, PartialEq)]
pub enum Element {
    /// Spiral phase plate: ℓ ↦ ℓ + order, on all modes or only on
    /// `control_mode` when set.
    Spp {
        order: i64,
        control_mode: Option<usize>,
    },
    /// Dove-prism phase ω^{ℓ·power} on OAM value ℓ, ω = exp(2πi/d).
    DovePhase { d: usize, power: Ratio<i64> },
    /// d-mode discrete Fourier transform on the spatial-mode register.
    ModeFourier { d: usize, inverse: bool },
    /// Mode-dependent phase bank exp(±2πi·ℓ·k/(step·d)) on mode k.
    SorterPhases { d: usize, step: u32, inverse: bool },
    /// Two-mode mixer in the convention documented at module level.
    BeamSplitter {
        mode_a: usize,
        mode_b: usize,
        theta: f64,
        phi: f64,
    },
    /// Scalar phase e^{iφ} on one spatial mode.
    ModePhase { mode: usize, phi: f64 },
    /// Net effect of a double reflection: identity on the simulated state.
    RetroReflector { mode: usize },
    /// Routing annotation separating input from output; identity unitary.
    Circulator,
}

fn canonical_phi(phi: f64) -> f64 {
    let p = phi.rem_euclid(TAU);
    // rem_euclid can return TAU itself for inputs just below zero.
    if p >= TAU {
        0.0
    } else {
        p
    }
}

impl Element {
    pub fn spp(order: i64) -> Self {
        Element::Spp {
            order,
            control_mode: None,
        }
    }

    pub fn spp_on(order: i64, control_mode: usize) -> Self {
        Element::Spp {
            order,
            control_mode: Some(control_mode),
        }
    }

    pub fn dove_phase(d: usize, power: Ratio<i64>) -> Self {
        Element::DovePhase { d, power }
    }

    pub fn mode_fourier(d: usize) -> Self {
        Element::ModeFourier { d, inverse: false }
    }

    pub fn mode_fourier_inverse(d: usize) -> Self {
        Element::ModeFourier { d, inverse: true }
    }

    pub fn sorter_phases(d: usize, step: u32) -> Self {
        Element::SorterPhases {
            d,
            step,
            inverse: false,
        }
    }

    pub fn beam_splitter(mode_a: usize, mode_b: usize, theta: f64, phi: f64) -> Result<Self> {
        if mode_a == mode_b {
            return Err(Error::InvalidArgument(
                "beamsplitter modes must be distinct".into(),
            ));
        }
        if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&theta) {
            return Err(Error::InvalidArgument(format!(
                "beamsplitter angle {theta} outside [0, π/2]"
            )));
        }
        Ok(Element::BeamSplitter {
            mode_a,
            mode_b,
            theta,
            phi: canonical_phi(phi),
        })
    }

    pub fn mode_phase(mode: usize, phi: f64) -> Self {
        Element::ModePhase {
            mode,
            phi: canonical_phi(phi),
        }
    }

    /// The element implementing the exact inverse unitary.
    pub fn adjoint(&self) -> Element {
        match *self {
            Element::Spp {
                order,
                control_mode,
            } => Element::Spp {
                order: -order,
                control_mode,
            },
            Element::DovePhase { d, power } => Element::DovePhase { d, power: -power },
            Element::ModeFourier { d, inverse } => Element::ModeFourier {
                d,
                inverse: !inverse,
            },
            Element::SorterPhases { d, step, inverse } => Element::SorterPhases {
                d,
                step,
                inverse: !inverse,
            },
            Element::BeamSplitter {
                mode_a,
                mode_b,
                theta,
                phi,
            } => Element::BeamSplitter {
                mode_a,
                mode_b,
                theta,
                phi: canonical_phi(phi + std::f64::consts::PI),
            },
            Element::ModePhase { mode, phi } => Element::ModePhase {
                mode,
                phi: canonical_phi(-phi),
            },
            Element::RetroReflector { mode } => Element::RetroReflector { mode },
            Element::Circulator => Element::Circulator,
        }
    }

    /// OAM shift this element performs: (order, affected mode), if any.
    pub fn oam_shift(&self) -> Option<(i64, Option<usize>)> {
        match *self {
            Element::Spp {
                order,
                control_mode,
            } if order != 0 => Some((order, control_mode)),
            _ => None,
        }
    }

    /// Short human-readable label for listings.
    pub fn label(&self) -> String {
        match self {
            Element::Spp {
                order,
                control_mode: None,
            } => format!("SPP({order:+})"),
            Element::Spp {
                order,
                control_mode: Some(m),
            } => format!("SPP({order:+})@mode{m}"),
            Element::DovePhase { d, power } => format!("Z_{d}^{power}"),
            Element::ModeFourier { d, inverse: false } => format!("F_{d}"),
            Element::ModeFourier { d, inverse: true } => format!("F_{d}^-1"),
            Element::SorterPhases {
                d,
                step,
                inverse: false,
            } => format!("phases(d={d},p={step})"),
            Element::SorterPhases {
                d,
                step,
                inverse: true,
            } => format!("phases(d={d},p={step})^-1"),
            Element::BeamSplitter {
                mode_a,
                mode_b,
                theta,
                phi,
            } => format!("BS({mode_a},{mode_b};theta={theta:.4},phi={phi:.4})"),
            Element::ModePhase { mode, phi } => format!("phase({phi:.4})@mode{mode}"),
            Element::RetroReflector { mode } => format!("retro@mode{mode}"),
            Element::Circulator => "circulator".into(),
        }
    }

    pub(crate) fn check_dims(&self, state_d: usize) -> Result<()> {
        let bad_mode = |mode: usize| Error::ModeOutOfRange { mode, d: state_d };
        match *self {
            Element::Spp {
                control_mode: Some(m),
                ..
            } if m >= state_d => Err(bad_mode(m)),
            Element::ModeFourier { d, .. } | Element::SorterPhases { d, .. }
                if d != state_d =>
            {
                Err(Error::DimensionMismatch {
                    element_d: d,
                    state_d,
                })
            }
            Element::BeamSplitter { mode_a, mode_b, .. } => {
                if mode_a >= state_d {
                    Err(bad_mode(mode_a))
                } else if mode_b >= state_d {
                    Err(bad_mode(mode_b))
                } else {
                    Ok(())
                }
            }
            Element::ModePhase { mode, .. } | Element::RetroReflector { mode }
                if mode >= state_d =>
            {
                Err(bad_mode(mode))
            }
            _ => Ok(()),
        }
    }

    /// Diagonal phase on a basis ket, for the phase-only variants.
    fn diagonal_phase(&self, label: BasisLabel) -> Option<Complex64> {
        match *self {
            Element::DovePhase { d, power } => Some(root_of_unity(
                label.ell as i128 * *power.numer() as i128,
                *power.denom() as i128 * d as i128,
            )),
            Element::SorterPhases { d, step, inverse } => {
                let num = label.ell as i128 * label.mode as i128;
                let den = step as i128 * d as i128;
                Some(root_of_unity(if inverse { -num } else { num }, den))
            }
            Element::ModePhase { mode, phi } => Some(if label.mode == mode {
                Complex64::from_polar(1.0, phi)
            } else {
                Complex64::new(1.0, 0.0)
            }),
            _ => None,
        }
    }

    /// Apply the element's unitary to a state.
    pub fn apply(&self, s: &PhotonState) -> Result<PhotonState> {
        let d = s.mode_count();
        self.check_dims(d)?;
        match *self {
            Element::Spp {
                order,
                control_mode,
            } => {
                let mut out = PhotonState::zero(d);
                for (label, amp) in s.iter() {
                    let shifted = match control_mode {
                        Some(m) if label.mode != m => *label,
                        _ => BasisLabel::new(label.ell + order, label.mode),
                    };
                    out.add(shifted, *amp);
                }
                Ok(out)
            }
            Element::DovePhase { .. }
            | Element::SorterPhases { .. }
            | Element::ModePhase { .. } => {
                let mut out = PhotonState::zero(d);
                for (label, amp) in s.iter() {
                    let phase = self.diagonal_phase(*label).expect("diagonal variant");
                    out.add(*label, amp * phase);
                }
                Ok(out)
            }
            Element::ModeFourier { d: fd, inverse } => {
                let scale = 1.0 / (fd as f64).sqrt();
                let mut out = PhotonState::zero(d);
                for (label, amp) in s.iter() {
                    for k in 0..fd {
                        let num = (label.mode * k) as i128;
                        let w = root_of_unity(if inverse { -num } else { num }, fd as i128);
                        out.add(BasisLabel::new(label.ell, k), amp * w * scale);
                    }
                }
                Ok(out.pruned())
            }
            Element::BeamSplitter {
                mode_a,
                mode_b,
                theta,
                phi,
            } => {
                let (c, sn) = (theta.cos(), theta.sin());
                let e_pos = Complex64::from_polar(1.0, phi);
                let e_neg = Complex64::from_polar(1.0, -phi);
                let mut out = PhotonState::zero(d);
                for (label, amp) in s.iter() {
                    if label.mode == mode_a {
                        out.add(BasisLabel::new(label.ell, mode_a), amp * c);
                        out.add(BasisLabel::new(label.ell, mode_b), amp * e_pos * sn);
                    } else if label.mode == mode_b {
                        out.add(BasisLabel::new(label.ell, mode_a), -amp * e_neg * sn);
                        out.add(BasisLabel::new(label.ell, mode_b), amp * c);
                    } else {
                        out.add(*label, *amp);
                    }
                }
                Ok(out.pruned())
            }
            Element::RetroReflector { .. } | Element::Circulator => Ok(s.clone()),
        }
    }

    /// Square matrix of the element on a fixed window, lexicographic basis.
    ///
    /// Fails with a window escape when an OAM shift would leave the window.
    /// Built entry-by-entry from the closed-form kernels, independently of
    /// [`Element::apply`], so the two can cross-check each other.
    pub fn matrix(&self, window: OamWindow, d: usize) -> Result<Array2<Complex64>> {
        self.check_dims(d)?;
        if let Some((order, _)) = self.oam_shift() {
            let escaping = if order > 0 { window.hi() } else { window.lo() };
            if !window.contains(escaping + order) {
                return Err(Error::WindowEscape {
                    ell: escaping,
                    shifted: escaping + order,
                    lo: window.lo(),
                    hi: window.hi(),
                });
            }
        }
        let dim = window.dim(d);
        let id = Array2::eye(dim);
        Ok(rect_action(self, d, window, window, id.view()))
    }
}

/// Compute E·M where E is the element's rectangular matrix from the basis of
/// `w_in` to the basis of `w_out`.
///
/// `w_out` must contain the image of every `w_in` ket under the element; the
/// network-matrix fold guarantees this by construction.
pub(crate) fn rect_action(
    e: &Element,
    d: usize,
    w_in: OamWindow,
    w_out: OamWindow,
    input: ArrayView2<Complex64>,
) -> Array2<Complex64> {
    let dim_in = w_in.dim(d);
    let dim_out = w_out.dim(d);
    let cols = input.ncols();
    debug_assert_eq!(input.nrows(), dim_in);
    let mut out = Array2::zeros((dim_out, cols));

    let mut route = |to: BasisLabel, factor: Complex64, from_row: usize| {
        let ro = w_out
            .index_of(to, d)
            .expect("output window must contain every image ket");
        let src = input.row(from_row);
        let mut dst = out.row_mut(ro);
        for c in 0..cols {
            dst[c] += factor * src[c];
        }
    };

    match *e {
        Element::Spp {
            order,
            control_mode,
        } => {
            for ri in 0..dim_in {
                let label = w_in.label_at(ri, d);
                let to = match control_mode {
                    Some(m) if label.mode != m => label,
                    _ => BasisLabel::new(label.ell + order, label.mode),
                };
                route(to, Complex64::new(1.0, 0.0), ri);
            }
        }
        Element::DovePhase { .. } | Element::SorterPhases { .. } | Element::ModePhase { .. } => {
            for ri in 0..dim_in {
                let label = w_in.label_at(ri, d);
                let phase = e.diagonal_phase(label).expect("diagonal variant");
                route(label, phase, ri);
            }
        }
        Element::ModeFourier { d: fd, inverse } => {
            let scale = 1.0 / (fd as f64).sqrt();
            for ri in 0..dim_in {
                let label = w_in.label_at(ri, d);
                for k in 0..fd {
                    let num = (label.mode * k) as i128;
                    let w = root_of_unity(if inverse { -num } else { num }, fd as i128);
                    route(BasisLabel::new(label.ell, k), w * scale, ri);
                }
            }
        }
        Element::BeamSplitter {
            mode_a,
            mode_b,
            theta,
            phi,
        } => {
            let (c, sn) = (theta.cos(), theta.sin());
            let e_pos = Complex64::from_polar(1.0, phi);
            let e_neg = Complex64::from_polar(1.0, -phi);
            for ri in 0..dim_in {
                let label = w_in.label_at(ri, d);
                if label.mode == mode_a {
                    route(label, Complex64::new(c, 0.0), ri);
                    route(BasisLabel::new(label.ell, mode_b), e_pos * sn, ri);
                } else if label.mode == mode_b {
                    route(BasisLabel::new(label.ell, mode_a), -e_neg * sn, ri);
                    route(label, Complex64::new(c, 0.0), ri);
                } else {
                    route(label, Complex64::new(1.0, 0.0), ri);
                }
            }
        }
        Element::RetroReflector { .. } | Element::Circulator => {
            for ri in 0..dim_in {
                route(w_in.label_at(ri, d), Complex64::new(1.0, 0.0), ri);
            }
        }
    }
    out
}
