//! Property tests for the element and state invariants.

use num_complex::Complex64;
use num_rational::Ratio;
use proptest::prelude::*;

use oamx::element::Element;
use oamx::mesh::{decompose_rectangular, haar_unitary};
use oamx::network::{Network, Variant};
use oamx::state::{BasisLabel, PhotonState};
use oamx::verify::matrix_consistency_check;
use oamx::window::{max_abs_diff, OamWindow};

const D: usize = 3;

fn arb_amplitude() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im))
}

fn arb_state() -> impl Strategy<Value = PhotonState> {
    proptest::collection::vec(((-6i64..7, 0usize..D), arb_amplitude()), 1..6)
        .prop_filter_map("state must have nonzero norm", |entries| {
            let flat: Vec<(i64, usize, Complex64)> = entries
                .into_iter()
                .map(|((ell, mode), amp)| (ell, mode, amp))
                .collect();
            let state = PhotonState::superposition(D, &flat).ok()?;
            state.normalized().ok()
        })
}

fn arb_element() -> impl Strategy<Value = Element> {
    prop_oneof![
        (-4i64..5).prop_map(Element::spp),
        (-4i64..5, 0usize..D).prop_map(|(n, m)| Element::spp_on(n, m)),
        (-6i64..7, 1i64..4).prop_map(|(num, den)| Element::dove_phase(D, Ratio::new(num, den))),
        Just(Element::mode_fourier(D)),
        Just(Element::mode_fourier_inverse(D)),
        (1u32..4).prop_map(|p| Element::sorter_phases(D, p)),
        (
            0.0f64..std::f64::consts::FRAC_PI_2,
            0.0f64..std::f64::consts::TAU
        )
            .prop_map(|(theta, phi)| Element::beam_splitter(0, 2, theta, phi).unwrap()),
        (0usize..D, -7.0f64..7.0).prop_map(|(m, phi)| Element::mode_phase(m, phi)),
        (0usize..D).prop_map(|m| Element::RetroReflector { mode: m }),
        Just(Element::Circulator),
    ]
}

proptest! {
    #[test]
    fn elements_preserve_norm(e in arb_element(), s in arb_state()) {
        let out = e.apply(&s).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn adjoint_inverts(e in arb_element(), s in arb_state()) {
        let back = e.adjoint().apply(&e.apply(&s).unwrap()).unwrap();
        prop_assert!(back.fidelity(&s).unwrap() >= 1.0 - 1e-12);
    }

    #[test]
    fn inner_product_is_sesquilinear(
        a in arb_state(),
        b in arb_state(),
        c in arb_amplitude(),
    ) {
        // Scaling the ket scales the product linearly; the bra conjugates.
        let mut scaled_entries: Vec<(i64, usize, Complex64)> = Vec::new();
        for (label, amp) in b.iter() {
            scaled_entries.push((label.ell, label.mode, amp * c));
        }
        let scaled = PhotonState::superposition(D, &scaled_entries).unwrap();
        let lhs = a.inner_product(&scaled).unwrap();
        let rhs = c * a.inner_product(&b).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn marginal_sums_to_one(s in arb_state()) {
        let total: f64 = s.mode_marginal().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dense_and_sparse_routes_agree(elements in proptest::collection::vec(arb_element(), 0..6)) {
        let net = Network::custom(D, elements).unwrap();
        let window = OamWindow::new(-2, 2).unwrap();
        let residual = matrix_consistency_check(&net, window).unwrap();
        prop_assert!(residual <= 1e-12, "residual {residual}");
    }

    #[test]
    fn sorter_law(i in -12i64..13, j in 0usize..D) {
        let net = Network::sorter(D, 1, false).unwrap();
        let input = PhotonState::basis_state(i, j, D).unwrap();
        let out = net.apply(&input).unwrap();
        let expected_mode = (j as i64 + i).rem_euclid(D as i64) as usize;
        let expected = PhotonState::basis_state(i, expected_mode, D).unwrap();
        prop_assert!(out.fidelity(&expected).unwrap() >= 1.0 - 1e-12);
    }

    #[test]
    fn rectangular_mesh_round_trips(seed in 0u64..500, d in 2usize..9) {
        let mut rng = <rand_chacha::ChaCha12Rng as rand::SeedableRng>::seed_from_u64(seed);
        let u = haar_unitary(d, &mut rng);
        let mesh = decompose_rectangular(u.view()).unwrap();
        prop_assert_eq!(mesh.beamsplitter_count(), d * (d - 1) / 2);
        prop_assert!(max_abs_diff(mesh.matrix().view(), u.view()) <= 1e-9);
    }
}

/// Inverse round-trip on 100 seeded random states per element kind.
#[test]
fn adjoint_round_trips_per_element_kind() {
    use rand::{Rng, SeedableRng};
    let kinds: Vec<Element> = vec![
        Element::spp(3),
        Element::spp_on(-2, 1),
        Element::dove_phase(D, Ratio::new(2, 3)),
        Element::mode_fourier(D),
        Element::mode_fourier_inverse(D),
        Element::sorter_phases(D, 2),
        Element::beam_splitter(0, 1, 0.9, 2.3).unwrap(),
        Element::mode_phase(2, 1.1),
        Element::RetroReflector { mode: 0 },
        Element::Circulator,
    ];
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(31);
    for e in &kinds {
        for _ in 0..100 {
            let entries: Vec<(i64, usize, Complex64)> = (0..4)
                .map(|_| {
                    (
                        rng.random_range(-6i64..7),
                        rng.random_range(0..D),
                        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                    )
                })
                .collect();
            let Ok(state) = PhotonState::superposition(D, &entries)
                .and_then(|s| s.normalized())
            else {
                continue;
            };
            let back = e.adjoint().apply(&e.apply(&state).unwrap()).unwrap();
            assert!(
                back.fidelity(&state).unwrap() >= 1.0 - 1e-12,
                "{} failed the round trip",
                e.label()
            );
        }
    }
}

/// The step-1 phase bank is the same device as one Dove phase of power k on
/// each mode k: their window matrices coincide exactly.
#[test]
fn sorter_phases_equal_per_mode_dove_bank() {
    for d in 2..=6usize {
        let window = OamWindow::new(-3, 3).unwrap();
        let bank = Element::sorter_phases(d, 1).matrix(window, d).unwrap();
        let mut per_mode = ndarray::Array2::<Complex64>::eye(window.dim(d));
        for (idx, label) in window.labels(d).into_iter().enumerate() {
            let dove = Element::dove_phase(d, Ratio::new(label.mode as i64, 1));
            // Diagonal entry of the dove phase at this OAM value.
            let w = OamWindow::new(label.ell, label.ell).unwrap();
            let m = dove.matrix(w, d).unwrap();
            let sub_idx = w.index_of(BasisLabel::new(label.ell, label.mode), d).unwrap();
            per_mode[[idx, idx]] = m[[sub_idx, sub_idx]];
        }
        assert!(max_abs_diff(bank.view(), per_mode.view()) < 1e-14);
    }
}

/// Gate correctness at the top of the dimension range, beyond the dense
/// sweep in the acceptance suite.
#[test]
fn gate_sweep_high_dimension() {
    use oamx::network::Interferometer;
    use oamx::state::CodingSubspace;
    for d in [9usize, 10] {
        for (p, ell0) in [(1u32, -5i64), (2, 3), (3, 5)] {
            let sub = CodingSubspace::new(d, p, ell0).unwrap();
            for variant in [Variant::A, Variant::B] {
                for config in [Interferometer::MachZehnder, Interferometer::Michelson] {
                    let net = Network::for_gate(&sub, variant, config).unwrap();
                    for ell in sub.values() {
                        let input = PhotonState::basis_state(ell, 0, d).unwrap();
                        let out = net.apply(&input).unwrap();
                        let expected =
                            PhotonState::basis_state(sub.successor(ell).unwrap(), 0, d).unwrap();
                        assert!(
                            out.fidelity(&expected).unwrap() >= 1.0 - 1e-10,
                            "d={d} p={p} ell0={ell0} {variant:?} {config:?} ell={ell}"
                        );
                    }
                }
            }
        }
    }
}

/// Gate correctness across the documented parameter box, both variants and
/// topologies, including coding sets that are not multiples of the step.
#[test]
fn gate_sweep_small() {
    use oamx::network::Interferometer;
    use oamx::state::CodingSubspace;
    for d in 2..=4usize {
        for p in 1..=3u32 {
            for ell0 in -2i64..=2 {
                let sub = CodingSubspace::new(d, p, ell0).unwrap();
                for variant in [Variant::A, Variant::B] {
                    for config in [Interferometer::MachZehnder, Interferometer::Michelson] {
                        let net = Network::for_gate(&sub, variant, config).unwrap();
                        for ell in sub.values() {
                            let input = PhotonState::basis_state(ell, 0, d).unwrap();
                            let out = net.apply(&input).unwrap();
                            let expected = PhotonState::basis_state(
                                sub.successor(ell).unwrap(),
                                0,
                                d,
                            )
                            .unwrap();
                            assert!(
                                out.fidelity(&expected).unwrap() >= 1.0 - 1e-10,
                                "d={d} p={p} ell0={ell0} {variant:?} {config:?} ell={ell}"
                            );
                        }
                    }
                }
            }
        }
    }
}

/// Both correction placements realize the same unitary on the coding
/// subspace, up to a global phase.
#[test]
fn variants_agree_on_coding_subspace() {
    use oamx::state::CodingSubspace;
    use oamx::window::max_abs_diff_up_to_phase;
    for d in 2..=5usize {
        for p in 1..=3u32 {
            for ell0 in -3i64..=3 {
                let sub = CodingSubspace::new(d, p, ell0).unwrap();
                let a = Network::cyclic_x_step(d, p, ell0, Variant::A).unwrap();
                let b = Network::cyclic_x_step(d, p, ell0, Variant::B).unwrap();
                let window = a
                    .minimal_window(&sub)
                    .unwrap()
                    .hull(b.minimal_window(&sub).unwrap());
                let coding: Vec<BasisLabel> = sub
                    .values()
                    .into_iter()
                    .map(|ell| BasisLabel::new(ell, 0))
                    .collect();
                let ma = a.matrix(window).unwrap().restrict(&coding, &coding).unwrap();
                let mb = b.matrix(window).unwrap().restrict(&coding, &coding).unwrap();
                let diff = max_abs_diff_up_to_phase(ma.view(), mb.view());
                assert!(diff < 1e-10, "d={d} p={p} ell0={ell0}: {diff}");
            }
        }
    }
}

/// Applying the gate d times returns every coding ket to itself.
#[test]
fn gate_has_order_d() {
    use oamx::state::CodingSubspace;
    for (d, p, ell0) in [(3usize, 2u32, 1i64), (4, 1, -2), (5, 3, 2)] {
        let sub = CodingSubspace::new(d, p, ell0).unwrap();
        let net = Network::cyclic_x_step(d, p, ell0, Variant::A).unwrap();
        for ell in sub.values() {
            let mut state = PhotonState::basis_state(ell, 0, d).unwrap();
            for _ in 0..d {
                state = net.apply(&state).unwrap();
            }
            let back = PhotonState::basis_state(ell, 0, d).unwrap();
            assert!(state.fidelity(&back).unwrap() >= 1.0 - 1e-9);
        }
    }
}
