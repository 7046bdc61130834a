use linopt_core::klm::{
    apply_ns, csign_basic, csign_ideal, csign_teleported, ns_conditional_amplitudes, solve_ns_unitary,
};
use linopt_core::{Backend, Complex64, Occupation, SparseState};
use proptest::prelude::*;

fn two_qubit(amps: [Complex64; 4], modes: usize, a: usize, b: usize) -> SparseState {
    let mut s = SparseState::empty(modes);
    for (k, amp) in amps.into_iter().enumerate() {
        let mut occ = vec![0; modes];
        occ[a] = (k >> 1) as u32;
        occ[b] = (k & 1) as u32;
        s.add(Occupation(occ), amp).unwrap();
    }
    s.normalized()
}

fn flip(s: &SparseState, a: usize, b: usize) -> SparseState {
    s.clone().map_amplitudes(|o, x| if o.counts()[a] == 1 && o.counts()[b] == 1 { -x } else { x })
}

fn amp() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(r, i)| Complex64::new(r, i))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn ns_on_random_states(a in amp(), b in amp(), c in amp()) {
        prop_assume!(a.norm() + b.norm() + c.norm() > 1e-3);
        let input = SparseState::from_terms(1, [(vec![0], a), (vec![1], b), (vec![2], c)]
            .into_iter().map(|(o, x)| (Occupation(o), x))).unwrap().normalized();
        let r = apply_ns(&input, 0).unwrap();
        prop_assert!((r.success_probability() - 0.25).abs() < 1e-9);
        prop_assert!((r.total_probability() - 1.0).abs() < 1e-9);
        let expected = input.clone().map_amplitudes(|o, x| if o.counts() == [2] { -x } else { x });
        for br in r.successes() {
            prop_assert!(br.state.fidelity(&expected).unwrap() > 1.0 - 1e-9);
        }
    }

    #[test]
    fn basic_csign_on_random_qubits(x in [amp(), amp(), amp(), amp()]) {
        prop_assume!(x.iter().map(|z| z.norm()).sum::<f64>() > 1e-3);
        let input = two_qubit(x, 2, 0, 1);
        let r = csign_basic(&input, 0, 1).unwrap();
        prop_assert!((r.success_probability() - 1.0 / 16.0).abs() < 1e-9);
        for br in r.successes() {
            prop_assert!((br.state.inner_product(&flip(&input, 0, 1)).unwrap() - 1.0).norm() < 1e-9);
        }
    }
}

#[test]
fn ns_solver_agrees_with_closed_form_conditions() {
    let u = solve_ns_unitary().unwrap();
    let a = ns_conditional_amplitudes(&u);
    assert!((a[0] - 0.5).norm() < 1e-12 && (a[1] - 0.5).norm() < 1e-12 && (a[2] + 0.5).norm() < 1e-12);
}

#[test]
fn ns_on_embedded_mode_leaves_spectators_alone() {
    let s = SparseState::from_terms(
        3,
        [(vec![1, 2, 0], Complex64::new(0.6, 0.0)), (vec![0, 1, 1], Complex64::new(0.0, 0.8))]
            .into_iter()
            .map(|(o, x)| (Occupation(o), x)),
    )
    .unwrap();
    let r = apply_ns(&s, 1).unwrap();
    assert!((r.success_probability() - 0.25).abs() < 1e-12);
    let expected = s.clone().map_amplitudes(|o, x| if o.counts()[1] == 2 { -x } else { x });
    for br in r.successes() {
        assert!(br.state.approx_eq(&expected, 1e-9));
    }
}

#[test]
fn ideal_csign_is_deterministic() {
    let s = two_qubit([Complex64::new(0.5, 0.0); 4], 2, 0, 1);
    let r = csign_ideal(&s, 0, 1).unwrap();
    assert_eq!(r.branches.len(), 1);
    assert!(r.branches[0].state.approx_eq(&flip(&s, 0, 1), 1e-15));
}

#[test]
fn teleported_csign_embedded_in_larger_register() {
    let amps =
        [Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.5), Complex64::new(0.4, 0.0), Complex64::new(0.1, -0.6)];
    for n in 1..=3 {
        let input = two_qubit(amps, 4, 3, 1);
        let r = csign_teleported(&input, 3, 1, n).unwrap();
        let p = (n as f64 / (n as f64 + 1.0)).powi(2);
        assert!((r.success_probability() - p).abs() < 1e-9, "n={n}: {}", r.success_probability());
        assert!((r.total_probability() - 1.0).abs() < 1e-9);
        let expected = flip(&input, 3, 1);
        for br in r.successes() {
            assert_eq!(br.state.modes(), 4);
            assert!((br.state.inner_product(&expected).unwrap() - 1.0).norm() < 1e-9, "n={n} {}", br.outcome);
        }
    }
}

#[test]
fn backend_probabilities_increase_with_n() {
    let mut last = Backend::Basic.csign_probability();
    for n in 1..=6 {
        let p = Backend::Teleported(n).csign_probability();
        assert!(p > last);
        last = p;
    }
    assert_eq!(Backend::Ideal.csign_probability(), 1.0);
}

#[test]
fn csign_rejects_multiphoton_inputs() {
    let s = SparseState::basis(Occupation(vec![2, 0]));
    assert!(csign_basic(&s, 0, 1).is_err());
    assert!(csign_basic(&SparseState::basis(Occupation(vec![1, 0])), 0, 0).is_err());
}
