//! Values stated in closed form for the model, checked literally.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use abtransfer::catqubit::{
    apply_bitflip, one_qubit_coefficients, parity_apply, two_qubit_state, ParityPrefactor,
};
use abtransfer::dispersive::{ingoing_spin_state, ABPhase, DispersiveModel, Spin};
use abtransfer::dissipation::{lambda0_paper_closed_form, LindbladParams};
use abtransfer::encoding::{
    bit_of_phase, build_register, encode_string, storage_evolve, storage_period, Basis,
};
use abtransfer::hilbert::{coherent_state, inner_product, number_operator, FockSpace};
use abtransfer::projection::{
    hadamard_cat_gate, paper_projection_pattern, transfer_pipeline, transferred_cat,
};
use abtransfer::{Error, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn close(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() <= tol
}

#[test]
fn opposite_coherent_states_overlap() {
    let s = FockSpace::new(40).unwrap();
    let got = inner_product(
        &coherent_state(c(1.0, 0.0), s).unwrap(),
        &coherent_state(c(-1.0, 0.0), s).unwrap(),
    )
    .unwrap();
    assert!((got.re - 0.135335).abs() < 1e-6);
    assert!(close(got, c((-2.0f64).exp(), 0.0), 1e-9));
    for alpha in [c(0.5, 0.0), c(1.3, -0.4), c(0.0, 2.0)] {
        let got = inner_product(
            &coherent_state(alpha, s).unwrap(),
            &coherent_state(-alpha, s).unwrap(),
        )
        .unwrap();
        assert!(close(got, c((-2.0 * alpha.norm_sqr()).exp(), 0.0), 1e-10));
    }
}

#[test]
fn mean_photon_number_of_coherent_state() {
    let s = FockSpace::new(40).unwrap();
    let alpha = c(1.5, 0.8);
    let n = number_operator(s)
        .expectation(&coherent_state(alpha, s).unwrap())
        .unwrap();
    assert!((n.re - alpha.norm_sqr()).abs() < 1e-8);
}

#[test]
fn flux_and_injection() {
    assert!((ABPhase::from_flux_ratio(0.5).radians() - PI).abs() < 1e-15);
    let [d, u] = ingoing_spin_state(ABPhase::ZERO);
    assert!(close(d, c(FRAC_1_SQRT_2, 0.0), 1e-15) && close(u, c(FRAC_1_SQRT_2, 0.0), 1e-15));
}

#[test]
fn odd_cat_at_phase_pi() {
    let alpha = c(2.0, 0.0);
    let s = FockSpace::new(40).unwrap();
    let m = DispersiveModel::new(1.0, s).unwrap();
    let gate = hadamard_cat_gate(alpha, s).unwrap();
    let run = transfer_pipeline(ABPhase::new(PI), Spin::Down, alpha, &m, &gate).unwrap();
    let odd = transferred_cat(ABPhase::new(PI), Spin::Down, alpha, s).unwrap();
    let direct = abtransfer::hilbert::FieldVector::linear_combination(&[
        (c(1.0, 0.0), &coherent_state(-alpha, s).unwrap()),
        (c(-1.0, 0.0), &coherent_state(alpha, s).unwrap()),
    ])
    .unwrap();
    assert!(odd.fidelity(&direct).unwrap() > 1.0 - 1e-14);
    assert!(run.gated.fidelity(&odd).unwrap() >= 1.0 - 5e-4);
}

#[test]
fn projection_pattern_landmarks() {
    assert_eq!(paper_projection_pattern(ABPhase::ZERO).unwrap(), 0.0);
    assert!((paper_projection_pattern(ABPhase::new(PI)).unwrap() - 1.0).abs() < 1e-15);
    assert!(matches!(
        paper_projection_pattern(ABPhase::new(1.5 * PI)),
        Err(Error::PatternDivergence(_))
    ));
}

#[test]
fn one_qubit_at_quarter_phase() {
    let k = one_qubit_coefficients(ABPhase::new(PI / 2.0));
    assert!(close(k.c_alpha_prime, c(FRAC_1_SQRT_2, 0.0), 1e-15));
    assert!(close(k.c_alpha[0], c(0.0, FRAC_1_SQRT_2), 1e-15));
    assert!(close(k.c_alpha[1], c(0.0, -FRAC_1_SQRT_2), 1e-15));
}

#[test]
fn two_qubit_coefficients() {
    let s = two_qubit_state(ABPhase::new(PI), c(2.0, 0.0));
    let [a, b, cc, d] = s.coeffs;
    assert!(a.norm() < 1e-16 && cc.norm() < 1e-16);
    assert!((b.norm() - FRAC_1_SQRT_2).abs() < 1e-15);
    assert!((d.norm() - FRAC_1_SQRT_2).abs() < 1e-15);

    let s = two_qubit_state(ABPhase::new(0.7), c(2.0, 0.0));
    assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
    let f = apply_bitflip(&s);
    let [a, b, cc, d] = s.coeffs;
    assert_eq!(f.coeffs, [a, -b, cc, -d]);
}

#[test]
fn parity_eigenvalue_conventions() {
    let s = two_qubit_state(ABPhase::new(PI / 3.0), c(2.0, 0.0));
    let (_, ev) = parity_apply(&s, ParityPrefactor::InverseAlpha).unwrap();
    assert!(close(ev, c(-1.0, 0.0), 1e-10));
    let (_, ev) = parity_apply(&s, ParityPrefactor::Literal).unwrap();
    assert!(close(ev, c(-4.0, 0.0), 1e-10));
}

#[test]
fn bit_function() {
    assert!(!bit_of_phase(None));
    assert!(bit_of_phase(Some(&ABPhase::new(PI / 2.0))));
    assert!(!bit_of_phase(Some(&ABPhase::new(1e-15))));
}

#[test]
fn string_10110() {
    let seq = encode_string(&"10110".parse().unwrap(), ABPhase::new(PI)).unwrap();
    let got: Vec<Option<f64>> = seq.phases.iter().map(|p| p.map(|p| p.radians())).collect();
    assert_eq!(got, vec![Some(PI), None, Some(PI), Some(PI), None]);
    assert_eq!(
        serde_json::to_string(&seq).unwrap(),
        "[3.141592653589793,null,3.141592653589793,3.141592653589793,null]"
    );

    let reg = build_register(&seq, Basis::Abstract).unwrap();
    for k in [1, 4] {
        let [x, y] = reg.slot_coefficients(k);
        assert!(close(x, c(FRAC_1_SQRT_2, 0.0), 1e-15) && close(y, c(FRAC_1_SQRT_2, 0.0), 1e-15));
    }
    let t1 = storage_period(1.0, 1).unwrap();
    let back = storage_evolve(&reg, 1.0, t1).unwrap();
    assert!((reg.fidelity(&back).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn lambda0_closed_form_at_origin() {
    let p = LindbladParams {
        kappa: 0.4,
        n_bar: 0.3,
        gamma: 2.0,
        lambda0_init: 0.75,
        n_alpha: 1,
        omega_t: 1.0,
        alpha: c(2.0, 0.0),
    };
    assert_eq!(lambda0_paper_closed_form(&p, 0.0), 0.75);
}
