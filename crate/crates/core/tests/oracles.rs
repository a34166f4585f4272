//! Library results checked against values computed here from scratch.

use std::f64::consts::PI;

use abtransfer::dispersive::{
    analytic_overlap, evolve_analytic, evolve_numeric, interaction_hamiltonian, joint_state,
    ABPhase, DispersiveModel, Spin, SpinFieldVector,
};
use abtransfer::dissipation::{
    ansatz_operators, final_density, lambda0_ode_solve, Lambda0Source, LindbladParams,
};
use abtransfer::hilbert::{
    annihilation, coherent_state, coherent_tail_mass, inner_product, FieldVector, FockSpace,
};
use abtransfer::projection::{hadamard_cat_gate, project_spin};
use abtransfer::C64;
use nalgebra::DVector;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `e^{-|α|²/2} αⁿ/√n!` from log-space factorials.
fn coherent_oracle(alpha: C64, cutoff: usize) -> DVector<C64> {
    let r = alpha.norm();
    if r == 0.0 {
        return DVector::from_fn(cutoff, |n, _| C64::new(if n == 0 { 1.0 } else { 0.0 }, 0.0));
    }
    let mut ln_fact = 0.0;
    DVector::from_fn(cutoff, |n, _| {
        if n > 0 {
            ln_fact += (n as f64).ln();
        }
        let ln_mag = -0.5 * r * r + n as f64 * r.ln() - 0.5 * ln_fact;
        C64::from_polar(ln_mag.exp(), n as f64 * alpha.arg())
    })
}

fn space(cutoff: usize) -> FockSpace {
    FockSpace::new(cutoff).unwrap()
}

#[test]
fn coherent_amplitudes_match_closed_form() {
    for alpha in [c(0.3, 0.0), c(2.0, 0.0), c(-1.2, 0.7), c(0.0, 2.5)] {
        let v = coherent_state(alpha, space(50)).unwrap();
        let want = coherent_oracle(alpha, 50);
        assert!((v.amplitudes() - &want).norm() < 1e-13, "alpha {alpha}");
    }
}

#[test]
fn tail_mass_matches_poisson_sum() {
    let alpha = c(2.0, 0.0);
    let mean = alpha.norm_sqr();
    let mut p = (-mean).exp();
    let mut kept = 0.0;
    for n in 0..40 {
        if n > 0 {
            p *= mean / n as f64;
        }
        kept += p;
    }
    let tail = coherent_tail_mass(alpha, 40);
    assert!((tail - (1.0 - kept)).abs() < 1e-15);
    let v = coherent_state(alpha, space(40)).unwrap();
    assert!((v.norm_sqr() - 1.0).abs() < 1e-12);
}

#[test]
fn vacuum_amplitude() {
    for alpha in [c(0.7, 0.2), c(1.5, -1.0)] {
        let v = coherent_state(alpha, space(40)).unwrap();
        let vac = FieldVector::basis(space(40), 0).unwrap();
        let got = inner_product(&vac, &v).unwrap();
        assert!((got - c((-alpha.norm_sqr() / 2.0).exp(), 0.0)).norm() < 1e-15);
    }
}

#[test]
fn annihilation_eigenvector_within_truncation() {
    for alpha in [c(0.5, 0.0), c(2.0, 0.0), c(1.0, 1.0)] {
        let s = space(40);
        let v = coherent_state(alpha, s).unwrap();
        let av = annihilation(s).apply(&v).unwrap();
        assert!((av.amplitudes() - v.amplitudes() * alpha).norm() < 1e-8);
    }
}

#[test]
fn hamiltonian_spectrum_at_cutoff_three() {
    let beta = 0.8;
    let m = DispersiveModel::new(beta, space(3)).unwrap();
    let h = interaction_hamiltonian(&m);
    let mut ev: Vec<f64> = h
        .matrix()
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    let want = [0.0, 0.0, 0.0, 0.0, 2.0 * beta, 4.0 * beta];
    for (g, w) in ev.iter().zip(want) {
        assert!((g - w).abs() < 1e-12, "{ev:?}");
    }
    // ξ̂ couples (↑, n) to (↓, n) with strength βn
    for n in 0..3 {
        assert!((h.matrix()[(3 + n, n)] - c(beta * n as f64, 0.0)).norm() < 1e-15);
    }
}

/// `½(|α'⟩ ± |α⟩)` blocks built by hand for `|↑⟩|α⟩`.
#[test]
fn spin_up_closed_form_at_quarter_period() {
    let s = space(40);
    let m = DispersiveModel::new(1.0, s).unwrap();
    let t = PI / 2.0;
    let one = coherent_oracle(c(1.0, 0.0), 40);
    let minus_one = coherent_oracle(c(-1.0, 0.0), 40);
    let up_block = (&minus_one + &one) * c(0.5, 0.0);
    let down_block = (&minus_one - &one) * c(0.5, 0.0);
    let mut want = DVector::zeros(80);
    want.rows_mut(0, 40).copy_from(&down_block);
    want.rows_mut(40, 40).copy_from(&up_block);
    let want = SpinFieldVector::from_amplitudes(want, s).unwrap();
    let got = evolve_analytic(Spin::Up, c(1.0, 0.0), &m, t).unwrap();
    assert!((got.amplitudes() - want.amplitudes()).norm() < 1e-14);
    let num = evolve_numeric(
        &SpinFieldVector::basis_product(Spin::Up, &coherent_state(c(1.0, 0.0), s).unwrap()),
        &m,
        t,
    )
    .unwrap();
    assert!(num.fidelity(&want).unwrap() > 1.0 - 1e-8);
}

#[test]
fn full_period_is_identity_on_field() {
    let s = space(40);
    let m = DispersiveModel::new(1.3, s).unwrap();
    let a = coherent_state(c(1.5, 0.5), s).unwrap();
    let input = SpinFieldVector::basis_product(Spin::Up, &a);
    let out = evolve_numeric(&input, &m, PI / 1.3).unwrap();
    assert!(out.fidelity(&input).unwrap() > 1.0 - 1e-8);
}

#[test]
fn overlap_at_eighth_period() {
    let m = DispersiveModel::new(1.0, space(40)).unwrap();
    let got = analytic_overlap(c(1.0, 0.0), &m, PI / 4.0);
    assert!((got - c(-1.0, 1.0).exp()).norm() < 1e-15);
    let a = coherent_state(c(1.0, 0.0), m.space()).unwrap();
    let ap = coherent_state(m.rotated_alpha(c(1.0, 0.0), PI / 4.0), m.space()).unwrap();
    assert!((inner_product(&ap, &a).unwrap() - got).norm() < 1e-12);
}

#[test]
fn joint_state_matches_evolution_of_ingoing_spin() {
    let s = space(40);
    let m = DispersiveModel::new(1.0, s).unwrap();
    let alpha = c(2.0, 0.0);
    let phase = ABPhase::new(PI / 2.0);
    let a = coherent_state(alpha, s).unwrap();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let input = SpinFieldVector::product([c(r, 0.0), phase.factor() * r], &a);
    let num = evolve_numeric(&input, &m, PI / 4.0).unwrap();
    let joint = joint_state(phase, alpha, &m, PI / 4.0).unwrap();
    assert!(num.fidelity(&joint).unwrap() > 1.0 - 1e-8);
}

/// Post-measurement field for the spin block carrying `(1+e)|α'⟩ + (1−e)|α⟩`.
#[test]
fn projected_field_matches_direct_superposition() {
    let s = space(40);
    let m = DispersiveModel::new(1.0, s).unwrap();
    let alpha = c(2.0, 0.0);
    let phase = ABPhase::new(PI / 2.0);
    let psi = joint_state(phase, alpha, &m, m.transfer_time()).unwrap();
    let post = project_spin(&psi, Spin::Down).unwrap().post_field;
    let e = phase.factor();
    let one = c(1.0, 0.0);
    let want = coherent_oracle(-alpha, 40) * (one + e) + coherent_oracle(alpha, 40) * (one - e);
    let want = FieldVector::from_amplitudes(want).unwrap();
    assert!(post.fidelity(&want).unwrap() > 1.0 - 1e-8);
}

#[test]
fn gate_rows_against_gram_algebra() {
    let s = space(40);
    let alpha = c(2.0, 0.0);
    let gate = hadamard_cat_gate(alpha, s).unwrap();
    let m = FieldVector::from_amplitudes(coherent_oracle(-alpha, 40)).unwrap();
    let p = FieldVector::from_amplitudes(coherent_oracle(alpha, 40)).unwrap();
    let ov = (-2.0 * alpha.norm_sqr()).exp();

    // U|−α⟩ = [(1 + ov)|−α⟩ + (1 − ov)|α⟩]/√2 with real overlap ov
    let out = gate.apply(&m).unwrap();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let want = FieldVector::linear_combination(&[
        (c(r * (1.0 + ov), 0.0), &m),
        (c(r * (1.0 - ov), 0.0), &p),
    ])
    .unwrap();
    assert!((out.amplitudes() - want.amplitudes()).norm() < 1e-12);

    let even = FieldVector::linear_combination(&[(c(1.0, 0.0), &m), (c(1.0, 0.0), &p)])
        .unwrap()
        .normalized()
        .unwrap();
    let out = gate.apply(&even).unwrap().normalized().unwrap();
    assert!(1.0 - out.fidelity(&m).unwrap() <= 5e-4);
    assert!(gate.unitarity_deviation > 0.0 && gate.unitarity_deviation < 1e-3);
}

fn lindblad(gamma: f64) -> LindbladParams {
    LindbladParams {
        kappa: 0.3,
        n_bar: 0.4,
        gamma,
        lambda0_init: 0.9,
        n_alpha: 1,
        omega_t: 1.0,
        alpha: c(2.0, 0.0),
    }
}

#[test]
fn lambda0_without_dissipation_coefficient() {
    let p = lindblad(0.0);
    let grid: Vec<f64> = (0..=50).map(|k| k as f64 * 0.4).collect();
    let l = lambda0_ode_solve(&p, &grid).unwrap();
    let rate = p.kappa2().powi(2) / 8.0 * p.occupation_gap();
    for (t, v) in grid.iter().zip(l) {
        let want = 0.9 * (-rate * t).exp();
        assert!((v - want).abs() <= 1e-8 * want);
    }
}

#[test]
fn ansatz_action_on_coherent_state() {
    let s = space(40);
    let m = DispersiveModel::new(1.0, s).unwrap();
    let p = lindblad(0.5);
    let phase = ABPhase::new(PI / 2.0);
    let alpha = c(1.0, 0.0);
    let p = LindbladParams { alpha, ..p };
    let t = PI / 4.0;
    let (l1, _) = ansatz_operators(t, phase, &p, &m).unwrap();
    let a = coherent_state(alpha, s).unwrap();
    let got = l1
        .apply(&SpinFieldVector::basis_product(Spin::Down, &a))
        .unwrap();

    let lam = lambda0_ode_solve(&p, &[0.0, t]).unwrap()[1];
    let scale = lam * (1.0 + (-0.5 * t).exp()) * alpha.norm_sqr();
    let e = phase.factor();
    let one = c(1.0, 0.0);
    // e^{−2in̂βt}|α⟩ = |e^{−2iβt}α⟩
    let rotated = coherent_oracle(alpha * C64::from_polar(1.0, -2.0 * t), 40);
    let up = (rotated * ((one + e) * 0.25) - coherent_oracle(alpha, 40) * ((one - e) * 0.25))
        * c(scale, 0.0);
    assert!(got.block(Spin::Down).norm_sqr() < 1e-30);
    assert!((got.block(Spin::Up).amplitudes() - up).norm() < 1e-8);
}

#[test]
fn final_density_weight_and_blocks() {
    let p = LindbladParams {
        n_alpha: 2,
        alpha: c(3.0, 0.0),
        ..lindblad(0.2)
    };
    let s = space(6);
    let phi = 1.1;
    let t = 2.0;
    let rho = final_density(t, ABPhase::new(phi), &p, s, Lambda0Source::PaperClosedForm).unwrap();
    let lam = abtransfer::dissipation::lambda0_paper_closed_form(&p, t);
    let w = 0.25 * lam.powi(2) * (1.0 + (-0.2 * t).exp()).powi(2) * 81.0;
    let m = rho.matrix();
    assert!((m[(2, 2)] - c(w, 0.0)).norm() < 1e-12 * w);
    assert!((m[(8, 8)] - c(w, 0.0)).norm() < 1e-12 * w);
    assert!((m[(8, 2)] - C64::from_polar(w, phi)).norm() < 1e-12 * w);
    assert!((m[(2, 8)] - C64::from_polar(w, -phi)).norm() < 1e-12 * w);
    let others: f64 = m.iter().map(|x| x.norm()).sum::<f64>() - 4.0 * w;
    assert!(others.abs() < 1e-12 * w);
}
