//! AB-modulated qubit algebra on the logical basis `{|−α⟩, |α⟩}`.
//!
//! Coefficients are handled as if the logical basis were orthonormal; the
//! Gram matrix travels with the state for embedding into the Fock space,
//! where the overlap `e^{-2|α|²}` becomes visible.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::Matrix2;

use crate::dispersive::{ABPhase, CompositeOperator, SpinFieldVector};
use crate::hilbert::{annihilation, coherent_state, FieldVector, FockSpace};
use crate::{Error, Result, C64};

/// Distance from the arctangent branch points `±i` below which the mixing
/// angles are reported as singular.
pub const MIXING_BRANCH_TOL: f64 = 1e-5;

/// Complex mixing angles `ϑ± = atan(±(1 − e^{iφ}) / (1 + e^{iφ}))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingAngles {
    pub theta_plus: C64,
    pub theta_minus: C64,
}

impl MixingAngles {
    /// `cos²ϑ + sin²ϑ − 1` for both angles, as complex numbers.
    pub fn identity_residual(&self) -> [C64; 2] {
        let r = |t: C64| t.cos() * t.cos() + t.sin() * t.sin() - 1.0;
        [r(self.theta_plus), r(self.theta_minus)]
    }
}

/// One-qubit cat coefficients `|φ±⟩ ∝ cos(φ/2)|α'⟩ ± i sin(φ/2)|α⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatCoefficients {
    pub c_alpha_prime: C64,
    /// Coefficient of `|α⟩` for the `+` and `−` branches.
    pub c_alpha: [C64; 2],
    /// Absent where the arctangent is singular.
    pub mixing: Option<MixingAngles>,
}

/// Evaluates `ϑ±`; singular at `φ = π` (vanishing denominator) and where the
/// ratio `−i tan(φ/2)` reaches `∓i`.
pub fn mixing_angles(phase: ABPhase) -> Result<MixingAngles> {
    let e = phase.factor();
    let one = C64::new(1.0, 0.0);
    let den = one + e;
    if den.norm() < 1e-12 {
        return Err(Error::MixingAngleSingular(phase.radians()));
    }
    let ratio = (one - e) / den;
    let i = C64::new(0.0, 1.0);
    if (ratio - i).norm() < MIXING_BRANCH_TOL || (ratio + i).norm() < MIXING_BRANCH_TOL {
        return Err(Error::MixingAngleSingular(phase.radians()));
    }
    Ok(MixingAngles {
        theta_plus: ratio.atan(),
        theta_minus: (-ratio).atan(),
    })
}

pub fn one_qubit_coefficients(phase: ABPhase) -> CatCoefficients {
    let half = phase.radians() / 2.0;
    let is = C64::new(0.0, half.sin());
    CatCoefficients {
        c_alpha_prime: C64::new(half.cos(), 0.0),
        c_alpha: [is, -is],
        mixing: mixing_angles(phase).ok(),
    }
}

/// Overlap matrix of `(|−α⟩, |α⟩)`: unit diagonal, `e^{-2|α|²}` off it.
pub fn logical_gram(alpha: C64) -> Matrix2<C64> {
    let ov = C64::new((-2.0 * alpha.norm_sqr()).exp(), 0.0);
    Matrix2::new(C64::new(1.0, 0.0), ov, ov, C64::new(1.0, 0.0))
}

/// Coefficients `(a, b, c, d)` on
/// `(|−α⟩|↓⟩, |α⟩|↓⟩, |−α⟩|↑⟩, |α⟩|↑⟩)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState {
    pub coeffs: [C64; 4],
    pub alpha: C64,
    pub gram: Matrix2<C64>,
}

impl TwoQubitState {
    pub fn new(coeffs: [C64; 4], alpha: C64) -> Self {
        Self {
            coeffs,
            alpha,
            gram: logical_gram(alpha),
        }
    }

    /// `Σ|coeff|²` in the orthonormal-logical convention. For the output of
    /// [`apply_annihilation`] this is the squared radius `|α|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Squared norm with the Gram matrix taken into account.
    pub fn gram_norm_sqr(&self) -> f64 {
        let [a, b, c, d] = self.coeffs;
        let g = &self.gram;
        let block = |x: C64, y: C64| {
            (x.conj() * x * g[(0, 0)]
                + x.conj() * y * g[(0, 1)]
                + y.conj() * x * g[(1, 0)]
                + y.conj() * y * g[(1, 1)])
                .re
        };
        block(a, b) + block(c, d)
    }

    /// Lift into the truncated spin ⊗ field space.
    pub fn embed(&self, space: FockSpace) -> Result<SpinFieldVector> {
        let minus = coherent_state(-self.alpha, space)?;
        let plus = coherent_state(self.alpha, space)?;
        let [a, b, c, d] = self.coeffs;
        let down = FieldVector::linear_combination(&[(a, &minus), (b, &plus)])?;
        let up = FieldVector::linear_combination(&[(c, &minus), (d, &plus)])?;
        SpinFieldVector::from_blocks(&down, &up)
    }
}

/// `N = 1/√(2|1+e^{iφ}|² + 2|1−e^{iφ}|²) = 1/(2√2)`
pub fn two_qubit_normalization(phase: ABPhase) -> f64 {
    let e = phase.factor();
    let one = C64::new(1.0, 0.0);
    1.0 / (2.0 * (one + e).norm_sqr() + 2.0 * (one - e).norm_sqr()).sqrt()
}

/// `a = c = 2N e^{−iφ/2} cos(φ/2)`, `b = −d = 2N e^{−iφ/2} i sin(φ/2)`.
pub fn two_qubit_state(phase: ABPhase, alpha: C64) -> TwoQubitState {
    let n = two_qubit_normalization(phase);
    let half = phase.radians() / 2.0;
    let pre = C64::from_polar(2.0 * n, -half);
    let a = pre * half.cos();
    let b = pre * C64::new(0.0, half.sin());
    TwoQubitState::new([a, b, a, -b], alpha)
}

/// The same state written through `(1 ± e^{iφ})`:
/// `N[(1+e)|−α⟩|↓⟩ − (1−e)|α⟩|↓⟩ + (1+e)|−α⟩|↑⟩ + (1−e)|α⟩|↑⟩]`.
/// Equal to [`two_qubit_state`] up to the global phase `e^{iφ}`.
pub fn two_qubit_dispersive_form(phase: ABPhase, alpha: C64) -> TwoQubitState {
    let n = two_qubit_normalization(phase);
    let e = phase.factor();
    let one = C64::new(1.0, 0.0);
    let p = (one + e) * n;
    let m = (one - e) * n;
    TwoQubitState::new([p, -m, p, m], alpha)
}

/// `â` on the logical basis: `|−α⟩ ↦ −α|−α⟩`, `|α⟩ ↦ α|α⟩`. Not
/// renormalized; the result has radius `|α|`.
pub fn apply_annihilation(state: &TwoQubitState) -> Result<TwoQubitState> {
    let al = state.alpha;
    if al.norm() == 0.0 {
        return Err(Error::DegenerateLogicalBasis);
    }
    let [a, b, c, d] = state.coeffs;
    Ok(TwoQubitState {
        coeffs: [-al * a, al * b, -al * c, al * d],
        ..*state
    })
}

/// Spin bit-flip `Π̂ = σₓ ⊗ I`: `(a, b, c, d) ↦ (c, d, a, b)`.
///
/// Π̂ acts on the spin, not on the field; only the spin flip reproduces the
/// primed coefficients `a' = c, b' = d, c' = a, d' = b`.
pub fn apply_bitflip(state: &TwoQubitState) -> TwoQubitState {
    let [a, b, c, d] = state.coeffs;
    TwoQubitState {
        coeffs: [c, d, a, b],
        ..*state
    }
}

/// Scalar multiplying `Π̂ â` in the parity operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParityPrefactor {
    /// `1/α`, giving eigenvalue −1.
    InverseAlpha,
    /// `|α|²/α`, giving eigenvalue −|α|².
    Literal,
}

impl ParityPrefactor {
    pub fn value(self, alpha: C64) -> C64 {
        match self {
            ParityPrefactor::InverseAlpha => alpha.inv(),
            ParityPrefactor::Literal => alpha.inv() * alpha.norm_sqr(),
        }
    }
}

/// Relative residual allowed when extracting a parity eigenvalue.
pub const PARITY_EIGEN_TOL: f64 = 1e-10;

/// `P̂ = Π̂ â · prefactor`; returns `P̂|ψ⟩` and the eigenvalue ratio.
pub fn parity_apply(
    state: &TwoQubitState,
    prefactor: ParityPrefactor,
) -> Result<(TwoQubitState, C64)> {
    let mut out = apply_bitflip(&apply_annihilation(state)?);
    let k = prefactor.value(state.alpha);
    for c in out.coeffs.iter_mut() {
        *c *= k;
    }
    let (pivot, _) = state
        .coeffs
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
        .expect("four coefficients");
    let input = state.coeffs[pivot];
    if input.norm() == 0.0 {
        return Err(Error::NotInParityEigenspace(f64::INFINITY));
    }
    let ratio = out.coeffs[pivot] / input;
    let scale = state.norm_sqr().sqrt() * ratio.norm().max(1.0);
    let residual = out
        .coeffs
        .iter()
        .zip(&state.coeffs)
        .map(|(o, i)| (o - ratio * i).norm())
        .fold(0.0, f64::max)
        / scale;
    if residual > PARITY_EIGEN_TOL {
        return Err(Error::NotInParityEigenspace(residual));
    }
    Ok((out, ratio))
}

/// `â` lifted to spin ⊗ field.
pub fn annihilation_composite(space: FockSpace) -> CompositeOperator {
    CompositeOperator::on_field(&annihilation(space))
}

/// `σₓ ⊗ I` on spin ⊗ field.
pub fn bitflip_composite(space: FockSpace) -> CompositeOperator {
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let sx = Matrix2::new(zero, one, one, zero);
    CompositeOperator::kron(&sx, &crate::hilbert::FieldOperator::identity(space))
}

/// `(1, e^{iφ})/√2`, the single-slot logical qubit on `(|−α⟩, |α⟩)` or
/// `(|0⟩, |1⟩)`.
pub fn phase_qubit(phase: ABPhase) -> [C64; 2] {
    [C64::new(FRAC_1_SQRT_2, 0.0), phase.factor() * FRAC_1_SQRT_2]
}
