//! AB-phased spin injection and the dispersive spin-photon interaction.
//!
//! Composite vectors are laid out as two field blocks, spin ↓ first then
//! spin ↑: index `spin * cutoff + n`. Only the interaction Hamiltonian
//! `H = β n̂ ⊗ ξ̂` is evolved (interaction picture); free-field phases are
//! dropped.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::hilbert::{coherent_state, FieldOperator, FieldVector, FockSpace};
use crate::{Error, Result, C64, NORM_TOL};

/// Aharonov-Bohm phase in radians. Stored unreduced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ABPhase {
    radians: f64,
}

impl ABPhase {
    pub const ZERO: ABPhase = ABPhase { radians: 0.0 };

    pub fn new(radians: f64) -> Self {
        Self { radians }
    }

    /// `φ_AB = 2π φ/φ₀` for an enclosed flux given in flux quanta.
    pub fn from_flux_ratio(flux_ratio: f64) -> Self {
        Self {
            radians: 2.0 * PI * flux_ratio,
        }
    }

    pub fn radians(&self) -> f64 {
        self.radians
    }

    /// Angle reduced into `[0, 2π)`.
    pub fn reduced(&self) -> f64 {
        self.radians.rem_euclid(2.0 * PI)
    }

    /// `e^{iφ_AB}`
    pub fn factor(&self) -> C64 {
        C64::from_polar(1.0, self.radians)
    }

    /// Equality modulo 2π within `tol` radians.
    pub fn approx_eq_mod_2pi(&self, other: &ABPhase, tol: f64) -> bool {
        let d = (self.radians - other.radians).rem_euclid(2.0 * PI);
        d <= tol || 2.0 * PI - d <= tol
    }
}

impl From<f64> for ABPhase {
    fn from(radians: f64) -> Self {
        Self::new(radians)
    }
}

/// Spin label of the outgoing electron.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spin {
    Down,
    Up,
}

impl Spin {
    pub fn index(self) -> usize {
        match self {
            Spin::Down => 0,
            Spin::Up => 1,
        }
    }

    pub fn flipped(self) -> Spin {
        match self {
            Spin::Down => Spin::Up,
            Spin::Up => Spin::Down,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Spin::Down => "down",
            Spin::Up => "up",
        }
    }
}

/// `β n̂ ⊗ ξ̂` on a given truncated space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersiveModel {
    beta: f64,
    space: FockSpace,
}

impl DispersiveModel {
    pub fn new(beta: f64, space: FockSpace) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidParameter {
                name: "beta",
                reason: format!("coupling must be finite and positive, got {beta}"),
            });
        }
        Ok(Self { beta, space })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    /// Interaction time giving `βt = π/2`, where `α' = -α`.
    pub fn transfer_time(&self) -> f64 {
        PI / (2.0 * self.beta)
    }

    /// Interaction time giving `βt = π`, where `α' = α`.
    pub fn pattern_time(&self) -> f64 {
        PI / self.beta
    }

    /// `α' = e^{-2iβt} α`
    pub fn rotated_alpha(&self, alpha: C64, t: f64) -> C64 {
        C64::from_polar(1.0, -2.0 * self.beta * t) * alpha
    }
}

/// Amplitudes over spin ⊗ field, blocks ordered (↓, ↑).
#[derive(Debug, Clone, PartialEq)]
pub struct SpinFieldVector {
    amps: DVector<C64>,
    cutoff: usize,
}

impl SpinFieldVector {
    pub fn from_amplitudes(amps: DVector<C64>, space: FockSpace) -> Result<Self> {
        if amps.len() != space.composite_dim() {
            return Err(Error::DimensionMismatch {
                expected: space.composite_dim(),
                actual: amps.len(),
            });
        }
        Ok(Self {
            amps,
            cutoff: space.cutoff(),
        })
    }

    /// `down ⊗ |field_down⟩ + up ⊗ |field_up⟩`
    pub fn from_blocks(down: &FieldVector, up: &FieldVector) -> Result<Self> {
        down.space().check_dim(up.dim())?;
        let d = down.dim();
        let mut amps = DVector::zeros(2 * d);
        amps.rows_mut(0, d).copy_from(down.amplitudes());
        amps.rows_mut(d, d).copy_from(up.amplitudes());
        Ok(Self { amps, cutoff: d })
    }

    /// Product state `(s↓|↓⟩ + s↑|↑⟩) ⊗ |field⟩`.
    pub fn product(spin: [C64; 2], field: &FieldVector) -> Self {
        let d = field.dim();
        let mut amps = DVector::zeros(2 * d);
        for (s, coef) in spin.iter().enumerate() {
            amps.rows_mut(s * d, d)
                .copy_from(&field.amplitudes().map(|c| c * coef));
        }
        Self { amps, cutoff: d }
    }

    pub fn basis_product(spin: Spin, field: &FieldVector) -> Self {
        let mut s = [C64::new(0.0, 0.0); 2];
        s[spin.index()] = C64::new(1.0, 0.0);
        Self::product(s, field)
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn space(&self) -> FockSpace {
        FockSpace::new(self.cutoff).expect("cutoff validated at construction")
    }

    /// Field amplitudes paired with one spin label (not renormalized).
    pub fn block(&self, spin: Spin) -> FieldVector {
        let d = self.cutoff;
        FieldVector::from_amplitudes(self.amps.rows(spin.index() * d, d).into_owned())
            .expect("cutoff >= 2")
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.norm_squared()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOL
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.amps.norm();
        if n < 1e-300 {
            return Err(Error::InvalidParameter {
                name: "state",
                reason: "cannot normalize the zero vector".into(),
            });
        }
        Ok(Self {
            amps: self.amps.unscale(n),
            cutoff: self.cutoff,
        })
    }

    pub fn inner(&self, other: &SpinFieldVector) -> Result<C64> {
        self.check_same(other)?;
        Ok(self.amps.dotc(&other.amps))
    }

    /// `|⟨self|other⟩|` of the normalized vectors.
    pub fn fidelity(&self, other: &SpinFieldVector) -> Result<f64> {
        self.check_same(other)?;
        Ok(crate::vector_fidelity(&self.amps, &other.amps))
    }

    fn check_same(&self, other: &SpinFieldVector) -> Result<()> {
        if self.cutoff != other.cutoff {
            return Err(Error::DimensionMismatch {
                expected: 2 * self.cutoff,
                actual: 2 * other.cutoff,
            });
        }
        Ok(())
    }
}

/// Dense operator on spin ⊗ field.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeOperator {
    matrix: DMatrix<C64>,
    cutoff: usize,
}

impl CompositeOperator {
    /// `spin ⊗ field` with the spin index as the outer (block) index.
    pub fn kron(spin: &nalgebra::Matrix2<C64>, field: &FieldOperator) -> Self {
        let d = field.dim();
        let mut matrix = DMatrix::zeros(2 * d, 2 * d);
        for r in 0..2 {
            for c in 0..2 {
                let s = spin[(r, c)];
                if s != C64::new(0.0, 0.0) {
                    matrix
                        .view_mut((r * d, c * d), (d, d))
                        .copy_from(&field.matrix().map(|x| x * s));
                }
            }
        }
        Self { matrix, cutoff: d }
    }

    /// `I₂ ⊗ field`
    pub fn on_field(field: &FieldOperator) -> Self {
        Self::kron(&nalgebra::Matrix2::identity(), field)
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn space(&self) -> FockSpace {
        FockSpace::new(self.cutoff).expect("cutoff validated at construction")
    }

    pub fn apply(&self, v: &SpinFieldVector) -> Result<SpinFieldVector> {
        if v.cutoff != self.cutoff {
            return Err(Error::DimensionMismatch {
                expected: 2 * self.cutoff,
                actual: 2 * v.cutoff,
            });
        }
        Ok(SpinFieldVector {
            amps: &self.matrix * &v.amps,
            cutoff: self.cutoff,
        })
    }

    /// Largest `|Hᵢⱼ - conj(Hⱼᵢ)|`.
    pub fn hermiticity_residual(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint()).camax()
    }
}

/// All-ones spin matrix `ξ̂ = Σᵢⱼ |i⟩⟨j|`.
pub fn xi_operator() -> nalgebra::Matrix2<C64> {
    nalgebra::Matrix2::from_element(C64::new(1.0, 0.0))
}

/// Spin amplitudes `(1, e^{iφ})/√2` on `(|↓⟩, |↑⟩)`.
pub fn ingoing_spin_state(phase: ABPhase) -> [C64; 2] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [C64::new(s, 0.0), phase.factor() * s]
}

/// `β (ξ̂ ⊗ n̂)` in the (↓, ↑) block layout.
pub fn interaction_hamiltonian(model: &DispersiveModel) -> CompositeOperator {
    let n = crate::hilbert::number_operator(model.space);
    let mut h = CompositeOperator::kron(&xi_operator(), &n);
    h.matrix *= C64::new(model.beta, 0.0);
    h
}

/// `e^{-iHt}` through the Hermitian eigendecomposition of the dense `H`.
///
/// Independent of the closed forms in [`evolve_analytic`]; nothing about the
/// block structure of `H` is used.
pub fn propagator(model: &DispersiveModel, t: f64) -> Result<CompositeOperator> {
    if !t.is_finite() {
        return Err(Error::InvalidParameter {
            name: "t",
            reason: format!("non-finite time {t}"),
        });
    }
    let h = interaction_hamiltonian(model);
    let eig = h.matrix.clone().symmetric_eigen();
    let phases = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues
            .iter()
            .map(|&e| C64::from_polar(1.0, -e * t)),
    );
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= phases[j];
    }
    Ok(CompositeOperator {
        matrix: scaled * v.adjoint(),
        cutoff: model.space.cutoff(),
    })
}

/// Numerical `e^{-iHt}|state⟩`.
pub fn evolve_numeric(
    state: &SpinFieldVector,
    model: &DispersiveModel,
    t: f64,
) -> Result<SpinFieldVector> {
    model.space.check_dim(state.cutoff)?;
    propagator(model, t)?.apply(state)
}

/// Closed-form `e^{-iHt}|σ, α⟩`:
///
/// ```text
/// |↑α⟩ → ½(|α'⟩ + |α⟩)|↑⟩ + ½(|α'⟩ − |α⟩)|↓⟩
/// |↓α⟩ → ½(|α'⟩ − |α⟩)|↑⟩ + ½(|α'⟩ + |α⟩)|↓⟩
/// ```
///
/// with `α' = e^{-2iβt} α`.
pub fn evolve_analytic(
    spin: Spin,
    alpha: C64,
    model: &DispersiveModel,
    t: f64,
) -> Result<SpinFieldVector> {
    let space = model.space;
    let a = coherent_state(alpha, space)?;
    let ap = coherent_state(model.rotated_alpha(alpha, t), space)?;
    let half = C64::new(0.5, 0.0);
    let plus = FieldVector::linear_combination(&[(half, &ap), (half, &a)])?;
    let minus = FieldVector::linear_combination(&[(half, &ap), (-half, &a)])?;
    match spin {
        Spin::Up => SpinFieldVector::from_blocks(&minus, &plus),
        Spin::Down => SpinFieldVector::from_blocks(&plus, &minus),
    }
}

/// Unnormalized coefficients of the post-interaction state on
/// `{|α'⟩, |α⟩}` per spin block, with the quarter prefactor convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointCoefficients {
    /// `(¼(1+e^{iφ}), ¼(1−e^{iφ}))` multiplying `(|α'⟩, |α⟩)|↓⟩`.
    pub down: [C64; 2],
    /// `(¼(1+e^{iφ}), −¼(1−e^{iφ}))` multiplying `(|α'⟩, |α⟩)|↑⟩`.
    pub up: [C64; 2],
}

/// Coefficient structure of the evolved `(|↓⟩ + e^{iφ}|↑⟩)|α⟩`.
///
/// The `(1−e^{iφ})` branch enters the ↓ block with a plus sign and the ↑ block
/// with a minus sign, which is what the exact unitaries above produce.
pub fn joint_coefficients(phase: ABPhase) -> JointCoefficients {
    let e = phase.factor();
    let one = C64::new(1.0, 0.0);
    let p = (one + e) * 0.25;
    let m = (one - e) * 0.25;
    JointCoefficients {
        down: [p, m],
        up: [p, -m],
    }
}

/// Normalized state after the ingoing AB-phased spin interacts with `|α⟩`
/// for time `t`, assembled from the coefficient structure of
/// [`joint_coefficients`].
pub fn joint_state(
    phase: ABPhase,
    alpha: C64,
    model: &DispersiveModel,
    t: f64,
) -> Result<SpinFieldVector> {
    let space = model.space;
    let a = coherent_state(alpha, space)?;
    let ap = coherent_state(model.rotated_alpha(alpha, t), space)?;
    let k = joint_coefficients(phase);
    let down = FieldVector::linear_combination(&[(k.down[0], &ap), (k.down[1], &a)])?;
    let up = FieldVector::linear_combination(&[(k.up[0], &ap), (k.up[1], &a)])?;
    SpinFieldVector::from_blocks(&down, &up)?.normalized()
}

/// `exp[(e^{2iβt} − 1)|α|²]`, the overlap `⟨α'|α⟩` between the rotated and
/// the initial coherent states. Its conjugate is `⟨α|α'⟩`.
pub fn analytic_overlap(alpha: C64, model: &DispersiveModel, t: f64) -> C64 {
    let rot = C64::from_polar(1.0, 2.0 * model.beta * t);
    ((rot - 1.0) * alpha.norm_sqr()).exp()
}
