//! Spin-basis measurement, the coherent-state Hadamard-type gate and the
//! cat states that carry the transferred AB phase.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::dispersive::{joint_state, ABPhase, DispersiveModel, Spin, SpinFieldVector};
use crate::hilbert::{coherent_state, inner_product, FieldOperator, FieldVector, FockSpace};
use crate::{Error, Result, C64};

/// Outcomes below this probability are rejected.
pub const MIN_OUTCOME_PROBABILITY: f64 = 1e-12;

/// Largest `⟨α|−α⟩ = e^{-2|α|²}` for which `{|α⟩, |−α⟩}` counts as a qubit.
pub const QUASI_ORTHOGONAL_OVERLAP: f64 = 1e-3;

/// Phases closer than this (in `1 + sin φ`) to the pattern pole diverge.
pub const PATTERN_POLE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionResult {
    pub outcome: Spin,
    pub probability: f64,
    /// Normalized field state conditioned on `outcome`.
    pub post_field: FieldVector,
}

/// Projective spin measurement of a normalized spin ⊗ field state.
pub fn project_spin(state: &SpinFieldVector, outcome: Spin) -> Result<ProjectionResult> {
    let block = state.block(outcome);
    let probability = block.norm_sqr() / state.norm_sqr();
    if probability.is_nan() || probability < MIN_OUTCOME_PROBABILITY {
        return Err(Error::ImpossibleOutcome(probability));
    }
    Ok(ProjectionResult {
        outcome,
        probability,
        post_field: block.normalized()?,
    })
}

/// `e^{-2|α|²}`
pub fn cat_overlap(alpha: C64) -> f64 {
    (-2.0 * alpha.norm_sqr()).exp()
}

/// The Hadamard-type gate on `{|−α⟩, |α⟩}`, taken literally:
///
/// ```text
/// U = (|−α⟩⟨−α| − |α⟩⟨α| + |α⟩⟨−α| + |−α⟩⟨α|) / √2
/// ```
///
/// `U` is only unitary on the span in the limit of vanishing overlap; the
/// remaining error is reported, not corrected.
#[derive(Debug, Clone)]
pub struct CatGate {
    pub operator: FieldOperator,
    pub alpha: C64,
    /// `e^{-2|α|²}`
    pub overlap: f64,
    pub quasi_orthogonal: bool,
    /// Spectral-norm distance of `U†U` from the projector onto the span.
    pub unitarity_deviation: f64,
}

impl CatGate {
    pub fn apply(&self, v: &FieldVector) -> Result<FieldVector> {
        self.operator.apply(v)
    }
}

fn outer(u: &DVector<C64>, v: &DVector<C64>) -> DMatrix<C64> {
    u * v.adjoint()
}

/// Orthogonal projector onto `span{vectors}`, via the inverse Gram matrix.
fn span_projector(vectors: &[&DVector<C64>]) -> DMatrix<C64> {
    let d = vectors[0].len();
    let k = vectors.len();
    let v = DMatrix::from_fn(d, k, |i, j| vectors[j][i]);
    let gram = v.adjoint() * &v;
    let det = gram.clone().determinant().norm();
    match gram.clone().try_inverse() {
        Some(inv) if det > 1e-14 => &v * inv * v.adjoint(),
        _ => {
            let u = vectors[0].normalize();
            outer(&u, &u)
        }
    }
}

pub fn hadamard_cat_gate(alpha: C64, space: FockSpace) -> Result<CatGate> {
    let plus = coherent_state(alpha, space)?;
    let minus = coherent_state(-alpha, space)?;
    let (p, m) = (plus.amplitudes(), minus.amplitudes());
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let matrix = (outer(m, m) - outer(p, p) + outer(p, m) + outer(m, p)) * C64::new(s, 0.0);
    let utu = matrix.adjoint() * &matrix;
    let deviation = (utu - span_projector(&[m, p]))
        .symmetric_eigen()
        .eigenvalues
        .amax();
    let overlap = cat_overlap(alpha);
    Ok(CatGate {
        operator: FieldOperator::from_matrix(matrix)?,
        alpha,
        overlap,
        quasi_orthogonal: overlap <= QUASI_ORTHOGONAL_OVERLAP,
        unitarity_deviation: deviation,
    })
}

/// Field coefficients on `(|−α⟩, |α⟩)` of the transferred cat for a given
/// measured spin: `|−α⟩ + e^{iφ}|α⟩` for ↓, `e^{iφ}|−α⟩ + |α⟩` for ↑.
pub fn transferred_cat_coefficients(phase: ABPhase, measured: Spin) -> [C64; 2] {
    let one = C64::new(1.0, 0.0);
    match measured {
        Spin::Down => [one, phase.factor()],
        Spin::Up => [phase.factor(), one],
    }
}

/// Normalized transferred cat state on the truncated space.
pub fn transferred_cat(
    phase: ABPhase,
    measured: Spin,
    alpha: C64,
    space: FockSpace,
) -> Result<FieldVector> {
    let [cm, cp] = transferred_cat_coefficients(phase, measured);
    let minus = coherent_state(-alpha, space)?;
    let plus = coherent_state(alpha, space)?;
    FieldVector::linear_combination(&[(cm, &minus), (cp, &plus)])?.normalized()
}

/// Intermediate and final states of the full numerical transfer pipeline.
#[derive(Debug, Clone)]
pub struct TransferRun {
    pub measured: Spin,
    /// Probability of the spin outcome.
    pub probability: f64,
    /// Field state right after the spin measurement.
    pub projected: FieldVector,
    /// Normalized field state after the Hadamard-type gate.
    pub gated: FieldVector,
}

/// Interaction for `t = π/(2β)`, spin measurement, then the cat gate.
pub fn transfer_pipeline(
    phase: ABPhase,
    measured: Spin,
    alpha: C64,
    model: &DispersiveModel,
    gate: &CatGate,
) -> Result<TransferRun> {
    let psi = joint_state(phase, alpha, model, model.transfer_time())?;
    let proj = project_spin(&psi, measured)?;
    let gated = gate.apply(&proj.post_field)?.normalized()?;
    Ok(TransferRun {
        measured,
        probability: proj.probability,
        projected: proj.post_field,
        gated,
    })
}

/// `sin²(φ/2) / (1 + sin φ)`, the projection pattern at `βt = π`.
pub fn paper_projection_pattern(phase: ABPhase) -> Result<f64> {
    let phi = phase.radians();
    let den = 1.0 + phi.sin();
    if den <= PATTERN_POLE_TOL {
        return Err(Error::PatternDivergence(den));
    }
    Ok((phi / 2.0).sin().powi(2) / den)
}

/// `N± = 1/√(1 + Re⟨α'|α⟩ sin φ)` stated for `|φ±⟩`; the same for both
/// branches.
pub fn paper_normalization(
    phase: ABPhase,
    alpha: C64,
    model: &DispersiveModel,
    t: f64,
) -> Result<f64> {
    let ov = crate::dispersive::analytic_overlap(alpha, model, t);
    let den = 1.0 + ov.re * phase.radians().sin();
    if den <= PATTERN_POLE_TOL {
        return Err(Error::PatternDivergence(den));
    }
    Ok(1.0 / den.sqrt())
}

/// `|⟨α|φ±⟩|² = sin²(φ/2) / (1 + Re⟨α'|α⟩ sin φ)` for a general interaction
/// time; reduces to [`paper_projection_pattern`] at `βt = π`.
pub fn paper_projection_formula(
    phase: ABPhase,
    alpha: C64,
    model: &DispersiveModel,
    t: f64,
) -> Result<f64> {
    let n = paper_normalization(phase, alpha, model, t)?;
    Ok(((phase.radians() / 2.0).sin() * n).powi(2))
}

/// Numerical `|⟨α|post⟩|²` where `post` is the field state after evolving
/// for `t` and measuring `outcome`.
pub fn numeric_projection_probability(
    phase: ABPhase,
    alpha: C64,
    model: &DispersiveModel,
    t: f64,
    outcome: Spin,
) -> Result<f64> {
    let psi = joint_state(phase, alpha, model, t)?;
    let proj = project_spin(&psi, outcome)?;
    let a = coherent_state(alpha, model.space())?;
    Ok(inner_product(&a, &proj.post_field)?.norm_sqr())
}

/// One row of the projection-pattern comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PatternPoint {
    pub phi: f64,
    /// `None` at the pole of the formula.
    pub paper_pattern: Option<f64>,
    pub numeric_probability: f64,
    pub discrepancy: Option<f64>,
}

/// Closed-form pattern and numerical probability at `βt = π` for one phase.
pub fn pattern_point(
    phase: ABPhase,
    alpha: C64,
    model: &DispersiveModel,
    outcome: Spin,
) -> Result<PatternPoint> {
    let formula = match paper_projection_pattern(phase) {
        Ok(v) => Some(v),
        Err(Error::PatternDivergence(_)) => None,
        Err(e) => return Err(e),
    };
    let numeric =
        numeric_projection_probability(phase, alpha, model, model.pattern_time(), outcome)?;
    Ok(PatternPoint {
        phi: phase.radians(),
        paper_pattern: formula,
        numeric_probability: numeric,
        discrepancy: formula.map(|p| numeric - p),
    })
}
