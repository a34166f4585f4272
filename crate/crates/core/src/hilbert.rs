//! Truncated Fock space: field vectors, ladder operators, coherent states.
//!
//! Basis states `|0⟩ … |cutoff-1⟩` are kept; everything is dense.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result, C64, NORM_TOL};

/// Largest tail mass a coherent state may lose to truncation.
pub const TAIL_TOL: f64 = 1e-12;

/// Number of retained photon-number states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FockSpace {
    cutoff: usize,
}

impl FockSpace {
    pub fn new(cutoff: usize) -> Result<Self> {
        if cutoff < 2 {
            return Err(Error::InvalidCutoff(cutoff));
        }
        Ok(Self { cutoff })
    }

    /// Default truncation for a coherent amplitude: `ceil(|α|² + 10|α| + 10)`.
    pub fn for_alpha(alpha: C64) -> Self {
        let r = alpha.norm();
        let cutoff = (r * r + 10.0 * r + 10.0).ceil() as usize;
        Self {
            cutoff: cutoff.max(2),
        }
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Dimension of the spin ⊗ field space.
    pub fn composite_dim(&self) -> usize {
        2 * self.cutoff
    }

    pub(crate) fn check_dim(&self, actual: usize) -> Result<()> {
        if actual != self.cutoff {
            return Err(Error::DimensionMismatch {
                expected: self.cutoff,
                actual,
            });
        }
        Ok(())
    }
}

/// Complex amplitudes over the truncated number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldVector {
    amps: DVector<C64>,
}

impl FieldVector {
    pub fn from_amplitudes(amps: DVector<C64>) -> Result<Self> {
        if amps.len() < 2 {
            return Err(Error::InvalidCutoff(amps.len()));
        }
        Ok(Self { amps })
    }

    pub fn zeros(space: FockSpace) -> Self {
        Self {
            amps: DVector::zeros(space.cutoff),
        }
    }

    /// Number state `|n⟩`.
    pub fn basis(space: FockSpace, n: usize) -> Result<Self> {
        if n >= space.cutoff {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: format!("number state {n} outside cutoff {}", space.cutoff),
            });
        }
        let mut v = Self::zeros(space);
        v.amps[n] = C64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn into_amplitudes(self) -> DVector<C64> {
        self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn space(&self) -> FockSpace {
        FockSpace {
            cutoff: self.amps.len(),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.norm_squared()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOL
    }

    /// Rescaled to unit norm; the zero vector is rejected.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.amps.norm();
        if n < 1e-300 {
            return Err(Error::InvalidParameter {
                name: "vector",
                reason: "cannot normalize the zero vector".into(),
            });
        }
        Ok(Self {
            amps: self.amps.unscale(n),
        })
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self {
            amps: self.amps.map(|c| c * factor),
        }
    }

    /// `Σ cᵢ vᵢ` over vectors of one dimension.
    pub fn linear_combination(terms: &[(C64, &FieldVector)]) -> Result<Self> {
        let first = terms.first().ok_or(Error::InvalidParameter {
            name: "terms",
            reason: "empty linear combination".into(),
        })?;
        let space = first.1.space();
        let mut out = DVector::zeros(space.cutoff);
        for (c, v) in terms {
            space.check_dim(v.dim())?;
            out.axpy(*c, &v.amps, C64::new(1.0, 0.0));
        }
        Ok(Self { amps: out })
    }

    /// `|⟨self|other⟩|` after normalizing both.
    pub fn fidelity(&self, other: &FieldVector) -> Result<f64> {
        self.space().check_dim(other.dim())?;
        Ok(crate::vector_fidelity(&self.amps, &other.amps))
    }
}

/// `⟨u|v⟩`, conjugate-linear in `u`.
pub fn inner_product(u: &FieldVector, v: &FieldVector) -> Result<C64> {
    u.space().check_dim(v.dim())?;
    Ok(u.amps.dotc(&v.amps))
}

/// Dense operator on the truncated field space.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldOperator {
    matrix: DMatrix<C64>,
}

impl FieldOperator {
    pub fn from_matrix(matrix: DMatrix<C64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                actual: matrix.ncols(),
            });
        }
        Ok(Self { matrix })
    }

    pub fn identity(space: FockSpace) -> Self {
        Self {
            matrix: DMatrix::identity(space.cutoff, space.cutoff),
        }
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn apply(&self, v: &FieldVector) -> Result<FieldVector> {
        if v.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: v.dim(),
            });
        }
        Ok(FieldVector {
            amps: &self.matrix * &v.amps,
        })
    }

    /// `self · other`
    pub fn compose(&self, other: &FieldOperator) -> Result<Self> {
        if other.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(Self {
            matrix: &self.matrix * &other.matrix,
        })
    }

    /// `⟨v|O|v⟩`
    pub fn expectation(&self, v: &FieldVector) -> Result<C64> {
        let ov = self.apply(v)?;
        Ok(v.amps.dotc(&ov.amps))
    }
}

/// `n̂ = diag(0, 1, …, cutoff-1)`.
pub fn number_operator(space: FockSpace) -> FieldOperator {
    let d = space.cutoff;
    FieldOperator {
        matrix: DMatrix::from_fn(d, d, |i, j| {
            if i == j {
                C64::new(i as f64, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }),
    }
}

/// `â|n⟩ = √n |n-1⟩`.
pub fn annihilation(space: FockSpace) -> FieldOperator {
    let d = space.cutoff;
    FieldOperator {
        matrix: DMatrix::from_fn(d, d, |i, j| {
            if j == i + 1 {
                C64::new((j as f64).sqrt(), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }),
    }
}

/// `â† `, built as the conjugate transpose of [`annihilation`].
pub fn creation(space: FockSpace) -> FieldOperator {
    annihilation(space).adjoint()
}

/// Poisson weights `e^{-x} xⁿ / n!` for `n < len`, in log space so that large
/// `x` does not underflow the leading terms.
fn poisson_weights(x: f64, len: usize) -> Vec<f64> {
    if x == 0.0 {
        let mut w = vec![0.0; len];
        if len > 0 {
            w[0] = 1.0;
        }
        return w;
    }
    let lx = x.ln();
    let mut log_fact = 0.0;
    (0..len)
        .map(|n| {
            if n > 0 {
                log_fact += (n as f64).ln();
            }
            (-x + n as f64 * lx - log_fact).exp()
        })
        .collect()
}

fn poisson_horizon(x: f64, cutoff: usize) -> usize {
    let span = x + 20.0 * x.sqrt() + 60.0;
    (span.ceil() as usize).max(cutoff + 1)
}

/// Probability mass `Σ_{n ≥ cutoff} e^{-|α|²} |α|^{2n} / n!` lost by truncating
/// `|α⟩` to `cutoff` levels.
pub fn coherent_tail_mass(alpha: C64, cutoff: usize) -> f64 {
    let x = alpha.norm_sqr();
    let horizon = poisson_horizon(x, cutoff);
    poisson_weights(x, horizon)[cutoff..].iter().rev().sum()
}

/// Smallest cutoff whose truncation tail is at most `tol`.
pub fn required_cutoff(alpha: C64, tol: f64) -> usize {
    let x = alpha.norm_sqr();
    let horizon = poisson_horizon(x, 2);
    let w = poisson_weights(x, horizon);
    let mut tail = 0.0;
    let mut required = horizon;
    for n in (0..horizon).rev() {
        tail += w[n];
        if tail > tol {
            required = n + 1;
            break;
        }
    }
    required.max(2)
}

/// Truncated coherent state `|α⟩`, amplitudes `e^{-|α|²/2} αⁿ/√(n!)`.
///
/// Amplitudes are generated by `cₙ₊₁ = cₙ α/√(n+1)`; they are not
/// renormalized, so the norm deficit equals [`coherent_tail_mass`].
pub fn coherent_state(alpha: C64, space: FockSpace) -> Result<FieldVector> {
    if !alpha.re.is_finite() || !alpha.im.is_finite() {
        return Err(Error::InvalidParameter {
            name: "alpha",
            reason: "non-finite amplitude".into(),
        });
    }
    let tail = coherent_tail_mass(alpha, space.cutoff);
    if tail > TAIL_TOL {
        return Err(Error::TruncationInsufficient {
            cutoff: space.cutoff,
            required_cutoff: required_cutoff(alpha, TAIL_TOL),
            tail_mass: tail,
            alpha_abs: alpha.norm(),
        });
    }
    let mut amps = DVector::zeros(space.cutoff);
    let mut c = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for n in 0..space.cutoff {
        amps[n] = c;
        c = c * alpha / ((n + 1) as f64).sqrt();
    }
    Ok(FieldVector { amps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn cutoff_below_two_rejected() {
        assert_eq!(FockSpace::new(1), Err(Error::InvalidCutoff(1)));
        assert!(FockSpace::new(2).is_ok());
    }

    #[test]
    fn default_cutoff_formula() {
        assert_eq!(FockSpace::for_alpha(c(0.0, 0.0)).cutoff(), 10);
        assert_eq!(FockSpace::for_alpha(c(2.0, 0.0)).cutoff(), 34);
        assert_eq!(FockSpace::for_alpha(c(3.0, 0.0)).cutoff(), 49);
    }

    #[test]
    fn vacuum_for_zero_alpha() {
        let s = FockSpace::new(8).unwrap();
        let v = coherent_state(c(0.0, 0.0), s).unwrap();
        assert_eq!(v, FieldVector::basis(s, 0).unwrap());
    }

    #[test]
    fn coherent_norm_matches_poisson_tail() {
        let s = FockSpace::new(40).unwrap();
        let v = coherent_state(c(2.0, 0.0), s).unwrap();
        // direct term-by-term Poisson tail e^{-4} 4^n / n!
        let mut term = (-4.0f64).exp();
        let mut tail = 0.0;
        for n in 0..200 {
            if n >= 40 {
                tail += term;
            }
            term *= 4.0 / (n + 1) as f64;
        }
        assert!(tail < 1e-12);
        assert_abs_diff_eq!(v.norm_sqr(), 1.0 - tail, epsilon = 1e-14);
        assert_abs_diff_eq!(coherent_tail_mass(c(2.0, 0.0), 40), tail, epsilon = 1e-18);
    }

    #[test]
    fn truncation_insufficient_names_cutoff() {
        let s = FockSpace::new(10).unwrap();
        match coherent_state(c(2.0, 0.0), s) {
            Err(Error::TruncationInsufficient {
                required_cutoff, ..
            }) => {
                assert!(coherent_tail_mass(c(2.0, 0.0), required_cutoff) <= TAIL_TOL);
                assert!(coherent_tail_mass(c(2.0, 0.0), required_cutoff - 1) > TAIL_TOL);
                let ok = FockSpace::new(required_cutoff).unwrap();
                assert!(coherent_state(c(2.0, 0.0), ok).is_ok());
            }
            other => panic!("expected truncation error, got {other:?}"),
        }
    }

    #[test]
    fn coherent_overlap_alpha_minus_alpha() {
        let s = FockSpace::new(40).unwrap();
        for a in [0.5, 1.0, 1.5, 2.0] {
            let p = coherent_state(c(a, 0.0), s).unwrap();
            let m = coherent_state(c(-a, 0.0), s).unwrap();
            let ov = inner_product(&p, &m).unwrap();
            assert_abs_diff_eq!(ov.re, (-2.0 * a * a).exp(), epsilon = 1e-10);
            assert_abs_diff_eq!(ov.im, 0.0, epsilon = 1e-12);
        }
        let p = coherent_state(c(1.0, 0.0), s).unwrap();
        let m = coherent_state(c(-1.0, 0.0), s).unwrap();
        assert_abs_diff_eq!(
            inner_product(&p, &m).unwrap().re,
            0.135335283,
            epsilon = 1e-9
        );
    }

    #[test]
    fn vacuum_projection() {
        let s = FockSpace::new(40).unwrap();
        let alpha = c(1.2, -0.7);
        let v = coherent_state(alpha, s).unwrap();
        let vac = FieldVector::basis(s, 0).unwrap();
        let ov = inner_product(&vac, &v).unwrap();
        assert_abs_diff_eq!(ov.re, (-alpha.norm_sqr() / 2.0).exp(), epsilon = 1e-15);
    }

    #[test]
    fn inner_product_dimension_mismatch() {
        let u = FieldVector::zeros(FockSpace::new(3).unwrap());
        let v = FieldVector::zeros(FockSpace::new(4).unwrap());
        assert!(matches!(
            inner_product(&u, &v),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn ladder_operators() {
        let s = FockSpace::new(40).unwrap();
        let n = number_operator(s);
        let three = FieldVector::basis(s, 3).unwrap();
        assert_eq!(n.apply(&three).unwrap(), three.scaled(c(3.0, 0.0)));

        let a = annihilation(s);
        assert_eq!(creation(s).matrix(), &a.matrix().adjoint());

        let alpha = c(1.5, 1.0);
        let v = coherent_state(alpha, s).unwrap();
        let av = a.apply(&v).unwrap();
        let diff = av.amplitudes() - v.amplitudes() * alpha;
        assert!(diff.norm() < 1e-8);
        let mean_n = n.expectation(&v).unwrap();
        assert_abs_diff_eq!(mean_n.re, alpha.norm_sqr(), epsilon = 1e-8);
    }

    #[test]
    fn commutator_holds_below_truncation_edge() {
        let s = FockSpace::new(12).unwrap();
        let a = annihilation(s);
        let ad = creation(s);
        let comm = a.compose(&ad).unwrap().matrix() - ad.compose(&a).unwrap().matrix();
        for i in 0..11 {
            assert_abs_diff_eq!(comm[(i, i)].re, 1.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(comm[(11, 11)].re, -11.0, epsilon = 1e-12);
    }
}
