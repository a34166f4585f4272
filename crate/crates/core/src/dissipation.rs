//! Thermal-bath dynamics of the AB-modulated spin-cavity state.
//!
//! Two routes are kept side by side. The full matrix route integrates the
//! Lindblad equation on spin ⊗ field, either with the standard GKSL
//! dissipator or with the regime-reduced form that replaces `½{c†c, ρ}` by
//! `|α|²ρ`. The scalar route reduces everything to
//!
//! ```text
//! d g/dt = −(κ₂²/4)(|α|² − n_α²) g,     g(t) = λ₀(t)² (1 + e^{−Γt})²
//! ```
//!
//! which is integrated numerically and compared against the closed form
//! `λ₀(t) = 2λ₀(0)/(1 + e^{−Γt}) · exp[−½κ₂²(|α|² − n_α²)t]`.
//!
//! Composite matrices use the (↓, ↑) block layout of [`crate::dispersive`].

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix2};
use serde::{Deserialize, Serialize};

use crate::dispersive::{ABPhase, CompositeOperator, DispersiveModel, Spin, SpinFieldVector};
use crate::hilbert::{coherent_state, FieldOperator, FockSpace};
use crate::integrate::AdaptiveRk4;
use crate::{Error, Result, C64};

/// Thermal occupation at or below which the low-temperature reduction holds.
pub const LOW_TEMPERATURE_NBAR: f64 = 1e-3;

/// `n_α` below this does not satisfy `n_α ≫ 1`.
pub const LARGE_NUMBER_STATE: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LindbladParams {
    /// Bath coupling κ.
    pub kappa: f64,
    /// Mean thermal occupation n̄.
    pub n_bar: f64,
    /// Dissipation coefficient Γ.
    pub gamma: f64,
    /// λ₀(0)
    pub lambda0_init: f64,
    /// Target number state n_α.
    pub n_alpha: u32,
    /// Free-field frequency ω_T of the commutator term.
    pub omega_t: f64,
    #[serde(with = "crate::serde_complex")]
    pub alpha: C64,
}

impl LindbladParams {
    /// `κ₁ = √(2κ(n̄+1))`
    pub fn kappa1(&self) -> f64 {
        (2.0 * self.kappa * (self.n_bar + 1.0)).sqrt()
    }

    /// `κ₂ = √(2κn̄)`
    pub fn kappa2(&self) -> f64 {
        (2.0 * self.kappa * self.n_bar).sqrt()
    }

    pub fn is_low_temperature(&self) -> bool {
        self.n_bar <= LOW_TEMPERATURE_NBAR
    }

    /// `|α|² − n_α²`
    pub fn occupation_gap(&self) -> f64 {
        let n = self.n_alpha as f64;
        self.alpha.norm_sqr() - n * n
    }

    /// Decay rate of `g(t)` implied by the scalar equation,
    /// `(κ₂²/4)(|α|² − n_α²)`.
    pub fn g_rate(&self) -> f64 {
        self.kappa2().powi(2) / 4.0 * self.occupation_gap()
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.kappa,
            self.n_bar,
            self.gamma,
            self.lambda0_init,
            self.omega_t,
            self.alpha.re,
            self.alpha.im,
        ]
        .iter()
        .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidParameter {
                name: "lindblad",
                reason: "non-finite parameter".into(),
            });
        }
        let check = |ok: bool, name: &'static str, reason: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    reason: reason.into(),
                })
            }
        };
        check(self.kappa >= 0.0, "kappa", "must be non-negative")?;
        check(self.n_bar >= 0.0, "n_bar", "must be non-negative")?;
        check(self.gamma >= 0.0, "gamma", "must be non-negative")?;
        check(self.lambda0_init > 0.0, "lambda0_init", "must be positive")?;
        Ok(())
    }

    /// Regime conditions that do not hold for these parameters.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if !self.is_low_temperature() {
            w.push(format!(
                "n_bar = {} exceeds the low-temperature bound {LOW_TEMPERATURE_NBAR}",
                self.n_bar
            ));
        }
        if self.n_bar == 0.0 {
            w.push(
                "n_bar = 0 gives kappa2 = 0: lambda0 follows 2*lambda0(0)/(1+exp(-gamma t))".into(),
            );
        }
        if self.alpha.norm() <= self.n_alpha as f64 {
            w.push(format!(
                "|alpha| = {} does not exceed n_alpha = {}: growth regime",
                self.alpha.norm(),
                self.n_alpha
            ));
        }
        if self.n_alpha < LARGE_NUMBER_STATE {
            w.push(format!(
                "n_alpha = {} is not >> 1: number-state replacement is approximate",
                self.n_alpha
            ));
        }
        w
    }
}

/// Hermitian matrix on spin ⊗ field.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: DMatrix<C64>,
    cutoff: usize,
}

impl DensityOperator {
    pub fn from_matrix(matrix: DMatrix<C64>, space: FockSpace) -> Result<Self> {
        let d = space.composite_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: matrix.nrows(),
            });
        }
        Ok(Self {
            matrix,
            cutoff: space.cutoff(),
        })
    }

    /// `|ψ⟩⟨ψ|`
    pub fn from_pure(psi: &SpinFieldVector) -> Self {
        let v = psi.amplitudes();
        Self {
            matrix: v * v.adjoint(),
            cutoff: psi.space().cutoff(),
        }
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn space(&self) -> FockSpace {
        FockSpace::new(self.cutoff).expect("cutoff validated at construction")
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Largest `|ρᵢⱼ − conj(ρⱼᵢ)|`.
    pub fn hermiticity_residual(&self) -> f64 {
        let d = self.matrix.nrows();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Field block `⟨row|ρ|col⟩` for spin labels.
    pub fn block(&self, row: Spin, col: Spin) -> DMatrix<C64> {
        let d = self.cutoff;
        self.matrix
            .view((row.index() * d, col.index() * d), (d, d))
            .into_owned()
    }

    /// `Tr(n̂ ρ)`
    pub fn mean_photon_number(&self) -> f64 {
        let d = self.cutoff;
        (0..2 * d)
            .map(|i| (i % d) as f64 * self.matrix[(i, i)].re)
            .sum()
    }

    /// Photon-number populations summed over spin.
    pub fn number_populations(&self) -> Vec<f64> {
        let d = self.cutoff;
        (0..d)
            .map(|n| self.matrix[(n, n)].re + self.matrix[(d + n, d + n)].re)
            .collect()
    }

    pub fn min_diagonal(&self) -> f64 {
        self.matrix
            .diagonal()
            .iter()
            .map(|x| x.re)
            .fold(f64::INFINITY, f64::min)
    }

    /// Phase carried by the spin coherences:
    /// `arg Tr ρ↑↓ − arg Tr ρ↓↑`, reduced into `[0, 2π)`.
    /// `None` when the coherences vanish.
    pub fn ab_block_phase(&self) -> Option<f64> {
        let ud = self.block(Spin::Up, Spin::Down).trace();
        let du = self.block(Spin::Down, Spin::Up).trace();
        if ud.norm() < 1e-300 || du.norm() < 1e-300 {
            return None;
        }
        Some((ud.arg() - du.arg()).rem_euclid(2.0 * PI))
    }
}

/// Dissipator used by [`lindblad_rhs`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DissipatorVariant {
    /// `cρc† − ½{c†c, ρ}`
    Standard,
    /// `cρc† − |α|²ρ`
    PaperReduced,
}

/// `dρ/dt = −i[ω_T n̂, ρ] + D(κ₁â)ρ + D(κ₂â†)ρ`.
///
/// The ladder operators act on the field index inside each spin block, so
/// every term is evaluated entrywise in O(dim²).
pub fn lindblad_rhs(
    rho: &DensityOperator,
    params: &LindbladParams,
    variant: DissipatorVariant,
) -> DensityOperator {
    DensityOperator {
        matrix: rhs_matrix(&rho.matrix, rho.cutoff, params, variant),
        cutoff: rho.cutoff,
    }
}

fn rhs_matrix(
    rho: &DMatrix<C64>,
    d: usize,
    params: &LindbladParams,
    variant: DissipatorVariant,
) -> DMatrix<C64> {
    let dim = 2 * d;
    let k1 = params.kappa1().powi(2);
    let k2 = params.kappa2().powi(2);
    let w = params.omega_t;
    let alpha2 = params.alpha.norm_sqr();
    // diagonal of â†â and ââ† on the truncated space
    let ada = |m: usize| m as f64;
    let aad = |m: usize| if m + 1 < d { (m + 1) as f64 } else { 0.0 };
    DMatrix::from_fn(dim, dim, |r, c| {
        let (sr, m) = (r / d, r % d);
        let (sc, n) = (c / d, c % d);
        let x = rho[(r, c)];
        let mut out = C64::new(0.0, w * (n as f64 - m as f64)) * x;
        // â ρ â†
        if m + 1 < d && n + 1 < d {
            let f = (((m + 1) * (n + 1)) as f64).sqrt();
            out += rho[(sr * d + m + 1, sc * d + n + 1)] * (k1 * f);
        }
        // â† ρ â
        if m >= 1 && n >= 1 {
            let f = ((m * n) as f64).sqrt();
            out += rho[(sr * d + m - 1, sc * d + n - 1)] * (k2 * f);
        }
        let (loss1, loss2) = match variant {
            DissipatorVariant::Standard => (0.5 * (ada(m) + ada(n)), 0.5 * (aad(m) + aad(n))),
            DissipatorVariant::PaperReduced => (alpha2, alpha2),
        };
        out - x * (k1 * loss1 + k2 * loss2)
    })
}

/// The same generator assembled from dense operator products; used to
/// cross-check [`lindblad_rhs`].
pub fn lindblad_rhs_dense(
    rho: &DensityOperator,
    params: &LindbladParams,
    variant: DissipatorVariant,
) -> DensityOperator {
    let space = rho.space();
    let a = CompositeOperator::on_field(&crate::hilbert::annihilation(space));
    let a = a.matrix();
    let ad = a.adjoint();
    let n = CompositeOperator::on_field(&crate::hilbert::number_operator(space));
    let n = n.matrix();
    let r = &rho.matrix;
    let i = C64::new(0.0, 1.0);
    let k1 = C64::new(params.kappa1().powi(2), 0.0);
    let k2 = C64::new(params.kappa2().powi(2), 0.0);
    let half = C64::new(0.5, 0.0);
    let comm = (n * r - r * n) * (-i * params.omega_t);
    let jump1 = a * r * &ad;
    let jump2 = &ad * r * a;
    let (loss1, loss2) = match variant {
        DissipatorVariant::Standard => {
            let ada = &ad * a;
            let aad = a * &ad;
            ((&ada * r + r * &ada) * half, (&aad * r + r * &aad) * half)
        }
        DissipatorVariant::PaperReduced => {
            let s = C64::new(params.alpha.norm_sqr(), 0.0);
            (r * s, r * s)
        }
    };
    DensityOperator {
        matrix: comm + (jump1 - loss1) * k1 + (jump2 - loss2) * k2,
        cutoff: rho.cutoff,
    }
}

/// Integrator settings for the full matrix evolution.
pub fn density_integrator() -> AdaptiveRk4 {
    AdaptiveRk4 {
        rtol: 1e-9,
        atol: 1e-12,
        initial_step: 1e-3,
        min_step: 1e-12,
        max_steps: 2_000_000,
    }
}

/// Integrates the Lindblad equation from `rho0` for time `t`.
pub fn evolve_density_numeric(
    rho0: &DensityOperator,
    params: &LindbladParams,
    t: f64,
    variant: DissipatorVariant,
) -> Result<DensityOperator> {
    params.validate()?;
    if rho0.hermiticity_residual() > 1e-10 {
        return Err(Error::InvalidParameter {
            name: "rho0",
            reason: "initial density operator is not Hermitian".into(),
        });
    }
    let d = rho0.cutoff;
    let f = |_t: f64, r: &DMatrix<C64>| rhs_matrix(r, d, params, variant);
    let (m, _) = density_integrator().integrate(&f, 0.0, rho0.matrix.clone(), t)?;
    Ok(DensityOperator {
        matrix: m,
        cutoff: d,
    })
}

/// Like [`evolve_density_numeric`] but sampled on a nondecreasing grid
/// starting at 0.
pub fn evolve_density_grid(
    rho0: &DensityOperator,
    params: &LindbladParams,
    grid: &[f64],
    variant: DissipatorVariant,
) -> Result<Vec<DensityOperator>> {
    params.validate()?;
    check_grid(grid)?;
    let d = rho0.cutoff;
    let f = |_t: f64, r: &DMatrix<C64>| rhs_matrix(r, d, params, variant);
    Ok(density_integrator()
        .integrate_grid(&f, grid, rho0.matrix.clone())?
        .into_iter()
        .map(|m| DensityOperator {
            matrix: m,
            cutoff: d,
        })
        .collect())
}

fn check_grid(grid: &[f64]) -> Result<()> {
    let bad = |reason: &str| {
        Err(Error::InvalidParameter {
            name: "t_grid",
            reason: reason.into(),
        })
    };
    match grid.first() {
        None => return bad("empty grid"),
        Some(&t0) if t0 != 0.0 => return bad("grid must start at 0"),
        _ => {}
    }
    if grid.iter().any(|t| !t.is_finite()) {
        return bad("non-finite grid point");
    }
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return bad("grid must be nondecreasing");
    }
    Ok(())
}

/// `g(t) = λ₀(t)²(1 + e^{−Γt})²` integrated with step-controlled RK4.
pub fn g_ode_solve(params: &LindbladParams, t_grid: &[f64]) -> Result<Vec<f64>> {
    params.validate()?;
    check_grid(t_grid)?;
    let rate = params.g_rate();
    let g0 = 4.0 * params.lambda0_init.powi(2);
    let f = move |_t: f64, g: &f64| -rate * g;
    let solver = AdaptiveRk4 {
        rtol: 1e-12,
        atol: 0.0,
        initial_step: 1e-3 / rate.abs().max(1e-3),
        min_step: 1e-14,
        max_steps: 10_000_000,
    };
    solver.integrate_grid(&f, t_grid, g0)
}

/// λ₀(t) recovered from the numerical `g(t)`.
pub fn lambda0_ode_solve(params: &LindbladParams, t_grid: &[f64]) -> Result<Vec<f64>> {
    let g = g_ode_solve(params, t_grid)?;
    Ok(g.iter()
        .zip(t_grid)
        .map(|(g, t)| g.max(0.0).sqrt() / (1.0 + (-params.gamma * t).exp()))
        .collect())
}

/// `λ₀(t) = 2λ₀(0)/(1 + e^{−Γt}) · exp[−½κ₂²(|α|² − n_α²)t]`.
pub fn lambda0_paper_closed_form(params: &LindbladParams, t: f64) -> f64 {
    let decay = (-0.5 * params.kappa2().powi(2) * params.occupation_gap() * t).exp();
    2.0 * params.lambda0_init / (1.0 + (-params.gamma * t).exp()) * decay
}

/// Outcome of substituting the closed form into the scalar equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubstitutionResidual {
    pub t: f64,
    /// `g(t)` built from the closed form.
    pub g: f64,
    /// `dg/dt` of the closed form, by finite differences.
    pub derivative: f64,
    /// Right-hand side `−(κ₂²/4)(|α|² − n_α²) g`.
    pub rhs: f64,
    /// `derivative − rhs`
    pub residual: f64,
}

/// Substitutes [`lambda0_paper_closed_form`] into `dg/dt = −rate·g` using a
/// Richardson-extrapolated central difference for the derivative.
pub fn closed_form_residual(params: &LindbladParams, t: f64) -> SubstitutionResidual {
    let g = |s: f64| {
        let l = lambda0_paper_closed_form(params, s);
        (l * (1.0 + (-params.gamma * s).exp())).powi(2)
    };
    let scale = params.g_rate().abs().max(params.gamma).max(1e-6);
    let h = 1e-2 / scale;
    let d1 = (g(t + h) - g(t - h)) / (2.0 * h);
    let d2 = (g(t + h / 2.0) - g(t - h / 2.0)) / h;
    let derivative = (4.0 * d2 - d1) / 3.0;
    let gv = g(t);
    let rhs = -params.g_rate() * gv;
    SubstitutionResidual {
        t,
        g: gv,
        derivative,
        rhs,
        residual: derivative - rhs,
    }
}

/// `¼(1 + e^{iφ}) e^{−2iβt n̂} ∓ ¼(1 − e^{iφ})` as a diagonal field operator;
/// `sign = -1` for λ̂₁, `+1` for λ̂₂.
fn ansatz_field(phase: ABPhase, model: &DispersiveModel, t: f64, sign: f64) -> FieldOperator {
    let d = model.space().cutoff();
    let e = phase.factor();
    let one = C64::new(1.0, 0.0);
    let p = (one + e) * 0.25;
    let m = (one - e) * 0.25 * sign;
    let bt = model.beta() * t;
    let diag = DMatrix::from_fn(d, d, |i, j| {
        if i == j {
            p * C64::from_polar(1.0, -2.0 * bt * i as f64) + m
        } else {
            C64::new(0.0, 0.0)
        }
    });
    FieldOperator::from_matrix(diag).expect("square")
}

/// `λ₀(t)(1 + e^{−Γt})`, the scalar shared by both ansatz operators.
pub fn ansatz_scalar(params: &LindbladParams, lambda0_t: f64, t: f64) -> f64 {
    lambda0_t * (1.0 + (-params.gamma * t).exp())
}

/// λ₀(t) from the scalar equation.
fn lambda0_at(params: &LindbladParams, t: f64) -> Result<f64> {
    Ok(*lambda0_ode_solve(params, &[0.0, t])?
        .last()
        .expect("two points"))
}

/// `(λ̂₁(t), λ̂₂(t))` with `⟨n̂⟩` frozen to `|α|²`:
///
/// ```text
/// λ̂₁ = s⟨n̂⟩ |↑⟩⟨↓| ⊗ [¼(1+e^{iφ})e^{−2in̂βt} − ¼(1−e^{iφ})]
/// λ̂₂ = s⟨n̂⟩ |↓⟩⟨↑| ⊗ [¼(1+e^{iφ})e^{−2in̂βt} + ¼(1−e^{iφ})]
/// ```
///
/// where `s = λ₀(t)(1 + e^{−Γt})` and λ₀(t) comes from the scalar equation.
pub fn ansatz_operators(
    t: f64,
    phase: ABPhase,
    params: &LindbladParams,
    model: &DispersiveModel,
) -> Result<(CompositeOperator, CompositeOperator)> {
    let lambda0 = lambda0_at(params, t)?;
    let s = C64::new(
        ansatz_scalar(params, lambda0, t) * params.alpha.norm_sqr(),
        0.0,
    );
    let zero = C64::new(0.0, 0.0);
    let raise = Matrix2::new(zero, zero, s, zero);
    let lower = Matrix2::new(zero, s, zero, zero);
    Ok((
        CompositeOperator::kron(&raise, &ansatz_field(phase, model, t, -1.0)),
        CompositeOperator::kron(&lower, &ansatz_field(phase, model, t, 1.0)),
    ))
}

/// `ρ = Σᵢⱼ λ̂ᵢ|σᵢα⟩⟨σⱼα|λ̂ⱼ†` with `σ₁ = ↓`, `σ₂ = ↑`.
pub fn ansatz_density(
    t: f64,
    phase: ABPhase,
    params: &LindbladParams,
    model: &DispersiveModel,
) -> Result<DensityOperator> {
    let (l1, l2) = ansatz_operators(t, phase, params, model)?;
    let a = coherent_state(params.alpha, model.space())?;
    let psi1 = l1.apply(&SpinFieldVector::basis_product(Spin::Down, &a))?;
    let psi2 = l2.apply(&SpinFieldVector::basis_product(Spin::Up, &a))?;
    let (u, v) = (psi1.amplitudes(), psi2.amplitudes());
    let matrix = u * u.adjoint() + v * v.adjoint() + u * v.adjoint() + v * u.adjoint();
    DensityOperator::from_matrix(matrix, model.space())
}

/// Where λ₀(t) comes from when building the final-regime density operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lambda0Source {
    Ode,
    PaperClosedForm,
}

/// Final-regime density operator
/// `w |n_α⟩⟨n_α| ⊗ (|↑⟩⟨↑| + |↓⟩⟨↓| + e^{iφ}|↑⟩⟨↓| + e^{−iφ}|↓⟩⟨↑|)`
/// with `w = ¼λ₀(t)²(1 + e^{−Γt})²|α|⁴`.
pub fn final_density(
    t: f64,
    phase: ABPhase,
    params: &LindbladParams,
    space: FockSpace,
    source: Lambda0Source,
) -> Result<DensityOperator> {
    let n = params.n_alpha as usize;
    if n >= space.cutoff() {
        return Err(Error::InvalidParameter {
            name: "n_alpha",
            reason: format!("number state {n} outside cutoff {}", space.cutoff()),
        });
    }
    let lambda0 = match source {
        Lambda0Source::Ode => lambda0_at(params, t)?,
        Lambda0Source::PaperClosedForm => lambda0_paper_closed_form(params, t),
    };
    final_density_with(t, lambda0, phase, params, space)
}

/// [`final_density`] for an already known λ₀(t).
pub fn final_density_with(
    t: f64,
    lambda0_t: f64,
    phase: ABPhase,
    params: &LindbladParams,
    space: FockSpace,
) -> Result<DensityOperator> {
    let n = params.n_alpha as usize;
    let d = space.cutoff();
    if n >= d {
        return Err(Error::InvalidParameter {
            name: "n_alpha",
            reason: format!("number state {n} outside cutoff {d}"),
        });
    }
    let w = 0.25 * ansatz_scalar(params, lambda0_t, t).powi(2) * params.alpha.norm_sqr().powi(2);
    let e = phase.factor();
    let mut m = DMatrix::zeros(2 * d, 2 * d);
    let (dn, up) = (Spin::Down.index() * d + n, Spin::Up.index() * d + n);
    m[(dn, dn)] = C64::new(w, 0.0);
    m[(up, up)] = C64::new(w, 0.0);
    m[(up, dn)] = e * w;
    m[(dn, up)] = e.conj() * w;
    DensityOperator::from_matrix(m, space)
}
