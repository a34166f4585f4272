//! Classical fourth-order Runge–Kutta with step-doubling error control.

use nalgebra::DMatrix;

use crate::{Error, Result, C64};

/// Vector-space operations the integrator needs.
pub trait OdeState: Clone {
    /// `self + a · other`
    fn axpy(&self, a: f64, other: &Self) -> Self;
    /// Max-norm of `self − other`.
    fn distance(&self, other: &Self) -> f64;
    /// Max-norm, used to scale the relative tolerance.
    fn magnitude(&self) -> f64;
}

impl OdeState for f64 {
    fn axpy(&self, a: f64, other: &Self) -> Self {
        self + a * other
    }

    fn distance(&self, other: &Self) -> f64 {
        (self - other).abs()
    }

    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl OdeState for DMatrix<C64> {
    fn axpy(&self, a: f64, other: &Self) -> Self {
        self + other * C64::new(a, 0.0)
    }

    fn distance(&self, other: &Self) -> f64 {
        self.iter()
            .zip(other.iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    fn magnitude(&self) -> f64 {
        self.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }
}

/// One RK4 step of size `h` for `y' = f(t, y)`.
pub fn rk4_step<S, F>(f: &F, t: f64, y: &S, h: f64) -> S
where
    S: OdeState,
    F: Fn(f64, &S) -> S,
{
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, &y.axpy(0.5 * h, &k1));
    let k3 = f(t + 0.5 * h, &y.axpy(0.5 * h, &k2));
    let k4 = f(t + h, &y.axpy(h, &k3));
    y.axpy(h / 6.0, &k1)
        .axpy(h / 3.0, &k2)
        .axpy(h / 3.0, &k3)
        .axpy(h / 6.0, &k4)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveRk4 {
    pub rtol: f64,
    pub atol: f64,
    /// First trial step; later steps are chosen from the error estimate.
    pub initial_step: f64,
    pub min_step: f64,
    pub max_steps: usize,
}

impl Default for AdaptiveRk4 {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            initial_step: 1e-2,
            min_step: 1e-12,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IntegrationStats {
    pub accepted: usize,
    pub rejected: usize,
}

impl AdaptiveRk4 {
    /// Integrates from `t0` to `t1`. A full step is compared with two half
    /// steps; the extrapolated half-step result is kept when the Richardson estimate
    /// `|y₂ − y₁|/15` is within `atol + rtol·|y|`.
    pub fn integrate<S, F>(&self, f: &F, t0: f64, y0: S, t1: f64) -> Result<(S, IntegrationStats)>
    where
        S: OdeState,
        F: Fn(f64, &S) -> S,
    {
        let mut stats = IntegrationStats::default();
        if t1 == t0 {
            return Ok((y0, stats));
        }
        if !(t0.is_finite() && t1.is_finite()) || t1 < t0 {
            return Err(Error::InvalidParameter {
                name: "t",
                reason: format!("cannot integrate from {t0} to {t1}"),
            });
        }
        let mut t = t0;
        let mut y = y0;
        let mut h = self.initial_step.min(t1 - t0);
        while t < t1 {
            if stats.accepted + stats.rejected >= self.max_steps || h < self.min_step {
                return Err(Error::StepSizeFailure {
                    t,
                    step: h,
                    steps: stats.accepted + stats.rejected,
                });
            }
            let last = t + h >= t1;
            let h_try = if last { t1 - t } else { h };
            let full = rk4_step(f, t, &y, h_try);
            let half = rk4_step(f, t, &y, 0.5 * h_try);
            let two = rk4_step(f, t + 0.5 * h_try, &half, 0.5 * h_try);
            let err = two.distance(&full) / 15.0;
            let scale = self.atol + self.rtol * two.magnitude().max(y.magnitude());
            if !err.is_finite() {
                stats.rejected += 1;
                h = 0.25 * h_try;
                continue;
            }
            let factor = if err == 0.0 {
                4.0
            } else {
                (0.9 * (scale / err).powf(0.2)).clamp(0.2, 4.0)
            };
            if err <= scale {
                stats.accepted += 1;
                t = if last { t1 } else { t + h_try };
                // local extrapolation lifts the accepted value to fifth order
                y = two.axpy(1.0 / 15.0, &two.axpy(-1.0, &full));
                h = h_try * factor;
            } else {
                stats.rejected += 1;
                h = h_try * factor;
            }
        }
        Ok((y, stats))
    }

    /// Values of the solution at every point of a nondecreasing grid.
    pub fn integrate_grid<S, F>(&self, f: &F, grid: &[f64], y0: S) -> Result<Vec<S>>
    where
        S: OdeState,
        F: Fn(f64, &S) -> S,
    {
        let mut out = Vec::with_capacity(grid.len());
        let Some(&first) = grid.first() else {
            return Ok(out);
        };
        let mut y = y0;
        let mut t = first;
        out.push(y.clone());
        for &next in &grid[1..] {
            let (y1, _) = self.integrate(f, t, y, next)?;
            y = y1;
            t = next;
            out.push(y.clone());
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exponential_decay() {
        let f = |_t: f64, y: &f64| -0.7 * y;
        let (y, stats) = AdaptiveRk4::default().integrate(&f, 0.0, 2.0, 3.0).unwrap();
        assert_relative_eq!(y, 2.0 * (-2.1f64).exp(), max_relative = 1e-9);
        assert!(stats.accepted > 0);
    }

    #[test]
    fn oscillator_matrix() {
        // y' = i y on a 1×1 complex matrix
        let f = |_t: f64, y: &DMatrix<C64>| y * C64::new(0.0, 1.0);
        let y0 = DMatrix::from_element(1, 1, C64::new(1.0, 0.0));
        let (y, _) = AdaptiveRk4::default().integrate(&f, 0.0, y0, 2.0).unwrap();
        let want = C64::from_polar(1.0, 2.0);
        assert!((y[(0, 0)] - want).norm() < 1e-8);
    }

    #[test]
    fn step_cap_reports_failure() {
        let f = |_t: f64, y: &f64| -y;
        let cfg = AdaptiveRk4 {
            max_steps: 2,
            initial_step: 1e-3,
            ..Default::default()
        };
        assert!(matches!(
            cfg.integrate(&f, 0.0, 1.0, 100.0),
            Err(Error::StepSizeFailure { .. })
        ));
    }

    #[test]
    fn backwards_interval_rejected() {
        let f = |_t: f64, y: &f64| *y;
        assert!(AdaptiveRk4::default().integrate(&f, 1.0, 1.0, 0.0).is_err());
    }
}
