//! Run configuration document and its validation.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use abtransfer::dispersive::Spin;
use abtransfer::dissipation::LindbladParams;
use abtransfer::encoding::{Basis, EncodedRegister, PhaseSequence};
use abtransfer::hilbert::FockSpace;
use abtransfer::C64;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Interaction time selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TChoice {
    /// `βt = π/2`
    Transfer,
    /// `βt = π`
    Pattern,
    /// Explicit `t`.
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            start: 0.0,
            stop: 2.0 * PI,
            steps: 101,
        }
    }
}

impl SweepSpec {
    /// Evenly spaced points including both ends.
    pub fn points(&self) -> Vec<f64> {
        let span = self.stop - self.start;
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| self.start + span * k as f64 / last)
            .collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LindbladConfig {
    pub kappa: Option<f64>,
    pub n_bar: Option<f64>,
    pub gamma: Option<f64>,
    pub lambda0_init: Option<f64>,
    pub n_alpha: Option<u32>,
    pub omega_t: Option<f64>,
    pub alpha: Option<[f64; 2]>,
}

/// Slot basis for registers built from bits: `"abstract"` or `{"cat": [re, im]}`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum BasisChoice {
    Abstract,
    Cat([f64; 2]),
}

impl From<BasisChoice> for Basis {
    fn from(b: BasisChoice) -> Self {
        match b {
            BasisChoice::Abstract => Basis::Abstract,
            BasisChoice::Cat([re, im]) => Basis::Cat {
                alpha: C64::new(re, im),
            },
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StorageSpec {
    pub register: Option<EncodedRegister>,
    pub bits: Option<String>,
    pub basis: Option<BasisChoice>,
    pub omegas: Option<Vec<f64>>,
    pub periods: Option<u32>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DissipateSpec {
    pub t_max: Option<f64>,
    pub steps: Option<usize>,
    pub lambda0_family: Option<Vec<f64>>,
    pub gamma_family: Option<Vec<f64>>,
    pub phase: Option<f64>,
}

/// Everything a run can be configured with. Every command reads the keys
/// it needs and ignores the rest; keys outside this schema are rejected.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub alpha: Option<[f64; 2]>,
    pub beta: Option<f64>,
    pub t_choice: Option<TChoice>,
    pub t: Option<f64>,
    pub phases: Option<Vec<f64>>,
    pub sweep: Option<SweepSpec>,
    pub outcome: Option<Spin>,
    pub cutoff: Option<usize>,
    pub lindblad: Option<LindbladConfig>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub bits: Option<String>,
    pub default_phase: Option<f64>,
    pub random_length: Option<usize>,
    pub sequence: Option<PhaseSequence>,
    pub storage: Option<StorageSpec>,
    pub dissipate: Option<DissipateSpec>,
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn finite(name: &str, x: f64) -> Result<f64, CliError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(bad(format!("{name} must be finite")))
    }
}

fn positive(name: &str, x: f64) -> Result<f64, CliError> {
    if finite(name, x)? > 0.0 {
        Ok(x)
    } else {
        Err(bad(format!("{name} must be positive")))
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| bad(format!("{}: {e}", path.display())))
    }

    /// Structural checks shared by all commands.
    pub fn validate(&self) -> Result<(), CliError> {
        if let Some([re, im]) = self.alpha {
            finite("alpha", re)?;
            finite("alpha", im)?;
        }
        if let Some(b) = self.beta {
            positive("beta", b)?;
        }
        match (self.t_choice, self.t) {
            (Some(TChoice::Custom), None) => return Err(bad("t_choice custom requires t")),
            (Some(TChoice::Custom), Some(t)) => {
                if finite("t", t)? < 0.0 {
                    return Err(bad("t must be non-negative"));
                }
            }
            (_, Some(_)) => return Err(bad("t is only used with t_choice custom")),
            _ => {}
        }
        if let Some(ps) = &self.phases {
            if ps.is_empty() {
                return Err(bad("phases must not be empty"));
            }
            for &p in ps {
                finite("phases", p)?;
            }
        }
        if let Some(s) = &self.sweep {
            finite("sweep.start", s.start)?;
            finite("sweep.stop", s.stop)?;
            if s.steps < 2 {
                return Err(bad("sweep.steps must be at least 2"));
            }
            if s.stop <= s.start {
                return Err(bad("sweep.stop must exceed sweep.start"));
            }
        }
        if let Some(c) = self.cutoff {
            FockSpace::new(c).map_err(|e| bad(e.to_string()))?;
        }
        if let Some(p) = self.default_phase {
            finite("default_phase", p)?;
        }
        if let Some(st) = &self.storage {
            if st.register.is_some() && (st.bits.is_some() || st.basis.is_some()) {
                return Err(bad(
                    "storage.register excludes storage.bits and storage.basis",
                ));
            }
            if let Some(ws) = &st.omegas {
                if ws.is_empty() {
                    return Err(bad("storage.omegas must not be empty"));
                }
                for &w in ws {
                    if finite("storage.omegas", w)? == 0.0 {
                        return Err(bad("storage.omegas must be nonzero"));
                    }
                }
            }
        }
        if let Some(d) = &self.dissipate {
            if let Some(t) = d.t_max {
                positive("dissipate.t_max", t)?;
            }
            if matches!(d.steps, Some(s) if s < 2) {
                return Err(bad("dissipate.steps must be at least 2"));
            }
            for (name, fam) in [
                ("dissipate.lambda0_family", &d.lambda0_family),
                ("dissipate.gamma_family", &d.gamma_family),
            ] {
                if let Some(f) = fam {
                    if f.is_empty() {
                        return Err(bad(format!("{name} must not be empty")));
                    }
                    for &x in f {
                        finite(name, x)?;
                    }
                }
            }
            if let Some(p) = d.phase {
                finite("dissipate.phase", p)?;
            }
        }
        Ok(())
    }

    pub fn alpha_required(&self) -> Result<C64, CliError> {
        self.alpha
            .map(|[re, im]| C64::new(re, im))
            .ok_or_else(|| bad("missing required key: alpha"))
    }

    pub fn alpha_or_default(&self) -> C64 {
        self.alpha
            .map_or(C64::new(2.0, 0.0), |[re, im]| C64::new(re, im))
    }

    pub fn beta(&self) -> f64 {
        self.beta.unwrap_or(1.0)
    }

    /// Explicit cutoff, else at least 40 and enough for `alpha`.
    pub fn space(&self, alpha: C64) -> Result<FockSpace, CliError> {
        let c = self
            .cutoff
            .unwrap_or_else(|| FockSpace::for_alpha(alpha).cutoff().max(40));
        FockSpace::new(c).map_err(|e| bad(e.to_string()))
    }

    pub fn phases(&self) -> Vec<f64> {
        self.phases
            .clone()
            .unwrap_or_else(|| vec![0.0, PI / 3.0, PI / 2.0, PI, 3.0 * PI / 2.0])
    }

    /// Lindblad parameters with defaults filled in; `alpha` falls back to the
    /// top-level value.
    pub fn lindblad(&self) -> Result<LindbladParams, CliError> {
        let l = self.lindblad.clone().unwrap_or_default();
        let alpha = l
            .alpha
            .map(|[re, im]| C64::new(re, im))
            .unwrap_or_else(|| self.alpha_or_default());
        let p = LindbladParams {
            kappa: l.kappa.unwrap_or(0.1),
            n_bar: l.n_bar.unwrap_or(0.5),
            gamma: l.gamma.unwrap_or(1.0),
            lambda0_init: l.lambda0_init.unwrap_or(1.0),
            n_alpha: l.n_alpha.unwrap_or(1),
            omega_t: l.omega_t.unwrap_or(1.0),
            alpha,
        };
        p.validate().map_err(|e| bad(e.to_string()))?;
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_rejected() {
        let r: Result<RunConfig, _> = serde_json::from_str(r#"{"alpha":[2,0],"colour":1}"#);
        assert!(r.is_err());
        let r: Result<RunConfig, _> =
            serde_json::from_str(r#"{"sweep":{"start":0,"stop":1,"steps":3,"x":1}}"#);
        assert!(r.is_err());
    }

    #[test]
    fn sweep_points_hit_both_ends() {
        let p = SweepSpec::default().points();
        assert_eq!(p.len(), 101);
        assert_eq!(p[0], 0.0);
        assert_eq!(p[100], 2.0 * PI);
        assert_eq!(p[50], PI);
    }

    #[test]
    fn custom_time_requires_t() {
        let c: RunConfig = serde_json::from_str(r#"{"t_choice":"custom"}"#).unwrap();
        assert!(c.validate().is_err());
        let c: RunConfig = serde_json::from_str(r#"{"t":1.0}"#).unwrap();
        assert!(c.validate().is_err());
        let c: RunConfig = serde_json::from_str(r#"{"t_choice":"custom","t":0.3}"#).unwrap();
        assert!(c.validate().is_ok());
    }

    #[test]
    fn register_in_config() {
        let c: RunConfig = serde_json::from_str(
            r#"{"storage":{"register":{"basis":"cat","alpha":[2.0,0.0],"phases":[0.0,1.0]}}}"#,
        )
        .unwrap();
        assert_eq!(c.storage.unwrap().register.unwrap().slots(), 2);
    }

    #[test]
    fn basis_choice_forms() {
        let c: RunConfig =
            serde_json::from_str(r#"{"storage":{"bits":"10","basis":{"cat":[2.0,0.0]}}}"#).unwrap();
        let b: Basis = c.storage.unwrap().basis.unwrap().into();
        assert_eq!(
            b,
            Basis::Cat {
                alpha: C64::new(2.0, 0.0)
            }
        );
        let c: RunConfig = serde_json::from_str(r#"{"storage":{"basis":"abstract"}}"#).unwrap();
        assert_eq!(c.storage.unwrap().basis, Some(BasisChoice::Abstract));
    }
}
