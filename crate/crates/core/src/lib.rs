//! Transfer of an Aharonov-Bohm phase from a spin qubit to a cavity
//! coherent-state superposition.
//!
//! The crate pairs every closed-form expression with an independent
//! numerical route on a truncated Fock space, so the two can be compared:
//!
//! * [`hilbert`]: truncated Fock space, coherent states, ladder operators.
//! * [`dispersive`]: AB-phased spin injection and the dispersive
//!   spin-photon Hamiltonian, evolved analytically and by dense
//!   diagonalization.
//! * [`projection`]: spin measurement, the coherent-state Hadamard-type
//!   gate, transferred cat states and the projection pattern.
//! * [`catqubit`]: one- and two-qubit coefficient algebra on `{|-α⟩, |α⟩}`.
//! * [`encoding`]: bit strings as sequences of AB phases, register storage
//!   and qudit superpositions.
//! * [`dissipation`]: Lindblad dynamics, the λ₀(t) scalar equation and the
//!   final-regime density operator.
//! * [`report`]: closed-form versus oracle discrepancy records.
//!
//! Units are natural (ħ = 1): β and ω are angular frequencies, t is time.

pub mod catqubit;
pub mod dispersive;
pub mod dissipation;
pub mod encoding;
mod error;
pub mod hilbert;
pub mod integrate;
pub mod projection;
pub mod report;

/// `C64` as a `[re, im]` pair.
pub(crate) mod serde_complex {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::C64;

    pub fn serialize<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(C64::new(re, im))
    }
}

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Default numerical tolerance for "normalized" states.
pub const NORM_TOL: f64 = 1e-10;

/// Fidelity `|⟨u|v⟩| / (‖u‖‖v‖)` between two amplitude vectors, global phase
/// quotiented out.
pub(crate) fn vector_fidelity(u: &nalgebra::DVector<C64>, v: &nalgebra::DVector<C64>) -> f64 {
    let nu = u.norm();
    let nv = v.norm();
    if nu == 0.0 || nv == 0.0 {
        return 0.0;
    }
    u.dotc(v).norm() / (nu * nv)
}
