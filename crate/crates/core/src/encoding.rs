//! Bits carried by the presence or absence of an AB phase, product-state
//! registers, period-invariant storage and qudit superpositions.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::catqubit::phase_qubit;
use crate::dispersive::ABPhase;
use crate::hilbert::{coherent_state, FieldVector, FockSpace};
use crate::projection::{cat_overlap, QUASI_ORTHOGONAL_OVERLAP};
use crate::{Error, Result, C64};

/// Phases with `|φ| ≤ PHASE_THRESHOLD` count as "no phase".
pub const PHASE_THRESHOLD: f64 = 1e-9;

/// Largest register expanded into the full `2ⁿ` tensor.
pub const MAX_TENSOR_SLOTS: usize = 20;

/// `f(φ)`: 1 when a phase is present above threshold, 0 otherwise.
pub fn bit_of_phase(entry: Option<&ABPhase>) -> bool {
    entry.is_some_and(|p| p.radians().abs() > PHASE_THRESHOLD)
}

/// A string of ASCII `'0'`/`'1'` bits.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Bits(pub Vec<bool>);

impl Bits {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromStr for Bits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::MalformedBits(other)),
            })
            .collect::<Result<Vec<_>>>()
            .map(Bits)
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Ordered AB phases, `None` for flux off. Serializes as a JSON array of
/// radians and `null`s.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PhaseSequence {
    pub phases: Vec<Option<ABPhase>>,
}

impl PhaseSequence {
    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }
}

pub fn encode_string(bits: &Bits, default_phase: ABPhase) -> Result<PhaseSequence> {
    if !bit_of_phase(Some(&default_phase)) {
        return Err(Error::SubThresholdPhase(default_phase.radians()));
    }
    Ok(PhaseSequence {
        phases: bits.0.iter().map(|&b| b.then_some(default_phase)).collect(),
    })
}

pub fn decode_sequence(seq: &PhaseSequence) -> Bits {
    Bits(
        seq.phases
            .iter()
            .map(|p| bit_of_phase(p.as_ref()))
            .collect(),
    )
}

/// Logical basis of each register slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "basis", rename_all = "lowercase")]
pub enum Basis {
    /// `{|0⟩, |1⟩}`
    Abstract,
    /// `{|−α⟩, |α⟩}` in one cavity per slot; `alpha` is `[re, im]`.
    Cat {
        #[serde(with = "crate::serde_complex")]
        alpha: C64,
    },
}

/// Product register; slot `k` holds `(1, e^{iφₖ})/√2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodedRegister {
    #[serde(flatten)]
    pub basis: Basis,
    /// Slot phases in radians, unreduced.
    pub phases: Vec<f64>,
}

impl EncodedRegister {
    pub fn slots(&self) -> usize {
        self.phases.len()
    }

    pub fn slot_coefficients(&self, k: usize) -> [C64; 2] {
        phase_qubit(ABPhase::new(self.phases[k]))
    }

    /// Slot `k` as a Fock-space vector `(|−α⟩ + e^{iφ}|α⟩)/√2`; its norm
    /// differs from 1 by `cos φ · e^{-2|α|²}`.
    pub fn embed_slot(&self, k: usize, space: FockSpace) -> Result<FieldVector> {
        let Basis::Cat { alpha } = self.basis else {
            return Err(Error::InvalidParameter {
                name: "basis",
                reason: "only cat-basis registers embed into a cavity".into(),
            });
        };
        let [c0, c1] = self.slot_coefficients(k);
        let minus = coherent_state(-alpha, space)?;
        let plus = coherent_state(alpha, space)?;
        FieldVector::linear_combination(&[(c0, &minus), (c1, &plus)])
    }

    /// `⟨self|other⟩` slot by slot in the orthonormal-logical convention.
    pub fn overlap(&self, other: &EncodedRegister) -> Result<C64> {
        self.check_compatible(other)?;
        Ok(self
            .phases
            .iter()
            .zip(&other.phases)
            .map(|(a, b)| (C64::new(1.0, 0.0) + C64::from_polar(1.0, b - a)) * 0.5)
            .product())
    }

    /// Per-slot fidelities `|⟨slotₖ|slot'ₖ⟩|`.
    pub fn slot_fidelities(&self, other: &EncodedRegister) -> Result<Vec<f64>> {
        self.check_compatible(other)?;
        Ok(self
            .phases
            .iter()
            .zip(&other.phases)
            .map(|(a, b)| ((C64::new(1.0, 0.0) + C64::from_polar(1.0, b - a)) * 0.5).norm())
            .collect())
    }

    pub fn fidelity(&self, other: &EncodedRegister) -> Result<f64> {
        Ok(self.overlap(other)?.norm())
    }

    /// Full `2ⁿ` amplitude vector; bit `k` of the index (most significant
    /// first) selects the second basis state of slot `k`.
    pub fn to_tensor(&self) -> Result<DVector<C64>> {
        let n = self.slots();
        if n > MAX_TENSOR_SLOTS {
            return Err(Error::InvalidParameter {
                name: "slots",
                reason: format!("{n} slots exceed the tensor limit {MAX_TENSOR_SLOTS}"),
            });
        }
        let coeffs: Vec<[C64; 2]> = (0..n).map(|k| self.slot_coefficients(k)).collect();
        Ok(DVector::from_fn(1 << n, |idx, _| {
            coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c[(idx >> (n - 1 - k)) & 1])
                .product()
        }))
    }

    fn check_compatible(&self, other: &EncodedRegister) -> Result<()> {
        if self.slots() != other.slots() {
            return Err(Error::RegisterMismatch(format!(
                "{} vs {} slots",
                self.slots(),
                other.slots()
            )));
        }
        if self.basis != other.basis {
            return Err(Error::RegisterMismatch(format!(
                "basis {:?} vs {:?}",
                self.basis, other.basis
            )));
        }
        Ok(())
    }
}

pub fn build_register(seq: &PhaseSequence, basis: Basis) -> Result<EncodedRegister> {
    if let Basis::Cat { alpha } = basis {
        let ov = cat_overlap(alpha);
        if ov > QUASI_ORTHOGONAL_OVERLAP {
            return Err(Error::NotQuasiOrthogonal(ov));
        }
    }
    Ok(EncodedRegister {
        basis,
        phases: seq
            .phases
            .iter()
            .map(|p| p.map_or(0.0, |p| p.radians()))
            .collect(),
    })
}

/// Storage evolution: every slot phase advances by `ωt`.
pub fn storage_evolve(reg: &EncodedRegister, omega: f64, t: f64) -> Result<EncodedRegister> {
    if !(omega.is_finite() && t.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "omega/t",
            reason: "non-finite storage parameters".into(),
        });
    }
    if omega == 0.0 && t != 0.0 {
        return Err(Error::DegeneratePeriod(t));
    }
    let shift = omega * t;
    Ok(EncodedRegister {
        basis: reg.basis,
        phases: reg.phases.iter().map(|p| p + shift).collect(),
    })
}

/// `T_m = 2mπ/ω`
pub fn storage_period(omega: f64, m: u32) -> Result<f64> {
    if omega == 0.0 || !omega.is_finite() {
        return Err(Error::DegeneratePeriod(f64::NAN));
    }
    Ok(2.0 * m as f64 * PI / omega)
}

/// Generator form used by [`tensor_storage_evolve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StorageGenerator {
    /// `ω Σₖ n̂ₖ`: reproduces the per-slot shift.
    Sum,
    /// `ω Πₖ n̂ₖ` taken literally: only the all-ones component picks up a phase.
    Product,
}

/// Applies `e^{iN̂t}` to a register tensor from [`EncodedRegister::to_tensor`].
pub fn tensor_storage_evolve(
    tensor: &DVector<C64>,
    slots: usize,
    omega: f64,
    t: f64,
    generator: StorageGenerator,
) -> DVector<C64> {
    let full = (1usize << slots) - 1;
    DVector::from_fn(tensor.len(), |idx, _| {
        let eigen = match generator {
            StorageGenerator::Sum => (idx & full).count_ones() as f64,
            StorageGenerator::Product => {
                if idx & full == full {
                    1.0
                } else {
                    0.0
                }
            }
        };
        tensor[idx] * C64::from_polar(1.0, omega * t * eigen)
    })
}

/// Formal superposition `Σₗ sₗ |registerₗ⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuditState {
    pub coefficients: Vec<C64>,
    pub registers: Vec<EncodedRegister>,
}

/// Tolerance on `Σ|sₗ|² = 1` before internal renormalization.
pub const QUDIT_NORM_TOL: f64 = 1e-6;

pub fn qudit_superpose(coeffs: &[C64], registers: &[EncodedRegister]) -> Result<QuditState> {
    if coeffs.len() != registers.len() || coeffs.is_empty() {
        return Err(Error::RegisterMismatch(format!(
            "{} coefficients for {} registers",
            coeffs.len(),
            registers.len()
        )));
    }
    for r in &registers[1..] {
        registers[0].check_compatible(r)?;
    }
    let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
    if (norm - 1.0).abs() > QUDIT_NORM_TOL {
        return Err(Error::InvalidParameter {
            name: "coefficients",
            reason: format!("sum of |s|^2 is {norm}, expected 1"),
        });
    }
    let scale = norm.sqrt();
    Ok(QuditState {
        coefficients: coeffs.iter().map(|c| c / scale).collect(),
        registers: registers.to_vec(),
    })
}

/// Unitaries that act register-wise on a qudit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuditOp {
    /// Storage evolution for time `t` at frequency `omega`.
    Storage { omega: f64, t: f64 },
    /// Phase shift on one slot of every register.
    SlotPhase { slot: usize, phase: f64 },
}

pub fn qudit_apply(op: QuditOp, q: &QuditState) -> Result<QuditState> {
    let registers = q
        .registers
        .iter()
        .map(|r| match op {
            QuditOp::Storage { omega, t } => storage_evolve(r, omega, t),
            QuditOp::SlotPhase { slot, phase } => {
                if slot >= r.slots() {
                    return Err(Error::RegisterMismatch(format!(
                        "slot {slot} outside {} slots",
                        r.slots()
                    )));
                }
                let mut out = r.clone();
                out.phases[slot] += phase;
                Ok(out)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(QuditState {
        coefficients: q.coefficients.clone(),
        registers,
    })
}

impl QuditState {
    /// `⟨self|other⟩` with register overlaps from the slot algebra.
    pub fn inner(&self, other: &QuditState) -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        for (s, r) in self.coefficients.iter().zip(&self.registers) {
            for (t, q) in other.coefficients.iter().zip(&other.registers) {
                acc += s.conj() * t * r.overlap(q)?;
            }
        }
        Ok(acc)
    }

    /// Physical squared norm, which counts overlaps between branches.
    pub fn norm_sqr(&self) -> Result<f64> {
        Ok(self.inner(self)?.re)
    }

    pub fn coefficient_norm_sqr(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn fidelity(&self, other: &QuditState) -> Result<f64> {
        let n = (self.norm_sqr()? * other.norm_sqr()?).sqrt();
        Ok(self.inner(other)?.norm() / n)
    }

    /// Fidelity against a single register.
    pub fn fidelity_with_register(&self, reg: &EncodedRegister) -> Result<f64> {
        let single = QuditState {
            coefficients: vec![C64::new(1.0, 0.0)],
            registers: vec![reg.clone()],
        };
        self.fidelity(&single)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn bits(s: &str) -> Bits {
        s.parse().unwrap()
    }

    #[test]
    fn bit_function() {
        assert!(!bit_of_phase(None));
        assert!(bit_of_phase(Some(&ABPhase::new(PI / 2.0))));
        assert!(!bit_of_phase(Some(&ABPhase::new(1e-15))));
        assert!(bit_of_phase(Some(&ABPhase::new(-0.2))));
    }

    #[test]
    fn encode_example_string() {
        let seq = encode_string(&bits("10110"), ABPhase::new(PI)).unwrap();
        let pi = Some(ABPhase::new(PI));
        assert_eq!(seq.phases, vec![pi, None, pi, pi, None]);
        assert_eq!(
            serde_json::to_string(&seq).unwrap(),
            format!("[{PI},null,{PI},{PI},null]")
        );
        assert!(encode_string(&Bits::default(), ABPhase::new(PI))
            .unwrap()
            .is_empty());
        assert!(matches!(
            encode_string(&bits("1"), ABPhase::new(1e-12)),
            Err(Error::SubThresholdPhase(_))
        ));
        assert!(matches!(
            "10a1".parse::<Bits>(),
            Err(Error::MalformedBits('a'))
        ));
    }

    proptest! {
        #[test]
        fn decode_inverts_encode(v in proptest::collection::vec(any::<bool>(), 0..1024), phi in 1e-6f64..6.0) {
            let b = Bits(v);
            let seq = encode_string(&b, ABPhase::new(phi)).unwrap();
            prop_assert_eq!(decode_sequence(&seq), b.clone());
            prop_assert_eq!(b.to_string().parse::<Bits>().unwrap(), b);
        }

        #[test]
        fn storage_composes(p in proptest::collection::vec(-7.0f64..7.0, 1..12), w in 0.1f64..3.0, t1 in 0.0f64..5.0, t2 in 0.0f64..5.0) {
            let reg = EncodedRegister { basis: Basis::Abstract, phases: p };
            let a = storage_evolve(&storage_evolve(&reg, w, t1).unwrap(), w, t2).unwrap();
            let b = storage_evolve(&reg, w, t1 + t2).unwrap();
            for (x, y) in a.phases.iter().zip(&b.phases) {
                prop_assert!((x - y).abs() <= 1e-12 * (1.0 + y.abs()));
            }
        }
    }

    #[test]
    fn registers_from_sequences() {
        let seq = PhaseSequence {
            phases: vec![Some(ABPhase::new(PI))],
        };
        let r = build_register(&seq, Basis::Abstract).unwrap();
        let k = r.slot_coefficients(0);
        assert_abs_diff_eq!(k[1].re, -std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);

        let seq = encode_string(&bits("10110"), ABPhase::new(PI)).unwrap();
        let r = build_register(&seq, Basis::Abstract).unwrap();
        assert_eq!(r.slots(), 5);
        for k in [1, 4] {
            let s = r.slot_coefficients(k);
            assert_eq!(s[0], s[1]);
        }
        assert!(matches!(
            build_register(&seq, Basis::Cat { alpha: c(0.5, 0.0) }),
            Err(Error::NotQuasiOrthogonal(_))
        ));
    }

    #[test]
    fn cat_slots_nearly_normalized() {
        let seq = encode_string(&bits("10110"), ABPhase::new(PI / 3.0)).unwrap();
        let r = build_register(&seq, Basis::Cat { alpha: c(2.0, 0.0) }).unwrap();
        let space = FockSpace::new(40).unwrap();
        for k in 0..r.slots() {
            let v = r.embed_slot(k, space).unwrap();
            assert!((v.norm_sqr() - 1.0).abs() <= 5e-4);
            let want = 1.0 + r.phases[k].cos() * cat_overlap(c(2.0, 0.0));
            assert_abs_diff_eq!(v.norm_sqr(), want, epsilon = 1e-12);
        }
    }

    #[test]
    fn register_json_round_trip() {
        let r = EncodedRegister {
            basis: Basis::Cat {
                alpha: c(2.0, -0.5),
            },
            phases: vec![PI, 0.0, 1.25],
        };
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(
            s,
            r#"{"basis":"cat","alpha":[2.0,-0.5],"phases":[3.141592653589793,0.0,1.25]}"#
        );
        assert_eq!(serde_json::from_str::<EncodedRegister>(&s).unwrap(), r);
        let a: EncodedRegister =
            serde_json::from_str(r#"{"basis":"abstract","phases":[1.0]}"#).unwrap();
        assert_eq!(a.basis, Basis::Abstract);
    }

    #[test]
    fn storage_periods() {
        let seq = encode_string(&bits("10110"), ABPhase::new(PI)).unwrap();
        let reg = build_register(&seq, Basis::Abstract).unwrap();
        for omega in [0.5, 1.0, 2.0] {
            for m in 0..4 {
                let t = storage_period(omega, m).unwrap();
                let out = storage_evolve(&reg, omega, t).unwrap();
                for f in reg.slot_fidelities(&out).unwrap() {
                    assert_abs_diff_eq!(f, 1.0, epsilon = 1e-10);
                }
            }
            let half = storage_evolve(&reg, omega, PI / omega).unwrap();
            for (a, b) in reg.phases.iter().zip(&half.phases) {
                assert_abs_diff_eq!(b - a, PI, epsilon = 1e-12);
            }
        }
        assert!(matches!(
            storage_evolve(&reg, 0.0, 1.0),
            Err(Error::DegeneratePeriod(_))
        ));
        assert!(storage_evolve(&reg, 0.0, 0.0).is_ok());
    }

    #[test]
    fn tensor_oracle_distinguishes_generators() {
        let seq = encode_string(&bits("10110"), ABPhase::new(0.7)).unwrap();
        let reg = build_register(&seq, Basis::Abstract).unwrap();
        let tensor = reg.to_tensor().unwrap();
        assert_abs_diff_eq!(tensor.norm(), 1.0, epsilon = 1e-14);
        let (omega, t) = (1.3, 0.45);
        let shifted = storage_evolve(&reg, omega, t).unwrap().to_tensor().unwrap();
        let sum = tensor_storage_evolve(&tensor, 5, omega, t, StorageGenerator::Sum);
        assert!((&sum - &shifted).camax() < 1e-14);
        let prod = tensor_storage_evolve(&tensor, 5, omega, t, StorageGenerator::Product);
        assert!((&prod - &shifted).camax() > 1e-2);
        // both generators are the identity at a full period
        let tp = storage_period(omega, 1).unwrap();
        let prod = tensor_storage_evolve(&tensor, 5, omega, tp, StorageGenerator::Product);
        assert!((&prod - &tensor).camax() < 1e-14);
    }

    #[test]
    fn qudits() {
        let seq = encode_string(&bits("10110"), ABPhase::new(PI)).unwrap();
        let reg = build_register(&seq, Basis::Abstract).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let q = qudit_superpose(&[c(h, 0.0), c(h, 0.0)], &[reg.clone(), reg.clone()]).unwrap();
        assert_abs_diff_eq!(
            q.fidelity_with_register(&reg).unwrap(),
            1.0,
            epsilon = 1e-12
        );

        let other = build_register(
            &encode_string(&bits("01001"), ABPhase::new(PI)).unwrap(),
            Basis::Abstract,
        )
        .unwrap();
        let single =
            qudit_superpose(&[c(1.0, 0.0), c(0.0, 0.0)], &[reg.clone(), other.clone()]).unwrap();
        assert_abs_diff_eq!(
            single.fidelity_with_register(&reg).unwrap(),
            1.0,
            epsilon = 1e-12
        );

        let q = qudit_superpose(&[c(0.6, 0.0), c(0.0, 0.8)], &[reg.clone(), other]).unwrap();
        let stored = qudit_apply(
            QuditOp::Storage {
                omega: 2.0,
                t: storage_period(2.0, 3).unwrap(),
            },
            &q,
        )
        .unwrap();
        assert_abs_diff_eq!(stored.fidelity(&q).unwrap(), 1.0, epsilon = 1e-10);
        let moved = qudit_apply(QuditOp::Storage { omega: 2.0, t: 0.3 }, &q).unwrap();
        assert_abs_diff_eq!(
            moved.norm_sqr().unwrap(),
            q.norm_sqr().unwrap(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(moved.coefficient_norm_sqr(), 1.0, epsilon = 1e-12);
        let gated = qudit_apply(QuditOp::SlotPhase { slot: 1, phase: PI }, &q).unwrap();
        assert!(gated.fidelity(&q).unwrap() < 1e-6);

        let short = EncodedRegister {
            basis: Basis::Abstract,
            phases: vec![0.0],
        };
        assert!(matches!(
            qudit_superpose(&[c(h, 0.0), c(h, 0.0)], &[reg.clone(), short]),
            Err(Error::RegisterMismatch(_))
        ));
        assert!(qudit_superpose(&[c(1.0, 0.0), c(1.0, 0.0)], &[reg.clone(), reg]).is_err());
    }
}
