//! Dense state-vector simulation for registers of up to four qubits.
//!
//! Qubit 0 is the most significant bit of a basis-state index: in a 3-qubit
//! register, index `0b100` is |1⟩|0⟩|0⟩.
//!
//! Registers are values. Gates, measurements and projections return a fresh
//! register and leave the input untouched.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SealError};
use crate::rng::RandomSource;

pub type ComplexAmplitude = Complex64;

/// Largest register the simulator will build.
pub const MAX_QUBITS: usize = 4;

/// Tolerance for algebraic identities (normalization, unitarity, fidelities).
pub const TOLERANCE: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// One of the three Pauli eigenbases. Each pair is mutually unbiased.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
    Y,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::Z, Basis::X, Basis::Y];

    /// Computational-basis amplitudes of the basis state encoding `bit`.
    ///
    /// |0_x⟩ = (|0⟩+|1⟩)/√2, |1_x⟩ = (|0⟩−|1⟩)/√2,
    /// |0_y⟩ = (|0⟩+i|1⟩)/√2, |1_y⟩ = (|0⟩−i|1⟩)/√2.
    pub fn vector(self, bit: u8) -> [Complex64; 2] {
        let h = FRAC_1_SQRT_2;
        match (self, bit) {
            (Basis::Z, 0) => [ONE, ZERO],
            (Basis::Z, _) => [ZERO, ONE],
            (Basis::X, 0) => [Complex64::new(h, 0.0), Complex64::new(h, 0.0)],
            (Basis::X, _) => [Complex64::new(h, 0.0), Complex64::new(-h, 0.0)],
            (Basis::Y, 0) => [Complex64::new(h, 0.0), Complex64::new(0.0, h)],
            (Basis::Y, _) => [Complex64::new(h, 0.0), Complex64::new(0.0, -h)],
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Basis::Z => "Z",
            Basis::X => "X",
            Basis::Y => "Y",
        };
        f.write_str(s)
    }
}

impl FromStr for Basis {
    type Err = SealError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Z" | "z" => Ok(Basis::Z),
            "X" | "x" => Ok(Basis::X),
            "Y" | "y" => Ok(Basis::Y),
            other => Err(SealError::Malformed(format!("unknown basis `{other}`"))),
        }
    }
}

/// Classical preparation record for one qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QubitSpec {
    pub basis: Basis,
    pub bit: u8,
}

impl QubitSpec {
    pub fn new(basis: Basis, bit: u8) -> Result<Self> {
        if bit > 1 {
            return Err(SealError::InvalidBit(bit));
        }
        Ok(Self { basis, bit })
    }
}

impl fmt::Display for QubitSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.basis {
            Basis::Z => write!(f, "|{}⟩", self.bit),
            Basis::X => write!(f, "|{}_x⟩", self.bit),
            Basis::Y => write!(f, "|{}_y⟩", self.bit),
        }
    }
}

/// Normalized pure state of 1 to [`MAX_QUBITS`] qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateRegister {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateRegister {
    /// Builds a register from raw amplitudes, rejecting non-finite values and
    /// states whose squared norm is off by more than `tolerance`.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>, tolerance: f64) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(SealError::Malformed(format!(
                "amplitude array of length {len} is not 2^n for n >= 1"
            )));
        }
        let num_qubits = len.trailing_zeros() as usize;
        if num_qubits > MAX_QUBITS {
            return Err(SealError::CapacityExceeded {
                requested: num_qubits,
                max: MAX_QUBITS,
            });
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(SealError::Malformed("non-finite amplitude".into()));
        }
        let norm = norm_sqr(&amplitudes);
        if (norm - 1.0).abs() > tolerance {
            return Err(SealError::NotNormalized(norm));
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// The computational basis state `|index⟩` on `num_qubits` qubits.
    pub fn basis_state(num_qubits: usize, index: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(SealError::CapacityExceeded {
                requested: num_qubits,
                max: MAX_QUBITS,
            });
        }
        let dim = 1 << num_qubits;
        if index >= dim {
            return Err(SealError::BasisStateOutOfRange {
                index,
                width: num_qubits,
            });
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amplitudes)
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateRegister) -> Result<Complex64> {
        self.same_size(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    fn same_size(&self, other: &StateRegister) -> Result<()> {
        if self.num_qubits != other.num_qubits {
            return Err(SealError::SizeMismatch {
                left: self.num_qubits,
                right: other.num_qubits,
            });
        }
        Ok(())
    }

    fn check_index(&self, qubit: usize) -> Result<()> {
        if qubit >= self.num_qubits {
            return Err(SealError::IndexOutOfRange {
                index: qubit,
                len: self.num_qubits,
            });
        }
        Ok(())
    }

    /// Bit mask selecting `qubit` inside a basis-state index.
    fn mask(&self, qubit: usize) -> usize {
        1 << (self.num_qubits - 1 - qubit)
    }

    /// Born probabilities of the two outcomes of measuring `qubit` in `basis`.
    pub fn outcome_probabilities(&self, qubit: usize, basis: Basis) -> Result<[f64; 2]> {
        self.check_index(qubit)?;
        let mut probs = [0.0; 2];
        for (value, p) in probs.iter_mut().enumerate() {
            let b = basis.vector(value as u8);
            *p = self
                .pairs(qubit)
                .map(|(i, j)| project_pair(&b, self.amplitudes[i], self.amplitudes[j]).norm_sqr())
                .sum();
        }
        Ok(probs)
    }

    /// Index pairs `(i, j)` differing only in `qubit`, with that qubit 0 in `i`.
    fn pairs(&self, qubit: usize) -> impl Iterator<Item = (usize, usize)> {
        let mask = self.mask(qubit);
        (0..self.amplitudes.len())
            .filter(move |i| i & mask == 0)
            .map(move |i| (i, i | mask))
    }

    /// Collapses `qubit` onto the basis state for `value` and renormalizes.
    fn collapse(&self, qubit: usize, basis: Basis, value: u8, probability: f64) -> StateRegister {
        let b = basis.vector(value);
        let scale = 1.0 / probability.sqrt();
        let mut amplitudes = vec![ZERO; self.amplitudes.len()];
        for (i, j) in self.pairs(qubit) {
            let c = project_pair(&b, self.amplitudes[i], self.amplitudes[j]) * scale;
            amplitudes[i] = c * b[0];
            amplitudes[j] = c * b[1];
        }
        StateRegister {
            num_qubits: self.num_qubits,
            amplitudes,
        }
    }

    /// Removes a qubit that is known to sit in the computational state
    /// `value` (for example right after a Z measurement), keeping the rest.
    pub(crate) fn drop_collapsed(&self, qubit: usize, value: u8) -> Result<StateRegister> {
        self.check_index(qubit)?;
        if self.num_qubits == 1 {
            return Err(SealError::Malformed("cannot drop the last qubit of a register".into()));
        }
        let mask = self.mask(qubit);
        let want = if value == 0 { 0 } else { mask };
        let amplitudes: Vec<Complex64> = (0..self.amplitudes.len())
            .filter(|i| i & mask == want)
            .map(|i| self.amplitudes[i])
            .collect();
        Ok(StateRegister {
            num_qubits: self.num_qubits - 1,
            amplitudes,
        })
    }

    /// Splits `qubit` off when the register is a product state across it.
    /// Returns `(qubit_state, remainder)`, or `None` if the qubit is entangled.
    pub(crate) fn factor_out(&self, qubit: usize) -> Result<Option<(StateRegister, StateRegister)>> {
        self.check_index(qubit)?;
        if self.num_qubits == 1 {
            return Ok(None);
        }
        let mask = self.mask(qubit);
        let split = |bit: usize| -> Vec<Complex64> {
            (0..self.amplitudes.len())
                .filter(|i| i & mask == bit)
                .map(|i| self.amplitudes[i])
                .collect()
        };
        let rows = [split(0), split(mask)];
        let norms = [norm_sqr(&rows[0]), norm_sqr(&rows[1])];
        let pivot = if norms[0] >= norms[1] { 0 } else { 1 };
        let scale = 1.0 / norms[pivot].sqrt();
        let rest: Vec<Complex64> = rows[pivot].iter().map(|a| a * scale).collect();
        let single: Vec<Complex64> = rows
            .iter()
            .map(|row| row.iter().zip(&rest).map(|(a, r)| r.conj() * a).sum())
            .collect();
        let residual: f64 = rows
            .iter()
            .zip(&single)
            .map(|(row, c)| {
                row.iter()
                    .zip(&rest)
                    .map(|(a, r)| (a - c * r).norm_sqr())
                    .sum::<f64>()
            })
            .sum();
        if residual > TOLERANCE {
            return Ok(None);
        }
        let single_norm = norm_sqr(&single).sqrt();
        let single = single.into_iter().map(|a| a / single_norm).collect();
        Ok(Some((
            StateRegister {
                num_qubits: 1,
                amplitudes: single,
            },
            StateRegister {
                num_qubits: self.num_qubits - 1,
                amplitudes: rest,
            },
        )))
    }

    /// ⟨φ|ρ|φ⟩ where ρ is the reduced state of `qubit` and φ a 1-qubit state.
    pub fn reduced_fidelity(&self, qubit: usize, target: &StateRegister) -> Result<f64> {
        self.check_index(qubit)?;
        if target.num_qubits != 1 {
            return Err(SealError::SizeMismatch {
                left: 1,
                right: target.num_qubits,
            });
        }
        let t = &target.amplitudes;
        Ok(self
            .pairs(qubit)
            .map(|(i, j)| (t[0].conj() * self.amplitudes[i] + t[1].conj() * self.amplitudes[j]).norm_sqr())
            .sum())
    }
}

fn norm_sqr(amplitudes: &[Complex64]) -> f64 {
    amplitudes.iter().map(|a| a.norm_sqr()).sum()
}

/// Component of the pair `(a0, a1)` along the single-qubit state `b`.
fn project_pair(b: &[Complex64; 2], a0: Complex64, a1: Complex64) -> Complex64 {
    b[0].conj() * a0 + b[1].conj() * a1
}

/// Result of a projective measurement on one qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementOutcome {
    pub value: u8,
    pub post_state: StateRegister,
}

/// Result of a two-outcome subspace measurement `{P, 1 − P}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub hit: bool,
    pub post_state: StateRegister,
}

/// Prepares the pure 1-qubit state described by `spec`.
pub fn prepare(spec: QubitSpec) -> StateRegister {
    StateRegister {
        num_qubits: 1,
        amplitudes: spec.basis.vector(spec.bit).to_vec(),
    }
}

/// Measures `qubit` in `basis`, sampling the outcome by the Born rule.
pub fn measure(
    reg: &StateRegister,
    qubit: usize,
    basis: Basis,
    rand: &mut RandomSource,
) -> Result<MeasurementOutcome> {
    let probs = reg.outcome_probabilities(qubit, basis)?;
    let u = rand.uniform() * (probs[0] + probs[1]);
    let value = if u < probs[0] { 0 } else { 1 };
    let post_state = reg.collapse(qubit, basis, value, probs[value as usize]);
    Ok(MeasurementOutcome { value, post_state })
}

/// Applies a Hadamard gate to `qubit`.
pub fn apply_hadamard(reg: &StateRegister, qubit: usize) -> Result<StateRegister> {
    reg.check_index(qubit)?;
    let mut amplitudes = reg.amplitudes.clone();
    for (i, j) in reg.pairs(qubit) {
        let (a, b) = (reg.amplitudes[i], reg.amplitudes[j]);
        amplitudes[i] = (a + b) * FRAC_1_SQRT_2;
        amplitudes[j] = (a - b) * FRAC_1_SQRT_2;
    }
    Ok(StateRegister {
        num_qubits: reg.num_qubits,
        amplitudes,
    })
}

/// Controlled-SWAP (Fredkin): exchanges qubits `a` and `b` wherever `control` is |1⟩.
pub fn apply_cswap(reg: &StateRegister, control: usize, a: usize, b: usize) -> Result<StateRegister> {
    for q in [control, a, b] {
        reg.check_index(q)?;
    }
    if control == a || control == b {
        return Err(SealError::DuplicateIndex(control));
    }
    if a == b {
        return Err(SealError::DuplicateIndex(a));
    }
    let (mc, ma, mb) = (reg.mask(control), reg.mask(a), reg.mask(b));
    let mut amplitudes = reg.amplitudes.clone();
    for i in 0..amplitudes.len() {
        // Visit each swapped pair once, from the side with a = 1, b = 0.
        if i & mc != 0 && i & ma != 0 && i & mb == 0 {
            let j = (i & !ma) | mb;
            amplitudes.swap(i, j);
        }
    }
    Ok(StateRegister {
        num_qubits: reg.num_qubits,
        amplitudes,
    })
}

/// Tensor product of `regs`, in order.
pub fn merge(regs: &[StateRegister]) -> Result<StateRegister> {
    let total: usize = regs.iter().map(|r| r.num_qubits).sum();
    if total > MAX_QUBITS {
        return Err(SealError::CapacityExceeded {
            requested: total,
            max: MAX_QUBITS,
        });
    }
    let Some((first, rest)) = regs.split_first() else {
        return Err(SealError::Malformed("nothing to merge".into()));
    };
    let amplitudes = rest.iter().fold(first.amplitudes.clone(), |acc, r| {
        acc.iter()
            .flat_map(|a| r.amplitudes.iter().map(move |b| a * b))
            .collect()
    });
    Ok(StateRegister {
        num_qubits: total,
        amplitudes,
    })
}

/// Two-outcome measurement of the projector onto the span of the listed
/// computational basis states of the whole register.
pub fn project_subspace(
    reg: &StateRegister,
    basis_states: &[usize],
    rand: &mut RandomSource,
) -> Result<Projection> {
    let all: Vec<usize> = (0..reg.num_qubits).collect();
    project_qubits(reg, &all, basis_states, rand)
}

/// Like [`project_subspace`], with `patterns` read over the listed `qubits`
/// only (the first listed qubit is the most significant pattern bit); the
/// remaining qubits are left free.
pub fn project_qubits(
    reg: &StateRegister,
    qubits: &[usize],
    patterns: &[usize],
    rand: &mut RandomSource,
) -> Result<Projection> {
    if patterns.is_empty() {
        return Err(SealError::EmptyProjector);
    }
    for (n, &q) in qubits.iter().enumerate() {
        reg.check_index(q)?;
        if qubits[..n].contains(&q) {
            return Err(SealError::DuplicateIndex(q));
        }
    }
    let width = qubits.len();
    if let Some(&bad) = patterns.iter().find(|&&p| p >> width != 0) {
        return Err(SealError::BasisStateOutOfRange { index: bad, width });
    }
    let pattern_of = |index: usize| -> usize {
        qubits
            .iter()
            .fold(0, |acc, &q| (acc << 1) | usize::from(index & reg.mask(q) != 0))
    };
    let inside: Vec<bool> = (0..reg.amplitudes.len())
        .map(|i| patterns.contains(&pattern_of(i)))
        .collect();
    let p_hit: f64 = reg
        .amplitudes
        .iter()
        .zip(&inside)
        .filter(|(_, &keep)| keep)
        .map(|(a, _)| a.norm_sqr())
        .sum();
    let p_miss: f64 = reg
        .amplitudes
        .iter()
        .zip(&inside)
        .filter(|(_, &keep)| !keep)
        .map(|(a, _)| a.norm_sqr())
        .sum();
    let hit = rand.uniform() * (p_hit + p_miss) < p_hit;
    let (kept, dropped) = if hit { (p_hit, p_miss) } else { (p_miss, p_hit) };
    // Nothing outside the outcome's subspace: the state is already an eigenstate.
    let scale = if dropped == 0.0 { 1.0 } else { 1.0 / kept.sqrt() };
    let amplitudes = reg
        .amplitudes
        .iter()
        .zip(&inside)
        .map(|(a, &keep)| if keep == hit { a * scale } else { ZERO })
        .collect();
    Ok(Projection {
        hit,
        post_state: StateRegister {
            num_qubits: reg.num_qubits,
            amplitudes,
        },
    })
}

/// |⟨a|b⟩|².
pub fn fidelity(a: &StateRegister, b: &StateRegister) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr())
}
