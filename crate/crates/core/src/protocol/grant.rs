use crate::error::{Result, SealError};
use crate::qsim::{self, Basis, StateRegister};
use crate::rng::RandomSource;

use super::memory::{QuantumMemory, QubitLabel};
use super::seal::{SealedMessage, BLOCK_SIZE};
use super::{Verdict, VerificationReport};

/// Fraction of seal qubits handed to a reader by [`default_grant_indices`].
pub const DEFAULT_GRANT_FRACTION: f64 = 0.1;

/// One granted qubit: its seal index and a fresh copy of its state.
#[derive(Debug, Clone, PartialEq)]
pub struct GrantEntry {
    pub index: usize,
    pub copy: StateRegister,
}

/// An intended reader's credential. Carries seal indices and copies of the
/// states, never the preparation records themselves.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetGrant {
    pub reader_id: String,
    pub entries: Vec<GrantEntry>,
}

impl SubsetGrant {
    pub fn indices(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.index).collect()
    }
}

/// Prepares fresh copies of the listed seal qubits for `reader_id`.
pub fn grant_subset(sealed: &SealedMessage, reader_id: &str, indices: &[usize]) -> Result<SubsetGrant> {
    if indices.is_empty() {
        return Err(SealError::EmptyGrant);
    }
    let mut entries = Vec::with_capacity(indices.len());
    for (n, &index) in indices.iter().enumerate() {
        if indices[..n].contains(&index) {
            return Err(SealError::DuplicateIndex(index));
        }
        entries.push(GrantEntry {
            index,
            copy: qsim::prepare(sealed.spec(index)?),
        });
    }
    Ok(SubsetGrant {
        reader_id: reader_id.to_owned(),
        entries,
    })
}

/// Number of qubits a `fraction`-sized grant holds out of `num_qubits`.
pub fn grant_size(num_qubits: usize, fraction: f64) -> Result<usize> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(SealError::InvalidConfig(format!(
            "grant fraction {fraction} is outside (0, 1]"
        )));
    }
    Ok(((num_qubits as f64 * fraction).round() as usize).clamp(1, num_qubits))
}

/// Uniformly samples `grant_size(num_qubits, fraction)` distinct indices, sorted.
pub fn sample_grant_indices(num_qubits: usize, fraction: f64, rand: &mut RandomSource) -> Result<Vec<usize>> {
    let count = grant_size(num_qubits, fraction)?;
    Ok(sample_distinct(num_qubits, count, rand))
}

fn sample_distinct(n: usize, count: usize, rand: &mut RandomSource) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..count {
        let j = i + rand.below(n - i);
        pool.swap(i, j);
    }
    let mut chosen = pool[..count].to_vec();
    chosen.sort_unstable();
    chosen
}

/// Default grant: 10% of the seal qubits, uniformly sampled, redrawn until
/// fewer than half of the blocks contribute two or more qubits.
pub fn default_grant_indices(sealed: &SealedMessage, rand: &mut RandomSource) -> Vec<usize> {
    const ATTEMPTS: usize = 64;
    let n = sealed.num_qubits();
    let blocks = sealed.num_bits();
    let count = grant_size(n, DEFAULT_GRANT_FRACTION).expect("default fraction is valid");
    let crowded = |indices: &[usize]| {
        let mut per_block = vec![0usize; blocks];
        for &i in indices {
            per_block[i / BLOCK_SIZE] += 1;
        }
        per_block.iter().filter(|&&c| c >= 2).count()
    };
    for _ in 0..ATTEMPTS {
        let indices = sample_distinct(n, count, rand);
        if 2 * crowded(&indices) < blocks {
            return indices;
        }
    }
    // One qubit from each of `count` distinct blocks.
    let mut indices: Vec<usize> = sample_distinct(blocks, count.min(blocks), rand)
        .into_iter()
        .map(|b| b * BLOCK_SIZE + rand.below(BLOCK_SIZE))
        .collect();
    indices.sort_unstable();
    indices
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwapVerdict {
    Pass,
    Fail,
}

/// SWAP test of a reader's `test` qubit against seal qubit `seal_index`.
///
/// Runs H, controlled-SWAP, H on ancilla |0⟩ ⊗ test ⊗ seal and measures the
/// ancilla in Z; outcome 1 fails. The test qubit is consumed: afterwards it
/// stays in memory alongside the seal qubit while the two are entangled.
pub fn swap_test(
    test: &StateRegister,
    memory: &mut QuantumMemory,
    seal_index: usize,
    rand: &mut RandomSource,
) -> Result<SwapVerdict> {
    if test.num_qubits() != 1 {
        return Err(SealError::SizeMismatch {
            left: 1,
            right: test.num_qubits(),
        });
    }
    let entry = memory.gather(&[seal_index], 2, rand)?;
    let seal_pos = memory
        .position(entry, seal_index)
        .expect("gathered register holds the seal qubit");
    let seal_register = memory.state(entry).clone();
    let labels: Vec<QubitLabel> = memory.labels(entry).to_vec();

    let ancilla = StateRegister::basis_state(1, 0)?;
    let joint = qsim::merge(&[ancilla, test.clone(), seal_register])?;
    let joint = qsim::apply_hadamard(&joint, 0)?;
    let joint = qsim::apply_cswap(&joint, 0, 1, 2 + seal_pos)?;
    let joint = qsim::apply_hadamard(&joint, 0)?;
    let outcome = qsim::measure(&joint, 0, Basis::Z, rand)?;
    let residue = outcome.post_state.drop_collapsed(0, outcome.value)?;

    let mut residue_labels = Vec::with_capacity(labels.len() + 1);
    residue_labels.push(None);
    residue_labels.extend(labels);
    memory.replace(entry, residue_labels, residue)?;

    Ok(if outcome.value == 0 {
        SwapVerdict::Pass
    } else {
        SwapVerdict::Fail
    })
}

/// Intended-reader verification: one SWAP test per granted copy. Any
/// failure breaks the seal. Copies are consumed.
pub fn bob_verify(
    grant: SubsetGrant,
    memory: &mut QuantumMemory,
    rand: &mut RandomSource,
) -> Result<VerificationReport> {
    if let Some(bad) = grant.entries.iter().find(|e| e.index >= memory.len()) {
        return Err(SealError::IndexOutOfRange {
            index: bad.index,
            len: memory.len(),
        });
    }
    let mut failures = 0;
    for entry in &grant.entries {
        if swap_test(&entry.copy, memory, entry.index, rand)? == SwapVerdict::Fail {
            failures += 1;
        }
    }
    Ok(VerificationReport {
        qubits_checked: grant.entries.len(),
        mismatches: failures,
        verdict: Verdict::from_failures(failures),
    })
}
