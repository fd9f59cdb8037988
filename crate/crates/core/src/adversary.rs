//! Reading attacks on a sealed memory.
//!
//! Attackers see only the public memory and the announced reading basis (Z);
//! they act through the same measurement primitives as honest parties.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SealError};
use crate::protocol::{majority, public_read, QuantumMemory, BLOCK_SIZE};
use crate::qsim::{self, Basis};
use crate::rng::RandomSource;

/// Triplet patterns spanning every 0-encoding state: 000, 001, 010, 100.
pub const ZERO_SUBSPACE: [usize; 4] = [0b000, 0b001, 0b010, 0b100];

/// Triplet patterns spanning every 1-encoding state: 111, 110, 101, 011.
pub const ONE_SUBSPACE: [usize; 4] = [0b111, 0b110, 0b101, 0b011];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Measure every qubit in Z and majority-vote.
    SingleQubit,
    /// Measure two random positions per triplet; read the third only on disagreement.
    Partial,
    /// Measure the P₀/P₁ projectors on each whole triplet.
    Collective,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::SingleQubit, Strategy::Partial, Strategy::Collective];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::SingleQubit => "single-qubit",
            Strategy::Partial => "partial",
            Strategy::Collective => "collective",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = SealError;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| SealError::UnknownStrategy(s.to_owned()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttackOutcome {
    pub recovered_bits: Vec<u8>,
    pub qubits_touched: BTreeSet<usize>,
    pub strategy: Strategy,
}

fn check_triplets(memory: &QuantumMemory) -> Result<usize> {
    if memory.is_empty() || !memory.len().is_multiple_of(BLOCK_SIZE) {
        return Err(SealError::Malformed(format!(
            "memory holds {} qubits, not a whole number of triplets",
            memory.len()
        )));
    }
    Ok(memory.len() / BLOCK_SIZE)
}

pub fn run_attack(strategy: Strategy, memory: &mut QuantumMemory, rand: &mut RandomSource) -> Result<AttackOutcome> {
    match strategy {
        Strategy::SingleQubit => attack_single_qubit(memory, rand),
        Strategy::Partial => attack_partial(memory, rand),
        Strategy::Collective => attack_collective(memory, rand),
    }
}

/// Honest-but-curious reader: the public readout under another name.
pub fn attack_single_qubit(memory: &mut QuantumMemory, rand: &mut RandomSource) -> Result<AttackOutcome> {
    check_triplets(memory)?;
    let read = public_read(memory, Basis::Z, rand)?;
    Ok(AttackOutcome {
        recovered_bits: read.bits,
        qubits_touched: (0..memory.len()).collect(),
        strategy: Strategy::SingleQubit,
    })
}

/// Reads two uniformly chosen qubits of each triplet in Z and stops when
/// they agree; on disagreement the third qubit decides by majority.
pub fn attack_partial(memory: &mut QuantumMemory, rand: &mut RandomSource) -> Result<AttackOutcome> {
    let blocks = check_triplets(memory)?;
    let mut recovered_bits = Vec::with_capacity(blocks);
    let mut qubits_touched = BTreeSet::new();
    for block in 0..blocks {
        let base = block * BLOCK_SIZE;
        // Skipping one position uniformly picks the pair uniformly.
        let skipped = rand.below(BLOCK_SIZE);
        let pair: Vec<usize> = (0..BLOCK_SIZE).filter(|&p| p != skipped).collect();
        let mut votes = Vec::with_capacity(BLOCK_SIZE);
        for &p in &pair {
            votes.push(memory.measure(base + p, Basis::Z, rand)?);
            qubits_touched.insert(base + p);
        }
        if votes[0] != votes[1] {
            votes.push(memory.measure(base + skipped, Basis::Z, rand)?);
            qubits_touched.insert(base + skipped);
            recovered_bits.push(majority(&votes));
        } else {
            recovered_bits.push(votes[0]);
        }
    }
    Ok(AttackOutcome {
        recovered_bits,
        qubits_touched,
        strategy: Strategy::Partial,
    })
}

/// Measures {P₀, P₁} on each triplet. Every 0-encoding lies in the range of
/// P₀ and every 1-encoding in the range of P₁, so the outcome is certain and
/// the triplet is left as it was.
pub fn attack_collective(memory: &mut QuantumMemory, rand: &mut RandomSource) -> Result<AttackOutcome> {
    let blocks = check_triplets(memory)?;
    let mut recovered_bits = Vec::with_capacity(blocks);
    for block in 0..blocks {
        let triplet: Vec<usize> = (0..BLOCK_SIZE).map(|p| block * BLOCK_SIZE + p).collect();
        let entry = memory.gather(&triplet, 0, rand)?;
        let positions: Vec<usize> = triplet
            .iter()
            .map(|&i| memory.position(entry, i).expect("gathered register holds the triplet"))
            .collect();
        let projection = qsim::project_qubits(memory.state(entry), &positions, &ZERO_SUBSPACE, rand)?;
        recovered_bits.push(if projection.hit { 0 } else { 1 });
        let labels = memory.labels(entry).to_vec();
        memory.replace(entry, labels, projection.post_state)?;
    }
    Ok(AttackOutcome {
        recovered_bits,
        qubits_touched: (0..memory.len()).collect(),
        strategy: Strategy::Collective,
    })
}
