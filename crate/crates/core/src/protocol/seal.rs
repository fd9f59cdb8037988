use crate::error::{Result, SealError};
use crate::qsim::{Basis, QubitSpec};
use crate::rng::RandomSource;

use super::memory::QuantumMemory;
use super::{Verdict, VerificationReport};

/// Qubits per encoded bit.
pub const BLOCK_SIZE: usize = 3;

/// The four control-qubit states, in draw order.
pub const CONTROL_STATES: [QubitSpec; 4] = [
    QubitSpec { basis: Basis::X, bit: 0 },
    QubitSpec { basis: Basis::X, bit: 1 },
    QubitSpec { basis: Basis::Y, bit: 0 },
    QubitSpec { basis: Basis::Y, bit: 1 },
];

/// Alice's record of one encoded bit: two message qubits in Z carrying the
/// bit, and one control qubit in X or Y at `control_position`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SealBlock {
    message_bit: u8,
    control_position: usize,
    control_spec: QubitSpec,
    qubit_specs: [QubitSpec; BLOCK_SIZE],
}

impl SealBlock {
    pub fn new(message_bit: u8, control_position: usize, control_spec: QubitSpec) -> Result<Self> {
        if message_bit > 1 {
            return Err(SealError::InvalidBit(message_bit));
        }
        if control_position >= BLOCK_SIZE {
            return Err(SealError::IndexOutOfRange {
                index: control_position,
                len: BLOCK_SIZE,
            });
        }
        if control_spec.basis == Basis::Z {
            return Err(SealError::Malformed(
                "control qubit must be prepared in the X or Y basis".into(),
            ));
        }
        let message = QubitSpec::new(Basis::Z, message_bit)?;
        let mut qubit_specs = [message; BLOCK_SIZE];
        qubit_specs[control_position] = QubitSpec::new(control_spec.basis, control_spec.bit)?;
        Ok(Self {
            message_bit,
            control_position,
            control_spec,
            qubit_specs,
        })
    }

    pub fn message_bit(&self) -> u8 {
        self.message_bit
    }

    pub fn control_position(&self) -> usize {
        self.control_position
    }

    pub fn control_spec(&self) -> QubitSpec {
        self.control_spec
    }

    pub fn qubit_specs(&self) -> &[QubitSpec; BLOCK_SIZE] {
        &self.qubit_specs
    }
}

/// Alice's private record of a sealed message plus the public reading basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SealedMessage {
    blocks: Vec<SealBlock>,
    reading_basis: Basis,
}

impl SealedMessage {
    pub fn new(blocks: Vec<SealBlock>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(SealError::EmptyMessage);
        }
        Ok(Self {
            blocks,
            reading_basis: Basis::Z,
        })
    }

    pub fn blocks(&self) -> &[SealBlock] {
        &self.blocks
    }

    pub fn reading_basis(&self) -> Basis {
        self.reading_basis
    }

    pub fn num_bits(&self) -> usize {
        self.blocks.len()
    }

    pub fn num_qubits(&self) -> usize {
        self.blocks.len() * BLOCK_SIZE
    }

    pub fn bits(&self) -> Vec<u8> {
        self.blocks.iter().map(|b| b.message_bit).collect()
    }

    /// Preparation record of seal qubit `index`.
    pub fn spec(&self, index: usize) -> Result<QubitSpec> {
        self.blocks
            .get(index / BLOCK_SIZE)
            .map(|b| b.qubit_specs[index % BLOCK_SIZE])
            .ok_or(SealError::IndexOutOfRange {
                index,
                len: self.num_qubits(),
            })
    }

    pub fn specs(&self) -> impl Iterator<Item = QubitSpec> + '_ {
        self.blocks.iter().flat_map(|b| b.qubit_specs)
    }

    pub fn is_control(&self, index: usize) -> bool {
        self.blocks
            .get(index / BLOCK_SIZE)
            .is_some_and(|b| b.control_position == index % BLOCK_SIZE)
    }

    pub fn control_indices(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .enumerate()
            .map(|(k, b)| k * BLOCK_SIZE + b.control_position)
            .collect()
    }

    /// Fresh public memory holding the prepared seal qubits.
    pub fn prepare_memory(&self) -> QuantumMemory {
        QuantumMemory::from_specs(self.specs())
    }
}

/// Encodes `bits`, drawing each block's control position and state
/// uniformly and independently.
pub fn encode(bits: &[u8], rand: &mut RandomSource) -> Result<(SealedMessage, QuantumMemory)> {
    if bits.is_empty() {
        return Err(SealError::EmptyMessage);
    }
    let blocks = bits
        .iter()
        .map(|&bit| {
            let position = rand.below(BLOCK_SIZE);
            let control = CONTROL_STATES[rand.below(CONTROL_STATES.len())];
            SealBlock::new(bit, position, control)
        })
        .collect::<Result<Vec<_>>>()?;
    let sealed = SealedMessage::new(blocks)?;
    let memory = sealed.prepare_memory();
    Ok((sealed, memory))
}

/// Encodes `bits` with explicit `(control_position, control_state)` choices.
pub fn encode_with_choices(
    bits: &[u8],
    choices: &[(usize, QubitSpec)],
) -> Result<(SealedMessage, QuantumMemory)> {
    if bits.len() != choices.len() {
        return Err(SealError::LengthMismatch {
            memory: bits.len(),
            record: choices.len(),
        });
    }
    let blocks = bits
        .iter()
        .zip(choices)
        .map(|(&bit, &(position, control))| SealBlock::new(bit, position, control))
        .collect::<Result<Vec<_>>>()?;
    let sealed = SealedMessage::new(blocks)?;
    let memory = sealed.prepare_memory();
    Ok((sealed, memory))
}

/// Majority value of one triplet.
pub fn majority(votes: &[u8]) -> u8 {
    assert!(votes.len() % 2 == 1, "majority vote needs an odd number of votes");
    let ones = votes.iter().filter(|&&v| v == 1).count();
    u8::from(ones * 2 > votes.len())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReadResult {
    pub bits: Vec<u8>,
    pub transcript: Vec<u8>,
}

/// Honest public reading: every qubit measured in the announced basis,
/// each triplet decoded by majority vote.
pub fn public_read(
    memory: &mut QuantumMemory,
    reading_basis: Basis,
    rand: &mut RandomSource,
) -> Result<ReadResult> {
    if !memory.len().is_multiple_of(BLOCK_SIZE) {
        return Err(SealError::Malformed(format!(
            "memory holds {} qubits, not a whole number of triplets",
            memory.len()
        )));
    }
    let transcript = (0..memory.len())
        .map(|i| memory.measure(i, reading_basis, rand))
        .collect::<Result<Vec<_>>>()?;
    let bits = transcript.chunks(BLOCK_SIZE).map(majority).collect();
    Ok(ReadResult { bits, transcript })
}

/// Alice measures every qubit in its preparation basis and counts
/// outcomes that differ from her record.
pub fn alice_verify(
    memory: &mut QuantumMemory,
    sealed: &SealedMessage,
    rand: &mut RandomSource,
) -> Result<VerificationReport> {
    if memory.len() != sealed.num_qubits() {
        return Err(SealError::LengthMismatch {
            memory: memory.len(),
            record: sealed.num_qubits(),
        });
    }
    let mut mismatches = 0;
    for (i, spec) in sealed.specs().enumerate() {
        if memory.measure(i, spec.basis, rand)? != spec.bit {
            mismatches += 1;
        }
    }
    Ok(VerificationReport {
        qubits_checked: sealed.num_qubits(),
        mismatches,
        verdict: Verdict::from_failures(mismatches),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(basis: Basis, bit: u8) -> QubitSpec {
        QubitSpec::new(basis, bit).unwrap()
    }

    #[test]
    fn worked_example_0110() {
        let choices = [
            (2, q(Basis::Y, 0)),
            (0, q(Basis::X, 0)),
            (1, q(Basis::Y, 0)),
            (1, q(Basis::X, 0)),
        ];
        let (sealed, memory) = encode_with_choices(&[0, 1, 1, 0], &choices).unwrap();
        let expected = [
            q(Basis::Z, 0), q(Basis::Z, 0), q(Basis::Y, 0),
            q(Basis::X, 0), q(Basis::Z, 1), q(Basis::Z, 1),
            q(Basis::Z, 1), q(Basis::Y, 0), q(Basis::Z, 1),
            q(Basis::Z, 0), q(Basis::X, 0), q(Basis::Z, 0),
        ];
        assert_eq!(sealed.specs().collect::<Vec<_>>(), expected);
        assert_eq!(memory.len(), 12);
        assert_eq!(sealed.control_indices(), vec![2, 3, 7, 10]);
    }

    #[test]
    fn single_block() {
        let (sealed, _) = encode_with_choices(&[1], &[(0, q(Basis::X, 1))]).unwrap();
        assert_eq!(
            sealed.blocks()[0].qubit_specs(),
            &[q(Basis::X, 1), q(Basis::Z, 1), q(Basis::Z, 1)]
        );
    }

    #[test]
    fn block_invariants_enforced() {
        assert!(SealBlock::new(0, 3, q(Basis::X, 0)).is_err());
        assert!(SealBlock::new(0, 0, q(Basis::Z, 0)).is_err());
        assert!(SealBlock::new(2, 0, q(Basis::X, 0)).is_err());
    }

    #[test]
    fn empty_message_rejected() {
        let mut rng = RandomSource::new(0);
        assert!(matches!(encode(&[], &mut rng), Err(SealError::EmptyMessage)));
    }

    #[test]
    fn control_choices_uniform() {
        // 12 equally likely (position, state) pairs; 3σ binomial band each.
        let mut rng = RandomSource::new(11);
        let bits = vec![0u8; 12_000];
        let (sealed, _) = encode(&bits, &mut rng).unwrap();
        let mut counts = [[0usize; 4]; 3];
        for b in sealed.blocks() {
            let s = CONTROL_STATES.iter().position(|&c| c == b.control_spec()).unwrap();
            counts[b.control_position()][s] += 1;
        }
        let n = bits.len() as f64;
        let p = 1.0 / 12.0;
        let band = 3.0 * (p * (1.0 - p) / n).sqrt();
        for row in counts {
            for c in row {
                let f = c as f64 / n;
                assert!((f - p).abs() < band, "frequency {f}");
            }
        }
    }

    #[test]
    fn majority_vote() {
        assert_eq!(majority(&[0, 0, 1]), 0);
        assert_eq!(majority(&[1, 0, 1]), 1);
        assert_eq!(majority(&[1, 1, 1]), 1);
    }

    #[test]
    #[should_panic]
    fn majority_rejects_even() {
        majority(&[0, 1]);
    }

    #[test]
    fn untouched_memory_verifies_intact() {
        let mut rng = RandomSource::new(5);
        for _ in 0..200 {
            let (sealed, mut memory) = encode(&[0, 1, 1, 0, 1], &mut rng).unwrap();
            let report = alice_verify(&mut memory, &sealed, &mut rng).unwrap();
            assert_eq!(report.qubits_checked, 15);
            assert_eq!(report.mismatches, 0);
            assert_eq!(report.verdict, Verdict::Intact);
        }
    }

    #[test]
    fn read_of_zero_zero_y0_gives_000_or_001() {
        let mut rng = RandomSource::new(6);
        let (sealed, _) = encode_with_choices(&[0], &[(2, q(Basis::Y, 0))]).unwrap();
        let n = 10_000;
        let mut ones = 0;
        for _ in 0..n {
            let mut memory = sealed.prepare_memory();
            let read = public_read(&mut memory, Basis::Z, &mut rng).unwrap();
            assert_eq!(read.bits, vec![0]);
            match read.transcript.as_slice() {
                [0, 0, 0] => {}
                [0, 0, 1] => ones += 1,
                other => panic!("unexpected transcript {other:?}"),
            }
        }
        let f = ones as f64 / n as f64;
        assert!((f - 0.5).abs() < 3.0 * (0.25 / n as f64).sqrt(), "001 frequency {f}");
    }

    #[test]
    fn verify_length_mismatch() {
        let mut rng = RandomSource::new(0);
        let (sealed, _) = encode(&[0, 1], &mut rng).unwrap();
        let (_, mut other) = encode(&[0], &mut rng).unwrap();
        assert!(matches!(
            alice_verify(&mut other, &sealed, &mut rng),
            Err(SealError::LengthMismatch { .. })
        ));
    }
}
