//! Versioned JSON documents for sealed memories, Alice's records and grants.
//!
//! A [`SealDocument`] carries any of two parts: `memory` (the public
//! registers) and `blocks` (Alice's private preparation record). The public
//! file written by the CLI holds only `memory`; Alice's record file holds
//! only `blocks`. Amplitudes are written as `[re, im]` pairs using the
//! shortest decimal form that parses back to the identical `f64`.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SealError};
use crate::protocol::{GrantEntry, QuantumMemory, QubitLabel, SealBlock, SealedMessage, SubsetGrant};
use crate::qsim::{Basis, QubitSpec, StateRegister};

pub const FORMAT_VERSION: u32 = 1;

/// Squared-norm tolerance for amplitudes read from disk.
pub const LOAD_NORM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockRecord {
    pub message_bit: u8,
    pub control_position: usize,
    pub control_basis: Basis,
    pub control_bit: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegisterRecord {
    /// Seal index per qubit; `null` marks a reader qubit left entangled
    /// with the seal by a SWAP test.
    pub qubit_indices: Vec<QubitLabel>,
    pub amplitudes: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SealDocument {
    pub version: u32,
    pub reading_basis: Basis,
    pub num_bits: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<BlockRecord>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub memory: Option<Vec<RegisterRecord>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrantEntryRecord {
    pub index: usize,
    pub amplitudes: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrantDocument {
    pub reader_id: String,
    pub entries: Vec<GrantEntryRecord>,
}

fn amplitudes_to_pairs(state: &StateRegister) -> Vec<[f64; 2]> {
    state.amplitudes().iter().map(|a| [a.re, a.im]).collect()
}

fn pairs_to_state(pairs: &[[f64; 2]]) -> Result<StateRegister> {
    let amplitudes = pairs.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
    StateRegister::from_amplitudes(amplitudes, LOAD_NORM_TOLERANCE)
}

fn memory_records(memory: &QuantumMemory) -> Vec<RegisterRecord> {
    memory
        .registers()
        .map(|(labels, state)| RegisterRecord {
            qubit_indices: labels.to_vec(),
            amplitudes: amplitudes_to_pairs(state),
        })
        .collect()
}

fn block_records(sealed: &SealedMessage) -> Vec<BlockRecord> {
    sealed
        .blocks()
        .iter()
        .map(|b| BlockRecord {
            message_bit: b.message_bit(),
            control_position: b.control_position(),
            control_basis: b.control_spec().basis,
            control_bit: b.control_spec().bit,
        })
        .collect()
}

impl SealDocument {
    /// Public memory only.
    pub fn public(memory: &QuantumMemory, reading_basis: Basis) -> Self {
        Self {
            version: FORMAT_VERSION,
            reading_basis,
            num_bits: memory.len() / crate::protocol::BLOCK_SIZE,
            blocks: None,
            memory: Some(memory_records(memory)),
        }
    }

    /// Alice's private record only.
    pub fn record(sealed: &SealedMessage) -> Self {
        Self {
            version: FORMAT_VERSION,
            reading_basis: sealed.reading_basis(),
            num_bits: sealed.num_bits(),
            blocks: Some(block_records(sealed)),
            memory: None,
        }
    }

    /// Both parts in one document.
    pub fn full(sealed: &SealedMessage, memory: &QuantumMemory) -> Self {
        Self {
            memory: Some(memory_records(memory)),
            ..Self::record(sealed)
        }
    }

    pub fn to_memory(&self) -> Result<QuantumMemory> {
        let records = self
            .memory
            .as_ref()
            .ok_or_else(|| SealError::Malformed("document has no `memory` section".into()))?;
        let registers = records
            .iter()
            .map(|r| Ok((r.qubit_indices.clone(), pairs_to_state(&r.amplitudes)?)))
            .collect::<Result<Vec<_>>>()?;
        let memory = QuantumMemory::from_registers(registers)?;
        if memory.len() != self.num_bits * crate::protocol::BLOCK_SIZE {
            return Err(SealError::LengthMismatch {
                memory: memory.len(),
                record: self.num_bits * crate::protocol::BLOCK_SIZE,
            });
        }
        Ok(memory)
    }

    pub fn to_sealed(&self) -> Result<SealedMessage> {
        let records = self
            .blocks
            .as_ref()
            .ok_or_else(|| SealError::Malformed("document has no `blocks` section".into()))?;
        if records.len() != self.num_bits {
            return Err(SealError::Malformed(format!(
                "num_bits is {} but {} blocks are listed",
                self.num_bits,
                records.len()
            )));
        }
        let blocks = records
            .iter()
            .map(|r| {
                SealBlock::new(
                    r.message_bit,
                    r.control_position,
                    QubitSpec::new(r.control_basis, r.control_bit)?,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        SealedMessage::new(blocks)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        from_versioned_json(text)
    }
}

impl GrantDocument {
    pub fn from_grant(grant: &SubsetGrant) -> Self {
        Self {
            reader_id: grant.reader_id.clone(),
            entries: grant
                .entries
                .iter()
                .map(|e| GrantEntryRecord {
                    index: e.index,
                    amplitudes: amplitudes_to_pairs(&e.copy),
                })
                .collect(),
        }
    }

    pub fn to_grant(&self) -> Result<SubsetGrant> {
        let entries = self
            .entries
            .iter()
            .map(|e| {
                let copy = pairs_to_state(&e.amplitudes)?;
                if copy.num_qubits() != 1 {
                    return Err(SealError::Malformed(format!(
                        "grant entry {} is not a single qubit",
                        e.index
                    )));
                }
                Ok(GrantEntry { index: e.index, copy })
            })
            .collect::<Result<Vec<_>>>()?;
        if entries.is_empty() {
            return Err(SealError::EmptyGrant);
        }
        Ok(SubsetGrant {
            reader_id: self.reader_id.clone(),
            entries,
        })
    }
}

fn from_versioned_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let found = value
        .get("version")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| SealError::Malformed("missing `version`".into()))?;
    if found != u64::from(FORMAT_VERSION) {
        return Err(SealError::VersionMismatch {
            found: found.try_into().unwrap_or(u32::MAX),
            expected: FORMAT_VERSION,
        });
    }
    Ok(serde_json::from_value(value)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn read_seal_document(path: &Path) -> Result<SealDocument> {
    SealDocument::from_json(&fs::read_to_string(path)?)
}

pub fn read_grant(path: &Path) -> Result<SubsetGrant> {
    let doc: GrantDocument = serde_json::from_str(&fs::read_to_string(path)?)?;
    doc.to_grant()
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}
