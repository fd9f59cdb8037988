//! The seal protocol: encoding, public memory, readout and both
//! verification routes.

mod grant;
mod memory;
mod seal;

use serde::{Deserialize, Serialize};

pub use grant::{
    bob_verify, default_grant_indices, grant_size, grant_subset, sample_grant_indices, swap_test,
    GrantEntry, SubsetGrant, SwapVerdict, DEFAULT_GRANT_FRACTION,
};
pub use memory::{QuantumMemory, QubitLabel};
pub use seal::{
    alice_verify, encode, encode_with_choices, majority, public_read, ReadResult, SealBlock,
    SealedMessage, BLOCK_SIZE, CONTROL_STATES,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Intact,
    Broken,
}

impl Verdict {
    pub fn from_failures(failures: usize) -> Self {
        if failures > 0 {
            Verdict::Broken
        } else {
            Verdict::Intact
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub qubits_checked: usize,
    pub mismatches: usize,
    pub verdict: Verdict,
}
