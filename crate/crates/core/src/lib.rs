//! Simulation and analysis of quantum seals.
//!
//! A classical message is written into qubit triplets: two message qubits in
//! the computational basis and one control qubit in X or Y. Anyone can read
//! the message without error by majority vote, but reading disturbs the
//! control qubits, which the sealer (by measuring in the preparation bases)
//! and intended readers (by SWAP tests against fresh copies) can detect.
//!
//! Modules:
//! - [`qsim`]: dense state-vector simulator for up to four qubits
//! - [`protocol`]: encoding, public memory, readout and verification
//! - [`adversary`]: single-qubit, partial and collective reading attacks
//! - [`montecarlo`]: seeded trial runner, detection statistics and closed-form rates
//! - [`persist`]: JSON documents for memories, seal records, grants
//! - [`cli`]: the `qseal` command-line front end

pub mod adversary;
pub mod cli;
pub mod error;
pub mod montecarlo;
pub mod persist;
pub mod protocol;
pub mod qsim;
pub mod rng;

pub use error::{Result, SealError};
pub use rng::{RandomSource, Role};
