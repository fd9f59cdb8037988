//! Intended readers get copies of some seal qubits and SWAP-test them
//! against the memory. Granting every control gives the strongest check.
use quantum_seal::protocol::{bob_verify, encode, grant_subset, public_read, Verdict};
use quantum_seal::RandomSource;

fn main() -> quantum_seal::Result<()> {
    let bits = [1, 0, 1, 1, 0, 0, 1, 0];
    let trials = 2_000;
    let mut detected = [0u32; 2];
    for trial in 0..trials {
        let mut rand = RandomSource::new(3).fork(trial);
        let (sealed, memory) = encode(&bits, &mut rand)?;
        let controls = sealed.control_indices();

        for (slot, tamper) in [false, true].into_iter().enumerate() {
            let mut memory = memory.clone();
            if tamper {
                public_read(&mut memory, sealed.reading_basis(), &mut rand)?;
            }
            let grant = grant_subset(&sealed, "bob", &controls)?;
            if bob_verify(grant, &mut memory, &mut rand)?.verdict == Verdict::Broken {
                detected[slot] += 1;
            }
        }
    }
    println!("untouched: {}/{trials} broken", detected[0]);
    println!("read:      {}/{trials} broken (expect ~{:.4})", detected[1], 1.0 - 0.75f64.powi(bits.len() as i32));
    Ok(())
}
