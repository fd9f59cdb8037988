//! Seal a message and read it publicly. Reading is always correct.
use quantum_seal::protocol::{encode, public_read};
use quantum_seal::RandomSource;

fn main() -> quantum_seal::Result<()> {
    let bits = [0, 1, 1, 0];
    let mut rand = RandomSource::new(7);
    let (sealed, mut memory) = encode(&bits, &mut rand)?;

    println!("{} bits -> {} qubits", sealed.num_bits(), sealed.num_qubits());
    for (i, block) in sealed.blocks().iter().enumerate() {
        let states: Vec<String> = block.qubit_specs().iter().map(|s| format!("{}{}", s.basis, s.bit)).collect();
        println!("  block {i}: bit {} -> [{}] (control at {})", block.message_bit(), states.join(", "), block.control_position());
    }

    let read = public_read(&mut memory, sealed.reading_basis(), &mut rand)?;
    println!("transcript {:?}", read.transcript);
    println!("decoded    {:?}", read.bits);
    assert_eq!(read.bits, bits);
    Ok(())
}
